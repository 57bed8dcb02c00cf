//! Global matrices and load vectors.

use rayon::prelude::*;

use super::shape;
use crate::error::{Error, Result};
use crate::field::FieldFn;
use crate::mesh::{BoundaryLabel, FeOrder, Mesh2D};
use crate::quadrature::{EdgeRule, TriangleRule};
use crate::sparse::SparseSymMatrix;

pub type ElementMatrix = [[f64; 6]; 6];

/// Relative area below which a triangle is treated as degenerate.
const DEGENERATE_AREA: f64 = 1e-12;

type Triangle = [[f64; 2]; 3];

/// Vertices, barycentric gradients and area of a nondegenerate triangle.
fn check_element(mesh: &Mesh2D, t: usize) -> Result<(Triangle, Triangle, f64)> {
    let p = mesh.triangle_points(t);
    let (g, area) = shape::barycentric_gradients(&p);
    let diam2 = (0..3)
        .map(|k| {
            let (a, b) = (p[k], p[(k + 1) % 3]);
            (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
        })
        .fold(0.0, f64::max);
    if !(area > DEGENERATE_AREA * diam2) {
        return Err(Error::Assembly(format!(
            "triangle {t} is degenerate (area {area:e}, squared diameter {diam2:e})"
        )));
    }
    Ok((p, g, area))
}

/// `int_T grad phi_a . grad phi_b` for one element.
pub fn element_stiffness(mesh: &Mesh2D, t: usize) -> Result<ElementMatrix> {
    let order = mesh.fe_order();
    let (_, g, area) = check_element(mesh, t)?;
    let n = order.element_dofs();
    let rule = match order {
        FeOrder::P1 => TriangleRule::centroid(),
        FeOrder::P2 => TriangleRule::degree4(),
    };
    let mut k = [[0.0; 6]; 6];
    for (l, w) in rule.points.iter().zip(&rule.weights) {
        let gr = shape::gradients(order, *l, &g);
        for a in 0..n {
            for b in a..n {
                k[a][b] += w * area * (gr[a][0] * gr[b][0] + gr[a][1] * gr[b][1]);
            }
        }
    }
    mirror_upper(&mut k, n);
    Ok(k)
}

#[allow(clippy::needless_range_loop)]
fn mirror_upper(m: &mut ElementMatrix, n: usize) {
    for a in 0..n {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }
}

/// `int_T phi_a phi_b` for one element.
pub fn element_mass(mesh: &Mesh2D, t: usize) -> Result<ElementMatrix> {
    let order = mesh.fe_order();
    let (_, _, area) = check_element(mesh, t)?;
    let n = order.element_dofs();
    let rule = TriangleRule::with_degree(2 * order.degree());
    let mut m = [[0.0; 6]; 6];
    for (l, w) in rule.points.iter().zip(&rule.weights) {
        let v = shape::values(order, *l);
        for a in 0..n {
            for b in a..n {
                m[a][b] += w * area * v[a] * v[b];
            }
        }
    }
    mirror_upper(&mut m, n);
    Ok(m)
}

fn assemble_matrix(
    mesh: &Mesh2D,
    element: impl Fn(&Mesh2D, usize) -> Result<ElementMatrix> + Sync,
) -> Result<SparseSymMatrix> {
    let dofs: Vec<([usize; 6], usize)> = (0..mesh.n_triangles()).map(|t| mesh.element_dofs(t)).collect();
    let mut matrix = SparseSymMatrix::from_groups(mesh.n_dofs(), dofs.iter().map(|(d, n)| &d[..*n]));
    // element blocks in parallel, scattered in triangle order so the result
    // does not depend on the thread count
    let blocks: Vec<ElementMatrix> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| element(mesh, t))
        .collect::<Result<_>>()?;
    for ((d, n), block) in dofs.iter().zip(&blocks) {
        matrix.add_block(&d[..*n], block);
    }
    Ok(matrix)
}

pub fn assemble_stiffness(mesh: &Mesh2D) -> Result<SparseSymMatrix> {
    assemble_matrix(mesh, element_stiffness)
}

pub fn assemble_mass(mesh: &Mesh2D) -> Result<SparseSymMatrix> {
    assemble_matrix(mesh, element_mass)
}

/// `L_i = int_Omega f phi_i`, with elements split along the breaklines of `f`.
pub fn assemble_load(mesh: &Mesh2D, f: &FieldFn) -> Result<Vec<f64>> {
    let order = mesh.fe_order();
    let rule = TriangleRule::degree6();
    let per_element: Vec<[f64; 6]> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let (p, _, area) = check_element(mesh, t)?;
            let mut local = [0.0; 6];
            for (sub, frac) in shape::split_by_breaklines(&p, f.breaklines()) {
                for (q, w) in rule.points.iter().zip(&rule.weights) {
                    let l = shape::sub_point(&sub, *q);
                    let [x, y] = shape::physical(&p, l);
                    let fv = f.eval(x, y) * w * frac * area;
                    let v = shape::values(order, l);
                    for a in 0..order.element_dofs() {
                        local[a] += fv * v[a];
                    }
                }
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut load = vec![0.0; mesh.n_dofs()];
    for (t, local) in per_element.iter().enumerate() {
        let (d, n) = mesh.element_dofs(t);
        for a in 0..n {
            load[d[a]] += local[a];
        }
    }
    Ok(load)
}

/// `L_i = int_{label} k phi_i ds`.
pub fn assemble_boundary_load(mesh: &Mesh2D, label: BoundaryLabel, k: &FieldFn) -> Result<Vec<f64>> {
    if !mesh.has_label(label) {
        return Err(Error::Label(format!("mesh has no {label} boundary")));
    }
    let order = mesh.fe_order();
    let rule = EdgeRule::gauss(3);
    let mut load = vec![0.0; mesh.n_dofs()];
    for (b, edge) in mesh.boundary_edges().iter().enumerate() {
        if edge.label != label {
            continue;
        }
        let [pa, pb] = edge.vertices.map(|v| mesh.vertices()[v]);
        let len = mesh.boundary_edge_length(b);
        // parameter values where a breakline crosses the edge
        let mut cuts = vec![0.0, 1.0];
        for line in k.breaklines() {
            let (sa, sb) = (line.side(pa), line.side(pb));
            if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
                cuts.push(sa / (sa - sb));
            }
        }
        cuts.sort_by(f64::total_cmp);
        let (dofs, n) = mesh.boundary_edge_dofs(b);
        for seg in cuts.windows(2) {
            let (s0, s1) = (seg[0], seg[1]);
            for (q, w) in rule.points.iter().zip(&rule.weights) {
                let s = s0 + q * (s1 - s0);
                let x = pa[0] + s * (pb[0] - pa[0]);
                let y = pa[1] + s * (pb[1] - pa[1]);
                let kv = k.eval(x, y) * w * (s1 - s0) * len;
                let v = shape::edge_values(order, s);
                for a in 0..n {
                    load[dofs[a]] += kv * v[a];
                }
            }
        }
    }
    Ok(load)
}

/// Row sums of the boundary mass on `label`: `w_i = int_{label} phi_i ds`.
/// For straight edges this is `l/2, l/2` (P1) or `l/6, l/6, 2l/3` (P2).
pub fn assemble_boundary_mass_lumped(mesh: &Mesh2D, label: BoundaryLabel) -> Result<Vec<f64>> {
    if !mesh.has_label(label) {
        return Err(Error::Label(format!("mesh has no {label} boundary")));
    }
    let shares: &[f64] = match mesh.fe_order() {
        FeOrder::P1 => &[0.5, 0.5],
        FeOrder::P2 => &[1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    };
    let mut w = vec![0.0; mesh.n_dofs()];
    for (b, edge) in mesh.boundary_edges().iter().enumerate() {
        if edge.label != label {
            continue;
        }
        let len = mesh.boundary_edge_length(b);
        let (dofs, n) = mesh.boundary_edge_dofs(b);
        for a in 0..n {
            w[dofs[a]] += shares[a] * len;
        }
    }
    Ok(w)
}

/// Consistent boundary mass `int_{label} phi_i phi_j ds` on the full dof set.
pub fn assemble_boundary_mass(mesh: &Mesh2D, label: BoundaryLabel) -> Result<SparseSymMatrix> {
    if !mesh.has_label(label) {
        return Err(Error::Label(format!("mesh has no {label} boundary")));
    }
    let edges: Vec<([usize; 3], usize, f64)> = mesh
        .boundary_edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.label == label)
        .map(|(b, _)| {
            let (d, n) = mesh.boundary_edge_dofs(b);
            (d, n, mesh.boundary_edge_length(b))
        })
        .collect();
    let mut m = SparseSymMatrix::from_groups(mesh.n_dofs(), edges.iter().map(|(d, n, _)| &d[..*n]));
    // endpoints, then midpoint
    let (block, n): ([[f64; 6]; 6], usize) = match mesh.fe_order() {
        FeOrder::P1 => {
            let mut b = [[0.0; 6]; 6];
            b[0][0] = 2.0 / 6.0;
            b[1][1] = 2.0 / 6.0;
            b[0][1] = 1.0 / 6.0;
            b[1][0] = 1.0 / 6.0;
            (b, 2)
        }
        FeOrder::P2 => {
            let r = [[4.0, -1.0, 2.0], [-1.0, 4.0, 2.0], [2.0, 2.0, 16.0]];
            let mut b = [[0.0; 6]; 6];
            for i in 0..3 {
                for j in 0..3 {
                    b[i][j] = r[i][j] / 30.0;
                }
            }
            (b, 3)
        }
    };
    for (d, _, len) in &edges {
        let mut scaled = block;
        scaled.iter_mut().flatten().for_each(|v| *v *= len);
        m.add_block(&d[..n], &scaled);
    }
    Ok(m)
}

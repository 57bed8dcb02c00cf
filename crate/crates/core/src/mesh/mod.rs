//! Triangulations of planar domains with a labeled boundary.
//!
//! A [`Mesh2D`] stores vertices, counter-clockwise triangles and the boundary
//! edges, each tagged with the boundary condition that applies on it. The
//! same mesh carries either P1 (vertex) or P2 (vertex + edge midpoint)
//! degrees of freedom; in the P2 case the midpoint dof of geometric edge `e`
//! is `n_vertices + e`.

mod disk;
mod io;

pub use disk::{generate_unit_disk, AngleRange};
pub use io::{read_mesh, write_mesh};

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Boundary condition carried by a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryLabel {
    Dirichlet,
    Neumann,
    Tresca,
}

impl BoundaryLabel {
    pub const ALL: [BoundaryLabel; 3] = [BoundaryLabel::Dirichlet, BoundaryLabel::Neumann, BoundaryLabel::Tresca];

    /// Single-letter code used by the text mesh format.
    pub fn code(self) -> char {
        match self {
            BoundaryLabel::Dirichlet => 'D',
            BoundaryLabel::Neumann => 'N',
            BoundaryLabel::Tresca => 'T',
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "D" => Some(BoundaryLabel::Dirichlet),
            "N" => Some(BoundaryLabel::Neumann),
            "T" => Some(BoundaryLabel::Tresca),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BoundaryLabel::Dirichlet => "Dirichlet",
            BoundaryLabel::Neumann => "Neumann",
            BoundaryLabel::Tresca => "Tresca",
        };
        f.write_str(name)
    }
}

/// A boundary edge, oriented so the domain lies on its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub label: BoundaryLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeOrder {
    P1,
    P2,
}

impl FeOrder {
    pub fn degree(self) -> usize {
        match self {
            FeOrder::P1 => 1,
            FeOrder::P2 => 2,
        }
    }

    pub fn from_degree(d: usize) -> Option<Self> {
        match d {
            1 => Some(FeOrder::P1),
            2 => Some(FeOrder::P2),
            _ => None,
        }
    }

    /// Local dofs per triangle.
    pub fn element_dofs(self) -> usize {
        match self {
            FeOrder::P1 => 3,
            FeOrder::P2 => 6,
        }
    }

    /// Local dofs per edge.
    pub fn edge_dofs(self) -> usize {
        match self {
            FeOrder::P1 => 2,
            FeOrder::P2 => 3,
        }
    }
}

/// Summary numbers echoed in solver reports.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshStats {
    pub n_vertices: usize,
    pub n_triangles: usize,
    pub n_edges: usize,
    pub n_boundary_edges: usize,
    pub n_dofs: usize,
    pub fe_order: usize,
    pub h_max: f64,
    pub h_min: f64,
    pub min_angle_deg: f64,
}

/// Local edge `k` of a triangle joins local vertices `LOCAL_EDGES[k]`.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    fe_order: FeOrder,
    // derived from `triangles`, deterministic in triangle order
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_index: HashMap<(usize, usize), usize>,
    boundary_edge_ids: Vec<usize>,
}

impl Mesh2D {
    /// Builds a P1 mesh and checks every structural invariant: positive
    /// orientation, a single closed labeled boundary loop, and the Euler
    /// relation of a disk.
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<BoundaryEdge>) -> Result<Self> {
        Self::with_order(vertices, triangles, boundary_edges, FeOrder::P1)
    }

    pub fn with_order(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        fe_order: FeOrder,
    ) -> Result<Self> {
        let nv = vertices.len();
        if nv < 3 || triangles.is_empty() {
            return Err(Error::Mesh("mesh needs at least one triangle".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&i) = tri.iter().find(|&&i| i >= nv) {
                return Err(Error::Mesh(format!(
                    "triangle {t} references vertex {i}, but there are only {nv} vertices"
                )));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!(
                    "triangle {t} has non-positive signed area {area:e}"
                )));
            }
        }

        let mut edges = Vec::new();
        let mut edge_index = HashMap::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut edge_tris: Vec<Vec<(usize, bool)>> = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (k, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                let (i, j) = (tri[*a], tri[*b]);
                let key = (i.min(j), i.max(j));
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_tris.push(Vec::new());
                    edges.len() - 1
                });
                // remember the direction this triangle traverses the edge
                edge_tris[e].push((t, i < j));
                te[k] = e;
            }
            triangle_edges.push(te);
        }

        let mut boundary_edge_ids = Vec::with_capacity(boundary_edges.len());
        let mut seen = vec![false; edges.len()];
        for be in &boundary_edges {
            let [i, j] = be.vertices;
            if i >= nv || j >= nv {
                return Err(Error::Mesh(format!(
                    "boundary edge ({i}, {j}) references a vertex out of range"
                )));
            }
            let e = *edge_index
                .get(&(i.min(j), i.max(j)))
                .ok_or_else(|| Error::Mesh(format!("boundary edge ({i}, {j}) is not a triangle edge")))?;
            if edge_tris[e].len() != 1 {
                return Err(Error::Mesh(format!(
                    "boundary edge ({i}, {j}) is shared by {} triangles",
                    edge_tris[e].len()
                )));
            }
            if seen[e] {
                return Err(Error::Mesh(format!("boundary edge ({i}, {j}) listed twice")));
            }
            seen[e] = true;
            if edge_tris[e][0].1 != (i < j) {
                return Err(Error::Mesh(format!(
                    "boundary edge ({i}, {j}) is not oriented with the domain on its left"
                )));
            }
            boundary_edge_ids.push(e);
        }
        for (e, tris) in edge_tris.iter().enumerate() {
            if tris.len() > 2 {
                return Err(Error::Mesh(format!("edge {:?} is non-manifold", edges[e])));
            }
            if tris.len() == 1 && !seen[e] {
                return Err(Error::Label(format!("boundary edge {:?} carries no label", edges[e])));
            }
        }

        // single closed loop
        let mut next = HashMap::with_capacity(boundary_edges.len());
        for be in &boundary_edges {
            if next.insert(be.vertices[0], be.vertices[1]).is_some() {
                return Err(Error::Mesh(format!(
                    "vertex {} starts two boundary edges",
                    be.vertices[0]
                )));
            }
        }
        if let Some(first) = boundary_edges.first() {
            let start = first.vertices[0];
            let mut v = start;
            let mut steps = 0;
            loop {
                v = *next
                    .get(&v)
                    .ok_or_else(|| Error::Mesh("boundary is not a closed loop".into()))?;
                steps += 1;
                if v == start || steps > boundary_edges.len() {
                    break;
                }
            }
            if v != start || steps != boundary_edges.len() {
                return Err(Error::Mesh("boundary edges do not form a single closed loop".into()));
            }
        } else {
            return Err(Error::Mesh("mesh has no boundary edges".into()));
        }

        let euler = nv as i64 - edges.len() as i64 + triangles.len() as i64;
        if euler != 1 {
            return Err(Error::Mesh(format!(
                "Euler characteristic V - E + F = {euler}, expected 1"
            )));
        }

        Ok(Mesh2D {
            vertices,
            triangles,
            boundary_edges,
            fe_order,
            edges,
            triangle_edges,
            edge_index,
            boundary_edge_ids,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// All geometric edges as sorted vertex pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn fe_order(&self) -> FeOrder {
        self.fe_order
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_dofs(&self) -> usize {
        match self.fe_order {
            FeOrder::P1 => self.vertices.len(),
            FeOrder::P2 => self.vertices.len() + self.edges.len(),
        }
    }

    /// Midpoint dof of the edge joining `a` and `b`, if the mesh is P2 and the
    /// edge exists.
    pub fn midpoint_dof(&self, a: usize, b: usize) -> Option<usize> {
        if self.fe_order != FeOrder::P2 {
            return None;
        }
        self.edge_index
            .get(&(a.min(b), a.max(b)))
            .map(|e| self.vertices.len() + e)
    }

    /// Returns the P2 version of this mesh. Errors if it already is P2.
    pub fn p2_enrich(&self) -> Result<Mesh2D> {
        if self.fe_order == FeOrder::P2 {
            return Err(Error::Mesh("mesh is already P2".into()));
        }
        let mut m = self.clone();
        m.fe_order = FeOrder::P2;
        Ok(m)
    }

    /// Global dofs of triangle `t`: the three vertices, then (P2) the
    /// midpoints of local edges 01, 12, 20.
    pub fn element_dofs(&self, t: usize) -> ([usize; 6], usize) {
        let tri = self.triangles[t];
        let mut d = [tri[0], tri[1], tri[2], 0, 0, 0];
        match self.fe_order {
            FeOrder::P1 => (d, 3),
            FeOrder::P2 => {
                let nv = self.vertices.len();
                for k in 0..3 {
                    d[3 + k] = nv + self.triangle_edges[t][k];
                }
                (d, 6)
            }
        }
    }

    /// Dofs of boundary edge `b`: both endpoints, then (P2) the midpoint.
    pub fn boundary_edge_dofs(&self, b: usize) -> ([usize; 3], usize) {
        let [i, j] = self.boundary_edges[b].vertices;
        match self.fe_order {
            FeOrder::P1 => ([i, j, 0], 2),
            FeOrder::P2 => ([i, j, self.vertices.len() + self.boundary_edge_ids[b]], 3),
        }
    }

    /// Physical location of a dof.
    pub fn dof_coords(&self, dof: usize) -> [f64; 2] {
        let nv = self.vertices.len();
        if dof < nv {
            self.vertices[dof]
        } else {
            let [a, b] = self.edges[dof - nv];
            let (p, q) = (self.vertices[a], self.vertices[b]);
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        }
    }

    pub fn triangle_points(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn boundary_edge_length(&self, b: usize) -> f64 {
        let [i, j] = self.boundary_edges[b].vertices;
        dist(self.vertices[i], self.vertices[j])
    }

    pub fn has_label(&self, label: BoundaryLabel) -> bool {
        self.boundary_edges.iter().any(|e| e.label == label)
    }

    pub fn label_length(&self, label: BoundaryLabel) -> f64 {
        (0..self.boundary_edges.len())
            .filter(|&b| self.boundary_edges[b].label == label)
            .map(|b| self.boundary_edge_length(b))
            .sum()
    }

    /// Sorted, deduplicated dofs lying on the closure of the edges with `label`.
    pub fn label_dofs(&self, label: BoundaryLabel) -> Vec<usize> {
        let mut dofs: Vec<usize> = (0..self.boundary_edges.len())
            .filter(|&b| self.boundary_edges[b].label == label)
            .flat_map(|b| {
                let (d, n) = self.boundary_edge_dofs(b);
                d.into_iter().take(n)
            })
            .collect();
        dofs.sort_unstable();
        dofs.dedup();
        dofs
    }

    /// Dofs on any boundary edge.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        let mut dofs: Vec<usize> = BoundaryLabel::ALL.iter().flat_map(|&l| self.label_dofs(l)).collect();
        dofs.sort_unstable();
        dofs.dedup();
        dofs
    }

    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| triangle_min_angle(self.triangle_points(t)))
            .fold(f64::INFINITY, f64::min)
            .to_degrees()
    }

    pub fn stats(&self) -> MeshStats {
        let lengths = self
            .edges
            .iter()
            .map(|&[a, b]| dist(self.vertices[a], self.vertices[b]));
        let (h_min, h_max) = lengths.fold((f64::INFINITY, 0.0f64), |(lo, hi), l| (lo.min(l), hi.max(l)));
        MeshStats {
            n_vertices: self.n_vertices(),
            n_triangles: self.n_triangles(),
            n_edges: self.n_edges(),
            n_boundary_edges: self.boundary_edges.len(),
            n_dofs: self.n_dofs(),
            fe_order: self.fe_order.degree(),
            h_max,
            h_min,
            min_angle_deg: self.min_angle_deg(),
        }
    }

    /// Polar angle of a dof in (-pi, pi].
    pub fn dof_angle(&self, dof: usize) -> f64 {
        let [x, y] = self.dof_coords(dof);
        normalize_angle(y.atan2(x))
    }
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn triangle_min_angle(p: [[f64; 2]; 3]) -> f64 {
    let mut min = f64::INFINITY;
    for k in 0..3 {
        let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
        let u = [b[0] - a[0], b[1] - a[1]];
        let v = [c[0] - a[0], c[1] - a[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        min = min.min(cross.abs().atan2(dot));
    }
    min
}

/// Maps an angle into (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

//! Polar-structured triangulation of the unit disk.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{normalize_angle, signed_area, BoundaryEdge, BoundaryLabel, Mesh2D};
use crate::error::{Error, Result};

const TAU: f64 = 2.0 * PI;
const MIN_ANGLE_DEG: f64 = 20.0;

/// Half-open arc `(theta_min, theta_max]` of the unit circle, in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleRange {
    pub theta_min: f64,
    pub theta_max: f64,
}

impl AngleRange {
    pub fn new(theta_min: f64, theta_max: f64) -> Result<Self> {
        let ok = theta_min > -TAU && theta_max <= TAU && theta_min < theta_max && theta_max - theta_min <= TAU + 1e-12;
        if !ok {
            return Err(Error::Label(format!("invalid angle range ({theta_min}, {theta_max}]")));
        }
        Ok(AngleRange { theta_min, theta_max })
    }

    /// The whole circle, starting at -pi.
    pub fn full() -> Self {
        AngleRange {
            theta_min: -PI,
            theta_max: PI,
        }
    }

    pub fn length(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    /// Whether `theta` lies in the arc, modulo 2pi.
    pub fn contains(&self, theta: f64) -> bool {
        let offset = (theta - self.theta_min).rem_euclid(TAU);
        (offset > 0.0 && offset <= self.length()) || self.length() >= TAU
    }
}

/// Triangulates the unit disk with `n_boundary` vertices on the circle.
///
/// Interior vertices sit on concentric rings of radius `k / M`, with ring
/// counts chosen so that radial and tangential spacing both match
/// `2 pi / n_boundary`. Every range endpoint is a boundary vertex, so each
/// boundary edge carries exactly one label. The ring strips are stitched and
/// then made Delaunay by edge flips.
pub fn generate_unit_disk(n_boundary: usize, label_ranges: &[(AngleRange, BoundaryLabel)]) -> Result<Mesh2D> {
    if n_boundary < 8 {
        return Err(Error::Mesh(format!(
            "need at least 8 boundary points, got {n_boundary}"
        )));
    }
    let arcs = order_ranges(label_ranges)?;
    if arcs.len() > n_boundary {
        return Err(Error::Mesh(format!(
            "{} label ranges cannot be resolved by {n_boundary} boundary points",
            arcs.len()
        )));
    }
    let counts = allocate_edges(n_boundary, &arcs);

    let mut boundary_angles = Vec::with_capacity(n_boundary);
    let mut boundary_labels = Vec::with_capacity(n_boundary);
    for (arc, &c) in arcs.iter().zip(&counts) {
        let step = arc.length / c as f64;
        for j in 0..c {
            boundary_angles.push(arc.start + j as f64 * step);
            boundary_labels.push(arc.label);
        }
    }

    let n_rings = ((n_boundary as f64 / TAU).round() as usize).max(1);
    let mut vertices = vec![[0.0, 0.0]];
    // angle lists (unwrapped, increasing) and global ids per ring
    let mut rings: Vec<(Vec<f64>, Vec<usize>)> = Vec::with_capacity(n_rings);
    for k in 1..=n_rings {
        let angles: Vec<f64> = if k == n_rings {
            boundary_angles.clone()
        } else {
            let r = k as f64 / n_rings as f64;
            let n_k = ((n_boundary as f64 * r).round() as usize).max(3);
            let shift = if k % 2 == 1 { 0.5 } else { 0.0 };
            (0..n_k)
                .map(|j| boundary_angles[0] + (j as f64 + shift) * TAU / n_k as f64)
                .collect()
        };
        let r = k as f64 / n_rings as f64;
        let ids = (vertices.len()..vertices.len() + angles.len()).collect();
        for &a in &angles {
            vertices.push(if k == n_rings {
                [a.cos(), a.sin()]
            } else {
                [r * a.cos(), r * a.sin()]
            });
        }
        rings.push((angles, ids));
    }

    let mut triangles = Vec::new();
    let (_, first_ids) = &rings[0];
    for j in 0..first_ids.len() {
        triangles.push([0, first_ids[j], first_ids[(j + 1) % first_ids.len()]]);
    }
    for k in 1..rings.len() {
        stitch_rings(&rings[k - 1], &rings[k], &mut triangles);
    }
    for tri in &triangles {
        debug_assert!(signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]) > 0.0);
    }
    delaunay_flips(&vertices, &mut triangles);

    let (_, outer) = rings.last().expect("at least one ring");
    let boundary_edges = (0..outer.len())
        .map(|j| BoundaryEdge {
            vertices: [outer[j], outer[(j + 1) % outer.len()]],
            label: boundary_labels[j],
        })
        .collect();

    let mesh = Mesh2D::new(vertices, triangles, boundary_edges)?;
    let min_angle = mesh.min_angle_deg();
    if min_angle < MIN_ANGLE_DEG {
        return Err(Error::Mesh(format!(
            "generated mesh has minimum angle {min_angle:.2} deg < {MIN_ANGLE_DEG} deg"
        )));
    }
    Ok(mesh)
}

struct Arc {
    start: f64,
    length: f64,
    label: BoundaryLabel,
}

/// Sorts the ranges around the circle and checks that they tile it.
fn order_ranges(ranges: &[(AngleRange, BoundaryLabel)]) -> Result<Vec<Arc>> {
    if ranges.is_empty() {
        return Err(Error::Label("no label ranges given".into()));
    }
    let mut arcs: Vec<Arc> = ranges
        .iter()
        .map(|(r, l)| {
            AngleRange::new(r.theta_min, r.theta_max).map(|r| Arc {
                start: normalize_angle(r.theta_min),
                length: r.length(),
                label: *l,
            })
        })
        .collect::<Result<_>>()?;
    arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
    let total: f64 = arcs.iter().map(|a| a.length).sum();
    if (total - TAU).abs() > 1e-9 {
        return Err(Error::Label(format!(
            "label ranges have total length {total}, expected 2pi"
        )));
    }
    for i in 0..arcs.len() {
        let end = arcs[i].start + arcs[i].length;
        let next = arcs[(i + 1) % arcs.len()].start;
        let gap = normalize_angle(next - end);
        if gap.abs() > 1e-9 {
            return Err(Error::Label(format!(
                "label ranges overlap or leave a gap of {gap:e} rad after angle {end}"
            )));
        }
    }
    Ok(arcs)
}

/// Distributes `n` edges over the arcs proportionally to arc length
/// (largest remainder), at least one edge per arc.
fn allocate_edges(n: usize, arcs: &[Arc]) -> Vec<usize> {
    let ideal: Vec<f64> = arcs.iter().map(|a| n as f64 * a.length / TAU).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|&x| (x.floor() as usize).max(1)).collect();
    let mut assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - counts[a] as f64;
        let rb = ideal[b] - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut i = 0;
    while assigned < n {
        counts[order[i % order.len()]] += 1;
        assigned += 1;
        i += 1;
    }
    while assigned > n {
        // only reachable when the max(1) floor overshoots
        let big = (0..counts.len()).max_by_key(|&k| counts[k]).unwrap();
        counts[big] -= 1;
        assigned -= 1;
    }
    counts
}

/// Triangulates the annulus strip between two rings.
fn stitch_rings(inner: &(Vec<f64>, Vec<usize>), outer: &(Vec<f64>, Vec<usize>), triangles: &mut Vec<[usize; 3]>) {
    let (ia, iid) = inner;
    let (oa, oid) = outer;
    let (p, q) = (ia.len(), oa.len());
    // start the outer ring at the vertex angularly closest to inner[0]
    let j0 = (0..q)
        .min_by(|&a, &b| {
            let da = normalize_angle(oa[a] - ia[0]).abs();
            let db = normalize_angle(oa[b] - ia[0]).abs();
            da.total_cmp(&db)
        })
        .unwrap();
    let a: Vec<f64> = (0..=p)
        .map(|i| ia[0] + (ia[i % p] - ia[0]).rem_euclid(TAU) + if i == p { TAU } else { 0.0 })
        .collect();
    let b0 = ia[0] + normalize_angle(oa[j0] - ia[0]);
    let b: Vec<f64> = (0..=q)
        .map(|j| {
            let jj = (j0 + j) % q;
            b0 + (oa[jj] - oa[j0]).rem_euclid(TAU) + if j == q { TAU } else { 0.0 }
        })
        .collect();
    let inner_id = |i: usize| iid[i % p];
    let outer_id = |j: usize| oid[(j0 + j) % q];
    let (mut i, mut j) = (0, 0);
    while i < p || j < q {
        let advance_inner = if i == p {
            false
        } else if j == q {
            true
        } else {
            a[i + 1] < b[j + 1]
        };
        if advance_inner {
            triangles.push([inner_id(i), outer_id(j), inner_id(i + 1)]);
            i += 1;
        } else {
            triangles.push([inner_id(i), outer_id(j), outer_id(j + 1)]);
            j += 1;
        }
    }
}

fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

/// Lawson flips until every interior edge is locally Delaunay. Cocircular
/// quads (common between concentric rings) are left alone.
fn delaunay_flips(vertices: &[[f64; 2]], triangles: &mut [[usize; 3]]) {
    for _pass in 0..200 {
        let mut owner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                owner.insert((tri[k], tri[(k + 1) % 3]), (t, (k + 2) % 3));
            }
        }
        let mut touched = vec![false; triangles.len()];
        let mut flips = 0;
        for t1 in 0..triangles.len() {
            for k in 0..3 {
                if touched[t1] {
                    break;
                }
                let tri = triangles[t1];
                let (a, b, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let Some(&(t2, opp)) = owner.get(&(b, a)) else {
                    continue;
                };
                if touched[t2] {
                    continue;
                }
                let d = triangles[t2][opp];
                let scale = {
                    let e = [vertices[a][0] - vertices[b][0], vertices[a][1] - vertices[b][1]];
                    (e[0] * e[0] + e[1] * e[1]).powi(2)
                };
                if in_circle(vertices[a], vertices[b], vertices[c], vertices[d]) > 1e-10 * scale {
                    let n1 = [c, a, d];
                    let n2 = [c, d, b];
                    if signed_area(vertices[c], vertices[a], vertices[d]) > 0.0
                        && signed_area(vertices[c], vertices[d], vertices[b]) > 0.0
                    {
                        triangles[t1] = n1;
                        triangles[t2] = n2;
                        touched[t1] = true;
                        touched[t2] = true;
                        flips += 1;
                    }
                }
            }
        }
        if flips == 0 {
            return;
        }
    }
}

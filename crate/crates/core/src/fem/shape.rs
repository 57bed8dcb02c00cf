//! Lagrange P1/P2 shape functions in barycentric form.

use crate::field::Breakline;
use crate::mesh::FeOrder;

/// Gradients of the barycentric coordinates and the area of a triangle.
pub fn barycentric_gradients(p: &[[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    let s = 0.5 / area;
    let g = [
        [(p[1][1] - p[2][1]) * s, (p[2][0] - p[1][0]) * s],
        [(p[2][1] - p[0][1]) * s, (p[0][0] - p[2][0]) * s],
        [(p[0][1] - p[1][1]) * s, (p[1][0] - p[0][0]) * s],
    ];
    (g, area)
}

/// Shape function values at barycentric point `l`. Local dof order:
/// vertices 0, 1, 2, then midpoints of edges 01, 12, 20.
#[inline]
pub fn values(order: FeOrder, l: [f64; 3]) -> [f64; 6] {
    match order {
        FeOrder::P1 => [l[0], l[1], l[2], 0.0, 0.0, 0.0],
        FeOrder::P2 => [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ],
    }
}

#[inline]
pub fn gradients(order: FeOrder, l: [f64; 3], g: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut out = [[0.0; 2]; 6];
    match order {
        FeOrder::P1 => {
            out[..3].copy_from_slice(g);
        }
        FeOrder::P2 => {
            for k in 0..3 {
                let c = 4.0 * l[k] - 1.0;
                out[k] = [c * g[k][0], c * g[k][1]];
            }
            for (m, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                out[3 + m] = [
                    4.0 * (l[i] * g[j][0] + l[j] * g[i][0]),
                    4.0 * (l[i] * g[j][1] + l[j] * g[i][1]),
                ];
            }
        }
    }
    out
}

/// Shape values on an edge at parameter `s`: endpoints, then (P2) midpoint.
#[inline]
pub fn edge_values(order: FeOrder, s: f64) -> [f64; 3] {
    match order {
        FeOrder::P1 => [1.0 - s, s, 0.0],
        FeOrder::P2 => [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)],
    }
}

/// Splits a triangle along the breaklines that cross it. Returns the pieces
/// as barycentric triangles of the parent, together with their area fraction.
pub fn split_by_breaklines(p: &[[f64; 2]; 3], lines: &[Breakline]) -> Vec<([[f64; 3]; 3], f64)> {
    let whole = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    if lines.is_empty() {
        return vec![(whole, 1.0)];
    }
    let mut polys: Vec<Vec<[f64; 3]>> = vec![whole.to_vec()];
    for line in lines {
        let sv = [line.side(p[0]), line.side(p[1]), line.side(p[2])];
        if sv.iter().all(|&s| s >= 0.0) || sv.iter().all(|&s| s <= 0.0) {
            continue;
        }
        let side = |l: &[f64; 3]| l[0] * sv[0] + l[1] * sv[1] + l[2] * sv[2];
        let mut next = Vec::with_capacity(polys.len() * 2);
        for poly in polys {
            let (pos, neg) = clip(&poly, &side);
            next.extend([pos, neg].into_iter().filter(|q| q.len() >= 3));
        }
        polys = next;
    }
    let mut out = Vec::new();
    for poly in polys {
        for k in 1..poly.len() - 1 {
            let tri = [poly[0], poly[k], poly[k + 1]];
            let frac = bary_area_fraction(&tri);
            if frac > 1e-14 {
                out.push((tri, frac));
            }
        }
    }
    out
}

fn clip(poly: &[[f64; 3]], side: &impl Fn(&[f64; 3]) -> f64) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa >= 0.0 {
            pos.push(a);
        }
        if sa <= 0.0 {
            neg.push(a);
        }
        if (sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0) {
            let t = sa / (sa - sb);
            let c = [
                a[0] + t * (b[0] - a[0]),
                a[1] + t * (b[1] - a[1]),
                a[2] + t * (b[2] - a[2]),
            ];
            pos.push(c);
            neg.push(c);
        }
    }
    (pos, neg)
}

fn bary_area_fraction(t: &[[f64; 3]; 3]) -> f64 {
    // area in the (l1, l2) chart relative to the reference area 1/2
    let (a, b, c) = (t[0], t[1], t[2]);
    ((b[1] - a[1]) * (c[2] - a[2]) - (b[2] - a[2]) * (c[1] - a[1])).abs()
}

/// Composes a sub-triangle quadrature point with the parent map.
#[inline]
pub fn sub_point(sub: &[[f64; 3]; 3], q: [f64; 3]) -> [f64; 3] {
    let mut l = [0.0; 3];
    for (k, lk) in l.iter_mut().enumerate() {
        *lk = q[0] * sub[0][k] + q[1] * sub[1][k] + q[2] * sub[2][k];
    }
    l
}

#[inline]
pub fn physical(p: &[[f64; 2]; 3], l: [f64; 3]) -> [f64; 2] {
    [
        l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
        l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_partition_of_unity_and_nodality() {
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        for (i, &n) in nodes.iter().enumerate() {
            let v = values(FeOrder::P2, n);
            for (j, &vj) in v.iter().enumerate() {
                assert_eq!(vj, if i == j { 1.0 } else { 0.0 });
            }
        }
        let v = values(FeOrder::P2, [0.2, 0.3, 0.5]);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradients_sum_to_zero() {
        let p = [[0.0, 0.0], [2.0, 0.1], [0.3, 1.5]];
        let (g, _) = barycentric_gradients(&p);
        let gr = gradients(FeOrder::P2, [0.2, 0.3, 0.5], &g);
        let sx: f64 = gr.iter().map(|v| v[0]).sum();
        let sy: f64 = gr.iter().map(|v| v[1]).sum();
        assert!(sx.abs() < 1e-14 && sy.abs() < 1e-14);
    }

    #[test]
    fn split_preserves_area() {
        let p = [[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let pieces = split_by_breaklines(&p, &[Breakline::vertical(0.25), Breakline::vertical(-0.5)]);
        assert_eq!(pieces.len(), 5);
        let total: f64 = pieces.iter().map(|(_, f)| f).sum();
        assert!((total - 1.0).abs() < 1e-14);
        for (tri, _) in &pieces {
            let c = physical(&p, sub_point(tri, [1.0 / 3.0; 3]));
            // every piece lies on one side of each line
            assert!(c[0] < -0.5 || (c[0] > -0.5 && c[0] < 0.25) || c[0] > 0.25);
        }
    }
}

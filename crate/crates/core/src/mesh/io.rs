//! Plain-text mesh format.
//!
//! One record per line, `#` starts a comment:
//!
//! ```text
//! o 2            # optional: finite-element order (1 or 2), default 1
//! v x y          # vertex coordinates
//! t i j k        # counter-clockwise triangle, 0-based vertex indices
//! e i j L        # boundary edge with label L in {D, N, T}
//! ```
//!
//! Coordinates are written with 17 significant digits so a write/read cycle
//! is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{BoundaryEdge, BoundaryLabel, FeOrder, Mesh2D};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh2D, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_mesh(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh2D> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text, path)
}

pub(crate) fn format_mesh(mesh: &Mesh2D) -> String {
    let mut out = String::new();
    let s = mesh.stats();
    let _ = writeln!(
        out,
        "# vertices {} triangles {} boundary edges {}",
        s.n_vertices, s.n_triangles, s.n_boundary_edges
    );
    let _ = writeln!(out, "o {}", mesh.fe_order().degree());
    for [x, y] in mesh.vertices() {
        let _ = writeln!(out, "v {x:.16e} {y:.16e}");
    }
    for [i, j, k] in mesh.triangles() {
        let _ = writeln!(out, "t {i} {j} {k}");
    }
    for e in mesh.boundary_edges() {
        let _ = writeln!(out, "e {} {} {}", e.vertices[0], e.vertices[1], e.label.code());
    }
    out
}

pub(crate) fn parse_mesh(text: &str, path: &Path) -> Result<Mesh2D> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut boundary = Vec::new();
    let mut order = FeOrder::P1;
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let float = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line_no, format!("bad number {s:?}")))
        };
        let index = |s: &str| s.parse::<usize>().map_err(|_| err(line_no, format!("bad index {s:?}")));
        match (fields[0], fields.len()) {
            ("v", 3) => vertices.push([float(fields[1])?, float(fields[2])?]),
            ("t", 4) => triangles.push([index(fields[1])?, index(fields[2])?, index(fields[3])?]),
            ("e", 4) => {
                let label = BoundaryLabel::from_code(fields[3])
                    .ok_or_else(|| err(line_no, format!("unknown label {:?}", fields[3])))?;
                boundary.push(BoundaryEdge {
                    vertices: [index(fields[1])?, index(fields[2])?],
                    label,
                });
            }
            ("o", 2) => {
                order = FeOrder::from_degree(index(fields[1])?)
                    .ok_or_else(|| err(line_no, format!("unsupported order {}", fields[1])))?;
            }
            _ => return Err(err(line_no, format!("malformed record {content:?}"))),
        }
    }

    let nv = vertices.len();
    for (t, tri) in triangles.iter().enumerate() {
        if let Some(i) = tri.iter().find(|&&i| i >= nv) {
            return Err(Error::Mesh(format!(
                "triangle {t} references vertex {i}, but only {nv} vertices are defined"
            )));
        }
    }
    Mesh2D::with_order(vertices, triangles, boundary, order)
}

//! Curve snapshots and triangle meshes of the surface of revolution.
//!
//! A snapshot is a CSV file with the header `index,x1,x2` and one row per
//! node; the topology of the curve is not part of it.  Rotating the
//! generating curve about the `x2`-axis gives the surface
//! `(x1 cos t, x2, x1 sin t)`, which [`export_revolved`] samples at
//! `k_theta` equally spaced angles.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeneratingCurve, Vec2};

/// Row of a snapshot file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct SnapshotRow {
    index: usize,
    x1: f64,
    x2: f64,
}

/// Writes the nodes of `curve` as a snapshot CSV.
pub fn write_snapshot<W: Write>(curve: &GeneratingCurve, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (index, p) in curve.nodes().iter().enumerate() {
        w.serialize(SnapshotRow {
            index,
            x1: p.x,
            x2: p.y,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the node positions of a snapshot CSV.  Rows must be numbered
/// `0, 1, 2, ...` in order.
pub fn read_snapshot<R: Read>(reader: R) -> Result<Vec<Vec2>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut nodes = Vec::new();
    for row in r.deserialize() {
        let row: SnapshotRow = row?;
        if row.index != nodes.len() {
            return Err(Error::InvalidCurve(format!(
                "snapshot row {} has index {}",
                nodes.len(),
                row.index
            )));
        }
        nodes.push(Vec2::new(row.x1, row.x2));
    }
    Ok(nodes)
}

/// Triangle mesh with 0-based vertex indices.
#[derive(Clone, Debug, PartialEq)]
pub struct RevolvedMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl RevolvedMesh {
    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Total area of the triangles.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
            })
            .sum()
    }

    /// Writes the mesh in Wavefront OBJ format (1-based face indices).
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }
}

/// Triangulates the surface of revolution of `curve` with `k_theta`
/// azimuthal segments.  Axis nodes become a single apex vertex; every
/// other node becomes a ring of `k_theta` vertices.  Triangles are oriented
/// so that their normals point along the revolved curve normal.
pub fn export_revolved(curve: &GeneratingCurve, k_theta: usize) -> Result<RevolvedMesh> {
    if k_theta < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 azimuthal segments, got {k_theta}"
        )));
    }
    let mut vertices = Vec::new();
    let mut ring_start = Vec::with_capacity(curve.num_nodes());
    for (i, p) in curve.nodes().iter().enumerate() {
        ring_start.push(vertices.len());
        if curve.is_axis_node(i) {
            vertices.push([0.0, p.y, 0.0]);
        } else {
            for k in 0..k_theta {
                let t = 2.0 * std::f64::consts::PI * k as f64 / k_theta as f64;
                vertices.push([p.x * t.cos(), p.y, p.x * t.sin()]);
            }
        }
    }
    let vertex = |i: usize, k: usize| {
        if curve.is_axis_node(i) {
            ring_start[i]
        } else {
            ring_start[i] + k % k_theta
        }
    };
    let mut triangles = Vec::new();
    for e in 0..curve.num_elements() {
        let (i, j) = curve.element_nodes(e);
        for k in 0..k_theta {
            let (a, b, c, d) = (
                vertex(i, k),
                vertex(i, k + 1),
                vertex(j, k + 1),
                vertex(j, k),
            );
            for tri in [[a, b, c], [a, c, d]] {
                if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
                    triangles.push(tri);
                }
            }
        }
    }
    Ok(RevolvedMesh {
        vertices,
        triangles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundaryClass, Topology};

    #[test]
    fn snapshot_round_trip() {
        let c = GeneratingCurve::new(
            vec![
                Vec2::new(0.0, 1.0),
                Vec2::new(0.7, 0.1),
                Vec2::new(0.0, -1.0),
            ],
            Topology::Interval {
                start: BoundaryClass::Axis,
                end: BoundaryClass::Axis,
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        write_snapshot(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,x1,x2\n"));
        assert_eq!(read_snapshot(&buf[..]).unwrap(), c.nodes());
    }

    #[test]
    fn out_of_order_snapshot_is_rejected() {
        let text = "index,x1,x2\n1,0.0,1.0\n";
        assert!(read_snapshot(text.as_bytes()).is_err());
    }
}

//! Brute-force self-intersection test for debugging runs.

use rayon::prelude::*;

use crate::geometry::mesh::{DiscreteSurface, Point, TriMesh};

/// Whether any two non-adjacent elements of the surface intersect.
/// Quadratic in the element count.
pub fn has_self_intersection(surface: &DiscreteSurface) -> bool {
    match surface {
        DiscreteSurface::Mesh(m) => mesh_intersects(m),
        DiscreteSurface::Curve(c) => {
            let n = c.len();
            (0..n).into_par_iter().any(|i| {
                ((i + 2)..n).any(|j| {
                    if (j + 1) % n == i {
                        return false;
                    }
                    segments_cross(
                        c.vertices[i],
                        c.vertices[c.next(i)],
                        c.vertices[j],
                        c.vertices[c.next(j)],
                    )
                })
            })
        }
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn bounds(tri: &[Point; 3]) -> (Point, Point) {
    let lo = tri[0].inf(&tri[1]).inf(&tri[2]);
    let hi = tri[0].sup(&tri[1]).sup(&tri[2]);
    (lo, hi)
}

/// Segment `p q` against triangle `t`, excluding touching endpoints.
fn segment_hits_triangle(p: Point, q: Point, t: &[Point; 3]) -> bool {
    let dir = q - p;
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-300 {
        return false;
    }
    let inv = 1.0 / det;
    let s = p - t[0];
    let u = inv * s.dot(&h);
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = s.cross(&e1);
    let v = inv * dir.dot(&qv);
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let along = inv * e2.dot(&qv);
    along > 0.0 && along < 1.0
}

fn triangles_intersect(a: &[Point; 3], b: &[Point; 3]) -> bool {
    (0..3).any(|i| segment_hits_triangle(a[i], a[(i + 1) % 3], b))
        || (0..3).any(|i| segment_hits_triangle(b[i], b[(i + 1) % 3], a))
}

fn mesh_intersects(mesh: &TriMesh) -> bool {
    let tris: Vec<[Point; 3]> = mesh
        .faces
        .iter()
        .map(|f| {
            [
                mesh.vertices[f[0]],
                mesh.vertices[f[1]],
                mesh.vertices[f[2]],
            ]
        })
        .collect();
    let boxes: Vec<(Point, Point)> = tris.iter().map(bounds).collect();
    (0..tris.len()).into_par_iter().any(|i| {
        ((i + 1)..tris.len()).any(|j| {
            if mesh.faces[i].iter().any(|v| mesh.faces[j].contains(v)) {
                return false;
            }
            let (alo, ahi) = boxes[i];
            let (blo, bhi) = boxes[j];
            if (0..3).any(|k| ahi[k] < blo[k] || bhi[k] < alo[k]) {
                return false;
            }
            triangles_intersect(&tris[i], &tris[j])
        })
    })
}

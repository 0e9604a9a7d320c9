//! Discrete closed surfaces: triangle meshes in 3-space and closed polygons in
//! the plane.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{CmsError, Result};

pub type Point = Vector3<f64>;

/// Triangulated closed orientable 2-manifold with outward-oriented faces.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<[usize; 3]>,
}

/// Closed polygon in the plane, counter-clockwise. Points carry `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    pub vertices: Vec<Point>,
}

/// The evolving discrete state.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscreteSurface {
    Mesh(TriMesh),
    Curve(ClosedCurve),
}

impl TriMesh {
    /// Build a mesh, checking that it is closed, manifold and consistently
    /// wound.
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Self { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 4 {
            return Err(CmsError::Topology(format!(
                "mesh has {} vertices, need at least 4",
                self.vertices.len()
            )));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                if v >= self.vertices.len() {
                    return Err(CmsError::Topology(format!(
                        "face {f} references missing vertex {v}"
                    )));
                }
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(CmsError::Topology(format!("face {f} repeats a vertex")));
            }
            for k in 0..3 {
                let edge = (face[k], face[(k + 1) % 3]);
                if directed.insert(edge, f).is_some() {
                    return Err(CmsError::Topology(format!(
                        "directed edge {:?} used twice: non-manifold or inconsistent winding",
                        edge
                    )));
                }
            }
        }
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) {
                return Err(CmsError::Topology(format!(
                    "edge ({a}, {b}) is a boundary edge"
                )));
            }
        }
        let mut used = vec![false; self.vertices.len()];
        for face in &self.faces {
            for &v in face {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(CmsError::Topology(format!("vertex {v} belongs to no face")));
        }
        Ok(())
    }

    /// Undirected edges, each listed once with the smaller index first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| (f[k], f[(k + 1) % 3])))
            .filter(|(a, b)| a < b)
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.faces.len() as i64
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f];
        0.5 * (self.vertices[b] - self.vertices[a])
            .cross(&(self.vertices[c] - self.vertices[a]))
            .norm()
    }

    /// Incident `(face, corner)` pairs for every vertex.
    pub fn vertex_faces(&self) -> Vec<Vec<(usize, usize)>> {
        let mut incident = vec![Vec::new(); self.vertices.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for (corner, &v) in face.iter().enumerate() {
                incident[v].push((f, corner));
            }
        }
        incident
    }

    /// Disjoint union of two meshes.
    pub fn union(&self, other: &TriMesh) -> TriMesh {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().copied());
        let mut faces = self.faces.clone();
        faces.extend(
            other
                .faces
                .iter()
                .map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]),
        );
        TriMesh { vertices, faces }
    }
}

impl ClosedCurve {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let curve = Self { vertices };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 3 {
            return Err(CmsError::Topology(format!(
                "curve has {} vertices, need at least 3",
                self.vertices.len()
            )));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.z != 0.0 {
                return Err(CmsError::Domain(format!(
                    "curve vertex {i} leaves the plane"
                )));
            }
            let next = &self.vertices[(i + 1) % self.vertices.len()];
            if (next - v).norm() == 0.0 {
                return Err(CmsError::Topology(format!(
                    "curve vertices {i} and {} coincide",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.vertices.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.vertices.len() - 1) % self.vertices.len()
    }
}

impl DiscreteSurface {
    pub fn vertices(&self) -> &[Point] {
        match self {
            DiscreteSurface::Mesh(m) => &m.vertices,
            DiscreteSurface::Curve(c) => &c.vertices,
        }
    }

    pub fn vertices_mut(&mut self) -> &mut Vec<Point> {
        match self {
            DiscreteSurface::Mesh(m) => &mut m.vertices,
            DiscreteSurface::Curve(c) => &mut c.vertices,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    /// Intrinsic dimension `n` (1 for curves, 2 for meshes).
    pub fn dim(&self) -> usize {
        match self {
            DiscreteSurface::Mesh(_) => 2,
            DiscreteSurface::Curve(_) => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DiscreteSurface::Mesh(m) => m.validate(),
            DiscreteSurface::Curve(c) => c.validate(),
        }
    }

    /// `V − E + F` for meshes; a closed curve has `χ = 0`.
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            DiscreteSurface::Mesh(m) => m.euler_characteristic(),
            DiscreteSurface::Curve(_) => 0,
        }
    }

    /// Shortest edge length.
    pub fn min_edge_length(&self) -> f64 {
        match self {
            DiscreteSurface::Mesh(m) => m
                .edges()
                .iter()
                .map(|&(a, b)| (m.vertices[a] - m.vertices[b]).norm())
                .fold(f64::INFINITY, f64::min),
            DiscreteSurface::Curve(c) => (0..c.len())
                .map(|i| (c.vertices[c.next(i)] - c.vertices[i]).norm())
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn centroid(&self) -> Point {
        let v = self.vertices();
        v.iter().sum::<Point>() / v.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators::{cube, icosphere, torus};

    #[test]
    fn euler_characteristics() {
        assert_eq!(icosphere(3, 1.0).euler_characteristic(), 2);
        assert_eq!(cube(1.0).euler_characteristic(), 2);
        assert_eq!(torus(2.0, 0.5, 24, 12).euler_characteristic(), 0);
        let two = icosphere(1, 1.0).union(&icosphere(1, 1.0));
        assert_eq!(two.euler_characteristic(), 4);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut mesh = icosphere(1, 1.0);
        mesh.faces.pop();
        assert!(matches!(mesh.validate(), Err(CmsError::Topology(_))));
    }

    #[test]
    fn flipped_face_is_rejected() {
        let mut mesh = icosphere(1, 1.0);
        mesh.faces[0].swap(1, 2);
        assert!(matches!(mesh.validate(), Err(CmsError::Topology(_))));
    }

    #[test]
    fn non_manifold_edge_is_rejected() {
        // two tetrahedra glued along one edge share it among four faces
        let a = cube(1.0);
        let mut faces = a.faces.clone();
        faces.push(faces[0]);
        let mesh = TriMesh {
            vertices: a.vertices.clone(),
            faces,
        };
        assert!(mesh.validate().is_err());
    }

    #[test]
    fn short_curve_is_rejected() {
        let err = ClosedCurve::new(vec![Point::zeros(), Point::new(1.0, 0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, CmsError::Topology(_)));
    }
}

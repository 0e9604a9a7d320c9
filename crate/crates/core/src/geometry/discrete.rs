//! Per-vertex geometry of discrete surfaces.
//!
//! Mean curvature comes from the area gradient (cotangent formula on meshes,
//! turning of unit edge vectors on curves), signed against the outward vertex
//! normal so that a round sphere gives `H = -n/R`, and normalized by the mixed
//! Voronoi vertex area. Gaussian curvature is the angle defect over the
//! barycentric vertex area; the discrete Gauss–Bonnet identity is exact.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{CmsError, Result};
use crate::geometry::mesh::{ClosedCurve, DiscreteSurface, Point, TriMesh};

/// Faces smaller than this fraction of the mean face area are degenerate.
pub const DEGENERATE_AREA_FRACTION: f64 = 1e-14;

/// Per-vertex summary of the discrete fundamental forms.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexGeometry {
    /// Outward unit normal (area-weighted on meshes).
    pub normals: Vec<Point>,
    /// Signed mean curvature `H_v`.
    pub mean_curvature: Vec<f64>,
    /// Angle defect over vertex area; empty for curves.
    pub gauss_curvature: Vec<f64>,
    /// Angle defect `2π − Σ angles`; empty for curves.
    pub angle_defects: Vec<f64>,
    /// Barycentric vertex area (half the incident edge lengths on curves).
    pub areas: Vec<f64>,
    /// Mixed Voronoi vertex area, the normalization of `H`.
    pub mixed_areas: Vec<f64>,
    /// Area gradient `∂A/∂x_v`.
    pub area_gradients: Vec<Point>,
    /// Volume gradient `∂V/∂x_v`; parallel to the vertex normal.
    pub volume_gradients: Vec<Point>,
}

impl VertexGeometry {
    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Area-weighted mean of `H`.
    pub fn mean_curvature_mean(&self) -> f64 {
        weighted_mean(&self.mean_curvature, &self.mixed_areas)
    }

    /// Area-weighted standard deviation of `H` relative to `|H̄|`.
    pub fn mean_curvature_relstd(&self) -> f64 {
        let mean = self.mean_curvature_mean();
        let var = weighted_mean(
            &self
                .mean_curvature
                .iter()
                .map(|h| (h - mean).powi(2))
                .collect::<Vec<_>>(),
            &self.mixed_areas,
        );
        var.sqrt() / mean.abs()
    }

    /// `Σ_v K_v A_v`.
    pub fn total_gauss_curvature(&self) -> f64 {
        self.angle_defects.iter().sum()
    }
}

fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
}

/// Per-vertex normals, curvatures and areas of a closed mesh or curve.
pub fn fundamental_forms_mesh(surface: &DiscreteSurface) -> Result<VertexGeometry> {
    match surface {
        DiscreteSurface::Mesh(mesh) => mesh_geometry(mesh),
        DiscreteSurface::Curve(curve) => curve_geometry(curve),
    }
}

pub fn check_face_quality(mesh: &TriMesh) -> Result<()> {
    let areas: Vec<f64> = (0..mesh.faces.len()).map(|f| mesh.face_area(f)).collect();
    let mean = areas.iter().sum::<f64>() / areas.len() as f64;
    if let Some((f, a)) = areas
        .iter()
        .enumerate()
        .find(|(_, &a)| !(a >= DEGENERATE_AREA_FRACTION * mean))
    {
        return Err(CmsError::MeshQuality(format!(
            "face {f} has area {a:e} (mean {mean:e})"
        )));
    }
    Ok(())
}

fn angle(u: &Point, v: &Point) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

/// Corner quantities of one face, computed once and scattered to its vertices.
struct FaceTerms {
    cross: Point,
    angles: [f64; 3],
    area_grads: [Point; 3],
    mixed: [f64; 3],
}

fn face_terms(mesh: &TriMesh, face: &[usize; 3]) -> FaceTerms {
    let p = [
        mesh.vertices[face[0]],
        mesh.vertices[face[1]],
        mesh.vertices[face[2]],
    ];
    let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let double_area = cross.norm();
    let face_area = 0.5 * double_area;
    let mut dots = [0.0; 3];
    for i in 0..3 {
        let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        dots[i] = (b - p[i]).dot(&(c - p[i]));
    }
    let cots = dots.map(|d| d / double_area);
    let angles = dots.map(|d| double_area.atan2(d));
    let mut area_grads = [Point::zeros(); 3];
    let mut mixed = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (x, b, c) = (p[i], p[j], p[k]);
        area_grads[i] = 0.5 * (cots[k] * (x - b) + cots[j] * (x - c));
        mixed[i] = if dots[i] < 0.0 {
            0.5 * face_area
        } else if cots[j] < 0.0 || cots[k] < 0.0 {
            0.25 * face_area
        } else {
            0.125 * (cots[k] * (x - b).norm_squared() + cots[j] * (x - c).norm_squared())
        };
    }
    FaceTerms {
        cross,
        angles,
        area_grads,
        mixed,
    }
}

fn mesh_geometry(mesh: &TriMesh) -> Result<VertexGeometry> {
    check_face_quality(mesh)?;
    let terms: Vec<FaceTerms> = mesh.faces.par_iter().map(|f| face_terms(mesh, f)).collect();
    let n = mesh.vertices.len();
    let mut weighted_normal = vec![Point::zeros(); n];
    let mut area_grad = vec![Point::zeros(); n];
    let mut areas = vec![0.0; n];
    let mut mixed = vec![0.0; n];
    let mut angle_sum = vec![0.0; n];
    for (face, t) in mesh.faces.iter().zip(&terms) {
        let third = t.cross.norm() / 6.0;
        for (i, &v) in face.iter().enumerate() {
            weighted_normal[v] += t.cross;
            area_grad[v] += t.area_grads[i];
            areas[v] += third;
            mixed[v] += t.mixed[i];
            angle_sum[v] += t.angles[i];
        }
    }
    // ∂V/∂x_v = (1/6) Σ (b − x) × (c − x)
    let volume_gradients: Vec<Point> = weighted_normal.iter().map(|w| w / 6.0).collect();
    let normals: Vec<Point> = weighted_normal.iter().map(|w| w.normalize()).collect();
    let angle_defects: Vec<f64> = angle_sum.iter().map(|s| 2.0 * PI - s).collect();
    let mean_curvature = (0..n)
        .map(|v| -area_grad[v].dot(&normals[v]) / mixed[v])
        .collect();
    let gauss_curvature = angle_defects
        .iter()
        .zip(&areas)
        .map(|(d, a)| d / a)
        .collect();
    Ok(VertexGeometry {
        normals,
        mean_curvature,
        gauss_curvature,
        angle_defects,
        areas,
        mixed_areas: mixed,
        area_gradients: area_grad,
        volume_gradients,
    })
}

fn curve_geometry(curve: &ClosedCurve) -> Result<VertexGeometry> {
    curve.validate()?;
    let count = curve.len();
    let mut geometry = VertexGeometry {
        normals: Vec::with_capacity(count),
        mean_curvature: Vec::with_capacity(count),
        gauss_curvature: Vec::new(),
        angle_defects: Vec::new(),
        areas: Vec::with_capacity(count),
        mixed_areas: Vec::with_capacity(count),
        area_gradients: Vec::with_capacity(count),
        volume_gradients: Vec::with_capacity(count),
    };
    for i in 0..count {
        let x = curve.vertices[i];
        let prev = curve.vertices[curve.prev(i)];
        let next = curve.vertices[curve.next(i)];
        let back = x - prev;
        let ahead = next - x;
        let chord = next - prev;
        // outward for counter-clockwise traversal
        let volume_grad = 0.5 * Point::new(chord.y, -chord.x, 0.0);
        let normal = volume_grad.normalize();
        let length_grad = back.normalize() - ahead.normalize();
        let dual_length = 0.5 * (back.norm() + ahead.norm());
        geometry.normals.push(normal);
        geometry
            .mean_curvature
            .push(-length_grad.dot(&normal) / dual_length);
        geometry.areas.push(dual_length);
        geometry.mixed_areas.push(dual_length);
        geometry.area_gradients.push(length_grad);
        geometry.volume_gradients.push(volume_grad);
    }
    Ok(geometry)
}

/// Total area of a mesh or length of a curve.
pub fn surface_area(surface: &DiscreteSurface) -> f64 {
    match surface {
        DiscreteSurface::Mesh(m) => (0..m.faces.len()).map(|f| m.face_area(f)).sum(),
        DiscreteSurface::Curve(c) => (0..c.len())
            .map(|i| (c.vertices[c.next(i)] - c.vertices[i]).norm())
            .sum(),
    }
}

/// Signed enclosed volume (area for curves) without the orientation check.
pub fn signed_volume(surface: &DiscreteSurface) -> f64 {
    match surface {
        DiscreteSurface::Mesh(m) => {
            m.faces
                .iter()
                .map(|f| m.vertices[f[0]].dot(&m.vertices[f[1]].cross(&m.vertices[f[2]])))
                .sum::<f64>()
                / 6.0
        }
        DiscreteSurface::Curve(c) => {
            0.5 * (0..c.len())
                .map(|i| {
                    let a = c.vertices[i];
                    let b = c.vertices[c.next(i)];
                    a.x * b.y - b.x * a.y
                })
                .sum::<f64>()
        }
    }
}

/// Enclosed volume; errors when the orientation is inward.
pub fn enclosed_volume(surface: &DiscreteSurface) -> Result<f64> {
    let v = signed_volume(surface);
    if v < 0.0 {
        return Err(CmsError::Orientation(format!(
            "enclosed volume {v:e} is negative; faces are wound inward"
        )));
    }
    Ok(v)
}

/// `V − E + F` after validating the mesh.
pub fn euler_characteristic(surface: &DiscreteSurface) -> Result<i64> {
    surface.validate()?;
    Ok(surface.euler_characteristic())
}

/// `|Σ angle defects − 2πχ|` on a closed mesh.
pub fn gauss_bonnet_check(mesh: &TriMesh) -> Result<f64> {
    mesh.validate()?;
    let chi = mesh.euler_characteristic();
    let incident = mesh.vertex_faces();
    let total: f64 = incident
        .iter()
        .enumerate()
        .map(|(v, faces)| {
            let x = mesh.vertices[v];
            let sum: f64 = faces
                .iter()
                .map(|&(f, corner)| {
                    let face = mesh.faces[f];
                    let b = mesh.vertices[face[(corner + 1) % 3]];
                    let c = mesh.vertices[face[(corner + 2) % 3]];
                    angle(&(b - x), &(c - x))
                })
                .sum();
            2.0 * PI - sum
        })
        .sum();
    Ok((total - 2.0 * PI * chi as f64).abs())
}

/// Discrete dual-area divergence of a tangential vertex field `W`:
/// `div_v = −(1/A_v) Σ_{f∋v} A_f ∇φ_v|_f · W̄_f`, where `φ_v` is the hat
/// function and `W̄_f` the face average. Summing `A_v div_v` over a closed mesh
/// gives zero.
pub fn mesh_divergence(mesh: &TriMesh, geometry: &VertexGeometry, field: &[Point]) -> Vec<f64> {
    let incident = mesh.vertex_faces();
    incident
        .par_iter()
        .enumerate()
        .map(|(v, faces)| {
            let mut sum = 0.0;
            for &(f, corner) in faces {
                let face = mesh.faces[f];
                let a = mesh.vertices[v];
                let b = mesh.vertices[face[(corner + 1) % 3]];
                let c = mesh.vertices[face[(corner + 2) % 3]];
                let n = (b - a).cross(&(c - a));
                let double_area = n.norm();
                let unit = n / double_area;
                // ∇φ_a = (unit × (c − b)) / (2 A_f)
                let grad_hat = unit.cross(&(c - b)) / double_area;
                let average = (field[face[0]] + field[face[1]] + field[face[2]]) / 3.0;
                sum += 0.5 * double_area * grad_hat.dot(&average);
            }
            -sum / geometry.areas[v]
        })
        .collect()
}

//! Reference meshes and curves.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geometry::mesh::{ClosedCurve, Point, TriMesh};

/// Subdivided icosahedron projected onto the sphere of radius `radius`.
/// Level `k` has `10·4^k + 2` vertices.
pub fn icosphere(subdivisions: usize, radius: f64) -> TriMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    for v in &mut vertices {
        *v *= radius;
    }
    TriMesh { vertices, faces }
}

/// Icosphere scaled to the ellipsoid with semi-axes `(a, b, c)`.
pub fn ellipsoid(subdivisions: usize, a: f64, b: f64, c: f64) -> TriMesh {
    let mut mesh = icosphere(subdivisions, 1.0);
    for v in &mut mesh.vertices {
        *v = Point::new(a * v.x, b * v.y, c * v.z);
    }
    mesh
}

/// Icosphere with each vertex moved to radius `radius(direction)`.
pub fn radial_mesh<F: Fn(&Point) -> f64>(subdivisions: usize, radius: F) -> TriMesh {
    let mut mesh = icosphere(subdivisions, 1.0);
    for v in &mut mesh.vertices {
        *v *= radius(v);
    }
    mesh
}

/// Torus of revolution about the z-axis with `major` and `minor` radii.
pub fn torus(major: f64, minor: f64, around: usize, tube: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity(around * tube);
    for i in 0..around {
        let u = 2.0 * PI * i as f64 / around as f64;
        for j in 0..tube {
            let v = 2.0 * PI * j as f64 / tube as f64;
            let ring = major + minor * v.cos();
            vertices.push(Point::new(ring * u.cos(), ring * u.sin(), minor * v.sin()));
        }
    }
    let index = |i: usize, j: usize| (i % around) * tube + (j % tube);
    let mut faces = Vec::with_capacity(2 * around * tube);
    for i in 0..around {
        for j in 0..tube {
            let a = index(i, j);
            let b = index(i + 1, j);
            let c = index(i + 1, j + 1);
            let d = index(i, j + 1);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh { vertices, faces }
}

/// Axis-aligned cube with edge length `side`, centered at the origin.
pub fn cube(side: f64) -> TriMesh {
    let h = 0.5 * side;
    let vertices = (0..8)
        .map(|i| {
            Point::new(
                if i & 1 == 0 { -h } else { h },
                if i & 2 == 0 { -h } else { h },
                if i & 4 == 0 { -h } else { h },
            )
        })
        .collect();
    let faces = vec![
        [0, 2, 3],
        [0, 3, 1],
        [4, 5, 7],
        [4, 7, 6],
        [0, 1, 5],
        [0, 5, 4],
        [2, 6, 7],
        [2, 7, 3],
        [0, 4, 6],
        [0, 6, 2],
        [1, 3, 7],
        [1, 7, 5],
    ];
    TriMesh { vertices, faces }
}

/// Counter-clockwise regular polygon inscribed in the circle of `radius`.
pub fn regular_polygon(sides: usize, radius: f64) -> ClosedCurve {
    ClosedCurve {
        vertices: (0..sides)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / sides as f64;
                Point::new(radius * a.cos(), radius * a.sin(), 0.0)
            })
            .collect(),
    }
}

/// Counter-clockwise polygon sampling the curve `r(angle)` around the origin.
pub fn radial_polygon<F: Fn(f64) -> f64>(sides: usize, radius: F) -> ClosedCurve {
    ClosedCurve {
        vertices: (0..sides)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / sides as f64;
                let r = radius(a);
                Point::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect(),
    }
}

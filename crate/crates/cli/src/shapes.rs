use std::path::Path;

use cmsflow_core::families::real_harmonic_at;
use cmsflow_core::geometry::generators::{
    ellipsoid, icosphere, radial_mesh, radial_polygon, regular_polygon, torus,
};
use cmsflow_core::geometry::io::read_surface;
use cmsflow_core::DiscreteSurface;

use crate::outcome::Failure;

pub const SHAPE_NAMES: &[&str] = &["sphere", "ellipsoid", "bumpy", "torus", "circle", "ellipse"];

/// Generated starting surface; `level` sets the resolution.
pub fn named_shape(name: &str, level: usize) -> Result<DiscreteSurface, Failure> {
    let level = level.min(7);
    let sides = 16 << level;
    let surface = match name {
        "sphere" => DiscreteSurface::Mesh(icosphere(level, 1.0)),
        "ellipsoid" => DiscreteSurface::Mesh(ellipsoid(level, 1.2, 1.0, 0.9)),
        "bumpy" => DiscreteSurface::Mesh(radial_mesh(level, |p| {
            1.0 + 0.15 * real_harmonic_at(4, 3, p)
        })),
        "torus" => DiscreteSurface::Mesh(torus(2.0, 0.6, 6 << level, 2 << level)),
        "circle" => DiscreteSurface::Curve(regular_polygon(sides, 1.0)),
        "ellipse" => DiscreteSurface::Curve(radial_polygon(sides, |a| {
            let (p, q) = (1.5, 1.0);
            p * q / ((q * a.cos()).powi(2) + (p * a.sin()).powi(2)).sqrt()
        })),
        other => {
            return Err(Failure::usage(format!(
                "unknown shape '{other}' (expected one of {})",
                SHAPE_NAMES.join(", ")
            )))
        }
    };
    Ok(surface)
}

pub fn load_surface(
    shape: Option<&str>,
    mesh: Option<&Path>,
    level: usize,
) -> Result<DiscreteSurface, Failure> {
    match (shape, mesh) {
        (_, Some(path)) => {
            let surface = read_surface(path).map_err(|e| {
                Failure::new(
                    crate::outcome::exit_code(&e),
                    format!("{}: {e}", path.display()),
                )
            })?;
            Ok(surface)
        }
        (Some(name), None) => named_shape(name, level),
        (None, None) => Err(Failure::usage("no input surface: give --family or --mesh")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shape_builds_and_validates() {
        for name in SHAPE_NAMES {
            let s = named_shape(name, 2).unwrap();
            s.validate().unwrap();
        }
        assert_eq!(named_shape("torus", 2).unwrap().euler_characteristic(), 0);
        assert!(named_shape("cylinder", 2).is_err());
    }
}

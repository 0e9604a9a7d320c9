//! Wavefront OBJ meshes, `x,y` curve CSV and `vertex_id,value` field CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CmsError, Result};
use crate::geometry::mesh::{ClosedCurve, DiscreteSurface, Point, TriMesh};

/// Parse OBJ text. Only `v` and `f` records are used; face entries may carry
/// `/vt/vn` suffixes and negative (relative) indices. Polygons are fanned.
pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|p| p.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| CmsError::Parse {
                        line,
                        message: format!("bad vertex coordinate: {e}"),
                    })?;
                if coords.len() != 3 {
                    return Err(CmsError::Parse {
                        line,
                        message: "vertex needs three coordinates".into(),
                    });
                }
                vertices.push(Point::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for token in parts {
                    let head = token.split('/').next().unwrap_or("");
                    let i: i64 = head.parse().map_err(|e| CmsError::Parse {
                        line,
                        message: format!("bad face index '{token}': {e}"),
                    })?;
                    let resolved = if i > 0 {
                        i - 1
                    } else if i < 0 {
                        vertices.len() as i64 + i
                    } else {
                        -1
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(CmsError::Parse {
                            line,
                            message: format!("face index {i} out of range"),
                        });
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() < 3 {
                    return Err(CmsError::Parse {
                        line,
                        message: "face needs at least three vertices".into(),
                    });
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriMesh { vertices, faces })
}

/// Read and validate a closed OBJ mesh.
pub fn read_obj(path: &Path) -> Result<TriMesh> {
    let text =
        fs::read_to_string(path).map_err(|e| CmsError::Io(format!("{}: {e}", path.display())))?;
    let mesh = parse_obj(&text)?;
    mesh.validate()?;
    Ok(mesh)
}

pub fn obj_string(mesh: &TriMesh) -> String {
    let mut out = String::with_capacity(64 * (mesh.vertices.len() + mesh.faces.len()));
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn write_obj(path: &Path, mesh: &TriMesh) -> Result<()> {
    fs::write(path, obj_string(mesh))?;
    Ok(())
}

pub fn parse_curve_csv(text: &str) -> Result<ClosedCurve> {
    let mut vertices = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CmsError::Parse {
                line,
                message: format!("expected 'x,y', got '{content}'"),
            });
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => vertices.push(Point::new(x, y, 0.0)),
            // tolerate a header row
            _ if vertices.is_empty() && line == 1 => continue,
            _ => {
                return Err(CmsError::Parse {
                    line,
                    message: format!("non-numeric row '{content}'"),
                })
            }
        }
    }
    ClosedCurve::new(vertices)
}

pub fn read_curve_csv(path: &Path) -> Result<ClosedCurve> {
    let text =
        fs::read_to_string(path).map_err(|e| CmsError::Io(format!("{}: {e}", path.display())))?;
    parse_curve_csv(&text)
}

pub fn curve_csv_string(curve: &ClosedCurve) -> String {
    let mut out = String::new();
    for v in &curve.vertices {
        let _ = writeln!(out, "{:.16e},{:.16e}", v.x, v.y);
    }
    out
}

pub fn write_curve_csv(path: &Path, curve: &ClosedCurve) -> Result<()> {
    fs::write(path, curve_csv_string(curve))?;
    Ok(())
}

/// Load an OBJ mesh or, for `.csv` paths, a closed curve.
pub fn read_surface(path: &Path) -> Result<DiscreteSurface> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => {
            Ok(DiscreteSurface::Curve(read_curve_csv(path)?))
        }
        _ => Ok(DiscreteSurface::Mesh(read_obj(path)?)),
    }
}

pub fn write_surface(path: &Path, surface: &DiscreteSurface) -> Result<()> {
    match surface {
        DiscreteSurface::Mesh(m) => write_obj(path, m),
        DiscreteSurface::Curve(c) => write_curve_csv(path, c),
    }
}

/// OBJ text of either surface kind; curves become a closed `l` polyline.
pub fn surface_obj_string(surface: &DiscreteSurface) -> String {
    match surface {
        DiscreteSurface::Mesh(m) => obj_string(m),
        DiscreteSurface::Curve(c) => {
            let mut out = String::with_capacity(48 * (c.vertices.len() + 1));
            for v in &c.vertices {
                let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
            }
            out.push('l');
            for i in 1..=c.vertices.len() {
                let _ = write!(out, " {i}");
            }
            out.push_str(" 1\n");
            out
        }
    }
}

pub fn field_csv_string(values: &[f64]) -> String {
    let mut out = String::from("vertex_id,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v:.16e}");
    }
    out
}

pub fn write_field_csv(path: &Path, values: &[f64]) -> Result<()> {
    fs::write(path, field_csv_string(values))?;
    Ok(())
}

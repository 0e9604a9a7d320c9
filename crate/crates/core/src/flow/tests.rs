use super::*;
use crate::families::{make_family, FamilySpec, Schedule};
use crate::geometry::generators::{ellipsoid, icosphere, regular_polygon, torus};
use crate::geometry::quadrature::ChartQuadrature;
use approx::assert_relative_eq;
use std::f64::consts::PI;

fn mesh(m: crate::geometry::mesh::TriMesh) -> DiscreteSurface {
    DiscreteSurface::Mesh(m)
}

#[test]
fn law_names_parse() {
    for law in [
        FlowLaw::Mcf,
        FlowLaw::VolumePreserving,
        FlowLaw::YoungLaplace,
    ] {
        assert_eq!(law.name().parse::<FlowLaw>().unwrap(), law);
    }
    assert!("heat".parse::<FlowLaw>().is_err());
}

#[test]
fn config_rejects_bad_parameters() {
    assert!(FlowConfig::default().validate().is_ok());
    for cfg in [
        FlowConfig {
            sigma: 0.0,
            ..Default::default()
        },
        FlowConfig {
            mobility: -1.0,
            ..Default::default()
        },
        FlowConfig {
            safety: 1.5,
            ..Default::default()
        },
        FlowConfig {
            tau_h: 0.0,
            ..Default::default()
        },
        FlowConfig {
            tangential_smoothing: 2.0,
            ..Default::default()
        },
    ] {
        assert!(matches!(cfg.validate(), Err(CmsError::Config(_))));
    }
}

#[test]
fn unit_sphere_shrinks_at_speed_two() {
    let state = FlowState::new(mesh(icosphere(4, 1.0))).unwrap();
    let cfg = FlowConfig {
        law: FlowLaw::Mcf,
        ..Default::default()
    };
    let v = state.velocity(&cfg);
    for c in &v.normal_speed {
        assert!((c + 2.0).abs() < 1e-4, "{c}");
    }
}

#[test]
fn regular_polygon_is_a_fixed_point() {
    let state = FlowState::new(DiscreteSurface::Curve(regular_polygon(64, 1.3))).unwrap();
    for law in [FlowLaw::VolumePreserving, FlowLaw::YoungLaplace] {
        let v = state.velocity(&FlowConfig {
            law,
            ..Default::default()
        });
        assert!(v.max_normal_speed() < 1e-10 / 1.3);
    }
}

#[test]
fn elongated_ellipsoid_retracts_tips_and_lowers_energy() {
    let surface = mesh(ellipsoid(3, 2.0, 1.0, 1.0));
    let state = FlowState::new(surface.clone()).unwrap();
    let cfg = FlowConfig::default();
    let v = state.velocity(&cfg);
    let verts = surface.vertices();
    let tip = (0..verts.len())
        .max_by(|&a, &b| verts[a].x.total_cmp(&verts[b].x))
        .unwrap();
    let waist = (0..verts.len())
        .min_by(|&a, &b| verts[a].x.abs().total_cmp(&verts[b].x.abs()))
        .unwrap();
    assert!(v.normal_speed[tip] < 0.0);
    assert!(v.normal_speed[waist] > 0.0);
    let (_, rec) = step(&surface, &cfg).unwrap();
    assert!(rec.energy < state.record(&cfg).energy);
}

#[test]
fn circle_follows_curve_shortening_law() {
    let r0 = 1.0;
    let t_end = 0.2;
    let cfg = FlowConfig {
        law: FlowLaw::Mcf,
        ..Default::default()
    };
    let (curve, _) = evolve(
        DiscreteSurface::Curve(regular_polygon(128, r0)),
        &cfg,
        t_end,
    )
    .unwrap();
    let r = best_fit_sphere(curve.vertices(), 2).unwrap().radius;
    assert_relative_eq!(r, (r0 * r0 - 2.0 * t_end).sqrt(), max_relative = 5e-3);
}

#[test]
fn sphere_follows_mean_curvature_law() {
    let t_end = 0.05;
    let cfg = FlowConfig {
        law: FlowLaw::Mcf,
        ..Default::default()
    };
    let (surface, diag) = evolve(mesh(icosphere(3, 1.0)), &cfg, t_end).unwrap();
    let r = best_fit_sphere(surface.vertices(), 3).unwrap().radius;
    assert_relative_eq!(r, (1.0 - 4.0 * t_end).sqrt(), max_relative = 5e-3);
    assert_relative_eq!(diag.last().unwrap().time, t_end, epsilon = 1e-15);
}

#[test]
fn volume_preserving_run_conserves_volume_and_descends() {
    let cfg = FlowConfig {
        tau_h: 1e-2,
        ..Default::default()
    };
    let out = run_to_equilibrium(mesh(ellipsoid(3, 1.3, 1.0, 0.8)), &cfg).unwrap();
    assert_eq!(out.termination, Termination::Converged);
    let d = &out.diagnostics;
    assert!(d.volume_drift() < 5e-3, "{}", d.volume_drift());
    assert!(d.max_energy_increase() < 1e-10);
    assert!(d.chi_constant());
    assert!(d.max_gauss_bonnet_residual() < 1e-9);
    let cert = out.certificate.unwrap();
    assert!(cert.sphere);
    assert!(cert.h_relstd < 1e-2);
    assert_relative_eq!(cert.fit.radius, (1.3f64 * 0.8).cbrt(), max_relative = 2e-2);
}

#[test]
fn round_sphere_is_certified_without_stepping() {
    let cfg = FlowConfig::default();
    let out = run_to_equilibrium(mesh(icosphere(3, 1.0)), &cfg).unwrap();
    assert_eq!(out.termination, Termination::Converged);
    assert_eq!(out.diagnostics.len(), 1);
    let cert = out.certificate.unwrap();
    assert_eq!(cert.steps, 0);
    assert!(cert.sphere);
}

#[test]
fn torus_keeps_its_topology_and_gets_no_sphere_claim() {
    let cfg = FlowConfig {
        max_steps: 50,
        ..Default::default()
    };
    let out = run_to_equilibrium(mesh(torus(2.0, 0.6, 48, 16)), &cfg).unwrap();
    assert_eq!(out.termination, Termination::StepBudget);
    assert!(out.certificate.is_none());
    assert!(out.diagnostics.records.iter().all(|r| r.chi == 0));
}

#[test]
fn tiny_fixed_step_collapses() {
    let cfg = FlowConfig {
        fixed_step: Some(1e-13),
        ..Default::default()
    };
    assert!(matches!(
        step(&mesh(icosphere(1, 1.0)), &cfg),
        Err(CmsError::StepCollapse { .. })
    ));
}

#[test]
fn oversized_step_inverts_elements() {
    let cfg = FlowConfig {
        law: FlowLaw::Mcf,
        fixed_step: Some(0.4),
        max_step: 1.0,
        ..Default::default()
    };
    assert!(step(&mesh(ellipsoid(2, 2.0, 1.0, 0.5)), &cfg).is_err());
}

#[test]
fn tangential_smoothing_keeps_the_shape() {
    let surface = mesh(icosphere(3, 1.0));
    let cfg = FlowConfig {
        law: FlowLaw::VolumePreserving,
        tangential_smoothing: 0.2,
        ..Default::default()
    };
    let (next, _) = step(&surface, &cfg).unwrap();
    for x in next.vertices() {
        assert!((x.norm() - 1.0).abs() < 5e-3);
    }
}

#[test]
fn young_laplace_vanishes_on_round_spheres_only() {
    let unit = make_family(FamilySpec::sphere(2, Schedule::constant(1.0))).unwrap();
    assert!(
        young_laplace_residual_family(&unit, 0.0, -2.0, 1.0)
            .unwrap()
            .max
            < 1e-10
    );
    let two = make_family(FamilySpec::sphere(2, Schedule::constant(2.0))).unwrap();
    assert!(
        young_laplace_residual_family(&two, 0.0, -3.0, 3.0)
            .unwrap()
            .max
            < 1e-10
    );
    let ell = make_family(FamilySpec::ellipsoid(
        vec![
            Schedule::constant(1.2),
            Schedule::constant(1.0),
            Schedule::constant(0.9),
        ],
        2,
    ))
    .unwrap();
    for p in [-2.0, 0.0, 1.0] {
        assert!(
            young_laplace_residual_family(&ell, 0.0, p, 1.0)
                .unwrap()
                .max
                > 1e-3
        );
    }
    let circle = DiscreteSurface::Curve(regular_polygon(40, 0.5));
    assert!(young_laplace_residual_mesh(&circle, -2.0, 1.0).unwrap().max < 1e-10);
}

#[test]
fn energies_of_static_and_expanding_spheres() {
    let surface = mesh(icosphere(4, 1.0));
    let g = fundamental_forms_mesh(&surface).unwrap();
    let n = surface.vertex_count();
    let e = lagrangian_energy(
        &surface,
        &g,
        &vec![1.0; n],
        &vec![Point::zeros(); n],
        0.0,
        1.0,
    )
    .unwrap();
    assert_eq!(e.kinetic, 0.0);
    assert_relative_eq!(e.potential, 4.0 * PI, max_relative = 2e-3);

    let expanding = make_family(FamilySpec::sphere(2, Schedule::linear(1.0, 1.0))).unwrap();
    let quad = ChartQuadrature::standard(&expanding.domain());
    let e = lagrangian_energy_family(&expanding, &quad, 0.0, |_| 1.0, 0.0, 0.0).unwrap();
    assert_relative_eq!(e.kinetic, 2.0 * PI, max_relative = 1e-12);
    assert_relative_eq!(e.lagrangian, 2.0 * PI, max_relative = 1e-12);
}

#[test]
fn best_fit_recovers_shifted_sphere() {
    let mut m = icosphere(2, 0.7);
    for v in &mut m.vertices {
        *v += Point::new(0.3, -1.0, 2.0);
    }
    let fit = best_fit_sphere(&m.vertices, 3).unwrap();
    assert_relative_eq!(fit.radius, 0.7, max_relative = 1e-12);
    assert_relative_eq!(fit.center, Point::new(0.3, -1.0, 2.0), epsilon = 1e-12);
    assert!(fit.radial_deviation < 1e-12);
}

#[test]
fn diagnostics_csv_layout() {
    let cfg = FlowConfig {
        max_steps: 3,
        tau_h: 1e-12,
        ..Default::default()
    };
    let out = run_to_equilibrium(mesh(ellipsoid(2, 1.2, 1.0, 0.9)), &cfg).unwrap();
    let csv = out.diagnostics.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(DIAGNOSTICS_HEADER));
    assert_eq!(lines.count(), 4);

    let mut with_mass = out.diagnostics.clone();
    for r in &mut with_mass.records {
        r.mass_total = Some(1.0);
    }
    assert!(with_mass
        .to_csv()
        .starts_with(&format!("{DIAGNOSTICS_HEADER},mass_total\n")));
}

#[test]
fn sphericity_is_one_on_round_shapes() {
    let c = DiscreteSurface::Curve(regular_polygon(4096, 1.0));
    let rec = FlowState::new(c).unwrap().record(&FlowConfig::default());
    assert_relative_eq!(rec.sphericity, 1.0, max_relative = 1e-6);
    let e = FlowState::new(mesh(ellipsoid(3, 1.5, 1.0, 1.0)))
        .unwrap()
        .record(&FlowConfig::default());
    assert!(e.sphericity < 1.0);
}

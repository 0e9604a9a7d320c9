use std::f64::consts::PI;

use cmsflow_core::families::{real_harmonic_at, FAMILY_NAMES};
use cmsflow_core::flow::{best_fit_sphere, step, young_laplace_residual_family};
use cmsflow_core::geometry::discrete::mesh_divergence;
use cmsflow_core::geometry::generators::{radial_mesh, radial_polygon, regular_polygon};
use cmsflow_core::geometry::io::{obj_string, parse_obj};
use cmsflow_core::{
    advect_density, compose_ambient_vector, decompose_ambient_vector, enclosed_volume,
    fundamental_forms_mesh, gauss_bonnet_check, make_family, total_mass, AdvectionScheme,
    AnalyticFamily, DiscreteSurface, FamilySpec, FlowConfig, FlowLaw, FlowState, ParamFamily,
    Point, Schedule, TriMesh,
};
use nalgebra::DVector;
use proptest::prelude::*;

fn family(index: usize) -> ParamFamily {
    AnalyticFamily::named(FAMILY_NAMES[index % FAMILY_NAMES.len()])
        .unwrap()
        .into_family()
}

/// A chart point away from poles, from unit-interval coordinates.
fn chart_point(f: &ParamFamily, unit: &[f64]) -> Vec<f64> {
    let d = f.domain();
    d.axes
        .iter()
        .zip(unit)
        .map(|(a, u)| a.lo + d.pole_margin + u * (a.hi - a.lo - 2.0 * d.pole_margin))
        .collect()
}

fn bumpy(level: usize, a: f64, b: f64) -> TriMesh {
    radial_mesh(level, |p| {
        1.0 + a * real_harmonic_at(3, 2, p) + b * real_harmonic_at(4, -1, p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ambient_vectors_split_and_rebuild(
        index in 0usize..64,
        unit in prop::collection::vec(0.0f64..1.0, 3),
        t in -0.2f64..0.2,
        a in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let f = family(index);
        let s = chart_point(&f, &unit[..f.dim()]);
        let k = f.kinematics(&s, t).unwrap();
        let v = DVector::from_column_slice(&a[..f.dim() + 1]);
        let (c, tangential) = decompose_ambient_vector(&k.forms, &v);
        let rebuilt = compose_ambient_vector(&k.forms, c, &tangential);
        prop_assert!((rebuilt - &v).amax() < 1e-11);
        let velocity = compose_ambient_vector(&k.forms, k.normal_speed, &k.tangential);
        prop_assert!((velocity - &k.velocity).amax() < 1e-11);
    }

    #[test]
    fn forms_are_symmetric_and_consistent(
        index in 0usize..64,
        unit in prop::collection::vec(0.0f64..1.0, 3),
        t in -0.2f64..0.2,
    ) {
        let f = family(index);
        let s = chart_point(&f, &unit[..f.dim()]);
        let forms = f.forms(&s, t).unwrap();
        prop_assert!((&forms.metric - forms.metric.transpose()).amax() < 1e-12);
        prop_assert!((&forms.curvature - forms.curvature.transpose()).amax() < 1e-10);
        prop_assert!(forms.metric.clone().cholesky().is_some());
        let trace = (&forms.metric_inv * &forms.curvature).trace();
        prop_assert!((trace - forms.mean_curvature).abs() < 1e-10);
        prop_assert!((forms.normal.norm() - 1.0).abs() < 1e-12);
        for i in 0..f.dim() {
            prop_assert!(forms.tangent(i).dot(&forms.normal).abs() < 1e-12);
        }
    }

    #[test]
    fn round_spheres_have_mean_curvature_minus_n_over_r(
        n in 1usize..=3,
        radius in 0.2f64..5.0,
        unit in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let f = make_family(FamilySpec::sphere(n, Schedule::constant(radius))).unwrap();
        let s = chart_point(&f, &unit[..n]);
        let h = f.forms(&s, 0.0).unwrap().mean_curvature;
        prop_assert!((h + n as f64 / radius).abs() < 1e-9 / radius);
    }

    #[test]
    fn young_laplace_vanishes_on_any_sphere(radius in 0.2f64..5.0, sigma in 0.1f64..10.0, n in 1usize..=2) {
        let f = make_family(FamilySpec::sphere(n, Schedule::constant(radius))).unwrap();
        let p = -sigma * n as f64 / radius;
        prop_assert!(young_laplace_residual_family(&f, 0.0, p, sigma).unwrap().max < 1e-10 * sigma.max(1.0 / radius));
    }

    #[test]
    fn regular_polygons_have_exact_curvature(sides in 6usize..400, radius in 0.1f64..10.0) {
        let g = fundamental_forms_mesh(&DiscreteSurface::Curve(regular_polygon(sides, radius))).unwrap();
        for h in &g.mean_curvature {
            prop_assert!((h * radius + 1.0).abs() < 1e-10, "{}", h * radius + 1.0);
        }
    }

    #[test]
    fn best_fit_recovers_random_spheres(
        radius in 0.1f64..10.0,
        cx in -5.0f64..5.0,
        cy in -5.0f64..5.0,
        cz in -5.0f64..5.0,
    ) {
        let center = Point::new(cx, cy, cz);
        let mut mesh = radial_mesh(1, |_| radius);
        for v in &mut mesh.vertices {
            *v += center;
        }
        let fit = best_fit_sphere(&mesh.vertices, 3).unwrap();
        prop_assert!((fit.radius - radius).abs() < 1e-9 * radius.max(1.0));
        prop_assert!((fit.center - center).norm() < 1e-9 * radius.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauss_bonnet_holds_on_random_closed_meshes(level in 1usize..=3, a in -0.2f64..0.2, b in -0.2f64..0.2) {
        let mesh = bumpy(level, a, b);
        prop_assert_eq!(mesh.euler_characteristic(), 2);
        prop_assert!(gauss_bonnet_check(&mesh).unwrap() < 1e-9);
        let g = fundamental_forms_mesh(&DiscreteSurface::Mesh(mesh)).unwrap();
        prop_assert!((g.angle_defects.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn obj_text_round_trips(level in 0usize..=3, a in -0.2f64..0.2) {
        let mesh = bumpy(level, a, 0.0);
        prop_assert_eq!(parse_obj(&obj_string(&mesh)).unwrap(), mesh);
    }

    #[test]
    fn divergence_integrates_to_zero(level in 1usize..=3, a in -0.2f64..0.2, w in prop::collection::vec(-1.0f64..1.0, 3)) {
        let mesh = bumpy(level, a, 0.1);
        let g = fundamental_forms_mesh(&DiscreteSurface::Mesh(mesh.clone())).unwrap();
        let axis = Point::new(w[0], w[1], w[2]);
        let field: Vec<Point> = mesh
            .vertices
            .iter()
            .zip(&g.normals)
            .map(|(x, n)| {
                let ambient = axis.cross(x) + Point::new(x.y * x.z, 1.0, -x.x);
                ambient - n * n.dot(&ambient)
            })
            .collect();
        let div = mesh_divergence(&mesh, &g, &field);
        let total: f64 = div.iter().zip(&g.areas).map(|(d, area)| d * area).sum();
        let scale: f64 = div.iter().zip(&g.areas).map(|(d, area)| (d * area).abs()).sum();
        prop_assert!(total.abs() < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn lumped_transport_keeps_mass_under_any_flow(
        a in -0.15f64..0.15,
        b in -0.15f64..0.15,
        law in prop::sample::select(vec![FlowLaw::Mcf, FlowLaw::VolumePreserving, FlowLaw::YoungLaplace]),
        weights in prop::collection::vec(0.1f64..3.0, 642),
    ) {
        let cfg = FlowConfig { law, ..Default::default() };
        let mut state = FlowState::new(DiscreteSurface::Mesh(bumpy(3, a, b))).unwrap();
        let mut rho = weights;
        let m0 = total_mass(&rho, &state.geometry);
        for _ in 0..5 {
            let before = state.geometry.clone();
            let velocity = state.velocity(&cfg);
            let report = state.advance(&cfg).unwrap();
            rho = advect_density(AdvectionScheme::Lumped, &state.surface, &rho, &before, &state.geometry, &velocity, report.dt).unwrap();
        }
        prop_assert!((total_mass(&rho, &state.geometry) - m0).abs() < 1e-12 * m0);
    }

    #[test]
    fn flow_steps_keep_topology_and_lower_area(a in -0.15f64..0.15, b in -0.15f64..0.15, curve in any::<bool>()) {
        let surface = if curve {
            DiscreteSurface::Curve(radial_polygon(96, |t| 1.0 + a * (3.0 * t).cos() + b * (5.0 * t).sin()))
        } else {
            DiscreteSurface::Mesh(bumpy(2, a, b))
        };
        let cfg = FlowConfig::default();
        let before = FlowState::new(surface.clone()).unwrap().record(&cfg);
        let (next, after) = step(&surface, &cfg).unwrap();
        prop_assert_eq!(next.euler_characteristic(), surface.euler_characteristic());
        prop_assert!(after.area <= before.area + 1e-12);
        let v0 = enclosed_volume(&surface).unwrap();
        let v1 = enclosed_volume(&next).unwrap();
        prop_assert!((v1 - v0).abs() < 1e-3 * v0);
    }
}

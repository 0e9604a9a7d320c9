use std::fmt::Write as _;
use std::fs;

use cmsflow_core::geometry::io::write_field_csv;
use cmsflow_core::geometry::quadrature::ChartQuadrature;
use cmsflow_core::{
    advect_density, make_family, total_mass, AdvectionScheme, ChartDensity, FamilySpec,
    FlowDiagnostics, FlowState, Schedule,
};

use crate::config::{Demo, RunConfig};
use crate::outcome::{CmdResult, Failure, EXIT_FAILURE};
use crate::shapes::load_surface;

/// One measured quantity of a demo against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoCheck {
    pub demo: &'static str,
    pub metric: &'static str,
    pub value: f64,
    pub bound: f64,
}

impl DemoCheck {
    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }

    fn line(&self) -> String {
        format!(
            "{:<10} {:<24} {:.6e} <= {:.1e} {}",
            self.demo,
            self.metric,
            self.value,
            self.bound,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

const CHART_COUNTS: [usize; 2] = [8, 16];

/// Uniform density on a sphere of radius `1 + t/2`, against `ρ₀ / R²`.
fn expanding_demo(config: &RunConfig) -> Result<Vec<DemoCheck>, Failure> {
    let family = make_family(FamilySpec::sphere(2, Schedule::linear(1.0, 0.5)))?;
    let quad = ChartQuadrature::new(&family.domain(), &CHART_COUNTS);
    let mut rho = ChartDensity::new(quad, 0.0, |_| 1.0)?;
    let m0 = rho.total_mass(&family)?;
    let steps = (config.t_end / config.dt).round().max(1.0) as usize;
    for _ in 0..steps {
        rho.advance(&family, config.dt)?;
    }
    let radius = 1.0 + 0.5 * rho.time;
    let exact = 1.0 / (radius * radius);
    let error = rho
        .values
        .iter()
        .fold(0.0f64, |m, r| m.max((r - exact).abs() / exact));
    let drift = (rho.total_mass(&family)? - m0).abs() / m0;
    Ok(vec![
        DemoCheck {
            demo: "expanding",
            metric: "max_relative_error",
            value: error,
            bound: 5e-3,
        },
        DemoCheck {
            demo: "expanding",
            metric: "mass_drift",
            value: drift,
            bound: 5e-3,
        },
    ])
}

/// A non-uniform density on a surface at rest must not change at all.
fn static_demo(config: &RunConfig) -> Result<Vec<DemoCheck>, Failure> {
    let family = make_family(FamilySpec::named("static")?)?;
    let quad = ChartQuadrature::new(&family.domain(), &CHART_COUNTS);
    let mut rho = ChartDensity::new(quad, 0.0, |s| 1.0 + 0.25 * s[0].cos())?;
    let m0 = rho.total_mass(&family)?;
    let initial = rho.values.clone();
    let steps = (config.t_end / config.dt).round().max(1.0) as usize;
    for _ in 0..steps {
        rho.advance(&family, config.dt)?;
    }
    let change = rho
        .values
        .iter()
        .zip(&initial)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let drift = (rho.total_mass(&family)? - m0).abs() / m0;
    Ok(vec![
        DemoCheck {
            demo: "static",
            metric: "max_density_change",
            value: change,
            bound: 0.0,
        },
        DemoCheck {
            demo: "static",
            metric: "mass_drift",
            value: drift,
            bound: 0.0,
        },
    ])
}

/// Lumped density carried by a flowing mesh; mass is logged per step.
fn flow_demo(config: &RunConfig) -> Result<Vec<DemoCheck>, Failure> {
    let shape = config.shape.as_deref().or(if config.mesh.is_none() {
        Some("ellipsoid")
    } else {
        None
    });
    let surface = load_surface(shape, config.mesh.as_deref(), config.level)?;
    let flow = &config.flow;
    let mut state = FlowState::new(surface)?;
    let mut rho: Vec<f64> = state
        .surface
        .vertices()
        .iter()
        .map(|x| 1.0 + 0.5 * x.z * x.z)
        .collect();
    let m0 = total_mass(&rho, &state.geometry);
    let mut diagnostics = FlowDiagnostics::default();
    let mut worst: f64 = 0.0;
    let snapshot = |step: usize, rho: &[f64]| -> Result<(), Failure> {
        if step.is_multiple_of(config.snapshot_every) || step == config.pde_steps {
            let path = config.out.join(format!("density_{step:06}.csv"));
            write_field_csv(&path, rho)?;
        }
        Ok(())
    };
    loop {
        let mass = total_mass(&rho, &state.geometry);
        worst = worst.max((mass - m0).abs() / m0);
        let mut record = state.record(flow);
        record.mass_total = Some(mass);
        diagnostics.push(record);
        snapshot(state.step, &rho)?;
        if state.step >= config.pde_steps {
            break;
        }
        let before = state.geometry.clone();
        let velocity = state.velocity(flow);
        let report = state.advance(flow)?;
        rho = advect_density(
            AdvectionScheme::Lumped,
            &state.surface,
            &rho,
            &before,
            &state.geometry,
            &velocity,
            report.dt,
        )?;
    }
    diagnostics.write_csv(&config.out.join("diagnostics.csv"))?;
    Ok(vec![DemoCheck {
        demo: "flow",
        metric: "mass_drift",
        value: worst,
        bound: 1e-6,
    }])
}

pub fn cmd_pde_demo(config: &RunConfig) -> CmdResult {
    let mut checks = Vec::new();
    if matches!(config.demo, Demo::All | Demo::Expanding) {
        checks.extend(expanding_demo(config)?);
    }
    if matches!(config.demo, Demo::All | Demo::Static) {
        checks.extend(static_demo(config)?);
    }
    if matches!(config.demo, Demo::All | Demo::Flow) {
        checks.extend(flow_demo(config)?);
    }
    let mut report = String::new();
    for c in &checks {
        let line = c.line();
        println!("{line}");
        let _ = writeln!(report, "{line}");
    }
    let path = config.out.join("pde_report.txt");
    fs::write(&path, report).map_err(|e| Failure::io(&path, e))?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| {
            format!(
                "{} {} = {:e} exceeds {:e}",
                c.demo, c.metric, c.value, c.bound
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_FAILURE,
            format!("conservation check failed: {}", failed.join("; ")),
        ))
    }
}

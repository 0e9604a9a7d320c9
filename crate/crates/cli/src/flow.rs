use std::fs;

use cmsflow_core::flow::run_with;
use cmsflow_core::geometry::io::surface_obj_string;
use cmsflow_core::{DiscreteSurface, Termination};

use crate::config::RunConfig;
use crate::outcome::{exit_code, CmdResult, Failure, EXIT_NONCONVERGENCE};
use crate::shapes::load_surface;

fn write_snapshot(
    config: &RunConfig,
    step: usize,
    surface: &DiscreteSurface,
) -> Result<(), Failure> {
    let path = config.out.join(format!("snap_{step:06}.obj"));
    fs::write(&path, surface_obj_string(surface)).map_err(|e| Failure::io(&path, e))
}

pub fn cmd_flow(config: &RunConfig) -> CmdResult {
    let surface = load_surface(
        config.shape.as_deref(),
        config.mesh.as_deref(),
        config.level,
    )?;
    let chi = surface.euler_characteristic();
    if config.require_sphere && matches!(surface, DiscreteSurface::Mesh(_)) && chi != 2 {
        return Err(Failure::new(
            EXIT_NONCONVERGENCE,
            format!("not simply connected: Euler characteristic {chi}, a round sphere needs 2"),
        ));
    }
    let flow = &config.flow;
    println!(
        "flow: law {}, {} vertices, euler characteristic {chi}, sigma {}, mu {}, tau_h {:e}",
        flow.law.name(),
        surface.vertex_count(),
        flow.sigma,
        flow.mobility,
        flow.tau_h
    );

    let every = config.snapshot_every;
    let mut last_written = None;
    let outcome = run_with(surface, flow, |state, _| {
        if state.step.is_multiple_of(every) {
            write_snapshot(config, state.step, &state.surface)
                .map_err(|f| cmsflow_core::CmsError::Io(f.message))?;
            last_written = Some(state.step);
        }
        Ok(())
    })
    .map_err(Failure::from)?;

    let last = outcome.diagnostics.last().map(|r| r.step).unwrap_or(0);
    if last_written != Some(last) {
        write_snapshot(config, last, &outcome.surface)?;
    }
    let csv_path = config.out.join("diagnostics.csv");
    outcome.diagnostics.write_csv(&csv_path)?;

    let d = &outcome.diagnostics;
    if let Some(r) = d.last() {
        println!(
            "steps {}  time {:.6e}  area {:.9e}  volume {:.9e}  H_relstd {:.3e}",
            r.step, r.time, r.area, r.volume, r.h_relstd
        );
    }
    println!(
        "volume drift {:.3e}  max energy increase {:.3e}  max gauss-bonnet residual {:.3e}",
        d.volume_drift(),
        d.max_energy_increase(),
        d.max_gauss_bonnet_residual()
    );

    match outcome.termination {
        Termination::Converged => {
            let cert = outcome
                .certificate
                .expect("converged runs carry a certificate");
            let text = cert.to_string();
            let path = config.out.join("certificate.txt");
            fs::write(&path, &text).map_err(|e| Failure::io(&path, e))?;
            print!("{text}");
            Ok(())
        }
        Termination::StepBudget | Termination::TimeLimit => {
            let r = d.last().expect("at least the initial record");
            let budget = if outcome.termination == Termination::StepBudget {
                "step budget"
            } else {
                "time limit"
            };
            Err(Failure::new(
                EXIT_NONCONVERGENCE,
                format!(
                    "did not converge: H_relstd {:.3e} above tau_h {:e} when the {budget} ran out after {} steps",
                    r.h_relstd, flow.tau_h, r.step
                ),
            ))
        }
        Termination::Failed(e) => Err(Failure::new(
            exit_code(&e),
            format!("flow stopped at step {last}: {e}"),
        )),
    }
}

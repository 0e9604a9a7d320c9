use std::fmt::Write as _;
use std::fs;

use cmsflow_core::verify::{named_families, reports_to_csv, EXACT_TOLERANCE};
use cmsflow_core::{run_suite, Mutation, ParamFamily, VerifyOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{MutationHook, RunConfig};
use crate::outcome::{CmdResult, Failure, EXIT_FAILURE};

const DECOMPOSITION_SAMPLES: usize = 64;

/// Worst `|V − (C N + V^i S_i)|` over random chart points and times near `t`.
pub fn decomposition_residual(
    family: &ParamFamily,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, Failure> {
    let domain = family.domain();
    let mut worst: f64 = 0.0;
    for _ in 0..DECOMPOSITION_SAMPLES {
        let s: Vec<f64> = domain
            .axes
            .iter()
            .map(|a| rng.random_range(a.lo + domain.pole_margin..a.hi - domain.pole_margin))
            .collect();
        let time = t + rng.random_range(-0.05..0.05);
        let k = family.kinematics(&s, time)?;
        let rebuilt = k.point_velocity().ambient(&k.forms);
        worst = worst.max((rebuilt - &k.velocity).amax());
    }
    Ok(worst)
}

pub fn cmd_verify(config: &RunConfig) -> CmdResult {
    let names: Vec<&str> = config.families.iter().map(String::as_str).collect();
    if names.is_empty() {
        return Err(Failure::usage("the family list is empty"));
    }
    let families = named_families(&names).map_err(|e| Failure::usage(e.to_string()))?;
    let options = VerifyOptions {
        time: config.time,
        scheme: config.scheme,
        mutation: config.mutation.map(|m| match m {
            MutationHook::FlipMetricBending => Mutation::FlipMetricBending,
        }),
        ..Default::default()
    };
    let reports = run_suite(&families, &config.steps, &options)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut decomposition = Vec::new();
    for family in &families {
        decomposition.push((
            family.name(),
            decomposition_residual(family, config.time, &mut rng)?,
        ));
    }

    let mut csv = reports_to_csv(&reports);
    for (label, residual) in &decomposition {
        let _ = writeln!(csv, "velocity_decomposition,{label},0e0,{residual:.6e},NaN");
    }
    let path = config.out.join("verify_report.csv");
    fs::write(&path, csv).map_err(|e| Failure::io(&path, e))?;

    let mut failed: Vec<String> = Vec::new();
    for r in &reports {
        println!("{r}");
        if !r.passed() {
            failed.push(format!("{} on {} (h = {:e})", r.identity, r.family, r.h));
        }
    }
    for (label, residual) in &decomposition {
        let ok = *residual < EXACT_TOLERANCE;
        println!(
            "{:<20} {:<20} samples={DECOMPOSITION_SAMPLES:<3} residual={residual:.3e} seed={} {}",
            "velocity_decomposition",
            label,
            config.seed,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed.push(format!("velocity_decomposition on {label}"));
        }
    }
    let total = reports.len() + decomposition.len();
    println!(
        "summary: {} families, {} checks, {} passed, {} failed; report {}",
        families.len(),
        total,
        total - failed.len(),
        failed.len(),
        path.display()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_FAILURE,
            format!("identity check failed: {}", failed.join("; ")),
        ))
    }
}

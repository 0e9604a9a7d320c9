use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use cmsflow_core::verify::{TimeScheme, DEFAULT_FAMILIES, DEFAULT_TIME};
use cmsflow_core::{FlowConfig, FlowLaw};
use ini::Ini;

pub const CONFIG_HELP: &str = "\
Configuration file (INI, dotted sections; command-line flags win):

  [run]     mode, out, family, families, mesh, level, seed,
            snapshot_every, require_sphere
  [verify]  families, h, time, scheme (centered | five-point)
  [flow]    law, sigma, mu, tau_h, max_steps, max_time,
            tangential_smoothing, check_self_intersection
  [flow.controller]
            safety, max_step, fixed_step
  [pde]     demo (all | expanding | static | flow), dt, t_end, steps

Defaults: out=cmsflow-out, level=4, seed=0, snapshot_every=1000,
verify families=sphere,ellipsoid,translate,perturbed,rotating, h=1e-2,
time=0.1, law=vpmcf, sigma=1, mu=1, tau_h=1e-3, max_steps=100000,
safety=0.5, max_step=1e-2, demo=all, dt=1e-4, t_end=0.2, steps=1000.

Flow shapes for --family: sphere, ellipsoid, bumpy, torus, circle, ellipse.
Verify families: static, sphere, accelerating-sphere, circle, sphere3,
ellipsoid, translate, perturbed, rotating, spin, torus, warped-sphere.

Environment: CMSFLOW_THREADS caps the worker pool.

Exit codes: 0 success, 1 identity or conservation failure, 2 usage error,
3 topology violation, 4 non-convergence.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Verify,
    Flow,
    PdeDemo,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Mode as ValueEnum>::from_str(s, false)
            .map_err(|_| format!("unknown mode '{s}' (verify, flow, pde-demo)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    All,
    Expanding,
    Static,
    Flow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutationHook {
    FlipMetricBending,
}

#[derive(Debug, Parser)]
#[command(
    name = "cmsflow",
    version,
    about = "Moving-surface identity checks, curvature flows and surface transport"
)]
#[command(after_help = CONFIG_HELP)]
pub struct Cli {
    /// Mode as a positional word (same as --mode).
    #[arg(value_enum)]
    pub command: Option<Mode>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Flow shape, or a comma-separated list of verify families.
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,
    /// Comma-separated verify families.
    #[arg(long, value_name = "LIST")]
    pub families: Option<String>,
    /// Input surface: OBJ mesh or CSV curve.
    #[arg(long, value_name = "PATH")]
    pub mesh: Option<PathBuf>,
    /// Subdivision level of generated shapes.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long, value_parser = ["mcf", "vpmcf", "yl"])]
    pub law: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "tau-h")]
    pub tau_h: Option<f64>,
    #[arg(long = "max-steps")]
    pub max_steps: Option<usize>,
    #[arg(long = "snapshot-every")]
    pub snapshot_every: Option<usize>,
    #[arg(long = "require-sphere")]
    pub require_sphere: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated time steps for verify mode.
    #[arg(long, value_name = "LIST")]
    pub h: Option<String>,
    #[arg(long, value_enum)]
    pub demo: Option<Demo>,
    /// Time step of the density demos.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Self-test hook: corrupt an identity on purpose.
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<MutationHook>,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub out: PathBuf,
    pub families: Vec<String>,
    pub shape: Option<String>,
    pub mesh: Option<PathBuf>,
    pub level: usize,
    pub seed: u64,
    pub snapshot_every: usize,
    pub require_sphere: bool,
    pub steps: Vec<f64>,
    pub time: f64,
    pub scheme: TimeScheme,
    pub flow: FlowConfig,
    pub demo: Demo,
    pub dt: f64,
    pub t_end: f64,
    pub pde_steps: usize,
    pub mutation: Option<MutationHook>,
}

const KNOWN_KEYS: &[&str] = &[
    "run.mode",
    "run.out",
    "run.family",
    "run.families",
    "run.mesh",
    "run.level",
    "run.seed",
    "run.snapshot_every",
    "run.require_sphere",
    "verify.families",
    "verify.h",
    "verify.time",
    "verify.scheme",
    "flow.law",
    "flow.sigma",
    "flow.mu",
    "flow.tau_h",
    "flow.max_steps",
    "flow.max_time",
    "flow.tangential_smoothing",
    "flow.check_self_intersection",
    "flow.controller.safety",
    "flow.controller.max_step",
    "flow.controller.fixed_step",
    "pde.demo",
    "pde.dt",
    "pde.t_end",
    "pde.steps",
];

/// Flatten an INI file into `section.key` entries.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let ini = Ini::load_from_file(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (section, props) in ini.iter() {
        for (key, value) in props.iter() {
            let full = match section {
                Some(s) => format!("{s}.{key}"),
                None => format!("run.{key}"),
            };
            if !KNOWN_KEYS.contains(&full.as_str()) {
                return Err(UsageError(format!(
                    "unknown config key '{full}' in {}",
                    path.display()
                )));
            }
            map.insert(full, value.trim().to_string());
        }
    }
    Ok(map)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, UsageError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| UsageError(format!("invalid value '{value}' for {key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, UsageError> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(UsageError(format!("invalid boolean '{value}' for {key}"))),
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn parse_steps(key: &str, value: &str) -> Result<Vec<f64>, UsageError> {
    let steps = split_list(value)
        .iter()
        .map(|s| parse::<f64>(key, s))
        .collect::<Result<Vec<_>, _>>()?;
    if steps.is_empty() || steps.iter().any(|h| !(*h > 0.0)) {
        return Err(UsageError(format!(
            "{key} needs positive step sizes, got '{value}'"
        )));
    }
    Ok(steps)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, UsageError> {
        let file = match &cli.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        let get = |key: &str| file.get(key).map(String::as_str);

        let mode = match (cli.command, cli.mode) {
            (Some(a), Some(b)) if a != b => {
                return Err(UsageError(format!("conflicting modes {a:?} and {b:?}")));
            }
            (Some(m), _) | (None, Some(m)) => m,
            (None, None) => match get("run.mode") {
                Some(v) => parse::<Mode>("run.mode", v)?,
                None => {
                    return Err(UsageError(
                        "no mode given (verify, flow or pde-demo)".into(),
                    ))
                }
            },
        };

        let mut flow = FlowConfig::default();
        if let Some(v) = cli.law.as_deref().or(get("flow.law")) {
            flow.law = parse::<FlowLaw>("flow.law", v)?;
        }
        macro_rules! set {
            ($field:expr, $flag:expr, $key:literal) => {
                if let Some(v) = $flag {
                    $field = v;
                } else if let Some(v) = get($key) {
                    $field = parse($key, v)?;
                }
            };
        }
        set!(flow.sigma, cli.sigma, "flow.sigma");
        set!(flow.mobility, cli.mu, "flow.mu");
        set!(flow.tau_h, cli.tau_h, "flow.tau_h");
        set!(flow.max_steps, cli.max_steps, "flow.max_steps");
        set!(flow.max_time, None::<f64>, "flow.max_time");
        set!(
            flow.tangential_smoothing,
            None::<f64>,
            "flow.tangential_smoothing"
        );
        set!(flow.safety, None::<f64>, "flow.controller.safety");
        set!(flow.max_step, None::<f64>, "flow.controller.max_step");
        if let Some(v) = get("flow.controller.fixed_step") {
            flow.fixed_step = Some(parse("flow.controller.fixed_step", v)?);
        }
        if let Some(v) = get("flow.check_self_intersection") {
            flow.check_self_intersection = parse_bool("flow.check_self_intersection", v)?;
        }
        flow.validate().map_err(|e| UsageError(e.to_string()))?;

        let families_text = cli
            .families
            .clone()
            .or_else(|| {
                if mode == Mode::Verify {
                    cli.family.clone()
                } else {
                    None
                }
            })
            .or_else(|| get("verify.families").map(String::from))
            .or_else(|| get("run.families").map(String::from));
        let families = match families_text {
            Some(text) => split_list(&text),
            None => DEFAULT_FAMILIES.iter().map(|s| s.to_string()).collect(),
        };
        if mode == Mode::Verify && families.is_empty() {
            return Err(UsageError("the family list is empty".into()));
        }

        let steps = match cli.h.as_deref().or(get("verify.h")) {
            Some(v) => parse_steps("h", v)?,
            None => vec![1e-2],
        };
        let time = match get("verify.time") {
            Some(v) => parse("verify.time", v)?,
            None => DEFAULT_TIME,
        };
        let scheme = match get("verify.scheme") {
            None | Some("centered") => TimeScheme::Centered,
            Some("five-point") => TimeScheme::FivePoint,
            Some(other) => return Err(UsageError(format!("unknown verify.scheme '{other}'"))),
        };

        let shape = if mode == Mode::Verify {
            None
        } else {
            cli.family.clone().or(get("run.family").map(String::from))
        };
        let mesh = cli.mesh.clone().or(get("run.mesh").map(PathBuf::from));
        if mode == Mode::Flow {
            match (&shape, &mesh) {
                (Some(_), Some(_)) => {
                    return Err(UsageError(
                        "give either --family or --mesh, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(UsageError("flow mode needs --family or --mesh".into()))
                }
                _ => {}
            }
            if let Some(path) = &mesh {
                if !path.exists() {
                    return Err(UsageError(format!(
                        "mesh file {} does not exist",
                        path.display()
                    )));
                }
            }
        }

        let mut level = 4;
        set!(level, cli.level, "run.level");
        let mut seed = 0;
        set!(seed, cli.seed, "run.seed");
        let mut snapshot_every = 1000;
        set!(snapshot_every, cli.snapshot_every, "run.snapshot_every");
        if snapshot_every == 0 {
            return Err(UsageError("snapshot cadence must be at least 1".into()));
        }
        let require_sphere = cli.require_sphere
            || match get("run.require_sphere") {
                Some(v) => parse_bool("run.require_sphere", v)?,
                None => false,
            };
        let out = cli
            .out
            .clone()
            .or(get("run.out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("cmsflow-out"));

        let demo = match (cli.demo, get("pde.demo")) {
            (Some(d), _) => d,
            (None, Some(v)) => <Demo as ValueEnum>::from_str(v, false)
                .map_err(|_| UsageError(format!("unknown pde.demo '{v}'")))?,
            (None, None) => Demo::All,
        };
        let mut dt = 1e-4;
        set!(dt, cli.dt, "pde.dt");
        let mut t_end = 0.2;
        set!(t_end, None::<f64>, "pde.t_end");
        let mut pde_steps = 1000;
        set!(pde_steps, None::<usize>, "pde.steps");
        if !(dt > 0.0) || !(t_end > 0.0) || pde_steps == 0 {
            return Err(UsageError(
                "pde dt, t_end and steps must be positive".into(),
            ));
        }

        Ok(Self {
            mode,
            out,
            families,
            shape,
            mesh,
            level,
            seed,
            snapshot_every,
            require_sphere,
            steps,
            time,
            scheme,
            flow,
            demo,
            dt,
            t_end,
            pde_steps,
            mutation: cli.mutate,
        })
    }
}

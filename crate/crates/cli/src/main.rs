mod config;
mod output;
mod presets;
mod run;
mod schema;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use crosstalk_core::damping::{Contact, LongTimeMethod};
use crosstalk_core::disorder::{Boundary, DisorderLaw, Route};
use crosstalk_core::lattice::Symmetry;

use config::{DisorderSettings, LatticeConfig, Overlay, ProbeSettings, RunConfig, Separations, Task};
use presets::Preset;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(crosstalk_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<crosstalk_core::Error> for CliError {
    fn from(e: crosstalk_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use crosstalk_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(E::InvalidInput(_) | E::OutOfBand { .. }) => 2,
            CliError::Core(E::Resolution { .. } | E::Numeric(_) | E::StepSize { .. }) => 3,
            CliError::Core(E::InvalidCoefficients(_)) => 4,
        }
    }
}

/// Collective dissipation of two probes in harmonic-crystal baths.
#[derive(Parser, Debug)]
#[command(name = "crosstalk", version, about)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CROSSTALK_THREADS")]
    threads: Option<usize>,

    /// Only report errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band surface on the zone grid and iso-frequency contours.
    Dispersion(DispersionArgs),
    /// Cross-damping maps and profiles, long-time or finite-time.
    Crosstalk(CrosstalkArgs),
    /// Equal-time bath correlation function.
    Correlation(CorrelationArgs),
    /// Entanglement survival of two-mode squeezed probes.
    Dynamics(DynamicsArgs),
    /// Predefined batches of runs written to a directory.
    Preset(PresetArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Full run configuration (JSON, or a dataset CSV with an embedded config).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; additional datasets go to `<stem>_<name>.csv`. Default: stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a JSON metadata file next to each CSV.
    #[arg(long)]
    sidecar: bool,
    /// Print the dataset columns and exit.
    #[arg(long)]
    schema: bool,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long, value_parser = parse_symmetry)]
    symmetry: Option<Symmetry>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    coupling: Option<f64>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    /// Gaussian contact width; 0 selects a point contact.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args, Debug)]
struct SeparationArgs {
    /// Line of separations `m * step`, `m = 0..=count`.
    #[arg(long, value_delimiter = ',', num_args = 1..=3)]
    line_step: Option<Vec<f64>>,
    #[arg(long)]
    count: Option<usize>,
    /// All lattice sites with |x|, |y| <= extent (2D).
    #[arg(long)]
    window: Option<usize>,
    /// Restrict a window to x, y >= 0.
    #[arg(long)]
    quadrant: bool,
}

#[derive(Args, Debug)]
struct DispersionArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[arg(long)]
    n_per_axis: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<f64>>,
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args, Debug)]
struct MethodArgs {
    /// Manifold resolution for long-time coefficients.
    #[arg(long, conflicts_with = "broadened")]
    resolution: Option<usize>,
    /// Use the broadened-grid estimator with this many points per axis.
    #[arg(long)]
    broadened: Option<usize>,
}

impl MethodArgs {
    fn apply(&self, method: &mut LongTimeMethod) {
        if let Some(resolution) = self.resolution {
            *method = LongTimeMethod::Manifold { resolution };
        }
        if let Some(n_per_axis) = self.broadened {
            *method = LongTimeMethod::BroadenedGrid { n_per_axis };
        }
    }
}

#[derive(Args, Debug)]
struct CrosstalkArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    probe: ProbeArgs,
    #[command(flatten)]
    separations: SeparationArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Finite times; omit for the long-time limit.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Zone grid for finite times (default: suggested per time).
    #[arg(long)]
    n_per_axis: Option<usize>,
    #[arg(long, value_parser = parse_overlay)]
    overlay: Option<Overlay>,
    /// Disorder amplitudes; switches to finite disordered chains.
    #[arg(long, value_delimiter = ',')]
    amplitudes: Option<Vec<f64>>,
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_law)]
    law: Option<DisorderLaw>,
    #[arg(long, value_parser = parse_boundary)]
    boundary: Option<Boundary>,
    #[arg(long, value_parser = parse_route)]
    route: Option<Route>,
}

#[derive(Args, Debug)]
struct CorrelationArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    separations: SeparationArgs,
    #[arg(long, value_delimiter = ',')]
    temperatures: Option<Vec<f64>>,
    #[arg(long)]
    n_per_axis: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    probe: ProbeArgs,
    #[command(flatten)]
    separations: SeparationArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    squeezing: Option<f64>,
    #[arg(long)]
    lamb_grid: Option<usize>,
    #[arg(long)]
    trace_samples: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 4)]
    initial_mean: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct PresetArgs {
    #[arg(value_enum)]
    name: Preset,
    /// Directory for the preset datasets.
    #[arg(long, default_value = "crosstalk-out")]
    output_dir: PathBuf,
    #[arg(long)]
    sidecar: bool,
    /// List the runs and their configurations without computing.
    #[arg(long)]
    dry_run: bool,
}

fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_symmetry(s: &str) -> Result<Symmetry, String> {
    kebab(s)
}

fn parse_overlay(s: &str) -> Result<Overlay, String> {
    kebab(s)
}

fn parse_law(s: &str) -> Result<DisorderLaw, String> {
    kebab(s)
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    kebab(s)
}

fn parse_route(s: &str) -> Result<Route, String> {
    kebab(s)
}

fn base_config(common: &Common, default: impl FnOnce() -> RunConfig, command: &str) -> Result<RunConfig, CliError> {
    let cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => default(),
    };
    if cfg.task.name() != command {
        return Err(CliError::Config(format!(
            "config describes a `{}` run, not `{command}`",
            cfg.task.name()
        )));
    }
    Ok(cfg)
}

impl LatticeArgs {
    fn apply(&self, l: &mut LatticeConfig) {
        if let Some(v) = self.dimension {
            l.dimension = v;
        }
        if let Some(v) = self.symmetry {
            l.symmetry = v;
        }
        if let Some(v) = self.omega0 {
            l.omega0 = v;
        }
        if let Some(v) = self.coupling {
            l.coupling = v;
        }
    }
}

impl ProbeArgs {
    fn apply(&self, p: &mut ProbeSettings) {
        if let Some(v) = self.omega {
            p.omega = v;
        }
        if let Some(v) = self.lambda {
            p.lambda = v;
        }
        if let Some(v) = self.temperature {
            p.temperature = v;
        }
        if let Some(sigma) = self.sigma {
            p.contact = if sigma > 0.0 { Contact::Gaussian { sigma } } else { Contact::Point };
        }
    }
}

impl SeparationArgs {
    fn apply(&self, s: &mut Separations) -> Result<(), CliError> {
        if let Some(extent) = self.window {
            *s = Separations::Window {
                extent,
                quadrant: self.quadrant,
            };
        } else if let Some(step) = &self.line_step {
            let mut v = [0.0; 3];
            v[..step.len()].copy_from_slice(step);
            *s = Separations::Line {
                step: v,
                count: self.count.unwrap_or(10),
            };
        } else if let Some(count) = self.count {
            match s {
                Separations::Line { count: c, .. } => *c = count,
                _ => return Err(CliError::Config("--count needs a line of separations".into())),
            }
        } else if self.quadrant {
            match s {
                Separations::Window { quadrant, .. } => *quadrant = true,
                _ => return Err(CliError::Config("--quadrant needs a window of separations".into())),
            }
        }
        Ok(())
    }
}

fn default_line() -> Separations {
    Separations::Line {
        step: [1.0, 0.0, 0.0],
        count: 20,
    }
}

fn dispersion_config(a: &DispersionArgs) -> Result<RunConfig, CliError> {
    let mut cfg = base_config(
        &a.common,
        || RunConfig {
            lattice: LatticeConfig::default(),
            task: Task::Dispersion {
                n_per_axis: 64,
                omegas: Vec::new(),
                resolution: 256,
            },
        },
        "dispersion",
    )?;
    a.lattice.apply(&mut cfg.lattice);
    if let Task::Dispersion {
        n_per_axis,
        omegas,
        resolution,
    } = &mut cfg.task
    {
        if let Some(v) = a.n_per_axis {
            *n_per_axis = v;
        }
        if let Some(v) = &a.omegas {
            *omegas = v.clone();
        }
        if let Some(v) = a.resolution {
            *resolution = v;
        }
    }
    Ok(cfg)
}

fn crosstalk_config(a: &CrosstalkArgs) -> Result<RunConfig, CliError> {
    let mut cfg = base_config(
        &a.common,
        || RunConfig {
            lattice: LatticeConfig::default(),
            task: Task::Crosstalk {
                probe: ProbeSettings::default(),
                separations: default_line(),
                times: Vec::new(),
                n_per_axis: None,
                method: LongTimeMethod::Manifold { resolution: 512 },
                overlay: None,
                disorder: None,
            },
        },
        "crosstalk",
    )?;
    a.lattice.apply(&mut cfg.lattice);
    if let Task::Crosstalk {
        probe,
        separations,
        times,
        n_per_axis,
        method,
        overlay,
        disorder,
    } = &mut cfg.task
    {
        a.probe.apply(probe);
        a.separations.apply(separations)?;
        a.method.apply(method);
        if let Some(v) = &a.times {
            *times = v.clone();
        }
        if a.n_per_axis.is_some() {
            *n_per_axis = a.n_per_axis;
        }
        if a.overlay.is_some() {
            *overlay = a.overlay;
        }
        let touches_disorder = a.amplitudes.is_some()
            || a.n_sites.is_some()
            || a.realizations.is_some()
            || a.seed.is_some()
            || a.law.is_some()
            || a.boundary.is_some()
            || a.route.is_some();
        if touches_disorder {
            let d = disorder.get_or_insert_with(DisorderSettings::default);
            if let Some(v) = &a.amplitudes {
                d.amplitudes = v.clone();
            }
            if let Some(v) = a.n_sites {
                d.n_sites = v;
            }
            if let Some(v) = a.realizations {
                d.realizations = v;
            }
            if let Some(v) = a.seed {
                d.base_seed = v;
            }
            if let Some(v) = a.law {
                d.law = v;
            }
            if let Some(v) = a.boundary {
                d.boundary = v;
            }
            if let Some(v) = a.route {
                d.route = v;
            }
        }
    }
    Ok(cfg)
}

fn correlation_config(a: &CorrelationArgs) -> Result<RunConfig, CliError> {
    let mut cfg = base_config(
        &a.common,
        || RunConfig {
            lattice: LatticeConfig::default(),
            task: Task::Correlation {
                temperatures: vec![0.0],
                separations: default_line(),
                n_per_axis: 256,
                level: 0.01,
            },
        },
        "correlation",
    )?;
    a.lattice.apply(&mut cfg.lattice);
    if let Task::Correlation {
        temperatures,
        separations,
        n_per_axis,
        level,
    } = &mut cfg.task
    {
        a.separations.apply(separations)?;
        if let Some(v) = &a.temperatures {
            *temperatures = v.clone();
        }
        if let Some(v) = a.n_per_axis {
            *n_per_axis = v;
        }
        if let Some(v) = a.level {
            *level = v;
        }
    }
    Ok(cfg)
}

fn dynamics_config(a: &DynamicsArgs) -> Result<RunConfig, CliError> {
    let mut cfg = base_config(
        &a.common,
        || RunConfig {
            lattice: LatticeConfig::default(),
            task: Task::Dynamics {
                probe: ProbeSettings {
                    lambda: 0.05,
                    ..ProbeSettings::default()
                },
                separations: default_line(),
                t_final: 1e3,
                squeezing: 1.0,
                method: LongTimeMethod::Manifold { resolution: 64 },
                lamb_grid: None,
                trace_samples: 0,
                initial_mean: [0.0; 4],
            },
        },
        "dynamics",
    )?;
    a.lattice.apply(&mut cfg.lattice);
    if let Task::Dynamics {
        probe,
        separations,
        t_final,
        squeezing,
        method,
        lamb_grid,
        trace_samples,
        initial_mean,
    } = &mut cfg.task
    {
        a.probe.apply(probe);
        a.separations.apply(separations)?;
        a.method.apply(method);
        if let Some(v) = a.t_final {
            *t_final = v;
        }
        if let Some(v) = a.squeezing {
            *squeezing = v;
        }
        if a.lamb_grid.is_some() {
            *lamb_grid = a.lamb_grid;
        }
        if let Some(v) = a.trace_samples {
            *trace_samples = v;
        }
        if let Some(v) = &a.initial_mean {
            initial_mean.copy_from_slice(v);
        }
    }
    Ok(cfg)
}

fn run_single(common: &Common, cfg: RunConfig) -> Result<(), CliError> {
    if common.schema {
        print!("{}", schema::describe(cfg.task.name()));
        return Ok(());
    }
    if common.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    let sets = run::execute(&cfg)?;
    for path in output::write_all(common.output.as_deref(), common.sidecar, &cfg, &sets)? {
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn run_preset(a: &PresetArgs) -> Result<(), CliError> {
    for (name, cfg) in presets::expand(a.name) {
        let base = a.output_dir.join(format!("{name}.csv"));
        if a.dry_run {
            println!("{}: {}", base.display(), cfg.canonical());
            continue;
        }
        let start = std::time::Instant::now();
        let sets = run::execute(&cfg)?;
        for path in output::write_all(Some(Path::new(&base)), a.sidecar, &cfg, &sets)? {
            info!("wrote {} ({:.1} s)", path.display(), start.elapsed().as_secs_f64());
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Dispersion(a) => run_single(&a.common, dispersion_config(a)?),
        Command::Crosstalk(a) => run_single(&a.common, crosstalk_config(a)?),
        Command::Correlation(a) => run_single(&a.common, correlation_config(a)?),
        Command::Dynamics(a) => run_single(&a.common, dynamics_config(a)?),
        Command::Preset(a) => run_preset(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "error" } else { "info" }))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("cannot size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

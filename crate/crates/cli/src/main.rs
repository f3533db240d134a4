//! Command-line front end: raster gap filling, validation experiments,
//! calibration management, and synthetic-field generation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use mprfill_core::calibration::{
    load_or_build, log_spaced_t_grid, write_calibration, CalibrationConfig,
};
use mprfill_core::error::Error;
use mprfill_core::grid::{GridField, TransformParams};
use mprfill_core::idw::{min_full_coverage_radius, NoNeighborPolicy};
use mprfill_core::model::MprParams;
use mprfill_core::pipeline::{
    default_smooth_radius, fill_grid, FillMethod, FillRequest, IdwConfig,
};
use mprfill_core::raster::{
    emit_heatmap, load_raster, write_raster, write_temperature_raster, HeatmapOptions,
};
use mprfill_core::sim::{InitStrategy, SimulationConfig};
use mprfill_core::validate::{
    compare_methods, generate_synthetic_field, make_thinnings, CompareSpec, RegimeLayout,
    RegimeSpec, SyntheticFieldSpec, ThinningSpec,
};

/// Environment variable naming the calibration cache directory.
const CACHE_DIR_ENV: &str = "MPRFILL_CACHE_DIR";

#[derive(Parser)]
#[command(
    name = "mprfill",
    version,
    about = "Fill gaps in gridded data by conditional spin-model simulation"
)]
struct Cli {
    /// Worker thread count (default: all cores). Outputs are bitwise
    /// identical regardless of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fill the gaps of one raster and write the completed raster.
    Fill(FillArgs),
    /// Run a thinning experiment and report error metrics per method.
    Validate(ValidateArgs),
    /// Build (or load) a calibration curve and print its knots.
    Calibrate(CalibrateArgs),
    /// Fill gaps with the inverse-distance-weighting baseline only.
    Idw(IdwArgs),
    /// Generate a synthetic test field.
    Synth(SynthArgs),
    /// Print the minimum search radius that covers every gap.
    Radius(RadiusArgs),
}

/// Method selector accepted by `--method` and `--methods`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MethodKind {
    Mpr,
    Bst,
    Sst,
    Idw,
}

fn parse_method(s: &str) -> Result<MethodKind, String> {
    match s {
        "mpr" => Ok(MethodKind::Mpr),
        "svmpr-bst" | "bst" => Ok(MethodKind::Bst),
        "svmpr-sst" | "sst" => Ok(MethodKind::Sst),
        "idw" => Ok(MethodKind::Idw),
        other => Err(format!(
            "unknown method `{other}` (expected mpr, svmpr-bst, svmpr-sst, or idw)"
        )),
    }
}

fn parse_policy(s: &str) -> Result<NoNeighborPolicy, String> {
    match s {
        "nearest" => Ok(NoNeighborPolicy::NearestFallback),
        "error" => Ok(NoNeighborPolicy::Error),
        other => Err(format!(
            "unknown policy `{other}` (expected nearest or error)"
        )),
    }
}

fn parse_init(s: &str) -> Result<InitKind, String> {
    match s {
        "random" => Ok(InitKind::Random),
        "block-mean" => Ok(InitKind::BlockMean),
        other => Err(format!(
            "unknown init `{other}` (expected random or block-mean)"
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InitKind {
    Random,
    BlockMean,
}

/// Model parameters shared by every simulation method.
#[derive(Args)]
struct ModelArgs {
    /// Modification parameter q of the spin interaction.
    #[arg(long, default_value_t = 0.5)]
    q: f64,

    /// Coupling constant J.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
}

impl ModelArgs {
    fn params(&self) -> MprParams {
        MprParams {
            coupling: self.coupling,
            modification: self.q,
        }
    }
}

/// Simulation schedule flags.
#[derive(Args)]
struct SimArgs {
    /// Energies in the equilibrium-detection fit window.
    #[arg(long, default_value_t = 20)]
    nfit: usize,

    /// Sweeps between equilibrium checks.
    #[arg(long, default_value_t = 5)]
    nf: usize,

    /// Upper bound on equilibration sweeps.
    #[arg(long, default_value_t = 500)]
    max_sweeps: usize,

    /// Averaging sweeps after equilibration.
    #[arg(long, default_value_t = 100)]
    mavg: usize,

    /// Master seed for all randomness of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Initialization of the free sites (default depends on the method).
    #[arg(long, value_parser = parse_init)]
    init: Option<InitKind>,
}

impl SimArgs {
    fn config(&self) -> SimulationConfig {
        SimulationConfig {
            n_fit: self.nfit,
            n_f: self.nf,
            max_sweeps: self.max_sweeps,
            m_avg: self.mavg,
            seed: self.seed,
            ..Default::default()
        }
    }

    fn init_strategy(&self, block_size: usize) -> Option<InitStrategy> {
        self.init.map(|kind| match kind {
            InitKind::Random => InitStrategy::Random,
            InitKind::BlockMean => InitStrategy::BlockMean { block_size },
        })
    }
}

/// Method-shape flags: block geometry, smoothing, and the IDW baseline.
#[derive(Args)]
struct MethodShapeArgs {
    /// Block side length for the block- and site-specific variants.
    #[arg(long, default_value_t = 32)]
    lb: usize,

    /// Smoothing radius of the site-specific variant (default: lb / 4).
    #[arg(long)]
    rs: Option<f64>,

    /// Smoothing passes of the site-specific variant.
    #[arg(long, default_value_t = 5)]
    ns: usize,

    /// IDW distance power.
    #[arg(long, default_value_t = 2.0)]
    beta: f64,

    /// IDW search radius (default: minimum full-coverage radius).
    #[arg(long)]
    radius: Option<f64>,

    /// IDW behavior when a search disc holds no samples.
    #[arg(long, default_value = "nearest", value_parser = parse_policy)]
    idw_policy: NoNeighborPolicy,
}

impl MethodShapeArgs {
    fn smooth_radius(&self) -> f64 {
        self.rs.unwrap_or_else(|| default_smooth_radius(self.lb))
    }

    fn idw_config(&self) -> IdwConfig {
        IdwConfig {
            power: self.beta,
            radius: self.radius,
            policy: self.idw_policy,
        }
    }

    fn to_fill_method(&self, kind: MethodKind) -> FillMethod {
        match kind {
            MethodKind::Mpr => FillMethod::Mpr,
            MethodKind::Bst => FillMethod::SvMprBst {
                block_size: self.lb,
            },
            MethodKind::Sst => FillMethod::SvMprSst {
                block_size: self.lb,
                radius: self.smooth_radius(),
                passes: self.ns,
            },
            MethodKind::Idw => FillMethod::Idw(self.idw_config()),
        }
    }
}

/// Calibration flags.
#[derive(Args)]
struct CalArgs {
    /// Side length of the reference lattice.
    #[arg(long, default_value_t = 128)]
    cal_size: usize,

    /// Equilibration sweeps per knot.
    #[arg(long, default_value_t = 200)]
    cal_equil: usize,

    /// Averaging sweeps per knot.
    #[arg(long, default_value_t = 200)]
    cal_avg: usize,

    /// Calibration seed (independent of the run seed).
    #[arg(long, default_value_t = 1)]
    cal_seed: u64,

    /// Lowest knot temperature.
    #[arg(long, default_value_t = 1e-4)]
    t_min: f64,

    /// Highest knot temperature.
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,

    /// Number of log-spaced temperature knots.
    #[arg(long, default_value_t = 48)]
    knots: usize,

    /// Curve cache directory (default: $MPRFILL_CACHE_DIR, then
    /// .mprfill-cache).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl CalArgs {
    fn resolve_cache_dir(&self) -> PathBuf {
        if let Some(dir) = &self.cache_dir {
            return dir.clone();
        }
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            return PathBuf::from(dir);
        }
        PathBuf::from(".mprfill-cache")
    }

    fn config(&self, params: MprParams) -> CalibrationConfig {
        CalibrationConfig {
            params,
            ref_size: self.cal_size,
            equil_sweeps: self.cal_equil,
            avg_sweeps: self.cal_avg,
            seed: self.cal_seed,
        }
    }

    fn t_grid(&self) -> Result<Vec<f64>, Error> {
        if self.knots < 2 || !(self.t_min > 0.0) || !(self.t_max > self.t_min) {
            return Err(Error::InvalidConfig(format!(
                "calibration grid needs at least 2 knots over 0 < t_min < t_max, \
                 got {} knots over [{}, {}]",
                self.knots, self.t_min, self.t_max
            )));
        }
        Ok(log_spaced_t_grid(self.t_min, self.t_max, self.knots))
    }

    fn echo(&self) {
        println!("config.cal_size {}", self.cal_size);
        println!("config.cal_equil {}", self.cal_equil);
        println!("config.cal_avg {}", self.cal_avg);
        println!("config.cal_seed {}", self.cal_seed);
        println!("config.t_min {}", self.t_min);
        println!("config.t_max {}", self.t_max);
        println!("config.knots {}", self.knots);
        println!("config.cache_dir {}", self.resolve_cache_dir().display());
    }
}

#[derive(Args)]
struct FillArgs {
    /// Method: mpr, svmpr-bst (bst), svmpr-sst (sst), or idw.
    #[arg(long, default_value = "mpr", value_parser = parse_method)]
    method: MethodKind,

    #[command(flatten)]
    shape: MethodShapeArgs,

    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    sim: SimArgs,

    #[command(flatten)]
    cal: CalArgs,

    /// Also write the temperature field used by the simulation.
    #[arg(long)]
    temp_map: Option<PathBuf>,

    /// Also render the filled grid as a PPM heatmap.
    #[arg(long)]
    heatmap: Option<PathBuf>,

    /// Clip the heatmap scale at this upper percentile.
    #[arg(long)]
    clip: Option<f64>,

    /// Input raster.
    input: PathBuf,

    /// Output raster.
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Fraction of samples to hold out per realization.
    #[arg(long, default_value_t = 0.5)]
    p: f64,

    /// Number of thinning realizations.
    #[arg(long = "M", default_value_t = 100)]
    realizations: usize,

    /// Comma-separated method list, e.g. mpr,bst,sst.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "mpr",
        value_parser = parse_method
    )]
    methods: Vec<MethodKind>,

    #[command(flatten)]
    shape: MethodShapeArgs,

    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    sim: SimArgs,

    #[command(flatten)]
    cal: CalArgs,

    /// Also write the machine-readable records to a file.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Input raster (its sample sites are the experiment population).
    input: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    cal: CalArgs,

    /// Also copy the curve to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IdwArgs {
    /// Distance power.
    #[arg(long, default_value_t = 2.0)]
    beta: f64,

    /// Search radius (default: minimum full-coverage radius).
    #[arg(long)]
    radius: Option<f64>,

    /// Behavior when a search disc holds no samples.
    #[arg(long, default_value = "nearest", value_parser = parse_policy)]
    policy: NoNeighborPolicy,

    input: PathBuf,
    output: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Side length of a square field.
    #[arg(long, default_value_t = 256)]
    size: usize,

    /// Width override.
    #[arg(long)]
    width: Option<usize>,

    /// Height override.
    #[arg(long)]
    height: Option<usize>,

    /// Layout: uniform, or split (left/right halves with separate stats).
    #[arg(long, default_value = "uniform")]
    layout: String,

    /// Mean of the (left) regime.
    #[arg(long, default_value_t = 0.0)]
    mean: f64,

    /// Standard deviation of the (left) regime.
    #[arg(long, default_value_t = 1.0)]
    std: f64,

    /// Correlation length of the (left) regime, in cells.
    #[arg(long, default_value_t = 4)]
    corr: usize,

    /// Mean of the right regime (split layout; default: same as left).
    #[arg(long)]
    mean2: Option<f64>,

    /// Standard deviation of the right regime (split layout).
    #[arg(long)]
    std2: Option<f64>,

    /// Correlation length of the right regime (split layout).
    #[arg(long)]
    corr2: Option<usize>,

    /// Fraction of cells to leave as gaps (0 writes a complete field).
    #[arg(long, default_value_t = 0.0)]
    gaps: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    output: PathBuf,
}

#[derive(Args)]
struct RadiusArgs {
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: INVALID_CONFIG: cannot build thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Fill(args) => run_fill(args),
        Command::Validate(args) => run_validate(args),
        Command::Calibrate(args) => run_calibrate(args),
        Command::Idw(args) => run_idw(args),
        Command::Synth(args) => run_synth(args),
        Command::Radius(args) => run_radius(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.class());
            ExitCode::FAILURE
        }
    }
}

fn method_name(kind: MethodKind) -> &'static str {
    match kind {
        MethodKind::Mpr => "mpr",
        MethodKind::Bst => "svmpr-bst",
        MethodKind::Sst => "svmpr-sst",
        MethodKind::Idw => "idw",
    }
}

/// Resolve the calibration curve for a simulation method, skipping the
/// build when the grid is degenerate (constant samples never consult it).
fn resolve_curve(
    grid: &GridField,
    model: &ModelArgs,
    cal: &CalArgs,
) -> Result<Option<(mprfill_core::calibration::CalibrationCurve, bool, PathBuf)>, Error> {
    match TransformParams::from_samples(grid) {
        Err(Error::DegenerateRange { .. }) => return Ok(None),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let config = cal.config(model.params());
    let t_grid = cal.t_grid()?;
    let dir = cal.resolve_cache_dir();
    let (curve, cached) = load_or_build(&dir, &config, &t_grid)?;
    let path = dir.join(mprfill_core::calibration::cache_file_name(&config, &t_grid));
    Ok(Some((curve, cached, path)))
}

fn echo_model(model: &ModelArgs) {
    println!("config.q {}", model.q);
    println!("config.coupling {}", model.coupling);
}

fn echo_sim(sim: &SimArgs) {
    println!("config.nfit {}", sim.nfit);
    println!("config.nf {}", sim.nf);
    println!("config.max_sweeps {}", sim.max_sweeps);
    println!("config.mavg {}", sim.mavg);
    println!("config.seed {}", sim.seed);
}

fn echo_method_shape(kind: MethodKind, shape: &MethodShapeArgs) {
    match kind {
        MethodKind::Mpr => {}
        MethodKind::Bst => println!("config.lb {}", shape.lb),
        MethodKind::Sst => {
            println!("config.lb {}", shape.lb);
            println!("config.rs {}", shape.smooth_radius());
            println!("config.ns {}", shape.ns);
        }
        MethodKind::Idw => {
            println!("config.beta {}", shape.beta);
            match shape.radius {
                Some(r) => println!("config.radius {r}"),
                None => println!("config.radius auto"),
            }
            let policy = match shape.idw_policy {
                NoNeighborPolicy::NearestFallback => "nearest",
                NoNeighborPolicy::Error => "error",
            };
            println!("config.idw_policy {policy}");
        }
    }
}

fn run_fill(args: FillArgs) -> Result<(), Error> {
    let start = Instant::now();
    let grid = load_raster(&args.input)?;
    let needs_curve = args.method != MethodKind::Idw;
    let curve = if needs_curve {
        resolve_curve(&grid, &args.model, &args.cal)?
    } else {
        None
    };

    println!("config.command fill");
    println!("config.method {}", method_name(args.method));
    println!("config.input {}", args.input.display());
    println!("config.output {}", args.output.display());
    echo_method_shape(args.method, &args.shape);
    if needs_curve {
        echo_model(&args.model);
        echo_sim(&args.sim);
        args.cal.echo();
    }
    if let Some((_, cached, path)) = &curve {
        println!("config.calibration {}", path.display());
        println!("config.calibration_cached {cached}");
    }

    let mut request = FillRequest::new(
        args.shape.to_fill_method(args.method),
        curve.as_ref().map(|(c, _, _)| c),
    );
    request.params = args.model.params();
    request.sim = args.sim.config();
    request.init = args.sim.init_strategy(args.shape.lb);
    let report = fill_grid(&grid, &request)?;

    write_raster(&report.filled, &args.output)?;
    if let Some(path) = &args.temp_map {
        match &report.temperature {
            Some(temps) => write_temperature_raster(temps, path)?,
            None => println!("note no temperature field for this method"),
        }
    }
    if let Some(path) = &args.heatmap {
        emit_heatmap(
            &report.filled,
            path,
            &HeatmapOptions {
                clip_percentile: args.clip,
            },
        )?;
    }

    println!("result.filled_sites {}", grid.missing_count());
    if let Some(est) = &report.estimate {
        println!("result.temperature {}", est.value);
        println!("result.temperature_clamped {}", est.clamped);
    }
    if let Some(temps) = &report.temperature {
        println!("result.temperature_min {}", temps.min());
        println!("result.temperature_max {}", temps.max());
    }
    if let Some(stats) = &report.block_stats {
        println!("result.blocks {}", stats.temperatures.len());
        println!(
            "result.blocks_without_samples {}",
            stats.fallback.iter().filter(|&&f| f).count()
        );
    }
    if let Some(sim) = &report.sim {
        println!("result.sweeps {}", sim.sweeps_to_equilibrium);
        println!("result.equilibrated {}", sim.equilibrated);
        println!("result.acceptance {}", sim.mean_acceptance);
        if let Some(e) = sim.mean_equilibrium_energy {
            println!("result.mean_energy {e}");
        }
    }
    if let Some(r) = report.idw_radius {
        println!("result.radius {r}");
    }
    if let Some(n) = report.idw_fallbacks {
        println!("result.fallbacks {n}");
    }
    println!("result.seconds {}", start.elapsed().as_secs_f64());
    Ok(())
}

fn run_validate(args: ValidateArgs) -> Result<(), Error> {
    let grid = load_raster(&args.input)?;
    let needs_curve = args.methods.iter().any(|&m| m != MethodKind::Idw);
    let curve = if needs_curve {
        resolve_curve(&grid, &args.model, &args.cal)?
    } else {
        None
    };

    println!("config.command validate");
    println!("config.input {}", args.input.display());
    println!("config.p {}", args.p);
    println!("config.realizations {}", args.realizations);
    let names: Vec<&str> = args.methods.iter().map(|&m| method_name(m)).collect();
    println!("config.methods {}", names.join(","));
    echo_model(&args.model);
    echo_sim(&args.sim);
    if needs_curve {
        args.cal.echo();
    }
    if let Some((_, cached, path)) = &curve {
        println!("config.calibration {}", path.display());
        println!("config.calibration_cached {cached}");
    }

    let methods: Vec<FillMethod> = args
        .methods
        .iter()
        .map(|&m| args.shape.to_fill_method(m))
        .collect();
    let mut spec = CompareSpec::new(
        ThinningSpec::new(args.p, args.realizations, args.sim.seed),
        methods,
        curve.as_ref().map(|(c, _, _)| c),
    );
    spec.params = args.model.params();
    spec.sim = args.sim.config();
    let report = compare_methods(&grid, &spec)?;

    print!("{}", report.records());
    println!();
    print!("{}", report.table());
    if let Some(path) = &args.report {
        std::fs::write(path, report.records()).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

fn run_calibrate(args: CalibrateArgs) -> Result<(), Error> {
    let start = Instant::now();
    println!("config.command calibrate");
    echo_model(&args.model);
    args.cal.echo();

    let config = args.cal.config(args.model.params());
    let t_grid = args.cal.t_grid()?;
    let dir = args.cal.resolve_cache_dir();
    let (curve, cached) = load_or_build(&dir, &config, &t_grid)?;
    let path = dir.join(mprfill_core::calibration::cache_file_name(&config, &t_grid));
    println!("result.path {}", path.display());
    println!("result.cached {cached}");
    println!("result.seconds {}", start.elapsed().as_secs_f64());
    println!("knots {}", curve.temperatures().len());
    for (i, (&t, &e)) in curve
        .temperatures()
        .iter()
        .zip(curve.energies())
        .enumerate()
    {
        match curve.stderr() {
            Some(se) => println!("knot {t} {e} {}", se[i]),
            None => println!("knot {t} {e}"),
        }
    }
    if let Some(out) = &args.out {
        write_calibration(&curve, out)?;
    }
    Ok(())
}

fn run_idw(args: IdwArgs) -> Result<(), Error> {
    let start = Instant::now();
    let grid = load_raster(&args.input)?;
    println!("config.command idw");
    println!("config.input {}", args.input.display());
    println!("config.output {}", args.output.display());
    println!("config.beta {}", args.beta);
    match args.radius {
        Some(r) => println!("config.radius {r}"),
        None => println!("config.radius auto"),
    }
    let config = IdwConfig {
        power: args.beta,
        radius: args.radius,
        policy: args.policy,
    };
    let request = FillRequest::new(FillMethod::Idw(config), None);
    let report = fill_grid(&grid, &request)?;
    write_raster(&report.filled, &args.output)?;
    println!("result.filled_sites {}", grid.missing_count());
    if let Some(r) = report.idw_radius {
        println!("result.radius {r}");
    }
    if let Some(n) = report.idw_fallbacks {
        println!("result.fallbacks {n}");
    }
    println!("result.seconds {}", start.elapsed().as_secs_f64());
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<(), Error> {
    let width = args.width.unwrap_or(args.size);
    let height = args.height.unwrap_or(args.size);
    let left = RegimeSpec {
        mean: args.mean,
        std_dev: args.std,
        corr_len: args.corr,
    };
    let layout = match args.layout.as_str() {
        "uniform" => RegimeLayout::Uniform(left),
        "split" => RegimeLayout::SplitVertical {
            left,
            right: RegimeSpec {
                mean: args.mean2.unwrap_or(left.mean),
                std_dev: args.std2.unwrap_or(left.std_dev),
                corr_len: args.corr2.unwrap_or(left.corr_len),
            },
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown layout `{other}` (expected uniform or split)"
            )))
        }
    };
    if !(0.0..1.0).contains(&args.gaps) {
        return Err(Error::InvalidConfig(format!(
            "gap fraction must lie in [0, 1), got {}",
            args.gaps
        )));
    }
    println!("config.command synth");
    println!("config.size {width}x{height}");
    println!("config.layout {}", args.layout);
    println!("config.gaps {}", args.gaps);
    println!("config.seed {}", args.seed);
    println!("config.output {}", args.output.display());
    let field = generate_synthetic_field(&SyntheticFieldSpec {
        width,
        height,
        layout,
        seed: args.seed,
    });
    let field = if args.gaps > 0.0 {
        let spec = ThinningSpec::new(args.gaps, 1, args.seed);
        let mut thinnings = make_thinnings(&field, &spec)?;
        thinnings.swap_remove(0).grid
    } else {
        field
    };
    write_raster(&field, &args.output)
}

fn run_radius(args: RadiusArgs) -> Result<(), Error> {
    let grid = load_raster(&args.input)?;
    println!("config.command radius");
    println!("config.input {}", args.input.display());
    println!("result.radius {}", min_full_coverage_radius(&grid)?);
    Ok(())
}

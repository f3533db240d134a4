//! End-to-end gap filling: dispatches a grid to one of the four methods
//! (uniform-temperature MPR, block-specific BST, site-specific SST, or the
//! IDW baseline) and collects per-run diagnostics.

use crate::calibration::{estimate_temperature, CalibrationCurve, TemperatureEstimate};
use crate::error::{Error, Result};
use crate::grid::{to_angles, BlockDecomposition, GridField, TransformParams};
use crate::idw::{idw_predict, min_full_coverage_radius, IdwParams, NoNeighborPolicy};
use crate::model::{sample_specific_energy, MprParams};
use crate::sim::{
    run_conditional_simulation, InitStrategy, SimDiagnostics, SimulationConfig, EnergyTrace,
};
use crate::temperature::{
    assign_block_temperatures, block_sample_energies, expand_to_sites, smooth_temperatures,
    BlockTemperatureStats, TemperatureField,
};

pub const DEFAULT_BLOCK_SIZE: usize = 32;
pub const DEFAULT_SMOOTH_PASSES: usize = 5;

/// Default smoothing radius: a quarter of the block size.
pub fn default_smooth_radius(block_size: usize) -> f64 {
    block_size as f64 / 4.0
}

/// IDW configuration at the pipeline level; `radius: None` resolves to the
/// minimum full-coverage radius of the input grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwConfig {
    pub power: f64,
    pub radius: Option<f64>,
    pub policy: NoNeighborPolicy,
}

impl Default for IdwConfig {
    fn default() -> Self {
        IdwConfig {
            power: 2.0,
            radius: None,
            policy: NoNeighborPolicy::NearestFallback,
        }
    }
}

/// Gap-filling method selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FillMethod {
    /// Single grid-wide temperature from the global sample energy.
    Mpr,
    /// Block-specific temperatures.
    SvMprBst { block_size: usize },
    /// Block-specific temperatures smoothed to a per-site field.
    SvMprSst {
        block_size: usize,
        radius: f64,
        passes: usize,
    },
    /// Inverse-distance-weighting baseline.
    Idw(IdwConfig),
}

impl std::fmt::Display for FillMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FillMethod::Mpr => write!(f, "mpr"),
            FillMethod::SvMprBst { block_size } => write!(f, "svmpr-bst(lb={block_size})"),
            FillMethod::SvMprSst {
                block_size,
                radius,
                passes,
            } => write!(f, "svmpr-sst(lb={block_size},rs={radius},ns={passes})"),
            FillMethod::Idw(c) => match c.radius {
                Some(r) => write!(f, "idw(beta={},R={r})", c.power),
                None => write!(f, "idw(beta={},R=auto)", c.power),
            },
        }
    }
}

/// One fill request: method, model parameters, calibration curve (required
/// for the simulation methods) and simulation schedule.
#[derive(Debug, Clone)]
pub struct FillRequest<'a> {
    pub method: FillMethod,
    pub params: MprParams,
    pub curve: Option<&'a CalibrationCurve>,
    pub sim: SimulationConfig,
    /// Initialization override; `None` picks the method default (random
    /// for MPR, block means for BST/SST).
    pub init: Option<InitStrategy>,
}

impl<'a> FillRequest<'a> {
    pub fn new(method: FillMethod, curve: Option<&'a CalibrationCurve>) -> Self {
        FillRequest {
            method,
            params: MprParams::default(),
            curve,
            sim: SimulationConfig::default(),
            init: None,
        }
    }
}

/// Outcome of a fill: the completed grid plus whatever diagnostics the
/// chosen method produces.
#[derive(Debug, Clone)]
pub struct FillReport {
    pub filled: GridField,
    /// Temperature field used by the simulation methods.
    pub temperature: Option<TemperatureField>,
    /// Uniform-temperature estimate (MPR only).
    pub estimate: Option<TemperatureEstimate>,
    /// Per-block statistics (BST and SST).
    pub block_stats: Option<BlockTemperatureStats>,
    pub sim: Option<SimDiagnostics>,
    pub trace: Option<EnergyTrace>,
    /// Search radius actually used by IDW.
    pub idw_radius: Option<f64>,
    pub idw_fallbacks: Option<usize>,
}

impl FillReport {
    fn bare(filled: GridField) -> Self {
        FillReport {
            filled,
            temperature: None,
            estimate: None,
            block_stats: None,
            sim: None,
            trace: None,
            idw_radius: None,
            idw_fallbacks: None,
        }
    }
}

fn required_curve<'a>(request: &FillRequest<'a>) -> Result<&'a CalibrationCurve> {
    request.curve.ok_or_else(|| {
        Error::InvalidConfig(format!(
            "method {} needs a calibration curve",
            request.method
        ))
    })
}

/// Fill the gaps of `grid` with the requested method.
pub fn fill_grid(grid: &GridField, request: &FillRequest) -> Result<FillReport> {
    request.params.validate()?;
    if grid.sample_count() == 0 {
        return Err(Error::NoSamples);
    }
    if grid.missing_count() == 0 {
        return Ok(FillReport::bare(grid.clone()));
    }
    match request.method {
        FillMethod::Idw(config) => fill_idw(grid, config),
        FillMethod::Mpr => fill_mpr(grid, request),
        FillMethod::SvMprBst { block_size } => fill_sv(grid, request, block_size, None),
        FillMethod::SvMprSst {
            block_size,
            radius,
            passes,
        } => fill_sv(grid, request, block_size, Some((radius, passes))),
    }
}

fn fill_idw(grid: &GridField, config: IdwConfig) -> Result<FillReport> {
    let radius = match config.radius {
        Some(r) => r,
        None => min_full_coverage_radius(grid)?,
    };
    let params = IdwParams::new(config.power, radius, config.policy)?;
    let out = idw_predict(grid, &params)?;
    let mut report = FillReport::bare(out.filled);
    report.idw_radius = Some(radius);
    report.idw_fallbacks = Some(out.fallback_count);
    Ok(report)
}

/// Run the conditional simulation with the degenerate-range short circuit:
/// constant samples skip temperature inference entirely.
fn run_sim(
    grid: &GridField,
    temps: TemperatureField,
    request: &FillRequest,
    default_init: InitStrategy,
) -> Result<FillReport> {
    let mut sim = request.sim;
    sim.init = request.init.unwrap_or(default_init);
    let out = run_conditional_simulation(grid, &temps, &request.params, &sim)?;
    let mut report = FillReport::bare(out.filled);
    report.temperature = Some(temps);
    report.sim = Some(out.diagnostics);
    report.trace = Some(out.trace);
    Ok(report)
}

fn fill_mpr(grid: &GridField, request: &FillRequest) -> Result<FillReport> {
    let transform = match TransformParams::from_samples(grid) {
        Ok(t) => t,
        Err(Error::DegenerateRange { .. }) => {
            // Constant samples: the simulation short-circuits to a constant
            // fill and never reads the temperatures.
            let temps = TemperatureField::uniform(grid.width(), grid.height(), 0.0)?;
            return run_sim(grid, temps, request, InitStrategy::Random);
        }
        Err(e) => return Err(e),
    };
    let curve = required_curve(request)?;
    let angles = to_angles(grid, &transform);
    let e_s = sample_specific_energy(&angles, &request.params)?;
    let estimate = estimate_temperature(e_s, curve);
    let temps = TemperatureField::uniform(grid.width(), grid.height(), estimate.value)?;
    let mut report = run_sim(grid, temps, request, InitStrategy::Random)?;
    report.estimate = Some(estimate);
    Ok(report)
}

fn fill_sv(
    grid: &GridField,
    request: &FillRequest,
    block_size: usize,
    smoothing: Option<(f64, usize)>,
) -> Result<FillReport> {
    let transform = match TransformParams::from_samples(grid) {
        Ok(t) => t,
        Err(Error::DegenerateRange { .. }) => {
            let temps = TemperatureField::uniform(grid.width(), grid.height(), 0.0)?;
            return run_sim(grid, temps, request, InitStrategy::BlockMean { block_size });
        }
        Err(e) => return Err(e),
    };
    let curve = required_curve(request)?;
    let angles = to_angles(grid, &transform);
    let decomposition = BlockDecomposition::new(grid.lattice(), block_size)?;
    let mut stats = block_sample_energies(&angles, &decomposition, &request.params)?;
    assign_block_temperatures(&mut stats, curve)?;
    let mut temps = expand_to_sites(&stats, &decomposition)?;
    if let Some((radius, passes)) = smoothing {
        temps = smooth_temperatures(&temps, radius, passes)?;
    }
    let mut report = run_sim(
        grid,
        temps,
        request,
        InitStrategy::BlockMean { block_size },
    )?;
    report.block_stats = Some(stats);
    Ok(report)
}

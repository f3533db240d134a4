//! Validation harness: thinning experiments, error metrics, method
//! comparison over many realizations, and synthetic heterogeneous fields.

use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::calibration::CalibrationCurve;
use crate::error::{Error, Result};
use crate::grid::{CellKind, GridField};
use crate::model::MprParams;
use crate::pipeline::{fill_grid, FillMethod, FillRequest};
use crate::rng::derive_seed;
use crate::sim::SimulationConfig;

/// Thinning-experiment parameters: remove a fraction `p` of the grid in
/// each of `realizations` independent draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinningSpec {
    /// Missing fraction in (0, 1); exactly `round(p * width * height)`
    /// sites are removed per realization.
    pub p: f64,
    /// Number of independent realizations.
    pub realizations: usize,
    /// Master seed; every mask and simulation seed derives from it.
    pub seed: u64,
}

impl ThinningSpec {
    pub fn new(p: f64, realizations: usize, seed: u64) -> Self {
        ThinningSpec {
            p,
            realizations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "thinning fraction must lie in (0, 1), got {}",
                self.p
            )));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidConfig(
                "at least one realization is required".into(),
            ));
        }
        Ok(())
    }

    /// Number of sites removed from a `width x height` grid.
    pub fn removal_count(&self, width: usize, height: usize) -> usize {
        (self.p * (width * height) as f64).round() as usize
    }
}

impl Default for ThinningSpec {
    fn default() -> Self {
        ThinningSpec {
            p: 0.5,
            realizations: 100,
            seed: 0,
        }
    }
}

/// One thinning realization: the grid with extra gaps punched in, and the
/// ground truth at the removed sites.
#[derive(Debug, Clone)]
pub struct Thinning {
    pub grid: GridField,
    /// `(site, true value)` pairs in ascending site order.
    pub held_out: Vec<(usize, f64)>,
}

/// Seed of the mask-drawing stream for realization `r`.
fn mask_seed(master: u64, r: usize) -> u64 {
    derive_seed(derive_seed(master, 0), r as u64)
}

/// Seed handed to simulations for realization `r`. All methods share it so
/// comparisons are paired per realization.
pub fn realization_seed(master: u64, r: usize) -> u64 {
    derive_seed(derive_seed(master, 1), r as u64)
}

/// Draw the thinning realizations for `spec`. Only sample sites of `grid`
/// are eligible for removal; pre-existing gaps stay gaps.
pub fn make_thinnings(grid: &GridField, spec: &ThinningSpec) -> Result<Vec<Thinning>> {
    spec.validate()?;
    let samples: Vec<usize> = grid.sample_sites().collect();
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let removed = spec.removal_count(grid.width(), grid.height());
    if removed >= samples.len() {
        return Err(Error::InvalidConfig(format!(
            "removing {removed} of {} samples would leave none",
            samples.len()
        )));
    }
    let mut out = Vec::with_capacity(spec.realizations);
    for r in 0..spec.realizations {
        let mut rng = ChaCha8Rng::seed_from_u64(mask_seed(spec.seed, r));
        let mut picks: Vec<usize> = sample_indices(&mut rng, samples.len(), removed).into_vec();
        picks.sort_unstable();
        let mut values = grid.raw_values().to_vec();
        let mut mask = grid.mask().to_vec();
        let mut held_out = Vec::with_capacity(removed);
        for &k in &picks {
            let site = samples[k];
            held_out.push((site, values[site]));
            mask[site] = CellKind::Missing;
        }
        for &(site, _) in &held_out {
            values[site] = f64::NAN;
        }
        out.push(Thinning {
            grid: GridField::new(grid.width(), grid.height(), values, mask),
            held_out,
        });
    }
    Ok(out)
}

/// Error metrics of a single realization, in data units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    /// Average absolute error over the held-out sites.
    pub aae: f64,
    /// Root average squared error over the held-out sites.
    pub rase: f64,
}

/// Score a prediction against held-out truth. Every held-out site must be
/// filled in `predicted`.
pub fn score(predicted: &GridField, held_out: &[(usize, f64)]) -> Result<ErrorStats> {
    if held_out.is_empty() {
        return Err(Error::InvalidConfig("no held-out sites to score".into()));
    }
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    for &(site, truth) in held_out {
        if site >= predicted.len() || !predicted.is_sample(site) {
            return Err(Error::MissingPrediction { site });
        }
        let err = truth - predicted.value(site);
        abs_sum += err.abs();
        sq_sum += err * err;
    }
    let n = held_out.len() as f64;
    Ok(ErrorStats {
        aae: abs_sum / n,
        rase: (sq_sum / n).sqrt(),
    })
}

/// Comparison setup: which methods to run, over which thinning draws, with
/// which shared model parameters.
#[derive(Debug, Clone)]
pub struct CompareSpec<'a> {
    pub thinning: ThinningSpec,
    pub methods: Vec<FillMethod>,
    pub params: MprParams,
    /// Calibration curve shared by the simulation methods.
    pub curve: Option<&'a CalibrationCurve>,
    /// Simulation schedule template; its seed is replaced per realization.
    pub sim: SimulationConfig,
}

impl<'a> CompareSpec<'a> {
    pub fn new(
        thinning: ThinningSpec,
        methods: Vec<FillMethod>,
        curve: Option<&'a CalibrationCurve>,
    ) -> Self {
        CompareSpec {
            thinning,
            methods,
            params: MprParams::default(),
            curve,
            sim: SimulationConfig::default(),
        }
    }
}

/// Per-method results across all realizations.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: FillMethod,
    pub label: String,
    /// Per-realization AAE; `None` where the run failed.
    pub aae: Vec<Option<f64>>,
    /// Per-realization RASE; `None` where the run failed.
    pub rase: Vec<Option<f64>>,
    /// Per-realization wall time in seconds (recorded even on failure).
    pub seconds: Vec<f64>,
    /// `(realization index, error message)` for every failed run.
    pub failures: Vec<(usize, String)>,
    /// Mean AAE over successful realizations.
    pub maae: Option<f64>,
    /// Mean RASE over successful realizations.
    pub mrase: Option<f64>,
    pub mean_seconds: f64,
    /// Mean-error ratios against the reference method, computed over the
    /// realizations where both runs succeeded.
    pub aae_ratio: Option<f64>,
    pub rase_ratio: Option<f64>,
}

/// Full comparison outcome.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub width: usize,
    pub height: usize,
    pub p: f64,
    pub realizations: usize,
    pub seed: u64,
    pub methods: Vec<MethodSummary>,
    /// Index into `methods` of the ratio denominator (the first plain MPR
    /// entry), if any.
    pub reference: Option<usize>,
    /// Total wall time of the whole comparison, in seconds.
    pub total_seconds: f64,
}

fn mean_over(values: &[Option<f64>]) -> Option<f64> {
    let hits: Vec<f64> = values.iter().copied().flatten().collect();
    if hits.is_empty() {
        None
    } else {
        Some(hits.iter().sum::<f64>() / hits.len() as f64)
    }
}

/// Ratio of means over the realizations where both methods succeeded.
fn paired_ratio(num: &[Option<f64>], den: &[Option<f64>]) -> Option<f64> {
    let mut num_sum = 0.0;
    let mut den_sum = 0.0;
    let mut count = 0usize;
    for (a, b) in num.iter().zip(den) {
        if let (Some(a), Some(b)) = (a, b) {
            num_sum += a;
            den_sum += b;
            count += 1;
        }
    }
    if count == 0 || den_sum == 0.0 {
        None
    } else {
        Some(num_sum / den_sum)
    }
}

/// Run every method on every thinning realization and aggregate the error
/// metrics. Realization failures are recorded per cell; the comparison
/// keeps going.
pub fn compare_methods(grid: &GridField, spec: &CompareSpec) -> Result<ValidationReport> {
    if spec.methods.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one method is required".into(),
        ));
    }
    spec.params.validate()?;
    spec.sim.validate()?;
    let start = Instant::now();
    let thinnings = make_thinnings(grid, &spec.thinning)?;
    let m = spec.thinning.realizations;
    let mut summaries: Vec<MethodSummary> = spec
        .methods
        .iter()
        .map(|&method| MethodSummary {
            method,
            label: method.to_string(),
            aae: Vec::with_capacity(m),
            rase: Vec::with_capacity(m),
            seconds: Vec::with_capacity(m),
            failures: Vec::new(),
            maae: None,
            mrase: None,
            mean_seconds: 0.0,
            aae_ratio: None,
            rase_ratio: None,
        })
        .collect();

    // Realization-major order so every method sees the same mask and the
    // same simulation seed within one realization.
    for (r, thinning) in thinnings.iter().enumerate() {
        let run_seed = realization_seed(spec.thinning.seed, r);
        for (mi, &method) in spec.methods.iter().enumerate() {
            let mut request = FillRequest::new(method, spec.curve);
            request.params = spec.params;
            request.sim = spec.sim;
            request.sim.seed = run_seed;
            let t0 = Instant::now();
            let outcome = fill_grid(&thinning.grid, &request)
                .and_then(|report| score(&report.filled, &thinning.held_out));
            let elapsed = t0.elapsed().as_secs_f64();
            let summary = &mut summaries[mi];
            summary.seconds.push(elapsed);
            match outcome {
                Ok(stats) => {
                    summary.aae.push(Some(stats.aae));
                    summary.rase.push(Some(stats.rase));
                }
                Err(e) => {
                    summary.aae.push(None);
                    summary.rase.push(None);
                    summary.failures.push((r, e.to_string()));
                }
            }
        }
    }

    let reference = spec.methods.iter().position(|m| *m == FillMethod::Mpr);
    for summary in &mut summaries {
        summary.maae = mean_over(&summary.aae);
        summary.mrase = mean_over(&summary.rase);
        summary.mean_seconds = summary.seconds.iter().sum::<f64>() / m as f64;
    }
    if let Some(ri) = reference {
        let ref_aae = summaries[ri].aae.clone();
        let ref_rase = summaries[ri].rase.clone();
        for summary in &mut summaries {
            summary.aae_ratio = paired_ratio(&summary.aae, &ref_aae);
            summary.rase_ratio = paired_ratio(&summary.rase, &ref_rase);
        }
    }
    Ok(ValidationReport {
        width: grid.width(),
        height: grid.height(),
        p: spec.thinning.p,
        realizations: m,
        seed: spec.thinning.seed,
        methods: summaries,
        reference,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

impl ValidationReport {
    /// Machine-readable key/value records, one per line. Unavailable
    /// aggregates are omitted rather than written as placeholders.
    pub fn records(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("grid {}x{}\n", self.width, self.height));
        out.push_str(&format!("p {}\n", self.p));
        out.push_str(&format!("realizations {}\n", self.realizations));
        out.push_str(&format!("seed {}\n", self.seed));
        out.push_str(&format!("total_seconds {}\n", self.total_seconds));
        if let Some(ri) = self.reference {
            out.push_str(&format!("reference {ri}\n"));
        }
        out.push_str(&format!("methods {}\n", self.methods.len()));
        for (i, m) in self.methods.iter().enumerate() {
            out.push_str(&format!("method.{i}.label {}\n", m.label));
            let successes = m.aae.iter().filter(|v| v.is_some()).count();
            out.push_str(&format!("method.{i}.successes {successes}\n"));
            if let Some(v) = m.maae {
                out.push_str(&format!("method.{i}.maae {v}\n"));
            }
            if let Some(v) = m.mrase {
                out.push_str(&format!("method.{i}.mrase {v}\n"));
            }
            out.push_str(&format!("method.{i}.mean_seconds {}\n", m.mean_seconds));
            if let Some(v) = m.aae_ratio {
                out.push_str(&format!("method.{i}.aae_ratio {v}\n"));
            }
            if let Some(v) = m.rase_ratio {
                out.push_str(&format!("method.{i}.rase_ratio {v}\n"));
            }
            for (r, msg) in &m.failures {
                out.push_str(&format!("method.{i}.failure.{r} {msg}\n"));
            }
        }
        out
    }

    /// Human-readable summary table.
    pub fn table(&self) -> String {
        fn cell(v: Option<f64>) -> String {
            match v {
                Some(v) => format!("{v:.4}"),
                None => "-".into(),
            }
        }
        let mut out = format!(
            "grid {}x{}  p={}  M={}  seed={}\n",
            self.width, self.height, self.p, self.realizations, self.seed
        );
        out.push_str(&format!(
            "{:<28} {:>12} {:>12} {:>10} {:>10}\n",
            "method", "MAAE", "MRASE", "t[s]", "RASE/ref"
        ));
        for m in &self.methods {
            out.push_str(&format!(
                "{:<28} {:>12} {:>12} {:>10.3} {:>10}\n",
                m.label,
                cell(m.maae),
                cell(m.mrase),
                m.mean_seconds,
                cell(m.rase_ratio),
            ));
        }
        out
    }
}

/// Statistical description of one regime of a synthetic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSpec {
    pub mean: f64,
    pub std_dev: f64,
    /// Smoothing radius of the moving-average kernel, in cells; 0 leaves
    /// the noise uncorrelated.
    pub corr_len: usize,
}

/// Spatial arrangement of regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeLayout {
    /// One regime everywhere.
    Uniform(RegimeSpec),
    /// Left half / right half split along the vertical midline.
    SplitVertical { left: RegimeSpec, right: RegimeSpec },
    /// Square tiles alternating between two regimes in a checker pattern,
    /// giving tile-scale heterogeneity across the whole field.
    CheckerTiles {
        tile_size: usize,
        a: RegimeSpec,
        b: RegimeSpec,
    },
}

/// Synthetic-field request: a fully-sampled random field with piecewise
/// stationary statistics, deterministic per seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticFieldSpec {
    pub width: usize,
    pub height: usize,
    pub layout: RegimeLayout,
    pub seed: u64,
}

/// Box-smooth white noise with radius `r`, rescaled per site so the output
/// stays unit-variance. Uses a summed-area table, so cost is independent
/// of `r`.
fn smooth_unit_noise(noise: &[f64], width: usize, height: usize, r: usize) -> Vec<f64> {
    if r == 0 {
        return noise.to_vec();
    }
    // sat[(y + 1) * (width + 1) + (x + 1)] = sum of noise over [0..=x, 0..=y]
    let mut sat = vec![0.0f64; (width + 1) * (height + 1)];
    for y in 0..height {
        let mut row = 0.0;
        for x in 0..width {
            row += noise[y * width + x];
            sat[(y + 1) * (width + 1) + (x + 1)] = sat[y * (width + 1) + (x + 1)] + row;
        }
    }
    let rect = |x0: usize, y0: usize, x1: usize, y1: usize| {
        sat[y1 * (width + 1) + x1] + sat[y0 * (width + 1) + x0]
            - sat[y0 * (width + 1) + x1]
            - sat[y1 * (width + 1) + x0]
    };
    let mut out = vec![0.0f64; width * height];
    for y in 0..height {
        let y0 = y.saturating_sub(r);
        let y1 = (y + r + 1).min(height);
        for x in 0..width {
            let x0 = x.saturating_sub(r);
            let x1 = (x + r + 1).min(width);
            let count = ((x1 - x0) * (y1 - y0)) as f64;
            // Sum of k unit normals divided by sqrt(k) is again unit normal.
            out[y * width + x] = rect(x0, y0, x1, y1) / count.sqrt();
        }
    }
    out
}

/// Generate a fully-sampled synthetic field.
pub fn generate_synthetic_field(spec: &SyntheticFieldSpec) -> GridField {
    let n = spec.width * spec.height;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let regime_at = |site: usize| -> RegimeSpec {
        match spec.layout {
            RegimeLayout::Uniform(r) => r,
            RegimeLayout::SplitVertical { left, right } => {
                if site % spec.width < spec.width / 2 {
                    left
                } else {
                    right
                }
            }
            RegimeLayout::CheckerTiles { tile_size, a, b } => {
                let (x, y) = (site % spec.width, site / spec.width);
                if (x / tile_size + y / tile_size) % 2 == 0 {
                    a
                } else {
                    b
                }
            }
        }
    };
    // Smooth once per distinct correlation length, then blend per site.
    let mut lengths: Vec<usize> = match spec.layout {
        RegimeLayout::Uniform(r) => vec![r.corr_len],
        RegimeLayout::SplitVertical { left, right } => vec![left.corr_len, right.corr_len],
        RegimeLayout::CheckerTiles { a, b, .. } => vec![a.corr_len, b.corr_len],
    };
    lengths.sort_unstable();
    lengths.dedup();
    let smoothed: Vec<(usize, Vec<f64>)> = lengths
        .iter()
        .map(|&r| (r, smooth_unit_noise(&noise, spec.width, spec.height, r)))
        .collect();
    let field_for = |r: usize| -> &[f64] {
        &smoothed
            .iter()
            .find(|(len, _)| *len == r)
            .expect("smoothed field present for every regime length")
            .1
    };
    let values: Vec<f64> = (0..n)
        .map(|site| {
            let regime = regime_at(site);
            regime.mean + regime.std_dev * field_for(regime.corr_len)[site]
        })
        .collect();
    GridField::from_values(spec.width, spec.height, values)
}

//! Spatially-varying temperature inference: per-block sample energies,
//! block temperature assignment with a median fallback, expansion to a
//! per-site field, and disc-average smoothing for the site-specific
//! variant.

use rayon::prelude::*;

use crate::calibration::{estimate_temperature, CalibrationCurve};
use crate::error::{Error, Result};
use crate::grid::{AngleField, BlockDecomposition, Lattice};
use crate::model::{sample_bond_stats, BondEnergyStats, MprParams};
use crate::reduce::tree_sum;

/// How a temperature field was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureProvenance {
    /// Single global temperature.
    Uniform,
    /// Per-block temperatures expanded to sites (BST).
    BlockSpecific { block_size: usize },
    /// Smoothed block temperatures (SST). `block_size` is 0 when the
    /// smoothed source was not block-derived.
    SiteSpecific {
        block_size: usize,
        radius: f64,
        passes: usize,
    },
}

/// Per-site reduced temperature, non-negative and finite everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField {
    lattice: Lattice,
    values: Vec<f64>,
    provenance: TemperatureProvenance,
}

impl TemperatureField {
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<f64>,
        provenance: TemperatureProvenance,
    ) -> Result<Self> {
        assert_eq!(values.len(), width * height);
        for (site, &t) in values.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidTemperature { site, value: t });
            }
        }
        Ok(TemperatureField {
            lattice: Lattice::new(width, height),
            values,
            provenance,
        })
    }

    /// Constant field at temperature `t`.
    pub fn uniform(width: usize, height: usize, t: f64) -> Result<Self> {
        TemperatureField::new(
            width,
            height,
            vec![t; width * height],
            TemperatureProvenance::Uniform,
        )
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn value(&self, site: usize) -> f64 {
        self.values[site]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> TemperatureProvenance {
        self.provenance
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-block energy statistics and inferred temperatures.
///
/// Built in two stages: [`block_sample_energies`] fills the energy side,
/// [`assign_block_temperatures`] the temperature side.
#[derive(Debug, Clone)]
pub struct BlockTemperatureStats {
    /// Specific energy over intra-block sample-sample bonds; `None` when
    /// the block holds no such bond.
    pub energies: Vec<Option<f64>>,
    /// Intra-block sample-sample bond count per block.
    pub bond_counts: Vec<usize>,
    /// `true` for blocks that needed the median fallback (no bonds).
    pub fallback: Vec<bool>,
    /// Per-block inferred temperature; empty until assigned.
    pub temperatures: Vec<f64>,
    /// Clamp flag per block from the inverse curve lookup.
    pub clamped: Vec<bool>,
    /// Set when every block lacked bonds and the whole field fell back to
    /// the uniform global estimate.
    pub uniform_fallback: bool,
    /// Sample-bond statistics over the whole grid (cross-block bonds
    /// included), for the uniform fallback.
    global: BondEnergyStats,
}

/// Per-block specific energies over sample-sample bonds with both
/// endpoints in the same block; bonds straddling a block boundary count
/// toward neither block.
pub fn block_sample_energies(
    angles: &AngleField,
    decomposition: &BlockDecomposition,
    params: &MprParams,
) -> Result<BlockTemperatureStats> {
    if decomposition.lattice() != angles.lattice() {
        return Err(Error::InvalidConfig(format!(
            "block decomposition is for a {}x{} grid, angles are {}x{}",
            decomposition.lattice().width,
            decomposition.lattice().height,
            angles.lattice().width,
            angles.lattice().height
        )));
    }
    let lattice = angles.lattice();
    let w = lattice.width;
    let n_blocks = decomposition.block_count();
    // Per block: row-segment partial sums reduced by tree_sum, so a
    // single-block decomposition reproduces the global sample energy
    // bitwise.
    let per_block: Vec<(usize, f64)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let (x0, x1, y0, y1) = decomposition.block_bounds(b);
            let mut count = 0usize;
            let mut row_sums = Vec::with_capacity(y1 - y0);
            for y in y0..y1 {
                let mut sum = 0.0;
                for x in x0..x1 {
                    let s = y * w + x;
                    if !angles.is_fixed(s) {
                        continue;
                    }
                    let a = angles.angle(s);
                    if x + 1 < x1 && angles.is_fixed(s + 1) {
                        sum += params.bond_energy(a - angles.angle(s + 1));
                        count += 1;
                    }
                    if y + 1 < y1 && angles.is_fixed(s + w) {
                        sum += params.bond_energy(a - angles.angle(s + w));
                        count += 1;
                    }
                }
                row_sums.push(sum);
            }
            (count, tree_sum(&row_sums))
        })
        .collect();

    let mut energies = Vec::with_capacity(n_blocks);
    let mut bond_counts = Vec::with_capacity(n_blocks);
    let mut fallback = Vec::with_capacity(n_blocks);
    for (count, sum) in per_block {
        bond_counts.push(count);
        fallback.push(count == 0);
        energies.push(if count == 0 {
            None
        } else {
            Some(sum / count as f64)
        });
    }
    Ok(BlockTemperatureStats {
        energies,
        bond_counts,
        fallback,
        temperatures: Vec::new(),
        clamped: Vec::new(),
        uniform_fallback: false,
        global: sample_bond_stats(angles, params),
    })
}

/// Infer a temperature per block from the calibration curve.
///
/// Bond-free blocks receive the lower-median of the successfully inferred
/// block temperatures. When no block has any bonds, every block falls back
/// to the uniform global estimate; if the grid has no sample bonds at all,
/// this is [`Error::NoSampleBonds`].
pub fn assign_block_temperatures(
    stats: &mut BlockTemperatureStats,
    curve: &CalibrationCurve,
) -> Result<()> {
    let n = stats.energies.len();
    let mut temps = vec![f64::NAN; n];
    let mut clamped = vec![false; n];
    let mut available = Vec::new();
    for (b, e) in stats.energies.iter().enumerate() {
        if let Some(e_s) = e {
            let est = estimate_temperature(*e_s, curve);
            temps[b] = est.value;
            clamped[b] = est.clamped;
            available.push(est.value);
        }
    }
    if available.is_empty() {
        let e_s = stats.global.specific_energy().ok_or(Error::NoSampleBonds)?;
        let est = estimate_temperature(e_s, curve);
        temps.fill(est.value);
        clamped.fill(est.clamped);
        stats.uniform_fallback = true;
    } else {
        let median = lower_median(&available);
        for b in 0..n {
            if stats.fallback[b] {
                temps[b] = median;
            }
        }
    }
    stats.temperatures = temps;
    stats.clamped = clamped;
    Ok(())
}

/// Lower-median: for even counts, the smaller of the two middle values.
fn lower_median(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted[(sorted.len() - 1) / 2]
}

/// Expand per-block temperatures to a per-site step-function field.
pub fn expand_to_sites(
    stats: &BlockTemperatureStats,
    decomposition: &BlockDecomposition,
) -> Result<TemperatureField> {
    assert_eq!(
        stats.temperatures.len(),
        decomposition.block_count(),
        "temperatures not assigned"
    );
    let lattice = decomposition.lattice();
    let values: Vec<f64> = (0..lattice.len())
        .map(|s| stats.temperatures[decomposition.block_of(s)])
        .collect();
    TemperatureField::new(
        lattice.width,
        lattice.height,
        values,
        TemperatureProvenance::BlockSpecific {
            block_size: decomposition.block_size(),
        },
    )
}

/// Integer offsets within Euclidean distance `r` of the origin, row-major.
fn disc_offsets(r: f64) -> Vec<(isize, isize)> {
    let ri = r.floor() as isize;
    let r2 = r * r;
    let mut out = Vec::new();
    for dy in -ri..=ri {
        for dx in -ri..=ri {
            if (dx * dx + dy * dy) as f64 <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Smooth a temperature field by `n_s` passes of disc averaging with
/// radius `r_s` (center included, disc clipped at grid edges).
pub fn smooth_temperatures(
    field: &TemperatureField,
    r_s: f64,
    n_s: usize,
) -> Result<TemperatureField> {
    if !(r_s >= 1.0) || !r_s.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "smoothing radius must be >= 1, got {r_s}"
        )));
    }
    let lattice = field.lattice();
    let w = lattice.width as isize;
    let h = lattice.height as isize;
    let offsets = disc_offsets(r_s);
    let mut current = field.values().to_vec();
    let mut next = vec![0.0; current.len()];
    for _ in 0..n_s {
        next.par_iter_mut().enumerate().for_each(|(s, out)| {
            let x = (s % lattice.width) as isize;
            let y = (s / lattice.width) as isize;
            let mut sum = 0.0;
            let mut count = 0usize;
            for &(dx, dy) in &offsets {
                let nx = x + dx;
                let ny = y + dy;
                if nx >= 0 && nx < w && ny >= 0 && ny < h {
                    sum += current[(ny * w + nx) as usize];
                    count += 1;
                }
            }
            *out = sum / count as f64;
        });
        std::mem::swap(&mut current, &mut next);
    }
    let block_size = match field.provenance() {
        TemperatureProvenance::BlockSpecific { block_size } => block_size,
        TemperatureProvenance::SiteSpecific { block_size, .. } => block_size,
        TemperatureProvenance::Uniform => 0,
    };
    TemperatureField::new(
        lattice.width,
        lattice.height,
        current,
        TemperatureProvenance::SiteSpecific {
            block_size,
            radius: r_s,
            passes: n_s,
        },
    )
}

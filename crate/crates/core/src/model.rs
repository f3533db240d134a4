//! Modified planar rotator model: bond energies and specific energies of
//! angle configurations.
//!
//! Nearest-neighbor bonds on the open-boundary grid contribute
//! `-J cos(q (phi_i - phi_j))`; specific energies normalize the bond energy
//! sum by the number of contributing bonds.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{AngleField, Lattice};
use crate::reduce::tree_sum;

/// Model parameters: exchange coupling `J` and modification factor `q`.
///
/// `q < 1` flattens the cosine well so that the full angle range stays
/// energetically accessible; the defaults are `J = 1`, `q = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MprParams {
    pub coupling: f64,
    pub modification: f64,
}

impl Default for MprParams {
    fn default() -> Self {
        MprParams {
            coupling: 1.0,
            modification: 0.5,
        }
    }
}

impl MprParams {
    pub fn validate(&self) -> Result<()> {
        if !self.coupling.is_finite() || self.coupling <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "coupling must be finite and positive, got {}",
                self.coupling
            )));
        }
        if !self.modification.is_finite() || self.modification <= 0.0 || self.modification > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "modification factor must lie in (0, 1], got {}",
                self.modification
            )));
        }
        Ok(())
    }

    /// Energy of one bond with angle difference `phi_i - phi_j`.
    #[inline]
    pub fn bond_energy(&self, delta: f64) -> f64 {
        -self.coupling * (self.modification * delta).cos()
    }
}

/// Bond count and summed bond energy over some bond subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondEnergyStats {
    pub bond_count: usize,
    pub energy_sum: f64,
}

impl BondEnergyStats {
    /// Energy per bond, or `None` when the subset holds no bonds.
    pub fn specific_energy(&self) -> Option<f64> {
        if self.bond_count == 0 {
            None
        } else {
            Some(self.energy_sum / self.bond_count as f64)
        }
    }
}

/// Number of nearest-neighbor bonds on an open-boundary grid:
/// `2*w*h - w - h`.
pub fn full_bond_count(lattice: Lattice) -> usize {
    if lattice.width == 0 || lattice.height == 0 {
        return 0;
    }
    2 * lattice.width * lattice.height - lattice.width - lattice.height
}

/// Sum bond energies over all bonds whose endpoints both satisfy `keep`,
/// counting each unordered bond once.
///
/// The row-parallel, deterministic reduction makes the result independent
/// of thread count.
fn bond_stats_filtered<F>(angles: &AngleField, params: &MprParams, keep: F) -> BondEnergyStats
where
    F: Fn(usize) -> bool + Sync,
{
    let lattice = angles.lattice();
    let w = lattice.width;
    let h = lattice.height;
    // Each row accumulates its horizontal bonds plus the vertical bonds to
    // the row below, so every bond belongs to exactly one row.
    let rows: Vec<(usize, f64)> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut count = 0usize;
            let mut sum = 0.0;
            for x in 0..w {
                let s = y * w + x;
                if !keep(s) {
                    continue;
                }
                let a = angles.angle(s);
                if x + 1 < w && keep(s + 1) {
                    sum += params.bond_energy(a - angles.angle(s + 1));
                    count += 1;
                }
                if y + 1 < h && keep(s + w) {
                    sum += params.bond_energy(a - angles.angle(s + w));
                    count += 1;
                }
            }
            (count, sum)
        })
        .collect();
    let count = rows.iter().map(|(c, _)| c).sum();
    let sums: Vec<f64> = rows.iter().map(|(_, s)| *s).collect();
    BondEnergyStats {
        bond_count: count,
        energy_sum: tree_sum(&sums),
    }
}

/// Bond statistics over sample-sample bonds only (both endpoints fixed).
pub fn sample_bond_stats(angles: &AngleField, params: &MprParams) -> BondEnergyStats {
    bond_stats_filtered(angles, params, |s| angles.is_fixed(s))
}

/// Specific energy of the sample configuration, over bonds whose endpoints
/// are both fixed. Errors when no such bond exists: the data then carry no
/// usable spatial-correlation signal.
pub fn sample_specific_energy(angles: &AngleField, params: &MprParams) -> Result<f64> {
    sample_bond_stats(angles, params)
        .specific_energy()
        .ok_or(Error::NoSampleBonds)
}

/// Bond statistics over every bond of the grid.
pub fn grid_bond_stats(angles: &AngleField, params: &MprParams) -> BondEnergyStats {
    bond_stats_filtered(angles, params, |_| true)
}

/// Specific energy over all bonds of the grid. Panics on a degenerate grid
/// with no bonds at all (single site).
pub fn grid_specific_energy(angles: &AngleField, params: &MprParams) -> f64 {
    grid_bond_stats(angles, params)
        .specific_energy()
        .expect("grid has no bonds")
}

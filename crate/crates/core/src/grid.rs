//! Grid data model: rasters with missing-data masks, lattice topology
//! (4-neighborhoods, checkerboard parity, block tiling) and the linear
//! value <-> spin-angle transform.
//!
//! Boundaries are open (non-periodic): the data are finite rasters and a
//! periodic wrap would correlate opposite image edges.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Per-site mask state of a [`GridField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    /// Observed value.
    Sample,
    /// Gap to be predicted. The stored value is undefined and is never
    /// read by numeric code.
    Missing,
}

/// Checkerboard sub-grid color. No two nearest neighbors share a color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    A,
    B,
}

/// Rectangular lattice dimensions with row-major site indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub width: usize,
    pub height: usize,
}

impl Lattice {
    pub fn new(width: usize, height: usize) -> Self {
        Lattice { width, height }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    /// (x, y) coordinates of a linear site index.
    #[inline]
    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.width, site / self.width)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.len() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange {
                site,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Open-boundary 4-neighborhood of `site`, clipped at grid edges.
    #[inline]
    pub fn neighbors(&self, site: usize) -> impl Iterator<Item = usize> {
        let (x, y) = self.coords(site);
        let w = self.width;
        let mut out = [0usize; 4];
        let mut n = 0;
        if x > 0 {
            out[n] = site - 1;
            n += 1;
        }
        if x + 1 < w {
            out[n] = site + 1;
            n += 1;
        }
        if y > 0 {
            out[n] = site - w;
            n += 1;
        }
        if y + 1 < self.height {
            out[n] = site + w;
            n += 1;
        }
        out.into_iter().take(n)
    }

    /// Checkerboard color: A when row + column is even.
    #[inline]
    pub fn parity(&self, site: usize) -> Color {
        let (x, y) = self.coords(site);
        if (x + y) % 2 == 0 {
            Color::A
        } else {
            Color::B
        }
    }
}

/// Rectangular raster of observed values with a missing-data mask.
///
/// Values at [`CellKind::Missing`] sites are stored as NaN and must never be
/// read through [`GridField::value`]; the accessor traps in debug builds.
#[derive(Debug, Clone)]
pub struct GridField {
    lattice: Lattice,
    values: Vec<f64>,
    mask: Vec<CellKind>,
}

/// Equality compares dimensions, mask, and sample values; the NaN fillers
/// at missing sites carry no information and are ignored.
impl PartialEq for GridField {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice
            && self.mask == other.mask
            && self
                .sample_sites()
                .all(|s| self.values[s] == other.values[s])
    }
}

impl GridField {
    /// Build from parallel value/mask arrays. Values at missing sites are
    /// replaced by NaN so that accidental reads propagate loudly.
    pub fn new(width: usize, height: usize, mut values: Vec<f64>, mask: Vec<CellKind>) -> Self {
        assert_eq!(values.len(), width * height);
        assert_eq!(mask.len(), width * height);
        for (v, m) in values.iter_mut().zip(&mask) {
            if *m == CellKind::Missing {
                *v = f64::NAN;
            }
        }
        GridField {
            lattice: Lattice::new(width, height),
            values,
            mask,
        }
    }

    /// Fully-sampled field from a dense value array.
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Self {
        let mask = vec![CellKind::Sample; values.len()];
        GridField::new(width, height, values, mask)
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.lattice.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.lattice.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn kind(&self, site: usize) -> CellKind {
        self.mask[site]
    }

    #[inline]
    pub fn is_sample(&self, site: usize) -> bool {
        self.mask[site] == CellKind::Sample
    }

    /// Observed value at a sample site. Reading a missing site is a
    /// contract violation; debug builds trap.
    #[inline]
    pub fn value(&self, site: usize) -> f64 {
        debug_assert!(
            self.mask[site] == CellKind::Sample,
            "read of missing site {site}"
        );
        self.values[site]
    }

    pub fn mask(&self) -> &[CellKind] {
        &self.mask
    }

    /// Raw value storage; missing sites hold NaN.
    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_count(&self) -> usize {
        self.mask.iter().filter(|m| **m == CellKind::Sample).count()
    }

    pub fn missing_count(&self) -> usize {
        self.len() - self.sample_count()
    }

    pub fn sample_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&s| self.is_sample(s))
    }

    pub fn missing_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&s| !self.is_sample(s))
    }
}

/// Linear map between data values and spin angles in [0, 2pi].
///
/// Bounds come from the sample values of one specific input, so predictions
/// are confined to the observed sample range by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformParams {
    pub z_min: f64,
    pub z_max: f64,
}

impl TransformParams {
    /// Compute bounds from the sample sites of `grid`.
    ///
    /// Returns [`Error::NoSamples`] on an all-missing grid and
    /// [`Error::DegenerateRange`] when all samples are equal (the caller may
    /// short-circuit to a constant fill).
    pub fn from_samples(grid: &GridField) -> Result<Self> {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut seen = false;
        for s in grid.sample_sites() {
            let v = grid.value(s);
            min = min.min(v);
            max = max.max(v);
            seen = true;
        }
        if !seen {
            return Err(Error::NoSamples);
        }
        if min == max {
            return Err(Error::DegenerateRange { value: min });
        }
        Ok(TransformParams { z_min: min, z_max: max })
    }

    #[inline]
    pub fn to_angle(&self, z: f64) -> f64 {
        TAU * (z - self.z_min) / (self.z_max - self.z_min)
    }

    #[inline]
    pub fn to_value(&self, angle: f64) -> f64 {
        self.z_min + (self.z_max - self.z_min) * angle / TAU
    }
}

/// Spin-angle representation of a grid: angles in [0, 2pi] plus a
/// fixed/free mask. Fixed angles (the samples) never change during
/// simulation; free angles are initialized by the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleField {
    lattice: Lattice,
    angles: Vec<f64>,
    fixed: Vec<bool>,
}

impl AngleField {
    pub fn new(width: usize, height: usize, angles: Vec<f64>, fixed: Vec<bool>) -> Self {
        assert_eq!(angles.len(), width * height);
        assert_eq!(fixed.len(), width * height);
        AngleField {
            lattice: Lattice::new(width, height),
            angles,
            fixed,
        }
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    #[inline]
    pub fn angle(&self, site: usize) -> f64 {
        self.angles[site]
    }

    #[inline]
    pub fn is_fixed(&self, site: usize) -> bool {
        self.fixed[site]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn fixed_mask(&self) -> &[bool] {
        &self.fixed
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.iter().filter(|f| **f).count()
    }

    pub fn free_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&s| !self.fixed[s])
    }

    /// Overwrite the angle at a free site.
    #[inline]
    pub fn set_angle(&mut self, site: usize, angle: f64) {
        debug_assert!(!self.fixed[site], "write to fixed site {site}");
        self.angles[site] = angle;
    }

    /// Bulk overwrite used by the sweep engine; callers must respect the
    /// fixed mask.
    pub(crate) fn angles_mut(&mut self) -> &mut [f64] {
        &mut self.angles
    }
}

/// Transform sample values to fixed spin angles.
///
/// Free sites are left NaN for the initializer so that uninitialized use is
/// visible.
pub fn to_angles(grid: &GridField, params: &TransformParams) -> AngleField {
    let n = grid.len();
    let mut angles = vec![f64::NAN; n];
    let mut fixed = vec![false; n];
    for s in 0..n {
        if grid.is_sample(s) {
            angles[s] = params.to_angle(grid.value(s));
            fixed[s] = true;
        }
    }
    AngleField::new(grid.width(), grid.height(), angles, fixed)
}

/// Back-transform every angle to data units, producing a fully-sampled grid.
pub fn from_angles(angles: &AngleField, params: &TransformParams) -> GridField {
    let values: Vec<f64> = angles.angles().iter().map(|&a| params.to_value(a)).collect();
    GridField::from_values(angles.lattice().width, angles.lattice().height, values)
}

/// Row-major tiling of the grid into square blocks of linear size
/// `block_size`; edge blocks are truncated when the block size does not
/// divide the grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockDecomposition {
    lattice: Lattice,
    block_size: usize,
    blocks_x: usize,
    blocks_y: usize,
}

impl BlockDecomposition {
    /// Tile `lattice` with blocks of linear size `block_size` (>= 2).
    /// A block size larger than both grid dimensions yields a single block.
    pub fn new(lattice: Lattice, block_size: usize) -> Result<Self> {
        if block_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "block size must be >= 2, got {block_size}"
            )));
        }
        let blocks_x = lattice.width.div_ceil(block_size).max(1);
        let blocks_y = lattice.height.div_ceil(block_size).max(1);
        Ok(BlockDecomposition {
            lattice,
            block_size,
            blocks_x,
            blocks_y,
        })
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    #[inline]
    pub fn blocks_x(&self) -> usize {
        self.blocks_x
    }

    #[inline]
    pub fn blocks_y(&self) -> usize {
        self.blocks_y
    }

    #[inline]
    pub fn block_count(&self) -> usize {
        self.blocks_x * self.blocks_y
    }

    /// Block containing `site`; total and single-valued over the grid.
    #[inline]
    pub fn block_of(&self, site: usize) -> usize {
        let (x, y) = self.lattice.coords(site);
        (y / self.block_size) * self.blocks_x + x / self.block_size
    }

    /// Half-open site-coordinate bounds `(x0, x1, y0, y1)` of a block.
    pub fn block_bounds(&self, block: usize) -> (usize, usize, usize, usize) {
        let bx = block % self.blocks_x;
        let by = block / self.blocks_x;
        let x0 = bx * self.block_size;
        let y0 = by * self.block_size;
        let x1 = (x0 + self.block_size).min(self.lattice.width);
        let y1 = (y0 + self.block_size).min(self.lattice.height);
        (x0, x1, y0, y1)
    }

    pub fn sites_in_block(&self, block: usize) -> impl Iterator<Item = usize> + '_ {
        let (x0, x1, y0, y1) = self.block_bounds(block);
        let lattice = self.lattice;
        (y0..y1).flat_map(move |y| (x0..x1).map(move |x| lattice.index(x, y)))
    }
}

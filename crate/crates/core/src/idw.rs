//! Inverse-distance-weighted interpolation baseline with a fixed search
//! radius, plus the exact minimum radius at which every prediction site
//! still sees at least one sample.
//!
//! Distances are Euclidean in site units (grid spacing 1). Neighbor search
//! uses a uniform bucket grid with cell size equal to the search radius,
//! so per-site cost scales with disc area rather than sample count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridField;

/// What to do when a prediction site has no sample within the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoNeighborPolicy {
    /// Fail, naming the offending sites.
    Error,
    /// Predict from the single nearest sample and count the fallback.
    #[default]
    NearestFallback,
}

/// IDW parameters: weight power, search radius, empty-disc policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwParams {
    pub power: f64,
    pub radius: f64,
    pub policy: NoNeighborPolicy,
}

impl IdwParams {
    pub fn new(power: f64, radius: f64, policy: NoNeighborPolicy) -> Result<Self> {
        let p = IdwParams { power, radius, policy };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.power.is_finite() || self.power <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "IDW power must be finite and positive, got {}",
                self.power
            )));
        }
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "IDW search radius must be finite and positive, got {}",
                self.radius
            )));
        }
        Ok(())
    }
}

impl Default for IdwParams {
    fn default() -> Self {
        IdwParams {
            power: 2.0,
            radius: 1.0,
            policy: NoNeighborPolicy::NearestFallback,
        }
    }
}

/// Filled grid plus the number of sites that needed the nearest-sample
/// fallback.
#[derive(Debug, Clone)]
pub struct IdwOutcome {
    pub filled: GridField,
    pub fallback_count: usize,
}

/// Uniform bucket index over sample sites, cell size = search radius.
struct SampleIndex {
    cell: f64,
    cells_x: usize,
    cells_y: usize,
    buckets: Vec<Vec<u32>>,
}

impl SampleIndex {
    fn build(grid: &GridField, radius: f64) -> Self {
        let cell = radius;
        let cells_x = ((grid.width() as f64 / cell).ceil() as usize).max(1);
        let cells_y = ((grid.height() as f64 / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); cells_x * cells_y];
        for s in grid.sample_sites() {
            let (x, y) = grid.lattice().coords(s);
            let cx = ((x as f64 / cell) as usize).min(cells_x - 1);
            let cy = ((y as f64 / cell) as usize).min(cells_y - 1);
            buckets[cy * cells_x + cx].push(s as u32);
        }
        SampleIndex {
            cell,
            cells_x,
            cells_y,
            buckets,
        }
    }

    fn cell_of(&self, x: usize, y: usize) -> (usize, usize) {
        let cx = ((x as f64 / self.cell) as usize).min(self.cells_x - 1);
        let cy = ((y as f64 / self.cell) as usize).min(self.cells_y - 1);
        (cx, cy)
    }

    /// Visit every sample in the 3x3 cell neighborhood of (x, y), which
    /// covers all samples within one cell size (= radius) of the site.
    fn for_each_near<F: FnMut(usize)>(&self, x: usize, y: usize, mut f: F) {
        let (cx, cy) = self.cell_of(x, y);
        let y0 = cy.saturating_sub(1);
        let y1 = (cy + 1).min(self.cells_y - 1);
        let x0 = cx.saturating_sub(1);
        let x1 = (cx + 1).min(self.cells_x - 1);
        for by in y0..=y1 {
            for bx in x0..=x1 {
                for &s in &self.buckets[by * self.cells_x + bx] {
                    f(s as usize);
                }
            }
        }
    }
}

#[inline]
fn dist2(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = a.0 as f64 - b.0 as f64;
    let dy = a.1 as f64 - b.1 as f64;
    dx * dx + dy * dy
}

/// Nearest sample to `site` by full scan; ties break to the lowest site
/// index. Only used for fallback sites, which are rare by construction.
fn nearest_sample(grid: &GridField, site: usize) -> Option<(usize, f64)> {
    let here = grid.lattice().coords(site);
    let mut best: Option<(usize, f64)> = None;
    for s in grid.sample_sites() {
        let d2 = dist2(here, grid.lattice().coords(s));
        match best {
            Some((_, bd2)) if bd2 <= d2 => {}
            _ => best = Some((s, d2)),
        }
    }
    best
}

/// Fill every missing site by inverse-distance weighting over the samples
/// within `params.radius`.
pub fn idw_predict(grid: &GridField, params: &IdwParams) -> Result<IdwOutcome> {
    params.validate()?;
    if grid.sample_count() == 0 {
        return Err(Error::NoSamples);
    }
    let lattice = grid.lattice();
    let index = SampleIndex::build(grid, params.radius);
    let r2 = params.radius * params.radius;
    let beta = params.power;

    // None = empty disc, resolved by policy afterwards.
    let missing: Vec<usize> = grid.missing_sites().collect();
    let predictions: Vec<Option<f64>> = missing
        .par_iter()
        .map(|&site| {
            let here = lattice.coords(site);
            let mut num = 0.0;
            let mut den = 0.0;
            let mut seen = false;
            index.for_each_near(here.0, here.1, |s| {
                let d2 = dist2(here, lattice.coords(s));
                if d2 <= r2 {
                    // d > 0 always: the site itself is missing.
                    let w = d2.sqrt().powf(-beta);
                    num += w * grid.value(s);
                    den += w;
                    seen = true;
                }
            });
            if seen {
                Some(num / den)
            } else {
                None
            }
        })
        .collect();

    let empty: Vec<usize> = missing
        .iter()
        .zip(&predictions)
        .filter(|(_, p)| p.is_none())
        .map(|(&s, _)| s)
        .collect();
    if !empty.is_empty() && params.policy == NoNeighborPolicy::Error {
        return Err(Error::EmptyDisc {
            count: empty.len(),
            first: empty[0],
        });
    }

    let mut values: Vec<f64> = grid.raw_values().to_vec();
    for (&site, pred) in missing.iter().zip(&predictions) {
        match pred {
            Some(v) => values[site] = *v,
            None => {
                let (s, _) = nearest_sample(grid, site).expect("sample_count checked above");
                values[site] = grid.value(s);
            }
        }
    }
    Ok(IdwOutcome {
        filled: GridField::from_values(grid.width(), grid.height(), values),
        fallback_count: empty.len(),
    })
}

/// Exact two-pass Euclidean distance transform: squared distance from each
/// site to its nearest sample site.
fn squared_distance_to_samples(grid: &GridField) -> Vec<f64> {
    const INF: f64 = f64::MAX / 4.0;
    let w = grid.width();
    let h = grid.height();
    let mut field = vec![INF; w * h];
    for s in grid.sample_sites() {
        field[s] = 0.0;
    }

    // 1-D lower-envelope distance transform (Felzenszwalb-Huttenlocher).
    fn dt1d(f: &[f64], d: &mut Vec<f64>) {
        let n = f.len();
        d.clear();
        d.resize(n, 0.0);
        let mut v = vec![0usize; n];
        let mut z = vec![0.0f64; n + 1];
        let mut k = 0usize;
        v[0] = 0;
        z[0] = f64::NEG_INFINITY;
        z[1] = f64::INFINITY;
        for q in 1..n {
            let mut s;
            loop {
                let p = v[k];
                s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * q - 2 * p) as f64;
                if s <= z[k] {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                } else {
                    break;
                }
            }
            if s > z[k] {
                k += 1;
            }
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
        }
        let mut k = 0usize;
        for q in 0..n {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let p = v[k];
            let dq = q as f64 - p as f64;
            d[q] = dq * dq + f[p];
        }
    }

    // Columns, then rows.
    let mut col = vec![0.0; h];
    let mut out = Vec::new();
    for x in 0..w {
        for y in 0..h {
            col[y] = field[y * w + x];
        }
        dt1d(&col, &mut out);
        for y in 0..h {
            field[y * w + x] = out[y];
        }
    }
    let mut result = vec![0.0; w * h];
    let mut row = vec![0.0; w];
    for y in 0..h {
        row.copy_from_slice(&field[y * w..(y + 1) * w]);
        dt1d(&row, &mut out);
        result[y * w..(y + 1) * w].copy_from_slice(&out);
    }
    result
}

/// Smallest radius at which every missing site has at least one sample
/// within distance R: the max over missing sites of the distance to the
/// nearest sample. Zero for a fully sampled grid.
///
/// The result is rounded up so that an IDW run at exactly this radius
/// reports zero fallbacks.
pub fn min_full_coverage_radius(grid: &GridField) -> Result<f64> {
    if grid.sample_count() == 0 {
        return Err(Error::NoSamples);
    }
    if grid.missing_count() == 0 {
        return Ok(0.0);
    }
    let d2 = squared_distance_to_samples(grid);
    let max_d2 = grid
        .missing_sites()
        .map(|s| d2[s])
        .fold(0.0f64, f64::max);
    let mut r = max_d2.sqrt();
    // Guard the boundary site against sqrt/square rounding.
    while r * r < max_d2 {
        r = f64::from_bits(r.to_bits() + 1);
    }
    Ok(r)
}

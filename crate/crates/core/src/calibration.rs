//! Temperature calibration: the monotone T -> e(T) curve built from
//! unconditional simulations, its isotonic post-fit, the inverse lookup
//! used for temperature inference, and the on-disk cache format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::MprParams;
use crate::rng::derive_seed;
use crate::sim::{run_unconditional_energy, UncondInit};

/// Provenance metadata of a calibration curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationMeta {
    pub params: MprParams,
    /// Linear size of the square reference grid.
    pub ref_size: usize,
    /// Fixed equilibration sweeps per temperature knot.
    pub equil_sweeps: usize,
    /// Averaging sweeps per knot after equilibration.
    pub avg_sweeps: usize,
    pub seed: u64,
    /// Largest |e_isotonic - e_raw| applied by the monotone post-fit.
    pub isotonic_max_shift: f64,
}

impl Default for CalibrationMeta {
    fn default() -> Self {
        CalibrationMeta {
            params: MprParams::default(),
            ref_size: DEFAULT_REF_SIZE,
            equil_sweeps: DEFAULT_EQUIL_SWEEPS,
            avg_sweeps: DEFAULT_AVG_SWEEPS,
            seed: DEFAULT_CAL_SEED,
            isotonic_max_shift: 0.0,
        }
    }
}

pub const DEFAULT_REF_SIZE: usize = 128;
pub const DEFAULT_EQUIL_SWEEPS: usize = 200;
pub const DEFAULT_AVG_SWEEPS: usize = 200;
pub const DEFAULT_CAL_SEED: u64 = 1;

/// Monotone lookup table from reduced temperature to equilibrium specific
/// energy. Temperatures are strictly increasing, energies non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    temperatures: Vec<f64>,
    energies: Vec<f64>,
    meta: CalibrationMeta,
    /// Per-knot Monte Carlo standard error; present only on freshly built
    /// curves, not persisted.
    stderr: Option<Vec<f64>>,
}

impl CalibrationCurve {
    pub fn new(
        temperatures: Vec<f64>,
        energies: Vec<f64>,
        meta: CalibrationMeta,
    ) -> Result<Self> {
        if temperatures.len() != energies.len() {
            return Err(Error::InvalidConfig(format!(
                "calibration knot mismatch: {} temperatures vs {} energies",
                temperatures.len(),
                energies.len()
            )));
        }
        if temperatures.len() < 2 {
            return Err(Error::InvalidConfig(
                "calibration curve needs at least 2 knots".into(),
            ));
        }
        if temperatures[0] < 0.0 || temperatures.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig(
                "calibration temperatures must be finite and non-negative".into(),
            ));
        }
        if temperatures.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "calibration temperatures must be strictly increasing".into(),
            ));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidConfig(
                "calibration energies must be finite".into(),
            ));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig(
                "calibration energies must be non-decreasing".into(),
            ));
        }
        Ok(CalibrationCurve {
            temperatures,
            energies,
            meta,
            stderr: None,
        })
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn meta(&self) -> &CalibrationMeta {
        &self.meta
    }

    /// Per-knot MC standard errors when the curve was built in-process.
    pub fn stderr(&self) -> Option<&[f64]> {
        self.stderr.as_deref()
    }

    pub fn t_min(&self) -> f64 {
        self.temperatures[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.temperatures.last().unwrap()
    }

    /// Forward interpolation e(T), clamped at the curve ends.
    pub fn energy_at(&self, t: f64) -> f64 {
        let ts = &self.temperatures;
        if t <= ts[0] {
            return self.energies[0];
        }
        if t >= *ts.last().unwrap() {
            return *self.energies.last().unwrap();
        }
        let i = ts.partition_point(|&x| x < t);
        let (t0, t1) = (ts[i - 1], ts[i]);
        let (e0, e1) = (self.energies[i - 1], self.energies[i]);
        e0 + (e1 - e0) * (t - t0) / (t1 - t0)
    }
}

/// Result of the inverse curve lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureEstimate {
    pub value: f64,
    /// Set when the sample energy fell outside the curve's energy range
    /// and the estimate was clamped to an endpoint temperature.
    pub clamped: bool,
}

/// Piecewise-linear inverse lookup of the calibration curve at a sample
/// specific energy. Energies below the curve clamp to the lowest
/// temperature, energies above to the highest; on energy plateaus the
/// lowest matching temperature is returned.
pub fn estimate_temperature(e_s: f64, curve: &CalibrationCurve) -> TemperatureEstimate {
    let es = curve.energies();
    let ts = curve.temperatures();
    if e_s < es[0] {
        return TemperatureEstimate {
            value: ts[0],
            clamped: true,
        };
    }
    if e_s > *es.last().unwrap() {
        return TemperatureEstimate {
            value: *ts.last().unwrap(),
            clamped: true,
        };
    }
    // Smallest knot with energy >= e_s; picks the low end of plateaus.
    let i = es.partition_point(|&e| e < e_s);
    let value = if es[i] == e_s || i == 0 {
        ts[i]
    } else {
        let (e0, e1) = (es[i - 1], es[i]);
        let (t0, t1) = (ts[i - 1], ts[i]);
        t0 + (t1 - t0) * (e_s - e0) / (e1 - e0)
    };
    TemperatureEstimate {
        value,
        clamped: false,
    }
}

/// Pool-adjacent-violators fit: the least-squares non-decreasing sequence
/// closest to `ys`.
pub fn isotonic_non_decreasing(ys: &[f64]) -> Vec<f64> {
    let mut means: Vec<f64> = Vec::with_capacity(ys.len());
    let mut counts: Vec<usize> = Vec::with_capacity(ys.len());
    for &y in ys {
        means.push(y);
        counts.push(1);
        while means.len() >= 2 && means[means.len() - 1] < means[means.len() - 2] {
            let (m1, c1) = (means.pop().unwrap(), counts.pop().unwrap());
            let (m0, c0) = (means.pop().unwrap(), counts.pop().unwrap());
            let c = c0 + c1;
            means.push((m0 * c0 as f64 + m1 * c1 as f64) / c as f64);
            counts.push(c);
        }
    }
    let mut out = Vec::with_capacity(ys.len());
    for (m, c) in means.iter().zip(&counts) {
        out.extend(std::iter::repeat(*m).take(*c));
    }
    out
}

/// Equilibrium specific energy in the independent-angle (infinite
/// temperature) limit: for q = 1/2 this is -4/pi^2.
pub fn independent_angle_energy(params: &MprParams) -> f64 {
    let a = std::f64::consts::TAU * params.modification;
    let mc = a.sin() / a;
    let ms = (1.0 - a.cos()) / a;
    -params.coupling * (mc * mc + ms * ms)
}

/// Configuration of a calibration build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    pub params: MprParams,
    pub ref_size: usize,
    pub equil_sweeps: usize,
    pub avg_sweeps: usize,
    pub seed: u64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            params: MprParams::default(),
            ref_size: DEFAULT_REF_SIZE,
            equil_sweeps: DEFAULT_EQUIL_SWEEPS,
            avg_sweeps: DEFAULT_AVG_SWEEPS,
            seed: DEFAULT_CAL_SEED,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.ref_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "calibration reference grid must be at least 2x2, got {}",
                self.ref_size
            )));
        }
        if self.avg_sweeps == 0 {
            return Err(Error::InvalidConfig(
                "calibration needs at least 1 averaging sweep".into(),
            ));
        }
        Ok(())
    }
}

/// Default temperature grid: 48 points log-spaced over [1e-4, 10].
pub fn default_t_grid() -> Vec<f64> {
    log_spaced_t_grid(1e-4, 10.0, 48)
}

pub fn log_spaced_t_grid(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && t_min > 0.0 && t_max > t_min);
    let (a, b) = (t_min.log10(), t_max.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Build the T -> e curve by unconditional simulation at every knot.
///
/// Each knot starts from the aligned ground state (all angles at pi) and
/// runs a fixed equilibration + averaging schedule; raw knot energies are
/// made non-decreasing by [`isotonic_non_decreasing`] and capped at the
/// independent-angle limit.
pub fn build_calibration_curve(
    config: &CalibrationConfig,
    t_grid: &[f64],
) -> Result<CalibrationCurve> {
    config.validate()?;
    if t_grid.len() < 2 {
        return Err(Error::InvalidConfig(
            "temperature grid needs at least 2 points".into(),
        ));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "temperature grid must be strictly increasing and non-negative".into(),
        ));
    }

    let knots: Vec<Result<(f64, f64)>> = t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let r = run_unconditional_energy(
                config.ref_size,
                config.ref_size,
                t,
                &config.params,
                config.equil_sweeps,
                config.avg_sweeps,
                UncondInit::Aligned,
                derive_seed(config.seed, i as u64),
            )?;
            Ok((r.mean_energy, r.stderr))
        })
        .collect();

    let mut raw = Vec::with_capacity(t_grid.len());
    let mut errs = Vec::with_capacity(t_grid.len());
    for k in knots {
        let (e, se) = k?;
        raw.push(e);
        errs.push(se);
    }

    let e_inf = independent_angle_energy(&config.params);
    let fitted: Vec<f64> = isotonic_non_decreasing(&raw)
        .into_iter()
        .map(|e| e.clamp(-config.params.coupling, e_inf))
        .collect();
    let max_shift = raw
        .iter()
        .zip(&fitted)
        .map(|(r, f)| (r - f).abs())
        .fold(0.0f64, f64::max);

    let meta = CalibrationMeta {
        params: config.params,
        ref_size: config.ref_size,
        equil_sweeps: config.equil_sweeps,
        avg_sweeps: config.avg_sweeps,
        seed: config.seed,
        isotonic_max_shift: max_shift,
    };
    let mut curve = CalibrationCurve::new(t_grid.to_vec(), fitted, meta)?;
    curve.stderr = Some(errs);
    Ok(curve)
}

const CACHE_MAGIC: &str = "mpr-calibration v1";

/// Serialize a curve to the self-describing text cache format. Floats use
/// shortest round-trip formatting, so write -> load -> write is
/// byte-identical.
pub fn write_calibration(curve: &CalibrationCurve, path: &Path) -> Result<()> {
    let m = curve.meta();
    let mut out = String::new();
    let _ = writeln!(out, "{CACHE_MAGIC}");
    let _ = writeln!(out, "modification {}", m.params.modification);
    let _ = writeln!(out, "coupling {}", m.params.coupling);
    let _ = writeln!(out, "ref_size {}", m.ref_size);
    let _ = writeln!(out, "equil_sweeps {}", m.equil_sweeps);
    let _ = writeln!(out, "avg_sweeps {}", m.avg_sweeps);
    let _ = writeln!(out, "seed {}", m.seed);
    let _ = writeln!(out, "isotonic_max_shift {}", m.isotonic_max_shift);
    let _ = writeln!(out, "points {}", curve.temperatures.len());
    for (t, e) in curve.temperatures.iter().zip(&curve.energies) {
        let _ = writeln!(out, "{t} {e}");
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::BadValue {
        path: path.to_path_buf(),
        line,
        detail: format!("expected a number, got {s:?}"),
    })
}

fn parse_usize(path: &Path, line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::BadValue {
        path: path.to_path_buf(),
        line,
        detail: format!("expected a non-negative integer, got {s:?}"),
    })
}

/// Load a curve from the text cache format, validating its invariants.
pub fn load_calibration(path: &Path) -> Result<CalibrationCurve> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let bad_header = |line: usize, detail: String| Error::MalformedHeader {
        path: path.to_path_buf(),
        line,
        detail,
    };

    let (_, magic) = lines
        .next()
        .ok_or_else(|| bad_header(1, "empty file".into()))?;
    if magic.trim() != CACHE_MAGIC {
        return Err(bad_header(1, format!("expected {CACHE_MAGIC:?}, got {magic:?}")));
    }

    let mut meta = CalibrationMeta::default();
    let mut points: Option<usize> = None;
    for (idx, line) in lines.by_ref() {
        let lineno = idx + 1;
        let mut parts = line.split_whitespace();
        let key = parts
            .next()
            .ok_or_else(|| bad_header(lineno, "blank line in header".into()))?;
        let value = parts
            .next()
            .ok_or_else(|| bad_header(lineno, format!("key {key:?} has no value")))?;
        if parts.next().is_some() {
            return Err(bad_header(lineno, format!("trailing tokens after {key:?}")));
        }
        match key {
            "modification" => meta.params.modification = parse_f64(path, lineno, value)?,
            "coupling" => meta.params.coupling = parse_f64(path, lineno, value)?,
            "ref_size" => meta.ref_size = parse_usize(path, lineno, value)?,
            "equil_sweeps" => meta.equil_sweeps = parse_usize(path, lineno, value)?,
            "avg_sweeps" => meta.avg_sweeps = parse_usize(path, lineno, value)?,
            "seed" => {
                meta.seed = value.parse().map_err(|_| Error::BadValue {
                    path: path.to_path_buf(),
                    line: lineno,
                    detail: format!("expected a 64-bit seed, got {value:?}"),
                })?
            }
            "isotonic_max_shift" => meta.isotonic_max_shift = parse_f64(path, lineno, value)?,
            "points" => {
                points = Some(parse_usize(path, lineno, value)?);
                break;
            }
            other => {
                return Err(bad_header(lineno, format!("unknown header key {other:?}")));
            }
        }
    }
    let points = points.ok_or_else(|| bad_header(0, "missing points line".into()))?;

    let mut temperatures = Vec::with_capacity(points);
    let mut energies = Vec::with_capacity(points);
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let t = parts.next().unwrap();
        let e = parts.next().ok_or_else(|| Error::BadValue {
            path: path.to_path_buf(),
            line: lineno,
            detail: "knot row needs two columns".into(),
        })?;
        if parts.next().is_some() {
            return Err(Error::BadValue {
                path: path.to_path_buf(),
                line: lineno,
                detail: "knot row has more than two columns".into(),
            });
        }
        temperatures.push(parse_f64(path, lineno, t)?);
        energies.push(parse_f64(path, lineno, e)?);
    }
    if temperatures.len() != points {
        return Err(Error::CountMismatch {
            path: path.to_path_buf(),
            expected: points,
            actual: temperatures.len(),
        });
    }
    CalibrationCurve::new(temperatures, energies, meta)
}

/// Cache file name keyed by every input that influences the curve.
pub fn cache_file_name(config: &CalibrationConfig, t_grid: &[f64]) -> String {
    format!(
        "cal-q{}-j{}-L{}-e{}-a{}-s{}-t{}-{}-n{}.txt",
        config.params.modification,
        config.params.coupling,
        config.ref_size,
        config.equil_sweeps,
        config.avg_sweeps,
        config.seed,
        t_grid[0],
        t_grid[t_grid.len() - 1],
        t_grid.len()
    )
}

/// Load the curve for `config` from `cache_dir`, building and persisting
/// it on a miss. Returns the curve and whether it came from the cache.
pub fn load_or_build(
    cache_dir: &Path,
    config: &CalibrationConfig,
    t_grid: &[f64],
) -> Result<(CalibrationCurve, bool)> {
    let path: PathBuf = cache_dir.join(cache_file_name(config, t_grid));
    if path.is_file() {
        return Ok((load_calibration(&path)?, true));
    }
    let curve = build_calibration_curve(config, t_grid)?;
    fs::create_dir_all(cache_dir).map_err(|source| Error::Io {
        path: cache_dir.to_path_buf(),
        source,
    })?;
    write_calibration(&curve, &path)?;
    Ok((curve, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn curve_from(temps: Vec<f64>, energies: Vec<f64>) -> CalibrationCurve {
        CalibrationCurve::new(temps, energies, CalibrationMeta::default()).unwrap()
    }

    #[test]
    fn isotonic_examples() {
        assert_eq!(isotonic_non_decreasing(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(isotonic_non_decreasing(&[3.0, 1.0, 2.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(
            isotonic_non_decreasing(&[5.0, 4.0, 3.0, 2.0, 1.0]),
            vec![3.0; 5]
        );
        assert_eq!(
            isotonic_non_decreasing(&[1.0, 3.0, 2.0, 4.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
    }

    #[test]
    fn independent_angle_energy_closed_form() {
        let e = independent_angle_energy(&MprParams::default());
        assert!((e - (-4.0 / (PI * PI))).abs() < 1e-14);
        // q = 1 recovers the plain rotator: independent angles average to 0.
        let e1 = independent_angle_energy(&MprParams { coupling: 1.0, modification: 1.0 });
        assert!(e1.abs() < 1e-14);
    }

    #[test]
    fn estimate_interpolates_between_knots() {
        let c = curve_from(vec![0.0, 1.0, 2.0], vec![-1.0, -0.5, 0.0]);
        let est = estimate_temperature(-0.75, &c);
        assert!((est.value - 0.5).abs() < 1e-12);
        assert!(!est.clamped);
    }

    #[test]
    fn estimate_clamps_below_and_above() {
        let c = curve_from(vec![1e-4, 1.0, 10.0], vec![-0.99, -0.6, -0.41]);
        let low = estimate_temperature(-1.0, &c);
        assert_eq!(low.value, 1e-4);
        assert!(low.clamped);
        let high = estimate_temperature(-0.2, &c);
        assert_eq!(high.value, 10.0);
        assert!(high.clamped);
        // Exactly at an endpoint knot: no clamp.
        let edge = estimate_temperature(-0.99, &c);
        assert_eq!(edge.value, 1e-4);
        assert!(!edge.clamped);
    }

    #[test]
    fn plateau_returns_lowest_temperature() {
        let c = curve_from(vec![0.0, 1.0, 2.0, 3.0], vec![-1.0, -0.5, -0.5, 0.0]);
        let est = estimate_temperature(-0.5, &c);
        assert_eq!(est.value, 1.0);
        assert!(!est.clamped);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_t_grid();
        assert_eq!(g.len(), 48);
        assert!((g[0] - 1e-4).abs() < 1e-12);
        assert!((g[47] - 10.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn curve_validation_rejects_bad_shapes() {
        let meta = CalibrationMeta::default();
        assert!(CalibrationCurve::new(vec![1.0], vec![-1.0], meta).is_err());
        assert!(CalibrationCurve::new(vec![1.0, 1.0], vec![-1.0, -0.9], meta).is_err());
        assert!(CalibrationCurve::new(vec![2.0, 1.0], vec![-1.0, -0.9], meta).is_err());
        assert!(CalibrationCurve::new(vec![1.0, 2.0], vec![-0.9, -1.0], meta).is_err());
        assert!(CalibrationCurve::new(vec![1.0, 2.0], vec![-0.9, f64::NAN], meta).is_err());
        assert!(CalibrationCurve::new(vec![-1.0, 2.0], vec![-1.0, -0.9], meta).is_err());
    }

    #[test]
    fn cache_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let meta = CalibrationMeta {
            params: MprParams::default(),
            ref_size: 64,
            equil_sweeps: 123,
            avg_sweeps: 77,
            seed: 0xdead_beef_cafe_f00d,
            isotonic_max_shift: 1.25e-4,
        };
        let temps = vec![1e-4, 0.031622776601683794, 0.9, 10.0];
        let energies = vec![-0.9999, -0.951, -0.63, -0.4052847345693511];
        let curve = CalibrationCurve::new(temps.clone(), energies.clone(), meta).unwrap();

        let p1 = dir.path().join("c1.txt");
        let p2 = dir.path().join("c2.txt");
        write_calibration(&curve, &p1).unwrap();
        let loaded = load_calibration(&p1).unwrap();
        assert_eq!(loaded.temperatures(), temps.as_slice());
        assert_eq!(loaded.energies(), energies.as_slice());
        assert_eq!(loaded.meta(), &meta);
        write_calibration(&loaded, &p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap(),
            "rewrite must be byte identical"
        );
    }

    #[test]
    fn load_rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");

        std::fs::write(&p, "not a calibration\n").unwrap();
        assert!(matches!(
            load_calibration(&p),
            Err(Error::MalformedHeader { line: 1, .. })
        ));

        std::fs::write(
            &p,
            "mpr-calibration v1\nmodification 0.5\npoints 3\n0.1 -0.9\n0.2 -0.8\n",
        )
        .unwrap();
        assert!(matches!(
            load_calibration(&p),
            Err(Error::CountMismatch { expected: 3, actual: 2, .. })
        ));

        std::fs::write(
            &p,
            "mpr-calibration v1\npoints 2\n0.1 nope\n0.2 -0.8\n",
        )
        .unwrap();
        assert!(matches!(load_calibration(&p), Err(Error::BadValue { .. })));
    }

    #[test]
    fn missing_cache_file_reports_not_found_class() {
        let err = load_calibration(Path::new("/nonexistent/cal.txt")).unwrap_err();
        assert_eq!(err.class(), "IO_NOT_FOUND");
    }

    proptest! {
        #[test]
        fn isotonic_output_is_monotone_and_mean_preserving(
            ys in proptest::collection::vec(-1.0f64..1.0, 1..30),
        ) {
            let fit = isotonic_non_decreasing(&ys);
            prop_assert_eq!(fit.len(), ys.len());
            prop_assert!(fit.windows(2).all(|w| w[0] <= w[1]));
            let sum_in: f64 = ys.iter().sum();
            let sum_out: f64 = fit.iter().sum();
            prop_assert!((sum_in - sum_out).abs() < 1e-9 * ys.len() as f64);
            // Idempotence: fitting a monotone sequence changes nothing.
            let again = isotonic_non_decreasing(&fit);
            for (a, b) in fit.iter().zip(&again) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn knot_round_trip_within_tolerance(
            raw in proptest::collection::vec(-1.0f64..-0.4, 3..20),
            t0 in 1e-4f64..0.1,
        ) {
            let n = raw.len();
            let temps: Vec<f64> = (0..n).map(|i| t0 * 1.5f64.powi(i as i32)).collect();
            let energies = isotonic_non_decreasing(&raw);
            let c = curve_from(temps.clone(), energies.clone());
            for k in 0..n {
                // On plateaus only the first knot can round-trip.
                let first_of_plateau = k == 0 || energies[k - 1] < energies[k];
                if first_of_plateau {
                    let est = estimate_temperature(energies[k], &c);
                    prop_assert!(
                        (est.value - temps[k]).abs() <= 1e-9 * temps[k].max(1.0),
                        "knot {}: {} vs {}", k, est.value, temps[k]
                    );
                }
            }
        }
    }
}

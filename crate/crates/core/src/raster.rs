//! Raster file I/O: a minimal ASCII-grid dialect (ncols/nrows/NODATA_value
//! header plus whitespace-separated rows) and a PPM heatmap exporter.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{CellKind, GridField};
use crate::temperature::TemperatureField;

/// Nodata sentinel used by the writer unless the caller picks another.
pub const DEFAULT_NODATA: f64 = -9999.0;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn header_err(path: &Path, line: usize, detail: impl Into<String>) -> Error {
    Error::MalformedHeader {
        path: path.to_path_buf(),
        line,
        detail: detail.into(),
    }
}

fn value_err(path: &Path, line: usize, detail: impl Into<String>) -> Error {
    Error::BadValue {
        path: path.to_path_buf(),
        line,
        detail: detail.into(),
    }
}

/// Parse one `key value` header line, matching the key case-insensitively.
fn header_field<T: std::str::FromStr>(
    path: &Path,
    lines: &mut std::iter::Enumerate<std::str::Lines>,
    key: &str,
) -> Result<T> {
    let (idx, text) = lines
        .next()
        .ok_or_else(|| header_err(path, 0, format!("missing {key} line")))?;
    let line = idx + 1;
    let mut parts = text.split_whitespace();
    let found = parts
        .next()
        .ok_or_else(|| header_err(path, line, format!("expected `{key} <value>`")))?;
    if !found.eq_ignore_ascii_case(key) {
        return Err(header_err(
            path,
            line,
            format!("expected key `{key}`, found `{found}`"),
        ));
    }
    let raw = parts
        .next()
        .ok_or_else(|| header_err(path, line, format!("`{key}` has no value")))?;
    if parts.next().is_some() {
        return Err(header_err(path, line, format!("trailing tokens after `{key}`")));
    }
    raw.parse::<T>()
        .map_err(|_| header_err(path, line, format!("cannot parse `{raw}` for `{key}`")))
}

fn is_nodata(v: f64, sentinel: f64) -> bool {
    v == sentinel || (v.is_nan() && sentinel.is_nan())
}

/// Read an ASCII raster. Cells equal to the header's nodata sentinel load
/// as missing; all other cells must be finite sample values.
pub fn load_raster(path: &Path) -> Result<GridField> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let ncols: usize = header_field(path, &mut lines, "ncols")?;
    let nrows: usize = header_field(path, &mut lines, "nrows")?;
    let nodata: f64 = header_field(path, &mut lines, "NODATA_value")?;
    if ncols == 0 || nrows == 0 {
        return Err(header_err(path, 1, "raster dimensions must be positive"));
    }
    let expected = ncols * nrows;
    let mut values = Vec::with_capacity(expected);
    let mut mask = Vec::with_capacity(expected);
    for (idx, text) in lines {
        let line = idx + 1;
        for token in text.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| value_err(path, line, format!("cannot parse `{token}`")))?;
            if is_nodata(v, nodata) {
                values.push(f64::NAN);
                mask.push(CellKind::Missing);
            } else if v.is_finite() {
                values.push(v);
                mask.push(CellKind::Sample);
            } else {
                return Err(value_err(path, line, format!("non-finite sample `{token}`")));
            }
        }
    }
    if values.len() != expected {
        return Err(Error::CountMismatch {
            path: path.to_path_buf(),
            expected,
            actual: values.len(),
        });
    }
    Ok(GridField::new(ncols, nrows, values, mask))
}

fn render_raster(
    width: usize,
    height: usize,
    cell: impl Fn(usize) -> Option<f64>,
    sentinel: f64,
) -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!("ncols {width}\n"));
    out.push_str(&format!("nrows {height}\n"));
    out.push_str(&format!("NODATA_value {sentinel}\n"));
    for y in 0..height {
        for x in 0..width {
            let site = y * width + x;
            if x > 0 {
                out.push(' ');
            }
            match cell(site) {
                Some(v) => {
                    if is_nodata(v, sentinel) {
                        return Err(Error::SentinelCollision { sentinel, site });
                    }
                    out.push_str(&format!("{v}"));
                }
                None => out.push_str(&format!("{sentinel}")),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Write a grid with a caller-chosen nodata sentinel. A sample value equal
/// to the sentinel would silently turn into a gap on reload, so it is
/// rejected instead.
pub fn write_raster_with(grid: &GridField, path: &Path, sentinel: f64) -> Result<()> {
    let text = render_raster(
        grid.width(),
        grid.height(),
        |site| {
            if grid.is_sample(site) {
                Some(grid.value(site))
            } else {
                None
            }
        },
        sentinel,
    )?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Write a grid with the default nodata sentinel.
pub fn write_raster(grid: &GridField, path: &Path) -> Result<()> {
    write_raster_with(grid, path, DEFAULT_NODATA)
}

/// Export a temperature field as a raster with no nodata cells.
pub fn write_temperature_raster(temps: &TemperatureField, path: &Path) -> Result<()> {
    let lattice = temps.lattice();
    let text = render_raster(
        lattice.width,
        lattice.height,
        |site| Some(temps.value(site)),
        DEFAULT_NODATA,
    )?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Heatmap rendering options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapOptions {
    /// Clip the scale at this upper percentile of the sample values
    /// (nearest rank, in percent); values above it render at full scale.
    pub clip_percentile: Option<f64>,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        HeatmapOptions {
            clip_percentile: None,
        }
    }
}

/// Color of missing cells in heatmaps.
pub const MISSING_COLOR: [u8; 3] = [255, 0, 255];

/// Nearest-rank percentile of a non-empty sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Render the grid as a binary PPM image: linear grayscale over the sample
/// range, missing cells in magenta.
pub fn emit_heatmap(grid: &GridField, path: &Path, options: &HeatmapOptions) -> Result<()> {
    if let Some(q) = options.clip_percentile {
        if !(q > 0.0 && q <= 100.0) {
            return Err(Error::InvalidConfig(format!(
                "clip percentile must lie in (0, 100], got {q}"
            )));
        }
    }
    let mut samples: Vec<f64> = grid.sample_sites().map(|s| grid.value(s)).collect();
    samples.sort_by(|a, b| a.partial_cmp(b).expect("sample values are finite"));
    let (lo, hi) = match samples.as_slice() {
        [] => (0.0, 0.0),
        all => {
            let hi = match options.clip_percentile {
                Some(q) => percentile(all, q),
                None => all[all.len() - 1],
            };
            (all[0], hi)
        }
    };
    let span = hi - lo;
    let mut pixels = Vec::with_capacity(3 * grid.len());
    for site in 0..grid.len() {
        if !grid.is_sample(site) {
            pixels.extend_from_slice(&MISSING_COLOR);
            continue;
        }
        // Degenerate scale renders as uniform black.
        let t = if span > 0.0 {
            ((grid.value(site) - lo) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let g = (t * 255.0).round() as u8;
        pixels.extend_from_slice(&[g, g, g]);
    }
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    write!(file, "P6\n{} {}\n255\n", grid.width(), grid.height()).map_err(|e| io_err(path, e))?;
    file.write_all(&pixels).map_err(|e| io_err(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temperature::TemperatureProvenance;
    use tempfile::tempdir;

    fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn loads_a_two_by_two_grid_with_one_gap() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.grid",
            "ncols 2\nnrows 2\nNODATA_value -9999\n1 2\n-9999 4\n",
        );
        let g = load_raster(&path).unwrap();
        assert_eq!((g.width(), g.height()), (2, 2));
        assert_eq!(g.missing_count(), 1);
        assert!(!g.is_sample(2), "nodata cell becomes missing");
        assert_eq!(g.value(0), 1.0);
        assert_eq!(g.value(3), 4.0);
    }

    #[test]
    fn header_keys_are_case_insensitive() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.grid",
            "NCOLS 2\nNROWS 1\nnodata_value -1\n5 6\n",
        );
        let g = load_raster(&path).unwrap();
        assert_eq!(g.sample_count(), 2);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = tempdir().unwrap();
        let mask = vec![
            CellKind::Sample,
            CellKind::Missing,
            CellKind::Sample,
            CellKind::Sample,
            CellKind::Missing,
            CellKind::Sample,
        ];
        let g = GridField::new(
            3,
            2,
            vec![0.1, f64::NAN, 1.0 / 3.0, -2.75e-8, f64::NAN, 123456.789],
            mask,
        );
        let first = dir.path().join("a.grid");
        let second = dir.path().join("b.grid");
        write_raster(&g, &first).unwrap();
        let reloaded = load_raster(&first).unwrap();
        assert_eq!(reloaded, g, "values and mask survive the round trip");
        write_raster(&reloaded, &second).unwrap();
        assert_eq!(
            fs::read(&first).unwrap(),
            fs::read(&second).unwrap(),
            "rewriting a loaded file reproduces it byte for byte"
        );
    }

    #[test]
    fn truncated_body_reports_expected_and_actual_counts() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.grid",
            "ncols 3\nnrows 2\nNODATA_value -9999\n1 2 3\n4\n",
        );
        match load_raster(&path).unwrap_err() {
            Error::CountMismatch {
                expected, actual, ..
            } => {
                assert_eq!(expected, 6);
                assert_eq!(actual, 4);
            }
            other => panic!("expected CountMismatch, got {other:?}"),
        }
    }

    #[test]
    fn surplus_values_are_also_a_count_mismatch() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.grid",
            "ncols 2\nnrows 1\nNODATA_value -9999\n1 2 3\n",
        );
        assert!(matches!(
            load_raster(&path).unwrap_err(),
            Error::CountMismatch {
                expected: 2,
                actual: 3,
                ..
            }
        ));
    }

    #[test]
    fn malformed_header_names_the_line() {
        let dir = tempdir().unwrap();
        let path = write_file(&dir, "g.grid", "ncols 2\nrows 2\nNODATA_value 0\n1 2 3 4\n");
        match load_raster(&path).unwrap_err() {
            Error::MalformedHeader { line, detail, .. } => {
                assert_eq!(line, 2, "the bad key sits on line 2");
                assert!(detail.contains("nrows"), "detail names the expected key");
            }
            other => panic!("expected MalformedHeader, got {other:?}"),
        }
    }

    #[test]
    fn unparseable_cell_names_the_line() {
        let dir = tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.grid",
            "ncols 2\nnrows 2\nNODATA_value -9999\n1 2\nx 4\n",
        );
        match load_raster(&path).unwrap_err() {
            Error::BadValue { line, detail, .. } => {
                assert_eq!(line, 5);
                assert!(detail.contains('x'));
            }
            other => panic!("expected BadValue, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_maps_to_not_found_class() {
        let err = load_raster(Path::new("/nonexistent/raster.grid")).unwrap_err();
        assert_eq!(err.class(), "IO_NOT_FOUND");
    }

    #[test]
    fn sample_equal_to_sentinel_is_rejected_on_write() {
        let dir = tempdir().unwrap();
        let g = GridField::from_values(2, 1, vec![1.0, -9999.0]);
        match write_raster(&g, &dir.path().join("g.grid")).unwrap_err() {
            Error::SentinelCollision { sentinel, site } => {
                assert_eq!(sentinel, -9999.0);
                assert_eq!(site, 1);
            }
            other => panic!("expected SentinelCollision, got {other:?}"),
        }
        // A different sentinel sidesteps the collision.
        write_raster_with(&g, &dir.path().join("g.grid"), -1e30).unwrap();
    }

    #[test]
    fn temperature_export_has_no_nodata_cells() {
        let dir = tempdir().unwrap();
        let temps = TemperatureField::new(
            3,
            2,
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            TemperatureProvenance::Uniform,
        )
        .unwrap();
        let path = dir.path().join("t.grid");
        write_temperature_raster(&temps, &path).unwrap();
        let g = load_raster(&path).unwrap();
        assert_eq!(g.missing_count(), 0);
        assert_eq!(g.value(5), 0.6);
    }

    fn read_ppm(path: &Path) -> (usize, usize, Vec<u8>) {
        let bytes = fs::read(path).unwrap();
        let header_end = bytes
            .windows(1)
            .enumerate()
            .filter(|(_, w)| w[0] == b'\n')
            .map(|(i, _)| i)
            .nth(2)
            .unwrap();
        let header = std::str::from_utf8(&bytes[..header_end]).unwrap();
        let mut parts = header.split_whitespace();
        assert_eq!(parts.next(), Some("P6"));
        let w: usize = parts.next().unwrap().parse().unwrap();
        let h: usize = parts.next().unwrap().parse().unwrap();
        assert_eq!(parts.next(), Some("255"));
        (w, h, bytes[header_end + 1..].to_vec())
    }

    #[test]
    fn constant_field_renders_uniformly() {
        let dir = tempdir().unwrap();
        let g = GridField::from_values(4, 3, vec![7.0; 12]);
        let path = dir.path().join("c.ppm");
        emit_heatmap(&g, &path, &HeatmapOptions::default()).unwrap();
        let (w, h, pixels) = read_ppm(&path);
        assert_eq!((w, h), (4, 3));
        assert_eq!(pixels.len(), 3 * 12);
        assert!(pixels.iter().all(|&b| b == pixels[0]), "single color");
    }

    #[test]
    fn checker_field_renders_with_two_gray_levels() {
        let dir = tempdir().unwrap();
        let g = GridField::from_values(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let path = dir.path().join("checker.ppm");
        emit_heatmap(&g, &path, &HeatmapOptions::default()).unwrap();
        let (_, _, pixels) = read_ppm(&path);
        let grays: std::collections::HashSet<u8> = pixels.iter().copied().collect();
        assert_eq!(
            grays,
            [0u8, 255].into_iter().collect(),
            "exactly black and white"
        );
        assert_eq!(&pixels[0..3], &[0, 0, 0]);
        assert_eq!(&pixels[3..6], &[255, 255, 255]);
    }

    #[test]
    fn missing_cells_render_magenta() {
        let dir = tempdir().unwrap();
        let g = GridField::new(
            2,
            1,
            vec![1.0, f64::NAN],
            vec![CellKind::Sample, CellKind::Missing],
        );
        let path = dir.path().join("gap.ppm");
        emit_heatmap(&g, &path, &HeatmapOptions::default()).unwrap();
        let (_, _, pixels) = read_ppm(&path);
        assert_eq!(&pixels[3..6], &[255, 0, 255]);
    }

    #[test]
    fn clipping_maps_top_values_to_full_scale() {
        let dir = tempdir().unwrap();
        // 20 values 1..=19 plus one huge outlier.
        let mut values: Vec<f64> = (0..20).map(|i| i as f64).collect();
        values.push(1e6);
        values.extend(std::iter::repeat(0.0).take(4));
        let g = GridField::from_values(25, 1, values);
        let path = dir.path().join("clip.ppm");
        emit_heatmap(
            &g,
            &path,
            &HeatmapOptions {
                clip_percentile: Some(95.0),
            },
        )
        .unwrap();
        let (_, _, pixels) = read_ppm(&path);
        let gray = |site: usize| pixels[3 * site];
        assert_eq!(gray(20), 255, "outlier clips to full scale");
        assert_eq!(gray(19), 255, "the 95th-percentile value itself is full scale");
        assert!(gray(18) < 255, "values below the clip stay below full scale");
        // Without clipping the outlier swallows the whole scale.
        let flat = dir.path().join("noclip.ppm");
        emit_heatmap(&g, &flat, &HeatmapOptions::default()).unwrap();
        let (_, _, raw) = read_ppm(&flat);
        assert_eq!(raw[3 * 19], 0, "unclipped scale crushes ordinary values");
    }
}

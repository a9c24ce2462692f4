//! Current-map CSV files and grayscale renderings.
//!
//! ```text
//! # axis1 <min> <max>
//! # axis2 <min> <max>
//! v00,v01,...
//! v10,v11,...
//! ```
//! Row 0 is the minimum of axis 2. Values are written with the shortest
//! representation that parses back to the same `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use image::{GrayImage, Luma};
use ndarray::Array2;

use super::CurrentMap;
use crate::error::{Error, Result};
use crate::grid::VoltageWindow;

pub fn write_map_csv<W: Write>(map: &CurrentMap, mut out: W) -> Result<()> {
    let w = &map.window;
    writeln!(out, "# axis1 {} {}", w.axis1_range.0, w.axis1_range.1)?;
    writeln!(out, "# axis2 {} {}", w.axis2_range.0, w.axis2_range.1)?;
    for row in map.values.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn save_map_csv(map: &CurrentMap, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_map_csv(map, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Reads a map written by [`save_map_csv`] or produced by an instrument.
/// The returned map is not rescaled (`scale_factor == 1`).
pub fn load_recorded_map(path: impl AsRef<Path>) -> Result<CurrentMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let perr = |row: usize, col: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        col,
        message,
    };

    let mut axis1 = None;
    let mut axis2 = None;
    let mut values: Vec<f64> = Vec::new();
    let mut cols = 0usize;
    let mut rows = 0usize;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let parts: Vec<&str> = header.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(perr(rows, 0, format!("malformed header '{line}'")));
            }
            let lo: f64 = parts[1].parse().map_err(|_| perr(rows, 0, format!("bad axis value '{}'", parts[1])))?;
            let hi: f64 = parts[2].parse().map_err(|_| perr(rows, 0, format!("bad axis value '{}'", parts[2])))?;
            match parts[0] {
                "axis1" => axis1 = Some((lo, hi)),
                "axis2" => axis2 = Some((lo, hi)),
                other => return Err(perr(rows, 0, format!("unknown header key '{other}'"))),
            }
            continue;
        }
        let mut n = 0;
        for (col, cell) in line.split(',').enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| perr(rows, col, format!("cannot parse '{}' as a number", cell.trim())))?;
            if !v.is_finite() {
                return Err(perr(rows, col, format!("non-finite value '{}'", cell.trim())));
            }
            values.push(v);
            n += 1;
        }
        if rows == 0 {
            cols = n;
        } else if n != cols {
            return Err(perr(rows, n.min(cols), format!("row has {n} values, expected {cols}")));
        }
        rows += 1;
    }
    let axis1 = axis1.ok_or_else(|| perr(0, 0, "missing '# axis1' header".into()))?;
    let axis2 = axis2.ok_or_else(|| perr(0, 0, "missing '# axis2' header".into()))?;
    if rows == 0 {
        return Err(perr(0, 0, "no data rows".into()));
    }
    let window = VoltageWindow::new(axis1, axis2, rows, cols).map_err(|e| perr(0, 0, e.to_string()))?;
    let values = Array2::from_shape_vec((rows, cols), values).expect("rectangular by construction");
    Ok(CurrentMap::new(window, values))
}

/// Linear grayscale rendering, minimum black and maximum white, row 0 at the bottom.
pub fn save_map_png(values: &Array2<f64>, path: impl AsRef<Path>) -> Result<()> {
    let (rows, cols) = values.dim();
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let img = GrayImage::from_fn(cols as u32, rows as u32, |x, y| {
        let v = values[[rows - 1 - y as usize, x as usize]];
        let g = if v.is_finite() { ((v - lo) / span * 255.0).round() } else { 0.0 };
        Luma([g.clamp(0.0, 255.0) as u8])
    });
    img.save(path).map_err(|e| Error::Render(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        fs::write(&p, "# axis1 0 1\n# axis2 -1 1\n0,1\n2,3\n").unwrap();
        let m = load_recorded_map(&p).unwrap();
        assert_eq!(m.values, ndarray::array![[0.0, 1.0], [2.0, 3.0]]);
        assert_eq!(m.window.axis2_range, (-1.0, 1.0));
    }

    #[test]
    fn nan_cell_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        fs::write(&p, "# axis1 0 1\n# axis2 0 1\n0,1\n2,NaN\n").unwrap();
        match load_recorded_map(&p).unwrap_err() {
            Error::Parse { row, col, .. } => assert_eq!((row, col), (1, 1)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        fs::write(&p, "# axis1 0 1\n# axis2 0 1\n0,1\n2\n").unwrap();
        assert!(matches!(load_recorded_map(&p), Err(Error::Parse { row: 1, .. })));
    }

    #[test]
    fn missing_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        fs::write(&p, "0,1\n2,3\n").unwrap();
        assert!(matches!(load_recorded_map(&p), Err(Error::Parse { .. })));
    }
}

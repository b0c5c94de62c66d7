use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::semigroups::OrbitSeries;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Pretty JSON with object keys sorted.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let v = serde_json::to_value(value).map_err(|e| io_err(path, e))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| io_err(path, e))?;
    s.push('\n');
    write_text(path, &s)
}

pub fn csv(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Columns `t, norm, x0, x1, ...`.
pub fn orbit_csv(orbit: &OrbitSeries<f64>) -> String {
    let dim = orbit.states.first().map_or(0, |s| s.coords().len());
    let mut header = vec!["t".to_string(), "norm".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    let rows = orbit.states.iter().enumerate().map(|(k, s)| {
        let mut row = vec![orbit.grid.point(k), orbit.norms[k]];
        row.extend_from_slice(s.coords());
        row
    });
    csv(&header, rows)
}

/// `||M(t) - M(T)||` for the running mean `M(t) = (1/t) int_0^t x`, trapezoid rule, `M(0) = x(0)`.
pub fn cesaro_residuals(orbit: &OrbitSeries<f64>) -> Result<Vec<f64>> {
    let Some(first) = orbit.states.first() else {
        return Ok(Vec::new());
    };
    let h = orbit.grid.step();
    let mut integral = vec![0.0; first.coords().len()];
    let mut means = vec![first.coords().to_vec()];
    for k in 1..orbit.states.len() {
        let (a, b) = (orbit.states[k - 1].coords(), orbit.states[k].coords());
        for i in 0..integral.len() {
            integral[i] += 0.5 * h * (a[i] + b[i]);
        }
        let t = h * k as f64;
        means.push(integral.iter().map(|v| v / t).collect());
    }
    let last = means.last().cloned().unwrap_or_default();
    means
        .into_iter()
        .map(|m| {
            let d: Vec<f64> = m.iter().zip(&last).map(|(a, b)| a - b).collect();
            Ok(first.with_coords(d)?.norm())
        })
        .collect()
}

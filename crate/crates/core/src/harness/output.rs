//! Report files: the cell table as CSV, a JSON summary, and plot-ready
//! two-column `.dat` files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{mean_curve, ExperimentReport, RateFit};
use crate::bounds::BoundReport;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "n,k,repeat,empirical,holdout,seconds";

pub fn write_report_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{:e},{:e},{:e}\n",
            r.n, r.k, r.repeat, r.empirical_error, r.holdout_error, r.fit_seconds
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct Summary<'a> {
    algorithm: super::Algorithm,
    cells: usize,
    descent_violations: usize,
    rate_fit: &'a Option<RateFit>,
    bound_rows: &'a [BoundReport],
}

pub fn write_report_json(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let summary = Summary {
        algorithm: report.algorithm,
        cells: report.rows.len(),
        descent_violations: report.descent_violations,
        rate_fit: &report.rate_fit,
        bound_rows: &report.bound_rows,
    };
    let text = serde_json::to_string_pretty(&summary)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes `curve_n{n}.dat` (k vs mean hold-out error) for every training
/// size and, with at least two sizes, `loglog.dat` (ln n vs ln of the mean
/// error, averaged over `k`). Returns the paths written.
pub fn write_curve_files(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut sizes: Vec<usize> = report.rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    let mut written = Vec::new();
    let mut loglog = Vec::new();
    for &n in &sizes {
        let curve = mean_curve(report, n);
        let path = dir.join(format!("curve_n{n}.dat"));
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        for &(k, e) in &curve {
            writeln!(f, "{k} {e:e}").map_err(|e| Error::io(&path, e))?;
        }
        let mean = curve.iter().map(|c| c.1).sum::<f64>() / curve.len() as f64;
        loglog.push(((n as f64).ln(), mean.ln()));
        written.push(path);
    }
    if loglog.len() >= 2 {
        let path = dir.join("loglog.dat");
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        for (x, y) in loglog {
            writeln!(f, "{x:e} {y:e}").map_err(|e| Error::io(&path, e))?;
        }
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Algorithm, CellResult};

    fn report() -> ExperimentReport {
        let cell = |n, k, repeat, h| CellResult {
            n,
            k,
            repeat,
            empirical_error: 0.5 * h,
            holdout_error: h,
            fit_seconds: 0.01,
            descent_violations: 0,
        };
        ExperimentReport {
            algorithm: Algorithm::KMeans,
            rows: vec![
                cell(10, 1, 0, 1.0),
                cell(10, 2, 0, 0.5),
                cell(100, 1, 0, 0.9),
            ],
            rate_fit: None,
            bound_rows: Vec::new(),
            descent_violations: 0,
        }
    }

    #[test]
    fn files() {
        let dir = tempfile::tempdir().unwrap();
        let r = report();
        write_report_csv(&r, dir.path().join("t.csv")).unwrap();
        let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 3);
        write_report_json(&r, dir.path().join("t.json")).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
        assert!(v.get("rate_fit").is_some() && v.get("bound_rows").is_some());
        let paths = write_curve_files(&r, dir.path().join("plots")).unwrap();
        assert_eq!(paths.len(), 3);
        let c = fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(c.lines().count(), 2);
    }
}

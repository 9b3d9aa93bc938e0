//! Empirical convergence rates under the theoretical `k_n` schedules.

use serde::{Deserialize, Serialize};

use super::{mean_curve, tradeoff_experiment, Algorithm, ExperimentReport, ExperimentSpec, KGrid};
use crate::bounds::{self, Family};
use crate::error::{Error, Result};
use crate::geometry::ManifoldSpec;

/// Which model-size schedule drives `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    KMeans,
    KFlats,
}

impl Schedule {
    pub fn family(self) -> Family {
        match self {
            Schedule::KMeans => Family::KMeans,
            Schedule::KFlats => Family::KFlats,
        }
    }

    pub fn algorithm(self) -> Algorithm {
        match self {
            Schedule::KMeans => Algorithm::KMeans,
            Schedule::KFlats => Algorithm::KFlats,
        }
    }

    /// Unrounded `k_n` with the surrogate quantization constant. A missing
    /// density norm falls back to the density-free bound; a missing curvature
    /// counts as flat.
    pub fn k_n(self, manifold: &ManifoldSpec, n: usize) -> f64 {
        let d = manifold.intrinsic_dim();
        let c = bounds::quantization_constant(d, self.family().order());
        match self {
            Schedule::KMeans => {
                let rho = manifold
                    .density_norm
                    .unwrap_or_else(|| bounds::holder_density_bound(d));
                bounds::kn_kmeans(n, d, rho, c)
            }
            Schedule::KFlats => bounds::kn_kflats(n, d, manifold.curvature.unwrap_or(0.0), c),
        }
    }

    /// `max(1, round(k_n))`.
    pub fn k_for(self, manifold: &ManifoldSpec, n: usize) -> usize {
        (self.k_n(manifold, n).round() as usize).max(1)
    }

    /// Exponent of `n` in the corresponding rate.
    pub fn predicted_slope(self, d: usize) -> f64 {
        let d = d as f64;
        match self {
            Schedule::KMeans => -1.0 / (d + 2.0),
            Schedule::KFlats => -2.0 / (d + 4.0),
        }
    }
}

/// Least-squares line through `(ln n, ln error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    /// All errors equal, so the slope carries no information.
    pub degenerate: bool,
}

pub fn fit_loglog(ns: &[f64], errors: &[f64]) -> Result<RateFit> {
    if ns.len() != errors.len() || ns.len() < 2 {
        return Err(Error::param(
            "need at least two (n, error) pairs of equal length",
        ));
    }
    if ns
        .iter()
        .chain(errors)
        .any(|v| !(*v > 0.0 && v.is_finite()))
    {
        return Err(Error::param("sizes and errors must be positive and finite"));
    }
    let x: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("sizes must not all be equal"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (rss / m).sqrt(),
        degenerate: errors.iter().all(|&e| e == errors[0]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub schedule: Schedule,
    /// `(n, k, mean hold-out error)`.
    pub points: Vec<(usize, usize, f64)>,
    pub fit: RateFit,
    pub predicted_slope: f64,
    pub experiment: ExperimentReport,
}

/// Runs `spec` with `k` set by `schedule` at every training size and fits the
/// log-log slope of the repeat-averaged hold-out error. The experiment's own `k_grid`
/// and `algorithm` are overridden.
pub fn rate_experiment(spec: &ExperimentSpec, schedule: Schedule) -> Result<RateReport> {
    let mut sizes = spec.train_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 4 {
        return Err(Error::param(
            "rate fits need at least 4 distinct training sizes",
        ));
    }
    if (sizes[sizes.len() - 1] as f64) < 100.0 * sizes[0] as f64 {
        return Err(Error::param(
            "training sizes must span at least two decades",
        ));
    }
    let mut run = spec.clone();
    run.k_grid = KGrid::Auto;
    run.algorithm = schedule.algorithm();
    let mut experiment = tradeoff_experiment(&run)?;
    let mut points = Vec::new();
    for &n in &sizes {
        for (k, e) in mean_curve(&experiment, n) {
            points.push((n, k, e));
        }
    }
    let ns: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let es: Vec<f64> = points.iter().map(|p| p.2).collect();
    let fit = fit_loglog(&ns, &es)?;
    experiment.rate_fit = Some(fit);
    let d = match schedule {
        Schedule::KFlats => run.flat_dim(),
        Schedule::KMeans => run.manifold.intrinsic_dim(),
    };
    Ok(RateReport {
        schedule,
        points,
        fit,
        predicted_slope: schedule.predicted_slope(d),
        experiment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmeans::FitConfig;

    #[test]
    fn exact_power_law() {
        let ns = [100.0, 1000.0, 1e4, 1e5];
        let es: Vec<f64> = ns.iter().map(|n: &f64| 3.0 * n.powf(-0.25)).collect();
        let fit = fit_loglog(&ns, &es).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert!(!fit.degenerate);
        let flat = fit_loglog(&ns, &[0.5; 4]).unwrap();
        assert!(flat.degenerate);
        assert!(fit_loglog(&ns, &[0.5, 0.0, 0.1, 0.1]).is_err());
    }

    #[test]
    fn schedules() {
        let circle = ManifoldSpec::circle(2).unwrap();
        let ks: Vec<usize> = [100, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| Schedule::KMeans.k_for(&circle, n))
            .collect();
        assert_eq!(ks, vec![1, 1, 2, 3]);
        let kf: Vec<usize> = [100, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| Schedule::KFlats.k_for(&circle, n))
            .collect();
        assert_eq!(kf, vec![2, 2, 3, 3]);
        let disk = ManifoldSpec::flat_disk(2, 2).unwrap();
        assert_eq!(Schedule::KFlats.k_for(&disk, 1_000_000), 1);
        assert_eq!(Schedule::KMeans.predicted_slope(1), -1.0 / 3.0);
        assert_eq!(Schedule::KFlats.predicted_slope(1), -0.4);
    }

    #[test]
    fn grid_requirements() {
        let circle = ManifoldSpec::circle(2).unwrap();
        let mut spec =
            ExperimentSpec::new(circle, vec![10, 20, 40], KGrid::Auto, Algorithm::KMeans);
        assert!(rate_experiment(&spec, Schedule::KMeans).is_err());
        spec.train_sizes = vec![10, 20, 40, 80];
        assert!(rate_experiment(&spec, Schedule::KMeans).is_err());
        spec.train_sizes = vec![20, 200, 600, 2000];
        spec.repeats = 1;
        spec.holdout_size = 2000;
        spec.fit = FitConfig::default().with_restarts(2);
        let report = rate_experiment(&spec, Schedule::KFlats).unwrap();
        assert_eq!(report.points.len(), 4);
        assert_eq!(report.experiment.rate_fit, Some(report.fit));
    }
}

//! Closed-form parameter schedules and error bounds for k-means and k-flats.
//!
//! Notation used below: `n` samples, `k` centers or flats, intrinsic dimension
//! `d`, confidence `δ`, density norm `ρ = ∫_M p^{d/(d+2)} dμ`, curvature
//! constant `κ`, and quantization constant `C`.
//!
//! The k-means approximation term is the Zador form `C k^{-2/d} ‖p‖` with
//! `‖p‖ = ρ^{(d+2)/d}`; the k-flats term is `C (κ/k)^{4/d}`. Each `k_n` schedule
//! is the `k` that equalizes the statistical summand (with the `√ln(1/δ)` factor
//! set to one) and the approximation summand, and each rate is the sum of the two
//! at that `k`, times the confidence factor.
//!
//! `C` is only known asymptotically; [`quantization_constant`] returns the
//! asymptote `(d/(2πe))^{r/2}`, and every evaluator accepts an explicit value.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Which approximating family a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    KMeans,
    KFlats,
}

impl Family {
    /// Quantization order: 2 for points, 4 for flats.
    pub fn order(self) -> u32 {
        match self {
            Family::KMeans => 2,
            Family::KFlats => 4,
        }
    }
}

/// Whether the k-means rate accounts for k-means++ seeding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Exact empirical minimizer.
    Exact,
    /// k-means++ seeding, paying the `8(ln k + 2)` expected approximation factor.
    PlusPlus,
}

/// Asymptotic surrogate `(d / (2πe))^{r/2}` for the order-`r` quantization constant.
pub fn quantization_constant(d: usize, r: u32) -> f64 {
    (d as f64 / (2.0 * PI * E)).powf(r as f64 / 2.0)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

fn check_counts(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::param("n and k must be at least 1"));
    }
    Ok(())
}

/// Uniform deviation bound for k-means: `k √(18π/n) + √(8 ln(1/δ) / n)`.
pub fn stat_kmeans(n: usize, k: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    check_counts(n, k)?;
    let n = n as f64;
    Ok(k as f64 * (18.0 * PI / n).sqrt() + (8.0 * (1.0 / delta).ln() / n).sqrt())
}

/// Uniform deviation bound for k-flats: `k √(2πd/n) + √(ln(1/δ) / (2n))`.
pub fn stat_kflats(n: usize, k: usize, d: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    check_counts(n, k)?;
    let n = n as f64;
    Ok(k as f64 * (2.0 * PI * d as f64 / n).sqrt() + ((1.0 / delta).ln() / (2.0 * n)).sqrt())
}

/// `‖p‖_{d/(d+2)} = ρ^{(d+2)/d}`.
pub fn density_quasi_norm(d: usize, density_norm: f64) -> f64 {
    let d = d as f64;
    density_norm.powf((d + 2.0) / d)
}

/// Zador-form k-means approximation error `C k^{-2/d} ‖p‖`.
pub fn approx_kmeans(k: f64, d: usize, density_norm: f64, c: f64) -> f64 {
    c * k.powf(-2.0 / d as f64) * density_quasi_norm(d, density_norm)
}

/// k-flats approximation error `C (κ/k)^{4/d}`.
pub fn approx_kflats(k: f64, d: usize, curvature: f64, c: f64) -> f64 {
    c * (curvature / k).powf(4.0 / d as f64)
}

/// Statistical summand balanced by [`kn_kmeans`]: `24√π k n^{-1/2}`.
pub fn balance_stat_kmeans(n: usize, k: f64) -> f64 {
    24.0 * PI.sqrt() * k / (n as f64).sqrt()
}

/// Statistical summand balanced by [`kn_kflats`]: `2√(2πd) k n^{-1/2}`.
pub fn balance_stat_kflats(n: usize, k: f64, d: usize) -> f64 {
    2.0 * (2.0 * PI * d as f64).sqrt() * k / (n as f64).sqrt()
}

/// `k_n = n^{d/(2(d+2))} (C/(24√π))^{d/(d+2)} ρ`.
pub fn kn_kmeans(n: usize, d: usize, density_norm: f64, c: f64) -> f64 {
    let df = d as f64;
    let e = df / (df + 2.0);
    (n as f64).powf(e / 2.0) * (c / (24.0 * PI.sqrt())).powf(e) * density_norm
}

/// `k_n = n^{d/(2(d+4))} (C/(2√(2πd)))^{d/(d+4)} κ^{4/(d+4)}`.
pub fn kn_kflats(n: usize, d: usize, curvature: f64, c: f64) -> f64 {
    let df = d as f64;
    let e = df / (df + 4.0);
    (n as f64).powf(e / 2.0)
        * (c / (2.0 * (2.0 * PI * df).sqrt())).powf(e)
        * curvature.powf(4.0 / (df + 4.0))
}

/// `8 (ln k + 2)`: expected approximation factor of k-means++ seeding.
pub fn kmeanspp_factor(k: f64) -> f64 {
    8.0 * (k.ln() + 2.0)
}

/// k-means error bound at the balanced `k_n`.
///
/// Exact solver: `2 √ln(1/δ) n^{-1/(d+2)} C^{d/(d+2)} (24√π)^{2/(d+2)} ρ`.
/// k-means++: eight times that, times
/// `2 + d/(d+2) (½ ln n + ln(C/(12√π)) + ln ‖p‖)`.
pub fn rate_kmeans(
    n: usize,
    d: usize,
    delta: f64,
    density_norm: f64,
    c: f64,
    solver: Solver,
) -> Result<f64> {
    check_delta(delta)?;
    check_counts(n, 1)?;
    let df = d as f64;
    let nf = n as f64;
    let base = 2.0
        * (1.0 / delta).ln().sqrt()
        * nf.powf(-1.0 / (df + 2.0))
        * c.powf(df / (df + 2.0))
        * (24.0 * PI.sqrt()).powf(2.0 / (df + 2.0))
        * density_norm;
    Ok(match solver {
        Solver::Exact => base,
        Solver::PlusPlus => {
            let log_term = 0.5 * nf.ln()
                + (c / (12.0 * PI.sqrt())).ln()
                + density_quasi_norm(d, density_norm).ln();
            8.0 * base * (2.0 + df / (df + 2.0) * log_term)
        }
    })
}

/// k-flats error bound at the balanced `k_n`:
/// `2 (8πd)^{2/(d+4)} C^{d/(d+4)} n^{-2/(d+4)} √(½ ln(1/δ)) κ^{4/(d+4)}`.
pub fn rate_kflats(n: usize, d: usize, delta: f64, curvature: f64, c: f64) -> Result<f64> {
    check_delta(delta)?;
    check_counts(n, 1)?;
    let df = d as f64;
    Ok(2.0
        * (8.0 * PI * df).powf(2.0 / (df + 4.0))
        * c.powf(df / (df + 4.0))
        * (n as f64).powf(-2.0 / (df + 4.0))
        * (0.5 * (1.0 / delta).ln()).sqrt()
        * curvature.powf(4.0 / (df + 4.0)))
}

/// Surface area of the unit `d`-sphere, `2π^{(d+1)/2} / Γ((d+1)/2)`; this is the
/// total root curvature of the sphere since its Gaussian curvature is 1.
pub fn sphere_curvature(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

/// Volume of the unit `d`-ball, `π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (h * PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// Density-free upper bound `ω_d^{2/(d+2)}` on the density norm.
pub fn holder_density_bound(d: usize) -> f64 {
    unit_ball_volume(d).powf(2.0 / (d as f64 + 2.0))
}

/// Inputs to [`decompose`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub delta: f64,
    pub density_norm: f64,
    pub curvature: f64,
    /// Quantization constant; the asymptotic surrogate when built by [`BoundInputs::new`].
    pub c_d: f64,
}

impl BoundInputs {
    /// Fills `c_d` with the surrogate constant for `family`.
    pub fn new(
        family: Family,
        n: usize,
        k: usize,
        d: usize,
        delta: f64,
        density_norm: f64,
        curvature: f64,
    ) -> Result<Self> {
        let inputs = Self {
            n,
            k,
            d,
            delta,
            density_norm,
            curvature,
            c_d: quantization_constant(d.max(1), family.order()),
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        check_counts(self.n, self.k)?;
        check_delta(self.delta)?;
        if self.d == 0 {
            return Err(Error::param("d must be at least 1"));
        }
        if !(self.density_norm > 0.0 && self.density_norm.is_finite()) {
            return Err(Error::param("density_norm must be positive"));
        }
        if !(self.curvature >= 0.0 && self.curvature.is_finite()) {
            return Err(Error::param("curvature must be non-negative"));
        }
        if !(self.c_d > 0.0 && self.c_d.is_finite()) {
            return Err(Error::param("C_d must be positive"));
        }
        Ok(())
    }
}

/// Measured and theoretical terms of the error decomposition
/// `E_ρ ≤ 2 sup|E_ρ − E_n| + E*_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: Family,
    pub inputs: BoundInputs,
    pub empirical: f64,
    pub holdout: f64,
    /// `|holdout − empirical|`.
    pub measured_gap: f64,
    pub statistical: f64,
    pub approximation: f64,
    /// `2 · statistical + approximation`.
    pub total: f64,
    /// Unrounded model-size schedule at `inputs.n`.
    pub k_n: f64,
}

pub fn decompose(
    family: Family,
    empirical: f64,
    holdout: f64,
    inputs: &BoundInputs,
) -> Result<BoundReport> {
    inputs.validate()?;
    if !empirical.is_finite() || !holdout.is_finite() {
        return Err(Error::param("errors must be finite"));
    }
    let BoundInputs {
        n,
        k,
        d,
        delta,
        density_norm,
        curvature,
        c_d,
    } = *inputs;
    let (statistical, approximation, k_n) = match family {
        Family::KMeans => (
            stat_kmeans(n, k, delta)?,
            approx_kmeans(k as f64, d, density_norm, c_d),
            kn_kmeans(n, d, density_norm, c_d),
        ),
        Family::KFlats => (
            stat_kflats(n, k, d, delta)?,
            approx_kflats(k as f64, d, curvature, c_d),
            kn_kflats(n, d, curvature, c_d),
        ),
    };
    Ok(BoundReport {
        family,
        inputs: *inputs,
        empirical,
        holdout,
        measured_gap: (holdout - empirical).abs(),
        statistical,
        approximation,
        total: 2.0 * statistical + approximation,
        k_n,
    })
}

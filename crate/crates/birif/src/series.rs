//! Taylor coefficients of a RIF and coefficient-norm partial sums.

use num_complex::Complex64;

use crate::bipoly::Rif;
use crate::error::{Error, Result};

/// A truncated two-variable Taylor coefficient grid.
#[derive(Debug, Clone)]
pub struct CoeffGrid {
    /// `a[k][l]` is the coefficient of `z1^k z2^l`.
    pub a: Vec<Vec<Complex64>>,
    pub kmax: usize,
    pub lmax: usize,
}

impl CoeffGrid {
    /// CSV export with columns `k, l, re, im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,re,im\n");
        for (k, row) in self.a.iter().enumerate() {
            for (l, c) in row.iter().enumerate() {
                out.push_str(&format!("{k},{l},{},{}\n", c.re, c.im));
            }
        }
        out
    }
}

/// A coefficient-weighted Dirichlet-type space.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// Tensor weight `(k+1)^{alpha1} (l+1)^{alpha2}`.
    Frak { alpha1: f64, alpha2: f64 },
    /// Weight `k + l + 1`.
    Bcg,
    /// Weight `(k+1)^alpha + (l+1)^alpha` (the coefficient form of the
    /// intersection of the two one-sided weighted spaces).
    BcgWeighted { alpha: f64 },
    /// Weight `k^{2m-1} + l^{2n-1} + 1` for higher-order derivatives.
    HigherOrder { m: u32, n: u32 },
}

impl SpaceSpec {
    /// The coefficient weight at `(k, l)`.
    pub fn weight(&self, k: usize, l: usize) -> f64 {
        let (kf, lf) = (k as f64, l as f64);
        match *self {
            SpaceSpec::Frak { alpha1, alpha2 } => {
                (kf + 1.0).powf(alpha1) * (lf + 1.0).powf(alpha2)
            }
            SpaceSpec::Bcg => kf + lf + 1.0,
            SpaceSpec::BcgWeighted { alpha } => (kf + 1.0).powf(alpha) + (lf + 1.0).powf(alpha),
            SpaceSpec::HigherOrder { m, n } => {
                kf.powi(2 * m as i32 - 1) + lf.powi(2 * n as i32 - 1) + 1.0
            }
        }
    }
}

/// Taylor coefficients of a RIF by power-series division: solves the graded
/// recurrence `sum p[i,j] a[k-i, l-j] = numer[k, l]` in increasing total
/// degree.
pub fn taylor_coeffs(rif: &Rif, kmax: usize, lmax: usize) -> Result<CoeffGrid> {
    let p = rif.denom();
    let p00 = p.coeff(0, 0);
    if p00.norm() == 0.0 {
        return Err(Error::InvalidDenominator("constant term vanishes".into()));
    }
    let numer = rif.full_numer();
    let p_terms: Vec<((usize, usize), Complex64)> = p
        .iter()
        .filter(|(&(i, j), _)| (i, j) != (0, 0))
        .map(|(&(i, j), &c)| ((i as usize, j as usize), c))
        .collect();

    let mut a = vec![vec![Complex64::new(0.0, 0.0); lmax + 1]; kmax + 1];
    for s in 0..=(kmax + lmax) {
        for k in s.saturating_sub(lmax)..=s.min(kmax) {
            let l = s - k;
            let mut acc = numer.coeff(k as u32, l as u32);
            for &((i, j), c) in &p_terms {
                if k >= i && l >= j {
                    acc -= c * a[k - i][l - j];
                }
            }
            a[k][l] = acc / p00;
        }
    }
    Ok(CoeffGrid { a, kmax, lmax })
}

/// Natural-log factorial table, built incrementally.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

/// Closed-form coefficient `a_{k+1, l+1}` of the RIF with denominator
/// `2 - z1 - z2`:
/// `C(k+l, k) 2^{-(k+l)} - C(k+l+2, k+1) 2^{-(k+l+2)}`.
///
/// Binomials are evaluated through log-factorials so the formula stays
/// finite for `k + l` up to a few thousand.
pub fn kappa_coeff_closed_form(k: usize, l: usize) -> f64 {
    let lf = ln_factorials(k + l + 2);
    let ln2 = std::f64::consts::LN_2;
    let t1 = lf[k + l] - lf[k] - lf[l] - (k + l) as f64 * ln2;
    let t2 = lf[k + l + 2] - lf[k + 1] - lf[l + 1] - (k + l + 2) as f64 * ln2;
    t1.exp() - t2.exp()
}

/// Partial sums `S(N) = sum_{k+l <= N} weight(k, l) |a_{kl}|^2` at the
/// requested diagonal cuts.
pub fn coeff_norm_partial_sums(
    grid: &CoeffGrid,
    space: &SpaceSpec,
    diagonal_cuts: &[usize],
) -> Result<Vec<f64>> {
    let max_cut = diagonal_cuts.iter().copied().max().unwrap_or(0);
    if max_cut > grid.kmax + grid.lmax {
        return Err(Error::Domain("diagonal cut exceeds the grid".into()));
    }
    // Per-diagonal contributions, then prefix sums.
    let mut per_diag = vec![0.0; grid.kmax + grid.lmax + 1];
    for (k, row) in grid.a.iter().enumerate() {
        for (l, c) in row.iter().enumerate() {
            per_diag[k + l] += space.weight(k, l) * c.norm_sqr();
        }
    }
    let mut prefix = vec![0.0; per_diag.len() + 1];
    for (i, v) in per_diag.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    Ok(diagonal_cuts.iter().map(|&n| prefix[n + 1]).collect())
}

/// What a tail fit is measuring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailFitMode {
    /// Values are coefficients indexed along the diagonal.
    CoefficientDiagonal,
    /// Values are partial sums indexed by the cut.
    PartialSumGrowth,
}

/// Result of a log-log tail fit.
#[derive(Debug, Clone, Copy)]
pub struct TailFit {
    pub slope: f64,
    /// Maximum absolute deviation of the fit over its window.
    pub residual: f64,
    /// Set when the decay is steeper than any fixed power law the fit can
    /// report meaningfully (for example geometric decay).
    pub super_polynomial: bool,
}

/// Least-squares slope in log-log coordinates over the last half of the
/// data. `xs` supplies the abscissae (indices or cut sizes); all values
/// must be positive.
pub fn tail_exponent_fit(xs: &[f64], values: &[f64], _mode: TailFitMode) -> Result<TailFit> {
    if values.len() < 8 || values.len() != xs.len() {
        return Err(Error::Domain("need at least 8 positive data points".into()));
    }
    if values.iter().any(|&v| v <= 0.0) || xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain("tail fits require positive inputs".into()));
    }
    let start = values.len() / 2;
    let x: Vec<f64> = xs[start..].iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = values[start..].iter().map(|v| v.ln()).collect();
    let m = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let det = m * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::FitRejected("degenerate abscissae".into()));
    }
    let slope = (m * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / m;
    let residual = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (slope * a + intercept - b).abs())
        .fold(0.0, f64::max);
    Ok(TailFit { slope, residual, super_polynomial: slope < -5.0 })
}

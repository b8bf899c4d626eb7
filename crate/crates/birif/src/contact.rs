//! Contact order estimation, pseudohyperbolic metrics, and local-model
//! limit checks.

use num_complex::Complex64;

use crate::bipoly::Rif;
use crate::error::{Error, Result};
use crate::slices::trace_branches;

/// Pseudohyperbolic distance on the unit disk: `|(z - w)/(1 - conj(w) z)|`.
pub fn pseudo_distance_disk(z: Complex64, w: Complex64) -> Result<f64> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::Domain("arguments must lie in the open unit disk".into()));
    }
    Ok(((z - w) / (Complex64::new(1.0, 0.0) - w.conj() * z)).norm())
}

/// Pseudohyperbolic distance on the upper half-plane:
/// `|(z - w)/(z - conj(w))|`.
pub fn pseudo_distance_halfplane(z: Complex64, w: Complex64) -> Result<f64> {
    if z.im <= 0.0 || w.im <= 0.0 {
        return Err(Error::Domain("arguments must lie in the upper half-plane".into()));
    }
    Ok(((z - w) / (z - w.conj())).norm())
}

/// Cayley transform `beta(w) = (1 + iw)/(1 - iw)` from the upper half-plane
/// onto the unit disk.
pub fn cayley_to_disk(w: Complex64) -> Result<Complex64> {
    if w.im <= 0.0 {
        return Err(Error::Domain("argument must lie in the upper half-plane".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok((Complex64::new(1.0, 0.0) + i * w) / (Complex64::new(1.0, 0.0) - i * w))
}

/// Inverse Cayley transform from the unit disk to the upper half-plane.
pub fn cayley_to_halfplane(z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain("argument must lie in the open unit disk".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok((z - Complex64::new(1.0, 0.0)) / (i * (z + Complex64::new(1.0, 0.0))))
}

/// A fitted contact order at a torus singularity.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ContactOrderEstimate {
    /// The singularity, as a pair of angles `(s, t)`.
    pub tau_angles: (f64, f64),
    /// Least-squares slope of `log min_j(1 - |a_j|)` against
    /// `log |tau2 - zeta2|`.
    pub fitted_slope: f64,
    /// The contact order: the slope rounded to the nearest even integer.
    pub k: u32,
    /// Maximum absolute deviation of the log-log fit.
    pub fit_residual: f64,
    /// Per-branch slopes, where each branch admits a valid fit.
    pub branch_orders: Vec<Option<f64>>,
    /// False when two branches collided along the trace.
    pub square_free_flag: bool,
}

/// Samples below this boundary distance are dominated by rounding in
/// `1 - |a|` and are excluded from the fit.
const DISTANCE_FLOOR: f64 = 1e-12;

/// Estimates the contact order of a RIF at a torus singularity by tracing
/// slice zeros along an arc and fitting the decay of the minimal boundary
/// distance.
///
/// The trace uses 24 geometric samples over arc halfwidth 0.3; the fit uses
/// the last 12 samples whose distances stay above the floating-point floor
/// `1e-12` (higher contact orders underflow that floor sooner, so fewer
/// samples may enter the fit).
pub fn estimate_contact_order(rif: &Rif, tau: (Complex64, Complex64)) -> Result<ContactOrderEstimate> {
    let trace = trace_branches(rif, tau.1, 0.3, 24)?;
    if trace.truncated {
        return Err(Error::Numeric("root count changed along the arc".into()));
    }
    let n_branches = trace.samples.first().map_or(0, Vec::len);
    if n_branches == 0 {
        return Ok(ContactOrderEstimate {
            tau_angles: (tau.0.arg(), tau.1.arg()),
            fitted_slope: 0.0,
            k: 0,
            fit_residual: 0.0,
            branch_orders: vec![],
            square_free_flag: true,
        });
    }

    // x = log |tau2 - zeta2|, y = log min_j (1 - |a_j|).
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, &theta) in trace.thetas.iter().enumerate() {
        let min_d = trace.distances[k]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_d > DISTANCE_FLOOR {
            xs.push((2.0 * (theta / 2.0).sin()).ln());
            ys.push(min_d.ln());
        }
    }
    let (fitted_slope, fit_residual) = fit_tail(&xs, &ys, 12)?;
    let k_rounded = 2.0 * (fitted_slope / 2.0).round();
    if (fitted_slope - k_rounded).abs() > 0.2 {
        return Err(Error::FitRejected(format!(
            "slope {fitted_slope:.4} is not within 0.2 of an even integer"
        )));
    }
    if fit_residual > 0.2 {
        return Err(Error::FitRejected(format!(
            "fit residual {fit_residual:.4} exceeds 0.2"
        )));
    }
    if k_rounded < 2.0 {
        return Err(Error::FitRejected(format!(
            "contact order rounded to {k_rounded}, below the minimum 2 at a singularity"
        )));
    }

    let mut branch_orders = Vec::with_capacity(n_branches);
    for b in 0..n_branches {
        let mut bx = Vec::new();
        let mut by = Vec::new();
        for (k, &theta) in trace.thetas.iter().enumerate() {
            let d = trace.distances[k][b];
            if d > DISTANCE_FLOOR {
                bx.push((2.0 * (theta / 2.0).sin()).ln());
                by.push(d.ln());
            }
        }
        branch_orders.push(fit_tail(&bx, &by, 12).ok().map(|(s, _)| s));
    }

    Ok(ContactOrderEstimate {
        tau_angles: (tau.0.arg(), tau.1.arg()),
        fitted_slope,
        k: k_rounded as u32,
        fit_residual,
        branch_orders,
        square_free_flag: trace.collisions.is_empty(),
    })
}

/// Least-squares line over the last `window` points; returns the slope and
/// the maximum absolute deviation.
fn fit_tail(xs: &[f64], ys: &[f64], window: usize) -> Result<(f64, f64)> {
    if xs.len() < 4 {
        return Err(Error::FitRejected("too few valid samples for a fit".into()));
    }
    let n = xs.len();
    let start = n.saturating_sub(window);
    let x = &xs[start..];
    let y = &ys[start..];
    let m = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = m * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::FitRejected("degenerate abscissae".into()));
    }
    let slope = (m * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / m;
    let residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (slope * a + intercept - b).abs())
        .fold(0.0, f64::max);
    Ok((slope, residual))
}

/// A local model of a torus singularity: branches
/// `z1 = -(q_j(z2) + i z2^{2 L_j})` with `q_j(0) = 0` and `q_j'(0) > 0`.
#[derive(Debug, Clone)]
pub struct LocalModel {
    /// Branches as `(q_j, L_j)` with `q_j` given by real coefficients in
    /// ascending order (constant term first, required to be zero).
    pub branches: Vec<(Vec<f64>, u32)>,
}

impl LocalModel {
    /// Validates the branch conditions: `q_j(0) = 0`, `q_j'(0) > 0`,
    /// `deg q_j < 2 L_j`, and pairwise square-freeness.
    pub fn validate(&self) -> Result<()> {
        for (q, l) in &self.branches {
            if *l == 0 {
                return Err(Error::Domain("contact exponent L must be positive".into()));
            }
            if q.first().copied().unwrap_or(0.0) != 0.0 {
                return Err(Error::Domain("q(0) must vanish".into()));
            }
            if q.get(1).copied().unwrap_or(0.0) <= 0.0 {
                return Err(Error::Domain("q'(0) must be positive".into()));
            }
            let deg = q.iter().rposition(|&c| c != 0.0).unwrap_or(0);
            if deg as u32 >= 2 * l {
                return Err(Error::Domain("deg q must be below 2L".into()));
            }
        }
        Ok(())
    }

    /// True when no two branches share both `q` and `L`.
    pub fn is_square_free(&self) -> bool {
        for i in 0..self.branches.len() {
            for j in (i + 1)..self.branches.len() {
                if self.branches[i].1 == self.branches[j].1
                    && polys_equal(&self.branches[i].0, &self.branches[j].0)
                {
                    return false;
                }
            }
        }
        true
    }

    /// Evaluates the half-plane image `y_m(x) = q_m(x) + i x^{2 L_m}` of
    /// branch `m` at a real parameter `x`.
    pub fn branch_value(&self, m: usize, x: f64) -> Complex64 {
        let (q, l) = &self.branches[m];
        let mut qv = 0.0;
        for &c in q.iter().rev() {
            qv = qv * x + c;
        }
        Complex64::new(qv, x.powi(2 * *l as i32))
    }
}

fn polys_equal(a: &[f64], b: &[f64]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| {
        (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs() < 1e-14
    })
}

/// Evaluates the pseudohyperbolic distance between two branches of a local
/// model along real parameters tending to zero.
///
/// For square-free pairs the values approach 1; identical branches give 0.
pub fn case_limit_check(
    model: &LocalModel,
    pair: (usize, usize),
    x_values: &[f64],
) -> Result<Vec<f64>> {
    model.validate()?;
    let (j, k) = pair;
    if j >= model.branches.len() || k >= model.branches.len() {
        return Err(Error::Domain("branch index out of range".into()));
    }
    let mut out = Vec::with_capacity(x_values.len());
    for &x in x_values {
        if x == 0.0 {
            return Err(Error::Domain("x values must be nonzero".into()));
        }
        let yj = model.branch_value(j, x);
        let yk = model.branch_value(k, x);
        if yj.im <= 0.0 || yk.im <= 0.0 {
            return Err(Error::Domain("branch left the upper half-plane".into()));
        }
        out.push(pseudo_distance_halfplane(yj, yk)?);
    }
    Ok(out)
}

//! Roots of univariate complex polynomials via companion-matrix
//! eigenvalues, polished by Newton steps.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Result of a univariate root computation.
#[derive(Debug, Clone)]
pub struct RootsResult {
    /// All finite roots.
    pub roots: Vec<Complex64>,
    /// Number of leading coefficients that vanished: each corresponds to a
    /// root "at infinity" (the effective degree dropped below the nominal
    /// one).
    pub dropped_at_infinity: usize,
}

/// Computes all roots of the polynomial with ascending coefficients
/// `coeffs[0] + coeffs[1] z + ...`.
///
/// Leading coefficients with magnitude at most `1e-12` times the largest
/// coefficient are treated as zero and reported as roots at infinity.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<RootsResult> {
    let maxmag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if maxmag == 0.0 {
        return Err(Error::DegenerateSlice);
    }
    let tol = 1e-12 * maxmag;
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].norm() <= tol {
        n -= 1;
    }
    let dropped_at_infinity = coeffs.len() - n;
    if n <= 1 {
        return Ok(RootsResult { roots: vec![], dropped_at_infinity });
    }
    let trimmed = &coeffs[..n];
    let deg = n - 1;
    let lead = trimmed[deg];

    let mut roots = if deg == 1 {
        vec![-trimmed[0] / lead]
    } else {
        companion_eigenvalues(trimmed)?
    };
    for r in roots.iter_mut() {
        *r = newton_polish(trimmed, *r, 3);
    }
    Ok(RootsResult { roots, dropped_at_infinity })
}

/// Eigenvalues of the companion matrix of a (trimmed) polynomial.
fn companion_eigenvalues(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = DMatrix::from_element(deg, deg, Complex64::new(0.0, 0.0));
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = m
        .try_schur(1e-14, 50 * deg.max(10))
        .ok_or_else(|| Error::Numeric("companion matrix Schur iteration failed".into()))?;
    let t = schur.unpack().1;
    Ok((0..deg).map(|i| t[(i, i)]).collect())
}

/// Evaluates the polynomial and its derivative at `z` (Horner).
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() < 1e-300 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // (z - 2)(z + 3i) = z^2 + (3i - 2) z - 6i
        let coeffs = [c(0.0, -6.0), c(-2.0, 3.0), c(1.0, 0.0)];
        let mut rs = poly_roots(&coeffs).unwrap().roots;
        rs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((rs[0] - c(0.0, -3.0)).norm() < 1e-12);
        assert!((rs[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degree_drop_reports_infinity() {
        // Nominal cubic with vanishing cubic and quadratic coefficients.
        let coeffs = [c(-1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let r = poly_roots(&coeffs).unwrap();
        assert_eq!(r.dropped_at_infinity, 2);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn wilkinson_like_accuracy() {
        // prod (z - k/10), k = 1..8
        let mut coeffs = vec![c(1.0, 0.0)];
        for k in 1..=8 {
            let a = c(k as f64 / 10.0, 0.0);
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, &v) in coeffs.iter().enumerate() {
                next[i + 1] += v;
                next[i] -= a * v;
            }
            coeffs = next;
        }
        let mut rs = poly_roots(&coeffs).unwrap().roots;
        rs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (k, r) in rs.iter().enumerate() {
            assert!((r - c((k + 1) as f64 / 10.0, 0.0)).norm() < 1e-9);
        }
    }
}

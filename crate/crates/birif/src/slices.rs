//! Slice Blaschke zeros and branch tracing along boundary arcs.

use num_complex::Complex64;

use crate::bipoly::Rif;
use crate::error::{Error, Result};
use crate::roots::{eval_with_derivative, poly_roots};

/// The zeros of the slice Blaschke product `z1 -> phi(z1, zeta2)`.
#[derive(Debug, Clone)]
pub struct SliceRootSet {
    pub zeta2: Complex64,
    /// Roots of the numerator slice, sorted by argument then modulus.
    pub roots: Vec<Complex64>,
    /// Residual `|numer(a_j, zeta2)|` per root.
    pub residuals: Vec<f64>,
    /// Number of roots that escaped to infinity (leading coefficient of the
    /// slice vanished, dropping the degree below the bidegree).
    pub at_infinity: usize,
}

/// Computes the slice zeros of a RIF at a point on the unit circle.
pub fn slice_roots(rif: &Rif, zeta2: Complex64) -> Result<SliceRootSet> {
    if (zeta2.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain("slice parameter must lie on the unit circle".into()));
    }
    let numer = rif.full_numer();
    let coeffs = numer.coeffs_in_z1_at(zeta2);
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max <= 1e-12 * numer.max_coeff_norm().max(1.0) {
        return Err(Error::DegenerateSlice);
    }
    let rr = poly_roots(&coeffs)?;
    let mut roots = rr.roots;
    roots.sort_by(|a, b| {
        (a.arg(), a.norm())
            .partial_cmp(&(b.arg(), b.norm()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let residuals = roots
        .iter()
        .map(|&a| eval_with_derivative(&coeffs, a).0.norm())
        .collect();
    Ok(SliceRootSet { zeta2, roots, residuals, at_infinity: rr.dropped_at_infinity })
}

/// A matched root path along an arc approaching a boundary target.
#[derive(Debug, Clone)]
pub struct BranchTrace {
    pub tau2: Complex64,
    /// Arc offsets `theta` per sample (geometric, decreasing).
    pub thetas: Vec<f64>,
    /// Sample parameters `zeta2 = tau2 * exp(i theta)`.
    pub zeta2s: Vec<Complex64>,
    /// Matched root vectors: `samples[s][b]` is branch `b` at sample `s`.
    pub samples: Vec<Vec<Complex64>>,
    /// Boundary distances `1 - |a_b|` per sample, per branch.
    pub distances: Vec<Vec<f64>>,
    /// Sample indices where two matched roots were closer than `1e-8`.
    pub collisions: Vec<usize>,
    /// True when the trace stopped early because the root count changed.
    pub truncated: bool,
}

/// Traces slice zeros along the arc `zeta2 = tau2 e^{i theta}` with
/// geometrically decreasing `theta` (ratio 1/2 starting at
/// `arc_halfwidth`), matching roots between consecutive samples.
pub fn trace_branches(
    rif: &Rif,
    tau2: Complex64,
    arc_halfwidth: f64,
    n_samples: usize,
) -> Result<BranchTrace> {
    if n_samples < 16 {
        return Err(Error::Domain("at least 16 samples are required".into()));
    }
    if !(arc_halfwidth > 0.0 && arc_halfwidth < std::f64::consts::PI) {
        return Err(Error::Domain("arc halfwidth must lie in (0, pi)".into()));
    }
    let mut thetas = Vec::with_capacity(n_samples);
    let mut zeta2s = Vec::new();
    let mut samples: Vec<Vec<Complex64>> = Vec::new();
    let mut collisions = Vec::new();
    let mut truncated = false;

    for k in 0..n_samples {
        let theta = arc_halfwidth * 0.5_f64.powi(k as i32);
        let zeta2 = tau2 * Complex64::from_polar(1.0, theta);
        let set = slice_roots(rif, zeta2)?;
        let roots = if let Some(prev) = samples.last() {
            if set.roots.len() != prev.len() {
                truncated = true;
                break;
            }
            match_roots(prev, &set.roots)
        } else {
            set.roots.clone()
        };
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if (roots[i] - roots[j]).norm() < 1e-8 {
                    collisions.push(k);
                }
            }
        }
        thetas.push(theta);
        zeta2s.push(zeta2);
        samples.push(roots);
    }

    let distances = samples
        .iter()
        .map(|roots| roots.iter().map(|a| 1.0 - a.norm()).collect())
        .collect();
    Ok(BranchTrace { tau2, thetas, zeta2s, samples, distances, collisions, truncated })
}

impl BranchTrace {
    /// Serializes the trace as CSV with columns
    /// `theta, branch_id, re_a, im_a, one_minus_abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,branch_id,re_a,im_a,one_minus_abs\n");
        for (k, &theta) in self.thetas.iter().enumerate() {
            for (b, a) in self.samples[k].iter().enumerate() {
                out.push_str(&format!(
                    "{theta},{b},{},{},{}\n",
                    a.re, a.im, self.distances[k][b]
                ));
            }
        }
        out
    }
}

/// Reorders `next` so that entry `b` continues branch `b` of `prev`.
///
/// Uses an optimal assignment for at most 8 roots and greedy
/// nearest-neighbor beyond that.
fn match_roots(prev: &[Complex64], next: &[Complex64]) -> Vec<Complex64> {
    let n = prev.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 8 {
        // Exhaustive optimal assignment over permutations with pruning.
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(
            prev: &[Complex64],
            next: &[Complex64],
            perm: &mut Vec<usize>,
            used: &mut [bool],
            cost: f64,
            best: &mut Option<(f64, Vec<usize>)>,
        ) {
            let i = perm.len();
            if let Some((bc, _)) = best {
                if cost >= *bc {
                    return;
                }
            }
            if i == prev.len() {
                *best = Some((cost, perm.clone()));
                return;
            }
            for j in 0..next.len() {
                if used[j] {
                    continue;
                }
                used[j] = true;
                perm.push(j);
                rec(prev, next, perm, used, cost + (prev[i] - next[j]).norm_sqr(), best);
                perm.pop();
                used[j] = false;
            }
        }
        rec(prev, next, &mut perm, &mut used, 0.0, &mut best);
        let (_, assignment) = best.expect("assignment always exists");
        assignment.into_iter().map(|j| next[j]).collect()
    } else {
        let mut taken = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &p in prev {
            let mut bi = usize::MAX;
            let mut bd = f64::INFINITY;
            for (j, &q) in next.iter().enumerate() {
                if !taken[j] && (p - q).norm() < bd {
                    bd = (p - q).norm();
                    bi = j;
                }
            }
            taken[bi] = true;
            out.push(next[bi]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::Rif;
    use crate::polyexpr::parse_poly;

    fn kappa() -> Rif {
        Rif::from_denominator(parse_poly("2 - z1 - z2").unwrap()).unwrap()
    }

    fn amy() -> Rif {
        Rif::from_denominator(parse_poly("4 - 3z1 - z2 - z1*z2 + z1^2").unwrap()).unwrap()
    }

    #[test]
    fn kappa_slice_roots() {
        let r = slice_roots(&kappa(), Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-12);

        let r = slice_roots(&kappa(), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn amy_slice_roots_at_one() {
        let r = slice_roots(&amy(), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(r.roots.len(), 2);
        let mut mods: Vec<f64> = r.roots.iter().map(|a| a.norm()).collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mods[0] - 1.0 / 3.0).abs() < 1e-10);
        assert!((mods[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kappa_trace_matches_closed_form() {
        // Closed-form root a(zeta2) = zeta2 / (2 zeta2 - 1) gives
        // 1 - |a|^2 = (4 - 4 cos t) / (5 - 4 cos t).
        let trace = trace_branches(&kappa(), Complex64::new(1.0, 0.0), 0.3, 20).unwrap();
        assert!(!trace.truncated);
        for (k, &theta) in trace.thetas.iter().enumerate() {
            let d = trace.distances[k][0];
            let expect_sq = (4.0 - 4.0 * theta.cos()) / (5.0 - 4.0 * theta.cos());
            let a = 1.0 - d;
            assert!(((1.0 - a * a) - expect_sq).abs() < 1e-9, "theta={theta}");
        }
    }

    #[test]
    fn amy_trace_two_branches() {
        let trace = trace_branches(&amy(), Complex64::new(1.0, 0.0), 0.3, 24).unwrap();
        assert!(!trace.truncated);
        let last = trace.samples.last().unwrap();
        let mut mods: Vec<f64> = last.iter().map(|a| a.norm()).collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mods[0] - 1.0 / 3.0).abs() < 1e-4);
        assert!((mods[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn nonsingular_distances_bounded_below() {
        let rif = Rif::from_denominator(parse_poly("4 - z1 - z2").unwrap()).unwrap();
        let trace = trace_branches(&rif, Complex64::new(1.0, 0.0), 0.3, 16).unwrap();
        for ds in &trace.distances {
            for &d in ds {
                assert!(d > 0.1);
            }
        }
    }

    #[test]
    fn matched_multisets_reproduce_slice_roots() {
        let trace = trace_branches(&amy(), Complex64::new(1.0, 0.0), 0.3, 16).unwrap();
        for (k, roots) in trace.samples.iter().enumerate() {
            let fresh = slice_roots(&amy(), trace.zeta2s[k]).unwrap();
            for a in roots {
                let nearest = fresh
                    .roots
                    .iter()
                    .map(|b| (a - b).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-9);
            }
        }
    }

    #[test]
    fn slices_are_unimodular_on_torus() {
        let rif = amy();
        for k in 0..100 {
            let s = 0.0628 * k as f64 + 0.013;
            let t = 2.17 * k as f64;
            let z1 = Complex64::from_polar(1.0, s);
            let z2 = Complex64::from_polar(1.0, t);
            assert!((rif.eval(z1, z2).norm() - 1.0).abs() < 1e-9);
        }
    }
}

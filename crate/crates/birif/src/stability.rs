//! Numerical stability certification and torus zero location.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bipoly::{BiPoly, Var};
use crate::error::{Error, Result};
use crate::roots::poly_roots;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Verdict of a stability scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    Inconclusive,
}

/// Certificate produced by [`is_stable`].
#[derive(Debug, Clone)]
pub struct StabilityCertificate {
    pub verdict: StabilityVerdict,
    /// An interior zero of the polynomial, present for unstable verdicts.
    pub witness: Option<(Complex64, Complex64)>,
    pub grid_resolution: usize,
    /// Minimal distance of slice roots to the closed unit disk across the
    /// scan (zero when roots touch the unit circle).
    pub min_slice_root_margin: f64,
}

/// Scans slice roots over circles of radius 0.2..=1.0 in `z2` to certify
/// that `p` has no zeros in the open bidisk.
///
/// The verdict is stable when no slice root enters the disk at resolution
/// `grid` or `2 * grid` and the observed margin is stable under that grid
/// doubling. An interior root found by the scan yields an unstable verdict
/// with a witness.
pub fn is_stable(p: &BiPoly, grid: usize) -> Result<StabilityCertificate> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if grid < 64 {
        return Err(Error::Domain("stability grid must be at least 64".into()));
    }
    let (n1, n2) = p.bidegree()?;
    if n1 == 0 && n2 == 0 {
        return Ok(StabilityCertificate {
            verdict: StabilityVerdict::Stable,
            witness: None,
            grid_resolution: grid,
            min_slice_root_margin: f64::INFINITY,
        });
    }
    // Solve for roots in the variable that actually appears; sweep the other.
    let root_var = if n1 > 0 { Var::Z1 } else { Var::Z2 };

    // Margin plus an optional interior-zero witness.
    type ScanOutcome = (f64, Option<(Complex64, Complex64)>);
    let scan = |g: usize| -> Result<ScanOutcome> {
        let radii = [0.2, 0.4, 0.6, 0.8, 1.0];
        let results: Vec<Result<ScanOutcome>> = radii
            .par_iter()
            .flat_map(|&r| (0..g).into_par_iter().map(move |k| (r, k)))
            .map(|(r, k)| {
                let sweep = Complex64::from_polar(r, TAU * k as f64 / g as f64);
                let coeffs = match root_var {
                    Var::Z1 => p.coeffs_in_z1_at(sweep),
                    Var::Z2 => p.coeffs_in_z2_at(sweep),
                };
                let rr = match poly_roots(&coeffs) {
                    Ok(rr) => rr,
                    // The slice vanished identically: the origin of the
                    // slice is an interior zero when the sweep is interior.
                    Err(Error::DegenerateSlice) if r < 1.0 => {
                        let w = order_witness(root_var, Complex64::new(0.0, 0.0), sweep);
                        return Ok((0.0, Some(w)));
                    }
                    Err(e) => return Err(e),
                };
                let mut margin = f64::INFINITY;
                let mut witness = None;
                for root in rr.roots {
                    margin = margin.min((root.norm() - 1.0).max(0.0));
                    if root.norm() < 1.0 - 1e-9 && r < 1.0 {
                        witness = Some(order_witness(root_var, root, sweep));
                    }
                }
                Ok((margin, witness))
            })
            .collect();
        let mut margin = f64::INFINITY;
        let mut witness = None;
        for r in results {
            let (m, w) = r?;
            margin = margin.min(m);
            if witness.is_none() {
                witness = w;
            }
        }
        Ok((margin, witness))
    };

    let (m1, w1) = scan(grid)?;
    let (m2, w2) = scan(2 * grid)?;
    let witness = w1.or(w2);
    if let Some((z1, z2)) = witness {
        if p.eval(z1, z2).norm() < 1e-8 && z1.norm() < 1.0 && z2.norm() < 1.0 {
            return Ok(StabilityCertificate {
                verdict: StabilityVerdict::Unstable,
                witness: Some((z1, z2)),
                grid_resolution: grid,
                min_slice_root_margin: 0.0,
            });
        }
        // A root entered the disk but refinement could not certify it.
        return Ok(StabilityCertificate {
            verdict: StabilityVerdict::Inconclusive,
            witness: None,
            grid_resolution: grid,
            min_slice_root_margin: m1.min(m2),
        });
    }
    // Margin must not collapse under refinement.
    let stable_margin = (m1 - m2).abs() <= 0.5 * m1.max(1e-9);
    Ok(StabilityCertificate {
        verdict: if stable_margin {
            StabilityVerdict::Stable
        } else {
            StabilityVerdict::Inconclusive
        },
        witness: None,
        grid_resolution: grid,
        min_slice_root_margin: m1.min(m2),
    })
}

/// Zeros of `p` on the torus, refined to high accuracy.
#[derive(Debug, Clone)]
pub struct TorusZeroSet {
    /// Zeros as points `(tau1, tau2)` with unit modulus coordinates.
    pub points: Vec<(Complex64, Complex64)>,
    /// The same zeros in angle coordinates `(s, t)` in `[0, 2pi)`.
    pub angles: Vec<(f64, f64)>,
    /// Residual `|p(tau)|` per point.
    pub residuals: Vec<f64>,
    /// Number of candidate minima whose refinement did not converge.
    pub dropped: usize,
}

/// Locates zeros of `p` on the torus by a lattice scan followed by damped
/// Gauss-Newton refinement in the torus angles.
pub fn find_torus_zeros(p: &BiPoly, grid: usize) -> Result<TorusZeroSet> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = grid.max(64);
    let vals: Vec<Vec<f64>> = (0..g)
        .into_par_iter()
        .map(|a| {
            let s = TAU * a as f64 / g as f64;
            (0..g)
                .map(|b| {
                    let t = TAU * b as f64 / g as f64;
                    p.eval(Complex64::from_polar(1.0, s), Complex64::from_polar(1.0, t)).norm()
                })
                .collect()
        })
        .collect();

    let mut candidates = Vec::new();
    for a in 0..g {
        for b in 0..g {
            let v = vals[a][b];
            if v >= 1e-3 {
                continue;
            }
            let neighbors = [
                vals[(a + g - 1) % g][b],
                vals[(a + 1) % g][b],
                vals[a][(b + g - 1) % g],
                vals[a][(b + 1) % g],
            ];
            if neighbors.iter().all(|&n| v <= n) {
                candidates.push((TAU * a as f64 / g as f64, TAU * b as f64 / g as f64));
            }
        }
    }

    let pz1 = p.partial_derivative(Var::Z1, 1);
    let pz2 = p.partial_derivative(Var::Z2, 1);
    // Tangentially flat zeros leave a residual valley wider than the lattice
    // spacing, so nearby refinements are merged at half a scan cell, keeping
    // the representative with the smallest residual.
    let merge_tol = (std::f64::consts::PI / g as f64).max(1e-4);
    let mut zeros: Vec<(f64, f64, f64)> = Vec::new();
    let mut dropped = 0usize;
    for (s0, t0) in candidates {
        match refine_torus_zero(p, &pz1, &pz2, s0, t0) {
            Some((s, t, res)) if res <= 1e-10 => {
                match zeros.iter_mut().find(|&&mut (s1, t1, _)| {
                    angle_dist(s, s1).hypot(angle_dist(t, t1)) < merge_tol
                }) {
                    Some(existing) => {
                        if res < existing.2 {
                            *existing = (s, t, res);
                        }
                    }
                    None => zeros.push((s, t, res)),
                }
            }
            _ => dropped += 1,
        }
    }
    zeros.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());

    Ok(TorusZeroSet {
        points: zeros
            .iter()
            .map(|&(s, t, _)| (Complex64::from_polar(1.0, s), Complex64::from_polar(1.0, t)))
            .collect(),
        angles: zeros.iter().map(|&(s, t, _)| (s, t)).collect(),
        residuals: zeros.iter().map(|&(_, _, r)| r).collect(),
        dropped,
    })
}

fn order_witness(
    root_var: Var,
    root: Complex64,
    sweep: Complex64,
) -> (Complex64, Complex64) {
    match root_var {
        Var::Z1 => (root, sweep),
        Var::Z2 => (sweep, root),
    }
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d = TAU - d;
    }
    d
}

/// Damped Gauss-Newton for `p(e^{is}, e^{it}) = 0` with step clamp 0.1.
///
/// Torus zeros of stable polynomials are typically tangential, so the
/// Jacobian degenerates near the solution; Levenberg damping keeps the
/// iteration contractive there.
fn refine_torus_zero(
    p: &BiPoly,
    pz1: &BiPoly,
    pz2: &BiPoly,
    mut s: f64,
    mut t: f64,
) -> Option<(f64, f64, f64)> {
    let f = |s: f64, t: f64| {
        p.eval(Complex64::from_polar(1.0, s), Complex64::from_polar(1.0, t))
    };
    let mut lambda = 1e-6;
    let mut fv = f(s, t);
    for _ in 0..400 {
        if fv.norm() <= 1e-15 {
            break;
        }
        let z1 = Complex64::from_polar(1.0, s);
        let z2 = Complex64::from_polar(1.0, t);
        let i = Complex64::new(0.0, 1.0);
        let ds = i * z1 * pz1.eval(z1, z2);
        let dt = i * z2 * pz2.eval(z1, z2);
        // Normal equations of the real 2x2 least-squares system.
        let a11 = ds.norm_sqr() + lambda;
        let a22 = dt.norm_sqr() + lambda;
        let a12 = (ds.conj() * dt).re;
        let b1 = -(ds.conj() * fv).re;
        let b2 = -(dt.conj() * fv).re;
        let det = a11 * a22 - a12 * a12;
        if det.abs() < 1e-300 {
            return None;
        }
        let mut step_s = (b1 * a22 - b2 * a12) / det;
        let mut step_t = (b2 * a11 - b1 * a12) / det;
        let clamp = 0.1;
        step_s = step_s.clamp(-clamp, clamp);
        step_t = step_t.clamp(-clamp, clamp);
        let (ns, nt) = (s + step_s, t + step_t);
        let nf = f(ns, nt);
        if nf.norm() < fv.norm() {
            s = ns;
            t = nt;
            fv = nf;
            lambda = (lambda / 3.0).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > 1e6 {
                break;
            }
        }
    }
    let res = fv.norm();
    if res <= 1e-10 {
        Some((s.rem_euclid(TAU), t.rem_euclid(TAU), res))
    } else {
        None
    }
}

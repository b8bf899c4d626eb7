//! Membership classification: structural rules keyed by the contact order,
//! with numeric diagnostics attached and never silently reconciled.

use crate::bipoly::{Rif, Var};
use crate::contact::{estimate_contact_order, ContactOrderEstimate};
use crate::error::{Error, Result};
use crate::polyexpr::format_poly;
use crate::quad::QuadGrid;
use crate::quadnorms::{divergence_diagnostic, mixed_dirichlet_norm, slice_norm, MixedInput, Verdict};
use crate::series::{coeff_norm_partial_sums, taylor_coeffs, SpaceSpec};
use crate::stability::{find_torus_zeros, is_stable, StabilityVerdict};

/// Structural membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoreticalVerdict {
    Member,
    NonMember,
    /// The rule table is silent: neither membership nor its negation is
    /// asserted for these parameters.
    NotCovered,
}

/// Basic facts about the analyzed RIF.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RifSummary {
    pub denominator: String,
    pub numerator: String,
    pub bidegree: (u32, u32),
    /// Boundary singularities as torus angle pairs.
    pub singularities: Vec<(f64, f64)>,
}

/// The full classification report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MembershipReport {
    pub rif_summary: RifSummary,
    pub space: SpaceSpec,
    /// Contact order (zero when there is no singularity).
    pub k: u32,
    /// The fitted estimate behind `k`, when a singularity exists.
    pub contact: Option<ContactOrderEstimate>,
    pub theoretical_verdict: TheoreticalVerdict,
    pub cited_rule: String,
    pub theoretical_cutoff: Option<f64>,
    pub numeric_verdict: Verdict,
    pub square_free_flag: bool,
    /// False exactly when the structural and numeric verdicts contradict
    /// each other (member vs divergent, or non-member vs finite).
    pub agreement: bool,
}

/// Half-width of the parameter band around a cutoff inside which numeric
/// verdicts are declared inconclusive (power-law divergence with exponent
/// tending to zero is numerically undetectable).
pub const CUTOFF_BAND: f64 = 0.05;

/// The pure rule table: structural verdict, cutoff, and citation text as a
/// function of the contact order, the square-free flag, the bidegree, and
/// the space.
pub fn classification_rule(
    k: u32,
    square_free: bool,
    bidegree: (u32, u32),
    space: &SpaceSpec,
) -> (TheoreticalVerdict, Option<f64>, String) {
    if k == 0 {
        return (
            TheoreticalVerdict::Member,
            None,
            "no boundary singularity: the membership statement is trivial".into(),
        );
    }
    let kf = k as f64;
    match *space {
        SpaceSpec::BcgWeighted { alpha } => {
            let cutoff = 1.0 + 1.0 / kf;
            if alpha < cutoff {
                (
                    TheoreticalVerdict::Member,
                    Some(cutoff),
                    "weighted mixed-norm membership holds for alpha below 1 + 1/K".into(),
                )
            } else if square_free {
                (
                    TheoreticalVerdict::NonMember,
                    Some(cutoff),
                    "for locally square-free singularities the cutoff 1 + 1/K is sharp".into(),
                )
            } else {
                (
                    TheoreticalVerdict::NotCovered,
                    Some(cutoff),
                    "necessity above 1 + 1/K requires a locally square-free singularity".into(),
                )
            }
        }
        SpaceSpec::Bcg => (
            TheoreticalVerdict::Member,
            None,
            "every rational inner function lies in the unweighted mixed-norm space".into(),
        ),
        SpaceSpec::Frak { alpha1, alpha2 } => {
            if (alpha1 - alpha2).abs() > 1e-12 {
                return (
                    TheoreticalVerdict::NotCovered,
                    None,
                    "no covering rule for anisotropic tensor weights".into(),
                );
            }
            let cutoff = 0.5 + 0.5 / kf;
            if alpha1 < cutoff {
                (
                    TheoreticalVerdict::Member,
                    Some(cutoff),
                    "tensor-weight membership is sufficient for alpha below 1/2 + 1/(2K)".into(),
                )
            } else {
                (
                    TheoreticalVerdict::NotCovered,
                    Some(cutoff),
                    "the sharp tensor-weight cutoff above 1/2 + 1/(2K) is open".into(),
                )
            }
        }
        SpaceSpec::HigherOrder { m, n } => {
            let mx = m.max(n) as f64;
            let cutoff = 2.0;
            if bidegree.0.min(bidegree.1) == 1 {
                if mx < cutoff {
                    (
                        TheoreticalVerdict::Member,
                        Some(cutoff),
                        "for bidegree (1,k) and (k,1) the higher-order spaces require max(m,n) below 2"
                            .into(),
                    )
                } else {
                    (
                        TheoreticalVerdict::NonMember,
                        Some(cutoff),
                        "for bidegree (1,k) and (k,1) membership fails once max(m,n) reaches 2"
                            .into(),
                    )
                }
            } else if mx < cutoff {
                (
                    TheoreticalVerdict::Member,
                    Some(cutoff),
                    "first-order mixed membership holds for every rational inner function".into(),
                )
            } else {
                (
                    TheoreticalVerdict::NotCovered,
                    Some(cutoff),
                    "higher-order necessity is only settled for bidegrees (1,k) and (k,1)".into(),
                )
            }
        }
    }
}

fn combine(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Divergent, _) | (_, Verdict::Divergent) => Verdict::Divergent,
        (Verdict::Finite, Verdict::Finite) => Verdict::Finite,
        _ => Verdict::Inconclusive,
    }
}

/// Numeric membership diagnostic for a space, honoring the inconclusive
/// band around the structural cutoff.
fn numeric_verdict(
    rif: &Rif,
    space: &SpaceSpec,
    cutoff: Option<f64>,
    grid: &QuadGrid,
) -> Result<Verdict> {
    // Near-cutoff parameters are declared inconclusive up front.
    if let Some(c) = cutoff {
        let param = match *space {
            SpaceSpec::BcgWeighted { alpha } => Some(alpha),
            SpaceSpec::Frak { alpha1, .. } => Some(alpha1),
            _ => None,
        };
        if let Some(a) = param {
            if (a - c).abs() <= CUTOFF_BAND + 1e-12 {
                return Ok(Verdict::Inconclusive);
            }
        }
    }
    match *space {
        SpaceSpec::BcgWeighted { alpha } => {
            let v1 = slice_norm(rif, Var::Z1, 1, alpha, grid)?.verdict;
            let v2 = slice_norm(rif, Var::Z2, 1, alpha, grid)?.verdict;
            Ok(combine(v1, v2))
        }
        SpaceSpec::Bcg => {
            let cuts = [256usize, 512, 1024, 2048];
            let grid_size = *cuts.last().unwrap();
            let coeffs = taylor_coeffs(rif, grid_size, grid_size)?;
            let sums = coeff_norm_partial_sums(&coeffs, &SpaceSpec::Bcg, &cuts)?;
            let eps: Vec<f64> = cuts.iter().map(|&n| 1.0 / n as f64).collect();
            Ok(divergence_diagnostic(&sums, &eps)?.1)
        }
        SpaceSpec::Frak { alpha1, alpha2 } => {
            Ok(mixed_dirichlet_norm(MixedInput::Rif(rif), alpha1, alpha2, grid)?.verdict)
        }
        SpaceSpec::HigherOrder { m, n } => {
            let v1 = slice_norm(rif, Var::Z1, m, 1.0, grid)?.verdict;
            let v2 = slice_norm(rif, Var::Z2, n, 1.0, grid)?.verdict;
            Ok(combine(v1, v2))
        }
    }
}

/// Classifies a RIF against a Dirichlet-type space: structural verdict from
/// the rule table keyed by the estimated contact order, numeric verdict
/// from the quadrature and coefficient diagnostics.
pub fn classify(rif: &Rif, space: &SpaceSpec) -> Result<MembershipReport> {
    classify_with_grid(rif, space, &QuadGrid::default())
}

/// [`classify`] with an explicit quadrature grid.
pub fn classify_with_grid(
    rif: &Rif,
    space: &SpaceSpec,
    grid: &QuadGrid,
) -> Result<MembershipReport> {
    match *space {
        SpaceSpec::BcgWeighted { alpha } if !(0.0 < alpha && alpha < 2.0) => {
            return Err(Error::Domain("alpha must lie in (0, 2)".into()));
        }
        SpaceSpec::Frak { alpha1, alpha2 }
            if !(0.0 < alpha1 && alpha1 < 2.0 && 0.0 < alpha2 && alpha2 < 2.0) =>
        {
            return Err(Error::Domain("alpha must lie in (0, 2)".into()));
        }
        SpaceSpec::HigherOrder { m, n } if m == 0 || n == 0 => {
            return Err(Error::Domain("derivative orders must be positive".into()));
        }
        _ => {}
    }

    let cert = is_stable(rif.denom(), 64)?;
    match cert.verdict {
        StabilityVerdict::Stable => {}
        StabilityVerdict::Unstable => {
            return Err(Error::InvalidDenominator(
                "denominator has a zero inside the bidisk".into(),
            ));
        }
        StabilityVerdict::Inconclusive => {
            return Err(Error::Numeric("stability scan was inconclusive".into()));
        }
    }

    let zeros = find_torus_zeros(rif.denom(), 256)?;
    let bidegree = rif.denom().bidegree()?;

    let mut k = 0u32;
    let mut square_free = true;
    let mut contact: Option<ContactOrderEstimate> = None;
    for &tau in &zeros.points {
        let est = estimate_contact_order(rif, tau)?;
        square_free &= est.square_free_flag;
        if est.k >= k {
            k = est.k;
            contact = Some(est);
        }
    }

    let (theoretical_verdict, theoretical_cutoff, cited_rule) =
        classification_rule(k, square_free, bidegree, space);
    let numeric = numeric_verdict(rif, space, theoretical_cutoff, grid)?;
    let agreement = !matches!(
        (theoretical_verdict, numeric),
        (TheoreticalVerdict::Member, Verdict::Divergent)
            | (TheoreticalVerdict::NonMember, Verdict::Finite)
    );

    Ok(MembershipReport {
        rif_summary: RifSummary {
            denominator: format_poly(rif.denom()),
            numerator: format_poly(&rif.full_numer()),
            bidegree,
            singularities: zeros.angles.clone(),
        },
        space: *space,
        k,
        contact,
        theoretical_verdict,
        cited_rule,
        theoretical_cutoff,
        numeric_verdict: numeric,
        square_free_flag: square_free,
        agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexpr::parse_poly;

    fn kappa() -> Rif {
        Rif::from_denominator(parse_poly("2 - z1 - z2").unwrap()).unwrap()
    }

    fn amy() -> Rif {
        Rif::from_denominator(parse_poly("4 - 3z1 - z2 - z1*z2 + z1^2").unwrap()).unwrap()
    }

    #[test]
    fn rule_table_examples() {
        // kappa has K = 2, bidegree (1,1).
        let (v, c, _) =
            classification_rule(2, true, (1, 1), &SpaceSpec::BcgWeighted { alpha: 1.4 });
        assert_eq!(v, TheoreticalVerdict::Member);
        assert_eq!(c, Some(1.5));

        // AMY has K = 4: cutoff 1.25, so 1.3 is out.
        let (v, c, _) =
            classification_rule(4, true, (2, 1), &SpaceSpec::BcgWeighted { alpha: 1.3 });
        assert_eq!(v, TheoreticalVerdict::NonMember);
        assert_eq!(c, Some(1.25));

        let (v, _, _) = classification_rule(2, true, (1, 1), &SpaceSpec::HigherOrder { m: 2, n: 1 });
        assert_eq!(v, TheoreticalVerdict::NonMember);

        let (v, c, _) =
            classification_rule(2, true, (1, 1), &SpaceSpec::Frak { alpha1: 0.7, alpha2: 0.7 });
        assert_eq!(v, TheoreticalVerdict::Member);
        assert_eq!(c, Some(0.75));
    }

    #[test]
    fn rule_table_grid_consistency() {
        // The rule is a pure function of (K, flag, space); sweep an alpha
        // grid and check the verdict against the inequality directly.
        for &k in &[2u32, 4, 6] {
            for j in 0..40 {
                let alpha = 0.05 * (j + 1) as f64;
                let (v, c, _) = classification_rule(
                    k,
                    true,
                    (1, 1),
                    &SpaceSpec::BcgWeighted { alpha },
                );
                let cutoff = 1.0 + 1.0 / k as f64;
                assert_eq!(c, Some(cutoff));
                let expect = if alpha < cutoff {
                    TheoreticalVerdict::Member
                } else {
                    TheoreticalVerdict::NonMember
                };
                assert_eq!(v, expect, "k={k} alpha={alpha}");

                let (v, _, _) = classification_rule(
                    k,
                    false,
                    (1, 1),
                    &SpaceSpec::BcgWeighted { alpha },
                );
                let expect = if alpha < cutoff {
                    TheoreticalVerdict::Member
                } else {
                    TheoreticalVerdict::NotCovered
                };
                assert_eq!(v, expect, "non-square-free k={k} alpha={alpha}");

                let (v, _, _) = classification_rule(
                    k,
                    true,
                    (1, 1),
                    &SpaceSpec::Frak { alpha1: alpha, alpha2: alpha },
                );
                let cutoff = 0.5 + 0.5 / k as f64;
                let expect = if alpha < cutoff {
                    TheoreticalVerdict::Member
                } else {
                    TheoreticalVerdict::NotCovered
                };
                assert_eq!(v, expect, "frak k={k} alpha={alpha}");
            }
            for &(m, n) in &[(1u32, 1u32), (1, 2), (2, 1), (2, 2)] {
                let (v, _, _) =
                    classification_rule(k, true, (1, 1), &SpaceSpec::HigherOrder { m, n });
                let expect = if m.max(n) < 2 {
                    TheoreticalVerdict::Member
                } else {
                    TheoreticalVerdict::NonMember
                };
                assert_eq!(v, expect);
            }
            let (v, _, _) = classification_rule(k, true, (1, 1), &SpaceSpec::Bcg);
            assert_eq!(v, TheoreticalVerdict::Member);
        }
        // No singularity: trivial member regardless of parameters.
        let (v, _, _) =
            classification_rule(0, true, (1, 1), &SpaceSpec::BcgWeighted { alpha: 1.9 });
        assert_eq!(v, TheoreticalVerdict::Member);
    }

    #[test]
    fn classify_kappa_higher_order() {
        let report = classify(&kappa(), &SpaceSpec::HigherOrder { m: 2, n: 1 }).unwrap();
        assert_eq!(report.k, 2);
        assert_eq!(report.theoretical_verdict, TheoreticalVerdict::NonMember);
        assert_eq!(report.numeric_verdict, Verdict::Divergent);
        assert!(report.agreement);
    }

    #[test]
    fn classify_kappa_bcg() {
        let report = classify(&kappa(), &SpaceSpec::Bcg).unwrap();
        assert_eq!(report.theoretical_verdict, TheoreticalVerdict::Member);
        assert_eq!(report.numeric_verdict, Verdict::Finite);
        assert!(report.agreement);
        assert_eq!(report.rif_summary.bidegree, (1, 1));
        assert_eq!(report.rif_summary.singularities.len(), 1);
    }

    #[test]
    fn classify_near_cutoff_is_inconclusive() {
        // AMY at alpha = 1.3 sits exactly at the 0.05 band edge around the
        // cutoff 1.25: non-member structurally, numerically inconclusive.
        let report = classify(&amy(), &SpaceSpec::BcgWeighted { alpha: 1.3 }).unwrap();
        assert_eq!(report.k, 4);
        assert_eq!(report.theoretical_verdict, TheoreticalVerdict::NonMember);
        assert_eq!(report.numeric_verdict, Verdict::Inconclusive);
        assert!(report.agreement);
    }

    #[test]
    fn classify_nonsingular_is_trivial_member() {
        let rif = Rif::from_denominator(parse_poly("4 - z1 - z2").unwrap()).unwrap();
        let report = classify(&rif, &SpaceSpec::BcgWeighted { alpha: 1.9 }).unwrap();
        assert_eq!(report.k, 0);
        assert_eq!(report.theoretical_verdict, TheoreticalVerdict::Member);
        assert!(report.agreement);
    }

    #[test]
    fn classify_rejects_unstable_denominator() {
        let rif = Rif::new(
            parse_poly("1 - 2z1").unwrap(),
            (0, 0),
            num_complex::Complex64::new(1.0, 0.0),
        );
        // Construction already succeeds; classification must reject.
        let rif = rif.unwrap();
        assert!(classify(&rif, &SpaceSpec::Bcg).is_err());
    }
}

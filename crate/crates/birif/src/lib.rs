//! Numerics for two-variable rational inner functions on the bidisk:
//! polynomial arithmetic and reflection, stability certification, slice
//! Blaschke zeros and branch tracing, contact order estimation, Taylor
//! coefficient machinery, quadrature evaluation of weighted Dirichlet-type
//! norms with divergence diagnostics, closed-form Agler kernels for the
//! canonical degree-(1,1) example, and membership classification.

pub mod agler;
pub mod bipoly;
pub mod contact;
pub mod error;
pub mod polyexpr;
pub mod quad;
pub mod quadnorms;
pub mod report;
pub mod roots;
pub mod series;
pub mod slices;
pub mod stability;

pub use bipoly::{BiPoly, Rif, Var};
pub use contact::{estimate_contact_order, ContactOrderEstimate, LocalModel};
pub use error::{Error, Result};
pub use polyexpr::{format_poly, parse_poly};
pub use quad::QuadGrid;
pub use quadnorms::{
    divergence_diagnostic, mixed_dirichlet_norm, slice_norm, MixedInput, NormEstimate, Verdict,
};
pub use report::{classify, MembershipReport, TheoreticalVerdict};
pub use series::{taylor_coeffs, CoeffGrid, SpaceSpec};
pub use slices::{slice_roots, trace_branches, BranchTrace, SliceRootSet};
pub use stability::{find_torus_zeros, is_stable, StabilityCertificate, TorusZeroSet};

/// Ready-made example functions used throughout the tests and benchmarks.
pub mod catalog {
    use crate::bipoly::Rif;
    use crate::polyexpr::parse_poly;

    /// The canonical bidegree-(1,1) RIF with denominator `2 - z1 - z2` and
    /// a single boundary singularity at `(1, 1)` of contact order 2.
    pub fn kappa() -> Rif {
        Rif::from_denominator(parse_poly("2 - z1 - z2").expect("fixed expression parses"))
            .expect("stable denominator")
    }

    /// The bidegree-(2,1) example with denominator
    /// `4 - 3 z1 - z2 - z1 z2 + z1^2`, singular at `(1, 1)` with contact
    /// order 4.
    pub fn amy() -> Rif {
        Rif::from_denominator(
            parse_poly("4 - 3z1 - z2 - z1*z2 + z1^2").expect("fixed expression parses"),
        )
        .expect("stable denominator")
    }

    /// A nonsingular comparison RIF with denominator `4 - z1 - z2` (no
    /// zeros on the closed bidisk).
    pub fn nonsingular() -> Rif {
        Rif::from_denominator(parse_poly("4 - z1 - z2").expect("fixed expression parses"))
            .expect("stable denominator")
    }
}

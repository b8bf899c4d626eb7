//! Bivariate polynomial arithmetic and the reflection operation.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the degree in each variable.
pub const DEGREE_CAP: u32 = 64;

/// Coefficients smaller than this in magnitude are pruned on construction.
pub const PRUNE_TOL: f64 = 1e-14;

/// A finitely supported bivariate polynomial with complex coefficients.
///
/// The declared bidegree dominates the support and is the bidegree used by
/// [`BiPoly::reflect`]; it may exceed the support bidegree when a leading
/// coefficient is zero by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: BTreeMap<(u32, u32), Complex64>,
    declared_bidegree: (u32, u32),
}

impl BiPoly {
    /// Builds a polynomial from `(i, j) -> coefficient` pairs, summing
    /// duplicates, pruning magnitudes at most [`PRUNE_TOL`], and declaring
    /// the support bidegree.
    pub fn from_coeffs<I>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut map: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for ((i, j), c) in coeffs {
            *map.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| c.norm() > PRUNE_TOL);
        let n1 = map.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let n2 = map.keys().map(|&(_, j)| j).max().unwrap_or(0);
        Self::with_bidegree(map, (n1, n2))
    }

    /// Builds a polynomial with an explicitly declared bidegree.
    pub fn with_bidegree<I>(coeffs: I, declared_bidegree: (u32, u32)) -> Result<Self>
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut map: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for ((i, j), c) in coeffs {
            *map.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| c.norm() > PRUNE_TOL);
        for &(i, j) in map.keys() {
            let d = i.max(j);
            if d > DEGREE_CAP {
                return Err(Error::DegreeCap { degree: d, cap: DEGREE_CAP });
            }
            if i > declared_bidegree.0 || j > declared_bidegree.1 {
                return Err(Error::BidegreeTooSmall(declared_bidegree.0, declared_bidegree.1));
            }
        }
        Ok(Self { coeffs: map, declared_bidegree })
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Complex64) -> Self {
        Self::from_coeffs([((0, 0), c)]).expect("constant is always valid")
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new(), declared_bidegree: (0, 0) }
    }

    /// True when no coefficient survives pruning.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The stored coefficient at `(i, j)`, zero if absent.
    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Iterator over the support.
    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.coeffs.iter()
    }

    /// The declared bidegree (used by reflection).
    pub fn declared_bidegree(&self) -> (u32, u32) {
        self.declared_bidegree
    }

    /// The maximal support degrees in each variable.
    ///
    /// Errors on the zero polynomial, which has no bidegree.
    pub fn bidegree(&self) -> Result<(u32, u32)> {
        if self.coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let n1 = self.coeffs.keys().map(|&(i, _)| i).max().unwrap();
        let n2 = self.coeffs.keys().map(|&(_, j)| j).max().unwrap();
        Ok((n1, n2))
    }

    /// Horner-style evaluation at `(z1, z2)`.
    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        // Horner in z1 over row polynomials that are Horner in z2.
        let rows = self.rows_z2();
        let mut acc = Complex64::new(0.0, 0.0);
        for row in rows.iter().rev() {
            acc = acc * z1 + horner(row, z2);
        }
        acc
    }

    /// Dense rows: `rows[i][j]` is the coefficient of `z1^i z2^j`.
    fn rows_z2(&self) -> Vec<Vec<Complex64>> {
        let (n1, n2) = match self.bidegree() {
            Ok(d) => d,
            Err(_) => return vec![vec![]],
        };
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); n2 as usize + 1]; n1 as usize + 1];
        for (&(i, j), &c) in &self.coeffs {
            rows[i as usize][j as usize] = c;
        }
        rows
    }

    /// Coefficient vector (ascending) of the univariate slice in `z1` at a
    /// fixed `z2` value.
    pub fn coeffs_in_z1_at(&self, z2: Complex64) -> Vec<Complex64> {
        let n1 = self.declared_bidegree.0 as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n1 + 1];
        // Group by i, Horner in z2 per group.
        let rows = self.rows_z2();
        for (i, row) in rows.iter().enumerate() {
            out[i] = horner(row, z2);
        }
        out
    }

    /// Coefficient vector (ascending) of the univariate slice in `z2` at a
    /// fixed `z1` value.
    pub fn coeffs_in_z2_at(&self, z1: Complex64) -> Vec<Complex64> {
        let n2 = self.declared_bidegree.1 as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n2 + 1];
        for (&(i, j), &c) in &self.coeffs {
            out[j as usize] += c * z1.powu(i);
        }
        out
    }

    /// Partial derivative of the given order in one variable.
    pub fn partial_derivative(&self, variable: Var, order: u32) -> Self {
        let mut coeffs = self.coeffs.clone();
        let mut declared = self.declared_bidegree;
        for _ in 0..order {
            let mut next: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
            for (&(i, j), &c) in &coeffs {
                match variable {
                    Var::Z1 if i > 0 => {
                        next.insert((i - 1, j), c * i as f64);
                    }
                    Var::Z2 if j > 0 => {
                        next.insert((i, j - 1), c * j as f64);
                    }
                    _ => {}
                }
            }
            coeffs = next;
            match variable {
                Var::Z1 => declared.0 = declared.0.saturating_sub(1),
                Var::Z2 => declared.1 = declared.1.saturating_sub(1),
            }
        }
        coeffs.retain(|_, c| c.norm() > PRUNE_TOL);
        Self { coeffs, declared_bidegree: declared }
    }

    /// The reflection `z1^{n1} z2^{n2} conj(p)(1/conj(z1), 1/conj(z2))`.
    ///
    /// Coefficient rule: `(reflect p)[i, j] = conj(p[n1 - i, n2 - j])`.
    pub fn reflect(&self, bidegree: (u32, u32)) -> Result<Self> {
        let (n1, n2) = bidegree;
        let mut coeffs = BTreeMap::new();
        for (&(i, j), &c) in &self.coeffs {
            if i > n1 || j > n2 {
                return Err(Error::BidegreeTooSmall(n1, n2));
            }
            coeffs.insert((n1 - i, n2 - j), c.conj());
        }
        Ok(Self { coeffs, declared_bidegree: bidegree })
    }

    /// Sum of two polynomials; the declared bidegree is the pointwise max.
    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.norm() > PRUNE_TOL);
        Self {
            coeffs,
            declared_bidegree: (
                self.declared_bidegree.0.max(other.declared_bidegree.0),
                self.declared_bidegree.1.max(other.declared_bidegree.1),
            ),
        }
    }

    /// Difference `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (&(i, j), &a) in &self.coeffs {
            for (&(k, l), &b) in &other.coeffs {
                *coeffs.entry((i + k, j + l)).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
        coeffs.retain(|_, c| c.norm() > PRUNE_TOL);
        Self {
            coeffs,
            declared_bidegree: (
                self.declared_bidegree.0 + other.declared_bidegree.0,
                self.declared_bidegree.1 + other.declared_bidegree.1,
            ),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        for v in coeffs.values_mut() {
            *v *= c;
        }
        coeffs.retain(|_, c| c.norm() > PRUNE_TOL);
        Self { coeffs, declared_bidegree: self.declared_bidegree }
    }

    /// Multiplication by the monomial `z1^a z2^b`.
    pub fn mul_monomial(&self, a: u32, b: u32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(i, j), &c)| ((i + a, j + b), c))
            .collect();
        Self {
            coeffs,
            declared_bidegree: (self.declared_bidegree.0 + a, self.declared_bidegree.1 + b),
        }
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// One of the two variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Var {
    Z1,
    Z2,
}

impl Var {
    /// The other variable.
    pub fn other(self) -> Self {
        match self {
            Var::Z1 => Var::Z2,
            Var::Z2 => Var::Z1,
        }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// A rational inner function `e^{ia} z1^{N1} z2^{N2} reflect(p)/p`.
#[derive(Debug, Clone)]
pub struct Rif {
    denom: BiPoly,
    numer: BiPoly,
    prefactor_exponents: (u32, u32),
    unimodular_constant: Complex64,
}

impl Rif {
    /// Builds a RIF from a stable denominator; the numerator is its
    /// reflection at the declared bidegree.
    pub fn from_denominator(denom: BiPoly) -> Result<Self> {
        Self::new(denom, (0, 0), Complex64::new(1.0, 0.0))
    }

    /// Builds a RIF with an explicit monomial prefactor and unimodular
    /// constant.
    pub fn new(
        denom: BiPoly,
        prefactor_exponents: (u32, u32),
        unimodular_constant: Complex64,
    ) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidDenominator("zero denominator".into()));
        }
        if denom.coeff(0, 0).norm() <= PRUNE_TOL {
            return Err(Error::InvalidDenominator(
                "constant term vanishes; a stable polynomial cannot vanish at the origin".into(),
            ));
        }
        if (unimodular_constant.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain("prefactor constant must be unimodular".into()));
        }
        let numer = denom.reflect(denom.declared_bidegree())?;
        Ok(Self { denom, numer, prefactor_exponents, unimodular_constant })
    }

    /// The denominator `p`.
    pub fn denom(&self) -> &BiPoly {
        &self.denom
    }

    /// The reflected numerator.
    pub fn numer(&self) -> &BiPoly {
        &self.numer
    }

    /// The monomial prefactor exponents `(N1, N2)`.
    pub fn prefactor_exponents(&self) -> (u32, u32) {
        self.prefactor_exponents
    }

    /// The unimodular constant.
    pub fn unimodular_constant(&self) -> Complex64 {
        self.unimodular_constant
    }

    /// The full numerator including prefactor and constant.
    pub fn full_numer(&self) -> BiPoly {
        self.numer
            .mul_monomial(self.prefactor_exponents.0, self.prefactor_exponents.1)
            .scale(self.unimodular_constant)
    }

    /// Evaluates the RIF at an interior or boundary point away from
    /// denominator zeros.
    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let pre = z1.powu(self.prefactor_exponents.0) * z2.powu(self.prefactor_exponents.1);
        self.unimodular_constant * pre * self.numer.eval(z1, z2) / self.denom.eval(z1, z2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kappa_denom() -> BiPoly {
        BiPoly::from_coeffs([
            ((0, 0), c(2.0, 0.0)),
            ((1, 0), c(-1.0, 0.0)),
            ((0, 1), c(-1.0, 0.0)),
        ])
        .unwrap()
    }

    fn amy_denom() -> BiPoly {
        BiPoly::from_coeffs([
            ((0, 0), c(4.0, 0.0)),
            ((1, 0), c(-3.0, 0.0)),
            ((0, 1), c(-1.0, 0.0)),
            ((1, 1), c(-1.0, 0.0)),
            ((2, 0), c(1.0, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = kappa_denom();
        assert_eq!(p.eval(c(0.0, 0.0), c(0.0, 0.0)), c(2.0, 0.0));
        assert!(p.eval(c(1.0, 0.0), c(1.0, 0.0)).norm() < 1e-14);
        assert!(amy_denom().eval(c(1.0, 0.0), c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bidegrees() {
        assert_eq!(kappa_denom().bidegree().unwrap(), (1, 1));
        assert_eq!(amy_denom().bidegree().unwrap(), (2, 1));
        assert_eq!(BiPoly::constant(c(5.0, 0.0)).bidegree().unwrap(), (0, 0));
        assert!(BiPoly::zero().bidegree().is_err());
    }

    #[test]
    fn derivative_examples() {
        let p = kappa_denom();
        let d = p.partial_derivative(Var::Z1, 1);
        assert_eq!(d.coeff(0, 0), c(-1.0, 0.0));
        assert_eq!(d.bidegree().unwrap(), (0, 0));

        let z1sq = BiPoly::from_coeffs([((2, 0), c(1.0, 0.0))]).unwrap();
        let dd = z1sq.partial_derivative(Var::Z1, 2);
        assert_eq!(dd.coeff(0, 0), c(2.0, 0.0));

        let z1z2 = BiPoly::from_coeffs([((1, 1), c(1.0, 0.0))]).unwrap();
        let d2 = z1z2.partial_derivative(Var::Z2, 1);
        assert_eq!(d2.coeff(1, 0), c(1.0, 0.0));
        assert_eq!(d2.coeff(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn reflect_kappa() {
        let refl = kappa_denom().reflect((1, 1)).unwrap();
        assert_eq!(refl.coeff(1, 1), c(2.0, 0.0));
        assert_eq!(refl.coeff(1, 0), c(-1.0, 0.0));
        assert_eq!(refl.coeff(0, 1), c(-1.0, 0.0));
        assert_eq!(refl.coeff(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn reflect_amy() {
        let refl = amy_denom().reflect((2, 1)).unwrap();
        assert_eq!(refl.coeff(2, 1), c(4.0, 0.0));
        assert_eq!(refl.coeff(2, 0), c(-1.0, 0.0));
        assert_eq!(refl.coeff(1, 1), c(-3.0, 0.0));
        assert_eq!(refl.coeff(1, 0), c(-1.0, 0.0));
        assert_eq!(refl.coeff(0, 1), c(1.0, 0.0));
    }

    #[test]
    fn reflect_involution() {
        let p = amy_denom();
        let twice = p.reflect((2, 1)).unwrap().reflect((2, 1)).unwrap();
        assert_eq!(p, twice);
    }

    #[test]
    fn torus_modulus_invariance() {
        // |reflect(p)| = |p| on the torus.
        let p = amy_denom();
        let pt = p.reflect((2, 1)).unwrap();
        for a in 0..64 {
            for b in 0..64 {
                let s = 2.0 * std::f64::consts::PI * a as f64 / 64.0;
                let t = 2.0 * std::f64::consts::PI * b as f64 / 64.0;
                let z1 = Complex64::from_polar(1.0, s);
                let z2 = Complex64::from_polar(1.0, t);
                assert!((p.eval(z1, z2).norm() - pt.eval(z1, z2).norm()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rif_checks() {
        let rif = Rif::from_denominator(kappa_denom()).unwrap();
        // kappa(0.5, 0) = (2*0.5*0 - 0.5 - 0)/(2 - 0.5 - 0) = -1/3
        let v = rif.eval(c(0.5, 0.0), c(0.0, 0.0));
        assert!((v - c(-1.0 / 3.0, 0.0)).norm() < 1e-12);
        // modulus at interior samples is at most 1
        for k in 0..50 {
            let t = k as f64 * 0.7;
            let z1 = Complex64::from_polar(0.8, t);
            let z2 = Complex64::from_polar(0.6, 2.1 * t);
            assert!(rif.eval(z1, z2).norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn rif_rejects_vanishing_constant_term() {
        let p = BiPoly::from_coeffs([((1, 0), c(1.0, 0.0))]).unwrap();
        assert!(Rif::from_denominator(p).is_err());
    }
}

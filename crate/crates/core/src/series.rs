//! Laurent polynomials in z with Chow-class coefficients, and q-series graded
//! by effective curve classes and truncated at an ample-degree cap.
//!
//! Nilpotency of positive-degree classes makes every (D + jz) with j != 0
//! invertible inside finite Laurent polynomials, which is all the z-arithmetic
//! the generating functions need. Novikov series never carry keys above the
//! cap; arithmetic truncates on the fly.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::chow::{ChowElement, ChowRing, Rat};
use crate::error::{EngineError, Result};
use crate::toric::{CurveClass, Geometry};

/// Finite Laurent polynomial in z over Chow classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZElement {
    pub coeffs: BTreeMap<i64, ChowElement>,
}

impl ZElement {
    pub fn zero() -> Self {
        ZElement {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(ring: &ChowRing) -> Self {
        ZElement::from_class(ring.one())
    }

    /// A class sitting in the z^0 slot.
    pub fn from_class(c: ChowElement) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        ZElement { coeffs }
    }

    /// c * z^k.
    pub fn monomial(c: ChowElement, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        ZElement { coeffs }
    }

    /// The binomial D + j z.
    pub fn linear(ring: &ChowRing, d: &ChowElement, j: i64) -> Self {
        let mut out = ZElement::from_class(d.clone());
        let scalar = ring.scale(&ring.one(), &crate::chow::rat(j));
        if !scalar.is_zero() {
            out.coeffs.insert(1, scalar);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> Option<&ChowElement> {
        self.coeffs.get(&k)
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn add(&self, other: &ZElement, ring: &ChowRing) -> Result<ZElement> {
        let mut out = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            let merged = match out.get(k) {
                Some(existing) => ring.add(existing, c)?,
                None => c.clone(),
            };
            if merged.is_zero() {
                out.remove(k);
            } else {
                out.insert(*k, merged);
            }
        }
        Ok(ZElement { coeffs: out })
    }

    pub fn sub(&self, other: &ZElement, ring: &ChowRing) -> Result<ZElement> {
        self.add(&other.scale(&-Rat::one(), ring), ring)
    }

    pub fn scale(&self, c: &Rat, ring: &ChowRing) -> ZElement {
        if c.is_zero() {
            return ZElement::zero();
        }
        ZElement {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, x)| (*k, ring.scale(x, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &ZElement, ring: &ChowRing) -> Result<ZElement> {
        let mut out: BTreeMap<i64, ChowElement> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                let prod = ring.multiply(ca, cb)?;
                if prod.is_zero() {
                    continue;
                }
                let k = ka + kb;
                let merged = match out.get(&k) {
                    Some(existing) => ring.add(existing, &prod)?,
                    None => prod,
                };
                if merged.is_zero() {
                    out.remove(&k);
                } else {
                    out.insert(k, merged);
                }
            }
        }
        Ok(ZElement { coeffs: out })
    }

    /// Multiply by a plain class.
    pub fn mul_class(&self, c: &ChowElement, ring: &ChowRing) -> Result<ZElement> {
        self.mul(&ZElement::from_class(c.clone()), ring)
    }

    /// Shift every exponent by k (multiplication by z^k).
    pub fn shift(&self, k: i64) -> ZElement {
        ZElement {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }
}

/// (D + jz)^{-1} for j != 0 and D of positive degree: the geometric series
/// terminates by nilpotency of D.
pub fn invert_linear(ring: &ChowRing, d: &ChowElement, j: i64) -> Result<ZElement> {
    if j == 0 {
        return Err(EngineError::ZeroJ);
    }
    if !d.scalar_part().is_zero() {
        return Err(EngineError::InvalidInput(
            "invert_linear requires a class with no degree-0 part".into(),
        ));
    }
    let mut out = ZElement::zero();
    let mut power = ring.one();
    let mut jpow = crate::chow::rat(j);
    let mut sign = Rat::one();
    for k in 0..=(ring.dim() as i64) {
        let term = ring.scale(&power, &(&sign / &jpow));
        if term.is_zero() {
            break;
        }
        out.coeffs.insert(-k - 1, term);
        power = ring.multiply(&power, d)?;
        if power.is_zero() {
            break;
        }
        jpow = &jpow * &crate::chow::rat(j);
        sign = -sign;
    }
    Ok(out)
}

/// A q-series with plain rational coefficients (the shape of P_0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarQSeries {
    pub cap: i64,
    pub terms: BTreeMap<CurveClass, Rat>,
}

impl ScalarQSeries {
    pub fn one(num_rays: usize, cap: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(CurveClass::zero(num_rays), Rat::one());
        ScalarQSeries { cap, terms }
    }

    pub fn coeff(&self, beta: &CurveClass) -> Rat {
        self.terms.get(beta).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self, num_rays: usize) -> Rat {
        self.coeff(&CurveClass::zero(num_rays))
    }
}

/// A q-series of z-Laurent polynomials truncated at ample degree `cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovSeries {
    pub cap: i64,
    pub terms: BTreeMap<CurveClass, ZElement>,
}

impl NovikovSeries {
    pub fn new(cap: i64) -> Self {
        NovikovSeries {
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, beta: CurveClass, value: ZElement) {
        if !value.is_zero() {
            self.terms.insert(beta, value);
        }
    }

    pub fn coeff(&self, beta: &CurveClass) -> ZElement {
        self.terms.get(beta).cloned().unwrap_or_else(ZElement::zero)
    }

    /// Drop all keys above a smaller cap.
    pub fn truncate(&self, geom: &Geometry, cap: i64) -> NovikovSeries {
        NovikovSeries {
            cap,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| geom.degree(b) <= cap)
                .map(|(b, v)| (b.clone(), v.clone()))
                .collect(),
        }
    }

    /// Product of two series, truncated at the common cap.
    pub fn mul(&self, other: &NovikovSeries, geom: &Geometry, ring: &ChowRing) -> Result<NovikovSeries> {
        let cap = self.cap.min(other.cap);
        let mut out = NovikovSeries::new(cap);
        for (ba, va) in &self.terms {
            for (bb, vb) in &other.terms {
                let b = ba.add(bb);
                if geom.degree(&b) > cap {
                    continue;
                }
                let prod = va.mul(vb, ring)?;
                if prod.is_zero() {
                    continue;
                }
                let merged = match out.terms.get(&b) {
                    Some(existing) => existing.add(&prod, ring)?,
                    None => prod,
                };
                if merged.is_zero() {
                    out.terms.remove(&b);
                } else {
                    out.terms.insert(b, merged);
                }
            }
        }
        Ok(out)
    }

    /// Multiply by a scalar q-series.
    pub fn mul_scalar_series(
        &self,
        s: &ScalarQSeries,
        geom: &Geometry,
        ring: &ChowRing,
    ) -> Result<NovikovSeries> {
        let cap = self.cap.min(s.cap);
        let mut out = NovikovSeries::new(cap);
        for (ba, va) in &self.terms {
            for (bb, c) in &s.terms {
                let b = ba.add(bb);
                if geom.degree(&b) > cap {
                    continue;
                }
                let prod = va.scale(c, ring);
                if prod.is_zero() {
                    continue;
                }
                let merged = match out.terms.get(&b) {
                    Some(existing) => existing.add(&prod, ring)?,
                    None => prod,
                };
                if merged.is_zero() {
                    out.terms.remove(&b);
                } else {
                    out.terms.insert(b, merged);
                }
            }
        }
        Ok(out)
    }
}

/// Divide a Novikov series by a scalar q-series with constant term 1, by the
/// graded geometric-series recursion. The result r satisfies num = r * den up
/// to the cap.
pub fn novikov_divide(
    geom: &Geometry,
    ring: &ChowRing,
    num: &NovikovSeries,
    den: &ScalarQSeries,
) -> Result<NovikovSeries> {
    let n = geom.num_rays();
    if den.constant_term(n) != Rat::one() {
        return Err(EngineError::NonUnitDenominator);
    }
    for b in den.terms.keys() {
        if !b.is_zero() && !geom.is_effective(b) {
            return Err(EngineError::InvalidInput(format!(
                "denominator key {:?} is not an effective class",
                b.pairings
            )));
        }
    }
    let cap = num.cap.min(den.cap);
    let mut classes = vec![CurveClass::zero(n)];
    if cap > 0 {
        match geom.enumerate_effective(cap) {
            Ok(list) => classes.extend(list),
            Err(EngineError::CapTooSmall { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let index: std::collections::BTreeSet<Vec<i64>> =
        classes.iter().map(|c| c.pairings.clone()).collect();
    let mut result = NovikovSeries::new(cap);
    for beta in &classes {
        let mut value = num.coeff(beta);
        for (gamma, c) in &den.terms {
            if gamma.is_zero() {
                continue;
            }
            let rest = beta.sub(gamma);
            if !index.contains(&rest.pairings) {
                continue;
            }
            let prior = result.coeff(&rest).scale(c, ring);
            value = value.sub(&prior, ring)?;
        }
        result.insert(beta.clone(), value);
    }
    Ok(result)
}

/// Decode two-pointed invariants from the z-expansion of an S-function
/// contribution: table[(i, k)] = integrate(basis[i] * coeff of z^{-k-1}),
/// listing only the non-zero entries.
pub fn extract_invariants(
    ring: &ChowRing,
    s: &ZElement,
    basis: &[ChowElement],
) -> Result<BTreeMap<(usize, u32), Rat>> {
    let mut table = BTreeMap::new();
    for (exp, class) in &s.coeffs {
        if *exp >= 0 {
            continue;
        }
        let k = u32::try_from(-exp - 1).expect("z-exponent in range");
        for (i, b) in basis.iter().enumerate() {
            let val = ring.pairing(b, class)?;
            if !val.is_zero() {
                table.insert((i, k), val);
            }
        }
    }
    Ok(table)
}

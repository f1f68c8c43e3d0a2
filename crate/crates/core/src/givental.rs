//! Closed-form two-pointed S-function for toric Fano ambients, and the
//! factorial coefficient oracles it is cross-checked against.
//!
//! The S-function of a toric Fano variety is a ratio of products of linear
//! factors (D_rho + j z), one block per ray, with block shape determined by
//! the sign of D_rho . beta:
//!
//!   S(z, beta) = prod_rho  prod_{j <= 0} (D_rho + jz) / prod_{j <= D_rho.beta} (D_rho + jz)
//!
//! Rays pairing to zero contribute nothing; positive rays contribute inverted
//! factors for j = 1..D.beta; negative rays contribute plain factors for
//! j = D.beta+1..0 (the j = 0 factor is the nilpotent class D_rho itself,
//! which is what kills the scalar part of S in the presence of negative
//! pairings).

use num::{One, Zero};

use crate::chow::{factorial, render_rat, ChowRing, Rat};
use crate::error::{EngineError, Result};
use crate::series::{invert_linear, ZElement};
use crate::toric::{CurveClass, Geometry};

/// The two-pointed S-function S(z, beta) as a finite z-Laurent polynomial.
/// Requires a Fano ambient; beta = 0 returns 1 by convention.
pub fn s_function(geom: &Geometry, ring: &ChowRing, beta: &CurveClass) -> Result<ZElement> {
    geom.check_fano()?;
    geom.check_curve_class(beta)?;
    if beta.is_zero() {
        return Ok(ZElement::one(ring));
    }
    let mut out = ZElement::one(ring);
    for (rho, &p) in beta.pairings.iter().enumerate() {
        let d = ring.generator(rho);
        if p > 0 {
            for j in 1..=p {
                let inv = invert_linear(ring, &d, j)?;
                out = out.mul(&inv, ring)?;
            }
        } else if p < 0 {
            for j in (p + 1)..=0 {
                let factor = ZElement::linear(ring, &d, j);
                out = out.mul(&factor, ring)?;
            }
        }
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// Coefficient of q^beta in the scalar series J_0, i.e. in the hypergeometric
/// normalization of the correction series. The underlying invariant is
/// supported on classes with K_Y . beta = 0 (virtual dimension forces every
/// other coefficient to vanish); on that support the value is the factorial
/// ratio
///
///   (Y.beta)! * prod_{D.beta < 0} (-1)^{-D.beta} (-D.beta)! / prod_{D.beta > 0} (D.beta)!
pub fn j0_coefficient(geom: &Geometry, beta: &CurveClass) -> Result<Rat> {
    let e = geom.y_degree(beta);
    if e < 1 {
        return Err(EngineError::InvalidInput(
            "j0_coefficient needs Y.beta >= 1".into(),
        ));
    }
    if geom.ky_degree(beta) != 0 {
        return Ok(Rat::zero());
    }
    let mut value = factorial(e as u64);
    for &p in &beta.pairings {
        if p > 0 {
            value /= factorial(p as u64);
        } else if p < 0 {
            let m = (-p) as u64;
            let sign = if m.is_multiple_of(2) { Rat::one() } else { -Rat::one() };
            value = &value * sign * factorial(m);
        }
    }
    Ok(value)
}

/// <[pt_X] psi_1^{Y.beta - 1}, 1>, read off the z^{-Y.beta} coefficient of
/// the S-function. Cross-checked against [`j0_coefficient`] / (Y.beta)! on
/// classes with non-negative pairings, where the two routes provably agree;
/// any disagreement is a bug, not a property of the input.
pub fn pt_psi_invariant(geom: &Geometry, ring: &ChowRing, beta: &CurveClass) -> Result<Rat> {
    let e = geom.y_degree(beta);
    if e < 1 {
        return Err(EngineError::InvalidInput(
            "pt_psi_invariant needs Y.beta >= 1".into(),
        ));
    }
    let s = s_function(geom, ring, beta)?;
    let extracted = match s.coeff(-e) {
        Some(class) => ring.pairing(&ring.point_class(), class)?,
        None => Rat::zero(),
    };
    if beta.pairings.iter().all(|&p| p >= 0) {
        let closed = j0_coefficient(geom, beta)? / factorial(e as u64);
        if closed != extracted {
            return Err(EngineError::OracleMismatch {
                beta: beta.pairings.clone(),
                extracted: render_rat(&extracted),
                closed_form: render_rat(&closed),
            });
        }
    }
    Ok(extracted)
}

/// Upper bound on the z-support of the S-function: contained in
/// [-(max(Y.beta, -K_X.beta) + dim + 1), 0].
pub fn s_support_bound(geom: &Geometry, beta: &CurveClass) -> (i64, i64) {
    let e = geom.y_degree(beta).max(-geom.kx_degree(beta));
    (-(e + geom.dim() as i64 + 1), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{rat, rat_frac, ChowRing};
    use crate::toric::{pn_divisor, projective_space, Geometry, GeometryFlags};

    fn pn_geometry(n: usize, y: i64) -> (Geometry, ChowRing) {
        let geom = Geometry::new(
            projective_space(n),
            pn_divisor(n, y),
            pn_divisor(n, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap();
        let ring = ChowRing::build(&geom).unwrap();
        (geom, ring)
    }

    fn line(n: usize, d: i64) -> CurveClass {
        CurveClass {
            pairings: vec![d; n + 1],
        }
    }

    #[test]
    fn s_of_zero_is_one() {
        let (geom, ring) = pn_geometry(3, 2);
        let beta = CurveClass::zero(4);
        assert_eq!(s_function(&geom, &ring, &beta).unwrap(), ZElement::one(&ring));
    }

    #[test]
    fn s_on_p1_degree_one() {
        let (geom, ring) = pn_geometry(1, 1);
        let s = s_function(&geom, &ring, &line(1, 1)).unwrap();
        let h = ring.generator(0);
        assert_eq!(s.coeff(-2).unwrap(), &ring.one());
        assert_eq!(s.coeff(-3).unwrap(), &ring.scale(&h, &rat(-2)));
        assert_eq!(s.coeffs.len(), 2);
    }

    #[test]
    fn s_matches_specialized_product_on_pn() {
        // On P^N the formula collapses to 1 / prod_{j=1}^{d} (H + jz)^{N+1}.
        for (n, d) in [(2usize, 2i64), (3, 1), (4, 2)] {
            let (geom, ring) = pn_geometry(n, 1);
            let s = s_function(&geom, &ring, &line(n, d)).unwrap();
            let h = ring.generator(0);
            // Assemble independently: multiply the d*(N+1) inverse factors.
            let mut expected = ZElement::one(&ring);
            for j in 1..=d {
                let inv = invert_linear(&ring, &h, j).unwrap();
                for _ in 0..(n + 1) {
                    expected = expected.mul(&inv, &ring).unwrap();
                }
            }
            assert_eq!(s, expected);
        }
    }

    #[test]
    fn j0_on_quintic() {
        let (geom, _) = pn_geometry(4, 5);
        assert_eq!(j0_coefficient(&geom, &line(4, 1)).unwrap(), rat(120));
        assert_eq!(j0_coefficient(&geom, &line(4, 2)).unwrap(), rat(113400));
    }

    #[test]
    fn j0_on_p3_quartic() {
        let (geom, _) = pn_geometry(3, 4);
        assert_eq!(j0_coefficient(&geom, &line(3, 1)).unwrap(), rat(24));
    }

    #[test]
    fn j0_vanishes_off_the_ky_trivial_wall() {
        // K_Y . beta < 0 forces the underlying invariant to vanish.
        let (geom, _) = pn_geometry(2, 1);
        assert_eq!(j0_coefficient(&geom, &line(2, 1)).unwrap(), Rat::zero());
    }

    #[test]
    fn pt_psi_on_quintic_and_quartic() {
        let (geom, ring) = pn_geometry(4, 5);
        assert_eq!(pt_psi_invariant(&geom, &ring, &line(4, 1)).unwrap(), rat(1));
        let (geom, ring) = pn_geometry(3, 4);
        assert_eq!(pt_psi_invariant(&geom, &ring, &line(3, 1)).unwrap(), rat(1));
        assert_eq!(
            pt_psi_invariant(&geom, &ring, &line(3, 2)).unwrap(),
            rat_frac(1, 16)
        );
    }

    #[test]
    fn cross_oracle_agrees_up_to_cap_four() {
        for (n, y) in [(2usize, 1i64), (3, 2), (3, 3), (3, 4), (4, 5)] {
            let (geom, ring) = pn_geometry(n, y);
            for beta in geom.enumerate_effective(4).unwrap() {
                let e = geom.y_degree(&beta);
                if e < 1 {
                    continue;
                }
                let lhs = pt_psi_invariant(&geom, &ring, &beta).unwrap() * factorial(e as u64);
                let rhs = j0_coefficient(&geom, &beta).unwrap();
                assert_eq!(lhs, rhs, "mismatch on P^{n}, Y={y}H, beta={:?}", beta.pairings);
            }
        }
    }

    #[test]
    fn non_fano_rejected() {
        use crate::toric::{hirzebruch, DivisorClass};
        // F_3 is not Fano: -K pairs negatively with the -3-section.
        let fan = hirzebruch(3);
        let ample = DivisorClass {
            coeffs: vec![4, 1, 0, 0],
        };
        let geom = Geometry::new(fan, ample.clone(), ample, GeometryFlags::default()).unwrap();
        assert!(!geom.is_fano());
        let ring = ChowRing::build(&geom).unwrap();
        let beta = geom.wall_classes()[0].clone();
        assert!(matches!(
            s_function(&geom, &ring, &beta),
            Err(EngineError::NotFano { .. })
        ));
    }

    #[test]
    fn s_support_inside_bound() {
        for (n, y, d) in [(2usize, 1i64, 3i64), (3, 2, 2), (4, 5, 1)] {
            let (geom, ring) = pn_geometry(n, y);
            let beta = line(n, d);
            let s = s_function(&geom, &ring, &beta).unwrap();
            let (lo, hi) = s_support_bound(&geom, &beta);
            for k in s.support() {
                assert!(k >= lo && k <= hi, "z^{k} outside [{lo}, {hi}]");
            }
        }
    }
}

//! The quantum Lefschetz pipeline: the correction series P_0, the restricted
//! two-pointed series of the hypersurface, the relative ladder, and the
//! wall-crossing comparison against the hypergeometric relative I-function.
//!
//! Every H*(Y)-valued series is carried as its pushforward avatar in H*(X);
//! the operator i^* i_* acts on avatars as multiplication by the class of Y.
//! In the semipositive regime the comb corrections vanish below the top
//! tangency, so each rung of the ladder is a single linear factor times the
//! previous one; `comb_vanishing_report` re-derives the dimension ledger
//! behind that vanishing as an executable audit.

use num::Zero;

use crate::chow::{factorial, ChowRing, Rat};
use crate::error::{EngineError, Result};
use crate::givental::{pt_psi_invariant, s_function};
use crate::series::{novikov_divide, NovikovSeries, ScalarQSeries, ZElement};
use crate::toric::{CurveClass, Geometry};

/// A Novikov series valued in H*(X) that stands for an H*(Y)-valued series
/// via pushforward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSeries(pub NovikovSeries);

/// The correction series P_0(q): constant term 1, and for each effective
/// class with K_Y . beta = 0 the coefficient (Y.beta)! <[pt] psi^{Y.beta-1}, 1>.
pub fn p0_series(geom: &Geometry, ring: &ChowRing, cap: i64) -> Result<ScalarQSeries> {
    geom.check_semipositive()?;
    geom.check_fano()?;
    let mut series = ScalarQSeries::one(geom.num_rays(), cap);
    if cap > 0 {
        let classes = match geom.enumerate_effective(cap) {
            Ok(list) => list,
            Err(EngineError::CapTooSmall { .. }) => Vec::new(),
            Err(e) => return Err(e),
        };
        for beta in classes {
            if geom.ky_degree(&beta) != 0 {
                continue;
            }
            let e = geom.y_degree(&beta);
            if e < 1 {
                continue;
            }
            let coeff = pt_psi_invariant(geom, ring, &beta)? * factorial(e as u64);
            if !coeff.is_zero() {
                series.terms.insert(beta, coeff);
            }
        }
    }
    Ok(series)
}

/// Numerator of the Lefschetz formula: sum_beta q^beta prod_{j=0}^{Y.beta}
/// (Y + jz) S(z, beta). The j = 0 factor is plain multiplication by the
/// class of Y, so the q^0 term is Y itself.
pub fn lefschetz_numerator(geom: &Geometry, ring: &ChowRing, cap: i64) -> Result<NovikovSeries> {
    geom.check_fano()?;
    let y = ring.divisor_element(&geom.y.coeffs);
    let mut num = NovikovSeries::new(cap);
    let mut classes = vec![CurveClass::zero(geom.num_rays())];
    if cap > 0 {
        match geom.enumerate_effective(cap) {
            Ok(list) => classes.extend(list),
            Err(EngineError::CapTooSmall { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    for beta in classes {
        let e = geom.y_degree(&beta);
        let mut term = s_function(geom, ring, &beta)?;
        for j in 0..=e {
            term = term.mul(&ZElement::linear(ring, &y, j), ring)?;
        }
        num.insert(beta, term);
    }
    Ok(num)
}

/// The restricted two-pointed series of Y, as an avatar in H*(X): the
/// Lefschetz numerator divided by P_0.
pub fn lefschetz_series(geom: &Geometry, ring: &ChowRing, cap: i64) -> Result<RestrictedSeries> {
    geom.check_semipositive()?;
    let num = lefschetz_numerator(geom, ring, cap)?;
    let p0 = p0_series(geom, ring, cap)?;
    Ok(RestrictedSeries(novikov_divide(geom, ring, &num, &p0)?))
}

/// Rungs 0..=upto of the relative ladder for a fixed class: rung 0 is the
/// S-function, and in the semipositive regime rung m+1 = (Y + mz) * rung m
/// for m below the top tangency Y.beta.
pub fn relative_ladder(
    geom: &Geometry,
    ring: &ChowRing,
    beta: &CurveClass,
    upto: i64,
) -> Result<Vec<ZElement>> {
    geom.check_semipositive()?;
    let e = geom.y_degree(beta);
    if upto > e {
        return Err(EngineError::InvalidInput(format!(
            "tangency {upto} exceeds Y.beta = {e}"
        )));
    }
    let y = ring.divisor_element(&geom.y.coeffs);
    let mut rungs = Vec::with_capacity(upto as usize + 1);
    rungs.push(s_function(geom, ring, beta)?);
    for m in 0..upto {
        let next = rungs
            .last()
            .unwrap()
            .mul(&ZElement::linear(ring, &y, m), ring)?;
        rungs.push(next);
    }
    Ok(rungs)
}

/// The two-pointed relative point invariant <rho_1, 1> at maximal tangency:
/// (Y.beta - 1)! <[pt] psi^{Y.beta-1}, 1>.
pub fn relative_point_invariant(geom: &Geometry, ring: &ChowRing, beta: &CurveClass) -> Result<Rat> {
    let e = geom.y_degree(beta);
    if e < 1 {
        return Err(EngineError::InvalidInput(
            "relative invariants need Y.beta >= 1".into(),
        ));
    }
    Ok(pt_psi_invariant(geom, ring, beta)? * factorial((e - 1) as u64))
}

/// Avatar of the relative I-function for a fixed class: the top rung of the
/// ladder, prod_{m=0}^{e-1} (Y + mz) S(z, beta) with e = Y.beta >= 1.
pub fn relative_i(geom: &Geometry, ring: &ChowRing, beta: &CurveClass) -> Result<ZElement> {
    let e = geom.y_degree(beta);
    if e < 1 {
        return Err(EngineError::InvalidInput(
            "the relative I-function is undefined for Y.beta = 0".into(),
        ));
    }
    let rungs = relative_ladder(geom, ring, beta, e)?;
    Ok(rungs.into_iter().next_back().unwrap())
}

/// Avatar of the hypergeometric relative I-function: Y * J(z, beta) *
/// prod_{m=1}^{e-1} (Y + mz), with J = z * S assembled independently of the
/// ladder.
pub fn fty_i(geom: &Geometry, ring: &ChowRing, beta: &CurveClass) -> Result<ZElement> {
    geom.check_fano()?;
    let e = geom.y_degree(beta);
    if e < 1 {
        return Err(EngineError::InvalidInput(
            "the relative I-function is undefined for Y.beta = 0".into(),
        ));
    }
    let y = ring.divisor_element(&geom.y.coeffs);
    let j_function = s_function(geom, ring, beta)?.shift(1);
    let mut out = j_function.mul_class(&y, ring)?;
    for m in 1..e {
        out = out.mul(&ZElement::linear(ring, &y, m), ring)?;
    }
    Ok(out)
}

/// Outcome of the wall-crossing comparison for one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallcrossOutcome {
    pub beta: CurveClass,
    pub lhs: ZElement,
    pub rhs: ZElement,
    pub equal: bool,
}

/// Compare Y * (ladder top) against z^{-1} * Y * (hypergeometric side),
/// coefficientwise in z. Inequality is reported, not raised.
pub fn wallcross_check(geom: &Geometry, ring: &ChowRing, beta: &CurveClass) -> Result<WallcrossOutcome> {
    let y = ring.divisor_element(&geom.y.coeffs);
    let lhs = relative_i(geom, ring, beta)?.mul_class(&y, ring)?;
    let rhs = fty_i(geom, ring, beta)?.mul_class(&y, ring)?.shift(-1);
    let equal = lhs == rhs;
    Ok(WallcrossOutcome {
        beta: beta.clone(),
        lhs,
        rhs,
        equal,
    })
}

// ---------------------------------------------------------------------------
// the dimension-ledger audit
// ---------------------------------------------------------------------------

/// One enumerated contribution to the tangency-m correction term of the
/// two-pointed ladder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileKind {
    /// The m * [relative space] summand of the correction term.
    RelativeTerm,
    /// Comb with no teeth: the whole curve maps into Y.
    ZeroTeeth,
    /// Comb with one tooth of class beta1 meeting Y with the given
    /// multiplicity; the internal component carries beta0.
    OneTooth {
        beta0: CurveClass,
        beta1: CurveClass,
        multiplicity: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileVerdict {
    pub kind: ProfileKind,
    /// Virtual dimension of the moduli space behind this contribution.
    pub virtual_dim: i64,
    /// The ledger quantity that must vanish for survival (codim of the
    /// gluing insertion, or vdim minus forced insertion codim).
    pub obstruction: i64,
    pub surviving: bool,
    pub weight: i64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombVanishingReport {
    pub beta: CurveClass,
    pub tangency: i64,
    pub entries: Vec<ProfileVerdict>,
    /// True when every surviving entry sits at tangency = Y.beta.
    pub surviving_only_at_top: bool,
}

/// Enumerate the pieces of the tangency-m correction term for the two-pointed
/// ladder at a fixed class, classify each by the dimension ledger, and check
/// that survivors occur only at the top tangency m = Y.beta.
pub fn comb_vanishing_report(
    geom: &Geometry,
    ring: &ChowRing,
    beta: &CurveClass,
    m: i64,
) -> Result<CombVanishingReport> {
    geom.check_semipositive()?;
    let _ = ring;
    let e = geom.y_degree(beta);
    let dim_x = geom.dim() as i64;
    let dim_y = dim_x - 1;
    let kx = geom.kx_degree(beta);
    let ky = geom.ky_degree(beta);
    let mut entries = Vec::new();

    // Piece 1: m * [relative space with tangency (m, 0)], pushed by ev_1.
    {
        let vdim = dim_x - 3 - kx + 2 - m;
        // Only restricted insertions of codimension <= 1 can pair with this
        // piece; the ledger quantity -K_Y.beta + (Y.beta - m) measures the
        // slack above the forced equality.
        let obstruction = -ky + (e - m);
        let surviving = m >= 1 && obstruction == 0;
        entries.push(ProfileVerdict {
            kind: ProfileKind::RelativeTerm,
            virtual_dim: vdim,
            obstruction,
            surviving,
            weight: m,
            reason: if surviving {
                "K_Y.beta = 0 and maximal tangency force the point insertion".into()
            } else if m == 0 {
                "weighted by m = 0".into()
            } else {
                "insertion codimension cannot meet the virtual dimension".into()
            },
        });
    }

    // Piece 2: comb with zero teeth, constrained by Y.beta0 = m with
    // beta0 = beta.
    if e == m {
        entries.push(ProfileVerdict {
            kind: ProfileKind::ZeroTeeth,
            virtual_dim: dim_y - 3 - ky + 2,
            obstruction: 0,
            surviving: true,
            weight: 1,
            reason: "the restricted series of Y itself".into(),
        });
    }

    // Piece 3: combs with one tooth. The single extra marking sits on the
    // tooth, so the internal component has two special points and must carry
    // positive degree.
    for beta0 in geom.effective_splits(beta) {
        let beta1 = beta.sub(&beta0);
        if beta0.is_zero() || beta1.is_zero() {
            continue;
        }
        let m1 = m - geom.y_degree(&beta0);
        if m1 < 1 || m1 > geom.y_degree(&beta1) {
            continue;
        }
        let ky1 = geom.ky_degree(&beta1);
        // codim rho^h = K_Y.beta1 - Y.beta1 + m1 <= 0, with equality needed
        // for a non-trivial diagonal pairing.
        let obstruction = ky1 - geom.y_degree(&beta1) + m1;
        let surviving = obstruction == 0;
        let tooth_vdim = dim_x - 3 - geom.kx_degree(&beta1) + 2 - m1;
        entries.push(ProfileVerdict {
            kind: ProfileKind::OneTooth {
                beta0: beta0.clone(),
                beta1: beta1.clone(),
                multiplicity: m1,
            },
            virtual_dim: tooth_vdim,
            obstruction,
            surviving,
            weight: m1,
            reason: if surviving {
                "gluing insertion forced to the identity / point pair".into()
            } else {
                "gluing insertion would need negative codimension".into()
            },
        });
    }

    let surviving_only_at_top = entries.iter().all(|p| !p.surviving || m == e);
    Ok(CombVanishingReport {
        beta: beta.clone(),
        tangency: m,
        entries,
        surviving_only_at_top,
    })
}

//! Property tests for the algebraic substrate: ring axioms in the Chow
//! quotient, Laurent arithmetic, inverse round-trips, Novikov division, and
//! truncation coherence.

use std::sync::OnceLock;

use proptest::prelude::*;
use quasimap_core::chow::{rat, ChowElement, ChowRing, Rat};
use quasimap_core::series::{invert_linear, novikov_divide, NovikovSeries, ScalarQSeries, ZElement};
use quasimap_core::toric::{
    pair, pn_divisor, product_of_projective_spaces, projective_space, CurveClass, DivisorClass,
    Geometry, GeometryFlags,
};

fn p1xp1() -> &'static (Geometry, ChowRing) {
    static CELL: OnceLock<(Geometry, ChowRing)> = OnceLock::new();
    CELL.get_or_init(|| {
        let geom = Geometry::new(
            product_of_projective_spaces(1, 1),
            DivisorClass {
                coeffs: vec![1, 0, 1, 0],
            },
            DivisorClass {
                coeffs: vec![1, 0, 1, 0],
            },
            GeometryFlags::default(),
        )
        .unwrap();
        let ring = ChowRing::build(&geom).unwrap();
        (geom, ring)
    })
}

fn p3() -> &'static (Geometry, ChowRing) {
    static CELL: OnceLock<(Geometry, ChowRing)> = OnceLock::new();
    CELL.get_or_init(|| {
        let geom = Geometry::new(
            projective_space(3),
            pn_divisor(3, 2),
            pn_divisor(3, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap();
        let ring = ChowRing::build(&geom).unwrap();
        (geom, ring)
    })
}

/// A sparse element with small rational coefficients over the monomial basis.
fn element(ring: &ChowRing, coeffs: &[(usize, i32, u8)]) -> ChowElement {
    let basis = ring.monomial_basis();
    let mut out = ring.zero();
    for &(idx, num, den) in coeffs {
        let m = &basis[idx % basis.len()];
        let c = Rat::new(num.into(), i32::from(den.max(1)).into());
        out = ring
            .add(&out, &ring.scale(&ring.basis_element(m), &c))
            .unwrap();
    }
    out
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(usize, i32, u8)>> {
    prop::collection::vec((0usize..8, -9i32..10, 1u8..5), 0..4)
}

/// A degree-one element from ray-generator coefficients.
fn degree_one(ring: &ChowRing, coeffs: &[i8]) -> ChowElement {
    let mut out = ring.zero();
    for (rho, &c) in coeffs.iter().enumerate().take(ring.num_vars()) {
        out = ring
            .add(&out, &ring.scale(&ring.generator(rho), &rat(i64::from(c))))
            .unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chow_multiply_commutes(a in coeff_strategy(), b in coeff_strategy()) {
        let (_, ring) = p3();
        let x = element(ring, &a);
        let y = element(ring, &b);
        prop_assert_eq!(ring.multiply(&x, &y).unwrap(), ring.multiply(&y, &x).unwrap());
    }

    #[test]
    fn chow_multiply_associates(a in coeff_strategy(), b in coeff_strategy(), c in coeff_strategy()) {
        let (_, ring) = p1xp1();
        let (x, y, z) = (element(ring, &a), element(ring, &b), element(ring, &c));
        let left = ring.multiply(&ring.multiply(&x, &y).unwrap(), &z).unwrap();
        let right = ring.multiply(&x, &ring.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn chow_multiply_distributes(a in coeff_strategy(), b in coeff_strategy(), c in coeff_strategy()) {
        let (_, ring) = p3();
        let (x, y, z) = (element(ring, &a), element(ring, &b), element(ring, &c));
        let left = ring.multiply(&x, &ring.add(&y, &z).unwrap()).unwrap();
        let right = ring
            .add(&ring.multiply(&x, &y).unwrap(), &ring.multiply(&x, &z).unwrap())
            .unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn z_elements_form_a_ring(
        a in coeff_strategy(), ka in -3i64..4,
        b in coeff_strategy(), kb in -3i64..4,
        c in coeff_strategy(), kc in -3i64..4,
    ) {
        let (_, ring) = p1xp1();
        let x = ZElement::monomial(element(ring, &a), ka);
        let y = ZElement::monomial(element(ring, &b), kb);
        let z = ZElement::monomial(element(ring, &c), kc);
        prop_assert_eq!(x.mul(&y, ring).unwrap(), y.mul(&x, ring).unwrap());
        let assoc_l = x.mul(&y, ring).unwrap().mul(&z, ring).unwrap();
        let assoc_r = x.mul(&y.mul(&z, ring).unwrap(), ring).unwrap();
        prop_assert_eq!(assoc_l, assoc_r);
        let dist_l = x.mul(&y.add(&z, ring).unwrap(), ring).unwrap();
        let dist_r = x.mul(&y, ring).unwrap().add(&x.mul(&z, ring).unwrap(), ring).unwrap();
        prop_assert_eq!(dist_l, dist_r);
    }

    #[test]
    fn inverse_round_trip(coeffs in prop::collection::vec(-4i8..5, 4), j in 1i64..7, sign in prop::bool::ANY) {
        let (_, ring) = p3();
        let d = degree_one(ring, &coeffs);
        let j = if sign { j } else { -j };
        let inv = invert_linear(ring, &d, j).unwrap();
        let back = inv.mul(&ZElement::linear(ring, &d, j), ring).unwrap();
        prop_assert_eq!(back, ZElement::one(ring));
    }

    #[test]
    fn novikov_division_round_trip(
        a0 in coeff_strategy(), a1 in coeff_strategy(),
        c1 in -5i64..6, c2 in -5i64..6,
    ) {
        // b is a unit scalar series; (a * b) / b == a up to the cap.
        let (geom, ring) = p1xp1();
        let cap = 2;
        let classes = geom.enumerate_effective(cap).unwrap();
        let mut a = NovikovSeries::new(cap);
        a.insert(CurveClass::zero(4), ZElement::monomial(element(ring, &a0), -1));
        a.insert(classes[0].clone(), ZElement::monomial(element(ring, &a1), 1));
        let mut b = ScalarQSeries::one(4, cap);
        b.terms.insert(classes[0].clone(), rat(c1));
        b.terms.insert(classes[1].clone(), rat(c2));
        let product = a.mul_scalar_series(&b, geom, ring).unwrap();
        let recovered = novikov_divide(geom, ring, &product, &b).unwrap();
        prop_assert_eq!(recovered, a);
    }

    #[test]
    fn truncation_coherence(a0 in coeff_strategy(), a1 in coeff_strategy(), c1 in -5i64..6) {
        // Dividing at a larger cap and truncating agrees with dividing at the
        // smaller cap.
        let (geom, ring) = p1xp1();
        let classes = geom.enumerate_effective(3).unwrap();
        let mut num_big = NovikovSeries::new(3);
        num_big.insert(CurveClass::zero(4), ZElement::from_class(element(ring, &a0)));
        num_big.insert(classes[0].clone(), ZElement::from_class(element(ring, &a1)));
        let mut den_big = ScalarQSeries::one(4, 3);
        den_big.terms.insert(classes[0].clone(), rat(c1));
        let big = novikov_divide(geom, ring, &num_big, &den_big).unwrap();

        let num_small = num_big.truncate(geom, 2);
        let den_small = ScalarQSeries { cap: 2, terms: den_big.terms.clone() };
        let small = novikov_divide(geom, ring, &num_small, &den_small).unwrap();
        prop_assert_eq!(big.truncate(geom, 2), small);
    }

    #[test]
    fn divisor_pairing_ignores_relations(
        a in prop::collection::vec(-5i64..6, 4),
        m in prop::collection::vec(-3i64..4, 2),
        steps in prop::collection::vec(0usize..2, 0..4),
    ) {
        // Shifting a divisor by any relation vector (<m, v_rho>)_rho leaves
        // every pairing with a curve class unchanged.
        let (geom, _) = p1xp1();
        let divisor = DivisorClass { coeffs: a };
        let relation: Vec<i64> = geom
            .fan
            .rays
            .iter()
            .map(|v| v.iter().zip(&m).map(|(x, y)| x * y).sum())
            .collect();
        let shifted = DivisorClass {
            coeffs: divisor
                .coeffs
                .iter()
                .zip(&relation)
                .map(|(x, y)| x + y)
                .collect(),
        };
        prop_assert!(geom.divisors_equal(&divisor, &shifted));
        let walls = geom.wall_classes().to_vec();
        let mut beta = CurveClass::zero(4);
        for s in steps {
            beta = beta.add(&walls[s % walls.len()]);
        }
        prop_assert_eq!(pair(&divisor, &beta), pair(&shifted, &beta));
    }
}

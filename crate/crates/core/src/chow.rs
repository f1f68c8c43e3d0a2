//! The rational Chow ring of a smooth projective toric variety, presented as
//! Q[x_rho : rho in Sigma(1)] modulo the Stanley-Reisner ideal and the linear
//! relations sum_rho <m, v_rho> x_rho.
//!
//! A Groebner basis in graded reverse-lexicographic order (ray-index
//! tie-break) is completed once at construction; elements are kept in normal
//! form over the induced monomial basis. The degree-n piece must be
//! one-dimensional, and the integral is normalized so that the product of the
//! variables of any maximal cone integrates to 1 (asserted for every cone).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num::{BigInt, BigRational, One, Zero};

use crate::error::{EngineError, Result};
use crate::toric::Geometry;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// n! as an exact rational.
pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Render a rational as `p` or `p/q`, never as a float.
pub fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render a class as a sum of coefficient-monomial terms in the ray
/// variables, e.g. `1 - 3*x2 + 6*x2^2`.
pub fn render_class(c: &ChowElement) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, coeff)) in c.terms.iter().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        let mono: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| {
                if e == 1 {
                    format!("x{v}")
                } else {
                    format!("x{v}^{e}")
                }
            })
            .collect();
        if mono.is_empty() {
            out.push_str(&render_rat(coeff));
        } else if coeff.is_one() {
            out.push_str(&mono.join("*"));
        } else {
            out.push_str(&format!("{}*{}", render_rat(coeff), mono.join("*")));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// monomials
// ---------------------------------------------------------------------------

/// Exponent vector over the ray variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Graded reverse-lexicographic order: higher total degree wins; on equal
/// degree, the monomial whose rightmost differing exponent is smaller wins.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {}
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Poly = BTreeMap<Monomial, Rat>;

fn poly_add_term(p: &mut Poly, m: Monomial, c: Rat) {
    if c.is_zero() {
        return;
    }
    match p.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get() + &c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            poly_add_term(&mut out, ma.mul(mb), ca * cb);
        }
    }
    out
}

fn leading(p: &Poly) -> Option<(&Monomial, &Rat)> {
    p.iter().next_back()
}

// ---------------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------------

/// A Chow class in Groebner normal form over the standard-monomial basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChowElement {
    pub(crate) ring_id: u64,
    pub(crate) terms: BTreeMap<Monomial, Rat>,
}

impl ChowElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponents of the top graded piece present, or None for 0.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    /// True when all monomials share one total degree.
    pub fn is_homogeneous(&self) -> bool {
        self.max_degree() == self.min_degree()
    }

    /// Coefficient of the empty monomial.
    pub fn scalar_part(&self) -> Rat {
        self.terms
            .iter()
            .find(|(m, _)| m.degree() == 0)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }
}

// ---------------------------------------------------------------------------
// the ring
// ---------------------------------------------------------------------------

static RING_COUNTER: AtomicU64 = AtomicU64::new(1);

/// H*(X; Q) as a quotient ring with a completed Groebner basis.
#[derive(Debug, Clone)]
pub struct ChowRing {
    id: u64,
    nvars: usize,
    dim: usize,
    groebner: Vec<Poly>,
    /// Standard monomials, grouped by degree 0..=dim.
    basis_by_degree: Vec<Vec<Monomial>>,
    point_monomial: Monomial,
    /// integrate(point_monomial) = point_scale.
    point_scale: Rat,
}

impl ChowRing {
    /// Build the quotient ring from a validated geometry.
    pub fn build(geom: &Geometry) -> Result<ChowRing> {
        let fan = &geom.fan;
        let nvars = fan.rays.len();
        let dim = fan.dim;

        let mut generators: Vec<Poly> = Vec::new();
        for sr in minimal_nonfaces(geom) {
            let mut exps = vec![0u16; nvars];
            for r in sr {
                exps[r] = 1;
            }
            let mut p = Poly::new();
            p.insert(Monomial(exps), Rat::one());
            generators.push(p);
        }
        for j in 0..dim {
            let mut p = Poly::new();
            for (r, ray) in fan.rays.iter().enumerate() {
                poly_add_term(&mut p, Monomial::var(nvars, r), rat(ray[j]));
            }
            if !p.is_empty() {
                generators.push(p);
            }
        }

        let groebner = buchberger(generators);

        let mut basis_by_degree: Vec<Vec<Monomial>> = Vec::with_capacity(dim + 1);
        let leads: Vec<Monomial> = groebner
            .iter()
            .map(|g| leading(g).expect("zero polynomial in basis").0.clone())
            .collect();
        for d in 0..=dim {
            let mut level: Vec<Monomial> = monomials_of_degree(nvars, d)
                .into_iter()
                .filter(|m| !leads.iter().any(|l| l.divides(m)))
                .collect();
            level.sort();
            basis_by_degree.push(level);
        }
        let top = &basis_by_degree[dim];
        if top.len() != 1 {
            return Err(EngineError::DegenerateTopDegree {
                degree: dim,
                dim: top.len(),
            });
        }
        let point_monomial = top[0].clone();
        let total: usize = basis_by_degree.iter().map(|b| b.len()).sum();
        if total != fan.max_cones.len() {
            return Err(EngineError::InvalidGeometry(format!(
                "monomial basis has size {total}, expected {} (number of maximal cones)",
                fan.max_cones.len()
            )));
        }

        let mut ring = ChowRing {
            id: RING_COUNTER.fetch_add(1, AtomicOrdering::Relaxed),
            nvars,
            dim,
            groebner,
            basis_by_degree,
            point_monomial,
            point_scale: Rat::one(),
        };

        // Normalize the integral: the class of any maximal cone's product of
        // variables is the point class, and every cone must give the same
        // scalar.
        let mut scale: Option<Rat> = None;
        for cone in &fan.max_cones {
            let mut exps = vec![0u16; nvars];
            for &r in cone {
                exps[r] += 1;
            }
            let mut p = Poly::new();
            p.insert(Monomial(exps), Rat::one());
            let nf = ring.normal_form(p);
            let coeff = nf.get(&ring.point_monomial).cloned().unwrap_or_else(Rat::zero);
            if coeff.is_zero() || nf.len() != 1 {
                return Err(EngineError::InvalidGeometry(
                    "a maximal cone's variable product does not reduce to the point monomial"
                        .into(),
                ));
            }
            let s = Rat::one() / coeff;
            match &scale {
                None => scale = Some(s),
                Some(prev) if *prev == s => {}
                Some(prev) => {
                    return Err(EngineError::InvalidGeometry(format!(
                        "inconsistent point normalization across cones: {} vs {}",
                        render_rat(prev),
                        render_rat(&s)
                    )));
                }
            }
        }
        ring.point_scale = scale.expect("at least one maximal cone");
        Ok(ring)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    /// Standard monomials of one degree.
    pub fn basis_of_degree(&self, d: usize) -> &[Monomial] {
        &self.basis_by_degree[d]
    }

    /// The full monomial basis, degree-ascending.
    pub fn monomial_basis(&self) -> Vec<Monomial> {
        self.basis_by_degree.iter().flatten().cloned().collect()
    }

    pub fn total_basis_size(&self) -> usize {
        self.basis_by_degree.iter().map(|b| b.len()).sum()
    }

    fn check(&self, a: &ChowElement) -> Result<()> {
        if a.ring_id != self.id {
            return Err(EngineError::RingMismatch);
        }
        Ok(())
    }

    fn wrap(&self, terms: Poly) -> ChowElement {
        ChowElement {
            ring_id: self.id,
            terms,
        }
    }

    pub fn zero(&self) -> ChowElement {
        self.wrap(Poly::new())
    }

    pub fn one(&self) -> ChowElement {
        let mut p = Poly::new();
        p.insert(Monomial::one(self.nvars), Rat::one());
        self.wrap(p)
    }

    /// Normal form of the class of the rho-th toric divisor.
    pub fn generator(&self, rho: usize) -> ChowElement {
        let mut p = Poly::new();
        p.insert(Monomial::var(self.nvars, rho), Rat::one());
        self.wrap(self.normal_form(p))
    }

    /// Class of an integer divisor sum a_rho D_rho.
    pub fn divisor_element(&self, coeffs: &[i64]) -> ChowElement {
        let mut p = Poly::new();
        for (rho, &a) in coeffs.iter().enumerate() {
            poly_add_term(&mut p, Monomial::var(self.nvars, rho), rat(a));
        }
        self.wrap(self.normal_form(p))
    }

    /// The class with integral 1.
    pub fn point_class(&self) -> ChowElement {
        let mut p = Poly::new();
        p.insert(self.point_monomial.clone(), Rat::one() / &self.point_scale);
        self.wrap(p)
    }

    /// A single basis monomial as an element.
    pub fn basis_element(&self, m: &Monomial) -> ChowElement {
        let mut p = Poly::new();
        p.insert(m.clone(), Rat::one());
        self.wrap(p)
    }

    pub fn add(&self, a: &ChowElement, b: &ChowElement) -> Result<ChowElement> {
        self.check(a)?;
        self.check(b)?;
        let mut out = a.terms.clone();
        for (m, c) in &b.terms {
            poly_add_term(&mut out, m.clone(), c.clone());
        }
        Ok(self.wrap(out))
    }

    pub fn sub(&self, a: &ChowElement, b: &ChowElement) -> Result<ChowElement> {
        self.check(a)?;
        self.check(b)?;
        let mut out = a.terms.clone();
        for (m, c) in &b.terms {
            poly_add_term(&mut out, m.clone(), -c.clone());
        }
        Ok(self.wrap(out))
    }

    pub fn scale(&self, a: &ChowElement, c: &Rat) -> ChowElement {
        if c.is_zero() {
            return self.zero();
        }
        let terms = a.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        self.wrap(terms)
    }

    /// Product in the quotient ring, returned in normal form.
    pub fn multiply(&self, a: &ChowElement, b: &ChowElement) -> Result<ChowElement> {
        self.check(a)?;
        self.check(b)?;
        let product = poly_mul(&a.terms, &b.terms);
        Ok(self.wrap(self.normal_form(product)))
    }

    pub fn pow(&self, a: &ChowElement, k: u32) -> Result<ChowElement> {
        let mut out = self.one();
        for _ in 0..k {
            out = self.multiply(&out, a)?;
            if out.is_zero() {
                break;
            }
        }
        Ok(out)
    }

    /// The graded piece of one degree.
    pub fn graded_part(&self, a: &ChowElement, d: u32) -> ChowElement {
        let terms = a
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        self.wrap(terms)
    }

    /// Integral over X: coefficient of the point monomial, normalized so that
    /// every maximal cone's variable product integrates to 1. Lower-degree
    /// parts contribute nothing.
    pub fn integrate(&self, a: &ChowElement) -> Rat {
        a.terms
            .get(&self.point_monomial)
            .map(|c| c * &self.point_scale)
            .unwrap_or_else(Rat::zero)
    }

    /// Poincare pairing of two classes.
    pub fn pairing(&self, a: &ChowElement, b: &ChowElement) -> Result<Rat> {
        Ok(self.integrate(&self.multiply(a, b)?))
    }

    /// Dual basis with respect to the Poincare pairing: integrate(b_i * d_j)
    /// = delta_ij, computed by exact inversion of the pairing matrix.
    pub fn dual_basis(&self, basis: &[ChowElement]) -> Result<Vec<ChowElement>> {
        let n = basis.len();
        if n != self.total_basis_size() {
            return Err(EngineError::SingularPairing);
        }
        let mut gram = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = self.pairing(&basis[i], &basis[j])?;
            }
        }
        let inv = invert_matrix(gram).ok_or(EngineError::SingularPairing)?;
        let mut duals = Vec::with_capacity(n);
        for row in inv {
            let mut acc = self.zero();
            for (c, b) in row.iter().zip(basis) {
                acc = self.add(&acc, &self.scale(b, c))?;
            }
            duals.push(acc);
        }
        Ok(duals)
    }

    fn normal_form(&self, p: Poly) -> Poly {
        normal_form_by(&self.groebner, p)
    }

    /// Reduce an arbitrary polynomial (given as monomial -> coefficient)
    /// modulo the ideal.
    pub fn reduce_poly(&self, terms: BTreeMap<Monomial, Rat>) -> ChowElement {
        self.wrap(self.normal_form(terms))
    }
}

// ---------------------------------------------------------------------------
// Stanley-Reisner combinatorics
// ---------------------------------------------------------------------------

/// Minimal subsets of rays spanning no cone of the fan.
fn minimal_nonfaces(geom: &Geometry) -> Vec<Vec<usize>> {
    let fan = &geom.fan;
    let n = fan.rays.len();
    let cones: Vec<BTreeSet<usize>> = fan
        .max_cones
        .iter()
        .map(|c| c.iter().copied().collect())
        .collect();
    let is_face = |subset: &[usize]| cones.iter().any(|c| subset.iter().all(|r| c.contains(r)));
    let mut nonfaces: Vec<Vec<usize>> = Vec::new();
    // Breadth-first over subset sizes keeps only minimal non-faces: every
    // proper subset of a candidate has already been classified.
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _size in 1..=n {
        let mut next = Vec::new();
        for face in &frontier {
            let start = face.last().map_or(0, |&l| l + 1);
            for r in start..n {
                let mut cand = face.clone();
                cand.push(r);
                if nonfaces.iter().any(|nf| nf.iter().all(|x| cand.contains(x))) {
                    continue;
                }
                if is_face(&cand) {
                    next.push(cand);
                } else {
                    nonfaces.push(cand);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    nonfaces
}

fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u16; nvars];
    fn rec(out: &mut Vec<Monomial>, current: &mut Vec<u16>, var: usize, left: usize) {
        if var + 1 == current.len() {
            current[var] = left as u16;
            out.push(Monomial(current.clone()));
            current[var] = 0;
            return;
        }
        for take in 0..=left {
            current[var] = take as u16;
            rec(out, current, var + 1, left - take);
        }
        current[var] = 0;
    }
    if nvars == 0 {
        return out;
    }
    rec(&mut out, &mut current, 0, d);
    out
}

// ---------------------------------------------------------------------------
// Buchberger
// ---------------------------------------------------------------------------

fn normal_form_by(basis: &[Poly], mut p: Poly) -> Poly {
    let mut out = Poly::new();
    while let Some((m, c)) = p.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        p.remove(&m);
        let reducer = basis.iter().find(|g| {
            leading(g).map(|(lm, _)| lm.divides(&m)).unwrap_or(false)
        });
        match reducer {
            Some(g) => {
                let (lm, lc) = leading(g).unwrap();
                let factor_m = m.div(lm);
                let factor_c = &c / lc;
                // p -= factor * g, skipping the cancelled leading term.
                for (gm, gc) in g {
                    if gm == lm {
                        continue;
                    }
                    poly_add_term(&mut p, gm.mul(&factor_m), -(gc * &factor_c));
                }
            }
            None => {
                poly_add_term(&mut out, m, c);
            }
        }
    }
    out
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let (fm, fc) = leading(f).unwrap();
    let (gm, gc) = leading(g).unwrap();
    let l = fm.lcm(gm);
    let mut out = Poly::new();
    let f_factor_m = l.div(fm);
    let g_factor_m = l.div(gm);
    for (m, c) in f {
        poly_add_term(&mut out, m.mul(&f_factor_m), c / fc);
    }
    for (m, c) in g {
        poly_add_term(&mut out, m.mul(&g_factor_m), -(c / gc));
    }
    out
}

/// Plain Buchberger with the product and chain criteria, followed by
/// inter-reduction to the reduced basis.
fn buchberger(input: Vec<Poly>) -> Vec<Poly> {
    let mut basis: Vec<Poly> = input.into_iter().filter(|p| !p.is_empty()).collect();
    for p in &mut basis {
        make_monic(p);
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.insert((j, i));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(&(i, j)) = pairs.iter().next() {
        pairs.remove(&(i, j));
        done.insert((i, j));
        let (li, _) = leading(&basis[i]).unwrap();
        let (lj, _) = leading(&basis[j]).unwrap();
        if li.coprime(lj) {
            continue; // product criterion
        }
        let l = li.lcm(lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && leading(&basis[k]).unwrap().0.divides(&l)
                && done.contains(&key(i, k))
                && done.contains(&key(j, k))
        });
        if chain {
            continue; // chain criterion
        }
        let mut r = normal_form_by(&basis, s_poly(&basis[i], &basis[j]));
        if !r.is_empty() {
            make_monic(&mut r);
            let new = basis.len();
            basis.push(r);
            for k in 0..new {
                pairs.insert((k, new));
            }
        }
    }
    // Minimalize: drop generators whose lead is divisible by another lead.
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        let (li, _) = leading(&basis[i]).unwrap();
        for j in 0..basis.len() {
            if i != j && keep[j] {
                let (lj, _) = leading(&basis[j]).unwrap();
                if lj.divides(li) && (lj != li || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let minimal: Vec<Poly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    // Fully reduce each generator against the others.
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let mut r = normal_form_by(&others, minimal[i].clone());
        if !r.is_empty() {
            make_monic(&mut r);
            reduced.push(r);
        }
    }
    reduced.sort_by(|a, b| leading(a).unwrap().0.cmp(leading(b).unwrap().0));
    reduced
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn make_monic(p: &mut Poly) {
    let lc = leading(p).unwrap().1.clone();
    if lc.is_one() {
        return;
    }
    for c in p.values_mut() {
        *c = &*c / &lc;
    }
}

fn invert_matrix(mut m: Vec<Vec<Rat>>) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let mj = &m[col][j] * &f;
                m[r][j] = &m[r][j] - &mj;
                let ij = &inv[col][j] * &f;
                inv[r][j] = &inv[r][j] - &ij;
            }
        }
    }
    Some(inv)
}

// ---------------------------------------------------------------------------
// the paper-convention homogeneous basis
// ---------------------------------------------------------------------------

/// A homogeneous basis (upper/lower pair) with the identity listed first and
/// the hypersurface class second whenever Y is part of a basis, so that the
/// first dual is the point class.
#[derive(Debug, Clone)]
pub struct PairedBasis {
    /// eta^i: the "upper" classes, led by 1 and [Y].
    pub upper: Vec<ChowElement>,
    /// eta_i: the dual "lower" classes; lower[0] is the point class.
    pub lower: Vec<ChowElement>,
}

impl PairedBasis {
    /// Number of tokens: indices 1..=k label the restricted classes
    /// rho_h = i^* eta_h (index 0 restricts to zero and is omitted).
    pub fn restricted_token_count(&self) -> usize {
        self.upper.len() - 1
    }
}

/// Build the paired basis for a geometry: degree 0 is {1}; in degree 1 the
/// class of Y comes first and is completed by standard monomials; higher
/// degrees take the standard monomials as they are.
pub fn paper_basis(ring: &ChowRing, geom: &Geometry) -> Result<PairedBasis> {
    let y = ring.divisor_element(&geom.y.coeffs);
    if y.is_zero() || !y.is_homogeneous() || y.max_degree() != Some(1) {
        return Err(EngineError::InvalidGeometry(
            "the hypersurface class must be a nonzero degree-1 class".into(),
        ));
    }
    let deg1 = ring.basis_of_degree(1);
    let mut upper: Vec<ChowElement> = vec![ring.one(), y.clone()];
    // Complete degree 1 by Gaussian elimination over the degree-1 monomials.
    let coords = |e: &ChowElement| -> Vec<Rat> {
        deg1.iter()
            .map(|m| e.terms.get(m).cloned().unwrap_or_else(Rat::zero))
            .collect()
    };
    let mut rows: Vec<Vec<Rat>> = vec![coords(&y)];
    reduce_rows(&mut rows);
    for m in deg1 {
        let cand = ring.basis_element(m);
        let mut rows_try = rows.clone();
        rows_try.push(coords(&cand));
        reduce_rows(&mut rows_try);
        if rows_try.len() > rows.len() {
            rows = rows_try;
            upper.push(cand);
        }
    }
    for d in 2..=ring.dim() {
        for m in ring.basis_of_degree(d) {
            upper.push(ring.basis_element(m));
        }
    }
    let lower = ring.dual_basis(&upper)?;
    Ok(PairedBasis { upper, lower })
}

#[allow(clippy::needless_range_loop)] // parallel row operations
fn reduce_rows(rows: &mut Vec<Vec<Rat>>) {
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    let ncols = rows.first().map(|x| x.len()).unwrap_or(0);
    for col in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let pivot = (r..rows.len()).find(|&i| !rows[i][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(r, p);
        let pv = rows[r][col].clone();
        for j in 0..ncols {
            rows[r][j] = &rows[r][j] / &pv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    let sub = &rows[r][j] * &f;
                    rows[i][j] = &rows[i][j] - &sub;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    rows.retain(|row| row.iter().any(|c| !c.is_zero()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{
        pn_divisor, product_of_projective_spaces, projective_space, DivisorClass, Geometry,
        GeometryFlags,
    };

    fn geometry_pn(n: usize, y_mult: i64) -> Geometry {
        Geometry::new(
            projective_space(n),
            pn_divisor(n, y_mult),
            pn_divisor(n, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap()
    }

    #[test]
    fn p2_basis_and_normalization() {
        let geom = geometry_pn(2, 1);
        let ring = ChowRing::build(&geom).unwrap();
        assert_eq!(ring.total_basis_size(), 3);
        let h = ring.generator(0);
        let h2 = ring.multiply(&h, &h).unwrap();
        assert_eq!(ring.integrate(&h2), rat(1));
        assert_eq!(ring.integrate(&h), rat(0));
    }

    #[test]
    fn p1xp1_kunneth_relations() {
        let fan = product_of_projective_spaces(1, 1);
        let geom = Geometry::new(
            fan,
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            GeometryFlags::default(),
        )
        .unwrap();
        let ring = ChowRing::build(&geom).unwrap();
        assert_eq!(ring.total_basis_size(), 4);
        let h1 = ring.generator(0);
        let h2 = ring.generator(2);
        assert!(ring.multiply(&h1, &h1).unwrap().is_zero());
        assert!(ring.multiply(&h2, &h2).unwrap().is_zero());
        assert_eq!(ring.integrate(&ring.multiply(&h1, &h2).unwrap()), rat(1));
    }

    #[test]
    fn p4_basis_size_is_cone_count() {
        let geom = geometry_pn(4, 5);
        let ring = ChowRing::build(&geom).unwrap();
        assert_eq!(ring.total_basis_size(), 5);
        let y = ring.divisor_element(&geom.y.coeffs);
        let y2 = ring.multiply(&y, &y).unwrap();
        let h = ring.generator(0);
        let h2 = ring.multiply(&h, &h).unwrap();
        assert_eq!(y2, ring.scale(&h2, &rat(25)));
    }

    #[test]
    fn p3_quartic_integral() {
        let geom = geometry_pn(3, 4);
        let ring = ChowRing::build(&geom).unwrap();
        let y = ring.divisor_element(&geom.y.coeffs);
        let y3 = ring.pow(&y, 3).unwrap();
        assert_eq!(ring.integrate(&y3), rat(64));
    }

    #[test]
    fn p2_dual_basis_reverses() {
        let geom = geometry_pn(2, 1);
        let ring = ChowRing::build(&geom).unwrap();
        let h = ring.generator(0);
        let basis = vec![ring.one(), h.clone(), ring.multiply(&h, &h).unwrap()];
        let duals = ring.dual_basis(&basis).unwrap();
        assert_eq!(duals[0], basis[2]);
        assert_eq!(duals[1], basis[1]);
        assert_eq!(duals[2], basis[0]);
    }

    #[test]
    fn p1xp1_dual_basis() {
        let fan = product_of_projective_spaces(1, 1);
        let geom = Geometry::new(
            fan,
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            GeometryFlags::default(),
        )
        .unwrap();
        let ring = ChowRing::build(&geom).unwrap();
        let h1 = ring.generator(0);
        let h2 = ring.generator(2);
        let h1h2 = ring.multiply(&h1, &h2).unwrap();
        let basis = vec![ring.one(), h1.clone(), h2.clone(), h1h2.clone()];
        let duals = ring.dual_basis(&basis).unwrap();
        assert_eq!(duals, vec![h1h2, h2, h1, ring.one()]);
    }

    #[test]
    fn paper_basis_first_dual_is_point() {
        for (n, y) in [(2usize, 1i64), (3, 4), (4, 5)] {
            let geom = geometry_pn(n, y);
            let ring = ChowRing::build(&geom).unwrap();
            let pb = paper_basis(&ring, &geom).unwrap();
            assert_eq!(pb.lower[0], ring.point_class());
            // integrate(eta_1 * Y) = 1.
            let yc = ring.divisor_element(&geom.y.coeffs);
            assert_eq!(ring.pairing(&pb.lower[1], &yc).unwrap(), rat(1));
        }
    }

    #[test]
    fn singular_pairing_detected() {
        let geom = geometry_pn(2, 1);
        let ring = ChowRing::build(&geom).unwrap();
        let h = ring.generator(0);
        let bad = vec![ring.one(), h.clone(), h.clone()];
        assert!(matches!(
            ring.dual_basis(&bad),
            Err(EngineError::SingularPairing)
        ));
    }

    #[test]
    fn ring_mismatch_detected() {
        let g1 = geometry_pn(2, 1);
        let g2 = geometry_pn(2, 1);
        let r1 = ChowRing::build(&g1).unwrap();
        let r2 = ChowRing::build(&g2).unwrap();
        let a = r1.generator(0);
        let b = r2.generator(0);
        assert!(matches!(r1.multiply(&a, &b), Err(EngineError::RingMismatch)));
    }

    #[test]
    fn nilpotency_of_positive_degree() {
        let geom = geometry_pn(3, 2);
        let ring = ChowRing::build(&geom).unwrap();
        let h = ring.generator(2);
        assert!(ring.pow(&h, 4).unwrap().is_zero());
    }
}

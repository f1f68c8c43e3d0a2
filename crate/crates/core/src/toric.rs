//! Toric input data: fans, divisor classes, curve classes, geometries.
//!
//! A smooth projective toric variety is described by its fan: the primitive
//! ray generators and the maximal cones (as index sets into the rays). Curve
//! classes are stored by their full pairing vector (D_rho . beta)_rho, so the
//! residue formula can consume them directly; divisor classes are integer
//! vectors over the rays, compared modulo the lattice of linear relations
//! (<m, v_rho>)_rho via a fixed projection onto a Picard basis.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{EngineError, Result};

/// A complete simplicial fan with unimodular maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    /// Ambient lattice rank.
    pub dim: usize,
    /// Primitive generators of the one-dimensional cones, in a fixed order.
    pub rays: Vec<Vec<i64>>,
    /// Maximal cones, each a sorted list of ray indices of length `dim`.
    pub max_cones: Vec<Vec<usize>>,
}

/// Summary produced by [`validate_fan`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanReport {
    pub dim: usize,
    pub num_rays: usize,
    pub num_max_cones: usize,
    pub picard_rank: usize,
    pub num_walls: usize,
}

/// An integer divisor `sum_rho a_rho D_rho`, up to linear equivalence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorClass {
    pub coeffs: Vec<i64>,
}

/// An effective curve class, recorded by its pairings (D_rho . beta)_rho.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClass {
    pub pairings: Vec<i64>,
}

impl CurveClass {
    pub fn zero(num_rays: usize) -> Self {
        CurveClass {
            pairings: vec![0; num_rays],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pairings.iter().all(|&p| p == 0)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &CurveClass) -> CurveClass {
        CurveClass {
            pairings: self
                .pairings
                .iter()
                .zip(&other.pairings)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise difference; effectivity of the result is NOT implied.
    pub fn sub(&self, other: &CurveClass) -> CurveClass {
        CurveClass {
            pairings: self
                .pairings
                .iter()
                .zip(&other.pairings)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// User assertions that cannot be verified from fan data alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GeometryFlags {
    /// The divisor class Y is very ample (so |Y| embeds X and cuts out a
    /// smooth hypersurface for a generic member).
    pub very_ample_y: bool,
    /// The pushforward A_1(Y) -> A_1(X) is surjective.
    pub contains_all_curve_classes: bool,
}

/// A validated pair: toric ambient X plus the hypersurface class Y, with an
/// ample class fixing the degree used for series truncation.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub fan: Fan,
    pub y: DivisorClass,
    pub ample: DivisorClass,
    pub flags: GeometryFlags,
    walls: Vec<CurveClass>,
    lattice: RelationLattice,
}

// ---------------------------------------------------------------------------
// integer linear algebra helpers
// ---------------------------------------------------------------------------

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Determinant of a small integer matrix by fraction-free elimination.
fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    i64::try_from(sign * a[n - 1][n - 1]).expect("determinant overflow")
}

/// The lattice of relation vectors {(<m, v_rho>)_rho : m in M}, with a fixed
/// unimodular change of basis U so that membership and the Picard projection
/// are read off the last `picard_rank` coordinates of U * d.
#[derive(Debug, Clone)]
struct RelationLattice {
    u: Vec<Vec<i64>>,
    rank: usize,
}

impl RelationLattice {
    /// Row-reduce the (num_rays x dim) ray matrix over the integers, tracking
    /// the row operations in a unimodular U. Smoothness of the fan forces all
    /// pivots to be 1, which is asserted.
    #[allow(clippy::needless_range_loop)] // parallel row operations on h and u
    fn new(fan: &Fan) -> Result<Self> {
        let n = fan.rays.len();
        let d = fan.dim;
        let mut h: Vec<Vec<i64>> = fan.rays.clone();
        let mut u: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        let mut row = 0;
        for col in 0..d {
            // Euclidean elimination below `row` in this column.
            loop {
                let mut best: Option<usize> = None;
                for i in row..n {
                    if h[i][col] != 0 {
                        best = match best {
                            None => Some(i),
                            Some(b) if h[i][col].abs() < h[b][col].abs() => Some(i),
                            keep => keep,
                        };
                    }
                }
                let Some(p) = best else { break };
                h.swap(row, p);
                u.swap(row, p);
                let pivot = h[row][col];
                let mut done = true;
                for i in row + 1..n {
                    let q = h[i][col].div_euclid(pivot);
                    if q != 0 {
                        for j in 0..d {
                            h[i][j] -= q * h[row][j];
                        }
                        for j in 0..n {
                            u[i][j] -= q * u[row][j];
                        }
                    }
                    if h[i][col] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h[row][col] != 0 {
                if h[row][col] < 0 {
                    for j in 0..d {
                        h[row][j] = -h[row][j];
                    }
                    for j in 0..n {
                        u[row][j] = -u[row][j];
                    }
                }
                if h[row][col] != 1 {
                    return Err(EngineError::InvalidFan(format!(
                        "ray matrix has non-unit elementary divisor {} (Picard group not free)",
                        h[row][col]
                    )));
                }
                row += 1;
            }
        }
        if row != d {
            return Err(EngineError::InvalidFan(
                "rays do not span the ambient lattice".into(),
            ));
        }
        Ok(RelationLattice { u, rank: d })
    }

    /// Coordinates of `d` in a fixed basis of the Picard group.
    fn picard_project(&self, d: &[i64]) -> Vec<i64> {
        self.u[self.rank..]
            .iter()
            .map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// fan validation
// ---------------------------------------------------------------------------

/// Check all fan invariants: primitive rays, unimodular maximal cones, and
/// the wall condition (every facet of a maximal cone is shared by exactly two
/// maximal cones). Reports basic numerology on success.
pub fn validate_fan(fan: &Fan) -> Result<FanReport> {
    if fan.rays.is_empty() {
        return Err(EngineError::InvalidFan("no rays".into()));
    }
    if fan.dim == 0 {
        return Err(EngineError::InvalidFan("dimension must be positive".into()));
    }
    for (i, ray) in fan.rays.iter().enumerate() {
        if ray.len() != fan.dim {
            return Err(EngineError::InvalidFan(format!(
                "ray #{i} has {} coordinates, expected {}",
                ray.len(),
                fan.dim
            )));
        }
        let g = ray.iter().fold(0, |acc, &x| gcd(acc, x));
        if g != 1 {
            return Err(EngineError::NonPrimitiveRay { ray: i });
        }
    }
    {
        let distinct: BTreeSet<&Vec<i64>> = fan.rays.iter().collect();
        if distinct.len() != fan.rays.len() {
            return Err(EngineError::InvalidFan("duplicate rays".into()));
        }
    }
    if fan.max_cones.is_empty() {
        return Err(EngineError::InvalidFan("no maximal cones".into()));
    }
    for (c, cone) in fan.max_cones.iter().enumerate() {
        if cone.len() != fan.dim {
            return Err(EngineError::InvalidFan(format!(
                "maximal cone #{c} has {} rays, expected {}",
                cone.len(),
                fan.dim
            )));
        }
        let mut sorted = cone.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != fan.dim {
            return Err(EngineError::InvalidFan(format!(
                "maximal cone #{c} repeats a ray"
            )));
        }
        if sorted.iter().any(|&r| r >= fan.rays.len()) {
            return Err(EngineError::InvalidFan(format!(
                "maximal cone #{c} references a missing ray"
            )));
        }
        let matrix: Vec<Vec<i64>> = cone.iter().map(|&r| fan.rays[r].clone()).collect();
        let det = det_i64(&matrix);
        if det.abs() != 1 {
            return Err(EngineError::NonSmoothCone { cone: c, det });
        }
    }
    let walls = facet_map(fan);
    for (facet, cones) in &walls {
        if cones.len() != 2 {
            return Err(EngineError::DanglingWall {
                facet: facet.clone(),
                count: cones.len(),
            });
        }
    }
    Ok(FanReport {
        dim: fan.dim,
        num_rays: fan.rays.len(),
        num_max_cones: fan.max_cones.len(),
        picard_rank: fan.rays.len() - fan.dim,
        num_walls: walls.len(),
    })
}

/// Facets (sorted (dim-1)-subsets of maximal cones) -> list of adjacent cones.
fn facet_map(fan: &Fan) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (c, cone) in fan.max_cones.iter().enumerate() {
        let mut sorted = cone.clone();
        sorted.sort_unstable();
        for omit in 0..sorted.len() {
            let mut facet = sorted.clone();
            facet.remove(omit);
            map.entry(facet).or_default().push(c);
        }
    }
    map
}

/// Solve `cols * x = rhs` for a unimodular integer column matrix by exact
/// rational elimination; the result is integral.
#[allow(clippy::manual_is_multiple_of)]
fn solve_unimodular(cols: &[Vec<i64>], rhs: &[i64]) -> Vec<i64> {
    let n = rhs.len();
    // augmented rational matrix, numerator/denominator as i128 pairs is
    // overkill here: entries stay tiny, so use i128 fractions via a common
    // Bareiss-style elimination on an augmented integer matrix.
    let mut a = vec![vec![0i128; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = cols[j][i] as i128;
        }
        a[i][n] = rhs[i] as i128;
    }
    let mut prev = 1i128;
    let mut perm_rows: Vec<usize> = (0..n).collect();
    for k in 0..n {
        if a[k][k] == 0 {
            let i = (k + 1..n)
                .find(|&i| a[i][k] != 0)
                .expect("unimodular system is non-singular");
            a.swap(k, i);
            perm_rows.swap(k, i);
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..=n {
                if j == k {
                    continue;
                }
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    (0..n)
        .map(|i| {
            let x = a[i][n];
            let d = a[i][i];
            assert!(x % d == 0, "unimodular solve produced a non-integer");
            i64::try_from(x / d).expect("solution overflow")
        })
        .collect()
}

/// Primitive wall curve classes: for each shared facet of two maximal cones,
/// the unique relation among the rays of the two cones, normalized so the two
/// rays opposite the wall get coefficient +1.
pub fn wall_curve_classes(fan: &Fan) -> Result<Vec<CurveClass>> {
    validate_fan(fan)?;
    let mut seen = BTreeSet::new();
    let mut walls = Vec::new();
    for (facet, cones) in facet_map(fan) {
        let (c1, c2) = (cones[0], cones[1]);
        let sigma1 = &fan.max_cones[c1];
        let u1 = *sigma1.iter().find(|r| !facet.contains(r)).unwrap();
        let u2 = *fan.max_cones[c2].iter().find(|r| !facet.contains(r)).unwrap();
        // Express v_{u2} in the unimodular basis given by sigma1's rays.
        let cols: Vec<Vec<i64>> = sigma1.iter().map(|&r| fan.rays[r].clone()).collect();
        let coeffs = solve_unimodular(&cols, &fan.rays[u2]);
        let mut pairings = vec![0i64; fan.rays.len()];
        pairings[u2] = 1;
        for (pos, &r) in sigma1.iter().enumerate() {
            pairings[r] = -coeffs[pos];
        }
        // Smoothness of the two adjacent cones forces coefficient 1 on the
        // opposite ray of sigma1 as well.
        assert_eq!(pairings[u1], 1, "wall relation is not in normal form");
        debug_assert!((0..fan.dim).all(|j| {
            fan.rays
                .iter()
                .zip(&pairings)
                .map(|(v, &p)| p * v[j])
                .sum::<i64>()
                == 0
        }));
        if seen.insert(pairings.clone()) {
            walls.push(CurveClass { pairings });
        }
    }
    walls.sort();
    Ok(walls)
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

impl Geometry {
    /// Validate the fan and the positivity constraints tying Y and the ample
    /// class to the wall curve classes.
    pub fn new(
        fan: Fan,
        y: DivisorClass,
        ample: DivisorClass,
        flags: GeometryFlags,
    ) -> Result<Self> {
        validate_fan(&fan)?;
        let n = fan.rays.len();
        if y.coeffs.len() != n || ample.coeffs.len() != n {
            return Err(EngineError::InvalidGeometry(
                "divisor coefficient vectors must be indexed by the rays".into(),
            ));
        }
        let walls = wall_curve_classes(&fan)?;
        for w in &walls {
            if pair(&ample, w) <= 0 {
                return Err(EngineError::InvalidGeometry(format!(
                    "ample class pairs non-positively with wall class {:?}",
                    w.pairings
                )));
            }
            if pair(&y, w) < 0 {
                return Err(EngineError::InvalidGeometry(format!(
                    "Y pairs negatively with wall class {:?} (Y is not nef)",
                    w.pairings
                )));
            }
        }
        if flags.contains_all_curve_classes && fan.dim == 2 && fan.rays.len() != 3 {
            // In dimension two, surjectivity of A_1(Y) -> A_1(X) forces the
            // ambient to be the projective plane.
            return Err(EngineError::InvalidGeometry(
                "a 2-dimensional ambient with all curve classes on Y must be the projective plane"
                    .into(),
            ));
        }
        let lattice = RelationLattice::new(&fan)?;
        Ok(Geometry {
            fan,
            y,
            ample,
            flags,
            walls,
            lattice,
        })
    }

    pub fn dim(&self) -> usize {
        self.fan.dim
    }

    pub fn num_rays(&self) -> usize {
        self.fan.rays.len()
    }

    /// Generators of the cone of effective curve classes.
    pub fn wall_classes(&self) -> &[CurveClass] {
        &self.walls
    }

    /// Linear-equivalence test for divisors.
    pub fn divisors_equal(&self, a: &DivisorClass, b: &DivisorClass) -> bool {
        self.lattice.picard_project(&a.coeffs) == self.lattice.picard_project(&b.coeffs)
    }

    /// Coordinates of a divisor in the fixed Picard basis.
    pub fn picard_coordinates(&self, a: &DivisorClass) -> Vec<i64> {
        self.lattice.picard_project(&a.coeffs)
    }

    /// Degree of a curve class with respect to the chosen ample class.
    pub fn degree(&self, beta: &CurveClass) -> i64 {
        pair(&self.ample, beta)
    }

    /// Pairing Y . beta.
    pub fn y_degree(&self, beta: &CurveClass) -> i64 {
        pair(&self.y, beta)
    }

    /// K_X . beta = -sum_rho (D_rho . beta).
    pub fn kx_degree(&self, beta: &CurveClass) -> i64 {
        -beta.pairings.iter().sum::<i64>()
    }

    /// K_Y . beta = (K_X + Y) . beta, by adjunction.
    pub fn ky_degree(&self, beta: &CurveClass) -> i64 {
        self.kx_degree(beta) + self.y_degree(beta)
    }

    /// Both canonical pairings at once.
    pub fn canonical_pairings(&self, beta: &CurveClass) -> (i64, i64) {
        (self.kx_degree(beta), self.ky_degree(beta))
    }

    /// -K_X strictly positive on all wall classes.
    pub fn is_fano(&self) -> bool {
        self.walls.iter().all(|w| -self.kx_degree(w) > 0)
    }

    /// -K_Y non-negative on all wall classes. Under the assumption that Y
    /// carries all curve classes this certifies that -K_Y is nef.
    pub fn ky_nef(&self) -> bool {
        self.walls.iter().all(|w| -self.ky_degree(w) >= 0)
    }

    /// The standing assumptions of the quantum Lefschetz pipeline.
    pub fn check_semipositive(&self) -> Result<()> {
        if !self.flags.very_ample_y {
            return Err(EngineError::NotSemipositive(
                "Y is not asserted very ample".into(),
            ));
        }
        if !self.flags.contains_all_curve_classes {
            return Err(EngineError::NotSemipositive(
                "Y is not asserted to contain all curve classes".into(),
            ));
        }
        if let Some(w) = self.walls.iter().find(|w| -self.ky_degree(w) < 0) {
            return Err(EngineError::NotSemipositive(format!(
                "-K_Y pairs negatively with wall class {:?}",
                w.pairings
            )));
        }
        Ok(())
    }

    pub fn check_fano(&self) -> Result<()> {
        match self.walls.iter().find(|w| -self.kx_degree(w) <= 0) {
            Some(w) => Err(EngineError::NotFano {
                wall: w.pairings.clone(),
            }),
            None => Ok(()),
        }
    }

    /// Is `beta` a member of the monoid generated by the wall classes?
    /// Decided by enumeration up to its own ample degree.
    pub fn is_effective(&self, beta: &CurveClass) -> bool {
        if beta.is_zero() {
            return true;
        }
        let deg = self.degree(beta);
        if deg <= 0 {
            return false;
        }
        self.enumerate_effective(deg)
            .map(|list| list.contains(beta))
            .unwrap_or(false)
    }

    /// Check that a pairing vector lies in the kernel of the transposed ray
    /// matrix, i.e. actually is a curve class.
    pub fn check_curve_class(&self, beta: &CurveClass) -> Result<()> {
        if beta.pairings.len() != self.num_rays() {
            return Err(EngineError::InvalidInput(format!(
                "curve class has {} pairings, expected {}",
                beta.pairings.len(),
                self.num_rays()
            )));
        }
        for j in 0..self.dim() {
            let s: i64 = self
                .fan
                .rays
                .iter()
                .zip(&beta.pairings)
                .map(|(v, &p)| p * v[j])
                .sum();
            if s != 0 {
                return Err(EngineError::InvalidInput(format!(
                    "pairing vector {:?} is not in the kernel of the ray matrix",
                    beta.pairings
                )));
            }
        }
        Ok(())
    }

    /// All distinct non-zero effective classes of ample degree <= cap, sorted
    /// by (degree, pairing vector). The list for a smaller cap is a prefix of
    /// the list for a larger one.
    pub fn enumerate_effective(&self, cap: i64) -> Result<Vec<CurveClass>> {
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue: VecDeque<CurveClass> = VecDeque::new();
        let zero = CurveClass::zero(self.num_rays());
        queue.push_back(zero);
        let mut found: Vec<CurveClass> = Vec::new();
        while let Some(current) = queue.pop_front() {
            for w in &self.walls {
                let next = current.add(w);
                if self.degree(&next) <= cap && seen.insert(next.pairings.clone()) {
                    found.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        found.sort_by_key(|b| (self.degree(b), b.pairings.clone()));
        if found.is_empty() && cap > 0 {
            let min_wall = self.walls.iter().map(|w| self.degree(w)).min().unwrap_or(0);
            return Err(EngineError::CapTooSmall {
                cap,
                min_wall_degree: min_wall,
            });
        }
        Ok(found)
    }

    /// Effective classes gamma (including zero) such that beta - gamma is
    /// also effective; used for comb-locus degree splittings.
    pub fn effective_splits(&self, beta: &CurveClass) -> Vec<CurveClass> {
        let zero = CurveClass::zero(self.num_rays());
        if beta.is_zero() {
            return vec![zero];
        }
        let deg = self.degree(beta);
        let mut all = vec![zero];
        if deg > 0 {
            if let Ok(list) = self.enumerate_effective(deg) {
                all.extend(list);
            }
        }
        let set: BTreeSet<Vec<i64>> = all.iter().map(|c| c.pairings.clone()).collect();
        all.into_iter()
            .filter(|g| set.contains(&beta.sub(g).pairings))
            .collect()
    }
}

/// Pairing of a divisor with a curve class; invariant under shifting the
/// divisor by any relation vector.
pub fn pair(d: &DivisorClass, beta: &CurveClass) -> i64 {
    d.coeffs
        .iter()
        .zip(&beta.pairings)
        .map(|(a, b)| a * b)
        .sum()
}

// ---------------------------------------------------------------------------
// built-in fans
// ---------------------------------------------------------------------------

/// The fan of projective n-space: rays e_1..e_n and -(e_1+...+e_n), maximal
/// cones all n-subsets.
pub fn projective_space(n: usize) -> Fan {
    assert!(n >= 1, "projective space needs n >= 1");
    let mut rays = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut v = vec![0i64; n];
        v[i] = 1;
        rays.push(v);
    }
    rays.push(vec![-1i64; n]);
    let max_cones = (0..=n)
        .map(|omit| (0..=n).filter(|&r| r != omit).collect())
        .collect();
    Fan {
        dim: n,
        rays,
        max_cones,
    }
}

/// Product of projective spaces P^a x P^b as a product fan.
pub fn product_of_projective_spaces(a: usize, b: usize) -> Fan {
    let fa = projective_space(a);
    let fb = projective_space(b);
    let dim = a + b;
    let mut rays = Vec::new();
    for r in &fa.rays {
        let mut v = r.clone();
        v.extend(std::iter::repeat_n(0, b));
        rays.push(v);
    }
    for r in &fb.rays {
        let mut v = vec![0i64; a];
        v.extend(r.iter().copied());
        rays.push(v);
    }
    let mut max_cones = Vec::new();
    for ca in &fa.max_cones {
        for cb in &fb.max_cones {
            let mut cone = ca.clone();
            cone.extend(cb.iter().map(|&r| r + fa.rays.len()));
            max_cones.push(cone);
        }
    }
    Fan {
        dim,
        rays,
        max_cones,
    }
}

/// The Hirzebruch surface F_a: rays (1,0), (0,1), (-1,a), (0,-1).
pub fn hirzebruch(a: i64) -> Fan {
    assert!(a >= 0);
    Fan {
        dim: 2,
        rays: vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    }
}

/// Hyperplane-multiple divisor c*H on projective n-space, as ray coefficients.
pub fn pn_divisor(n: usize, c: i64) -> DivisorClass {
    let mut coeffs = vec![0i64; n + 1];
    coeffs[0] = c;
    DivisorClass { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_fan_is_valid() {
        let fan = projective_space(2);
        let report = validate_fan(&fan).unwrap();
        assert_eq!(report.dim, 2);
        assert_eq!(report.num_rays, 3);
        assert_eq!(report.picard_rank, 1);
    }

    #[test]
    fn p1xp1_fan_is_valid() {
        let fan = product_of_projective_spaces(1, 1);
        let report = validate_fan(&fan).unwrap();
        assert_eq!(report.picard_rank, 2);
        assert_eq!(report.num_max_cones, 4);
    }

    #[test]
    fn non_smooth_cone_is_rejected() {
        let fan = Fan {
            dim: 2,
            rays: vec![vec![1, 0], vec![1, 2], vec![-1, -1]],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        };
        match validate_fan(&fan) {
            Err(EngineError::NonSmoothCone { det, .. }) => assert_eq!(det.abs(), 2),
            other => panic!("expected NonSmoothCone, got {other:?}"),
        }
    }

    #[test]
    fn dangling_wall_is_rejected() {
        let fan = Fan {
            dim: 2,
            rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            max_cones: vec![vec![0, 1], vec![1, 2]],
        };
        assert!(matches!(
            validate_fan(&fan),
            Err(EngineError::DanglingWall { .. })
        ));
    }

    #[test]
    fn non_primitive_ray_is_rejected() {
        let fan = Fan {
            dim: 2,
            rays: vec![vec![2, 0], vec![0, 1], vec![-2, -1]],
            max_cones: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        };
        assert!(matches!(
            validate_fan(&fan),
            Err(EngineError::NonPrimitiveRay { ray: 0 })
        ));
    }

    #[test]
    fn p2_wall_class() {
        let walls = wall_curve_classes(&projective_space(2)).unwrap();
        assert_eq!(walls, vec![CurveClass { pairings: vec![1, 1, 1] }]);
    }

    #[test]
    fn p3_wall_class() {
        let walls = wall_curve_classes(&projective_space(3)).unwrap();
        assert_eq!(walls, vec![CurveClass { pairings: vec![1, 1, 1, 1] }]);
    }

    #[test]
    fn p1xp1_wall_classes() {
        let walls = wall_curve_classes(&product_of_projective_spaces(1, 1)).unwrap();
        assert_eq!(
            walls,
            vec![
                CurveClass { pairings: vec![0, 0, 1, 1] },
                CurveClass { pairings: vec![1, 1, 0, 0] },
            ]
        );
    }

    #[test]
    fn hirzebruch_wall_classes_satisfy_relations() {
        for a in 0..4 {
            let fan = hirzebruch(a);
            let walls = wall_curve_classes(&fan).unwrap();
            // F_0 has two invariant curve classes; F_a (a >= 1) has three,
            // since the two sections are no longer equivalent.
            assert_eq!(walls.len(), if a == 0 { 2 } else { 3 });
            for w in &walls {
                for j in 0..fan.dim {
                    let s: i64 = fan
                        .rays
                        .iter()
                        .zip(&w.pairings)
                        .map(|(v, &p)| p * v[j])
                        .sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }

    fn p2_geometry() -> Geometry {
        let fan = projective_space(2);
        Geometry::new(
            fan,
            pn_divisor(2, 1),
            pn_divisor(2, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap()
    }

    #[test]
    fn p2_enumeration_by_degree() {
        let geom = p2_geometry();
        let classes = geom.enumerate_effective(3).unwrap();
        assert_eq!(classes.len(), 3);
        assert_eq!(
            classes.iter().map(|b| geom.degree(b)).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn p1xp1_enumeration_matches_lattice_points() {
        let fan = product_of_projective_spaces(1, 1);
        let geom = Geometry::new(
            fan,
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            GeometryFlags::default(),
        )
        .unwrap();
        let classes = geom.enumerate_effective(2).unwrap();
        // Oracle: lattice points (a, b) >= 0, (a, b) != 0, a + b <= 2.
        let mut expected = Vec::new();
        for a in 0..=2i64 {
            for b in 0..=2i64 {
                if a + b >= 1 && a + b <= 2 {
                    expected.push(vec![a, a, b, b]);
                }
            }
        }
        expected.sort_by_key(|p| (p[0] + p[2], p.clone()));
        assert_eq!(
            classes.iter().map(|c| c.pairings.clone()).collect::<Vec<_>>(),
            expected
        );
    }

    #[test]
    fn cap_zero_gives_empty_list() {
        let geom = p2_geometry();
        assert_eq!(geom.enumerate_effective(0).unwrap(), vec![]);
    }

    #[test]
    fn cap_below_minimal_wall_degree_is_flagged() {
        let geom = Geometry::new(
            projective_space(2),
            pn_divisor(2, 1),
            pn_divisor(2, 2),
            GeometryFlags::default(),
        )
        .unwrap();
        assert!(matches!(
            geom.enumerate_effective(1),
            Err(EngineError::CapTooSmall {
                cap: 1,
                min_wall_degree: 2
            })
        ));
    }

    #[test]
    fn anticanonical_positive_on_enumerated_classes() {
        for (n, y) in [(2usize, 1i64), (3, 3), (4, 5)] {
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
            for beta in geom.enumerate_effective(4).unwrap() {
                assert!(-geom.kx_degree(&beta) > 0);
            }
        }
    }

    #[test]
    fn larger_builtin_fans_validate() {
        for n in 4..=6 {
            assert!(validate_fan(&projective_space(n)).is_ok());
        }
        assert!(validate_fan(&product_of_projective_spaces(2, 3)).is_ok());
        assert!(validate_fan(&hirzebruch(5)).is_ok());
    }

    #[test]
    fn prefix_property_of_enumeration() {
        let fan = product_of_projective_spaces(2, 1);
        let geom = Geometry::new(
            fan,
            DivisorClass { coeffs: vec![1, 0, 0, 1, 0] },
            DivisorClass { coeffs: vec![1, 0, 0, 1, 0] },
            GeometryFlags::default(),
        )
        .unwrap();
        let small = geom.enumerate_effective(2).unwrap();
        let large = geom.enumerate_effective(4).unwrap();
        assert_eq!(&large[..small.len()], &small[..]);
    }

    #[test]
    fn quintic_canonical_pairings() {
        let fan = projective_space(4);
        let geom = Geometry::new(
            fan,
            pn_divisor(4, 5),
            pn_divisor(4, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap();
        for d in 1..=3 {
            let beta = CurveClass { pairings: vec![d; 5] };
            let (kx, ky) = geom.canonical_pairings(&beta);
            assert_eq!(kx, -5 * d);
            assert_eq!(ky, 0);
        }
    }

    #[test]
    fn p3_cubic_is_fano_hypersurface() {
        let geom = Geometry::new(
            projective_space(3),
            pn_divisor(3, 3),
            pn_divisor(3, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap();
        let line = CurveClass { pairings: vec![1; 4] };
        assert_eq!(geom.canonical_pairings(&line), (-4, -1));
        assert!(geom.is_fano());
        assert!(geom.ky_nef());
    }

    #[test]
    fn p2_line_adjunction() {
        let geom = p2_geometry();
        let line = CurveClass { pairings: vec![1, 1, 1] };
        assert_eq!(geom.ky_degree(&line), -2);
    }

    #[test]
    fn divisor_equivalence_mod_relations() {
        let geom = p2_geometry();
        // On P^2 all three toric divisors are linearly equivalent.
        let d0 = DivisorClass { coeffs: vec![1, 0, 0] };
        let d1 = DivisorClass { coeffs: vec![0, 1, 0] };
        let d2 = DivisorClass { coeffs: vec![0, 0, 1] };
        assert!(geom.divisors_equal(&d0, &d1));
        assert!(geom.divisors_equal(&d1, &d2));
        let twice = DivisorClass { coeffs: vec![2, 0, 0] };
        assert!(!geom.divisors_equal(&d0, &twice));
    }

    #[test]
    fn dim_two_non_p2_rejected_with_flags() {
        let fan = product_of_projective_spaces(1, 1);
        let err = Geometry::new(
            fan,
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            DivisorClass { coeffs: vec![1, 0, 1, 0] },
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        );
        assert!(matches!(err, Err(EngineError::InvalidGeometry(_))));
    }

    #[test]
    fn wall_relations_vanish_exactly() {
        for fan in [
            projective_space(4),
            product_of_projective_spaces(2, 2),
            hirzebruch(2),
        ] {
            let walls = wall_curve_classes(&fan).unwrap();
            for w in &walls {
                for j in 0..fan.dim {
                    let s: i64 = fan
                        .rays
                        .iter()
                        .zip(&w.pairings)
                        .map(|(v, &p)| p * v[j])
                        .sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }
}

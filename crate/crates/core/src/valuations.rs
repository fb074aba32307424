//! Exponential sums and integrals over polytopes, restricted to a line
//! `t * y0` in `W` and expanded as truncated series in `t`.
//!
//! `S(P)(t y0) = sum_{x in P ∩ M} e^{-t <y0, x>}` is computed by direct
//! enumeration, `I(F)(t y0)` by exact integration over a lattice
//! triangulation of `F`. Brion's vertex decomposition is available as an
//! independent cross-check of the sum side.

use std::collections::BTreeSet;

use num::{BigInt, One, Signed, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complement::ComplementMap;
use crate::error::{Error, Result};
use crate::exact::{
    fmt_vec, pair_mixed, parallelepiped_points, rat, span_lattice, IntVec, Matrix, Rational,
};
use crate::geometry::{subsets, triangulate_points, Cone, Face, Polytope};
use crate::interpolator::{mu_table, MuTable};
use crate::series::{exp_coeffs, restrict_to_direction, todd_univariate, LaurentSeries};

const PRIMES: [i64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
const MAX_ATTEMPTS: u32 = 64;

/// A direction `y0` in `W` certified to pair nonzero with a list of vectors
/// of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub y0: Vec<Rational>,
    pub seed: Option<u64>,
    pub attempts: u32,
    /// Checked vectors with their (nonzero) pairings.
    pub certificate: Vec<(IntVec, Rational)>,
}

impl Direction {
    /// Uses `y0` as given, failing if it pairs to zero with any vector in
    /// `avoid`.
    pub fn fixed(y0: Vec<Rational>, avoid: &[IntVec]) -> Result<Self> {
        let certificate = certify(&y0, avoid)?;
        Ok(Self {
            y0,
            seed: None,
            attempts: 1,
            certificate,
        })
    }

    /// Draws `y0` with distinct small prime entries and random signs from a
    /// seeded generator, resampling while it is degenerate on `avoid`.
    pub fn sample(dim: usize, seed: u64, avoid: &[IntVec]) -> Result<Self> {
        if dim > PRIMES.len() {
            return Err(Error::DimensionTooLarge {
                dim,
                max: PRIMES.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for attempt in 1..=MAX_ATTEMPTS {
            let mut pool: Vec<i64> = PRIMES.to_vec();
            let y0: Vec<Rational> = (0..dim)
                .map(|_| {
                    let p = pool.swap_remove(rng.random_range(0..pool.len()));
                    if rng.random_bool(0.5) {
                        rat(p)
                    } else {
                        rat(-p)
                    }
                })
                .collect();
            if let Ok(certificate) = certify(&y0, avoid) {
                return Ok(Self {
                    y0,
                    seed: Some(seed),
                    attempts: attempt,
                    certificate,
                });
            }
        }
        Err(Error::DirectionDegenerate(format!(
            "no generic direction after {MAX_ATTEMPTS} attempts with seed {seed}"
        )))
    }

    pub fn pair(&self, x: &[i64]) -> Rational {
        pair_mixed(x, &self.y0)
    }
}

fn certify(y0: &[Rational], avoid: &[IntVec]) -> Result<Vec<(IntVec, Rational)>> {
    avoid
        .iter()
        .map(|v| {
            let c = pair_mixed(v, y0);
            if c.is_zero() {
                Err(Error::DirectionDegenerate(format!(
                    "direction pairs to zero with {}",
                    fmt_vec(v)
                )))
            } else {
                Ok((v.clone(), c))
            }
        })
        .collect()
}

/// Edge directions of a polytope: the vectors a direction must avoid.
pub fn edge_directions(p: &Polytope) -> Vec<IntVec> {
    let mut out = BTreeSet::new();
    for f in p.faces().iter().filter(|f| f.dim == 1) {
        let a = &p.vertices()[f.vertices[0]];
        let b = &p.vertices()[f.vertices[1]];
        out.insert(b.iter().zip(a).map(|(x, y)| x - y).collect::<IntVec>());
    }
    out.into_iter().collect()
}

/// Taylor coefficients of `sum_x e^{-c_x t}` through `t^order`.
fn exp_sum(values: &[Rational], order: i64) -> LaurentSeries {
    let len = (order + 1).max(0) as usize;
    let mut coeffs = vec![Rational::zero(); len];
    for c in values {
        for (acc, e) in coeffs
            .iter_mut()
            .zip(exp_coeffs(&-c, len.saturating_sub(1)))
        {
            *acc += e;
        }
    }
    LaurentSeries::from_power_series(coeffs, order)
}

/// `S(P)(t y0)` through `t^order`, by enumerating lattice points.
pub fn s_series(p: &Polytope, dir: &Direction, order: i64) -> Result<LaurentSeries> {
    let values: Vec<Rational> = p.lattice_points()?.iter().map(|x| dir.pair(x)).collect();
    Ok(exp_sum(&values, order))
}

/// Complete homogeneous symmetric polynomials `h_0, ..., h_order` of `c`.
fn complete_homogeneous(c: &[Rational], order: usize) -> Vec<Rational> {
    let mut h = vec![Rational::zero(); order + 1];
    h[0] = Rational::one();
    for ci in c {
        // multiply by 1 / (1 - ci z)
        for r in 1..=order {
            let prev = h[r - 1].clone();
            h[r] += ci * prev;
        }
    }
    h
}

/// `I(F)(t y0)` through `t^order`, integrating over a lattice triangulation
/// of `F` with the normalized measure of its affine lattice.
pub fn i_face_series(
    p: &Polytope,
    face: &Face,
    dir: &Direction,
    order: i64,
) -> Result<LaurentSeries> {
    let pts = p.face_vertices(face);
    let n = p.ambient();
    let len = (order + 1).max(0) as usize;
    if pts.len() == 1 {
        return Ok(exp_sum(&[dir.pair(&pts[0])], order));
    }
    let base = pts[0].clone();
    let diffs: Vec<IntVec> = pts
        .iter()
        .map(|v| v.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    let lat = span_lattice(&diffs, n)?;
    let m = lat.rank();
    let local = lat.coords.clone();
    let mut coeffs = vec![Rational::zero(); len];
    let fact = |k: usize| -> Rational {
        Rational::from_integer((1..=k as u64).map(BigInt::from).product())
    };
    for simplex in triangulate_points(&local, m)? {
        let edges: Vec<IntVec> = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| a - b).collect())
            .collect();
        let vol = Matrix::from_int_rows(&edges, m).det().abs() / fact(m);
        // vertex values of the affine function <y0, x>
        let c: Vec<Rational> = simplex
            .iter()
            .map(|loc| {
                let idx = local
                    .iter()
                    .position(|l| l == loc)
                    .expect("triangulation vertex");
                dir.pair(&pts[idx])
            })
            .collect();
        let h = complete_homogeneous(&c, len.saturating_sub(1));
        for (r, acc) in coeffs.iter_mut().enumerate() {
            // (-1)^r / r! * vol * m! r! / (m + r)! * h_r
            let mut term = &vol * fact(m) / fact(m + r) * &h[r];
            if r % 2 == 1 {
                term = -term;
            }
            *acc += term;
        }
    }
    Ok(LaurentSeries::from_power_series(coeffs, order))
}

/// Per-face contribution to the local counting formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTerm {
    pub face_vertices: Vec<usize>,
    pub mu0: Rational,
    pub volume: Rational,
}

/// `sum_F mu_0(C(P, F)) vol(F)` with its breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCount {
    pub count: Rational,
    pub terms: Vec<CountTerm>,
}

/// Lattice point count from a precomputed table.
pub fn count_from_table(p: &Polytope, table: &MuTable) -> Result<LocalCount> {
    let mut count = Rational::zero();
    let mut terms = Vec::with_capacity(table.entries.len());
    for (face, entry) in p.faces().iter().zip(&table.entries) {
        let volume = p.normalized_volume(face)?;
        let mu0 = entry.mu.mu0();
        count += &mu0 * &volume;
        terms.push(CountTerm {
            face_vertices: face.vertices.clone(),
            mu0,
            volume,
        });
    }
    if !count.is_integer() {
        return Err(Error::NonIntegerResult(count.to_string()));
    }
    Ok(LocalCount { count, terms })
}

/// Lattice point count by the local formula. Only constant terms of `mu`
/// are needed, so the table is computed at order 0.
pub fn count_via_local_formula(p: &Polytope, map: &ComplementMap) -> Result<LocalCount> {
    let table = mu_table(p, map, 0, false)?;
    count_from_table(p, &table)
}

/// Outcome of comparing both sides of `S(P) = sum_F mu(C(P, F)) I(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub polytope_id: String,
    pub map_id: String,
    pub direction: Direction,
    pub degree: u32,
    /// Order through which the sides were compared.
    pub order: i64,
    /// Highest order at which the comparison is exact given `degree`.
    pub max_comparable_order: i64,
    pub left: LaurentSeries,
    pub right: LaurentSeries,
    pub residual: LaurentSeries,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.residual.is_zero()
    }

    /// Exponents at which the residual is nonzero.
    pub fn failing_orders(&self) -> Vec<i64> {
        (self.residual.valuation()..=self.residual.order())
            .filter(|&k| !self.residual.coeff(k).is_zero())
            .collect()
    }
}

/// Default comparison order `d - dim P`, floored at 0.
pub fn default_order(p: &Polytope, degree: u32) -> i64 {
    (degree as i64 - p.dim() as i64).max(0)
}

/// Verifies the identity with `mu` computed from `map` at total degree
/// `degree`, comparing through `order` (capped at `degree`, the highest
/// order at which the truncated `mu` is exact).
pub fn verify_interpolator(
    p: &Polytope,
    map: &ComplementMap,
    dir: &Direction,
    degree: u32,
    order: Option<i64>,
    polytope_id: &str,
) -> Result<IdentityReport> {
    let table = mu_table(p, map, degree, false)?;
    verify_with_table(p, &table, dir, order, polytope_id)
}

/// Verifies the identity against a supplied table.
pub fn verify_with_table(
    p: &Polytope,
    table: &MuTable,
    dir: &Direction,
    order: Option<i64>,
    polytope_id: &str,
) -> Result<IdentityReport> {
    if table.entries.len() != p.faces().len() {
        return Err(Error::DimensionMismatch(format!(
            "table has {} entries for {} faces",
            table.entries.len(),
            p.faces().len()
        )));
    }
    let degree = table.order;
    let max_order = degree as i64;
    let q = order
        .unwrap_or_else(|| default_order(p, degree))
        .min(max_order);
    let left = s_series(p, dir, q)?;
    let mut right = LaurentSeries::zero(q);
    for (face, entry) in p.faces().iter().zip(&table.entries) {
        let mu = restrict_to_direction(&entry.mu.series, &dir.y0).truncate(q);
        let i = i_face_series(p, face, dir, q)?;
        right = right.add(&mu.mul(&i));
    }
    let residual = left.sub(&right);
    Ok(IdentityReport {
        polytope_id: polytope_id.to_string(),
        map_id: table.map_id.clone(),
        direction: dir.clone(),
        degree,
        order: q,
        max_comparable_order: max_order,
        left,
        right,
        residual,
    })
}

/// `S(apex + Cone(gens))(t y0)` for a basic cone, as a Laurent series
/// through `t^order`.
fn basic_cone_s(
    apex: &[i64],
    gens: &[IntVec],
    dir: &Direction,
    order: i64,
) -> Result<LaurentSeries> {
    let k = gens.len() as i64;
    let work = order + k + 1;
    let mut acc =
        LaurentSeries::from_power_series(exp_coeffs(&-dir.pair(apex), work as usize), work);
    let td = todd_univariate(work as usize + 1);
    for g in gens {
        let c = dir.pair(g);
        if c.is_zero() {
            return Err(Error::DirectionDegenerate(format!(
                "direction pairs to zero with ray {}",
                fmt_vec(g)
            )));
        }
        // 1 / (1 - e^{-c t}) = td(c t) / (c t)
        let mut pow = c.recip();
        let mut coeffs = Vec::with_capacity(work as usize + 2);
        for t in &td[..=(work as usize + 1)] {
            coeffs.push(t * &pow);
            pow *= &c;
        }
        acc = acc.mul(&LaurentSeries::new(-1, coeffs, work));
    }
    Ok(acc.truncate(order))
}

/// `S` of a shifted simplicial cone, through recursive stellar
/// subdivision at a parallelepiped point: with `p = sum_{j in J} l_j g_j`,
/// `[Cone(G)] = sum (-1)^{k - |A| - 1} [Cone(A ∪ {p})]` over `A ⊆ G` with
/// `A ∪ J = G` and `J ⊄ A`.
fn simplicial_cone_s(
    apex: &[i64],
    gens: &[IntVec],
    ambient: usize,
    dir: &Direction,
    order: i64,
) -> Result<LaurentSeries> {
    let pts = parallelepiped_points(gens, ambient)?;
    let Some((p, lambda)) = pts.into_iter().min_by(|a, b| {
        let sa: Rational = a.1.iter().sum();
        let sb: Rational = b.1.iter().sum();
        sa.cmp(&sb).then_with(|| a.0.cmp(&b.0))
    }) else {
        return basic_cone_s(apex, gens, dir, order);
    };
    let k = gens.len();
    let j: Vec<usize> = (0..k).filter(|&i| !lambda[i].is_zero()).collect();
    let mut total = LaurentSeries::zero(order);
    for a in subsets(k) {
        let covers = (0..k).all(|i| a.contains(&i) || j.contains(&i));
        let misses_j = j.iter().any(|i| !a.contains(i));
        if !covers || !misses_j {
            continue;
        }
        let mut child: Vec<IntVec> = a.iter().map(|&i| gens[i].clone()).collect();
        child.push(p.clone());
        let s = simplicial_cone_s(apex, &child, ambient, dir, order)?;
        if (k - a.len() - 1).is_multiple_of(2) {
            total = total.add(&s);
        } else {
            total = total.sub(&s);
        }
    }
    Ok(total)
}

/// `S(P_v)` for the supporting cone at a vertex, by inclusion-exclusion
/// over the interior faces of a triangulation of the tangent cone.
pub fn supporting_cone_s(
    p: &Polytope,
    vertex: usize,
    dir: &Direction,
    order: i64,
) -> Result<LaurentSeries> {
    let n = p.ambient();
    let (apex, gens) = p.supporting_cone(vertex);
    let tangent = Cone::new(gens, n)?;
    let normals: Vec<IntVec> = p
        .facets()
        .iter()
        .filter(|f| f.vertices.contains(&vertex))
        .map(|f| f.normal.clone())
        .collect();
    let mut faces: BTreeSet<Vec<IntVec>> = BTreeSet::new();
    for simplex in tangent.triangulate()? {
        for s in subsets(simplex.num_rays()) {
            let mut g: Vec<IntVec> = s.iter().map(|&i| simplex.generators()[i].clone()).collect();
            g.sort();
            faces.insert(g);
        }
    }
    let mut total = LaurentSeries::zero(order);
    for g in faces {
        let on_boundary = normals
            .iter()
            .any(|a| g.iter().all(|x| crate::exact::pair_int(a, x) == 0));
        if on_boundary {
            continue;
        }
        let s = simplicial_cone_s(&apex, &g, n, dir, order)?;
        if (n - g.len()).is_multiple_of(2) {
            total = total.add(&s);
        } else {
            total = total.sub(&s);
        }
    }
    Ok(total)
}

/// Checks `sum_v S(P_v) = S(P)` through `t^order` along `dir`.
pub fn brion_vertex_decomposition_check(p: &Polytope, dir: &Direction, order: i64) -> Result<bool> {
    if p.ambient() == 0 {
        return Ok(true);
    }
    let mut total = LaurentSeries::zero(order);
    for v in 0..p.vertices().len() {
        total = total.add(&supporting_cone_s(p, v, dir, order)?);
    }
    Ok(total.sub(&s_series(p, dir, order)?).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn seg(m: i64) -> Polytope {
        Polytope::new(vec![vec![0], vec![m]]).unwrap()
    }

    #[test]
    fn direction_sampling_is_deterministic() {
        let avoid = vec![vec![1, 1], vec![1, -1]];
        let a = Direction::sample(2, 7, &avoid).unwrap();
        let b = Direction::sample(2, 7, &avoid).unwrap();
        assert_eq!(a, b);
        assert!(a.certificate.iter().all(|(_, c)| !c.is_zero()));
        assert!(Direction::fixed(vec![rat(1), rat(1)], &[vec![1, -1]]).is_err());
    }

    #[test]
    fn s_series_examples() {
        let point = Polytope::new(vec![vec![]]).unwrap();
        let dir0 = Direction::fixed(vec![], &[]).unwrap();
        assert_eq!(
            s_series(&point, &dir0, 3).unwrap(),
            LaurentSeries::constant(rat(1), 3)
        );
        let dir = Direction::fixed(vec![rat(1)], &[]).unwrap();
        let s = s_series(&seg(2), &dir, 2).unwrap();
        assert_eq!(s.coeff(0), rat(3));
        assert_eq!(s.coeff(1), rat(-3));
        assert_eq!(s.coeff(2), ratio(5, 2));
    }

    #[test]
    fn i_series_examples() {
        let dir = Direction::fixed(vec![rat(1)], &[]).unwrap();
        let p = seg(1);
        let full = &p.faces()[2];
        let i = i_face_series(&p, full, &dir, 3).unwrap();
        assert_eq!(i.coeff(0), rat(1));
        assert_eq!(i.coeff(1), ratio(-1, 2));
        assert_eq!(i.coeff(2), ratio(1, 6));
        assert_eq!(i.coeff(3), ratio(-1, 24));
        let v0 = &p.faces()[0];
        assert_eq!(
            i_face_series(&p, v0, &dir, 3).unwrap(),
            LaurentSeries::constant(rat(1), 3)
        );
    }

    #[test]
    fn box_integral_factorizes() {
        let b = Polytope::new(vec![vec![0, 0], vec![2, 0], vec![0, 3], vec![2, 3]]).unwrap();
        let dir = Direction::fixed(vec![rat(3), rat(-5)], &[]).unwrap();
        let whole = i_face_series(&b, b.faces().last().unwrap(), &dir, 5).unwrap();
        // (1 - e^{-a L}) / a for each side, a = y0 coordinate, L = length
        let side = |a: i64, l: i64| {
            let e = exp_coeffs(&rat(-a * l), 7);
            let coeffs: Vec<Rational> = (0..=5).map(|r| -&e[r + 1] / rat(a)).collect();
            LaurentSeries::from_power_series(coeffs, 5)
        };
        assert_eq!(whole, side(3, 2).mul(&side(-5, 3)));
    }

    #[test]
    fn local_count_of_segments() {
        let map = ComplementMap::standard_inner_product(1);
        for m in 1..=10 {
            let c = count_via_local_formula(&seg(m), &map).unwrap();
            assert_eq!(c.count, rat(m + 1));
        }
    }

    #[test]
    fn identity_on_small_cases() {
        let map = ComplementMap::standard_inner_product(2);
        let tri = Polytope::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let dir = Direction::fixed(vec![rat(2), rat(3)], &edge_directions(&tri)).unwrap();
        let r = verify_interpolator(&tri, &map, &dir, 6, Some(6), "triangle").unwrap();
        assert!(r.pass(), "{:?}", r.failing_orders());
        assert_eq!(r.order, 6);
    }

    #[test]
    fn brion_examples() {
        let dir = Direction::fixed(vec![rat(1)], &[]).unwrap();
        assert!(brion_vertex_decomposition_check(&seg(1), &dir, 5).unwrap());
        let tri = Polytope::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let dir = Direction::fixed(vec![rat(2), rat(3)], &edge_directions(&tri)).unwrap();
        assert!(brion_vertex_decomposition_check(&tri, &dir, 4).unwrap());
        let sq = Polytope::new(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(brion_vertex_decomposition_check(&sq, &dir, 4).unwrap());
        // non-unimodular vertex cones
        let thin = Polytope::new(vec![vec![0, 0], vec![3, 1], vec![1, 2]]).unwrap();
        let dir = Direction::sample(2, 1, &edge_directions(&thin)).unwrap();
        assert!(brion_vertex_decomposition_check(&thin, &dir, 3).unwrap());
    }
}

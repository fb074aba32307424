//! Complement maps: for each cone `L` in `W`, a subspace `Psi(L)` of `V`
//! complementary to `L^perp` and monotone under inclusion.
//!
//! Three families are supported: an inner product on `W`, a complete flag
//! in `V`, and a table assigning a vector `u_r` to each ray `r`, with
//! `Psi` of a face being the span of its rays' vectors.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_vec, int_vec_to_rat, pair_mixed, rank_of, IntVec, Matrix, Rational};
use crate::geometry::{subdivide_to_basic, subsets, Cone};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplementMap {
    /// `Psi(L) = G * span(L)` for a symmetric positive definite Gram matrix
    /// `G` on `W`.
    InnerProduct { gram: Matrix },
    /// `Psi(L) = span(basis[..dim L])`.
    Flag { basis: Vec<Vec<Rational>> },
    /// `Psi(Cone(S)) = span{u_r : r in S}`.
    RayTable {
        entries: BTreeMap<IntVec, Vec<Rational>>,
    },
}

/// A basis of `Psi(S)` for a set of rays `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiSubspace {
    pub basis: Vec<Vec<Rational>>,
}

impl ComplementMap {
    pub fn standard_inner_product(n: usize) -> Self {
        ComplementMap::InnerProduct {
            gram: Matrix::identity(n),
        }
    }

    pub fn inner_product(gram: Matrix) -> Result<Self> {
        let n = gram.rows();
        if gram.cols() != n {
            return Err(Error::InvalidMap("Gram matrix is not square".into()));
        }
        if gram.transpose() != gram {
            return Err(Error::InvalidMap("Gram matrix is not symmetric".into()));
        }
        // Sylvester's criterion.
        for k in 1..=n {
            let minor = Matrix::from_rows(
                (0..k)
                    .map(|r| (0..k).map(|c| gram.get(r, c).clone()).collect())
                    .collect(),
                k,
            );
            if minor.det() <= Rational::zero() {
                return Err(Error::InvalidMap(
                    "Gram matrix is not positive definite".into(),
                ));
            }
        }
        Ok(ComplementMap::InnerProduct { gram })
    }

    pub fn flag(basis: Vec<Vec<Rational>>) -> Result<Self> {
        let n = basis.len();
        if basis.iter().any(|b| b.len() != n) {
            return Err(Error::InvalidMap(
                "flag basis must be n vectors in Q^n".into(),
            ));
        }
        if rank_of(&basis, n) != n {
            return Err(Error::InvalidMap("flag basis is linearly dependent".into()));
        }
        Ok(ComplementMap::Flag { basis })
    }

    pub fn ray_table(entries: Vec<(IntVec, Vec<Rational>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let n = entries.first().map(|e| e.0.len()).unwrap_or(0);
        for (ray, u) in entries {
            if ray.len() != n || u.len() != n {
                return Err(Error::InvalidMap(
                    "ray table entries of mixed dimension".into(),
                ));
            }
            let r = crate::exact::primitive(&ray)?;
            if r != ray {
                return Err(Error::InvalidMap(format!(
                    "ray {} is not primitive",
                    fmt_vec(&ray)
                )));
            }
            if pair_mixed(&r, &u).is_zero() {
                return Err(Error::InvalidMap(format!(
                    "u vector pairs to zero with ray {}",
                    fmt_vec(&r)
                )));
            }
            if map.insert(r, u).is_some() {
                return Err(Error::InvalidMap(format!(
                    "ray {} listed twice",
                    fmt_vec(&ray)
                )));
            }
        }
        Ok(ComplementMap::RayTable { entries: map })
    }

    /// The Diaconis-Fulton map on the fan of projective space `P^n`.
    ///
    /// Rays are `w_i = e_i` for `1 <= i <= n` and `w_0 = -(e_1 + ... + e_n)`;
    /// with `v_i` the dual basis, `u_i = v_i - v_{i+1}` for `i < n`,
    /// `u_n = v_n` and `u_0 = -v_1`.
    pub fn diaconis_fulton(n: usize) -> Self {
        let e = |i: usize| -> Vec<Rational> {
            (0..n)
                .map(|j| {
                    if j + 1 == i {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        };
        let sub = |a: Vec<Rational>, b: Vec<Rational>| -> Vec<Rational> {
            a.into_iter().zip(b).map(|(x, y)| x - y).collect()
        };
        let mut entries = BTreeMap::new();
        for (i, ray) in pn_rays(n).into_iter().enumerate() {
            let u = if i == 0 {
                sub(vec![Rational::zero(); n], e(1))
            } else if i < n {
                sub(e(i), e(i + 1))
            } else {
                e(n)
            };
            entries.insert(ray, u);
        }
        ComplementMap::RayTable { entries }
    }

    pub fn ambient(&self) -> usize {
        match self {
            ComplementMap::InnerProduct { gram } => gram.rows(),
            ComplementMap::Flag { basis } => basis.len(),
            ComplementMap::RayTable { entries } => entries.keys().next().map(Vec::len).unwrap_or(0),
        }
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            ComplementMap::InnerProduct { gram } => {
                if *gram == Matrix::identity(gram.rows()) {
                    "inner_product(standard)".into()
                } else {
                    "inner_product".into()
                }
            }
            ComplementMap::Flag { .. } => "flag".into(),
            ComplementMap::RayTable { .. } => "ray_table".into(),
        }
    }

    /// Whether `Psi` of a face is spanned by vectors attached to its rays,
    /// so the ideal is generated by ray-level relations.
    pub fn is_ray_generated(&self) -> bool {
        !matches!(self, ComplementMap::Flag { .. })
    }

    /// Spanning vectors for `Psi(S)` before the complementarity test.
    fn raw_basis(&self, rays: &[IntVec]) -> Result<Vec<Vec<Rational>>> {
        match self {
            ComplementMap::InnerProduct { gram } => Ok(rays
                .iter()
                .map(|w| gram.mul_vec(&int_vec_to_rat(w)))
                .collect()),
            ComplementMap::Flag { basis } => Ok(basis[..rays.len()].to_vec()),
            ComplementMap::RayTable { entries } => rays
                .iter()
                .map(|w| {
                    entries
                        .get(w)
                        .cloned()
                        .ok_or_else(|| Error::UnknownRay(fmt_vec(w)))
                })
                .collect(),
        }
    }

    /// `Psi(Cone(rays))` for independent primitive rays.
    pub fn psi(&self, rays: &[IntVec]) -> Result<PsiSubspace> {
        let n = self.ambient();
        if rays.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "ray of wrong dimension for a map on dimension {n}"
            )));
        }
        if rays.len() > n {
            return Err(Error::DependentGenerators);
        }
        let basis = self.raw_basis(rays)?;
        // Psi(S) meets span(S)^perp trivially and has the right dimension
        // iff the pairing matrix <w_s, b_j> is nonsingular.
        if !pairing_matrix(rays, &basis).det().is_zero() || rays.is_empty() {
            Ok(PsiSubspace { basis })
        } else {
            Err(Error::NotGeneric { locus: locus(rays) })
        }
    }

    /// Genericity of a pointed cone. Basic cones are tested face by face;
    /// other cones through the canonical basic subdivision only.
    pub fn is_generic(&self, cone: &Cone) -> Result<bool> {
        if matches!(self, ComplementMap::InnerProduct { .. }) {
            return Ok(true);
        }
        if cone.is_basic() || cone.is_zero() {
            return self
                .check_basic(cone)
                .map(|_| true)
                .or_else(not_generic_is_false);
        }
        for child in subdivide_to_basic(cone)?.children {
            if !self.is_generic(&child)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Fails with the offending face when a simplicial cone is not generic.
    pub fn check_basic(&self, cone: &Cone) -> Result<()> {
        for s in subsets(cone.num_rays()) {
            self.psi(cone.face_cone(&s).generators())?;
        }
        Ok(())
    }

    /// `u_{S,s}`: the unique vector of `Psi(S)` with `<w_s, u> = 1` and
    /// `<w_t, u> = 0` for the other rays `t` of `S`.
    pub fn solve_u(&self, rays: &[IntVec], s: usize) -> Result<Vec<Rational>> {
        Ok(self.solve_u_all(rays)?.swap_remove(s))
    }

    /// `u_{S,s}` for every `s` in `S`, in order.
    pub fn solve_u_all(&self, rays: &[IntVec]) -> Result<Vec<Vec<Rational>>> {
        let n = self.ambient();
        let psi = self.psi(rays)?;
        let k = rays.len();
        let p = pairing_matrix(rays, &psi.basis);
        let inv = p
            .inverse()
            .ok_or_else(|| Error::NotGeneric { locus: locus(rays) })?;
        // Column s of the inverse holds the coefficients of u_{S,s}.
        Ok((0..k)
            .map(|s| {
                let mut u = vec![Rational::zero(); n];
                for (j, b) in psi.basis.iter().enumerate() {
                    let c = inv.get(j, s);
                    if c.is_zero() {
                        continue;
                    }
                    for (ui, bi) in u.iter_mut().zip(b) {
                        *ui += c * bi;
                    }
                }
                u
            })
            .collect())
    }
}

fn not_generic_is_false(e: Error) -> Result<bool> {
    match e {
        Error::NotGeneric { .. } => Ok(false),
        other => Err(other),
    }
}

fn locus(rays: &[IntVec]) -> String {
    let parts: Vec<String> = rays.iter().map(|r| fmt_vec(r)).collect();
    format!("Cone[{}]", parts.join(", "))
}

/// `P[s][j] = <w_s, b_j>`.
fn pairing_matrix(rays: &[IntVec], basis: &[Vec<Rational>]) -> Matrix {
    Matrix::from_rows(
        rays.iter()
            .map(|w| basis.iter().map(|b| pair_mixed(w, b)).collect())
            .collect(),
        basis.len(),
    )
}

/// Rays `w_0, ..., w_n` of the fan of `P^n`.
pub fn pn_rays(n: usize) -> Vec<IntVec> {
    let mut rays = vec![vec![-1; n]];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        rays.push(e);
    }
    rays
}

/// Cones of the fan of `P^n` as ray-index subsets: every proper subset of
/// `{0, ..., n}`, by size then lexicographically.
pub fn pn_fan(n: usize) -> Vec<Vec<usize>> {
    subsets(n + 1)
        .into_iter()
        .filter(|s| s.len() <= n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn rv(v: &[i64]) -> Vec<Rational> {
        int_vec_to_rat(v)
    }

    #[test]
    fn psi_examples() {
        let ip = ComplementMap::standard_inner_product(2);
        assert_eq!(ip.psi(&[vec![0, 1]]).unwrap().basis, vec![rv(&[0, 1])]);

        let flag = ComplementMap::flag(vec![rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(
            flag.psi(&[vec![0, 1]]).unwrap_err(),
            Error::NotGeneric {
                locus: "Cone[(0,1)]".into()
            }
        );
        assert_eq!(flag.psi(&[vec![1, 0]]).unwrap().basis, vec![rv(&[1, 0])]);
        assert_eq!(flag.psi(&[vec![1, 1]]).unwrap().basis, vec![rv(&[1, 0])]);

        let df = ComplementMap::diaconis_fulton(2);
        assert_eq!(df.psi(&[vec![1, 0]]).unwrap().basis, vec![rv(&[1, -1])]);
        assert!(matches!(df.psi(&[vec![1, 1]]), Err(Error::UnknownRay(_))));
    }

    #[test]
    fn genericity() {
        let ip = ComplementMap::standard_inner_product(2);
        let c = Cone::new(vec![vec![1, 0], vec![1, 3]], 2).unwrap();
        assert!(ip.is_generic(&c).unwrap());
        let flag = ComplementMap::flag(vec![rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert!(flag
            .is_generic(&Cone::new(vec![vec![1, 0]], 2).unwrap())
            .unwrap());
        assert!(!flag
            .is_generic(&Cone::new(vec![vec![0, 1]], 2).unwrap())
            .unwrap());
        for n in 1..=4 {
            let df = ComplementMap::diaconis_fulton(n);
            let rays = pn_rays(n);
            for s in pn_fan(n) {
                let cone = Cone::new(s.iter().map(|&i| rays[i].clone()).collect(), n).unwrap();
                assert!(cone.is_basic() || cone.is_zero());
                assert!(df.is_generic(&cone).unwrap(), "n={n} {s:?}");
            }
        }
    }

    #[test]
    fn solve_u_examples() {
        let ip = ComplementMap::standard_inner_product(2);
        let rays = vec![vec![1, 0], vec![1, 2]];
        let u1 = ip.solve_u(&rays, 0).unwrap();
        assert_eq!(u1, vec![rat(1), ratio(-1, 2)]);
        assert_eq!(pair_mixed(&rays[0], &u1), rat(1));
        assert_eq!(pair_mixed(&rays[1], &u1), rat(0));

        let w = vec![vec![1, 2]];
        assert_eq!(ip.solve_u(&w, 0).unwrap(), vec![ratio(1, 5), ratio(2, 5)]);

        let df = ComplementMap::diaconis_fulton(3);
        let rays = pn_rays(3);
        for ray in &rays {
            let u = df.solve_u(std::slice::from_ref(ray), 0).unwrap();
            assert_eq!(pair_mixed(ray, &u), rat(1));
        }
    }

    #[test]
    fn invalid_maps() {
        let bad = Matrix::from_rows(vec![rv(&[1, 2]), rv(&[2, 1])], 2);
        assert!(ComplementMap::inner_product(bad).is_err());
        assert!(ComplementMap::flag(vec![rv(&[1, 1]), rv(&[2, 2])]).is_err());
        assert!(ComplementMap::ray_table(vec![(vec![1, 0], rv(&[0, 1]))]).is_err());
    }
}

//! The cone coefficients `mu(L)`.
//!
//! For a basic cone `L = Cone(w_1, ..., w_k)` the ring
//! `R(L) = Lambda[[D_1, ..., D_k]]` is reduced modulo the ideal generated by
//! `D_S (l_v - v)` with `v` in `Psi(S)` and `l_v = sum_i <w_i, v> D_i`. Every
//! element has a unique squarefree normal form `sum_S alpha_S D_S`, and
//! `mu(L)` is the coefficient of `D_1 ... D_k` in the normal form of
//! `td(D_1, ..., D_k)`.
//!
//! Two independent pipelines are provided: rewriting to the normal form
//! ([`mu_basic`]) and the closed chain-sum formula ([`mu_explicit`]).
//! Non-basic cones are handled by summing over a basic subdivision.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complement::ComplementMap;
use crate::error::{Error, Result};
use crate::exact::{dual_basis, fmt_vec, pair_mixed, rank_of, IntVec, Matrix, Rational};
use crate::geometry::{subdivide_to_basic, subsets, Cone, Polytope};
use crate::series::{
    compose_linear, sum_to_series, todd_univariate, LinearForm, Monomial, MultiSeries,
    RationalFunctionTerm,
};

/// Exponent vector in the `D` variables.
pub type DExp = Vec<u16>;

/// Element of `R(L)`: a finite sum of `D`-monomials with coefficients in
/// the truncated coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    k: usize,
    nvars: usize,
    terms: BTreeMap<DExp, MultiSeries>,
}

impl RingElement {
    pub fn zero(k: usize, nvars: usize) -> Self {
        Self {
            k,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// The monomial `coeff * D^exps`.
    pub fn monomial(exps: DExp, coeff: MultiSeries) -> Self {
        let mut e = Self::zero(exps.len(), coeff.nvars());
        e.add_term(exps, coeff);
        e
    }

    pub fn num_d(&self) -> usize {
        self.k
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DExp, &MultiSeries)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u16]) -> Option<&MultiSeries> {
        self.terms.get(exps)
    }

    /// Highest total `D`-degree present.
    pub fn d_degree(&self) -> u32 {
        self.terms.keys().map(|e| d_degree(e)).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: DExp, coeff: MultiSeries) {
        assert_eq!(exps.len(), self.k, "D arity");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// Product with `D^exps`.
    pub fn shift(&self, exps: &[u16]) -> RingElement {
        let mut out = RingElement::zero(self.k, self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.iter().zip(exps).map(|(a, b)| a + b).collect(), c.clone());
        }
        out
    }

    /// Product with a coefficient-ring element.
    pub fn scale(&self, c: &MultiSeries) -> RingElement {
        let mut out = RingElement::zero(self.k, self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul(c));
        }
        out
    }
}

fn d_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

fn support_mask(e: &[u16]) -> usize {
    e.iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .fold(0, |m, (i, _)| m | (1 << i))
}

fn mask_to_subset(mask: usize, k: usize) -> Vec<usize> {
    (0..k).filter(|i| mask & (1 << i) != 0).collect()
}

fn subset_to_mask(s: &[usize]) -> usize {
    s.iter().fold(0, |m, &i| m | (1 << i))
}

/// Squarefree normal form `sum_S alpha_S D_S`, keyed by ray subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeExpr {
    k: usize,
    terms: BTreeMap<Vec<usize>, MultiSeries>,
}

impl SquarefreeExpr {
    pub fn num_d(&self) -> usize {
        self.k
    }

    /// Coefficient of `D_S` (`None` if zero).
    pub fn get(&self, subset: &[usize]) -> Option<&MultiSeries> {
        self.terms.get(subset)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &MultiSeries)> {
        self.terms.iter()
    }

    /// Coefficient of the top monomial `D_1 ... D_k`.
    pub fn top(&self, nvars: usize, order: u32) -> MultiSeries {
        let all: Vec<usize> = (0..self.k).collect();
        self.terms
            .get(&all)
            .cloned()
            .unwrap_or_else(|| MultiSeries::zero(nvars, order))
    }
}

/// `D_S (l_v - v)` for `v` in `Psi(S)`.
pub fn linear_relation(
    map: &ComplementMap,
    cone: &Cone,
    subset: &[usize],
    v: &[Rational],
    order: u32,
) -> Result<RingElement> {
    let rays = cone.face_cone(subset).generators().to_vec();
    let psi = map.psi(&rays)?;
    let n = map.ambient();
    let mut with_v = psi.basis.clone();
    with_v.push(v.to_vec());
    if rank_of(&with_v, n) != psi.basis.len() {
        return Err(Error::VectorNotInPsi);
    }
    let k = cone.num_rays();
    let mut base = vec![0u16; k];
    for &s in subset {
        base[s] = 1;
    }
    let mut out = RingElement::zero(k, n);
    for (j, w) in cone.generators().iter().enumerate() {
        let c = pair_mixed(w, v);
        let mut e = base.clone();
        e[j] += 1;
        out.add_term(e, MultiSeries::constant(n, order, c));
    }
    out.add_term(base, LinearForm::new(v.to_vec()).to_series(order).neg());
    Ok(out)
}

/// `td(D_1, ..., D_k)` truncated at total `D`-degree `cap`, with constant
/// coefficients.
pub fn td_element(k: usize, nvars: usize, cap: u32, order: u32) -> RingElement {
    let td = todd_univariate(cap as usize);
    let mut out = RingElement::zero(k, nvars);
    let mut e = vec![0u16; k];
    loop {
        if d_degree(&e) <= cap {
            let c: Rational = e.iter().map(|&x| td[x as usize].clone()).product();
            out.add_term(e.clone(), MultiSeries::constant(nvars, order, c));
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            if d_degree(&e) < cap {
                e[i] += 1;
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Where the rewrite relations come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationSource {
    /// `D_S (l_u - u)` with `u = u_{S,i}` built directly.
    FaceLevel,
    /// The same relation assembled from ray generators `D_s (l_b - b)`,
    /// with `b` spanning `Psi` of the ray. Only for ray-generated maps.
    RayLevel,
}

/// Term of a relation: coefficient `constant + linear`.
#[derive(Clone, Debug)]
struct RelTerm {
    exps: DExp,
    constant: Rational,
    linear: LinearForm,
}

#[derive(Clone, Debug)]
struct Relation {
    lead: Rational,
    rest: Vec<RelTerm>,
}

/// Rewriting engine for a fixed Psi-generic basic cone.
pub struct Reducer<'a> {
    map: &'a ComplementMap,
    rays: Vec<IntVec>,
    k: usize,
    n: usize,
    order: u32,
    /// `us[mask][pos]` is `u_{S, S[pos]}` for the subset encoded by `mask`.
    us: Vec<Vec<Vec<Rational>>>,
    source: RelationSource,
    pivot_order: Vec<usize>,
    relations: HashMap<(usize, usize), Relation>,
}

impl<'a> Reducer<'a> {
    pub fn new(map: &'a ComplementMap, cone: &Cone, order: u32) -> Result<Self> {
        if !cone.is_basic() && !cone.is_zero() {
            return Err(Error::NotUnimodular(format!(
                "cone with rays {} is not basic",
                cone.generators()
                    .iter()
                    .map(|g| fmt_vec(g))
                    .collect::<Vec<_>>()
                    .join(" ")
            )));
        }
        map.check_basic(cone)?;
        let k = cone.num_rays();
        let rays = cone.generators().to_vec();
        let mut us = vec![Vec::new(); 1 << k];
        for s in subsets(k) {
            let face: Vec<IntVec> = s.iter().map(|&i| rays[i].clone()).collect();
            us[subset_to_mask(&s)] = map.solve_u_all(&face)?;
        }
        Ok(Self {
            map,
            rays,
            k,
            n: map.ambient(),
            order,
            us,
            source: RelationSource::FaceLevel,
            pivot_order: (0..k).collect(),
            relations: HashMap::new(),
        })
    }

    pub fn with_source(mut self, source: RelationSource) -> Result<Self> {
        if source == RelationSource::RayLevel && !self.map.is_ray_generated() {
            return Err(Error::InvalidMap(
                "ray-level relations need a ray-generated complement map".into(),
            ));
        }
        self.source = source;
        self.relations.clear();
        Ok(self)
    }

    /// Order in which repeated variables are peeled; must be a permutation.
    pub fn with_pivot_order(mut self, order: Vec<usize>) -> Self {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(
            sorted,
            (0..self.k).collect::<Vec<_>>(),
            "pivot order must be a permutation"
        );
        self.pivot_order = order;
        self
    }

    pub fn num_rays(&self) -> usize {
        self.k
    }

    /// `u_{S,s}`, or zero when `s` is not in `S`.
    pub fn u(&self, subset: &[usize], s: usize) -> Vec<Rational> {
        match subset.iter().position(|&x| x == s) {
            Some(pos) => self.us[subset_to_mask(subset)][pos].clone(),
            None => vec![Rational::zero(); self.n],
        }
    }

    fn build_relation(&self, mask: usize, i: usize) -> Result<Relation> {
        let subset = mask_to_subset(mask, self.k);
        let u = self.u(&subset, i);
        // (coefficient of D_j D_S, coefficient of D_S)
        let (pairings, offset): (Vec<Rational>, Vec<Rational>) = match self.source {
            RelationSource::FaceLevel => (
                self.rays.iter().map(|w| pair_mixed(w, &u)).collect(),
                u.clone(),
            ),
            RelationSource::RayLevel => {
                let rays: Vec<IntVec> = subset.iter().map(|&s| self.rays[s].clone()).collect();
                let ray_vecs: Vec<Vec<Rational>> = rays
                    .iter()
                    .map(|r| {
                        self.map
                            .psi(std::slice::from_ref(r))
                            .map(|p| p.basis[0].clone())
                    })
                    .collect::<Result<_>>()?;
                let cols = Matrix::from_rows(ray_vecs.clone(), self.n).transpose();
                let c = cols.solve(&u).map_err(|_| Error::VectorNotInPsi)?;
                let mut pairings = vec![Rational::zero(); self.k];
                let mut offset = vec![Rational::zero(); self.n];
                for (cs, b) in c.iter().zip(&ray_vecs) {
                    if cs.is_zero() {
                        continue;
                    }
                    for (j, w) in self.rays.iter().enumerate() {
                        pairings[j] += cs * pair_mixed(w, b);
                    }
                    for (o, bi) in offset.iter_mut().zip(b) {
                        *o += cs * bi;
                    }
                }
                (pairings, offset)
            }
        };
        let base: DExp = (0..self.k)
            .map(|j| u16::from(mask & (1 << j) != 0))
            .collect();
        let mut rest = Vec::new();
        let mut lead = Rational::zero();
        for (j, p) in pairings.into_iter().enumerate() {
            if j == i {
                lead = p;
                continue;
            }
            if p.is_zero() {
                continue;
            }
            let mut e = base.clone();
            e[j] += 1;
            rest.push(RelTerm {
                exps: e,
                constant: p,
                linear: LinearForm::zero(self.n),
            });
        }
        rest.push(RelTerm {
            exps: base,
            constant: Rational::zero(),
            linear: LinearForm::new(offset).scale(&-Rational::one()),
        });
        if lead.is_zero() {
            return Err(Error::NotGeneric {
                locus: format!("face {subset:?}"),
            });
        }
        Ok(Relation { lead, rest })
    }

    /// The relation used to rewrite `D_i D_S`, as a ring element.
    pub fn relation(&mut self, subset: &[usize], i: usize) -> Result<RingElement> {
        let mask = subset_to_mask(subset);
        let rel = self.build_relation(mask, i)?;
        let mut base: DExp = vec![0; self.k];
        for &s in subset {
            base[s] = 1;
        }
        base[i] += 1;
        let mut out = RingElement::zero(self.k, self.n);
        out.add_term(
            base,
            MultiSeries::constant(self.n, self.order + 1, rel.lead),
        );
        for t in rel.rest {
            let c = MultiSeries::constant(self.n, self.order + 1, t.constant)
                .add(&t.linear.to_series(self.order + 1));
            out.add_term(t.exps, c);
        }
        Ok(out)
    }

    /// Largest coefficient degree of `D^a` that can still reach a squarefree
    /// term at degree `<= order`. Each rewrite either lowers the `D`-degree
    /// by one while raising the coefficient degree by one, or keeps both
    /// and enlarges the support, so the coefficient degree grows by exactly
    /// `|a| - |T|` on the way to `D_T`.
    fn bound(&self, a: &[u16]) -> i64 {
        self.order as i64 - (d_degree(a) as i64 - self.k as i64).max(0)
    }

    /// Squarefree normal form. Coefficients are exact through degree
    /// `order`; terms of `D`-degree above `k + order` cannot contribute and
    /// are discarded.
    pub fn reduce(&mut self, q: &RingElement) -> Result<SquarefreeExpr> {
        assert_eq!(q.k, self.k, "ring element belongs to a different cone");
        // Pending terms ordered by (D-degree, k - |support|, exponents);
        // every rewrite output is strictly smaller than its input, so
        // popping the maximum visits each monomial once.
        type Key = (u32, usize, DExp);
        let key = |e: &DExp| -> Key {
            (
                d_degree(e),
                self.k - e.iter().filter(|&&x| x > 0).count(),
                e.clone(),
            )
        };
        let mut pending: BTreeMap<Key, MultiSeries> = BTreeMap::new();
        let push = |pending: &mut BTreeMap<Key, MultiSeries>, e: DExp, c: MultiSeries, b: i64| {
            if b < 0 || c.is_zero() {
                return;
            }
            let c = c.truncate(b as u32);
            if c.is_zero() {
                return;
            }
            match pending.entry(key(&e)) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    o.get_mut().add_assign_ref(&c);
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
            }
        };
        for (e, c) in &q.terms {
            let b = self.bound(e);
            push(&mut pending, e.clone(), c.clone(), b);
        }
        let mut out: BTreeMap<Vec<usize>, MultiSeries> = BTreeMap::new();
        while let Some(((_, _, a), c)) = pending.pop_last() {
            let Some(&i) = self.pivot_order.iter().find(|&&i| a[i] >= 2) else {
                let subset: Vec<usize> = (0..self.k).filter(|&j| a[j] > 0).collect();
                out.insert(subset, c.truncate(self.order));
                continue;
            };
            let mask = support_mask(&a);
            if !self.relations.contains_key(&(mask, i)) {
                let rel = self.build_relation(mask, i)?;
                self.relations.insert((mask, i), rel);
            }
            let rel = &self.relations[&(mask, i)];
            // D^a = D^m * (D_i D_S) with m = a - e_i - 1_S
            let m: DExp = a
                .iter()
                .enumerate()
                .map(|(j, &x)| x - u16::from(x > 0) - u16::from(j == i))
                .collect();
            let factor = c.scale(&(-rel.lead.recip()));
            let mut outputs = Vec::with_capacity(rel.rest.len());
            for t in &rel.rest {
                let e: DExp = m.iter().zip(&t.exps).map(|(x, y)| x + y).collect();
                let mut coeff = factor.scale(&t.constant);
                if !t.linear.is_zero() {
                    let lin = factor.mul_linear(&t.linear);
                    coeff = coeff.with_order(lin.order()).add(&lin);
                }
                outputs.push((e, coeff));
            }
            for (e, coeff) in outputs {
                let b = self.bound(&e);
                push(&mut pending, e, coeff, b);
            }
        }
        Ok(SquarefreeExpr {
            k: self.k,
            terms: out,
        })
    }
}

/// How a value of `mu` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Reduction,
    Explicit,
    SubdivisionSum,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Reduction => "reduction",
            Provenance::Explicit => "explicit",
            Provenance::SubdivisionSum => "subdivision-sum",
        }
    }
}

/// `mu(L)` truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuValue {
    pub cone: Cone,
    pub map_id: String,
    pub order: u32,
    pub series: MultiSeries,
    pub provenance: Provenance,
}

impl MuValue {
    pub fn mu0(&self) -> Rational {
        self.series.constant_term()
    }
}

fn zero_cone_mu(map: &ComplementMap, cone: &Cone, order: u32, provenance: Provenance) -> MuValue {
    MuValue {
        cone: cone.clone(),
        map_id: map.id(),
        order,
        series: MultiSeries::one(map.ambient(), order),
        provenance,
    }
}

fn check_ambient(map: &ComplementMap, cone: &Cone) -> Result<()> {
    if map.ambient() != cone.ambient() {
        return Err(Error::DimensionMismatch(format!(
            "cone in dimension {} with a map on dimension {}",
            cone.ambient(),
            map.ambient()
        )));
    }
    Ok(())
}

/// `mu` of a Psi-generic basic cone by reduction of the Todd element.
pub fn mu_basic(map: &ComplementMap, cone: &Cone, order: u32) -> Result<MuValue> {
    mu_basic_with(map, cone, order, RelationSource::FaceLevel, None)
}

/// [`mu_basic`] with an explicit relation source, pivot order and optional
/// `D`-degree cap (default `k + order`).
pub fn mu_basic_with(
    map: &ComplementMap,
    cone: &Cone,
    order: u32,
    source: RelationSource,
    cap: Option<u32>,
) -> Result<MuValue> {
    check_ambient(map, cone)?;
    if cone.is_zero() {
        return Ok(zero_cone_mu(map, cone, order, Provenance::Reduction));
    }
    let mut reducer = Reducer::new(map, cone, order)?.with_source(source)?;
    let k = cone.num_rays();
    let cap = cap.unwrap_or(k as u32 + order);
    let td = td_element(k, map.ambient(), cap, order);
    let nf = reducer.reduce(&td)?;
    Ok(MuValue {
        cone: cone.clone(),
        map_id: map.id(),
        order,
        series: nf.top(map.ambient(), order),
        provenance: Provenance::Reduction,
    })
}

/// All chains `T = C_0 < C_1 < ... < C_r = S` of subsets.
fn chains(t: &[usize], s: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if t == s {
        return vec![vec![t.to_vec()]];
    }
    let rest: Vec<usize> = s.iter().copied().filter(|x| !t.contains(x)).collect();
    let mut out = Vec::new();
    for add in subsets(rest.len()).into_iter().skip(1) {
        let mut next: Vec<usize> = t.to_vec();
        next.extend(add.iter().map(|&j| rest[j]));
        next.sort_unstable();
        for mut tail in chains(&next, s) {
            let mut c = vec![t.to_vec()];
            c.append(&mut tail);
            out.push(c);
        }
    }
    out
}

/// `U_{S,T}` as a list of signed reciprocal products of linear forms.
pub fn chain_sum(
    map: &ComplementMap,
    cone: &Cone,
    s: &[usize],
    t: &[usize],
    order: u32,
) -> Result<Vec<RationalFunctionTerm>> {
    let reducer = Reducer::new(map, cone, order)?;
    Ok(chain_sum_with(&reducer, s, t, order))
}

fn chain_sum_with(
    reducer: &Reducer<'_>,
    s: &[usize],
    t: &[usize],
    order: u32,
) -> Vec<RationalFunctionTerm> {
    let n = reducer.n;
    chains(t, s)
        .into_iter()
        .map(|chain| {
            let r = chain.len() - 1;
            let mut den: Vec<LinearForm> = t
                .iter()
                .map(|&x| LinearForm::new(reducer.u(t, x)))
                .collect();
            for w in chain.windows(2) {
                for &x in w[1].iter().filter(|x| !w[0].contains(x)) {
                    den.push(LinearForm::new(reducer.u(&w[1], x)));
                }
            }
            let sign = if r % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            RationalFunctionTerm::new(MultiSeries::constant(n, order, sign), den)
        })
        .collect()
}

/// `mu` of a Psi-generic basic cone from the chain-sum formula
/// `mu(L) = sum_T td(u_T) U_{[k],T}`, combined over a common denominator
/// and divided exactly.
pub fn mu_explicit(map: &ComplementMap, cone: &Cone, order: u32) -> Result<MuValue> {
    check_ambient(map, cone)?;
    if cone.is_zero() {
        return Ok(zero_cone_mu(map, cone, order, Provenance::Explicit));
    }
    let reducer = Reducer::new(map, cone, order)?;
    let k = cone.num_rays();
    let n = map.ambient();
    let full: Vec<usize> = (0..k).collect();
    // each chain term has k denominator factors
    let num_order = order + k as u32;
    let td = todd_univariate(num_order as usize);
    let mut terms = Vec::new();
    for t in subsets(k) {
        let mut td_ut = MultiSeries::one(n, num_order);
        for &x in &t {
            td_ut = td_ut.mul(&compose_linear(
                &td,
                &LinearForm::new(reducer.u(&t, x)),
                num_order,
            ));
        }
        for term in chain_sum_with(&reducer, &full, &t, num_order) {
            terms.push(RationalFunctionTerm::new(
                td_ut.mul(&term.numerator),
                term.denominators,
            ));
        }
    }
    Ok(MuValue {
        cone: cone.clone(),
        map_id: map.id(),
        order,
        series: sum_to_series(&terms, order)?,
        provenance: Provenance::Explicit,
    })
}

/// Runs both basic-cone pipelines and fails on any disagreement.
pub fn mu_cross_checked(map: &ComplementMap, cone: &Cone, order: u32) -> Result<MuValue> {
    let a = mu_basic(map, cone, order)?;
    let b = mu_explicit(map, cone, order)?;
    if a.series != b.series {
        return Err(Error::PipelineMismatch(format!(
            "cone {:?}: reduction gives {} but explicit formula gives {}",
            cone.generators(),
            a.series,
            b.series
        )));
    }
    Ok(a)
}

/// `mu` of any Psi-generic pointed cone: directly for basic cones, else as
/// the sum over the canonical basic subdivision.
pub fn mu(map: &ComplementMap, cone: &Cone, order: u32) -> Result<MuValue> {
    mu_impl(map, cone, order, false)
}

fn mu_impl(map: &ComplementMap, cone: &Cone, order: u32, cross_check: bool) -> Result<MuValue> {
    check_ambient(map, cone)?;
    let basic = |c: &Cone| {
        if cross_check {
            mu_cross_checked(map, c, order)
        } else {
            mu_basic(map, c, order)
        }
    };
    if cone.is_zero() || cone.is_basic() {
        return basic(cone);
    }
    let sub = subdivide_to_basic(cone)?;
    let mut total = MultiSeries::zero(map.ambient(), order);
    for child in &sub.children {
        let value = basic(child).map_err(|e| match e {
            Error::NotGeneric { locus } => Error::NotGeneric {
                locus: format!(
                    "{locus} in the canonical basic subdivision of Cone[{}] \
                     (other subdivisions not searched)",
                    cone.generators()
                        .iter()
                        .map(|g| fmt_vec(g))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            },
            other => other,
        })?;
        total.add_assign_ref(&value.series);
    }
    Ok(MuValue {
        cone: cone.clone(),
        map_id: map.id(),
        order,
        series: total,
        provenance: Provenance::SubdivisionSum,
    })
}

/// One row of a [`MuTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuEntry {
    pub face_index: usize,
    pub face_vertices: Vec<usize>,
    pub face_dim: usize,
    pub mu: MuValue,
}

/// `mu(C(P, F))` for every face `F` of a polytope, in face order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuTable {
    pub order: u32,
    pub map_id: String,
    pub entries: Vec<MuEntry>,
}

/// Computes the table in parallel over faces. With `cross_check`, every
/// basic cone is computed by both pipelines.
pub fn mu_table(
    polytope: &Polytope,
    map: &ComplementMap,
    order: u32,
    cross_check: bool,
) -> Result<MuTable> {
    let entries = polytope
        .faces()
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let cone = polytope.normal_cone(f);
            let mu = mu_impl(map, &cone, order, cross_check).map_err(|e| match e {
                Error::NotGeneric { locus } => Error::NotGeneric {
                    locus: format!("normal cone of face {:?}: {locus}", f.vertices),
                },
                other => other,
            })?;
            Ok(MuEntry {
                face_index: i,
                face_vertices: f.vertices.clone(),
                face_dim: f.dim,
                mu,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MuTable {
        order,
        map_id: map.id(),
        entries,
    })
}

/// The evaluation map `D_i -> v_i` for a full-dimensional basic cone, with
/// `v_i` the dual basis of the rays. Returns the numerator `p(v_1, ..., v_n)`
/// and the denominators `v_1, ..., v_n`.
pub fn evaluation_map(p: &RingElement, cone: &Cone) -> Result<(MultiSeries, Vec<LinearForm>)> {
    let n = cone.ambient();
    if cone.num_rays() != n || !cone.is_simplicial() {
        return Err(Error::NotFullDim);
    }
    let duals = dual_basis(cone.generators())?;
    let forms: Vec<LinearForm> = duals.iter().map(|v| LinearForm::from_ints(v)).collect();
    let order = p
        .terms()
        .map(|(e, c)| c.order() + d_degree(e))
        .min()
        .unwrap_or(0);
    let mut num = MultiSeries::zero(n, order);
    for (e, c) in p.terms() {
        let mut t = c.clone();
        for (i, &x) in e.iter().enumerate() {
            for _ in 0..x {
                t = t.mul_linear(&forms[i]);
            }
        }
        num.add_assign_ref(&t.truncate(order));
    }
    Ok((num, forms))
}

/// Squarefree normal form from the closed formula
/// `alpha_S = sum_{T <= S} Q(u_T) U_{S,T}`, for polynomial `Q` with
/// constant coefficients. Used as an independent oracle.
pub fn squarefree_explicit(
    map: &ComplementMap,
    cone: &Cone,
    q: &RingElement,
    order: u32,
) -> Result<SquarefreeExpr> {
    let reducer = Reducer::new(map, cone, order)?;
    let k = cone.num_rays();
    let n = map.ambient();
    let mut out = BTreeMap::new();
    for s in subsets(k) {
        let num_order = order + s.len() as u32;
        let mut terms = Vec::new();
        for t in subsets(k)
            .into_iter()
            .filter(|t| t.iter().all(|x| s.contains(x)))
        {
            // Q(u_T): substitute D_i -> u_{T,i}
            let mut q_ut = MultiSeries::zero(n, num_order);
            for (e, c) in q.terms() {
                let mut val = c.truncate(num_order);
                if val.order() < num_order {
                    val = val.with_order(num_order);
                }
                for (i, &x) in e.iter().enumerate() {
                    let form = LinearForm::new(reducer.u(&t, i));
                    for _ in 0..x {
                        val = val.mul_linear(&form).truncate(num_order);
                    }
                }
                q_ut.add_assign_ref(&val);
            }
            for term in chain_sum_with(&reducer, &s, &t, num_order) {
                terms.push(RationalFunctionTerm::new(
                    q_ut.mul(&term.numerator),
                    term.denominators,
                ));
            }
        }
        let num = sum_to_series(&terms, order)?;
        if !num.is_zero() {
            out.insert(s, num);
        }
    }
    Ok(SquarefreeExpr { k, terms: out })
}

/// Exponent vector of a monomial as a `D` exponent (helper for tests and
/// I/O).
pub fn dexp(e: &[u16]) -> DExp {
    e.to_vec()
}

/// Monomial key of a coefficient-ring term (re-exported for I/O).
pub type LambdaMonomial = Monomial;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int_vec_to_rat, rat, ratio};
    use crate::series::{t2_series, t_series};

    fn cone(gens: &[&[i64]]) -> Cone {
        let n = gens[0].len();
        Cone::new(gens.iter().map(|g| g.to_vec()).collect(), n).unwrap()
    }

    fn std2() -> ComplementMap {
        ComplementMap::standard_inner_product(2)
    }

    #[test]
    fn relation_examples() {
        let map = ComplementMap::standard_inner_product(1);
        let l = cone(&[&[1]]);
        let u1 = map.solve_u(&[vec![1]], 0).unwrap();
        let rel = linear_relation(&map, &l, &[0], &u1, 3).unwrap();
        assert_eq!(rel.coeff(&[2]).unwrap(), &MultiSeries::one(1, 3));
        assert_eq!(
            rel.coeff(&[1]).unwrap(),
            &LinearForm::new(u1.clone()).to_series(3).neg()
        );

        let zero = linear_relation(&map, &l, &[0], &[rat(0)], 3).unwrap();
        assert!(zero.is_zero());

        let ip = std2();
        let l2 = cone(&[&[1, 0], &[0, 1]]);
        assert_eq!(
            linear_relation(&ip, &l2, &[0], &[rat(0), rat(1)], 3).unwrap_err(),
            Error::VectorNotInPsi
        );
    }

    #[test]
    fn td_element_examples() {
        let t1 = td_element(1, 1, 2, 0);
        assert_eq!(t1.coeff(&[2]).unwrap().constant_term(), ratio(1, 12));
        assert_eq!(t1.coeff(&[1]).unwrap().constant_term(), ratio(1, 2));
        let t0 = td_element(0, 2, 3, 2);
        assert_eq!(t0.terms().count(), 1);
        let t2 = td_element(2, 2, 2, 0);
        assert_eq!(t2.coeff(&[1, 1]).unwrap().constant_term(), ratio(1, 4));
        assert_eq!(t2.coeff(&[2, 0]).unwrap().constant_term(), ratio(1, 12));
        assert_eq!(t2.coeff(&[0, 2]).unwrap().constant_term(), ratio(1, 12));
        assert!(t2.coeff(&[2, 1]).is_none());
    }

    #[test]
    fn reduce_examples() {
        let map = ComplementMap::standard_inner_product(1);
        let l = cone(&[&[1]]);
        let mut r = Reducer::new(&map, &l, 3).unwrap();
        let q = RingElement::monomial(vec![2], MultiSeries::one(1, 3));
        let nf = r.reduce(&q).unwrap();
        assert_eq!(
            nf.get(&[0]).unwrap(),
            &LinearForm::from_ints(&[1]).to_series(3)
        );

        let q = RingElement::monomial(vec![1], MultiSeries::one(1, 3));
        assert_eq!(
            r.reduce(&q).unwrap().get(&[0]).unwrap(),
            &MultiSeries::one(1, 3)
        );

        let ip = std2();
        let l2 = cone(&[&[1, 0], &[1, 1]]);
        let mut r = Reducer::new(&ip, &l2, 3).unwrap();
        let q = RingElement::monomial(vec![2, 0], MultiSeries::one(2, 3));
        let nf = r.reduce(&q).unwrap();
        assert_eq!(
            nf.get(&[0]).unwrap(),
            &LinearForm::from_ints(&[1, 0]).to_series(3)
        );
        assert_eq!(
            nf.get(&[0, 1]).unwrap(),
            &MultiSeries::constant(2, 3, rat(-1))
        );
        assert!(nf.get(&[1]).is_none());
        assert!(nf.get(&[]).is_none());
    }

    #[test]
    fn mu_one_dimensional_is_t_of_u() {
        let ip = std2();
        let l = cone(&[&[1, 2]]);
        let u = ip.solve_u(l.generators(), 0).unwrap();
        let want = compose_linear(&t_series(6), &LinearForm::new(u), 6);
        assert_eq!(mu_basic(&ip, &l, 6).unwrap().series, want);
        assert_eq!(mu_explicit(&ip, &l, 6).unwrap().series, want);
    }

    #[test]
    fn mu_zero_cone() {
        let ip = std2();
        let m = mu(&ip, &Cone::zero(2), 4).unwrap();
        assert_eq!(m.series, MultiSeries::one(2, 4));
    }

    #[test]
    fn triangle_vertex_constants() {
        let ip = std2();
        assert_eq!(
            mu_basic(&ip, &cone(&[&[0, 1], &[1, 0]]), 4).unwrap().mu0(),
            ratio(1, 4)
        );
        assert_eq!(
            mu_basic(&ip, &cone(&[&[-1, -1], &[0, 1]]), 4)
                .unwrap()
                .mu0(),
            ratio(3, 8)
        );
        assert_eq!(
            mu_basic(&ip, &cone(&[&[1, 0], &[-1, -1]]), 4)
                .unwrap()
                .mu0(),
            ratio(3, 8)
        );
    }

    #[test]
    fn two_dimensional_formula() {
        // mu = T(v1) T(v2) + (T(v1) - T(u1)) / v2 + (T(v2) - T(u2)) / v1
        // with (T(v1) - T(u1)) / v2 = -a T2(u1, -a v2), a = <w2, u1>.
        let d = 5;
        let gram = Matrix::from_rows(vec![int_vec_to_rat(&[2, 1]), int_vec_to_rat(&[1, 3])], 2);
        let map = ComplementMap::inner_product(gram).unwrap();
        let l = cone(&[&[1, 0], &[3, 1]]);
        let w = l.generators();
        let v1 = map.solve_u(w, 0).unwrap();
        let v2 = map.solve_u(w, 1).unwrap();
        let u1 = map.solve_u(&w[..1], 0).unwrap();
        let u2 = map.solve_u(&w[1..], 0).unwrap();
        let t = t_series(d as usize + 1);
        let t2 = t2_series(d);
        let lf = |v: &[Rational]| LinearForm::new(v.to_vec());
        let a = pair_mixed(&w[1], &u1);
        let b = pair_mixed(&w[0], &u2);
        let mut want = compose_linear(&t, &lf(&v1), d).mul(&compose_linear(&t, &lf(&v2), d));
        want.add_assign_ref(
            &t2.compose(&[lf(&u1), lf(&v2).scale(&-a.clone())], d)
                .scale(&-a.clone()),
        );
        want.add_assign_ref(
            &t2.compose(&[lf(&u2), lf(&v1).scale(&-b.clone())], d)
                .scale(&-b.clone()),
        );
        assert_eq!(mu_basic(&map, &l, d).unwrap().series, want);
        assert_eq!(mu_explicit(&map, &l, d).unwrap().series, want);
    }

    #[test]
    fn chain_sum_examples() {
        let ip = std2();
        let l = cone(&[&[1, 0], &[3, 1]]);
        let r = Reducer::new(&ip, &l, 2).unwrap();
        let u = |s: &[usize], i: usize| LinearForm::new(r.u(s, i));
        let top = chain_sum(&ip, &l, &[0, 1], &[0, 1], 2).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].denominators, vec![u(&[0, 1], 0), u(&[0, 1], 1)]);
        assert_eq!(top[0].numerator.constant_term(), rat(1));
        let one = chain_sum(&ip, &l, &[0, 1], &[0], 2).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].denominators, vec![u(&[0], 0), u(&[0, 1], 1)]);
        assert_eq!(one[0].numerator.constant_term(), rat(-1));
        let empty = chain_sum(&ip, &l, &[0, 1], &[], 2).unwrap();
        assert_eq!(empty.len(), 3);
    }

    #[test]
    fn additivity_of_a_split() {
        let ip = std2();
        let parent = cone(&[&[1, 0], &[0, 1]]);
        let a = mu(&ip, &cone(&[&[1, 0], &[1, 1]]), 4).unwrap();
        let b = mu(&ip, &cone(&[&[1, 1], &[0, 1]]), 4).unwrap();
        assert_eq!(a.series.add(&b.series), mu(&ip, &parent, 4).unwrap().series);
        let nonbasic = mu(&ip, &cone(&[&[1, 0], &[1, 2]]), 4).unwrap();
        assert_eq!(nonbasic.provenance, Provenance::SubdivisionSum);
    }

    #[test]
    fn ray_level_relations_agree() {
        let gram = Matrix::from_rows(
            vec![
                int_vec_to_rat(&[2, 1, 0]),
                int_vec_to_rat(&[1, 2, 1]),
                int_vec_to_rat(&[0, 1, 3]),
            ],
            3,
        );
        let map = ComplementMap::inner_product(gram).unwrap();
        let l = cone(&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
        let face = mu_basic_with(&map, &l, 3, RelationSource::FaceLevel, None).unwrap();
        let ray = mu_basic_with(&map, &l, 3, RelationSource::RayLevel, None).unwrap();
        assert_eq!(face.series, ray.series);
        let flag =
            ComplementMap::flag(vec![int_vec_to_rat(&[1, 0]), int_vec_to_rat(&[0, 1])]).unwrap();
        assert!(Reducer::new(&flag, &cone(&[&[1, 1]]), 2)
            .unwrap()
            .with_source(RelationSource::RayLevel)
            .is_err());
    }

    #[test]
    fn evaluation_map_examples() {
        let l = cone(&[&[1, 0], &[1, 1]]);
        // D1^2 D2^3 -> v1 v2^2
        let p = RingElement::monomial(vec![2, 3], MultiSeries::one(2, 3));
        let (num, den) = evaluation_map(&p, &l).unwrap();
        let want = MultiSeries::one(2, 8)
            .mul_linear(&den[0])
            .mul_linear(&den[0])
            .mul_linear(&den[1])
            .mul_linear(&den[1])
            .mul_linear(&den[1]);
        assert_eq!(num, want.truncate(num.order()));
        let ip = std2();
        let u = ip.solve_u(&[vec![1, 0]], 0).unwrap();
        let rel = linear_relation(&ip, &l, &[0], &u, 3).unwrap();
        assert!(evaluation_map(&rel, &l).unwrap().0.is_zero());
        assert_eq!(
            evaluation_map(&p, &cone(&[&[1, 0]])).unwrap_err(),
            Error::NotFullDim
        );
    }

    #[test]
    fn pn_consecutive_pair() {
        let df = ComplementMap::diaconis_fulton(2);
        let l = cone(&[&[1, 0], &[0, 1]]);
        assert_eq!(mu_basic(&df, &l, 3).unwrap().mu0(), ratio(1, 3));
    }
}

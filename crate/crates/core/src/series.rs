//! Truncated formal power series over the rationals.
//!
//! [`MultiSeries`] models the coefficient ring of power series in the
//! coordinates of `V` (functions on `W`), truncated at a total degree.
//! [`LaurentSeries`] is the univariate restriction of such objects to a line
//! `t * y0` and is used to compare both sides of the interpolator identity.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, rat, Rational};

/// Exponent vector of a monomial. Ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub SmallVec<[u16; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(e: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(e))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A linear function on `W`, i.e. a vector of `V` viewed as a degree-one
/// element of the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm(pub Vec<Rational>);

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        LinearForm(coeffs)
    }

    pub fn from_ints(v: &[i64]) -> Self {
        LinearForm(v.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        LinearForm(vec![Rational::zero(); n])
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &Rational) -> LinearForm {
        LinearForm(self.0.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, y: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(y)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn to_series(&self, order: u32) -> MultiSeries {
        let n = self.nvars();
        let mut s = MultiSeries::zero(n, order);
        if order >= 1 {
            for (i, c) in self.0.iter().enumerate() {
                if !c.is_zero() {
                    s.terms.insert(Monomial::var(n, i), c.clone());
                }
            }
        }
        s
    }

    /// Splits the form as `scalar * canonical`, where `canonical` has
    /// coprime integer entries and a positive first nonzero entry.
    pub fn canonical(&self) -> Result<(LinearForm, Rational)> {
        if self.is_zero() {
            return Err(Error::ZeroDenominatorForm);
        }
        let lcm = self.0.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let first = ints.iter().find(|x| !x.is_zero()).expect("nonzero form");
        if first.is_negative() {
            g = -g;
        }
        let canon = LinearForm(
            ints.iter()
                .map(|x| Rational::from_integer(x / &g))
                .collect(),
        );
        let scalar = Rational::new(g, lcm);
        Ok((canon, scalar))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Power series in `nvars` variables truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    nvars: usize,
    order: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        Self {
            nvars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, order: u32, c: Rational) -> Self {
        let mut s = Self::zero(nvars, order);
        if !c.is_zero() {
            s.terms.insert(Monomial::one(nvars), c);
        }
        s
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, Rational::one())
    }

    pub fn from_terms(
        nvars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut s = Self::zero(nvars, order);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity");
            s.add_term(m, c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    /// Adds `c * m`, dropping it if beyond the truncation order.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.degree() > self.order {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn truncate(&self, order: u32) -> MultiSeries {
        let order = order.min(self.order);
        MultiSeries {
            nvars: self.nvars,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same terms with a different declared order. Raising the order is
    /// only sound when the caller knows the higher terms are zero.
    pub fn with_order(mut self, order: u32) -> MultiSeries {
        self.order = order;
        self.terms.retain(|m, _| m.degree() <= order);
        self
    }

    pub fn homogeneous_part(&self, degree: u32) -> MultiSeries {
        MultiSeries {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &MultiSeries) {
        assert_eq!(self.nvars, other.nvars, "series arity");
        if other.order < self.order {
            *self = self.truncate(other.order);
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &MultiSeries, c: &Rational) {
        assert_eq!(self.nvars, other.nvars, "series arity");
        if c.is_zero() {
            if other.order < self.order {
                *self = self.truncate(other.order);
            }
            return;
        }
        if other.order < self.order {
            *self = self.truncate(other.order);
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiSeries {
        if c.is_zero() {
            return MultiSeries::zero(self.nvars, self.order);
        }
        MultiSeries {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn neg(&self) -> MultiSeries {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, other: &MultiSeries) -> MultiSeries {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &MultiSeries) -> MultiSeries {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    /// Product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &MultiSeries) -> MultiSeries {
        assert_eq!(self.nvars, other.nvars, "series arity");
        let order = self.order.min(other.order);
        let mut out = MultiSeries::zero(self.nvars, order);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > order {
                break;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > order {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Product with a linear form. The result is known one degree further
    /// than `self`.
    pub fn mul_linear(&self, form: &LinearForm) -> MultiSeries {
        assert_eq!(self.nvars, form.nvars(), "form arity");
        let mut out = MultiSeries::zero(self.nvars, self.order + 1);
        for (m, c) in &self.terms {
            for (i, a) in form.0.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut e = m.clone();
                e.0[i] += 1;
                out.add_term(e, c * a);
            }
        }
        out
    }

    /// Exact quotient by a nonzero linear form; the result is known one
    /// degree less than `self`. Fails when the division leaves a remainder.
    pub fn exact_div_linear(&self, form: &LinearForm) -> Result<MultiSeries> {
        let pivot = form
            .0
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(Error::ZeroDenominatorForm)?;
        if self.order == 0 {
            return if self.is_zero() {
                Ok(MultiSeries::zero(self.nvars, 0))
            } else {
                Err(Error::InconsistentExplicitFormula(
                    "nonzero constant divided by a linear form".into(),
                ))
            };
        }
        // Per homogeneous degree the quotient of an integer polynomial by a
        // primitive integer form is integral (Gauss), so the division runs
        // over the integers.
        let (canon, scalar) = form.canonical()?;
        let ints: Vec<BigInt> = canon.0.iter().map(|c| c.to_integer()).collect();
        let (poly, denom) = IntPoly::from_series(self);
        let q = poly.div_form(&ints, pivot).map_err(|m| {
            Error::InconsistentExplicitFormula(format!(
                "remainder term of degree {} in division by {form}",
                m.degree()
            ))
        })?;
        let factor = Rational::new(BigInt::one(), denom) / scalar;
        let mut quot = MultiSeries::zero(self.nvars, self.order - 1);
        for (m, c) in q.terms {
            quot.add_term(m, Rational::from_integer(c) * &factor);
        }
        Ok(quot)
    }

    /// Substitutes each variable by a linear form in `forms[0].nvars()`
    /// variables, truncating at `order`.
    pub fn compose(&self, forms: &[LinearForm], order: u32) -> MultiSeries {
        assert_eq!(forms.len(), self.nvars, "one form per variable");
        let target = forms.first().map(LinearForm::nvars).unwrap_or(0);
        let order = order.min(self.order);
        let mut out = MultiSeries::zero(target, order);
        // powers[i][e] = forms[i]^e
        let mut powers: Vec<Vec<MultiSeries>> = Vec::with_capacity(forms.len());
        for f in forms {
            let mut p = vec![MultiSeries::one(target, order)];
            for e in 1..=order as usize {
                let next = p[e - 1].mul_linear(f).truncate(order);
                p.push(next);
            }
            powers.push(p);
        }
        for (m, c) in &self.terms {
            let mut acc = MultiSeries::constant(target, order, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    acc = acc.mul(&powers[i][e as usize]);
                }
            }
            out.add_assign_ref(&acc);
        }
        out
    }

    /// Value of the polynomial part at a point.
    pub fn eval(&self, y: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (m, c)| {
            acc + c * monomial_value(m, y)
        })
    }
}

fn monomial_value(m: &Monomial, y: &[Rational]) -> Rational {
    let mut v = Rational::one();
    for (e, yi) in m.0.iter().zip(y) {
        for _ in 0..*e {
            v *= yi;
        }
    }
    v
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}

/// Serialized form of one series term.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub exponents: Vec<u16>,
    pub coeff: String,
}

impl MultiSeries {
    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                exponents: m.0.to_vec(),
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn from_json_terms(nvars: usize, order: u32, terms: &[TermJson]) -> Result<Self> {
        let mut s = MultiSeries::zero(nvars, order);
        for t in terms {
            if t.exponents.len() != nvars {
                return Err(Error::Parse(format!(
                    "term with {} exponents in a {}-variable series",
                    t.exponents.len(),
                    nvars
                )));
            }
            s.add_term(
                Monomial::from_slice(&t.exponents),
                parse_rational(&t.coeff)?,
            );
        }
        Ok(s)
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Coefficients of `z / (1 - e^{-z})` from `z^0` through `z^order`.
pub fn todd_univariate(order: usize) -> Vec<Rational> {
    // (1 - e^{-z}) / z = sum (-1)^r z^r / (r+1)!
    let a: Vec<Rational> = (0..=order)
        .map(|r| {
            let sign = if r % 2 == 0 { 1 } else { -1 };
            Rational::new(BigInt::from(sign), factorial(r as u32 + 1))
        })
        .collect();
    let mut b = vec![Rational::one()];
    for m in 1..=order {
        let mut s = Rational::zero();
        for j in 1..=m {
            s += &a[j] * &b[m - j];
        }
        b.push(-s);
    }
    b
}

/// Coefficients of `T(z) = (td(z) - 1) / z` from `z^0` through `z^order`.
pub fn t_series(order: usize) -> Vec<Rational> {
    todd_univariate(order + 1).into_iter().skip(1).collect()
}

/// `T2(z1, z2) = (T(z1 + z2) - T(z1)) / z2` as a two-variable series.
pub fn t2_series(order: u32) -> MultiSeries {
    let t = t_series(order as usize + 1);
    let mut s = MultiSeries::zero(2, order);
    for i in 0..=order {
        for j in 0..=(order - i) {
            // coefficient of z1^i z2^j is a_{i+j+1} * C(i+j+1, j+1)
            let r = i + j + 1;
            let c = &t[r as usize] * Rational::from_integer(binomial(r, j + 1));
            s.add_term(Monomial::from_slice(&[i as u16, j as u16]), c);
        }
    }
    s
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `sum_r f_r * form^r`, truncated at total degree `order`.
pub fn compose_linear(f: &[Rational], form: &LinearForm, order: u32) -> MultiSeries {
    let n = form.nvars();
    let mut out = MultiSeries::zero(n, order);
    let mut pow = MultiSeries::one(n, order);
    for r in 0..=order as usize {
        if let Some(c) = f.get(r) {
            out.add_scaled(&pow, c);
        } else {
            panic!("univariate series shorter than requested order {order}");
        }
        if r < order as usize {
            pow = pow.mul_linear(form).truncate(order);
        }
    }
    out
}

/// Coefficients of `e^{c z}` through `z^order`.
pub fn exp_coeffs(c: &Rational, order: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut term = Rational::one();
    for r in 0..=order {
        out.push(term.clone());
        term = term * c / rat(r as i64 + 1);
    }
    out
}

/// Truncated univariate Laurent series in `t`, coefficients of
/// `t^low ..= t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    low: i64,
    coeffs: Vec<Rational>,
    order: i64,
}

impl LaurentSeries {
    pub fn zero(order: i64) -> Self {
        Self {
            low: order + 1,
            coeffs: vec![],
            order,
        }
    }

    /// Series with coefficients `coeffs[i]` at `t^(low + i)`, known through
    /// `t^order`.
    pub fn new(low: i64, coeffs: Vec<Rational>, order: i64) -> Self {
        let mut s = Self { low, coeffs, order };
        let keep = (order - low + 1).max(0) as usize;
        s.coeffs.truncate(keep);
        while s.coeffs.len() < keep {
            s.coeffs.push(Rational::zero());
        }
        s.normalize();
        s
    }

    pub fn from_power_series(coeffs: Vec<Rational>, order: i64) -> Self {
        Self::new(0, coeffs, order)
    }

    pub fn constant(c: Rational, order: i64) -> Self {
        Self::new(0, vec![c], order)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = self.order + 1;
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Exponent of the first nonzero coefficient (`order + 1` if zero).
    pub fn valuation(&self) -> i64 {
        self.low
    }

    pub fn pole_order(&self) -> i64 {
        (-self.low).max(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> Rational {
        if k < self.low || k > self.order {
            return Rational::zero();
        }
        self.coeffs[(k - self.low) as usize].clone()
    }

    pub fn truncate(&self, order: i64) -> LaurentSeries {
        let order = order.min(self.order);
        Self::new(self.low, self.coeffs.clone(), order)
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let order = self.order.min(other.order);
        let low = self.low.min(other.low).min(order + 1);
        let coeffs = (low..=order)
            .map(|k| self.coeff(k) + other.coeff(k))
            .collect();
        Self::new(low, coeffs, order)
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> LaurentSeries {
        Self::new(
            self.low,
            self.coeffs.iter().map(|a| a * c).collect(),
            self.order,
        )
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        Self::new(self.low + k, self.coeffs.clone(), self.order + k)
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let order = (self.order + other.low).min(other.order + self.low);
        if self.is_zero() || other.is_zero() {
            return LaurentSeries::zero(order);
        }
        let low = self.low + other.low;
        if order < low {
            return LaurentSeries::zero(order);
        }
        let mut coeffs = vec![Rational::zero(); (order - low + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= coeffs.len() {
                    break;
                }
                coeffs[k] += a * b;
            }
        }
        Self::new(low, coeffs, order)
    }

    /// Coefficients from `t^-pole_order` through `t^order`.
    pub fn coefficients_from_pole(&self) -> Vec<Rational> {
        let start = (-self.pole_order()).min(self.order + 1);
        (start..=self.order).map(|k| self.coeff(k)).collect()
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            pole_order: self.pole_order(),
            order: self.order,
            coeffs: self
                .coefficients_from_pole()
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for k in self.low..=self.order {
            let c = self.coeff(k);
            if !c.is_zero() {
                parts.push(format!("({c})t^{k}"));
            }
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} + O(t^{})", parts.join(" + "), self.order + 1)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LaurentJson {
    pub pole_order: i64,
    pub order: i64,
    pub coeffs: Vec<String>,
}

/// Restriction of a series to the line `t * y0`: the `t^r` coefficient is
/// the value at `y0` of the degree-`r` homogeneous part.
pub fn restrict_to_direction(s: &MultiSeries, y0: &[Rational]) -> LaurentSeries {
    let order = s.order() as usize;
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (m, c) in s.terms() {
        coeffs[m.degree() as usize] += c * monomial_value(m, y0);
    }
    LaurentSeries::from_power_series(coeffs, order as i64)
}

/// `numerator / prod(denominators)` kept unevaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionTerm {
    pub numerator: MultiSeries,
    pub denominators: Vec<LinearForm>,
}

impl RationalFunctionTerm {
    pub fn new(numerator: MultiSeries, denominators: Vec<LinearForm>) -> Self {
        Self {
            numerator,
            denominators,
        }
    }
}

/// Polynomial with integer coefficients, for products that would
/// otherwise renormalize rationals at every step.
struct IntPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPoly {
    /// `series = poly / denom` with `denom` the lcm of coefficient
    /// denominators.
    fn from_series(series: &MultiSeries) -> (IntPoly, BigInt) {
        let denom = series
            .terms
            .values()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let terms = series
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.numer() * (&denom / c.denom())))
            .collect();
        (IntPoly { terms }, denom)
    }

    fn mul_form(&self, form: &[BigInt]) -> IntPoly {
        let mut terms: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (i, a) in form.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut e = m.clone();
                e.0[i] += 1;
                *terms.entry(e).or_insert_with(BigInt::zero) += c * a;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        IntPoly { terms }
    }

    /// Exact quotient by an integer form whose first nonzero entry is at
    /// `pivot`. Lex order with the pivot variable first makes that entry's
    /// monomial the divisor's leading term, so no S-pairs are needed.
    /// Returns the offending monomial if the division is not exact.
    fn div_form(&self, form: &[BigInt], pivot: usize) -> std::result::Result<IntPoly, Monomial> {
        let to_key = |m: &Monomial| -> SmallVec<[u16; 4]> {
            let mut k = SmallVec::with_capacity(m.0.len());
            k.push(m.0[pivot]);
            k.extend(
                m.0.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != pivot)
                    .map(|(_, &e)| e),
            );
            k
        };
        let from_key = |k: &[u16]| -> Monomial {
            let mut m: SmallVec<[u16; 4]> = k[1..].iter().copied().collect();
            m.insert(pivot, k[0]);
            Monomial(m)
        };
        let lead = &form[pivot];
        let rest: Vec<(usize, &BigInt)> = form
            .iter()
            .enumerate()
            .filter(|(i, a)| *i != pivot && !a.is_zero())
            .collect();
        let mut rem: BTreeMap<SmallVec<[u16; 4]>, BigInt> = self
            .terms
            .iter()
            .map(|(m, c)| (to_key(m), c.clone()))
            .collect();
        let mut quot = BTreeMap::new();
        while let Some((k, c)) = rem.pop_last() {
            let (qc, r) = c.div_rem(lead);
            if k[0] == 0 || !r.is_zero() {
                return Err(from_key(&k));
            }
            let mut qm = from_key(&k);
            qm.0[pivot] -= 1;
            for &(i, a) in &rest {
                let mut e = qm.clone();
                e.0[i] += 1;
                match rem.entry(to_key(&e)) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() -= &qc * a;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-(&qc * a));
                    }
                }
            }
            quot.insert(qm, qc);
        }
        Ok(IntPoly { terms: quot })
    }
}

/// Common denominator of a list of terms: the combined numerator as an
/// integer polynomial over `denom`, and the canonical denominator forms.
struct Combined {
    numerator: IntPoly,
    denom: BigInt,
    forms: Vec<(LinearForm, Vec<BigInt>)>,
}

fn combine_integral(terms: &[RationalFunctionTerm], order: u32) -> Result<Combined> {
    if terms.is_empty() {
        return Err(Error::DimensionMismatch("no terms to combine".into()));
    }
    // canonical form -> multiplicity, per term and overall
    let mut canon_terms: Vec<(BTreeMap<LinearForm, usize>, Rational)> = Vec::new();
    let mut common: BTreeMap<LinearForm, usize> = BTreeMap::new();
    for t in terms {
        let mut mult = BTreeMap::new();
        let mut scalar = Rational::one();
        for d in &t.denominators {
            let (c, s) = d.canonical()?;
            scalar *= s;
            *mult.entry(c).or_insert(0) += 1;
        }
        for (c, &m) in &mult {
            let e = common.entry(c.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        canon_terms.push((mult, scalar));
    }
    let total: usize = common.values().sum();
    let target = order + total as u32;
    // Canonical forms have integer entries, so products are carried out
    // over the integers against one common denominator.
    let int_forms: Vec<Vec<BigInt>> = common
        .keys()
        .map(|f| f.0.iter().map(|c| c.to_integer()).collect())
        .collect();
    let mut parts = Vec::with_capacity(terms.len());
    for (t, (mult, scalar)) in terms.iter().zip(&canon_terms) {
        let mut missing = 0;
        let (mut poly, denom) = IntPoly::from_series(&t.numerator.truncate(target));
        for ((form, &m), ints) in common.iter().zip(&int_forms) {
            let have = mult.get(form).copied().unwrap_or(0);
            for _ in have..m {
                poly = poly.mul_form(ints);
                missing += 1;
            }
        }
        if t.numerator.order() + missing < target {
            return Err(Error::DimensionMismatch(format!(
                "term numerator known through degree {} but {} needed",
                t.numerator.order() + missing,
                target
            )));
        }
        poly.terms.retain(|m, _| m.degree() <= target);
        // term = poly / (denom * scalar)
        parts.push((poly, Rational::new(BigInt::one(), denom) / scalar));
    }
    let denom = parts
        .iter()
        .fold(BigInt::one(), |l, (_, f)| l.lcm(f.denom()));
    let mut numerator: BTreeMap<Monomial, BigInt> = BTreeMap::new();
    for (poly, f) in parts {
        let mult = f.numer() * (&denom / f.denom());
        for (m, c) in poly.terms {
            *numerator.entry(m).or_insert_with(BigInt::zero) += c * &mult;
        }
    }
    numerator.retain(|_, c| !c.is_zero());
    let forms = common
        .into_iter()
        .zip(int_forms)
        .flat_map(|((f, m), ints)| std::iter::repeat_n((f, ints), m))
        .collect();
    Ok(Combined {
        numerator: IntPoly { terms: numerator },
        denom,
        forms,
    })
}

fn int_poly_to_series(poly: IntPoly, denom: &BigInt, nvars: usize, order: u32) -> MultiSeries {
    let mut out = MultiSeries::zero(nvars, order);
    for (m, c) in poly.terms {
        out.add_term(m, Rational::new(c, denom.clone()));
    }
    out
}

/// Sums rational-function terms over their least common denominator.
///
/// Denominator forms are compared up to scalar multiples. Each term's
/// numerator must be known through degree `order + (number of its
/// denominator factors)`; the combined numerator is then exact through
/// `order + (number of common factors)`.
pub fn combine_over_common_denominator(
    terms: &[RationalFunctionTerm],
    order: u32,
) -> Result<(MultiSeries, Vec<LinearForm>)> {
    let nvars = terms
        .first()
        .map(|t| t.numerator.nvars())
        .ok_or_else(|| Error::DimensionMismatch("no terms to combine".into()))?;
    let c = combine_integral(terms, order)?;
    let target = order + c.forms.len() as u32;
    let forms = c.forms.into_iter().map(|(f, _)| f).collect();
    Ok((
        int_poly_to_series(c.numerator, &c.denom, nvars, target),
        forms,
    ))
}

/// The sum of rational-function terms when it is a power series: combines
/// over the common denominator and divides it out exactly, failing if any
/// division leaves a remainder. Exact through `order` under the same
/// precondition as [`combine_over_common_denominator`].
pub fn sum_to_series(terms: &[RationalFunctionTerm], order: u32) -> Result<MultiSeries> {
    let nvars = terms
        .first()
        .map(|t| t.numerator.nvars())
        .ok_or_else(|| Error::DimensionMismatch("no terms to combine".into()))?;
    let c = combine_integral(terms, order)?;
    let mut num = c.numerator;
    for (form, ints) in &c.forms {
        let pivot = ints
            .iter()
            .position(|x| !x.is_zero())
            .expect("nonzero form");
        num = num.div_form(ints, pivot).map_err(|m| {
            Error::InconsistentExplicitFormula(format!(
                "remainder term of degree {} in division by {form}",
                m.degree()
            ))
        })?;
    }
    num.terms.retain(|m, _| m.degree() <= order);
    Ok(int_poly_to_series(num, &c.denom, nvars, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn mono(e: &[u16]) -> Monomial {
        Monomial::from_slice(e)
    }

    #[test]
    fn todd_coefficients() {
        let td = todd_univariate(4);
        assert_eq!(
            td,
            vec![rat(1), ratio(1, 2), ratio(1, 12), rat(0), ratio(-1, 720)]
        );
        assert_eq!(todd_univariate(0), vec![rat(1)]);
    }

    #[test]
    fn t_and_t2() {
        assert_eq!(
            t_series(3),
            vec![ratio(1, 2), ratio(1, 12), rat(0), ratio(-1, 720)]
        );
        let t2 = t2_series(4);
        assert_eq!(t2.constant_term(), ratio(1, 12));
        // T2(z1, 0) = T'(z1)
        let t = t_series(6);
        for i in 0..=4u16 {
            assert_eq!(
                t2.coeff(&mono(&[i, 0])),
                &t[i as usize + 1] * rat(i as i64 + 1)
            );
        }
    }

    #[test]
    fn compose_linear_examples() {
        let v1 = LinearForm::from_ints(&[1, 0]);
        let id = vec![rat(0), rat(1), rat(0), rat(0)];
        assert_eq!(compose_linear(&id, &v1, 3), v1.to_series(3));

        let t = t_series(3);
        let s = compose_linear(&t, &v1, 3);
        let want = MultiSeries::from_terms(
            2,
            3,
            [
                (mono(&[0, 0]), ratio(1, 2)),
                (mono(&[1, 0]), ratio(1, 12)),
                (mono(&[3, 0]), ratio(-1, 720)),
            ],
        );
        assert_eq!(s, want);

        let sum = LinearForm::from_ints(&[1, 1]);
        let e = compose_linear(&exp_coeffs(&rat(-1), 2), &sum, 2);
        let want = MultiSeries::from_terms(
            2,
            2,
            [
                (mono(&[0, 0]), rat(1)),
                (mono(&[1, 0]), rat(-1)),
                (mono(&[0, 1]), rat(-1)),
                (mono(&[2, 0]), ratio(1, 2)),
                (mono(&[1, 1]), rat(1)),
                (mono(&[0, 2]), ratio(1, 2)),
            ],
        );
        assert_eq!(e, want);
    }

    #[test]
    fn restrict_examples() {
        let y0 = vec![rat(2), rat(3)];
        assert_eq!(
            restrict_to_direction(&MultiSeries::one(2, 3), &y0),
            LaurentSeries::constant(rat(1), 3)
        );
        let s = MultiSeries::from_terms(2, 3, [(mono(&[1, 0]), rat(1)), (mono(&[0, 2]), rat(1))]);
        let r = restrict_to_direction(&s, &y0);
        assert_eq!(r.coeff(0), rat(0));
        assert_eq!(r.coeff(1), rat(2));
        assert_eq!(r.coeff(2), rat(9));
        assert_eq!(r.coeff(3), rat(0));
        assert!(restrict_to_direction(&MultiSeries::zero(2, 3), &y0).is_zero());
    }

    #[test]
    fn combine_examples() {
        let v1 = LinearForm::from_ints(&[1, 0]);
        let v2 = LinearForm::from_ints(&[0, 1]);
        let single = RationalFunctionTerm::new(MultiSeries::one(2, 3), vec![]);
        let (n, d) = combine_over_common_denominator(&[single], 3).unwrap();
        assert_eq!(n, MultiSeries::one(2, 3));
        assert!(d.is_empty());

        let plus = RationalFunctionTerm::new(MultiSeries::one(2, 4), vec![v1.clone()]);
        let minus = RationalFunctionTerm::new(MultiSeries::one(2, 4).neg(), vec![v1.clone()]);
        let (n, d) = combine_over_common_denominator(&[plus.clone(), minus], 3).unwrap();
        assert!(n.is_zero());
        assert_eq!(d, vec![v1.clone()]);

        let other = RationalFunctionTerm::new(MultiSeries::one(2, 4), vec![v2.clone()]);
        let (n, d) = combine_over_common_denominator(&[plus, other], 3).unwrap();
        assert_eq!(n, v1.add(&v2).to_series(5));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn combine_handles_scalar_multiples() {
        // 1/(2 x) + 1/(-x) = (1 - 2) / (2x) = -1/(2x)
        let a =
            RationalFunctionTerm::new(MultiSeries::one(1, 3), vec![LinearForm::from_ints(&[2])]);
        let b =
            RationalFunctionTerm::new(MultiSeries::one(1, 3), vec![LinearForm::from_ints(&[-1])]);
        let (n, d) = combine_over_common_denominator(&[a, b], 2).unwrap();
        assert_eq!(d, vec![LinearForm::from_ints(&[1])]);
        assert_eq!(n, MultiSeries::constant(1, 3, ratio(-1, 2)));
    }

    #[test]
    fn exact_division() {
        let l = LinearForm::from_ints(&[1, 2]);
        let q = MultiSeries::from_terms(2, 3, [(mono(&[1, 1]), rat(3)), (mono(&[0, 0]), rat(1))]);
        let p = q.mul_linear(&l);
        assert_eq!(p.exact_div_linear(&l).unwrap(), q);
        let bad = MultiSeries::from_terms(2, 3, [(mono(&[1, 0]), rat(1))]);
        assert!(bad
            .exact_div_linear(&LinearForm::from_ints(&[0, 1]))
            .is_err());
    }

    #[test]
    fn laurent_arithmetic() {
        // (1/t)(1 + t) * t = 1 + t
        let a = LaurentSeries::new(-1, vec![rat(1), rat(1)], 0);
        let b = LaurentSeries::new(1, vec![rat(1)], 5);
        let p = a.mul(&b);
        assert_eq!(p.coeff(0), rat(1));
        assert_eq!(p.coeff(1), rat(1));
        assert_eq!(p.order(), 1);
        assert_eq!(a.pole_order(), 1);
        let z = a.sub(&a);
        assert!(z.is_zero());
    }

    #[test]
    fn canonical_forms() {
        let f = LinearForm::new(vec![ratio(-2, 3), ratio(4, 3)]);
        let (c, s) = f.canonical().unwrap();
        assert_eq!(c, LinearForm::from_ints(&[1, -2]));
        assert_eq!(s, ratio(-2, 3));
        assert!(LinearForm::zero(2).canonical().is_err());
    }
}

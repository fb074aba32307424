//! Exact rational scalars, dense rational matrices and integer lattice
//! algebra (Hermite normal form, saturated bases, cone indices).
//!
//! Pairing convention: `<w, v> = sum_i w_i v_i` in the standard coordinates
//! of `W` and `V`. Every other module inherits it.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Integer lattice vector (a point of `M` or `N`).
pub type IntVec = Vec<i64>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

pub fn to_int(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn int_vec_to_rat(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn pair_int(w: &[i64], v: &[i64]) -> i64 {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn pair_rat(w: &[Rational], v: &[Rational]) -> Rational {
    w.iter()
        .zip(v)
        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

/// `<w, v>` for an integer `w` and a rational `v`.
pub fn pair_mixed(w: &[i64], v: &[Rational]) -> Rational {
    w.iter()
        .zip(v)
        .fold(Rational::zero(), |acc, (&a, b)| acc + b * BigInt::from(a))
}

pub fn fmt_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_int_rows(rows: &[IntVec], cols: usize) -> Self {
        Self::from_rows(rows.iter().map(|r| int_vec_to_rat(r)).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Rational> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn col(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| pair_rat(&self.data[r * self.cols..(r + 1) * self.cols], v))
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &piv;
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Rational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c).clone());
            }
        }
        Some(inv)
    }

    /// Exact solution of `A x = b`. Free variables are set to zero when the
    /// system is underdetermined.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (r, br) in b.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, br.clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red.get(r, self.cols).clone();
        }
        Ok(x)
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -red.get(r, f).clone();
                }
                v
            })
            .collect()
    }
}

/// Rank of a list of rational vectors of equal length `dim`.
pub fn rank_of(vectors: &[Vec<Rational>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec(), dim).rank()
}

pub fn rank_of_int(vectors: &[IntVec], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_int_rows(vectors, dim).rank()
}

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[IntVec], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (c, &x) in row.iter().enumerate() {
                m.data[r * cols + c] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn to_rational(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect(),
        }
    }

    pub fn to_i64_rows(&self) -> Option<Vec<IntVec>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_i64()).collect())
            .collect()
    }

    /// Replaces columns `a`, `b` by `(x a + y b, s a + t b)`.
    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, s: &BigInt, t: &BigInt) {
        for r in 0..self.rows {
            let ca = self.get(r, a).clone();
            let cb = self.get(r, b).clone();
            self.set(r, a, x * &ca + y * &cb);
            self.set(r, b, s * &ca + t * &cb);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// `col[dst] -= q * col[src]`
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, dst) - q * self.get(r, src);
            self.set(r, dst, v);
        }
    }
}

/// Column Hermite normal form: returns `(H, U)` with `H = A U`, `U`
/// unimodular and `H` in lower column-echelon form with positive pivots and
/// entries left of each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.cols);
    let mut pc = 0;
    for r in 0..h.rows {
        if pc == h.cols {
            break;
        }
        for j in pc + 1..h.cols {
            if h.get(r, j).is_zero() {
                continue;
            }
            let p = h.get(r, pc).clone();
            let q = h.get(r, j).clone();
            let eg = p.extended_gcd(&q);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let s = -(&q / &g);
            let t = &p / &g;
            h.combine_cols(pc, j, &x, &y, &s, &t);
            u.combine_cols(pc, j, &x, &y, &s, &t);
        }
        if h.get(r, pc).is_zero() {
            continue;
        }
        if h.get(r, pc).is_negative() {
            h.negate_col(pc);
            u.negate_col(pc);
        }
        let piv = h.get(r, pc).clone();
        for j in 0..pc {
            let q = h.get(r, j).div_floor(&piv);
            if !q.is_zero() {
                h.sub_col(j, pc, &q);
                u.sub_col(j, pc, &q);
            }
        }
        pc += 1;
    }
    (h, u)
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Result<IntVec> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / g).collect())
}

/// A lattice basis of `Z^n ∩ span(vectors)` together with the coordinates
/// of each input vector in that basis.
#[derive(Clone, Debug)]
pub struct SpanLattice {
    /// Basis vectors (rows), `rank` of them.
    pub basis: Vec<IntVec>,
    /// `coords[i]` expresses `vectors[i]` in `basis`.
    pub coords: Vec<IntVec>,
}

impl SpanLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Computes the saturated lattice of the span of `vectors` (which may be
/// dependent) in `Z^dim`.
pub fn span_lattice(vectors: &[IntVec], dim: usize) -> Result<SpanLattice> {
    if vectors.is_empty() {
        return Ok(SpanLattice {
            basis: vec![],
            coords: vec![],
        });
    }
    // Rows of A are the input vectors: A U = [H 0], so A = [H 0] U^{-1} and
    // the first `rank` rows of U^{-1} form a basis of the saturated span.
    let a = IntMatrix::from_rows(vectors, dim);
    let (h, u) = hermite_normal_form(&a);
    let rank = (0..dim)
        .filter(|&c| (0..h.rows()).any(|r| !h.get(r, c).is_zero()))
        .count();
    let uinv = u
        .to_rational()
        .inverse()
        .expect("unimodular transform is invertible");
    let mut basis = Vec::with_capacity(rank);
    for r in 0..rank {
        let row: Option<IntVec> = uinv.row(r).iter().map(to_int).collect();
        basis.push(row.ok_or_else(|| Error::TooLarge("lattice basis entry".into()))?);
    }
    let coords: Option<Vec<IntVec>> = (0..vectors.len())
        .map(|i| (0..rank).map(|c| h.get(i, c).to_i64()).collect())
        .collect();
    Ok(SpanLattice {
        basis,
        coords: coords.ok_or_else(|| Error::TooLarge("lattice coordinate".into()))?,
    })
}

/// Index of the sublattice generated by independent `generators` inside the
/// saturated lattice of their span; 1 iff the generators are part of a
/// lattice basis.
pub fn cone_index(generators: &[IntVec], dim: usize) -> Result<u64> {
    let lat = span_lattice(generators, dim)?;
    if lat.rank() < generators.len() {
        return Err(Error::DependentGenerators);
    }
    let coords = Matrix::from_int_rows(&lat.coords, lat.rank());
    let det = coords.det().abs();
    det.to_integer()
        .to_u64()
        .ok_or_else(|| Error::TooLarge("cone index".into()))
}

/// Dual basis of a lattice basis: returns `v_j` with `<w_i, v_j> = δ_ij`.
pub fn dual_basis(basis: &[IntVec]) -> Result<Vec<IntVec>> {
    let n = basis.len();
    if basis.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch(
            "dual basis needs n vectors in Z^n".into(),
        ));
    }
    let m = Matrix::from_int_rows(basis, n);
    let det = m.det();
    if det.abs() != Rational::one() {
        return Err(Error::NotUnimodular(det.abs().to_string()));
    }
    let inv = m.inverse().ok_or(Error::DependentGenerators)?;
    (0..n)
        .map(|j| {
            inv.col(j)
                .iter()
                .map(to_int)
                .collect::<Option<IntVec>>()
                .ok_or_else(|| Error::NotUnimodular("non-integral inverse".into()))
        })
        .collect()
}

/// Nonzero lattice points of the half-open fundamental parallelepiped
/// `{ sum λ_i g_i : 0 <= λ_i < 1 }` of independent generators, with their
/// coefficient vectors `λ`.
pub fn parallelepiped_points(
    generators: &[IntVec],
    dim: usize,
) -> Result<Vec<(IntVec, Vec<Rational>)>> {
    let lat = span_lattice(generators, dim)?;
    let k = generators.len();
    if lat.rank() < k {
        return Err(Error::DependentGenerators);
    }
    // Columns of C^T are the generator coordinates; coset representatives
    // of Z^k / C^T Z^k come from the diagonal of its HNF.
    let ct: Vec<IntVec> = (0..k)
        .map(|r| (0..k).map(|c| lat.coords[c][r]).collect())
        .collect();
    let (h, _) = hermite_normal_form(&IntMatrix::from_rows(&ct, k));
    let diag: Vec<i64> = (0..k)
        .map(|i| {
            h.get(i, i)
                .to_i64()
                .ok_or_else(|| Error::TooLarge("index".into()))
        })
        .collect::<Result<_>>()?;
    let total: i64 = diag.iter().product();
    if total > 2_000_000 {
        return Err(Error::TooLarge(format!(
            "parallelepiped with {total} points"
        )));
    }
    let ct_rat = Matrix::from_int_rows(&ct, k);
    let ct_inv = ct_rat.inverse().ok_or(Error::DependentGenerators)?;
    let mut out = Vec::new();
    let mut x = vec![0i64; k];
    loop {
        if x.iter().any(|&v| v != 0) {
            let lambda: Vec<Rational> = ct_inv
                .mul_vec(&int_vec_to_rat(&x))
                .into_iter()
                .map(|l| &l - l.floor())
                .collect();
            if lambda.iter().any(|l| !l.is_zero()) {
                let mut p = vec![Rational::zero(); dim];
                for (g, l) in generators.iter().zip(&lambda) {
                    for (pi, &gi) in p.iter_mut().zip(g) {
                        *pi += l * BigInt::from(gi);
                    }
                }
                let p: IntVec = p
                    .iter()
                    .map(to_int)
                    .collect::<Option<_>>()
                    .expect("parallelepiped point is integral");
                out.push((p, lambda));
            }
        }
        // odometer over 0 <= x_i < diag_i
        let mut i = 0;
        loop {
            if i == k {
                out.sort();
                out.dedup_by(|a, b| a.0 == b.0);
                return Ok(out);
            }
            x[i] += 1;
            if x[i] < diag[i] {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

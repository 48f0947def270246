//! Exact vectors and matrices over [`Rational`] and over `BigInt`.
//!
//! Provides fraction-free (Bareiss) determinants, a deterministic row-style
//! Hermite normal form with its unimodular transform, saturated integer
//! kernel bases, Smith normal form diagonals, and reduced row echelon form
//! over the rationals. All algorithms are exact; none allocate floats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Dense rational vector. Ordering is lexicographic, which the geometry code
/// uses for canonical vertex orderings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct RatVec(Vec<Rational>);

impl RatVec {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rational::zero(); dim])
    }

    /// Standard basis vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        RatVec(entries.iter().map(|&n| Rational::from(n)).collect())
    }

    pub fn from_bigints(entries: &[BigInt]) -> Self {
        RatVec(entries.iter().map(Rational::from).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn at(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn dot(&self, other: &RatVec) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dims");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Dot product against an integer vector.
    pub fn dot_int(&self, other: &[BigInt]) -> Rational {
        assert_eq!(self.dim(), other.len(), "dot of mismatched dims");
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| a * &Rational::from(b))
            .sum()
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim());
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim());
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rational) -> RatVec {
        RatVec(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> RatVec {
        RatVec(self.0.iter().map(|a| -a).collect())
    }

    /// All entries integral?
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rational::is_integer)
    }

    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        self.0.iter().map(Rational::to_integer).collect()
    }

    /// New vector with `last` appended; used to lift base points to graphs.
    pub fn with_appended(&self, last: Rational) -> RatVec {
        let mut v = self.0.clone();
        v.push(last);
        RatVec(v)
    }

    /// Split off the final coordinate.
    pub fn split_last(&self) -> (RatVec, Rational) {
        assert!(!self.0.is_empty());
        let (last, head) = self.0.split_last().unwrap();
        (RatVec(head.to_vec()), last.clone())
    }
}

impl From<Vec<Rational>> for RatVec {
    fn from(v: Vec<Rational>) -> Self {
        RatVec(v)
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(RatMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| Rational::from(n)).collect())
                .collect(),
        )
        .expect("literal rows are rectangular")
    }

    pub fn from_vec_rows(rows: Vec<RatVec>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.dim(), cols);
            data.extend(row.0);
        }
        RatMat { rows: r, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> RatVec {
        RatVec(self.row(r).to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    /// Matrix product. Skips zero entries of `self`, which keeps products of
    /// the sparse derivation matrices cheap.
    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    *out.at_mut(i, j) += &prod;
                }
            }
        }
        out
    }

    /// `self * v` with `v` a column vector.
    pub fn mul_vec(&self, v: &RatVec) -> RatVec {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let mut out = RatVec::zeros(self.rows);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                let prod = a * v.at(k);
                out.0[i] += &prod;
            }
        }
        out
    }

    /// Exact determinant via fraction-free Bareiss elimination: each row is
    /// scaled to integers first, then the integer Bareiss recurrence runs
    /// with exact divisions only.
    pub fn det(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        let mut scale = BigInt::one();
        let mut m: Vec<BigInt> = Vec::with_capacity(n * n);
        for r in 0..n {
            let mut l = BigInt::one();
            for c in 0..n {
                l = l.lcm(self.at(r, c).denom());
            }
            let lr = Rational::from(&l);
            for c in 0..n {
                let scaled = self.at(r, c) * &lr;
                m.push(scaled.to_integer().expect("row scaled to integers"));
            }
            scale *= l;
        }
        let d = bareiss_int_det(&mut m, n);
        Ok(Rational::new(d, scale))
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().1.len()
    }

    /// Reduced row echelon form (pivots 1, pivot columns cleared). Returns
    /// the matrix and the pivot column indices. Deterministic: the first
    /// nonzero entry in each column is the pivot.
    pub fn rref(mut self) -> (RatMat, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.at(r, c).recip();
            if !(self.at(r, c) == &Rational::one()) {
                for j in c..self.cols {
                    if self.at(r, j).is_zero() {
                        continue;
                    }
                    let v = self.at(r, j) * &inv;
                    *self.at_mut(r, j) = v;
                }
            }
            for i in 0..self.rows {
                if i == r || self.at(i, c).is_zero() {
                    continue;
                }
                let f = self.at(i, c).clone();
                for j in c..self.cols {
                    if self.at(r, j).is_zero() {
                        continue;
                    }
                    let sub = self.at(r, j) * &f;
                    *self.at_mut(i, j) -= &sub;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (self, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of the rational nullspace `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<RatVec> {
        let (r, pivots) = self.clone().rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for (free, pivot) in pivot_set.iter().enumerate() {
            if pivot.is_some() {
                continue;
            }
            let mut x = RatVec::zeros(self.cols);
            x.0[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x.0[pc] = -r.at(row, free);
            }
            basis.push(x);
        }
        basis
    }

    /// Unique solution of `self * x = b` for square `self`; `None` when the
    /// system is singular or inconsistent.
    pub fn solve_unique(&self, b: &RatVec) -> Option<RatVec> {
        assert_eq!(self.rows, b.dim(), "solve shape mismatch");
        let n = self.cols;
        let mut aug = RatMat::zeros(self.rows, n + 1);
        for r in 0..self.rows {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n) = b.at(r).clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.contains(&n) {
            return None; // inconsistent
        }
        if pivots.len() < n {
            return None; // underdetermined
        }
        let mut x = RatVec::zeros(n);
        for (row, &c) in pivots.iter().enumerate() {
            x.0[c] = red.at(row, n).clone();
        }
        Some(x)
    }
}

/// Bareiss determinant of an `n x n` integer matrix held in row-major `m`.
/// All divisions are exact.
fn bareiss_int_det(m: &mut [BigInt], n: usize) -> BigInt {
    let idx = |r: usize, c: usize| r * n + c;
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[idx(r, k)].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            for c in 0..n {
                m.swap(idx(p, c), idx(k, c));
            }
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t = &m[idx(i, j)] * &m[idx(k, k)] - &m[idx(i, k)] * &m[idx(k, j)];
                m[idx(i, j)] = &t / &prev;
            }
            m[idx(i, k)] = BigInt::zero();
        }
        prev = m[idx(k, k)].clone();
    }
    let d = m[idx(n - 1, n - 1)].clone();
    if sign < 0 { -d } else { d }
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(IntMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| BigInt::from(n)).collect())
                .collect(),
        )
        .expect("literal rows are rectangular")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    /// `self * v` with `v` a column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.at(i, k) * &v[k]).sum())
            .collect()
    }

    pub fn to_rat_mat(&self) -> RatMat {
        let mut m = RatMat::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.at_mut(r, c) = Rational::from(self.at(r, c));
            }
        }
        m
    }

    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.data.clone();
        Ok(bareiss_int_det(&mut m, self.rows))
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().is_ok_and(|d| d.abs().is_one())
    }

    /// Row-style Hermite normal form. Returns `(h, u)` with `h = u * self`,
    /// `det(u) = +-1`, pivots positive, zeros below each pivot, and entries
    /// above each pivot reduced into `[0, pivot)`. Deterministic.
    pub fn hnf(&self) -> (IntMat, IntMat) {
        let mut h = self.clone();
        let mut u = IntMat::identity(self.rows);
        let mut pivot_r = 0;
        for col in 0..self.cols {
            if pivot_r == self.rows {
                break;
            }
            // Euclid on the column entries at rows pivot_r.. until one
            // nonzero entry remains.
            loop {
                let mut best: Option<usize> = None;
                for r in pivot_r..self.rows {
                    if h.at(r, col).is_zero() {
                        continue;
                    }
                    best = match best {
                        None => Some(r),
                        Some(b) if h.at(r, col).abs() < h.at(b, col).abs() => Some(r),
                        keep => keep,
                    };
                }
                let Some(b) = best else { break };
                h.swap_rows(pivot_r, b);
                u.swap_rows(pivot_r, b);
                let mut all_cleared = true;
                for r in (pivot_r + 1)..self.rows {
                    if h.at(r, col).is_zero() {
                        continue;
                    }
                    // truncating quotient: remainder strictly smaller in |.|
                    let q = h.at(r, col) / h.at(pivot_r, col);
                    if !q.is_zero() {
                        h.row_sub(r, pivot_r, &q);
                        u.row_sub(r, pivot_r, &q);
                    }
                    if !h.at(r, col).is_zero() {
                        all_cleared = false;
                    }
                }
                if all_cleared {
                    break;
                }
            }
            if h.at(pivot_r, col).is_zero() {
                continue;
            }
            if h.at(pivot_r, col).is_negative() {
                h.negate_row(pivot_r);
                u.negate_row(pivot_r);
            }
            // reduce entries above the pivot into [0, pivot)
            for r in 0..pivot_r {
                let q = h.at(r, col).div_floor(h.at(pivot_r, col));
                if !q.is_zero() {
                    h.row_sub(r, pivot_r, &q);
                    u.row_sub(r, pivot_r, &q);
                }
            }
            pivot_r += 1;
        }
        (h, u)
    }

    /// Basis of the saturated integer kernel `{x in Z^cols : self * x = 0}`,
    /// returned as the columns of the result. The basis extends to a basis
    /// of the ambient lattice (all Smith invariants 1) and is HNF-canonical.
    pub fn kernel_basis(&self) -> IntMat {
        let (h, u) = self.transpose().hnf();
        // zero rows of h correspond to rows of u annihilated by self
        let mut kernel_rows: Vec<Vec<BigInt>> = Vec::new();
        for r in 0..h.rows {
            if h.row(r).iter().all(Zero::is_zero) {
                kernel_rows.push(u.row(r).to_vec());
            }
        }
        if kernel_rows.is_empty() {
            return IntMat::zeros(self.cols, 0);
        }
        let raw = IntMat::from_rows(kernel_rows).expect("rectangular");
        let (canon, _) = raw.hnf();
        canon.transpose()
    }

    /// Diagonal of the Smith normal form: nonnegative, each entry dividing
    /// the next, zeros trailing. Transforms are not tracked.
    pub fn snf_diagonal(&self) -> Vec<BigInt> {
        let mut m = self.clone();
        let n = m.rows.min(m.cols);
        let mut diag = Vec::with_capacity(n);
        let mut t = 0;
        while t < n {
            // locate minimal nonzero |entry| in the trailing submatrix
            let mut best: Option<(usize, usize)> = None;
            for r in t..m.rows {
                for c in t..m.cols {
                    if m.at(r, c).is_zero() {
                        continue;
                    }
                    best = match best {
                        None => Some((r, c)),
                        Some((br, bc)) if m.at(r, c).abs() < m.at(br, bc).abs() => Some((r, c)),
                        keep => keep,
                    };
                }
            }
            let Some((br, bc)) = best else {
                break; // all remaining zero
            };
            m.swap_rows(t, br);
            m.swap_cols(t, bc);
            // clear row and column t by exact Euclid steps
            let mut dirty = false;
            for r in (t + 1)..m.rows {
                if m.at(r, t).is_zero() {
                    continue;
                }
                let q = m.at(r, t) / m.at(t, t);
                m.row_sub(r, t, &q);
                if !m.at(r, t).is_zero() {
                    dirty = true;
                }
            }
            for c in (t + 1)..m.cols {
                if m.at(t, c).is_zero() {
                    continue;
                }
                let q = m.at(t, c) / m.at(t, t);
                m.col_sub(c, t, &q);
                if !m.at(t, c).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue; // smaller remainders appeared; repeat with new min
            }
            // divisibility: fold any non-divisible entry into row t
            let pivot = m.at(t, t).clone();
            let mut fixed = true;
            'scan: for r in (t + 1)..m.rows {
                for c in (t + 1)..m.cols {
                    if !(m.at(r, c) % &pivot).is_zero() {
                        let one = BigInt::from(-1);
                        m.row_sub(t, r, &one); // row_t += row_r
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if !fixed {
                continue;
            }
            diag.push(pivot.abs());
            t += 1;
        }
        while diag.len() < n {
            diag.push(BigInt::zero());
        }
        diag
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row_a -= q * row_b`
    fn row_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        for c in 0..self.cols {
            let sub = q * self.at(b, c);
            *self.at_mut(a, c) -= sub;
        }
    }

    /// `col_a -= q * col_b`
    fn col_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        for r in 0..self.rows {
            let sub = q * self.at(r, b);
            *self.at_mut(r, a) -= sub;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.at(r, c).clone();
            *self.at_mut(r, c) = v;
        }
    }
}

/// gcd of a slice; 0 for an empty or all-zero slice.
pub fn gcd_slice(values: &[BigInt]) -> BigInt {
    values
        .iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Scale a rational vector to a primitive integer vector pointing the same
/// way; the all-zero vector is rejected by assertion.
pub fn primitive_direction(v: &[Rational]) -> Vec<BigInt> {
    assert!(v.iter().any(|x| !x.is_zero()), "zero vector has no direction");
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let lr = Rational::from(&l);
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * &lr).to_integer().expect("cleared denominators"))
        .collect();
    let g = gcd_slice(&ints);
    ints.into_iter().map(|x| x / &g).collect()
}

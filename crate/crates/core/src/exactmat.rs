//! Exact integer and rational matrices.
//!
//! Normal forms follow the column convention used throughout the crate: a
//! lattice is the integer span of the columns of a matrix, so the Hermite form
//! is obtained by unimodular column operations.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

/// Column Hermite normal form.
///
/// `h` is `d x rank`; `m * u` equals `h` followed by `n - rank` zero columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Row index of the pivot of each column of `h`, strictly increasing.
    pub pivot_rows: Vec<usize>,
}

/// Smith normal form with `u * m * v == s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonzero invariant factors `d_1 | d_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }
}

/// `(g, s, t)` with `s*a + t*b == g == gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &BigInt::one())
    }

    pub fn scalar(n: usize, k: &BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = k.clone();
        }
        m
    }

    /// Builds a matrix from `i64` rows. Panics on ragged input.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| BigInt::from(x))).collect();
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
        }
        let n = rows.len();
        Ok(IntMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are `columns`, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn select_columns(&self, cols: std::ops::Range<usize>) -> Self {
        let cs: Vec<_> = cols.map(|j| self.column(j)).collect();
        Self::from_columns(self.rows, &cs).expect("column lengths agree")
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut cs = self.columns();
        cs.extend(other.columns());
        Self::from_columns(self.rows, &cs)
    }

    pub fn neg(&self) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Fraction-free Bareiss determinant.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Square with determinant `+-1`.
    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    /// Integer inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if !self.is_unimodular() {
            return Err(Error::InvalidArgument("matrix is not unimodular".into()));
        }
        self.to_rat().inverse()?.to_int().ok_or_else(|| Error::InvariantViolation("inverse of unimodular matrix is not integral".into()))
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `col[dst] -= q * col[src]`.
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * q;
            self.data[i * self.cols + dst] -= v;
        }
    }

    /// `row[dst] -= q * row[src]`.
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * q;
            self.data[dst * self.cols + j] -= v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// `(col[a], col[b]) <- (s col[a] + t col[b], p col[a] + q col[b])`.
    fn col_combine(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
        for i in 0..self.rows {
            let x = self.get(i, a).clone();
            let y = self.get(i, b).clone();
            self.set(i, a, s * &x + t * &y);
            self.set(i, b, p * &x + q * &y);
        }
    }

    /// Column Hermite normal form; see [`Hnf`].
    ///
    /// Pivots are positive, columns are lower triangular with strictly
    /// increasing pivot rows, and entries left of a pivot lie in `[0, pivot)`.
    pub fn hnf(&self) -> Hnf {
        let (d, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntMatrix::identity(n);
        let mut pivot_rows = Vec::new();
        let mut c = 0;
        for i in 0..d {
            if c == n {
                break;
            }
            for j in c + 1..n {
                if a.get(i, j).is_zero() {
                    continue;
                }
                if a.get(i, c).is_zero() {
                    a.swap_cols(c, j);
                    u.swap_cols(c, j);
                    continue;
                }
                let (x, y) = (a.get(i, c).clone(), a.get(i, j).clone());
                let (g, s, t) = ext_gcd(&x, &y);
                let (p, q) = (-(&y / &g), &x / &g);
                a.col_combine(c, j, &s, &t, &p, &q);
                u.col_combine(c, j, &s, &t, &p, &q);
            }
            if a.get(i, c).is_zero() {
                continue;
            }
            if a.get(i, c).is_negative() {
                a.negate_col(c);
                u.negate_col(c);
            }
            let piv = a.get(i, c).clone();
            for k in 0..c {
                let q = a.get(i, k).div_floor(&piv);
                a.col_axpy(k, c, &q);
                u.col_axpy(k, c, &q);
            }
            pivot_rows.push(i);
            c += 1;
        }
        Hnf { h: a.select_columns(0..c), u, pivot_rows }
    }

    /// Smith normal form; see [`Snf`].
    pub fn snf(&self) -> Snf {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        for t in 0..m.min(n) {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        let x = a.get(i, j);
                        if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return Snf { s: a, u, v };
                };
                a.swap_rows(t, bi);
                u.swap_rows(t, bi);
                a.swap_cols(t, bj);
                v.swap_cols(t, bj);
                let piv = a.get(t, t).clone();
                let mut clean = true;
                for i in t + 1..m {
                    let q = a.get(i, t) / &piv;
                    a.row_axpy(i, t, &q);
                    u.row_axpy(i, t, &q);
                    clean &= a.get(i, t).is_zero();
                }
                for j in t + 1..n {
                    let q = a.get(t, j) / &piv;
                    a.col_axpy(j, t, &q);
                    v.col_axpy(j, t, &q);
                    clean &= a.get(t, j).is_zero();
                }
                if !clean {
                    continue;
                }
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a.get(i, j).is_multiple_of(&piv)));
                match bad {
                    Some(i) => {
                        let minus_one = -BigInt::one();
                        a.row_axpy(t, i, &minus_one);
                        u.row_axpy(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
        }
        Snf { s: a, u, v }
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    /// Panics on a dimension mismatch; use [`IntMatrix::mul`] to get an error.
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        IntMatrix::mul(self, rhs).expect("matrix dimensions agree")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
        }
        let n = rows.len();
        Ok(RatMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(BigRational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect())
    }

    /// `self^k` by repeated squaring; `k == 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let mut base = self.clone();
        let mut acc = RatMatrix::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Row-reduced echelon form; returns the reduced matrix, its rank and sign of the permutation.
    fn eliminate(&self) -> (Vec<Vec<BigRational>>, usize, bool) {
        let mut a = self.to_rows();
        let mut rank = 0;
        let mut odd = false;
        for j in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !a[i][j].is_zero()) else { continue };
            if p != rank {
                a.swap(p, rank);
                odd = !odd;
            }
            for i in rank + 1..self.rows {
                if a[i][j].is_zero() {
                    continue;
                }
                let f = &a[i][j] / &a[rank][j];
                for k in j..self.cols {
                    let v = &f * &a[rank][k];
                    a[i][k] -= v;
                }
            }
            rank += 1;
        }
        (a, rank, odd)
    }

    pub fn det(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let (a, rank, odd) = self.eliminate();
        if rank < self.rows {
            return Ok(BigRational::zero());
        }
        let d = (0..self.rows).fold(BigRational::one(), |acc, i| acc * &a[i][i]);
        Ok(if odd { -d } else { d })
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = RatMatrix::identity(n).to_rows();
        for j in 0..n {
            let p = (j..n).find(|&i| !a[i][j].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap(p, j);
            inv.swap(p, j);
            let f = a[j][j].recip();
            for k in 0..n {
                a[j][k] *= &f;
                inv[j][k] *= &f;
            }
            for i in 0..n {
                if i == j || a[i][j].is_zero() {
                    continue;
                }
                let g = a[i][j].clone();
                for k in 0..n {
                    let x = &g * &a[j][k];
                    a[i][k] -= x;
                    let y = &g * &inv[j][k];
                    inv[i][k] -= y;
                }
            }
        }
        RatMatrix::from_rows(inv)
    }

    /// Integer matrix with the same entries, if all entries are integers.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let data: Option<Vec<BigInt>> = self.data.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
        data.map(|data| IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    /// Panics on a dimension mismatch; use [`RatMatrix::mul`] to get an error.
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        RatMatrix::mul(self, rhs).expect("matrix dimensions agree")
    }
}

/// Inverse of a rational matrix; raises [`Error::SingularMatrix`] on a zero determinant.
pub fn rat_inverse(m: &RatMatrix) -> Result<RatMatrix> {
    m.inverse()
}

/// Parses an integer written in decimal.
pub fn parse_int(s: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("`{s}` is not an integer")))
}

/// Parses `p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn format_rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn fmt_rows<T>(f: &mut fmt::Formatter<'_>, rows: usize, cols: usize, get: impl Fn(usize, usize) -> T) -> fmt::Result
where
    T: fmt::Display,
{
    write!(f, "[")?;
    for i in 0..rows {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "[")?;
        for j in 0..cols {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", get(i, j))?;
        }
        write!(f, "]")?;
    }
    write!(f, "]")
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rows(f, self.rows, self.cols, |i, j| self.get(i, j).clone())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rows(f, self.rows, self.cols, |i, j| format_rat(self.get(i, j)))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A JSON scalar holding an exact number: either a decimal string or an integer literal.
#[derive(Deserialize)]
#[serde(untagged)]
enum NumToken {
    Str(String),
    Int(i64),
}

impl NumToken {
    fn into_string(self) -> String {
        match self {
            NumToken::Str(s) => s,
            NumToken::Int(i) => i.to_string(),
        }
    }
}

pub(crate) fn int_to_string_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Serializes an integer as a decimal string.
pub fn serialize_int<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Serializes integers as decimal strings.
pub fn serialize_ints<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(ToString::to_string))
}

pub(crate) fn deserialize_int_rows<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<Vec<BigInt>>, D::Error> {
    let raw: Vec<Vec<NumToken>> = Vec::deserialize(de)?;
    raw.into_iter()
        .map(|r| r.into_iter().map(|t| parse_int(&t.into_string()).map_err(D::Error::custom)).collect())
        .collect()
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        int_to_string_rows(&self.to_rows()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        IntMatrix::from_rows(deserialize_int_rows(de)?).map_err(D::Error::custom)
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(format_rat).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<Vec<NumToken>> = Vec::deserialize(de)?;
        let rows: std::result::Result<Vec<Vec<BigRational>>, _> = raw
            .into_iter()
            .map(|r| r.into_iter().map(|t| parse_rat(&t.into_string()).map_err(D::Error::custom)).collect())
            .collect();
        RatMatrix::from_rows(rows?).map_err(D::Error::custom)
    }
}

/// Converts a small integer to `i64`, if it fits.
pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

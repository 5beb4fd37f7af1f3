//! Dense exact linear algebra over a small prime field.
//!
//! Every diagram chase in the crate bottoms out here: morphisms are matrices,
//! subobjects are [`Subspace`]s in reduced column echelon form, and lifting
//! problems are linear systems handed to [`solve`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated prime modulus. Products of two residues must fit in `u32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub const MAX: u32 = 65_521;

    pub fn new(p: u32) -> Result<Self> {
        if p > Self::MAX || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        s - self.0 * u32::from(s >= self.0)
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.0 - b)
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.0)) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero in F_{}", self.0);
        self.pow(a, self.0 - 2)
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(i64::from(self.0)) as u32
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    modulus: Prime,
}

impl FpScalar {
    pub fn new(value: i64, modulus: Prime) -> Self {
        FpScalar {
            value: modulus.reduce(value),
            modulus,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| FpScalar {
            value: self.modulus.inv(self.value),
            modulus: self.modulus,
        })
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.modulus, rhs.modulus, "scalar modulus mismatch");
        FpScalar {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.modulus, rhs.modulus, "scalar modulus mismatch");
        FpScalar {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.modulus, rhs.modulus, "scalar modulus mismatch");
        FpScalar {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}[", self.p)?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

impl Matrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        Matrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        Matrix::from_fn(p, n, n, |r, c| u32::from(r == c))
    }

    pub fn from_fn(p: Prime, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % p.get());
            }
        }
        Matrix { p, rows, cols, data }
    }

    /// Builds a matrix from rows of (possibly negative) integers, reducing mod p.
    pub fn from_rows<R: AsRef<[i64]>>(p: Prime, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::dim("from_rows", "ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| p.reduce(v)))
            .collect();
        Ok(Matrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds an `nrows × k` matrix whose columns are the given vectors.
    pub fn from_columns(p: Prime, nrows: usize, columns: &[Vec<u32>]) -> Self {
        Matrix::from_fn(p, nrows, columns.len(), |r, c| columns[c][r])
    }

    pub fn column_vector(p: Prime, v: &[u32]) -> Self {
        Matrix::from_fn(p, v.len(), 1, |r, _| v[r])
    }

    #[inline]
    pub fn p(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn entry(&self, r: usize, c: usize) -> FpScalar {
        FpScalar {
            value: self.get(r, c),
            modulus: self.p,
        }
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.p, self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Row-major flattening into a single column.
    pub fn vectorize(&self) -> Vec<u32> {
        self.data.clone()
    }

    pub fn from_vectorized(p: Prime, rows: usize, cols: usize, v: &[u32]) -> Matrix {
        assert_eq!(v.len(), rows * cols);
        Matrix {
            p,
            rows,
            cols,
            data: v.to_vec(),
        }
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let s = s % self.p.get();
        Matrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| self.p.mul(v, s)).collect(),
        }
    }

    fn check_same_shape(&self, other: &Matrix, op: &'static str) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Modulus(self.p.get(), other.p.get()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim(
                op,
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other, "add")?;
        Ok(Matrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| self.p.add(a, b))
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.p != other.p {
            return Err(Error::Modulus(self.p.get(), other.p.get()));
        }
        if self.cols != other.rows {
            return Err(Error::dim(
                "mul",
                format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        let p = u64::from(self.p.get());
        let mut out = Matrix::zeros(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += u64::from(self.get(r, k)) * u64::from(other.get(k, c));
                    if acc >= 1 << 62 {
                        acc %= p;
                    }
                }
                out.set(r, c, (acc % p) as u32);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> Matrix {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut acc = Matrix::identity(self.p, self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn hstack(p: Prime, rows: usize, blocks: &[&Matrix]) -> Result<Matrix> {
        if let Some(b) = blocks.iter().find(|b| b.rows != rows || b.p != p) {
            return Err(Error::dim("hstack", format!("block with {} rows, expected {rows}", b.rows)));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let mut off = 0;
        for b in blocks {
            for r in 0..rows {
                for c in 0..b.cols {
                    out.set(r, off + c, b.get(r, c));
                }
            }
            off += b.cols;
        }
        Ok(out)
    }

    pub fn vstack(p: Prime, cols: usize, blocks: &[&Matrix]) -> Result<Matrix> {
        if let Some(b) = blocks.iter().find(|b| b.cols != cols || b.p != p) {
            return Err(Error::dim("vstack", format!("block with {} cols, expected {cols}", b.cols)));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(Matrix { p, rows, cols, data })
    }

    pub fn block_diag(p: Prime, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(self.p, rows.len(), cols.len(), |r, c| {
            self.get(rows.start + r, cols.start + c)
        })
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..self.cols {
                    self.data.swap(piv * self.cols + c, row * self.cols + c);
                }
            }
            let inv = p.inv(self.get(row, col));
            for c in col..self.cols {
                let v = p.mul(self.get(row, c), inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = p.sub(self.get(r, c), p.mul(factor, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(self.p, n, &[self, &Matrix::identity(self.p, n)]).ok()?;
        let (r, piv) = aug.rref();
        if piv.len() < n || (n > 0 && piv[n - 1] != n - 1) {
            return None;
        }
        Some(r.submatrix(0..n, n..2 * n))
    }

    /// A matrix `L` with `L·self = I`, for a matrix of full column rank.
    pub fn left_inverse(&self) -> Option<Matrix> {
        let (n, k) = (self.rows, self.cols);
        let aug = Matrix::hstack(self.p, n, &[self, &Matrix::identity(self.p, n)]).ok()?;
        let (r, piv) = aug.rref();
        if piv.iter().filter(|&&c| c < k).count() < k {
            return None;
        }
        Some(r.submatrix(0..k, k..k + n))
    }

    /// A matrix `S` with `self·S = I`, for a matrix of full row rank.
    pub fn right_inverse(&self) -> Option<Matrix> {
        self.transpose().left_inverse().map(|l| l.transpose())
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.checked_add(rhs).expect("matrix sum")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| self.p.neg(v)).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self + &(-rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<Vec<u32>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            p: self.p.get(),
            rows: self.rows,
            cols: self.cols,
            data: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let p = Prime::new(raw.p).map_err(D::Error::custom)?;
        if raw.data.len() != raw.rows || raw.data.iter().any(|r| r.len() != raw.cols) {
            return Err(D::Error::custom("matrix data does not match rows/cols"));
        }
        if raw.data.iter().flatten().any(|&v| v >= p.get()) {
            return Err(D::Error::custom("matrix entry out of range [0, p)"));
        }
        Ok(Matrix {
            p,
            rows: raw.rows,
            cols: raw.cols,
            data: raw.data.into_iter().flatten().collect(),
        })
    }
}

/// Some `X` with `a·X = b`, or `None` when the system is inconsistent.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    if a.p != b.p {
        return Err(Error::Modulus(a.p.get(), b.p.get()));
    }
    if a.rows != b.rows {
        return Err(Error::dim(
            "solve",
            format!("a has {} rows, b has {}", a.rows, b.rows),
        ));
    }
    let n = a.cols;
    let aug = Matrix::hstack(a.p, a.rows, &[a, b])?;
    let (r, piv) = aug.rref();
    if piv.iter().any(|&c| c >= n) {
        return Ok(None);
    }
    let mut x = Matrix::zeros(a.p, n, b.cols);
    for (row, &pc) in piv.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, r.get(row, n + j));
        }
    }
    Ok(Some(x))
}

/// Solves `a·x = v` for a single vector.
pub fn solve_vec(a: &Matrix, v: &[u32]) -> Result<Option<Vec<u32>>> {
    let b = Matrix::column_vector(a.p, v);
    Ok(solve(a, &b)?.map(|x| x.column(0)))
}

pub fn kernel_basis(m: &Matrix) -> Subspace {
    let (r, piv) = m.rref();
    let n = m.cols;
    let p = m.p;
    let mut vecs = Vec::new();
    let mut is_pivot = vec![false; n];
    for &c in &piv {
        is_pivot[c] = true;
    }
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; n];
        v[free] = 1;
        for (row, &pc) in piv.iter().enumerate() {
            v[pc] = p.neg(r.get(row, free));
        }
        vecs.push(v);
    }
    Subspace::span(p, n, &vecs)
}

pub fn image_basis(m: &Matrix) -> Subspace {
    Subspace::span(m.p, m.rows, &m.columns())
}

pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

/// A linear subspace of F_p^n, stored canonically: the basis columns form the
/// transpose of a reduced row-echelon matrix, so equal subspaces compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: {:?})", self.dim(), self.ambient, self.basis.columns())
    }
}

impl Subspace {
    pub fn zero(p: Prime, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(p, ambient, 0),
        }
    }

    pub fn full(p: Prime, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(p, ambient),
        }
    }

    pub fn span(p: Prime, ambient: usize, vectors: &[Vec<u32>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(p, ambient);
        }
        let rows = Matrix::from_fn(p, vectors.len(), ambient, |r, c| vectors[r][c]);
        Subspace::from_row_matrix(&rows)
    }

    /// The column space of `m`.
    pub fn from_columns(m: &Matrix) -> Self {
        Subspace::from_row_matrix(&m.transpose())
    }

    fn from_row_matrix(rows: &Matrix) -> Self {
        let (r, piv) = rows.rref();
        let k = piv.len();
        Subspace {
            ambient: rows.cols(),
            basis: r.submatrix(0..k, 0..rows.cols()).transpose(),
        }
    }

    pub fn p(&self) -> Prime {
        self.basis.p()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<u32>> {
        self.basis.columns()
    }

    fn check_ambient(&self, other: &Subspace, op: &'static str) -> Result<()> {
        if self.p() != other.p() {
            return Err(Error::Modulus(self.p().get(), other.p().get()));
        }
        if self.ambient != other.ambient {
            return Err(Error::dim(
                op,
                format!("ambient {} vs {}", self.ambient, other.ambient),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::dim(
                "member",
                format!("vector of length {} in ambient {}", v.len(), self.ambient),
            ));
        }
        Ok(self.coordinates(v).is_some())
    }

    /// Coordinates of `v` with respect to the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        if v.iter().all(|&x| x == 0) {
            return Some(vec![0; self.dim()]);
        }
        solve_vec(&self.basis, v).ok().flatten()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other, "contains_subspace")?;
        Ok(self.sum(other)?.dim() == self.dim())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other, "sum")?;
        let mut vecs = self.vectors();
        vecs.extend(other.vectors());
        Ok(Subspace::span(self.p(), self.ambient, &vecs))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other, "intersect")?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.p(), self.ambient));
        }
        // u·x = w·y  <=>  [u | -w]·(x, y) = 0
        let stacked = Matrix::hstack(self.p(), self.ambient, &[&self.basis, &(-&other.basis)])?;
        let ker = kernel_basis(&stacked);
        let k = self.dim();
        let vecs: Vec<Vec<u32>> = ker
            .vectors()
            .iter()
            .map(|v| self.basis.mul_vec(&v[..k]))
            .collect();
        Ok(Subspace::span(self.p(), self.ambient, &vecs))
    }

    pub fn equal(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other, "equal")?;
        Ok(self == other)
    }

    /// Image of the subspace under `m` (an `n × ambient` matrix).
    pub fn image_under(&self, m: &Matrix) -> Subspace {
        Subspace::from_columns(&(m * &self.basis))
    }

    /// Every vector of the subspace, in coordinate-odometer order.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        all_vectors(self.p(), self.dim())
            .into_iter()
            .map(|c| self.basis.mul_vec(&c))
            .collect()
    }

    /// All subspaces of F_p^n, ordered by dimension, then pivot set, then free entries.
    pub fn enumerate_all(p: Prime, n: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        for k in 0..=n {
            for pivots in combinations(n, k) {
                let free: Vec<(usize, usize)> = pivots
                    .iter()
                    .enumerate()
                    .flat_map(|(r, &pc)| {
                        let pivots = &pivots;
                        (pc + 1..n)
                            .filter(move |c| !pivots.contains(c))
                            .map(move |c| (r, c))
                    })
                    .collect();
                for assignment in all_vectors(p, free.len()) {
                    let mut rows = Matrix::zeros(p, k, n);
                    for (r, &pc) in pivots.iter().enumerate() {
                        rows.set(r, pc, 1);
                    }
                    for (&(r, c), &v) in free.iter().zip(&assignment) {
                        rows.set(r, c, v);
                    }
                    out.push(Subspace {
                        ambient: n,
                        basis: rows.transpose(),
                    });
                }
            }
        }
        out
    }
}

/// Number of subspaces of F_p^n (sum of Gaussian binomials).
pub fn count_subspaces(p: u32, n: usize) -> u128 {
    let q = u128::from(p);
    let mut total = 0u128;
    for k in 0..=n {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k {
            num *= q.pow((n - i) as u32) - 1;
            den *= q.pow((i + 1) as u32) - 1;
        }
        total += num / den;
    }
    total
}

/// All vectors of F_p^n in odometer order (first coordinate fastest).
pub fn all_vectors(p: Prime, n: usize) -> Vec<Vec<u32>> {
    let total = (p.get() as usize).pow(n as u32);
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u32; n];
    for _ in 0..total {
        out.push(cur.clone());
        for x in cur.iter_mut() {
            *x += 1;
            if *x < p.get() {
                break;
            }
            *x = 0;
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn m(p: Prime, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(p, rows).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Prime::new(4), Err(Error::NotPrime(4)));
        assert!(Prime::new(5).is_ok());
    }

    #[test]
    fn rref_examples() {
        let p = f2();
        let id = Matrix::identity(p, 2);
        assert_eq!(id.rref(), (id.clone(), vec![0, 1]));
        let z = Matrix::zeros(p, 2, 3);
        assert_eq!(z.rref(), (z.clone(), vec![]));
        let ones = m(p, &[&[1, 1], &[1, 1]]);
        assert_eq!(ones.rref(), (m(p, &[&[1, 1], &[0, 0]]), vec![0]));
        let empty = Matrix::zeros(p, 0, 0);
        assert_eq!(empty.rref().1, Vec::<usize>::new());
    }

    #[test]
    fn solve_examples() {
        let p = f2();
        let id = Matrix::identity(p, 2);
        let b = m(p, &[&[1], &[0]]);
        assert_eq!(solve(&id, &b).unwrap(), Some(b.clone()));
        assert_eq!(solve(&Matrix::zeros(p, 2, 2), &b).unwrap(), None);
        let a = m(p, &[&[1, 1], &[0, 0]]);
        let x = solve(&a, &Matrix::zeros(p, 2, 1)).unwrap().unwrap();
        assert_eq!(x.get(0, 0), x.get(1, 0));
        assert!(matches!(
            solve(&id, &Matrix::zeros(p, 3, 1)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn kernel_and_image_examples() {
        let p = f2();
        assert_eq!(kernel_basis(&Matrix::identity(p, 3)).dim(), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(p, 3, 3)).dim(), 3);
        let k = kernel_basis(&m(p, &[&[1, 1]]));
        assert_eq!(k.vectors(), vec![vec![1, 1]]);
        assert_eq!(image_basis(&Matrix::identity(p, 2)), Subspace::full(p, 2));
        assert_eq!(image_basis(&Matrix::zeros(p, 2, 2)).dim(), 0);
        let im = image_basis(&m(p, &[&[1], &[1]]));
        assert_eq!((im.vectors(), rank(&m(p, &[&[1], &[1]]))), (vec![vec![1, 1]], 1));
    }

    #[test]
    fn subspace_lattice_examples() {
        let p = f2();
        let zero = Subspace::zero(p, 2);
        assert!(zero.contains(&[0, 0]).unwrap());
        let u = Subspace::span(p, 2, &[vec![1, 0]]);
        let v = Subspace::span(p, 2, &[vec![0, 1]]);
        assert_eq!(u.sum(&u).unwrap(), u);
        assert_eq!(u.intersect(&v).unwrap(), zero);
        assert_eq!(u.sum(&v).unwrap(), Subspace::full(p, 2));
        assert!(u.sum(&Subspace::zero(p, 3)).is_err());
    }

    #[test]
    fn inverse_and_one_sided_inverses() {
        let p = Prime::new(3).unwrap();
        let a = m(p, &[&[1, 2], &[0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(p, 2));
        let tall = m(p, &[&[1, 0], &[2, 1], &[0, 1]]);
        let l = tall.left_inverse().unwrap();
        assert_eq!(&l * &tall, Matrix::identity(p, 2));
        let wide = tall.transpose();
        let r = wide.right_inverse().unwrap();
        assert_eq!(&wide * &r, Matrix::identity(p, 2));
        assert!(m(p, &[&[1, 1], &[1, 1]]).inverse().is_none());
    }

    #[test]
    fn subspace_enumeration_counts() {
        for (p, n) in [(2, 0), (2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
            let prime = Prime::new(p).unwrap();
            let all = Subspace::enumerate_all(prime, n);
            assert_eq!(all.len() as u128, count_subspaces(p, n), "p={p} n={n}");
            let mut dedup = all.clone();
            dedup.sort_by_key(|s| (s.dim(), s.basis().vectorize()));
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
        }
    }

    #[test]
    fn matrix_json_shape() {
        let p = f2();
        let a = m(p, &[&[1, 0, 1], &[0, 1, 1]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"p":2,"rows":2,"cols":3,"data":[[1,0,1],[0,1,1]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Matrix>(r#"{"p":2,"rows":1,"cols":1,"data":[[2]]}"#).is_err());
    }
}

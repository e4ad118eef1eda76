//! Exact linear algebra over ℚ and prime fields: matrices, rank, kernels,
//! chain complexes and their homology dimensions. No floating point anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficient field: ℚ or F_p for a prime p < 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

/// An exact field element. `Fp` values are residues in [0, p); the modulus
/// lives in the ambient `Field`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp(u64),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp(r) => write!(f, "{r}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::zero()),
            Field::Prime(_) => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::one()),
            Field::Prime(_) => Scalar::Fp(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::from(BigInt::from(n))),
            Field::Prime(p) => {
                let r = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp(r)
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(r) => *r == 0,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + y) % p),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x - y),
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + p - y) % p),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (Field::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Rationals, Scalar::Q(x)) => Scalar::Q(-x),
            (Field::Prime(p), Scalar::Fp(x)) => Scalar::Fp(if *x == 0 { 0 } else { p - x }),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Rationals, Scalar::Q(x)) => {
                assert!(!x.is_zero(), "division by zero");
                Scalar::Q(x.recip())
            }
            (Field::Prime(p), Scalar::Fp(x)) => {
                assert!(*x != 0, "division by zero");
                // Fermat: x^(p-2) mod p
                let mut base = *x as u128;
                let mut exp = p - 2;
                let m = *p as u128;
                let mut acc: u128 = 1;
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    exp >>= 1;
                }
                Scalar::Fp(acc as u64)
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.mul(a, &self.inv(b))
    }

    /// Parse "n" or "n/d" over ℚ, or a decimal residue over F_p.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let err = |m: &str| Error::ParseError {
            path: String::new(),
            message: format!("bad scalar {s:?}: {m}"),
        };
        match self {
            Field::Rationals => {
                if let Some((n, d)) = s.split_once('/') {
                    let n: BigInt = n.parse().map_err(|_| err("numerator"))?;
                    let d: BigInt = d.parse().map_err(|_| err("denominator"))?;
                    if d.is_zero() {
                        return Err(err("zero denominator"));
                    }
                    Ok(Scalar::Q(BigRational::new(n, d)))
                } else {
                    let n: BigInt = s.parse().map_err(|_| err("integer"))?;
                    Ok(Scalar::Q(BigRational::from(n)))
                }
            }
            Field::Prime(p) => {
                let r: u64 = s.parse().map_err(|_| err("residue"))?;
                if r >= *p {
                    return Err(err("residue out of range"));
                }
                Ok(Scalar::Fp(r))
            }
        }
    }
}

/// A dense matrix over an exact field, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        ExactMatrix {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&n| field.from_i64(n)).collect())
                .collect(),
        )
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&other.data) {
            *a = self.field.add(a, b);
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&other.data) {
            *a = self.field.sub(a, b);
        }
        m
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a = self.field.mul(a, c);
        }
        m
    }

    pub fn neg(&self) -> Self {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a = self.field.neg(a);
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let f = self.field;
        let mut m = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let v = f.add(m.get(i, j), &f.mul(a, b));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    if !f.is_zero(self.get(i, j)) && !f.is_zero(&v[j]) {
                        acc = f.add(&acc, &f.mul(self.get(i, j), &v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Scalar]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.set(i, j, v[i].clone());
        }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut m = Self::zeros(self.field, self.rows + other.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..self.cols {
                m.set(self.rows + i, j, other.get(i, j).clone());
            }
        }
        m
    }

    /// Block-diagonal assembly.
    pub fn block_diag(field: Field, blocks: &[&ExactMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Kronecker product (A ⊗ B), basis ordered (a-index, b-index) lexicographically.
    pub fn kronecker(&self, other: &Self) -> Self {
        let f = self.field;
        let mut m = Self::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if f.is_zero(a) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if f.is_zero(b) {
                            continue;
                        }
                        m.set(i * other.rows + k, j * other.cols + l, f.mul(a, b));
                    }
                }
            }
        }
        m
    }

    /// In-place reduced row echelon form. Returns pivot column indices.
    /// Pivoting is deterministic: first nonzero entry in column order.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let mut piv = None;
            for i in row..self.rows {
                if !f.is_zero(self.get(i, col)) {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            if p != row {
                for j in 0..self.cols {
                    self.data.swap(row * self.cols + j, p * self.cols + j);
                }
            }
            let inv = f.inv(self.get(row, col));
            for j in col..self.cols {
                let v = f.mul(self.get(row, j), &inv);
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row || f.is_zero(self.get(i, col)) {
                    continue;
                }
                let c = self.get(i, col).clone();
                for j in col..self.cols {
                    let v = f.sub(self.get(i, j), &f.mul(&c, self.get(row, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Row rank. Over ℚ this runs fraction-free (Bareiss) elimination on an
    /// integer matrix obtained by clearing denominators; over F_p it uses
    /// ordinary elimination.
    pub fn rank(&self) -> usize {
        match self.field {
            Field::Rationals => self.rank_bareiss(),
            Field::Prime(_) => {
                let mut m = self.clone();
                m.rref().len()
            }
        }
    }

    fn rank_bareiss(&self) -> usize {
        // clear denominators row by row
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    if let Scalar::Q(q) = self.get(i, j) {
                        lcm = num_integer::lcm(lcm, q.denom().clone());
                    }
                }
                (0..self.cols)
                    .map(|j| match self.get(i, j) {
                        Scalar::Q(q) => q.numer() * (&lcm / q.denom()),
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            let mut piv = None;
            for i in row..rows {
                if !a[i][col].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            a.swap(row, p);
            for i in row + 1..rows {
                for j in col + 1..cols {
                    let v = (&a[row][col] * &a[i][j] - &a[i][col] * &a[row][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[row][col].clone();
            rank += 1;
            row += 1;
        }
        let _ = prev.abs();
        rank
    }

    /// Columns spanning the kernel of `self` (as a linear map on column vectors).
    pub fn kernel_basis(&self) -> ExactMatrix {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut ker = ExactMatrix::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            ker.set(fc, k, f.one());
            for (r, &pc) in pivots.iter().enumerate() {
                ker.set(pc, k, f.neg(m.get(r, fc)));
            }
        }
        ker
    }

    /// A basis of the column space, as columns.
    pub fn column_space_basis(&self) -> ExactMatrix {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut out = ExactMatrix::zeros(self.field, self.rows, pivots.len());
        for (k, &c) in pivots.iter().enumerate() {
            out.set_column(k, &self.column(c));
        }
        out
    }

    /// Solve self · x = b; returns None when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let f = self.field;
        let mut aug = ExactMatrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Solve self · X = B columnwise; None when any column is inconsistent.
    pub fn solve_matrix(&self, b: &ExactMatrix) -> Option<ExactMatrix> {
        assert_eq!(self.rows, b.rows);
        let mut x = ExactMatrix::zeros(self.field, self.cols, b.cols);
        for j in 0..b.cols {
            let col = self.solve(&b.column(j))?;
            x.set_column(j, &col);
        }
        Some(x)
    }

    /// Inverse of a square matrix; None when singular.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let inv = self.solve_matrix(&ExactMatrix::identity(self.field, self.rows))?;
        if self.mul(&inv) == ExactMatrix::identity(self.field, self.rows) {
            Some(inv)
        } else {
            None
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Orientation of a complex: chain differentials lower degree, cochain raise it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Chain,
    Cochain,
}

/// A complex of finite-dimensional vector spaces presented by its differentials.
/// For `Chain` orientation, `diffs[n]` maps degree n to degree n−1; for
/// `Cochain`, degree n to degree n+1. Spaces are implied by matrix shapes;
/// `dims[n]` records the dimension in degree n.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub field: Field,
    pub orientation: Orientation,
    pub dims: BTreeMap<i64, usize>,
    pub diffs: BTreeMap<i64, ExactMatrix>,
}

impl ChainComplex {
    pub fn new(
        field: Field,
        orientation: Orientation,
        dims: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, ExactMatrix>,
    ) -> Result<Self> {
        let c = ChainComplex {
            field,
            orientation,
            dims,
            diffs,
        };
        c.check_shapes()?;
        c.check_dd_zero()?;
        Ok(c)
    }

    fn target_degree(&self, n: i64) -> i64 {
        match self.orientation {
            Orientation::Chain => n - 1,
            Orientation::Cochain => n + 1,
        }
    }

    fn check_shapes(&self) -> Result<()> {
        for (&n, d) in &self.diffs {
            let src = *self.dims.get(&n).unwrap_or(&0);
            let dst = *self.dims.get(&self.target_degree(n)).unwrap_or(&0);
            if d.cols != src || d.rows != dst {
                return Err(Error::DimMismatch(format!(
                    "differential at degree {n} is {}x{}, expected {dst}x{src}",
                    d.rows, d.cols
                )));
            }
        }
        Ok(())
    }

    fn check_dd_zero(&self) -> Result<()> {
        for (&n, d) in &self.diffs {
            let m = self.target_degree(n);
            if let Some(d2) = self.diffs.get(&m) {
                if !d2.mul(d).is_zero() {
                    return Err(Error::NotAComplex(n, m));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self, n: i64) -> usize {
        *self.dims.get(&n).unwrap_or(&0)
    }

    /// Differential out of degree n; a zero matrix of the right shape when absent
    /// but both endpoint dimensions are known (possibly zero).
    fn diff_out(&self, n: i64) -> Result<ExactMatrix> {
        if let Some(d) = self.diffs.get(&n) {
            return Ok(d.clone());
        }
        let src = self.dim(n);
        let dst = self.dim(self.target_degree(n));
        if src == 0 || dst == 0 {
            return Ok(ExactMatrix::zeros(self.field, dst, src));
        }
        Err(Error::MissingDifferential(n))
    }

    /// dim H_n for n in [lo, hi]: dim ker(d out of n) − rank(d into n).
    pub fn homology_dims(&self, lo: i64, hi: i64) -> Result<BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for n in lo..=hi {
            let d_out = self.diff_out(n)?;
            let into_deg = match self.orientation {
                Orientation::Chain => n + 1,
                Orientation::Cochain => n - 1,
            };
            let d_in = self.diff_out(into_deg)?;
            let ker = self.dim(n) - d_out.rank();
            let im = d_in.rank();
            assert!(ker >= im, "homology dimension underflow at degree {n}");
            out.insert(n, ker - im);
        }
        Ok(out)
    }
}

//! Exact arithmetic over prime fields, small extension fields, and
//! `d x d` matrices over `GF(p)`.
//!
//! Nonzero vectors of `GF(p)^d` are named by integers in `[0, p^d - 1)`:
//! the coordinate tuple is read as a base-`p` number (last coordinate
//! fastest) and the zero vector's code is subtracted away.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 6;
const MAX_ENTRIES: usize = MAX_DIM * MAX_DIM;

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// The prime field `GF(p)`, `2 <= p <= 61`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=61).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Self { p: p as u8 })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p as u32 - b % self.p as u32) % self.p as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.p as u32 - a % self.p as u32) % self.p as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.p as u32
    }

    pub fn pow(&self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.p as u32;
        let mut acc = 1 % self.p as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a % self.p as u32 == 0 {
            return Err(Error::Singular);
        }
        Ok(self.pow(a, self.p as u32 - 2))
    }

    /// Quadratic residuosity of a nonzero residue. In characteristic 2
    /// every nonzero element is a square.
    pub fn is_square(&self, x: u32) -> Result<bool> {
        let x = x % self.p as u32;
        if x == 0 {
            return Err(Error::ZeroResidue);
        }
        let p = self.p as u32;
        Ok((1..p).any(|y| y * y % p == x))
    }

    /// `table[x]` is true iff `x` is a nonzero square. Index 0 is false.
    pub fn square_table(&self) -> Vec<bool> {
        let p = self.p as usize;
        let mut table = vec![false; p];
        for y in 1..p {
            table[y * y % p] = true;
        }
        table
    }
}

/// An extension field `GF(p^e)` given by a monic irreducible modulus.
///
/// Elements are encoded as integers `sum c_i p^i` over their coefficient
/// vector in the polynomial basis `1, x, ..., x^(e-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    base: PrimeField,
    degree: usize,
    /// Low-to-high coefficients of the monic modulus, length `degree + 1`.
    modulus: Vec<u8>,
}

impl ExtField {
    pub fn new(p: u32, modulus: &[u32]) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if modulus.len() < 2 || modulus.last().copied() != Some(1) {
            return Err(Error::Reducible(base.p));
        }
        let modulus: Vec<u8> = modulus.iter().map(|&c| (c % p) as u8).collect();
        let field = Self {
            base,
            degree: modulus.len() - 1,
            modulus,
        };
        if !field.modulus_irreducible() {
            return Err(Error::Reducible(base.p));
        }
        Ok(field)
    }

    /// `GF(9) = GF(3)[x] / (x^2 + 1)`.
    pub fn gf9() -> Self {
        Self::new(3, &[1, 0, 1]).expect("x^2 + 1 is irreducible over GF(3)")
    }

    /// `GF(4) = GF(2)[x] / (x^2 + x + 1)`.
    pub fn gf4() -> Self {
        Self::new(2, &[1, 1, 1]).expect("x^2 + x + 1 is irreducible over GF(2)")
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u32 {
        (self.base.p as u32).pow(self.degree as u32)
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    // Trial division by every monic polynomial of degree 1..=e/2.
    fn modulus_irreducible(&self) -> bool {
        let p = self.base.p as u32;
        for deg in 1..=self.degree / 2 {
            for code in 0..p.pow(deg as u32) {
                let mut divisor = digits(code, p, deg);
                divisor.push(1);
                if poly_rem(&self.modulus, &divisor, self.base)
                    .iter()
                    .all(|&c| c == 0)
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn coeffs(&self, a: u32) -> Vec<u8> {
        digits(a, self.base.p as u32, self.degree)
    }

    pub fn from_coeffs(&self, c: &[u8]) -> u32 {
        let p = self.base.p as u32;
        c.iter().rev().fold(0, |acc, &x| acc * p + x as u32)
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let s: Vec<u8> = x
            .iter()
            .zip(&y)
            .map(|(&u, &v)| self.base.add(u as u32, v as u32) as u8)
            .collect();
        self.from_coeffs(&s)
    }

    pub fn neg(&self, a: u32) -> u32 {
        let s: Vec<u8> = self
            .coeffs(a)
            .iter()
            .map(|&u| self.base.neg(u as u32) as u8)
            .collect();
        self.from_coeffs(&s)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u8; 2 * self.degree];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                let t = self.base.mul(u as u32, v as u32);
                prod[i + j] = self.base.add(prod[i + j] as u32, t) as u8;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.base);
        self.from_coeffs(&r)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::Singular);
        }
        Ok(self.pow(a, self.order() as u64 - 2))
    }

    /// The `e x e` matrix over `GF(p)` of `y -> y * a` in the polynomial
    /// basis (row vectors): row `r` holds the coefficients of `x^r * a`.
    pub fn mult_matrix_rows(&self, a: u32) -> Vec<Vec<u8>> {
        let p = self.base.p as u32;
        (0..self.degree)
            .map(|r| self.coeffs(self.mul(p.pow(r as u32), a)))
            .collect()
    }
}

fn digits(mut code: u32, p: u32, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p) as u8);
        code /= p;
    }
    out
}

// Remainder of `num` modulo the monic polynomial `den`, padded to deg(den).
fn poly_rem(num: &[u8], den: &[u8], f: PrimeField) -> Vec<u8> {
    let dd = den.len() - 1;
    let mut r: Vec<u32> = num.iter().map(|&c| c as u32).collect();
    if r.len() < dd {
        r.resize(dd, 0);
    }
    for top in (dd..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (k, &dc) in den.iter().enumerate() {
            let idx = top - dd + k;
            r[idx] = f.sub(r[idx], f.mul(c, dc as u32));
        }
    }
    r.truncate(dd);
    r.into_iter().map(|c| c as u8).collect()
}

/// A square matrix over an extension field, entries in the integer
/// encoding of [`ExtField`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtMatrix {
    k: usize,
    entries: Vec<u32>,
}

impl ExtMatrix {
    pub fn new(k: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), k * k);
        Self { k, entries }
    }

    pub fn identity(k: usize) -> Self {
        let mut entries = vec![0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1;
        }
        Self { k, entries }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.k + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn mul(&self, other: &Self, f: &ExtField) -> Self {
        let k = self.k;
        let mut out = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0;
                for l in 0..k {
                    acc = f.add(acc, f.mul(self.get(i, l), other.get(l, j)));
                }
                out[i * k + j] = acc;
            }
        }
        Self { k, entries: out }
    }

    pub fn det(&self, f: &ExtField) -> u32 {
        let k = self.k;
        let mut a = self.entries.clone();
        let mut det = f.one();
        for col in 0..k {
            let Some(piv) = (col..k).find(|&r| a[r * k + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..k {
                    a.swap(piv * k + j, col * k + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * k + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..k {
                let factor = f.mul(a[r * k + col], pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..k {
                    a[r * k + j] = f.sub(a[r * k + j], f.mul(factor, a[col * k + j]));
                }
            }
        }
        det
    }

    pub fn order(&self, f: &ExtField, limit: usize) -> Option<usize> {
        let id = Self::identity(self.k);
        let mut x = self.clone();
        for n in 1..=limit {
            if x == id {
                return Some(n);
            }
            x = x.mul(self, f);
        }
        None
    }
}

/// Replaces each extension-field entry by its `e x e` multiplication
/// matrix, giving a `ke x ke` matrix over the prime field.
pub fn blowup(m: &ExtMatrix, f: &ExtField) -> Matrix {
    let k = m.dim();
    let e = f.degree();
    let d = k * e;
    let mut entries = vec![0u32; d * d];
    for i in 0..k {
        for j in 0..k {
            let block = f.mult_matrix_rows(m.get(i, j));
            for (r, row) in block.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    entries[(i * e + r) * d + j * e + c] = v as u32;
                }
            }
        }
    }
    Matrix::new(f.base().p() as u32, d, &entries).expect("blowup dimension within bounds")
}

/// A `d x d` matrix over `GF(p)`, stored row-major in a fixed array.
///
/// Ordering is lexicographic on the row-major entry tuple (after `p` and
/// `d`), which is the ordering used whenever a canonical representative
/// is picked.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    p: u8,
    d: u8,
    e: [u8; MAX_ENTRIES],
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}{:?}", self.p, self.rows())
    }
}

impl Matrix {
    pub fn new(p: u32, d: usize, entries: &[u32]) -> Result<Self> {
        PrimeField::new(p)?;
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidDimension(d));
        }
        if entries.len() != d * d {
            return Err(Error::Mismatch(format!(
                "{} entries for a {d}x{d} matrix",
                entries.len()
            )));
        }
        let mut e = [0u8; MAX_ENTRIES];
        for (slot, &v) in e.iter_mut().zip(entries) {
            *slot = (v % p) as u8;
        }
        Ok(Self {
            p: p as u8,
            d: d as u8,
            e,
        })
    }

    /// Builds a matrix from a JSON-style entry list, inferring `d`.
    pub fn from_entries(p: u32, entries: &[i64]) -> Result<Self> {
        let d = (entries.len() as f64).sqrt().round() as usize;
        let reduced: Vec<u32> = entries
            .iter()
            .map(|&v| v.rem_euclid(p as i64) as u32)
            .collect();
        Self::new(p, d, &reduced)
    }

    pub fn from_rows(p: u32, rows: &[&[i64]]) -> Result<Self> {
        let flat: Vec<i64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::Mismatch("rows of unequal length".into()));
        }
        Self::from_entries(p, &flat)
    }

    pub fn identity(p: u32, d: usize) -> Self {
        Self::scalar(p, d, 1)
    }

    pub fn scalar(p: u32, d: usize, s: u32) -> Self {
        let mut e = [0u8; MAX_ENTRIES];
        for i in 0..d {
            e[i * d + i] = (s % p) as u8;
        }
        Self {
            p: p as u8,
            d: d as u8,
            e,
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p as u32
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d as usize
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.d as usize + j] as u32
    }

    pub fn entries(&self) -> &[u8] {
        &self.e[..(self.d as usize * self.d as usize)]
    }

    pub fn to_json_entries(&self) -> Vec<u32> {
        self.entries().iter().map(|&v| v as u32).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.entries()
            .chunks(self.d as usize)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.p(), self.dim())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.d != other.d {
            return Err(Error::Mismatch(format!(
                "GF({})^{} vs GF({})^{}",
                self.p, self.d, other.p, other.d
            )));
        }
        Ok(())
    }

    /// Matrix product with compatibility checking.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.d as usize;
        let p = self.p as u32;
        let mut e = [0u8; MAX_ENTRIES];
        for i in 0..d {
            let row = &self.e[i * d..i * d + d];
            for j in 0..d {
                let mut acc = 0u32;
                for (l, &a) in row.iter().enumerate() {
                    acc += a as u32 * other.e[l * d + j] as u32;
                }
                e[i * d + j] = (acc % p) as u8;
            }
        }
        Self {
            p: self.p,
            d: self.d,
            e,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = *self;
        let n = self.dim() * self.dim();
        for k in 0..n {
            out.e[k] = ((self.e[k] as u32 + other.e[k] as u32) % self.p()) as u8;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = *self;
        let n = self.dim() * self.dim();
        let p = self.p();
        for k in 0..n {
            out.e[k] = ((self.e[k] as u32 + p - other.e[k] as u32) % p) as u8;
        }
        Ok(out)
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> Self {
        let mut out = *self;
        let d = self.dim();
        let p = self.p();
        for i in 0..d {
            out.e[i * d + i] = ((out.e[i * d + i] as u32 + p - 1) % p) as u8;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        let mut out = *self;
        for i in 0..d {
            for j in 0..d {
                out.e[j * d + i] = self.e[i * d + j];
            }
        }
        out
    }

    /// Determinant by Gaussian elimination with modular pivoting.
    pub fn det(&self) -> u32 {
        let d = self.dim();
        let f = self.field();
        let mut a = [0u32; MAX_ENTRIES];
        for (k, slot) in a.iter_mut().enumerate().take(d * d) {
            *slot = self.e[k] as u32;
        }
        let mut det = 1u32;
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| a[r * d + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..d {
                    a.swap(piv * d + j, col * d + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * d + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..d {
                let factor = f.mul(a[r * d + col], pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..d {
                    a[r * d + j] = f.sub(a[r * d + j], f.mul(factor, a[col * d + j]));
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inv(&self) -> Result<Self> {
        let d = self.dim();
        let f = self.field();
        let mut a = [0u32; MAX_ENTRIES];
        let mut b = [0u32; MAX_ENTRIES];
        for k in 0..d * d {
            a[k] = self.e[k] as u32;
        }
        for i in 0..d {
            b[i * d + i] = 1;
        }
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| a[r * d + col] != 0)
                .ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..d {
                    a.swap(piv * d + j, col * d + j);
                    b.swap(piv * d + j, col * d + j);
                }
            }
            let pinv = f.inv(a[col * d + col])?;
            for j in 0..d {
                a[col * d + j] = f.mul(a[col * d + j], pinv);
                b[col * d + j] = f.mul(b[col * d + j], pinv);
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = a[r * d + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] = f.sub(a[r * d + j], f.mul(factor, a[col * d + j]));
                    b[r * d + j] = f.sub(b[r * d + j], f.mul(factor, b[col * d + j]));
                }
            }
        }
        let mut out = *self;
        for k in 0..d * d {
            out.e[k] = b[k] as u8;
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity(self.p(), self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order, if it is at most `limit`.
    pub fn order(&self, limit: usize) -> Option<usize> {
        let id = Self::identity(self.p(), self.dim());
        let mut x = *self;
        for n in 1..=limit {
            if x == id {
                return Some(n);
            }
            x = x * *self;
        }
        None
    }

    /// Kronecker product `a (x) b`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::Mismatch(format!(
                "moduli {} and {}",
                self.p, other.p
            )));
        }
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        if d > MAX_DIM {
            return Err(Error::InvalidDimension(d));
        }
        let mut entries = vec![0u32; d * d];
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    for l in 0..db {
                        entries[(i * db + k) * d + j * db + l] =
                            self.get(i, j) * other.get(k, l) % self.p();
                    }
                }
            }
        }
        Self::new(self.p(), d, &entries)
    }

    /// Image of the nonzero vector `v` under `x -> x * self`.
    #[inline]
    pub fn act(&self, v: u32) -> u32 {
        let space = VectorSpace::new_unchecked(self.p(), self.dim());
        let x = space.vector(v);
        let d = self.dim();
        let mut y = [0u8; MAX_DIM];
        for (j, yj) in y.iter_mut().enumerate().take(d) {
            let mut acc = 0u32;
            for i in 0..d {
                acc += x[i] as u32 * self.e[i * d + j] as u32;
            }
            *yj = (acc % self.p()) as u8;
        }
        space.index(&y[..d])
    }
}

impl Mul for Matrix {
    type Output = Matrix;

    /// Panics on incompatible operands; use [`Matrix::try_mul`] for
    /// checked multiplication.
    #[inline]
    fn mul(self, rhs: Matrix) -> Matrix {
        assert!(
            self.p == rhs.p && self.d == rhs.d,
            "incompatible matrix product"
        );
        self.mul_unchecked(&rhs)
    }
}

/// The nonzero vectors of `GF(p)^d` and their integer names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VectorSpace {
    p: u32,
    d: usize,
}

impl VectorSpace {
    pub fn new(p: u32, d: usize) -> Result<Self> {
        PrimeField::new(p)?;
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self { p, d })
    }

    #[inline]
    fn new_unchecked(p: u32, d: usize) -> Self {
        Self { p, d }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `p^d`.
    pub fn size(&self) -> u32 {
        self.p.pow(self.d as u32)
    }

    /// Number of nonzero vectors, `p^d - 1`.
    pub fn nonzero_count(&self) -> u32 {
        self.size() - 1
    }

    /// Index of a nonzero coordinate tuple. Panics on the zero vector.
    #[inline]
    pub fn index(&self, v: &[u8]) -> u32 {
        let code = v.iter().fold(0u32, |acc, &c| acc * self.p + c as u32);
        assert!(code != 0, "the zero vector has no index");
        code - 1
    }

    /// Coordinate tuple of the nonzero vector with the given index.
    #[inline]
    pub fn vector(&self, index: u32) -> [u8; MAX_DIM] {
        let mut code = index + 1;
        let mut out = [0u8; MAX_DIM];
        for slot in out[..self.d].iter_mut().rev() {
            *slot = (code % self.p) as u8;
            code /= self.p;
        }
        out
    }

    /// Index of `a + b` where either may be zero; `None` stands for the
    /// zero vector.
    pub fn add(&self, a: Option<u32>, b: Option<u32>) -> Option<u32> {
        let va = a.map(|i| self.vector(i)).unwrap_or([0; MAX_DIM]);
        let vb = b.map(|i| self.vector(i)).unwrap_or([0; MAX_DIM]);
        let mut s = [0u8; MAX_DIM];
        for k in 0..self.d {
            s[k] = ((va[k] as u32 + vb[k] as u32) % self.p) as u8;
        }
        if s[..self.d].iter().all(|&c| c == 0) {
            None
        } else {
            Some(self.index(&s[..self.d]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_composites() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(67).is_err());
        assert!(PrimeField::new(61).is_ok());
    }

    #[test]
    fn squares_mod_five() {
        let f = PrimeField::new(5).unwrap();
        assert!(f.is_square(4).unwrap());
        assert!(!f.is_square(2).unwrap());
        assert!(f.is_square(0).is_err());
    }

    #[test]
    fn everything_is_square_in_char_two() {
        let f = PrimeField::new(2).unwrap();
        assert!(f.is_square(1).unwrap());
    }

    #[test]
    fn quadratic_residue_count() {
        for p in [
            3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
        ] {
            let f = PrimeField::new(p).unwrap();
            let n = (1..p).filter(|&x| f.is_square(x).unwrap()).count();
            assert_eq!(n as u32, (p - 1) / 2, "p = {p}");
        }
    }

    #[test]
    fn two_by_two_product() {
        let m = Matrix::from_rows(5, &[&[0, 4], &[1, 0]]).unwrap();
        assert_eq!(m * m, Matrix::from_rows(5, &[&[4, 0], &[0, 4]]).unwrap());
        assert_eq!(m * Matrix::identity(5, 2), m);
    }

    #[test]
    fn small_inverse() {
        let m = Matrix::from_rows(5, &[&[2, 0], &[0, 1]]).unwrap();
        assert_eq!(
            m.inv().unwrap(),
            Matrix::from_rows(5, &[&[3, 0], &[0, 1]]).unwrap()
        );
        let s = Matrix::from_rows(5, &[&[1, 2], &[2, 4]]).unwrap();
        assert!(matches!(s.inv(), Err(Error::Singular)));
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let a = Matrix::identity(5, 2);
        let b = Matrix::identity(3, 2);
        let c = Matrix::identity(5, 4);
        assert!(a.try_mul(&b).is_err());
        assert!(a.try_mul(&c).is_err());
    }

    #[test]
    fn repeated_row_has_zero_determinant() {
        let m = Matrix::from_rows(
            7,
            &[&[1, 2, 3, 4], &[0, 1, 5, 6], &[1, 2, 3, 4], &[3, 3, 3, 3]],
        )
        .unwrap();
        assert_eq!(m.det(), 0);
        assert_eq!(Matrix::identity(7, 4).det(), 1);
    }

    #[test]
    fn vector_indexing_is_base_p() {
        let v = VectorSpace::new(3, 4).unwrap();
        assert_eq!(v.index(&[0, 0, 0, 1]), 0);
        assert_eq!(v.index(&[0, 0, 1, 0]), 2);
        assert_eq!(v.index(&[2, 2, 2, 2]), 79);
        for i in 0..v.nonzero_count() {
            assert_eq!(v.index(&v.vector(i)[..4]), i);
        }
    }

    #[test]
    fn kron_of_identities() {
        let i2 = Matrix::identity(3, 2);
        assert_eq!(i2.kron(&i2).unwrap(), Matrix::identity(3, 4));
        let a = Matrix::from_rows(3, &[&[1, 2], &[0, 1]]).unwrap();
        let k = a.kron(&i2).unwrap();
        // 2x2 blocks a_ij * I
        assert_eq!(k.get(0, 2), 2);
        assert_eq!(k.get(1, 3), 2);
        assert_eq!(k.get(0, 3), 0);
        assert_eq!(k.get(2, 0), 0);
    }

    #[test]
    fn pinned_extension_moduli() {
        assert_eq!(ExtField::gf9().modulus(), &[1, 0, 1]);
        assert_eq!(ExtField::gf4().modulus(), &[1, 1, 1]);
        assert!(ExtField::new(3, &[2, 0, 1]).is_err()); // x^2 - 1
        assert!(ExtField::new(2, &[1, 1, 0, 1]).is_ok()); // x^3 + x + 1
    }

    #[test]
    fn blowup_of_identity() {
        let f = ExtField::gf9();
        assert_eq!(blowup(&ExtMatrix::identity(2), &f), Matrix::identity(3, 4));
    }

    #[test]
    fn minus_one_is_fixed_point_free_action() {
        let m = Matrix::scalar(3, 4, 2);
        for v in 0..80 {
            assert_ne!(m.act(v), v);
            assert_eq!(m.act(m.act(v)), v);
        }
    }
}

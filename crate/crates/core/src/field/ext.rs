use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::poly::is_irreducible;
use super::table::default_modulus;
use super::{BaseField, Field};
use crate::error::{Error, Result};
use crate::matrix::{BaseMatrix, Matrix};

/// An element of `F_{q^m}`: power-basis coordinates packed little-endian into
/// a `u128`, `bit_width(q)` bits per coordinate. For `q = 2` this is the usual
/// integer packing (bit `i` is the coefficient of `alpha^i`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ExtElem(pub(crate) u128);

impl ExtElem {
    pub const ZERO: ExtElem = ExtElem(0);

    pub fn packed(self) -> u128 {
        self.0
    }
}

/// Ordered basis of the extension over the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `(1, alpha, ..., alpha^(m-1))` for a root `alpha` of the modulus.
    Power,
    Custom(Vec<ExtElem>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldParams {
    pub q: u32,
    pub m: usize,
    /// Monic modulus, little-endian, `m + 1` coefficients.
    pub modulus: Vec<u16>,
    pub basis: Basis,
}

impl FieldParams {
    /// Parameters with the built-in default modulus and the power basis.
    pub fn new(q: u32, m: usize) -> Result<Self> {
        let base = BaseField::new(q)?;
        check_degree(&base, m)?;
        Ok(FieldParams {
            q,
            m,
            modulus: default_modulus(&base, m),
            basis: Basis::Power,
        })
    }

    pub fn binary(m: usize) -> Result<Self> {
        FieldParams::new(2, m)
    }

    pub fn with_modulus(q: u32, m: usize, modulus: Vec<u16>) -> Self {
        FieldParams {
            q,
            m,
            modulus,
            basis: Basis::Power,
        }
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }
}

const MAX_M: usize = 64;

fn check_degree(base: &BaseField, m: usize) -> Result<()> {
    if m == 0 || m > MAX_M || m as u32 * base.bit_width() > 128 {
        return Err(Error::InvalidField(format!(
            "extension degree {m} unsupported for q = {}",
            base.order()
        )));
    }
    Ok(())
}

/// The extension field `F_{q^m}` together with a fixed basis.
#[derive(Debug, Clone)]
pub struct ExtField {
    params: FieldParams,
    base: BaseField,
    width: u32,
    coord_mask: u128,
    // x^m = sum red[i] x^i
    red: Vec<u16>,
    binary_red: u128,
    basis: Vec<ExtElem>,
    // power coordinates -> basis coordinates; None for the power basis
    basis_inv: Option<BaseMatrix>,
}

impl ExtField {
    pub fn new(params: FieldParams) -> Result<Self> {
        let base = BaseField::new(params.q)?;
        let m = params.m;
        check_degree(&base, m)?;
        let q = params.q;
        if params.modulus.len() != m + 1 || params.modulus.iter().any(|&c| u32::from(c) >= q) {
            return Err(Error::InvalidField(format!(
                "modulus must have {} coefficients below {q}",
                m + 1
            )));
        }
        if params.modulus[m] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if !is_irreducible(&base, &params.modulus) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let width = base.bit_width();
        let coord_mask = (1u128 << width) - 1;
        let red: Vec<u16> = params.modulus[..m].iter().map(|&c| base.neg(c)).collect();
        let binary_red = if params.q == 2 {
            red.iter()
                .enumerate()
                .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i))
        } else {
            0
        };
        let mut field = ExtField {
            params: params.clone(),
            base,
            width,
            coord_mask,
            red,
            binary_red,
            basis: Vec::new(),
            basis_inv: None,
        };
        match &params.basis {
            Basis::Power => {
                field.basis = (0..m).map(|i| field.from_coords(&unit(m, i))).collect();
            }
            Basis::Custom(b) => {
                if b.len() != m {
                    return Err(Error::InvalidField(format!("basis must have {m} elements")));
                }
                let mut cols = BaseMatrix::zeros(m, m);
                for (j, &bj) in b.iter().enumerate() {
                    if !field.is_valid(bj) {
                        return Err(Error::InvalidField("basis element out of range".into()));
                    }
                    for (i, c) in field.coords(bj).into_iter().enumerate() {
                        cols[(i, j)] = c;
                    }
                }
                let inv = cols
                    .inverse(&field.base)
                    .ok_or_else(|| Error::InvalidField("basis elements are dependent".into()))?;
                field.basis = b.clone();
                field.basis_inv = Some(inv);
            }
        }
        Ok(field)
    }

    pub fn binary(m: usize) -> Result<Self> {
        ExtField::new(FieldParams::binary(m)?)
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn q(&self) -> u32 {
        self.params.q
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    /// Bits per packed coordinate.
    pub fn coord_width(&self) -> u32 {
        self.width
    }

    /// `q^m` if it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        (self.params.q as u128).checked_pow(self.params.m as u32)
    }

    pub fn basis(&self) -> &[ExtElem] {
        &self.basis
    }

    /// The root `alpha` of the modulus.
    pub fn alpha(&self) -> ExtElem {
        if self.params.m == 1 {
            return self.from_coords(&[self.base.neg(self.params.modulus[0])]);
        }
        self.from_coords(&unit(self.params.m, 1))
    }

    pub fn is_valid(&self, a: ExtElem) -> bool {
        let bits = self.width * self.params.m as u32;
        if bits < 128 && a.0 >> bits != 0 {
            return false;
        }
        (0..self.params.m)
            .all(|i| ((a.0 >> (i as u32 * self.width)) & self.coord_mask) < self.params.q as u128)
    }

    /// Element from its packed representation, validated.
    pub fn element(&self, packed: u128) -> Result<ExtElem> {
        let a = ExtElem(packed);
        if self.is_valid(a) {
            Ok(a)
        } else {
            Err(Error::InvalidField(format!(
                "{packed:#x} is not a field element"
            )))
        }
    }

    /// Embedding of the base field.
    pub fn from_base(&self, c: u16) -> ExtElem {
        ExtElem(c as u128)
    }

    fn unpack(&self, a: ExtElem) -> [u16; MAX_M] {
        let mut out = [0u16; MAX_M];
        for (i, o) in out.iter_mut().take(self.params.m).enumerate() {
            *o = ((a.0 >> (i as u32 * self.width)) & self.coord_mask) as u16;
        }
        out
    }

    /// Power-basis coordinates.
    pub fn coords(&self, a: ExtElem) -> Vec<u16> {
        (0..self.params.m)
            .map(|i| ((a.0 >> (i as u32 * self.width)) & self.coord_mask) as u16)
            .collect()
    }

    pub fn from_coords(&self, c: &[u16]) -> ExtElem {
        let mut v = 0u128;
        for (i, &ci) in c.iter().enumerate() {
            v |= (ci as u128) << (i as u32 * self.width);
        }
        ExtElem(v)
    }

    /// Coordinates with respect to the configured basis.
    pub fn basis_coords(&self, a: ExtElem) -> Vec<u16> {
        let c = self.coords(a);
        match &self.basis_inv {
            None => c,
            Some(inv) => inv.mul_vec(&self.base, &c),
        }
    }

    pub fn from_basis_coords(&self, c: &[u16]) -> ExtElem {
        match self.basis_inv {
            None => self.from_coords(c),
            Some(_) => c
                .iter()
                .zip(&self.basis)
                .fold(ExtElem::ZERO, |acc, (&ci, &b)| {
                    self.add(acc, self.scale(b, ci))
                }),
        }
    }

    /// Multiplication by a base-field scalar.
    pub fn scale(&self, a: ExtElem, c: u16) -> ExtElem {
        match c {
            0 => ExtElem::ZERO,
            1 => a,
            _ => {
                let m = self.params.m;
                let mut co = self.unpack(a);
                for x in co.iter_mut().take(m) {
                    *x = self.base.mul(*x, c);
                }
                self.from_coords(&co[..m])
            }
        }
    }

    pub fn pow(&self, a: ExtElem, mut n: u64) -> ExtElem {
        let mut result = self.one();
        let mut b = a;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            n >>= 1;
        }
        result
    }

    /// `a^(q^i)`; `i` is reduced modulo `m`.
    pub fn frobenius(&self, a: ExtElem, i: usize) -> ExtElem {
        let mut x = a;
        for _ in 0..i % self.params.m {
            x = self.frob1(x);
        }
        x
    }

    fn frob1(&self, a: ExtElem) -> ExtElem {
        if self.params.q == 2 {
            self.mul(a, a)
        } else {
            self.pow(a, self.params.q as u64)
        }
    }

    /// `a^(q^-i)`.
    pub fn inverse_frobenius(&self, a: ExtElem, i: usize) -> ExtElem {
        let m = self.params.m;
        self.frobenius(a, (m - i % m) % m)
    }

    pub fn try_inv(&self, a: ExtElem) -> Result<ExtElem> {
        self.inv(a).ok_or(Error::ZeroInverse)
    }

    /// The basis map: column `j` of the `m x n` result expands `v[j]` in the basis.
    pub fn ext_to_matrix(&self, v: &[ExtElem]) -> BaseMatrix {
        let m = self.params.m;
        let mut out = BaseMatrix::zeros(m, v.len());
        for (j, &a) in v.iter().enumerate() {
            for (i, c) in self.basis_coords(a).into_iter().enumerate() {
                out[(i, j)] = c;
            }
        }
        out
    }

    pub fn matrix_to_ext(&self, a: &BaseMatrix) -> Result<Vec<ExtElem>> {
        if a.rows() != self.params.m {
            return Err(Error::DimensionMismatch {
                expected: self.params.m,
                found: a.rows(),
            });
        }
        Ok((0..a.cols())
            .map(|j| self.from_basis_coords(&a.col(j)))
            .collect())
    }

    /// Rank over the base field of the span of `v`.
    pub fn span_rank(&self, v: &[ExtElem]) -> usize {
        self.ext_to_matrix(v).rank(&self.base)
    }

    pub fn is_independent(&self, v: &[ExtElem]) -> bool {
        v.len() <= self.params.m && self.span_rank(v) == v.len()
    }

    /// `k x n` Moore matrix with rows `g^[0], ..., g^[k-1]`.
    pub fn moore_matrix(&self, g: &[ExtElem], k: usize) -> Result<Matrix<ExtElem>> {
        if k == 0 {
            return Err(Error::InvalidParameters("Moore matrix needs k >= 1".into()));
        }
        if !self.is_independent(g) {
            return Err(Error::DependentLocators);
        }
        let n = g.len();
        let mut out = Matrix::zeros(k, n);
        let mut row = g.to_vec();
        for i in 0..k {
            for (j, &x) in row.iter().enumerate() {
                out[(i, j)] = x;
            }
            row = row.into_iter().map(|x| self.frob1(x)).collect();
        }
        Ok(out)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        let c: Vec<u16> = (0..self.params.m).map(|_| self.base.random(rng)).collect();
        self.from_coords(&c)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        loop {
            let a = self.random(rng);
            if a != ExtElem::ZERO {
                return a;
            }
        }
    }

    pub fn random_vec<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<ExtElem> {
        (0..len).map(|_| self.random(rng)).collect()
    }

    /// All field elements in packed order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        let total = self.order().expect("field too large to enumerate");
        (0..total).map(move |mut idx| {
            let q = self.params.q as u128;
            let c: Vec<u16> = (0..self.params.m)
                .map(|_| {
                    let d = (idx % q) as u16;
                    idx /= q;
                    d
                })
                .collect();
            self.from_coords(&c)
        })
    }

    /// Smallest (packed order) element whose conjugates form a normal basis.
    pub fn normal_element(&self) -> ExtElem {
        let m = self.params.m;
        let mut idx = 1u128;
        loop {
            let a = ExtElem(idx);
            idx += 1;
            if !self.is_valid(a) {
                continue;
            }
            let conj: Vec<ExtElem> = (0..m).map(|i| self.frobenius(a, i)).collect();
            if self.is_independent(&conj) {
                return a;
            }
        }
    }

    fn mul_binary(&self, a: u128, b: u128) -> u128 {
        let m = self.params.m as u32;
        let top = 1u128 << (m - 1);
        let mask = if m == 128 {
            u128::MAX
        } else {
            (1u128 << m) - 1
        };
        let (mut r, mut a, mut b) = (0u128, a, b);
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            let carry = a & top != 0;
            a = (a << 1) & mask;
            if carry {
                a ^= self.binary_red;
            }
        }
        r
    }

    fn mul_generic(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let m = self.params.m;
        let (ac, bc) = (self.unpack(a), self.unpack(b));
        let f = &self.base;
        let mut prod = [0u16; 2 * MAX_M];
        for (i, &x) in ac[..m].iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in bc[..m].iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &rj) in self.red.iter().enumerate() {
                prod[d - m + j] = f.add(prod[d - m + j], f.mul(c, rj));
            }
        }
        self.from_coords(&prod[..m])
    }
}

fn unit(m: usize, i: usize) -> Vec<u16> {
    let mut v = vec![0u16; m];
    v[i] = 1;
    v
}

impl Field for ExtField {
    type Elem = ExtElem;

    fn one(&self) -> ExtElem {
        ExtElem(1)
    }

    fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        if self.base.characteristic() == 2 {
            return ExtElem(a.0 ^ b.0);
        }
        let m = self.params.m;
        let (ac, bc) = (self.unpack(a), self.unpack(b));
        let mut s = [0u16; MAX_M];
        for i in 0..m {
            s[i] = self.base.add(ac[i], bc[i]);
        }
        self.from_coords(&s[..m])
    }

    fn neg(&self, a: ExtElem) -> ExtElem {
        if self.base.characteristic() == 2 {
            return a;
        }
        let m = self.params.m;
        let mut s = self.unpack(a);
        for x in s.iter_mut().take(m) {
            *x = self.base.neg(*x);
        }
        self.from_coords(&s[..m])
    }

    fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        if self.params.q == 2 {
            ExtElem(self.mul_binary(a.0, b.0))
        } else {
            self.mul_generic(a, b)
        }
    }

    // a^-1 = N(a)^-1 * a^(q + q^2 + ... + q^(m-1)), N the field norm.
    fn inv(&self, a: ExtElem) -> Option<ExtElem> {
        if a == ExtElem::ZERO {
            return None;
        }
        let mut conj = a;
        let mut b = self.one();
        for _ in 1..self.params.m {
            conj = self.frob1(conj);
            b = self.mul(b, conj);
        }
        let norm = self.mul(a, b);
        let n0 = self.unpack(norm)[0];
        Some(self.scale(b, self.base.inv(n0)?))
    }
}

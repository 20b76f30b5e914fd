use alloc::vec;
use alloc::vec::Vec;

use super::{ExtElem, ExtField, Field};

/// Linearized polynomial `sum p_i x^[i]` with `x^[i] = x^(q^i)`.
///
/// Under composition these form a non-commutative Euclidean ring, which the
/// Gabidulin decoder uses for interpolation and the key equation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearizedPoly {
    coeffs: Vec<ExtElem>,
}

impl LinearizedPoly {
    pub fn zero() -> Self {
        LinearizedPoly { coeffs: Vec::new() }
    }

    /// `x^[i]`.
    pub fn monomial(i: usize) -> Self {
        let mut coeffs = vec![ExtElem::ZERO; i + 1];
        coeffs[i] = ExtElem(1);
        LinearizedPoly { coeffs }
    }

    pub fn identity() -> Self {
        LinearizedPoly::monomial(0)
    }

    pub fn from_coeffs(coeffs: Vec<ExtElem>) -> Self {
        let mut p = LinearizedPoly { coeffs };
        p.trim();
        p
    }

    pub fn coeffs(&self) -> &[ExtElem] {
        &self.coeffs
    }

    /// Coefficient of `x^[i]` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> ExtElem {
        self.coeffs.get(i).copied().unwrap_or(ExtElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// q-degree; `None` for the zero polynomial.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&ExtElem::ZERO) {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, f: &ExtField, x: ExtElem) -> ExtElem {
        let mut acc = ExtElem::ZERO;
        let mut xi = x;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xi = f.frobenius(xi, 1);
            }
            acc = f.add(acc, f.mul(c, xi));
        }
        acc
    }

    pub fn add(&self, f: &ExtField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        LinearizedPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, f: &ExtField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.sub(self.coeff(i), other.coeff(i)))
            .collect();
        LinearizedPoly::from_coeffs(coeffs)
    }

    /// Multiplication by a field constant on the left: `c * p(x)`.
    pub fn scale(&self, f: &ExtField, c: ExtElem) -> Self {
        LinearizedPoly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(c, a)).collect())
    }

    /// `self(other(x))`: coefficient `l` is `sum_{i+j=l} a_i b_j^[i]`.
    pub fn compose(&self, f: &ExtField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LinearizedPoly::zero();
        }
        let mut out = vec![ExtElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        let mut shifted = other.coeffs.clone();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                for b in shifted.iter_mut() {
                    *b = f.frobenius(*b, 1);
                }
            }
            if a == ExtElem::ZERO {
                continue;
            }
            for (j, &b) in shifted.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        LinearizedPoly::from_coeffs(out)
    }

    /// Right division: `self = quotient ∘ divisor + remainder` with
    /// `q_degree(remainder) < q_degree(divisor)`.
    pub fn div_right(&self, f: &ExtField, divisor: &Self) -> (Self, Self) {
        let db = divisor.q_degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[db];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ExtElem::ZERO; rem.len().saturating_sub(db)];
        while rem.len() > db {
            let da = rem.len() - 1;
            let d = da - db;
            // (c x^[d]) ∘ divisor has leading coefficient c * lead^[d]
            let c = f
                .div(rem[da], f.frobenius(lead, d))
                .expect("nonzero leading coefficient");
            quot[d] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[d + j] = f.sub(rem[d + j], f.mul(c, f.frobenius(b, d)));
            }
            while rem.last() == Some(&ExtElem::ZERO) {
                rem.pop();
            }
        }
        (
            LinearizedPoly::from_coeffs(quot),
            LinearizedPoly::from_coeffs(rem),
        )
    }

    /// Left division: `self = divisor ∘ quotient + remainder` with
    /// `q_degree(remainder) < q_degree(divisor)`.
    pub fn div_left(&self, f: &ExtField, divisor: &Self) -> (Self, Self) {
        let db = divisor.q_degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[db];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ExtElem::ZERO; rem.len().saturating_sub(db)];
        while rem.len() > db {
            let da = rem.len() - 1;
            let d = da - db;
            // divisor ∘ (c x^[d]) has leading coefficient lead * c^[db]
            let ratio = f.div(rem[da], lead).expect("nonzero leading coefficient");
            let c = f.inverse_frobenius(ratio, db);
            quot[d] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                let term = f.mul(b, f.frobenius(c, i));
                rem[i + d] = f.sub(rem[i + d], term);
            }
            while rem.last() == Some(&ExtElem::ZERO) {
                rem.pop();
            }
        }
        (
            LinearizedPoly::from_coeffs(quot),
            LinearizedPoly::from_coeffs(rem),
        )
    }

    /// Monic minimal subspace polynomial: the lowest-degree monic linearized
    /// polynomial vanishing on the span of `points`. Its q-degree equals the
    /// dimension of that span.
    pub fn subspace_poly(f: &ExtField, points: &[ExtElem]) -> Self {
        let mut m = LinearizedPoly::identity();
        for &a in points {
            let v = m.eval(f, a);
            if v != ExtElem::ZERO {
                m = step_poly(f, v).compose(f, &m);
            }
        }
        m
    }

    /// Interpolating polynomial of q-degree `< points.len()` with
    /// `p(points[i]) = values[i]`; `points` must be linearly independent.
    pub fn interpolate(f: &ExtField, points: &[ExtElem], values: &[ExtElem]) -> Self {
        assert_eq!(
            points.len(),
            values.len(),
            "points and values differ in length"
        );
        let mut p = LinearizedPoly::zero();
        let mut m = LinearizedPoly::identity();
        for (&a, &y) in points.iter().zip(values) {
            let v = m.eval(f, a);
            let c = f
                .div(f.sub(y, p.eval(f, a)), v)
                .expect("interpolation points are independent");
            p = p.add(f, &m.scale(f, c));
            m = step_poly(f, v).compose(f, &m);
        }
        p
    }
}

// x^[1] - v^(q-1) x, which vanishes exactly on F_q * v.
fn step_poly(f: &ExtField, v: ExtElem) -> LinearizedPoly {
    let vq1 = f.pow(v, f.q() as u64 - 1);
    LinearizedPoly::from_coeffs(vec![f.neg(vq1), ExtElem(1)])
}

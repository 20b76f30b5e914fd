//! Finite-field arithmetic: the base field `F_q`, its degree-`m` extension,
//! the basis map between extension vectors and base matrices, Moore matrices
//! and linearized polynomials.

mod base;
mod ext;
mod linearized;
mod poly;
mod table;

pub use base::BaseField;
pub use ext::{Basis, ExtElem, ExtField, FieldParams};
pub use linearized::LinearizedPoly;
pub use table::binary_modulus_exponents;

use core::fmt::Debug;
use core::hash::Hash;

/// A finite field with explicit context. Elements are plain `Copy` values and
/// all arithmetic goes through the field object.
///
/// `Default::default()` of the element type is the zero element.
pub trait Field {
    type Elem: Copy + Eq + Ord + Hash + Debug + Default;

    fn zero(&self) -> Self::Elem {
        Self::Elem::default()
    }
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }
    fn is_zero(&self, a: Self::Elem) -> bool {
        a == Self::Elem::default()
    }
    fn div(&self, a: Self::Elem, b: Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }
}

//! Coefficient rings, polynomials, Gröbner bases, dense linear algebra over
//! ℚ and ℤ/pⁿ, cochain complexes, graded resolutions and Ext.

pub mod complex;
pub mod ext;
pub mod graded;
pub mod groebner;
pub mod matrix;
pub mod poly;
pub mod polyparse;
pub mod scalar;
pub mod zpn;

pub use complex::{FreeComplex, HomologyModule};
pub use ext::ExtClass;
pub use graded::{FinModule, FreeModule, GradedModule, GradedRing, Resolution};
pub use groebner::Ideal;
pub use matrix::Matrix;
pub use poly::{Mono, MonomialOrder, MultiPoly, Poly};
pub use scalar::{BaseRing, Coeff, Rational, Scalar, Zpn};
pub use zpn::Span;

//! Exact arithmetic: rationals, number fields, polynomials and symbolic constants.

pub mod factor;
pub mod linalg;
pub mod multipoly;
pub mod nf;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod symbolic;

pub use multipoly::{poly_apply_laplacian, MultiPoly};
pub use nf::{complex_conj, gauss, gaussian_field, nf_norm, NfElem, NumberField};
pub use poly::Poly;
pub use rational::{ri, rq, Rational};
pub use ring::{Field, Ring};
pub use symbolic::SymbolicConstant;

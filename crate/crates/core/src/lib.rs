//! Exact computations for diffusion algebras: reduction to ordered
//! monomials, overlap confluence, classification into the families
//! A_I, A_II, B, C, D, and construction and certification of first-order
//! twisted differential calculi with an integrating volume form.

pub mod calculus;
pub mod classifier;
pub mod cli;
pub mod expr;
pub mod par;
pub mod pbw;
pub mod presentation;
pub mod scalar;
pub mod smoothness;

pub use par::Execution;
pub use pbw::{Monomial, PbwPolynomial, Rewriter, Strategy, Word};
pub use presentation::AlgebraPresentation;
pub use scalar::Scalar;

//! Unit decompositions of the identity and the polytopes they generate.
//!
//! An `(n, k)`-uframe is a list of `n` vectors in `R^k` with
//! `Σ v_i ⊗ v_i = I_k`. The crate computes the projection `co{±v_i}` of the
//! cross-polytope, the section `∩ {|⟨x, v_i⟩| ≤ 1}` of the cube, their
//! volumes and local structure, and searches for extremal frames.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! `f64`.

// `!(x < y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremal;
pub mod frames;
pub mod geometry;
pub mod linalg;
pub mod optimize;
pub mod rng;
pub mod scalar;
pub mod sections;

pub use error::{Error, Result};
pub use frames::{Frame, GramCertificate, SymMatrix, UFrame};
pub use scalar::Real;

pub type Frame64 = frames::Frame<f64>;
pub type UFrame64 = frames::UFrame<f64>;
pub type GramCertificate64 = frames::GramCertificate<f64>;
pub type SymPolytope64 = geometry::SymPolytope<f64>;
pub type StarDecomposition64 = geometry::StarDecomposition<f64>;
pub type LambdaProfile64 = geometry::LambdaProfile<f64>;
pub type SectionPolytope64 = sections::SectionPolytope<f64>;
pub type OptimizationReport64 = optimize::OptimizationReport<f64>;
pub type MultiStartReport64 = optimize::MultiStartReport<f64>;
pub type Move64 = optimize::Move<f64>;

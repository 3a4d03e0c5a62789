//! Exact computations with ternary derivations on finite nest algebras.
//!
//! A nest on the diagonal positions 1..n is a chain of cut points; the
//! algebra it carries consists of the block upper-triangular matrices
//! staying above the chain. This crate models those algebras over the
//! rationals and the Gaussian rationals, decides when a pair of linear maps
//! (delta, tau) respects zero products — delta(a)b + a tau(b) = 0 whenever
//! ab = 0 — and, when it does, completes the pair to the unique ternary
//! derivation gamma(a) = Ra + aT it generates. Everything is exact: no
//! floating point, no randomized verdicts, and every negative answer comes
//! with a concrete witness pair that can be rechecked by hand.
//!
//! The high-level entry points:
//!
//! * [`nest::NestAlgebra`] — the structure-constant model, its canonical
//!   zero-product family, center, radical, and derivation space.
//! * [`engine`] — compatibility reports, the staged implementing-triple
//!   solver, completion, extraction, and the uniqueness certificate.
//! * [`apps`] — specialized checkers (centralizers, derivations vanishing
//!   on zero products, generalized derivations, local-to-global problems).
//! * [`counterexample`] — the four-dimensional contrast algebra where the
//!   compatibility condition holds but no completion exists, and why no
//!   nest algebra can replicate it.
//! * [`report`] — seeded campaign drivers with deterministic JSON output,
//!   shared by the command-line tool and the acceptance tests.

pub mod apps;
pub mod counterexample;
pub mod engine;
pub mod error;
pub mod mat;
pub mod nest;
pub mod report;
pub mod rng;
pub mod scalar;

pub use error::{Error, ViolationBundle};
pub use mat::{Mat, SolutionSet};
pub use nest::{AlgElement, NestAlgebra, NestSpec, WitnessPair};
pub use scalar::{FieldMode, Scalar};

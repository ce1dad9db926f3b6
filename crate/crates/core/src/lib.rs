//! Context-sensitive rewriting over sorted term rewriting systems.
//!
//! Replacement maps, the μ-rewriting engine, structural analyses,
//! the shallowing transformation, μ-termination proofs and disproofs,
//! and verdicts on constructor normalization and productivity.

pub mod analysis;
pub mod csr;
pub mod productivity;
pub mod repmap;
pub mod syntax;
pub mod term;
pub mod termination;
pub mod transform;

//! Order-as-supervision pre-training toolkit for procedural text.
//!
//! Recipes are ordered step sequences, and that order is a free training
//! signal. This crate turns a recipe corpus into labeled examples for three
//! pretext tasks — permutation classification, permutation-embedding
//! regression, and skip-clip ranking — and ships the numeric machinery to
//! train and verify a small reference model on them:
//!
//! - [`perm`]: permutations over step indices, Hamming / Kendall-tau
//!   distances, Lehmer and Hamming embedding codecs, and greedy
//!   maximal-Hamming permutation-set generation.
//! - [`corpus`]: streaming JSONL recipe ingestion, filtering, ingredient-step
//!   augmentation, and corpus statistics.
//! - [`taskgen`]: deterministic, seed-keyed training-example generators.
//! - [`model`]: a hashed-feature text encoder, exact losses with analytic
//!   gradients, a plain SGD training loop, and finite-difference checking.
//! - [`eval`]: entity state derivation and category scoring for
//!   procedural-text predictions.

pub mod corpus;
pub mod eval;
pub mod model;
pub mod perm;
pub mod taskgen;

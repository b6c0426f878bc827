//! Network embedding as explicit matrix factorization.
//!
//! The crate constructs the closed-form matrices that DeepWalk, LINE, PTE,
//! and node2vec implicitly factorize, factorizes them (exactly for small
//! windows, through a rank-h spectral approximation for large ones), and
//! provides the machinery to check the theory numerically: Monte-Carlo walk
//! corpora, spectral bound verification, approximation-error accounting, and
//! a multi-label classification harness.

pub mod closed_form;
pub mod error;
pub mod eval;
pub mod graph;
pub mod netmf;
pub mod sparse;
pub mod spectral;
pub mod synth;
pub mod walk;

pub use error::{Error, Result};

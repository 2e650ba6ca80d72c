//! MergeBarrier: merge-resistant weight protection for a toy decoder-only
//! transformer, together with the merging toolbox it defends against, the
//! decode/revert/fine-tune attacks it must survive, and the loss-landscape
//! machinery that shows why it works.
//!
//! The crate is organized as a stack:
//!
//! - [`numkit`] — dense linear algebra (QR, Jacobi eigh, randomized SVD) and
//!   a counter-based RNG; everything else sits on top of it.
//! - [`activations`] — GELU/SiLU values and exact n-th derivatives.
//! - [`model`] — the toy transformer with hand-written gradients, a trainer,
//!   and synthetic tasks.
//! - [`protect`] — orthogonal attention projection and Taylor FFN
//!   reparameterization.
//! - [`merge`] — Task Arithmetic, TIES, and DARE over named tensors.
//! - [`attack`] — layer revert, permutation/scaling decode, fine-tuning.
//! - [`eval`] — interpolation curves, PCA loss landscapes, sharpness, and
//!   the end-to-end scenario runner.
//! - [`weights_io`] — the MBWT container format.
//! - [`cli`] — the `mergebarrier` command-line front end.

pub mod activations;
pub mod attack;
pub mod cli;
pub mod error;
pub mod eval;
pub mod merge;
pub mod model;
pub mod numkit;
pub mod protect;
pub mod weights_io;

pub use error::{Error, Result};

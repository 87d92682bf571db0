//! An (n, k) MDS array code with n/3 groups of three nodes and
//! subpacketization `ell = 2^(n/3)` over a prime field GF(p).
//!
//! The code tolerates any `r = n - k` node erasures and repairs a single
//! failed node from any `d = k + 1` helpers, each sending exactly
//! `ell / 2` symbols — the cut-set lower bound `d * ell / (d - k + 1)`.
//!
//! Module map:
//! - [`field`]: GF(p) arithmetic.
//! - [`linalg`]: dense matrices, solving, determinants.
//! - [`construct`]: constant selection and the sparse parity blocks.
//! - [`codec`]: encode, verify, group swaps, erasure decoding.
//! - [`repair`]: bandwidth-optimal single-node repair.
//! - [`verify`]: numeric oracles and exhaustive sweeps.

pub mod codec;
pub mod construct;
pub mod error;
pub mod field;
pub mod linalg;
pub mod repair;
pub mod verify;

pub use codec::{Codeword, ErasureSolver, ErasureType, GroupSwap};
pub use construct::{CodeParams, ParityBlocks};
pub use error::{CodeError, Result};
pub use field::Field;
pub use linalg::{Matrix, Solution};
pub use repair::{ReducedBlocks, ReducedSystem, RepairContext, RepairPlan, RepairTranscript};
pub use verify::{FilterPolys, SweepReport, TypeVector};

//! Exact-arithmetic flag varieties over finite fields.
//!
//! The crate builds the complete flag variety Fl(n) over F_q, decomposes it
//! into Schubert cells, evaluates the reproducing kernel
//! K(V, W) = (-q)^{-k(V, W)} exactly, and certifies the Steinberg subspace of
//! functions on Fl(n) — its dimension, positive semidefiniteness of kernel
//! Gram matrices, and the kernel's identification with the B-invariant
//! function eta. A windowed model of the doubly infinite flag space Fl(2∞)
//! extends the kernel to the inductive limit.
//!
//! All verification paths run over exact rationals with arbitrary-precision
//! integers; no floating point is used anywhere.

pub mod biflag;
pub mod error;
pub mod flag;
pub mod gfq;
pub mod kernel;
pub mod linalg;
pub mod perm;
pub mod rational;
pub mod serial;
pub mod steinberg;

pub use error::{Error, Result};

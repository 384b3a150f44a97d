//! Exact hard-instance families for nonsmooth convex minimization, the local
//! oracles that answer queries about them, and the machinery for reducing
//! those oracles to a bit-guessing game whose information content can be
//! accounted for exactly.
//!
//! The crate is split along the objects it models:
//!
//! * [`bitstr`] / [`dyadic`] — exact value types: binary strings indexing
//!   instances, and dyadic rationals so the recursive family evaluates
//!   without rounding.
//! * [`family_1d`], [`family_box`], [`family_lp`], [`perturbed`] — the
//!   instance families with their breakpoints, packing witnesses and
//!   single-coordinate oracles.
//! * [`sgp`] — the string-guessing oracle, exact posterior tracking and
//!   guessing strategies.
//! * [`oracle`] — transcripts, emulations and locality checks.
//! * [`info`] — entropy/Fano arithmetic and per-query information audits.
//! * [`opt`] — algorithms that consume the oracles (subgradient descent,
//!   tailored learners, random search).
//!
//! Everything here is `no_std` + `alloc`; IO, serialization and the batch
//! harness live in the companion `qclab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitstr;
pub mod dyadic;
pub mod error;
pub mod family_1d;
pub mod family_box;
pub mod family_lp;
pub mod info;
mod math;
pub mod opt;
pub mod oracle;
pub mod perturbed;
pub mod rng;
pub mod sgp;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;

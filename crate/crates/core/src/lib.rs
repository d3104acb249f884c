//! Link-level simulation of uplink multi-user MIMO with a Rydberg atomic
//! quantum receiver array, alongside a conventional antenna array.
//!
//! The pipeline runs from the atomic response of a four-level ladder
//! ([`atomic`]) through the per-element receiver model ([`frontend`]) and
//! the fading channel ([`channel`]) to Monte Carlo rates ([`link`]) and
//! their closed-form bounds ([`rates`]). [`sweep`] and [`output`] drive the
//! figure campaigns.

// `!(x >= lo)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod channel;
pub mod config;
pub mod constants;
pub mod error;
pub mod frontend;
pub mod linalg;
pub mod link;
pub mod output;
pub mod rates;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};

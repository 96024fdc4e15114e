//! Conversion between single-party quantum coherence and multipartite
//! entanglement under incoherent operations.
//!
//! The crate is organized bottom-up:
//!
//! - [`matcore`]: dense complex matrices, partial traces and entropies
//! - [`states`]: validated density matrices, maximally correlated states, samplers
//! - [`channels`]: incoherent Kraus channels, `U_mcn`, LICC instruments, noise
//! - [`measures`]: coherence and entanglement quantifiers with kind-tagged results
//! - [`protocols`]: conversion, LICC transfer, the cyclic protocol and the theorem harness
//! - [`multilevel`]: genuine multi-level entanglement detection
//! - [`dynamics`]: depolarizing dynamics and the sudden-death line
//! - [`io`] and [`cli`]: JSON/CSV formats and the command-line front end

pub mod channels;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod matcore;
pub mod measures;
pub mod multilevel;
pub mod protocols;
pub mod rng;
pub mod states;

pub use error::{Error, Result};

/// Crate version embedded in every CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

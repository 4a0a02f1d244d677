//! Finite-horizon combinatorics of the Cantor cube `2^ω`.
//!
//! Every object here is a finite truncation: words on coordinate intervals,
//! block sets with exact rational measure, level trees up to a horizon,
//! slaloms over finite products, and the explicit constructions built from
//! them. Each construction ships with a verifier that re-checks its claimed
//! inequalities in exact arithmetic and records the outcome in a
//! [`certificate::Certificate`].

pub mod certificate;
pub mod construct;
pub mod cube;
pub mod error;
pub mod exact;
pub mod meagerrep;
pub mod replay;
pub mod slalom;
pub mod solve;
pub mod trees;
pub mod twoscale;

pub use cube::{BlockSet, Word};
pub use error::{Error, Result};
pub use exact::Rational;

//! Exact photon-number statistics of a lossless beam-splitter fed by Fock
//! states, computed two independent ways: by summing indistinguishable
//! detection paths and by expanding the output creation operators.

pub mod error;
pub mod extended;
pub mod feynman;
pub mod numerics;
pub mod oracle;
pub mod splitter;
pub mod scenarios;
pub mod state;
pub mod sweep;
pub mod cli;

pub use error::{Error, Result};

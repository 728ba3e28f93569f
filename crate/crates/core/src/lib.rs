//! Collective-attack analysis for prepare-and-measure, measurement-device-independent
//! and entanglement-based QKD.
//!
//! Eve's attack is a weak-measurement coupling `T|x⟩|E⟩ = |x⟩|E_x⟩` on the signal
//! frame `{|p⟩, |q⟩}`, followed by unambiguous state discrimination on her stored
//! ancilla once the bases are announced. The crate computes the exact channel
//! (transition probabilities, Eve's conditional states, BER), the leakage this
//! yields, and the key rates and tolerable error thresholds it implies.
//!
//! Modules:
//! - [`linalg`]: dense complex vectors and operators in dimension 2 and 4, entropies.
//! - [`attack`]: closed-form weak-measurement channel for single-photon protocols.
//! - [`usd`]: guessing matrices and leakage from unambiguous discrimination.
//! - [`entangled`]: the same attack applied to a shared Bell pair, plus CHSH.
//! - [`keyrate`]: key-rate bounds and threshold root finding.
//! - [`oracle`]: brute-force unitary simulation used to check [`attack`].
//! - [`output`]: CSV/JSON emission used by the command-line front end.

pub mod attack;
pub mod entangled;
mod error;
pub mod keyrate;
pub mod linalg;
pub mod oracle;
pub mod output;
pub mod usd;

pub use error::{Error, Result};

//! Entanglement of superposed tripartite pure states.
//!
//! The crate computes bipartite entanglement measures of the `A ⊗ B`
//! reduction of tripartite pure states (von Neumann entropy, Wootters
//! concurrence, concurrence of assistance), evaluates upper and lower bounds
//! on the entanglement of a superposition `αΦ + βΨ` in terms of the
//! entanglement of `Φ` and `Ψ`, and certifies the closed forms with a
//! brute-force search over ensemble decompositions.
//!
//! Basis index convention throughout: `(a·dB + b)·dC + c`.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use measures::MeasureSet;
pub use states::{Dims, Ensemble, PureTripartiteState};

//! Simulation and analysis of multiphoton coincidences at the outputs of a
//! Mach-Zehnder interferometer, and the classical bound on their N-fold
//! visibility.
//!
//! The pieces, bottom up:
//!
//! * [`fock`]: two-mode Fock space and block-diagonal passive unitaries.
//! * [`states`]: coherent products, NOON states, Fock pairs, coherent-state
//!   mixtures.
//! * [`detector`]: number-resolving detector response (loss, dark counts,
//!   cross-talk).
//! * [`coincidence`]: coincidence rates `C_{m,n}(phi)` and phase scans.
//! * [`visibility`]: Fourier fits, N-fold visibility, shift-and-superimpose,
//!   bootstrap errors.
//! * [`bound`]: the exact classical bound, verdicts, randomized domination
//!   check.
//! * [`montecarlo`]: finite-shot synthetic data.
//! * [`battery`]: self-checks behind `mzi-bound verify`.
//! * [`cli`]: the `mzi-bound` command line and its scan/report file formats.
//!
//! ```
//! use mzi_bound::bound::classical_bound;
//!
//! let gamma = classical_bound(2, 1).unwrap();
//! assert_eq!(gamma.to_string(), "1/2 (50%)");
//! ```

pub mod battery;
pub mod bound;
pub mod cli;
pub mod coincidence;
pub mod detector;
pub mod error;
pub mod fock;
pub mod montecarlo;
pub mod states;
pub mod visibility;

pub use error::{Error, Result};

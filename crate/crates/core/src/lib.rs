//! Synthesis of global ZZ (GZZ) gates from a fixed Ising coupling and
//! compilation of Clifford layers, the QFT, Givens layers and diagonal
//! unitaries into GZZ gates.
//!
//! Every compiled output can be checked against a brute-force simulator in
//! [`circuit`]; qubit counts up to 10 are supported for dense checks and up
//! to 16 for diagonal ones.

pub mod chempass;
pub mod circuit;
pub mod cliffordpass;
pub mod diagpass;
mod error;
pub mod frame;
pub mod qftpass;
pub mod schedule;
pub mod solver;
pub mod trapmodel;

pub use circuit::{Angle, BitMatrix, Circuit, DiagonalPhases, Gate};
pub use error::{Error, Result};
pub use frame::{Encoding, HollowSymmetric};
pub use schedule::Schedule;
pub use solver::{Decomposition, SolveOptions};
pub use trapmodel::{CouplingMatrix, TrapParams};

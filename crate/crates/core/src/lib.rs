//! Numerics for the resource theory of dephasing estimation: quantum Fisher
//! information, phase-damping channels, and membership tests for the
//! HDP / SHP / SIO / DIO channel classes.

pub mod channels;
pub mod classify;
pub mod error;
pub mod fisher;
pub mod hamming;
pub mod io;
pub mod linalg;
pub mod random;
pub mod state;
pub mod transform;

pub use channels::{ChoiMatrix, KrausChannel, NamedChannel};
pub use error::{Error, Result};
pub use hamming::HdFunction;
pub use linalg::{ComplexMatrix, C64};
pub use state::{BlochVector, DensityMatrix, Hamiltonian};

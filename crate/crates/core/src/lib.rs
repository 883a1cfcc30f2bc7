//! Synthesis and optimization of reversible networks built from multiple-control
//! Toffoli gates.
//!
//! The crate is organised bottom-up:
//!
//! * [`gate`], [`function`], [`network`], [`cost`] and [`format`] hold the value
//!   types, simulation and text formats.
//! * [`rmspectra`] implements the positive-polarity Reed-Muller transform and
//!   applies gates directly in the spectral domain.
//! * [`synthesis`] contains the three synthesis engines (greedy RM-cost
//!   reduction, the row-by-row spectral engine and the truth-table baseline).
//! * [`templates`] finds, generalizes and applies identity templates.
//! * [`resynth`] extracts subnetworks and resynthesizes them.
//! * [`pipeline`], [`study`] and [`bench`] tie everything together.

pub mod bench;
pub mod cost;
pub mod format;
pub mod function;
pub mod gate;
pub mod network;
pub mod pipeline;
pub mod resynth;
pub mod rmspectra;
pub mod study;
pub mod synthesis;
pub mod templates;

mod error;

pub use cost::{CostMode, CostModel, CostValue, QuantumCostTable};
pub use error::{Error, Result};
pub use function::ReversibleFunction;
pub use gate::ToffoliGate;
pub use network::Network;
pub use rmspectra::RmSpectra;

/// Hard upper bound on the number of lines a function may have.
pub const MAX_WIDTH: usize = 21;
/// Default width cap; truth tables beyond this size must be requested explicitly.
pub const DEFAULT_WIDTH_CAP: usize = 16;

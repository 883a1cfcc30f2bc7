//! Synthesis engines: each turns a [`ReversibleFunction`] into a [`Network`].
//!
//! * [`synthesize_greedy`] repeatedly applies the candidate gate with the best
//!   effect on the RM cost. It can diverge.
//! * [`synthesize_rm`] walks the spectra row by row and always converges.
//! * [`synthesize_mmd`] is the truth-table row walk used as a baseline.

mod bounds;
mod greedy;
mod mmd;
mod rm;

use std::fmt;

pub use bounds::{theorem1_bounds, GateClassCounts, RmBounds};
pub use greedy::synthesize_greedy;
pub use mmd::{mmd_row_gates, synthesize_mmd};
pub use rm::{rm_fix_nonvariable_row, rm_fix_row, rm_fix_row_zero, rm_fix_variable_row, synthesize_rm};

use crate::cost::CostModel;
use crate::function::ReversibleFunction;
use crate::gate::ToffoliGate;
use crate::network::Network;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Greedy,
    Rm,
    Mmd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Greedy, Method::Rm, Method::Mmd];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Rm => "rm",
            Method::Mmd => "mmd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Unidirectional,
    Bidirectional,
}

#[derive(Clone, Debug)]
pub struct SynthOptions {
    pub method: Method,
    pub direction: Direction,
    /// Only consider candidate gates with at most this many controls (greedy).
    pub max_controls: Option<usize>,
    /// Greedy gives up once it would need more gates than this.
    pub gate_budget: Option<usize>,
    pub cost_model: CostModel,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            method: Method::Rm,
            direction: Direction::Bidirectional,
            max_controls: None,
            gate_budget: None,
            cost_model: CostModel::gate_count(),
        }
    }
}

impl SynthOptions {
    pub fn new(method: Method, direction: Direction) -> Self {
        SynthOptions {
            method,
            direction,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Converged(Network),
    /// Greedy stopped at its budget after emitting this many gates.
    Diverged(usize),
}

#[derive(Clone, Debug)]
pub struct SynthResult {
    pub outcome: Outcome,
    pub gates_examined: u64,
    pub method: Method,
}

impl SynthResult {
    pub fn network(&self) -> Option<&Network> {
        match &self.outcome {
            Outcome::Converged(n) => Some(n),
            Outcome::Diverged(_) => None,
        }
    }

    pub fn into_network(self) -> Option<Network> {
        match self.outcome {
            Outcome::Converged(n) => Some(n),
            Outcome::Diverged(_) => None,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self.outcome, Outcome::Converged(_))
    }
}

/// Run the engine selected by `opts.method`.
pub fn synthesize(f: &ReversibleFunction, opts: &SynthOptions) -> SynthResult {
    match opts.method {
        Method::Greedy => synthesize_greedy(f, opts),
        Method::Rm => synthesize_rm(f, opts),
        Method::Mmd => synthesize_mmd(f, opts),
    }
}

/// Every `TOF(C;t)` on `n` lines, fewest controls first, then by target, then
/// by control set read as a number.
pub fn candidate_gates(n: usize, max_controls: Option<usize>) -> Vec<ToffoliGate> {
    let cap = max_controls.unwrap_or(n.saturating_sub(1)).min(n.saturating_sub(1));
    let mut out = Vec::new();
    for k in 0..=cap {
        for t in 0..n {
            for c in 0u32..(1 << n) {
                if c & (1 << t) == 0 && c.count_ones() as usize == k {
                    out.push(ToffoliGate::from_mask(c, t).expect("target excluded from controls"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_gates(3, None).len(), 12);
        assert_eq!(candidate_gates(2, None).len(), 4);
        // 3 NOT + 3 targets x 2 single controls.
        assert_eq!(candidate_gates(3, Some(1)).len(), 9);
        for n in 1..=8 {
            assert_eq!(candidate_gates(n, None).len(), n << (n - 1));
        }
    }

    #[test]
    fn candidate_order() {
        let c = candidate_gates(3, None);
        assert_eq!(c[0], ToffoliGate::not(0));
        assert_eq!(c[3], ToffoliGate::cnot(1, 0));
        assert_eq!(c[4], ToffoliGate::cnot(2, 0));
        assert_eq!(c[11], ToffoliGate::toffoli(0, 1, 2));
    }
}

use std::collections::HashMap;

use crate::function::ReversibleFunction;
use crate::network::Network;
use crate::rmspectra::{identity_row, product_spectrum_from_truth, RmSpectra};

use super::{candidate_gates, synthesize_rm, Direction, Method, Outcome, SynthOptions, SynthResult};

/// Budget used when the caller gives none: the gate count of the
/// bidirectional spectral engine on the same function.
pub(crate) fn default_budget(f: &ReversibleFunction, opts: &SynthOptions) -> usize {
    let rm_opts = SynthOptions {
        method: Method::Rm,
        direction: Direction::Bidirectional,
        ..opts.clone()
    };
    synthesize_rm(f, &rm_opts)
        .network()
        .map(|n| n.len())
        .unwrap_or(0)
}

/// Number of entries of column `t` that differ from the identity spectra.
fn column_cost(rows: &[u32], t: usize) -> usize {
    rows.iter()
        .enumerate()
        .filter(|&(r, &row)| (row ^ identity_row(r)) >> t & 1 == 1)
        .count()
}

/// Greedy RM-cost descent.
///
/// Each step evaluates every candidate gate and applies the one giving the
/// lowest RM cost, ties going to the earlier candidate. Unidirectional runs
/// only apply gates at the output side; bidirectional runs also try every
/// candidate at the input side, the output side winning ties. The move that
/// would undo the previous step is never taken.
pub fn synthesize_greedy(f: &ReversibleFunction, opts: &SynthOptions) -> SynthResult {
    let n = f.width();
    let budget = opts.gate_budget.unwrap_or_else(|| default_budget(f, opts));
    let candidates = candidate_gates(n, opts.max_controls);
    let both_sides = opts.direction == Direction::Bidirectional;
    let mut s = RmSpectra::of(f);
    let mut output_side = Vec::new();
    let mut input_side = Vec::new();
    let mut last: Option<(usize, bool)> = None;
    let mut examined = 0u64;

    loop {
        if s.is_identity() {
            output_side.reverse();
            input_side.extend(output_side);
            return SynthResult {
                outcome: Outcome::Converged(Network::from_gates_unchecked(n, input_side)),
                gates_examined: examined,
                method: Method::Greedy,
            };
        }
        let used = output_side.len() + input_side.len();
        if used >= budget {
            return SynthResult {
                outcome: Outcome::Diverged(used),
                gates_examined: examined,
                method: Method::Greedy,
            };
        }
        let rows = s.rows();
        let truth = s.truth_table();
        let col_costs: Vec<usize> = (0..n).map(|t| column_cost(rows, t)).collect();
        let total: usize = col_costs.iter().sum();
        let mut products: HashMap<u32, Vec<u32>> = HashMap::new();
        // (cost, candidate index, input side)
        let mut best: Option<(usize, usize, bool)> = None;
        let mut consider = |key: (usize, usize, bool)| {
            if last != Some((key.1, key.2)) && best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        };
        for (idx, g) in candidates.iter().enumerate() {
            examined += 1;
            let p = products
                .entry(g.controls())
                .or_insert_with(|| product_spectrum_from_truth(&truth, g.controls()));
            let t = g.target();
            let new_col = rows
                .iter()
                .zip(p.iter())
                .enumerate()
                .filter(|&(r, (&row, &pr))| ((row ^ identity_row(r)) >> t ^ pr) & 1 == 1)
                .count();
            consider((total - col_costs[t] + new_col, idx, false));
            if both_sides {
                examined += 1;
                let mut trial = s.clone();
                trial.apply_gate_input_side(g);
                consider((trial.rm_cost(), idx, true));
            }
        }
        let (_, idx, input) = best.expect("at least two candidate gates");
        let g = candidates[idx];
        if input {
            s.apply_gate_input_side(&g);
            input_side.push(g);
        } else {
            s.apply_gate_output_side(&g);
            output_side.push(g);
        }
        last = Some((idx, input));
    }
}

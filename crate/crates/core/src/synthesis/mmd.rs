use crate::function::ReversibleFunction;
use crate::gate::ToffoliGate;
use crate::network::Network;

use super::{Direction, Method, Outcome, SynthOptions, SynthResult};

/// Output-side gates that turn value `v` into `i` without disturbing any row
/// below `i`. Bits that must be set come first, then bits that must be
/// cleared, each in ascending line order.
pub fn mmd_row_gates(v: u32, i: u32, width: usize) -> Vec<ToffoliGate> {
    let mut gates = Vec::new();
    if i == 0 {
        for j in 0..width {
            if v >> j & 1 == 1 {
                gates.push(ToffoliGate::not(j));
            }
        }
        return gates;
    }
    let mut v = v;
    for p in 0..width {
        let bit = 1 << p;
        if i & bit != 0 && v & bit == 0 {
            gates.push(ToffoliGate::from_mask(v, p).expect("p is clear in v"));
            v |= bit;
        }
    }
    for p in 0..width {
        let bit = 1 << p;
        if v & bit != 0 && i & bit == 0 {
            gates.push(ToffoliGate::from_mask(v & !bit, p).expect("p removed from controls"));
            v &= !bit;
        }
    }
    gates
}

/// `table[x] = g(table[x])` for every entry.
fn apply_output(table: &mut [u32], g: &ToffoliGate) {
    for v in table.iter_mut() {
        *v = g.apply(*v);
    }
}

/// Compose `g` on the input side: `table' = table ∘ g`.
fn apply_input(table: &mut [u32], g: &ToffoliGate) {
    let c = g.controls();
    let bit = 1u32 << g.target();
    for x in 0..table.len() as u32 {
        if x & c == c && x & bit == 0 {
            table.swap(x as usize, (x | bit) as usize);
        }
    }
}

pub fn synthesize_mmd(f: &ReversibleFunction, opts: &SynthOptions) -> SynthResult {
    let n = f.width();
    let mut t = f.table().to_vec();
    let mut tinv = f.inverse().into_table();
    let bidirectional = opts.direction == Direction::Bidirectional;
    let model = &opts.cost_model;
    let mut output_side = Vec::new();
    let mut input_side = Vec::new();
    let mut examined = 0u64;

    for i in 0..t.len() as u32 {
        let iu = i as usize;
        if t[iu] == i {
            continue;
        }
        let gf = mmd_row_gates(t[iu], i, n);
        examined += gf.len() as u64;
        let use_output = if bidirectional {
            let gi = mmd_row_gates(tinv[iu], i, n);
            examined += gi.len() as u64;
            if model.cost_of(&gi, n) < model.cost_of(&gf, n) {
                for g in &gi {
                    apply_output(&mut tinv, g);
                    apply_input(&mut t, g);
                }
                input_side.extend(gi);
                false
            } else {
                true
            }
        } else {
            true
        };
        if use_output {
            for g in &gf {
                apply_output(&mut t, g);
                if bidirectional {
                    apply_input(&mut tinv, g);
                }
            }
            output_side.extend(gf);
        }
        debug_assert_eq!(t[iu], i);
    }
    output_side.reverse();
    input_side.extend(output_side);
    SynthResult {
        outcome: Outcome::Converged(Network::from_gates_unchecked(n, input_side)),
        gates_examined: examined,
        method: Method::Mmd,
    }
}

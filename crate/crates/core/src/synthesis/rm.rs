use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::gate::ToffoliGate;
use crate::network::Network;
use crate::rmspectra::{identity_row, RmSpectra};

use super::{Direction, Method, Outcome, SynthOptions, SynthResult};

/// Row 0: one NOT per nonzero coefficient.
pub fn rm_fix_row_zero(s: &RmSpectra) -> Vec<ToffoliGate> {
    let row = s.row(0);
    (0..s.width())
        .filter(|j| row >> j & 1 == 1)
        .map(ToffoliGate::not)
        .collect()
}

/// Variable row `2^k` (0-based line `k`). Rows before it must already match
/// the identity.
pub fn rm_fix_variable_row(s: &RmSpectra, k: usize) -> Result<Vec<ToffoliGate>> {
    let i = 1usize << k;
    let mut row = s.row(i);
    let mut gates = Vec::new();
    if row & (1 << k) == 0 {
        if row == 0 {
            return Err(Error::Integrity(format!("variable row {i} is all zero")));
        }
        let pivot = 31 - row.leading_zeros() as usize;
        if pivot < k {
            return Err(Error::Integrity(format!(
                "variable row {i} has no pivot above line {k}"
            )));
        }
        gates.push(ToffoliGate::cnot(pivot, k));
        row |= 1 << k;
    }
    for j in 0..s.width() {
        if j != k && row >> j & 1 == 1 {
            gates.push(ToffoliGate::cnot(k, j));
        }
    }
    Ok(gates)
}

/// Non-variable row `i`: collect the ones onto a pivot line outside the
/// monomial, clear it with `TOF(X_i; pivot)` and undo the collecting gates
/// when they disturbed an earlier row.
pub fn rm_fix_nonvariable_row(s: &RmSpectra, i: usize) -> Result<Vec<ToffoliGate>> {
    debug_assert!(i > 0 && !i.is_power_of_two());
    let row = s.row(i);
    if row == 0 {
        return Ok(Vec::new());
    }
    let outside = row & !(i as u32);
    if outside == 0 {
        return Err(Error::Integrity(format!(
            "row {i} has no pivot outside its monomial"
        )));
    }
    let pivot = 31 - outside.leading_zeros() as usize;
    let collect: Vec<ToffoliGate> = (0..s.width())
        .filter(|&j| j != pivot && row >> j & 1 == 1)
        .map(|j| ToffoliGate::cnot(pivot, j))
        .collect();
    let closing = ToffoliGate::from_mask(i as u32, pivot).expect("pivot lies outside the monomial");
    let mut gates = collect.clone();
    gates.push(closing);
    if (1usize << pivot) < i {
        gates.extend(collect);
    }
    Ok(gates)
}

pub fn rm_fix_row(s: &RmSpectra, i: usize) -> Result<Vec<ToffoliGate>> {
    if i == 0 {
        Ok(rm_fix_row_zero(s))
    } else if i.is_power_of_two() {
        rm_fix_variable_row(s, i.trailing_zeros() as usize)
    } else {
        rm_fix_nonvariable_row(s, i)
    }
}

fn leading_rows_fixed(s: &RmSpectra, upto: usize) -> bool {
    s.rows()[..upto]
        .iter()
        .enumerate()
        .all(|(r, &row)| row == identity_row(r))
}

const PIVOT: &str = "a bijection always has a pivot";

pub fn synthesize_rm(f: &ReversibleFunction, opts: &SynthOptions) -> SynthResult {
    let n = f.width();
    let rows = 1usize << n;
    let mut examined = 0u64;
    let mut sf = RmSpectra::of(f);
    // Output-side gates in application order; they end up reversed.
    let mut output_side: Vec<ToffoliGate> = Vec::new();
    let mut input_side: Vec<ToffoliGate> = Vec::new();

    match opts.direction {
        Direction::Unidirectional => {
            for i in 0..rows - 1 {
                let gates = rm_fix_row(&sf, i).expect(PIVOT);
                examined += gates.len() as u64;
                for g in &gates {
                    sf.apply_gate_output_side(g);
                }
                debug_assert_eq!(sf.row(i), identity_row(i));
                output_side.extend(gates);
            }
        }
        Direction::Bidirectional => {
            let mut sinv = RmSpectra::of(&f.inverse());
            let model = &opts.cost_model;
            for i in 0..rows - 1 {
                let gf = rm_fix_row(&sf, i).expect(PIVOT);
                let gi = rm_fix_row(&sinv, i).expect(PIVOT);
                examined += (gf.len() + gi.len()) as u64;
                if gf.is_empty() && gi.is_empty() {
                    continue;
                }
                let use_output = match model.cost_of(&gf, n).cmp(&model.cost_of(&gi, n)) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        let mut a = sf.clone();
                        gf.iter().for_each(|g| a.apply_gate_output_side(g));
                        let mut b = sinv.clone();
                        gi.iter().for_each(|g| b.apply_gate_output_side(g));
                        a.rm_cost() <= b.rm_cost()
                    }
                };
                if use_output {
                    for g in &gf {
                        sf.apply_gate_output_side(g);
                        sinv.apply_gate_input_side(g);
                    }
                    output_side.extend(gf);
                } else {
                    for g in &gi {
                        sinv.apply_gate_output_side(g);
                        sf.apply_gate_input_side(g);
                    }
                    input_side.extend(gi);
                }
                if cfg!(debug_assertions) && n <= 10 {
                    assert!(leading_rows_fixed(&sf, i + 1) && leading_rows_fixed(&sinv, i + 1));
                    assert_eq!(sf.fixed_prefix(), sinv.fixed_prefix());
                }
            }
        }
    }
    debug_assert!(sf.is_identity());
    output_side.reverse();
    input_side.extend(output_side);
    SynthResult {
        outcome: Outcome::Converged(Network::from_gates_unchecked(n, input_side)),
        gates_examined: examined,
        method: Method::Rm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectra_with_row(n: usize, i: usize, row: u32) -> RmSpectra {
        let mut rows: Vec<u32> = (0..1usize << n).map(identity_row).collect();
        rows[i] = row;
        RmSpectra::from_rows(n, rows).unwrap()
    }

    #[test]
    fn row_zero() {
        assert_eq!(rm_fix_row_zero(&spectra_with_row(3, 0, 0b001)), vec![ToffoliGate::not(0)]);
        assert!(rm_fix_row_zero(&spectra_with_row(3, 0, 0)).is_empty());
        assert_eq!(rm_fix_row_zero(&spectra_with_row(3, 0, 0b111)).len(), 3);
    }

    #[test]
    fn variable_row_cases() {
        assert!(rm_fix_variable_row(&spectra_with_row(3, 1, 0b001), 0).unwrap().is_empty());
        assert_eq!(
            rm_fix_variable_row(&spectra_with_row(3, 1, 0b101), 0).unwrap(),
            vec![ToffoliGate::cnot(0, 2)]
        );
        let s = spectra_with_row(3, 1, 0b100);
        let gates = rm_fix_variable_row(&s, 0).unwrap();
        assert_eq!(gates, vec![ToffoliGate::cnot(2, 0), ToffoliGate::cnot(0, 2)]);
        let mut t = s.clone();
        gates.iter().for_each(|g| t.apply_gate_output_side(g));
        assert_eq!(t.row(0), 0);
        assert_eq!(t.row(1), 0b001);
    }

    #[test]
    fn variable_row_without_pivot_is_integrity_error() {
        assert!(rm_fix_variable_row(&spectra_with_row(3, 4, 0), 2).is_err());
        assert!(rm_fix_variable_row(&spectra_with_row(3, 4, 0b011), 2).is_err());
    }

    #[test]
    fn nonvariable_row_example() {
        let mut s = RmSpectra::of(&ReversibleFunction::new(3, vec![1, 0, 3, 2, 5, 7, 4, 6]).unwrap());
        s.apply_gate_output_side(&ToffoliGate::not(0));
        let gates = rm_fix_nonvariable_row(&s, 5).unwrap();
        assert_eq!(
            gates,
            vec![ToffoliGate::cnot(1, 0), ToffoliGate::toffoli(0, 2, 1), ToffoliGate::cnot(1, 0)]
        );
    }

    #[test]
    fn nonvariable_row_single_pivot() {
        let s = spectra_with_row(3, 3, 0b100);
        let gates = rm_fix_nonvariable_row(&s, 3).unwrap();
        assert_eq!(gates, vec![ToffoliGate::toffoli(0, 1, 2)]);
        let mut t = s;
        gates.iter().for_each(|g| t.apply_gate_output_side(g));
        assert_eq!(t.row(3), 0);
        assert!(leading_rows_fixed(&t, 3));
        assert!(rm_fix_nonvariable_row(&spectra_with_row(3, 3, 0), 3).unwrap().is_empty());
    }

    #[test]
    fn nonvariable_row_inside_monomial_is_integrity_error() {
        assert!(rm_fix_nonvariable_row(&spectra_with_row(3, 3, 0b011), 3).is_err());
    }

    #[test]
    fn example_unidirectional() {
        let f = ReversibleFunction::new(3, vec![1, 0, 3, 2, 5, 7, 4, 6]).unwrap();
        let r = synthesize_rm(&f, &SynthOptions::new(Method::Rm, Direction::Unidirectional));
        let net = r.network().unwrap();
        assert_eq!(
            net.gates(),
            &[
                ToffoliGate::cnot(1, 0),
                ToffoliGate::toffoli(0, 2, 1),
                ToffoliGate::cnot(1, 0),
                ToffoliGate::not(0)
            ]
        );
    }

    #[test]
    fn identity_gives_empty() {
        for dir in [Direction::Unidirectional, Direction::Bidirectional] {
            let r = synthesize_rm(&ReversibleFunction::identity(4), &SynthOptions::new(Method::Rm, dir));
            assert!(r.network().unwrap().is_empty());
        }
    }
}

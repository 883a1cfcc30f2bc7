//! Positive-polarity Reed-Muller spectra.
//!
//! A spectra is stored row-major as `2^n` packed words: bit `j` of row `r` is
//! the coefficient of monomial `r` (the product of the variables named by the
//! 1-bits of `r`) in output `j`. The packing lets one butterfly pass transform
//! all outputs at once.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::gate::{line_name, ToffoliGate};

/// In-place Reed-Muller butterfly. Self-inverse.
pub fn rmt(v: &mut [u32]) -> Result<()> {
    if !v.len().is_power_of_two() {
        return Err(Error::InvalidGate(format!(
            "transform length {} is not a power of two",
            v.len()
        )));
    }
    rmt_unchecked(v);
    Ok(())
}

#[inline]
pub(crate) fn rmt_unchecked(v: &mut [u32]) {
    let len = v.len();
    let mut half = 1;
    while half < len {
        let mut block = 0;
        while block < len {
            for j in block..block + half {
                v[j + half] ^= v[j];
            }
            block += 2 * half;
        }
        half *= 2;
    }
}

/// Row `r` of the identity spectra.
#[inline]
pub fn identity_row(r: usize) -> u32 {
    if r.is_power_of_two() {
        r as u32
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RmSpectra {
    width: usize,
    rows: Vec<u32>,
}

impl RmSpectra {
    pub fn of(f: &ReversibleFunction) -> Self {
        let mut rows = f.table().to_vec();
        rmt_unchecked(&mut rows);
        RmSpectra {
            width: f.width(),
            rows,
        }
    }

    pub fn identity(width: usize) -> Self {
        RmSpectra {
            width,
            rows: (0..1usize << width).map(identity_row).collect(),
        }
    }

    pub fn from_rows(width: usize, rows: Vec<u32>) -> Result<Self> {
        if rows.len() != 1 << width {
            return Err(Error::Integrity(format!(
                "expected {} rows, got {}",
                1usize << width,
                rows.len()
            )));
        }
        if rows.iter().any(|r| r >> width != 0) {
            return Err(Error::Integrity("row uses columns beyond the width".into()));
        }
        Ok(RmSpectra { width, rows })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, r: usize) -> u32 {
        self.rows[r]
    }

    /// Column `j` as a 0/1 vector over the rows.
    pub fn column(&self, j: usize) -> Vec<u32> {
        self.rows.iter().map(|r| (r >> j) & 1).collect()
    }

    /// Back to the Boolean domain.
    pub fn truth_table(&self) -> Vec<u32> {
        let mut t = self.rows.clone();
        rmt_unchecked(&mut t);
        t
    }

    pub fn to_function(&self) -> Result<ReversibleFunction> {
        ReversibleFunction::new(self.width, self.truth_table())
    }

    /// Number of coefficients that differ from the identity spectra.
    pub fn rm_cost(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .map(|(r, &row)| (row ^ identity_row(r)).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(r, &row)| row == identity_row(r))
    }

    /// Number of leading rows that already match the identity.
    pub fn fixed_prefix(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .take_while(|&(r, &row)| row == identity_row(r))
            .count()
    }

    /// Spectrum of the product of the control columns of `controls`.
    ///
    /// Computed by returning each control column to the Boolean domain,
    /// AND-ing pointwise and transforming back.
    pub fn product_spectrum(&self, controls: u32) -> Vec<u32> {
        let truth = self.truth_table();
        product_spectrum_from_truth(&truth, controls)
    }

    /// Apply `g` at the output side: the target column is XORed with the
    /// product of the control columns. Result is the spectra of `g ∘ f`.
    pub fn apply_gate_output_side(&mut self, g: &ToffoliGate) {
        let product = self.product_spectrum(g.controls());
        let t = g.target();
        for (row, p) in self.rows.iter_mut().zip(product) {
            *row ^= p << t;
        }
    }

    /// Apply `g` at the input side: every occurrence of the target variable is
    /// replaced by `x_t ⊕ Π controls`. Result is the spectra of `f ∘ g`.
    pub fn apply_gate_input_side(&mut self, g: &ToffoliGate) {
        let t = g.target();
        let bit = 1usize << t;
        let controls = g.controls() as usize;
        for r in 0..self.rows.len() {
            if r & bit != 0 {
                // Sources contain x_t, destinations do not, so the in-place
                // update never reads a value it has already written.
                let dest = (r & !bit) | controls;
                self.rows[dest] ^= self.rows[r];
            }
        }
    }

    /// Row-labelled dump with columns printed from the highest line down.
    pub fn dump(&self) -> String {
        let labels: Vec<String> = (0..self.rows.len()).map(monomial_label).collect();
        let pad = labels.iter().map(|l| l.len()).max().unwrap_or(1);
        let mut out = String::new();
        for (label, row) in labels.iter().zip(&self.rows) {
            let bits: String = (0..self.width)
                .rev()
                .map(|j| if row >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            let _ = writeln!(out, "{label:<pad$} {bits}");
        }
        out
    }
}

pub(crate) fn product_spectrum_from_truth(truth: &[u32], controls: u32) -> Vec<u32> {
    let mut p: Vec<u32> = truth
        .iter()
        .map(|&v| (v & controls == controls) as u32)
        .collect();
    rmt_unchecked(&mut p);
    p
}

/// `1` for row 0, otherwise the product of variable names (`a`, `ab`, ...).
pub fn monomial_label(r: usize) -> String {
    if r == 0 {
        return "1".to_string();
    }
    (0..usize::BITS as usize)
        .filter(|j| r >> j & 1 == 1)
        .map(line_name)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ReversibleFunction {
        ReversibleFunction::new(3, vec![1, 0, 3, 2, 5, 7, 4, 6]).unwrap()
    }

    #[test]
    fn zero_vector_stays_zero() {
        let mut v = vec![0u32; 16];
        rmt(&mut v).unwrap();
        assert!(v.iter().all(|&x| x == 0));
    }

    #[test]
    fn single_output_example() {
        // Output a of the example function.
        let mut v = vec![1, 0, 1, 0, 1, 1, 0, 0];
        rmt(&mut v).unwrap();
        assert_eq!(v, vec![1, 1, 0, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(rmt(&mut [0u32; 6]).is_err());
    }

    #[test]
    fn example_spectra_matches_table() {
        let s = RmSpectra::of(&example());
        assert_eq!(s.rows(), &[0b001, 0b001, 0b010, 0b000, 0b100, 0b011, 0b011, 0b000]);
        assert_eq!(s.rm_cost(), 5);
        assert!(!s.is_identity());
    }

    #[test]
    fn identity_spectra_has_unit_variable_rows() {
        let s = RmSpectra::of(&ReversibleFunction::identity(3));
        assert_eq!(s, RmSpectra::identity(3));
        assert_eq!(s.rm_cost(), 0);
        assert!(s.is_identity());
    }

    #[test]
    fn single_line_not() {
        let s = RmSpectra::of(&ReversibleFunction::new(1, vec![1, 0]).unwrap());
        assert_eq!(s.rows(), &[1, 1]);
    }

    #[test]
    fn table_one_steps() {
        let mut s = RmSpectra::of(&example());
        s.apply_gate_output_side(&ToffoliGate::not(0));
        assert_eq!(s.rows(), &[0b000, 0b001, 0b010, 0b000, 0b100, 0b011, 0b011, 0b000]);
        assert_eq!(s.rm_cost(), 4);
        s.apply_gate_output_side(&ToffoliGate::cnot(1, 0));
        assert_eq!(s.rows(), &[0b000, 0b001, 0b011, 0b000, 0b100, 0b010, 0b010, 0b000]);
        s.apply_gate_output_side(&ToffoliGate::toffoli(0, 2, 1));
        assert_eq!(s.rows(), &[0b000, 0b001, 0b011, 0b000, 0b100, 0b000, 0b000, 0b000]);
        s.apply_gate_output_side(&ToffoliGate::cnot(1, 0));
        assert!(s.is_identity());
    }

    #[test]
    fn input_side_on_identity() {
        let mut s = RmSpectra::identity(3);
        s.apply_gate_input_side(&ToffoliGate::not(0));
        assert_eq!(s.row(0), 0b001);
        let mut s = RmSpectra::identity(3);
        s.apply_gate_input_side(&ToffoliGate::cnot(1, 0));
        assert_eq!(s.row(2), 0b011);
    }

    #[test]
    fn dump_layout() {
        let s = RmSpectra::of(&example());
        let dump = s.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines[0], "1   001");
        assert_eq!(lines[5], "ac  011");
        assert_eq!(lines[7], "abc 000");
    }
}

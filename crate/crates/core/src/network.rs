use crate::cost::{CostModel, CostValue};
use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::gate::ToffoliGate;
use crate::MAX_WIDTH;

/// A cascade of Toffoli gates on `width` lines. Gate 0 sits at the input side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Network {
    width: usize,
    gates: Vec<ToffoliGate>,
}

impl Network {
    pub fn new(width: usize) -> Self {
        assert!((1..=MAX_WIDTH).contains(&width), "width {width} out of range");
        Network {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<ToffoliGate>) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange {
                width,
                cap: MAX_WIDTH,
            });
        }
        if let Some(g) = gates.iter().find(|g| !g.fits(width)) {
            return Err(Error::InvalidGate(format!(
                "{g} does not fit a {width}-line network"
            )));
        }
        Ok(Network { width, gates })
    }

    pub(crate) fn from_gates_unchecked(width: usize, gates: Vec<ToffoliGate>) -> Self {
        debug_assert!(gates.iter().all(|g| g.fits(width)));
        Network { width, gates }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn gates(&self) -> &[ToffoliGate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<ToffoliGate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: ToffoliGate) -> Result<()> {
        if !gate.fits(self.width) {
            return Err(Error::InvalidGate(format!(
                "{gate} does not fit a {}-line network",
                self.width
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Run one pattern through the cascade.
    pub fn simulate(&self, pattern: u32) -> u32 {
        self.gates.iter().fold(pattern, |p, g| g.apply(p))
    }

    /// The permutation computed by the cascade.
    pub fn function(&self) -> ReversibleFunction {
        let table = (0..1u32 << self.width).map(|x| self.simulate(x)).collect();
        ReversibleFunction::from_table_unchecked(self.width, table)
    }

    pub fn realizes(&self, f: &ReversibleFunction) -> bool {
        f.width() == self.width && f.table().iter().enumerate().all(|(x, &y)| self.simulate(x as u32) == y)
    }

    /// Gates in reverse order. Every Toffoli gate is its own inverse, so the
    /// result realizes the inverse permutation.
    pub fn reversed(&self) -> Self {
        let mut gates = self.gates.clone();
        gates.reverse();
        Network {
            width: self.width,
            gates,
        }
    }

    pub fn concat(&self, other: &Network) -> Self {
        assert_eq!(self.width, other.width, "width mismatch");
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Network {
            width: self.width,
            gates,
        }
    }

    /// True when some gate touches every line.
    pub fn has_full_width_gate(&self) -> bool {
        self.gates.iter().any(|g| g.control_count() + 1 == self.width)
    }

    pub fn cost(&self, model: &CostModel) -> Result<CostValue> {
        model.network_cost(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Network {
        Network::from_gates(
            3,
            vec![
                ToffoliGate::cnot(1, 0),
                ToffoliGate::toffoli(0, 2, 1),
                ToffoliGate::cnot(1, 0),
                ToffoliGate::not(0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_network_is_identity() {
        assert_eq!(Network::new(3).function().table(), &[0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn example_network_function() {
        assert_eq!(example1().function().table(), &[1, 0, 3, 2, 5, 7, 4, 6]);
    }

    #[test]
    fn single_not() {
        let n = Network::from_gates(1, vec![ToffoliGate::not(0)]).unwrap();
        assert_eq!(n.function().table(), &[1, 0]);
    }

    #[test]
    fn reverse_order() {
        let n = Network::from_gates(2, vec![ToffoliGate::cnot(1, 0), ToffoliGate::not(0)]).unwrap();
        assert_eq!(n.reversed().gates(), &[ToffoliGate::not(0), ToffoliGate::cnot(1, 0)]);
        assert!(Network::new(2).reversed().is_empty());
    }

    #[test]
    fn reversed_example_realizes_inverse() {
        assert_eq!(example1().reversed().function().table(), &[1, 0, 3, 2, 6, 4, 7, 5]);
    }

    #[test]
    fn gate_must_fit() {
        assert!(Network::from_gates(2, vec![ToffoliGate::not(2)]).is_err());
    }
}

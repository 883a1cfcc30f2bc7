use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gate::ToffoliGate;
use crate::network::Network;

const DEFAULT_TABLE: &str = include_str!("../data/quantum_costs.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostMode {
    GateCount,
    Quantum,
}

/// Per-gate quantum cost indexed by the number of controls.
///
/// The optional second column prices a gate when the network is assumed to
/// carry one extra line (a starred network); it defaults to the first column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumCostTable {
    base: Vec<u64>,
    extra: Vec<u64>,
}

impl QuantumCostTable {
    pub fn new(base: Vec<u64>, extra: Option<Vec<u64>>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::Config("cost table is empty".into()));
        }
        let extra = extra.unwrap_or_else(|| base.clone());
        if extra.len() != base.len() {
            return Err(Error::Config("extra-line column length mismatch".into()));
        }
        for col in [&base, &extra] {
            if let Some(c) = col.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::Config(format!(
                    "cost decreases from {} to {} controls",
                    c,
                    c + 1
                )));
            }
        }
        Ok(QuantumCostTable { base, extra })
    }

    /// Largest control count with a cost entry.
    pub fn max_controls(&self) -> usize {
        self.base.len() - 1
    }

    pub fn cost(&self, controls: usize, starred: bool) -> Option<u64> {
        let col = if starred { &self.extra } else { &self.base };
        col.get(controls).copied()
    }
}

impl Default for QuantumCostTable {
    fn default() -> Self {
        DEFAULT_TABLE.parse().expect("bundled cost table is valid")
    }
}

impl FromStr for QuantumCostTable {
    type Err = Error;

    /// Lines of `<controls> <cost> [<cost_with_extra_line>]`; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<(usize, u64, Option<u64>)> = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(Error::parse(line_no, "expected `<controls> <cost> [<extra>]`"));
            }
            let num = |t: &str| -> Result<u64> {
                t.parse::<u64>()
                    .map_err(|_| Error::parse(line_no, format!("`{t}` is not a nonnegative integer")))
            };
            let c = num(fields[0])? as usize;
            let cost = num(fields[1])?;
            let extra = fields.get(2).map(|t| num(t)).transpose()?;
            rows.push((c, cost, extra));
        }
        rows.sort_by_key(|r| r.0);
        for (expected, row) in rows.iter().enumerate() {
            if row.0 != expected {
                return Err(Error::Config(format!(
                    "missing cost entry for {expected} controls"
                )));
            }
        }
        let base: Vec<u64> = rows.iter().map(|r| r.1).collect();
        let extra = if rows.iter().any(|r| r.2.is_some()) {
            Some(rows.iter().map(|r| r.2.unwrap_or(r.1)).collect())
        } else {
            None
        };
        QuantumCostTable::new(base, extra)
    }
}

impl fmt::Display for QuantumCostTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, (b, e)) in self.base.iter().zip(&self.extra).enumerate() {
            if b == e {
                writeln!(f, "{c} {b}")?;
            } else {
                writeln!(f, "{c} {b} {e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub mode: CostMode,
    pub table: QuantumCostTable,
}

/// A network cost. Ordering compares the value first; on equal values an
/// unstarred cost is smaller.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CostValue {
    pub value: u64,
    pub starred: bool,
}

impl CostValue {
    pub fn new(value: u64, starred: bool) -> Self {
        CostValue { value, starred }
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, if self.starred { "*" } else { "" })
    }
}

/// Fewest controls for which a gate's quantum realization relies on an
/// auxiliary line. Smaller gates cost the same with or without one.
pub const AUXILIARY_MIN_CONTROLS: usize = 3;

/// True iff `gate` spans all `width` lines and is large enough to need an
/// auxiliary line, which makes the network's cost starred.
pub fn stars_network(gate: &ToffoliGate, width: usize) -> bool {
    gate.control_count() + 1 == width && gate.control_count() >= AUXILIARY_MIN_CONTROLS
}

pub fn cost_compare(a: &CostValue, b: &CostValue) -> Ordering {
    a.cmp(b)
}

impl CostModel {
    pub fn gate_count() -> Self {
        CostModel {
            mode: CostMode::GateCount,
            table: QuantumCostTable::default(),
        }
    }

    pub fn quantum() -> Self {
        CostModel {
            mode: CostMode::Quantum,
            table: QuantumCostTable::default(),
        }
    }

    pub fn quantum_with(table: QuantumCostTable) -> Self {
        CostModel {
            mode: CostMode::Quantum,
            table,
        }
    }

    /// Fails when the table cannot price every gate of a `width`-line network.
    pub fn check_width(&self, width: usize) -> Result<()> {
        if self.mode == CostMode::Quantum && self.table.max_controls() + 1 < width {
            return Err(Error::Config(format!(
                "cost table covers up to {} controls but width {width} needs {}",
                self.table.max_controls(),
                width - 1
            )));
        }
        Ok(())
    }

    pub fn gate_cost(&self, gate: &ToffoliGate, starred: bool) -> Result<u64> {
        match self.mode {
            CostMode::GateCount => Ok(1),
            CostMode::Quantum => self.table.cost(gate.control_count(), starred).ok_or_else(|| {
                Error::Config(format!("no cost entry for {} controls", gate.control_count()))
            }),
        }
    }

    /// Infallible per-gate weight for hot loops; callers validate the width
    /// with [`CostModel::check_width`] first. Missing entries price as huge.
    #[inline]
    pub fn weight(&self, controls: usize, starred: bool) -> u64 {
        match self.mode {
            CostMode::GateCount => 1,
            CostMode::Quantum => self.table.cost(controls, starred).unwrap_or(u64::MAX / 1024),
        }
    }

    /// Whether `gate` stars a `width`-line network under this model. Gate
    /// counts never carry a star.
    #[inline]
    pub fn stars(&self, gate: &ToffoliGate, width: usize) -> bool {
        self.mode == CostMode::Quantum && stars_network(gate, width)
    }

    /// Cost of a gate list placed on a `width`-line network.
    pub fn cost_of(&self, gates: &[ToffoliGate], width: usize) -> CostValue {
        let starred = gates.iter().any(|g| self.stars(g, width));
        let value = gates
            .iter()
            .map(|g| self.weight(g.control_count(), starred))
            .fold(0u64, u64::saturating_add);
        CostValue { value, starred }
    }

    pub fn network_cost(&self, net: &Network) -> Result<CostValue> {
        let starred = net.gates().iter().any(|g| self.stars(g, net.width()));
        let mut value = 0u64;
        for g in net.gates() {
            value += self.gate_cost(g, starred)?;
        }
        Ok(CostValue { value, starred })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_anchors() {
        let t = QuantumCostTable::default();
        assert_eq!(t.cost(0, false), Some(1));
        assert_eq!(t.cost(1, false), Some(1));
        assert_eq!(t.cost(2, false), Some(5));
        assert_eq!(t.max_controls(), 20);
    }

    #[test]
    fn full_width_gate_is_starred() {
        let net = Network::from_gates(4, vec![ToffoliGate::new([0, 1, 2], 3).unwrap()]).unwrap();
        let c = CostModel::quantum().network_cost(&net).unwrap();
        assert!(c.starred);
        assert_eq!(c.value, 13);
        // A 3-line Toffoli needs no auxiliary line.
        let net = Network::from_gates(3, vec![ToffoliGate::toffoli(0, 1, 2)]).unwrap();
        assert_eq!(CostModel::quantum().network_cost(&net).unwrap(), CostValue::new(5, false));
    }

    #[test]
    fn gate_count_mode_counts_gates() {
        let net = Network::from_gates(
            3,
            vec![
                ToffoliGate::cnot(1, 0),
                ToffoliGate::toffoli(0, 2, 1),
                ToffoliGate::cnot(1, 0),
                ToffoliGate::not(0),
            ],
        )
        .unwrap();
        assert_eq!(CostModel::gate_count().network_cost(&net).unwrap().value, 4);
        let net = Network::from_gates(4, vec![ToffoliGate::new([0, 1, 2], 3).unwrap()]).unwrap();
        assert_eq!(CostModel::gate_count().network_cost(&net).unwrap(), CostValue::new(1, false));
    }

    #[test]
    fn ordering_prefers_unstarred_on_ties() {
        assert_eq!(cost_compare(&CostValue::new(14, false), &CostValue::new(14, true)), Ordering::Less);
        assert_eq!(cost_compare(&CostValue::new(13, true), &CostValue::new(14, false)), Ordering::Less);
        assert_eq!(cost_compare(&CostValue::new(5, false), &CostValue::new(5, false)), Ordering::Equal);
    }

    #[test]
    fn missing_entry_is_config_error() {
        let table: QuantumCostTable = "0 1\n1 1\n".parse().unwrap();
        let model = CostModel::quantum_with(table);
        let net = Network::from_gates(3, vec![ToffoliGate::toffoli(0, 1, 2)]).unwrap();
        assert!(matches!(model.network_cost(&net), Err(Error::Config(_))));
        assert!(model.check_width(3).is_err());
    }

    #[test]
    fn table_parse_errors() {
        assert!("0 1\n2 5\n".parse::<QuantumCostTable>().is_err());
        assert!("0 5\n1 1\n".parse::<QuantumCostTable>().is_err());
        let err = "0 1\n1 x\n".parse::<QuantumCostTable>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn extra_column_prices_starred_networks() {
        let table: QuantumCostTable = "0 1\n1 1\n2 5 4\n3 13 10\n".parse().unwrap();
        let model = CostModel::quantum_with(table);
        let net = Network::from_gates(
            4,
            vec![ToffoliGate::new([0, 1, 2], 3).unwrap(), ToffoliGate::toffoli(0, 1, 2)],
        )
        .unwrap();
        assert_eq!(model.network_cost(&net).unwrap(), CostValue::new(14, true));
    }
}

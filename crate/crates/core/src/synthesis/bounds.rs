use crate::network::Network;

/// Worst-case gate-class counts of the row-walk spectral engine on `n` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RmBounds {
    pub not: u64,
    pub cnot: u64,
    /// `(k, C(n, k))` for every `k` in `2..n`.
    pub multi: Vec<(usize, u64)>,
}

/// Gate counts of a network broken down by number of controls.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateClassCounts {
    pub by_controls: Vec<u64>,
}

impl GateClassCounts {
    pub fn of(net: &Network) -> Self {
        let mut by_controls = vec![0u64; net.width().max(1)];
        for g in net.gates() {
            by_controls[g.control_count()] += 1;
        }
        GateClassCounts { by_controls }
    }

    pub fn get(&self, controls: usize) -> u64 {
        self.by_controls.get(controls).copied().unwrap_or(0)
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn theorem1_bounds(n: usize) -> RmBounds {
    let nn = n as i64;
    let cnot = 2 * (nn - 1) * ((1i64 << n) - nn - 2) + nn * nn;
    RmBounds {
        not: n as u64,
        cnot: cnot as u64,
        multi: (2..n).map(|k| (k, binomial(n as u64, k as u64))).collect(),
    }
}

impl RmBounds {
    pub fn admits(&self, counts: &GateClassCounts) -> bool {
        counts.get(0) <= self.not
            && counts.get(1) <= self.cnot
            && self.multi.iter().all(|&(k, b)| counts.get(k) <= b)
            && counts.by_controls.iter().skip(self.multi.len() + 2).all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::ToffoliGate;

    #[test]
    fn three_lines() {
        let b = theorem1_bounds(3);
        assert_eq!(b.not, 3);
        assert_eq!(b.cnot, 21);
        assert_eq!(b.multi, vec![(2, 3)]);
    }

    #[test]
    fn one_line() {
        let b = theorem1_bounds(1);
        assert_eq!((b.not, b.cnot), (1, 1));
        assert!(b.multi.is_empty());
    }

    #[test]
    fn example_network_within_bounds() {
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
        let counts = GateClassCounts::of(&net);
        assert_eq!(counts.by_controls, vec![1, 2, 1]);
        assert!(theorem1_bounds(3).admits(&counts));
    }
}

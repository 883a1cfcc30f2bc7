//! Identity templates: representation, library file format, verification,
//! discovery and application.
//!
//! A template is an identity cascade over abstract lines. Target-bearing
//! lines `t1, t2, ...` each stand for one network line. Control classes
//! `C1, C2, ...` stand for any number of lines (possibly none) that carry
//! controls only; a class is described by its characteristic vector, bit `i`
//! set when gate `i` has a control on the class.

mod finder;
mod library;
mod matching;

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::gate::ToffoliGate;
use crate::network::Network;

pub use finder::{find_templates, generalize, identity_candidates, optimal_depths, DepthTable, FinderConfig};
pub use library::{default_library, parse_library, format_library, TemplateLibrary};
pub use matching::{apply_at, apply_templates, bind_match, can_gather, gather_flags, Objective, TemplateOptions, TemplateStep};

/// Largest supported template size; characteristic vectors are `u32` masks.
pub const MAX_TEMPLATE_SIZE: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemplateGate {
    /// Controls on target-bearing lines, as a mask over t-line indices.
    pub t_controls: u32,
    /// Index of the target t-line.
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    t_lines: usize,
    gates: Vec<TemplateGate>,
    classes: Vec<u32>,
    closure: Vec<u32>,
    reducible: Vec<usize>,
}

/// True iff adjacent `a`, `b` may be swapped.
pub fn is_moving_pair(a: &ToffoliGate, b: &ToffoliGate) -> bool {
    a.commutes_with(b)
}

/// All nonzero OR-combinations of `vectors`, sorted.
pub fn or_closure(vectors: &[u32]) -> Vec<u32> {
    let mut set: Vec<u32> = Vec::new();
    for &v in vectors {
        if v == 0 || set.contains(&v) {
            continue;
        }
        let mut added = vec![v];
        for &s in &set {
            added.push(s | v);
        }
        for a in added {
            if !set.contains(&a) {
                set.push(a);
            }
        }
    }
    set.sort_unstable();
    set
}

impl Template {
    pub fn new(t_lines: usize, gates: Vec<TemplateGate>, classes: Vec<u32>) -> Result<Self> {
        let m = gates.len();
        if m == 0 || m > MAX_TEMPLATE_SIZE {
            return Err(Error::Template(format!("template size {m} out of range")));
        }
        if t_lines == 0 || t_lines > 16 {
            return Err(Error::Template(format!("{t_lines} target lines out of range")));
        }
        for g in &gates {
            if g.target >= t_lines || g.t_controls >> t_lines != 0 || g.t_controls >> g.target & 1 == 1 {
                return Err(Error::Template("gate does not fit its target lines".into()));
            }
        }
        let full = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        if classes.iter().any(|&c| c == 0 || c & !full != 0) {
            return Err(Error::Template("class vector is empty or too long".into()));
        }
        let closure = or_closure(&classes);
        Ok(Template {
            t_lines,
            gates,
            classes,
            closure,
            reducible: Vec::new(),
        })
    }

    pub fn with_reducible(mut self, mut reducible: Vec<usize>) -> Self {
        reducible.sort_unstable();
        reducible.dedup();
        self.reducible = reducible;
        self
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn t_lines(&self) -> usize {
        self.t_lines
    }

    pub fn gates(&self) -> &[TemplateGate] {
        &self.gates
    }

    /// Class vectors as written in the library.
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    /// Every vector a control line may carry: the OR-closure of the classes.
    pub fn class_closure(&self) -> &[u32] {
        &self.closure
    }

    pub fn reducible_cycles(&self) -> &[usize] {
        &self.reducible
    }

    pub fn irreducible_cycles(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.size()).filter(move |r| !self.reducible.contains(r))
    }

    /// Gate sequences used for matching: each irreducible rotation read
    /// forward and backward. Every one of them is itself an identity.
    pub fn oriented_sequences(&self) -> Vec<Vec<usize>> {
        let m = self.size();
        let mut out = Vec::new();
        for r in self.irreducible_cycles() {
            out.push((0..m).map(|j| (r + j) % m).collect());
            out.push((0..m).map(|j| (r + m - j) % m).collect());
        }
        out.dedup();
        out
    }

    /// Gates on the t-lines only, with every gate in `removed` dropped.
    fn base_network(&self, removed: u32) -> Network {
        let gates = self
            .gates
            .iter()
            .enumerate()
            .filter(|(i, _)| removed >> i & 1 == 0)
            .map(|(_, g)| ToffoliGate::from_mask(g.t_controls, g.target).expect("validated"))
            .collect();
        Network::from_gates_unchecked(self.t_lines, gates)
    }

    /// Exact identity check for every instantiation: setting any control
    /// line to 0 disables the gates of its vector, so the template is an
    /// identity iff the base cascade with the gates of every OR-combination
    /// of class vectors removed is an identity.
    pub fn realizes_identity(&self) -> bool {
        std::iter::once(0)
            .chain(self.closure.iter().copied())
            .all(|u| self.base_network(u).function().is_identity())
    }

    /// Concrete network with `counts[c]` lines for class `c`, placed after
    /// the t-lines.
    pub fn instantiate(&self, counts: &[usize]) -> Network {
        assert_eq!(counts.len(), self.classes.len());
        let mut class_lines: Vec<Vec<usize>> = Vec::new();
        let mut next = self.t_lines;
        for &k in counts {
            class_lines.push((next..next + k).collect());
            next += k;
        }
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut mask = g.t_controls;
                for (c, &vec) in self.classes.iter().enumerate() {
                    if vec >> i & 1 == 1 {
                        for &l in &class_lines[c] {
                            mask |= 1 << l;
                        }
                    }
                }
                ToffoliGate::from_mask(mask, g.target).expect("class lines differ from targets")
            })
            .collect();
        Network::from_gates_unchecked(next, gates)
    }

    /// Simulates representative instantiations: each class with 0, 1 and 2
    /// lines alone, and every pair of classes with one line each.
    pub fn check_instances(&self) -> bool {
        let k = self.classes.len();
        let mut shapes: Vec<Vec<usize>> = vec![vec![0; k]];
        for c in 0..k {
            for n in 1..=2 {
                let mut s = vec![0; k];
                s[c] = n;
                shapes.push(s);
            }
            for d in c + 1..k {
                let mut s = vec![0; k];
                s[c] = 1;
                s[d] = 1;
                shapes.push(s);
            }
        }
        shapes
            .iter()
            .filter(|s| self.t_lines + s.iter().sum::<usize>() <= 16)
            .all(|s| self.instantiate(s).function().is_identity())
    }

    /// Both identity checks.
    pub fn verify(&self) -> bool {
        self.realizes_identity() && self.check_instances()
    }

    /// True iff at least one rotation of this cascade (instantiated with one
    /// line per class), read forward or backward, cannot be shortened by
    /// `library`.
    pub fn is_irreducible_under(&self, library: &TemplateLibrary) -> bool {
        self.reducible_rotations(library).len() < self.size()
    }

    /// Rotations whose forward and backward readings `library` both shorten.
    pub fn reducible_rotations(&self, library: &TemplateLibrary) -> Vec<usize> {
        let inst = self.instantiate(&vec![1; self.classes.len()]);
        finder::reducible_cycles(inst.gates(), inst.width(), library).unwrap_or_else(|| (0..self.size()).collect())
    }

    pub fn gate_text(&self, i: usize) -> String {
        let g = &self.gates[i];
        let mut parts: Vec<String> = (0..self.t_lines)
            .filter(|t| g.t_controls >> t & 1 == 1)
            .map(|t| format!("t{}", t + 1))
            .collect();
        parts.extend(
            self.classes
                .iter()
                .enumerate()
                .filter(|(_, &v)| v >> i & 1 == 1)
                .map(|(c, _)| format!("C{}", c + 1)),
        );
        format!("TOF({};t{})", parts.join(","), g.target + 1)
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = format!(
            "template m={} lines={},{}\n",
            self.size(),
            self.t_lines,
            self.classes.len()
        );
        for i in 0..self.size() {
            let _ = writeln!(out, "{}", self.gate_text(i));
        }
        let red: Vec<String> = self.reducible.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(out, "reducible-cycles: {}", red.join(","));
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tg(t_controls: u32, target: usize) -> TemplateGate {
        TemplateGate { t_controls, target }
    }

    #[test]
    fn duplicate_gate_template_with_class() {
        let t = Template::new(1, vec![tg(0, 0), tg(0, 0)], vec![0b11]).unwrap();
        assert!(t.verify());
        for k in 0..=2 {
            assert!(t.instantiate(&[k]).function().is_identity());
        }
    }

    #[test]
    fn two_different_nots_are_not_identity() {
        let t = Template::new(2, vec![tg(0, 0), tg(0, 1)], vec![]).unwrap();
        assert!(!t.verify());
    }

    #[test]
    fn unequal_vector_on_two_target_line_breaks_identity() {
        // TOF(t2;t1) TOF(t2;t1): a class on only one of the two gates.
        let t = Template::new(2, vec![tg(0b10, 0), tg(0b10, 0)], vec![0b01]).unwrap();
        assert!(!t.realizes_identity());
        assert!(!t.instantiate(&[1]).function().is_identity());
        let t = Template::new(2, vec![tg(0b10, 0), tg(0b10, 0)], vec![0b11]).unwrap();
        assert!(t.verify());
    }

    #[test]
    fn or_closure_of_vectors() {
        assert_eq!(or_closure(&[0b001, 0b010]), vec![0b001, 0b010, 0b011]);
        assert_eq!(or_closure(&[0, 0b100, 0b100]), vec![0b100]);
    }

    #[test]
    fn moving_pairs() {
        assert!(is_moving_pair(&ToffoliGate::cnot(1, 0), &ToffoliGate::cnot(2, 3)));
        assert!(!is_moving_pair(&ToffoliGate::cnot(1, 0), &ToffoliGate::cnot(2, 1)));
        assert!(is_moving_pair(&ToffoliGate::not(0), &ToffoliGate::not(0)));
    }

    #[test]
    fn display_format() {
        let t = Template::new(2, vec![tg(0b10, 0), tg(0, 1), tg(0b10, 0), tg(0, 1)], vec![0b0101])
            .unwrap()
            .with_reducible(vec![1, 3]);
        assert_eq!(
            t.to_string(),
            "template m=4 lines=2,1\nTOF(t2,C1;t1)\nTOF(;t2)\nTOF(t2,C1;t1)\nTOF(;t2)\nreducible-cycles: 1,3\n"
        );
    }
}

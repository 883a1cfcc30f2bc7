//! Template discovery.
//!
//! Identity cascades of a given size are enumerated on 3 and 4 lines with
//! every window of at most half the size optimal, which is necessary for a
//! cascade that no smaller template can shorten. Survivors that the
//! current library cannot shorten in every rotation are generalized into
//! templates with control classes.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::gate::ToffoliGate;
use crate::network::Network;
use crate::synthesis::candidate_gates;

use super::{apply_templates, or_closure, Template, TemplateGate, TemplateLibrary, TemplateOptions};

/// Minimal gate counts of the functions on `width <= 4` lines reachable
/// within `max_depth` gates. Functions are packed 4 bits per entry.
#[derive(Clone, Debug)]
pub struct DepthTable {
    width: usize,
    max_depth: usize,
    depth: HashMap<u64, u8>,
    single: HashMap<u64, usize>,
}

pub(crate) fn pack(table: &[u32]) -> u64 {
    table.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | (v as u64) << (4 * i))
}

/// `g ∘ f` on a packed function.
#[inline]
fn compose_gate(key: u64, g: &ToffoliGate, width: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..1usize << width {
        let v = (key >> (4 * i) & 15) as u32;
        out |= (g.apply(v) as u64) << (4 * i);
    }
    out
}

/// `f ∘ g` on a packed function.
fn compose_gate_before(key: u64, g: &ToffoliGate, width: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..1u32 << width {
        let v = key >> (4 * g.apply(i)) & 15;
        out |= v << (4 * i);
    }
    out
}

fn identity_key(width: usize) -> u64 {
    pack(&(0..1u32 << width).collect::<Vec<_>>())
}

/// Breadth-first search outward from the identity.
pub fn optimal_depths(width: usize, max_depth: usize) -> DepthTable {
    assert!((1..=4).contains(&width), "packed depth tables cover 1 to 4 lines");
    let gates = candidate_gates(width, None);
    let mut depth = HashMap::new();
    let start = identity_key(width);
    depth.insert(start, 0u8);
    let mut frontier = vec![start];
    for d in 1..=max_depth {
        let mut next = Vec::new();
        for &f in &frontier {
            for g in &gates {
                let h = compose_gate(f, g, width);
                if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(h) {
                    e.insert(d as u8);
                    next.push(h);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let single = gates
        .iter()
        .enumerate()
        .map(|(i, g)| (compose_gate(start, g, width), i))
        .collect();
    DepthTable {
        width,
        max_depth,
        depth,
        single,
    }
}

impl DepthTable {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Minimal gate count of `table`, or `None` beyond the searched depth.
    pub fn depth_of(&self, table: &[u32]) -> Option<usize> {
        self.depth.get(&pack(table)).map(|&d| d as usize)
    }

    fn depth_packed(&self, key: u64) -> Option<usize> {
        self.depth.get(&key).map(|&d| d as usize)
    }

    /// Number of functions at each depth.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.max_depth + 1];
        for &d in self.depth.values() {
            h[d as usize] += 1;
        }
        while h.len() > 1 && h.last() == Some(&0) {
            h.pop();
        }
        h
    }
}

#[derive(Clone, Debug)]
pub struct FinderConfig {
    /// `(lines, largest template size)` pairs to search.
    pub searches: Vec<(usize, usize)>,
}

impl Default for FinderConfig {
    fn default() -> Self {
        FinderConfig {
            searches: vec![(3, 8), (4, 8)],
        }
    }
}

impl FinderConfig {
    pub fn max_size(&self) -> usize {
        self.searches.iter().map(|&(_, m)| m).max().unwrap_or(0)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Orderings of a cyclic sequence of length `m`: rotations read forward
/// and backward.
fn orientations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(2 * m);
    for r in 0..m {
        out.push((0..m).map(|j| (r + j) % m).collect());
        out.push((0..m).map(|j| (r + m - j) % m).collect());
    }
    out
}

/// Smallest encoding of a cyclic gate sequence over rotations, reversal and
/// line relabelling.
fn canonical_network(gates: &[ToffoliGate], perms: &[Vec<usize>], orients: &[Vec<usize>]) -> Vec<u16> {
    let mut best: Option<Vec<u16>> = None;
    for perm in perms {
        let mapped: Vec<u16> = gates
            .iter()
            .map(|g| {
                let r = g.remap(perm);
                ((r.controls() as u16) << 5) | r.target() as u16
            })
            .collect();
        for o in orients {
            let code: Vec<u16> = o.iter().map(|&i| mapped[i]).collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
    }
    best.unwrap_or_default()
}

fn decode_network(code: &[u16]) -> Vec<ToffoliGate> {
    code.iter()
        .map(|&c| ToffoliGate::from_mask((c >> 5) as u32, (c & 31) as usize).expect("encoded gate"))
        .collect()
}

struct Enumerator<'a> {
    width: usize,
    size: usize,
    half: usize,
    depths: &'a DepthTable,
    gates: &'a [ToffoliGate],
    perms: &'a [Vec<usize>],
    orients: &'a [Vec<usize>],
}

impl Enumerator<'_> {
    /// Every window of length <= half ending at the last gate is optimal.
    fn extend(&self, seq: &mut Vec<usize>, windows: &[u64], prefix: u64, out: &mut BTreeSet<Vec<u16>>) {
        let k = seq.len();
        let width = self.width;
        if k == self.size - 1 {
            if let Some(&last) = self.depths.single.get(&prefix) {
                seq.push(last);
                if self.tail_windows_optimal(seq) {
                    let gates: Vec<ToffoliGate> = seq.iter().map(|&i| self.gates[i]).collect();
                    if gates.iter().fold(0u32, |a, g| a | g.lines()) == (1u32 << width) - 1 {
                        out.insert(canonical_network(&gates, self.perms, self.orients));
                    }
                }
                seq.pop();
            }
            return;
        }
        for gi in 0..self.gates.len() {
            let g = &self.gates[gi];
            let mut next = Vec::with_capacity(self.half);
            let mut ok = true;
            next.push(compose_gate(identity_key(width), g, width));
            for (w, &win) in windows.iter().enumerate().take(self.half - 1) {
                let h = compose_gate(win, g, width);
                if self.depths.depth_packed(h) != Some(w + 2) {
                    ok = false;
                    break;
                }
                next.push(h);
            }
            if !ok {
                continue;
            }
            let p = compose_gate(prefix, g, width);
            let len = k + 1;
            if len + self.half >= self.size {
                match self.depths.depth_packed(p) {
                    Some(d) if d <= self.size - len => {}
                    _ => continue,
                }
            }
            seq.push(gi);
            self.extend(seq, &next, p, out);
            seq.pop();
        }
    }

    /// Windows of the closed sequence that end at its last gate. Windows
    /// that wrap around are left to the reducibility check, since a rotation
    /// may be irreducible even when a wrapped window is not optimal.
    fn tail_windows_optimal(&self, seq: &[usize]) -> bool {
        let m = seq.len();
        let mut f = identity_key(self.width);
        for w in 1..=self.half {
            f = compose_gate_before(f, &self.gates[seq[m - w]], self.width);
            if self.depths.depth_packed(f) != Some(w) {
                return false;
            }
        }
        true
    }
}

/// Identity cascades of exactly `size` gates using all `width` lines whose
/// windows of up to `size / 2` gates are optimal, one representative
/// per rotation/reflection/relabelling class, in canonical order.
pub fn identity_candidates(width: usize, size: usize, depths: &DepthTable) -> Vec<Vec<ToffoliGate>> {
    assert!(size >= 2 && depths.width() == width && depths.max_depth() >= size / 2);
    let gates = candidate_gates(width, None);
    let perms = permutations(width);
    let orients = orientations(size);
    let half = (size / 2).max(1);
    let en = Enumerator {
        width,
        size,
        half,
        depths,
        gates: &gates,
        perms: &perms,
        orients: &orients,
    };
    let id = identity_key(width);
    let sets: Vec<BTreeSet<Vec<u16>>> = (0..gates.len())
        .into_par_iter()
        .map(|gi| {
            let mut out = BTreeSet::new();
            let first = compose_gate(id, &gates[gi], width);
            let mut seq = vec![gi];
            en.extend(&mut seq, &[first], first, &mut out);
            out
        })
        .collect();
    let all: BTreeSet<Vec<u16>> = sets.into_iter().flatten().collect();
    all.iter().map(|c| decode_network(c)).collect()
}

/// Rotations of `gates` that `library` shortens.
pub(crate) fn reducible_rotations(gates: &[ToffoliGate], width: usize, library: &TemplateLibrary) -> Vec<usize> {
    let m = gates.len();
    let opts = TemplateOptions::default();
    (0..m)
        .filter(|&r| {
            let mut rotated = gates[r..].to_vec();
            rotated.extend_from_slice(&gates[..r]);
            apply_templates(&Network::from_gates_unchecked(width, rotated), library, &opts).len() < m
        })
        .collect()
}

/// Characteristic vector of `line` over `gates`.
fn characteristic(gates: &[ToffoliGate], line: usize) -> u32 {
    gates
        .iter()
        .enumerate()
        .filter(|(_, g)| g.controls() >> line & 1 == 1)
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

/// The elements of an OR-closed set that are not the OR of smaller members.
fn generators(closed: &[u32]) -> Vec<u32> {
    closed
        .iter()
        .copied()
        .filter(|&w| {
            let below = closed
                .iter()
                .filter(|&&x| x != w && x & !w == 0)
                .fold(0, |a, x| a | x);
            below != w
        })
        .collect()
}

/// Generalizes an identity cascade: lines without targets become control
/// classes, and every maximal OR-closed set of admissible control vectors
/// containing the cascade's own vectors yields one template.
pub fn generalize(gates: &[ToffoliGate], width: usize) -> Vec<Template> {
    let m = gates.len();
    if m == 0 || m > super::MAX_TEMPLATE_SIZE || !Network::from_gates_unchecked(width, gates.to_vec()).function().is_identity() {
        return Vec::new();
    }
    let targets = gates.iter().fold(0u32, |a, g| a | 1 << g.target());
    let t_list: Vec<usize> = (0..width).filter(|l| targets >> l & 1 == 1).collect();
    let t_index = |l: usize| t_list.iter().position(|&x| x == l);
    let base: Vec<TemplateGate> = gates
        .iter()
        .map(|g| TemplateGate {
            t_controls: g
                .control_lines()
                .filter_map(t_index)
                .fold(0, |a, u| a | 1 << u),
            target: t_index(g.target()).expect("targets are t-lines"),
        })
        .collect();
    let probe = match Template::new(t_list.len(), base.clone(), Vec::new()) {
        Ok(t) => t,
        Err(_) => return Vec::new(),
    };
    let full = (1u32 << m) - 1;
    let admissible: Vec<u32> = (1..=full).filter(|&a| probe.base_network(a).function().is_identity()).collect();
    let admissible_set: std::collections::HashSet<u32> = admissible.iter().copied().collect();
    let inside = |set: &[u32]| set.iter().all(|v| admissible_set.contains(v));

    let mut seed: Vec<u32> = (0..width)
        .filter(|l| targets >> l & 1 == 0)
        .map(|l| characteristic(gates, l))
        .filter(|&v| v != 0)
        .collect();
    seed.push(full);
    let seed = or_closure(&seed);
    if !inside(&seed) {
        return Vec::new();
    }
    let mut maximal: Vec<Vec<u32>> = Vec::new();
    for &v in &admissible {
        let mut w = seed.clone();
        let with_v = or_closure(&[w.as_slice(), &[v]].concat());
        if !inside(&with_v) {
            continue;
        }
        w = with_v;
        for &u in &admissible {
            if w.contains(&u) {
                continue;
            }
            let grown = or_closure(&[w.as_slice(), &[u]].concat());
            if inside(&grown) {
                w = grown;
            }
        }
        if !maximal.contains(&w) {
            maximal.push(w);
        }
    }
    if maximal.is_empty() {
        maximal.push(seed);
    }
    let keep: Vec<&Vec<u32>> = maximal
        .iter()
        .filter(|w| {
            !maximal
                .iter()
                .any(|o| o.len() > w.len() && w.iter().all(|x| o.contains(x)))
        })
        .collect();
    keep.into_iter()
        .filter_map(|w| Template::new(t_list.len(), base.clone(), generators(w)).ok())
        .filter(|t| t.verify())
        .collect()
}

/// Rotations `r` for which `library` shortens both the forward reading
/// starting at gate `r` and the backward one; `None` when that holds for
/// every rotation.
pub(crate) fn reducible_cycles(gates: &[ToffoliGate], width: usize, library: &TemplateLibrary) -> Option<Vec<usize>> {
    let m = gates.len();
    let forward = reducible_rotations(gates, width, library);
    let reversed: Vec<ToffoliGate> = gates.iter().rev().copied().collect();
    let backward = reducible_rotations(&reversed, width, library);
    let both: Vec<usize> = forward.into_iter().filter(|r| backward.contains(&(m - 1 - r))).collect();
    (both.len() < m).then_some(both)
}

/// Canonical key of a generalized template.
pub(crate) fn template_key(t: &Template) -> (Vec<u16>, Vec<u32>) {
    let m = t.size();
    let mut best: Option<(Vec<u16>, Vec<u32>)> = None;
    for perm in permutations(t.t_lines()) {
        let mapped: Vec<u16> = t
            .gates()
            .iter()
            .map(|g| {
                let c = (0..t.t_lines())
                    .filter(|u| g.t_controls >> u & 1 == 1)
                    .fold(0u16, |a, u| a | 1 << perm[u]);
                (c << 5) | perm[g.target] as u16
            })
            .collect();
        for o in orientations(m) {
            let code: Vec<u16> = o.iter().map(|&i| mapped[i]).collect();
            let mut classes: Vec<u32> = t
                .class_closure()
                .iter()
                .map(|&v| o.iter().enumerate().fold(0, |a, (j, &i)| a | (v >> i & 1) << j))
                .collect();
            classes.sort_unstable();
            let key = (code, classes);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.expect("at least one orientation")
}

/// Builds templates size by size, extending `library` in place, and returns
/// the templates that were added.
pub fn find_templates(cfg: &FinderConfig, library: &mut TemplateLibrary) -> Vec<Template> {
    let mut added = Vec::new();
    let mut keys: BTreeSet<(Vec<u16>, Vec<u32>)> = library.templates().iter().map(template_key).collect();
    let max_size = cfg.max_size();
    let mut tables: HashMap<usize, DepthTable> = HashMap::new();
    for size in 2..=max_size {
        let mut candidates: Vec<(usize, Vec<ToffoliGate>)> = Vec::new();
        for &(width, limit) in &cfg.searches {
            if size > limit {
                continue;
            }
            let depths = tables
                .entry(width)
                .or_insert_with(|| optimal_depths(width, max_size / 2));
            candidates.extend(identity_candidates(width, size, depths).into_iter().map(|c| (width, c)));
        }
        let smaller = library.up_to(size - 1);
        let survivors: Vec<(usize, Vec<ToffoliGate>)> = candidates
            .into_par_iter()
            .filter(|(w, c)| reducible_cycles(c, *w, &smaller).is_some())
            .collect();
        for (width, cand) in survivors {
            let Some(red) = reducible_cycles(&cand, width, library) else {
                continue;
            };
            for t in generalize(&cand, width) {
                let t = t.with_reducible(red.clone());
                let key = template_key(&t);
                if keys.insert(key) {
                    library.push(t.clone());
                    added.push(t);
                }
            }
        }
    }
    added
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_line_distribution() {
        let d = optimal_depths(3, 8);
        assert_eq!(d.histogram(), vec![1, 12, 102, 625, 2780, 8921, 17049, 10253, 577]);
    }

    #[test]
    fn size_two_candidates_are_duplicate_gates() {
        let d = optimal_depths(3, 1);
        let c = identity_candidates(3, 2, &d);
        assert!(c.iter().all(|n| n[0] == n[1]));
        // The only duplicate that touches all three lines is TOF(a,b;c).
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn size_four_candidates_include_commuting_pairs() {
        let d = optimal_depths(3, 2);
        let c = identity_candidates(3, 4, &d);
        assert!(c.iter().any(|n| n[0] == n[2] && n[1] == n[3] && n[0] != n[1] && n[0].commutes_with(&n[1])));
    }

    #[test]
    fn generalize_duplicate_gate() {
        let ts = generalize(&[ToffoliGate::cnot(1, 0), ToffoliGate::cnot(1, 0)], 2);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].t_lines(), 1);
        assert_eq!(ts[0].class_closure(), &[0b11]);
    }

    #[test]
    fn generators_of_closed_set() {
        assert_eq!(generators(&[0b001, 0b010, 0b011, 0b111]), vec![0b001, 0b010, 0b111]);
    }
}

use std::collections::HashSet;

use crate::cost::{CostModel, CostValue};
use crate::gate::ToffoliGate;
use crate::network::Network;

use super::{Template, TemplateGate, TemplateLibrary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Accept a replacement iff it removes gates without raising the cost.
    GateCount,
    /// Accept a replacement iff it strictly lowers the cost.
    Cost,
}

#[derive(Clone, Debug)]
pub struct TemplateOptions {
    pub model: CostModel,
    pub objective: Objective,
    /// How far below the start gate matching may look.
    pub window: usize,
}

impl Default for TemplateOptions {
    fn default() -> Self {
        TemplateOptions {
            model: CostModel::gate_count(),
            objective: Objective::GateCount,
            window: 20,
        }
    }
}

impl TemplateOptions {
    pub fn for_model(model: CostModel) -> Self {
        let objective = match model.mode {
            crate::cost::CostMode::GateCount => Objective::GateCount,
            crate::cost::CostMode::Quantum => Objective::Cost,
        };
        TemplateOptions {
            model,
            objective,
            ..Default::default()
        }
    }
}

/// Line assignment for a partial match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    /// Network line of each t-line.
    pub t_lines: Vec<usize>,
    /// For each network line, the class-closure vector it was assigned to.
    pub class_of_line: Vec<Option<u32>>,
}

const UNBOUND: usize = usize::MAX;

/// Binds the template lines so that `matched[j]` is an instance of template
/// gate `seq[j]`. Unconstrained t-lines get the lowest unused lines.
pub fn bind_match(tpl: &Template, seq: &[usize], matched: &[ToffoliGate], width: usize) -> Option<Binding> {
    let p = matched.len();
    let tl = tpl.t_lines();
    let mut t_bind = [UNBOUND; 16];
    let mut owner = [UNBOUND; 32];
    for (j, g) in matched.iter().enumerate() {
        let u = tpl.gates()[seq[j]].target;
        let l = g.target();
        if t_bind[u] == UNBOUND {
            if owner[l] != UNBOUND {
                return None;
            }
            t_bind[u] = l;
            owner[l] = u;
        } else if t_bind[u] != l {
            return None;
        }
    }
    // Restricted control patterns over the matched gates.
    let mut line_pattern = [0u32; 32];
    let mut touched = 0u32;
    for (j, g) in matched.iter().enumerate() {
        touched |= g.lines();
        let mut c = g.controls();
        while c != 0 {
            line_pattern[c.trailing_zeros() as usize] |= 1 << j;
            c &= c - 1;
        }
    }
    let mut t_pattern = [0u32; 16];
    for (j, &gi) in seq[..p].iter().enumerate() {
        let tc = tpl.gates()[gi].t_controls;
        for (u, pat) in t_pattern.iter_mut().enumerate().take(tl) {
            if tc >> u & 1 == 1 {
                *pat |= 1 << j;
            }
        }
    }
    for u in 0..tl {
        if t_bind[u] != UNBOUND && line_pattern[t_bind[u]] != t_pattern[u] {
            return None;
        }
    }
    let mut pending = [0usize; 16];
    let mut n_pending = 0;
    for u in 0..tl {
        if t_bind[u] == UNBOUND && t_pattern[u] != 0 {
            pending[n_pending] = u;
            n_pending += 1;
        }
    }
    let mut state = Search {
        tpl,
        seq: &seq[..p],
        width,
        t_pattern: &t_pattern,
        line_pattern: &line_pattern,
        pending: &pending[..n_pending],
        t_bind,
        owner,
    };
    let class_of_line = state.solve(0)?;
    let mut t_bind = state.t_bind;
    let owner = state.owner;
    // Remaining t-lines get fresh lines that no matched gate touches.
    let mut free = (0..width).filter(|&l| owner[l] == UNBOUND && touched >> l & 1 == 0);
    for b in t_bind.iter_mut().take(tl) {
        if *b == UNBOUND {
            *b = free.next()?;
        }
    }
    Some(Binding {
        t_lines: t_bind[..tl].to_vec(),
        class_of_line,
    })
}

struct Search<'a> {
    tpl: &'a Template,
    seq: &'a [usize],
    width: usize,
    t_pattern: &'a [u32; 16],
    line_pattern: &'a [u32; 32],
    pending: &'a [usize],
    t_bind: [usize; 16],
    owner: [usize; 32],
}

impl Search<'_> {
    fn solve(&mut self, k: usize) -> Option<Vec<Option<u32>>> {
        if k == self.pending.len() {
            return self.assign_classes();
        }
        let u = self.pending[k];
        for l in 0..self.width {
            if self.owner[l] == UNBOUND && self.line_pattern[l] == self.t_pattern[u] {
                self.owner[l] = u;
                self.t_bind[u] = l;
                if let Some(r) = self.solve(k + 1) {
                    return Some(r);
                }
                self.owner[l] = UNBOUND;
                self.t_bind[u] = UNBOUND;
            }
        }
        None
    }

    /// Restriction of closure vector `v` to the matched gates.
    fn restrict(&self, v: u32) -> u32 {
        self.seq
            .iter()
            .enumerate()
            .filter(|&(_, &gi)| v >> gi & 1 == 1)
            .fold(0u32, |acc, (j, _)| acc | 1 << j)
    }

    fn assign_classes(&self) -> Option<Vec<Option<u32>>> {
        let mut out = vec![None; self.width];
        for (l, slot) in out.iter_mut().enumerate() {
            let pat = self.line_pattern[l];
            if self.owner[l] != UNBOUND || pat == 0 {
                continue;
            }
            let v = self
                .tpl
                .class_closure()
                .iter()
                .copied()
                .filter(|&v| self.restrict(v) == pat)
                .min_by_key(|v| (v.count_ones(), *v))?;
            *slot = Some(v);
        }
        Some(out)
    }
}

/// Quick necessary test for `g` to match template gate `tg` given the
/// t-lines already fixed by matched targets.
fn fits_targets(g: &ToffoliGate, tg: &TemplateGate, bound: &[usize]) -> bool {
    let t = g.target();
    match bound[tg.target] {
        UNBOUND => {
            if bound.contains(&t) {
                return false;
            }
        }
        l if l != t => return false,
        _ => {}
    }
    bound.iter().enumerate().all(|(u, &l)| {
        l == UNBOUND || u == tg.target || (g.controls() >> l & 1) == (tg.t_controls >> u & 1)
    })
}

/// Network gate for template gate `gi` under `binding`.
fn instantiate_gate(tpl: &Template, gi: usize, binding: &Binding) -> ToffoliGate {
    let g = tpl.gates()[gi];
    let mut mask = 0u32;
    for u in 0..tpl.t_lines() {
        if g.t_controls >> u & 1 == 1 {
            mask |= 1 << binding.t_lines[u];
        }
    }
    for (l, c) in binding.class_of_line.iter().enumerate() {
        if let Some(v) = c {
            if v >> gi & 1 == 1 {
                mask |= 1 << l;
            }
        }
    }
    ToffoliGate::from_mask(mask, binding.t_lines[g.target]).expect("binding keeps targets off control lines")
}

/// True iff the gates at `positions` can be brought together next to the
/// one at `at` by swapping moving pairs, keeping their relative order.
pub fn can_gather(gates: &[ToffoliGate], positions: &[usize], at: usize) -> bool {
    let lo = *positions.iter().min().expect("nonempty");
    let hi = *positions.iter().max().expect("nonempty");
    (lo..=hi).filter(|q| !positions.contains(q)).all(|q| {
        let g = &gates[q];
        if q > at {
            positions.iter().filter(|&&k| k > q).all(|&k| g.commutes_with(&gates[k]))
        } else {
            positions.iter().filter(|&&k| k < q).all(|&k| g.commutes_with(&gates[k]))
        }
    })
}

/// One flag per entry of `positions`: whether everything can gather there.
pub fn gather_flags(gates: &[ToffoliGate], positions: &[usize]) -> Vec<bool> {
    positions.iter().map(|&at| can_gather(gates, positions, at)).collect()
}

/// Buffers reused across match attempts.
#[derive(Default)]
struct Scratch {
    positions: Vec<usize>,
    matched: Vec<ToffoliGate>,
    flags: Vec<bool>,
    trial: Vec<bool>,
    bound: Vec<usize>,
}

/// Running totals used to price a replacement without rescanning.
struct CostTracker<'a> {
    model: &'a CostModel,
    width: usize,
    plain: u64,
    starred: u64,
    full: usize,
}

impl<'a> CostTracker<'a> {
    fn new(model: &'a CostModel, gates: &[ToffoliGate], width: usize) -> Self {
        let mut t = CostTracker {
            model,
            width,
            plain: 0,
            starred: 0,
            full: 0,
        };
        for g in gates {
            t.plain = t.plain.saturating_add(model.weight(g.control_count(), false));
            t.starred = t.starred.saturating_add(model.weight(g.control_count(), true));
            t.full += model.stars(g, width) as usize;
        }
        t
    }

    fn current(&self) -> CostValue {
        if self.full > 0 {
            CostValue::new(self.starred, true)
        } else {
            CostValue::new(self.plain, false)
        }
    }

    fn after(&self, removed: &[ToffoliGate], added: &[ToffoliGate]) -> CostValue {
        let w = |gs: &[ToffoliGate], s: bool| -> u64 {
            gs.iter()
                .map(|g| self.model.weight(g.control_count(), s))
                .fold(0u64, u64::saturating_add)
        };
        let count = |gs: &[ToffoliGate]| gs.iter().filter(|g| self.model.stars(g, self.width)).count();
        let full = self.full - count(removed) + count(added);
        if full > 0 {
            CostValue::new(self.starred - w(removed, true) + w(added, true), true)
        } else {
            CostValue::new(self.plain - w(removed, false) + w(added, false), false)
        }
    }
}

struct Replacement {
    gates: Vec<ToffoliGate>,
    new_start: usize,
}

struct Candidate {
    positions: Vec<usize>,
    at: usize,
    replacement: Vec<ToffoliGate>,
    cost: CostValue,
}

struct Matcher<'a> {
    gates: &'a [ToffoliGate],
    width: usize,
    opts: &'a TemplateOptions,
    tracker: CostTracker<'a>,
}

impl Matcher<'_> {
    fn compatible(&self, g: &ToffoliGate, tpl: &Template, gi: usize, class_mask: u32) -> bool {
        let tc = tpl.gates()[gi].t_controls.count_ones() as usize;
        if class_mask >> gi & 1 == 1 {
            g.control_count() >= tc
        } else {
            g.control_count() == tc
        }
    }

    fn evaluate(
        &self,
        tpl: &Template,
        seq: &[usize],
        positions: &[usize],
        matched: &[ToffoliGate],
        flags: &[bool],
        binding: &Binding,
    ) -> Option<Candidate> {
        let p = positions.len();
        let m = seq.len();
        if self.opts.objective == Objective::GateCount && 2 * p <= m {
            return None;
        }
        let replacement: Vec<ToffoliGate> = seq[p..].iter().map(|&gi| instantiate_gate(tpl, gi, binding)).collect();
        let before = self.tracker.current();
        let cost = self.tracker.after(matched, &replacement);
        let accept = match self.opts.objective {
            Objective::GateCount => cost <= before,
            Objective::Cost => cost < before,
        };
        if !accept {
            return None;
        }
        let at = positions
            .iter()
            .zip(flags)
            .filter(|(_, &f)| f)
            .map(|(&k, _)| k)
            .max()?;
        Some(Candidate {
            positions: positions.to_vec(),
            at,
            replacement,
            cost,
        })
    }

    fn match_sequence(&self, start: usize, tpl: &Template, seq: &[usize], class_mask: u32, sc: &mut Scratch) -> Option<Candidate> {
        let m = seq.len();
        let first = self.gates[start];
        if !self.compatible(&first, tpl, seq[0], class_mask) {
            return None;
        }
        sc.positions.clear();
        sc.positions.push(start);
        sc.matched.clear();
        sc.matched.push(first);
        // A single gate only pays off when it can be traded for cheaper ones.
        let single_pays = self.opts.objective == Objective::Cost || 2 > m;
        let mut binding = if single_pays {
            bind_match(tpl, seq, &sc.matched, self.width)?
        } else {
            Binding {
                t_lines: Vec::new(),
                class_of_line: Vec::new(),
            }
        };
        sc.flags.clear();
        sc.flags.push(true);
        sc.bound.clear();
        sc.bound.resize(tpl.t_lines(), UNBOUND);
        sc.bound[tpl.gates()[seq[0]].target] = first.target();
        let mut best = if single_pays {
            self.evaluate(tpl, seq, &sc.positions, &sc.matched, &sc.flags, &binding)
        } else {
            None
        };
        let lo = start.saturating_sub(self.opts.window);
        let mut c = start;
        while c > lo && sc.positions.len() < m {
            c -= 1;
            if self.opts.objective == Objective::GateCount && 2 * (sc.positions.len() + c - lo + 1) <= m {
                break;
            }
            let g = self.gates[c];
            let tg = &tpl.gates()[seq[sc.positions.len()]];
            if !self.compatible(&g, tpl, seq[sc.positions.len()], class_mask) || !fits_targets(&g, tg, &sc.bound) {
                continue;
            }
            sc.positions.push(c);
            sc.trial.clear();
            let positions = &sc.positions;
            sc.trial.extend(positions.iter().map(|&at| can_gather(self.gates, positions, at)));
            if !sc.trial.iter().any(|&x| x) {
                sc.positions.pop();
                continue;
            }
            sc.matched.push(g);
            match bind_match(tpl, seq, &sc.matched, self.width) {
                Some(b) => {
                    sc.bound[tg.target] = g.target();
                    binding = b;
                    std::mem::swap(&mut sc.flags, &mut sc.trial);
                    if let Some(cand) = self.evaluate(tpl, seq, &sc.positions, &sc.matched, &sc.flags, &binding) {
                        if best.as_ref().is_none_or(|b| cand.cost <= b.cost) {
                            best = Some(cand);
                        }
                    }
                }
                None => {
                    sc.positions.pop();
                    sc.matched.pop();
                }
            }
        }
        best
    }

    fn try_start(&self, start: usize, library: &TemplateLibrary, sc: &mut Scratch) -> Option<Replacement> {
        for (idx, tpl) in library.templates().iter().enumerate() {
            let class_mask = library.class_mask(idx);
            for seq in library.sequences(idx) {
                if let Some(cand) = self.match_sequence(start, tpl, seq, class_mask, sc) {
                    return Some(self.splice(cand));
                }
            }
        }
        None
    }

    fn splice(&self, cand: Candidate) -> Replacement {
        let mut out = Vec::with_capacity(self.gates.len());
        let mut before = 0;
        for (k, g) in self.gates.iter().enumerate() {
            if k < cand.at && !cand.positions.contains(&k) {
                out.push(*g);
                before += 1;
            }
        }
        out.extend_from_slice(&cand.replacement);
        for (k, g) in self.gates.iter().enumerate() {
            if k > cand.at && !cand.positions.contains(&k) {
                out.push(*g);
            }
        }
        Replacement {
            gates: out,
            new_start: before,
        }
    }
}

/// Result of a single matching step at one start position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateStep {
    pub gates: Vec<ToffoliGate>,
    pub new_start: usize,
}

/// Tries to apply one template with its first matched gate at `start`.
pub fn apply_at(gates: &[ToffoliGate], width: usize, start: usize, library: &TemplateLibrary, opts: &TemplateOptions) -> Option<TemplateStep> {
    let matcher = Matcher {
        gates,
        width,
        opts,
        tracker: CostTracker::new(&opts.model, gates, width),
    };
    matcher.try_start(start, library, &mut Scratch::default()).map(|r| TemplateStep {
        gates: r.gates,
        new_start: r.new_start,
    })
}

/// Applies templates until no start position admits a beneficial match.
pub fn apply_templates(net: &Network, library: &TemplateLibrary, opts: &TemplateOptions) -> Network {
    let width = net.width();
    let mut gates = net.gates().to_vec();
    let mut sc = Scratch::default();
    // A match at `start` only reads gates[start - window..=start] and, for
    // cost objectives, whether the network is starred. Windows seen to fail
    // stay failed.
    let mut barren: HashSet<(bool, Vec<ToffoliGate>)> = HashSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        let mut tracker = CostTracker::new(&opts.model, &gates, width);
        let mut start = 0;
        while start < gates.len() {
            let key = (tracker.full > 0, gates[start.saturating_sub(opts.window)..=start].to_vec());
            if barren.contains(&key) {
                start += 1;
                continue;
            }
            let matcher = Matcher {
                gates: &gates,
                width,
                opts,
                tracker,
            };
            let step = matcher.try_start(start, library, &mut sc);
            tracker = matcher.tracker;
            match step {
                Some(r) => {
                    gates = r.gates;
                    start = r.new_start;
                    tracker = CostTracker::new(&opts.model, &gates, width);
                    changed = true;
                }
                None => {
                    barren.insert(key);
                    start += 1;
                }
            }
        }
    }
    Network::from_gates_unchecked(width, gates)
}

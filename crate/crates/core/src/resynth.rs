//! Resynthesis of contiguous subnetworks.
//!
//! Any window of a network realizes a reversible function on the lines it
//! touches. The drivers extract such windows, synthesize the function again
//! with a [`Toolchain`] and splice the result back when the whole network
//! gets strictly cheaper.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::{CostMode, CostModel, CostValue};
use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::gate::ToffoliGate;
use crate::network::Network;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResynthConfig {
    pub iterations: usize,
    pub samples_per_iteration: usize,
    pub seed: u64,
    /// Shortest window worth resynthesizing.
    pub min_length: usize,
    pub time_limit: Option<Duration>,
}

impl Default for ResynthConfig {
    fn default() -> Self {
        ResynthConfig {
            iterations: 10,
            samples_per_iteration: 25,
            seed: 0,
            min_length: 5,
            time_limit: None,
        }
    }
}

impl ResynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_length < 5 {
            return Err(Error::Config(format!(
                "min_length {} is below 5; shorter windows are already optimal",
                self.min_length
            )));
        }
        if self.samples_per_iteration == 0 {
            return Err(Error::Config("samples_per_iteration must be at least 1".into()));
        }
        Ok(())
    }
}

/// Synthesizes a function from scratch. Implementations must be
/// deterministic and must not call back into the drivers.
pub trait Toolchain: Sync {
    fn synthesize(&self, f: &ReversibleFunction) -> Option<Network>;
    fn cost_model(&self) -> &CostModel;
}

/// Output of a driver run.
#[derive(Clone, Debug)]
pub struct DriverRun {
    pub network: Network,
    /// Number of windows replaced.
    pub improvements: usize,
    /// The time limit stopped the run before it finished.
    pub timed_out: bool,
}

/// Lines touched by a window, ascending.
fn touched_lines(gates: &[ToffoliGate]) -> Vec<usize> {
    let mask = gates.iter().fold(0u32, |a, g| a | g.lines());
    (0..32).filter(|l| mask >> l & 1 == 1).collect()
}

/// The function computed by `length` gates from `start`, restricted to the
/// lines they touch, with the map from local to network line indices.
pub fn subnetwork_function(net: &Network, start: usize, length: usize) -> (ReversibleFunction, Vec<usize>) {
    assert!(length >= 1 && start + length <= net.len(), "window out of range");
    let window = &net.gates()[start..start + length];
    let lines = touched_lines(window);
    let mut local = [usize::MAX; 32];
    for (i, &l) in lines.iter().enumerate() {
        local[l] = i;
    }
    let gates: Vec<ToffoliGate> = window.iter().map(|g| g.remap(&local)).collect();
    let sub = Network::from_gates_unchecked(lines.len(), gates);
    (sub.function(), lines)
}

/// Sub-function (width, truth table) to its replacement, if one was found.
type WindowCache = HashMap<(usize, Vec<u32>), Option<Vec<ToffoliGate>>>;

struct Resynthesizer<'a, T: Toolchain + ?Sized> {
    toolchain: &'a T,
    cache: Mutex<WindowCache>,
}

struct Improvement {
    start: usize,
    length: usize,
    network: Network,
    cost: CostValue,
}

impl<'a, T: Toolchain + ?Sized> Resynthesizer<'a, T> {
    fn new(toolchain: &'a T) -> Self {
        Resynthesizer {
            toolchain,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn synthesize_local(&self, f: &ReversibleFunction) -> Option<Vec<ToffoliGate>> {
        let key = (f.width(), f.table().to_vec());
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let out = self
            .toolchain
            .synthesize(f)
            .filter(|n| n.realizes(f))
            .map(Network::into_gates);
        self.cache.lock().expect("cache lock").insert(key, out.clone());
        out
    }

    fn probe(&self, net: &Network, start: usize, length: usize, current: CostValue) -> Option<Improvement> {
        let (f, lines) = subnetwork_function(net, start, length);
        let local = self.synthesize_local(&f)?;
        if local.len() > length && self.toolchain.cost_model().mode == CostMode::GateCount {
            return None;
        }
        let mut gates = net.gates()[..start].to_vec();
        gates.extend(local.iter().map(|g| g.remap(&lines)));
        gates.extend_from_slice(&net.gates()[start + length..]);
        let cost = self.toolchain.cost_model().cost_of(&gates, net.width());
        (cost < current).then(|| Improvement {
            start,
            length,
            network: Network::from_gates_unchecked(net.width(), gates),
            cost,
        })
    }
}

/// Best improvement: lowest cost, then earliest start, then shortest window.
fn pick(found: Vec<Improvement>) -> Option<Improvement> {
    found
        .into_iter()
        .min_by(|a, b| (a.cost, a.start, a.length).cmp(&(b.cost, b.start, b.length)))
}

/// Resynthesizes one window and returns the spliced network if it is
/// strictly cheaper under the toolchain's cost model.
pub fn resynthesize_window<T: Toolchain + ?Sized>(net: &Network, start: usize, length: usize, toolchain: &T) -> Option<Network> {
    let current = toolchain.cost_model().cost_of(net.gates(), net.width());
    Resynthesizer::new(toolchain).probe(net, start, length, current).map(|i| i.network)
}

/// Number of windows with length in `[min_length, len]`.
fn window_count(len: usize, min_length: usize) -> usize {
    if len < min_length {
        return 0;
    }
    let k = len - min_length + 1;
    k * (k + 1) / 2
}

/// The `idx`-th window, ordered by length then start.
fn window_at(len: usize, min_length: usize, mut idx: usize) -> (usize, usize) {
    for length in min_length..=len {
        let starts = len - length + 1;
        if idx < starts {
            return (idx, length);
        }
        idx -= starts;
    }
    unreachable!("window index out of range")
}

fn expired(started: Instant, limit: Option<Duration>) -> bool {
    limit.is_some_and(|l| started.elapsed() >= l)
}

/// Per iteration, resynthesizes `samples_per_iteration` windows drawn
/// uniformly from all (start, length) pairs and applies the best
/// improvement. Deterministic for a given seed.
pub fn random_driver<T: Toolchain + ?Sized>(net: &Network, cfg: &ResynthConfig, toolchain: &T) -> DriverRun {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rs = Resynthesizer::new(toolchain);
    let model = toolchain.cost_model();
    let mut net = net.clone();
    let mut improvements = 0;
    let mut timed_out = false;
    for _ in 0..cfg.iterations {
        let total = window_count(net.len(), cfg.min_length);
        if total == 0 {
            break;
        }
        if expired(started, cfg.time_limit) {
            timed_out = true;
            break;
        }
        let windows: Vec<(usize, usize)> = (0..cfg.samples_per_iteration)
            .map(|_| window_at(net.len(), cfg.min_length, rng.gen_range(0..total)))
            .collect();
        let current = model.cost_of(net.gates(), net.width());
        let found: Vec<Improvement> = windows
            .par_iter()
            .filter_map(|&(s, l)| rs.probe(&net, s, l, current))
            .collect();
        if let Some(best) = pick(found) {
            net = best.network;
            improvements += 1;
        }
    }
    DriverRun {
        network: net,
        improvements,
        timed_out,
    }
}

/// Scans start positions in order, probing every window length from that
/// start, applies the best improvement found and rescans from the
/// beginning. Stops at a fixpoint or when the time limit runs out.
pub fn exhaustive_driver<T: Toolchain + ?Sized>(net: &Network, cfg: &ResynthConfig, toolchain: &T) -> DriverRun {
    let started = Instant::now();
    let rs = Resynthesizer::new(toolchain);
    let model = toolchain.cost_model();
    let mut net = net.clone();
    let mut improvements = 0;
    'rescan: loop {
        let len = net.len();
        let current = model.cost_of(net.gates(), net.width());
        for start in 0..len.saturating_sub(cfg.min_length - 1) {
            if expired(started, cfg.time_limit) {
                return DriverRun {
                    network: net,
                    improvements,
                    timed_out: true,
                };
            }
            let found: Vec<Improvement> = (cfg.min_length..=len - start)
                .rev()
                .collect::<Vec<_>>()
                .par_iter()
                .filter_map(|&l| rs.probe(&net, start, l, current))
                .collect();
            if let Some(best) = pick(found) {
                net = best.network;
                improvements += 1;
                continue 'rescan;
            }
        }
        return DriverRun {
            network: net,
            improvements,
            timed_out: false,
        };
    }
}

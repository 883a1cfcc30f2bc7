//! Benchmark specifications and the two-model benchmark run.
//!
//! Families: `hwbN`, `hamN`, `cycleK_M`, `modKadder`, and the fixed
//! functions `3_17`, `4_49`, `add3`, `4mod5`, `5mod5`, `rd53`.

use crate::cost::{CostModel, CostValue};
use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::pipeline::{synthesize_best, PipelineOptions, PipelineReport};

/// Names accepted by [`generate`] that run in seconds.
pub const SMALL_BENCHMARKS: &[&str] = &[
    "3_17", "4_49", "add3", "ham3", "hwb4", "4mod5", "hwb5", "5mod5", "hwb6", "mod5adder", "rd53", "ham7",
];

fn build(width: usize, f: impl Fn(u32) -> u32) -> Result<ReversibleFunction> {
    if width == 0 || width > crate::MAX_WIDTH {
        return Err(Error::WidthOutOfRange {
            width,
            cap: crate::MAX_WIDTH,
        });
    }
    ReversibleFunction::new(width, (0..1u32 << width).map(f).collect())
}

/// Hidden weighted bit: the input rotated left by its population count.
pub fn hwb(n: usize) -> Result<ReversibleFunction> {
    let mask = (1u32 << n) - 1;
    build(n, |x| {
        let w = x.count_ones() as usize % n;
        if w == 0 {
            x
        } else {
            ((x << w) | (x >> (n - w))) & mask
        }
    })
}

/// Each pattern goes to its rank when patterns are ordered by Hamming
/// weight, then by value.
pub fn ham(n: usize) -> Result<ReversibleFunction> {
    if n == 0 || n > crate::MAX_WIDTH {
        return build(n, |x| x);
    }
    let mut order: Vec<u32> = (0..1u32 << n).collect();
    order.sort_by_key(|&x| (x.count_ones(), x));
    let mut rank = vec![0u32; order.len()];
    for (r, &x) in order.iter().enumerate() {
        rank[x as usize] = r as u32;
    }
    build(n, |x| rank[x as usize])
}

/// Increments the `k`-bit register on the low lines when all `m` lines
/// above it are 1.
pub fn cycle(k: usize, m: usize) -> Result<ReversibleFunction> {
    let reg = (1u32 << k) - 1;
    let ctrl = ((1u32 << m) - 1) << k;
    build(k + m, |x| {
        if x & ctrl == ctrl {
            (x & !reg) | ((x & reg) + 1) & reg
        } else {
            x
        }
    })
}

/// `(a, b) -> (a, (a + b) mod k)` on two registers of `ceil(log2 k)` lines,
/// `a` on the low lines. Pairs with an operand of `k` or more are fixed.
pub fn mod_adder(k: u32) -> Result<ReversibleFunction> {
    if k < 2 {
        return Err(Error::UnknownBenchmark(format!("mod{k}adder")));
    }
    let bits = (32 - (k - 1).leading_zeros()) as usize;
    let lo = (1u32 << bits) - 1;
    build(2 * bits, |x| {
        let a = x & lo;
        let b = x >> bits;
        if a < k && b < k {
            a | ((a + b) % k) << bits
        } else {
            x
        }
    })
}

/// The output line above `n` input lines is flipped iff the input is a
/// multiple of 5.
fn mod5(n: usize) -> Result<ReversibleFunction> {
    let lo = (1u32 << n) - 1;
    build(n + 1, |x| if (x & lo).is_multiple_of(5) { x ^ (1 << n) } else { x })
}

/// Full adder on lines a, b, c, d: `(a, a^b, a^b^c, d ^ maj(a, b, c))`.
fn add3() -> Result<ReversibleFunction> {
    build(4, |x| {
        let (a, b, c, d) = (x & 1, x >> 1 & 1, x >> 2 & 1, x >> 3 & 1);
        let maj = (a & b) | (a & c) | (b & c);
        a | (a ^ b) << 1 | (a ^ b ^ c) << 2 | (d ^ maj) << 3
    })
}

/// Lines 1..5 are kept; lines 0, 5 and 6 read as a 3-bit counter (line 0
/// lowest) gain the weight of lines 1..5 modulo 8. With the counter at 0
/// it ends up holding the weight of all five inputs.
fn rd53() -> Result<ReversibleFunction> {
    build(7, |x| {
        let counter = (x & 1) | (x >> 5 & 3) << 1;
        let w = (x >> 1 & 0b1111).count_ones();
        let v = (counter + w) & 7;
        (x & 0b11110) | (v & 1) | (v >> 1) << 5
    })
}

fn parse_tail(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

/// The specification named `name`.
pub fn generate(name: &str) -> Result<ReversibleFunction> {
    let unknown = || Error::UnknownBenchmark(name.to_string());
    match name {
        "3_17" => return ReversibleFunction::new(3, vec![7, 1, 4, 3, 0, 2, 6, 5]),
        "4_49" => return ReversibleFunction::new(4, vec![15, 1, 12, 3, 5, 6, 8, 7, 0, 10, 13, 9, 2, 4, 14, 11]),
        "add3" => return add3(),
        "4mod5" => return mod5(4),
        "5mod5" => return mod5(5),
        "rd53" => return rd53(),
        _ => {}
    }
    if let Some(n) = parse_tail(name, "hwb") {
        return if n >= 1 { hwb(n) } else { Err(unknown()) };
    }
    if let Some(n) = parse_tail(name, "ham") {
        return if n >= 1 { ham(n) } else { Err(unknown()) };
    }
    if let Some(rest) = name.strip_prefix("cycle") {
        let (k, m) = rest.split_once('_').ok_or_else(unknown)?;
        let k: usize = k.parse().map_err(|_| unknown())?;
        let m: usize = m.parse().map_err(|_| unknown())?;
        return if k >= 1 { cycle(k, m) } else { Err(unknown()) };
    }
    if let Some(k) = name.strip_prefix("mod").and_then(|r| r.strip_suffix("adder")) {
        return mod_adder(k.parse().map_err(|_| unknown())?);
    }
    Err(unknown())
}

/// One benchmark under both cost models.
#[derive(Clone, Debug)]
pub struct BenchResult {
    pub name: String,
    pub width: usize,
    /// Run minimizing gate count.
    pub gate_run: PipelineReport,
    /// Run minimizing quantum cost.
    pub quantum_run: PipelineReport,
    /// Quantum cost of the gate-count run's network.
    pub gate_run_quantum_cost: CostValue,
    /// Quantum cost of the quantum run's network.
    pub quantum_run_quantum_cost: CostValue,
}

impl BenchResult {
    /// `name  size  GC-gc  QC-gc  GC-qc  QC-qc`, tab-separated; stars mark
    /// costs that assume an auxiliary line.
    pub fn row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.name,
            self.width,
            self.gate_run.best.len(),
            self.gate_run_quantum_cost,
            self.quantum_run.best.len(),
            self.quantum_run_quantum_cost
        )
    }

    pub fn verified(&self) -> bool {
        self.gate_run.verified && self.quantum_run.verified
    }
}

pub const BENCH_HEADER: &str = "name\tsize\tGC-gc\tQC-gc\tGC-qc\tQC-qc";

/// Runs the pipeline on `f` minimizing gate count, then quantum cost.
/// `opts.cost_model` only supplies the quantum cost table. The gate-count
/// result is the better of the two networks by (gates, quantum cost).
pub fn run_benchmark(name: &str, f: &ReversibleFunction, opts: &PipelineOptions) -> Result<BenchResult> {
    let quantum = CostModel::quantum_with(opts.cost_model.table.clone());
    let gate_opts = PipelineOptions {
        cost_model: CostModel::gate_count(),
        ..opts.clone()
    };
    let quantum_opts = PipelineOptions {
        cost_model: quantum.clone(),
        ..opts.clone()
    };
    let mut gate_run = synthesize_best(f, &gate_opts)?;
    let quantum_run = synthesize_best(f, &quantum_opts)?;
    // Either network is a valid gate-count answer; prefer fewer gates, then
    // lower quantum cost.
    let key = |n: &crate::network::Network| quantum.network_cost(n).map(|c| (n.len(), c));
    if quantum_run.verified && key(&quantum_run.best)? < key(&gate_run.best)? {
        gate_run.best = quantum_run.best.clone();
        gate_run.cost = CostValue::new(gate_run.best.len() as u64, false);
        gate_run.verified = true;
    }
    Ok(BenchResult {
        name: name.to_string(),
        width: f.width(),
        gate_run_quantum_cost: quantum.network_cost(&gate_run.best)?,
        quantum_run_quantum_cost: quantum.network_cost(&quantum_run.best)?,
        gate_run,
        quantum_run,
    })
}

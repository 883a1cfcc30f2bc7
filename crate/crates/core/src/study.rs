//! Gate-count statistics over all 40,320 reversible functions of 3 lines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::function::ReversibleFunction;
use crate::pipeline::{synthesize_best, PipelineOptions, PipelineToolchain};
use crate::resynth::Toolchain;
use crate::synthesis::{synthesize, SynthOptions};
use crate::templates::optimal_depths;

/// Number of permutations of 8 elements.
pub const FUNCTIONS_3X3: usize = 40_320;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StudyHistogram {
    /// `counts[g]`: functions realized with `g` gates.
    pub counts: Vec<u64>,
    /// Functions the engine failed on.
    pub diverged: u64,
}

impl StudyHistogram {
    fn from_counts(sizes: impl IntoIterator<Item = Option<usize>>) -> Self {
        let mut h = StudyHistogram {
            counts: Vec::new(),
            diverged: 0,
        };
        for s in sizes {
            match s {
                Some(g) => {
                    if h.counts.len() <= g {
                        h.counts.resize(g + 1, 0);
                    }
                    h.counts[g] += 1;
                }
                None => h.diverged += 1,
            }
        }
        h
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.diverged
    }

    /// Mean gate count over the functions that were realized.
    pub fn weighted_average(&self) -> f64 {
        let n: u64 = self.counts.iter().sum();
        let sum: u64 = self.counts.iter().enumerate().map(|(g, &c)| g as u64 * c).sum();
        sum as f64 / n as f64
    }

    /// Tab-separated rows `gates  count`, then the average.
    pub fn table(&self) -> String {
        let mut out = String::from("gates\tfunctions\n");
        for (g, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{g}\t{c}\n"));
        }
        if self.diverged > 0 {
            out.push_str(&format!("diverged\t{}\n", self.diverged));
        }
        out.push_str(&format!("WA\t{:.3}\n", self.weighted_average()));
        out
    }
}

/// The `index`-th permutation of `0..8` in lexicographic order.
pub fn function_3x3(index: usize) -> ReversibleFunction {
    assert!(index < FUNCTIONS_3X3);
    let mut pool: Vec<u32> = (0..8).collect();
    let mut idx = index;
    let mut fact = 5040;
    let mut table = Vec::with_capacity(8);
    for k in (1..8).rev() {
        table.push(pool.remove(idx / fact));
        idx %= fact;
        fact /= k;
    }
    table.push(pool[0]);
    ReversibleFunction::new(3, table).expect("a permutation")
}

/// Which functions a study covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    All,
    /// A seeded uniform sample without repetition.
    Sample { size: usize, seed: u64 },
}

impl Coverage {
    pub fn indices(self) -> Vec<usize> {
        match self {
            Coverage::All => (0..FUNCTIONS_3X3).collect(),
            Coverage::Sample { size, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = rand::seq::index::sample(&mut rng, FUNCTIONS_3X3, size.min(FUNCTIONS_3X3)).into_vec();
                v.sort_unstable();
                v
            }
        }
    }
}

/// What produces the network for each function.
#[derive(Clone, Debug)]
pub enum StudyMode {
    /// One engine alone, no simplification.
    Engine(SynthOptions),
    /// Engines and templates, no resynthesis.
    Templates(PipelineOptions),
    /// The complete flow.
    Pipeline(PipelineOptions),
}

/// Exact minimal gate counts of all 3-line functions, by breadth-first
/// search from the identity.
pub fn optimal_distribution() -> StudyHistogram {
    let d = optimal_depths(3, 8);
    StudyHistogram {
        counts: d.histogram(),
        diverged: 0,
    }
}

/// Synthesizes every covered function and tabulates gate counts.
pub fn study3x3(mode: &StudyMode, coverage: Coverage) -> StudyHistogram {
    let idx = coverage.indices();
    let sizes: Vec<Option<usize>> = match mode {
        StudyMode::Engine(opts) => idx
            .par_iter()
            .map(|&i| synthesize(&function_3x3(i), opts).network().map(|n| n.len()))
            .collect(),
        StudyMode::Templates(opts) => {
            let tc = PipelineToolchain::new(opts);
            idx.par_iter().map(|&i| tc.synthesize(&function_3x3(i)).map(|n| n.len())).collect()
        }
        StudyMode::Pipeline(opts) => idx
            .par_iter()
            .map(|&i| {
                synthesize_best(&function_3x3(i), opts)
                    .ok()
                    .and_then(|r| r.verified.then_some(r.best.len()))
            })
            .collect(),
    };
    StudyHistogram::from_counts(sizes)
}

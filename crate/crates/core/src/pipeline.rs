//! The full flow: every engine on the function and on its inverse, template
//! simplification of each result, selection of the cheapest network, then
//! resynthesis of its windows.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cost::{CostModel, CostValue};
use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::network::Network;
use crate::resynth::{exhaustive_driver, random_driver, ResynthConfig, Toolchain};
use crate::synthesis::{synthesize, Direction, Method, SynthOptions};
use crate::templates::{apply_templates, default_library, TemplateLibrary, TemplateOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResynthMode {
    None,
    Random,
    Exhaustive,
    Both,
}

impl ResynthMode {
    fn random(self) -> bool {
        matches!(self, ResynthMode::Random | ResynthMode::Both)
    }

    fn exhaustive(self) -> bool {
        matches!(self, ResynthMode::Exhaustive | ResynthMode::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// The engine ran on the function itself.
    Function,
    /// The engine ran on the inverse and its network was reversed.
    Inverse,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Function => "f",
            Side::Inverse => "f^-1",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub cost_model: CostModel,
    pub methods: Vec<Method>,
    pub direction: Direction,
    pub max_controls: Option<usize>,
    pub templates: bool,
    /// Library used when `templates` is set; the shipped one when `None`.
    pub library: Option<TemplateLibrary>,
    pub resynth: ResynthMode,
    pub resynth_config: ResynthConfig,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            cost_model: CostModel::gate_count(),
            methods: Method::ALL.to_vec(),
            direction: Direction::Bidirectional,
            max_controls: None,
            templates: true,
            library: None,
            resynth: ResynthMode::Both,
            resynth_config: ResynthConfig::default(),
        }
    }
}

impl PipelineOptions {
    pub fn with_model(cost_model: CostModel) -> Self {
        PipelineOptions {
            cost_model,
            ..Default::default()
        }
    }

    fn library(&self) -> &TemplateLibrary {
        self.library.as_ref().unwrap_or_else(|| default_library())
    }

    fn template_options(&self) -> TemplateOptions {
        TemplateOptions::for_model(self.cost_model.clone())
    }
}

/// One engine run on one side.
#[derive(Clone, Debug)]
pub struct CandidateRow {
    pub method: Method,
    pub side: Side,
    /// `None` when the engine diverged.
    pub synthesized: Option<(usize, CostValue)>,
    pub simplified: Option<(usize, CostValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageDelta {
    pub stage: &'static str,
    pub gates_before: usize,
    pub gates_after: usize,
    pub cost_before: CostValue,
    pub cost_after: CostValue,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub best: Network,
    pub cost: CostValue,
    pub candidates: Vec<CandidateRow>,
    pub stages: Vec<StageDelta>,
    pub timings: Vec<(&'static str, Duration)>,
    /// Set only when `best` simulates to the requested function.
    pub verified: bool,
    /// Resynthesis stopped at its time limit.
    pub timed_out: bool,
}

impl PipelineReport {
    /// Tab-separated candidate table.
    pub fn table(&self) -> String {
        let mut out = String::from("engine\tside\tgates\tcost\tsimplified gates\tsimplified cost\n");
        let cell = |v: &Option<(usize, CostValue)>| match v {
            Some((g, c)) => (g.to_string(), c.to_string()),
            None => ("diverged".to_string(), "-".to_string()),
        };
        for r in &self.candidates {
            let (g0, c0) = cell(&r.synthesized);
            let (g1, c1) = cell(&r.simplified);
            out.push_str(&format!("{}\t{}\t{g0}\t{c0}\t{g1}\t{c1}\n", r.method, r.side));
        }
        for s in &self.stages {
            out.push_str(&format!(
                "{}\t-\t{}\t{}\t{}\t{}\n",
                s.stage, s.gates_before, s.cost_before, s.gates_after, s.cost_after
            ));
        }
        out
    }

    /// Machine-readable `key=value` lines.
    pub fn key_values(&self) -> String {
        let mut out = format!(
            "gates={}\ncost={}\nverified={}\ntimed_out={}\n",
            self.best.len(),
            self.cost,
            self.verified,
            self.timed_out
        );
        for (name, d) in &self.timings {
            out.push_str(&format!("time_{name}_ms={}\n", d.as_millis()));
        }
        out
    }
}

fn cost_of(model: &CostModel, net: &Network) -> CostValue {
    model.cost_of(net.gates(), net.width())
}

/// Engines plus templates, without resynthesis. Used as the resynthesis
/// toolchain and as the first half of [`synthesize_best`]. Results are
/// memoized by truth table.
pub struct PipelineToolchain {
    opts: PipelineOptions,
    memo: Mutex<HashMap<Vec<u32>, Option<Network>>>,
}

impl PipelineToolchain {
    pub fn new(opts: &PipelineOptions) -> Self {
        PipelineToolchain {
            opts: PipelineOptions {
                resynth: ResynthMode::None,
                ..opts.clone()
            },
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn candidates(&self, f: &ReversibleFunction) -> Vec<(CandidateRow, Option<Network>)> {
        let opts = &self.opts;
        let inverse = f.inverse();
        let runs: Vec<(Method, Side)> = opts
            .methods
            .iter()
            .flat_map(|&m| [(m, Side::Function), (m, Side::Inverse)])
            .collect();
        let model = &opts.cost_model;
        runs.par_iter()
            .map(|&(method, side)| {
                let so = SynthOptions {
                    method,
                    direction: opts.direction,
                    max_controls: opts.max_controls,
                    gate_budget: None,
                    cost_model: model.clone(),
                };
                let target = if side == Side::Function { f } else { &inverse };
                let net = synthesize(target, &so)
                    .into_network()
                    .map(|n| if side == Side::Function { n } else { n.reversed() });
                let synthesized = net.as_ref().map(|n| (n.len(), cost_of(model, n)));
                let net = net.map(|n| {
                    if opts.templates {
                        apply_templates(&n, opts.library(), &opts.template_options())
                    } else {
                        n
                    }
                });
                let simplified = net.as_ref().map(|n| (n.len(), cost_of(model, n)));
                (
                    CandidateRow {
                        method,
                        side,
                        synthesized,
                        simplified,
                    },
                    net,
                )
            })
            .collect()
    }
}

/// Cheapest network among the candidates; earlier candidates win ties.
fn cheapest(model: &CostModel, runs: &[(CandidateRow, Option<Network>)]) -> Option<Network> {
    runs.iter()
        .filter_map(|(_, n)| n.as_ref())
        .min_by_key(|n| cost_of(model, n))
        .cloned()
}

impl Toolchain for PipelineToolchain {
    fn synthesize(&self, f: &ReversibleFunction) -> Option<Network> {
        if let Some(hit) = self.memo.lock().expect("memo lock").get(f.table()) {
            return hit.clone();
        }
        let out = cheapest(&self.opts.cost_model, &self.candidates(f));
        self.memo.lock().expect("memo lock").insert(f.table().to_vec(), out.clone());
        out
    }

    fn cost_model(&self) -> &CostModel {
        &self.opts.cost_model
    }
}

/// Runs the resynthesis drivers selected in `opts` on `net`.
fn resynthesize(
    net: Network,
    opts: &PipelineOptions,
    toolchain: &PipelineToolchain,
    stages: &mut Vec<StageDelta>,
    timings: &mut Vec<(&'static str, Duration)>,
) -> (Network, bool) {
    let model = &opts.cost_model;
    let started = Instant::now();
    let mut cfg = opts.resynth_config.clone();
    let mut net = net;
    let mut timed_out = false;
    let mut run = |stage: &'static str, net: Network, cfg: &ResynthConfig, timings: &mut Vec<_>| {
        let t = Instant::now();
        let r = if stage == "random" {
            random_driver(&net, cfg, toolchain)
        } else {
            exhaustive_driver(&net, cfg, toolchain)
        };
        timings.push((stage, t.elapsed()));
        stages.push(StageDelta {
            stage,
            gates_before: net.len(),
            gates_after: r.network.len(),
            cost_before: cost_of(model, &net),
            cost_after: cost_of(model, &r.network),
        });
        r
    };
    if opts.resynth.random() {
        let r = run("random", net, &cfg, timings);
        net = r.network;
        timed_out |= r.timed_out;
    }
    if opts.resynth.exhaustive() && !timed_out {
        cfg.time_limit = cfg.time_limit.map(|l| l.saturating_sub(started.elapsed()));
        let r = run("exhaustive", net, &cfg, timings);
        net = r.network;
        timed_out |= r.timed_out;
    }
    (net, timed_out)
}

/// Synthesizes `f` with every selected engine in both directions, simplifies
/// with templates, keeps the cheapest result and resynthesizes it.
pub fn synthesize_best(f: &ReversibleFunction, opts: &PipelineOptions) -> Result<PipelineReport> {
    opts.cost_model.check_width(f.width())?;
    opts.resynth_config.validate()?;
    let toolchain = PipelineToolchain::new(opts);
    let mut timings = Vec::new();
    let t = Instant::now();
    let runs = toolchain.candidates(f);
    timings.push(("synthesis", t.elapsed()));
    // Only a greedy-only run can end up here without a network.
    let best = cheapest(&opts.cost_model, &runs).ok_or(Error::Diverged)?;
    let candidates = runs.into_iter().map(|(row, _)| row).collect();
    finish(f, best, candidates, opts, &toolchain, timings)
}

/// Template simplification and resynthesis of an existing network.
pub fn optimize(net: &Network, opts: &PipelineOptions) -> Result<PipelineReport> {
    opts.cost_model.check_width(net.width())?;
    opts.resynth_config.validate()?;
    let f = net.function();
    let toolchain = PipelineToolchain::new(opts);
    let mut timings = Vec::new();
    let t = Instant::now();
    let mut stages = Vec::new();
    let best = if opts.templates {
        let out = apply_templates(net, opts.library(), &opts.template_options());
        stages.push(StageDelta {
            stage: "templates",
            gates_before: net.len(),
            gates_after: out.len(),
            cost_before: cost_of(&opts.cost_model, net),
            cost_after: cost_of(&opts.cost_model, &out),
        });
        out
    } else {
        net.clone()
    };
    timings.push(("templates", t.elapsed()));
    let mut report = finish(&f, best, Vec::new(), opts, &toolchain, timings)?;
    stages.append(&mut report.stages);
    report.stages = stages;
    Ok(report)
}

fn finish(
    f: &ReversibleFunction,
    best: Network,
    candidates: Vec<CandidateRow>,
    opts: &PipelineOptions,
    toolchain: &PipelineToolchain,
    mut timings: Vec<(&'static str, Duration)>,
) -> Result<PipelineReport> {
    let mut stages = Vec::new();
    let (best, timed_out) = resynthesize(best, opts, toolchain, &mut stages, &mut timings);
    let verified = best.realizes(f);
    Ok(PipelineReport {
        cost: cost_of(&opts.cost_model, &best),
        best,
        candidates,
        stages,
        timings,
        verified,
        timed_out,
    })
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use revsynth::bench::{generate, run_benchmark, BENCH_HEADER};
use revsynth::format::{format_function, format_network, parse_function, parse_network, NetworkFile};
use revsynth::pipeline::{optimize, synthesize_best, PipelineOptions, PipelineReport, ResynthMode};
use revsynth::resynth::ResynthConfig;
use revsynth::study::{optimal_distribution, study3x3, Coverage, StudyHistogram, StudyMode};
use revsynth::synthesis::{Direction, Method, SynthOptions};
use revsynth::templates::{find_templates, format_library, parse_library, FinderConfig, TemplateLibrary};
use revsynth::{CostModel, Error, QuantumCostTable, ReversibleFunction, DEFAULT_WIDTH_CAP};

/// Exit status for a network that does not realize its specification.
const EXIT_UNVERIFIED: u8 = 2;
/// Exit status when no selected engine produced a network.
const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "revsynth", version, about = "Synthesize and optimize reversible Toffoli networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a network for a permutation.
    Synth {
        /// Specification file (`.perm`).
        #[arg(required_unless_present = "bench", conflicts_with = "bench")]
        spec: Option<PathBuf>,
        /// Use a built-in benchmark instead of a file.
        #[arg(long)]
        bench: Option<String>,
        /// Write the network here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Simplify an existing network with templates and resynthesis.
    Optimize {
        network: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Check that a network realizes a specification.
    Verify {
        network: PathBuf,
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
        width_cap: usize,
    },
    /// Print the gate count and cost of a network.
    Cost {
        network: PathBuf,
        #[command(flatten)]
        cost: CostArgs,
    },
    /// Gate-count histogram over the 3-line functions.
    Study3x3 {
        #[arg(long, value_enum, default_value_t = StudyKind::Pipeline)]
        mode: StudyKind,
        /// Only study this many functions, drawn with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Greedy gate budget in engine mode.
        #[arg(long)]
        gate_budget: Option<usize>,
    },
    /// Search for identity templates and write a library file.
    FindTemplates {
        #[arg(short, long)]
        output: PathBuf,
        /// `LINES:SIZE` searches, e.g. `3:8`.
        #[arg(long = "search", value_parser = parse_search, default_values = ["3:8", "4:8"])]
        searches: Vec<(usize, usize)>,
        /// Start from this library instead of an empty one.
        #[arg(long)]
        seed_library: Option<PathBuf>,
    },
    /// Run benchmarks under both cost models and write their networks.
    Bench {
        #[arg(required = true)]
        names: Vec<String>,
        /// Directory for `<name>.gc.tofn` and `<name>.qc.tofn`.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Write a built-in benchmark's specification.
    Spec {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CostKind {
    Gates,
    Quantum,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Greedy,
    Rm,
    Mmd,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Uni,
    Bi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResynthArg {
    None,
    Random,
    Exhaustive,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKind {
    /// Exact minimal counts by breadth-first search.
    Optimal,
    /// One engine, no simplification.
    Engine,
    /// Engines and templates.
    Templates,
    /// Engines, templates and resynthesis.
    Pipeline,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long, value_enum, default_value_t = CostKind::Gates)]
    cost: CostKind,
    /// Quantum cost table (`<controls> <cost> [<extra>]` per line).
    #[arg(long)]
    cost_table: Option<PathBuf>,
}

impl CostArgs {
    fn model(&self) -> Result<CostModel> {
        let table = match &self.cost_table {
            Some(p) => read(p)?.parse::<QuantumCostTable>().with_context(|| format!("{}", p.display()))?,
            None => QuantumCostTable::default(),
        };
        Ok(match self.cost {
            CostKind::Gates => CostModel { table, ..CostModel::gate_count() },
            CostKind::Quantum => CostModel::quantum_with(table),
        })
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Engines to run; repeat or use `all`.
    #[arg(long, value_enum, default_value = "all")]
    method: Vec<MethodArg>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Bi)]
    direction: DirectionArg,
    #[command(flatten)]
    cost: CostArgs,
    /// Largest control count the greedy engine may use.
    #[arg(long)]
    max_controls: Option<usize>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    templates: Toggle,
    /// Template library file; the shipped one by default.
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ResynthArg::Both)]
    resynth: ResynthArg,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resynthesis time limit in seconds; 0 disables it.
    #[arg(long, default_value_t = 600)]
    time_limit: u64,
    #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
    width_cap: usize,
}

impl PipelineArgs {
    fn methods(&self) -> Vec<Method> {
        if self.method.contains(&MethodArg::All) {
            return Method::ALL.to_vec();
        }
        let mut out: Vec<Method> = self
            .method
            .iter()
            .map(|m| match m {
                MethodArg::Greedy => Method::Greedy,
                MethodArg::Rm => Method::Rm,
                MethodArg::Mmd => Method::Mmd,
                MethodArg::All => unreachable!(),
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn direction(&self) -> Direction {
        match self.direction {
            DirectionArg::Uni => Direction::Unidirectional,
            DirectionArg::Bi => Direction::Bidirectional,
        }
    }

    fn options(&self) -> Result<PipelineOptions> {
        let library = match &self.library {
            Some(p) => {
                let lib = parse_library(&read(p)?).with_context(|| format!("{}", p.display()))?;
                lib.verify().with_context(|| format!("{}", p.display()))?;
                Some(lib)
            }
            None => None,
        };
        let opts = PipelineOptions {
            cost_model: self.cost.model()?,
            methods: self.methods(),
            direction: self.direction(),
            max_controls: self.max_controls,
            templates: matches!(self.templates, Toggle::On),
            library,
            resynth: match self.resynth {
                ResynthArg::None => ResynthMode::None,
                ResynthArg::Random => ResynthMode::Random,
                ResynthArg::Exhaustive => ResynthMode::Exhaustive,
                ResynthArg::Both => ResynthMode::Both,
            },
            resynth_config: ResynthConfig {
                iterations: self.iterations,
                samples_per_iteration: self.samples,
                seed: self.seed,
                time_limit: (self.time_limit > 0).then(|| Duration::from_secs(self.time_limit)),
                ..ResynthConfig::default()
            },
        };
        opts.resynth_config.validate()?;
        Ok(opts)
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Append a `key=value` block to the report.
    #[arg(long)]
    kv: bool,
}

fn parse_search(s: &str) -> std::result::Result<(usize, usize), String> {
    let (l, m) = s.split_once(':').ok_or("expected LINES:SIZE")?;
    let l = l.parse().map_err(|_| format!("bad line count `{l}`"))?;
    let m = m.parse().map_err(|_| format!("bad size `{m}`"))?;
    Ok((l, m))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_network(path: &Path) -> Result<NetworkFile> {
    parse_network(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_spec(path: &Path, width_cap: usize) -> Result<ReversibleFunction> {
    parse_function(&read(path)?, width_cap).with_context(|| format!("{}", path.display()))
}

fn print_report(report: &PipelineReport, args: &ReportArgs) {
    print!("{}", report.table());
    println!("best\t-\t{}\t{}", report.best.len(), report.cost);
    if args.kv {
        print!("{}", report.key_values());
    }
}

fn finish_report(report: &PipelineReport, names: Option<Vec<String>>, output: Option<&Path>, args: &ReportArgs) -> Result<ExitCode> {
    print_report(report, args);
    if let Some(path) = output {
        let file = match names {
            Some(names) => NetworkFile {
                names,
                network: report.best.clone(),
            },
            None => NetworkFile::with_default_names(report.best.clone()),
        };
        write(path, &format_network(&file))?;
    }
    if !report.verified {
        eprintln!("error: network does not realize the specification");
        return Ok(ExitCode::from(EXIT_UNVERIFIED));
    }
    if report.timed_out {
        eprintln!("note: resynthesis stopped at the time limit");
    }
    Ok(ExitCode::SUCCESS)
}

fn print_histogram(h: &StudyHistogram, optimal: Option<&StudyHistogram>) {
    print!("{}", h.table());
    if let Some(o) = optimal {
        println!("optimal WA\t{:.3}", o.weighted_average());
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth {
            spec,
            bench,
            output,
            pipeline,
            report,
        } => {
            let f = match (spec, bench) {
                (Some(p), _) => load_spec(&p, pipeline.width_cap)?,
                (None, Some(name)) => generate(&name)?,
                (None, None) => bail!("a specification file or --bench is required"),
            };
            let r = synthesize_best(&f, &pipeline.options()?)?;
            finish_report(&r, None, output.as_deref(), &report)
        }
        Command::Optimize {
            network,
            output,
            pipeline,
            report,
        } => {
            let file = load_network(&network)?;
            if file.network.width() > pipeline.width_cap {
                bail!("network has {} lines, above the cap of {}", file.network.width(), pipeline.width_cap);
            }
            let r = optimize(&file.network, &pipeline.options()?)?;
            finish_report(&r, Some(file.names), output.as_deref(), &report)
        }
        Command::Verify { network, spec, width_cap } => {
            let file = load_network(&network)?;
            let f = load_spec(&spec, width_cap)?;
            if file.network.width() != f.width() {
                println!("mismatch: network has {} lines, specification {}", file.network.width(), f.width());
                return Ok(ExitCode::from(EXIT_UNVERIFIED));
            }
            if file.network.realizes(&f) {
                println!("verified");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("mismatch");
                Ok(ExitCode::from(EXIT_UNVERIFIED))
            }
        }
        Command::Cost { network, cost } => {
            let file = load_network(&network)?;
            let model = cost.model()?;
            let c = model.network_cost(&file.network)?;
            println!("lines\t{}", file.network.width());
            println!("gates\t{}", file.network.len());
            println!("cost\t{c}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Study3x3 {
            mode,
            sample,
            pipeline,
            gate_budget,
        } => {
            let coverage = match sample {
                Some(size) => Coverage::Sample { size, seed: pipeline.seed },
                None => Coverage::All,
            };
            let optimal = optimal_distribution();
            let mode = match mode {
                StudyKind::Optimal => {
                    print_histogram(&optimal, None);
                    return Ok(ExitCode::SUCCESS);
                }
                StudyKind::Engine => {
                    let methods = pipeline.methods();
                    if methods.len() != 1 {
                        bail!("engine mode needs exactly one --method");
                    }
                    let opts = pipeline.options()?;
                    StudyMode::Engine(SynthOptions {
                        method: methods[0],
                        direction: opts.direction,
                        max_controls: opts.max_controls,
                        gate_budget,
                        cost_model: opts.cost_model,
                    })
                }
                StudyKind::Templates => StudyMode::Templates(pipeline.options()?),
                StudyKind::Pipeline => StudyMode::Pipeline(pipeline.options()?),
            };
            let h = study3x3(&mode, coverage);
            print_histogram(&h, Some(&optimal));
            Ok(ExitCode::SUCCESS)
        }
        Command::FindTemplates {
            output,
            searches,
            seed_library,
        } => {
            let mut lib = match seed_library {
                Some(p) => parse_library(&read(&p)?).with_context(|| format!("{}", p.display()))?,
                None => TemplateLibrary::new(Vec::new()),
            };
            let added = find_templates(&FinderConfig { searches }, &mut lib);
            lib.verify()?;
            write(&output, &format_library(&lib))?;
            println!("added\t{}", added.len());
            println!("templates\t{}", lib.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { names, out_dir, pipeline } => {
            let opts = pipeline.options()?;
            fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            println!("{BENCH_HEADER}");
            let mut status = ExitCode::SUCCESS;
            for name in &names {
                let f = generate(name)?;
                if f.width() > pipeline.width_cap {
                    bail!("{name} has {} lines, above the cap of {}", f.width(), pipeline.width_cap);
                }
                let r = run_benchmark(name, &f, &opts)?;
                println!("{}", r.row());
                for (suffix, run) in [("gc", &r.gate_run), ("qc", &r.quantum_run)] {
                    let text = format_network(&NetworkFile::with_default_names(run.best.clone()));
                    write(&out_dir.join(format!("{name}.{suffix}.tofn")), &text)?;
                }
                if !r.verified() {
                    eprintln!("error: {name}: network does not realize the specification");
                    status = ExitCode::from(EXIT_UNVERIFIED);
                }
            }
            Ok(status)
        }
        Command::Spec { name, output } => {
            let text = format_function(&generate(&name)?);
            match output {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(e.downcast_ref::<Error>(), Some(Error::Diverged)) {
                ExitCode::from(EXIT_DIVERGED)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

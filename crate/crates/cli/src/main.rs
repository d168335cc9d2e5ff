use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use triadgen::blockmodel::{build_ideal, randomize_total};
use triadgen::ergm::{calibrate_edge, mcmc_generate, CalibrationConfig, SamplerConfig, ScoreModel};
use triadgen::fit::fit_prespecified;
use triadgen::harness::{run_experiment, Algorithm, ExperimentConfig};
use triadgen::measures::{a_measure, a_profile, default_le_grid, write_a_measure_csv};
use triadgen::rl::rl_generate;
use triadgen::terms::preset;
use triadgen::triad::triad_census;
use triadgen::{BlockmodelKind, BlockmodelSpec, DirectedGraph, TermSetName};

#[derive(Parser)]
#[command(name = "triadgen", version, about = "Generate and evaluate networks with prescribed blockmodel structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write CSV, network and plot files.
    Run(RunArgs),
    /// Print the triad census of a network file.
    Census {
        file: PathBuf,
    },
    /// Print the ideal network of a blockmodel kind.
    Ideal {
        #[command(flatten)]
        bm: BlockmodelArgs,
        #[arg(long, value_enum, default_value_t = Format::Matrix)]
        format: Format,
    },
    /// A-measure table (or profile over levels of errors) as CSV.
    AMeasure {
        #[command(flatten)]
        bm: BlockmodelArgs,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Evaluate over levels of errors instead of the ideal network only.
        #[arg(long)]
        profile: bool,
        /// Comma-separated levels of errors for --profile.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Generate one network and print it.
    Generate {
        #[command(flatten)]
        bm: BlockmodelArgs,
        #[arg(long, default_value = "all")]
        term_set: TermSetName,
        #[arg(long, default_value = "rl")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// RL iterations or MCMC steps.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Matrix)]
        format: Format,
    },
    /// Fit a network file to the image of a blockmodel kind.
    Fit {
        file: PathBuf,
        #[command(flatten)]
        bm: BlockmodelArgs,
        #[arg(long, default_value_t = triadgen::fit::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct BlockmodelArgs {
    #[arg(long)]
    kind: BlockmodelKind,
    /// Comma-separated cluster sizes; defaults to the kind's sizes for 24 units.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

impl BlockmodelArgs {
    fn spec(&self) -> anyhow::Result<BlockmodelSpec> {
        Ok(match &self.sizes {
            Some(s) => BlockmodelSpec::new(self.kind, s.clone())?,
            None => BlockmodelSpec::with_default_sizes(self.kind),
        })
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<BlockmodelKind>>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long, value_delimiter = ',')]
    term_sets: Option<Vec<TermSetName>>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Matrix,
    Arcs,
}

fn render(g: &DirectedGraph, f: Format) -> String {
    match f {
        Format::Matrix => g.to_matrix_text(),
        Format::Arcs => g.to_arc_list_text(),
    }
}

/// Matrix text if the first line is a bare unit count, arc list otherwise.
fn read_network(path: &Path) -> anyhow::Result<DirectedGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    let g = if first.split_whitespace().count() == 1 && first.parse::<usize>().is_ok() {
        DirectedGraph::parse_matrix_text(&text)?
    } else {
        DirectedGraph::parse_arc_list_text(&text)?
    };
    Ok(g)
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.kinds {
        cfg.kinds = v;
    }
    if let Some(v) = args.algorithms {
        cfg.algorithms = v;
    }
    if let Some(v) = args.term_sets {
        cfg.term_sets = v;
    }
    if let Some(v) = args.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.out {
        cfg.output_dir = v;
    }
    let outcome = run_experiment(&cfg)?;
    for c in &outcome.reports {
        match (&c.miv, &c.error) {
            (_, Some(e)) => eprintln!("{:<60} FAILED: {e}", c.cell_id()),
            (Some(m), None) => println!("{:<60} MIV {:.3}", c.cell_id(), m.value),
            (None, None) => println!("{:<60} no MIV", c.cell_id()),
        }
    }
    if let Some(n) = &outcome.plots.notice {
        eprintln!("{n}");
    }
    println!("results written to {}", cfg.output_dir.display());
    Ok(if outcome.any_failed() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn generate(
    spec: &BlockmodelSpec,
    term_set: TermSetName,
    algorithm: Algorithm,
    seed: u64,
    budget: Option<usize>,
) -> anyhow::Result<DirectedGraph> {
    let terms = preset(spec, term_set)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = randomize_total(&build_ideal(spec), spec, &mut rng)?;
    let defaults = ExperimentConfig::default();
    Ok(match algorithm {
        Algorithm::Rl => {
            let its = budget.unwrap_or(defaults.rl.iterations);
            rl_generate(&terms, &init, its, &mut rng)?.0
        }
        Algorithm::McmcFixed | Algorithm::McmcFree => {
            let steps = budget.unwrap_or(defaults.mcmc.steps);
            let model = if algorithm == Algorithm::McmcFixed {
                ScoreModel::fixed(terms)
            } else {
                let base = ScoreModel::free(terms, 0.0);
                let cal = CalibrationConfig {
                    steps,
                    ..CalibrationConfig::default()
                };
                let w = calibrate_edge(&base, spec, &cal, seed)?.edge_weight;
                eprintln!("calibrated edge weight {w:.4}");
                ScoreModel { edge_weight: w, ..base }
            };
            let out = mcmc_generate(&model, &SamplerConfig { steps, init }, &mut rng)?;
            if out.degenerate {
                eprintln!("warning: degenerate network (density {:.3})", out.graph.density());
            }
            out.graph
        }
    })
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || matches!(c.downcast_ref::<triadgen::Error>(), Some(triadgen::Error::Io(io)) if io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run(args) => return run(args),
        Command::Census { file } => {
            let census = triad_census(&read_network(&file)?)?;
            for (t, c) in census.iter() {
                writeln!(out, "{t}\t{c}")?;
            }
        }
        Command::Ideal { bm, format } => write!(out, "{}", render(&build_ideal(&bm.spec()?), format))?,
        Command::AMeasure {
            bm,
            reps,
            seed,
            profile,
            grid,
        } => {
            let spec = bm.spec()?;
            let reports = if profile {
                a_profile(&spec, &grid.unwrap_or_else(default_le_grid), reps, seed)?
            } else {
                if grid.is_some() {
                    bail!("--grid requires --profile");
                }
                vec![a_measure(&spec, reps, seed)?]
            };
            write_a_measure_csv(&reports, &mut out)?;
        }
        Command::Generate {
            bm,
            term_set,
            algorithm,
            seed,
            budget,
            format,
        } => {
            let g = generate(&bm.spec()?, term_set, algorithm, seed, budget)?;
            write!(out, "{}", render(&g, format))?;
        }
        Command::Fit {
            file,
            bm,
            restarts,
            seed,
        } => {
            let g = read_network(&file)?;
            let spec = bm.spec()?;
            if g.n() != spec.n() {
                bail!("network has {} units, blockmodel has {}", g.n(), spec.n());
            }
            let fit = fit_prespecified(&g, spec.image(), restarts, &mut ChaCha8Rng::seed_from_u64(seed))?;
            writeln!(out, "criterion\t{}", fit.criterion)?;
            let labels: Vec<String> = fit.partition.assignment().iter().map(|c| (c + 1).to_string()).collect();
            writeln!(out, "partition\t{}", labels.join(" "))?;
            for row in &fit.per_block_errors {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                writeln!(out, "block_errors\t{}", cells.join(" "))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

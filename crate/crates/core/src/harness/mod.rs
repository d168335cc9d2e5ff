//! End-to-end experiment runner: for each (kind, term set, algorithm) cell,
//! generate networks, randomize them, fit both and summarize with MIV.
//!
//! Replicate `r` of a cell draws all of its randomness from
//! `derive_seed([master_seed, kind, term_set, algorithm, r])`; edge
//! calibration for `mcmc_free` cells uses the same parts with `r` replaced
//! by `"calibration"`. Results therefore do not depend on execution order
//! or thread count.

mod config;
pub mod plots;

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{Algorithm, ExperimentConfig, McmcConfig, RlConfig};
pub use plots::{emit_plots, PlotOutcome};

use crate::blockmodel::{build_ideal, randomize_total, randomize_uniform, BlockType, BlockmodelKind, BlockmodelSpec, Partition};
use crate::ergm::{calibrate_edge, mcmc_generate, CalibrationConfig, SamplerConfig, ScoreModel};
use crate::error::{Error, Result};
use crate::fit::{fit_prespecified, miv, MivResult};
use crate::graph::DirectedGraph;
use crate::rl::rl_generate;
use crate::rng::derive_seed;
use crate::terms::{preset, TermSet, TermSetName};

pub const FLAG_DEGENERATE: &str = "degenerate";
pub const FLAG_ZERO_RANDOM: &str = "zero_random_criterion";

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    pub index: usize,
    pub network_id: String,
    pub network: DirectedGraph,
    /// Best partition found for the generated network.
    pub partition: Partition,
    pub p_model: u64,
    pub p_random: u64,
    /// Errors of the generated network falling in null blocks.
    pub null_block_errors: u64,
    pub density: f64,
    pub flags: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleNetwork {
    pub graph: DirectedGraph,
    pub partition: Partition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub kind: BlockmodelKind,
    pub term_set: TermSetName,
    pub algorithm: Algorithm,
    pub replicates: Vec<ReplicateResult>,
    pub miv: Option<MivResult>,
    pub mean_density: Option<f64>,
    /// Calibrated edge weight of `mcmc_free` cells.
    pub edge_weight: Option<f64>,
    /// Diagnostic for a cell that could not be completed.
    pub error: Option<String>,
}

impl CellReport {
    pub fn cell_id(&self) -> String {
        format!("{}__{}__{}", self.kind, self.term_set, self.algorithm)
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// First replicate with its fitted partition.
    pub fn sample(&self) -> Option<SampleNetwork> {
        self.replicates.first().map(|r| SampleNetwork {
            graph: r.network.clone(),
            partition: r.partition.clone(),
        })
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.replicates.iter().map(|r| (r.p_model, r.p_random)).collect()
    }

    fn failure(kind: BlockmodelKind, term_set: TermSetName, algorithm: Algorithm, e: Error) -> Self {
        CellReport {
            kind,
            term_set,
            algorithm,
            replicates: Vec::new(),
            miv: None,
            mean_density: None,
            edge_weight: None,
            error: Some(e.to_string()),
        }
    }
}

/// Seed of replicate `rep` (or of the calibration batch when `rep` is
/// `"calibration"`).
pub fn replicate_seed(master_seed: u64, kind: BlockmodelKind, term_set: TermSetName, alg: Algorithm, rep: &str) -> u64 {
    derive_seed(&[&master_seed.to_string(), kind.name(), term_set.name(), alg.name(), rep])
}

struct CellPlan<'a> {
    cfg: &'a ExperimentConfig,
    spec: BlockmodelSpec,
    ideal: DirectedGraph,
    terms: TermSet,
    kind: BlockmodelKind,
    term_set: TermSetName,
    algorithm: Algorithm,
    model: Option<ScoreModel>,
}

impl CellPlan<'_> {
    fn run_replicate(&self, index: usize) -> Result<ReplicateResult> {
        let seed = replicate_seed(
            self.cfg.master_seed,
            self.kind,
            self.term_set,
            self.algorithm,
            &index.to_string(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = randomize_total(&self.ideal, &self.spec, &mut rng)?;
        let mut flags = Vec::new();
        let network = match (&self.model, self.algorithm) {
            (_, Algorithm::Rl) => rl_generate(&self.terms, &init, self.cfg.rl.iterations, &mut rng)?.0,
            (Some(model), _) => {
                let cfg = SamplerConfig {
                    steps: self.cfg.mcmc.steps,
                    init,
                };
                let out = mcmc_generate(model, &cfg, &mut rng)?;
                if out.degenerate {
                    flags.push(FLAG_DEGENERATE);
                }
                out.graph
            }
            (None, _) => unreachable!("mcmc cells carry a model"),
        };
        let randomized = randomize_uniform(&network, &mut rng);
        let image = self.spec.image();
        let fit_m = fit_prespecified(&network, image, self.cfg.restarts, &mut rng)?;
        let fit_r = fit_prespecified(&randomized, image, self.cfg.restarts, &mut rng)?;
        if fit_r.criterion == 0 {
            flags.push(FLAG_ZERO_RANDOM);
        }
        Ok(ReplicateResult {
            index,
            network_id: format!(
                "{}__{}__{}__{:03}",
                self.kind, self.term_set, self.algorithm, index
            ),
            density: network.density(),
            null_block_errors: fit_m.errors_in(image, BlockType::Null),
            p_model: fit_m.criterion,
            p_random: fit_r.criterion,
            partition: fit_m.partition,
            network,
            flags,
        })
    }
}

/// Runs a single cell. Failures (empty preset, calibration failure, ...)
/// are reported in the returned cell rather than as an error.
pub fn run_cell(cfg: &ExperimentConfig, kind: BlockmodelKind, term_set: TermSetName, algorithm: Algorithm) -> CellReport {
    match try_run_cell(cfg, kind, term_set, algorithm) {
        Ok(r) => r,
        Err(e) => CellReport::failure(kind, term_set, algorithm, e),
    }
}

fn try_run_cell(
    cfg: &ExperimentConfig,
    kind: BlockmodelKind,
    term_set: TermSetName,
    algorithm: Algorithm,
) -> Result<CellReport> {
    let spec = cfg.spec(kind)?;
    let terms = preset(&spec, term_set)?;
    let mut edge_weight = None;
    let model = match algorithm {
        Algorithm::Rl => None,
        Algorithm::McmcFixed => Some(ScoreModel::fixed(terms.clone())),
        Algorithm::McmcFree => {
            let base = ScoreModel::free(terms.clone(), 0.0);
            let cal_cfg = CalibrationConfig {
                batch: cfg.mcmc.calibration_batch,
                steps: cfg.mcmc.steps,
                tolerance: cfg.mcmc.calibration_tolerance,
                ..CalibrationConfig::default()
            };
            let seed = replicate_seed(cfg.master_seed, kind, term_set, algorithm, "calibration");
            let cal = calibrate_edge(&base, &spec, &cal_cfg, seed)?;
            edge_weight = Some(cal.edge_weight);
            Some(ScoreModel::free(terms.clone(), cal.edge_weight))
        }
    };
    let plan = CellPlan {
        cfg,
        ideal: build_ideal(&spec),
        spec,
        terms,
        kind,
        term_set,
        algorithm,
        model,
    };
    let replicates = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| plan.run_replicate(i))
        .collect::<Result<Vec<_>>>()?;
    let mean_density = replicates.iter().map(|r| r.density).sum::<f64>() / replicates.len() as f64;
    let pairs: Vec<(u64, u64)> = replicates.iter().map(|r| (r.p_model, r.p_random)).collect();
    let (miv, error) = match miv(&pairs) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(CellReport {
        kind,
        term_set,
        algorithm,
        replicates,
        miv,
        mean_density: Some(mean_density),
        edge_weight,
        error,
    })
}

/// All cells of the grid in kind, term set, algorithm order.
pub fn run_cells(cfg: &ExperimentConfig) -> Result<Vec<CellReport>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &kind in &cfg.kinds {
        for &ts in &cfg.term_sets {
            for &alg in &cfg.algorithms {
                out.push(run_cell(cfg, kind, ts, alg));
            }
        }
    }
    Ok(out)
}

/// `summary.csv`: one row per replicate.
pub fn write_summary<W: std::io::Write>(reports: &[CellReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["network_id", "kind", "term_set", "algorithm", "P_model", "P_random", "density", "flags"])?;
    for c in reports {
        for r in &c.replicates {
            w.write_record([
                r.network_id.clone(),
                c.kind.to_string(),
                c.term_set.to_string(),
                c.algorithm.to_string(),
                r.p_model.to_string(),
                r.p_random.to_string(),
                format!("{:.6}", r.density),
                r.flags.join(";"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `miv.csv`: one row per cell, failed cells included with their diagnostic.
pub fn write_miv<W: std::io::Write>(reports: &[CellReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "kind",
        "term_set",
        "algorithm",
        "replicates",
        "excluded",
        "miv",
        "mean_density",
        "edge_weight",
        "status",
    ])?;
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
    for c in reports {
        w.write_record([
            c.kind.to_string(),
            c.term_set.to_string(),
            c.algorithm.to_string(),
            c.replicates.len().to_string(),
            c.miv.as_ref().map_or(0, |m| m.excluded.len()).to_string(),
            opt(c.miv.as_ref().map(|m| m.value)),
            opt(c.mean_density),
            opt(c.edge_weight),
            c.error.as_ref().map_or_else(|| "ok".to_string(), |e| format!("failed: {e}")),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub reports: Vec<CellReport>,
    pub plots: PlotOutcome,
}

impl ExperimentOutcome {
    pub fn any_failed(&self) -> bool {
        self.reports.iter().any(CellReport::failed)
    }
}

/// Writes `summary.csv`, `miv.csv`, `networks/<network_id>.txt` and plots
/// under `dir`.
pub fn write_outputs(reports: &[CellReport], dir: &Path) -> Result<PlotOutcome> {
    std::fs::create_dir_all(dir)?;
    write_summary(reports, std::fs::File::create(dir.join("summary.csv"))?)?;
    write_miv(reports, std::fs::File::create(dir.join("miv.csv"))?)?;
    let nets = dir.join("networks");
    std::fs::create_dir_all(&nets)?;
    for c in reports {
        for r in &c.replicates {
            std::fs::write(nets.join(format!("{}.txt", r.network_id)), r.network.to_matrix_text())?;
        }
    }
    emit_plots(reports, dir)
}

/// Validates `cfg`, runs every cell and writes all artifacts to
/// `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let reports = run_cells(cfg)?;
    let plots = write_outputs(&reports, &cfg.output_dir)?;
    Ok(ExperimentOutcome { reports, plots })
}

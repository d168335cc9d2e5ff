//! Metropolis-Hastings sampling from an exponential-family network model
//! `P(y) ∝ exp(θ·g(y) + edge_weight·arcs(y))`.
//!
//! Free-density mode proposes single dyad toggles; fixed-density mode
//! proposes relocating one arc to one empty slot. Both kernels are
//! symmetric, so acceptance is `min(1, exp(Δ score))`.

use rand::Rng;
use rayon::prelude::*;

use crate::blockmodel::{build_ideal, randomize_total, BlockmodelSpec};
use crate::error::{Error, Result};
use crate::graph::{random_dyad, DirectedGraph};
use crate::rng::stream_rng;
use crate::terms::{Statistic, TermSet};
use crate::triad::toggle_delta;

/// Default chain length for 24-unit networks.
pub const DEFAULT_STEPS: usize = 100_000;

/// Densities outside `[DEGENERATE_LOW, DEGENERATE_HIGH]` flag a collapsed run.
pub const DEGENERATE_LOW: f64 = 0.02;
pub const DEGENERATE_HIGH: f64 = 0.98;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreModel {
    pub terms: TermSet,
    /// Ignored in fixed-density mode.
    pub edge_weight: f64,
    pub density_fixed: bool,
}

impl ScoreModel {
    pub fn fixed(terms: TermSet) -> Self {
        ScoreModel {
            terms,
            edge_weight: 0.0,
            density_fixed: true,
        }
    }

    pub fn free(terms: TermSet, edge_weight: f64) -> Self {
        ScoreModel {
            terms,
            edge_weight,
            density_fixed: false,
        }
    }

    fn compile(&self) -> Weights {
        let mut triad = [0.0; 16];
        let mut path = 0.0;
        for (t, &w) in self.terms.terms().iter().zip(self.terms.weights()) {
            match t {
                Statistic::Triad(tt) => triad[tt.index()] = w,
                Statistic::ThreePaths => path = w,
            }
        }
        Weights {
            triad,
            path,
            edge: if self.density_fixed { 0.0 } else { self.edge_weight },
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Weights {
    triad: [f64; 16],
    path: f64,
    edge: f64,
}

impl Weights {
    /// Score change of flipping slot `(i, j)` in its current state.
    #[inline]
    fn toggle(&self, g: &DirectedGraph, i: usize, j: usize) -> f64 {
        let d = toggle_delta(g, i, j);
        let mut s = 0.0;
        for (w, &dv) in self.triad.iter().zip(d.deltas()) {
            if dv != 0 {
                s += w * dv as f64;
            }
        }
        if self.path != 0.0 {
            s += self.path * crate::paths::toggle_delta_3paths(g, i, j) as f64;
        }
        let sign = if g.has_arc(i, j) { -1.0 } else { 1.0 };
        s + sign * self.edge
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Flip the slot `(i, j)`.
    Toggle(usize, usize),
    /// Remove arc `remove` and add arc `add`.
    Relocate {
        remove: (usize, usize),
        add: (usize, usize),
    },
}

fn check_dyad(g: &DirectedGraph, (i, j): (usize, usize)) -> Result<()> {
    if i >= g.n() || j >= g.n() || i == j {
        return Err(Error::Precondition(format!("invalid dyad ({i}, {j})")));
    }
    Ok(())
}

/// Change of `θ·g(y)` (plus the edge term in free mode) caused by `mv`.
pub fn log_score_delta(model: &ScoreModel, g: &DirectedGraph, mv: Move) -> Result<f64> {
    let w = model.compile();
    match mv {
        Move::Toggle(i, j) => {
            check_dyad(g, (i, j))?;
            if model.density_fixed {
                return Err(Error::Precondition(
                    "single toggles change density; fixed-density models need relocations".into(),
                ));
            }
            Ok(w.toggle(g, i, j))
        }
        Move::Relocate { remove, add } => {
            check_dyad(g, remove)?;
            check_dyad(g, add)?;
            if !g.has_arc(remove.0, remove.1) || g.has_arc(add.0, add.1) {
                return Err(Error::Precondition(
                    "relocation must move an existing arc to an empty slot".into(),
                ));
            }
            let mut h = g.clone();
            let first = w.toggle(&h, remove.0, remove.1);
            h.toggle_unchecked(remove.0, remove.1);
            Ok(first + w.toggle(&h, add.0, add.1))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub steps: usize,
    pub init: DirectedGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McmcOutcome {
    pub graph: DirectedGraph,
    pub accepted: usize,
    /// Free-density run ended nearly empty or nearly complete.
    pub degenerate: bool,
}

/// Runs the chain for `cfg.steps` proposals and returns the final state.
pub fn mcmc_generate<R: Rng + ?Sized>(model: &ScoreModel, cfg: &SamplerConfig, rng: &mut R) -> Result<McmcOutcome> {
    mcmc_run(model, cfg, rng, |_| {})
}

/// Like [`mcmc_generate`], calling `visit` with the state after every step.
pub fn mcmc_run<R, F>(model: &ScoreModel, cfg: &SamplerConfig, rng: &mut R, mut visit: F) -> Result<McmcOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(&DirectedGraph),
{
    if cfg.steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    let g0 = &cfg.init;
    if g0.n() < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {}", g0.n())));
    }
    if model.density_fixed && (g0.arc_count() == 0 || g0.arc_count() == g0.slot_count()) {
        return Err(Error::Precondition(
            "fixed-density sampling needs at least one arc and one empty slot".into(),
        ));
    }
    let w = model.compile();
    let n = g0.n();
    let mut g = g0.clone();
    let mut accepted = 0;
    for _ in 0..cfg.steps {
        let ok = if model.density_fixed {
            let (i, j) = g.random_arc(rng).expect("arc count is preserved");
            let (k, l) = g.random_free_slot(rng).expect("slot count is preserved");
            let mut delta = w.toggle(&g, i, j);
            g.toggle_unchecked(i, j);
            delta += w.toggle(&g, k, l);
            g.toggle_unchecked(k, l);
            let ok = metropolis(delta, rng);
            if !ok {
                g.toggle_unchecked(k, l);
                g.toggle_unchecked(i, j);
            }
            ok
        } else {
            let (i, j) = random_dyad(n, rng);
            let ok = metropolis(w.toggle(&g, i, j), rng);
            if ok {
                g.toggle_unchecked(i, j);
            }
            ok
        };
        accepted += ok as usize;
        visit(&g);
    }
    let d = g.density();
    Ok(McmcOutcome {
        degenerate: !model.density_fixed && !(DEGENERATE_LOW..=DEGENERATE_HIGH).contains(&d),
        graph: g,
        accepted,
    })
}

#[inline]
fn metropolis<R: Rng + ?Sized>(delta: f64, rng: &mut R) -> bool {
    delta >= 0.0 || rng.random::<f64>() < delta.exp()
}

/// Random network with each off-diagonal slot present independently, with
/// `expected_arcs` arcs on average.
pub fn bernoulli_init<R: Rng + ?Sized>(n: usize, expected_arcs: f64, rng: &mut R) -> DirectedGraph {
    let slots = (n * n.saturating_sub(1)) as f64;
    let p = if slots > 0.0 { (expected_arcs / slots).clamp(0.0, 1.0) } else { 0.0 };
    let mut g = DirectedGraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                g.toggle_unchecked(i, j);
            }
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    pub batch: usize,
    pub steps: usize,
    /// Allowed distance between the batch mean density and the ideal density.
    pub tolerance: f64,
    /// Largest |edge weight| tried while bracketing.
    pub max_abs_weight: f64,
    pub max_evaluations: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            batch: 30,
            steps: DEFAULT_STEPS,
            tolerance: 0.05,
            max_abs_weight: 256.0,
            max_evaluations: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub edge_weight: f64,
    pub mean_density: f64,
    pub target_density: f64,
    /// Every `(edge_weight, mean_density)` evaluated, in order.
    pub history: Vec<(f64, f64)>,
}

/// Mean final density of `batch` free-density chains started from totally
/// randomized ideal networks. Batch member `b` uses stream `b` of `seed` for
/// both its initial network and its chain.
pub fn batch_mean_density(
    model: &ScoreModel,
    spec: &BlockmodelSpec,
    batch: usize,
    steps: usize,
    seed: u64,
) -> Result<f64> {
    let ideal = build_ideal(spec);
    let densities = (0..batch)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let init = randomize_total(&ideal, spec, &mut rng)?;
            let out = mcmc_generate(model, &SamplerConfig { steps, init }, &mut rng)?;
            Ok(out.graph.density())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(densities.iter().sum::<f64>() / batch as f64)
}

/// Finds an edge weight whose batch mean density lies within the tolerance
/// of the ideal density.
///
/// Starts from the independent-dyad solution `ln(d / (1 - d))`, brackets the
/// target by doubling steps, then bisects. The same seeds are reused for
/// every evaluation so the density curve is compared on common randomness.
pub fn calibrate_edge(
    model: &ScoreModel,
    spec: &BlockmodelSpec,
    cfg: &CalibrationConfig,
    seed: u64,
) -> Result<Calibration> {
    if model.density_fixed {
        return Err(Error::Precondition("calibration needs a free-density model".into()));
    }
    if cfg.batch == 0 {
        return Err(Error::Precondition("batch must be at least 1".into()));
    }
    let target = build_ideal(spec).density();
    if !(0.0 < target && target < 1.0) {
        return Err(Error::Calibration(format!("ideal density {target} is not interior")));
    }
    let mut history = Vec::new();
    let eval = |w: f64, history: &mut Vec<(f64, f64)>| -> Result<f64> {
        let m = ScoreModel {
            edge_weight: w,
            ..model.clone()
        };
        let d = batch_mean_density(&m, spec, cfg.batch, cfg.steps, seed)?;
        history.push((w, d));
        Ok(d)
    };
    let done = |w: f64, d: f64, history: Vec<(f64, f64)>| Calibration {
        edge_weight: w,
        mean_density: d,
        target_density: target,
        history,
    };
    let fail = |why: &str, history: &[(f64, f64)]| {
        let tried: Vec<String> = history.iter().map(|(w, d)| format!("{w:.4}->{d:.4}")).collect();
        Error::Calibration(format!(
            "{why}; target density {target:.4} ± {}; tried [{}]",
            cfg.tolerance,
            tried.join(", ")
        ))
    };

    let w0 = (target / (1.0 - target)).ln();
    let d0 = eval(w0, &mut history)?;
    if (d0 - target).abs() <= cfg.tolerance {
        return Ok(done(w0, d0, history));
    }
    // Density increases with the edge weight.
    let up = d0 < target;
    let (mut lo, mut hi) = (w0, w0);
    let mut step = 1.0;
    loop {
        if history.len() >= cfg.max_evaluations {
            return Err(fail("evaluation budget exhausted while bracketing", &history));
        }
        let w = if up { w0 + step } else { w0 - step };
        if w.abs() > cfg.max_abs_weight {
            return Err(fail("no bracketing edge weight within bounds", &history));
        }
        let d = eval(w, &mut history)?;
        if (d - target).abs() <= cfg.tolerance {
            return Ok(done(w, d, history));
        }
        if (d < target) == up {
            if up { lo = w } else { hi = w }
            step *= 2.0;
        } else {
            if up { hi = w } else { lo = w }
            break;
        }
    }
    while history.len() < cfg.max_evaluations {
        let mid = 0.5 * (lo + hi);
        let d = eval(mid, &mut history)?;
        if (d - target).abs() <= cfg.tolerance {
            return Ok(done(mid, d, history));
        }
        if d < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(fail("bisection did not reach the tolerance band", &history))
}

//! Allowed/forbidden triad classification and A-measure profiles.
//!
//! The A-measure of a triad type is its count in the ideal network divided
//! by its mean count over totally randomized networks of the same density.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;

use crate::blockmodel::{build_ideal, perturb, randomize_total, BlockmodelKind, BlockmodelSpec, LevelOfErrors};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::triad::{triad_census, TriadType};

use TriadType::*;

/// Reference selection of triad types per blockmodel kind, allowed and
/// forbidden types mixed. Split against the census of the ideal network.
pub fn reference_selection(kind: BlockmodelKind) -> &'static [TriadType] {
    match kind {
        BlockmodelKind::Cohesive => &[T300, T102, T021U, T021D],
        BlockmodelKind::CorePeripheryAsymmetric => &[T300, T120D, T102, T021U],
        BlockmodelKind::CorePeripherySymmetric => {
            &[T300, T120D, T120U, T102, T021C, T021U, T021D, T201, T120C]
        }
        BlockmodelKind::HierarchicalNoDiag => &[T120D, T021U, T021D, T201, T111D],
        BlockmodelKind::HierarchicalDiag => {
            &[T300, T120D, T120U, T102, T021C, T021U, T021D, T201, T120C]
        }
        BlockmodelKind::TransitivityNoDiag => &[T021C, T021U, T021D, T030T, T120C, T111D, T111U],
        BlockmodelKind::TransitivityDiag => {
            &[T120D, T120U, T102, T021C, T030T, T201, T120C, T111D, T111U]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadClassification {
    pub allowed: BTreeSet<TriadType>,
    pub forbidden: BTreeSet<TriadType>,
    pub selected_allowed: BTreeSet<TriadType>,
    pub selected_forbidden: BTreeSet<TriadType>,
}

impl TriadClassification {
    pub fn selected(&self) -> BTreeSet<TriadType> {
        self.selected_allowed.union(&self.selected_forbidden).copied().collect()
    }
}

/// Forbidden types have zero count in the ideal network; all others are allowed.
pub fn classify(spec: &BlockmodelSpec) -> Result<TriadClassification> {
    let census = triad_census(&build_ideal(spec))?;
    let (allowed, forbidden): (BTreeSet<_>, BTreeSet<_>) =
        TriadType::ALL.iter().copied().partition(|&t| census.get(t) > 0);
    let selection: BTreeSet<_> = reference_selection(spec.kind()).iter().copied().collect();
    Ok(TriadClassification {
        selected_allowed: selection.intersection(&allowed).copied().collect(),
        selected_forbidden: selection.intersection(&forbidden).copied().collect(),
        allowed,
        forbidden,
    })
}

/// Ratio with a distinguished value for a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Defined(f64),
    Undefined,
}

impl Ratio {
    pub fn of(num: f64, den: f64) -> Ratio {
        if den > 0.0 {
            Ratio::Defined(num / den)
        } else {
            Ratio::Undefined
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Defined(v) => Some(v),
            Ratio::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AMeasureRow {
    pub triad: TriadType,
    /// Ideal count at level of errors 0, otherwise the mean count over
    /// perturbed networks.
    pub model_count: f64,
    pub mean_random_count: f64,
    pub ratio: Ratio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AMeasureReport {
    pub kind: BlockmodelKind,
    pub level_of_errors: f64,
    pub rows: Vec<AMeasureRow>,
}

impl AMeasureReport {
    pub fn row(&self, t: TriadType) -> &AMeasureRow {
        &self.rows[t.index()]
    }

    pub fn ratio(&self, t: TriadType) -> Ratio {
        self.row(t).ratio
    }
}

// Stream layout: denominators use stream `rep`; numerators for grid point
// `g` use `(g + 1) << 32 | rep`.
fn mean_census<F>(reps: usize, seed: u64, stream_base: u64, draw: F) -> Result<[f64; 16]>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<[u64; 16]> + Sync,
{
    let sums = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, stream_base | r as u64);
            draw(&mut rng)
        })
        .try_reduce(
            || [0u64; 16],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    let mut out = [0.0; 16];
    for (o, s) in out.iter_mut().zip(sums.iter()) {
        *o = *s as f64 / reps as f64;
    }
    Ok(out)
}

fn random_means(spec: &BlockmodelSpec, reps: usize, seed: u64) -> Result<[f64; 16]> {
    let ideal = build_ideal(spec);
    mean_census(reps, seed, 0, |rng| {
        Ok(*triad_census(&randomize_total(&ideal, spec, rng)?)?.counts())
    })
}

fn report(kind: BlockmodelKind, le: f64, model: [f64; 16], random: &[f64; 16]) -> AMeasureReport {
    let rows = TriadType::ALL
        .iter()
        .map(|&t| AMeasureRow {
            triad: t,
            model_count: model[t.index()],
            mean_random_count: random[t.index()],
            ratio: Ratio::of(model[t.index()], random[t.index()]),
        })
        .collect();
    AMeasureReport {
        kind,
        level_of_errors: le,
        rows,
    }
}

/// A-measure of every triad type from `reps` totally randomized networks.
/// Deterministic for a fixed seed regardless of thread count.
pub fn a_measure(spec: &BlockmodelSpec, reps: usize, seed: u64) -> Result<AMeasureReport> {
    if reps == 0 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let ideal = triad_census(&build_ideal(spec))?;
    let random = random_means(spec, reps, seed)?;
    let model = ideal.counts().map(|c| c as f64);
    Ok(report(spec.kind(), 0.0, model, &random))
}

/// A-measure against level of errors: for each grid point the numerator is
/// the mean census of networks perturbed to that level (the ideal census at
/// 0); the denominator is shared with [`a_measure`] for the same seed.
pub fn a_profile(
    spec: &BlockmodelSpec,
    le_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<Vec<AMeasureReport>> {
    if reps == 0 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let levels = le_grid
        .iter()
        .map(|&v| LevelOfErrors::new(v))
        .collect::<Result<Vec<_>>>()?;
    let ideal = build_ideal(spec);
    let ideal_census = triad_census(&ideal)?;
    let random = random_means(spec, reps, seed)?;
    levels
        .iter()
        .enumerate()
        .map(|(g, &le)| {
            let model = if le.value() == 0.0 {
                ideal_census.counts().map(|c| c as f64)
            } else {
                mean_census(reps, seed, (g as u64 + 1) << 32, |rng| {
                    Ok(*triad_census(&perturb(&ideal, spec, le, rng)?)?.counts())
                })?
            };
            Ok(report(spec.kind(), le.value(), model, &random))
        })
        .collect()
}

/// Default grid: 0 to 1 in steps of 0.2.
pub fn default_le_grid() -> Vec<f64> {
    vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
}

/// CSV with columns `blockmodel_kind, triad_type, level_of_errors,
/// ideal_or_mean_model_count, mean_random_count, ratio`. Undefined ratios
/// are written as `NA`.
pub fn write_a_measure_csv<W: Write>(reports: &[AMeasureReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "blockmodel_kind",
        "triad_type",
        "level_of_errors",
        "ideal_or_mean_model_count",
        "mean_random_count",
        "ratio",
    ])?;
    for r in reports {
        for row in &r.rows {
            let ratio = match row.ratio {
                Ratio::Defined(v) => format!("{v:.6}"),
                Ratio::Undefined => "NA".to_string(),
            };
            w.write_record([
                r.kind.name().to_string(),
                row.triad.label().to_string(),
                format!("{:.2}", r.level_of_errors),
                format!("{:.6}", row.model_count),
                format!("{:.6}", row.mean_random_count),
                ratio,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

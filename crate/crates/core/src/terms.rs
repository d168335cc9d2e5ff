//! Local statistics used as generation targets (RL) or model terms (MCMC).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blockmodel::{build_ideal, BlockmodelKind, BlockmodelSpec};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::measures::classify;
use crate::paths::{count_3paths, toggle_delta_3paths};
use crate::triad::{toggle_delta, triad_census, TriadType};

/// Default parameter for allowed terms; forbidden terms get the negation.
pub const DEFAULT_WEIGHT: f64 = 2.0;

/// Weight of the 021C override in the hierarchical repair preset.
pub const HIERARCHY_021C_WEIGHT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Triad(TriadType),
    /// Number of directed 3-trails.
    ThreePaths,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Triad(t) => write!(f, "{t}"),
            Statistic::ThreePaths => f.write_str("3path"),
        }
    }
}

/// Ordered statistics with aligned target counts and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSet {
    terms: Vec<Statistic>,
    targets: Vec<i64>,
    weights: Vec<f64>,
}

impl TermSet {
    pub fn new(terms: Vec<Statistic>, targets: Vec<i64>, weights: Vec<f64>) -> Result<Self> {
        for len in [targets.len(), weights.len()] {
            if len != terms.len() {
                return Err(Error::LengthMismatch {
                    left: terms.len(),
                    right: len,
                });
            }
        }
        for (k, t) in terms.iter().enumerate() {
            if terms[..k].contains(t) {
                return Err(Error::Precondition(format!("duplicate term {t}")));
            }
        }
        if let Some(t) = targets.iter().find(|&&t| t < 0) {
            return Err(Error::Precondition(format!("negative target {t}")));
        }
        Ok(TermSet {
            terms,
            targets,
            weights,
        })
    }

    /// Targets taken from `reference`; weights `+2` where the reference
    /// count is positive and `-2` where it is zero.
    pub fn from_reference(terms: Vec<Statistic>, reference: &DirectedGraph) -> Result<Self> {
        let targets = evaluate(reference, &terms)?;
        let weights = targets
            .iter()
            .map(|&t| if t > 0 { DEFAULT_WEIGHT } else { -DEFAULT_WEIGHT })
            .collect();
        Self::new(terms, targets, weights)
    }

    pub fn terms(&self) -> &[Statistic] {
        &self.terms
    }

    pub fn targets(&self) -> &[i64] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sets the weight of `stat`, appending it with `target` if absent.
    pub fn with_override(mut self, stat: Statistic, weight: f64, target: i64) -> Self {
        match self.terms.iter().position(|&t| t == stat) {
            Some(k) => self.weights[k] = weight,
            None => {
                self.terms.push(stat);
                self.targets.push(target);
                self.weights.push(weight);
            }
        }
        self
    }

    pub fn weight_of(&self, stat: Statistic) -> Option<f64> {
        self.terms
            .iter()
            .position(|&t| t == stat)
            .map(|k| self.weights[k])
    }

    pub(crate) fn index(&self) -> TermIndex {
        let mut triad_pos = [None; 16];
        let mut path_pos = None;
        for (k, t) in self.terms.iter().enumerate() {
            match t {
                Statistic::Triad(tt) => triad_pos[tt.index()] = Some(k),
                Statistic::ThreePaths => path_pos = Some(k),
            }
        }
        TermIndex {
            triad_pos,
            path_pos,
            len: self.terms.len(),
        }
    }
}

/// Term positions for fast delta evaluation.
#[derive(Debug, Clone)]
pub(crate) struct TermIndex {
    triad_pos: [Option<usize>; 16],
    path_pos: Option<usize>,
    len: usize,
}

impl TermIndex {
    /// Adds the statistic change of flipping slot `(i, j)` into `out`.
    #[inline]
    pub(crate) fn accumulate_toggle(&self, g: &DirectedGraph, i: usize, j: usize, out: &mut [i64]) {
        debug_assert_eq!(out.len(), self.len);
        let d = toggle_delta(g, i, j);
        for (t, &dv) in d.deltas().iter().enumerate() {
            if let Some(k) = self.triad_pos[t] {
                out[k] += dv;
            }
        }
        if let Some(k) = self.path_pos {
            out[k] += toggle_delta_3paths(g, i, j);
        }
    }
}

/// Values of `terms` on `g`.
pub fn evaluate(g: &DirectedGraph, terms: &[Statistic]) -> Result<Vec<i64>> {
    let needs_census = terms.iter().any(|t| matches!(t, Statistic::Triad(_)));
    let census = if needs_census {
        Some(triad_census(g)?)
    } else {
        None
    };
    let paths = terms
        .contains(&Statistic::ThreePaths)
        .then(|| count_3paths(g) as i64);
    Ok(terms
        .iter()
        .map(|t| match t {
            Statistic::Triad(tt) => census.as_ref().map_or(0, |c| c.get(*tt) as i64),
            Statistic::ThreePaths => paths.unwrap_or(0),
        })
        .collect())
}

/// Alternative name accepted for [`TermSetName::Selected3Path021C`].
pub const HIERARCHY_REPAIR_ALIAS: &str = "hierarchical_nodiag_3path";

/// Named term-set presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TermSetName {
    All,
    Allowed,
    Forbidden,
    Selected,
    SelectedAllowed,
    SelectedForbidden,
    /// Selected triads plus the 3-trail count.
    Selected3Path,
    /// Selected triads, 3-trails and 021C weighted up to 4.
    Selected3Path021C,
}

impl TermSetName {
    pub const ALL: [TermSetName; 8] = [
        TermSetName::All,
        TermSetName::Allowed,
        TermSetName::Forbidden,
        TermSetName::Selected,
        TermSetName::SelectedAllowed,
        TermSetName::SelectedForbidden,
        TermSetName::Selected3Path,
        TermSetName::Selected3Path021C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermSetName::All => "all",
            TermSetName::Allowed => "allowed",
            TermSetName::Forbidden => "forbidden",
            TermSetName::Selected => "selected",
            TermSetName::SelectedAllowed => "selected_allowed",
            TermSetName::SelectedForbidden => "selected_forbidden",
            TermSetName::Selected3Path => "selected_3path",
            TermSetName::Selected3Path021C => "selected_3path_021c",
        }
    }
}

impl fmt::Display for TermSetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TermSetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == HIERARCHY_REPAIR_ALIAS {
            return Ok(TermSetName::Selected3Path021C);
        }
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Unknown {
                what: "term set",
                name: s.to_string(),
            })
    }
}

impl TryFrom<String> for TermSetName {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TermSetName> for String {
    fn from(k: TermSetName) -> String {
        k.name().to_string()
    }
}

/// Builds a preset term set against the ideal network of `spec`.
///
/// `selected_allowed` differs from `allowed` only for the two kinds with
/// complete diagonal blocks and an ordered structure (hierarchy and
/// transitivity); elsewhere it falls back to all allowed types.
pub fn preset(spec: &BlockmodelSpec, name: TermSetName) -> Result<TermSet> {
    let ideal = build_ideal(spec);
    let class = classify(spec)?;
    let triads = |set: &std::collections::BTreeSet<TriadType>| -> Vec<Statistic> {
        TriadType::ALL
            .iter()
            .filter(|t| set.contains(t))
            .map(|&t| Statistic::Triad(t))
            .collect()
    };
    let terms = match name {
        TermSetName::All => TriadType::ALL.iter().map(|&t| Statistic::Triad(t)).collect(),
        TermSetName::Allowed => triads(&class.allowed),
        TermSetName::Forbidden => triads(&class.forbidden),
        TermSetName::Selected => triads(&class.selected()),
        TermSetName::SelectedAllowed => match spec.kind() {
            BlockmodelKind::HierarchicalDiag | BlockmodelKind::TransitivityDiag => {
                triads(&class.selected_allowed)
            }
            _ => triads(&class.allowed),
        },
        TermSetName::SelectedForbidden => triads(&class.selected_forbidden),
        TermSetName::Selected3Path | TermSetName::Selected3Path021C => {
            let mut t = triads(&class.selected());
            t.push(Statistic::ThreePaths);
            t
        }
    };
    if terms.is_empty() {
        return Err(Error::Precondition(format!(
            "term set {name} is empty for {}",
            spec.kind()
        )));
    }
    let mut set = TermSet::from_reference(terms, &ideal)?;
    if let Some(k) = set.terms.iter().position(|&t| t == Statistic::ThreePaths) {
        // 3-trails are always discouraged, whatever the ideal count.
        set.weights[k] = -DEFAULT_WEIGHT;
    }
    Ok(if name == TermSetName::Selected3Path021C {
        let stat = Statistic::Triad(TriadType::T021C);
        let target = evaluate(&ideal, &[stat])?[0];
        set.with_override(stat, HIERARCHY_021C_WEIGHT, target)
    } else {
        set
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_mismatch() {
        let t = vec![Statistic::Triad(TriadType::T003), Statistic::Triad(TriadType::T003)];
        assert!(TermSet::new(t, vec![0, 0], vec![1.0, 1.0]).is_err());
        let t = vec![Statistic::ThreePaths];
        assert!(TermSet::new(t, vec![], vec![1.0]).is_err());
    }

    #[test]
    fn forbidden_preset_targets_zero_with_negative_weights() {
        for kind in BlockmodelKind::ALL {
            let spec = BlockmodelSpec::with_default_sizes(kind);
            let set = preset(&spec, TermSetName::Forbidden).unwrap();
            assert!(set.targets().iter().all(|&t| t == 0));
            assert!(set.weights().iter().all(|&w| w == -DEFAULT_WEIGHT));
        }
    }

    #[test]
    fn hierarchy_repair_preset() {
        let spec = BlockmodelSpec::with_default_sizes(BlockmodelKind::HierarchicalNoDiag);
        let set = preset(&spec, TermSetName::Selected3Path021C).unwrap();
        assert_eq!(set.weight_of(Statistic::ThreePaths), Some(-2.0));
        assert_eq!(set.weight_of(Statistic::Triad(TriadType::T021C)), Some(4.0));
        assert_eq!(set.weight_of(Statistic::Triad(TriadType::T021U)), Some(2.0));
        assert_eq!(set.weight_of(Statistic::Triad(TriadType::T201)), Some(-2.0));
        let plain = preset(&spec, TermSetName::Selected3Path).unwrap();
        assert_eq!(plain.weight_of(Statistic::Triad(TriadType::T021C)), None);
        let coh = BlockmodelSpec::with_default_sizes(BlockmodelKind::Cohesive);
        let paths = preset(&coh, TermSetName::Selected3Path).unwrap();
        assert_eq!(paths.weight_of(Statistic::ThreePaths), Some(-2.0));
    }

    #[test]
    fn selected_allowed_only_differs_where_defined() {
        let trd = BlockmodelSpec::with_default_sizes(BlockmodelKind::TransitivityDiag);
        let sa = preset(&trd, TermSetName::SelectedAllowed).unwrap();
        let a = preset(&trd, TermSetName::Allowed).unwrap();
        assert!(sa.len() < a.len());
        let coh = BlockmodelSpec::with_default_sizes(BlockmodelKind::Cohesive);
        assert_eq!(
            preset(&coh, TermSetName::SelectedAllowed).unwrap(),
            preset(&coh, TermSetName::Allowed).unwrap()
        );
    }

    #[test]
    fn names_roundtrip() {
        for n in TermSetName::ALL {
            assert_eq!(n.name().parse::<TermSetName>().unwrap(), n);
        }
        assert!("bogus".parse::<TermSetName>().is_err());
        assert_eq!(HIERARCHY_REPAIR_ALIAS.parse::<TermSetName>().unwrap(), TermSetName::Selected3Path021C);
    }
}

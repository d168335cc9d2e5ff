//! Ideal blockmodels under structural equivalence, level-of-errors
//! perturbation and density-matched randomization.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BlockmodelKind {
    Cohesive,
    CorePeripherySymmetric,
    CorePeripheryAsymmetric,
    HierarchicalNoDiag,
    HierarchicalDiag,
    TransitivityNoDiag,
    TransitivityDiag,
}

impl BlockmodelKind {
    pub const ALL: [BlockmodelKind; 7] = [
        BlockmodelKind::Cohesive,
        BlockmodelKind::CorePeripherySymmetric,
        BlockmodelKind::CorePeripheryAsymmetric,
        BlockmodelKind::HierarchicalNoDiag,
        BlockmodelKind::HierarchicalDiag,
        BlockmodelKind::TransitivityNoDiag,
        BlockmodelKind::TransitivityDiag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BlockmodelKind::Cohesive => "cohesive",
            BlockmodelKind::CorePeripherySymmetric => "core_periphery_symmetric",
            BlockmodelKind::CorePeripheryAsymmetric => "core_periphery_asymmetric",
            BlockmodelKind::HierarchicalNoDiag => "hierarchical_nodiag",
            BlockmodelKind::HierarchicalDiag => "hierarchical_diag",
            BlockmodelKind::TransitivityNoDiag => "transitivity_nodiag",
            BlockmodelKind::TransitivityDiag => "transitivity_diag",
        }
    }

    /// Default cluster sizes for `n = 24`.
    ///
    /// Core-periphery kinds split the units evenly between core and periphery.
    /// Cohesive uses unequal clusters so that complete triads are not
    /// overrepresented relative to a random network of the same density.
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            BlockmodelKind::Cohesive => vec![6, 8, 10],
            BlockmodelKind::CorePeripherySymmetric | BlockmodelKind::CorePeripheryAsymmetric => {
                vec![12, 12]
            }
            _ => vec![8, 8, 8],
        }
    }

    fn has_complete_diagonal(self) -> bool {
        !matches!(
            self,
            BlockmodelKind::HierarchicalNoDiag | BlockmodelKind::TransitivityNoDiag
        )
    }

    /// Image matrix for `k` clusters. Cluster 0 is the core for the
    /// core-periphery kinds and the lowest level for hierarchy and
    /// transitivity, whose complete off-diagonal blocks point upwards.
    pub fn image(self, k: usize) -> Result<Image> {
        use BlockType::{Complete, Null};
        let is_cp = matches!(
            self,
            BlockmodelKind::CorePeripherySymmetric | BlockmodelKind::CorePeripheryAsymmetric
        );
        if is_cp && k != 2 {
            return Err(Error::InvalidSpec(format!(
                "{} needs exactly 2 clusters (core, periphery), got {k}",
                self.name()
            )));
        }
        if k == 0 {
            return Err(Error::InvalidSpec("no clusters".into()));
        }
        let mut img = Image::filled(k, Null);
        match self {
            BlockmodelKind::Cohesive => {
                for r in 0..k {
                    img.set(r, r, Complete);
                }
            }
            BlockmodelKind::CorePeripherySymmetric => {
                img.set(0, 0, Complete);
                img.set(0, 1, Complete);
                img.set(1, 0, Complete);
            }
            BlockmodelKind::CorePeripheryAsymmetric => {
                img.set(0, 0, Complete);
                img.set(1, 0, Complete);
            }
            BlockmodelKind::HierarchicalNoDiag | BlockmodelKind::HierarchicalDiag => {
                for r in 0..k.saturating_sub(1) {
                    img.set(r, r + 1, Complete);
                }
            }
            BlockmodelKind::TransitivityNoDiag | BlockmodelKind::TransitivityDiag => {
                for r in 0..k {
                    for s in (r + 1)..k {
                        img.set(r, s, Complete);
                    }
                }
            }
        }
        if !is_cp && self != BlockmodelKind::Cohesive && self.has_complete_diagonal() {
            for r in 0..k {
                img.set(r, r, Complete);
            }
        }
        Ok(img)
    }
}

impl fmt::Display for BlockmodelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlockmodelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Unknown {
                what: "blockmodel kind",
                name: s.to_string(),
            })
    }
}

impl TryFrom<String> for BlockmodelKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BlockmodelKind> for String {
    fn from(k: BlockmodelKind) -> String {
        k.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockType {
    Null,
    Complete,
}

/// `k x k` matrix of block types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    k: usize,
    blocks: Vec<BlockType>,
}

impl Image {
    pub fn filled(k: usize, t: BlockType) -> Self {
        Image {
            k,
            blocks: vec![t; k * k],
        }
    }

    pub fn from_rows(rows: &[Vec<BlockType>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("image must be square".into()));
        }
        Ok(Image {
            k,
            blocks: rows.concat(),
        })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, r: usize, s: usize) -> BlockType {
        self.blocks[r * self.k + s]
    }

    pub fn set(&mut self, r: usize, s: usize, t: BlockType) {
        self.blocks[r * self.k + s] = t;
    }

    #[inline]
    pub fn is_complete(&self, r: usize, s: usize) -> bool {
        self.get(r, s) == BlockType::Complete
    }

    /// Image with clusters relabelled: block `(r, s)` moves to `(perm[r], perm[s])`.
    pub fn relabelled(&self, perm: &[usize]) -> Image {
        let mut out = Image::filled(self.k, BlockType::Null);
        for r in 0..self.k {
            for s in 0..self.k {
                out.set(perm[r], perm[s], self.get(r, s));
            }
        }
        out
    }
}

/// Assignment of units to clusters; no cluster may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        for &c in &assignment {
            if c >= k {
                return Err(Error::Precondition(format!("cluster {c} out of range for k = {k}")));
            }
            seen[c] = true;
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(Error::Precondition(format!("cluster {c} is empty")));
        }
        Ok(Partition { assignment, k })
    }

    /// Contiguous index ranges in `sizes` order.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let assignment = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect();
        Self::new(assignment, sizes.len())
    }

    #[inline]
    pub fn cluster(&self, unit: usize) -> usize {
        self.assignment[unit]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Applies a cluster relabelling: cluster `c` becomes `perm[c]`.
    pub fn relabelled(&self, perm: &[usize]) -> Partition {
        Partition {
            assignment: self.assignment.iter().map(|&c| perm[c]).collect(),
            k: self.k,
        }
    }
}

/// Blockmodel kind plus ordered cluster sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockmodelSpec {
    kind: BlockmodelKind,
    cluster_sizes: Vec<usize>,
    image: Image,
}

impl BlockmodelSpec {
    pub fn new(kind: BlockmodelKind, cluster_sizes: Vec<usize>) -> Result<Self> {
        if cluster_sizes.is_empty() {
            return Err(Error::InvalidSpec("no clusters".into()));
        }
        if cluster_sizes.contains(&0) {
            return Err(Error::InvalidSpec(format!(
                "empty cluster in sizes {cluster_sizes:?}"
            )));
        }
        let image = kind.image(cluster_sizes.len())?;
        Ok(BlockmodelSpec {
            kind,
            cluster_sizes,
            image,
        })
    }

    pub fn with_default_sizes(kind: BlockmodelKind) -> Self {
        Self::new(kind, kind.default_sizes()).expect("default sizes are valid")
    }

    pub fn kind(&self) -> BlockmodelKind {
        self.kind
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.cluster_sizes
    }

    pub fn image(&self) -> &Image {
        &self.image
    }

    pub fn k(&self) -> usize {
        self.cluster_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.cluster_sizes.iter().sum()
    }

    pub fn canonical_partition(&self) -> Partition {
        Partition::contiguous(&self.cluster_sizes).expect("sizes are positive")
    }
}

/// Level of errors in `[0, 1]`: 0 is the ideal network, 1 a totally
/// randomized one.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LevelOfErrors(f64);

impl LevelOfErrors {
    pub const IDEAL: LevelOfErrors = LevelOfErrors(0.0);
    pub const RANDOM: LevelOfErrors = LevelOfErrors(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(LevelOfErrors(value))
        } else {
            Err(Error::Domain(format!("level of errors must be in [0, 1], got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Ideal network: arc `i -> j` iff the block of their clusters is complete.
pub fn build_ideal(spec: &BlockmodelSpec) -> DirectedGraph {
    let p = spec.canonical_partition();
    let n = spec.n();
    let mut g = DirectedGraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && spec.image.is_complete(p.cluster(i), p.cluster(j)) {
                g.add_arc(i, j).expect("fresh slot");
            }
        }
    }
    g
}

/// Number of arcs to relocate for a given level of errors:
/// `round((m - m^2 / (n^2 - n)) * le)`.
pub fn relocation_count(m: usize, n: usize, le: LevelOfErrors) -> Result<usize> {
    let slots = n * n.saturating_sub(1);
    if m > slots {
        return Err(Error::Domain(format!("{m} arcs exceed {slots} slots")));
    }
    if slots == 0 {
        return Ok(0);
    }
    let m = m as f64;
    Ok(((m - m * m / slots as f64) * le.value()).round() as usize)
}

/// Positions of `g` split by block type of the canonical partition:
/// (present arcs in complete blocks, absent slots in null blocks).
type Slots = Vec<(usize, usize)>;

fn relocation_pools(g: &DirectedGraph, spec: &BlockmodelSpec) -> (Slots, Slots) {
    let p = spec.canonical_partition();
    let mut in_complete = Vec::new();
    let mut free_null = Vec::new();
    for i in 0..g.n() {
        for j in 0..g.n() {
            if i == j {
                continue;
            }
            let complete = spec.image.is_complete(p.cluster(i), p.cluster(j));
            match (complete, g.has_arc(i, j)) {
                (true, true) => in_complete.push((i, j)),
                (false, false) => free_null.push((i, j)),
                _ => {}
            }
        }
    }
    (in_complete, free_null)
}

/// Moves `relocation_count(m, n, le)` arcs from complete-block positions to
/// empty null-block positions, both chosen uniformly without replacement.
pub fn perturb<R: Rng + ?Sized>(
    ideal: &DirectedGraph,
    spec: &BlockmodelSpec,
    le: LevelOfErrors,
    rng: &mut R,
) -> Result<DirectedGraph> {
    if ideal.n() != spec.n() {
        return Err(Error::Dimension(format!(
            "graph has {} units, spec has {}",
            ideal.n(),
            spec.n()
        )));
    }
    let k = relocation_count(ideal.arc_count(), ideal.n(), le)?;
    let mut out = ideal.clone();
    if k == 0 {
        return Ok(out);
    }
    let (in_complete, free_null) = relocation_pools(ideal, spec);
    for (needed, available) in [(k, in_complete.len()), (k, free_null.len())] {
        if needed > available {
            return Err(Error::Infeasible { needed, available });
        }
    }
    for idx in index::sample(rng, in_complete.len(), k) {
        let (i, j) = in_complete[idx];
        out.remove_arc(i, j)?;
    }
    for idx in index::sample(rng, free_null.len(), k) {
        let (i, j) = free_null[idx];
        out.add_arc(i, j)?;
    }
    Ok(out)
}

/// Totally randomized network: `perturb` at level of errors 1.
pub fn randomize_total<R: Rng + ?Sized>(
    g: &DirectedGraph,
    spec: &BlockmodelSpec,
    rng: &mut R,
) -> Result<DirectedGraph> {
    perturb(g, spec, LevelOfErrors::RANDOM, rng)
}

/// Uniformly random digraph with the same unit and arc count as `g`.
///
/// Used for networks with no canonical block layout (generated networks),
/// where every block ends up with the same expected density.
pub fn randomize_uniform<R: Rng + ?Sized>(g: &DirectedGraph, rng: &mut R) -> DirectedGraph {
    let n = g.n();
    let slots = g.slot_count();
    let mut out = DirectedGraph::empty(n);
    for s in index::sample(rng, slots, g.arc_count()) {
        let i = s / (n - 1);
        let mut j = s % (n - 1);
        if j >= i {
            j += 1;
        }
        out.add_arc(i, j).expect("distinct slots");
    }
    out
}

/// Densities of complete-block and null-block positions of `g` under a
/// partition and image, diagonal excluded. `None` when a block type has no
/// positions.
pub fn block_type_densities(
    g: &DirectedGraph,
    p: &Partition,
    image: &Image,
) -> (Option<f64>, Option<f64>) {
    let (mut ca, mut cn, mut na, mut nn) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..g.n() {
        for j in 0..g.n() {
            if i == j {
                continue;
            }
            let arc = g.has_arc(i, j) as usize;
            if image.is_complete(p.cluster(i), p.cluster(j)) {
                ca += arc;
                cn += 1;
            } else {
                na += arc;
                nn += 1;
            }
        }
    }
    let ratio = |a: usize, n: usize| (n > 0).then(|| a as f64 / n as f64);
    (ratio(ca, cn), ratio(na, nn))
}

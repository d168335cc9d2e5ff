//! Pre-specified blockmodeling under structural equivalence.

use std::io::Write;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blockmodel::{BlockType, Image, Partition};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::rng::stream_rng;

pub const DEFAULT_RESTARTS: usize = 20;

fn check_dims(g: &DirectedGraph, p: &Partition, image: &Image) -> Result<()> {
    if p.n() != g.n() {
        return Err(Error::Dimension(format!(
            "partition covers {} units, network has {}",
            p.n(),
            g.n()
        )));
    }
    if p.k() != image.k() {
        return Err(Error::Dimension(format!(
            "partition has {} clusters, image is {}x{}",
            p.k(),
            image.k(),
            image.k()
        )));
    }
    Ok(())
}

/// Inconsistencies of `g` with `image` under `p`: arcs inside null blocks
/// plus absent off-diagonal slots inside complete blocks. Returns the total
/// and the `k x k` breakdown.
pub fn criterion(g: &DirectedGraph, p: &Partition, image: &Image) -> Result<(u64, Vec<Vec<u64>>)> {
    check_dims(g, p, image)?;
    let k = p.k();
    let mut arcs = vec![0u64; k * k];
    for (i, j) in g.arcs() {
        arcs[p.cluster(i) * k + p.cluster(j)] += 1;
    }
    let sizes: Vec<u64> = p.sizes().into_iter().map(|s| s as u64).collect();
    let blocks = block_errors(&arcs, &sizes, image);
    let total = blocks.iter().sum();
    Ok((total, blocks.chunks(k).map(|r| r.to_vec()).collect()))
}

#[inline]
fn slots(sizes: &[u64], r: usize, s: usize) -> u64 {
    if r == s {
        sizes[r] * sizes[r].saturating_sub(1)
    } else {
        sizes[r] * sizes[s]
    }
}

fn block_errors(arcs: &[u64], sizes: &[u64], image: &Image) -> Vec<u64> {
    let k = image.k();
    let mut out = vec![0; k * k];
    for r in 0..k {
        for s in 0..k {
            let a = arcs[r * k + s];
            out[r * k + s] = match image.get(r, s) {
                BlockType::Null => a,
                BlockType::Complete => slots(sizes, r, s) - a,
            };
        }
    }
    out
}

fn total_errors(arcs: &[u64], sizes: &[u64], image: &Image) -> u64 {
    let k = image.k();
    let mut t = 0;
    for r in 0..k {
        for s in 0..k {
            let a = arcs[r * k + s];
            t += match image.get(r, s) {
                BlockType::Null => a,
                BlockType::Complete => slots(sizes, r, s) - a,
            };
        }
    }
    t
}

/// Incrementally maintained block arc counts for one partition.
struct State<'a> {
    g: &'a DirectedGraph,
    image: &'a Image,
    k: usize,
    assign: Vec<usize>,
    sizes: Vec<u64>,
    /// `arcs[r * k + s]`: arcs from cluster `r` to cluster `s`.
    arcs: Vec<u64>,
    /// `out_to[u * k + c]`: arcs from `u` into cluster `c`.
    out_to: Vec<u64>,
    /// `in_from[u * k + c]`: arcs into `u` from cluster `c`.
    in_from: Vec<u64>,
    cost: u64,
}

impl<'a> State<'a> {
    fn new(g: &'a DirectedGraph, image: &'a Image, assign: Vec<usize>) -> Self {
        let k = image.k();
        let n = g.n();
        let mut sizes = vec![0u64; k];
        for &c in &assign {
            sizes[c] += 1;
        }
        let mut arcs = vec![0u64; k * k];
        let mut out_to = vec![0u64; n * k];
        let mut in_from = vec![0u64; n * k];
        for (i, j) in g.arcs() {
            arcs[assign[i] * k + assign[j]] += 1;
            out_to[i * k + assign[j]] += 1;
            in_from[j * k + assign[i]] += 1;
        }
        let cost = total_errors(&arcs, &sizes, image);
        State {
            g,
            image,
            k,
            assign,
            sizes,
            arcs,
            out_to,
            in_from,
            cost,
        }
    }

    /// Block arc counts after moving `u` to cluster `b`, written into `buf`.
    fn moved_arcs(&self, u: usize, b: usize, buf: &mut [u64]) {
        let k = self.k;
        let a = self.assign[u];
        buf.copy_from_slice(&self.arcs);
        for c in 0..k {
            let o = self.out_to[u * k + c];
            buf[a * k + c] -= o;
            buf[b * k + c] += o;
            let i = self.in_from[u * k + c];
            buf[c * k + a] -= i;
            buf[c * k + b] += i;
        }
    }

    fn transfer_cost(&self, u: usize, b: usize, buf: &mut [u64], sizes: &mut [u64]) -> u64 {
        let a = self.assign[u];
        self.moved_arcs(u, b, buf);
        sizes.copy_from_slice(&self.sizes);
        sizes[a] -= 1;
        sizes[b] += 1;
        total_errors(buf, sizes, self.image)
    }

    fn apply_transfer(&mut self, u: usize, b: usize) {
        let k = self.k;
        let a = self.assign[u];
        if a == b {
            return;
        }
        let mut buf = vec![0; k * k];
        self.moved_arcs(u, b, &mut buf);
        self.arcs = buf;
        self.sizes[a] -= 1;
        self.sizes[b] += 1;
        self.assign[u] = b;
        for v in self.g.out_neighbors(u) {
            self.in_from[v * k + a] -= 1;
            self.in_from[v * k + b] += 1;
        }
        for v in self.g.in_neighbors(u) {
            self.out_to[v * k + a] -= 1;
            self.out_to[v * k + b] += 1;
        }
        self.cost = total_errors(&self.arcs, &self.sizes, self.image);
    }

    /// Cost after swapping the clusters of `u` and `w`; leaves the state unchanged.
    fn exchange_cost(&mut self, u: usize, w: usize, buf: &mut [u64]) -> u64 {
        let (a, b) = (self.assign[u], self.assign[w]);
        let before = self.cost;
        self.apply_transfer(u, b);
        self.moved_arcs(w, a, buf);
        // Sizes are back to the original after both moves.
        let c = total_errors(buf, &self.sizes_after_exchange(w, a), self.image);
        self.apply_transfer(u, a);
        debug_assert_eq!(self.cost, before);
        c
    }

    fn sizes_after_exchange(&self, w: usize, a: usize) -> Vec<u64> {
        let mut s = self.sizes.clone();
        s[self.assign[w]] -= 1;
        s[a] += 1;
        s
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Transfer(usize, usize),
    Exchange(usize, usize),
}

/// First-improvement descent over transfers and exchanges, visiting moves in
/// a fixed random order cyclically until a full pass finds no strict
/// decrease.
fn descend<R: Rng + ?Sized>(st: &mut State<'_>, rng: &mut R) {
    let n = st.assign.len();
    let k = st.k;
    let mut moves: Vec<Step> = Vec::with_capacity(n * k + n * n / 2);
    for u in 0..n {
        for b in 0..k {
            moves.push(Step::Transfer(u, b));
        }
    }
    for u in 0..n {
        for w in u + 1..n {
            moves.push(Step::Exchange(u, w));
        }
    }
    moves.shuffle(rng);

    let mut buf = vec![0u64; k * k];
    let mut sizes = vec![0u64; k];
    let mut since_improvement = 0;
    let mut pos = 0;
    while since_improvement < moves.len() && st.cost > 0 {
        let mv = moves[pos];
        pos = (pos + 1) % moves.len();
        since_improvement += 1;
        match mv {
            Step::Transfer(u, b) => {
                let a = st.assign[u];
                if a == b || st.sizes[a] == 1 {
                    continue;
                }
                if st.transfer_cost(u, b, &mut buf, &mut sizes) < st.cost {
                    st.apply_transfer(u, b);
                    since_improvement = 0;
                }
            }
            Step::Exchange(u, w) => {
                let (a, b) = (st.assign[u], st.assign[w]);
                if a == b {
                    continue;
                }
                if st.exchange_cost(u, w, &mut buf) < st.cost {
                    st.apply_transfer(u, b);
                    st.apply_transfer(w, a);
                    since_improvement = 0;
                }
            }
        }
    }
}

fn random_assignment<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut units: Vec<usize> = (0..n).collect();
    units.shuffle(rng);
    let mut assign = vec![0; n];
    for (pos, &u) in units.iter().enumerate() {
        assign[u] = if pos < k { pos } else { rng.random_range(0..k) };
    }
    assign
}

/// Relabelling of the current partition that minimizes the criterion, if it
/// beats the current value.
fn best_relabelling(st: &State<'_>) -> Option<Vec<usize>> {
    let k = st.k;
    let mut best: Option<(u64, Vec<usize>)> = None;
    for perm in (0..k).permutations(k) {
        let mut arcs = vec![0u64; k * k];
        let mut sizes = vec![0u64; k];
        for r in 0..k {
            sizes[perm[r]] = st.sizes[r];
            for s in 0..k {
                arcs[perm[r] * k + perm[s]] = st.arcs[r * k + s];
            }
        }
        let c = total_errors(&arcs, &sizes, st.image);
        if c < st.cost && best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, perm));
        }
    }
    best.map(|(_, p)| p)
}

fn one_restart(g: &DirectedGraph, image: &Image, seed: u64, restart: usize) -> Vec<usize> {
    let mut rng = stream_rng(seed, restart as u64);
    let assign = random_assignment(g.n(), image.k(), &mut rng);
    let mut st = State::new(g, image, assign);
    loop {
        descend(&mut st, &mut rng);
        match best_relabelling(&st) {
            Some(perm) => {
                let assign = st.assign.iter().map(|&c| perm[c]).collect();
                st = State::new(g, image, assign);
            }
            None => break,
        }
    }
    st.assign
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitResult {
    pub partition: Partition,
    pub criterion: u64,
    pub per_block_errors: Vec<Vec<u64>>,
    pub restarts_used: usize,
}

impl FitResult {
    /// Errors falling in blocks of type `t`.
    pub fn errors_in(&self, image: &Image, t: BlockType) -> u64 {
        let mut sum = 0;
        for (r, row) in self.per_block_errors.iter().enumerate() {
            for (s, &e) in row.iter().enumerate() {
                if image.get(r, s) == t {
                    sum += e;
                }
            }
        }
        sum
    }
}

/// Best partition of `g` for the pre-specified `image` found by `restarts`
/// independent descents. Cluster labels are bound to image rows.
pub fn fit_prespecified<R: Rng + ?Sized>(
    g: &DirectedGraph,
    image: &Image,
    restarts: usize,
    rng: &mut R,
) -> Result<FitResult> {
    let k = image.k();
    if k < 2 {
        return Err(Error::Precondition(format!("need k >= 2, got {k}")));
    }
    if restarts == 0 {
        return Err(Error::Precondition("restarts must be at least 1".into()));
    }
    if k > g.n() {
        return Err(Error::Domain(format!("k = {k} exceeds n = {}", g.n())));
    }
    let seed: u64 = rng.random();
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let assign = one_restart(g, image, seed, r);
            let p = Partition::new(assign, k).expect("moves never empty a cluster");
            let (c, _) = criterion(g, &p, image).expect("dimensions checked");
            (c, r, p)
        })
        .min_by_key(|(c, r, _)| (*c, *r))
        .expect("at least one restart");
    let (total, blocks) = criterion(g, &best.2, image)?;
    Ok(FitResult {
        partition: best.2,
        criterion: total,
        per_block_errors: blocks,
        restarts_used: restarts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MivResult {
    pub value: f64,
    pub pairs: Vec<(u64, u64)>,
    /// Indices of pairs left out because their randomized criterion was 0.
    pub excluded: Vec<usize>,
}

/// Mean Improvement Value `1 - mean(P_model / P_random)`.
pub fn miv(pairs: &[(u64, u64)]) -> Result<MivResult> {
    let excluded: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(_, r))| r == 0)
        .map(|(i, _)| i)
        .collect();
    let used = pairs.len() - excluded.len();
    if used == 0 {
        return Err(Error::Domain(
            "no pair has a positive randomized criterion".into(),
        ));
    }
    let sum: f64 = pairs
        .iter()
        .filter(|&&(_, r)| r > 0)
        .map(|&(m, r)| m as f64 / r as f64)
        .sum();
    Ok(MivResult {
        value: 1.0 - sum / used as f64,
        pairs: pairs.to_vec(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub network_id: String,
    pub kind: String,
    pub term_set: String,
    pub algorithm: String,
    #[serde(rename = "P_model")]
    pub p_model: u64,
    #[serde(rename = "P_random")]
    pub p_random: u64,
    /// Empty when `P_random` is 0.
    pub ratio: Option<f64>,
}

pub fn write_fit_rows<W: Write>(rows: &[FitRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

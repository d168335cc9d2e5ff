//! Relocating Links: density-preserving local search toward target counts.
//!
//! Each iteration moves one uniformly chosen arc to one uniformly chosen
//! empty slot and keeps the move only if the squared deviation from the
//! targets strictly decreases.

use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::terms::{evaluate, TermSet};

/// Default iteration budget for 24-unit networks.
pub const DEFAULT_ITERATIONS: usize = 200_000;

/// Sum of squared componentwise differences.
pub fn deviation(values: &[i64], targets: &[i64]) -> Result<f64> {
    if values.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: targets.len(),
        });
    }
    Ok(squared_deviation(values, targets) as f64)
}

#[inline]
fn squared_deviation(values: &[i64], targets: &[i64]) -> i128 {
    values
        .iter()
        .zip(targets)
        .map(|(&v, &t)| {
            let d = (v - t) as i128;
            d * d
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    /// Deviation of the current state after this iteration.
    pub deviation: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlTrace {
    pub initial_deviation: f64,
    pub entries: Vec<TraceEntry>,
    pub iterations_requested: usize,
    /// Iterations skipped after the deviation reached zero.
    pub iterations_skipped: usize,
}

impl RlTrace {
    pub fn final_deviation(&self) -> f64 {
        self.entries
            .last()
            .map_or(self.initial_deviation, |e| e.deviation)
    }

    pub fn accepted_moves(&self) -> usize {
        self.entries.iter().filter(|e| e.accepted).count()
    }

    /// CSV with columns `iteration, deviation, accepted`; iteration 0 is the
    /// initial state.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "deviation", "accepted"])?;
        w.write_record(["0".to_string(), format!("{}", self.initial_deviation), "0".into()])?;
        for (k, e) in self.entries.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                format!("{}", e.deviation),
                (e.accepted as u8).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `iterations` relocation proposals from `init` toward `targets`.
pub fn rl_generate<R: Rng + ?Sized>(
    targets: &TermSet,
    init: &DirectedGraph,
    iterations: usize,
    rng: &mut R,
) -> Result<(DirectedGraph, RlTrace)> {
    if init.n() < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {}", init.n())));
    }
    if init.arc_count() == 0 || init.arc_count() == init.slot_count() {
        return Err(Error::Precondition(
            "initial network must have at least one arc and one empty slot".into(),
        ));
    }
    if targets.is_empty() {
        return Err(Error::Precondition("empty term set".into()));
    }
    let idx = targets.index();
    let goal = targets.targets();
    let mut g = init.clone();
    let mut current = evaluate(&g, targets.terms())?;
    let mut dev = squared_deviation(&current, goal);
    let mut proposal = vec![0i64; current.len()];

    let mut trace = RlTrace {
        initial_deviation: dev as f64,
        entries: Vec::with_capacity(iterations),
        iterations_requested: iterations,
        iterations_skipped: 0,
    };

    for it in 0..iterations {
        if dev == 0 {
            trace.iterations_skipped = iterations - it;
            break;
        }
        let (i, j) = g.random_arc(rng).expect("arc count is preserved");
        let (k, l) = g.random_free_slot(rng).expect("slot count is preserved");

        proposal.copy_from_slice(&current);
        idx.accumulate_toggle(&g, i, j, &mut proposal);
        g.toggle_unchecked(i, j);
        idx.accumulate_toggle(&g, k, l, &mut proposal);
        g.toggle_unchecked(k, l);

        let proposed = squared_deviation(&proposal, goal);
        let accepted = proposed < dev;
        if accepted {
            std::mem::swap(&mut current, &mut proposal);
            dev = proposed;
        } else {
            g.toggle_unchecked(k, l);
            g.toggle_unchecked(i, j);
        }
        trace.entries.push(TraceEntry {
            deviation: dev as f64,
            accepted,
        });
    }
    Ok((g, trace))
}

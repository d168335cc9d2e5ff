//! Directed 3-trails: ordered sequences of three pairwise distinct arcs
//! `a->b, b->c, c->d`. Units may repeat (`1->2->3->2` is a trail).
//!
//! Every walk of length three has distinct consecutive arcs (no self-links),
//! so the only walks that are not trails are `x->y->x->y` over a mutual dyad.
//! Hence `trails = sum over arcs (b,c) of in(b) * out(c) - 2 * mutual_dyads`.

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Number of directed 3-trails in `g`.
pub fn count_3paths(g: &DirectedGraph) -> u64 {
    let walks: u64 = g
        .arcs()
        .map(|(b, c)| (g.in_degree(b) * g.out_degree(c)) as u64)
        .sum();
    walks - 2 * g.mutual_dyads() as u64
}

/// Change in the 3-trail count from flipping slot `(u, v)` in its current
/// state. O(n).
pub(crate) fn toggle_delta_3paths(g: &DirectedGraph, u: usize, v: usize) -> i64 {
    let cur = g.has_arc(u, v) as i64;
    // Degrees with the (u, v) arc taken out.
    let in0_v = g.in_degree(v) as i64 - cur;
    let out0_u = g.out_degree(u) as i64 - cur;
    let indeg = |x: usize, s: i64| -> i64 {
        if x == v {
            in0_v + s
        } else {
            g.in_degree(x) as i64
        }
    };
    let outdeg = |x: usize, s: i64| -> i64 {
        if x == u {
            out0_u + s
        } else {
            g.out_degree(x) as i64
        }
    };
    // Walk contributions of the arcs whose endpoint degrees depend on the
    // slot, plus the slot itself when present.
    let local = |s: i64| -> i64 {
        let mut sum = 0;
        for c in 0..g.n() {
            if g.has_arc(v, c) {
                sum += indeg(v, s) * outdeg(c, s);
            }
        }
        for b in 0..g.n() {
            if b != v && g.has_arc(b, u) {
                sum += indeg(b, s) * outdeg(u, s);
            }
        }
        sum + s * indeg(u, s) * outdeg(v, s)
    };
    let delta_if_added = local(1) - local(0) - 2 * g.has_arc(v, u) as i64;
    if cur == 1 {
        -delta_if_added
    } else {
        delta_if_added
    }
}

/// Change in the 3-trail count from adding or removing arc `u -> v`.
pub fn three_path_delta(g: &DirectedGraph, u: usize, v: usize, add: bool) -> Result<i64> {
    if u >= g.n() || v >= g.n() || u == v {
        return Err(Error::Precondition(format!("invalid dyad ({u}, {v})")));
    }
    if g.has_arc(u, v) == add {
        return Err(Error::Precondition(format!(
            "toggle of {u}->{v} inconsistent with current state"
        )));
    }
    Ok(toggle_delta_3paths(g, u, v))
}

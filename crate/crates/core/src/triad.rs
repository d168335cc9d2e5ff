//! Triad types (MAN labels), full triad census and incremental census deltas.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// The 16 isomorphism classes of a directed graph on three units.
///
/// Labels count mutual, asymmetric and null dyads; the suffix tells apart
/// orientations (Down, Up, Cyclic, Transitive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TriadType {
    T003,
    T012,
    T102,
    T021D,
    T021U,
    T021C,
    T111D,
    T111U,
    T030T,
    T030C,
    T201,
    T120D,
    T120U,
    T120C,
    T210,
    T300,
}

impl TriadType {
    pub const ALL: [TriadType; 16] = [
        TriadType::T003,
        TriadType::T012,
        TriadType::T102,
        TriadType::T021D,
        TriadType::T021U,
        TriadType::T021C,
        TriadType::T111D,
        TriadType::T111U,
        TriadType::T030T,
        TriadType::T030C,
        TriadType::T201,
        TriadType::T120D,
        TriadType::T120U,
        TriadType::T120C,
        TriadType::T210,
        TriadType::T300,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<TriadType> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        LABELS[self.index()]
    }

    /// (mutual, asymmetric, null) dyad counts.
    pub fn man(self) -> (u8, u8, u8) {
        let b = self.label().as_bytes();
        (b[0] - b'0', b[1] - b'0', b[2] - b'0')
    }
}

const LABELS: [&str; 16] = [
    "003", "012", "102", "021D", "021U", "021C", "111D", "111U", "030T", "030C", "201", "120D",
    "120U", "120C", "210", "300",
];

impl fmt::Display for TriadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TriadType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['t', 'T']);
        LABELS
            .iter()
            .position(|l| l.eq_ignore_ascii_case(s))
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::Unknown {
                what: "triad type",
                name: s.to_string(),
            })
    }
}

impl TryFrom<String> for TriadType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TriadType> for String {
    fn from(t: TriadType) -> String {
        t.label().to_string()
    }
}

// Code layout for an ordered triple (a, b, c):
// bit0 a->b, bit1 b->a, bit2 a->c, bit3 c->a, bit4 b->c, bit5 c->b.
const fn pair_bit(x: usize, y: usize) -> usize {
    match (x, y) {
        (0, 1) => 0,
        (1, 0) => 1,
        (0, 2) => 2,
        (2, 0) => 3,
        (1, 2) => 4,
        _ => 5, // (2, 1)
    }
}

const BIT_PAIRS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// One representative code per type, in `TriadType::ALL` order.
const REPRESENTATIVES: [u8; 16] = [
    0,  // 003
    1,  // 012: a->b
    3,  // 102: a<->b
    18, // 021D: a<-b->c
    33, // 021U: a->b<-c
    17, // 021C: a->b->c
    35, // 111D: a<->b<-c
    19, // 111U: a<->b->c
    37, // 030T: a->b<-c, a->c
    38, // 030C: a<-b<-c, a->c
    51, // 201: a<->b<->c
    30, // 120D: a<-b->c, a<->c
    45, // 120U: a->b<-c, a<->c
    29, // 120C: a->b->c, a<->c
    61, // 210: a->b<->c, a<->c
    63, // 300
];

const fn permute_code(code: u8, p: [usize; 3]) -> u8 {
    let mut out = 0u8;
    let mut b = 0;
    while b < 6 {
        if code & (1 << b) != 0 {
            let (x, y) = BIT_PAIRS[b];
            out |= 1 << pair_bit(p[x], p[y]);
        }
        b += 1;
    }
    out
}

const fn build_code_table() -> [u8; 64] {
    let mut table = [u8::MAX; 64];
    let mut t = 0;
    while t < 16 {
        let mut k = 0;
        while k < 6 {
            table[permute_code(REPRESENTATIVES[t], PERMUTATIONS[k]) as usize] = t as u8;
            k += 1;
        }
        t += 1;
    }
    table
}

/// Type index for each of the 64 arc configurations of an ordered triple.
pub(crate) const CODE_TABLE: [u8; 64] = build_code_table();

/// Arc configuration code of the ordered triple `(a, b, c)`.
#[inline]
pub fn triple_code(g: &DirectedGraph, a: usize, b: usize, c: usize) -> u8 {
    (g.has_arc(a, b) as u8)
        | (g.has_arc(b, a) as u8) << 1
        | (g.has_arc(a, c) as u8) << 2
        | (g.has_arc(c, a) as u8) << 3
        | (g.has_arc(b, c) as u8) << 4
        | (g.has_arc(c, b) as u8) << 5
}

/// Type of the triad formed by three distinct units.
#[inline]
pub fn classify_triple(g: &DirectedGraph, a: usize, b: usize, c: usize) -> TriadType {
    TriadType::ALL[CODE_TABLE[triple_code(g, a, b, c) as usize] as usize]
}

/// Classifies a 6-bit arc code directly.
#[inline]
pub fn classify_code(code: u8) -> TriadType {
    TriadType::ALL[CODE_TABLE[(code & 63) as usize] as usize]
}

/// Counts of each triad type over all unordered triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TriadCensus {
    counts: [u64; 16],
}

impl TriadCensus {
    pub fn from_counts(counts: [u64; 16]) -> Self {
        TriadCensus { counts }
    }

    #[inline]
    pub fn get(&self, t: TriadType) -> u64 {
        self.counts[t.index()]
    }

    pub fn counts(&self) -> &[u64; 16] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TriadType, u64)> + '_ {
        TriadType::ALL.iter().map(move |&t| (t, self.counts[t.index()]))
    }

    /// Applies a delta; errors if any count would go negative.
    pub fn apply(&mut self, delta: &CensusDelta) -> Result<()> {
        let mut next = self.counts;
        for (c, d) in next.iter_mut().zip(delta.deltas.iter()) {
            let v = *c as i64 + d;
            if v < 0 {
                return Err(Error::Precondition("census delta drives a count negative".into()));
            }
            *c = v as u64;
        }
        self.counts = next;
        Ok(())
    }
}

impl Index<TriadType> for TriadCensus {
    type Output = u64;
    fn index(&self, t: TriadType) -> &u64 {
        &self.counts[t.index()]
    }
}

/// Signed per-type change caused by one arc toggle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CensusDelta {
    deltas: [i64; 16],
}

impl CensusDelta {
    #[inline]
    pub fn get(&self, t: TriadType) -> i64 {
        self.deltas[t.index()]
    }

    pub fn deltas(&self) -> &[i64; 16] {
        &self.deltas
    }

    pub fn is_zero(&self) -> bool {
        self.deltas.iter().all(|&d| d == 0)
    }

    /// Difference `after - before` of two censuses.
    pub fn between(before: &TriadCensus, after: &TriadCensus) -> Self {
        let mut deltas = [0i64; 16];
        for (k, d) in deltas.iter_mut().enumerate() {
            *d = after.counts[k] as i64 - before.counts[k] as i64;
        }
        CensusDelta { deltas }
    }
}

impl Index<TriadType> for CensusDelta {
    type Output = i64;
    fn index(&self, t: TriadType) -> &i64 {
        &self.deltas[t.index()]
    }
}

/// Exact triad census of `g`. Requires `n >= 3`.
pub fn triad_census(g: &DirectedGraph) -> Result<TriadCensus> {
    let n = g.n();
    if n < 3 {
        return Err(Error::Domain(format!("triad census needs n >= 3, got {n}")));
    }
    let mut counts = [0u64; 16];
    for a in 0..n {
        for b in (a + 1)..n {
            let ab = (g.has_arc(a, b) as u8) | (g.has_arc(b, a) as u8) << 1;
            for c in (b + 1)..n {
                let code = ab
                    | (g.has_arc(a, c) as u8) << 2
                    | (g.has_arc(c, a) as u8) << 3
                    | (g.has_arc(b, c) as u8) << 4
                    | (g.has_arc(c, b) as u8) << 5;
                counts[CODE_TABLE[code as usize] as usize] += 1;
            }
        }
    }
    Ok(TriadCensus { counts })
}

/// Census change from flipping slot `(i, j)` in its current state; scans only
/// the `n - 2` triples containing both units.
#[inline]
pub(crate) fn toggle_delta(g: &DirectedGraph, i: usize, j: usize) -> CensusDelta {
    let mut deltas = [0i64; 16];
    let ij = (g.has_arc(i, j) as u8) | (g.has_arc(j, i) as u8) << 1;
    for w in 0..g.n() {
        if w == i || w == j {
            continue;
        }
        let code = ij
            | (g.has_arc(i, w) as u8) << 2
            | (g.has_arc(w, i) as u8) << 3
            | (g.has_arc(j, w) as u8) << 4
            | (g.has_arc(w, j) as u8) << 5;
        deltas[CODE_TABLE[code as usize] as usize] -= 1;
        deltas[CODE_TABLE[(code ^ 1) as usize] as usize] += 1;
    }
    CensusDelta { deltas }
}

/// Census change from adding (`add = true`) or removing arc `i -> j`.
pub fn census_delta(g: &DirectedGraph, i: usize, j: usize, add: bool) -> Result<CensusDelta> {
    if i >= g.n() || j >= g.n() || i == j {
        return Err(Error::Precondition(format!("invalid dyad ({i}, {j})")));
    }
    if g.has_arc(i, j) == add {
        return Err(Error::Precondition(format!(
            "cannot {} arc {i}->{j}: it is {}",
            if add { "add" } else { "remove" },
            if add { "already present" } else { "absent" }
        )));
    }
    Ok(toggle_delta(g, i, j))
}

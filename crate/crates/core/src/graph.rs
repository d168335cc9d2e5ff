//! Dense directed graph without self-links.
//!
//! Adjacency is a row-major bit matrix so arc probes are O(1); in- and
//! out-degrees are maintained on every mutation because the 3-trail
//! statistic needs them.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    out_deg: Vec<u32>,
    in_deg: Vec<u32>,
    arcs: usize,
}

impl std::fmt::Debug for DirectedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectedGraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs)
            .finish()
    }
}

impl DirectedGraph {
    pub fn empty(n: usize) -> Self {
        let words_per_row = n.div_ceil(64).max(1);
        DirectedGraph {
            n,
            words_per_row,
            bits: vec![0; words_per_row * n],
            out_deg: vec![0; n],
            in_deg: vec![0; n],
            arcs: 0,
        }
    }

    /// Complete digraph: every off-diagonal ordered pair is an arc.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    /// Builds a graph from 0-based arcs. Duplicate arcs are ignored.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (i, j) in arcs {
            g.check_pair(i, j)?;
            g.set(i, j, true);
        }
        Ok(g)
    }

    /// Builds a graph from an `n x n` 0/1 matrix.
    pub fn from_matrix(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &present) in row.iter().enumerate() {
                if present {
                    if i == j {
                        return Err(Error::Precondition(format!("self-link at unit {i}")));
                    }
                    g.set(i, j, true);
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    /// Number of off-diagonal ordered pairs, `n^2 - n`.
    #[inline]
    pub fn slot_count(&self) -> usize {
        self.n * self.n.saturating_sub(1)
    }

    #[inline]
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        let w = self.bits[i * self.words_per_row + j / 64];
        (w >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn out_degree(&self, i: usize) -> usize {
        self.out_deg[i] as usize
    }

    #[inline]
    pub fn in_degree(&self, i: usize) -> usize {
        self.in_deg[i] as usize
    }

    /// Arcs divided by `n^2 - n`.
    pub fn density(&self) -> f64 {
        let slots = self.slot_count();
        if slots == 0 {
            0.0
        } else {
            self.arcs as f64 / slots as f64
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, present: bool) {
        let idx = i * self.words_per_row + j / 64;
        let mask = 1u64 << (j % 64);
        let was = self.bits[idx] & mask != 0;
        if was == present {
            return;
        }
        if present {
            self.bits[idx] |= mask;
            self.out_deg[i] += 1;
            self.in_deg[j] += 1;
            self.arcs += 1;
        } else {
            self.bits[idx] &= !mask;
            self.out_deg[i] -= 1;
            self.in_deg[j] -= 1;
            self.arcs -= 1;
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::Precondition(format!(
                "unit out of range: ({i}, {j}) with n = {}",
                self.n
            )));
        }
        if i == j {
            return Err(Error::Precondition(format!("self-link at unit {i}")));
        }
        Ok(())
    }

    pub fn add_arc(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        if self.has_arc(i, j) {
            return Err(Error::Precondition(format!("arc {i}->{j} already present")));
        }
        self.set(i, j, true);
        Ok(())
    }

    pub fn remove_arc(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        if !self.has_arc(i, j) {
            return Err(Error::Precondition(format!("arc {i}->{j} not present")));
        }
        self.set(i, j, false);
        Ok(())
    }

    /// Flips the dyad slot `(i, j)`. Callers must guarantee `i != j`.
    #[inline]
    pub(crate) fn toggle_unchecked(&mut self, i: usize, j: usize) {
        debug_assert!(i != j && i < self.n && j < self.n);
        let present = self.has_arc(i, j);
        self.set(i, j, !present);
    }

    /// Flips the dyad slot `(i, j)` and returns whether the arc is present afterwards.
    pub fn toggle(&mut self, i: usize, j: usize) -> Result<bool> {
        self.check_pair(i, j)?;
        self.toggle_unchecked(i, j);
        Ok(self.has_arc(i, j))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n)
                .filter(move |&j| self.has_arc(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_arc(i, j))
    }

    pub fn in_neighbors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.has_arc(i, j))
    }

    /// Number of unordered pairs linked in both directions.
    pub fn mutual_dyads(&self) -> usize {
        let mut m = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_arc(i, j) && self.has_arc(j, i) {
                    m += 1;
                }
            }
        }
        m
    }

    /// Every arc reversed.
    pub fn reversed(&self) -> Self {
        let mut g = Self::empty(self.n);
        for (i, j) in self.arcs() {
            g.set(j, i, true);
        }
        g
    }

    /// Relabels units: unit `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch {
                left: perm.len(),
                right: self.n,
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition("not a permutation".into()));
            }
        }
        let mut g = Self::empty(self.n);
        for (i, j) in self.arcs() {
            g.set(perm[i], perm[j], true);
        }
        Ok(g)
    }

    /// Uniformly random existing arc, by rejection over off-diagonal slots.
    pub fn random_arc<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        self.random_slot_with(rng, true)
    }

    /// Uniformly random absent off-diagonal slot.
    pub fn random_free_slot<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        self.random_slot_with(rng, false)
    }

    fn random_slot_with<R: Rng + ?Sized>(&self, rng: &mut R, present: bool) -> Option<(usize, usize)> {
        let wanted = if present {
            self.arcs
        } else {
            self.slot_count() - self.arcs
        };
        if wanted == 0 {
            return None;
        }
        loop {
            let (i, j) = random_dyad(self.n, rng);
            if self.has_arc(i, j) == present {
                return Some((i, j));
            }
        }
    }

    /// Matrix text format: first line `n`, then `n` rows of space-separated 0/1.
    pub fn to_matrix_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (2 * self.n + 1) + 8);
        let _ = writeln!(s, "{}", self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    s.push(' ');
                }
                s.push(if self.has_arc(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_matrix_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (lno, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = first.trim().parse().map_err(|_| Error::Parse {
            line: lno + 1,
            msg: format!("expected unit count, got {first:?}"),
        })?;
        let mut g = Self::empty(n);
        let mut row = 0;
        for (lno, line) in lines {
            if row >= n {
                return Err(Error::Parse {
                    line: lno + 1,
                    msg: "more rows than units".into(),
                });
            }
            let mut col = 0;
            for tok in line.split_whitespace() {
                if col >= n {
                    return Err(Error::Parse {
                        line: lno + 1,
                        msg: format!("more than {n} entries"),
                    });
                }
                match tok {
                    "0" => {}
                    "1" if row == col => {
                        return Err(Error::Parse {
                            line: lno + 1,
                            msg: format!("self-link at unit {}", row + 1),
                        })
                    }
                    "1" => g.set(row, col, true),
                    other => {
                        return Err(Error::Parse {
                            line: lno + 1,
                            msg: format!("expected 0 or 1, got {other:?}"),
                        })
                    }
                }
                col += 1;
            }
            if col != n {
                return Err(Error::Parse {
                    line: lno + 1,
                    msg: format!("expected {n} entries, got {col}"),
                });
            }
            row += 1;
        }
        if row != n {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {n} rows, got {row}"),
            });
        }
        Ok(g)
    }

    /// Arc-list text: a `# n <units>` header followed by one `i j` line per
    /// arc, 1-based.
    pub fn to_arc_list_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# n {}", self.n);
        for (i, j) in self.arcs() {
            let _ = writeln!(s, "{} {}", i + 1, j + 1);
        }
        s
    }

    /// Parses an arc list. Without a `# n <units>` header the unit count is
    /// the largest index seen.
    pub fn parse_arc_list_text(text: &str) -> Result<Self> {
        let mut n_header = None;
        let mut arcs = Vec::new();
        for (lno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut toks = rest.split_whitespace();
                if toks.next() == Some("n") {
                    let v = toks.next().and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                        line: lno + 1,
                        msg: "malformed `# n` header".into(),
                    })?;
                    n_header = Some(v);
                }
                continue;
            }
            let mut toks = line.split_whitespace();
            let mut next_index = || -> Result<usize> {
                let t = toks.next().ok_or(Error::Parse {
                    line: lno + 1,
                    msg: "expected `i j`".into(),
                })?;
                match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::Parse {
                        line: lno + 1,
                        msg: format!("bad 1-based index {t:?}"),
                    }),
                }
            };
            let i = next_index()?;
            let j = next_index()?;
            if i == j {
                return Err(Error::Parse {
                    line: lno + 1,
                    msg: format!("self-link at unit {}", i + 1),
                });
            }
            arcs.push((i, j));
        }
        let max_seen = arcs.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
        let n = match n_header {
            Some(n) if n < max_seen => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("index {max_seen} exceeds declared n = {n}"),
                })
            }
            Some(n) => n,
            None => max_seen,
        };
        Self::from_arcs(n, arcs)
    }
}

/// Uniformly random ordered off-diagonal pair.
#[inline]
pub fn random_dyad<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Arcs divided by `n^2 - n`; errors for fewer than two units.
pub fn density(g: &DirectedGraph) -> Result<f64> {
    if g.n() < 2 {
        return Err(Error::Domain(format!("density needs n >= 2, got {}", g.n())));
    }
    Ok(g.density())
}

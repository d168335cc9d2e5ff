//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triadgen::{BlockType, DirectedGraph, Image, TriadType};

pub fn random_graph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    DirectedGraph::from_arcs(n, arcs).unwrap()
}

/// Triad type from dyad counts and orientation rules, without lookup tables.
pub fn classify_by_rules(g: &DirectedGraph, v: [usize; 3]) -> TriadType {
    let e = |x: usize, y: usize| g.has_arc(v[x], v[y]);
    let (mut m, mut a) = (0, 0);
    for (x, y) in [(0, 1), (0, 2), (1, 2)] {
        match (e(x, y), e(y, x)) {
            (true, true) => m += 1,
            (false, false) => {}
            _ => a += 1,
        }
    }
    let outd = |x: usize| (0..3).filter(|&y| y != x && e(x, y)).count();
    let ind = |x: usize| (0..3).filter(|&y| y != x && e(y, x)).count();
    use TriadType::*;
    match (m, a) {
        (0, 0) => T003,
        (0, 1) => T012,
        (1, 0) => T102,
        (0, 2) => {
            if (0..3).any(|x| outd(x) == 2) {
                T021D
            } else if (0..3).any(|x| ind(x) == 2) {
                T021U
            } else {
                T021C
            }
        }
        (1, 1) => {
            // The unit outside the mutual dyad either sends into it (D) or
            // receives from it (U).
            let third = (0..3).find(|&x| (0..3).all(|y| y == x || !(e(x, y) && e(y, x)))).unwrap();
            if outd(third) == 1 {
                T111D
            } else {
                T111U
            }
        }
        (0, 3) => {
            if (0..3).any(|x| outd(x) == 2) {
                T030T
            } else {
                T030C
            }
        }
        (2, 0) => T201,
        (1, 2) => {
            let third = (0..3).find(|&x| (0..3).all(|y| y == x || !(e(x, y) && e(y, x)))).unwrap();
            match outd(third) {
                2 => T120D,
                0 => T120U,
                _ => T120C,
            }
        }
        (2, 1) => T210,
        (3, 0) => T300,
        _ => unreachable!(),
    }
}

pub fn brute_census(g: &DirectedGraph) -> [u64; 16] {
    let mut c = [0u64; 16];
    let n = g.n();
    for a in 0..n {
        for b in a + 1..n {
            for d in b + 1..n {
                c[classify_by_rules(g, [a, b, d]).index()] += 1;
            }
        }
    }
    c
}

/// Sequences of three distinct arcs `(a,b), (b,c), (c,d)`.
pub fn brute_3paths(g: &DirectedGraph) -> u64 {
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let mut count = 0;
    for &e1 in &arcs {
        for &e2 in arcs.iter().filter(|e| e.0 == e1.1) {
            for &e3 in arcs.iter().filter(|e| e.0 == e2.1) {
                if e1 != e2 && e2 != e3 && e1 != e3 {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Criterion computed slot by slot.
pub fn brute_criterion(g: &DirectedGraph, assign: &[usize], image: &Image) -> u64 {
    let n = g.n();
    let mut e = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let complete = image.get(assign[i], assign[j]) == BlockType::Complete;
            if complete != g.has_arc(i, j) {
                e += 1;
            }
        }
    }
    e
}

/// Minimum criterion over every partition into `k` non-empty clusters.
pub fn brute_best(g: &DirectedGraph, image: &Image) -> u64 {
    let n = g.n();
    let k = image.k();
    let mut assign = vec![0usize; n];
    let mut best = u64::MAX;
    loop {
        let mut used = vec![false; k];
        assign.iter().for_each(|&c| used[c] = true);
        if used.iter().all(|&u| u) {
            best = best.min(brute_criterion(g, &assign, image));
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

pub fn image_from_bits(k: usize, bits: u32) -> Image {
    let mut img = Image::filled(k, BlockType::Null);
    for r in 0..k {
        for s in 0..k {
            if bits >> (r * k + s) & 1 == 1 {
                img.set(r, s, BlockType::Complete);
            }
        }
    }
    img
}

mod common;

use common::classify_by_rules;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triadgen::blockmodel::{
    block_type_densities, build_ideal, perturb, randomize_total, relocation_count,
};
use triadgen::fit::fit_prespecified;
use triadgen::triad::triad_census;
use triadgen::{BlockmodelKind, BlockmodelSpec, DirectedGraph, LevelOfErrors, TriadType};

fn cohesive888() -> BlockmodelSpec {
    BlockmodelSpec::new(BlockmodelKind::Cohesive, vec![8, 8, 8]).unwrap()
}

/// log C(a, b)
fn ln_choose(a: u64, b: u64) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    let lg = |x: u64| (1..=x).map(|v| (v as f64).ln()).sum::<f64>();
    lg(a) - lg(b) - lg(a - b)
}

/// Exact expected census of a digraph with `m` arcs placed uniformly among
/// the `n(n-1)` slots: each 6-slot pattern with `j` arcs has probability
/// C(N-6, m-j) / C(N, m).
fn uniform_census_expectation(n: usize, m: usize) -> [f64; 16] {
    let slots = (n * (n - 1)) as u64;
    let triples = (n * (n - 1) * (n - 2) / 6) as f64;
    let mut out = [0.0; 16];
    for code in 0u8..64 {
        let j = code.count_ones() as u64;
        let p = (ln_choose(slots - 6, m as u64 - j) - ln_choose(slots, m as u64)).exp();
        let arcs = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]
            .into_iter()
            .enumerate()
            .filter(|(b, _)| code >> b & 1 == 1)
            .map(|(_, a)| a);
        let g = DirectedGraph::from_arcs(3, arcs).unwrap();
        out[classify_by_rules(&g, [0, 1, 2]).index()] += triples * p;
    }
    out
}

#[test]
fn relocation_counts() {
    let le = |v| LevelOfErrors::new(v).unwrap();
    assert_eq!(relocation_count(168, 24, le(1.0)).unwrap(), 117);
    assert_eq!(relocation_count(184, 24, le(0.5)).unwrap(), 61);
    for m in [10, 100, 300] {
        assert_eq!(relocation_count(m, 24, LevelOfErrors::IDEAL).unwrap(), 0);
    }
}

#[test]
fn total_randomization_equalizes_block_densities() {
    let spec = cohesive888();
    let ideal = build_ideal(&spec);
    let p = spec.canonical_partition();
    let reps = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut c, mut nl) = (0.0, 0.0);
    for _ in 0..reps {
        let g = perturb(&ideal, &spec, LevelOfErrors::RANDOM, &mut rng).unwrap();
        let (cd, nd) = block_type_densities(&g, &p, spec.image());
        c += cd.unwrap();
        nl += nd.unwrap();
    }
    let d = 168.0 / 552.0;
    assert!((c / reps as f64 - d).abs() < 0.01, "complete {}", c / reps as f64);
    assert!((nl / reps as f64 - d).abs() < 0.01, "null {}", nl / reps as f64);
}

#[test]
fn quarter_errors_complete_density() {
    let spec = cohesive888();
    let ideal = build_ideal(&spec);
    let g = perturb(&ideal, &spec, LevelOfErrors::new(0.25).unwrap(), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let (cd, _) = block_type_densities(&g, &spec.canonical_partition(), spec.image());
    assert!((cd.unwrap() - (1.0 - 0.25 * (1.0 - 0.3043))).abs() < 0.01);
}

#[test]
fn total_randomization_matches_uniform_census() {
    let spec = cohesive888();
    let ideal = build_ideal(&spec);
    let expected = uniform_census_expectation(24, 168);
    let reps = 5000;
    let mut sums = [0u64; 16];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..reps {
        let g = randomize_total(&ideal, &spec, &mut rng).unwrap();
        assert_eq!(g.arc_count(), 168);
        for (s, c) in sums.iter_mut().zip(triad_census(&g).unwrap().counts()) {
            *s += c;
        }
    }
    for t in TriadType::ALL {
        let mean = sums[t.index()] as f64 / reps as f64;
        let e = expected[t.index()];
        assert!((mean - e).abs() / e < 0.05, "{t}: {mean} vs {e}");
    }
}

#[test]
fn randomization_is_seeded() {
    let spec = cohesive888();
    let ideal = build_ideal(&spec);
    let a = randomize_total(&ideal, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let b = randomize_total(&ideal, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mean_criterion_grows_with_errors() {
    let spec = cohesive888();
    let ideal = build_ideal(&spec);
    let mut prev = -1.0;
    for (g, le) in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0].into_iter().enumerate() {
        let le = LevelOfErrors::new(le).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10 + g as u64);
        let reps = 20;
        let mean = (0..reps)
            .map(|_| {
                let net = perturb(&ideal, &spec, le, &mut rng).unwrap();
                fit_prespecified(&net, spec.image(), 10, &mut rng).unwrap().criterion as f64
            })
            .sum::<f64>()
            / reps as f64;
        assert!(mean >= prev, "le {}: {mean} < {prev}", le.value());
        prev = mean;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perturb_keeps_arcs_and_diagonal(k in 0usize..7, le in 0.0f64..=1.0, seed in any::<u64>()) {
        let spec = BlockmodelSpec::with_default_sizes(BlockmodelKind::ALL[k]);
        let ideal = build_ideal(&spec);
        let g = perturb(&ideal, &spec, LevelOfErrors::new(le).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(g.arc_count(), ideal.arc_count());
        prop_assert!((0..g.n()).all(|i| !g.has_arc(i, i)));
        let moved = ideal.arcs().filter(|&(i, j)| !g.has_arc(i, j)).count();
        prop_assert_eq!(moved, relocation_count(ideal.arc_count(), ideal.n(), LevelOfErrors::new(le).unwrap()).unwrap());
    }
}

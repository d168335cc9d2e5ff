mod common;

use common::random_graph;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triadgen::blockmodel::{build_ideal, randomize_total, randomize_uniform};
use triadgen::ergm::{
    batch_mean_density, calibrate_edge, log_score_delta, mcmc_generate, mcmc_run, CalibrationConfig, Move,
    SamplerConfig, ScoreModel,
};
use triadgen::fit::fit_prespecified;
use triadgen::rl::{deviation, rl_generate};
use triadgen::terms::{evaluate, preset};
use triadgen::{BlockmodelKind, BlockmodelSpec, DirectedGraph, Statistic, TermSet, TermSetName, TriadType};

fn score(model: &ScoreModel, g: &DirectedGraph) -> f64 {
    let vals = evaluate(g, model.terms.terms()).unwrap();
    let s: f64 = vals.iter().zip(model.terms.weights()).map(|(&v, &w)| v as f64 * w).sum();
    if model.density_fixed {
        s
    } else {
        s + model.edge_weight * g.arc_count() as f64
    }
}

fn stat_strategy() -> impl Strategy<Value = Vec<Statistic>> {
    prop::sample::subsequence(
        TriadType::ALL
            .iter()
            .map(|&t| Statistic::Triad(t))
            .chain([Statistic::ThreePaths])
            .collect::<Vec<_>>(),
        1..6,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rl_accepts_only_strict_decreases(
        n in 4usize..12, p in 0.1f64..0.9, gs in any::<u64>(), ts in any::<u64>(),
        stats in stat_strategy(), seed in any::<u64>(),
    ) {
        let init = random_graph(n, p, gs);
        prop_assume!(init.arc_count() > 0 && init.arc_count() < init.slot_count());
        let target = random_graph(n, p, ts);
        let terms = TermSet::from_reference(stats, &target).unwrap();
        let (out, trace) = rl_generate(&terms, &init, 400, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(out.arc_count(), init.arc_count());
        let mut prev = trace.initial_deviation;
        for e in &trace.entries {
            if e.accepted {
                prop_assert!(e.deviation < prev);
            } else {
                prop_assert_eq!(e.deviation, prev);
            }
            prev = e.deviation;
        }
        let recomputed = deviation(&evaluate(&out, terms.terms()).unwrap(), terms.targets()).unwrap();
        prop_assert_eq!(recomputed, trace.final_deviation());
        let again = rl_generate(&terms, &init, 400, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(again.0, out);
    }

    #[test]
    fn score_delta_matches_full_recount(
        n in 3usize..10, p in 0.0f64..1.0, gs in any::<u64>(), stats in stat_strategy(),
        w in prop::collection::vec(-3.0f64..3.0, 6), ew in -2.0f64..2.0,
        a in any::<usize>(), b in any::<usize>(),
    ) {
        let g = random_graph(n, p, gs);
        let (i, j) = (a % n, b % n);
        prop_assume!(i != j);
        let k = stats.len();
        let terms = TermSet::new(stats, vec![0; k], w[..k].to_vec()).unwrap();
        let model = ScoreModel::free(terms, ew);
        let d = log_score_delta(&model, &g, Move::Toggle(i, j)).unwrap();
        let mut h = g.clone();
        h.toggle(i, j).unwrap();
        prop_assert!((d - (score(&model, &h) - score(&model, &g))).abs() < 1e-9);
        let back = log_score_delta(&model, &h, Move::Toggle(i, j)).unwrap();
        prop_assert!((d + back).abs() < 1e-9);
    }

    #[test]
    fn relocation_delta_matches_full_recount(
        n in 4usize..10, p in 0.1f64..0.9, gs in any::<u64>(), stats in stat_strategy(),
        w in prop::collection::vec(-3.0f64..3.0, 6), seed in any::<u64>(),
    ) {
        let g = random_graph(n, p, gs);
        prop_assume!(g.arc_count() > 0 && g.arc_count() < g.slot_count());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let remove = g.random_arc(&mut rng).unwrap();
        let add = g.random_free_slot(&mut rng).unwrap();
        let k = stats.len();
        let model = ScoreModel::fixed(TermSet::new(stats, vec![0; k], w[..k].to_vec()).unwrap());
        let d = log_score_delta(&model, &g, Move::Relocate { remove, add }).unwrap();
        let mut h = g.clone();
        h.remove_arc(remove.0, remove.1).unwrap();
        h.add_arc(add.0, add.1).unwrap();
        prop_assert!((d - (score(&model, &h) - score(&model, &g))).abs() < 1e-9);
        let back = log_score_delta(&model, &h, Move::Relocate { remove: add, add: remove }).unwrap();
        prop_assert!((d + back).abs() < 1e-9);
    }

    #[test]
    fn samplers_respect_structure(n in 3usize..10, p in 0.1f64..0.9, gs in any::<u64>(), seed in any::<u64>()) {
        let init = random_graph(n, p, gs);
        prop_assume!(init.arc_count() > 0 && init.arc_count() < init.slot_count());
        let terms = TermSet::new(vec![Statistic::Triad(TriadType::T030T)], vec![0], vec![1.0]).unwrap();
        let fixed = mcmc_generate(&ScoreModel::fixed(terms.clone()), &SamplerConfig { steps: 500, init: init.clone() }, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(fixed.graph.arc_count(), init.arc_count());
        let free = mcmc_generate(&ScoreModel::free(terms, -0.5), &SamplerConfig { steps: 500, init }, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!((0..n).all(|i| !free.graph.has_arc(i, i)));
    }
}

#[test]
fn rl_forbidden_targets_reduce_forbidden_counts() {
    let spec = BlockmodelSpec::with_default_sizes(BlockmodelKind::Cohesive);
    let terms = preset(&spec, TermSetName::Forbidden).unwrap();
    let ideal = build_ideal(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let init = randomize_total(&ideal, &spec, &mut rng).unwrap();
    let (out, _) = rl_generate(&terms, &init, 50_000, &mut rng).unwrap();
    let before: i64 = evaluate(&init, terms.terms()).unwrap().iter().sum();
    let after: i64 = evaluate(&out, terms.terms()).unwrap().iter().sum();
    assert!(after < before, "{after} !< {before}");
}

#[test]
fn rl_reaches_asymmetric_core_periphery_targets() {
    let spec = BlockmodelSpec::with_default_sizes(BlockmodelKind::CorePeripheryAsymmetric);
    let terms = preset(&spec, TermSetName::All).unwrap();
    let ideal = build_ideal(&spec);
    let close = (0..50u64)
        .filter(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + s);
            let init = randomize_total(&ideal, &spec, &mut rng).unwrap();
            let (_, trace) = rl_generate(&terms, &init, 200_000, &mut rng).unwrap();
            trace.final_deviation() <= 0.01 * trace.initial_deviation
        })
        .count();
    assert!(close >= 45, "{close}/50 runs reached 1% of the initial deviation");
}

#[test]
fn rl_output_beats_its_randomization() {
    for kind in BlockmodelKind::ALL {
        if kind == BlockmodelKind::HierarchicalNoDiag {
            continue;
        }
        let spec = BlockmodelSpec::with_default_sizes(kind);
        let terms = preset(&spec, TermSetName::All).unwrap();
        let ideal = build_ideal(&spec);
        let runs = 20;
        let better = (0..runs)
            .filter(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(77 + s);
                let init = randomize_total(&ideal, &spec, &mut rng).unwrap();
                let (out, _) = rl_generate(&terms, &init, 200_000, &mut rng).unwrap();
                let rand = randomize_uniform(&out, &mut rng);
                let pm = fit_prespecified(&out, spec.image(), 20, &mut rng).unwrap().criterion;
                let pr = fit_prespecified(&rand, spec.image(), 20, &mut rng).unwrap().criterion;
                pm < pr
            })
            .count();
        assert!(better * 10 >= runs as usize * 9, "{kind}: {better}/{runs}");
    }
}

#[test]
fn zero_weights_give_half_density() {
    let terms = TermSet::new(vec![Statistic::Triad(TriadType::T300)], vec![0], vec![0.0]).unwrap();
    let model = ScoreModel::free(terms, 0.0);
    let mean: f64 = (0..50u64)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let init = random_graph(24, 0.3, s);
            mcmc_generate(&model, &SamplerConfig { steps: 100_000, init }, &mut rng).unwrap().graph.density()
        })
        .sum::<f64>()
        / 50.0;
    assert!((mean - 0.5).abs() <= 0.02, "{mean}");
}

#[test]
fn fixed_mode_matches_conditional_distribution() {
    // n = 4 with exactly 3 arcs: 220 states, weights on 030T and 102.
    let slots: Vec<(usize, usize)> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let terms = TermSet::new(
        vec![Statistic::Triad(TriadType::T030T), Statistic::Triad(TriadType::T021C)],
        vec![0, 0],
        vec![1.2, -0.8],
    )
    .unwrap();
    let model = ScoreModel::fixed(terms);
    let code = |g: &DirectedGraph| slots.iter().enumerate().filter(|(_, &(i, j))| g.has_arc(i, j)).fold(0usize, |c, (b, _)| c | 1 << b);
    let mut exact = vec![0.0; 1 << 12];
    for (s, p) in exact.iter_mut().enumerate() {
        if s.count_ones() == 3 {
            let g = DirectedGraph::from_arcs(4, slots.iter().enumerate().filter(|(b, _)| s >> b & 1 == 1).map(|(_, &a)| a)).unwrap();
            *p = score(&model, &g).exp();
        }
    }
    let z: f64 = exact.iter().sum();
    exact.iter_mut().for_each(|p| *p /= z);
    let steps = 1_000_000;
    let mut counts = vec![0u64; 1 << 12];
    let init = DirectedGraph::from_arcs(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    mcmc_run(&model, &SamplerConfig { steps, init }, &mut ChaCha8Rng::seed_from_u64(5), |g| counts[code(g)] += 1).unwrap();
    let tv: f64 = 0.5 * counts.iter().zip(&exact).map(|(&c, &p)| (c as f64 / steps as f64 - p).abs()).sum::<f64>();
    assert!(tv < 0.02, "total variation {tv}");
}

#[test]
fn calibration_of_independent_dyads_hits_logit() {
    let spec = BlockmodelSpec::new(BlockmodelKind::Cohesive, vec![8, 8, 8]).unwrap();
    let terms = TermSet::new(vec![Statistic::Triad(TriadType::T300)], vec![0], vec![0.0]).unwrap();
    let model = ScoreModel::free(terms, 0.0);
    let cfg = CalibrationConfig::default();
    let cal = calibrate_edge(&model, &spec, &cfg, 3).unwrap();
    assert!((cal.target_density - 0.3043).abs() < 1e-4);
    assert!((cal.edge_weight - (-0.827)).abs() < 0.05, "{}", cal.edge_weight);
    assert!((cal.mean_density - cal.target_density).abs() <= 0.05);
    let again = calibrate_edge(&model, &spec, &cfg, 3).unwrap();
    assert_eq!(cal, again);
    let fresh = ScoreModel { edge_weight: cal.edge_weight, ..model };
    let d = batch_mean_density(&fresh, &spec, 30, cfg.steps, 99).unwrap();
    assert!((d - cal.target_density).abs() <= 0.05);
}

#[test]
fn calibration_rejects_fixed_models() {
    let spec = BlockmodelSpec::with_default_sizes(BlockmodelKind::Cohesive);
    let terms = TermSet::new(vec![Statistic::Triad(TriadType::T300)], vec![0], vec![0.0]).unwrap();
    assert!(calibrate_edge(&ScoreModel::fixed(terms), &spec, &CalibrationConfig::default(), 0).is_err());
}

#[test]
fn mcmc_fixed_asymmetric_core_periphery_beats_randomization() {
    let spec = BlockmodelSpec::with_default_sizes(BlockmodelKind::CorePeripheryAsymmetric);
    let model = ScoreModel::fixed(preset(&spec, TermSetName::All).unwrap());
    let ideal = build_ideal(&spec);
    let better = (0..50u64)
        .filter(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + s);
            let init = randomize_total(&ideal, &spec, &mut rng).unwrap();
            let g = mcmc_generate(&model, &SamplerConfig { steps: 100_000, init }, &mut rng).unwrap().graph;
            let r = randomize_uniform(&g, &mut rng);
            let pm = fit_prespecified(&g, spec.image(), 20, &mut rng).unwrap().criterion;
            let pr = fit_prespecified(&r, spec.image(), 20, &mut rng).unwrap().criterion;
            pm < pr
        })
        .count();
    assert!(better >= 45, "{better}/50");
}

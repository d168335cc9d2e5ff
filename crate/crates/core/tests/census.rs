mod common;

use common::{brute_3paths, brute_census, classify_by_rules, random_graph};
use proptest::prelude::*;
use triadgen::paths::{count_3paths, three_path_delta};
use triadgen::triad::{census_delta, classify_code, triad_census, TriadCensus};
use triadgen::{CensusDelta, DirectedGraph, TriadType};

fn binom3(n: u64) -> u64 {
    n * n.saturating_sub(1) * n.saturating_sub(2) / 6
}

#[test]
fn lookup_table_agrees_with_rules_on_all_codes() {
    for code in 0u8..64 {
        let arcs = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]
            .into_iter()
            .enumerate()
            .filter(|(b, _)| code >> b & 1 == 1)
            .map(|(_, a)| a);
        let g = DirectedGraph::from_arcs(3, arcs).unwrap();
        assert_eq!(classify_code(code), classify_by_rules(&g, [0, 1, 2]), "code {code}");
    }
}

#[test]
fn single_triads_from_labels() {
    use TriadType::*;
    let cases: [(&[(usize, usize)], TriadType); 6] = [
        (&[(0, 1), (0, 2)], T021D),
        (&[(1, 0), (2, 0)], T021U),
        (&[(0, 1), (1, 2)], T021C),
        (&[(0, 1), (1, 2), (0, 2)], T030T),
        (&[(0, 1), (1, 2), (2, 0)], T030C),
        (&[(0, 1), (1, 0), (2, 0), (2, 1)], T120D),
    ];
    for (arcs, t) in cases {
        let c = triad_census(&DirectedGraph::from_arcs(3, arcs.iter().copied()).unwrap()).unwrap();
        assert_eq!(c.get(t), 1, "{t}");
        assert_eq!(c.total(), 1);
    }
}

#[test]
fn census_requires_three_units() {
    assert!(triad_census(&DirectedGraph::empty(2)).is_err());
}

#[test]
fn three_path_examples() {
    let chain = DirectedGraph::from_arcs(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    assert_eq!(count_3paths(&chain), 1);
    let back = DirectedGraph::from_arcs(3, [(0, 1), (1, 2), (2, 1)]).unwrap();
    assert_eq!(count_3paths(&back), brute_3paths(&back));
    assert_eq!(count_3paths(&back), 1);
}

fn graph_strategy() -> impl Strategy<Value = DirectedGraph> {
    (3usize..=14, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, s)| random_graph(n, p, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn census_sums_to_triples(g in graph_strategy()) {
        let c = triad_census(&g).unwrap();
        prop_assert_eq!(c.total(), binom3(g.n() as u64));
    }

    #[test]
    fn census_matches_rule_oracle(g in graph_strategy()) {
        prop_assert_eq!(*triad_census(&g).unwrap().counts(), brute_census(&g));
    }

    #[test]
    fn delta_matches_recount(g in graph_strategy(), picks in prop::collection::vec((any::<usize>(), any::<usize>()), 1..20)) {
        let n = g.n();
        let mut g = g;
        let mut census = triad_census(&g).unwrap();
        for (a, b) in picks {
            let (i, j) = (a % n, b % n);
            if i == j {
                continue;
            }
            let add = !g.has_arc(i, j);
            let d = census_delta(&g, i, j, add).unwrap();
            g.toggle(i, j).unwrap();
            census.apply(&d).unwrap();
            prop_assert_eq!(census, triad_census(&g).unwrap());
        }
    }

    #[test]
    fn delta_of_add_then_remove_cancels(g in graph_strategy(), a in any::<usize>(), b in any::<usize>()) {
        let n = g.n();
        let (i, j) = (a % n, b % n);
        prop_assume!(i != j && !g.has_arc(i, j));
        let up = census_delta(&g, i, j, true).unwrap();
        let mut h = g.clone();
        h.add_arc(i, j).unwrap();
        let down = census_delta(&h, i, j, false).unwrap();
        for t in TriadType::ALL {
            prop_assert_eq!(up[t], -down[t]);
        }
        prop_assert_eq!(up, CensusDelta::between(&triad_census(&g).unwrap(), &triad_census(&h).unwrap()));
    }

    #[test]
    fn census_invariant_under_relabelling(g in graph_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(triad_census(&g.permuted(&perm).unwrap()).unwrap(), triad_census(&g).unwrap());
    }

    #[test]
    fn reversal_swaps_up_and_down(g in graph_strategy()) {
        use TriadType::*;
        let c = triad_census(&g).unwrap();
        let r = triad_census(&g.reversed()).unwrap();
        let mirror = |t: TriadType| match t {
            T021D => T021U, T021U => T021D,
            T111D => T111U, T111U => T111D,
            T120D => T120U, T120U => T120D,
            other => other,
        };
        let mut swapped = [0u64; 16];
        for t in TriadType::ALL {
            swapped[mirror(t).index()] = c.get(t);
        }
        prop_assert_eq!(r, TriadCensus::from_counts(swapped));
    }

    #[test]
    fn three_paths_match_enumeration(g in graph_strategy()) {
        prop_assert_eq!(count_3paths(&g), brute_3paths(&g));
    }

    #[test]
    fn three_paths_invariant_under_reversal(g in graph_strategy()) {
        prop_assert_eq!(count_3paths(&g), count_3paths(&g.reversed()));
    }

    #[test]
    fn three_path_delta_matches_recount(g in graph_strategy(), a in any::<usize>(), b in any::<usize>()) {
        let n = g.n();
        let (i, j) = (a % n, b % n);
        prop_assume!(i != j);
        let add = !g.has_arc(i, j);
        let d = three_path_delta(&g, i, j, add).unwrap();
        let mut h = g.clone();
        h.toggle(i, j).unwrap();
        prop_assert_eq!(count_3paths(&g) as i64 + d, count_3paths(&h) as i64);
    }

    #[test]
    fn text_formats_roundtrip(g in graph_strategy()) {
        prop_assert_eq!(&DirectedGraph::parse_matrix_text(&g.to_matrix_text()).unwrap(), &g);
        prop_assert_eq!(&DirectedGraph::parse_arc_list_text(&g.to_arc_list_text()).unwrap(), &g);
    }
}

//! Null networks: edge-rewired variants that keep each edge attached
//! to its hyperlinked source while randomizing the hyperlinking target,
//! and year-jittered variants for robustness checks.

use std::collections::HashSet;

use rand::Rng;

use crate::graph::{ConceptNetwork, NullStanza};
use crate::seeds;

/// Rewire every edge's target once, in deterministic (source, target)
/// order. New targets are drawn uniformly over all nodes, rejecting
/// self-loops and duplicate edges for up to 100 tries before keeping
/// the original target. Sources, weights, node years, and per-source
/// out-degrees are untouched.
pub fn edge_rewire(network: &ConceptNetwork, rng_seed: u64) -> ConceptNetwork {
    let n = network.node_count();
    let mut rng = seeds::rng_for(rng_seed, &["rewire", &network.subject]);
    let mut out = network.clone();
    out.edges.sort_by_key(|e| (e.source, e.target));
    if n >= 2 {
        let mut occupied: HashSet<(usize, usize)> =
            out.edges.iter().map(|e| (e.source, e.target)).collect();
        for i in 0..out.edges.len() {
            let source = out.edges[i].source;
            let original = out.edges[i].target;
            occupied.remove(&(source, original));
            let mut chosen = original;
            for _ in 0..100 {
                let candidate = rng.gen_range(0..n);
                if candidate != source && !occupied.contains(&(source, candidate)) {
                    chosen = candidate;
                    break;
                }
            }
            occupied.insert((source, chosen));
            out.edges[i].target = chosen;
        }
    }
    out.edges.sort_by_key(|e| (e.source, e.target));
    out.null_origin = Some(NullStanza {
        kind: "rewired".into(),
        seed: rng_seed,
    });
    out
}

/// Add -1, 0, or +1 (each with probability 1/3) to every node year.
/// Edge arrival years are derived from node years, so they move with
/// the nodes.
pub fn jitter_years(network: &ConceptNetwork, rng_seed: u64) -> ConceptNetwork {
    let mut rng = seeds::rng_for(rng_seed, &["jitter", &network.subject]);
    let mut out = network.clone();
    for node in &mut out.nodes {
        node.year += rng.gen_range(-1..=1);
    }
    out.null_origin = Some(NullStanza {
        kind: "jittered".into(),
        seed: rng_seed,
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::network_from_parts;
    use std::collections::{BTreeMap, HashMap};

    #[test]
    fn two_node_single_edge_unchanged() {
        let net = network_from_parts(&[("a", 1), ("b", 2)], &[(0, 1)]);
        for seed in 0..20 {
            let rewired = edge_rewire(&net, seed);
            assert_eq!(rewired.edges.len(), 1);
            assert_eq!(rewired.edges[0].source, 0);
            assert_eq!(rewired.edges[0].target, 1);
        }
    }

    fn random_net(seed: u64, n: usize, extra_hub_edges: usize) -> ConceptNetwork {
        use rand::Rng;
        let mut rng = crate::seeds::rng_for(seed, &["null-fixture"]);
        let nodes: Vec<(String, i64)> = (0..n)
            .map(|i| (format!("n{i:03}"), 1800 + rng.gen_range(0..200)))
            .collect();
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let mut edges = HashSet::new();
        for _ in 0..(3 * n) {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            if s != t {
                edges.insert((s, t));
            }
        }
        // hub to make the in-degree distribution heavy
        for t in 1..=extra_hub_edges.min(n - 1) {
            edges.insert((t, 0));
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        network_from_parts(&refs, &edges)
    }

    #[test]
    fn rewire_preserves_counts_and_out_degrees() {
        let net = random_net(2, 40, 20);
        let out_degree = |n: &ConceptNetwork| -> BTreeMap<usize, usize> {
            let mut d = BTreeMap::new();
            for e in &n.edges {
                *d.entry(e.source).or_insert(0) += 1;
            }
            d
        };
        let weights = |n: &ConceptNetwork| -> Vec<f64> {
            let mut w: Vec<f64> = n.edges.iter().map(|e| e.weight).collect();
            w.sort_by(|a, b| a.partial_cmp(b).unwrap());
            w
        };
        for seed in 0..50 {
            let rewired = edge_rewire(&net, seed);
            assert_eq!(rewired.edges.len(), net.edges.len());
            assert_eq!(out_degree(&rewired), out_degree(&net));
            assert_eq!(weights(&rewired), weights(&net));
            assert_eq!(rewired.nodes, net.nodes);
            assert_eq!(rewired.null_origin.as_ref().unwrap().seed, seed);
        }
    }

    #[test]
    fn rewire_no_self_loops_or_duplicates_many_seeds() {
        let net = random_net(3, 200, 150);
        for seed in 0..200 {
            let rewired = edge_rewire(&net, seed);
            let mut seen = HashSet::new();
            for e in &rewired.edges {
                assert_ne!(e.source, e.target, "self-loop at seed {seed}");
                assert!(seen.insert((e.source, e.target)), "duplicate at seed {seed}");
            }
        }
    }

    #[test]
    fn rewire_changes_in_degree_distribution_on_hub_graph() {
        // hub-heavy graph: the original in-degree mass concentrates on
        // node 0; rewired targets spread out
        let net = random_net(4, 120, 100);
        let in_deg = |n: &ConceptNetwork| -> Vec<usize> {
            let mut d = vec![0usize; n.node_count()];
            for e in &n.edges {
                d[e.target] += 1;
            }
            d
        };
        let orig_max = *in_deg(&net).iter().max().unwrap();
        let mut reduced = 0;
        for seed in 0..50 {
            let rewired = edge_rewire(&net, seed);
            if *in_deg(&rewired).iter().max().unwrap() < orig_max / 2 {
                reduced += 1;
            }
        }
        assert!(reduced >= 45, "hub survived rewiring in {}/50 runs", 50 - reduced);
    }

    #[test]
    fn rewire_different_seeds_differ() {
        let net = random_net(5, 30, 10);
        let mut distinct = HashSet::new();
        for seed in 0..20 {
            let rewired = edge_rewire(&net, seed);
            let sig: Vec<(usize, usize)> =
                rewired.edges.iter().map(|e| (e.source, e.target)).collect();
            distinct.insert(sig);
        }
        assert!(distinct.len() > 1);
    }

    #[test]
    fn rewire_is_deterministic_per_seed() {
        let net = random_net(6, 30, 10);
        assert_eq!(edge_rewire(&net, 9), edge_rewire(&net, 9));
    }

    #[test]
    fn jitter_bounded_and_reproducible() {
        let net = random_net(7, 50, 0);
        let a = jitter_years(&net, 42);
        let b = jitter_years(&net, 42);
        assert_eq!(a, b);
        for (orig, new) in net.nodes.iter().zip(&a.nodes) {
            assert!((orig.year - new.year).abs() <= 1);
        }
        assert_eq!(a.null_origin.as_ref().unwrap().kind, "jittered");
    }

    #[test]
    fn jitter_mean_absolute_shift_is_two_thirds() {
        let n = 100_000;
        let nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i:06}"), 0)).collect();
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let net = network_from_parts(&refs, &[]);
        let jittered = jitter_years(&net, 1);
        let mean_abs: f64 = jittered
            .nodes
            .iter()
            .map(|node| node.year.unsigned_abs() as f64)
            .sum::<f64>()
            / n as f64;
        assert!((mean_abs - 2.0 / 3.0).abs() < 0.01, "mean |shift| = {mean_abs}");
    }

    /// Average in/out degree match between jittered pairs is trivial;
    /// the rewired match is the Fig. S5 analogue.
    #[test]
    fn rewire_average_degrees_equal_original() {
        let net = random_net(8, 60, 30);
        let rewired = edge_rewire(&net, 3);
        let avg = |edges: usize, nodes: usize| edges as f64 / nodes as f64;
        assert_eq!(
            avg(net.edge_count(), net.node_count()),
            avg(rewired.edge_count(), rewired.node_count())
        );
    }
}

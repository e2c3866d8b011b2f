//! Temporal paradigm structure: one layer per unique year coupled by
//! interslice self-edges, multislice-modularity community detection,
//! membership-change counting, Poisson binary-segmentation
//! changepoints, and the four-epoch signature.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::GrowthFiltration;
use crate::seeds;

/// Default interslice coupling weight.
pub const DEFAULT_OMEGA: f64 = 0.01;
/// Default per-slice resolution.
pub const DEFAULT_GAMMA: f64 = 1.0;
/// Default maximum number of changepoints.
pub const DEFAULT_Q: usize = 3;

/// Layered view of a growth filtration: layer t holds the snapshot at
/// unique year t, and every node is tied to its own copy in the next
/// layer with weight omega.
#[derive(Debug, Clone)]
pub struct MultilayerNetwork {
    pub years: Vec<i64>,
    pub node_count: usize,
    /// Per layer: which global node ids exist there.
    pub present: Vec<Vec<bool>>,
    /// Per layer: undirected skeleton edges (u, v, w) with u < v.
    pub intra: Vec<Vec<(usize, usize, f64)>>,
    pub omega: f64,
}

/// One layer per unique year; nested node sets; interslice identity
/// edges between consecutive layers only.
pub fn build_multilayer(filtration: &GrowthFiltration, omega: f64) -> MultilayerNetwork {
    let network = filtration.network;
    let n = network.node_count();
    let years = filtration.years.clone();
    let skeleton: Vec<((usize, usize), f64, i64)> = {
        let mut skel: BTreeMap<(usize, usize), (f64, i64)> = BTreeMap::new();
        for (e, &arrival) in network.edges.iter().zip(&filtration.edge_arrival) {
            let key = (e.source.min(e.target), e.source.max(e.target));
            let entry = skel.entry(key).or_insert((0.0, arrival));
            entry.0 += e.weight;
            entry.1 = entry.1.max(arrival);
        }
        skel.into_iter().map(|(k, (w, a))| (k, w, a)).collect()
    };
    let mut present = Vec::with_capacity(years.len());
    let mut intra = Vec::with_capacity(years.len());
    for &year in &years {
        present.push(
            (0..n)
                .map(|i| network.nodes[i].year <= year)
                .collect::<Vec<bool>>(),
        );
        intra.push(
            skeleton
                .iter()
                .filter(|&&(_, _, arrival)| arrival <= year)
                .map(|&((u, v), w, _)| (u, v, w))
                .collect::<Vec<(usize, usize, f64)>>(),
        );
    }
    MultilayerNetwork {
        years,
        node_count: n,
        present,
        intra,
        omega,
    }
}

/// Module labels per (layer, node); `None` for nodes not yet born.
pub type LayerLabels = Vec<Vec<Option<usize>>>;

struct SupraGraph {
    /// (layer, node) per supra index.
    supra: Vec<(usize, usize)>,
    /// Intra-layer weighted adjacency per supra node.
    adj: Vec<Vec<(usize, f64)>>,
    /// Coupled copies (previous/next layer) per supra node.
    coupled: Vec<Vec<usize>>,
    /// Weighted intra-layer strength per supra node.
    strength: Vec<f64>,
    /// Layer of each supra node.
    layer: Vec<usize>,
    /// 2 * total layer weight per layer (2 m_s).
    two_m: Vec<f64>,
    /// 2 * mu, the multislice normalization.
    two_mu: f64,
    omega: f64,
    gamma: f64,
}

impl SupraGraph {
    fn new(ml: &MultilayerNetwork, gamma: f64) -> SupraGraph {
        let mut supra = Vec::new();
        let mut index = HashMap::new();
        for (s, present) in ml.present.iter().enumerate() {
            for (i, &here) in present.iter().enumerate() {
                if here {
                    index.insert((s, i), supra.len());
                    supra.push((s, i));
                }
            }
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); supra.len()];
        let mut strength = vec![0.0; supra.len()];
        let mut two_m = vec![0.0; ml.years.len()];
        for (s, edges) in ml.intra.iter().enumerate() {
            for &(u, v, w) in edges {
                let a = index[&(s, u)];
                let b = index[&(s, v)];
                adj[a].push((b, w));
                adj[b].push((a, w));
                strength[a] += w;
                strength[b] += w;
                two_m[s] += 2.0 * w;
            }
        }
        let mut coupled: Vec<Vec<usize>> = vec![Vec::new(); supra.len()];
        for (&(s, i), &a) in &index {
            if s + 1 < ml.years.len() {
                if let Some(&b) = index.get(&(s + 1, i)) {
                    coupled[a].push(b);
                    coupled[b].push(a);
                }
            }
        }
        let layer: Vec<usize> = supra.iter().map(|&(s, _)| s).collect();
        let two_mu: f64 = (0..supra.len())
            .map(|a| strength[a] + ml.omega * coupled[a].len() as f64)
            .sum();
        SupraGraph {
            supra,
            adj,
            coupled,
            strength,
            layer,
            two_m,
            two_mu,
            omega: ml.omega,
            gamma,
        }
    }
}

/// One aggregation level of the optimizer: a weighted graph whose
/// positive part combines intra-layer edges and couplings, and whose
/// null part stays factored as per-layer strength products.
struct Level {
    /// Symmetric positive weights, no self entries.
    adj: Vec<HashMap<usize, f64>>,
    /// Per node: intra-layer strength by layer (spans layers after
    /// aggregation).
    strength_by_layer: Vec<HashMap<usize, f64>>,
}

impl Level {
    fn len(&self) -> usize {
        self.adj.len()
    }
}

/// Multislice modularity of a labeling, evaluated naively from the
/// formula: intra-layer terms (adjacency minus the per-layer null) over
/// all same-community node pairs of each layer, plus omega for every
/// same-community coupled copy pair, normalized by 2 mu.
pub fn multislice_modularity(
    ml: &MultilayerNetwork,
    labels: &LayerLabels,
    gamma: f64,
) -> f64 {
    let mut two_mu = 0.0;
    let mut total = 0.0;
    for (s, edges) in ml.intra.iter().enumerate() {
        let nodes: Vec<usize> = (0..ml.node_count).filter(|&i| ml.present[s][i]).collect();
        let mut a = HashMap::new();
        let mut k: HashMap<usize, f64> = HashMap::new();
        let mut two_m = 0.0;
        for &(u, v, w) in edges {
            a.insert((u, v), w);
            a.insert((v, u), w);
            *k.entry(u).or_insert(0.0) += w;
            *k.entry(v).or_insert(0.0) += w;
            two_m += 2.0 * w;
        }
        for &i in &nodes {
            two_mu += k.get(&i).copied().unwrap_or(0.0);
            for &j in &nodes {
                if labels[s][i] == labels[s][j] && labels[s][i].is_some() {
                    let aij = a.get(&(i, j)).copied().unwrap_or(0.0);
                    let null = if two_m == 0.0 {
                        0.0
                    } else {
                        gamma * k.get(&i).copied().unwrap_or(0.0)
                            * k.get(&j).copied().unwrap_or(0.0)
                            / two_m
                    };
                    total += aij - null;
                }
            }
        }
    }
    for s in 0..ml.years.len().saturating_sub(1) {
        for i in 0..ml.node_count {
            if ml.present[s][i] && ml.present[s + 1][i] {
                two_mu += 2.0 * ml.omega;
                if labels[s][i] == labels[s + 1][i] && labels[s][i].is_some() {
                    total += 2.0 * ml.omega;
                }
            }
        }
    }
    if two_mu == 0.0 {
        0.0
    } else {
        total / two_mu
    }
}

/// Result of temporal module detection.
#[derive(Debug, Clone)]
pub struct TemporalModules {
    pub labels: LayerLabels,
    /// The optimizer's internally accumulated modularity.
    pub q: f64,
}

/// Louvain optimization of the multislice modularity on the
/// supra-graph: seeded local moving alternating with community
/// aggregation until a full level yields a gain under 1e-10.
pub fn detect_temporal_modules(
    ml: &MultilayerNetwork,
    gamma: f64,
    rng_seed: u64,
) -> TemporalModules {
    const TOL: f64 = 1e-10;
    let sg = SupraGraph::new(ml, gamma);
    let n = sg.supra.len();
    if n == 0 {
        return TemporalModules {
            labels: vec![vec![None; ml.node_count]; ml.years.len()],
            q: 0.0,
        };
    }
    let mu = sg.two_mu / 2.0;
    // null factor per (node, layer): gamma * k / 2m_s, zero for empty layers
    let null_rate = |layer: usize, k: f64| -> f64 {
        if sg.two_m[layer] == 0.0 {
            0.0
        } else {
            sg.gamma * k / sg.two_m[layer]
        }
    };

    // level 0: supra nodes with combined positive weights
    let mut level = Level {
        adj: (0..n)
            .map(|v| {
                let mut m: HashMap<usize, f64> = HashMap::new();
                for &(u, w) in &sg.adj[v] {
                    *m.entry(u).or_insert(0.0) += w;
                }
                for &u in &sg.coupled[v] {
                    *m.entry(u).or_insert(0.0) += sg.omega;
                }
                m
            })
            .collect(),
        strength_by_layer: (0..n)
            .map(|v| {
                let mut m = HashMap::new();
                if sg.strength[v] != 0.0 {
                    m.insert(sg.layer[v], sg.strength[v]);
                }
                m
            })
            .collect(),
    };

    // membership of each original supra node through the level stack
    let mut assignment: Vec<usize> = (0..n).collect();
    // internal Q for the all-singletons partition: diagonal null terms
    let mut q: f64 = -(0..n)
        .map(|v| null_rate(sg.layer[v], sg.strength[v]) * sg.strength[v])
        .sum::<f64>()
        / sg.two_mu;

    let mut rng = seeds::rng_for(rng_seed, &["temporal-louvain"]);
    loop {
        let m = level.len();
        let mut comm: Vec<usize> = (0..m).collect();
        let mut comm_strength: Vec<HashMap<usize, f64>> = level.strength_by_layer.clone();
        let mut level_gain = 0.0;
        let mut order: Vec<usize> = (0..m).collect();
        loop {
            let mut pass_gain = 0.0;
            order.shuffle(&mut rng);
            for &v in &order {
                let current = comm[v];
                let mut link: BTreeMap<usize, f64> = BTreeMap::new();
                for (&u, &w) in &level.adj[v] {
                    *link.entry(comm[u]).or_insert(0.0) += w;
                }
                link.entry(current).or_insert(0.0);
                let attach = |c: usize, without_self: bool| -> f64 {
                    let mut null = 0.0;
                    for (&s, &k) in &level.strength_by_layer[v] {
                        let mut k_c = comm_strength[c].get(&s).copied().unwrap_or(0.0);
                        if without_self {
                            k_c -= k;
                        }
                        null += null_rate(s, k) * k_c;
                    }
                    link.get(&c).copied().unwrap_or(0.0) - null
                };
                let stay = attach(current, true);
                let mut best_comm = current;
                let mut best_gain = 0.0;
                for (&c, _) in &link {
                    if c == current {
                        continue;
                    }
                    let gain = 2.0 * (attach(c, false) - stay) / sg.two_mu;
                    if gain > best_gain + TOL || (gain > best_gain && c < best_comm) {
                        best_gain = gain;
                        best_comm = c;
                    }
                }
                // isolation: an empty community attaches at zero
                let iso_gain = 2.0 * (0.0 - stay) / sg.two_mu;
                let isolate = iso_gain > best_gain + TOL;
                if isolate {
                    best_gain = iso_gain;
                    comm_strength.push(HashMap::new());
                    comm.push(0); // placeholder slot, never a member
                    best_comm = comm_strength.len() - 1;
                    comm.pop();
                }
                if best_comm != current && best_gain > TOL {
                    for (&s, &k) in &level.strength_by_layer[v] {
                        *comm_strength[current].entry(s).or_insert(0.0) -= k;
                        *comm_strength[best_comm].entry(s).or_insert(0.0) += k;
                    }
                    comm[v] = best_comm;
                    q += best_gain;
                    pass_gain += best_gain;
                }
            }
            if pass_gain < TOL {
                break;
            }
            level_gain += pass_gain;
        }
        if level_gain < TOL {
            break;
        }
        // aggregate communities into the next level
        let mut dense: HashMap<usize, usize> = HashMap::new();
        for &c in &comm {
            let next = dense.len();
            dense.entry(c).or_insert(next);
        }
        let k = dense.len();
        let mut next_adj: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        let mut next_strength: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        for v in 0..m {
            let c = dense[&comm[v]];
            for (&u, &w) in &level.adj[v] {
                let d = dense[&comm[u]];
                if d != c {
                    *next_adj[c].entry(d).or_insert(0.0) += w;
                }
            }
            for (&s, &kv) in &level.strength_by_layer[v] {
                *next_strength[c].entry(s).or_insert(0.0) += kv;
            }
        }
        for a in &mut assignment {
            *a = dense[&comm[*a]];
        }
        if k == m {
            break;
        }
        level = Level {
            adj: next_adj,
            strength_by_layer: next_strength,
        };
    }

    // dense relabeling in (layer, node) scan order
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let mut labels = vec![vec![None; ml.node_count]; ml.years.len()];
    for (a, &(s, i)) in sg.supra.iter().enumerate() {
        let next = dense.len();
        let label = *dense.entry(assignment[a]).or_insert(next);
        labels[s][i] = Some(label);
    }
    TemporalModules { labels, q }
}

/// Membership changes per layer: a node counts at layer t when it
/// exists in both t-1 and t with different labels. Newly born nodes
/// never count; the first layer is zero by definition.
pub fn count_changes(labels: &LayerLabels) -> Vec<u64> {
    let layers = labels.len();
    let mut changes = vec![0u64; layers];
    for t in 1..layers {
        let n = labels[t].len();
        for i in 0..n {
            if let (Some(prev), Some(cur)) = (labels[t - 1][i], labels[t][i]) {
                if prev != cur {
                    changes[t] += 1;
                }
            }
        }
    }
    changes
}

/// Poisson segment cost -sum(y) * ln(mean) + n * mean; zero-mean
/// segments cost nothing.
fn poisson_cost(prefix: &[u64], a: usize, b: usize) -> f64 {
    let total = (prefix[b] - prefix[a]) as f64;
    let n = (b - a) as f64;
    if total == 0.0 {
        return 0.0;
    }
    let lambda = total / n;
    -total * lambda.ln() + n * lambda
}

/// Greedy binary segmentation with the Poisson likelihood cost and a
/// minimum segment length of 2. Ties break to the leftmost split.
pub fn detect_changepoints(signal: &[u64], q: usize) -> Result<Vec<usize>> {
    let min_len = 2 * (q + 1);
    if signal.len() < min_len {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            min: min_len,
        });
    }
    let mut prefix = vec![0u64; signal.len() + 1];
    for (i, &y) in signal.iter().enumerate() {
        prefix[i + 1] = prefix[i] + y;
    }
    let mut boundaries = vec![0usize, signal.len()];
    for _ in 0..q {
        let mut best: Option<(f64, usize)> = None;
        for w in boundaries.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 4 {
                continue;
            }
            let parent = poisson_cost(&prefix, a, b);
            for tau in (a + 2)..=(b - 2) {
                let gain =
                    parent - poisson_cost(&prefix, a, tau) - poisson_cost(&prefix, tau, b);
                if best.map_or(true, |(g, _)| gain > g) {
                    best = Some((gain, tau));
                }
            }
        }
        let Some((_, tau)) = best else {
            break;
        };
        let pos = boundaries.partition_point(|&x| x < tau);
        boundaries.insert(pos, tau);
    }
    Ok(boundaries[1..boundaries.len() - 1].to_vec())
}

/// Mean change count and layer-count duration of one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochSummary {
    pub mean_change: f64,
    pub duration: usize,
}

/// Split a change signal into epochs at the given changepoints.
pub fn epochs_of(signal: &[u64], changepoints: &[usize]) -> Vec<EpochSummary> {
    let mut bounds = vec![0usize];
    bounds.extend_from_slice(changepoints);
    bounds.push(signal.len());
    bounds
        .windows(2)
        .map(|w| {
            let seg = &signal[w[0]..w[1]];
            let mean = if seg.is_empty() {
                0.0
            } else {
                seg.iter().sum::<u64>() as f64 / seg.len() as f64
            };
            EpochSummary {
                mean_change: mean,
                duration: seg.len(),
            }
        })
        .collect()
}

/// Full membership trace of one network.
#[derive(Debug, Clone)]
pub struct MembershipTrace {
    pub years: Vec<i64>,
    pub labels: LayerLabels,
    pub changes: Vec<u64>,
    pub changepoints: Vec<usize>,
    pub epochs: Vec<EpochSummary>,
    pub modularity: f64,
}

/// Detect temporal modules, count membership changes, and segment them
/// into epochs.
pub fn membership_trace(
    filtration: &GrowthFiltration,
    omega: f64,
    gamma: f64,
    q: usize,
    rng_seed: u64,
) -> Result<MembershipTrace> {
    let ml = build_multilayer(filtration, omega);
    let modules = detect_temporal_modules(&ml, gamma, rng_seed);
    let changes = count_changes(&modules.labels);
    let changepoints = detect_changepoints(&changes, q)?;
    let epochs = epochs_of(&changes, &changepoints);
    Ok(MembershipTrace {
        years: ml.years,
        labels: modules.labels,
        changes,
        changepoints,
        epochs,
        modularity: modules.q,
    })
}

/// Arithmetic mean of per-subject epoch summaries, position by position.
pub fn average_signature(per_subject: &[Vec<EpochSummary>]) -> Vec<EpochSummary> {
    if per_subject.is_empty() {
        return Vec::new();
    }
    let epochs = per_subject[0].len();
    (0..epochs)
        .map(|e| {
            let n = per_subject.len() as f64;
            EpochSummary {
                mean_change: per_subject.iter().map(|s| s[e].mean_change).sum::<f64>() / n,
                duration: (per_subject.iter().map(|s| s[e].duration).sum::<usize>() as f64 / n)
                    .round() as usize,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::network_from_parts;
    use crate::graph::ConceptNetwork;
    use crate::metrics;

    #[test]
    fn single_year_single_layer_no_coupling() {
        let net = network_from_parts(&[("a", 5), ("b", 5)], &[(0, 1)]);
        let filt = GrowthFiltration::new(&net);
        let ml = build_multilayer(&filt, 0.01);
        assert_eq!(ml.years, vec![5]);
        assert_eq!(ml.intra.len(), 1);
    }

    #[test]
    fn node_absent_before_birth() {
        let net = network_from_parts(&[("a", 1), ("b", 3)], &[(0, 1)]);
        let filt = GrowthFiltration::new(&net);
        let ml = build_multilayer(&filt, 0.01);
        assert_eq!(ml.years, vec![1, 3]);
        assert!(ml.present[0][0]);
        assert!(!ml.present[0][1]);
        assert!(ml.present[1][1]);
        assert!(ml.intra[0].is_empty());
        assert_eq!(ml.intra[1].len(), 1);
    }

    #[test]
    fn layer_count_equals_unique_years() {
        let net = network_from_parts(
            &[("a", 1), ("b", 3), ("c", 3), ("d", 9)],
            &[(0, 1), (1, 2), (2, 3)],
        );
        let ml = build_multilayer(&GrowthFiltration::new(&net), 0.01);
        assert_eq!(ml.years.len(), 3);
    }

    fn two_triangles() -> ConceptNetwork {
        network_from_parts(
            &[("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1), ("f", 1)],
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)],
        )
    }

    #[test]
    fn single_layer_reduces_to_static_modularity() {
        let net = two_triangles();
        let filt = GrowthFiltration::new(&net);
        let ml = build_multilayer(&filt, 0.01);
        let modules = detect_temporal_modules(&ml, 1.0, 7);
        // same-labels static evaluation agrees with the multislice value
        let static_labels: Vec<usize> = (0..6)
            .map(|i| modules.labels[0][i].unwrap())
            .collect();
        let static_q = metrics::modularity_of(&net, &static_labels).unwrap();
        assert!((modules.q - static_q).abs() < 1e-9);
        assert!((multislice_modularity(&ml, &modules.labels, 1.0) - static_q).abs() < 1e-9);
        // and the optimizer finds the two triangles
        assert!((modules.q - 0.5).abs() < 1e-9);
    }

    #[test]
    fn internal_q_matches_naive_evaluator() {
        use rand::Rng;
        let mut rng = crate::seeds::rng_for(43, &["multislice"]);
        for round in 0..10 {
            let n = 10;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((a, b));
                    }
                }
            }
            let nodes: Vec<(String, i64)> = (0..n)
                .map(|i| (format!("n{i}"), rng.gen_range(0..4)))
                .collect();
            let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
            let net = network_from_parts(&refs, &edges);
            let ml = build_multilayer(&GrowthFiltration::new(&net), 0.01);
            let modules = detect_temporal_modules(&ml, 1.0, round);
            let naive = multislice_modularity(&ml, &modules.labels, 1.0);
            assert!(
                (modules.q - naive).abs() < 1e-9,
                "round {round}: internal {} vs naive {}",
                modules.q,
                naive
            );
        }
    }

    #[test]
    fn strong_coupling_gives_identical_labels_across_layers() {
        // two identical layers, omega large
        let net = network_from_parts(
            &[("a", 1), ("b", 1), ("c", 1), ("d", 2)],
            &[(0, 1), (1, 2), (2, 3), (0, 2)],
        );
        let filt = GrowthFiltration::new(&net);
        let ml = build_multilayer(&filt, 10.0);
        let modules = detect_temporal_modules(&ml, 1.0, 3);
        for i in 0..3 {
            assert_eq!(modules.labels[0][i], modules.labels[1][i], "node {i}");
        }
    }

    #[test]
    fn planted_two_modules_stay_stable_across_layers() {
        // two dense 8-cliques bridged by one edge, constant over 5 layers
        let n = 16;
        let mut edges = Vec::new();
        for a in 0..8 {
            for b in a + 1..8 {
                edges.push((a, b));
                edges.push((a + 8, b + 8));
            }
        }
        edges.push((0, 8));
        let mut nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i:02}"), 1)).collect();
        // five layers from five distinct years on isolated extra nodes
        for y in 2..=5 {
            nodes.push((format!("pad{y}"), y));
        }
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let net = network_from_parts(&refs, &edges);
        let ml = build_multilayer(&GrowthFiltration::new(&net), 0.01);
        assert_eq!(ml.years.len(), 5);
        let mut good_seeds = 0;
        for seed in 0..20 {
            let modules = detect_temporal_modules(&ml, 1.0, seed);
            let changes: u64 = count_changes(&modules.labels).iter().sum();
            if changes <= 1 {
                good_seeds += 1;
            }
        }
        assert!(good_seeds >= 18, "stable in only {good_seeds}/20 seeds");
    }

    #[test]
    fn count_changes_rules() {
        // constant labels -> zeros; one flip -> one unit; births ignored
        let labels: LayerLabels = vec![
            vec![Some(0), Some(1), None],
            vec![Some(0), Some(1), Some(1)],
            vec![Some(0), Some(0), Some(1)],
        ];
        let changes = count_changes(&labels);
        assert_eq!(changes, vec![0, 0, 1]);
        let per_node_flips: u64 = (0..3)
            .map(|i| {
                (1..3)
                    .filter(|&t| {
                        matches!(
                            (labels[t - 1][i], labels[t][i]),
                            (Some(a), Some(b)) if a != b
                        )
                    })
                    .count() as u64
            })
            .sum();
        assert_eq!(changes.iter().sum::<u64>(), per_node_flips);
    }

    #[test]
    fn changepoint_step_signal_splits_at_step() {
        let signal = [1, 1, 1, 1, 9, 9, 9, 9];
        let cps = detect_changepoints(&signal, 3).unwrap();
        assert_eq!(cps.len(), 3);
        assert!(cps.contains(&4), "missing the true step at 4: {cps:?}");
        // exhaustive scan oracle for the first (highest-gain) split
        let mut prefix = vec![0u64; signal.len() + 1];
        for (i, &y) in signal.iter().enumerate() {
            prefix[i + 1] = prefix[i] + y;
        }
        let parent = poisson_cost(&prefix, 0, signal.len());
        let best = (2..=signal.len() - 2)
            .max_by(|&a, &b| {
                let ga = parent - poisson_cost(&prefix, 0, a) - poisson_cost(&prefix, a, 8);
                let gb = parent - poisson_cost(&prefix, 0, b) - poisson_cost(&prefix, b, 8);
                ga.partial_cmp(&gb).unwrap()
            })
            .unwrap();
        assert_eq!(best, 4);
    }

    #[test]
    fn constant_signal_deterministic_leftmost_splits() {
        let signal = [3u64; 10];
        let a = detect_changepoints(&signal, 3).unwrap();
        let b = detect_changepoints(&signal, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vec![2, 4, 6]);
    }

    #[test]
    fn short_signal_is_error() {
        let signal = [1u64; 7];
        assert!(matches!(
            detect_changepoints(&signal, 3),
            Err(Error::SignalTooShort { len: 7, min: 8 })
        ));
    }

    #[test]
    fn total_likelihood_nondecreasing_with_splits() {
        use rand::Rng;
        let mut rng = crate::seeds::rng_for(47, &["loglik"]);
        let signal: Vec<u64> = (0..60).map(|_| rng.gen_range(0..12)).collect();
        let mut prefix = vec![0u64; signal.len() + 1];
        for (i, &y) in signal.iter().enumerate() {
            prefix[i + 1] = prefix[i] + y;
        }
        let cost_of = |cps: &[usize]| -> f64 {
            let mut bounds = vec![0usize];
            bounds.extend_from_slice(cps);
            bounds.push(signal.len());
            bounds
                .windows(2)
                .map(|w| poisson_cost(&prefix, w[0], w[1]))
                .sum()
        };
        let mut last = cost_of(&[]);
        for q in 1..=4 {
            let cps = detect_changepoints(&signal, q).unwrap();
            let cost = cost_of(&cps);
            assert!(cost <= last + 1e-9, "cost rose at q={q}");
            last = cost;
        }
    }

    fn poisson_draw(lambda: f64, rng: &mut rand_chacha::ChaCha8Rng) -> u64 {
        use rand::Rng;
        let l = (-lambda).exp();
        let mut k = 0u64;
        let mut p = 1.0;
        loop {
            p *= rng.gen::<f64>();
            if p <= l {
                return k;
            }
            k += 1;
        }
    }

    #[test]
    fn three_step_poisson_signals_recovered() {
        let rates = [1.0, 5.0, 1.0, 10.0];
        let seg = 25usize;
        let mut hits = 0;
        for seed in 0..100 {
            let mut rng = crate::seeds::rng_for(seed, &["poisson-signal"]);
            let signal: Vec<u64> = rates
                .iter()
                .flat_map(|&r| (0..seg).map(|_| poisson_draw(r, &mut rng)).collect::<Vec<_>>())
                .collect();
            let cps = detect_changepoints(&signal, 3).unwrap();
            let truth = [25usize, 50, 75];
            let ok = truth
                .iter()
                .all(|&t| cps.iter().any(|&c| (c as i64 - t as i64).abs() <= 2));
            if ok {
                hits += 1;
            }
        }
        assert!(hits >= 90, "recovered all three in {hits}/100 runs");
    }

    #[test]
    fn epoch_summaries_exact_arithmetic() {
        let signal = [0u64, 0, 2, 2, 2, 8, 8, 1];
        let epochs = epochs_of(&signal, &[2, 5, 7]);
        assert_eq!(epochs.len(), 4);
        assert_eq!(epochs[0], EpochSummary { mean_change: 0.0, duration: 2 });
        assert_eq!(epochs[1], EpochSummary { mean_change: 2.0, duration: 3 });
        assert_eq!(epochs[2], EpochSummary { mean_change: 8.0, duration: 2 });
        assert_eq!(epochs[3], EpochSummary { mean_change: 1.0, duration: 1 });
    }

    #[test]
    fn signature_of_one_subject_is_itself() {
        let epochs = vec![
            EpochSummary { mean_change: 1.0, duration: 3 },
            EpochSummary { mean_change: 4.0, duration: 2 },
        ];
        let avg = average_signature(&[epochs.clone()]);
        assert_eq!(avg, epochs);
    }

    #[test]
    fn signature_averages_across_subjects() {
        let a = vec![EpochSummary { mean_change: 1.0, duration: 2 }];
        let b = vec![EpochSummary { mean_change: 3.0, duration: 4 }];
        let avg = average_signature(&[a, b]);
        assert_eq!(avg[0].mean_change, 2.0);
        assert_eq!(avg[0].duration, 3);
    }
}

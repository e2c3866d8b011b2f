//! Structural metrics: directed clustering coefficients, greedy
//! modularity maximization, core-periphery assignment by penalized
//! local search, and core-periphery lead-lag statistics.

use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ConceptNetwork, GrowthFiltration};
use crate::seeds;
use crate::stats::{self, Quartiles, TestResult};

/// Node partition with its modularity value.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Community label per node, dense from 0.
    pub labels: Vec<usize>,
    pub q: f64,
}

/// Core-periphery split with the normalized coreness rho / W.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreAssignment {
    pub is_core: Vec<bool>,
    /// Weighted edge mass incident to the core.
    pub rho: f64,
    /// rho over the total edge weight, in [0, 1].
    pub rho_norm: f64,
    /// rho penalized by core size; the local-search objective.
    pub score: f64,
}

/// One core-periphery neighbor pair and its year difference.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadLagEdge {
    pub core_title: String,
    pub periphery_title: String,
    /// year(core) - year(periphery); negative means the core node came first.
    pub delta: f64,
}

/// Lead-lag sample over the core-periphery edges of one network, with
/// quartile fences and a two-sided one-sample t-test against mean 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeadLagReport {
    pub edges: Vec<LeadLagEdge>,
    pub quartiles: Option<Quartiles>,
    pub lower_fence: Option<f64>,
    pub upper_fence: Option<f64>,
    pub t_test: Option<TestResult>,
}

impl LeadLagReport {
    pub fn deltas(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.delta).collect()
    }
}

/// Directed clustering coefficient of one node: all triangle
/// orientations over the symmetrized adjacency, which reduces to
/// 2T(n) / (k (k-1)) on symmetric graphs.
pub fn clustering_coefficient(network: &ConceptNetwork, node: usize) -> Result<f64> {
    if node >= network.node_count() {
        return Err(Error::UnknownNode(node));
    }
    // s[u] = number of directed edges between `node`'s neighborhood pairs
    let n = network.node_count();
    let mut s_row = vec![0u32; n];
    let mut d_out = 0u32;
    let mut d_in = 0u32;
    let mut d_bidir = 0u32;
    let mut directed: HashMap<(usize, usize), ()> = HashMap::new();
    for e in &network.edges {
        directed.insert((e.source, e.target), ());
    }
    for e in &network.edges {
        if e.source == node {
            s_row[e.target] += 1;
            d_out += 1;
            if directed.contains_key(&(e.target, e.source)) {
                d_bidir += 1;
            }
        }
        if e.target == node {
            s_row[e.source] += 1;
            d_in += 1;
        }
    }
    let d_tot = d_in + d_out;
    let denom = 2 * (d_tot as u64 * (d_tot as u64).saturating_sub(1) - 2 * d_bidir as u64);
    if d_tot < 2 || denom == 0 {
        return Ok(0.0);
    }
    // closed 3-walks through `node` in S = A + A^T
    let mut walks = 0u64;
    let neighbors: Vec<usize> = (0..n).filter(|&u| s_row[u] > 0).collect();
    for &j in &neighbors {
        for &k in &neighbors {
            if j == k {
                continue;
            }
            let s_jk = directed.contains_key(&(j, k)) as u32 + directed.contains_key(&(k, j)) as u32;
            walks += (s_row[j] * s_jk * s_row[k]) as u64;
        }
    }
    Ok(walks as f64 / denom as f64)
}

/// Mean and standard deviation of the clustering coefficient over all nodes.
pub fn clustering_summary(network: &ConceptNetwork) -> Result<(f64, f64)> {
    let n = network.node_count();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let values: Vec<f64> = (0..n)
        .map(|i| clustering_coefficient(network, i))
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    Ok((mean, var.sqrt()))
}

/// Modularity of a labeling, evaluated directly from the formula
/// Q = sum_c [ 2 W_c - (K_c / 2m)^2 * 2m ] / 2m on the undirected
/// weighted skeleton. Used as the independent check on the optimizer.
pub fn modularity_of(network: &ConceptNetwork, labels: &[usize]) -> Result<f64> {
    let skel = network.undirected_skeleton();
    let two_m: f64 = 2.0 * skel.values().sum::<f64>();
    if two_m == 0.0 {
        return Err(Error::ModularityUndefined);
    }
    let n_comm = labels.iter().max().map_or(0, |m| m + 1);
    let mut intra = vec![0.0; n_comm];
    let mut degree_sum = vec![0.0; n_comm];
    for (&(u, v), &w) in &skel {
        if labels[u] == labels[v] {
            intra[labels[u]] += w;
        }
        degree_sum[labels[u]] += w;
        degree_sum[labels[v]] += w;
    }
    let q = (0..n_comm)
        .map(|c| 2.0 * intra[c] / two_m - (degree_sum[c] / two_m).powi(2))
        .sum();
    Ok(q)
}

#[derive(PartialEq)]
struct MergeCandidate {
    gain: f64,
    a: usize,
    b: usize,
    version_a: u64,
    version_b: u64,
}

impl Eq for MergeCandidate {}

impl Ord for MergeCandidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max gain first; ties broken toward the smallest label pair
        self.gain
            .partial_cmp(&other.gain)
            .expect("finite gains")
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

impl PartialOrd for MergeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Agglomerative greedy modularity maximization on the undirected
/// weighted skeleton. Merges the community pair with the largest gain
/// until no merge improves Q, breaking ties toward the smallest pair.
pub fn greedy_modularity(network: &ConceptNetwork) -> Result<Partition> {
    let skel = network.undirected_skeleton();
    if skel.is_empty() {
        return Err(Error::ModularityUndefined);
    }
    let n = network.node_count();
    let two_m: f64 = 2.0 * skel.values().sum::<f64>();

    // community state; community id = representative node id
    let mut alive: Vec<bool> = vec![true; n];
    let mut version: Vec<u64> = vec![0; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut degree_sum: Vec<f64> = vec![0.0; n];
    let mut between: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
    for (&(u, v), &w) in &skel {
        degree_sum[u] += w;
        degree_sum[v] += w;
        *between[u].entry(v).or_insert(0.0) += w;
        *between[v].entry(u).or_insert(0.0) += w;
    }

    let gain_of = |w_ab: f64, ka: f64, kb: f64| 2.0 * (w_ab / two_m - (ka / two_m) * (kb / two_m));

    let mut heap: BinaryHeap<MergeCandidate> = BinaryHeap::new();
    for (&(u, v), &w) in &skel {
        heap.push(MergeCandidate {
            gain: gain_of(w, degree_sum[u], degree_sum[v]),
            a: u.min(v),
            b: u.max(v),
            version_a: 0,
            version_b: 0,
        });
    }

    // labels snapshot with the best Q seen along the merge path
    let mut q = -(0..n)
        .map(|i| (degree_sum[i] / two_m).powi(2))
        .sum::<f64>();
    let label_of = |members: &Vec<Vec<usize>>, alive: &Vec<bool>| -> Vec<usize> {
        let mut labels = vec![0usize; n];
        let mut next = 0;
        for c in 0..n {
            if alive[c] && !members[c].is_empty() {
                for &node in &members[c] {
                    labels[node] = next;
                }
                next += 1;
            }
        }
        labels
    };
    let mut best_q = q;
    let mut best_labels = label_of(&members, &alive);

    while let Some(cand) = heap.pop() {
        let MergeCandidate {
            gain,
            a,
            b,
            version_a,
            version_b,
        } = cand;
        if !alive[a] || !alive[b] || version[a] != version_a || version[b] != version_b {
            continue;
        }
        if gain <= 0.0 {
            break;
        }
        // merge b into a
        q += gain;
        alive[b] = false;
        version[a] += 1;
        let b_members = std::mem::take(&mut members[b]);
        members[a].extend(b_members);
        degree_sum[a] += degree_sum[b];
        let b_neighbors = std::mem::take(&mut between[b]);
        between[a].remove(&b);
        for (c, w) in b_neighbors {
            if c == a {
                continue;
            }
            between[c].remove(&b);
            *between[a].entry(c).or_insert(0.0) += w;
            *between[c].entry(a).or_insert(0.0) += w;
        }
        for (&c, &w) in &between[a] {
            if alive[c] {
                heap.push(MergeCandidate {
                    gain: gain_of(w, degree_sum[a], degree_sum[c]),
                    a: a.min(c),
                    b: a.max(c),
                    version_a: version[a.min(c)],
                    version_b: version[a.max(c)],
                });
            }
        }
        if q > best_q {
            best_q = q;
            best_labels = label_of(&members, &alive);
        }
    }

    Ok(Partition {
        labels: best_labels,
        q: best_q,
    })
}

/// Weighted degree per node on the undirected skeleton.
fn skeleton_degrees(network: &ConceptNetwork) -> (Vec<f64>, Vec<Vec<(usize, f64)>>, f64) {
    let skel = network.undirected_skeleton();
    let n = network.node_count();
    let mut degree = vec![0.0; n];
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut total = 0.0;
    for (&(u, v), &w) in &skel {
        degree[u] += w;
        degree[v] += w;
        adj[u].push((v, w));
        adj[v].push((u, w));
        total += w;
    }
    (degree, adj, total)
}

/// One label-swap local search from a random bipartition. Returns the
/// core flags and the score trace, which never decreases.
pub(crate) fn core_periphery_search(
    adj: &[Vec<(usize, f64)>],
    penalty: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<bool>, Vec<f64>) {
    let n = adj.len();
    let mut is_core: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();

    let score_of = |core: &[bool]| -> f64 {
        let mut rho = 0.0;
        for u in 0..n {
            for &(v, w) in &adj[u] {
                if u < v && (core[u] || core[v]) {
                    rho += w;
                }
            }
        }
        rho - core.iter().filter(|&&c| c).count() as f64 * penalty
    };

    let mut score = score_of(&is_core);
    let mut trace = vec![score];
    loop {
        let mut best: Option<(f64, usize)> = None;
        for v in 0..n {
            // weight to periphery neighbors is what flipping v moves in or out
            let boundary: f64 = adj[v]
                .iter()
                .filter(|&&(u, _)| !is_core[u])
                .map(|&(_, w)| w)
                .sum();
            let delta = if is_core[v] {
                penalty - boundary
            } else {
                boundary - penalty
            };
            if delta > 1e-12 && best.map_or(true, |(d, _)| delta > d) {
                best = Some((delta, v));
            }
        }
        match best {
            Some((delta, v)) => {
                is_core[v] = !is_core[v];
                score += delta;
                trace.push(score);
            }
            None => break,
        }
    }
    debug_assert!((score - score_of(&is_core)).abs() < 1e-9);
    (is_core, trace)
}

/// Core-periphery assignment: best of `restarts` penalized local
/// searches. The penalty (the mean weighted degree) keeps the all-core
/// labeling from winning by default.
pub fn core_periphery(network: &ConceptNetwork, rng_seed: u64, restarts: usize) -> Result<CoreAssignment> {
    let (degree, adj, total_weight) = skeleton_degrees(network);
    if total_weight == 0.0 {
        return Err(Error::CorePeripheryUndefined);
    }
    let n = network.node_count();
    let penalty = 2.0 * total_weight / n as f64;

    let mut best: Option<(Vec<bool>, f64)> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = seeds::rng_for(rng_seed, &["core-periphery", &restart.to_string()]);
        let (core, trace) = core_periphery_search(&adj, penalty, &mut rng);
        let score = *trace.last().unwrap();
        if best.as_ref().map_or(true, |(_, s)| score > *s) {
            best = Some((core, score));
        }
    }
    let (mut is_core, mut score) = best.unwrap();

    if !is_core.iter().any(|&c| c) {
        // degenerate optimum: force the heaviest node into the core
        let v = (0..n)
            .max_by(|&a, &b| {
                degree[a]
                    .partial_cmp(&degree[b])
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        is_core[v] = true;
        score = degree[v] - penalty;
    }

    let mut rho = 0.0;
    for u in 0..n {
        for &(v, w) in &adj[u] {
            if u < v && (is_core[u] || is_core[v]) {
                rho += w;
            }
        }
    }
    Ok(CoreAssignment {
        is_core,
        rho,
        rho_norm: rho / total_weight,
        score,
    })
}

/// Lead-lag over every core-periphery neighbor pair of the skeleton.
pub fn lead_lag(network: &ConceptNetwork, assignment: &CoreAssignment) -> LeadLagReport {
    let skel = network.undirected_skeleton();
    let mut edges = Vec::new();
    for &(u, v) in skel.keys() {
        let (core, periph) = match (assignment.is_core[u], assignment.is_core[v]) {
            (true, false) => (u, v),
            (false, true) => (v, u),
            _ => continue,
        };
        edges.push(LeadLagEdge {
            core_title: network.nodes[core].title.clone(),
            periphery_title: network.nodes[periph].title.clone(),
            delta: (network.nodes[core].year - network.nodes[periph].year) as f64,
        });
    }
    summarize_lead_lag(edges)
}

fn summarize_lead_lag(edges: Vec<LeadLagEdge>) -> LeadLagReport {
    if edges.is_empty() {
        return LeadLagReport::default();
    }
    let deltas: Vec<f64> = edges.iter().map(|e| e.delta).collect();
    let quartiles = stats::quartiles(&deltas).ok();
    let (lower, upper) = quartiles.map(|q| q.fences()).unzip();
    let t_test = stats::t_test_one_sample(&deltas, 0.0).ok();
    LeadLagReport {
        edges,
        quartiles,
        lower_fence: lower,
        upper_fence: upper,
        t_test,
    }
}

/// Lead-lag within each module: partition first, then assign cores
/// inside every module's induced subgraph.
pub fn lead_lag_per_module(
    network: &ConceptNetwork,
    rng_seed: u64,
    restarts: usize,
) -> Result<Vec<(usize, LeadLagReport)>> {
    let partition = greedy_modularity(network)?;
    let n_modules = partition.labels.iter().max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    for module in 0..n_modules {
        let keep: Vec<usize> = (0..network.node_count())
            .filter(|&i| partition.labels[i] == module)
            .collect();
        let remap: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut sub = ConceptNetwork {
            subject: network.subject.clone(),
            nodes: keep
                .iter()
                .enumerate()
                .map(|(new, &old)| {
                    let mut node = network.nodes[old].clone();
                    node.id = new;
                    node
                })
                .collect(),
            edges: network
                .edges
                .iter()
                .filter(|e| remap.contains_key(&e.source) && remap.contains_key(&e.target))
                .map(|e| crate::graph::ConceptEdge {
                    source: remap[&e.source],
                    target: remap[&e.target],
                    weight: e.weight,
                })
                .collect(),
            vocab: crate::graph::Vocabulary::default(),
            null_origin: None,
        };
        sub.edges.sort_by_key(|e| (e.source, e.target));
        let seed = seeds::derive_seed(rng_seed, &["module", &module.to_string()]);
        match core_periphery(&sub, seed, restarts) {
            Ok(assignment) => out.push((module, lead_lag(&sub, &assignment))),
            Err(Error::CorePeripheryUndefined) => out.push((module, LeadLagReport::default())),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Lead-lag per epoch and its snapshot year.
#[derive(Debug, Clone)]
pub struct EpochLeadLag {
    pub epoch: usize,
    pub year: i64,
    pub report: LeadLagReport,
}

pub fn epoch_seed(rng_seed: u64, epoch: usize) -> u64 {
    seeds::derive_seed(rng_seed, &["epoch", &epoch.to_string()])
}

/// Lead-lag at `n_epochs` cut years spaced equally in unique-year
/// count. Returns fewer epochs when the filtration has fewer unique
/// years than requested.
pub fn epoch_lead_lag(
    filtration: &GrowthFiltration,
    n_epochs: usize,
    rng_seed: u64,
    restarts: usize,
) -> Result<Vec<EpochLeadLag>> {
    let unique = filtration.years.len();
    if unique == 0 {
        return Ok(Vec::new());
    }
    let epochs = n_epochs.min(unique);
    let mut out = Vec::new();
    for k in 1..=epochs {
        let idx = (k * unique) / epochs - 1;
        let year = filtration.years[idx];
        let snap = filtration.snapshot_at(year);
        let report = match core_periphery(&snap, epoch_seed(rng_seed, k - 1), restarts) {
            Ok(assignment) => lead_lag(&snap, &assignment),
            Err(Error::CorePeripheryUndefined) => LeadLagReport::default(),
            Err(e) => return Err(e),
        };
        out.push(EpochLeadLag {
            epoch: k - 1,
            year,
            report,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::network_from_parts;
    use rand::Rng;

    fn symmetric(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(a, b) in edges {
            out.push((a, b));
            out.push((b, a));
        }
        out
    }

    #[test]
    fn clustering_triangle_is_one() {
        let net = network_from_parts(
            &[("a", 1), ("b", 2), ("c", 3)],
            &symmetric(&[(0, 1), (1, 2), (0, 2)]),
        );
        for i in 0..3 {
            assert!((clustering_coefficient(&net, i).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clustering_path_center_is_zero() {
        let net = network_from_parts(
            &[("a", 1), ("b", 2), ("c", 3)],
            &symmetric(&[(0, 1), (1, 2)]),
        );
        assert_eq!(clustering_coefficient(&net, 1).unwrap(), 0.0);
    }

    #[test]
    fn clustering_unknown_node_errors() {
        let net = network_from_parts(&[("a", 1)], &[]);
        assert!(matches!(
            clustering_coefficient(&net, 5),
            Err(Error::UnknownNode(5))
        ));
    }

    /// Dense-matrix oracle: diagonal of (A + A^T)^3 over the Fagiolo
    /// denominator.
    fn clustering_oracle(net: &ConceptNetwork, node: usize) -> f64 {
        let n = net.node_count();
        let mut a = vec![vec![0.0f64; n]; n];
        for e in &net.edges {
            a[e.source][e.target] = 1.0;
        }
        let mut s = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                s[i][j] = a[i][j] + a[j][i];
            }
        }
        let mul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let mut z = vec![vec![0.0f64; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if x[i][k] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        z[i][j] += x[i][k] * y[k][j];
                    }
                }
            }
            z
        };
        let s3 = mul(&mul(&s, &s), &s);
        let d_tot: f64 = (0..n).map(|j| a[node][j] + a[j][node]).sum();
        let d_bi: f64 = (0..n).map(|j| a[node][j] * a[j][node]).sum();
        let denom = 2.0 * (d_tot * (d_tot - 1.0) - 2.0 * d_bi);
        if denom <= 0.0 {
            0.0
        } else {
            s3[node][node] / denom
        }
    }

    #[test]
    fn clustering_matches_dense_oracle_on_random_digraphs() {
        let mut rng = crate::seeds::rng_for(5, &["clustering"]);
        for _ in 0..30 {
            let n = 7;
            let mut edges = Vec::new();
            for s in 0..n {
                for t in 0..n {
                    if s != t && rng.gen_bool(0.35) {
                        edges.push((s, t));
                    }
                }
            }
            let nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i}"), i as i64)).collect();
            let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
            let net = network_from_parts(&refs, &edges);
            for v in 0..n {
                let got = clustering_coefficient(&net, v).unwrap();
                let want = clustering_oracle(&net, v);
                assert!((got - want).abs() < 1e-12, "node {v}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn modularity_two_triangles() {
        let net = network_from_parts(
            &[("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1), ("f", 1)],
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)],
        );
        let p = greedy_modularity(&net).unwrap();
        assert!((p.q - 0.5).abs() < 1e-12);
        assert_eq!(p.labels[0], p.labels[1]);
        assert_eq!(p.labels[1], p.labels[2]);
        assert_eq!(p.labels[3], p.labels[4]);
        assert_ne!(p.labels[0], p.labels[3]);
        // internal Q agrees with the direct formula
        assert!((modularity_of(&net, &p.labels).unwrap() - p.q).abs() < 1e-12);
    }

    #[test]
    fn modularity_single_module_is_zero() {
        let net = network_from_parts(&[("a", 1), ("b", 1), ("c", 1)], &[(0, 1), (1, 2)]);
        let q = modularity_of(&net, &[0, 0, 0]).unwrap();
        assert!(q.abs() < 1e-12);
    }

    #[test]
    fn modularity_edgeless_is_error() {
        let net = network_from_parts(&[("a", 1), ("b", 1)], &[]);
        assert!(matches!(greedy_modularity(&net), Err(Error::ModularityUndefined)));
    }

    /// Exhaustive partition search for small n (restricted growth strings).
    fn brute_force_best_q(net: &ConceptNetwork) -> f64 {
        let n = net.node_count();
        let mut labels = vec![0usize; n];
        let mut best = f64::NEG_INFINITY;
        fn recurse(
            i: usize,
            max_used: usize,
            labels: &mut Vec<usize>,
            net: &ConceptNetwork,
            best: &mut f64,
        ) {
            let n = labels.len();
            if i == n {
                let q = modularity_of(net, labels).unwrap();
                if q > *best {
                    *best = q;
                }
                return;
            }
            for label in 0..=max_used + 1 {
                labels[i] = label;
                recurse(i + 1, max_used.max(label), labels, net, best);
            }
        }
        recurse(1, 0, &mut labels, net, &mut best);
        best
    }

    #[test]
    fn greedy_close_to_brute_force_optimum() {
        let mut rng = crate::seeds::rng_for(9, &["modularity-fuzz"]);
        let mut ratio_ok = 0;
        let total = 50;
        for _ in 0..total {
            let n = rng.gen_range(5..=8);
            let mut edges = Vec::new();
            for s in 0..n {
                for t in s + 1..n {
                    if rng.gen_bool(0.4) {
                        edges.push((s, t));
                    }
                }
            }
            if edges.is_empty() {
                edges.push((0, 1));
            }
            let nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i}"), 1)).collect();
            let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
            let net = network_from_parts(&refs, &edges);
            let greedy = greedy_modularity(&net).unwrap();
            let optimum = brute_force_best_q(&net);
            assert!(
                greedy.q <= optimum + 1e-9,
                "greedy {} exceeded optimum {}",
                greedy.q,
                optimum
            );
            if optimum <= 0.0 || greedy.q >= 0.8 * optimum {
                ratio_ok += 1;
            }
        }
        assert!(ratio_ok >= 45, "only {ratio_ok}/{total} within 0.8x of optimum");
    }

    #[test]
    fn star_hub_core_has_full_coreness() {
        let n = 8;
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
        let nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i}"), 1)).collect();
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let net = network_from_parts(&refs, &edges);
        let assignment = core_periphery(&net, 17, 20).unwrap();
        assert!(assignment.is_core[0]);
        assert!((assignment.rho_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_core_periphery_is_error() {
        let net = network_from_parts(&[("a", 1), ("b", 1)], &[]);
        assert!(matches!(
            core_periphery(&net, 1, 20),
            Err(Error::CorePeripheryUndefined)
        ));
    }

    #[test]
    fn search_score_never_decreases() {
        let mut rng = crate::seeds::rng_for(23, &["cp-trace"]);
        for _ in 0..20 {
            let n = 12;
            let mut edges = Vec::new();
            for s in 0..n {
                for t in s + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((s, t));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i}"), 1)).collect();
            let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
            let net = network_from_parts(&refs, &edges);
            let (degree, adj, total) = skeleton_degrees(&net);
            let _ = degree;
            let penalty = 2.0 * total / n as f64;
            let (_, trace) = core_periphery_search(&adj, penalty, &mut rng);
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
        }
    }

    #[test]
    fn planted_core_recovered() {
        // 3-node core: dense among itself and to all 7 periphery nodes;
        // periphery-periphery edges absent
        let n = 10;
        let mut edges = Vec::new();
        for a in 0..3 {
            for b in a + 1..3 {
                edges.push((a, b));
            }
            for p in 3..n {
                edges.push((a, p));
            }
        }
        let nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i}"), 1)).collect();
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let net = network_from_parts(&refs, &edges);
        let mut recovered = 0;
        for seed in 0..20 {
            let a = core_periphery(&net, seed, 20).unwrap();
            let core: Vec<usize> = (0..n).filter(|&i| a.is_core[i]).collect();
            if core == vec![0, 1, 2] {
                recovered += 1;
            }
        }
        assert!(recovered >= 18, "recovered {recovered}/20");
    }

    #[test]
    fn lead_lag_single_edge() {
        let net = network_from_parts(&[("core", 1900), ("periph", 1950)], &[(0, 1)]);
        let assignment = CoreAssignment {
            is_core: vec![true, false],
            rho: 1.0,
            rho_norm: 1.0,
            score: 0.0,
        };
        let report = lead_lag(&net, &assignment);
        assert_eq!(report.deltas(), vec![-50.0]);
        assert!(report.t_test.is_none()); // one sample: no test
    }

    #[test]
    fn lead_lag_no_core_periphery_edges_is_empty() {
        let net = network_from_parts(&[("a", 1900), ("b", 1950)], &[(0, 1)]);
        let assignment = CoreAssignment {
            is_core: vec![true, true],
            rho: 1.0,
            rho_norm: 1.0,
            score: 0.0,
        };
        let report = lead_lag(&net, &assignment);
        assert!(report.edges.is_empty());
        assert!(report.t_test.is_none());
    }

    #[test]
    fn lead_lag_t_matches_direct_formula() {
        // synthetic 30-edge sample
        let mut rng = crate::seeds::rng_for(31, &["leadlag"]);
        let mut nodes = vec![("hub".to_string(), 1800i64)];
        let mut edges = Vec::new();
        for i in 0..30 {
            nodes.push((format!("p{i}"), 1800 + rng.gen_range(-40..90)));
            edges.push((0, i + 1));
        }
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let net = network_from_parts(&refs, &edges);
        let mut is_core = vec![false; 31];
        is_core[0] = true;
        let assignment = CoreAssignment {
            is_core,
            rho: 30.0,
            rho_norm: 1.0,
            score: 0.0,
        };
        let report = lead_lag(&net, &assignment);
        let deltas = report.deltas();
        let n = deltas.len() as f64;
        let mean = deltas.iter().sum::<f64>() / n;
        let sd = (deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let t_direct = mean / (sd / n.sqrt());
        let t = report.t_test.unwrap();
        assert!((t.statistic - t_direct).abs() < 1e-9);
    }

    #[test]
    fn epoch_lead_lag_single_year_steps() {
        let nodes: Vec<(String, i64)> = (0..10).map(|i| (format!("n{i}"), 1900 + i as i64)).collect();
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let edges: Vec<(usize, usize)> = (1..10).map(|i| (i - 1, i)).collect();
        let net = network_from_parts(&refs, &edges);
        let filt = GrowthFiltration::new(&net);
        let epochs = epoch_lead_lag(&filt, 10, 7, 5).unwrap();
        assert_eq!(epochs.len(), 10);
        let years: Vec<i64> = epochs.iter().map(|e| e.year).collect();
        assert_eq!(years, (1900..1910).collect::<Vec<i64>>());
    }

    #[test]
    fn final_epoch_equals_whole_network_lead_lag() {
        let nodes: Vec<(String, i64)> = (0..12).map(|i| (format!("n{i:02}"), 1900 + i as i64)).collect();
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let mut edges = Vec::new();
        for i in 1..12 {
            edges.push((i - 1, i));
            if i >= 2 {
                edges.push((i - 2, i));
            }
        }
        let net = network_from_parts(&refs, &edges);
        let filt = GrowthFiltration::new(&net);
        let epochs = epoch_lead_lag(&filt, 10, 3, 10).unwrap();
        let last = epochs.last().unwrap();
        let direct_assignment =
            core_periphery(&net, epoch_seed(3, last.epoch), 10).unwrap();
        let direct = lead_lag(&net, &direct_assignment);
        assert_eq!(last.report, direct);
    }

    #[test]
    fn outward_growth_gives_monotone_negative_t_trend() {
        // old dense core, periphery added strictly later in waves;
        // within-core deltas are all zero so only epochs with real
        // periphery carry a t value
        let mut nodes: Vec<(String, i64)> = (0..6).map(|i| (format!("core{i}"), 1000)).collect();
        let mut edges = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                edges.push((a, b));
            }
        }
        let mut next = 6;
        for wave in 0..8 {
            for k in 0..4 {
                nodes.push((format!("p{wave}_{k}"), 1500 + wave * 20));
                edges.push((k % 6, next));
                edges.push(((k + 1) % 6, next));
                next += 1;
            }
        }
        let refs: Vec<(&str, i64)> = nodes.iter().map(|(t, y)| (t.as_str(), *y)).collect();
        let net = network_from_parts(&refs, &edges);
        let filt = GrowthFiltration::new(&net);
        let epochs = epoch_lead_lag(&filt, 10, 11, 20).unwrap();
        let ts: Vec<f64> = epochs
            .iter()
            .filter_map(|e| e.report.t_test.as_ref().map(|t| t.statistic))
            .collect();
        assert!(ts.len() >= 3);
        assert!(ts.last().unwrap() < &0.0);
        for w in ts.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "t trend not monotone: {ts:?}");
        }
    }
}

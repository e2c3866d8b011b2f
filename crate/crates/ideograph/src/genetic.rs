//! Preference-free genetic simulator of knowledge growth. Seeds copy a
//! parent's tf-idf vector and drift by point mutations, insertions, and
//! deletions until their similarity to the parent falls under a drawn
//! detachment threshold; the detached seed becomes a new concept node
//! and wires itself to nodes whose titles share a majority of its ten
//! strongest words.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cosine_similarity, ConceptEdge, ConceptNetwork, ConceptNode, SparseVector, YearProvenance};
use crate::seeds;
use crate::stats::{linear_regression, Regression};

/// Simulation stops at this year even if the target size is not reached.
pub const YEAR_CAP: i64 = 2200;

/// Title length and the majority rule for wiring new nodes.
pub const TITLE_WORDS: usize = 10;
pub const TITLE_MATCH_MAJORITY: usize = 6;

const STOPWORDS: [&str; 60] = [
    "the", "of", "and", "to", "in", "is", "was", "for", "on", "as", "with", "by", "that", "it",
    "are", "be", "from", "at", "an", "or", "which", "this", "were", "also", "has", "have", "had",
    "its", "not", "but", "can", "their", "been", "other", "such", "into", "more", "when", "who",
    "they", "his", "her", "she", "he", "them", "than", "then", "these", "those", "there", "where",
    "while", "will", "would", "may", "most", "between", "within", "through", "about",
];

fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(&token)
}

/// Calibrated mutation probabilities and detachment-threshold
/// distribution, with the regression diagnostics behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationParams {
    /// Point-mutation probability per seed-year.
    pub p: f64,
    /// Insertion probability per seed-year.
    pub i: f64,
    /// Deletion probability per seed-year; always equals `i`.
    pub d: f64,
    pub sim_mean: f64,
    pub sim_sd: f64,
    /// Empirical distribution of nonzero tf-idf values.
    pub tfidf_value_pool: Vec<f64>,
    pub diagnostics: CalibrationDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationDiagnostics {
    /// sum-abs-diff ~ year-diff (slope, intercept, r).
    pub value_drift: RegressionRecord,
    /// man-dist ~ year-diff.
    pub word_drift: RegressionRecord,
    pub avg_abs_diff: f64,
    pub edge_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionRecord {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
}

impl From<Regression> for RegressionRecord {
    fn from(r: Regression) -> Self {
        RegressionRecord {
            slope: r.slope,
            intercept: r.intercept,
            r: r.r,
        }
    }
}

/// Pure calibration from the per-edge statistics.
pub fn calibrate(
    year_diffs: &[f64],
    sum_abs_diffs: &[f64],
    man_dists: &[f64],
    avg_abs_diff: f64,
    similarities: &[f64],
    pool: Vec<f64>,
) -> Result<MutationParams> {
    let mut distinct = year_diffs.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::RegressionUndefined);
    }
    let value_drift = linear_regression(year_diffs, sum_abs_diffs)?;
    let word_drift = linear_regression(year_diffs, man_dists)?;
    let p = (value_drift.slope / avg_abs_diff).clamp(0.0, 1.0);
    let i = (word_drift.slope / 2.0).clamp(0.0, 1.0);
    let n = similarities.len() as f64;
    let sim_mean = similarities.iter().sum::<f64>() / n.max(1.0);
    let sim_sd = if similarities.len() > 1 {
        (similarities
            .iter()
            .map(|s| (s - sim_mean).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    Ok(MutationParams {
        p,
        i,
        d: i,
        sim_mean,
        sim_sd,
        tfidf_value_pool: pool,
        diagnostics: CalibrationDiagnostics {
            value_drift: value_drift.into(),
            word_drift: word_drift.into(),
            avg_abs_diff,
            edge_count: year_diffs.len(),
        },
    })
}

/// Calibrate mutation parameters from a real network: per-edge year
/// differences against tf-idf value drift (L1) and word drift (support
/// difference), normalized by the mean absolute difference of 10^5
/// random pool value pairs.
pub fn estimate_params(network: &ConceptNetwork, rng_seed: u64) -> Result<MutationParams> {
    let mut year_diffs = Vec::with_capacity(network.edge_count());
    let mut sum_abs_diffs = Vec::with_capacity(network.edge_count());
    let mut man_dists = Vec::with_capacity(network.edge_count());
    let mut similarities = Vec::with_capacity(network.edge_count());
    for e in &network.edges {
        let u = &network.nodes[e.source];
        let v = &network.nodes[e.target];
        year_diffs.push((u.year - v.year).abs() as f64);
        sum_abs_diffs.push(u.tfidf.l1_distance(&v.tfidf));
        man_dists.push(u.tfidf.support_difference(&v.tfidf) as f64);
        similarities.push(e.weight);
    }
    let pool: Vec<f64> = network
        .nodes
        .iter()
        .flat_map(|n| n.tfidf.0.iter().map(|&(_, w)| w))
        .collect();
    if pool.is_empty() {
        return Err(Error::Graph(format!(
            "network {} has no tf-idf weights to calibrate from",
            network.subject
        )));
    }
    let mut rng = seeds::rng_for(rng_seed, &["avg-abs-diff", &network.subject]);
    let draws = 100_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        let x = pool[rng.gen_range(0..pool.len())];
        let y = pool[rng.gen_range(0..pool.len())];
        acc += (x - y).abs();
    }
    let avg_abs_diff = acc / draws as f64;
    calibrate(
        &year_diffs,
        &sum_abs_diffs,
        &man_dists,
        avg_abs_diff,
        &similarities,
        pool,
    )
}

/// A live seed: the mutating copy of its parent's vector and the
/// detachment threshold drawn at creation.
#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub parent: usize,
    pub vector: SparseVector,
    pub threshold: f64,
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Normal(mean, sd) truncated to the open interval (0, 1).
pub fn truncated_normal(mean: f64, sd: f64, rng: &mut ChaCha8Rng) -> f64 {
    const EPS: f64 = 1e-9;
    if sd <= 0.0 {
        return mean.clamp(EPS, 1.0 - EPS);
    }
    for _ in 0..1000 {
        let draw = mean + sd * standard_normal(rng);
        if draw > 0.0 && draw < 1.0 {
            return draw;
        }
    }
    mean.clamp(EPS, 1.0 - EPS)
}

fn pool_draw(pool: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    pool[rng.gen_range(0..pool.len())]
}

/// Counts of applied mutation steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationTally {
    pub points: usize,
    pub inserts: usize,
    pub deletes: usize,
}

/// One year of mutation on a seed vector: a point mutation with
/// probability p, an insertion with probability i, a deletion with
/// probability d, in that order. All-zero vectors skip the point and
/// delete steps; a full vector skips insertion.
pub fn mutate_seed(
    vector: &mut SparseVector,
    params: &MutationParams,
    vocab_size: usize,
    rng: &mut ChaCha8Rng,
) -> MutationTally {
    let mut tally = MutationTally::default();
    let pool = &params.tfidf_value_pool;

    if !vector.is_empty() && rng.gen_bool(params.p) {
        let k = rng.gen_range(0..vector.0.len());
        vector.0[k].1 = pool_draw(pool, rng);
        tally.points = 1;
    }
    let zero_positions = vocab_size.saturating_sub(vector.nnz());
    if zero_positions > 0 && rng.gen_bool(params.i) {
        // the r-th token id outside the support, found by walking the
        // sorted support
        let r = rng.gen_range(0..zero_positions);
        let mut remaining = r;
        let mut candidate: u32 = 0;
        for &(tid, _) in &vector.0 {
            let gap = tid as usize - candidate as usize;
            if remaining < gap {
                break;
            }
            remaining -= gap;
            candidate = tid + 1;
        }
        let token = candidate + remaining as u32;
        let value = pool_draw(pool, rng);
        let pos = vector.0.partition_point(|&(tid, _)| tid < token);
        vector.0.insert(pos, (token, value));
        tally.inserts = 1;
    }
    if !vector.is_empty() && rng.gen_bool(params.d) {
        let k = rng.gen_range(0..vector.0.len());
        vector.0.remove(k);
        tally.deletes = 1;
    }
    tally
}

/// One node birth in the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthEvent {
    pub year: i64,
    pub node: usize,
    pub parent: usize,
    /// Cosine similarity to the parent at detachment.
    pub similarity: f64,
    pub threshold: f64,
    pub connections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearTally {
    pub year: i64,
    pub node_count: usize,
    pub mutations: MutationTally,
}

/// Simulated network with its event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub network: ConceptNetwork,
    pub births: Vec<BirthEvent>,
    pub yearly: Vec<YearTally>,
    /// New nodes that matched no existing title (kept as isolated vertices).
    pub isolated_births: usize,
}

impl SimTrace {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<SimTrace> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Top tf-idf tokens of a vector, stopwords excluded.
fn title_words(vector: &SparseVector, vocab: &[String], limit: usize) -> BTreeSet<u32> {
    let mut entries: Vec<(u32, f64)> = vector
        .0
        .iter()
        .filter(|&&(tid, _)| !is_stopword(&vocab[tid as usize]))
        .copied()
        .collect();
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| a.0.cmp(&b.0))
    });
    entries.into_iter().take(limit).map(|(tid, _)| tid).collect()
}

struct SimNode {
    vector: SparseVector,
    title: String,
    title_tokens: BTreeSet<u32>,
    year: i64,
    provenance: YearProvenance,
}

/// Model state stepped one year at a time.
pub struct Simulation {
    params: MutationParams,
    vocab: Vec<String>,
    subject: String,
    nodes: Vec<SimNode>,
    edges: Vec<(usize, usize, f64)>,
    seeds: Vec<Option<Seed>>,
    rng: ChaCha8Rng,
    births: Vec<BirthEvent>,
    yearly: Vec<YearTally>,
    isolated_births: usize,
}

impl Simulation {
    /// Initialize from the subgraph of `real` whose nodes predate
    /// `start_year`.
    pub fn new(
        real: &ConceptNetwork,
        params: MutationParams,
        rng_seed: u64,
        start_year: i64,
    ) -> Result<Simulation> {
        let keep: Vec<usize> = (0..real.node_count())
            .filter(|&i| real.nodes[i].year < start_year)
            .collect();
        if keep.is_empty() {
            return Err(Error::EmptyInitialSubgraph(start_year));
        }
        let remap: std::collections::HashMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let nodes: Vec<SimNode> = keep
            .iter()
            .map(|&old| {
                let n = &real.nodes[old];
                SimNode {
                    vector: n.tfidf.clone(),
                    title: n.title.clone(),
                    title_tokens: title_words(&n.tfidf, &real.vocab.0, TITLE_WORDS),
                    year: n.year,
                    provenance: n.provenance,
                }
            })
            .collect();
        let edges: Vec<(usize, usize, f64)> = real
            .edges
            .iter()
            .filter(|e| remap.contains_key(&e.source) && remap.contains_key(&e.target))
            .map(|e| (remap[&e.source], remap[&e.target], e.weight))
            .collect();
        let n = nodes.len();
        Ok(Simulation {
            params,
            vocab: real.vocab.0.clone(),
            subject: real.subject.clone(),
            nodes,
            edges,
            seeds: (0..n).map(|_| None).collect(),
            rng: seeds::rng_for(rng_seed, &["genetic", &real.subject]),
            births: Vec::new(),
            yearly: Vec::new(),
            isolated_births: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// One simulated year: spawn seeds for seedless nodes, mutate every
    /// seed, detach seeds that drifted under their threshold into new
    /// nodes, and wire those to title-matching existing nodes.
    pub fn step_year(&mut self, year: i64) {
        let mut tally = MutationTally::default();
        for node in 0..self.nodes.len() {
            if self.seeds[node].is_none() {
                let threshold =
                    truncated_normal(self.params.sim_mean, self.params.sim_sd, &mut self.rng);
                self.seeds[node] = Some(Seed {
                    parent: node,
                    vector: self.nodes[node].vector.clone(),
                    threshold,
                });
            }
        }
        for node in 0..self.nodes.len() {
            let Some(seed) = self.seeds[node].as_mut() else {
                continue;
            };
            let t = mutate_seed(&mut seed.vector, &self.params, self.vocab.len(), &mut self.rng);
            tally.points += t.points;
            tally.inserts += t.inserts;
            tally.deletes += t.deletes;
        }
        // births detach against the node set as it stood this morning
        let existing = self.nodes.len();
        for parent in 0..existing {
            let Some(seed) = self.seeds[parent].as_ref() else {
                continue;
            };
            let similarity = cosine_similarity(&seed.vector, &self.nodes[parent].vector);
            if similarity >= seed.threshold {
                continue;
            }
            let seed = self.seeds[parent].take().unwrap();
            let id = self.nodes.len();
            let title_tokens = title_words(&seed.vector, &self.vocab, TITLE_WORDS);
            let title = title_tokens
                .iter()
                .map(|&tid| self.vocab[tid as usize].clone())
                .collect::<Vec<_>>()
                .join(" ");
            let mut connections = 0;
            for other in 0..existing {
                let shared = title_tokens
                    .intersection(&self.nodes[other].title_tokens)
                    .count();
                if shared >= TITLE_MATCH_MAJORITY {
                    let w = cosine_similarity(&seed.vector, &self.nodes[other].vector);
                    self.edges.push((id, other, w));
                    connections += 1;
                }
            }
            if connections == 0 {
                self.isolated_births += 1;
            }
            self.births.push(BirthEvent {
                year,
                node: id,
                parent,
                similarity,
                threshold: seed.threshold,
                connections,
            });
            self.nodes.push(SimNode {
                vector: seed.vector,
                title,
                title_tokens,
                year,
                provenance: YearProvenance::Default,
            });
            self.seeds.push(None);
        }
        self.yearly.push(YearTally {
            year,
            node_count: self.nodes.len(),
            mutations: tally,
        });
    }

    pub fn into_trace(self) -> SimTrace {
        let nodes: Vec<ConceptNode> = self
            .nodes
            .into_iter()
            .enumerate()
            .map(|(id, n)| ConceptNode {
                id,
                title: n.title,
                year: n.year,
                provenance: n.provenance,
                tfidf: n.vector,
            })
            .collect();
        let mut edges: Vec<ConceptEdge> = self
            .edges
            .into_iter()
            .map(|(source, target, weight)| ConceptEdge {
                source,
                target,
                weight: weight.clamp(0.0, 1.0),
            })
            .collect();
        edges.sort_by_key(|e| (e.source, e.target));
        edges.dedup_by_key(|e| (e.source, e.target));
        SimTrace {
            network: ConceptNetwork {
                subject: self.subject,
                nodes,
                edges,
                vocab: crate::graph::Vocabulary(self.vocab),
                null_origin: None,
            },
            births: self.births,
            yearly: self.yearly,
            isolated_births: self.isolated_births,
        }
    }
}

/// Run the simulation from `start_year` until the node count reaches
/// the real network's count or the year cap.
pub fn run_simulation(
    real: &ConceptNetwork,
    params: &MutationParams,
    rng_seed: u64,
    start_year: i64,
) -> Result<SimTrace> {
    let mut sim = Simulation::new(real, params.clone(), rng_seed, start_year)?;
    let target = real.node_count();
    for year in start_year..=YEAR_CAP {
        if sim.node_count() >= target {
            break;
        }
        sim.step_year(year);
    }
    Ok(sim.into_trace())
}

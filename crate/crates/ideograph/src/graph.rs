//! The core data model: directed, cosine-weighted concept networks with
//! birth years, plus tf-idf vectorization and the year-indexed growth
//! filtration view.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::ParsedArticle;
use crate::error::{Error, Result};

/// How a node got its birth year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YearProvenance {
    /// Earliest year parsed from the article text.
    Parsed,
    /// One year after the latest dated parent.
    Imputed,
    /// No year found anywhere; dated at the fallback year.
    Default,
}

/// Sparse non-negative vector keyed by token id, kept sorted by token.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector(pub Vec<(u32, f64)>);

impl SparseVector {
    pub fn from_counts(counts: BTreeMap<u32, f64>) -> Self {
        SparseVector(counts.into_iter().filter(|&(_, w)| w != 0.0).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut acc = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.0[i].1 * other.0[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, w) in &mut self.0 {
            *w *= factor;
        }
    }

    /// Sum over the union support of |u_k - v_k|.
    pub fn l1_distance(&self, other: &SparseVector) -> f64 {
        let mut acc = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(ti, wi)), Some(&(tj, wj))) => match ti.cmp(&tj) {
                    std::cmp::Ordering::Less => {
                        acc += wi.abs();
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        acc += wj.abs();
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        acc += (wi - wj).abs();
                        i += 1;
                        j += 1;
                    }
                },
                (Some(&(_, wi)), None) => {
                    acc += wi.abs();
                    i += 1;
                }
                (None, Some(&(_, wj))) => {
                    acc += wj.abs();
                    j += 1;
                }
                (None, None) => break,
            }
        }
        acc
    }

    /// Number of token positions where exactly one vector is nonzero.
    pub fn support_difference(&self, other: &SparseVector) -> usize {
        let mut count = 0;
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(ti, _)), Some(&(tj, _))) => match ti.cmp(&tj) {
                    std::cmp::Ordering::Less => {
                        count += 1;
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        count += 1;
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                },
                (Some(_), None) => {
                    count += 1;
                    i += 1;
                }
                (None, Some(_)) => {
                    count += 1;
                    j += 1;
                }
                (None, None) => break,
            }
        }
        count
    }
}

/// Cosine similarity of two non-negative sparse vectors; 0 when either
/// vector is empty.
pub fn cosine_similarity(u: &SparseVector, v: &SparseVector) -> f64 {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (u.dot(v) / (nu * nv)).clamp(0.0, 1.0)
}

/// Lowercased Unicode-alphanumeric word split; tokens shorter than two
/// characters are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| w.chars().count() >= 2)
        .map(|w| w.to_lowercase())
        .collect()
}

/// Token vocabulary shared by all documents of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary(pub Vec<String>);

impl Vocabulary {
    pub fn token(&self, id: u32) -> &str {
        &self.0[id as usize]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// tf-idf weighting of a document corpus.
///
/// weight(i, j) = freq(i, j) * log2(D / df(i)), then each document
/// vector is scaled to unit Euclidean norm. Terms present in every
/// document get weight zero.
pub fn compute_tfidf(docs: &[Vec<String>]) -> (Vec<SparseVector>, Vocabulary) {
    let d = docs.len() as f64;
    let mut token_ids: BTreeMap<&str, u32> = BTreeMap::new();
    for doc in docs {
        for tok in doc {
            let next = token_ids.len() as u32;
            token_ids.entry(tok.as_str()).or_insert(next);
        }
    }
    // BTreeMap iteration is title-sorted but ids were assigned in
    // encounter order; rebuild ids in sorted token order so the
    // vocabulary is deterministic regardless of document order.
    let mut vocab: Vec<String> = token_ids.keys().map(|s| s.to_string()).collect();
    vocab.sort();
    let ids: HashMap<&str, u32> = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i as u32))
        .collect();

    let mut df = vec![0u64; vocab.len()];
    for doc in docs {
        let unique: HashSet<&str> = doc.iter().map(|s| s.as_str()).collect();
        for tok in unique {
            df[ids[tok] as usize] += 1;
        }
    }

    let vectors = docs
        .iter()
        .map(|doc| {
            let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
            for tok in doc {
                *counts.entry(ids[tok.as_str()]).or_insert(0.0) += 1.0;
            }
            for (tid, w) in counts.iter_mut() {
                *w *= (d / df[*tid as usize] as f64).log2();
            }
            let mut v = SparseVector::from_counts(counts);
            let norm = v.norm();
            if norm > 0.0 {
                v.scale(1.0 / norm);
            }
            v
        })
        .collect();
    (vectors, Vocabulary(vocab))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptNode {
    pub id: usize,
    pub title: String,
    pub year: i64,
    pub provenance: YearProvenance,
    #[serde(default)]
    pub tfidf: SparseVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptEdge {
    /// The hyperlinked (explaining) article.
    pub source: usize,
    /// The hyperlinking (explained) article.
    pub target: usize,
    /// Cosine similarity of the endpoint tf-idf vectors, in [0, 1].
    pub weight: f64,
}

/// Provenance stanza attached to null-model variants of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullStanza {
    pub kind: String,
    pub seed: u64,
}

/// Directed, cosine-weighted concept network with birth years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptNetwork {
    pub subject: String,
    pub nodes: Vec<ConceptNode>,
    pub edges: Vec<ConceptEdge>,
    pub vocab: Vocabulary,
    #[serde(rename = "null", skip_serializing_if = "Option::is_none", default)]
    pub null_origin: Option<NullStanza>,
}

impl ConceptNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_by_title(&self, title: &str) -> Option<&ConceptNode> {
        self.nodes.iter().find(|n| n.title == title)
    }

    /// Out-neighbor lists indexed by node id.
    pub fn out_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.source].push((e.target, e.weight));
        }
        adj
    }

    /// In-neighbor lists indexed by node id.
    pub fn in_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.target].push((e.source, e.weight));
        }
        adj
    }

    /// Undirected skeleton: weight per unordered pair is the sum of the
    /// weights in both directions.
    pub fn undirected_skeleton(&self) -> BTreeMap<(usize, usize), f64> {
        let mut skel = BTreeMap::new();
        for e in &self.edges {
            let key = if e.source < e.target {
                (e.source, e.target)
            } else {
                (e.target, e.source)
            };
            *skel.entry(key).or_insert(0.0) += e.weight;
        }
        skel
    }

    /// Arrival year of an edge: the later of its endpoint years.
    pub fn edge_arrival_year(&self, e: &ConceptEdge) -> i64 {
        self.nodes[e.source].year.max(self.nodes[e.target].year)
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::Schema(format!(
                    "node id {} at position {i}: ids must be dense and sorted",
                    node.id
                )));
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.source >= n || e.target >= n {
                return Err(Error::Schema(format!(
                    "edge {} -> {} references a missing node",
                    e.source, e.target
                )));
            }
            if e.source == e.target {
                return Err(Error::Schema(format!("self-loop at node {}", e.source)));
            }
            if !(0.0..=1.0).contains(&e.weight) {
                return Err(Error::Schema(format!(
                    "edge weight {} outside [0, 1]",
                    e.weight
                )));
            }
            if !seen.insert((e.source, e.target)) {
                return Err(Error::Schema(format!(
                    "duplicate edge {} -> {}",
                    e.source, e.target
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<ConceptNetwork> {
        let net: ConceptNetwork =
            serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
        net.validate()?;
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ConceptNetwork> {
        ConceptNetwork::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Build the concept network of one subject.
///
/// One node per member article; for every lead link L of member A with
/// L also a member, a directed edge L -> A weighted by the cosine
/// similarity of the two articles' tf-idf vectors. Self-links and
/// duplicate links collapse. Node ids are assigned in title sort order.
pub fn build_network(
    subject: &str,
    members: &[&ParsedArticle],
    tfidf: &HashMap<String, SparseVector>,
    vocab: &Vocabulary,
) -> Result<ConceptNetwork> {
    if members.is_empty() {
        return Err(Error::Graph(format!("subject {subject} has no articles")));
    }
    let mut titles: Vec<&str> = members.iter().map(|a| a.title.as_str()).collect();
    titles.sort();
    titles.dedup();
    let index: HashMap<&str, usize> = titles.iter().enumerate().map(|(i, t)| (*t, i)).collect();

    let mut articles: Vec<&ParsedArticle> = Vec::with_capacity(titles.len());
    for &t in &titles {
        let a = members
            .iter()
            .find(|a| a.title == t)
            .expect("title came from members");
        articles.push(a);
    }

    let mut edge_set: HashSet<(usize, usize)> = HashSet::new();
    for article in &articles {
        let target = index[article.title.as_str()];
        for link in &article.lead_links {
            if let Some(&source) = index.get(link.as_str()) {
                if source != target {
                    edge_set.insert((source, target));
                }
            }
        }
    }

    // Birth years: parsed years win, then two imputation passes over
    // the subject graph, then the default year.
    let parsed: Vec<Option<i64>> = articles
        .iter()
        .map(|a| a.parsed_years.first().copied())
        .collect();
    let edge_list: Vec<(usize, usize)> = edge_set.iter().copied().collect();
    let assigned = crate::corpus::assign_birth_years(&parsed, &edge_list);

    let nodes: Vec<ConceptNode> = titles
        .iter()
        .enumerate()
        .map(|(id, &title)| ConceptNode {
            id,
            title: title.to_string(),
            year: assigned[id].0,
            provenance: assigned[id].1,
            tfidf: tfidf.get(title).cloned().unwrap_or_default(),
        })
        .collect();

    let mut edges: Vec<ConceptEdge> = edge_list
        .into_iter()
        .map(|(source, target)| ConceptEdge {
            source,
            target,
            weight: cosine_similarity(&nodes[source].tfidf, &nodes[target].tfidf),
        })
        .collect();
    edges.sort_by_key(|e| (e.source, e.target));

    Ok(ConceptNetwork {
        subject: subject.to_string(),
        nodes,
        edges,
        vocab: vocab.clone(),
        null_origin: None,
    })
}

/// The nested sequence of yearly subnetworks induced by birth years.
/// An edge arrives with the later of its two endpoints.
#[derive(Debug, Clone)]
pub struct GrowthFiltration<'a> {
    pub network: &'a ConceptNetwork,
    /// Sorted unique birth years.
    pub years: Vec<i64>,
    /// Node ids sorted by (year, id): the arrival order.
    pub node_arrival: Vec<usize>,
    /// Arrival year per edge, parallel to `network.edges`.
    pub edge_arrival: Vec<i64>,
}

impl<'a> GrowthFiltration<'a> {
    pub fn new(network: &'a ConceptNetwork) -> Self {
        let mut years: Vec<i64> = network.nodes.iter().map(|n| n.year).collect();
        years.sort_unstable();
        years.dedup();
        let mut node_arrival: Vec<usize> = (0..network.nodes.len()).collect();
        node_arrival.sort_by_key(|&i| (network.nodes[i].year, i));
        let edge_arrival = network
            .edges
            .iter()
            .map(|e| network.edge_arrival_year(e))
            .collect();
        GrowthFiltration {
            network,
            years,
            node_arrival,
            edge_arrival,
        }
    }

    pub fn first_year(&self) -> Option<i64> {
        self.years.first().copied()
    }

    pub fn last_year(&self) -> Option<i64> {
        self.years.last().copied()
    }

    /// The subnetwork present at year `t`: nodes born at or before `t`
    /// and edges whose arrival year is at or before `t`. Node ids are
    /// re-densified preserving title sort order.
    pub fn snapshot_at(&self, t: i64) -> ConceptNetwork {
        let keep: Vec<usize> = (0..self.network.nodes.len())
            .filter(|&i| self.network.nodes[i].year <= t)
            .collect();
        let remap: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let nodes: Vec<ConceptNode> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                let mut n = self.network.nodes[old].clone();
                n.id = new;
                n
            })
            .collect();
        let edges: Vec<ConceptEdge> = self
            .network
            .edges
            .iter()
            .zip(&self.edge_arrival)
            .filter(|(_, &arr)| arr <= t)
            .map(|(e, _)| ConceptEdge {
                source: remap[&e.source],
                target: remap[&e.target],
                weight: e.weight,
            })
            .collect();
        ConceptNetwork {
            subject: self.network.subject.clone(),
            nodes,
            edges,
            vocab: self.network.vocab.clone(),
            null_origin: self.network.null_origin.clone(),
        }
    }
}

//! Persistent homology of the year-indexed flag-complex filtration.
//!
//! Every k-clique of the undirected skeleton enters the filtration as a
//! (k-1)-simplex at the latest year among its member pairs. The
//! boundary matrix is reduced over the two-element field with the
//! clearing optimization; cavities with zero lifetime (born and filled
//! within one year step) are dropped, and unpaired creators are
//! reported as still alive.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;
use crate::stats::{self, TestResult};

/// Hard ceiling on the clique count before enumeration aborts.
pub const CLIQUE_GUARD: usize = 10_000_000;

/// A simplex: strictly increasing vertex ids and its filtration year.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Simplex {
    pub year: i64,
    pub vertices: Vec<usize>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices sorted by (year, dimension, lexicographic vertices), so
/// every face precedes its cofaces.
#[derive(Debug, Clone)]
pub struct Filtration {
    pub simplices: Vec<Simplex>,
    index: HashMap<Vec<usize>, usize>,
}

impl Filtration {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    pub fn max_year(&self) -> Option<i64> {
        self.simplices.iter().map(|s| s.year).max()
    }
}

/// One persistent cavity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth_year: i64,
    /// `None` while the cavity is still alive at the last year.
    pub death_year: Option<i64>,
    pub birth_simplex: Vec<usize>,
    pub death_simplex: Option<Vec<usize>>,
}

impl PersistencePair {
    pub fn is_alive(&self) -> bool {
        self.death_year.is_none()
    }

    pub fn lifetime(&self) -> Option<i64> {
        self.death_year.map(|d| d - self.birth_year)
    }
}

/// All cliques of size 1..=max_size on the undirected skeleton, each
/// dated at the latest arrival year among its member pairs (node year
/// for singletons).
pub fn enumerate_cliques(network: &ConceptNetwork, max_size: usize) -> Result<Vec<Simplex>> {
    let n = network.node_count();
    let skel = network.undirected_skeleton();
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut arrival: HashMap<(usize, usize), i64> = HashMap::new();
    for &(u, v) in skel.keys() {
        neighbors[u].push(v);
        neighbors[v].push(u);
        arrival.insert((u, v), network.nodes[u].year.max(network.nodes[v].year));
    }
    for adj in &mut neighbors {
        adj.sort_unstable();
    }

    let mut cliques: Vec<Simplex> = (0..n)
        .map(|v| Simplex {
            year: network.nodes[v].year,
            vertices: vec![v],
        })
        .collect();
    let mut frontier: Vec<(Vec<usize>, i64)> = (0..n)
        .map(|v| (vec![v], network.nodes[v].year))
        .collect();

    for _size in 2..=max_size {
        let mut next: Vec<(Vec<usize>, i64)> = Vec::new();
        for (clique, year) in &frontier {
            let &last = clique.last().unwrap();
            'candidates: for &w in &neighbors[last] {
                if w <= last {
                    continue;
                }
                let mut new_year = *year;
                for &u in clique {
                    match arrival.get(&(u.min(w), u.max(w))) {
                        Some(&a) => new_year = new_year.max(a),
                        None => continue 'candidates,
                    }
                }
                let mut vertices = clique.clone();
                vertices.push(w);
                next.push((vertices, new_year));
                if cliques.len() + next.len() > CLIQUE_GUARD {
                    return Err(Error::Graph(format!(
                        "clique enumeration exceeded {CLIQUE_GUARD} cliques; lower max_dim"
                    )));
                }
            }
        }
        cliques.extend(next.iter().map(|(vertices, year)| Simplex {
            year: *year,
            vertices: vertices.clone(),
        }));
        frontier = next;
    }
    Ok(cliques)
}

/// Sort cliques into a filtration and verify that every face precedes
/// its cofaces. A violation indicates a year bug upstream.
pub fn build_filtration(mut cliques: Vec<Simplex>) -> Result<Filtration> {
    cliques.sort_by(|a, b| {
        (a.year, a.vertices.len(), &a.vertices).cmp(&(b.year, b.vertices.len(), &b.vertices))
    });
    let index: HashMap<Vec<usize>, usize> = cliques
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.clone(), i))
        .collect();
    for (i, simplex) in cliques.iter().enumerate() {
        if simplex.vertices.len() < 2 {
            continue;
        }
        for skip in 0..simplex.vertices.len() {
            let facet: Vec<usize> = simplex
                .vertices
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect();
            match index.get(&facet) {
                Some(&fi) if fi < i => {}
                Some(_) => {
                    return Err(Error::Graph(format!(
                        "filtration face-order violation at simplex {:?}",
                        simplex.vertices
                    )))
                }
                None => {
                    return Err(Error::Graph(format!(
                        "missing face {facet:?} of simplex {:?}",
                        simplex.vertices
                    )))
                }
            }
        }
    }
    Ok(Filtration {
        simplices: cliques,
        index,
    })
}

/// XOR-merge of two sorted index lists (symmetric difference).
fn xor_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(&x), Some(&y)) if x < y => {
                out.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                out.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (None, None) => break,
        }
    }
    out
}

/// Standard boundary-matrix column reduction over GF(2) with clearing,
/// processing column dimensions from high to low. Returns the retained
/// pairs: zero-lifetime cavities dropped, essential classes alive.
pub fn persistent_homology(filtration: &Filtration, max_dim: usize) -> Vec<PersistencePair> {
    let n = filtration.len();
    let mut killed = vec![false; n];
    let mut creator = vec![false; n];
    let mut pivot_col: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut raw_pairs: Vec<(usize, usize)> = Vec::new();

    let top_dim = filtration
        .simplices
        .iter()
        .map(|s| s.dim())
        .max()
        .unwrap_or(0)
        .min(max_dim + 1);

    for q in (1..=top_dim).rev() {
        for j in 0..n {
            let simplex = &filtration.simplices[j];
            if simplex.dim() != q || killed[j] {
                continue;
            }
            let mut column: Vec<usize> = (0..simplex.vertices.len())
                .map(|skip| {
                    let facet: Vec<usize> = simplex
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    filtration.index_of(&facet).expect("validated filtration")
                })
                .collect();
            column.sort_unstable();
            loop {
                match column.last() {
                    None => {
                        creator[j] = true;
                        break;
                    }
                    Some(&low) => match pivot_col.get(&low) {
                        Some(other) => column = xor_columns(&column, other),
                        None => {
                            killed[low] = true;
                            raw_pairs.push((low, j));
                            pivot_col.insert(low, column);
                            break;
                        }
                    },
                }
            }
        }
    }

    let mut pairs = Vec::new();
    for (birth, death) in raw_pairs {
        let b = &filtration.simplices[birth];
        let d = &filtration.simplices[death];
        if b.dim() > max_dim || d.year == b.year {
            continue;
        }
        pairs.push(PersistencePair {
            dim: b.dim(),
            birth_year: b.year,
            death_year: Some(d.year),
            birth_simplex: b.vertices.clone(),
            death_simplex: Some(d.vertices.clone()),
        });
    }
    // vertices are creators by definition; higher-dim creators were
    // flagged during reduction
    for j in 0..n {
        let s = &filtration.simplices[j];
        let is_creator = s.dim() == 0 || creator[j];
        if is_creator && !killed[j] && s.dim() <= max_dim {
            pairs.push(PersistencePair {
                dim: s.dim(),
                birth_year: s.year,
                death_year: None,
                birth_simplex: s.vertices.clone(),
                death_simplex: None,
            });
        }
    }
    pairs.sort_by(|a, b| {
        (a.dim, a.birth_year, a.death_year, &a.birth_simplex).cmp(&(
            b.dim,
            b.birth_year,
            b.death_year,
            &b.birth_simplex,
        ))
    });
    pairs
}

/// Full pipeline for one network: cliques, filtration, reduction.
pub fn knowledge_gaps(network: &ConceptNetwork, max_dim: usize) -> Result<Vec<PersistencePair>> {
    let cliques = enumerate_cliques(network, max_dim + 2)?;
    let filtration = build_filtration(cliques)?;
    Ok(persistent_homology(&filtration, max_dim))
}

/// Betti number of dimension `dim` at year `t`, counted from retained
/// pairs (born at or before `t`, not yet dead).
pub fn betti_at(pairs: &[PersistencePair], dim: usize, t: i64) -> usize {
    pairs
        .iter()
        .filter(|p| p.dim == dim && p.birth_year <= t && p.death_year.map_or(true, |d| d > t))
        .count()
}

/// Lifetime sample of dead cavities, count of cavities still alive,
/// and the dimension histogram.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LifetimeStats {
    pub dead_lifetimes: Vec<f64>,
    pub alive_count: usize,
    pub dimension_counts: BTreeMap<usize, usize>,
}

pub fn lifetime_distributions(pairs: &[PersistencePair], include_h0: bool) -> LifetimeStats {
    let mut out = LifetimeStats::default();
    for p in pairs {
        if p.dim == 0 && !include_h0 {
            continue;
        }
        *out.dimension_counts.entry(p.dim).or_insert(0) += 1;
        match p.lifetime() {
            Some(l) => out.dead_lifetimes.push(l as f64),
            None => out.alive_count += 1,
        }
    }
    out
}

/// Per-node counts of appearances in birth and death simplices of
/// retained cavities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParticipationCounts {
    pub birth_count: BTreeMap<usize, usize>,
    pub death_count: BTreeMap<usize, usize>,
}

impl ParticipationCounts {
    pub fn births(&self, node: usize) -> usize {
        self.birth_count.get(&node).copied().unwrap_or(0)
    }

    pub fn deaths(&self, node: usize) -> usize {
        self.death_count.get(&node).copied().unwrap_or(0)
    }
}

pub fn participation(pairs: &[PersistencePair]) -> ParticipationCounts {
    let mut counts = ParticipationCounts::default();
    for p in pairs {
        for &v in &p.birth_simplex {
            *counts.birth_count.entry(v).or_insert(0) += 1;
        }
        if let Some(d) = &p.death_simplex {
            for &v in d {
                *counts.death_count.entry(v).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Pooled gap samples of one network kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GapSamples {
    pub dead_lifetimes: Vec<f64>,
    /// One alive-cavity count per subject.
    pub alive_counts: Vec<f64>,
}

/// KS comparison of the real gap statistics against one comparator.
#[derive(Debug, Clone, PartialEq)]
pub struct GapComparison {
    pub comparator: String,
    pub dead_lifetimes: Option<TestResult>,
    pub alive_counts: Option<TestResult>,
}

/// Two-sample KS of dead lifetimes and alive counts, real vs each
/// comparator. Empty samples skip that comparison.
pub fn compare_gap_statistics(
    real: &GapSamples,
    others: &[(String, GapSamples)],
) -> Vec<GapComparison> {
    others
        .iter()
        .map(|(name, sample)| GapComparison {
            comparator: name.clone(),
            dead_lifetimes: stats::ks_two_sample(&real.dead_lifetimes, &sample.dead_lifetimes)
                .ok(),
            alive_counts: stats::ks_two_sample(&real.alive_counts, &sample.alive_counts).ok(),
        })
        .collect()
}

//! Corpus ingestion: Wikipedia multistream dumps or the mini-corpus
//! JSON format, parsed into titled articles with lead text, outgoing
//! hyperlinks, birth years, and subject membership.

mod dump;
mod mini;
mod wikitext;
mod years;

pub use dump::{read_dump, DumpStream};
pub use mini::MiniCorpus;
pub use wikitext::{extract_lead, parse_nobel_lists, resolve_subject};
pub use years::parse_years;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::graph::{compute_tfidf, tokenize, SparseVector, Vocabulary, YearProvenance};

/// Year given to nodes that stay undated after both imputation passes.
pub const DEFAULT_YEAR: i64 = 2020;

/// Latest year accepted from text parsing; later numbers are list noise.
pub const MAX_PARSE_YEAR: i64 = 2019;

/// An article as stored in the dump: raw markup plus redirect metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArticle {
    pub title: String,
    pub wikitext: String,
    pub redirect_target: Option<String>,
}

/// An article reduced to the fields the pipeline consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedArticle {
    pub title: String,
    pub lead_text: String,
    /// Canonicalized hyperlink targets from the lead, in order, deduplicated.
    pub lead_links: Vec<String>,
    pub history_text: Option<String>,
    /// Ascending, deduplicated. Negative years are BCE.
    pub parsed_years: Vec<i64>,
}

impl ParsedArticle {
    /// Parse a raw wikitext article: lead extraction, link
    /// canonicalization, and year parsing over lead plus history.
    pub fn from_wikitext(title: &str, wikitext: &str) -> ParsedArticle {
        let lead = extract_lead(wikitext);
        let mut years = parse_years(&lead.lead_text);
        if let Some(h) = &lead.history_text {
            years.extend(parse_years(h));
        }
        years.sort_unstable();
        years.dedup();
        ParsedArticle {
            title: title.to_string(),
            lead_text: lead.lead_text,
            lead_links: lead.lead_links,
            history_text: lead.history_text,
            parsed_years: years,
        }
    }

    /// Tokens feeding the tf-idf corpus: lead plus history text.
    pub fn document_tokens(&self) -> Vec<String> {
        let mut toks = tokenize(&self.lead_text);
        if let Some(h) = &self.history_text {
            toks.extend(tokenize(h));
        }
        toks
    }
}

/// Canonical member set of one subject index page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectIndex {
    pub subject: String,
    pub member_titles: BTreeSet<String>,
}

/// Titles hyperlinked from Nobel laureate rationales.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NobelNodeSet {
    pub prize_titles: BTreeSet<String>,
}

/// Canonicalize a link target the way MediaWiki canonicalizes titles:
/// drop the "#anchor" part, replace underscores with spaces, collapse
/// whitespace, and uppercase the first character.
pub fn canonicalize_title(raw: &str) -> String {
    let no_anchor = match raw.find('#') {
        Some(pos) => &raw[..pos],
        None => raw,
    };
    let spaced = no_anchor.replace('_', " ");
    let collapsed: String = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Assign a birth year and provenance to every node.
///
/// Nodes with parsed years keep their earliest. Then two passes: a node
/// whose parents (in-neighbors over `edges`, direction hyperlinked ->
/// hyperlinking) are all dated gets one year after the latest parent.
/// Whatever remains is dated [`DEFAULT_YEAR`].
pub fn assign_birth_years(
    parsed_min_year: &[Option<i64>],
    edges: &[(usize, usize)],
) -> Vec<(i64, YearProvenance)> {
    let n = parsed_min_year.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(source, target) in edges {
        parents[target].push(source);
    }
    let mut year: Vec<Option<i64>> = parsed_min_year.to_vec();
    let mut provenance: Vec<YearProvenance> = parsed_min_year
        .iter()
        .map(|_| YearProvenance::Default)
        .collect();
    for (i, y) in parsed_min_year.iter().enumerate() {
        if y.is_some() {
            provenance[i] = YearProvenance::Parsed;
        }
    }

    for _pass in 0..2 {
        // select first, assign after: nodes chosen in one pass all see
        // the same parent years
        let chosen: Vec<(usize, i64)> = (0..n)
            .filter(|&i| year[i].is_none() && !parents[i].is_empty())
            .filter_map(|i| {
                let mut latest = i64::MIN;
                for &p in &parents[i] {
                    match year[p] {
                        Some(y) => latest = latest.max(y),
                        None => return None,
                    }
                }
                Some((i, latest + 1))
            })
            .collect();
        for (i, y) in chosen {
            year[i] = Some(y);
            provenance[i] = YearProvenance::Imputed;
        }
    }

    (0..n)
        .map(|i| match year[i] {
            Some(y) => (y, provenance[i]),
            None => (DEFAULT_YEAR, YearProvenance::Default),
        })
        .collect()
}

/// A fully ingested corpus: every parsed article of the run, subject
/// membership, and the Nobel node set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    /// Sorted by title.
    pub articles: Vec<ParsedArticle>,
    pub subjects: Vec<SubjectIndex>,
    pub nobel: NobelNodeSet,
}

impl Corpus {
    pub fn article(&self, title: &str) -> Option<&ParsedArticle> {
        self.articles
            .binary_search_by(|a| a.title.as_str().cmp(title))
            .ok()
            .map(|i| &self.articles[i])
    }

    pub fn sort(&mut self) {
        self.articles.sort_by(|a, b| a.title.cmp(&b.title));
        self.subjects.sort_by(|a, b| a.subject.cmp(&b.subject));
    }

    /// tf-idf vectors over every article of the run (the run corpus
    /// substitutes for the full encyclopedia at mini-corpus scale).
    pub fn tfidf(&self) -> (HashMap<String, SparseVector>, Vocabulary) {
        let docs: Vec<Vec<String>> = self.articles.iter().map(|a| a.document_tokens()).collect();
        let (vectors, vocab) = compute_tfidf(&docs);
        let map = self
            .articles
            .iter()
            .zip(vectors)
            .map(|(a, v)| (a.title.clone(), v))
            .collect();
        (map, vocab)
    }

    /// Member articles of one subject that resolved to parsed articles.
    pub fn subject_articles(&self, subject: &str) -> Vec<&ParsedArticle> {
        let Some(index) = self.subjects.iter().find(|s| s.subject == subject) else {
            return Vec::new();
        };
        index
            .member_titles
            .iter()
            .filter_map(|t| self.article(t))
            .collect()
    }
}

/// Per-year membership map used by mini-corpus files.
pub type SubjectMap = BTreeMap<String, Vec<String>>;

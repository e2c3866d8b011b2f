//! The mini-corpus format: one JSON file holding pre-parsed articles,
//! subject membership, and Nobel titles. The desk-scale substitute for
//! a dump; both feed identical [`ParsedArticle`]s downstream.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::{canonicalize_title, parse_years, Corpus, NobelNodeSet, ParsedArticle, SubjectIndex, SubjectMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiniArticle {
    pub title: String,
    pub lead: String,
    #[serde(default)]
    pub links: Vec<String>,
    #[serde(default)]
    pub history: Option<String>,
    /// When absent, years are parsed from the lead and history text.
    #[serde(default)]
    pub years: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MiniCorpus {
    pub articles: Vec<MiniArticle>,
    pub subjects: SubjectMap,
    #[serde(default)]
    pub nobel: Vec<String>,
}

impl MiniCorpus {
    pub fn load(path: &Path) -> Result<MiniCorpus> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn to_corpus(&self) -> Corpus {
        let articles = self
            .articles
            .iter()
            .map(|a| {
                let mut links: Vec<String> = Vec::new();
                let mut seen = BTreeSet::new();
                for raw in &a.links {
                    let c = canonicalize_title(raw);
                    if !c.is_empty() && seen.insert(c.clone()) {
                        links.push(c);
                    }
                }
                let mut years = match &a.years {
                    Some(given) => given.clone(),
                    None => {
                        let mut y = parse_years(&a.lead);
                        if let Some(h) = &a.history {
                            y.extend(parse_years(h));
                        }
                        y
                    }
                };
                years.sort_unstable();
                years.dedup();
                ParsedArticle {
                    title: canonicalize_title(&a.title),
                    lead_text: a.lead.clone(),
                    lead_links: links,
                    history_text: a.history.clone(),
                    parsed_years: years,
                }
            })
            .collect();
        let subjects = self
            .subjects
            .iter()
            .map(|(name, titles)| SubjectIndex {
                subject: name.clone(),
                member_titles: titles.iter().map(|t| canonicalize_title(t)).collect(),
            })
            .collect();
        let nobel = NobelNodeSet {
            prize_titles: self.nobel.iter().map(|t| canonicalize_title(t)).collect(),
        };
        let mut corpus = Corpus {
            articles,
            subjects,
            nobel,
        };
        corpus.sort();
        corpus
    }

    /// Inverse of [`MiniCorpus::to_corpus`]; the round trip through the
    /// file format reproduces identical parsed articles.
    pub fn from_corpus(corpus: &Corpus) -> MiniCorpus {
        MiniCorpus {
            articles: corpus
                .articles
                .iter()
                .map(|a| MiniArticle {
                    title: a.title.clone(),
                    lead: a.lead_text.clone(),
                    links: a.lead_links.clone(),
                    history: a.history_text.clone(),
                    years: Some(a.parsed_years.clone()),
                })
                .collect(),
            subjects: corpus
                .subjects
                .iter()
                .map(|s| {
                    (
                        s.subject.clone(),
                        s.member_titles.iter().cloned().collect(),
                    )
                })
                .collect(),
            nobel: corpus.nobel.prize_titles.iter().cloned().collect(),
        }
    }
}

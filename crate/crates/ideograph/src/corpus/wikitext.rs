//! MediaWiki markup handling: lead-section extraction, link
//! collection, subject-index resolution, and laureate-table parsing.
//! This is not a renderer; templates are removed, not expanded.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::{canonicalize_title, NobelNodeSet, RawArticle, SubjectIndex};

/// Template nesting beyond this depth is treated as broken markup.
const MAX_TEMPLATE_DEPTH: usize = 32;

/// Namespace prefixes whose links are not articles.
const SKIP_NAMESPACES: [&str; 15] = [
    "file",
    "image",
    "category",
    "wikipedia",
    "help",
    "template",
    "portal",
    "special",
    "talk",
    "user",
    "media",
    "mediawiki",
    "book",
    "draft",
    "module",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LeadExtract {
    pub lead_text: String,
    pub lead_links: Vec<String>,
    pub history_text: Option<String>,
}

/// Split the article into the lead (everything strictly before the
/// first "==" heading) and the body of the first section whose heading
/// contains "History", then strip markup and collect lead links.
pub fn extract_lead(wikitext: &str) -> LeadExtract {
    let clean = strip_noise(wikitext);
    let sections = split_sections(&clean);

    let lead_raw = sections.lead;
    let (lead_text, lead_links) = render_text_and_links(&lead_raw);
    let history_text = sections
        .history
        .map(|raw| render_text_and_links(&raw).0)
        .filter(|t| !t.is_empty());

    LeadExtract {
        lead_text,
        lead_links,
        history_text,
    }
}

struct Sections {
    lead: String,
    history: Option<String>,
}

fn heading_level(line: &str) -> Option<(usize, &str)> {
    let trimmed = line.trim_end();
    if !trimmed.starts_with("==") {
        return None;
    }
    let level = trimmed.chars().take_while(|&c| c == '=').count();
    if level < 2 || !trimmed.ends_with('=') {
        return None;
    }
    let inner = trimmed.trim_matches('=').trim();
    Some((level, inner))
}

fn split_sections(text: &str) -> Sections {
    let mut lead = String::new();
    let mut history = String::new();
    let mut history_level = 0usize;
    #[derive(PartialEq)]
    enum State {
        Lead,
        History,
        Other,
    }
    let mut state = State::Lead;
    let mut found_history = false;

    for line in text.lines() {
        if let Some((level, title)) = heading_level(line) {
            state = if !found_history && title.to_lowercase().contains("history") {
                found_history = true;
                history_level = level;
                State::History
            } else if state == State::History && level > history_level {
                State::History // subsection of the history section
            } else {
                State::Other
            };
            continue;
        }
        match state {
            State::Lead => {
                lead.push_str(line);
                lead.push('\n');
            }
            State::History => {
                history.push_str(line);
                history.push('\n');
            }
            State::Other => {}
        }
    }
    Sections {
        lead,
        history: if found_history { Some(history) } else { None },
    }
}

/// Remove comments, ref tags, and templates.
fn strip_noise(text: &str) -> String {
    let no_comments = strip_delimited(text, "<!--", "-->");
    let no_refs = strip_refs(&no_comments);
    strip_templates(&no_refs)
}

fn strip_delimited(text: &str, open: &str, close: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find(open) {
        out.push_str(&rest[..start]);
        match rest[start..].find(close) {
            Some(end) => rest = &rest[start + end + close.len()..],
            None => return out, // unterminated: drop the tail
        }
    }
    out.push_str(rest);
    out
}

fn strip_refs(text: &str) -> String {
    // <ref .../> first, then <ref ...>...</ref>
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.to_lowercase().find("<ref") {
        out.push_str(&rest[..start]);
        let after = &rest[start..];
        let close_self = after.find("/>");
        let close_open = after.find('>');
        match (close_self, close_open) {
            (Some(cs), Some(co)) if cs + 1 == co => {
                // self-closing tag
                rest = &after[cs + 2..];
            }
            (_, Some(co)) => {
                let lower = after.to_lowercase();
                match lower[co..].find("</ref>") {
                    Some(end) => rest = &after[co + end + "</ref>".len()..],
                    None => return out,
                }
            }
            _ => return out,
        }
    }
    out.push_str(rest);
    out
}

fn strip_templates(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"{{") && depth < MAX_TEMPLATE_DEPTH {
            depth += 1;
            i += 2;
        } else if bytes[i..].starts_with(b"}}") && depth > 0 {
            depth -= 1;
            i += 2;
        } else if depth == 0 {
            // copy one UTF-8 scalar
            let ch_len = utf8_len(bytes[i]);
            out.push_str(&text[i..i + ch_len]);
            i += ch_len;
        } else {
            i += utf8_len(bytes[i]);
        }
    }
    out
}

fn utf8_len(first_byte: u8) -> usize {
    match first_byte {
        b if b < 0x80 => 1,
        b if b >> 5 == 0b110 => 2,
        b if b >> 4 == 0b1110 => 3,
        _ => 4,
    }
}

fn is_skipped_namespace(target: &str) -> bool {
    match target.split_once(':') {
        Some((ns, _)) => SKIP_NAMESPACES.contains(&ns.trim().to_lowercase().as_str()),
        None => false,
    }
}

/// Replace [[target|label]] spans with their labels, collecting the
/// canonical targets in order of first appearance. File and image links
/// vanish entirely, caption and all.
fn render_text_and_links(raw: &str) -> (String, Vec<String>) {
    let mut text = String::with_capacity(raw.len());
    let mut links = Vec::new();
    let mut seen = BTreeSet::new();
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i..].starts_with(b"[[") {
            // find matching ]] at nesting depth (file captions nest links)
            let mut depth = 1usize;
            let mut j = i + 2;
            while j < bytes.len() && depth > 0 {
                if bytes[j..].starts_with(b"[[") {
                    depth += 1;
                    j += 2;
                } else if bytes[j..].starts_with(b"]]") {
                    depth -= 1;
                    j += 2;
                } else {
                    j += utf8_len(bytes[j]);
                }
            }
            if depth != 0 {
                // unterminated link: emit the rest verbatim
                text.push_str(&raw[i..]);
                break;
            }
            let inner = &raw[i + 2..j - 2];
            let (target_raw, label) = match inner.split_once('|') {
                Some((t, l)) => (t, l),
                None => (inner, inner),
            };
            if is_skipped_namespace(target_raw) {
                i = j;
                continue;
            }
            let target = canonicalize_title(target_raw);
            if !target.is_empty() && seen.insert(target.clone()) {
                links.push(target);
            }
            // nested links inside the label render recursively
            let (label_text, mut label_links) = if label.contains("[[") {
                render_text_and_links(label)
            } else {
                (label.to_string(), Vec::new())
            };
            for l in label_links.drain(..) {
                if seen.insert(l.clone()) {
                    links.push(l);
                }
            }
            // the label up to its first pipe-free form; strip anchors shown raw
            text.push_str(label_text.split('|').next_back().unwrap_or(""));
            i = j;
        } else {
            let ch_len = utf8_len(bytes[i]);
            text.push_str(&raw[i..i + ch_len]);
            i += ch_len;
        }
    }
    // bold/italic markers and leftover brackets
    let text = text.replace("'''", "").replace("''", "");
    let text = text
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .trim()
        .to_string();
    (text, links)
}

/// Collect every article link on a subject index page, over the whole
/// body rather than just the lead, keeping template contents since
/// index pages often wrap their listings in layout templates.
pub fn resolve_subject(subject: &str, page: &RawArticle) -> Result<SubjectIndex> {
    let clean = strip_delimited(&page.wikitext, "<!--", "-->");
    let mut member_titles = BTreeSet::new();
    let mut rest = clean.as_str();
    while let Some(start) = rest.find("[[") {
        let after = &rest[start + 2..];
        match after.find("]]") {
            Some(end) => {
                let inner = &after[..end];
                let target_raw = inner.split('|').next().unwrap_or("");
                if !is_skipped_namespace(target_raw) {
                    let t = canonicalize_title(target_raw);
                    if !t.is_empty() {
                        member_titles.insert(t);
                    }
                }
                rest = &after[end + 2..];
            }
            None => break,
        }
    }
    if member_titles.is_empty() {
        return Err(Error::EmptySubjectIndex(subject.to_string()));
    }
    Ok(SubjectIndex {
        subject: subject.to_string(),
        member_titles,
    })
}

/// Union of hyperlink targets in the Rationale column of the laureate
/// tables on the given pages.
pub fn parse_nobel_lists(pages: &[RawArticle]) -> Result<NobelNodeSet> {
    let mut prize_titles = BTreeSet::new();
    for page in pages {
        let links = rationale_links(page)?;
        prize_titles.extend(links);
    }
    Ok(NobelNodeSet { prize_titles })
}

fn rationale_links(page: &RawArticle) -> Result<BTreeSet<String>> {
    let clean = strip_delimited(&page.wikitext, "<!--", "-->");
    let mut found_table = false;
    let mut links = BTreeSet::new();

    for table in extract_tables(&clean) {
        let Some(col) = rationale_column(&table) else {
            continue;
        };
        found_table = true;
        for row in table.rows {
            if let Some(cell) = row.get(col) {
                let (_, cell_links) = render_text_and_links(cell);
                links.extend(cell_links);
            }
        }
    }
    if !found_table {
        return Err(Error::NoLaureatesTable(page.title.clone()));
    }
    Ok(links)
}

struct WikiTable {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn rationale_column(table: &WikiTable) -> Option<usize> {
    table
        .headers
        .iter()
        .position(|h| h.to_lowercase().contains("rationale"))
}

/// Minimal wikitable reader: '{|' to '|}', rows split on '|-', header
/// cells '!'/'!!', data cells '|'/'||'. Cell attributes before a single
/// '|' are dropped. Rowspans are not tracked.
fn extract_tables(text: &str) -> Vec<WikiTable> {
    let mut tables = Vec::new();
    let mut lines = text.lines().peekable();
    while let Some(line) = lines.next() {
        if !line.trim_start().starts_with("{|") {
            continue;
        }
        let mut headers: Vec<String> = Vec::new();
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut current: Vec<String> = Vec::new();
        for line in lines.by_ref() {
            let t = line.trim_start();
            if t.starts_with("|}") {
                break;
            } else if t.starts_with("|-") {
                if !current.is_empty() {
                    rows.push(std::mem::take(&mut current));
                }
            } else if let Some(rest) = t.strip_prefix('!') {
                for cell in rest.split("!!") {
                    headers.push(strip_cell_attrs(cell).to_string());
                }
            } else if let Some(rest) = t.strip_prefix('|') {
                if t.starts_with("|+") {
                    continue; // caption
                }
                for cell in rest.split("||") {
                    current.push(strip_cell_attrs(cell).to_string());
                }
            } else if let Some(last) = current.last_mut() {
                // continuation line of a multi-line cell
                last.push('\n');
                last.push_str(line);
            }
        }
        if !current.is_empty() {
            rows.push(current);
        }
        tables.push(WikiTable { headers, rows });
    }
    tables
}

/// Drop "attr=value |" prefixes from a cell when the part before the
/// first pipe looks like attributes rather than content.
fn strip_cell_attrs(cell: &str) -> &str {
    if let Some((head, tail)) = cell.split_once('|') {
        if head.contains('=') && !head.contains("[[") {
            return tail.trim();
        }
    }
    cell.trim()
}

//! Multistream dump reader. The index file maps titles to the byte
//! offsets of independent bz2 blocks inside the dump, so a wanted
//! article costs one seek and one small decompression rather than a
//! full pass.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use bzip2::read::{BzDecoder, MultiBzDecoder};
use quick_xml::events::Event;

use crate::error::{Error, Result};

use super::{canonicalize_title, RawArticle};

/// Scan the bz2 index for the wanted titles. Lines are
/// "offset:page_id:title"; titles may themselves contain colons.
fn scan_index(index_path: &Path, wanted: &BTreeSet<String>) -> Result<HashMap<String, u64>> {
    let file = File::open(index_path)?;
    let reader = BufReader::new(MultiBzDecoder::new(file));
    let mut found = HashMap::new();
    for line in reader.lines() {
        let line = line?;
        let mut parts = line.splitn(3, ':');
        let (Some(offset), Some(_page_id), Some(title)) =
            (parts.next(), parts.next(), parts.next())
        else {
            continue;
        };
        let title = canonicalize_title(title);
        if wanted.contains(&title) {
            if let Ok(off) = offset.parse::<u64>() {
                found.insert(title, off);
            }
        }
    }
    Ok(found)
}

/// Decode one bz2 block and return the wanted pages found in it.
fn read_block(dump_path: &Path, offset: u64, wanted: &HashSet<&str>) -> Result<Vec<RawArticle>> {
    let mut file = File::open(dump_path)?;
    file.seek(SeekFrom::Start(offset))?;
    let mut xml = String::new();
    BzDecoder::new(BufReader::new(file))
        .read_to_string(&mut xml)
        .map_err(|e| Error::MalformedStream {
            offset,
            reason: e.to_string(),
        })?;
    parse_pages(&xml, wanted).map_err(|reason| Error::MalformedStream { offset, reason })
}

/// Parse a fragment of `<page>` elements (no enclosing root).
fn parse_pages(xml: &str, wanted: &HashSet<&str>) -> std::result::Result<Vec<RawArticle>, String> {
    let mut reader = quick_xml::Reader::from_str(xml);
    reader.config_mut().trim_text(false);
    let mut out = Vec::new();
    let mut title = String::new();
    let mut text = String::new();
    let mut redirect: Option<String> = None;
    let mut in_page = false;
    let mut field: Option<&'static str> = None;
    loop {
        match reader.read_event().map_err(|e| e.to_string())? {
            Event::Start(e) => match e.name().as_ref() {
                b"page" => {
                    in_page = true;
                    title.clear();
                    text.clear();
                    redirect = None;
                }
                b"title" if in_page => field = Some("title"),
                b"text" if in_page => field = Some("text"),
                _ => field = None,
            },
            Event::Empty(e) if e.name().as_ref() == b"redirect" && in_page => {
                for attr in e.attributes().flatten() {
                    if attr.key.as_ref() == b"title" {
                        let value = attr
                            .unescape_value()
                            .map_err(|e| e.to_string())?
                            .into_owned();
                        redirect = Some(canonicalize_title(&value));
                    }
                }
            }
            Event::Text(t) => {
                if let Some(f) = field {
                    let chunk = t.unescape().map_err(|e| e.to_string())?;
                    match f {
                        "title" => title.push_str(&chunk),
                        "text" => text.push_str(&chunk),
                        _ => {}
                    }
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"page" => {
                    in_page = false;
                    let canonical = canonicalize_title(&title);
                    if wanted.contains(canonical.as_str()) {
                        out.push(RawArticle {
                            title: canonical,
                            wikitext: std::mem::take(&mut text),
                            redirect_target: redirect.take(),
                        });
                    }
                }
                b"title" | b"text" => field = None,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(out)
}

/// Streaming reader over the wanted articles of a multistream dump.
///
/// Yields every wanted article found in the dump, then the targets of
/// any redirects among them (one level). Titles absent from the index
/// are reported through [`DumpStream::missing`], not as errors.
pub struct DumpStream {
    dump_path: PathBuf,
    index_path: PathBuf,
    /// Offset -> titles still to extract there, ascending for locality.
    queue: BTreeMap<u64, Vec<String>>,
    buffer: Vec<RawArticle>,
    yielded: BTreeSet<String>,
    redirect_targets: BTreeSet<String>,
    missing: Vec<String>,
    resolving_redirects: bool,
}

impl DumpStream {
    fn enqueue(&mut self, titles: &BTreeSet<String>) -> Result<()> {
        let offsets = scan_index(&self.index_path, titles)?;
        for title in titles {
            match offsets.get(title) {
                Some(&off) => self.queue.entry(off).or_default().push(title.clone()),
                None => self.missing.push(title.clone()),
            }
        }
        Ok(())
    }

    /// Titles that had no index entry. Grows as redirect targets are
    /// resolved; complete once the stream is exhausted.
    pub fn missing(&self) -> &[String] {
        &self.missing
    }

    fn refill(&mut self) -> Result<bool> {
        loop {
            if let Some((&offset, _)) = self.queue.iter().next() {
                let titles = self.queue.remove(&offset).unwrap();
                let wanted: HashSet<&str> = titles.iter().map(|s| s.as_str()).collect();
                let mut block = read_block(&self.dump_path, offset, &wanted)?;
                block.sort_by(|a, b| a.title.cmp(&b.title));
                for art in &block {
                    self.yielded.insert(art.title.clone());
                    if let Some(t) = &art.redirect_target {
                        self.redirect_targets.insert(t.clone());
                    }
                }
                // block pages found at this offset may miss some titles
                // (stale index); report them absent
                for t in titles {
                    if !block.iter().any(|a| a.title == t) {
                        self.missing.push(t);
                    }
                }
                if block.is_empty() {
                    continue;
                }
                block.reverse();
                self.buffer = block;
                return Ok(true);
            }
            if !self.resolving_redirects {
                self.resolving_redirects = true;
                let pending: BTreeSet<String> = self
                    .redirect_targets
                    .iter()
                    .filter(|t| !self.yielded.contains(*t))
                    .cloned()
                    .collect();
                if !pending.is_empty() {
                    self.enqueue(&pending)?;
                    continue;
                }
            }
            return Ok(false);
        }
    }
}

impl Iterator for DumpStream {
    type Item = Result<RawArticle>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.buffer.is_empty() {
            match self.refill() {
                Ok(true) => {}
                Ok(false) => return None,
                Err(e) => return Some(Err(e)),
            }
        }
        self.buffer.pop().map(Ok)
    }
}

/// Open a multistream dump pair and stream the wanted articles.
pub fn read_dump(
    dump_path: &Path,
    index_path: &Path,
    wanted: &BTreeSet<String>,
) -> Result<DumpStream> {
    let mut stream = DumpStream {
        dump_path: dump_path.to_path_buf(),
        index_path: index_path.to_path_buf(),
        queue: BTreeMap::new(),
        buffer: Vec::new(),
        yielded: BTreeSet::new(),
        redirect_targets: BTreeSet::new(),
        missing: Vec::new(),
        resolving_redirects: false,
    };
    stream.enqueue(wanted)?;
    Ok(stream)
}

//! Corpus loading, text normalization and the immutable query-time index.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::Exec;
use crate::sensors::pagerank::{pagerank, PageRankParams};

const STOPWORDS: &[&str] = &[
    "a", "about", "an", "and", "are", "as", "at", "be", "been", "but", "by", "can", "do", "does",
    "for", "from", "has", "have", "how", "in", "into", "is", "it", "its", "not", "of", "on", "or",
    "our", "over", "so", "such", "than", "that", "the", "their", "then", "there", "these", "they",
    "this", "those", "to", "under", "up", "via", "was", "we", "were", "what", "when", "where",
    "which", "while", "who", "why", "will", "with", "within", "without", "you",
];

const MIN_TOKEN_CHARS: usize = 2;

fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// Lowercases, splits on every non-alphanumeric character and drops short
/// tokens and stopwords. Order and repetitions are preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS && !is_stopword(t))
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VenueKind {
    Conference,
    Journal,
}

/// One bibliographic record. Serializes to exactly the corpus line format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Publication {
    pub pub_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub authors: Vec<String>,
    pub year: i32,
    pub venue: String,
    pub venue_kind: VenueKind,
    pub references: Vec<String>,
}

impl Publication {
    pub fn new<I, S>(pub_id: &str, title: &str, authors: I, year: i32) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Publication {
            pub_id: pub_id.to_owned(),
            title: title.to_owned(),
            abstract_text: None,
            authors: authors.into_iter().map(Into::into).collect(),
            year,
            venue: String::new(),
            venue_kind: VenueKind::Conference,
            references: Vec::new(),
        }
    }

    pub fn with_abstract(mut self, text: &str) -> Self {
        self.abstract_text = Some(text.to_owned());
        self
    }

    pub fn with_venue(mut self, venue: &str, kind: VenueKind) -> Self {
        self.venue = venue.to_owned();
        self.venue_kind = kind;
        self
    }

    pub fn with_references<I, S>(mut self, refs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.references = refs.into_iter().map(Into::into).collect();
        self
    }

    /// Title followed by the abstract, when there is one.
    pub fn indexed_text(&self) -> String {
        match &self.abstract_text {
            Some(a) if !a.is_empty() => format!("{} {}", self.title, a),
            _ => self.title.clone(),
        }
    }

    pub fn is_journal(&self) -> bool {
        self.venue_kind == VenueKind::Journal
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.pub_id.is_empty() {
            return Err("empty pub_id".into());
        }
        if self.authors.is_empty() {
            return Err(format!("`{}` has no authors", self.pub_id));
        }
        let mut seen = BTreeSet::new();
        for a in &self.authors {
            if a.is_empty() {
                return Err(format!("`{}` has an empty author id", self.pub_id));
            }
            if !seen.insert(a.as_str()) {
                return Err(format!("`{}` lists author `{a}` twice", self.pub_id));
            }
        }
        if self.year <= 0 {
            return Err(format!("`{}` has non-positive year {}", self.pub_id, self.year));
        }
        Ok(())
    }

    /// Drops self-citations in place and returns how many were removed.
    fn drop_self_citations(&mut self) -> usize {
        let before = self.references.len();
        let id = self.pub_id.clone();
        self.references.retain(|r| *r != id);
        before - self.references.len()
    }
}

/// A normalized topic query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub raw: String,
    pub terms: Vec<String>,
}

impl Query {
    pub fn parse(raw: &str) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let terms: Vec<String> = tokenize(raw)
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect();
        if terms.is_empty() {
            return Err(Error::EmptyQuery(raw.to_owned()));
        }
        Ok(Query {
            raw: raw.to_owned(),
            terms,
        })
    }
}

/// Publications read from a corpus file plus load-time warning counts.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub publications: Vec<Publication>,
    pub self_citations_dropped: usize,
    /// References to pub_ids absent from the corpus. They stay in the
    /// records but never enter the citation graph.
    pub dangling_references: usize,
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<LoadReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_corpus(file).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_owned(),
            source,
        },
        other => other,
    })
}

pub fn read_corpus<R: Read>(reader: R) -> Result<LoadReport> {
    let mut report = LoadReport::default();
    let mut first_line = BTreeMap::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|source| Error::Io {
            path: Default::default(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut publication: Publication =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
        publication
            .validate()
            .map_err(|message| Error::MalformedLine {
                line: line_no,
                message,
            })?;
        if first_line
            .insert(publication.pub_id.clone(), line_no)
            .is_some()
        {
            return Err(Error::DuplicatePubId {
                line: line_no,
                pub_id: publication.pub_id,
            });
        }
        report.self_citations_dropped += publication.drop_self_citations();
        report.publications.push(publication);
    }
    report.dangling_references = report
        .publications
        .iter()
        .flat_map(|p| &p.references)
        .filter(|r| !first_line.contains_key(r.as_str()))
        .count();
    Ok(report)
}

pub fn write_corpus<W: Write>(mut writer: W, pubs: &[Publication]) -> Result<()> {
    for p in pubs {
        let line = serde_json::to_string(p).expect("publication serializes");
        writeln!(writer, "{line}").map_err(|source| Error::Io {
            path: Default::default(),
            source,
        })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DocId(pub u32);

impl DocId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: DocId,
    pub tf: u32,
}

/// Directed citation graph over the documents of an index. Edges run from
/// the citing document to the cited one; self-links and dangling
/// references are never present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CitationGraph {
    cites: Vec<Vec<DocId>>,
    cited_by: Vec<Vec<DocId>>,
}

impl CitationGraph {
    /// Builds a graph over `nodes` documents. Self-loops and duplicate
    /// edges are dropped.
    pub fn from_edges(nodes: usize, edges: impl IntoIterator<Item = (DocId, DocId)>) -> Self {
        let mut cites: Vec<BTreeSet<DocId>> = vec![BTreeSet::new(); nodes];
        for (from, to) in edges {
            assert!(from.index() < nodes && to.index() < nodes, "edge out of range");
            if from != to {
                cites[from.index()].insert(to);
            }
        }
        let mut cited_by = vec![Vec::new(); nodes];
        for (from, targets) in cites.iter().enumerate() {
            for to in targets {
                cited_by[to.index()].push(DocId(from as u32));
            }
        }
        CitationGraph {
            cites: cites.into_iter().map(|s| s.into_iter().collect()).collect(),
            cited_by,
        }
    }

    pub fn node_count(&self) -> usize {
        self.cites.len()
    }

    pub fn edge_count(&self) -> usize {
        self.cites.iter().map(Vec::len).sum()
    }

    /// Documents cited by `doc`.
    pub fn cites(&self, doc: DocId) -> &[DocId] {
        &self.cites[doc.index()]
    }

    /// Documents citing `doc`, ascending.
    pub fn cited_by(&self, doc: DocId) -> &[DocId] {
        &self.cited_by[doc.index()]
    }
}

/// Immutable query-time view over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pubs: Vec<Publication>,
    doc_lookup: BTreeMap<String, DocId>,
    vocabulary: Vec<String>,
    term_lookup: BTreeMap<String, TermId>,
    postings: Vec<Vec<Posting>>,
    /// Per document: (term, frequency), sorted by term id.
    doc_terms: Vec<Vec<(TermId, u32)>>,
    doc_len: Vec<u32>,
    avg_doc_len: f64,
    author_pubs: BTreeMap<String, Vec<DocId>>,
    coauthors: BTreeMap<String, BTreeSet<String>>,
    graph: CitationGraph,
    pagerank: Vec<f64>,
    now_year: i32,
}

pub fn build_index(mut pubs: Vec<Publication>) -> Result<Index> {
    if pubs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut doc_lookup = BTreeMap::new();
    for (i, p) in pubs.iter_mut().enumerate() {
        p.validate().map_err(Error::InvalidInput)?;
        p.drop_self_citations();
        if doc_lookup.insert(p.pub_id.clone(), DocId(i as u32)).is_some() {
            return Err(Error::DuplicatePubId {
                line: i + 1,
                pub_id: p.pub_id.clone(),
            });
        }
    }

    let mut vocabulary = Vec::new();
    let mut term_lookup: BTreeMap<String, TermId> = BTreeMap::new();
    let mut postings: Vec<Vec<Posting>> = Vec::new();
    let mut doc_terms = Vec::with_capacity(pubs.len());
    let mut doc_len = Vec::with_capacity(pubs.len());
    for (i, p) in pubs.iter().enumerate() {
        let tokens = tokenize(&p.indexed_text());
        doc_len.push(tokens.len() as u32);
        let mut counts: BTreeMap<TermId, u32> = BTreeMap::new();
        for tok in tokens {
            let next = TermId(vocabulary.len() as u32);
            let id = *term_lookup.entry(tok.clone()).or_insert_with(|| {
                vocabulary.push(tok);
                postings.push(Vec::new());
                next
            });
            *counts.entry(id).or_default() += 1;
        }
        for (&term, &tf) in &counts {
            postings[term.0 as usize].push(Posting {
                doc: DocId(i as u32),
                tf,
            });
        }
        doc_terms.push(counts.into_iter().collect());
    }
    let avg_doc_len = doc_len.iter().map(|&l| l as f64).sum::<f64>() / pubs.len() as f64;

    let mut author_pubs: BTreeMap<String, Vec<DocId>> = BTreeMap::new();
    let mut coauthors: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, p) in pubs.iter().enumerate() {
        for a in &p.authors {
            author_pubs.entry(a.clone()).or_default().push(DocId(i as u32));
            let others = coauthors.entry(a.clone()).or_default();
            others.extend(p.authors.iter().filter(|b| *b != a).cloned());
        }
    }

    let edges = pubs.iter().enumerate().flat_map(|(i, p)| {
        let lookup = &doc_lookup;
        p.references
            .iter()
            .filter_map(move |r| lookup.get(r).map(|&to| (DocId(i as u32), to)))
    });
    let graph = CitationGraph::from_edges(pubs.len(), edges);
    let pagerank = pagerank(&graph, PageRankParams::default(), Exec::Sequential)?;
    let now_year = pubs.iter().map(|p| p.year).max().unwrap_or(0);

    Ok(Index {
        pubs,
        doc_lookup,
        vocabulary,
        term_lookup,
        postings,
        doc_terms,
        doc_len,
        avg_doc_len,
        author_pubs,
        coauthors,
        graph,
        pagerank,
        now_year,
    })
}

const ARTIFACT_MAGIC: &[u8; 8] = b"EXPIDX\0\0";
const ARTIFACT_VERSION: u32 = 1;

impl Index {
    pub fn num_docs(&self) -> usize {
        self.pubs.len()
    }

    pub fn publications(&self) -> &[Publication] {
        &self.pubs
    }

    pub fn doc(&self, doc: DocId) -> &Publication {
        &self.pubs[doc.index()]
    }

    pub fn doc_id(&self, pub_id: &str) -> Option<DocId> {
        self.doc_lookup.get(pub_id).copied()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = DocId> {
        (0..self.pubs.len() as u32).map(DocId)
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.term_lookup.get(term).copied()
    }

    pub fn term(&self, term: TermId) -> &str {
        &self.vocabulary[term.0 as usize]
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_id(term)
            .map(|t| self.postings[t.0 as usize].as_slice())
            .unwrap_or(&[])
    }

    pub fn doc_terms(&self, doc: DocId) -> &[(TermId, u32)] {
        &self.doc_terms[doc.index()]
    }

    /// Frequency of `term` in the indexed text of `doc`.
    pub fn tf(&self, term: &str, doc: DocId) -> u32 {
        let Some(t) = self.term_id(term) else {
            return 0;
        };
        let terms = &self.doc_terms[doc.index()];
        terms
            .binary_search_by_key(&t, |&(id, _)| id)
            .map(|i| terms[i].1)
            .unwrap_or(0)
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn doc_len(&self, doc: DocId) -> u32 {
        self.doc_len[doc.index()]
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn authors(&self) -> impl Iterator<Item = &str> {
        self.author_pubs.keys().map(String::as_str)
    }

    pub fn num_authors(&self) -> usize {
        self.author_pubs.len()
    }

    pub fn author_pubs(&self, author: &str) -> &[DocId] {
        self.author_pubs
            .get(author)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn coauthors(&self, author: &str) -> Option<&BTreeSet<String>> {
        self.coauthors.get(author)
    }

    pub fn citation_graph(&self) -> &CitationGraph {
        &self.graph
    }

    /// Documents citing `doc`.
    pub fn citation_in(&self, doc: DocId) -> &[DocId] {
        self.graph.cited_by(doc)
    }

    pub fn citation_count(&self, doc: DocId) -> usize {
        self.graph.cited_by(doc).len()
    }

    /// PageRank of `doc` over the whole citation graph, computed at build
    /// time with the default parameters.
    pub fn pagerank(&self, doc: DocId) -> f64 {
        self.pagerank[doc.index()]
    }

    /// Reference year for every age-based event: the latest publication
    /// year in the corpus.
    pub fn now_year(&self) -> i32 {
        self.now_year
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(ARTIFACT_MAGIC);
        out.extend_from_slice(&ARTIFACT_VERSION.to_le_bytes());
        bincode::serialize_into(&mut out, self).expect("index serializes");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = ARTIFACT_MAGIC.len() + 4;
        if bytes.len() < header || &bytes[..ARTIFACT_MAGIC.len()] != ARTIFACT_MAGIC {
            return Err(Error::Artifact("not an index artifact".into()));
        }
        let version = u32::from_le_bytes(bytes[ARTIFACT_MAGIC.len()..header].try_into().unwrap());
        if version != ARTIFACT_VERSION {
            return Err(Error::Artifact(format!(
                "unsupported version {version}, expected {ARTIFACT_VERSION}"
            )));
        }
        bincode::deserialize(&bytes[header..]).map_err(|e| Error::Artifact(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}

/// Every document containing at least one query term.
pub fn match_documents(index: &Index, q: &Query) -> BTreeSet<DocId> {
    q.terms
        .iter()
        .flat_map(|t| index.postings(t).iter().map(|p| p.doc))
        .collect()
}

/// Authors of the matched documents.
pub fn candidates_for_query(index: &Index, q: &Query) -> BTreeSet<String> {
    match_documents(index, q)
        .into_iter()
        .flat_map(|d| index.doc(d).authors.iter().cloned())
        .collect()
}

//! Seeded synthetic corpus with planted experts and matching qrels.
//!
//! Every topic owns a small vocabulary and a handful of experts. Experts
//! publish more on their topic, more often in journals, start earlier and
//! attract more citations. Everyone else writes on a home topic some of the
//! time, so query terms alone do not identify the experts.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Publication, VenueKind};
use crate::evaluation::Qrels;

const TOPIC_WORDS: [[&str; 6]; 10] = [
    ["retrieval", "ranking", "relevance", "query", "search", "indexing"],
    ["neural", "network", "learning", "training", "gradient", "deep"],
    ["graph", "vertex", "edge", "traversal", "shortest", "spanning"],
    ["database", "transaction", "schema", "relational", "storage", "sql"],
    ["compiler", "parsing", "optimization", "register", "bytecode", "lexer"],
    ["wireless", "routing", "protocol", "packet", "latency", "bandwidth"],
    ["cryptography", "encryption", "signature", "cipher", "privacy", "attack"],
    ["vision", "image", "segmentation", "pixel", "camera", "recognition"],
    ["robot", "motion", "planning", "sensor", "control", "navigation"],
    ["genome", "protein", "sequence", "alignment", "biology", "gene"],
];

const FILLER: [&str; 24] = [
    "approach", "method", "framework", "analysis", "system", "model", "novel", "efficient",
    "evaluation", "study", "improved", "scalable", "results", "design", "towards", "practical",
    "general", "applications", "algorithm", "empirical", "distributed", "adaptive", "robust", "survey",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub publications: usize,
    pub authors: usize,
    /// At most the number of built-in topic vocabularies (10).
    pub topics: usize,
    pub experts_per_topic: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            publications: 2000,
            authors: 400,
            topics: 10,
            experts_per_topic: 5,
            first_year: 1990,
            last_year: 2010,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub publications: Vec<Publication>,
    /// One query per topic, judged relevant for that topic's experts.
    pub qrels: Qrels,
}

struct Author {
    id: String,
    home: usize,
    expert: bool,
    start: i32,
}

/// Query text used for a topic.
pub fn topic_query(topic: usize) -> String {
    let w = &TOPIC_WORDS[topic % TOPIC_WORDS.len()];
    format!("{} {}", w[0], w[1])
}

pub fn generate(config: &SyntheticConfig) -> SyntheticCorpus {
    let topics = config.topics.clamp(1, TOPIC_WORDS.len());
    let experts = (topics * config.experts_per_topic).min(config.authors);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let span = (config.last_year - config.first_year).max(0);

    let authors: Vec<Author> = (0..config.authors)
        .map(|i| {
            let expert = i < experts;
            let home = if expert { i % topics } else { rng.random_range(0..topics) };
            let start = if expert {
                config.first_year + rng.random_range(0..=span / 3)
            } else {
                config.first_year + rng.random_range(0..=span)
            };
            Author {
                id: format!("a{i:04}"),
                home,
                expert,
                start,
            }
        })
        .collect();
    let lead_weights: Vec<f64> = authors.iter().map(|a| if a.expert { 5.0 } else { 1.0 }).collect();
    let lead_pick = WeightedIndex::new(&lead_weights).expect("positive weights");

    // (year, topic, any expert of that topic among the authors)
    let mut meta: Vec<(i32, Option<usize>, bool)> = Vec::with_capacity(config.publications);
    let mut pubs = Vec::with_capacity(config.publications);
    for p in 0..config.publications {
        let lead = &authors[lead_pick.sample(&mut rng)];
        let roll: f64 = rng.random();
        let topic = if lead.expert {
            (roll < 0.85).then_some(lead.home)
        } else if roll < 0.35 {
            Some(lead.home)
        } else if roll < 0.5 {
            Some(rng.random_range(0..topics))
        } else {
            None
        };

        let mut names = vec![lead.id.clone()];
        for _ in 0..rng.random_range(0..=3) {
            let co = if let (Some(t), true) = (topic, rng.random_bool(0.5)) {
                // collaborators from the same topic community
                let same: Vec<&Author> = authors.iter().filter(|a| a.home == t && !a.expert).collect();
                same.choose(&mut rng).map(|a| a.id.clone())
            } else {
                authors.choose(&mut rng).map(|a| a.id.clone())
            };
            if let Some(c) = co {
                if !names.contains(&c) {
                    names.push(c);
                }
            }
        }

        let year = rng.random_range(lead.start.min(config.last_year)..=config.last_year);
        let mut title: Vec<&str> = Vec::new();
        if let Some(t) = topic {
            let k = if lead.expert { 3 } else { 2 };
            title.extend(TOPIC_WORDS[t].choose_multiple(&mut rng, k).copied());
        }
        let fill = rng.random_range(2..=4);
        title.extend(FILLER.choose_multiple(&mut rng, fill).copied());
        title.shuffle(&mut rng);

        let mut publication = Publication::new(&format!("p{p:05}"), &title.join(" "), names.clone(), year);
        if rng.random_bool(0.5) {
            let mut words: Vec<&str> = FILLER.choose_multiple(&mut rng, 8).copied().collect();
            if let Some(t) = topic {
                words.extend(TOPIC_WORDS[t].choose_multiple(&mut rng, 3).copied());
            }
            words.shuffle(&mut rng);
            publication = publication.with_abstract(&words.join(" "));
        }
        let journal = rng.random_bool(if lead.expert { 0.45 } else { 0.15 });
        let (venue, kind) = match (topic, journal) {
            (Some(t), true) => (format!("J-T{t}"), VenueKind::Journal),
            (Some(t), false) => (format!("C-T{t}-{}", rng.random_range(0..2)), VenueKind::Conference),
            (None, true) => ("J-GEN".to_owned(), VenueKind::Journal),
            (None, false) => ("C-GEN".to_owned(), VenueKind::Conference),
        };
        publication = publication.with_venue(&venue, kind);

        let by_expert = topic.is_some_and(|t| {
            names
                .iter()
                .any(|n| authors.iter().any(|a| &a.id == n && a.expert && a.home == t))
        });
        meta.push((year, topic, by_expert));
        pubs.push(publication);
    }

    // citations only point to strictly older work, preferring the same
    // topic and papers written by that topic's experts
    for p in 0..pubs.len() {
        let (year, topic, _) = meta[p];
        let older: Vec<usize> = (0..pubs.len()).filter(|&q| meta[q].0 < year).collect();
        if older.is_empty() {
            continue;
        }
        let weights: Vec<f64> = older
            .iter()
            .map(|&q| {
                let (_, qt, qe) = meta[q];
                let same = topic.is_some() && qt == topic;
                let w = if same { 6.0 } else { 1.0 };
                if qe { w * 4.0 } else { w }
            })
            .collect();
        let pick = WeightedIndex::new(&weights).expect("positive weights");
        let mut refs = BTreeSet::new();
        for _ in 0..rng.random_range(0..=8) {
            refs.insert(older[pick.sample(&mut rng)]);
        }
        let ids: Vec<String> = refs.into_iter().map(|q| pubs[q].pub_id.clone()).collect();
        pubs[p] = pubs[p].clone().with_references(ids);
    }

    let mut qrels = Qrels::new();
    for t in 0..topics {
        let q = topic_query(t);
        for a in authors.iter().filter(|a| a.expert && a.home == t) {
            qrels.add(&q, &a.id);
        }
    }
    SyntheticCorpus {
        publications: pubs,
        qrels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_index;

    #[test]
    fn seeded_and_well_formed() {
        let cfg = SyntheticConfig {
            publications: 300,
            authors: 80,
            ..Default::default()
        };
        let a = generate(&cfg);
        assert_eq!(a, generate(&cfg));
        assert_ne!(a, generate(&SyntheticConfig { seed: 8, ..cfg.clone() }));
        assert_eq!(a.publications.len(), 300);
        assert_eq!(a.qrels.len(), 10);
        for (_, rel) in a.qrels.queries() {
            assert_eq!(rel.len(), 5);
        }
        let index = build_index(a.publications).unwrap();
        assert!(index.citation_graph().edge_count() > 0);
    }
}

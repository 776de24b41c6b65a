//! Multisensor expert finding for academic publication corpora.
//!
//! Candidates for a topic query are the authors of every publication that
//! mentions a query term. Three sensors then score those candidates:
//!
//! - [`SensorKind::Text`]: query-document similarity events (term frequency,
//!   BM25, Jaccard, venue-level scores, ...).
//! - [`SensorKind::Profile`]: publication-record events (counts, career
//!   span, recency).
//! - [`SensorKind::Citation`]: impact events (citation counts, the h-index
//!   family, PageRank over the citation graph).
//!
//! Inside a sensor the event columns are merged with a rank aggregation
//! method ([`fusion`]). Across sensors the fused lists become
//! Dempster-Shafer mass functions whose uncertainty mass comes from the
//! Shannon entropy of each sensor ([`evidence`]), and those are combined with
//! Dempster's rule into the final ranking.
//!
//! The [`pipeline`] module wires everything together, and [`evaluation`]
//! scores the output against relevance judgments.
//!
//! ```
//! use expertise::corpus::{build_index, Publication, Query, VenueKind};
//! use expertise::pipeline::{search, RunConfig};
//!
//! let pubs = vec![
//!     Publication::new("p1", "Information retrieval models", ["ana"], 2004)
//!         .with_venue("SIGIR", VenueKind::Conference),
//!     Publication::new("p2", "Retrieval evaluation", ["ana", "bo"], 2005)
//!         .with_references(["p1"]),
//!     Publication::new("p3", "Graph databases", ["cy"], 2005),
//! ];
//! let index = build_index(pubs).unwrap();
//! let query = Query::parse("information retrieval").unwrap();
//! let outcome = search(&index, &query, &RunConfig::default()).unwrap();
//! assert_eq!(outcome.ranking.entries[0].0, "ana");
//! ```

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod evidence;
pub mod fusion;
pub mod parallel;
pub mod pipeline;
pub mod sensors;
pub mod synthetic;

pub use error::{Error, Result};
pub use parallel::Exec;
pub use sensors::{EventScoreTable, SensorKind};

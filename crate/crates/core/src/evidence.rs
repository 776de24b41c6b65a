//! Cross-sensor evidence combination.
//!
//! Each sensor's fused list becomes a mass function over singleton
//! candidates plus the whole frame θ. The θ mass measures how uncertain the
//! sensor is, from the Shannon entropy of its relevant-event pattern.
//! Sensors are then merged with Dempster's rule.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fusion::{fuse_with, FusionMethod, RankedList};
use crate::parallel::Exec;
use crate::sensors::{min_max_normalize, EventScoreTable, SensorKind};

const MASS_TOLERANCE: f64 = 1e-9;
const TOTAL_CONFLICT: f64 = 1.0 - 1e-12;
const TABLEAU_MAX_FRAME: usize = 12;

/// Basic belief assignment restricted to singletons and θ. The empty set
/// implicitly carries zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    label: String,
    frame: Vec<String>,
    singletons: Vec<f64>,
    theta: f64,
}

impl MassFunction {
    /// `frame` and `singletons` are parallel; the frame is re-sorted.
    pub fn new(
        label: impl Into<String>,
        frame: Vec<String>,
        singletons: Vec<f64>,
        theta: f64,
    ) -> Result<Self> {
        if frame.len() != singletons.len() {
            return Err(Error::InvalidMass(format!(
                "{} candidates but {} singleton masses",
                frame.len(),
                singletons.len()
            )));
        }
        if frame.is_empty() {
            return Err(Error::InvalidMass("empty frame".into()));
        }
        let mut pairs: Vec<(String, f64)> = frame.into_iter().zip(singletons).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMass("duplicate candidate in frame".into()));
        }
        let (frame, singletons): (Vec<String>, Vec<f64>) = pairs.into_iter().unzip();
        let m = MassFunction {
            label: label.into(),
            frame,
            singletons,
            theta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_pairs<S: Into<String>>(
        label: impl Into<String>,
        pairs: impl IntoIterator<Item = (S, f64)>,
        theta: f64,
    ) -> Result<Self> {
        let (frame, masses): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(s, m)| (s.into(), m)).unzip();
        Self::new(label, frame, masses, theta)
    }

    /// All mass on θ: total ignorance.
    pub fn vacuous(label: impl Into<String>, frame: Vec<String>) -> Result<Self> {
        let n = frame.len();
        Self::new(label, frame, vec![0.0; n], 1.0)
    }

    fn validate(&self) -> Result<()> {
        let all = self.singletons.iter().chain(std::iter::once(&self.theta));
        if let Some(bad) = all.clone().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidMass(format!("mass {bad} outside [0, 1]")));
        }
        let total: f64 = all.sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}")));
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn singletons(&self) -> &[f64] {
        &self.singletons
    }

    pub fn singleton(&self, id: &str) -> f64 {
        self.position(id).map_or(0.0, |i| self.singletons[i])
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn total(&self) -> f64 {
        self.singletons.iter().sum::<f64>() + self.theta
    }

    fn position(&self, id: &str) -> Option<usize> {
        self.frame.binary_search_by(|c| c.as_str().cmp(id)).ok()
    }

    /// Candidates ranked by singleton mass.
    pub fn ranking(&self, method: FusionMethod) -> RankedList {
        RankedList::from_scores(
            method,
            self.frame.iter().cloned().zip(self.singletons.iter().copied()).collect(),
        )
    }
}

/// Sum of the singleton masses inside `subset`, plus θ when the subset is
/// the whole frame. Ids outside the frame are ignored.
pub fn belief<S: AsRef<str>>(m: &MassFunction, subset: &[S]) -> f64 {
    let members: BTreeSet<usize> = subset.iter().filter_map(|s| m.position(s.as_ref())).collect();
    let singles: f64 = members.iter().map(|&i| m.singletons[i]).sum();
    if members.len() == m.frame.len() {
        singles + m.theta
    } else {
        singles
    }
}

/// Mass of every focal element meeting `subset`; zero for the empty set.
pub fn plausibility<S: AsRef<str>>(m: &MassFunction, subset: &[S]) -> f64 {
    let members: BTreeSet<usize> = subset.iter().filter_map(|s| m.position(s.as_ref())).collect();
    if members.is_empty() {
        return 0.0;
    }
    members.iter().map(|&i| m.singletons[i]).sum::<f64>() + m.theta
}

/// Shannon entropy of a sensor's relevant-event pattern and its maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyStats {
    pub entropy: f64,
    pub max_entropy: f64,
}

impl EntropyStats {
    /// H / MaxH: the sensor's share of uncertainty.
    pub fn ratio(self) -> f64 {
        self.entropy / self.max_entropy
    }
}

/// Groups relevant events (raw score > 0) per candidate:
/// p_a = r_a / (N·T), H = -Σ p_a log2 p_a, MaxH = log2(N·T).
pub fn sensor_entropy(table: &EventScoreTable) -> Result<EntropyStats> {
    let cells = table.num_candidates() * table.num_events();
    if cells == 0 {
        return Err(Error::Shape("entropy of an empty table".into()));
    }
    if cells == 1 {
        return Err(Error::SingleCellEntropy);
    }
    let total = cells as f64;
    let entropy = -(0..table.num_candidates())
        .map(|a| table.raw_row(a).iter().filter(|&&v| v > 0.0).count())
        .filter(|&r| r > 0)
        .map(|r| {
            let p = r as f64 / total;
            p * p.log2()
        })
        .sum::<f64>();
    Ok(EntropyStats {
        entropy: entropy.max(0.0),
        max_entropy: total.log2(),
    })
}

/// What [`build_mass_functions`] needs from one sensor.
#[derive(Debug, Clone, Copy)]
pub struct SensorEvidence<'a> {
    pub label: &'a str,
    pub fused: &'a RankedList,
    pub entropy: EntropyStats,
}

/// Turns fused sensor lists into mass functions over `frame`.
///
/// θ mass is each sensor's H/MaxH divided by the sum over all sensors
/// (with a single sensor, H/MaxH itself). Singleton masses are the fused
/// scores rescaled to fill the rest. Condorcet win counts are min-max
/// normalized first. A sensor whose fused scores are all zero puts all of
/// its mass on θ.
pub fn build_mass_functions(sensors: &[SensorEvidence<'_>], frame: &[String]) -> Result<Vec<MassFunction>> {
    if sensors.is_empty() {
        return Err(Error::InvalidInput("no sensors to build masses from".into()));
    }
    let weights: Vec<f64> = sensors.iter().map(|s| s.entropy.ratio()).collect();
    let weight_sum: f64 = weights.iter().sum();
    let scores: Vec<Vec<f64>> = sensors
        .iter()
        .map(|s| fused_scores_on_frame(s.fused, frame))
        .collect::<Result<_>>()?;
    let totals: Vec<f64> = scores.iter().map(|v| v.iter().sum()).collect();
    if (weight_sum <= 0.0 || weight_sum.is_nan()) && totals.iter().any(|&t| t <= 0.0) {
        return Err(Error::NoEvidence);
    }

    sensors
        .iter()
        .zip(weights)
        .zip(scores.into_iter().zip(totals))
        .map(|((sensor, w), (scores, total))| {
            if total <= 0.0 {
                return MassFunction::vacuous(sensor.label, frame.to_vec());
            }
            let theta = if sensors.len() == 1 {
                w.clamp(0.0, 1.0)
            } else if weight_sum > 0.0 {
                w / weight_sum
            } else {
                0.0
            };
            let scale = (1.0 - theta) / total;
            let singletons = scores.iter().map(|s| s * scale).collect();
            MassFunction::new(sensor.label, frame.to_vec(), singletons, theta)
        })
        .collect()
}

fn fused_scores_on_frame(fused: &RankedList, frame: &[String]) -> Result<Vec<f64>> {
    let mut scores = vec![0.0; frame.len()];
    for (id, s) in &fused.entries {
        let i = frame
            .binary_search(id)
            .map_err(|_| Error::InvalidInput(format!("fused candidate `{id}` outside the frame")))?;
        scores[i] = *s;
    }
    if fused.method == FusionMethod::Condorcet {
        scores = min_max_normalize(&scores)?;
    }
    if let Some(bad) = scores.iter().find(|s| **s < 0.0 || !s.is_finite()) {
        return Err(Error::InvalidInput(format!("fused score {bad} cannot become a mass")));
    }
    Ok(scores)
}

fn check_frames(m1: &MassFunction, m2: &MassFunction) -> Result<()> {
    if m1.frame != m2.frame {
        return Err(Error::FrameMismatch {
            left: m1.label.clone(),
            right: m2.label.clone(),
        });
    }
    Ok(())
}

/// Mass the two functions jointly put on empty intersections.
pub fn conflict(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    check_frames(m1, m2)?;
    let s1: f64 = m1.singletons.iter().sum();
    let s2: f64 = m2.singletons.iter().sum();
    let agree: f64 = m1.singletons.iter().zip(&m2.singletons).map(|(a, b)| a * b).sum();
    Ok((s1 * s2 - agree).max(0.0))
}

/// Dempster's rule in closed form for singleton + θ focal elements.
pub fn ds_combine(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let k = conflict(m1, m2)?;
    if k >= TOTAL_CONFLICT {
        return Err(Error::TotalConflict {
            left: m1.label.clone(),
            right: m2.label.clone(),
            conflict: k,
        });
    }
    let norm = 1.0 - k;
    let singletons = m1
        .singletons
        .iter()
        .zip(&m2.singletons)
        .map(|(a, b)| (a * b + a * m2.theta + m1.theta * b) / norm)
        .collect();
    Ok(MassFunction {
        label: format!("{}+{}", m1.label, m2.label),
        frame: m1.frame.clone(),
        singletons,
        theta: m1.theta * m2.theta / norm,
    })
}

/// Mass over arbitrary subsets of a small frame, keyed by bitmask.
pub type FocalMasses = Vec<(u16, f64)>;

/// Dempster's rule by explicit pairwise intersection of focal elements.
/// Returns the combined focal masses and the conflict K.
pub fn tableau_combine(a: &[(u16, f64)], b: &[(u16, f64)]) -> Result<(FocalMasses, f64)> {
    let mut cells: std::collections::BTreeMap<u16, f64> = Default::default();
    let mut k = 0.0;
    for &(set_a, mass_a) in a {
        for &(set_b, mass_b) in b {
            let meet = set_a & set_b;
            if meet == 0 {
                k += mass_a * mass_b;
            } else {
                *cells.entry(meet).or_default() += mass_a * mass_b;
            }
        }
    }
    if k >= TOTAL_CONFLICT {
        return Err(Error::TotalConflict {
            left: "tableau left".into(),
            right: "tableau right".into(),
            conflict: k,
        });
    }
    Ok((cells.into_iter().map(|(s, m)| (s, m / (1.0 - k))).collect(), k))
}

/// Reference implementation of [`ds_combine`] through the full tableau.
/// Limited to frames of at most 12 candidates.
pub fn ds_combine_tableau(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    check_frames(m1, m2)?;
    let n = m1.frame.len();
    if n > TABLEAU_MAX_FRAME {
        return Err(Error::FrameTooLarge(n));
    }
    let full: u16 = ((1u32 << n) - 1) as u16;
    let focal = |m: &MassFunction| -> FocalMasses {
        let mut f: FocalMasses = m
            .singletons
            .iter()
            .enumerate()
            .map(|(i, &v)| (1u16 << i, v))
            .collect();
        f.push((full, m.theta));
        f
    };
    let (cells, _) = tableau_combine(&focal(m1), &focal(m2)).map_err(|e| match e {
        Error::TotalConflict { conflict, .. } => Error::TotalConflict {
            left: m1.label.clone(),
            right: m2.label.clone(),
            conflict,
        },
        other => other,
    })?;
    let mut singletons = vec![0.0; n];
    let mut theta = 0.0;
    for (set, mass) in cells {
        if set == full {
            theta += mass;
        } else if set.count_ones() == 1 {
            singletons[set.trailing_zeros() as usize] += mass;
        } else {
            unreachable!("singleton and frame focal elements only meet in singletons or the frame");
        }
    }
    Ok(MassFunction {
        label: format!("{}+{}", m1.label, m2.label),
        frame: m1.frame.clone(),
        singletons,
        theta,
    })
}

/// One sensor's contribution to a query.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorReport {
    pub kind: SensorKind,
    pub fused: RankedList,
    pub entropy: EntropyStats,
    pub mass: MassFunction,
}

/// Fuses each table, measures its entropy and builds the mass functions.
/// All tables must share one candidate set, which becomes the frame.
pub fn build_sensor_reports(
    tables: &[EventScoreTable],
    method: FusionMethod,
    exec: Exec,
) -> Result<Vec<SensorReport>> {
    let Some(first) = tables.first() else {
        return Err(Error::InvalidInput("no sensor tables".into()));
    };
    let frame = first.candidates().to_vec();
    if let Some(t) = tables.iter().find(|t| t.candidates() != frame.as_slice()) {
        return Err(Error::Shape(format!("{} table has a different candidate set", t.kind)));
    }
    let fused: Vec<RankedList> = tables.iter().map(|t| fuse_with(method, t, exec)).collect();
    let entropy: Vec<EntropyStats> = tables.iter().map(sensor_entropy).collect::<Result<_>>()?;
    let evidence: Vec<SensorEvidence<'_>> = tables
        .iter()
        .zip(&fused)
        .zip(&entropy)
        .map(|((t, f), e)| SensorEvidence {
            label: t.kind.name(),
            fused: f,
            entropy: *e,
        })
        .collect();
    let masses = build_mass_functions(&evidence, &frame)?;
    Ok(tables
        .iter()
        .zip(fused)
        .zip(entropy)
        .zip(masses)
        .map(|(((t, fused), entropy), mass)| SensorReport {
            kind: t.kind,
            fused,
            entropy,
            mass,
        })
        .collect())
}

/// Final result of folding the sensors together.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisensorOutcome {
    pub ranking: RankedList,
    pub combined: MassFunction,
    /// Conflict K of each successive combination.
    pub conflicts: Vec<f64>,
}

/// Left-folds Dempster's rule over the sensor masses in text, profile,
/// citation order and ranks candidates by their combined singleton mass.
pub fn multisensor_rank(reports: &[SensorReport]) -> Result<MultisensorOutcome> {
    let mut ordered: Vec<&SensorReport> = reports.iter().collect();
    ordered.sort_by_key(|r| r.kind);
    let Some((first, rest)) = ordered.split_first() else {
        return Err(Error::InvalidInput("no sensor reports".into()));
    };
    let mut combined = first.mass.clone();
    let mut conflicts = Vec::with_capacity(rest.len());
    for r in rest {
        conflicts.push(conflict(&combined, &r.mass)?);
        combined = ds_combine(&combined, &r.mass)?;
    }
    Ok(MultisensorOutcome {
        ranking: combined.ranking(first.fused.method),
        combined,
        conflicts,
    })
}

/// Folds an explicit list of masses (already in the desired order).
pub fn combine_all(masses: &[MassFunction]) -> Result<(MassFunction, Vec<f64>)> {
    let (first, rest) = masses
        .split_first()
        .ok_or_else(|| Error::InvalidInput("no mass functions".into()))?;
    let mut combined = first.clone();
    let mut conflicts = Vec::new();
    for m in rest {
        conflicts.push(conflict(&combined, m)?);
        combined = ds_combine(&combined, m)?;
    }
    Ok((combined, conflicts))
}

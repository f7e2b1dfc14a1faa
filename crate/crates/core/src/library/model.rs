use std::collections::{HashMap, HashSet};

use crate::cbr::{CbrParameters, Trajectory};
use crate::library::{minimum_measure, LibraryError};
use crate::rational::Rational;

/// Where a case's mean phase count comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CaseSource {
    /// A stored `t_i`.
    Direct(Rational),
    /// A single observed run; `t_i` is derived from its exit frequencies.
    Trajectory(Trajectory),
    /// Known Revise exit probabilities.
    Parameters(CbrParameters),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CaseRecord {
    id: String,
    source: CaseSource,
}

impl CaseRecord {
    /// Direct measures must be at least 3 and trajectories must end in R4.
    pub fn new(id: impl Into<String>, source: CaseSource) -> Result<Self, LibraryError> {
        let record = Self::new_unchecked_bound(id, source)?;
        if let CaseSource::Direct(t) = &record.source {
            if t < &minimum_measure() {
                return Err(LibraryError::MeasureBelowBound {
                    case: record.id,
                    t: t.clone(),
                });
            }
        }
        Ok(record)
    }

    /// Like [`CaseRecord::new`] but accepts direct measures below 3.
    pub(crate) fn new_unchecked_bound(
        id: impl Into<String>,
        source: CaseSource,
    ) -> Result<Self, LibraryError> {
        let id = id.into();
        if let CaseSource::Trajectory(t) = &source {
            if let Err(e) = crate::cbr::trajectory_step_count(t) {
                return Err(LibraryError::InvalidTrajectory {
                    case: id,
                    source: e,
                });
            }
        }
        Ok(CaseRecord { id, source })
    }

    pub fn direct(id: impl Into<String>, t: Rational) -> Result<Self, LibraryError> {
        Self::new(id, CaseSource::Direct(t))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn source(&self) -> &CaseSource {
        &self.source
    }
}

/// A generalized episode: cases sharing properties, possibly refined into
/// more specific sub-episodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedEpisode {
    pub name: String,
    pub cases: Vec<CaseRecord>,
    pub sub_episodes: Vec<GeneralizedEpisode>,
}

impl GeneralizedEpisode {
    pub fn new(name: impl Into<String>) -> Self {
        GeneralizedEpisode {
            name: name.into(),
            cases: Vec::new(),
            sub_episodes: Vec::new(),
        }
    }

    pub fn with_cases(mut self, cases: impl IntoIterator<Item = CaseRecord>) -> Self {
        self.cases.extend(cases);
        self
    }

    pub fn with_sub_episode(mut self, sub: GeneralizedEpisode) -> Self {
        self.sub_episodes.push(sub);
        self
    }

    /// Every case of this episode and its descendants, first occurrence of
    /// each id only, in depth-first order.
    pub fn distinct_cases(&self) -> Vec<&CaseRecord> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_distinct(&mut seen, &mut out);
        out
    }

    fn collect_distinct<'a>(&'a self, seen: &mut HashSet<&'a str>, out: &mut Vec<&'a CaseRecord>) {
        for case in &self.cases {
            if seen.insert(case.id()) {
                out.push(case);
            }
        }
        for sub in &self.sub_episodes {
            sub.collect_distinct(seen, out);
        }
    }

    fn visit_cases<'a>(&'a self, f: &mut impl FnMut(&'a CaseRecord)) {
        self.cases.iter().for_each(&mut *f);
        for sub in &self.sub_episodes {
            sub.visit_cases(f);
        }
    }
}

/// The top-level episodes of a CBR system's case library.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CaseLibrary {
    episodes: Vec<GeneralizedEpisode>,
}

impl CaseLibrary {
    /// A case id may be indexed under several episodes, but every
    /// occurrence must describe the same case.
    pub fn new(episodes: Vec<GeneralizedEpisode>) -> Result<Self, LibraryError> {
        let mut by_id: HashMap<&str, &CaseRecord> = HashMap::new();
        let mut conflict = None;
        for ep in &episodes {
            ep.visit_cases(&mut |case| {
                if conflict.is_some() {
                    return;
                }
                match by_id.get(case.id()) {
                    Some(existing) if *existing != case => conflict = Some(case.id().to_string()),
                    Some(_) => {}
                    None => {
                        by_id.insert(case.id(), case);
                    }
                }
            });
        }
        if let Some(id) = conflict {
            return Err(LibraryError::DuplicateCaseId(id));
        }
        Ok(CaseLibrary { episodes })
    }

    pub fn episodes(&self) -> &[GeneralizedEpisode] {
        &self.episodes
    }

    /// All distinct cases in the library, first occurrence order.
    pub fn distinct_cases(&self) -> Vec<&CaseRecord> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for ep in &self.episodes {
            ep.collect_distinct(&mut seen, &mut out);
        }
        out
    }

    /// Number of distinct stored cases.
    pub fn n(&self) -> usize {
        self.distinct_cases().len()
    }
}

use serde::Serialize;

use crate::cbr::{estimate_parameters, mean_phases};
use crate::library::{CaseLibrary, CaseRecord, CaseSource, GeneralizedEpisode, LibraryError};
use crate::rational::Rational;

/// The case's mean phase count `t_i`.
///
/// A trajectory is first turned into exit frequencies for Revise, and the
/// closed form is applied to those; this is not the trajectory's length.
pub fn case_measure(c: &CaseRecord) -> Result<Rational, LibraryError> {
    let wrap = |source| LibraryError::Case {
        case: c.id().to_string(),
        source,
    };
    match c.source() {
        CaseSource::Direct(t) => Ok(t.clone()),
        CaseSource::Parameters(p) => mean_phases(p).map_err(wrap),
        CaseSource::Trajectory(t) => {
            let est = estimate_parameters(std::slice::from_ref(t)).map_err(wrap)?;
            mean_phases(&est.params).map_err(wrap)
        }
    }
}

fn mean_measure<'a>(
    cases: impl IntoIterator<Item = &'a CaseRecord>,
) -> Result<Option<Rational>, LibraryError> {
    let mut total = Rational::zero();
    let mut count = 0i64;
    for c in cases {
        total += &case_measure(c)?;
        count += 1;
    }
    Ok((count > 0).then(|| total / Rational::from_integer(count)))
}

/// Mean `t_i` over the episode's cases, including every descendant
/// episode, each case id counted once.
pub fn episode_efficiency(g: &GeneralizedEpisode) -> Result<Rational, LibraryError> {
    mean_measure(g.distinct_cases())?.ok_or_else(|| LibraryError::EmptyEpisode(g.name.clone()))
}

/// Unweighted mean of the top-level episode efficiencies.
pub fn system_efficiency(lib: &CaseLibrary) -> Result<Rational, LibraryError> {
    if lib.episodes().is_empty() {
        return Err(LibraryError::EmptyLibrary);
    }
    let mut total = Rational::zero();
    for ep in lib.episodes() {
        total += &episode_efficiency(ep)?;
    }
    Ok(total / Rational::from(lib.episodes().len() as u64))
}

/// Mean `t_i` over all distinct cases, ignoring episode structure.
pub fn flat_efficiency(lib: &CaseLibrary) -> Result<Rational, LibraryError> {
    mean_measure(lib.distinct_cases())?.ok_or(LibraryError::EmptyLibrary)
}

/// Flat efficiency after each successive insertion of `cases`.
pub fn efficiency_trend(cases: &[CaseRecord]) -> Result<Vec<Rational>, LibraryError> {
    let mut total = Rational::zero();
    let mut out = Vec::with_capacity(cases.len());
    for (i, c) in cases.iter().enumerate() {
        total += &case_measure(c)?;
        out.push(&total / Rational::from(i as u64 + 1));
    }
    Ok(out)
}

/// Per-episode breakdown row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpisodeSummary {
    pub name: String,
    pub cases: usize,
    pub efficiency: Rational,
}

impl CaseLibrary {
    pub fn episode_summaries(&self) -> Result<Vec<EpisodeSummary>, LibraryError> {
        self.episodes()
            .iter()
            .map(|ep| {
                Ok(EpisodeSummary {
                    name: ep.name.clone(),
                    cases: ep.distinct_cases().len(),
                    efficiency: episode_efficiency(ep)?,
                })
            })
            .collect()
    }
}

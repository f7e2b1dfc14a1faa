use std::fmt;

use crate::cbr::{CbrError, CbrState};

/// An observed run of the CBR cycle, one state per phase. Always starts at
/// R1 and only follows edges of the cycle. It may stop before reaching R4
/// (a censored observation).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trajectory {
    phases: Vec<CbrState>,
}

impl Trajectory {
    pub fn phases(&self) -> &[CbrState] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn is_absorbed(&self) -> bool {
        self.phases.last() == Some(&CbrState::R4)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (CbrState, CbrState)> + '_ {
        self.phases.windows(2).map(|w| (w[0], w[1]))
    }

    /// Validates an already-typed state sequence.
    pub fn from_states(phases: Vec<CbrState>) -> Result<Self, CbrError> {
        let first = *phases.first().ok_or(CbrError::EmptyTrajectory)?;
        if first != CbrState::R1 {
            return Err(CbrError::DoesNotStartAtR1(first));
        }
        // R4 has no outgoing edge, so it can only be the final phase.
        for (i, w) in phases.windows(2).enumerate() {
            if !w[0].can_move_to(w[1]) {
                return Err(CbrError::IllegalTransition {
                    index: i + 1,
                    from: w[0],
                    to: w[1],
                });
            }
        }
        Ok(Trajectory { phases })
    }
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.phases.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parses labels and checks every consecutive pair against the cycle's
/// edges. `IllegalTransition::index` is the position of the offending
/// destination phase.
pub fn validate_trajectory<S: AsRef<str>>(raw: &[S]) -> Result<Trajectory, CbrError> {
    let phases = raw
        .iter()
        .enumerate()
        .map(|(index, label)| {
            label
                .as_ref()
                .parse::<CbrState>()
                .map_err(|_| CbrError::UnknownLabel {
                    index,
                    label: label.as_ref().to_string(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Trajectory::from_states(phases)
}

/// Number of phases from the first Retrieve through absorption in Retain.
pub fn trajectory_step_count(t: &Trajectory) -> Result<usize, CbrError> {
    match t.phases.last() {
        Some(CbrState::R4) => Ok(t.phases.len()),
        Some(&last) => Err(CbrError::NotAbsorbed(last)),
        None => Err(CbrError::EmptyTrajectory),
    }
}

/// Reads the line-oriented trajectory format: one trajectory per line,
/// labels separated by commas and/or whitespace, `#` starts a comment line,
/// blank lines are skipped.
pub fn parse_trajectories(text: &str) -> Result<Vec<Trajectory>, CbrError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let labels: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .collect();
        let t = validate_trajectory(&labels).map_err(|e| CbrError::Parse {
            line: lineno + 1,
            source: Box::new(e),
        })?;
        out.push(t);
    }
    Ok(out)
}

pub fn format_trajectories(trajectories: &[Trajectory]) -> String {
    let mut out = String::new();
    for t in trajectories {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

//! JSON library documents.
//!
//! ```json
//! {
//!   "episodes": [
//!     {
//!       "name": "fever",
//!       "cases": [
//!         { "id": "c1", "t": 3 },
//!         { "id": "c2", "params": { "p31": "1/3", "p33": "1/3", "p34": "1/3" } },
//!         { "id": "c3", "trajectory": ["R1", "R2", "R3", "R4"] }
//!       ],
//!       "sub_episodes": []
//!     }
//!   ]
//! }
//! ```
//!
//! `t` is an integer or a fraction string; `cases` and `sub_episodes` may
//! be omitted when empty. Unknown keys are rejected.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde_json::{Map, Value};

use crate::cbr::{validate_trajectory, CbrParameters};
use crate::library::{
    minimum_measure, CaseLibrary, CaseRecord, CaseSource, GeneralizedEpisode, LibraryError,
};
use crate::rational::Rational;

/// What to do with a direct `t` below 3.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BoundPolicy {
    #[default]
    Reject,
    /// Keep the value and report a [`LibraryWarning`].
    Warn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LibraryWarning {
    pub case: String,
    pub message: String,
}

struct Reader {
    policy: BoundPolicy,
    warnings: Vec<LibraryWarning>,
}

fn schema(field: &str, message: impl Into<String>) -> LibraryError {
    LibraryError::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn expect_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, LibraryError> {
    v.as_object()
        .ok_or_else(|| schema(field, "expected an object"))
}

fn expect_array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>, LibraryError> {
    v.as_array()
        .ok_or_else(|| schema(field, "expected an array"))
}

fn reject_unknown(
    obj: &Map<String, Value>,
    allowed: &[&str],
    field: &str,
) -> Result<(), LibraryError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(field, format!("unknown key {k:?}"))),
        None => Ok(()),
    }
}

fn parse_rational(v: &Value, field: &str) -> Result<Rational, LibraryError> {
    match v {
        Value::String(s) => s.parse().map_err(|e| schema(field, format!("{e}"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from(u))
            } else {
                Err(schema(
                    field,
                    "decimal numbers are not exact; write a fraction string",
                ))
            }
        }
        _ => Err(schema(field, "expected an integer or a fraction string")),
    }
}

impl Reader {
    fn library(&mut self, root: &Value) -> Result<CaseLibrary, LibraryError> {
        let obj = expect_object(root, "$")?;
        reject_unknown(obj, &["episodes"], "$")?;
        let episodes = obj
            .get("episodes")
            .ok_or_else(|| schema("episodes", "missing required key"))?;
        let episodes = expect_array(episodes, "episodes")?
            .iter()
            .enumerate()
            .map(|(i, ep)| self.episode(ep, &format!("episodes[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        CaseLibrary::new(episodes)
    }

    fn episode(&mut self, v: &Value, path: &str) -> Result<GeneralizedEpisode, LibraryError> {
        let obj = expect_object(v, path)?;
        reject_unknown(obj, &["name", "cases", "sub_episodes"], path)?;
        let name_path = format!("{path}.name");
        let name = obj
            .get("name")
            .ok_or_else(|| schema(&name_path, "missing required key"))?
            .as_str()
            .ok_or_else(|| schema(&name_path, "expected a string"))?
            .to_string();
        let mut ep = GeneralizedEpisode::new(name);
        if let Some(cases) = obj.get("cases") {
            let cases_path = format!("{path}.cases");
            for (i, c) in expect_array(cases, &cases_path)?.iter().enumerate() {
                ep.cases.push(self.case(c, &format!("{cases_path}[{i}]"))?);
            }
        }
        if let Some(subs) = obj.get("sub_episodes") {
            let subs_path = format!("{path}.sub_episodes");
            for (i, s) in expect_array(subs, &subs_path)?.iter().enumerate() {
                ep.sub_episodes
                    .push(self.episode(s, &format!("{subs_path}[{i}]"))?);
            }
        }
        Ok(ep)
    }

    fn case(&mut self, v: &Value, path: &str) -> Result<CaseRecord, LibraryError> {
        let obj = expect_object(v, path)?;
        reject_unknown(obj, &["id", "t", "trajectory", "params"], path)?;
        let id_path = format!("{path}.id");
        let id = obj
            .get("id")
            .ok_or_else(|| schema(&id_path, "missing required key"))?
            .as_str()
            .ok_or_else(|| schema(&id_path, "expected a string"))?
            .to_string();

        let present: Vec<&str> = ["t", "trajectory", "params"]
            .into_iter()
            .filter(|k| obj.contains_key(*k))
            .collect();
        if present.len() != 1 {
            return Err(schema(
                path,
                format!("exactly one of t, trajectory, params is required, found {present:?}"),
            ));
        }

        let source = match present[0] {
            "t" => CaseSource::Direct(parse_rational(&obj["t"], &format!("{path}.t"))?),
            "trajectory" => {
                let traj_path = format!("{path}.trajectory");
                let labels = expect_array(&obj["trajectory"], &traj_path)?
                    .iter()
                    .map(|l| {
                        l.as_str()
                            .ok_or_else(|| schema(&traj_path, "labels must be strings"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let t =
                    validate_trajectory(&labels).map_err(|e| LibraryError::InvalidTrajectory {
                        case: id.clone(),
                        source: e,
                    })?;
                CaseSource::Trajectory(t)
            }
            _ => {
                let params_path = format!("{path}.params");
                let p = expect_object(&obj["params"], &params_path)?;
                reject_unknown(p, &["p31", "p33", "p34"], &params_path)?;
                let get = |k: &str| {
                    let field = format!("{params_path}.{k}");
                    p.get(k)
                        .ok_or_else(|| schema(&field, "missing required key"))
                        .and_then(|v| parse_rational(v, &field))
                };
                let params = CbrParameters::new(get("p31")?, get("p33")?, get("p34")?)
                    .map_err(|e| schema(&params_path, e.to_string()))?;
                CaseSource::Parameters(params)
            }
        };

        match self.policy {
            BoundPolicy::Reject => CaseRecord::new(id, source),
            BoundPolicy::Warn => {
                if let CaseSource::Direct(t) = &source {
                    if t < &minimum_measure() {
                        self.warnings.push(LibraryWarning {
                            case: id.clone(),
                            message: format!("t = {t} is below the minimum of 3"),
                        });
                    }
                }
                CaseRecord::new_unchecked_bound(id, source)
            }
        }
    }
}

/// Parses and validates a library document.
pub fn parse_library(text: &str) -> Result<CaseLibrary, LibraryError> {
    parse_library_with(text, BoundPolicy::Reject).map(|(lib, _)| lib)
}

pub fn parse_library_with(
    text: &str,
    policy: BoundPolicy,
) -> Result<(CaseLibrary, Vec<LibraryWarning>), LibraryError> {
    let root: Value = serde_json::from_str(text).map_err(|e| LibraryError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut reader = Reader {
        policy,
        warnings: Vec::new(),
    };
    let lib = reader.library(&root)?;
    Ok((lib, reader.warnings))
}

/// Reads a library document from a file path.
pub fn load_library(path: impl AsRef<Path>) -> Result<CaseLibrary, LibraryError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| LibraryError::Io(format!("{}: {e}", path.display())))?;
    parse_library(&text)
}

/// Reads a library document from any reader.
pub fn load_library_with<R: Read>(
    mut reader: R,
    policy: BoundPolicy,
) -> Result<(CaseLibrary, Vec<LibraryWarning>), LibraryError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| LibraryError::Io(e.to_string()))?;
    parse_library_with(&text, policy)
}

fn rational_value(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(i) = r.to_string().parse::<i64>() {
            return Value::from(i);
        }
    }
    Value::String(r.to_string())
}

fn case_value(c: &CaseRecord) -> Value {
    let mut obj = Map::new();
    obj.insert("id".into(), Value::String(c.id().to_string()));
    match c.source() {
        CaseSource::Direct(t) => {
            obj.insert("t".into(), rational_value(t));
        }
        CaseSource::Trajectory(t) => {
            let labels = t
                .phases()
                .iter()
                .map(|s| Value::String(s.label().into()))
                .collect();
            obj.insert("trajectory".into(), Value::Array(labels));
        }
        CaseSource::Parameters(p) => {
            let mut params = Map::new();
            params.insert("p31".into(), Value::String(p.p31().to_string()));
            params.insert("p33".into(), Value::String(p.p33().to_string()));
            params.insert("p34".into(), Value::String(p.p34().to_string()));
            obj.insert("params".into(), Value::Object(params));
        }
    }
    Value::Object(obj)
}

fn episode_value(ep: &GeneralizedEpisode) -> Value {
    let mut obj = Map::new();
    obj.insert("name".into(), Value::String(ep.name.clone()));
    obj.insert("cases".into(), ep.cases.iter().map(case_value).collect());
    obj.insert(
        "sub_episodes".into(),
        ep.sub_episodes.iter().map(episode_value).collect(),
    );
    Value::Object(obj)
}

pub fn library_to_json(lib: &CaseLibrary) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "episodes".into(),
        lib.episodes().iter().map(episode_value).collect(),
    );
    Value::Object(obj)
}

/// Pretty-printed document that [`parse_library`] reads back unchanged.
pub fn write_library(lib: &CaseLibrary) -> String {
    let mut s = serde_json::to_string_pretty(&library_to_json(lib)).expect("values serialize");
    s.push('\n');
    s
}

//! Scenario and policy documents.
//!
//! Scenario keys: `T, L, l, l0, S, v0, gamma, Gamma, mu, eta` (required),
//! `survival, matrix, terminal_lo, terminal_hi` (optional). Policies are
//! either `{"u": [[..]; T], "w": [[..]; T]}` JSON or a trajectory CSV as
//! written by `plan`.

use std::path::Path;

use forestplan_core::forest_model::{
    ForestError, ForestState, ManagementAction, TransitionOperator,
};
use forestplan_core::planner::Scenario;
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Syntax(String),
    /// Names the offending key; `field` may carry an index like `u[3]`.
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    /// The file is well-formed but the policy it describes breaks an
    /// age-bound rule at some stage.
    #[error("stage {stage}: {source}")]
    Action { stage: usize, source: ForestError },
}

fn field(name: impl Into<String>, message: impl Into<String>) -> FileError {
    FileError::Field {
        field: name.into(),
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|e| FileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

const REQUIRED: [&str; 10] = [
    "T", "L", "l", "l0", "S", "v0", "gamma", "Gamma", "mu", "eta",
];
const OPTIONAL: [&str; 4] = ["survival", "matrix", "terminal_lo", "terminal_hi"];

struct Doc<'a>(&'a Map<String, Value>);

impl Doc<'_> {
    fn get(&self, key: &str) -> Result<&Value, FileError> {
        self.0.get(key).ok_or_else(|| field(key, "required"))
    }

    fn count(&self, key: &str) -> Result<usize, FileError> {
        self.get(key)?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| field(key, "expected a nonnegative integer"))
    }

    fn number(&self, key: &str) -> Result<f64, FileError> {
        self.get(key)?
            .as_f64()
            .ok_or_else(|| field(key, "expected a number"))
    }

    fn vector(&self, key: &str, len: usize) -> Result<Vec<f64>, FileError> {
        numbers(key, self.get(key)?, len)
    }

    fn optional_vector(&self, key: &str, len: usize) -> Result<Option<Vec<f64>>, FileError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => numbers(key, v, len).map(Some),
        }
    }
}

fn numbers(key: &str, value: &Value, len: usize) -> Result<Vec<f64>, FileError> {
    let items = value
        .as_array()
        .ok_or_else(|| field(key, "expected an array of numbers"))?;
    if items.len() != len {
        return Err(field(
            key,
            format!("expected {len} values, found {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| field(key, format!("entry {} is not a number", i + 1)))
        })
        .collect()
}

fn forest_field(key: &'static str) -> impl Fn(ForestError) -> FileError {
    move |e| field(key, e.to_string())
}

fn parse_object(text: &str) -> Result<Map<String, Value>, FileError> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(FileError::Syntax(
            "expected a JSON object at the top level".into(),
        )),
        Err(e) => Err(FileError::Syntax(format!("invalid JSON: {e}"))),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, FileError> {
    let map = parse_object(text)?;
    if let Some(key) = map
        .keys()
        .find(|k| !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str()))
    {
        return Err(field(key.as_str(), "unknown key"));
    }
    if let Some(key) = REQUIRED.iter().find(|k| !map.contains_key(**k)) {
        return Err(field(*key, "required"));
    }
    let doc = Doc(&map);
    let horizon = doc.count("T")?;
    let classes = doc.count("L")?;
    let area_bound = doc.number("S")?;

    let transition = match map.get("matrix") {
        Some(m) if !m.is_null() => {
            let rows = m
                .as_array()
                .ok_or_else(|| field("matrix", "expected an array of rows"))?;
            if rows.len() != classes {
                return Err(field(
                    "matrix",
                    format!("expected {classes} rows, found {}", rows.len()),
                ));
            }
            let rows = rows
                .iter()
                .enumerate()
                .map(|(r, row)| numbers(&format!("matrix[{}]", r + 1), row, classes))
                .collect::<Result<Vec<_>, _>>()?;
            TransitionOperator::from_rows(rows).map_err(forest_field("matrix"))?
        }
        _ => {
            let survival = doc
                .optional_vector("survival", classes)?
                .unwrap_or_else(|| vec![1.0; classes]);
            TransitionOperator::aging(&survival).map_err(forest_field("survival"))?
        }
    };

    let scenario = Scenario {
        horizon,
        age_classes: classes,
        min_harvest_age: doc.count("l")?,
        max_planting_age: doc.count("l0")?,
        area_bound,
        initial: ForestState::new(doc.vector("v0", classes)?).map_err(forest_field("v0"))?,
        carbon_rate: doc.vector("gamma", classes)?,
        carbon_floor: doc.vector("Gamma", horizon)?,
        timber_yield: doc.vector("mu", classes)?,
        planting_cost: doc.vector("eta", classes)?,
        terminal_lo: doc
            .optional_vector("terminal_lo", classes)?
            .unwrap_or_else(|| vec![0.0; classes]),
        terminal_hi: doc
            .optional_vector("terminal_hi", classes)?
            .unwrap_or_else(|| vec![area_bound; classes]),
        transition,
    };
    scenario.validate().map_err(|e| field(e.field, e.message))?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, FileError> {
    parse_scenario(&read_text(path)?)
}

fn into_actions(
    scenario: &Scenario,
    harvest: Vec<Vec<f64>>,
    plant: Vec<Vec<f64>>,
) -> Result<Vec<ManagementAction>, FileError> {
    harvest
        .into_iter()
        .zip(plant)
        .enumerate()
        .map(|(stage, (u, w))| {
            ManagementAction::new(u, w, scenario.min_harvest_age, scenario.max_planting_age)
                .map_err(|source| match source {
                    ForestError::InvalidValue {
                        what,
                        age_class,
                        value,
                    } => field(
                        format!("{}[{stage}]", if what == "harvest" { "u" } else { "w" }),
                        format!("age class {age_class} is {value}, must be a finite value >= 0"),
                    ),
                    source => FileError::Action { stage, source },
                })
        })
        .collect()
}

/// `{"u": [[f64; L]; T], "w": [[f64; L]; T]}`
pub fn parse_policy_json(
    scenario: &Scenario,
    text: &str,
) -> Result<Vec<ManagementAction>, FileError> {
    let map = parse_object(text)?;
    if let Some(key) = map.keys().find(|k| *k != "u" && *k != "w") {
        return Err(field(key.as_str(), "unknown key"));
    }
    let stages = |key: &str| -> Result<Vec<Vec<f64>>, FileError> {
        let rows = map
            .get(key)
            .ok_or_else(|| field(key, "required"))?
            .as_array()
            .ok_or_else(|| field(key, "expected an array of per-stage arrays"))?;
        if rows.len() != scenario.horizon {
            return Err(field(
                key,
                format!("expected {} stages, found {}", scenario.horizon, rows.len()),
            ));
        }
        rows.iter()
            .enumerate()
            .map(|(t, row)| numbers(&format!("{key}[{t}]"), row, scenario.age_classes))
            .collect()
    };
    let (u, w) = (stages("u")?, stages("w")?);
    into_actions(scenario, u, w)
}

/// Reads the `u` and `w` columns of a trajectory CSV (`t, age_class, v, u,
/// w`); rows for the final stage carry no actions and are skipped.
pub fn parse_policy_csv(
    scenario: &Scenario,
    text: &str,
) -> Result<Vec<ManagementAction>, FileError> {
    let (horizon, classes) = (scenario.horizon, scenario.age_classes);
    let mut u = vec![vec![f64::NAN; classes]; horizon];
    let mut w = vec![vec![f64::NAN; classes]; horizon];
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| FileError::Syntax(format!("invalid CSV: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| field(name, "missing column"))
    };
    let (ct, ci, cu, cw) = (
        column("t")?,
        column("age_class")?,
        column("u")?,
        column("w")?,
    );
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FileError::Syntax(format!("invalid CSV: {e}")))?;
        let row = line + 2;
        let int = |c: usize, name: &str| {
            record
                .get(c)
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| field(format!("row {row}"), format!("{name} is not an integer")))
        };
        let (t, i) = (int(ct, "t")?, int(ci, "age_class")?);
        if i == 0 || i > classes {
            return Err(field(
                format!("row {row}"),
                format!("age class {i} outside 1..={classes}"),
            ));
        }
        if t >= horizon {
            continue;
        }
        for (col, name, target) in [(cu, "u", &mut u), (cw, "w", &mut w)] {
            let raw = record.get(col).unwrap_or("").trim();
            target[t][i - 1] = raw.parse::<f64>().map_err(|_| {
                field(
                    format!("{name}[{t}]"),
                    format!("age class {i}: `{raw}` is not a number"),
                )
            })?;
        }
    }
    for (name, grid) in [("u", &u), ("w", &w)] {
        for (t, row) in grid.iter().enumerate() {
            if let Some(i) = row.iter().position(|v| v.is_nan()) {
                return Err(field(
                    format!("{name}[{t}]"),
                    format!("no value for age class {}", i + 1),
                ));
            }
        }
    }
    into_actions(scenario, u, w)
}

/// Dispatches on the file extension: `.csv` is a trajectory, anything else
/// a policy JSON.
pub fn load_policy(scenario: &Scenario, path: &Path) -> Result<Vec<ManagementAction>, FileError> {
    let text = read_text(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_policy_csv(scenario, &text),
        _ => parse_policy_json(scenario, &text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "T": 2, "L": 3, "l": 3, "l0": 1, "S": 30,
        "v0": [10, 10, 10], "gamma": [0.5, 1, 1.5], "Gamma": [0, 0],
        "mu": [0, 0, 3], "eta": [1, 0, 0]
    }"#;

    fn without(key: &str) -> String {
        let mut v: Value = serde_json::from_str(SMALL).unwrap();
        v.as_object_mut().unwrap().remove(key);
        v.to_string()
    }

    fn with(key: &str, value: Value) -> String {
        let mut v: Value = serde_json::from_str(SMALL).unwrap();
        v.as_object_mut().unwrap().insert(key.into(), value);
        v.to_string()
    }

    #[test]
    fn defaults_are_filled_in() {
        let s = parse_scenario(SMALL).unwrap();
        assert_eq!(s.terminal_lo, vec![0.0; 3]);
        assert_eq!(s.terminal_hi, vec![30.0; 3]);
        assert_eq!(s.transition, TransitionOperator::lossless_aging(3).unwrap());
    }

    #[test]
    fn missing_mu_is_named() {
        assert_eq!(
            parse_scenario(&without("mu")).unwrap_err().to_string(),
            "mu: required"
        );
    }

    #[test]
    fn errors_name_their_field() {
        let cases = [
            (
                with("v0", serde_json::json!([1, 2])),
                "v0: expected 3 values, found 2",
            ),
            (
                with("Gamma", serde_json::json!([0, "x"])),
                "Gamma: entry 2 is not a number",
            ),
            (
                with("T", serde_json::json!(-1)),
                "T: expected a nonnegative integer",
            ),
            (with("extra", serde_json::json!(1)), "extra: unknown key"),
            (
                with("l", serde_json::json!(1)),
                "l: minimal harvesting age 1 must exceed maximal planting age l0 = 1",
            ),
            (
                with("survival", serde_json::json!([1, 2, 1])),
                "survival: survival fraction for age class 2 is 2, must lie in [0, 1]",
            ),
        ];
        for (text, message) in cases {
            assert_eq!(parse_scenario(&text).unwrap_err().to_string(), message);
        }
        assert!(parse_scenario("[1]").is_err());
        assert!(parse_scenario("{").is_err());
    }

    #[test]
    fn matrix_override() {
        let text = with(
            "matrix",
            serde_json::json!([[0, 0, 0], [0.9, 0, 0], [0, 0.9, 0.9]]),
        );
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.transition.entry(2, 1), 0.9);
        let bad = with("matrix", serde_json::json!([[0, 0], [1, 1]]));
        assert!(parse_scenario(&bad)
            .unwrap_err()
            .to_string()
            .starts_with("matrix:"));
    }

    #[test]
    fn policy_json_dimensions_are_named_by_stage() {
        let s = parse_scenario(SMALL).unwrap();
        let ok = r#"{"u": [[0,0,1],[0,0,1]], "w": [[1,0,0],[1,0,0]]}"#;
        assert_eq!(parse_policy_json(&s, ok).unwrap().len(), 2);
        let short = r#"{"u": [[0,0,1],[0,1]], "w": [[1,0,0],[1,0,0]]}"#;
        assert_eq!(
            parse_policy_json(&s, short).unwrap_err().to_string(),
            "u[1]: expected 3 values, found 2"
        );
        let stages = r#"{"u": [[0,0,1]], "w": [[1,0,0],[1,0,0]]}"#;
        assert_eq!(
            parse_policy_json(&s, stages).unwrap_err().to_string(),
            "u: expected 2 stages, found 1"
        );
        let young = r#"{"u": [[1,0,0],[0,0,0]], "w": [[0,0,0],[0,0,0]]}"#;
        assert!(matches!(
            parse_policy_json(&s, young).unwrap_err(),
            FileError::Action { stage: 0, .. }
        ));
    }

    #[test]
    fn policy_csv_reads_action_columns() {
        let s = parse_scenario(SMALL).unwrap();
        let mut text = String::from("t,age_class,v,u,w\n");
        for t in 0..=2 {
            for i in 1..=3 {
                let (u, w) = if t == 2 {
                    (String::new(), String::new())
                } else {
                    (
                        (if i == 3 { "10" } else { "0" }).to_string(),
                        (if i == 1 { "10" } else { "0" }).to_string(),
                    )
                };
                text.push_str(&format!("{t},{i},10,{u},{w}\n"));
            }
        }
        let actions = parse_policy_csv(&s, &text).unwrap();
        assert_eq!(actions[1].harvest(), &[0.0, 0.0, 10.0]);
        assert_eq!(actions[0].plant(), &[10.0, 0.0, 0.0]);
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert_eq!(
            parse_policy_csv(&s, &truncated).unwrap_err().to_string(),
            "u[1]: no value for age class 2"
        );
    }
}

//! Output files: `trajectory.csv`, `summary.json`, `policy.json`,
//! `feasibility.json`.

use std::fs;
use std::io;
use std::path::Path;

use forestplan_core::planner::{PlanTrajectory, Scenario, Violation};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ViolationRecord {
    pub constraint: String,
    pub stage: usize,
    pub age_class: Option<usize>,
    pub residual: f64,
}

impl From<&Violation> for ViolationRecord {
    fn from(v: &Violation) -> Self {
        Self {
            constraint: v.kind.to_string(),
            stage: v.stage,
            age_class: v.age_class,
            residual: v.residual,
        }
    }
}

/// Written by `plan` as `summary.json` and by `simulate` as
/// `feasibility.json`.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub status: String,
    pub objective_value: Option<f64>,
    pub feasible: bool,
    pub carbon_totals: Vec<f64>,
    pub area_totals: Vec<f64>,
    pub violations: Vec<ViolationRecord>,
    pub message: Option<String>,
}

impl Summary {
    pub fn of(status: &str, scenario: &Scenario, traj: &PlanTrajectory) -> Self {
        Self {
            status: status.into(),
            objective_value: Some(traj.objective_value),
            feasible: traj.feasible,
            carbon_totals: traj.carbon_totals(scenario),
            area_totals: traj.area_totals(),
            violations: traj.violations.iter().map(ViolationRecord::from).collect(),
            message: None,
        }
    }

    pub fn failed(status: &str, message: String) -> Self {
        Self {
            status: status.into(),
            objective_value: None,
            feasible: false,
            carbon_totals: Vec::new(),
            area_totals: Vec::new(),
            violations: Vec::new(),
            message: Some(message),
        }
    }
}

#[derive(Debug, Serialize)]
struct PolicyDoc {
    u: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
}

// Shortest representation that parses back to the same f64; no "-0".
fn number(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        x.to_string()
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// One row per stage and age class. The last stage has no actions, so its
/// `u` and `w` cells are empty.
pub fn write_trajectory_csv(path: &Path, traj: &PlanTrajectory) -> io::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["t", "age_class", "v", "u", "w"])?;
    for (t, state) in traj.states.iter().enumerate() {
        let action = traj.actions.get(t);
        for (k, v) in state.areas().iter().enumerate() {
            let (u, w) = match action {
                Some(a) => (number(a.harvest()[k]), number(a.plant()[k])),
                None => (String::new(), String::new()),
            };
            writer.write_record([t.to_string(), (k + 1).to_string(), number(*v), u, w])?;
        }
    }
    writer.flush()
}

pub fn write_policy_json(path: &Path, traj: &PlanTrajectory) -> io::Result<()> {
    let doc = PolicyDoc {
        u: traj.actions.iter().map(|a| a.harvest().to_vec()).collect(),
        w: traj.actions.iter().map(|a| a.plant().to_vec()).collect(),
    };
    write_json(path, &doc)
}

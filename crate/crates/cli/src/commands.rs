use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use forestplan_core::info_measures::{entropy, max_entropy, DiscreteState};
use forestplan_core::planner::{self, PlanError};
use forestplan_core::social_choice::{condorcet_profile, find_cycle, majority_aggregate, Share};

use crate::files::{self, FileError};
use crate::report::{self, Summary};

pub const EXIT_OK: i32 = 0;
/// Unreadable input, parse or validation failure, bad arguments.
pub const EXIT_USAGE: i32 = 1;
/// Infeasible scenario, or a simulated policy that breaks a constraint.
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
/// The solver returned a point that failed independent verification.
pub const EXIT_INTERNAL: i32 = 4;

/// Console sinks for one command.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

// Console write failures are not actionable here.
macro_rules! say {
    ($sink:expr, $($arg:tt)*) => {{
        let _ = writeln!($sink, $($arg)*);
    }};
}

fn create_dir(dir: &Path, io: &mut Io<'_>) -> bool {
    match fs::create_dir_all(dir) {
        Ok(()) => true,
        Err(e) => {
            say!(io.err, "error: cannot create {}: {e}", dir.display());
            false
        }
    }
}

fn write_failed(path: &Path, e: std::io::Error, io: &mut Io<'_>) -> i32 {
    say!(io.err, "error: cannot write {}: {e}", path.display());
    EXIT_USAGE
}

/// Plans one scenario file, or every `*.json` in a directory concurrently
/// (each into its own subdirectory of `out_dir`). Returns the largest exit
/// code over all runs.
pub fn cmd_plan(scenario_path: &Path, out_dir: &Path, io: &mut Io<'_>) -> i32 {
    if !scenario_path.is_dir() {
        return plan_one(scenario_path, out_dir, io);
    }
    let mut inputs: Vec<PathBuf> = match fs::read_dir(scenario_path) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect(),
        Err(e) => {
            say!(io.err, "error: {}: {e}", scenario_path.display());
            return EXIT_USAGE;
        }
    };
    inputs.sort();
    if inputs.is_empty() {
        say!(
            io.err,
            "error: {}: no scenario files (*.json)",
            scenario_path.display()
        );
        return EXIT_USAGE;
    }
    let results: Vec<(i32, Vec<u8>, Vec<u8>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = inputs
            .iter()
            .map(|input| {
                scope.spawn(move || {
                    let stem = input.file_stem().unwrap_or_default();
                    let (mut out, mut err) = (Vec::new(), Vec::new());
                    let code = plan_one(
                        input,
                        &out_dir.join(stem),
                        &mut Io {
                            out: &mut out,
                            err: &mut err,
                        },
                    );
                    (code, out, err)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("planning thread panicked"))
            .collect()
    });
    let mut worst = EXIT_OK;
    for (input, (code, out, err)) in inputs.iter().zip(results) {
        say!(io.out, "== {}", input.display());
        let _ = io.out.write_all(&out);
        let _ = io.err.write_all(&err);
        worst = worst.max(code);
    }
    worst
}

fn plan_one(scenario_path: &Path, out_dir: &Path, io: &mut Io<'_>) -> i32 {
    let scenario = match files::load_scenario(scenario_path) {
        Ok(s) => s,
        Err(e) => {
            say!(io.err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if !create_dir(out_dir, io) {
        return EXIT_USAGE;
    }
    let summary_path = out_dir.join("summary.json");
    let (summary, code) = match planner::solve_plan(&scenario) {
        Ok(traj) => {
            let trajectory_path = out_dir.join("trajectory.csv");
            if let Err(e) = report::write_trajectory_csv(&trajectory_path, &traj) {
                return write_failed(&trajectory_path, e, io);
            }
            let policy_path = out_dir.join("policy.json");
            if let Err(e) = report::write_policy_json(&policy_path, &traj) {
                return write_failed(&policy_path, e, io);
            }
            say!(io.out, "status: Optimal");
            say!(io.out, "objective: {:.6}", traj.objective_value);
            (Summary::of("Optimal", &scenario, &traj), EXIT_OK)
        }
        Err(e) => {
            let (status, code) = match &e {
                PlanError::Infeasible { .. } => ("Infeasible", EXIT_INFEASIBLE),
                PlanError::Unbounded => ("Unbounded", EXIT_UNBOUNDED),
                PlanError::Scenario(_) => ("Invalid", EXIT_USAGE),
                _ => ("Error", EXIT_INTERNAL),
            };
            say!(io.out, "status: {status}");
            say!(io.err, "error: {e}");
            (Summary::failed(status, e.to_string()), code)
        }
    };
    if let Err(e) = report::write_json(&summary_path, &summary) {
        return write_failed(&summary_path, e, io);
    }
    say!(io.out, "wrote {}", out_dir.display());
    code
}

/// Replays a fixed policy (policy JSON or trajectory CSV) through the
/// dynamics and reports its feasibility.
pub fn cmd_simulate(
    scenario_path: &Path,
    policy_path: &Path,
    out_dir: &Path,
    io: &mut Io<'_>,
) -> i32 {
    let scenario = match files::load_scenario(scenario_path) {
        Ok(s) => s,
        Err(e) => {
            say!(io.err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let actions = match files::load_policy(&scenario, policy_path) {
        Ok(a) => a,
        Err(e @ FileError::Action { .. }) => {
            say!(io.out, "feasible: false");
            say!(io.err, "error: {e}");
            return EXIT_INFEASIBLE;
        }
        Err(e) => {
            say!(io.err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let traj = match planner::simulate_policy(&scenario, actions) {
        Ok(t) => t,
        Err(e @ PlanError::Step { .. }) => {
            say!(io.out, "feasible: false");
            say!(io.err, "error: {e}");
            return EXIT_INFEASIBLE;
        }
        Err(e) => {
            say!(io.err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if !create_dir(out_dir, io) {
        return EXIT_USAGE;
    }
    let trajectory_path = out_dir.join("trajectory.csv");
    if let Err(e) = report::write_trajectory_csv(&trajectory_path, &traj) {
        return write_failed(&trajectory_path, e, io);
    }
    let status = if traj.feasible {
        "Feasible"
    } else {
        "Infeasible"
    };
    let report_path = out_dir.join("feasibility.json");
    if let Err(e) = report::write_json(&report_path, &Summary::of(status, &scenario, &traj)) {
        return write_failed(&report_path, e, io);
    }
    say!(io.out, "feasible: {}", traj.feasible);
    say!(io.out, "objective: {:.6}", traj.objective_value);
    for v in &traj.violations {
        say!(io.err, "violation: {v}");
    }
    if traj.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

fn share(s: Share) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

pub fn cmd_condorcet(n: usize, io: &mut Io<'_>) -> i32 {
    let profile = match condorcet_profile(n) {
        Ok(p) => p,
        Err(e) => {
            say!(io.err, "error: condorcet: {e}");
            return EXIT_USAGE;
        }
    };
    say!(
        io.out,
        "profile ({n} candidates, {} representatives):",
        profile.representatives()
    );
    for k in 1..=profile.representatives() {
        let pairs: Vec<String> = profile
            .preferences_of(k)
            .iter()
            .map(|(i, j)| format!("a{i} > a{j}"))
            .collect();
        say!(io.out, "  representative {k}: {}", pairs.join(", "));
    }
    let graph = majority_aggregate(&profile);
    say!(io.out, "majority edges:");
    for (&(i, j), &s) in graph.edges() {
        say!(io.out, "  a{i} > a{j}  share {}", share(s));
    }
    match find_cycle(&graph) {
        Some(cycle) => {
            let mut steps: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
            steps.push(cycle[0].to_string());
            say!(io.out, "cycle: {}", steps.join(" -> "));
        }
        None => say!(io.out, "cycle: none"),
    }
    EXIT_OK
}

pub fn cmd_entropy(probs: &[f64], io: &mut Io<'_>) -> i32 {
    match DiscreteState::new(probs.to_vec()) {
        Ok(state) => {
            say!(
                io.out,
                "H = {:.6} bits (max {:.6})",
                entropy(&state),
                max_entropy(state.len())
            );
            EXIT_OK
        }
        Err(e) => {
            say!(io.err, "error: {e}");
            EXIT_USAGE
        }
    }
}

//! Long-horizon forest management as a linear program.
//!
//! Decision variables per stage `t = 0..T-1` are the harvested area `u^t`
//! (age classes `l..=L`) and planted area `w^t` (classes `1..=l0`); the
//! states `v^t` for `t = 1..=T` follow from
//! `v^{t+1} = A (v^t - u^t) + w^t`. The goal is the price-free
//! cost-comparison criterion
//! `sum_t ( sum_{i >= l} mu_i u^t_i - sum_{i <= l0} eta_i w^t_i )`.

use std::fmt;

use thiserror::Error;

use crate::forest_model::{
    managed_step, ForestError, ForestState, ManagementAction, TransitionOperator,
};
use crate::lp_core::{self, Constraint, LinearProgram, LpError, LpStatus, Relation, Tolerances};

/// Absolute residual above which a constraint counts as violated.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-8;

/// Largest accepted gap between LP states and the same plan re-simulated
/// from `v0`.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct ScenarioError {
    pub field: &'static str,
    pub message: String,
}

impl ScenarioError {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("scenario is infeasible: {}", culprits.join("; "))]
    Infeasible { culprits: Vec<String> },
    #[error(
        "objective is unbounded; the scenario is missing a bound (check S and the terminal box)"
    )]
    Unbounded,
    #[error("solver output failed verification: {0}")]
    Inconsistent(String),
    #[error("trajectory shape does not match the scenario: {0}")]
    DimensionMismatch(String),
    #[error("stage {stage}: {source}")]
    Step { stage: usize, source: ForestError },
}

/// Every parameter of a planning run. Stage-indexed vectors are 0-based in
/// storage: `carbon_floor[t - 1]` is the floor for stage `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// `T`, number of stages.
    pub horizon: usize,
    /// `L`, number of age classes; the oldest class is the maximal product age.
    pub age_classes: usize,
    /// `l`
    pub min_harvest_age: usize,
    /// `l0`
    pub max_planting_age: usize,
    /// `S`, hectares.
    pub area_bound: f64,
    pub initial: ForestState,
    /// `gamma_i`, carbon absorbed per hectare of age `i` per stage.
    pub carbon_rate: Vec<f64>,
    /// `Gamma_t` for `t = 1..=T`.
    pub carbon_floor: Vec<f64>,
    /// `mu_i`, timber yield per hectare harvested at age `i`.
    pub timber_yield: Vec<f64>,
    /// `eta_i`, yield-equivalent cost per hectare planted at age `i`.
    pub planting_cost: Vec<f64>,
    pub terminal_lo: Vec<f64>,
    pub terminal_hi: Vec<f64>,
    pub transition: TransitionOperator,
}

fn check_vector(field: &'static str, values: &[f64], len: usize) -> Result<(), ScenarioError> {
    if values.len() != len {
        return Err(ScenarioError::new(
            field,
            format!("expected {len} values, found {}", values.len()),
        ));
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(ScenarioError::new(
            field,
            format!("entry {} is {v}, must be a finite value >= 0", i + 1),
        ));
    }
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let (t, l_max) = (self.horizon, self.age_classes);
        let (l, l0) = (self.min_harvest_age, self.max_planting_age);
        if t < 1 {
            return Err(ScenarioError::new("T", "must be at least 1"));
        }
        if l_max < 2 {
            return Err(ScenarioError::new("L", "must be at least 2"));
        }
        if l0 < 1 {
            return Err(ScenarioError::new("l0", "must be at least 1"));
        }
        if l0 >= l {
            return Err(ScenarioError::new(
                "l",
                format!("minimal harvesting age {l} must exceed maximal planting age l0 = {l0}"),
            ));
        }
        if l > l_max {
            return Err(ScenarioError::new(
                "l",
                format!("must not exceed L = {l_max}"),
            ));
        }
        if !(self.area_bound.is_finite() && self.area_bound > 0.0) {
            return Err(ScenarioError::new("S", "must be a finite value > 0"));
        }
        check_vector("v0", self.initial.areas(), l_max)?;
        let total = self.initial.total_area();
        if total > self.area_bound + FEASIBILITY_TOLERANCE {
            return Err(ScenarioError::new(
                "v0",
                format!("initial area {total} exceeds S = {}", self.area_bound),
            ));
        }
        check_vector("gamma", &self.carbon_rate, l_max)?;
        check_vector("Gamma", &self.carbon_floor, t)?;
        check_vector("mu", &self.timber_yield, l_max)?;
        check_vector("eta", &self.planting_cost, l_max)?;
        for (field, bounds) in [
            ("terminal_lo", &self.terminal_lo),
            ("terminal_hi", &self.terminal_hi),
        ] {
            if bounds.len() != l_max {
                return Err(ScenarioError::new(
                    field,
                    format!("expected {l_max} values, found {}", bounds.len()),
                ));
            }
            if bounds.iter().any(|b| b.is_nan()) {
                return Err(ScenarioError::new(field, "contains NaN"));
            }
        }
        if let Some(i) = (0..l_max).find(|&i| self.terminal_lo[i] > self.terminal_hi[i]) {
            return Err(ScenarioError::new(
                "terminal_lo",
                format!(
                    "entry {} is {}, above terminal_hi = {}",
                    i + 1,
                    self.terminal_lo[i],
                    self.terminal_hi[i]
                ),
            ));
        }
        if self.transition.order() != l_max {
            return Err(ScenarioError::new(
                "matrix",
                format!(
                    "transition operator has order {}, expected L = {l_max}",
                    self.transition.order()
                ),
            ));
        }
        Ok(())
    }

    pub fn layout(&self) -> VariableLayout {
        VariableLayout {
            horizon: self.horizon,
            age_classes: self.age_classes,
            min_harvest_age: self.min_harvest_age,
            max_planting_age: self.max_planting_age,
        }
    }

    /// Carbon absorbed by a state, `sum_i gamma_i v_i`.
    pub fn carbon(&self, state: &ForestState) -> f64 {
        self.carbon_rate
            .iter()
            .zip(state.areas())
            .map(|(g, v)| g * v)
            .sum()
    }
}

/// Column index of each LP variable. Ages and stages are as in the model
/// (ages 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    horizon: usize,
    age_classes: usize,
    min_harvest_age: usize,
    max_planting_age: usize,
}

impl VariableLayout {
    fn harvestable(&self) -> usize {
        self.age_classes - self.min_harvest_age + 1
    }

    pub fn num_states(&self) -> usize {
        self.horizon * self.age_classes
    }

    pub fn num_harvests(&self) -> usize {
        self.horizon * self.harvestable()
    }

    pub fn num_plantings(&self) -> usize {
        self.horizon * self.max_planting_age
    }

    pub fn len(&self) -> usize {
        self.num_states() + self.num_harvests() + self.num_plantings()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `v^t_i`, `t` in `1..=T`.
    pub fn state(&self, t: usize, i: usize) -> usize {
        (t - 1) * self.age_classes + (i - 1)
    }

    /// `u^t_i`, `t` in `0..T`, `i` in `l..=L`.
    pub fn harvest(&self, t: usize, i: usize) -> usize {
        self.num_states() + t * self.harvestable() + (i - self.min_harvest_age)
    }

    /// `w^t_i`, `t` in `0..T`, `i` in `1..=l0`.
    pub fn plant(&self, t: usize, i: usize) -> usize {
        self.num_states() + self.num_harvests() + t * self.max_planting_age + (i - 1)
    }

    fn names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.len());
        for t in 1..=self.horizon {
            names.extend((1..=self.age_classes).map(|i| format!("v[{t},{i}]")));
        }
        for t in 0..self.horizon {
            names.extend((self.min_harvest_age..=self.age_classes).map(|i| format!("u[{t},{i}]")));
        }
        for t in 0..self.horizon {
            names.extend((1..=self.max_planting_age).map(|i| format!("w[{t},{i}]")));
        }
        names
    }
}

fn lp_bug(err: LpError) -> PlanError {
    PlanError::Inconsistent(format!("assembled program is malformed: {err}"))
}

/// Assembles the planning LP. Row names: `dynamics[t,i]`, `area[t]`,
/// `carbon[t]`, `stock[t,i]`, `terminal_lo[i]`, `terminal_hi[i]`.
pub fn build_lp(scenario: &Scenario) -> Result<LinearProgram, PlanError> {
    scenario.validate()?;
    let layout = scenario.layout();
    let (horizon, classes) = (scenario.horizon, scenario.age_classes);
    let (l, l0) = (scenario.min_harvest_age, scenario.max_planting_age);
    let a = &scenario.transition;
    let n = layout.len();

    let mut objective = vec![0.0; n];
    for t in 0..horizon {
        for i in l..=classes {
            objective[layout.harvest(t, i)] = scenario.timber_yield[i - 1];
        }
        for i in 1..=l0 {
            objective[layout.plant(t, i)] = -scenario.planting_cost[i - 1];
        }
    }
    let mut lp = LinearProgram::new(layout.names(), objective).map_err(lp_bug)?;
    let mut add = |c: Constraint| lp.add_constraint(c).map_err(lp_bug);

    // v^{t+1}_j - sum_i A_ji (v^t_i - u^t_i) - w^t_j = 0, with v^0 moved to the rhs
    for t in 0..horizon {
        for j in 1..=classes {
            let mut row = vec![0.0; n];
            let mut rhs = 0.0;
            row[layout.state(t + 1, j)] = 1.0;
            for i in 1..=classes {
                let aji = a.entry(j, i);
                if aji == 0.0 {
                    continue;
                }
                if t == 0 {
                    rhs += aji * scenario.initial.area(i);
                } else {
                    row[layout.state(t, i)] -= aji;
                }
                if i >= l {
                    row[layout.harvest(t, i)] += aji;
                }
            }
            if j <= l0 {
                row[layout.plant(t, j)] = -1.0;
            }
            add(Constraint::new(
                format!("dynamics[{t},{j}]"),
                row,
                Relation::Equal,
                rhs,
            ))?;
        }
    }

    for t in 1..=horizon {
        let mut area = vec![0.0; n];
        let mut carbon = vec![0.0; n];
        for i in 1..=classes {
            area[layout.state(t, i)] = 1.0;
            carbon[layout.state(t, i)] = scenario.carbon_rate[i - 1];
        }
        add(Constraint::new(
            format!("area[{t}]"),
            area,
            Relation::LessEq,
            scenario.area_bound,
        ))?;
        add(Constraint::new(
            format!("carbon[{t}]"),
            carbon,
            Relation::GreaterEq,
            scenario.carbon_floor[t - 1],
        ))?;
    }

    for t in 0..horizon {
        for i in l..=classes {
            let mut row = vec![0.0; n];
            row[layout.harvest(t, i)] = 1.0;
            let rhs = if t == 0 {
                scenario.initial.area(i)
            } else {
                row[layout.state(t, i)] = -1.0;
                0.0
            };
            add(Constraint::new(
                format!("stock[{t},{i}]"),
                row,
                Relation::LessEq,
                rhs,
            ))?;
        }
    }

    for i in 1..=classes {
        let col = layout.state(horizon, i);
        let lo = scenario.terminal_lo[i - 1];
        let hi = scenario.terminal_hi[i - 1];
        if lo > 0.0 {
            let mut row = vec![0.0; n];
            row[col] = 1.0;
            add(Constraint::new(
                format!("terminal_lo[{i}]"),
                row,
                Relation::GreaterEq,
                lo,
            ))?;
        }
        if hi.is_finite() {
            let mut row = vec![0.0; n];
            row[col] = 1.0;
            add(Constraint::new(
                format!("terminal_hi[{i}]"),
                row,
                Relation::LessEq,
                hi,
            ))?;
        }
    }
    Ok(lp)
}

/// Which constraint family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Shape,
    InitialState,
    Dynamics,
    Area,
    Nonnegativity,
    HarvestAge,
    PlantingAge,
    HarvestStock,
    Carbon,
    TerminalLower,
    TerminalUpper,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Shape => "shape",
            ConstraintKind::InitialState => "initial_state",
            ConstraintKind::Dynamics => "dynamics",
            ConstraintKind::Area => "area",
            ConstraintKind::Nonnegativity => "nonnegativity",
            ConstraintKind::HarvestAge => "harvest_age",
            ConstraintKind::PlantingAge => "planting_age",
            ConstraintKind::HarvestStock => "harvest_stock",
            ConstraintKind::Carbon => "carbon",
            ConstraintKind::TerminalLower => "terminal_lower",
            ConstraintKind::TerminalUpper => "terminal_upper",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub stage: usize,
    /// 1-based; `None` for stage-wide constraints.
    pub age_class: Option<usize>,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at stage {}", self.kind, self.stage)?;
        if let Some(i) = self.age_class {
            write!(f, ", age class {i}")?;
        }
        write!(f, ": residual {}", self.residual)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// States `v^0..=v^T`, actions for stages `0..T`, and their verification.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanTrajectory {
    pub states: Vec<ForestState>,
    pub actions: Vec<ManagementAction>,
    pub objective_value: f64,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl PlanTrajectory {
    /// Builds an unverified trajectory; `feasible` starts false until
    /// [`PlanTrajectory::verify`] runs.
    pub fn new(states: Vec<ForestState>, actions: Vec<ManagementAction>) -> Self {
        Self {
            states,
            actions,
            objective_value: 0.0,
            feasible: false,
            violations: Vec::new(),
        }
    }

    /// Fills in the objective and the feasibility report.
    pub fn verify(mut self, scenario: &Scenario) -> Result<Self, PlanError> {
        self.objective_value = evaluate_objective(scenario, &self)?;
        let report = check_feasibility(scenario, &self);
        self.feasible = report.feasible;
        self.violations = report.violations;
        Ok(self)
    }

    pub fn area_totals(&self) -> Vec<f64> {
        self.states.iter().map(ForestState::total_area).collect()
    }

    pub fn carbon_totals(&self, scenario: &Scenario) -> Vec<f64> {
        self.states.iter().map(|s| scenario.carbon(s)).collect()
    }
}

fn shape_error(scenario: &Scenario, traj: &PlanTrajectory) -> Option<String> {
    let (t, l) = (scenario.horizon, scenario.age_classes);
    if traj.states.len() != t + 1 {
        return Some(format!(
            "expected {} states, found {}",
            t + 1,
            traj.states.len()
        ));
    }
    if traj.actions.len() != t {
        return Some(format!(
            "expected {t} actions, found {}",
            traj.actions.len()
        ));
    }
    if let Some(s) = traj.states.iter().position(|s| s.age_classes() != l) {
        return Some(format!(
            "state {s} has {} age classes, expected {l}",
            traj.states[s].age_classes()
        ));
    }
    if let Some(s) = traj.actions.iter().position(|a| a.age_classes() != l) {
        return Some(format!(
            "action {s} has {} age classes, expected {l}",
            traj.actions[s].age_classes()
        ));
    }
    None
}

pub fn evaluate_objective(scenario: &Scenario, traj: &PlanTrajectory) -> Result<f64, PlanError> {
    if let Some(msg) = shape_error(scenario, traj) {
        return Err(PlanError::DimensionMismatch(msg));
    }
    let (l, l0) = (scenario.min_harvest_age, scenario.max_planting_age);
    let value = traj
        .actions
        .iter()
        .map(|action| {
            let timber: f64 = (l..=scenario.age_classes)
                .map(|i| scenario.timber_yield[i - 1] * action.harvest()[i - 1])
                .sum();
            let planting: f64 = (1..=l0)
                .map(|i| scenario.planting_cost[i - 1] * action.plant()[i - 1])
                .sum();
            timber - planting
        })
        .sum();
    Ok(value)
}

/// Re-verifies every constraint family directly from the model definition.
/// Never fails; a shape mismatch is itself reported as a violation.
pub fn check_feasibility(scenario: &Scenario, traj: &PlanTrajectory) -> FeasibilityReport {
    let mut violations = Vec::new();
    if shape_error(scenario, traj).is_some() {
        let expected = scenario.horizon + 1;
        violations.push(Violation {
            kind: ConstraintKind::Shape,
            stage: 0,
            age_class: None,
            residual: (traj.states.len() as f64 - expected as f64).abs().max(1.0),
        });
        return FeasibilityReport {
            feasible: false,
            violations,
        };
    }

    let tol = FEASIBILITY_TOLERANCE;
    let mut report = |kind, stage, age_class, residual: f64| {
        if residual > tol || residual.is_nan() {
            violations.push(Violation {
                kind,
                stage,
                age_class,
                residual,
            });
        }
    };
    let (horizon, classes) = (scenario.horizon, scenario.age_classes);
    let (l, l0) = (scenario.min_harvest_age, scenario.max_planting_age);

    for (i, (v, v0)) in traj.states[0]
        .areas()
        .iter()
        .zip(scenario.initial.areas())
        .enumerate()
    {
        report(ConstraintKind::InitialState, 0, Some(i + 1), (v - v0).abs());
    }

    for (t, state) in traj.states.iter().enumerate() {
        for (i, v) in state.areas().iter().enumerate() {
            report(ConstraintKind::Nonnegativity, t, Some(i + 1), -v);
        }
        report(
            ConstraintKind::Area,
            t,
            None,
            state.total_area() - scenario.area_bound,
        );
        if t >= 1 {
            report(
                ConstraintKind::Carbon,
                t,
                None,
                scenario.carbon_floor[t - 1] - scenario.carbon(state),
            );
        }
    }

    for (t, action) in traj.actions.iter().enumerate() {
        let v = traj.states[t].areas();
        let (u, w) = (action.harvest(), action.plant());
        for i in 1..=classes {
            let k = i - 1;
            report(ConstraintKind::Nonnegativity, t, Some(i), -u[k]);
            report(ConstraintKind::Nonnegativity, t, Some(i), -w[k]);
            if i < l {
                report(ConstraintKind::HarvestAge, t, Some(i), u[k].abs());
            }
            if i > l0 {
                report(ConstraintKind::PlantingAge, t, Some(i), w[k].abs());
            }
            report(ConstraintKind::HarvestStock, t, Some(i), u[k] - v[k]);
        }
        let remaining: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
        let expected = scenario.transition.apply(&remaining);
        let next = traj.states[t + 1].areas();
        for i in 0..classes {
            report(
                ConstraintKind::Dynamics,
                t,
                Some(i + 1),
                (next[i] - expected[i] - w[i]).abs(),
            );
        }
    }

    let last = traj.states[horizon].areas();
    let bounds = scenario.terminal_lo.iter().zip(&scenario.terminal_hi);
    for (i, (v, (lo, hi))) in last.iter().zip(bounds).enumerate() {
        report(ConstraintKind::TerminalLower, horizon, Some(i + 1), lo - v);
        report(ConstraintKind::TerminalUpper, horizon, Some(i + 1), v - hi);
    }

    FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
    }
}

/// Solves the planning LP and returns the optimal trajectory, verified by
/// forward simulation and an independent constraint check.
pub fn solve_plan(scenario: &Scenario) -> Result<PlanTrajectory, PlanError> {
    let lp = build_lp(scenario)?;
    let solution = lp_core::solve(&lp);
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(PlanError::Infeasible {
                culprits: diagnose_infeasibility(scenario),
            })
        }
        LpStatus::Unbounded => return Err(PlanError::Unbounded),
    }
    if !solution.is_accepted(&Tolerances::default()) {
        return Err(PlanError::Inconsistent(format!(
            "LP residual {:?} exceeds the acceptance threshold",
            solution.max_residual
        )));
    }
    let x = solution.x.expect("optimal solutions carry a point");
    let layout = scenario.layout();
    let (horizon, classes) = (scenario.horizon, scenario.age_classes);
    let (l, l0) = (scenario.min_harvest_age, scenario.max_planting_age);

    let mut states = Vec::with_capacity(horizon + 1);
    states.push(scenario.initial.clone());
    for t in 1..=horizon {
        let areas = (1..=classes).map(|i| x[layout.state(t, i)]).collect();
        states.push(ForestState::new(areas).map_err(|e| PlanError::Inconsistent(e.to_string()))?);
    }
    let mut actions = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let mut harvest = vec![0.0; classes];
        let mut plant = vec![0.0; classes];
        for i in l..=classes {
            harvest[i - 1] = x[layout.harvest(t, i)];
        }
        for i in 1..=l0 {
            plant[i - 1] = x[layout.plant(t, i)];
        }
        actions.push(
            ManagementAction::new(harvest, plant, l, l0)
                .map_err(|e| PlanError::Inconsistent(e.to_string()))?,
        );
    }

    let mut replay = scenario.initial.clone();
    let mut deviation = 0.0f64;
    for (t, action) in actions.iter().enumerate() {
        replay = managed_step(&replay, action, &scenario.transition)
            .map_err(|source| PlanError::Step { stage: t, source })?;
        for (a, b) in replay.areas().iter().zip(states[t + 1].areas()) {
            deviation = deviation.max((a - b).abs());
        }
    }
    if deviation > CONSISTENCY_TOLERANCE {
        return Err(PlanError::Inconsistent(format!(
            "re-simulated states deviate from the LP states by {deviation}"
        )));
    }

    let trajectory = PlanTrajectory::new(states, actions).verify(scenario)?;
    if !trajectory.feasible {
        let first = &trajectory.violations[0];
        return Err(PlanError::Inconsistent(format!(
            "optimal plan violates {first}"
        )));
    }
    Ok(trajectory)
}

/// Rolls a fixed policy forward from `v0` and verifies the result.
pub fn simulate_policy(
    scenario: &Scenario,
    actions: Vec<ManagementAction>,
) -> Result<PlanTrajectory, PlanError> {
    scenario.validate()?;
    if actions.len() != scenario.horizon {
        return Err(PlanError::DimensionMismatch(format!(
            "expected {} actions, found {}",
            scenario.horizon,
            actions.len()
        )));
    }
    let mut states = Vec::with_capacity(actions.len() + 1);
    states.push(scenario.initial.clone());
    for (t, action) in actions.iter().enumerate() {
        let next = managed_step(&states[t], action, &scenario.transition)
            .map_err(|source| PlanError::Step { stage: t, source })?;
        states.push(next);
    }
    PlanTrajectory::new(states, actions).verify(scenario)
}

/// Names the requirement(s) that make an infeasible scenario infeasible.
///
/// Cheap bound checks come first; failing those, each carbon floor and the
/// terminal box are dropped one at a time and the relaxed program re-solved.
pub fn diagnose_infeasibility(scenario: &Scenario) -> Vec<String> {
    let mut culprits = Vec::new();
    let best_rate = scenario.carbon_rate.iter().copied().fold(0.0, f64::max);
    let attainable = best_rate * scenario.area_bound;
    for (k, floor) in scenario.carbon_floor.iter().enumerate() {
        if *floor > attainable + FEASIBILITY_TOLERANCE {
            culprits.push(format!(
                "carbon constraint at stage {}: floor {floor} exceeds the most sequestration any state can reach, max(gamma) * S = {attainable}",
                k + 1
            ));
        }
    }
    let terminal_min: f64 = scenario.terminal_lo.iter().map(|v| v.max(0.0)).sum();
    if terminal_min > scenario.area_bound + FEASIBILITY_TOLERANCE {
        culprits.push(format!(
            "terminal box: lower bounds sum to {terminal_min}, above S = {}",
            scenario.area_bound
        ));
    }
    if !culprits.is_empty() {
        return culprits;
    }

    let Ok(lp) = build_lp(scenario) else {
        return vec!["scenario failed validation".into()];
    };
    let relaxed_is_feasible = |drop: &dyn Fn(&str) -> bool| {
        let mut relaxed = lp.clone();
        relaxed.retain_constraints(|c| !drop(&c.name));
        lp_core::solve(&relaxed).status != LpStatus::Infeasible
    };
    for t in 1..=scenario.horizon {
        let name = format!("carbon[{t}]");
        if relaxed_is_feasible(&|n| n == name) {
            culprits.push(format!(
                "carbon constraint at stage {t}: floor {} cannot be met",
                scenario.carbon_floor[t - 1]
            ));
        }
    }
    if relaxed_is_feasible(&|n| n.starts_with("terminal_")) {
        culprits.push("terminal box cannot be reached by the end of the horizon".into());
    }
    if culprits.is_empty() {
        culprits.push("no single carbon floor or the terminal box alone explains it; several requirements conflict".into());
    }
    culprits
}

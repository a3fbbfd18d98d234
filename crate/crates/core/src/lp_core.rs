//! Dense linear programming: a named-variable model and a two-phase primal
//! simplex solver with Bland's anti-cycling rule.
//!
//! Every program is a maximization over nonnegative variables. Free
//! variables are not supported; split them into two nonnegative parts if
//! needed.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Basic values below this are reported as exactly zero.
const ZERO_SNAP: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("variable name `{0}` is used more than once")]
    DuplicateName(String),
    #[error("objective has {found} coefficients but there are {expected} variables")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("constraint `{name}` has {found} coefficients but there are {expected} variables")]
    RowLength {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("constraint `{0}` contains a non-finite value")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    LessEq,
    Equal,
    GreaterEq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::LessEq => "<=",
            Relation::Equal => "=",
            Relation::GreaterEq => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(
        name: impl Into<String>,
        coefficients: Vec<f64>,
        relation: Relation,
        rhs: f64,
    ) -> Self {
        Self {
            name: name.into(),
            coefficients,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// Amount by which `x` violates this row; zero when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::LessEq => (lhs - self.rhs).max(0.0),
            Relation::GreaterEq => (self.rhs - lhs).max(0.0),
            Relation::Equal => (lhs - self.rhs).abs(),
        }
    }
}

/// `maximize objective . x  subject to  constraints,  x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    variable_names: Vec<String>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(variable_names: Vec<String>, objective: Vec<f64>) -> Result<Self, LpError> {
        if objective.len() != variable_names.len() {
            return Err(LpError::ObjectiveLength {
                expected: variable_names.len(),
                found: objective.len(),
            });
        }
        let mut seen = HashSet::with_capacity(variable_names.len());
        for name in &variable_names {
            if !seen.insert(name.as_str()) {
                return Err(LpError::DuplicateName(name.clone()));
            }
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        Ok(Self {
            variable_names,
            objective,
            constraints: Vec::new(),
        })
    }

    pub fn add_constraint(&mut self, constraint: Constraint) -> Result<(), LpError> {
        if constraint.coefficients.len() != self.num_variables() {
            return Err(LpError::RowLength {
                name: constraint.name,
                expected: self.num_variables(),
                found: constraint.coefficients.len(),
            });
        }
        if !constraint.rhs.is_finite() || constraint.coefficients.iter().any(|a| !a.is_finite()) {
            return Err(LpError::NonFinite(constraint.name));
        }
        self.constraints.push(constraint);
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.variable_names.len()
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variable_names.iter().position(|n| n == name)
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn retain_constraints(&mut self, keep: impl FnMut(&Constraint) -> bool) {
        self.constraints.retain(keep);
    }

    pub fn scale_objective(&mut self, factor: f64) {
        self.objective.iter_mut().for_each(|c| *c *= factor);
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation over all rows and the sign restrictions.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(x));
        let signs = x.iter().map(|v| (-v).max(0.0));
        rows.chain(signs).fold(0.0, f64::max)
    }
}

/// Numerical thresholds used by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Smallest magnitude accepted as a pivot or as an improving reduced cost.
    pub pivot: f64,
    /// Largest constraint residual accepted in a returned solution.
    pub residual: f64,
    /// Phase-one objective above which the program is declared infeasible.
    pub feasibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pivot: 1e-9,
            residual: 1e-8,
            feasibility: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "Optimal",
            LpStatus::Infeasible => "Infeasible",
            LpStatus::Unbounded => "Unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status` is `Optimal`.
    pub x: Option<Vec<f64>>,
    /// Present iff `status` is `Optimal`.
    pub objective_value: Option<f64>,
    /// Final phase-two reduced costs of the structural variables, present
    /// iff `status` is `Optimal`. All entries are `<= pivot` tolerance.
    pub reduced_costs: Option<Vec<f64>>,
    /// Largest row or sign violation of `x`, present iff `status` is
    /// `Optimal`.
    pub max_residual: Option<f64>,
    /// Pivots performed across both phases.
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        Self {
            status,
            x: None,
            objective_value: None,
            reduced_costs: None,
            max_residual: None,
            pivots,
        }
    }

    /// True for an optimal point whose residual is within `tol.residual`.
    pub fn is_accepted(&self, tol: &Tolerances) -> bool {
        self.status == LpStatus::Optimal && self.max_residual.is_some_and(|r| r <= tol.residual)
    }
}

pub fn solve(lp: &LinearProgram) -> LpSolution {
    solve_with(lp, &Tolerances::default())
}

pub fn solve_with(lp: &LinearProgram, tol: &Tolerances) -> LpSolution {
    let mut tableau = Tableau::phase_one(lp);
    let n = lp.num_variables();

    if tableau.first_artificial < tableau.cols {
        // Phase one is bounded below by zero, so it always terminates optimal.
        tableau.run(tol);
        if -tableau.objective_value() > tol.feasibility {
            return LpSolution::without_point(LpStatus::Infeasible, tableau.pivots);
        }
        tableau.evict_artificials(tol);
    }

    tableau.install_objective(lp.objective());
    if tableau.run(tol) == Outcome::Unbounded {
        return LpSolution::without_point(LpStatus::Unbounded, tableau.pivots);
    }

    let mut x = vec![0.0; n];
    for (r, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            let value = tableau.rhs(r);
            x[b] = if value < ZERO_SNAP { 0.0 } else { value };
        }
    }
    LpSolution {
        status: LpStatus::Optimal,
        objective_value: Some(lp.evaluate(&x)),
        reduced_costs: Some(tableau.cost[..n].to_vec()),
        max_residual: Some(lp.max_violation(&x)),
        x: Some(x),
        pivots: tableau.pivots,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

/// Dense simplex tableau. Columns are laid out as structural variables,
/// then one slack or surplus per inequality row, then one artificial per row
/// that has no natural basic column. The right-hand side is the last entry
/// of each row.
struct Tableau {
    cols: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced costs `c_j - z_j` for the current phase; the last entry holds
    /// minus the current objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn phase_one(lp: &LinearProgram) -> Self {
        let n = lp.num_variables();
        // Normalize every row to rhs >= 0; a `>= 0` row becomes `<= 0` so its
        // slack can start basic.
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints()
            .iter()
            .map(|c| {
                let flip = c.rhs < 0.0 || (c.rhs == 0.0 && c.relation == Relation::GreaterEq);
                if flip {
                    let relation = match c.relation {
                        Relation::LessEq => Relation::GreaterEq,
                        Relation::GreaterEq => Relation::LessEq,
                        Relation::Equal => Relation::Equal,
                    };
                    let coeffs = c.coefficients.iter().map(|a| -a).collect();
                    (coeffs, relation, -c.rhs)
                } else {
                    (c.coefficients.clone(), c.relation, c.rhs)
                }
            })
            .collect();

        let m = rows.len();
        let slacks = rows.iter().filter(|r| r.1 != Relation::Equal).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::LessEq).count();
        let first_artificial = n + slacks;
        let cols = first_artificial + artificials;
        let width = cols + 1;

        let mut data = vec![0.0; m * width];
        let mut basis = Vec::with_capacity(m);
        let mut cost = vec![0.0; width];
        let (mut next_slack, mut next_artificial) = (n, first_artificial);
        for (r, (coeffs, relation, rhs)) in rows.into_iter().enumerate() {
            let row = &mut data[r * width..(r + 1) * width];
            row[..n].copy_from_slice(&coeffs);
            row[cols] = rhs;
            match relation {
                Relation::LessEq => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::GreaterEq | Relation::Equal => {
                    if relation == Relation::GreaterEq {
                        row[next_slack] = -1.0;
                        next_slack += 1;
                    }
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    next_artificial += 1;
                    // maximize -sum(artificials): price out the basic artificial
                    for (c, a) in cost.iter_mut().zip(row.iter()) {
                        *c += a;
                    }
                }
            }
        }
        for c in &mut cost[first_artificial..cols] {
            *c = 0.0;
        }

        Self {
            cols,
            width,
            data,
            cost,
            basis,
            first_artificial,
            pivots: 0,
        }
    }

    fn num_rows(&self) -> usize {
        self.basis.len()
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn objective_value(&self) -> f64 {
        -self.cost[self.cols]
    }

    /// Bland's rule: lowest-index improving column; among tied minimum
    /// ratios, the row whose basic variable has the lowest index.
    fn run(&mut self, tol: &Tolerances) -> Outcome {
        loop {
            let Some(entering) = (0..self.first_artificial).find(|&j| self.cost[j] > tol.pivot)
            else {
                return Outcome::Optimal;
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.num_rows() {
                let a = self.at(r, entering);
                if a <= tol.pivot {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        let slack = 1e-12 * best_ratio.abs().max(1.0);
                        if ratio < best_ratio - slack
                            || (ratio <= best_ratio + slack && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            match leaving {
                Some((r, _)) => self.pivot(r, entering),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn pivot(&mut self, pivot_row: usize, entering: usize) {
        let width = self.width;
        let start = pivot_row * width;
        let inv = 1.0 / self.data[start + entering];
        for v in &mut self.data[start..start + width] {
            *v *= inv;
        }
        self.data[start + entering] = 1.0;
        let pivot_values = self.data[start..start + width].to_vec();

        let eliminate = |row: &mut [f64], factor: f64| {
            for (v, p) in row.iter_mut().zip(&pivot_values) {
                *v -= factor * p;
            }
            row[entering] = 0.0;
        };
        for (r, row) in self.data.chunks_mut(width).enumerate() {
            if r == pivot_row {
                continue;
            }
            let factor = row[entering];
            if factor != 0.0 {
                eliminate(row, factor);
                // roundoff can push a zero rhs just below zero
                if row[width - 1] < 0.0 && row[width - 1] > -1e-11 {
                    row[width - 1] = 0.0;
                }
            }
        }
        let factor = self.cost[entering];
        if factor != 0.0 {
            eliminate(&mut self.cost, factor);
        }
        self.basis[pivot_row] = entering;
        self.pivots += 1;
    }

    /// After a successful phase one, pivot every artificial still in the
    /// basis (at value zero) onto a real column, or drop its row when the
    /// row is a linear combination of the others.
    fn evict_artificials(&mut self, tol: &Tolerances) {
        let mut r = 0;
        while r < self.num_rows() {
            if self.basis[r] < self.first_artificial {
                r += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| self.at(r, j).abs() > tol.pivot) {
                Some(j) => {
                    self.pivot(r, j);
                    r += 1;
                }
                None => {
                    self.data.drain(r * self.width..(r + 1) * self.width);
                    self.basis.remove(r);
                }
            }
        }
    }

    /// Replace the phase-one costs by the real objective, priced out
    /// against the current basis.
    fn install_objective(&mut self, objective: &[f64]) {
        let price = |j: usize| objective.get(j).copied().unwrap_or(0.0);
        let mut cost = vec![0.0; self.width];
        for (j, c) in cost.iter_mut().enumerate().take(self.first_artificial) {
            *c = price(j);
        }
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = price(b);
            if cb == 0.0 {
                continue;
            }
            let row = &self.data[r * self.width..(r + 1) * self.width];
            for (c, a) in cost.iter_mut().zip(row) {
                *c -= cb * a;
            }
        }
        for c in &mut cost[self.first_artificial..self.cols] {
            *c = 0.0;
        }
        self.cost = cost;
    }
}

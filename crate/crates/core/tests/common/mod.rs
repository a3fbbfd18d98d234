//! Test-only oracles, independent of the simplex path.

#![allow(dead_code)]

use forestplan_core::lp_core::{Constraint, LinearProgram, Relation};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleResult {
    Optimal(f64),
    Infeasible,
}

fn feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    if x.iter().any(|v| *v < -tol) {
        return false;
    }
    lp.constraints().iter().all(|c| {
        let lhs: f64 = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
        match c.relation {
            Relation::LessEq => lhs <= c.rhs + tol,
            Relation::GreaterEq => lhs >= c.rhs - tol,
            Relation::Equal => (lhs - c.rhs).abs() <= tol,
        }
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximizes over every vertex of the feasible polyhedron. Only valid for
/// bounded problems: every choice of `n` active hyperplanes (constraint rows
/// and the `x_j = 0` bounds) is solved as a square system and kept if
/// feasible.
pub fn vertex_enumeration(lp: &LinearProgram) -> OracleResult {
    let n = lp.num_variables();
    let mut planes: Vec<(Vec<f64>, f64)> = lp
        .constraints()
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs))
        .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    for subset in combinations(planes.len(), n) {
        let a = DMatrix::from_fn(n, n, |r, c| planes[subset[r]].0[c]);
        let b = DVector::from_fn(n, |r, _| planes[subset[r]].1);
        let Some(x) = a.lu().solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if x.iter().any(|v| !v.is_finite()) || !feasible(lp, &x, 1e-9) {
            continue;
        }
        let value: f64 = lp.objective().iter().zip(&x).map(|(c, v)| c * v).sum();
        best = Some(best.map_or(value, |b: f64| b.max(value)));
    }
    best.map_or(OracleResult::Infeasible, OracleResult::Optimal)
}

/// Random LP with up to `max_vars` variables and up to `max_rows` rows, one
/// of which is always a bounding row `sum x <= B` so the problem can never
/// be unbounded.
pub fn random_bounded_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let names = (0..n).map(|j| format!("x{j}")).collect();
    let objective = (0..n).map(|_| rng.gen_range(-5i32..=10) as f64).collect();
    let mut lp = LinearProgram::new(names, objective).unwrap();
    lp.add_constraint(Constraint::new(
        "bound",
        vec![1.0; n],
        Relation::LessEq,
        rng.gen_range(5i32..=30) as f64,
    ))
    .unwrap();
    for r in 1..m {
        let coefficients = (0..n).map(|_| rng.gen_range(-3i32..=6) as f64).collect();
        let relation = match rng.gen_range(0..10) {
            0..=5 => Relation::LessEq,
            6..=8 => Relation::GreaterEq,
            _ => Relation::Equal,
        };
        let rhs = rng.gen_range(-4i32..=20) as f64;
        lp.add_constraint(Constraint::new(
            format!("r{r}"),
            coefficients,
            relation,
            rhs,
        ))
        .unwrap();
    }
    lp
}

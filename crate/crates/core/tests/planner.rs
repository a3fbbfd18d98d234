use forestplan_core::forest_model::{ForestState, TransitionOperator};
use forestplan_core::lp_core::{solve, LpStatus};
use forestplan_core::planner::{
    build_lp, check_feasibility, evaluate_objective, solve_plan, PlanError, Scenario,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_class(horizon: usize, v0: [f64; 2], survival: [f64; 2]) -> Scenario {
    Scenario {
        horizon,
        age_classes: 2,
        min_harvest_age: 2,
        max_planting_age: 1,
        area_bound: 10.0,
        initial: ForestState::new(v0.to_vec()).unwrap(),
        carbon_rate: vec![1.0, 2.0],
        carbon_floor: vec![0.0; horizon],
        timber_yield: vec![0.0, 3.0],
        planting_cost: vec![1.0, 0.0],
        terminal_lo: vec![0.0; 2],
        terminal_hi: vec![10.0; 2],
        transition: TransitionOperator::aging(&survival).unwrap(),
    }
}

/// Exhaustive search over harvest `u_2` and planting `w_1` on a grid of
/// step `S / 50`, with the two-class dynamics written out by hand:
/// `v' = (w_1, s_1 v_1 + s_2 (v_2 - u_2))`.
fn grid_search(s: &Scenario) -> Option<f64> {
    assert_eq!(s.age_classes, 2);
    let step = s.area_bound / 50.0;
    let surv = [s.transition.entry(2, 1), s.transition.entry(2, 2)];
    let tol = 1e-9;
    let ok_state = |t: usize, v: [f64; 2]| {
        let carbon = s.carbon_rate[0] * v[0] + s.carbon_rate[1] * v[1];
        let mut ok = v[0] + v[1] <= s.area_bound + tol && carbon >= s.carbon_floor[t - 1] - tol;
        if t == s.horizon {
            ok &= (0..2).all(|i| v[i] >= s.terminal_lo[i] - tol && v[i] <= s.terminal_hi[i] + tol);
        }
        ok
    };
    fn rec(
        s: &Scenario,
        t: usize,
        v: [f64; 2],
        step: f64,
        surv: [f64; 2],
        ok_state: &dyn Fn(usize, [f64; 2]) -> bool,
    ) -> Option<f64> {
        if t == s.horizon {
            return Some(0.0);
        }
        let mut best: Option<f64> = None;
        let max_u = (v[1] / step + 1e-9).floor() as usize;
        for ku in 0..=max_u {
            let u = ku as f64 * step;
            for kw in 0..=50 {
                let w = kw as f64 * step;
                let next = [w, surv[0] * v[0] + surv[1] * (v[1] - u)];
                if !ok_state(t + 1, next) {
                    continue;
                }
                if let Some(rest) = rec(s, t + 1, next, step, surv, ok_state) {
                    let value = s.timber_yield[1] * u - s.planting_cost[0] * w + rest;
                    best = Some(best.map_or(value, |b: f64| b.max(value)));
                }
            }
        }
        best
    }
    let v0 = [s.initial.area(1), s.initial.area(2)];
    rec(s, 0, v0, step, surv, &ok_state)
}

fn lp_optimum(s: &Scenario) -> Option<f64> {
    match solve_plan(s) {
        Ok(traj) => Some(traj.objective_value),
        Err(PlanError::Infeasible { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn single_stage_greedy_harvest() {
    let s = two_class(1, [4.0, 6.0], [1.0, 1.0]);
    let traj = solve_plan(&s).unwrap();
    assert!((traj.objective_value - 3.0 * 6.0).abs() < 1e-9);
    assert!((traj.actions[0].harvest()[1] - 6.0).abs() < 1e-9);
    assert_eq!(traj.actions[0].plant()[0], 0.0);
    assert!((grid_search(&s).unwrap() - 18.0).abs() < 1e-9);
}

#[test]
fn small_instances_match_grid_search() {
    let mut cases = Vec::new();
    for horizon in 1..=2 {
        cases.push(two_class(horizon, [4.0, 6.0], [1.0, 1.0]));
        let mut floors = two_class(horizon, [2.0, 6.0], [1.0, 1.0]);
        floors.carbon_floor = vec![9.0; horizon];
        floors.terminal_lo = vec![1.0, 2.0];
        cases.push(floors);
        let mut lossy = two_class(horizon, [3.0, 5.0], [0.9, 0.8]);
        lossy.timber_yield = vec![0.0, 2.5];
        lossy.planting_cost = vec![0.4, 0.0];
        lossy.terminal_lo = vec![2.0, 0.0];
        cases.push(lossy);
    }
    for (k, s) in cases.iter().enumerate() {
        let step = s.area_bound / 50.0;
        // each decision can sit at most one grid step from the LP optimum
        let resolution = step * s.horizon as f64 * (s.timber_yield[1] + s.planting_cost[0]) * 2.0;
        let lp = lp_optimum(s);
        let grid = grid_search(s);
        match (lp, grid) {
            (Some(lp), Some(grid)) => {
                assert!(grid <= lp + 1e-9, "case {k}: grid {grid} beats LP {lp}");
                assert!(lp - grid <= resolution, "case {k}: LP {lp}, grid {grid}");
            }
            (None, None) => {}
            other => panic!("case {k}: {other:?}"),
        }
    }
}

#[test]
fn vacuous_rows_do_not_change_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut s = random_scenario(&mut rng);
    s.carbon_floor = vec![0.0; s.horizon];
    s.terminal_lo = vec![0.0; s.age_classes];
    s.terminal_hi = vec![s.area_bound; s.age_classes];
    let full = build_lp(&s).unwrap();
    let mut trimmed = full.clone();
    trimmed
        .retain_constraints(|c| !c.name.starts_with("carbon") && !c.name.starts_with("terminal"));
    assert!(trimmed.constraints().len() < full.constraints().len());
    let (a, b) = (solve(&full), solve(&trimmed));
    assert_eq!(a.status, LpStatus::Optimal);
    assert!((a.objective_value.unwrap() - b.objective_value.unwrap()).abs() <= 1e-8);
}

#[test]
fn unreachable_carbon_floor_is_infeasible() {
    let mut s = two_class(2, [4.0, 6.0], [1.0, 1.0]);
    s.carbon_floor[0] = 2.0 * s.area_bound + 0.1;
    assert_eq!(solve(&build_lp(&s).unwrap()).status, LpStatus::Infeasible);
    assert!(matches!(solve_plan(&s), Err(PlanError::Infeasible { .. })));
}

#[test]
fn zero_yields_give_zero_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = random_scenario(&mut rng);
    s.timber_yield = vec![0.0; s.age_classes];
    s.planting_cost = vec![0.0; s.age_classes];
    let traj = solve_plan(&s).unwrap();
    assert_eq!(traj.objective_value, 0.0);
    assert!(check_feasibility(&s, &traj).feasible);
}

#[test]
fn stationary_rotation_is_matched_or_beaten() {
    let (a, horizon, mu3, eta1) = (25.0, 6, 4.0, 1.5);
    let s = Scenario {
        horizon,
        age_classes: 3,
        min_harvest_age: 3,
        max_planting_age: 1,
        area_bound: 3.0 * a,
        initial: ForestState::new(vec![a; 3]).unwrap(),
        carbon_rate: vec![0.2, 0.6, 1.0],
        carbon_floor: vec![0.0; horizon],
        timber_yield: vec![0.0, 0.0, mu3],
        planting_cost: vec![eta1, 0.0, 0.0],
        terminal_lo: vec![a; 3],
        terminal_hi: vec![a; 3],
        transition: TransitionOperator::lossless_aging(3).unwrap(),
    };
    let hand = (mu3 - eta1) * a * horizon as f64;
    let traj = solve_plan(&s).unwrap();
    assert!(
        traj.objective_value >= hand - 1e-7,
        "{} < {hand}",
        traj.objective_value
    );
}

/// Small random scenario; not guaranteed feasible.
fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let horizon = rng.gen_range(2..=5);
    let classes = rng.gen_range(3..=6);
    let l0 = rng.gen_range(1..=2);
    let l = rng.gen_range(l0 + 1..=classes);
    let area_bound = 100.0;
    let mut v0: Vec<f64> = (0..classes).map(|_| rng.gen_range(0.0..30.0)).collect();
    let total: f64 = v0.iter().sum();
    if total > 90.0 {
        v0.iter_mut().for_each(|v| *v *= 90.0 / total);
    }
    let survival: Vec<f64> = (0..classes).map(|_| rng.gen_range(0.85..=1.0)).collect();
    let gamma: Vec<f64> = (0..classes).map(|_| rng.gen_range(0.0..3.0)).collect();
    let carbon0: f64 = gamma.iter().zip(&v0).map(|(g, v)| g * v).sum();
    Scenario {
        horizon,
        age_classes: classes,
        min_harvest_age: l,
        max_planting_age: l0,
        area_bound,
        carbon_floor: (0..horizon)
            .map(|_| rng.gen_range(0.0..0.6) * carbon0)
            .collect(),
        initial: ForestState::new(v0).unwrap(),
        carbon_rate: gamma,
        timber_yield: (0..classes)
            .map(|i| {
                if i + 1 >= l {
                    rng.gen_range(0.0..10.0)
                } else {
                    0.0
                }
            })
            .collect(),
        planting_cost: (0..classes)
            .map(|i| if i < l0 { rng.gen_range(0.0..5.0) } else { 0.0 })
            .collect(),
        terminal_lo: (0..classes).map(|_| rng.gen_range(0.0..4.0)).collect(),
        terminal_hi: (0..classes)
            .map(|_| rng.gen_range(20.0..=area_bound))
            .collect(),
        transition: TransitionOperator::aging(&survival).unwrap(),
    }
}

#[test]
fn solved_plans_verify_and_agree_with_the_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut solved = 0;
    for _ in 0..40 {
        let s = random_scenario(&mut rng);
        let Ok(traj) = solve_plan(&s) else { continue };
        solved += 1;
        let report = check_feasibility(&s, &traj);
        assert!(
            report.feasible && report.violations.is_empty(),
            "{:?}",
            report.violations
        );
        assert_eq!(traj.states[0], s.initial);
        let lp_value = solve(&build_lp(&s).unwrap()).objective_value.unwrap();
        let recomputed = evaluate_objective(&s, &traj).unwrap();
        assert!(
            (recomputed - lp_value).abs() <= 1e-7,
            "{recomputed} vs {lp_value}"
        );
    }
    assert!(solved >= 20, "only {solved} feasible scenarios");
}

#[test]
fn relaxing_requirements_never_lowers_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut compared = 0;
    for _ in 0..40 {
        let base = random_scenario(&mut rng);
        let Some(base_value) = lp_optimum(&base) else {
            continue;
        };
        let mut wider = base.clone();
        wider.terminal_lo.iter_mut().for_each(|v| *v *= 0.5);
        wider.terminal_hi.iter_mut().for_each(|v| *v += 10.0);
        let mut lower = base.clone();
        lower.carbon_floor.iter_mut().for_each(|v| *v *= 0.8);
        for relaxed in [wider, lower] {
            let value = lp_optimum(&relaxed).expect("relaxation of a feasible scenario");
            assert!(value >= base_value - 1e-7, "{value} < {base_value}");
        }
        compared += 1;
    }
    assert!(compared >= 20);
}

#[test]
fn scaling_yields_scales_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compared = 0;
    for _ in 0..30 {
        let base = random_scenario(&mut rng);
        let Some(base_value) = lp_optimum(&base) else {
            continue;
        };
        for factor in [0.25, 3.7] {
            let mut scaled = base.clone();
            scaled.timber_yield.iter_mut().for_each(|v| *v *= factor);
            scaled.planting_cost.iter_mut().for_each(|v| *v *= factor);
            let value = lp_optimum(&scaled).unwrap();
            let expected = factor * base_value;
            assert!(
                (value - expected).abs() <= 1e-7 * expected.abs().max(1.0),
                "{value} vs {expected}"
            );
        }
        compared += 1;
    }
    assert!(compared >= 15);
}

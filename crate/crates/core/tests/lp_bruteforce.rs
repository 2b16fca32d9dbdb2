mod common;

use common::{brute_force_lp, BruteLp};
use proptest::prelude::*;
use scg_core::lp::{solve_lp, LpProblem, LpStatus, Relation};

fn relation(k: u8) -> Relation {
    match k % 3 {
        0 => Relation::Le,
        1 => Relation::Ge,
        _ => Relation::Eq,
    }
}

prop_compose! {
    fn small_lp()(n in 1usize..=4, m in 0usize..=5)
        (obj in prop::collection::vec(-5i32..=5, n),
         rows in prop::collection::vec((prop::collection::vec(-4i32..=4, n), 0u8..6, -8i32..=8), m),
         uppers in prop::collection::vec(prop::option::weighted(0.3, 1i32..=6), n)) -> LpProblem {
        let n = obj.len();
        let mut lp = LpProblem::new(n);
        lp.objective = obj.iter().map(|&c| c as f64).collect();
        for (coeffs, rel, rhs) in rows {
            // bias towards inequalities so feasible problems are common
            let rel = if rel < 4 { relation(rel % 2) } else { Relation::Eq };
            lp.add(coeffs.iter().enumerate().map(|(j, &a)| (j, a as f64)).collect(), rel, rhs as f64);
        }
        for (j, u) in uppers.into_iter().enumerate() {
            if let Some(u) = u {
                lp.upper[j] = u as f64;
            }
        }
        lp
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_agrees_with_vertex_enumeration(lp in small_lp()) {
        let sol = solve_lp(&lp).unwrap();
        match brute_force_lp(&lp) {
            BruteLp::Optimal(v) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!((sol.objective - v).abs() <= 1e-8 * v.abs().max(1.0), "{} vs {}", sol.objective, v);
                prop_assert!(lp.max_violation(&sol.x) <= 1e-8);
                prop_assert!((lp.evaluate(&sol.x) - sol.objective).abs() <= 1e-8 * v.abs().max(1.0));
            }
            BruteLp::Infeasible => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            BruteLp::Unbounded => prop_assert_eq!(sol.status, LpStatus::Unbounded),
        }
    }

    #[test]
    fn adding_a_constraint_never_lowers_the_optimum(lp in small_lp(), extra in prop::collection::vec(-3i32..=3, 4), rhs in 0i32..=6) {
        let base = solve_lp(&lp).unwrap();
        prop_assume!(base.status == LpStatus::Optimal);
        let mut tighter = lp.clone();
        let coeffs = extra.iter().take(lp.num_vars()).enumerate().map(|(j, &a)| (j, a as f64)).collect();
        tighter.add(coeffs, Relation::Le, rhs as f64);
        let t = solve_lp(&tighter).unwrap();
        prop_assert!(t.status != LpStatus::Unbounded);
        if t.status == LpStatus::Optimal {
            prop_assert!(t.objective >= base.objective - 1e-8 * base.objective.abs().max(1.0));
        }
    }
}

//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use scg_core::lp::{LpProblem, Relation};

const EPS: f64 = 1e-9;

pub enum BruteLp {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

type Row = (Vec<f64>, Relation, f64);

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn satisfied(row: &Row, x: &[f64]) -> bool {
    let lhs: f64 = row.0.iter().zip(x).map(|(a, v)| a * v).sum();
    let slack = 1e-7 * (1.0 + row.2.abs());
    match row.1 {
        Relation::Le => lhs <= row.2 + slack,
        Relation::Ge => lhs >= row.2 - slack,
        Relation::Eq => (lhs - row.2).abs() <= slack,
    }
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let n = idx.len();
    for pos in (0..n).rev() {
        if idx[pos] < m - n + pos {
            idx[pos] += 1;
            for k in pos + 1..n {
                idx[k] = idx[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum of `c·x` over the vertices of a pointed polyhedron.
fn best_vertex(c: &[f64], rows: &[Row]) -> Option<f64> {
    let n = c.len();
    if rows.len() < n {
        return None;
    }
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&k| rows[k].0.clone()).collect();
        let b = idx.iter().map(|&k| rows[k].2).collect();
        if let Some(x) = solve_square(a, b) {
            if rows.iter().all(|r| satisfied(r, &x)) {
                let v: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        if !next_combination(&mut idx, rows.len()) {
            return best;
        }
    }
}

/// Vertex enumeration: every feasible LP over `lower ≥ 0` bounds has an
/// optimal vertex unless a recession direction improves the objective.
pub fn brute_force_lp(lp: &LpProblem) -> BruteLp {
    let n = lp.num_vars();
    let unit = |j: usize| (0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let mut rows: Vec<Row> = Vec::new();
    let mut cone: Vec<Row> = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.coeffs {
            a[j] += v;
        }
        cone.push((a.clone(), c.relation, 0.0));
        rows.push((a, c.relation, c.rhs));
    }
    for j in 0..n {
        assert!(lp.lower[j].is_finite(), "oracle needs finite lower bounds");
        rows.push((unit(j), Relation::Ge, lp.lower[j]));
        cone.push((unit(j), Relation::Ge, 0.0));
        if lp.upper[j].is_finite() {
            rows.push((unit(j), Relation::Le, lp.upper[j]));
            cone.push((unit(j), Relation::Le, 0.0));
        }
    }
    let Some(v) = best_vertex(&lp.objective, &rows) else { return BruteLp::Infeasible };
    cone.push((vec![1.0; n], Relation::Eq, 1.0));
    match best_vertex(&lp.objective, &cone) {
        Some(d) if d < -EPS => BruteLp::Unbounded,
        _ => BruteLp::Optimal(v),
    }
}

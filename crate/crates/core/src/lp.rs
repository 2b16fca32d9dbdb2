//! Dense two-phase primal simplex with bounded variables.
//!
//! Variables may carry any bounds (free, one-sided, boxed, fixed). Finite
//! upper bounds are handled implicitly by the ratio test rather than as extra
//! rows. Pricing is Dantzig's rule; after a run of degenerate pivots the
//! solver switches to Bland's rule until the objective moves again, which
//! rules out cycling.

use thiserror::Error;

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpConstraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min cᵀx` subject to linear rows and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// `n` variables in `[0, +∞)` with a zero objective.
    pub fn new(n: usize) -> Self {
        LpProblem {
            objective: vec![0.0; n],
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(LpConstraint { coeffs, relation, rhs });
    }

    /// Largest violation of a row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values; meaningful only when optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("variable {0} has lower bound above upper bound")]
    EmptyBounds(usize),
    #[error("simplex did not terminate within {0} iterations")]
    IterationLimit(usize),
}

// How an original variable is expressed through internal columns:
// x = offset + sign * y_col (+ second column with opposite sign for free vars).
#[derive(Clone, Copy)]
enum VarMap {
    Fixed(f64),
    Shifted { col: usize, offset: f64, sign: f64 },
    Free { pos: usize, neg: usize },
}

fn check(problem: &LpProblem) -> Result<(), LpError> {
    let n = problem.num_vars();
    if problem.lower.len() != n || problem.upper.len() != n {
        return Err(LpError::Dimension(format!(
            "{} objective entries, {} lower, {} upper bounds",
            n,
            problem.lower.len(),
            problem.upper.len()
        )));
    }
    for (j, &c) in problem.objective.iter().enumerate() {
        if !c.is_finite() {
            return Err(LpError::NonFinite(format!("objective coefficient {j}")));
        }
    }
    for j in 0..n {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
            return Err(LpError::NonFinite(format!("bounds of variable {j}")));
        }
        if l > u {
            return Err(LpError::EmptyBounds(j));
        }
    }
    for (r, c) in problem.constraints.iter().enumerate() {
        if !c.rhs.is_finite() {
            return Err(LpError::NonFinite(format!("right-hand side of row {r}")));
        }
        for &(j, a) in &c.coeffs {
            if j >= n {
                return Err(LpError::Dimension(format!("row {r} references variable {j} of {n}")));
            }
            if !a.is_finite() {
                return Err(LpError::NonFinite(format!("coefficient ({r}, {j})")));
            }
        }
    }
    Ok(())
}

struct Tableau {
    m: usize,
    width: usize,
    active: usize,
    t: Vec<f64>,
    xb: Vec<f64>,
    basis: Vec<usize>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    d: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

enum StepResult {
    Optimal,
    Unbounded,
    Moved,
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.width..i * self.width + self.active]
    }

    fn price(&mut self, cost: &[f64]) {
        self.d = cost[..self.active].to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.width..i * self.width + self.active];
                for (dj, &a) in self.d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.active {
            if self.is_basic[j] || self.upper[j] == 0.0 {
                continue;
            }
            let dj = self.d[j];
            let score = if self.at_upper[j] { dj } else { -dj };
            if score > OPT_TOL {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((j, score));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn step(&mut self, bland: bool) -> Result<(StepResult, bool), LpError> {
        let Some(q) = self.choose_entering(bland) else {
            return Ok((StepResult::Optimal, false));
        };
        if self.iterations >= self.max_iterations {
            return Err(LpError::IterationLimit(self.max_iterations));
        }
        self.iterations += 1;
        let dir = if self.at_upper[q] { -1.0 } else { 1.0 };

        // ratio test
        let mut theta = self.upper[q];
        let mut leave: Option<(usize, bool)> = None;
        let mut best_alpha = 0.0;
        for i in 0..self.m {
            let alpha = dir * self.t[i * self.width + q];
            let (limit, to_upper) = if alpha > PIVOT_TOL {
                (self.xb[i].max(0.0) / alpha, false)
            } else if alpha < -PIVOT_TOL {
                let ub = self.upper[self.basis[i]];
                if ub.is_infinite() {
                    continue;
                }
                ((ub - self.xb[i]).max(0.0) / -alpha, true)
            } else {
                continue;
            };
            let better = match leave {
                None => limit < theta,
                Some((r, _)) => {
                    if limit < theta - 1e-12 {
                        true
                    } else if limit <= theta + 1e-12 {
                        if bland {
                            self.basis[i] < self.basis[r]
                        } else {
                            alpha.abs() > best_alpha
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                theta = limit;
                leave = Some((i, to_upper));
                best_alpha = alpha.abs();
            }
        }

        if theta.is_infinite() {
            return Ok((StepResult::Unbounded, false));
        }
        let degenerate = theta <= 1e-12;

        for i in 0..self.m {
            let a = self.t[i * self.width + q];
            if a != 0.0 {
                self.xb[i] -= dir * theta * a;
            }
        }

        match leave {
            None => {
                // bound flip
                self.at_upper[q] = !self.at_upper[q];
            }
            Some((r, to_upper)) => {
                let entering_value = if self.at_upper[q] { self.upper[q] - theta } else { theta };
                let old = self.basis[r];
                self.is_basic[old] = false;
                self.at_upper[old] = to_upper;
                self.basis[r] = q;
                self.is_basic[q] = true;
                self.at_upper[q] = false;
                self.xb[r] = entering_value;
                self.pivot(r, q);
            }
        }
        for v in &mut self.xb {
            if v.abs() < 1e-13 {
                *v = 0.0;
            }
        }
        Ok((StepResult::Moved, degenerate))
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let act = self.active;
        let p = self.t[r * w + q];
        {
            let row = &mut self.t[r * w..r * w + act];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[q] = 1.0;
        }
        let nz: Vec<usize> = (0..act).filter(|&j| self.t[r * w + j] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&j| self.t[r * w + j]).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f == 0.0 {
                continue;
            }
            let base = i * w;
            for (&j, &pv) in nz.iter().zip(&pivot_row) {
                let v = self.t[base + j] - f * pv;
                self.t[base + j] = if v.abs() < 1e-14 { 0.0 } else { v };
            }
            self.t[base + q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for (&j, &pv) in nz.iter().zip(&pivot_row) {
                self.d[j] -= f * pv;
            }
            self.d[q] = 0.0;
        }
    }

    fn run(&mut self, cost: &[f64]) -> Result<StepResult, LpError> {
        self.price(cost);
        let mut degenerate_run = 0;
        loop {
            let bland = degenerate_run >= DEGENERATE_RUN;
            match self.step(bland)? {
                (StepResult::Moved, degenerate) => {
                    degenerate_run = if degenerate { degenerate_run + 1 } else { 0 };
                    // refresh reduced costs now and then against drift
                    if self.iterations.is_multiple_of(200) {
                        self.price(cost);
                    }
                }
                (other, _) => return Ok(other),
            }
        }
    }
}

/// Solves `problem`. Deterministic for identical input.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    check(problem)?;
    let n = problem.num_vars();

    // map original variables onto non-negative internal columns
    let mut maps = Vec::with_capacity(n);
    let mut col_upper: Vec<f64> = Vec::new();
    let mut col_cost: Vec<f64> = Vec::new();
    for j in 0..n {
        let (l, u, c) = (problem.lower[j], problem.upper[j], problem.objective[j]);
        let map = if l == u {
            VarMap::Fixed(l)
        } else if l.is_finite() {
            col_upper.push(u - l);
            col_cost.push(c);
            VarMap::Shifted { col: col_upper.len() - 1, offset: l, sign: 1.0 }
        } else if u.is_finite() {
            col_upper.push(f64::INFINITY);
            col_cost.push(-c);
            VarMap::Shifted { col: col_upper.len() - 1, offset: u, sign: -1.0 }
        } else {
            col_upper.push(f64::INFINITY);
            col_cost.push(c);
            col_upper.push(f64::INFINITY);
            col_cost.push(-c);
            VarMap::Free { pos: col_upper.len() - 2, neg: col_upper.len() - 1 }
        };
        maps.push(map);
    }
    let structural = col_upper.len();

    // rows over internal columns, rhs made non-negative
    struct Row {
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for c in &problem.constraints {
        let mut dense: Vec<(usize, f64)> = Vec::with_capacity(c.coeffs.len());
        let mut rhs = c.rhs;
        for &(j, a) in &c.coeffs {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Fixed(v) => rhs -= a * v,
                VarMap::Shifted { col, offset, sign } => {
                    rhs -= a * offset;
                    dense.push((col, a * sign));
                }
                VarMap::Free { pos, neg } => {
                    dense.push((pos, a));
                    dense.push((neg, -a));
                }
            }
        }
        dense.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(dense.len());
        for (k, a) in dense {
            match merged.last_mut() {
                Some((lk, la)) if *lk == k => *la += a,
                _ => merged.push((k, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        if merged.is_empty() {
            let ok = match c.relation {
                Relation::Le => 0.0 <= rhs + FEAS_TOL,
                Relation::Ge => 0.0 >= rhs - FEAS_TOL,
                Relation::Eq => rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(infeasible(n));
            }
            continue;
        }
        let mut relation = c.relation;
        if rhs < 0.0 {
            rhs = -rhs;
            for (_, a) in &mut merged {
                *a = -*a;
            }
            relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push(Row { coeffs: merged, relation, rhs });
    }

    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let arts = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let art_start = structural + slacks;
    let width = art_start + arts;

    let mut t = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let mut xb = vec![0.0; m];
    let mut upper = col_upper.clone();
    upper.extend(std::iter::repeat_n(f64::INFINITY, slacks + arts));
    let mut phase1_cost = vec![0.0; width];
    let (mut s, mut a) = (structural, art_start);
    for (i, row) in rows.iter().enumerate() {
        for &(k, v) in &row.coeffs {
            t[i * width + k] = v;
        }
        xb[i] = row.rhs;
        match row.relation {
            Relation::Le => {
                t[i * width + s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            Relation::Ge => {
                t[i * width + s] = -1.0;
                s += 1;
                t[i * width + a] = 1.0;
                basis[i] = a;
                phase1_cost[a] = 1.0;
                a += 1;
            }
            Relation::Eq => {
                t[i * width + a] = 1.0;
                basis[i] = a;
                phase1_cost[a] = 1.0;
                a += 1;
            }
        }
    }
    let mut is_basic = vec![false; width];
    for &b in &basis {
        is_basic[b] = true;
    }
    let mut tab = Tableau {
        m,
        width,
        active: width,
        t,
        xb,
        basis,
        upper,
        at_upper: vec![false; width],
        is_basic,
        d: Vec::new(),
        iterations: 0,
        max_iterations: 50_000 + 50 * (m + width),
    };

    if arts > 0 {
        tab.run(&phase1_cost)?;
        let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= art_start).map(|i| tab.xb[i]).sum();
        let scale = rows.iter().map(|r| r.rhs).fold(1.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpSolution { iterations: tab.iterations, ..infeasible(n) });
        }
        // retire artificials: pivot them out where possible, then drop their columns
        for r in 0..m {
            if tab.basis[r] < art_start {
                continue;
            }
            let entering = (0..art_start).find(|&j| !tab.is_basic[j] && tab.row(r)[j].abs() > 1e-9);
            if let Some(q) = entering {
                let value = if tab.at_upper[q] { tab.upper[q] } else { 0.0 };
                let old = tab.basis[r];
                tab.is_basic[old] = false;
                tab.basis[r] = q;
                tab.is_basic[q] = true;
                tab.at_upper[q] = false;
                tab.xb[r] = value;
                tab.d = vec![0.0; tab.active];
                tab.pivot(r, q);
            }
        }
        for j in art_start..width {
            tab.upper[j] = 0.0;
        }
        tab.active = art_start;
    }

    let mut cost = col_cost.clone();
    cost.extend(std::iter::repeat_n(0.0, width - structural));
    let status = tab.run(&cost)?;
    if let StepResult::Unbounded = status {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![f64::NAN; n],
            objective: f64::NEG_INFINITY,
            iterations: tab.iterations,
        });
    }

    let mut y = vec![0.0; width];
    for j in 0..width {
        if tab.at_upper[j] && !tab.is_basic[j] {
            y[j] = tab.upper[j];
        }
    }
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.xb[i];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Fixed(v) => v,
            VarMap::Shifted { col, offset, sign } => offset + sign * y[col],
            VarMap::Free { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = problem.evaluate(&x);
    Ok(LpSolution { status: LpStatus::Optimal, x, objective, iterations: tab.iterations })
}

fn infeasible(n: usize) -> LpSolution {
    LpSolution { status: LpStatus::Infeasible, x: vec![f64::NAN; n], objective: f64::INFINITY, iterations: 0 }
}

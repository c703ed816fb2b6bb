//! Dense two-phase simplex for small linear programs.
//!
//! Solves `maximize c^T x` subject to `A_le x <= b_le`, `A_eq x = b_eq`,
//! `x >= 0`. Pricing is Dantzig's largest reduced cost; after a run of
//! degenerate pivots the solver switches to Bland's rule, which cannot cycle.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const COST_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;
const DEGENERATE_RUN: usize = 50;

/// A dense LP in inequality/equality form with nonnegative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    n_vars: usize,
    objective: Vec<f64>,
    le_rows: Vec<(Vec<f64>, f64)>,
    eq_rows: Vec<(Vec<f64>, f64)>,
}

/// Optimal basic feasible solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LpProblem {
    /// A problem over `n_vars` nonnegative variables with zero objective.
    pub fn new(n_vars: usize) -> Self {
        Self { n_vars, objective: vec![0.0; n_vars], le_rows: Vec::new(), eq_rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_le(&self) -> usize {
        self.le_rows.len()
    }

    pub fn maximize(&mut self, c: &[f64]) -> &mut Self {
        assert_eq!(c.len(), self.n_vars, "objective length");
        self.objective.copy_from_slice(c);
        self
    }

    /// Adds `row . x <= rhs`; returns the row index among `<=` rows.
    pub fn add_le(&mut self, row: &[f64], rhs: f64) -> usize {
        assert_eq!(row.len(), self.n_vars, "constraint length");
        self.le_rows.push((row.to_vec(), rhs));
        self.le_rows.len() - 1
    }

    /// Adds `row . x = rhs`.
    pub fn add_eq(&mut self, row: &[f64], rhs: f64) -> usize {
        assert_eq!(row.len(), self.n_vars, "constraint length");
        self.eq_rows.push((row.to_vec(), rhs));
        self.eq_rows.len() - 1
    }

    fn is_finite(&self) -> bool {
        self.objective.iter().all(|v| v.is_finite())
            && self
                .le_rows
                .iter()
                .chain(&self.eq_rows)
                .all(|(r, b)| b.is_finite() && r.iter().all(|v| v.is_finite()))
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major, `cols + 1` entries per row, rhs last.
    t: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs (`c_j - z_j`), rhs slot holds `-objective`.
    cost: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r * w + c];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for (v, &pr) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * w + c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, &pr) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs simplex iterations over columns `allowed` until optimal.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::LpNumerical("pivot limit exceeded"));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = COST_TOL;
            for j in 0..allowed {
                let rc = self.cost[j];
                if rc > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Err(Error::LpUnbounded) };
            if ratio <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Solves the problem with the two-phase method.
pub fn lp_solve(p: &LpProblem) -> Result<LpSolution> {
    if !p.is_finite() {
        return Err(Error::LpNumerical("non-finite coefficient"));
    }
    let n = p.n_vars;
    let n_le = p.le_rows.len();
    let n_eq = p.eq_rows.len();
    let rows = n_le + n_eq;

    // Equilibrate rows and flip them so every rhs is nonnegative.
    struct Row {
        a: Vec<f64>,
        b: f64,
        slack: Option<f64>,
    }
    let mut built: Vec<Row> = Vec::with_capacity(rows);
    for (a, b) in &p.le_rows {
        built.push(Row { a: a.clone(), b: *b, slack: Some(1.0) });
    }
    for (a, b) in &p.eq_rows {
        built.push(Row { a: a.clone(), b: *b, slack: None });
    }
    for row in &mut built {
        let scale = row.a.iter().fold(row.b.abs(), |m, v| m.max(v.abs()));
        if scale > 0.0 {
            for v in &mut row.a {
                *v /= scale;
            }
            row.b /= scale;
        }
        if row.b < 0.0 {
            for v in &mut row.a {
                *v = -*v;
            }
            row.b = -row.b;
            row.slack = row.slack.map(|s| -s);
        }
    }

    // Columns: originals, one slack per <= row, then artificials.
    let needs_art: Vec<bool> = built.iter().map(|r| r.slack != Some(1.0)).collect();
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let slack0 = n;
    let art0 = n + n_le;
    let cols = n + n_le + n_art;
    let w = cols + 1;
    let mut t = vec![0.0; rows * w];
    let mut basis = vec![0; rows];
    let mut art_of_row = vec![None; rows];
    let mut next_art = art0;
    for (i, row) in built.iter().enumerate() {
        t[i * w..i * w + n].copy_from_slice(&row.a);
        if let Some(s) = row.slack {
            t[i * w + slack0 + i] = s;
        }
        t[i * w + cols] = row.b;
        if needs_art[i] {
            t[i * w + next_art] = 1.0;
            basis[i] = next_art;
            art_of_row[i] = Some(next_art);
            next_art += 1;
        } else {
            basis[i] = slack0 + i;
        }
    }

    // Phase 1: maximize -sum(artificials).
    let mut cost = vec![0.0; w];
    for i in 0..rows {
        if needs_art[i] {
            for j in 0..w {
                if j < art0 || j == cols {
                    cost[j] += t[i * w + j];
                }
            }
        }
    }
    let mut tab = Tableau { rows, cols, t, basis, cost, pivots: 0 };
    if n_art > 0 {
        tab.optimize(cols)?;
        let infeas: f64 = (0..rows)
            .filter(|&i| tab.basis[i] >= art0)
            .map(|i| tab.rhs(i))
            .sum();
        if infeas > FEAS_TOL {
            let worst = (0..rows)
                .filter(|&i| tab.basis[i] >= art0)
                .max_by(|&a, &b| tab.rhs(a).total_cmp(&tab.rhs(b)));
            let row = worst.and_then(|i| art_of_row.iter().position(|&a| a == Some(tab.basis[i])));
            return Err(Error::LpInfeasible { row });
        }
        // Drive zero-level artificials out of the basis.
        let mut i = 0;
        while i < tab.rows {
            if tab.basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| tab.at(i, j).abs() > 1e-9) {
                    tab.pivot(i, j);
                } else {
                    // redundant row
                    let w = tab.cols + 1;
                    tab.t.drain(i * w..(i + 1) * w);
                    tab.basis.remove(i);
                    tab.rows -= 1;
                    continue;
                }
            }
            i += 1;
        }
    }

    // Phase 2 on the original objective, artificial columns frozen.
    let mut cost = vec![0.0; w];
    cost[..n].copy_from_slice(&p.objective);
    for i in 0..tab.rows {
        let cb = if tab.basis[i] < n { p.objective[tab.basis[i]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..w {
                cost[j] -= cb * tab.at(i, j);
            }
        }
    }
    tab.cost = cost;
    tab.optimize(art0)?;

    let mut x = vec![0.0; n];
    for i in 0..tab.rows {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let objective = x.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective, pivots: tab.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound() {
        let mut p = LpProblem::new(1);
        p.maximize(&[1.0]);
        p.add_le(&[1.0], 1.0);
        let s = lp_solve(&p).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equality_only_system_has_unique_point() {
        let mut p = LpProblem::new(2);
        p.maximize(&[1.0, 1.0]);
        p.add_eq(&[1.0, 1.0], 3.0);
        p.add_eq(&[1.0, -1.0], 1.0);
        let s = lp_solve(&p).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut p = LpProblem::new(2);
        p.maximize(&[3.0, 5.0]);
        p.add_le(&[1.0, 0.0], 4.0);
        p.add_le(&[0.0, 2.0], 12.0);
        p.add_le(&[3.0, 2.0], 18.0);
        let s = lp_solve(&p).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(1);
        p.maximize(&[1.0]);
        p.add_le(&[1.0], 1.0);
        p.add_eq(&[1.0], 2.0);
        assert!(matches!(lp_solve(&p), Err(Error::LpInfeasible { .. })));

        let mut p = LpProblem::new(2);
        p.maximize(&[1.0, 0.0]);
        p.add_le(&[-1.0, 1.0], 1.0);
        assert_eq!(lp_solve(&p), Err(Error::LpUnbounded));
    }

    #[test]
    fn negative_rhs_rows() {
        // x >= 2 written as -x <= -2, minimize x
        let mut p = LpProblem::new(1);
        p.maximize(&[-1.0]);
        p.add_le(&[-1.0], -2.0);
        let s = lp_solve(&p).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut p = LpProblem::new(2);
        p.maximize(&[1.0, 2.0]);
        p.add_eq(&[1.0, 1.0], 1.0);
        p.add_eq(&[2.0, 2.0], 2.0);
        let s = lp_solve(&p).unwrap();
        assert!((s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_is_numerical() {
        let mut p = LpProblem::new(1);
        p.add_le(&[f64::NAN], 1.0);
        assert!(matches!(lp_solve(&p), Err(Error::LpNumerical(_))));
    }

    #[test]
    fn degenerate_klee_minty_style() {
        // A classic cycling example (Beale) that Bland's rule resolves.
        let mut p = LpProblem::new(4);
        p.maximize(&[0.75, -150.0, 0.02, -6.0]);
        p.add_le(&[0.25, -60.0, -0.04, 9.0], 0.0);
        p.add_le(&[0.5, -90.0, -0.02, 3.0], 0.0);
        p.add_le(&[0.0, 0.0, 1.0, 0.0], 1.0);
        let s = lp_solve(&p).unwrap();
        assert!((s.objective - 0.05).abs() < 1e-9, "{}", s.objective);
    }
}

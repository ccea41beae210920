//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Sized for the tiny systems this crate builds (a few dozen rows at most).
//! Bounded variables are shifted or split into nonnegative standard-form
//! columns; a finite upper bound becomes an extra row.

use super::LpError;

const ITERATION_CAP: usize = 10_000;
const CLEAN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Maximize `objective·x` subject to linear rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
    bounds: Vec<(Option<f64>, Option<f64>)>,
}

impl LinearProgram {
    /// `n` variables, all nonnegative, with a zero objective.
    pub fn new(n: usize) -> Self {
        LinearProgram { n, objective: vec![0.0; n], rows: Vec::new(), bounds: vec![(Some(0.0), None); n] }
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), self.n, "objective length");
        self.objective = c;
        self
    }

    pub fn row(mut self, a: Vec<f64>, rel: Relation, b: f64) -> Self {
        assert_eq!(a.len(), self.n, "row length");
        self.rows.push((a, rel, b));
        self
    }

    pub fn bound(mut self, j: usize, lo: Option<f64>, hi: Option<f64>) -> Self {
        self.bounds[j] = (lo, hi);
        self
    }

    pub fn free(self, j: usize) -> Self {
        self.bound(j, None, None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn solve(&self, tol: f64) -> Result<LpOutcome, LpError> {
        // x_j = shift_j + Σ sign·column
        let mut shift = vec![0.0; self.n];
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        let mut ncols = 0;
        let mut extra_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
        for j in 0..self.n {
            match self.bounds[j] {
                (Some(lo), hi) => {
                    shift[j] = lo;
                    cols[j].push((ncols, 1.0));
                    if let Some(hi) = hi {
                        extra_rows.push((vec![(ncols, 1.0)], hi - lo));
                    }
                    ncols += 1;
                }
                (None, Some(hi)) => {
                    shift[j] = hi;
                    cols[j].push((ncols, -1.0));
                    ncols += 1;
                }
                (None, None) => {
                    cols[j].push((ncols, 1.0));
                    cols[j].push((ncols + 1, -1.0));
                    ncols += 2;
                }
            }
        }
        if extra_rows.iter().any(|(_, w)| *w < -tol) {
            return Ok(LpOutcome::Infeasible);
        }

        let mut std_rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
        for (a, rel, b) in &self.rows {
            let mut r = vec![0.0; ncols];
            let mut rhs = *b;
            for j in 0..self.n {
                rhs -= a[j] * shift[j];
                for &(c, s) in &cols[j] {
                    r[c] += a[j] * s;
                }
            }
            std_rows.push((r, *rel, rhs));
        }
        for (entries, w) in extra_rows {
            let mut r = vec![0.0; ncols];
            for (c, s) in entries {
                r[c] = s;
            }
            std_rows.push((r, Relation::Le, w.max(0.0)));
        }
        let mut c = vec![0.0; ncols];
        let mut c0 = 0.0;
        for j in 0..self.n {
            c0 += self.objective[j] * shift[j];
            for &(col, s) in &cols[j] {
                c[col] += self.objective[j] * s;
            }
        }

        let z = match Tableau::solve(std_rows, ncols, &c, tol)? {
            StdOutcome::Optimal(z) => z,
            StdOutcome::Infeasible => return Ok(LpOutcome::Infeasible),
            StdOutcome::Unbounded => return Ok(LpOutcome::Unbounded),
        };
        let x: Vec<f64> =
            (0..self.n).map(|j| shift[j] + cols[j].iter().map(|&(col, s)| s * z[col]).sum::<f64>()).collect();
        let objective = c0 + c.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
        Ok(LpOutcome::Optimal { x, objective })
    }
}

enum StdOutcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

/// Rows are `[coefficients | rhs]`; the last row holds reduced costs and `-value`.
struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    iterations: usize,
}

impl Tableau {
    fn solve(rows: Vec<(Vec<f64>, Relation, f64)>, n: usize, c: &[f64], tol: f64) -> Result<StdOutcome, LpError> {
        let m = rows.len();
        let n_slack = rows.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        // After flipping to rhs >= 0, Le rows start with their slack basic;
        // Ge and Eq rows need an artificial.
        let flips = |rel: Relation, b: f64| b < 0.0 || (b == 0.0 && rel == Relation::Ge);
        let n_art = rows
            .iter()
            .filter(|(_, r, b)| match r {
                Relation::Le => *b < 0.0,
                Relation::Ge => !flips(*r, *b),
                Relation::Eq => true,
            })
            .count();
        let width = n + n_slack + n_art;
        let art_start = n + n_slack;
        let mut t = vec![vec![0.0; width + 1]; m + 1];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (n, art_start);
        for (i, (coef, rel, b)) in rows.into_iter().enumerate() {
            let flip = flips(rel, b);
            let sign = if flip { -1.0 } else { 1.0 };
            let rel = match (rel, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            for j in 0..n {
                t[i][j] = sign * coef[j];
            }
            t[i][width] = sign * b;
            match rel {
                Relation::Le => {
                    t[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    t[i][s] = -1.0;
                    s += 1;
                    t[i][a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    t[i][a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        let used_art = a;
        let mut tab = Tableau { t, basis, width, iterations: 0 };

        // phase 1: maximize -Σ artificials
        if used_art > art_start {
            let obj = m;
            for j in 0..=width {
                tab.t[obj][j] = 0.0;
            }
            for j in art_start..used_art {
                tab.t[obj][j] = -1.0;
            }
            for i in 0..m {
                if tab.basis[i] >= art_start {
                    for j in 0..=width {
                        tab.t[obj][j] += tab.t[i][j];
                    }
                }
            }
            // reduced costs are stored as c_j - z_j; value cell holds Σ rhs of artificial rows
            if !tab.run(tol, width)? {
                unreachable!("phase 1 is bounded");
            }
            let infeas = tab.t[obj][width];
            if infeas > tol {
                return Ok(StdOutcome::Infeasible);
            }
            // drive artificials out of the basis
            let mut i = 0;
            while i < tab.basis.len() {
                if tab.basis[i] >= art_start {
                    match (0..art_start).find(|&j| tab.t[i][j].abs() > tol) {
                        Some(j) => tab.pivot(i, j),
                        None => {
                            tab.t.remove(i);
                            tab.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
            for row in tab.t.iter_mut() {
                for j in art_start..width {
                    row[j] = 0.0;
                }
            }
        }

        // phase 2 objective row
        let m = tab.basis.len();
        let obj = m;
        let mut full_c = vec![0.0; width];
        full_c[..n].copy_from_slice(c);
        for j in 0..=width {
            tab.t[obj][j] = 0.0;
        }
        tab.t[obj][..art_start].copy_from_slice(&full_c[..art_start]);
        for i in 0..m {
            let cb = full_c[tab.basis[i]];
            if cb != 0.0 {
                for j in 0..=width {
                    let v = tab.t[i][j];
                    tab.t[obj][j] -= cb * v;
                }
            }
        }
        if !tab.run(tol, art_start)? {
            return Ok(StdOutcome::Unbounded);
        }
        let mut z = vec![0.0; width];
        for (i, &b) in tab.basis.iter().enumerate() {
            z[b] = tab.t[i][width];
        }
        z.truncate(n);
        Ok(StdOutcome::Optimal(z))
    }

    /// Pivots until optimal (true) or unbounded (false), entering only columns `< limit`.
    fn run(&mut self, tol: f64, limit: usize) -> Result<bool, LpError> {
        let m = self.basis.len();
        let w = self.width;
        loop {
            let Some(e) = (0..limit).find(|&j| self.t[m][j] > tol && !self.basis.contains(&j)) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][e];
                if a > tol {
                    let ratio = self.t[i][w] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - CLEAN || (ratio <= lr + CLEAN && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, e);
            self.iterations += 1;
            if self.iterations > ITERATION_CAP {
                return Err(LpError::IterationLimit { limit: ITERATION_CAP });
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.t[r][e];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[e];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                    if v.abs() < CLEAN {
                        *v = 0.0;
                    }
                }
            }
        }
        self.basis[r] = e;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimum(lp: &LinearProgram) -> (Vec<f64>, f64) {
        match lp.solve(1e-9).unwrap() {
            LpOutcome::Optimal { x, objective } => (x, objective),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let lp = LinearProgram::new(2)
            .maximize(vec![3.0, 5.0])
            .row(vec![1.0, 0.0], Relation::Le, 4.0)
            .row(vec![0.0, 2.0], Relation::Le, 12.0)
            .row(vec![3.0, 2.0], Relation::Le, 18.0);
        let (x, v) = optimum(&lp);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
        assert!((v - 36.0).abs() < 1e-12);
    }

    #[test]
    fn ge_eq_and_free_variables() {
        // max -x with x free, x >= -3, x + y = 1, y in [0, 10]  ->  x = -3, y = 4
        let lp = LinearProgram::new(2)
            .maximize(vec![-1.0, 0.0])
            .free(0)
            .bound(1, Some(0.0), Some(10.0))
            .row(vec![1.0, 0.0], Relation::Ge, -3.0)
            .row(vec![1.0, 1.0], Relation::Eq, 1.0);
        let (x, v) = optimum(&lp);
        assert!((x[0] + 3.0).abs() < 1e-12 && (x[1] - 4.0).abs() < 1e-12, "{x:?}");
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::new(1).row(vec![1.0], Relation::Ge, 2.0).row(vec![1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(1e-9).unwrap(), LpOutcome::Infeasible);
        let lp = LinearProgram::new(1).maximize(vec![1.0]);
        assert_eq!(lp.solve(1e-9).unwrap(), LpOutcome::Unbounded);
        let lp = LinearProgram::new(1).bound(0, Some(1.0), Some(0.0));
        assert_eq!(lp.solve(1e-9).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let lp = LinearProgram::new(4)
            .maximize(vec![0.75, -150.0, 0.02, -6.0])
            .row(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .row(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .row(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let (_, v) = optimum(&lp);
        assert!((v - 0.05).abs() < 1e-9, "{v}");
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(2).maximize(vec![1.0, 1.0]).row(vec![1.0, 1.0], Relation::Eq, 1.0).row(
            vec![2.0, 2.0],
            Relation::Eq,
            2.0,
        );
        let (_, v) = optimum(&lp);
        assert!((v - 1.0).abs() < 1e-12);
    }
}

//! Exact feasibility of linear systems `A x >= b` (and equalities) over free
//! rational variables.
//!
//! The solver works on the Farkas alternative of the system:
//!
//! ```text
//!     y >= 0,   y^T A = 0,   y^T b = 1
//! ```
//!
//! which has one row per variable plus one, and one column per primal
//! constraint. Phase I of the simplex method (Bland's rule) either drives the
//! artificial objective to zero, producing a Farkas certificate, or stops at a
//! positive optimum whose dual prices give a primal witness. Adding a primal
//! constraint only adds a column, so a finished tableau stays a valid warm
//! start; the 2D recognizer relies on this along each search path.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Ge,
    Eq,
}

/// `sum coeffs[i].1 * x[coeffs[i].0]  (>= | =)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn ge(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        LinearConstraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn eq(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        LinearConstraint { coeffs, relation: Relation::Eq, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(v, c)| c * &x[*v]).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    num_vars: usize,
    constraints: Vec<LinearConstraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem { num_vars, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// Adds a constraint; panics if it mentions a variable out of range.
    pub fn push(&mut self, c: LinearConstraint) {
        assert!(c.coeffs.iter().all(|(v, _)| *v < self.num_vars), "variable index out of range");
        self.constraints.push(c);
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    /// Does `y` prove infeasibility? Multipliers of `>=` rows must be
    /// nonnegative; the combination must cancel every variable and leave a
    /// positive right-hand side.
    pub fn is_certified_infeasible_by(&self, y: &[Rational]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let mut combo = vec![Rational::zero(); self.num_vars];
        let mut rhs = Rational::zero();
        for (c, m) in self.constraints.iter().zip(y) {
            if c.relation == Relation::Ge && m.is_negative() {
                return false;
            }
            if m.is_zero() {
                continue;
            }
            for (v, a) in &c.coeffs {
                combo[*v] += &(a * m);
            }
            rhs += &(&c.rhs * m);
        }
        combo.iter().all(Rational::is_zero) && rhs.is_positive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FeasibilityResult {
    Feasible { witness: Vec<Rational> },
    /// One multiplier per constraint; the combination reads `0 >= 1`.
    Infeasible { certificate: Vec<Rational> },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

/// Decides `sys` exactly. The returned witness or certificate has been
/// re-checked against the system.
pub fn solve_feasibility(sys: &LinearSystem) -> FeasibilityResult {
    let mut solver = FarkasSolver::new(sys.num_vars);
    // column -> (constraint, sign)
    let mut origin = Vec::new();
    for (ci, c) in sys.constraints.iter().enumerate() {
        solver.add_ge(&c.coeffs, &c.rhs);
        origin.push((ci, false));
        if c.relation == Relation::Eq {
            let neg: Vec<(usize, Rational)> = c.coeffs.iter().map(|(v, a)| (*v, -a)).collect();
            solver.add_ge(&neg, &-&c.rhs);
            origin.push((ci, true));
        }
    }
    let result = match solver.solve() {
        FarkasOutcome::Feasible(witness) => FeasibilityResult::Feasible { witness },
        FarkasOutcome::Infeasible(y) => {
            let mut cert = vec![Rational::zero(); sys.constraints.len()];
            for (col, m) in y.iter().enumerate() {
                let (ci, negated) = origin[col];
                if negated {
                    cert[ci] -= m;
                } else {
                    cert[ci] += m;
                }
            }
            FeasibilityResult::Infeasible { certificate: normalize_certificate(sys, cert) }
        }
    };
    match &result {
        FeasibilityResult::Feasible { witness } => {
            assert!(sys.is_satisfied_by(witness), "simplex witness fails re-substitution")
        }
        FeasibilityResult::Infeasible { certificate } => {
            assert!(sys.is_certified_infeasible_by(certificate), "simplex certificate fails re-check")
        }
    }
    result
}

/// Scales the certificate so the combined right-hand side is exactly 1.
fn normalize_certificate(sys: &LinearSystem, cert: Vec<Rational>) -> Vec<Rational> {
    let rhs: Rational = sys.constraints.iter().zip(&cert).map(|(c, m)| &c.rhs * m).sum();
    if rhs.is_positive() {
        cert.iter().map(|m| m / &rhs).collect()
    } else {
        cert
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum FarkasOutcome {
    Feasible(Vec<Rational>),
    /// Nonnegative multiplier per added column.
    Infeasible(Vec<Rational>),
}

/// Incremental Phase-I tableau for the Farkas alternative of `A x >= b`.
///
/// Columns `0..rows` are the artificials (initially the basis); each added
/// primal constraint becomes one further column. Storage is column-major so
/// that columns can be appended.
#[derive(Clone, Debug)]
pub(crate) struct FarkasSolver {
    rows: usize,
    cols: Vec<Vec<Rational>>,
    beta: Vec<Rational>,
    reduced: Vec<Rational>,
    objective: Rational,
    basis: Vec<usize>,
    // primal constraint data of each non-artificial column, kept for
    // certificate checks: (coefficients, rhs)
    data: Vec<(Vec<(usize, Rational)>, Rational)>,
    pivots: u64,
}

impl FarkasSolver {
    pub(crate) fn new(num_vars: usize) -> Self {
        let rows = num_vars + 1;
        let cols = (0..rows)
            .map(|k| {
                let mut c = vec![Rational::zero(); rows];
                c[k] = Rational::one();
                c
            })
            .collect();
        let mut beta = vec![Rational::zero(); rows];
        beta[rows - 1] = Rational::one();
        FarkasSolver {
            rows,
            cols,
            beta,
            reduced: vec![Rational::zero(); rows],
            objective: Rational::one(),
            basis: (0..rows).collect(),
            data: Vec::new(),
            pivots: 0,
        }
    }

    pub(crate) fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Appends the primal constraint `coeffs . x >= rhs`.
    pub(crate) fn add_ge(&mut self, coeffs: &[(usize, Rational)], rhs: &Rational) {
        let last = self.rows - 1;
        let mut a: Vec<(usize, Rational)> = coeffs.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        if !rhs.is_zero() {
            a.push((last, rhs.clone()));
        }
        // B^{-1} is the artificial block
        let mut col = vec![Rational::zero(); self.rows];
        for (k, v) in &a {
            let art = &self.cols[*k];
            for (i, entry) in col.iter_mut().enumerate() {
                if !art[i].is_zero() {
                    *entry += &(&art[i] * v);
                }
            }
        }
        // reduced cost = 0 - pi . a, with pi_k = 1 - reduced cost of artificial k
        let mut rc = Rational::zero();
        for (k, v) in &a {
            let pi = Rational::one() - &self.reduced[*k];
            rc -= &(&pi * v);
        }
        self.cols.push(col);
        self.reduced.push(rc);
        self.data.push((coeffs.to_vec(), rhs.clone()));
    }

    fn pivot(&mut self, r: usize, s: usize) {
        self.pivots += 1;
        let pcol = self.cols[s].clone();
        let p = pcol[r].clone();
        let rc_s = self.reduced[s].clone();
        for (c, col) in self.cols.iter_mut().enumerate() {
            if col[r].is_zero() {
                continue;
            }
            let t = &col[r] / &p;
            for (i, e) in col.iter_mut().enumerate() {
                if i != r && !pcol[i].is_zero() {
                    *e -= &(&pcol[i] * &t);
                }
            }
            if !rc_s.is_zero() {
                let d = &rc_s * &t;
                self.reduced[c] -= &d;
            }
            col[r] = t;
        }
        let theta = &self.beta[r] / &p;
        if !theta.is_zero() {
            for (i, b) in self.beta.iter_mut().enumerate() {
                if i != r && !pcol[i].is_zero() {
                    *b -= &(&pcol[i] * &theta);
                }
            }
            self.objective += &(&rc_s * &theta);
        }
        self.beta[r] = theta;
        self.basis[r] = s;
    }

    /// Runs Phase I from the current basis.
    pub(crate) fn solve(&mut self) -> FarkasOutcome {
        loop {
            if self.objective.is_zero() {
                return FarkasOutcome::Infeasible(self.multipliers());
            }
            // Bland: lowest-index improving column
            let Some(s) = self.reduced.iter().position(Rational::is_negative) else {
                return FarkasOutcome::Feasible(self.witness());
            };
            let col = &self.cols[s];
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows {
                if !col[i].is_positive() {
                    continue;
                }
                let ratio = &self.beta[i] / &col[i];
                let better = match &leave {
                    None => true,
                    Some((j, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*j]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let (r, _) = leave.expect("phase I objective is bounded below");
            self.pivot(r, s);
        }
    }

    fn multipliers(&self) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.data.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.rows {
                y[b - self.rows] = self.beta[i].clone();
            }
        }
        y
    }

    fn witness(&self) -> Vec<Rational> {
        let last = self.rows - 1;
        let pi: Vec<Rational> = (0..self.rows).map(|k| Rational::one() - &self.reduced[k]).collect();
        debug_assert!(pi[last].is_positive());
        let scale = -&pi[last];
        pi[..last].iter().map(|p| p / &scale).collect()
    }

    /// Checks `y` against the stored constraint columns.
    pub(crate) fn certifies(&self, y: &[Rational]) -> bool {
        let mut combo = vec![Rational::zero(); self.rows - 1];
        let mut rhs = Rational::zero();
        for ((coeffs, b), m) in self.data.iter().zip(y) {
            if m.is_negative() {
                return false;
            }
            if m.is_zero() {
                continue;
            }
            for (v, a) in coeffs {
                combo[*v] += &(a * m);
            }
            rhs += &(b * m);
        }
        combo.iter().all(Rational::is_zero) && rhs.is_positive()
    }

    /// Checks `x` against the stored constraint columns.
    pub(crate) fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.data
            .iter()
            .all(|(coeffs, b)| coeffs.iter().map(|(v, a)| a * &x[*v]).sum::<Rational>() >= *b)
    }
}

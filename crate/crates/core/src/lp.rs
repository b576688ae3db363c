//! Minimal linear-programming front end over `microlp`, with a
//! cutting-plane loop for constraint families too large to state upfront.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl From<Cmp> for ComparisonOp {
    fn from(c: Cmp) -> Self {
        match c {
            Cmp::Le => ComparisonOp::Le,
            Cmp::Ge => ComparisonOp::Ge,
            Cmp::Eq => ComparisonOp::Eq,
        }
    }
}

/// A sparse row `sum coef * x_var  cmp  rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// Minimization problem with box-bounded variables.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    obj: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    /// Number of separation rounds performed by [`LinearProgram::solve_with_cuts`].
    pub rounds: usize,
}

fn solver_err(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::Infeasible("linear program is infeasible".into()),
        microlp::Error::Unbounded => Error::Solver("linear program is unbounded".into()),
        other => Error::Solver(format!("{other:?}")),
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, obj: f64, lo: f64, hi: f64) -> usize {
        self.obj.push(obj);
        self.bounds.push((lo, hi));
        self.obj.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push(Row { terms, cmp, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.obj.len()
    }

    fn build(&self) -> (Problem, Vec<Variable>) {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = self.obj.iter().zip(&self.bounds).map(|(&c, &b)| p.add_var(c, b)).collect();
        for r in &self.rows {
            let expr: Vec<(Variable, f64)> = r.terms.iter().map(|&(v, c)| (vars[v], c)).collect();
            p.add_constraint(expr.as_slice(), r.cmp.into(), r.rhs);
        }
        (p, vars)
    }

    fn extract(sol: &Solution, vars: &[Variable], rounds: usize) -> LpSolution {
        LpSolution {
            objective: sol.objective(),
            x: vars.iter().map(|&v| sol.var_value(v)).collect(),
            rounds,
        }
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let (p, vars) = self.build();
        let sol = p.solve().map_err(solver_err)?.into_solution().map_err(|_| Error::Solver("interrupted".into()))?;
        Ok(Self::extract(&sol, &vars, 0))
    }

    /// Solves, then repeatedly asks `separate` for violated rows and adds them
    /// with a warm-started dual simplex until none remain.
    pub fn solve_with_cuts(
        &self,
        mut separate: impl FnMut(&[f64]) -> Vec<Row>,
        max_rounds: usize,
    ) -> Result<LpSolution> {
        let (p, vars) = self.build();
        let mut sol =
            p.solve().map_err(solver_err)?.into_solution().map_err(|_| Error::Solver("interrupted".into()))?;
        for round in 0..max_rounds {
            let cur = Self::extract(&sol, &vars, round);
            let cuts = separate(&cur.x);
            if cuts.is_empty() {
                return Ok(cur);
            }
            for r in cuts {
                let expr: Vec<(Variable, f64)> = r.terms.iter().map(|&(v, c)| (vars[v], c)).collect();
                sol = sol
                    .add_constraint(expr.as_slice(), r.cmp.into(), r.rhs)
                    .map_err(solver_err)?
                    .into_solution()
                    .map_err(|_| Error::Solver("interrupted".into()))?;
            }
        }
        Err(Error::Budget(format!("cutting-plane loop did not converge in {max_rounds} rounds")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min x + 2y  s.t. x + y >= 1, x <= 0.25
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 0.25);
        let y = lp.add_var(2.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Cmp::Ge, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 1.75).abs() < 1e-9);
        assert!((s.x[y] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn cuts_are_applied() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, 10.0);
        let mut added = false;
        let s = lp
            .solve_with_cuts(
                |v| {
                    if v[x] > 3.0 + 1e-9 && !added {
                        added = true;
                        vec![Row { terms: vec![(x, 1.0)], cmp: Cmp::Le, rhs: 3.0 }]
                    } else {
                        vec![]
                    }
                },
                10,
            )
            .unwrap();
        assert!((s.x[x] - 3.0).abs() < 1e-9);
    }
}

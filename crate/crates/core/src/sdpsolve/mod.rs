//! Dense primal-dual interior-point solver for semidefinite programs.
//!
//! Problem form (minimization):
//!
//! ```text
//!   min  sum_k <C_k, X_k> + f' u
//!   s.t. sum_k <A_{i,k}, X_k> + b_i' u = rhs_i     i = 1..m
//!        X_k >= 0 (PSD blocks),  u free
//! ```
//!
//! The search direction is HKM with a Mehrotra predictor-corrector. The
//! Schur complement is formed densely per connected component of the
//! constraint/block incidence graph and factored with a blocked Cholesky;
//! free variables are eliminated through a small saddle-point system rather
//! than being split into PSD pairs.

mod linalg;
mod solver;

pub use linalg::{cholesky_in_place, min_eig_sym, spd_solve_in_place};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::scalar::{conv, Scalar};

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("block index {0} out of range")]
    BadBlock(usize),
    #[error("entry ({row},{col}) outside block {block} of dimension {dim}")]
    BadEntry {
        block: usize,
        row: usize,
        col: usize,
        dim: usize,
    },
    #[error("matrix coefficients must be given with row <= col")]
    NotUpperTriangle,
    #[error("free variable index {0} out of range")]
    BadFree(usize),
    #[error("block dimension must be >= 1")]
    EmptyBlock,
}

/// Position of a symmetric-matrix coefficient: `row <= col` within `block`;
/// an off-diagonal entry stands for both `(row, col)` and `(col, row)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

/// Linear functional over the SDP variables.
#[derive(Debug, Clone, Default)]
pub struct LinearForm<T> {
    pub block_terms: Vec<(MatEntry, T)>,
    pub free_terms: Vec<(usize, T)>,
}

/// One equality constraint: `<terms, (X, u)> = rhs`.
#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub form: LinearForm<T>,
    pub rhs: T,
}

/// Standard-form semidefinite program with PSD blocks and free scalars.
#[derive(Debug, Clone)]
pub struct SdpProblem<T> {
    pub block_dims: Vec<usize>,
    pub free_count: usize,
    pub objective: LinearForm<T>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> SdpProblem<T> {
    pub fn new(block_dims: Vec<usize>, free_count: usize) -> Self {
        SdpProblem {
            block_dims,
            free_count,
            objective: LinearForm::default(),
            constraints: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, form: LinearForm<T>, rhs: T) {
        self.constraints.push(Constraint { form, rhs });
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.block_dims.iter().any(|d| *d == 0) {
            return Err(SdpError::EmptyBlock);
        }
        let check = |form: &LinearForm<T>| -> Result<(), SdpError> {
            for (e, _) in &form.block_terms {
                let dim = *self.block_dims.get(e.block).ok_or(SdpError::BadBlock(e.block))?;
                if e.row >= dim || e.col >= dim {
                    return Err(SdpError::BadEntry {
                        block: e.block,
                        row: e.row,
                        col: e.col,
                        dim,
                    });
                }
                if e.row > e.col {
                    return Err(SdpError::NotUpperTriangle);
                }
            }
            for (i, _) in &form.free_terms {
                if *i >= self.free_count {
                    return Err(SdpError::BadFree(*i));
                }
            }
            Ok(())
        };
        check(&self.objective)?;
        for c in &self.constraints {
            check(&c.form)?;
        }
        Ok(())
    }

    /// Sparse text dump for reproducibility debugging: one line per
    /// `(constraint, block, row, col, value)` coefficient, `-1` as the
    /// constraint index for the objective, `block = -1` for free variables
    /// (with the free index in the `row` column), then one `rhs` line per
    /// constraint.
    pub fn dump_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "sdp blocks={:?} free={} constraints={}",
            self.block_dims,
            self.free_count,
            self.constraints.len()
        );
        let mut form_lines = |idx: isize, form: &LinearForm<T>, s: &mut String| {
            for (e, v) in &form.block_terms {
                let _ = writeln!(s, "{idx} {} {} {} {:e}", e.block, e.row, e.col, v);
            }
            for (i, v) in &form.free_terms {
                let _ = writeln!(s, "{idx} -1 {i} 0 {:e}", v);
            }
        };
        form_lines(-1, &self.objective, &mut s);
        for (i, c) in self.constraints.iter().enumerate() {
            form_lines(i as isize, &c.form, &mut s);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = writeln!(s, "rhs {i} {:e}", c.rhs);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    MaxIter,
    NumErr,
}

#[derive(Debug, Clone)]
pub struct SdpSolution<T: Scalar> {
    pub status: SolveStatus,
    /// Primal PSD block values.
    pub blocks: Vec<DMatrix<T>>,
    /// Free variable values.
    pub frees: Vec<T>,
    /// Dual multipliers, one per equality constraint.
    pub y: Vec<T>,
    /// Dual slack blocks.
    pub slacks: Vec<DMatrix<T>>,
    pub primal_obj: T,
    pub dual_obj: T,
    /// Relative duality gap.
    pub gap: T,
    pub iterations: usize,
    /// Optimal uniform slack from `phase1_feasibility`.
    pub phase1_slack: Option<T>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    pub max_iter: usize,
    /// Relative duality gap target.
    pub tol_gap: T,
    /// Relative primal/dual residual target.
    pub tol_feas: T,
    /// Step-to-boundary fraction.
    pub step_frac: T,
    /// Cap on the phase-I uniform slack (keeps it bounded when the feasible
    /// set is unconstrained in some direction).
    pub t_max: T,
    pub verbose: bool,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            max_iter: 100,
            tol_gap: conv(1e-8),
            tol_feas: conv(1e-9),
            step_frac: conv(0.98),
            t_max: conv(1e6),
            verbose: false,
        }
    }
}

/// Strict-feasibility threshold on the phase-I slack.
pub const PHASE1_FEASIBLE_TOL: f64 = 1e-9;

pub fn solve<T: Scalar>(problem: &SdpProblem<T>, opts: &SolveOptions<T>) -> SdpSolution<T> {
    solver::solve(problem, opts)
}

/// Maximize a uniform slack `t` subtracted from every PSD block.
///
/// Returns `Feasible` (with a strictly interior point reconstructed as
/// `X_k + t* I`) iff `t* > 1e-9`, `Infeasible` if the slack optimum is
/// smaller, and the raw solver status on numerical failure.
pub fn phase1_feasibility<T: Scalar>(
    problem: &SdpProblem<T>,
    opts: &SolveOptions<T>,
) -> SdpSolution<T> {
    solver::phase1(problem, opts)
}

#[cfg(test)]
mod tests;

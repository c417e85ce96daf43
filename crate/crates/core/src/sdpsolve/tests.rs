use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;

fn entry(block: usize, row: usize, col: usize) -> MatEntry {
    MatEntry { block, row, col }
}

/// min x s.t. [[x, 1], [1, x]] >= 0; eigenvalues are x +- 1, so x* = 1.
#[test]
fn min_x_two_by_two() {
    let mut p = SdpProblem::<f64>::new(vec![2], 0);
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 1), 1.0)],
            free_terms: vec![],
        },
        1.0,
    );
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 0), 1.0), (entry(0, 1, 1), -1.0)],
            free_terms: vec![],
        },
        0.0,
    );
    p.objective = LinearForm {
        block_terms: vec![(entry(0, 0, 0), 1.0)],
        free_terms: vec![],
    };
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.blocks[0][(0, 0)] - 1.0).abs() < 1e-6, "x* = {}", sol.blocks[0][(0, 0)]);
}

fn trace_one_problem(n: usize) -> SdpProblem<f64> {
    let mut p = SdpProblem::<f64>::new(vec![n], 0);
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push((entry(0, i, i), 1.0));
    }
    p.add_constraint(
        LinearForm {
            block_terms: terms,
            free_terms: vec![],
        },
        1.0,
    );
    p
}

/// Feasibility of {X >= 0, trace X = 1}; X = I/n is admissible.
#[test]
fn trace_normalized_feasible() {
    let p = trace_one_problem(4);
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    let tr: f64 = (0..4).map(|i| sol.blocks[0][(i, i)]).sum();
    assert!((tr - 1.0).abs() < 1e-6);
    assert!(min_eig_sym(&sol.blocks[0]) > -1e-9);
}

/// min tr(C X) s.t. tr X = 1 equals lambda_min(C); oracle by dense eigen.
#[test]
fn lambda_min_objective() {
    let mut rng = StdRng::seed_from_u64(3);
    let raw = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    let c = (&raw + raw.transpose()).scale(0.5);
    let mut p = trace_one_problem(3);
    let mut obj = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            if c[(i, j)].abs() > 0.0 {
                obj.push((entry(0, i, j), c[(i, j)]));
            }
        }
    }
    p.objective = LinearForm {
        block_terms: obj,
        free_terms: vec![],
    };
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    let eig = c.symmetric_eigen();
    let lam_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        (sol.primal_obj - lam_min).abs() <= 1e-6 * (1.0 + lam_min.abs()),
        "got {}, want {lam_min}",
        sol.primal_obj
    );
}

/// {X >= 0, X_11 = -1} is infeasible: PSD diagonals are non-negative.
#[test]
fn phase1_detects_infeasible() {
    let mut p = SdpProblem::<f64>::new(vec![2], 0);
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 0), 1.0)],
            free_terms: vec![],
        },
        -1.0,
    );
    let sol = phase1_feasibility(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Infeasible);
    assert!(sol.phase1_slack.unwrap() < 1e-9);
}

/// {X >= 0, trace X = 1} has max uniform slack 1/n at X = I/n.
#[test]
fn phase1_trace_slack() {
    for n in [2usize, 3, 5] {
        let p = trace_one_problem(n);
        let sol = phase1_feasibility(&p, &SolveOptions::default());
        assert_eq!(sol.status, SolveStatus::Feasible);
        let t = sol.phase1_slack.unwrap();
        assert!(
            (t - 1.0 / n as f64).abs() < 1e-6,
            "n={n}: slack {t} vs {}",
            1.0 / n as f64
        );
        assert!(min_eig_sym(&sol.blocks[0]) > 1e-3);
    }
}

/// No constraints: the slack is unbounded and stops at the configured cap.
#[test]
fn phase1_unbounded_capped() {
    let p = SdpProblem::<f64>::new(vec![2], 0);
    let mut opts = SolveOptions::default();
    opts.t_max = 125.0;
    let sol = phase1_feasibility(&p, &opts);
    assert_eq!(sol.status, SolveStatus::Feasible);
    assert!((sol.phase1_slack.unwrap() - 125.0).abs() < 1e-4);
}

/// Free-variable elimination: min over x of a scalar quadratic encoded as
/// an SDP: min t s.t. [[1, x], [x, t]] >= 0, x = 3 -> t* = 9.
#[test]
fn free_variables_eliminated() {
    let mut p = SdpProblem::<f64>::new(vec![2], 1);
    // X_00 = 1
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 0), 1.0)],
            free_terms: vec![],
        },
        1.0,
    );
    // X_01 - x = 0
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 1), 1.0)],
            free_terms: vec![(0, -1.0)],
        },
        0.0,
    );
    // x = 3 (pure-free row)
    p.add_constraint(
        LinearForm {
            block_terms: vec![],
            free_terms: vec![(0, 1.0)],
        },
        3.0,
    );
    p.objective = LinearForm {
        block_terms: vec![(entry(0, 1, 1), 1.0)],
        free_terms: vec![],
    };
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.frees[0] - 3.0).abs() < 1e-6);
    assert!((sol.blocks[0][(1, 1)] - 9.0).abs() < 1e-5);
}

fn random_solvable(rng: &mut StdRng, nblocks: usize, dim: usize, m: usize) -> SdpProblem<f64> {
    // Primal and dual strictly feasible by construction: pick X0 > 0,
    // y0, S0 > 0 and set rhs = A(X0), C = A*(y0) + S0.
    let dims = vec![dim; nblocks];
    let mut p = SdpProblem::<f64>::new(dims.clone(), 0);
    let x0: Vec<DMatrix<f64>> = dims
        .iter()
        .map(|&d| {
            let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
            &a * a.transpose() + DMatrix::identity(d, d).scale(0.5)
        })
        .collect();
    let s0: Vec<DMatrix<f64>> = dims
        .iter()
        .map(|&d| {
            let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
            &a * a.transpose() + DMatrix::identity(d, d).scale(0.5)
        })
        .collect();
    let y0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut c_mat: Vec<DMatrix<f64>> = s0.clone();
    for i in 0..m {
        let mut form = LinearForm::<f64>::default();
        let mut rhs = 0.0;
        for (k, &d) in dims.iter().enumerate() {
            for r in 0..d {
                for c in r..d {
                    if rng.gen_bool(0.3) {
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        form.block_terms.push((entry(k, r, c), v));
                        rhs += if r == c {
                            v * x0[k][(r, c)]
                        } else {
                            2.0 * v * x0[k][(r, c)]
                        };
                        c_mat[k][(r, c)] += y0[i] * v;
                        if r != c {
                            c_mat[k][(c, r)] += y0[i] * v;
                        }
                    }
                }
            }
        }
        p.add_constraint(form, rhs);
    }
    let mut obj = LinearForm::<f64>::default();
    for (k, &d) in dims.iter().enumerate() {
        for r in 0..d {
            for c in r..d {
                let v = c_mat[k][(r, c)];
                if v.abs() > 0.0 {
                    obj.block_terms.push((entry(k, r, c), v));
                }
            }
        }
    }
    p.objective = obj;
    p
}

/// 20 random strictly feasible problems reach Optimal within 100 iterations,
/// and weak duality holds on the returned iterate.
#[test]
fn random_problems_reach_optimal() {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..20 {
        let nblocks = 1 + (trial % 2);
        let dim = 3 + (trial % 8); // up to 10x10
        let m = 5 + (trial % 26); // up to 30
        let p = random_solvable(&mut rng, nblocks, dim, m);
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal, "trial {trial}");
        assert!(sol.iterations <= 100);
        assert!(
            sol.primal_obj >= sol.dual_obj - 1e-6 * (1.0 + sol.primal_obj.abs()),
            "weak duality violated on trial {trial}"
        );
        // Solution invariants from the contract.
        for b in &sol.blocks {
            let norm = b.norm();
            assert!(min_eig_sym(b) >= -1e-7 * (1.0 + norm));
        }
        for c in &p.constraints {
            let mut lhs = 0.0;
            for (e, v) in &c.form.block_terms {
                let x = &sol.blocks[e.block];
                lhs += if e.row == e.col {
                    v * x[(e.row, e.col)]
                } else {
                    2.0 * v * x[(e.row, e.col)]
                };
            }
            assert!((lhs - c.rhs).abs() <= 1e-7 * (1.0 + c.rhs.abs()));
        }
    }
}

/// Objective invariant under row permutation of the equality constraints.
#[test]
fn permutation_invariance() {
    let mut rng = StdRng::seed_from_u64(11);
    let p = random_solvable(&mut rng, 1, 5, 12);
    let sol = solve(&p, &SolveOptions::default());
    let mut q = p.clone();
    q.constraints.reverse();
    let sol_q = solve(&q, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert_eq!(sol_q.status, SolveStatus::Optimal);
    assert!(
        (sol.primal_obj - sol_q.primal_obj).abs() <= 1e-6 * (1.0 + sol.primal_obj.abs())
    );
}

#[test]
fn dump_text_round_numbers() {
    let mut p = SdpProblem::<f64>::new(vec![2], 1);
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 1), 0.5)],
            free_terms: vec![(0, -1.0)],
        },
        2.0,
    );
    let dump = p.dump_text();
    assert!(dump.contains("0 0 0 1 5e-1"));
    assert!(dump.contains("rhs 0 2e0"));
}

/// The generic solver also instantiates at f32 (loose tolerances).
#[test]
fn f32_instantiation() {
    let mut p = SdpProblem::<f32>::new(vec![2], 0);
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 1), 1.0)],
            free_terms: vec![],
        },
        1.0,
    );
    p.add_constraint(
        LinearForm {
            block_terms: vec![(entry(0, 0, 0), 1.0), (entry(0, 1, 1), -1.0)],
            free_terms: vec![],
        },
        0.0,
    );
    p.objective = LinearForm {
        block_terms: vec![(entry(0, 0, 0), 1.0)],
        free_terms: vec![],
    };
    let mut opts = SolveOptions::<f32>::default();
    opts.tol_gap = 1e-4;
    opts.tol_feas = 1e-4;
    let sol = solve(&p, &opts);
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.blocks[0][(0, 0)] - 1.0).abs() < 1e-2);
}

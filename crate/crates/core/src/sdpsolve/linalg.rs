//! Small dense kernels used by the interior-point loop.

use nalgebra::DMatrix;

use crate::scalar::Scalar;

const PANEL: usize = 64;

/// In-place blocked Cholesky factorization `A = L L'` (lower triangle).
///
/// Only the lower triangle of `a` is referenced; on success it holds `L`.
/// Fails on a non-positive pivot.
pub fn cholesky_in_place<T: Scalar>(a: &mut DMatrix<T>) -> Result<(), ()> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return Ok(());
    }
    let ld = n;
    for j0 in (0..n).step_by(PANEL) {
        let j1 = usize::min(j0 + PANEL, n);
        // Unblocked factorization of the diagonal panel + panel columns.
        for j in j0..j1 {
            let mut d = a[(j, j)];
            for k in j0..j {
                d -= a[(j, k)] * a[(j, k)];
            }
            if d <= T::zero() {
                return Err(());
            }
            let djj = d.sqrt();
            a[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in j0..j {
                    s -= a[(i, k)] * a[(j, k)];
                }
                a[(i, j)] = s / djj;
            }
        }
        // Trailing update: A[j1.., j1..] -= L21 L21'.
        let m = n - j1;
        let k = j1 - j0;
        if m > 0 && k > 0 {
            let data = a.as_mut_slice();
            let (left, right) = data.split_at_mut(j1 * ld);
            let panel = &left[j1 + j0 * ld..];
            let c = &mut right[j1..];
            T::gemm_sub(c, ld, panel, ld, panel, ld, m, m, k);
        }
    }
    Ok(())
}

/// Solve `L L' x = b` in place given the Cholesky factor (lower).
pub fn spd_solve_in_place<T: Scalar>(l: &DMatrix<T>, x: &mut [T]) {
    let n = l.nrows();
    debug_assert_eq!(x.len(), n);
    // Forward: L z = b (column-oriented).
    for k in 0..n {
        let xk = x[k] / l[(k, k)];
        x[k] = xk;
        if xk != T::zero() {
            for i in (k + 1)..n {
                x[i] -= l[(i, k)] * xk;
            }
        }
    }
    // Backward: L' x = z (reads columns of L).
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
}

/// Forward substitution `L Z = B` applied to every column of `b` in place.
pub fn forward_solve_cols<T: Scalar>(l: &DMatrix<T>, b: &mut DMatrix<T>) {
    let n = l.nrows();
    debug_assert_eq!(b.nrows(), n);
    for j in 0..b.ncols() {
        let mut col = b.column_mut(j);
        for k in 0..n {
            let xk = col[k] / l[(k, k)];
            col[k] = xk;
            if xk != T::zero() {
                for i in (k + 1)..n {
                    col[i] -= l[(i, k)] * xk;
                }
            }
        }
    }
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn min_eig_sym<T: Scalar>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 {
        return T::zero();
    }
    let eig = m.clone().symmetric_eigen();
    let mut lo = eig.eigenvalues[0];
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < lo {
            lo = eig.eigenvalues[i];
        }
    }
    lo
}

/// Largest `alpha` in `(0, 1/frac]` with `X + alpha * dx >= 0`, given the
/// Cholesky factor of `X`. Returns `None` when any positive step works.
pub fn max_psd_step<T: Scalar>(lx: &DMatrix<T>, dx: &DMatrix<T>) -> Option<T> {
    let n = lx.nrows();
    if n == 0 {
        return None;
    }
    // W = L^{-1} dX L^{-T}; X + a dX >= 0 iff I + a W >= 0.
    let mut z = dx.clone();
    forward_solve_cols(lx, &mut z); // z = L^{-1} dX
    let mut zt = z.transpose();
    forward_solve_cols(lx, &mut zt); // zt = L^{-1} dX' L^{-T} = W'
    // Symmetrize against round-off.
    let w = (&zt + zt.transpose()).scale(crate::scalar::conv(0.5));
    let lam = min_eig_sym(&w);
    if lam >= T::zero() {
        None
    } else {
        Some(-T::one() / lam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        // Deterministic pseudo-random fill; A A' + n I is safely PD.
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| next());
        &a * a.transpose() + DMatrix::identity(n, n).scale(n as f64)
    }

    #[test]
    fn cholesky_matches_nalgebra() {
        for n in [1usize, 3, 17, 130] {
            let a = random_spd(n, 42 + n as u64);
            let mut l = a.clone();
            cholesky_in_place(&mut l).unwrap();
            let reference = a.clone().cholesky().unwrap();
            let lr = reference.l();
            for i in 0..n {
                for j in 0..=i {
                    assert!(
                        (l[(i, j)] - lr[(i, j)]).abs() < 1e-9 * (1.0 + lr[(i, j)].abs()),
                        "mismatch at ({i},{j}) for n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn solve_round_trip() {
        let n = 40;
        let a = random_spd(n, 7);
        let mut l = a.clone();
        cholesky_in_place(&mut l).unwrap();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let b = &a * DMatrix::from_column_slice(n, 1, &xs);
        let mut x = b.as_slice().to_vec();
        spd_solve_in_place(&l, &mut x);
        for (xi, xsi) in x.iter().zip(&xs) {
            assert!((xi - xsi).abs() < 1e-9);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let mut m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(cholesky_in_place(&mut m).is_err());
    }

    #[test]
    fn psd_step_length() {
        // X = I, dX = diag(-2, 1): max step 0.5.
        let lx = DMatrix::<f64>::identity(2, 2);
        let dx = DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, 1.0]);
        let a = max_psd_step(&lx, &dx).unwrap();
        assert!((a - 0.5).abs() < 1e-10);
        let dx_pos = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(max_psd_step(&lx, &dx_pos).is_none());
    }
}

//! Scalar abstraction shared by every numeric module.
//!
//! All core math is written against [`Scalar`], so the toolkit can be
//! instantiated with `f32` or `f64`. The crate root exposes `f64` aliases,
//! which is what the CLI and the bundled models use.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the toolkit.
///
/// `gemm_sub` is a hook for the one dense kernel that dominates solver time
/// (the trailing update of the blocked Cholesky). The default is a portable
/// triple loop; `f32`/`f64` route to `matrixmultiply`.
pub trait Scalar:
    RealField + Copy + Default + FromPrimitive + ToPrimitive + std::fmt::LowerExp
{
    /// `C -= A * B^T` on column-major buffers.
    ///
    /// `a` is `m x k` with leading dimension `lda`, `b` is `n x k` with
    /// leading dimension `ldb`, `c` is `m x n` with leading dimension `ldc`.
    fn gemm_sub(
        c: &mut [Self],
        ldc: usize,
        a: &[Self],
        lda: usize,
        b: &[Self],
        ldb: usize,
        m: usize,
        n: usize,
        k: usize,
    ) {
        for j in 0..n {
            for l in 0..k {
                let bjl = b[j + l * ldb];
                if bjl == Self::zero() {
                    continue;
                }
                let (col_c, col_a) = (j * ldc, l * lda);
                for i in 0..m {
                    c[col_c + i] -= a[col_a + i] * bjl;
                }
            }
        }
    }
}

impl Scalar for f64 {
    fn gemm_sub(
        c: &mut [Self],
        ldc: usize,
        a: &[Self],
        lda: usize,
        b: &[Self],
        ldb: usize,
        m: usize,
        n: usize,
        k: usize,
    ) {
        if m == 0 || n == 0 || k == 0 {
            return;
        }
        unsafe {
            matrixmultiply::dgemm(
                m,
                k,
                n,
                -1.0,
                a.as_ptr(),
                1,
                lda as isize,
                // B^T of a column-major n x k matrix: swap the strides.
                b.as_ptr(),
                ldb as isize,
                1,
                1.0,
                c.as_mut_ptr(),
                1,
                ldc as isize,
            );
        }
    }
}

impl Scalar for f32 {
    fn gemm_sub(
        c: &mut [Self],
        ldc: usize,
        a: &[Self],
        lda: usize,
        b: &[Self],
        ldb: usize,
        m: usize,
        n: usize,
        k: usize,
    ) {
        if m == 0 || n == 0 || k == 0 {
            return;
        }
        unsafe {
            matrixmultiply::sgemm(
                m,
                k,
                n,
                -1.0,
                a.as_ptr(),
                1,
                lda as isize,
                b.as_ptr(),
                ldb as isize,
                1,
                1.0,
                c.as_mut_ptr(),
                1,
                ldc as isize,
            );
        }
    }
}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn conv<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant")
}

/// Absolute value without the `Signed`/`ComplexField` method ambiguity.
#[inline]
pub fn fabs<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

#[inline]
pub fn fmax<T: Scalar>(a: T, b: T) -> T {
    if a < b {
        b
    } else {
        a
    }
}

#[inline]
pub fn fmin<T: Scalar>(a: T, b: T) -> T {
    if a < b {
        a
    } else {
        b
    }
}

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use super::{PolyError, Polynomial, VarSet};
use crate::scalar::Scalar;

/// Rectangular matrix of polynomials (row-major storage).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix<T: Scalar> {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial<T>>,
}

impl<T: Scalar> PolyMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<Polynomial<T>>>) -> Result<Self, PolyError> {
        let r = rows.len();
        if r == 0 {
            return Err(PolyError::Shape("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(PolyError::Shape("ragged or empty rows".into()));
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn column(entries: Vec<Polynomial<T>>) -> Result<Self, PolyError> {
        PolyMatrix::from_rows(entries.into_iter().map(|p| vec![p]).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Polynomial::zero(VarSet::empty()); rows * cols],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &Polynomial<T> {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial<T>) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Polynomial<T>> {
        self.entries.iter()
    }

    /// Union of the variable sets of all entries.
    pub fn all_vars(&self) -> VarSet {
        self.entries
            .iter()
            .fold(VarSet::empty(), |acc, p| acc.union(p.vars()))
    }

    /// Union of variables that actually appear with a nonzero coefficient.
    pub fn support_vars(&self) -> VarSet {
        self.entries
            .iter()
            .fold(VarSet::empty(), |acc, p| acc.union(&p.support_vars()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn max_coeff_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, p| crate::scalar::fmax(acc, p.max_coeff_abs()))
    }

    pub fn map(&self, f: impl Fn(&Polynomial<T>) -> Polynomial<T>) -> Self {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(PolyError::Shape("add: dimension mismatch".into()));
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.map(|p| -p))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.cols != other.rows {
            return Err(PolyError::Shape("matmul: inner dimension mismatch".into()));
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(VarSet::empty());
                for k in 0..self.cols {
                    acc = &acc + &(self.entry(i, k) * other.entry(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Left-multiply by a numeric matrix.
    pub fn scalar_matmul(m: &DMatrix<T>, p: &PolyMatrix<T>) -> Result<PolyMatrix<T>, PolyError> {
        if m.ncols() != p.rows {
            return Err(PolyError::Shape(
                "scalar_matmul: inner dimension mismatch".into(),
            ));
        }
        let mut out = PolyMatrix::zeros(m.nrows(), p.cols);
        for i in 0..m.nrows() {
            for j in 0..p.cols {
                let mut acc = Polynomial::zero(VarSet::empty());
                for k in 0..p.rows {
                    acc = &acc + &p.entry(k, j).scale(m[(i, k)]);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn substitute(&self, bindings: &BTreeMap<String, Polynomial<T>>) -> Self {
        self.map(|p| p.substitute(bindings))
    }

    pub fn evaluate(&self, point: &BTreeMap<String, T>) -> Result<DMatrix<T>, PolyError> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.entry(i, j).evaluate(point)?;
            }
        }
        Ok(out)
    }
}

impl<T: Scalar> fmt::Display for PolyMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_scalar_mul() {
        let x = Polynomial::<f64>::var("x");
        let one = Polynomial::constant(1.0);
        let m = PolyMatrix::from_rows(vec![
            vec![x.clone(), one.clone()],
            vec![Polynomial::zero(VarSet::empty()), x.clone()],
        ])
        .unwrap();
        let v = PolyMatrix::column(vec![one.clone(), x.clone()]).unwrap();
        let mv = m.matmul(&v).unwrap();
        assert_eq!(mv.entry(0, 0), &(&x + &x)); // x*1 + 1*x
        assert_eq!(mv.entry(1, 0), &(&x * &x));

        let s = DMatrix::from_row_slice(1, 2, &[2.0, 3.0]);
        let sv = PolyMatrix::scalar_matmul(&s, &v).unwrap();
        let expect = &Polynomial::constant(2.0) + &x.scale(3.0);
        assert_eq!(sv.entry(0, 0), &expect);
    }
}

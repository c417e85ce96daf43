use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// Ordered set of distinct variable names.
///
/// The canonical variable order is the string order of the names; it is the
/// same in every part of the program, which keeps monomial enumeration and
/// Gram indexing stable across runs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarSet {
    names: Vec<Arc<str>>,
}

impl VarSet {
    pub fn empty() -> Self {
        VarSet { names: Vec::new() }
    }

    /// Build a set from names; rejects duplicates.
    pub fn new<I, S>(names: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut v: Vec<Arc<str>> = names.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        v.sort();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(PolyError::DuplicateVariable(w[0].to_string()));
            }
        }
        Ok(VarSet { names: v })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.binary_search_by(|n| n.as_ref().cmp(name)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|n| n.as_ref())
    }

    pub(crate) fn get_arc(&self, name: &str) -> Option<Arc<str>> {
        self.names
            .binary_search_by(|n| n.as_ref().cmp(name))
            .ok()
            .map(|i| self.names[i].clone())
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut names = Vec::with_capacity(self.names.len() + other.names.len());
        let (mut i, mut j) = (0, 0);
        while i < self.names.len() && j < other.names.len() {
            match self.names[i].cmp(&other.names[j]) {
                Ordering::Less => {
                    names.push(self.names[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    names.push(other.names[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    names.push(self.names[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        names.extend_from_slice(&self.names[i..]);
        names.extend_from_slice(&other.names[j..]);
        VarSet { names }
    }

    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// A monomial: sparse exponent map, no zero exponents stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    /// Sorted by variable name; exponents strictly positive.
    exps: Vec<(Arc<str>, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(name: &str) -> Self {
        Monomial {
            exps: vec![(Arc::from(name), 1)],
        }
    }

    pub fn var_pow(name: &str, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial {
                exps: vec![(Arc::from(name), exp)],
            }
        }
    }

    pub(crate) fn from_sorted(exps: Vec<(Arc<str>, u32)>) -> Self {
        debug_assert!(exps.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(exps.iter().all(|(_, e)| *e > 0));
        Monomial { exps }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|(_, e)| e).sum()
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.exps
            .binary_search_by(|(n, _)| n.as_ref().cmp(name))
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.exps.iter().map(|(n, e)| (n.as_ref(), *e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (a, b) = (&self.exps, &other.exps);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    exps.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&a[i..]);
        exps.extend_from_slice(&b[j..]);
        Monomial { exps }
    }

    /// Remove one power of `name`; `None` if it does not divide.
    pub fn div_var(&self, name: &str) -> Option<Monomial> {
        let i = self
            .exps
            .binary_search_by(|(n, _)| n.as_ref().cmp(name))
            .ok()?;
        let mut exps = self.exps.clone();
        if exps[i].1 == 1 {
            exps.remove(i);
        } else {
            exps[i].1 -= 1;
        }
        Some(Monomial { exps })
    }

    /// All variable names have to live inside `vars`.
    pub fn check_vars(&self, vars: &VarSet) -> Result<(), PolyError> {
        for (n, _) in &self.exps {
            if !vars.contains(n) {
                return Err(PolyError::ForeignVariable(n.to_string()));
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: lower total degree first; for equal degree the
    /// monomial with the higher exponent on the earliest variable comes
    /// first, so `[1, x, y, x^2, x*y, y^2]` for variables `{x, y}`.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.exps, &other.exps);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => return Ordering::Less, // a has the earlier var
                Ordering::Greater => return Ordering::Greater,
                Ordering::Equal => {
                    match a[i].1.cmp(&b[j].1) {
                        Ordering::Equal => {}
                        // higher exponent on this (earlier) variable sorts first
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Less => return Ordering::Greater,
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        debug_assert!(i == a.len() && j == b.len());
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (n, e)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials over `vars` of total degree `<= max_degree`, in graded-lex
/// order. The count is `C(n + d, d)`.
pub fn monomial_basis(vars: &VarSet, max_degree: u32) -> Vec<Monomial> {
    let names: Vec<Arc<str>> = vars.iter().map(Arc::from).collect();
    let mut out = Vec::new();
    let mut current: Vec<(Arc<str>, u32)> = Vec::new();
    fn rec(
        names: &[Arc<str>],
        idx: usize,
        left: u32,
        current: &mut Vec<(Arc<str>, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == names.len() {
            out.push(Monomial::from_sorted(current.clone()));
            return;
        }
        for e in 0..=left {
            if e > 0 {
                current.push((names[idx].clone(), e));
            }
            rec(names, idx + 1, left - e, current, out);
            if e > 0 {
                current.pop();
            }
        }
    }
    rec(&names, 0, max_degree, &mut current, &mut out);
    out.sort();
    out
}

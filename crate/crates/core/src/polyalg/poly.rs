use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Monomial, PolyError, VarSet, DROP_TOLERANCE, MAX_DEGREE};
use crate::scalar::{conv, fabs, fmax, Scalar};

/// Sparse multivariate polynomial with real coefficients.
///
/// Values are immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Scalar> {
    vars: VarSet,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(vars: VarSet) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        let mut p = Polynomial::zero(VarSet::empty());
        if fabs(c) >= conv(DROP_TOLERANCE) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let vars = VarSet::new([name]).expect("single name");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(name), T::one());
        Polynomial { vars, terms }
    }

    pub fn from_terms<I>(vars: VarSet, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        let mut map: BTreeMap<Monomial, T> = BTreeMap::new();
        for (m, c) in terms {
            m.check_vars(&vars)?;
            *map.entry(m).or_insert_with(T::zero) += c;
        }
        let mut p = Polynomial { vars, terms: map };
        p.normalize();
        Ok(p)
    }

    fn normalize(&mut self) {
        let tol: T = conv(DROP_TOLERANCE);
        self.terms.retain(|m, c| {
            assert!(
                m.degree() <= MAX_DEGREE,
                "polynomial degree {} exceeds the cap of {MAX_DEGREE} (runaway expression?)",
                m.degree()
            );
            fabs(*c) >= tol
        });
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Variables that actually appear with nonzero exponent.
    pub fn support_vars(&self) -> VarSet {
        let mut names: Vec<&str> = Vec::new();
        for m in self.terms.keys() {
            for (n, _) in m.iter() {
                names.push(n);
            }
        }
        names.sort();
        names.dedup();
        VarSet::new(names).expect("deduped")
    }

    /// Extend the variable set; fails if a term uses a variable outside `vars`.
    pub fn with_vars(mut self, vars: VarSet) -> Result<Self, PolyError> {
        for m in self.terms.keys() {
            m.check_vars(&vars)?;
        }
        self.vars = vars;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).copied().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::one())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).min().unwrap_or(0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_in(name))
            .max()
            .unwrap_or(0)
    }

    pub fn max_coeff_abs(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, c| fmax(acc, fabs(*c)))
    }

    pub fn scale(&self, k: T) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), *c * k);
        }
        let mut p = Polynomial {
            vars: self.vars.clone(),
            terms,
        };
        p.normalize();
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::constant(T::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc.with_vars(acc.vars.union(&self.vars)).expect("superset")
    }

    /// Formal partial derivative with respect to `name`.
    pub fn differentiate(&self, name: &str) -> Result<Self, PolyError> {
        if !self.vars.contains(name) {
            return Err(PolyError::UnknownVariable(name.to_string()));
        }
        let mut terms: BTreeMap<Monomial, T> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.degree_in(name);
            if e == 0 {
                continue;
            }
            let dm = m.div_var(name).expect("exponent checked");
            *terms.entry(dm).or_insert_with(T::zero) += *c * conv(e as f64);
        }
        let mut p = Polynomial {
            vars: self.vars.clone(),
            terms,
        };
        p.normalize();
        Ok(p)
    }

    /// Exact composition: replace each bound variable by its polynomial.
    /// Variables without a binding are left in place.
    pub fn substitute(&self, bindings: &BTreeMap<String, Polynomial<T>>) -> Self {
        let mut result_vars = VarSet::empty();
        for v in self.vars.iter() {
            match bindings.get(v) {
                Some(p) => result_vars = result_vars.union(p.vars()),
                None => result_vars = result_vars.union(&VarSet::new([v]).expect("one")),
            }
        }
        let mut acc = Polynomial::zero(result_vars.clone());
        // Cache powers of each substituted polynomial.
        let mut powers: BTreeMap<&str, Vec<Polynomial<T>>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(*c);
            let mut residue: Vec<(std::sync::Arc<str>, u32)> = Vec::new();
            for (n, e) in m.iter() {
                if let Some(p) = bindings.get(n) {
                    let cache = powers.entry(n).or_insert_with(|| vec![p.clone()]);
                    while (cache.len() as u32) < e {
                        let next = &cache[cache.len() - 1] * p;
                        cache.push(next);
                    }
                    term = &term * &cache[(e - 1) as usize];
                } else {
                    residue.push((self.vars.get_arc(n).expect("own var"), e));
                }
            }
            if !residue.is_empty() {
                let residue_mono = Monomial::from_sorted(residue);
                let shift: BTreeMap<Monomial, T> = term
                    .terms
                    .iter()
                    .map(|(mm, cc)| (mm.mul(&residue_mono), *cc))
                    .collect();
                term = Polynomial {
                    vars: term.vars.union(&self.vars),
                    terms: shift,
                };
            }
            acc = &acc + &term;
        }
        acc.with_vars(acc.vars.union(&result_vars)).expect("superset")
    }

    /// Numeric evaluation; every variable of the set must be covered.
    pub fn evaluate(&self, point: &BTreeMap<String, T>) -> Result<T, PolyError> {
        for v in self.vars.iter() {
            if !point.contains_key(v) {
                return Err(PolyError::MissingPoint(v.to_string()));
            }
        }
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = *c;
            for (n, e) in m.iter() {
                t *= point[n].powi(e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Bind the polynomial to a fixed variable layout for fast evaluation.
    pub fn compile(&self, layout: &[&str]) -> Result<CompiledPoly<T>, PolyError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut pows = Vec::new();
            for (n, e) in m.iter() {
                let idx = layout
                    .iter()
                    .position(|l| *l == n)
                    .ok_or_else(|| PolyError::MissingPoint(n.to_string()))?;
                pows.push((idx, e));
            }
            terms.push((*c, pows));
        }
        Ok(CompiledPoly { terms })
    }

    /// JSON term representation (array of `{"coeff", "exps"}` objects).
    pub fn to_term_reprs(&self) -> Vec<TermRepr> {
        self.terms
            .iter()
            .map(|(m, c)| TermRepr {
                coeff: c.to_f64().expect("finite coefficient"),
                exps: m.iter().map(|(n, e)| (n.to_string(), e)).collect(),
            })
            .collect()
    }

    pub fn from_term_reprs(reprs: &[TermRepr]) -> Result<Self, PolyError> {
        let mut names: Vec<&str> = Vec::new();
        for t in reprs {
            names.extend(t.exps.keys().map(|s| s.as_str()));
        }
        names.sort();
        names.dedup();
        let vars = VarSet::new(names)?;
        let terms = reprs.iter().map(|t| {
            let mono = t
                .exps
                .iter()
                .filter(|(_, e)| **e > 0)
                .fold(Monomial::one(), |acc, (n, e)| {
                    acc.mul(&Monomial::var_pow(n, *e))
                });
            (mono, conv::<T>(t.coeff))
        });
        Polynomial::from_terms(vars, terms)
    }
}

/// One serialized term: coefficient and exponent map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRepr {
    pub coeff: f64,
    #[serde(default)]
    pub exps: BTreeMap<String, u32>,
}

impl<T: Scalar> Serialize for Polynomial<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_term_reprs().serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Polynomial<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs = Vec::<TermRepr>::deserialize(d)?;
        Polynomial::from_term_reprs(&reprs).map_err(D::Error::custom)
    }
}

/// Polynomial bound to a variable layout; evaluation over slices.
#[derive(Debug, Clone)]
pub struct CompiledPoly<T> {
    terms: Vec<(T, Vec<(usize, u32)>)>,
}

impl<T: Scalar> CompiledPoly<T> {
    pub fn eval(&self, point: &[T]) -> T {
        let mut acc = T::zero();
        for (c, pows) in &self.terms {
            let mut t = *c;
            for (idx, e) in pows {
                t *= point[*idx].powi(*e as i32);
            }
            acc += t;
        }
        acc
    }
}

impl<'a, 'b, T: Scalar> Add<&'b Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: &'b Polynomial<T>) -> Polynomial<T> {
        let vars = self.vars.union(&rhs.vars);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            *terms.entry(m.clone()).or_insert_with(T::zero) += *c;
        }
        let mut p = Polynomial { vars, terms };
        p.normalize();
        p
    }
}

impl<'a, 'b, T: Scalar> Sub<&'b Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: &'b Polynomial<T>) -> Polynomial<T> {
        let vars = self.vars.union(&rhs.vars);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            *terms.entry(m.clone()).or_insert_with(T::zero) -= *c;
        }
        let mut p = Polynomial { vars, terms };
        p.normalize();
        p
    }
}

impl<'a, 'b, T: Scalar> Mul<&'b Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: &'b Polynomial<T>) -> Polynomial<T> {
        let vars = self.vars.union(&rhs.vars);
        let mut terms: BTreeMap<Monomial, T> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                *terms.entry(m).or_insert_with(T::zero) += *ca * *cb;
            }
        }
        let mut p = Polynomial { vars, terms };
        p.normalize();
        p
    }
}

impl<'a, T: Scalar> Neg for &'a Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Leading (highest) terms first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let cv = c.to_f64().expect("finite");
            if i == 0 {
                if cv < 0.0 {
                    write!(f, "-")?;
                }
            } else if cv < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = cv.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if (a - 1.0).abs() < 1e-12 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Polynomial<f64>;

    fn x() -> P {
        P::var("x")
    }
    fn y() -> P {
        P::var("y")
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let expect = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(p, expect);
    }

    #[test]
    fn additive_identity() {
        let p = &(&x() * &x()) + &P::constant(3.0);
        let q = &p + &P::zero(VarSet::empty());
        assert_eq!(p, q);
    }

    #[test]
    fn scale_term() {
        let p = (&(&x() * &x()) * &y()).scale(2.0);
        assert_eq!(p.to_string(), "2*x^2*y");
    }

    #[test]
    fn derivative_examples() {
        let x2y = &(&x() * &x()) * &y();
        assert_eq!(x2y.differentiate("x").unwrap().to_string(), "2*x*y");

        let c = P::constant(5.0).with_vars(VarSet::new(["x"]).unwrap()).unwrap();
        assert!(c.differentiate("x").unwrap().is_zero());

        let e1 = P::var("e1");
        let e2 = P::var("e2");
        let p = &(&e1 * &e1) + &(&e1 * &e2).scale(3.0);
        let d = p.differentiate("e1").unwrap();
        let expect = &e1.scale(2.0) + &e2.scale(3.0);
        assert_eq!(d, expect);

        assert!(x2y.differentiate("z").is_err());
    }

    #[test]
    fn substitute_binomial() {
        // x^2 with x -> (e + a) gives e^2 + 2ae + a^2.
        let p = &x() * &x();
        let mut bind = BTreeMap::new();
        bind.insert("x".to_string(), &P::var("e") + &P::var("a"));
        let q = p.substitute(&bind);
        let e = P::var("e");
        let a = P::var("a");
        let expect = &(&(&e * &e) + &(&e * &a).scale(2.0)) + &(&a * &a);
        assert_eq!(q, expect);
    }

    #[test]
    fn substitute_identity() {
        let p = &(&x() * &y()).scale(4.0) + &x();
        let mut bind = BTreeMap::new();
        bind.insert("x".to_string(), P::var("x"));
        bind.insert("y".to_string(), P::var("y"));
        assert_eq!(p.substitute(&bind), p);
    }

    #[test]
    fn evaluate_examples() {
        let p = &(&x() * &x()) + &P::constant(1.0);
        let mut pt = BTreeMap::new();
        pt.insert("x".to_string(), 2.0);
        assert_eq!(p.evaluate(&pt).unwrap(), 5.0);

        let z = P::zero(VarSet::new(["x"]).unwrap());
        assert_eq!(z.evaluate(&pt).unwrap(), 0.0);

        // Motzkin polynomial at (1, 1) hits its global minimum of 0.
        let motzkin = motzkin();
        let mut pt = BTreeMap::new();
        pt.insert("x".to_string(), 1.0);
        pt.insert("y".to_string(), 1.0);
        assert!(motzkin.evaluate(&pt).unwrap().abs() < 1e-12);

        let p = &x() + &y();
        let mut partial = BTreeMap::new();
        partial.insert("x".to_string(), 1.0);
        assert!(p.evaluate(&partial).is_err());
    }

    pub fn motzkin() -> P {
        let x4y2 = &(&x() * &x()) * &(&(&x() * &x()) * &(&y() * &y()));
        let x2y4 = &(&x() * &x()) * &(&(&y() * &y()) * &(&y() * &y()));
        let x2y2 = &(&x() * &x()) * &(&y() * &y());
        &(&(&x4y2 + &x2y4) - &x2y2.scale(3.0)) + &P::constant(1.0)
    }

    #[test]
    fn serde_round_trip() {
        let p = &(&x() * &x()).scale(2.5) - &y().scale(0.125);
        let json = serde_json::to_string(&p).unwrap();
        let q: P = serde_json::from_str(&json).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn tiny_coefficients_dropped() {
        let p = &x().scale(1e-15) + &y();
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    #[should_panic(expected = "degree")]
    fn degree_cap_enforced() {
        let mut p = x();
        for _ in 0..5 {
            p = &p * &p; // degree 32 > 20
        }
    }
}

//! Sparse multivariate polynomials over [`ExactScalar`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::scalar::ExactScalar;
use crate::error::{Error, Result};

/// Names with a fixed position in every exponent vector; other names sort after them.
pub const VARIABLE_REGISTRY: &[&str] = &["u", "s", "phi", "y", "z"];

/// Identifiers the text grammar reserves for constants and functions.
pub const RESERVED_NAMES: &[&str] = &["i", "pi", "sqrt"];

fn variable_order(a: &str, b: &str) -> Ordering {
    let rank = |v: &str| VARIABLE_REGISTRY.iter().position(|r| *r == v);
    match (rank(a), rank(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}

type Exponents = Vec<u32>;

/// Polynomial in named variables with exact coefficients.
///
/// Canonical form: variables sorted by registry order, every listed variable
/// occurs in some term, and no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, ExactScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(ExactScalar::one())
    }

    pub fn constant(c: ExactScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Self {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(ExactScalar::one(), &[(name, 1)])
    }

    /// `c · Π name^exp`.
    pub fn monomial(c: ExactScalar, powers: &[(&str, u32)]) -> Self {
        let vars: Vec<String> = powers.iter().map(|(v, _)| v.to_string()).collect();
        let exps: Exponents = powers.iter().map(|(_, e)| *e).collect();
        let mut terms = BTreeMap::new();
        terms.insert(exps, c);
        Self::from_raw(vars, terms)
    }

    /// `Σ_k coeffs[k] · var^k`.
    pub fn univariate(var: &str, coeffs: &[ExactScalar]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (vec![k as u32], c.clone()))
            .collect();
        Self::from_raw(vec![var.to_string()], terms)
    }

    fn from_raw(vars: Vec<String>, terms: BTreeMap<Exponents, ExactScalar>) -> Self {
        let mut merged: BTreeMap<Exponents, ExactScalar> = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let slot = merged.entry(e).or_default();
            *slot += &c;
        }
        merged.retain(|_, c| !c.is_zero());

        let used: Vec<usize> = (0..vars.len())
            .filter(|&i| merged.keys().any(|e| e[i] > 0))
            .collect();
        let mut order = used.clone();
        order.sort_by(|&a, &b| variable_order(&vars[a], &vars[b]));
        // Duplicated names would make the representation ambiguous.
        debug_assert!(order.windows(2).all(|w| vars[w[0]] != vars[w[1]]));

        let new_vars = order.iter().map(|&i| vars[i].clone()).collect();
        let terms = merged
            .into_iter()
            .map(|(e, c)| (order.iter().map(|&i| e[i]).collect(), c))
            .collect();
        Self {
            vars: new_vars,
            terms,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<ExactScalar> {
        if self.is_zero() {
            Some(ExactScalar::zero())
        } else if self.vars.is_empty() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> ExactScalar {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Total degree; `None` is the sentinel for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: &str) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        Some(match self.var_index(var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        })
    }

    pub fn lowest_degree_in(&self, var: &str) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        Some(match self.var_index(var) {
            Some(i) => self.terms.keys().map(|e| e[i]).min().unwrap_or(0),
            None => 0,
        })
    }

    /// Terms in graded-lex order (highest total degree first).
    pub fn terms(&self) -> Vec<(&[u32], &ExactScalar)> {
        let mut out: Vec<(&[u32], &ExactScalar)> =
            self.terms.iter().map(|(e, c)| (e.as_slice(), c)).collect();
        out.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        out
    }

    /// Coefficients of `var^k` as polynomials in the remaining variables, k = 0..=deg.
    pub fn coefficients_in(&self, var: &str) -> Vec<Poly> {
        let Some(idx) = self.var_index(var) else {
            return if self.is_zero() {
                Vec::new()
            } else {
                vec![self.clone()]
            };
        };
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let rest: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.clone())
            .collect();
        let mut buckets: Vec<BTreeMap<Exponents, ExactScalar>> = vec![BTreeMap::new(); deg + 1];
        for (e, c) in &self.terms {
            let k = e[idx] as usize;
            let reduced: Exponents = e
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, x)| *x)
                .collect();
            buckets[k].insert(reduced, c.clone());
        }
        buckets
            .into_iter()
            .map(|t| Self::from_raw(rest.clone(), t))
            .collect()
    }

    /// Scalar coefficients of a polynomial in at most one variable `var`.
    pub fn univariate_coefficients(&self, var: &str) -> Result<Vec<ExactScalar>> {
        self.coefficients_in(var)
            .into_iter()
            .map(|p| {
                p.as_constant().ok_or_else(|| {
                    Error::Internal(format!("expected a polynomial in {var} only, found `{self}`"))
                })
            })
            .collect()
    }

    fn embed(&self, vars: &[String]) -> BTreeMap<Exponents, ExactScalar> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("variable in union"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut full = vec![0u32; vars.len()];
                for (i, &x) in e.iter().enumerate() {
                    full[map[i]] = x;
                }
                (full, c.clone())
            })
            .collect()
    }

    fn union_vars(&self, other: &Poly) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    pub fn scale(&self, c: &ExactScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        Self::from_raw(self.vars.clone(), terms)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces `var` by `value` everywhere.
    pub fn substitute(&self, var: &str, value: &Poly) -> Poly {
        let Some(idx) = self.var_index(var) else {
            return self.clone();
        };
        let max_pow = self.degree_in(var).unwrap_or(0) as usize;
        let mut powers = Vec::with_capacity(max_pow + 1);
        powers.push(Poly::one());
        for k in 1..=max_pow {
            let next = &powers[k - 1] * value;
            powers.push(next);
        }
        let mut rest_vars = self.vars.clone();
        rest_vars.remove(idx);
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest.remove(idx) as usize;
            let mut mono = BTreeMap::new();
            mono.insert(rest, c.clone());
            let mono = Self::from_raw(rest_vars.clone(), mono);
            out = &out + &(&mono * &powers[k]);
        }
        out
    }

    pub fn rename(&self, from: &str, to: &str) -> Poly {
        if from == to || self.var_index(from).is_none() {
            return self.clone();
        }
        self.substitute(from, &Poly::var(to))
    }

    /// Divides by `var^k`; `None` if some term has lower degree in `var`.
    pub fn divide_by_var_power(&self, var: &str, k: u32) -> Option<Poly> {
        if k == 0 || self.is_zero() {
            return Some(self.clone());
        }
        let idx = self.var_index(var)?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[idx] < k {
                return None;
            }
            let mut e = e.clone();
            e[idx] -= k;
            terms.insert(e, c.clone());
        }
        Some(Self::from_raw(self.vars.clone(), terms))
    }

    /// Division with remainder in `var`, whose leading coefficient in `divisor` must be an
    /// invertible constant. The remainder has `var`-degree below that of `divisor`.
    pub fn div_rem_in(&self, var: &str, divisor: &Poly) -> Result<(Poly, Poly)> {
        let d = divisor
            .degree_in(var)
            .ok_or_else(|| Error::NotInvertible("0".into()))?;
        let lead = divisor.coefficients_in(var)[d as usize]
            .as_constant()
            .ok_or_else(|| {
                Error::Internal(format!("leading coefficient of `{divisor}` in {var} is not constant"))
            })?;
        let lead_inv = lead.inv()?;
        let mut quotient = Poly::zero();
        let mut rem = self.clone();
        while let Some(k) = rem.degree_in(var) {
            if k < d || rem.is_zero() {
                break;
            }
            let c = rem.coefficients_in(var)[k as usize].clone();
            let step = &c.scale(&lead_inv) * &Poly::monomial(ExactScalar::one(), &[(var, k - d)]);
            rem = &rem - &(&step * divisor);
            quotient = &quotient + &step;
        }
        Ok((quotient, rem))
    }

    pub fn eval_complex(&self, values: &[(&str, Complex64)]) -> Result<Complex64> {
        let lookup: Vec<Complex64> = self
            .vars
            .iter()
            .map(|v| {
                values
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| *x)
                    .ok_or_else(|| Error::Internal(format!("no value supplied for variable {v}")))
            })
            .collect::<Result<_>>()?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Complex64 = e
                    .iter()
                    .zip(&lookup)
                    .map(|(&k, x)| x.powu(k))
                    .product();
                c.to_complex() * mono
            })
            .sum())
    }

    /// Substitutes exact scalar values for variables; unlisted variables remain symbolic.
    pub fn eval_exact(&self, values: &[(&str, ExactScalar)]) -> Poly {
        values.iter().fold(self.clone(), |p, (v, x)| {
            p.substitute(v, &Poly::constant(x.clone()))
        })
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let vars = self.union_vars(rhs);
        let mut terms = self.embed(&vars);
        for (e, c) in rhs.embed(&vars) {
            let slot = terms.entry(e).or_default();
            *slot += &c;
        }
        Poly::from_raw(vars, terms)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let vars = self.union_vars(rhs);
        let a = self.embed(&vars);
        let b = rhs.embed(&vars);
        let mut terms: BTreeMap<Exponents, ExactScalar> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let slot = terms.entry(e).or_default();
                *slot += &(ca * cb);
            }
        }
        Poly::from_raw(vars, terms)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! forward_by_value {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_by_value!(Add add, Sub sub, Mul mul);

impl From<ExactScalar> for Poly {
    fn from(c: ExactScalar) -> Self {
        Poly::constant(c)
    }
}

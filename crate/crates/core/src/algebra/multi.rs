//! Sparse multivariate integer polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::IntPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("symbolic expansion exceeded {cap} terms")]
pub struct TermCapExceeded {
    pub cap: usize,
}

/// Polynomial in a fixed number of variables, stored as exponent vector -> coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, i, 1)
    }

    pub fn monomial(nvars: usize, i: usize, e: u32) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[i] = e;
        let mut p = Self::zero(nvars);
        p.terms.insert(exps, BigInt::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self, cap: usize) -> Result<Self, TermCapExceeded> {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
            if out.terms.len() > cap {
                return Err(TermCapExceeded { cap });
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32, cap: usize) -> Result<Self, TermCapExceeded> {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self, cap)?;
        }
        Ok(acc)
    }

    /// Substitute `g` for variable `var`.
    pub fn substitute(&self, var: usize, g: &Self, cap: usize) -> Result<Self, TermCapExceeded> {
        assert_eq!(self.nvars, g.nvars);
        // group terms by the exponent of `var` and evaluate by Horner in g
        let maxe = self.degree_in(var);
        let mut slices = vec![Self::zero(self.nvars); maxe as usize + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[var], 0);
            slices[k as usize].add_term(e2, c.clone());
        }
        let mut acc = Self::zero(self.nvars);
        for s in slices.into_iter().rev() {
            acc = acc.mul(g, cap)?.add(&s);
            if acc.terms.len() > cap {
                return Err(TermCapExceeded { cap });
            }
        }
        Ok(acc)
    }

    /// Composition `f(g)` for a univariate integer polynomial `f`.
    pub fn compose_univariate(f: &IntPoly, g: &Self, cap: usize) -> Result<Self, TermCapExceeded> {
        let mut acc = Self::zero(g.nvars);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(g, cap)?.add(&Self::constant(g.nvars, c.clone()));
        }
        Ok(acc)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Largest total degree of a monomial restricted to the variables in `vars`.
    pub fn total_degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|e| vars.iter().map(|&v| e[v]).sum())
            .max()
            .unwrap_or(0)
    }

    /// Evaluate every variable except `keep` at the given integers, giving a univariate polynomial.
    pub fn specialize(&self, values: &[BigInt], keep: usize) -> IntPoly {
        assert_eq!(values.len(), self.nvars);
        let mut coeffs = vec![BigInt::zero(); self.degree_in(keep) as usize + 1];
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if i != keep && k > 0 {
                    t *= num_traits::pow(values[i].clone(), k as usize);
                }
            }
            coeffs[e[keep] as usize] += t;
        }
        IntPoly::new(coeffs)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("v{i}") } else { format!("v{i}^{k}") })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

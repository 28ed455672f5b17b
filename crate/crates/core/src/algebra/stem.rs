//! Stem fields Q[y]/(m(y)) and Trager-style factorization over them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::resultant::resultant_unchecked;
use super::zassenhaus::{factor_over_q, squarefree_decomposition};
use super::{AlgebraError, IntPoly, RatPoly};

/// The field Q(a) with `a` a root of a monic irreducible integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StemField {
    modulus: IntPoly,
}

/// Element of a stem field: a rational polynomial in the generator, reduced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StemElem(RatPoly);

/// Polynomial over a stem field, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LPoly {
    coeffs: Vec<StemElem>,
}

impl StemField {
    /// Certifies that `modulus` is monic and irreducible over Q.
    pub fn new(modulus: IntPoly) -> Result<Self, AlgebraError> {
        if modulus.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        if !modulus.is_monic() || modulus.deg() == 0 {
            return Err(AlgebraError::ReducibleModulus(modulus.to_string()));
        }
        if !factor_over_q(&modulus)?.is_irreducible() {
            return Err(AlgebraError::ReducibleModulus(modulus.to_string()));
        }
        Ok(StemField { modulus })
    }

    pub fn modulus(&self) -> &IntPoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn zero(&self) -> StemElem {
        StemElem(RatPoly::zero())
    }

    pub fn one(&self) -> StemElem {
        StemElem(RatPoly::one())
    }

    pub fn generator(&self) -> StemElem {
        self.reduce(RatPoly::from_int(IntPoly::x()))
    }

    pub fn from_int(&self, c: &BigInt) -> StemElem {
        StemElem(RatPoly::from_int(IntPoly::constant(c.clone())))
    }

    pub fn from_poly(&self, p: &IntPoly) -> StemElem {
        self.reduce(RatPoly::from_int(p.clone()))
    }

    fn reduce(&self, p: RatPoly) -> StemElem {
        StemElem(p.rem_monic(&self.modulus))
    }

    pub fn add(&self, a: &StemElem, b: &StemElem) -> StemElem {
        StemElem(a.0.add(&b.0))
    }

    pub fn sub(&self, a: &StemElem, b: &StemElem) -> StemElem {
        StemElem(a.0.sub(&b.0))
    }

    pub fn neg(&self, a: &StemElem) -> StemElem {
        StemElem(a.0.neg())
    }

    pub fn mul(&self, a: &StemElem, b: &StemElem) -> StemElem {
        self.reduce(a.0.mul(&b.0))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against the modulus.
    pub fn inv(&self, a: &StemElem) -> Option<StemElem> {
        if a.is_zero() {
            return None;
        }
        let m = RatPoly::from_int(self.modulus.clone());
        let (mut r0, mut r1) = (m, a.0.clone());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        // r0 is a nonzero constant because the modulus is irreducible
        if r0.degree() != Some(0) {
            return None;
        }
        let c = r0.to_rationals()[0].recip();
        Some(self.reduce(t0.scale(&c)))
    }

    pub fn poly_from_int(&self, f: &IntPoly) -> LPoly {
        LPoly::new(f.coeffs().iter().map(|c| self.from_int(c)).collect())
    }

    pub fn poly_add(&self, a: &LPoly, b: &LPoly) -> LPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let z = self.zero();
        LPoly::new(
            (0..n)
                .map(|i| self.add(a.coeffs.get(i).unwrap_or(&z), b.coeffs.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn poly_mul(&self, a: &LPoly, b: &LPoly) -> LPoly {
        if a.is_zero() || b.is_zero() {
            return LPoly::zero();
        }
        let mut out = vec![RatPoly::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.0.mul(&y.0));
            }
        }
        LPoly::new(out.into_iter().map(|c| self.reduce(c)).collect())
    }

    pub fn poly_monic(&self, a: &LPoly) -> LPoly {
        match a.coeffs.last() {
            None => a.clone(),
            Some(lc) => {
                let inv = self.inv(lc).expect("nonzero leading coefficient");
                LPoly::new(a.coeffs.iter().map(|c| self.mul(c, &inv)).collect())
            }
        }
    }

    pub fn poly_divrem(&self, a: &LPoly, d: &LPoly) -> (LPoly, LPoly) {
        let dn = d.deg();
        if a.coeffs.len() <= dn {
            return (LPoly::zero(), a.clone());
        }
        let inv = self.inv(d.coeffs.last().unwrap()).expect("nonzero divisor");
        let mut r = a.coeffs.clone();
        let mut q = vec![self.zero(); r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = self.mul(&r[i + dn], &inv);
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = self.sub(&r[i + j], &self.mul(&c, dc));
                }
            }
            q[i] = c;
        }
        r.truncate(dn);
        (LPoly::new(q), LPoly::new(r))
    }

    pub fn poly_derivative(&self, a: &LPoly) -> LPoly {
        LPoly::new(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.mul(c, &self.from_int(&BigInt::from(i))))
                .collect(),
        )
    }

    /// Monic gcd in L[x].
    pub fn poly_gcd(&self, a: &LPoly, b: &LPoly) -> LPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.poly_divrem(&a, &b).1;
            a = std::mem::replace(&mut b, self.poly_monic(&r));
        }
        self.poly_monic(&a)
    }

    /// `f(x + c)` for an integer polynomial `f` and field element `c`.
    pub fn compose_linear(&self, f: &LPoly, c: &StemElem) -> LPoly {
        let lin = LPoly::new(vec![c.clone(), self.one()]);
        let mut acc = LPoly::zero();
        for coef in f.coeffs.iter().rev() {
            acc = self.poly_add(&self.poly_mul(&acc, &lin), &LPoly::new(vec![coef.clone()]));
        }
        acc
    }

    /// Number of roots of a squarefree `f` in this field.
    pub fn count_roots(&self, f: &IntPoly) -> usize {
        let nf = norm_factors(f, &self.modulus);
        nf.factors
            .iter()
            .filter(|r| r.deg() == self.degree())
            .count()
    }
}

impl StemElem {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_ratpoly(&self) -> &RatPoly {
        &self.0
    }

    /// Rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.0.degree() {
            None => Some(BigRational::zero()),
            Some(0) => Some(self.0.to_rationals()[0].clone()),
            _ => None,
        }
    }
}

impl fmt::Display for StemElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.0.numerator().display_var("a");
        if self.0.denominator().is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/{}", self.0.denominator())
        }
    }
}

impl fmt::Debug for StemElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl LPoly {
    pub fn new(mut coeffs: Vec<StemElem>) -> Self {
        while coeffs.last().is_some_and(StemElem::is_zero) {
            coeffs.pop();
        }
        LPoly { coeffs }
    }

    pub fn zero() -> Self {
        LPoly { coeffs: vec![] }
    }

    pub fn coeffs(&self) -> &[StemElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.to_string();
            let is_one = cs == "1";
            match (i, is_one) {
                (0, _) => write!(f, "({cs})")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "({cs})*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "({cs})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LPoly({self})")
    }
}

/// Squarefree norm data for `f` over `Q[y]/(m)`.
#[derive(Clone, Debug)]
pub struct NormFactors {
    /// Shift `s` with `norm(x) = Res_y(m(y), f(x - s*y))` squarefree.
    pub shift: i64,
    pub norm: IntPoly,
    /// Irreducible factors of the norm over Q; a factor of degree `deg m * e`
    /// corresponds to an irreducible factor of degree `e` of `f` over the field.
    pub factors: Vec<IntPoly>,
}

/// `Res_y(m(y), f(x - s*y))` by evaluation at `deg f * deg m + 1` points and interpolation.
fn shifted_norm(f: &IntPoly, m: &IntPoly, s: i64) -> IntPoly {
    let d = f.deg() * m.deg();
    let xs: Vec<BigInt> = (0..=d as i64).map(BigInt::from).collect();
    let ys: Vec<BigInt> = xs
        .iter()
        .map(|x0| {
            let inner = IntPoly::new(vec![x0.clone(), BigInt::from(-s)]);
            let r = f.compose(&inner).rem_monic(m);
            if r.is_zero() {
                BigInt::zero()
            } else {
                resultant_unchecked(m, &r)
            }
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Newton interpolation through `(xs[i], ys[i])` over Q.
fn interpolate_rational(xs: &[BigInt], ys: Vec<BigRational>) -> Vec<BigRational> {
    let n = xs.len();
    let mut dd = ys;
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = BigRational::from_integer(&xs[i] - &xs[i - j]);
            dd[i] = num / den;
        }
    }
    // Horner on the Newton form
    let mut acc: Vec<BigRational> = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![BigRational::zero(); acc.len() + 1];
        let xi = BigRational::from_integer(xs[i].clone());
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xi;
        }
        next[0] += &dd[i];
        acc = next;
    }
    acc
}

fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> IntPoly {
    let acc = interpolate_rational(xs, ys.iter().cloned().map(BigRational::from_integer).collect());
    IntPoly::new(
        acc.into_iter()
            .map(|c| {
                assert!(c.is_integer(), "norm has non-integral coefficient");
                c.to_integer()
            })
            .collect(),
    )
}

/// Primitive integer multiple of `Res_y(m(y), g(x - s*y, y))` for `g` in L[x].
fn lpoly_shifted_norm(g: &LPoly, m: &IntPoly, s: i64) -> IntPoly {
    let d = g.deg() * m.deg();
    let xs: Vec<BigInt> = (0..=d as i64).map(BigInt::from).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|x0| {
            let lin = RatPoly::from_int(IntPoly::new(vec![x0.clone(), BigInt::from(-s)]));
            let mut acc = RatPoly::zero();
            for c in g.coeffs.iter().rev() {
                acc = acc.mul(&lin).add(&c.0).rem_monic(m);
            }
            if acc.is_zero() {
                return BigRational::zero();
            }
            let r = resultant_unchecked(m, acc.numerator());
            BigRational::new(r, num_traits::pow(acc.denominator().clone(), m.deg()))
        })
        .collect();
    let coeffs = interpolate_rational(&xs, ys);
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |a, c| num_integer::Integer::lcm(&a, c.denom()));
    IntPoly::new(coeffs.iter().map(|c| (c * &den).to_integer()).collect()).primitive_part()
}

/// Trager norm step: smallest shift `s = 0, 1, 2, ...` giving a squarefree
/// norm, together with the norm's irreducible factors over Q.
///
/// `f` must be squarefree of positive degree and `m` monic.
pub fn norm_factors(f: &IntPoly, m: &IntPoly) -> NormFactors {
    assert!(f.deg() > 0 && m.is_monic());
    let mut s = 0i64;
    loop {
        // f(x)^deg m is never squarefree once deg m >= 2
        if s == 0 && m.deg() >= 2 {
            s = 1;
            continue;
        }
        let norm = shifted_norm(f, m, s);
        if norm.is_squarefree() {
            let fac = factor_over_q(&norm).expect("norm is nonzero");
            let factors = fac.factors.into_iter().map(|(g, _)| g).collect();
            return NormFactors {
                shift: s,
                norm,
                factors,
            };
        }
        s += 1;
    }
}

/// Factor `f` over the stem field `field`: monic irreducible factors with multiplicities.
pub fn factor_over_stem(f: &IntPoly, field: &StemField) -> Result<Vec<(LPoly, usize)>, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(&f.primitive_part()) {
        let lpart = field.poly_from_int(&part);
        if part.deg() == 1 {
            out.push((field.poly_monic(&lpart), mult));
            continue;
        }
        let nf = norm_factors(&part, field.modulus());
        if nf.factors.len() == 1 {
            out.push((field.poly_monic(&lpart), mult));
            continue;
        }
        let s = field.from_int(&BigInt::from(nf.shift));
        let sa = field.mul(&s, &field.generator());
        // part(x - s a), then gcd with each norm factor, then shift back
        let shifted = field.compose_linear(&lpart, &field.neg(&sa));
        for r in &nf.factors {
            let g = field.poly_gcd(&shifted, &field.poly_from_int(r));
            let h = field.compose_linear(&g, &sa);
            out.push((field.poly_monic(&h), mult));
        }
    }
    out.sort_by_cached_key(|(g, m)| (g.deg(), g.to_string(), *m));
    Ok(out)
}

/// Factor a squarefree polynomial over the stem field. Returns `None` if `g` is not squarefree.
pub fn factor_lpoly(g: &LPoly, field: &StemField) -> Option<Vec<LPoly>> {
    if g.is_zero() {
        return None;
    }
    if g.deg() == 0 {
        return Some(vec![]);
    }
    let g = field.poly_monic(g);
    if field.poly_gcd(&g, &field.poly_derivative(&g)).deg() > 0 {
        return None;
    }
    if g.deg() == 1 {
        return Some(vec![g]);
    }
    let m = field.modulus();
    let mut s = 0i64;
    let norm = loop {
        let n = lpoly_shifted_norm(&g, m, s);
        if n.is_squarefree() {
            break n;
        }
        s += 1;
    };
    let fac = factor_over_q(&norm).expect("norm is nonzero");
    if fac.factors.len() == 1 {
        return Some(vec![g]);
    }
    let sa = field.mul(&field.from_int(&BigInt::from(s)), &field.generator());
    let shifted = field.compose_linear(&g, &field.neg(&sa));
    let mut out: Vec<LPoly> = fac
        .factors
        .iter()
        .map(|(r, _)| {
            let h = field.poly_gcd(&shifted, &field.poly_from_int(r));
            field.poly_monic(&field.compose_linear(&h, &sa))
        })
        .collect();
    out.sort_by_cached_key(|h| (h.deg(), h.to_string()));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn inverse_in_q_sqrt2() {
        let l = StemField::new(p(&[-2, 0, 1])).unwrap();
        let a = l.from_poly(&p(&[1, 1])); // 1 + sqrt2
        let inv = l.inv(&a).unwrap(); // sqrt2 - 1
        assert_eq!(inv, l.from_poly(&p(&[-1, 1])));
        assert_eq!(l.mul(&a, &inv), l.one());
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(StemField::new(p(&[-1, 0, 1])).is_err());
        assert!(StemField::new(p(&[1, 0, 2])).is_err());
    }

    #[test]
    fn norm_of_x2_plus_1_over_gaussian_field() {
        let nf = norm_factors(&p(&[1, 0, 1]), &p(&[1, 0, 1]));
        // s = 1 gives roots {2i, 0, 0, -2i}; s = 2 separates them
        assert_eq!(nf.shift, 2);
        assert!(nf.norm.is_squarefree());
        assert_eq!(nf.norm.deg(), 4);
    }

    fn lift(l: &StemField, f: &IntPoly) -> LPoly {
        l.poly_from_int(f)
    }

    #[test]
    fn adjoined_root_splits_its_polynomial() {
        let l = StemField::new(p(&[1, 0, 1])).unwrap();
        let fac = factor_over_stem(&p(&[1, 0, 1]), &l).unwrap();
        assert_eq!(fac.len(), 2);
        let a = l.generator();
        let mut roots: Vec<StemElem> = fac
            .iter()
            .map(|(g, m)| {
                assert_eq!((g.deg(), *m), (1, 1));
                l.neg(&g.coeffs()[0])
            })
            .collect();
        roots.sort_by_key(|r| r.to_string());
        let mut want = vec![a.clone(), l.neg(&a)];
        want.sort_by_key(|r| r.to_string());
        assert_eq!(roots, want);
    }

    #[test]
    fn quartic_over_q_sqrt2() {
        let l = StemField::new(p(&[-2, 0, 1])).unwrap();
        let f = p(&[-2, 0, 0, 0, 1]);
        let fac = factor_over_stem(&f, &l).unwrap();
        assert_eq!(fac.len(), 2);
        let prod = l.poly_mul(&fac[0].0, &fac[1].0);
        assert_eq!(prod, lift(&l, &f));
        for (g, _) in &fac {
            assert_eq!(g.deg(), 2);
            assert!(g.coeffs()[1].is_zero());
        }
    }

    #[test]
    fn sqrt5_not_in_q_sqrt2() {
        let l = StemField::new(p(&[-2, 0, 1])).unwrap();
        let fac = factor_over_stem(&p(&[-5, 0, 1]), &l).unwrap();
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].0, lift(&l, &p(&[-5, 0, 1])));
        assert_eq!(l.count_roots(&p(&[-8, 0, 1])), 2);
        assert_eq!(l.count_roots(&p(&[-3, 0, 1])), 0);
    }

    #[test]
    fn cube_roots_of_two() {
        let l = StemField::new(p(&[-2, 0, 0, 1])).unwrap();
        let fac = factor_over_stem(&p(&[-2, 0, 0, 1]), &l).unwrap();
        let degs: Vec<usize> = fac.iter().map(|(g, _)| g.deg()).collect();
        assert_eq!(degs, vec![1, 2]);
    }

    #[test]
    fn level_polynomial_is_irreducible() {
        // x^2 - a over Q(a), a^2 = 2
        let l = StemField::new(p(&[-2, 0, 1])).unwrap();
        let g = LPoly::new(vec![l.neg(&l.generator()), l.zero(), l.one()]);
        assert_eq!(factor_lpoly(&g, &l).unwrap().len(), 1);
        // x^2 - 2a^2/4 = x^2 - 1 splits
        let half = l.from_int(&BigInt::from(-1));
        let h = LPoly::new(vec![half, l.zero(), l.one()]);
        assert_eq!(factor_lpoly(&h, &l).unwrap().len(), 2);
        // x^2 - a/2 is irreducible; checks rational coefficients in the norm
        let q = l.mul(&l.generator(), &StemElem(RatPoly::new(IntPoly::from_i64s(&[-1]), BigInt::from(2))));
        let r = LPoly::new(vec![q, l.zero(), l.one()]);
        assert_eq!(factor_lpoly(&r, &l).unwrap().len(), 1);
    }
}

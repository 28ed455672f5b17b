//! Polynomial arithmetic and factorization over prime fields F_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{is_prime, AlgebraError, IntPoly};

/// Polynomial over F_p, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { p, coeffs }
    }

    pub fn from_int(f: &IntPoly, p: u64) -> Self {
        let pb = BigInt::from(p);
        let coeffs = f
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        Self::new(p, coeffs)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    fn one(p: u64) -> Self {
        ModPoly { p, coeffs: vec![1] }
    }

    fn x(p: u64) -> Self {
        ModPoly::new(p, vec![0, 1])
    }

    /// Integer lift with coefficients in `[0, p)`.
    pub fn to_int(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn lc(&self) -> u64 {
        *self.coeffs.last().unwrap()
    }

    pub fn monic(&self) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p);
        self.scale(inv)
    }

    fn scale(&self, c: u64) -> ModPoly {
        ModPoly::new(
            self.p,
            self.coeffs.iter().map(|&a| mulm(a, c, self.p)).collect(),
        )
    }

    pub fn add(&self, o: &ModPoly) -> ModPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let p = self.p;
        ModPoly::new(
            p,
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or(0);
                    let b = o.coeffs.get(i).copied().unwrap_or(0);
                    (a + b) % p
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &ModPoly) -> ModPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let p = self.p;
        ModPoly::new(
            p,
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or(0);
                    let b = o.coeffs.get(i).copied().unwrap_or(0);
                    (a + p - b) % p
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &ModPoly) -> ModPoly {
        if self.is_zero() || o.is_zero() {
            return ModPoly::new(self.p, vec![]);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        ModPoly::new(p, out)
    }

    pub fn divrem(&self, d: &ModPoly) -> (ModPoly, ModPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dn = d.deg();
        if self.coeffs.len() <= dn {
            return (ModPoly::new(p, vec![]), self.clone());
        }
        let inv = inv_mod(d.lc(), p);
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = mulm(r[i + dn], inv, p);
            if c != 0 {
                for (j, &dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mulm(c, dc, p)) % p;
                }
            }
            q[i] = c;
        }
        r.truncate(dn);
        (ModPoly::new(p, q), ModPoly::new(p, r))
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        self.divrem(d).1
    }

    pub fn div(&self, d: &ModPoly) -> ModPoly {
        self.divrem(d).0
    }

    pub fn gcd(&self, o: &ModPoly) -> ModPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &ModPoly) -> (ModPoly, ModPoly, ModPoly) {
        let p = self.p;
        let zero = ModPoly::new(p, vec![]);
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (ModPoly::one(p), zero.clone());
        let (mut t0, mut t1) = (zero, ModPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = inv_mod(r0.lc(), p);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> ModPoly {
        let p = self.p;
        ModPoly::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mulm(c, i as u64 % p, p))
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn powmod(&self, e: &num_bigint::BigUint, m: &ModPoly) -> ModPoly {
        let mut result = ModPoly::one(self.p);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            result = result.mul(&result).rem(m);
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
        }
        result
    }

    fn pow_u64_mod(&self, e: u64, m: &ModPoly) -> ModPoly {
        self.powmod(&num_bigint::BigUint::from(e), m)
    }

    /// Composition `self(inner(x))` over F_p.
    pub fn compose(&self, inner: &ModPoly) -> ModPoly {
        let mut acc = ModPoly::new(self.p, vec![]);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&ModPoly::new(self.p, vec![c]));
        }
        acc
    }

    fn pth_root(&self) -> ModPoly {
        let p = self.p as usize;
        ModPoly::new(
            self.p,
            self.coeffs.iter().step_by(p).copied().collect(),
        )
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.to_int(), self.p)
    }
}

impl fmt::Debug for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModPoly({self})")
    }
}

pub(crate) fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(p as i128));
    debug_assert_eq!(e.gcd, 1, "{a} not invertible mod {p}");
    e.x.rem_euclid(p as i128) as u64
}

/// Squarefree decomposition of a monic polynomial over F_p.
pub fn squarefree_mod_p(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let p = f.p as usize;
    let mut out = Vec::new();
    let c = f.gcd(&f.derivative());
    let mut w = f.div(&c);
    let mut c = c;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div(&w);
        i += 1;
    }
    if !c.is_one() {
        let root = c.pth_root();
        for (g, j) in squarefree_mod_p(&root) {
            out.push((g, j * p));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial:
/// pairs `(product of all irreducible factors of degree d, d)`.
pub fn distinct_degree(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = ModPoly::x(p);
    let mut h = x.clone();
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.pow_u64_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let dd = rest.deg();
        out.push((rest, dd));
    }
    out
}

/// Splits a product of distinct irreducible degree-`d` factors into those factors.
pub fn equal_degree(f: &ModPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p;
    loop {
        let a = ModPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(nd-1)) restricted to degree d
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // norm a^(1 + p + ... + p^(d-1)), then the quadratic character
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.pow_u64_mod(p, f);
                acc = acc.mul(&t).rem(f);
            }
            acc.pow_u64_mod((p - 1) / 2, f)
                .sub(&ModPoly::one(p))
        };
        let g = b.gcd(f);
        if g.deg() > 0 && g.deg() < n {
            let mut left = equal_degree(&g, d, rng);
            left.extend(equal_degree(&f.div(&g), d, rng));
            return left;
        }
    }
}

/// Irreducible factors of a squarefree monic polynomial, sorted.
pub(crate) fn factor_squarefree_monic(f: &ModPoly, seed: u64) -> Vec<ModPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ f.p);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f) {
        out.extend(equal_degree(&g, d, &mut rng));
    }
    out.sort_by(|a, b| (a.deg(), &a.coeffs).cmp(&(b.deg(), &b.coeffs)));
    out
}

/// Factorization of `f mod p` into monic irreducibles with multiplicities.
pub fn factor_mod_p(f: &IntPoly, p: u64) -> Result<Vec<(ModPoly, usize)>, AlgebraError> {
    if !is_prime(p) || p >= 1 << 31 {
        return Err(AlgebraError::NotPrime(p));
    }
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let fp = ModPoly::from_int(f, p);
    if fp.deg() != f.deg() {
        return Err(AlgebraError::LeadingCoeffVanishes(p));
    }
    let fp = fp.monic();
    let mut out = Vec::new();
    for (g, m) in squarefree_mod_p(&fp) {
        for h in factor_squarefree_monic(&g, 0x5eed) {
            out.push((h, m));
        }
    }
    out.sort_by(|a, b| {
        (a.0.deg(), &a.0.coeffs, a.1).cmp(&(b.0.deg(), &b.0.coeffs, b.1))
    });
    Ok(out)
}

/// Sorted (descending) multiset of factor degrees of a polynomial that is
/// squarefree mod `p`; `None` when `p` divides the leading coefficient or
/// the reduction is not squarefree.
pub fn degree_pattern(f: &IntPoly, p: u64) -> Option<Vec<usize>> {
    let fp = ModPoly::from_int(f, p);
    if fp.deg() != f.deg() || fp.is_zero() {
        return None;
    }
    let fp = fp.monic();
    if fp.deg() == 0 {
        return Some(vec![]);
    }
    if !fp.gcd(&fp.derivative()).is_one() {
        return None;
    }
    let mut degs: Vec<usize> = factor_squarefree_monic(&fp, 0x5eed)
        .iter()
        .map(ModPoly::deg)
        .collect();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    Some(degs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degs(f: &IntPoly, p: u64) -> Vec<usize> {
        let mut d: Vec<usize> = factor_mod_p(f, p)
            .unwrap()
            .iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.deg(), *m))
            .collect();
        d.sort_unstable();
        d
    }

    #[test]
    fn x2_minus_1_mod_5() {
        let f = IntPoly::from_i64s(&[-1, 0, 1]);
        let fac = factor_mod_p(&f, 5).unwrap();
        assert_eq!(fac.len(), 2);
        assert_eq!(fac[0].0.coeffs(), &[1, 1]); // x + 1
        assert_eq!(fac[1].0.coeffs(), &[4, 1]); // x - 1
        assert!(fac.iter().all(|(_, m)| *m == 1));
    }

    #[test]
    fn x4_minus_2_patterns() {
        let f = IntPoly::from_i64s(&[-2, 0, 0, 0, 1]);
        assert_eq!(degs(&f, 7), vec![1, 1, 2]);
        assert_eq!(degs(&f, 3), vec![2, 2]);
        // x^4 - 2 = x^4 mod 2
        let fac = factor_mod_p(&f, 2).unwrap();
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].1, 4);
    }

    #[test]
    fn errors() {
        let f = IntPoly::from_i64s(&[1, 0, 3]);
        assert!(matches!(factor_mod_p(&f, 4), Err(AlgebraError::NotPrime(4))));
        assert!(matches!(
            factor_mod_p(&f, 3),
            Err(AlgebraError::LeadingCoeffVanishes(3))
        ));
    }

    #[test]
    fn multiplicities_and_char_p_powers() {
        // (x+1)^2 (x+2)^5 over F_5 : (x+2)^5 = x^5 + 2 has zero derivative part
        let a = IntPoly::from_i64s(&[1, 1]);
        let b = IntPoly::from_i64s(&[2, 1]);
        let f = &a.pow(2) * &b.pow(5);
        let fac = factor_mod_p(&f, 5).unwrap();
        assert_eq!(fac.len(), 2);
        assert_eq!(fac[0], (ModPoly::new(5, vec![1, 1]), 2));
        assert_eq!(fac[1], (ModPoly::new(5, vec![2, 1]), 5));
    }

    #[test]
    fn product_reconstructs_input_mod_p() {
        let f = IntPoly::from_i64s(&[3, -7, 0, 11, 5, 0, 2, 1]);
        for p in [2u64, 3, 7, 13, 101] {
            let fac = factor_mod_p(&f, p).unwrap();
            let mut prod = ModPoly::new(p, vec![1]);
            for (g, m) in &fac {
                for _ in 0..*m {
                    prod = prod.mul(g);
                }
            }
            assert_eq!(prod, ModPoly::from_int(&f, p).monic());
        }
    }
}

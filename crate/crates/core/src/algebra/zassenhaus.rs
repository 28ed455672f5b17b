//! Factorization over Q: squarefree decomposition, modular factorization at a
//! good prime, quadratic Hensel lifting past the Mignotte bound, and
//! subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp::{self, ModPoly};
use super::{next_prime, AlgebraError, IntPoly};

/// `unit * prod(factor^mult)`; factors primitive, irreducible, positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: BigInt,
    pub factors: Vec<(IntPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPoly {
        let mut acc = IntPoly::constant(self.unit.clone());
        for (g, m) in &self.factors {
            acc = &acc * &g.pow(*m);
        }
        acc
    }

    /// True when the input was a single irreducible factor (up to a constant).
    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// Degrees of the factors counted with multiplicity, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.deg(), *m))
            .collect();
        d.sort_unstable();
        d
    }
}

/// Factor a nonzero integer polynomial into irreducibles over Q.
pub fn factor_over_q(f: &IntPoly) -> Result<Factorization, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if f.deg() == 0 {
        return Ok(Factorization {
            unit: f.coeff(0),
            factors: vec![],
        });
    }
    let mut unit = f.content();
    if f.leading().unwrap().is_negative() {
        unit = -unit;
    }
    let prim = f.div_scalar(&unit);
    let mut factors = Vec::new();
    for (part, m) in squarefree_decomposition(&prim) {
        for g in factor_squarefree(&part) {
            factors.push((g, m));
        }
    }
    factors.sort_by(|a, b| (a.0.deg(), a.0.coeffs(), a.1).cmp(&(b.0.deg(), b.0.coeffs(), b.1)));
    Ok(Factorization { unit, factors })
}

/// Yun's algorithm over Z for a primitive polynomial: `f = prod a_i^i`.
pub fn squarefree_decomposition(f: &IntPoly) -> Vec<(IntPoly, usize)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let a = f.primitive_part();
    let da = a.derivative();
    let b = a.gcd(&da);
    let mut c = a.div_exact(&b).expect("gcd divides");
    let mut d = &da.div_exact(&b).expect("gcd divides derivative") - &c.derivative();
    let mut i = 1;
    while c.deg() > 0 {
        let ai = c.gcd(&d);
        c = c.div_exact(&ai).expect("gcd divides");
        d = &d.div_exact(&ai).expect("gcd divides") - &c.derivative();
        if ai.deg() > 0 {
            out.push((ai, i));
        }
        i += 1;
    }
    out
}

/// Subset sums of a degree pattern, as a bitmask over `0..=n`.
fn subset_sums(pattern: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in pattern {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

const CANDIDATE_PRIMES: usize = 5;

/// Irreducible factors of a primitive squarefree polynomial of positive degree.
pub(crate) fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.primitive_part()];
    }
    let lc = f.leading().unwrap().clone();
    let mut feasible = vec![true; n + 1];
    let mut best: Option<(u64, usize)> = None;
    let mut p = next_prime(2 * n as u64);
    let mut tried = 0;
    while tried < CANDIDATE_PRIMES {
        let cur = p;
        p = next_prime(p);
        if (&lc % BigInt::from(cur)).is_zero() {
            continue;
        }
        let fp = ModPoly::from_int(f, cur).monic();
        if !fp.gcd(&fp.derivative()).is_one() {
            continue;
        }
        tried += 1;
        let pattern: Vec<usize> = modp::distinct_degree(&fp)
            .into_iter()
            .flat_map(|(g, d)| std::iter::repeat_n(d, g.deg() / d))
            .collect();
        if pattern.len() == 1 {
            return vec![f.primitive_part()];
        }
        let sums = subset_sums(&pattern, n);
        for (fe, s) in feasible.iter_mut().zip(&sums) {
            *fe &= *s;
        }
        if !(1..n).any(|d| feasible[d]) {
            return vec![f.primitive_part()];
        }
        if best.is_none_or(|(_, c)| pattern.len() < c) {
            best = Some((cur, pattern.len()));
        }
    }
    let (p, _) = best.expect("a good prime exists");
    let fp = ModPoly::from_int(f, p).monic();
    let modular = modp::factor_squarefree_monic(&fp, 0x2a);

    // Mignotte: every integer factor has coefficients bounded by 2^n |f|_2.
    let norm2 = f
        .coeffs()
        .iter()
        .map(|c| c * c)
        .fold(BigInt::zero(), |a, b| a + b)
        .sqrt()
        + BigInt::one();
    let bound = (BigInt::one() << n) * norm2 * lc.abs() * BigInt::from(2);
    let pb = BigInt::from(p);
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
    }
    let lifted = multilift(f, &lc, &modular, &pk);
    recombine(f, lifted, &pk, &feasible)
}

fn reduce(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(f: &IntPoly, m: &BigInt) -> IntPoly {
    let half: BigInt = m >> 1;
    IntPoly::new(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Division by a polynomial monic modulo `m`.
fn divrem_mod(a: &IntPoly, h: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
    let h = reduce(h, m);
    debug_assert!(h.is_monic());
    let (q, r) = reduce(a, m).divrem_monic(&h);
    (reduce(&q, m), reduce(&r, m))
}

fn inv_mod_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// One two-factor lift: from `f = g h (mod p)` to `f = g h (mod target)`.
fn lift_pair(
    f: &IntPoly,
    g0: &ModPoly,
    h0: &ModPoly,
    target: &BigInt,
) -> (IntPoly, IntPoly) {
    let (one, s0, t0) = g0.xgcd(h0);
    debug_assert!(one.is_one());
    let mut m = BigInt::from(g0.modulus());
    let (mut g, mut h) = (g0.to_int(), h0.to_int());
    let (mut s, mut t) = (s0.to_int(), t0.to_int());
    while &m < target {
        let m2 = &m * &m;
        let e = reduce(&(f - &(&g * &h)), &m2);
        let (q, r) = divrem_mod(&(&s * &e), &h, &m2);
        let g1 = reduce(&(&(&g + &(&t * &e)) + &(&q * &g)), &m2);
        let h1 = reduce(&(&h + &r), &m2);
        let b = reduce(&(&(&(&s * &g1) + &(&t * &h1)) - &IntPoly::one()), &m2);
        let (c, d) = divrem_mod(&(&s * &b), &h1, &m2);
        s = reduce(&(&s - &d), &m2);
        t = reduce(&(&(&t - &(&t * &b)) - &(&c * &g1)), &m2);
        g = g1;
        h = h1;
        m = m2;
    }
    (reduce(&g, target), reduce(&h, target))
}

/// Lifts monic modular factors of `f` (with `f = lc * prod factors mod p`) to monic factors mod `pk`.
fn multilift(f: &IntPoly, lc: &BigInt, factors: &[ModPoly], pk: &BigInt) -> Vec<IntPoly> {
    if factors.len() == 1 {
        let inv = inv_mod_big(lc, pk);
        return vec![reduce(&f.scale(&inv), pk)];
    }
    let p = factors[0].modulus();
    let k = factors.len() / 2;
    let lcp = ModPoly::from_int(&IntPoly::constant(lc.clone()), p);
    let g0 = factors[..k].iter().fold(lcp, |acc, x| acc.mul(x));
    let h0 = factors[k..]
        .iter()
        .fold(ModPoly::new(p, vec![1]), |acc, x| acc.mul(x));
    let (g, h) = lift_pair(f, &g0, &h0, pk);
    let mut out = multilift(&g, lc, &factors[..k], pk);
    out.extend(multilift(&h, &BigInt::one(), &factors[k..], pk));
    out
}

/// Index subsets of `0..n` of size `k` in lexicographic order.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

fn recombine(f: &IntPoly, mut lifted: Vec<IntPoly>, pk: &BigInt, feasible: &[bool]) -> Vec<IntPoly> {
    let mut rest = f.primitive_part();
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= lifted.len() {
        let lc = rest.leading().unwrap().clone();
        let tail = &lc * rest.coeff(0);
        for subset in combinations(lifted.len(), size) {
            let d: usize = subset.iter().map(|&i| lifted[i].deg()).sum();
            if !feasible[d] {
                continue;
            }
            // constant-term test before the full product
            let c0 = subset
                .iter()
                .fold(lc.clone(), |acc, &i| (acc * lifted[i].coeff(0)).mod_floor(pk));
            let half: BigInt = pk >> 1;
            let c0 = if c0 > half { c0 - pk } else { c0 };
            if !c0.is_zero() && !(&tail % &c0).is_zero() {
                continue;
            }
            if c0.is_zero() && !tail.is_zero() {
                continue;
            }
            let cand = subset.iter().fold(IntPoly::constant(lc.clone()), |acc, &i| {
                reduce(&(&acc * &lifted[i]), pk)
            });
            let cand = symmetric(&cand, pk).primitive_part();
            if let Some(q) = rest.div_exact(&cand) {
                found.push(cand);
                rest = q;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                continue 'outer;
            }
        }
        size += 1;
    }
    if rest.deg() > 0 {
        found.push(rest.primitive_part());
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn factors_of(f: &IntPoly) -> Vec<IntPoly> {
        factor_over_q(f)
            .unwrap()
            .factors
            .into_iter()
            .map(|(g, _)| g)
            .collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(factors_of(&p(&[-1, 0, 1])), vec![p(&[-1, 1]), p(&[1, 1])]);
        assert_eq!(
            factors_of(&p(&[-4, 0, 0, 0, 1])),
            vec![p(&[-2, 0, 1]), p(&[2, 0, 1])]
        );
        assert_eq!(
            factors_of(&p(&[4, 0, 0, 0, 1])),
            vec![p(&[2, -2, 1]), p(&[2, 2, 1])]
        );
    }

    #[test]
    fn content_and_multiplicity() {
        // -6 (x - 1)^2 (x^2 + 1)
        let f = &(&p(&[-1, 1]).pow(2) * &p(&[1, 0, 1])).scale(&BigInt::from(-6));
        let fac = factor_over_q(f).unwrap();
        assert_eq!(fac.unit, BigInt::from(-6));
        assert_eq!(fac.factors, vec![(p(&[-1, 1]), 2), (p(&[1, 0, 1]), 1)]);
        assert_eq!(&fac.expand(), f);
    }

    #[test]
    fn zero_rejected_constant_is_unit() {
        assert!(matches!(
            factor_over_q(&IntPoly::zero()),
            Err(AlgebraError::ZeroPolynomial)
        ));
        let c = factor_over_q(&p(&[-7])).unwrap();
        assert_eq!(c.unit, BigInt::from(-7));
        assert!(c.factors.is_empty());
    }

    #[test]
    fn swinnerton_dyer_like_needs_recombination() {
        // x^4 - 10x^2 + 1 is irreducible but splits into quadratics mod every prime
        let f = p(&[1, 0, -10, 0, 1]);
        assert!(factor_over_q(&f).unwrap().is_irreducible());
        // (x^4 - 10 x^2 + 1)(x^2 - 3)
        let g = &f * &p(&[-3, 0, 1]);
        assert_eq!(factors_of(&g), vec![p(&[-3, 0, 1]), f]);
    }

    #[test]
    fn non_monic_factors() {
        let a = p(&[3, 0, 5]);
        let b = p(&[-1, 7, 0, 2]);
        let c = p(&[2, -3]);
        let f = &(&a * &b) * &c;
        let fac = factor_over_q(&f).unwrap();
        assert_eq!(fac.expand(), f);
        assert_eq!(fac.factors.len(), 3);
    }

    #[test]
    fn combinations_enumerate_all() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(combinations(3, 0).count(), 1);
    }
}

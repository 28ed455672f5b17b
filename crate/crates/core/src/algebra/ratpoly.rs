//! Polynomials over Q in common-denominator form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntPoly;

/// `num / den` with `den > 0` and `gcd(content(num), den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    num: IntPoly,
    den: BigInt,
}

impl RatPoly {
    pub fn new(num: IntPoly, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() {
            (-&num, -den)
        } else {
            (num, den)
        };
        let g = num.content().gcd(&den);
        if g.is_one() || g.is_zero() {
            let den = if num.is_zero() { BigInt::one() } else { den };
            return RatPoly { num, den };
        }
        RatPoly {
            num: num.div_scalar(&g),
            den: den / g,
        }
    }

    pub fn from_int(p: IntPoly) -> Self {
        RatPoly {
            num: p,
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(IntPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_int(IntPoly::one())
    }

    pub fn from_rationals(c: &[BigRational]) -> Self {
        let den = c
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = c
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        RatPoly::new(IntPoly::new(num), den)
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.num
            .coeffs()
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.num.degree()
    }

    /// Integer polynomial if the denominator is 1.
    pub fn to_int(&self) -> Option<IntPoly> {
        self.den.is_one().then(|| self.num.clone())
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let l = self.den.lcm(&o.den);
        let a = self.num.scale(&(&l / &self.den));
        let b = o.num.scale(&(&l / &o.den));
        RatPoly::new(&a + &b, l)
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        RatPoly::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn scale(&self, q: &BigRational) -> RatPoly {
        RatPoly::new(self.num.scale(q.numer()), &self.den * q.denom())
    }

    /// Remainder modulo a monic integer polynomial.
    pub fn rem_monic(&self, m: &IntPoly) -> RatPoly {
        RatPoly::new(self.num.rem_monic(m), self.den.clone())
    }

    /// Euclidean division over Q.
    pub fn divrem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = d.to_rationals();
        let dn = dd.len() - 1;
        let inv_lc = dd[dn].recip();
        let mut r = self.to_rationals();
        if r.len() <= dn {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = &r[i + dn] * &inv_lc;
            if !c.is_zero() {
                for (j, dc) in dd.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dn);
        (RatPoly::from_rationals(&q), RatPoly::from_rationals(&r))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.num.coeffs().iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc / BigRational::from_integer(self.den.clone())
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

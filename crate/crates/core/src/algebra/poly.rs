//! Dense univariate polynomials over the integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

/// Dense polynomial with integer coefficients, constant term first.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector and `coeffs.last()` is the leading
/// coefficient of any nonzero polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^n`
    pub fn monomial(c: BigInt, n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and normalizes the leading coefficient to be positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        self.div_scalar(&c)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_scalar(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a / c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn pow(&self, n: usize) -> IntPoly {
        let mut result = IntPoly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Functional composition `self(inner(x))`.
    pub fn compose(&self, inner: &IntPoly) -> IntPoly {
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &IntPoly::constant(c.clone());
        }
        acc
    }

    /// `self(x + t)`
    pub fn shift(&self, t: &BigInt) -> IntPoly {
        // Horner-style Taylor shift.
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let add = &c[j + 1] * t;
                c[j] += add;
            }
        }
        IntPoly::new(c)
    }

    /// `(-1)^deg * self(-x)`, which keeps a monic polynomial monic.
    pub fn reflect(&self) -> IntPoly {
        let n = self.deg();
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if (n - i) % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Division by a monic divisor; exact over the integers.
    pub fn divrem_monic(&self, d: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(d.is_monic(), "divrem_monic needs a monic divisor");
        let dn = d.deg();
        if self.coeffs.len() <= dn {
            return (IntPoly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = std::mem::take(&mut r[i + dn]);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs[..dn].iter().enumerate() {
                r[i + j] -= &c * dc;
            }
            q[i] = c;
        }
        r.truncate(dn);
        (IntPoly::new(q), IntPoly::new(r))
    }

    pub fn rem_monic(&self, d: &IntPoly) -> IntPoly {
        self.divrem_monic(d).1
    }

    /// Pseudo-remainder: `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dn = d.deg();
        if self.coeffs.len() <= dn {
            return self.clone();
        }
        let lc = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        let steps = r.len() - dn;
        for i in (0..steps).rev() {
            let c = r[i + dn].clone();
            for x in r.iter_mut().take(i + dn + 1) {
                *x *= &lc;
            }
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            debug_assert!(r[i + dn].is_zero());
        }
        r.truncate(dn);
        IntPoly::new(r)
    }

    /// Exact quotient over the integers, `None` if `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dn = d.deg();
        if self.deg() < dn {
            return None;
        }
        let lc = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = &r[i + dn];
            if c.is_zero() {
                continue;
            }
            let (qc, rem) = c.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &qc * dc;
            }
            q[i] = qc;
        }
        if r.iter().all(Zero::is_zero) {
            Some(IntPoly::new(q))
        } else {
            None
        }
    }

    /// Monic gcd over Q, returned as a primitive integer polynomial with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let (mut a, mut b) = if self.deg() >= other.deg() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    /// Canonical ASCII form `c0,c1,...,cn`.
    pub fn to_csv(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Sup norm of the coefficient vector.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Coefficient list as `i64`, if every coefficient fits.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl FromStr for IntPoly {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| AlgebraError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl IntPoly {
    /// Human-readable form in the given variable name.
    pub fn display_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                out.push_str(&a.to_string());
            }
            let sep = if show_coeff { "*" } else { "" };
            match i {
                0 => {}
                1 => out.push_str(&format!("{sep}{var}")),
                _ => out.push_str(&format!("{sep}{var}^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_var("x"))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => out.push(a + b),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        IntPoly::new(out)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;

    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;

    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn compose_examples() {
        // f = x^2 - 2, g = x^2
        assert_eq!(p(&[-2, 0, 1]).compose(&p(&[0, 0, 1])), p(&[-2, 0, 0, 0, 1]));
        // f = x^2 + 3x + 1, g = x^2 - 2
        assert_eq!(p(&[1, 3, 1]).compose(&p(&[-2, 0, 1])), p(&[-1, 0, -1, 0, 1]));
        let g = p(&[7, -3, 0, 2]);
        assert_eq!(IntPoly::x().compose(&g), g);
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(IntPoly::zero().degree(), None);
    }

    #[test]
    fn csv_round_trip() {
        let f = p(&[-2, 0, 0, 0, 1]);
        assert_eq!(f.to_csv(), "-2,0,0,0,1");
        assert_eq!("-2,0,0,0,1".parse::<IntPoly>().unwrap(), f);
        assert!("1,x".parse::<IntPoly>().is_err());
    }

    #[test]
    fn shift_and_reflect() {
        let f = p(&[1, 3, 1]);
        // f(x+1) = x^2 + 5x + 5
        assert_eq!(f.shift(&BigInt::from(1)), p(&[5, 5, 1]));
        assert_eq!(f.reflect(), p(&[1, -3, 1]));
        assert_eq!(p(&[0, 1]).reflect(), p(&[0, 1]));
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.div_exact(&b), Some(p(&[-1, 1])));
        assert_eq!(p(&[1, 0, 1]).div_exact(&b), None);
        assert_eq!(a.gcd(&p(&[1, 2, 1])), p(&[1, 1]));
        assert!(p(&[1, 0, 1]).gcd(&p(&[0, 1])).is_one());
        let (q, r) = p(&[3, 0, 0, 1]).divrem_monic(&p(&[1, 1]));
        assert_eq!(q, p(&[1, -1, 1]));
        assert_eq!(r, p(&[2]));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[-2, 0, 0, 0, 1]).to_string(), "x^4 - 2");
        assert_eq!(p(&[1, -3, 2]).to_string(), "2*x^2 - 3*x + 1");
    }
}

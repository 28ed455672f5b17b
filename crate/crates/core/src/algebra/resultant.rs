//! Resultants and discriminants via the subresultant PRS.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{AlgebraError, IntPoly};

fn pow(b: &BigInt, e: usize) -> BigInt {
    b.pow(e as u32)
}

/// `Res(f, g)` for nonzero integer polynomials.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> Result<BigInt, AlgebraError> {
    if f.is_zero() || g.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    Ok(resultant_unchecked(f, g))
}

pub(crate) fn resultant_unchecked(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut sign = BigInt::one();
    if a.deg() < b.deg() {
        std::mem::swap(&mut a, &mut b);
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            sign = -sign;
        }
    }
    if b.deg() == 0 {
        return sign * pow(b.leading().unwrap(), a.deg());
    }
    let ca = a.content();
    let cb = b.content();
    let t = pow(&ca, b.deg()) * pow(&cb, a.deg());
    a = a.div_scalar(&ca);
    b = b.div_scalar(&cb);
    let mut g_ = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = a.deg() - b.deg();
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            sign = -sign;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_zero() {
            return BigInt::zero();
        }
        let divisor = &g_ * pow(&h, delta);
        b = r.div_scalar(&divisor);
        g_ = a.leading().unwrap().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            pow(&g_, delta) / pow(&h, delta - 1)
        };
        if b.deg() == 0 {
            let da = a.deg();
            let lb = b.leading().unwrap();
            let hh = if da == 0 {
                h
            } else {
                pow(lb, da) / pow(&h, da - 1)
            };
            return sign * t * hh;
        }
    }
}

/// `disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPoly) -> Result<BigInt, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let n = f.deg();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let r = resultant_unchecked(f, &f.derivative());
    let d = r / f.leading().unwrap();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn quadratic_and_cubic_discriminants() {
        assert_eq!(discriminant(&p(&[1, 3, 1])).unwrap(), BigInt::from(5));
        assert_eq!(discriminant(&p(&[-1, -1, 0, 1])).unwrap(), BigInt::from(-23));
        assert_eq!(discriminant(&p(&[-2, 0, 0, 0, 1])).unwrap(), BigInt::from(-2048));
        assert_eq!(discriminant(&p(&[1, 0, 0, 0, 1])).unwrap(), BigInt::from(256));
    }

    #[test]
    fn resultant_of_common_root_vanishes() {
        assert!(resultant(&p(&[-1, 0, 1]), &p(&[1, 1])).unwrap().is_zero());
        assert_eq!(resultant(&p(&[-2, 0, 1]), &p(&[0, 1])).unwrap(), BigInt::from(-2));
        assert!(matches!(
            resultant(&IntPoly::zero(), &p(&[1])),
            Err(AlgebraError::ZeroPolynomial)
        ));
    }
}

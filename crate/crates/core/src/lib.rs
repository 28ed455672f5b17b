//! Iterated wreath-composite polynomials, their Galois groups, and desk-scale
//! experiments on counting number fields with iterated wreath product groups.

pub mod algebra;
pub mod cli;
pub mod composer;
pub mod config;
pub mod galois;
pub mod harness;
pub mod heights;
pub mod selftest;
pub mod wreath;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Rationals serialize as "p/q", integers as "p".
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses "p/q" or "p".
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

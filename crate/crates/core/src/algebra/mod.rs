//! Exact arithmetic: integer and rational polynomials, resultants, and
//! factorization over F_p, Q and simple algebraic extensions of Q.

mod modp;
mod multi;
mod poly;
mod ratpoly;
mod resultant;
mod stem;
mod zassenhaus;

pub use modp::{degree_pattern, factor_mod_p, ModPoly};
pub use multi::{MultiPoly, TermCapExceeded};
pub use poly::IntPoly;
pub use ratpoly::RatPoly;
pub use resultant::{discriminant, resultant};
pub use stem::{factor_lpoly, factor_over_stem, norm_factors, LPoly, NormFactors, StemElem, StemField};
pub use zassenhaus::{factor_over_q, squarefree_decomposition, Factorization};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("leading coefficient vanishes modulo {0}")]
    LeadingCoeffVanishes(u64),
    #[error("stem field modulus must be monic and irreducible over Q: {0}")]
    ReducibleModulus(String),
    #[error("cannot parse polynomial from {0:?}")]
    Parse(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modp::pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = modp::mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Ascending primes starting at `from` (inclusive).
pub fn primes_from(from: u64) -> impl Iterator<Item = u64> {
    let start = if is_prime(from) { from } else { next_prime(from) };
    std::iter::successors(Some(start), |&p| Some(next_prime(p)))
}

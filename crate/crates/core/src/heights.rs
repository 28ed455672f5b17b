//! Heights of monic integer polynomials, coefficient boxes, and the exponent formulas.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::IntPoly;
use crate::composer::{CompositeTower, Specialization};
use crate::wreath::Shape;

pub const DEFAULT_BOX_CAP: u128 = 250_000_000;
pub const ROOT_EPS: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("root finding did not converge for {0}")]
    RootFindFailure(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("box has {count} points, above the cap {cap}")]
    CapExceeded { count: BigInt, cap: u128 },
    #[error("Y must be positive, got {0}")]
    InvalidY(f64),
}

/// ||f|| = max_i |a_i|^{1/i} for f = x^n + a_1 x^{n-1} + ... + a_n.
#[derive(Clone, Debug, PartialEq)]
pub struct Height {
    pub value: f64,
    /// (|a_i|, i) attaining the maximum; `None` for x^n.
    pub witness: Option<(BigInt, usize)>,
}

impl Height {
    /// Exact comparison of |a|^{1/i} against |b|^{1/j} via |a|^j against |b|^i.
    pub fn cmp_exact(&self, other: &Height) -> Ordering {
        match (&self.witness, &other.witness) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((a, i)), Some((b, j))) => num_traits::pow(a.clone(), *j).cmp(&num_traits::pow(b.clone(), *i)),
        }
    }
}

fn root_abs(c: &BigInt, i: usize) -> f64 {
    let f = c.abs().to_f64().unwrap_or(f64::INFINITY);
    f.powf(1.0 / i as f64)
}

pub fn poly_height(f: &IntPoly) -> Result<Height, HeightError> {
    if !f.is_monic() {
        return Err(HeightError::NotMonic);
    }
    let n = f.deg();
    let mut best: Option<(BigInt, usize)> = None;
    for i in 1..=n {
        let a = f.coeff(n - i).abs();
        if a.is_zero() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, j)) => num_traits::pow(a.clone(), *j) > num_traits::pow(b.clone(), i),
        };
        if better {
            best = Some((a, i));
        }
    }
    let value = best.as_ref().map_or(0.0, |(a, i)| root_abs(a, *i));
    Ok(Height { value, witness: best })
}

/// All complex roots by Aberth–Ehrlich iteration in double precision.
pub fn complex_roots(f: &IntPoly) -> Result<Vec<Complex64>, HeightError> {
    let n = f.deg();
    if n == 0 {
        return Ok(vec![]);
    }
    let lc = f.leading().unwrap().to_f64().unwrap();
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap() / lc).collect();
    // strip roots at zero
    let zeros = c.iter().take_while(|x| **x == 0.0).count();
    let c = &c[zeros..];
    let m = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if m == 0 {
        return Ok(roots);
    }
    let radius = (0..m)
        .map(|i| c[i].abs().powf(1.0 / (m - i) as f64))
        .fold(1e-3, f64::max);
    let mut z: Vec<Complex64> = (0..m)
        .map(|i| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / m as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for &a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
            scale = scale * x.norm() + a.abs();
        }
        (p, dp, scale)
    };
    let mut converged = vec![false; m];
    for _ in 0..2000 {
        for i in 0..m {
            if converged[i] {
                continue;
            }
            let (p, dp, scale) = eval(z[i]);
            if p.norm() <= 4.0 * f64::EPSILON * scale {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..m).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            if w.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&b| b) {
            roots.extend(z);
            return Ok(roots);
        }
    }
    Err(HeightError::RootFindFailure(f.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct RootBoundCheck {
    pub max_modulus: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Checks that every complex root z of the monic `f` has |z| ≤ 2||f||.
pub fn root_bound_check(f: &IntPoly) -> Result<RootBoundCheck, HeightError> {
    let h = poly_height(f)?;
    if f.deg() == 0 {
        return Err(HeightError::PreconditionFailed("constant polynomial".into()));
    }
    let roots = complex_roots(f)?;
    let max_modulus = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = 2.0 * h.value;
    Ok(RootBoundCheck {
        max_modulus,
        bound,
        pass: max_modulus <= bound * (1.0 + ROOT_EPS) + ROOT_EPS,
    })
}

/// The coefficient box |α_{u,v}| ≤ floor(Y^{v N_{u-1}}).
#[derive(Clone, Debug)]
pub struct BoxSpec {
    shape: Shape,
    y: f64,
    bounds: Vec<BigInt>,
}

impl BoxSpec {
    pub fn new(shape: &Shape, y: f64) -> Result<Self, HeightError> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(HeightError::InvalidY(y));
        }
        let bounds = box_exponents(shape)
            .into_iter()
            .map(|e| {
                if y.fract() == 0.0 {
                    num_traits::pow(BigInt::from(y as u64), e)
                } else {
                    BigInt::from(y.powi(e as i32).floor() as u128)
                }
            })
            .collect();
        Ok(BoxSpec {
            shape: shape.clone(),
            y,
            bounds,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn bounds(&self) -> &[BigInt] {
        &self.bounds
    }

    pub fn count(&self) -> BigInt {
        self.bounds.iter().map(|b| 2 * b + 1).product()
    }

    /// Bounds as i64, if they fit.
    pub fn bounds_i64(&self) -> Option<Vec<i64>> {
        self.bounds.iter().map(|b| b.to_i64()).collect()
    }

    /// Points of the box, first coordinate varying fastest, from -b to b.
    pub fn points(&self, cap: u128) -> Result<BoxPoints, HeightError> {
        let count = self.count();
        match (count.to_u128(), self.bounds_i64()) {
            (Some(c), Some(b)) if c <= cap => Ok(BoxPoints::new(b)),
            _ => Err(HeightError::CapExceeded { count, cap }),
        }
    }
}

/// Exponents v·N_{u-1} in specialization order.
pub fn box_exponents(shape: &Shape) -> Vec<usize> {
    (1..=shape.k())
        .flat_map(|u| (1..=shape.n(u)).map(move |v| v * shape.partial(u - 1)))
        .collect()
}

/// Odometer over an integer box.
#[derive(Clone, Debug)]
pub struct BoxPoints {
    bounds: Vec<i64>,
    current: Option<Vec<i64>>,
}

impl BoxPoints {
    pub fn new(bounds: Vec<i64>) -> Self {
        let current = Some(bounds.iter().map(|b| -b).collect());
        BoxPoints { bounds, current }
    }
}

impl Iterator for BoxPoints {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        for (i, b) in self.bounds.iter().enumerate() {
            if next[i] < *b {
                next[i] += 1;
                self.current = Some(next);
                return Some(cur);
            }
            next[i] = -b;
        }
        Some(cur)
    }
}

pub fn enumerate_box(b: &BoxSpec, cap: u128) -> Result<impl Iterator<Item = Specialization> + '_, HeightError> {
    let shape = b.shape.clone();
    Ok(b.points(cap)?
        .map(move |p| Specialization::from_i64s(&shape, &p).expect("box matches shape")))
}

pub fn box_count(b: &BoxSpec) -> BigInt {
    b.count()
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn exponent_a(s: &Shape) -> BigRational {
    s.exponent_a()
}

pub fn exponent_b(s: &Shape) -> BigRational {
    s.exponent_b()
}

/// Exponent from a bound B on the count of degree-N integers of height ≤ Y:
/// (B - N/2)/(N^2 - N) if B ≥ N^2/4 + N, else (B - N)(N + 2)/(N^3 - N^2).
pub fn exponent_from_count(b: &BigRational, n: i64) -> Result<BigRational, HeightError> {
    let nn = BigRational::from_integer(n.into());
    if *b <= nn {
        return Err(HeightError::PreconditionFailed(format!("B = {b} must exceed N = {n}")));
    }
    let threshold = rat(n * n, 4) + &nn;
    if *b >= threshold {
        Ok((b - rat(n, 2)) / rat(n * n - n, 1))
    } else {
        Ok((b - &nn) * rat(n + 2, 1) / rat(n * n * n - n * n, 1))
    }
}

pub fn theorem_a_exponent(s: &Shape) -> Result<BigRational, HeightError> {
    exponent_from_count(&s.exponent_b(), s.leaves() as i64)
}

/// δ_{n,k} = (n^{2k} + n^k - 2) / (2 (n^{3k-1} - n^{2k-1})).
pub fn delta_nk(n: u32, k: u32) -> BigRational {
    let n = BigInt::from(n);
    let p = |e: u32| num_traits::pow(n.clone(), e as usize);
    BigRational::new(p(2 * k) + p(k) - 2, 2 * (p(3 * k - 1) - p(2 * k - 1)))
}

/// β_{n,k} = (1 - (n!)^{-k}) / (n^{k-1} (2 n^k - 2)).
pub fn ptw_beta(n: u32, k: u32) -> BigRational {
    let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
    let nb = BigInt::from(n);
    let num = BigRational::one() - BigRational::new(BigInt::one(), num_traits::pow(fact, k as usize));
    let den = num_traits::pow(nb.clone(), k as usize - 1) * (2 * num_traits::pow(nb, k as usize) - 2);
    num / BigRational::from_integer(den)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentReport {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "thmA_exponent")]
    pub thm_a_exponent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptw_beta: Option<String>,
}

pub fn exponent_report(s: &Shape) -> ExponentReport {
    let f = crate::fmt_rational;
    let uniform = s.is_uniform() && s.k() >= 2;
    let (n, k) = (s.n(1) as u32, s.k() as u32);
    ExponentReport {
        a: f(&s.exponent_a()),
        b: f(&s.exponent_b()),
        n: s.leaves(),
        thm_a_exponent: theorem_a_exponent(s).ok().map(|q| f(&q)),
        delta: uniform.then(|| f(&delta_nk(n, k))),
        ptw_beta: uniform.then(|| f(&ptw_beta(n, k))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxStatsRow {
    #[serde(rename = "Y")]
    pub y: f64,
    pub count: String,
    pub measured_c1: f64,
    pub measured_c2: f64,
}

/// Measured sup of ||F_{j,α}|| / Y and |F_{j,α}(0)| / Y^{N_j} over sampled box points.
///
/// The same `samples` points of [-1, 1]^m are used for every Y, scaled coordinatewise
/// to the box bounds and rounded, so that rows differ only through Y.
pub fn boxstats(shape: &Shape, ys: &[f64], samples: usize, seed: u64) -> Result<Vec<BoxStatsRow>, HeightError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = shape.coefficient_count();
    let units: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let mut rows = Vec::new();
    for &y in ys {
        let spec = BoxSpec::new(shape, y)?;
        let bounds: Vec<f64> = spec.bounds().iter().map(|b| b.to_f64().unwrap()).collect();
        let (mut c1, mut c2) = (0.0f64, 0.0f64);
        for u in &units {
            let vals: Vec<BigInt> = u
                .iter()
                .zip(&bounds)
                .map(|(t, b)| BigInt::from((t * b).round() as i128))
                .collect();
            let alpha = Specialization::new(shape, vals).expect("matches shape");
            let tower = CompositeTower::from_specialization(&alpha);
            for j in 1..=shape.k() {
                let fj = tower.lower(j);
                c1 = c1.max(poly_height(fj)?.value / y);
                let c0 = fj.coeff(0).abs().to_f64().unwrap_or(f64::INFINITY);
                c2 = c2.max(c0 / y.powi(shape.partial(j) as i32));
            }
        }
        rows.push(BoxStatsRow {
            y,
            count: spec.count().to_string(),
            measured_c1: c1,
            measured_c2: c2,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn shape(s: &str) -> Shape {
        s.parse().unwrap()
    }

    #[test]
    fn heights() {
        assert_eq!(poly_height(&p(&[0, 0, 0, 1])).unwrap().value, 0.0);
        assert_eq!(poly_height(&p(&[4, 3, 1])).unwrap().value, 3.0);
        let h = poly_height(&p(&[-2, 0, 0, 0, 1])).unwrap();
        assert!((h.value - 2f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(h.witness, Some((BigInt::from(2), 4)));
        assert_eq!(poly_height(&p(&[2, 1])).unwrap().value, 2.0);
        assert_eq!(poly_height(&p(&[1, 2, 3])), Err(HeightError::NotMonic));
        // exact tie: |4|^{1/2} = |2|^{1/1}
        let a = poly_height(&p(&[4, 0, 1])).unwrap();
        let b = poly_height(&p(&[2, 1])).unwrap();
        assert_eq!(a.cmp_exact(&b), Ordering::Equal);
    }

    #[test]
    fn root_bounds() {
        let r = root_bound_check(&p(&[-4, 0, 1])).unwrap();
        assert!((r.max_modulus - 2.0).abs() < 1e-9 && r.bound == 4.0 && r.pass);
        let r = root_bound_check(&p(&[0, 0, 0, 1])).unwrap();
        assert!(r.pass && r.bound == 0.0);
        let r = root_bound_check(&p(&[-2, 0, 0, 0, 1])).unwrap();
        assert!((r.max_modulus - 2f64.powf(0.25)).abs() < 1e-9 && r.pass);
        let r = root_bound_check(&p(&[1, 0, 0, -3, 0, 0, 1])).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn boxes() {
        assert_eq!(BoxSpec::new(&shape("2,2"), 2.0).unwrap().count(), BigInt::from(13365));
        assert_eq!(BoxSpec::new(&shape("2"), 1.0).unwrap().count(), BigInt::from(9));
        let b = BoxSpec::new(&shape("2,2"), 1.0).unwrap();
        let pts: Vec<Specialization> = enumerate_box(&b, 1000).unwrap().collect();
        assert_eq!(pts.len(), 81);
        let mut dedup = pts.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 81);
        assert!(BoxSpec::new(&shape("2,2"), 6.0).unwrap().points(1000).is_err());
        assert_eq!(box_exponents(&shape("2,2")), vec![1, 2, 2, 4]);
    }

    #[test]
    fn exponents() {
        assert_eq!(theorem_a_exponent(&shape("2,2")).unwrap(), rat(3, 8));
        assert_eq!(theorem_a_exponent(&shape("2,3")).unwrap(), rat(14, 45));
        assert_eq!(theorem_a_exponent(&shape("3,2")).unwrap(), rat(4, 15));
        assert_eq!(theorem_a_exponent(&shape("2")).unwrap(), rat(1, 1));
        assert!(exponent_from_count(&rat(4, 1), 4).is_err());
        assert_eq!(delta_nk(2, 2), rat(3, 8));
        assert_eq!(delta_nk(2, 3), rat(5, 32));
        assert_eq!(theorem_a_exponent(&shape("2,2,2")).unwrap(), rat(5, 32));
        assert_eq!(ptw_beta(2, 2), rat(1, 16));
        for n in 3..=20i64 {
            let c = rat(n * n, 4) + rat(n, 1);
            let upper = (&c - rat(n, 2)) / rat(n * n - n, 1);
            let lower = (&c - rat(n, 1)) * rat(n + 2, 1) / rat(n * n * n - n * n, 1);
            assert_eq!(upper, lower);
            assert_eq!(upper, rat(n + 2, 4 * (n - 1)));
        }
    }

    #[test]
    fn boxstats_rows() {
        let rows = boxstats(&shape("2,2"), &[2.0, 4.0], 20, 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].count, "13365");
        assert!(rows.iter().all(|r| r.measured_c1 > 0.0 && r.measured_c2 > 0.0));
    }
}

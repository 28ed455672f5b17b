//! Galois group identification for composite towers: Frobenius cycle types at
//! good primes, exact splitting-field degrees, and density experiments.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    degree_pattern, discriminant, factor_mod_p, factor_over_q, norm_factors, primes_from, AlgebraError, IntPoly,
    ModPoly,
};
use crate::composer::{CompositeTower, Specialization};
use crate::heights::{BoxSpec, HeightError};
use crate::wreath::{CycleType, GroupTable, Shape, TreeAutomorphism, WreathError};

pub const DEFAULT_SPLITTING_CAP: u64 = 200;
pub const DEFAULT_SAMPLE_PRIMES: usize = 64;
pub const DEFAULT_TAU: f64 = 0.25;
pub const FIRST_PRIME: u64 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaloisError {
    #[error("every sampled prime divides the discriminant")]
    AllPrimesBad,
    #[error("splitting field degree exceeds cap {0}")]
    CapExceeded(u64),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Wreath(#[from] WreathError),
    #[error(transparent)]
    Height(#[from] HeightError),
}

/// Factor-degree data of a tower modulo one good prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusRecord {
    pub p: u64,
    /// cycle type of Frobenius on the roots of F
    #[serde(serialize_with = "ser_type")]
    pub leaf_type: CycleType,
    /// cycle types on the roots of Q_1, ..., Q_{k-1}
    #[serde(serialize_with = "ser_types")]
    pub level_types: Vec<CycleType>,
}

fn ser_type<S: serde::Serializer>(t: &CycleType, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

fn ser_types<S: serde::Serializer>(t: &[CycleType], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(t.iter().map(|c| c.to_string()))
}

/// A prime is good for `f` if it does not divide lc(f)·disc(f).
pub fn is_good_prime(disc: &BigInt, lc: &BigInt, p: u64) -> bool {
    let pb = BigInt::from(p);
    !disc.is_zero() && !(disc % &pb).is_zero() && !(lc % &pb).is_zero()
}

fn record_at(tower: &CompositeTower, p: u64) -> Option<FrobeniusRecord> {
    let leaf = degree_pattern(tower.polynomial(), p)?;
    let k = tower.shape().k();
    let mut level_types = Vec::with_capacity(k.saturating_sub(1));
    for j in 1..k {
        level_types.push(CycleType::new(degree_pattern(tower.upper(j), p)?));
    }
    Some(FrobeniusRecord {
        p,
        leaf_type: CycleType::new(leaf),
        level_types,
    })
}

/// One record per good prime in `primes`; also returns the skipped (bad) primes.
pub fn frobenius_sample(
    tower: &CompositeTower,
    primes: &[u64],
) -> Result<(Vec<FrobeniusRecord>, Vec<u64>), GaloisError> {
    let f = tower.polynomial();
    let disc = discriminant(f)?;
    let lc = f.leading().cloned().unwrap_or_default();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &p in primes {
        if !is_good_prime(&disc, &lc, p) {
            skipped.push(p);
            continue;
        }
        match record_at(tower, p) {
            Some(r) => records.push(r),
            None => skipped.push(p),
        }
    }
    if records.is_empty() {
        return Err(GaloisError::AllPrimesBad);
    }
    Ok((records, skipped))
}

/// The first `count` good primes, ascending from 3.
pub fn good_primes(f: &IntPoly, count: usize) -> Result<Vec<u64>, GaloisError> {
    let disc = discriminant(f)?;
    if disc.is_zero() {
        return Err(GaloisError::AllPrimesBad);
    }
    let lc = f.leading().cloned().unwrap_or_default();
    Ok(primes_from(FIRST_PRIME)
        .filter(|&p| is_good_prime(&disc, &lc, p))
        .take(count)
        .collect())
}

pub fn containment_check(records: &[FrobeniusRecord], support: &BTreeSet<CycleType>) -> bool {
    !records.is_empty() && records.iter().all(|r| support.contains(&r.leaf_type))
}

pub fn containment_check_shape(records: &[FrobeniusRecord], shape: &Shape, cap: u64) -> Result<bool, GaloisError> {
    let support = crate::wreath::cycle_type_distribution(shape, cap)?.into_keys().collect();
    Ok(containment_check(records, &support))
}

fn mod_degrees(f: &ModPoly) -> Vec<usize> {
    let p = f.modulus();
    let mut out = Vec::new();
    for (g, m) in factor_mod_p(&f.to_int(), p).expect("prime modulus and monic input") {
        out.extend(std::iter::repeat_n(g.deg(), m));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Checks that factoring Q_j mod p and composing each factor with g_j reproduces
/// the factor degrees of Q_{j-1} mod p, for every level.
pub fn refinement_law_holds(tower: &CompositeTower, p: u64) -> bool {
    let k = tower.shape().k();
    for j in 1..=k {
        let qj = ModPoly::from_int(tower.upper(j), p);
        let gj = ModPoly::from_int(tower.block(j), p);
        if !tower.block(j).is_monic() || qj.deg() != tower.upper(j).deg() {
            return false;
        }
        let mut union = Vec::new();
        let factors = factor_mod_p(tower.upper(j), p).expect("monic");
        for (h, m) in factors {
            let composed = h.compose(&gj);
            for _ in 0..m {
                union.extend(mod_degrees(&composed));
            }
        }
        union.sort_unstable_by(|a, b| b.cmp(a));
        let target = mod_degrees(&ModPoly::from_int(tower.upper(j - 1), p));
        if union != target {
            return false;
        }
    }
    true
}

/// Degree of the splitting field of a squarefree `f` over Q.
///
/// Keeps a primitive element of the current field by its minimal polynomial `r`
/// (starting from r = x). The squarefree norm of `f` over Q[y]/(r) factors as the
/// norms of the factors of `f` over that field; a norm factor of degree `deg r · e`
/// is the minimal polynomial of a primitive element of the field obtained by
/// adjoining a root of the corresponding degree-`e` factor.
pub fn splitting_degree(f: &IntPoly, cap: u64) -> Result<u64, GaloisError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial.into());
    }
    if !f.is_squarefree() {
        return Err(GaloisError::NotSquarefree);
    }
    let f = f.primitive_part();
    if f.deg() <= 1 {
        return Ok(1);
    }
    let mut r = IntPoly::x();
    loop {
        let d = r.deg();
        let nf = norm_factors(&f, &r);
        let nonlinear: Vec<&IntPoly> = nf.factors.iter().filter(|g| g.deg() > d).collect();
        if nonlinear.is_empty() {
            return Ok(d as u64);
        }
        // a lone quadratic factor splits once one of its roots is adjoined
        if nonlinear.len() == 1 && nonlinear[0].deg() == 2 * d {
            return check_cap(2 * d as u64, cap);
        }
        let next = nonlinear.iter().max_by_key(|g| g.deg()).unwrap();
        check_cap(next.deg() as u64, cap)?;
        r = (*next).clone();
    }
}

fn check_cap(d: u64, cap: u64) -> Result<u64, GaloisError> {
    if d > cap {
        Err(GaloisError::CapExceeded(cap))
    } else {
        Ok(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    CertifiedEqual,
    CertifiedProper,
    ConsistentWithW,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Statistical,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "stat" | "statistical" => Ok(Mode::Statistical),
            _ => Err(format!("unknown mode {s:?} (expected exact or stat)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationResult {
    pub verdict: Verdict,
    pub group_order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitting_degree: Option<u64>,
    pub irreducible: bool,
    pub sample_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_distance: Option<f64>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct CertifyParams {
    pub splitting_cap: u64,
    pub enumeration_cap: u64,
    pub sample_primes: usize,
    pub tau: f64,
    pub seed: u64,
}

impl Default for CertifyParams {
    fn default() -> Self {
        CertifyParams {
            splitting_cap: DEFAULT_SPLITTING_CAP,
            enumeration_cap: crate::wreath::DEFAULT_ENUMERATION_CAP,
            sample_primes: DEFAULT_SAMPLE_PRIMES,
            tau: DEFAULT_TAU,
            seed: 0,
        }
    }
}

/// Frequencies of leaf cycle types in S(n): exact by enumeration within the cap,
/// otherwise estimated from 100000 seeded uniform random elements.
pub fn reference_distribution(shape: &Shape, cap: u64, seed: u64) -> BTreeMap<CycleType, f64> {
    match crate::wreath::cycle_type_distribution(shape, cap) {
        Ok(counts) => {
            let total: u64 = counts.values().sum();
            counts
                .into_iter()
                .map(|(t, c)| (t, c as f64 / total as f64))
                .collect()
        }
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 100_000;
            let mut counts: BTreeMap<CycleType, f64> = BTreeMap::new();
            for _ in 0..n {
                *counts
                    .entry(TreeAutomorphism::random(shape, &mut rng).cycle_type())
                    .or_insert(0.0) += 1.0 / n as f64;
            }
            counts
        }
    }
}

pub fn tv_distance(records: &[FrobeniusRecord], reference: &BTreeMap<CycleType, f64>) -> f64 {
    let mut empirical: BTreeMap<&CycleType, f64> = BTreeMap::new();
    for r in records {
        *empirical.entry(&r.leaf_type).or_insert(0.0) += 1.0 / records.len() as f64;
    }
    let keys: BTreeSet<&CycleType> = empirical.keys().copied().chain(reference.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|t| (empirical.get(t).copied().unwrap_or(0.0) - reference.get(t).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

pub fn certify(tower: &CompositeTower, mode: Mode, params: &CertifyParams) -> Result<CertificationResult, GaloisError> {
    let shape = tower.shape();
    let order = shape.group_order();
    let f = tower.polynomial();
    let mut result = CertificationResult {
        verdict: Verdict::CertifiedProper,
        group_order: order.to_string(),
        splitting_degree: None,
        irreducible: false,
        sample_size: 0,
        tv_distance: None,
        reason: String::new(),
    };
    if !f.is_squarefree() {
        result.verdict = match mode {
            Mode::Exact => Verdict::CertifiedProper,
            Mode::Statistical => Verdict::Inconclusive,
        };
        result.reason = "not squarefree".into();
        return Ok(result);
    }
    result.irreducible = factor_over_q(f)?.is_irreducible();
    match mode {
        Mode::Exact => {
            if !result.irreducible {
                result.reason = "reducible over Q".into();
                return Ok(result);
            }
            let cap = order.to_u64().unwrap_or(u64::MAX);
            if cap > params.splitting_cap {
                return Err(GaloisError::CapExceeded(params.splitting_cap));
            }
            let d = splitting_degree(f, cap)?;
            result.splitting_degree = Some(d);
            if d == cap {
                result.verdict = Verdict::CertifiedEqual;
                result.reason = "splitting degree equals group order".into();
            } else {
                result.reason = format!("splitting degree {d} is below group order {cap}");
            }
        }
        Mode::Statistical => {
            let primes = good_primes(f, params.sample_primes)?;
            let (records, _) = frobenius_sample(tower, &primes)?;
            let reference = reference_distribution(shape, params.enumeration_cap, params.seed);
            let support: BTreeSet<CycleType> = reference.keys().cloned().collect();
            let contained = containment_check(&records, &support);
            let tv = tv_distance(&records, &reference);
            result.sample_size = records.len();
            result.tv_distance = Some(tv);
            result.verdict = if contained && result.irreducible && tv < params.tau {
                Verdict::ConsistentWithW
            } else {
                Verdict::Inconclusive
            };
            result.reason = match (contained, result.irreducible) {
                (false, _) => "sampled cycle type outside the group".into(),
                (_, false) => "reducible over Q".into(),
                _ => format!("total variation {tv:.4} against threshold {}", params.tau),
            };
        }
    }
    Ok(result)
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let centre = (p + z * z / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    #[serde(rename = "Y")]
    pub y: f64,
    pub box_size: String,
    pub n_tested: u64,
    pub n_certified: u64,
    pub fraction: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub exhaustive: bool,
}

#[derive(Clone, Debug)]
pub struct DensityParams {
    pub certify: CertifyParams,
    /// boxes up to this size are enumerated; larger ones are sampled
    pub exhaustive_cap: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for DensityParams {
    fn default() -> Self {
        DensityParams {
            certify: CertifyParams::default(),
            exhaustive_cap: 20_000,
            samples: 2_000,
            seed: 0,
        }
    }
}

fn passes(alpha: &Specialization, mode: Mode, params: &CertifyParams) -> Result<bool, GaloisError> {
    let tower = CompositeTower::from_specialization(alpha);
    let r = certify(&tower, mode, params)?;
    Ok(match mode {
        Mode::Exact => r.verdict == Verdict::CertifiedEqual,
        Mode::Statistical => r.verdict == Verdict::ConsistentWithW,
    })
}

/// Seeded uniform sample of box points, with replacement.
pub fn sample_box(spec: &BoxSpec, n: usize, seed: u64) -> Vec<Specialization> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = spec.bounds_i64().expect("box bounds fit in i64");
    (0..n)
        .map(|_| {
            let vals: Vec<i64> = bounds.iter().map(|&b| rng.gen_range(-b..=b)).collect();
            Specialization::from_i64s(spec.shape(), &vals).expect("matches shape")
        })
        .collect()
}

/// Fraction of box points whose certification succeeds in the given mode.
pub fn density_estimate(shape: &Shape, y: f64, mode: Mode, params: &DensityParams) -> Result<DensityEstimate, GaloisError> {
    let spec = BoxSpec::new(shape, y)?;
    let size = spec.count();
    let exhaustive = size <= BigInt::from(params.exhaustive_cap);
    let points: Vec<Specialization> = if exhaustive {
        crate::heights::enumerate_box(&spec, params.exhaustive_cap as u128)?.collect()
    } else {
        sample_box(&spec, params.samples, params.seed)
    };
    let outcomes: Result<Vec<bool>, GaloisError> = points
        .par_iter()
        .map(|a| passes(a, mode, &params.certify))
        .collect();
    let n_certified = outcomes?.into_iter().filter(|&b| b).count() as u64;
    let n_tested = points.len() as u64;
    let (lo, hi) = wilson_interval(n_certified, n_tested);
    Ok(DensityEstimate {
        y,
        box_size: size.to_string(),
        n_tested,
        n_certified,
        fraction: if n_tested == 0 { 0.0 } else { n_certified as f64 / n_tested as f64 },
        wilson_lo: lo,
        wilson_hi: hi,
        exhaustive,
    })
}

/// Group table for the reference shape, when enumeration is within the cap.
pub fn group_table(shape: &Shape, cap: u64) -> Result<GroupTable, GaloisError> {
    Ok(GroupTable::build(shape, cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn tower(s: &str, a: &[i64]) -> CompositeTower {
        CompositeTower::from_specialization(&Specialization::from_i64s(&s.parse().unwrap(), a).unwrap())
    }

    #[test]
    fn splitting_degrees() {
        assert_eq!(splitting_degree(&p(&[-2, 0, 0, 0, 1]), 200).unwrap(), 8);
        assert_eq!(splitting_degree(&p(&[1, 0, 0, 0, 1]), 200).unwrap(), 4);
        assert_eq!(splitting_degree(&p(&[2, 0, -4, 0, 1]), 200).unwrap(), 4);
        assert_eq!(splitting_degree(&p(&[-2, 0, 0, 1]), 200).unwrap(), 6);
        assert_eq!(splitting_degree(&p(&[1, 0, 1]), 200).unwrap(), 2);
        assert_eq!(splitting_degree(&p(&[-1, 0, 0, 0, 1]), 200).unwrap(), 2);
        assert!(matches!(splitting_degree(&p(&[-2, 0, 0, 0, 1]), 4), Err(GaloisError::CapExceeded(4))));
        assert_eq!(splitting_degree(&p(&[1, 2, 1]), 200), Err(GaloisError::NotSquarefree));
    }

    #[test]
    fn frobenius_of_x4_minus_2() {
        let t = tower("2,2", &[0, 0, 0, -2]);
        let (recs, skipped) = frobenius_sample(&t, &[2, 3, 7]).unwrap();
        assert_eq!(skipped, vec![2]);
        assert_eq!(recs[0].leaf_type.to_string(), "2,2");
        assert_eq!(recs[1].leaf_type.to_string(), "2,1,1");
        assert_eq!(recs[1].level_types[0].to_string(), "1,1");
        assert!(containment_check_shape(&recs, &"2,2".parse().unwrap(), 100).unwrap());
        let mut bad = recs.clone();
        bad[0].leaf_type = CycleType::new(vec![3, 1]);
        assert!(!containment_check_shape(&bad, &"2,2".parse().unwrap(), 100).unwrap());
        for q in [3, 5, 7, 11, 13] {
            assert!(refinement_law_holds(&t, q));
        }
        assert!(matches!(frobenius_sample(&t, &[2]), Err(GaloisError::AllPrimesBad)));
    }

    #[test]
    fn exact_certification() {
        let params = CertifyParams::default();
        let r = certify(&tower("2,2", &[0, 0, 0, -2]), Mode::Exact, &params).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedEqual);
        let r = certify(&tower("2,2", &[0, 0, 0, -1]), Mode::Exact, &params).unwrap();
        assert_eq!((r.verdict, r.irreducible), (Verdict::CertifiedProper, false));
        let r = certify(&tower("2,2", &[0, 0, -4, 2]), Mode::Exact, &params).unwrap();
        assert_eq!((r.verdict, r.splitting_degree), (Verdict::CertifiedProper, Some(4)));
    }

    #[test]
    fn statistical_certification() {
        let params = CertifyParams::default();
        let r = certify(&tower("2,2", &[0, 0, 0, -2]), Mode::Statistical, &params).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithW);
        assert_eq!(r.sample_size, 64);
        let r = certify(&tower("2,2", &[0, 0, -4, 2]), Mode::Statistical, &params).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn wilson() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn quadratic_density() {
        // x^2 + a x + b with |a| ≤ 3, |b| ≤ 9: S_2 iff the discriminant is not a square
        let est = density_estimate(&"2".parse().unwrap(), 3.0, Mode::Exact, &DensityParams::default()).unwrap();
        assert_eq!(est.n_tested, 7 * 19);
        let mut expect = 0;
        for a in -3i64..=3 {
            for b in -9i64..=9 {
                let d = a * a - 4 * b;
                let r = (d.max(0) as f64).sqrt().round() as i64;
                if d < 0 || r * r != d {
                    expect += 1;
                }
            }
        }
        assert_eq!(est.n_certified, expect);
    }
}

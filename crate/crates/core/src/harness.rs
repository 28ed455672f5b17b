//! Desk-scale experiments: certified densities, counting fields by discriminant
//! with isomorphism dedup, and slope fits against the exponent formulas.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{degree_pattern, discriminant, factor_over_q, AlgebraError, IntPoly, StemField};
use crate::composer::{CompositeTower, Specialization};
use crate::galois::{certify, density_estimate, CertifyParams, DensityEstimate, DensityParams, GaloisError, Mode, Verdict};
use crate::heights::{box_exponents, delta_nk, ptw_beta, theorem_a_exponent, BoxSpec, HeightError};
use crate::wreath::Shape;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs `f` on a pool with the given number of workers (0 means the rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(f))
}

pub fn run_density(shape: &Shape, ys: &[f64], mode: Mode, params: &DensityParams) -> Result<Vec<DensityEstimate>, HarnessError> {
    ys.iter()
        .map(|&y| density_estimate(shape, y, mode, params).map_err(HarnessError::from))
        .collect()
}

pub fn write_density_csv<W: Write>(rows: &[DensityEstimate], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["Y", "box_size", "n_certified", "fraction", "n_tested", "wilson_lo", "wilson_hi"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.y),
            r.box_size.clone(),
            r.n_certified.to_string(),
            format!("{:.6}", r.fraction),
            r.n_tested.to_string(),
            format!("{:.6}", r.wilson_lo),
            format!("{:.6}", r.wilson_hi),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// True iff `g` has a root in Q[x]/(f).
pub fn fields_isomorphic(f: &IntPoly, g: &IntPoly) -> Result<bool, HarnessError> {
    let pre = |m: String| HarnessError::PreconditionFailed(m);
    if f.deg() != g.deg() || !f.is_monic() || !g.is_monic() {
        return Err(pre("fields_isomorphic needs monic polynomials of equal degree".into()));
    }
    if !factor_over_q(g)?.is_irreducible() {
        return Err(pre(format!("{g} is reducible")));
    }
    let field = StemField::new(f.clone()).map_err(|_| pre(format!("{f} is reducible")))?;
    Ok(field.count_roots(g) > 0)
}

/// Number of automorphisms of Q[x]/(f): roots of `f` in its own stem field.
pub fn automorphism_count(f: &IntPoly) -> Result<usize, HarnessError> {
    let field = StemField::new(f.clone())?;
    Ok(field.count_roots(f))
}

/// Representative of `f` up to x -> ±x + t: the x^{N-1} coefficient is moved into
/// [0, N) and the smaller of the two reflections is kept.
pub fn canonical_form(f: &IntPoly) -> IntPoly {
    let normalize = |g: &IntPoly| {
        let n = g.deg();
        if n == 0 {
            return g.clone();
        }
        let t = g.coeff(n - 1).div_floor(&BigInt::from(n));
        g.shift(&-t)
    };
    let a = normalize(f);
    let b = normalize(&f.reflect());
    let key = |g: &IntPoly| g.coeffs().iter().rev().cloned().collect::<Vec<BigInt>>();
    if key(&b) < key(&a) {
        b
    } else {
        a
    }
}

/// Squarefree kernel of a nonzero integer, keeping the sign.
pub fn squarefree_kernel(n: &BigInt) -> BigInt {
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out *= m;
    if n.is_negative() {
        -out
    } else {
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldRecord {
    #[serde(serialize_with = "ser_poly")]
    pub poly: IntPoly,
    /// |disc| of the defining polynomial
    #[serde(serialize_with = "ser_int")]
    pub disc: BigInt,
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_int")]
    pub kernel: BigInt,
    pub automorphisms: usize,
    /// box points whose polynomial defines this field
    pub preimages: usize,
}

fn ser_poly<S: serde::Serializer>(p: &IntPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_csv())
}

fn ser_int<S: serde::Serializer>(p: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    #[serde(rename = "X")]
    pub x: f64,
    pub n_fields: u64,
    pub min_disc: String,
    pub max_disc: String,
    /// fields counted as subfields of a fixed algebraic closure: sum of N / #Aut
    #[serde(default)]
    pub n_raw: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountCurve {
    pub rows: Vec<CountRow>,
    pub fields: Vec<FieldRecord>,
    pub candidates: usize,
    pub distinct_polynomials: usize,
}

#[derive(Clone, Debug)]
pub struct CountParams {
    pub certify: CertifyParams,
    /// shuffle candidates with this seed before dedup (results must not change)
    pub permute: Option<u64>,
    pub box_cap: u128,
}

impl Default for CountParams {
    fn default() -> Self {
        CountParams {
            certify: CertifyParams::default(),
            permute: None,
            box_cap: crate::heights::DEFAULT_BOX_CAP,
        }
    }
}

/// Default X grid: four points per decade from 10^3 to 10^7.
pub fn default_x_grid() -> Vec<f64> {
    (0..=16).map(|i| 10f64.powf(3.0 + i as f64 / 4.0).round()).collect()
}

/// Box points with 0 < |disc F_α| ≤ `x_max`, found without expanding every composite.
///
/// For F = g_k ∘ H with H = F_{k-1} monic of degree r,
/// disc(F) = ± disc(g_k)^r · Res(g_k, D_H) where D_H(y) = disc_x(H(x) - y).
/// Points are grouped by D_H, so each top block g_k costs one small resultant per group.
pub fn discriminant_candidates(spec: &BoxSpec, x_max: &BigInt, cap: u128) -> Result<Vec<Vec<i64>>, HarnessError> {
    let shape = spec.shape();
    let count = spec.count();
    if count.to_u128().is_none_or(|c| c > cap) {
        return Err(HarnessError::CapExceeded(format!("box has {count} points, cap {cap}")));
    }
    let bounds = spec
        .bounds_i64()
        .ok_or_else(|| HarnessError::CapExceeded("box bounds exceed i64".into()))?;
    let k = shape.k();
    if k == 1 {
        let pts: Vec<Vec<i64>> = crate::heights::BoxPoints::new(bounds).collect();
        return Ok(pts
            .into_par_iter()
            .filter(|p| {
                let f = Specialization::from_i64s(shape, p).unwrap().block(1);
                let d = discriminant(&f).unwrap().abs();
                !d.is_zero() && &d <= x_max
            })
            .collect());
    }
    let n_top = shape.n(k);
    let split = bounds.len() - n_top;
    let inner_shape = Shape::new(shape.entries()[..k - 1].to_vec()).expect("prefix of a valid shape");
    let r = inner_shape.leaves();

    // group inner towers by D_H
    let inner_pts: Vec<Vec<i64>> = crate::heights::BoxPoints::new(bounds[..split].to_vec()).collect();
    let keyed: Vec<(Vec<BigInt>, Vec<i64>)> = inner_pts
        .into_par_iter()
        .map(|p| {
            let h = CompositeTower::from_specialization(&Specialization::from_i64s(&inner_shape, &p).unwrap())
                .polynomial()
                .clone();
            (fiber_discriminant(&h).into_coeffs(), p)
        })
        .collect();
    let mut groups: BTreeMap<Vec<BigInt>, Vec<Vec<i64>>> = BTreeMap::new();
    for (d, p) in keyed {
        groups.entry(d).or_default().push(p);
    }
    let groups: Vec<(Vec<BigInt>, Vec<Vec<i64>>)> = groups.into_iter().collect();
    let groups_i128: Vec<Option<Vec<i128>>> = groups
        .iter()
        .map(|(d, _)| d.iter().map(|c| c.to_i128()).collect())
        .collect();

    let top_pts: Vec<Vec<i64>> = crate::heights::BoxPoints::new(bounds[split..].to_vec()).collect();
    let xm = x_max.clone();
    let hits: Vec<Vec<Vec<i64>>> = top_pts
        .into_par_iter()
        .map(|t| {
            let mut out = Vec::new();
            // g_k = x^n + t_1 x^{n-1} + ... + t_n, coefficients constant term first
            let mut g: Vec<i64> = t.iter().rev().copied().collect();
            g.push(1);
            let gk = IntPoly::from_i64s(&g);
            let dg = discriminant(&gk).unwrap().abs();
            if dg.is_zero() {
                return out;
            }
            let dg_pow = num_traits::pow(dg, r);
            if dg_pow > xm {
                return out;
            }
            let limit = &xm / &dg_pow;
            for ((d, members), d128) in groups.iter().zip(&groups_i128) {
                let res = match d128.as_ref().and_then(|d| monic_resultant_i128(&g, d)) {
                    Some(v) => BigInt::from(v),
                    None => crate::algebra::resultant(&gk, &IntPoly::new(d.clone())).unwrap(),
                };
                let res = res.abs();
                if res.is_zero() || res > limit {
                    continue;
                }
                for m in members {
                    let mut p = m.clone();
                    p.extend_from_slice(&t);
                    out.push(p);
                }
            }
            out
        })
        .collect();
    Ok(hits.into_iter().flatten().collect())
}

/// disc_x(h(x) - y) as a polynomial in y, by interpolation at y = 0, ..., deg h - 1.
pub fn fiber_discriminant(h: &IntPoly) -> IntPoly {
    let r = h.deg();
    let npts = r.max(1);
    let xs: Vec<BigInt> = (0..npts as i64).map(BigInt::from).collect();
    let ys: Vec<BigInt> = xs
        .iter()
        .map(|y| discriminant(&(h - &IntPoly::constant(y.clone()))).unwrap())
        .collect();
    // Newton divided differences; exact because the result has integer coefficients
    let mut dd: Vec<num_rational::BigRational> = ys.into_iter().map(num_rational::BigRational::from_integer).collect();
    for j in 1..npts {
        for i in (j..npts).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / num_rational::BigRational::from_integer(BigInt::from(j as i64));
        }
    }
    let mut acc = IntPoly::zero();
    for i in (0..npts).rev() {
        let lin = IntPoly::new(vec![-xs[i].clone(), BigInt::one()]);
        acc = &(&acc * &lin) + &IntPoly::constant(dd[i].to_integer());
        debug_assert!(dd[i].is_integer());
    }
    acc
}

/// Res(g, d) for monic g (constant term first) as det of multiplication by d mod g; `None` on overflow.
fn monic_resultant_i128(g: &[i64], d: &[i128]) -> Option<i128> {
    let n = g.len() - 1;
    if n == 0 {
        return Some(1);
    }
    let reduce = |mut v: Vec<i128>| -> Option<Vec<i128>> {
        while v.len() > n {
            let c = v.pop().unwrap();
            if c != 0 {
                let base = v.len() - n;
                for (i, &gi) in g[..n].iter().enumerate() {
                    v[base + i] = v[base + i].checked_sub(c.checked_mul(gi as i128)?)?;
                }
            }
        }
        v.resize(n, 0);
        Some(v)
    };
    let mut col = reduce(d.to_vec())?;
    let mut m = vec![vec![0i128; n]; n];
    for j in 0..n {
        for i in 0..n {
            m[i][j] = col[i];
        }
        if j + 1 < n {
            let mut shifted = vec![0i128];
            shifted.extend_from_slice(&col);
            col = reduce(shifted)?;
        }
    }
    bareiss_det(m)
}

fn bareiss_det(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| m[i][k] != 0);
            match swap {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[k][k];
    }
    m[n - 1][n - 1].checked_mul(sign)
}

struct Candidate {
    poly: IntPoly,
    disc: BigInt,
    preimages: usize,
}

/// Counts pairwise non-isomorphic fields generated by roots of certified composites
/// from the box of height `y_max`, by |disc F_α| ≤ X for each X in the grid.
pub fn run_count(shape: &Shape, y_max: f64, x_grid: &[f64], params: &CountParams) -> Result<CountCurve, HarnessError> {
    if x_grid.is_empty() {
        return Err(HarnessError::PreconditionFailed("empty X grid".into()));
    }
    let mut xs: Vec<f64> = x_grid.to_vec();
    xs.sort_by(f64::total_cmp);
    let x_max = BigInt::from(xs.last().unwrap().floor() as u128);
    let spec = BoxSpec::new(shape, y_max)?;
    let mut points = discriminant_candidates(&spec, &x_max, params.box_cap)?;
    let n_candidates = points.len();
    if let Some(seed) = params.permute {
        points.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    // exact polynomial and discriminant for each candidate, then canonical dedup
    let polys: Vec<(IntPoly, BigInt)> = points
        .par_iter()
        .map(|p| {
            let t = CompositeTower::from_specialization(&Specialization::from_i64s(shape, p).unwrap());
            let f = canonical_form(t.polynomial());
            let d = discriminant(&f).unwrap();
            (f, d)
        })
        .collect();
    let mut by_poly: BTreeMap<(BigInt, Vec<BigInt>), (IntPoly, BigInt, usize)> = BTreeMap::new();
    for (f, d) in polys {
        debug_assert!(!d.is_zero() && d.abs() <= x_max);
        let key = (d.abs(), f.coeffs().to_vec());
        by_poly.entry(key).or_insert((f, d, 0)).2 += 1;
    }
    let distinct = by_poly.len();
    let candidates: Vec<Candidate> = by_poly
        .into_values()
        .map(|(poly, disc, preimages)| Candidate { poly, disc, preimages })
        .collect();

    // certification is the expensive step; ordered parallel map keeps determinism
    let verdicts: Result<Vec<Verdict>, GaloisError> = candidates
        .par_iter()
        .map(|c| {
            let tower = decompose_canonical(shape, &c.poly);
            certify(&tower, Mode::Exact, &params.certify).map(|r| r.verdict)
        })
        .collect();
    let certified: Vec<&Candidate> = candidates
        .iter()
        .zip(verdicts?)
        .filter(|(_, v)| *v == Verdict::CertifiedEqual)
        .map(|(c, _)| c)
        .collect();

    // isomorphism dedup inside buckets keyed by the squarefree kernel of disc
    let mut buckets: BTreeMap<BigInt, Vec<&Candidate>> = BTreeMap::new();
    for c in &certified {
        buckets.entry(squarefree_kernel(&c.disc)).or_default().push(c);
    }
    let bucket_list: Vec<(BigInt, Vec<&Candidate>)> = buckets.into_iter().collect();
    let per_bucket: Result<Vec<Vec<FieldRecord>>, HarnessError> = bucket_list
        .par_iter()
        .map(|(kernel, members)| dedup_bucket(kernel, members))
        .collect();
    let mut fields: Vec<FieldRecord> = per_bucket?.into_iter().flatten().collect();
    fields.sort_by(|a, b| (&a.disc, a.poly.coeffs()).cmp(&(&b.disc, b.poly.coeffs())));

    let n = shape.leaves() as u64;
    let rows = xs
        .iter()
        .map(|&x| {
            let xb = BigInt::from(x.floor() as u128);
            let counted: Vec<&FieldRecord> = fields.iter().filter(|f| f.disc <= xb).collect();
            CountRow {
                x,
                n_fields: counted.len() as u64,
                min_disc: counted.first().map_or("0".into(), |f| f.disc.to_string()),
                max_disc: counted.last().map_or("0".into(), |f| f.disc.to_string()),
                n_raw: Some(counted.iter().map(|f| n / f.automorphisms as u64).sum()),
            }
        })
        .collect();
    Ok(CountCurve {
        rows,
        fields,
        candidates: n_candidates,
        distinct_polynomials: distinct,
    })
}

/// A tower of the given shape with polynomial `f`, by right-factor decomposition;
/// the translated and reflected forms of composites are still composites.
fn decompose_canonical(shape: &Shape, f: &IntPoly) -> CompositeTower {
    let k = shape.k();
    let mut lower = Vec::with_capacity(k);
    for j in 1..k {
        let h = crate::composer::right_factor(f, shape.partial(j)).expect("composite of the shape");
        lower.push(h);
    }
    lower.push(f.clone());
    let alpha = crate::composer::recover_alpha(&lower).expect("consistent tower");
    CompositeTower::from_specialization(&alpha)
}

fn fingerprint(f: &IntPoly, disc: &BigInt) -> Vec<Option<Vec<usize>>> {
    crate::algebra::primes_from(3)
        .take(24)
        .map(|p| {
            if (disc % BigInt::from(p)).is_zero() {
                None
            } else {
                degree_pattern(f, p)
            }
        })
        .collect()
}

fn dedup_bucket(kernel: &BigInt, members: &[&Candidate]) -> Result<Vec<FieldRecord>, HarnessError> {
    let mut reps: Vec<(FieldRecord, Vec<Option<Vec<usize>>>)> = Vec::new();
    for c in members {
        let fp = fingerprint(&c.poly, &c.disc);
        let mut merged = false;
        for (rep, rfp) in reps.iter_mut() {
            let compatible = fp.iter().zip(rfp.iter()).all(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            });
            if compatible && fields_isomorphic(&rep.poly, &c.poly)? {
                rep.preimages += c.preimages;
                merged = true;
                break;
            }
        }
        if !merged {
            let record = FieldRecord {
                poly: c.poly.clone(),
                disc: c.disc.abs(),
                verdict: Verdict::CertifiedEqual,
                kernel: kernel.clone(),
                automorphisms: automorphism_count(&c.poly)?,
                preimages: c.preimages,
            };
            reps.push((record, fp));
        }
    }
    Ok(reps.into_iter().map(|(r, _)| r).collect())
}

pub fn write_count_csv<W: Write>(rows: &[CountRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["X", "n_fields", "min_disc", "max_disc", "n_raw"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.x),
            r.n_fields.to_string(),
            r.min_disc.clone(),
            r.max_disc.clone(),
            r.n_raw.map_or(String::new(), |v| v.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_count_csv<R: Read>(input: R) -> Result<Vec<CountRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    pub shape: String,
    pub slope: f64,
    pub fit_points: usize,
    pub fit_range: (f64, f64),
    #[serde(rename = "thmA_exponent")]
    pub theorem_exponent: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptw_beta: Option<String>,
    pub tolerance: f64,
    pub verdict: bool,
}

pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Least-squares slope of log count against log X over the top decade of the curve.
pub fn fit_top_decade(rows: &[CountRow]) -> Result<(f64, usize, (f64, f64)), HarnessError> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n_fields > 0 && r.x > 0.0)
        .map(|r| (r.x, r.n_fields as f64))
        .collect();
    let insufficient = |m: &str| HarnessError::InsufficientData(m.to_string());
    if pts.len() < 5 {
        return Err(insufficient("need at least 5 points with nonzero counts"));
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(insufficient("points span less than one decade"));
    }
    let top: Vec<(f64, f64)> = pts
        .into_iter()
        .filter(|p| p.0 >= hi / 10.0 * (1.0 - 1e-9))
        .map(|(x, c)| (x.ln(), c.ln()))
        .collect();
    if top.len() < 2 {
        return Err(insufficient("top decade holds fewer than two points"));
    }
    let n = top.len() as f64;
    let mx = top.iter().map(|p| p.0).sum::<f64>() / n;
    let my = top.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = top.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = top.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx, top.len(), (hi / 10.0, hi)))
}

pub fn run_slope_report(rows: &[CountRow], shape: &Shape) -> Result<SlopeReport, HarnessError> {
    let (slope, fit_points, fit_range) = fit_top_decade(rows)?;
    let exponent = theorem_a_exponent(shape)?;
    let target = exponent.numer().to_f64().unwrap() / exponent.denom().to_f64().unwrap();
    let uniform = shape.is_uniform() && shape.k() >= 2;
    let (n, k) = (shape.n(1) as u32, shape.k() as u32);
    Ok(SlopeReport {
        shape: shape.to_string(),
        slope,
        fit_points,
        fit_range,
        theorem_exponent: crate::fmt_rational(&exponent),
        delta: uniform.then(|| crate::fmt_rational(&delta_nk(n, k))),
        ptw_beta: uniform.then(|| crate::fmt_rational(&ptw_beta(n, k))),
        tolerance: SLOPE_TOLERANCE,
        verdict: slope >= target - SLOPE_TOLERANCE,
    })
}

/// Exponents of the box bounds, exposed for reporting.
pub fn box_bound_exponents(shape: &Shape) -> Vec<usize> {
    box_exponents(shape)
}

/// Counts of raw polynomials by canonical key, for diagnostics.
pub fn canonical_multiplicities(polys: &[IntPoly]) -> HashMap<IntPoly, usize> {
    let mut out = HashMap::new();
    for f in polys {
        *out.entry(canonical_form(f)).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn isomorphism_examples() {
        assert!(fields_isomorphic(&p(&[-2, 0, 1]), &p(&[-8, 0, 1])).unwrap());
        assert!(!fields_isomorphic(&p(&[-2, 0, 1]), &p(&[-3, 0, 1])).unwrap());
        let f = p(&[-2, 0, 0, 0, 1]);
        assert!(fields_isomorphic(&f, &f).unwrap());
        assert!(fields_isomorphic(&p(&[-1, 0, 1]), &p(&[-2, 0, 1])).is_err());
        assert_eq!(automorphism_count(&f).unwrap(), 2);
        assert_eq!(automorphism_count(&p(&[1, 0, 0, 0, 1])).unwrap(), 4);
    }

    #[test]
    fn canonical_forms() {
        let f = p(&[-2, 0, 0, 0, 1]);
        assert_eq!(canonical_form(&f.shift(&BigInt::from(5))), canonical_form(&f));
        assert_eq!(canonical_form(&f.reflect()), canonical_form(&f));
        assert_eq!(squarefree_kernel(&BigInt::from(-2048)), BigInt::from(-2));
        assert_eq!(squarefree_kernel(&BigInt::from(180)), BigInt::from(5));
    }

    #[test]
    fn fiber_discriminant_and_composite_formula() {
        // D(y) = a^2 - 4(b - y) for h = x^2 + a x + b
        assert_eq!(fiber_discriminant(&p(&[3, 5, 1])), p(&[13, 4]));
        let h = p(&[1, -2, 0, 1]);
        let g = p(&[5, -3, 1]);
        let lhs = discriminant(&g.compose(&h)).unwrap().abs();
        let rhs = num_traits::pow(discriminant(&g).unwrap().abs(), 3)
            * crate::algebra::resultant(&g, &fiber_discriminant(&h)).unwrap().abs();
        assert_eq!(lhs, rhs);
        let d = fiber_discriminant(&h);
        let d128: Vec<i128> = d.coeffs().iter().map(|c| c.to_i128().unwrap()).collect();
        assert_eq!(
            BigInt::from(monic_resultant_i128(&[5, -3, 1], &d128).unwrap()),
            crate::algebra::resultant(&g, &d).unwrap()
        );
    }

    #[test]
    fn candidates_match_brute_force() {
        let shape: Shape = "2,2".parse().unwrap();
        let spec = BoxSpec::new(&shape, 2.0).unwrap();
        let xmax = BigInt::from(5000);
        let mut fast = discriminant_candidates(&spec, &xmax, 1 << 20).unwrap();
        fast.sort();
        let mut slow: Vec<Vec<i64>> = spec
            .points(1 << 20)
            .unwrap()
            .filter(|pt| {
                let t = CompositeTower::from_specialization(&Specialization::from_i64s(&shape, pt).unwrap());
                let d = discriminant(t.polynomial()).unwrap().abs();
                !d.is_zero() && d <= xmax
            })
            .collect();
        slow.sort();
        assert_eq!(fast, slow);
    }

    #[test]
    fn slope_fits() {
        let row = |x: f64, n: u64| CountRow {
            x,
            n_fields: n,
            min_disc: "1".into(),
            max_disc: "1".into(),
            n_raw: None,
        };
        let shape: Shape = "2,2".parse().unwrap();
        let linear: Vec<CountRow> = (0..6).map(|i| row(10f64.powi(i + 1), 10u64.pow(i as u32 + 1))).collect();
        let r = run_slope_report(&linear, &shape).unwrap();
        assert!((r.slope - 1.0).abs() < 1e-9 && r.verdict);
        let flat: Vec<CountRow> = (0..6).map(|i| row(10f64.powi(i + 1), 7)).collect();
        let r = run_slope_report(&flat, &shape).unwrap();
        assert!(r.slope.abs() < 1e-12 && !r.verdict);
        assert!(run_slope_report(&flat[..3], &shape).is_err());
    }

    #[test]
    fn small_count_is_order_independent() {
        let shape: Shape = "2,2".parse().unwrap();
        let grid = [1e3, 3e3, 1e4, 3e4, 1e5];
        let a = run_count(&shape, 2.0, &grid, &CountParams::default()).unwrap();
        let b = run_count(
            &shape,
            2.0,
            &grid,
            &CountParams {
                permute: Some(9),
                ..CountParams::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.rows.windows(2).all(|w| w[0].n_fields <= w[1].n_fields));
        assert!(a.rows.last().unwrap().n_fields > 0);
        let below = run_count(&shape, 2.0, &[10.0], &CountParams::default()).unwrap();
        assert_eq!(below.rows[0].n_fields, 0);
    }
}

//! Invariant battery at reduced sizes, one `ok`/`FAIL` line per check.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{discriminant, factor_over_q, IntPoly};
use crate::composer::{psi_prime, psi_prime_inverse, recover_alpha, CompositeTower, GenericComposite, Specialization};
use crate::config::Config;
use crate::galois::{
    certify, containment_check_shape, frobenius_sample, good_primes, reference_distribution, refinement_law_holds,
    splitting_degree, tv_distance, Mode, Verdict,
};
use crate::harness::{fields_isomorphic, run_count, run_slope_report, CountRow};
use crate::heights::{delta_nk, ptw_beta, root_bound_check, theorem_a_exponent, BoxSpec};
use crate::wreath::{a_invariant, CycleType, Shape};

type Check = (&'static str, Box<dyn Fn(&Config, bool) -> bool>);

fn shape(s: &str) -> Shape {
    s.parse().unwrap()
}

fn checks(quick: bool) -> Vec<Check> {
    let mut v: Vec<Check> = vec![
        (
            "exponent grid",
            Box::new(|_, _| {
                (2..=4).all(|n| {
                    (2..=4).all(|k| {
                        let s = Shape::uniform(n, k).unwrap();
                        let d = delta_nk(n as u32, k as u32);
                        theorem_a_exponent(&s).ok() == Some(d.clone()) && d > ptw_beta(n as u32, k as u32)
                    })
                })
            }),
        ),
        (
            "a-invariant",
            Box::new(|cfg, _| {
                ["2,2", "2,3"]
                    .iter()
                    .all(|s| a_invariant(&shape(s), cfg.enumeration_cap, false).map(|a| num_traits::One::is_one(&a)).unwrap_or(false))
            }),
        ),
        (
            "recover_alpha round trip",
            Box::new(|cfg, _| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                ["2,2", "3,2", "2,2,2"].iter().all(|s| {
                    let sh = shape(s);
                    (0..50).all(|_| {
                        let vals: Vec<i64> = (0..sh.coefficient_count()).map(|_| rng.gen_range(-50..=50)).collect();
                        let a = Specialization::from_i64s(&sh, &vals).unwrap();
                        let t = CompositeTower::from_specialization(&a);
                        recover_alpha(t.lowers()).ok() == Some(a.clone())
                            && psi_prime_inverse(&sh, &psi_prime(&t)).ok() == Some(a)
                    })
                })
            }),
        ),
        (
            "degree bounds",
            Box::new(|cfg, _| {
                ["2,2", "2,3", "3,2"]
                    .iter()
                    .all(|s| GenericComposite::build(&shape(s), cfg.term_cap).map(|g| g.degree_bounds_hold()).unwrap_or(false))
            }),
        ),
        (
            "root bound",
            Box::new(|cfg, _| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                (0..100).all(|_| {
                    let d = rng.gen_range(1..=8);
                    let mut c: Vec<i64> = (0..d).map(|_| rng.gen_range(-1_000_000..=1_000_000)).collect();
                    c.push(1);
                    root_bound_check(&IntPoly::from_i64s(&c)).map(|r| r.pass).unwrap_or(false)
                })
            }),
        ),
        (
            "splitting degrees",
            Box::new(|cfg, _| {
                let cases: [(&[i64], u64); 5] = [
                    (&[-2, 0, 0, 0, 1], 8),
                    (&[1, 0, 0, 0, 1], 4),
                    (&[2, 0, -4, 0, 1], 4),
                    (&[-2, 0, 0, 1], 6),
                    (&[1, 0, 1], 2),
                ];
                cases
                    .iter()
                    .all(|(c, d)| splitting_degree(&IntPoly::from_i64s(c), cfg.splitting_cap).ok() == Some(*d))
            }),
        ),
        (
            "exact certification",
            Box::new(|cfg, _| {
                let s = shape("2,2");
                let v = |a: &[i64]| {
                    let t = CompositeTower::from_specialization(&Specialization::from_i64s(&s, a).unwrap());
                    certify(&t, Mode::Exact, &cfg.certify_params()).map(|r| r.verdict).ok()
                };
                v(&[0, 0, 0, -2]) == Some(Verdict::CertifiedEqual) && v(&[0, 0, -4, 2]) == Some(Verdict::CertifiedProper)
            }),
        ),
        (
            "Chebotarev consistency",
            Box::new(|cfg, fault| {
                let s = shape("2,2");
                let t = CompositeTower::from_specialization(&Specialization::from_i64s(&s, &[0, 0, 0, -2]).unwrap());
                let Ok(primes) = good_primes(t.polynomial(), 120) else { return false };
                let Ok((records, _)) = frobenius_sample(&t, &primes) else { return false };
                let mut reference = reference_distribution(&s, cfg.enumeration_cap, cfg.seed);
                if fault {
                    corrupt(&mut reference);
                }
                containment_check_shape(&records, &s, cfg.enumeration_cap).unwrap_or(false)
                    && primes.iter().all(|&p| refinement_law_holds(&t, p))
                    && tv_distance(&records, &reference) < 0.2
            }),
        ),
        (
            "isomorphism test",
            Box::new(|_, _| {
                let p = IntPoly::from_i64s;
                let (a, b, c) = (p(&[-2, 0, 1]), p(&[-8, 0, 1]), p(&[-18, 0, 1]));
                fields_isomorphic(&a, &b).unwrap_or(false)
                    && fields_isomorphic(&b, &a).unwrap_or(false)
                    && fields_isomorphic(&b, &c).unwrap_or(false)
                    && fields_isomorphic(&a, &c).unwrap_or(false)
                    && !fields_isomorphic(&a, &p(&[-3, 0, 1])).unwrap_or(true)
            }),
        ),
        (
            "slope fitter",
            Box::new(|_, _| {
                let rows: Vec<CountRow> = (1..=6)
                    .map(|i| CountRow {
                        x: 10f64.powi(i),
                        n_fields: 10u64.pow(i as u32),
                        min_disc: "1".into(),
                        max_disc: "1".into(),
                        n_raw: None,
                    })
                    .collect();
                run_slope_report(&rows, &shape("2,2")).map(|r| r.verdict).unwrap_or(false)
            }),
        ),
    ];
    if !quick {
        v.push((
            "count order independence",
            Box::new(|cfg, _| {
                let s = shape("2,2");
                let grid = [1e3, 1e4, 1e5];
                let mut params = cfg.count_params();
                let Ok(a) = run_count(&s, 2.0, &grid, &params) else { return false };
                params.permute = Some(cfg.seed ^ 0x5eed);
                let Ok(b) = run_count(&s, 2.0, &grid, &params) else { return false };
                a == b
                    && a.rows.windows(2).all(|w| w[0].n_fields <= w[1].n_fields)
                    && a.fields.iter().all(|f| f.verdict == Verdict::CertifiedEqual)
            }),
        ));
        v.push((
            "quadratic density census",
            Box::new(|cfg, _| {
                let s = shape("2");
                let spec = BoxSpec::new(&s, 3.0).unwrap();
                let Ok(points) = spec.points(1 << 20) else { return false };
                let census = points
                    .filter(|p| {
                        let f = Specialization::from_i64s(&s, p).unwrap().block(1);
                        let d = discriminant(&f).unwrap();
                        d < BigInt::from(0) || d.sqrt() * d.sqrt() != d
                    })
                    .count() as u64;
                crate::galois::density_estimate(&s, 3.0, Mode::Exact, &cfg.density_params())
                    .map(|e| e.n_certified == census)
                    .unwrap_or(false)
            }),
        ));
        v.push((
            "irreducibility of certified points",
            Box::new(|cfg, _| {
                let s = shape("2,2");
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                (0..40).all(|_| {
                    let vals: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
                    let t = CompositeTower::from_specialization(&Specialization::from_i64s(&s, &vals).unwrap());
                    match certify(&t, Mode::Exact, &cfg.certify_params()) {
                        Ok(r) if r.verdict == Verdict::CertifiedEqual => {
                            factor_over_q(t.polynomial()).map(|f| f.is_irreducible()).unwrap_or(false)
                        }
                        Ok(_) | Err(_) => true,
                    }
                })
            }),
        ));
    }
    v
}

/// Moves all mass onto the identity class.
fn corrupt(reference: &mut BTreeMap<CycleType, f64>) {
    for w in reference.values_mut() {
        *w = 0.0;
    }
    let n = reference.keys().next().map_or(1, |c| c.size());
    reference.insert(CycleType::new(vec![1; n]), 1.0);
}

/// Runs the battery; true iff every check passes.
pub fn run(quick: bool, inject_fault: bool, cfg: &Config, out: &mut dyn Write) -> bool {
    let mut all = true;
    for (name, check) in checks(quick) {
        let ok = check(cfg, inject_fault);
        all &= ok;
        let _ = writeln!(out, "{} {name}", if ok { "ok  " } else { "FAIL" });
    }
    let _ = writeln!(out, "{}", if all { "selftest passed" } else { "selftest failed" });
    all
}

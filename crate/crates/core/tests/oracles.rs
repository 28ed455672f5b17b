//! Library results checked against independent brute-force computations.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use wreathcount::algebra::{discriminant, resultant, IntPoly};
use wreathcount::composer::{psi_prime, psi_prime_inverse, recover_alpha, CompositeTower, Specialization};
use wreathcount::galois::{density_estimate, DensityParams, Mode};
use wreathcount::harness::{canonical_form, fields_isomorphic, fiber_discriminant};
use wreathcount::wreath::{enumerate, CycleType, GroupTable, Shape};

fn sylvester_resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (m, n) = (f.deg(), g.deg());
    let size = m + n;
    let mut a = vec![vec![BigRational::zero(); size]; size];
    for i in 0..n {
        for (d, c) in f.coeffs().iter().rev().enumerate() {
            a[i][i + d] = BigRational::from_integer(c.clone());
        }
    }
    for i in 0..m {
        for (d, c) in g.coeffs().iter().rev().enumerate() {
            a[n + i][i + d] = BigRational::from_integer(c.clone());
        }
    }
    let mut det = BigRational::from_integer(1.into());
    for col in 0..size {
        let Some(piv) = (col..size).find(|&r| !a[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..size {
            let factor = &a[r][col] / &a[col][col];
            for c in col..size {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det.to_integer()
}

fn sylvester_discriminant(f: &IntPoly) -> BigInt {
    let n = f.deg();
    let r = sylvester_resultant(f, &f.derivative());
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    r * sign / f.leading().unwrap().clone()
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = IntPoly> {
    (1..=max_deg)
        .prop_flat_map(|d| (proptest::collection::vec(-30i64..=30, d), 1i64..=3))
        .prop_map(|(mut c, lc)| {
            c.push(lc);
            IntPoly::from_i64s(&c)
        })
}

proptest! {
    #[test]
    fn resultant_matches_sylvester(f in poly_strategy(5), g in poly_strategy(4)) {
        prop_assert_eq!(resultant(&f, &g).unwrap(), sylvester_resultant(&f, &g));
    }

    #[test]
    fn discriminant_matches_sylvester(f in poly_strategy(6)) {
        prop_assume!(f.deg() >= 1);
        prop_assert_eq!(discriminant(&f).unwrap(), sylvester_discriminant(&f));
    }

    #[test]
    fn composite_discriminant_factorization(
        h in proptest::collection::vec(-9i64..=9, 2..=3),
        g in proptest::collection::vec(-9i64..=9, 2..=3),
    ) {
        let mk = |c: &[i64]| { let mut v = c.to_vec(); v.push(1); IntPoly::from_i64s(&v) };
        let (h, g) = (mk(&h), mk(&g));
        let lhs = discriminant(&g.compose(&h)).unwrap().abs();
        let rhs = num_traits::pow(discriminant(&g).unwrap().abs(), h.deg())
            * resultant(&g, &fiber_discriminant(&h)).unwrap().abs();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tower_round_trips(vals in proptest::collection::vec(-40i64..=40, 6)) {
        let shape: Shape = "2,2,2".parse().unwrap();
        let alpha = Specialization::from_i64s(&shape, &vals).unwrap();
        let tower = CompositeTower::from_specialization(&alpha);
        prop_assert!(tower.identities_hold());
        prop_assert_eq!(recover_alpha(tower.lowers()).unwrap(), alpha.clone());
        prop_assert_eq!(psi_prime_inverse(&shape, &psi_prime(&tower)).unwrap(), alpha);
    }

    #[test]
    fn canonical_form_is_translation_and_reflection_invariant(
        c in proptest::collection::vec(-20i64..=20, 4), t in -50i64..=50,
    ) {
        let mut v = c.clone();
        v.push(1);
        let f = IntPoly::from_i64s(&v);
        let key = canonical_form(&f);
        prop_assert_eq!(canonical_form(&f.shift(&BigInt::from(t))), key.clone());
        prop_assert_eq!(canonical_form(&f.reflect()), key);
    }
}

/// Lowest level at which two leaves share an ancestor, leaves indexed with i_1 least significant.
fn meet_level(shape: &Shape, a: usize, b: usize) -> usize {
    (0..=shape.k()).find(|&j| a / shape.partial(j) == b / shape.partial(j)).unwrap()
}

fn heap_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    out.push(p.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

#[test]
fn enumeration_matches_tree_automorphisms_by_brute_force() {
    for s in ["2,2", "2,3", "3,2", "2,2,2"] {
        let shape: Shape = s.parse().unwrap();
        let n = shape.leaves();
        let brute: HashSet<Vec<usize>> = heap_permutations(n)
            .into_iter()
            .filter(|p| (0..n).all(|a| (0..n).all(|b| meet_level(&shape, a, b) == meet_level(&shape, p[a], p[b]))))
            .collect();
        let listed: Vec<Vec<usize>> = enumerate(&shape, 1 << 20)
            .unwrap()
            .map(|g| g.leaf_permutation().iter().map(|&x| x as usize).collect())
            .collect();
        let set: HashSet<Vec<usize>> = listed.iter().cloned().collect();
        assert_eq!(set.len(), listed.len(), "{s}: duplicates");
        assert_eq!(set, brute, "{s}");
        assert_eq!(BigInt::from(brute.len()), BigInt::from(shape.group_order()));

        let mut types: BTreeMap<CycleType, u64> = BTreeMap::new();
        for p in &brute {
            let perm: Vec<u32> = p.iter().map(|&x| x as u32).collect();
            *types.entry(CycleType::of_permutation(&perm)).or_default() += 1;
        }
        let table = GroupTable::build(&shape, 1 << 20).unwrap();
        assert_eq!(table.cycle_type_distribution(), types, "{s}");
    }
}

#[test]
fn quadratic_density_matches_discriminant_census() {
    let shape: Shape = "2".parse().unwrap();
    for y in [1.0, 2.0, 4.0, 8.0] {
        let b = (y * y) as i64;
        let bound = y as i64;
        let mut census = 0u64;
        let mut total = 0u64;
        for a in -bound..=bound {
            for c in -b..=b {
                total += 1;
                let d = a * a - 4 * c;
                let r = (d.max(0) as f64).sqrt().round() as i64;
                if d < 0 || r * r != d {
                    census += 1;
                }
            }
        }
        let est = density_estimate(&shape, y, Mode::Exact, &DensityParams::default()).unwrap();
        assert!(est.exhaustive);
        assert_eq!((est.n_tested, est.n_certified), (total, census), "Y={y}");
        assert!((0.0..=1.0).contains(&est.fraction));
    }
}

#[test]
fn degenerate_box_has_zero_density() {
    let shape: Shape = "2,2".parse().unwrap();
    let est = density_estimate(&shape, 0.5, Mode::Exact, &DensityParams::default()).unwrap();
    assert_eq!((est.n_tested, est.n_certified), (1, 0));
}

#[test]
fn isomorphism_is_an_equivalence_on_a_battery() {
    let p = IntPoly::from_i64s;
    // Q(sqrt 2) three ways, Q(sqrt 3), and x^4 - 2 with a translate and a rescaling
    let quad = [p(&[-2, 0, 1]), p(&[-8, 0, 1]), p(&[-1, 2, 1]), p(&[-3, 0, 1])];
    let quart = [p(&[-2, 0, 0, 0, 1]), p(&[-2, 0, 0, 0, 1]).shift(&BigInt::from(3)), p(&[-32, 0, 0, 0, 1]), p(&[-3, 0, 0, 0, 1])];
    for battery in [&quad[..], &quart[..]] {
        let rel: Vec<Vec<bool>> = battery
            .iter()
            .map(|f| battery.iter().map(|g| fields_isomorphic(f, g).unwrap()).collect())
            .collect();
        for i in 0..battery.len() {
            assert!(rel[i][i]);
            for j in 0..battery.len() {
                assert_eq!(rel[i][j], rel[j][i]);
                for k in 0..battery.len() {
                    if rel[i][j] && rel[j][k] {
                        assert!(rel[i][k]);
                    }
                }
            }
        }
        assert_eq!(rel[0], vec![true, true, true, false]);
    }
}

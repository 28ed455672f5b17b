//! Wreath composites F = g_k ∘ ... ∘ g_1, their specializations, and the
//! decomposition that recovers the coefficient vector from the tower.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, IntPoly, LPoly, MultiPoly, StemField, TermCapExceeded};
use crate::wreath::{Shape, WreathError};

pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposerError {
    #[error(transparent)]
    SizeCapExceeded(#[from] TermCapExceeded),
    #[error("expected {expected} coefficients for shape {shape}, got {got}")]
    ShapeMismatch {
        shape: String,
        expected: usize,
        got: usize,
    },
    #[error("inconsistent tower: {0}")]
    InconsistentTower(String),
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error(transparent)]
    Shape(#[from] WreathError),
}

/// Integer values α_{u,v} for the generic coefficients, ordered (1,1), ..., (1,n_1), (2,1), ...
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Specialization {
    shape: Shape,
    values: Vec<BigInt>,
}

impl Specialization {
    pub fn new(shape: &Shape, values: Vec<BigInt>) -> Result<Self, ComposerError> {
        let expected = shape.coefficient_count();
        if values.len() != expected {
            return Err(ComposerError::ShapeMismatch {
                shape: shape.to_string(),
                expected,
                got: values.len(),
            });
        }
        Ok(Specialization {
            shape: shape.clone(),
            values,
        })
    }

    pub fn from_i64s(shape: &Shape, values: &[i64]) -> Result<Self, ComposerError> {
        Self::new(shape, values.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    fn offset(&self, u: usize) -> usize {
        self.shape.entries()[..u - 1].iter().sum()
    }

    /// α_{u,v}, both 1-based.
    pub fn get(&self, u: usize, v: usize) -> &BigInt {
        &self.values[self.offset(u) + v - 1]
    }

    /// g_u(x) = x^{n_u} + sum_v α_{u,v} x^{n_u - v}.
    pub fn block(&self, u: usize) -> IntPoly {
        let n = self.shape.n(u);
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        for v in 1..=n {
            c[n - v] = self.get(u, v).clone();
        }
        IntPoly::new(c)
    }

    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        parts.join(",")
    }
}

/// Symbolic composite over Z[T_{u,v}][x].
#[derive(Clone, Debug)]
pub struct GenericComposite {
    shape: Shape,
    blocks: Vec<MultiPoly>,
    lower: Vec<MultiPoly>,
}

impl GenericComposite {
    /// Variables are T_{u,v} in specialization order followed by x.
    pub fn build(shape: &Shape, cap: usize) -> Result<Self, ComposerError> {
        let m = shape.coefficient_count();
        let nv = m + 1;
        let x = MultiPoly::var(nv, m);
        let mut blocks = Vec::new();
        let mut off = 0;
        for u in 1..=shape.k() {
            let n = shape.n(u);
            let mut b = x.pow(n as u32, cap)?;
            for v in 1..=n {
                let t = MultiPoly::var(nv, off + v - 1);
                b = b.add(&t.mul(&x.pow((n - v) as u32, cap)?, cap)?);
            }
            off += n;
            blocks.push(b);
        }
        let mut lower: Vec<MultiPoly> = vec![blocks[0].clone()];
        for b in &blocks[1..] {
            let next = b.substitute(m, lower.last().unwrap(), cap)?;
            lower.push(next);
        }
        Ok(GenericComposite {
            shape: shape.clone(),
            blocks,
            lower,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn x_var(&self) -> usize {
        self.shape.coefficient_count()
    }

    pub fn t_vars(&self) -> Vec<usize> {
        (0..self.shape.coefficient_count()).collect()
    }

    pub fn block(&self, u: usize) -> &MultiPoly {
        &self.blocks[u - 1]
    }

    /// Symbolic F_j for 1 ≤ j ≤ k.
    pub fn lower(&self, j: usize) -> &MultiPoly {
        &self.lower[j - 1]
    }

    pub fn degree_x(&self, j: usize) -> usize {
        self.lower(j).degree_in(self.x_var()) as usize
    }

    pub fn t_degree(&self, j: usize) -> usize {
        self.lower(j).total_degree_in(&self.t_vars()) as usize
    }

    /// deg_x F_j = N_j and T-degree of F_j at most D_j, for every level.
    pub fn degree_bounds_hold(&self) -> bool {
        (1..=self.shape.k())
            .all(|j| self.degree_x(j) == self.shape.partial(j) && self.t_degree(j) <= self.shape.d(j))
    }

    pub fn specialize(&self, alpha: &Specialization) -> Result<CompositeTower, ComposerError> {
        check_shape(&self.shape, alpha)?;
        let mut vals = alpha.values().to_vec();
        vals.push(BigInt::zero());
        let lower: Vec<IntPoly> = self
            .lower
            .iter()
            .map(|f| f.specialize(&vals, self.x_var()))
            .collect();
        let blocks = (1..=self.shape.k()).map(|u| alpha.block(u)).collect();
        Ok(CompositeTower::assemble(self.shape.clone(), blocks, lower))
    }
}

fn check_shape(shape: &Shape, alpha: &Specialization) -> Result<(), ComposerError> {
    if alpha.shape() != shape {
        return Err(ComposerError::ShapeMismatch {
            shape: shape.to_string(),
            expected: shape.coefficient_count(),
            got: alpha.values().len(),
        });
    }
    Ok(())
}

/// Specialized tower: blocks g_j, lower composites F_j = g_j ∘ ... ∘ g_1 and
/// upper composites Q_j = g_k ∘ ... ∘ g_{j+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeTower {
    shape: Shape,
    blocks: Vec<IntPoly>,
    /// F_1, ..., F_k
    lower: Vec<IntPoly>,
    /// Q_0 = F, ..., Q_k = x
    upper: Vec<IntPoly>,
}

impl CompositeTower {
    pub fn from_specialization(alpha: &Specialization) -> Self {
        let shape = alpha.shape().clone();
        let blocks = (1..=shape.k()).map(|u| alpha.block(u)).collect();
        Self::from_blocks_unchecked(shape, blocks)
    }

    /// Tower from arbitrary blocks of degree at least 2; the shape is read off the degrees.
    pub fn from_blocks(blocks: Vec<IntPoly>) -> Result<Self, ComposerError> {
        if blocks.is_empty() {
            return Err(ComposerError::InvalidBlock("no blocks".into()));
        }
        let shape = Shape::new(blocks.iter().map(|b| b.deg()).collect())?;
        Ok(Self::from_blocks_unchecked(shape, blocks))
    }

    fn from_blocks_unchecked(shape: Shape, blocks: Vec<IntPoly>) -> Self {
        let mut lower = vec![blocks[0].clone()];
        for b in &blocks[1..] {
            let next = b.compose(lower.last().unwrap());
            lower.push(next);
        }
        Self::assemble(shape, blocks, lower)
    }

    fn assemble(shape: Shape, blocks: Vec<IntPoly>, lower: Vec<IntPoly>) -> Self {
        let k = shape.k();
        let mut upper = vec![IntPoly::x(); k + 1];
        for j in (0..k).rev() {
            upper[j] = upper[j + 1].compose(&blocks[j]);
        }
        CompositeTower {
            shape,
            blocks,
            lower,
            upper,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// g_u for 1 ≤ u ≤ k.
    pub fn block(&self, u: usize) -> &IntPoly {
        &self.blocks[u - 1]
    }

    pub fn blocks(&self) -> &[IntPoly] {
        &self.blocks
    }

    /// F_α = F_k.
    pub fn polynomial(&self) -> &IntPoly {
        self.lower.last().unwrap()
    }

    /// F_j for 1 ≤ j ≤ k.
    pub fn lower(&self, j: usize) -> &IntPoly {
        &self.lower[j - 1]
    }

    pub fn lowers(&self) -> &[IntPoly] {
        &self.lower
    }

    /// Q_j for 0 ≤ j ≤ k.
    pub fn upper(&self, j: usize) -> &IntPoly {
        &self.upper[j]
    }

    /// (F_1(0), ..., F_{k-1}(0)).
    pub fn constants(&self) -> Vec<BigInt> {
        self.lower[..self.shape.k() - 1]
            .iter()
            .map(|f| f.coeff(0))
            .collect()
    }

    /// The specialization, when every block is monic.
    pub fn alpha(&self) -> Option<Specialization> {
        if !self.blocks.iter().all(IntPoly::is_monic) {
            return None;
        }
        let mut values = Vec::new();
        for (u, b) in self.blocks.iter().enumerate() {
            let n = self.shape.n(u + 1);
            values.extend((1..=n).map(|v| b.coeff(n - v)));
        }
        Specialization::new(&self.shape, values).ok()
    }

    /// F = Q_j ∘ F_j for all j, Q_{j-1} = Q_j ∘ g_j, deg F_j = N_j.
    pub fn identities_hold(&self) -> bool {
        let k = self.shape.k();
        let f = self.polynomial();
        (1..=k).all(|j| {
            self.upper[j].compose(self.lower(j)) == *f
                && self.upper[j - 1] == self.upper[j].compose(self.block(j))
                && self.lower(j).deg() == self.shape.partial(j)
        }) && self.upper[0] == *f
    }
}

pub fn specialize(g: &GenericComposite, alpha: &Specialization) -> Result<CompositeTower, ComposerError> {
    g.specialize(alpha)
}

/// Tower of shape (n, ..., n) with every block `f`, except that the last one is `f - t`.
pub fn iterate(f: &IntPoly, k: usize, t: &BigInt) -> Result<CompositeTower, ComposerError> {
    if f.deg() < 2 || k == 0 {
        return Err(ComposerError::InvalidBlock(format!("need deg f >= 2 and k >= 1, got {f}")));
    }
    let mut blocks = vec![f.clone(); k];
    blocks[k - 1] = f - &IntPoly::constant(t.clone());
    CompositeTower::from_blocks(blocks)
}

/// Inverts the tower: reads g_1 off F_1, then g_j off the F_{j-1}-adic expansion of F_j.
pub fn recover_alpha(lower: &[IntPoly]) -> Result<Specialization, ComposerError> {
    let bad = |m: String| ComposerError::InconsistentTower(m);
    let first = lower.first().ok_or_else(|| bad("empty tower".into()))?;
    if !first.is_monic() || first.deg() < 2 {
        return Err(bad(format!("F_1 = {first} must be monic of degree at least 2")));
    }
    let mut entries = vec![first.deg()];
    let mut values: Vec<BigInt> = (1..=first.deg()).map(|v| first.coeff(first.deg() - v)).collect();
    for (j, pair) in lower.windows(2).enumerate() {
        let (prev, cur) = (&pair[0], &pair[1]);
        if !cur.is_monic() || cur.deg() % prev.deg() != 0 || cur.deg() / prev.deg() < 2 {
            return Err(bad(format!("degree of F_{} is not a multiple of deg F_{}", j + 2, j + 1)));
        }
        let n = cur.deg() / prev.deg();
        let mut digits = Vec::with_capacity(n + 1);
        let mut rest = cur.clone();
        while !rest.is_zero() {
            let (q, r) = rest.divrem_monic(prev);
            if r.deg() > 0 {
                return Err(bad(format!("F_{} is not a polynomial in F_{}", j + 2, j + 1)));
            }
            digits.push(r.coeff(0));
            rest = q;
        }
        debug_assert!(digits.len() == n + 1 && digits[n].is_one());
        values.extend((1..=n).map(|v| digits[n - v].clone()));
        entries.push(n);
    }
    Specialization::new(&Shape::new(entries)?, values)
}

/// Image of the tower under Ψ′: the composite polynomial with the level polynomials
/// Q_1, ..., Q_{k-1} (standing in for the fields K(z_j)) and the constants F_j(0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PsiPrime {
    #[serde(serialize_with = "ser_poly")]
    pub polynomial: IntPoly,
    #[serde(serialize_with = "ser_polys")]
    pub levels: Vec<IntPoly>,
    #[serde(serialize_with = "ser_ints")]
    pub constants: Vec<BigInt>,
}

fn ser_poly<S: serde::Serializer>(p: &IntPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_csv())
}

fn ser_polys<S: serde::Serializer>(p: &[IntPoly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(IntPoly::to_csv))
}

fn ser_ints<S: serde::Serializer>(p: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|c| c.to_string()))
}

pub fn psi_prime(tower: &CompositeTower) -> PsiPrime {
    let k = tower.shape().k();
    PsiPrime {
        polynomial: tower.polynomial().clone(),
        levels: (1..k).map(|j| tower.upper(j).clone()).collect(),
        constants: tower.constants(),
    }
}

/// Monic right composition factor H of degree `r` with H(0) = 0, determined by the
/// top coefficients of `f` (approximate `deg f / r`-th root). `None` if `f` has no
/// such integral factor candidate.
pub fn right_factor(f: &IntPoly, r: usize) -> Option<IntPoly> {
    let n = f.deg();
    if !f.is_monic() || r == 0 || !n.is_multiple_of(r) {
        return None;
    }
    let s = n / r;
    // reversed series a(t) = t^n f(1/t), root b = a^{1/s} mod t^r
    let a: Vec<BigRational> = (0..r)
        .map(|i| BigRational::from_integer(f.coeff(n - i)))
        .collect();
    let c = BigRational::new(BigInt::one(), BigInt::from(s));
    let mut b = vec![BigRational::one()];
    for m in 1..r {
        let mut acc = BigRational::zero();
        for (kk, ak) in a.iter().enumerate().take(m + 1).skip(1) {
            let w = (&c + BigRational::one()) * BigRational::from_integer(BigInt::from(kk))
                - BigRational::from_integer(BigInt::from(m));
            acc += w * ak * &b[m - kk];
        }
        b.push(acc / BigRational::from_integer(BigInt::from(m)));
    }
    if !b.iter().all(|q| q.is_integer()) {
        return None;
    }
    let mut coeffs = vec![BigInt::zero(); r + 1];
    for (i, q) in b.into_iter().enumerate() {
        coeffs[r - i] = q.to_integer();
    }
    Some(IntPoly::new(coeffs))
}

/// Reconstructs α from a Ψ′ image: each F_j is the degree-N_j right composition
/// factor of F, shifted by its recorded constant term.
pub fn psi_prime_inverse(shape: &Shape, image: &PsiPrime) -> Result<Specialization, ComposerError> {
    let k = shape.k();
    if image.constants.len() + 1 != k || image.polynomial.deg() != shape.leaves() {
        return Err(ComposerError::InconsistentTower("image does not match shape".into()));
    }
    let mut lower = Vec::with_capacity(k);
    for j in 1..k {
        let h = right_factor(&image.polynomial, shape.partial(j))
            .ok_or_else(|| ComposerError::InconsistentTower(format!("no right factor of degree {}", shape.partial(j))))?;
        lower.push(&h + &IntPoly::constant(image.constants[j - 1].clone()));
    }
    lower.push(image.polynomial.clone());
    let alpha = recover_alpha(&lower)?;
    if alpha.shape() != shape {
        return Err(ComposerError::InconsistentTower("recovered shape differs".into()));
    }
    Ok(alpha)
}

/// F_j(x) - Z, the minimal polynomial of a root of F over K(z_j), with Z a formal constant.
#[derive(Clone, Debug)]
pub struct LevelMinPoly {
    pub level: usize,
    /// F_j(x) - Z in the variables (x, Z)
    pub symbolic: MultiPoly,
    /// F_j (F_0 = x)
    pub level_poly: IntPoly,
    /// Q_j, the minimal polynomial of z_j over Q
    pub field_modulus: IntPoly,
}

impl LevelMinPoly {
    /// Instantiates Z as the generator of Q[y]/(Q_j).
    pub fn concretize(&self) -> Result<(StemField, LPoly), AlgebraError> {
        let field = StemField::new(self.field_modulus.clone())?;
        let lifted = field.poly_from_int(&self.level_poly);
        let neg_z = LPoly::new(vec![field.neg(&field.generator())]);
        let g = field.poly_add(&lifted, &neg_z);
        Ok((field, g))
    }
}

pub fn min_poly_over_level(tower: &CompositeTower, j: usize) -> LevelMinPoly {
    assert!(j <= tower.shape().k());
    let level_poly = if j == 0 { IntPoly::x() } else { tower.lower(j).clone() };
    let mut symbolic = MultiPoly::var(2, 1).neg();
    for (i, c) in level_poly.coeffs().iter().enumerate() {
        let term = MultiPoly::monomial(2, 0, i as u32).scale(c);
        symbolic = symbolic.add(&term);
    }
    LevelMinPoly {
        level: j,
        symbolic,
        level_poly,
        field_modulus: tower.upper(j).clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor_lpoly;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn shape(s: &str) -> Shape {
        s.parse().unwrap()
    }

    #[test]
    fn generic_single_block() {
        let g = GenericComposite::build(&shape("2"), 100).unwrap();
        assert_eq!(g.degree_x(1), 2);
        assert_eq!(g.t_degree(1), 1);
        assert_eq!(g.lower(1).term_count(), 3);
    }

    #[test]
    fn degree_bounds_small_grid() {
        for s in ["2,2", "2,3", "3,2", "3,3", "2,2,2"] {
            let g = GenericComposite::build(&shape(s), DEFAULT_TERM_CAP).unwrap();
            assert!(g.degree_bounds_hold(), "{s}");
        }
        let g = GenericComposite::build(&shape("2,2"), 1000).unwrap();
        assert_eq!((g.degree_x(2), g.t_degree(2)), (4, 2));
        assert!(GenericComposite::build(&shape("3,3,3"), 50).is_err());
    }

    #[test]
    fn specialize_examples() {
        let g = GenericComposite::build(&shape("2,2"), 1000).unwrap();
        let a = Specialization::from_i64s(&shape("2,2"), &[0, 0, 0, -2]).unwrap();
        let t = g.specialize(&a).unwrap();
        assert_eq!(*t.polynomial(), p(&[-2, 0, 0, 0, 1]));
        assert_eq!(*t.upper(1), p(&[-2, 0, 1]));
        assert_eq!(t, CompositeTower::from_specialization(&a));

        let b = Specialization::from_i64s(&shape("2,2"), &[0, -2, 3, 1]).unwrap();
        let t = g.specialize(&b).unwrap();
        assert_eq!(*t.polynomial(), p(&[-1, 0, -1, 0, 1]));
        assert_eq!(*t.lower(1), p(&[-2, 0, 1]));
        assert_eq!(t.constants(), vec![BigInt::from(-2)]);
        assert!(t.identities_hold());

        let z = Specialization::from_i64s(&shape("2,2"), &[0, 0, 0, 0]).unwrap();
        assert_eq!(*g.specialize(&z).unwrap().polynomial(), IntPoly::monomial(BigInt::one(), 4));
        assert!(Specialization::from_i64s(&shape("2,2"), &[1, 2, 3]).is_err());
    }

    #[test]
    fn iterate_examples() {
        let t = iterate(&p(&[0, 0, 1]), 2, &BigInt::from(2)).unwrap();
        assert_eq!(*t.polynomial(), p(&[-2, 0, 0, 0, 1]));
        let t = iterate(&p(&[1, 0, 1]), 2, &BigInt::zero()).unwrap();
        assert_eq!(*t.polynomial(), p(&[2, 0, 2, 0, 1]));
        let t = iterate(&p(&[0, 0, 1]), 3, &BigInt::zero()).unwrap();
        assert_eq!(*t.polynomial(), IntPoly::monomial(BigInt::one(), 8));
    }

    #[test]
    fn recover_examples() {
        let a = recover_alpha(&[p(&[-2, 0, 1]), p(&[-1, 0, -1, 0, 1])]).unwrap();
        assert_eq!(a.values(), Specialization::from_i64s(&shape("2,2"), &[0, -2, 3, 1]).unwrap().values());
        let a = recover_alpha(&[p(&[0, 0, 1]), p(&[-2, 0, 0, 0, 1])]).unwrap();
        assert_eq!(a.to_csv(), "0,0,0,-2");
        let a = recover_alpha(&[p(&[7, 5, 1])]).unwrap();
        assert_eq!(a.to_csv(), "5,7");
        assert!(recover_alpha(&[p(&[0, 0, 1]), p(&[0, 1, 0, 0, 1])]).is_err());
    }

    #[test]
    fn psi_prime_inverse_round_trip() {
        let a = Specialization::from_i64s(&shape("2,3,2"), &[3, -1, 2, 0, 5, -4, 1]).unwrap();
        let t = CompositeTower::from_specialization(&a);
        let img = psi_prime(&t);
        assert_eq!(psi_prime_inverse(a.shape(), &img).unwrap(), a);
        let a = Specialization::from_i64s(&shape("2,2"), &[0, 0, 0, -2]).unwrap();
        assert_eq!(psi_prime(&CompositeTower::from_specialization(&a)).constants, vec![BigInt::zero()]);
    }

    #[test]
    fn level_min_polys() {
        let a = Specialization::from_i64s(&shape("2,2"), &[0, 0, 0, -2]).unwrap();
        let t = CompositeTower::from_specialization(&a);
        let top = min_poly_over_level(&t, 2);
        assert_eq!(top.level_poly, *t.polynomial());
        assert_eq!(top.field_modulus, IntPoly::x());
        let bottom = min_poly_over_level(&t, 0);
        assert_eq!(bottom.symbolic.term_count(), 2);
        let (l, g) = min_poly_over_level(&t, 1).concretize().unwrap();
        assert_eq!(l.degree(), 2);
        assert_eq!(g.to_string(), "x^2 + (-a)");
        assert_eq!(factor_lpoly(&g, &l).unwrap().len(), 1);
    }
}

//! Iterated wreath products S_{n_1} ≀ ... ≀ S_{n_k} acting on the leaves of a rooted tree.
//!
//! Leaves are tuples (i_1, ..., i_k) with i_j < n_j, stored as the mixed-radix
//! integer i_1 + n_1 (i_2 + n_2 (...)), so siblings at the bottom level are adjacent.
//! The root branches n_k ways; a node at branching level j has n_j children and
//! there are M_j = n_{j+1} ... n_k such nodes.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WreathError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: BigUint, cap: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    entries: Vec<usize>,
}

impl Shape {
    pub fn new(entries: Vec<usize>) -> Result<Self, WreathError> {
        if entries.is_empty() {
            return Err(WreathError::InvalidShape("empty shape".into()));
        }
        if let Some(&bad) = entries.iter().find(|&&n| !(2..=255).contains(&n)) {
            return Err(WreathError::InvalidShape(format!("entry {bad} outside [2, 255]")));
        }
        Ok(Shape { entries })
    }

    pub fn uniform(n: usize, k: usize) -> Result<Self, WreathError> {
        Self::new(vec![n; k])
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    /// n_j for 1-based j.
    pub fn n(&self, j: usize) -> usize {
        self.entries[j - 1]
    }

    /// N_j = n_1 ... n_j, with N_0 = 1.
    pub fn partial(&self, j: usize) -> usize {
        self.entries[..j].iter().product()
    }

    /// D_1 = 1 and D_j = n_2 ... n_j.
    pub fn d(&self, j: usize) -> usize {
        self.entries[1..j.max(1)].iter().product()
    }

    /// Number of leaves N = N_k.
    pub fn leaves(&self) -> usize {
        self.partial(self.k())
    }

    /// Number of nodes at branching level j: n_{j+1} ... n_k.
    pub fn nodes_at(&self, j: usize) -> usize {
        self.entries[j..].iter().product()
    }

    /// Number of generic coefficients m = n_1 + ... + n_k.
    pub fn coefficient_count(&self) -> usize {
        self.entries.iter().sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.entries.iter().all(|&n| n == self.entries[0])
    }

    /// A = sum_j (n_j + 1)/2 * N_j.
    pub fn exponent_a(&self) -> BigRational {
        (1..=self.k())
            .map(|j| {
                BigRational::new((self.n(j) as i64 + 1).into(), 2.into())
                    * BigRational::from_integer((self.partial(j) as i64).into())
            })
            .sum()
    }

    /// B = A - sum_{j<k} N_j.
    pub fn exponent_b(&self) -> BigRational {
        let corr: i64 = (1..self.k()).map(|j| self.partial(j) as i64).sum();
        self.exponent_a() - BigRational::from_integer(corr.into())
    }

    /// |S(n)| = prod_j (n_j!)^{M_j}.
    pub fn group_order(&self) -> BigUint {
        let mut order = BigUint::one();
        for j in 1..=self.k() {
            let fact: BigUint = (1..=self.n(j) as u64).product();
            order *= num_traits::pow(fact, self.nodes_at(j));
        }
        order
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Shape {
    type Err = WreathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| WreathError::InvalidShape(s.to_string()))?;
        Shape::new(entries)
    }
}

/// Partition of N given by the cycle lengths of a permutation, in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(parts)
    }

    pub fn of_permutation(perm: &[u32]) -> Self {
        let mut seen = vec![false; perm.len()];
        let mut parts = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i] as usize;
                len += 1;
            }
            parts.push(len);
        }
        CycleType::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of moved points minus number of nontrivial cycles.
    pub fn index(&self) -> usize {
        self.size() - self.0.len()
    }

    /// Order of any permutation with this cycle type.
    pub fn order(&self) -> u64 {
        self.0.iter().fold(1u64, |acc, &p| acc.lcm(&(p as u64)))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for CycleType {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycleType::new(parts))
    }
}

/// Element of S(n) given by its portrait: a child permutation at every internal node.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeAutomorphism {
    /// `portrait[j-1][v]` permutes the children of node `v` at branching level `j`.
    portrait: Vec<Vec<Vec<u8>>>,
    leaf_perm: Vec<u32>,
}

impl TreeAutomorphism {
    pub fn identity(shape: &Shape) -> Self {
        let portrait = (1..=shape.k())
            .map(|j| vec![(0..shape.n(j) as u8).collect(); shape.nodes_at(j)])
            .collect();
        Self::from_portrait(shape, portrait)
    }

    /// Builds an element from a portrait; panics if an entry is not a permutation of the right size.
    pub fn from_portrait(shape: &Shape, portrait: Vec<Vec<Vec<u8>>>) -> Self {
        assert_eq!(portrait.len(), shape.k());
        for (j, level) in portrait.iter().enumerate() {
            assert_eq!(level.len(), shape.nodes_at(j + 1));
            for p in level {
                assert!(is_permutation(p, shape.n(j + 1)), "portrait entry is not a permutation");
            }
        }
        let leaf_perm = leaf_permutation(shape, &portrait);
        TreeAutomorphism {
            portrait,
            leaf_perm,
        }
    }

    /// The permutation `perm` applied at node `node` of branching level `j`, identity elsewhere.
    pub fn local(shape: &Shape, j: usize, node: usize, perm: &[u8]) -> Self {
        let mut portrait = Self::identity(shape).portrait;
        portrait[j - 1][node] = perm.to_vec();
        Self::from_portrait(shape, portrait)
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(shape: &Shape, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let portrait = (1..=shape.k())
            .map(|j| {
                (0..shape.nodes_at(j))
                    .map(|_| {
                        let mut p: Vec<u8> = (0..shape.n(j) as u8).collect();
                        p.shuffle(rng);
                        p
                    })
                    .collect()
            })
            .collect();
        Self::from_portrait(shape, portrait)
    }

    pub fn portrait(&self) -> &[Vec<Vec<u8>>] {
        &self.portrait
    }

    pub fn leaf_permutation(&self) -> &[u32] {
        &self.leaf_perm
    }

    pub fn is_identity(&self) -> bool {
        self.leaf_perm.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self, shape: &Shape) -> Self {
        let mut portrait = Vec::with_capacity(shape.k());
        for j in 1..=shape.k() {
            let nj = shape.partial(j);
            let level = (0..shape.nodes_at(j))
                .map(|v| {
                    // image of node v under `other`
                    let hv = other.leaf_perm[v * nj] as usize / nj;
                    let sg = &self.portrait[j - 1][hv];
                    let sh = &other.portrait[j - 1][v];
                    sh.iter().map(|&c| sg[c as usize]).collect()
                })
                .collect();
            portrait.push(level);
        }
        Self::from_portrait(shape, portrait)
    }

    pub fn inverse(&self, shape: &Shape) -> Self {
        let mut portrait = Vec::with_capacity(shape.k());
        for j in 1..=shape.k() {
            let nj = shape.partial(j);
            let mut level = vec![Vec::new(); shape.nodes_at(j)];
            for (v, p) in self.portrait[j - 1].iter().enumerate() {
                let gv = self.leaf_perm[v * nj] as usize / nj;
                let mut inv = vec![0u8; p.len()];
                for (a, &b) in p.iter().enumerate() {
                    inv[b as usize] = a as u8;
                }
                level[gv] = inv;
            }
            portrait.push(level);
        }
        Self::from_portrait(shape, portrait)
    }

    pub fn pow(&self, e: u64, shape: &Shape) -> Self {
        let mut acc = Self::identity(shape);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base, shape);
            }
            base = base.compose(&base, shape);
            e >>= 1;
        }
        acc
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::of_permutation(&self.leaf_perm)
    }

    /// N minus the number of orbits on the leaves.
    pub fn ind(&self) -> usize {
        self.cycle_type().index()
    }

    /// Cycle types of the induced action on the nodes of each level, leaves first.
    pub fn level_signature(&self, shape: &Shape) -> Vec<CycleType> {
        (0..shape.k())
            .map(|j| {
                let nj = shape.partial(j) as u32;
                let perm: Vec<u32> = (0..shape.nodes_at(j))
                    .map(|v| self.leaf_perm[v * nj as usize] / nj)
                    .collect();
                CycleType::of_permutation(&perm)
            })
            .collect()
    }
}

impl fmt::Debug for TreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeAutomorphism{:?}", self.leaf_perm)
    }
}

fn is_permutation(p: &[u8], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n
        && p.iter().all(|&x| {
            let x = x as usize;
            x < n && !std::mem::replace(&mut seen[x], true)
        })
}

fn leaf_permutation(shape: &Shape, portrait: &[Vec<Vec<u8>>]) -> Vec<u32> {
    let k = shape.k();
    let n_leaves = shape.leaves();
    let mut out = Vec::with_capacity(n_leaves);
    let mut digits = vec![0usize; k];
    for leaf in 0..n_leaves {
        let mut r = leaf;
        for (j, d) in digits.iter_mut().enumerate() {
            *d = r % shape.entries[j];
            r /= shape.entries[j];
        }
        // top-down; the node is addressed by the original path above it
        let mut image = 0usize;
        for j in (1..=k).rev() {
            let node = leaf / shape.partial(j);
            let child = portrait[j - 1][node][digits[j - 1]] as usize;
            image += child * shape.partial(j - 1);
        }
        out.push(image as u32);
    }
    out
}

fn all_permutations(n: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u8);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn check_cap(shape: &Shape, cap: u64) -> Result<u64, WreathError> {
    let order = shape.group_order();
    match order.to_u64() {
        Some(o) if o <= cap => Ok(o),
        _ => Err(WreathError::CapExceeded { order, cap }),
    }
}

/// Odometer over portraits; yields every element exactly once.
pub struct Enumeration {
    shape: Shape,
    perms: Vec<Vec<Vec<u8>>>,
    /// (level index, node) for each odometer digit
    slots: Vec<(usize, usize)>,
    counters: Vec<usize>,
    done: bool,
}

impl Iterator for Enumeration {
    type Item = TreeAutomorphism;

    fn next(&mut self) -> Option<TreeAutomorphism> {
        if self.done {
            return None;
        }
        let mut portrait: Vec<Vec<Vec<u8>>> = (1..=self.shape.k())
            .map(|j| vec![Vec::new(); self.shape.nodes_at(j)])
            .collect();
        for (&(l, v), &c) in self.slots.iter().zip(&self.counters) {
            portrait[l][v] = self.perms[l][c].clone();
        }
        let g = TreeAutomorphism::from_portrait(&self.shape, portrait);
        // advance
        self.done = true;
        for (i, &(l, _)) in self.slots.iter().enumerate() {
            self.counters[i] += 1;
            if self.counters[i] < self.perms[l].len() {
                self.done = false;
                break;
            }
            self.counters[i] = 0;
        }
        Some(g)
    }
}

/// All elements of S(n), provided the group order is at most `cap`.
pub fn enumerate(shape: &Shape, cap: u64) -> Result<Enumeration, WreathError> {
    check_cap(shape, cap)?;
    let perms = (1..=shape.k()).map(|j| all_permutations(shape.n(j))).collect();
    let slots: Vec<(usize, usize)> = (0..shape.k())
        .flat_map(|l| (0..shape.nodes_at(l + 1)).map(move |v| (l, v)))
        .collect();
    let counters = vec![0; slots.len()];
    Ok(Enumeration {
        shape: shape.clone(),
        perms,
        slots,
        counters,
        done: false,
    })
}

/// Generators: the transposition (0 1) and the n_j-cycle at the first node of every level.
pub fn generators(shape: &Shape) -> Vec<TreeAutomorphism> {
    let mut gens = Vec::new();
    for j in 1..=shape.k() {
        let n = shape.n(j);
        let mut t: Vec<u8> = (0..n as u8).collect();
        t.swap(0, 1);
        gens.push(TreeAutomorphism::local(shape, j, 0, &t));
        if n > 2 {
            let c: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
            gens.push(TreeAutomorphism::local(shape, j, 0, &c));
        }
    }
    gens
}

/// Transposition of two sibling leaves; has index 1.
pub fn sibling_transposition(shape: &Shape) -> TreeAutomorphism {
    let mut t: Vec<u8> = (0..shape.n(1) as u8).collect();
    t.swap(0, 1);
    TreeAutomorphism::local(shape, 1, 0, &t)
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    pub representative: TreeAutomorphism,
    pub size: u64,
    pub cycle_type: CycleType,
    pub level_signature: Vec<CycleType>,
}

/// Fully enumerated group with its conjugacy classes.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub shape: Shape,
    pub elements: Vec<TreeAutomorphism>,
    /// class id of each element
    pub class_of: Vec<usize>,
    pub classes: Vec<ConjugacyClass>,
    pub exponent: u64,
}

impl GroupTable {
    pub fn build(shape: &Shape, cap: u64) -> Result<Self, WreathError> {
        let elements: Vec<TreeAutomorphism> = enumerate(shape, cap)?.collect();
        let lookup: HashMap<&[u32], usize> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.leaf_permutation(), i))
            .collect();
        let gens = generators(shape);
        let gens_inv: Vec<TreeAutomorphism> = gens.iter().map(|s| s.inverse(shape)).collect();
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut raw: Vec<(usize, u64)> = Vec::new();
        for start in 0..elements.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = raw.len();
            class_of[start] = id;
            let mut size = 1u64;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (s, si) in gens.iter().zip(&gens_inv) {
                    let c = s.compose(&elements[i], shape).compose(si, shape);
                    let ci = lookup[c.leaf_permutation()];
                    if class_of[ci] == usize::MAX {
                        class_of[ci] = id;
                        size += 1;
                        queue.push_back(ci);
                    }
                }
            }
            raw.push((start, size));
        }
        // order classes by (cycle type, level signature, first element)
        let mut order: Vec<usize> = (0..raw.len()).collect();
        let sig: Vec<(CycleType, Vec<CycleType>)> = raw
            .iter()
            .map(|&(i, _)| (elements[i].cycle_type(), elements[i].level_signature(shape)))
            .collect();
        order.sort_by(|&a, &b| sig[a].cmp(&sig[b]).then(raw[a].0.cmp(&raw[b].0)));
        let mut relabel = vec![0; raw.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let classes = order
            .iter()
            .map(|&old| ConjugacyClass {
                representative: elements[raw[old].0].clone(),
                size: raw[old].1,
                cycle_type: sig[old].0.clone(),
                level_signature: sig[old].1.clone(),
            })
            .collect();
        for c in class_of.iter_mut() {
            *c = relabel[*c];
        }
        let exponent = elements
            .iter()
            .fold(1u64, |acc, g| acc.lcm(&g.cycle_type().order()));
        Ok(GroupTable {
            shape: shape.clone(),
            elements,
            class_of,
            classes,
            exponent,
        })
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    fn index_of(&self, g: &TreeAutomorphism) -> usize {
        self.elements
            .iter()
            .position(|h| h.leaf_permutation() == g.leaf_permutation())
            .expect("element of the group")
    }

    pub fn min_index(&self) -> usize {
        self.classes
            .iter()
            .map(|c| c.cycle_type.index())
            .filter(|&i| i > 0)
            .min()
            .unwrap_or(0)
    }

    /// Classes of minimal index, up to C ~ C^m for m coprime to `modulus`.
    pub fn b_invariant_with_modulus(&self, modulus: u64) -> usize {
        let min = self.min_index();
        let ids: Vec<usize> = (0..self.classes.len())
            .filter(|&c| self.classes[c].cycle_type.index() == min)
            .collect();
        let mut parent: HashMap<usize, usize> = ids.iter().map(|&c| (c, c)).collect();
        fn find(p: &mut HashMap<usize, usize>, x: usize) -> usize {
            let mut r = x;
            while p[&r] != r {
                r = p[&r];
            }
            p.insert(x, r);
            r
        }
        for &c in &ids {
            let rep = &self.classes[c].representative;
            for m in (1..modulus).filter(|m| m.gcd(&modulus) == 1) {
                let pc = self.class_of[self.index_of(&rep.pow(m, &self.shape))];
                let (a, b) = (find(&mut parent, c), find(&mut parent, pc));
                if a != b {
                    parent.insert(a.max(b), a.min(b));
                }
            }
        }
        let mut roots: Vec<usize> = ids.iter().map(|&c| find(&mut parent, c)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn b_invariant(&self) -> usize {
        self.b_invariant_with_modulus(self.exponent)
    }

    pub fn cycle_type_distribution(&self) -> BTreeMap<CycleType, u64> {
        let mut out = BTreeMap::new();
        for c in &self.classes {
            *out.entry(c.cycle_type.clone()).or_insert(0) += c.size;
        }
        out
    }
}

/// a(S(n)) = 1 / min index. With `shortcut`, the sibling transposition witnesses index 1
/// and enumeration is only used as a cross-check when the group is within `cap`.
pub fn a_invariant(shape: &Shape, cap: u64, shortcut: bool) -> Result<BigRational, WreathError> {
    let witness = sibling_transposition(shape);
    debug_assert_eq!(witness.ind(), 1);
    if shortcut {
        if check_cap(shape, cap).is_ok() {
            let min = min_index_by_enumeration(shape, cap)?;
            assert_eq!(min, 1, "enumeration disagrees with the transposition witness");
        }
        return Ok(BigRational::one());
    }
    let min = min_index_by_enumeration(shape, cap)?;
    Ok(BigRational::new(1.into(), (min as i64).into()))
}

fn min_index_by_enumeration(shape: &Shape, cap: u64) -> Result<usize, WreathError> {
    Ok(enumerate(shape, cap)?
        .filter(|g| !g.is_identity())
        .map(|g| g.ind())
        .min()
        .unwrap_or(0))
}

pub fn cycle_type_distribution(shape: &Shape, cap: u64) -> Result<BTreeMap<CycleType, u64>, WreathError> {
    let mut out = BTreeMap::new();
    for g in enumerate(shape, cap)? {
        *out.entry(g.cycle_type()).or_insert(0u64) += 1;
    }
    Ok(out)
}

pub fn b_invariant_q(shape: &Shape, cap: u64) -> Result<usize, WreathError> {
    Ok(GroupTable::build(shape, cap)?.b_invariant())
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariants {
    pub order: u64,
    pub a: String,
    #[serde(rename = "b_Q")]
    pub b_q: usize,
    /// b computed with |G| as the coprimality modulus instead of the exponent
    #[serde(rename = "b_Q_order_modulus")]
    pub b_q_order_modulus: usize,
    pub min_index: usize,
    pub class_count: usize,
    pub exponent: u64,
    pub cycle_type_distribution: BTreeMap<String, u64>,
}

pub fn invariants(shape: &Shape, cap: u64) -> Result<Invariants, WreathError> {
    let table = GroupTable::build(shape, cap)?;
    let min = table.min_index();
    Ok(Invariants {
        order: table.order(),
        a: crate::fmt_rational(&BigRational::new(1.into(), (min as i64).into())),
        b_q: table.b_invariant(),
        b_q_order_modulus: table.b_invariant_with_modulus(table.order()),
        min_index: min,
        class_count: table.classes.len(),
        exponent: table.exponent,
        cycle_type_distribution: table
            .cycle_type_distribution()
            .into_iter()
            .map(|(t, c)| (t.to_string(), c))
            .collect(),
    })
}

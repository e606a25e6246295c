//! Brute-force finite models: `SL2`/`GL2` over `Z/p^ℓ` and `F_p[t]/t^ℓ`,
//! congruence and Iwahori subgroups, double cosets and exact Hecke
//! structure constants by counting.
//!
//! Ring elements are encoded as integers in `0..p^ℓ`. For `Z/p^ℓ` this is
//! the residue itself; for `F_p[t]/t^ℓ` the base-`p` digits are the
//! coefficients of `1, t, t², …`. In both cases reduction modulo the
//! `m`-th power of the uniformizer is reduction of the code modulo `p^m`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rational::Q;
use crate::ramification::is_prime;

pub const RING_CAP: u64 = 27;
pub const GROUP_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    /// `Z/p^ℓ`, a truncation of a mixed-characteristic valuation ring.
    Integers,
    /// `F_p[t]/t^ℓ`, a truncation of an equal-characteristic one.
    Polynomial,
}

#[derive(Clone, Debug)]
pub struct TruncRing {
    kind: RingKind,
    p: u32,
    ell: u32,
    size: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<Option<u32>>,
}

impl PartialEq for TruncRing {
    fn eq(&self, other: &Self) -> bool {
        (self.kind, self.p, self.ell) == (other.kind, other.p, other.ell)
    }
}

impl TruncRing {
    pub fn new(kind: RingKind, p: u32, ell: u32) -> Result<Self> {
        Self::with_cap(kind, p, ell, RING_CAP)
    }

    pub fn with_cap(kind: RingKind, p: u32, ell: u32, cap: u64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::Validation(format!("{p} is not prime")));
        }
        if ell == 0 {
            return Err(Error::Validation("ℓ must be positive".into()));
        }
        let size = (p as u64).checked_pow(ell).filter(|&s| s <= cap);
        let size = size.ok_or_else(|| Error::Resource(format!("ring size {p}^{ell} exceeds the cap {cap}")))? as u32;
        let digits = |x: u32| -> Vec<u32> { (0..ell).map(|i| x / p.pow(i) % p).collect() };
        let encode = |d: &[u32]| -> u32 { d.iter().enumerate().map(|(i, &c)| c * p.pow(i as u32)).sum() };
        let n = size as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for x in 0..size {
            for y in 0..size {
                let k = (x * size + y) as usize;
                match kind {
                    RingKind::Integers => {
                        add[k] = (x + y) % size;
                        mul[k] = ((x as u64 * y as u64) % size as u64) as u32;
                    }
                    RingKind::Polynomial => {
                        let (dx, dy) = (digits(x), digits(y));
                        let s: Vec<u32> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                        add[k] = encode(&s);
                        let mut prod = vec![0u32; ell as usize];
                        for i in 0..ell as usize {
                            for j in 0..(ell as usize - i) {
                                prod[i + j] = (prod[i + j] + dx[i] * dy[j]) % p;
                            }
                        }
                        mul[k] = encode(&prod);
                    }
                }
            }
        }
        let inv = (0..size).map(|x| (0..size).find(|&y| mul[(x * size + y) as usize] == 1)).collect();
        Ok(TruncRing { kind, p, ell, size, add, mul, inv })
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[(x * self.size + y) as usize]
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[(x * self.size + y) as usize]
    }

    pub fn neg(&self, x: u32) -> u32 {
        (0..self.size).find(|&y| self.add(x, y) == 0).unwrap()
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        self.inv[x as usize]
    }

    pub fn pow(&self, x: u32, k: u32) -> u32 {
        (0..k).fold(1 % self.size, |acc, _| self.mul(acc, x))
    }

    /// Reduction modulo the `m`-th power of the maximal ideal.
    pub fn reduce(&self, x: u32, m: u32) -> u32 {
        x % self.p.pow(m.min(self.ell))
    }

    /// Image of the uniformizer (`p` or `t`).
    pub fn uniformizer(&self) -> u32 {
        if self.ell == 1 {
            0
        } else {
            self.p
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupType {
    SL2,
    GL2,
}

/// Row-major `[a, b, c, d]`.
pub type Mat2 = [u32; 4];

/// A finite group of 2×2 matrices, enumerated in lexicographic order.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    ring: TruncRing,
    gtype: GroupType,
    elements: Vec<Mat2>,
    lookup: Vec<u32>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn group_type(&self) -> GroupType {
        self.gtype
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> Mat2 {
        self.elements[i]
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    fn code(&self, m: &Mat2) -> usize {
        let q = self.ring.size as usize;
        ((m[0] as usize * q + m[1] as usize) * q + m[2] as usize) * q + m[3] as usize
    }

    pub fn index_of(&self, m: &Mat2) -> Option<usize> {
        if m.iter().any(|&x| x >= self.ring.size) {
            return None;
        }
        match self.lookup[self.code(m)] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub fn mat_mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        let r = &self.ring;
        [
            r.add(r.mul(x[0], y[0]), r.mul(x[1], y[2])),
            r.add(r.mul(x[0], y[1]), r.mul(x[1], y[3])),
            r.add(r.mul(x[2], y[0]), r.mul(x[3], y[2])),
            r.add(r.mul(x[2], y[1]), r.mul(x[3], y[3])),
        ]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index_of(&self.mat_mul(&self.elements[i], &self.elements[j])).expect("closed under multiplication")
    }

    pub fn inv(&self, i: usize) -> usize {
        let r = &self.ring;
        let [a, b, c, d] = self.elements[i];
        let det = r.sub(r.mul(a, d), r.mul(b, c));
        let di = r.inv(det).expect("determinant is a unit");
        let m = [r.mul(di, d), r.mul(di, r.neg(b)), r.mul(di, r.neg(c)), r.mul(di, a)];
        self.index_of(&m).expect("closed under inverses")
    }

    pub fn identity(&self) -> usize {
        self.index_of(&[1, 0, 0, 1]).unwrap()
    }

    /// A generating set, chosen greedily in index order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }
}

/// Expected orders of `SL2`/`GL2` over a length-`ℓ` truncation with residue
/// field `F_p`.
pub fn predicted_order(p: u64, ell: u32, gtype: GroupType) -> u64 {
    match gtype {
        GroupType::SL2 => p.pow(3 * (ell - 1)) * p * (p * p - 1),
        GroupType::GL2 => p.pow(4 * (ell - 1)) * (p * p - 1) * (p * p - p),
    }
}

pub fn build_group(ring: &TruncRing, gtype: GroupType) -> Result<FiniteGroup> {
    build_group_with_cap(ring, gtype, GROUP_CAP)
}

pub fn build_group_with_cap(ring: &TruncRing, gtype: GroupType, cap: usize) -> Result<FiniteGroup> {
    let predicted = predicted_order(ring.p as u64, ring.ell, gtype);
    if predicted > cap as u64 {
        return Err(Error::Resource(format!("group order {predicted} exceeds the cap {cap}")));
    }
    let q = ring.size;
    let mut elements = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let det = ring.sub(ring.mul(a, d), ring.mul(b, c));
                    let ok = match gtype {
                        GroupType::SL2 => det == 1 % q,
                        GroupType::GL2 => ring.inv(det).is_some(),
                    };
                    if ok {
                        elements.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    if elements.len() as u64 != predicted {
        return Err(Error::Computation(format!("enumerated {} elements, expected {predicted}", elements.len())));
    }
    let mut lookup = vec![u32::MAX; (q as usize).pow(4)];
    let mut g = FiniteGroup { ring: ring.clone(), gtype, elements, lookup: vec![], generators: vec![] };
    for (i, m) in g.elements.iter().enumerate() {
        lookup[g.code(m)] = i as u32;
    }
    g.lookup = lookup;
    // the determinant condition gives closure; inverses are checked explicitly
    for i in 0..g.order() {
        let j = g.inv(i);
        if g.mul(i, j) != g.identity() {
            return Err(Error::Computation("inverse check failed".into()));
        }
    }
    let mut generators = Vec::new();
    let mut span = Subgroup::trivial(&g);
    for i in 0..g.order() {
        if !span.members[i] {
            generators.push(i);
            span = Subgroup::generated(&g, &generators);
        }
    }
    g.generators = generators;
    Ok(g)
}

/// A subgroup given by its membership vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub members: Vec<bool>,
    pub elements: Vec<usize>,
}

impl Subgroup {
    fn from_members(members: Vec<bool>) -> Self {
        let elements = members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        Subgroup { members, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Self::from_members(vec![true; g.order()])
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        let mut m = vec![false; g.order()];
        m[g.identity()] = true;
        Self::from_members(m)
    }

    /// Closure of the given elements.
    pub fn generated(g: &FiniteGroup, gens: &[usize]) -> Self {
        let mut members = vec![false; g.order()];
        let id = g.identity();
        members[id] = true;
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            for &s in gens {
                let y = g.mul(x, s);
                if !members[y] {
                    members[y] = true;
                    stack.push(y);
                }
            }
        }
        Self::from_members(members)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&i| other.members[i])
    }

    pub fn is_normal(&self, g: &FiniteGroup) -> bool {
        g.generators().iter().all(|&s| self.elements.iter().all(|&k| self.members[g.conjugate(s, k)]))
    }
}

/// Kernel of reduction modulo the `m`-th power of the maximal ideal; `m = 0`
/// gives the whole group.
pub fn congruence_subgroup(g: &FiniteGroup, m: u32) -> Result<Subgroup> {
    if m > g.ring.ell {
        return Err(Error::Argument(format!("level {m} exceeds ℓ = {}", g.ring.ell)));
    }
    let r = &g.ring;
    let members = g
        .elements
        .iter()
        .map(|x| {
            r.reduce(x[0], m) == r.reduce(1, m)
                && r.reduce(x[1], m) == 0
                && r.reduce(x[2], m) == 0
                && r.reduce(x[3], m) == r.reduce(1, m)
        })
        .collect();
    let k = Subgroup::from_members(members);
    if !k.is_normal(g) {
        return Err(Error::Computation("congruence subgroup is not normal".into()));
    }
    Ok(k)
}

/// Matrices whose lower-left entry lies in the maximal ideal (the Borel
/// subgroup when `ℓ = 1`).
pub fn iwahori_subgroup(g: &FiniteGroup) -> Subgroup {
    Subgroup::from_members(g.elements.iter().map(|x| g.ring.reduce(x[2], 1) == 0).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCosetTable {
    /// Minimal element index of each double coset, increasing.
    pub representatives: Vec<usize>,
    #[serde(skip)]
    pub membership: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl DoubleCosetTable {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn members(&self, i: usize) -> Vec<usize> {
        (0..self.membership.len()).filter(|&x| self.membership[x] == i).collect()
    }
}

/// Double cosets `K x K`. The coset of the identity comes first, the others
/// follow in order of their minimal element; each is represented by its
/// minimal element index.
pub fn double_cosets(g: &FiniteGroup, k: &Subgroup) -> DoubleCosetTable {
    let mut membership = vec![usize::MAX; g.order()];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    let order = std::iter::once(g.identity()).chain(0..g.order());
    for x in order {
        if membership[x] != usize::MAX {
            continue;
        }
        let idx = representatives.len();
        let left: Vec<usize> = k.elements.iter().map(|&a| g.mul(a, x)).collect();
        let mut size = 0;
        let mut min = x;
        for &y in &left {
            for &b in &k.elements {
                let z = g.mul(y, b);
                if membership[z] == usize::MAX {
                    membership[z] = idx;
                    size += 1;
                    min = min.min(z);
                }
            }
        }
        representatives.push(min);
        sizes.push(size);
    }
    DoubleCosetTable { representatives, membership, sizes }
}

/// Exact structure constants of the Hecke algebra of `K`-bi-invariant
/// functions in the basis of double-coset indicators, with `vol(K) = 1`:
/// `c_{ij}^k = #{y ∈ coset_i : y^{-1} g_k ∈ coset_j} / |K|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    pub dim: usize,
    pub k_order: usize,
    pub sizes: Vec<usize>,
    /// `(i, j) ↦ [(k, count)]`, counts before division by `|K|`.
    pub counts: BTreeMap<(usize, usize), Vec<(usize, u64)>>,
}

pub type HeckeVector = BTreeMap<usize, Q>;

impl StructureConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Q {
        self.counts
            .get(&(i, j))
            .and_then(|v| v.iter().find(|e| e.0 == k))
            .map(|&(_, c)| Q::new((c as i64).into(), (self.k_order as i64).into()))
            .unwrap_or_else(Q::zero)
    }

    pub fn product(&self, i: usize, j: usize) -> HeckeVector {
        let mut out = HeckeVector::new();
        for &(k, c) in self.counts.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[]) {
            out.insert(k, Q::new((c as i64).into(), (self.k_order as i64).into()));
        }
        out
    }

    /// Bilinear extension of the basis products.
    pub fn convolve(&self, a: &HeckeVector, b: &HeckeVector) -> HeckeVector {
        let mut out = HeckeVector::new();
        for (&i, x) in a {
            for (&j, y) in b {
                for (k, c) in self.product(i, j) {
                    *out.entry(k).or_insert_with(Q::zero) += x * y * c;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// `q_i = |coset_i| / |K|`.
    pub fn q_parameters(&self) -> Vec<Q> {
        self.sizes.iter().map(|&s| Q::new((s as i64).into(), (self.k_order as i64).into())).collect()
    }

    /// `Σ_k c_{ij}^k |coset_k| = |coset_i| |coset_j| / |K|` for all `i, j`.
    pub fn mass_conservation(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let lhs: u64 = self
                    .counts
                    .get(&(i, j))
                    .map(|v| v.iter().map(|&(k, c)| c * self.sizes[k] as u64).sum())
                    .unwrap_or(0);
                lhs == (self.sizes[i] * self.sizes[j]) as u64
            })
        })
    }

    pub fn unit(&self) -> HeckeVector {
        HeckeVector::from([(0, Q::from_integer(1.into()))])
    }
}

pub fn hecke_structure_constants(g: &FiniteGroup, k: &Subgroup, table: &DoubleCosetTable) -> StructureConstants {
    hecke_structure_constants_with(g, k, table, Exec::default())
}

pub fn hecke_structure_constants_with(
    g: &FiniteGroup,
    k: &Subgroup,
    table: &DoubleCosetTable,
    exec: Exec,
) -> StructureConstants {
    let n = table.len();
    let inverses: Vec<usize> = (0..g.order()).map(|x| g.inv(x)).collect();
    let per_k: Vec<BTreeMap<(usize, usize), u64>> = exec.map_range(n, |kk| {
        let gk = table.representatives[kk];
        let mut tally = BTreeMap::new();
        for y in 0..g.order() {
            let j = table.membership[g.mul(inverses[y], gk)];
            *tally.entry((table.membership[y], j)).or_insert(0u64) += 1;
        }
        tally
    });
    let mut counts: BTreeMap<(usize, usize), Vec<(usize, u64)>> = BTreeMap::new();
    for (kk, tally) in per_k.into_iter().enumerate() {
        for (ij, c) in tally {
            counts.entry(ij).or_default().push((kk, c));
        }
    }
    StructureConstants { dim: n, k_order: k.order(), sizes: table.sizes.clone(), counts }
}

/// Double cosets and structure constants together.
#[derive(Clone, Debug)]
pub struct FiniteHecke {
    pub table: DoubleCosetTable,
    pub constants: StructureConstants,
}

impl FiniteHecke {
    pub fn new(g: &FiniteGroup, k: &Subgroup) -> Self {
        let table = double_cosets(g, k);
        let constants = hecke_structure_constants(g, k, &table);
        FiniteHecke { table, constants }
    }
}

/// Ring maps applied entrywise to matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingMap {
    Identity,
    /// `Σ a_i t^i ↦ Σ a_i^p t^i`, the Frobenius of the coefficient field.
    CoefficientFrobenius,
    /// `t ↦ u t` for a unit `u` (given by its code).
    Substitution(u32),
}

impl RingMap {
    pub fn apply(&self, r: &TruncRing, x: u32) -> Result<u32> {
        match *self {
            RingMap::Identity => Ok(x),
            RingMap::CoefficientFrobenius | RingMap::Substitution(_) if r.kind != RingKind::Polynomial => {
                Err(Error::Argument("this ring map needs a polynomial ring".into()))
            }
            RingMap::CoefficientFrobenius => Ok((0..r.ell).fold(0, |acc, i| {
                let a = x / r.p.pow(i) % r.p;
                let ap = (0..r.p).fold(1u32, |v, _| v * a % r.p);
                acc + ap * r.p.pow(i)
            })),
            RingMap::Substitution(u) => {
                if u >= r.size || r.inv(u).is_none() {
                    return Err(Error::Argument(format!("{u} is not a unit")));
                }
                let ut = r.mul(u, r.uniformizer());
                Ok((0..r.ell).fold(0, |acc, i| {
                    let a = x / r.p.pow(i) % r.p;
                    r.add(acc, r.mul(a, r.pow(ut, i)))
                }))
            }
        }
    }
}

/// Bijection `G1 → G2` induced entrywise by a ring map.
pub fn ring_map_iso(g1: &FiniteGroup, g2: &FiniteGroup, f: RingMap) -> Result<Vec<usize>> {
    g1.elements
        .iter()
        .map(|m| {
            let image = [f.apply(&g1.ring, m[0])?, f.apply(&g1.ring, m[1])?, f.apply(&g1.ring, m[2])?, f.apply(&g1.ring, m[3])?];
            g2.index_of(&image).ok_or_else(|| Error::Argument("ring map does not land in the target group".into()))
        })
        .collect()
}

pub fn conjugation_iso(g: &FiniteGroup, by: usize) -> Vec<usize> {
    (0..g.order()).map(|x| g.conjugate(by, x)).collect()
}

/// `x ↦ (x^T)^{-1}`.
pub fn transpose_inverse_iso(g: &FiniteGroup) -> Vec<usize> {
    (0..g.order())
        .map(|x| {
            let [a, b, c, d] = g.element(g.inv(x));
            g.index_of(&[a, c, b, d]).unwrap()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub pass: bool,
    pub discrepancy: Option<String>,
    /// Coset index on the first side ↦ coset index on the second.
    pub coset_map: Vec<usize>,
}

impl TransferReport {
    fn fail(msg: String) -> Self {
        TransferReport { pass: false, discrepancy: Some(msg), coset_map: vec![] }
    }
}

/// Checks that `iso` is a group isomorphism carrying `K1` onto `K2`, the
/// double cosets onto each other, and every structure constant to its image.
pub fn transfer_check(
    g1: &FiniteGroup,
    k1: &Subgroup,
    g2: &FiniteGroup,
    k2: &Subgroup,
    iso: &[usize],
) -> TransferReport {
    if let Some(msg) = iso_obstruction(g1, g2, iso) {
        return TransferReport::fail(msg);
    }
    if let Some(&x) = k1.elements.iter().find(|&&x| !k2.members[iso[x]]) {
        return TransferReport::fail(format!("element {x} of K1 is not sent into K2"));
    }
    if k1.order() != k2.order() {
        return TransferReport::fail(format!("|K1| = {} but |K2| = {}", k1.order(), k2.order()));
    }
    let h1 = FiniteHecke::new(g1, k1);
    let h2 = FiniteHecke::new(g2, k2);
    match coset_correspondence(&h1.table, &h2.table, iso) {
        Err(msg) => TransferReport::fail(msg),
        Ok(map) => {
            for i in 0..h1.table.len() {
                for j in 0..h1.table.len() {
                    for k in 0..h1.table.len() {
                        let (a, b) = (h1.constants.get(i, j, k), h2.constants.get(map[i], map[j], map[k]));
                        if a != b {
                            return TransferReport::fail(format!("c_{{{i}{j}}}^{k} = {a} but its image is {b}"));
                        }
                    }
                }
            }
            TransferReport { pass: true, discrepancy: None, coset_map: map }
        }
    }
}

fn iso_obstruction(g1: &FiniteGroup, g2: &FiniteGroup, iso: &[usize]) -> Option<String> {
    if iso.len() != g1.order() || g1.order() != g2.order() {
        return Some("the map is not a bijection between groups of equal order".into());
    }
    let mut seen = vec![false; g2.order()];
    for &y in iso {
        if y >= g2.order() || std::mem::replace(&mut seen[y], true) {
            return Some(format!("the map is not injective (image {y} repeated or out of range)"));
        }
    }
    for &s in g1.generators() {
        for x in 0..g1.order() {
            if iso[g1.mul(x, s)] != g2.mul(iso[x], iso[s]) {
                return Some(format!("not a homomorphism at element {x} times generator {s}"));
            }
        }
    }
    None
}

fn coset_correspondence(t1: &DoubleCosetTable, t2: &DoubleCosetTable, iso: &[usize]) -> std::result::Result<Vec<usize>, String> {
    if t1.len() != t2.len() {
        return Err(format!("{} double cosets versus {}", t1.len(), t2.len()));
    }
    let mut map = vec![usize::MAX; t1.len()];
    for (x, &c) in t1.membership.iter().enumerate() {
        let d = t2.membership[iso[x]];
        if map[c] == usize::MAX {
            map[c] = d;
        } else if map[c] != d {
            return Err(format!("double coset {c} is split by the map (element {x})"));
        }
    }
    if map.iter().collect::<BTreeSet<_>>().len() != map.len() {
        return Err("two double cosets have the same image".into());
    }
    Ok(map)
}

/// `1_{K_r}` written in the `K_m`-double-coset basis (`K_m ≤ K_r`).
pub fn idempotent_expansion(km: &Subgroup, kr: &Subgroup, table: &DoubleCosetTable) -> Result<HeckeVector> {
    if !km.is_subgroup_of(kr) {
        return Err(Error::Argument("K_m must be contained in K_r".into()));
    }
    let mut out = HeckeVector::new();
    for &x in &kr.elements {
        out.insert(table.membership[x], Q::from_integer(1.into()));
    }
    Ok(out)
}

/// Expands `1_{K_r}` in the `K_m`-basis on both sides, checks it is a
/// multiple of an idempotent (`1_{K_r} * 1_{K_r} = [K_r : K_m] 1_{K_r}`) and
/// that `iso` carries one expansion onto the other.
#[allow(clippy::too_many_arguments)]
pub fn idempotent_transfer_check(
    g1: &FiniteGroup,
    km1: &Subgroup,
    kr1: &Subgroup,
    g2: &FiniteGroup,
    km2: &Subgroup,
    kr2: &Subgroup,
    iso: &[usize],
) -> Result<bool> {
    if !km1.is_subgroup_of(kr1) || !km2.is_subgroup_of(kr2) {
        return Err(Error::Argument("K_m must be contained in K_r on both sides".into()));
    }
    if iso_obstruction(g1, g2, iso).is_some() {
        return Ok(false);
    }
    let h1 = FiniteHecke::new(g1, km1);
    let h2 = FiniteHecke::new(g2, km2);
    let Ok(map) = coset_correspondence(&h1.table, &h2.table, iso) else { return Ok(false) };
    let e1 = idempotent_expansion(km1, kr1, &h1.table)?;
    let e2 = idempotent_expansion(km2, kr2, &h2.table)?;
    for (h, e, kr, km) in [(&h1, &e1, kr1, km1), (&h2, &e2, kr2, km2)] {
        let index = Q::new((kr.order() as i64).into(), (km.order() as i64).into());
        let square = h.constants.convolve(e, e);
        let scaled: HeckeVector = e.iter().map(|(&k, v)| (k, v * &index)).collect();
        if square != scaled {
            return Ok(false);
        }
    }
    let image: HeckeVector = e1.iter().map(|(&k, v)| (map[k], v.clone())).collect();
    Ok(image == e2)
}

//! Presented Hecke algebras `C[Ω, μ] ⋉ H(W_aff, q)` with exact arithmetic.
//!
//! The Coxeter group is realized on its root space through an integer
//! generalized Cartan matrix (`a_ij a_ji = 0, 1, 2, 3, 4` for
//! `m = 2, 3, 4, 6, ∞`), which is faithful. Elements are stored as shortlex
//! normal forms of reduced words. Coefficients live in `Q(ζ_N)` with `N` the
//! order of the cocycle.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::finitemodels::StructureConstants;
use crate::rational::{qi, Q};

pub const DEFAULT_LENGTH_CAP: usize = 64;
pub const OMEGA_CAP: usize = 16;
const LABEL_CAP: usize = 8;

/// Bond value `m(s, t)`; `0` encodes `∞`.
pub type Bond = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterSystem {
    labels: Vec<String>,
    m: Vec<Vec<Bond>>,
    /// Cartan matrix `a_ij = ⟨α_i^∨, α_j⟩`.
    cartan: Vec<Vec<i64>>,
}

impl CoxeterSystem {
    pub fn new(labels: Vec<String>, m: Vec<Vec<Bond>>) -> Result<Self> {
        let n = labels.len();
        if n > LABEL_CAP {
            return Err(Error::Resource(format!("at most {LABEL_CAP} simple reflections are supported")));
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::Validation("labels must be distinct".into()));
        }
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("bond matrix must be {n}×{n}")));
        }
        let mut cartan = vec![vec![0i64; n]; n];
        for i in 0..n {
            if m[i][i] != 1 {
                return Err(Error::Validation("m(s, s) must be 1".into()));
            }
            cartan[i][i] = 2;
            for j in 0..n {
                if i == j {
                    continue;
                }
                if m[i][j] != m[j][i] {
                    return Err(Error::Validation("bond matrix must be symmetric".into()));
                }
                let (a, b) = match m[i][j] {
                    2 => (0, 0),
                    3 => (-1, -1),
                    4 => (-1, -2),
                    6 => (-1, -3),
                    0 => (-2, -2),
                    other => {
                        return Err(Error::Validation(format!(
                            "bond {other} is not crystallographic (allowed: 2, 3, 4, 6, ∞)"
                        )))
                    }
                };
                if i < j {
                    cartan[i][j] = a;
                    cartan[j][i] = b;
                }
            }
        }
        Ok(CoxeterSystem { labels, m, cartan })
    }

    /// Affine `Ã_n` (`n ≥ 1`), labels `s0..sn`.
    pub fn affine_a(n: usize) -> Result<Self> {
        let k = n + 1;
        let labels = (0..k).map(|i| format!("s{i}")).collect();
        let mut m = vec![vec![2; k]; k];
        for i in 0..k {
            m[i][i] = 1;
        }
        if n == 1 {
            m[0][1] = 0;
            m[1][0] = 0;
        } else {
            for i in 0..k {
                let j = (i + 1) % k;
                m[i][j] = 3;
                m[j][i] = 3;
            }
        }
        Self::new(labels, m)
    }

    /// Finite `A_n`, labels `s1..sn`.
    pub fn finite_a(n: usize) -> Result<Self> {
        let labels = (1..=n).map(|i| format!("s{i}")).collect();
        let mut m = vec![vec![2; n]; n];
        for i in 0..n {
            m[i][i] = 1;
            if i + 1 < n {
                m[i][i + 1] = 3;
                m[i + 1][i] = 3;
            }
        }
        Self::new(labels, m)
    }

    /// Disjoint union of two systems.
    pub fn product(&self, other: &CoxeterSystem) -> Result<Self> {
        let n = self.rank();
        let k = other.rank();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut m = vec![vec![2; n + k]; n + k];
        for i in 0..n + k {
            for j in 0..n + k {
                if i < n && j < n {
                    m[i][j] = self.m[i][j];
                } else if i >= n && j >= n {
                    m[i][j] = other.m[i - n][j - n];
                }
            }
        }
        Self::new(labels, m)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn bond(&self, i: usize, j: usize) -> Bond {
        self.m[i][j]
    }

    pub fn bonds(&self) -> &[Vec<Bond>] {
        &self.m
    }

    pub fn label_index(&self, s: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == s)
    }

    /// `v ↦ v S_i` on row vectors, i.e. right multiplication by the matrix of `s_i`.
    fn right_mul_reflection(&self, mat: &mut [Vec<i64>], i: usize) -> Result<()> {
        // s_i(α_j) = α_j - a_ij α_i: column j of S_i is e_j - a_ij e_i
        for row in mat.iter_mut() {
            let ri = row[i];
            for j in 0..self.rank() {
                if j == i {
                    row[j] = -ri;
                } else {
                    let d = self.cartan[i][j].checked_mul(ri).ok_or_else(overflow)?;
                    row[j] = row[j].checked_sub(d).ok_or_else(overflow)?;
                }
            }
        }
        Ok(())
    }

    fn identity_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
    }

    /// Matrix of `w^{-1}` for the word `w`.
    fn inverse_matrix(&self, word: &[u8]) -> Result<Vec<Vec<i64>>> {
        let mut m = self.identity_matrix();
        for &s in word.iter().rev() {
            self.right_mul_reflection(&mut m, s as usize)?;
        }
        Ok(m)
    }

    /// Shortlex normal form: repeatedly strip the smallest left descent.
    pub fn normal_form(&self, word: &[u8]) -> Result<Vec<u8>> {
        if let Some(&s) = word.iter().find(|&&s| s as usize >= self.rank()) {
            return Err(Error::Argument(format!("letter {s} out of range")));
        }
        let n = self.rank();
        let mut m = self.inverse_matrix(word)?;
        let mut out = Vec::new();
        while m != self.identity_matrix() {
            // s_i is a left descent iff w^{-1}(α_i) < 0
            let i = (0..n)
                .find(|&i| (0..n).all(|r| m[r][i] <= 0))
                .ok_or_else(|| Error::Computation("no descent found for a nontrivial element".into()))?;
            out.push(i as u8);
            self.right_mul_reflection(&mut m, i)?;
            if out.len() > word.len() {
                return Err(Error::Computation("normal form longer than the input word".into()));
            }
        }
        Ok(out)
    }

    pub fn length(&self, word: &[u8]) -> Result<usize> {
        Ok(self.normal_form(word)?.len())
    }

    /// Whether `ℓ(s w) < ℓ(w)`.
    pub fn is_left_descent(&self, s: u8, word: &[u8]) -> Result<bool> {
        let m = self.inverse_matrix(word)?;
        let i = s as usize;
        Ok((0..self.rank()).all(|r| m[r][i] <= 0))
    }

    /// Reduced words of all elements of length at most `len`.
    pub fn ball(&self, len: usize) -> Result<Vec<Vec<u8>>> {
        let mut all = vec![vec![]];
        let mut frontier = vec![vec![]];
        let mut seen: BTreeSet<Vec<u8>> = BTreeSet::from([vec![]]);
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..self.rank() as u8 {
                    let mut v = vec![s];
                    v.extend_from_slice(w);
                    let nf = self.normal_form(&v)?;
                    if nf.len() > w.len() && seen.insert(nf.clone()) {
                        next.push(nf);
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(all)
    }
}

fn overflow() -> Error {
    Error::Resource("integer overflow in the root representation".into())
}

/// A finite group `Ω` acting on the simple reflections by diagram
/// automorphisms. Element `0` is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaGroup {
    pub table: Vec<Vec<usize>>,
    /// `action[ω][s]` is the image of label `s` under `ω`.
    pub action: Vec<Vec<usize>>,
}

impl OmegaGroup {
    pub fn trivial(rank: usize) -> Self {
        OmegaGroup { table: vec![vec![0]], action: vec![(0..rank).collect()] }
    }

    /// `Z/n` with the generator acting by `perm`.
    pub fn cyclic(n: usize, perm: &[usize]) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let mut action = vec![(0..perm.len()).collect::<Vec<_>>()];
        for k in 1..n {
            let prev: &Vec<usize> = &action[k - 1];
            action.push(prev.iter().map(|&s| perm[s]).collect());
        }
        OmegaGroup { table, action }
    }

    /// `Z/2 × Z/2`, elements `(a, b) ↦ a + 2b`, generators acting by `p1`, `p2`.
    pub fn klein(p1: &[usize], p2: &[usize]) -> Self {
        let table = (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect();
        let id: Vec<usize> = (0..p1.len()).collect();
        let both: Vec<usize> = p1.iter().map(|&s| p2[s]).collect();
        OmegaGroup { table, action: vec![id, p1.to_vec(), p2.to_vec(), both] }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).unwrap()
    }

    pub fn act(&self, w: usize, s: usize) -> usize {
        self.action[w][s]
    }

    pub fn validate(&self, cox: &CoxeterSystem) -> Result<()> {
        let n = self.order();
        if n == 0 || n > OMEGA_CAP {
            return Err(Error::Validation(format!("Ω must have between 1 and {OMEGA_CAP} elements")));
        }
        if self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Validation("Ω multiplication table is malformed".into()));
        }
        for a in 0..n {
            if self.table[0][a] != a || self.table[a][0] != a {
                return Err(Error::Validation("element 0 of Ω must be the identity".into()));
            }
            if !(0..n).any(|b| self.table[a][b] == 0) {
                return Err(Error::Validation(format!("element {a} of Ω has no inverse")));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Validation("Ω multiplication is not associative".into()));
                    }
                }
            }
        }
        let r = cox.rank();
        if self.action.len() != n
            || self.action.iter().any(|p| p.len() != r || p.iter().collect::<BTreeSet<_>>().len() != r || p.iter().any(|&s| s >= r))
        {
            return Err(Error::Validation("Ω must act by permutations of the simple reflections".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if (0..r).any(|s| self.act(self.mul(a, b), s) != self.act(a, self.act(b, s))) {
                    return Err(Error::Validation("Ω action is not a homomorphism".into()));
                }
            }
            for s in 0..r {
                for t in 0..r {
                    if cox.bond(self.act(a, s), self.act(a, t)) != cox.bond(s, t) {
                        return Err(Error::Validation("Ω must preserve the Coxeter diagram".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Greedy generating set.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([0]);
        for x in 0..self.order() {
            if !span.contains(&x) {
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut span = BTreeSet::from([0]);
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if span.insert(y) {
                    stack.push(y);
                }
            }
        }
        span
    }
}

/// Normalized 2-cocycle `Ω × Ω → Z/N`, read as `N`-th roots of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle {
    pub order: u32,
    pub values: Vec<Vec<u32>>,
}

impl Cocycle {
    pub fn trivial(omega_order: usize) -> Self {
        Cocycle { order: 1, values: vec![vec![0; omega_order]; omega_order] }
    }

    pub fn validate(&self, omega: &OmegaGroup) -> Result<()> {
        let n = omega.order();
        let big_n = self.order;
        if big_n == 0 {
            return Err(Error::Validation("cocycle order must be positive".into()));
        }
        if self.values.len() != n || self.values.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("cocycle table must be {n}×{n}")));
        }
        let v = |a: usize, b: usize| (self.values[a][b] % big_n) as u64;
        for a in 0..n {
            if v(0, a) != 0 || v(a, 0) != 0 {
                return Err(Error::Validation("cocycle must be normalized".into()));
            }
            for b in 0..n {
                for c in 0..n {
                    let lhs = v(a, b) + v(omega.mul(a, b), c);
                    let rhs = v(b, c) + v(a, omega.mul(b, c));
                    if lhs % big_n as u64 != rhs % big_n as u64 {
                        return Err(Error::Validation(format!("cocycle identity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// The same cocycle with values in `Z/(k N)`.
    pub fn rescaled(&self, k: u32) -> Cocycle {
        Cocycle { order: self.order * k, values: self.values.iter().map(|r| r.iter().map(|&x| (x % self.order) * k).collect()).collect() }
    }
}

/// `Q(ζ_N)` as `Q[x]/Φ_N(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloField {
    n: u32,
    /// Monic `Φ_N`, low degree first.
    phi: Vec<i64>,
}

/// An element of a [`CycloField`]: coefficients of `1, ζ, …, ζ^{d-1}`.
pub type Cyc = Vec<Q>;

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; r.len() - dd];
    for k in (0..q.len()).rev() {
        let c = r[k + dd] / den[dd];
        q[k] = c;
        for (i, &d) in den.iter().enumerate() {
            r[k + i] -= c * d;
        }
    }
    q
}

impl CycloField {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Validation("cocycle order must lie in 1..=64".into()));
        }
        let mut phis: BTreeMap<u32, Vec<i64>> = BTreeMap::new();
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            let mut num = vec![0i64; d as usize + 1];
            num[0] = -1;
            num[d as usize] = 1;
            for (&e, phi_e) in &phis {
                if d % e == 0 {
                    num = poly_div_exact(&num, phi_e);
                }
            }
            phis.insert(d, num);
        }
        Ok(CycloField { n, phi: phis.remove(&n).unwrap() })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn zero(&self) -> Cyc {
        vec![Q::zero(); self.degree()]
    }

    pub fn from_q(&self, x: Q) -> Cyc {
        let mut v = self.zero();
        v[0] = x;
        v
    }

    pub fn one(&self) -> Cyc {
        self.from_q(Q::one())
    }

    fn reduce(&self, mut v: Vec<Q>) -> Cyc {
        let d = self.degree();
        for k in (d..v.len()).rev() {
            let c = std::mem::take(&mut v[k]);
            if c.is_zero() {
                continue;
            }
            for (i, &p) in self.phi.iter().enumerate().take(d) {
                v[k - d + i] -= &c * qi(p);
            }
        }
        v.resize(d, Q::zero());
        v
    }

    /// `ζ^k`.
    pub fn zeta(&self, k: i64) -> Cyc {
        let e = k.rem_euclid(self.n as i64) as usize;
        let mut v = vec![Q::zero(); e + 1];
        v[e] = Q::one();
        self.reduce(v)
    }

    pub fn add(&self, a: &Cyc, b: &Cyc) -> Cyc {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &Cyc, b: &Cyc) -> Cyc {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn mul(&self, a: &Cyc, b: &Cyc) -> Cyc {
        let mut v = vec![Q::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        self.reduce(v)
    }

    pub fn is_zero(&self, a: &Cyc) -> bool {
        a.iter().all(Zero::is_zero)
    }

    pub fn render(&self, a: &Cyc) -> String {
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}·ζ"),
                _ => format!("{c}·ζ^{k}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// q-parameters per simple reflection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeParams {
    pub q: Vec<Q>,
}

impl HeckeParams {
    /// Rejects non-positive values and unequal values on labels joined by an
    /// odd bond (such reflections are conjugate).
    pub fn new(cox: &CoxeterSystem, q: Vec<Q>) -> Result<Self> {
        if q.len() != cox.rank() {
            return Err(Error::Validation(format!("expected {} q-values", cox.rank())));
        }
        if let Some(i) = q.iter().position(|x| *x <= Q::zero()) {
            return Err(Error::Validation(format!("q at {} must be positive", cox.labels[i])));
        }
        for i in 0..cox.rank() {
            for j in 0..cox.rank() {
                let m = cox.bond(i, j);
                if i != j && m % 2 == 1 && q[i] != q[j] {
                    return Err(Error::Validation(format!(
                        "{} and {} are braid-linked (m = {m}) but have different q",
                        cox.labels[i], cox.labels[j]
                    )));
                }
            }
        }
        Ok(HeckeParams { q })
    }

    pub fn uniform(cox: &CoxeterSystem, q: Q) -> Self {
        HeckeParams { q: vec![q; cox.rank()] }
    }
}

/// `q(π) = 1` for irreducible `π`, else `dim π_1 / dim π_2` with the larger
/// dimension on top.
pub fn q_from_induction(dim1: u64, dim2: Option<u64>) -> Result<Q> {
    if dim1 == 0 || dim2 == Some(0) {
        return Err(Error::Argument("dimensions must be positive".into()));
    }
    Ok(match dim2 {
        None => Q::one(),
        Some(d2) => Q::new(dim1.max(d2).into(), dim1.min(d2).into()),
    })
}

/// Basis element `ω T_w` as `(ω, normal form of w)`.
pub type BasisKey = (usize, Vec<u8>);

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HeckeElement {
    pub terms: BTreeMap<BasisKey, Cyc>,
}

impl HeckeElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `C[Ω, μ] ⋉ H(W_aff, q)` with `T_w ω = ω T_{ω^{-1}(w)}` and
/// `ω_1 ω_2 = μ(ω_1, ω_2) (ω_1 ω_2)`.
#[derive(Clone, Debug)]
pub struct HeckeAlgebra {
    cox: CoxeterSystem,
    params: HeckeParams,
    omega: OmegaGroup,
    cocycle: Cocycle,
    field: CycloField,
    length_cap: usize,
}

pub fn build_block_algebra(
    cox: CoxeterSystem,
    omega: OmegaGroup,
    params: HeckeParams,
    cocycle: Cocycle,
) -> Result<HeckeAlgebra> {
    HeckeAlgebra::new(cox, omega, params, cocycle, DEFAULT_LENGTH_CAP)
}

impl HeckeAlgebra {
    pub fn new(
        cox: CoxeterSystem,
        omega: OmegaGroup,
        params: HeckeParams,
        cocycle: Cocycle,
        length_cap: usize,
    ) -> Result<Self> {
        let params = HeckeParams::new(&cox, params.q)?;
        omega.validate(&cox)?;
        cocycle.validate(&omega)?;
        for w in 0..omega.order() {
            for s in 0..cox.rank() {
                if params.q[omega.act(w, s)] != params.q[s] {
                    return Err(Error::Validation(format!(
                        "q is not Ω-invariant at {} ↦ {}",
                        cox.labels[s],
                        cox.labels[omega.act(w, s)]
                    )));
                }
            }
        }
        let field = CycloField::new(cocycle.order)?;
        Ok(HeckeAlgebra { cox, params, omega, cocycle, field, length_cap })
    }

    pub fn coxeter(&self) -> &CoxeterSystem {
        &self.cox
    }

    pub fn params(&self) -> &HeckeParams {
        &self.params
    }

    pub fn omega(&self) -> &OmegaGroup {
        &self.omega
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn field(&self) -> &CycloField {
        &self.field
    }

    /// The same algebra with coefficients in `Q(ζ_{kN})`.
    pub fn rescaled(&self, k: u32) -> Result<HeckeAlgebra> {
        HeckeAlgebra::new(self.cox.clone(), self.omega.clone(), self.params.clone(), self.cocycle.rescaled(k), self.length_cap)
    }

    pub fn basis(&self, omega: usize, word: &[u8]) -> Result<HeckeElement> {
        if omega >= self.omega.order() {
            return Err(Error::Argument(format!("Ω has no element {omega}")));
        }
        let nf = self.cox.normal_form(word)?;
        Ok(HeckeElement { terms: BTreeMap::from([((omega, nf), self.field.one())]) })
    }

    pub fn t(&self, word: &[u8]) -> Result<HeckeElement> {
        self.basis(0, word)
    }

    pub fn one(&self) -> HeckeElement {
        self.t(&[]).unwrap()
    }

    pub fn scalar(&self, x: Q) -> HeckeElement {
        self.scale(&self.one(), &self.field.from_q(x))
    }

    pub fn add(&self, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
        let mut out = a.clone();
        for (k, v) in &b.terms {
            let e = out.terms.entry(k.clone()).or_insert_with(|| self.field.zero());
            *e = self.field.add(e, v);
        }
        out.terms.retain(|_, v| !self.field.is_zero(v));
        out
    }

    pub fn scale(&self, a: &HeckeElement, c: &Cyc) -> HeckeElement {
        let mut out = HeckeElement::default();
        for (k, v) in &a.terms {
            let x = self.field.mul(v, c);
            if !self.field.is_zero(&x) {
                out.terms.insert(k.clone(), x);
            }
        }
        out
    }

    pub fn sub(&self, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
        self.add(a, &self.scale(b, &self.field.from_q(-Q::one())))
    }

    fn check_len(&self, w: &[u8]) -> Result<()> {
        if w.len() > self.length_cap {
            return Err(Error::Resource(format!("word length exceeds the cap {}", self.length_cap)));
        }
        Ok(())
    }

    /// `T_s T_w` in the Iwahori–Matsumoto basis.
    fn left_mul_simple(&self, s: u8, w: &[u8]) -> Result<Vec<(Vec<u8>, Q)>> {
        let mut sw = vec![s];
        sw.extend_from_slice(w);
        let sw = self.cox.normal_form(&sw)?;
        self.check_len(&sw)?;
        if sw.len() > w.len() {
            Ok(vec![(sw, Q::one())])
        } else {
            let q = &self.params.q[s as usize];
            Ok(vec![(sw, q.clone()), (w.to_vec(), q - Q::one())])
        }
    }

    /// `T_x T_w` for words in normal form.
    fn mul_words(&self, x: &[u8], w: &[u8]) -> Result<BTreeMap<Vec<u8>, Q>> {
        let mut acc: BTreeMap<Vec<u8>, Q> = BTreeMap::from([(w.to_vec(), Q::one())]);
        for &s in x.iter().rev() {
            let mut next: BTreeMap<Vec<u8>, Q> = BTreeMap::new();
            for (v, c) in &acc {
                for (u, d) in self.left_mul_simple(s, v)? {
                    *next.entry(u).or_insert_with(Q::zero) += c * d;
                }
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
        Ok(acc)
    }

    fn relabel(&self, omega: usize, w: &[u8]) -> Result<Vec<u8>> {
        let v: Vec<u8> = w.iter().map(|&s| self.omega.act(omega, s as usize) as u8).collect();
        self.cox.normal_form(&v)
    }

    pub fn multiply(&self, a: &HeckeElement, b: &HeckeElement) -> Result<HeckeElement> {
        let mut out = HeckeElement::default();
        for ((o1, w1), c1) in &a.terms {
            for ((o2, w2), c2) in &b.terms {
                let o = self.omega.mul(*o1, *o2);
                let mu = self.field.zeta(self.cocycle.values[*o1][*o2] as i64);
                let coeff = self.field.mul(&self.field.mul(c1, c2), &mu);
                let moved = self.relabel(self.omega.inv(*o2), w1)?;
                for (u, d) in self.mul_words(&moved, w2)? {
                    let term = self.field.mul(&coeff, &self.field.from_q(d));
                    let e = out.terms.entry((o, u)).or_insert_with(|| self.field.zero());
                    *e = self.field.add(e, &term);
                }
            }
        }
        out.terms.retain(|_, v| !self.field.is_zero(v));
        Ok(out)
    }

    /// `(T_s - q_s)(T_s + 1)`, zero for every `s` in a valid algebra.
    pub fn quadratic_defect(&self, s: usize) -> Result<HeckeElement> {
        let ts = self.t(&[s as u8])?;
        let left = self.sub(&ts, &self.scalar(self.params.q[s].clone()));
        let right = self.add(&ts, &self.one());
        self.multiply(&left, &right)
    }

    pub fn render(&self, a: &HeckeElement) -> Vec<(String, String)> {
        a.terms
            .iter()
            .map(|((o, w), c)| {
                let word: Vec<&str> = w.iter().map(|&s| self.cox.labels[s as usize].as_str()).collect();
                let basis = match (o, word.is_empty()) {
                    (0, true) => "1".to_string(),
                    (0, false) => format!("T[{}]", word.join(" ")),
                    (o, true) => format!("ω{o}"),
                    (o, false) => format!("ω{o}·T[{}]", word.join(" ")),
                };
                (basis, self.field.render(c))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidCheck {
    pub s: String,
    pub t: String,
    pub m: Bond,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidReport {
    pub checks: Vec<BraidCheck>,
    /// Pairs with `m = ∞`, which impose no relation.
    pub skipped: Vec<(String, String)>,
    pub quadratic: Vec<(String, bool)>,
    pub all_hold: bool,
}

/// Expands `T_s T_t T_s ⋯` and `T_t T_s T_t ⋯` (`m` factors each) for every
/// pair, plus the quadratic relations.
pub fn check_braid(alg: &HeckeAlgebra) -> Result<BraidReport> {
    let cox = &alg.cox;
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for i in 0..cox.rank() {
        for j in i + 1..cox.rank() {
            let m = cox.bond(i, j);
            if m == 0 {
                skipped.push((cox.labels[i].clone(), cox.labels[j].clone()));
                continue;
            }
            let prod = |a: usize, b: usize| -> Result<HeckeElement> {
                let mut x = alg.one();
                for k in 0..m as usize {
                    let s = if k % 2 == 0 { a } else { b };
                    x = alg.multiply(&x, &alg.t(&[s as u8])?)?;
                }
                Ok(x)
            };
            let holds = prod(i, j)? == prod(j, i)?;
            checks.push(BraidCheck { s: cox.labels[i].clone(), t: cox.labels[j].clone(), m, holds });
        }
    }
    let quadratic = (0..cox.rank())
        .map(|s| Ok((cox.labels[s].clone(), alg.quadratic_defect(s)?.is_zero())))
        .collect::<Result<Vec<_>>>()?;
    let all_hold = checks.iter().all(|c| c.holds) && quadratic.iter().all(|q| q.1);
    Ok(BraidReport { checks, skipped, quadratic, all_hold })
}

/// Generator correspondence between two presented algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// Label of `A` ↦ label of `B`.
    pub labels: Vec<(String, String)>,
    pub label_perm: Vec<usize>,
    pub omega_map: Vec<usize>,
    /// Common cocycle order used for the comparison.
    pub order: u32,
    /// `f` with `μ_B(φa, φb) - μ_A(a, b) = f(a) + f(b) - f(ab)` mod `order`.
    pub coboundary: Vec<u32>,
    pub anti_involution_preserved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    RankMismatch { a: usize, b: usize },
    OmegaOrderMismatch { a: usize, b: usize },
    BraidMismatch { s: String, t: String, m_a: Bond, m_b: Bond },
    QMismatch { node: String, image: String, q_a: String, q_b: String },
    OmegaMismatch { detail: String },
    CocycleClassMismatch { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MatchResult {
    Match(Matching),
    Failure(Obstruction),
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Group isomorphisms `Ω_A → Ω_B`, found by assigning images to generators.
fn omega_isomorphisms(a: &OmegaGroup, b: &OmegaGroup) -> Vec<Vec<usize>> {
    let n = a.order();
    if n != b.order() {
        return vec![];
    }
    let gens = a.generators();
    // express every element as a word in the generators
    let mut word_of: Vec<Option<Vec<usize>>> = vec![None; n];
    word_of[0] = Some(vec![]);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (gi, &g) in gens.iter().enumerate() {
            let y = a.mul(x, g);
            if word_of[y].is_none() {
                let mut w = word_of[x].clone().unwrap();
                w.push(gi);
                word_of[y] = Some(w);
                queue.push_back(y);
            }
        }
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    loop {
        let map: Vec<usize> = word_of
            .iter()
            .map(|w| w.as_ref().unwrap().iter().fold(0, |acc, &gi| b.mul(acc, images[gi])))
            .collect();
        let bijective = map.iter().collect::<BTreeSet<_>>().len() == n;
        if bijective && (0..n).all(|x| (0..n).all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y]))) {
            out.push(map);
        }
        // odometer over generator images
        let mut k = 0;
        loop {
            if k == images.len() {
                return out;
            }
            images[k] += 1;
            if images[k] < n {
                break;
            }
            images[k] = 0;
            k += 1;
        }
    }
}

/// Solves `δ(x, y) = f(x) + f(y) - f(xy)` mod `order` with `f(0) = 0`.
fn find_coboundary(omega: &OmegaGroup, delta: &[Vec<u32>], order: u32) -> Option<Vec<u32>> {
    let n = omega.order();
    let gens = omega.generators();
    let total = (order as u64).checked_pow(gens.len() as u32)?;
    for code in 0..total {
        let mut f: Vec<Option<u32>> = vec![None; n];
        f[0] = Some(0);
        let mut c = code;
        for &g in &gens {
            f[g] = Some((c % order as u64) as u32);
            c /= order as u64;
        }
        // propagate f(xg) = f(x) + f(g) - δ(x, g)
        let mut stack: Vec<usize> = (0..n).filter(|&x| f[x].is_some()).collect();
        let mut consistent = true;
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = omega.mul(x, g);
                let val = (f[x].unwrap() + f[g].unwrap() + order - delta[x][g] % order) % order;
                match f[y] {
                    None => {
                        f[y] = Some(val);
                        stack.push(y);
                    }
                    Some(v) if v != val => consistent = false,
                    _ => {}
                }
            }
        }
        if !consistent || f.iter().any(Option::is_none) {
            continue;
        }
        let f: Vec<u32> = f.into_iter().map(Option::unwrap).collect();
        let ok = (0..n).all(|x| (0..n).all(|y| (f[x] + f[y] + order - f[omega.mul(x, y)]) % order == delta[x][y] % order));
        if ok {
            return Some(f);
        }
    }
    None
}

/// Looks for a label bijection and an isomorphism of `Ω` matching bonds,
/// q-values, the `Ω`-actions and the cocycle class.
pub fn match_presentations(a: &HeckeAlgebra, b: &HeckeAlgebra) -> Result<MatchResult> {
    let (ca, cb) = (&a.cox, &b.cox);
    let n = ca.rank();
    if n != cb.rank() {
        return Ok(MatchResult::Failure(Obstruction::RankMismatch { a: n, b: cb.rank() }));
    }
    if a.omega.order() != b.omega.order() {
        return Ok(MatchResult::Failure(Obstruction::OmegaOrderMismatch { a: a.omega.order(), b: b.omega.order() }));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut braid_ok = Vec::new();
    let mut first_braid_failure = None;
    loop {
        let bad = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| ca.bond(i, j) != cb.bond(perm[i], perm[j]));
        match bad {
            None => braid_ok.push(perm.clone()),
            Some((i, j)) if first_braid_failure.is_none() => {
                first_braid_failure = Some(Obstruction::BraidMismatch {
                    s: ca.labels[i].clone(),
                    t: ca.labels[j].clone(),
                    m_a: ca.bond(i, j),
                    m_b: cb.bond(perm[i], perm[j]),
                })
            }
            _ => {}
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    if braid_ok.is_empty() {
        return Ok(MatchResult::Failure(first_braid_failure.expect("some permutation was tried")));
    }
    let q_ok: Vec<&Vec<usize>> = braid_ok.iter().filter(|p| (0..n).all(|i| a.params.q[i] == b.params.q[p[i]])).collect();
    if q_ok.is_empty() {
        let p = &braid_ok[0];
        let i = (0..n).find(|&i| a.params.q[i] != b.params.q[p[i]]).unwrap();
        return Ok(MatchResult::Failure(Obstruction::QMismatch {
            node: ca.labels[i].clone(),
            image: cb.labels[p[i]].clone(),
            q_a: a.params.q[i].to_string(),
            q_b: b.params.q[p[i]].to_string(),
        }));
    }
    let isos = omega_isomorphisms(&a.omega, &b.omega);
    if isos.is_empty() {
        return Ok(MatchResult::Failure(Obstruction::OmegaMismatch { detail: "Ω groups are not isomorphic".into() }));
    }
    let order = a.cocycle.order.lcm(&b.cocycle.order);
    let mu_a = a.cocycle.rescaled(order / a.cocycle.order);
    let mu_b = b.cocycle.rescaled(order / b.cocycle.order);
    let k = a.omega.order();
    let mut compatible_found = false;
    for p in &q_ok {
        for phi in &isos {
            // π(ω·s) = φ(ω)·π(s)
            let compatible = (0..k).all(|w| (0..n).all(|s| p[a.omega.act(w, s)] == b.omega.act(phi[w], p[s])));
            if !compatible {
                continue;
            }
            compatible_found = true;
            let delta: Vec<Vec<u32>> = (0..k)
                .map(|x| (0..k).map(|y| (mu_b.values[phi[x]][phi[y]] + order - mu_a.values[x][y]) % order).collect())
                .collect();
            if let Some(f) = find_coboundary(&a.omega, &delta, order) {
                let matching = Matching {
                    labels: (0..n).map(|i| (ca.labels[i].clone(), cb.labels[p[i]].clone())).collect(),
                    label_perm: (*p).clone(),
                    omega_map: phi.clone(),
                    order,
                    coboundary: f,
                    anti_involution_preserved: false,
                };
                let preserved = verify_matching(a, b, &matching)?;
                return Ok(MatchResult::Match(Matching { anti_involution_preserved: preserved, ..matching }));
            }
        }
    }
    if !compatible_found {
        return Ok(MatchResult::Failure(Obstruction::OmegaMismatch {
            detail: "no isomorphism of Ω intertwines the actions on the simple reflections".into(),
        }));
    }
    Ok(MatchResult::Failure(Obstruction::CocycleClassMismatch {
        detail: format!("μ_A and the pullback of μ_B differ by a non-coboundary modulo {order}"),
    }))
}

/// The map `ω T_w ↦ ζ^{-f(ω)} φ(ω) T_{π(w)}` of a matching, on the algebras
/// rescaled to the common cocycle order.
fn apply_matching(b: &HeckeAlgebra, m: &Matching, x: &HeckeElement) -> Result<HeckeElement> {
    let mut out = HeckeElement::default();
    for ((o, w), c) in &x.terms {
        let word: Vec<u8> = w.iter().map(|&s| m.label_perm[s as usize] as u8).collect();
        let key = (m.omega_map[*o], b.cox.normal_form(&word)?);
        let coeff = b.field.mul(c, &b.field.zeta(-(m.coboundary[*o] as i64)));
        out.terms.insert(key, coeff);
    }
    Ok(out)
}

/// Checks that the matching is multiplicative on pairs of generators and
/// short basis elements and commutes with `T_w ↦ T_{w^{-1}}`.
fn verify_matching(a: &HeckeAlgebra, b: &HeckeAlgebra, m: &Matching) -> Result<bool> {
    let a = a.rescaled(m.order / a.cocycle.order)?;
    let b = b.rescaled(m.order / b.cocycle.order)?;
    let words = a.cox.ball(2)?;
    let mut elems = Vec::new();
    for o in 0..a.omega.order() {
        for w in &words {
            elems.push(a.basis(o, w)?);
        }
    }
    for x in &elems {
        for y in &elems {
            let lhs = apply_matching(&b, m, &a.multiply(x, y)?)?;
            let rhs = b.multiply(&apply_matching(&b, m, x)?, &apply_matching(&b, m, y)?)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    for w in a.cox.ball(3)? {
        let rev: Vec<u8> = w.iter().rev().copied().collect();
        let image_of_inverse = apply_matching(&b, m, &a.t(&rev)?)?;
        let inverse_of_image = {
            let img = apply_matching(&b, m, &a.t(&w)?)?;
            let mut out = HeckeElement::default();
            for ((o, v), c) in img.terms {
                let r: Vec<u8> = v.iter().rev().copied().collect();
                out.terms.insert((o, b.cox.normal_form(&r)?), c);
            }
            out
        };
        if image_of_inverse != inverse_of_image {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub pass: bool,
    pub checked: usize,
    pub first_mismatch: Option<String>,
}

/// Compares products of the presented basis `basis[i]` with the counted
/// structure constants of a finite Hecke algebra.
pub fn compare_with_finite_oracle(
    alg: &HeckeAlgebra,
    oracle: &StructureConstants,
    basis: &[BasisKey],
) -> Result<OracleReport> {
    compare_with_finite_oracle_with(alg, oracle, basis, Exec::default())
}

pub fn compare_with_finite_oracle_with(
    alg: &HeckeAlgebra,
    oracle: &StructureConstants,
    basis: &[BasisKey],
    exec: Exec,
) -> Result<OracleReport> {
    if basis.len() != oracle.dim {
        return Err(Error::Argument(format!("{} basis elements for an oracle of dimension {}", basis.len(), oracle.dim)));
    }
    let elems = basis.iter().map(|(o, w)| alg.basis(*o, w)).collect::<Result<Vec<_>>>()?;
    let keys: Vec<BasisKey> = elems.iter().map(|e| e.terms.keys().next().unwrap().clone()).collect();
    let d = basis.len();
    let results = exec.map_range(d * d, |ij| -> Result<Option<String>> {
        let (i, j) = (ij / d, ij % d);
        let prod = alg.multiply(&elems[i], &elems[j])?;
        let mut expected = HeckeElement::default();
        for (k, key) in keys.iter().enumerate() {
            let c = oracle.get(i, j, k);
            if !c.is_zero() {
                expected.terms.insert(key.clone(), alg.field.from_q(c));
            }
        }
        if prod == expected {
            return Ok(None);
        }
        let show = |e: &HeckeElement| format!("{:?}", alg.render(e));
        Ok(Some(format!("basis {i} · basis {j}: presented {} vs counted {}", show(&prod), show(&expected))))
    });
    let mut checked = 0;
    for r in results {
        checked += 1;
        if let Some(msg) = r? {
            return Ok(OracleReport { pass: false, checked, first_mismatch: Some(msg) });
        }
    }
    Ok(OracleReport { pass: true, checked, first_mismatch: None })
}

/// JSON form of a presented algebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeckeConfig {
    pub labels: Vec<String>,
    /// Bond matrix, `0` meaning `∞`.
    pub bonds: Vec<Vec<Bond>>,
    /// q-value per label, as `"a/b"` strings or integers.
    pub q: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub omega: Option<OmegaGroup>,
    #[serde(default)]
    pub cocycle: Option<Cocycle>,
    #[serde(default)]
    pub length_cap: Option<usize>,
}

impl HeckeConfig {
    pub fn build(&self) -> Result<HeckeAlgebra> {
        let cox = CoxeterSystem::new(self.labels.clone(), self.bonds.clone())?;
        let mut q = Vec::with_capacity(cox.rank());
        for l in &self.labels {
            let v = self.q.get(l).ok_or_else(|| Error::Validation(format!("missing q for {l}")))?;
            q.push(crate::rational::value_to_q(v)?);
        }
        if let Some(extra) = self.q.keys().find(|k| cox.label_index(k).is_none()) {
            return Err(Error::Validation(format!("q given for unknown label {extra}")));
        }
        let omega = self.omega.clone().unwrap_or_else(|| OmegaGroup::trivial(cox.rank()));
        let cocycle = self.cocycle.clone().unwrap_or_else(|| Cocycle::trivial(omega.order()));
        let params = HeckeParams::new(&cox, q)?;
        HeckeAlgebra::new(cox, omega, params, cocycle, self.length_cap.unwrap_or(DEFAULT_LENGTH_CAP))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitemodels::{build_group, iwahori_subgroup, FiniteHecke, GroupType, RingKind, Subgroup, TruncRing};
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        qi(n)
    }

    fn alg(cox: CoxeterSystem, qv: i64) -> HeckeAlgebra {
        let n = cox.rank();
        let p = HeckeParams::uniform(&cox, q(qv));
        build_block_algebra(cox, OmegaGroup::trivial(n), p, Cocycle::trivial(1)).unwrap()
    }

    #[test]
    fn cyclotomic_fields() {
        assert_eq!(CycloField::new(1).unwrap().phi, vec![-1, 1]);
        assert_eq!(CycloField::new(4).unwrap().phi, vec![1, 0, 1]);
        assert_eq!(CycloField::new(6).unwrap().phi, vec![1, -1, 1]);
        assert_eq!(CycloField::new(12).unwrap().phi, vec![1, 0, -1, 0, 1]);
        let f = CycloField::new(3).unwrap();
        // 1 + ζ + ζ² = 0
        let s = f.add(&f.add(&f.one(), &f.zeta(1)), &f.zeta(2));
        assert!(f.is_zero(&s));
        assert_eq!(f.mul(&f.zeta(2), &f.zeta(2)), f.zeta(1));
        assert_eq!(f.zeta(-1), f.zeta(2));
    }

    #[test]
    fn coxeter_lengths() {
        let a2 = CoxeterSystem::finite_a(2).unwrap();
        assert_eq!(a2.ball(5).unwrap().len(), 6);
        assert_eq!(a2.normal_form(&[1, 0, 1]).unwrap(), vec![0, 1, 0]);
        assert_eq!(a2.normal_form(&[0, 0]).unwrap(), Vec::<u8>::new());
        let a3 = CoxeterSystem::finite_a(3).unwrap();
        assert_eq!(a3.ball(10).unwrap().len(), 24);
        let b2 = CoxeterSystem::new(vec!["a".into(), "b".into()], vec![vec![1, 4], vec![4, 1]]).unwrap();
        assert_eq!(b2.ball(10).unwrap().len(), 8);
        let g2 = CoxeterSystem::new(vec!["a".into(), "b".into()], vec![vec![1, 6], vec![6, 1]]).unwrap();
        assert_eq!(g2.ball(10).unwrap().len(), 12);
        // affine Ã1 is infinite dihedral: two elements of each positive length
        let a1 = CoxeterSystem::affine_a(1).unwrap();
        assert_eq!(a1.ball(6).unwrap().len(), 13);
        // Ã2: Poincaré series (1 + q + q²)/(1 - q)², i.e. 1, 3, 6, 9, 12
        let a2t = CoxeterSystem::affine_a(2).unwrap();
        assert_eq!(a2t.ball(4).unwrap().len(), 1 + 3 + 6 + 9 + 12);
        assert!(CoxeterSystem::new(vec!["a".into(), "b".into()], vec![vec![1, 5], vec![5, 1]]).is_err());
    }

    /// Coxeter length on `Ã_n` agrees with the hyperplane count of the affine
    /// module under `s_0 = t_{θ^∨} s_θ`.
    #[test]
    fn length_matches_affine_module() {
        use crate::affine::AffineConfig;
        use crate::rootdata::{GaloisAction, RootDatum};
        for (name, cox) in [("A1", CoxeterSystem::affine_a(1).unwrap()), ("SL3", CoxeterSystem::affine_a(2).unwrap())] {
            let rd = RootDatum::preset(name).unwrap();
            let c = AffineConfig::new(rd.clone(), GaloisAction::split(rd.rank())).unwrap();
            let simple = rd.simple_roots();
            let pos = rd.positive_roots();
            let h: Vec<i64> = (0..rd.rank()).map(|i| 1000i64.pow(i as u32)).collect();
            let theta = *pos.iter().max_by_key(|&&i| crate::rootdata::pairing(&rd.roots()[i], &h)).unwrap();
            let s_theta = c.weyl_element(c.weyl_index(&rd.reflection(theta)).unwrap());
            let mut gens = vec![c.multiply(&c.translation(&rd.coroots()[theta]), &s_theta).unwrap()];
            gens.extend(simple.iter().map(|&i| c.weyl_element(c.weyl_index(&rd.reflection(i)).unwrap())));
            for w in cox.ball(5).unwrap() {
                let x = w.iter().fold(c.identity(), |acc, &s| c.multiply(&acc, &gens[s as usize]).unwrap());
                assert_eq!(c.im_length(&x).unwrap() as usize, w.len(), "{name} {w:?}");
            }
        }
    }

    #[test]
    fn basic_multiplication() {
        let a = alg(CoxeterSystem::affine_a(1).unwrap(), 3);
        let x = a.t(&[0, 1, 0]).unwrap();
        assert_eq!(a.multiply(&a.one(), &x).unwrap(), x);
        assert_eq!(a.multiply(&x, &a.one()).unwrap(), x);
        for s in 0..2 {
            assert!(a.quadratic_defect(s).unwrap().is_zero());
        }
        // T_s² = (q - 1) T_s + q
        let ts = a.t(&[0]).unwrap();
        let expect = a.add(&a.scale(&ts, &a.field.from_q(q(2))), &a.scalar(q(3)));
        assert_eq!(a.multiply(&ts, &ts).unwrap(), expect);
    }

    #[test]
    fn braid_checks() {
        let a1a1 = CoxeterSystem::finite_a(1).unwrap().product(&CoxeterSystem::new(vec!["t".into()], vec![vec![1]]).unwrap()).unwrap();
        let r = check_braid(&alg(a1a1, 2)).unwrap();
        assert!(r.all_hold);
        assert_eq!(r.checks[0].m, 2);
        let r = check_braid(&alg(CoxeterSystem::affine_a(2).unwrap(), 5)).unwrap();
        assert!(r.all_hold);
        assert_eq!(r.checks.len(), 3);
        let r = check_braid(&alg(CoxeterSystem::affine_a(1).unwrap(), 5)).unwrap();
        assert_eq!(r.skipped.len(), 1);
        let cox = CoxeterSystem::affine_a(2).unwrap();
        assert!(HeckeParams::new(&cox, vec![q(2), q(3), q(2)]).is_err());
        // unequal parameters are fine across an even bond
        let b2 = CoxeterSystem::new(vec!["a".into(), "b".into()], vec![vec![1, 4], vec![4, 1]]).unwrap();
        let p = HeckeParams::new(&b2, vec![q(2), q(4)]).unwrap();
        let h = build_block_algebra(b2, OmegaGroup::trivial(2), p, Cocycle::trivial(1)).unwrap();
        assert!(check_braid(&h).unwrap().all_hold);
    }

    fn pgl2_like(qv: i64) -> HeckeAlgebra {
        let cox = CoxeterSystem::affine_a(1).unwrap();
        let p = HeckeParams::uniform(&cox, q(qv));
        build_block_algebra(cox, OmegaGroup::cyclic(2, &[1, 0]), p, Cocycle::trivial(2)).unwrap()
    }

    fn klein_algebra(mu: Vec<Vec<u32>>, qv: i64) -> HeckeAlgebra {
        let t = CoxeterSystem::new(vec!["t0".into(), "t1".into()], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let cox = CoxeterSystem::affine_a(1).unwrap().product(&t).unwrap();
        let omega = OmegaGroup::klein(&[1, 0, 2, 3], &[0, 1, 3, 2]);
        let p = HeckeParams::uniform(&cox, q(qv));
        build_block_algebra(cox, omega, p, Cocycle { order: 2, values: mu }).unwrap()
    }

    /// `μ((a1, a2), (b1, b2)) = a1 b2`, the nontrivial class.
    fn klein_mu() -> Vec<Vec<u32>> {
        (0..4).map(|x| (0..4).map(|y| ((x & 1) * ((y >> 1) & 1)) as u32).collect()).collect()
    }

    fn add_coboundary(mu: &[Vec<u32>], f: &[u32]) -> Vec<Vec<u32>> {
        (0..4).map(|x| (0..4).map(|y| (mu[x][y] + f[x] + f[y] + 2 - f[x ^ y]) % 2).collect()).collect()
    }

    #[test]
    fn omega_and_cocycles() {
        let a = pgl2_like(3);
        let w = a.basis(1, &[]).unwrap();
        let ts0 = a.t(&[0]).unwrap();
        // ω T_{s0} ω^{-1} = T_{s1}
        let conj = a.multiply(&a.multiply(&w, &ts0).unwrap(), &w).unwrap();
        assert_eq!(conj, a.t(&[1]).unwrap());
        assert_eq!(a.multiply(&w, &w).unwrap(), a.one());
        let k = klein_algebra(klein_mu(), 2);
        let x = k.basis(1, &[]).unwrap();
        let y = k.basis(2, &[]).unwrap();
        // ω1 ω2 = μ(ω1, ω2) (ω1 ω2): here μ(1, 2) = 1 gives ζ_2 = -1
        assert_eq!(k.multiply(&x, &y).unwrap(), k.scale(&k.basis(3, &[]).unwrap(), &k.field.zeta(1)));
        assert_eq!(k.multiply(&y, &x).unwrap(), k.basis(3, &[]).unwrap());
        assert!(check_braid(&k).unwrap().all_hold);
        let bad = Cocycle { order: 2, values: vec![vec![0, 0], vec![0, 1]] };
        let cox = CoxeterSystem::affine_a(1).unwrap();
        assert!(build_block_algebra(cox.clone(), OmegaGroup::cyclic(2, &[1, 0]), HeckeParams::uniform(&cox, q(2)), bad).is_ok());
        let mut not_cocycle = vec![vec![0u32; 4]; 4];
        not_cocycle[1][2] = 1;
        assert!(Cocycle { order: 2, values: not_cocycle }.validate(k.omega()).is_err());
        let nonunif = HeckeParams::new(&cox, vec![q(2), q(3)]).unwrap();
        assert!(matches!(
            build_block_algebra(cox, OmegaGroup::cyclic(2, &[1, 0]), nonunif, Cocycle::trivial(2)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn q_from_induction_examples() {
        assert_eq!(q_from_induction(5, None).unwrap(), q(1));
        assert_eq!(q_from_induction(6, Some(2)).unwrap(), q(3));
        assert_eq!(q_from_induction(2, Some(6)).unwrap(), q(3));
        assert!(q_from_induction(0, None).is_err());
    }

    #[test]
    fn matching() {
        let a = pgl2_like(3);
        let MatchResult::Match(m) = match_presentations(&a, &a).unwrap() else { panic!() };
        assert_eq!(m.label_perm, vec![0, 1]);
        assert_eq!(m.omega_map, vec![0, 1]);
        assert!(m.anti_involution_preserved);

        let MatchResult::Failure(Obstruction::QMismatch { node, q_a, q_b, .. }) =
            match_presentations(&pgl2_like(2), &pgl2_like(3)).unwrap()
        else {
            panic!()
        };
        assert_eq!((node.as_str(), q_a.as_str(), q_b.as_str()), ("s0", "2", "3"));

        let k1 = klein_algebra(klein_mu(), 2);
        let f = [0, 1, 0, 0];
        let k2 = klein_algebra(add_coboundary(&klein_mu(), &f), 2);
        assert_ne!(k1.cocycle, k2.cocycle);
        let MatchResult::Match(m) = match_presentations(&k1, &k2).unwrap() else { panic!() };
        assert!(m.anti_involution_preserved);
        assert_eq!(m.label_perm, vec![0, 1, 2, 3]);
        // determined up to a character of Ω
        assert_eq!(add_coboundary(&klein_mu(), &m.coboundary), k2.cocycle.values);

        let trivial = klein_algebra(vec![vec![0; 4]; 4], 2);
        let MatchResult::Failure(Obstruction::CocycleClassMismatch { .. }) = match_presentations(&k1, &trivial).unwrap() else {
            panic!()
        };
        let MatchResult::Failure(Obstruction::RankMismatch { .. }) = match_presentations(&k1, &a).unwrap() else { panic!() };
    }

    #[test]
    fn finite_oracle_comparison() {
        let g = build_group(&TruncRing::new(RingKind::Integers, 3, 1).unwrap(), GroupType::SL2).unwrap();
        let h = FiniteHecke::new(&g, &iwahori_subgroup(&g));
        let basis = vec![(0, vec![]), (0, vec![0])];
        let a1 = alg(CoxeterSystem::finite_a(1).unwrap(), 3);
        let r = compare_with_finite_oracle(&a1, &h.constants, &basis).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checked, 4);
        let wrong = alg(CoxeterSystem::finite_a(1).unwrap(), 2);
        assert!(!compare_with_finite_oracle(&wrong, &h.constants, &basis).unwrap().pass);
        assert!(compare_with_finite_oracle(&a1, &h.constants, &basis[..1]).is_err());
        let whole = FiniteHecke::new(&g, &Subgroup::whole(&g));
        let empty = alg(CoxeterSystem::new(vec![], vec![]).unwrap(), 1);
        assert!(compare_with_finite_oracle(&empty, &whole.constants, &[(0, vec![])]).unwrap().pass);
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"labels":["s0","s1"],"bonds":[[1,0],[0,1]],"q":{"s0":"3","s1":3},
            "omega":{"table":[[0,1],[1,0]],"action":[[0,1],[1,0]]}}"#;
        let cfg: HeckeConfig = serde_json::from_str(json).unwrap();
        let a = cfg.build().unwrap();
        assert_eq!(a.params.q, vec![q(3), q(3)]);
        assert!(check_braid(&a).unwrap().all_hold);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn associativity(words in prop::collection::vec(prop::collection::vec(0u8..3, 0..4), 3),
                         omegas in prop::collection::vec(0usize..4, 3), which in 0usize..3) {
            let a = match which {
                0 => alg(CoxeterSystem::affine_a(2).unwrap(), 4),
                1 => pgl2_like(5),
                _ => klein_algebra(klein_mu(), 3),
            };
            let r = a.coxeter().rank() as u8;
            let el = |k: usize| a.basis(omegas[k] % a.omega().order(), &words[k].iter().map(|s| s % r).collect::<Vec<_>>()).unwrap();
            let (x, y, z) = (el(0), el(1), el(2));
            let lhs = a.multiply(&a.multiply(&x, &y).unwrap(), &z).unwrap();
            let rhs = a.multiply(&x, &a.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn omega_conjugation_is_an_automorphism(w1 in prop::collection::vec(0u8..4, 0..4), w2 in prop::collection::vec(0u8..4, 0..4), o in 1usize..4) {
            let a = klein_algebra(klein_mu(), 3);
            let map = |x: &HeckeElement| -> HeckeElement {
                let mut out = HeckeElement::default();
                for ((om, w), c) in &x.terms {
                    out.terms.insert((*om, a.relabel(o, w).unwrap()), c.clone());
                }
                out
            };
            prop_assert_eq!(a.coxeter().length(&a.relabel(o, &w1).unwrap()).unwrap(), a.coxeter().length(&w1).unwrap());
            let (x, y) = (a.t(&w1).unwrap(), a.t(&w2).unwrap());
            prop_assert_eq!(map(&a.multiply(&x, &y).unwrap()), a.multiply(&map(&x), &map(&y)).unwrap());
        }

        #[test]
        fn matching_is_symmetric_and_relabel_invariant(perm_seed in 0usize..24, f in prop::collection::vec(0u32..2, 4)) {
            let mut f = f;
            f[0] = 0;
            let k1 = klein_algebra(klein_mu(), 2);
            let k2 = klein_algebra(add_coboundary(&klein_mu(), &f), 2);
            prop_assert!(matches!(match_presentations(&k1, &k2).unwrap(), MatchResult::Match(_)));
            prop_assert!(matches!(match_presentations(&k2, &k1).unwrap(), MatchResult::Match(_)));
            // relabel the generators of k2 by a permutation
            let mut p: Vec<usize> = (0..4).collect();
            for _ in 0..perm_seed {
                next_permutation(&mut p);
            }
            let cox = k2.coxeter();
            let mut labels = vec![String::new(); 4];
            let mut bonds = vec![vec![0; 4]; 4];
            for i in 0..4 {
                labels[p[i]] = cox.labels()[i].clone();
                for j in 0..4 {
                    bonds[p[i]][p[j]] = cox.bond(i, j);
                }
            }
            let action: Vec<Vec<usize>> = k2.omega().action.iter().map(|a| {
                let mut out = vec![0; 4];
                for s in 0..4 { out[p[s]] = p[a[s]]; }
                out
            }).collect();
            let relabeled = build_block_algebra(
                CoxeterSystem::new(labels, bonds).unwrap(),
                OmegaGroup { table: k2.omega().table.clone(), action },
                HeckeParams::uniform(cox, q(2)),
                k2.cocycle().clone(),
            ).unwrap();
            prop_assert!(matches!(match_presentations(&k1, &relabeled).unwrap(), MatchResult::Match(_)));
        }
    }
}

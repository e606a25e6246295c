//! Root data with Galois actions on the cocharacter lattice.
//!
//! Characters and cocharacters are integer vectors in dual bases, paired by
//! the dot product. Weyl group elements act on the cocharacter lattice.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{hermite_rows, kernel_of_endomorphism, snf, FGAbelianGroup, IntMatrix, Quotient, Subgroup};

pub const WEYL_CAP: usize = 10_000_000;

pub fn pairing(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RootDatumRaw", into = "RootDatumRaw")]
pub struct RootDatum {
    rank: usize,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RootDatumRaw {
    rank: usize,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
}

impl TryFrom<RootDatumRaw> for RootDatum {
    type Error = Error;
    fn try_from(r: RootDatumRaw) -> Result<Self> {
        RootDatum::new(r.rank, r.roots, r.coroots)
    }
}

impl From<RootDatum> for RootDatumRaw {
    fn from(r: RootDatum) -> Self {
        RootDatumRaw { rank: r.rank, roots: r.roots, coroots: r.coroots }
    }
}

impl RootDatum {
    pub fn new(rank: usize, roots: Vec<Vec<i64>>, coroots: Vec<Vec<i64>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Validation("lattice rank must be positive".into()));
        }
        if roots.len() != coroots.len() {
            return Err(Error::Validation("roots and coroots must be indexed by the same set".into()));
        }
        if roots.iter().chain(&coroots).any(|v| v.len() != rank) {
            return Err(Error::Validation(format!("every (co)root must have length {rank}")));
        }
        for (a, c) in roots.iter().zip(&coroots) {
            if pairing(a, c) != 2 {
                return Err(Error::Validation(format!("⟨{a:?}, {c:?}⟩ ≠ 2")));
            }
        }
        let rd = RootDatum { rank, roots, coroots };
        let root_set: HashSet<&Vec<i64>> = rd.roots.iter().collect();
        let coroot_set: HashSet<&Vec<i64>> = rd.coroots.iter().collect();
        if root_set.len() != rd.roots.len() {
            return Err(Error::Validation("repeated root".into()));
        }
        for i in 0..rd.roots.len() {
            for j in 0..rd.roots.len() {
                if !root_set.contains(&rd.reflect_root(i, &rd.roots[j]))
                    || !coroot_set.contains(&rd.reflect_coroot(i, &rd.coroots[j]))
                {
                    return Err(Error::Validation("reflections must permute the (co)roots".into()));
                }
            }
        }
        Ok(rd)
    }

    /// Closes simple (co)roots under their reflections.
    pub fn from_simple(rank: usize, simple_roots: &[Vec<i64>], simple_coroots: &[Vec<i64>]) -> Result<Self> {
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> =
            simple_roots.iter().cloned().zip(simple_coroots.iter().cloned()).collect();
        let mut seen: HashSet<Vec<i64>> = pairs.iter().map(|p| p.0.clone()).collect();
        let mut k = 0;
        while k < pairs.len() {
            let (b, bc) = pairs[k].clone();
            for (a, ac) in simple_roots.iter().zip(simple_coroots) {
                let nb: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - pairing(&b, ac) * y).collect();
                let nbc: Vec<i64> = bc.iter().zip(ac).map(|(x, y)| x - pairing(a, &bc) * y).collect();
                if seen.insert(nb.clone()) {
                    pairs.push((nb, nbc));
                }
            }
            k += 1;
            if pairs.len() > 10_000 {
                return Err(Error::Validation("simple data does not generate a finite root system".into()));
            }
        }
        pairs.sort();
        let (roots, coroots) = pairs.into_iter().unzip();
        Self::new(rank, roots, coroots)
    }

    /// Named presets: A1 (= SL2), SL2, PGL2, GL2, A2 (adjoint), SL3, B2, G2.
    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "A1" | "SL2" => Self::from_simple(1, &[vec![2]], &[vec![1]]),
            "PGL2" => Self::from_simple(1, &[vec![1]], &[vec![2]]),
            "GL2" => Self::from_simple(2, &[vec![1, -1]], &[vec![1, -1]]),
            "A2" | "PGL3" => Self::from_simple(2, &[vec![1, 0], vec![0, 1]], &[vec![2, -1], vec![-1, 2]]),
            "SL3" => Self::from_simple(2, &[vec![2, -1], vec![-1, 2]], &[vec![1, 0], vec![0, 1]]),
            "B2" => Self::from_simple(2, &[vec![1, -1], vec![0, 1]], &[vec![1, -1], vec![0, 2]]),
            "G2" => Self::from_simple(2, &[vec![1, 0], vec![0, 1]], &[vec![2, -3], vec![-1, 2]]),
            other => Err(Error::Validation(format!("unknown root datum preset `{other}`"))),
        }
    }

    /// A torus of the given rank (no roots).
    pub fn torus(rank: usize) -> Result<Self> {
        Self::new(rank, vec![], vec![])
    }

    /// Appends `k` coordinates on which every root and coroot vanishes.
    pub fn with_central_torus(&self, k: usize) -> Self {
        let pad = |v: &Vec<i64>| {
            let mut v = v.clone();
            v.extend(std::iter::repeat(0).take(k));
            v
        };
        RootDatum {
            rank: self.rank + k,
            roots: self.roots.iter().map(pad).collect(),
            coroots: self.coroots.iter().map(pad).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    pub fn root_index(&self, a: &[i64]) -> Option<usize> {
        self.roots.iter().position(|r| r == a)
    }

    pub fn coroot_index(&self, a: &[i64]) -> Option<usize> {
        self.coroots.iter().position(|r| r == a)
    }

    fn reflect_root(&self, i: usize, x: &[i64]) -> Vec<i64> {
        let c = pairing(x, &self.coroots[i]);
        x.iter().zip(&self.roots[i]).map(|(a, b)| a - c * b).collect()
    }

    fn reflect_coroot(&self, i: usize, y: &[i64]) -> Vec<i64> {
        let c = pairing(&self.roots[i], y);
        y.iter().zip(&self.coroots[i]).map(|(a, b)| a - c * b).collect()
    }

    /// Reflection in root `i` acting on cocharacters: `I - α^∨ α^T`.
    pub fn reflection(&self, i: usize) -> IntMatrix {
        let mut m = IntMatrix::identity(self.rank);
        for r in 0..self.rank {
            for c in 0..self.rank {
                m[(r, c)] -= self.coroots[i][r] * self.roots[i][c];
            }
        }
        m
    }

    /// A generic cocharacter `h` with `⟨α, h⟩ ≠ 0` for every root.
    fn generic_cocharacter(&self) -> Vec<i128> {
        let m = 2 * self.roots.iter().flatten().map(|x| x.abs()).max().unwrap_or(1) as i128 + 1;
        (0..self.rank).map(|i| m.pow(i as u32)).collect()
    }

    /// Indices of the positive roots for the standard generic cocharacter.
    pub fn positive_roots(&self) -> Vec<usize> {
        let h = self.generic_cocharacter();
        (0..self.roots.len())
            .filter(|&i| self.roots[i].iter().zip(&h).map(|(&a, b)| a as i128 * b).sum::<i128>() > 0)
            .collect()
    }

    /// Indices of the simple roots of [`Self::positive_roots`].
    pub fn simple_roots(&self) -> Vec<usize> {
        let pos = self.positive_roots();
        pos.iter()
            .copied()
            .filter(|&i| {
                !pos.iter().any(|&j| {
                    let diff: Vec<i64> = self.roots[i].iter().zip(&self.roots[j]).map(|(a, b)| a - b).collect();
                    self.root_index(&diff).is_some_and(|k| pos.contains(&k))
                })
            })
            .collect()
    }

    /// Image of a root under a cocharacter automorphism `γ`: `α ∘ γ^{-1}`.
    pub fn act_on_root(&self, gamma_inv: &IntMatrix, a: &[i64]) -> Vec<i64> {
        gamma_inv.transpose().apply(a)
    }
}

/// Root datum as given in JSON: a preset name (optionally with extra central
/// torus coordinates) or explicit (co)roots.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootDatumSpec {
    Preset {
        preset: String,
        #[serde(default)]
        central_torus: usize,
    },
    Explicit(RootDatum),
}

impl RootDatumSpec {
    pub fn build(&self) -> Result<RootDatum> {
        match self {
            RootDatumSpec::Preset { preset, central_torus } => {
                Ok(RootDatum::preset(preset)?.with_central_torus(*central_torus))
            }
            RootDatumSpec::Explicit(rd) => Ok(rd.clone()),
        }
    }
}

/// Weyl group as matrices on the cocharacter lattice: identity first, then
/// lexicographic order of entries.
pub fn weyl_group(rd: &RootDatum) -> Result<Vec<IntMatrix>> {
    weyl_group_with(rd, WEYL_CAP, Exec::default())
}

pub fn weyl_group_with(rd: &RootDatum, cap: usize, exec: Exec) -> Result<Vec<IntMatrix>> {
    let gens: Vec<IntMatrix> = rd.simple_roots().iter().map(|&i| rd.reflection(i)).collect();
    let id = IntMatrix::identity(rd.rank());
    let mut seen: HashSet<IntMatrix> = HashSet::from([id.clone()]);
    let mut frontier = vec![id.clone()];
    while !frontier.is_empty() {
        let products: Vec<Vec<IntMatrix>> = exec.map(&frontier, |w| gens.iter().map(|s| w.mul(s)).collect());
        let mut next = Vec::new();
        for m in products.into_iter().flatten() {
            if seen.insert(m.clone()) {
                next.push(m);
            }
        }
        if seen.len() > cap {
            return Err(Error::Computation(format!("not a finite Weyl group (more than {cap} elements)")));
        }
        frontier = next;
    }
    let mut rest: Vec<IntMatrix> = seen.into_iter().filter(|m| *m != id).collect();
    rest.sort();
    let mut out = vec![id];
    out.extend(rest);
    Ok(out)
}

/// Inertia generators and Frobenius, as matrices on the cocharacter lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisAction {
    #[serde(default)]
    pub inertia: Vec<IntMatrix>,
    pub frobenius: IntMatrix,
}

const ORDER_CAP: usize = 1000;

impl GaloisAction {
    pub fn new(inertia: Vec<IntMatrix>, frobenius: IntMatrix) -> Self {
        GaloisAction { inertia, frobenius }
    }

    pub fn split(rank: usize) -> Self {
        Self::new(vec![], IntMatrix::identity(rank))
    }

    pub fn with_frobenius(frobenius: IntMatrix) -> Self {
        Self::new(vec![], frobenius)
    }

    /// Checks shapes, finite order and compatibility with `rd`.
    pub fn validate(&self, rd: &RootDatum) -> Result<()> {
        let n = rd.rank();
        for m in self.inertia.iter().chain(std::iter::once(&self.frobenius)) {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Validation(format!("action matrices must be {n}×{n}")));
            }
            if m.det().abs() != 1 {
                return Err(Error::Validation(format!("{m:?} is not invertible over Z")));
            }
            if m.order(ORDER_CAP).is_none() {
                return Err(Error::Validation(format!("{m:?} does not have finite order")));
            }
            let inv = m.inverse_unimodular()?;
            for (a, c) in rd.roots().iter().zip(rd.coroots()) {
                let gc = m.apply(c);
                let ga = rd.act_on_root(&inv, a);
                match rd.coroot_index(&gc) {
                    Some(k) if rd.roots()[k] == ga => {}
                    _ => return Err(Error::Validation("Galois action must permute the (co)roots".into())),
                }
            }
        }
        Ok(())
    }
}

/// `X_I = X / ⟨(γ - 1) x⟩` for the given generators.
pub fn coinvariants(lattice_rank: usize, action_gens: &[IntMatrix]) -> Result<Quotient> {
    let id = IntMatrix::identity(lattice_rank);
    let mut rel = IntMatrix::zeros(lattice_rank, 0);
    for g in action_gens {
        if g.rows() != lattice_rank || g.cols() != lattice_rank {
            return Err(Error::Argument(format!("action matrices must be {lattice_rank}×{lattice_rank}")));
        }
        rel = rel.hcat(&g.sub(&id));
    }
    Quotient::of(lattice_rank, &rel)
}

/// `ker(σ - 1)` for an endomorphism `σ` given on canonical coordinates.
pub fn fixed_subgroup(group: &FGAbelianGroup, sigma: &IntMatrix) -> Result<Subgroup> {
    if !group.is_endomorphism(sigma) {
        return Err(Error::Argument("σ does not descend to the presented group".into()));
    }
    let shifted = sigma.sub(&IntMatrix::identity(group.ngens()));
    kernel_of_endomorphism(group, &group.reduce_endomorphism(&shifted))
}

/// Cocharacters modulo the central sublattice `{y : ⟨α, y⟩ = 0 ∀α}`, with the
/// induced matrices of each given automorphism.
pub fn modulo_center(rd: &RootDatum, mats: &[IntMatrix]) -> Result<(usize, Vec<IntMatrix>)> {
    let n = rd.rank();
    if rd.roots().is_empty() {
        return Ok((0, mats.iter().map(|_| IntMatrix::zeros(0, 0)).collect()));
    }
    let pairing_matrix = IntMatrix::from_rows(rd.roots().to_vec())?;
    let s = snf(&pairing_matrix)?;
    let r = s.rank;
    let keep: Vec<usize> = (0..r).collect();
    let mut out = Vec::with_capacity(mats.len());
    for m in mats {
        let conj = s.v_inv.mul(m).mul(&s.v);
        for i in 0..r {
            for j in r..n {
                if conj[(i, j)] != 0 {
                    return Err(Error::Argument("action does not preserve the central sublattice".into()));
                }
            }
        }
        out.push(conj.select_rows(&keep).select_cols(&keep));
    }
    Ok((r, out))
}

/// `X_*(S)_I^σ` is finite once the center is factored out.
pub fn is_elliptic(rd: &RootDatum, act: &GaloisAction) -> Result<bool> {
    let mut mats = act.inertia.clone();
    mats.push(act.frobenius.clone());
    let (r, induced) = modulo_center(rd, &mats)?;
    if r == 0 {
        return Ok(true);
    }
    let (sigma, inertia) = induced.split_last().unwrap();
    let coinv = coinvariants(r, inertia)?;
    let sigma_bar = coinv.induced(sigma)?;
    Ok(fixed_subgroup(&coinv.group, &sigma_bar)?.group.free_rank == 0)
}

/// Hermite basis (rows) of the span of the coroots.
pub fn coroot_lattice(rd: &RootDatum) -> IntMatrix {
    if rd.coroots().is_empty() {
        return IntMatrix::zeros(0, rd.rank());
    }
    hermite_rows(&IntMatrix::from_rows(rd.coroots().to_vec()).expect("uniform lengths"))
}

/// Index of the coroot lattice in the cocharacter lattice, `None` when it
/// has smaller rank.
pub fn coroot_index(rd: &RootDatum) -> Option<u64> {
    let h = coroot_lattice(rd);
    (h.rows() == rd.rank()).then(|| h.det().unsigned_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Q;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Rank over Q by plain Gaussian elimination.
    fn rational_rank(m: &IntMatrix) -> usize {
        let mut a: Vec<Vec<Q>> =
            m.to_rows().into_iter().map(|r| r.into_iter().map(|x| Q::from_integer(x.into())).collect()).collect();
        let (rows, cols) = (m.rows(), m.cols());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(rank, p);
            for i in 0..rows {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for k in 0..cols {
                        let t = &f * &a[rank][k];
                        a[i][k] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Brute-force closure by multiplying all pairs until stable.
    fn naive_order(rd: &RootDatum) -> usize {
        let gens: Vec<IntMatrix> = (0..rd.roots().len()).map(|i| rd.reflection(i)).collect();
        let mut set: HashSet<IntMatrix> = HashSet::from([IntMatrix::identity(rd.rank())]);
        loop {
            let cur: Vec<IntMatrix> = set.iter().cloned().collect();
            let before = set.len();
            for a in &cur {
                for g in &gens {
                    set.insert(a.mul(g));
                }
            }
            if set.len() == before {
                return set.len();
            }
        }
    }

    #[test]
    fn presets_and_weyl_orders() {
        for (name, order, nroots) in
            [("A1", 2, 2), ("PGL2", 2, 2), ("GL2", 2, 2), ("A2", 6, 6), ("SL3", 6, 6), ("B2", 8, 8), ("G2", 12, 12)]
        {
            let rd = RootDatum::preset(name).unwrap();
            assert_eq!(rd.roots().len(), nroots, "{name}");
            let w = weyl_group(&rd).unwrap();
            assert_eq!(w.len(), order, "{name}");
            assert_eq!(naive_order(&rd), order, "{name}");
            assert!(w[0].is_identity());
            let ss_rank = if matches!(name, "A1" | "PGL2" | "GL2") { 1 } else { 2 };
            assert_eq!(rd.simple_roots().len(), ss_rank, "{name}");
            assert_eq!(rd.positive_roots().len() * 2, nroots);
        }
        assert!(RootDatum::preset("E9").is_err());
    }

    #[test]
    fn weyl_cap_is_enforced() {
        let rd = RootDatum::preset("G2").unwrap();
        assert!(matches!(weyl_group_with(&rd, 5, Exec::Sequential), Err(Error::Computation(_))));
        let seq = weyl_group_with(&rd, WEYL_CAP, Exec::Sequential).unwrap();
        let par = weyl_group_with(&rd, WEYL_CAP, Exec::Parallel).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn invalid_data() {
        assert!(RootDatum::new(1, vec![vec![2]], vec![vec![2]]).is_err());
        assert!(RootDatum::new(1, vec![vec![2]], vec![vec![1]]).is_err()); // -α missing
        assert!(RootDatum::new(2, vec![vec![1, 0]], vec![vec![2]]).is_err());
    }

    #[test]
    fn coinvariant_examples() {
        let q = coinvariants(3, &[]).unwrap();
        assert_eq!(q.group, FGAbelianGroup::free(3));
        let q = coinvariants(1, &[mat(&[&[-1]])]).unwrap();
        assert_eq!(q.group, FGAbelianGroup::cyclic(2));
        let q = coinvariants(2, &[mat(&[&[0, 1], &[1, 0]])]).unwrap();
        assert_eq!(q.group, FGAbelianGroup::free(1));
    }

    #[test]
    fn fixed_examples() {
        let z = FGAbelianGroup::free(1);
        assert_eq!(fixed_subgroup(&z, &mat(&[&[1]])).unwrap().group, z);
        assert_eq!(fixed_subgroup(&z, &mat(&[&[-1]])).unwrap().group, FGAbelianGroup::trivial());
        let z2 = FGAbelianGroup::cyclic(2);
        assert_eq!(fixed_subgroup(&z2, &mat(&[&[1]])).unwrap().group, z2);
        let g = FGAbelianGroup { free_rank: 1, torsion: vec![2] };
        assert!(fixed_subgroup(&g, &mat(&[&[1, 0], &[1, 1]])).is_err());
        // σ^k = id for k the order of σ
        let z3 = FGAbelianGroup::free(2);
        let rot = mat(&[&[0, -1], &[1, -1]]);
        assert_eq!(fixed_subgroup(&z3, &rot.pow(3)).unwrap().group, z3);
        assert_eq!(fixed_subgroup(&z3, &rot).unwrap().group, FGAbelianGroup::trivial());
    }

    #[test]
    fn ellipticity_examples() {
        let a1 = RootDatum::preset("A1").unwrap();
        assert!(is_elliptic(&a1, &GaloisAction::with_frobenius(mat(&[&[-1]]))).unwrap());
        assert!(!is_elliptic(&a1, &GaloisAction::split(1)).unwrap());
        let a2 = RootDatum::preset("A2").unwrap();
        assert!(!is_elliptic(&a2, &GaloisAction::split(2)).unwrap());
        // with an extra central Z on which σ is trivial
        let a1z = a1.with_central_torus(1);
        assert!(is_elliptic(&a1z, &GaloisAction::with_frobenius(mat(&[&[-1, 0], &[0, 1]]))).unwrap());
        assert!(!is_elliptic(&a1z, &GaloisAction::split(2)).unwrap());
        // GL2 with the swap (unramified elliptic torus): elliptic modulo the center
        let gl2 = RootDatum::preset("GL2").unwrap();
        let swap = GaloisAction::with_frobenius(mat(&[&[0, 1], &[1, 0]]));
        swap.validate(&gl2).unwrap();
        assert!(is_elliptic(&gl2, &swap).unwrap());
        // Coxeter element of A2
        let w = weyl_group(&a2).unwrap();
        let cox = w.iter().find(|m| m.order(10) == Some(3)).unwrap().clone();
        assert!(is_elliptic(&a2, &GaloisAction::with_frobenius(cox)).unwrap());
    }

    #[test]
    fn action_validation() {
        let a1 = RootDatum::preset("A1").unwrap();
        assert!(GaloisAction::with_frobenius(mat(&[&[2]])).validate(&a1).is_err());
        let a2 = RootDatum::preset("A2").unwrap();
        assert!(GaloisAction::with_frobenius(mat(&[&[1, 1], &[0, 1]])).validate(&a2).is_err());
        assert!(GaloisAction::with_frobenius(mat(&[&[0, 1], &[1, 0]])).validate(&a2).is_ok());
    }

    #[test]
    fn coroot_lattice_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        assert_eq!(coroot_lattice(&gl2).rows(), 1);
        assert_eq!(coroot_index(&gl2), None);
        assert_eq!(coroot_index(&RootDatum::preset("SL2").unwrap()), Some(1));
        assert_eq!(coroot_index(&RootDatum::preset("PGL2").unwrap()), Some(2));
        let a2 = RootDatum::preset("A2").unwrap();
        // det of the A2 Cartan matrix
        assert_eq!(mat(&[&[2, -1], &[-1, 2]]).det(), 3);
        assert_eq!(coroot_index(&a2), Some(3));
    }

    proptest! {
        #[test]
        fn rank_accounting(n in 1usize..4, k in 1usize..3, seed in prop::collection::vec(-2i64..3, 18)) {
            let gens: Vec<IntMatrix> = (0..k).map(|g| {
                IntMatrix::from_rows((0..n).map(|i| (0..n).map(|j| seed[(g * 9 + i * n + j) % 18]).collect()).collect()).unwrap()
            }).collect();
            let q = coinvariants(n, &gens).unwrap();
            let mut stacked = IntMatrix::zeros(n, 0);
            for g in &gens {
                stacked = stacked.hcat(&g.sub(&IntMatrix::identity(n)));
            }
            prop_assert_eq!(q.group.free_rank + rational_rank(&stacked), n);
        }
    }
}

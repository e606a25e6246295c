//! Extended affine Weyl groups `W̃ = X_*(S)_I ⋊ W`, their σ-actions,
//! length-zero parts and Cartan-type orbit enumeration.
//!
//! Translations live in the inertia coinvariants `X_I`, written in the
//! canonical coordinates of the presented group. `W_aff` is the subgroup
//! whose translation part lies in the image of the coroot lattice, and the
//! `Ω` class of an element is its translation modulo that image.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{FGAbelianGroup, IntMatrix, Quotient, Subgroup};
use crate::rootdata::{coinvariants, fixed_subgroup, pairing, weyl_group, GaloisAction, RootDatum};

const ORDER_CAP: usize = 1000;
const BALL_CAP: usize = 50_000_000;
const ORBIT_CAP: usize = 1_000_000;

/// `t_translation · w`, acting on the apartment by `x ↦ translation + w x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineElement {
    pub translation: Vec<i64>,
    /// Index into [`AffineConfig::weyl`].
    pub finite: usize,
}

/// All the data needed to compute in `W̃` for a root datum with an action
/// in which inertia fixes every root.
#[derive(Clone, Debug)]
pub struct AffineConfig {
    rd: RootDatum,
    act: GaloisAction,
    weyl: Vec<IntMatrix>,
    weyl_index: HashMap<IntMatrix, usize>,
    xi: Quotient,
    weyl_on_xi: Vec<IntMatrix>,
    coroot_images: Vec<Vec<i64>>,
    coroot_sub: Subgroup,
    omega: Quotient,
}

impl AffineConfig {
    pub fn new(rd: RootDatum, act: GaloisAction) -> Result<Self> {
        act.validate(&rd)?;
        for g in &act.inertia {
            let inv = g.inverse_unimodular()?;
            for (a, c) in rd.roots().iter().zip(rd.coroots()) {
                if g.apply(c) != *c || rd.act_on_root(&inv, a) != *a {
                    return Err(Error::Argument("inertia must fix every root and coroot".into()));
                }
            }
        }
        let weyl = weyl_group(&rd)?;
        let weyl_index = weyl.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let xi = coinvariants(rd.rank(), &act.inertia)?;
        let weyl_on_xi = weyl.iter().map(|w| xi.induced(w)).collect::<Result<Vec<_>>>()?;
        let coroot_images: Vec<Vec<i64>> = rd.coroots().iter().map(|c| xi.project(c)).collect();
        let m = xi.group.ngens();
        let coroot_sub = Subgroup::generated_by(&xi.group, &IntMatrix::from_columns(m, &coroot_images))?;
        // Ω = X_I / Q^∨, presented on the canonical coordinates of X_I
        let mut rel = IntMatrix::zeros(m, 0);
        for (i, &d) in xi.group.torsion.iter().enumerate() {
            let mut col = vec![0; m];
            col[i] = d;
            rel = rel.hcat(&IntMatrix::from_columns(m, &[col]));
        }
        rel = rel.hcat(&coroot_sub.inclusion);
        let omega = Quotient::of(m, &rel)?;
        Ok(AffineConfig { rd, act, weyl, weyl_index, xi, weyl_on_xi, coroot_images, coroot_sub, omega })
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn action(&self) -> &GaloisAction {
        &self.act
    }

    pub fn weyl(&self) -> &[IntMatrix] {
        &self.weyl
    }

    pub fn weyl_index(&self, m: &IntMatrix) -> Option<usize> {
        self.weyl_index.get(m).copied()
    }

    /// `X_*(S)_I` in canonical form.
    pub fn translations(&self) -> &FGAbelianGroup {
        &self.xi.group
    }

    pub fn coinvariant_quotient(&self) -> &Quotient {
        &self.xi
    }

    /// The image of the coroot lattice in `X_I`.
    pub fn coroot_subgroup(&self) -> &Subgroup {
        &self.coroot_sub
    }

    pub fn omega(&self) -> &FGAbelianGroup {
        &self.omega.group
    }

    pub fn identity(&self) -> AffineElement {
        AffineElement { translation: vec![0; self.xi.group.ngens()], finite: 0 }
    }

    /// Translation by the image of a cocharacter.
    pub fn translation(&self, y: &[i64]) -> AffineElement {
        AffineElement { translation: self.xi.project(y), finite: 0 }
    }

    pub fn weyl_element(&self, w: usize) -> AffineElement {
        AffineElement { translation: vec![0; self.xi.group.ngens()], finite: w }
    }

    fn check(&self, a: &AffineElement) -> Result<()> {
        if a.translation.len() != self.xi.group.ngens() || a.finite >= self.weyl.len() {
            return Err(Error::Argument("element does not belong to this configuration".into()));
        }
        Ok(())
    }

    fn weyl_mul(&self, a: usize, b: usize) -> usize {
        self.weyl_index[&self.weyl[a].mul(&self.weyl[b])]
    }

    fn weyl_inv(&self, a: usize) -> usize {
        self.weyl_index[&self.weyl[a].inverse_unimodular().expect("Weyl elements are unimodular")]
    }

    /// `(t_ν w)(t_μ u) = t_{ν + w μ} (w u)`.
    pub fn multiply(&self, a: &AffineElement, b: &AffineElement) -> Result<AffineElement> {
        self.check(a)?;
        self.check(b)?;
        let wm = self.weyl_on_xi[a.finite].apply(&b.translation);
        Ok(AffineElement { translation: self.xi.group.add(&a.translation, &wm), finite: self.weyl_mul(a.finite, b.finite) })
    }

    /// `(t_ν w)^{-1} = t_{-w^{-1} ν} w^{-1}`.
    pub fn inverse(&self, a: &AffineElement) -> Result<AffineElement> {
        self.check(a)?;
        let wi = self.weyl_inv(a.finite);
        let t: Vec<i64> = self.weyl_on_xi[wi].apply(&a.translation).iter().map(|x| -x).collect();
        Ok(AffineElement { translation: self.xi.group.reduced(&t), finite: wi })
    }

    /// Class of the element in `Ω ≅ W̃ / W_aff`.
    pub fn omega_class(&self, a: &AffineElement) -> Vec<i64> {
        self.omega.project(&a.translation)
    }

    pub fn is_in_waff(&self, a: &AffineElement) -> bool {
        self.omega.group.is_zero(&self.omega_class(a))
    }

    /// `⟨α, ν⟩` for a translation in `X_I`; well defined because inertia
    /// fixes the roots.
    fn pair(&self, root: usize, t: &[i64]) -> i64 {
        pairing(&self.rd.roots()[root], &self.xi.section.apply(t))
    }

    /// Iwahori–Matsumoto length: the number of affine root hyperplanes
    /// separating the base alcove from its image.
    pub fn im_length(&self, a: &AffineElement) -> Result<u64> {
        self.check(a)?;
        let wt = self.weyl[a.finite].transpose();
        let mut len = 0u64;
        let positive = self.rd.positive_roots();
        let h = positive.iter().copied().collect::<BTreeSet<_>>();
        for &i in &positive {
            // w^{-1} α as a character is α ∘ w
            let image = wt.apply(&self.rd.roots()[i]);
            let j = self.rd.root_index(&image).expect("Weyl group permutes roots");
            let k = self.pair(i, &a.translation);
            len += if h.contains(&j) { k.unsigned_abs() } else { (k - 1).unsigned_abs() };
        }
        Ok(len)
    }

    /// Elements of `W_aff` whose translation has coroot-lattice coordinates
    /// of sup-norm at most `radius` (torsion coordinates unrestricted).
    pub fn waff_ball(&self, radius: u64, exec: Exec) -> Result<Vec<AffineElement>> {
        let points = ball(&self.coroot_sub.group, radius)?;
        let nw = self.weyl.len();
        let total = points.len().checked_mul(nw).filter(|&t| t <= BALL_CAP);
        let total = total.ok_or_else(|| Error::Resource(format!("ball exceeds {BALL_CAP} elements")))?;
        Ok(exec.map_range(total, |k| {
            let c = &points[k / nw];
            AffineElement {
                translation: self.xi.group.reduced(&self.coroot_sub.inclusion.apply(c)),
                finite: k % nw,
            }
        }))
    }
}

/// All elements of a presented group with free coordinates in
/// `[-radius, radius]`, in lexicographic order.
pub fn ball(group: &FGAbelianGroup, radius: u64) -> Result<Vec<Vec<i64>>> {
    let r = radius as i64;
    let ranges: Vec<(i64, i64)> = group.moduli().iter().map(|&d| if d == 0 { (-r, r) } else { (0, d - 1) }).collect();
    let size = ranges.iter().try_fold(1usize, |acc, &(lo, hi)| acc.checked_mul((hi - lo + 1) as usize));
    match size {
        Some(s) if s <= BALL_CAP => {}
        _ => return Err(Error::Resource(format!("ball exceeds {BALL_CAP} points"))),
    }
    let mut out = vec![vec![]];
    for &(lo, hi) in &ranges {
        out = out.into_iter().flat_map(|v| (lo..=hi).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    Ok(out)
}

/// σ acting on `W̃`: an endomorphism of `X_I` and a permutation of `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaAction {
    pub on_translations: IntMatrix,
    pub on_weyl: Vec<usize>,
    /// Induced endomorphism of `Ω` (derived).
    #[serde(default, skip_deserializing)]
    pub on_omega: Option<IntMatrix>,
}

impl SigmaAction {
    /// σ induced by the Frobenius of the configuration.
    pub fn from_frobenius(cfg: &AffineConfig) -> Result<Self> {
        let f = &cfg.act.frobenius;
        let finv = f.inverse_unimodular()?;
        let on_translations = cfg.xi.induced(f)?;
        let on_weyl = cfg
            .weyl
            .iter()
            .map(|w| {
                cfg.weyl_index(&f.mul(w).mul(&finv))
                    .ok_or_else(|| Error::Validation("Frobenius does not normalize the Weyl group".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(cfg, on_translations, on_weyl)
    }

    /// Validates caller-supplied data: an automorphism of `X_I` and of `W`,
    /// compatible with the action of `W` on `X_I`, permuting the coroots,
    /// of finite order.
    pub fn explicit(cfg: &AffineConfig, on_translations: IntMatrix, on_weyl: Vec<usize>) -> Result<Self> {
        let g = &cfg.xi.group;
        let n = g.ngens();
        if !g.is_endomorphism(&on_translations) {
            return Err(Error::Validation("σ does not define an endomorphism of X_I".into()));
        }
        let on_translations = g.reduce_endomorphism(&on_translations);
        let nw = cfg.weyl.len();
        if on_weyl.len() != nw || on_weyl.iter().collect::<BTreeSet<_>>().len() != nw || on_weyl.iter().any(|&i| i >= nw)
        {
            return Err(Error::Validation("σ on W must be a permutation".into()));
        }
        if on_weyl[0] != 0 {
            return Err(Error::Validation("σ must fix the identity of W".into()));
        }
        let simple: Vec<usize> =
            cfg.rd.simple_roots().iter().map(|&i| cfg.weyl_index[&cfg.rd.reflection(i)]).collect();
        for &s in &simple {
            for w in 0..nw {
                if on_weyl[cfg.weyl_mul(s, w)] != cfg.weyl_mul(on_weyl[s], on_weyl[w]) {
                    return Err(Error::Validation("σ on W is not multiplicative".into()));
                }
            }
        }
        for w in 0..nw {
            for j in 0..n {
                let mut e = vec![0; n];
                e[j] = 1;
                let lhs = g.reduced(&on_translations.apply(&cfg.weyl_on_xi[w].apply(&e)));
                let rhs = g.reduced(&cfg.weyl_on_xi[on_weyl[w]].apply(&on_translations.apply(&e)));
                if lhs != rhs {
                    return Err(Error::Validation("σ is not compatible with the W-action on X_I".into()));
                }
            }
        }
        for c in &cfg.coroot_images {
            let image = g.reduced(&on_translations.apply(c));
            if !cfg.coroot_images.contains(&image) {
                return Err(Error::Validation("σ must permute the coroots".into()));
            }
        }
        let finite = (1..=ORDER_CAP).any(|k| {
            let m = g.reduce_endomorphism(&on_translations.pow(k));
            (0..n).all(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                g.reduced(&m.apply(&e)) == e
            }) && perm_pow_is_identity(&on_weyl, k)
        });
        if !finite {
            return Err(Error::Validation("σ does not have finite order".into()));
        }
        let on_omega = Some(cfg.omega.induced(&on_translations)?);
        Ok(SigmaAction { on_translations, on_weyl, on_omega })
    }

    pub fn apply(&self, cfg: &AffineConfig, a: &AffineElement) -> AffineElement {
        AffineElement {
            translation: cfg.xi.group.reduced(&self.on_translations.apply(&a.translation)),
            finite: self.on_weyl[a.finite],
        }
    }
}

fn perm_pow_is_identity(p: &[usize], k: usize) -> bool {
    (0..p.len()).all(|i| {
        let mut j = i;
        for _ in 0..k {
            j = p[j];
        }
        j == i
    })
}

/// Result of the σ-fixed-point enumeration together with the hypothesis
/// checks under which only the identity should survive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaFixedReport {
    pub radius: u64,
    pub ball_size: usize,
    pub elliptic: bool,
    /// Root indices of a σ-stable positive system, if one exists.
    pub stable_positive_system: Option<Vec<usize>>,
    pub hypotheses_hold: bool,
    pub warnings: Vec<String>,
    pub fixed: Vec<AffineElement>,
    /// `Some(fixed == {1})` when the hypotheses hold.
    pub only_identity: Option<bool>,
}

/// Ellipticity read off from σ on `X_I`: every σ-fixed translation pairs to
/// zero with all roots (that is, it is central up to torsion).
pub fn sigma_is_elliptic(cfg: &AffineConfig, sigma: &SigmaAction) -> Result<bool> {
    let fixed = fixed_subgroup(&cfg.xi.group, &sigma.on_translations)?;
    for j in 0..fixed.group.ngens() {
        let t = fixed.inclusion.column(j);
        if (0..cfg.rd.roots().len()).any(|i| cfg.pair(i, &t) != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches every Weyl chamber for a positive system whose coroots σ permutes.
pub fn stable_positive_system(cfg: &AffineConfig, sigma: &SigmaAction) -> Option<Vec<usize>> {
    let g = &cfg.xi.group;
    let base = cfg.rd.positive_roots();
    cfg.weyl.iter().find_map(|w| {
        let coroots: BTreeSet<Vec<i64>> =
            base.iter().map(|&i| cfg.xi.project(&w.apply(&cfg.rd.coroots()[i]))).collect();
        let stable = coroots.iter().all(|c| coroots.contains(&g.reduced(&sigma.on_translations.apply(c))));
        stable.then(|| {
            let mut idx: Vec<usize> =
                coroots.iter().map(|c| cfg.coroot_images.iter().position(|x| x == c).unwrap()).collect();
            idx.sort();
            idx
        })
    })
}

/// σ-fixed elements of `W_aff` within the ball of the given radius.
pub fn sigma_fixed_waff(cfg: &AffineConfig, sigma: &SigmaAction, radius: u64) -> Result<SigmaFixedReport> {
    sigma_fixed_waff_with(cfg, sigma, radius, Exec::default())
}

pub fn sigma_fixed_waff_with(
    cfg: &AffineConfig,
    sigma: &SigmaAction,
    radius: u64,
    exec: Exec,
) -> Result<SigmaFixedReport> {
    if radius == 0 {
        return Err(Error::Argument("radius must be at least 1".into()));
    }
    let elements = cfg.waff_ball(radius, exec)?;
    let keep = exec.map(&elements, |a| sigma.apply(cfg, a) == *a);
    let mut fixed: Vec<AffineElement> =
        elements.iter().zip(&keep).filter(|(_, &k)| k).map(|(a, _)| a.clone()).collect();
    fixed.sort();
    let elliptic = sigma_is_elliptic(cfg, sigma)?;
    let stable = stable_positive_system(cfg, sigma);
    let mut warnings = Vec::new();
    if !elliptic {
        warnings.push("torus is not elliptic".to_string());
    }
    if stable.is_none() {
        warnings.push("no σ-stable positive system".to_string());
    }
    let hypotheses_hold = elliptic && stable.is_some();
    let only_identity = hypotheses_hold.then(|| fixed == [cfg.identity()]);
    Ok(SigmaFixedReport {
        radius,
        ball_size: elements.len(),
        elliptic,
        stable_positive_system: stable,
        hypotheses_hold,
        warnings,
        fixed,
        only_identity,
    })
}

/// `Ω = X_*(S)_I / Q^∨`.
pub fn omega_group(rd: &RootDatum, act: &GaloisAction) -> Result<FGAbelianGroup> {
    Ok(AffineConfig::new(rd.clone(), act.clone())?.omega.group)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub representative: Vec<i64>,
    pub size: usize,
    /// How many points of the ball lie in the orbit.
    pub in_ball: usize,
}

/// Orbits of the group generated by `wgroup` on the ball of `fixed`, each
/// represented by its lexicographically smallest element.
pub fn cartan_orbits(fixed: &FGAbelianGroup, wgroup: &[IntMatrix], radius: u64) -> Result<Vec<Orbit>> {
    for m in wgroup {
        if !fixed.is_endomorphism(m) {
            return Err(Error::Argument("automorphism does not descend to the group".into()));
        }
    }
    let points = ball(fixed, radius)?;
    let mut orbit_of: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut orbits: Vec<(BTreeSet<Vec<i64>>, usize)> = Vec::new();
    for p in &points {
        if let Some(&k) = orbit_of.get(p) {
            orbits[k].1 += 1;
            continue;
        }
        let mut orbit = BTreeSet::from([p.clone()]);
        let mut stack = vec![p.clone()];
        while let Some(x) = stack.pop() {
            for m in wgroup {
                let y = fixed.reduced(&m.apply(&x));
                if orbit.insert(y.clone()) {
                    stack.push(y);
                }
            }
            if orbit.len() > ORBIT_CAP {
                return Err(Error::Argument("orbit is infinite or too large; maps must be automorphisms of finite order".into()));
            }
        }
        let k = orbits.len();
        for y in &orbit {
            orbit_of.insert(y.clone(), k);
        }
        orbits.push((orbit, 1));
    }
    let mut out: Vec<Orbit> = orbits
        .into_iter()
        .map(|(o, n)| Orbit { representative: o.iter().next().unwrap().clone(), size: o.len(), in_ball: n })
        .collect();
    out.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(out)
}

/// The Cartan-type double-coset data: `W`-orbits on the σ-fixed part of `X_I`
/// within a ball. `W` is the σ-centralizer of the finite Weyl group.
pub fn cartan_for_config(cfg: &AffineConfig, sigma: &SigmaAction, radius: u64) -> Result<(FGAbelianGroup, Vec<Orbit>)> {
    let fixed = fixed_subgroup(&cfg.xi.group, &sigma.on_translations)?;
    let mut mats = Vec::new();
    for w in 0..cfg.weyl.len() {
        if sigma.on_weyl[w] != w {
            continue;
        }
        // restrict w to the fixed subgroup via coordinates
        let k = fixed.group.ngens();
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let image = cfg.weyl_on_xi[w].apply(&fixed.inclusion.column(j));
            let c = fixed
                .coordinates(&cfg.xi.group, &cfg.xi.group.reduced(&image))?
                .ok_or_else(|| Error::Computation("Weyl element does not preserve the fixed subgroup".into()))?;
            cols.push(c);
        }
        mats.push(IntMatrix::from_columns(k, &cols));
    }
    let orbits = cartan_orbits(&fixed.group, &mats, radius)?;
    Ok((fixed.group, orbits))
}

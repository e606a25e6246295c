//! Depth of torus parameters and the depth-transfer functions built from
//! normalized Herbrand functions.
//!
//! General tori are only accessed through a declared finite family of
//! morphisms from induced tori; every `Φ` below is the pointwise maximum over
//! that family.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plcalc::{pointwise_max, PLFunction};
use crate::ramification::RamificationProfile;
use crate::rational::{ceil_int, Q};

/// `R = ∏ Res_{E_j/F} G_m`, one profile per factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InducedTorusRaw")]
pub struct InducedTorusDatum {
    components: Vec<RamificationProfile>,
}

#[derive(Deserialize)]
struct InducedTorusRaw {
    components: Vec<RamificationProfile>,
}

impl TryFrom<InducedTorusRaw> for InducedTorusDatum {
    type Error = Error;
    fn try_from(raw: InducedTorusRaw) -> Result<Self> {
        InducedTorusDatum::new(raw.components)
    }
}

impl InducedTorusDatum {
    pub fn new(components: Vec<RamificationProfile>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Validation("induced torus needs at least one factor".into()))?;
        if components.iter().any(|c| c.p() != first.p()) {
            return Err(Error::Validation("all factors must share the residue characteristic".into()));
        }
        Ok(InducedTorusDatum { components })
    }

    pub fn components(&self) -> &[RamificationProfile] {
        &self.components
    }

    pub fn is_tame(&self) -> bool {
        self.components.iter().all(RamificationProfile::is_tame)
    }
}

/// A torus presented by a finite family of morphisms from induced tori.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusDatum {
    generators: Vec<TorusGenerator>,
    /// `Φ_T`, computed on first use.
    #[serde(skip)]
    transfer: OnceLock<PLFunction>,
}

impl PartialEq for TorusDatum {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Eq for TorusDatum {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGenerator {
    pub source: InducedTorusDatum,
    #[serde(default)]
    pub label: String,
}

impl TorusDatum {
    pub fn new(generators: Vec<TorusGenerator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Validation("torus datum needs at least one generator".into()));
        }
        Ok(TorusDatum { generators, transfer: OnceLock::new() })
    }

    /// The induced torus itself, via the identity morphism.
    pub fn induced(source: InducedTorusDatum) -> Self {
        TorusDatum { generators: vec![TorusGenerator { source, label: "id".into() }], transfer: OnceLock::new() }
    }

    pub fn generators(&self) -> &[TorusGenerator] {
        &self.generators
    }

    pub fn with_generator(mut self, source: InducedTorusDatum, label: &str) -> Self {
        self.generators.push(TorusGenerator { source, label: label.into() });
        self.transfer = OnceLock::new();
        self
    }
}

/// Standard depths `dep^std(ψ_j)`, one per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedParameterDepths {
    pub std_depths: Vec<Q>,
}

/// The tori in `𝓔_x` and the root-splitting fields at a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupVertexDatum {
    tori: Vec<TorusDatum>,
    #[serde(default)]
    root_fields: Vec<RamificationProfile>,
}

impl GroupVertexDatum {
    pub fn new(tori: Vec<TorusDatum>, root_fields: Vec<RamificationProfile>) -> Result<Self> {
        if tori.is_empty() {
            return Err(Error::Validation("vertex datum needs at least one torus".into()));
        }
        Ok(GroupVertexDatum { tori, root_fields })
    }

    pub fn tori(&self) -> &[TorusDatum] {
        &self.tori
    }

    pub fn root_fields(&self) -> &[RamificationProfile] {
        &self.root_fields
    }
}

fn e_of(p: &RamificationProfile) -> Q {
    Q::from_integer(p.e().into())
}

fn check_nonneg(name: &str, x: &Q) -> Result<()> {
    if x.is_negative() {
        return Err(Error::Domain(format!("{name} must be nonnegative, got {x}")));
    }
    Ok(())
}

/// `dep_R(ψ) = max_j (1/e_j) · φ_{E_j/F}^{-1}(dep^std(ψ_j))`.
pub fn param_depth_induced(torus: &InducedTorusDatum, depths: &InducedParameterDepths) -> Result<Q> {
    if torus.components.len() != depths.std_depths.len() {
        return Err(Error::Argument(format!(
            "{} standard depths supplied for {} factors",
            depths.std_depths.len(),
            torus.components.len()
        )));
    }
    let mut best: Option<Q> = None;
    for (prof, d) in torus.components.iter().zip(&depths.std_depths) {
        check_nonneg("standard depth", d)?;
        let v = prof.herbrand_psi().evaluate(d)? / e_of(prof);
        best = Some(match best {
            Some(b) if b >= v => b,
            _ => v,
        });
    }
    Ok(best.expect("nonempty torus"))
}

/// Standard depth of the parameter attached to a depth-`r` character of
/// `Res_{E/F} G_m`: `φ_{E/F}(e·r)`.
pub fn char_param_std_depth(field: &RamificationProfile, r: &Q) -> Result<Q> {
    check_nonneg("depth", r)?;
    field.herbrand_phi().evaluate(&(e_of(field) * r))
}

/// `Φ_R(r) = max_i φ_{E_i/F}(e_i r)`.
pub fn depth_transfer_induced(torus: &InducedTorusDatum) -> PLFunction {
    let fs: Vec<PLFunction> = torus.components.iter().map(RamificationProfile::normalized_phi).collect();
    pointwise_max(&fs).expect("nonempty torus")
}

/// `Φ_T` as the maximum over the declared generating family.
pub fn depth_transfer_torus(torus: &TorusDatum) -> PLFunction {
    torus
        .transfer
        .get_or_init(|| {
            let fs: Vec<PLFunction> = torus.generators.iter().map(|g| depth_transfer_induced(&g.source)).collect();
            pointwise_max(&fs).expect("nonempty family")
        })
        .clone()
}

/// `Φ_T(dep_new) >= dep_std`.
pub fn check_phi_bound(torus: &TorusDatum, dep_new: &Q, dep_std: &Q) -> Result<bool> {
    check_nonneg("depth", dep_new)?;
    check_nonneg("standard depth", dep_std)?;
    Ok(&depth_transfer_torus(torus).evaluate(dep_new)? >= dep_std)
}

/// Feeds `φ_{E_j/F}(e_j r)` back through [`param_depth_induced`]; the result
/// is `r` exactly.
pub fn depth_roundtrip_induced(torus: &InducedTorusDatum, r: &Q) -> Result<Q> {
    let std_depths =
        torus.components.iter().map(|c| char_param_std_depth(c, r)).collect::<Result<Vec<_>>>()?;
    param_depth_induced(torus, &InducedParameterDepths { std_depths })
}

fn ceil_level(x: &Q) -> u64 {
    let c = ceil_int(x);
    let c = if c < BigInt::one() { BigInt::one() } else { c };
    c.to_u64().expect("truncation level fits in u64")
}

/// Minimal `ℓ >= 1` with `Φ_T(r) <= ℓ`.
pub fn ell_bound_torus(torus: &TorusDatum, r: &Q) -> Result<u64> {
    check_nonneg("depth", r)?;
    Ok(ceil_level(&depth_transfer_torus(torus).evaluate(r)?))
}

/// `Φ_{G,x}(r) = max{ max_S Φ_S(r), max_a φ_{F_a/F}(e_a r) }`.
pub fn depth_transfer_group(vertex: &GroupVertexDatum) -> PLFunction {
    let mut fs: Vec<PLFunction> = vertex.tori.iter().map(depth_transfer_torus).collect();
    fs.extend(vertex.root_fields.iter().map(RamificationProfile::normalized_phi));
    pointwise_max(&fs).expect("nonempty vertex datum")
}

/// Minimal `ℓ >= 1` with `Φ_{G,x}(r) <= ℓ`.
pub fn ell_bound_group(vertex: &GroupVertexDatum, r: &Q) -> Result<u64> {
    check_nonneg("depth", r)?;
    Ok(ceil_level(&depth_transfer_group(vertex).evaluate(r)?))
}

/// `ℓ >= φ_{F_a/F}(e_a r)`.
pub fn root_bound_check(root_field: &RamificationProfile, r: &Q, ell: u64) -> Result<bool> {
    if ell == 0 {
        return Err(Error::Argument("ℓ must be at least 1".into()));
    }
    Ok(Q::from_integer(ell.into()) >= char_param_std_depth(root_field, r)?)
}

/// `depth_G(φ) = max{t, s}` for caller-supplied constituents.
pub fn param_depth_general(t_w: &Q, s_t: &Q) -> Result<Q> {
    check_nonneg("t", t_w)?;
    check_nonneg("s", s_t)?;
    Ok(std::cmp::max(t_w, s_t).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn wild_quadratic() -> RamificationProfile {
        RamificationProfile::from_breaks(2, 2, 1, &[(qi(1), 2)]).unwrap()
    }

    /// Unramified ⊕ wild degree-2 with lower break 1.
    fn strictness_torus() -> TorusDatum {
        let unr = RamificationProfile::unramified(2, 2).unwrap();
        TorusDatum::induced(InducedTorusDatum::new(vec![unr, wild_quadratic()]).unwrap())
    }

    #[test]
    fn param_depth_examples() {
        let tame = InducedTorusDatum::new(vec![RamificationProfile::tame(3, 2, 1).unwrap()]).unwrap();
        let zero = InducedParameterDepths { std_depths: vec![qi(0)] };
        assert_eq!(param_depth_induced(&tame, &zero).unwrap(), qi(0));
        let s = q(5, 3);
        let d = InducedParameterDepths { std_depths: vec![s.clone()] };
        assert_eq!(param_depth_induced(&tame, &d).unwrap(), s);
        let wild = InducedTorusDatum::new(vec![wild_quadratic()]).unwrap();
        let d = InducedParameterDepths { std_depths: vec![q(3, 2)] };
        assert_eq!(param_depth_induced(&wild, &d).unwrap(), qi(1));
        let bad = InducedParameterDepths { std_depths: vec![qi(1), qi(2)] };
        assert!(matches!(param_depth_induced(&wild, &bad), Err(Error::Argument(_))));
    }

    #[test]
    fn std_depth_examples() {
        let w = wild_quadratic();
        assert_eq!(char_param_std_depth(&w, &qi(0)).unwrap(), qi(0));
        let tame = RamificationProfile::tame(2, 3, 1).unwrap();
        assert_eq!(char_param_std_depth(&tame, &qi(2)).unwrap(), qi(2));
        assert_eq!(char_param_std_depth(&w, &qi(1)).unwrap(), q(3, 2));
        // the worked formula u_0/p + t - u_0 at u_0 = 1, p = 2, t = 2
        assert_eq!(q(1, 2) + qi(2) - qi(1), q(3, 2));
    }

    #[test]
    fn transfer_examples() {
        let tame = InducedTorusDatum::new(vec![RamificationProfile::tame(2, 3, 1).unwrap()]).unwrap();
        assert_eq!(depth_transfer_induced(&tame), PLFunction::identity());
        let t = strictness_torus();
        let phi_t = depth_transfer_torus(&t);
        let wild_norm = wild_quadratic().normalized_phi();
        for k in 2..40 {
            let r = q(k, 4); // r >= u_0 / p = 1/2
            assert_eq!(phi_t.evaluate(&r).unwrap(), wild_norm.evaluate(&r).unwrap());
        }
        assert_eq!(phi_t.evaluate(&qi(0)).unwrap(), qi(0));
    }

    #[test]
    fn torus_family_examples() {
        let induced = InducedTorusDatum::new(vec![wild_quadratic()]).unwrap();
        let single = TorusDatum::induced(induced.clone());
        assert_eq!(depth_transfer_torus(&single), depth_transfer_induced(&induced));
        let tame = InducedTorusDatum::new(vec![RamificationProfile::tame(2, 1, 3).unwrap()]).unwrap();
        let with_dominated = single.clone().with_generator(tame, "dominated");
        assert_eq!(depth_transfer_torus(&with_dominated), depth_transfer_torus(&single));

        // normalized breaks at r = 3/2 (e = 2, u = 3) and r = 1/4 (e = 4, u = 1)
        let first = RamificationProfile::from_breaks(2, 2, 1, &[(qi(3), 2)]).unwrap();
        let other = RamificationProfile::from_breaks(2, 4, 1, &[(qi(1), 4)]).unwrap();
        let two = TorusDatum::induced(InducedTorusDatum::new(vec![first.clone()]).unwrap())
            .with_generator(InducedTorusDatum::new(vec![other.clone()]).unwrap(), "g2");
        let phi = depth_transfer_torus(&two);
        let f1 = first.normalized_phi();
        let f2 = other.normalized_phi();
        for k in 0..60 {
            let r = q(k, 8);
            let want = std::cmp::max(f1.evaluate(&r).unwrap(), f2.evaluate(&r).unwrap());
            assert_eq!(phi.evaluate(&r).unwrap(), want);
        }
        // 2r = r + 3/4 crosses at r = 3/4
        let xs: Vec<Q> = phi.breakpoints().iter().map(|p| p.0.clone()).collect();
        assert_eq!(xs, vec![qi(0), q(1, 4), q(3, 4), q(3, 2)]);
    }

    #[test]
    fn phi_bound_examples() {
        let t = strictness_torus();
        assert!(check_phi_bound(&t, &q(1, 3), &qi(0)).unwrap());
        let phi1 = depth_transfer_torus(&t).evaluate(&qi(1)).unwrap();
        assert_eq!(phi1, q(3, 2));
        assert!(check_phi_bound(&t, &qi(1), &qi(1)).unwrap());
        assert!(phi1 > qi(1));
        let tame = TorusDatum::induced(
            InducedTorusDatum::new(vec![RamificationProfile::tame(3, 2, 1).unwrap()]).unwrap(),
        );
        assert!(check_phi_bound(&tame, &q(7, 5), &q(7, 5)).unwrap());
        assert!(!check_phi_bound(&tame, &q(7, 5), &q(8, 5)).unwrap());
    }

    #[test]
    fn roundtrip_examples() {
        let wild = InducedTorusDatum::new(vec![wild_quadratic()]).unwrap();
        assert_eq!(depth_roundtrip_induced(&wild, &qi(0)).unwrap(), qi(0));
        assert_eq!(depth_roundtrip_induced(&wild, &qi(1)).unwrap(), qi(1));
        let tame = InducedTorusDatum::new(vec![
            RamificationProfile::tame(5, 2, 1).unwrap(),
            RamificationProfile::tame(5, 3, 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(depth_roundtrip_induced(&tame, &q(5, 7)).unwrap(), q(5, 7));
    }

    #[test]
    fn ell_bound_examples() {
        let t = strictness_torus();
        assert_eq!(ell_bound_torus(&t, &qi(0)).unwrap(), 1);
        assert_eq!(ell_bound_torus(&t, &qi(1)).unwrap(), 2);
        let tame = TorusDatum::induced(
            InducedTorusDatum::new(vec![RamificationProfile::tame(3, 2, 1).unwrap()]).unwrap(),
        );
        assert_eq!(ell_bound_torus(&tame, &qi(3)).unwrap(), 3);
    }

    #[test]
    fn group_transfer_examples() {
        let t = strictness_torus();
        let torus_only = GroupVertexDatum::new(vec![t.clone()], vec![]).unwrap();
        assert_eq!(depth_transfer_group(&torus_only), depth_transfer_torus(&t));
        let tame_t = TorusDatum::induced(
            InducedTorusDatum::new(vec![RamificationProfile::tame(3, 2, 1).unwrap()]).unwrap(),
        );
        let all_tame =
            GroupVertexDatum::new(vec![tame_t.clone()], vec![RamificationProfile::tame(3, 4, 1).unwrap()])
                .unwrap();
        assert_eq!(depth_transfer_group(&all_tame), PLFunction::identity());
        let root = RamificationProfile::from_breaks(3, 3, 1, &[(qi(2), 3)]).unwrap();
        let dominated = GroupVertexDatum::new(vec![tame_t], vec![root.clone()]).unwrap();
        let g = depth_transfer_group(&dominated);
        let norm = root.normalized_phi();
        for k in 3..30 {
            let r = q(k, 3);
            assert_eq!(g.evaluate(&r).unwrap(), norm.evaluate(&r).unwrap());
        }
        assert!(GroupVertexDatum::new(vec![], vec![]).is_err());
    }

    #[test]
    fn root_bound_examples() {
        let tame = RamificationProfile::tame(2, 3, 1).unwrap();
        assert!(root_bound_check(&tame, &qi(2), 2).unwrap());
        assert!(!root_bound_check(&wild_quadratic(), &qi(1), 1).unwrap());
        assert!(root_bound_check(&wild_quadratic(), &qi(1), 2).unwrap());
        assert!(root_bound_check(&wild_quadratic(), &qi(0), 1).unwrap());
    }

    #[test]
    fn general_depth_examples() {
        assert_eq!(param_depth_general(&qi(0), &qi(0)).unwrap(), qi(0));
        assert_eq!(param_depth_general(&qi(1), &q(3, 2)).unwrap(), q(3, 2));
        assert_eq!(param_depth_general(&qi(0), &q(2, 7)).unwrap(), q(2, 7));
    }

    #[test]
    fn serde_schema() {
        let t = strictness_torus();
        let v = serde_json::to_value(&t.generators()[0].source).unwrap();
        let back: InducedTorusDatum = serde_json::from_value(v).unwrap();
        assert_eq!(back, t.generators()[0].source);
        let mixed = serde_json::json!({"components": [
            {"p": 2, "e": 1, "f": 1, "steps": [[0, 1, 1]]},
            {"p": 3, "e": 1, "f": 1, "steps": [[0, 1, 1]]}
        ]});
        assert!(serde_json::from_value::<InducedTorusDatum>(mixed).is_err());
    }

    fn arb_torus() -> impl Strategy<Value = TorusDatum> {
        prop::collection::vec((1i64..6, 1i64..3, 0usize..3), 1..4).prop_map(|specs| {
            let comps = specs
                .into_iter()
                .map(|(a, b, k)| {
                    let breaks: Vec<(Q, u64)> =
                        (0..k).map(|i| (q(a * (i as i64 + 1), b), 2u64.pow((k - i) as u32))).collect();
                    RamificationProfile::from_breaks(2, 2u64.pow(k as u32), 1, &breaks).unwrap()
                })
                .collect();
            TorusDatum::induced(InducedTorusDatum::new(comps).unwrap())
        })
    }

    proptest! {
        #[test]
        fn adding_generators_never_decreases(t in arb_torus(), extra in arb_torus(), a in 0i64..40) {
            let bigger = t.clone().with_generator(extra.generators()[0].source.clone(), "extra");
            let r = q(a, 3);
            prop_assert!(depth_transfer_torus(&bigger).evaluate(&r).unwrap() >= depth_transfer_torus(&t).evaluate(&r).unwrap());
        }

        #[test]
        fn bound_check_monotone(t in arb_torus(), a in 0i64..40, b in 0i64..10, c in 0i64..40) {
            let d = q(a, 4);
            let d2 = &d + q(b, 3);
            let s = q(c, 5);
            if check_phi_bound(&t, &d, &s).unwrap() {
                prop_assert!(check_phi_bound(&t, &d2, &s).unwrap());
            }
            prop_assert!(ell_bound_torus(&t, &d).unwrap() <= ell_bound_torus(&t, &d2).unwrap());
        }

        #[test]
        fn roundtrip_is_exact(t in arb_torus(), a in 0i64..50, b in 1i64..9) {
            let r = q(a, b);
            prop_assert_eq!(depth_roundtrip_induced(&t.generators()[0].source, &r).unwrap(), r);
        }
    }
}

//! Worked examples shipped with the library and the CLI.
//!
//! Every fixture is available as a typed value and, through [`document`], as
//! the JSON input of the CLI command it belongs to.

use serde_json::{json, Value};

use crate::affine::AffineConfig;
use crate::depth::InducedTorusDatum;
use crate::error::{Error, Result};
use crate::finitemodels::{build_group, iwahori_subgroup, FiniteGroup, GroupType, RingKind, Subgroup, TruncRing};
use crate::hecke::{build_block_algebra, Cocycle, CoxeterSystem, HeckeAlgebra, HeckeParams, OmegaGroup};
use crate::lattice::IntMatrix;
use crate::ramification::RamificationProfile;
use crate::rational::qi;
use crate::rootdata::{GaloisAction, RootDatum};

pub fn tame_profiles() -> Vec<(&'static str, RamificationProfile)> {
    vec![
        ("unramified-p2-f2", RamificationProfile::unramified(2, 2).unwrap()),
        ("tame-p3-e2", RamificationProfile::tame(3, 2, 1).unwrap()),
        ("tame-p5-e4-f2", RamificationProfile::tame(5, 4, 2).unwrap()),
        ("tame-p7-e3", RamificationProfile::tame(7, 3, 1).unwrap()),
    ]
}

/// Totally ramified quadratic extension of a 2-adic field, lower break 1.
pub fn wild_quadratic() -> RamificationProfile {
    RamificationProfile::from_breaks(2, 2, 1, &[(qi(1), 2)]).unwrap()
}

/// `Res_{E1/F} G_m × Res_{E2/F} G_m`, `E1` unramified quadratic and `E2` the
/// wild quadratic fixture.
pub fn two_component_torus() -> InducedTorusDatum {
    InducedTorusDatum::new(vec![RamificationProfile::unramified(2, 2).unwrap(), wild_quadratic()]).unwrap()
}

/// `Q_3 ⊂ Q_3(ζ_3) ⊂ Q_3(ζ_9)`: returns `(E1/F, E2/E1, E2/F)`.
///
/// `Gal(Q_3(ζ_9)/Q_3) ≅ (Z/9)^×` has `G_0` of order 6, `G_1 = G_2` of order 3
/// and `G_3 = 1`.
pub fn cyclotomic_tower_p3() -> (RamificationProfile, RamificationProfile, RamificationProfile) {
    let e1 = RamificationProfile::tame(3, 2, 1).unwrap();
    let e2_e1 = RamificationProfile::from_breaks(3, 3, 1, &[(qi(2), 3)]).unwrap();
    let e2 = RamificationProfile::from_breaks(3, 6, 1, &[(qi(2), 3)]).unwrap();
    (e1, e2_e1, e2)
}

pub fn sl2() -> RootDatum {
    RootDatum::preset("SL2").unwrap()
}

pub fn gl2() -> RootDatum {
    RootDatum::preset("GL2").unwrap()
}

/// `SL_2(F_3)` with its upper triangular Borel subgroup.
pub fn sl2_f3_borel() -> (FiniteGroup, Subgroup) {
    let g = build_group(&TruncRing::new(RingKind::Integers, 3, 1).unwrap(), GroupType::SL2).unwrap();
    let b = iwahori_subgroup(&g);
    (g, b)
}

fn mat(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

/// Configurations for the σ-fixed-point enumeration: name, root datum and
/// Galois action (σ is the Frobenius).
pub fn sigma_configs() -> Vec<(&'static str, RootDatum, GaloisAction)> {
    vec![
        ("anisotropic-rank1", RootDatum::torus(1).unwrap(), GaloisAction::with_frobenius(mat(&[&[-1]]))),
        (
            "anisotropic-rank2-order3",
            RootDatum::torus(2).unwrap(),
            GaloisAction::with_frobenius(mat(&[&[0, -1], &[1, -1]])),
        ),
        (
            "anisotropic-rank2-order4",
            RootDatum::torus(2).unwrap(),
            GaloisAction::with_frobenius(mat(&[&[0, -1], &[1, 0]])),
        ),
        (
            "anisotropic-rank2-order6",
            RootDatum::torus(2).unwrap(),
            GaloisAction::with_frobenius(mat(&[&[1, -1], &[1, 0]])),
        ),
        (
            "norm-one-ramified",
            RootDatum::torus(2).unwrap(),
            GaloisAction::new(vec![mat(&[&[0, 1], &[1, 0]])], mat(&[&[-1, 0], &[0, -1]])),
        ),
        ("A1-split", sl2(), GaloisAction::split(1)),
        ("A1-negation", sl2(), GaloisAction::with_frobenius(mat(&[&[-1]]))),
        ("GL2-split", gl2(), GaloisAction::split(2)),
    ]
}

pub fn sigma_config(name: &str) -> Result<AffineConfig> {
    let (_, rd, act) = sigma_configs()
        .into_iter()
        .find(|c| c.0 == name)
        .ok_or_else(|| Error::Argument(format!("unknown configuration {name}")))?;
    AffineConfig::new(rd, act)
}

/// `H(Ã_1, q)` extended by `Ω = Z/2` swapping the two nodes.
pub fn pgl2_block(q: i64) -> HeckeAlgebra {
    let cox = CoxeterSystem::affine_a(1).unwrap();
    let p = HeckeParams::uniform(&cox, qi(q));
    build_block_algebra(cox, OmegaGroup::cyclic(2, &[1, 0]), p, Cocycle::trivial(2)).unwrap()
}

/// `μ((a1, a2), (b1, b2)) = a1 b2` on `Z/2 × Z/2`, elements `a1 + 2 a2`.
pub fn klein_cocycle() -> Vec<Vec<u32>> {
    (0..4).map(|x| (0..4).map(|y| ((x & 1) * ((y >> 1) & 1)) as u32).collect()).collect()
}

/// Adds the coboundary of `f` to a `Z/2`-valued cocycle on `Z/2 × Z/2`.
pub fn klein_twist(mu: &[Vec<u32>], f: &[u32]) -> Vec<Vec<u32>> {
    (0..4).map(|x| (0..4).map(|y| (mu[x][y] + f[x] + f[y] + 2 - f[x ^ y]) % 2).collect()).collect()
}

/// `Ã_1 × Ã_1` with `Ω = Z/2 × Z/2`, each factor swapping one pair of nodes.
pub fn klein_block(mu: Vec<Vec<u32>>, q: i64) -> HeckeAlgebra {
    let t = CoxeterSystem::new(vec!["t0".into(), "t1".into()], vec![vec![1, 0], vec![0, 1]]).unwrap();
    let cox = CoxeterSystem::affine_a(1).unwrap().product(&t).unwrap();
    let omega = OmegaGroup::klein(&[1, 0, 2, 3], &[0, 1, 3, 2]);
    let p = HeckeParams::uniform(&cox, qi(q));
    build_block_algebra(cox, omega, p, Cocycle { order: 2, values: mu }).unwrap()
}

pub const NAMES: &[&str] = &[
    "tame",
    "wild-quadratic",
    "two-component-torus",
    "cyclotomic-tower-p3",
    "ell-bound",
    "phi-group",
    "sl2",
    "gl2",
    "coinvariants-negation",
    "sigma-anisotropic",
    "sigma-a1-negation",
    "cartan-gl2",
    "hecke-pgl2",
    "hecke-klein",
    "sl2-f3-borel",
    "sl2-f3t2-transfer",
];

fn profile(p: &RamificationProfile) -> Value {
    p.to_json().unwrap()
}

/// The CLI input document of a named fixture.
pub fn document(name: &str) -> Result<Value> {
    let (e1, e2_e1, e2) = cyclotomic_tower_p3();
    Ok(match name {
        "tame" => json!({ "profile": profile(&tame_profiles()[2].1) }),
        "wild-quadratic" => json!({ "profile": profile(&wild_quadratic()), "points": ["1", "2"] }),
        "two-component-torus" => json!({
            "torus": { "components": two_component_torus().components().iter().map(profile).collect::<Vec<_>>() },
            "r": "1",
            "char_depths": ["1", null],
        }),
        "cyclotomic-tower-p3" => json!({
            "tower": { "base": profile(&e1), "top": profile(&e2_e1), "whole": profile(&e2) }
        }),
        "ell-bound" => json!({
            "torus": { "generators": [{ "source": { "components": two_component_torus().components().iter().map(profile).collect::<Vec<_>>() }, "label": "T" }] },
            "r": ["1/4", "1/2", "1", "2", "5/2"],
        }),
        "phi-group" => json!({
            "vertex": {
                "tori": [{ "generators": [{ "source": { "components": [profile(&wild_quadratic())] }, "label": "E2" }] }],
                "root_fields": [profile(&RamificationProfile::unramified(2, 2).unwrap())],
            },
            "r": "1",
        }),
        "sl2" => json!({ "root_datum": { "preset": "SL2" }, "galois": { "frobenius": [[1]] } }),
        "gl2" => json!({ "root_datum": { "preset": "GL2" }, "galois": { "frobenius": [[0, 1], [1, 0]] } }),
        "coinvariants-negation" => json!({ "rank": 1, "action": [[[-1]]], "sigma": [[-1]] }),
        "sigma-anisotropic" => json!({ "root_datum": { "rank": 2, "roots": [], "coroots": [] }, "galois": { "frobenius": [[0, -1], [1, -1]] } }),
        "sigma-a1-negation" => json!({ "root_datum": { "preset": "SL2" }, "galois": { "frobenius": [[-1]] } }),
        "cartan-gl2" => json!({ "root_datum": { "preset": "GL2" }, "galois": { "frobenius": [[1, 0], [0, 1]] } }),
        "hecke-pgl2" => json!({
            "algebra": {
                "labels": ["s0", "s1"], "bonds": [[1, 0], [0, 1]], "q": { "s0": 3, "s1": 3 },
                "omega": { "table": [[0, 1], [1, 0]], "action": [[0, 1], [1, 0]] },
                "cocycle": { "order": 2, "values": [[0, 0], [0, 0]] },
            },
            "products": [[[0, ["s0"]], [0, ["s0"]]], [[1, []], [0, ["s0"]]]],
            "compare": {
                "labels": ["s0", "s1"], "bonds": [[1, 0], [0, 1]], "q": { "s0": 2, "s1": 2 },
                "omega": { "table": [[0, 1], [1, 0]], "action": [[0, 1], [1, 0]] },
            },
        }),
        "hecke-klein" => {
            let alg = |mu: Vec<Vec<u32>>| {
                json!({
                    "labels": ["s0", "s1", "t0", "t1"],
                    "bonds": [[1, 0, 2, 2], [0, 1, 2, 2], [2, 2, 1, 0], [2, 2, 0, 1]],
                    "q": { "s0": 2, "s1": 2, "t0": 2, "t1": 2 },
                    "omega": {
                        "table": (0..4).map(|x| (0..4).map(|y| x ^ y).collect::<Vec<usize>>()).collect::<Vec<_>>(),
                        "action": [[0, 1, 2, 3], [1, 0, 2, 3], [0, 1, 3, 2], [1, 0, 3, 2]],
                    },
                    "cocycle": { "order": 2, "values": mu },
                })
            };
            json!({
                "algebra": alg(klein_cocycle()),
                "compare": alg(klein_twist(&klein_cocycle(), &[0, 1, 0, 0])),
            })
        }
        "sl2-f3-borel" => json!({
            "ring": "integers", "p": 3, "ell": 1, "group": "SL2", "subgroup": "iwahori",
            "presented": { "labels": ["s"], "bonds": [[1]], "q": { "s": 3 } },
        }),
        "sl2-f3t2-transfer" => json!({
            "ring": "polynomial", "p": 3, "ell": 2, "group": "SL2", "subgroup": { "congruence": 1 },
            "transfer": "frobenius",
            "idempotent": { "m": 2, "r": 1 },
        }),
        other => {
            return Err(Error::Argument(format!("unknown fixture {other}; known: {}", NAMES.join(", "))));
        }
    })
}

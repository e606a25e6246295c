//! End-to-end runs through several modules at once, using only the public API.

use depthcalc::affine::{sigma_fixed_waff, SigmaAction};
use depthcalc::depth::{char_param_std_depth, depth_transfer_torus, param_depth_induced, InducedParameterDepths, TorusDatum};
use depthcalc::finitemodels::{double_cosets, hecke_structure_constants};
use depthcalc::hecke::{
    build_block_algebra, compare_with_finite_oracle, match_presentations, Cocycle, CoxeterSystem, HeckeParams,
    MatchResult, OmegaGroup,
};
use depthcalc::ramification::tower_phi;
use depthcalc::rational::{q, qi};
use depthcalc::{fixtures, Q};

#[test]
fn two_component_torus_transfer() {
    let induced = fixtures::two_component_torus();
    let r = qi(1);
    // depth 1 on the unramified factor, trivial character on the wild one
    let std_depths = vec![char_param_std_depth(&induced.components()[0], &r).unwrap(), qi(0)];
    let dep_std = std_depths.iter().max().cloned().unwrap();
    let depth = param_depth_induced(&induced, &InducedParameterDepths { std_depths }).unwrap();
    let phi = depth_transfer_torus(&TorusDatum::induced(induced)).evaluate(&depth).unwrap();
    assert_eq!((phi.clone(), dep_std.clone()), (q(3, 2), qi(1)));
    assert!(phi > dep_std);
}

#[test]
fn cyclotomic_tower() {
    let (e1, e2_e1, e2) = fixtures::cyclotomic_tower_p3();
    let composed = tower_phi(&e1.herbrand_phi(), &e2_e1.herbrand_phi()).unwrap();
    assert!(composed.equals(&e2.herbrand_phi()));
    // upper numbering of Q_3(ζ_9)/Q_3: tame jump at 0, wild jump at 1
    let jumps = e2.upper_jumps();
    assert_eq!(jumps.initial_order, 6);
    assert_eq!(jumps.jumps.iter().map(|(s, _)| s.clone()).collect::<Vec<Q>>(), vec![qi(0), qi(1)]);
}

#[test]
fn borel_hecke_algebra_is_presented_by_a1() {
    let (g, b) = fixtures::sl2_f3_borel();
    let table = double_cosets(&g, &b);
    let constants = hecke_structure_constants(&g, &b, &table);
    let cox = CoxeterSystem::finite_a(1).unwrap();
    let params = HeckeParams::uniform(&cox, qi(3));
    let alg = build_block_algebra(cox, OmegaGroup::trivial(1), params, Cocycle::trivial(1)).unwrap();
    let report = compare_with_finite_oracle(&alg, &constants, &[(0, vec![]), (0, vec![0])]).unwrap();
    assert!(report.pass, "{:?}", report.first_mismatch);
    // q = 2 is the wrong residue field
    let cox = CoxeterSystem::finite_a(1).unwrap();
    let wrong = build_block_algebra(cox.clone(), OmegaGroup::trivial(1), HeckeParams::uniform(&cox, qi(2)), Cocycle::trivial(1))
        .unwrap();
    assert!(!compare_with_finite_oracle(&wrong, &constants, &[(0, vec![]), (0, vec![0])]).unwrap().pass);
}

#[test]
fn anisotropic_tori_fix_only_the_identity() {
    for name in ["anisotropic-rank1", "anisotropic-rank2-order3", "anisotropic-rank2-order6"] {
        let cfg = fixtures::sigma_config(name).unwrap();
        let sigma = SigmaAction::from_frobenius(&cfg).unwrap();
        let report = sigma_fixed_waff(&cfg, &sigma, 6).unwrap();
        assert!(report.hypotheses_hold, "{name}");
        assert_eq!(report.only_identity, Some(true), "{name}");
    }
}

#[test]
fn klein_blocks_match_up_to_coboundary() {
    let mu = fixtures::klein_cocycle();
    let a = fixtures::klein_block(mu.clone(), 2);
    let b = fixtures::klein_block(fixtures::klein_twist(&mu, &[0, 1, 0, 0]), 2);
    assert!(matches!(match_presentations(&a, &b).unwrap(), MatchResult::Match(_)));
    let c = fixtures::klein_block(mu, 3);
    assert!(matches!(match_presentations(&a, &c).unwrap(), MatchResult::Failure(_)));
}

//! End-to-end acceptance checks with their time budgets.
//!
//! Each check returns a short detail string on success. A check passes when
//! it returns `Ok` within its budget. The randomized checks draw from a
//! seeded ChaCha stream so runs are reproducible.

use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{sigma_fixed_waff, SigmaAction};
use crate::depth::{
    char_param_std_depth, check_phi_bound, depth_roundtrip_induced, depth_transfer_torus, ell_bound_torus,
    InducedTorusDatum, TorusDatum,
};
use crate::error::{Error, Result};
use crate::finitemodels::{
    build_group, congruence_subgroup, double_cosets, hecke_structure_constants, idempotent_transfer_check,
    iwahori_subgroup, ring_map_iso, transfer_check, GroupType, HeckeVector, RingKind, RingMap, Subgroup, TruncRing,
};
use crate::fixtures;
use crate::hecke::{match_presentations, MatchResult, Obstruction};
use crate::lattice::{FGAbelianGroup, IntMatrix};
use crate::plcalc::PLFunction;
use crate::ramification::{tower_phi, RamificationProfile};
use crate::rational::{q, qi, render, Q};
use crate::rootdata::{coinvariants, fixed_subgroup};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>7} ms / {:>6} ms  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.limit_ms,
            self.detail
        )
    }
}

type Check = fn(u64) -> Result<String>;

const CRITERIA: &[(u32, &str, u64, Check)] = &[
    (1, "herbrand-wild-quadratic", 1, herbrand_wild_quadratic),
    (2, "strictness", 1, strictness),
    (3, "tame-identity", 5, tame_identity),
    (4, "tower-law", 10, tower_law),
    (5, "induced-depth-roundtrip", 5, induced_roundtrip),
    (6, "ell-bound", 5, ell_bound),
    (7, "coinvariants-fixed-points", 10, coinvariants_fixed),
    (8, "sigma-fixed-affine-weyl", 30, sigma_fixed),
    (9, "finite-hecke-oracle", 60, finite_hecke_oracle),
    (10, "transfer-idempotents", 120, transfer_idempotents),
    (11, "presentation-matching", 10, presentation_matching),
];

pub fn criterion_ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionResult> {
    let &(id, name, secs, check) =
        CRITERIA.iter().find(|c| c.0 == id).ok_or_else(|| Error::Argument(format!("no criterion {id}")))?;
    let limit = Duration::from_secs(secs);
    let start = Instant::now();
    let outcome = check(seed);
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("over time budget: {d}")),
        Err(e) => (false, e.to_string()),
    };
    Ok(CriterionResult { id, name, pass, elapsed_ms: elapsed.as_millis(), limit_ms: limit.as_millis(), detail })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed).expect("known id")).collect()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Computation(msg.into()))
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn random_tame_index<R: Rng>(rng: &mut R, p: u64) -> u64 {
    loop {
        let e = rng.gen_range(1..=8);
        if e % p != 0 {
            return e;
        }
    }
}

fn random_positive<R: Rng>(rng: &mut R) -> Q {
    q(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

/// Strictly increasing positive breaks.
fn random_breaks<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(n);
    let mut u = Q::zero();
    for _ in 0..n {
        u += random_positive(rng);
        out.push(u.clone());
    }
    out
}

/// A profile with `n` wild steps, each dropping the order by `p`.
fn random_profile<R: Rng>(rng: &mut R, p: u64, max_wild: usize) -> RamificationProfile {
    let e_t = random_tame_index(rng, p);
    let f = rng.gen_range(1..=3);
    let n = rng.gen_range(0..=max_wild);
    let breaks = random_breaks(rng, n);
    let steps: Vec<(Q, u64)> = breaks.into_iter().enumerate().map(|(i, b)| (b, p.pow((n - i) as u32))).collect();
    RamificationProfile::from_breaks(p, e_t * p.pow(n as u32), f, &steps).expect("well-formed random profile")
}

fn herbrand_wild_quadratic(_: u64) -> Result<String> {
    let w = fixtures::wild_quadratic();
    let phi = w.herbrand_phi();
    let expected = PLFunction::new(vec![(qi(0), qi(0)), (qi(1), qi(1))], q(1, 2))?;
    ensure(phi.equals(&expected), "φ is not t on [0,1] with slope 1/2 after")?;
    let norm = w.normalized_phi().evaluate(&qi(1))?;
    ensure(norm == q(3, 2), format!("φ^norm(1) = {norm}"))?;
    let jumps: Vec<Q> = w.upper_jumps().jumps.into_iter().map(|j| j.0).collect();
    ensure(jumps == vec![qi(1)], format!("upper jumps {jumps:?}"))?;
    Ok("φ(t) = t on [0,1], slope 1/2 after; φ^norm(1) = 3/2; upper jump at 1".into())
}

fn strictness(_: u64) -> Result<String> {
    let torus = fixtures::two_component_torus();
    let r = qi(1);
    let dep_std = char_param_std_depth(&torus.components()[0], &r)?;
    let t = TorusDatum::induced(torus);
    let phi_t = depth_transfer_torus(&t).evaluate(&r)?;
    ensure(dep_std == qi(1), format!("dep_std = {dep_std}"))?;
    ensure(phi_t == q(3, 2), format!("Φ_T(1) = {phi_t}"))?;
    ensure(phi_t > dep_std, "inequality is not strict")?;
    ensure(check_phi_bound(&t, &r, &dep_std)?, "bound fails")?;
    Ok(format!("dep_std = {}, Φ_T(1) = {}, strict = true", render(&dep_std), render(&phi_t)))
}

fn tame_identity(seed: u64) -> Result<String> {
    let mut rng = rng(seed, 3);
    let id = PLFunction::identity();
    for k in 0..1000 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let prof = random_profile(&mut rng, p, 0);
        ensure(prof.is_tame(), "generator produced a wild profile")?;
        ensure(prof.normalized_phi().equals(&id), format!("profile {k} ({prof:?}) is not the identity"))?;
    }
    Ok("1000 tame profiles normalize to the identity".into())
}

/// Collapses consecutive steps of equal order, keeping the later end.
fn merge_steps(steps: Vec<(Q, u64)>) -> Vec<(Q, u64)> {
    let mut out: Vec<(Q, u64)> = Vec::with_capacity(steps.len());
    for (u, o) in steps {
        match out.last_mut() {
            Some(last) if last.1 == o => last.0 = u,
            _ => out.push((u, o)),
        }
    }
    out
}

/// `G` cyclic of order `e_t p^n` with wild breaks `b_1 < ... < b_n`, and
/// `H ≤ G` of order `d p^m`. Returns `(E1/F, E2/E1, E2/F)` for `E2 = L`,
/// `E1 = L^H`: the subgroup filtration is `H_u = G_u ∩ H` and the quotient
/// filtration comes from Herbrand's theorem, `(G/H)_{φ_{L/E1}(u)} = G_u H / H`.
fn synthetic_tower<R: Rng>(rng: &mut R) -> Result<(RamificationProfile, RamificationProfile, RamificationProfile)> {
    let p = PRIMES[rng.gen_range(0..PRIMES.len())];
    let e_t = random_tame_index(rng, p);
    let divisors: Vec<u64> = (1..=e_t).filter(|d| e_t % d == 0).collect();
    let d = divisors[rng.gen_range(0..divisors.len())];
    let n = rng.gen_range(1..=3u32);
    let m = rng.gen_range(0..=n);
    let breaks = random_breaks(rng, n as usize);
    let wild_order = |i: usize| p.pow(n - i as u32);

    let mut g_steps = vec![(Q::zero(), e_t * p.pow(n))];
    let mut h_steps = vec![(Q::zero(), d * p.pow(m))];
    for (i, b) in breaks.iter().enumerate() {
        g_steps.push((b.clone(), wild_order(i)));
        h_steps.push((b.clone(), p.pow((n - i as u32).min(m))));
    }
    let last = breaks.last().unwrap().clone();
    g_steps.push((last.clone(), 1));
    h_steps.push((last, 1));
    let whole = RamificationProfile::new(p, e_t * p.pow(n), 1, merge_steps(g_steps))?;
    let top = RamificationProfile::new(p, d * p.pow(m), 1, merge_steps(h_steps))?;

    let phi_h = top.herbrand_phi();
    let e_q = (e_t / d) * p.pow(n - m);
    let mut q_steps = vec![(Q::zero(), e_q)];
    for (i, b) in breaks.iter().enumerate() {
        let g = wild_order(i);
        let h = p.pow((n - i as u32).min(m));
        q_steps.push((phi_h.evaluate(b)?, g / h));
    }
    let v_last = q_steps.last().unwrap().0.clone();
    q_steps.push((v_last, 1));
    let base = RamificationProfile::new(p, e_q, 1, merge_steps(q_steps))?;
    Ok((base, top, whole))
}

fn tower_law(seed: u64) -> Result<String> {
    let (e1, e2_e1, e2) = fixtures::cyclotomic_tower_p3();
    let composed = tower_phi(&e1.herbrand_phi(), &e2_e1.herbrand_phi())?;
    ensure(composed.equals(&e2.herbrand_phi()), "cyclotomic tower fails the tower law")?;
    let mut rng = rng(seed, 4);
    for k in 0..1000 {
        let (base, top, whole) = synthetic_tower(&mut rng)?;
        let composed = tower_phi(&base.herbrand_phi(), &top.herbrand_phi())?;
        ensure(composed.canonicalize() == whole.herbrand_phi().canonicalize(), format!("synthetic tower {k} fails"))?;
    }
    Ok("cyclotomic p = 3 tower and 1000 synthetic towers".into())
}

fn random_induced<R: Rng>(rng: &mut R) -> InducedTorusDatum {
    let p = PRIMES[rng.gen_range(0..PRIMES.len())];
    let k = rng.gen_range(1..=4);
    InducedTorusDatum::new((0..k).map(|_| random_profile(rng, p, 3)).collect()).expect("same p")
}

fn random_depth<R: Rng>(rng: &mut R) -> Q {
    q(rng.gen_range(0..=40), rng.gen_range(1..=12))
}

fn induced_roundtrip(seed: u64) -> Result<String> {
    let mut rng = rng(seed, 5);
    for k in 0..1000 {
        let t = random_induced(&mut rng);
        let r = random_depth(&mut rng);
        let back = depth_roundtrip_induced(&t, &r)?;
        ensure(back == r, format!("torus {k}: r = {r} came back as {back}"))?;
    }
    Ok("1000 induced tori return r exactly".into())
}

fn ell_bound(seed: u64) -> Result<String> {
    let mut rng = rng(seed, 6);
    let mut checks = 0;
    for k in 0..1000 {
        let mut t = TorusDatum::induced(random_induced(&mut rng));
        let p = t.generators()[0].source.components()[0].p();
        for g in 1..rng.gen_range(1..=3) {
            let comps = (0..rng.gen_range(1..=3)).map(|_| random_profile(&mut rng, p, 3)).collect();
            t = t.with_generator(InducedTorusDatum::new(comps)?, &format!("g{g}"));
        }
        let mut rs: Vec<Q> = (0..8).map(|_| random_depth(&mut rng)).collect();
        rs.sort();
        let mut prev = 0;
        for r in &rs {
            let ell = ell_bound_torus(&t, r)?;
            ensure(ell >= prev, format!("torus {k}: ℓ decreases at r = {r}"))?;
            prev = ell;
            for g in t.generators() {
                for c in g.source.components() {
                    let dep_std = char_param_std_depth(c, r)?;
                    ensure(check_phi_bound(&t, r, &dep_std)?, format!("torus {k}: bound fails at r = {r}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("1000 tori, ℓ nondecreasing, {checks} component bounds hold"))
}

/// Rank over `Q` by fraction-free elimination.
fn rank_over_q(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for j in 0..cols {
                    let v = &f * &m[rank][j];
                    m[r][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Product of random elementary matrices and sign flips.
fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..rng.gen_range(0..6) {
        let mut e = IntMatrix::identity(n);
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            e[(i, i)] = -1;
        } else {
            e[(i, j)] = rng.gen_range(-2..=2);
        }
        m = m.mul(&e);
    }
    m
}

fn coinvariants_fixed(seed: u64) -> Result<String> {
    let neg = IntMatrix::from_rows(vec![vec![-1]])?;
    let fixed = fixed_subgroup(&FGAbelianGroup::free(1), &neg)?;
    ensure(fixed.group == FGAbelianGroup::trivial(), format!("σ = -1 fixes {:?}", fixed.group))?;
    let co = coinvariants(1, &[neg])?;
    ensure(co.group == FGAbelianGroup::cyclic(2), format!("I = -1 gives {:?}", co.group))?;
    let mut rng = rng(seed, 7);
    for k in 0..500 {
        let n = rng.gen_range(1..=4);
        let gens: Vec<IntMatrix> = (0..rng.gen_range(1..=2)).map(|_| random_unimodular(&mut rng, n)).collect();
        let co = coinvariants(n, &gens)?;
        let mut image = Vec::new();
        for g in &gens {
            let d = g.sub(&IntMatrix::identity(n));
            for c in 0..n {
                image.push(d.column(c));
            }
        }
        let image_rank = rank_over_q(&image);
        ensure(co.group.free_rank + image_rank == n, format!("action {k}: rank accounting fails"))?;
    }
    Ok("σ = -1 fixes 0, I = -1 gives Z/2, 500 random actions balance".into())
}

fn sigma_fixed(_: u64) -> Result<String> {
    let mut checked = Vec::new();
    let mut recorded = String::new();
    for (name, _, _) in fixtures::sigma_configs() {
        let cfg = fixtures::sigma_config(name)?;
        let sigma = SigmaAction::from_frobenius(&cfg)?;
        let report = sigma_fixed_waff(&cfg, &sigma, 10)?;
        if report.hypotheses_hold {
            ensure(report.only_identity == Some(true), format!("{name}: {} σ-fixed elements", report.fixed.len()))?;
            checked.push(name);
        }
        if name == "A1-negation" {
            ensure(
                report.warnings.iter().any(|w| w == "no σ-stable positive system"),
                "A1 σ = -1 is not flagged",
            )?;
            recorded = format!("A1 σ = -1 flagged, {} fixed elements recorded", report.fixed.len());
        }
    }
    ensure(!checked.is_empty(), "no configuration satisfies the hypotheses")?;
    Ok(format!("{} configurations give {{1}}; {recorded}", checked.len()))
}

fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> HeckeVector {
    (0..dim)
        .filter_map(|i| {
            let c = rng.gen_range(-3..=3);
            (c != 0).then(|| (i, qi(c)))
        })
        .collect()
}

fn finite_hecke_oracle(seed: u64) -> Result<String> {
    let (g, b) = fixtures::sl2_f3_borel();
    let table = double_cosets(&g, &b);
    ensure(table.len() == 2, format!("{} double cosets", table.len()))?;
    let c = hecke_structure_constants(&g, &b, &table);
    ensure(c.q_parameters() == vec![qi(1), qi(3)], "q-parameters are not [1, 3]")?;
    let one = c.unit();
    let ts: HeckeVector = [(1, Q::one())].into_iter().collect();
    let shift = |v: &HeckeVector, a: i64| -> HeckeVector {
        let mut out = v.clone();
        *out.entry(0).or_insert_with(Q::zero) += qi(a);
        out.retain(|_, x| !x.is_zero());
        out
    };
    let quad = c.convolve(&shift(&ts, -3), &shift(&ts, 1));
    ensure(quad.is_empty(), "(T_s - 3)(T_s + 1) ≠ 0")?;
    ensure(one == [(0, Q::one())].into_iter().collect::<HeckeVector>(), "unit is not the identity coset")?;
    ensure(c.mass_conservation(), "mass conservation fails")?;

    let trivial = Subgroup::trivial(&g);
    let tt = double_cosets(&g, &trivial);
    let ct = hecke_structure_constants(&g, &trivial, &tt);
    ensure(ct.mass_conservation(), "mass conservation fails for the group algebra")?;
    let mut rng = rng(seed, 9);
    for k in 0..100 {
        let (consts, dim) = if k % 2 == 0 { (&c, 2) } else { (&ct, 24) };
        let (x, y, z) = (random_vector(&mut rng, dim), random_vector(&mut rng, dim), random_vector(&mut rng, dim));
        let lhs = consts.convolve(&consts.convolve(&x, &y), &z);
        let rhs = consts.convolve(&x, &consts.convolve(&y, &z));
        ensure(lhs == rhs, format!("triple {k} is not associative"))?;
    }
    Ok("2 double cosets, q = 3, quadratic relation, mass conservation, 100 associative triples".into())
}

fn transfer_idempotents(_: u64) -> Result<String> {
    let poly = build_group(&TruncRing::new(RingKind::Polynomial, 3, 2)?, GroupType::SL2)?;
    let k1 = congruence_subgroup(&poly, 1)?;
    let frob = ring_map_iso(&poly, &poly, RingMap::CoefficientFrobenius)?;
    let r = transfer_check(&poly, &k1, &poly, &k1, &frob);
    ensure(r.pass, format!("Frobenius transfer fails: {:?}", r.discrepancy))?;
    let iw = iwahori_subgroup(&poly);
    ensure(transfer_check(&poly, &iw, &poly, &iw, &frob).pass, "Frobenius transfer fails on the Iwahori")?;
    let mut corrupted = frob.clone();
    corrupted.swap(3, 4);
    ensure(!transfer_check(&poly, &k1, &poly, &k1, &corrupted).pass, "corrupted bijection accepted")?;

    let k2 = congruence_subgroup(&poly, 2)?;
    let neg_t = ring_map_iso(&poly, &poly, RingMap::Substitution(2))?;
    ensure(idempotent_transfer_check(&poly, &k2, &k1, &poly, &k2, &k1, &neg_t)?, "idempotent transfer fails on F_3[t]/t²")?;
    let ints = build_group(&TruncRing::new(RingKind::Integers, 3, 2)?, GroupType::SL2)?;
    let id: Vec<usize> = (0..ints.order()).collect();
    let (j1, j2) = (congruence_subgroup(&ints, 1)?, congruence_subgroup(&ints, 2)?);
    ensure(idempotent_transfer_check(&ints, &j2, &j1, &ints, &j2, &j1, &id)?, "idempotent transfer fails on Z/9")?;
    Ok("Frobenius transfer passes, corrupted map fails, (m, r) = (2, 1) idempotents transfer".into())
}

fn presentation_matching(_: u64) -> Result<String> {
    let k1 = fixtures::klein_block(fixtures::klein_cocycle(), 2);
    let verified = |r: MatchResult, what: &str| -> Result<()> {
        match r {
            MatchResult::Match(m) => ensure(m.anti_involution_preserved, format!("{what}: anti-involution not preserved")),
            MatchResult::Failure(o) => Err(Error::Computation(format!("{what}: rejected with {o:?}"))),
        }
    };
    verified(match_presentations(&k1, &k1)?, "identical data")?;
    let p = fixtures::pgl2_block(3);
    verified(match_presentations(&p, &p)?, "identical data")?;
    let k2 = fixtures::klein_block(fixtures::klein_twist(&fixtures::klein_cocycle(), &[0, 1, 0, 0]), 2);
    ensure(k1.cocycle() != k2.cocycle(), "cohomologous cocycles coincide")?;
    verified(match_presentations(&k1, &k2)?, "cohomologous cocycles")?;
    match match_presentations(&fixtures::pgl2_block(2), &p)? {
        MatchResult::Failure(Obstruction::QMismatch { node, q_a, q_b, .. }) => {
            ensure(q_a == "2" && q_b == "3", "wrong q values reported")?;
            Ok(format!("identical and cohomologous data match; q mismatch located at {node}"))
        }
        other => Err(Error::Computation(format!("q mismatch not detected: {other:?}"))),
    }
}

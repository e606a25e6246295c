//! Finite extensions of local fields described by lower-numbering break data.
//!
//! A profile lists `(u_end, order)` pairs: `|G_u| = order` on the half-open
//! interval `(previous u_end, u_end]`. The first entry may end at `u = 0`,
//! in which case it only records `|G_0| = e` (the tame drop). The last entry
//! has order 1 and covers everything beyond the last break; its `u_end` is
//! not used beyond being at least the previous one.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plcalc::PLFunction;
use crate::rational::{from_pair, to_pair, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RamificationProfile {
    p: u64,
    e: u64,
    f: u64,
    steps: Vec<(Q, u64)>,
}

/// Upper-numbering jumps: at each `s` the upper filtration drops to `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperJumps {
    pub initial_order: u64,
    pub jumps: Vec<(Q, u64)>,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn is_power_of(n: u64, p: u64) -> bool {
    let mut n = n;
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

impl RamificationProfile {
    pub fn new(p: u64, e: u64, f: u64, steps: Vec<(Q, u64)>) -> Result<Self> {
        let bad = |m: String| Err(Error::Validation(m));
        if !is_prime(p) {
            return bad(format!("residue characteristic {p} is not prime"));
        }
        if e == 0 || f == 0 {
            return bad("ramification index and residue degree must be positive".into());
        }
        if steps.is_empty() {
            return bad("profile needs at least the terminal order-1 step".into());
        }
        if steps[0].1 != e {
            return bad(format!("first order {} must equal e = {e}", steps[0].1));
        }
        if steps.last().unwrap().1 != 1 {
            return bad("last order must be 1".into());
        }
        let mut prev_end = Q::zero();
        for (i, (u, order)) in steps.iter().enumerate() {
            if u.is_negative() {
                return bad(format!("break u = {u} is negative"));
            }
            if i > 0 {
                let prev_order = steps[i - 1].1;
                if *order >= prev_order || prev_order % order != 0 {
                    return bad(format!(
                        "orders must strictly decrease by divisibility ({prev_order} -> {order})"
                    ));
                }
            }
            let terminal = i + 1 == steps.len();
            if terminal {
                if *u < prev_end {
                    return bad("terminal step must not precede the last break".into());
                }
                break;
            }
            if i > 0 && *u <= prev_end {
                return bad(format!("breaks must strictly increase (u = {u})"));
            }
            if *u > prev_end && !is_power_of(*order, p) {
                return bad(format!("|G_u| = {order} for u > 0 is not a power of p = {p}"));
            }
            prev_end = u.clone();
        }
        Ok(RamificationProfile { p, e, f, steps })
    }

    /// Tamely ramified extension with index `e` (unramified when `e = 1`).
    pub fn tame(p: u64, e: u64, f: u64) -> Result<Self> {
        if e > 1 && e % p == 0 {
            return Err(Error::Validation(format!("tame index {e} divisible by p = {p}")));
        }
        let z = Q::zero();
        let steps = if e > 1 { vec![(z.clone(), e), (z, 1)] } else { vec![(z, 1)] };
        Self::new(p, e, f, steps)
    }

    pub fn unramified(p: u64, f: u64) -> Result<Self> {
        Self::tame(p, 1, f)
    }

    /// Builds a profile from its wild breaks `[(u_i, |G_u| on (u_{i-1}, u_i])]`.
    /// The tame drop at 0 and the terminal step are added as needed.
    pub fn from_breaks(p: u64, e: u64, f: u64, breaks: &[(Q, u64)]) -> Result<Self> {
        let mut steps = Vec::with_capacity(breaks.len() + 2);
        if breaks.first().map(|b| b.1) != Some(e) && e > 1 {
            steps.push((Q::zero(), e));
        }
        steps.extend(breaks.iter().cloned());
        let last_u = steps.last().map(|s| s.0.clone()).unwrap_or_else(Q::zero);
        if steps.last().map(|s| s.1) != Some(1) {
            steps.push((last_u, 1));
        }
        Self::new(p, e, f, steps)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn steps(&self) -> &[(Q, u64)] {
        &self.steps
    }

    fn non_terminal(&self) -> &[(Q, u64)] {
        &self.steps[..self.steps.len() - 1]
    }

    /// Lower breaks with positive `u` (where the wild filtration drops).
    pub fn lower_breaks(&self) -> Vec<Q> {
        self.non_terminal().iter().filter(|(u, _)| u.is_positive()).map(|(u, _)| u.clone()).collect()
    }

    /// `|G_u|` for `u >= 0`.
    pub fn order_at(&self, u: &Q) -> u64 {
        if u.is_zero() {
            return self.e;
        }
        self.non_terminal().iter().find(|(end, _)| u <= end).map(|s| s.1).unwrap_or(1)
    }

    pub fn is_tame(&self) -> bool {
        self.non_terminal().iter().all(|(u, _)| u.is_zero())
    }

    /// `φ(t) = ∫_0^t |G_u| / |G_0| du`.
    pub fn herbrand_phi(&self) -> PLFunction {
        let e = Q::from_integer(self.e.into());
        let mut points = vec![(Q::zero(), Q::zero())];
        let mut prev = Q::zero();
        let mut y = Q::zero();
        for (u, order) in self.non_terminal() {
            if *u > prev {
                y += (u - &prev) * Q::from_integer((*order).into()) / &e;
                points.push((u.clone(), y.clone()));
                prev = u.clone();
            }
        }
        PLFunction::new(points, e.recip()).expect("Herbrand data is strictly increasing")
    }

    pub fn herbrand_psi(&self) -> PLFunction {
        self.herbrand_phi().inverse().expect("φ(0) = 0")
    }

    /// `r ↦ φ(e·r)`.
    pub fn normalized_phi(&self) -> PLFunction {
        self.herbrand_phi().precompose_scale(self.e as i64).expect("e >= 1")
    }

    pub fn upper_jumps(&self) -> UpperJumps {
        let phi = self.herbrand_phi();
        let nt = self.non_terminal();
        let jumps = nt
            .iter()
            .enumerate()
            .map(|(i, (u, _))| {
                let after = self.steps[i + 1].1;
                (phi.evaluate(u).expect("u >= 0"), after)
            })
            .collect();
        UpperJumps { initial_order: self.e, jumps }
    }
}

/// `φ_{E2/F} = φ_{E1/F} ∘ φ_{E2/E1}`.
pub fn tower_phi(phi_e1_f: &PLFunction, phi_e2_e1: &PLFunction) -> Result<PLFunction> {
    for (name, g) in [("φ_{E1/F}", phi_e1_f), ("φ_{E2/E1}", phi_e2_e1)] {
        if !g.value_at_zero().is_zero() {
            return Err(Error::Precondition(format!("{name} must vanish at 0")));
        }
    }
    Ok(phi_e1_f.compose(phi_e2_e1))
}

/// Herbrand function of a non-Galois `E/F` from a Galois closure `L`:
/// `φ_{E/F} = φ_{L/F} ∘ φ_{L/E}^{-1}`.
pub fn non_galois_phi(phi_l_f: &PLFunction, phi_l_e: &PLFunction) -> Result<PLFunction> {
    Ok(phi_l_f.compose(&phi_l_e.inverse()?))
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    p: u64,
    e: u64,
    f: u64,
    steps: Vec<[i64; 3]>,
}

impl RamificationProfile {
    /// `{"p": int, "e": int, "f": int, "steps": [[u_num, u_den, order], ...]}`.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for (u, order) in &self.steps {
            let (n, d) = to_pair(u)?;
            steps.push([n, d, *order as i64]);
        }
        Ok(serde_json::to_value(ProfileJson { p: self.p, e: self.e, f: self.f, steps }).expect("plain data"))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: ProfileJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Validation(format!("bad ramification profile JSON: {e}")))?;
        let mut steps = Vec::with_capacity(raw.steps.len());
        for [n, d, order] in raw.steps {
            if order <= 0 {
                return Err(Error::Validation(format!("group order {order} must be positive")));
            }
            steps.push((from_pair(n, d)?, order as u64));
        }
        Self::new(raw.p, raw.e, raw.f, steps)
    }
}

impl Serialize for RamificationProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RamificationProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        RamificationProfile::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn wild_quadratic() -> RamificationProfile {
        RamificationProfile::from_breaks(2, 2, 1, &[(qi(1), 2)]).unwrap()
    }

    /// Integral of the step function, summed piece by piece.
    fn integral_oracle(prof: &RamificationProfile, t: &Q) -> Q {
        let mut acc = Q::zero();
        let mut prev = Q::zero();
        let e = Q::from_integer(prof.e().into());
        for (u, order) in &prof.steps()[..prof.steps().len() - 1] {
            if u <= &prev {
                continue;
            }
            let hi = std::cmp::min(u, t).clone();
            if hi > prev {
                acc += (&hi - &prev) * Q::from_integer((*order).into()) / &e;
            }
            prev = u.clone();
        }
        if t > &prev {
            acc += (t - &prev) / &e;
        }
        acc
    }

    #[test]
    fn validation() {
        assert!(RamificationProfile::new(4, 1, 1, vec![(qi(0), 1)]).is_err());
        // first order must be e
        assert!(RamificationProfile::new(2, 2, 1, vec![(qi(1), 4), (qi(1), 1)]).is_err());
        // last order must be 1
        assert!(RamificationProfile::new(2, 2, 1, vec![(qi(1), 2)]).is_err());
        // 3 is not a power of 2 on a positive interval
        assert!(RamificationProfile::new(2, 3, 1, vec![(qi(1), 3), (qi(1), 1)]).is_err());
        // tame drop at 0 is fine
        assert!(RamificationProfile::new(2, 3, 1, vec![(qi(0), 3), (qi(0), 1)]).is_ok());
        // 6 -> 4 is not divisibility
        assert!(RamificationProfile::new(2, 6, 1, vec![(qi(0), 6), (qi(1), 4), (qi(1), 1)]).is_err());
        // breaks must increase
        assert!(RamificationProfile::new(2, 4, 1, vec![(qi(2), 4), (qi(1), 2), (qi(3), 1)]).is_err());
        assert!(RamificationProfile::tame(3, 3, 1).is_err());
    }

    #[test]
    fn phi_examples() {
        let tame = RamificationProfile::tame(5, 4, 1).unwrap();
        assert_eq!(tame.herbrand_phi(), PLFunction::linear(q(1, 4)));
        assert_eq!(tame.normalized_phi(), PLFunction::identity());

        let w = wild_quadratic();
        let phi = w.herbrand_phi();
        assert_eq!(phi.evaluate(&q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(phi.evaluate(&qi(1)).unwrap(), qi(1));
        assert_eq!(phi.evaluate(&qi(3)).unwrap(), qi(2));
        assert_eq!(phi.final_slope(), &q(1, 2));
        assert!(phi.is_concave());
        assert_eq!(phi.evaluate(&qi(0)).unwrap(), qi(0));
    }

    #[test]
    fn psi_examples() {
        let tame = RamificationProfile::tame(5, 3, 2).unwrap();
        assert_eq!(tame.herbrand_psi(), PLFunction::linear(qi(3)));
        let w = wild_quadratic();
        assert_eq!(w.herbrand_psi().evaluate(&q(3, 2)).unwrap(), qi(2));
        assert_eq!(w.herbrand_psi().compose(&w.herbrand_phi()), PLFunction::identity());
    }

    #[test]
    fn normalized_examples() {
        let w = wild_quadratic();
        assert_eq!(w.normalized_phi().evaluate(&qi(1)).unwrap(), q(3, 2));
        assert_eq!(w.normalized_phi().evaluate(&qi(0)).unwrap(), qi(0));
    }

    #[test]
    fn upper_jump_examples() {
        let tame = RamificationProfile::tame(2, 3, 1).unwrap();
        assert_eq!(tame.upper_jumps().jumps, vec![(qi(0), 1)]);
        assert_eq!(wild_quadratic().upper_jumps().jumps, vec![(qi(1), 1)]);
        let unr = RamificationProfile::unramified(7, 2).unwrap();
        assert!(unr.upper_jumps().jumps.is_empty());
    }

    #[test]
    fn tameness() {
        assert!(RamificationProfile::tame(3, 2, 1).unwrap().is_tame());
        assert!(!wild_quadratic().is_tame());
        // p ∤ e: every order for u > 0 is a p-power dividing e, hence 1
        for e in [1u64, 2, 4, 5, 7, 8] {
            let prof = RamificationProfile::tame(3, e, 1).unwrap();
            assert!(prof.is_tame());
            assert!(RamificationProfile::from_breaks(3, e, 1, &[(qi(1), 3)]).is_err());
        }
    }

    #[test]
    fn tower_examples() {
        let w = wild_quadratic().herbrand_phi();
        assert_eq!(tower_phi(&PLFunction::identity(), &w).unwrap(), w);
        assert_eq!(tower_phi(&w, &PLFunction::identity()).unwrap(), w);
        let t1 = RamificationProfile::tame(5, 2, 1).unwrap().herbrand_phi();
        let t2 = RamificationProfile::tame(5, 3, 1).unwrap().herbrand_phi();
        assert_eq!(tower_phi(&t1, &t2).unwrap(), PLFunction::linear(q(1, 6)));
    }

    #[test]
    fn cyclotomic_tower() {
        // degree-9 wild subextension of Q_3(ζ_27) over Q_3 and its degree-3 subfield
        let e2_f = RamificationProfile::from_breaks(3, 9, 1, &[(qi(1), 9), (qi(4), 3)]).unwrap();
        let e1_f = RamificationProfile::from_breaks(3, 3, 1, &[(qi(1), 3)]).unwrap();
        let e2_e1 = RamificationProfile::from_breaks(3, 3, 1, &[(qi(4), 3)]).unwrap();
        let composed = tower_phi(&e1_f.herbrand_phi(), &e2_e1.herbrand_phi()).unwrap();
        assert_eq!(composed, e2_f.herbrand_phi());
        for k in 0..60 {
            let t = q(k, 4);
            assert_eq!(composed.evaluate(&t).unwrap(), integral_oracle(&e2_f, &t));
        }
        let jumps = e2_f.upper_jumps();
        assert_eq!(jumps.jumps, vec![(qi(1), 3), (qi(2), 1)]);
    }

    #[test]
    fn non_galois_from_closure() {
        // L = E2 above, E = E1: φ_{E1/F} = φ_{E2/F} ∘ φ_{E2/E1}^{-1}
        let e2_f = RamificationProfile::from_breaks(3, 9, 1, &[(qi(1), 9), (qi(4), 3)]).unwrap();
        let e1_f = RamificationProfile::from_breaks(3, 3, 1, &[(qi(1), 3)]).unwrap();
        let e2_e1 = RamificationProfile::from_breaks(3, 3, 1, &[(qi(4), 3)]).unwrap();
        let got = non_galois_phi(&e2_f.herbrand_phi(), &e2_e1.herbrand_phi()).unwrap();
        assert_eq!(got, e1_f.herbrand_phi());
    }

    #[test]
    fn json_schema() {
        let w = wild_quadratic();
        let v = w.to_json().unwrap();
        assert_eq!(v.to_string(), r#"{"e":2,"f":1,"p":2,"steps":[[1,1,2],[1,1,1]]}"#);
        assert_eq!(RamificationProfile::from_json(&v).unwrap(), w);
    }

    fn arb_profile() -> impl Strategy<Value = RamificationProfile> {
        (prop::sample::select(vec![2u64, 3, 5]), 1u64..4, 0usize..4, prop::collection::vec((1i64..5, 1i64..3), 4))
            .prop_map(|(p, tame, wild_steps, gaps)| {
                let tame = if tame % p == 0 { 1 } else { tame };
                let e = tame * p.pow(wild_steps as u32);
                let mut breaks = Vec::new();
                let mut u = Q::zero();
                for k in 0..wild_steps {
                    u += q(gaps[k].0, gaps[k].1);
                    breaks.push((u.clone(), p.pow((wild_steps - k) as u32)));
                }
                RamificationProfile::from_breaks(p, e, 1, &breaks).unwrap()
            })
    }

    proptest! {
        #[test]
        fn phi_properties(prof in arb_profile(), a in 0i64..100) {
            let phi = prof.herbrand_phi();
            prop_assert!(phi.is_concave());
            prop_assert_eq!(phi.evaluate(&qi(0)).unwrap(), qi(0));
            let t = q(a, 7);
            prop_assert_eq!(phi.evaluate(&t).unwrap(), integral_oracle(&prof, &t));
            let norm = prof.normalized_phi();
            let e = Q::from_integer(prof.e().into());
            let r = q(a, 5);
            // φ(e r) <= e r
            prop_assert!(norm.evaluate(&r).unwrap() <= &e * &r);
            prop_assert_eq!(norm == PLFunction::identity(), prof.is_tame());
        }

        #[test]
        fn upper_jumps_roundtrip(prof in arb_profile()) {
            let psi = prof.herbrand_psi();
            let ups = prof.upper_jumps();
            let recovered: Vec<Q> = ups.jumps.iter().map(|(s, _)| psi.evaluate(s).unwrap()).filter(|u| u.is_positive()).collect();
            prop_assert_eq!(recovered, prof.lower_breaks());
            prop_assert!(ups.jumps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
        }

        #[test]
        fn three_level_towers_associate(a in arb_profile(), b in arb_profile(), c in arb_profile()) {
            let (fa, fb, fc) = (a.herbrand_phi(), b.herbrand_phi(), c.herbrand_phi());
            let left = tower_phi(&tower_phi(&fa, &fb).unwrap(), &fc).unwrap();
            let right = tower_phi(&fa, &tower_phi(&fb, &fc).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::exactnum::{Integer, Rational};
use crate::family::{build_inverted, j_formula, sextic_value, FamilyCurve};
use crate::localred::{conj_symmetry, i13m_law, j_matches_multiplicative, GlobalTamagawa, Reduction};
use crate::quadfield::{primes_above, PrimeKind};

use super::record::SurveyRecord;

/// The j-invariant shared by `t = −1, 1/2, 2`.
pub const E2_J: &str = "-60698457/40960";

/// Checks every structural property expected of a family curve and its
/// local data. Returns one message per failure.
pub fn structural_checks(fc: &FamilyCurve, g: &GlobalTamagawa) -> Vec<String> {
    let mut bad = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            bad.push(what.to_string());
        }
    };
    let f = &fc.field;
    let inv = fc.model.invariants();
    let k = |n: i64| f.int(n);
    expect(&k(4) * &inv.b8 == &(&inv.b2 * &inv.b6) - &(&inv.b4 * &inv.b4), "4b8 = b2b6 - b4^2");
    expect(&k(1728) * &inv.disc == &inv.c4.pow(3) - &(&inv.c6 * &inv.c6), "1728Δ = c4^3 - c6^2");
    expect(&fc.s * &fc.s == f.rational(sextic_value(&fc.t)), "s^2 = D(t)");
    let j = inv.j.as_ref().and_then(|j| j.as_rational().cloned());
    expect(j.is_some(), "j is rational");
    if let Some(j) = &j {
        expect(j_formula(&fc.t).ok().as_ref() == Some(j), "j equals the closed formula");
        match build_inverted(&fc.t) {
            Ok(inv_fc) => expect(
                inv_fc.model.j_invariant().ok().and_then(|x| x.as_rational().cloned()).as_ref() == Some(j),
                "inverted model has the same j",
            ),
            Err(_) => expect(false, "inverted model builds"),
        }
        for l in &g.locals {
            expect(j_matches_multiplicative(j, l), "v(j) = -v(Δmin) at multiplicative primes");
        }
    }
    expect(
        fc.model.point_order(&fc.marked_point, 20).ok().flatten() == Some(13),
        "(0,0) has order 13",
    );
    let d = f.d();
    expect(*d != Integer::one() && *d != Integer::from(13), "d not in {1, 13}");
    let two_splits = primes_above(f, &Integer::from(2))
        .map(|v| v.first().is_some_and(|p| p.kind() == PrimeKind::Split))
        .unwrap_or(false);
    expect(two_splits, "2 splits in K");

    for l in &g.locals {
        if let Err(e) = l.check() {
            bad.push(e);
        }
        if l.prime.p() != &Integer::from(13) && l.reduction == Reduction::Additive {
            bad.push(format!("additive reduction at {} (away from 13)", l.prime));
        }
    }
    for e in i13m_law(fc, g) {
        bad.push(format!("I13m law: {e}"));
    }
    for e in conj_symmetry(g).violations {
        bad.push(format!("conjugate symmetry: {e}"));
    }
    let lower = 2 * rational_primes_of_t(&fc.t).len() as u32;
    if g.v13 < lower {
        bad.push(format!("v13 = {} below 2·#primes(t, t-1) = {lower}", g.v13));
    }
    if g.v13 % 2 == 1 || g.v13 < 2 {
        bad.push(format!("v13 = {} is not a positive even integer", g.v13));
    }
    bad
}

/// Rational primes `p` with `vp(t) ≠ 0` or `vp(t − 1) ≠ 0`.
pub fn rational_primes_of_t(t: &Rational) -> BTreeSet<Integer> {
    let mut out = BTreeSet::new();
    for q in [t.clone(), t - Rational::one()] {
        for n in [q.numer(), q.denom()] {
            if n.is_zero() {
                continue;
            }
            if let Ok(f) = crate::exactnum::factor(n, Default::default()) {
                out.extend(f.factors.into_iter().map(|(p, _)| p));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParityReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<String>,
    pub errors: Vec<String>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }
}

/// Every `ok` record must have `v13` even and at least 2. Records flagged
/// `error:` count as failures; degenerate ones are skipped.
pub fn verify_parity(records: &[SurveyRecord]) -> ParityReport {
    let mut r = ParityReport::default();
    for rec in records {
        if rec.is_error() {
            r.errors.push(format!("t = {}: {}", rec.t, rec.flags));
            continue;
        }
        if !rec.is_ok() {
            r.skipped += 1;
            continue;
        }
        r.checked += 1;
        match rec.v13 {
            Some(v) if v >= 2 && v % 2 == 0 => {}
            Some(v) => r.violations.push(format!("t = {}: v13 = {v}", rec.t)),
            None => r.violations.push(format!("t = {}: missing v13", rec.t)),
        }
    }
    r
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniquenessReport {
    /// Parameters grouped by `v13`.
    pub by_v13: BTreeMap<u32, Vec<String>>,
    pub violations: Vec<String>,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn with_v13(&self, v: u32) -> &[String] {
        self.by_v13.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Records with `v13 = 2` must all have the E₂ j-invariant; all others need
/// `v13 ≥ 4`.
pub fn verify_unique_v13_2(records: &[SurveyRecord]) -> UniquenessReport {
    let mut r = UniquenessReport::default();
    for rec in records.iter().filter(|r| r.is_ok()) {
        let Some(v) = rec.v13 else {
            r.violations.push(format!("t = {}: missing v13", rec.t));
            continue;
        };
        r.by_v13.entry(v).or_default().push(rec.t.clone());
        if v == 2 {
            if rec.j.as_deref() != Some(E2_J) {
                r.violations.push(format!(
                    "t = {}: v13 = 2 but j = {}",
                    rec.t,
                    rec.j.as_deref().unwrap_or("?")
                ));
            }
        } else if v < 4 {
            r.violations.push(format!("t = {}: v13 = {v}", rec.t));
        }
    }
    r
}

/// Groups `ok` records by `(d, j)`: same field and same j-invariant, so
/// isomorphic up to a twist.
pub fn dedup_by_field_and_j(records: &[SurveyRecord]) -> BTreeMap<(String, String), Vec<String>> {
    let mut out: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.is_ok()) {
        if let (Some(d), Some(j)) = (&rec.d, &rec.j) {
            out.entry((d.to_string(), j.clone())).or_default().push(rec.t.clone());
        }
    }
    out
}

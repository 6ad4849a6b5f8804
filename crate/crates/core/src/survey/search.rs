use std::collections::BTreeSet;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{factor, format_rational, FactorBudget, Integer, Rational, Valuation};
use crate::family::{bad_support_with, build, discriminant_cofactor, FamilyCurve};
use crate::localred::tamagawa_with;
use crate::quadfield::primes_above;

/// Where a triple `{1, b, 1 + b}` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleSource {
    /// `{1, 2ᵖ − 1, 2ᵖ}`.
    Mersenne(u32),
    /// `{1, 2ᵏ, 2ᵏ + 1}`.
    Fermat(u32),
    /// `{1, 8, 9}`.
    Special189,
}

impl TripleSource {
    pub fn triple(self) -> [Integer; 3] {
        let pow2 = |e: u32| Integer::one() << e as usize;
        match self {
            TripleSource::Mersenne(p) => [Integer::one(), pow2(p) - 1, pow2(p)],
            TripleSource::Fermat(k) => [Integer::one(), pow2(k), pow2(k) + 1],
            TripleSource::Special189 => [1.into(), 8.into(), 9.into()],
        }
    }

    pub fn label(self) -> String {
        match self {
            TripleSource::Mersenne(p) => format!("mersenne p={p}"),
            TripleSource::Fermat(k) => format!("fermat k={k}"),
            TripleSource::Special189 => "special {1,8,9}".to_string(),
        }
    }
}

/// The `t = r/s` with `{|r|, |s|, |r − s|} = {a, b, c}` for `a + b = c`.
pub fn candidate_ts(triple: &[Integer; 3]) -> Vec<Rational> {
    let [a, b, c] = triple;
    let q = |n: &Integer, d: &Integer| Rational::new(n.clone(), d.clone());
    let mut out: Vec<Rational> = Vec::new();
    for t in [q(c, b), q(c, a), q(b, c), q(a, c), -q(a, b), -q(b, a)] {
        if !t.is_zero() && !t.is_one() && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// `r·s·(r − s)` has exactly two distinct prime divisors.
pub fn condition1(t: &Rational, budget: FactorBudget) -> Option<bool> {
    let (r, s) = (t.numer(), t.denom());
    let n = r * s * (r - s);
    let f = factor(&n, budget).ok()?;
    f.is_complete().then_some(f.factors.len() == 2)
}

/// Result of testing `v_℘(Q) ∉ 13ℤ ∖ {0}` for every prime ℘ of `K`, where
/// `Q = (t³ − 4t² + t + 1)·f = 2Δ / (t¹³(t − 1)¹³)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition2 {
    Holds,
    /// Primes (as display strings) where the valuation is a nonzero
    /// multiple of 13.
    Fails(Vec<String>),
    /// A factorization ran out of budget.
    Undetermined,
}

/// Primes where `v_℘(Q)` can be nonzero: the bad support, plus primes where
/// the model fails to be minimal. Away from the support the reduction is
/// good, so `v_℘(Δ) > 0` forces `v_℘(Δ) ≥ 12` and `v_℘(c4) ≥ 4`, and `p`
/// divides both norms.
pub fn condition2(fc: &FamilyCurve, budget: FactorBudget) -> Condition2 {
    let Ok(mut primes) = bad_support_with(&fc.t, budget) else {
        return Condition2::Undetermined;
    };
    let inv = fc.model.invariants();
    let mut g = inv.disc.norm().numer().gcd(inv.c4.norm().numer()).abs();
    for p in &primes {
        while !g.is_zero() && g.is_multiple_of(p) {
            g /= p;
        }
    }
    if !g.is_one() {
        match factor(&g, budget) {
            Ok(f) if f.is_complete() => primes.extend(f.factors.into_iter().map(|(p, _)| p)),
            _ => return Condition2::Undetermined,
        }
    }
    check_condition2_at(fc, &primes)
}

fn check_condition2_at(fc: &FamilyCurve, primes: &BTreeSet<Integer>) -> Condition2 {
    let q = discriminant_cofactor(fc);
    let mut fails = Vec::new();
    for p in primes {
        let Ok(vs) = primes_above(&fc.field, p) else {
            return Condition2::Undetermined;
        };
        for v in vs {
            if let Valuation::Finite(n) = v.val(&q) {
                if n != 0 && n % 13 == 0 {
                    fails.push(format!("{v}: v = {n}"));
                }
            }
        }
    }
    if fails.is_empty() {
        Condition2::Holds
    } else {
        Condition2::Fails(fails)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub source: String,
    pub triple: [String; 3],
    pub t: String,
    pub condition1: Option<bool>,
    pub condition2: Option<bool>,
    pub v13: Option<u32>,
    /// `ok`, or `flag: <reason>`.
    pub status: String,
}

impl SearchRecord {
    pub fn is_flagged(&self) -> bool {
        self.status != "ok"
    }
}

fn search_one(source: TripleSource, t: &Rational, budget: FactorBudget) -> SearchRecord {
    let triple = source.triple().map(|n| n.to_string());
    let mut rec = SearchRecord {
        source: source.label(),
        triple,
        t: format_rational(t),
        condition1: condition1(t, budget),
        condition2: None,
        v13: None,
        status: String::new(),
    };
    let fc = match build(t) {
        Ok(fc) => fc,
        Err(e) => {
            rec.status = format!("flag: {e}");
            return rec;
        }
    };
    match tamagawa_with(&fc, budget) {
        Ok(g) => rec.v13 = Some(g.v13),
        Err(e) => {
            rec.status = format!("flag: {e}");
            return rec;
        }
    }
    let c2 = condition2(&fc, budget);
    rec.condition2 = match &c2 {
        Condition2::Holds => Some(true),
        Condition2::Fails(_) => Some(false),
        Condition2::Undetermined => None,
    };
    rec.status = match (rec.condition1, &c2, rec.v13) {
        _ if matches!(source, TripleSource::Mersenne(13)) => {
            "flag: p = 13 is excluded from the Mersenne family".to_string()
        }
        (Some(true), Condition2::Holds, Some(4)) => "ok".to_string(),
        (Some(true), Condition2::Holds, Some(v)) => format!("flag: both conditions hold but v13 = {v}"),
        (Some(false), _, _) => "flag: condition 1 fails".to_string(),
        (_, Condition2::Fails(at), _) => format!("flag: condition 2 fails at {}", at.join(", ")),
        _ => "flag: undetermined within factoring budget".to_string(),
    };
    rec
}

/// Computes `v13` for every candidate `t` of each requested triple and
/// reports whether both conditions of the heuristic held.
pub fn search_v13_4(
    mersenne: &[u32],
    fermat: &[u32],
    special189: bool,
    budget: FactorBudget,
) -> Vec<SearchRecord> {
    let mut sources: Vec<TripleSource> = mersenne.iter().map(|&p| TripleSource::Mersenne(p)).collect();
    sources.extend(fermat.iter().map(|&k| TripleSource::Fermat(k)));
    if special189 {
        sources.push(TripleSource::Special189);
    }
    let jobs: Vec<(TripleSource, Rational)> = sources
        .iter()
        .flat_map(|&s| candidate_ts(&s.triple()).into_iter().map(move |t| (s, t)))
        .collect();
    use rayon::prelude::*;
    jobs.par_iter().map(|(s, t)| search_one(*s, t, budget)).collect()
}

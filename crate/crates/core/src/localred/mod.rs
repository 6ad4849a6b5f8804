//! Local reduction data (Tate's algorithm) at primes of a quadratic field and
//! the global Tamagawa product for family curves.

mod tate;

use std::collections::BTreeSet;

use num_integer::Integer as _;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::curve::{CurveError, WeierstrassModel};
use crate::exactnum::{factor, vp_int, FactorBudget, Integer, NumError, Rational, Valuation};
use crate::family::{bad_support_with, FamilyCurve, FamilyError};
use crate::quadfield::{primes_above, FieldError, KPrime, PrimeKind};

pub use tate::{integralize, tate, Kodaira, LocalData, Reduction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("model is singular")]
    Singular,
    #[error("a{index} is not integral at the prime (valuation {val})")]
    NotIntegral { index: u8, val: i64 },
    #[error("model and prime live over different fields")]
    FieldMismatch,
    #[error("Tate's algorithm did not terminate")]
    NoTermination,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Local data at every prime above the support, with the product of the
/// Tamagawa numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalTamagawa {
    /// Sorted by `(p, branch)`; includes primes of good reduction that lie
    /// above the support.
    pub locals: Vec<LocalData>,
    pub c_e: Integer,
    pub v13: u32,
}

/// Runs `integralize` and `tate` at each prime of `K` above each `p`.
pub fn local_data_above<'a>(
    model: &WeierstrassModel,
    primes: impl IntoIterator<Item = &'a Integer>,
) -> Result<Vec<LocalData>, LocalError> {
    let mut out = Vec::new();
    for p in primes {
        for v in primes_above(model.field(), p)? {
            let m = integralize(model, &v)?;
            out.push(tate(&m, &v)?);
        }
    }
    Ok(out)
}

pub fn global_from_locals(locals: Vec<LocalData>) -> GlobalTamagawa {
    let c_e = locals.iter().fold(Integer::one(), |acc, l| acc * Integer::from(l.c));
    let v13 = vp_int(&c_e, &Integer::from(13));
    GlobalTamagawa { locals, c_e, v13 }
}

pub fn tamagawa(fc: &FamilyCurve) -> Result<GlobalTamagawa, LocalError> {
    tamagawa_with(fc, FactorBudget::default())
}

pub fn tamagawa_with(fc: &FamilyCurve, budget: FactorBudget) -> Result<GlobalTamagawa, LocalError> {
    let support = bad_support_with(&fc.t, budget)?;
    Ok(global_from_locals(local_data_above(&fc.model, &support)?))
}

/// Outcome of comparing the congruence condition on `t` at 13 with the
/// reduction found by Tate's algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThirteenRule {
    /// `t ≡ 0, 1 (mod 13)` or `v₁₃(t) < 0`.
    pub predicate: bool,
    pub multiplicative_at_13: bool,
    pub thirteen_splits: bool,
    /// Reduction observed at each prime above 13.
    pub observed: Vec<(Kodaira, Reduction)>,
}

impl ThirteenRule {
    pub fn agrees(&self) -> bool {
        self.predicate == self.multiplicative_at_13 && (!self.predicate || self.thirteen_splits)
    }
}

pub fn thirteen_predicate(t: &Rational) -> bool {
    let p = Integer::from(13);
    let num = t.numer();
    let den = t.denom();
    if den.is_multiple_of(&p) {
        return true;
    }
    // t ≡ 0 or 1 mod 13 with t 13-integral
    let r = (num * crate::exactnum::mod_inverse(den, &p).expect("unit")).mod_floor(&p);
    r == Integer::from(0) || r == Integer::from(1)
}

pub fn check_13_rule(fc: &FamilyCurve, g: &GlobalTamagawa) -> ThirteenRule {
    let thirteen = Integer::from(13);
    let at13: Vec<&LocalData> = g.locals.iter().filter(|l| l.prime.p() == &thirteen).collect();
    ThirteenRule {
        predicate: thirteen_predicate(&fc.t),
        multiplicative_at_13: at13.iter().any(|l| l.reduction.is_multiplicative()),
        thirteen_splits: at13.first().is_some_and(|l| l.prime.kind() == PrimeKind::Split),
        observed: at13.iter().map(|l| (l.kodaira, l.reduction)).collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConjSymmetry {
    /// Locals with `13 | c` whose prime is not split or whose conjugate has
    /// a different `c`.
    pub violations: Vec<String>,
    pub pairs_checked: usize,
    /// Split pairs without a factor 13 whose Tamagawa numbers differ.
    pub unequal_other_pairs: Vec<String>,
}

impl ConjSymmetry {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn conj_symmetry(g: &GlobalTamagawa) -> ConjSymmetry {
    let mut report = ConjSymmetry::default();
    for l in &g.locals {
        let twin = (l.prime.kind() == PrimeKind::Split)
            .then(|| {
                let other = l.prime.conjugate();
                g.locals.iter().find(|m| m.prime == other)
            })
            .flatten();
        let multiple_of_13 = l.c % 13 == 0;
        match twin {
            Some(m) => {
                if l.prime.branch() < m.prime.branch() {
                    report.pairs_checked += 1;
                    if l.c != m.c {
                        let msg = format!("{}: c = {} vs {}", l.prime, l.c, m.c);
                        if multiple_of_13 || m.c % 13 == 0 {
                            report.violations.push(msg);
                        } else {
                            report.unequal_other_pairs.push(msg);
                        }
                    }
                }
            }
            None if multiple_of_13 => {
                report.violations.push(format!("{}: 13 | c = {} at a non-split prime", l.prime, l.c));
            }
            None => {}
        }
    }
    report
}

/// `max(|v(t)|, v(t − 1))` at `v`; 0 when `t` is a unit with unit `t − 1`.
pub fn expected_i13_multiplier(t: &Rational, v: &KPrime) -> i64 {
    let vt = v.val_rational(t).unwrap();
    let vt1 = v.val_rational(&(t - Rational::one())).unwrap();
    vt.abs().max(vt1)
}

/// Every prime `℘ ∤ 13` where `t` or `t − 1` is not a unit must carry split
/// `I_{13m}` with `c = 13m`. Returns the failures.
pub fn i13m_law(fc: &FamilyCurve, g: &GlobalTamagawa) -> Vec<String> {
    let mut bad = Vec::new();
    for l in &g.locals {
        if l.prime.p() == &Integer::from(13) {
            continue;
        }
        let m = expected_i13_multiplier(&fc.t, &l.prime);
        if m == 0 {
            continue;
        }
        let n = 13 * m;
        let ok = l.kodaira == Kodaira::I(n as u32)
            && l.reduction == Reduction::SplitMult
            && i64::from(l.c) == n;
        if !ok {
            bad.push(format!(
                "{}: expected split I{n}, got {} {} c = {}",
                l.prime,
                l.kodaira,
                l.reduction.as_str(),
                l.c
            ));
        }
    }
    bad
}

/// Brute-force check of the support shortcut: factors the norm of the
/// model discriminant and runs Tate's algorithm above every prime found.
/// Returns the rational primes with bad reduction outside `bad_support`.
pub fn support_oracle(fc: &FamilyCurve, budget: FactorBudget) -> Result<Vec<Integer>, LocalError> {
    let support = bad_support_with(&fc.t, budget)?;
    let norm = fc.model.discriminant().norm();
    let mut primes = BTreeSet::new();
    for n in [norm.numer(), norm.denom()] {
        if n.abs().is_one() {
            continue;
        }
        let f = factor(n, budget)?;
        if let Some(c) = f.cofactor {
            return Err(NumError::Incomplete(c).into());
        }
        primes.extend(f.factors.into_iter().map(|(p, _)| p));
    }
    let mut missed = Vec::new();
    for p in primes.difference(&support) {
        let locals = local_data_above(&fc.model, std::iter::once(p))?;
        if locals.iter().any(|l| l.v_delta_min > 0) {
            missed.push(p.clone());
        }
    }
    Ok(missed)
}

/// `v(j) = −v(Δ_min)` at a multiplicative prime.
pub fn j_matches_multiplicative(j: &Rational, l: &LocalData) -> bool {
    if !l.reduction.is_multiplicative() {
        return true;
    }
    match l.prime.val_rational(j) {
        Valuation::Finite(n) => n == -l.v_delta_min,
        Valuation::Infinity => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;
    use crate::family::{build, build_with_sign, RootSign};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn e2_has_c_169() {
        for t in ["2", "-1", "1/2"] {
            let fc = build(&q(t)).unwrap();
            let g = tamagawa(&fc).unwrap();
            assert_eq!(g.c_e, Integer::from(169), "t = {t}");
            assert_eq!(g.v13, 2);
            for l in &g.locals {
                l.check().unwrap();
            }
        }
    }

    #[test]
    fn e2_local_table() {
        let fc = build(&q("2")).unwrap();
        let g = tamagawa(&fc).unwrap();
        let over2: Vec<_> = g.locals.iter().filter(|l| l.prime.p() == &Integer::from(2)).collect();
        assert_eq!(over2.len(), 2);
        for l in over2 {
            assert_eq!((l.kodaira, l.v_delta_min, l.c, l.reduction), (Kodaira::I(13), 13, 13, Reduction::SplitMult));
        }
        let over5: Vec<_> = g.locals.iter().filter(|l| l.prime.p() == &Integer::from(5)).collect();
        assert_eq!(over5.len(), 1);
        assert_eq!(over5[0].prime.kind(), PrimeKind::Inert);
        assert_eq!((over5[0].kodaira, over5[0].v_delta_min, over5[0].c), (Kodaira::I(1), 1, 1));
        assert!(conj_symmetry(&g).holds());
        assert!(i13m_law(&fc, &g).is_empty());
    }

    #[test]
    fn t3_has_v13_4() {
        let fc = build(&q("3")).unwrap();
        let g = tamagawa(&fc).unwrap();
        assert_eq!(g.v13, 4);
        let sym = conj_symmetry(&g);
        assert!(sym.holds());
        assert!(sym.pairs_checked >= 2);
        assert!(i13m_law(&fc, &g).is_empty());
    }

    #[test]
    fn thirteen_rule_examples() {
        for (t, pred) in [("2", false), ("13", true), ("14", true), ("1/13", true), ("26", true), ("3", false)] {
            let fc = build(&q(t)).unwrap();
            let g = tamagawa(&fc).unwrap();
            let rule = check_13_rule(&fc, &g);
            assert_eq!(rule.predicate, pred, "t = {t}");
            assert!(rule.agrees(), "t = {t}: {rule:?}");
        }
    }

    #[test]
    fn conjugate_curve_has_same_product() {
        for t in ["2", "3", "-2", "5/3"] {
            let a = tamagawa(&build(&q(t)).unwrap()).unwrap();
            let b = tamagawa(&build_with_sign(&q(t), RootSign::Negative).unwrap()).unwrap();
            assert_eq!(a.c_e, b.c_e, "t = {t}");
        }
    }

    #[test]
    fn support_oracle_small() {
        for t in ["2", "-2", "1/2", "3"] {
            let fc = build(&q(t)).unwrap();
            assert!(support_oracle(&fc, FactorBudget::default()).unwrap().is_empty(), "t = {t}");
        }
    }
}

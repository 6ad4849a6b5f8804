//! The one-parameter family `E_t : y² + a·xy + c·y = x³ + b·x²` of curves with
//! a point of order 13 at `(0,0)`, defined over `Q(s)` with
//! `s² = t⁶ − 2t⁵ + t⁴ − 2t³ + 6t² − 4t + 1`.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::curve::{CurveError, Point, WeierstrassModel};
use crate::exactnum::{
    factor, format_rational, squarefree_split, FactorBudget, Integer, NumError, Rational,
};
use crate::quadfield::{QuadNum, QuadraticField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    /// `t = 0` or `t = 1`: the model degenerates.
    #[error("degenerate parameter t = {}", format_rational(.0))]
    DegenerateParameter(Rational),
    /// `D(t)` is a rational square, so the point would be defined over Q.
    #[error("D(t) is a square for t = {}: the 13-torsion point would be rational", format_rational(.0))]
    RationalPoint(Rational),
    #[error("curve construction failed: {0}")]
    Curve(#[from] CurveError),
    #[error("{0}")]
    Num(#[from] NumError),
}

/// `D(t)` with its decomposition `D = d·m²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexticData {
    pub t: Rational,
    pub value: Rational,
    pub d: Integer,
    pub m: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCurve {
    pub t: Rational,
    pub sextic: SexticData,
    pub field: QuadraticField,
    /// The square root of `D(t)` used in the coefficients.
    pub s: QuadNum,
    pub model: WeierstrassModel,
    pub marked_point: Point,
}

fn int(n: i64) -> Rational {
    Rational::from_integer(Integer::from(n))
}

/// Horner evaluation; `coeffs` from the leading term down.
fn horner(t: &Rational, coeffs: &[i64]) -> Rational {
    coeffs.iter().fold(Rational::zero(), |acc, &c| acc * t + int(c))
}

const SEXTIC: [i64; 7] = [1, -2, 1, -2, 6, -4, 1];
const CUBIC: [i64; 4] = [1, -4, 1, 1];

pub fn sextic_value(t: &Rational) -> Rational {
    horner(t, &SEXTIC)
}

/// `t³ − 4t² + t + 1`.
pub fn cubic_value(t: &Rational) -> Rational {
    horner(t, &CUBIC)
}

pub fn sextic(t: &Rational) -> SexticData {
    let value = sextic_value(t);
    // D(t) > 0 for every real t, so the split never sees 0
    let (d, m) = squarefree_split(&value).expect("D(t) is never zero");
    SexticData { t: t.clone(), value, d, m }
}

fn check_parameter(t: &Rational) -> Result<SexticData, FamilyError> {
    if t.is_zero() || t.is_one() {
        return Err(FamilyError::DegenerateParameter(t.clone()));
    }
    let data = sextic(t);
    if data.d.is_one() {
        return Err(FamilyError::RationalPoint(t.clone()));
    }
    Ok(data)
}

/// Which square root of `D(t)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSign {
    Positive,
    Negative,
}

/// `E_t` over `Q(√d)` with `s = m√d`, `m > 0`.
pub fn build(t: &Rational) -> Result<FamilyCurve, FamilyError> {
    build_with_sign(t, RootSign::Positive)
}

/// `E_t` with a chosen sign of `s`; the negative sign gives the Galois
/// conjugate curve.
pub fn build_with_sign(t: &Rational, sign: RootSign) -> Result<FamilyCurve, FamilyError> {
    let data = check_parameter(t)?;
    let field = QuadraticField::new_unchecked(data.d.clone());
    let m = match sign {
        RootSign::Positive => data.m.clone(),
        RootSign::Negative => -data.m.clone(),
    };
    let s = field.element(Rational::zero(), m);
    let k = |q: Rational| field.rational(q);
    let half = Rational::new(1.into(), 2.into());
    let tm1 = t - int(1);

    // a = ((t−1)²(t²+t−1)s − t⁷ + 2t⁶ + 3t⁵ − 2t⁴ − 5t³ + 9t² − 5t + 1)/2
    let a_s = &tm1 * &tm1 * horner(t, &[1, 1, -1]);
    let a_0 = horner(t, &[-1, 2, 3, -2, -5, 9, -5, 1]);
    let a = (&(&k(a_s) * &s) + &k(a_0)).scale(&half);

    // b = t(t−1)²((t⁵ + 2t⁴ − 5t² + 4t − 1)s − t⁸ − t⁷ + 4t⁶ + 2t⁵ + t⁴ − 13t³ + 14t² − 6t + 1)/2
    let b_s = horner(t, &[1, 2, 0, -5, 4, -1]);
    let b_0 = horner(t, &[-1, -1, 4, 2, 1, -13, 14, -6, 1]);
    let b_pre = t * &tm1 * &tm1 * &half;
    let b = (&(&k(b_s) * &s) + &k(b_0)).scale(&b_pre);

    // c = t⁵·b
    let c = b.scale(&num_traits::pow(t.clone(), 5));

    let zero = field.zero();
    let model = WeierstrassModel::new(a, b, c, zero.clone(), zero.clone())?;
    if model.discriminant().is_zero() {
        return Err(CurveError::Singular.into());
    }
    Ok(FamilyCurve {
        t: t.clone(),
        sextic: data,
        field,
        s,
        model,
        marked_point: Point::affine(zero.clone(), zero),
    })
}

/// The model in `z = 1/t`, equal to `E_t` rescaled by `u = −t⁷`. It is
/// integral at primes where `t` has negative valuation.
pub fn build_inverted(t: &Rational) -> Result<FamilyCurve, FamilyError> {
    let mut fc = build(t)?;
    let field = fc.field.clone();
    let z = t.recip();
    let s = &fc.s;
    let zp = |e: usize| num_traits::pow(z.clone(), e);
    // Σ (c_s·s + c_0)·zᵉ
    let poly = |terms: &[(usize, i64, i64)]| -> QuadNum {
        terms.iter().fold(field.zero(), |acc, &(e, cs, c0)| {
            let coeff = &s.scale(&int(cs)) + &field.rational(int(c0));
            &acc + &coeff.scale(&zp(e))
        })
    };
    let half = Rational::new(1.into(), 2.into());
    let a1 = poly(&[
        (7, 1, -1),
        (6, -3, 5),
        (5, 2, -9),
        (4, 1, 5),
        (3, -1, 2),
        (2, 0, -3),
        (1, 0, -2),
        (0, 0, 1),
    ])
    .scale(&half);
    let p = poly(&[
        (8, 1, -1),
        (7, -4, 6),
        (6, 5, -14),
        (5, 0, 13),
        (4, -2, -1),
        (3, -1, -2),
        (2, 0, -4),
        (1, 0, 1),
        (0, 0, 1),
    ]);
    let zm1 = &z - int(1);
    let a2 = p.scale(&(-zp(3) * &zm1 * &zm1 * &half));
    let a3 = p.scale(&(zp(5) * &zm1 * &zm1 * &half));
    let zero = field.zero();
    fc.model = WeierstrassModel::new(a1, a2, a3, zero.clone(), zero)?;
    Ok(fc)
}

/// `j(E_t)` from its closed form in `t`.
pub fn j_formula(t: &Rational) -> Result<Rational, FamilyError> {
    let tm1 = t - int(1);
    let den = num_traits::pow(t.clone(), 13) * num_traits::pow(tm1, 13) * cubic_value(t);
    if den.is_zero() {
        return Err(FamilyError::DegenerateParameter(t.clone()));
    }
    let f1 = horner(t, &[1, -1, 1]);
    let f2 = horner(t, &[1, -9, 29, -40, 22, -16, 40, -22, -23, 25, -4, -3, 1]);
    Ok(num_traits::pow(f1 * f2, 3) / den)
}

fn push_primes(set: &mut BTreeSet<Integer>, n: &Integer, budget: FactorBudget) -> Result<(), NumError> {
    if n.is_zero() {
        return Ok(());
    }
    let f = factor(n, budget)?;
    if let Some(c) = f.cofactor {
        return Err(NumError::Incomplete(c));
    }
    set.extend(f.factors.into_iter().map(|(p, _)| p));
    Ok(())
}

/// Rational primes that can lie under a prime of bad reduction: 13 and the
/// primes of `t`, `t − 1` and `t³ − 4t² + t + 1` (numerators and
/// denominators).
pub fn bad_support(t: &Rational) -> Result<BTreeSet<Integer>, FamilyError> {
    bad_support_with(t, FactorBudget::default())
}

pub fn bad_support_with(t: &Rational, budget: FactorBudget) -> Result<BTreeSet<Integer>, FamilyError> {
    if t.is_zero() || t.is_one() {
        return Err(FamilyError::DegenerateParameter(t.clone()));
    }
    let mut set = BTreeSet::from([Integer::from(13)]);
    for q in [t.clone(), t - int(1), cubic_value(t)] {
        push_primes(&mut set, q.numer(), budget)?;
        push_primes(&mut set, q.denom(), budget)?;
    }
    Ok(set)
}

/// `2Δ / (t¹³(t−1)¹³(t³−4t²+t+1))`, the part of the discriminant not
/// visible in `t`.
pub fn discriminant_cofactor(fc: &FamilyCurve) -> QuadNum {
    let t = &fc.t;
    let known = num_traits::pow(t.clone(), 13)
        * num_traits::pow(t - int(1), 13)
        * cubic_value(t);
    fc.model.discriminant().scale(&(int(2) / known))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn e2_j() -> Rational {
        q("-60698457/40960")
    }

    #[test]
    fn sextic_examples() {
        let d2 = sextic(&q("2"));
        assert_eq!((d2.value.clone(), d2.d.clone(), d2.m.clone()), (q("17"), 17.into(), q("1")));
        assert_eq!(sextic(&q("-1")).value, q("17"));
        let d3 = sextic(&q("3"));
        assert_eq!((d3.value, d3.d), (q("313"), 313.into()));
        let h = sextic(&q("1/2"));
        assert_eq!((h.value, h.d, h.m), (q("17/64"), 17.into(), q("1/8")));
    }

    #[test]
    fn degenerate_parameters() {
        assert_eq!(build(&q("0")), Err(FamilyError::DegenerateParameter(q("0"))));
        assert_eq!(build_inverted(&q("1")), Err(FamilyError::DegenerateParameter(q("1"))));
        assert!(bad_support(&q("1")).is_err());
    }

    #[test]
    fn e2_triple() {
        for t in ["2", "-1", "1/2"] {
            let fc = build(&q(t)).unwrap();
            assert_eq!(fc.field.d(), &Integer::from(17));
            let j = fc.model.j_invariant().unwrap();
            assert_eq!(j.as_rational(), Some(&e2_j()), "t = {t}");
            assert_eq!(j_formula(&q(t)).unwrap(), e2_j());
        }
    }

    #[test]
    fn model_properties() {
        for t in ["2", "3", "-2", "1/2", "5/7", "-3/4", "13", "1/13", "10/9"] {
            let t = q(t);
            let fc = build(&t).unwrap();
            assert_eq!(&fc.s * &fc.s, fc.field.rational(sextic_value(&t)));
            assert_eq!(fc.model.point_order(&fc.marked_point, 20).unwrap(), Some(13));
            let j = fc.model.j_invariant().unwrap();
            assert_eq!(j.as_rational(), Some(&j_formula(&t).unwrap()));
            let inv = build_inverted(&t).unwrap();
            assert_eq!(inv.model.j_invariant().unwrap(), j);
            // the inverted model is exactly E_t rescaled by u = −t⁷
            let u = fc.field.rational(-num_traits::pow(t.clone(), 7));
            let zero = fc.field.zero();
            assert_eq!(fc.model.transform(&u, &zero, &zero, &zero).unwrap(), inv.model);
            let conj = build_with_sign(&t, RootSign::Negative).unwrap();
            assert_eq!(conj.model.a1, fc.model.a1.conj());
        }
    }

    #[test]
    fn inverted_model_at_minus_one_has_only_two_in_denominators() {
        let fc = build_inverted(&q("-1")).unwrap();
        for a in fc.model.coefficients() {
            let (_, _, den) = a.integral_parts();
            assert_eq!(&den >> den.trailing_zeros().unwrap_or(0) as usize, Integer::one());
        }
    }

    #[test]
    fn support_examples() {
        let set = |t: &str| -> Vec<i64> {
            bad_support(&q(t)).unwrap().iter().map(|p| i64::try_from(p).unwrap()).collect()
        };
        assert_eq!(set("2"), vec![2, 5, 13]);
        assert_eq!(set("3"), vec![2, 3, 5, 13]);
        assert_eq!(set("1/2"), vec![2, 5, 13]);
    }

    #[test]
    fn discriminant_cofactor_is_nonzero() {
        let fc = build(&q("2")).unwrap();
        assert!(!discriminant_cofactor(&fc).is_zero());
    }
}

//! Exact integers and rationals, plus the elementary number theory the rest of
//! the crate leans on: factoring, squarefree parts, Kronecker symbols, square
//! roots modulo prime powers and p-adic valuations of rationals.
//!
//! Everything here is a pure function over immutable values.

mod factor;
mod modsqrt;

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use factor::{factor, is_prime, FactorBudget, Factorization};
pub use modsqrt::{sqrt_mod_prime, sqrt_mod_prime_power};

/// Arbitrary-precision signed integer.
pub type Integer = num_bigint::BigInt;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("zero input")]
    Zero,
    #[error("{d} has no square root modulo {p}^{k}")]
    NoSquareRoot { d: Integer, p: Integer, k: u32 },
    #[error("{0} is not prime")]
    NotPrime(Integer),
    #[error("could not fully factor {0} within the budget")]
    Incomplete(Integer),
}

/// An additive valuation: a finite exponent, or `+∞` for zero.
///
/// `Finite(_)` sorts below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// True when the valuation is at least `n` (always true for `+∞`).
    pub fn at_least(self, n: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= n,
            Valuation::Infinity => true,
        }
    }

    /// Finite value; panics on `+∞`.
    pub fn unwrap(self) -> i64 {
        self.finite().expect("valuation of zero")
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("+inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn vp_int(n: &Integer, p: &Integer) -> u32 {
    assert!(!n.is_zero(), "vp_int of zero");
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        n = q;
        e += 1;
    }
}

/// Exponent of `p` in `q`; negative for primes in the denominator.
pub fn vp(q: &Rational, p: &Integer) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinity;
    }
    let num = vp_int(q.numer(), p) as i64;
    let den = vp_int(q.denom(), p) as i64;
    Valuation::Finite(num - den)
}

/// Splits a nonzero rational as `q = d·m²` with `d` a squarefree integer and
/// `m > 0`.
pub fn squarefree_split(q: &Rational) -> Result<(Integer, Rational), NumError> {
    squarefree_split_with(q, FactorBudget::default())
}

pub fn squarefree_split_with(
    q: &Rational,
    budget: FactorBudget,
) -> Result<(Integer, Rational), NumError> {
    if q.is_zero() {
        return Err(NumError::Zero);
    }
    let num = factor(q.numer(), budget)?;
    let den = factor(q.denom(), budget)?;
    if let Some(c) = num.cofactor.as_ref().or(den.cofactor.as_ref()) {
        return Err(NumError::Incomplete(c.clone()));
    }
    let mut d = Integer::from(num.sign);
    let mut m_num = Integer::one();
    let mut m_den = Integer::one();
    for (p, e) in &num.factors {
        if e % 2 == 1 {
            d *= p;
        }
        m_num *= num_traits::pow(p.clone(), (*e / 2) as usize);
    }
    for (p, e) in &den.factors {
        // p^-e = p^(e mod 2) · (p^-ceil(e/2))²
        if e % 2 == 1 {
            d *= p;
        }
        m_den *= num_traits::pow(p.clone(), (*e).div_ceil(2) as usize);
    }
    Ok((d, Rational::new(m_num, m_den)))
}

/// True when `n` has no squared prime factor. Zero is not squarefree.
pub fn is_squarefree(n: &Integer) -> Result<bool, NumError> {
    if n.is_zero() {
        return Ok(false);
    }
    let f = factor(n, FactorBudget::default())?;
    if let Some(c) = f.cofactor {
        return Err(NumError::Incomplete(c));
    }
    Ok(f.factors.iter().all(|(_, e)| *e == 1))
}

/// Kronecker symbol `(a/n)`, defined for every `n` (with `(a/0) = [a = ±1]`).
pub fn kronecker(a: &Integer, n: &Integer) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    let two = Integer::from(2);
    while n.is_even() {
        n /= &two;
        if a.is_even() {
            return 0;
        }
        let r = a.mod_floor(&Integer::from(8));
        if r == Integer::from(3) || r == Integer::from(5) {
            result = -result;
        }
    }
    result * jacobi(&a.mod_floor(&n), &n)
}

/// Jacobi symbol for odd positive `n`.
fn jacobi(a: &Integer, n: &Integer) -> i32 {
    let eight = Integer::from(8);
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == Integer::from(3) || r == Integer::from(5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&Integer::from(4)) == Integer::from(3)
            && n.mod_floor(&Integer::from(4)) == Integer::from(3)
        {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &Integer, m: &Integer) -> Option<Integer> {
    let g = a.mod_floor(m).extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

/// Parses `"r/q"` or `"r"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Integer = n.trim().parse().ok()?;
            let d: Integer = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// `"num/den"`, or just `"num"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Height `max(|num|, den)` of a rational in lowest terms.
pub fn height(q: &Rational) -> Integer {
    match q.numer().abs().cmp(q.denom()) {
        Ordering::Less => q.denom().clone(),
        _ => q.numer().abs(),
    }
}

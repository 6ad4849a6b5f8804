use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use super::FieldError;
use crate::exactnum::{format_rational, is_squarefree, Integer, Rational};

/// `K = Q(√d)` for a squarefree `d ∉ {0, 1}`. Cheap to clone.
#[derive(Clone)]
pub struct QuadraticField(Arc<FieldData>);

struct FieldData {
    d: Integer,
    disc: Integer,
}

impl QuadraticField {
    pub fn new(d: Integer) -> Result<Self, FieldError> {
        if d.is_zero() || d.is_one() || !is_squarefree(&d).unwrap_or(false) {
            return Err(FieldError::BadRadicand(d));
        }
        Ok(Self::new_unchecked(d))
    }

    /// Skips the squarefree check; callers must already know `d` is valid.
    pub fn new_unchecked(d: Integer) -> Self {
        let disc = if d.mod_floor(&Integer::from(4)).is_one() {
            d.clone()
        } else {
            &d * 4
        };
        QuadraticField(Arc::new(FieldData { d, disc }))
    }

    pub fn d(&self) -> &Integer {
        &self.0.d
    }

    pub fn disc(&self) -> &Integer {
        &self.0.disc
    }

    pub fn element(&self, x: Rational, y: Rational) -> QuadNum {
        QuadNum { x, y, field: self.clone() }
    }

    pub fn rational(&self, x: Rational) -> QuadNum {
        self.element(x, Rational::zero())
    }

    pub fn int(&self, n: impl Into<Integer>) -> QuadNum {
        self.rational(Rational::from_integer(n.into()))
    }

    pub fn zero(&self) -> QuadNum {
        self.int(0)
    }

    pub fn one(&self) -> QuadNum {
        self.int(1)
    }

    /// `√d`.
    pub fn sqrt_d(&self) -> QuadNum {
        self.element(Rational::zero(), Rational::one())
    }
}

impl PartialEq for QuadraticField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.d == other.0.d
    }
}

impl Eq for QuadraticField {}

impl fmt::Debug for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.0.d)
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.0.d)
    }
}

/// `x + y√d` in a quadratic field.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadNum {
    pub x: Rational,
    pub y: Rational,
    pub field: QuadraticField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic: reports field mismatches and division by zero
/// instead of panicking like the operator impls do.
pub fn qf_arith(z: &QuadNum, w: &QuadNum, op: ArithOp) -> Result<QuadNum, FieldError> {
    if z.field != w.field {
        return Err(FieldError::FieldMismatch(z.field.d().clone(), w.field.d().clone()));
    }
    Ok(match op {
        ArithOp::Add => z + w,
        ArithOp::Sub => z - w,
        ArithOp::Mul => z * w,
        ArithOp::Div => z * &w.inv()?,
    })
}

impl QuadNum {
    pub fn d(&self) -> &Integer {
        self.field.d()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.x)
    }

    pub fn conj(&self) -> QuadNum {
        QuadNum { x: self.x.clone(), y: -&self.y, field: self.field.clone() }
    }

    pub fn norm(&self) -> Rational {
        &self.x * &self.x - Rational::from_integer(self.d().clone()) * &self.y * &self.y
    }

    pub fn trace(&self) -> Rational {
        &self.x * Rational::from_integer(Integer::from(2))
    }

    pub fn inv(&self) -> Result<QuadNum, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadNum { x: &self.x / &n, y: -&self.y / &n, field: self.field.clone() })
    }

    pub fn pow(&self, e: u32) -> QuadNum {
        let mut base = self.clone();
        let mut acc = self.field.one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, q: &Rational) -> QuadNum {
        QuadNum { x: &self.x * q, y: &self.y * q, field: self.field.clone() }
    }

    /// `(X, Y, D)` with `self = (X + Y√d)/D`, `D > 0` minimal.
    pub fn integral_parts(&self) -> (Integer, Integer, Integer) {
        let den = self.x.denom().lcm(self.y.denom());
        let xs = self.x.numer() * (&den / self.x.denom());
        let ys = self.y.numer() * (&den / self.y.denom());
        (xs, ys, den)
    }

    fn check_field(&self, other: &QuadNum) {
        assert!(
            self.field == other.field,
            "mixed fields: Q(√{}) and Q(√{})",
            self.d(),
            other.d()
        );
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return f.write_str(&format_rational(&self.x));
        }
        let y_abs = self.y.abs();
        let y_str = if y_abs.is_one() { String::new() } else { format_rational(&y_abs) };
        let radical = format!("{y_str}√{}", self.d());
        if self.x.is_zero() {
            let sign = if self.y.is_negative() { "-" } else { "" };
            write!(f, "{sign}{radical}")
        } else {
            let sign = if self.y.is_negative() { '-' } else { '+' };
            write!(f, "{} {sign} {radical}", format_rational(&self.x))
        }
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {:?}", self.field)
    }
}

impl<'a> Add<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: &QuadNum) -> QuadNum {
        self.check_field(rhs);
        QuadNum { x: &self.x + &rhs.x, y: &self.y + &rhs.y, field: self.field.clone() }
    }
}

impl<'a> Sub<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: &QuadNum) -> QuadNum {
        self.check_field(rhs);
        QuadNum { x: &self.x - &rhs.x, y: &self.y - &rhs.y, field: self.field.clone() }
    }
}

impl<'a> Mul<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: &QuadNum) -> QuadNum {
        self.check_field(rhs);
        let d = Rational::from_integer(self.d().clone());
        let x = &self.x * &rhs.x + d * &self.y * &rhs.y;
        let y = &self.x * &rhs.y + &self.y * &rhs.x;
        QuadNum { x, y, field: self.field.clone() }
    }
}

impl<'a> Div<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QuadNum) -> QuadNum {
        self * &rhs.inv().expect("division by zero in Q(√d)")
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { x: -&self.x, y: -&self.y, field: self.field.clone() }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { x: -self.x, y: -self.y, field: self.field }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: QuadNum) -> QuadNum { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: &QuadNum) -> QuadNum { (&self).$m(rhs) }
        }
        impl<'a> $tr<QuadNum> for &'a QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: QuadNum) -> QuadNum { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k17() -> QuadraticField {
        QuadraticField::new(Integer::from(17)).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(Integer::from(n))
    }

    #[test]
    fn field_construction() {
        let k = k17();
        assert_eq!(k.disc(), &Integer::from(17));
        assert_eq!(QuadraticField::new(Integer::from(26)).unwrap().disc(), &Integer::from(104));
        assert_eq!(QuadraticField::new(Integer::from(-1)).unwrap().disc(), &Integer::from(-4));
        assert!(QuadraticField::new(Integer::from(1)).is_err());
        assert!(QuadraticField::new(Integer::from(12)).is_err());
        assert!(QuadraticField::new(Integer::from(0)).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let k = k17();
        let a = k.element(q(1), q(1));
        assert_eq!(&a * &a.conj(), k.int(-16));
        let u = k.element(q(4), q(1));
        assert_eq!(&u * &u.conj(), k.int(-1));
        assert_eq!(&a / &a, k.one());
        assert_eq!(u.norm(), q(-1));
        assert_eq!(k.sqrt_d().trace(), q(0));
        assert_eq!(k.element(q(3), q(2)).conj(), k.element(q(3), q(-2)));
    }

    #[test]
    fn checked_errors() {
        let k = k17();
        let other = QuadraticField::new(Integer::from(13)).unwrap();
        assert_eq!(
            qf_arith(&k.one(), &other.one(), ArithOp::Add),
            Err(FieldError::FieldMismatch(Integer::from(17), Integer::from(13)))
        );
        assert_eq!(qf_arith(&k.one(), &k.zero(), ArithOp::Div), Err(FieldError::DivisionByZero));
        assert_eq!(qf_arith(&k.int(6), &k.int(3), ArithOp::Div), Ok(k.int(2)));
    }

    #[test]
    fn display() {
        let k = k17();
        assert_eq!(k.element(q(3), q(-2)).to_string(), "3 - 2√17");
        assert_eq!(k.sqrt_d().to_string(), "√17");
        assert_eq!(k.element(Rational::new(1.into(), 2.into()), q(0)).to_string(), "1/2");
    }

    fn arb_elem() -> impl Strategy<Value = (i64, i64, i64, i64)> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c, e) in arb_elem(), (f, g, h, i) in arb_elem()) {
            let k = k17();
            let z = k.element(Rational::new(a.into(), b.into()), Rational::new(c.into(), e.into()));
            let w = k.element(Rational::new(f.into(), g.into()), Rational::new(h.into(), i.into()));
            prop_assert_eq!(z.conj().conj(), z.clone());
            prop_assert_eq!((&z * &w).norm(), z.norm() * w.norm());
            prop_assert_eq!(&(&z + &w) - &w, z.clone());
            if !w.is_zero() {
                prop_assert_eq!(&(&z / &w) * &w, z.clone());
            }
            let (x, y, d) = z.integral_parts();
            prop_assert_eq!(k.element(Rational::new(x, d.clone()), Rational::new(y, d)), z);
        }
    }
}

//! Long Weierstrass models `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` over a
//! quadratic field, their invariants, changes of coordinates and the group law.

use std::fmt;

use thiserror::Error;

use crate::exactnum::{Integer, Rational};
use crate::quadfield::{QuadNum, QuadraticField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("coefficients do not lie in a common field")]
    FieldMismatch,
    #[error("model is singular (discriminant 0)")]
    Singular,
    #[error("scaling factor u must be nonzero")]
    ZeroScaling,
    #[error("point is not on the curve")]
    NotOnCurve,
}

#[derive(Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: QuadNum,
    pub a2: QuadNum,
    pub a3: QuadNum,
    pub a4: QuadNum,
    pub a6: QuadNum,
}

/// The standard quantities attached to a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub b2: QuadNum,
    pub b4: QuadNum,
    pub b6: QuadNum,
    pub b8: QuadNum,
    pub c4: QuadNum,
    pub c6: QuadNum,
    pub disc: QuadNum,
    /// `None` for a singular model.
    pub j: Option<QuadNum>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Point {
    Infinity,
    Affine { x: QuadNum, y: QuadNum },
}

impl Point {
    pub fn affine(x: QuadNum, y: QuadNum) -> Point {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => f.write_str("O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

fn small(field: &QuadraticField, n: i64) -> QuadNum {
    field.int(n)
}

impl WeierstrassModel {
    pub fn new(
        a1: QuadNum,
        a2: QuadNum,
        a3: QuadNum,
        a4: QuadNum,
        a6: QuadNum,
    ) -> Result<Self, CurveError> {
        let f = &a1.field;
        if [&a2, &a3, &a4, &a6].iter().any(|a| a.field != *f) {
            return Err(CurveError::FieldMismatch);
        }
        Ok(WeierstrassModel { a1, a2, a3, a4, a6 })
    }

    /// Model with rational coefficients viewed over `field`.
    pub fn from_rationals(field: &QuadraticField, a: [Rational; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a.map(|q| field.rational(q));
        WeierstrassModel { a1, a2, a3, a4, a6 }
    }

    pub fn field(&self) -> &QuadraticField {
        &self.a1.field
    }

    pub fn coefficients(&self) -> [&QuadNum; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn b2(&self) -> QuadNum {
        &(&self.a1 * &self.a1) + &(&small(self.field(), 4) * &self.a2)
    }

    pub fn b4(&self) -> QuadNum {
        &(&small(self.field(), 2) * &self.a4) + &(&self.a1 * &self.a3)
    }

    pub fn b6(&self) -> QuadNum {
        &(&self.a3 * &self.a3) + &(&small(self.field(), 4) * &self.a6)
    }

    pub fn b8(&self) -> QuadNum {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let k = |n| small(self.field(), n);
        let t1 = &(&(a1 * a1) * a6) + &(&(&k(4) * a2) * a6);
        let t2 = &(&(a1 * a3) * a4) - &(&(a2 * a3) * a3);
        &(&t1 - &t2) - &(a4 * a4)
    }

    pub fn invariants(&self) -> Invariants {
        let k = |n| small(self.field(), n);
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        let c4 = &(&b2 * &b2) - &(&k(24) * &b4);
        let c6 = &(&(&k(-1) * &b2.pow(3)) + &(&(&k(36) * &b2) * &b4)) - &(&k(216) * &b6);
        let disc = {
            let t1 = &(&(&b2 * &b2) * &b8) * &k(-1);
            let t2 = &(&k(8) * &b4.pow(3)) + &(&k(27) * &(&b6 * &b6));
            let t3 = &(&(&k(9) * &b2) * &b4) * &b6;
            &(&t1 - &t2) + &t3
        };
        let j = (!disc.is_zero()).then(|| &c4.pow(3) / &disc);
        Invariants { b2, b4, b6, b8, c4, c6, disc, j }
    }

    pub fn discriminant(&self) -> QuadNum {
        self.invariants().disc
    }

    pub fn j_invariant(&self) -> Result<QuadNum, CurveError> {
        self.invariants().j.ok_or(CurveError::Singular)
    }

    /// The model obtained from `x = u²x' + r`, `y = u³y' + s·u²x' + t`.
    pub fn transform(
        &self,
        u: &QuadNum,
        r: &QuadNum,
        s: &QuadNum,
        t: &QuadNum,
    ) -> Result<WeierstrassModel, CurveError> {
        if u.is_zero() {
            return Err(CurveError::ZeroScaling);
        }
        let f = self.field();
        if [u, r, s, t].iter().any(|z| z.field != *f) {
            return Err(CurveError::FieldMismatch);
        }
        let k = |n| small(f, n);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let ui = u.inv().expect("nonzero");
        let ui2 = &ui * &ui;
        let ui3 = &ui2 * &ui;
        let ui4 = &ui2 * &ui2;
        let ui6 = &ui3 * &ui3;

        let n1 = a1 + &(&k(2) * s);
        let n2 = &(&(a2 - &(s * a1)) + &(&k(3) * r)) - &(s * s);
        let n3 = &(a3 + &(r * a1)) + &(&k(2) * t);
        let n4 = {
            let x = &(a4 - &(s * a3)) + &(&(&k(2) * r) * a2);
            let y = &(t + &(r * s)) * a1;
            let z = &(&k(3) * &(r * r)) - &(&(&k(2) * s) * t);
            &(&x - &y) + &z
        };
        let n6 = {
            let x = &(&(a6 + &(r * a4)) + &(&(r * r) * a2)) + &r.pow(3);
            let y = &(&(t * a3) + &(t * t)) + &(&(r * t) * a1);
            &x - &y
        };
        Ok(WeierstrassModel {
            a1: &n1 * &ui,
            a2: &n2 * &ui2,
            a3: &n3 * &ui3,
            a4: &n4 * &ui4,
            a6: &n6 * &ui6,
        })
    }

    /// Change of variables undoing `transform(u, r, s, t)`.
    pub fn inverse_transform_params(
        u: &QuadNum,
        r: &QuadNum,
        s: &QuadNum,
        t: &QuadNum,
    ) -> Result<[QuadNum; 4], CurveError> {
        let ui = u.inv().map_err(|_| CurveError::ZeroScaling)?;
        let ui2 = &ui * &ui;
        let ui3 = &ui2 * &ui;
        Ok([
            ui.clone(),
            -&(r * &ui2),
            -&(s * &ui),
            &(&(r * s) - t) * &ui3,
        ])
    }

    /// Value of `y² + a1xy + a3y − x³ − a2x² − a4x − a6` at `(x, y)`.
    fn equation(&self, x: &QuadNum, y: &QuadNum) -> QuadNum {
        let lhs = &(&(y * y) + &(&(&self.a1 * x) * y)) + &(&self.a3 * y);
        let rhs = &(&(&x.pow(3) + &(&self.a2 * &(x * x))) + &(&self.a4 * x)) + &self.a6;
        &lhs - &rhs
    }

    pub fn is_on_curve(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => self.equation(x, y).is_zero(),
        }
    }

    fn check(&self, p: &Point) -> Result<(), CurveError> {
        if self.is_on_curve(p) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve)
        }
    }

    /// `-P = (x, −y − a1x − a3)`.
    pub fn negate(&self, p: &Point) -> Result<Point, CurveError> {
        self.check(p)?;
        Ok(self.negate_unchecked(p))
    }

    fn negate_unchecked(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => {
                let ny = &(&(-y) - &(&self.a1 * x)) - &self.a3;
                Point::Affine { x: x.clone(), y: ny }
            }
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Result<Point, CurveError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let f = self.field();
        let k = |n| small(f, n);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let (lambda, nu) = if x1 != x2 {
            let dx = x2 - x1;
            let lambda = &(y2 - y1) / &dx;
            let nu = &(&(y1 * x2) - &(y2 * x1)) / &dx;
            (lambda, nu)
        } else {
            let denom = &(&(&k(2) * y1) + &(a1 * x1)) + a3;
            if denom.is_zero() || y1 != y2 {
                // vertical line through P and Q = −P
                return Point::Infinity;
            }
            let num = &(&(&(&k(3) * &(x1 * x1)) + &(&(&k(2) * a2) * x1)) + a4) - &(a1 * y1);
            let num_nu =
                &(&(&(-&x1.pow(3)) + &(a4 * x1)) + &(&k(2) * a6)) - &(a3 * y1);
            (&num / &denom, &num_nu / &denom)
        };
        let x3 = &(&(&(&lambda * &lambda) + &(a1 * &lambda)) - a2) - &(x1 + x2);
        let y3 = &(&(-&(&(&lambda + a1) * &x3)) - &nu) - a3;
        Point::Affine { x: x3, y: y3 }
    }

    /// `n·P` by double-and-add; negative `n` uses `−P`.
    pub fn smul(&self, n: &Integer, p: &Point) -> Result<Point, CurveError> {
        self.check(p)?;
        let base = if n.sign() == num_bigint::Sign::Minus {
            self.negate_unchecked(p)
        } else {
            p.clone()
        };
        let n = n.magnitude();
        let mut acc = Point::Infinity;
        for i in (0..n.bits()).rev() {
            acc = self.add_unchecked(&acc, &acc);
            if n.bit(i) {
                acc = self.add_unchecked(&acc, &base);
            }
        }
        Ok(acc)
    }

    /// Least `n ≤ bound` with `nP = O`.
    pub fn point_order(&self, p: &Point, bound: u64) -> Result<Option<u64>, CurveError> {
        self.check(p)?;
        let mut acc = p.clone();
        for n in 1..=bound {
            if acc.is_infinity() {
                return Ok(Some(n));
            }
            acc = self.add_unchecked(&acc, p);
        }
        Ok(None)
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}, {}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

impl fmt::Debug for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeierstrassModel{self} over {}", self.field())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q17() -> QuadraticField {
        QuadraticField::new(Integer::from(17)).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn model(f: &QuadraticField, a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_rationals(f, a.map(|n| rat(n, 1)))
    }

    /// y² + xy + y = x³ − x² + ((−541+131√17)/2)x + 3624 − 879√17
    fn e2_reference() -> WeierstrassModel {
        let f = q17();
        WeierstrassModel::new(
            f.int(1),
            f.int(-1),
            f.int(1),
            f.element(rat(-541, 2), rat(131, 2)),
            f.element(rat(3624, 1), rat(-879, 1)),
        )
        .unwrap()
    }

    #[test]
    fn textbook_invariants() {
        let e = model(&q17(), [0, 0, 0, 0, 1]);
        let inv = e.invariants();
        assert_eq!(inv.disc, q17().int(-432));
        assert_eq!(inv.j, Some(q17().int(0)));
        let sing = model(&q17(), [0, 0, 0, 0, 0]);
        assert_eq!(sing.j_invariant(), Err(CurveError::Singular));
    }

    #[test]
    fn reference_curve_j_is_rational() {
        let j = e2_reference().j_invariant().unwrap();
        assert_eq!(j, q17().rational(rat(-60698457, 40960)));
    }

    #[test]
    fn invariant_identities() {
        let e = e2_reference();
        let i = e.invariants();
        let k = |n| q17().int(n);
        assert_eq!(&k(4) * &i.b8, &(&i.b2 * &i.b6) - &(&i.b4 * &i.b4));
        assert_eq!(&k(1728) * &i.disc, &i.c4.pow(3) - &(&i.c6 * &i.c6));
    }

    #[test]
    fn transform_laws() {
        let f = q17();
        let e = e2_reference();
        let (one, zero) = (f.one(), f.zero());
        assert_eq!(e.transform(&one, &zero, &zero, &zero).unwrap(), e);
        let two = f.int(2);
        let scaled = e.transform(&two, &zero, &zero, &zero).unwrap();
        assert_eq!(scaled.discriminant(), e.discriminant().scale(&rat(1, 4096)));
        assert_eq!(e.transform(&zero, &one, &one, &one), Err(CurveError::ZeroScaling));

        let u = f.element(rat(3, 1), rat(1, 1));
        let r = f.element(rat(-1, 2), rat(2, 1));
        let s = f.int(5);
        let t = f.element(rat(0, 1), rat(-7, 3));
        let moved = e.transform(&u, &r, &s, &t).unwrap();
        assert_eq!(moved.j_invariant(), e.j_invariant());
        assert_eq!(moved.discriminant(), &e.discriminant() / &u.pow(12));
        let [u2, r2, s2, t2] = WeierstrassModel::inverse_transform_params(&u, &r, &s, &t).unwrap();
        assert_eq!(moved.transform(&u2, &r2, &s2, &t2).unwrap(), e);
    }

    #[test]
    fn five_torsion_point() {
        // y² + y = x³ − x², (0,0) has order 5
        let f = q17();
        let e = model(&f, [0, -1, 1, 0, 0]);
        let p = Point::affine(f.zero(), f.zero());
        assert_eq!(e.point_order(&p, 20).unwrap(), Some(5));
        assert_eq!(e.add(&p, &Point::Infinity).unwrap(), p);
        let minus = e.negate(&p).unwrap();
        assert_eq!(e.add(&p, &minus).unwrap(), Point::Infinity);
        assert_eq!(e.smul(&Integer::from(-1), &p).unwrap(), minus);
        assert_eq!(e.smul(&Integer::from(5), &p).unwrap(), Point::Infinity);
        assert_eq!(e.point_order(&Point::Infinity, 20).unwrap(), Some(1));
        let off = Point::affine(f.one(), f.one());
        assert_eq!(e.add(&p, &off), Err(CurveError::NotOnCurve));
    }

    proptest! {
        #[test]
        fn group_law_is_abelian(i in 1i64..10, j in 1i64..10, k in 1i64..10) {
            // y² + y = x³ − x (rank 1, generated by (0,0))
            let f = q17();
            let e = model(&f, [0, 0, 1, -1, 0]);
            let g = Point::affine(f.zero(), f.zero());
            let m = |n: i64| e.smul(&Integer::from(n), &g).unwrap();
            let (p, q, r) = (m(i), m(j), m(k));
            let pq = e.add(&p, &q).unwrap();
            prop_assert_eq!(&pq, &e.add(&q, &p).unwrap());
            prop_assert_eq!(&pq, &m(i + j));
            let left = e.add(&pq, &r).unwrap();
            let right = e.add(&p, &e.add(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}

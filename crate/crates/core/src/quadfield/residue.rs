//! Residue fields `F_p` and `F_{p²}` and the handful of polynomial routines
//! Tate's algorithm needs: square tests and roots of quadratics and cubics.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use crate::exactnum::{mod_inverse, Integer, Rational};

/// Fields with at most this many elements are searched exhaustively.
const ENUMERATION_LIMIT: u64 = 4096;

/// `F_p` (degree 1) or `F_p[ω]/(ω² − w1·ω − w0)` (degree 2).
#[derive(Clone)]
pub struct ResidueField(Arc<FieldData>);

struct FieldData {
    p: Integer,
    degree: u8,
    w0: Integer,
    w1: Integer,
    order: Integer,
}

impl ResidueField {
    pub fn prime(p: Integer) -> Self {
        let order = p.clone();
        ResidueField(Arc::new(FieldData {
            p,
            degree: 1,
            w0: Integer::zero(),
            w1: Integer::zero(),
            order,
        }))
    }

    /// `F_p(ω)` with `ω² = w0 + w1·ω`; the polynomial must be irreducible.
    pub fn quadratic(p: Integer, w0: Integer, w1: Integer) -> Self {
        let order = &p * &p;
        let w0 = w0.mod_floor(&p);
        let w1 = w1.mod_floor(&p);
        ResidueField(Arc::new(FieldData { p, degree: 2, w0, w1, order }))
    }

    pub fn characteristic(&self) -> &Integer {
        &self.0.p
    }

    pub fn degree(&self) -> u8 {
        self.0.degree
    }

    /// Number of elements `q`.
    pub fn order(&self) -> &Integer {
        &self.0.order
    }

    pub fn elem(&self, c0: impl Into<Integer>, c1: impl Into<Integer>) -> ResidueElem {
        let p = &self.0.p;
        let c1 = if self.0.degree == 1 { Integer::zero() } else { c1.into().mod_floor(p) };
        ResidueElem { field: self.clone(), c0: c0.into().mod_floor(p), c1 }
    }

    pub fn from_int(&self, n: impl Into<Integer>) -> ResidueElem {
        self.elem(n, 0)
    }

    /// Image of a rational whose denominator is prime to `p`.
    pub fn from_rational(&self, q: &Rational) -> Option<ResidueElem> {
        let inv = mod_inverse(q.denom(), &self.0.p)?;
        Some(self.from_int(q.numer() * inv))
    }

    pub fn zero(&self) -> ResidueElem {
        self.from_int(0)
    }

    pub fn one(&self) -> ResidueElem {
        self.from_int(1)
    }

    /// The basis element `ω` (degree 2 only).
    pub fn omega(&self) -> ResidueElem {
        assert_eq!(self.0.degree, 2, "F_p has no ω");
        self.elem(0, 1)
    }

    fn is_small(&self) -> bool {
        self.0.order.to_u64().is_some_and(|q| q <= ENUMERATION_LIMIT)
    }

    /// All elements, for small fields.
    pub fn elements(&self) -> Option<Vec<ResidueElem>> {
        if !self.is_small() {
            return None;
        }
        let p = self.0.p.to_u64()?;
        let mut out = Vec::new();
        let c1_range = if self.0.degree == 2 { p } else { 1 };
        for c1 in 0..c1_range {
            for c0 in 0..p {
                out.push(self.elem(c0, c1));
            }
        }
        Some(out)
    }

    /// Deterministic non-square, for odd characteristic. Every element of
    /// `F_p` is a square in `F_{p²}`, so the search there starts at `c1 = 1`.
    fn non_square(&self) -> ResidueElem {
        let c1_values: &[u64] = if self.0.degree == 2 { &[1, 2, 3] } else { &[0] };
        for &c1 in c1_values {
            for c0 in 0u64.. {
                let e = self.elem(c0, c1);
                if !e.is_zero() && !e.is_square() {
                    return e;
                }
            }
        }
        unreachable!("no non-square found in a field of odd order")
    }
}

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.degree == other.0.degree
                && self.0.w0 == other.0.w0
                && self.0.w1 == other.0.w1)
    }
}

impl Eq for ResidueField {}

impl fmt::Debug for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.degree == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^2", self.0.p)
        }
    }
}

/// `c0 + c1·ω` in a residue field.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueElem {
    field: ResidueField,
    c0: Integer,
    c1: Integer,
}

impl fmt::Debug for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "{}+{}ω", self.c0, self.c1)
        }
    }
}

impl ResidueElem {
    pub fn field(&self) -> &ResidueField {
        &self.field
    }

    pub fn coords(&self) -> (&Integer, &Integer) {
        (&self.c0, &self.c1)
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.c0.is_one() && self.c1.is_zero()
    }

    fn p(&self) -> &Integer {
        &self.field.0.p
    }

    pub fn add(&self, o: &ResidueElem) -> ResidueElem {
        self.field.elem(&self.c0 + &o.c0, &self.c1 + &o.c1)
    }

    pub fn sub(&self, o: &ResidueElem) -> ResidueElem {
        self.field.elem(&self.c0 - &o.c0, &self.c1 - &o.c1)
    }

    pub fn neg(&self) -> ResidueElem {
        self.field.elem(-&self.c0, -&self.c1)
    }

    pub fn mul(&self, o: &ResidueElem) -> ResidueElem {
        if self.field.degree() == 1 {
            return self.field.from_int(&self.c0 * &o.c0);
        }
        let f = &self.field.0;
        let hi = &self.c1 * &o.c1;
        let c0 = &self.c0 * &o.c0 + &hi * &f.w0;
        let c1 = &self.c0 * &o.c1 + &self.c1 * &o.c0 + &hi * &f.w1;
        self.field.elem(c0, c1)
    }

    pub fn square(&self) -> ResidueElem {
        self.mul(self)
    }

    pub fn scale(&self, n: impl Into<Integer>) -> ResidueElem {
        self.mul(&self.field.from_int(n))
    }

    pub fn pow(&self, e: &Integer) -> ResidueElem {
        let mut acc = self.field.one();
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = acc.square();
            if e.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<ResidueElem> {
        if self.is_zero() {
            return None;
        }
        if self.field.degree() == 1 {
            return mod_inverse(&self.c0, self.p()).map(|i| self.field.from_int(i));
        }
        let q = self.field.order();
        Some(self.pow(&(q - Integer::from(2))))
    }

    pub fn frobenius(&self) -> ResidueElem {
        self.pow(self.p())
    }

    /// Inverse Frobenius: the unique `y` with `y^p = self`.
    pub fn pth_root(&self) -> ResidueElem {
        if self.field.degree() == 1 {
            self.clone()
        } else {
            self.pow(self.p())
        }
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() || self.p() == &Integer::from(2) {
            return true;
        }
        let q = self.field.order();
        self.pow(&((q - Integer::one()) >> 1)).is_one()
    }

    /// A square root, if one exists. In characteristic 2 this is the
    /// Frobenius inverse; otherwise Tonelli–Shanks in the multiplicative group.
    pub fn sqrt(&self) -> Option<ResidueElem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.p() == &Integer::from(2) {
            return Some(self.pth_root());
        }
        if !self.is_square() {
            return None;
        }
        let q = self.field.order();
        let q_minus_1 = q - Integer::one();
        let s = q_minus_1.trailing_zeros().unwrap_or(0);
        let odd = &q_minus_1 >> s;
        let z = self.field.non_square();
        let mut m = s;
        let mut c = z.pow(&odd);
        let mut t = self.pow(&odd);
        let mut r = self.pow(&((&odd + Integer::one()) >> 1));
        while !t.is_one() {
            let mut i = 0;
            let mut t2 = t.clone();
            while !t2.is_one() {
                t2 = t2.square();
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            m = i;
            c = b.square();
            t = t.mul(&c);
            r = r.mul(&b);
        }
        Some(r)
    }

    /// Cube root in characteristic 3 (Frobenius inverse).
    pub fn cube_root_char3(&self) -> ResidueElem {
        assert_eq!(self.p(), &Integer::from(3));
        self.pth_root()
    }
}

/// Polynomial with coefficients low-to-high.
type Poly = Vec<ResidueElem>;

fn trim(mut f: Poly) -> Poly {
    while f.last().is_some_and(ResidueElem::is_zero) {
        f.pop();
    }
    f
}

fn poly_eval(f: &[ResidueElem], x: &ResidueElem) -> ResidueElem {
    let mut acc = x.field().zero();
    for c in f.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

fn poly_divrem(f: &[ResidueElem], g: &[ResidueElem]) -> (Poly, Poly) {
    let g = trim(g.to_vec());
    let lead_inv = g.last().expect("division by zero polynomial").inv().unwrap();
    let mut r = trim(f.to_vec());
    if r.len() < g.len() {
        return (Vec::new(), r);
    }
    let field = g[0].field().clone();
    let mut quot = vec![field.zero(); r.len() - g.len() + 1];
    while r.len() >= g.len() && !r.is_empty() {
        let shift = r.len() - g.len();
        let coef = r.last().unwrap().mul(&lead_inv);
        for (i, gc) in g.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(&coef.mul(gc));
        }
        quot[shift] = coef;
        r = trim(r);
    }
    (quot, r)
}

fn poly_mulmod(a: &[ResidueElem], b: &[ResidueElem], m: &[ResidueElem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let field = a[0].field().clone();
    let mut prod = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = prod[i + j].add(&x.mul(y));
        }
    }
    poly_divrem(&prod, m).1
}

fn poly_powmod(base: &[ResidueElem], e: &Integer, m: &[ResidueElem]) -> Poly {
    let field = m[0].field().clone();
    let mut acc = vec![field.one()];
    for i in (0..e.bits()).rev() {
        acc = poly_mulmod(&acc, &acc, m);
        if e.bit(i) {
            acc = poly_mulmod(&acc, base, m);
        }
    }
    poly_divrem(&acc, m).1
}

fn poly_gcd(a: &[ResidueElem], b: &[ResidueElem]) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_divrem(&a, &b).1;
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        let inv = lead.inv().unwrap();
        a = a.iter().map(|c| c.mul(&inv)).collect();
    }
    a
}

/// Product of the distinct linear factors of `f` over the field:
/// `gcd(f, x^q − x)`.
fn rational_part(f: &[ResidueElem]) -> Poly {
    let field = f[0].field().clone();
    let x = vec![field.zero(), field.one()];
    let mut xq = poly_powmod(&x, field.order(), f);
    while xq.len() < 2 {
        xq.push(field.zero());
    }
    xq[1] = xq[1].sub(&field.one());
    poly_gcd(f, &trim(xq))
}

/// Splits a squarefree product of distinct linear factors (odd `q`).
fn split_linear(g: Poly, out: &mut Vec<ResidueElem>) {
    let g = trim(g);
    match g.len() {
        0 | 1 => {}
        2 => out.push(g[0].mul(&g[1].inv().unwrap()).neg()),
        _ => {
            let field = g[0].field().clone();
            let e = (field.order() - Integer::one()) >> 1;
            // shifts must range over the whole field: elements of F_p are all
            // squares in F_p², so F_p shifts alone never split F_p roots there
            let mut step = 0u64;
            loop {
                step += 1;
                let a = if field.degree() == 1 {
                    field.from_int(step)
                } else {
                    field.elem(step, step / 2 + 1)
                };
                // gcd(g, (x + a)^((q-1)/2) - 1) separates roots by quadratic character
                let base = vec![a, field.one()];
                let mut h = poly_powmod(&base, &e, &g);
                if h.is_empty() {
                    h.push(field.zero());
                }
                h[0] = h[0].sub(&field.one());
                let d = poly_gcd(&g, &trim(h));
                if d.len() > 1 && d.len() < g.len() {
                    let rest = poly_divrem(&g, &d).0;
                    split_linear(d, out);
                    split_linear(rest, out);
                    return;
                }
            }
        }
    }
}

fn multiplicity(f: &[ResidueElem], r: &ResidueElem) -> usize {
    let lin = vec![r.neg(), r.field().one()];
    let mut f = trim(f.to_vec());
    let mut m = 0;
    loop {
        let (q, rem) = poly_divrem(&f, &lin);
        if !rem.is_empty() || f.len() < 2 {
            return m;
        }
        m += 1;
        f = q;
    }
}

/// Roots in the field of `coeffs[0] + coeffs[1]x + …`, with multiplicity,
/// sorted by coordinates. The zero polynomial has no reported roots.
pub fn roots(coeffs: &[ResidueElem]) -> Vec<ResidueElem> {
    let f = trim(coeffs.to_vec());
    if f.len() < 2 {
        return Vec::new();
    }
    let field = f[0].field().clone();
    let distinct: Vec<ResidueElem> = if let Some(all) = field.elements() {
        all.into_iter().filter(|x| poly_eval(&f, x).is_zero()).collect()
    } else {
        let mut out = Vec::new();
        split_linear(rational_part(&f), &mut out);
        out
    };
    let mut result = Vec::new();
    for r in distinct {
        for _ in 0..multiplicity(&f, &r) {
            result.push(r.clone());
        }
    }
    result.sort_by(|a, b| (&a.c1, &a.c0).cmp(&(&b.c1, &b.c0)));
    result
}

/// Number of distinct roots in the field.
pub fn count_distinct_roots(coeffs: &[ResidueElem]) -> usize {
    let f = trim(coeffs.to_vec());
    if f.len() < 2 {
        return 0;
    }
    if let Some(all) = f[0].field().elements() {
        return all.iter().filter(|x| poly_eval(&f, x).is_zero()).count();
    }
    rational_part(&f).len() - 1
}

impl ResidueField {
    /// Roots of `a x² + b x + c`.
    pub fn roots_quadratic(
        &self,
        a: &ResidueElem,
        b: &ResidueElem,
        c: &ResidueElem,
    ) -> Vec<ResidueElem> {
        roots(&[c.clone(), b.clone(), a.clone()])
    }

    /// Roots of the monic cubic `x³ + b x² + c x + d`.
    pub fn roots_cubic(
        &self,
        b: &ResidueElem,
        c: &ResidueElem,
        d: &ResidueElem,
    ) -> Vec<ResidueElem> {
        roots(&[d.clone(), c.clone(), b.clone(), self.one()])
    }

    pub fn has_root(&self, coeffs: &[ResidueElem]) -> bool {
        count_distinct_roots(coeffs) > 0
    }
}

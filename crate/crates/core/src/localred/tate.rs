use std::fmt;

use num_traits::ToPrimitive;

use crate::curve::WeierstrassModel;
use crate::exactnum::{Integer, Valuation};
use crate::quadfield::{count_distinct_roots, KPrime, QuadNum, ResidueElem, ResidueField};

use super::LocalError;

/// Kodaira symbol of the special fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => f.write_str("I0"),
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::I0Star => f.write_str("I0*"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

impl std::str::FromStr for Kodaira {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "I0" => Kodaira::I0,
            "II" => Kodaira::II,
            "III" => Kodaira::III,
            "IV" => Kodaira::IV,
            "I0*" => Kodaira::I0Star,
            "IV*" => Kodaira::IVStar,
            "III*" => Kodaira::IIIStar,
            "II*" => Kodaira::IIStar,
            _ => {
                let bad = || format!("unknown Kodaira symbol {s:?}");
                let body = s.strip_prefix('I').ok_or_else(bad)?;
                match body.strip_suffix('*') {
                    Some(n) => Kodaira::IStar(n.parse().map_err(|_| bad())?),
                    None => Kodaira::I(body.parse().map_err(|_| bad())?),
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reduction {
    Good,
    SplitMult,
    NonsplitMult,
    Additive,
}

impl Reduction {
    pub fn as_str(self) -> &'static str {
        match self {
            Reduction::Good => "good",
            Reduction::SplitMult => "split",
            Reduction::NonsplitMult => "nonsplit",
            Reduction::Additive => "additive",
        }
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, Reduction::SplitMult | Reduction::NonsplitMult)
    }
}

/// Output of Tate's algorithm at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub prime: KPrime,
    pub kodaira: Kodaira,
    pub v_delta_min: i64,
    pub c: u32,
    pub reduction: Reduction,
    pub minimal_model: WeierstrassModel,
}

impl LocalData {
    /// Consistency between the fields; `Err` names the first broken rule.
    pub fn check(&self) -> Result<(), String> {
        let ok = match self.reduction {
            Reduction::Good => {
                self.kodaira == Kodaira::I0 && self.v_delta_min == 0 && self.c == 1
            }
            Reduction::SplitMult => {
                self.kodaira == Kodaira::I(self.v_delta_min as u32) && self.c as i64 == self.v_delta_min
            }
            Reduction::NonsplitMult => {
                let expect = if self.v_delta_min % 2 == 0 { 2 } else { 1 };
                self.kodaira == Kodaira::I(self.v_delta_min as u32) && self.c == expect
            }
            Reduction::Additive => self.c <= 4 && self.v_delta_min >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(format!(
                "inconsistent local data at {}: {} {} v(Δ)={} c={}",
                self.prime,
                self.kodaira,
                self.reduction.as_str(),
                self.v_delta_min,
                self.c
            ))
        }
    }
}

/// Residue-field helpers at a fixed prime.
struct Local<'a> {
    v: &'a KPrime,
    pi: QuadNum,
    k: ResidueField,
    p: u64,
}

impl<'a> Local<'a> {
    fn new(v: &'a KPrime) -> Self {
        let p = v.p().to_u64().unwrap_or(u64::MAX);
        Local { v, pi: v.uniformizer(), k: v.residue_field(), p }
    }

    fn val(&self, z: &QuadNum) -> i64 {
        match self.v.val(z) {
            Valuation::Finite(n) => n,
            Valuation::Infinity => i64::MAX,
        }
    }

    fn divides(&self, z: &QuadNum) -> bool {
        self.val(z) > 0
    }

    fn res(&self, z: &QuadNum) -> ResidueElem {
        self.v.residue(z).expect("integral element")
    }

    fn lift(&self, r: &ResidueElem) -> QuadNum {
        self.v.lift(r)
    }

    fn pi_pow(&self, n: i64) -> QuadNum {
        self.pi.pow(n as u32)
    }

    /// `z / πⁿ`.
    fn shift(&self, z: &QuadNum, n: i64) -> QuadNum {
        z / &self.pi_pow(n)
    }

    fn int(&self, n: i64) -> ResidueElem {
        self.k.from_int(n)
    }

    /// Does `a x² + b x + c` have a root in the residue field?
    fn quad_has_root(&self, a: &ResidueElem, b: &ResidueElem, c: &ResidueElem) -> bool {
        if a.is_zero() {
            return !b.is_zero() || c.is_zero();
        }
        count_distinct_roots(&[c.clone(), b.clone(), a.clone()]) > 0
    }
}

fn zero_like(m: &WeierstrassModel) -> QuadNum {
    m.field().zero()
}

/// Tate's algorithm at `v` for a model integral at `v`.
///
/// Works in every residue characteristic. When the model is not minimal
/// the algorithm rescales by the uniformizer and restarts.
pub fn tate(model: &WeierstrassModel, v: &KPrime) -> Result<LocalData, LocalError> {
    if model.field() != v.field() {
        return Err(LocalError::FieldMismatch);
    }
    let disc = model.discriminant();
    if disc.is_zero() {
        return Err(LocalError::Singular);
    }
    for (i, a) in model.coefficients().iter().enumerate() {
        if let Valuation::Finite(n) = v.val(a) {
            if n < 0 {
                return Err(LocalError::NotIntegral { index: [1, 2, 3, 4, 6][i], val: n });
            }
        }
    }
    let l = Local::new(v);
    let restarts = l.val(&disc) / 12 + 1;
    let mut cur = model.clone();
    for _ in 0..=restarts {
        match tate_pass(&l, &cur)? {
            Pass::Done(data) => return Ok(data),
            Pass::NotMinimal(m) => {
                let zero = zero_like(&m);
                cur = m.transform(&l.pi, &zero, &zero, &zero)?;
            }
        }
    }
    Err(LocalError::NoTermination)
}

enum Pass {
    Done(LocalData),
    NotMinimal(WeierstrassModel),
}

fn done(
    l: &Local,
    m: WeierstrassModel,
    kodaira: Kodaira,
    vd: i64,
    c: u32,
    reduction: Reduction,
) -> Result<Pass, LocalError> {
    Ok(Pass::Done(LocalData {
        prime: l.v.clone(),
        kodaira,
        v_delta_min: vd,
        c,
        reduction,
        minimal_model: m,
    }))
}

fn tate_pass(l: &Local, model: &WeierstrassModel) -> Result<Pass, LocalError> {
    let inv = model.invariants();
    let vd = l.val(&inv.disc);
    if vd == 0 {
        return done(l, model.clone(), Kodaira::I0, 0, 1, Reduction::Good);
    }
    let zero = zero_like(model);
    let one = model.field().one();
    let r_ = |z: &QuadNum| l.res(z);

    // Move the singular point of the reduction to (0, 0).
    let (a1, a2, a3, a4, a6) = (r_(&model.a1), r_(&model.a2), r_(&model.a3), r_(&model.a4), r_(&model.a6));
    let (r, t) = match l.p {
        2 => {
            if l.divides(&inv.b2) {
                let r = a4.pth_root();
                let t = r.mul(&r.add(&a2)).add(&a4).mul(&r).add(&a6).pth_root();
                (r, t)
            } else {
                let a1inv = a1.inv().expect("a1 is a unit");
                let r = a3.mul(&a1inv);
                let t = a4.add(&r.square()).mul(&a1inv);
                (r, t)
            }
        }
        3 => {
            let r = if l.divides(&inv.b2) {
                r_(&inv.b6).pth_root().neg()
            } else {
                r_(&inv.b4).neg().mul(&r_(&inv.b2).inv().expect("unit"))
            };
            let t = a1.mul(&r).add(&a3);
            (r, t)
        }
        _ => {
            let twelve_inv = l.int(12).inv().expect("p > 3");
            let r = if l.divides(&inv.c4) {
                r_(&inv.b2).neg().mul(&twelve_inv)
            } else {
                let c4 = r_(&inv.c4);
                let num = r_(&inv.c6).add(&r_(&inv.b2).mul(&c4));
                num.neg().mul(&twelve_inv).mul(&c4.inv().expect("unit"))
            };
            let half = l.int(2).inv().expect("p odd");
            let t = a1.mul(&r).add(&a3).neg().mul(&half);
            (r, t)
        }
    };
    let mut m = model.transform(&one, &l.lift(&r), &zero, &l.lift(&t))?;

    // Multiplicative reduction: the node has tangents T² + a1 T − a2.
    if !l.divides(&m.b2()) {
        let split = l.quad_has_root(&l.int(1), &r_(&m.a1), &r_(&m.a2).neg());
        let (c, red) = if split {
            (vd as u32, Reduction::SplitMult)
        } else if vd % 2 == 0 {
            (2, Reduction::NonsplitMult)
        } else {
            (1, Reduction::NonsplitMult)
        };
        return done(l, m, Kodaira::I(vd as u32), vd, c, red);
    }

    if l.val(&m.a6) < 2 {
        return done(l, m, Kodaira::II, vd, 1, Reduction::Additive);
    }
    if l.val(&m.b8()) < 3 {
        return done(l, m, Kodaira::III, vd, 2, Reduction::Additive);
    }
    if l.val(&m.b6()) < 3 {
        let a3t = r_(&l.shift(&m.a3, 1));
        let a6t = r_(&l.shift(&m.a6, 2));
        let c = if l.quad_has_root(&l.int(1), &a3t, &a6t.neg()) { 3 } else { 1 };
        return done(l, m, Kodaira::IV, vd, c, Reduction::Additive);
    }

    // Arrange π | a1, a2; π² | a3, a4; π³ | a6.
    let (s, t) = match l.p {
        2 => {
            let s = r_(&m.a2).pth_root();
            let t = &l.pi * &l.lift(&r_(&l.shift(&m.a6, 2)).pth_root());
            (l.lift(&s), t)
        }
        3 => (m.a1.clone(), m.a3.clone()),
        _ => {
            let half = l.int(2).inv().expect("p odd");
            let s = r_(&m.a1).neg().mul(&half);
            let t = r_(&m.a3).neg().mul(&half);
            (l.lift(&s), l.lift(&t))
        }
    };
    m = m.transform(&one, &zero, &s, &t)?;

    // Cubic T³ + bT² + cT + d with b = a2/π, c = a4/π², d = a6/π³.
    let b = r_(&l.shift(&m.a2, 1));
    let c = r_(&l.shift(&m.a4, 2));
    let d = r_(&l.shift(&m.a6, 3));
    let w = {
        let t1 = l.int(27).mul(&d.square());
        let t2 = b.square().mul(&c.square());
        let t3 = l.int(4).mul(&b.square().mul(&b)).mul(&d);
        let t4 = l.int(18).mul(&b).mul(&c).mul(&d);
        let t5 = l.int(4).mul(&c.square().mul(&c));
        t1.sub(&t2).add(&t3).sub(&t4).add(&t5)
    };
    let x = l.int(3).mul(&c).sub(&b.square());

    if !w.is_zero() {
        let roots = count_distinct_roots(&[d, c, b, l.k.one()]) as u32;
        return done(l, m, Kodaira::I0Star, vd, 1 + roots, Reduction::Additive);
    }

    if !x.is_zero() {
        // Double root: move it to 0.
        let alpha = match l.p {
            2 => c.pth_root(),
            3 => c.mul(&b.inv().expect("b is a unit")),
            _ => {
                let num = b.mul(&c).sub(&l.int(9).mul(&d));
                num.mul(&l.int(2).mul(&x).inv().expect("unit"))
            }
        };
        let r = &l.pi * &l.lift(&alpha);
        m = m.transform(&one, &r, &zero, &zero)?;
        let (mut ix, mut iy) = (3i64, 3i64);
        let cp = loop {
            if ix + iy > vd + 6 {
                return Err(LocalError::NoTermination);
            }
            // a2t = a2/π, a3t = a3/π^(iy−1), a4t = a4/π^ix, a6t = a6/π^(ix+iy−2)
            let a2t = r_(&l.shift(&m.a2, 1));
            let a3t = r_(&l.shift(&m.a3, iy - 1));
            let a6t = r_(&l.shift(&m.a6, ix + iy - 2));
            let disc_y = a3t.square().add(&l.int(4).mul(&a6t));
            if !disc_y.is_zero() {
                break if l.quad_has_root(&l.int(1), &a3t, &a6t.neg()) { 4 } else { 2 };
            }
            let y0 = if l.p == 2 {
                a6t.pth_root()
            } else {
                a3t.neg().mul(&l.int(2).inv().expect("p odd"))
            };
            let t = &l.pi_pow(iy - 1) * &l.lift(&y0);
            m = m.transform(&one, &zero, &zero, &t)?;
            iy += 1;

            // a2 is unchanged by a y-translation
            let a4t = r_(&l.shift(&m.a4, ix));
            let a6t = r_(&l.shift(&m.a6, ix + iy - 2));
            let disc_x = a4t.square().sub(&l.int(4).mul(&a2t).mul(&a6t));
            if !disc_x.is_zero() {
                break if l.quad_has_root(&a2t, &a4t, &a6t) { 4 } else { 2 };
            }
            let a2inv = a2t.inv().expect("a2/π is a unit");
            let x0 = if l.p == 2 {
                a6t.mul(&a2inv).pth_root()
            } else {
                a4t.neg().mul(&l.int(2).mul(&a2t).inv().expect("unit"))
            };
            let r = &l.pi_pow(ix - 1) * &l.lift(&x0);
            m = m.transform(&one, &r, &zero, &zero)?;
            ix += 1;
        };
        let n = (ix + iy - 5) as u32;
        return done(l, m, Kodaira::IStar(n), vd, cp, Reduction::Additive);
    }

    // Triple root: move it to 0.
    let alpha = match l.p {
        2 => b.clone(),
        3 => d.neg().pth_root(),
        _ => b.neg().mul(&l.int(3).inv().expect("p > 3")),
    };
    let r = &l.pi * &l.lift(&alpha);
    m = m.transform(&one, &r, &zero, &zero)?;
    let x3 = r_(&l.shift(&m.a3, 2));
    let x6 = r_(&l.shift(&m.a6, 4));
    if !x3.square().add(&l.int(4).mul(&x6)).is_zero() {
        let c = if l.quad_has_root(&l.int(1), &x3, &x6.neg()) { 3 } else { 1 };
        return done(l, m, Kodaira::IVStar, vd, c, Reduction::Additive);
    }
    let y0 = if l.p == 2 {
        x6.pth_root()
    } else {
        x3.neg().mul(&l.int(2).inv().expect("p odd"))
    };
    let t = &l.pi_pow(2) * &l.lift(&y0);
    m = m.transform(&one, &zero, &zero, &t)?;
    if l.val(&m.a4) < 4 {
        return done(l, m, Kodaira::IIIStar, vd, 2, Reduction::Additive);
    }
    if l.val(&m.a6) < 6 {
        return done(l, m, Kodaira::IIStar, vd, 1, Reduction::Additive);
    }
    Ok(Pass::NotMinimal(m))
}

/// Scale by `u = p^(−k)` with the least `k ≥ 0` making every coefficient
/// integral at `v`.
pub fn integralize(model: &WeierstrassModel, v: &KPrime) -> Result<WeierstrassModel, LocalError> {
    let e = v.e() as i64;
    let mut k = 0i64;
    for (a, i) in model.coefficients().iter().zip([1i64, 2, 3, 4, 6]) {
        if let Valuation::Finite(n) = v.val(a) {
            if n < 0 {
                // need n + i·k·e ≥ 0
                let step = i * e;
                k = k.max((-n + step - 1) / step);
            }
        }
    }
    if k == 0 {
        return Ok(model.clone());
    }
    let f = model.field();
    let u = f.rational(crate::exactnum::Rational::new(
        Integer::from(1),
        num_traits::pow(v.p().clone(), k as usize),
    ));
    let zero = f.zero();
    Ok(model.transform(&u, &zero, &zero, &zero)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;
    use crate::quadfield::{primes_above, QuadraticField};

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn kodaira(s: &str) -> Kodaira {
        s.parse().unwrap()
    }

    #[test]
    fn kodaira_round_trip() {
        for s in ["I0", "I13", "II", "III", "IV", "I0*", "I4*", "IV*", "III*", "II*"] {
            assert_eq!(kodaira(s).to_string(), s);
        }
        assert!("I".parse::<Kodaira>().is_err());
        assert!("V".parse::<Kodaira>().is_err());
    }

    /// Local data of a curve with rational coefficients at the first prime
    /// of Q(√17) above `p`. 2 and 13 split there; 3, 5 and 11 are inert.
    fn check_over_q(a: [i64; 5], p: i64, expect: (&str, i64, u32)) {
        let field = QuadraticField::new(Integer::from(17)).unwrap();
        let m = WeierstrassModel::from_rationals(&field, a.map(rat));
        let v = primes_above(&field, &Integer::from(p)).unwrap().remove(0);
        let m = integralize(&m, &v).unwrap();
        let ld = tate(&m, &v).unwrap();
        assert_eq!(
            (ld.kodaira.to_string().as_str(), ld.v_delta_min, ld.c),
            expect,
            "{a:?} at {p}"
        );
        ld.check().unwrap();
    }

    #[test]
    fn textbook_curves() {
        // y² + y = x³ − x² − 10x − 20: split I5 at 11, stays split over F_121
        check_over_q([0, -1, 1, -10, -20], 11, ("I5", 5, 5));
        // y² = x³ − x: III at 2
        check_over_q([0, 0, 0, -1, 0], 2, ("III", 6, 2));
        // y² = x³ + 1: IV at 2, III at 3
        check_over_q([0, 0, 0, 0, 1], 2, ("IV", 4, 3));
        check_over_q([0, 0, 0, 0, 1], 3, ("III", 3, 2));
        // y² = x³ + 3⁶ is y² = x³ + 1 after x ↦ 9x, y ↦ 27y
        check_over_q([0, 0, 0, 0, 729], 3, ("III", 3, 2));
    }

    #[test]
    fn every_additive_type_at_13() {
        let p13 = |e: u32| 13i64.pow(e);
        // y² = x³ + 13ᵏ runs through II, IV, IV*, II*; the residue 1 is a square
        check_over_q([0, 0, 0, 0, p13(1)], 13, ("II", 2, 1));
        check_over_q([0, 0, 0, 0, p13(2)], 13, ("IV", 4, 3));
        check_over_q([0, 0, 0, 0, p13(4)], 13, ("IV*", 8, 3));
        check_over_q([0, 0, 0, 0, p13(5)], 13, ("II*", 10, 1));
        // y² = x³ + 13ᵏx gives III and III*
        check_over_q([0, 0, 0, p13(1), 0], 13, ("III", 3, 2));
        check_over_q([0, 0, 0, p13(3), 0], 13, ("III*", 9, 2));
        // y² = x³ − 13²x = x(x − 13)(x + 13): I0* with three rational roots
        check_over_q([0, 0, 0, -p13(2), 0], 13, ("I0*", 6, 4));
        // y² = x(x − 13)(x − 13³) = x³ − (13 + 13³)x² + 13⁴x: I4*, split
        check_over_q([0, -(p13(1) + p13(3)), 0, p13(4), 0], 13, ("I4*", 10, 4));
        // y² = x³ + 13⁶ is not minimal: scaling restores y² = x³ + 1
        check_over_q([0, 0, 0, 0, p13(6)], 13, ("I0", 0, 1));
    }

    #[test]
    fn errors() {
        let field = QuadraticField::new(Integer::from(17)).unwrap();
        let v = primes_above(&field, &Integer::from(2)).unwrap().remove(0);
        let sing = WeierstrassModel::from_rationals(&field, [0, 0, 0, 0, 0].map(rat));
        assert_eq!(tate(&sing, &v), Err(LocalError::Singular));
        let frac = WeierstrassModel::from_rationals(
            &field,
            [rat(0), rat(0), rat(0), rat(0), Rational::new(1.into(), 2.into())],
        );
        assert_eq!(tate(&frac, &v), Err(LocalError::NotIntegral { index: 6, val: -1 }));
        let fixed = integralize(&frac, &v).unwrap();
        assert!(tate(&fixed, &v).is_ok());
    }
}

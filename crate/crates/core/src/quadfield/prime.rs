use std::fmt;
use std::sync::{Arc, RwLock};

use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::{FieldError, QuadNum, QuadraticField, ResidueElem, ResidueField};
use crate::exactnum::{
    is_prime, kronecker, mod_inverse, sqrt_mod_prime_power, vp, vp_int, Integer, Rational,
    Valuation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

impl PrimeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PrimeKind::Split => "split",
            PrimeKind::Inert => "inert",
            PrimeKind::Ramified => "ramified",
        }
    }
}

/// Which of the two primes above a split `p`. `Canonical` is the one where
/// `√d` maps to the canonical p-adic root of `d`, `Conjugate` maps it to the
/// negated root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Canonical,
    Conjugate,
}

impl Branch {
    pub fn flip(self) -> Branch {
        match self {
            Branch::Canonical => Branch::Conjugate,
            Branch::Conjugate => Branch::Canonical,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Branch::Canonical => 0,
            Branch::Conjugate => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Canonical => "canonical",
            Branch::Conjugate => "conjugate",
        }
    }
}

/// The p-adic square root of `d` at a split prime, cached to the highest
/// precision requested so far. Shared by both branches above `p`.
///
/// Readers that find the cache too short compute a longer root and publish
/// it; since every precision reduces the same canonical root, any reader sees
/// a consistent (if shorter) value.
struct SplitRoot {
    d: Integer,
    p: Integer,
    cache: RwLock<(u32, Integer)>,
}

impl SplitRoot {
    fn new(d: Integer, p: Integer) -> Self {
        let root = sqrt_mod_prime_power(&d, &p, 8).expect("d is a square at a split prime");
        SplitRoot { d, p, cache: RwLock::new((8, root)) }
    }

    /// `α mod p^k` where `α² = d` in `Z_p`.
    fn root_mod(&self, k: u32) -> Integer {
        let modulus = num_traits::pow(self.p.clone(), k as usize);
        {
            let cache = self.cache.read().unwrap_or_else(|e| e.into_inner());
            if cache.0 >= k {
                return cache.1.mod_floor(&modulus);
            }
        }
        let target = k.max(2 * self.cache.read().map(|c| c.0).unwrap_or(8));
        let root = sqrt_mod_prime_power(&self.d, &self.p, target).expect("root exists");
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        if cache.0 < target {
            *cache = (target, root.clone());
        }
        root.mod_floor(&modulus)
    }
}

/// A prime of `K` lying over the rational prime `p`.
#[derive(Clone)]
pub struct KPrime {
    field: QuadraticField,
    p: Integer,
    kind: PrimeKind,
    branch: Option<Branch>,
    root: Option<Arc<SplitRoot>>,
}

impl PartialEq for KPrime {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.p == other.p
            && self.kind == other.kind
            && self.branch == other.branch
    }
}

impl Eq for KPrime {}

impl fmt::Debug for KPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for KPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.branch {
            Some(b) => write!(f, "{}[{}] over {} in {}", self.kind.as_str(), b.index(), self.p, self.field),
            None => write!(f, "{} over {} in {}", self.kind.as_str(), self.p, self.field),
        }
    }
}

/// The primes of `K` above the rational prime `p`: two split primes
/// (canonical branch first), one inert prime, or one ramified prime.
pub fn primes_above(field: &QuadraticField, p: &Integer) -> Result<Vec<KPrime>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p.clone()));
    }
    let d = field.d();
    let kind = if *p == Integer::from(2) {
        match d.mod_floor(&Integer::from(8)).to_string().as_str() {
            "1" => PrimeKind::Split,
            "5" => PrimeKind::Inert,
            _ => PrimeKind::Ramified,
        }
    } else if d.mod_floor(p).is_zero() {
        PrimeKind::Ramified
    } else if kronecker(d, p) == 1 {
        PrimeKind::Split
    } else {
        PrimeKind::Inert
    };
    let base = KPrime { field: field.clone(), p: p.clone(), kind, branch: None, root: None };
    Ok(match kind {
        PrimeKind::Split => {
            let root = Arc::new(SplitRoot::new(d.clone(), p.clone()));
            [Branch::Canonical, Branch::Conjugate]
                .into_iter()
                .map(|b| KPrime { branch: Some(b), root: Some(root.clone()), ..base.clone() })
                .collect()
        }
        _ => vec![base],
    })
}

impl KPrime {
    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    pub fn p(&self) -> &Integer {
        &self.p
    }

    pub fn kind(&self) -> PrimeKind {
        self.kind
    }

    pub fn branch(&self) -> Option<Branch> {
        self.branch
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        if self.kind == PrimeKind::Ramified {
            2
        } else {
            1
        }
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        if self.kind == PrimeKind::Inert {
            2
        } else {
            1
        }
    }

    /// The other prime above `p` for split primes; itself otherwise.
    pub fn conjugate(&self) -> KPrime {
        KPrime { branch: self.branch.map(Branch::flip), ..self.clone() }
    }

    /// An element of valuation exactly 1.
    pub fn uniformizer(&self) -> QuadNum {
        match self.kind {
            PrimeKind::Split | PrimeKind::Inert => self.field.int(self.p.clone()),
            PrimeKind::Ramified => {
                let d = self.field.d();
                if self.p == Integer::from(2) && d.mod_floor(&Integer::from(4)) == Integer::from(3) {
                    &self.field.one() + &self.field.sqrt_d()
                } else {
                    self.field.sqrt_d()
                }
            }
        }
    }

    /// Image of `z` under the branch embedding: `(X ± Y√d)` with the sign
    /// chosen by the branch.
    fn branch_parts(&self, z: &QuadNum) -> (Integer, Integer, Integer) {
        let (x, y, den) = z.integral_parts();
        match self.branch {
            Some(Branch::Conjugate) => (x, -y, den),
            _ => (x, y, den),
        }
    }

    /// Normalized valuation (`val(uniformizer) = 1`, `val(p) = e`).
    pub fn val(&self, z: &QuadNum) -> Valuation {
        if z.is_zero() {
            return Valuation::Infinity;
        }
        match self.kind {
            PrimeKind::Inert => Valuation::Finite(vp(&z.norm(), &self.p).unwrap() / 2),
            PrimeKind::Ramified => vp(&z.norm(), &self.p),
            PrimeKind::Split => {
                let (x, y, den) = self.branch_parts(z);
                let root = self.root.as_ref().expect("split prime carries its root");
                let mut k = 8;
                loop {
                    let modulus = num_traits::pow(self.p.clone(), k as usize);
                    let w = (&x + &y * root.root_mod(k)).mod_floor(&modulus);
                    if !w.is_zero() {
                        return Valuation::Finite(
                            vp_int(&w, &self.p) as i64 - vp_int(&den, &self.p) as i64,
                        );
                    }
                    k *= 2;
                }
            }
        }
    }

    pub fn val_rational(&self, q: &Rational) -> Valuation {
        match vp(q, &self.p) {
            Valuation::Finite(v) => Valuation::Finite(v * self.e() as i64),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    pub fn residue_field(&self) -> ResidueField {
        match self.kind {
            PrimeKind::Inert if self.p == Integer::from(2) => {
                ResidueField::quadratic(self.p.clone(), Integer::one(), Integer::one())
            }
            PrimeKind::Inert => {
                ResidueField::quadratic(self.p.clone(), self.field.d().clone(), Integer::zero())
            }
            _ => ResidueField::prime(self.p.clone()),
        }
    }

    /// Reduction of a `v`-integral element into the residue field.
    ///
    /// Inert primes use the basis `{1, ω}` with `ω = √d`, except over 2
    /// where `ω = (1+√d)/2`.
    pub fn residue(&self, z: &QuadNum) -> Result<ResidueElem, FieldError> {
        let v = self.val(z);
        if let Valuation::Finite(n) = v {
            if n < 0 {
                return Err(FieldError::NegativeValuation(n));
            }
        }
        let k = self.residue_field();
        let p = &self.p;
        let rat = |q: &Rational| k.from_rational(q).expect("p-integral coordinate");
        Ok(match self.kind {
            PrimeKind::Split => {
                let (x, y, den) = self.branch_parts(z);
                let n = vp_int(&den, p);
                let root = self.root.as_ref().expect("split prime carries its root");
                let modulus = num_traits::pow(p.clone(), (n + 1) as usize);
                let w = (&x + &y * root.root_mod(n + 1)).mod_floor(&modulus);
                let pn = num_traits::pow(p.clone(), n as usize);
                debug_assert!(w.mod_floor(&pn).is_zero());
                let unit_den = &den / &pn;
                let inv = mod_inverse(&unit_den, p).expect("unit denominator");
                k.from_int((w / pn) * inv)
            }
            PrimeKind::Inert if *p == Integer::from(2) => {
                // x + y√d = (x − y) + 2y·ω
                let c0 = &z.x - &z.y;
                let c1 = &z.y * Rational::from_integer(Integer::from(2));
                rat(&c0).add(&rat(&c1).mul(&k.omega()))
            }
            PrimeKind::Inert => rat(&z.x).add(&rat(&z.y).mul(&k.omega())),
            PrimeKind::Ramified => {
                if *p == Integer::from(2) && self.field.d().mod_floor(&Integer::from(4)) == Integer::from(3) {
                    // √d ≡ 1 mod (1 + √d)
                    rat(&(&z.x + &z.y))
                } else {
                    rat(&z.x)
                }
            }
        })
    }

    /// An integral element of `K` reducing to `r`.
    pub fn lift(&self, r: &ResidueElem) -> QuadNum {
        let (c0, c1) = r.coords();
        let c0 = self.field.int(c0.clone());
        match self.kind {
            PrimeKind::Inert if self.p == Integer::from(2) => {
                let omega = self.field.element(
                    Rational::new(1.into(), 2.into()),
                    Rational::new(1.into(), 2.into()),
                );
                &c0 + &(&self.field.int(c1.clone()) * &omega)
            }
            PrimeKind::Inert => &c0 + &(&self.field.int(c1.clone()) * &self.field.sqrt_d()),
            _ => c0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(d: i64) -> QuadraticField {
        QuadraticField::new(Integer::from(d)).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(Integer::from(n))
    }

    #[test]
    fn splitting_examples() {
        let k = field(17);
        let two = primes_above(&k, &Integer::from(2)).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|v| v.kind() == PrimeKind::Split));
        assert_eq!(two[0].branch(), Some(Branch::Canonical));
        let five = primes_above(&k, &Integer::from(5)).unwrap();
        assert_eq!(five.len(), 1);
        assert_eq!(five[0].kind(), PrimeKind::Inert);
        let k26 = field(26);
        let thirteen = primes_above(&k26, &Integer::from(13)).unwrap();
        assert_eq!(thirteen[0].kind(), PrimeKind::Ramified);
        assert_eq!(primes_above(&k, &Integer::from(15)), Err(FieldError::NotPrime(15.into())));
        // p = 2 rules by d mod 8
        assert_eq!(primes_above(&field(5), &2.into()).unwrap()[0].kind(), PrimeKind::Inert);
        assert_eq!(primes_above(&field(3), &2.into()).unwrap()[0].kind(), PrimeKind::Ramified);
        assert_eq!(primes_above(&field(6), &2.into()).unwrap()[0].kind(), PrimeKind::Ramified);
    }

    #[test]
    fn valuation_examples() {
        let k = field(17);
        let u = k.element(q(4), q(1));
        for v in primes_above(&k, &2.into()).unwrap() {
            assert_eq!(v.val(&u), Valuation::Finite(0));
            assert_eq!(v.val(&k.int(2)), Valuation::Finite(1));
            assert_eq!(v.val(&v.uniformizer()), Valuation::Finite(1));
        }
        let five = &primes_above(&k, &5.into()).unwrap()[0];
        assert_eq!(five.val(&k.int(5)), Valuation::Finite(1));
        assert_eq!(five.val(&k.zero()), Valuation::Infinity);
        let k26 = field(26);
        let r = &primes_above(&k26, &13.into()).unwrap()[0];
        assert_eq!(r.val(&k26.sqrt_d()), Valuation::Finite(1));
        assert_eq!(r.uniformizer(), k26.sqrt_d());
        assert_eq!(r.val(&k26.int(13)), Valuation::Finite(2));
        let k3 = field(3);
        let r2 = &primes_above(&k3, &2.into()).unwrap()[0];
        assert_eq!(r2.val(&r2.uniformizer()), Valuation::Finite(1));
        // 1 - √17 = 2 · (1-√17)/2 and (1-√17)/2 has norm -4: the valuations
        // at the two primes over 2 are 3 and 1 in some order
        let z = k.element(q(1), q(-1));
        let vals: Vec<i64> =
            primes_above(&k, &2.into()).unwrap().iter().map(|v| v.val(&z).unwrap()).collect();
        let mut sorted = vals.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 3]);
    }

    #[test]
    fn residue_examples() {
        let k = field(17);
        let canon = &primes_above(&k, &2.into()).unwrap()[0];
        assert!(canon.residue(&k.sqrt_d()).unwrap().is_one());
        let k26 = field(26);
        let r = &primes_above(&k26, &13.into()).unwrap()[0];
        assert!(r.residue(&k26.int(13)).unwrap().is_zero());
        let inert = &primes_above(&k, &5.into()).unwrap()[0];
        assert_eq!(inert.residue(&k.sqrt_d()).unwrap(), inert.residue_field().omega());
        assert!(matches!(
            canon.residue(&k.element(Rational::new(1.into(), 2.into()), q(0))),
            Err(FieldError::NegativeValuation(-1))
        ));
        // (1 + √17)/2 is integral at both primes over 2 though it has a
        // denominator
        let half = k.element(Rational::new(1.into(), 2.into()), Rational::new(1.into(), 2.into()));
        for v in primes_above(&k, &2.into()).unwrap() {
            assert!(v.residue(&half).is_ok());
        }
        let k5 = field(5);
        let inert2 = &primes_above(&k5, &2.into()).unwrap()[0];
        let omega = k5.element(Rational::new(1.into(), 2.into()), Rational::new(1.into(), 2.into()));
        assert_eq!(inert2.residue(&omega).unwrap(), inert2.residue_field().omega());
    }

    #[test]
    fn conjugate_is_an_involution() {
        let k = field(17);
        for p in [2, 3, 5, 13, 19] {
            for v in primes_above(&k, &p.into()).unwrap() {
                assert_eq!(v.conjugate().conjugate(), v);
            }
        }
    }

    #[test]
    fn sum_of_ef_is_two() {
        for d in [-5, -1, 2, 3, 5, 6, 13, 17, 26, 33, 313] {
            let k = field(d);
            for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 313] {
                let ps = primes_above(&k, &p.into()).unwrap();
                let total: u32 = ps.iter().map(|v| v.e() * v.f()).sum();
                assert_eq!(total, 2, "d={d} p={p}");
            }
        }
    }

    fn elem(k: &QuadraticField, a: i64, b: i64, c: i64, e: i64) -> QuadNum {
        k.element(Rational::new(a.into(), b.into()), Rational::new(c.into(), e.into()))
    }

    proptest! {
        #[test]
        fn valuation_laws(a in -300i64..300, b in 1i64..64, c in -300i64..300, e in 1i64..64,
                          f in -300i64..300, g in 1i64..64, h in -300i64..300, i in 1i64..64,
                          di in 0usize..6, pi in 0usize..5) {
            let d = [17i64, 5, 3, 26, 13, -7][di];
            let p = [2i64, 3, 5, 13, 7][pi];
            let k = field(d);
            let z = elem(&k, a, b, c, e);
            let w = elem(&k, f, g, h, i);
            prop_assume!(!z.is_zero() && !w.is_zero());
            for v in primes_above(&k, &p.into()).unwrap() {
                prop_assert_eq!(v.val(&(&z * &w)), v.val(&z) + v.val(&w));
                let (vz, vw) = (v.val(&z), v.val(&w));
                let sum = &z + &w;
                prop_assert!(v.val(&sum) >= vz.min(vw));
                if vz != vw {
                    prop_assert_eq!(v.val(&sum), vz.min(vw));
                }
                prop_assert_eq!(v.val(&z.conj()), v.conjugate().val(&z));
                if v.kind() == PrimeKind::Split {
                    let total = v.val(&z) + v.conjugate().val(&z);
                    prop_assert_eq!(total, vp(&z.norm(), v.p()));
                }
                if v.val(&z).at_least(0) && v.val(&w).at_least(0) {
                    let rz = v.residue(&z).unwrap();
                    let rw = v.residue(&w).unwrap();
                    prop_assert_eq!(v.residue(&(&z * &w)).unwrap(), rz.mul(&rw));
                    prop_assert_eq!(v.residue(&(&z + &w)).unwrap(), rz.add(&rw));
                    prop_assert_eq!(v.residue(&v.lift(&rz)).unwrap(), rz);
                }
            }
        }
    }
}

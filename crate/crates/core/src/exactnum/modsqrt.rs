use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::{kronecker, mod_inverse, vp_int, Integer, NumError};

/// Square root of `d` modulo an odd prime `p` (Tonelli–Shanks), returning the
/// smaller of the two roots.
pub fn sqrt_mod_prime(d: &Integer, p: &Integer) -> Result<Integer, NumError> {
    let no_root = || NumError::NoSquareRoot { d: d.clone(), p: p.clone(), k: 1 };
    let a = d.mod_floor(p);
    if a.is_zero() {
        return Ok(Integer::zero());
    }
    if *p == Integer::from(2) {
        return Ok(a);
    }
    if kronecker(&a, p) != 1 {
        return Err(no_root());
    }
    let one = Integer::one();
    let p_minus_1 = p - &one;
    let s = p_minus_1.trailing_zeros().unwrap_or(0);
    let q = &p_minus_1 >> s;
    let mut z = Integer::from(2);
    while kronecker(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(Integer::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    let other = p - &r;
    Ok(if other < r { other } else { r })
}

/// A square root of `d` modulo `pᵏ`.
///
/// For `p ∤ d` the answer is the reduction of a fixed p-adic square root: for
/// odd `p` the one whose residue mod `p` is smaller, for `p = 2` the one that is
/// `1 mod 4`. Results at different `k` are therefore compatible:
/// `sqrt_mod_prime_power(d, p, k+1) ≡ sqrt_mod_prime_power(d, p, k) (mod pᵏ)`.
///
/// When `p | d` the valuation must be even (or at least `k`) and the root is
/// `p^(v/2)` times the canonical root of the unit part.
pub fn sqrt_mod_prime_power(d: &Integer, p: &Integer, k: u32) -> Result<Integer, NumError> {
    let no_root = || NumError::NoSquareRoot { d: d.clone(), p: p.clone(), k };
    let modulus = num_traits::pow(p.clone(), k as usize);
    let r = d.mod_floor(&modulus);
    if r.is_zero() {
        return Ok(Integer::zero());
    }
    let v = vp_int(&r, p);
    if v % 2 == 1 {
        return Err(no_root());
    }
    let unit = d / num_traits::pow(p.clone(), v as usize);
    let beta = unit_sqrt(&unit, p, k - v).map_err(|_| no_root())?;
    Ok((beta * num_traits::pow(p.clone(), (v / 2) as usize)).mod_floor(&modulus))
}

fn unit_sqrt(d: &Integer, p: &Integer, k: u32) -> Result<Integer, NumError> {
    let modulus = num_traits::pow(p.clone(), k as usize);
    if *p == Integer::from(2) {
        return two_adic_sqrt(d, k).map(|x| x.mod_floor(&modulus));
    }
    let mut x = sqrt_mod_prime(d, p)?;
    // Newton: precision doubles each step.
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = num_traits::pow(p.clone(), prec as usize);
        let fx = (&x * &x - d).mod_floor(&m);
        let inv = mod_inverse(&(Integer::from(2) * &x), &m).expect("2x is a unit");
        x = (&x - fx * inv).mod_floor(&m);
    }
    Ok(x.mod_floor(&modulus))
}

/// The 2-adic root `≡ 1 (mod 4)` of an odd `d`, reduced mod `2ᵏ`.
///
/// Newton's step divides by `2x ≡ 0 (mod 2)`, so instead each step fixes one
/// bit: from `x² ≡ d (mod 2ʲ)` either `x` or `x + 2^(j-1)` squares to `d` mod
/// `2^(j+1)`.
fn two_adic_sqrt(d: &Integer, k: u32) -> Result<Integer, NumError> {
    let err = || NumError::NoSquareRoot { d: d.clone(), p: Integer::from(2), k };
    let m8 = d.mod_floor(&Integer::from(8));
    match k {
        0 => return Ok(Integer::zero()),
        1 => return Ok(Integer::one()),
        2 => {
            return if d.mod_floor(&Integer::from(4)).is_one() {
                Ok(Integer::one())
            } else {
                Err(err())
            }
        }
        _ => {}
    }
    if !m8.is_one() {
        return Err(err());
    }
    let mut x = Integer::one();
    for j in 3..=k {
        let m = Integer::one() << (j + 1);
        if !(&x * &x - d).mod_floor(&m).is_zero() {
            x += Integer::one() << (j - 1);
        }
    }
    Ok(x)
}

use std::sync::OnceLock;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Integer, NumError};

const TRIAL_LIMIT: u32 = 1_000_000;

/// Below this bound the fixed base set 2..=41 makes Miller–Rabin exact.
const DETERMINISTIC_MR_BOUND: &str = "3317044064679887385961981";

/// Effort limit for the Pollard rho stage (total iterations across all
/// composite pieces of one factorization).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_iterations: u64,
}

impl FactorBudget {
    pub fn new(rho_iterations: u64) -> Self {
        FactorBudget { rho_iterations }
    }
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { rho_iterations: 2_000_000 }
    }
}

/// `sign · ∏ pᵉ · cofactor`, primes strictly increasing.
///
/// `cofactor` holds whatever the budget could not split; it is always > 1
/// and composite or of unknown status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(Integer, u32)>,
    pub cofactor: Option<Integer>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    /// Multiplies everything back together.
    pub fn value(&self) -> Integer {
        let mut v = Integer::from(self.sign);
        for (p, e) in &self.factors {
            v *= num_traits::pow(p.clone(), *e as usize);
        }
        if let Some(c) = &self.cofactor {
            v *= c;
        }
        v
    }

    pub fn primes(&self) -> impl Iterator<Item = &Integer> {
        self.factors.iter().map(|(p, _)| p)
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Miller–Rabin. Exact below 3.3·10²⁴; 64 extra pseudo-random rounds above.
pub fn is_prime(n: &Integer) -> bool {
    let n = n.abs();
    if n < Integer::from(2) {
        return false;
    }
    if let Some(small) = n.to_u32() {
        if small <= TRIAL_LIMIT {
            return small_primes().binary_search(&small).is_ok();
        }
    }
    for &p in &small_primes()[..50] {
        if (&n % p).is_zero() {
            return false;
        }
    }
    let one = Integer::one();
    let n_minus_1 = &n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let witness = |a: &Integer| -> bool {
        let mut x = a.modpow(&d, &n);
        if x.is_one() || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = (&x * &x) % &n;
            if x == n_minus_1 {
                return false;
            }
            if x.is_one() {
                return true;
            }
        }
        true
    };
    for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        if witness(&Integer::from(a)) {
            return false;
        }
    }
    let bound: Integer = DETERMINISTIC_MR_BOUND.parse().unwrap();
    if n < bound {
        return true;
    }
    // Bases drawn from a fixed-seed generator so results are reproducible.
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ n.bits();
    let range = &n - Integer::from(3);
    for _ in 0..64 {
        let mut acc = Integer::zero();
        for _ in 0..(n.bits() / 64 + 2) {
            state = splitmix(state);
            acc = (acc << 64) + Integer::from(state);
        }
        let a = acc.mod_floor(&range) + Integer::from(2);
        if witness(&a) {
            return false;
        }
    }
    true
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Factors `n` by trial division up to 10⁶, perfect-power detection and
/// Brent's variant of Pollard rho. Whatever the rho budget cannot split is
/// returned as `cofactor`.
pub fn factor(n: &Integer, budget: FactorBudget) -> Result<Factorization, NumError> {
    if n.is_zero() {
        return Err(NumError::Zero);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut found: Vec<(Integer, u32)> = Vec::new();

    for &p in small_primes() {
        let pp = u64::from(p) * u64::from(p);
        if Integer::from(pp) > m {
            break;
        }
        if (&m % p).is_zero() {
            let mut e = 0;
            while (&m % p).is_zero() {
                m /= p;
                e += 1;
            }
            found.push((Integer::from(p), e));
        }
    }

    let mut cofactor = Integer::one();
    if !m.is_one() {
        let limit = Integer::from(u64::from(TRIAL_LIMIT) * u64::from(TRIAL_LIMIT));
        if m < limit {
            found.push((m, 1));
        } else {
            let mut remaining = budget.rho_iterations;
            let mut stack = vec![(m, 1u32)];
            while let Some((c, mult)) = stack.pop() {
                if c.is_one() {
                    continue;
                }
                if is_prime(&c) {
                    found.push((c, mult));
                    continue;
                }
                if let Some((root, k)) = perfect_power(&c) {
                    stack.push((root, mult * k));
                    continue;
                }
                match pollard_brent(&c, &mut remaining) {
                    Some(f) => {
                        let g = &c / &f;
                        stack.push((f, mult));
                        stack.push((g, mult));
                    }
                    None => cofactor *= num_traits::pow(c, mult as usize),
                }
            }
        }
    }

    found.sort();
    let mut factors: Vec<(Integer, u32)> = Vec::with_capacity(found.len());
    for (p, e) in found {
        match factors.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => factors.push((p, e)),
        }
    }
    Ok(Factorization {
        sign,
        factors,
        cofactor: if cofactor.is_one() { None } else { Some(cofactor) },
    })
}

/// `n = root^k` with `k ≥ 2` maximal over prime exponents tried, if any.
fn perfect_power(n: &Integer) -> Option<(Integer, u32)> {
    let bits = n.bits() as u32;
    for k in 2..=bits {
        let r = n.nth_root(k);
        if r < Integer::from(2) {
            break;
        }
        if num_traits::pow(r.clone(), k as usize) == *n {
            return Some((r, k));
        }
    }
    None
}

/// Brent's cycle-finding rho. Returns a nontrivial factor of composite `n`.
fn pollard_brent(n: &Integer, remaining: &mut u64) -> Option<Integer> {
    if n.is_even() {
        return Some(Integer::from(2));
    }
    let one = Integer::one();
    let mut c = Integer::one();
    while *remaining > 0 {
        let f = |x: &Integer| (x * x + &c) % n;
        let mut y = Integer::from(2);
        let mut r: u64 = 1;
        let mut q = Integer::one();
        let batch = 128u64;
        let (x, mut ys, mut g) = 'search: loop {
            let x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            loop {
                let ys = y.clone();
                let steps = batch.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                *remaining = remaining.saturating_sub(steps);
                let g = q.gcd(n);
                k += steps;
                if !g.is_one() || *remaining == 0 {
                    break 'search (x, ys, g);
                }
                if k >= r {
                    break;
                }
            }
            r *= 2;
        };
        if g == *n {
            // Batched product overshot; back up one step at a time.
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
        if g.is_one() && *remaining == 0 {
            return None;
        }
        c += &one;
    }
    None
}

//! Integer utilities: factorization, totient, divisor counts, modular
//! inverses and the safe-prime-power classification used for the family
//! bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1 << 20;

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, multiplicity)`, primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial division up to 2^20; any cofactor left over is checked with
/// Miller-Rabin and, below 2^40, is necessarily prime.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while (*m).is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut m);
    let mut d = 3;
    while d <= TRIAL_LIMIT && d * d <= m {
        push(d, &mut m);
        d += 2;
    }
    if m > 1 {
        if is_prime(m) {
            factors.push((m, 1));
        } else {
            // Only reachable above 2^40; fall back to finishing trial division.
            let mut d = TRIAL_LIMIT | 1;
            while d * d <= m {
                let mut e = 0;
                while m.is_multiple_of(d) {
                    m /= d;
                    e += 1;
                }
                if e > 0 {
                    factors.push((d, e));
                }
                d += 2;
            }
            if m > 1 {
                factors.push((m, 1));
            }
        }
    }
    Factorization { n, factors }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).factors.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn tau(n: u64) -> u64 {
    factorize(n).factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// The unique `x` in `[1, m-1]` with `a*x ≡ 1 (mod m)`. Negative `a` is
/// reduced first.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::Invalid(format!("modulus {m} must be at least 2")));
    }
    let a_red = a.rem_euclid(m as i64) as i128;
    let (mut old_r, mut r) = (a_red, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Integer `k`-th root, rounded down.
fn iroot(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut x = (n as f64).powf(1.0 / k as f64).round() as u64;
    // correct the floating estimate in both directions
    while x > 0 && x.checked_pow(k).is_none_or(|v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_pow(k).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

/// `Some((p, w))` with `q = p^w` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let max_w = 63 - q.leading_zeros();
    for w in (1..=max_w.max(1)).rev() {
        let p = iroot(q, w);
        if p >= 2 && p.pow(w) == q && is_prime(p) {
            return Some((p, w));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SafeKind {
    SafePrime,
    MersenneEven,
    StrictSafePower3,
    NotSafe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafeClass {
    pub q: u64,
    pub kind: SafeKind,
    /// Smallest prime divisor of `(q-1)/2` (odd `q`) or of `q-1` (even `q`).
    pub t: u64,
}

impl SafeClass {
    pub fn is_safe(&self) -> bool {
        self.kind != SafeKind::NotSafe
    }
}

pub fn classify_safe(q: u64) -> Result<SafeClass> {
    if q < 4 {
        return Err(Error::Invalid(format!("q = {q} must be at least 4")));
    }
    let (p, w) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let base = if q % 2 == 1 { (q - 1) / 2 } else { q - 1 };
    let t = factorize(base).smallest_prime().expect("base >= 2 for q >= 4");
    let kind = if t != base {
        SafeKind::NotSafe
    } else if q.is_multiple_of(2) {
        SafeKind::MersenneEven
    } else if w == 1 {
        SafeKind::SafePrime
    } else {
        // (p^w - 1)/2 prime with w > 1 forces p = 3
        debug_assert_eq!(p, 3);
        SafeKind::StrictSafePower3
    };
    Ok(SafeClass { q, kind, t })
}

/// Ascending list of all safe prime powers `4 <= q <= qmax`.
pub fn safe_list(qmax: u64) -> Vec<u64> {
    prime_powers(4, qmax)
        .into_iter()
        .filter(|&q| classify_safe(q).is_ok_and(|c| c.is_safe()))
        .collect()
}

/// Ascending prime powers in `[lo, hi]`.
pub fn prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&q| prime_power(q).is_some()).collect()
}

//! Arithmetic in GF(p^w).
//!
//! Elements are stored by their base-`p` encoding `Σ c_i p^i` of the
//! coefficient vector modulo a canonical irreducible polynomial: the monic
//! irreducible of degree `w` whose own encoding is smallest. The canonical
//! generator is the primitive element of smallest encoding. Multiplication
//! goes through full discrete-log tables built at construction time.
//!
//! Published Conway polynomials may differ from the canonical modulus chosen
//! here, so encodings are only comparable between fields built by this module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{self, gcd, is_prime};

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_FIELD_LIMIT: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// Base-`p` encoding of a field element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn enc(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Wraps an encoding read from a field's own tables.
    pub(crate) fn from_raw(enc: u32) -> FieldElement {
        FieldElement(enc)
    }
}

/// Serializable description of a constructed field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub p: u32,
    pub w: u32,
    /// Ascending degree, including the leading 1.
    pub modulus_coeffs: Vec<u32>,
    pub generator_enc: u32,
}

#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    w: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    /// `log[enc]` for nonzero `enc`; `NO_LOG` at 0.
    log: Vec<u32>,
    /// `exp[k] = g^k` for `0 <= k < 2(q-1)`, doubled so products need no reduction.
    exp: Vec<u32>,
    place: Vec<u32>,
}

// Dense polynomials over GF(p): ascending coefficient vectors.
mod poly {
    pub(super) fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub(super) fn inv_mod(a: u32, p: u32) -> u32 {
        crate::numtheory::pow_mod(a as u64, p as u64 - 2, p as u64) as u32
    }

    /// `a mod f` for monic `f`.
    pub(super) fn rem(mut a: Vec<u32>, f: &[u32], p: u32) -> Vec<u32> {
        let df = f.len() - 1;
        trim(&mut a);
        let lead_inv = inv_mod(f[df], p) as u64;
        while a.len() > df {
            let top = a.len() - 1;
            let c = a[top] as u64 * lead_inv % p as u64;
            if c != 0 {
                let shift = top - df;
                for (i, &fi) in f.iter().enumerate() {
                    let sub = c * fi as u64 % p as u64;
                    a[shift + i] = ((a[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
            trim(&mut a);
        }
        a
    }

    pub(super) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut v);
        v
    }

    pub(super) fn mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        rem(mul(a, b, p), f, p)
    }

    pub(super) fn pow_mod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base.to_vec(), f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, f, p);
            }
            b = mul_mod(&b, &b, f, p);
            e >>= 1;
        }
        rem(acc, f, p)
    }

    pub(super) fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut v: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut v);
        v
    }

    /// Monic gcd.
    pub(super) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(a, &monic(&b, p), p);
            a = b;
            b = r;
        }
        monic(&a, p)
    }

    pub(super) fn monic(a: &[u32], p: u32) -> Vec<u32> {
        match a.last() {
            None => Vec::new(),
            Some(&lead) => {
                let inv = inv_mod(lead, p) as u64;
                a.iter().map(|&c| (c as u64 * inv % p as u64) as u32).collect()
            }
        }
    }

    /// Ben-Or: `f` of degree `w` is irreducible iff `gcd(f, X^{p^i} - X) = 1`
    /// for every `i <= w/2`.
    pub(super) fn is_irreducible(f: &[u32], p: u32) -> bool {
        let w = f.len() - 1;
        if w == 0 {
            return false;
        }
        let x = vec![0u32, 1];
        let mut h = rem(x.clone(), f, p);
        for _ in 0..w / 2 {
            h = pow_mod(&h, p as u64, f, p);
            let g = gcd(f, &sub(&h, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl Field {
    /// GF(p^w) with the default size limit.
    pub fn new(p: u64, w: u32) -> Result<Field> {
        Field::with_limit(p, w, DEFAULT_FIELD_LIMIT)
    }

    /// GF(q) for a prime power `q`.
    pub fn from_order(q: u64) -> Result<Field> {
        let (p, w) = numtheory::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Field::new(p, w)
    }

    pub fn with_limit(p: u64, w: u32, limit: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if w == 0 {
            return Err(Error::Invalid("extension degree must be at least 1".into()));
        }
        let q = p
            .checked_pow(w)
            .filter(|&q| q <= limit && q <= u32::MAX as u64)
            .ok_or(Error::FieldTooLarge {
                q: p.saturating_pow(w),
                limit,
            })?;
        let (p, q) = (p as u32, q as u32);
        let wu = w as usize;

        let place: Vec<u32> = (0..w).map(|i| p.pow(i)).collect();
        let decode = |enc: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(wu);
            let mut e = enc;
            for _ in 0..wu {
                v.push(e % p);
                e /= p;
            }
            poly::trim(&mut v);
            v
        };
        let encode = |v: &[u32]| -> u32 { v.iter().zip(&place).map(|(c, pl)| c * pl).sum() };

        // minimal monic irreducible by encoding of (c_0, ..., c_{w-1})
        let modulus = (0..q)
            .map(|low| {
                let mut f = vec![0u32; wu + 1];
                let mut e = low;
                for c in f.iter_mut().take(wu) {
                    *c = e % p;
                    e /= p;
                }
                f[wu] = 1;
                f
            })
            .find(|f| poly::is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists");

        let order = q as u64 - 1;
        let order_primes: Vec<u64> = numtheory::factorize(order.max(1)).primes().collect();
        let generator = (1..q)
            .find(|&enc| {
                let a = decode(enc);
                order_primes
                    .iter()
                    .all(|&l| poly::pow_mod(&a, order / l, &modulus, p) != vec![1])
            })
            .expect("GF(q)* is cyclic");

        let n = order as usize;
        let mut log = vec![NO_LOG; q as usize];
        let mut exp = vec![0u32; 2 * n];
        let g = decode(generator);
        let mut cur = vec![1u32];
        for k in 0..n {
            let enc = encode(&cur);
            exp[k] = enc;
            exp[k + n] = enc;
            log[enc as usize] = k as u32;
            cur = poly::mul_mod(&cur, &g, &modulus, p);
        }
        debug_assert_eq!(cur, vec![1]);

        Ok(Field {
            p,
            w,
            q,
            modulus,
            generator: FieldElement(generator),
            log,
            exp,
            place,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, `q - 1`.
    pub fn order(&self) -> u32 {
        self.q - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn description(&self) -> FieldDescription {
        FieldDescription {
            p: self.p,
            w: self.w,
            modulus_coeffs: self.modulus.clone(),
            generator_enc: self.generator.0,
        }
    }

    pub fn element(&self, enc: u64) -> Result<FieldElement> {
        if enc < self.q as u64 {
            Ok(FieldElement(enc as u32))
        } else {
            Err(Error::BadElement { enc, q: self.q as u64 })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Coefficients `c_0..c_{w-1}` of an element.
    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let mut e = a.0;
        (0..self.w)
            .map(|_| {
                let d = e % self.p;
                e /= self.p;
                d
            })
            .collect()
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.w == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y, p) = (a.0, b.0, self.p);
        let mut out = 0;
        for &pl in &self.place {
            let d = (x % p + y % p) % p;
            out += d * pl;
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let (mut x, p) = (a.0, self.p);
        let mut out = 0;
        for &pl in &self.place {
            out += ((p - x % p) % p) * pl;
            x /= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn one_minus(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ONE, a)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let n = self.order();
        Ok(FieldElement(self.exp[((n - self.log[a.0 as usize]) % n) as usize]))
    }

    /// `a^e` for any integer `e`; negative exponents need `a != 0`.
    /// `pow(0, 0) = 1`.
    pub fn pow(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if a.0 == 0 {
            return match e.signum() {
                0 => Ok(FieldElement::ONE),
                1 => Ok(FieldElement::ZERO),
                _ => Err(Error::ZeroInverse),
            };
        }
        let n = self.order() as i64;
        let k = (self.log[a.0 as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        Ok(FieldElement(self.exp[k as usize]))
    }

    /// `a^e` for a nonnegative exponent.
    pub fn pow_u(&self, a: FieldElement, e: u64) -> FieldElement {
        if a.0 == 0 {
            return if e == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        let n = self.order() as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        FieldElement(self.exp[k as usize])
    }

    /// `g^k` for the canonical generator, any integer `k`.
    pub fn exp(&self, k: i64) -> FieldElement {
        let n = self.order() as i64;
        FieldElement(self.exp[k.rem_euclid(n) as usize])
    }

    /// Discrete log to the canonical generator, in `[0, q-2]`.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        match self.log.get(a.0 as usize) {
            Some(&NO_LOG) | None => None,
            Some(&k) => Some(k),
        }
    }

    /// Raw table access for hot loops: `log_table()[enc]` (`u32::MAX` at 0).
    pub fn log_table(&self) -> &[u32] {
        &self.log
    }

    /// Raw table access: `exp_table()[k] = g^k` for `k < 2(q-1)`.
    pub fn exp_table(&self) -> &[u32] {
        &self.exp
    }

    /// Frobenius automorphism `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow_u(a, self.p as u64)
    }

    pub fn is_primitive(&self, a: FieldElement) -> bool {
        self.log(a).is_some_and(|k| gcd(k as u64, self.order() as u64) == 1)
    }

    /// All primitive elements, ascending by encoding.
    pub fn primitive_elements(&self) -> Vec<FieldElement> {
        let n = self.order() as u64;
        let mut v: Vec<FieldElement> = (0..n)
            .filter(|&k| gcd(k, n) == 1)
            .map(|k| FieldElement(self.exp[k as usize]))
            .collect();
        v.sort_unstable();
        v
    }

    pub fn char_value(&self, chi: CharacterSpec, a: FieldElement) -> Complex64 {
        match self.log(a) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => {
                let n = self.order() as u64;
                let phase = (chi.j as u64 * k as u64) % n;
                Complex64::from_polar(1.0, std::f64::consts::TAU * phase as f64 / n as f64)
            }
        }
    }
}

/// Multiplicative character `χ_j(g^k) = exp(2πi jk/(q-1))`, `χ_j(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub j: u32,
    /// `(q-1)/gcd(j, q-1)`
    pub order: u32,
}

impl CharacterSpec {
    pub fn new(field: &Field, j: u32) -> Result<CharacterSpec> {
        let n = field.order();
        if j >= n {
            return Err(Error::Invalid(format!("character index {j} out of range [0, {})", n)));
        }
        Ok(CharacterSpec {
            j,
            order: n / gcd(j as u64, n as u64) as u32,
        })
    }

    pub fn is_principal(&self) -> bool {
        self.j == 0
    }
}

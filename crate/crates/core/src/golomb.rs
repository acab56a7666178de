//! Golomb Costas permutations `π_{g1,g2}(x) = y  ⇔  g1^x + g2^y = 1`,
//! conjugacy under Frobenius and the families `G_q` and `L_q`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::numtheory::{gcd, mod_inverse};

/// A pair of primitive elements, with their logs to the canonical generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GolombPair {
    pub g1: FieldElement,
    pub g2: FieldElement,
    pub dlog1: u32,
    pub dlog2: u32,
}

impl GolombPair {
    pub fn new(field: &Field, g1: FieldElement, g2: FieldElement) -> Result<GolombPair> {
        for g in [g1, g2] {
            if !field.is_primitive(g) {
                return Err(Error::NotPrimitive(g.enc()));
            }
        }
        Ok(GolombPair {
            g1,
            g2,
            dlog1: field.log(g1).expect("primitive is nonzero"),
            dlog2: field.log(g2).expect("primitive is nonzero"),
        })
    }

    pub fn from_dlogs(field: &Field, dlog1: u64, dlog2: u64) -> Result<GolombPair> {
        GolombPair::new(field, field.exp(dlog1 as i64), field.exp(dlog2 as i64))
    }

    /// `(g1^r, g2^s)`.
    pub fn raised(&self, field: &Field, r: u64, s: u64) -> Result<GolombPair> {
        let n = field.order() as u64;
        GolombPair::from_dlogs(field, self.dlog1 as u64 * r % n, self.dlog2 as u64 * s % n)
    }

    fn enc_key(&self) -> (u32, u32) {
        (self.g1.enc(), self.g2.enc())
    }
}

/// A Golomb permutation of `{1..q-2}`; `values[x-1] = f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostasPermutation {
    pub pair: GolombPair,
    pub values: Vec<u32>,
}

impl CostasPermutation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f(x)` for 1-based `x`.
    pub fn at(&self, x: usize) -> u32 {
        self.values[x - 1]
    }
}

/// Serialized permutation, as exchanged with the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationRecord {
    pub q: u32,
    pub p: u32,
    pub w: u32,
    pub modulus_coeffs: Vec<u32>,
    pub g1_enc: u32,
    pub g2_enc: u32,
    pub perm: Vec<u32>,
}

impl PermutationRecord {
    pub fn new(field: &Field, perm: &CostasPermutation) -> PermutationRecord {
        PermutationRecord {
            q: field.q(),
            p: field.p(),
            w: field.w(),
            modulus_coeffs: field.modulus().to_vec(),
            g1_enc: perm.pair.g1.enc(),
            g2_enc: perm.pair.g2.enc(),
            perm: perm.values.clone(),
        }
    }
}

/// Builds `π_{g1,g2}` in O(q) via `y = log_{g2}(1 - g1^x)`.
pub fn golomb_perm(field: &Field, pair: GolombPair) -> Result<CostasPermutation> {
    if !field.is_primitive(pair.g1) {
        return Err(Error::NotPrimitive(pair.g1.enc()));
    }
    if !field.is_primitive(pair.g2) {
        return Err(Error::NotPrimitive(pair.g2.enc()));
    }
    let n = field.order() as u64;
    let inv2 = mod_inverse(pair.dlog2 as i64, n.max(2))?;
    let log = field.log_table();
    let exp = field.exp_table();
    let values = (1..n)
        .map(|x| {
            let a = FieldElement::from_raw(exp[(pair.dlog1 as u64 * x % n) as usize]);
            let b = field.one_minus(a);
            let lb = log[b.enc() as usize] as u64;
            (lb * inv2 % n) as u32
        })
        .collect();
    Ok(CostasPermutation { pair, values })
}

/// Costas check via difference rows: row `k` holds `f(i+k) - f(i)`.
///
/// Errors when `values` is not a permutation of `1..=n`; otherwise reports
/// whether every row is free of repeats.
pub fn is_costas(values: &[u32]) -> Result<bool> {
    let n = values.len();
    let mut seen = vec![false; n + 1];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return Err(Error::NotPermutation(n));
        }
        seen[v] = true;
    }
    // differences lie in [-(n-1), n-1]
    let mut stamp = vec![0u32; 2 * n + 1];
    for k in 1..n.saturating_sub(1) {
        let tag = k as u32;
        for i in 0..n - k {
            let d = (values[i + k] as i64 - values[i] as i64 + n as i64) as usize;
            if stamp[d] == tag {
                return Ok(false);
            }
            stamp[d] = tag;
        }
    }
    Ok(true)
}

/// The Frobenius orbit of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyClass {
    /// `(g1^{p^j}, g2^{p^j})` for `j = 0..w-1`, duplicates removed, in `j` order.
    pub members: Vec<GolombPair>,
    /// Lexicographic minimum by `(enc(g1), enc(g2))`.
    pub canonical: GolombPair,
}

pub fn conjugates(field: &Field, pair: GolombPair) -> ConjugacyClass {
    let mut members: Vec<GolombPair> = Vec::with_capacity(field.w() as usize);
    let (mut g1, mut g2) = (pair.g1, pair.g2);
    for _ in 0..field.w() {
        let m = GolombPair::new(field, g1, g2).expect("Frobenius preserves primitivity");
        if !members.contains(&m) {
            members.push(m);
        }
        g1 = field.frobenius(g1);
        g2 = field.frobenius(g2);
    }
    let canonical = *members.iter().min_by_key(|m| m.enc_key()).expect("class is nonempty");
    ConjugacyClass { members, canonical }
}

/// `G_q` for a fixed `g2`: one permutation per primitive `g1`, ascending by `enc(g1)`.
pub fn family_g(field: &Field, g2: FieldElement) -> Result<Vec<CostasPermutation>> {
    if !field.is_primitive(g2) {
        return Err(Error::NotPrimitive(g2.enc()));
    }
    field
        .primitive_elements()
        .into_par_iter()
        .map(|g1| golomb_perm(field, GolombPair::new(field, g1, g2)?))
        .collect()
}

/// Canonical representatives of every conjugacy class of primitive pairs,
/// ascending by `(dlog1, dlog2)`.
pub fn canonical_pairs(field: &Field) -> Vec<GolombPair> {
    let prims = field.primitive_elements();
    let mut reps = BTreeSet::new();
    for &g1 in &prims {
        for &g2 in &prims {
            let pair = GolombPair::new(field, g1, g2).expect("primitive");
            let class = conjugates(field, pair);
            if class.canonical == pair {
                reps.insert((pair.dlog1, pair.dlog2));
            }
        }
    }
    reps.into_iter()
        .map(|(a, b)| GolombPair::from_dlogs(field, a as u64, b as u64).expect("primitive"))
        .collect()
}

/// `L_q`: one permutation per conjugacy class.
pub fn family_l(field: &Field) -> Vec<CostasPermutation> {
    canonical_pairs(field)
        .into_par_iter()
        .map(|pair| golomb_perm(field, pair).expect("canonical pairs are primitive"))
        .collect()
}

/// True when `(r, s) = (p^j, p^j)` for some `j`, i.e. `(g1^r, g2^s)` is a
/// conjugate of `(g1, g2)` for every base pair.
pub fn is_conjugate_exponent(field: &Field, r: u64, s: u64) -> bool {
    if r != s {
        return false;
    }
    let n = field.order() as u64;
    let mut pj = 1u64;
    for _ in 0..field.w() {
        if r % n == pj % n {
            return true;
        }
        pj *= field.p() as u64;
    }
    false
}

/// Exponents `(r, s)` with `g3 = g1^r`, `g4 = g2^s`.
pub fn relative_exponents(field: &Field, a: GolombPair, b: GolombPair) -> (u64, u64) {
    let n = field.order() as u64;
    let r = b.dlog1 as u64 * mod_inverse(a.dlog1 as i64, n).expect("primitive") % n;
    let s = b.dlog2 as u64 * mod_inverse(a.dlog2 as i64, n).expect("primitive") % n;
    (r, s)
}

/// Number of units modulo `n`, i.e. valid relative exponents.
pub fn unit_exponents(n: u64) -> Vec<u64> {
    (1..n).filter(|&k| gcd(k, n) == 1).collect()
}

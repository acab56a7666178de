//! Bound formulas for Golomb cross-correlations.
//!
//! Family level: `C(G_q) <= 1 + ⌊√q⌋` for safe prime powers and
//! `C(G_q) = (q-1)/t - 1` otherwise. Pair level: for `g3 = g1^r`, `g4 = g2^s`
//! every shift's count is at most the number of solutions of
//! `g1^{ru}(1-y)^r = 1 - g4^v y^s` with `y ≠ 1`, which the Weil bound and
//! degree arguments control. Each candidate carries a `certified` flag; only
//! certified candidates are ever asserted against exact counts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{CharacterSpec, Field, FieldElement};
use crate::golomb::{canonical_pairs, golomb_perm, is_conjugate_exponent, CostasPermutation, GolombPair};
use crate::numtheory::{self, classify_safe, gcd, mod_inverse};
use crate::xcorr::pair_max;

/// Absolute tolerance on character-sum magnitudes.
pub const WEIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    UpperBound,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyBound {
    pub q: u64,
    pub kind: BoundKind,
    pub value: u64,
}

impl FamilyBound {
    /// Whether an exhaustively computed `C` agrees with the bound.
    pub fn accepts(&self, exact: u64) -> bool {
        match self.kind {
            BoundKind::UpperBound => exact <= self.value,
            BoundKind::Exact => exact == self.value,
        }
    }
}

/// The family bound for `C(G_q)`.
pub fn bound_cgq(q: u64) -> Result<FamilyBound> {
    let class = classify_safe(q)?;
    Ok(if class.is_safe() {
        FamilyBound {
            q,
            kind: BoundKind::UpperBound,
            value: 1 + isqrt(q),
        }
    } else {
        FamilyBound {
            q,
            kind: BoundKind::Exact,
            value: (q - 1) / class.t - 1,
        }
    })
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Relative exponents `g3 = g1^r`, `g4 = g2^s` with their inverses mod `q-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub q: u64,
    pub r: u64,
    pub s: u64,
    pub r_inv: u64,
    pub s_inv: u64,
}

impl ExponentPair {
    pub fn new(q: u64, r: u64, s: u64) -> Result<ExponentPair> {
        let n = q - 1;
        if !(1..n).contains(&r) || !(1..n).contains(&s) {
            return Err(Error::Invalid(format!(
                "exponents ({r}, {s}) must lie in [1, {}]",
                n - 1
            )));
        }
        if gcd(r * s, n) != 1 {
            return Err(Error::NotInvertible {
                a: (r * s) as i64,
                m: n,
            });
        }
        Ok(ExponentPair {
            q,
            r,
            s,
            r_inv: mod_inverse(r as i64, n)?,
            s_inv: mod_inverse(s as i64, n)?,
        })
    }

    /// Exponents relating two pairs of the same field.
    pub fn between(field: &Field, a: GolombPair, b: GolombPair) -> ExponentPair {
        let (r, s) = crate::golomb::relative_exponents(field, a, b);
        ExponentPair::new(field.q() as u64, r, s).expect("ratios of primitive logs are units")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMode {
    Certified,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub label: String,
    pub value: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    pub r: u64,
    pub s: u64,
    pub candidates: Vec<Candidate>,
    pub best: f64,
    pub exact: Option<u32>,
}

impl BoundReport {
    pub fn certified(&self) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(|c| c.certified)
    }

    pub fn candidate(&self, label: &str) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.label == label)
    }

    /// Certified candidates the exact value exceeds (empty when `exact` is unset).
    pub fn violations(&self) -> Vec<&Candidate> {
        match self.exact {
            None => Vec::new(),
            Some(e) => self.certified().filter(|c| e as f64 > c.value + 1e-9).collect(),
        }
    }
}

/// Candidate bounds on `max_{u,v} C` for a non-conjugate exponent pair.
///
/// Certified:
/// - `eq5`: `1 + min{s, s^-1}√q`;
/// - `weil_min8`: `1 + m√q` with `m` the least of `s, s^-1, r, r^-1, q-s, q-r, q-r^-1, q-s^-1`;
/// - `lagrange`: `max{r, s}`; `degree_rs`, `degree_sr`: `q-1-s+r`, `q-1-r+s`;
/// - `trivial`: `q-2`;
/// - `split` (odd `q`): `1 + 2·min_k |k - (q-1)/2|·√q` over `k ∈ {r, s, r^-1, s^-1}`.
///
/// An exponent that is a power of `p` makes the equation degenerate on whole
/// cosets; the family bound for `G_q` rescues it only for safe `q`. Otherwise
/// terms built from such an exponent are dropped from the certified set, and
/// the split (whose halves can then be identities) is uncertified. `mode = All` adds the uncertified variants: the
/// split over all eight terms, the undropped minimum, and `max{r, s}` after
/// replacing `r`, `s` or both by `q-1-r`, `q-1-s`.
pub fn bound_pair(q: u64, ep: ExponentPair, mode: BoundMode) -> Result<BoundReport> {
    let (p, w) = numtheory::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    if ep.q != q {
        return Err(Error::Invalid(format!("exponent pair built for q = {}", ep.q)));
    }
    if ep.r == ep.s && (0..w).any(|j| ep.r == p.pow(j) % (q - 1)) {
        return Err(Error::ConjugatePair { r: ep.r, s: ep.s });
    }
    let safe = classify_safe(q)?.is_safe();
    let sq = (q as f64).sqrt();
    let ExponentPair { r, s, r_inv, s_inv, .. } = ep;
    let s_block = [s, s_inv, q - s, q - s_inv];
    let r_block = [r, r_inv, q - r, q - r_inv];
    let frob = |k: u64| (0..w).any(|j| k == p.pow(j) % (q - 1));
    let s_ok = safe || !frob(s);
    let r_ok = safe || !frob(r);

    let mut cands = Vec::new();
    let mut push = |label: &str, value: f64, certified: bool| {
        if !certified && mode == BoundMode::Certified {
            return;
        }
        cands.push(Candidate {
            label: label.to_string(),
            value,
            certified,
        })
    };

    push("eq5", 1.0 + s.min(s_inv) as f64 * sq, s_ok);
    let admissible = s_block
        .iter()
        .filter(|_| s_ok)
        .chain(r_block.iter().filter(|_| r_ok))
        .copied()
        .min();
    if let Some(m) = admissible {
        push("weil_min8", 1.0 + m as f64 * sq, true);
    }
    push("lagrange", r.max(s) as f64, true);
    push("degree_rs", (q - 1 - s + r) as f64, true);
    push("degree_sr", (q - 1 - r + s) as f64, true);
    push("trivial", (q - 2) as f64, true);
    let half = (q as f64 - 1.0) / 2.0;
    if q % 2 == 1 {
        let dist = |k: u64| (k as f64 - half).abs();
        let exps = [s, s_inv]
            .iter()
            .filter(|_| s_ok)
            .chain([r, r_inv].iter().filter(|_| r_ok))
            .map(|&k| dist(k))
            .fold(f64::INFINITY, f64::min);
        if s_ok && r_ok {
            push("split", 1.0 + 2.0 * exps * sq, true);
        }
    }

    if mode == BoundMode::All {
        let all8 = s_block.iter().chain(&r_block).copied().min().expect("nonempty");
        if Some(all8) != admissible {
            push("weil_min8_literal", 1.0 + all8 as f64 * sq, false);
        }
        if q % 2 == 1 {
            let d8 = s_block
                .iter()
                .chain(&r_block)
                .map(|&k| (k as f64 - half).abs())
                .fold(f64::INFINITY, f64::min);
            push("split_literal8", 1.0 + 2.0 * d8 * sq, false);
        }
        push("lagrange_sub_r", (q - 1 - r).max(s) as f64, false);
        push("lagrange_sub_s", r.max(q - 1 - s) as f64, false);
        push("lagrange_sub_both", (q - 1 - r).max(q - 1 - s) as f64, false);
    }

    let best = cands
        .iter()
        .filter(|c| c.certified || mode == BoundMode::All)
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    Ok(BoundReport {
        q,
        r,
        s,
        candidates: cands,
        best,
        exact: None,
    })
}

/// Exact `max_{u,v} C_{π(g1,g2), π(g1^r,g2^s)}` over every base pair `(g1, g2)`.
///
/// Frobenius acts on both members at once, so one base pair per conjugacy
/// class suffices.
pub fn exact_pair_class_max(field: &Field, r: u64, s: u64) -> Result<u32> {
    if is_conjugate_exponent(field, r, s) {
        return Err(Error::ConjugatePair { r, s });
    }
    let mut best = 0;
    for base in canonical_pairs(field) {
        let f1 = golomb_perm(field, base)?;
        let f2 = golomb_perm(field, base.raised(field, r, s)?)?;
        best = best.max(pair_max(&f1.values, &f2.values, false)?.0);
    }
    Ok(best)
}

/// The subfamily `{π(g1, g2) : g1 primitive, g2 ∈ A}` with
/// `A = {g^{a^i} : |i| <= θ}` and `θ = ⌊δ ln q / (2 ln a)⌋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubfamilySpec {
    pub q: u64,
    pub delta: f64,
    /// Smallest integer `> 1` coprime to `q-1` and different from `p`.
    pub a: u64,
    pub theta: u64,
    /// `a^i mod (q-1)` for `i = -θ..=θ`.
    pub exponents: Vec<u64>,
    /// `g^{a^i}` in the same order.
    pub generators: Vec<FieldElement>,
}

impl SubfamilySpec {
    pub fn size(&self, phi: u64) -> u64 {
        phi * (2 * self.theta + 1)
    }
}

fn check_subfamily_args(q: u64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Invalid(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    if q <= 7 || !classify_safe(q)?.is_safe() {
        return Err(Error::Invalid(format!("q = {q} must be a safe prime power above 7")));
    }
    Ok(())
}

fn subfamily_base(q: u64) -> u64 {
    let (p, _) = numtheory::prime_power(q).expect("checked by caller");
    (2..)
        .find(|&a| gcd(a, q - 1) == 1 && a != p)
        .expect("q - 1 + 1 qualifies")
}

fn subfamily_theta(q: u64, a: u64, delta: f64) -> u64 {
    (delta * (q as f64).ln() / (2.0 * (a as f64).ln())).floor() as u64
}

pub fn subfamily_spec(field: &Field, delta: f64) -> Result<SubfamilySpec> {
    let q = field.q() as u64;
    check_subfamily_args(q, delta)?;
    let n = q - 1;
    let a = subfamily_base(q);
    let theta = subfamily_theta(q, a, delta);
    let a_inv = mod_inverse(a as i64, n)?;
    let exponents: Vec<u64> = (-(theta as i64)..=theta as i64)
        .map(|i| {
            let base = if i < 0 { a_inv } else { a };
            numtheory::pow_mod(base, i.unsigned_abs(), n)
        })
        .collect();
    let mut distinct = exponents.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != exponents.len() {
        return Err(Error::Invalid(format!(
            "a = {a} has order at most 2θ = {} modulo {n}",
            2 * theta
        )));
    }
    let generators = exponents.iter().map(|&e| field.exp(e as i64)).collect();
    Ok(SubfamilySpec {
        q,
        delta,
        a,
        theta,
        exponents,
        generators,
    })
}

/// The subfamily itself, grouped by `g2` (in `i` order) then ascending `enc(g1)`.
pub fn subfamily(field: &Field, delta: f64) -> Result<(SubfamilySpec, Vec<CostasPermutation>)> {
    let spec = subfamily_spec(field, delta)?;
    let prims = field.primitive_elements();
    let mut family = Vec::with_capacity(prims.len() * spec.generators.len());
    for &g2 in &spec.generators {
        for &g1 in &prims {
            family.push(golomb_perm(field, GolombPair::new(field, g1, g2)?)?);
        }
    }
    Ok((spec, family))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bound {
    pub a: u64,
    pub theta: u64,
    /// `1 + a^{2θ}√q`
    pub sharper: f64,
    /// `1 + q^{1/2 + δ}`
    pub cap: f64,
}

pub fn theorem1_bound(q: u64, delta: f64) -> Result<Theorem1Bound> {
    check_subfamily_args(q, delta)?;
    let a = subfamily_base(q);
    let theta = subfamily_theta(q, a, delta);
    let qf = q as f64;
    Ok(Theorem1Bound {
        a,
        theta,
        sharper: 1.0 + (a as f64).powi(2 * theta as i32) * qf.sqrt(),
        cap: 1.0 + qf.powf(0.5 + delta),
    })
}

/// The three equivalent-shape equations bounding `C(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationForm {
    /// `g1^{ru}(1-y)^r = 1 - g4^v y^s`, `y ≠ 1`.
    Ceq,
    /// `g1^{-u}(1-z)^{r^-1} = 1 - g4^{-v s^-1} z^{s^-1}`, `z ≠ g4^v`.
    Substituted,
    /// `g4^v(1-x)^s + g1^{ru}x^r = 1`, all `x`.
    Incidence,
}

/// Brute-force solution count over the whole field.
pub fn solution_count(
    field: &Field,
    g1: FieldElement,
    g2: FieldElement,
    ep: ExponentPair,
    u: i64,
    v: i64,
    form: EquationForm,
) -> Result<u32> {
    if g1.is_zero() || g2.is_zero() {
        return Err(Error::ZeroInverse);
    }
    let (r, s) = (ep.r, ep.s);
    let g4 = field.pow_u(g2, s);
    let g1ru = field.pow(g1, r as i64 * u)?;
    let g4v = field.pow(g4, v)?;
    let count = match form {
        EquationForm::Ceq => field
            .elements()
            .filter(|&y| y != FieldElement::ONE)
            .filter(|&y| {
                let lhs = field.mul(g1ru, field.pow_u(field.one_minus(y), r));
                let rhs = field.one_minus(field.mul(g4v, field.pow_u(y, s)));
                lhs == rhs
            })
            .count(),
        EquationForm::Substituted => {
            let c1 = field.pow(g1, -u)?;
            let n = field.order() as i64;
            let c2 = field.pow(g4, (-v * ep.s_inv as i64).rem_euclid(n))?;
            field
                .elements()
                .filter(|&z| z != g4v)
                .filter(|&z| {
                    let lhs = field.mul(c1, field.pow_u(field.one_minus(z), ep.r_inv));
                    let rhs = field.one_minus(field.mul(c2, field.pow_u(z, ep.s_inv)));
                    lhs == rhs
                })
                .count()
        }
        EquationForm::Incidence => field
            .elements()
            .filter(|&x| {
                let a = field.mul(g4v, field.pow_u(field.one_minus(x), s));
                let b = field.mul(g1ru, field.pow_u(x, r));
                field.add(a, b) == FieldElement::ONE
            })
            .count(),
    };
    Ok(count as u32)
}

/// Log of `g1^{ru}(1-y)^r (1 - g4^v y^s)^{q-2}` for each `y`, `None` where it vanishes.
fn character_arguments(
    field: &Field,
    g1: FieldElement,
    g2: FieldElement,
    ep: ExponentPair,
    u: i64,
    v: i64,
) -> Result<Vec<Option<u32>>> {
    let g4 = field.pow_u(g2, ep.s);
    let g1ru = field.pow(g1, ep.r as i64 * u)?;
    let g4v = field.pow(g4, v)?;
    let q2 = field.q() as u64 - 2;
    Ok(field
        .elements()
        .map(|y| {
            let a = field.mul(g1ru, field.pow_u(field.one_minus(y), ep.r));
            let b = field.one_minus(field.mul(g4v, field.pow_u(y, ep.s)));
            field.log(field.mul(a, field.pow_u(b, q2)))
        })
        .collect())
}

fn sum_character(field: &Field, args: &[Option<u32>], j: u32) -> Complex64 {
    let chi = CharacterSpec::new(field, j).expect("index in range");
    args.iter()
        .flatten()
        .map(|&k| field.char_value(chi, field.exp(k as i64)))
        .sum()
}

/// `Σ_y χ_j(g1^{ru}(1-y)^r (1 - g4^v y^s)^{q-2})`.
pub fn character_sum(
    field: &Field,
    g1: FieldElement,
    g2: FieldElement,
    ep: ExponentPair,
    u: i64,
    v: i64,
    j: u32,
) -> Result<Complex64> {
    CharacterSpec::new(field, j)?;
    let args = character_arguments(field, g1, g2, ep, u, v)?;
    Ok(sum_character(field, &args, j))
}

/// Average over every character of the sums above; by orthogonality this is
/// the number of `y` where the argument equals 1.
pub fn character_average(
    field: &Field,
    g1: FieldElement,
    g2: FieldElement,
    ep: ExponentPair,
    u: i64,
    v: i64,
) -> Result<f64> {
    let args = character_arguments(field, g1, g2, ep, u, v)?;
    let n = field.order();
    let total: Complex64 = (0..n).map(|j| sum_character(field, &args, j)).sum();
    Ok(total.re / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeilCheck {
    pub magnitude: f64,
    /// `s·√q`
    pub bound: f64,
    pub pass: bool,
}

/// Numerical check of the Weil estimate `|Σ χ(...)| <= s√q` for a
/// non-principal character and `s > 1` prime to `p`.
pub fn weil_oracle(
    field: &Field,
    g1: FieldElement,
    g2: FieldElement,
    ep: ExponentPair,
    u: i64,
    v: i64,
    j: u32,
) -> Result<WeilCheck> {
    if j == 0 {
        return Err(Error::Invalid("principal character has no Weil bound".into()));
    }
    if ep.s <= 1 {
        return Err(Error::Invalid("Weil estimate needs s > 1".into()));
    }
    if ep.s.is_multiple_of(field.p() as u64) {
        return Err(Error::Invalid(format!("s = {} is divisible by p", ep.s)));
    }
    let magnitude = character_sum(field, g1, g2, ep, u, v, j)?.norm();
    let bound = ep.s as f64 * (field.q() as f64).sqrt();
    Ok(WeilCheck {
        magnitude,
        bound,
        pass: magnitude <= bound + WEIL_TOLERANCE,
    })
}

//! How often cross-correlations reach a threshold `B`.
//!
//! `N` counts shifts `(u, v) ∈ S` with `C(u, v) >= B` for one pair of
//! permutations; `M` counts ordered pairs of `L_q` with `C(u, v) >= B` for one
//! shift. Both come with exact inequality chains that are checked link by
//! link. The Szemerédi–Trotter type estimates carry unknown constants and are
//! only evaluated as reference values.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{solution_count, EquationForm, ExponentPair};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::golomb::{family_l, golomb_perm, is_conjugate_exponent, unit_exponents, GolombPair};
use crate::numtheory::{euler_phi, factorize, is_prime, prime_power, tau};
use crate::xcorr::cross_correlation;

/// Shifts `(u, v)` with `0 <= u, v <= q-3`, sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSet {
    pub q: u64,
    shifts: Vec<(u32, u32)>,
}

impl ShiftSet {
    pub fn from_pairs<I: IntoIterator<Item = (i64, i64)>>(q: u64, pairs: I) -> Result<ShiftSet> {
        let hi = q as i64 - 3;
        let mut set = BTreeSet::new();
        for (u, v) in pairs {
            if !(0..=hi).contains(&u) || !(0..=hi).contains(&v) {
                return Err(Error::ShiftOutOfRange {
                    u,
                    v,
                    n: (q - 2) as usize,
                });
            }
            set.insert((u as u32, v as u32));
        }
        Ok(ShiftSet {
            q,
            shifts: set.into_iter().collect(),
        })
    }

    /// `[u0, u1] × [v0, v1]`, inclusive.
    pub fn rect(q: u64, u0: i64, u1: i64, v0: i64, v1: i64) -> Result<ShiftSet> {
        let pairs = (u0..=u1).flat_map(|u| (v0..=v1).map(move |v| (u, v)));
        ShiftSet::from_pairs(q, pairs)
    }

    /// `{0, .., q-3}²`.
    pub fn full(q: u64) -> ShiftSet {
        let hi = q as i64 - 3;
        ShiftSet::rect(q, 0, hi, 0, hi).expect("in range")
    }

    /// Rectangle syntax `u0:u1,v0:v1`.
    pub fn parse_rect(q: u64, spec: &str) -> Result<ShiftSet> {
        let bad = || Error::Invalid(format!("expected u0:u1,v0:v1, got {spec:?}"));
        let (us, vs) = spec.split_once(',').ok_or_else(bad)?;
        let range = |s: &str| -> Result<(i64, i64)> {
            let (a, b) = s.split_once(':').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        };
        let (u0, u1) = range(us)?;
        let (v0, v1) = range(vs)?;
        ShiftSet::rect(q, u0, u1, v0, v1)
    }

    /// One `u,v` pair per line; blank lines and `#` comments ignored.
    pub fn read_pairs(q: u64, path: &Path) -> Result<ShiftSet> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let mut pairs = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let bad = || Error::Invalid(format!("bad shift line {line:?}"));
            let (u, v) = line.split_once(',').ok_or_else(bad)?;
            pairs.push((
                u.trim().parse().map_err(|_| bad())?,
                v.trim().parse().map_err(|_| bad())?,
            ));
        }
        ShiftSet::from_pairs(q, pairs)
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.shifts.iter().copied()
    }
}

/// Points `((1-x)^s, x^r)` and lines `A·y + B·z = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidencePlane {
    pub points: Vec<(FieldElement, FieldElement)>,
    pub lines: Vec<(FieldElement, FieldElement)>,
}

impl IncidencePlane {
    /// Lines `A = g4^v`, `B = g1^{ru}` for `(u, v) ∈ S`, with `g4 = g2^s`.
    pub fn build(field: &Field, base: GolombPair, ep: ExponentPair, shifts: &ShiftSet) -> Result<IncidencePlane> {
        let g4 = field.pow_u(base.g2, ep.s);
        let points = field
            .elements()
            .map(|x| (field.pow_u(field.one_minus(x), ep.s), field.pow_u(x, ep.r)))
            .collect();
        let lines = shifts
            .iter()
            .map(|(u, v)| Ok((field.pow(g4, v as i64)?, field.pow(base.g1, ep.r as i64 * u as i64)?)))
            .collect::<Result<_>>()?;
        Ok(IncidencePlane { points, lines })
    }
}

/// `|{(point, line) : point on line}|` by direct testing.
pub fn incidence(field: &Field, plane: &IncidencePlane) -> u64 {
    plane
        .lines
        .par_iter()
        .map(|&(a, b)| {
            plane
                .points
                .iter()
                .filter(|&&(y, z)| field.add(field.mul(a, y), field.mul(b, z)) == FieldElement::ONE)
                .count() as u64
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBound {
    pub label: String,
    pub value: f64,
}

/// One exact link of an inequality chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub label: String,
    pub value: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CountQuery {
    N {
        g1: u32,
        g2: u32,
        g3: u32,
        g4: u32,
        size_s: usize,
    },
    M {
        u: u32,
        v: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub q: u64,
    #[serde(rename = "B")]
    pub b: u32,
    pub query: CountQuery,
    pub exact: u64,
    /// Proven bound on `exact`; strict for `M`.
    pub certified_bound: Option<f64>,
    /// `B·exact` first, then each successive upper estimate.
    pub chain: Vec<ChainLink>,
    /// Asymptotic formulas evaluated with constant 1; never asserted.
    pub reference_bounds: Vec<ReferenceBound>,
}

impl CountResult {
    /// Every link is at most the next; for `M` the last step is strict.
    pub fn chain_holds(&self) -> bool {
        let ok = self.chain.windows(2).all(|w| w[0].value <= w[1].value);
        let strict_tail = match self.query {
            CountQuery::M { .. } => self.chain.windows(2).last().is_none_or(|w| w[0].value < w[1].value),
            CountQuery::N { .. } => true,
        };
        let within = self.certified_bound.is_none_or(|c| match self.query {
            CountQuery::M { .. } => (self.exact as f64) < c,
            CountQuery::N { .. } => self.exact as f64 <= c,
        });
        ok && strict_tail && within
    }
}

fn check_b(b: u32) -> Result<()> {
    if b == 0 {
        return Err(Error::Invalid("B must be at least 1".into()));
    }
    Ok(())
}

/// Shifts of `S` where `C_{π(a), π(b)} >= B`, with the chain
/// `B·N <= Σ_S C <= I(P, L)`.
pub fn count_n(field: &Field, a: GolombPair, b: GolombPair, bthr: u32, shifts: &ShiftSet) -> Result<CountResult> {
    check_b(bthr)?;
    let q = field.q() as u64;
    if shifts.q != q {
        return Err(Error::Invalid(format!("shift set built for q = {}", shifts.q)));
    }
    let ep = ExponentPair::between(field, a, b);
    if is_conjugate_exponent(field, ep.r, ep.s) {
        return Err(Error::ConjugatePair { r: ep.r, s: ep.s });
    }
    let f1 = golomb_perm(field, a)?;
    let f2 = golomb_perm(field, b)?;
    let counts: Vec<u32> = shifts
        .shifts
        .par_iter()
        .map(|&(u, v)| cross_correlation(&f1.values, &f2.values, u as i64, v as i64))
        .collect::<Result<_>>()?;
    let exact = counts.iter().filter(|&&c| c >= bthr).count() as u64;
    let sum_c: u128 = counts.iter().map(|&c| c as u128).sum();
    let plane = IncidencePlane::build(field, a, ep, shifts)?;
    let inc = incidence(field, &plane) as u128;
    Ok(CountResult {
        q,
        b: bthr,
        query: CountQuery::N {
            g1: a.g1.enc(),
            g2: a.g2.enc(),
            g3: b.g1.enc(),
            g4: b.g2.enc(),
            size_s: shifts.len(),
        },
        exact,
        certified_bound: Some(inc as f64 / bthr as f64),
        chain: vec![
            ChainLink {
                label: "B*N".into(),
                value: bthr as u128 * exact as u128,
            },
            ChainLink {
                label: "sum_C".into(),
                value: sum_c,
            },
            ChainLink {
                label: "incidences".into(),
                value: inc,
            },
        ],
        reference_bounds: bound_n_reference(q, bthr, shifts.len(), is_prime(q)),
    })
}

/// `Σ_{d | q-1} φ((q-1)/d)·d` and `τ(q-1)(q-1)`.
pub fn divisor_sum_bound(q: u64) -> Result<(u64, u64)> {
    prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let n = q - 1;
    let sum = factorize(n).divisors().iter().map(|&d| euler_phi(n / d) * d).sum();
    let cap = tau(n) * n;
    if sum >= cap {
        return Err(Error::Invalid(format!("divisor sum {sum} >= {cap} for q = {q}")));
    }
    Ok((sum, cap))
}

/// Number of `(r, x)` pairs per primitive `(g1, g2)` and unit `s`, summed:
/// `x ∈ F_q* \ {1}`, `r` a unit with `(g1^u x)^r = 1 - (g2^v (1-x))^s`.
fn proof_sum(field: &Field, u: u32, v: u32) -> u128 {
    let n = field.order() as usize;
    let units = unit_exponents(n as u64);
    // solutions[j * n + k] = #{unit r : j·r ≡ k (mod n)}
    let mut solutions = vec![0u32; n * n];
    for j in 0..n {
        for &r in &units {
            solutions[j * n + (j * r as usize) % n] += 1;
        }
    }
    let prims = field.primitive_elements();
    prims
        .par_iter()
        .map(|&g1| {
            let g1u = field.pow_u(g1, u as u64);
            let mut total = 0u128;
            for &g2 in &prims {
                let g2v = field.pow_u(g2, v as u64);
                for &s in &units {
                    for x in field.elements().filter(|&x| !x.is_zero() && x != FieldElement::ONE) {
                        let j = field.log(field.mul(g1u, x)).expect("nonzero") as usize;
                        let rhs = field.one_minus(field.pow_u(field.mul(g2v, field.one_minus(x)), s));
                        if let Some(k) = field.log(rhs) {
                            total += solutions[j * n + k as usize] as u128;
                        }
                    }
                }
            }
            total
        })
        .sum()
}

/// Ordered pairs of `L_q` (diagonal included) with `C(u, v) >= B`, with the
/// chain `B·M <= Σ C <= Σ #(r, x) <= φ³·Σ_d φ((q-1)/d)d < τ(q-1)φ³(q-1)`.
pub fn count_m(field: &Field, u: u32, v: u32, bthr: u32) -> Result<CountResult> {
    check_b(bthr)?;
    let q = field.q() as u64;
    if u as u64 > q - 3 || v as u64 > q - 3 {
        return Err(Error::ShiftOutOfRange {
            u: u as i64,
            v: v as i64,
            n: (q - 2) as usize,
        });
    }
    let fam = family_l(field);
    let (exact, sum_c) = fam
        .par_iter()
        .map(|f1| {
            let mut hits = 0u64;
            let mut sum = 0u128;
            for f2 in &fam {
                let c = cross_correlation(&f1.values, &f2.values, u as i64, v as i64).expect("in range");
                hits += (c >= bthr) as u64;
                sum += c as u128;
            }
            (hits, sum)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let phi = euler_phi(q - 1) as u128;
    let (dsum, dcap) = divisor_sum_bound(q)?;
    let certified = dcap as u128 * phi.pow(3);
    Ok(CountResult {
        q,
        b: bthr,
        query: CountQuery::M { u, v },
        exact,
        certified_bound: Some(certified as f64 / bthr as f64),
        chain: vec![
            ChainLink {
                label: "B*M".into(),
                value: bthr as u128 * exact as u128,
            },
            ChainLink {
                label: "sum_C".into(),
                value: sum_c,
            },
            ChainLink {
                label: "sum_rx".into(),
                value: proof_sum(field, u, v),
            },
            ChainLink {
                label: "phi3_divisor_sum".into(),
                value: phi.pow(3) * dsum as u128,
            },
            ChainLink {
                label: "tau_phi3_n".into(),
                value: certified,
            },
        ],
        reference_bounds: vec![ReferenceBound {
            label: "q^4/B".into(),
            value: (q as f64).powi(4) / bthr as f64,
        }],
    })
}

/// Sum of `C(u, v)` over `S` computed through the incidence equation, one
/// shift at a time; equals `incidence` on the matching plane.
pub fn incidence_by_solutions(field: &Field, base: GolombPair, ep: ExponentPair, shifts: &ShiftSet) -> Result<u64> {
    shifts.iter().try_fold(0u64, |acc, (u, v)| {
        Ok(acc + solution_count(field, base.g1, base.g2, ep, u as i64, v as i64, EquationForm::Incidence)? as u64)
    })
}

/// The piecewise estimate for `N` with constant 1, plus the prime-field
/// improvement `(|S| q)^{11/15} / B` when `q^{7/8} < |S| < q^{8/7}`.
pub fn bound_n_reference(q: u64, bthr: u32, size_s: usize, q_is_prime: bool) -> Vec<ReferenceBound> {
    let (qf, sf, bf) = (q as f64, size_s as f64, bthr as f64);
    let mut out = Vec::new();
    if size_s == 0 {
        return out;
    }
    let piece = if sf >= qf {
        ("sqrtS_q", sf.sqrt() * qf)
    } else if sf >= qf.sqrt() {
        ("S_sqrtq", sf * qf.sqrt())
    } else {
        ("q", qf)
    };
    out.push(ReferenceBound {
        label: piece.0.into(),
        value: piece.1 / bf,
    });
    if q_is_prime && qf.powf(7.0 / 8.0) < sf && sf < qf.powf(8.0 / 7.0) {
        out.push(ReferenceBound {
            label: "prime_11_15".into(),
            value: (sf * qf).powf(11.0 / 15.0) / bf,
        });
    }
    out
}

/// Incidence estimates with constant 1: the four-case bound and, where its
/// range applies, `(|P||L|)^{11/15}`.
pub fn incidence_bound_reference(size_p: usize, size_l: usize, p: u64) -> Vec<ReferenceBound> {
    let (pf, lf) = (size_p as f64, size_l as f64);
    let mut out = Vec::new();
    let piece = if pf * pf <= lf {
        ("L", lf)
    } else if pf <= lf {
        ("P_sqrtL", pf * lf.sqrt())
    } else if pf.sqrt() <= lf {
        ("sqrtP_L", pf.sqrt() * lf)
    } else {
        ("P", pf)
    };
    out.push(ReferenceBound {
        label: piece.0.into(),
        value: piece.1,
    });
    let pp = p as f64;
    let upper = pf.powf(8.0 / 7.0).min(pf.powf(2.0 / 13.0) * pp.powf(15.0 / 13.0));
    if pf < pp.powf(8.0 / 5.0) && pf.powf(7.0 / 8.0) < lf && lf < upper {
        out.push(ReferenceBound {
            label: "PL_11_15".into(),
            value: (pf * lf).powf(11.0 / 15.0),
        });
    }
    out
}

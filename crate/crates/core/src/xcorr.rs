//! Exact cross-correlation of permutations of `{1..n}`.
//!
//! `C_{f1,f2}(u,v)` counts `x` in the overlap window with `f1(x) + v = f2(x+u)`,
//! with `v` an ordinary integer (no wraparound). Full tables cost O(n^2) per
//! pair: for each `u` every `x` contributes once to the bin `v = f2(x+u) - f1(x)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::Field;
use crate::golomb::{golomb_perm, GolombPair};

/// Witness lists in a [`FamilyMaxReport`] are truncated to this many entries.
pub const WITNESS_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shift {
    pub u: i32,
    pub v: i32,
}

impl Shift {
    pub fn new(u: i64, v: i64, n: usize) -> Result<Shift> {
        let lim = n as i64 - 1;
        if u.abs() > lim || v.abs() > lim {
            return Err(Error::ShiftOutOfRange { u, v, n });
        }
        Ok(Shift {
            u: u as i32,
            v: v as i32,
        })
    }
}

fn check_lengths(f1: &[u32], f2: &[u32]) -> Result<usize> {
    if f1.len() != f2.len() {
        return Err(Error::LengthMismatch(f1.len(), f2.len()));
    }
    Ok(f1.len())
}

/// Single-shift count by direct scan of the overlap window.
pub fn cross_correlation(f1: &[u32], f2: &[u32], u: i64, v: i64) -> Result<u32> {
    let n = check_lengths(f1, f2)?;
    Shift::new(u, v, n)?;
    let lo = 1.max(1 - u);
    let hi = (n as i64).min(n as i64 - u);
    Ok((lo..=hi)
        .filter(|&x| f1[(x - 1) as usize] as i64 + v == f2[(x + u - 1) as usize] as i64)
        .count() as u32)
}

/// Counts for every shift `1-n <= u, v <= n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationTable {
    n: usize,
    counts: Vec<u32>,
}

impl CorrelationTable {
    pub fn n(&self) -> usize {
        self.n
    }

    fn side(&self) -> usize {
        2 * self.n - 1
    }

    pub fn get(&self, u: i64, v: i64) -> u32 {
        let off = self.n as i64 - 1;
        self.counts[((u + off) as usize) * self.side() + (v + off) as usize]
    }

    /// All `(u, v, count)` in ascending `(u, v)` order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, u32)> + '_ {
        let off = self.n as i32 - 1;
        let side = self.side();
        self.counts
            .iter()
            .enumerate()
            .map(move |(k, &c)| ((k / side) as i32 - off, (k % side) as i32 - off, c))
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Largest count at any shift other than `(0, 0)`.
    pub fn max_off_origin(&self) -> u32 {
        self.iter()
            .filter(|&(u, v, _)| (u, v) != (0, 0))
            .map(|(_, _, c)| c)
            .max()
            .unwrap_or(0)
    }
}

pub fn correlation_table(f1: &[u32], f2: &[u32]) -> Result<CorrelationTable> {
    let n = check_lengths(f1, f2)?;
    if n == 0 {
        return Err(Error::Invalid("empty permutations".into()));
    }
    let side = 2 * n - 1;
    let off = n as i64 - 1;
    let mut counts = vec![0u32; side * side];
    for u in -off..=off {
        let row = (u + off) as usize * side;
        let lo = 0.max(-u) as usize;
        let hi = (n as i64).min(n as i64 - u) as usize;
        for x in lo..hi {
            let v = f2[(x as i64 + u) as usize] as i64 - f1[x] as i64;
            counts[row + (v + off) as usize] += 1;
        }
    }
    Ok(CorrelationTable { n, counts })
}

/// One place where a family maximum is attained: members `i`, `j` at `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub u: i32,
    pub v: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMaxReport {
    pub family: String,
    pub n: usize,
    pub members: usize,
    pub restrict_nonneg: bool,
    pub value: u32,
    /// Exact number of `(i, j, u, v)` attaining `value` in the scanned region.
    pub maxima: u64,
    /// First [`WITNESS_CAP`] maxima by `(i, j, u, v)`.
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone)]
struct Best {
    value: u32,
    maxima: u64,
    witnesses: Vec<Witness>,
    cap: usize,
}

impl Default for Best {
    fn default() -> Best {
        Best::with_cap(WITNESS_CAP)
    }
}

impl Best {
    fn with_cap(cap: usize) -> Best {
        Best {
            value: 0,
            maxima: 0,
            witnesses: Vec::new(),
            cap,
        }
    }

    fn offer(&mut self, value: u32, w: Witness) {
        if value > self.value {
            self.value = value;
            self.maxima = 0;
            self.witnesses.clear();
        }
        if value == self.value {
            self.maxima += 1;
            if self.witnesses.len() < self.cap {
                self.witnesses.push(w);
            }
        }
    }

    /// `other` must come after `self` in witness order.
    fn absorb(&mut self, other: Best) {
        if other.value > self.value {
            *self = other;
        } else if other.value == self.value {
            self.maxima += other.maxima;
            let room = self.cap - self.witnesses.len();
            self.witnesses.extend(other.witnesses.into_iter().take(room));
        }
    }
}

/// Reusable histogram for scanning one ordered pair at a time.
struct Scanner {
    n: usize,
    counts: Vec<u16>,
    hits: Vec<i32>,
}

impl Scanner {
    fn new(n: usize) -> Scanner {
        Scanner {
            n,
            counts: vec![0; 2 * n + 1],
            hits: Vec::new(),
        }
    }

    /// Feeds every shift of the ordered pair `(f1, f2)` into `best`.
    fn scan(&mut self, f1: &[u32], f2: &[u32], i: usize, j: usize, restrict: bool, best: &mut Best) {
        let n = self.n as i64;
        let (u_lo, v_floor) = if restrict { (0, 0) } else { (1 - n, 1 - n) };
        for u in u_lo..n {
            let lo = 0.max(-u) as usize;
            let hi = n.min(n - u) as usize;
            let a = &f1[lo..hi];
            let b = &f2[(lo as i64 + u) as usize..(hi as i64 + u) as usize];
            let mut m = 0u16;
            let counts = &mut self.counts;
            if restrict {
                for (&x, &y) in a.iter().zip(b) {
                    let d = y as i64 - x as i64;
                    let c = &mut counts[(d + n) as usize];
                    *c += 1;
                    let keep = (d >= 0) as u16;
                    m = m.max(*c * keep);
                }
            } else {
                for (&x, &y) in a.iter().zip(b) {
                    let c = &mut counts[(y as i64 - x as i64 + n) as usize];
                    *c += 1;
                    m = m.max(*c);
                }
            }
            if m > 0 && m as u32 >= best.value {
                self.hits.clear();
                for (&x, &y) in a.iter().zip(b) {
                    let d = y as i64 - x as i64;
                    let c = &mut counts[(d + n) as usize];
                    if *c == m && d >= v_floor {
                        self.hits.push(d as i32);
                    }
                    *c = 0;
                }
                self.hits.sort_unstable();
                for &v in &self.hits {
                    best.offer(m as u32, Witness { i, j, u: u as i32, v });
                }
            } else {
                for (&x, &y) in a.iter().zip(b) {
                    counts[(y as i64 - x as i64 + n) as usize] = 0;
                }
            }
        }
    }
}

fn validate_family<P: AsRef<[u32]>>(family: &[P]) -> Result<usize> {
    if family.len() < 2 {
        return Err(Error::FamilyTooSmall(family.len()));
    }
    let n = family[0].as_ref().len();
    for f in family {
        check_lengths(family[0].as_ref(), f.as_ref())?;
    }
    if n == 0 || n > u16::MAX as usize {
        return Err(Error::Invalid(format!("unsupported permutation length {n}")));
    }
    Ok(n)
}

/// Maximal cross-correlation over all ordered pairs of distinct members.
///
/// With `restrict_nonneg` only `0 <= u, v <= n-1` is scanned. That equals the
/// full maximum for families closed under `g2 -> g2^{-1}` such as `L_q`.
/// Parallel over the first index; the result does not depend on thread count.
pub fn family_max<P: AsRef<[u32]> + Sync>(
    family_id: &str,
    family: &[P],
    restrict_nonneg: bool,
) -> Result<FamilyMaxReport> {
    let n = validate_family(family)?;
    let m = family.len();
    let partials: Vec<Best> = (0..m)
        .into_par_iter()
        .map_init(
            || Scanner::new(n),
            |scanner, i| {
                let mut best = Best::default();
                for j in (0..m).filter(|&j| j != i) {
                    scanner.scan(family[i].as_ref(), family[j].as_ref(), i, j, restrict_nonneg, &mut best);
                }
                best
            },
        )
        .collect();
    Ok(finish(family_id, n, m, restrict_nonneg, partials))
}

/// Like [`family_max`] but over an explicit list of ordered pairs, e.g. a sample.
pub fn pairs_max<P: AsRef<[u32]> + Sync>(
    family_id: &str,
    family: &[P],
    pairs: &[(usize, usize)],
    restrict_nonneg: bool,
) -> Result<FamilyMaxReport> {
    let n = validate_family(family)?;
    for &(i, j) in pairs {
        if i == j || i >= family.len() || j >= family.len() {
            return Err(Error::Invalid(format!("bad pair ({i}, {j})")));
        }
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let partials: Vec<Best> = sorted
        .par_iter()
        .map_init(
            || Scanner::new(n),
            |scanner, &(i, j)| {
                let mut best = Best::default();
                scanner.scan(family[i].as_ref(), family[j].as_ref(), i, j, restrict_nonneg, &mut best);
                best
            },
        )
        .collect();
    Ok(finish(family_id, n, family.len(), restrict_nonneg, partials))
}

fn finish(id: &str, n: usize, members: usize, restrict: bool, partials: Vec<Best>) -> FamilyMaxReport {
    let best = partials.into_iter().fold(Best::default(), |mut acc, b| {
        acc.absorb(b);
        acc
    });
    FamilyMaxReport {
        family: id.to_string(),
        n,
        members,
        restrict_nonneg: restrict,
        value: best.value,
        maxima: best.maxima,
        witnesses: best.witnesses,
    }
}

/// Maximum over all shifts of one ordered pair, with every maximizing shift.
pub fn pair_max(f1: &[u32], f2: &[u32], restrict_nonneg: bool) -> Result<(u32, Vec<Shift>)> {
    let n = check_lengths(f1, f2)?;
    if n == 0 {
        return Err(Error::Invalid("empty permutations".into()));
    }
    let mut scanner = Scanner::new(n);
    let mut best = Best::with_cap(usize::MAX);
    scanner.scan(f1, f2, 0, 1, restrict_nonneg, &mut best);
    let shifts = best.witnesses.iter().map(|w| Shift { u: w.u, v: w.v }).collect();
    Ok((best.value, shifts))
}

/// Checks both reflection identities over every shift:
/// `C_{f1,f2}(-u,v) = C_{f2,f1}(u,-v)` and
/// `C_{π(g1,g2),π(g3,g4)}(u,-v) = C_{π(g1,1/g2),π(g3,1/g4)}(u,v)`.
pub fn symmetry_check(field: &Field, a: GolombPair, b: GolombPair) -> Result<bool> {
    let inv2 = |p: GolombPair| -> Result<GolombPair> { GolombPair::new(field, p.g1, field.inv(p.g2)?) };
    let f1 = golomb_perm(field, a)?.values;
    let f2 = golomb_perm(field, b)?.values;
    let h1 = golomb_perm(field, inv2(a)?)?.values;
    let h2 = golomb_perm(field, inv2(b)?)?.values;
    let t12 = correlation_table(&f1, &f2)?;
    let t21 = correlation_table(&f2, &f1)?;
    let th = correlation_table(&h1, &h2)?;
    let n = f1.len() as i64;
    for u in 1 - n..n {
        for v in 1 - n..n {
            if t12.get(-u, v) != t21.get(u, -v) || t12.get(u, -v) != th.get(u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Elementary steps an exhaustive family scan performs.
pub fn scan_work(members: u64, n: u64, restrict_nonneg: bool) -> u128 {
    let pairs = members as u128 * members.saturating_sub(1) as u128;
    let per_pair = if restrict_nonneg {
        n as u128 * (n as u128 + 1) / 2
    } else {
        n as u128 * n as u128
    };
    pairs * per_pair
}

/// Writes a full table as CSV rows `q,g1_enc,g2_enc,g3_enc,g4_enc,u,v,count`.
pub fn write_table_csv<W: Write>(out: W, q: u32, encs: [u32; 4], table: &CorrelationTable) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
    wtr.write_record(["q", "g1_enc", "g2_enc", "g3_enc", "g4_enc", "u", "v", "count"])
        .map_err(io)?;
    for (u, v, c) in table.iter() {
        wtr.serialize((q, encs[0], encs[1], encs[2], encs[3], u, v, c))
            .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    Ok(())
}

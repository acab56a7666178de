//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use costas_core::bounds::{
    self, bound_cgq, bound_pair, character_average, exact_pair_class_max, solution_count, subfamily, theorem1_bound,
    weil_oracle, BoundMode, EquationForm, ExponentPair,
};
use costas_core::counting::{count_m, count_n, divisor_sum_bound, incidence_by_solutions, ShiftSet};
use costas_core::golomb::{
    canonical_pairs, conjugates, family_g, family_l, golomb_perm, is_conjugate_exponent, is_costas, unit_exponents,
    GolombPair,
};
use costas_core::numtheory::{classify_safe, euler_phi, prime_powers};
use costas_core::xcorr::{correlation_table, family_max, pairs_max};
use costas_core::{BoundKind, Field};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn isqrt(q: u64) -> u64 {
    (1..).take_while(|k| k * k <= q).last().unwrap_or(0)
}

fn g_max(q: u64) -> u32 {
    let f = Field::from_order(q).unwrap();
    let fam: Vec<Vec<u32>> = family_g(&f, f.generator())
        .unwrap()
        .into_iter()
        .map(|p| p.values)
        .collect();
    family_max("G", &fam, false).unwrap().value
}

fn l_max(q: u64) -> u32 {
    let f = Field::from_order(q).unwrap();
    let fam: Vec<Vec<u32>> = family_l(&f).into_iter().map(|p| p.values).collect();
    family_max("L", &fam, true).unwrap().value
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion1() -> Outcome {
    let mut notes = Vec::new();
    for (q, want) in [(9u64, 3u32), (13, 5)] {
        let (c, dt) = timed(|| g_max(q));
        let b = bound_cgq(q).unwrap();
        if c != want || b.kind != BoundKind::Exact || b.value != want as u64 {
            return Err(format!("q={q}: C={c}, bound {:?} {}", b.kind, b.value));
        }
        if dt >= Duration::from_secs(1) {
            return Err(format!("q={q} took {dt:?}"));
        }
        notes.push(format!("C(G_{q})={c} in {:.3}s", dt.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn criterion2() -> Outcome {
    let qs = [5u64, 7, 8, 11, 23, 27, 32, 47, 59, 83, 107, 128];
    let (res, dt) = timed(|| {
        for q in qs {
            let c = g_max(q) as u64;
            if !classify_safe(q).unwrap().is_safe() || c > 1 + isqrt(q) {
                return Err(format!("q={q}: C={c} > {}", 1 + isqrt(q)));
            }
        }
        Ok(())
    });
    res?;
    if dt >= Duration::from_secs(60) {
        return Err(format!("took {dt:?}"));
    }
    Ok(format!("{} safe q, {:.1}s", qs.len(), dt.as_secs_f64()))
}

fn criterion3() -> Outcome {
    let (res, dt) = timed(|| {
        let mut literal = Vec::new();
        let mut eq3 = Vec::new();
        for q in [61u64, 67, 71, 79, 83] {
            let c = l_max(q) as u64;
            if c > 1 + isqrt(q) {
                literal.push(format!("C(L_{q})={c}>{}", 1 + isqrt(q)));
            }
            if !bound_cgq(q).unwrap().accepts(c) {
                eq3.push(format!("prime q={q}: C={c}"));
            }
        }
        for q in [25u64, 27, 32, 49, 64, 81, 121, 125, 128] {
            let c = l_max(q) as u64;
            let b = bound_cgq(q).unwrap();
            if !b.accepts(c) {
                eq3.push(format!("q={q}: C={c} vs {:?} {}", b.kind, b.value));
            }
        }
        (literal, eq3)
    });
    let (literal, eq3) = res;
    let timing = format!("{:.0}s", dt.as_secs_f64());
    if dt >= Duration::from_secs(30 * 60) {
        return Err(format!("took {timing}"));
    }
    if !eq3.is_empty() {
        return Err(format!("bound (3) fails: {}", eq3.join("; ")));
    }
    if !literal.is_empty() {
        return Err(format!(
            "1+floor(sqrt q) fails for non-safe primes ({}); every q satisfies the family bound (3); {timing}",
            literal.join(", ")
        ));
    }
    Ok(timing)
}

fn criterion4() -> Outcome {
    for q in [4u64, 5, 7, 8, 9, 11, 16, 25, 27, 32, 49, 64, 81] {
        let f = Field::from_order(q).unwrap();
        let phi = euler_phi(q - 1) as usize;
        let g = family_g(&f, f.generator()).unwrap();
        let mut l: Vec<Vec<u32>> = family_l(&f).into_iter().map(|p| p.values).collect();
        l.sort();
        l.dedup();
        if g.len() != phi || l.len() != phi * phi / f.w() as usize {
            return Err(format!("q={q}: |G|={}, |L|={}", g.len(), l.len()));
        }
    }
    Ok("13 fields".into())
}

fn criterion5() -> Outcome {
    let mut checked = 0u64;
    for q in [8u64, 9, 16, 27] {
        let f = Field::from_order(q).unwrap();
        let prims = f.primitive_elements();
        let pairs: Vec<GolombPair> = prims
            .iter()
            .flat_map(|&a| prims.iter().map(move |&b| (a, b)))
            .map(|(a, b)| GolombPair::new(&f, a, b).unwrap())
            .collect();
        let perms: Vec<Vec<u32>> = pairs.iter().map(|&p| golomb_perm(&f, p).unwrap().values).collect();
        let classes: Vec<Vec<GolombPair>> = pairs.iter().map(|&p| conjugates(&f, p).members).collect();
        for i in 0..pairs.len() {
            for j in 0..pairs.len() {
                let equal = perms[i] == perms[j];
                let conj = classes[i].contains(&pairs[j]);
                if equal != conj {
                    return Err(format!("q={q}: {:?} vs {:?}", pairs[i], pairs[j]));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} ordered pairs"))
}

fn criterion6() -> Outcome {
    let mut total = 0usize;
    for q in prime_powers(4, 128) {
        let f = Field::from_order(q).unwrap();
        for p in family_l(&f) {
            if !is_costas(&p.values).unwrap() {
                return Err(format!("q={q}: {:?} not Costas", p.pair));
            }
            let t = correlation_table(&p.values, &p.values).unwrap();
            if t.get(0, 0) != q as u32 - 2 || t.max_off_origin() > 1 {
                return Err(format!("q={q}: autocorrelation off for {:?}", p.pair));
            }
            total += 1;
        }
    }
    Ok(format!("{total} distinct permutations"))
}

fn criterion7() -> Outcome {
    let mut classes = 0;
    for q in [11u64, 13, 16, 23, 27, 32] {
        let f = Field::from_order(q).unwrap();
        let units = unit_exponents(q - 1);
        for &r in &units {
            for &s in &units {
                if is_conjugate_exponent(&f, r, s) {
                    continue;
                }
                let mut rep = bound_pair(q, ExponentPair::new(q, r, s).unwrap(), BoundMode::Certified).unwrap();
                rep.exact = Some(exact_pair_class_max(&f, r, s).unwrap());
                let bad = rep.violations();
                if !bad.is_empty() {
                    return Err(format!("q={q} (r,s)=({r},{s}) C={:?} exceeds {:?}", rep.exact, bad));
                }
                classes += 1;
            }
        }
    }
    Ok(format!("{classes} exponent pairs"))
}

fn criterion8() -> Outcome {
    let f = Field::from_order(167).unwrap();
    let (spec, fam) = subfamily(&f, 0.45).unwrap();
    if fam.len() != 246 || spec.theta != 1 {
        return Err(format!("size {} theta {}", fam.len(), spec.theta));
    }
    let vals: Vec<&[u32]> = fam.iter().map(|p| p.values.as_slice()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1_167);
    let mut pairs = Vec::new();
    while pairs.len() < 600 {
        let (i, j) = (rng.gen_range(0..vals.len()), rng.gen_range(0..vals.len()));
        if i != j {
            pairs.push((i, j));
        }
    }
    let c = pairs_max("Ldelta", &vals, &pairs, true).unwrap().value;
    let bound = theorem1_bound(167, 0.45).unwrap();
    if c as f64 > bound.sharper {
        return Err(format!("sampled C={c} > {:.2}", bound.sharper));
    }
    let mut notes = vec![format!("q=167 sampled C={c} <= {:.1}", bound.sharper)];
    for q in [23u64, 27, 32, 47, 59] {
        let f = Field::from_order(q).unwrap();
        let (spec, fam) = subfamily(&f, 0.1).unwrap();
        if spec.theta != 0 {
            return Err(format!("q={q}: theta={}", spec.theta));
        }
        let vals: Vec<&[u32]> = fam.iter().map(|p| p.values.as_slice()).collect();
        let c = family_max("Ldelta", &vals, true).unwrap().value as f64;
        if c > 1.0 + (q as f64).sqrt() {
            return Err(format!("q={q}: C={c} > 1+sqrt(q)"));
        }
        notes.push(format!("q={q}:{c}"));
    }
    Ok(notes.join(", "))
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut configs = 0;
    for q in [5u64, 7, 8, 11, 13, 16, 27] {
        let f = Field::from_order(q).unwrap();
        let reps = canonical_pairs(&f);
        let mut done = 0;
        while done < 51 {
            let a = *reps.choose(&mut rng).unwrap();
            let b = *reps.choose(&mut rng).unwrap();
            let ep = ExponentPair::between(&f, a, b);
            if is_conjugate_exponent(&f, ep.r, ep.s) {
                continue;
            }
            let shifts = if done == 50 {
                ShiftSet::full(q)
            } else {
                let hi = q as i64 - 3;
                let k = rng.gen_range(1..=((q - 2) * (q - 2)) as usize);
                ShiftSet::from_pairs(q, (0..k).map(|_| (rng.gen_range(0..=hi), rng.gen_range(0..=hi)))).unwrap()
            };
            let bthr = rng.gen_range(1..=3);
            let res = count_n(&f, a, b, bthr, &shifts).unwrap();
            if !res.chain_holds() {
                return Err(format!("q={q}: chain {:?}", res.chain));
            }
            let inc = res.chain.last().unwrap().value as u64;
            if inc != incidence_by_solutions(&f, a, ep, &shifts).unwrap() {
                return Err(format!("q={q}: incidence {inc} differs from solution sum"));
            }
            done += 1;
            configs += 1;
        }
    }
    Ok(format!("{configs} configurations"))
}

fn criterion10() -> Outcome {
    let mut runs = 0;
    for q in [5u64, 7, 8, 11, 13, 16, 27] {
        let f = Field::from_order(q).unwrap();
        let top = q as u32 - 3;
        for (u, v) in [(0, 0), (1, 2), (top, top)] {
            for b in [1, 2, 4] {
                let res = count_m(&f, u, v, b).unwrap();
                if !res.chain_holds() {
                    return Err(format!("q={q} (u,v)=({u},{v}) B={b}: {:?}", res.chain));
                }
                runs += 1;
            }
        }
    }
    let qs = prime_powers(3, 512);
    for &q in &qs {
        divisor_sum_bound(q).map_err(|e| e.to_string())?;
    }
    Ok(format!("{runs} counts, divisor sums for {} prime powers", qs.len()))
}

fn criterion11() -> Outcome {
    let mut worst = 0f64;
    for q in [23u64, 27, 32, 49] {
        let f = Field::from_order(q).unwrap();
        let n = q - 1;
        let prims = f.primitive_elements();
        let units = unit_exponents(n);
        let admissible: Vec<u64> = units
            .iter()
            .copied()
            .filter(|&s| s > 1 && s % f.p() as u64 != 0)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11 * q);
        let mut averages: HashMap<(u32, u32, u64, u64, i64, i64), f64> = HashMap::new();
        for _ in 0..1000 {
            let (g1, g2) = (*prims.choose(&mut rng).unwrap(), *prims.choose(&mut rng).unwrap());
            let r = *units.choose(&mut rng).unwrap();
            let s = *admissible.choose(&mut rng).unwrap();
            let (u, v) = (rng.gen_range(0..=q as i64 - 3), rng.gen_range(0..=q as i64 - 3));
            let j = rng.gen_range(1..n) as u32;
            let ep = ExponentPair::new(q, r, s).unwrap();
            let chk = weil_oracle(&f, g1, g2, ep, u, v, j).unwrap();
            if !chk.pass {
                return Err(format!("q={q} s={s} j={j}: |sum|={} > {}", chk.magnitude, chk.bound));
            }
            worst = worst.max(chk.magnitude / chk.bound);
            let key = (g1.enc(), g2.enc(), r, s, u, v);
            let avg = *averages
                .entry(key)
                .or_insert_with(|| character_average(&f, g1, g2, ep, u, v).unwrap());
            let count = solution_count(&f, g1, g2, ep, u, v, EquationForm::Ceq).unwrap();
            if (avg - count as f64).abs() > bounds::WEIL_TOLERANCE {
                return Err(format!("q={q}: average {avg} vs count {count}"));
            }
        }
    }
    Ok(format!("4000 samples, max |sum|/(s sqrt q) = {worst:.3}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "family bound, equality branch", criterion1),
        (2, "family bound, safe branch", criterion2),
        (3, "L_q desk range", criterion3),
        (4, "family sizes", criterion4),
        (5, "conjugacy iff equal permutations", criterion5),
        (6, "Costas property and autocorrelation", criterion6),
        (7, "per-pair certified bounds", criterion7),
        (8, "subfamily bound", criterion8),
        (9, "N counting chain", criterion9),
        (10, "M strict bound and divisor sums", criterion10),
        (11, "Weil oracle and reconstruction", criterion11),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id:>2} PASS  {name}: {msg} [{secs:.2}s]"),
            Err(msg) => {
                println!("criterion {id:>2} FAIL  {name}: {msg} [{secs:.2}s]");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}

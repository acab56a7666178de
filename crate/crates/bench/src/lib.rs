//! Inputs shared by the benchmarks.

use costas_core::golomb::{family_l, golomb_perm, GolombPair};
use costas_core::Field;

/// Two distinct Golomb permutations of GF(q), from the canonical generator.
pub fn sample_pair(q: u64) -> (Vec<u32>, Vec<u32>) {
    let f = Field::from_order(q).expect("prime power");
    let g = f.generator();
    let a = GolombPair::new(&f, g, g).expect("primitive");
    let b = a.raised(&f, 1, unit_above_one(f.order() as u64)).expect("unit");
    (
        golomb_perm(&f, a).expect("valid").values,
        golomb_perm(&f, b).expect("valid").values,
    )
}

fn unit_above_one(n: u64) -> u64 {
    (2..n).find(|&k| costas_core::numtheory::gcd(k, n) == 1).unwrap_or(1)
}

pub fn l_family(q: u64) -> Vec<Vec<u32>> {
    let f = Field::from_order(q).expect("prime power");
    family_l(&f).into_iter().map(|p| p.values).collect()
}

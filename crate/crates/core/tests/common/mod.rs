#![allow(dead_code)]

use proptest::prelude::*;
use sqz_core::linalg::{divisors, Modulus};
use sqz_core::module::hom_group;
use sqz_core::{FPModule, ModuleMap};

pub fn zn(n: u64) -> Modulus {
    Modulus::new(n).unwrap()
}

/// Orders of at most `rank` cyclic summands, each a divisor of `n` above 1.
pub fn orders(n: u64, rank: usize) -> impl Strategy<Value = Vec<u64>> {
    let ds: Vec<u64> = divisors(n).into_iter().filter(|&d| d > 1).collect();
    prop::collection::vec(prop::sample::select(ds), 1..=rank)
}

pub fn module(n: u64, rank: usize) -> impl Strategy<Value = FPModule> {
    orders(n, rank).prop_map(move |o| FPModule::from_orders(zn(n), &o).unwrap())
}

/// A map chosen from `Hom(a, b)` by the coefficients `seed`.
pub fn hom_from_seed(a: &FPModule, b: &FPModule, seed: &[u64]) -> ModuleMap {
    let h = hom_group(a, b).unwrap();
    let n = h.module.modulus().get();
    let v: Vec<u64> = (0..h.module.ngens())
        .map(|i| seed.get(i).copied().unwrap_or(0) % n)
        .collect();
    h.to_map(&h.module.reduce(&v))
}

/// An element of `m` from arbitrary coefficients.
pub fn element(m: &FPModule, seed: &[u64]) -> Vec<u64> {
    let n = m.modulus().get();
    let v: Vec<u64> = (0..m.ngens())
        .map(|i| seed.get(i).copied().unwrap_or(0) % n)
        .collect();
    m.reduce(&v)
}

pub fn seeds() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), 8)
}

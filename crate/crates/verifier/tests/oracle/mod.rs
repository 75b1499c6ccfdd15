//! Brute-force oracles over finite abelian groups, written against plain
//! integer tuples so they share no code with the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// `Z/o_1 × … × Z/o_r`.
#[derive(Clone, Debug)]
pub struct Group {
    pub orders: Vec<u64>,
}

pub type Elt = Vec<u64>;

impl Group {
    pub fn new(orders: &[u64]) -> Self {
        Group {
            orders: orders.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn elements(&self) -> Vec<Elt> {
        let mut out = vec![vec![]];
        for &o in &self.orders {
            out = out
                .into_iter()
                .flat_map(|e: Elt| {
                    (0..o).map(move |x| {
                        let mut e = e.clone();
                        e.push(x);
                        e
                    })
                })
                .collect();
        }
        out
    }

    pub fn zero(&self) -> Elt {
        vec![0; self.orders.len()]
    }

    pub fn add(&self, a: &Elt, b: &Elt) -> Elt {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((x, y), o)| (x + y) % o)
            .collect()
    }

    pub fn neg(&self, a: &Elt) -> Elt {
        a.iter().zip(&self.orders).map(|(x, o)| (o - x) % o).collect()
    }

    pub fn scale(&self, a: &Elt, c: u64) -> Elt {
        a.iter().zip(&self.orders).map(|(x, o)| (x * c) % o).collect()
    }

    pub fn index(&self, a: &Elt) -> usize {
        let mut i = 0usize;
        for (x, o) in a.iter().zip(&self.orders) {
            i = i * (*o as usize) + *x as usize;
        }
        i
    }
}

/// Number of classes of `Z/N`-module extensions `0 → K → E → M → 0`,
/// counted as normalized symmetric factor sets `f: M × M → K` whose
/// extension is killed by `N`, modulo coboundaries.
pub fn ext1_factor_sets(n: u64, m: &Group, k: &Group) -> u128 {
    let els = m.elements();
    let nz: Vec<&Elt> = els.iter().filter(|e| **e != m.zero()).collect();
    // Unordered pairs of nonzero elements, including squares.
    let mut slots = Vec::new();
    for i in 0..nz.len() {
        for j in i..nz.len() {
            slots.push((m.index(nz[i]), m.index(nz[j])));
        }
    }
    let size = m.order();
    let kels = k.elements();
    let slot_of = |a: usize, b: usize| -> Option<usize> {
        if a == 0 || b == 0 {
            return None;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        slots.iter().position(|&s| s == (a, b))
    };
    let by_index: Vec<Elt> = {
        let mut v = vec![vec![]; size];
        for e in &els {
            v[m.index(e)] = e.clone();
        }
        v
    };
    let sum_idx = |a: usize, b: usize| m.index(&m.add(&by_index[a], &by_index[b]));
    let total = (kels.len() as u128).pow(slots.len() as u32);
    let mut cocycles = 0u128;
    let mut choice = vec![0usize; slots.len()];
    for _ in 0..total {
        let f = |a: usize, b: usize| -> &Elt {
            match slot_of(a, b) {
                None => &kels[0],
                Some(s) => &kels[choice[s]],
            }
        };
        let mut ok = true;
        'outer: for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    let lhs = k.add(f(a, b), f(sum_idx(a, b), c));
                    let rhs = k.add(f(b, c), f(a, sum_idx(b, c)));
                    if lhs != rhs {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            // N · (0, m) = (Σ_{i=1}^{N-1} f(m, i m), 0).
            for a in 0..size {
                let mut acc = k.zero();
                let mut multiple = a;
                for _ in 1..n {
                    acc = k.add(&acc, f(a, multiple));
                    multiple = sum_idx(multiple, a);
                }
                if acc != k.zero() {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            cocycles += 1;
        }
        for c in choice.iter_mut() {
            *c += 1;
            if *c < kels.len() {
                break;
            }
            *c = 0;
        }
    }
    // Coboundaries of normalized g: M → K, as distinct factor sets.
    let mut boundaries = BTreeSet::new();
    let gtotal = (kels.len() as u128).pow((size - 1) as u32);
    let mut g = vec![0usize; size - 1];
    for _ in 0..gtotal {
        let val = |a: usize| if a == 0 { k.zero() } else { kels[g[a - 1]].clone() };
        let fs: Vec<Elt> = slots
            .iter()
            .map(|&(a, b)| k.add(&k.add(&val(a), &val(b)), &k.neg(&val(sum_idx(a, b)))))
            .collect();
        boundaries.insert(fs);
        for c in g.iter_mut() {
            *c += 1;
            if *c < kels.len() {
                break;
            }
            *c = 0;
        }
    }
    cocycles / boundaries.len() as u128
}

/// All homomorphisms `Z/2 → E`, as the image of `1`.
fn homs_from_z2(e: &Group) -> Vec<Elt> {
    e.elements()
        .into_iter()
        .filter(|x| e.scale(x, 2) == e.zero())
        .collect()
}

/// All homomorphisms `E → Z/2`, as images of the cyclic generators.
fn homs_to_z2(e: &Group) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &o in &e.orders {
        let allowed: Vec<u64> = (0..2).filter(|&v| (o * v) % 2 == 0).collect();
        out = out
            .into_iter()
            .flat_map(|h: Vec<u64>| {
                allowed.iter().map(move |&v| {
                    let mut h = h.clone();
                    h.push(v);
                    h
                })
            })
            .collect();
    }
    out
}

/// Over `Z/N'` with `J = N·Z/N'`, the set of values `θ(ξ) ∈ Z/2` taken by
/// every extension `0 → Z/2 → E → Z/2 → 0` with `|E| = 4`, where `θ(ξ)` is
/// read off from `N · (lift of 1) = i(θ)`. Middles are `Z/4` and `Z/2²`;
/// both are `Z/N'`-modules when `4 | N'`.
pub fn z2_deformation_thetas(nprime: u64, n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for middle in [Group::new(&[4]), Group::new(&[2, 2])] {
        let exponent = *middle.orders.iter().max().unwrap();
        if nprime % exponent != 0 {
            continue;
        }
        let els = middle.elements();
        for i1 in homs_from_z2(&middle) {
            if i1 == middle.zero() {
                continue;
            }
            for p in homs_to_z2(&middle) {
                let pe = |x: &Elt| x.iter().zip(&p).map(|(a, b)| a * b).sum::<u64>() % 2;
                if pe(&i1) != 0 {
                    continue;
                }
                let kernel: Vec<&Elt> = els.iter().filter(|x| pe(x) == 0).collect();
                if kernel.len() != 2 {
                    continue;
                }
                let lifts: Vec<&Elt> = els.iter().filter(|x| pe(x) == 1).collect();
                let mut thetas = BTreeSet::new();
                for e in lifts {
                    let je = middle.scale(e, n % nprime);
                    let t = if je == middle.zero() {
                        0
                    } else if je == i1 {
                        1
                    } else {
                        panic!("J·E does not land in K");
                    };
                    thetas.insert(t);
                }
                assert_eq!(thetas.len(), 1, "θ depends on the lift");
                out.extend(thetas);
            }
        }
    }
    out
}

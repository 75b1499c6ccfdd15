//! Howell form and solver checked against brute-force row spans.

use std::collections::BTreeSet;

use proptest::prelude::*;
use sqz_core::linalg::{cyclic_orders, howell_form, kernel, solve, MatZN, Modulus};

/// Every vector `x · m` for `x` ranging over `(Z/N)^rows`.
fn span(m: &MatZN) -> BTreeSet<Vec<u64>> {
    let n = m.modulus();
    let mut out = BTreeSet::new();
    let rows = m.rows();
    let mut x = vec![0u64; rows];
    loop {
        out.insert(m.left_mul(&x));
        let mut i = 0;
        while i < rows {
            x[i] += 1;
            if x[i] < n.get() {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == rows {
            break;
        }
    }
    out
}

fn small_matrix() -> impl Strategy<Value = MatZN> {
    (prop::sample::select(vec![2u64, 4, 6, 8, 9, 12]), 1usize..4, 1usize..4).prop_flat_map(
        |(n, r, c)| {
            prop::collection::vec(prop::collection::vec(0..n, c), r).prop_map(move |rows| {
                MatZN::from_rows(Modulus::new(n).unwrap(), c, &rows).unwrap()
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn howell_rows_span_the_same_module(m in small_matrix()) {
        let h = howell_form(&m);
        prop_assert_eq!(span(&h.h), span(&m));
        prop_assert_eq!(h.transform.mul(&m).unwrap(), h.h.clone());
        prop_assert_eq!(h.back.mul(&h.h).unwrap(), m.clone());
    }

    #[test]
    fn howell_form_is_canonical(m in small_matrix(), shuffle in any::<u64>()) {
        let mut rows = m.row_vecs();
        let k = rows.len();
        rows.rotate_left((shuffle as usize) % k);
        let doubled: Vec<Vec<u64>> = rows.iter().chain(rows.iter()).cloned().collect();
        let a = MatZN::from_rows(m.modulus(), m.cols(), &rows).unwrap();
        let b = MatZN::from_rows(m.modulus(), m.cols(), &doubled).unwrap();
        prop_assert_eq!(howell_form(&a).h, howell_form(&m).h);
        prop_assert_eq!(howell_form(&b).h, howell_form(&m).h);
    }

    #[test]
    fn solver_agrees_with_span(m in small_matrix(), seed in any::<u64>()) {
        let sp = span(&m);
        let n = m.modulus().get();
        let b: Vec<u64> = (0..m.cols()).map(|j| (seed >> (8 * j)) % n).collect();
        let x = solve(&m, &b).unwrap();
        prop_assert_eq!(x.is_some(), sp.contains(&b));
        if let Some(x) = x {
            prop_assert_eq!(m.left_mul(&x), b);
        }
    }

    #[test]
    fn kernel_is_the_annihilator(m in small_matrix()) {
        let k = kernel(&m);
        for i in 0..k.rows() {
            prop_assert!(m.left_mul(k.row(i)).iter().all(|&v| v == 0));
        }
        // |ker| · |im| = N^rows.
        let ker = span(&k).len() as u128;
        let im = span(&m).len() as u128;
        prop_assert_eq!(ker * im, (m.modulus().get() as u128).pow(m.rows() as u32));
    }

    #[test]
    fn cyclic_orders_count_the_quotient(m in small_matrix()) {
        let orders = cyclic_orders(&m);
        let quotient: u128 = orders.iter().map(|&d| d as u128).product();
        let total = (m.modulus().get() as u128).pow(m.cols() as u32);
        prop_assert_eq!(quotient * span(&m).len() as u128, total);
    }
}

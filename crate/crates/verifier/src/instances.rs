//! The instance family: a square-zero pair `Z/N' → Z/N` together with two
//! `Z/N`-modules `M` and `K`.

use std::collections::BTreeSet;

use sqz_core::linalg::divisors;
use sqz_core::squarezero::SquareZeroPair;
use sqz_core::{FPModule, Result};

pub const DEFAULT_PAIRS: [(u64, u64); 6] = [(4, 2), (9, 3), (8, 4), (16, 4), (12, 6), (27, 9)];

/// One deformation problem `(A' → A, M, K)`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub pair: SquareZeroPair,
    pub m: FPModule,
    pub k: FPModule,
    pub label: String,
}

impl Instance {
    pub fn new(pair: SquareZeroPair, m: FPModule, k: FPModule) -> Result<Self> {
        for x in [&m, &k] {
            if x.modulus() != pair.n() {
                return Err(sqz_core::Error::ModulusMismatch {
                    left: x.modulus().get(),
                    right: pair.n().get(),
                });
            }
        }
        let label = format!(
            "({},{}) M={} K={}",
            pair.nprime().get(),
            pair.n().get(),
            module_label(&m),
            module_label(&k)
        );
        Ok(Instance { pair, m, k, label })
    }
}

/// `Z/a+Z/b` from the invariant factors, `0` for the zero module.
pub fn module_label(m: &FPModule) -> String {
    let f = m.invariant_factors();
    if f.is_empty() {
        return "0".into();
    }
    f.iter()
        .map(|d| format!("Z/{d}"))
        .collect::<Vec<_>>()
        .join("+")
}

/// Nonzero cyclic modules `Z/d` with `d | N` and their rank-2 sums, one per
/// isomorphism class, in order of first appearance.
pub fn module_grid(pair: &SquareZeroPair) -> Result<Vec<FPModule>> {
    let n = pair.n();
    let ds: Vec<u64> = divisors(n.get()).into_iter().filter(|&d| d > 1).collect();
    let mut shapes: Vec<Vec<u64>> = ds.iter().map(|&d| vec![d]).collect();
    for (i, &a) in ds.iter().enumerate() {
        for &b in &ds[i..] {
            shapes.push(vec![a, b]);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in shapes {
        let m = FPModule::from_orders(n, &s)?;
        if seen.insert(m.invariant_factors()) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Every `(M, K)` from the module grid of each pair, pairs in the given
/// order. An invalid pair is an error naming the violated condition.
pub fn enumerate_instances(pairs: &[(u64, u64)]) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for &(np, n) in pairs {
        let pair = SquareZeroPair::new(np, n)?;
        let grid = module_grid(&pair)?;
        for m in &grid {
            for k in &grid {
                out.push(Instance::new(pair, m.clone(), k.clone())?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_family_size() {
        let all = enumerate_instances(&DEFAULT_PAIRS).unwrap();
        assert_eq!(all.len(), 4 + 4 + 25 + 25 + 64 + 25);
        let labels: BTreeSet<_> = all.iter().map(|i| i.label.clone()).collect();
        assert_eq!(labels.len(), all.len());
    }

    #[test]
    fn grid_for_twelve_six_merges_z2_z3() {
        let pair = SquareZeroPair::new(12, 6).unwrap();
        let labels: Vec<String> = module_grid(&pair).unwrap().iter().map(module_label).collect();
        assert_eq!(labels.len(), 8);
        assert_eq!(labels.iter().filter(|l| *l == "Z/6").count(), 1);
    }

    #[test]
    fn invalid_pair_is_rejected() {
        let err = enumerate_instances(&[(8, 2)]).unwrap_err();
        assert!(matches!(err, sqz_core::Error::NotSquareZero { nprime: 8, n: 2, .. }));
    }
}

//! Naturality and linearity of θ and of the obstruction `u ⌣ ω`.

mod common;

use common::{element, hom_from_seed, module, seeds};
use proptest::prelude::*;
use sqz_core::butterfly::{class_of_two_extension, induced_butterfly};
use sqz_core::ext::{ext_group, extension_of_class, pullback_extension, pushout_extension, Extension};
use sqz_core::squarezero::{
    j_tensor_map, omega_cover_change, restrict_ext, theta, DeformationProblem, SquareZeroPair,
};
use sqz_core::FPModule;

const PAIRS: [(u64, u64); 6] = [(4, 2), (9, 3), (8, 4), (16, 4), (12, 6), (27, 9)];

fn pair_and_modules(count: usize) -> impl Strategy<Value = (SquareZeroPair, Vec<FPModule>)> {
    prop::sample::select(PAIRS.to_vec()).prop_flat_map(move |(np, n)| {
        let pair = SquareZeroPair::new(np, n).unwrap();
        (Just(pair), prop::collection::vec(module(n, 2), count))
    })
}

/// A random `A'`-extension of `M` by `K`.
fn deformation_candidate(pair: &SquareZeroPair, m: &FPModule, k: &FPModule, s: &[u64]) -> Extension {
    let top = pair.nprime();
    let g = ext_group(1, &m.restrict_scalars(top).unwrap(), &k.restrict_scalars(top).unwrap()).unwrap();
    extension_of_class(&g.class(&element(g.module(), s)).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theta_is_natural_in_m((pair, ms) in pair_and_modules(3), s in seeds(), t in seeds()) {
        let (m, k, n2) = (&ms[0], &ms[1], &ms[2]);
        let xi = deformation_candidate(&pair, m, k, &s);
        let f = hom_from_seed(n2, m, &t);
        let lhs = theta(&pair, &pullback_extension(&xi, &f.restrict_scalars(pair.nprime()).unwrap()).unwrap()).unwrap();
        let rhs = j_tensor_map(&pair, &f).unwrap().then(&theta(&pair, &xi).unwrap()).unwrap();
        prop_assert_eq!(lhs.rows(), rhs.rows());
    }

    #[test]
    fn theta_is_natural_in_k((pair, ms) in pair_and_modules(3), s in seeds(), t in seeds()) {
        let (m, k, l) = (&ms[0], &ms[1], &ms[2]);
        let xi = deformation_candidate(&pair, m, k, &s);
        let g = hom_from_seed(k, l, &t);
        let lhs = theta(&pair, &pushout_extension(&xi, &g.restrict_scalars(pair.nprime()).unwrap()).unwrap()).unwrap();
        let rhs = theta(&pair, &xi).unwrap().then(&g).unwrap();
        prop_assert_eq!(lhs.rows(), rhs.rows());
    }

    #[test]
    fn restricted_extensions_have_zero_theta((pair, ms) in pair_and_modules(2), s in seeds()) {
        let g = ext_group(1, &ms[0], &ms[1]).unwrap();
        let x = extension_of_class(&g.class(&element(g.module(), &s)).unwrap()).unwrap();
        prop_assert!(theta(&pair, &restrict_ext(&pair, &x).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn cup_omega_is_additive((pair, ms) in pair_and_modules(2), s in seeds(), t in seeds()) {
        let problem = DeformationProblem::new(pair, &ms[0], &ms[1]).unwrap();
        let hom = problem.hom();
        let u1 = hom.to_map(&element(&hom.module, &s));
        let u2 = hom.to_map(&element(&hom.module, &t));
        let class = |u: &sqz_core::ModuleMap| class_of_two_extension(&problem.cup_omega(u).unwrap()).unwrap();
        let sum = u1.add(&u2).unwrap();
        prop_assert_eq!(class(&sum), class(&u1).add(&class(&u2)).unwrap());
    }

    #[test]
    fn obstruction_matches_solvability((pair, ms) in pair_and_modules(2), s in seeds()) {
        let problem = DeformationProblem::new(pair, &ms[0], &ms[1]).unwrap();
        let hom = problem.hom();
        let u = hom.to_map(&element(&hom.module, &s));
        let solved = problem.solve(&u).unwrap();
        prop_assert_eq!(solved.is_some(), problem.obstruction_vanishes(&u).unwrap());
        if let Some(d) = solved {
            prop_assert_eq!(theta(&pair, &d.xi).unwrap(), u);
        }
    }

    #[test]
    fn omega_does_not_depend_on_the_cover((pair, ms) in pair_and_modules(1), s in seeds(), t in seeds()) {
        let m = &ms[0];
        let extra = vec![element(m, &s), element(m, &t)];
        let cm = omega_cover_change(&pair, m, &extra).unwrap();
        let b = induced_butterfly(&cm).unwrap();
        prop_assert!(b.is_valid().unwrap());
        prop_assert_eq!(
            class_of_two_extension(&cm.source).unwrap(),
            class_of_two_extension(&cm.target).unwrap()
        );
    }
}

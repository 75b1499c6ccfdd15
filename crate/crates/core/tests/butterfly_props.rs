//! Butterfly calculus on random 2-extensions built by splicing.

mod common;

use common::{element, hom_from_seed, module, seeds};
use proptest::prelude::*;
use sqz_core::butterfly::{
    baer_sum_two_extensions, butterfly_between, class_of_two_extension, comparison_map, compose,
    identity_butterfly, induced_butterfly, invert, over_restriction, pushout_two_extension,
    restrict_two_extension, restriction_map, two_isomorphism, yoneda_splice, TwoExtension,
};
use sqz_core::ext::{ext_group, extension_of_class};
use sqz_core::FPModule;

fn splice(m: &FPModule, p: &FPModule, k: &FPModule, s: &[u64], t: &[u64]) -> TwoExtension {
    let ga = ext_group(1, p, k).unwrap();
    let gm = ext_group(1, m, p).unwrap();
    let a = extension_of_class(&ga.class(&element(ga.module(), s)).unwrap()).unwrap();
    let b = extension_of_class(&gm.class(&element(gm.module(), t)).unwrap()).unwrap();
    yoneda_splice(&a, &b).unwrap()
}

/// `(M, P, K)` over one modulus with cyclic ends.
fn triple() -> impl Strategy<Value = (FPModule, FPModule, FPModule)> {
    prop::sample::select(vec![4u64, 8, 9, 6]).prop_flat_map(|n| (module(n, 1), module(n, 2), module(n, 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn induced_butterflies_keep_classes_and_invert((m, p, k) in triple(), s in seeds(), t in seeds()) {
        let x = splice(&m, &p, &k, &s, &t);
        let (canon, cmp) = comparison_map(&x).unwrap();
        let b = induced_butterfly(&cmp).unwrap();
        prop_assert!(b.is_valid().unwrap());
        prop_assert_eq!(class_of_two_extension(&canon).unwrap(), class_of_two_extension(&x).unwrap());
        let inv = invert(&b).unwrap();
        prop_assert!(inv.is_valid().unwrap());
        prop_assert!(two_isomorphism(&invert(&inv).unwrap(), &b).unwrap().is_some());
        let round = compose(&b, &inv).unwrap();
        prop_assert!(two_isomorphism(&round, &identity_butterfly(&canon).unwrap()).unwrap().is_some());
    }

    #[test]
    fn composition_is_associative((m, p, k) in triple(), s in seeds(), t in seeds()) {
        let x = splice(&m, &p, &k, &s, &t);
        let (_, cmp) = comparison_map(&x).unwrap();
        let b1 = induced_butterfly(&cmp).unwrap();
        let b2 = invert(&b1).unwrap();
        let left = compose(&compose(&b1, &b2).unwrap(), &b1).unwrap();
        let right = compose(&b1, &compose(&b2, &b1).unwrap()).unwrap();
        prop_assert!(two_isomorphism(&left, &right).unwrap().is_some());
    }

    #[test]
    fn butterflies_exist_exactly_between_equal_classes(
        (m, p, k) in triple(), s in seeds(), t in seeds(), u in seeds(), v in seeds()
    ) {
        let x = splice(&m, &p, &k, &s, &t);
        let y = splice(&m, &p, &k, &u, &v);
        let same = class_of_two_extension(&x).unwrap() == class_of_two_extension(&y).unwrap();
        match butterfly_between(&x, &y).unwrap() {
            Some(b) => {
                prop_assert!(same);
                prop_assert!(b.is_valid().unwrap());
            }
            None => prop_assert!(!same),
        }
    }

    #[test]
    fn restriction_and_pushout_are_natural(
        (m, p, k) in triple(), n2 in prop::sample::select(vec![1usize, 2]), s in seeds(), t in seeds()
    ) {
        let x = splice(&m, &p, &k, &s, &t);
        let c = class_of_two_extension(&x).unwrap();
        let nmod = FPModule::from_orders(m.modulus(), &vec![m.modulus().get(); n2]).unwrap();
        let f = hom_from_seed(&nmod, &m, &s);
        let g = hom_from_seed(&k, &p, &t);
        prop_assert_eq!(class_of_two_extension(&restrict_two_extension(&x, &f).unwrap()).unwrap(), c.pullback(&f).unwrap());
        prop_assert_eq!(class_of_two_extension(&pushout_two_extension(&x, &g).unwrap()).unwrap(), c.pushforward(&g).unwrap());
    }

    #[test]
    fn restriction_formula_agrees_with_composition((m, p, k) in triple(), s in seeds(), t in seeds()) {
        let x = splice(&m, &p, &k, &s, &t);
        let f = hom_from_seed(&m, &m, &s);
        let r = restriction_map(&x, &f).unwrap();
        let b = identity_butterfly(&r.source).unwrap();
        let direct = compose(&b, &induced_butterfly(&r).unwrap()).unwrap();
        let formula = over_restriction(&b, &x, &f).unwrap();
        prop_assert!(formula.is_valid().unwrap());
        prop_assert!(two_isomorphism(&direct, &formula).unwrap().is_some());
    }

    #[test]
    fn baer_sum_of_two_extensions_adds((m, p, k) in triple(), s in seeds(), t in seeds(), u in seeds(), v in seeds()) {
        let x = splice(&m, &p, &k, &s, &t);
        let y = splice(&m, &p, &k, &u, &v);
        let sum = baer_sum_two_extensions(&x, &y).unwrap();
        let expected = class_of_two_extension(&x).unwrap().add(&class_of_two_extension(&y).unwrap()).unwrap();
        prop_assert_eq!(class_of_two_extension(&sum).unwrap(), expected);
    }
}

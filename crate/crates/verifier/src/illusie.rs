//! The four-term sequence
//! `0 → Ext¹_A(M,K) → Ext¹_{A'}(M,K) → Hom_A(J⊗M,K) → Ext²_A(M,K)`
//! with every group and map computed explicitly, plus the composite into
//! `Ext²_{A'}(M,K)`.

use std::sync::Arc;

use sqz_core::butterfly::class_of_two_extension;
use sqz_core::ext::{class_of_extension, ext_group, extension_of_class, ExtGroup};
use sqz_core::module::ExactnessFailure;
use sqz_core::squarezero::{restrict_ext, DeformationProblem};
use sqz_core::{Complex, Error, FPModule, ModuleMap, Result};

use crate::report::{Check, GroupRecord, MapRecord, Verdict};

/// The groups and maps of the sequence. All three maps are taken over
/// `A'`, so the four groups are viewed as `A'`-modules.
#[derive(Clone, Debug)]
pub struct IllusieSequence {
    pub ext1_a: Arc<ExtGroup>,
    pub ext1_ap: Arc<ExtGroup>,
    pub hom: FPModule,
    pub ext2_a: Arc<ExtGroup>,
    /// `Ext¹_A → Ext¹_{A'}`, restriction of scalars on extensions.
    pub restrict: ModuleMap,
    /// `Ext¹_{A'} → Hom_A(J⊗M, K)`.
    pub theta: ModuleMap,
    /// `Hom_A(J⊗M, K) → Ext²_A`, `u ↦ [u ⌣ ω]`.
    pub cup: ModuleMap,
}

impl IllusieSequence {
    pub fn complex(&self) -> Result<Complex> {
        let src = self.restrict.source();
        let zero = FPModule::zero(src.modulus());
        Complex::new(vec![
            ModuleMap::zero(&zero, src),
            self.restrict.clone(),
            self.theta.clone(),
            self.cup.clone(),
        ])
    }
}

pub fn illusie_sequence(problem: &DeformationProblem) -> Result<IllusieSequence> {
    let pair = problem.pair();
    let top = pair.nprime();
    let (m, k) = (problem.m(), problem.k());
    let tm = problem.theta_matrix();
    let ext1_a = ext_group(1, m, k)?;
    let ext1_ap = tm.ext.clone();
    let ext2_a = ext_group(2, m, k)?;

    let mut rows = Vec::new();
    for c in ext1_a.generators() {
        let up = class_of_extension(&restrict_ext(pair, &extension_of_class(&c)?)?)?;
        if **up.group() != *ext1_ap {
            return Err(Error::Internal("restricted class lands in another group".into()));
        }
        rows.push(up.element().to_vec());
    }
    let restrict = ModuleMap::from_rows(
        ext1_a.module().restrict_scalars(top)?,
        ext1_ap.module().clone(),
        &rows,
    )?;

    let hom = &tm.hom;
    let mut rows = Vec::new();
    for u in hom.generator_maps() {
        let c = class_of_two_extension(&problem.cup_omega(&u)?)?;
        if **c.group() != *ext2_a {
            return Err(Error::Internal("u ⌣ ω lands in another group".into()));
        }
        rows.push(c.element().to_vec());
    }
    let cup = ModuleMap::from_rows(
        hom.module.restrict_scalars(top)?,
        ext2_a.module().restrict_scalars(top)?,
        &rows,
    )?;

    Ok(IllusieSequence {
        ext1_a,
        ext1_ap,
        hom: hom.module.clone(),
        ext2_a,
        restrict,
        theta: tm.map.clone(),
        cup,
    })
}

pub fn group_records(seq: &IllusieSequence) -> Vec<GroupRecord> {
    let rec = |name: &str, m: &FPModule| GroupRecord {
        name: name.into(),
        invariant_factors: m.invariant_factors(),
        order: m.order(),
    };
    vec![
        rec("Ext1_A(M,K)", seq.ext1_a.module()),
        rec("Ext1_A'(M,K)", seq.ext1_ap.module()),
        rec("Hom_A(J(x)M,K)", &seq.hom),
        rec("Ext2_A(M,K)", seq.ext2_a.module()),
    ]
}

pub fn map_records(seq: &IllusieSequence) -> Vec<MapRecord> {
    let rec = |name: &str, f: &ModuleMap| MapRecord {
        name: name.into(),
        matrix: f.rows(),
    };
    vec![
        rec("restrict", &seq.restrict),
        rec("theta", &seq.theta),
        rec("cup_omega", &seq.cup),
    ]
}

const NODE_NAMES: [&str; 3] = ["injectivity", "node-two", "node-three"];

/// Exactness at `Ext¹_A`, `Ext¹_{A'}` and `Hom`, each with a witness on
/// failure.
pub fn exactness_checks(seq: &IllusieSequence) -> Result<Vec<Check>> {
    let cx = seq.complex()?;
    Ok((1..=3)
        .map(|node| {
            let name = format!("exact:{}", NODE_NAMES[node - 1]);
            let verdict = match cx.exactness_at(node) {
                None => Verdict::Pass,
                Some(ExactnessFailure::NotAComplex { witness, .. }) => Verdict::fail(
                    NODE_NAMES[node - 1],
                    format!("image of generator {witness:?} is not killed by the next map"),
                ),
                Some(ExactnessFailure::KernelNotInImage { witness, .. }) => Verdict::fail(
                    NODE_NAMES[node - 1],
                    format!("{witness:?} lies in the kernel but not in the image"),
                ),
            };
            Check::new(name, verdict)
        })
        .collect())
}

/// `Ext²_A(M,K) → Ext²_{A'}(M,K)` kills every `u ⌣ ω`, checked on the
/// generators of `Hom`.
pub fn rightward_check(problem: &DeformationProblem) -> Result<Check> {
    let top = problem.pair().nprime();
    for (i, u) in problem.hom().generator_maps().into_iter().enumerate() {
        let t = problem.cup_omega(&u)?.restrict_scalars(top)?;
        let c = class_of_two_extension(&t)?;
        if !c.is_zero() {
            return Ok(Check::new(
                "exact:rightward",
                Verdict::fail(
                    "Ext2_A -> Ext2_A'",
                    format!("generator {i} of Hom: u = {:?} has nonzero image {:?}", u.rows(), c.element()),
                ),
            ));
        }
    }
    Ok(Check::new("exact:rightward", Verdict::Pass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqz_core::linalg::Modulus;
    use sqz_core::squarezero::SquareZeroPair;

    fn seq(np: u64, n: u64, m: &[u64], k: &[u64]) -> IllusieSequence {
        let pair = SquareZeroPair::new(np, n).unwrap();
        let zn = Modulus::new(n).unwrap();
        let m = FPModule::from_orders(zn, m).unwrap();
        let k = FPModule::from_orders(zn, k).unwrap();
        illusie_sequence(&DeformationProblem::new(pair, &m, &k).unwrap()).unwrap()
    }

    fn orders(s: &IllusieSequence) -> Vec<u128> {
        group_records(s).iter().map(|g| g.order).collect()
    }

    #[test]
    fn four_two() {
        let s = seq(4, 2, &[2], &[2]);
        assert_eq!(orders(&s), vec![1, 2, 2, 1]);
        assert!(s.theta.is_isomorphism());
        assert!(exactness_checks(&s).unwrap().iter().all(|c| c.verdict.is_pass()));
    }

    #[test]
    fn eight_four() {
        let s = seq(8, 4, &[2], &[2]);
        assert_eq!(orders(&s), vec![2, 2, 2, 2]);
        assert!(s.restrict.is_isomorphism());
        assert!(s.theta.is_zero());
        assert!(s.cup.is_injective());
        assert!(exactness_checks(&s).unwrap().iter().all(|c| c.verdict.is_pass()));
    }

    #[test]
    fn free_m() {
        let s = seq(9, 3, &[3], &[3]);
        assert_eq!(s.ext1_a.order(), 1);
        assert_eq!(s.ext2_a.order(), 1);
        assert!(s.theta.is_surjective());
    }
}

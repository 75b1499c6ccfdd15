//! Deformations of modules along `Z/N' → Z/N` with `N | N' | N²`.
//!
//! `A' = Z/N'`, `A = Z/N` and `J = N·A' ≅ Z/(N'/N)`. Modules over `A` are
//! given over `Z/N`; their `A'` versions come from
//! [`FPModule::restrict_scalars`]. Both keep the same generators, so a map
//! between `A`-modules has the same matrix over either ring.

use std::sync::Arc;

use crate::butterfly::{class_of_two_extension, pushout_two_extension, Butterfly, ChainMap, TwoExtension};
use crate::error::{Error, Result};
use crate::ext::{class_of_extension, ext_group, extension_of_class, generator_lifts, ExtGroup, Extension};
use crate::faults::Faults;
use crate::linalg::Modulus;
use crate::module::{
    cokernel_module, direct_sum, from_sum, hom_group, into_sum, kernel_module, FPModule,
    HomModule, ModuleMap,
};

/// The rings `A' = Z/N'` and `A = Z/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SquareZeroPair {
    nprime: Modulus,
    n: Modulus,
}

impl SquareZeroPair {
    pub fn new(nprime: u64, n: u64) -> Result<Self> {
        let bad = |reason: &str| Error::NotSquareZero {
            nprime,
            n,
            reason: reason.into(),
        };
        let big = Modulus::new(nprime)?;
        let small = Modulus::new(n)?;
        if nprime % n != 0 {
            return Err(bad("N does not divide N'"));
        }
        if (n as u128 * n as u128) % nprime as u128 != 0 {
            return Err(bad("N' does not divide N², so J² ≠ 0"));
        }
        Ok(SquareZeroPair {
            nprime: big,
            n: small,
        })
    }

    pub fn nprime(&self) -> Modulus {
        self.nprime
    }
    pub fn n(&self) -> Modulus {
        self.n
    }
    /// `|J| = N'/N`.
    pub fn j_order(&self) -> u64 {
        self.nprime.get() / self.n.get()
    }
    /// `J` as the cyclic `A'`-module on the generator `N ∈ A'`.
    pub fn j(&self) -> FPModule {
        FPModule::cyclic(self.nprime, self.j_order()).expect("N'/N divides N'")
    }
    /// `J → A'`, `1 ↦ N`.
    pub fn j_inclusion(&self) -> ModuleMap {
        ModuleMap::from_rows(
            self.j(),
            FPModule::free(self.nprime, 1),
            &[vec![self.n.get() % self.nprime.get()]],
        )
        .expect("N'/N · N = 0 in Z/N'")
    }

    fn check_base(&self, m: &FPModule) -> Result<()> {
        if m.modulus() != self.n {
            return Err(Error::ModulusMismatch {
                left: self.n.get(),
                right: m.modulus().get(),
            });
        }
        Ok(())
    }

    fn check_top(&self, m: &FPModule) -> Result<()> {
        if m.modulus() != self.nprime {
            return Err(Error::ModulusMismatch {
                left: self.nprime.get(),
                right: m.modulus().get(),
            });
        }
        Ok(())
    }

    /// `V ⊗_{A'} A = V/JV` as an `A`-module, same generators.
    pub fn reduce_module(&self, v: &FPModule) -> Result<FPModule> {
        self.check_top(v)?;
        let mut rows = v.relation_rows();
        for i in 0..v.ngens() {
            let mut r = vec![0; v.ngens()];
            r[i] = self.n.get() % self.nprime.get();
            rows.push(r);
        }
        FPModule::from_relations(self.nprime, v.ngens(), &rows)?.descend(self.n)
    }

    /// `f ⊗_{A'} A`.
    pub fn reduce_map(&self, f: &ModuleMap) -> Result<ModuleMap> {
        let s = self.reduce_module(f.source())?;
        let t = self.reduce_module(f.target())?;
        ModuleMap::new(s, t, f.matrix().with_modulus(self.n))
    }
}

/// `J ⊗_{A'} M`, computed over `A'` and then presented over `A`. Generator
/// `i` is `N ⊗ g_i`.
pub fn j_tensor(pair: &SquareZeroPair, m: &FPModule) -> Result<FPModule> {
    pair.check_base(m)?;
    let res = m.restrict_scalars(pair.nprime)?;
    let j = pair.j_order() % pair.nprime.get();
    let mut rows = res.relation_rows();
    for i in 0..m.ngens() {
        let mut r = vec![0; m.ngens()];
        r[i] = j;
        rows.push(r);
    }
    let over_top = FPModule::from_relations(pair.nprime, m.ngens(), &rows)?;
    over_top.descend(pair.n)
}

/// `J ⊗ f` for `f: M → M₂` over `A`.
pub fn j_tensor_map(pair: &SquareZeroPair, f: &ModuleMap) -> Result<ModuleMap> {
    let s = j_tensor(pair, f.source())?;
    let t = j_tensor(pair, f.target())?;
    ModuleMap::new(s, t, f.matrix().clone())
}

/// The `A`-modules underlying an `A'`-module killed by `N`.
fn descend(pair: &SquareZeroPair, v: &FPModule) -> Result<FPModule> {
    pair.check_top(v)?;
    v.descend(pair.n)
}

/// `θ(ξ): J ⊗ M → K` for an extension of `A'`-modules whose ends are killed
/// by `N`: lift each generator of `M`, multiply by `N`, read the result in `K`.
pub fn theta(pair: &SquareZeroPair, xi: &Extension) -> Result<ModuleMap> {
    let m = descend(pair, xi.m())?;
    let k = descend(pair, xi.k())?;
    let jm = j_tensor(pair, &m)?;
    let lifts = generator_lifts(xi.projection())?;
    let e = xi.e();
    let mut rows = Vec::with_capacity(lifts.len());
    for l in &lifts {
        let v = e.scale(l, pair.n.get() % pair.nprime.get());
        let kv = xi.inclusion().preimage(&v).ok_or_else(|| {
            Error::NotExact("N times a lift does not come from K".into())
        })?;
        rows.push(kv);
    }
    // Well-definedness here is independence of the lift: two lifts differ
    // by an element of K, which N kills.
    ModuleMap::from_rows(jm, k, &rows)
}

/// Restriction of scalars `Ext¹_A → Ext¹_{A'}` at the level of extensions.
pub fn restrict_ext(pair: &SquareZeroPair, x: &Extension) -> Result<Extension> {
    pair.check_base(x.k())?;
    x.restrict_scalars(pair.nprime)
}

/// The free cover used for `ω`, with the pieces needed downstream.
#[derive(Clone, Debug)]
pub struct Omega {
    /// `0 → J⊗M → L̄ → H̄ → M → 0` over `A`.
    pub two_extension: TwoExtension,
    /// `L → H` over `A'`, with `H` free.
    pub l_to_h: ModuleMap,
    /// `H → M` over `A'`.
    pub h_to_m: ModuleMap,
}

impl Omega {
    pub fn jm(&self) -> &FPModule {
        self.two_extension.k()
    }
    pub fn lbar(&self) -> &FPModule {
        self.two_extension.x()
    }
    pub fn hbar(&self) -> &FPModule {
        self.two_extension.y()
    }
    pub fn l(&self) -> &FPModule {
        self.l_to_h.source()
    }
    pub fn h(&self) -> &FPModule {
        self.l_to_h.target()
    }
}

/// `ω` built from the free `A'`-module on the generators of `M`.
pub fn omega(pair: &SquareZeroPair, m: &FPModule) -> Result<Omega> {
    omega_with_cover(pair, m, &[])
}

/// `ω` built from the free `A'`-module on the generators of `M` plus one
/// extra generator for each element of `extra`, mapping to that element.
pub fn omega_with_cover(pair: &SquareZeroPair, m: &FPModule, extra: &[Vec<u64>]) -> Result<Omega> {
    pair.check_base(m)?;
    let top = pair.nprime;
    let g = m.ngens();
    let rank = g + extra.len();
    let res_m = m.restrict_scalars(top)?;
    let h = FPModule::free(top, rank);
    let mut cover_rows: Vec<Vec<u64>> = (0..g).map(|i| m.unit(i)).collect();
    for e in extra {
        m.check_element(e)?;
        cover_rows.push(m.reduce(e));
    }
    let h_to_m = ModuleMap::from_rows(h.clone(), res_m, &cover_rows)?;
    let (_, l_to_h) = kernel_module(&h_to_m)?;
    let l = l_to_h.source().clone();
    let lbar = pair.reduce_module(&l)?;
    let hbar = pair.reduce_module(&h)?;
    let iota = pair.reduce_map(&l_to_h)?;
    let hbar_m = ModuleMap::from_rows(hbar, m.clone(), &cover_rows)?;
    let jm = j_tensor(pair, m)?;
    // N ⊗ g_i ↦ class of N·e_i, which lies in L because N kills M.
    let mut rows = Vec::with_capacity(g);
    for i in 0..g {
        let mut v = vec![0; rank];
        v[i] = pair.n.get() % top.get();
        let lv = l_to_h
            .preimage(&v)
            .ok_or_else(|| Error::Internal("N·e_i is not in the kernel".into()))?;
        rows.push(lv);
    }
    let a = ModuleMap::from_rows(jm, lbar, &rows)?;
    let t = TwoExtension::new(a, iota, hbar_m)
        .map_err(|e| Error::Internal(format!("ω is not exact: {e}")))?;
    Ok(Omega {
        two_extension: t,
        l_to_h,
        h_to_m,
    })
}

/// The chain map `ω' → ω` from the larger cover of [`omega_with_cover`] to
/// the standard one, obtained by reducing a map of free resolutions mod `J`.
pub fn omega_cover_change(pair: &SquareZeroPair, m: &FPModule, extra: &[Vec<u64>]) -> Result<ChainMap> {
    let big = omega_with_cover(pair, m, extra)?;
    let std = omega(pair, m)?;
    let g = m.ngens();
    let mut h_rows: Vec<Vec<u64>> = (0..g)
        .map(|i| {
            let mut v = vec![0; g];
            v[i] = 1;
            v
        })
        .collect();
    for e in extra {
        h_rows.push(m.reduce(e));
    }
    let fh = ModuleMap::from_rows(big.h().clone(), std.h().clone(), &h_rows)?;
    let fl = big
        .l_to_h
        .then(&fh)?
        .factor_through(&std.l_to_h)?
        .ok_or_else(|| Error::Internal("cover map does not preserve kernels".into()))?;
    ChainMap::new(
        big.two_extension,
        std.two_extension,
        pair.reduce_map(&fl)?,
        pair.reduce_map(&fh)?,
        ModuleMap::identity(m),
    )
}

/// The pushout `u ⌣ ω` of `ω` along `u: J⊗M → K`.
pub fn cup_omega(pair: &SquareZeroPair, m: &FPModule, u: &ModuleMap) -> Result<TwoExtension> {
    cup_omega_with(pair, &omega(pair, m)?, u, Faults::NONE)
}

pub fn cup_omega_with(
    pair: &SquareZeroPair,
    omega: &Omega,
    u: &ModuleMap,
    faults: Faults,
) -> Result<TwoExtension> {
    pair.check_base(u.target())?;
    if u.source() != omega.jm() {
        return Err(Error::BoundaryMismatch("u does not start at J ⊗ M".into()));
    }
    let along = if faults.cup_omega_sign { u.neg() } else { u.clone() };
    pushout_two_extension(&omega.two_extension, &along)
}

/// `θ` as a homomorphism `Ext¹_{A'}(M, K) → Hom_A(J⊗M, K)`.
#[derive(Clone, Debug)]
pub struct ThetaMatrix {
    pub ext: Arc<ExtGroup>,
    pub hom: HomModule,
    /// `ext.module() → hom.module`, with the target viewed over `A'`.
    pub map: ModuleMap,
}

pub fn theta_matrix(pair: &SquareZeroPair, m: &FPModule, k: &FPModule) -> Result<ThetaMatrix> {
    pair.check_base(m)?;
    pair.check_base(k)?;
    let ext = ext_group(1, &m.restrict_scalars(pair.nprime)?, &k.restrict_scalars(pair.nprime)?)?;
    let hom = hom_group(&j_tensor(pair, m)?, k)?;
    let mut rows = Vec::new();
    for c in ext.generators() {
        let t = theta(pair, &extension_of_class(&c)?)?;
        rows.push(hom.from_map(&t)?);
    }
    let target = hom.module.restrict_scalars(pair.nprime)?;
    let map = ModuleMap::from_rows(ext.module().clone(), target, &rows)?;
    Ok(ThetaMatrix { ext, hom, map })
}

/// An `A'`-extension `ξ` of `M` by `K` with `θ(ξ) = u`.
#[derive(Clone, Debug)]
pub struct Deformation {
    pub u: ModuleMap,
    pub xi: Extension,
}

/// Everything about one `(pair, M, K)` that does not depend on `u`.
#[derive(Clone, Debug)]
pub struct DeformationProblem {
    pair: SquareZeroPair,
    m: FPModule,
    k: FPModule,
    omega: Omega,
    theta: ThetaMatrix,
    faults: Faults,
}

impl DeformationProblem {
    pub fn new(pair: SquareZeroPair, m: &FPModule, k: &FPModule) -> Result<Self> {
        Self::with_faults(pair, m, k, Faults::NONE)
    }

    pub fn with_faults(pair: SquareZeroPair, m: &FPModule, k: &FPModule, faults: Faults) -> Result<Self> {
        Ok(DeformationProblem {
            pair,
            m: m.clone(),
            k: k.clone(),
            omega: omega(&pair, m)?,
            theta: theta_matrix(&pair, m, k)?,
            faults,
        })
    }

    pub fn pair(&self) -> &SquareZeroPair {
        &self.pair
    }
    pub fn m(&self) -> &FPModule {
        &self.m
    }
    pub fn k(&self) -> &FPModule {
        &self.k
    }
    pub fn omega(&self) -> &Omega {
        &self.omega
    }
    pub fn theta_matrix(&self) -> &ThetaMatrix {
        &self.theta
    }
    /// `Hom_A(J⊗M, K)`.
    pub fn hom(&self) -> &HomModule {
        &self.theta.hom
    }

    pub fn cup_omega(&self, u: &ModuleMap) -> Result<TwoExtension> {
        cup_omega_with(&self.pair, &self.omega, u, self.faults)
    }

    /// Whether `u ⌣ ω` vanishes in `Ext²_A(M, K)`.
    pub fn obstruction_vanishes(&self, u: &ModuleMap) -> Result<bool> {
        Ok(class_of_two_extension(&self.cup_omega(u)?)?.is_zero())
    }

    /// Solves `θ(x) = u` in `Ext¹_{A'}` and demands agreement with the
    /// vanishing of `u ⌣ ω`.
    pub fn solve(&self, u: &ModuleMap) -> Result<Option<Deformation>> {
        let uv = self.theta.hom.from_map(u)?;
        let x = self.theta.map.preimage(&uv);
        let vanishes = self.obstruction_vanishes(u)?;
        if x.is_some() != vanishes {
            return Err(Error::Internal(format!(
                "θ-solvability ({}) disagrees with vanishing of u ⌣ ω ({vanishes})",
                x.is_some()
            )));
        }
        let Some(x) = x else { return Ok(None) };
        let xi = extension_of_class(&self.theta.ext.class(&x)?)?;
        let t = theta(&self.pair, &xi)?;
        if t != *u {
            return Err(Error::Internal("θ of the solution is not u".into()));
        }
        Ok(Some(Deformation { u: u.clone(), xi }))
    }

    /// `β`: the deformation built from a butterfly `u ⌣ ω → 0̄`.
    ///
    /// `P = H ⊕_L Q` with `L → Q` through `L̄ → X_u → Q`; `M'` is the kernel
    /// of `P → H̄` given by reduction on `H` and the wing on `Q`, and maps to
    /// `M` through `H`. The result is checked to satisfy `θ(ξ) = u`.
    pub fn extension_from_splitting(&self, u: &ModuleMap, b: &Butterfly) -> Result<Extension> {
        let xi = self.beta(u, b)?;
        let t = theta(&self.pair, &xi)?;
        if t != *u {
            return Err(Error::Internal(format!(
                "β gives θ = {:?}, expected {:?}",
                t.rows(),
                u.rows()
            )));
        }
        Ok(xi)
    }

    /// The construction behind [`Self::extension_from_splitting`], without
    /// the final check.
    pub fn beta(&self, u: &ModuleMap, b: &Butterfly) -> Result<Extension> {
        let top = self.pair.nprime;
        let om = &self.omega;
        let src = b.source();
        if !b.target().is_trivial() {
            return Err(Error::NotTrivialTarget);
        }
        if let Some(d) = b.defect()? {
            return Err(Error::InvalidButterfly(format!("{d:?}")));
        }
        if src.k() != &self.k
            || src.m() != &self.m
            || src.y() != om.hbar()
            || u.target() != &self.k
            || src.x().ngens() != om.lbar().ngens() + self.k.ngens()
        {
            return Err(Error::BoundaryMismatch(
                "butterfly does not start at u ⌣ ω".into(),
            ));
        }
        let nl = om.lbar().ngens();
        let units: Vec<Vec<u64>> = (0..nl)
            .map(|i| {
                let mut v = vec![0; src.x().ngens()];
                v[i] = 1;
                v
            })
            .collect();
        let lbar_x = ModuleMap::from_rows(om.lbar().clone(), src.x().clone(), &units)?;
        let lbar_q = lbar_x.then(b.x_q())?;
        let l_lbar = ModuleMap::new(
            om.l().clone(),
            om.lbar().restrict_scalars(top)?,
            crate::linalg::MatZN::identity(top, om.l().ngens()),
        )?;
        let lambda = l_lbar.then(&lbar_q.restrict_scalars(top)?)?;
        let q = b.q().restrict_scalars(top)?;
        let h = om.h().clone();
        let sum = direct_sum(top, &[h.clone(), q.clone()])?;
        let (p, proj) = cokernel_module(&into_sum(&[om.l_to_h.clone(), lambda.neg()])?)?;
        let hbar = om.hbar().restrict_scalars(top)?;
        let h_hbar = ModuleMap::new(h.clone(), hbar.clone(), crate::linalg::MatZN::identity(top, h.ngens()))?;
        let to_hbar = from_sum(&[h_hbar, b.q_y().restrict_scalars(top)?])?.with_modules(p.clone(), hbar)?;
        let (_, incl) = kernel_module(&to_hbar)?;
        let res_m = self.m.restrict_scalars(top)?;
        let g = from_sum(&[om.h_to_m.clone(), ModuleMap::zero(&q, &res_m)])?
            .with_modules(p, res_m)?;
        let proj_m = incl.then(&g)?;
        let k_p = b
            .xp_q()
            .restrict_scalars(top)?
            .then(&sum.injections[1])?
            .then(&proj)?;
        let k_mp = k_p
            .factor_through(&incl)?
            .ok_or_else(|| Error::Internal("K does not land in M'".into()))?;
        Extension::new(k_mp, proj_m)
    }
}

pub fn theta_class_zero(pair: &SquareZeroPair, x: &Extension) -> Result<bool> {
    Ok(theta(pair, x)?.is_zero())
}

/// Whether the class of an `A`-extension stays nonzero over `A'`.
pub fn restriction_is_nonzero(pair: &SquareZeroPair, x: &Extension) -> Result<bool> {
    Ok(!class_of_extension(&restrict_ext(pair, x)?)?.is_zero())
}

pub fn solve_deformation(
    pair: &SquareZeroPair,
    m: &FPModule,
    k: &FPModule,
    u: &ModuleMap,
) -> Result<Option<Deformation>> {
    DeformationProblem::new(*pair, m, k)?.solve(u)
}

pub fn extension_from_splitting(
    pair: &SquareZeroPair,
    m: &FPModule,
    k: &FPModule,
    u: &ModuleMap,
    b: &Butterfly,
) -> Result<Extension> {
    DeformationProblem::new(*pair, m, k)?.extension_from_splitting(u, b)
}

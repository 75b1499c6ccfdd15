//! Extensions, Ext groups and the dictionary between them.
//!
//! `Ext^p(M, K)` is computed from the cached free resolution `F_•` of `M` as
//! `ker(d*_{p+1}) / im(d*_p)` inside `Hom(F_p, K) = K^{rank F_p}`. A cochain
//! is stored as the concatenated images of the basis of `F_p`.

use std::sync::Arc;

use crate::cache::{ext_group_cached, resolution};
use crate::error::{Error, Result};
use crate::linalg::{MatZN, Solver};
use crate::module::{
    cokernel_module, direct_sum, from_sum, into_sum, kernel_module, Complex, FPModule,
    FreeResolution, HomConstraint, ModuleMap, solve_hom,
};

/// `K^a` as a module.
pub(crate) fn power(k: &FPModule, a: usize) -> FPModule {
    direct_sum(k.modulus(), &vec![k.clone(); a])
        .expect("same modulus")
        .module
}

/// The cochain map `Hom(F_{i-1}, K) → Hom(F_i, K)`, `φ ↦ d_i·φ`.
fn cochain_map(res: &FreeResolution, i: usize, k: &FPModule) -> ModuleMap {
    let d = res.differential(i);
    let id = MatZN::identity(k.modulus(), k.ngens());
    let m = d.transpose().kronecker(&id);
    ModuleMap::new_trusted(
        power(k, res.rank(i - 1)),
        power(k, res.rank(i)),
        m.row_vecs(),
    )
}

/// `Ext^p(M, K)` with the data needed to move between group elements and
/// cocycles.
#[derive(Debug)]
pub struct ExtGroup {
    p: usize,
    m: FPModule,
    k: FPModule,
    resolution: Arc<FreeResolution>,
    /// `Z → K^{rank F_p}`.
    cocycles: ModuleMap,
    /// `K^{rank F_{p-1}} → K^{rank F_p}` (from the zero module when `p = 0`).
    coboundary: ModuleMap,
    group: FPModule,
    /// `Z ↠ group`.
    projection: ModuleMap,
    /// Row `i` is a cocycle (in `Z` coordinates) representing generator `i`.
    representatives: MatZN,
}

impl PartialEq for ExtGroup {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.k == other.k
    }
}

/// The shared `Ext^p(M, K)`.
pub fn ext_group(p: usize, m: &FPModule, k: &FPModule) -> Result<Arc<ExtGroup>> {
    if m.modulus() != k.modulus() {
        return Err(Error::ModulusMismatch {
            left: m.modulus().get(),
            right: k.modulus().get(),
        });
    }
    ext_group_cached(p, m, k, || ExtGroup::compute(p, m, k).map(Arc::new))
}

impl ExtGroup {
    fn compute(p: usize, m: &FPModule, k: &FPModule) -> Result<ExtGroup> {
        let res = resolution(m, p + 1);
        let d_next = cochain_map(&res, p + 1, k);
        let (_, cocycles) = kernel_module(&d_next)?;
        let coboundary = if p == 0 {
            ModuleMap::zero(&FPModule::zero(m.modulus()), &power(k, res.rank(0)))
        } else {
            cochain_map(&res, p, k)
        };
        let into_z = coboundary
            .factor_through(&cocycles)?
            .ok_or_else(|| Error::Internal("coboundary is not a cocycle".into()))?;
        let (quot, proj) = cokernel_module(&into_z)?;
        let (group, to, from) = quot.simplify();
        let projection = proj.then(&to)?;
        Ok(ExtGroup {
            p,
            m: m.clone(),
            k: k.clone(),
            resolution: res,
            cocycles,
            coboundary,
            group,
            projection,
            representatives: from.matrix().clone(),
        })
    }

    pub fn degree(&self) -> usize {
        self.p
    }
    pub fn source(&self) -> &FPModule {
        &self.m
    }
    pub fn coefficients(&self) -> &FPModule {
        &self.k
    }
    pub fn resolution(&self) -> &FreeResolution {
        &self.resolution
    }
    /// The group as a finitely presented module.
    pub fn module(&self) -> &FPModule {
        &self.group
    }
    pub fn order(&self) -> u128 {
        self.group.order()
    }
    pub fn invariant_factors(&self) -> Vec<u64> {
        self.group.invariant_factors()
    }
    pub fn cochains(&self) -> &FPModule {
        self.cocycles.target()
    }
    /// `K^{rank F_{p-1}} → K^{rank F_p}`.
    pub fn coboundary_map(&self) -> &ModuleMap {
        &self.coboundary
    }

    pub fn zero(self: &Arc<Self>) -> ExtClass {
        ExtClass {
            group: self.clone(),
            element: self.group.zero_element(),
        }
    }

    pub fn class(self: &Arc<Self>, element: &[u64]) -> Result<ExtClass> {
        self.group.check_element(element)?;
        Ok(ExtClass {
            group: self.clone(),
            element: self.group.reduce(element),
        })
    }

    pub fn generators(self: &Arc<Self>) -> Vec<ExtClass> {
        (0..self.group.ngens())
            .map(|i| self.class(&self.group.unit(i)).expect("unit vector"))
            .collect()
    }

    /// Class of a cochain `F_p → K`; fails if it is not a cocycle.
    pub fn class_of_cocycle(self: &Arc<Self>, cochain: &[u64]) -> Result<ExtClass> {
        self.cochains().check_element(cochain)?;
        let z = self.cocycles.preimage(cochain).ok_or_else(|| {
            Error::NotWellDefined(format!("cochain {cochain:?} is not a cocycle"))
        })?;
        Ok(ExtClass {
            group: self.clone(),
            element: self.projection.apply(&z),
        })
    }

    /// A cocycle representing the group element `e`.
    pub fn cocycle_of(&self, e: &[u64]) -> Vec<u64> {
        let z = self.representatives.left_mul(e);
        self.cocycles.apply(&self.cocycles.source().reduce(&z))
    }

    /// Some `h` with `d*_p(h) = c_1 - c_2`, when the cocycles are cohomologous.
    pub fn coboundary_witness(&self, c1: &[u64], c2: &[u64]) -> Option<Vec<u64>> {
        let diff = self.cochains().sub(c1, c2);
        self.coboundary.preimage(&diff)
    }
}

/// An element of some `Ext^p(M, K)`.
#[derive(Clone, Debug)]
pub struct ExtClass {
    group: Arc<ExtGroup>,
    element: Vec<u64>,
}

impl PartialEq for ExtClass {
    fn eq(&self, other: &Self) -> bool {
        *self.group == *other.group && self.element == other.element
    }
}
impl Eq for ExtClass {}

impl ExtClass {
    pub fn group(&self) -> &Arc<ExtGroup> {
        &self.group
    }
    pub fn degree(&self) -> usize {
        self.group.p
    }
    /// Canonical coordinates in [`ExtGroup::module`].
    pub fn element(&self) -> &[u64] {
        &self.element
    }
    pub fn cocycle(&self) -> Vec<u64> {
        self.group.cocycle_of(&self.element)
    }
    pub fn is_zero(&self) -> bool {
        self.element.iter().all(|&x| x == 0)
    }

    fn same_group(&self, other: &ExtClass) -> Result<()> {
        if *self.group != *other.group {
            return Err(Error::BoundaryMismatch(
                "classes live in different Ext groups".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtClass) -> Result<ExtClass> {
        self.same_group(other)?;
        Ok(ExtClass {
            group: self.group.clone(),
            element: self.group.group.add(&self.element, &other.element),
        })
    }

    pub fn neg(&self) -> ExtClass {
        ExtClass {
            group: self.group.clone(),
            element: self.group.group.neg(&self.element),
        }
    }

    pub fn scale(&self, c: u64) -> ExtClass {
        ExtClass {
            group: self.group.clone(),
            element: self.group.group.scale(&self.element, c),
        }
    }

    /// The class pushed forward along `g: K → L` (cocycle followed by `g`).
    pub fn pushforward(&self, g: &ModuleMap) -> Result<ExtClass> {
        let k = &self.group.k;
        if g.source() != k {
            return Err(Error::BoundaryMismatch("pushforward source is not K".into()));
        }
        let c = self.cocycle();
        let a = self.group.resolution.rank(self.degree());
        let kn = k.ngens();
        let mut out = Vec::with_capacity(a * g.target().ngens());
        for i in 0..a {
            out.extend(g.apply(&c[i * kn..(i + 1) * kn]));
        }
        let target = ext_group(self.degree(), &self.group.m, g.target())?;
        target.class_of_cocycle(&out)
    }

    /// The class pulled back along `f: N → M`, through a comparison map of
    /// resolutions.
    pub fn pullback(&self, f: &ModuleMap) -> Result<ExtClass> {
        if f.target() != &self.group.m {
            return Err(Error::BoundaryMismatch("pullback target is not M".into()));
        }
        let p = self.degree();
        let src = resolution(f.source(), p + 1);
        let chain = lift_chain_map(f, &src, &self.group.resolution, p)?;
        let phi = &chain[p];
        let c = self.cocycle();
        let k = &self.group.k;
        let kn = k.ngens();
        let a = self.group.resolution.rank(p);
        let mut out = Vec::new();
        for r in 0..phi.rows() {
            let mut acc = k.zero_element();
            for i in 0..a {
                let coef = phi.get(r, i);
                if coef != 0 {
                    acc = k.add(&acc, &k.scale(&c[i * kn..(i + 1) * kn], coef));
                }
            }
            out.extend(acc);
        }
        let target = ext_group(p, f.source(), k)?;
        target.class_of_cocycle(&out)
    }
}

/// Matrices `φ_i: F_i(N) → F_i(M)`, `0 <= i <= upto`, lifting `f: N → M`
/// with `d_i φ_{i-1} = φ_i d_i`.
pub fn lift_chain_map(
    f: &ModuleMap,
    src: &FreeResolution,
    tgt: &FreeResolution,
    upto: usize,
) -> Result<Vec<MatZN>> {
    if upto > src.depth().min(tgt.depth()) {
        return Err(Error::UnsupportedDegree(upto));
    }
    let modulus = f.modulus();
    let mut out = vec![f.matrix().clone()];
    for i in 1..=upto {
        let prev = &out[i - 1];
        let d_src = src.differential(i);
        let d_tgt = tgt.differential(i);
        let solver = Solver::new(d_tgt);
        let composite = d_src.mul(prev)?;
        let mut rows = Vec::with_capacity(d_src.rows());
        for r in 0..composite.rows() {
            let x = solver.solve(composite.row(r)).ok_or_else(|| {
                Error::Internal(format!("comparison map does not lift in degree {i}"))
            })?;
            rows.push(x);
        }
        out.push(MatZN::from_rows(modulus, d_tgt.rows(), &rows)?);
    }
    Ok(out)
}

/// `0 → K → E → M → 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    i: ModuleMap,
    p: ModuleMap,
}

impl Extension {
    /// Validates exactness.
    pub fn new(i: ModuleMap, p: ModuleMap) -> Result<Self> {
        let c = Complex::short(&i, &p)?;
        if let Some(fail) = c.exactness() {
            return Err(Error::NotExact(format!("{fail:?}")));
        }
        Ok(Extension { i, p })
    }

    /// `0 → K → K ⊕ M → M → 0`.
    pub fn split(k: &FPModule, m: &FPModule) -> Result<Self> {
        let s = direct_sum(k.modulus(), &[k.clone(), m.clone()])?;
        Ok(Extension {
            i: s.injections[0].clone(),
            p: s.projections[1].clone(),
        })
    }

    pub fn k(&self) -> &FPModule {
        self.i.source()
    }
    pub fn e(&self) -> &FPModule {
        self.i.target()
    }
    pub fn m(&self) -> &FPModule {
        self.p.target()
    }
    pub fn inclusion(&self) -> &ModuleMap {
        &self.i
    }
    pub fn projection(&self) -> &ModuleMap {
        &self.p
    }

    pub fn restrict_scalars(&self, to: crate::linalg::Modulus) -> Result<Extension> {
        Extension::new(self.i.restrict_scalars(to)?, self.p.restrict_scalars(to)?)
    }
}

/// Lifts of the generators of `M` to `E`, as rows.
pub(crate) fn generator_lifts(p: &ModuleMap) -> Result<Vec<Vec<u64>>> {
    let m = p.target();
    (0..m.ngens())
        .map(|g| {
            p.preimage(&m.unit(g))
                .ok_or_else(|| Error::NotExact("projection is not surjective".into()))
        })
        .collect()
}

/// Combination `Σ r_i · rows_i` reduced in `module`.
pub(crate) fn combine(module: &FPModule, coeffs: &[u64], rows: &[Vec<u64>]) -> Vec<u64> {
    let modulus = module.modulus();
    let mut acc = vec![0u64; module.ngens()];
    for (c, row) in coeffs.iter().zip(rows) {
        if *c == 0 {
            continue;
        }
        for (a, &x) in acc.iter_mut().zip(row) {
            *a = modulus.add(*a, modulus.mul(*c, x));
        }
    }
    module.reduce(&acc)
}

/// The cocycle `F_1 → K` of an extension, from lifting `F_0 → M` to `E`.
pub fn cocycle_of_extension(x: &Extension) -> Result<Vec<u64>> {
    let lifts = generator_lifts(&x.p)?;
    let rel = x.m().relations();
    let mut out = Vec::new();
    for r in 0..rel.rows() {
        let v = combine(x.e(), rel.row(r), &lifts);
        let k = x.i.preimage(&v).ok_or_else(|| {
            Error::NotExact("relation lift does not come from K".into())
        })?;
        out.extend(k);
    }
    Ok(out)
}

pub fn class_of_extension(x: &Extension) -> Result<ExtClass> {
    let g = ext_group(1, x.m(), x.k())?;
    g.class_of_cocycle(&cocycle_of_extension(x)?)
}

/// The extension `(F_0 ⊕ K) / ⟨(d_1 y, -c(y))⟩` of a degree-one class.
pub fn extension_of_class(c: &ExtClass) -> Result<Extension> {
    if c.degree() != 1 {
        return Err(Error::UnsupportedDegree(c.degree()));
    }
    extension_of_cocycle(c.group.source(), c.group.coefficients(), &c.cocycle())
}

pub fn extension_of_cocycle(m: &FPModule, k: &FPModule, cocycle: &[u64]) -> Result<Extension> {
    let modulus = m.modulus();
    let a = m.ngens();
    let kn = k.ngens();
    let rel = m.relations();
    let mut rows = Vec::new();
    for r in 0..rel.rows() {
        let mut row = rel.row(r).to_vec();
        row.extend(cocycle[r * kn..(r + 1) * kn].iter().map(|&v| modulus.neg(v)));
        rows.push(row);
    }
    for r in k.relation_rows() {
        let mut row = vec![0; a];
        row.extend(r);
        rows.push(row);
    }
    let e = FPModule::from_rows_trusted(modulus, a + kn, rows);
    let i_rows = (0..kn)
        .map(|j| {
            let mut v = vec![0; a + kn];
            v[a + j] = 1;
            v
        })
        .collect();
    let p_rows: Vec<Vec<u64>> = (0..a + kn)
        .map(|j| {
            let mut v = vec![0; a];
            if j < a {
                v[j] = 1;
            }
            v
        })
        .collect();
    let i = ModuleMap::new_trusted(k.clone(), e.clone(), i_rows);
    let p = ModuleMap::from_rows(e, m.clone(), &p_rows)?;
    Extension::new(i, p)
}

/// `x ⊕ y` as an extension of `M ⊕ M'` by `K ⊕ K'`.
pub fn direct_sum_extension(x: &Extension, y: &Extension) -> Result<Extension> {
    Extension::new(
        crate::module::diag_sum(&[x.i.clone(), y.i.clone()])?,
        crate::module::diag_sum(&[x.p.clone(), y.p.clone()])?,
    )
}

/// Pullback along the diagonal of `x ⊕ y`, then pushout along the sum map.
pub fn baer_sum(x: &Extension, y: &Extension) -> Result<Extension> {
    if x.k() != y.k() || x.m() != y.m() {
        return Err(Error::BoundaryMismatch(
            "Baer sum needs equal end modules".into(),
        ));
    }
    let sum = direct_sum_extension(x, y)?;
    let idm = ModuleMap::identity(x.m());
    let diag = into_sum(&[idm.clone(), idm])?;
    let idk = ModuleMap::identity(x.k());
    let plus = from_sum(&[idk.clone(), idk])?;
    let pulled = pullback_extension(&sum, &diag)?;
    pushout_extension(&pulled, &plus)
}

/// `E ×_M N` over `f: N → M`.
pub fn pullback_extension(x: &Extension, f: &ModuleMap) -> Result<Extension> {
    if f.target() != x.m() {
        return Err(Error::BoundaryMismatch("pullback target is not M".into()));
    }
    let diff = from_sum(&[x.p.clone(), f.neg()])?;
    let (e2, incl) = kernel_module(&diff)?;
    let ksum = into_sum(&[x.i.clone(), ModuleMap::zero(x.k(), f.source())])?;
    let i2 = ksum
        .factor_through(&incl)?
        .ok_or_else(|| Error::Internal("K does not land in the fiber product".into()))?;
    let sum = direct_sum(f.modulus(), &[x.e().clone(), f.source().clone()])?;
    let p2 = incl.then(&sum.projections[1])?;
    let _ = e2;
    Extension::new(i2, p2)
}

/// `E ⊕_K L` along `g: K → L`.
pub fn pushout_extension(x: &Extension, g: &ModuleMap) -> Result<Extension> {
    if g.source() != x.k() {
        return Err(Error::BoundaryMismatch("pushout source is not K".into()));
    }
    let amalg = into_sum(&[x.i.clone(), g.neg()])?;
    let (e2, proj) = cokernel_module(&amalg)?;
    let sum = direct_sum(g.modulus(), &[x.e().clone(), g.target().clone()])?;
    let i2 = sum.injections[1].then(&proj)?;
    let pm = from_sum(&[x.p.clone(), ModuleMap::zero(g.target(), x.m())])?;
    let p2 = pm.with_modules(e2, x.m().clone())?;
    Extension::new(i2, p2)
}

/// A section `s: M → E` of the projection, if one exists.
pub fn splitting(x: &Extension) -> Result<Option<ModuleMap>> {
    solve_hom(
        x.m(),
        x.e(),
        &[HomConstraint {
            pre: None,
            post: Some(x.p.clone()),
            value: ModuleMap::identity(x.m()),
        }],
    )
}

/// An isomorphism `E → E'` compatible with both inclusions and projections.
pub fn extension_isomorphism(x: &Extension, y: &Extension) -> Result<Option<ModuleMap>> {
    if x.k() != y.k() || x.m() != y.m() {
        return Err(Error::BoundaryMismatch(
            "extensions have different end modules".into(),
        ));
    }
    solve_hom(
        x.e(),
        y.e(),
        &[
            HomConstraint {
                pre: Some(x.i.clone()),
                post: None,
                value: y.i.clone(),
            },
            HomConstraint {
                pre: None,
                post: Some(y.p.clone()),
                value: x.p.clone(),
            },
        ],
    )
}

/// The composition product of `alpha ∈ Ext^1(P, K)` and `mu ∈ Ext^1(M, P)`
/// in `Ext^2(M, K)`.
pub fn yoneda_product(alpha: &ExtClass, mu: &ExtClass) -> Result<ExtClass> {
    if alpha.degree() != 1 || mu.degree() != 1 {
        return Err(Error::UnsupportedDegree(alpha.degree().max(mu.degree())));
    }
    let p_mod = alpha.group.source();
    if mu.group.coefficients() != p_mod {
        return Err(Error::BoundaryMismatch("middle modules differ".into()));
    }
    let m = mu.group.source();
    let k = alpha.group.coefficients();
    let res_m = resolution(m, 3);
    let res_p = resolution(p_mod, 2);
    let modulus = m.modulus();
    // ψ_0: F_1(M) → F_0(P) lifts the cocycle of mu (raw coordinates).
    let mu_c = mu.cocycle();
    let pn = p_mod.ngens();
    let psi0: Vec<Vec<u64>> = (0..res_m.rank(1))
        .map(|r| mu_c[r * pn..(r + 1) * pn].to_vec())
        .collect();
    let psi0 = MatZN::from_rows(modulus, pn, &psi0)?;
    // ψ_1: F_2(M) → F_1(P) with d_2 ψ_0 = ψ_1 d_1.
    let comp = res_m.differential(2).mul(&psi0)?;
    let solver = Solver::new(res_p.differential(1));
    let mut psi1 = Vec::new();
    for r in 0..comp.rows() {
        psi1.push(
            solver
                .solve(comp.row(r))
                .ok_or_else(|| Error::Internal("product lift failed".into()))?,
        );
    }
    let a_c = alpha.cocycle();
    let kn = k.ngens();
    let alpha_rows: Vec<Vec<u64>> = (0..res_p.rank(1))
        .map(|r| a_c[r * kn..(r + 1) * kn].to_vec())
        .collect();
    let mut out = Vec::new();
    for row in &psi1 {
        out.extend(combine(k, row, &alpha_rows));
    }
    ext_group(2, m, k)?.class_of_cocycle(&out)
}

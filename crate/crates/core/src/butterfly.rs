//! 2-extensions and butterflies between them.
//!
//! A 2-extension is an exact `0 → K → X → Y → M → 0`. A butterfly from
//! `ξ = (K, X, Y, M)` to `η = (K, X', Y', M')` over `φ: M → M'` is a module
//! `Q` with wings `X → Q`, `X' → Q`, `Q → Y`, `Q → Y'` such that
//!
//! * `0 → X' → Q → Y → 0` is exact and `X → Q → Y'` is a complex, which
//!   is exact as `0 → X → Q → Y' → 0` whenever `φ` is an isomorphism,
//! * `X → Q → Y` is `X → Y` and `X' → Q → Y'` is `X' → Y'`,
//! * the two composites `K → Q` agree,
//! * `Q → Y → M → M'` is minus `Q → Y' → M'`.
//!
//! The last sign is forced by the induced butterfly of a chain map, whose
//! map `X' ⊕ Y → Y'` is `X' → Y'` minus `Y → Y'`.

use crate::error::{Error, Result};
use crate::ext::{combine, ext_group, generator_lifts, ExtClass, Extension};
use crate::faults::Faults;
use crate::module::{
    cokernel_module, diag_sum, direct_sum, from_sum, into_sum, kernel_module, solve_hom, Complex,
    FPModule, HomConstraint, ModuleMap,
};

/// `0 → K →a X →b Y →c M → 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoExtension {
    a: ModuleMap,
    b: ModuleMap,
    c: ModuleMap,
}

impl TwoExtension {
    pub fn new(a: ModuleMap, b: ModuleMap, c: ModuleMap) -> Result<Self> {
        let cx = Complex::with_zero_ends(vec![a.clone(), b.clone(), c.clone()])?;
        if let Some(fail) = cx.exactness() {
            return Err(Error::NotExact(format!("{fail:?}")));
        }
        Ok(TwoExtension { a, b, c })
    }

    /// `0 → K = K →0 M = M → 0`.
    pub fn trivial(k: &FPModule, m: &FPModule) -> Self {
        TwoExtension {
            a: ModuleMap::identity(k),
            b: ModuleMap::zero(k, m),
            c: ModuleMap::identity(m),
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == Self::trivial(self.k(), self.m())
    }

    pub fn k(&self) -> &FPModule {
        self.a.source()
    }
    pub fn x(&self) -> &FPModule {
        self.a.target()
    }
    pub fn y(&self) -> &FPModule {
        self.b.target()
    }
    pub fn m(&self) -> &FPModule {
        self.c.target()
    }
    /// `K → X`.
    pub fn a(&self) -> &ModuleMap {
        &self.a
    }
    /// `X → Y`.
    pub fn b(&self) -> &ModuleMap {
        &self.b
    }
    /// `Y → M`.
    pub fn c(&self) -> &ModuleMap {
        &self.c
    }

    /// `P = coker(K → X) = im(X → Y)` with the two halves
    /// `0 → K → X → P → 0` and `0 → P → Y → M → 0`.
    pub fn halves(&self) -> Result<(Extension, Extension)> {
        let (_, incl, co) = crate::module::image_module(&self.b)?;
        Ok((
            Extension::new(self.a.clone(), co)?,
            Extension::new(incl, self.c.clone())?,
        ))
    }

    pub fn restrict_scalars(&self, to: crate::linalg::Modulus) -> Result<TwoExtension> {
        TwoExtension::new(
            self.a.restrict_scalars(to)?,
            self.b.restrict_scalars(to)?,
            self.c.restrict_scalars(to)?,
        )
    }
}

/// The lifts `φ_0: F_0 → Y`, `φ_1: F_1 → X` and the cocycle `φ_2: F_2 → K`
/// obtained from a 2-extension and the cached resolution of `M`.
#[derive(Clone, Debug)]
pub struct TwoExtensionLift {
    pub phi0: Vec<Vec<u64>>,
    pub phi1: Vec<Vec<u64>>,
    pub cocycle: Vec<u64>,
}

pub fn lift_two_extension(t: &TwoExtension) -> Result<TwoExtensionLift> {
    let res = crate::cache::resolution(t.m(), 3);
    let phi0 = generator_lifts(&t.c)?;
    let d1 = res.differential(1);
    let mut phi1 = Vec::with_capacity(d1.rows());
    for r in 0..d1.rows() {
        let v = combine(t.y(), d1.row(r), &phi0);
        phi1.push(t.b.preimage(&v).ok_or_else(|| {
            Error::NotExact("relation lift does not come from X".into())
        })?);
    }
    let d2 = res.differential(2);
    let mut cocycle = Vec::new();
    for r in 0..d2.rows() {
        let v = combine(t.x(), d2.row(r), &phi1);
        cocycle.extend(t.a.preimage(&v).ok_or_else(|| {
            Error::NotExact("syzygy lift does not come from K".into())
        })?);
    }
    Ok(TwoExtensionLift {
        phi0,
        phi1,
        cocycle,
    })
}

pub fn class_of_two_extension(t: &TwoExtension) -> Result<ExtClass> {
    let g = ext_group(2, t.m(), t.k())?;
    g.class_of_cocycle(&lift_two_extension(t)?.cocycle)
}

/// `0 → K → (K ⊕ F_1)/⟨(c z, -d_2 z)⟩ → F_0 → M → 0`.
pub fn two_extension_of_cocycle(m: &FPModule, k: &FPModule, cocycle: &[u64]) -> Result<TwoExtension> {
    let modulus = m.modulus();
    let res = crate::cache::resolution(m, 3);
    let kn = k.ngens();
    let a1 = res.rank(1);
    let a0 = res.rank(0);
    let d2 = res.differential(2);
    let mut rows = Vec::new();
    for r in k.relation_rows() {
        let mut row = r;
        row.extend(std::iter::repeat_n(0, a1));
        rows.push(row);
    }
    for z in 0..d2.rows() {
        let mut row = cocycle[z * kn..(z + 1) * kn].to_vec();
        row.extend(d2.row(z).iter().map(|&v| modulus.neg(v)));
        rows.push(row);
    }
    let x = FPModule::from_rows_trusted(modulus, kn + a1, rows);
    let f0 = FPModule::free(modulus, a0);
    let a_rows = (0..kn)
        .map(|j| {
            let mut v = vec![0; kn + a1];
            v[j] = 1;
            v
        })
        .collect();
    let d1 = res.differential(1);
    let b_rows: Vec<Vec<u64>> = (0..kn)
        .map(|_| vec![0; a0])
        .chain((0..a1).map(|y| d1.row(y).to_vec()))
        .collect();
    let a = ModuleMap::new_trusted(k.clone(), x.clone(), a_rows);
    let b = ModuleMap::from_rows(x, f0.clone(), &b_rows)?;
    let c = ModuleMap::new_trusted(f0, m.clone(), ModuleMap::identity(m).rows());
    TwoExtension::new(a, b, c)
}

pub fn two_extension_of_class(c: &ExtClass) -> Result<TwoExtension> {
    if c.degree() != 2 {
        return Err(Error::UnsupportedDegree(c.degree()));
    }
    two_extension_of_cocycle(c.group().source(), c.group().coefficients(), &c.cocycle())
}

/// Splices `0 → K → X → P → 0` and `0 → P → Y → M → 0`.
pub fn yoneda_splice(gamma: &Extension, m: &Extension) -> Result<TwoExtension> {
    if gamma.m() != m.k() {
        return Err(Error::BoundaryMismatch(
            "splice needs the same middle module".into(),
        ));
    }
    TwoExtension::new(
        gamma.inclusion().clone(),
        gamma.projection().then(m.inclusion())?,
        m.projection().clone(),
    )
}

/// Pullback along `f: N → M`: `Y` becomes `Y ×_M N`.
pub fn restrict_two_extension(t: &TwoExtension, f: &ModuleMap) -> Result<TwoExtension> {
    Ok(restriction_map(t, f)?.source)
}

/// The chain map `t|_N → t` over `f: N → M`.
pub fn restriction_map(t: &TwoExtension, f: &ModuleMap) -> Result<ChainMap> {
    if f.target() != t.m() {
        return Err(Error::BoundaryMismatch("restriction target is not M".into()));
    }
    let diff = from_sum(&[t.c.clone(), f.neg()])?;
    let (_, incl) = kernel_module(&diff)?;
    let xy = into_sum(&[t.b.clone(), ModuleMap::zero(t.x(), f.source())])?;
    let b2 = xy
        .factor_through(&incl)?
        .ok_or_else(|| Error::Internal("X does not land in the fiber product".into()))?;
    let sum = direct_sum(f.modulus(), &[t.y().clone(), f.source().clone()])?;
    let c2 = incl.then(&sum.projections[1])?;
    let fy = incl.then(&sum.projections[0])?;
    let restricted = TwoExtension::new(t.a.clone(), b2, c2)?;
    ChainMap::new(
        restricted,
        t.clone(),
        ModuleMap::identity(t.x()),
        fy,
        f.clone(),
    )
}

/// Pushout along `g: K → L`: `X` becomes `X ⊕_K L`.
pub fn pushout_two_extension(t: &TwoExtension, g: &ModuleMap) -> Result<TwoExtension> {
    if g.source() != t.k() {
        return Err(Error::BoundaryMismatch("pushout source is not K".into()));
    }
    let amalg = into_sum(&[t.a.clone(), g.neg()])?;
    let (x2, proj) = cokernel_module(&amalg)?;
    let sum = direct_sum(g.modulus(), &[t.x().clone(), g.target().clone()])?;
    let a2 = sum.injections[1].then(&proj)?;
    let bm = from_sum(&[t.b.clone(), ModuleMap::zero(g.target(), t.y())])?;
    let b2 = bm.with_modules(x2, t.y().clone())?;
    TwoExtension::new(a2, b2, t.c.clone())
}

pub fn direct_sum_two_extension(s: &TwoExtension, t: &TwoExtension) -> Result<TwoExtension> {
    TwoExtension::new(
        diag_sum(&[s.a.clone(), t.a.clone()])?,
        diag_sum(&[s.b.clone(), t.b.clone()])?,
        diag_sum(&[s.c.clone(), t.c.clone()])?,
    )
}

/// Componentwise sum, pulled back along the diagonal and pushed out along
/// the sum map.
pub fn baer_sum_two_extensions(s: &TwoExtension, t: &TwoExtension) -> Result<TwoExtension> {
    if s.k() != t.k() || s.m() != t.m() {
        return Err(Error::BoundaryMismatch(
            "Baer sum needs equal end modules".into(),
        ));
    }
    let sum = direct_sum_two_extension(s, t)?;
    let idm = ModuleMap::identity(s.m());
    let idk = ModuleMap::identity(s.k());
    let pulled = restrict_two_extension(&sum, &into_sum(&[idm.clone(), idm])?)?;
    pushout_two_extension(&pulled, &from_sum(&[idk.clone(), idk])?)
}

/// A morphism of 2-extensions that is the identity on `K`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: TwoExtension,
    pub target: TwoExtension,
    pub fx: ModuleMap,
    pub fy: ModuleMap,
    pub fm: ModuleMap,
}

impl ChainMap {
    pub fn new(
        source: TwoExtension,
        target: TwoExtension,
        fx: ModuleMap,
        fy: ModuleMap,
        fm: ModuleMap,
    ) -> Result<Self> {
        if source.k() != target.k() {
            return Err(Error::NotChainMap("the K terms differ".into()));
        }
        let squares = [
            (source.a.then(&fx)?, target.a.clone(), "K square"),
            (source.b.then(&fy)?, fx.then(&target.b)?, "X-Y square"),
            (source.c.then(&fm)?, fy.then(&target.c)?, "Y-M square"),
        ];
        for (l, r, name) in squares {
            if l != r {
                return Err(Error::NotChainMap(format!("{name} does not commute")));
            }
        }
        Ok(ChainMap {
            source,
            target,
            fx,
            fy,
            fm,
        })
    }

    pub fn identity(t: &TwoExtension) -> Self {
        ChainMap {
            source: t.clone(),
            target: t.clone(),
            fx: ModuleMap::identity(t.x()),
            fy: ModuleMap::identity(t.y()),
            fm: ModuleMap::identity(t.m()),
        }
    }
}

/// Which butterfly condition failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ButterflyDefect {
    Shape(String),
    /// `0 → X' → Q → Y → 0` is not exact.
    NeSwDiagonal(String),
    /// `X → Q → Y'` is not exact, or not even a complex when `M → M'`
    /// is not an isomorphism.
    NwSeDiagonal(String),
    North,
    South,
    West,
    East,
}

#[derive(Clone, Debug)]
pub struct Butterfly {
    source: TwoExtension,
    target: TwoExtension,
    over: ModuleMap,
    q: FPModule,
    x_q: ModuleMap,
    xp_q: ModuleMap,
    q_y: ModuleMap,
    q_yp: ModuleMap,
}

impl Butterfly {
    /// Assembles and validates a butterfly.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        source: TwoExtension,
        target: TwoExtension,
        over: ModuleMap,
        x_q: ModuleMap,
        xp_q: ModuleMap,
        q_y: ModuleMap,
        q_yp: ModuleMap,
    ) -> Result<Self> {
        let b = Self::from_parts(source, target, over, x_q, xp_q, q_y, q_yp);
        match b.defect()? {
            None => Ok(b),
            Some(d) => Err(Error::InvalidButterfly(format!("{d:?}"))),
        }
    }

    /// Assembles without validating.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        source: TwoExtension,
        target: TwoExtension,
        over: ModuleMap,
        x_q: ModuleMap,
        xp_q: ModuleMap,
        q_y: ModuleMap,
        q_yp: ModuleMap,
    ) -> Self {
        Butterfly {
            source,
            target,
            over,
            q: x_q.target().clone(),
            x_q,
            xp_q,
            q_y,
            q_yp,
        }
    }

    pub fn source(&self) -> &TwoExtension {
        &self.source
    }
    pub fn target(&self) -> &TwoExtension {
        &self.target
    }
    /// `M → M'`.
    pub fn over(&self) -> &ModuleMap {
        &self.over
    }
    pub fn q(&self) -> &FPModule {
        &self.q
    }
    /// `X → Q`.
    pub fn x_q(&self) -> &ModuleMap {
        &self.x_q
    }
    /// `X' → Q`.
    pub fn xp_q(&self) -> &ModuleMap {
        &self.xp_q
    }
    /// `Q → Y`.
    pub fn q_y(&self) -> &ModuleMap {
        &self.q_y
    }
    /// `Q → Y'`.
    pub fn q_yp(&self) -> &ModuleMap {
        &self.q_yp
    }

    /// The first violated condition, or `None` for a valid butterfly.
    pub fn defect(&self) -> Result<Option<ButterflyDefect>> {
        let (s, t) = (&self.source, &self.target);
        let m = s.k().modulus();
        for mm in [t.k().modulus(), self.q.modulus()] {
            if mm != m {
                return Err(Error::ModulusMismatch {
                    left: m.get(),
                    right: mm.get(),
                });
            }
        }
        let shape = [
            (s.k() == t.k(), "K terms differ"),
            (self.over.source() == s.m() && self.over.target() == t.m(), "over map"),
            (self.x_q.source() == s.x() && self.x_q.target() == &self.q, "X wing"),
            (self.xp_q.source() == t.x() && self.xp_q.target() == &self.q, "X' wing"),
            (self.q_y.source() == &self.q && self.q_y.target() == s.y(), "Y wing"),
            (self.q_yp.source() == &self.q && self.q_yp.target() == t.y(), "Y' wing"),
        ];
        for (ok, what) in shape {
            if !ok {
                return Ok(Some(ButterflyDefect::Shape(what.into())));
            }
        }
        if let Some(f) = Complex::short(&self.xp_q, &self.q_y)?.exactness() {
            return Ok(Some(ButterflyDefect::NeSwDiagonal(format!("{f:?}"))));
        }
        let nw_se = Complex::short(&self.x_q, &self.q_yp)?;
        if self.over.is_isomorphism() {
            if let Some(f) = nw_se.exactness() {
                return Ok(Some(ButterflyDefect::NwSeDiagonal(format!("{f:?}"))));
            }
        } else if !nw_se.is_complex() {
            return Ok(Some(ButterflyDefect::NwSeDiagonal(
                "X → Q → Y' is not zero".into(),
            )));
        }
        if self.x_q.then(&self.q_y)? != s.b {
            return Ok(Some(ButterflyDefect::North));
        }
        if self.xp_q.then(&self.q_yp)? != t.b {
            return Ok(Some(ButterflyDefect::South));
        }
        if s.a.then(&self.x_q)? != t.a.then(&self.xp_q)? {
            return Ok(Some(ButterflyDefect::West));
        }
        let east_left = self.q_y.then(&s.c)?.then(&self.over)?;
        let east_right = self.q_yp.then(&t.c)?.neg();
        if east_left != east_right {
            return Ok(Some(ButterflyDefect::East));
        }
        Ok(None)
    }

    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.defect()?.is_none())
    }

    /// Replaces `Q` by a presentation with fewer generators.
    fn simplified(self) -> Result<Self> {
        let (q2, to, from) = self.q.simplify();
        if q2 == self.q {
            return Ok(self);
        }
        Ok(Butterfly {
            q: q2,
            x_q: self.x_q.then(&to)?,
            xp_q: self.xp_q.then(&to)?,
            q_y: from.then(&self.q_y)?,
            q_yp: from.then(&self.q_yp)?,
            ..self
        })
    }
}

pub fn validate_butterfly(b: &Butterfly) -> Result<bool> {
    b.is_valid()
}

/// `Q = X' ⊕ Y`, `X → Q` is `(f_X, b)`, `Q → Y'` is `b'` minus `f_Y`.
pub fn induced_butterfly(f: &ChainMap) -> Result<Butterfly> {
    induced_butterfly_with(f, Faults::NONE)
}

pub fn induced_butterfly_with(f: &ChainMap, faults: Faults) -> Result<Butterfly> {
    let (s, t) = (&f.source, &f.target);
    let modulus = s.k().modulus();
    let sum = direct_sum(modulus, &[t.x().clone(), s.y().clone()])?;
    let x_q = into_sum(&[f.fx.clone(), s.b.clone()])?;
    let xp_q = sum.injections[0].clone();
    let q_y = sum.projections[1].clone();
    let fy = if faults.induced_projection_sign {
        f.fy.clone()
    } else {
        f.fy.neg()
    };
    let q_yp = from_sum(&[t.b.clone(), fy])?;
    Butterfly::new(s.clone(), t.clone(), f.fm.clone(), x_q, xp_q, q_y, q_yp)
}

pub fn identity_butterfly(t: &TwoExtension) -> Result<Butterfly> {
    induced_butterfly(&ChainMap::identity(t))
}

/// `Q ⊕^{X'}_{Y'} Q'`: the cokernel of `X' → Q ×_{Y'} Q'`.
pub fn compose(b1: &Butterfly, b2: &Butterfly) -> Result<Butterfly> {
    if b1.target != b2.source {
        return Err(Error::BoundaryMismatch(
            "middle 2-extensions differ".into(),
        ));
    }
    let modulus = b1.q.modulus();
    let diff = from_sum(&[b1.q_yp.clone(), b2.q_y.neg()])?;
    let (_, incl) = kernel_module(&diff)?;
    let sum = direct_sum(modulus, &[b1.q.clone(), b2.q.clone()])?;
    let mid = into_sum(&[b1.xp_q.clone(), b2.x_q.clone()])?;
    let j = mid
        .factor_through(&incl)?
        .ok_or_else(|| Error::Internal("X' does not land in the fiber product".into()))?;
    let (qc, proj) = cokernel_module(&j)?;
    let x_in = into_sum(&[b1.x_q.clone(), ModuleMap::zero(b1.source.x(), &b2.q)])?
        .factor_through(&incl)?
        .ok_or_else(|| Error::Internal("X does not land in the fiber product".into()))?;
    let xpp_in = into_sum(&[ModuleMap::zero(b2.target.x(), &b1.q), b2.xp_q.neg()])?
        .factor_through(&incl)?
        .ok_or_else(|| Error::Internal("X'' does not land in the fiber product".into()))?;
    let to_y = incl.then(&sum.projections[0])?.then(&b1.q_y)?;
    let to_ypp = incl.then(&sum.projections[1])?.then(&b2.q_yp)?.neg();
    let b = Butterfly::new(
        b1.source.clone(),
        b2.target.clone(),
        b1.over.then(&b2.over)?,
        x_in.then(&proj)?,
        xpp_in.then(&proj)?,
        to_y.with_modules(qc.clone(), b1.source.y().clone())?,
        to_ypp.with_modules(qc, b2.target.y().clone())?,
    )?;
    b.simplified()
}

/// The same `Q` read upside down.
pub fn invert(b: &Butterfly) -> Result<Butterfly> {
    Butterfly::new(
        b.target.clone(),
        b.source.clone(),
        b.over.inverse()?,
        b.xp_q.clone(),
        b.x_q.clone(),
        b.q_yp.clone(),
        b.q_y.clone(),
    )
}

/// An isomorphism `Q_1 → Q_2` compatible with all four wings.
pub fn two_isomorphism(b1: &Butterfly, b2: &Butterfly) -> Result<Option<ModuleMap>> {
    if b1.source != b2.source || b1.target != b2.target || b1.over != b2.over {
        return Ok(None);
    }
    solve_hom(
        &b1.q,
        &b2.q,
        &[
            HomConstraint {
                pre: Some(b1.x_q.clone()),
                post: None,
                value: b2.x_q.clone(),
            },
            HomConstraint {
                pre: Some(b1.xp_q.clone()),
                post: None,
                value: b2.xp_q.clone(),
            },
            HomConstraint {
                pre: None,
                post: Some(b2.q_y.clone()),
                value: b1.q_y.clone(),
            },
            HomConstraint {
                pre: None,
                post: Some(b2.q_yp.clone()),
                value: b1.q_yp.clone(),
            },
        ],
    )
}

/// A butterfly `ξ → 0̄` read as a trivialisation: `Q` is an extension of
/// `Y` by `K` and of `M` by `X`.
#[derive(Clone, Debug)]
pub struct SplitWitness {
    /// `0 → K → Q → Y → 0`.
    pub over_y: Extension,
    /// `0 → X → Q → M → 0`.
    pub over_m: Extension,
}

pub fn is_split_butterfly(b: &Butterfly) -> Result<Option<SplitWitness>> {
    if !b.target.is_trivial() {
        return Err(Error::NotTrivialTarget);
    }
    if !b.is_valid()? {
        return Ok(None);
    }
    Ok(Some(SplitWitness {
        over_y: Extension::new(b.xp_q.clone(), b.q_y.clone())?,
        over_m: Extension::new(b.x_q.clone(), b.q_yp.clone())?,
    }))
}

/// The chain map from the 2-extension built on the lifted cocycle of `t`
/// to `t` itself.
pub fn comparison_map(t: &TwoExtension) -> Result<(TwoExtension, ChainMap)> {
    let lift = lift_two_extension(t)?;
    let canon = two_extension_of_cocycle(t.m(), t.k(), &lift.cocycle)?;
    let kn = t.k().ngens();
    let mut fx_rows = Vec::with_capacity(canon.x().ngens());
    for j in 0..kn {
        fx_rows.push(t.a.apply(&t.k().unit(j)));
    }
    fx_rows.extend(lift.phi1.iter().cloned());
    let fx = ModuleMap::from_rows(canon.x().clone(), t.x().clone(), &fx_rows)?;
    let fy = ModuleMap::from_rows(canon.y().clone(), t.y().clone(), &lift.phi0)?;
    let fm = ModuleMap::identity(t.m());
    let cm = ChainMap::new(canon.clone(), t.clone(), fx, fy, fm)?;
    Ok((canon, cm))
}

/// A butterfly `ξ → η` over the identity of `M`, or `None` when the classes
/// differ.
pub fn butterfly_between(xi: &TwoExtension, eta: &TwoExtension) -> Result<Option<Butterfly>> {
    if xi.k() != eta.k() || xi.m() != eta.m() {
        return Err(Error::BoundaryMismatch(
            "2-extensions have different end modules".into(),
        ));
    }
    let (canon_xi, cmp_xi) = comparison_map(xi)?;
    let (canon_eta, cmp_eta) = comparison_map(eta)?;
    let g = ext_group(2, xi.m(), xi.k())?;
    let c_xi = lift_two_extension(xi)?.cocycle;
    let c_eta = lift_two_extension(eta)?.cocycle;
    let Some(h) = g.coboundary_witness(&c_eta, &c_xi) else {
        return Ok(None);
    };
    // (k, f) ↦ (k - h(f), f) carries the canonical form of ξ to that of η.
    let k = xi.k();
    let kn = k.ngens();
    let modulus = k.modulus();
    let a1 = canon_xi.x().ngens() - kn;
    let mut rows = Vec::with_capacity(kn + a1);
    for j in 0..kn {
        let mut v = vec![0; kn + a1];
        v[j] = 1;
        rows.push(v);
    }
    for y in 0..a1 {
        let mut v: Vec<u64> = h[y * kn..(y + 1) * kn]
            .iter()
            .map(|&e| modulus.neg(e))
            .collect();
        v.extend((0..a1).map(|i| u64::from(i == y)));
        rows.push(v);
    }
    let fx = ModuleMap::from_rows(canon_xi.x().clone(), canon_eta.x().clone(), &rows)?;
    let psi = ChainMap::new(
        canon_xi.clone(),
        canon_eta,
        fx,
        ModuleMap::identity(canon_xi.y()),
        ModuleMap::identity(xi.m()),
    )?;
    let back = invert(&induced_butterfly(&cmp_xi)?)?;
    let mid = compose(&induced_butterfly(&psi)?, &induced_butterfly(&cmp_eta)?)?;
    compose(&back, &mid).map(Some)
}

/// A butterfly from `t` to the trivial 2-extension, when the class of `t`
/// vanishes.
pub fn splitting_butterfly(t: &TwoExtension) -> Result<Option<Butterfly>> {
    butterfly_between(t, &TwoExtension::trivial(t.k(), t.m()))
}

/// For 2-extensions whose maps `Y → M` and `Y' → M` both split, the
/// butterfly `Q = (X' ⊕_K X) ⊕ M` with `Q → Y` given by `b` and a section
/// `s`, and `Q → Y'` by `b'` and minus a section `s'`.
pub fn local_existence_butterfly(xi: &TwoExtension, eta: &TwoExtension) -> Result<Butterfly> {
    if xi.k() != eta.k() || xi.m() != eta.m() {
        return Err(Error::BoundaryMismatch(
            "2-extensions have different end modules".into(),
        ));
    }
    let section = |t: &TwoExtension| -> Result<ModuleMap> {
        solve_hom(
            t.m(),
            t.y(),
            &[HomConstraint {
                pre: None,
                post: Some(t.c.clone()),
                value: ModuleMap::identity(t.m()),
            }],
        )?
        .ok_or_else(|| Error::NoLift("Y → M does not split".into()))
    };
    let s = section(xi)?;
    let sp = section(eta)?;
    let modulus = xi.k().modulus();
    let amalg = into_sum(&[eta.a.clone(), xi.a.neg()])?;
    let (po, po_proj) = cokernel_module(&amalg)?;
    let pair = direct_sum(modulus, &[eta.x().clone(), xi.x().clone()])?;
    let q = direct_sum(modulus, &[po.clone(), xi.m().clone()])?;
    let xp_q = pair.injections[0].then(&po_proj)?.then(&q.injections[0])?;
    let x_q = pair.injections[1].then(&po_proj)?.then(&q.injections[0])?;
    let po_y = from_sum(&[ModuleMap::zero(eta.x(), xi.y()), xi.b.clone()])?
        .with_modules(po.clone(), xi.y().clone())?;
    let po_yp = from_sum(&[eta.b.clone(), ModuleMap::zero(xi.x(), eta.y())])?
        .with_modules(po, eta.y().clone())?;
    let q_y = from_sum(&[po_y, s])?;
    let q_yp = from_sum(&[po_yp, sp.neg()])?;
    Butterfly::new(
        xi.clone(),
        eta.clone(),
        ModuleMap::identity(xi.m()),
        x_q,
        xp_q,
        q_y,
        q_yp,
    )
}

/// Turns a butterfly `ξ → η|_N` over the identity of `N` into one
/// `ξ → η` over `f: N → M`. The middle is `(Q ⊕ X')/X'` with `X'` included
/// by the sum of its two maps.
pub fn over_restriction(b: &Butterfly, eta: &TwoExtension, f: &ModuleMap) -> Result<Butterfly> {
    let r = restriction_map(eta, f)?;
    if b.target != r.source || b.over != ModuleMap::identity(f.source()) {
        return Err(Error::BoundaryMismatch(
            "butterfly does not end at the restriction".into(),
        ));
    }
    let modulus = b.q.modulus();
    let xp = eta.x();
    let sum = direct_sum(modulus, &[b.q.clone(), xp.clone()])?;
    let glue = into_sum(&[b.xp_q.clone(), ModuleMap::identity(xp)])?;
    let (mid, proj) = cokernel_module(&glue)?;
    let x_in = b.x_q.then(&sum.injections[0])?.then(&proj)?;
    let xp_in = sum.injections[1].then(&proj)?.neg();
    let to_y = from_sum(&[b.q_y.clone(), ModuleMap::zero(xp, b.source.y())])?
        .with_modules(mid.clone(), b.source.y().clone())?;
    let to_yp = from_sum(&[b.q_yp.then(&r.fy)?, eta.b.neg()])?
        .with_modules(mid, eta.y().clone())?;
    Butterfly::new(
        b.source.clone(),
        eta.clone(),
        f.clone(),
        x_in,
        xp_in,
        to_y,
        to_yp,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Modulus;

    fn z(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn times(m: &FPModule, n: &FPModule, c: u64) -> ModuleMap {
        ModuleMap::from_rows(m.clone(), n.clone(), &[vec![c]]).unwrap()
    }

    /// `0 → Z/2 → Z/4 →×2 Z/4 → Z/2 → 0` over `Z/4`.
    fn periodic() -> TwoExtension {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let z4 = FPModule::free(z(4), 1);
        TwoExtension::new(times(&z2, &z4, 2), times(&z4, &z4, 2), times(&z4, &z2, 1)).unwrap()
    }

    /// `0 → Z/3 → Z/9 →×3 Z/9 → Z/3 → 0` over `Z/9`.
    fn periodic9() -> TwoExtension {
        let z3 = FPModule::cyclic(z(9), 3).unwrap();
        let z9 = FPModule::free(z(9), 1);
        TwoExtension::new(times(&z3, &z9, 3), times(&z9, &z9, 3), times(&z9, &z3, 1)).unwrap()
    }

    #[test]
    fn classes() {
        let t = periodic();
        assert!(!class_of_two_extension(&t).unwrap().is_zero());
        let triv = TwoExtension::trivial(t.k(), t.m());
        assert!(class_of_two_extension(&triv).unwrap().is_zero());
        let c = class_of_two_extension(&t).unwrap();
        let back = two_extension_of_class(&c).unwrap();
        assert_eq!(class_of_two_extension(&back).unwrap(), c);
    }

    #[test]
    fn identity_butterfly_validates() {
        for t in [periodic(), periodic9()] {
            let b = identity_butterfly(&t).unwrap();
            assert!(b.is_valid().unwrap());
            let inv = invert(&b).unwrap();
            assert!(inv.is_valid().unwrap());
            let c = compose(&b, &inv).unwrap();
            assert!(two_isomorphism(&c, &b).unwrap().is_some());
        }
    }

    #[test]
    fn flipped_projection_is_rejected_for_odd_modulus() {
        let t = periodic9();
        let faults = Faults {
            induced_projection_sign: true,
            ..Faults::NONE
        };
        assert!(induced_butterfly_with(&ChainMap::identity(&t), faults).is_err());
    }

    #[test]
    fn self_butterfly_and_splitting() {
        let t = periodic9();
        assert!(butterfly_between(&t, &t).unwrap().is_some());
        assert!(splitting_butterfly(&t).unwrap().is_none());
        let triv = TwoExtension::trivial(t.k(), t.m());
        let b = splitting_butterfly(&triv).unwrap().unwrap();
        assert!(is_split_butterfly(&b).unwrap().is_some());
        assert!(matches!(
            is_split_butterfly(&identity_butterfly(&t).unwrap()),
            Err(Error::NotTrivialTarget)
        ));
    }

    #[test]
    fn restriction_formula_matches_composition() {
        let t = periodic();
        let m = t.m().clone();
        for c in [0, 1] {
            let f = ModuleMap::from_rows(m.clone(), m.clone(), &[vec![c]]).unwrap();
            let r = restriction_map(&t, &f).unwrap();
            let b = identity_butterfly(&r.source).unwrap();
            let direct = compose(&b, &induced_butterfly(&r).unwrap()).unwrap();
            let formula = over_restriction(&b, &t, &f).unwrap();
            assert!(two_isomorphism(&direct, &formula).unwrap().is_some());
        }
    }

    #[test]
    fn local_existence_on_split_rows() {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let t = TwoExtension::trivial(&z2, &z2);
        let b = local_existence_butterfly(&t, &t).unwrap();
        assert!(b.is_valid().unwrap());
    }

    #[test]
    fn baer_sum_of_two_extensions_adds_classes() {
        let t = periodic();
        let s = baer_sum_two_extensions(&t, &t).unwrap();
        assert!(class_of_two_extension(&s).unwrap().is_zero());
        let t9 = periodic9();
        let s9 = baer_sum_two_extensions(&t9, &t9).unwrap();
        let c = class_of_two_extension(&t9).unwrap();
        assert_eq!(class_of_two_extension(&s9).unwrap(), c.add(&c).unwrap());
    }
}

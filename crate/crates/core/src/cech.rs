//! Covers of a module by families of maps, Čech complexes, and lifting
//! through fiber products of free modules.
//!
//! A family `{N_i → M}` covers `M` when every finite tuple of elements of
//! `M` lifts into a single `N_i`. Lifting the tuple of generators lifts
//! every tuple, so this holds exactly when some `N_i → M` is surjective.

use crate::error::{Error, Result};
use crate::linalg::{divisors, Modulus};
use crate::module::{
    direct_sum, from_sum, hom_group, hom_map, into_sum, kernel_module, Complex, FPModule,
    ModuleMap, DEFAULT_MAX_ORDER,
};

fn check_targets(family: &[ModuleMap], m: &FPModule) -> Result<()> {
    for f in family {
        if f.target() != m {
            return Err(Error::BoundaryMismatch(
                "cover member does not map to M".into(),
            ));
        }
    }
    Ok(())
}

pub fn is_cover(family: &[ModuleMap], m: &FPModule) -> Result<bool> {
    check_targets(family, m)?;
    Ok(family.iter().any(|f| f.is_surjective()))
}

/// A family of maps into `M` that covers it.
#[derive(Clone, Debug)]
pub struct Cover {
    target: FPModule,
    family: Vec<ModuleMap>,
}

impl Cover {
    pub fn new(target: &FPModule, family: Vec<ModuleMap>) -> Result<Self> {
        if !is_cover(&family, target)? {
            return Err(Error::NotACover);
        }
        Ok(Cover {
            target: target.clone(),
            family,
        })
    }

    pub fn target(&self) -> &FPModule {
        &self.target
    }
    pub fn family(&self) -> &[ModuleMap] {
        &self.family
    }
}

/// `A^S` with basis indexed by `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeOnSet {
    pub size: usize,
    pub module: FPModule,
}

impl FreeOnSet {
    pub fn new(modulus: Modulus, size: usize) -> Self {
        FreeOnSet {
            size,
            module: FPModule::free(modulus, size),
        }
    }

    pub fn basis(&self, i: usize) -> Vec<u64> {
        self.module.unit(i)
    }
}

/// `A^M → M` sending the basis vector of `x` to `x`.
pub fn tautological_cover(m: &FPModule, bound: u128) -> Result<Cover> {
    let elems = m.elements(bound)?;
    let free = FreeOnSet::new(m.modulus(), elems.len());
    let f = ModuleMap::from_rows(free.module, m.clone(), &elems)?;
    Cover::new(m, vec![f])
}

/// `N_0 ×_M … ×_M N_p` with its inclusion into `⊕ N_k` and projections.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub module: FPModule,
    pub inclusion: ModuleMap,
    pub projections: Vec<ModuleMap>,
}

pub fn fiber_product(maps: &[ModuleMap]) -> Result<FiberProduct> {
    let first = maps
        .first()
        .ok_or_else(|| Error::NotComposable("empty fiber product".into()))?;
    let m = first.target();
    check_targets(maps, m)?;
    let modulus = m.modulus();
    let sources: Vec<FPModule> = maps.iter().map(|f| f.source().clone()).collect();
    let sum = direct_sum(modulus, &sources)?;
    let (module, inclusion) = if maps.len() == 1 {
        let incl = sum.injections[0].with_modules(sources[0].clone(), sum.module.clone())?;
        (sources[0].clone(), incl)
    } else {
        // (n_0, …, n_p) ↦ (f_0 n_0 - f_k n_k)_{k ≥ 1}.
        let p = maps.len() - 1;
        let mut blocks = vec![into_sum(&vec![first.clone(); p])?];
        for (k, f) in maps.iter().enumerate().skip(1) {
            let mut row = vec![ModuleMap::zero(f.source(), m); p];
            row[k - 1] = f.neg();
            blocks.push(into_sum(&row)?);
        }
        kernel_module(&from_sum(&blocks)?)?
    };
    let projections = sum
        .projections
        .iter()
        .map(|p| inclusion.then(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiberProduct {
        module,
        inclusion,
        projections,
    })
}

/// `⊕_{i,j} N_i ×_M N_j → ⊕ N_i → M → 0`, the first map being the
/// difference of the two projections.
pub fn baby_cech(cover: &Cover) -> Result<Complex> {
    let fam = cover.family();
    let m = cover.target();
    let modulus = m.modulus();
    let mut pieces = Vec::new();
    for (i, fi) in fam.iter().enumerate() {
        for (j, fj) in fam.iter().enumerate() {
            let fp = fiber_product(&[fi.clone(), fj.clone()])?;
            pieces.push((i, j, fp));
        }
    }
    let ns: Vec<FPModule> = fam.iter().map(|f| f.source().clone()).collect();
    let c0 = direct_sum(modulus, &ns)?;
    let maps = pieces
        .iter()
        .map(|(i, j, fp)| {
            fp.projections[0]
                .then(&c0.injections[*i])?
                .sub(&fp.projections[1].then(&c0.injections[*j])?)
        })
        .collect::<Result<Vec<_>>>()?;
    let d1 = from_sum(&maps)?;
    let eps = from_sum(fam)?;
    let zero = FPModule::zero(modulus);
    Complex::new(vec![d1, eps, ModuleMap::zero(m, &zero)])
}

/// Weakly increasing tuples of length `len` from `0..n`.
fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, len, 0, &mut Vec::new(), &mut out);
    out
}

/// One degree of the Čech complex.
#[derive(Clone, Debug)]
pub struct CechTerm {
    pub tuples: Vec<Vec<usize>>,
    pub products: Vec<FiberProduct>,
    pub module: FPModule,
    pub injections: Vec<ModuleMap>,
    pub projections: Vec<ModuleMap>,
}

fn cech_term(cover: &Cover, p: usize) -> Result<CechTerm> {
    let fam = cover.family();
    let tuples = tuples(fam.len(), p + 1);
    let products = tuples
        .iter()
        .map(|t| fiber_product(&t.iter().map(|&i| fam[i].clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mods: Vec<FPModule> = products.iter().map(|f| f.module.clone()).collect();
    let sum = direct_sum(cover.target().modulus(), &mods)?;
    Ok(CechTerm {
        tuples,
        products,
        module: sum.module,
        injections: sum.injections,
        projections: sum.projections,
    })
}

/// `N_{t} → N_{t minus k}` forgetting the `k`-th coordinate.
fn face(src: &FiberProduct, tgt: &FiberProduct, k: usize) -> Result<ModuleMap> {
    let keep: Vec<ModuleMap> = src
        .projections
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, p)| p.clone())
        .collect();
    into_sum(&keep)?
        .with_modules(src.module.clone(), tgt.inclusion.target().clone())?
        .factor_through(&tgt.inclusion)?
        .ok_or_else(|| Error::Internal("face does not land in the fiber product".into()))
}

fn cech_differential(from: &CechTerm, to: &CechTerm) -> Result<ModuleMap> {
    let mut total = ModuleMap::zero(&from.module, &to.module);
    for (a, t) in from.tuples.iter().enumerate() {
        for k in 0..t.len() {
            let mut dropped = t.clone();
            dropped.remove(k);
            let b = to
                .tuples
                .iter()
                .position(|u| *u == dropped)
                .ok_or_else(|| Error::Internal("face tuple missing".into()))?;
            let f = face(&from.products[a], &to.products[b], k)?;
            let mut term = from.projections[a].then(&f)?.then(&to.injections[b])?;
            if k % 2 == 1 {
                term = term.neg();
            }
            total = total.add(&term)?;
        }
    }
    Ok(total)
}

/// `C_d → … → C_0 → M → 0` with `C_p = ⊕_{i_0 ≤ … ≤ i_p} N_{i_0} ×_M … ×_M N_{i_p}`
/// and alternating sums of face maps as differentials.
pub fn cech_complex(cover: &Cover, d: usize) -> Result<Complex> {
    let terms = (0..=d)
        .map(|p| cech_term(cover, p))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = Vec::new();
    for p in (1..=d).rev() {
        maps.push(cech_differential(&terms[p], &terms[p - 1])?);
    }
    let eps = from_sum(cover.family())?.with_modules(terms[0].module.clone(), cover.target().clone())?;
    maps.push(eps);
    let zero = FPModule::zero(cover.target().modulus());
    maps.push(ModuleMap::zero(cover.target(), &zero));
    Complex::new(maps)
}

/// The partial-sum isomorphism `T ⊕ S^p → T ×_M … ×_M T` (`p + 1` factors)
/// for an epimorphism `T → M` with kernel `S`, its inverse, and the face
/// maps on both sides.
#[derive(Clone, Debug)]
pub struct Shearing {
    pub p: usize,
    /// `T → M`.
    pub f: ModuleMap,
    /// `T ⊕ S^p`.
    pub model: FPModule,
    pub product: FiberProduct,
    pub shear: ModuleMap,
    pub unshear: ModuleMap,
}

fn kernel_of_epi(f: &ModuleMap) -> Result<ModuleMap> {
    if !f.is_surjective() {
        return Err(Error::NotEpi);
    }
    Ok(kernel_module(f)?.1)
}

pub fn shearing_iso(f: &ModuleMap, p: usize) -> Result<Shearing> {
    let s_incl = kernel_of_epi(f)?;
    let t = f.source();
    let s = s_incl.source();
    let modulus = t.modulus();
    let mut parts = vec![t.clone()];
    parts.extend(std::iter::repeat_n(s.clone(), p));
    let model = direct_sum(modulus, &parts)?;
    let product = fiber_product(&vec![f.clone(); p + 1])?;
    let tp = direct_sum(modulus, &vec![t.clone(); p + 1])?;
    // Coordinate k of the image is t + s_1 + … + s_k.
    let mut blocks = vec![into_sum(&vec![ModuleMap::identity(t); p + 1])?];
    for i in 1..=p {
        let row: Vec<ModuleMap> = (0..=p)
            .map(|k| {
                if k >= i {
                    s_incl.clone()
                } else {
                    ModuleMap::zero(s, t)
                }
            })
            .collect();
        blocks.push(into_sum(&row)?);
    }
    let shear = from_sum(&blocks)?
        .with_modules(model.module.clone(), tp.module.clone())?
        .factor_through(&product.inclusion)?
        .ok_or_else(|| Error::Internal("partial sums leave the fiber product".into()))?;
    let mut comps = vec![product.projections[0].clone()];
    for i in 1..=p {
        let diff = product.projections[i].sub(&product.projections[i - 1])?;
        comps.push(
            diff.factor_through(&s_incl)?
                .ok_or_else(|| Error::Internal("difference is not in the kernel".into()))?,
        );
    }
    let unshear = into_sum(&comps)?.with_modules(product.module.clone(), model.module.clone())?;
    let sh = Shearing {
        p,
        f: f.clone(),
        model: model.module,
        product,
        shear,
        unshear,
    };
    if sh.shear.then(&sh.unshear)? != ModuleMap::identity(&sh.model)
        || sh.unshear.then(&sh.shear)? != ModuleMap::identity(&sh.product.module)
    {
        return Err(Error::Internal("shearing maps are not inverse".into()));
    }
    Ok(sh)
}

impl Shearing {
    /// `d_i: T ⊕ S^p → T ⊕ S^{p-1}`: `d_0` adds `s_1` to `t`, `d_i` for
    /// `0 < i < p` merges `s_i + s_{i+1}`, `d_p` drops `s_p`.
    pub fn model_face(&self, lower: &Shearing, i: usize) -> Result<ModuleMap> {
        let p = self.p;
        if lower.p + 1 != p || i > p {
            return Err(Error::UnsupportedDegree(i));
        }
        let src = &self.model;
        let tgt = &lower.model;
        let s_incl = kernel_of_epi(&self.f)?;
        let t = s_incl.target().clone();
        let s = s_incl.source().clone();
        let modulus = t.modulus();
        let mut parts = vec![t.clone()];
        parts.extend(std::iter::repeat_n(s.clone(), p));
        let sum_src = direct_sum(modulus, &parts)?;
        // Output slot 0 is t, output slot j ≥ 1 is s_j'.
        let mut out: Vec<ModuleMap> = Vec::with_capacity(p);
        let mut t_out = sum_src.projections[0].clone();
        if i == 0 {
            t_out = t_out.add(&sum_src.projections[1].then(&s_incl)?)?;
        }
        out.push(t_out);
        for j in 1..p {
            let sources: Vec<usize> = if i == 0 {
                vec![j + 1]
            } else if j < i {
                vec![j]
            } else if j == i {
                vec![i, i + 1]
            } else {
                vec![j + 1]
            };
            let mut acc = ModuleMap::zero(&sum_src.module, &s);
            for k in sources {
                acc = acc.add(&sum_src.projections[k])?;
            }
            out.push(acc);
        }
        into_sum(&out)?.with_modules(src.clone(), tgt.clone())
    }

    /// `d_i` on the fiber products, forgetting coordinate `i`.
    pub fn product_face(&self, lower: &Shearing, i: usize) -> Result<ModuleMap> {
        face(&self.product, &lower.product, i)
    }
}

/// Baer's criterion over `Z/N`: a map from the ideal `(d) ≅ Z/(N/d)` to `K`
/// is the choice of `k` with `(N/d) k = 0`, and it extends to `Z/N` exactly
/// when `k ∈ dK`.
pub fn is_injective(k: &FPModule) -> bool {
    let modulus = k.modulus();
    let n = modulus.get();
    divisors(n).into_iter().all(|d| {
        let e = n / d;
        let times_e = ModuleMap::identity(k).scale(e % n);
        let times_d = ModuleMap::identity(k).scale(d % n);
        match kernel_module(&times_e) {
            Ok((_, incl)) => (0..incl.source().ngens())
                .all(|g| times_d.image_contains(&incl.apply(&incl.source().unit(g)))),
            Err(_) => false,
        }
    })
}

/// Applies `Hom(−, K)` to the Čech complex of degree `d` and checks
/// exactness of `0 → Hom(M, K) → Hom(C_0, K) → … → Hom(C_d, K)` at every
/// term but the last.
pub fn hom_cech_exactness(cover: &Cover, k: &FPModule, d: usize) -> Result<bool> {
    if !is_injective(k) {
        return Err(Error::NotInjective(k.modulus().get()));
    }
    let cx = cech_complex(cover, d)?;
    let maps = cx.maps();
    // maps = [C_d → C_{d-1}, …, C_0 → M, M → 0]; dualise all but the last.
    let homs = maps[..maps.len() - 1]
        .iter()
        .map(|f| Ok((hom_group(f.source(), k)?, hom_group(f.target(), k)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut dual = Vec::new();
    for (f, (hs, ht)) in maps[..maps.len() - 1].iter().zip(&homs).rev() {
        dual.push(hom_map(ht, hs, Some(f), None)?);
    }
    let first = dual[0].source().clone();
    let zero = FPModule::zero(k.modulus());
    let mut all = vec![ModuleMap::zero(&zero, &first)];
    all.extend(dual);
    Ok(Complex::new(all)?.is_exact())
}

/// Finite sets `S → R ← T` given by index maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanOfSets {
    pub r: usize,
    pub s_to_r: Vec<usize>,
    pub t_to_r: Vec<usize>,
}

impl SpanOfSets {
    pub fn new(r: usize, s_to_r: Vec<usize>, t_to_r: Vec<usize>) -> Result<Self> {
        if s_to_r.iter().chain(&t_to_r).any(|&x| x >= r) {
            return Err(Error::DimensionMismatch {
                context: "set map target",
                expected: r,
                found: s_to_r.iter().chain(&t_to_r).copied().max().unwrap_or(0) + 1,
            });
        }
        Ok(SpanOfSets { r, s_to_r, t_to_r })
    }

    /// `S ×_R T` in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, &rs) in self.s_to_r.iter().enumerate() {
            for (t, &rt) in self.t_to_r.iter().enumerate() {
                if rs == rt {
                    out.push((s, t));
                }
            }
        }
        out
    }

    /// `A^{S ×_R T} → A^S ⊕ A^T`, the two projections side by side.
    pub fn comparison(&self, modulus: Modulus) -> Result<ModuleMap> {
        let pairs = self.pairs();
        let ns = self.s_to_r.len();
        let nt = self.t_to_r.len();
        let rows: Vec<Vec<u64>> = pairs
            .iter()
            .map(|&(s, t)| {
                let mut v = vec![0; ns + nt];
                v[s] = 1;
                v[ns + t] = 1;
                v
            })
            .collect();
        ModuleMap::from_rows(
            FPModule::free(modulus, pairs.len()),
            FPModule::free(modulus, ns + nt),
            &rows,
        )
    }

    fn push(&self, modulus: Modulus, x: &[u64], to_r: &[usize]) -> Vec<u64> {
        let mut v = vec![0; self.r];
        for (i, &c) in x.iter().enumerate() {
            v[to_r[i]] = modulus.add(v[to_r[i]], c);
        }
        v
    }
}

/// A preimage of `(x, y) ∈ A^S ×_{A^R} A^T` in `A^{S ×_R T}`, built fibre by
/// fibre from the coefficient matrix with `z = Σ x = Σ y` in the corner,
/// `x_i + y_i` on the diagonal, `-y_i` along the first row and `-x_i` down
/// the first column. A shorter side is padded with copies of its first
/// element carrying coefficient zero. A fibre with elements on one side only
/// admits no lift unless the other side's coefficients there vanish.
pub fn lift_fiber_product(
    modulus: Modulus,
    span: &SpanOfSets,
    x: &[u64],
    y: &[u64],
) -> Result<Vec<u64>> {
    if x.len() != span.s_to_r.len() || y.len() != span.t_to_r.len() {
        return Err(Error::DimensionMismatch {
            context: "section length",
            expected: span.s_to_r.len() + span.t_to_r.len(),
            found: x.len() + y.len(),
        });
    }
    let x: Vec<u64> = x.iter().map(|&v| modulus.reduce(v)).collect();
    let y: Vec<u64> = y.iter().map(|&v| modulus.reduce(v)).collect();
    if span.push(modulus, &x, &span.s_to_r) != span.push(modulus, &y, &span.t_to_r) {
        return Err(Error::NotInFiberProduct(
            "the two sides differ in A^R".into(),
        ));
    }
    let pairs = span.pairs();
    let mut out = vec![0u64; pairs.len()];
    let mut add = |s: usize, t: usize, c: u64| {
        let idx = pairs.iter().position(|&p| p == (s, t)).expect("pair in fibre");
        out[idx] = modulus.add(out[idx], c);
    };
    for r in 0..span.r {
        let ss: Vec<usize> = (0..x.len()).filter(|&i| span.s_to_r[i] == r).collect();
        let ts: Vec<usize> = (0..y.len()).filter(|&i| span.t_to_r[i] == r).collect();
        if ss.is_empty() || ts.is_empty() {
            let other_nonzero = ss.iter().any(|&i| x[i] != 0) || ts.iter().any(|&i| y[i] != 0);
            if other_nonzero {
                return Err(Error::NoLift(format!(
                    "fibre over {r} is empty on one side but not on the other"
                )));
            }
            continue;
        }
        let n = ss.len().max(ts.len());
        let sx = |i: usize| if i < ss.len() { (ss[i], x[ss[i]]) } else { (ss[0], 0) };
        let ty = |j: usize| if j < ts.len() { (ts[j], y[ts[j]]) } else { (ts[0], 0) };
        let z = ss.iter().fold(0, |a, &i| modulus.add(a, x[i]));
        add(ss[0], ts[0], z);
        for i in 1..n {
            let (si, xi) = sx(i);
            let (ti, yi) = ty(i);
            add(si, ti, modulus.add(xi, yi));
            add(si, ts[0], modulus.neg(yi));
            add(ss[0], ti, modulus.neg(xi));
        }
    }
    Ok(out)
}

/// `(x,x') - (x,y') + (y,y') - (y,x')` for `S = {x, y}`, `T = {x', y'}` over
/// a point: nonzero in `A^{S ×_R T}` but killed by both projections.
pub fn non_injectivity_witness(modulus: Modulus) -> Result<(SpanOfSets, Vec<u64>)> {
    let span = SpanOfSets::new(1, vec![0, 0], vec![0, 0])?;
    let pairs = span.pairs();
    let mut v = vec![0; pairs.len()];
    let one = 1;
    let minus = modulus.neg(1);
    for (&(s, t), c) in pairs.iter().zip(v.iter_mut()) {
        *c = match (s, t) {
            (0, 0) | (1, 1) => one,
            _ => minus,
        };
    }
    Ok((span, v))
}

pub fn default_bound() -> u128 {
    DEFAULT_MAX_ORDER
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zn(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn z2_over_4() -> FPModule {
        FPModule::cyclic(zn(4), 2).unwrap()
    }

    #[test]
    fn cover_examples() {
        let m = FPModule::cyclic(zn(2), 2).unwrap();
        let mm = FPModule::from_orders(zn(2), &[2, 2]).unwrap();
        let i1 = ModuleMap::from_rows(m.clone(), mm.clone(), &[vec![1, 0]]).unwrap();
        let i2 = ModuleMap::from_rows(m.clone(), mm.clone(), &[vec![0, 1]]).unwrap();
        assert!(!is_cover(&[i1.clone()], &mm).unwrap());
        assert!(!is_cover(&[i1.clone(), i2.clone()], &mm).unwrap());
        assert!(is_cover(&[i1, i2, ModuleMap::identity(&mm)], &mm).unwrap());
        let zero = FPModule::zero(zn(2));
        assert!(!is_cover(&[ModuleMap::zero(&zero, &m)], &m).unwrap());
        assert!(tautological_cover(&mm, 4096).is_ok());
    }

    #[test]
    fn baby_cech_is_exact() {
        let cover = tautological_cover(&z2_over_4(), 4096).unwrap();
        assert!(baby_cech(&cover).unwrap().is_exact());
    }

    #[test]
    fn shearing_small() {
        let t = FPModule::free(zn(4), 1);
        let f = ModuleMap::from_rows(t, z2_over_4(), &[vec![1]]).unwrap();
        let s0 = shearing_iso(&f, 0).unwrap();
        assert_eq!(s0.model.order(), 4);
        let s1 = shearing_iso(&f, 1).unwrap();
        assert_eq!(s1.product.module.order(), 8);
        let s2 = shearing_iso(&f, 2).unwrap();
        for i in 0..=2 {
            let lhs = s2.shear.then(&s2.product_face(&s1, i).unwrap()).unwrap();
            let rhs = s2.model_face(&s1, i).unwrap().then(&s1.shear).unwrap();
            assert_eq!(lhs, rhs, "face {i}");
        }
        let z = ModuleMap::zero(f.source(), f.target());
        assert!(matches!(shearing_iso(&z, 1), Err(Error::NotEpi)));
    }

    #[test]
    fn injectivity() {
        assert!(is_injective(&FPModule::free(zn(4), 1)));
        assert!(!is_injective(&z2_over_4()));
        assert!(is_injective(&FPModule::free(zn(2), 1)));
        assert!(is_injective(&FPModule::cyclic(zn(6), 3).unwrap()));
    }

    #[test]
    fn hom_cech() {
        let cover = tautological_cover(&z2_over_4(), 4096).unwrap();
        assert!(hom_cech_exactness(&cover, &FPModule::free(zn(4), 1), 3).unwrap());
        assert!(matches!(
            hom_cech_exactness(&cover, &z2_over_4(), 3),
            Err(Error::NotInjective(4))
        ));
    }

    #[test]
    fn fiber_product_lift() {
        let m = zn(4);
        let span = SpanOfSets::new(1, vec![0, 0], vec![0, 0]).unwrap();
        let lift = lift_fiber_product(m, &span, &[1, 1], &[1, 1]).unwrap();
        let img = span.comparison(m).unwrap().apply(&lift);
        assert_eq!(img, vec![1, 1, 1, 1]);
        assert_eq!(lift_fiber_product(m, &span, &[0, 0], &[0, 0]).unwrap(), vec![0; 4]);
        assert!(matches!(
            lift_fiber_product(m, &span, &[1, 0], &[0, 0]),
            Err(Error::NotInFiberProduct(_))
        ));
        let (span, w) = non_injectivity_witness(m).unwrap();
        assert!(w.iter().any(|&c| c != 0));
        assert!(span.comparison(m).unwrap().apply(&w).iter().all(|&c| c == 0));
    }

    #[test]
    fn one_sided_fibre_has_no_lift() {
        let span = SpanOfSets::new(2, vec![0], vec![0, 1, 1]).unwrap();
        assert!(matches!(
            lift_fiber_product(zn(4), &span, &[1], &[1, 1, 3]),
            Err(Error::NoLift(_))
        ));
    }
}

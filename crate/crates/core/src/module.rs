//! Finitely presented modules over `Z/N` and their morphisms.
//!
//! A module is `(Z/N)^g / R` with `R` stored in Howell form, so two modules
//! with the same presentation compare equal and can be used as cache keys.
//! Elements are coordinate vectors on the generators; [`FPModule::reduce`]
//! returns the canonical coset representative.
//!
//! A map is the matrix sending generator `i` of the source to row `i`, an
//! element of the target. Composition is diagrammatic: `f.then(&g)` is
//! "first `f`, then `g`", with matrix `F·G`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{
    cyclic_orders, howell_rows, invariant_factors_of, reduce_against, vec_add, vec_scale,
    vec_sub, MatZN, Modulus, Solver,
};

/// Default bound on the number of elements materialised by enumeration.
pub const DEFAULT_MAX_ORDER: u128 = 4096;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FPModule {
    modulus: Modulus,
    ngens: usize,
    relations: MatZN,
}

impl fmt::Debug for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FPModule[{}; {} gens; rel {:?}]",
            self.modulus,
            self.ngens,
            self.relations.row_vecs()
        )
    }
}

impl FPModule {
    pub fn new(modulus: Modulus, ngens: usize, relations: &MatZN) -> Result<Self> {
        if relations.modulus() != modulus {
            return Err(Error::ModulusMismatch {
                left: modulus.get(),
                right: relations.modulus().get(),
            });
        }
        if relations.cols() != ngens {
            return Err(Error::DimensionMismatch {
                context: "relation width",
                expected: ngens,
                found: relations.cols(),
            });
        }
        Ok(Self::from_rows_trusted(modulus, ngens, relations.row_vecs()))
    }

    pub fn from_relations(modulus: Modulus, ngens: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let m = MatZN::from_rows(modulus, ngens, rows)?;
        Self::new(modulus, ngens, &m)
    }

    pub(crate) fn from_rows_trusted(modulus: Modulus, ngens: usize, rows: Vec<Vec<u64>>) -> Self {
        let h = howell_rows(rows, ngens, modulus);
        FPModule {
            modulus,
            ngens,
            relations: MatZN::from_rows_unchecked(modulus, ngens, h),
        }
    }

    pub fn free(modulus: Modulus, rank: usize) -> Self {
        FPModule {
            modulus,
            ngens: rank,
            relations: MatZN::zeros(modulus, 0, rank),
        }
    }

    /// The module with no generators.
    pub fn zero(modulus: Modulus) -> Self {
        Self::free(modulus, 0)
    }

    /// `Z/d` on one generator; `d` must divide `N`.
    pub fn cyclic(modulus: Modulus, d: u64) -> Result<Self> {
        if d == 0 || modulus.get() % d != 0 {
            return Err(Error::NotWellDefined(format!(
                "Z/{d} is not a {modulus}-module"
            )));
        }
        Ok(Self::from_rows_trusted(modulus, 1, vec![vec![d % modulus.get()]]))
    }

    /// `⊕ Z/d_i`.
    pub fn from_orders(modulus: Modulus, orders: &[u64]) -> Result<Self> {
        let parts = orders
            .iter()
            .map(|&d| Self::cyclic(modulus, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(direct_sum(modulus, &parts)?.module)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }
    #[inline]
    pub fn ngens(&self) -> usize {
        self.ngens
    }
    /// Howell rows of the relation span.
    #[inline]
    pub fn relations(&self) -> &MatZN {
        &self.relations
    }

    pub fn is_free(&self) -> bool {
        self.relations.rows() == 0
    }

    pub(crate) fn relation_rows(&self) -> Vec<Vec<u64>> {
        self.relations.row_vecs()
    }

    fn howell_slice(&self) -> Vec<Vec<u64>> {
        self.relations.row_vecs()
    }

    pub fn unit(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.ngens];
        v[i] = 1 % self.modulus.get();
        self.reduce(&v)
    }

    /// Canonical representative of `v` modulo the relations.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.ngens);
        let mut w: Vec<u64> = v.iter().map(|&x| self.modulus.reduce(x)).collect();
        let rows = self.howell_slice();
        reduce_against(&rows, &mut w, self.modulus, None);
        w
    }

    pub fn check_element(&self, v: &[u64]) -> Result<()> {
        if v.len() != self.ngens {
            return Err(Error::DimensionMismatch {
                context: "module element",
                expected: self.ngens,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn is_zero_element(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn elements_equal(&self, a: &[u64], b: &[u64]) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.reduce(&vec_add(self.modulus, a, b))
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.reduce(&vec_sub(self.modulus, a, b))
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        self.reduce(&vec_scale(self.modulus, a, c))
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        self.scale(a, self.modulus.get() - 1)
    }

    pub fn zero_element(&self) -> Vec<u64> {
        vec![0; self.ngens]
    }

    /// Every generator is zero.
    pub fn is_zero(&self) -> bool {
        (0..self.ngens).all(|i| self.unit(i).iter().all(|&x| x == 0))
    }

    /// Orders of a cyclic decomposition, trivial summands omitted.
    pub fn cyclic_orders(&self) -> Vec<u64> {
        cyclic_orders(&self.relations)
    }

    /// Invariant factors `d_1 | d_2 | …`, all greater than 1.
    pub fn invariant_factors(&self) -> Vec<u64> {
        invariant_factors_of(&self.cyclic_orders())
    }

    /// Number of elements.
    pub fn order(&self) -> u128 {
        let mut total: u128 = 1;
        for (c, p) in self.pivots() {
            let _ = c;
            total = total.saturating_mul(p as u128);
        }
        let free_cols = self.ngens - self.relations.rows();
        for _ in 0..free_cols {
            total = total.saturating_mul(self.modulus.get() as u128);
        }
        total
    }

    /// `(column, pivot)` of each Howell row. The number of residues allowed
    /// in a pivot column of a canonical representative is the pivot itself.
    fn pivots(&self) -> Vec<(usize, u64)> {
        (0..self.relations.rows())
            .map(|i| {
                let r = self.relations.row(i);
                let c = r.iter().position(|&x| x != 0).expect("nonzero Howell row");
                (c, r[c])
            })
            .collect()
    }

    /// All canonical representatives, in a deterministic order.
    pub fn elements(&self, bound: u128) -> Result<Vec<Vec<u64>>> {
        let size = self.order();
        if size > bound {
            return Err(Error::TooLarge { size, bound });
        }
        let n = self.modulus.get();
        let mut radix = vec![n; self.ngens];
        for (c, p) in self.pivots() {
            radix[c] = p;
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut cur = vec![0u64; self.ngens];
        loop {
            out.push(cur.clone());
            let mut k = 0;
            loop {
                if k == self.ngens {
                    return Ok(out);
                }
                cur[k] += 1;
                if cur[k] < radix[k] {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    /// Presentation with every generator that a unit-pivot relation expresses
    /// through later generators removed. Returns the new module and mutually
    /// inverse isomorphisms `self → new` and `new → self`.
    pub fn simplify(&self) -> (FPModule, ModuleMap, ModuleMap) {
        let m = self.modulus;
        let mut eliminated: Vec<Option<usize>> = vec![None; self.ngens];
        for i in 0..self.relations.rows() {
            let r = self.relations.row(i);
            let c = r.iter().position(|&x| x != 0).expect("nonzero Howell row");
            if r[c] == 1 {
                eliminated[c] = Some(i);
            }
        }
        let kept: Vec<usize> = (0..self.ngens).filter(|&c| eliminated[c].is_none()).collect();
        if kept.len() == self.ngens {
            let id = ModuleMap::identity(self);
            return (self.clone(), id.clone(), id);
        }
        let new_rows: Vec<Vec<u64>> = (0..self.relations.rows())
            .filter(|&i| {
                let r = self.relations.row(i);
                let c = r.iter().position(|&x| x != 0).unwrap();
                eliminated[c].is_none()
            })
            .map(|i| kept.iter().map(|&c| self.relations.get(i, c)).collect())
            .collect();
        let new = FPModule::from_rows_trusted(m, kept.len(), new_rows);
        let to_rows: Vec<Vec<u64>> = (0..self.ngens)
            .map(|c| match eliminated[c] {
                None => kept.iter().map(|&k| u64::from(k == c)).collect(),
                Some(i) => kept
                    .iter()
                    .map(|&k| m.neg(self.relations.get(i, k)))
                    .collect(),
            })
            .collect();
        let from_rows: Vec<Vec<u64>> = kept
            .iter()
            .map(|&k| (0..self.ngens).map(|c| u64::from(c == k)).collect())
            .collect();
        let to = ModuleMap::new_trusted(self.clone(), new.clone(), to_rows);
        let from = ModuleMap::new_trusted(new.clone(), self.clone(), from_rows);
        (new, to, from)
    }

    /// The same module viewed over `Z/N'` for a multiple `N'` of `N`:
    /// relations lifted and `N·g_i` added for every generator.
    pub fn restrict_scalars(&self, to: Modulus) -> Result<FPModule> {
        let n = self.modulus.get();
        if to.get() % n != 0 {
            return Err(Error::ModulusMismatch {
                left: to.get(),
                right: n,
            });
        }
        let mut rows: Vec<Vec<u64>> = self.relation_rows();
        for i in 0..self.ngens {
            let mut r = vec![0; self.ngens];
            r[i] = to.reduce(n);
            rows.push(r);
        }
        Ok(FPModule::from_rows_trusted(to, self.ngens, rows))
    }

    /// The same module over `Z/N` for a divisor `N` of the current modulus;
    /// the module must be killed by `N`.
    pub fn descend(&self, to: Modulus) -> Result<FPModule> {
        let big = self.modulus.get();
        let n = to.get();
        if big % n != 0 {
            return Err(Error::ModulusMismatch { left: big, right: n });
        }
        for i in 0..self.ngens {
            let mut v = vec![0; self.ngens];
            v[i] = n % big;
            if !self.is_zero_element(&v) {
                return Err(Error::NotTorsion {
                    n,
                    context: "descend",
                });
            }
        }
        let rows = self
            .relation_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x % n).collect())
            .collect();
        Ok(FPModule::from_rows_trusted(to, self.ngens, rows))
    }
}

/// A homomorphism given by the images of the source generators. Rows are
/// kept reduced modulo the target relations, so equality of maps is
/// equality of structs.
#[derive(Clone)]
pub struct ModuleMap {
    source: FPModule,
    target: FPModule,
    matrix: MatZN,
    solver: Arc<OnceLock<Solver>>,
}

impl PartialEq for ModuleMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.matrix == other.matrix
    }
}
impl Eq for ModuleMap {}

impl std::hash::Hash for ModuleMap {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.source.hash(state);
        self.target.hash(state);
        self.matrix.hash(state);
    }
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ModuleMap[{:?} -> {:?}: {:?}]",
            self.source,
            self.target,
            self.matrix.row_vecs()
        )
    }
}

fn check_modulus(a: Modulus, b: Modulus) -> Result<()> {
    if a != b {
        return Err(Error::ModulusMismatch {
            left: a.get(),
            right: b.get(),
        });
    }
    Ok(())
}

impl ModuleMap {
    /// Checks shapes and well-definedness (every source relation lands in
    /// the target relations).
    pub fn new(source: FPModule, target: FPModule, matrix: MatZN) -> Result<Self> {
        check_modulus(source.modulus, target.modulus)?;
        check_modulus(source.modulus, matrix.modulus())?;
        if matrix.rows() != source.ngens || matrix.cols() != target.ngens {
            return Err(Error::DimensionMismatch {
                context: "map matrix",
                expected: source.ngens * 1000 + target.ngens,
                found: matrix.rows() * 1000 + matrix.cols(),
            });
        }
        let rel_img = source.relations.mul(&matrix)?;
        for i in 0..rel_img.rows() {
            if !target.is_zero_element(rel_img.row(i)) {
                return Err(Error::NotWellDefined(format!(
                    "relation {:?} maps to nonzero {:?}",
                    source.relations.row(i),
                    target.reduce(rel_img.row(i))
                )));
            }
        }
        let rows = (0..matrix.rows())
            .map(|i| target.reduce(matrix.row(i)))
            .collect();
        Ok(Self::new_trusted(source, target, rows))
    }

    pub fn from_rows(source: FPModule, target: FPModule, rows: &[Vec<u64>]) -> Result<Self> {
        let m = MatZN::from_rows(source.modulus, target.ngens, rows)?;
        Self::new(source, target, m)
    }

    pub(crate) fn new_trusted(source: FPModule, target: FPModule, rows: Vec<Vec<u64>>) -> Self {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| target.reduce(r)).collect();
        let matrix = MatZN::from_rows_unchecked(source.modulus, target.ngens, rows);
        ModuleMap {
            source,
            target,
            matrix,
            solver: Arc::new(OnceLock::new()),
        }
    }

    pub fn zero(source: &FPModule, target: &FPModule) -> Self {
        Self::new_trusted(
            source.clone(),
            target.clone(),
            vec![vec![0; target.ngens]; source.ngens],
        )
    }

    pub fn identity(m: &FPModule) -> Self {
        let rows = (0..m.ngens)
            .map(|i| (0..m.ngens).map(|j| u64::from(i == j)).collect())
            .collect();
        Self::new_trusted(m.clone(), m.clone(), rows)
    }

    #[inline]
    pub fn source(&self) -> &FPModule {
        &self.source
    }
    #[inline]
    pub fn target(&self) -> &FPModule {
        &self.target
    }
    #[inline]
    pub fn matrix(&self) -> &MatZN {
        &self.matrix
    }
    pub fn modulus(&self) -> Modulus {
        self.source.modulus
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.matrix.row_vecs()
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.source.ngens);
        self.target.reduce(&self.matrix.left_mul(x))
    }

    /// First `self`, then `g`.
    pub fn then(&self, g: &ModuleMap) -> Result<ModuleMap> {
        if self.target != g.source {
            return Err(Error::NotComposable(format!(
                "target {:?} differs from source {:?}",
                self.target, g.source
            )));
        }
        let m = self.matrix.mul(&g.matrix)?;
        Ok(Self::new_trusted(
            self.source.clone(),
            g.target.clone(),
            m.row_vecs(),
        ))
    }

    fn check_parallel(&self, other: &ModuleMap) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::NotComposable(
                "maps do not share source and target".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.check_parallel(other)?;
        let m = self.matrix.add(&other.matrix)?;
        Ok(Self::new_trusted(
            self.source.clone(),
            self.target.clone(),
            m.row_vecs(),
        ))
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleMap {
        Self::new_trusted(
            self.source.clone(),
            self.target.clone(),
            self.matrix.neg().row_vecs(),
        )
    }

    pub fn scale(&self, c: u64) -> ModuleMap {
        Self::new_trusted(
            self.source.clone(),
            self.target.clone(),
            self.matrix.scale(c).row_vecs(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    fn solver(&self) -> &Solver {
        self.solver.get_or_init(|| {
            let stacked = self
                .matrix
                .vstack(&self.target.relations)
                .expect("same width");
            Solver::new(&stacked)
        })
    }

    /// Some `x` with `self(x) = y`, canonical in the source.
    pub fn preimage(&self, y: &[u64]) -> Option<Vec<u64>> {
        debug_assert_eq!(y.len(), self.target.ngens);
        let sol = self.solver().solve(y)?;
        Some(self.source.reduce(&sol[..self.source.ngens]))
    }

    pub fn image_contains(&self, y: &[u64]) -> bool {
        self.solver().contains(y)
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.target.ngens).all(|i| self.image_contains(&self.target.unit(i)))
    }

    pub fn is_injective(&self) -> bool {
        kernel_generators(self).is_empty()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// `h` with `h.then(g) = self`, defined generator-wise. Returns `None`
    /// if some generator image is not in the image of `g`, and an error if
    /// the chosen lifts do not respect the source relations (which cannot
    /// happen when `g` is injective or the source is free).
    pub fn factor_through(&self, g: &ModuleMap) -> Result<Option<ModuleMap>> {
        if self.target != g.target {
            return Err(Error::NotComposable(
                "factor_through needs a common target".into(),
            ));
        }
        let mut rows = Vec::with_capacity(self.source.ngens);
        for i in 0..self.source.ngens {
            match g.preimage(self.matrix.row(i)) {
                Some(x) => rows.push(x),
                None => return Ok(None),
            }
        }
        let m = MatZN::from_rows_unchecked(self.modulus(), g.source.ngens, rows);
        ModuleMap::new(self.source.clone(), g.source.clone(), m).map(Some)
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<ModuleMap> {
        if !self.is_isomorphism() {
            return Err(Error::NotWellDefined("map is not invertible".into()));
        }
        let id = ModuleMap::identity(&self.target);
        id.factor_through(self)?
            .ok_or_else(|| Error::Internal("surjective map without preimage".into()))
    }

    pub fn restrict_scalars(&self, to: Modulus) -> Result<ModuleMap> {
        let s = self.source.restrict_scalars(to)?;
        let t = self.target.restrict_scalars(to)?;
        let m = self.matrix.with_modulus(to);
        ModuleMap::new(s, t, m)
    }

    pub fn descend(&self, to: Modulus) -> Result<ModuleMap> {
        let s = self.source.descend(to)?;
        let t = self.target.descend(to)?;
        let m = self.matrix.with_modulus(to);
        ModuleMap::new(s, t, m)
    }

    /// Same matrix between isomorphic re-presentations is not generally
    /// meaningful; this rebuilds the map between other modules with the
    /// same generators, checking well-definedness.
    pub fn with_modules(&self, source: FPModule, target: FPModule) -> Result<ModuleMap> {
        ModuleMap::new(source, target, self.matrix.clone())
    }
}

/// Vectors in the source generating `{x : f(x) = 0}` modulo source relations.
fn kernel_generators(f: &ModuleMap) -> Vec<Vec<u64>> {
    let s = f.source.ngens;
    let stacked = f.matrix.vstack(&f.target.relations).expect("same width");
    let solver = Solver::new(&stacked);
    let gens: Vec<Vec<u64>> = solver
        .kernel_rows()
        .iter()
        .map(|r| r[..s].to_vec())
        .collect();
    independent_generators(&f.source, gens)
}

/// Generators for the submodule spanned by `gens`, with redundant ones
/// (those already in the relation span) dropped.
fn independent_generators(m: &FPModule, gens: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let mut all = gens;
    all.extend(m.relation_rows());
    let h = howell_rows(all, m.ngens, m.modulus);
    h.into_iter()
        .map(|r| m.reduce(&r))
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect()
}

/// The submodule of `m` generated by `gens`, with its inclusion.
pub fn submodule(m: &FPModule, gens: &[Vec<u64>]) -> Result<(FPModule, ModuleMap)> {
    for g in gens {
        m.check_element(g)?;
    }
    let gens = independent_generators(m, gens.to_vec());
    let k = gens.len();
    let g = MatZN::from_rows_unchecked(m.modulus, m.ngens, gens.clone());
    let stacked = g.vstack(&m.relations)?;
    let solver = Solver::new(&stacked);
    let rels: Vec<Vec<u64>> = solver
        .kernel_rows()
        .iter()
        .map(|r| r[..k].to_vec())
        .collect();
    let sub = FPModule::from_rows_trusted(m.modulus, k, rels);
    let incl = ModuleMap::new_trusted(sub.clone(), m.clone(), gens);
    let (simple, _to, from) = sub.simplify();
    let incl = from.then(&incl)?;
    Ok((simple, incl))
}

/// Kernel of `f` with its inclusion into the source.
pub fn kernel_module(f: &ModuleMap) -> Result<(FPModule, ModuleMap)> {
    let gens = kernel_generators(f);
    submodule(&f.source, &gens)
}

/// Cokernel of `f` with the projection from the target. The cokernel keeps
/// the target's generators.
pub fn cokernel_module(f: &ModuleMap) -> Result<(FPModule, ModuleMap)> {
    let t = &f.target;
    let mut rows = t.relation_rows();
    rows.extend(f.matrix.row_vecs());
    let c = FPModule::from_rows_trusted(t.modulus, t.ngens, rows);
    let proj = ModuleMap::identity(t);
    let proj = ModuleMap::new_trusted(t.clone(), c.clone(), proj.rows());
    Ok((c, proj))
}

/// Image of `f` as a submodule of the target, with its inclusion and the
/// corestriction `source → image`.
pub fn image_module(f: &ModuleMap) -> Result<(FPModule, ModuleMap, ModuleMap)> {
    let (img, incl) = submodule(&f.target, &f.rows())?;
    let co = f
        .factor_through(&incl)?
        .ok_or_else(|| Error::Internal("image does not contain f".into()))?;
    Ok((img, incl, co))
}

/// A direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: FPModule,
    pub injections: Vec<ModuleMap>,
    pub projections: Vec<ModuleMap>,
    offsets: Vec<usize>,
}

impl DirectSum {
    /// Concatenation of one element per summand.
    pub fn element(&self, parts: &[Vec<u64>]) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.module.ngens);
        for p in parts {
            v.extend_from_slice(p);
        }
        self.module.reduce(&v)
    }

    /// The summand coordinates of `v`.
    pub fn split(&self, v: &[u64]) -> Vec<Vec<u64>> {
        (0..self.offsets.len() - 1)
            .map(|i| v[self.offsets[i]..self.offsets[i + 1]].to_vec())
            .collect()
    }
}

pub fn direct_sum(modulus: Modulus, ms: &[FPModule]) -> Result<DirectSum> {
    for m in ms {
        check_modulus(modulus, m.modulus)?;
    }
    let total: usize = ms.iter().map(|m| m.ngens).sum();
    let mut offsets = vec![0];
    let mut rows = Vec::new();
    for m in ms {
        let off = *offsets.last().unwrap();
        for r in m.relation_rows() {
            let mut row = vec![0; total];
            row[off..off + m.ngens].copy_from_slice(&r);
            rows.push(row);
        }
        offsets.push(off + m.ngens);
    }
    let module = FPModule::from_rows_trusted(modulus, total, rows);
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    for (k, m) in ms.iter().enumerate() {
        let off = offsets[k];
        let inj_rows = (0..m.ngens)
            .map(|i| {
                let mut r = vec![0; total];
                r[off + i] = 1;
                r
            })
            .collect();
        injections.push(ModuleMap::new_trusted(m.clone(), module.clone(), inj_rows));
        let proj_rows = (0..total)
            .map(|j| {
                let mut r = vec![0; m.ngens];
                if j >= off && j < off + m.ngens {
                    r[j - off] = 1;
                }
                r
            })
            .collect();
        projections.push(ModuleMap::new_trusted(module.clone(), m.clone(), proj_rows));
    }
    Ok(DirectSum {
        module,
        injections,
        projections,
        offsets,
    })
}

/// `(f_1, …, f_n): A → B_1 ⊕ … ⊕ B_n`.
pub fn into_sum(maps: &[ModuleMap]) -> Result<ModuleMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::NotComposable("empty map list".into()))?;
    let src = first.source.clone();
    for f in maps {
        if f.source != src {
            return Err(Error::NotComposable("into_sum needs a common source".into()));
        }
    }
    let targets: Vec<FPModule> = maps.iter().map(|f| f.target.clone()).collect();
    let sum = direct_sum(src.modulus, &targets)?;
    let rows = (0..src.ngens)
        .map(|i| {
            let mut r = Vec::with_capacity(sum.module.ngens);
            for f in maps {
                r.extend_from_slice(f.matrix.row(i));
            }
            r
        })
        .collect();
    Ok(ModuleMap::new_trusted(src, sum.module, rows))
}

/// `[f_1, …, f_n]: A_1 ⊕ … ⊕ A_n → B`.
pub fn from_sum(maps: &[ModuleMap]) -> Result<ModuleMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::NotComposable("empty map list".into()))?;
    let tgt = first.target.clone();
    for f in maps {
        if f.target != tgt {
            return Err(Error::NotComposable("from_sum needs a common target".into()));
        }
    }
    let sources: Vec<FPModule> = maps.iter().map(|f| f.source.clone()).collect();
    let sum = direct_sum(tgt.modulus, &sources)?;
    let mut rows = Vec::with_capacity(sum.module.ngens);
    for f in maps {
        rows.extend(f.rows());
    }
    Ok(ModuleMap::new_trusted(sum.module, tgt, rows))
}

/// `f_1 ⊕ … ⊕ f_n`.
pub fn diag_sum(maps: &[ModuleMap]) -> Result<ModuleMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::NotComposable("empty map list".into()))?;
    let modulus = first.modulus();
    let sources: Vec<FPModule> = maps.iter().map(|f| f.source.clone()).collect();
    let targets: Vec<FPModule> = maps.iter().map(|f| f.target.clone()).collect();
    let s = direct_sum(modulus, &sources)?;
    let t = direct_sum(modulus, &targets)?;
    let blocks: Vec<&MatZN> = maps.iter().map(|f| &f.matrix).collect();
    let m = MatZN::block_diag(modulus, &blocks);
    Ok(ModuleMap::new_trusted(s.module, t.module, m.row_vecs()))
}

/// `a ⊗ b`; generator `(i, j)` has index `i·b.ngens + j`.
pub fn tensor(a: &FPModule, b: &FPModule) -> Result<FPModule> {
    check_modulus(a.modulus, b.modulus)?;
    let ia = MatZN::identity(a.modulus, a.ngens);
    let ib = MatZN::identity(a.modulus, b.ngens);
    let r1 = a.relations.kronecker(&ib);
    let r2 = ia.kronecker(&b.relations);
    let rows = r1.vstack(&r2)?;
    Ok(FPModule::from_rows_trusted(
        a.modulus,
        a.ngens * b.ngens,
        rows.row_vecs(),
    ))
}

/// The generator index of `g_i ⊗ h_j` in [`tensor`].
pub fn tensor_index(b: &FPModule, i: usize, j: usize) -> usize {
    i * b.ngens + j
}

/// `f ⊗ g` between the tensor products of sources and targets.
pub fn tensor_map(f: &ModuleMap, g: &ModuleMap) -> Result<ModuleMap> {
    let s = tensor(&f.source, &g.source)?;
    let t = tensor(&f.target, &g.target)?;
    let m = f.matrix.kronecker(&g.matrix);
    Ok(ModuleMap::new_trusted(s, t, m.row_vecs()))
}

/// `Hom(M, K)` as a submodule of `K^{ngens(M)}`: an element is the list of
/// images of the generators of `M`.
#[derive(Clone, Debug)]
pub struct HomModule {
    pub source: FPModule,
    pub target: FPModule,
    pub module: FPModule,
    /// `module → K^{ngens(M)}`.
    pub inclusion: ModuleMap,
}

impl HomModule {
    pub fn to_map(&self, e: &[u64]) -> ModuleMap {
        let v = self.inclusion.apply(e);
        let k = self.target.ngens;
        let rows = (0..self.source.ngens)
            .map(|i| v[i * k..(i + 1) * k].to_vec())
            .collect();
        ModuleMap::new_trusted(self.source.clone(), self.target.clone(), rows)
    }

    pub fn from_map(&self, f: &ModuleMap) -> Result<Vec<u64>> {
        if f.source != self.source || f.target != self.target {
            return Err(Error::NotComposable("map is not in this Hom group".into()));
        }
        let v: Vec<u64> = f.matrix.entries().to_vec();
        self.inclusion
            .preimage(&v)
            .ok_or_else(|| Error::Internal("well-defined map outside Hom".into()))
    }

    /// Maps given by the generators of the Hom module.
    pub fn generator_maps(&self) -> Vec<ModuleMap> {
        (0..self.module.ngens)
            .map(|i| self.to_map(&self.module.unit(i)))
            .collect()
    }
}

pub fn hom_group(m: &FPModule, k: &FPModule) -> Result<HomModule> {
    check_modulus(m.modulus, k.modulus)?;
    let modulus = m.modulus;
    let copies = vec![k.clone(); m.ngens];
    let km = direct_sum(modulus, &copies)?.module;
    let nrel = m.relations.rows();
    let copies_r = vec![k.clone(); nrel];
    let kr = direct_sum(modulus, &copies_r)?.module;
    let kk = k.ngens;
    let mut rows = vec![vec![0u64; nrel * kk]; m.ngens * kk];
    for rho in 0..nrel {
        for i in 0..m.ngens {
            let c = m.relations.get(rho, i);
            if c == 0 {
                continue;
            }
            for j in 0..kk {
                rows[i * kk + j][rho * kk + j] = c;
            }
        }
    }
    let constraint = ModuleMap::new_trusted(km, kr, rows);
    let (module, inclusion) = kernel_module(&constraint)?;
    Ok(HomModule {
        source: m.clone(),
        target: k.clone(),
        module,
        inclusion,
    })
}

/// The homomorphism `dom → cod` sending `φ` to `pre · φ · post`
/// (first `pre`, then `φ`, then `post`).
pub fn hom_map(
    dom: &HomModule,
    cod: &HomModule,
    pre: Option<&ModuleMap>,
    post: Option<&ModuleMap>,
) -> Result<ModuleMap> {
    let mut rows = Vec::with_capacity(dom.module.ngens);
    for phi in dom.generator_maps() {
        let mut f = phi;
        if let Some(p) = pre {
            f = p.then(&f)?;
        }
        if let Some(q) = post {
            f = f.then(q)?;
        }
        rows.push(cod.from_map(&f)?);
    }
    Ok(ModuleMap::new_trusted(
        dom.module.clone(),
        cod.module.clone(),
        rows,
    ))
}

/// A linear condition `pre · φ · post = value` on an unknown `φ: S → T`.
#[derive(Clone, Debug)]
pub struct HomConstraint {
    pub pre: Option<ModuleMap>,
    pub post: Option<ModuleMap>,
    pub value: ModuleMap,
}

/// Some `φ: source → target` satisfying every constraint.
pub fn solve_hom(
    source: &FPModule,
    target: &FPModule,
    constraints: &[HomConstraint],
) -> Result<Option<ModuleMap>> {
    let dom = hom_group(source, target)?;
    if constraints.is_empty() {
        return Ok(Some(ModuleMap::zero(source, target)));
    }
    let mut maps = Vec::new();
    let mut values = Vec::new();
    for c in constraints {
        let cod = hom_group(c.value.source(), c.value.target())?;
        maps.push(hom_map(&dom, &cod, c.pre.as_ref(), c.post.as_ref())?);
        values.push(cod.from_map(&c.value)?);
    }
    let total = into_sum(&maps)?;
    let v: Vec<u64> = values.concat();
    Ok(total.preimage(&v).map(|x| dom.to_map(&x)))
}

/// Where and how exactness fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactnessFailure {
    /// The composite into and out of `node` is nonzero on `witness`.
    NotAComplex { node: usize, witness: Vec<u64> },
    /// `witness` at `node` is a cycle but not a boundary.
    KernelNotInImage { node: usize, witness: Vec<u64> },
}

impl ExactnessFailure {
    pub fn node(&self) -> usize {
        match self {
            ExactnessFailure::NotAComplex { node, .. }
            | ExactnessFailure::KernelNotInImage { node, .. } => *node,
        }
    }
}

/// A sequence of composable maps `C_0 → C_1 → … → C_n`. Node `j` is `C_j`;
/// exactness is checked at the interior nodes `1..n`.
#[derive(Clone, Debug)]
pub struct Complex {
    maps: Vec<ModuleMap>,
}

impl Complex {
    pub fn new(maps: Vec<ModuleMap>) -> Result<Self> {
        for w in maps.windows(2) {
            if w[0].target != w[1].source {
                return Err(Error::NotComposable(
                    "consecutive maps do not share a module".into(),
                ));
            }
        }
        Ok(Complex { maps })
    }

    /// `0 → C_0 → … → C_n → 0`.
    pub fn with_zero_ends(maps: Vec<ModuleMap>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::NotComposable("empty complex".into()))?;
        let modulus = first.modulus();
        let z = FPModule::zero(modulus);
        let mut all = vec![ModuleMap::zero(&z, first.source())];
        let last = maps.last().unwrap().target().clone();
        all.extend(maps);
        all.push(ModuleMap::zero(&last, &z));
        Self::new(all)
    }

    /// `0 → K → E → M → 0`.
    pub fn short(i: &ModuleMap, p: &ModuleMap) -> Result<Self> {
        Self::with_zero_ends(vec![i.clone(), p.clone()])
    }

    pub fn maps(&self) -> &[ModuleMap] {
        &self.maps
    }

    pub fn node(&self, j: usize) -> &FPModule {
        if j == 0 {
            self.maps[0].source()
        } else {
            self.maps[j - 1].target()
        }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn exactness_at(&self, node: usize) -> Option<ExactnessFailure> {
        let f = &self.maps[node - 1];
        let g = &self.maps[node];
        let c = self.node(node);
        for i in 0..f.source().ngens {
            let y = f.apply(&f.source().unit(i));
            if !g.target().is_zero_element(&g.apply(&y)) {
                return Some(ExactnessFailure::NotAComplex { node, witness: y });
            }
        }
        for w in kernel_generators(g) {
            if !f.image_contains(&w) {
                return Some(ExactnessFailure::KernelNotInImage {
                    node,
                    witness: c.reduce(&w),
                });
            }
        }
        None
    }

    /// First failure, scanning nodes left to right.
    pub fn exactness(&self) -> Option<ExactnessFailure> {
        (1..self.maps.len()).find_map(|j| self.exactness_at(j))
    }

    pub fn is_exact(&self) -> bool {
        self.exactness().is_none()
    }

    /// All consecutive composites vanish.
    pub fn is_complex(&self) -> bool {
        self.maps
            .windows(2)
            .all(|w| w[0].then(&w[1]).map(|h| h.is_zero()).unwrap_or(false))
    }
}

/// A free resolution `F_depth → … → F_1 → F_0 → M` with `F_0` free on the
/// generators of `M` and `d_1` the relation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeResolution {
    module: FPModule,
    differentials: Vec<MatZN>,
}

impl FreeResolution {
    pub fn new(m: &FPModule, depth: usize) -> Self {
        let modulus = m.modulus;
        let mut differentials = Vec::with_capacity(depth);
        if depth > 0 {
            differentials.push(m.relations.clone());
        }
        while differentials.len() < depth {
            let k = crate::linalg::kernel(differentials.last().unwrap());
            differentials.push(k);
        }
        let _ = modulus;
        FreeResolution {
            module: m.clone(),
            differentials,
        }
    }

    pub fn module(&self) -> &FPModule {
        &self.module
    }

    pub fn depth(&self) -> usize {
        self.differentials.len()
    }

    /// Rank of `F_i`, `0 <= i <= depth`.
    pub fn rank(&self, i: usize) -> usize {
        if i == 0 {
            self.module.ngens
        } else {
            self.differentials[i - 1].rows()
        }
    }

    /// Matrix of `d_i: F_i → F_{i-1}`, `1 <= i <= depth`.
    pub fn differential(&self, i: usize) -> &MatZN {
        &self.differentials[i - 1]
    }

    pub fn free(&self, i: usize) -> FPModule {
        FPModule::free(self.module.modulus, self.rank(i))
    }

    pub fn differential_map(&self, i: usize) -> ModuleMap {
        ModuleMap::new_trusted(
            self.free(i),
            self.free(i - 1),
            self.differential(i).row_vecs(),
        )
    }

    pub fn augmentation(&self) -> ModuleMap {
        let id = ModuleMap::identity(&self.module);
        ModuleMap::new_trusted(self.free(0), self.module.clone(), id.rows())
    }

    /// `F_depth → … → F_0 → M → 0`.
    pub fn complex(&self) -> Result<Complex> {
        let mut maps: Vec<ModuleMap> = (1..=self.depth())
            .rev()
            .map(|i| self.differential_map(i))
            .collect();
        maps.push(self.augmentation());
        let z = FPModule::zero(self.module.modulus);
        maps.push(ModuleMap::zero(&self.module, &z));
        Complex::new(maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn cyclic_and_orders() {
        let m = FPModule::cyclic(z(12), 4).unwrap();
        assert_eq!(m.order(), 4);
        assert_eq!(m.invariant_factors(), vec![4]);
        assert!(FPModule::cyclic(z(12), 5).is_err());
        let zero = FPModule::cyclic(z(12), 1).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.order(), 1);
        assert_eq!(FPModule::free(z(4), 2).order(), 16);
    }

    #[test]
    fn elements_are_canonical_and_distinct() {
        let m = FPModule::from_relations(z(4), 2, &[vec![2, 1]]).unwrap();
        let els = m.elements(DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(els.len() as u128, m.order());
        for e in &els {
            assert_eq!(&m.reduce(e), e);
        }
        let set: std::collections::BTreeSet<_> = els.iter().collect();
        assert_eq!(set.len(), els.len());
    }

    #[test]
    fn kernel_examples() {
        let m = FPModule::free(z(4), 1);
        let f = ModuleMap::from_rows(m.clone(), m.clone(), &[vec![2]]).unwrap();
        let (k, incl) = kernel_module(&f).unwrap();
        assert_eq!(k.order(), 2);
        assert_eq!(incl.apply(&k.unit(0)), vec![2]);

        let (k, _) = kernel_module(&ModuleMap::identity(&m)).unwrap();
        assert!(k.is_zero());

        let m2 = FPModule::free(z(4), 2);
        let f = ModuleMap::from_rows(m2, m, &[vec![1], vec![1]]).unwrap();
        let (k, incl) = kernel_module(&f).unwrap();
        assert_eq!(k.order(), 4);
        let g = incl.apply(&k.unit(0));
        assert!(g == vec![1, 3] || g == vec![3, 1]);
    }

    #[test]
    fn cokernel_examples() {
        let m = FPModule::free(z(4), 1);
        let f = ModuleMap::from_rows(m.clone(), m.clone(), &[vec![2]]).unwrap();
        assert_eq!(cokernel_module(&f).unwrap().0.order(), 2);
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let (c, _) = cokernel_module(&ModuleMap::zero(&z2, &z2)).unwrap();
        assert_eq!(c, z2);
        let f = ModuleMap::from_rows(z2, m, &[vec![2]]).unwrap();
        assert_eq!(cokernel_module(&f).unwrap().0.invariant_factors(), vec![2]);
    }

    #[test]
    fn ill_defined_map_rejected() {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let z4 = FPModule::free(z(4), 1);
        assert!(ModuleMap::from_rows(z2, z4, &[vec![1]]).is_err());
    }

    #[test]
    fn sums_and_tensors() {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let s = direct_sum(z(4), &[z2.clone(), z2.clone()]).unwrap();
        assert_eq!(s.module.relations().row_vecs(), vec![vec![2, 0], vec![0, 2]]);
        assert!(direct_sum(z(4), &[]).unwrap().module.is_zero());
        assert_eq!(tensor(&z2, &z2).unwrap().order(), 2);
        let a = FPModule::cyclic(z(6), 2).unwrap();
        let b = FPModule::cyclic(z(6), 3).unwrap();
        assert!(tensor(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn hom_examples() {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let z4 = FPModule::free(z(4), 1);
        let h = hom_group(&z2, &z4).unwrap();
        assert_eq!(h.module.order(), 2);
        let f = h.to_map(&h.module.unit(0));
        assert_eq!(f.rows(), vec![vec![2]]);
        assert_eq!(hom_group(&z2, &z2).unwrap().module.order(), 2);
        assert!(hom_group(&z2, &FPModule::zero(z(4))).unwrap().module.is_zero());
    }

    #[test]
    fn short_exact_examples() {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let z4 = FPModule::free(z(4), 1);
        let i = ModuleMap::from_rows(z2.clone(), z4.clone(), &[vec![2]]).unwrap();
        let p = ModuleMap::from_rows(z4.clone(), z2.clone(), &[vec![1]]).unwrap();
        assert!(Complex::short(&i, &p).unwrap().is_exact());
        let p_bad = ModuleMap::from_rows(z4.clone(), z4.clone(), &[vec![1]]).unwrap();
        assert!(!Complex::short(&i, &p_bad).unwrap().is_exact());
        assert!(Complex::short(&i, &ModuleMap::identity(&z2)).is_err());
    }

    #[test]
    fn resolution_examples() {
        let z2 = FPModule::cyclic(z(4), 2).unwrap();
        let r = FreeResolution::new(&z2, 2);
        assert_eq!(r.differential(1).row_vecs(), vec![vec![2]]);
        assert_eq!(r.differential(2).row_vecs(), vec![vec![2]]);
        assert!(r.complex().unwrap().is_exact());
        let free = FreeResolution::new(&FPModule::free(z(4), 2), 3);
        assert_eq!(free.rank(1), 0);
        assert_eq!(free.rank(3), 0);
        assert!(free.complex().unwrap().is_exact());
    }

    #[test]
    fn restrict_and_descend() {
        let z2 = FPModule::cyclic(z(2), 2).unwrap();
        let r = z2.restrict_scalars(z(4)).unwrap();
        assert_eq!(r.relations().row_vecs(), vec![vec![2]]);
        assert_eq!(r.descend(z(2)).unwrap(), z2);
        assert!(FPModule::free(z(4), 1).descend(z(2)).is_err());
    }

    #[test]
    fn simplify_is_iso() {
        let m = FPModule::from_relations(z(12), 3, &[vec![1, 2, 3], vec![0, 4, 0]]).unwrap();
        let (s, to, from) = m.simplify();
        assert!(s.ngens() < 3);
        assert_eq!(s.order(), m.order());
        assert_eq!(to.then(&from).unwrap(), ModuleMap::identity(&m));
        assert_eq!(from.then(&to).unwrap(), ModuleMap::identity(&s));
    }
}

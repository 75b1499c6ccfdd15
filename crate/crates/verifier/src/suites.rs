//! Property suites run over the instance family, plus the instance-free
//! suites for Čech complexes, fiber-product lifting and Baer sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqz_core::butterfly::{
    butterfly_between, class_of_two_extension, comparison_map, compose, identity_butterfly,
    induced_butterfly_with, invert, splitting_butterfly, two_isomorphism, TwoExtension,
};
use sqz_core::cech::{
    baby_cech, cech_complex, hom_cech_exactness, lift_fiber_product, non_injectivity_witness,
    shearing_iso, tautological_cover, Cover, SpanOfSets,
};
use sqz_core::ext::{
    baer_sum, class_of_extension, ext_group, extension_of_class, pullback_extension,
    pushout_extension,
};
use sqz_core::faults::Faults;
use sqz_core::linalg::Modulus;
use sqz_core::module::{hom_group, kernel_module};
use sqz_core::squarezero::{omega_cover_change, DeformationProblem, SquareZeroPair};
use sqz_core::{Error, FPModule, ModuleMap, Result};

use crate::instances::{module_grid, module_label};
use crate::report::{Check, SuiteReport, Verdict};

/// Knobs shared by every suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Largest module whose elements are enumerated.
    pub max_order: u128,
    pub seed: u64,
    pub faults: Faults,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_order: sqz_core::module::DEFAULT_MAX_ORDER,
            seed: 0,
            faults: Faults::NONE,
        }
    }
}

fn err_check(name: &str, node: &str, e: Error) -> Check {
    Check::new(name, Verdict::fail(node, e.to_string()))
}

/// For every `u ∈ Hom_A(J⊗M, K)`: the linear criterion and the vanishing of
/// `u ⌣ ω` agree (`obstruction`), and for every solvable `u` the splitting
/// of `u ⌣ ω` yields through `β` an extension with `θ = u` (`beta`).
pub fn obstruction_checks(problem: &DeformationProblem, opts: &Options) -> [Check; 2] {
    let hom = problem.hom();
    let elements = match hom.module.elements(opts.max_order) {
        Ok(e) => e,
        Err(e) => {
            let why = format!("Hom_A(J(x)M,K) not enumerated: {e}");
            return [
                Check::new("obstruction", Verdict::skip(why.clone())),
                Check::new("beta", Verdict::skip(why)),
            ];
        }
    };
    let total = elements.len() as u64;
    let mut solvable = 0u64;
    let mut obstruction = Verdict::Pass;
    let mut beta = Verdict::Pass;
    for e in &elements {
        let u = hom.to_map(e);
        match problem.solve(&u) {
            Ok(None) => {}
            Ok(Some(_)) => {
                solvable += 1;
                if beta.is_pass() {
                    beta = beta_verdict(problem, &u);
                }
            }
            Err(err) => {
                if obstruction.is_pass() {
                    obstruction = Verdict::fail("solve", format!("u = {:?}: {err}", u.rows()));
                }
            }
        }
    }
    [
        Check::new("obstruction", obstruction)
            .with_stat("maps", total)
            .with_stat("solvable", solvable),
        Check::new("beta", beta).with_stat("solvable", solvable),
    ]
}

fn beta_verdict(problem: &DeformationProblem, u: &ModuleMap) -> Verdict {
    let run = || -> Result<Verdict> {
        let t = problem.cup_omega(u)?;
        let Some(b) = splitting_butterfly(&t)? else {
            return Ok(Verdict::fail(
                "splitting",
                format!("u = {:?}: u ⌣ ω has zero class but no splitting butterfly", u.rows()),
            ));
        };
        problem.extension_from_splitting(u, &b)?;
        Ok(Verdict::Pass)
    };
    run().unwrap_or_else(|e| Verdict::fail("beta", format!("u = {:?}: {e}", u.rows())))
}

/// How many generators of `Hom` feed the butterfly suite.
const BUTTERFLY_GENERATORS: usize = 3;

/// On `ω` and on `u ⌣ ω` for generators `u`: the butterfly induced by the
/// comparison chain map validates and preserves the class, composing it
/// with its inverse gives the identity up to 2-isomorphism, butterflies
/// between pairs exist exactly when the classes agree, and the two free
/// covers of `ω` are joined by a valid butterfly.
pub fn butterfly_check(problem: &DeformationProblem, opts: &Options) -> Check {
    let run = || -> Result<Verdict> {
        let mut ts: Vec<(String, TwoExtension)> =
            vec![("omega".into(), problem.omega().two_extension.clone())];
        for (i, u) in problem
            .hom()
            .generator_maps()
            .into_iter()
            .take(BUTTERFLY_GENERATORS)
            .enumerate()
        {
            ts.push((format!("u{i} ⌣ omega"), problem.cup_omega(&u)?));
        }
        for (name, t) in &ts {
            if let Some(v) = induced_round_trip(name, t, opts.faults)? {
                return Ok(v);
            }
        }
        let cups = &ts[1..];
        for (i, (ni, ti)) in cups.iter().enumerate() {
            for (nj, tj) in &cups[i + 1..] {
                let same = class_of_two_extension(ti)? == class_of_two_extension(tj)?;
                match butterfly_between(ti, tj)? {
                    Some(b) if !same || !b.is_valid()? => {
                        return Ok(Verdict::fail(
                            "connected",
                            format!("{ni} and {nj} joined by a butterfly but classes differ"),
                        ))
                    }
                    None if same => {
                        return Ok(Verdict::fail(
                            "connected",
                            format!("{ni} and {nj} have equal classes but no butterfly"),
                        ))
                    }
                    _ => {}
                }
            }
        }
        let m = problem.m();
        if m.ngens() > 0 {
            let cm = omega_cover_change(problem.pair(), m, &[m.unit(0)])?;
            let b = match induced_butterfly_with(&cm, opts.faults) {
                Ok(b) => b,
                Err(e) => return Ok(Verdict::fail("omega-cover-change", e.to_string())),
            };
            if class_of_two_extension(b.source())? != class_of_two_extension(b.target())? {
                return Ok(Verdict::fail("omega-cover-change", "classes of the two covers differ"));
            }
        }
        Ok(Verdict::Pass)
    };
    let verdict = run().unwrap_or_else(|e| Verdict::fail("butterfly", e.to_string()));
    Check::new("butterfly", verdict)
}

fn induced_round_trip(name: &str, t: &TwoExtension, faults: Faults) -> Result<Option<Verdict>> {
    let (canon, cmp) = comparison_map(t)?;
    let b = match induced_butterfly_with(&cmp, faults) {
        Ok(b) => b,
        Err(e) => return Ok(Some(Verdict::fail("induced", format!("{name}: {e}")))),
    };
    if class_of_two_extension(&canon)? != class_of_two_extension(t)? {
        return Ok(Some(Verdict::fail("class", format!("{name}: comparison changes the class"))));
    }
    let round = compose(&b, &invert(&b)?)?;
    if two_isomorphism(&round, &identity_butterfly(&canon)?)?.is_none() {
        return Ok(Some(Verdict::fail(
            "compose-invert",
            format!("{name}: b ∘ b⁻¹ is not 2-isomorphic to the identity"),
        )));
    }
    Ok(None)
}

/// Tautological covers are only built for modules up to this order.
const TAUTOLOGICAL_LIMIT: u128 = 8;
pub const CECH_DEGREE: usize = 3;

/// Generated covers of `m`, each with a name.
pub fn covers_of(m: &FPModule) -> Result<Vec<(String, Cover)>> {
    let n = m.modulus();
    let g = m.ngens();
    let units: Vec<Vec<u64>> = (0..g).map(|i| m.unit(i)).collect();
    let gens = ModuleMap::from_rows(FPModule::free(n, g), m.clone(), &units)?;
    let mut out = vec![("generators".to_string(), Cover::new(m, vec![gens.clone()])?)];
    if g > 0 {
        let first = ModuleMap::from_rows(FPModule::free(n, 1), m.clone(), &units[..1])?;
        out.push((
            "first+identity".into(),
            Cover::new(m, vec![first, ModuleMap::identity(m)])?,
        ));
        let mut extra = units.clone();
        extra.push(units.iter().fold(m.zero_element(), |a, u| m.add(&a, u)));
        let wide = ModuleMap::from_rows(FPModule::free(n, g + 1), m.clone(), &extra)?;
        out.push(("generators+wide".into(), Cover::new(m, vec![gens, wide])?));
    }
    if m.order() <= TAUTOLOGICAL_LIMIT {
        out.push(("tautological".into(), tautological_cover(m, TAUTOLOGICAL_LIMIT)?));
    }
    Ok(out)
}

/// Shearing through `p = top` with face transport, and agreement of the
/// single-member Čech complex with the products it is built from.
pub fn shearing_verdict(f: &ModuleMap, top: usize) -> Result<Verdict> {
    let shears = (0..=top)
        .map(|p| shearing_iso(f, p))
        .collect::<Result<Vec<_>>>()?;
    for p in 1..=top {
        let (hi, lo) = (&shears[p], &shears[p - 1]);
        for i in 0..=p {
            let lhs = hi.shear.then(&hi.product_face(lo, i)?)?;
            let rhs = hi.model_face(lo, i)?.then(&lo.shear)?;
            if lhs != rhs {
                return Ok(Verdict::fail(format!("face d{i} at p={p}"), "transport fails"));
            }
        }
    }
    let cover = Cover::new(f.target(), vec![f.clone()])?;
    let cx = cech_complex(&cover, top)?;
    for p in 1..=top {
        let d = &cx.maps()[top - p];
        let (hi, lo) = (&shears[p], &shears[p - 1]);
        if d.source().order() != hi.model.order() {
            return Ok(Verdict::fail(format!("C_{p}"), "order differs from T+S^p"));
        }
        let d = d.with_modules(hi.product.module.clone(), lo.product.module.clone())?;
        let mut alt = ModuleMap::zero(&hi.model, &lo.model);
        for i in 0..=p {
            let face = hi.model_face(lo, i)?;
            alt = if i % 2 == 0 { alt.add(&face)? } else { alt.sub(&face)? };
        }
        if hi.shear.then(&d)? != alt.then(&lo.shear)? {
            return Ok(Verdict::fail(format!("d at p={p}"), "Čech differential is not the sheared alternating sum"));
        }
    }
    Ok(Verdict::Pass)
}

/// `baby_cech` exactness and exactness of `Hom(Čech, Z/N)` through degree
/// `d`.
pub fn cover_verdict(cover: &Cover, d: usize) -> Verdict {
    let n = cover.target().modulus();
    let run = || -> Result<Verdict> {
        if let Some(f) = baby_cech(cover)?.exactness() {
            return Ok(Verdict::fail(format!("baby-cech node {}", f.node()), format!("{f:?}")));
        }
        if !hom_cech_exactness(cover, &FPModule::free(n, 1), d)? {
            return Ok(Verdict::fail(
                "hom-cech",
                format!("Hom(-, Z/{n}) not exact through degree {d}"),
            ));
        }
        Ok(Verdict::Pass)
    };
    run().unwrap_or_else(|e| Verdict::fail("cech", e.to_string()))
}

/// Čech checks for every module in the grid of each pair's base ring.
pub fn cech_suite(pairs: &[SquareZeroPair]) -> SuiteReport {
    let mut checks = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for pair in pairs {
        if !seen.insert(pair.n().get()) {
            continue;
        }
        let n = pair.n();
        let grid = match module_grid(pair) {
            Ok(g) => g,
            Err(e) => {
                checks.push(err_check(&format!("cech Z/{n}"), "grid", e));
                continue;
            }
        };
        for m in &grid {
            let tag = format!("Z/{n} M={}", module_label(m));
            let covers = match covers_of(m) {
                Ok(c) => c,
                Err(e) => {
                    checks.push(err_check(&format!("cech {tag}"), "covers", e));
                    continue;
                }
            };
            for (cname, cover) in &covers {
                let name = format!("cech {tag} {cname}");
                checks.push(Check::new(name, cover_verdict(cover, CECH_DEGREE)));
            }
            let verdict = covers_of(m)
                .and_then(|c| shearing_verdict(&c[0].1.family()[0], CECH_DEGREE))
                .unwrap_or_else(|e| Verdict::fail("shearing", e.to_string()));
            checks.push(Check::new(format!("shearing {tag}"), verdict));
        }
    }
    SuiteReport {
        name: "cech".into(),
        checks,
    }
}

/// Random spans `S → R ← T` of at most this many points per set.
const SPAN_SIZE: usize = 4;
pub const FIBER_TRIALS: usize = 40;

/// `lift_fiber_product` on the fixed example, the non-injectivity witness,
/// and random sections of random spans.
pub fn fiber_product_suite(moduli: &[u64], seed: u64) -> SuiteReport {
    let mut checks = Vec::new();
    for &n in moduli {
        let Ok(zn) = Modulus::new(n) else { continue };
        let fixed = (|| -> Result<Verdict> {
            let span = SpanOfSets::new(1, vec![0, 0], vec![0, 0])?;
            let (x, y) = (vec![1, 1], vec![1, 1]);
            let lift = lift_fiber_product(zn, &span, &x, &y)?;
            let image = span.comparison(zn)?.apply(&lift);
            if image != [x, y].concat() {
                return Ok(Verdict::fail("fixed", format!("lift {lift:?} projects to {image:?}")));
            }
            let (wspan, w) = non_injectivity_witness(zn)?;
            let cmp = wspan.comparison(zn)?;
            if w.iter().all(|&c| c == 0) || cmp.apply(&w).iter().any(|&c| c != 0) {
                return Ok(Verdict::fail("witness", format!("{w:?} is not a nonzero kernel element")));
            }
            let (ker, _) = kernel_module(&cmp)?;
            if ker.order() <= 1 {
                return Ok(Verdict::fail("witness", "comparison map is injective"));
            }
            Ok(Verdict::Pass)
        })()
        .unwrap_or_else(|e| Verdict::fail("fixed", e.to_string()));
        checks.push(Check::new(format!("fiber-product Z/{n} fixed"), fixed));

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
        let mut verdict = Verdict::Pass;
        let mut lifted = 0u64;
        for _ in 0..FIBER_TRIALS {
            let r = rng.gen_range(1..=3);
            let s: Vec<usize> = (0..rng.gen_range(1..=SPAN_SIZE)).map(|_| rng.gen_range(0..r)).collect();
            let t: Vec<usize> = (0..rng.gen_range(1..=SPAN_SIZE)).map(|_| rng.gen_range(0..r)).collect();
            let outcome = (|| -> Result<Option<String>> {
                let span = SpanOfSets::new(r, s.clone(), t.clone())?;
                let cmp = span.comparison(zn)?;
                let z: Vec<u64> = (0..cmp.source().ngens()).map(|_| rng.gen_range(0..n)).collect();
                let section = cmp.apply(&z);
                let (x, y) = section.split_at(s.len());
                let lift = lift_fiber_product(zn, &span, x, y)?;
                if cmp.apply(&lift) != section {
                    return Ok(Some(format!("span {s:?}->{r}<-{t:?}: lift of {section:?} projects wrongly")));
                }
                Ok(None)
            })();
            match outcome {
                Ok(None) => lifted += 1,
                Ok(Some(w)) => {
                    verdict = Verdict::fail("projection", w);
                    break;
                }
                Err(e) => {
                    verdict = Verdict::fail("lift", format!("span {s:?}->{r}<-{t:?}: {e}"));
                    break;
                }
            }
        }
        checks.push(Check::new(format!("fiber-product Z/{n} random"), verdict).with_stat("lifted", lifted));
    }
    SuiteReport {
        name: "fiber-products".into(),
        checks,
    }
}

/// A uniformly random element of `Hom(a, b)`.
pub fn random_hom(rng: &mut impl Rng, a: &FPModule, b: &FPModule) -> Result<ModuleMap> {
    let h = hom_group(a, b)?;
    let n = h.module.modulus().get();
    let v: Vec<u64> = (0..h.module.ngens()).map(|_| rng.gen_range(0..n)).collect();
    Ok(h.to_map(&h.module.reduce(&v)))
}

/// Small modules used for random extension pairs.
pub fn small_modules(n: u64) -> Result<Vec<FPModule>> {
    let zn = Modulus::new(n)?;
    let mut out = Vec::new();
    for d in sqz_core::linalg::divisors(n).into_iter().filter(|&d| d > 1) {
        out.push(FPModule::cyclic(zn, d)?);
    }
    if n % 2 == 0 {
        out.push(FPModule::from_orders(zn, &[2, 2])?);
    }
    Ok(out)
}

/// Seeded Baer coherence: additivity of classes under Baer sum, and
/// naturality of classes under pullback and pushout along random maps.
pub fn baer_suite(moduli: &[u64], samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools: Vec<Vec<FPModule>> = moduli
        .iter()
        .filter_map(|&n| small_modules(n).ok())
        .filter(|p| !p.is_empty())
        .collect();
    let mut sum = Verdict::Pass;
    let mut natural = Verdict::Pass;
    let mut done = 0u64;
    for _ in 0..samples {
        if pools.is_empty() {
            break;
        }
        let pool = &pools[rng.gen_range(0..pools.len())];
        let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
        let (m, k, n2, l) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let outcome = (|| -> Result<(Verdict, Verdict)> {
            let g = ext_group(1, &m, &k)?;
            let rand_class = |rng: &mut ChaCha8Rng| {
                let n = g.module().modulus().get();
                let v: Vec<u64> = (0..g.module().ngens()).map(|_| rng.gen_range(0..n)).collect();
                g.class(&g.module().reduce(&v))
            };
            let (c1, c2) = (rand_class(&mut rng)?, rand_class(&mut rng)?);
            let (x, y) = (extension_of_class(&c1)?, extension_of_class(&c2)?);
            let label = format!("M={} K={} c1={:?} c2={:?}", module_label(&m), module_label(&k), c1.element(), c2.element());
            let s = if class_of_extension(&baer_sum(&x, &y)?)? == c1.add(&c2)? {
                Verdict::Pass
            } else {
                Verdict::fail("baer-sum", label.clone())
            };
            let f = random_hom(&mut rng, &n2, &m)?;
            let h = random_hom(&mut rng, &k, &l)?;
            let pb = class_of_extension(&pullback_extension(&x, &f)?)? == c1.pullback(&f)?;
            let po = class_of_extension(&pushout_extension(&x, &h)?)? == c1.pushforward(&h)?;
            let nat = if pb && po {
                Verdict::Pass
            } else {
                Verdict::fail(
                    if pb { "pushout" } else { "pullback" },
                    format!("{label} f={:?} g={:?}", f.rows(), h.rows()),
                )
            };
            Ok((s, nat))
        })();
        match outcome {
            Ok((s, nat)) => {
                if sum.is_pass() {
                    sum = s;
                }
                if natural.is_pass() {
                    natural = nat;
                }
            }
            Err(e) => {
                if sum.is_pass() {
                    sum = Verdict::fail("baer", e.to_string());
                }
            }
        }
        done += 1;
    }
    SuiteReport {
        name: "baer".into(),
        checks: vec![
            Check::new("baer-sum additivity", sum).with_stat("samples", done),
            Check::new("pullback/pushout naturality", natural).with_stat("samples", done),
        ],
    }
}

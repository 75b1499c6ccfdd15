use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sqz_core::butterfly::{
    butterfly_between, class_of_two_extension, comparison_map, compose, identity_butterfly,
    induced_butterfly, invert, two_isomorphism, TwoExtension,
};
use sqz_core::ext::ext_group;
use sqz_core::faults::Faults;
use sqz_core::linalg::Modulus;
use sqz_core::squarezero::{DeformationProblem, SquareZeroPair};
use sqz_core::ModuleMap;

use sqz_verifier::file::{parse_matrix, parse_module, InputError, InputResult, InstanceFile};
use sqz_verifier::instances::{module_label, Instance, DEFAULT_PAIRS};
use sqz_verifier::suites::{cover_verdict, shearing_verdict, Options};
use sqz_verifier::{build_illusie_sequence, run_suite, RunConfig};

#[derive(Parser)]
#[command(name = "sqz-verify", version, about = "Verify square-zero deformation theory over Z/N")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the JSON result to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Seed for randomized property sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest module whose elements are enumerated; bigger ones are skipped.
    #[arg(long, global = true, default_value_t = 4096)]
    max_order: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every suite over the instance family.
    Verify {
        /// A square-zero pair `N',N`; repeatable. Defaults to the standard family.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(u64, u64)>,
        /// Random extension pairs for the Baer suite.
        #[arg(long, default_value_t = 100)]
        baer_samples: usize,
        /// Deliberately corrupt a construction (test hook).
        #[arg(long, value_enum)]
        fault: Vec<FaultArg>,
    },
    /// The four-term sequence for one instance.
    Illusie(InstanceArgs),
    /// `Ext^p_{Z/N}(M, K)`.
    Ext {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        module: String,
        #[arg(long)]
        coeff: String,
    },
    /// The matrix of `θ: Ext¹_{A'}(M,K) → Hom_A(J⊗M,K)`.
    Theta(InstanceArgs),
    /// Decide whether `u: J⊗M → K` deforms, and build the deformation.
    Deform {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Matrix of `u` in the generators of `J⊗M` and `K`, as JSON rows.
        #[arg(long)]
        u: String,
    },
    /// Čech checks for the covers in an instance file.
    Cech {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Butterfly algebra on 2-extensions from an instance file, or on `ω`
    /// and `u ⌣ ω` for an instance.
    Butterfly {
        #[arg(value_enum)]
        op: ButterflyOp,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        nprime: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        coeff: Option<String>,
    },
}

#[derive(Args, Clone)]
struct InstanceArgs {
    #[arg(long)]
    nprime: u64,
    #[arg(long)]
    n: u64,
    /// `M`: a file, inline JSON, or a literal such as `Z/2+Z/4`.
    #[arg(long)]
    module: String,
    /// `K`, in the same forms.
    #[arg(long)]
    coeff: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    InducedProjectionSign,
    CupOmegaSign,
}

#[derive(Clone, Copy, ValueEnum)]
enum ButterflyOp {
    Compose,
    Invert,
    Validate,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected N',N, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad N' in `{s}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad N in `{s}`"))?;
    Ok((a, b))
}

/// The outcome of a command: a JSON body and whether verification passed.
struct Outcome {
    body: Value,
    passed: bool,
}

fn instance(args: &InstanceArgs) -> InputResult<Instance> {
    let pair = SquareZeroPair::new(args.nprime, args.n)?;
    let m = parse_module(&args.module, pair.n())?;
    let k = parse_module(&args.coeff, pair.n())?;
    Ok(Instance::new(pair, m, k)?)
}

fn options(cli: &Cli) -> Options {
    Options {
        max_order: cli.max_order as u128,
        seed: cli.seed,
        faults: Faults::NONE,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: &Cli) -> InputResult<Outcome> {
    match &cli.cmd {
        Cmd::Verify {
            pairs,
            baer_samples,
            fault,
        } => {
            let mut faults = Faults::NONE;
            for f in fault {
                match f {
                    FaultArg::InducedProjectionSign => faults.induced_projection_sign = true,
                    FaultArg::CupOmegaSign => faults.cup_omega_sign = true,
                }
            }
            let cfg = RunConfig {
                pairs: if pairs.is_empty() {
                    DEFAULT_PAIRS.to_vec()
                } else {
                    pairs.clone()
                },
                options: Options {
                    faults,
                    ..options(cli)
                },
                baer_samples: *baer_samples,
            };
            let report = run_suite(&cfg)?;
            for line in report.failures() {
                eprintln!("FAIL {line}");
            }
            eprintln!(
                "{} pass, {} fail, {} skip",
                report.summary.pass, report.summary.fail, report.summary.skip
            );
            Ok(Outcome {
                passed: report.passed(),
                body: to_value(&report),
            })
        }
        Cmd::Illusie(args) => {
            let rep = build_illusie_sequence(&instance(args)?, &options(cli));
            Ok(Outcome {
                passed: !rep.failed(),
                body: to_value(&rep),
            })
        }
        Cmd::Ext { p, n, module, coeff } => {
            let zn = Modulus::new(*n)?;
            let m = parse_module(module, zn)?;
            let k = parse_module(coeff, zn)?;
            let g = ext_group(*p, &m, &k)?;
            Ok(Outcome {
                passed: true,
                body: json!({
                    "p": p,
                    "M": module_label(&m),
                    "K": module_label(&k),
                    "invariant_factors": g.invariant_factors(),
                    "order": g.order() as u64,
                }),
            })
        }
        Cmd::Theta(args) => {
            let inst = instance(args)?;
            let problem = DeformationProblem::new(inst.pair, &inst.m, &inst.k)?;
            let tm = problem.theta_matrix();
            Ok(Outcome {
                passed: true,
                body: json!({
                    "label": inst.label,
                    "ext1_A'": tm.ext.invariant_factors(),
                    "hom": tm.hom.module.invariant_factors(),
                    "matrix": tm.map.rows(),
                    "injective": tm.map.is_injective(),
                    "surjective": tm.map.is_surjective(),
                }),
            })
        }
        Cmd::Deform { inst, u } => deform(inst, u),
        Cmd::Cech { cover, degree } => cech(cover, *degree),
        Cmd::Butterfly {
            op,
            file,
            nprime,
            n,
            module,
            coeff,
        } => {
            let ts = match (file, nprime, n, module, coeff) {
                (Some(f), ..) => InstanceFile::load(f)?.resolve()?.two_extensions.into_iter().collect(),
                (None, Some(np), Some(n), Some(m), Some(k)) => {
                    let inst = instance(&InstanceArgs {
                        nprime: *np,
                        n: *n,
                        module: m.clone(),
                        coeff: k.clone(),
                    })?;
                    instance_two_extensions(&inst)?
                }
                _ => {
                    return Err(InputError::Literal(
                        "butterfly needs --file or all of --nprime --n --module --coeff".into(),
                    ))
                }
            };
            butterflies(*op, &ts)
        }
    }
}

fn deform(args: &InstanceArgs, u: &str) -> InputResult<Outcome> {
    let inst = instance(args)?;
    let problem = DeformationProblem::new(inst.pair, &inst.m, &inst.k)?;
    let hom = problem.hom();
    let u = ModuleMap::from_rows(hom.source.clone(), hom.target.clone(), &parse_matrix(u)?)?;
    let vanishes = problem.obstruction_vanishes(&u)?;
    let solved = problem.solve(&u)?;
    let mut body = json!({
        "label": inst.label,
        "u": u.rows(),
        "obstruction_vanishes": vanishes,
        "deforms": solved.is_some(),
    });
    if let Some(d) = solved {
        body["middle"] = json!(d.xi.e().invariant_factors());
        let t = problem.cup_omega(&u)?;
        let beta = match sqz_core::butterfly::splitting_butterfly(&t)? {
            Some(b) => problem
                .extension_from_splitting(&u, &b)
                .map(|xi| json!({"middle": xi.e().invariant_factors(), "theta_matches": true}))
                .unwrap_or_else(|e| json!({"error": e.to_string()})),
            None => json!({"error": "no splitting butterfly"}),
        };
        body["beta"] = beta;
    }
    let passed = body.get("beta").is_none_or(|b| b.get("error").is_none());
    Ok(Outcome { body, passed })
}

fn cech(path: &Path, degree: usize) -> InputResult<Outcome> {
    let r = InstanceFile::load(path)?.resolve()?;
    let mut results = Vec::new();
    let mut passed = true;
    for (i, cover) in r.covers.iter().enumerate() {
        let v = cover_verdict(cover, degree);
        passed &= !v.is_fail();
        let mut entry = json!({"cover": i, "cech": to_value(&v)});
        let epis: Vec<&ModuleMap> = cover.family().iter().filter(|f| f.is_surjective()).collect();
        if cover.family().len() == 1 && epis.len() == 1 {
            let s = shearing_verdict(epis[0], degree)?;
            passed &= !s.is_fail();
            entry["shearing"] = to_value(&s);
        }
        results.push(entry);
    }
    Ok(Outcome {
        body: json!({"covers": results}),
        passed,
    })
}

fn instance_two_extensions(inst: &Instance) -> InputResult<Vec<(String, TwoExtension)>> {
    let problem = DeformationProblem::new(inst.pair, &inst.m, &inst.k)?;
    let mut out = vec![("omega".to_string(), problem.omega().two_extension.clone())];
    for (i, u) in problem.hom().generator_maps().into_iter().enumerate() {
        out.push((format!("u{i}"), problem.cup_omega(&u)?));
    }
    Ok(out)
}

fn butterflies(op: ButterflyOp, ts: &[(String, TwoExtension)]) -> InputResult<Outcome> {
    let mut results = Vec::new();
    let mut passed = true;
    let mut record = |name: String, ok: bool| {
        passed &= ok;
        results.push(json!({"check": name, "status": if ok { "PASS" } else { "FAIL" }}));
    };
    for (name, t) in ts {
        let (canon, cmp) = comparison_map(t)?;
        let b = induced_butterfly(&cmp)?;
        match op {
            ButterflyOp::Validate => {
                let same = class_of_two_extension(&canon)? == class_of_two_extension(t)?;
                record(format!("{name}: induced butterfly valid, class kept"), b.is_valid()? && same);
            }
            ButterflyOp::Invert => {
                let inv = invert(&b)?;
                let back = two_isomorphism(&invert(&inv)?, &b)?.is_some();
                record(format!("{name}: inverse valid, double inverse is b"), inv.is_valid()? && back);
            }
            ButterflyOp::Compose => {
                let round = compose(&b, &invert(&b)?)?;
                let id = two_isomorphism(&round, &identity_butterfly(&canon)?)?.is_some();
                record(format!("{name}: b then b^-1 is the identity"), id);
            }
        }
    }
    if matches!(op, ButterflyOp::Validate | ButterflyOp::Compose) {
        for (i, (ni, ti)) in ts.iter().enumerate() {
            for (nj, tj) in &ts[i + 1..] {
                if ti.k() != tj.k() || ti.m() != tj.m() {
                    continue;
                }
                let same = class_of_two_extension(ti)? == class_of_two_extension(tj)?;
                let Some(b) = butterfly_between(ti, tj)? else {
                    record(format!("{ni} ~ {nj}: no butterfly iff classes differ"), !same);
                    continue;
                };
                let ok = match op {
                    ButterflyOp::Validate => b.is_valid()? && same,
                    _ => {
                        let back = butterfly_between(tj, ti)?.ok_or_else(|| {
                            InputError::Algebra(sqz_core::Error::Internal("no reverse butterfly".into()))
                        })?;
                        let round = compose(&b, &back)?;
                        round.is_valid()? && round.source() == ti && round.target() == ti
                    }
                };
                record(format!("{ni} ~ {nj}"), ok);
            }
        }
    }
    Ok(Outcome {
        body: json!({"results": results}),
        passed,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(InputError::Algebra(e)) if matches!(e, sqz_core::Error::Internal(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&outcome.body).expect("serializable");
    match &cli.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

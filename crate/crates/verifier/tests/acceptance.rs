//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

mod oracle;

use std::process::ExitCode;
use std::time::Instant;

use sqz_core::butterfly::{class_of_two_extension, yoneda_splice};
use sqz_core::ext::{ext_group, Extension};
use sqz_core::faults::Faults;
use sqz_core::linalg::Modulus;
use sqz_core::squarezero::{solve_deformation, DeformationProblem, SquareZeroPair};
use sqz_core::{FPModule, ModuleMap};
use sqz_verifier::instances::DEFAULT_PAIRS;
use sqz_verifier::report::{Report, SequenceReport};
use sqz_verifier::suites::{baer_suite, Options};
use sqz_verifier::{run_suite, RunConfig};

use oracle::{ext1_factor_sets, z2_deformation_thetas, Group};

type Outcome = Result<String, String>;

fn zn(n: u64) -> Modulus {
    Modulus::new(n).unwrap()
}

fn checks_pass(report: &Report, names: &[&str]) -> Result<usize, String> {
    let mut seen = 0;
    for inst in &report.instances {
        for name in names {
            let c = inst
                .check(name)
                .ok_or_else(|| format!("{}: no `{name}` check", inst.label))?;
            if !c.verdict.is_pass() {
                return Err(format!("{}: {name} is {:?}", inst.label, c.verdict));
            }
        }
        seen += 1;
    }
    Ok(seen)
}

fn instance<'a>(report: &'a Report, label: &str) -> Result<&'a SequenceReport, String> {
    report
        .instances
        .iter()
        .find(|i| i.label == label)
        .ok_or_else(|| format!("instance {label} missing"))
}

fn orders(rep: &SequenceReport) -> Vec<u128> {
    rep.groups.iter().map(|g| g.order).collect()
}

fn criterion_1(report: &Report) -> Outcome {
    let n = checks_pass(
        report,
        &["exact:injectivity", "exact:node-two", "exact:node-three", "exact:rightward"],
    )?;
    if n < 60 {
        return Err(format!("only {n} instances"));
    }
    let a = instance(report, "(4,2) M=Z/2 K=Z/2")?;
    if orders(a) != [1, 2, 2, 1] {
        return Err(format!("(4,2) groups {:?}", orders(a)));
    }
    let b = instance(report, "(8,4) M=Z/2 K=Z/2")?;
    if orders(b) != [2, 2, 2, 2] {
        return Err(format!("(8,4) groups {:?}", orders(b)));
    }
    Ok(format!("{n} instances exact at every node"))
}

fn criterion_2(report: &Report) -> Outcome {
    let n = checks_pass(report, &["obstruction"])?;
    let maps: u64 = report
        .instances
        .iter()
        .filter_map(|i| i.check("obstruction"))
        .map(|c| c.stats.get("maps").copied().unwrap_or(0))
        .sum();
    // Independent oracle: every Z/8-extension of Z/2 by Z/2 of order 4 has
    // θ = 0, so no u ≠ 0 deforms; over Z/4 both values occur.
    let pairs = [(8, 4, [0u64].as_slice()), (4, 2, [0u64, 1].as_slice())];
    for (np, nn, expected) in pairs {
        let thetas = z2_deformation_thetas(np, nn);
        if thetas.iter().copied().collect::<Vec<_>>() != expected {
            return Err(format!("oracle for ({np},{nn}) gives θ ∈ {thetas:?}"));
        }
        let pair = SquareZeroPair::new(np, nn).map_err(|e| e.to_string())?;
        let z2 = FPModule::cyclic(pair.n(), 2).map_err(|e| e.to_string())?;
        let problem = DeformationProblem::new(pair, &z2, &z2).map_err(|e| e.to_string())?;
        let hom = problem.hom();
        for u in hom.module.elements(4).map_err(|e| e.to_string())? {
            let map = hom.to_map(&u);
            let value = map.rows()[0][0];
            let solved = solve_deformation(&pair, &z2, &z2, &map)
                .map_err(|e| e.to_string())?
                .is_some();
            if solved != thetas.contains(&value) {
                return Err(format!("({np},{nn}) u = {value}: solver {solved}, oracle disagrees"));
            }
        }
    }
    Ok(format!("{n} instances, {maps} maps u; (8,4) and (4,2) match the Z/N' oracle"))
}

fn criterion_3(report: &Report) -> Outcome {
    let n = checks_pass(report, &["beta"])?;
    let solvable: u64 = report
        .instances
        .iter()
        .filter_map(|i| i.check("beta"))
        .map(|c| c.stats.get("solvable").copied().unwrap_or(0))
        .sum();
    if solvable == 0 {
        return Err("no solvable u".into());
    }
    Ok(format!("θ(β(u)) = u for {solvable} solvable u across {n} instances"))
}

fn criterion_4() -> Outcome {
    let mut compared = 0;
    let shapes: [(u64, &[&[u64]]); 2] = [(4, &[&[2], &[4], &[2, 2]]), (9, &[&[3]])];
    for (n, mods) in shapes {
        for m in mods {
            for k in mods {
                let oracle = ext1_factor_sets(n, &Group::new(m), &Group::new(k));
                let fm = FPModule::from_orders(zn(n), m).unwrap();
                let fk = FPModule::from_orders(zn(n), k).unwrap();
                let ours = ext_group(1, &fm, &fk).map_err(|e| e.to_string())?.order();
                if ours != oracle {
                    return Err(format!("Z/{n} M={m:?} K={k:?}: {ours} vs factor sets {oracle}"));
                }
                compared += 1;
            }
        }
    }
    let z2 = FPModule::cyclic(zn(4), 2).unwrap();
    let z4 = FPModule::free(zn(4), 1);
    let g = ext_group(2, &z2, &z2).map_err(|e| e.to_string())?;
    if g.order() != 2 {
        return Err(format!("|Ext²_Z/4(Z/2,Z/2)| = {}", g.order()));
    }
    let i = ModuleMap::from_rows(z2.clone(), z4.clone(), &[vec![2]]).unwrap();
    let p = ModuleMap::from_rows(z4, z2, &[vec![1]]).unwrap();
    let x = Extension::new(i, p).map_err(|e| e.to_string())?;
    let splice = yoneda_splice(&x, &x).map_err(|e| e.to_string())?;
    if class_of_two_extension(&splice).map_err(|e| e.to_string())?.is_zero() {
        return Err("splice of the nonsplit extensions is zero".into());
    }
    Ok(format!("{compared} (M,K) pairs match factor sets; Ext² = Z/2 hit by the splice"))
}

fn criterion_5() -> Outcome {
    let suite = baer_suite(&[4, 8, 9, 6], 100, 20_240_601);
    for c in &suite.checks {
        if !c.verdict.is_pass() {
            return Err(format!("{}: {:?}", c.name, c.verdict));
        }
        if c.stats.get("samples") != Some(&100) {
            return Err(format!("{}: {:?} samples", c.name, c.stats.get("samples")));
        }
    }
    Ok("100 seeded pairs: Baer sum additive, pullback and pushout natural".into())
}

fn criterion_6(report: &Report) -> Outcome {
    let n = checks_pass(report, &["butterfly"])?;
    Ok(format!("induced, compose/invert and connectivity checks pass on {n} instances"))
}

fn criterion_7(report: &Report) -> Outcome {
    let mut count = 0;
    for name in ["cech", "fiber-products"] {
        let suite = report
            .suites
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| format!("suite {name} missing"))?;
        for c in &suite.checks {
            if !c.verdict.is_pass() {
                return Err(format!("{}: {:?}", c.name, c.verdict));
            }
            count += 1;
        }
    }
    Ok(format!("{count} Čech, shearing and fiber-product checks"))
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    for (name, faults) in [
        (
            "induced projection sign",
            Faults {
                induced_projection_sign: true,
                ..Faults::NONE
            },
        ),
        (
            "cup_omega sign",
            Faults {
                cup_omega_sign: true,
                ..Faults::NONE
            },
        ),
    ] {
        let cfg = RunConfig {
            pairs: DEFAULT_PAIRS.to_vec(),
            options: Options {
                faults,
                ..Options::default()
            },
            baer_samples: 0,
        };
        let report = run_suite(&cfg).map_err(|e| e.to_string())?;
        let failures = report.failures();
        if failures.is_empty() {
            return Err(format!("{name} flip went unnoticed"));
        }
        lines.push(format!("{name}: {} failures", failures.len()));
    }
    Ok(lines.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let report = run_suite(&RunConfig::default());
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL setup: {e}");
            return ExitCode::FAILURE;
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 Illusie exactness", criterion_1(&report)),
        ("2 obstruction consistency", criterion_2(&report)),
        ("3 beta construction", criterion_3(&report)),
        ("4 Ext oracle agreement", criterion_4()),
        ("5 Baer coherence", criterion_5()),
        ("6 butterfly algebra", criterion_6(&report)),
        ("7 Čech suite", criterion_7(&report)),
        ("8 mutation sensitivity", criterion_8()),
    ];
    let mut ok = true;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                ok = false;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

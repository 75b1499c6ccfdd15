//! Verification of the deformation sequence and its supporting algebra over
//! a family of square-zero pairs `Z/N' → Z/N`.

pub mod file;
pub mod illusie;
pub mod instances;
pub mod report;
pub mod suites;

use std::time::Instant;

use sqz_core::squarezero::DeformationProblem;
use sqz_core::Result;

use crate::illusie::{exactness_checks, group_records, illusie_sequence, map_records, rightward_check};
use crate::instances::{enumerate_instances, Instance, DEFAULT_PAIRS};
use crate::report::{Check, Report, SequenceReport, Verdict};
use crate::suites::{baer_suite, butterfly_check, cech_suite, fiber_product_suite, obstruction_checks, Options};

/// What a full run covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub pairs: Vec<(u64, u64)>,
    pub options: Options,
    /// Random extension pairs for the Baer suite.
    pub baer_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pairs: DEFAULT_PAIRS.to_vec(),
            options: Options::default(),
            baer_samples: 100,
        }
    }
}

impl RunConfig {
    fn to_json(&self) -> serde_json::Value {
        let f = self.options.faults;
        serde_json::json!({
            "pairs": self.pairs,
            "max_order": self.options.max_order as u64,
            "seed": self.options.seed,
            "baer_samples": self.baer_samples,
            "faults": {
                "induced_projection_sign": f.induced_projection_sign,
                "cup_omega_sign": f.cup_omega_sign,
            },
        })
    }
}

/// The four-term sequence for one instance with its exactness verdicts,
/// the rightward check, obstruction consistency, `β`, and the butterfly
/// checks.
pub fn build_illusie_sequence(inst: &Instance, opts: &Options) -> SequenceReport {
    let mut rep = SequenceReport {
        label: inst.label.clone(),
        groups: Vec::new(),
        maps: Vec::new(),
        checks: Vec::new(),
    };
    for (name, x) in [("M", &inst.m), ("K", &inst.k)] {
        if x.order() > opts.max_order {
            rep.checks.push(Check::new(
                "instance",
                Verdict::skip(format!("|{name}| = {} exceeds {}", x.order(), opts.max_order)),
            ));
            return rep;
        }
    }
    let problem = match DeformationProblem::with_faults(inst.pair, &inst.m, &inst.k, opts.faults) {
        Ok(p) => p,
        Err(e) => {
            rep.checks.push(Check::new("setup", Verdict::fail("setup", e.to_string())));
            return rep;
        }
    };
    match sequence_checks(&problem) {
        Ok((groups, maps, checks)) => {
            rep.groups = groups;
            rep.maps = maps;
            rep.checks = checks;
        }
        Err(e) => rep.checks.push(Check::new("sequence", Verdict::fail("sequence", e.to_string()))),
    }
    rep.checks.extend(obstruction_checks(&problem, opts));
    rep.checks.push(butterfly_check(&problem, opts));
    rep
}

type SequenceParts = (Vec<report::GroupRecord>, Vec<report::MapRecord>, Vec<Check>);

fn sequence_checks(problem: &DeformationProblem) -> Result<SequenceParts> {
    let seq = illusie_sequence(problem)?;
    let mut checks = exactness_checks(&seq)?;
    checks.push(rightward_check(problem)?);
    Ok((group_records(&seq), map_records(&seq), checks))
}

/// Every instance and every suite, assembled into one report.
pub fn run_suite(cfg: &RunConfig) -> Result<Report> {
    let instances = enumerate_instances(&cfg.pairs)?;
    let mut report = Report {
        config: cfg.to_json(),
        ..Report::default()
    };
    for inst in &instances {
        let start = Instant::now();
        report.instances.push(build_illusie_sequence(inst, &cfg.options));
        report.timing.insert(inst.label.clone(), start.elapsed().as_secs_f64());
    }
    let pairs: Vec<_> = instances.iter().map(|i| i.pair).collect();
    let mut moduli: Vec<u64> = cfg.pairs.iter().map(|&(_, n)| n).collect();
    moduli.sort_unstable();
    moduli.dedup();
    let suites: [(&str, Box<dyn Fn() -> report::SuiteReport>); 3] = [
        ("cech", Box::new(|| cech_suite(&pairs))),
        ("fiber-products", Box::new(|| fiber_product_suite(&moduli, cfg.options.seed))),
        ("baer", Box::new(|| baer_suite(&moduli, cfg.baer_samples, cfg.options.seed))),
    ];
    for (name, run) in suites {
        let start = Instant::now();
        report.suites.push(run());
        report.timing.insert(format!("suite {name}"), start.elapsed().as_secs_f64());
    }
    report.summarize();
    Ok(report)
}

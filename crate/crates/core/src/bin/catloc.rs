use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catloc::connectivity::{connectivity, Pi1Budget, Pi1Verdict};
use catloc::dsl::{self, Resolved};
use catloc::hypotheses::{
    check_c1, check_c2, check_p1, check_p2, check_p3, check_referee, check_riou, check_t0,
    check_t1v, check_tu0, implication_audit, CheckBudget, HypothesisReport, Status,
};
use catloc::localisation::certificate::{build_equivalence, CertBudget, CertStatus};
use catloc::localisation::{
    equivalence_oracle, localize, EquivalenceVerdict, LocBudget, Localised,
};
use catloc::report::{JsonReport, Outcome};
use catloc::{Error, Result};

/// Workbench for localising finite categories.
#[derive(Parser)]
#[command(name = "catloc", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Seed for all randomised choices.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Coset-enumeration ceiling for fundamental-group checks.
    #[arg(long, global = true)]
    pi1_budget: Option<usize>,
    /// Rule ceiling for rewrite-system completion.
    #[arg(long, global = true)]
    kb_budget: Option<usize>,
    /// Largest poset shape for shape-quantified checks.
    #[arg(long, global = true)]
    poset_bound: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every declaration in a document.
    Validate { input: PathBuf },
    /// Build the comma category of two functors into a common target.
    Comma {
        input: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// π₀ and per-component π₁ of a category's nerve.
    Connectivity {
        input: PathBuf,
        #[arg(long)]
        category: Option<String>,
    },
    /// Run one hypothesis set against a setup.
    Check {
        /// One of: t0, c2, c1, riou, p3, referee, p1, p2, tu0, t1v.
        hypothesis: String,
        input: PathBuf,
        #[arg(long)]
        setup: Option<String>,
        /// Object of C (required by c1).
        #[arg(long)]
        object: Option<String>,
        /// Named slice-object selector (p1).
        #[arg(long)]
        kselector: Option<String>,
        /// Named weak replacement (required by t1v).
        #[arg(long)]
        weak: Option<String>,
    },
    /// Compute a finite model of the localisation at a declared class.
    Localize {
        input: PathBuf,
        #[arg(long)]
        class: String,
    },
    /// Build the equivalence certificate and cross-check with the oracle.
    Equivalence {
        input: PathBuf,
        #[arg(long)]
        setup: Option<String>,
    },
    /// Extend the quotient to the localised target along the certificate
    /// and verify the comparison is independent of resolutions and natural.
    Kan {
        input: PathBuf,
        #[arg(long)]
        setup: Option<String>,
    },
    /// Check the equivalence survives the coproduct completion at a
    /// truncation.
    Envelope {
        input: PathBuf,
        #[arg(long)]
        setup: Option<String>,
        #[arg(long, default_value_t = 3)]
        envelope_k: usize,
    },
    /// Generate random setups and audit the implication structure.
    FuzzAudit {
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// One of: poset, dag-quotient, monoid-glue.
        #[arg(long, default_value = "poset")]
        strategy: String,
    },
}

fn check_budget(cli: &Cli) -> CheckBudget {
    let mut b = CheckBudget::default();
    if let Some(n) = cli.pi1_budget {
        b.pi1.max_cosets = n;
    }
    if let Some(n) = cli.poset_bound {
        b.poset_bound = n;
    }
    b
}

fn loc_budget(cli: &Cli) -> LocBudget {
    let mut b = LocBudget::default();
    if let Some(n) = cli.kb_budget {
        b.rewrite.max_rules = n;
    }
    b
}

fn cert_budget(cli: &Cli) -> CertBudget {
    CertBudget { check: check_budget(cli), loc: loc_budget(cli), seed: cli.seed as usize }
}

fn budget_map(cli: &Cli, extra: &[(&str, u64)]) -> BTreeMap<String, u64> {
    let check = check_budget(cli);
    let loc = loc_budget(cli);
    let mut m = BTreeMap::from([
        ("pi1_max_cosets".to_string(), check.pi1.max_cosets as u64),
        ("kb_max_rules".to_string(), loc.rewrite.max_rules as u64),
        ("poset_bound".to_string(), check.poset_bound as u64),
    ]);
    for (k, v) in extra {
        m.insert(k.to_string(), *v);
    }
    m
}

fn load(path: &PathBuf) -> Result<(String, Resolved)> {
    let text = std::fs::read_to_string(path)?;
    let doc = dsl::parse(&text)?;
    let resolved = dsl::resolve(&doc)?;
    Ok((text, resolved))
}

fn the_setup<'a>(
    r: &'a Resolved,
    name: &Option<String>,
) -> Result<(&'a String, &'a catloc::setup::LocalisationSetup)> {
    match name {
        Some(n) => r
            .setups
            .get_key_value(n)
            .ok_or_else(|| Error::UnresolvedRef { kind: "setup", name: n.clone() }),
        None => {
            if r.setups.len() == 1 {
                Ok(r.setups.iter().next().expect("nonempty"))
            } else {
                Err(Error::Invalid(format!(
                    "document declares {} setups; pick one with --setup",
                    r.setups.len()
                )))
            }
        }
    }
}

fn push_hypotheses(report: &mut JsonReport, reports: &[HypothesisReport]) {
    for h in reports {
        match &h.status {
            Status::Holds => report.push(&h.id, "holds", Outcome::Pass),
            Status::Fails { witness } => {
                report.push_witness(&h.id, "fails", Outcome::Fail, witness)
            }
            Status::Unknown { reason } => {
                report.push_witness(&h.id, "unknown", Outcome::Inconclusive, reason)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<JsonReport> {
    match &cli.command {
        Cmd::Validate { input } => {
            let text = std::fs::read_to_string(input)?;
            let doc = dsl::parse(&text)?;
            let mut report =
                JsonReport::new("validate", &text, cli.seed, budget_map(cli, &[]));
            match dsl::resolve(&doc) {
                Ok(resolved) => {
                    for (name, c) in &resolved.categories {
                        report.push_witness(
                            format!("category:{name}"),
                            "valid",
                            Outcome::Pass,
                            format!(
                                "objects={} morphisms={}",
                                c.object_count(),
                                c.morphism_count()
                            ),
                        );
                    }
                    for name in resolved.classes.keys() {
                        report.push(format!("class:{name}"), "valid", Outcome::Pass);
                    }
                    for (name, f) in &resolved.functors {
                        let note = if f.is_fully_faithful() {
                            "valid, fully faithful"
                        } else {
                            "valid"
                        };
                        report.push(format!("functor:{name}"), note, Outcome::Pass);
                    }
                    for name in resolved.setups.keys() {
                        report.push(format!("setup:{name}"), "valid", Outcome::Pass);
                    }
                    for name in resolved.posets.keys() {
                        report.push(format!("poset:{name}"), "valid", Outcome::Pass);
                    }
                }
                Err(e) => {
                    report.push_witness("document", "invalid", Outcome::Fail, e.to_string())
                }
            }
            Ok(report)
        }
        Cmd::Comma { input, left, right } => {
            let (text, r) = load(input)?;
            let mut report = JsonReport::new("comma", &text, cli.seed, budget_map(cli, &[]));
            let f = r
                .functors
                .get(left)
                .ok_or_else(|| Error::UnresolvedRef { kind: "functor", name: left.clone() })?;
            let g = r
                .functors
                .get(right)
                .ok_or_else(|| Error::UnresolvedRef { kind: "functor", name: right.clone() })?;
            let cc = catloc::comma::comma(f, g)?;
            report.push_witness(
                format!("comma:({left},{right})"),
                "built",
                Outcome::Pass,
                format!(
                    "objects={} morphisms={} one_fibred={}",
                    cc.carrier.object_count(),
                    cc.carrier.morphism_count(),
                    cc.one_fibred.len()
                ),
            );
            Ok(report)
        }
        Cmd::Connectivity { input, category } => {
            let (text, r) = load(input)?;
            let mut report =
                JsonReport::new("connectivity", &text, cli.seed, budget_map(cli, &[]));
            let (name, c) = match category {
                Some(n) => r
                    .categories
                    .get_key_value(n)
                    .ok_or_else(|| Error::UnresolvedRef { kind: "category", name: n.clone() })?,
                None if r.categories.len() == 1 => {
                    r.categories.iter().next().expect("nonempty")
                }
                None => {
                    return Err(Error::Invalid(format!(
                        "document declares {} categories; pick one with --category",
                        r.categories.len()
                    )))
                }
            };
            let mut pi1 = Pi1Budget::default();
            if let Some(n) = cli.pi1_budget {
                pi1.max_cosets = n;
            }
            let conn = connectivity(c, &pi1);
            report.push_witness(
                format!("{name}.pi0"),
                "computed",
                Outcome::Pass,
                format!("components={}", conn.components.len()),
            );
            for (i, v) in conn.pi1.iter().enumerate() {
                match v {
                    Pi1Verdict::Trivial(cert) => report.push_witness(
                        format!("{name}.pi1[{i}]"),
                        "trivial",
                        Outcome::Pass,
                        format!("{cert:?}"),
                    ),
                    Pi1Verdict::Nontrivial(cert) => report.push_witness(
                        format!("{name}.pi1[{i}]"),
                        "nontrivial",
                        Outcome::Pass,
                        format!("{cert:?}"),
                    ),
                    Pi1Verdict::Unknown { reason } => report.push_witness(
                        format!("{name}.pi1[{i}]"),
                        "unknown",
                        Outcome::Inconclusive,
                        reason,
                    ),
                }
            }
            report.push(
                format!("{name}.filtering"),
                if conn.filtering.cofiltering { "cofiltering" } else { "not cofiltering" },
                Outcome::Pass,
            );
            if let Some(cond) = &conn.infinity {
                report.push_witness(
                    format!("{name}.infinity"),
                    "sufficient condition applies",
                    Outcome::Pass,
                    cond,
                );
            }
            Ok(report)
        }
        Cmd::Check { hypothesis, input, setup, object, kselector, weak } => {
            let (text, r) = load(input)?;
            let mut report = JsonReport::new(
                &format!("check {hypothesis}"),
                &text,
                cli.seed,
                budget_map(cli, &[]),
            );
            let (setup_name, s) = the_setup(&r, setup)?;
            let budget = check_budget(cli);
            let reports = match hypothesis.as_str() {
                "t0" => check_t0(s, &budget)?,
                "c2" => check_c2(s, &budget)?,
                "riou" => check_riou(s)?,
                "p3" => check_p3(s, &budget)?,
                "referee" => check_referee(s, &budget)?,
                "p2" => check_p2(s, &budget)?,
                "tu0" => check_tu0(s, &budget)?,
                "p1" => {
                    let k = match kselector {
                        Some(n) => {
                            let (owner, k) =
                                r.kselectors.get(n).ok_or_else(|| Error::UnresolvedRef {
                                    kind: "kselector",
                                    name: n.clone(),
                                })?;
                            if owner != setup_name {
                                return Err(Error::Invalid(format!(
                                    "kselector `{n}` is declared for setup `{owner}`"
                                )));
                            }
                            Some(k)
                        }
                        None => None,
                    };
                    check_p1(s, k)?
                }
                "t1v" => {
                    let n = weak.as_ref().ok_or_else(|| {
                        Error::Invalid("t1v needs a weak replacement (--weak)".into())
                    })?;
                    let (owner, w) = r.weaks.get(n).ok_or_else(|| Error::UnresolvedRef {
                        kind: "replacement",
                        name: n.clone(),
                    })?;
                    if owner != setup_name {
                        return Err(Error::Invalid(format!(
                            "replacement `{n}` is declared for setup `{owner}`"
                        )));
                    }
                    check_t1v(s, w, &budget)?
                }
                "c1" => {
                    let o = object
                        .as_ref()
                        .ok_or_else(|| Error::Invalid("c1 needs an object (--object)".into()))?;
                    let c = s.c.object_idx(o).ok_or_else(|| Error::UnresolvedRef {
                        kind: "object",
                        name: o.clone(),
                    })?;
                    check_c1(s, c, &budget)?
                }
                other => {
                    return Err(Error::Invalid(format!("unknown hypothesis set `{other}`")))
                }
            };
            push_hypotheses(&mut report, &reports);
            Ok(report)
        }
        Cmd::Localize { input, class } => {
            let (text, r) = load(input)?;
            let mut report = JsonReport::new("localize", &text, cli.seed, budget_map(cli, &[]));
            let cls = r
                .classes
                .get(class)
                .ok_or_else(|| Error::UnresolvedRef { kind: "class", name: class.clone() })?;
            match localize(&cls.carrier, cls, &loc_budget(cli))? {
                Localised::Model(m) => report.push_witness(
                    format!("localize:{class}"),
                    "decided",
                    Outcome::Pass,
                    format!(
                        "engine={:?} objects={} morphisms={}",
                        m.engine,
                        m.category.object_count(),
                        m.category.morphism_count()
                    ),
                ),
                Localised::Undecided { reason } => report.push_witness(
                    format!("localize:{class}"),
                    "undecided",
                    Outcome::Inconclusive,
                    reason,
                ),
            }
            Ok(report)
        }
        Cmd::Equivalence { input, setup } => {
            let (text, r) = load(input)?;
            let mut report =
                JsonReport::new("equivalence", &text, cli.seed, budget_map(cli, &[]));
            let (_, s) = the_setup(&r, setup)?;
            match build_equivalence(s, &cert_budget(cli)) {
                Ok(cert) => match &cert.status {
                    CertStatus::Certified => {
                        report.push("certificate", "certified", Outcome::Pass);
                        let checks = cert
                            .checks
                            .iter()
                            .map(|(n, ok)| format!("{n}={ok}"))
                            .collect::<Vec<_>>()
                            .join(" ");
                        report.attach_certificate(format!(
                            "sections={} {}",
                            cert.sections.join(","),
                            checks
                        ));
                    }
                    CertStatus::Unverified { reason } => report.push_witness(
                        "certificate",
                        "unverified",
                        Outcome::Inconclusive,
                        reason,
                    ),
                },
                Err(e) if e.is_budget() => {
                    report.push_witness(
                        "certificate",
                        "unverified",
                        Outcome::Inconclusive,
                        e.to_string(),
                    );
                }
                Err(e) => report.push_witness(
                    "certificate",
                    "unverified",
                    Outcome::Inconclusive,
                    e.to_string(),
                ),
            }
            match equivalence_oracle(s, &loc_budget(cli))? {
                EquivalenceVerdict::Equivalence => {
                    report.push("oracle", "equivalence", Outcome::Pass)
                }
                EquivalenceVerdict::NotEquivalence { witness } => {
                    report.push_witness("oracle", "not equivalence", Outcome::Fail, witness)
                }
                EquivalenceVerdict::Undecided { reason } => {
                    report.push_witness("oracle", "undecided", Outcome::Inconclusive, reason)
                }
            }
            Ok(report)
        }
        Cmd::Kan { input, setup } => {
            let (text, r) = load(input)?;
            let mut report = JsonReport::new("kan", &text, cli.seed, budget_map(cli, &[]));
            let (_, s) = the_setup(&r, setup)?;
            let cert = build_equivalence(s, &cert_budget(cli))?;
            if cert.status != CertStatus::Certified {
                report.push_witness(
                    "kan",
                    "unverified",
                    Outcome::Inconclusive,
                    "base equivalence is not certified",
                );
                return Ok(report);
            }
            // canonical self-extension: f is the quotient of D, g the
            // induced functor between the models
            let g = catloc::localisation::induced_functor(s, &cert.cm, &cert.dm)?;
            let res = catloc::localisation::kan::kan_extend(s, &cert, &cert.dm.p, &g)?;
            report.push(
                "kan.independent",
                if res.independent { "holds" } else { "fails" },
                if res.independent { Outcome::Pass } else { Outcome::Fail },
            );
            report.push(
                "kan.natural",
                if res.natural { "holds" } else { "fails" },
                if res.natural { Outcome::Pass } else { Outcome::Fail },
            );
            Ok(report)
        }
        Cmd::Envelope { input, setup, envelope_k } => {
            let (text, r) = load(input)?;
            let mut report = JsonReport::new(
                "envelope",
                &text,
                cli.seed,
                budget_map(cli, &[("envelope_k", *envelope_k as u64)]),
            );
            let (_, s) = the_setup(&r, setup)?;
            let lift = catloc::envelope::check_envelope_lift(s, *envelope_k, &cert_budget(cli))?;
            report.push(
                "envelope.coproducts",
                if lift.coproducts { "descend" } else { "fail" },
                if lift.coproducts { Outcome::Pass } else { Outcome::Fail },
            );
            match &lift.verdict {
                EquivalenceVerdict::Equivalence => {
                    report.push("envelope.oracle", "equivalence", Outcome::Pass)
                }
                EquivalenceVerdict::NotEquivalence { witness } => report.push_witness(
                    "envelope.oracle",
                    "not equivalence",
                    Outcome::Fail,
                    witness,
                ),
                EquivalenceVerdict::Undecided { reason } => report.push_witness(
                    "envelope.oracle",
                    "undecided",
                    Outcome::Inconclusive,
                    reason,
                ),
            }
            match &lift.status {
                CertStatus::Certified => report.push_witness(
                    "envelope.status",
                    "certified",
                    Outcome::Pass,
                    format!("truncation k={}", lift.k),
                ),
                CertStatus::Unverified { reason } => report.push_witness(
                    "envelope.status",
                    "unverified",
                    Outcome::Inconclusive,
                    reason,
                ),
            }
            Ok(report)
        }
        Cmd::FuzzAudit { count, strategy } => {
            let strat = catloc::fuzz::Strategy::parse(strategy)
                .ok_or_else(|| Error::Invalid(format!("unknown strategy `{strategy}`")))?;
            let cfg = catloc::fuzz::GenConfig {
                seed: cli.seed,
                strategy: strat,
                ..catloc::fuzz::GenConfig::default()
            };
            let mut rng = catloc::fuzz::Rng::new(cli.seed);
            let setups: Vec<_> =
                (0..*count).map(|_| catloc::fuzz::gen_setup(&cfg, &mut rng)).collect();
            let mut report = JsonReport::new(
                "fuzz-audit",
                &format!("strategy={strategy}"),
                cli.seed,
                budget_map(cli, &[("count", *count as u64)]),
            );
            let audit = implication_audit(&setups, &check_budget(cli))?;
            if audit.riou_violations.is_empty() {
                report.push_witness(
                    "audit.riou",
                    "no violations",
                    Outcome::Pass,
                    format!("antecedent held on {} of {}", audit.riou_antecedent, audit.total),
                );
            } else {
                let case = &audit.riou_violations[0];
                let sketch = catloc::fuzz::SetupSketch::from_setup(&setups[case.index]);
                report.push_witness(
                    "audit.riou",
                    "violated",
                    Outcome::Fail,
                    format!("case {}: {}", case.index, case.detail),
                );
                report.attach_certificate(dsl::print(&dsl::document_of_setup(
                    &format!("fuzz{}", case.index),
                    &sketch.build()?,
                )));
            }
            if audit.c2_violations.is_empty() {
                report.push_witness(
                    "audit.c2",
                    "no violations",
                    Outcome::Pass,
                    format!("antecedent held on {} of {}", audit.c2_antecedent, audit.total),
                );
            } else {
                let case = &audit.c2_violations[0];
                let sketch = catloc::fuzz::SetupSketch::from_setup(&setups[case.index]);
                report.push_witness(
                    "audit.c2",
                    "violated",
                    Outcome::Fail,
                    format!("case {}: {}", case.index, case.detail),
                );
                report.attach_certificate(dsl::print(&dsl::document_of_setup(
                    &format!("fuzz{}", case.index),
                    &sketch.build()?,
                )));
            }
            report.push_witness(
                "audit.unknown",
                "counted",
                Outcome::Pass,
                format!("{} setups excluded by undecided verdicts", audit.unknown_tainted),
            );
            report.push_witness(
                "audit.strict",
                "counted",
                Outcome::Pass,
                format!("{} strictness examples", audit.strictness_examples.len()),
            );
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(mut report) => {
            let code = report.finalize();
            print!("{}", report.render());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_budget() { 2 } else { 3 };
            ExitCode::from(code)
        }
    }
}

//! End-to-end acceptance battery. Each numbered check prints one PASS/FAIL
//! line; run with `cargo test --test acceptance`.

use std::process::Command;
use std::sync::Arc;

use catloc::category::{FinCategory, MorphClass};
use catloc::connectivity::edge_path::edge_path_verdict;
use catloc::connectivity::{connectivity, pi0, pi1_presentation, decide_triviality, NontrivialityCertificate, Pi1Budget, Pi1Verdict};
use catloc::comma::slice_i;
use catloc::fixtures;
use catloc::fuzz::{gen_category, gen_class, gen_setup, GenConfig, Rng, Strategy};
use catloc::hypotheses::{check_referee, find, implication_audit, CheckBudget};
use catloc::localisation::certificate::{build_equivalence, CertBudget, CertStatus};
use catloc::localisation::{
    equivalence_oracle, fraction_model, induced_functor, ore_check, rewrite_model,
    EquivalenceVerdict, LocBudget,
};
use catloc::setup::LocalisationSetup;

// the criteria are individually heavy; run them one at a time
static SERIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn line(n: usize, ok: bool, detail: &str) {
    println!("acceptance {n}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance criterion {n} failed: {detail}");
}

const STRATEGIES: [Strategy; 3] = [Strategy::Poset, Strategy::DagQuotient, Strategy::MonoidGlue];

fn setup_stream(seed: u64, count: usize) -> Vec<LocalisationSetup> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|i| {
            let cfg = GenConfig { strategy: STRATEGIES[i % 3], ..GenConfig::default() };
            gen_setup(&cfg, &mut rng)
        })
        .collect()
}

#[test]
fn criterion_1_and_2_implication_audit() {
    let _guard = serial();
    let setups = setup_stream(2024, 10_000);
    let budget = CheckBudget::default();
    let audit = implication_audit(&setups, &budget).expect("audit runs");
    line(
        1,
        audit.riou_violations.is_empty() && audit.unknown_tainted == 0,
        &format!(
            "pushout-embedding hypotheses implied all connectivity grades on {} of {} setups ({} violations, {} undecided)",
            audit.riou_antecedent,
            audit.total,
            audit.riou_violations.len(),
            audit.unknown_tainted
        ),
    );
    line(
        2,
        audit.c2_violations.is_empty(),
        &format!(
            "grade 0 plus cofinality implied grades 1 and 2 on {} of {} setups ({} violations)",
            audit.c2_antecedent,
            audit.total,
            audit.c2_violations.len()
        ),
    );
}

fn certified_cases() -> Vec<LocalisationSetup> {
    let mut cases = vec![
        fixtures::riou_fix(),
        fixtures::identity_setup(fixtures::pt()),
        fixtures::identity_setup(fixtures::arrow()),
        fixtures::identity_setup(fixtures::pt_pt()),
        fixtures::identity_setup(fixtures::chain2()),
    ];
    cases.extend(setup_stream(7, 300));
    cases
}

#[test]
fn criterion_3_certificate_vs_oracle() {
    let _guard = serial();
    let budget = CertBudget::default();
    let loc = LocBudget::default();
    let mut certified = 0usize;
    let mut agreements = 0usize;
    for setup in certified_cases() {
        let cert = match build_equivalence(&setup, &budget) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if cert.status != CertStatus::Certified {
            continue;
        }
        certified += 1;
        if equivalence_oracle(&setup, &loc).expect("oracle runs")
            == EquivalenceVerdict::Equivalence
        {
            agreements += 1;
        }
    }
    let non_example = matches!(
        equivalence_oracle(&fixtures::pt_into_pt_pt(), &loc).expect("oracle runs"),
        EquivalenceVerdict::NotEquivalence { .. }
    );
    line(
        3,
        certified > 0 && agreements == certified && non_example,
        &format!(
            "oracle agreed on {agreements}/{certified} certified setups; disjoint-point non-example rejected: {non_example}"
        ),
    );
}

#[test]
fn criterion_4_connectivity_engine() {
    let _guard = serial();
    let budget = Pi1Budget::default();
    let par = fixtures::par();
    let par_conn = connectivity(&par, &budget);
    let par_ok = matches!(
        par_conn.pi1.first(),
        Some(Pi1Verdict::Nontrivial(NontrivialityCertificate::Abelianization {
            free_rank: 1,
            torsion,
        })) if torsion.is_empty()
    );
    let ind_ok = (1..=5).all(|n| {
        connectivity(&fixtures::ind(n), &budget).one_connected() == Some(true)
    });

    let mut rng = Rng::new(99);
    let mut verdicts = 0usize;
    let mut unknowns = 0usize;
    let mut disagreements = 0usize;
    for i in 0..200 {
        let cfg = GenConfig { strategy: STRATEGIES[i % 3], ..GenConfig::default() };
        let c = gen_category(&cfg, &mut rng);
        for comp in pi0(&c) {
            let main = decide_triviality(&pi1_presentation(&c, &comp), &budget);
            let oracle = edge_path_verdict(&c, &comp, &budget);
            verdicts += 1;
            match (&main, &oracle) {
                (Pi1Verdict::Unknown { .. }, _) | (_, Pi1Verdict::Unknown { .. }) => {
                    unknowns += 1
                }
                (Pi1Verdict::Trivial(_), Pi1Verdict::Nontrivial(_))
                | (Pi1Verdict::Nontrivial(_), Pi1Verdict::Trivial(_)) => disagreements += 1,
                _ => {}
            }
        }
    }
    let unknown_ok = unknowns * 100 <= verdicts;
    line(
        4,
        par_ok && ind_ok && disagreements == 0 && unknown_ok,
        &format!(
            "parallel pair has fundamental group Z: {par_ok}; filtered chains trivial: {ind_ok}; edge-path oracle agreed on {verdicts} components ({disagreements} disagreements, {unknowns} unknown)"
        ),
    );
}

#[test]
fn criterion_5_fractions_vs_rewriting() {
    let _guard = serial();
    let budget = LocBudget::default();
    let mut rng = Rng::new(5);
    let mut cases = 0usize;
    let mut mismatches = 0usize;
    let mut attempts = 0usize;
    while cases < 100 && attempts < 5000 {
        attempts += 1;
        let cfg = GenConfig { strategy: STRATEGIES[attempts % 3], ..GenConfig::default() };
        let c: Arc<FinCategory> = gen_category(&cfg, &mut rng);
        let s: MorphClass = gen_class(c.clone(), 50, &mut rng);
        if !ore_check(&c, &s).holds {
            continue;
        }
        let fm = fraction_model(&c, &s).expect("fraction model builds");
        let rm = match rewrite_model(&c, &s, &budget) {
            Ok(Some(m)) => m,
            _ => continue,
        };
        cases += 1;
        for x in 0..c.object_count() {
            for y in 0..c.object_count() {
                let hf = fm
                    .category
                    .hom(fm.model_object(x), fm.model_object(y))
                    .len();
                let hr = rm
                    .category
                    .hom(rm.model_object(x), rm.model_object(y))
                    .len();
                if hf != hr {
                    mismatches += 1;
                }
            }
        }
    }
    line(
        5,
        cases >= 100 && mismatches == 0,
        &format!(
            "hom-set cardinalities identical between span calculus and rewriting on {cases} cases ({mismatches} mismatches)"
        ),
    );
}

#[test]
fn criterion_6_transport_well_defined() {
    let _guard = serial();
    let budget = CertBudget::default();
    let mut certified = 0usize;
    let mut failed_checks = Vec::new();
    for setup in certified_cases() {
        let cert = match build_equivalence(&setup, &budget) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if cert.status != CertStatus::Certified {
            continue;
        }
        certified += 1;
        for (name, ok) in &cert.checks {
            if !ok {
                failed_checks.push(name.clone());
            }
        }
    }
    line(
        6,
        certified > 0 && failed_checks.is_empty(),
        &format!(
            "transport independence, change-of-resolution, identity and cocycle equalities held exhaustively on {certified} certified setups (failures: {failed_checks:?})"
        ),
    );
}

#[test]
fn criterion_7_extension_comparison() {
    let _guard = serial();
    let budget = CertBudget::default();
    let mut checked = 0usize;
    let mut ok = true;
    for setup in [
        fixtures::riou_fix(),
        fixtures::identity_setup(fixtures::arrow()),
        fixtures::identity_setup(fixtures::pt_pt()),
        fixtures::identity_setup(fixtures::chain2()),
    ] {
        let cert = build_equivalence(&setup, &budget).expect("fixture certifies");
        assert_eq!(cert.status, CertStatus::Certified);
        let g = induced_functor(&setup, &cert.cm, &cert.dm).expect("induced functor");
        let res = catloc::localisation::kan::kan_extend(&setup, &cert, &cert.dm.p, &g)
            .expect("extension builds");
        checked += 1;
        ok &= res.independent && res.natural;
    }
    line(
        7,
        ok,
        &format!(
            "comparison maps independent of resolutions and natural on {checked} certified fixtures"
        ),
    );
}

#[test]
fn criterion_8_envelope_lift() {
    let _guard = serial();
    let budget = CertBudget::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, setup) in [
        ("terminal-into-arrow", fixtures::riou_fix()),
        ("identity-arrow", fixtures::identity_setup(fixtures::arrow())),
        ("identity-two-points", fixtures::identity_setup(fixtures::pt_pt())),
    ] {
        for k in [2, 3] {
            let lift = catloc::envelope::check_envelope_lift(&setup, k, &budget)
                .expect("lift check runs");
            let pass = lift.status == CertStatus::Certified;
            ok &= pass;
            detail.push(format!("{name}@k={k}:{}", if pass { "certified" } else { "not" }));
        }
        let env = catloc::envelope::coproduct_envelope(
            &setup.c,
            2,
            &catloc::budget::SizeBudget::default(),
        )
        .expect("envelope builds");
        if !env.inclusion.is_fully_faithful() {
            ok = false;
            detail.push(format!("{name}: inclusion not fully faithful"));
        }
    }
    line(8, ok, &format!("coproduct completion lift: {}", detail.join(" ")));
}

#[test]
fn criterion_9_bounded_referee_audit() {
    let _guard = serial();
    let setups = setup_stream(31, 1000);
    let budget = CheckBudget { poset_bound: 3, ..CheckBudget::default() };
    let pi1 = Pi1Budget::default();
    let mut antecedents = 0usize;
    let mut nontrivial_hits = 0usize;
    for setup in &setups {
        let reports = check_referee(setup, &budget).expect("referee check runs");
        if !find(&reports, "referee.hypothesis").expect("present").status.is_holds() {
            continue;
        }
        antecedents += 1;
        for d in 0..setup.d.object_count() {
            let slice = slice_i(setup, d).expect("slice builds");
            let conn = connectivity(&slice.carrier, &pi1);
            if conn.pi1.iter().any(|v| v.is_nontrivial()) {
                nontrivial_hits += 1;
            }
        }
    }
    line(
        9,
        antecedents > 0 && nontrivial_hits == 0,
        &format!(
            "bounded 0-connectedness held on {antecedents} of {} setups with {nontrivial_hits} nontrivial fundamental groups in their slices",
            setups.len()
        ),
    );
}

#[test]
fn criterion_10_round_trip_and_determinism() {
    let _guard = serial();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let mut files = 0usize;
    let mut round_trip_ok = true;
    for entry in std::fs::read_dir(dir).expect("fixture corpus exists") {
        let path = entry.expect("entry readable").path();
        if path.extension().and_then(|e| e.to_str()) != Some("dsl") {
            continue;
        }
        files += 1;
        let text = std::fs::read_to_string(&path).expect("fixture readable");
        let doc = catloc::dsl::parse(&text).expect("fixture parses");
        let printed = catloc::dsl::print(&doc);
        round_trip_ok &= catloc::dsl::parse(&printed).expect("canonical parses") == doc;
        round_trip_ok &=
            catloc::dsl::print(&catloc::dsl::parse(&printed).expect("parses")) == printed;
    }

    let bin = env!("CARGO_BIN_EXE_catloc");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).current_dir(dir).output().expect("binary runs");
        (out.stdout, out.status.code())
    };
    let a = run(&["check", "t0", "riou_fix.dsl", "--seed", "1"]);
    let b = run(&["check", "t0", "riou_fix.dsl", "--seed", "1"]);
    let c = run(&["fuzz-audit", "--count", "30", "--seed", "5"]);
    let d = run(&["fuzz-audit", "--count", "30", "--seed", "5"]);
    let deterministic = a == b && c == d && a.1 == Some(0);
    line(
        10,
        files >= 5 && round_trip_ok && deterministic,
        &format!(
            "round-trip exact on {files} corpus files; repeated runs byte-identical: {deterministic}"
        ),
    );
}

use catloc::fuzz::{gen_setup, GenConfig, Rng, Strategy};
use catloc::hypotheses::{implication_audit, CheckBudget};

fn rss_mb() -> u64 {
    let s = std::fs::read_to_string("/proc/self/status").unwrap();
    s.lines()
        .find(|l| l.starts_with("VmRSS"))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(0)
        / 1024
}

fn main() {
    let strategies = [Strategy::Poset, Strategy::DagQuotient, Strategy::MonoidGlue];
    let mut rng = Rng::new(2024);
    let budget = CheckBudget::default();
    let mut total_m = 0usize;
    for chunk in 0..20 {
        let setups: Vec<_> = (0..500)
            .map(|i| {
                let cfg = GenConfig {
                    strategy: strategies[(chunk * 500 + i) % 3],
                    ..GenConfig::default()
                };
                gen_setup(&cfg, &mut rng)
            })
            .collect();
        let ms: usize = setups.iter().map(|s| s.c.morphism_count() + s.d.morphism_count()).sum();
        total_m += ms;
        let t = std::time::Instant::now();
        let audit = implication_audit(&setups, &budget).unwrap();
        eprintln!(
            "chunk {chunk}: mors={ms} riou={} c2={} tainted={} in {:?}, rss={}MB",
            audit.riou_antecedent,
            audit.c2_antecedent,
            audit.unknown_tainted,
            t.elapsed(),
            rss_mb()
        );
    }
    eprintln!("total morphisms {total_m}");
}

//! Campaign invariants over random configurations.

use std::collections::BTreeMap;

use proptest::prelude::*;
use qbench_cli::report::build;
use qbench_cli::{run_campaign, CampaignConfig, ReportKind};
use qbench_core::costing::Money;
use qbench_core::providers::JobStatus;
use qbench_core::store::{Filter, JobStore};

const PRESETS: [&str; 5] = [
    "aria1-aws",
    "forte1-aws",
    "garnet-aws",
    "h1-azure",
    "aria1-azure",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn budget_and_record_accounting(
        picks in proptest::sample::subsequence(PRESETS.to_vec(), 1..=3),
        days in 1u64..4,
        per_day in 1u64..3,
        cap_cents in proptest::option::of(0i64..20_000),
        seed in any::<u32>(),
    ) {
        let mut text = format!(
            "[campaign]\nseed = {seed}\ndays = {days}\nsubmissions_per_day = {per_day}\n"
        );
        if let Some(c) = cap_cents {
            text += &format!("budget_cap = \"{}.{:02}\"\n", c / 100, c % 100);
        }
        text += "[qubits]\nstart = 4\nend = 10\nstep = 3\n";
        for p in &picks {
            text += &format!("[[targets]]\npreset = \"{p}\"\n");
        }
        let cfg = CampaignConfig::parse(&text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut store = JobStore::open(dir.path().join("s.jsonl")).unwrap();
        let summary = run_campaign(&cfg, &mut store).unwrap();
        let records = store.query(&Filter::all());

        let planned = picks.len() as u64 * days * per_day * cfg.qubits.values().len() as u64;
        let skipped: u64 = summary.targets.iter().map(|t| t.skipped_for_budget).sum();
        prop_assert_eq!(records.len() as u64 + skipped, planned);
        prop_assert_eq!(summary.jobs, records.len() as u64);
        prop_assert!(records.iter().all(|r| r.status != JobStatus::Submitted));

        let mut spent: BTreeMap<&str, (Money, Money)> = BTreeMap::new();
        for r in &records {
            let e = spent.entry(r.target.as_str()).or_default();
            e.0 += r.cost;
            e.1 = e.1.max(r.cost);
        }
        if let Some(c) = cap_cents {
            for (target, (total, largest)) in spent {
                prop_assert!(
                    total.micros() <= Money::from_cents(c).micros() + largest.micros(),
                    "{target}: spent {total} over cap {c}c"
                );
            }
        }
    }
}

#[test]
fn cost_vs_fidelity_matches_group_by() {
    let text = "[campaign]\ndays = 3\n[qubits]\nstart = 4\nend = 8\n[[targets]]\npreset = \"aria1-azure\"\n[[targets]]\npreset = \"h2-azure\"\n[[targets]]\npreset = \"forte1-aws\"";
    let cfg = CampaignConfig::parse(text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut store = JobStore::open(dir.path().join("s.jsonl")).unwrap();
    run_campaign(&cfg, &mut store).unwrap();
    let records = store.query(&Filter::all());
    let (_, rows, _) = build(ReportKind::CostVsFidelity, &records).unwrap();

    let mut groups: BTreeMap<(usize, String, String), (i128, f64, u64)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.status == JobStatus::Processed) {
        let g = groups
            .entry((r.qubits, r.cloud.to_string(), r.target.clone()))
            .or_default();
        g.0 += r.cost.micros() as i128;
        g.1 += r.fidelity.unwrap();
        g.2 += 1;
    }
    assert_eq!(rows.len(), groups.len());
    for (row, ((q, cloud, target), (cost, fid, n))) in rows.iter().zip(groups) {
        assert_eq!(row[0], q.to_string());
        assert_eq!(row[1], cloud);
        assert_eq!(row[2], target);
        assert_eq!(row[3], n.to_string());
        let mean_micros = ((2 * cost + n as i128) / (2 * n as i128)) as i64;
        assert_eq!(row[4], Money::from_micros(mean_micros).to_string());
        assert_eq!(row[5], format!("{:.6}", fid / n as f64));
    }
}

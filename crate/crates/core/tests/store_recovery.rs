//! Store crash recovery at arbitrary truncation points.

use std::collections::BTreeMap;

use proptest::prelude::*;
use qbench_core::circuit::GateCensus;
use qbench_core::costing::Money;
use qbench_core::providers::{AvailabilityState, Cloud, JobStatus};
use qbench_core::simulator::CountsDistribution;
use qbench_core::store::{Filter, JobRecord, JobStore};

fn record(i: u64) -> JobRecord {
    let mut counts = BTreeMap::new();
    counts.insert("0110".to_string(), 400 + i % 50);
    counts.insert("0000".to_string(), 100 - i % 50);
    let fidelity = (400 + i % 50) as f64 / 500.0;
    JobRecord {
        job_id: format!("job-{i:03}"),
        cloud: Cloud::SimAzure,
        target: "h2-azure".into(),
        qubits: 4,
        shots: 500,
        seed: i,
        submitted_at: 1000 - i,
        executed_at: Some(2000),
        predicted_wait: Some(30 + i),
        actual_wait: Some(40),
        status: JobStatus::Processed,
        target_status: AvailabilityState::Available,
        census: GateCensus::new(40, 12),
        counts: Some(CountsDistribution::new(counts).unwrap()),
        fidelity: Some(fidelity),
        success: Some(true),
        cost: Money::from_micros(1_234_567 * i as i64),
        error_message: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_drops_at_most_the_torn_record(n in 1u64..12, cut_frac in 0.0f64..1.0) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("jobs.jsonl");
        let mut store = JobStore::open(&path).unwrap();
        let records: Vec<JobRecord> = (0..n).map(record).collect();
        for r in &records {
            store.append(r.clone()).unwrap();
        }
        drop(store);
        let bytes = std::fs::read(&path).unwrap();
        let cut = (bytes.len() as f64 * cut_frac) as usize;
        std::fs::write(&path, &bytes[..cut]).unwrap();
        let complete_lines = bytes[..cut].iter().filter(|&&b| b == b'\n').count();

        let mut store = JobStore::open(&path).unwrap();
        prop_assert_eq!(store.len(), complete_lines);
        for r in &records[..complete_lines] {
            prop_assert_eq!(store.get(&r.job_id), Some(r));
        }
        // The store stays appendable and the torn record can be rewritten.
        if complete_lines < records.len() {
            store.append(records[complete_lines].clone()).unwrap();
        }
        drop(store);
        let reread = JobStore::load(&path).unwrap();
        prop_assert_eq!(reread.len(), (complete_lines + 1).min(records.len()));
    }
}

#[test]
fn query_orders_by_submission_then_id() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = JobStore::open(dir.path().join("s.jsonl")).unwrap();
    let mut a = record(1);
    a.submitted_at = 5;
    let mut b = record(2);
    b.submitted_at = 5;
    let mut c = record(3);
    c.submitted_at = 1;
    store.append_all([b.clone(), a.clone(), c.clone()]).unwrap();
    let ids: Vec<String> = store
        .query(&Filter::all())
        .into_iter()
        .map(|r| r.job_id)
        .collect();
    assert_eq!(ids, ["job-003", "job-001", "job-002"]);
}

#[test]
fn corrupt_middle_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let mut store = JobStore::open(&path).unwrap();
    store.append_all((0..3).map(record)).unwrap();
    drop(store);
    let text = std::fs::read_to_string(&path).unwrap();
    let broken = text.replacen("\"shots\":500", "\"shots\":\"x\"", 1);
    std::fs::write(&path, broken).unwrap();
    assert!(JobStore::open(&path).is_err());
}

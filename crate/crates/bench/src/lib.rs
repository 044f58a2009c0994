//! Fixtures shared by the criterion benches.

use std::collections::BTreeMap;

use qbench_core::analysis::classify_success;
use qbench_core::circuit::GateCensus;
use qbench_core::costing::Money;
use qbench_core::providers::{AvailabilityState, Cloud, JobStatus};
use qbench_core::simulator::CountsDistribution;
use qbench_core::store::JobRecord;

/// A Processed record whose fields vary with `i`.
pub fn record(i: u64) -> JobRecord {
    let qubits = 8 + 2 * (i % 5) as usize;
    let hits = 250 + i % 250;
    let mut counts = BTreeMap::new();
    counts.insert("0".repeat(qubits), hits);
    counts.insert("1".repeat(qubits), 500 - hits);
    let fidelity = hits as f64 / 500.0;
    JobRecord {
        job_id: format!("bench-{i:06}"),
        cloud: if i.is_multiple_of(2) {
            Cloud::SimAws
        } else {
            Cloud::SimAzure
        },
        target: format!("t{}", i % 4),
        qubits,
        shots: 500,
        seed: i,
        submitted_at: i * 60,
        executed_at: Some(i * 60 + 600),
        predicted_wait: Some(300),
        actual_wait: Some(600),
        status: JobStatus::Processed,
        target_status: AvailabilityState::Available,
        census: GateCensus::new(400 + i % 50, 120),
        counts: Some(CountsDistribution::new(counts).expect("valid bitstrings")),
        fidelity: Some(fidelity),
        success: Some(classify_success(fidelity)),
        cost: Money::from_cents(1530),
        error_message: None,
    }
}

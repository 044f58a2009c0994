//! Core of the qbench harness.
//!
//! The crate builds the QFT increment benchmark, simulates it exactly or under
//! the zero-order noise channels, lowers it to the two vendor gate-set
//! profiles, runs it through simulated cloud providers with queues and
//! availability schedules, prices every job under the three billing models,
//! persists normalized job records and aggregates them into reports.
//!
//! Bit order: qubit `i` carries weight `2^i`; bitstrings are printed most
//! significant bit first.

pub mod analysis;
pub mod circuit;
pub mod costing;
pub mod providers;
pub mod rng;
pub mod simulator;
pub mod store;
pub mod transpiler;

pub use analysis::{
    aggregate, classify_success, hellinger_fidelity, infer_f2qg, queue_prediction_report,
    AggregateRow, FidelityScore, TwoQubitGateEstimate, SUCCESS_THRESHOLD,
};
pub use circuit::{
    build_qft_benchmark, census, ideal_output, random_input, BenchmarkMeta, Circuit, Gate,
    GateCensus, GateKind,
};
pub use costing::{CostModel, HqcCredits, Money, PriceTable};
pub use providers::{
    Cloud, DegradedSemantics, JobHandle, JobStatus, Provider, ProviderProfile, QueueModel,
    Schedule, TargetStatus,
};
pub use simulator::{
    run_noisy, run_statevector, sample, CountsDistribution, NoiseSpec, StateVector,
};
pub use store::{Filter, JobRecord, JobStore};
pub use transpiler::{transpile, verify_equivalence, GateSetProfile, TranspileResult};

//! Simulated cloud providers.
//!
//! A [`Provider`] wraps one [`ProviderProfile`] and owns the jobs submitted to
//! it. All calls take an explicit simulated clock. Jobs wait a lognormal
//! queue time, then start at the first instant the target processes work,
//! run for a fixed execution time and are measured on the simulator under
//! the profile's noise model.

mod presets;
mod schedule;

pub use presets::{preset, preset_names, presets};
pub use schedule::{
    AvailabilityState, DegradedSemantics, Schedule, ScheduleError, Span, TargetStatus, Window,
    SECONDS_PER_DAY,
};

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rand::Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{ideal_index, Circuit, GateCensus};
use crate::costing::{CostError, CostModel};
use crate::rng;
use crate::simulator::{
    run_noisy, sample_global_depolarizing, sample_ideal, CountsDistribution, IdealDistribution,
    NoiseSpec, SimulatorError, MAX_SIM_QUBITS,
};
use crate::transpiler::{
    check_gate_limit, transpile, GateSetProfile, LimitVerdict, TranspileError,
};

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("unknown job handle {0}")]
    UnknownHandle(u64),
    #[error("shots must be at least 1")]
    NoShots,
    #[error("malformed circuit: {0}")]
    Transpile(#[from] TranspileError),
    #[error("invalid profile {0}: {1}")]
    BadProfile(String, String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cloud {
    #[serde(rename = "SimAWS")]
    SimAws,
    #[serde(rename = "SimAzure")]
    SimAzure,
}

impl Cloud {
    pub fn as_str(self) -> &'static str {
        match self {
            Cloud::SimAws => "SimAWS",
            Cloud::SimAzure => "SimAzure",
        }
    }
}

impl fmt::Display for Cloud {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Cloud {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simaws" | "aws" => Ok(Cloud::SimAws),
            "simazure" | "azure" => Ok(Cloud::SimAzure),
            _ => Err(format!("unknown cloud {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JobStatus {
    Submitted,
    Processed,
    Error,
    Canceled,
    Unavailable,
}

impl JobStatus {
    pub fn is_terminal(self) -> bool {
        self != JobStatus::Submitted
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JobStatus::Submitted => "Submitted",
            JobStatus::Processed => "Processed",
            JobStatus::Error => "Error",
            JobStatus::Canceled => "Canceled",
            JobStatus::Unavailable => "Unavailable",
        }
    }
}

impl fmt::Display for JobStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for JobStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            JobStatus::Submitted,
            JobStatus::Processed,
            JobStatus::Error,
            JobStatus::Canceled,
            JobStatus::Unavailable,
        ]
        .into_iter()
        .find(|st| st.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown job status {s:?}"))
    }
}

/// Queue wait model in seconds.
///
/// Actual waits are lognormal with parameters `(mu, sigma)`. The published
/// estimate is `predictor_bias · e^mu`, optionally perturbed by independent
/// lognormal noise of scale `predictor_sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueModel {
    pub mu: f64,
    pub sigma: f64,
    pub predictor_bias: f64,
    #[serde(default)]
    pub predictor_sigma: f64,
}

impl QueueModel {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(format!("queue sigma {} must be positive", self.sigma));
        }
        if !(self.predictor_bias > 0.0 && self.predictor_bias.is_finite()) {
            return Err(format!(
                "predictor bias {} must be positive",
                self.predictor_bias
            ));
        }
        if !(self.predictor_sigma >= 0.0 && self.predictor_sigma.is_finite()) {
            return Err(format!(
                "predictor sigma {} must be non-negative",
                self.predictor_sigma
            ));
        }
        if !self.mu.is_finite() {
            return Err("queue mu must be finite".into());
        }
        Ok(())
    }

    /// Draws `(predicted, actual)` waits, each at least one second.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> (u64, u64) {
        let actual = LogNormal::new(self.mu, self.sigma)
            .expect("validated queue model")
            .sample(rng);
        let z: f64 = rng.sample(StandardNormal);
        let predicted = self.predictor_bias * (self.mu + self.predictor_sigma * z).exp();
        (to_wait(predicted), to_wait(actual))
    }
}

fn to_wait(seconds: f64) -> u64 {
    seconds.round().clamp(1.0, 1e12) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderProfile {
    pub cloud: Cloud,
    pub target_name: String,
    pub gate_profile: GateSetProfile,
    /// Maximum total transpiled gates, when the path enforces one.
    pub gate_limit: Option<u64>,
    /// Physical register size.
    pub max_width: Option<usize>,
    pub queue_model: QueueModel,
    pub availability: Schedule,
    pub cost_model: CostModel,
    pub noise: NoiseSpec,
    pub exposes_avg_queue_time: bool,
    pub exposes_queue_position: bool,
    pub exec_seconds: u64,
    pub error_mitigation: bool,
    /// Widest circuit executed on the statevector; wider benchmark circuits
    /// use their closed-form ideal distribution.
    pub simulate_max_width: usize,
    pub is_emulator: bool,
}

impl ProviderProfile {
    pub fn validate(&self) -> Result<(), ProviderError> {
        let bad = |why: String| ProviderError::BadProfile(self.target_name.clone(), why);
        self.gate_profile.validate()?;
        self.queue_model.validate().map_err(bad)?;
        self.noise.validate().map_err(|e| bad(e.to_string()))?;
        self.cost_model.validate()?;
        if self.simulate_max_width > MAX_SIM_QUBITS {
            return Err(bad(format!(
                "simulate_max_width {} above the simulator cap {MAX_SIM_QUBITS}",
                self.simulate_max_width
            )));
        }
        Ok(())
    }

    pub fn target_status(&self, clock: u64) -> TargetStatus {
        self.availability.status_at(clock)
    }
}

/// Pure schedule lookup.
pub fn target_status(profile: &ProviderProfile, clock: u64) -> TargetStatus {
    profile.target_status(clock)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JobHandle(pub u64);

#[derive(Debug, Clone, PartialEq)]
pub enum SubmitOutcome {
    Accepted {
        handle: JobHandle,
        census: GateCensus,
        target_status: TargetStatus,
        /// Published estimate; only on paths that expose one.
        predicted_wait: Option<u64>,
        actual_wait: u64,
        queue_position: Option<u64>,
    },
    Refused {
        status: JobStatus,
        reason: String,
        census: GateCensus,
        target_status: TargetStatus,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PollResult {
    pub status: JobStatus,
    pub counts: Option<CountsDistribution>,
    pub executed_at: Option<u64>,
    pub error_message: Option<String>,
}

#[derive(Debug)]
struct Job {
    circuit: Circuit,
    shots: u64,
    seed: u64,
    submitted_at: u64,
    start_at: Option<u64>,
    status: JobStatus,
    counts: Option<CountsDistribution>,
    error_message: Option<String>,
}

#[derive(Debug)]
pub struct Provider {
    profile: ProviderProfile,
    jobs: Mutex<Vec<Job>>,
}

impl Provider {
    pub fn new(profile: ProviderProfile) -> Result<Self, ProviderError> {
        profile.validate()?;
        Ok(Provider {
            profile,
            jobs: Mutex::new(Vec::new()),
        })
    }

    pub fn profile(&self) -> &ProviderProfile {
        &self.profile
    }

    pub fn target_status(&self, clock: u64) -> TargetStatus {
        self.profile.target_status(clock)
    }

    pub fn submit(
        &self,
        circuit: &Circuit,
        shots: u64,
        clock: u64,
        seed: u64,
    ) -> Result<SubmitOutcome, ProviderError> {
        if shots == 0 {
            return Err(ProviderError::NoShots);
        }
        let lowered = transpile(circuit, &self.profile.gate_profile)?;
        let census = lowered.census;
        let status = self.profile.target_status(clock);
        let refuse = |st: JobStatus, reason: String| SubmitOutcome::Refused {
            status: st,
            reason,
            census,
            target_status: status,
        };
        if !status.accepts_jobs() {
            return Ok(refuse(JobStatus::Unavailable, "target unavailable".into()));
        }
        // The gate limit is checked at submission, before any width check.
        if let Some(limit) = self.profile.gate_limit {
            if let LimitVerdict::Reject { total, limit } = check_gate_limit(&census, limit) {
                return Ok(refuse(
                    JobStatus::Error,
                    format!("gate limit: {total} gates exceeds {limit}"),
                ));
            }
        }
        let width = circuit.width();
        if let Some(max) = self.profile.max_width.filter(|&m| width > m) {
            return Ok(refuse(
                JobStatus::Error,
                format!("width cap: {width} qubits exceeds {max}"),
            ));
        }
        if let Some(DegradedSemantics::ReducedCapacity { max_width }) = status.degraded_semantics {
            if width > max_width {
                return Ok(refuse(
                    JobStatus::Error,
                    format!("reduced capacity: {width} qubits exceeds {max_width}"),
                ));
            }
        }

        let mut rng = rng::stream(rng::derive_seed(&[seed, 0x7175_6575]));
        let (predicted, actual_wait) = self.profile.queue_model.draw(&mut rng);
        let start_at = self
            .profile
            .availability
            .next_processing_time(clock.saturating_add(actual_wait));

        let mut jobs = self.jobs.lock().expect("provider lock poisoned");
        let queue_position = self.profile.exposes_queue_position.then(|| {
            1 + jobs
                .iter()
                .filter(|j| {
                    j.status == JobStatus::Submitted && j.start_at.is_none_or(|s| s > clock)
                })
                .count() as u64
        });
        let handle = JobHandle(jobs.len() as u64);
        jobs.push(Job {
            circuit: lowered.circuit,
            shots,
            seed,
            submitted_at: clock,
            start_at,
            status: JobStatus::Submitted,
            counts: None,
            error_message: None,
        });
        Ok(SubmitOutcome::Accepted {
            handle,
            census,
            target_status: status,
            predicted_wait: self.profile.exposes_avg_queue_time.then_some(predicted),
            actual_wait,
            queue_position,
        })
    }

    /// Clock at which the job finishes, if it ever starts.
    pub fn completion_time(&self, handle: JobHandle) -> Result<Option<u64>, ProviderError> {
        let jobs = self.jobs.lock().expect("provider lock poisoned");
        let job = jobs
            .get(handle.0 as usize)
            .ok_or(ProviderError::UnknownHandle(handle.0))?;
        Ok(job.start_at.map(|s| s + self.profile.exec_seconds))
    }

    pub fn submitted_at(&self, handle: JobHandle) -> Result<u64, ProviderError> {
        let jobs = self.jobs.lock().expect("provider lock poisoned");
        jobs.get(handle.0 as usize)
            .map(|j| j.submitted_at)
            .ok_or(ProviderError::UnknownHandle(handle.0))
    }

    pub fn poll(&self, handle: JobHandle, clock: u64) -> Result<PollResult, ProviderError> {
        let mut jobs = self.jobs.lock().expect("provider lock poisoned");
        let job = jobs
            .get_mut(handle.0 as usize)
            .ok_or(ProviderError::UnknownHandle(handle.0))?;
        if job.status == JobStatus::Submitted {
            if let Some(start) = job.start_at {
                if clock >= start + self.profile.exec_seconds {
                    match execute(&self.profile, &job.circuit, job.shots, job.seed) {
                        Ok(counts) => {
                            job.counts = Some(counts);
                            job.status = JobStatus::Processed;
                        }
                        Err(e) => {
                            job.error_message = Some(e);
                            job.status = JobStatus::Error;
                        }
                    }
                }
            }
        }
        Ok(PollResult {
            status: job.status,
            counts: job.counts.clone(),
            executed_at: (job.status == JobStatus::Processed)
                .then_some(job.start_at)
                .flatten(),
            error_message: job.error_message.clone(),
        })
    }

    /// Cancels a job that has not started executing by `clock`.
    pub fn cancel(&self, handle: JobHandle, clock: u64) -> Result<JobStatus, ProviderError> {
        let mut jobs = self.jobs.lock().expect("provider lock poisoned");
        let job = jobs
            .get_mut(handle.0 as usize)
            .ok_or(ProviderError::UnknownHandle(handle.0))?;
        if job.status == JobStatus::Submitted && job.start_at.is_none_or(|s| clock < s) {
            job.status = JobStatus::Canceled;
        }
        Ok(job.status)
    }

    /// Position among jobs still waiting at `clock`, on paths that expose it.
    pub fn queue_position(
        &self,
        handle: JobHandle,
        clock: u64,
    ) -> Result<Option<u64>, ProviderError> {
        let jobs = self.jobs.lock().expect("provider lock poisoned");
        let idx = handle.0 as usize;
        let job = jobs
            .get(idx)
            .ok_or(ProviderError::UnknownHandle(handle.0))?;
        if !self.profile.exposes_queue_position {
            return Ok(None);
        }
        let waiting =
            |j: &Job| j.status == JobStatus::Submitted && j.start_at.is_none_or(|s| s > clock);
        if !waiting(job) {
            return Ok(None);
        }
        Ok(Some(
            1 + jobs[..idx].iter().filter(|j| waiting(j)).count() as u64,
        ))
    }
}

fn execute(
    profile: &ProviderProfile,
    c: &Circuit,
    shots: u64,
    seed: u64,
) -> Result<CountsDistribution, String> {
    let width = c.width();
    let closed_form = c
        .metadata()
        .filter(|_| width > profile.simulate_max_width)
        .and_then(|m| ideal_index(m.q, m.n).ok())
        .map(|index| IdealDistribution::Delta { width, index });
    let sim_err = |e: SimulatorError| e.to_string();
    match (closed_form, profile.noise) {
        (Some(ideal), NoiseSpec::None) => Ok(sample_ideal(&ideal, shots, seed)),
        (Some(ideal), NoiseSpec::GlobalDepolarizing { f_2qg }) => {
            let n_2q = crate::circuit::census(c).n_2q;
            sample_global_depolarizing(&ideal, n_2q, f_2qg, shots, seed).map_err(sim_err)
        }
        _ => run_noisy(c, profile.noise, shots, seed).map_err(sim_err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_qft_benchmark, ideal_output};
    use crate::costing::PriceTable;

    const HOUR: u64 = 3600;

    fn quick_queue() -> QueueModel {
        QueueModel {
            mu: (600f64).ln(),
            sigma: 0.5,
            predictor_bias: 1.0,
            predictor_sigma: 0.0,
        }
    }

    fn noiseless(schedule: Schedule) -> Provider {
        let mut p = preset("h2-azure", &PriceTable::bundled()).unwrap();
        p.noise = NoiseSpec::None;
        p.queue_model = quick_queue();
        p.availability = schedule;
        Provider::new(p).unwrap()
    }

    fn accepted(o: SubmitOutcome) -> JobHandle {
        match o {
            SubmitOutcome::Accepted { handle, .. } => handle,
            other => panic!("expected acceptance, got {other:?}"),
        }
    }

    #[test]
    fn unavailable_target_refuses() {
        let p = noiseless(Schedule::always(TargetStatus::UNAVAILABLE));
        let c = build_qft_benchmark(4, 1).unwrap();
        match p.submit(&c, 500, 10, 1).unwrap() {
            SubmitOutcome::Refused {
                status,
                target_status,
                ..
            } => {
                assert_eq!(status, JobStatus::Unavailable);
                assert_eq!(target_status.state, AvailabilityState::Unavailable);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn aws_gate_limit_and_azure_width() {
        let prices = PriceTable::bundled();
        let aws = Provider::new(preset("aria1-aws", &prices).unwrap()).unwrap();
        let azure = Provider::new(preset("aria1-azure", &prices).unwrap()).unwrap();
        let c18 = build_qft_benchmark(18, 77).unwrap();
        let c16 = build_qft_benchmark(16, 77).unwrap();
        // 09:00 on day 0 is inside both targets' available hours.
        let clock = 9 * HOUR;
        match aws.submit(&c18, 500, clock, 3).unwrap() {
            SubmitOutcome::Refused { status, reason, .. } => {
                assert_eq!(status, JobStatus::Error);
                assert!(reason.starts_with("gate limit"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        accepted(aws.submit(&c16, 500, clock, 3).unwrap());
        accepted(azure.submit(&c18, 500, clock, 3).unwrap());
        accepted(
            azure
                .submit(&build_qft_benchmark(25, 5).unwrap(), 500, clock, 3)
                .unwrap(),
        );
        match azure
            .submit(&build_qft_benchmark(26, 5).unwrap(), 500, clock, 3)
            .unwrap()
        {
            SubmitOutcome::Refused { status, reason, .. } => {
                assert_eq!(status, JobStatus::Error);
                assert!(reason.starts_with("width cap"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn poll_lifecycle() {
        let p = noiseless(Schedule::always_available());
        let c = build_qft_benchmark(5, 12).unwrap();
        let h = accepted(p.submit(&c, 500, 100, 9).unwrap());
        let done = p.completion_time(h).unwrap().unwrap();
        assert_eq!(p.poll(h, 100).unwrap().status, JobStatus::Submitted);
        assert_eq!(p.poll(h, done - 1).unwrap().status, JobStatus::Submitted);
        let r = p.poll(h, done).unwrap();
        assert_eq!(r.status, JobStatus::Processed);
        let counts = r.counts.clone().unwrap();
        assert_eq!(counts.shots(), 500);
        assert_eq!(counts.get(&ideal_output(5, 12).unwrap()), 500);
        // Idempotent, and terminal even for an earlier clock.
        assert_eq!(p.poll(h, done).unwrap(), r);
        assert_eq!(p.poll(h, 0).unwrap(), r);
        assert!(matches!(
            p.poll(JobHandle(99), 0),
            Err(ProviderError::UnknownHandle(99))
        ));
    }

    #[test]
    fn cancel_semantics() {
        let p = noiseless(Schedule::always_available());
        let c = build_qft_benchmark(4, 2).unwrap();
        let h = accepted(p.submit(&c, 100, 0, 1).unwrap());
        assert_eq!(p.cancel(h, 1).unwrap(), JobStatus::Canceled);
        assert_eq!(p.cancel(h, 2).unwrap(), JobStatus::Canceled);
        assert_eq!(p.poll(h, u64::MAX / 2).unwrap().status, JobStatus::Canceled);

        let h2 = accepted(p.submit(&c, 100, 0, 2).unwrap());
        let done = p.completion_time(h2).unwrap().unwrap();
        assert_eq!(p.poll(h2, done).unwrap().status, JobStatus::Processed);
        assert_eq!(p.cancel(h2, done + 1).unwrap(), JobStatus::Processed);
    }

    #[test]
    fn accept_hold_defers_until_available() {
        // Degraded 02:00-17:00, available overnight.
        let hold = Schedule::daily(
            2 * HOUR,
            17 * HOUR,
            TargetStatus::degraded(DegradedSemantics::AcceptHold),
        )
        .unwrap();
        let p = noiseless(hold);
        let c = build_qft_benchmark(4, 9).unwrap();
        let h = accepted(p.submit(&c, 50, 9 * HOUR, 4).unwrap());
        // The queue wait is minutes, so it has elapsed by 16:00, but the
        // target is still degraded.
        assert_eq!(p.poll(h, 16 * HOUR).unwrap().status, JobStatus::Submitted);
        let done = p.completion_time(h).unwrap().unwrap();
        assert!(done >= 17 * HOUR);
        let r = p.poll(h, done).unwrap();
        assert_eq!(r.status, JobStatus::Processed);
        assert!(r.executed_at.unwrap() >= 17 * HOUR);
    }

    #[test]
    fn reduced_capacity_limits_width() {
        let p = noiseless(Schedule::always(TargetStatus::degraded(
            DegradedSemantics::ReducedCapacity { max_width: 6 },
        )));
        assert!(matches!(
            p.submit(&build_qft_benchmark(8, 1).unwrap(), 10, 0, 0)
                .unwrap(),
            SubmitOutcome::Refused {
                status: JobStatus::Error,
                ..
            }
        ));
        let h = accepted(
            p.submit(&build_qft_benchmark(6, 1).unwrap(), 10, 0, 0)
                .unwrap(),
        );
        let done = p.completion_time(h).unwrap().unwrap();
        assert_eq!(p.poll(h, done).unwrap().status, JobStatus::Processed);
    }

    #[test]
    fn queue_exposure_by_cloud() {
        let prices = PriceTable::bundled();
        let aws = Provider::new(preset("forte1-aws", &prices).unwrap()).unwrap();
        let azure = Provider::new(preset("h2-azure", &prices).unwrap()).unwrap();
        let c = build_qft_benchmark(4, 0).unwrap();
        match aws.submit(&c, 10, 0, 1).unwrap() {
            SubmitOutcome::Accepted {
                predicted_wait,
                queue_position,
                ..
            } => {
                assert_eq!(predicted_wait, None);
                assert_eq!(queue_position, Some(1));
            }
            o => panic!("{o:?}"),
        }
        match aws.submit(&c, 10, 1, 2).unwrap() {
            SubmitOutcome::Accepted { queue_position, .. } => assert_eq!(queue_position, Some(2)),
            o => panic!("{o:?}"),
        }
        match azure.submit(&c, 10, 0, 1).unwrap() {
            SubmitOutcome::Accepted {
                predicted_wait,
                queue_position,
                ..
            } => {
                assert!(predicted_wait.is_some());
                assert_eq!(queue_position, None);
            }
            o => panic!("{o:?}"),
        }
        assert_eq!(aws.queue_position(JobHandle(1), 1).unwrap(), Some(2));
    }

    #[test]
    fn wide_benchmark_uses_closed_form_ideal() {
        let prices = PriceTable::bundled();
        let mut profile = preset("h2-azure", &prices).unwrap();
        profile.noise = NoiseSpec::GlobalDepolarizing { f_2qg: 0.999 };
        let p = Provider::new(profile).unwrap();
        let c = build_qft_benchmark(26, 12345).unwrap();
        let h = accepted(p.submit(&c, 500, 0, 5).unwrap());
        let r = p.poll(h, p.completion_time(h).unwrap().unwrap()).unwrap();
        assert_eq!(r.status, JobStatus::Processed);
        let counts = r.counts.unwrap();
        assert_eq!(counts.shots(), 500);
        let hits = counts.get(&ideal_output(26, 12345).unwrap());
        assert!(hits > 0 && hits < 500);
    }

    #[test]
    fn predictor_overestimate_fraction() {
        let mut rng = rng::stream(17);
        let frac = |m: QueueModel, rng: &mut rand_chacha::ChaCha8Rng| {
            let n = 10_000;
            (0..n)
                .filter(|_| {
                    let (p, a) = m.draw(rng);
                    p > a
                })
                .count() as f64
                / n as f64
        };
        let sigma5 = 5.0 * (0.25f64 / 10_000.0).sqrt();
        let fair = QueueModel {
            mu: 8.0,
            sigma: 1.2,
            predictor_bias: 1.0,
            predictor_sigma: 0.0,
        };
        assert!((frac(fair, &mut rng) - 0.5).abs() < sigma5);
        let pessimist = QueueModel {
            predictor_bias: 2.0,
            ..fair
        };
        assert!(frac(pessimist, &mut rng) > 0.5 + sigma5);
    }

    #[test]
    fn invalid_profiles_rejected() {
        let prices = PriceTable::bundled();
        let mut p = preset("aria1-aws", &prices).unwrap();
        p.queue_model.sigma = 0.0;
        assert!(Provider::new(p).is_err());
        let mut p = preset("aria1-aws", &prices).unwrap();
        p.noise = NoiseSpec::PauliTrajectory { p: 1.0 };
        assert!(Provider::new(p).is_err());
    }

    #[test]
    fn status_parsing() {
        assert_eq!(
            "processed".parse::<JobStatus>().unwrap(),
            JobStatus::Processed
        );
        assert_eq!("SimAWS".parse::<Cloud>().unwrap(), Cloud::SimAws);
        assert_eq!(
            serde_json::to_string(&Cloud::SimAzure).unwrap(),
            "\"SimAzure\""
        );
        assert!("nope".parse::<JobStatus>().is_err());
    }
}

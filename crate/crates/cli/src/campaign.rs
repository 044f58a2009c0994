//! The daily launch, poll and record loop under simulated time.
//!
//! Each simulated day every target runs its sweep over the qubit range in
//! its own worker. A day's records are sorted by `(submitted_at, job_id)`
//! and appended in one batch, so the store is identical however the workers
//! interleave.

use std::collections::BTreeMap;

use qbench_core::analysis::{benchmark_fidelity, classify_success};
use qbench_core::circuit::{build_qft_benchmark, random_input, GateCensus};
use qbench_core::costing::Money;
use qbench_core::providers::{
    Cloud, JobStatus, Provider, ProviderProfile, SubmitOutcome, SECONDS_PER_DAY,
};
use qbench_core::rng::{derive_seed, name_hash};
use qbench_core::store::{JobRecord, JobStore};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CampaignConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetSummary {
    pub cloud: Cloud,
    pub target: String,
    pub statuses: BTreeMap<JobStatus, u64>,
    pub cost: Money,
    /// Sweeps not submitted because the budget cap was reached.
    pub skipped_for_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub jobs: u64,
    pub cost: Money,
    pub targets: Vec<TargetSummary>,
}

struct Worker {
    provider: Provider,
    summary: TargetSummary,
}

struct Plan {
    seed: u64,
    shots: u64,
    qubits: Vec<usize>,
    budget_cap: Option<Money>,
    horizon: u64,
}

pub fn run_campaign(
    cfg: &CampaignConfig,
    store: &mut JobStore,
) -> Result<CampaignSummary, CliError> {
    cfg.validate()?;
    let profiles = cfg.profiles()?;
    let c = &cfg.campaign;
    let plan = Plan {
        seed: c.seed,
        shots: c.shots,
        qubits: cfg.qubits.values(),
        budget_cap: c.budget_cap,
        horizon: c.days * SECONDS_PER_DAY + c.drain_seconds,
    };
    let mut workers: Vec<Worker> = profiles
        .into_iter()
        .map(|p: ProviderProfile| {
            let summary = TargetSummary {
                cloud: p.cloud,
                target: p.target_name.clone(),
                statuses: BTreeMap::new(),
                cost: Money::ZERO,
                skipped_for_budget: 0,
            };
            Provider::new(p)
                .map(|provider| Worker { provider, summary })
                .map_err(|e| CliError::Config(e.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let spacing = SECONDS_PER_DAY / c.submissions_per_day;
    for day in 0..c.days {
        for round in 0..c.submissions_per_day {
            let clock = day * SECONDS_PER_DAY + c.submit_at + round * spacing;
            let mut batch: Vec<JobRecord> = workers
                .par_iter_mut()
                .map(|w| w.sweep(&plan, day, round, clock))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .flatten()
                .collect();
            batch.sort_by(|a, b| (a.submitted_at, &a.job_id).cmp(&(b.submitted_at, &b.job_id)));
            store.append_all(batch)?;
        }
    }

    let targets: Vec<TargetSummary> = workers.into_iter().map(|w| w.summary).collect();
    Ok(CampaignSummary {
        jobs: targets.iter().flat_map(|t| t.statuses.values()).sum(),
        cost: targets.iter().map(|t| t.cost).sum(),
        targets,
    })
}

impl Worker {
    fn sweep(
        &mut self,
        plan: &Plan,
        day: u64,
        round: u64,
        clock: u64,
    ) -> Result<Vec<JobRecord>, CliError> {
        let mut out = Vec::with_capacity(plan.qubits.len());
        for &q in &plan.qubits {
            if plan.budget_cap.is_some_and(|cap| self.summary.cost >= cap) {
                self.summary.skipped_for_budget += 1;
                continue;
            }
            let target = &self.summary.target;
            let seed = derive_seed(&[plan.seed, name_hash(target), day, round, q as u64]);
            let job_id = format!("{target}-{}-d{day:03}-r{round:02}-q{q:02}", plan.seed);
            let record = self.run_job(job_id, q, seed, plan.shots, clock, plan.horizon)?;
            *self.summary.statuses.entry(record.status).or_insert(0) += 1;
            self.summary.cost += record.cost;
            out.push(record);
        }
        Ok(out)
    }

    fn run_job(
        &self,
        job_id: String,
        q: usize,
        seed: u64,
        shots: u64,
        clock: u64,
        horizon: u64,
    ) -> Result<JobRecord, CliError> {
        let profile = self.provider.profile();
        let mut rec = JobRecord {
            job_id,
            cloud: profile.cloud,
            target: profile.target_name.clone(),
            qubits: q,
            shots,
            seed,
            submitted_at: clock,
            executed_at: None,
            predicted_wait: None,
            actual_wait: None,
            status: JobStatus::Error,
            target_status: profile.target_status(clock).state,
            census: GateCensus::default(),
            counts: None,
            fidelity: None,
            success: None,
            cost: Money::ZERO,
            error_message: None,
        };
        let n = random_input(q, seed);
        let circuit = match build_qft_benchmark(q, n) {
            Ok(c) => c,
            Err(e) => {
                rec.error_message = Some(e.to_string());
                return Ok(rec);
            }
        };
        let outcome = match self.provider.submit(&circuit, shots, clock, seed) {
            Ok(o) => o,
            Err(e) => {
                rec.error_message = Some(e.to_string());
                return Ok(rec);
            }
        };
        match outcome {
            SubmitOutcome::Refused {
                status,
                reason,
                census,
                target_status,
            } => {
                rec.status = status;
                rec.census = census;
                rec.target_status = target_status.state;
                rec.error_message = Some(reason);
            }
            SubmitOutcome::Accepted {
                handle,
                census,
                target_status,
                predicted_wait,
                actual_wait,
                ..
            } => {
                rec.census = census;
                rec.target_status = target_status.state;
                rec.predicted_wait = predicted_wait;
                rec.actual_wait = Some(actual_wait);
                let done = self
                    .provider
                    .completion_time(handle)
                    .map_err(|e| CliError::Other(e.to_string()))?;
                match done.filter(|&d| d <= horizon) {
                    Some(d) => {
                        let r = self
                            .provider
                            .poll(handle, d)
                            .map_err(|e| CliError::Other(e.to_string()))?;
                        rec.status = r.status;
                        rec.error_message = r.error_message;
                        if let Some(counts) = r.counts {
                            let score = benchmark_fidelity(&counts, q, n)
                                .map_err(|e| CliError::Other(e.to_string()))?;
                            rec.executed_at = r.executed_at;
                            rec.fidelity = Some(score.value);
                            rec.success = Some(classify_success(score.value));
                            rec.counts = Some(counts);
                            rec.cost = profile
                                .cost_model
                                .job_cost(&census, shots, q as u64, profile.error_mitigation)
                                .map_err(|e| CliError::Other(e.to_string()))?;
                        }
                    }
                    None => {
                        rec.status = self
                            .provider
                            .cancel(handle, horizon)
                            .map_err(|e| CliError::Other(e.to_string()))?;
                        rec.error_message = Some("not executed before the campaign ended".into());
                    }
                }
            }
        }
        Ok(rec)
    }
}

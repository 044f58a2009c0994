//! Fidelity scoring, the success threshold, zero-order noise inference and
//! campaign aggregation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::ideal_output;
use crate::costing::Money;
use crate::providers::{Cloud, JobStatus};
use crate::simulator::CountsDistribution;
use crate::store::JobRecord;

/// Fidelity cutoff `1/e`; values at or above it count as success.
pub const SUCCESS_THRESHOLD: f64 = 0.367_879_441_171_442_33;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("distribution {0} is empty")]
    EmptyDistribution(&'static str),
    #[error("fidelity {0} outside [0, 1]")]
    FidelityRange(f64),
    #[error("n_2q must be at least 1")]
    NoTwoQubitGates,
    #[error("no records to aggregate")]
    NoGroups,
    #[error("record {0} is not Processed")]
    NotProcessed(String),
    #[error("no records carry both predicted and actual waits")]
    NoWaitPairs,
    #[error("bad benchmark parameters: {0}")]
    Benchmark(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityScore {
    pub value: f64,
    pub shots: u64,
    /// Identifies the ideal distribution, e.g. `delta:0101`.
    pub reference: String,
}

impl FidelityScore {
    pub fn success(&self) -> bool {
        classify_success(self.value)
    }
}

fn normalized<'a, I>(items: I, which: &'static str) -> Result<BTreeMap<&'a str, f64>, AnalysisError>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let items: Vec<(&str, f64)> = items.into_iter().filter(|(_, w)| *w > 0.0).collect();
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(AnalysisError::EmptyDistribution(which));
    }
    let mut out = BTreeMap::new();
    for (k, w) in items {
        *out.entry(k).or_insert(0.0) += w / total;
    }
    Ok(out)
}

/// Squared Bhattacharyya coefficient of two weight maps, each normalized first.
pub fn hellinger_fidelity_weights<'a, P, Q>(p: P, q: Q) -> Result<f64, AnalysisError>
where
    P: IntoIterator<Item = (&'a str, f64)>,
    Q: IntoIterator<Item = (&'a str, f64)>,
{
    let p = normalized(p, "p")?;
    let q = normalized(q, "q")?;
    let bc: f64 = p
        .iter()
        .filter_map(|(k, pk)| q.get(k).map(|qk| (pk * qk).sqrt()))
        .sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}

pub fn hellinger_fidelity(
    p: &CountsDistribution,
    q: &CountsDistribution,
) -> Result<FidelityScore, AnalysisError> {
    fn w(c: &CountsDistribution) -> impl Iterator<Item = (&str, f64)> {
        c.counts().iter().map(|(k, n)| (k.as_str(), *n as f64))
    }
    Ok(FidelityScore {
        value: hellinger_fidelity_weights(w(p), w(q))?,
        shots: p.shots(),
        reference: "counts".into(),
    })
}

/// Fidelity of benchmark counts against the exact delta on the ideal output.
///
/// For a delta reference the Bhattacharyya sum collapses to `√p̂(ideal)`, so
/// the score is the observed frequency of the ideal bitstring.
pub fn benchmark_fidelity(
    counts: &CountsDistribution,
    q: usize,
    n: u64,
) -> Result<FidelityScore, AnalysisError> {
    if counts.shots() == 0 {
        return Err(AnalysisError::EmptyDistribution("counts"));
    }
    let ideal = ideal_output(q, n).map_err(|e| AnalysisError::Benchmark(e.to_string()))?;
    Ok(FidelityScore {
        value: counts.get(&ideal) as f64 / counts.shots() as f64,
        shots: counts.shots(),
        reference: format!("delta:{ideal}"),
    })
}

pub fn classify_success(fidelity: f64) -> bool {
    fidelity >= SUCCESS_THRESHOLD
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitGateEstimate {
    pub f_2qg: f64,
    pub error: f64,
    pub n_2q: u64,
}

/// Inverts `F = f_2qg^n_2q`. A zero overall fidelity gives no estimate.
pub fn infer_f2qg(fidelity: f64, n_2q: u64) -> Result<Option<TwoQubitGateEstimate>, AnalysisError> {
    if n_2q == 0 {
        return Err(AnalysisError::NoTwoQubitGates);
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(AnalysisError::FidelityRange(fidelity));
    }
    if fidelity == 0.0 {
        return Ok(None);
    }
    let f_2qg = fidelity.powf(1.0 / n_2q as f64);
    Ok(Some(TwoQubitGateEstimate {
        f_2qg,
        error: 1.0 - f_2qg,
        n_2q,
    }))
}

/// Removes the uniform floor from an observed ideal-outcome frequency:
/// `p̂ = F + (1 − F)/2^q`, solved for `F` and clamped to `[0, 1]`.
pub fn debias_uniform_floor(observed: f64, q: usize) -> f64 {
    let floor = 0.5f64.powi(q as i32);
    if floor >= 1.0 {
        return observed.clamp(0.0, 1.0);
    }
    ((observed - floor) / (1.0 - floor)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub qubits: usize,
    pub cloud: Cloud,
    pub target: String,
    pub mean_fidelity: f64,
    pub fidelity_std: f64,
    pub job_count: usize,
    pub mean_cost: Money,
    pub cost_std: Money,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per `(qubits, cloud, target)` means and population standard deviations
/// of fidelity and cost, rows sorted by the group key.
pub fn aggregate(records: &[JobRecord]) -> Result<Vec<AggregateRow>, AnalysisError> {
    let mut groups: BTreeMap<(usize, Cloud, &str), Vec<&JobRecord>> = BTreeMap::new();
    for r in records {
        if r.status != JobStatus::Processed {
            return Err(AnalysisError::NotProcessed(r.job_id.clone()));
        }
        groups
            .entry((r.qubits, r.cloud, r.target.as_str()))
            .or_default()
            .push(r);
    }
    if groups.is_empty() {
        return Err(AnalysisError::NoGroups);
    }
    Ok(groups
        .into_iter()
        .map(|((qubits, cloud, target), rs)| {
            let fids: Vec<f64> = rs
                .iter()
                .map(|r| r.fidelity.expect("validated record"))
                .collect();
            let costs: Vec<i64> = rs.iter().map(|r| r.cost.micros()).collect();
            let (mean_fidelity, fidelity_std) = mean_std(&fids);
            let n = costs.len() as i128;
            let sum: i128 = costs.iter().map(|&c| c as i128).sum();
            let mean_micros = (2 * sum + n).div_euclid(2 * n) as i64;
            let mean_exact = sum as f64 / n as f64;
            let var = costs
                .iter()
                .map(|&c| (c as f64 - mean_exact).powi(2))
                .sum::<f64>()
                / n as f64;
            AggregateRow {
                qubits,
                cloud,
                target: target.to_string(),
                mean_fidelity,
                fidelity_std,
                job_count: rs.len(),
                mean_cost: Money::from_micros(mean_micros),
                cost_std: Money::from_micros_f64(var.sqrt()),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitPair {
    pub job_id: String,
    pub predicted: u64,
    pub actual: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueuePredictionReport {
    /// Share of jobs with `predicted > actual` (ties are not overestimates).
    pub fraction_overestimated: f64,
    pub pairs: Vec<WaitPair>,
}

pub fn queue_prediction_report(
    records: &[JobRecord],
) -> Result<QueuePredictionReport, AnalysisError> {
    let pairs: Vec<WaitPair> = records
        .iter()
        .filter_map(|r| {
            Some(WaitPair {
                job_id: r.job_id.clone(),
                predicted: r.predicted_wait?,
                actual: r.actual_wait?,
            })
        })
        .collect();
    if pairs.is_empty() {
        return Err(AnalysisError::NoWaitPairs);
    }
    let over = pairs.iter().filter(|p| p.predicted > p.actual).count();
    Ok(QueuePredictionReport {
        fraction_overestimated: over as f64 / pairs.len() as f64,
        pairs,
    })
}

/// Two-qubit gate error per target, inferred from each Processed record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetErrorRow {
    pub cloud: Cloud,
    pub target: String,
    pub estimates: usize,
    pub no_estimate: usize,
    /// Mean and population std of `1 − f_2qg`.
    pub mean_error: f64,
    pub error_std: f64,
    /// Mean and population std of `log10(1 − f_2qg)` over records with a
    /// positive error.
    pub mean_log10_error: Option<f64>,
    pub log10_error_std: Option<f64>,
}

pub fn error_by_target(records: &[JobRecord]) -> Vec<TargetErrorRow> {
    let mut groups: BTreeMap<(Cloud, &str), (Vec<f64>, usize)> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.status == JobStatus::Processed && r.census.n_2q > 0)
    {
        let Some(f) = r.fidelity else { continue };
        let entry = groups.entry((r.cloud, r.target.as_str())).or_default();
        match infer_f2qg(debias_uniform_floor(f, r.qubits), r.census.n_2q) {
            Ok(Some(est)) => entry.0.push(est.error),
            _ => entry.1 += 1,
        }
    }
    groups
        .into_iter()
        .map(|((cloud, target), (errors, no_estimate))| {
            let (mean_error, error_std) = if errors.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                mean_std(&errors)
            };
            let logs: Vec<f64> = errors
                .iter()
                .filter(|e| **e > 0.0)
                .map(|e| e.log10())
                .collect();
            let (ml, sl) = if logs.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_std(&logs);
                (Some(m), Some(s))
            };
            TargetErrorRow {
                cloud,
                target: target.to_string(),
                estimates: errors.len(),
                no_estimate,
                mean_error,
                error_std,
                mean_log10_error: ml,
                log10_error_std: sl,
            }
        })
        .collect()
}

/// Distinct targets present, in `(cloud, target)` order.
pub fn targets(records: &[JobRecord]) -> BTreeSet<(Cloud, String)> {
    records
        .iter()
        .map(|r| (r.cloud, r.target.clone()))
        .collect()
}

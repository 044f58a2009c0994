//! CSV report files built from store records.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use qbench_core::analysis::{aggregate, error_by_target, queue_prediction_report};
use qbench_core::costing::Money;
use qbench_core::providers::{AvailabilityState, Cloud, JobStatus, SECONDS_PER_DAY};
use qbench_core::store::JobRecord;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    FidelityVsQubits,
    FidelityVsTime,
    CostVsFidelity,
    Availability,
    QueuePrediction,
    Table6,
    ErrorVsTarget,
    JobStatus,
}

impl ReportKind {
    pub const ALL: [ReportKind; 8] = [
        ReportKind::FidelityVsQubits,
        ReportKind::FidelityVsTime,
        ReportKind::CostVsFidelity,
        ReportKind::Availability,
        ReportKind::QueuePrediction,
        ReportKind::Table6,
        ReportKind::ErrorVsTarget,
        ReportKind::JobStatus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReportKind::FidelityVsQubits => "fidelity_vs_qubits",
            ReportKind::FidelityVsTime => "fidelity_vs_time",
            ReportKind::CostVsFidelity => "cost_vs_fidelity",
            ReportKind::Availability => "availability",
            ReportKind::QueuePrediction => "queue_prediction",
            ReportKind::Table6 => "table6",
            ReportKind::ErrorVsTarget => "error_vs_target",
            ReportKind::JobStatus => "job_status",
        }
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReportKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('-', "_");
        ReportKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ReportKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown report {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub kind: ReportKind,
    pub rows: usize,
    pub out: String,
    /// Share of jobs whose published wait exceeded the actual one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_overestimated: Option<f64>,
}

fn fmt6(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.6}")
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Builds the `kind` report over `records` (already filtered, in store
/// order) and writes it to `out`.
pub fn write_report(
    kind: ReportKind,
    records: &[JobRecord],
    out: &Path,
) -> Result<ReportSummary, CliError> {
    let (header, rows, extra) = build(kind, records)?;
    if rows.is_empty() {
        return Err(CliError::EmptyReport(format!(
            "{kind} has no rows for this selection"
        )));
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(&header)?;
    for row in &rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(ReportSummary {
        kind,
        rows: rows.len(),
        out: out.display().to_string(),
        fraction_overestimated: extra,
    })
}

type Table = (Vec<&'static str>, Vec<Vec<String>>, Option<f64>);

pub fn build(kind: ReportKind, records: &[JobRecord]) -> Result<Table, CliError> {
    let processed: Vec<JobRecord> = records
        .iter()
        .filter(|r| r.status == JobStatus::Processed)
        .cloned()
        .collect();
    let empty = || CliError::EmptyReport(format!("{kind} has no rows for this selection"));
    Ok(match kind {
        ReportKind::FidelityVsQubits => (
            vec!["qubits", "cloud", "target", "job_id", "fidelity", "success"],
            processed
                .iter()
                .map(|r| {
                    vec![
                        r.qubits.to_string(),
                        r.cloud.to_string(),
                        r.target.clone(),
                        r.job_id.clone(),
                        fmt6(r.fidelity.unwrap_or(f64::NAN)),
                        opt(r.success),
                    ]
                })
                .collect(),
            None,
        ),
        ReportKind::FidelityVsTime => (
            vec![
                "day",
                "submitted_at",
                "executed_at",
                "cloud",
                "target",
                "qubits",
                "job_id",
                "fidelity",
            ],
            processed
                .iter()
                .map(|r| {
                    vec![
                        (r.submitted_at / SECONDS_PER_DAY).to_string(),
                        r.submitted_at.to_string(),
                        opt(r.executed_at),
                        r.cloud.to_string(),
                        r.target.clone(),
                        r.qubits.to_string(),
                        r.job_id.clone(),
                        fmt6(r.fidelity.unwrap_or(f64::NAN)),
                    ]
                })
                .collect(),
            None,
        ),
        ReportKind::CostVsFidelity | ReportKind::Table6 => {
            if processed.is_empty() {
                return Err(empty());
            }
            let agg = aggregate(&processed).map_err(|e| CliError::Other(e.to_string()))?;
            if kind == ReportKind::CostVsFidelity {
                (
                    vec![
                        "qubits",
                        "cloud",
                        "target",
                        "jobs",
                        "mean_cost",
                        "mean_fidelity",
                    ],
                    agg.iter()
                        .map(|a| {
                            vec![
                                a.qubits.to_string(),
                                a.cloud.to_string(),
                                a.target.clone(),
                                a.job_count.to_string(),
                                a.mean_cost.to_string(),
                                fmt6(a.mean_fidelity),
                            ]
                        })
                        .collect(),
                    None,
                )
            } else {
                (
                    vec![
                        "index", "qubits", "cloud", "target", "fidelity", "fid_std", "jobs",
                        "cost", "cost_std",
                    ],
                    agg.iter()
                        .enumerate()
                        .map(|(i, a)| {
                            vec![
                                i.to_string(),
                                a.qubits.to_string(),
                                a.cloud.to_string(),
                                a.target.clone(),
                                fmt6(a.mean_fidelity),
                                fmt6(a.fidelity_std),
                                a.job_count.to_string(),
                                a.mean_cost.to_string(),
                                a.cost_std.to_string(),
                            ]
                        })
                        .collect(),
                    None,
                )
            }
        }
        ReportKind::Availability => {
            let mut groups: BTreeMap<(Cloud, &str), [u64; 3]> = BTreeMap::new();
            for r in records {
                let slot = match r.target_status {
                    AvailabilityState::Available => 0,
                    AvailabilityState::Degraded => 1,
                    AvailabilityState::Unavailable => 2,
                };
                groups.entry((r.cloud, r.target.as_str())).or_default()[slot] += 1;
            }
            let pct = |n: u64, total: u64| format!("{:.1}", 100.0 * n as f64 / total as f64);
            (
                vec![
                    "cloud",
                    "target",
                    "submissions",
                    "available",
                    "degraded",
                    "unavailable",
                    "available_pct",
                    "degraded_pct",
                    "unavailable_pct",
                ],
                groups
                    .into_iter()
                    .map(|((cloud, target), c)| {
                        let total: u64 = c.iter().sum();
                        vec![
                            cloud.to_string(),
                            target.to_string(),
                            total.to_string(),
                            c[0].to_string(),
                            c[1].to_string(),
                            c[2].to_string(),
                            pct(c[0], total),
                            pct(c[1], total),
                            pct(c[2], total),
                        ]
                    })
                    .collect(),
                None,
            )
        }
        ReportKind::QueuePrediction => {
            let rep = queue_prediction_report(records).map_err(|_| empty())?;
            let by_id: BTreeMap<&str, &JobRecord> =
                records.iter().map(|r| (r.job_id.as_str(), r)).collect();
            (
                vec![
                    "job_id",
                    "cloud",
                    "target",
                    "predicted_wait",
                    "actual_wait",
                    "overestimated",
                ],
                rep.pairs
                    .iter()
                    .map(|p| {
                        let r = by_id[p.job_id.as_str()];
                        vec![
                            p.job_id.clone(),
                            r.cloud.to_string(),
                            r.target.clone(),
                            p.predicted.to_string(),
                            p.actual.to_string(),
                            (p.predicted > p.actual).to_string(),
                        ]
                    })
                    .collect(),
                Some(rep.fraction_overestimated),
            )
        }
        ReportKind::ErrorVsTarget => (
            vec![
                "cloud",
                "target",
                "estimates",
                "no_estimate",
                "mean_error_linear",
                "error_std_linear",
                "mean_log10_error",
                "log10_error_std",
            ],
            error_by_target(&processed)
                .into_iter()
                .map(|e| {
                    vec![
                        e.cloud.to_string(),
                        e.target,
                        e.estimates.to_string(),
                        e.no_estimate.to_string(),
                        fmt6(e.mean_error),
                        fmt6(e.error_std),
                        e.mean_log10_error.map(fmt6).unwrap_or_default(),
                        e.log10_error_std.map(fmt6).unwrap_or_default(),
                    ]
                })
                .collect(),
            None,
        ),
        ReportKind::JobStatus => {
            let mut groups: BTreeMap<(Cloud, &str, JobStatus), (u64, Money)> = BTreeMap::new();
            for r in records {
                let e = groups
                    .entry((r.cloud, r.target.as_str(), r.status))
                    .or_default();
                e.0 += 1;
                e.1 += r.cost;
            }
            (
                vec!["cloud", "target", "status", "jobs", "cost"],
                groups
                    .into_iter()
                    .map(|((cloud, target, status), (jobs, cost))| {
                        vec![
                            cloud.to_string(),
                            target.to_string(),
                            status.to_string(),
                            jobs.to_string(),
                            cost.to_string(),
                        ]
                    })
                    .collect(),
                None,
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ReportKind::ALL {
            assert_eq!(k.name().parse::<ReportKind>().unwrap(), k);
        }
        assert_eq!(
            "fidelity-vs-qubits".parse::<ReportKind>().unwrap(),
            ReportKind::FidelityVsQubits
        );
        assert!("nope".parse::<ReportKind>().is_err());
    }

    #[test]
    fn empty_selection_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        for k in ReportKind::ALL {
            let r = write_report(k, &[], &dir.path().join("x.csv"));
            assert!(matches!(r, Err(CliError::EmptyReport(_))), "{k}");
        }
    }
}

//! Append-only job-record store.
//!
//! One JSON object per line. Records are validated on append, job ids are
//! unique, and a torn final line left by a crash is discarded on open.

use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::SUCCESS_THRESHOLD;
use crate::circuit::GateCensus;
use crate::costing::Money;
use crate::providers::{AvailabilityState, Cloud, JobStatus};
use crate::simulator::CountsDistribution;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store I/O: {0}")]
    Io(#[from] io::Error),
    #[error("duplicate job_id {0:?}")]
    Duplicate(String),
    #[error("invalid record {job_id:?}: {reason}")]
    Invalid { job_id: String, reason: String },
    #[error("corrupt record at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("bad filter {0:?}: {1}")]
    BadFilter(String, String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    pub cloud: Cloud,
    pub target: String,
    pub qubits: usize,
    pub shots: u64,
    /// Benchmark seed; the encoded input is `random_input(qubits, seed)`.
    pub seed: u64,
    pub submitted_at: u64,
    pub executed_at: Option<u64>,
    pub predicted_wait: Option<u64>,
    pub actual_wait: Option<u64>,
    pub status: JobStatus,
    /// Target state at submission.
    pub target_status: AvailabilityState,
    pub census: GateCensus,
    pub counts: Option<CountsDistribution>,
    pub fidelity: Option<f64>,
    pub success: Option<bool>,
    pub cost: Money,
    pub error_message: Option<String>,
}

impl JobRecord {
    pub fn validate(&self) -> Result<(), StoreError> {
        let fail = |reason: &str| {
            Err(StoreError::Invalid {
                job_id: self.job_id.clone(),
                reason: reason.to_string(),
            })
        };
        if self.job_id.is_empty() {
            return fail("empty job_id");
        }
        let processed = self.status == JobStatus::Processed;
        let present = [
            self.counts.is_some(),
            self.fidelity.is_some(),
            self.success.is_some(),
        ];
        if processed && present.contains(&false) {
            return fail("Processed record must carry counts, fidelity and success");
        }
        if !processed && present.contains(&true) {
            return fail("only Processed records carry counts, fidelity or success");
        }
        if let Some(f) = self.fidelity {
            if !(0.0..=1.0).contains(&f) {
                return fail("fidelity outside [0, 1]");
            }
            if self.success != Some(f >= SUCCESS_THRESHOLD) {
                return fail("success disagrees with the fidelity threshold");
            }
        }
        if let Some(c) = &self.counts {
            if c.shots() != self.shots {
                return fail("counts do not sum to shots");
            }
            if c.counts().keys().any(|k| k.len() != self.qubits) {
                return fail("bitstring width differs from qubits");
            }
        }
        if self.status == JobStatus::Error && self.error_message.is_none() {
            return fail("Error record needs an error_message");
        }
        if self.cost.micros() < 0 {
            return fail("negative cost");
        }
        if self.status == JobStatus::Unavailable && self.cost != Money::ZERO {
            return fail("Unavailable record must cost nothing");
        }
        if self.census.total != self.census.n_1q + self.census.n_2q {
            return fail("census total is not n_1q + n_2q");
        }
        Ok(())
    }
}

/// Queryable record fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    JobId,
    Cloud,
    Target,
    Qubits,
    Shots,
    Seed,
    SubmittedAt,
    ExecutedAt,
    PredictedWait,
    ActualWait,
    Status,
    TargetStatus,
    N1q,
    N2q,
    Total,
    Fidelity,
    Success,
    Cost,
    ErrorMessage,
    Counts,
}

impl Field {
    pub const ALL: [Field; 20] = [
        Field::JobId,
        Field::Cloud,
        Field::Target,
        Field::Qubits,
        Field::Shots,
        Field::Seed,
        Field::SubmittedAt,
        Field::ExecutedAt,
        Field::PredictedWait,
        Field::ActualWait,
        Field::Status,
        Field::TargetStatus,
        Field::N1q,
        Field::N2q,
        Field::Total,
        Field::Fidelity,
        Field::Success,
        Field::Cost,
        Field::ErrorMessage,
        Field::Counts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::JobId => "job_id",
            Field::Cloud => "cloud",
            Field::Target => "target",
            Field::Qubits => "qubits",
            Field::Shots => "shots",
            Field::Seed => "seed",
            Field::SubmittedAt => "submitted_at",
            Field::ExecutedAt => "executed_at",
            Field::PredictedWait => "predicted_wait",
            Field::ActualWait => "actual_wait",
            Field::Status => "status",
            Field::TargetStatus => "target_status",
            Field::N1q => "census.n_1q",
            Field::N2q => "census.n_2q",
            Field::Total => "census.total",
            Field::Fidelity => "fidelity",
            Field::Success => "success",
            Field::Cost => "cost",
            Field::ErrorMessage => "error_message",
            Field::Counts => "counts",
        }
    }

    /// Value of this field on `r`, or `None` when absent.
    pub fn value(self, r: &JobRecord) -> Option<Value> {
        let u = |v: u64| Some(Value::Int(v));
        match self {
            Field::JobId => Some(Value::Text(r.job_id.clone())),
            Field::Cloud => Some(Value::Text(r.cloud.to_string())),
            Field::Target => Some(Value::Text(r.target.clone())),
            Field::Qubits => u(r.qubits as u64),
            Field::Shots => u(r.shots),
            Field::Seed => u(r.seed),
            Field::SubmittedAt => u(r.submitted_at),
            Field::ExecutedAt => r.executed_at.and_then(u),
            Field::PredictedWait => r.predicted_wait.and_then(u),
            Field::ActualWait => r.actual_wait.and_then(u),
            Field::Status => Some(Value::Text(r.status.to_string())),
            Field::TargetStatus => Some(Value::Text(r.target_status.to_string())),
            Field::N1q => u(r.census.n_1q),
            Field::N2q => u(r.census.n_2q),
            Field::Total => u(r.census.total),
            Field::Fidelity => r.fidelity.map(Value::Real),
            Field::Success => r.success.map(Value::Bool),
            Field::Cost => Some(Value::Usd(r.cost)),
            Field::ErrorMessage => r.error_message.clone().map(Value::Text),
            Field::Counts => r
                .counts
                .as_ref()
                .map(|c| Value::Text(serde_json::to_string(c.counts()).expect("counts serialize"))),
        }
    }

    fn parse_value(self, raw: &str) -> Result<Value, String> {
        let raw = raw.trim();
        match self {
            Field::JobId | Field::Target | Field::ErrorMessage | Field::Counts => {
                Ok(Value::Text(raw.to_string()))
            }
            Field::Cloud => raw.parse::<Cloud>().map(|c| Value::Text(c.to_string())),
            Field::Status => raw.parse::<JobStatus>().map(|s| Value::Text(s.to_string())),
            Field::TargetStatus => raw
                .parse::<AvailabilityState>()
                .map(|s| Value::Text(s.to_string())),
            Field::Fidelity => raw
                .parse::<f64>()
                .map(Value::Real)
                .map_err(|e| e.to_string()),
            Field::Success => raw
                .parse::<bool>()
                .map(Value::Bool)
                .map_err(|e| e.to_string()),
            Field::Cost => raw
                .parse::<Money>()
                .map(Value::Usd)
                .map_err(|e| e.to_string()),
            _ => raw
                .parse::<u64>()
                .map(Value::Int)
                .map_err(|e| e.to_string()),
        }
    }

    fn ordered(self) -> bool {
        !matches!(
            self,
            Field::JobId
                | Field::Cloud
                | Field::Target
                | Field::Status
                | Field::TargetStatus
                | Field::Success
                | Field::ErrorMessage
                | Field::Counts
        )
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = StoreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let alias = match s {
            "n_1q" => "census.n_1q",
            "n_2q" => "census.n_2q",
            "total" => "census.total",
            other => other,
        };
        Field::ALL
            .into_iter()
            .find(|f| f.name() == alias)
            .ok_or_else(|| StoreError::UnknownField(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Real(f64),
    Bool(bool),
    Usd(Money),
    Text(String),
}

impl Value {
    fn compare(&self, other: &Value) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Real(a), Value::Real(b)) => a.partial_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => Some(a.cmp(b)),
            (Value::Usd(a), Value::Usd(b)) => Some(a.cmp(b)),
            (Value::Text(a), Value::Text(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Usd(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Eq,
    Ne,
    Ge,
    Le,
    Gt,
    Lt,
}

impl Op {
    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Op::Eq => ord == Equal,
            Op::Ne => ord != Equal,
            Op::Ge => ord != Less,
            Op::Le => ord != Greater,
            Op::Gt => ord == Greater,
            Op::Lt => ord == Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub field: Field,
    pub op: Op,
    pub value: Value,
}

impl Predicate {
    pub fn new(field: Field, op: Op, raw: &str) -> Result<Self, StoreError> {
        let text = format!("{field}{raw}");
        if !field.ordered() && !matches!(op, Op::Eq | Op::Ne) {
            return Err(StoreError::BadFilter(
                text,
                format!("{field} supports only = and !="),
            ));
        }
        let value = field
            .parse_value(raw)
            .map_err(|e| StoreError::BadFilter(text, e))?;
        Ok(Predicate { field, op, value })
    }

    /// Absent fields match nothing.
    pub fn matches(&self, r: &JobRecord) -> bool {
        self.field
            .value(r)
            .and_then(|v| v.compare(&self.value))
            .is_some_and(|ord| self.op.holds(ord))
    }
}

impl FromStr for Predicate {
    type Err = StoreError;

    /// Parses `field<op>value` with `op` one of `= != >= <= > <`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let pos = s.find(['=', '!', '<', '>']).ok_or_else(|| {
            StoreError::BadFilter(s.to_string(), "expected field<op>value".into())
        })?;
        let (name, rest) = s.split_at(pos);
        let (op, raw) = [
            (">=", Op::Ge),
            ("<=", Op::Le),
            ("!=", Op::Ne),
            ("=", Op::Eq),
            (">", Op::Gt),
            ("<", Op::Lt),
        ]
        .into_iter()
        .find_map(|(tok, op)| rest.strip_prefix(tok).map(|raw| (op, raw)))
        .ok_or_else(|| StoreError::BadFilter(s.to_string(), "unknown operator".into()))?;
        Predicate::new(name.parse()?, op, raw)
    }
}

/// Conjunction of predicates; empty matches everything.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filter {
    pub predicates: Vec<Predicate>,
}

impl Filter {
    pub fn all() -> Self {
        Filter::default()
    }

    pub fn parse<S: AsRef<str>>(terms: &[S]) -> Result<Self, StoreError> {
        let predicates = terms
            .iter()
            .map(|t| t.as_ref().parse())
            .collect::<Result<_, _>>()?;
        Ok(Filter { predicates })
    }

    pub fn and(mut self, p: Predicate) -> Self {
        self.predicates.push(p);
        self
    }

    pub fn matches(&self, r: &JobRecord) -> bool {
        self.predicates.iter().all(|p| p.matches(r))
    }
}

/// Default CSV columns; everything except the raw counts.
pub const DEFAULT_COLUMNS: [Field; 19] = [
    Field::JobId,
    Field::Cloud,
    Field::Target,
    Field::Qubits,
    Field::Shots,
    Field::Seed,
    Field::SubmittedAt,
    Field::ExecutedAt,
    Field::PredictedWait,
    Field::ActualWait,
    Field::Status,
    Field::TargetStatus,
    Field::N1q,
    Field::N2q,
    Field::Total,
    Field::Fidelity,
    Field::Success,
    Field::Cost,
    Field::ErrorMessage,
];

/// A JSONL store opened for appending.
#[derive(Debug)]
pub struct JobStore {
    path: PathBuf,
    file: File,
    records: Vec<JobRecord>,
    by_id: HashMap<String, usize>,
}

impl JobStore {
    /// Opens or creates the store, discarding a torn final line.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)?;
        let (records, complete_len) = read_records(&mut file)?;
        if file.metadata()?.len() != complete_len {
            file.set_len(complete_len)?;
            file.sync_all()?;
        }
        let mut by_id = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if by_id.insert(r.job_id.clone(), i).is_some() {
                return Err(StoreError::Duplicate(r.job_id.clone()));
            }
        }
        Ok(JobStore {
            path,
            file,
            records,
            by_id,
        })
    }

    /// Reads all complete records without modifying the file.
    pub fn load(path: impl AsRef<Path>) -> Result<Vec<JobRecord>, StoreError> {
        let mut file = File::open(path)?;
        Ok(read_records(&mut file)?.0)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, job_id: &str) -> Option<&JobRecord> {
        self.by_id.get(job_id).map(|&i| &self.records[i])
    }

    pub fn append(&mut self, record: JobRecord) -> Result<(), StoreError> {
        self.append_all(std::iter::once(record))
    }

    /// Validates every record, then writes them with one sync.
    pub fn append_all(
        &mut self,
        records: impl IntoIterator<Item = JobRecord>,
    ) -> Result<(), StoreError> {
        let records: Vec<JobRecord> = records.into_iter().collect();
        let mut seen = std::collections::HashSet::new();
        let mut buf = Vec::new();
        for r in &records {
            r.validate()?;
            if self.by_id.contains_key(&r.job_id) || !seen.insert(r.job_id.as_str()) {
                return Err(StoreError::Duplicate(r.job_id.clone()));
            }
            serde_json::to_writer(&mut buf, r).map_err(io::Error::other)?;
            buf.push(b'\n');
        }
        if buf.is_empty() {
            return Ok(());
        }
        self.file.write_all(&buf)?;
        self.file.sync_data()?;
        for r in records {
            self.by_id.insert(r.job_id.clone(), self.records.len());
            self.records.push(r);
        }
        Ok(())
    }

    /// Records matching `filter`, ordered by `(submitted_at, job_id)`.
    pub fn query(&self, filter: &Filter) -> Vec<JobRecord> {
        query_records(&self.records, filter)
    }

    pub fn export_csv(
        &self,
        filter: &Filter,
        columns: &[Field],
        path: impl AsRef<Path>,
    ) -> Result<usize, StoreError> {
        let rows = self.query(filter);
        let file = File::create(path)?;
        write_csv(&rows, columns, file)?;
        Ok(rows.len())
    }
}

pub fn query_records(records: &[JobRecord], filter: &Filter) -> Vec<JobRecord> {
    let mut out: Vec<JobRecord> = records
        .iter()
        .filter(|r| filter.matches(r))
        .cloned()
        .collect();
    out.sort_by(|a, b| (a.submitted_at, &a.job_id).cmp(&(b.submitted_at, &b.job_id)));
    out
}

pub fn write_csv<W: Write>(
    records: &[JobRecord],
    columns: &[Field],
    out: W,
) -> Result<(), StoreError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns.iter().map(|c| c.name()))?;
    for r in records {
        w.write_record(
            columns
                .iter()
                .map(|c| c.value(r).map(|v| v.to_string()).unwrap_or_default()),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Parses complete lines; returns the records and the byte length they span.
fn read_records(file: &mut File) -> Result<(Vec<JobRecord>, u64), StoreError> {
    file.seek(SeekFrom::Start(0))?;
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut complete = 0u64;
    let mut line = String::new();
    let mut lineno = 0;
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 || !line.ends_with('\n') {
            break;
        }
        lineno += 1;
        complete += n as u64;
        if line.trim().is_empty() {
            continue;
        }
        let r: JobRecord = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            line: lineno,
            reason: e.to_string(),
        })?;
        r.validate().map_err(|e| StoreError::Corrupt {
            line: lineno,
            reason: e.to_string(),
        })?;
        records.push(r);
    }
    Ok((records, complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn record(
        id: &str,
        qubits: usize,
        cloud: Cloud,
        fidelity: Option<f64>,
        submitted_at: u64,
    ) -> JobRecord {
        let processed = fidelity.is_some();
        let counts = processed.then(|| {
            let mut m = BTreeMap::new();
            m.insert("0".repeat(qubits), 300);
            m.insert("1".repeat(qubits), 200);
            CountsDistribution::new(m).unwrap()
        });
        JobRecord {
            job_id: id.to_string(),
            cloud,
            target: "aria1".into(),
            qubits,
            shots: 500,
            seed: 7,
            submitted_at,
            executed_at: processed.then_some(submitted_at + 100),
            predicted_wait: Some(50),
            actual_wait: Some(100),
            status: if processed {
                JobStatus::Processed
            } else {
                JobStatus::Canceled
            },
            target_status: AvailabilityState::Available,
            census: GateCensus::new(10, 20),
            counts,
            fidelity,
            success: fidelity.map(|f| f >= SUCCESS_THRESHOLD),
            cost: Money::from_cents(1530),
            error_message: None,
        }
    }

    #[test]
    fn append_query_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("jobs.jsonl");
        let mut s = JobStore::open(&path).unwrap();
        let a = record("a", 10, Cloud::SimAws, Some(0.8), 5);
        let b = record("b", 12, Cloud::SimAzure, None, 3);
        s.append(a.clone()).unwrap();
        s.append(b.clone()).unwrap();
        assert!(matches!(s.append(a.clone()), Err(StoreError::Duplicate(_))));
        assert_eq!(s.query(&Filter::all()), vec![b.clone(), a.clone()]);
        drop(s);
        let s = JobStore::open(&path).unwrap();
        assert_eq!(s.get("a"), Some(&a));
        assert_eq!(JobStore::load(&path).unwrap(), vec![a, b]);
    }

    #[test]
    fn invariants_enforced() {
        let mut r = record("x", 4, Cloud::SimAws, Some(0.9), 0);
        r.counts = None;
        assert!(r.validate().is_err());
        let mut r = record("x", 4, Cloud::SimAws, Some(0.2), 0);
        r.success = Some(true);
        assert!(r.validate().is_err());
        let mut r = record("x", 4, Cloud::SimAws, None, 0);
        r.status = JobStatus::Unavailable;
        assert!(r.validate().is_err());
        r.cost = Money::ZERO;
        r.validate().unwrap();
        r.status = JobStatus::Error;
        assert!(r.validate().is_err());
        let mut r = record("x", 4, Cloud::SimAws, Some(0.9), 0);
        r.qubits = 5;
        assert!(r.validate().is_err());
    }

    #[test]
    fn torn_line_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("jobs.jsonl");
        let mut s = JobStore::open(&path).unwrap();
        for i in 0..3 {
            s.append(record(&format!("j{i}"), 6, Cloud::SimAws, Some(0.5), i))
                .unwrap();
        }
        drop(s);
        let full = std::fs::read(&path).unwrap();
        let keep = full.len() - 40;
        std::fs::write(&path, &full[..keep]).unwrap();
        assert_eq!(JobStore::load(&path).unwrap().len(), 2);
        let mut s = JobStore::open(&path).unwrap();
        assert_eq!(s.len(), 2);
        s.append(record("j2", 6, Cloud::SimAws, Some(0.5), 2))
            .unwrap();
        drop(s);
        assert_eq!(JobStore::load(&path).unwrap().len(), 3);
    }

    #[test]
    fn filter_parsing() {
        let f = Filter::parse(&[
            "qubits=10",
            "cloud=SimAWS",
            "fidelity>=0.37",
            "cost<=15.30",
            "census.n_2q>5",
        ])
        .unwrap();
        assert_eq!(f.predicates.len(), 5);
        assert!(f.matches(&record("a", 10, Cloud::SimAws, Some(0.5), 0)));
        assert!(!f.matches(&record("a", 10, Cloud::SimAzure, Some(0.5), 0)));
        assert!(!f.matches(&record("a", 10, Cloud::SimAws, None, 0)));
        assert!(matches!(
            "colour=red".parse::<Predicate>(),
            Err(StoreError::UnknownField(_))
        ));
        assert!("cloud>=SimAWS".parse::<Predicate>().is_err());
        assert!("qubits=ten".parse::<Predicate>().is_err());
        assert!("status!=processed"
            .parse::<Predicate>()
            .unwrap()
            .matches(&record("a", 3, Cloud::SimAws, None, 0)));
    }

    #[test]
    fn csv_export_shape() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = JobStore::open(dir.path().join("s.jsonl")).unwrap();
        for i in 0..3 {
            s.append(record(&format!("j{i}"), 6, Cloud::SimAws, Some(0.5), i))
                .unwrap();
        }
        let out = dir.path().join("out.csv");
        assert_eq!(
            s.export_csv(&Filter::all(), &DEFAULT_COLUMNS, &out)
                .unwrap(),
            3
        );
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 4);
        let out2 = dir.path().join("out2.csv");
        s.export_csv(&Filter::all(), &DEFAULT_COLUMNS, &out2)
            .unwrap();
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
        s.export_csv(&Filter::all(), &[Field::JobId, Field::Cost], &out)
            .unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().next(), Some("job_id,cost"));
        assert_eq!(text.lines().nth(1), Some("j0,15.30"));
    }
}

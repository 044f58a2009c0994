//! Lowering to vendor gate-set profiles.
//!
//! Two profiles model the two cloud paths to the same trapped-ion machine:
//!
//! * `efficient` (direct entangler): native `rz`/`rx`/`ry` plus the `zz`
//!   entangler. A controlled phase costs one `zz` and two `rz`.
//! * `redundant` (two-CX): lowers through a generic `{u3, cx}` basis with
//!   `cx` control fixed to the lower index, then spells every `u3` as an
//!   `rz·ry·rz` triple without simplification. A controlled phase costs two
//!   `cx`, so the two-qubit count doubles on controlled-phase populations and
//!   the whole benchmark grows about threefold.
//!
//! Equivalence is up to global phase; the accumulated phase is reported.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{census, Circuit, Gate, GateCensus, GateKind};
use crate::rng;
use crate::simulator::StateVector;

/// Widest circuit [`verify_equivalence`] will check.
pub const MAX_ORACLE_QUBITS: usize = 10;

/// Default total-gate ceiling of the AWS-style path: the midpoint between the
/// redundant-profile totals of the 16- and 18-qubit benchmarks with `n = 0`
/// (3024 and 3798 gates).
pub const DEFAULT_AWS_GATE_LIMIT: u64 = 3411;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranspileError {
    #[error("gate {0} is not supported by profile {1}")]
    UnknownGate(GateKind, String),
    #[error("profile {0} is inconsistent: {1}")]
    BadProfile(String, String),
    #[error("unknown gate-set profile {0:?}")]
    UnknownProfile(String),
    #[error("circuit widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
    #[error("width {0} exceeds the equivalence oracle limit of {MAX_ORACLE_QUBITS}")]
    WidthOverOracleLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpStrategy {
    DirectEntangler,
    TwoCx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSetProfile {
    pub name: String,
    pub native_1q: Vec<GateKind>,
    pub native_2q: GateKind,
    pub cp_strategy: CpStrategy,
}

impl GateSetProfile {
    /// Azure-style path: `zz` entangler, one per controlled phase.
    pub fn efficient() -> Self {
        GateSetProfile {
            name: "efficient".into(),
            native_1q: vec![GateKind::Rz, GateKind::Rx, GateKind::Ry],
            native_2q: GateKind::Zz,
            cp_strategy: CpStrategy::DirectEntangler,
        }
    }

    /// AWS-style path: directed `cx`, two per controlled phase.
    pub fn redundant() -> Self {
        GateSetProfile {
            name: "redundant".into(),
            native_1q: vec![GateKind::Rz, GateKind::Ry],
            native_2q: GateKind::Cx,
            cp_strategy: CpStrategy::TwoCx,
        }
    }

    pub fn by_name(name: &str) -> Result<Self, TranspileError> {
        match name {
            "efficient" => Ok(Self::efficient()),
            "redundant" => Ok(Self::redundant()),
            other => Err(TranspileError::UnknownProfile(other.to_string())),
        }
    }

    pub fn validate(&self) -> Result<(), TranspileError> {
        let bad = |why: &str| Err(TranspileError::BadProfile(self.name.clone(), why.into()));
        match (self.native_2q, self.cp_strategy) {
            (GateKind::Zz, CpStrategy::DirectEntangler) | (GateKind::Cx, CpStrategy::TwoCx) => {}
            (GateKind::Zz | GateKind::Cx, _) => {
                return bad("strategy does not match the entangler")
            }
            _ => return bad("native two-qubit gate must be zz or cx"),
        }
        let needed: &[GateKind] = match self.cp_strategy {
            CpStrategy::DirectEntangler => &[GateKind::Rz, GateKind::Rx, GateKind::Ry],
            CpStrategy::TwoCx => &[GateKind::Rz, GateKind::Ry],
        };
        if let Some(k) = needed.iter().find(|k| !self.native_1q.contains(k)) {
            return bad(&format!("lowering needs native {k}"));
        }
        if self.native_1q.iter().any(|k| k.arity() != 1) {
            return bad("native_1q lists a two-qubit kind");
        }
        Ok(())
    }

    pub fn is_native(&self, kind: GateKind) -> bool {
        kind == self.native_2q || self.native_1q.contains(&kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranspileResult {
    pub circuit: Circuit,
    pub census: GateCensus,
    pub source_census: GateCensus,
    /// Phase `φ` with `source = e^{iφ} · circuit`.
    pub global_phase: f64,
}

struct Lowering {
    out: Vec<Gate>,
    phase: f64,
}

impl Lowering {
    fn emit(&mut self, g: Gate) {
        self.out.push(g);
    }

    /// Emits `u3(θ, φ, λ) = e^{i(φ+λ)/2} rz(φ)·ry(θ)·rz(λ)` as three gates.
    fn u3(&mut self, q: usize, theta: f64, phi: f64, lambda: f64) {
        self.emit(Gate::rz(q, lambda));
        self.emit(Gate::ry(q, theta));
        self.emit(Gate::rz(q, phi));
        self.phase += (phi + lambda) / 2.0;
    }

    fn direct(&mut self, g: &Gate) {
        let t = g.targets();
        let theta = g.angle();
        match g.kind() {
            // X = i·rx(π)
            GateKind::X => {
                self.emit(Gate::rx(t[0], PI));
                self.phase += FRAC_PI_2;
            }
            // H = ry(π/2)·Z = i·ry(π/2)·rz(π)
            GateKind::H => {
                self.emit(Gate::rz(t[0], PI));
                self.emit(Gate::ry(t[0], FRAC_PI_2));
                self.phase += FRAC_PI_2;
            }
            GateKind::P => {
                self.emit(Gate::rz(t[0], theta));
                self.phase += theta / 2.0;
            }
            GateKind::Rz | GateKind::Rx | GateKind::Ry | GateKind::Zz => self.emit(*g),
            // cp(θ) = e^{iθ/4} · rz_a(θ/2) rz_b(θ/2) zz(-θ/2)
            GateKind::Cp => {
                self.emit(Gate::rz(t[0], theta / 2.0));
                self.emit(Gate::rz(t[1], theta / 2.0));
                self.emit(Gate::zz(t[0], t[1], -theta / 2.0));
                self.phase += theta / 4.0;
            }
            GateKind::Cx => {
                self.direct(&Gate::h(t[1]));
                self.direct(&Gate::cp(t[0], t[1], PI));
                self.direct(&Gate::h(t[1]));
            }
            // swap = e^{iπ/4} · exp(-iπ/4 ZZ) exp(-iπ/4 XX) exp(-iπ/4 YY), with
            // XX and YY reached by ry / rx basis changes around a zz.
            GateKind::Swap => {
                let (a, b) = (t[0], t[1]);
                self.emit(Gate::zz(a, b, FRAC_PI_2));
                self.emit(Gate::ry(a, -FRAC_PI_2));
                self.emit(Gate::ry(b, -FRAC_PI_2));
                self.emit(Gate::zz(a, b, FRAC_PI_2));
                self.emit(Gate::ry(a, FRAC_PI_2));
                self.emit(Gate::ry(b, FRAC_PI_2));
                self.emit(Gate::rx(a, -FRAC_PI_2));
                self.emit(Gate::rx(b, -FRAC_PI_2));
                self.emit(Gate::zz(a, b, FRAC_PI_2));
                self.emit(Gate::rx(a, FRAC_PI_2));
                self.emit(Gate::rx(b, FRAC_PI_2));
                self.phase += PI / 4.0;
            }
        }
    }

    fn directed_cx(&mut self, control: usize, target: usize) {
        if control < target {
            self.emit(Gate::cx(control, target));
        } else {
            self.two_cx(&Gate::h(control));
            self.two_cx(&Gate::h(target));
            self.emit(Gate::cx(target, control));
            self.two_cx(&Gate::h(control));
            self.two_cx(&Gate::h(target));
        }
    }

    fn two_cx(&mut self, g: &Gate) {
        let t = g.targets();
        let theta = g.angle();
        match g.kind() {
            GateKind::X => self.u3(t[0], PI, 0.0, PI),
            GateKind::H => self.u3(t[0], FRAC_PI_2, 0.0, PI),
            GateKind::P => self.u3(t[0], 0.0, 0.0, theta),
            // rz(θ) = e^{-iθ/2} p(θ)
            GateKind::Rz => {
                self.u3(t[0], 0.0, 0.0, theta);
                self.phase -= theta / 2.0;
            }
            GateKind::Rx => self.u3(t[0], theta, -FRAC_PI_2, FRAC_PI_2),
            GateKind::Ry => self.u3(t[0], theta, 0.0, 0.0),
            GateKind::Cx => self.directed_cx(t[0], t[1]),
            GateKind::Cp => {
                let (c, x) = (t[0].min(t[1]), t[0].max(t[1]));
                self.u3(c, 0.0, 0.0, theta / 2.0);
                self.emit(Gate::cx(c, x));
                self.u3(x, 0.0, 0.0, -theta / 2.0);
                self.emit(Gate::cx(c, x));
                self.u3(x, 0.0, 0.0, theta / 2.0);
            }
            GateKind::Zz => {
                let (c, x) = (t[0].min(t[1]), t[0].max(t[1]));
                self.emit(Gate::cx(c, x));
                self.two_cx(&Gate::rz(x, theta));
                self.emit(Gate::cx(c, x));
            }
            GateKind::Swap => {
                let (c, x) = (t[0].min(t[1]), t[0].max(t[1]));
                self.emit(Gate::cx(c, x));
                self.directed_cx(x, c);
                self.emit(Gate::cx(c, x));
            }
        }
    }
}

/// Rewrites `c` into the native gates of `profile`.
pub fn transpile(c: &Circuit, profile: &GateSetProfile) -> Result<TranspileResult, TranspileError> {
    profile.validate()?;
    let mut low = Lowering {
        out: Vec::with_capacity(c.len() * 4),
        phase: 0.0,
    };
    for g in c.gates() {
        match profile.cp_strategy {
            CpStrategy::DirectEntangler => low.direct(g),
            CpStrategy::TwoCx => low.two_cx(g),
        }
    }
    if let Some(g) = low.out.iter().find(|g| !profile.is_native(g.kind())) {
        return Err(TranspileError::UnknownGate(g.kind(), profile.name.clone()));
    }
    let circuit = Circuit::from_gates(c.width(), low.out)
        .expect("lowering only touches qubits of the source circuit")
        .with_metadata(c.metadata().copied());
    Ok(TranspileResult {
        census: census(&circuit),
        source_census: census(c),
        circuit,
        global_phase: low.phase,
    })
}

/// Minimum over test inputs of `|⟨ψ_a|ψ_b⟩|²`, where the inputs are the
/// all-zeros state and eight seeded random product states.
pub fn verify_equivalence(a: &Circuit, b: &Circuit) -> Result<f64, TranspileError> {
    if a.width() != b.width() {
        return Err(TranspileError::WidthMismatch(a.width(), b.width()));
    }
    let width = a.width();
    if width > MAX_ORACLE_QUBITS {
        return Err(TranspileError::WidthOverOracleLimit(width));
    }
    let mut rng = rng::stream(0x0e0e_0e0e);
    let mut worst = f64::INFINITY;
    for round in 0..9 {
        let mut prep = Circuit::new(width);
        if round > 0 {
            for q in 0..width {
                prep.push(Gate::ry(q, rng.random_range(0.0..PI))).unwrap();
                prep.push(Gate::rz(q, rng.random_range(-PI..PI))).unwrap();
            }
        }
        let run = |c: &Circuit| {
            let mut sv = StateVector::zero(width).expect("oracle width is below the simulator cap");
            sv.apply_circuit(&prep);
            sv.apply_circuit(c);
            sv
        };
        let overlap = run(a).inner(&run(b)).norm_sqr();
        worst = worst.min(overlap);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitVerdict {
    Accept,
    Reject { total: u64, limit: u64 },
}

/// Rejects iff `census.total > limit`.
pub fn check_gate_limit(census: &GateCensus, limit: u64) -> LimitVerdict {
    if census.total > limit {
        LimitVerdict::Reject {
            total: census.total,
            limit,
        }
    } else {
        LimitVerdict::Accept
    }
}

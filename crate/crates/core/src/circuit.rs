//! Circuit intermediate representation and the QFT increment benchmark.
//!
//! The benchmark prepares `|n⟩`, applies the QFT, shifts every Fourier
//! component by one unit of phase and undoes the QFT, so the ideal
//! measurement is `(n + 1) mod 2^q`. Qubit `i` holds weight `2^i` and
//! bitstrings are printed most significant bit first.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::splitmix64;

/// Largest benchmark width accepted by [`build_qft_benchmark`].
pub const MAX_BENCHMARK_QUBITS: usize = 28;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{kind} acts on {expected} qubit(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("{kind} requires distinct qubits, got {targets:?}")]
    RepeatedQubit { kind: GateKind, targets: Vec<usize> },
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("{kind} angle must be finite")]
    BadAngle { kind: GateKind },
    #[error("{kind} takes an angle")]
    MissingAngle { kind: GateKind },
    #[error("{kind} takes no angle")]
    UnexpectedAngle { kind: GateKind },
    #[error("benchmark width {0} outside 1..={MAX_BENCHMARK_QUBITS}")]
    WidthOutOfRange(usize),
    #[error("input {n} out of range for {q} qubits")]
    InputOutOfRange { q: usize, n: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    H,
    P,
    Rz,
    Rx,
    Ry,
    Cp,
    Cx,
    Zz,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::X,
        GateKind::H,
        GateKind::P,
        GateKind::Rz,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Cp,
        GateKind::Cx,
        GateKind::Zz,
        GateKind::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::X
            | GateKind::H
            | GateKind::P
            | GateKind::Rz
            | GateKind::Rx
            | GateKind::Ry => 1,
            GateKind::Cp | GateKind::Cx | GateKind::Zz | GateKind::Swap => 2,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(
            self,
            GateKind::P | GateKind::Rz | GateKind::Rx | GateKind::Ry | GateKind::Cp | GateKind::Zz
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::P => "p",
            GateKind::Rz => "rz",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Cp => "cp",
            GateKind::Cx => "cx",
            GateKind::Zz => "zz",
            GateKind::Swap => "swap",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single gate application.
///
/// For `cx` the first target is the control. `cp`, `zz` and `swap` are
/// symmetric in their two qubits. Angles are radians; `zz(θ)` is
/// `exp(-iθ/2 Z⊗Z)` and `rz(θ)` is `exp(-iθ/2 Z)`, while `p(θ)` and `cp(θ)`
/// put `e^{iθ}` on `|1⟩` and `|11⟩` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRepr", into = "GateRepr")]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 2],
    theta: f64,
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: GateKind,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

impl TryFrom<GateRepr> for Gate {
    type Error = CircuitError;

    fn try_from(r: GateRepr) -> Result<Self, Self::Error> {
        Gate::new(r.kind, &r.targets, r.theta)
    }
}

impl From<Gate> for GateRepr {
    fn from(g: Gate) -> Self {
        GateRepr {
            kind: g.kind,
            targets: g.targets().to_vec(),
            theta: g.theta(),
        }
    }
}

impl Gate {
    pub fn new(
        kind: GateKind,
        targets: &[usize],
        theta: Option<f64>,
    ) -> Result<Self, CircuitError> {
        if targets.len() != kind.arity() {
            return Err(CircuitError::Arity {
                kind,
                expected: kind.arity(),
                got: targets.len(),
            });
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(CircuitError::RepeatedQubit {
                kind,
                targets: targets.to_vec(),
            });
        }
        let theta = match (kind.has_angle(), theta) {
            (true, Some(t)) if t.is_finite() => t,
            (true, Some(_)) => return Err(CircuitError::BadAngle { kind }),
            (true, None) => return Err(CircuitError::MissingAngle { kind }),
            (false, Some(_)) => return Err(CircuitError::UnexpectedAngle { kind }),
            (false, None) => 0.0,
        };
        let second = if kind.arity() == 2 {
            targets[1]
        } else {
            targets[0]
        };
        Ok(Gate {
            kind,
            qubits: [targets[0], second],
            theta,
        })
    }

    fn one(kind: GateKind, q: usize, theta: f64) -> Self {
        debug_assert!(theta.is_finite());
        Gate {
            kind,
            qubits: [q, q],
            theta,
        }
    }

    fn two(kind: GateKind, a: usize, b: usize, theta: f64) -> Self {
        assert_ne!(a, b, "{kind} needs two distinct qubits");
        debug_assert!(theta.is_finite());
        Gate {
            kind,
            qubits: [a, b],
            theta,
        }
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, 0.0)
    }
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, 0.0)
    }
    pub fn p(q: usize, theta: f64) -> Self {
        Self::one(GateKind::P, q, theta)
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rz, q, theta)
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rx, q, theta)
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Ry, q, theta)
    }
    pub fn cp(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::Cp, a, b, theta)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::Cx, control, target, 0.0)
    }
    pub fn zz(a: usize, b: usize, theta: f64) -> Self {
        Self::two(GateKind::Zz, a, b, theta)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::two(GateKind::Swap, a, b, 0.0)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn theta(&self) -> Option<f64> {
        self.kind.has_angle().then_some(self.theta)
    }

    /// Angle, or zero for fixed gates.
    pub fn angle(&self) -> f64 {
        self.theta
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    /// The inverse gate. Every IR kind is closed under inversion.
    pub fn inverse(&self) -> Gate {
        match self.kind {
            GateKind::X | GateKind::H | GateKind::Cx | GateKind::Swap => *self,
            _ => Gate {
                theta: -self.theta,
                ..*self
            },
        }
    }
}

/// Parameters of a generated benchmark, carried through transpilation so the
/// ideal answer is known without simulating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkMeta {
    pub q: usize,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// An ordered gate list over `width` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr")]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    metadata: Option<BenchmarkMeta>,
}

#[derive(Deserialize)]
struct CircuitRepr {
    width: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    metadata: Option<BenchmarkMeta>,
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = CircuitError;

    fn try_from(r: CircuitRepr) -> Result<Self, Self::Error> {
        let mut c = Circuit::new(r.width);
        c.metadata = r.metadata;
        for g in r.gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
            metadata: None,
        }
    }

    pub fn from_gates(
        width: usize,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&qubit) = gate.targets().iter().find(|&&t| t >= self.width) {
            return Err(CircuitError::QubitOutOfRange {
                qubit,
                width: self.width,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), CircuitError> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn metadata(&self) -> Option<&BenchmarkMeta> {
        self.metadata.as_ref()
    }

    pub fn with_metadata(mut self, meta: Option<BenchmarkMeta>) -> Self {
        self.metadata = meta;
        self
    }

    /// The circuit that undoes this one.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            metadata: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Counts of one- and two-qubit gates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateCensus {
    pub n_1q: u64,
    pub n_2q: u64,
    pub total: u64,
}

impl GateCensus {
    pub fn new(n_1q: u64, n_2q: u64) -> Self {
        GateCensus {
            n_1q,
            n_2q,
            total: n_1q + n_2q,
        }
    }
}

pub fn census(c: &Circuit) -> GateCensus {
    let n_2q = c.gates().iter().filter(|g| g.is_two_qubit()).count() as u64;
    GateCensus::new(c.len() as u64 - n_2q, n_2q)
}

fn check_input(q: usize, n: u64) -> Result<(), CircuitError> {
    if q == 0 || q > MAX_BENCHMARK_QUBITS {
        return Err(CircuitError::WidthOutOfRange(q));
    }
    if n >> q != 0 {
        return Err(CircuitError::InputOutOfRange { q, n });
    }
    Ok(())
}

/// QFT ladder on `q` qubits with terminal swaps, mapping `|n⟩` to
/// `Σ_k e^{2πi nk/2^q} |k⟩ / √2^q`.
pub fn qft_gates(q: usize) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(q * (q + 1) / 2 + q / 2);
    for j in (0..q).rev() {
        gates.push(Gate::h(j));
        for k in (0..j).rev() {
            gates.push(Gate::cp(j, k, PI / 2f64.powi((j - k) as i32)));
        }
    }
    for i in 0..q / 2 {
        gates.push(Gate::swap(i, q - 1 - i));
    }
    gates
}

/// Mirror inverse of [`qft_gates`].
pub fn inverse_qft_gates(q: usize) -> Vec<Gate> {
    qft_gates(q).iter().rev().map(Gate::inverse).collect()
}

/// Phase shifts taking the Fourier image of `|n⟩` to that of `|n + 1⟩`.
pub fn increment_gates(q: usize) -> Vec<Gate> {
    let modulus = 2f64.powi(q as i32);
    (0..q)
        .map(|i| Gate::p(i, 2.0 * PI * 2f64.powi(i as i32) / modulus))
        .collect()
}

/// Builds the increment benchmark for input `n` on `q` qubits: basis
/// preparation, QFT, increment phases, inverse QFT.
pub fn build_qft_benchmark(q: usize, n: u64) -> Result<Circuit, CircuitError> {
    check_input(q, n)?;
    let mut c = Circuit::new(q);
    c.extend((0..q).filter(|&i| (n >> i) & 1 == 1).map(Gate::x))?;
    c.extend(qft_gates(q))?;
    c.extend(increment_gates(q))?;
    c.extend(inverse_qft_gates(q))?;
    Ok(c.with_metadata(Some(BenchmarkMeta { q, n, seed: None })))
}

/// Renders a basis index as a `q`-character bitstring, most significant bit first.
pub fn format_bits(index: u64, q: usize) -> String {
    (0..q)
        .rev()
        .map(|i| if (index >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a bitstring produced by [`format_bits`].
pub fn parse_bits(bits: &str) -> Option<u64> {
    if bits.is_empty() || bits.len() > 64 {
        return None;
    }
    bits.chars().try_fold(0u64, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some((acc << 1) | 1),
        _ => None,
    })
}

/// Index of the ideal benchmark outcome, `(n + 1) mod 2^q`.
pub fn ideal_index(q: usize, n: u64) -> Result<u64, CircuitError> {
    check_input(q, n)?;
    Ok((n + 1) & ((1u64 << q) - 1))
}

/// Ideal benchmark outcome as a bitstring.
pub fn ideal_output(q: usize, n: u64) -> Result<String, CircuitError> {
    Ok(format_bits(ideal_index(q, n)?, q))
}

/// Deterministic benchmark input for `(q, seed)`, uniform over `[0, 2^q)`.
pub fn random_input(q: usize, seed: u64) -> u64 {
    assert!(q >= 1, "random_input needs at least one qubit");
    let z = splitmix64(seed ^ ((q as u64) << 56));
    if q >= 64 {
        z
    } else {
        z >> (64 - q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_kind(c: &Circuit, kind: GateKind) -> usize {
        c.gates().iter().filter(|g| g.kind() == kind).count()
    }

    #[test]
    fn ideal_output_examples() {
        assert_eq!(ideal_output(3, 2).unwrap(), "011");
        assert_eq!(ideal_output(3, 7).unwrap(), "000");
        assert_eq!(ideal_output(10, 511).unwrap(), "1000000000");
        assert!(matches!(
            ideal_output(3, 8),
            Err(CircuitError::InputOutOfRange { .. })
        ));
    }

    #[test]
    fn benchmark_rejects_bad_inputs() {
        assert_eq!(
            build_qft_benchmark(0, 0),
            Err(CircuitError::WidthOutOfRange(0))
        );
        assert_eq!(
            build_qft_benchmark(29, 0),
            Err(CircuitError::WidthOutOfRange(29))
        );
        assert!(matches!(
            build_qft_benchmark(4, 16),
            Err(CircuitError::InputOutOfRange { .. })
        ));
        assert!(build_qft_benchmark(28, (1 << 28) - 1).is_ok());
    }

    #[test]
    fn benchmark_gate_counts_q4() {
        // Enumerated by hand: the ladder on 4 qubits has CP pairs
        // (3,2) (3,1) (3,0) (2,1) (2,0) (1,0) and swaps (0,3) (1,2).
        let ladder = Circuit::from_gates(4, qft_gates(4)).unwrap();
        assert_eq!(count_kind(&ladder, GateKind::Cp), 6);
        assert_eq!(count_kind(&ladder, GateKind::Swap), 2);
        assert_eq!(count_kind(&ladder, GateKind::H), 4);

        let c = build_qft_benchmark(4, 5).unwrap();
        assert_eq!(count_kind(&c, GateKind::Cp), 12);
        assert_eq!(count_kind(&c, GateKind::Swap), 4);
        // 5 = 0b0101 sets qubits 0 and 2.
        assert_eq!(count_kind(&c, GateKind::X), 2);
        assert_eq!(c.gates()[0].targets(), &[0]);
        assert_eq!(c.gates()[1].targets(), &[2]);

        let zero = census(&build_qft_benchmark(4, 0).unwrap());
        assert_eq!(zero.n_2q, 12 + 4);
        assert_eq!(zero.n_1q, 8 + 4);
    }

    #[test]
    fn census_examples() {
        assert_eq!(census(&Circuit::new(3)), GateCensus::new(0, 0));
        let c = Circuit::from_gates(2, [Gate::h(0), Gate::cx(0, 1)]).unwrap();
        assert_eq!(
            census(&c),
            GateCensus {
                n_1q: 1,
                n_2q: 1,
                total: 2
            }
        );
    }

    #[test]
    fn census_grows_quadratically() {
        let totals: Vec<f64> = [8usize, 16, 24]
            .iter()
            .map(|&q| census(&build_qft_benchmark(q, 0).unwrap()).total as f64 / (q * q) as f64)
            .collect();
        for t in totals {
            assert!((1.0..3.0).contains(&t), "total/q^2 = {t}");
        }
    }

    #[test]
    fn inverse_ladder_mirrors_forward() {
        let fwd = qft_gates(5);
        let inv = inverse_qft_gates(5);
        assert_eq!(fwd.len(), inv.len());
        for (a, b) in fwd.iter().zip(inv.iter().rev()) {
            assert_eq!(a.kind(), b.kind());
            assert_eq!(a.targets(), b.targets());
            assert_eq!(a.angle(), -b.angle());
        }
    }

    #[test]
    fn increment_angles() {
        let inc = increment_gates(3);
        let angles: Vec<f64> = inc.iter().map(Gate::angle).collect();
        assert_eq!(angles, vec![PI / 4.0, PI / 2.0, PI]);
    }

    #[test]
    fn gate_validation() {
        assert!(matches!(
            Gate::new(GateKind::Cx, &[1], None),
            Err(CircuitError::Arity { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::Cp, &[1, 1], Some(0.3)),
            Err(CircuitError::RepeatedQubit { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::Rz, &[0], Some(f64::NAN)),
            Err(CircuitError::BadAngle { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::H, &[0], Some(1.0)),
            Err(CircuitError::UnexpectedAngle { .. })
        ));
        let mut c = Circuit::new(2);
        assert_eq!(
            c.push(Gate::cx(0, 2)),
            Err(CircuitError::QubitOutOfRange { qubit: 2, width: 2 })
        );
    }

    #[test]
    fn json_shape() {
        let c = Circuit::from_gates(2, [Gate::h(0), Gate::cp(0, 1, 0.5)]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["width"], 2);
        assert_eq!(
            v["gates"][0],
            serde_json::json!({"kind": "h", "targets": [0]})
        );
        assert_eq!(
            v["gates"][1],
            serde_json::json!({"kind": "cp", "targets": [0, 1], "theta": 0.5})
        );
        let bad = r#"{"width":1,"gates":[{"kind":"cx","targets":[0,1]}]}"#;
        assert!(Circuit::from_json(bad).is_err());
    }

    #[test]
    fn random_input_examples() {
        assert_eq!(random_input(8, 99), random_input(8, 99));
        let seen: std::collections::BTreeSet<u64> = (0..1000).map(|s| random_input(1, s)).collect();
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        let mean = (0..10_000).map(|s| random_input(8, s) as f64).sum::<f64>() / 10_000.0;
        assert!((mean - 127.5).abs() < 10.0, "mean {mean}");
        assert!((0..1000).all(|s| random_input(5, s) < 32));
    }

    #[test]
    fn bit_formatting() {
        assert_eq!(format_bits(6, 4), "0110");
        assert_eq!(parse_bits("0110"), Some(6));
        assert_eq!(parse_bits("01x0"), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
            let one = (
                0..width,
                prop::sample::select(vec![
                    GateKind::X,
                    GateKind::H,
                    GateKind::P,
                    GateKind::Rz,
                    GateKind::Rx,
                    GateKind::Ry,
                ]),
                -10.0f64..10.0,
            )
                .prop_map(|(q, k, t)| Gate::new(k, &[q], k.has_angle().then_some(t)).unwrap());
            let two = (
                0..width,
                1..width,
                prop::sample::select(vec![
                    GateKind::Cp,
                    GateKind::Cx,
                    GateKind::Zz,
                    GateKind::Swap,
                ]),
                -10.0f64..10.0,
            )
                .prop_map(move |(a, off, k, t)| {
                    Gate::new(k, &[a, (a + off) % width], k.has_angle().then_some(t)).unwrap()
                });
            prop_oneof![one, two]
        }

        proptest! {
            #[test]
            fn json_round_trip_preserves_gates(gates in prop::collection::vec(arb_gate(5), 0..40)) {
                let c = Circuit::from_gates(5, gates).unwrap()
                    .with_metadata(Some(BenchmarkMeta { q: 5, n: 3, seed: Some(9) }));
                let back = Circuit::from_json(&c.to_json()).unwrap();
                prop_assert_eq!(back, c);
            }
        }
    }
}

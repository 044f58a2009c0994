//! Exact statevector simulation, shot sampling and the two noise channels.
//!
//! `GlobalDepolarizing` realizes the zero-order model at the distribution
//! level: a shot is drawn from the ideal distribution with probability
//! `f^n` (`n` two-qubit gates) and is uniformly random otherwise.
//! `PauliTrajectory` inserts a random non-identity two-qubit Pauli after each
//! two-qubit gate with probability `p`, independently per shot.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{census, format_bits, parse_bits, Circuit, Gate, GateKind};
use crate::rng;

/// Widest register the statevector simulator accepts (2^24 amplitudes, 256 MiB).
pub const MAX_SIM_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulatorError {
    #[error("circuit width {width} exceeds the simulator limit of {limit} qubits")]
    WidthOverLimit { width: usize, limit: usize },
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),
    #[error("shots must be at least 1")]
    NoShots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self, SimulatorError> {
        if width > MAX_SIM_QUBITS {
            return Err(SimulatorError::WidthOverLimit {
                width,
                limit: MAX_SIM_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(
            self.width, other.width,
            "inner product of mismatched registers"
        );
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_circuit(&mut self, c: &Circuit) {
        assert!(c.width() <= self.width, "circuit wider than register");
        for g in c.gates() {
            self.apply(g);
        }
    }

    pub fn apply(&mut self, g: &Gate) {
        let t = g.targets();
        let theta = g.angle();
        match g.kind() {
            GateKind::X => self.for_pairs(t[0], std::mem::swap),
            GateKind::H => self.for_pairs(t[0], |a0, a1| {
                let (x, y) = (*a0, *a1);
                *a0 = (x + y) * FRAC_1_SQRT_2;
                *a1 = (x - y) * FRAC_1_SQRT_2;
            }),
            GateKind::P => {
                let ph = Complex64::from_polar(1.0, theta);
                self.for_pairs(t[0], |_, a1| *a1 *= ph);
            }
            GateKind::Rz => {
                let lo = Complex64::from_polar(1.0, -theta / 2.0);
                let hi = Complex64::from_polar(1.0, theta / 2.0);
                self.for_pairs(t[0], |a0, a1| {
                    *a0 *= lo;
                    *a1 *= hi;
                });
            }
            GateKind::Rx => {
                let (s, c) = (theta / 2.0).sin_cos();
                let mis = Complex64::new(0.0, -s);
                self.for_pairs(t[0], |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = x * c + y * mis;
                    *a1 = x * mis + y * c;
                });
            }
            GateKind::Ry => {
                let (s, c) = (theta / 2.0).sin_cos();
                self.for_pairs(t[0], |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = x * c - y * s;
                    *a1 = x * s + y * c;
                });
            }
            GateKind::Cp => {
                let mask = (1 << t[0]) | (1 << t[1]);
                let ph = Complex64::from_polar(1.0, theta);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= ph;
                    }
                }
            }
            GateKind::Zz => {
                let (ma, mb) = (1 << t[0], 1 << t[1]);
                let even = Complex64::from_polar(1.0, -theta / 2.0);
                let odd = Complex64::from_polar(1.0, theta / 2.0);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let parity = ((i & ma) != 0) ^ ((i & mb) != 0);
                    *a *= if parity { odd } else { even };
                }
            }
            GateKind::Cx => {
                let (mc, mt) = (1 << t[0], 1 << t[1]);
                for i in 0..self.amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amps.swap(i, i | mt);
                    }
                }
            }
            GateKind::Swap => {
                let (ma, mb) = (1 << t[0], 1 << t[1]);
                for i in 0..self.amps.len() {
                    if i & ma != 0 && i & mb == 0 {
                        self.amps.swap(i, (i & !ma) | mb);
                    }
                }
            }
        }
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: u8) {
        match pauli {
            1 => self.for_pairs(qubit, std::mem::swap),
            2 => self.for_pairs(qubit, |a0, a1| {
                let (x, y) = (*a0, *a1);
                *a0 = Complex64::new(y.im, -y.re);
                *a1 = Complex64::new(-x.im, x.re);
            }),
            3 => self.for_pairs(qubit, |_, a1| *a1 = -*a1),
            _ => {}
        }
    }

    fn for_pairs(&mut self, qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << qubit;
        for block in self.amps.chunks_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a0, a1);
            }
        }
    }
}

/// Applies `c` to `|0…0⟩`.
pub fn run_statevector(c: &Circuit) -> Result<StateVector, SimulatorError> {
    let mut sv = StateVector::zero(c.width())?;
    sv.apply_circuit(c);
    Ok(sv)
}

/// Measured bitstring counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CountsRepr")]
pub struct CountsDistribution {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

#[derive(Deserialize)]
struct CountsRepr {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl TryFrom<CountsRepr> for CountsDistribution {
    type Error = String;

    fn try_from(r: CountsRepr) -> Result<Self, Self::Error> {
        CountsDistribution::new(r.counts).and_then(|c| {
            if c.shots == r.shots {
                Ok(c)
            } else {
                Err(format!(
                    "counts sum to {} but shots is {}",
                    c.shots, r.shots
                ))
            }
        })
    }
}

impl CountsDistribution {
    /// Builds a distribution, checking that keys are bitstrings of one length.
    /// Zero-count entries are dropped.
    pub fn new(counts: BTreeMap<String, u64>) -> Result<Self, String> {
        let mut width = None;
        for key in counts.keys() {
            if parse_bits(key).is_none() {
                return Err(format!("{key:?} is not a bitstring"));
            }
            match width {
                None => width = Some(key.len()),
                Some(w) if w != key.len() => return Err("bitstrings differ in length".into()),
                _ => {}
            }
        }
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        let shots = counts.values().sum();
        Ok(CountsDistribution { counts, shots })
    }

    fn from_indices(width: usize, hist: HashMap<u64, u64>) -> Self {
        let counts: BTreeMap<String, u64> = hist
            .into_iter()
            .map(|(i, n)| (format_bits(i, width), n))
            .collect();
        let shots = counts.values().sum();
        CountsDistribution { counts, shots }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }
}

/// The noiseless output distribution of a circuit, either simulated or known
/// in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum IdealDistribution {
    Dense { width: usize, probs: Vec<f64> },
    Delta { width: usize, index: u64 },
}

impl IdealDistribution {
    pub fn from_statevector(sv: &StateVector) -> Self {
        IdealDistribution::Dense {
            width: sv.width(),
            probs: sv.probabilities(),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            IdealDistribution::Dense { width, .. } | IdealDistribution::Delta { width, .. } => {
                *width
            }
        }
    }

    fn sampler(&self) -> Sampler<'_> {
        match self {
            IdealDistribution::Delta { index, .. } => Sampler::Delta(*index),
            IdealDistribution::Dense { probs, .. } => {
                let mut acc = 0.0;
                let cdf: Vec<f64> = probs
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                Sampler::Cdf { cdf, probs }
            }
        }
    }
}

enum Sampler<'a> {
    Delta(u64),
    Cdf { cdf: Vec<f64>, probs: &'a [f64] },
}

impl Sampler<'_> {
    fn draw<R: Rng>(&self, rng: &mut R) -> u64 {
        match self {
            Sampler::Delta(i) => *i,
            Sampler::Cdf { cdf, probs } => {
                let total = *cdf.last().expect("non-empty distribution");
                let u = rng.random::<f64>() * total;
                let mut i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                // Never land on a zero-probability outcome through rounding.
                while probs[i] == 0.0 && i > 0 {
                    i -= 1;
                }
                i as u64
            }
        }
    }
}

/// Multinomial sample of `shots` measurements of `sv`.
///
/// Panics if `shots` is zero.
pub fn sample(sv: &StateVector, shots: u64, seed: u64) -> CountsDistribution {
    assert!(shots >= 1, "sample needs at least one shot");
    sample_ideal(&IdealDistribution::from_statevector(sv), shots, seed)
}

/// Multinomial sample of an ideal distribution.
pub fn sample_ideal(ideal: &IdealDistribution, shots: u64, seed: u64) -> CountsDistribution {
    let sampler = ideal.sampler();
    let mut rng = rng::stream(seed);
    let mut hist = HashMap::new();
    for _ in 0..shots {
        *hist.entry(sampler.draw(&mut rng)).or_insert(0) += 1;
    }
    CountsDistribution::from_indices(ideal.width(), hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseSpec {
    None,
    GlobalDepolarizing { f_2qg: f64 },
    PauliTrajectory { p: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), SimulatorError> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::GlobalDepolarizing { f_2qg } if f_2qg > 0.0 && f_2qg <= 1.0 => Ok(()),
            NoiseSpec::GlobalDepolarizing { f_2qg } => Err(SimulatorError::InvalidNoise(format!(
                "two-qubit gate fidelity {f_2qg} outside (0, 1]"
            ))),
            NoiseSpec::PauliTrajectory { p } if (0.0..1.0).contains(&p) => Ok(()),
            NoiseSpec::PauliTrajectory { p } => Err(SimulatorError::InvalidNoise(format!(
                "error probability {p} outside [0, 1)"
            ))),
        }
    }
}

/// Zero-order mixture sampling: ideal with probability `f_2qg^n_2q`, uniform otherwise.
pub fn sample_global_depolarizing(
    ideal: &IdealDistribution,
    n_2q: u64,
    f_2qg: f64,
    shots: u64,
    seed: u64,
) -> Result<CountsDistribution, SimulatorError> {
    NoiseSpec::GlobalDepolarizing { f_2qg }.validate()?;
    if shots == 0 {
        return Err(SimulatorError::NoShots);
    }
    let keep = f_2qg.powf(n_2q as f64);
    let width = ideal.width();
    let sampler = ideal.sampler();
    let mut rng = rng::stream(seed);
    let mut hist = HashMap::new();
    for _ in 0..shots {
        let outcome = if keep >= 1.0 || rng.random::<f64>() < keep {
            sampler.draw(&mut rng)
        } else if width == 0 {
            0
        } else {
            rng.random::<u64>() >> (64 - width)
        };
        *hist.entry(outcome).or_insert(0) += 1;
    }
    Ok(CountsDistribution::from_indices(width, hist))
}

/// Runs `c` under `noise` and measures `shots` times.
pub fn run_noisy(
    c: &Circuit,
    noise: NoiseSpec,
    shots: u64,
    seed: u64,
) -> Result<CountsDistribution, SimulatorError> {
    noise.validate()?;
    if shots == 0 {
        return Err(SimulatorError::NoShots);
    }
    let ideal = IdealDistribution::from_statevector(&run_statevector(c)?);
    match noise {
        NoiseSpec::None => Ok(sample_ideal(&ideal, shots, seed)),
        NoiseSpec::GlobalDepolarizing { f_2qg } => {
            sample_global_depolarizing(&ideal, census(c).n_2q, f_2qg, shots, seed)
        }
        NoiseSpec::PauliTrajectory { p } => Ok(pauli_trajectories(c, &ideal, p, shots, seed)),
    }
}

fn pauli_trajectories(
    c: &Circuit,
    ideal: &IdealDistribution,
    p: f64,
    shots: u64,
    seed: u64,
) -> CountsDistribution {
    let sampler = ideal.sampler();
    let mut rng = rng::stream(seed);
    let mut hist = HashMap::new();
    let two_qubit_slots: Vec<usize> = c
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_two_qubit())
        .map(|(i, _)| i)
        .collect();
    for _ in 0..shots {
        // Error pattern for this shot: gate index -> (pauli on first, pauli on second).
        let mut faults: HashMap<usize, (u8, u8)> = HashMap::new();
        if p > 0.0 {
            for &slot in &two_qubit_slots {
                if rng.random::<f64>() < p {
                    let code = rng.random_range(1u8..16);
                    faults.insert(slot, (code >> 2, code & 3));
                }
            }
        }
        let outcome = if faults.is_empty() {
            sampler.draw(&mut rng)
        } else {
            let mut sv = StateVector::zero(c.width()).expect("width checked by caller");
            for (i, g) in c.gates().iter().enumerate() {
                sv.apply(g);
                if let Some(&(pa, pb)) = faults.get(&i) {
                    let t = g.targets();
                    sv.apply_pauli(t[0], pa);
                    sv.apply_pauli(t[1], pb);
                }
            }
            IdealDistribution::from_statevector(&sv)
                .sampler()
                .draw(&mut rng)
        };
        *hist.entry(outcome).or_insert(0) += 1;
    }
    CountsDistribution::from_indices(c.width(), hist)
}

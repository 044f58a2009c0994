//! Billing models and exact money arithmetic.
//!
//! Amounts are integer micro-USD. Cent rounding (half up) happens only when
//! an amount is rendered.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::GateCensus;

const MICROS_PER_USD: i64 = 1_000_000;

/// HQC credits are kept as an integer count of 1/5000 credit.
const HQC_DENOMINATOR: u64 = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("cannot parse {0:?} as a USD amount with at most six decimals")]
    BadAmount(String),
    #[error("price {0} is negative")]
    NegativePrice(String),
    #[error("{0} must be at least 1")]
    ZeroQuantity(&'static str),
    #[error("price table: {0}")]
    Table(String),
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_micros(micros: i64) -> Self {
        Money(micros)
    }

    pub fn from_cents(cents: i64) -> Self {
        Money(cents * 10_000)
    }

    pub fn micros(self) -> i64 {
        self.0
    }

    /// Cents, rounded half away from zero.
    pub fn cents(self) -> i64 {
        let m = self.0;
        if m >= 0 {
            (m + 5_000) / 10_000
        } else {
            -((-m + 5_000) / 10_000)
        }
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_USD as f64
    }

    /// Rounds a real-valued micro-USD amount half up.
    pub fn from_micros_f64(micros: f64) -> Self {
        Money((micros + 0.5).floor() as i64)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.cents();
        let sign = if c < 0 { "-" } else { "" };
        write!(f, "{sign}{}.{:02}", c.abs() / 100, c.abs() % 100)
    }
}

impl FromStr for Money {
    type Err = CostError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CostError::BadAmount(s.to_string());
        let t = s.trim().trim_start_matches('$');
        let (neg, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (whole, frac) = t.split_once('.').unwrap_or((t, ""));
        if whole.is_empty() && frac.is_empty() || frac.len() > 6 {
            return Err(bad());
        }
        if !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_micros: i64 = format!("{frac:0<6}").parse().map_err(|_| bad())?;
        let micros = whole
            .checked_mul(MICROS_PER_USD)
            .and_then(|w| w.checked_add(frac_micros))
            .ok_or_else(bad)?;
        Ok(Money(if neg { -micros } else { micros }))
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

mod usd_string {
    use super::Money;
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Money, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Number(x) => format!("{x}"),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// H-System Quantum Credits as an exact multiple of 1/5000.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HqcCredits {
    fifth_millis: u64,
}

impl HqcCredits {
    pub fn from_tenths(tenths: u64) -> Self {
        HqcCredits {
            fifth_millis: tenths * (HQC_DENOMINATOR / 10),
        }
    }

    /// Numerator over 5000.
    pub fn numerator(self) -> u64 {
        self.fifth_millis
    }

    pub fn as_f64(self) -> f64 {
        self.fifth_millis as f64 / HQC_DENOMINATOR as f64
    }

    /// Tenths of a credit, rounded half up.
    pub fn tenths(self) -> u64 {
        (self.fifth_millis + 250) / 500
    }
}

impl fmt::Display for HqcCredits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tenths();
        write!(f, "{}.{}", t / 10, t % 10)
    }
}

/// `HQC = 5 + C·(n_1q + n_2q + 5N)/5000`.
pub fn hqc(census: &GateCensus, shots: u64, n_prep_measure: u64) -> Result<HqcCredits, CostError> {
    if shots == 0 {
        return Err(CostError::ZeroQuantity("shots"));
    }
    let variable = shots * (census.n_1q + census.n_2q + 5 * n_prep_measure);
    Ok(HqcCredits {
        fifth_millis: 5 * HQC_DENOMINATOR + variable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CostModel {
    AzureIonq {
        p1: Money,
        p2: Money,
        min_plain: Money,
        min_mitigated: Money,
    },
    QuantinuumHqc {
        usd_per_hqc: Money,
        is_emulator: bool,
    },
    AwsPerShot {
        per_task: Money,
        per_shot: Money,
    },
}

impl CostModel {
    pub fn validate(&self) -> Result<(), CostError> {
        let prices: Vec<Money> = match *self {
            CostModel::AzureIonq {
                p1,
                p2,
                min_plain,
                min_mitigated,
            } => vec![p1, p2, min_plain, min_mitigated],
            CostModel::QuantinuumHqc { usd_per_hqc, .. } => vec![usd_per_hqc],
            CostModel::AwsPerShot { per_task, per_shot } => vec![per_task, per_shot],
        };
        match prices.into_iter().find(|p| p.micros() < 0) {
            Some(p) => Err(CostError::NegativePrice(p.to_string())),
            None => Ok(()),
        }
    }

    /// Cost of one job: one task, `shots` shots, `width` measured qubits.
    pub fn job_cost(
        &self,
        census: &GateCensus,
        shots: u64,
        width: u64,
        error_mitigation: bool,
    ) -> Result<Money, CostError> {
        match self {
            CostModel::AzureIonq { .. } => cost_azure_ionq(census, shots, error_mitigation, self),
            CostModel::QuantinuumHqc { .. } => cost_quantinuum(hqc(census, shots, width)?, self),
            CostModel::AwsPerShot { .. } => cost_aws(1, shots, self),
        }
    }
}

/// `max((n_1q·p1 + n_2q·p2)·shots, per-circuit minimum)`.
pub fn cost_azure_ionq(
    census: &GateCensus,
    shots: u64,
    error_mitigation: bool,
    model: &CostModel,
) -> Result<Money, CostError> {
    let CostModel::AzureIonq {
        p1,
        p2,
        min_plain,
        min_mitigated,
    } = *model
    else {
        return Err(CostError::Table("expected an Azure IonQ model".into()));
    };
    if shots == 0 {
        return Err(CostError::ZeroQuantity("shots"));
    }
    let per_shot = i128::from(census.n_1q) * i128::from(p1.micros())
        + i128::from(census.n_2q) * i128::from(p2.micros());
    let raw = Money(i64::try_from(per_shot * i128::from(shots)).expect("cost overflow"));
    let floor = if error_mitigation {
        min_mitigated
    } else {
        min_plain
    };
    Ok(raw.max(floor))
}

/// `credits × usd_per_hqc`, rounded half up to the micro-dollar.
pub fn cost_quantinuum(credits: HqcCredits, model: &CostModel) -> Result<Money, CostError> {
    let CostModel::QuantinuumHqc { usd_per_hqc, .. } = *model else {
        return Err(CostError::Table("expected a Quantinuum HQC model".into()));
    };
    let num = i128::from(credits.numerator()) * i128::from(usd_per_hqc.micros());
    let den = i128::from(HQC_DENOMINATOR);
    Ok(Money(
        i64::try_from((num + den / 2) / den).expect("cost overflow"),
    ))
}

/// `tasks·per_task + shots·per_shot`.
pub fn cost_aws(tasks: u64, shots: u64, model: &CostModel) -> Result<Money, CostError> {
    let CostModel::AwsPerShot { per_task, per_shot } = *model else {
        return Err(CostError::Table("expected an AWS per-shot model".into()));
    };
    if tasks == 0 {
        return Err(CostError::ZeroQuantity("tasks"));
    }
    if shots == 0 {
        return Err(CostError::ZeroQuantity("shots"));
    }
    Ok(Money(
        tasks as i64 * per_task.micros() + shots as i64 * per_shot.micros(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct AzureIonqPrices {
    #[serde(with = "usd_string")]
    pub one_qubit_gate: Money,
    #[serde(with = "usd_string")]
    pub two_qubit_gate: Money,
    #[serde(with = "usd_string")]
    pub min_per_circuit: Money,
    #[serde(with = "usd_string")]
    pub min_per_circuit_mitigated: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct QuantinuumPrices {
    #[serde(with = "usd_string")]
    pub hardware_per_hqc: Money,
    #[serde(with = "usd_string")]
    pub emulator_per_hqc: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct AwsPrices {
    #[serde(with = "usd_string")]
    pub per_task: Money,
    #[serde(with = "usd_string")]
    pub per_shot: Money,
}

/// Versioned vendor price list.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PriceTable {
    pub version: String,
    pub azure_ionq_aria: AzureIonqPrices,
    pub quantinuum: QuantinuumPrices,
    pub aws_ionq_aria: AwsPrices,
    pub aws_ionq_forte: AwsPrices,
    pub aws_iqm_garnet: AwsPrices,
}

pub const BUNDLED_PRICES: &str = include_str!("../data/prices.toml");

impl PriceTable {
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED_PRICES).expect("bundled price table parses")
    }

    pub fn from_toml(text: &str) -> Result<Self, CostError> {
        let table: PriceTable =
            toml::from_str(text).map_err(|e| CostError::Table(e.to_string()))?;
        for m in [
            table.azure_ionq_aria(),
            table.quantinuum_hardware(),
            table.quantinuum_emulator(),
            table.aws(&table.aws_ionq_aria),
            table.aws(&table.aws_ionq_forte),
            table.aws(&table.aws_iqm_garnet),
        ] {
            m.validate()?;
        }
        Ok(table)
    }

    pub fn azure_ionq_aria(&self) -> CostModel {
        let p = &self.azure_ionq_aria;
        CostModel::AzureIonq {
            p1: p.one_qubit_gate,
            p2: p.two_qubit_gate,
            min_plain: p.min_per_circuit,
            min_mitigated: p.min_per_circuit_mitigated,
        }
    }

    pub fn quantinuum_hardware(&self) -> CostModel {
        CostModel::QuantinuumHqc {
            usd_per_hqc: self.quantinuum.hardware_per_hqc,
            is_emulator: false,
        }
    }

    pub fn quantinuum_emulator(&self) -> CostModel {
        CostModel::QuantinuumHqc {
            usd_per_hqc: self.quantinuum.emulator_per_hqc,
            is_emulator: true,
        }
    }

    pub fn aws(&self, p: &AwsPrices) -> CostModel {
        CostModel::AwsPerShot {
            per_task: p.per_task,
            per_shot: p.per_shot,
        }
    }
}

//! Campaign configuration.
//!
//! The file is TOML: a `[campaign]` table, a `[qubits]` range and one
//! `[[targets]]` entry per provider preset. Optional keys on a target
//! override the preset.
//!
//! ```toml
//! [campaign]
//! seed = 2024
//! days = 3
//! shots = 500
//! submissions_per_day = 1
//! submit_at = 32400          # seconds after midnight of each day
//! budget_cap = "250.00"      # USD per target, optional
//! store = "qbench.jsonl"
//!
//! [qubits]
//! start = 8
//! end = 28
//! step = 2
//!
//! [[targets]]
//! preset = "aria1-aws"
//!
//! [[targets]]
//! preset = "h2-azure"
//! noise = { model = "none" }
//! availability = [{ span = { kind = "daily", start = 0, end = 3600 }, status = { state = "unavailable" } }]
//! ```

use std::path::{Path, PathBuf};

use qbench_core::costing::{Money, PriceTable};
use qbench_core::providers::{
    preset, preset_names, ProviderProfile, QueueModel, Schedule, SECONDS_PER_DAY,
};
use qbench_core::simulator::NoiseSpec;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub days: u64,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "one")]
    pub submissions_per_day: u64,
    #[serde(default = "default_submit_at")]
    pub submit_at: u64,
    /// Extra simulated time after the last day before unfinished jobs are
    /// canceled.
    #[serde(default = "default_drain")]
    pub drain_seconds: u64,
    #[serde(default, with = "opt_usd")]
    pub budget_cap: Option<Money>,
    #[serde(default)]
    pub store: Option<PathBuf>,
    /// Price table replacing the bundled one.
    #[serde(default)]
    pub prices: Option<PathBuf>,
}

fn one() -> u64 {
    1
}

fn default_shots() -> u64 {
    500
}

fn default_submit_at() -> u64 {
    9 * 3600
}

fn default_drain() -> u64 {
    SECONDS_PER_DAY
}

mod opt_usd {
    use qbench_core::costing::Money;
    use serde::{Deserialize, Deserializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Number(f64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Money>, D::Error> {
        let text = match Option::<Raw>::deserialize(d)? {
            None => return Ok(None),
            Some(Raw::Text(s)) => s,
            Some(Raw::Number(x)) => format!("{x}"),
        };
        text.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

impl Default for CampaignSection {
    fn default() -> Self {
        CampaignSection {
            seed: 0,
            days: 1,
            shots: default_shots(),
            submissions_per_day: 1,
            submit_at: default_submit_at(),
            drain_seconds: default_drain(),
            budget_cap: None,
            store: None,
            prices: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitRange {
    pub start: usize,
    pub end: usize,
    #[serde(default = "two")]
    pub step: usize,
}

fn two() -> usize {
    2
}

impl Default for QubitRange {
    fn default() -> Self {
        QubitRange {
            start: 8,
            end: 28,
            step: 2,
        }
    }
}

impl QubitRange {
    /// Inclusive of `end` when the step lands on it.
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step.max(1)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub preset: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub queue: Option<QueueModel>,
    #[serde(default)]
    pub availability: Option<Schedule>,
    #[serde(default)]
    pub gate_limit: Option<u64>,
    /// Removes the preset's gate limit.
    #[serde(default)]
    pub no_gate_limit: bool,
    #[serde(default)]
    pub max_width: Option<usize>,
    #[serde(default)]
    pub exec_seconds: Option<u64>,
    #[serde(default)]
    pub simulate_max_width: Option<usize>,
    #[serde(default)]
    pub error_mitigation: Option<bool>,
}

impl TargetSpec {
    pub fn profile(&self, prices: &PriceTable) -> Result<ProviderProfile, CliError> {
        let mut p = preset(&self.preset, prices).ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset {:?}; known: {}",
                self.preset,
                preset_names().join(", ")
            ))
        })?;
        if let Some(name) = &self.name {
            p.target_name = name.clone();
        }
        if let Some(noise) = self.noise {
            p.noise = noise;
        }
        if let Some(q) = self.queue {
            p.queue_model = q;
        }
        if let Some(s) = &self.availability {
            p.availability = s.clone();
        }
        if self.no_gate_limit {
            p.gate_limit = None;
        }
        if let Some(limit) = self.gate_limit {
            p.gate_limit = Some(limit);
        }
        if let Some(w) = self.max_width {
            p.max_width = Some(w);
        }
        if let Some(e) = self.exec_seconds {
            p.exec_seconds = e;
        }
        if let Some(w) = self.simulate_max_width {
            p.simulate_max_width = w;
        }
        if let Some(m) = self.error_mitigation {
            p.error_mitigation = m;
        }
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub campaign: CampaignSection,
    #[serde(default)]
    pub qubits: QubitRange,
    pub targets: Vec<TargetSpec>,
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: CampaignConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // Relative paths in the file resolve against its directory.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.campaign.store, &mut cfg.campaign.prices]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let q = &self.qubits;
        if q.start > q.end {
            return bad(format!(
                "qubit range start {} exceeds end {}",
                q.start, q.end
            ));
        }
        if q.step == 0 {
            return bad("qubit step must be at least 1".into());
        }
        if q.start == 0 {
            return bad("qubit range must start at 1 or more".into());
        }
        let c = &self.campaign;
        if c.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if c.days == 0 || c.submissions_per_day == 0 {
            return bad("days and submissions_per_day must be at least 1".into());
        }
        if c.submit_at >= SECONDS_PER_DAY {
            return bad(format!("submit_at {} is not a time of day", c.submit_at));
        }
        if c.budget_cap.is_some_and(|m| m.micros() < 0) {
            return bad("budget_cap is negative".into());
        }
        if self.targets.is_empty() {
            return bad("no targets".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for t in &self.targets {
            let name = t.name.as_deref().unwrap_or(&t.preset);
            if !names.insert(name) {
                return bad(format!("target {name:?} listed twice"));
            }
        }
        Ok(())
    }

    pub fn prices(&self) -> Result<PriceTable, CliError> {
        match &self.campaign.prices {
            None => Ok(PriceTable::bundled()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                PriceTable::from_toml(&text).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    pub fn profiles(&self) -> Result<Vec<ProviderProfile>, CliError> {
        let prices = self.prices()?;
        self.targets.iter().map(|t| t.profile(&prices)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = CampaignConfig::parse(
            r#"
            [[targets]]
            preset = "h2-azure"
            noise = { model = "none" }
            availability = [{ span = { kind = "daily", start = 0, end = 3600 }, status = { state = "unavailable" } }]

            [[targets]]
            preset = "aria1-aws"
            no_gate_limit = true
            "#,
        )
        .unwrap();
        assert_eq!(
            cfg.qubits.values(),
            vec![8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28]
        );
        assert_eq!(cfg.campaign.shots, 500);
        let profiles = cfg.profiles().unwrap();
        assert_eq!(profiles[0].noise, NoiseSpec::None);
        assert_eq!(profiles[0].availability.windows().len(), 1);
        assert_eq!(profiles[1].gate_limit, None);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "targets = []",
            "[qubits]\nstart = 10\nend = 8\n[[targets]]\npreset = \"h2-azure\"",
            "[qubits]\nstart = 8\nend = 10\nstep = 0\n[[targets]]\npreset = \"h2-azure\"",
            "[campaign]\nshots = 0\n[[targets]]\npreset = \"h2-azure\"",
            "[[targets]]\npreset = \"nope\"",
            "[[targets]]\npreset = \"h2-azure\"\ncolour = 1",
            "[[targets]]\npreset = \"h2-azure\"\n[[targets]]\npreset = \"h2-azure\"",
        ] {
            let r = CampaignConfig::parse(text).and_then(|c| c.profiles().map(|_| c));
            assert!(matches!(r, Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn budget_cap_parses_as_usd() {
        let cfg = CampaignConfig::parse(
            "[campaign]\nbudget_cap = \"12.34\"\n[[targets]]\npreset = \"h2-azure\"",
        )
        .unwrap();
        assert_eq!(cfg.campaign.budget_cap, Some(Money::from_cents(1234)));
    }
}

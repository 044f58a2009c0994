//! Bundled target presets.
//!
//! Queue and availability parameters are illustrative defaults; campaign
//! configs override them.

use super::schedule::{DegradedSemantics, Schedule, TargetStatus};
use super::{Cloud, ProviderProfile, QueueModel};
use crate::costing::{CostModel, Money, PriceTable};
use crate::simulator::NoiseSpec;
use crate::transpiler::{GateSetProfile, DEFAULT_AWS_GATE_LIMIT};

const HOUR: u64 = 3600;
const MINUTE: u64 = 60;

const NAMES: [&str; 11] = [
    "aria1-aws",
    "aria1-azure",
    "forte1-aws",
    "garnet-aws",
    "h1-azure",
    "h2-azure",
    "aria1-aws-emulator",
    "aria1-azure-emulator",
    "forte1-aws-emulator",
    "h1-azure-emulator",
    "h2-azure-emulator",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

pub fn presets(prices: &PriceTable) -> Vec<ProviderProfile> {
    NAMES
        .iter()
        .map(|n| preset(n, prices).expect("bundled preset"))
        .collect()
}

/// Hardware queues: median about 40 minutes with a heavy tail.
fn hardware_queue(bias: f64, predictor_sigma: f64) -> QueueModel {
    QueueModel {
        mu: (40.0 * MINUTE as f64).ln(),
        sigma: 1.5,
        predictor_bias: bias,
        predictor_sigma,
    }
}

fn emulator_queue() -> QueueModel {
    QueueModel {
        mu: (2.0 * MINUTE as f64).ln(),
        sigma: 0.5,
        predictor_bias: 1.0,
        predictor_sigma: 0.0,
    }
}

fn free() -> CostModel {
    CostModel::AwsPerShot {
        per_task: Money::ZERO,
        per_shot: Money::ZERO,
    }
}

fn base(
    cloud: Cloud,
    name: &str,
    gate_profile: GateSetProfile,
    cost_model: CostModel,
    f_2qg: f64,
) -> ProviderProfile {
    let azure = cloud == Cloud::SimAzure;
    ProviderProfile {
        cloud,
        target_name: name.to_string(),
        gate_profile,
        gate_limit: None,
        max_width: None,
        // Azure's published average underestimates most waits.
        queue_model: hardware_queue(if azure { 0.52 } else { 1.0 }, 1.0),
        availability: Schedule::always_available(),
        cost_model,
        noise: NoiseSpec::GlobalDepolarizing { f_2qg },
        exposes_avg_queue_time: azure,
        exposes_queue_position: !azure,
        exec_seconds: 60,
        error_mitigation: false,
        simulate_max_width: 12,
        is_emulator: false,
    }
}

pub fn preset(name: &str, prices: &PriceTable) -> Option<ProviderProfile> {
    if let Some(hw) = name.strip_suffix("-emulator") {
        let mut p = preset(hw, prices)?;
        if matches!(hw, "garnet-aws") {
            return None;
        }
        p.target_name = name.to_string();
        p.queue_model = emulator_queue();
        p.availability = Schedule::always_available();
        p.exec_seconds = 5;
        p.is_emulator = true;
        p.cost_model = if hw.starts_with('h') {
            prices.quantinuum_emulator()
        } else {
            free()
        };
        return Some(p);
    }
    let daily = |start: u64, end: u64, status: TargetStatus| {
        Schedule::daily(start, end, status).expect("valid preset window")
    };
    let profile = match name {
        "aria1-aws" => ProviderProfile {
            gate_limit: Some(DEFAULT_AWS_GATE_LIMIT),
            max_width: Some(25),
            availability: daily(22 * HOUR, 2 * HOUR + 30 * MINUTE, TargetStatus::UNAVAILABLE),
            ..base(
                Cloud::SimAws,
                name,
                GateSetProfile::redundant(),
                prices.aws(&prices.aws_ionq_aria),
                0.99,
            )
        },
        "aria1-azure" => ProviderProfile {
            max_width: Some(25),
            availability: daily(17 * HOUR, HOUR + 24 * MINUTE, TargetStatus::UNAVAILABLE),
            ..base(
                Cloud::SimAzure,
                name,
                GateSetProfile::efficient(),
                prices.azure_ionq_aria(),
                0.99,
            )
        },
        "forte1-aws" => ProviderProfile {
            max_width: Some(36),
            ..base(
                Cloud::SimAws,
                name,
                GateSetProfile::redundant(),
                prices.aws(&prices.aws_ionq_forte),
                0.995,
            )
        },
        "garnet-aws" => ProviderProfile {
            max_width: Some(20),
            ..base(
                Cloud::SimAws,
                name,
                GateSetProfile::redundant(),
                prices.aws(&prices.aws_iqm_garnet),
                0.90,
            )
        },
        "h1-azure" => ProviderProfile {
            max_width: Some(20),
            availability: daily(
                2 * HOUR,
                17 * HOUR,
                TargetStatus::degraded(DegradedSemantics::AcceptHold),
            ),
            ..base(
                Cloud::SimAzure,
                name,
                GateSetProfile::efficient(),
                prices.quantinuum_hardware(),
                0.998,
            )
        },
        "h2-azure" => ProviderProfile {
            max_width: Some(56),
            ..base(
                Cloud::SimAzure,
                name,
                GateSetProfile::efficient(),
                prices.quantinuum_hardware(),
                0.998,
            )
        },
        _ => return None,
    };
    Some(profile)
}

//! Benchmark → transpile → simulate, end to end, for random inputs.

use proptest::prelude::*;
use qbench_core::circuit::{build_qft_benchmark, census, ideal_index, GateKind};
use qbench_core::simulator::{run_noisy, run_statevector, NoiseSpec};
use qbench_core::transpiler::{transpile, GateSetProfile};

fn profiles() -> [GateSetProfile; 2] {
    [GateSetProfile::efficient(), GateSetProfile::redundant()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transpiled_benchmark_lands_on_ideal(q in 1usize..=7, raw in any::<u64>()) {
        let n = raw % (1 << q);
        let c = build_qft_benchmark(q, n).unwrap();
        let want = ideal_index(q, n).unwrap() as usize;
        for p in profiles() {
            let t = transpile(&c, &p).unwrap();
            prop_assert_eq!(t.circuit.metadata(), c.metadata());
            prop_assert_eq!(t.census, census(&t.circuit));
            prop_assert_eq!(t.census.total, t.census.n_1q + t.census.n_2q);
            for g in t.circuit.gates() {
                prop_assert!(p.is_native(g.kind()), "{} emitted {:?}", p.name, g.kind());
                if g.kind() == GateKind::Cx {
                    prop_assert!(g.targets()[0] < g.targets()[1], "cx must point down");
                }
            }
            let probs = run_statevector(&t.circuit).unwrap().probabilities();
            prop_assert!((probs[want] - 1.0).abs() < 1e-9, "{}: p = {}", p.name, probs[want]);
        }
    }

    #[test]
    fn noisy_counts_conserve_shots(q in 2usize..=6, shots in 1u64..400, f in 0.5f64..=1.0, seed in any::<u64>()) {
        let c = build_qft_benchmark(q, seed % (1 << q)).unwrap();
        for noise in [NoiseSpec::None, NoiseSpec::GlobalDepolarizing { f_2qg: f }, NoiseSpec::PauliTrajectory { p: 1.0 - f }] {
            if noise.validate().is_err() {
                continue;
            }
            let counts = run_noisy(&c, noise, shots, seed).unwrap();
            prop_assert_eq!(counts.shots(), shots);
            prop_assert!(counts.counts().keys().all(|k| k.len() == q));
            prop_assert_eq!(&counts, &run_noisy(&c, noise, shots, seed).unwrap());
        }
    }
}

#[test]
fn redundant_doubles_entanglers_on_the_benchmark() {
    for q in [4, 8, 12] {
        let c = build_qft_benchmark(q, 3).unwrap();
        let e = transpile(&c, &GateSetProfile::efficient()).unwrap().census;
        let r = transpile(&c, &GateSetProfile::redundant()).unwrap().census;
        // SWAPs cost three entanglers on both paths; controlled phases one vs two.
        let ir = census(&c);
        let swaps = c
            .gates()
            .iter()
            .filter(|g| g.kind() == GateKind::Swap)
            .count() as u64;
        let cps = ir.n_2q - swaps;
        assert_eq!(e.n_2q, cps + 3 * swaps);
        assert_eq!(r.n_2q, 2 * cps + 3 * swaps);
    }
}

use phsify_core::energy::{energy_balance, EnergyConfig};
use phsify_core::generator::{rand_index, synth, SynthSpec, Topology};
use phsify_core::graph::{analyze, verify, AnalyzeConfig};
use phsify_core::odedsl::render_system;
use phsify_core::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(seed: u64) -> SynthSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.gen_range(1..=4);
    let dims = (0..nodes).map(|_| [2, 3, 4][rng.gen_range(0..3)]).collect();
    let topology = if rng.gen_bool(0.5) { Topology::Chain } else { Topology::Ring };
    SynthSpec::new(dims, topology, seed)
}

#[test]
fn generated_partitions_are_recovered() {
    let total = 200;
    let (mut close, mut exact) = (0, 0);
    let cut = Rational::new(9.into(), 10.into());
    let one = Rational::from_integer(1.into());
    for seed in 0..total {
        let s = spec(seed);
        let (sys, truth) = synth(&s).unwrap();
        let src = render_system(&sys);
        let a = analyze(&src, &AnalyzeConfig::default()).unwrap();
        let ri = rand_index(&a.prepared.partition, &truth.partition).unwrap();
        close += (ri >= cut) as usize;
        exact += (ri == one) as usize;
        let rep = verify(&src, &a.graph).unwrap();
        assert!(rep.symbolic_identity, "seed {}: {:?}", seed, rep.violations);
    }
    println!("rand index >= 0.9: {}/{}, exact: {}/{}", close, total, exact, total);
    assert!(close * 10 >= total as usize * 9);
    assert!(exact * 4 >= total as usize * 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_systems_balance_energy(seed in any::<u64>(), x0 in prop::collection::vec(-0.5f64..0.5, 16)) {
        let s = spec(seed);
        let (sys, _) = synth(&s).unwrap();
        let a = analyze(&render_system(&sys), &AnalyzeConfig::default()).unwrap();
        let run = |k: f64| {
            let base = EnergyConfig::default();
            let cfg = EnergyConfig { step: base.step / k, steps: (base.steps as f64 * k) as usize, ..base };
            energy_balance(&a.prepared.system, &a.decorations, &[], &[], &x0[..sys.dim()], &cfg).unwrap()
        };
        // generated nodes can be stiff enough that step 1/128 misses 1e-6, so
        // check that the discrepancy is integration error: a structural
        // mismatch would not shrink with the step
        let (a, b) = (run(8.0), run(16.0));
        prop_assert!(b.max_discrepancy <= a.max_discrepancy / 8.0 + 1e-12, "{:?} {:?}", a, b);
        prop_assert!(b.within_tolerance, "{:?}", b);
    }
}

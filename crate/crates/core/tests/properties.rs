mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steerbox_core::certify::{classify, paper_measurements};
use steerbox_core::decomp::{local_membership, restricted_feasibility};
use steerbox_core::discord::{conditional_entropy_min, discord, von_neumann_entropy, SearchConfig};
use steerbox_core::io::{box_from_json, box_to_json, state_from_json, state_to_json, ArithmeticMode};
use steerbox_core::quantum::{born_box, random, DensityMatrix};
use steerbox_core::{CorrBox, Direction, Side, SolverConfig, TrustedKind, Verdict};

fn local_box(seed: u64, k: usize) -> CorrBox {
    common::random_local_box(&mut ChaCha8Rng::seed_from_u64(seed), k)
}

fn quick() -> SolverConfig {
    SolverConfig { starts: 200, ..SolverConfig::default() }
}

fn sound(r: &steerbox_core::FeasibilityResult, b: &CorrBox) -> bool {
    match (&r.verdict, &r.certificate) {
        (Verdict::Feasible, Some(m)) if b.is_rational() && m.is_exact() => m.reproduces_exactly(b),
        (Verdict::Feasible, Some(m)) => m.reconstruction_error(b) <= 1e-10,
        (Verdict::Feasible, None) => false,
        _ => true,
    }
}

/// `Σ_i p_i ρ_A^i ⊗ |i⟩⟨i|`, classical on Bob.
fn quantum_classical_state(seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r0 = random::state(&mut rng, 2);
    let r1 = random::state(&mut rng, 2);
    let p: f64 = rand::Rng::gen_range(&mut rng, 0.1..0.9);
    let k0 = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
    let k1 = DensityMatrix::from_bloch([0.0, 0.0, -1.0]).unwrap();
    let a = DensityMatrix::product(&r0, &k0).unwrap().matrix() * num_complex::Complex64::new(p, 0.0);
    let b = DensityMatrix::product(&r1, &k1).unwrap().matrix() * num_complex::Complex64::new(1.0 - p, 0.0);
    DensityMatrix::new(a + b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rational_json_round_trip_is_bit_exact(seed in any::<u64>(), k in 1usize..6) {
        let b = local_box(seed, k);
        let back = box_from_json(&box_to_json(&b, ArithmeticMode::Rational).unwrap()).unwrap();
        prop_assert_eq!(back.exact(), b.exact());
    }

    #[test]
    fn float_json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random::state(&mut rng, 4);
        let m = [random::measurement(&mut rng), random::measurement(&mut rng)];
        let n = [random::measurement(&mut rng), random::measurement(&mut rng)];
        let b = born_box(&st, &m, &n).unwrap();
        let back = box_from_json(&box_to_json(&b, ArithmeticMode::Float).unwrap()).unwrap();
        prop_assert_eq!(back.entries(), b.entries());
        let st2 = state_from_json(&state_to_json(&st).unwrap()).unwrap();
        prop_assert!((st2.matrix() - st.matrix()).norm() < 1e-15);
    }

    #[test]
    fn local_boxes_have_sixteen_term_models(seed in any::<u64>(), k in 1usize..8) {
        let b = local_box(seed, k);
        let l = local_membership(&b).unwrap();
        prop_assert_eq!(l.verdict, Verdict::Feasible);
        prop_assert!(sound(&l, &b));
        let r = restricted_feasibility(&b, 16, Side::Alice, TrustedKind::Unconstrained, &quick()).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Feasible);
        prop_assert!(sound(&r, &b));
    }

    #[test]
    fn exact_lp_is_deterministic(seed in any::<u64>(), k in 1usize..8) {
        let b = local_box(seed, k);
        let a = local_membership(&b).unwrap().certificate.unwrap();
        let c = local_membership(&b).unwrap().certificate.unwrap();
        prop_assert_eq!(a.exact_weights(), c.exact_weights());
        let keys = |m: &steerbox_core::HiddenVariableModel| m.untrusted_responses().iter().map(|u| u.entries().to_vec()).collect::<Vec<_>>();
        prop_assert_eq!(keys(&a), keys(&c));
    }

    #[test]
    fn padded_certificates_stay_valid(seed in any::<u64>(), k in 1usize..5) {
        let b = local_box(seed, k);
        let r = restricted_feasibility(&b, 4, Side::Alice, TrustedKind::QubitMub, &quick()).unwrap();
        if let Some(m) = r.certificate {
            let p = m.padded(6);
            prop_assert_eq!(p.dim(), 6);
            prop_assert!(p.reproduces_exactly(&b) || p.reconstruction_error(&b) <= 1e-10);
        }
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random::state(&mut rng, 4);
        let u = random::unitary(&mut rng, 4);
        let s = von_neumann_entropy(&st);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&s));
        prop_assert!((s - von_neumann_entropy(&st.conjugate(&u).unwrap())).abs() < 1e-9);
        prop_assert!((s - common::entropy_bits(st.matrix())).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn discord_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random::state(&mut rng, 4);
        let cfg = SearchConfig::default();
        for dir in [Direction::AliceToBob, Direction::BobToAlice] {
            let r = discord(&st, dir, &cfg).unwrap();
            prop_assert!(r.discord >= -1e-9);
            prop_assert!(r.classical_correlation >= -1e-9);
            prop_assert!((r.discord - (r.mutual_information - r.classical_correlation)).abs() < 1e-9);
            prop_assert!(r.mutual_information >= r.discord - 1e-9);
        }
        let ce = conditional_entropy_min(&st, Side::Alice, &cfg).unwrap();
        prop_assert!(ce.value <= ce.grid_value + 1e-15);
        let sb = von_neumann_entropy(&st.reduced(Side::Bob).unwrap());
        prop_assert!(ce.value <= sb + 1e-9);
    }

    #[test]
    fn product_states_have_no_discord(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = DensityMatrix::product(&random::state(&mut rng, 2), &random::state(&mut rng, 2)).unwrap();
        for dir in [Direction::AliceToBob, Direction::BobToAlice] {
            prop_assert!(discord(&st, dir, &SearchConfig::default()).unwrap().discord.abs() < 1e-6);
        }
    }

    #[test]
    fn quantum_classical_states_have_no_discord_from_bob(seed in any::<u64>()) {
        let st = quantum_classical_state(seed);
        let r = discord(&st, Direction::BobToAlice, &SearchConfig::default()).unwrap();
        prop_assert!(r.discord.abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn qubit_feasible_implies_unconstrained_feasible(seed in any::<u64>(), k in 1usize..5, bob in any::<bool>()) {
        let b = local_box(seed, k);
        let side = if bob { Side::Bob } else { Side::Alice };
        for d in [2, 4] {
            let qb = restricted_feasibility(&b, d, side, TrustedKind::QubitMub, &quick()).unwrap();
            let un = restricted_feasibility(&b, d, side, TrustedKind::Unconstrained, &quick()).unwrap();
            prop_assert!(sound(&qb, &b) && sound(&un, &b));
            if qb.verdict == Verdict::Feasible {
                prop_assert_ne!(un.feasible(), Some(false));
            }
        }
    }
}

#[test]
fn zero_discord_from_bob_never_yields_superunsteerability_from_bob() {
    let cfg = quick();
    for seed in 0..4 {
        let st = quantum_classical_state(seed);
        let b = born_box(&st, &paper_measurements(), &paper_measurements()).unwrap();
        let rep = classify(&b, 2, 2, &cfg).unwrap();
        assert_ne!(rep.b_to_a.superunsteerable, Some(true), "seed {seed}");
        if let Some(holds) = rep.implication_holds() {
            assert!(holds, "seed {seed}");
        }
    }
}

#[test]
fn sdi_flag_matches_superunsteerability_on_unsteerable_boxes() {
    let cfg = quick();
    for seed in 0..3 {
        let b = local_box(seed, 2 + seed as usize % 3);
        let rep = classify(&b, 2, 2, &cfg).unwrap();
        for d in [&rep.a_to_b, &rep.b_to_a] {
            if d.unsteerable == Some(true) {
                assert_eq!(d.sdi_steerable, d.superunsteerable, "seed {seed}");
            }
        }
    }
}

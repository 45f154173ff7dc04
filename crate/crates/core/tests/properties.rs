//! Invariants checked over randomized inputs. Each case draws its objects
//! from a seeded generator so failures shrink to a reproducible seed.

use nlbreak::linalg::{eig_symmetric3, eig_symmetric3_closed, max_abs, max_abs_real, pauli_coefficients};
use nlbreak::nlbreak::{
    amplitude_damping, breaks_mes_nonlocality, genuine_hidden_family, is_strongly_nlb, output_state, output_t_matrix,
    product_eigenvalue_bound_holds, verify_mesbreak_implies_maxmixed_local, PureInputSpec,
};
use nlbreak::random;
use nlbreak::state::{apply_filter, c_spectrum, horodecki_m, m_of_correlation, optimal_chsh};
use nlbreak::{compose, QubitChannel, TwoQubitState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn spec(seed: u64) -> PureInputSpec {
    nlbreak::verify::random_spec(&mut rng(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn choi_state_is_a_state(seed in any::<u64>()) {
        let ch = random::cp_channel(&mut rng(seed));
        let choi = ch.choi_state().unwrap();
        prop_assert!((choi.rho().trace().re - 1.0).abs() < 1e-12);
        // first marginal of a Choi state is maximally mixed
        prop_assert!(max_abs(&(choi.reduced_first() - TwoQubitState::maximally_mixed().reduced_first())) < 1e-12);
    }

    #[test]
    fn horodecki_m_is_bounded_and_local_unitary_invariant(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random::any_state(&mut g);
        let (ua, ub) = (random::unitary(&mut g), random::unitary(&mut g));
        let m = horodecki_m(&rho);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&m));
        prop_assert!((horodecki_m(&rho.local_unitary(&ua, &ub)) - m).abs() < 1e-12);
        prop_assert!((optimal_chsh(&rho) - 2.0 * m.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn c_spectrum_is_nonnegative_and_sorted(seed in any::<u64>()) {
        let rho = random::any_state(&mut rng(seed));
        let s = c_spectrum(&rho).unwrap();
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.values[3] >= 0.0);
    }

    #[test]
    fn hidden_ratio_survives_filtering(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rho = random::state(&mut g);
        let filtered = apply_filter(&rho, &random::full_rank_filter(&mut g)).unwrap();
        let (a, b) = (c_spectrum(&rho).unwrap().ratio, c_spectrum(&filtered).unwrap().ratio);
        prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn class_inclusions(seed in any::<u64>()) {
        let ch = random::cp_channel(&mut rng(seed));
        let eb = ch.is_entanglement_breaking(1e-12).unwrap();
        let snlb = is_strongly_nlb(&ch).unwrap();
        let mes = breaks_mes_nonlocality(&ch).unwrap();
        prop_assert!(!eb || snlb);
        prop_assert!(!snlb || mes);
    }

    #[test]
    fn unital_strong_and_mes_breaking_agree(seed in any::<u64>()) {
        let ch = random::unital_cp_channel(&mut rng(seed));
        prop_assert_eq!(is_strongly_nlb(&ch).unwrap(), breaks_mes_nonlocality(&ch).unwrap());
    }

    #[test]
    fn mes_breaking_keeps_maximally_mixed_reductions_local(a in any::<u64>(), b in any::<u64>()) {
        let ch = random::cp_channel(&mut rng(a));
        let sigma = random::cp_channel(&mut rng(b)).choi_state().unwrap();
        prop_assert!(verify_mesbreak_implies_maxmixed_local(&ch, &sigma).unwrap());
    }

    #[test]
    fn eigenvalue_product_bound(seed in any::<u64>()) {
        let (a, b) = random::constrained_pd_pair(&mut rng(seed));
        prop_assert!(product_eigenvalue_bound_holds(&a, &b).unwrap());
    }

    #[test]
    fn output_t_matrix_matches_direct_state(ch_seed in any::<u64>(), spec_seed in any::<u64>()) {
        let ch = random::canonical_cp_channel(&mut rng(ch_seed));
        let s = spec(spec_seed);
        let closed = m_of_correlation(&output_t_matrix(&ch, &s).unwrap());
        let direct = horodecki_m(&output_state(&ch, &s).unwrap());
        prop_assert!((closed - direct).abs() < 1e-9);
    }

    #[test]
    fn canonical_form_reproduces_transfer_matrix(seed in any::<u64>()) {
        let ch = random::cp_channel(&mut rng(seed));
        let canon = QubitChannel::from_transfer_matrix(&ch.transfer_matrix());
        let diff = canon.transfer_matrix().matrix() - ch.transfer_matrix().matrix();
        prop_assert!(max_abs_real(&diff) < 1e-12);
    }

    #[test]
    fn composition_acts_sequentially(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (first, second) = (random::cp_channel(&mut rng(a)), random::cp_channel(&mut rng(b)));
        let rho = random::state(&mut rng(c));
        let stepwise = second.apply_one_sided(&first.apply_one_sided(&rho).unwrap()).unwrap();
        let composed = compose(&second, &first).unwrap().apply_one_sided(&rho).unwrap();
        prop_assert!(max_abs(&(stepwise.rho() - composed.rho())) < 1e-12);
    }

    #[test]
    fn correlation_tensors_round_trip(seed in any::<u64>()) {
        let rho = random::any_state(&mut rng(seed));
        let back = rho.correlation_tensors().reconstruct();
        prop_assert!(max_abs(&(back - rho.rho())) < 1e-14);
        prop_assert!(max_abs_real(&(pauli_coefficients(&back) - pauli_coefficients(rho.rho()))) < 1e-14);
    }

    #[test]
    fn closed_form_eigenvalues(seed in any::<u64>()) {
        let t = random::canonical_cp_channel(&mut rng(seed)).transfer_matrix().block();
        let s = t.transpose() * t;
        let (x, y) = (eig_symmetric3(&s), eig_symmetric3_closed(&s));
        for k in 0..3 {
            prop_assert!((x[k] - y[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn amplitude_damping_choi_breaks_exactly_from_half(p in 0.0f64..=1.0) {
        let ch = amplitude_damping(p).unwrap();
        prop_assert!((horodecki_m(&ch.choi_state().unwrap()) - 2.0 * (1.0 - p)).abs() < 1e-12);
        prop_assert_eq!(breaks_mes_nonlocality(&ch).unwrap(), p >= 0.5);
    }

    #[test]
    fn qfamily_choi_spectrum(q in 0.0f64..=1.0) {
        let s = c_spectrum(&genuine_hidden_family(q).unwrap().choi_state().unwrap()).unwrap();
        for (v, w) in s.values.iter().zip([q, q, q * q, q * q]) {
            prop_assert!((v - w).abs() < 1e-10, "{:?}", s.values);
        }
    }

    #[test]
    fn pure_input_spec_rejects_out_of_range(l in prop_oneof![-1.0f64..-1e-9, 1.0f64 + 1e-9..2.0]) {
        prop_assert!(PureInputSpec::new(l, [0.0; 3]).is_err());
    }
}

#[test]
fn volume_fractions_are_nested() {
    let r = nlbreak::volume::estimate_volumes(20_000, 3, nlbreak::Mode::Full).unwrap();
    assert!(r.eb_count <= r.snlb_count && r.snlb_count <= r.nlb_mes_count && r.nlb_mes_count <= r.cp_accepted);
}

mod common;

use common::*;
use jmsteer::states::{
    binary_entropy, conditional_entropy_after_measurement, conditional_shannon, conditional_von_neumann,
    joint_outcome_distribution, local_distribution, post_measurement_cq, shannon_entropy,
    von_neumann_entropy,
};
use jmsteer::povm::outcome_distribution;
use jmsteer::{werner_state, Subsystem};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_bounded_by_log_dimension(seed in any::<u64>(), dim in 1usize..6) {
        let mut r = rng(seed);
        let s = von_neumann_entropy(&random_density(&mut r, dim)).unwrap();
        prop_assert!(s >= -1e-12);
        prop_assert!(s <= (dim as f64).log2() + 1e-9);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), dim in 1usize..5) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, dim);
        let u = random_unitary(&mut r, dim);
        let rotated = (&(&u * &rho) * &u.adjoint()).hermitian_part();
        let (a, b) = (von_neumann_entropy(&rho).unwrap(), von_neumann_entropy(&rotated).unwrap());
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn product_states_have_additive_entropy(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let s = random_product(&mut r, da, db);
        let sb = von_neumann_entropy(&s.reduced(Subsystem::B)).unwrap();
        let sa = von_neumann_entropy(&s.reduced(Subsystem::A)).unwrap();
        prop_assert!((conditional_von_neumann(&s) - sa).abs() <= 1e-9);
        prop_assert!(sb >= -1e-12);
    }

    #[test]
    fn conditional_entropy_is_at_least_minus_log_d(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let s = random_bipartite(&mut r, d);
        prop_assert!(conditional_von_neumann(&s) >= -(d as f64).log2() - 1e-9);
    }

    #[test]
    fn pure_states_have_equal_marginal_entropies(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let amps: Vec<_> = (0..d * d).map(|_| complex_gaussian(&mut r)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<_> = amps.iter().map(|a| a / norm).collect();
        let s = jmsteer::BipartiteState::pure(&amps, d, d).unwrap();
        let sa = von_neumann_entropy(&s.reduced(Subsystem::A)).unwrap();
        let sb = von_neumann_entropy(&s.reduced(Subsystem::B)).unwrap();
        prop_assert!((sa - sb).abs() <= 1e-9);
        prop_assert!((conditional_von_neumann(&s) + sb).abs() <= 1e-9);
    }

    #[test]
    fn joint_table_marginals_match_local_statistics(seed in any::<u64>(), d in 2usize..4, ka in 1usize..4, kb in 1usize..4) {
        let mut r = rng(seed);
        let s = random_bipartite(&mut r, d);
        let (pa, pb) = (random_povm(&mut r, d, ka), random_povm(&mut r, d, kb));
        let j = joint_outcome_distribution(&s, &pa, &pb).unwrap();
        let la = local_distribution(&s, Subsystem::A, &pa);
        let lb = local_distribution(&s, Subsystem::B, &pb);
        for (x, y) in j.marginal(Subsystem::A).iter().zip(&la) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        for (x, y) in j.marginal(Subsystem::B).iter().zip(&lb) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn conditioning_reduces_shannon_entropy(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let s = random_bipartite(&mut r, d);
        let (pa, pb) = (random_povm(&mut r, d, 3), random_povm(&mut r, d, 2));
        let j = joint_outcome_distribution(&s, &pa, &pb).unwrap();
        let h_a = shannon_entropy(&j.marginal(Subsystem::A)).unwrap();
        let h = conditional_shannon(&j, Subsystem::B);
        prop_assert!(h >= -1e-12 && h <= h_a + 1e-9);
    }

    #[test]
    fn cq_entropy_lies_between_bounds(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let s = random_bipartite(&mut r, d);
        let x = random_povm(&mut r, d, d);
        let cq = post_measurement_cq(&s, &x).unwrap();
        let sxb = conditional_entropy_after_measurement(&cq);
        let hx = shannon_entropy(&outcome_distribution(&x, &s.reduced(Subsystem::A)).unwrap()).unwrap();
        prop_assert!(sxb >= -1e-9);
        prop_assert!(sxb <= hx + 1e-9);
    }

    #[test]
    fn binary_entropy_is_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        prop_assert!((h - binary_entropy(1.0 - p).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn werner_conditional_entropy_is_monotone(w1 in 0.0f64..=1.0, w2 in 0.0f64..=1.0) {
        let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        let s_lo = conditional_von_neumann(&werner_state(lo).unwrap());
        let s_hi = conditional_von_neumann(&werner_state(hi).unwrap());
        prop_assert!(s_hi <= s_lo + 1e-9);
    }
}

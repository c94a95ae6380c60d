//! Entropic uncertainty relations for the two-party guessing game: the
//! state-independent Maassen–Uffink bound, its quantum-memory refinement,
//! the entropic steering inequality and the key-rate bound that follows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::tidy;
use crate::linalg::{psd_sqrt, trace_norm, Matrix, Subsystem};
use crate::povm::{outcome_distribution, Povm};
use crate::states::{
    binary_entropy, conditional_shannon, conditional_von_neumann, joint_outcome_distribution,
    shannon_entropy, BipartiteState,
};

/// One-sided slack (bits) so that saturated inequalities count as satisfied.
pub const SLACK: f64 = 1e-9;

/// Shared state plus the measurement each party uses for each round type.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub state: BipartiteState,
    pub alice_x: Povm,
    pub alice_z: Povm,
    pub bob_x: Povm,
    pub bob_z: Povm,
}

impl Scenario {
    pub fn new(
        state: BipartiteState,
        alice_x: Povm,
        alice_z: Povm,
        bob_x: Povm,
        bob_z: Povm,
    ) -> Result<Self> {
        for p in [&alice_x, &alice_z] {
            if p.dim() != state.d_a() {
                return Err(Error::DimensionMismatch { expected: state.d_a(), found: p.dim() });
            }
        }
        for p in [&bob_x, &bob_z] {
            if p.dim() != state.d_b() {
                return Err(Error::DimensionMismatch { expected: state.d_b(), found: p.dim() });
            }
        }
        Ok(Scenario { state, alice_x, alice_z, bob_x, bob_z })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub c_overlap: f64,
    pub mu_bound: f64,
    pub s_a_given_b: f64,
    pub memory_bound: f64,
    pub h_x_given_xp: f64,
    pub h_z_given_zp: f64,
    pub lhs_sum: f64,
    pub steering_satisfied: bool,
    pub memory_inequality_satisfied: bool,
    pub key_rate_lower_bound: f64,
}

impl UncertaintyReport {
    /// Copy with every number rounded to 12 significant digits and
    /// floating-point residue flushed to zero.
    pub fn rounded(&self) -> Self {
        UncertaintyReport {
            c_overlap: tidy(self.c_overlap),
            mu_bound: tidy(self.mu_bound),
            s_a_given_b: tidy(self.s_a_given_b),
            memory_bound: tidy(self.memory_bound),
            h_x_given_xp: tidy(self.h_x_given_xp),
            h_z_given_zp: tidy(self.h_z_given_zp),
            lhs_sum: tidy(self.lhs_sum),
            key_rate_lower_bound: tidy(self.key_rate_lower_bound),
            ..self.clone()
        }
    }

    /// Checks the algebraic relations between the fields.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        close(self.lhs_sum, self.h_x_given_xp + self.h_z_given_zp)
            && close(self.mu_bound, -2.0 * self.c_overlap.log2())
            && close(self.memory_bound, self.mu_bound + self.s_a_given_b)
            && close(self.key_rate_lower_bound, self.mu_bound - self.lhs_sum)
            && self.steering_satisfied == (self.lhs_sum >= self.mu_bound - SLACK)
            && self.memory_inequality_satisfied == (self.lhs_sum >= self.memory_bound - SLACK)
    }
}

/// C(X, Z) = max over effect pairs of ‖√E_X(x) √E_Z(z)‖₁.
pub fn overlap_c(x: &Povm, z: &Povm) -> Result<f64> {
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: z.dim() });
    }
    let roots = |p: &Povm| -> Result<Vec<Matrix>> { p.effects().iter().map(psd_sqrt).collect() };
    let (rx, rz) = (roots(x)?, roots(z)?);
    let mut best: f64 = 0.0;
    for a in &rx {
        for b in &rz {
            best = best.max(trace_norm(&(a * b)));
        }
    }
    Ok(best)
}

/// −2 log₂ C(X, Z).
pub fn mu_bound(x: &Povm, z: &Povm) -> Result<f64> {
    Ok(-2.0 * overlap_c(x, z)?.log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// H(X) + H(Z) ≥ −2 log₂ C(X, Z) on a single system.
pub fn mu_bound_check(x: &Povm, z: &Povm, rho: &Matrix) -> Result<BoundCheck> {
    let hx = shannon_entropy(&outcome_distribution(x, rho)?)?;
    let hz = shannon_entropy(&outcome_distribution(z, rho)?)?;
    let rhs = mu_bound(x, z)?;
    let lhs = hx + hz;
    Ok(BoundCheck { lhs, rhs, satisfied: lhs >= rhs - SLACK })
}

fn conditional_pair(s: &Scenario) -> Result<(f64, f64)> {
    let jx = joint_outcome_distribution(&s.state, &s.alice_x, &s.bob_x)?;
    let jz = joint_outcome_distribution(&s.state, &s.alice_z, &s.bob_z)?;
    Ok((conditional_shannon(&jx, Subsystem::B), conditional_shannon(&jz, Subsystem::B)))
}

pub fn memory_bound_report(s: &Scenario) -> Result<UncertaintyReport> {
    let c_overlap = overlap_c(&s.alice_x, &s.alice_z)?;
    let mu_bound = -2.0 * c_overlap.log2();
    let s_a_given_b = conditional_von_neumann(&s.state);
    let memory_bound = mu_bound + s_a_given_b;
    let (h_x_given_xp, h_z_given_zp) = conditional_pair(s)?;
    let lhs_sum = h_x_given_xp + h_z_given_zp;
    Ok(UncertaintyReport {
        c_overlap,
        mu_bound,
        s_a_given_b,
        memory_bound,
        h_x_given_xp,
        h_z_given_zp,
        lhs_sum,
        steering_satisfied: lhs_sum >= mu_bound - SLACK,
        memory_inequality_satisfied: lhs_sum >= memory_bound - SLACK,
        key_rate_lower_bound: mu_bound - lhs_sum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteeringCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

/// H(X|X′) + H(Z|Z′) against Alice's −2 log₂ C(X, Z).
pub fn steering_check(s: &Scenario) -> Result<SteeringCheck> {
    let (hx, hz) = conditional_pair(s)?;
    let lhs = hx + hz;
    let rhs = mu_bound(&s.alice_x, &s.alice_z)?;
    Ok(SteeringCheck { lhs, rhs, violated: lhs < rhs - SLACK })
}

/// K ≥ −2 log₂ C(X, Z) − [H(X|X′) + H(Z|Z′)], bits per shared state.
/// Negative values mean no key is guaranteed.
pub fn key_rate_lower_bound(s: &Scenario) -> Result<f64> {
    let (hx, hz) = conditional_pair(s)?;
    Ok(mu_bound(&s.alice_x, &s.alice_z)? - (hx + hz))
}

/// S(X|E) + S(Z|B) ≥ −2 log₂ c, checked on caller-supplied numbers.
pub fn eve_tradeoff_bound(s_x_given_e: f64, s_z_given_b: f64, c: f64) -> Result<bool> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::OutOfRange { name: "c", value: c });
    }
    Ok(s_x_given_e + s_z_given_b >= -2.0 * c.log2() - SLACK)
}

/// 2·H[(1 + η)/2]: H(X|X′) + H(Z|Z′) for the singlet with sharp Pauli
/// measurements on Alice's side and η-unsharp ones on Bob's.
pub fn closed_form_game_entropy(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange { name: "eta", value: eta });
    }
    Ok(2.0 * binary_entropy((1.0 + eta) / 2.0)?)
}

/// Smallest η at which the closed-form game entropy drops to `bound`,
/// found by bisection (the entropy is decreasing in η).
pub fn closed_form_threshold(bound: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&bound) {
        return Err(Error::OutOfRange { name: "bound", value: bound });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if closed_form_game_entropy(mid)? > bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{projective_from_observable, unsharp_qubit_povm, UnsharpQubitSpec};
    use crate::states::{bell_singlet, werner_state};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pv(m: Matrix) -> Povm {
        projective_from_observable(&m).unwrap()
    }

    fn game(state: BipartiteState, eta: f64) -> Scenario {
        Scenario::new(
            state,
            pv(Matrix::pauli_x()),
            pv(Matrix::pauli_z()),
            unsharp_qubit_povm(&UnsharpQubitSpec::x(eta).unwrap()),
            unsharp_qubit_povm(&UnsharpQubitSpec::z(eta).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn overlap_examples() {
        let (x, z) = (pv(Matrix::pauli_x()), pv(Matrix::pauli_z()));
        let c = overlap_c(&x, &z).unwrap();
        assert!((c - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((mu_bound(&x, &z).unwrap() - 1.0).abs() < 1e-12);
        assert!((overlap_c(&z, &z).unwrap() - 1.0).abs() < 1e-12);
        let uz = unsharp_qubit_povm(&UnsharpQubitSpec::z(0.8).unwrap());
        assert!((overlap_c(&z, &uz).unwrap() - 0.9_f64.sqrt()).abs() < 1e-12);
        assert!(overlap_c(&z, &pv(Matrix::diag(&[1.0, 2.0, 3.0]))).is_err());
    }

    #[test]
    fn mu_check_examples() {
        let (x, z) = (pv(Matrix::pauli_x()), pv(Matrix::pauli_z()));
        let zero = Matrix::diag(&[1.0, 0.0]);
        let r = mu_bound_check(&x, &z, &zero).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.satisfied);
        let r = mu_bound_check(&x, &z, &Matrix::identity(2).scale_real(0.5)).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && r.satisfied);
        let plus = Matrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let r = mu_bound_check(&x, &z, &plus).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.satisfied);
    }

    #[test]
    fn all_sharp_singlet_report() {
        let r = memory_bound_report(&game(bell_singlet(), 1.0)).unwrap();
        assert!(r.lhs_sum.abs() < 1e-9);
        assert!(r.memory_bound.abs() < 1e-9);
        assert!(r.memory_inequality_satisfied);
        assert!(!r.steering_satisfied);
        assert!(r.is_consistent(1e-12));
    }

    #[test]
    fn threshold_eta_report() {
        let r = memory_bound_report(&game(bell_singlet(), FRAC_1_SQRT_2)).unwrap();
        // 2·H(0.853553...) evaluated independently: 1.2017520733857122
        assert!((r.lhs_sum - 1.201_752_073_385_712).abs() < 1e-9);
        assert!(r.memory_inequality_satisfied && r.steering_satisfied);
        assert!((r.key_rate_lower_bound + 0.201_752_073_385_712_2).abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_report() {
        let s = Scenario::new(
            werner_state(0.0).unwrap(),
            pv(Matrix::pauli_x()),
            pv(Matrix::pauli_z()),
            pv(Matrix::pauli_x()),
            pv(Matrix::pauli_z()),
        )
        .unwrap();
        let r = memory_bound_report(&s).unwrap();
        assert!((r.lhs_sum - 2.0).abs() < 1e-12);
        assert!((r.memory_bound - 2.0).abs() < 1e-12);
        assert!(r.memory_inequality_satisfied);
    }

    #[test]
    fn steering_examples() {
        let c = steering_check(&game(bell_singlet(), 0.7)).unwrap();
        // 2·H(0.85) = 1.2196806094328008
        assert!((c.lhs - 1.219_680_609_432_800_8).abs() < 1e-9 && !c.violated);
        let c = steering_check(&game(bell_singlet(), 1.0)).unwrap();
        assert!(c.lhs.abs() < 1e-9 && c.violated);
        let c = steering_check(&game(bell_singlet(), 0.78)).unwrap();
        // 2·H(0.89) = 0.9998319163290560
        assert!((c.lhs - 0.999_831_916_329_056).abs() < 1e-9 && c.violated);
    }

    #[test]
    fn key_rate_examples() {
        assert!((key_rate_lower_bound(&game(bell_singlet(), 1.0)).unwrap() - 1.0).abs() < 1e-9);
        let k = key_rate_lower_bound(&game(bell_singlet(), 0.9)).unwrap();
        // 1 − 2·H(0.95) = 0.42720608576808774
        assert!((k - 0.427_206_085_768_088).abs() < 1e-9);
    }

    #[test]
    fn eve_examples() {
        assert!(eve_tradeoff_bound(1.0, 0.0, FRAC_1_SQRT_2).unwrap());
        assert!(!eve_tradeoff_bound(0.0, 0.0, FRAC_1_SQRT_2).unwrap());
        assert!(eve_tradeoff_bound(0.6, 0.5, FRAC_1_SQRT_2).unwrap());
        assert!(eve_tradeoff_bound(0.6, 0.5, 0.0).is_err());
        assert!(eve_tradeoff_bound(0.6, 0.5, 1.5).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_game_entropy(1.0).unwrap(), 0.0);
        assert!((closed_form_game_entropy(0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((closed_form_game_entropy(FRAC_1_SQRT_2).unwrap() - 1.201_752_073_385_712).abs() < 1e-12);
        assert!(closed_form_game_entropy(1.1).is_err());
        let t = closed_form_threshold(1.0).unwrap();
        assert!((t - 0.779_944_271_123_280_9).abs() < 1e-12);
    }

    #[test]
    fn scenario_dimension_check() {
        let q3 = pv(Matrix::diag(&[1.0, 2.0, 3.0]));
        let err = Scenario::new(
            bell_singlet(),
            q3,
            pv(Matrix::pauli_z()),
            pv(Matrix::pauli_x()),
            pv(Matrix::pauli_z()),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}

//! Bipartite states, joint outcome tables and the entropy functionals
//! (Shannon, binary, conditional Shannon, von Neumann and the conditional
//! entropy of classical-quantum states). All entropies are in bits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::format_number;
use crate::linalg::{self, partial_trace, tensor_product, Matrix, Subsystem, C64, PSD_TOL};
use crate::povm::{born_probabilities, Outcome, Povm};

/// Rejects anything that is not a trace-one PSD operator (tolerance 1e-9).
pub fn check_density(rho: &Matrix) -> Result<()> {
    let deviation = rho.hermitian_deviation();
    if deviation > PSD_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (deviation {deviation:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > PSD_TOL || tr.im.abs() > PSD_TOL {
        return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
    }
    let min = rho.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::InvalidState(format!("min eigenvalue {min:e}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct BipartiteState {
    rho: Matrix,
    d_a: usize,
    d_b: usize,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    d_a: usize,
    d_b: usize,
    rho: Matrix,
}

impl TryFrom<StateRepr> for BipartiteState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        BipartiteState::new(r.rho, r.d_a, r.d_b)
    }
}

impl From<BipartiteState> for StateRepr {
    fn from(s: BipartiteState) -> Self {
        StateRepr { d_a: s.d_a, d_b: s.d_b, rho: s.rho }
    }
}

impl BipartiteState {
    pub fn new(rho: Matrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || rho.dim() != d_a * d_b {
            return Err(Error::DimensionMismatch { expected: d_a * d_b, found: rho.dim() });
        }
        check_density(&rho)?;
        Ok(BipartiteState { rho, d_a, d_b })
    }

    /// Pure state from an amplitude vector, normalized here.
    pub fn pure(amplitudes: &[C64], d_a: usize, d_b: usize) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        let v: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        BipartiteState::new(Matrix::outer(&v), d_a, d_b)
    }

    pub fn product(rho_a: &Matrix, rho_b: &Matrix) -> Result<Self> {
        check_density(rho_a)?;
        check_density(rho_b)?;
        BipartiteState::new(tensor_product(rho_a, rho_b), rho_a.dim(), rho_b.dim())
    }

    pub fn rho(&self) -> &Matrix {
        &self.rho
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn reduced(&self, keep: Subsystem) -> Matrix {
        partial_trace(&self.rho, self.d_a, self.d_b, keep).expect("dimensions checked at construction")
    }
}

/// The two-qubit singlet (|01⟩ − |10⟩)/√2.
pub fn bell_singlet() -> BipartiteState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)];
    BipartiteState::new(Matrix::outer(&psi), 2, 2).expect("singlet is a valid state")
}

/// w·|ψ⁻⟩⟨ψ⁻| + (1 − w)·𝟙/4.
pub fn werner_state(w: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::OutOfRange { name: "w", value: w });
    }
    let rho = bell_singlet().rho.scale_real(w) + Matrix::identity(4).scale_real((1.0 - w) / 4.0);
    BipartiteState::new(rho, 2, 2)
}

/// Probability table over (Alice outcome, Bob outcome), Alice-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointDistribution {
    alice_outcomes: Vec<Outcome>,
    bob_outcomes: Vec<Outcome>,
    p: Vec<f64>,
}

impl JointDistribution {
    /// Entries down to −1e-12 are clipped to zero; the total must be 1
    /// within 1e-9.
    pub fn new(alice_outcomes: Vec<Outcome>, bob_outcomes: Vec<Outcome>, p: Vec<f64>) -> Result<Self> {
        if p.len() != alice_outcomes.len() * bob_outcomes.len() {
            return Err(Error::DimensionMismatch {
                expected: alice_outcomes.len() * bob_outcomes.len(),
                found: p.len(),
            });
        }
        if let Some(&bad) = p.iter().find(|&&v| v < -1e-12 || !v.is_finite()) {
            return Err(Error::OutOfRange { name: "probability", value: bad });
        }
        let p: Vec<f64> = p.into_iter().map(|v| v.max(0.0)).collect();
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Unnormalized { sum });
        }
        Ok(JointDistribution { alice_outcomes, bob_outcomes, p })
    }

    pub fn alice_outcomes(&self) -> &[Outcome] {
        &self.alice_outcomes
    }

    pub fn bob_outcomes(&self) -> &[Outcome] {
        &self.bob_outcomes
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.bob_outcomes.len() + b]
    }

    /// Probability for a pair of outcome labels.
    pub fn prob(&self, alice: Outcome, bob: Outcome) -> Option<f64> {
        let a = self.alice_outcomes.iter().position(|&o| o == alice)?;
        let b = self.bob_outcomes.iter().position(|&o| o == bob)?;
        Some(self.get(a, b))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn marginal(&self, side: Subsystem) -> Vec<f64> {
        let nb = self.bob_outcomes.len();
        match side {
            Subsystem::A => self.p.chunks(nb).map(|row| row.iter().sum()).collect(),
            Subsystem::B => (0..nb).map(|b| self.p.iter().skip(b).step_by(nb).sum()).collect(),
        }
    }

    /// CSV with header `alice_outcome,bob_outcome,probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alice_outcome,bob_outcome,probability\n");
        for (a, &la) in self.alice_outcomes.iter().enumerate() {
            for (b, &lb) in self.bob_outcomes.iter().enumerate() {
                let _ = writeln!(out, "{la},{lb},{}", format_number(self.get(a, b)));
            }
        }
        out
    }
}

/// p(a, b) = Tr[ρ (E_a ⊗ F_b)].
pub fn joint_outcome_distribution(
    state: &BipartiteState,
    alice: &Povm,
    bob: &Povm,
) -> Result<JointDistribution> {
    if alice.dim() != state.d_a {
        return Err(Error::DimensionMismatch { expected: state.d_a, found: alice.dim() });
    }
    if bob.dim() != state.d_b {
        return Err(Error::DimensionMismatch { expected: state.d_b, found: bob.dim() });
    }
    let mut p = Vec::with_capacity(alice.len() * bob.len());
    for e in alice.effects() {
        for f in bob.effects() {
            p.push(state.rho.trace_product(&tensor_product(e, f)).re);
        }
    }
    JointDistribution::new(alice.outcomes().to_vec(), bob.outcomes().to_vec(), p)
}

fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(&bad) = p.iter().find(|v| !v.is_finite() || **v < -PSD_TOL) {
        return Err(Error::OutOfRange { name: "probability", value: bad });
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PSD_TOL {
        return Err(Error::Unnormalized { sum });
    }
    Ok(p.iter().map(|&v| entropy_term(v)).sum())
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    Ok(entropy_term(p) + entropy_term(1.0 - p))
}

/// H(A|B) (or H(B|A)) = H(joint) − H(conditioning marginal).
pub fn conditional_shannon(j: &JointDistribution, condition_on: Subsystem) -> f64 {
    let joint: f64 = j.p.iter().map(|&v| entropy_term(v)).sum();
    let marginal: f64 = j.marginal(condition_on).into_iter().map(entropy_term).sum();
    (joint - marginal).max(0.0)
}

fn spectrum_entropy(rho: &Matrix) -> f64 {
    let es = linalg::hermitian_eigensystem(&rho.hermitian_part()).expect("Hermitian part");
    es.values.iter().map(|&l| entropy_term(l)).sum()
}

pub fn von_neumann_entropy(rho: &Matrix) -> Result<f64> {
    check_density(rho)?;
    Ok(spectrum_entropy(rho))
}

/// S(A|B) = S(ρ_AB) − S(ρ_B).
pub fn conditional_von_neumann(state: &BipartiteState) -> f64 {
    spectrum_entropy(&state.rho) - spectrum_entropy(&state.reduced(Subsystem::B))
}

/// Σ_x |x⟩⟨x| ⊗ ρ_B^(x) with unnormalized blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct CqState {
    blocks: Vec<(Outcome, Matrix)>,
}

impl CqState {
    pub fn new(blocks: Vec<(Outcome, Matrix)>) -> Result<Self> {
        let dim = blocks
            .first()
            .map(|(_, m)| m.dim())
            .ok_or_else(|| Error::InvalidState("empty cq-state".into()))?;
        let mut total = 0.0;
        for (label, m) in &blocks {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
            if !m.is_psd(PSD_TOL) {
                return Err(Error::InvalidState(format!("block {label} is not PSD")));
            }
            total += m.trace().re;
        }
        if (total - 1.0).abs() > PSD_TOL {
            return Err(Error::Unnormalized { sum: total });
        }
        Ok(CqState { blocks })
    }

    pub fn blocks(&self) -> &[(Outcome, Matrix)] {
        &self.blocks
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.blocks.iter().map(|(_, m)| m.trace().re.max(0.0)).collect()
    }

    /// ρ_B = Σ_x ρ_B^(x).
    pub fn memory_state(&self) -> Matrix {
        let dim = self.blocks[0].1.dim();
        self.blocks.iter().fold(Matrix::zeros(dim), |acc, (_, m)| &acc + m)
    }
}

/// ρ_B^(x) = Tr_A[ρ_AB (E(x) ⊗ 𝟙_B)] for each of Alice's outcomes.
pub fn post_measurement_cq(state: &BipartiteState, alice: &Povm) -> Result<CqState> {
    if alice.dim() != state.d_a {
        return Err(Error::DimensionMismatch { expected: state.d_a, found: alice.dim() });
    }
    let id_b = Matrix::identity(state.d_b);
    let blocks = alice
        .outcomes()
        .iter()
        .zip(alice.effects())
        .map(|(&label, e)| {
            let conditioned = &state.rho * &tensor_product(e, &id_b);
            let block = partial_trace(&conditioned, state.d_a, state.d_b, Subsystem::B)
                .expect("dimensions checked")
                .hermitian_part();
            (label, block)
        })
        .collect();
    CqState::new(blocks)
}

/// S(X|B) = H(p) + Σ_x p(x) S(ρ_B^(x)/p(x)) − S(ρ_B).
pub fn conditional_entropy_after_measurement(cq: &CqState) -> f64 {
    let probs = cq.probabilities();
    let h: f64 = probs.iter().map(|&p| entropy_term(p)).sum();
    let blocks: f64 = cq
        .blocks
        .iter()
        .zip(&probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|((_, m), &p)| p * spectrum_entropy(&m.scale_real(1.0 / p)))
        .sum();
    h + blocks - spectrum_entropy(&cq.memory_state())
}

/// Marginal of Alice's POVM on the reduced state, used by consistency
/// checks against the joint table.
pub fn local_distribution(state: &BipartiteState, side: Subsystem, p: &Povm) -> Vec<f64> {
    born_probabilities(p, &state.reduced(side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{projective_from_observable, unsharp_qubit_povm, UnsharpQubitSpec};

    fn pauli_pv(m: Matrix) -> Povm {
        projective_from_observable(&m).unwrap()
    }

    #[test]
    fn singlet_properties() {
        let s = bell_singlet();
        assert!(s.reduced(Subsystem::A).max_abs_diff(&Matrix::identity(2).scale_real(0.5)) < 1e-15);
        let purity = (s.rho() * s.rho()).trace().re;
        assert!((purity - 1.0).abs() < 1e-15);
        assert!((conditional_von_neumann(&s) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_family() {
        assert!(werner_state(1.0).unwrap().rho().max_abs_diff(bell_singlet().rho()) < 1e-15);
        let mixed = werner_state(0.0).unwrap();
        assert!((conditional_von_neumann(&mixed) - 1.0).abs() < 1e-12);
        // spectrum (1+3w)/4 once and (1−w)/4 three times at w = 1/2,
        // evaluated independently: S(ρ) = 1.548794940695398..., S(ρ_B) = 1
        let half = werner_state(0.5).unwrap();
        assert!((conditional_von_neumann(&half) - 0.548_794_940_695_398_5).abs() < 1e-10);
        assert!(werner_state(1.5).is_err());
    }

    #[test]
    fn sharp_x_on_singlet_is_anticorrelated() {
        let px = pauli_pv(Matrix::pauli_x());
        let j = joint_outcome_distribution(&bell_singlet(), &px, &px).unwrap();
        for x in [1, -1] {
            for xp in [1, -1] {
                let expected = 0.25 * (1.0 - (x * xp) as f64);
                assert!((j.prob(x, xp).unwrap() - expected).abs() < 1e-15);
            }
        }
        assert!(conditional_shannon(&j, Subsystem::B).abs() < 1e-12);
    }

    #[test]
    fn unsharp_bob_table() {
        let px = pauli_pv(Matrix::pauli_x());
        let bob = unsharp_qubit_povm(&UnsharpQubitSpec::x(0.6).unwrap());
        let j = joint_outcome_distribution(&bell_singlet(), &px, &bob).unwrap();
        let expected = [(1, 1, 0.1), (1, -1, 0.4), (-1, 1, 0.4), (-1, -1, 0.1)];
        for (a, b, p) in expected {
            assert!((j.prob(a, b).unwrap() - p).abs() < 1e-15);
        }
        // H(X|X') = H(0.8) = 0.721928094887362...
        assert!((conditional_shannon(&j, Subsystem::B) - 0.721_928_094_887_362_3).abs() < 1e-12);
    }

    #[test]
    fn product_state_gives_product_table() {
        let state = werner_state(0.0).unwrap();
        let a = unsharp_qubit_povm(&UnsharpQubitSpec::new([0.6, 0.0, 0.8], 0.7).unwrap());
        let b = pauli_pv(Matrix::pauli_y());
        let j = joint_outcome_distribution(&state, &a, &b).unwrap();
        let (ma, mb) = (j.marginal(Subsystem::A), j.marginal(Subsystem::B));
        for (i, pa) in ma.iter().enumerate() {
            for (k, pb) in mb.iter().enumerate() {
                assert!((j.get(i, k) - pa * pb).abs() < 1e-15);
            }
        }
        let ha = shannon_entropy(&ma).unwrap();
        assert!((conditional_shannon(&j, Subsystem::B) - ha).abs() < 1e-12);
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.9, 0.1]).unwrap() - 0.468_995_593_589_281_2).abs() < 1e-14);
        assert!(matches!(shannon_entropy(&[0.5, 0.6]), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn binary_values() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let p = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        assert!((binary_entropy(p).unwrap() - 0.600_876_036_692_856).abs() < 1e-13);
        assert!(binary_entropy(1.01).is_err());
    }

    #[test]
    fn von_neumann_values() {
        assert!(von_neumann_entropy(bell_singlet().rho()).unwrap().abs() < 1e-12);
        assert!((von_neumann_entropy(&Matrix::identity(2).scale_real(0.5)).unwrap() - 1.0).abs() < 1e-15);
        let d = von_neumann_entropy(&Matrix::diag(&[0.9, 0.1])).unwrap();
        assert!((d - shannon_entropy(&[0.9, 0.1]).unwrap()).abs() < 1e-15);
        assert!(von_neumann_entropy(&Matrix::diag(&[0.9, 0.2])).is_err());
    }

    #[test]
    fn product_conditional_entropy() {
        let ra = Matrix::diag(&[0.9, 0.1]);
        let state = BipartiteState::product(&ra, &Matrix::diag(&[0.3, 0.7])).unwrap();
        let expected = von_neumann_entropy(&ra).unwrap();
        assert!((conditional_von_neumann(&state) - expected).abs() < 1e-12);
    }

    #[test]
    fn singlet_z_cq_blocks() {
        let pz = pauli_pv(Matrix::pauli_z());
        let cq = post_measurement_cq(&bell_singlet(), &pz).unwrap();
        // outcome +1 (|0⟩ for Alice) leaves Bob in ½|1⟩⟨1|
        assert!(cq.blocks()[0].1.max_abs_diff(&Matrix::diag(&[0.0, 0.5])) < 1e-15);
        assert!(cq.blocks()[1].1.max_abs_diff(&Matrix::diag(&[0.5, 0.0])) < 1e-15);
        assert!(conditional_entropy_after_measurement(&cq).abs() < 1e-12);
    }

    #[test]
    fn cq_of_product_and_mixed_states() {
        let ra = Matrix::from_real(2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let rb = Matrix::diag(&[0.25, 0.75]);
        let state = BipartiteState::product(&ra, &rb).unwrap();
        let px = pauli_pv(Matrix::pauli_x());
        let cq = post_measurement_cq(&state, &px).unwrap();
        let probs = cq.probabilities();
        let local = local_distribution(&state, Subsystem::A, &px);
        for ((_, block), (&p, &l)) in cq.blocks().iter().zip(probs.iter().zip(&local)) {
            assert!(block.max_abs_diff(&rb.scale_real(p)) < 1e-15);
            assert!((p - l).abs() < 1e-15);
        }

        let mixed = werner_state(0.0).unwrap();
        let pz = pauli_pv(Matrix::pauli_z());
        let cq = post_measurement_cq(&mixed, &pz).unwrap();
        for (_, block) in cq.blocks() {
            assert!(block.max_abs_diff(&Matrix::identity(2).scale_real(0.25)) < 1e-15);
        }
        assert!((conditional_entropy_after_measurement(&cq) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_x_cq_entropy() {
        let px = pauli_pv(Matrix::pauli_x());
        let cq = post_measurement_cq(&werner_state(1.0).unwrap(), &px).unwrap();
        assert!(conditional_entropy_after_measurement(&cq).abs() < 1e-12);
    }

    #[test]
    fn joint_table_rejects_bad_input() {
        assert!(JointDistribution::new(vec![0, 1], vec![0], vec![0.5, 0.6]).is_err());
        assert!(JointDistribution::new(vec![0, 1], vec![0], vec![1.1, -0.1]).is_err());
        let j = JointDistribution::new(vec![0, 1], vec![0], vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(j.get(1, 0), 0.0);
    }

    #[test]
    fn csv_layout() {
        let j = JointDistribution::new(vec![1, -1], vec![1, -1], vec![0.1, 0.4, 0.4, 0.1]).unwrap();
        assert_eq!(
            j.to_csv(),
            "alice_outcome,bob_outcome,probability\n1,1,0.1\n1,-1,0.4\n-1,1,0.4\n-1,-1,0.1\n"
        );
    }

    #[test]
    fn state_json_validates() {
        let s = bell_singlet();
        let text = serde_json::to_string(&s).unwrap();
        let back: BipartiteState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"d_a":2,"d_b":1,"rho":{"dim":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}}"#;
        assert!(serde_json::from_str::<BipartiteState>(bad).is_err());
    }
}

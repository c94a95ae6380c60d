//! POVMs, the qubit observables of the uncertainty game, Born-rule
//! distributions and classical post-processing of a parent measurement.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, PSD_TOL};
use crate::states::check_density;

/// Outcome labels are signed so that ±1 conventions survive untouched.
pub type Outcome = i64;

/// Raw POVM data as read from a file, before any validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmData {
    pub dim: usize,
    pub outcomes: Vec<Outcome>,
    pub effects: Vec<Matrix>,
}

/// A validated POVM: PSD effects bounded by 𝟙 that sum to 𝟙.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmData", into = "PovmData")]
pub struct Povm {
    dim: usize,
    outcomes: Vec<Outcome>,
    effects: Vec<Matrix>,
}

impl TryFrom<PovmData> for Povm {
    type Error = Error;

    fn try_from(data: PovmData) -> Result<Self> {
        Povm::new(data.dim, data.outcomes, data.effects)
    }
}

impl From<Povm> for PovmData {
    fn from(p: Povm) -> Self {
        PovmData { dim: p.dim, outcomes: p.outcomes, effects: p.effects }
    }
}

impl Povm {
    pub fn new(dim: usize, outcomes: Vec<Outcome>, effects: Vec<Matrix>) -> Result<Self> {
        Povm::new_with_tol(dim, outcomes, effects, PSD_TOL)
    }

    /// Validates against a caller-chosen tolerance; used for numerically
    /// reconstructed measurements such as solver witnesses.
    pub fn new_with_tol(
        dim: usize,
        outcomes: Vec<Outcome>,
        effects: Vec<Matrix>,
        tol: f64,
    ) -> Result<Self> {
        let data = PovmData { dim, outcomes, effects };
        let report = validate_povm_with_tol(&data, tol);
        if !report.is_valid() {
            return Err(Error::InvalidPovm(report));
        }
        Ok(Povm { dim: data.dim, outcomes: data.outcomes, effects: data.effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[Matrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effect(&self, outcome: Outcome) -> Option<&Matrix> {
        self.outcomes.iter().position(|&o| o == outcome).map(|k| &self.effects[k])
    }

    pub fn to_data(&self) -> PovmData {
        self.clone().into()
    }

    /// Largest entrywise difference between matching effects, or `None`
    /// when the two POVMs do not have the same shape.
    pub fn max_effect_diff(&self, other: &Povm) -> Option<f64> {
        if self.dim != other.dim || self.len() != other.len() {
            return None;
        }
        Some(
            self.effects
                .iter()
                .zip(&other.effects)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    LengthMismatch { outcomes: usize, effects: usize },
    DimensionMismatch { index: usize, dim: usize },
    DuplicateLabel { label: Outcome },
    NotHermitian { outcome: Outcome, deviation: f64 },
    NotPsd { outcome: Outcome, min_eigenvalue: f64 },
    ExceedsIdentity { outcome: Outcome, residual: f64 },
    Incomplete { residual: f64 },
}

impl Violation {
    pub fn residual(&self) -> f64 {
        match *self {
            Violation::NotHermitian { deviation, .. } => deviation,
            Violation::NotPsd { min_eigenvalue, .. } => -min_eigenvalue,
            Violation::ExceedsIdentity { residual, .. } => residual,
            Violation::Incomplete { residual } => residual,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "no effects"),
            Violation::LengthMismatch { outcomes, effects } => {
                write!(f, "{outcomes} outcome labels for {effects} effects")
            }
            Violation::DimensionMismatch { index, dim } => {
                write!(f, "effect #{index} has dimension {dim}")
            }
            Violation::DuplicateLabel { label } => write!(f, "duplicate outcome label {label}"),
            Violation::NotHermitian { outcome, deviation } => {
                write!(f, "effect {outcome} not Hermitian (deviation {deviation:e})")
            }
            Violation::NotPsd { outcome, min_eigenvalue } => {
                write!(f, "effect {outcome} not PSD (min eigenvalue {min_eigenvalue:e})")
            }
            Violation::ExceedsIdentity { outcome, residual } => {
                write!(f, "effect {outcome} exceeds identity by {residual:e}")
            }
            Violation::Incomplete { residual } => {
                write!(f, "effects do not sum to identity (residual {residual:e})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.violations.iter().map(Violation::residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate_povm(p: &PovmData) -> ValidationReport {
    validate_povm_with_tol(p, PSD_TOL)
}

pub fn validate_povm_with_tol(p: &PovmData, tol: f64) -> ValidationReport {
    let mut violations = Vec::new();
    if p.effects.is_empty() {
        violations.push(Violation::Empty);
        return ValidationReport { violations };
    }
    if p.outcomes.len() != p.effects.len() {
        violations.push(Violation::LengthMismatch {
            outcomes: p.outcomes.len(),
            effects: p.effects.len(),
        });
    }
    for (i, &label) in p.outcomes.iter().enumerate() {
        if p.outcomes[..i].contains(&label) {
            violations.push(Violation::DuplicateLabel { label });
        }
    }
    let mut shape_ok = true;
    for (index, e) in p.effects.iter().enumerate() {
        if e.dim() != p.dim {
            violations.push(Violation::DimensionMismatch { index, dim: e.dim() });
            shape_ok = false;
        }
    }
    if !shape_ok {
        return ValidationReport { violations };
    }

    let identity = Matrix::identity(p.dim);
    let mut sum = Matrix::zeros(p.dim);
    for (index, e) in p.effects.iter().enumerate() {
        let outcome = p.outcomes.get(index).copied().unwrap_or(index as Outcome);
        let deviation = e.hermitian_deviation();
        if deviation > tol.max(linalg::HERMITIAN_TOL) {
            violations.push(Violation::NotHermitian { outcome, deviation });
        } else {
            let min_eigenvalue = e.min_eigenvalue();
            if min_eigenvalue < -tol {
                violations.push(Violation::NotPsd { outcome, min_eigenvalue });
            }
            let headroom = (&identity - e).min_eigenvalue();
            if headroom < -tol {
                violations.push(Violation::ExceedsIdentity { outcome, residual: -headroom });
            }
        }
        sum = &sum + e;
    }
    let residual = sum.max_abs_diff(&identity);
    if residual > tol {
        violations.push(Violation::Incomplete { residual });
    }
    ValidationReport { violations }
}

/// Spectral projectors of a nondegenerate observable, listed from the
/// largest eigenvalue down. Labels are the eigenvalues when they are all
/// integers, otherwise positions `0..n`.
pub fn projective_from_observable(obs: &Matrix) -> Result<Povm> {
    let es = linalg::hermitian_eigensystem(obs)?;
    let n = obs.dim();
    let gap = es.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if n > 1 && gap <= 1e-9 {
        return Err(Error::DegenerateSpectrum { gap });
    }
    let order: Vec<usize> = (0..n).rev().collect();
    let integral = es.values.iter().all(|l| (l - l.round()).abs() <= 1e-9);
    let outcomes = order
        .iter()
        .enumerate()
        .map(|(pos, &k)| if integral { es.values[k].round() as Outcome } else { pos as Outcome })
        .collect();
    let effects = order.iter().map(|&k| Matrix::outer(&es.vector(k))).collect();
    Povm::new(n, outcomes, effects)
}

/// Direction and sharpness of an unbiased dichotomic qubit observable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnsharpRepr", into = "UnsharpRepr")]
pub struct UnsharpQubitSpec {
    axis: [f64; 3],
    eta: f64,
}

#[derive(Serialize, Deserialize)]
struct UnsharpRepr {
    axis: [f64; 3],
    eta: f64,
}

impl TryFrom<UnsharpRepr> for UnsharpQubitSpec {
    type Error = Error;

    fn try_from(r: UnsharpRepr) -> Result<Self> {
        UnsharpQubitSpec::new(r.axis, r.eta)
    }
}

impl From<UnsharpQubitSpec> for UnsharpRepr {
    fn from(s: UnsharpQubitSpec) -> Self {
        UnsharpRepr { axis: s.axis, eta: s.eta }
    }
}

impl UnsharpQubitSpec {
    pub fn new(axis: [f64; 3], eta: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange { name: "|axis|", value: norm });
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange { name: "eta", value: eta });
        }
        Ok(UnsharpQubitSpec { axis, eta })
    }

    pub fn x(eta: f64) -> Result<Self> {
        UnsharpQubitSpec::new([1.0, 0.0, 0.0], eta)
    }

    pub fn z(eta: f64) -> Result<Self> {
        UnsharpQubitSpec::new([0.0, 0.0, 1.0], eta)
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// η·n⃗, the Bloch vector of the `+1` effect's traceless part.
    pub fn scaled_axis(&self) -> [f64; 3] {
        self.axis.map(|a| a * self.eta)
    }

    /// Recovers the spec of an unbiased two-outcome qubit POVM. The first
    /// effect (or the one labelled `+1`) is read as ½(𝟙 + η n⃗·σ⃗).
    pub fn from_povm(p: &Povm) -> Option<Self> {
        if p.dim() != 2 || p.len() != 2 {
            return None;
        }
        let plus = p.effect(1).unwrap_or(&p.effects()[0]);
        if (plus.trace().re - 1.0).abs() > 1e-9 {
            return None;
        }
        let r = [Matrix::pauli_x(), Matrix::pauli_y(), Matrix::pauli_z()]
            .map(|s| plus.trace_product(&s).re);
        let eta = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        if eta > 1.0 + 1e-9 {
            return None;
        }
        if eta < 1e-12 {
            return Some(UnsharpQubitSpec { axis: [0.0, 0.0, 1.0], eta: 0.0 });
        }
        Some(UnsharpQubitSpec { axis: r.map(|a| a / eta), eta: eta.min(1.0) })
    }
}

/// Effects ½(𝟙 ± η n⃗·σ⃗) labelled `+1`, `-1`.
pub fn unsharp_qubit_povm(spec: &UnsharpQubitSpec) -> Povm {
    let id = Matrix::identity(2);
    let obs = Matrix::bloch_observable(spec.axis).scale_real(spec.eta);
    let plus = (&id + &obs).scale_real(0.5);
    let minus = (&id - &obs).scale_real(0.5);
    Povm::new(2, vec![1, -1], vec![plus, minus])
        .expect("unsharp qubit effects are valid for 0 <= eta <= 1")
}

/// Born-rule probabilities Tr[ρ E(x)] in effect order.
pub fn outcome_distribution(p: &Povm, rho: &Matrix) -> Result<Vec<f64>> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: rho.dim() });
    }
    check_density(rho)?;
    Ok(born_probabilities(p, rho))
}

pub(crate) fn born_probabilities(p: &Povm, rho: &Matrix) -> Vec<f64> {
    p.effects().iter().map(|e| rho.trace_product(e).re.max(0.0)).collect()
}

/// Mixed-radix position of an outcome tuple, first setting most significant.
pub fn product_index(digits: &[usize], arities: &[usize]) -> usize {
    digits.iter().zip(arities).fold(0, |acc, (&d, &k)| acc * k + d)
}

/// Inverse of [`product_index`].
pub fn product_digits(mut index: usize, arities: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; arities.len()];
    for (slot, &k) in digits.iter_mut().zip(arities).rev() {
        *slot = index % k;
        index /= k;
    }
    digits
}

/// Conditional distributions p(x | setting, λ) of a classical
/// post-processing, indexed `[setting][λ][x]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseFunctions {
    table: Vec<Vec<Vec<f64>>>,
}

impl ResponseFunctions {
    pub fn new(table: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        for (i, setting) in table.iter().enumerate() {
            for (lambda, row) in setting.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if row.iter().any(|&v| v < 0.0 || !v.is_finite()) || (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::MissingResponse(format!(
                        "p(. | {i}, {lambda}) is not a probability distribution"
                    )));
                }
            }
        }
        Ok(ResponseFunctions { table })
    }

    /// Deterministic marginal post-processing: λ is a tuple of outcome
    /// indices and setting `i` reads off its `i`-th component.
    pub fn marginal(arities: &[usize]) -> Self {
        let size: usize = arities.iter().product();
        let table = arities
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                (0..size)
                    .map(|lambda| {
                        let digit = product_digits(lambda, arities)[i];
                        (0..k).map(|x| if x == digit { 1.0 } else { 0.0 }).collect()
                    })
                    .collect()
            })
            .collect();
        ResponseFunctions { table }
    }

    pub fn settings(&self) -> usize {
        self.table.len()
    }

    fn setting_rows(&self, grand: &Povm, setting: usize) -> Result<&Vec<Vec<f64>>> {
        let rows = self
            .table
            .get(setting)
            .ok_or_else(|| Error::MissingResponse(format!("no entries for setting {setting}")))?;
        if rows.len() != grand.len() {
            return Err(Error::MissingResponse(format!(
                "setting {setting} covers {} grand outcomes, POVM has {}",
                rows.len(),
                grand.len()
            )));
        }
        let width = rows.first().map_or(0, Vec::len);
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::MissingResponse(format!(
                "setting {setting} has ragged outcome rows"
            )));
        }
        Ok(rows)
    }

    /// E_i(x) = Σ_λ p(x | i, λ) G(λ), labelled `0..k`.
    pub fn reconstruct(&self, grand: &Povm, setting: usize) -> Result<Povm> {
        let rows = self.setting_rows(grand, setting)?;
        let k = rows[0].len();
        let effects = (0..k)
            .map(|x| {
                rows.iter().zip(grand.effects()).fold(Matrix::zeros(grand.dim()), |acc, (row, g)| {
                    &acc + &g.scale_real(row[x])
                })
            })
            .collect();
        Povm::new_with_tol(grand.dim(), (0..k as Outcome).collect(), effects, 1e-7)
    }
}

/// p(x | i) = Σ_λ p(λ) p(x | i, λ) from the grand measurement's statistics.
pub fn post_process_distribution(
    grand: &Povm,
    rf: &ResponseFunctions,
    setting: usize,
    rho: &Matrix,
) -> Result<Vec<f64>> {
    let rows = rf.setting_rows(grand, setting)?;
    let p_lambda = outcome_distribution(grand, rho)?;
    let k = rows[0].len();
    let mut out = vec![0.0; k];
    for (row, &pl) in rows.iter().zip(&p_lambda) {
        for (o, &r) in out.iter_mut().zip(row) {
            *o += pl * r;
        }
    }
    Ok(out)
}

//! File formats and batch runs used by the `jmsteer` binary: scenario
//! files, parameter sweeps and joint-measurability scans.
//!
//! Templates are ordinary scenario (or POVM) JSON in which a swept number
//! is written as the string `"$eta"` or `"$werner_w"`; every such
//! placeholder is replaced before the document is parsed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::compatibility::{busch_pair_criterion, jm_feasibility, JmStatus, SolverOptions};
use crate::error::Error as CoreError;
use crate::format::format_number;
use crate::inequalities::{memory_bound_report, Scenario, UncertaintyReport};
use crate::linalg::Matrix;
use crate::povm::{
    projective_from_observable, unsharp_qubit_povm, Povm, PovmData, UnsharpQubitSpec,
};
use crate::states::{bell_singlet, joint_outcome_distribution, werner_state, BipartiteState, JointDistribution};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },

    #[error("invalid input: {0}")]
    Spec(String),

    #[error(transparent)]
    Invalid(#[from] CoreError),
}

impl HarnessError {
    /// 2 for unreadable or malformed input, 3 for inputs that parse but
    /// violate an invariant, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } => 1,
            HarnessError::Parse { .. } | HarnessError::Spec(_) => 2,
            HarnessError::Invalid(_) => 3,
        }
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

/// How a measurement is described in a scenario file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PovmSpec {
    /// `{"unsharp": {"axis": [x, y, z], "eta": r}}`
    Unsharp { axis: [f64; 3], eta: f64 },
    /// `{"pauli": "x"}`, the sharp measurement of σx, σy or σz.
    Pauli(String),
    /// `{"observable": matrix}`, spectral projectors of a nondegenerate
    /// Hermitian matrix.
    Observable(Matrix),
    /// `{"povm": {"dim": n, "outcomes": [...], "effects": [...]}}`
    Povm(PovmData),
}

impl PovmSpec {
    pub fn build(&self) -> HarnessResult<Povm> {
        let povm = match self {
            PovmSpec::Unsharp { axis, eta } => {
                unsharp_qubit_povm(&UnsharpQubitSpec::new(*axis, *eta)?)
            }
            PovmSpec::Pauli(name) => {
                let obs = match name.to_ascii_lowercase().as_str() {
                    "x" => Matrix::pauli_x(),
                    "y" => Matrix::pauli_y(),
                    "z" => Matrix::pauli_z(),
                    other => return Err(HarnessError::Spec(format!("unknown Pauli '{other}'"))),
                };
                projective_from_observable(&obs)?
            }
            PovmSpec::Observable(m) => projective_from_observable(m)?,
            PovmSpec::Povm(data) => {
                Povm::new(data.dim, data.outcomes.clone(), data.effects.clone())?
            }
        };
        Ok(povm)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Singlet,
    Werner { w: f64 },
    Density { d_a: usize, d_b: usize, rho: Matrix },
}

impl StateSpec {
    pub fn build(&self) -> HarnessResult<BipartiteState> {
        let state = match self {
            StateSpec::Singlet => bell_singlet(),
            StateSpec::Werner { w } => werner_state(*w)?,
            StateSpec::Density { d_a, d_b, rho } => BipartiteState::new(rho.clone(), *d_a, *d_b)?,
        };
        Ok(state)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub state: StateSpec,
    pub alice_x: PovmSpec,
    pub alice_z: PovmSpec,
    pub bob_x: PovmSpec,
    pub bob_z: PovmSpec,
}

impl ScenarioFile {
    pub fn build(&self) -> HarnessResult<Scenario> {
        Ok(Scenario::new(
            self.state.build()?,
            self.alice_x.build()?,
            self.alice_z.build()?,
            self.bob_x.build()?,
            self.bob_z.build()?,
        )?)
    }
}

fn read_text(path: &Path) -> HarnessResult<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> HarnessResult<T> {
    serde_json::from_str(text).map_err(|source| HarnessError::Parse { path: path.into(), source })
}

pub fn write_output(path: &Path, contents: &str) -> HarnessResult<()> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.into(), source })
}

pub fn load_povm_data(path: &Path) -> HarnessResult<PovmData> {
    parse(path, &read_text(path)?)
}

pub fn load_scenario(path: &Path) -> HarnessResult<ScenarioFile> {
    parse(path, &read_text(path)?)
}

/// Evaluates a scenario file into its full report.
pub fn run_scenario(path: &Path) -> HarnessResult<UncertaintyReport> {
    let scenario = load_scenario(path)?.build()?;
    let report = memory_bound_report(&scenario)?;
    if !report.is_consistent(1e-9) {
        return Err(HarnessError::Invalid(CoreError::Invalid(
            "report failed its internal consistency checks".into(),
        )));
    }
    Ok(report)
}

/// Alice-major joint table for the X or Z round of a scenario.
pub fn joint_table(scenario: &Scenario, round: Round) -> HarnessResult<JointDistribution> {
    let (a, b) = match round {
        Round::X => (&scenario.alice_x, &scenario.bob_x),
        Round::Z => (&scenario.alice_z, &scenario.bob_z),
    };
    Ok(joint_outcome_distribution(&scenario.state, a, b)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Round {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Eta,
    WernerW,
}

impl SweepParameter {
    pub fn placeholder(self) -> &'static str {
        match self {
            SweepParameter::Eta => "$eta",
            SweepParameter::WernerW => "$werner_w",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn check(&self) -> HarnessResult<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start > self.stop {
            return Err(HarnessError::Spec(format!(
                "grid start {} must not exceed stop {}",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(HarnessError::Spec(format!("grid needs at least 2 steps, got {}", self.steps)));
        }
        Ok(())
    }

    /// `start + (stop − start)·i/(steps − 1)`, ascending.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Scenario file with the swept value written as a placeholder string.
    pub template: Value,
}

impl SweepSpec {
    pub fn grid(&self) -> Grid {
        Grid { start: self.start, stop: self.stop, steps: self.steps }
    }
}

/// Replaces every string equal to `placeholder` with `value`.
pub fn substitute(template: &Value, placeholder: &str, value: f64) -> Value {
    match template {
        Value::String(s) if s == placeholder => serde_json::json!(value),
        Value::Array(items) => Value::Array(items.iter().map(|v| substitute(v, placeholder, value)).collect()),
        Value::Object(map) => Value::Object(
            map.iter().map(|(k, v)| (k.clone(), substitute(v, placeholder, value))).collect(),
        ),
        other => other.clone(),
    }
}

fn contains_placeholder(template: &Value, placeholder: &str) -> bool {
    match template {
        Value::String(s) => s == placeholder,
        Value::Array(items) => items.iter().any(|v| contains_placeholder(v, placeholder)),
        Value::Object(map) => map.values().any(|v| contains_placeholder(v, placeholder)),
        _ => false,
    }
}

fn from_template<T: for<'de> Deserialize<'de>>(template: &Value, placeholder: &str, value: f64) -> HarnessResult<T> {
    serde_json::from_value(substitute(template, placeholder, value))
        .map_err(|e| HarnessError::Spec(format!("template at {placeholder} = {value}: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub report: UncertaintyReport,
    /// Analytic verdict on Bob's pair when both are unbiased dichotomic
    /// qubit observables.
    pub busch_compatible: Option<bool>,
}

impl SweepRow {
    pub fn steering_violated(&self) -> bool {
        !self.report.steering_satisfied
    }
}

pub fn load_sweep(path: &Path) -> HarnessResult<SweepSpec> {
    parse(path, &read_text(path)?)
}

pub fn run_sweep(spec: &SweepSpec) -> HarnessResult<Vec<SweepRow>> {
    let grid = spec.grid();
    grid.check()?;
    let placeholder = spec.parameter.placeholder();
    if !contains_placeholder(&spec.template, placeholder) {
        return Err(HarnessError::Spec(format!("template does not mention {placeholder}")));
    }
    grid.points()
        .into_iter()
        .map(|param| {
            let file: ScenarioFile = from_template(&spec.template, placeholder, param)?;
            let scenario = file.build()?;
            let report = memory_bound_report(&scenario)?;
            let busch_compatible = UnsharpQubitSpec::from_povm(&scenario.bob_x)
                .zip(UnsharpQubitSpec::from_povm(&scenario.bob_z))
                .map(|(a, b)| busch_pair_criterion(&a, &b));
            Ok(SweepRow { param, report, busch_compatible })
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "param,h_x_given_xp,h_z_given_zp,lhs_sum,mu_bound,memory_bound,key_rate_lower_bound,steering_violated,busch_compatible";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        let busch = row.busch_compatible.map_or(String::new(), |b| b.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            format_number(row.param),
            format_number(r.h_x_given_xp),
            format_number(r.h_z_given_zp),
            format_number(r.lhs_sum),
            format_number(r.mu_bound),
            format_number(r.memory_bound),
            format_number(r.key_rate_lower_bound),
            row.steering_violated(),
            busch,
        );
    }
    out
}

/// Two POVM templates scanned over a shared `$eta` grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JmScanSpec {
    pub first: Value,
    pub second: Value,
    pub grid: Grid,
    #[serde(default)]
    pub options: SolverOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Agreement {
    Agree,
    Disagree,
    /// Solver could not decide; never an error.
    Indeterminate,
    /// No analytic verdict available for this pair.
    Na,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Disagree => "disagree",
            Agreement::Indeterminate => "indeterminate",
            Agreement::Na => "na",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JmScanRow {
    pub eta: f64,
    pub analytic: Option<bool>,
    pub solver: JmStatus,
    pub residual: f64,
    pub iterations: usize,
    pub agreement: Agreement,
}

pub fn load_jm_scan(path: &Path) -> HarnessResult<JmScanSpec> {
    parse(path, &read_text(path)?)
}

pub fn jm_scan(spec: &JmScanSpec) -> HarnessResult<Vec<JmScanRow>> {
    spec.grid.check()?;
    let placeholder = SweepParameter::Eta.placeholder();
    spec.grid
        .points()
        .into_iter()
        .map(|eta| {
            let first: PovmSpec = from_template(&spec.first, placeholder, eta)?;
            let second: PovmSpec = from_template(&spec.second, placeholder, eta)?;
            let pair = [first.build()?, second.build()?];
            let analytic = UnsharpQubitSpec::from_povm(&pair[0])
                .zip(UnsharpQubitSpec::from_povm(&pair[1]))
                .map(|(a, b)| busch_pair_criterion(&a, &b));
            let verdict = jm_feasibility(&pair, &spec.options)?;
            let agreement = match (analytic, verdict.status) {
                (None, _) => Agreement::Na,
                (Some(_), JmStatus::Indeterminate) => Agreement::Indeterminate,
                (Some(true), JmStatus::Compatible) | (Some(false), JmStatus::Incompatible) => {
                    Agreement::Agree
                }
                _ => Agreement::Disagree,
            };
            Ok(JmScanRow {
                eta,
                analytic,
                solver: verdict.status,
                residual: verdict.residual,
                iterations: verdict.iterations,
                agreement,
            })
        })
        .collect()
}

pub const JM_SCAN_HEADER: &str = "eta,analytic,solver,residual,iterations,agreement";

pub fn jm_scan_csv(rows: &[JmScanRow]) -> String {
    let mut out = String::from(JM_SCAN_HEADER);
    out.push('\n');
    for row in rows {
        let analytic = match row.analytic {
            Some(true) => "compatible",
            Some(false) => "incompatible",
            None => "na",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_number(row.eta),
            analytic,
            row.solver.as_str(),
            format_number(row.residual),
            row.iterations,
            row.agreement.as_str(),
        );
    }
    out
}

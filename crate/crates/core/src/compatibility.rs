//! Joint measurability.
//!
//! Two routes are provided. [`busch_pair_criterion`] is the closed-form test
//! for pairs of unbiased dichotomic qubit observables. [`jm_feasibility`]
//! handles any finite family of POVMs by searching for a grand POVM over the
//! product outcome set whose marginals are the given measurements: Dykstra's
//! alternating projections between the product of PSD cones and the affine
//! subspace cut out by the marginal constraints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::povm::{product_digits, Outcome, Povm, UnsharpQubitSpec};

/// |η_a a⃗ + η_b b⃗| + |η_a a⃗ − η_b b⃗| ≤ 2.
pub fn busch_pair_criterion(a: &UnsharpQubitSpec, b: &UnsharpQubitSpec) -> bool {
    let (u, v) = (a.scaled_axis(), b.scaled_axis());
    let norm = |w: [f64; 3]| w.iter().map(|c| c * c).sum::<f64>().sqrt();
    let plus = norm([u[0] + v[0], u[1] + v[1], u[2] + v[2]]);
    let minus = norm([u[0] - v[0], u[1] - v[1], u[2] - v[2]]);
    plus + minus <= 2.0 + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub infeas_tol: f64,
    pub max_iter: usize,
    pub plateau_window: usize,
    /// Largest product outcome space the solver accepts.
    pub max_outcomes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feas_tol: 1e-7,
            infeas_tol: 1e-4,
            max_iter: 10_000,
            plateau_window: 500,
            max_outcomes: 64,
        }
    }
}

const PLATEAU_REL_CHANGE: f64 = 1e-10;
const POLISH_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JmStatus {
    Compatible,
    Incompatible,
    Indeterminate,
}

impl JmStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            JmStatus::Compatible => "compatible",
            JmStatus::Incompatible => "incompatible",
            JmStatus::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JmVerdict {
    pub status: JmStatus,
    /// Grand POVM labelled by mixed-radix position, first POVM most
    /// significant. Present iff `status` is compatible.
    pub witness: Option<Povm>,
    pub residual: f64,
    pub iterations: usize,
}

/// Precomputed pieces of the affine projection for one problem shape.
struct MarginalProjector {
    /// λ → constraint rows it contributes to.
    membership: Vec<Vec<usize>>,
    /// Moore–Penrose pseudo-inverse of the 0/1 marginal map, `[λ][row]`.
    pinv: Vec<Vec<f64>>,
    targets: Vec<Matrix>,
}

impl MarginalProjector {
    fn new(povms: &[Povm]) -> Self {
        let arities: Vec<usize> = povms.iter().map(Povm::len).collect();
        let size: usize = arities.iter().product();
        let rows: Vec<(usize, usize)> = arities
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| (0..k).map(move |x| (i, x)))
            .collect();
        let targets = rows.iter().map(|&(i, x)| povms[i].effects()[x].clone()).collect();
        let membership: Vec<Vec<usize>> = (0..size)
            .map(|lambda| {
                let digits = product_digits(lambda, &arities);
                rows.iter()
                    .enumerate()
                    .filter(|(_, &(i, x))| digits[i] == x)
                    .map(|(r, _)| r)
                    .collect()
            })
            .collect();

        // Gram = M Mᵀ, entry (r, s) counts λ shared by both constraints.
        let n_rows = rows.len();
        let mut gram = vec![0.0; n_rows * n_rows];
        for members in &membership {
            for &r in members {
                for &s in members {
                    gram[r * n_rows + s] += 1.0;
                }
            }
        }
        let gram = Matrix::from_real(n_rows, &gram).expect("finite gram matrix");
        let es = linalg::hermitian_eigensystem(&gram).expect("gram matrix is symmetric");
        let cutoff = 1e-10 * es.values.last().copied().unwrap_or(1.0);
        let gram_pinv = es.reconstruct_with(|l| if l > cutoff { 1.0 / l } else { 0.0 });

        // M⁺ = Mᵀ (M Mᵀ)⁺
        let pinv = membership
            .iter()
            .map(|members| {
                (0..n_rows)
                    .map(|s| members.iter().map(|&r| gram_pinv[(r, s)].re).sum())
                    .collect()
            })
            .collect();

        MarginalProjector { membership, pinv, targets }
    }

    fn size(&self) -> usize {
        self.membership.len()
    }

    fn marginal_residuals(&self, g: &[Matrix]) -> Vec<Matrix> {
        let mut sums: Vec<Matrix> = self.targets.iter().map(|t| t.scale_real(-1.0)).collect();
        for (members, g_l) in self.membership.iter().zip(g) {
            for &r in members {
                sums[r] = &sums[r] + g_l;
            }
        }
        sums
    }

    /// Orthogonal projection onto {G : marginals of G equal the targets}.
    fn project(&self, g: &[Matrix]) -> Vec<Matrix> {
        let residuals = self.marginal_residuals(g);
        g.iter()
            .zip(&self.pinv)
            .map(|(g_l, coeffs)| {
                coeffs.iter().zip(&residuals).fold(g_l.clone(), |acc, (&c, r)| {
                    if c == 0.0 {
                        acc
                    } else {
                        &acc - &r.scale_real(c)
                    }
                })
            })
            .collect()
    }

    fn max_marginal_error(&self, g: &[Matrix]) -> f64 {
        let dim = g[0].dim();
        self.marginal_residuals(g)
            .iter()
            .map(|r| r.max_abs_diff(&Matrix::zeros(dim)))
            .fold(0.0, f64::max)
    }
}

fn psd_violation(g: &[Matrix]) -> f64 {
    g.iter().map(|m| -linalg::min_eigenvalue_unchecked(m)).fold(0.0, f64::max)
}

fn check_family(povms: &[Povm], opts: &SolverOptions) -> Result<()> {
    let first = povms.first().ok_or_else(|| Error::Invalid("no POVMs given".into()))?;
    for p in povms {
        if p.dim() != first.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: p.dim() });
        }
    }
    let size = povms.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len()));
    match size {
        Some(size) if size <= opts.max_outcomes => Ok(()),
        Some(size) => Err(Error::OutcomeCap { size, cap: opts.max_outcomes }),
        None => Err(Error::OutcomeCap { size: usize::MAX, cap: opts.max_outcomes }),
    }
}

/// Searches for a grand POVM whose marginals are `povms`.
///
/// `compatible` when the PSD violation of the affine iterate drops below
/// `feas_tol`; `incompatible` when it stalls above `infeas_tol` (relative
/// change under 1e-10 across `plateau_window` iterations); otherwise
/// `indeterminate` once `max_iter` is spent.
pub fn jm_feasibility(povms: &[Povm], opts: &SolverOptions) -> Result<JmVerdict> {
    check_family(povms, opts)?;
    let dim = povms[0].dim();
    let proj = MarginalProjector::new(povms);
    let n = proj.size();

    let zeros = vec![Matrix::zeros(dim); n];
    let mut x = proj.project(&zeros);
    let mut p = zeros.clone();
    let mut q = zeros;
    let mut residual = psd_violation(&x);
    let mut history: Vec<f64> = Vec::with_capacity(opts.max_iter.min(100_000));
    let mut iterations = 0;
    let mut status = if residual < opts.feas_tol { Some(JmStatus::Compatible) } else { None };

    let step = |x: &mut Vec<Matrix>, p: &mut Vec<Matrix>, q: &mut Vec<Matrix>| {
        let mut y = Vec::with_capacity(n);
        for (x_l, p_l) in x.iter().zip(p.iter_mut()) {
            let shifted = x_l + p_l;
            let (proj_l, _) = linalg::project_psd_unchecked(&shifted);
            *p_l = &shifted - &proj_l;
            y.push(proj_l);
        }
        let shifted: Vec<Matrix> = y.iter().zip(q.iter()).map(|(a, b)| a + b).collect();
        let next = proj.project(&shifted);
        for ((q_l, s), nx) in q.iter_mut().zip(&shifted).zip(&next) {
            *q_l = s - nx;
        }
        *x = next;
        psd_violation(x)
    };

    while status.is_none() && iterations < opts.max_iter {
        residual = step(&mut x, &mut p, &mut q);
        iterations += 1;
        history.push(residual);
        if residual < opts.feas_tol {
            status = Some(JmStatus::Compatible);
        } else if history.len() > opts.plateau_window && residual > opts.infeas_tol {
            let earlier = history[history.len() - 1 - opts.plateau_window];
            if (earlier - residual).abs() <= PLATEAU_REL_CHANGE * residual {
                status = Some(JmStatus::Incompatible);
            }
        }
    }

    let status = status.unwrap_or(JmStatus::Indeterminate);
    let witness = if status == JmStatus::Compatible {
        // tighten the witness while the budget allows
        let budget = opts.plateau_window.min(opts.max_iter.saturating_sub(iterations));
        let mut extra = 0;
        while residual > POLISH_TOL && extra < budget {
            residual = step(&mut x, &mut p, &mut q);
            extra += 1;
        }
        iterations += extra;
        let labels: Vec<Outcome> = (0..n as Outcome).collect();
        let effects: Vec<Matrix> = x.into_iter().map(|m| m.hermitian_part()).collect();
        let tol = (opts.feas_tol * n as f64).max(proj.max_marginal_error(&effects) * 2.0);
        Some(Povm::new_with_tol(dim, labels, effects, tol)?)
    } else {
        None
    };

    Ok(JmVerdict { status, witness, residual, iterations })
}

/// Sums the grand POVM over every setting except `setting`. Labels of the
/// result are outcome positions `0..arities[setting]`.
pub fn marginal_of_grand(grand: &Povm, setting: usize, arities: &[usize]) -> Result<Povm> {
    if setting >= arities.len() {
        return Err(Error::MalformedLabels(format!(
            "setting {setting} outside {} settings",
            arities.len()
        )));
    }
    if arities.contains(&0) {
        return Err(Error::MalformedLabels("zero arity".into()));
    }
    let size: usize = arities.iter().product();
    if grand.len() != size {
        return Err(Error::MalformedLabels(format!(
            "{} grand outcomes for a product space of {size}",
            grand.len()
        )));
    }
    let mut seen = vec![false; size];
    for &label in grand.outcomes() {
        if label < 0 || label as usize >= size || seen[label as usize] {
            return Err(Error::MalformedLabels(format!("label {label}")));
        }
        seen[label as usize] = true;
    }
    let k = arities[setting];
    let mut effects = vec![Matrix::zeros(grand.dim()); k];
    for (&label, g) in grand.outcomes().iter().zip(grand.effects()) {
        let x = product_digits(label as usize, arities)[setting];
        effects[x] = &effects[x] + g;
    }
    Povm::new_with_tol(grand.dim(), (0..k as Outcome).collect(), effects, 1e-7)
}

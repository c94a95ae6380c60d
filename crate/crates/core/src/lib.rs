//! Joint measurability of POVMs and its consequences for entropic
//! uncertainty with quantum memory, entropic steering and QKD key rates.
//!
//! The modules build on each other bottom-up: [`linalg`] provides dense
//! complex matrices and Hermitian kernels, [`povm`] measurements,
//! [`states`] bipartite states and entropies, [`compatibility`] joint
//! measurability tests, [`inequalities`] the uncertainty and steering
//! relations, and [`harness`] the file formats and batch runs behind the
//! `jmsteer` binary.
//!
//! ```
//! use jmsteer::{bell_singlet, memory_bound_report, projective_from_observable,
//!               unsharp_qubit_povm, Matrix, Scenario, UnsharpQubitSpec};
//!
//! let scenario = Scenario::new(
//!     bell_singlet(),
//!     projective_from_observable(&Matrix::pauli_x())?,
//!     projective_from_observable(&Matrix::pauli_z())?,
//!     unsharp_qubit_povm(&UnsharpQubitSpec::x(0.9)?),
//!     unsharp_qubit_povm(&UnsharpQubitSpec::z(0.9)?),
//! )?;
//! let report = memory_bound_report(&scenario)?;
//! assert!(!report.steering_satisfied);
//! assert!(report.key_rate_lower_bound > 0.427);
//! # Ok::<(), jmsteer::Error>(())
//! ```

pub mod compatibility;
pub mod error;
pub mod format;
pub mod harness;
pub mod inequalities;
pub mod linalg;
pub mod povm;
pub mod states;

pub use compatibility::{busch_pair_criterion, jm_feasibility, marginal_of_grand, JmStatus, JmVerdict, SolverOptions};
pub use error::{Error, Result};
pub use inequalities::{
    closed_form_game_entropy, eve_tradeoff_bound, key_rate_lower_bound, memory_bound_report,
    mu_bound_check, overlap_c, steering_check, Scenario, UncertaintyReport,
};
pub use linalg::{Matrix, Subsystem, C64};
pub use povm::{
    outcome_distribution, post_process_distribution, projective_from_observable, unsharp_qubit_povm,
    validate_povm, Povm, PovmData, ResponseFunctions, UnsharpQubitSpec, ValidationReport,
};
pub use states::{bell_singlet, werner_state, BipartiteState, CqState, JointDistribution};

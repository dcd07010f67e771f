//! Closed-form dynamics of a strongly driven two-level atom in a lossy cavity,
//! with a truncated-Fock master-equation integrator as an independent check.
//!
//! The joint atom-field state lives in a four-dimensional subspace spanned by
//! the atomic `|+>, |->` states and two orthonormal field vectors built from
//! the coherent states `|alpha(t)>` and `|-alpha(t)>`.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod scalar;
pub mod state;
pub mod teleport;

pub use error::{Error, Result};
pub use linalg::{kron2, pauli, C64};
pub use metrics::{
    bell_death_time, bell_max, bell_max_closed_form, concurrence, concurrence_closed_form,
    correlation_matrix, entanglement_of_formation, linear_entropies, linear_entropies_closed_form,
    BellSettings, CorrelationMatrix, LinearEntropies,
};
pub use oracle::{
    evolve_lindblad, evolve_lindblad_fixed, project_to_qubit, truncation_policy, FockJointState,
    ProjectedState, StepControl,
};
pub use scalar::{characteristic_function, scalar_profile, FieldBlock, ScalarProfile, SystemParams};
pub use state::{
    asymptotic_state, coherent_fock, field_qubit_basis, joint_state, reduced_states,
    DensityMatrix, FieldQubitBasis, PhysicalTolerance, QubitDensity, TwoQubitState,
};
pub use teleport::{
    channel_probabilities, one_qubit_report, two_qubit_report, BlochAngles, ChannelProbabilities,
    TeleportationReport,
};

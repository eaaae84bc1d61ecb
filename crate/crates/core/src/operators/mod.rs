//! First-order momentum-space operators O = Σ c_k(p) ∂/∂p_k + M(p) and the
//! canonical, projected and NWFW position, spin and orbital families.

mod calculus;
mod families;
mod geometry;
mod operator;
mod report;
mod suite;

pub use calculus::{commutator, fw_conjugate, hamiltonian_matrix, heisenberg_velocity, project_operator, Direction};
pub use families::{
    canonical_position, canonical_position_in, canonical_spin_in, canonical_spin_oam_total,
    canonical_spin_oam_total_in, hamiltonian_operator, momentum, nwfw_oam, nwfw_position, nwfw_spin,
    projected_oam, projected_position, projected_spin, AngularMomentum,
};
pub use geometry::{
    berry_connection, berry_curvature, berry_curvature_from_commutator, center_of_energy, curvature_of,
    pauli_lubanski, pryce_position, pryce_value, CenterOfEnergy, PauliLubanski,
};
pub use operator::{
    add_triples, constant_field, cross_with_momentum, sub_triples, MomentumOperator, Operator, OperatorValue,
    Representation, ScalarField, SpinOperator,
};
pub use report::{check_identity, sample_kinematics, Bound, OperatorReport};
pub use suite::{
    table1_suite, ClosedFormRow, Family, Table1Config, Table1Report, CLOSED_FORM_TOLERANCE, COMMUTATOR_TOLERANCE,
    CONTINUITY_TOLERANCE, EXACT_TOLERANCE, NWFW_SKIP_REASON,
};

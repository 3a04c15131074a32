//! Transvection Markov chains on ordered Pauli pairs: exact orbit chains,
//! their spectra, mixing-time bounds and full-chain validation.

mod bounds;
mod full;
mod orbit;
mod spectral;
mod transition;

pub use bounds::{lambda_q0_bound, lambda_q1, mixing_report, mixing_time_bound, pi_star, tau_bound, MixingReport};
pub use full::{full_chain, lump, FULL_CHAIN_MAX_M};
pub use orbit::{
    orbit_denominator, orbit_states, q0_structure_check, q1_closed_form, q_empirical, transvection_counts, w1, w2,
    w2_eigenvalue_numer, ChainKind, Q0Structure, ORBIT_CHAIN_MAX_M,
};
pub use spectral::{
    singular_check_r, spectral_report, spectral_report_dense, stationary_distribution, tv_curve, SingularValueReport,
    SpectralReport,
};
pub use transition::TransitionMatrix;

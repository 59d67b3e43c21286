//! Protocol builders for the sensing studies: phase digitization, AC-field
//! estimation and correlation spectroscopy.

pub mod acfield;
pub mod correlation;
pub mod digitize;
pub mod spectrum;

pub use acfield::{
    ac_field_distribution, ac_field_sweep, acquisition_circuit, estimator_spread, is_monotone_staircase,
    simulate_ac_field_estimation, AcFieldEstimate, AcFieldImage, EstimatorSpread, SpreadOptions,
};
pub use correlation::{
    crosstalk, first_step_phases, sensing_step, simulate_correlation_spectroscopy, CorrelationResult, CorrelationRun,
    LedgerWeight, SpinState, TargetSpinConfig, MEMORY_FIDELITIES,
};
pub use digitize::{
    max_outcome, phase_sweep, prepare_phase_state, readout, readout_local_hadamard, readout_qft,
    single_memory_protocol, support_size, top_adjacent_pair, two_memory_qpea_example, uniform_phases, Mapping,
    TwoMemoryOutcome,
};
pub use spectrum::{periodogram, Spectrum};

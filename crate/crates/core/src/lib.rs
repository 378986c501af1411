//! Simulation library for a flux-biased superconducting qubit built from
//! two Josephson junctions in a loop shunted by a linear inductor, with
//! two externally controlled loop fluxes tied as `Φ1 = r Φ2`.
//!
//! The library provides:
//!
//! * [`circuit`] — validated circuit parameters, flux biases, number-basis
//!   operators, and Hamiltonian construction (both the two-cosine form
//!   and the single effective-junction form).
//! * [`spectrum`] — eigenlevels and transition frequencies, parallel flux
//!   sweeps, and a sweet-spot finder that locates, merges, and classifies
//!   the stationary points of the qubit frequency.
//! * [`noise`] — 1/f flux-noise sensitivities (common and differential
//!   mode), single-channel and correlated total dephasing rates, and
//!   dephasing sweeps with an optional self-consistent logarithmic factor.
//! * [`oracle`] — an independent phase-grid discretization of the same
//!   Hamiltonian (Sturm-sequence bisection on a hard-wall grid) used to
//!   cross-check the number-basis route, plus Richardson extrapolation.
//!
//! Conventions: energies and frequencies in GHz, fluxes in units of the
//! flux quantum `Φ0`, phases in radians, rates in 1/s, times in seconds.

pub mod circuit;
pub mod error;
pub mod noise;
pub mod oracle;
pub mod spectrum;

pub use circuit::{
    build_effective_hamiltonian, build_hamiltonian, effective_josephson_energy,
    effective_josephson_energy_at, effective_phase_offset, effective_phase_offset_at,
    lowest_eigenvalues, make_fock_operators, CircuitParams, FluxBias, FockOperators,
};
pub use error::{CoreError, Result};
pub use noise::{
    dephasing_sweep, dephasing_sweep_self_consistent, differential_sensitivity_via_tie_slope,
    flux_sensitivity, mode_dephasing_rate, self_consistent_log_factor, total_dephasing_rate,
    zeta, DephasingProfile, NoiseModel, SensitivityMode, DEFAULT_FD_STEP_PHI0,
    DEFAULT_LOG_FACTOR, MIN_RELIABLE_STEP_PHI0,
};
pub use oracle::{
    phase_grid_eigenlevels, richardson_phase_grid_levels, PhaseGridSpec, BOUNDARY_NORM_LIMIT,
    DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH,
};
pub use spectrum::{
    analytic_sweet_spot_candidates, eigenlevels, f01_at, find_sweet_spots,
    find_sweet_spots_default, linear_branch_slope_ghz_per_phi0, linspace,
    predicted_sweet_spot_count, sweep_spectrum, transition_frequency, SpectrumSweep, SpotKind,
    SweetSpot, SweetSpotSearch, DEFAULT_SEED_GRID_N, DEFAULT_SLOPE_TOL, KIND_PROBE_STEP_PHI0,
    MERGE_RADIUS_PHI0,
};

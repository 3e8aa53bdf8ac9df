//! Channel modeling and link simulation for millimeter-wave radio inside
//! closed metal cavities.
//!
//! The crate covers the full measurement-to-link chain:
//!
//! - [`sounding`] — frequency-domain sweeps, inverse filtering against a
//!   reference sweep, windowing, and the transforms between the channel
//!   frequency response and the channel impulse response.
//! - [`profile`] — multipath detection above a dynamic-range threshold,
//!   power-delay profiles, RMS delay spread and captured-power diagnostics.
//! - [`fits`] — log-domain path-loss regression, exponential decay fits on
//!   single and ensemble profiles, and maximum-likelihood fits of the
//!   Gaussian/gamma/Weibull families to extracted decay constants.
//! - [`arrivals`] — Poisson and two-component mixed-Poisson models for path
//!   inter-arrival times, fitted by EM with deterministic restarts.
//! - [`synthesis`] — stochastic channel generation from a fitted parameter
//!   set (dense-exponential and clustered variants), with published presets.
//! - [`ofdm`] — cyclic-prefix design rules, rate/latency accounting, and a
//!   Monte-Carlo BPSK-OFDM bit-error-rate simulator.
//! - [`io`] — the CSV/JSON file formats shared with the command-line tool.
//!
//! Everything randomized is seeded explicitly and deterministic for a given
//! seed, including across thread counts.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form also rejects NaN, which must never pass a positivity check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrivals;
pub mod error;
pub mod fits;
pub mod io;
pub mod ofdm;
pub mod profile;
pub mod rng;
pub mod sounding;
pub mod synthesis;

pub use error::{Error, Result};
pub use sounding::{
    apply_window, cfr_to_cir, cir_to_cfr, inverse_filter, time_gate, FrequencySweep,
    ImpulseResponse, SweepGeometry, Window,
};
pub use profile::{
    captured_power_fraction, detect_paths, rds_threshold_sweep, rms_delay_spread,
    MultipathProfile, ThresholdSweepRow,
};
pub use fits::{
    fit_decay_constant, fit_distribution, fit_ensemble_decay, fit_path_loss, DecayFit,
    DistributionFamily, FittedDistribution, PathLossFit,
};
pub use arrivals::{fit_arrival_intervals, fit_arrivals, ArrivalFit};
pub use synthesis::{
    measurement_grid, normalize_unit_power, preset, rayleigh_tdl, synthesize_cir,
    synthesize_sv_cir, ArrivalMixture, ChannelModel, Model, NormalParams, Realization, SvModel,
    PRESET_NAMES,
};
pub use ofdm::{
    antenna_gain, bpsk_awgn_ber, bpsk_rayleigh_ber, check_design, check_design_with,
    cp_from_channel, doppler, es_n0_from_eb_n0, rate_and_latency, simulate_ber, BerCurve,
    BerPoint, ChannelSource, CheckThresholds, DesignCheck, DesignEnvelope, OfdmConfig,
    RateLatency, StopRule, SPEED_OF_LIGHT,
};
pub use io::{
    read_cir_csv, read_json, read_profile_csv, read_sidecar, read_sweep_csv, sidecar_path,
    write_ber_csv, write_cir_csv, write_json, write_profile_csv, write_sidecar, write_sweep_csv,
    ArrivalsGroup, DesignReport, EnsembleDecayGroup, FitReport, GammaDistGroup, PathLossGroup,
    RdsGroup, SidecarMeta,
};
pub use rng::{derive_seed, substream};

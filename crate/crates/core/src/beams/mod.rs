//! Dirac-Bessel and annular beam spectra and their observables: spin and
//! orbital angular momentum per operator family, magnetic moment, Hall shift
//! under transverse boosts, real-space vortex components and zitterbewegung.

mod expectation;
mod observables;
mod spectrum;
mod synthesis;
mod zitter;

pub use expectation::{expectation, ANNULUS_STEP};
pub use observables::{
    all_summaries, boosted_centroid, hall_shift_prediction, magnetic_moment_z, nwfw_summary, plane_wave_spin,
    plane_wave_spin_closed, soi_summary, summaries_csv, unpolarized, Centroid, ObservableSummary, OperatorFamily,
    CSV_HEADER,
};
pub use spectrum::{
    build_spectrum, BeamParams, BeamSample, BeamSpectrum, RadialProfile, DEFAULT_N_PHI, DEFAULT_N_RADIAL,
    DEFAULT_RELATIVE_WIDTH, MAX_ELL, RADIAL_SPAN,
};
pub use synthesis::{
    field_at, first_bessel_maximum, synthesize_components, winding_number, ComponentSynthesis, AMPLITUDE_FLOOR,
    WINDING_POINTS,
};
pub use zitter::{
    analyze, default_times, dominant_frequency, linear_fit, zitterbewegung_trace, PacketConfig, ZitterAnalysis,
    ZitterTrace, FLAT_THRESHOLD,
};

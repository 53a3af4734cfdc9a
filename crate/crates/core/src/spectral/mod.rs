//! Exact Fourier-multiplier realization of the layer operators on the unit
//! circle.

mod checks;
mod fourier;
mod multipliers;
mod planewave;

pub use checks::{
    cutoff_smoothing_constant, dgs_min_real, hf_multiplier_norms, lambda_tail_constant,
    verify_inverse_decomposition, hf_multiplier_norms_above, DgsMinimum, HfNorms,
};
pub use fourier::{sobolev_norm, FourierCoefficients};
pub use multipliers::{
    apply, cutoff_multiplier, default_truncation, dtn_multiplier, itd_multiplier, lambda_m,
    layer_multipliers, CircleSpectrum, CutoffSpec, LayerMultipliers, ModeSymbols, MultiplierKind,
    MultiplierOperator, SmoothStep, WaveNumber, apply_with,
};
pub use planewave::{exact_density, planewave_trace, PlaneWaveTrace};

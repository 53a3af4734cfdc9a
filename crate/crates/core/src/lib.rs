//! Galerkin boundary elements for 2-d sound-soft Helmholtz scattering.

pub mod bem;
pub mod curves;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod quadrature;
pub mod scalar;
pub mod scattering;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Curve64 = curves::Curve<f64>;
pub type Mesh64 = bem::Mesh<f64>;
pub type BoundarySpace64 = bem::BoundarySpace<f64>;
pub type DensityVector64 = bem::DensityVector<f64>;
pub type GalerkinSystem64 = bem::GalerkinSystem<f64>;
pub type IncidentField64 = scattering::IncidentField<f64>;
pub type ScatteringSolution64 = scattering::ScatteringSolution<f64>;
pub type WaveNumber64 = spectral::WaveNumber<f64>;
pub type FourierCoefficients64 = spectral::FourierCoefficients<f64>;

pub type Complex32 = num_complex::Complex<f32>;
pub type Curve32 = curves::Curve<f32>;
pub type WaveNumber32 = spectral::WaveNumber<f32>;
pub type FourierCoefficients32 = spectral::FourierCoefficients<f32>;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fourier::FourierCoefficients;
use super::multipliers::{CircleSpectrum, WaveNumber};
use crate::error::{Error, Result};
use crate::kernels::Formulation;
use crate::scalar::{imag_unit, Real};
use crate::specfun::BesselSequence;

/// Fourier data of `exp(ik x.a)` on the unit circle, `a = (cos theta_a, sin theta_a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveTrace<T> {
    pub trace: FourierCoefficients<T>,
    pub normal_derivative: FourierCoefficients<T>,
}

pub(crate) fn i_pow<T: Real>(n: usize) -> Complex<T> {
    match n % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Jacobi–Anger coefficients `sqrt(2pi) i^|m| J_|m|(k) e^{-im theta_a}` and
/// their normal derivatives (`J` replaced by `k J'`).
pub fn planewave_trace<T: Real>(k: WaveNumber<T>, theta_a: T, max_mode: usize) -> Result<PlaneWaveTrace<T>> {
    let kk = k.get();
    if T::from_usize_lossy(max_mode) < T::lit(2.0) * kk + T::lit(40.0) {
        return Err(Error::invalid(format!(
            "plane-wave expansion needs M >= 2k + 40, got M = {max_mode} at k = {kk}"
        )));
    }
    let seq = BesselSequence::new(max_mode, kk)?;
    let tail = seq.j(max_mode).to_real().abs();
    if tail > T::lit(1e-14) {
        log::warn!("plane-wave expansion truncated with |J_M(k)| = {tail}");
    }
    let root = T::TAU().sqrt();
    let coeff = |m: i64, v: T| {
        let n = m.unsigned_abs() as usize;
        i_pow::<T>(n) * Complex::from_polar(root * v, -T::from_i64(m).expect("mode fits") * theta_a)
    };
    let trace = FourierCoefficients::from_fn(max_mode, |m| {
        coeff(m, seq.j(m.unsigned_abs() as usize).to_real())
    });
    let normal_derivative = FourierCoefficients::from_fn(max_mode, |m| {
        coeff(m, kk * seq.j_prime(m.unsigned_abs() as usize).to_real())
    });
    Ok(PlaneWaveTrace {
        trace,
        normal_derivative,
    })
}

/// Density solving the boundary equation exactly for plane-wave incidence.
///
/// `Direct`: `A'_k (d_nu u) = d_nu u^I - ik u^I`, giving `d_nu u` of the total
/// field. `Indirect`: `A_k v = -u^I`.
pub fn exact_density<T: Real>(
    formulation: Formulation,
    k: WaveNumber<T>,
    theta_a: T,
    max_mode: usize,
) -> Result<FourierCoefficients<T>> {
    let pw = planewave_trace(k, theta_a, max_mode)?;
    let sp = CircleSpectrum::new(k, max_mode)?;
    let ik = imag_unit::<T>() * k.get();
    let two = T::lit(2.0);
    Ok(FourierCoefficients::from_fn(max_mode, |m| {
        let lambda = sp.lambda(m);
        match formulation {
            Formulation::Direct => (pw.normal_derivative.get(m) - ik * pw.trace.get(m)) * two / lambda,
            Formulation::Indirect => -pw.trace.get(m) * two / lambda,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hankel1;
    use std::f64::consts::{PI, TAU};

    fn k(x: f64) -> WaveNumber<f64> {
        WaveNumber::new(x).unwrap()
    }

    #[test]
    fn trace_reconstructs_plane_wave() {
        let theta = 0.7;
        let pw = planewave_trace(k(10.0), theta, 80).unwrap();
        for &t in &[0.0, 1.3, 4.0] {
            let want = Complex::new(0.0, 10.0 * (t - theta).cos()).exp();
            assert!((pw.trace.eval(t) - want).norm() < 1e-10);
            let dn = Complex::new(0.0, 10.0 * (t - theta).cos()) * want;
            assert!((pw.normal_derivative.eval(t) - dn).norm() < 1e-9);
        }
        assert!((pw.trace.l2_norm() - TAU.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn rotation_equivariance() {
        let a = planewave_trace(k(6.0), 0.2, 60).unwrap();
        let b = planewave_trace(k(6.0), 0.5, 60).unwrap();
        for m in -10i64..=10 {
            let rot = Complex::from_polar(1.0, -(m as f64) * 0.3);
            assert!((a.trace.get(m) * rot - b.trace.get(m)).norm() < 1e-14);
        }
    }

    #[test]
    fn direct_density_matches_mie_series() {
        let (kk, theta) = (10.0, 0.4);
        let v = exact_density(Formulation::Direct, k(kk), theta, 80).unwrap();
        for m in -80i64..=80 {
            let h = hankel1(m.unsigned_abs() as usize, kk).unwrap().value;
            let want = Complex::new(0.0, -2.0 / PI) * TAU.sqrt() * i_pow::<f64>(m.unsigned_abs() as usize)
                * Complex::from_polar(1.0, -(m as f64) * theta)
                / h;
            assert!((v.get(m) - want).norm() < 1e-8, "m={m}");
        }
    }

    #[test]
    fn densities_satisfy_equations() {
        let kk = k(12.0);
        let pw = planewave_trace(kk, 1.0, 90).unwrap();
        let sp = CircleSpectrum::new(kk, 90).unwrap();
        let v = exact_density(Formulation::Indirect, kk, 1.0, 90).unwrap();
        for m in -90i64..=90 {
            assert!((sp.lambda(m) / 2.0 * v.get(m) + pw.trace.get(m)).norm() < 1e-10);
        }
    }

    #[test]
    fn band_precondition() {
        assert!(planewave_trace(k(40.0), 0.0, 50).is_err());
    }
}

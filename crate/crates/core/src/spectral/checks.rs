use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::multipliers::{CircleSpectrum, CutoffSpec, WaveNumber};
use crate::error::{Error, Result};
use crate::scalar::{imag_unit, Real};

/// `max_{|m| <= M} |2/lambda_m - (1 - itd_m (dtn_m - ik))|`.
pub fn verify_inverse_decomposition<T: Real>(k: WaveNumber<T>, max_mode: usize) -> Result<T> {
    let sp = CircleSpectrum::new(k, max_mode)?;
    let ik = imag_unit::<T>() * k.get();
    let mut worst = T::zero();
    for (m, sym) in sp.symbols().iter().enumerate() {
        let itd = sym
            .itd
            .ok_or_else(|| Error::Singular(format!("impedance denominator vanishes at m = {m}")))?;
        let lhs = Complex::new(T::lit(2.0), T::zero()) / sym.lambda;
        let rhs = Complex::new(T::one(), T::zero()) - itd * (sym.dtn - ik);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DgsMinimum<T> {
    pub min_real: T,
    pub argmin: i64,
}

/// `min_{|m| <= M} Re lambda_m(k)` and where it is attained.
pub fn dgs_min_real<T: Real>(k: WaveNumber<T>, max_mode: usize) -> Result<DgsMinimum<T>> {
    let sp = CircleSpectrum::new(k, max_mode)?;
    let mut best = DgsMinimum {
        min_real: T::infinity(),
        argmin: 0,
    };
    for (m, sym) in sp.symbols().iter().enumerate() {
        if sym.lambda.re < best.min_real {
            best = DgsMinimum {
                min_real: sym.lambda.re,
                argmin: m as i64,
            };
        }
    }
    Ok(best)
}

/// `sup_{(1+delta)k <= m <= M} |lambda_m(k) - 1| m / k`.
pub fn lambda_tail_constant<T: Real>(k: WaveNumber<T>, delta: T, max_mode: usize) -> Result<T> {
    let kk = k.get();
    let lo = ((T::one() + delta) * kk).ceil();
    if !(delta > T::zero()) || T::from_usize_lossy(max_mode) < lo + T::lit(50.0) {
        return Err(Error::invalid(format!(
            "tail scan needs delta > 0 and M >= (1+delta)k + 50 (delta = {delta}, M = {max_mode})"
        )));
    }
    let sp = CircleSpectrum::new(k, max_mode)?;
    let lo = lo.to_usize().unwrap_or(0);
    Ok(sp.symbols()[lo..]
        .iter()
        .enumerate()
        .map(|(i, s)| (s.lambda - T::one()).norm() * T::from_usize_lossy(lo + i) / kk)
        .fold(T::zero(), T::max))
}

/// High-frequency operator norms of `S_k` and `D_k` on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HfNorms<T> {
    /// `sup (1+m^2)^(1/2) |s_m|`.
    pub c_s: T,
    /// `k^-1 sup (1+m^2)^(1/2) |d_m|`.
    pub c_d: T,
}

/// Sup over `m^2 >= (1+epsilon) k^2`, scanned up to `m = 4k + 50`, past which
/// both weighted symbols decrease.
pub fn hf_multiplier_norms<T: Real>(k: WaveNumber<T>, epsilon: T) -> Result<HfNorms<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    hf_multiplier_norms_above(k, T::one() + epsilon)
}

/// As [`hf_multiplier_norms`] with threshold `m^2 >= ratio k^2` for any
/// positive `ratio`, including ones that reach into the transition region.
pub fn hf_multiplier_norms_above<T: Real>(k: WaveNumber<T>, ratio: T) -> Result<HfNorms<T>> {
    if !(ratio > T::zero()) {
        return Err(Error::invalid(format!("ratio must be positive, got {ratio}")));
    }
    let kk = k.get();
    let lo = (ratio.sqrt() * kk).ceil().to_usize().unwrap_or(0);
    let hi = (T::lit(4.0) * kk).ceil().to_usize().unwrap_or(0).max(lo) + 50;
    let sp = CircleSpectrum::new(k, hi)?;
    let mut out = HfNorms {
        c_s: T::zero(),
        c_d: T::zero(),
    };
    for (m, sym) in sp.symbols().iter().enumerate().skip(lo) {
        let w = (T::one() + T::from_usize_lossy(m * m)).sqrt();
        out.c_s = out.c_s.max(w * sym.s.norm());
        out.c_d = out.c_d.max(w * sym.d.norm() / kk);
    }
    Ok(out)
}

/// `k^-1 max_{|m| <= M} (1+m^2)^(1/2) chi(m^2/k^2)`.
pub fn cutoff_smoothing_constant<T: Real>(spec: &CutoffSpec<T>, k: WaveNumber<T>, max_mode: usize) -> T {
    (0..=max_mode)
        .map(|m| {
            let w = (T::one() + T::from_usize_lossy(m * m)).sqrt();
            w * super::multipliers::cutoff_multiplier(spec, k, m as i64)
        })
        .fold(T::zero(), T::max)
        / k.get()
}

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// Coefficients `v_m`, `|m| <= M`, of `v(t) = sum v_m e^{imt} / sqrt(2pi)`.
///
/// With this normalisation the `L^2(0, 2pi)` norm is the Euclidean norm of the
/// coefficient vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients<T> {
    max_mode: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> FourierCoefficients<T> {
    pub fn zeros(max_mode: usize) -> Self {
        Self {
            max_mode,
            coeffs: vec![cplx(T::zero()); 2 * max_mode + 1],
        }
    }

    /// Coefficients ordered from mode `-M` to `M`.
    pub fn from_vec(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::invalid(format!(
                "Fourier coefficient vector must have odd length, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            max_mode: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn from_fn(max_mode: usize, mut f: impl FnMut(i64) -> Complex<T>) -> Self {
        let m = max_mode as i64;
        Self {
            max_mode,
            coeffs: (-m..=m).map(&mut f).collect(),
        }
    }

    /// `e^{i m t} / sqrt(2pi)`: unit coefficient at mode `m`.
    pub fn single_mode(max_mode: usize, m: i64) -> Self {
        let mut v = Self::zeros(max_mode);
        v.set(m, cplx(T::one()));
        v
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let m = self.max_mode as i64;
        -m..=m
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    fn index(&self, m: i64) -> Option<usize> {
        let mm = self.max_mode as i64;
        (m.abs() <= mm).then(|| (m + mm) as usize)
    }

    /// Coefficient of mode `m`; zero outside the band.
    pub fn get(&self, m: i64) -> Complex<T> {
        self.index(m)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| cplx(T::zero()))
    }

    /// Panics if `m` lies outside the band.
    pub fn set(&mut self, m: i64, value: Complex<T>) {
        let i = self.index(m).expect("mode outside band");
        self.coeffs[i] = value;
    }

    /// Truncates or zero-pads to a new band limit.
    pub fn with_max_mode(&self, max_mode: usize) -> Self {
        Self::from_fn(max_mode, |m| self.get(m))
    }

    pub fn l2_norm(&self) -> T {
        sobolev_norm(self, T::zero())
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self {
            max_mode: self.max_mode,
            coeffs: self.coeffs.iter().map(|c| *c * a).collect(),
        }
    }

    /// `self + a * other`, on the larger band.
    pub fn axpy(&self, a: Complex<T>, other: &Self) -> Self {
        let m = self.max_mode.max(other.max_mode);
        Self::from_fn(m, |n| self.get(n) + a * other.get(n))
    }

    /// Point value `v(t)`.
    pub fn eval(&self, t: T) -> Complex<T> {
        let step = Complex::from_polar(T::one(), t);
        let mut phase = Complex::from_polar(T::one(), -t * T::from_usize_lossy(self.max_mode));
        let mut sum = cplx(T::zero());
        for c in &self.coeffs {
            sum = sum + *c * phase;
            phase = phase * step;
        }
        sum / T::TAU().sqrt()
    }

    /// Largest coefficient modulus at the two band edges relative to the norm.
    pub fn edge_fraction(&self) -> T {
        let n = self.l2_norm();
        if n == T::zero() {
            return T::zero();
        }
        let m = self.max_mode as i64;
        self.get(m).norm().max(self.get(-m).norm()) / n
    }
}

/// `(sum (1 + m^2)^s |v_m|^2)^(1/2)`; `s = 0` is the `L^2` norm.
pub fn sobolev_norm<T: Real>(v: &FourierCoefficients<T>, s: T) -> T {
    let terms = v.modes().zip(v.as_slice()).map(|(m, c)| {
        let w = if s == T::zero() {
            T::one()
        } else {
            (T::one() + T::from_i64(m * m).expect("mode fits")).powf(s)
        };
        w * c.norm_sqr()
    });
    crate::scalar::compensated_sum(terms).sqrt()
}

//! Olver's uniform large-order approximations of `J_m(mz)`, `J'_m(mz)` and
//! `H^(1)_m(mz)` for `0 < z < 1`, in terms of Airy functions of `m^(2/3) zeta(z)`.

use num_complex::Complex;

use super::airy::airy_pair;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// `(m, z, zeta)` with `zeta = zeta_of_z(z)`.
#[derive(Clone, Copy, Debug)]
pub struct UniformAsymptoticInput<T> {
    pub m: usize,
    pub z: T,
    pub zeta: T,
}

impl<T: Real> UniformAsymptoticInput<T> {
    pub fn new(m: usize, z: T) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("uniform expansion needs m >= 1"));
        }
        Ok(Self {
            m,
            z,
            zeta: zeta_of_z(z)?,
        })
    }
}

/// `int_z^1 sqrt(1 - t^2)/t dt = atanh(s) - s` with `s = sqrt(1 - z^2)`.
fn zeta_integral<T: Real>(z: T) -> T {
    let s = ((T::one() - z) * (T::one() + z)).sqrt();
    if s < T::lit(0.1) {
        // atanh(s) - s = s^3/3 + s^5/5 + ...
        let s2 = s * s;
        let mut term = s * s2;
        let mut sum = T::zero();
        let mut k = 3usize;
        while term > T::epsilon() * T::lit(1e-3) * sum.max(T::min_positive_value()) {
            sum = sum + term / T::from_usize_lossy(k);
            term = term * s2;
            k += 2;
            if k > 200 {
                break;
            }
        }
        sum
    } else {
        s.atanh() - s
    }
}

/// Olver's variable `zeta(z) = (3/2 int_z^1 t^-1 sqrt(1-t^2) dt)^(2/3)`,
/// a decreasing bijection of `(0, 1)` onto `(0, inf)`.
pub fn zeta_of_z<T: Real>(z: T) -> Result<T> {
    if !(z > T::zero() && z < T::one()) {
        return Err(Error::domain(format!("zeta(z) needs 0 < z < 1, got {z}")));
    }
    Ok((T::lit(1.5) * zeta_integral(z)).powf(T::lit(2.0 / 3.0)))
}

/// Leading-order uniform approximations at `x = m z`.
#[derive(Clone, Copy, Debug)]
pub struct UniformBessel<T> {
    pub j: T,
    pub j_prime: T,
    pub h: Complex<T>,
}

/// Leading terms of the uniform expansions; relative error `O(1/m)`.
pub fn uniform_bessel<T: Real>(m: usize, z: T) -> Result<UniformBessel<T>> {
    let input = UniformAsymptoticInput::new(m, z)?;
    let mf = T::from_usize_lossy(m);
    let m13 = mf.powf(T::lit(1.0 / 3.0));
    let arg = input.zeta * m13 * m13;
    let one_minus_z2 = (T::one() - z) * (T::one() + z);
    let factor = (T::lit(4.0) * input.zeta / one_minus_z2).powf(T::lit(0.25));

    let real = airy_pair(cplx(arg))?;
    let rot = Complex::from_polar(T::one(), T::lit(2.0) * T::PI() / T::lit(3.0));
    let rotated = airy_pair(rot * arg)?;

    let j = factor / m13 * real.ai.re;
    let j_prime = -(T::lit(2.0) / z) / factor / (m13 * m13) * real.ai_prime.re;
    let pre = Complex::from_polar(T::lit(2.0), -T::PI() / T::lit(3.0));
    let h = pre * rotated.ai * (factor / m13);
    Ok(UniformBessel { j, j_prime, h })
}

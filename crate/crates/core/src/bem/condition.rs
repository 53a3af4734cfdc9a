use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::space::BoundarySpace;
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};
use crate::spectral::{default_truncation, CircleSpectrum, WaveNumber};

/// Projection in `(I - P) K (I + K)^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projector {
    /// `L^2` projection onto the boundary-element space.
    Panel,
    /// Fourier truncation to `|m| <= max_mode`.
    Spectral { max_mode: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionOptions {
    pub max_iter: usize,
    /// Relative change of the estimate that counts as stagnation.
    pub tol: f64,
    pub seed: u64,
    /// Fourier band of the input space; `None` uses `ceil(2k) + 100 + N`.
    pub band: Option<usize>,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-6,
            seed: 0x5eed,
            band: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate<T> {
    /// Estimate of `||(I - P) K (I + K)^{-1}||_{L^2 -> L^2}`.
    pub norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub band: usize,
}

/// Power iteration on `T* T` with `T = (I - P)(2A_k - I)(2A_k)^{-1}` on the unit
/// circle, where the multiplier part is exact.
pub fn estimate_qo_condition_norm<T: Real>(
    k: WaveNumber<T>,
    space: &BoundarySpace<T>,
    projector: Projector,
    options: ConditionOptions,
) -> Result<ConditionEstimate<T>> {
    if *space.curve() != Curve::Circle(T::one()) {
        return Err(Error::invalid("the condition estimator needs the unit circle"));
    }
    let band = options.band.unwrap_or_else(|| default_truncation(k.get(), space.dim()));
    let width = 2 * band + 1;
    let spectrum = CircleSpectrum::new(k, band)?;
    let mu: Vec<Complex<T>> = (-(band as i64)..=band as i64)
        .map(|m| {
            let l = spectrum.lambda(m);
            (l - T::one()) / l
        })
        .collect();
    let moments = match projector {
        Projector::Panel => Some(space.fourier_moments(band)),
        Projector::Spectral { .. } => None,
    };
    let dim = space.dim();

    let apply = |x: &[Complex<T>]| -> Vec<Complex<T>> {
        let w: Vec<Complex<T>> = x.iter().zip(&mu).map(|(a, b)| *a * *b).collect();
        let mut r = w.clone();
        match projector {
            Projector::Panel => {
                let e = moments.as_ref().expect("moments built for panel projector");
                for j in 0..dim {
                    let row = &e[j * width..(j + 1) * width];
                    let c = row.iter().zip(&w).fold(cplx(T::zero()), |acc, (e, w)| acc + *w * e.conj());
                    for (ri, ei) in r.iter_mut().zip(row) {
                        *ri -= c * *ei;
                    }
                }
            }
            Projector::Spectral { max_mode } => {
                for (i, ri) in r.iter_mut().enumerate() {
                    if (i as i64 - band as i64).unsigned_abs() as usize <= max_mode {
                        *ri = cplx(T::zero());
                    }
                }
            }
        }
        r.iter().zip(&mu).map(|(a, b)| *a * b.conj()).collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut x: Vec<Complex<T>> = (0..width)
        .map(|_| Complex::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0))))
        .collect();
    normalize(&mut x);
    let mut est = T::zero();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=options.max_iter {
        iterations = it;
        let y = apply(&x);
        let rayleigh = x.iter().zip(&y).fold(T::zero(), |s, (a, b)| s + (a.conj() * b).re);
        let new = rayleigh.max(T::zero()).sqrt();
        let ynorm = norm(&y);
        let stalled = (new - est).abs() <= T::lit(options.tol) * new;
        est = new;
        if ynorm == T::zero() || stalled {
            converged = true;
            break;
        }
        x = y;
        normalize(&mut x);
    }
    if !converged {
        log::warn!("condition estimate did not stagnate after {iterations} iterations");
    }
    Ok(ConditionEstimate {
        norm: est,
        iterations,
        converged,
        band,
    })
}

fn norm<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

fn normalize<T: Real>(x: &mut [Complex<T>]) {
    let n = norm(x);
    if n > T::zero() {
        x.iter_mut().for_each(|z| *z = *z / n);
    }
}

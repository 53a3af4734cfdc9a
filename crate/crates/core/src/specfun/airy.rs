//! Airy function `Ai` and its derivative on the sector `|arg z| < pi - 0.1`.
//!
//! Three regimes:
//! * `|z| <= 2`: Maclaurin series.
//! * `|z| >= 10`: asymptotic expansions (single exponential for
//!   `|arg z| <= 2pi/3`, oscillatory form in `-z` beyond).
//! * in between: Taylor re-expansion of `w'' = z w` along the ray through `z`,
//!   started from whichever end makes `Ai` the dominant solution.

use num_complex::Complex;

use super::SpecialValue;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// Sector margin around the branch cut on the negative real axis.
pub const SECTOR_MARGIN: f64 = 0.1;
const MAX_MODULUS: f64 = 1e4;
const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 10.0;
const AI0: f64 = 0.355_028_053_887_817_239_260_063_186;
const AIP0: f64 = -0.258_819_403_792_806_798_405_183_560;

/// `Ai(z)` and `Ai'(z)` together.
#[derive(Clone, Copy, Debug)]
pub struct AiryPair<T> {
    pub ai: Complex<T>,
    pub ai_prime: Complex<T>,
}

fn check_sector<T: Real>(z: Complex<T>) -> Result<()> {
    let r = z.norm();
    if !r.is_finite() || r.to_f64_lossy() > MAX_MODULUS {
        return Err(Error::domain(format!("Airy argument {z} too large")));
    }
    if r > T::zero() && z.arg().abs().to_f64_lossy() >= std::f64::consts::PI - SECTOR_MARGIN {
        return Err(Error::domain(format!(
            "Airy argument {z} too close to the branch cut"
        )));
    }
    Ok(())
}

fn maclaurin<T: Real>(z: Complex<T>) -> AiryPair<T> {
    let eps = T::epsilon() * T::lit(0.1);
    let z3 = z * z * z;
    // f, g and their derivatives; Ai = c1 f - c2 g
    let mut f = cplx(T::one());
    let mut g = z;
    let mut fp = cplx(T::zero());
    let mut gp = cplx(T::one());
    let mut tf = cplx(T::one());
    let mut tg = z;
    let mut tfp = z * z / T::lit(2.0);
    let mut tgp = cplx(T::one());
    fp = fp + tfp;
    for k in 1..200 {
        let kf = T::from_usize_lossy(k);
        let three = T::lit(3.0);
        tf = tf * z3 / ((three * kf - T::one()) * three * kf);
        tg = tg * z3 / (three * kf * (three * kf + T::one()));
        tgp = tgp * z3 / ((three * kf - T::lit(2.0)) * three * kf);
        if k >= 2 {
            tfp = tfp * z3 / ((three * kf - three) * (three * kf - T::one()));
            fp = fp + tfp;
        }
        f = f + tf;
        g = g + tg;
        gp = gp + tgp;
        let scale = f.norm() + g.norm() + fp.norm() + gp.norm();
        if tf.norm() + tg.norm() + tfp.norm() + tgp.norm() <= eps * scale {
            break;
        }
    }
    let c1 = T::lit(AI0);
    let c2 = -T::lit(AIP0);
    AiryPair {
        ai: f * c1 - g * c2,
        ai_prime: fp * c1 - gp * c2,
    }
}

/// Coefficients `u_k`, `v_k` of the large-argument expansions.
fn uv_coefficients<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut u = vec![T::one()];
    let mut v = vec![T::one()];
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let six = T::lit(6.0);
        let uk = u[k - 1] * (six * kf - T::lit(5.0)) * (six * kf - T::lit(3.0))
            * (six * kf - T::one())
            / ((T::lit(2.0) * kf - T::one()) * T::lit(216.0) * kf);
        v.push(-(six * kf + T::one()) / (six * kf - T::one()) * uk);
        u.push(uk);
    }
    (u, v)
}

/// Sums `sum c_k s^k (-1)^k / xi^k` over the index set `start, start+step, ...`
/// until the terms stop decreasing or fall below epsilon.
fn asymptotic_sum<T: Real>(coef: &[T], xi: Complex<T>, start: usize, step: usize) -> Complex<T> {
    let inv = Complex::new(T::one(), T::zero()) / xi;
    let mut total = cplx(T::zero());
    let mut prev = T::infinity();
    let mut k = start;
    let mut sign_index = 0usize;
    while k < coef.len() {
        let term = inv.powu(k as u32) * coef[k];
        let a = term.norm();
        if a > prev {
            break;
        }
        total = if sign_index % 2 == 0 { total + term } else { total - term };
        if a <= T::epsilon() * T::lit(0.01) * total.norm() {
            break;
        }
        prev = a;
        k += step;
        sign_index += 1;
    }
    total
}

fn asymptotic<T: Real>(z: Complex<T>) -> AiryPair<T> {
    let (u, v) = uv_coefficients::<T>(60);
    let sqrt_pi = T::PI().sqrt();
    let two_thirds = T::lit(2.0 / 3.0);
    let quarter = T::lit(0.25);
    if z.arg().abs().to_f64_lossy() <= 2.0 * std::f64::consts::FRAC_PI_3 {
        let zeta = z.powf(T::lit(1.5)) * two_thirds;
        let e = (-zeta).exp();
        let z14 = z.powf(quarter);
        // alternating sums over all k
        let su = asymptotic_sum(&u, zeta, 0, 1);
        let sv = asymptotic_sum(&v, zeta, 0, 1);
        let den = T::lit(2.0) * sqrt_pi;
        AiryPair {
            ai: e * su / (z14 * den),
            ai_prime: -(e * sv * z14) / den,
        }
    } else {
        let w = -z;
        let xi = w.powf(T::lit(1.5)) * two_thirds;
        let w14 = w.powf(quarter);
        let phase = xi - cplx(T::FRAC_PI_4());
        let (c, s) = (phase.cos(), phase.sin());
        let u_even = asymptotic_sum(&u, xi, 0, 2);
        let u_odd = asymptotic_sum(&u, xi, 1, 2);
        let v_even = asymptotic_sum(&v, xi, 0, 2);
        let v_odd = asymptotic_sum(&v, xi, 1, 2);
        AiryPair {
            ai: (c * u_even + s * u_odd) / (w14 * sqrt_pi),
            ai_prime: (s * v_even - c * v_odd) * w14 / sqrt_pi,
        }
    }
}

/// Advances `(w, w')` of `w'' = c w` from `from` to `to` by Taylor steps.
fn taylor_march<T: Real>(
    mut w: Complex<T>,
    mut wp: Complex<T>,
    from: Complex<T>,
    to: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let max_step = T::lit(0.25);
    let dist = (to - from).norm();
    let steps = (dist / max_step).ceil().to_usize().unwrap_or(1).max(1);
    let h = (to - from) / T::from_usize_lossy(steps);
    let eps = T::epsilon() * T::lit(0.01);
    let mut c = from;
    for _ in 0..steps {
        // a_{n+2} = (c a_n + a_{n-1}) / ((n+2)(n+1))
        let mut a_nm1 = cplx(T::zero());
        let mut a_n = w;
        let mut a_np1 = wp;
        let mut hp = cplx(T::one());
        let mut sum = a_n;
        let mut dsum = a_np1;
        let mut n = 0usize;
        loop {
            let a_np2 = (c * a_n + a_nm1) / T::from_usize_lossy((n + 2) * (n + 1));
            // value gets a_{n+1} h^{n+1}, derivative gets (n+1) a_{n+1} h^n
            let t_val = a_np1 * hp * h;
            let t_der = a_np2 * hp * h * T::from_usize_lossy(n + 2);
            sum = sum + t_val;
            dsum = dsum + t_der;
            hp = hp * h;
            n += 1;
            if n > 4 && t_val.norm() <= eps * sum.norm() && t_der.norm() <= eps * dsum.norm() {
                break;
            }
            if n > 400 {
                break;
            }
            a_nm1 = a_n;
            a_n = a_np1;
            a_np1 = a_np2;
        }
        w = sum;
        wp = dsum;
        c = c + h;
    }
    (w, wp)
}

fn evaluate<T: Real>(z: Complex<T>) -> AiryPair<T> {
    let r = z.norm().to_f64_lossy();
    if r <= SERIES_RADIUS {
        return maclaurin(z);
    }
    if r >= ASYMPTOTIC_RADIUS {
        return asymptotic(z);
    }
    let dir = z / z.norm();
    if z.arg().abs().to_f64_lossy() <= std::f64::consts::FRAC_PI_3 {
        // Ai grows towards the origin here: march inwards
        let start = dir * T::lit(ASYMPTOTIC_RADIUS);
        let p = asymptotic(start);
        let (ai, aip) = taylor_march(p.ai, p.ai_prime, start, z);
        AiryPair { ai, ai_prime: aip }
    } else {
        let start = dir * T::lit(SERIES_RADIUS);
        let p = maclaurin(start);
        let (ai, aip) = taylor_march(p.ai, p.ai_prime, start, z);
        AiryPair { ai, ai_prime: aip }
    }
}

fn err_est<T: Real>(v: Complex<T>) -> T {
    v.norm() * T::epsilon() * T::lit(1e3)
}

/// `Ai(z)` and `Ai'(z)` for `|arg z| < pi - 0.1`, `|z| <= 1e4`.
pub fn airy_pair<T: Real>(z: Complex<T>) -> Result<AiryPair<T>> {
    check_sector(z)?;
    Ok(evaluate(z))
}

pub fn airy_ai<T: Real>(z: Complex<T>) -> Result<SpecialValue<Complex<T>, T>> {
    let p = airy_pair(z)?;
    Ok(SpecialValue::new(p.ai, err_est(p.ai)))
}

pub fn airy_ai_prime<T: Real>(z: Complex<T>) -> Result<SpecialValue<Complex<T>, T>> {
    let p = airy_pair(z)?;
    Ok(SpecialValue::new(p.ai_prime, err_est(p.ai_prime)))
}

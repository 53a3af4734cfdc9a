//! Bessel functions `J_m`, `Y_m` and Hankel functions `H^(1)_m` of integer
//! order and real argument.
//!
//! * `J_m`: Miller's downward recurrence normalised by `J_0 + 2 sum J_2j = 1`.
//! * `Y_0`, `Y_1`: Neumann series in the Miller values for moderate arguments,
//!   Hankel's asymptotic expansion for large ones; higher orders by upward
//!   recurrence.
//! * Single values with `x > 30 + (m+1)^2/2` use the asymptotic expansion directly.

use num_complex::Complex;

use super::scaled::{Scaled, ScaledComplex};
use super::{Order, SpecialValue};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Arguments above this use Hankel's expansion for orders 0 and 1.
const ASYMPTOTIC_X01: f64 = 30.5;

fn asymptotic_ok(m: usize, x: f64) -> bool {
    let mp = (m + 1) as f64;
    x > 30.0 + 0.5 * mp * mp
}

/// Even starting order for Miller's recurrence that resolves orders up to `n`.
fn miller_start(n: usize, x: f64) -> usize {
    let m = (n as f64).max(x.ceil());
    let start = m + 20.0 + (40.0 * m.max(1.0)).sqrt().ceil();
    let s = start as usize;
    s + (s & 1)
}

/// Output of one Miller sweep. All values normalised.
struct MillerSums<T> {
    j0: T,
    j1: T,
    /// `sum_{j>=1} (-1)^j J_2j / j`
    neumann0: T,
    /// `sum_{j>=1} (-1)^(j+1) (2j+1)/(j(j+1)) J_{2j+1}`
    neumann1: T,
}

/// Runs Miller's recurrence at `x`, passing `(m, mantissa, shift)` of every
/// unnormalised `J_m` with `m <= n_store` to `store`. Returns the final shift,
/// the normalisation constant and the Neumann sums.
fn miller<T: Real>(
    n_store: usize,
    x: T,
    mut store: impl FnMut(usize, T, i32),
) -> (i32, T, MillerSums<T>) {
    let start = miller_start(n_store, x.to_f64_lossy());
    let big = T::lit(2.0).powi(T::SCALE_EXP2);
    let inv_big = T::one() / big;
    let two = T::lit(2.0);
    let two_over_x = two / x;

    let mut shift = 0_i32;
    let mut next = T::zero();
    let mut cur = T::lit(1e-30);
    let mut norm = T::zero();
    let mut n0 = T::zero();
    let mut n1 = T::zero();
    let mut j1_mant = T::zero();
    let mut j1_shift = 0;

    let mut m = start;
    loop {
        if m <= n_store {
            store(m, cur, shift);
        }
        if m == 1 {
            j1_mant = cur;
            j1_shift = shift;
        }
        if m % 2 == 0 {
            if m > 0 {
                norm = norm + two * cur;
                let j = m / 2;
                let c = T::one() / T::from_usize_lossy(j);
                n0 = if j % 2 == 0 { n0 + c * cur } else { n0 - c * cur };
            } else {
                norm = norm + cur;
            }
        } else if m >= 3 {
            let j = (m - 1) / 2;
            let c = T::from_usize_lossy(2 * j + 1) / T::from_usize_lossy(j * (j + 1));
            n1 = if j % 2 == 1 { n1 + c * cur } else { n1 - c * cur };
        }
        if m == 0 {
            break;
        }
        let prev = T::from_usize_lossy(m) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > big {
            cur = cur * inv_big;
            next = next * inv_big;
            norm = norm * inv_big;
            n0 = n0 * inv_big;
            n1 = n1 * inv_big;
            shift += 1;
        }
        m -= 1;
    }
    let j0 = cur / norm;
    let j1 = Scaled::new(j1_mant / norm, j1_shift - shift).to_real();
    (
        shift,
        norm,
        MillerSums {
            j0,
            j1,
            neumann0: n0 / norm,
            neumann1: n1 / norm,
        },
    )
}

/// `Y_0`, `Y_1` from the Neumann series.
fn neumann_y01<T: Real>(x: T, s: &MillerSums<T>) -> (T, T) {
    let two_over_pi = T::FRAC_2_PI();
    let log_term = (x / T::lit(2.0)).ln() + T::euler_gamma();
    let y0 = two_over_pi * log_term * s.j0 - T::lit(2.0) * two_over_pi * s.neumann0;
    let y1 = two_over_pi * (log_term * s.j1 - s.j0 / x - s.j1 + s.neumann1);
    (y0, y1)
}

/// Hankel's expansion: `(P, Q)` and the index of the last term used.
fn hankel_pq<T: Real>(nu: usize, x: T) -> (T, T, T) {
    let mu = T::from_usize_lossy(4 * nu * nu);
    let eps = T::epsilon();
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::zero();
    let mut prev_abs = T::infinity();
    for k in 1..200 {
        let odd = T::from_usize_lossy(2 * k - 1);
        term = term * (mu - odd * odd) / (T::from_usize_lossy(k) * eight_x);
        let a = term.abs();
        if a > prev_abs && k > 2 {
            break;
        }
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 0 {
            p = p + signed;
        } else {
            q = q + signed;
        }
        last = a;
        prev_abs = a;
        if a <= eps * T::lit(0.01) || term == T::zero() {
            break;
        }
    }
    (p, q, last)
}

/// `(J_nu, Y_nu, err)` from Hankel's expansion.
fn hankel_asymptotic<T: Real>(nu: usize, x: T) -> (T, T, T) {
    let (p, q, last) = hankel_pq(nu, x);
    let amp = (T::FRAC_2_PI() / x).sqrt();
    // omega = x - (nu/2 + 1/4) pi, expanded so the large argument is reduced exactly
    let phase = T::PI() * (T::from_usize_lossy(2 * nu + 1) / T::lit(4.0));
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_w = cx * cp + sx * sp;
    let sin_w = sx * cp - cx * sp;
    let j = amp * (p * cos_w - q * sin_w);
    let y = amp * (p * sin_w + q * cos_w);
    (j, y, amp * (last + T::epsilon()))
}

/// `J_0, J_1, Y_0, Y_1` at `x > 0`; the kernel hot path.
#[derive(Clone, Copy, Debug)]
pub struct BesselZeroOne<T> {
    pub j0: T,
    pub j1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Real> BesselZeroOne<T> {
    pub fn h0(&self) -> Complex<T> {
        Complex::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> Complex<T> {
        Complex::new(self.j1, self.y1)
    }
}

/// Terms kept by the fused expansion; enough past `ASYMPTOTIC_X01` for full f64 accuracy.
const FUSED_TERMS: usize = 22;

/// Signed Hankel coefficients `(-1)^floor(k/2) prod_{j<=k} (mu - (2j-1)^2) / (8j)`.
const fn hankel_table(nu: usize) -> [f64; FUSED_TERMS] {
    let mu = (4 * nu * nu) as f64;
    let mut out = [0.0; FUSED_TERMS];
    let mut c = 1.0;
    out[0] = 1.0;
    let mut k = 1;
    while k < FUSED_TERMS {
        let odd = (2 * k - 1) as f64;
        c = c * (mu - odd * odd) / (8.0 * k as f64);
        out[k] = if (k / 2) % 2 == 0 { c } else { -c };
        k += 1;
    }
    out
}

const HANKEL0: [f64; FUSED_TERMS] = hankel_table(0);
const HANKEL1: [f64; FUSED_TERMS] = hankel_table(1);

/// `(P, Q)` by Horner in `1/x^2`.
#[inline]
fn fused_pq<T: Real>(table: &[f64; FUSED_TERMS], y: T, z: T) -> (T, T) {
    let mut p = T::zero();
    let mut q = T::zero();
    let mut i = FUSED_TERMS / 2;
    while i > 0 {
        i -= 1;
        p = p * z + T::lit(table[2 * i]);
        q = q * z + T::lit(table[2 * i + 1]);
    }
    (p, q * y)
}

/// Orders 0 and 1 of `J` and `Y` at `x > 0`.
pub fn bessel_zero_one<T: Real>(x: T) -> BesselZeroOne<T> {
    debug_assert!(x > T::zero());
    if x.to_f64_lossy() > ASYMPTOTIC_X01 {
        let y = x.recip();
        let z = y * y;
        let (p0, q0) = fused_pq(&HANKEL0, y, z);
        let (p1, q1) = fused_pq(&HANKEL1, y, z);
        let amp = (T::FRAC_2_PI() * y).sqrt();
        let (sx, cx) = x.sin_cos();
        // omega_0 = x - pi/4, omega_1 = x - 3pi/4
        let h = T::FRAC_1_SQRT_2();
        let c0 = h * (cx + sx);
        let s0 = h * (sx - cx);
        let (c1, s1) = (s0, -c0);
        BesselZeroOne {
            j0: amp * (p0 * c0 - q0 * s0),
            y0: amp * (p0 * s0 + q0 * c0),
            j1: amp * (p1 * c1 - q1 * s1),
            y1: amp * (p1 * s1 + q1 * c1),
        }
    } else {
        let (_, _, sums) = miller(0, x, |_, _, _| {});
        let (y0, y1) = neumann_y01(x, &sums);
        BesselZeroOne {
            j0: sums.j0,
            j1: sums.j1,
            y0,
            y1,
        }
    }
}

/// `J_m(x)` and `Y_m(x)` for all orders `0..=n` at one argument.
#[derive(Clone, Debug)]
pub struct BesselSequence<T> {
    x: T,
    j: Vec<Scaled<T>>,
    y: Vec<Scaled<T>>,
}

impl<T: Real> BesselSequence<T> {
    /// Orders `0..=n_max + 1` are computed so derivatives are available up to `n_max`.
    pub fn new(n_max: usize, x: T) -> Result<Self> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::domain(format!(
                "Bessel sequence needs a positive finite argument, got {x}"
            )));
        }
        let n = n_max + 1;
        let mut raw = vec![(T::zero(), 0_i32); n + 1];
        let (final_shift, norm, sums) = miller(n, x, |m, mant, shift| raw[m] = (mant, shift));
        let j: Vec<Scaled<T>> = raw
            .into_iter()
            .map(|(mant, shift)| Scaled::new(mant / norm, shift - final_shift))
            .collect();

        let (y0, y1) = if x.to_f64_lossy() > ASYMPTOTIC_X01 {
            (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1)
        } else {
            neumann_y01(x, &sums)
        };

        let big = T::lit(2.0).powi(T::SCALE_EXP2);
        let inv_big = T::one() / big;
        let mut y = Vec::with_capacity(n + 1);
        y.push(Scaled::from_real(y0));
        if n >= 1 {
            y.push(Scaled::from_real(y1));
        }
        let (mut prev, mut cur) = (y0, y1);
        let mut shift = 0_i32;
        for m in 1..n {
            let mut nxt = T::lit(2.0) * T::from_usize_lossy(m) / x * cur - prev;
            prev = cur;
            if nxt.abs() > big {
                nxt = nxt * inv_big;
                prev = prev * inv_big;
                shift += 1;
            }
            cur = nxt;
            y.push(Scaled::new(cur, shift));
        }
        Ok(Self { x, j, y })
    }

    pub fn x(&self) -> T {
        self.x
    }

    /// Highest order with a derivative available.
    pub fn max_order(&self) -> usize {
        self.j.len() - 2
    }

    pub fn j(&self, m: usize) -> Scaled<T> {
        self.j[m]
    }

    pub fn y(&self, m: usize) -> Scaled<T> {
        self.y[m]
    }

    fn derivative(values: &[Scaled<T>], m: usize, x: T) -> Scaled<T> {
        if m == 0 {
            values[1].neg()
        } else {
            let mx = T::from_usize_lossy(m) / x;
            values[m - 1].sub(values[m].scale(mx))
        }
    }

    pub fn j_prime(&self, m: usize) -> Scaled<T> {
        Self::derivative(&self.j, m, self.x)
    }

    pub fn y_prime(&self, m: usize) -> Scaled<T> {
        Self::derivative(&self.y, m, self.x)
    }

    pub fn h(&self, m: usize) -> ScaledComplex<T> {
        ScaledComplex::from_parts(self.j[m], self.y[m])
    }

    pub fn h_prime(&self, m: usize) -> ScaledComplex<T> {
        ScaledComplex::from_parts(self.j_prime(m), self.y_prime(m))
    }
}

fn check_argument<T: Real>(x: T, allow_zero: bool) -> Result<()> {
    if !x.is_finite() || x < T::zero() || (!allow_zero && x == T::zero()) {
        return Err(Error::domain(format!("Bessel argument {x} outside domain")));
    }
    Ok(())
}

fn finite<T: Real>(v: T, what: &str) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} not representable")))
    }
}

fn sequence_error<T: Real>(v: T) -> T {
    v.abs() * T::epsilon() * T::lit(16.0)
}

/// `J_m(x)` for `x >= 0`.
pub fn bessel_j<T: Real>(order: impl Into<Order>, x: T) -> Result<SpecialValue<T>> {
    let m = order.into().get();
    check_argument(x, true)?;
    if x == T::zero() {
        let v = if m == 0 { T::one() } else { T::zero() };
        return Ok(SpecialValue::exact(v));
    }
    if asymptotic_ok(m, x.to_f64_lossy()) {
        let (j, _, err) = hankel_asymptotic(m, x);
        return Ok(SpecialValue::new(j, err));
    }
    let v = BesselSequence::new(m, x)?.j(m).to_real();
    Ok(SpecialValue::new(finite(v, "J_m")?, sequence_error(v)))
}

/// `J'_m(x)` for `x >= 0`.
pub fn bessel_j_prime<T: Real>(order: impl Into<Order>, x: T) -> Result<SpecialValue<T>> {
    let m = order.into().get();
    check_argument(x, true)?;
    if x == T::zero() {
        let v = if m == 1 { T::lit(0.5) } else { T::zero() };
        return Ok(SpecialValue::exact(v));
    }
    if asymptotic_ok(m, x.to_f64_lossy()) {
        let (j, _, err) = if m == 0 {
            let (j1, y1, e) = hankel_asymptotic(1, x);
            (-j1, -y1, e)
        } else {
            let (jm1, _, e1) = hankel_asymptotic(m - 1, x);
            let (jm, _, e2) = hankel_asymptotic(m, x);
            let mx = T::from_usize_lossy(m) / x;
            (jm1 - mx * jm, T::zero(), e1 + mx * e2)
        };
        return Ok(SpecialValue::new(j, err));
    }
    let v = BesselSequence::new(m, x)?.j_prime(m).to_real();
    Ok(SpecialValue::new(finite(v, "J'_m")?, sequence_error(v)))
}

/// `H^(1)_m(x) = J_m(x) + i Y_m(x)` for `x > 0`.
pub fn hankel1<T: Real>(
    order: impl Into<Order>,
    x: T,
) -> Result<SpecialValue<Complex<T>, T>> {
    let m = order.into().get();
    check_argument(x, false)?;
    if asymptotic_ok(m, x.to_f64_lossy()) {
        let (j, y, err) = hankel_asymptotic(m, x);
        return Ok(SpecialValue::new(Complex::new(j, y), err));
    }
    let seq = BesselSequence::new(m, x)?;
    let j = seq.j(m).to_real();
    let y = finite(seq.y(m).to_real(), "Y_m")?;
    let v = Complex::new(j, y);
    Ok(SpecialValue::new(v, sequence_error(v.norm())))
}

/// `H^(1)'_m(x)` for `x > 0`.
pub fn hankel1_prime<T: Real>(
    order: impl Into<Order>,
    x: T,
) -> Result<SpecialValue<Complex<T>, T>> {
    let m = order.into().get();
    check_argument(x, false)?;
    if asymptotic_ok(m, x.to_f64_lossy()) {
        let v = if m == 0 {
            let (j1, y1, e) = hankel_asymptotic(1, x);
            (Complex::new(-j1, -y1), e)
        } else {
            let (jm1, ym1, e1) = hankel_asymptotic(m - 1, x);
            let (jm, ym, e2) = hankel_asymptotic(m, x);
            let mx = T::from_usize_lossy(m) / x;
            (Complex::new(jm1 - mx * jm, ym1 - mx * ym), e1 + mx * e2)
        };
        return Ok(SpecialValue::new(v.0, v.1));
    }
    let seq = BesselSequence::new(m, x)?;
    let j = seq.j_prime(m).to_real();
    let y = finite(seq.y_prime(m).to_real(), "Y'_m")?;
    let v = Complex::new(j, y);
    Ok(SpecialValue::new(v, sequence_error(v.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series of `J_m` with compensated summation; independent of
    /// every code path above.
    fn j_series(m: usize, x: f64) -> f64 {
        let half = x / 2.0;
        let mut term = half.powi(m as i32);
        for i in 1..=m {
            term /= i as f64;
        }
        let mut terms = vec![term];
        for j in 1..80 {
            term *= -half * half / (j as f64 * (j + m) as f64);
            terms.push(term);
        }
        crate::scalar::compensated_sum(terms)
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0_f64).unwrap().value, 1.0);
        assert_eq!(bessel_j(3, 0.0_f64).unwrap().value, 0.0);
    }

    #[test]
    fn j0_at_one_matches_series() {
        let v = bessel_j(0, 1.0_f64).unwrap().value;
        assert!((v - 0.7651976865579666).abs() < 1e-15);
        assert!((v - j_series(0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn first_zero_of_j0() {
        // bisection on the series oracle
        let (mut a, mut b) = (2.0_f64, 3.0_f64);
        for _ in 0..80 {
            let c = 0.5 * (a + b);
            if j_series(0, a) * j_series(0, c) <= 0.0 {
                b = c;
            } else {
                a = c;
            }
        }
        assert!((a - 2.404825557695773).abs() < 1e-14);
        assert!(bessel_j(0, 2.404825557695773_f64).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn series_agreement_small_arguments() {
        for &x in &[0.1, 0.5, 1.0, 3.0, 7.5] {
            for m in 0..12 {
                let v = bessel_j(m, x).unwrap().value;
                let s = j_series(m, x);
                assert!((v - s).abs() <= 1e-13 * s.abs().max(1e-300) + 1e-16, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn y0_y1_at_one() {
        let h0 = hankel1(0, 1.0_f64).unwrap().value;
        let h1 = hankel1(1, 1.0_f64).unwrap().value;
        assert!((h0.re - 0.7651976865579666).abs() < 1e-15);
        assert!((h0.im - 0.08825696421567696).abs() < 1e-15);
        assert!((h1.im + 0.7812128213002887).abs() < 1e-15);
    }

    #[test]
    fn hankel_real_part_is_j() {
        for &(m, x) in &[(0usize, 0.3f64), (2, 5.0), (7, 40.0), (15, 12.0), (1, 100.0)] {
            let h = hankel1(m, x).unwrap().value;
            let j = bessel_j(m, x).unwrap().value;
            assert!((h.re - j).abs() <= 1e-13 * j.abs().max(1e-300), "m={m} x={x}");
        }
    }

    #[test]
    fn asymptotic_and_recurrence_regimes_agree() {
        for &x in &[31.0f64, 45.0, 80.0] {
            let z = bessel_zero_one(x);
            let seq = BesselSequence::new(1, x).unwrap();
            assert!((z.j0 - seq.j(0).to_real()).abs() < 1e-14);
            assert!((z.j1 - seq.j(1).to_real()).abs() < 1e-14);
            let (_, _, sums) = miller(0, x, |_, _, _| {});
            let (y0, y1) = neumann_y01(x, &sums);
            assert!((z.y0 - y0).abs() < 1e-13, "x={x}: {} vs {}", z.y0, y0);
            assert!((z.y1 - y1).abs() < 1e-13, "x={x}: {} vs {}", z.y1, y1);
        }
    }

    #[test]
    fn fused_expansion_matches_adaptive() {
        let mut x = 30.6f64;
        while x < 5000.0 {
            let z = bessel_zero_one(x);
            let (j0, y0, _) = hankel_asymptotic(0, x);
            let (j1, y1, _) = hankel_asymptotic(1, x);
            for (a, b) in [(z.j0, j0), (z.y0, y0), (z.j1, j1), (z.y1, y1)] {
                assert!((a - b).abs() < 4e-16, "x={x}: {a} vs {b}");
            }
            x *= 1.37;
        }
    }

    #[test]
    fn negative_argument_is_domain_error() {
        assert!(matches!(bessel_j(0, -1.0_f64), Err(Error::Domain(_))));
        assert!(matches!(hankel1(0, 0.0_f64), Err(Error::Domain(_))));
    }

    #[test]
    fn huge_y_overflows_loudly() {
        assert!(matches!(hankel1(400, 0.01_f64), Err(Error::Overflow(_))));
    }

    #[test]
    fn f32_instantiation() {
        let v = bessel_j(0, 1.0_f32).unwrap().value;
        assert!((v - 0.765_197_7).abs() < 1e-6);
    }
}

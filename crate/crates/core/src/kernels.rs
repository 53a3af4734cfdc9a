//! Helmholtz fundamental solution in 2-d and the layer-potential kernels
//! `S_k`, `D_k`, `D'_k` and their combined-field forms.
//!
//! Kernels are returned per unit *parameter* of the source point: the
//! arclength Jacobian `|gamma'(s)|` is already included.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::curves::{KernelPoint, Point};
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};
use crate::specfun::{bessel_zero_one, BesselZeroOne};

/// Which second-kind combined-field operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// `A_k = 1/2 I + D_k - ik S_k` (normal derivative at the source point).
    Ak,
    /// `A'_k = 1/2 I + D'_k - ik S_k` (normal derivative at the target point).
    AkPrime,
}

/// Boundary integral formulation of the sound-soft scattering problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Unknown is `d_nu u`; operator `A'_k`.
    Direct,
    /// Unknown is a layer density; operator `A_k`.
    Indirect,
}

impl Formulation {
    pub const ALL: [Formulation; 2] = [Formulation::Direct, Formulation::Indirect];

    pub fn operator(self) -> Operator {
        match self {
            Formulation::Direct => Operator::AkPrime,
            Formulation::Indirect => Operator::Ak,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Direct => "direct",
            Formulation::Indirect => "indirect",
        }
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Formulation::Direct),
            "indirect" => Ok(Formulation::Indirect),
            _ => Err(Error::invalid(format!("unknown formulation '{s}' (expected direct or indirect)"))),
        }
    }
}

#[inline]
fn sub<T: Real>(a: Point<T>, b: Point<T>) -> Point<T> {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn dot<T: Real>(a: Point<T>, b: Point<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

/// `Phi_k(x, y) = (i/4) H_0^(1)(k|x - y|)`.
pub fn phi_k<T: Real>(k: T, x: Point<T>, y: Point<T>) -> Result<Complex<T>> {
    let d = sub(x, y);
    let r = d[0].hypot(d[1]);
    if r == T::zero() {
        return Err(Error::Coincidence);
    }
    let b = bessel_zero_one(k * r);
    Ok(quarter_i(b.h0()))
}

#[inline]
fn quarter_i<T: Real>(z: Complex<T>) -> Complex<T> {
    // (i/4) z
    Complex::new(-z.im, z.re) * T::lit(0.25)
}

/// `grad_x Phi_k(x, y)`.
pub fn grad_phi_k<T: Real>(k: T, x: Point<T>, y: Point<T>) -> Result<[Complex<T>; 2]> {
    let d = sub(x, y);
    let r = d[0].hypot(d[1]);
    if r == T::zero() {
        return Err(Error::Coincidence);
    }
    let b = bessel_zero_one(k * r);
    // d/dr (i/4) H0(kr) = -(ik/4) H1(kr)
    let f = -quarter_i(b.h1()) * k / r;
    Ok([f * d[0], f * d[1]])
}

/// Kernel values at one pair of distinct boundary points.
#[derive(Clone, Copy, Debug)]
struct PairGeometry<T> {
    r: T,
    /// `(x - y) . nu(y) / r`
    ny: T,
    /// `(x - y) . nu(x) / r`
    nx: T,
}

#[inline]
fn geometry<T: Real>(xp: &KernelPoint<T>, yp: &KernelPoint<T>) -> PairGeometry<T> {
    let d = sub(xp.x, yp.x);
    let r = d[0].hypot(d[1]);
    PairGeometry {
        r,
        ny: dot(d, yp.nu) / r,
        nx: dot(d, xp.nu) / r,
    }
}

#[inline]
fn s_value<T: Real>(b: &BesselZeroOne<T>) -> Complex<T> {
    quarter_i(b.h0())
}

/// `dPhi/dnu(y) = (ik/4) H1(kr) (x-y).nu(y)/r`
#[inline]
fn dy_value<T: Real>(k: T, b: &BesselZeroOne<T>, g: &PairGeometry<T>) -> Complex<T> {
    quarter_i(b.h1()) * (k * g.ny)
}

/// `dPhi/dnu(x) = -(ik/4) H1(kr) (x-y).nu(x)/r`
#[inline]
fn dx_value<T: Real>(k: T, b: &BesselZeroOne<T>, g: &PairGeometry<T>) -> Complex<T> {
    -quarter_i(b.h1()) * (k * g.nx)
}

fn check_distinct<T: Real>(xp: &KernelPoint<T>, yp: &KernelPoint<T>) -> Result<()> {
    if xp.x == yp.x {
        Err(Error::Coincidence)
    } else {
        Ok(())
    }
}

/// `Phi_k(x, y) |gamma'(s)|`
pub fn kernel_s<T: Real>(k: T, xp: &KernelPoint<T>, yp: &KernelPoint<T>) -> Result<Complex<T>> {
    check_distinct(xp, yp)?;
    let g = geometry(xp, yp);
    Ok(s_value(&bessel_zero_one(k * g.r)) * yp.jac)
}

/// `dPhi_k(x, y)/dnu(y) |gamma'(s)|`
pub fn kernel_dy<T: Real>(k: T, xp: &KernelPoint<T>, yp: &KernelPoint<T>) -> Result<Complex<T>> {
    check_distinct(xp, yp)?;
    let g = geometry(xp, yp);
    Ok(dy_value(k, &bessel_zero_one(k * g.r), &g) * yp.jac)
}

/// `dPhi_k(x, y)/dnu(x) |gamma'(s)|`
pub fn kernel_dx<T: Real>(k: T, xp: &KernelPoint<T>, yp: &KernelPoint<T>) -> Result<Complex<T>> {
    check_distinct(xp, yp)?;
    let g = geometry(xp, yp);
    Ok(dx_value(k, &bessel_zero_one(k * g.r), &g) * yp.jac)
}

/// Double-layer part minus `ik` times single-layer part, times `|gamma'(s)|`.
pub fn combined_kernel<T: Real>(
    op: Operator,
    k: T,
    xp: &KernelPoint<T>,
    yp: &KernelPoint<T>,
) -> Result<Complex<T>> {
    check_distinct(xp, yp)?;
    Ok(combined_unchecked(op, k, xp, yp))
}

/// [`combined_kernel`] without the coincidence check; for assembly loops.
#[inline]
pub(crate) fn combined_unchecked<T: Real>(
    op: Operator,
    k: T,
    xp: &KernelPoint<T>,
    yp: &KernelPoint<T>,
) -> Complex<T> {
    let g = geometry(xp, yp);
    let b = bessel_zero_one(k * g.r);
    let d = match op {
        Operator::Ak => dy_value(k, &b, &g),
        Operator::AkPrime => dx_value(k, &b, &g),
    };
    let ik = Complex::new(T::zero(), k);
    (d - ik * s_value(&b)) * yp.jac
}

/// Combined kernels of both operators in both directions from one Bessel
/// evaluation: `[[K_Ak(x,y), K_Ak(y,x)], [K_Ak'(x,y), K_Ak'(y,x)]]`.
#[inline]
pub(crate) fn combined_pair_unchecked<T: Real>(
    k: T,
    xp: &KernelPoint<T>,
    yp: &KernelPoint<T>,
) -> [[Complex<T>; 2]; 2] {
    let g = geometry(xp, yp);
    let b = bessel_zero_one(k * g.r);
    let q = quarter_i(b.h1()) * k;
    let s = Complex::new(T::zero(), k) * s_value(&b);
    [
        [(q * g.ny - s) * yp.jac, (-q * g.nx - s) * xp.jac],
        [(-q * g.nx - s) * yp.jac, (q * g.ny - s) * xp.jac],
    ]
}

/// Kernel written as `log_coeff * ln|t - s| + smooth`, both smooth in `(t, s)`.
/// Jacobian `|gamma'(s)|` included in both parts.
#[derive(Clone, Copy, Debug)]
pub struct KernelSplit<T> {
    pub log_coeff: Complex<T>,
    pub smooth: Complex<T>,
}

/// Split of the combined kernel. `t - s` is the parameter gap used in the
/// logarithm (it need not be reduced modulo `2pi`, but it must be the gap
/// whose zero is the coincidence).
pub fn combined_kernel_split<T: Real>(
    op: Operator,
    k: T,
    xp: &KernelPoint<T>,
    yp: &KernelPoint<T>,
    curvature_at_x: T,
) -> KernelSplit<T> {
    let gap = xp.t - yp.t;
    let inv_two_pi = T::one() / T::TAU();
    let ik = Complex::new(T::zero(), k);
    if gap == T::zero() {
        // coincidence limits
        let ls = cplx(-inv_two_pi);
        let ms = Complex::new(
            -inv_two_pi * ((k * xp.jac / T::lit(2.0)).ln() + T::euler_gamma()),
            T::lit(0.25),
        );
        let md = cplx(-curvature_at_x * T::lit(0.5) * inv_two_pi);
        return KernelSplit {
            log_coeff: -ik * ls * yp.jac,
            smooth: (md - ik * ms) * yp.jac,
        };
    }
    let g = geometry(xp, yp);
    let b = bessel_zero_one(k * g.r);
    let full = match op {
        Operator::Ak => dy_value(k, &b, &g),
        Operator::AkPrime => dx_value(k, &b, &g),
    } - ik * s_value(&b);
    // log coefficients of S, D, D'
    let ls = -b.j0 * inv_two_pi;
    let ld = match op {
        Operator::Ak => -k * inv_two_pi * b.j1 * g.ny,
        Operator::AkPrime => k * inv_two_pi * b.j1 * g.nx,
    };
    let log_coeff = cplx(ld) - ik * ls;
    let smooth = full - log_coeff * gap.abs().ln();
    KernelSplit {
        log_coeff: log_coeff * yp.jac,
        smooth: smooth * yp.jac,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Curve;
    use crate::specfun::hankel1;

    #[test]
    fn phi_symmetric_and_matches_hankel() {
        let x = [0.3, -0.2];
        let y = [1.1, 0.4];
        assert_eq!(phi_k(3.0, x, y).unwrap(), phi_k(3.0, y, x).unwrap());
        let v = phi_k(1.0f64, [0.0, 0.0], [1.0, 0.0]).unwrap();
        let h = hankel1(0, 1.0).unwrap().value;
        let expected = Complex::new(0.0, 0.25) * h;
        assert!((v - expected).norm() < 1e-16);
        assert!((v.im - 0.25 * 0.7651976865579666).abs() < 1e-15);
        assert!(matches!(phi_k(1.0, x, x), Err(Error::Coincidence)));
    }

    #[test]
    fn phi_solves_helmholtz() {
        let k = 3.0;
        let y = [0.0, 0.0];
        let x = [2.0_f64.sqrt(), 2.0_f64.sqrt()];
        let h = 1e-3;
        let f = |p: [f64; 2]| phi_k(k, p, y).unwrap();
        let lap = (f([x[0] + h, x[1]]) + f([x[0] - h, x[1]]) + f([x[0], x[1] + h])
            + f([x[0], x[1] - h])
            - f(x) * 4.0)
            / (h * h);
        let residual = (lap + f(x) * (k * k)).norm();
        assert!(residual <= 1e-5 * k * k * f(x).norm(), "residual {residual}");
    }

    #[test]
    fn circle_double_layers_coincide() {
        let c = Curve::Circle(1.0_f64);
        for i in 0..10 {
            for j in 0..10 {
                if i == j {
                    continue;
                }
                let xp = c.point(0.61 * i as f64);
                let yp = c.point(0.61 * j as f64 + 0.05);
                let a = kernel_dy(5.0, &xp, &yp).unwrap();
                let b = kernel_dx(5.0, &xp, &yp).unwrap();
                assert!((a - b).norm() < 1e-14 * a.norm().max(1.0));
                let ca = combined_kernel(Operator::Ak, 5.0, &xp, &yp).unwrap();
                let cb = combined_kernel(Operator::AkPrime, 5.0, &xp, &yp).unwrap();
                assert!((ca - cb).norm() < 1e-14 * ca.norm().max(1.0));
                let s = kernel_s(5.0, &xp, &yp).unwrap();
                assert!((ca - a + Complex::new(0.0, 5.0) * s).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pair_kernels_match_single_evaluations() {
        let c = Curve::<f64>::Kite;
        let xp = c.point(0.3);
        let yp = c.point(2.1);
        let pair = combined_pair_unchecked(4.0, &xp, &yp);
        for (row, op) in [Operator::Ak, Operator::AkPrime].into_iter().enumerate() {
            let fwd = combined_kernel(op, 4.0, &xp, &yp).unwrap();
            let back = combined_kernel(op, 4.0, &yp, &xp).unwrap();
            assert!((pair[row][0] - fwd).norm() < 1e-15);
            assert!((pair[row][1] - back).norm() < 1e-15);
        }
    }

    #[test]
    fn kite_double_layers_differ() {
        let c = Curve::<f64>::Kite;
        let (xp, yp) = (c.point(0.4), c.point(2.2));
        let a = kernel_dy(5.0, &xp, &yp).unwrap();
        let b = kernel_dx(5.0, &xp, &yp).unwrap();
        assert!((a - b).norm() > 1e-3);
    }

    #[test]
    fn single_layer_reciprocity_and_log_growth() {
        let c = Curve::<f64>::Kite;
        let (xp, yp) = (c.point(1.0), c.point(1.7));
        let a = kernel_s(4.0, &xp, &yp).unwrap() / yp.jac;
        let b = kernel_s(4.0, &yp, &xp).unwrap() / xp.jac;
        assert!((a - b).norm() < 1e-15);
        let xp = c.point(1.0);
        for e in 1..12 {
            let d = 10f64.powi(-e);
            let v = kernel_s(4.0, &xp, &c.point(1.0 + d)).unwrap().norm();
            assert!(v <= 1.0 * (1.0 + d.ln().abs()));
        }
    }

    #[test]
    fn split_reassembles_kernel_and_is_continuous() {
        for c in [Curve::Circle(1.0_f64), Curve::Ellipse(2.0, 1.0), Curve::Kite] {
            for op in [Operator::Ak, Operator::AkPrime] {
                let t = 0.9;
                let xp = c.point(t);
                let yp = c.point(t + 0.3);
                let s = combined_kernel_split(op, 7.0, &xp, &yp, c.curvature(t));
                let full = combined_kernel(op, 7.0, &xp, &yp).unwrap();
                let re = s.log_coeff * 0.3_f64.ln() + s.smooth;
                assert!((re - full).norm() < 1e-13 * full.norm());
                let diag = combined_kernel_split(op, 7.0, &xp, &xp, c.curvature(t));
                let near = combined_kernel_split(op, 7.0, &xp, &c.point(t + 1e-6), c.curvature(t));
                assert!((diag.smooth - near.smooth).norm() < 1e-4, "{c:?} {op:?}");
                assert!((diag.log_coeff - near.log_coeff).norm() < 1e-4);
            }
        }
    }
}

//! Smooth closed curves parametrised over `[0, 2pi)`, counter-clockwise, with
//! the outward normal pointing into the unbounded exterior.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

pub type Point<T> = [T; 2];

/// Curve description independent of the scalar type; parsed from
/// `circle`, `circle:r`, `ellipse:a:b` or `kite`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Kite,
}

impl CurveSpec {
    pub fn unit_circle() -> Self {
        CurveSpec::Circle { radius: 1.0 }
    }

    pub fn is_unit_circle(&self) -> bool {
        matches!(self, CurveSpec::Circle { radius } if *radius == 1.0)
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSpec::Circle { radius } if *radius == 1.0 => write!(f, "circle"),
            CurveSpec::Circle { radius } => write!(f, "circle:{radius}"),
            CurveSpec::Ellipse { a, b } => write!(f, "ellipse:{a}:{b}"),
            CurveSpec::Kite => write!(f, "kite"),
        }
    }
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| -> Result<f64> {
            let x: f64 = v
                .parse()
                .map_err(|_| Error::invalid(format!("bad number '{v}' in curve '{s}'")))?;
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(Error::invalid(format!("curve dimension must be positive: '{s}'")))
            }
        };
        match parts.as_slice() {
            ["circle"] => Ok(CurveSpec::unit_circle()),
            ["circle", r] => Ok(CurveSpec::Circle { radius: num(r)? }),
            ["ellipse", a, b] => Ok(CurveSpec::Ellipse {
                a: num(a)?,
                b: num(b)?,
            }),
            ["kite"] => Ok(CurveSpec::Kite),
            _ => Err(Error::invalid(format!(
                "unknown curve '{s}' (expected circle, ellipse:a:b or kite)"
            ))),
        }
    }
}

/// Evaluated point on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint<T> {
    pub t: T,
    pub x: Point<T>,
    pub nu: Point<T>,
    pub jac: T,
}

/// Smooth closed curve with evaluators for `gamma`, `gamma'`, `gamma''`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve<T> {
    Circle(T),
    Ellipse(T, T),
    /// `(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`
    Kite,
}

impl<T: Real> Curve<T> {
    pub fn from_spec(spec: &CurveSpec) -> Self {
        match *spec {
            CurveSpec::Circle { radius } => Curve::Circle(T::lit(radius)),
            CurveSpec::Ellipse { a, b } => Curve::Ellipse(T::lit(a), T::lit(b)),
            CurveSpec::Kite => Curve::Kite,
        }
    }

    pub fn spec(&self) -> CurveSpec {
        match *self {
            Curve::Circle(r) => CurveSpec::Circle {
                radius: r.to_f64_lossy(),
            },
            Curve::Ellipse(a, b) => CurveSpec::Ellipse {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
            },
            Curve::Kite => CurveSpec::Kite,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Curve::Circle(_))
    }

    pub fn position(&self, t: T) -> Point<T> {
        let (s, c) = t.sin_cos();
        match *self {
            Curve::Circle(r) => [r * c, r * s],
            Curve::Ellipse(a, b) => [a * c, b * s],
            Curve::Kite => {
                let k = T::lit(0.65);
                let c2 = (t + t).cos();
                [c + k * c2 - k, T::lit(1.5) * s]
            }
        }
    }

    pub fn derivative(&self, t: T) -> Point<T> {
        let (s, c) = t.sin_cos();
        match *self {
            Curve::Circle(r) => [-r * s, r * c],
            Curve::Ellipse(a, b) => [-a * s, b * c],
            Curve::Kite => [-s - T::lit(1.3) * (t + t).sin(), T::lit(1.5) * c],
        }
    }

    pub fn second_derivative(&self, t: T) -> Point<T> {
        let (s, c) = t.sin_cos();
        match *self {
            Curve::Circle(r) => [-r * c, -r * s],
            Curve::Ellipse(a, b) => [-a * c, -b * s],
            Curve::Kite => [-c - T::lit(2.6) * (t + t).cos(), -T::lit(1.5) * s],
        }
    }

    /// `|gamma'(t)|`
    pub fn jacobian(&self, t: T) -> T {
        let d = self.derivative(t);
        d[0].hypot(d[1])
    }

    /// Outward unit normal.
    pub fn normal(&self, t: T) -> Point<T> {
        let d = self.derivative(t);
        let j = d[0].hypot(d[1]);
        [d[1] / j, -d[0] / j]
    }

    /// Signed curvature, positive where the curve is convex.
    pub fn curvature(&self, t: T) -> T {
        let d = self.derivative(t);
        let dd = self.second_derivative(t);
        let j = d[0].hypot(d[1]);
        (d[0] * dd[1] - d[1] * dd[0]) / (j * j * j)
    }

    pub fn point(&self, t: T) -> KernelPoint<T> {
        let d = self.derivative(t);
        let jac = d[0].hypot(d[1]);
        KernelPoint {
            t,
            x: self.position(t),
            nu: [d[1] / jac, -d[0] / jac],
            jac,
        }
    }

    /// Arclength between parameters `a <= b`.
    pub fn arclength(&self, a: T, b: T) -> T {
        let rule = gauss_legendre::<T>(24);
        let pieces = (((b - a) / T::lit(0.25)).ceil().to_usize().unwrap_or(1)).max(1);
        let h = (b - a) / T::from_usize_lossy(pieces);
        let half = T::lit(0.5);
        let mut total = T::zero();
        for i in 0..pieces {
            let lo = a + h * T::from_usize_lossy(i);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                total = total + half * h * *w * self.jacobian(lo + half * h * (*x + T::one()));
            }
        }
        total
    }

    pub fn length(&self) -> T {
        self.arclength(T::zero(), T::TAU())
    }

    /// Polygon through `n` equispaced parameter values.
    fn polygon(&self, n: usize) -> Vec<Point<T>> {
        (0..n)
            .map(|i| self.position(T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n)))
            .collect()
    }

    /// Strictly interior points; winding number of a fine polygon.
    pub fn contains(&self, p: Point<T>) -> bool {
        let poly = self.polygon(4096);
        let mut inside = false;
        let n = poly.len();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let xc = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < xc {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the curve, sampled then refined by golden-section search.
    pub fn distance_to(&self, p: Point<T>) -> T {
        let n = 2048;
        let dist = |t: T| {
            let q = self.position(t);
            (q[0] - p[0]).hypot(q[1] - p[1])
        };
        let step = T::TAU() / T::from_usize_lossy(n);
        let mut best = (T::infinity(), T::zero());
        for i in 0..n {
            let t = step * T::from_usize_lossy(i);
            let d = dist(t);
            if d < best.0 {
                best = (d, t);
            }
        }
        let (mut lo, mut hi) = (best.1 - step, best.1 + step);
        let g = T::lit(0.618_033_988_749_894_8);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if dist(m1) < dist(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        dist(T::lit(0.5) * (lo + hi)).min(best.0)
    }
}

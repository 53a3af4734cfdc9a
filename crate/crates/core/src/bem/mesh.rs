use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic partition of the parameter interval `[0, 2pi)` into panels.
#[derive(Clone, Debug)]
pub struct Mesh<T> {
    curve: Curve<T>,
    /// `n + 1` increasing values from `0` to `2pi`.
    breakpoints: Vec<T>,
    arclengths: Vec<T>,
}

impl<T: Real> Mesh<T> {
    /// Panels of equal arclength.
    pub fn equal_arclength(curve: Curve<T>, n_panels: usize) -> Result<Self> {
        check_count(n_panels)?;
        let breakpoints = if curve.is_circle() {
            uniform(n_panels)
        } else {
            let total = curve.length();
            let target = total / T::from_usize_lossy(n_panels);
            let mut bp = Vec::with_capacity(n_panels + 1);
            bp.push(T::zero());
            let mut prev = T::zero();
            for i in 1..n_panels {
                // Newton on arclength(prev, t) = target
                let mut t = prev + T::TAU() / T::from_usize_lossy(n_panels);
                for _ in 0..50 {
                    let f = curve.arclength(prev, t) - target;
                    let step = f / curve.jacobian(t);
                    t = t - step;
                    if step.abs() <= T::epsilon() * T::lit(8.0) * (T::one() + t.abs()) {
                        break;
                    }
                }
                if !(t > prev && t < T::TAU()) {
                    return Err(Error::invalid(format!("arclength meshing failed at panel {i}")));
                }
                bp.push(t);
                prev = t;
            }
            bp.push(T::TAU());
            bp
        };
        Ok(Self::from_breakpoints_unchecked(curve, breakpoints))
    }

    /// Panels of equal parameter width.
    pub fn uniform_parameter(curve: Curve<T>, n_panels: usize) -> Result<Self> {
        check_count(n_panels)?;
        Ok(Self::from_breakpoints_unchecked(curve, uniform(n_panels)))
    }

    /// Equal-arclength mesh with `ceil(|Gamma| k / hk)` panels (at least 4).
    pub fn for_hk(curve: Curve<T>, k: T, hk: T) -> Result<Self> {
        if !(hk > T::zero() && k > T::zero()) {
            return Err(Error::invalid(format!("need hk > 0 and k > 0, got hk = {hk}, k = {k}")));
        }
        let n = (curve.length() * k / hk).ceil().to_usize().unwrap_or(0).max(4);
        Self::equal_arclength(curve, n)
    }

    fn from_breakpoints_unchecked(curve: Curve<T>, breakpoints: Vec<T>) -> Self {
        let arclengths = breakpoints
            .windows(2)
            .map(|w| curve.arclength(w[0], w[1]))
            .collect();
        Self {
            curve,
            breakpoints,
            arclengths,
        }
    }

    pub fn curve(&self) -> &Curve<T> {
        &self.curve
    }

    pub fn n_panels(&self) -> usize {
        self.arclengths.len()
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Parameter interval of panel `i`.
    pub fn panel(&self, i: usize) -> (T, T) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn panel_arclength(&self, i: usize) -> T {
        self.arclengths[i]
    }

    /// Largest panel arclength.
    pub fn h(&self) -> T {
        self.arclengths.iter().cloned().fold(T::zero(), T::max)
    }

    pub fn h_min(&self) -> T {
        self.arclengths.iter().cloned().fold(T::infinity(), T::min)
    }

    /// `max width / min width`.
    pub fn quasi_uniformity(&self) -> T {
        self.h() / self.h_min()
    }

    /// Panel containing parameter `t` (taken modulo `2pi`).
    pub fn locate(&self, t: T) -> usize {
        let t = wrap(t);
        let n = self.n_panels();
        match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&t).expect("finite parameter"))
        {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Every panel bisected at its arclength midpoint.
    pub fn refine(&self) -> Self {
        let mut bp = Vec::with_capacity(2 * self.n_panels() + 1);
        for i in 0..self.n_panels() {
            let (lo, hi) = self.panel(i);
            bp.push(lo);
            bp.push(if self.curve.is_circle() {
                (lo + hi) / T::lit(2.0)
            } else {
                arclength_midpoint(&self.curve, lo, hi, self.arclengths[i])
            });
        }
        bp.push(T::TAU());
        Self::from_breakpoints_unchecked(self.curve, bp)
    }
}

fn check_count(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::invalid(format!("need at least 4 panels, got {n}")));
    }
    Ok(())
}

fn uniform<T: Real>(n: usize) -> Vec<T> {
    let h = T::TAU() / T::from_usize_lossy(n);
    let mut bp: Vec<T> = (0..n).map(|i| h * T::from_usize_lossy(i)).collect();
    bp.push(T::TAU());
    bp
}

fn arclength_midpoint<T: Real>(curve: &Curve<T>, lo: T, hi: T, len: T) -> T {
    let half = len / T::lit(2.0);
    let mut t = (lo + hi) / T::lit(2.0);
    for _ in 0..50 {
        let step = (curve.arclength(lo, t) - half) / curve.jacobian(t);
        t = t - step;
        if step.abs() <= T::epsilon() * T::lit(8.0) {
            break;
        }
    }
    t
}

pub(crate) fn wrap<T: Real>(t: T) -> T {
    let r = t % T::TAU();
    if r < T::zero() {
        r + T::TAU()
    } else {
        r
    }
}

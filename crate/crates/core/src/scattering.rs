//! Sound-soft scattering by the direct and indirect combined-field equations,
//! field reconstruction from the boundary density, and the interior point
//! source test.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bem::{
    assemble, default_quad_order, solve_galerkin, AssemblyOptions, BoundarySpace, DensityVector, GalerkinSystem, Target,
};
use crate::bem::space::PanelQuadrature;
use crate::curves::{Curve, Point};
use crate::error::{Error, Result};
use crate::kernels::{grad_phi_k, phi_k, Formulation};
use crate::scalar::{cplx, imag_unit, Real};

/// Minimum distance from a point source to the boundary.
pub const SOURCE_CLEARANCE: f64 = 0.05;
/// Radius of the probe ring used by [`point_source_test`].
pub const PROBE_RADIUS: f64 = 3.0;
const PROBE_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncidentKind<T> {
    /// `exp(ik x.a)` with `a = (cos theta, sin theta)`.
    PlaneWave { theta: T },
    /// `Phi_k(x, source)` with the source inside the obstacle.
    PointSource { source: Point<T> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidentField<T> {
    pub kind: IncidentKind<T>,
    pub k: T,
}

impl<T: Real> IncidentField<T> {
    pub fn plane_wave(k: T, theta: T) -> Result<Self> {
        check_k(k)?;
        if !theta.is_finite() {
            return Err(Error::invalid("incident direction must be finite"));
        }
        Ok(Self {
            kind: IncidentKind::PlaneWave { theta },
            k,
        })
    }

    /// Point source at `source`, which must lie inside `curve` and at least
    /// [`SOURCE_CLEARANCE`] from it.
    pub fn point_source(curve: &Curve<T>, k: T, source: Point<T>) -> Result<Self> {
        check_k(k)?;
        if !curve.contains(source) {
            return Err(Error::invalid(format!("point source {source:?} is not inside the obstacle")));
        }
        let d = curve.distance_to(source);
        if d <= T::lit(SOURCE_CLEARANCE) {
            return Err(Error::invalid(format!("point source is {d} from the boundary (need > {SOURCE_CLEARANCE})")));
        }
        Ok(Self {
            kind: IncidentKind::PointSource { source },
            k,
        })
    }

    pub fn value(&self, x: Point<T>) -> Result<Complex<T>> {
        match self.kind {
            IncidentKind::PlaneWave { theta } => {
                let (s, c) = theta.sin_cos();
                Ok(Complex::from_polar(T::one(), self.k * (x[0] * c + x[1] * s)))
            }
            IncidentKind::PointSource { source } => phi_k(self.k, x, source),
        }
    }

    pub fn gradient(&self, x: Point<T>) -> Result<[Complex<T>; 2]> {
        match self.kind {
            IncidentKind::PlaneWave { theta } => {
                let (s, c) = theta.sin_cos();
                let u = self.value(x)? * imag_unit::<T>() * self.k;
                Ok([u * c, u * s])
            }
            IncidentKind::PointSource { source } => grad_phi_k(self.k, x, source),
        }
    }
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if k > T::zero() && k.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("wavenumber must be positive, got {k}")))
    }
}

/// Boundary density and the representation it feeds.
#[derive(Clone, Debug)]
pub struct ScatteringSolution<T> {
    space: BoundarySpace<T>,
    pub density: DensityVector<T>,
    pub formulation: Formulation,
    pub incident: IncidentField<T>,
    pub relative_residual: T,
    quad: Vec<PanelQuadrature<T>>,
}

/// Solves the direct or indirect equation for `incident` on `space`.
///
/// Direct: `A'_k d_nu u = d_nu u^I - ik u^I`. Indirect: `A_k v = -u^I`.
pub fn solve_scattering<T: Real + RealField>(
    space: &BoundarySpace<T>,
    incident: &IncidentField<T>,
    formulation: Formulation,
    options: AssemblyOptions,
) -> Result<ScatteringSolution<T>> {
    let rhs = boundary_data(space, incident, formulation)?;
    let system = assemble(space, incident.k, formulation, options)?.with_rhs(rhs.coeffs)?;
    finish(space, incident, formulation, &system)
}

/// Projection of the right-hand side: `d_nu u^I - ik u^I` (direct) or `-u^I`
/// (indirect).
pub fn boundary_data<T: Real>(
    space: &BoundarySpace<T>,
    incident: &IncidentField<T>,
    formulation: Formulation,
) -> Result<DensityVector<T>> {
    let curve = *space.curve();
    let incident = *incident;
    let ik = imag_unit::<T>() * incident.k;
    let data = move |t: T| -> Complex<T> {
        let x = curve.position(t);
        let u = incident.value(x).unwrap_or_else(|_| cplx(T::nan()));
        match formulation {
            Formulation::Direct => {
                let g = incident.gradient(x).unwrap_or_else(|_| [cplx(T::nan()); 2]);
                let nu = curve.normal(t);
                g[0] * nu[0] + g[1] * nu[1] - ik * u
            }
            Formulation::Indirect => -u,
        }
    };
    project_finite(space, &data)
}

fn project_finite<T: Real>(
    space: &BoundarySpace<T>,
    data: &(dyn Fn(T) -> Complex<T> + Sync),
) -> Result<DensityVector<T>> {
    let rhs = space.l2_project(&Target::Function(data))?;
    if rhs.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::domain("incident data is not finite on the boundary"));
    }
    Ok(rhs)
}

fn finish<T: Real + RealField>(
    space: &BoundarySpace<T>,
    incident: &IncidentField<T>,
    formulation: Formulation,
    system: &GalerkinSystem<T>,
) -> Result<ScatteringSolution<T>> {
    let report = solve_galerkin(system)?;
    let order = 2 * default_quad_order(space.mesh().h() * incident.k);
    Ok(ScatteringSolution {
        space: space.clone(),
        density: report.density,
        formulation,
        incident: *incident,
        relative_residual: report.relative_residual,
        quad: space.panel_quadrature(order),
    })
}

impl<T: Real> ScatteringSolution<T> {
    pub fn space(&self) -> &BoundarySpace<T> {
        &self.space
    }

    /// Density values at the quadrature nodes of every panel.
    fn node_density(&self) -> Vec<Vec<Complex<T>>> {
        let nl = self.space.local_dim();
        self.quad
            .iter()
            .enumerate()
            .map(|(i, q)| {
                (0..q.weights.len())
                    .map(|n| {
                        (0..nl).fold(cplx(T::zero()), |acc, a| {
                            acc + self.density.coeffs[self.space.dof(i, a)] * q.phi[n * nl + a]
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Scattered field `u^S` at exterior points.
    ///
    /// Direct: `u^S = -S_k d_nu u`. Indirect: `u^S = (D_k - ik S_k) v`.
    pub fn scattered_field(&self, points: &[Point<T>]) -> Result<Vec<Complex<T>>> {
        let curve = self.space.curve();
        let h = self.space.mesh().h();
        let mut near = 0;
        for p in points {
            if curve.contains(*p) {
                return Err(Error::invalid(format!("{p:?} is inside the obstacle")));
            }
            if curve.distance_to(*p) <= h {
                near += 1;
            }
        }
        if near > 0 {
            log::warn!("{near} field points lie within h = {h} of the boundary; quadrature is unreliable there");
        }
        let k = self.incident.k;
        let ik = imag_unit::<T>() * k;
        let dens = self.node_density();
        points
            .par_iter()
            .map(|&x| {
                let mut acc = cplx(T::zero());
                for (q, vals) in self.quad.iter().zip(&dens) {
                    for (n, yp) in q.points.iter().enumerate() {
                        let w = q.weights[n] * yp.jac;
                        let s = phi_k(k, x, yp.x)?;
                        let kern = match self.formulation {
                            Formulation::Direct => -s,
                            Formulation::Indirect => {
                                // grad_y Phi = -grad_x Phi
                                let g = grad_phi_k(k, x, yp.x)?;
                                -(g[0] * yp.nu[0] + g[1] * yp.nu[1]) - ik * s
                            }
                        };
                        acc += kern * vals[n] * w;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Total field `u^I + u^S` at exterior points.
    pub fn reconstruct_field(&self, points: &[Point<T>]) -> Result<Vec<Complex<T>>> {
        let us = self.scattered_field(points)?;
        points
            .iter()
            .zip(us)
            .map(|(&x, s)| Ok(self.incident.value(x)? + s))
            .collect()
    }
}

/// Outcome of [`point_source_test`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSourceReport<T> {
    /// `max |u^S - Phi_k(., y0)| / max |Phi_k(., y0)|` over the probe ring.
    pub max_rel_error: T,
    pub h: T,
    pub n_panels: usize,
}

/// Solves `A_k v = Phi_k(., y0)|_Gamma` and compares `(D_k - ik S_k) v` with
/// `Phi_k(., y0)` on the circle of radius [`PROBE_RADIUS`].
pub fn point_source_test<T: Real + RealField>(
    space: &BoundarySpace<T>,
    k: T,
    source: Point<T>,
) -> Result<PointSourceReport<T>> {
    let curve = *space.curve();
    let incident = IncidentField::point_source(&curve, k, source)?;
    let data = move |t: T| -> Complex<T> { incident.value(curve.position(t)).unwrap_or_else(|_| cplx(T::nan())) };
    let rhs = project_finite(space, &data)?;
    let system = assemble(space, k, Formulation::Indirect, AssemblyOptions::default())?.with_rhs(rhs.coeffs)?;
    let sol = finish(space, &incident, Formulation::Indirect, &system)?;
    let probes = probe_ring(T::lit(PROBE_RADIUS), PROBE_POINTS);
    let us = sol.scattered_field(&probes)?;
    let mut err = T::zero();
    let mut scale = T::zero();
    for (x, u) in probes.iter().zip(us) {
        let exact = incident.value(*x)?;
        err = Float::max(err, (u - exact).norm());
        scale = Float::max(scale, exact.norm());
    }
    Ok(PointSourceReport {
        max_rel_error: err / scale,
        h: space.mesh().h(),
        n_panels: space.mesh().n_panels(),
    })
}

/// `n` equally spaced points on the circle of radius `r`.
pub fn probe_ring<T: Real>(r: T, n: usize) -> Vec<Point<T>> {
    (0..n)
        .map(|j| {
            let t = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
            let (s, c) = t.sin_cos();
            [r * c, r * s]
        })
        .collect()
}

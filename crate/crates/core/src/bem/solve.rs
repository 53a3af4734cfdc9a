use nalgebra::RealField;
use num_traits::Float;

use super::assembly::GalerkinSystem;
use super::space::DensityVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Factorizations whose pivot growth exceeds this are rejected.
pub const PIVOT_GROWTH_LIMIT: f64 = 1e8;

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub density: DensityVector<T>,
    /// `||A x - b|| / ||b||`.
    pub relative_residual: T,
    /// `max |U_ij| / max |A_ij|`.
    pub pivot_growth: T,
}

/// Dense LU with partial pivoting.
pub fn solve_galerkin<T: Real + RealField>(system: &GalerkinSystem<T>) -> Result<SolveReport<T>> {
    let a = &system.matrix;
    let amax = a.iter().map(|z| z.norm()).fold(T::zero(), Float::max);
    if amax == T::zero() || !Float::is_finite(amax) {
        return Err(Error::Singular("matrix is zero or not finite".into()));
    }
    let lu = a.clone().lu();
    let umax = lu.u().iter().map(|z| z.norm()).fold(T::zero(), Float::max);
    let growth = umax / amax;
    if !Float::is_finite(growth) || growth > T::lit(PIVOT_GROWTH_LIMIT) {
        return Err(Error::Singular(format!("pivot growth {growth} exceeds {PIVOT_GROWTH_LIMIT}")));
    }
    let x = lu
        .solve(&system.rhs)
        .ok_or_else(|| Error::Singular("zero pivot: I + P_N K is not invertible at this resolution".into()))?;
    let bnorm = system.rhs.norm();
    let resid = (a * &x - &system.rhs).norm();
    let relative_residual = if bnorm > T::zero() { resid / bnorm } else { resid };
    if !Float::is_finite(relative_residual) {
        return Err(Error::Singular("solution is not finite".into()));
    }
    Ok(SolveReport {
        density: DensityVector {
            coeffs: x.iter().cloned().collect(),
        },
        relative_residual,
        pivot_growth: growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::{assemble, AssemblyOptions, BoundarySpace};
    use crate::curves::Curve;
    use crate::kernels::Formulation;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};

    #[test]
    fn recovers_known_solution() {
        let s = BoundarySpace::build(Curve::<f64>::Kite, 20, 1).unwrap();
        let sys = assemble(&s, 6.0, Formulation::Direct, AssemblyOptions::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x: Vec<Complex<f64>> = (0..s.dim())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let b = &sys.matrix * nalgebra::DVector::from_vec(x.clone());
        let sys = sys.with_rhs(b.iter().cloned().collect()).unwrap();
        let rep = solve_galerkin(&sys).unwrap();
        let err: f64 = rep.density.coeffs.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
        assert!(rep.relative_residual < 1e-12);
        assert!(rep.pivot_growth < 10.0);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let s = BoundarySpace::build(Curve::<f64>::Circle(1.0), 4, 0).unwrap();
        let mut sys = assemble(&s, 1.0, Formulation::Direct, AssemblyOptions::default()).unwrap();
        sys.matrix.fill(Complex::new(0.0, 0.0));
        assert!(solve_galerkin(&sys).is_err());
    }
}

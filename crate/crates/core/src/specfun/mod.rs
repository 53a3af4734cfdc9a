//! Special functions: Bessel, Hankel, Airy and Olver's uniform asymptotics.
//!
//! All routines are pure and allocation-light; the kernel hot path uses
//! [`bessel_zero_one`].

mod airy;
mod bessel;
mod scaled;
mod uniform;

pub use airy::{airy_ai, airy_ai_prime, airy_pair, AiryPair, SECTOR_MARGIN};
pub use bessel::{
    bessel_j, bessel_j_prime, bessel_zero_one, hankel1, hankel1_prime, BesselSequence,
    BesselZeroOne,
};
pub use scaled::{Scaled, ScaledComplex};
pub use uniform::{uniform_bessel, zeta_of_z, UniformAsymptoticInput, UniformBessel};

use serde::{Deserialize, Serialize};

/// Non-negative integer order of a Bessel or Hankel function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Order(usize);

impl Order {
    pub fn new(m: usize) -> Self {
        Order(m)
    }

    /// `|m|`; functions of negative order follow from symmetry at the call site.
    pub fn from_signed(m: i64) -> Self {
        Order(m.unsigned_abs() as usize)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl From<usize> for Order {
    fn from(m: usize) -> Self {
        Order(m)
    }
}

impl From<i32> for Order {
    fn from(m: i32) -> Self {
        Order::from_signed(m as i64)
    }
}

/// A function value with a heuristic absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialValue<V, T = V> {
    pub value: V,
    pub abs_err_est: T,
}

impl<V, T> SpecialValue<V, T> {
    pub fn new(value: V, abs_err_est: T) -> Self {
        Self { value, abs_err_est }
    }
}

impl<T: num_traits::Zero> SpecialValue<T, T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            abs_err_est: T::zero(),
        }
    }
}

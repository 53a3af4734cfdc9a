//! Numbers carried as `mantissa * B^exp` with `B = 2^SCALE_EXP2`.
//!
//! Bessel recurrences at orders far beyond the argument produce values that
//! leave the floating-point range long before the products the solver needs
//! (`J_m * Y_m`, `J_m / J'_m`, ...) do. Scaled values let those products be
//! formed exactly and converted at the end.

use num_complex::Complex;

use crate::scalar::Real;

#[inline]
fn base<T: Real>() -> T {
    T::lit(2.0).powi(T::SCALE_EXP2)
}

#[inline]
fn apply_scale<T: Real>(mut v: T, exp: i32) -> T {
    let b = base::<T>();
    if exp > 0 {
        for _ in 0..exp {
            v = v * b;
            if v.is_infinite() {
                break;
            }
        }
    } else {
        for _ in 0..(-exp) {
            v = v / b;
            if v == T::zero() {
                break;
            }
        }
    }
    v
}

/// Real value `mant * 2^(SCALE_EXP2 * exp)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled<T> {
    pub mant: T,
    pub exp: i32,
}

impl<T: Real> Scaled<T> {
    pub fn new(mant: T, exp: i32) -> Self {
        Self { mant, exp }.normalized()
    }

    pub fn from_real(v: T) -> Self {
        Self::new(v, 0)
    }

    pub fn zero() -> Self {
        Self {
            mant: T::zero(),
            exp: 0,
        }
    }

    fn normalized(mut self) -> Self {
        if self.mant == T::zero() || !self.mant.is_finite() {
            self.exp = 0;
            return self;
        }
        let b = base::<T>();
        let ib = T::one() / b;
        while self.mant.abs() >= b {
            self.mant = self.mant * ib;
            self.exp += 1;
        }
        while self.mant.abs() < ib {
            self.mant = self.mant * b;
            self.exp -= 1;
        }
        self
    }

    /// Plain floating-point value; may underflow to zero or overflow to infinity.
    pub fn to_real(self) -> T {
        apply_scale(self.mant, self.exp)
    }

    pub fn is_zero(self) -> bool {
        self.mant == T::zero()
    }

    /// `ln |value|`, finite even when the value itself is not representable.
    pub fn ln_abs(self) -> T {
        self.mant.abs().ln()
            + T::from_i32(self.exp * T::SCALE_EXP2).expect("exponent fits") * T::LN_2()
    }

    pub fn scale(self, factor: T) -> Self {
        Self::new(self.mant * factor, self.exp)
    }

    pub fn mul(self, other: Self) -> Self {
        Self::new(self.mant * other.mant, self.exp + other.exp)
    }

    pub fn div(self, other: Self) -> Self {
        Self::new(self.mant / other.mant, self.exp - other.exp)
    }

    pub fn neg(self) -> Self {
        Self {
            mant: -self.mant,
            exp: self.exp,
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let e = self.exp.max(other.exp);
        let a = apply_scale(self.mant, self.exp - e);
        let b = apply_scale(other.mant, other.exp - e);
        Self::new(a + b, e)
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }
}

/// Complex value `mant * 2^(SCALE_EXP2 * exp)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex<T> {
    pub mant: Complex<T>,
    pub exp: i32,
}

impl<T: Real> ScaledComplex<T> {
    pub fn new(mant: Complex<T>, exp: i32) -> Self {
        Self { mant, exp }.normalized()
    }

    /// `re + i*im` from two independently scaled parts.
    pub fn from_parts(re: Scaled<T>, im: Scaled<T>) -> Self {
        let e = match (re.is_zero(), im.is_zero()) {
            (true, true) => 0,
            (true, false) => im.exp,
            (false, true) => re.exp,
            (false, false) => re.exp.max(im.exp),
        };
        Self::new(
            Complex::new(apply_scale(re.mant, re.exp - e), apply_scale(im.mant, im.exp - e)),
            e,
        )
    }

    fn normalized(mut self) -> Self {
        let mag = self.mant.re.abs().max(self.mant.im.abs());
        if mag == T::zero() || !mag.is_finite() {
            self.exp = 0;
            return self;
        }
        let b = base::<T>();
        let ib = T::one() / b;
        let mut mag = mag;
        while mag >= b {
            self.mant = self.mant * ib;
            mag = mag * ib;
            self.exp += 1;
        }
        while mag < ib {
            self.mant = self.mant * b;
            mag = mag * b;
            self.exp -= 1;
        }
        self
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(
            apply_scale(self.mant.re, self.exp),
            apply_scale(self.mant.im, self.exp),
        )
    }

    pub fn mul(self, other: Self) -> Self {
        Self::new(self.mant * other.mant, self.exp + other.exp)
    }

    pub fn mul_real(self, other: Scaled<T>) -> Self {
        Self::new(self.mant * other.mant, self.exp + other.exp)
    }

    pub fn div(self, other: Self) -> Self {
        Self::new(self.mant / other.mant, self.exp - other.exp)
    }

    pub fn scale(self, factor: Complex<T>) -> Self {
        Self::new(self.mant * factor, self.exp)
    }

    pub fn add(self, other: Self) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        if self.mant == zero {
            return other;
        }
        if other.mant == zero {
            return self;
        }
        let e = self.exp.max(other.exp);
        let a = Complex::new(
            apply_scale(self.mant.re, self.exp - e),
            apply_scale(self.mant.im, self.exp - e),
        );
        let b = Complex::new(
            apply_scale(other.mant.re, other.exp - e),
            apply_scale(other.mant.im, other.exp - e),
        );
        Self::new(a + b, e)
    }

    pub fn ln_abs(self) -> T {
        self.mant.norm().ln()
            + T::from_i32(self.exp * T::SCALE_EXP2).expect("exponent fits") * T::LN_2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_out_of_range_values_is_exact() {
        let tiny = Scaled::new(3.0_f64, -3);
        let huge = Scaled::new(0.5_f64, 3);
        assert_eq!(tiny.to_real(), 0.0);
        assert!(huge.to_real().is_infinite());
        assert_eq!(tiny.mul(huge).to_real(), 1.5);
    }

    #[test]
    fn addition_aligns_exponents() {
        let a = Scaled::new(1.0_f64, 1);
        let b = Scaled::new(1.0_f64, 0);
        let s = a.add(b);
        assert_eq!(s.exp, 1);
        assert!((s.ln_abs() - (500.0 * std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn complex_from_parts() {
        let z = ScaledComplex::from_parts(Scaled::new(2.0_f64, -5), Scaled::new(4.0_f64, 0));
        let c = z.to_complex();
        assert_eq!(c.re, 0.0);
        assert_eq!(c.im, 4.0);
    }
}

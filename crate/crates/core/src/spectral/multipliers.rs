use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fourier::FourierCoefficients;
use crate::error::{Error, Result};
use crate::scalar::{cplx, imag_unit, Real};
use crate::specfun::{BesselSequence, Scaled, ScaledComplex};

/// Positive, finite wavenumber.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WaveNumber<T>(T);

impl<T: Real> WaveNumber<T> {
    pub const DEFAULT_K_MIN: f64 = 2.0;

    pub fn new(k: T) -> Result<Self> {
        if !(k.is_finite() && k > T::zero()) {
            return Err(Error::invalid(format!("wavenumber must be positive and finite, got {k}")));
        }
        Ok(Self(k))
    }

    /// Like [`WaveNumber::new`] but also enforces `k >= k_min`.
    pub fn with_min(k: T, k_min: T) -> Result<Self> {
        let w = Self::new(k)?;
        if k < k_min {
            return Err(Error::invalid(format!("wavenumber {k} below k_min = {k_min}")));
        }
        Ok(w)
    }

    pub fn get(self) -> T {
        self.0
    }
}

/// `ceil(2k) + 100 + n_dof`.
pub fn default_truncation<T: Real>(k: T, n_dof: usize) -> usize {
    (T::lit(2.0) * k).ceil().to_usize().unwrap_or(0) + 100 + n_dof
}

/// Polynomial transition profile of a cutoff.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SmoothStep {
    /// `3u^2 - 2u^3`, C^1.
    Cubic,
    /// `6u^5 - 15u^4 + 10u^3`, C^2.
    #[default]
    Quintic,
    /// `-20u^7 + 70u^6 - 84u^5 + 35u^4`, C^3.
    Septic,
}

impl SmoothStep {
    fn eval<T: Real>(self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        let l = T::lit;
        match self {
            SmoothStep::Cubic => u * u * (l(3.0) - l(2.0) * u),
            SmoothStep::Quintic => u * u * u * (u * (u * l(6.0) - l(15.0)) + l(10.0)),
            SmoothStep::Septic => {
                u * u * u * u * (l(35.0) + u * (l(-84.0) + u * (l(70.0) + u * l(-20.0))))
            }
        }
    }
}

/// Frequency cutoff `chi(x)`, `x = m^2 / k^2`: one up to `plateau_end`,
/// zero from `support_end` on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec<T> {
    pub plateau_end: T,
    pub support_end: T,
    #[serde(default)]
    pub profile: SmoothStep,
}

impl<T: Real> Default for CutoffSpec<T> {
    fn default() -> Self {
        Self {
            plateau_end: T::lit(1.2),
            support_end: T::lit(2.0),
            profile: SmoothStep::Quintic,
        }
    }
}

impl<T: Real> CutoffSpec<T> {
    pub fn new(plateau_end: T, support_end: T, profile: SmoothStep) -> Result<Self> {
        let s = Self {
            plateau_end,
            support_end,
            profile,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.plateau_end.is_finite()
            && self.support_end.is_finite()
            && self.plateau_end > T::zero()
            && self.support_end > self.plateau_end)
        {
            return Err(Error::invalid(format!(
                "cutoff needs 0 < plateau_end < support_end, got {} and {}",
                self.plateau_end, self.support_end
            )));
        }
        Ok(())
    }

    /// `chi(x)`.
    pub fn chi(&self, x: T) -> T {
        if x <= self.plateau_end {
            T::one()
        } else if x >= self.support_end {
            T::zero()
        } else {
            let u = (x - self.plateau_end) / (self.support_end - self.plateau_end);
            T::one() - self.profile.eval(u)
        }
    }
}

/// `chi(m^2 / k^2)`.
pub fn cutoff_multiplier<T: Real>(spec: &CutoffSpec<T>, k: WaveNumber<T>, m: i64) -> T {
    let k = k.get();
    let mm = T::from_i64(m).expect("mode fits");
    spec.chi(mm * mm / (k * k))
}

/// Symbols of the circle operators at one mode `|m|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSymbols<T> {
    pub lambda: Complex<T>,
    pub s: Complex<T>,
    pub d: Complex<T>,
    pub dtn: Complex<T>,
    /// `None` when the impedance denominator vanishes numerically.
    pub itd: Option<Complex<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerMultipliers<T> {
    pub s: Complex<T>,
    pub d: Complex<T>,
}

fn mode_symbols<T: Real>(seq: &BesselSequence<T>, k: T, m: usize) -> ModeSymbols<T> {
    let i = imag_unit::<T>();
    let pi = T::PI();
    let two = T::lit(2.0);
    let j = seq.j(m);
    let jp = seq.j_prime(m);
    let h = seq.h(m);
    let hp = seq.h_prime(m);

    let lambda = h.mul(ScaledComplex::from_parts(j, jp)).to_complex() * (pi * k);
    let s = h.mul_real(j).to_complex() * i * (pi / two);
    let d = (lambda - cplx(T::one()) + i * s * (two * k)) / two;
    let dtn = hp.div(h).to_complex() * k;

    let den = ScaledComplex::from_parts(jp, j.neg());
    let size = j.ln_abs().max(jp.ln_abs());
    let itd = if den.ln_abs() - size < T::epsilon().ln() + T::lit(-4.0) {
        None
    } else {
        let num = ScaledComplex::from_parts(j, Scaled::zero());
        Some(num.div(den).to_complex() / k)
    };
    ModeSymbols {
        lambda,
        s,
        d,
        dtn,
        itd,
    }
}

/// All circle symbols for `0 <= m <= M` at fixed `k`.
#[derive(Clone, Debug)]
pub struct CircleSpectrum<T> {
    k: T,
    symbols: Vec<ModeSymbols<T>>,
}

impl<T: Real> CircleSpectrum<T> {
    pub fn new(k: WaveNumber<T>, max_mode: usize) -> Result<Self> {
        let kk = k.get();
        let seq = BesselSequence::new(max_mode, kk)?;
        let symbols = (0..=max_mode).map(|m| mode_symbols(&seq, kk, m)).collect();
        Ok(Self { k: kk, symbols })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn max_mode(&self) -> usize {
        self.symbols.len() - 1
    }

    pub fn mode(&self, m: i64) -> &ModeSymbols<T> {
        &self.symbols[m.unsigned_abs() as usize]
    }

    pub fn lambda(&self, m: i64) -> Complex<T> {
        self.mode(m).lambda
    }

    pub fn symbols(&self) -> &[ModeSymbols<T>] {
        &self.symbols
    }
}

/// `lambda_m(k) = pi k H_|m|(k) (i J'_|m|(k) + J_|m|(k))`, the symbol of `2 A_k`.
pub fn lambda_m<T: Real>(k: WaveNumber<T>, m: i64) -> Result<Complex<T>> {
    let n = m.unsigned_abs() as usize;
    let seq = BesselSequence::new(n, k.get())?;
    Ok(mode_symbols(&seq, k.get(), n).lambda)
}

/// Symbols `s_m` of `S_k` and `d_m` of `D_k` (equal to that of `D'_k` on the circle).
pub fn layer_multipliers<T: Real>(k: WaveNumber<T>, m: i64) -> Result<LayerMultipliers<T>> {
    let n = m.unsigned_abs() as usize;
    let seq = BesselSequence::new(n, k.get())?;
    let sym = mode_symbols(&seq, k.get(), n);
    Ok(LayerMultipliers { s: sym.s, d: sym.d })
}

/// Exterior Dirichlet-to-Neumann symbol `k H'_|m|(k) / H_|m|(k)`.
pub fn dtn_multiplier<T: Real>(k: WaveNumber<T>, m: i64) -> Result<Complex<T>> {
    let n = m.unsigned_abs() as usize;
    let seq = BesselSequence::new(n, k.get())?;
    Ok(mode_symbols(&seq, k.get(), n).dtn)
}

/// Interior impedance-to-Dirichlet symbol `J_|m|(k) / (k J'_|m|(k) - ik J_|m|(k))`.
pub fn itd_multiplier<T: Real>(k: WaveNumber<T>, m: i64) -> Result<Complex<T>> {
    let n = m.unsigned_abs() as usize;
    let seq = BesselSequence::new(n, k.get())?;
    mode_symbols(&seq, k.get(), n)
        .itd
        .ok_or_else(|| Error::Singular(format!("impedance denominator vanishes at m = {m}, k = {}", k.get())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MultiplierKind<T> {
    TwoA,
    TwoAInverse,
    SingleLayer,
    DoubleLayer,
    CutoffLow(CutoffSpec<T>),
    CutoffHigh(CutoffSpec<T>),
    DtNPlus,
    ItDMinus,
    Identity,
    Composition(Vec<MultiplierKind<T>>),
}

/// A Fourier-diagonal operator on the unit circle at wavenumber `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierOperator<T> {
    pub kind: MultiplierKind<T>,
    pub k: WaveNumber<T>,
}

impl<T: Real> MultiplierOperator<T> {
    pub fn new(kind: MultiplierKind<T>, k: WaveNumber<T>) -> Result<Self> {
        fn check<T: Real>(kind: &MultiplierKind<T>) -> Result<()> {
            match kind {
                MultiplierKind::CutoffLow(c) | MultiplierKind::CutoffHigh(c) => c.validate(),
                MultiplierKind::Composition(list) => list.iter().try_for_each(check),
                _ => Ok(()),
            }
        }
        check(&kind)?;
        Ok(Self { kind, k })
    }

    /// Composition of operators sharing one wavenumber.
    pub fn compose(ops: &[MultiplierOperator<T>]) -> Result<Self> {
        let k = ops
            .first()
            .map(|o| o.k)
            .ok_or_else(|| Error::invalid("empty composition"))?;
        if ops.iter().any(|o| o.k != k) {
            return Err(Error::invalid("composition mixes wavenumbers"));
        }
        Ok(Self {
            kind: MultiplierKind::Composition(ops.iter().map(|o| o.kind.clone()).collect()),
            k,
        })
    }

    /// Symbol at mode `m`; `spectrum` must cover `|m|`.
    pub fn symbol(&self, spectrum: &CircleSpectrum<T>, m: i64) -> Result<Complex<T>> {
        symbol_of(&self.kind, spectrum, m)
    }
}

fn symbol_of<T: Real>(kind: &MultiplierKind<T>, sp: &CircleSpectrum<T>, m: i64) -> Result<Complex<T>> {
    let sym = sp.mode(m);
    let k = WaveNumber(sp.k());
    Ok(match kind {
        MultiplierKind::TwoA => sym.lambda,
        MultiplierKind::TwoAInverse => sym.lambda.inv(),
        MultiplierKind::SingleLayer => sym.s,
        MultiplierKind::DoubleLayer => sym.d,
        MultiplierKind::CutoffLow(c) => cplx(cutoff_multiplier(c, k, m)),
        MultiplierKind::CutoffHigh(c) => cplx(T::one() - cutoff_multiplier(c, k, m)),
        MultiplierKind::DtNPlus => sym.dtn,
        MultiplierKind::ItDMinus => sym.itd.ok_or_else(|| {
            Error::Singular(format!("impedance denominator vanishes at m = {m}, k = {}", sp.k()))
        })?,
        MultiplierKind::Identity => cplx(T::one()),
        MultiplierKind::Composition(list) => {
            let mut acc = cplx(T::one());
            for kind in list {
                acc = acc * symbol_of(kind, sp, m)?;
            }
            acc
        }
    })
}

/// `coeffs'_m = mu(|m|) coeffs_m`.
pub fn apply<T: Real>(
    op: &MultiplierOperator<T>,
    v: &FourierCoefficients<T>,
) -> Result<FourierCoefficients<T>> {
    let edge = v.edge_fraction();
    if edge > T::lit(1e-12) {
        log::warn!(
            "band limit M = {} may be insufficient: edge coefficient fraction {edge}",
            v.max_mode()
        );
    }
    let spectrum = CircleSpectrum::new(op.k, v.max_mode())?;
    apply_with(op, &spectrum, v)
}

/// [`apply`] with a precomputed spectrum covering the band of `v`.
pub fn apply_with<T: Real>(
    op: &MultiplierOperator<T>,
    spectrum: &CircleSpectrum<T>,
    v: &FourierCoefficients<T>,
) -> Result<FourierCoefficients<T>> {
    if spectrum.max_mode() < v.max_mode() || spectrum.k() != op.k.get() {
        return Err(Error::invalid("spectrum does not match operator or band"));
    }
    let mut out = v.clone();
    for (m, c) in v.modes().zip(out.as_mut_slice()) {
        *c = *c * op.symbol(spectrum, m)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, hankel1};

    fn k(x: f64) -> WaveNumber<f64> {
        WaveNumber::new(x).unwrap()
    }

    #[test]
    fn golden_lambda_values() {
        let cases = [
            (10.0, 0, Complex::new(1.976_205_625_111_889_085_4, -0.094_248_659_943_296_425_7)),
            (10.0, 5, Complex::new(2.157_436_913_059_216_727_33, -0.241_415_795_816_413_042_39)),
            (10.0, 100, Complex::new(1.000_050_764_874_751_29, -0.100_503_833_451_341_33)),
        ];
        for (kk, m, want) in cases {
            let got = lambda_m(k(kk), m).unwrap();
            assert!((got - want).norm() <= 1e-11 * want.norm(), "m={m}: {got} vs {want}");
        }
    }

    #[test]
    fn lambda_even_in_m() {
        assert_eq!(lambda_m(k(7.0), 5).unwrap(), lambda_m(k(7.0), -5).unwrap());
    }

    #[test]
    fn consistency_identity() {
        for &kk in &[5.0f64, 10.0, 20.0, 40.0] {
            let sp: CircleSpectrum<f64> = CircleSpectrum::new(k(kk), (4.0 * kk) as usize).unwrap();
            for (m, sym) in sp.symbols().iter().enumerate() {
                let lhs: Complex<f64> = Complex::<f64>::new(1.0, 0.0) + sym.d * 2.0 - Complex::<f64>::i() * sym.s * (2.0 * kk);
                assert!((lhs - sym.lambda).norm() < 1e-10, "k={kk} m={m}");
            }
        }
    }

    fn s_by_quadrature(kk: f64, m: i64) -> Complex<f64> {
        // (S e_m)(0) / e_m(0) on the unit circle, Jacobian 1.
        // Phi = -(1/2pi) J0(kr) ln|2 sin(s/2)| + smooth; the log part is
        // integrated against a Fourier series of the logarithm instead.
        use crate::specfun::bessel_zero_one;
        let n = 4000usize;
        let h = std::f64::consts::TAU / n as f64;
        let mut smooth = Complex::new(0.0, 0.0);
        for i in 0..n {
            let s = (i as f64 + 0.5) * h - std::f64::consts::PI;
            let r = 2.0 * (s / 2.0).sin().abs();
            let b = bessel_zero_one(kk * r);
            let phi = Complex::i() * 0.25 * b.h0();
            let log_part = -b.j0 / std::f64::consts::TAU * r.ln();
            smooth += (phi - log_part) * Complex::from_polar(1.0, m as f64 * s) * h;
        }
        // int_{-pi}^{pi} J0(k 2|sin(s/2)|) ln(2|sin(s/2)|) e^{ims} ds
        // = -pi sum_{n != 0} c_n / |n|, with c_n the Fourier coefficients of
        // J0(k r(s)) e^{ims}: J0(2k sin(s/2)) = sum_l J_l(k)^2 e^{ils}.
        let mut log_int = 0.0;
        let l_max = (kk as i64) + 60;
        for l in -l_max..=l_max {
            let nn = l + m;
            if nn == 0 {
                continue;
            }
            let jl = bessel_j(l.unsigned_abs() as usize, kk).unwrap().value;
            log_int += -std::f64::consts::PI * jl * jl / nn.abs() as f64;
        }
        smooth - Complex::new(log_int / std::f64::consts::TAU, 0.0)
    }

    #[test]
    fn single_layer_symbol_matches_quadrature() {
        for &(kk, m) in &[(1.0, 0i64), (5.0, 3), (10.0, 12), (10.0, 0)] {
            let want = s_by_quadrature(kk, m);
            let got = layer_multipliers(k(kk), m).unwrap().s;
            assert!((got - want).norm() < 1e-8, "k={kk} m={m}: {got} vs {want}");
        }
    }

    #[test]
    fn itd_denominator_matches_bessel_values() {
        let j0 = bessel_j(0usize, 5.0f64).unwrap().value;
        let j1 = bessel_j(1usize, 5.0f64).unwrap().value;
        let den = Complex::new(-5.0 * j1, -5.0 * j0);
        let got = itd_multiplier(k(5.0), 0).unwrap();
        assert!((got - j0 / den).norm() < 1e-13);
    }

    #[test]
    fn dtn_radiates() {
        for &kk in &[2.0, 10.0, 40.0] {
            let sp = CircleSpectrum::new(k(kk), (4.0 * kk) as usize).unwrap();
            assert!(sp.symbols().iter().all(|s| s.dtn.im > 0.0));
        }
        let h = hankel1(0usize, 3.0).unwrap().value;
        assert!(h.norm() > 0.0);
    }

    #[test]
    fn cutoff_profile() {
        let c = CutoffSpec::<f64>::default();
        assert_eq!(cutoff_multiplier(&c, k(10.0), 0), 1.0);
        assert_eq!(cutoff_multiplier(&c, k(10.0), 10), 1.0);
        let m = (4.0f64 * 2.0).sqrt() * 10.0;
        assert_eq!(cutoff_multiplier(&c, k(10.0), m.ceil() as i64), 0.0);
        let mut prev = 1.0;
        for i in 0..200 {
            let v = c.chi(1.0 + i as f64 * 0.01);
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
        assert!(CutoffSpec::new(2.0, 1.0, SmoothStep::Cubic).is_err());
    }

    #[test]
    fn smoothstep_second_derivative_vanishes_at_ends() {
        let h = 1e-4;
        for p in [SmoothStep::Quintic, SmoothStep::Septic] {
            for u in [0.0f64, 1.0] {
                let d2 = (p.eval(u + h) - 2.0 * p.eval(u) + p.eval(u - h)) / (h * h);
                assert!(d2.abs() < 1e-2, "{p:?} at {u}: {d2}");
            }
        }
    }

    #[test]
    fn apply_single_mode_and_inverse() {
        let kk = k(9.0);
        let v = FourierCoefficients::single_mode(40, 7);
        let two_a = MultiplierOperator::new(MultiplierKind::TwoA, kk).unwrap();
        let inv = MultiplierOperator::new(MultiplierKind::TwoAInverse, kk).unwrap();
        let w = apply(&two_a, &v).unwrap();
        assert!((w.get(7) - lambda_m(kk, 7).unwrap()).norm() < 1e-14);
        assert_eq!(w.get(6), Complex::new(0.0, 0.0));
        let back = apply(&inv, &w).unwrap();
        assert!((back.get(7) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn composition_rejects_mixed_k() {
        let a = MultiplierOperator::new(MultiplierKind::TwoA, k(3.0)).unwrap();
        let b = MultiplierOperator::new(MultiplierKind::TwoA, k(4.0)).unwrap();
        assert!(MultiplierOperator::compose(&[a, b]).is_err());
    }

    #[test]
    fn wavenumber_validation() {
        assert!(WaveNumber::new(0.0).is_err());
        assert!(WaveNumber::new(f64::NAN).is_err());
        assert!(WaveNumber::with_min(1.0, 2.0).is_err());
    }
}

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use crate::curves::{Curve, KernelPoint};
use crate::error::{Error, Result};
use crate::quadrature::gauss_on;
use crate::scalar::{compensated_sum, cplx, Real};
use crate::spectral::FourierCoefficients;

/// Discontinuous piecewise polynomials of degree `p` with a basis that is
/// orthonormal in `L^2(Gamma)` on every panel.
#[derive(Clone, Debug)]
pub struct BoundarySpace<T> {
    mesh: Mesh<T>,
    p: usize,
    /// Per panel, row `a` holds the Legendre coefficients of basis function `a`
    /// (lower triangular, row-major `(p+1)^2`).
    basis: Vec<Vec<T>>,
}

/// Coefficients of a boundary function in a [`BoundarySpace`] basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityVector<T> {
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> DensityVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![cplx(T::zero()); n],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Equals the `L^2(Gamma)` norm because the basis is orthonormal.
    pub fn l2_norm(&self) -> T {
        compensated_sum(self.coeffs.iter().map(|c| c.norm_sqr())).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect(),
        }
    }
}

/// Function on the boundary that can be projected onto a space.
pub enum Target<'a, T> {
    /// `sum v_m e^{imt} / sqrt(2pi)` in the curve parameter.
    Fourier(&'a FourierCoefficients<T>),
    /// Smooth function of the curve parameter.
    Function(&'a (dyn Fn(T) -> Complex<T> + Sync)),
    /// Element of another space on the same curve, typically a refinement.
    Density(&'a BoundarySpace<T>, &'a DensityVector<T>),
}

/// Quadrature samples on one panel: parameter, weight times Jacobian, value.
struct Samples<T> {
    t: Vec<T>,
    wj: Vec<T>,
    values: Vec<Complex<T>>,
}

/// Gauss order per sub-panel for integrating targets.
const TARGET_ORDER: usize = 24;
const GRAM_PIECES: usize = 4;

fn composite<T: Real>(lo: T, hi: T, pieces: usize, order: usize) -> crate::quadrature::QuadratureRule<T> {
    let mut nodes = Vec::with_capacity(pieces * order);
    let mut weights = Vec::with_capacity(pieces * order);
    for s in 0..pieces {
        let a = lo + (hi - lo) * T::from_usize_lossy(s) / T::from_usize_lossy(pieces);
        let b = lo + (hi - lo) * T::from_usize_lossy(s + 1) / T::from_usize_lossy(pieces);
        let r = gauss_on(a, b, None, order);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    crate::quadrature::QuadratureRule {
        nodes,
        weights,
        kind: crate::quadrature::RuleKind::GaussLegendre(order),
    }
}

fn legendre_into<T: Real>(xi: T, out: &mut [T]) {
    if out.is_empty() {
        return;
    }
    out[0] = T::one();
    if out.len() > 1 {
        out[1] = xi;
    }
    for n in 2..out.len() {
        let nf = T::from_usize_lossy(n);
        out[n] = ((T::lit(2.0) * nf - T::one()) * xi * out[n - 1] - (nf - T::one()) * out[n - 2]) / nf;
    }
}

impl<T: Real> BoundarySpace<T> {
    pub fn new(mesh: Mesh<T>, p: usize) -> Result<Self> {
        let n = p + 1;
        let order = p + 24;
        let basis = (0..mesh.n_panels())
            .map(|i| {
                let (lo, hi) = mesh.panel(i);
                let rule = composite(lo, hi, GRAM_PIECES, order);
                let mut gram = vec![T::zero(); n * n];
                let mut leg = vec![T::zero(); n];
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    legendre_into(local(lo, hi, t), &mut leg);
                    let wj = w * mesh.curve().jacobian(t);
                    for a in 0..n {
                        for b in 0..=a {
                            gram[a * n + b] = gram[a * n + b] + wj * leg[a] * leg[b];
                        }
                    }
                }
                orthonormalizer(&gram, n).ok_or_else(|| {
                    Error::invalid(format!("panel {i} Gram matrix is not positive definite"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, p, basis })
    }

    /// Equal-arclength mesh of `n_panels` panels on `curve`.
    pub fn build(curve: Curve<T>, n_panels: usize, p: usize) -> Result<Self> {
        Self::new(Mesh::equal_arclength(curve, n_panels)?, p)
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn curve(&self) -> &Curve<T> {
        self.mesh.curve()
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn local_dim(&self) -> usize {
        self.p + 1
    }

    pub fn dim(&self) -> usize {
        self.mesh.n_panels() * self.local_dim()
    }

    pub fn dof(&self, panel: usize, a: usize) -> usize {
        panel * self.local_dim() + a
    }

    /// Values of the basis functions of `panel` at parameter `t`, expressed in
    /// the panel's own frame (polynomial extension outside the panel).
    pub fn basis_values(&self, panel: usize, t: T, out: &mut [T]) {
        let n = self.local_dim();
        let (lo, hi) = self.mesh.panel(panel);
        let mut leg = [T::zero(); 16];
        let leg: &mut [T] = if n <= 16 { &mut leg[..n] } else { &mut vec![T::zero(); n][..] };
        legendre_into(local(lo, hi, t), leg);
        let c = &self.basis[panel];
        for a in 0..n {
            out[a] = (0..=a).map(|b| c[a * n + b] * leg[b]).fold(T::zero(), |s, v| s + v);
        }
    }

    /// Point value of a density at parameter `t`.
    pub fn eval(&self, density: &DensityVector<T>, t: T) -> Complex<T> {
        let panel = self.mesh.locate(t);
        let (lo, _) = self.mesh.panel(panel);
        let t = lo + super::mesh::wrap(t - lo);
        let mut phi = vec![T::zero(); self.local_dim()];
        self.basis_values(panel, t, &mut phi);
        phi.iter()
            .enumerate()
            .fold(cplx(T::zero()), |acc, (a, &v)| acc + density.coeffs[self.dof(panel, a)] * v)
    }

    /// Largest deviation of the panel Gram matrices from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let n = self.local_dim();
        let mut worst = T::zero();
        let mut phi = vec![T::zero(); n];
        for i in 0..self.mesh.n_panels() {
            let (lo, hi) = self.mesh.panel(i);
            let rule = composite(lo, hi, GRAM_PIECES, n + 24);
            let mut g = vec![T::zero(); n * n];
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                self.basis_values(i, t, &mut phi);
                let wj = w * self.curve().jacobian(t);
                for a in 0..n {
                    for b in 0..n {
                        g[a * n + b] = g[a * n + b] + wj * phi[a] * phi[b];
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let id = if a == b { T::one() } else { T::zero() };
                    worst = worst.max((g[a * n + b] - id).abs());
                }
            }
        }
        worst
    }

    /// Gauss nodes of order `order` on every panel with kernel data and basis
    /// values.
    pub(crate) fn panel_quadrature(&self, order: usize) -> Vec<PanelQuadrature<T>> {
        (0..self.mesh.n_panels())
            .map(|i| {
                let (lo, hi) = self.mesh.panel(i);
                let rule = gauss_on(lo, hi, None, order);
                let n = self.local_dim();
                let mut phi = vec![T::zero(); rule.len() * n];
                for (q, &t) in rule.nodes.iter().enumerate() {
                    self.basis_values(i, t, &mut phi[q * n..(q + 1) * n]);
                }
                let points: Vec<KernelPoint<T>> = rule.nodes.iter().map(|&t| self.curve().point(t)).collect();
                PanelQuadrature {
                    weights: rule.weights,
                    points,
                    phi,
                }
            })
            .collect()
    }

    /// Nodes and Jacobian-weighted weights resolving `e^{imt}`, `|m| <= M`, on a panel.
    fn band_nodes(&self, panel: usize, max_mode: usize) -> Vec<(T, T)> {
        let (lo, hi) = self.mesh.panel(panel);
        let m = T::from_usize_lossy(max_mode);
        let pieces = ((m * (hi - lo) / T::lit(12.0)).ceil().to_usize().unwrap_or(1)).max(1);
        let order = TARGET_ORDER.max(self.p + 12);
        let mut out = Vec::with_capacity(pieces * order);
        for s in 0..pieces {
            let a = lo + (hi - lo) * T::from_usize_lossy(s) / T::from_usize_lossy(pieces);
            let b = lo + (hi - lo) * T::from_usize_lossy(s + 1) / T::from_usize_lossy(pieces);
            let rule = gauss_on(a, b, None, order);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((t, w * self.curve().jacobian(t)));
            }
        }
        out
    }

    fn samples(&self, panel: usize, target: &Target<'_, T>) -> Samples<T> {
        let (lo, hi) = self.mesh.panel(panel);
        let mut out = Samples {
            t: Vec::new(),
            wj: Vec::new(),
            values: Vec::new(),
        };
        let curve = self.curve();
        match target {
            Target::Fourier(v) => {
                for (t, wj) in self.band_nodes(panel, v.max_mode()) {
                    out.t.push(t);
                    out.wj.push(wj);
                    out.values.push(v.eval(t));
                }
            }
            Target::Function(f) => {
                let rule = composite(lo, hi, GRAM_PIECES, TARGET_ORDER.max(self.p + 12));
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    out.t.push(t);
                    out.wj.push(w * curve.jacobian(t));
                    out.values.push(f(t));
                }
            }
            Target::Density(fine, density) => {
                let fm = fine.mesh();
                let first = fm.locate(lo + (hi - lo) * T::lit(1e-9));
                let order = self.p.max(fine.p) + 24;
                let mut j = first;
                loop {
                    let (a, b) = fm.panel(j);
                    let a2 = a.max(lo);
                    let b2 = b.min(hi);
                    if b2 > a2 {
                        let rule = composite(a2, b2, GRAM_PIECES, order);
                        let mut phi = vec![T::zero(); fine.local_dim()];
                        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                            fine.basis_values(j, t, &mut phi);
                            let v = phi.iter().enumerate().fold(cplx(T::zero()), |acc, (q, &p)| {
                                acc + density.coeffs[fine.dof(j, q)] * p
                            });
                            out.t.push(t);
                            out.wj.push(w * curve.jacobian(t));
                            out.values.push(v);
                        }
                    }
                    if b >= hi || j + 1 >= fm.n_panels() {
                        break;
                    }
                    j += 1;
                }
            }
        }
        out
    }

    fn check_target(&self, target: &Target<'_, T>) -> Result<()> {
        if let Target::Density(fine, d) = target {
            if fine.curve() != self.curve() || d.len() != fine.dim() {
                return Err(Error::invalid("target density lives on a different curve or has the wrong size"));
            }
        }
        Ok(())
    }

    /// Orthogonal `L^2(Gamma)` projection.
    pub fn l2_project(&self, target: &Target<'_, T>) -> Result<DensityVector<T>> {
        self.check_target(target)?;
        let n = self.local_dim();
        let blocks: Vec<Vec<Complex<T>>> = (0..self.mesh.n_panels())
            .into_par_iter()
            .map(|i| {
                let s = self.samples(i, target);
                let mut acc = vec![cplx(T::zero()); n];
                let mut phi = vec![T::zero(); n];
                for q in 0..s.t.len() {
                    self.basis_values(i, s.t[q], &mut phi);
                    for a in 0..n {
                        acc[a] = acc[a] + s.values[q] * (s.wj[q] * phi[a]);
                    }
                }
                acc
            })
            .collect();
        Ok(DensityVector {
            coeffs: blocks.into_iter().flatten().collect(),
        })
    }

    /// `||target - density||_{L^2(Gamma)}` by quadrature.
    pub fn l2_distance(&self, target: &Target<'_, T>, density: &DensityVector<T>) -> Result<T> {
        self.check_target(target)?;
        if density.len() != self.dim() {
            return Err(Error::invalid("density size does not match the space"));
        }
        let n = self.local_dim();
        let parts: Vec<T> = (0..self.mesh.n_panels())
            .into_par_iter()
            .map(|i| {
                let s = self.samples(i, target);
                let mut phi = vec![T::zero(); n];
                compensated_sum((0..s.t.len()).map(|q| {
                    self.basis_values(i, s.t[q], &mut phi);
                    let approx = (0..n).fold(cplx(T::zero()), |acc, a| acc + density.coeffs[self.dof(i, a)] * phi[a]);
                    s.wj[q] * (s.values[q] - approx).norm_sqr()
                }))
            })
            .collect();
        Ok(compensated_sum(parts).sqrt())
    }

    /// `||target||_{L^2(Gamma)}` by the same quadrature as [`Self::l2_distance`].
    pub fn target_norm(&self, target: &Target<'_, T>) -> Result<T> {
        self.l2_distance(target, &DensityVector::zeros(self.dim()))
    }

    /// `||(I - P_N) target||_{L^2(Gamma)}`.
    pub fn best_approx_error(&self, target: &Target<'_, T>) -> Result<T> {
        let proj = self.l2_project(target)?;
        self.l2_distance(target, &proj)
    }

    /// Matrix `E[j][m] = (phi_j, e^{imt}/sqrt(2pi))`, `|m| <= M`, row-major
    /// `dim x (2M+1)`. The inner product carries the Jacobian.
    pub fn fourier_moments(&self, max_mode: usize) -> Vec<Complex<T>> {
        let width = 2 * max_mode + 1;
        let n = self.local_dim();
        let root = T::TAU().sqrt();
        let rows: Vec<Vec<Complex<T>>> = (0..self.mesh.n_panels())
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = self.mesh.panel(i);
                let mut out = vec![cplx(T::zero()); n * width];
                if let (Curve::Circle(r), 0) = (self.curve(), self.p) {
                    let c = self.basis[i][0] * *r;
                    let h = hi - lo;
                    let mid = (lo + hi) / T::lit(2.0);
                    for (col, m) in (-(max_mode as i64)..=max_mode as i64).enumerate() {
                        let mf = T::from_i64(m).expect("mode fits");
                        let x = mf * h / T::lit(2.0);
                        let sinc = if x == T::zero() { T::one() } else { x.sin() / x };
                        out[col] = Complex::from_polar(c * h * sinc / root, -mf * mid);
                    }
                    return out;
                }
                let mut phi = vec![T::zero(); n];
                for (t, wj) in self.band_nodes(i, max_mode) {
                    self.basis_values(i, t, &mut phi);
                    let step = Complex::from_polar(T::one(), -t);
                    let mut phase = Complex::from_polar(wj / root, t * T::from_usize_lossy(max_mode));
                    for col in 0..width {
                        for a in 0..n {
                            out[a * width + col] = out[a * width + col] + phase * phi[a];
                        }
                        phase = phase * step;
                    }
                }
                out
            })
            .collect();
        rows.into_iter().flatten().collect()
    }
}

/// Gauss data on one panel.
#[derive(Clone, Debug)]
pub(crate) struct PanelQuadrature<T> {
    pub weights: Vec<T>,
    pub points: Vec<KernelPoint<T>>,
    /// Row-major `nodes x (p+1)`.
    pub phi: Vec<T>,
}

fn local<T: Real>(lo: T, hi: T, t: T) -> T {
    (T::lit(2.0) * t - lo - hi) / (hi - lo)
}

/// `L^{-1}` for the Cholesky factor `L` of a lower-stored SPD matrix.
fn orthonormalizer<T: Real>(gram: &[T], n: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gram[i * n + j];
            for q in 0..j {
                s = s - l[i * n + q] * l[j * n + q];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut inv = vec![T::zero(); n * n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { T::one() } else { T::zero() };
            for q in c..i {
                s = s - l[i * n + q] * inv[q * n + c];
            }
            inv[i * n + c] = s / l[i * n + i];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle_space(n: usize, p: usize) -> BoundarySpace<f64> {
        BoundarySpace::build(Curve::Circle(1.0), n, p).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(circle_space(16, 0).dim(), 16);
        assert_eq!(circle_space(16, 1).dim(), 32);
        assert!((circle_space(16, 0).mesh().h() - TAU / 16.0).abs() < 1e-14);
    }

    #[test]
    fn bases_are_orthonormal() {
        for curve in [Curve::Circle(1.0), Curve::Ellipse(2.0, 1.0), Curve::Kite] {
            for p in 0..4 {
                let s = BoundarySpace::build(curve, 12, p).unwrap();
                assert!(s.orthonormality_defect() < 1e-12, "{curve:?} p={p}");
            }
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let s = BoundarySpace::build(Curve::<f64>::Kite, 10, 0).unwrap();
        let one = |_t: f64| Complex::new(1.0, 0.0);
        let err = s.best_approx_error(&Target::Function(&one)).unwrap();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn pythagoras_and_idempotence() {
        let s = circle_space(20, 0);
        let v = FourierCoefficients::single_mode(30, 7);
        let proj = s.l2_project(&Target::Fourier(&v)).unwrap();
        let err = s.best_approx_error(&Target::Fourier(&v)).unwrap();
        assert!((err * err + proj.l2_norm().powi(2) - 1.0).abs() < 1e-10);
        let again = s.l2_project(&Target::Density(&s, &proj)).unwrap();
        assert!(again.sub(&proj).l2_norm() < 1e-12);
    }

    #[test]
    fn residual_is_orthogonal() {
        let s = BoundarySpace::build(Curve::Ellipse(1.5, 1.0), 14, 2).unwrap();
        let f = |t: f64| Complex::new(0.0, 3.0 * t.cos()).exp();
        let proj = s.l2_project(&Target::Function(&f)).unwrap();
        let resid = |t: f64| f(t) - s.eval(&proj, t);
        let again = s.l2_project(&Target::Function(&resid)).unwrap();
        assert!(again.l2_norm() < 1e-10);
    }

    #[test]
    fn first_order_rate_for_p0() {
        let v = FourierCoefficients::single_mode(10, 3);
        let e1 = circle_space(32, 0).best_approx_error(&Target::Fourier(&v)).unwrap();
        let e2 = circle_space(64, 0).best_approx_error(&Target::Fourier(&v)).unwrap();
        assert!((e1 / e2 - 2.0).abs() < 0.05, "{e1} {e2}");
        let e3 = circle_space(32, 1).best_approx_error(&Target::Fourier(&v)).unwrap();
        assert!(e3 < e1 / 5.0);
    }

    #[test]
    fn refinement_never_increases_error() {
        let s = BoundarySpace::build(Curve::<f64>::Kite, 8, 1).unwrap();
        let f = |t: f64| Complex::new((2.0 * t).sin(), t.cos().powi(3));
        let mut prev = s.best_approx_error(&Target::Function(&f)).unwrap();
        let mut mesh = s.mesh().clone();
        for _ in 0..3 {
            mesh = mesh.refine();
            let e = BoundarySpace::new(mesh.clone(), 1).unwrap().best_approx_error(&Target::Function(&f)).unwrap();
            assert!(e <= prev * (1.0 + 1e-12));
            prev = e;
        }
    }

    #[test]
    fn fourier_moments_analytic_matches_quadrature() {
        let s = circle_space(12, 0);
        let e = s.fourier_moments(9);
        // quadrature path, via a degree-0 space on a circle of radius 1 built
        // as an ellipse
        let q = BoundarySpace::build(Curve::Ellipse(1.0, 1.0), 12, 0).unwrap();
        let eq = q.fourier_moments(9);
        for (a, b) in e.iter().zip(&eq) {
            assert!((a - b).norm() < 1e-12);
        }
        // row of the panel function reproduces its projection of e_m
        let v = FourierCoefficients::single_mode(9, 4);
        let proj = s.l2_project(&Target::Fourier(&v)).unwrap();
        for j in 0..12 {
            assert!((proj.coeffs[j] - e[j * 19 + 4 + 9].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn nested_density_target() {
        let coarse = BoundarySpace::build(Curve::<f64>::Kite, 10, 0).unwrap();
        let fine = BoundarySpace::new(coarse.mesh().refine().refine(), 0).unwrap();
        let f = |t: f64| Complex::new(t.sin(), 0.5);
        let vf = fine.l2_project(&Target::Function(&f)).unwrap();
        let a = coarse.l2_project(&Target::Density(&fine, &vf)).unwrap();
        let b = coarse.l2_project(&Target::Function(&f)).unwrap();
        assert!(a.sub(&b).l2_norm() < 1e-10);
    }
}

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use super::space::{BoundarySpace, PanelQuadrature};
use crate::error::{Error, Result};
use crate::kernels::{combined_kernel_split, combined_pair_unchecked, Formulation, Operator};
use crate::quadrature::{gauss_legendre, gauss_on, log_weight_gauss};
use crate::scalar::{cplx, Real};

/// Dense Galerkin matrix of `A_k` or `A'_k` and a right-hand side.
#[derive(Clone, Debug)]
pub struct GalerkinSystem<T: Real> {
    pub matrix: DMatrix<Complex<T>>,
    pub rhs: DVector<Complex<T>>,
    pub formulation: Formulation,
    pub k: T,
    pub quad_order: usize,
}

impl<T: Real> GalerkinSystem<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_rhs(mut self, rhs: Vec<Complex<T>>) -> Result<Self> {
        if rhs.len() != self.dim() {
            return Err(Error::invalid(format!(
                "right-hand side has length {}, system has dimension {}",
                rhs.len(),
                self.dim()
            )));
        }
        self.rhs = DVector::from_vec(rhs);
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Gauss order per panel; `None` picks [`default_quad_order`].
    pub quad_order: Option<usize>,
}

/// `max(10, ceil(4 + 3 hk))`.
pub fn default_quad_order<T: Real>(hk: T) -> usize {
    (T::lit(4.0) + T::lit(3.0) * hk).ceil().to_usize().unwrap_or(10).max(10)
}

pub const MAX_HK: f64 = 20.0;
const NEAR_FACTOR: f64 = 0.9;
const NEAR_PIECES: usize = 4;
const ROW_CHUNK: usize = 64;

pub fn assemble<T: Real>(
    space: &BoundarySpace<T>,
    k: T,
    formulation: Formulation,
    options: AssemblyOptions,
) -> Result<GalerkinSystem<T>> {
    Ok(assemble_many(space, k, &[formulation], options)?.remove(0))
}

/// Assembles several formulations at once; kernel evaluations are shared.
pub fn assemble_many<T: Real>(
    space: &BoundarySpace<T>,
    k: T,
    formulations: &[Formulation],
    options: AssemblyOptions,
) -> Result<Vec<GalerkinSystem<T>>> {
    if !(k > T::zero() && k.is_finite()) {
        return Err(Error::invalid(format!("wavenumber must be positive, got {k}")));
    }
    let hk = space.mesh().h() * k;
    if hk > T::lit(MAX_HK) {
        return Err(Error::invalid(format!("hk = {hk} exceeds {MAX_HK}; refine the mesh")));
    }
    let order = options.quad_order.unwrap_or_else(|| default_quad_order(hk));
    let n = space.mesh().n_panels();
    let nl = space.local_dim();
    let dim = space.dim();
    let quads = space.panel_quadrature(order);
    let rules = SingularRules::new(order);
    let centers: Vec<_> = (0..n)
        .map(|i| {
            let (lo, hi) = space.mesh().panel(i);
            space.curve().position((lo + hi) / T::lit(2.0))
        })
        .collect();

    let mut mats = [
        DMatrix::from_element(dim, dim, cplx(T::zero())),
        DMatrix::from_element(dim, dim, cplx(T::zero())),
    ];
    let write = |mats: &mut [DMatrix<Complex<T>>; 2], a: usize, b: usize, blk: &[Vec<Complex<T>>; 2]| {
        for (op, m) in mats.iter_mut().enumerate() {
            for al in 0..nl {
                for be in 0..nl {
                    m[(a * nl + al, b * nl + be)] = blk[op][al * nl + be];
                }
            }
        }
    };

    let ctx = Ctx {
        space,
        k,
        nl,
        order,
    };
    for chunk_start in (0..n).step_by(ROW_CHUNK) {
        let chunk: Vec<_> = (chunk_start..(chunk_start + ROW_CHUNK).min(n))
            .into_par_iter()
            .map(|a| {
                let mut out = Vec::new();
                out.push((a, a, ctx.singular_block(&rules, a, Relation::Same)));
                out.push(((a + 1) % n, a, ctx.singular_block(&rules, (a + 1) % n, Relation::Prev)));
                out.push(((a + n - 1) % n, a, ctx.singular_block(&rules, (a + n - 1) % n, Relation::Next)));
                for b in a + 1..n {
                    if b == a + 1 || (a == 0 && b == n - 1) {
                        continue;
                    }
                    let la = space.mesh().panel_arclength(a);
                    let lb = space.mesh().panel_arclength(b);
                    let d = (centers[a][0] - centers[b][0]).hypot(centers[a][1] - centers[b][1])
                        - (la + lb) / T::lit(2.0);
                    let (ab, ba) = if d < T::lit(NEAR_FACTOR) * la.max(lb) {
                        let qa = ctx.subdivided(a);
                        let qb = ctx.subdivided(b);
                        ctx.regular_pair(&qa, &qb)
                    } else {
                        ctx.regular_pair(&quads[a], &quads[b])
                    };
                    out.push((a, b, ab));
                    out.push((b, a, ba));
                }
                out
            })
            .collect();
        for rows in chunk {
            for (a, b, blk) in rows {
                write(&mut mats, a, b, &blk);
            }
        }
    }
    let half = cplx(T::lit(0.5));
    for m in mats.iter_mut() {
        for i in 0..dim {
            m[(i, i)] += half;
        }
    }
    let [ak, akp] = mats;
    let mut out = Vec::with_capacity(formulations.len());
    for &f in formulations {
        let matrix = match f.operator() {
            Operator::Ak => ak.clone(),
            Operator::AkPrime => akp.clone(),
        };
        out.push(GalerkinSystem {
            matrix,
            rhs: DVector::from_element(dim, cplx(T::zero())),
            formulation: f,
            k,
            quad_order: order,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Relation {
    Same,
    /// Source panel follows the test panel.
    Next,
    /// Source panel precedes the test panel.
    Prev,
}

struct SingularRules<T> {
    gl: (Vec<T>, Vec<T>),
    log: (Vec<T>, Vec<T>),
}

impl<T: Real> SingularRules<T> {
    fn new(order: usize) -> Self {
        let g = gauss_legendre::<T>(order);
        let half = T::lit(0.5);
        let gl = (
            g.nodes.iter().map(|&x| half * (x + T::one())).collect(),
            g.weights.iter().map(|&w| half * w).collect(),
        );
        let l = log_weight_gauss::<T>(order);
        Self {
            gl,
            log: (l.nodes, l.weights),
        }
    }
}

struct Ctx<'a, T: Real> {
    space: &'a BoundarySpace<T>,
    k: T,
    nl: usize,
    order: usize,
}

impl<T: Real> Ctx<'_, T> {
    fn zero_block(&self) -> [Vec<Complex<T>>; 2] {
        [vec![cplx(T::zero()); self.nl * self.nl], vec![cplx(T::zero()); self.nl * self.nl]]
    }

    fn subdivided(&self, panel: usize) -> PanelQuadrature<T> {
        let (lo, hi) = self.space.mesh().panel(panel);
        let mut weights = Vec::new();
        let mut points = Vec::new();
        let mut phi = Vec::new();
        let mut vals = vec![T::zero(); self.nl];
        for s in 0..NEAR_PIECES {
            let a = lo + (hi - lo) * T::from_usize_lossy(s) / T::from_usize_lossy(NEAR_PIECES);
            let b = lo + (hi - lo) * T::from_usize_lossy(s + 1) / T::from_usize_lossy(NEAR_PIECES);
            let rule = gauss_on(a, b, None, self.order);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                weights.push(w);
                points.push(self.space.curve().point(t));
                self.space.basis_values(panel, t, &mut vals);
                phi.extend_from_slice(&vals);
            }
        }
        PanelQuadrature {
            weights,
            points,
            phi,
        }
    }

    /// Blocks `(a, b)` and `(b, a)` for well-separated panels.
    fn regular_pair(
        &self,
        qa: &PanelQuadrature<T>,
        qb: &PanelQuadrature<T>,
    ) -> ([Vec<Complex<T>>; 2], [Vec<Complex<T>>; 2]) {
        let nl = self.nl;
        let mut ab = self.zero_block();
        let mut ba = self.zero_block();
        let zero = cplx(T::zero());
        if nl == 1 {
            let mut acc = [[zero; 2]; 2];
            for (i, xp) in qa.points.iter().enumerate() {
                let wa = qa.weights[i] * qa.phi[i];
                let mut row = [[zero; 2]; 2];
                for (j, yp) in qb.points.iter().enumerate() {
                    let wb = qb.weights[j] * qb.phi[j];
                    let kk = combined_pair_unchecked(self.k, xp, yp);
                    let fwd = wb;
                    let back = wb * yp.jac;
                    row[0][0] += kk[0][0] * fwd;
                    row[1][0] += kk[1][0] * fwd;
                    row[0][1] += kk[0][1] * back;
                    row[1][1] += kk[1][1] * back;
                }
                let fa = wa * xp.jac;
                for op in 0..2 {
                    acc[op][0] += row[op][0] * fa;
                    acc[op][1] += row[op][1] * wa;
                }
            }
            for op in 0..2 {
                ab[op][0] = acc[op][0];
                ba[op][0] = acc[op][1];
            }
            return (ab, ba);
        }
        let mut s_ab = vec![zero; 2 * nl];
        let mut t_ba = vec![zero; 2 * nl];
        for (i, xp) in qa.points.iter().enumerate() {
            s_ab.iter_mut().chain(t_ba.iter_mut()).for_each(|v| *v = zero);
            for (j, yp) in qb.points.iter().enumerate() {
                let kk = combined_pair_unchecked(self.k, xp, yp);
                let wb = qb.weights[j];
                for be in 0..nl {
                    let pb = qb.phi[j * nl + be] * wb;
                    for op in 0..2 {
                        s_ab[op * nl + be] += kk[op][0] * pb;
                        t_ba[op * nl + be] += kk[op][1] * (pb * yp.jac);
                    }
                }
            }
            let wa = qa.weights[i];
            for al in 0..nl {
                let pa = qa.phi[i * nl + al] * wa;
                for be in 0..nl {
                    for op in 0..2 {
                        ab[op][al * nl + be] += s_ab[op * nl + be] * (pa * xp.jac);
                        ba[op][be * nl + al] += t_ba[op * nl + be] * pa;
                    }
                }
            }
        }
        (ab, ba)
    }

    /// Block with test panel `a` and source panel `a`, `a+1` or `a-1`.
    fn singular_block(&self, rules: &SingularRules<T>, a: usize, rel: Relation) -> [Vec<Complex<T>>; 2] {
        let mesh = self.space.mesh();
        let n = mesh.n_panels();
        let nl = self.nl;
        let (lo_a, hi_a) = mesh.panel(a);
        let (b, offset) = match rel {
            Relation::Same => (a, T::zero()),
            Relation::Next => ((a + 1) % n, if a + 1 == n { T::TAU() } else { T::zero() }),
            Relation::Prev => ((a + n - 1) % n, if a == 0 { -T::TAU() } else { T::zero() }),
        };
        let (lo_b, hi_b) = mesh.panel(b);
        let (la, lb) = (hi_a - lo_a, hi_b - lo_b);
        let curve = self.space.curve();
        let mut blk = self.zero_block();
        let mut pa = vec![T::zero(); nl];
        let mut pb = vec![T::zero(); nl];

        let mut add = |t: T, s_frame: T, w_smooth: T, w_log: T, ln_extra: T| {
            let xp = curve.point(t);
            let yp = curve.point(s_frame);
            let kappa = curve.curvature(t);
            self.space.basis_values(a, t, &mut pa);
            self.space.basis_values(b, s_frame - offset, &mut pb);
            for (op_i, op) in [Operator::Ak, Operator::AkPrime].into_iter().enumerate() {
                let sp = combined_kernel_split(op, self.k, &xp, &yp, kappa);
                let v = (sp.smooth + sp.log_coeff * ln_extra) * w_smooth + sp.log_coeff * w_log;
                let v = v * xp.jac;
                for al in 0..nl {
                    for be in 0..nl {
                        blk[op_i][al * nl + be] += v * (pa[al] * pb[be]);
                    }
                }
            }
        };

        let (gx, gw) = (&rules.gl.0, &rules.gl.1);
        let (lx, lw) = (&rules.log.0, &rules.log.1);
        match rel {
            Relation::Same => {
                let l = la;
                let ln_l = l.ln();
                for (rho_set, smooth) in [(lx, false), (gx, true)] {
                    for (g, &rho) in rho_set.iter().enumerate() {
                        let u = l * rho;
                        for (h, &om) in gx.iter().enumerate() {
                            let off = (l - u) * om;
                            let jac = l * (l - u);
                            let (ws, wl) = if smooth {
                                (gw[g] * gw[h] * jac, T::zero())
                            } else {
                                (T::zero(), -lw[g] * gw[h] * jac)
                            };
                            // s below t, then t below s
                            add(lo_a + off + u, lo_a + off, ws, wl, ln_l);
                            add(lo_a + off, lo_a + off + u, ws, wl, ln_l);
                        }
                    }
                }
            }
            Relation::Next | Relation::Prev => {
                let (c, dt, ds) = if rel == Relation::Next {
                    (hi_a, -T::one(), T::one())
                } else {
                    (lo_a, T::one(), -T::one())
                };
                for (rho_set, smooth) in [(lx, false), (gx, true)] {
                    for (g, &rho) in rho_set.iter().enumerate() {
                        for (h, &om) in gx.iter().enumerate() {
                            let jac = la * lb * rho;
                            let (ws, wl) = if smooth {
                                (gw[g] * gw[h] * jac, T::zero())
                            } else {
                                (T::zero(), -lw[g] * gw[h] * jac)
                            };
                            // x = la rho, y = lb rho om
                            add(c + dt * la * rho, c + ds * lb * rho * om, ws, wl, (la + lb * om).ln());
                            // y = lb rho, x = la rho om
                            add(c + dt * la * rho * om, c + ds * lb * rho, ws, wl, (lb + la * om).ln());
                        }
                    }
                }
            }
        }
        blk
    }
}

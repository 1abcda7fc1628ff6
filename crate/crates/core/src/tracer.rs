//! Lattice of points carried along the right-moving acoustic
//! characteristics, transporting the inverse foliation density `mu` and
//! the null generator `L` by their ordinary differential equations.
//!
//! Points are labelled by the eikonal value `u_j ∈ [0, U0]` and a
//! transverse coordinate `θ_k ∈ [0, 1)`. On the initial slice they sit at
//! `(1 - u_j, θ_k)` with `mu = 1/c` and `L = ∂t + (v1 + c) ∂1 + v2 ∂2`.
//! Positions are kept unwrapped; interpolation reduces them modulo the
//! grid periods.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::eos::Eos;
use crate::error::Result;
use crate::euler::{Stage, StageRecord, RK4_NODES, RK4_WEIGHTS};
use crate::geometry::{contract, dot, metric_jacobian, AcousticPoint, Frame, StateJet, Vec3};
use crate::grid::{FieldState, Grid};
use crate::interp::Stencil;
use crate::stencil::periodic_derivative;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CharPoint {
    /// Unwrapped position.
    pub x: [f64; 2],
    pub mu: f64,
    /// `L - ∂t - ∂1` spatial components; zero on the constant background.
    pub l_small: [f64; 2],
}

impl CharPoint {
    pub fn generator(&self) -> [f64; 2] {
        [1.0 + self.l_small[0], self.l_small[1]]
    }

    fn axpy(&self, a: f64, d: &CharRate) -> CharPoint {
        CharPoint {
            x: [self.x[0] + a * d.dx[0], self.x[1] + a * d.dx[1]],
            mu: self.mu + a * d.dmu,
            l_small: [self.l_small[0] + a * d.dl[0], self.l_small[1] + a * d.dl[1]],
        }
    }
}

/// Time derivative of a lattice point along `L`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CharRate {
    pub dx: [f64; 2],
    pub dmu: f64,
    pub dl: [f64; 2],
}

/// State and its first derivatives interpolated to one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSample {
    pub point: AcousticPoint,
    pub jet: StateJet,
}

/// Interpolates a stage (state, time derivatives, gradients) to `x`.
pub fn sample_stage(grid: &Grid, stage: &Stage, eos: &Eos, x: [f64; 2]) -> PointSample {
    let st = Stencil::new(grid, x[0], x[1]);
    let f = &stage.fields;
    let point = AcousticPoint::unchecked(st.eval(&f[0]), [st.eval(&f[1]), st.eval(&f[2])], eos);
    let mut jet = StateJet::default();
    for k in 0..3 {
        jet.d[k] = [st.eval(&stage.rates[k]), st.eval(&stage.grads.d1[k]), st.eval(&stage.grads.d2[k])];
    }
    PointSample { point, jet }
}

/// Right-hand side of the transport system
///
/// ```text
/// L mu  = ½ G_LL⋄X̆Ψ - ½ mu G_LL⋄LΨ - mu G_LX⋄LΨ
/// L Lⁱ  = ½ (G_LL⋄LΨ) Xⁱ - (G_LY⋄LΨ) Yⁱ/g(Y,Y) + ½ (G_LL⋄YΨ) Yⁱ/g(Y,Y)
/// ```
///
/// where the level curves are one-dimensional, so every tangential
/// one-form is a multiple of `Y`.
pub fn char_rhs(p: &CharPoint, s: &PointSample) -> CharRate {
    let ap = &s.point;
    let frame = Frame::from_generator(ap, p.mu, p.generator());
    let jac = metric_jacobian(ap);
    let (l, x, y) = (&frame.l, &frame.x, &frame.y);
    let g_ll = contract(&jac, l, l);
    let g_lx = contract(&jac, l, x);
    let g_ly = contract(&jac, l, y);
    let l_psi = s.jet.along(l);
    let xb_psi = s.jet.along(&frame.x_breve);
    let y_psi = s.jet.along(y);
    let gyy = ap.inner(y, y);
    let ll = dot(&g_ll, &l_psi);
    let dmu = 0.5 * dot(&g_ll, &xb_psi) - 0.5 * p.mu * ll - p.mu * dot(&g_lx, &l_psi);
    let ang = (0.5 * dot(&g_ll, &y_psi) - dot(&g_ly, &l_psi)) / gyy;
    CharRate {
        dx: [l[1], l[2]],
        dmu,
        dl: [0.5 * ll * x[1] + ang * y[1], 0.5 * ll * x[2] + ang * y[2]],
    }
}

#[derive(Clone, Debug)]
pub struct Lattice {
    pub n_u: usize,
    pub n_theta: usize,
    pub labels: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Row-major in `(u_j, θ_k)` with `θ` fastest.
    pub points: Vec<CharPoint>,
    pub t: f64,
    /// `ln υ` at the most recent steps, newest last, with the step size.
    log_upsilon: VecDeque<(f64, Vec<f64>)>,
    /// Interleaved stage data reused across steps.
    packed: Vec<Vec<Packed>>,
}

/// Fields, rates and both spatial derivatives of `(r, v1, v2)` at one cell.
type Packed = [f64; 12];

fn pack(stage: &Stage, out: &mut Vec<Packed>) {
    let n = stage.fields[0].len();
    out.resize(n, [0.0; 12]);
    let sources = [
        &stage.fields[0], &stage.fields[1], &stage.fields[2],
        &stage.rates[0], &stage.rates[1], &stage.rates[2],
        &stage.grads.d1[0], &stage.grads.d1[1], &stage.grads.d1[2],
        &stage.grads.d2[0], &stage.grads.d2[1], &stage.grads.d2[2],
    ];
    out.par_iter_mut().enumerate().for_each(|(p, cell)| {
        for (v, src) in cell.iter_mut().zip(&sources) {
            *v = src[p];
        }
    });
}

fn sample_packed(grid: &Grid, packed: &[Packed], eos: &Eos, x: [f64; 2]) -> PointSample {
    let v = Stencil::new(grid, x[0], x[1]).eval_packed(packed);
    let point = AcousticPoint::unchecked(v[0], [v[1], v[2]], eos);
    let mut jet = StateJet::default();
    for k in 0..3 {
        jet.d[k] = [v[3 + k], v[6 + k], v[9 + k]];
    }
    PointSample { point, jet }
}

/// Seeds the lattice on the initial slice `u = 1 - x1`.
pub fn seed_lattice(state: &FieldState, eos: &Eos, n_u: usize, n_theta: usize, u_max: f64) -> Result<Lattice> {
    let grid = &state.grid;
    let labels: Vec<f64> = (0..n_u).map(|j| u_max * j as f64 / (n_u - 1) as f64).collect();
    let thetas: Vec<f64> = (0..n_theta).map(|k| k as f64 / n_theta as f64).collect();
    let mut points = Vec::with_capacity(n_u * n_theta);
    for &u in &labels {
        for &th in &thetas {
            let st = Stencil::new(grid, 1.0 - u, th);
            let r = st.eval(&state.log_density);
            let (v1, v2) = (st.eval(&state.vel1), st.eval(&state.vel2));
            let c = eos.sound_speed(r)?;
            points.push(CharPoint { x: [1.0 - u, th], mu: 1.0 / c, l_small: [c - 1.0 + v1, v2] });
        }
    }
    let mut lattice = Lattice { n_u, n_theta, labels, thetas, points, t: state.t, log_upsilon: VecDeque::new(), packed: Vec::new() };
    let ups = lattice.upsilon(grid, &state.log_density, eos);
    lattice.log_upsilon.push_back((0.0, ups.iter().map(|v| v.ln()).collect()));
    Ok(lattice)
}

impl Lattice {
    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_theta + k
    }

    fn row(&self, j: usize) -> &[CharPoint] {
        &self.points[j * self.n_theta..(j + 1) * self.n_theta]
    }

    /// Advances every point through the stages of the fluid step just taken.
    pub fn advance(&mut self, rec: &StageRecord, eos: &Eos) {
        let grid = rec.grid;
        let dt = rec.dt;
        self.packed.resize_with(4, Vec::new);
        for (stage, buf) in rec.stages.iter().zip(self.packed.iter_mut()) {
            pack(stage, buf);
        }
        let packed = &self.packed;
        self.points.par_iter_mut().for_each(|p| {
            let base = *p;
            let mut rates = [CharRate::default(); 4];
            for s in 0..4 {
                let q = if s == 0 { base } else { base.axpy(RK4_NODES[s] * dt, &rates[s - 1]) };
                rates[s] = char_rhs(&q, &sample_packed(&grid, &packed[s], eos, q.x));
            }
            let mut acc = CharRate::default();
            for (w, r) in RK4_WEIGHTS.iter().zip(&rates) {
                acc.dx[0] += w * r.dx[0];
                acc.dx[1] += w * r.dx[1];
                acc.dmu += w * r.dmu;
                acc.dl[0] += w * r.dl[0];
                acc.dl[1] += w * r.dl[1];
            }
            *p = base.axpy(dt, &acc);
        });
        self.t += dt;
    }

    /// Records `ln υ` for the finite-difference route to `tr χ`; call once
    /// per step with the log-density at the new time.
    pub fn record_upsilon(&mut self, grid: &Grid, log_density: &[f64], eos: &Eos, dt: f64) {
        let ups = self.upsilon(grid, log_density, eos);
        self.log_upsilon.push_back((dt, ups.iter().map(|v| v.ln()).collect()));
        while self.log_upsilon.len() > 3 {
            self.log_upsilon.pop_front();
        }
    }

    /// `Θ = ∂x/∂θ` at fixed label, by periodic differences across the row.
    pub fn theta_vectors(&self) -> Vec<[f64; 2]> {
        let h = 1.0 / self.n_theta as f64;
        let mut out = vec![[0.0; 2]; self.points.len()];
        for j in 0..self.n_u {
            let row = self.row(j);
            let a: Vec<f64> = row.iter().map(|p| p.x[0]).collect();
            let b: Vec<f64> = row.iter().zip(&self.thetas).map(|(p, th)| p.x[1] - th).collect();
            let (da, db) = (periodic_derivative(&a, h), periodic_derivative(&b, h));
            for k in 0..self.n_theta {
                out[self.index(j, k)] = [da[k], 1.0 + db[k]];
            }
        }
        out
    }

    /// `υ = sqrt(g(Θ, Θ))` at each point.
    pub fn upsilon(&self, grid: &Grid, log_density: &[f64], eos: &Eos) -> Vec<f64> {
        self.theta_vectors()
            .iter()
            .zip(&self.points)
            .map(|(th, p)| {
                let c = eos.speed(Stencil::new(grid, p.x[0], p.x[1]).eval(log_density));
                th[0].hypot(th[1]) / c
            })
            .collect()
    }

    /// `d ln υ / dt` by second-order backward differences of the stored
    /// history; `None` until three equally spaced levels exist.
    pub fn trchi_from_upsilon(&self) -> Option<Vec<f64>> {
        if self.log_upsilon.len() < 3 {
            return None;
        }
        let (dt, newest) = &self.log_upsilon[2];
        let (dt1, mid) = &self.log_upsilon[1];
        if (dt - dt1).abs() > 1e-12 * dt {
            return None;
        }
        let (_, old) = &self.log_upsilon[0];
        Some(newest.iter().zip(mid).zip(old).map(|((a, b), c)| (3.0 * a - 4.0 * b + c) / (2.0 * dt)).collect())
    }

    /// `|det ∂(x1, x2)/∂(u, θ)|`. Centred fourth-order differences in `u`
    /// (second order at the two ends), periodic sixth-order in `θ`.
    pub fn jacobian(&self) -> Vec<f64> {
        let theta = self.theta_vectors();
        let du = self.labels[1] - self.labels[0];
        let n = self.n_u;
        (0..self.points.len())
            .map(|idx| {
                let (j, k) = (idx / self.n_theta, idx % self.n_theta);
                let x = |jj: usize| self.points[self.index(jj, k)].x;
                let d = if j >= 2 && j + 2 < n {
                    let (a, b, c, e) = (x(j - 2), x(j - 1), x(j + 1), x(j + 2));
                    [0, 1].map(|m| (a[m] - 8.0 * b[m] + 8.0 * c[m] - e[m]) / (12.0 * du))
                } else if j == 0 {
                    let (a, b, c) = (x(0), x(1), x(2));
                    [0, 1].map(|m| (-3.0 * a[m] + 4.0 * b[m] - c[m]) / (2.0 * du))
                } else if j + 1 == n {
                    let (a, b, c) = (x(n - 1), x(n - 2), x(n - 3));
                    [0, 1].map(|m| (3.0 * a[m] - 4.0 * b[m] + c[m]) / (2.0 * du))
                } else {
                    let (a, c) = (x(j - 1), x(j + 1));
                    [0, 1].map(|m| (c[m] - a[m]) / (2.0 * du))
                };
                (d[0] * theta[idx][1] - d[1] * theta[idx][0]).abs()
            })
            .collect()
    }

    /// Lattice point with the smallest `mu`.
    pub fn worst(&self) -> (usize, &CharPoint) {
        self.points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.mu.total_cmp(&b.1.mu))
            .expect("lattice is never empty")
    }

    pub fn min_mu(&self) -> f64 {
        self.worst().1.mu
    }
}

/// Geometric quantities at one lattice point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointDiagnostics {
    pub mu: f64,
    pub x: [f64; 2],
    pub log_density: f64,
    pub vel: [f64; 2],
    /// `X Ψ` for each component.
    pub along_x: Vec3,
    /// `X̆ Ψ` for each component.
    pub along_x_breve: Vec3,
    pub along_l: Vec3,
    pub along_y: Vec3,
    /// `tr χ` from `Y`-derivatives of `L` across the lattice.
    pub trchi: f64,
    pub upsilon: f64,
    /// `g(X, X) - 1` with `X = B - L`.
    pub unit_defect: f64,
    /// `g(L, L)`.
    pub null_defect: f64,
}

/// Evaluates the frame decomposition of the state at every lattice point
/// against a snapshot of the fields at the lattice time.
pub fn lattice_diagnostics(lattice: &Lattice, grid: &Grid, snap: &Stage, eos: &Eos) -> Vec<PointDiagnostics> {
    let theta = lattice.theta_vectors();
    let h = 1.0 / lattice.n_theta as f64;
    let mut dl_dtheta = vec![[0.0; 2]; lattice.points.len()];
    for j in 0..lattice.n_u {
        let row = lattice.row(j);
        for m in 0..2 {
            let comp: Vec<f64> = row.iter().map(|p| p.l_small[m]).collect();
            for (k, d) in periodic_derivative(&comp, h).into_iter().enumerate() {
                dl_dtheta[lattice.index(j, k)][m] = d;
            }
        }
    }
    lattice
        .points
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            let s = sample_stage(grid, snap, eos, p.x);
            let ap = &s.point;
            let frame = Frame::from_generator(ap, p.mu, p.generator());
            let jac = metric_jacobian(ap);
            let (l, y) = (&frame.l, &frame.y);
            let th = [0.0, theta[idx][0], theta[idx][1]];
            let ups2 = ap.inner(&th, &th);
            let gyy = ap.inner(y, y);
            // Y = (g(Y,Θ)/υ²) Θ along the level curve.
            let scale = ap.inner(y, &th) / ups2;
            let yl = [0.0, scale * dl_dtheta[idx][0], scale * dl_dtheta[idx][1]];
            let l_psi = s.jet.along(l);
            let g_yy = contract(&jac, y, y);
            let trchi = (ap.inner(&yl, y) + 0.5 * dot(&g_yy, &l_psi)) / gyy;
            PointDiagnostics {
                mu: p.mu,
                x: p.x,
                log_density: ap.log_density,
                vel: ap.vel,
                along_x: s.jet.along(&frame.x),
                along_x_breve: s.jet.along(&frame.x_breve),
                along_l: l_psi,
                along_y: s.jet.along(y),
                trchi,
                upsilon: ups2.sqrt(),
                unit_defect: ap.inner(&frame.x, &frame.x) - 1.0,
                null_defect: ap.inner(l, l),
            }
        })
        .collect()
}

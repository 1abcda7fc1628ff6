//! Run diagnostics: the shock clock `mu⋆`, its linear fit, blowup and
//! hierarchy indicators on the lattice, and residuals of the second-order
//! wave formulation evaluated on stored solution levels.

use rayon::prelude::*;
use serde::Serialize;

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::euler::{specific_vorticity, vorticity_and_rate};
use crate::geometry::{frame_from_eikonal, AcousticPoint};
use crate::grid::{max_abs, FieldState};
use crate::stencil;
use crate::tracer::{Lattice, PointDiagnostics};

/// `min(1, min mu)` over the lattice.
pub fn mu_star(lattice: &Lattice) -> f64 {
    lattice.min_mu().min(1.0)
}

/// Least-squares line `y = intercept + slope t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of the samples from the line.
    pub max_residual: f64,
    pub samples: usize,
}

impl LinearFit {
    /// Time at which the line reaches zero.
    pub fn zero(&self) -> f64 {
        -self.intercept / self.slope
    }
}

pub fn linear_fit(t: &[f64], y: &[f64]) -> Result<LinearFit> {
    if t.len() != y.len() || t.len() < 3 {
        return Err(Error::NotReady(format!("linear fit needs at least 3 samples, got {}", t.len())));
    }
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        stt += (a - tm) * (a - tm);
        sty += (a - tm) * (b - ym);
    }
    if stt == 0.0 {
        return Err(Error::NotReady("linear fit over a single time".into()));
    }
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let max_residual = t.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((b - intercept - slope * a).abs()));
    Ok(LinearFit { slope, intercept, max_residual, samples: t.len() })
}

/// Lifespan estimate: zero of the line fitted to the final `tail` fraction
/// of the `mu⋆` record.
pub fn fit_lifespan(t: &[f64], mu: &[f64], tail: f64) -> Result<LinearFit> {
    let t_end = *t.last().ok_or_else(|| Error::NotReady("empty record".into()))?;
    let start = t_end * (1.0 - tail);
    let keep: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= start).collect();
    let fit = linear_fit(&keep.iter().map(|&i| t[i]).collect::<Vec<_>>(), &keep.iter().map(|&i| mu[i]).collect::<Vec<_>>())?;
    if fit.slope >= 0.0 {
        return Err(Error::NotReady("mu⋆ is not decreasing".into()));
    }
    Ok(fit)
}

/// Line through `mu⋆` over `[0, 0.9 T_obs]`; needs a record that has
/// reached `mu⋆ ≤ 0.2`.
pub fn mu_linearity_fit(t: &[f64], mu: &[f64], t_obs: f64) -> Result<LinearFit> {
    if mu.iter().cloned().fold(f64::INFINITY, f64::min) > 0.2 {
        return Err(Error::NotReady("mu⋆ never dropped to 0.2".into()));
    }
    let keep: Vec<usize> = (0..t.len()).filter(|&i| t[i] <= 0.9 * t_obs).collect();
    linear_fit(&keep.iter().map(|&i| t[i]).collect::<Vec<_>>(), &keep.iter().map(|&i| mu[i]).collect::<Vec<_>>())
}

/// Lattice rows on either side of the worst characteristic that make up
/// its neighbourhood.
pub const BLOWUP_RADIUS: usize = 5;

/// Lower-bound constant `δ⋆ / (8 |c'(0) + 1|)` for `|X̆v1|` near the shock.
pub fn blowup_reference(delta_star: f64, eos: &Eos) -> f64 {
    let (_, dc) = eos.speed_and_slope(0.0);
    delta_star / (8.0 * (dc + 1.0).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupIndicator {
    /// Extremes of `mu |X v1|` over the neighbourhood.
    pub min_product: f64,
    pub max_product: f64,
    /// Same for `mu |X r|`.
    pub min_product_density: f64,
    pub max_product_density: f64,
}

/// `mu |X v1|` and `mu |X r|` over the lattice rows within `radius` labels
/// of the point with the smallest `mu`, across every `θ`.
pub fn blowup_indicator(lattice: &Lattice, diags: &[PointDiagnostics], radius: usize) -> BlowupIndicator {
    let (worst, _) = lattice.worst();
    let jw = worst / lattice.n_theta;
    let (lo, hi) = (jw.saturating_sub(radius), (jw + radius).min(lattice.n_u - 1));
    let mut out = BlowupIndicator {
        min_product: f64::INFINITY,
        max_product: 0.0,
        min_product_density: f64::INFINITY,
        max_product_density: 0.0,
    };
    for j in lo..=hi {
        for k in 0..lattice.n_theta {
            let d = &diags[lattice.index(j, k)];
            let (pv, pr) = ((d.mu * d.along_x[1]).abs(), (d.mu * d.along_x[0]).abs());
            out.min_product = out.min_product.min(pv);
            out.max_product = out.max_product.max(pv);
            out.min_product_density = out.min_product_density.min(pr);
            out.max_product_density = out.max_product_density.max(pr);
        }
    }
    out
}

/// Sizes of the small and large derivative families on the lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Hierarchy {
    pub xb_rho_minus_v1: f64,
    pub xb_v2: f64,
    /// Largest `L` or `Y` derivative of any component.
    pub tangential: f64,
    pub trchi: f64,
    /// The large quantities.
    pub xb_v1: f64,
    pub xb_rho: f64,
}

impl Hierarchy {
    pub fn small(&self) -> f64 {
        self.xb_rho_minus_v1.max(self.xb_v2).max(self.tangential).max(self.trchi)
    }

    /// Componentwise maximum, for accumulating over a run.
    pub fn merge(&mut self, o: &Hierarchy) {
        self.xb_rho_minus_v1 = self.xb_rho_minus_v1.max(o.xb_rho_minus_v1);
        self.xb_v2 = self.xb_v2.max(o.xb_v2);
        self.tangential = self.tangential.max(o.tangential);
        self.trchi = self.trchi.max(o.trchi);
        self.xb_v1 = self.xb_v1.max(o.xb_v1);
        self.xb_rho = self.xb_rho.max(o.xb_rho);
    }
}

pub fn regularity_hierarchy(diags: &[PointDiagnostics]) -> Hierarchy {
    let mut h = Hierarchy::default();
    for d in diags {
        let xb = &d.along_x_breve;
        h.xb_rho_minus_v1 = h.xb_rho_minus_v1.max((xb[0] - xb[1]).abs());
        h.xb_v2 = h.xb_v2.max(xb[2].abs());
        h.xb_v1 = h.xb_v1.max(xb[1].abs());
        h.xb_rho = h.xb_rho.max(xb[0].abs());
        let tan = d.along_l.iter().chain(&d.along_y).fold(0.0f64, |m, x| m.max(x.abs()));
        h.tangential = h.tangential.max(tan);
        h.trchi = h.trchi.max(d.trchi.abs());
    }
    h
}

/// Observed orders `log2(e_k / e_{k+1})` for errors on dyadic grids.
pub fn convergence_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Five equally spaced solution levels, oldest first.
#[derive(Clone, Debug, Default)]
pub struct LevelBuffer {
    levels: std::collections::VecDeque<FieldState>,
    dt: f64,
}

impl LevelBuffer {
    pub const DEPTH: usize = 5;

    /// Appends a level; a change of spacing restarts the history.
    pub fn push(&mut self, state: &FieldState, dt: f64) {
        if (dt - self.dt).abs() > 1e-12 * dt {
            self.levels.clear();
            self.dt = dt;
        }
        if self.levels.len() == Self::DEPTH {
            self.levels.pop_front();
        }
        self.levels.push_back(state.clone());
    }

    pub fn clear(&mut self) {
        self.levels.clear();
    }

    pub fn is_ready(&self) -> bool {
        self.levels.len() == Self::DEPTH
    }

    /// The middle level, at which residuals are evaluated.
    pub fn middle(&self) -> Option<&FieldState> {
        self.is_ready().then(|| &self.levels[2])
    }

    /// Wave residuals at the middle level; see [`wave_residuals`].
    pub fn wave_residuals(&self, eos: &Eos, mu: Option<&[f64]>) -> Result<[Vec<f64>; 3]> {
        if !self.is_ready() {
            return Err(Error::NotReady(format!("{} of {} solution levels stored", self.levels.len(), Self::DEPTH)));
        }
        let lv: [&FieldState; 5] = std::array::from_fn(|m| &self.levels[m]);
        Ok(wave_residuals(lv, self.dt, eos, mu))
    }
}

/// Fourth-order centred first and second time derivatives at the middle
/// of five equally spaced levels.
fn time_derivatives(f: [&[f64]; 5], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f[0].len();
    let (a, b) = (1.0 / (12.0 * dt), 1.0 / (12.0 * dt * dt));
    (0..n)
        .into_par_iter()
        .map(|p| {
            let (m2, m1, z, p1, p2) = (f[0][p], f[1][p], f[2][p], f[3][p], f[4][p]);
            ((m2 - 8.0 * m1 + 8.0 * p1 - p2) * a, (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) * b)
        })
        .unzip()
}

/// `mu (□_g f - F)` for `f = r, v1, v2`, where `F` is the source of the
/// second-order formulation:
///
/// ```text
/// □_g r  = -2 (c'/c) g⁻¹(∂r, ∂r) + 2 (∂1v1 ∂2v2 - ∂2v1 ∂1v2)
/// □_g v1 = -e^r c² ∂2ϖ + 2 e^r ϖ Bv2 - g⁻¹(∂r, ∂v1)
/// □_g v2 = +e^r c² ∂1ϖ - 2 e^r ϖ Bv1 - g⁻¹(∂r, ∂v2)
/// ```
///
/// with `□_g f = c² [Δf - ∂t(c⁻² Bf) - ∂ᵢ(c⁻² vⁱ Bf)]`. Time derivatives
/// come from the stored levels, not from the evolution equations, so the
/// residual vanishes only up to discretisation error. `mu = None` uses 1.
pub fn wave_residuals(levels: [&FieldState; 5], dt: f64, eos: &Eos, mu: Option<&[f64]>) -> [Vec<f64>; 3] {
    let mid = levels[2];
    let g = mid.grid;
    let comps = mid.components();
    let d: Vec<(Vec<f64>, Vec<f64>)> =
        (0..3).map(|k| time_derivatives(std::array::from_fn(|m| levels[m].components()[k]), dt)).collect();
    let grads: Vec<[Vec<f64>; 2]> = comps.iter().map(|f| stencil::grad(&g, f)).collect();
    let ft_grads: Vec<[Vec<f64>; 2]> = d.iter().map(|(ft, _)| stencil::grad(&g, ft)).collect();
    let w = specific_vorticity(mid);
    let [w1, w2] = stencil::grad(&g, &w);
    let (r, v1, v2) = (comps[0], comps[1], comps[2]);

    let material = |k: usize, p: usize| d[k].0[p] + v1[p] * grads[k][0][p] + v2[p] * grads[k][1][p];
    let mut out: [Vec<f64>; 3] = [g.zeros(), g.zeros(), g.zeros()];
    for (k, res) in out.iter_mut().enumerate() {
        // c⁻² vⁱ Bf, differentiated in space.
        let (mut q1, mut q2) = (g.zeros(), g.zeros());
        q1.par_iter_mut().zip(q2.par_iter_mut()).enumerate().for_each(|(p, (a, b))| {
            let c = eos.speed(r[p]);
            let s = material(k, p) / (c * c);
            *a = v1[p] * s;
            *b = v2[p] * s;
        });
        let (mut dq, mut tmp) = (g.zeros(), g.zeros());
        stencil::d1(&g, &q1, &mut dq);
        stencil::d2(&g, &q2, &mut tmp);
        dq.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
        let mut lap = g.zeros();
        stencil::dd1(&g, comps[k], &mut lap);
        stencil::dd2(&g, comps[k], &mut tmp);
        lap.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);

        res.par_iter_mut().enumerate().for_each(|(p, out)| {
            let (c, dc) = eos.speed_and_slope(r[p]);
            let c2 = c * c;
            let bf = material(k, p);
            let (fx, fy) = (grads[k][0][p], grads[k][1][p]);
            let dt_term = -2.0 * dc / (c2 * c) * d[0].0[p] * bf
                + (d[k].1[p] + d[1].0[p] * fx + d[2].0[p] * fy + v1[p] * ft_grads[k][0][p] + v2[p] * ft_grads[k][1][p])
                    / c2;
            let wave = c2 * (lap[p] - dt_term - dq[p]);
            let br = material(0, p);
            let (rx, ry) = (grads[0][0][p], grads[0][1][p]);
            let ginv = |bg: f64, gx: f64, gy: f64| -br * bg + c2 * (rx * gx + ry * gy);
            let er = r[p].exp();
            let source = match k {
                0 => {
                    let cross = grads[1][0][p] * grads[2][1][p] - grads[1][1][p] * grads[2][0][p];
                    -2.0 * dc / c * ginv(br, rx, ry) + 2.0 * cross
                }
                1 => -er * c2 * w2[p] + 2.0 * er * w[p] * material(2, p) - ginv(bf, fx, fy),
                _ => er * c2 * w1[p] - 2.0 * er * w[p] * material(1, p) - ginv(bf, fx, fy),
            };
            *out = mu.map_or(1.0, |m| m[p]) * (wave - source);
        });
    }
    out
}

/// The velocity null form `∂1v1 ∂2v2 - ∂2v1 ∂1v2` on the grid.
pub fn velocity_cross_term(state: &FieldState) -> Vec<f64> {
    let g = &state.grid;
    let [a1, a2] = stencil::grad(g, &state.vel1);
    let [b1, b2] = stencil::grad(g, &state.vel2);
    (0..g.len()).map(|p| a1[p] * b2[p] - a2[p] * b1[p]).collect()
}

/// `max |mu f|`, or `max |f|` without a weight.
pub fn scaled(field: &[f64], mu: Option<&[f64]>) -> f64 {
    match mu {
        None => max_abs(field),
        Some(m) => field.iter().zip(m).fold(0.0f64, |a, (f, w)| a.max((f * w).abs())),
    }
}

/// Mismatch, per velocity component, between the vorticity source of the
/// velocity wave equation and its frame decomposition
///
/// ```text
/// -[ia] e^ϱ c² mu ∂ₐϖ  vs  [ia] mu e^ϱ c² (gₐᵦXᵇ Lϖ - gₐᵦYᵇ Yϖ / g(Y,Y))
/// ```
///
/// with the frame taken from the eikonal gradient and `Lϖ` from the
/// Euler right-hand side, so `Xϖ = -Lϖ` holds only up to truncation.
pub fn vorticity_source_frame_check(state: &FieldState, eos: &Eos, grad_u: &[Vec<f64>; 2]) -> Result<[Vec<f64>; 2]> {
    let g = &state.grid;
    let (w, dtw) = vorticity_and_rate(state, eos)?;
    let [w1, w2] = stencil::grad(g, &w);
    let out: Vec<[f64; 2]> = (0..g.len())
        .into_par_iter()
        .map(|p| {
            let ap = AcousticPoint::unchecked(state.log_density[p], [state.vel1[p], state.vel2[p]], eos);
            let frame = frame_from_eikonal(&ap, [grad_u[0][p], grad_u[1][p]]);
            let (l, x, y) = (&frame.l, &frame.x, &frame.y);
            let dw = [w1[p], w2[p]];
            let l_w = dtw[p] + l[1] * dw[0] + l[2] * dw[1];
            let y_w = y[1] * dw[0] + y[2] * dw[1];
            let inv_c2 = 1.0 / (ap.c * ap.c);
            let gyy = ap.inner(y, y);
            let k = frame.mu * state.log_density[p].exp() * ap.c * ap.c;
            // Frame form of -∂ₐϖ for a = 1, 2.
            let split = [
                inv_c2 * x[1] * l_w - inv_c2 * y[1] * y_w / gyy,
                inv_c2 * x[2] * l_w - inv_c2 * y[2] * y_w / gyy,
            ];
            // [12] = 1: component 1 pairs with a = 2, component 2 with a = 1.
            [k * (-dw[1] - split[1]), -k * (-dw[0] - split[0])]
        })
        .collect();
    Ok([out.iter().map(|m| m[0]).collect(), out.iter().map(|m| m[1]).collect()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::Stepper;
    use crate::grid::Grid;
    use crate::plane_wave::{build_initial_data, DataRecipe};
    use approx::assert_relative_eq;

    #[test]
    fn fits_recover_a_line() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 1.0 - 0.2 * t).collect();
        let f = linear_fit(&t, &y).unwrap();
        assert_relative_eq!(f.slope, -0.2, epsilon = 1e-12);
        assert_relative_eq!(f.zero(), 5.0, epsilon = 1e-10);
        assert!(f.max_residual < 1e-12);
        let tail = fit_lifespan(&t, &y, 0.3).unwrap();
        assert!(tail.samples < 50 && tail.samples >= 15);
        assert!(matches!(linear_fit(&t[..2], &y[..2]), Err(Error::NotReady(_))));
        let flat = vec![0.95; t.len()];
        assert!(matches!(mu_linearity_fit(&t, &flat, 5.0), Err(Error::NotReady(_))));
        let early = mu_linearity_fit(&t, &y, 5.0).unwrap();
        assert!((45..=46).contains(&early.samples) && early.max_residual < 1e-12);
    }

    #[test]
    fn blowup_reference_for_gamma_three() {
        let eos = Eos::polytropic(3.0).unwrap();
        assert_relative_eq!(blowup_reference(0.125665277047903, &eos), 0.125665277047903 / 16.0);
        assert!(blowup_reference(0.1, &Eos::chaplygin()).is_infinite());
    }

    #[test]
    fn orders_of_dyadic_errors() {
        let o = convergence_orders(&[1.0, 1.0 / 16.0, 1.0 / 256.0]);
        assert_eq!(o, vec![4.0, 4.0]);
    }

    fn steady_shear(n1: usize) -> (FieldState, [Vec<f64>; 2]) {
        let g = Grid::new(n1, 16, 1.0, 0.0).unwrap();
        let mut s = FieldState::constant(g);
        s.vel2 = g.sample(|x, _| 0.01 * (2.0 * std::f64::consts::PI * x).sin());
        // u = 1 - x1 + t, so ∇u = (-1, 0).
        (s, [vec![-1.0; g.len()], vec![0.0; g.len()]])
    }

    #[test]
    fn frame_split_of_vorticity_source() {
        let eos = Eos::polytropic(3.0).unwrap();
        let plane = FieldState::constant(Grid::new(32, 16, 1.0, 0.0).unwrap());
        let grad = [vec![-1.0; plane.grid.len()], vec![0.0; plane.grid.len()]];
        let m = vorticity_source_frame_check(&plane, &eos, &grad).unwrap();
        assert!(max_abs(&m[0]) == 0.0 && max_abs(&m[1]) == 0.0);
        let (s, grad) = steady_shear(256);
        let m = vorticity_source_frame_check(&s, &eos, &grad).unwrap();
        assert!(max_abs(&m[0]) < 1e-8 && max_abs(&m[1]) < 1e-8, "{} {}", max_abs(&m[0]), max_abs(&m[1]));
    }

    #[test]
    fn constant_state_has_no_residual() {
        let eos = Eos::polytropic(3.0).unwrap();
        let g = Grid::new(32, 16, 1.0, 0.0).unwrap();
        let s = FieldState::constant(g);
        let r = wave_residuals([&s, &s, &s, &s, &s], 0.01, &eos, None);
        assert!(r.iter().all(|f| max_abs(f) == 0.0));
    }

    #[test]
    fn residual_of_evolved_wave_is_small() {
        let eos = Eos::polytropic(3.0).unwrap();
        let g = Grid::new(256, 16, 1.0, 0.0).unwrap();
        let mut s = build_initial_data(&DataRecipe::periodic_sine(0.01), &eos, g).unwrap();
        let mut stepper = Stepper::new(g, 0.4, 1e-2);
        let dt = 0.5 * stepper.max_dt(&s, &eos);
        let mut buf = LevelBuffer::default();
        buf.push(&s, dt);
        for _ in 0..4 {
            stepper.step(&mut s, &eos, dt).unwrap();
            buf.push(&s, dt);
        }
        let r = buf.wave_residuals(&eos, None).unwrap();
        // Each term is O(a (2π)²) ≈ 0.4; the residual is truncation error.
        assert!(max_abs(&r[0]) < 1e-5 && max_abs(&r[1]) < 1e-5, "{} {}", max_abs(&r[0]), max_abs(&r[1]));
        assert!(max_abs(&r[2]) < 1e-12);
    }
}

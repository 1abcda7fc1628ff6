//! Acoustic geometry of the flow: the metric whose null cones are the
//! sound cones, its dependence on the state, and the null frame built
//! from an eikonal function.
//!
//! Spacetime vectors are `[t, x1, x2]` component arrays. The metric is
//!
//! ```text
//! g = -dt² + c⁻² Σₐ (dxᵃ - vᵃ dt)²
//! ```

use crate::eos::Eos;
use crate::error::Result;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// State at one point together with the sound speed and its slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcousticPoint {
    pub log_density: f64,
    pub vel: [f64; 2],
    pub c: f64,
    pub dc: f64,
}

impl AcousticPoint {
    pub fn new(log_density: f64, vel: [f64; 2], eos: &Eos) -> Result<Self> {
        let c = eos.sound_speed(log_density)?;
        let dc = eos.sound_speed_slope(log_density)?;
        Ok(AcousticPoint { log_density, vel, c, dc })
    }

    /// Skips the domain check; for hot loops that guard the range per step.
    #[inline]
    pub fn unchecked(log_density: f64, vel: [f64; 2], eos: &Eos) -> Self {
        let (c, dc) = eos.speed_and_slope(log_density);
        AcousticPoint { log_density, vel, c, dc }
    }

    /// `g(U, V)` without forming the component matrix.
    #[inline]
    pub fn inner(&self, u: &Vec3, w: &Vec3) -> f64 {
        let inv_c2 = 1.0 / (self.c * self.c);
        let a1 = u[1] - self.vel[0] * u[0];
        let a2 = u[2] - self.vel[1] * u[0];
        let b1 = w[1] - self.vel[0] * w[0];
        let b2 = w[2] - self.vel[1] * w[0];
        -u[0] * w[0] + inv_c2 * (a1 * b1 + a2 * b2)
    }

    /// Material derivative direction `∂t + v·∇`.
    pub fn material(&self) -> Vec3 {
        [1.0, self.vel[0], self.vel[1]]
    }
}

/// Covariant and contravariant components of the acoustic metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric {
    pub lower: Mat3,
    pub upper: Mat3,
    pub det: f64,
}

pub fn metric_at(p: &AcousticPoint) -> Metric {
    let [v1, v2] = p.vel;
    let c2 = p.c * p.c;
    let k = 1.0 / c2;
    let lower = [
        [-1.0 + k * (v1 * v1 + v2 * v2), -k * v1, -k * v2],
        [-k * v1, k, 0.0],
        [-k * v2, 0.0, k],
    ];
    // g⁻¹ = -B⊗B + c² Σ ∂ₐ⊗∂ₐ with B = ∂t + v·∇.
    let b = p.material();
    let mut upper = [[0.0; 3]; 3];
    for a in 0..3 {
        for bb in 0..3 {
            upper[a][bb] = -b[a] * b[bb] + if a == bb && a > 0 { c2 } else { 0.0 };
        }
    }
    Metric { lower, upper, det: -k * k }
}

/// `∂g_{αβ}/∂Ψ_ι` for `Ψ = (r, v1, v2)`, indexed `[ι][α][β]`.
pub fn metric_jacobian(p: &AcousticPoint) -> [Mat3; 3] {
    let [v1, v2] = p.vel;
    let k = 1.0 / (p.c * p.c);
    // d(c⁻²)/dr
    let dk = -2.0 * p.dc / (p.c * p.c * p.c);
    let mut jac = [[[0.0; 3]; 3]; 3];
    jac[0] = [
        [dk * (v1 * v1 + v2 * v2), -dk * v1, -dk * v2],
        [-dk * v1, dk, 0.0],
        [-dk * v2, 0.0, dk],
    ];
    for (a, va) in [v1, v2].into_iter().enumerate() {
        let m = &mut jac[a + 1];
        m[0][0] = 2.0 * k * va;
        m[0][a + 1] = -k;
        m[a + 1][0] = -k;
    }
    jac
}

/// `G^ι(U, V)` for each state component.
#[inline]
pub fn contract(jac: &[Mat3; 3], u: &Vec3, w: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for (o, m) in out.iter_mut().zip(jac) {
        let mut s = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                s += m[a][b] * u[a] * w[b];
            }
        }
        *o = s;
    }
    out
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Null frame adapted to the level sets of an eikonal function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    /// Inverse foliation density.
    pub mu: f64,
    /// Null generator with unit time component.
    pub l: Vec3,
    /// Unit outward normal to the level curves inside a time slice.
    pub x: Vec3,
    /// `mu * x`.
    pub x_breve: Vec3,
    /// Tangent to the level curves inside a time slice.
    pub y: Vec3,
}

impl Frame {
    /// Frame from `L` and `mu` carried along a characteristic; `X = B - L`.
    pub fn from_generator(p: &AcousticPoint, mu: f64, l_spatial: [f64; 2]) -> Self {
        let x = [0.0, p.vel[0] - l_spatial[0], p.vel[1] - l_spatial[1]];
        let y_coef = x[2] / (p.c * p.c);
        Frame {
            mu,
            l: [1.0, l_spatial[0], l_spatial[1]],
            x,
            x_breve: [0.0, mu * x[1], mu * x[2]],
            y: [0.0, -y_coef * x[1], 1.0 - y_coef * x[2]],
        }
    }
}

/// Frame determined by the spatial gradient of an eikonal function
/// (whose time derivative is fixed by the eikonal equation).
pub fn frame_from_eikonal(p: &AcousticPoint, grad_u: [f64; 2]) -> Frame {
    let norm = grad_u[0].hypot(grad_u[1]);
    let mu = 1.0 / (p.c * norm);
    let s = mu * p.c * p.c;
    let x = [s * grad_u[0], s * grad_u[1]];
    Frame::from_generator(p, mu, [p.vel[0] - x[0], p.vel[1] - x[1]])
}

/// Closed form of `G^ι(L, L)`: `(-2 c'/c, 2 c⁻² X¹, 2 c⁻² X²)`.
pub fn g_ll_closed(p: &AcousticPoint, frame: &Frame) -> Vec3 {
    let k = 1.0 / (p.c * p.c);
    [-2.0 * p.dc / p.c, 2.0 * k * frame.x[1], 2.0 * k * frame.x[2]]
}

/// Pointwise Cartesian first derivatives of `Ψ = (r, v1, v2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateJet {
    /// `[component][t, x1, x2]`.
    pub d: [Vec3; 3],
}

impl StateJet {
    /// `V Ψ_ι` for each component.
    #[inline]
    pub fn along(&self, v: &Vec3) -> Vec3 {
        [dot(&self.d[0], v), dot(&self.d[1], v), dot(&self.d[2], v)]
    }
}

/// Difference between the two sides of the product identity
///
/// ```text
/// ½ G_LL ⋄ X̆Ψ = c⁻² (c'/c + 1) δ_ab Xᵃ X̆vᵇ + μ c⁻³ c' δ_ab (Lvᵃ) Xᵇ
/// ```
///
/// which relies on the momentum equation; zero for exact solutions.
pub fn key_product_identity_check(p: &AcousticPoint, frame: &Frame, jet: &StateJet) -> f64 {
    let gll = g_ll_closed(p, frame);
    let xb = jet.along(&frame.x_breve);
    let lhs = 0.5 * dot(&gll, &xb);
    let lv = jet.along(&frame.l);
    let c = p.c;
    let (x1, x2) = (frame.x[1], frame.x[2]);
    let rhs = (p.dc / c + 1.0) / (c * c) * (x1 * xb[1] + x2 * xb[2])
        + frame.mu * p.dc / (c * c * c) * (lv[1] * x1 + lv[2] * x2);
    lhs - rhs
}

/// Components of a spacetime gradient along the frame, with the spatial
/// gradient rebuilt from the `X` and `Y` components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameComponents {
    pub along_l: f64,
    pub along_x: f64,
    pub along_y: f64,
    pub spatial: [f64; 2],
}

pub fn frame_decompose_gradient(p: &AcousticPoint, frame: &Frame, grad: &Vec3) -> FrameComponents {
    let along_l = dot(&frame.l, grad);
    let along_x = dot(&frame.x, grad);
    let along_y = dot(&frame.y, grad);
    let gyy = p.inner(&frame.y, &frame.y);
    let k = 1.0 / (p.c * p.c);
    let spatial = [
        k * frame.x[1] * along_x + k * frame.y[1] * along_y / gyy,
        k * frame.x[2] * along_x + k * frame.y[2] * along_y / gyy,
    ];
    FrameComponents { along_l, along_x, along_y, spatial }
}

/// Largest deviation among the frame and metric identities:
/// `g(L,L) = 0`, `g(L,X) = -1`, `g(X,X) = 1`, `g(B,B) = -1`, `g(X,Y) = g(L,Y) = 0`,
/// `g⁻¹ g = I`, `det g = -c⁻⁴`, `μ c |∇u| = 1`.
pub fn identity_defect(p: &AcousticPoint, frame: &Frame, grad_u: Option<[f64; 2]>) -> f64 {
    let b = p.material();
    let mut worst = [
        p.inner(&frame.l, &frame.l),
        p.inner(&frame.l, &frame.x) + 1.0,
        p.inner(&frame.x, &frame.x) - 1.0,
        p.inner(&b, &b) + 1.0,
        p.inner(&frame.x, &frame.y),
        p.inner(&frame.l, &frame.y),
    ]
    .iter()
    .fold(0.0f64, |m, e| m.max(e.abs()));
    let m = metric_at(p);
    for a in 0..3 {
        for c in 0..3 {
            let s: f64 = (0..3).map(|k| m.upper[a][k] * m.lower[k][c]).sum();
            worst = worst.max((s - if a == c { 1.0 } else { 0.0 }).abs());
        }
    }
    let det = det3(&m.lower);
    worst = worst.max((det - m.det).abs()).max((det + p.c.powi(-4)).abs());
    if let Some(gu) = grad_u {
        worst = worst.max((frame.mu * p.c * gu[0].hypot(gu[1]) - 1.0).abs());
    }
    worst
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gamma3() -> Eos {
        Eos::polytropic(3.0).unwrap()
    }

    #[test]
    fn background_metric_is_minkowski() {
        let p = AcousticPoint::new(0.0, [0.0, 0.0], &gamma3()).unwrap();
        let m = metric_at(&p);
        assert_eq!(m.lower, [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(m.upper, m.lower);
        assert_eq!(m.det, -1.0);
    }

    #[test]
    fn moving_state_metric() {
        let p = AcousticPoint::new(0.2, [0.1, -0.05], &gamma3()).unwrap();
        let m = metric_at(&p);
        let k = (-0.4f64).exp();
        assert_relative_eq!(m.lower[0][0], -1.0 + k * 0.0125, epsilon = 1e-15);
        assert_relative_eq!(m.lower[0][1], -0.1 * k, epsilon = 1e-15);
        assert_relative_eq!(m.lower[2][2], k, epsilon = 1e-15);
        assert_relative_eq!(det3(&m.lower), -k * k, epsilon = 1e-14);
        assert!(identity_defect(&p, &frame_from_eikonal(&p, [-0.8, 0.3]), Some([-0.8, 0.3])) < 1e-13);
    }

    #[test]
    fn jacobian_at_background() {
        let p = AcousticPoint::new(0.0, [0.0, 0.0], &gamma3()).unwrap();
        let jac = metric_jacobian(&p);
        assert_eq!(jac[1][0][1], -1.0);
        assert_eq!(jac[0][1][1], -2.0);
        assert_eq!(jac[0][2][2], -2.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let eos = gamma3();
        let (r, v) = (0.13, [0.07, -0.02]);
        let p = AcousticPoint::new(r, v, &eos).unwrap();
        let jac = metric_jacobian(&p);
        let h = 1e-6;
        let at = |r: f64, v: [f64; 2]| metric_at(&AcousticPoint::new(r, v, &eos).unwrap()).lower;
        for iota in 0..3 {
            let (mut rp, mut rm, mut vp, mut vm) = (r, r, v, v);
            if iota == 0 {
                rp += h;
                rm -= h;
            } else {
                vp[iota - 1] += h;
                vm[iota - 1] -= h;
            }
            let (gp, gm) = (at(rp, vp), at(rm, vm));
            for a in 0..3 {
                for b in 0..3 {
                    assert!((jac[iota][a][b] - (gp[a][b] - gm[a][b]) / (2.0 * h)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn background_frame() {
        let p = AcousticPoint::new(0.0, [0.0, 0.0], &gamma3()).unwrap();
        let f = frame_from_eikonal(&p, [-1.0, 0.0]);
        assert_eq!(f.mu, 1.0);
        assert_eq!(f.l, [1.0, 1.0, 0.0]);
        assert_eq!(f.x, [0.0, -1.0, 0.0]);
        assert_eq!(f.y, [0.0, 0.0, 1.0]);
        let d = frame_decompose_gradient(&p, &f, &[0.0, -1.0, 0.0]);
        assert_eq!(d.along_x, 1.0);
        assert_eq!(d.spatial, [-1.0, 0.0]);
    }

    #[test]
    fn initial_slice_frame() {
        // u = 1 - x1: mu = 1/c and X = -c ∂1.
        let eos = gamma3();
        let p = AcousticPoint::new(0.01, [0.01, 0.0], &eos).unwrap();
        let f = frame_from_eikonal(&p, [-1.0, 0.0]);
        assert_relative_eq!(f.mu, 1.0 / p.c, epsilon = 1e-15);
        assert_relative_eq!(f.x[1], -p.c, epsilon = 1e-15);
        assert_relative_eq!(f.x_breve[1], -1.0, epsilon = 1e-15);
        assert_relative_eq!(f.l[1], 0.01 + p.c, epsilon = 1e-15);
    }

    #[test]
    fn g_ll_closed_form_matches_contraction() {
        let eos = Eos::polytropic(1.7).unwrap();
        let p = AcousticPoint::new(-0.2, [0.03, 0.04], &eos).unwrap();
        let f = frame_from_eikonal(&p, [-0.9, 0.25]);
        let closed = g_ll_closed(&p, &f);
        let contracted = contract(&metric_jacobian(&p), &f.l, &f.l);
        for k in 0..3 {
            assert_relative_eq!(closed[k], contracted[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn g_ll_at_background() {
        let p = AcousticPoint::new(0.0, [0.0, 0.0], &gamma3()).unwrap();
        let f = frame_from_eikonal(&p, [-1.0, 0.0]);
        assert_eq!(g_ll_closed(&p, &f), [-2.0, -2.0, 0.0]);
        let ch = AcousticPoint::new(0.0, [0.0, 0.0], &Eos::chaplygin()).unwrap();
        assert_eq!(g_ll_closed(&ch, &frame_from_eikonal(&ch, [-1.0, 0.0])), [2.0, -2.0, 0.0]);
    }

    #[test]
    fn product_identity_holds_for_plane_simple_wave() {
        // Right-moving simple wave for gamma = 3: r = ln(1 + v), L v = 0.
        let eos = gamma3();
        let v = 0.008;
        let r = (1.0f64 + v).ln();
        let p = AcousticPoint::new(r, [v, 0.0], &eos).unwrap();
        let dv = -0.05;
        let dr = dv / (1.0 + v);
        let lam = v + p.c;
        let jet = StateJet { d: [[-lam * dr, dr, 0.0], [-lam * dv, dv, 0.0], [0.0; 3]] };
        let f = frame_from_eikonal(&p, [-1.3, 0.0]);
        assert!(key_product_identity_check(&p, &f, &jet).abs() < 1e-15);
    }
}

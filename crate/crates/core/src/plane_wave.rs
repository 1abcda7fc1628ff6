//! Plane-symmetric simple-wave data and the closed-form oracles that
//! come with it.
//!
//! Initial data put all of the disturbance into the right-moving
//! Riemann invariant: `v1 - F(r) = 0`, so `r = F⁻¹(v1)`. Until
//! characteristics cross, the exact solution is constant along the lines
//! `x = x0 + λ(x0) t` with `λ = v1 + c(F⁻¹(v1))`.

use std::f64::consts::PI;

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};

/// C^∞ transition from 0 (s ≤ 0) to 1 (s ≥ 1).
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

pub fn smooth_step_slope(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let p = smooth_step(s);
        p * (1.0 - p) * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)))
    }
}

/// Envelope applied to the velocity profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// Profile used as is; it must then be periodic on the grid window.
    None,
    /// Supported in `[0, 1]`, identically one on `[ramp, 1 - ramp]`.
    Smooth { ramp: f64 },
}

impl Window {
    pub fn value_and_slope(&self, x: f64) -> (f64, f64) {
        match *self {
            Window::None => (1.0, 0.0),
            Window::Smooth { ramp } => {
                if x <= 0.0 || x >= 1.0 {
                    return (0.0, 0.0);
                }
                let (a, b) = (x / ramp, (1.0 - x) / ramp);
                let (pa, pb) = (smooth_step(a), smooth_step(b));
                (pa * pb, (smooth_step_slope(a) * pb - pa * smooth_step_slope(b)) / ramp)
            }
        }
    }
}

/// Transverse shear added on top of the simple wave: `v2 = λ f(x1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shear {
    None,
    /// `f(x) = (P/2π) sin(2π (x - phase)/P)` with `P` the grid period, so `max |f'| = 1`.
    Sine { strength: f64, phase: f64 },
}

/// Default ramp width of the smooth window.
pub const DEFAULT_RAMP: f64 = 0.25;

/// Recipe for plane-symmetric (optionally transversely modulated) data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataRecipe {
    /// Peak velocity amplitude.
    pub amplitude: f64,
    pub window: Window,
    pub shear: Shear,
    /// Relative `cos(2π x2)` modulation of the velocity profile; zero keeps
    /// the data plane symmetric.
    pub modulation: f64,
}

impl DataRecipe {
    /// Windowed sine on `[0, 1]` with the given amplitude.
    pub fn windowed_sine(amplitude: f64) -> Self {
        DataRecipe { amplitude, window: Window::Smooth { ramp: DEFAULT_RAMP }, shear: Shear::None, modulation: 0.0 }
    }

    /// Unwindowed sine of unit period.
    pub fn periodic_sine(amplitude: f64) -> Self {
        DataRecipe { amplitude, window: Window::None, shear: Shear::None, modulation: 0.0 }
    }

    pub fn is_plane_symmetric(&self) -> bool {
        self.modulation == 0.0
    }

    /// Plane symmetric and irrotational: a pure right-moving simple wave.
    pub fn is_simple_wave(&self) -> bool {
        self.is_plane_symmetric() && self.shear == Shear::None
    }

    /// Initial `v1` on the line `x2 = 0`, plane-symmetric part only.
    pub fn velocity(&self, x: f64) -> f64 {
        let (w, _) = self.window.value_and_slope(x);
        self.amplitude * w * (2.0 * PI * x).sin()
    }

    pub fn velocity_slope(&self, x: f64) -> f64 {
        let (w, dw) = self.window.value_and_slope(x);
        self.amplitude * (dw * (2.0 * PI * x).sin() + w * 2.0 * PI * (2.0 * PI * x).cos())
    }

    /// Rejects recipes that cannot live on `grid`.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude.abs() < 0.2) {
            return Err(Error::Config(format!("data.amplitude {} outside the small-data range", self.amplitude)));
        }
        match self.window {
            Window::Smooth { ramp } => {
                if !(ramp > 0.0 && ramp <= 0.5) {
                    return Err(Error::Config(format!("window ramp {ramp} must lie in (0, 0.5]")));
                }
                if grid.x1_offset > 0.0 || grid.x1_offset + grid.l1 < 1.0 {
                    return Err(Error::Config("data support [0, 1] does not fit inside the x1 window".into()));
                }
            }
            Window::None => {
                let periods = grid.l1.round();
                if periods < 1.0 || (grid.l1 - periods).abs() > 1e-12 {
                    return Err(Error::Config("an unwindowed profile needs grid.L1 to be a whole number of periods".into()));
                }
            }
        }
        Ok(())
    }
}

/// Samples the recipe on the grid.
pub fn build_initial_data(recipe: &DataRecipe, eos: &Eos, grid: Grid) -> Result<FieldState> {
    recipe.validate(&grid)?;
    let mut state = FieldState::constant(grid);
    for j in 0..grid.n2 {
        let m = 1.0 + recipe.modulation * (2.0 * PI * grid.x2(j)).cos();
        for i in 0..grid.n1 {
            let p = grid.index(i, j);
            let v = recipe.velocity(grid.x1(i)) * m;
            state.vel1[p] = v;
            state.log_density[p] = eos.inverse_riemann_potential(v)?;
            if let Shear::Sine { strength, phase } = recipe.shear {
                let period = grid.l1;
                state.vel2[p] = strength * period / (2.0 * PI) * (2.0 * PI * (grid.x1(i) - phase) / period).sin();
            }
        }
    }
    Ok(state)
}

/// Plane-symmetric Riemann invariants `v1 ± F(r)`.
pub fn riemann_invariants(state: &FieldState, eos: &Eos) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut plus = Vec::with_capacity(state.grid.len());
    let mut minus = Vec::with_capacity(state.grid.len());
    for (r, v) in state.log_density.iter().zip(&state.vel1) {
        let f = eos.riemann_potential(*r)?;
        plus.push(v + f);
        minus.push(v - f);
    }
    Ok((plus, minus))
}

/// Characteristic speed carried from the foot point `x0`.
pub fn char_speed(recipe: &DataRecipe, eos: &Eos, x0: f64) -> Result<f64> {
    let v = recipe.velocity(x0);
    Ok(v + eos.sound_speed(eos.inverse_riemann_potential(v)?)?)
}

/// `dλ/dx0 = (c'/c + 1) v1'`.
pub fn char_speed_slope(recipe: &DataRecipe, eos: &Eos, x0: f64) -> Result<f64> {
    let r = eos.inverse_riemann_potential(recipe.velocity(x0))?;
    Ok(eos.nonlinearity(r)? * recipe.velocity_slope(x0))
}

/// Maximises `f` over `[0, 1]`: dense scan, then golden-section refinement.
fn maximise_on_unit(f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    const SAMPLES: usize = 4000;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..=SAMPLES {
        let x = k as f64 / SAMPLES as f64;
        let y = f(x)?;
        if y > best.1 {
            best = (x, y);
        }
    }
    let step = 1.0 / SAMPLES as f64;
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c)? > f(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    let y = f(x)?;
    Ok(if y > best.1 { (x, y) } else { best })
}

/// Compression rates below this are treated as no compression at all.
const NO_SHOCK_RATE: f64 = 1e-12;

/// First crossing time of the right-moving characteristics from `[0, 1]`.
pub fn crossing_time(recipe: &DataRecipe, eos: &Eos) -> Result<f64> {
    let (_, rate) = maximise_on_unit(|x| char_speed_slope(recipe, eos, x).map(|s| -s))?;
    if rate <= NO_SHOCK_RATE * recipe.amplitude.abs().max(1e-300) {
        return Err(Error::NoShock);
    }
    Ok(1.0 / rate)
}

/// Foot point of the first characteristics to cross.
pub fn crossing_foot(recipe: &DataRecipe, eos: &Eos) -> Result<f64> {
    maximise_on_unit(|x| char_speed_slope(recipe, eos, x).map(|s| -s)).map(|(x, _)| x)
}

/// The data-size functional
///
/// ```text
/// δ⋆ = ½ sup_{[0,1]} [ (G⁰_LL + G¹_LL) X̆v1 ]₋   at t = 0,
/// ```
///
/// which for these data reduces to `sup (c' + 1)(-v1')/c`.
pub fn delta_star(recipe: &DataRecipe, eos: &Eos) -> Result<f64> {
    let (_, value) = maximise_on_unit(|x| {
        let r = eos.inverse_riemann_potential(recipe.velocity(x))?;
        let (c, dc) = eos.speed_and_slope(r);
        // G⁰_LL = -2c'/c, G¹_LL = -2/c and X̆v1 = -v1' on the initial slice.
        let product = (-2.0 * dc / c - 2.0 / c) * (-recipe.velocity_slope(x));
        Ok(0.5 * (-product).max(0.0))
    })?;
    Ok(value)
}

/// Exact plane-symmetric solution `(r, v1)` at unwrapped position `x`
/// and time `t`, valid before the crossing time.
pub fn exact_simple_wave(recipe: &DataRecipe, eos: &Eos, x: f64, t: f64) -> Result<(f64, f64)> {
    if !recipe.is_simple_wave() {
        return Err(Error::Config("exact simple wave needs plane-symmetric data without shear".into()));
    }
    let amp = recipe.amplitude.abs();
    let lam_lo = eos.sound_speed(eos.inverse_riemann_potential(-amp)?)? - amp;
    let lam_hi = eos.sound_speed(eos.inverse_riemann_potential(amp)?)? + amp;
    let (mut lo, mut hi) = (x - lam_hi * t - 1e-12, x - lam_lo.min(1.0) * t + 1e-12);
    let residual = |x0: f64| -> Result<f64> { Ok(x0 + char_speed(recipe, eos, x0)? * t - x) };
    let mut x0 = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = residual(x0)?;
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            hi = x0;
        } else {
            lo = x0;
        }
        let slope = 1.0 + char_speed_slope(recipe, eos, x0)? * t;
        let newton = x0 - f / slope;
        x0 = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if f.abs() < 1e-16 || hi - lo < 1e-16 {
            break;
        }
    }
    let v = recipe.velocity(x0);
    Ok((eos.inverse_riemann_potential(v)?, v))
}

/// `max |r - r_exact|, |v1 - v1_exact|, |v2|` over the grid at the state's
/// time.
pub fn simple_wave_error(state: &FieldState, recipe: &DataRecipe, eos: &Eos) -> Result<f64> {
    let g = &state.grid;
    let exact = (0..g.n1)
        .map(|i| exact_simple_wave(recipe, eos, wave_image(g, g.x1(i), state.t), state.t))
        .collect::<Result<Vec<_>>>()?;
    let mut err = 0.0f64;
    for j in 0..g.n2 {
        for (i, (r, v)) in exact.iter().enumerate() {
            let p = g.index(i, j);
            err = err.max((state.log_density[p] - r).abs()).max((state.vel1[p] - v).abs()).max(state.vel2[p].abs());
        }
    }
    Ok(err)
}

/// Unwrapped image of the grid coordinate `x` that holds the wave at time
/// `t`, for windowed data travelling at unit speed.
pub fn wave_image(grid: &Grid, x: f64, t: f64) -> f64 {
    let centre = 0.5 + t;
    x + ((centre - x) / grid.l1 + 0.5).floor() * grid.l1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gamma3() -> Eos {
        Eos::polytropic(3.0).unwrap()
    }

    #[test]
    fn smooth_step_is_a_transition() {
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_relative_eq!(smooth_step(0.5), 0.5, epsilon = 1e-15);
        assert_relative_eq!(smooth_step_slope(0.5), 2.0, epsilon = 1e-14);
        let h = 1e-6;
        for s in [0.1, 0.37, 0.8] {
            let fd = (smooth_step(s + h) - smooth_step(s - h)) / (2.0 * h);
            assert_relative_eq!(smooth_step_slope(s), fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn windowed_data_have_vanishing_minus_invariant() {
        let eos = gamma3();
        let grid = Grid::new(256, 16, 2.0, -0.5).unwrap();
        let s = build_initial_data(&DataRecipe::windowed_sine(0.01), &eos, grid).unwrap();
        let (plus, minus) = riemann_invariants(&s, &eos).unwrap();
        assert!(minus.iter().all(|m| m.abs() < 1e-15));
        let i = (0.25f64 + 0.5) / grid.h1();
        assert_relative_eq!(plus[grid.index(i as usize, 3)], 0.02, epsilon = 1e-12);
        for i in 0..grid.n1 {
            let x = grid.x1(i);
            if !(0.0..=1.0).contains(&x) {
                assert_eq!(s.vel1[i], 0.0);
            }
        }
    }

    #[test]
    fn crossing_time_for_gamma_three_sine() {
        let t = crossing_time(&DataRecipe::periodic_sine(0.01), &gamma3()).unwrap();
        assert_relative_eq!(t, 1.0 / (4.0 * PI * 0.01), epsilon = 1e-9);
        let t = crossing_time(&DataRecipe::windowed_sine(0.01), &gamma3()).unwrap();
        assert_relative_eq!(t, 7.957747154594767, epsilon = 1e-9);
    }

    #[test]
    fn crossing_time_matches_finite_difference_oracle() {
        // Independent route: finite differences of λ(x0) on a fine lattice.
        for eos in [gamma3(), Eos::polytropic(1.4).unwrap()] {
            let recipe = DataRecipe::windowed_sine(0.02);
            let h = 1e-5;
            let mut best = 0.0f64;
            let mut x = 0.0;
            while x <= 1.0 {
                let s = (char_speed(&recipe, &eos, x + h).unwrap() - char_speed(&recipe, &eos, x - h).unwrap()) / (2.0 * h);
                best = best.max(-s);
                x += 1e-4;
            }
            assert_relative_eq!(crossing_time(&recipe, &eos).unwrap(), 1.0 / best, max_relative = 1e-6);
        }
    }

    #[test]
    fn chaplygin_never_crosses() {
        let r = crossing_time(&DataRecipe::windowed_sine(0.01), &Eos::chaplygin());
        assert!(matches!(r, Err(Error::NoShock)));
    }

    #[test]
    fn delta_star_values() {
        let d = delta_star(&DataRecipe::windowed_sine(0.01), &gamma3()).unwrap();
        assert_relative_eq!(d, 4.0 * PI * 0.01, max_relative = 1e-3);
        // Frozen value.
        assert_relative_eq!(d, 0.125665277047903, max_relative = 1e-9);
        let dc = delta_star(&DataRecipe::windowed_sine(0.01), &Eos::chaplygin()).unwrap();
        assert!(dc < 0.01 * d, "chaplygin δ⋆ = {dc}");
    }

    #[test]
    fn exact_solution_reduces_to_data_and_is_constant_on_characteristics() {
        let eos = gamma3();
        let recipe = DataRecipe::windowed_sine(0.01);
        for x0 in [0.05, 0.3, 0.5, 0.77] {
            let (r, v) = exact_simple_wave(&recipe, &eos, x0, 0.0).unwrap();
            assert_relative_eq!(v, recipe.velocity(x0), epsilon = 1e-15);
            assert_relative_eq!(r, (1.0 + v).ln(), epsilon = 1e-15);
            let t = 5.0;
            let x = x0 + char_speed(&recipe, &eos, x0).unwrap() * t;
            let (_, vt) = exact_simple_wave(&recipe, &eos, x, t).unwrap();
            assert_relative_eq!(vt, v, epsilon = 1e-13);
        }
        let (r, v) = exact_simple_wave(&recipe, &eos, -3.0, 1.0).unwrap();
        assert_eq!((r, v), (0.0, 0.0));
    }

    #[test]
    fn wave_image_tracks_the_pulse() {
        let g = Grid::new(64, 16, 2.0, -0.5).unwrap();
        assert_relative_eq!(wave_image(&g, 0.5, 0.0), 0.5);
        assert_relative_eq!(wave_image(&g, 0.5, 4.0), 4.5);
        assert_relative_eq!(wave_image(&g, -0.4, 4.0), 3.6);
        assert_relative_eq!(wave_image(&g, 1.4, 4.0), 5.4);
    }
}

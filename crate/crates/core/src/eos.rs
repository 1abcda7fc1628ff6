//! Barotropic equations of state in log-density form.
//!
//! Everything is expressed through the sound speed as a function of the
//! log-density `r = ln(rho)`, normalized so that the constant background
//! has `r = 0` and unit sound speed. Evaluation is restricted to the
//! working interval `|r| <= 1`.

use std::path::Path;

use crate::error::{Error, Result};

/// Half-width of the log-density interval on which every law is defined.
pub const LOG_DENSITY_BOUND: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Eos {
    /// `c = exp(rate * r)`. Polytropes have `rate = (gamma - 1) / 2`,
    /// the Chaplygin gas has `rate = -1`.
    Exponential { rate: f64, chaplygin: bool },
    Tabulated(SpeedTable),
}

impl Eos {
    /// Polytropic gas `p ∝ rho^gamma`.
    pub fn polytropic(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidEos(format!("polytropic gamma must exceed 1, got {gamma}")));
        }
        Ok(Eos::Exponential { rate: 0.5 * (gamma - 1.0), chaplygin: false })
    }

    /// Chaplygin gas `p = C0 - C1 / rho`, the linearly degenerate control.
    pub fn chaplygin() -> Self {
        Eos::Exponential { rate: -1.0, chaplygin: true }
    }

    pub fn tabulated(log_density: Vec<f64>, speed: Vec<f64>) -> Result<Self> {
        SpeedTable::new(log_density, speed).map(Eos::Tabulated)
    }

    /// Reads a two-column `log_density sound_speed` table. Blank lines and
    /// `#` comments are skipped; columns may be separated by whitespace or commas.
    pub fn load_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut knots = Vec::new();
        let mut speeds = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse { line: n + 1, msg: format!("not a number: {s}") })
            };
            if cols.len() != 2 {
                return Err(Error::Parse { line: n + 1, msg: "expected two columns".into() });
            }
            knots.push(parse(cols[0])?);
            speeds.push(parse(cols[1])?);
        }
        Eos::tabulated(knots, speeds)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Eos::Exponential { chaplygin: true, .. } => "chaplygin",
            Eos::Exponential { .. } => "polytropic",
            Eos::Tabulated(_) => "tabulated",
        }
    }

    pub fn sound_speed(&self, r: f64) -> Result<f64> {
        check(r)?;
        Ok(self.speed_and_slope(r).0)
    }

    /// Derivative of the sound speed with respect to the log-density.
    pub fn sound_speed_slope(&self, r: f64) -> Result<f64> {
        check(r)?;
        Ok(self.speed_and_slope(r).1)
    }

    /// `c'/c + 1`; vanishes identically for the Chaplygin gas.
    pub fn nonlinearity(&self, r: f64) -> Result<f64> {
        check(r)?;
        let (c, dc) = self.speed_and_slope(r);
        Ok(dc / c + 1.0)
    }

    /// The Riemann potential `F(r) = ∫_0^r c`, so that `v ± F` are the
    /// plane-symmetric Riemann invariants.
    pub fn riemann_potential(&self, r: f64) -> Result<f64> {
        check(r)?;
        Ok(match self {
            Eos::Exponential { rate, .. } => exp_potential(*rate, r),
            Eos::Tabulated(t) => t.potential(r),
        })
    }

    pub fn inverse_riemann_potential(&self, w: f64) -> Result<f64> {
        let r = match self {
            Eos::Exponential { rate, .. } => {
                if rate.abs() < 1e-14 {
                    w
                } else {
                    let arg = 1.0 + rate * w;
                    if arg <= 0.0 {
                        return Err(Error::EosDomain(f64::NAN));
                    }
                    arg.ln() / rate
                }
            }
            Eos::Tabulated(t) => t.inverse_potential(w)?,
        };
        check(r)?;
        Ok(r)
    }

    /// Sound speed and its slope without the domain check. Callers in hot
    /// loops guard the log-density range once per step instead.
    #[inline]
    pub fn speed_and_slope(&self, r: f64) -> (f64, f64) {
        match self {
            Eos::Exponential { rate, .. } => {
                let c = (rate * r).exp();
                (c, rate * c)
            }
            Eos::Tabulated(t) => t.eval(r),
        }
    }

    #[inline]
    pub(crate) fn speed(&self, r: f64) -> f64 {
        match self {
            Eos::Exponential { rate, .. } => (rate * r).exp(),
            Eos::Tabulated(t) => t.eval(r).0,
        }
    }
}

fn check(r: f64) -> Result<()> {
    if r.is_finite() && r.abs() <= LOG_DENSITY_BOUND {
        Ok(())
    } else {
        Err(Error::EosDomain(r))
    }
}

fn exp_potential(rate: f64, r: f64) -> f64 {
    if rate.abs() < 1e-14 {
        r
    } else {
        (rate * r).exp_m1() / rate
    }
}

/// Sound speed tabulated on log-density knots, interpolated with a
/// monotone piecewise-cubic Hermite (Fritsch–Carlson) curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedTable {
    knots: Vec<f64>,
    speed: Vec<f64>,
    slope: Vec<f64>,
    /// `∫_{knots[0]}^{knots[i]} c`.
    cumulative: Vec<f64>,
    /// `∫_{knots[0]}^{0} c`, so that the potential vanishes at `r = 0`.
    origin: f64,
}

impl SpeedTable {
    pub fn new(knots: Vec<f64>, speed: Vec<f64>) -> Result<Self> {
        let n = knots.len();
        if n < 3 || speed.len() != n {
            return Err(Error::InvalidEos("table needs at least three (r, c) pairs".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidEos("table knots must be strictly increasing".into()));
        }
        if knots[0] > -LOG_DENSITY_BOUND || knots[n - 1] < LOG_DENSITY_BOUND {
            return Err(Error::InvalidEos("table must cover the interval [-1, 1]".into()));
        }
        if speed.iter().any(|&c| !(c.is_finite() && c > 0.0)) {
            return Err(Error::InvalidEos("tabulated sound speeds must be positive".into()));
        }
        let slope = pchip_slopes(&knots, &speed);
        let mut cumulative = vec![0.0; n];
        for i in 0..n - 1 {
            let h = knots[i + 1] - knots[i];
            cumulative[i + 1] = cumulative[i]
                + 0.5 * h * (speed[i] + speed[i + 1])
                + h * h * (slope[i] - slope[i + 1]) / 12.0;
        }
        let mut table = SpeedTable { knots, speed, slope, cumulative, origin: 0.0 };
        table.origin = table.integral_from_start(0.0);
        let c0 = table.eval(0.0).0;
        if (c0 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidEos(format!("table must be normalized to c(0) = 1, got {c0}")));
        }
        Ok(table)
    }

    fn segment(&self, r: f64) -> usize {
        let n = self.knots.len();
        match self.knots.partition_point(|&k| k <= r) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Value and derivative of the interpolant.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let i = self.segment(r);
        let h = self.knots[i + 1] - self.knots[i];
        let s = (r - self.knots[i]) / h;
        let (y0, y1) = (self.speed[i], self.speed[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let deriv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        (value, deriv)
    }

    fn integral_from_start(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.knots[i + 1] - self.knots[i];
        let s = (r - self.knots[i]) / h;
        let (y0, y1) = (self.speed[i], self.speed[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        // Antiderivatives of the Hermite basis on [0, s].
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let part = (0.5 * s4 - s3 + s) * y0
            + (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2) * d0
            + (-0.5 * s4 + s3) * y1
            + (0.25 * s4 - s3 / 3.0) * d1;
        self.cumulative[i] + h * part
    }

    fn potential(&self, r: f64) -> f64 {
        self.integral_from_start(r) - self.origin
    }

    fn inverse_potential(&self, w: f64) -> Result<f64> {
        let (mut lo, mut hi) = (-LOG_DENSITY_BOUND, LOG_DENSITY_BOUND);
        if !(w >= self.potential(lo) && w <= self.potential(hi)) {
            return Err(Error::EosDomain(f64::NAN));
        }
        let mut r = 0.0;
        for _ in 0..200 {
            let f = self.potential(r) - w;
            if f.abs() <= 1e-15 {
                break;
            }
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let newton = r - f / self.eval(r).0;
            r = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(r)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson quadrature of the sound speed, independent of the
    /// closed forms.
    fn simpson_potential(eos: &Eos, r: f64) -> f64 {
        let n = 2000;
        let h = r / n as f64;
        let mut acc = eos.sound_speed(0.0).unwrap() + eos.sound_speed(r).unwrap();
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * eos.sound_speed(k as f64 * h).unwrap();
        }
        acc * h / 3.0
    }

    #[test]
    fn gamma_three_closed_forms() {
        let eos = Eos::polytropic(3.0).unwrap();
        assert_relative_eq!(eos.sound_speed(0.2).unwrap(), 1.2214027581601699, epsilon = 1e-15);
        assert_relative_eq!(eos.sound_speed_slope(0.2).unwrap(), 1.2214027581601699, epsilon = 1e-15);
        assert_relative_eq!(eos.riemann_potential(0.2).unwrap(), 0.22140275816016985, epsilon = 1e-15);
        assert_relative_eq!(eos.inverse_riemann_potential(0.01).unwrap(), 0.009950330853168083, epsilon = 1e-15);
        assert_relative_eq!(eos.nonlinearity(-0.3).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn nonlinearity_by_law() {
        assert_relative_eq!(Eos::polytropic(2.0).unwrap().nonlinearity(0.4).unwrap(), 1.5, epsilon = 1e-15);
        assert!(Eos::chaplygin().nonlinearity(0.7).unwrap().abs() < 1e-15);
        let ch = Eos::chaplygin();
        assert_relative_eq!(ch.riemann_potential(0.3).unwrap(), 1.0 - (-0.3f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn potential_matches_quadrature() {
        for eos in [Eos::polytropic(3.0).unwrap(), Eos::polytropic(1.4).unwrap(), Eos::chaplygin()] {
            for r in [-0.9, -0.2, 0.05, 0.6] {
                assert_relative_eq!(
                    eos.riemann_potential(r).unwrap(),
                    simpson_potential(&eos, r),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn domain_is_enforced() {
        let eos = Eos::polytropic(3.0).unwrap();
        assert!(matches!(eos.sound_speed(1.5), Err(Error::EosDomain(_))));
        assert!(matches!(eos.riemann_potential(-1.01), Err(Error::EosDomain(_))));
        assert!(eos.inverse_riemann_potential(5.0).is_err());
        assert!(Eos::polytropic(1.0).is_err());
    }

    #[test]
    fn table_reproduces_smooth_law() {
        let knots: Vec<f64> = (0..=80).map(|k| -1.0 + 0.025 * k as f64).collect();
        let speeds: Vec<f64> = knots.iter().map(|r: &f64| (0.5 * r).exp()).collect();
        let table = Eos::tabulated(knots, speeds).unwrap();
        let exact = Eos::polytropic(2.0).unwrap();
        for r in [-0.97, -0.31, 0.0, 0.123, 0.88] {
            assert_relative_eq!(table.sound_speed(r).unwrap(), exact.sound_speed(r).unwrap(), epsilon = 1e-6);
            assert_relative_eq!(
                table.sound_speed_slope(r).unwrap(),
                exact.sound_speed_slope(r).unwrap(),
                epsilon = 1e-4
            );
            assert_relative_eq!(
                table.riemann_potential(r).unwrap(),
                exact.riemann_potential(r).unwrap(),
                epsilon = 1e-7
            );
            let w = table.riemann_potential(r).unwrap();
            assert_relative_eq!(table.inverse_riemann_potential(w).unwrap(), r, epsilon = 1e-12);
        }
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(Eos::tabulated(vec![-1.0, 0.0, 0.5], vec![1.0, 1.0, 1.0]).is_err());
        assert!(Eos::tabulated(vec![-1.0, 0.0, 1.0], vec![1.0, -1.0, 1.0]).is_err());
        assert!(Eos::tabulated(vec![-1.0, 0.0, 1.0], vec![2.0, 2.0, 2.0]).is_err());
    }
}

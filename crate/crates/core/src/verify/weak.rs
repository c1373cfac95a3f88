use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::quadrature::GaussLegendre;
use crate::error::{Error, Result};
use crate::riemann::{DeltaShock, RiemannSolution, Wave};
use crate::state::{ConservedState, ModelParams};

/// Smooth bump `exp(-1/(1 - r^2))` on the ellipse
/// `r^2 = ((t - t0)/rt)^2 + ((x - x0)/rx)^2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub t0: f64,
    pub x0: f64,
    pub rt: f64,
    pub rx: f64,
}

impl TestFunction {
    pub fn new(t0: f64, x0: f64, rt: f64, rx: f64) -> Result<Self> {
        if !(rt > 0.0 && rx > 0.0 && t0.is_finite() && x0.is_finite()) {
            return Err(Error::Domain("bump radii must be positive".into()));
        }
        if t0 - rt <= 0.0 {
            return Err(Error::Domain(format!("bump support must lie in t > 0 (t0 = {t0}, rt = {rt})")));
        }
        Ok(Self { t0, x0, rt, rx })
    }

    /// `(phi, phi_t, phi_x)`.
    pub fn eval(&self, t: f64, x: f64) -> (f64, f64, f64) {
        let st = (t - self.t0) / self.rt;
        let sx = (x - self.x0) / self.rx;
        let r2 = st * st + sx * sx;
        if r2 >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let one_minus = 1.0 - r2;
        let phi = (-1.0 / one_minus).exp();
        let k = -phi / (one_minus * one_minus);
        (phi, k * 2.0 * st / self.rt, k * 2.0 * sx / self.rx)
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t0 - self.rt, self.t0 + self.rt)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x0 - self.rx, self.x0 + self.rx)
    }

    /// The time support split where each ray `x = s t` enters or leaves the
    /// bounding box, so every piece sees a fixed set of crossing rays.
    pub fn t_pieces(&self, speeds: &[f64]) -> Vec<f64> {
        let (t_lo, t_hi) = self.t_range();
        let (x_lo, x_hi) = self.x_range();
        let mut breaks = vec![t_lo, t_hi];
        for &s in speeds.iter().filter(|s| **s != 0.0) {
            breaks.extend([x_lo / s, x_hi / s].into_iter().filter(|t| *t > t_lo && *t < t_hi));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        breaks
    }

    /// Deterministic set of bumps straddling the waves of `sol`: centres at
    /// `t0` in `[0.5, 1.5]`, `x0 = t0 * xi` with `xi` drawn around the wave
    /// speeds, and time radii below `t0` so supports stay in `t > 0`.
    pub fn random_set(sol: &RiemannSolution, count: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = match &sol.wave {
            Wave::Classical(f) => (f.speeds[0], f.speeds[2]),
            Wave::Delta(d) => (d.sigma, d.sigma),
        };
        (0..count)
            .map(|_| {
                let t0 = rng.gen_range(0.5..1.5);
                let xi = rng.gen_range(lo - 0.3..hi + 0.3);
                let rt = rng.gen_range(0.1..0.45) * t0;
                let rx = rng.gen_range(0.1..0.6);
                Self { t0, x0: xi * t0, rt, rx }
            })
            .collect()
    }
}

/// Weighted delta measure `w(s) delta_L` on the ray `t = s`, `x = speed * s`,
/// with `w(s) = weight_rate * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedLineMeasure {
    pub speed: f64,
    pub weight_rate: f64,
}

impl WeightedLineMeasure {
    /// `<w delta_L, psi> = int w(s) psi(t(s), x(s)) ds` over `[s_lo, s_hi]`.
    pub fn pair(
        &self,
        psi: impl Fn(f64, f64) -> f64,
        s_lo: f64,
        s_hi: f64,
        rule: &GaussLegendre,
        panels: usize,
    ) -> f64 {
        rule.integrate(|s| self.weight_rate * s * psi(s, self.speed * s), s_lo, s_hi, panels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    /// Panels per region per axis.
    pub panels: usize,
    /// Gauss points per panel.
    pub order: usize,
    /// Allowed change of the residuals between `panels` and `2 * panels`.
    pub tolerance: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { panels: 64, order: 12, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakResidualReport {
    pub residuals: [f64; 3],
    pub panels: usize,
}

impl WeakResidualReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |m, r| m.max(*r))
    }
}

/// Signed weak-form integrals of the regular (piecewise constant) part:
/// `int int U phi_t + F phi_x dx dt`. The bounding box is cut along every
/// wave line and each polygonal piece gets its own composite rule in `t`
/// and in `x`.
fn regular_part(sol: &RiemannSolution, phi: &TestFunction, rule: &GaussLegendre, panels: usize) -> [f64; 3] {
    let params = &sol.data.params;
    let speeds: Vec<f64> = match &sol.wave {
        Wave::Classical(f) => f.speeds.to_vec(),
        Wave::Delta(d) => vec![d.sigma],
    };
    let (x_lo, x_hi) = phi.x_range();
    let mut acc = [0.0; 3];
    let mut cuts = Vec::with_capacity(speeds.len() + 2);
    let pieces = phi.t_pieces(&speeds);
    let nodes = pieces.windows(2).flat_map(|w| rule.composite(w[0], w[1], panels));
    for (t, wt) in nodes {
        cuts.clear();
        cuts.push(x_lo);
        cuts.extend(speeds.iter().map(|s| s * t).filter(|x| *x > x_lo && *x < x_hi));
        cuts.push(x_hi);
        for seg in cuts.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            if hi <= lo {
                continue;
            }
            let xi_mid = 0.5 * (lo + hi) / t;
            let s = match sol.sample(xi_mid) {
                crate::riemann::Sample::State { state, .. } => state,
                crate::riemann::Sample::DeltaCarrier { .. } => continue,
            };
            let u = s.conserved(params);
            let f = s.flux(params);
            let (mut it, mut ix) = (0.0, 0.0);
            for (x, wx) in rule.composite(lo, hi, panels) {
                let (_, pt, px) = phi.eval(t, x);
                it += wx * pt;
                ix += wx * px;
            }
            acc[0] += wt * (u.d * it + f.d * ix);
            acc[1] += wt * (u.m * it + f.m * ix);
            acc[2] += wt * (u.en * it + f.en * ix);
        }
    }
    acc
}

/// Rates of the three conserved weights carried by the shock line:
/// `h gamma`, `w gamma^2 sigma`, `w gamma^2` divided by `t`.
fn carrier_rates(ds: &DeltaShock, params: &ModelParams) -> ConservedState {
    let deficit = 1.0 - ds.sigma * ds.sigma / params.c2();
    ConservedState::new(ds.h_slope / deficit.sqrt(), ds.w_slope * ds.sigma / deficit, ds.w_slope / deficit)
}

/// Delta-measure contributions `<W_k delta_L, phi_t + sigma phi_x>` as exact
/// line integrals.
pub fn delta_line_terms(
    ds: &DeltaShock,
    params: &ModelParams,
    phi: &TestFunction,
    quad: &Quadrature,
) -> [f64; 3] {
    let rule = GaussLegendre::new(quad.order);
    let rates = carrier_rates(ds, params);
    let pieces = phi.t_pieces(&[ds.sigma]);
    let transport = |t: f64, x: f64| {
        let (_, pt, px) = phi.eval(t, x);
        pt + ds.sigma * px
    };
    rates.as_array().map(|rate| {
        let m = WeightedLineMeasure { speed: ds.sigma, weight_rate: rate };
        pieces.windows(2).map(|w| m.pair(transport, w[0], w[1], &rule, quad.panels)).sum()
    })
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        let rule = GaussLegendre::new(16);
        rule.integrate(|u| if u.abs() < 1.0 { (-1.0 / (1.0 - u * u)).exp() } else { 0.0 }, -1.0, 1.0, 256)
    })
}

/// Same contributions with the line measure replaced by the volume density
/// `W(t) eta_eps(x - sigma t)`, `eta_eps` a normalised bump of half-width `eps`.
pub fn delta_mollified_terms(
    ds: &DeltaShock,
    params: &ModelParams,
    phi: &TestFunction,
    quad: &Quadrature,
    eps: f64,
) -> [f64; 3] {
    let rule = GaussLegendre::new(quad.order);
    let rates = carrier_rates(ds, params);
    let norm = 1.0 / (eps * bump_mass());
    let pieces = phi.t_pieces(&[ds.sigma]);
    let mut acc = 0.0;
    for (t, wt) in pieces.windows(2).flat_map(|w| rule.composite(w[0], w[1], quad.panels)) {
        let centre = ds.sigma * t;
        let mut inner = 0.0;
        for (x, wx) in rule.composite(centre - eps, centre + eps, quad.panels) {
            let u = (x - centre) / eps;
            if u.abs() >= 1.0 {
                continue;
            }
            let eta = norm * (-1.0 / (1.0 - u * u)).exp();
            let (_, pt, px) = phi.eval(t, x);
            inner += wx * eta * (pt + ds.sigma * px);
        }
        acc += wt * t * inner;
    }
    rates.as_array().map(|rate| rate * acc)
}

fn evaluate(
    sol: &RiemannSolution,
    phi: &TestFunction,
    quad: &Quadrature,
    panels: usize,
    delta: impl Fn(&DeltaShock, &Quadrature) -> [f64; 3],
) -> [f64; 3] {
    let rule = GaussLegendre::new(quad.order);
    let mut r = regular_part(sol, phi, &rule, panels);
    if let Wave::Delta(ds) = &sol.wave {
        let q = Quadrature { panels, ..*quad };
        let line = delta(ds, &q);
        for k in 0..3 {
            r[k] += line[k];
        }
    }
    r.map(f64::abs)
}

fn checked(
    sol: &RiemannSolution,
    phi: &TestFunction,
    quad: &Quadrature,
    delta: impl Fn(&DeltaShock, &Quadrature) -> [f64; 3],
) -> Result<WeakResidualReport> {
    TestFunction::new(phi.t0, phi.x0, phi.rt, phi.rx)?;
    if quad.panels == 0 || quad.order == 0 {
        return Err(Error::Domain("quadrature needs at least one panel and one point".into()));
    }
    let residuals = evaluate(sol, phi, quad, quad.panels, &delta);
    if quad.tolerance.is_finite() {
        let refined = evaluate(sol, phi, quad, 2 * quad.panels, &delta);
        let drift = residuals.iter().zip(&refined).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        if drift > quad.tolerance {
            return Err(Error::Quadrature { best: refined, panels: 2 * quad.panels });
        }
    }
    Ok(WeakResidualReport { residuals, panels: quad.panels })
}

/// Absolute weak-form residuals of the three conservation laws tested
/// against `phi`, delta measures integrated along the shock line.
///
/// The result is also computed with twice the panels; a change larger than
/// `quad.tolerance` is reported as a quadrature error carrying the refined
/// residuals. An infinite tolerance skips the second pass.
pub fn weak_residual(
    sol: &RiemannSolution,
    phi: &TestFunction,
    quad: &Quadrature,
) -> Result<WeakResidualReport> {
    let params = sol.data.params;
    checked(sol, phi, quad, |ds, q| delta_line_terms(ds, &params, phi, q))
}

/// As [`weak_residual`] with the delta measures mollified at half-width `eps`.
pub fn weak_residual_mollified(
    sol: &RiemannSolution,
    phi: &TestFunction,
    quad: &Quadrature,
    eps: f64,
) -> Result<WeakResidualReport> {
    let params = sol.data.params;
    checked(sol, phi, quad, |ds, q| delta_mollified_terms(ds, &params, phi, q, eps))
}

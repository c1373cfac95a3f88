//! Exact Riemann solver.
//!
//! With `a = lambda_1(left)` and `b = lambda_3(right)` the data are
//! classical when `b > a` (three contact discontinuities around a star
//! state) and produce a delta shock when `b <= a`. The delta shock carries
//! Dirac masses in both `n` and `rho`, moves with constant speed `sigma`
//! and has weights growing linearly in time.

use serde::{Deserialize, Serialize};

use crate::eigen::{lambda1_raw, lambda3_raw};
use crate::error::{Error, Result};
use crate::state::{ConservedState, ModelParams, PrimitiveState};
use crate::wavecurves::n_scaling;

/// Relative threshold below which `E` is treated as zero.
pub const E_ZERO_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub params: ModelParams,
}

impl RiemannData {
    pub fn new(left: PrimitiveState, right: PrimitiveState, params: ModelParams) -> Result<Self> {
        left.check(&params)?;
        right.check(&params)?;
        Ok(Self { left, right, params })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Classical,
    Delta,
}

/// Four constant states separated by the 1-, 2- and 3-contacts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalFan {
    pub states: [PrimitiveState; 4],
    /// `[a, v*, b]`.
    pub speeds: [f64; 3],
}

impl ClassicalFan {
    pub fn rho_star(&self) -> f64 {
        self.states[1].rho
    }
    pub fn v_star(&self) -> f64 {
        self.states[1].v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaShock {
    /// Shock speed, equal to the carrier velocity.
    pub sigma: f64,
    /// `h(t) = h_slope * t`, weight on `n`.
    pub h_slope: f64,
    /// `w(t) = w_slope * t`, weight on `rho`.
    pub w_slope: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl DeltaShock {
    pub fn position(&self, t: f64) -> f64 {
        self.sigma * t
    }
    pub fn h(&self, t: f64) -> f64 {
        self.h_slope * t
    }
    pub fn w(&self, t: f64) -> f64 {
        self.w_slope * t
    }
    pub fn quadratic_residual(&self) -> f64 {
        self.e * self.sigma * self.sigma - 2.0 * self.f * self.sigma + self.g
    }
    pub fn coefficient_scale(&self) -> f64 {
        self.e.abs().max(self.f.abs()).max(self.g.abs()).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Wave {
    Classical(ClassicalFan),
    Delta(DeltaShock),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannSolution {
    pub data: RiemannData,
    pub wave: Wave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Left,
    Star1,
    Star2,
    Right,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::Left => "left",
            Region::Star1 => "star1",
            Region::Star2 => "star2",
            Region::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sample {
    State {
        region: Region,
        state: PrimitiveState,
    },
    /// The delta shock line itself, where no finite primitive state exists.
    DeltaCarrier {
        velocity: f64,
        h_slope: f64,
        w_slope: f64,
    },
}

/// `(a, b) = (lambda_1(left), lambda_3(right))`.
pub fn edge_speeds(data: &RiemannData) -> (f64, f64) {
    let c2 = data.params.c2();
    (lambda1_raw(data.left.rho, data.left.v, c2), lambda3_raw(data.right.rho, data.right.v, c2))
}

pub fn classify(data: &RiemannData) -> Regime {
    let (a, b) = edge_speeds(data);
    if b <= a {
        Regime::Delta
    } else {
        Regime::Classical
    }
}

pub fn solve(data: &RiemannData) -> Result<RiemannSolution> {
    let wave = match classify(data) {
        Regime::Classical => Wave::Classical(solve_classical(data)?),
        Regime::Delta => Wave::Delta(solve_delta(data)?),
    };
    Ok(RiemannSolution { data: *data, wave })
}

/// Star-state energy density where the 1-curve from the left meets the
/// 3-curve from the right; the larger root of
/// `(b - a) c^2 rho^2 - 2 (c^2 - a b) rho + (b - a) = 0`.
pub fn star_energy_density(a: f64, b: f64, params: &ModelParams) -> f64 {
    let c2 = params.c2();
    let disc = (c2 - a * a) * (c2 - b * b);
    (c2 - a * b + disc.sqrt()) / (c2 * (b - a))
}

pub fn solve_classical(data: &RiemannData) -> Result<ClassicalFan> {
    let (a, b) = edge_speeds(data);
    if b <= a {
        return Err(Error::Regime(format!("classical construction needs b > a, got a = {a}, b = {b}")));
    }
    let params = &data.params;
    let c2 = params.c2();
    let rho_star = star_energy_density(a, b, params);
    let v_star = (a + 1.0 / rho_star) / (1.0 + a / (rho_star * c2));
    if !(rho_star > 1.0 / params.c && rho_star.is_finite()) || !(v_star.abs() < params.c) {
        return Err(Error::Internal(format!(
            "star state outside the admissible region: rho* = {rho_star}, v* = {v_star}"
        )));
    }
    let left = data.left;
    let right = data.right;
    let n1 = n_scaling(left.n, left.rho, rho_star, params)?;
    let n2 = n_scaling(right.n, right.rho, rho_star, params)?;
    Ok(ClassicalFan {
        states: [
            left,
            PrimitiveState::new(n1, rho_star, v_star),
            PrimitiveState::new(n2, rho_star, v_star),
            right,
        ],
        speeds: [a, v_star, b],
    })
}

/// Jumps `(E, F, G) = ([En], [M], [F_M])`, right minus left.
pub fn jump_coefficients(data: &RiemannData) -> (f64, f64, f64) {
    let p = &data.params;
    let du: ConservedState = data.right.conserved(p) - data.left.conserved(p);
    let df = data.right.flux(p) - data.left.flux(p);
    (du.en, du.m, df.m)
}

pub fn solve_delta(data: &RiemannData) -> Result<DeltaShock> {
    let (a, b) = edge_speeds(data);
    if b > a {
        return Err(Error::Regime(format!("delta shock needs b <= a, got a = {a}, b = {b}")));
    }
    let params = &data.params;
    let c = params.c;
    let c2 = params.c2();
    let (e, f, g) = jump_coefficients(data);
    let scale = e.abs().max(f.abs()).max(g.abs()).max(1.0);

    let mut disc = f * f - e * g;
    if disc < 0.0 {
        if disc < -1e-12 * scale * scale {
            return Err(Error::NoRealSpeed { discriminant: disc });
        }
        disc = 0.0;
    }
    let root = disc.sqrt();

    // Roundoff slack on the window; the window is a single point when b = a.
    let slack = 1e-12 * c.max(a.abs()).max(b.abs());
    let in_window = |s: f64| s.is_finite() && s >= b - slack && s <= a + slack;
    let clamp = |s: f64| s.clamp(b, a);

    let sigma = if e.abs() > E_ZERO_REL * f.abs().max(1.0) {
        // Cancellation-free forms of (F + root)/E and (F - root)/E.
        let (plus, minus) =
            if f >= 0.0 { ((f + root) / e, g / (f + root)) } else { (g / (f - root), (f - root) / e) };
        match (in_window(plus), in_window(minus)) {
            (true, false) => clamp(plus),
            (true, true) if (plus - minus).abs() <= slack => clamp(plus),
            (true, true) => return Err(Error::AmbiguousSpeed { first: plus, second: minus }),
            (false, true) => {
                if e > 0.0 {
                    return Err(Error::Internal(format!(
                        "entropy selected the minus branch {minus} with E = {e} > 0"
                    )));
                }
                log::warn!("delta shock with E = {e} < 0 selected the minus branch {minus}");
                clamp(minus)
            }
            (false, false) => return Err(Error::EntropyViolation { b, a }),
        }
    } else {
        if f == 0.0 {
            return Err(Error::EntropyViolation { b, a });
        }
        let s = g / (2.0 * f);
        if !in_window(s) {
            return Err(Error::EntropyViolation { b, a });
        }
        clamp(s)
    };
    if e < 0.0 {
        log::debug!("delta shock with E = {e} < 0 (sigma = {sigma})");
    }

    let deficit = 1.0 - sigma * sigma / c2;
    let w_slope = if e.abs() > E_ZERO_REL * f.abs().max(1.0) { root * deficit } else { -f * deficit };
    let p = params;
    let dd = data.right.conserved(p).d - data.left.conserved(p).d;
    let dfd = data.right.flux(p).d - data.left.flux(p).d;
    let h_slope = deficit.sqrt() * (dd * sigma - dfd);

    Ok(DeltaShock { sigma, h_slope, w_slope, e, f, g })
}

impl RiemannSolution {
    pub fn regime(&self) -> Regime {
        match self.wave {
            Wave::Classical(_) => Regime::Classical,
            Wave::Delta(_) => Regime::Delta,
        }
    }

    pub fn sample(&self, xi: f64) -> Sample {
        sample(self, xi)
    }

    /// Sample at `(t, x)` with `t > 0`.
    pub fn sample_at(&self, t: f64, x: f64) -> Sample {
        sample(self, x / t)
    }

    /// Conserved densities of the regular part at `xi`; `None` on the delta line.
    pub fn conserved_at(&self, xi: f64) -> Option<ConservedState> {
        match self.sample(xi) {
            Sample::State { state, .. } => Some(state.conserved(&self.data.params)),
            Sample::DeltaCarrier { .. } => None,
        }
    }
}

pub fn sample(sol: &RiemannSolution, xi: f64) -> Sample {
    let data = &sol.data;
    match &sol.wave {
        Wave::Classical(fan) => {
            let [a, vs, b] = fan.speeds;
            let (region, idx) = if xi < a {
                (Region::Left, 0)
            } else if xi <= vs {
                (Region::Star1, 1)
            } else if xi <= b {
                (Region::Star2, 2)
            } else {
                (Region::Right, 3)
            };
            Sample::State { region, state: fan.states[idx] }
        }
        Wave::Delta(ds) => {
            if xi < ds.sigma {
                Sample::State { region: Region::Left, state: data.left }
            } else if xi > ds.sigma {
                Sample::State { region: Region::Right, state: data.right }
            } else {
                Sample::DeltaCarrier { velocity: ds.sigma, h_slope: ds.h_slope, w_slope: ds.w_slope }
            }
        }
    }
}

//! Primitive and conserved variables for the Chaplygin gas.
//!
//! The unknowns are the rest mass density `n`, the proper energy density
//! `rho` and the particle speed `v`. The conserved densities are
//!
//! ```text
//! D  = n / sqrt(1 - v^2/c^2)
//! M  = (p/c^2 + rho) v / (1 - v^2/c^2)
//! En = (p/c^2 + rho) (v^2/c^2) / (1 - v^2/c^2) + rho
//! ```
//!
//! with `p = -1/rho`. Admissible states satisfy `n > 0`, `rho > 1/c` and
//! `|v| < c`, all strict.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model constants. Only the speed of light enters the Chaplygin system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c: f64,
}

impl ModelParams {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Self { c })
        } else {
            Err(Error::Domain(format!("light speed must be positive and finite, got {c}")))
        }
    }

    #[inline]
    pub fn c2(&self) -> f64 {
        self.c * self.c
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub n: f64,
    pub rho: f64,
    pub v: f64,
}

/// Conserved densities `(D, M, En)`. Also used for fluxes and jumps, which
/// share the same three-component layout.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState {
    pub d: f64,
    pub m: f64,
    pub en: f64,
}

/// Outcome of the admissibility test; the failing clause is reported first
/// in the order `n`, `rho`, `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Admissibility {
    Admissible,
    NonFinite,
    NonPositiveDensity,
    EnergyDensityTooLow,
    SpeedNotSubluminal,
}

impl Admissibility {
    pub fn is_admissible(self) -> bool {
        self == Admissibility::Admissible
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Admissibility::Admissible => "admissible",
            Admissibility::NonFinite => "non-finite component",
            Admissibility::NonPositiveDensity => "n <= 0",
            Admissibility::EnergyDensityTooLow => "rho <= 1/c",
            Admissibility::SpeedNotSubluminal => "|v| >= c",
        };
        f.write_str(s)
    }
}

/// Chaplygin pressure `p = -1/rho`.
pub fn pressure(rho: f64) -> Result<f64> {
    if rho.is_finite() && rho > 0.0 {
        Ok(-1.0 / rho)
    } else {
        Err(Error::Domain(format!("pressure needs rho > 0, got {rho}")))
    }
}

pub fn validate_physical(s: &PrimitiveState, params: &ModelParams) -> Admissibility {
    if !(s.n.is_finite() && s.rho.is_finite() && s.v.is_finite()) {
        Admissibility::NonFinite
    } else if s.n <= 0.0 {
        Admissibility::NonPositiveDensity
    } else if s.rho <= 1.0 / params.c {
        Admissibility::EnergyDensityTooLow
    } else if s.v.abs() >= params.c {
        Admissibility::SpeedNotSubluminal
    } else {
        Admissibility::Admissible
    }
}

impl PrimitiveState {
    pub const fn new(n: f64, rho: f64, v: f64) -> Self {
        Self { n, rho, v }
    }

    pub fn check(&self, params: &ModelParams) -> Result<()> {
        match validate_physical(self, params) {
            Admissibility::Admissible => Ok(()),
            other => Err(Error::Inadmissible(other)),
        }
    }

    /// `1 - v^2/c^2`.
    #[inline]
    pub fn lorentz_deficit(&self, params: &ModelParams) -> f64 {
        1.0 - self.v * self.v / params.c2()
    }

    #[inline]
    pub fn lorentz_factor(&self, params: &ModelParams) -> f64 {
        1.0 / self.lorentz_deficit(params).sqrt()
    }

    /// `rho + p/c^2 = rho - 1/(rho c^2)`, the inertial energy density.
    #[inline]
    pub fn inertial_density(&self, params: &ModelParams) -> f64 {
        self.rho - 1.0 / (self.rho * params.c2())
    }

    /// Conserved densities without an admissibility check.
    pub fn conserved(&self, params: &ModelParams) -> ConservedState {
        let deficit = self.lorentz_deficit(params);
        let q = self.inertial_density(params);
        let m = q * self.v / deficit;
        ConservedState {
            d: self.n / deficit.sqrt(),
            m,
            en: q * self.v * self.v / params.c2() / deficit + self.rho,
        }
    }

    /// Physical fluxes `(n v gamma, M v + p, M)` without an admissibility check.
    pub fn flux(&self, params: &ModelParams) -> ConservedState {
        let deficit = self.lorentz_deficit(params);
        let q = self.inertial_density(params);
        ConservedState {
            d: self.n * self.v / deficit.sqrt(),
            m: q * self.v * self.v / deficit - 1.0 / self.rho,
            en: q * self.v / deficit,
        }
    }
}

pub fn to_conserved(s: &PrimitiveState, params: &ModelParams) -> Result<ConservedState> {
    s.check(params)?;
    Ok(s.conserved(params))
}

/// Recovers the primitive state from conserved densities.
///
/// With `rho(v) = En - M v / c^2` the speed solves
/// `g(v) = (M/v)(1 - v^2/c^2) - (rho(v) - 1/(rho(v) c^2)) = 0`, which has
/// exactly one sign change on `(0, c) * sign(M)` whenever the input lies in
/// the image of the admissible region. The root is bracketed and bisected
/// down to floating-point resolution.
pub fn from_conserved(u: &ConservedState, params: &ModelParams) -> Result<PrimitiveState> {
    if !(u.d.is_finite() && u.m.is_finite() && u.en.is_finite()) {
        return Err(Error::NonInvertible("non-finite conserved component".into()));
    }
    if u.d <= 0.0 {
        return Err(Error::NonInvertible(format!("D = {} is not positive", u.d)));
    }
    let c = params.c;
    let c2 = params.c2();

    let zero_tol = 1e-14 * u.en.abs().max(1.0);
    let s = if u.m.abs() <= zero_tol {
        PrimitiveState::new(u.d, u.en, 0.0)
    } else {
        let m = u.m.abs();
        let rho_of = |v: f64| u.en - m * v / c2;
        let g = |v: f64| {
            let rho = rho_of(v);
            (m / v) * (1.0 - v * v / c2) - (rho - 1.0 / (rho * c2))
        };
        // g(0+) = +inf, so only the upper end needs checking.
        let g_hi = g(c);
        if !(g_hi < 0.0) {
            return Err(Error::NonInvertible(format!(
                "no sign change on (0, c): g(c) = {g_hi}, En - |M|/c = {}",
                u.en - m / c
            )));
        }
        let (mut lo, mut hi) = (0.0_f64, c);
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = 0.5 * (lo + hi);
        let rho = rho_of(v);
        PrimitiveState::new(u.d * (1.0 - v * v / c2).sqrt(), rho, v.copysign(u.m))
    };

    match validate_physical(&s, params) {
        Admissibility::Admissible => Ok(s),
        other => Err(Error::InversionOutOfRegion(other)),
    }
}

impl ConservedState {
    pub const fn new(d: f64, m: f64, en: f64) -> Self {
        Self { d, m, en }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.d, self.m, self.en]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn max_abs(&self) -> f64 {
        self.d.abs().max(self.m.abs()).max(self.en.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.d.is_finite() && self.m.is_finite() && self.en.is_finite()
    }
}

impl Add for ConservedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.d + o.d, self.m + o.m, self.en + o.en)
    }
}

impl Sub for ConservedState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.d - o.d, self.m - o.m, self.en - o.en)
    }
}

impl Mul<ConservedState> for f64 {
    type Output = ConservedState;
    fn mul(self, u: ConservedState) -> ConservedState {
        ConservedState::new(self * u.d, self * u.m, self * u.en)
    }
}

//! Contact-discontinuity curves and Rankine-Hugoniot bookkeeping.
//!
//! Rarefaction and shock curves coincide for this system, so every
//! elementary wave is a contact discontinuity. Families 1 and 3 keep their
//! characteristic speed constant and scale `n` with
//! `sqrt((rho^2 c^2 - 1) / (rho_ref^2 c^2 - 1))`; family 2 changes `n` only.

use serde::{Deserialize, Serialize};

use crate::eigen::{lambda1_raw, lambda3_raw};
use crate::error::{Error, Result};
use crate::state::{ModelParams, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactFamily {
    First,
    Second,
    Third,
}

impl ContactFamily {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            3 => Ok(Self::Third),
            _ => Err(Error::Domain(format!("contact family index must be 1, 2 or 3, got {i}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::First => 1,
            Self::Second => 2,
            Self::Third => 3,
        }
    }
}

/// Signed residuals `-sigma [U_k] + [F_k]`, jumps taken right minus left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscontinuityResidual {
    pub res: [f64; 3],
    pub sigma: f64,
}

impl DiscontinuityResidual {
    pub fn max_abs(&self) -> f64 {
        self.res.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

/// Hugoniot density scaling `n = n_ref sqrt((rho c - 1)(rho c + 1) / ((rho_ref c - 1)(rho_ref c + 1)))`.
pub fn n_scaling(n_ref: f64, rho_ref: f64, rho: f64, params: &ModelParams) -> Result<f64> {
    let inv_c = 1.0 / params.c;
    if !(n_ref > 0.0 && rho_ref > inv_c && rho > inv_c) || !n_ref.is_finite() {
        return Err(Error::Domain(format!(
            "n_scaling needs n_ref > 0 and rho, rho_ref > 1/c (got n_ref={n_ref}, rho_ref={rho_ref}, rho={rho})"
        )));
    }
    let c = params.c;
    let num = (rho * c - 1.0) * (rho * c + 1.0);
    let den = (rho_ref * c - 1.0) * (rho_ref * c + 1.0);
    Ok(n_ref * (num / den).sqrt())
}

/// Point on the contact curve of `family` through `base`, with the wave speed.
///
/// For families 1 and 3 `param` is the energy density `rho`; for family 2 it
/// is the rest mass density `n`.
pub fn curve_point(
    base: &PrimitiveState,
    family: ContactFamily,
    param: f64,
    params: &ModelParams,
) -> Result<(PrimitiveState, f64)> {
    base.check(params)?;
    let c2 = params.c2();
    let (state, speed) = match family {
        ContactFamily::Second => {
            if !(param > 0.0 && param.is_finite()) {
                return Err(Error::Domain(format!("family 2 needs n > 0, got {param}")));
            }
            (PrimitiveState::new(param, base.rho, base.v), base.v)
        }
        ContactFamily::First | ContactFamily::Third => {
            let rho = param;
            let n = n_scaling(base.n, base.rho, rho, params)?;
            if rho == base.rho {
                let speed = if family == ContactFamily::First {
                    lambda1_raw(base.rho, base.v, c2)
                } else {
                    lambda3_raw(base.rho, base.v, c2)
                };
                return Ok((*base, speed));
            }
            let s = 1.0 / rho;
            let (speed, v) = if family == ContactFamily::First {
                let l = lambda1_raw(base.rho, base.v, c2);
                (l, (l + s) / (1.0 + l * s / c2))
            } else {
                let l = lambda3_raw(base.rho, base.v, c2);
                (l, (l - s) / (1.0 - l * s / c2))
            };
            (PrimitiveState::new(n, rho, v), speed)
        }
    };
    if !(state.v.abs() < params.c) {
        return Err(Error::OffCurve { rho_min: 1.0 / params.c, rho_max: f64::INFINITY });
    }
    Ok((state, speed))
}

pub fn rh_residual(
    left: &PrimitiveState,
    right: &PrimitiveState,
    sigma: f64,
    params: &ModelParams,
) -> DiscontinuityResidual {
    let du = right.conserved(params) - left.conserved(params);
    let df = right.flux(params) - left.flux(params);
    DiscontinuityResidual { res: [-sigma * du.d + df.d, -sigma * du.m + df.m, -sigma * du.en + df.en], sigma }
}

/// Both sides of the eliminated jump relations relating `(rho, v)` across a
/// discontinuity: the squared identity and the two sign branches of the
/// unsquared one (`+` for the first family, `-` for the third).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HugoniotIdentities {
    pub lhs_squared: f64,
    pub rhs_squared: f64,
    pub lhs_signed: f64,
    pub rhs_plus: f64,
    pub rhs_minus: f64,
}

impl HugoniotIdentities {
    pub fn squared_defect(&self) -> f64 {
        (self.lhs_squared - self.rhs_squared).abs()
    }
    pub fn plus_defect(&self) -> f64 {
        (self.lhs_signed - self.rhs_plus).abs()
    }
    pub fn minus_defect(&self) -> f64 {
        (self.lhs_signed - self.rhs_minus).abs()
    }
}

pub fn hugoniot_identities(
    left: &PrimitiveState,
    right: &PrimitiveState,
    params: &ModelParams,
) -> HugoniotIdentities {
    let c2 = params.c2();
    let (rl, vl) = (left.rho, left.v);
    let (r, v) = (right.rho, right.v);
    let dv = v - vl;
    let dr = r - rl;
    let lhs_squared = dv * dv / ((1.0 - v * v / c2) * (1.0 - vl * vl / c2));
    let rhs_squared = dr * dr / ((r * r - 1.0 / c2) * (rl * rl - 1.0 / c2));
    let lhs_signed = dv / (v * vl / c2 - 1.0);
    let branch = dr / (r * rl - 1.0 / c2);
    HugoniotIdentities { lhs_squared, rhs_squared, lhs_signed, rhs_plus: branch, rhs_minus: -branch }
}

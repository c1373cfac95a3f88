use serde::{Deserialize, Serialize};

use crate::eigen::lambda1_raw;
use crate::error::{Error, Result};
use crate::riemann::{solve_classical, RiemannData};
use crate::state::{ModelParams, PrimitiveState};

/// Integrals of `rho`, `n`, `v` over the fan `a <= xi <= b` at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub eps: f64,
    pub integrals: [f64; 3],
    pub errors: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTable {
    pub left: PrimitiveState,
    pub a: f64,
    pub targets: [f64; 3],
    pub rows: Vec<LimitRow>,
    /// Polynomial extrapolation of each column to `eps = 0`.
    pub extrapolated: [f64; 3],
}

impl LimitTable {
    /// `|extrapolated - target| / max(|target|, 1)` per column.
    pub fn extrapolation_errors(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = (self.extrapolated[k] - self.targets[k]).abs() / self.targets[k].abs().max(1.0);
        }
        out
    }

    /// Whether every error column shrinks as `eps` shrinks.
    pub fn monotone(&self) -> bool {
        let mut rows: Vec<&LimitRow> = self.rows.iter().collect();
        rows.sort_by(|x, y| y.eps.total_cmp(&x.eps));
        rows.windows(2).all(|w| (0..3).all(|k| w[1].errors[k] < w[0].errors[k]))
    }
}

/// Right state with `rho_+ = rho_-`, `n_+ = n_-` and `lambda_3(right) = b`.
fn right_state(left: &PrimitiveState, b: f64, params: &ModelParams) -> PrimitiveState {
    let inv = 1.0 / left.rho;
    let v = (b - inv) / (1.0 - b * inv / params.c2());
    PrimitiveState::new(left.n, left.rho, v)
}

/// Integrals of the classical fan for `b = a + eps` against their
/// `eps -> 0` limits.
pub fn limit_study(left: &PrimitiveState, params: &ModelParams, epsilons: &[f64]) -> Result<LimitTable> {
    left.check(params)?;
    let c2 = params.c2();
    let a = lambda1_raw(left.rho, left.v, c2);
    let eps_max = params.c - a;
    let share = (c2 - a * a) / c2;
    let mass = |s: &PrimitiveState| s.n / (s.rho * s.rho - 1.0 / c2).sqrt();
    // n_+ = n_- and rho_+ = rho_- along the family, so both masses agree
    let targets = [2.0 * share, share * 2.0 * mass(left), 0.0];

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > 0.0 && eps < eps_max) {
            return Err(Error::Range { eps, eps_max });
        }
        let right = right_state(left, a + eps, params);
        let data = RiemannData::new(*left, right, *params).map_err(|_| Error::Range { eps, eps_max })?;
        let fan = solve_classical(&data)?;
        let [_, s1, s2, _] = fan.states;
        let [a_, vs, b] = fan.speeds;
        let (w1, w2) = (vs - a_, b - vs);
        let integrals = [s1.rho * w1 + s2.rho * w2, s1.n * w1 + s2.n * w2, s1.v * w1 + s2.v * w2];
        let mut errors = [0.0; 3];
        for k in 0..3 {
            errors[k] = (integrals[k] - targets[k]).abs();
        }
        rows.push(LimitRow { eps, integrals, errors });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let mut extrapolated = [f64::NAN; 3];
    if !rows.is_empty() {
        for k in 0..3 {
            let ys: Vec<f64> = rows.iter().map(|r| r.integrals[k]).collect();
            extrapolated[k] = extrapolate_to_zero(&xs, &ys);
        }
    }
    Ok(LimitTable { left: *left, a, targets, rows, extrapolated })
}

/// Value at `x = 0` of the interpolating polynomial through `(xs, ys)`
/// (Neville's scheme).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut p = ys.to_vec();
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [0.1, 0.03, 0.01, 0.003];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x + 5.0 * x * x * x).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 2.0).abs() < 1e-13);
        assert_eq!(extrapolate_to_zero(&[0.5], &[7.0]), 7.0);
    }

    #[test]
    fn worked_left_state() {
        let left = PrimitiveState::new(1.0, 2.0, 0.8);
        let t = limit_study(&left, &ModelParams::default(), &EPS).unwrap();
        assert!((t.a - 0.5).abs() < 1e-15);
        assert!((t.targets[0] - 1.5).abs() < 1e-15);
        assert!((t.targets[1] - 0.75 * 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.targets[2], 0.0);
        assert!(t.monotone(), "{t:?}");
        assert!(t.extrapolation_errors().iter().all(|e| *e < 1e-6), "{:?}", t.extrapolation_errors());
        // first-order approach: err ~ 2 a eps / c^2 for the rho integral
        let last = t.rows.last().unwrap();
        assert!((last.errors[0] / (2.0 * 0.5 * 1e-3) - 1.0).abs() < 0.05);
    }

    #[test]
    fn right_states_lie_on_the_family() {
        let params = ModelParams::new(2.0).unwrap();
        let left = PrimitiveState::new(0.7, 3.0, -0.4);
        let a = lambda1_raw(left.rho, left.v, params.c2());
        for eps in [0.3, 1e-4] {
            let r = right_state(&left, a + eps, &params);
            let l3 = crate::eigen::lambda3_raw(r.rho, r.v, params.c2());
            assert!((l3 - a - eps).abs() < 1e-14);
        }
    }

    #[test]
    fn infeasible_eps_is_a_range_error() {
        let left = PrimitiveState::new(1.0, 2.0, 0.8);
        for eps in [0.0, -1e-3, 0.5, 0.7] {
            match limit_study(&left, &ModelParams::default(), &[eps]) {
                Err(Error::Range { eps_max, .. }) => assert!((eps_max - 0.5).abs() < 1e-15),
                other => panic!("{eps}: {other:?}"),
            }
        }
    }
}

//! Quasilinear form `A U_t + B U_x = 0` in the unknowns `(n, rho, v)`,
//! its characteristic speeds and right eigenvectors.
//!
//! All three fields are linearly degenerate: `grad(lambda_i) . r_i = 0`.

use crate::error::{Error, Result};
use crate::state::{ModelParams, PrimitiveState};

pub type Matrix3 = [[f64; 3]; 3];
pub type Vector3 = [f64; 3];

/// The matrices `A` (Jacobian of the conserved densities) and `B` (Jacobian
/// of the fluxes), rows and columns ordered as `(n, rho, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasilinearPair {
    pub a: Matrix3,
    pub b: Matrix3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTriple {
    pub lambda: [f64; 3],
    pub r: [Vector3; 3],
}

pub fn assemble_matrices(s: &PrimitiveState, params: &ModelParams) -> Result<QuasilinearPair> {
    s.check(params)?;
    let PrimitiveState { n, rho, v } = *s;
    let c2 = params.c2();
    let deficit = 1.0 - v * v / c2;
    let sq = deficit.sqrt();
    let q = rho - 1.0 / (rho * c2);
    let dq = 1.0 / (rho * rho * c2) + 1.0;

    let a = [
        [1.0 / sq, 0.0, n * v / (c2 * deficit * sq)],
        [0.0, dq * v / deficit, q * (1.0 + v * v / c2) / (deficit * deficit)],
        [
            0.0,
            (1.0 + v * v / (rho * rho * c2 * c2)) / deficit,
            2.0 * v / (c2 * c2) * (rho * c2 - 1.0 / rho) / (deficit * deficit),
        ],
    ];
    let b = [
        [v / sq, 0.0, n / (deficit * sq)],
        [
            0.0,
            (v * v + 1.0 / (rho * rho)) / deficit,
            2.0 * rho * v * (1.0 - 1.0 / (rho * rho * c2)) / (deficit * deficit),
        ],
        [0.0, dq * v / deficit, q * (1.0 + v * v / c2) / (deficit * deficit)],
    ];
    Ok(QuasilinearPair { a, b })
}

#[inline]
pub(crate) fn lambda1_raw(rho: f64, v: f64, c2: f64) -> f64 {
    (v - 1.0 / rho) / (1.0 - v / (rho * c2))
}

#[inline]
pub(crate) fn lambda3_raw(rho: f64, v: f64, c2: f64) -> f64 {
    (v + 1.0 / rho) / (1.0 + v / (rho * c2))
}

/// Characteristic speeds in increasing order.
pub fn eigenvalues(s: &PrimitiveState, params: &ModelParams) -> Result<[f64; 3]> {
    s.check(params)?;
    let c2 = params.c2();
    Ok([lambda1_raw(s.rho, s.v, c2), s.v, lambda3_raw(s.rho, s.v, c2)])
}

/// Right eigenvectors, unnormalised.
pub fn eigenvectors(s: &PrimitiveState, params: &ModelParams) -> Result<[Vector3; 3]> {
    s.check(params)?;
    let PrimitiveState { n, rho, v } = *s;
    let c2 = params.c2();
    let deficit = 1.0 - v * v / c2;
    let q = rho - 1.0 / (rho * c2);
    let r1 = [-n / (q * deficit), -1.0 / deficit, (1.0 / rho) / q];
    let r2 = [1.0, 0.0, 0.0];
    let r3 = [n / (q * deficit), 1.0 / deficit, (1.0 / rho) / q];
    Ok([r1, r2, r3])
}

pub fn eigen_triple(s: &PrimitiveState, params: &ModelParams) -> Result<EigenTriple> {
    Ok(EigenTriple { lambda: eigenvalues(s, params)?, r: eigenvectors(s, params)? })
}

/// `|grad(lambda_i) . r_i|` for each family, with the gradient taken by
/// fourth-order central differences (steps `h` and `2h`) in each of `n`,
/// `rho`, `v`.
///
/// Near `|v| -> c` the speeds have large higher derivatives, and a
/// second-order stencil at `h = 1e-5` leaves truncation errors near `1e-7`.
pub fn degeneracy_defect(s: &PrimitiveState, params: &ModelParams, h: f64) -> Result<[f64; 3]> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    s.check(params)?;
    let speeds = |k: usize, delta: f64| {
        let mut p = [s.n, s.rho, s.v];
        p[k] += delta;
        let shifted = PrimitiveState::new(p[0], p[1], p[2]);
        eigenvalues(&shifted, params)
            .map_err(|_| Error::Domain(format!("stencil leaves the admissible region at {shifted:?}")))
    };
    let mut grads = [[0.0; 3]; 3];
    for k in 0..3 {
        let (p2, p1) = (speeds(k, 2.0 * h)?, speeds(k, h)?);
        let (m1, m2) = (speeds(k, -h)?, speeds(k, -2.0 * h)?);
        for i in 0..3 {
            grads[i][k] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
        }
    }
    let r = eigenvectors(s, params)?;
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = dot(&grads[i], &r[i]).abs();
    }
    Ok(out)
}

pub fn mat_vec(m: &Matrix3, x: &Vector3) -> Vector3 {
    [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
}

pub fn dot(a: &Vector3, b: &Vector3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Frobenius norm.
pub fn frobenius(m: &Matrix3) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn det(m: &Matrix3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl QuasilinearPair {
    /// `||(B - lambda A) r||_2 / ||B||_F`.
    pub fn relative_eigenresidual(&self, lambda: f64, r: &Vector3) -> f64 {
        let ar = mat_vec(&self.a, r);
        let br = mat_vec(&self.b, r);
        let res = [br[0] - lambda * ar[0], br[1] - lambda * ar[1], br[2] - lambda * ar[2]];
        dot(&res, &res).sqrt() / frobenius(&self.b)
    }
}

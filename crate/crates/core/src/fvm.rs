//! First-order finite-volume scheme for the conservative system on a
//! uniform grid with outflow boundaries.
//!
//! Two interface fluxes are available: the Godunov flux built from the exact
//! classical Riemann solution at `xi = 0`, and a Lax-Friedrichs flux with the
//! global maximum wave speed as viscosity. The latter also runs in the delta
//! regime, where the exact solution carries measures and Godunov is not
//! defined.

use serde::{Deserialize, Serialize};

use crate::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::riemann::{classify, solve_classical, Regime, RiemannData, RiemannSolution, Sample, Wave};
use crate::state::{from_conserved, ConservedState, ModelParams, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub xmin: f64,
    pub xmax: f64,
    pub ncells: usize,
}

impl Grid1D {
    pub fn new(xmin: f64, xmax: f64, ncells: usize) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite() && xmin < xmax) {
            return Err(Error::Domain(format!("grid needs xmin < xmax, got [{xmin}, {xmax}]")));
        }
        if ncells < 8 {
            return Err(Error::Domain(format!("grid needs at least 8 cells, got {ncells}")));
        }
        Ok(Self { xmin, xmax, ncells })
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / self.ncells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.xmin + (i as f64 + 0.5) * self.dx()
    }

    /// Left edge of cell `i`; `edge(ncells)` is `xmax`.
    pub fn edge(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.dx()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxKind {
    Godunov,
    LaxFriedrichs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub flux: FluxKind,
    /// Recovered cells with `rho - 1/c` below this are treated as degenerate.
    pub rho_floor: f64,
    /// Recovered cells with `1 - |v|/c` below this are treated as degenerate.
    pub speed_floor: f64,
    /// Extra output times in `(0, t_end)`; `t_end` is always emitted.
    pub snapshot_times: Vec<f64>,
    /// Half-width, in cells, of the window around the concentration spike.
    pub window_cells: usize,
}

impl SimConfig {
    pub fn new(cfl: f64, t_end: f64, flux: FluxKind) -> Self {
        Self {
            cfl,
            t_end,
            flux,
            rho_floor: 1e-12,
            speed_floor: 1e-12,
            snapshot_times: Vec::new(),
            window_cells: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Domain(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Domain(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.rho_floor >= 0.0 && self.speed_floor >= 0.0) {
            return Err(Error::Domain("recovery floors must be non-negative".into()));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t > 0.0 && **t <= self.t_end)) {
            return Err(Error::Domain(format!("snapshot time {t} outside (0, t_end]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub cells: Vec<ConservedState>,
    pub dt: f64,
    /// `max |lambda|` used for the time step.
    pub max_speed: f64,
    /// Fluxes through the left and right domain boundaries.
    pub boundary_flux: (ConservedState, ConservedState),
    /// Cells whose primitive state could not be recovered or sits within the
    /// floors; their wave speed was bounded by `c`.
    pub degenerate_cells: Vec<usize>,
}

/// Recovered primitive states, `None` where recovery fails or the state is
/// within the configured floors.
fn recover_all(
    cells: &[ConservedState],
    config: &SimConfig,
    params: &ModelParams,
) -> Vec<Option<PrimitiveState>> {
    cells
        .iter()
        .map(|u| {
            from_conserved(u, params).ok().filter(|s| {
                s.rho - 1.0 / params.c >= config.rho_floor && 1.0 - s.v.abs() / params.c >= config.speed_floor
            })
        })
        .collect()
}

fn godunov_flux(
    left: &PrimitiveState,
    right: &PrimitiveState,
    params: &ModelParams,
) -> Result<ConservedState> {
    if left == right {
        return Ok(left.flux(params));
    }
    let data = RiemannData { left: *left, right: *right, params: *params };
    if classify(&data) == Regime::Delta {
        return Err(Error::Regime(
            "Godunov flux met a delta-shock interface; use the Lax-Friedrichs flux".into(),
        ));
    }
    let fan = solve_classical(&data)?;
    let sol = RiemannSolution { data, wave: Wave::Classical(fan) };
    match sol.sample(0.0) {
        Sample::State { state, .. } => Ok(state.flux(params)),
        Sample::DeltaCarrier { .. } => Err(Error::Internal("classical fan sampled on a delta line".into())),
    }
}

/// One conservative update, with `dt` capped at `dt_max`.
pub fn step_capped(
    cells: &[ConservedState],
    grid: &Grid1D,
    config: &SimConfig,
    params: &ModelParams,
    dt_max: f64,
) -> Result<StepOutcome> {
    let n = cells.len();
    if n != grid.ncells {
        return Err(Error::Domain(format!("{n} cells for a grid of {}", grid.ncells)));
    }
    let prims = recover_all(cells, config, params);
    let mut degenerate_cells = Vec::new();
    let mut max_speed = 0.0_f64;
    for (i, s) in prims.iter().enumerate() {
        let speed = match s.map(|s| eigenvalues(&s, params)) {
            Some(Ok(l)) => l[0].abs().max(l[2].abs()),
            _ => {
                if config.flux == FluxKind::Godunov {
                    let source = match from_conserved(&cells[i], params) {
                        Err(e) => e,
                        Ok(s) => Error::Domain(format!("state {s:?} is within the recovery floors")),
                    };
                    return Err(Error::Recovery { cell: i, source: Box::new(source) });
                }
                degenerate_cells.push(i);
                params.c
            }
        };
        max_speed = max_speed.max(speed);
    }
    let dx = grid.dx();
    let dt = if max_speed > 0.0 { config.cfl * dx / max_speed } else { dt_max };
    let dt = dt.min(dt_max);

    // interface k sits between cells k-1 and k; ghosts copy the end cells
    let mut fluxes = Vec::with_capacity(n + 1);
    match config.flux {
        FluxKind::Godunov => {
            let p: Vec<PrimitiveState> = prims.iter().map(|s| s.expect("checked above")).collect();
            for k in 0..=n {
                let l = &p[k.saturating_sub(1)];
                let r = &p[k.min(n - 1)];
                let f = godunov_flux(l, r, params).map_err(|e| match e {
                    Error::Regime(_) => e,
                    other => Error::Recovery { cell: k.min(n - 1), source: Box::new(other) },
                })?;
                fluxes.push(f);
            }
        }
        FluxKind::LaxFriedrichs => {
            let phys: Vec<ConservedState> = cells
                .iter()
                .zip(&prims)
                .map(|(u, s)| match s {
                    Some(s) => s.flux(params),
                    // the flux needs a primitive state; fall back to the raw one
                    None => flux_from_conserved(u, params),
                })
                .collect();
            for k in 0..=n {
                let (l, r) = (k.saturating_sub(1), k.min(n - 1));
                let f = 0.5 * (phys[l] + phys[r]) - (0.5 * max_speed) * (cells[r] - cells[l]);
                fluxes.push(f);
            }
        }
    }

    let ratio = dt / dx;
    let next: Vec<ConservedState> = (0..n).map(|i| cells[i] - ratio * (fluxes[i + 1] - fluxes[i])).collect();
    Ok(StepOutcome { cells: next, dt, max_speed, boundary_flux: (fluxes[0], fluxes[n]), degenerate_cells })
}

pub fn step(
    cells: &[ConservedState],
    grid: &Grid1D,
    config: &SimConfig,
    params: &ModelParams,
) -> Result<StepOutcome> {
    step_capped(cells, grid, config, params, f64::INFINITY)
}

/// Flux of a cell flagged degenerate: exact when recovery still succeeds.
fn flux_from_conserved(u: &ConservedState, params: &ModelParams) -> ConservedState {
    match from_conserved(u, params) {
        Ok(s) => s.flux(params),
        Err(_) => {
            // outside the image of the admissible region: a pressureless
            // estimate keeps the update conservative and finite
            let v = if u.en > 0.0 { (u.m / u.en).clamp(-params.c, params.c) } else { 0.0 };
            ConservedState::new(u.d * v, u.m * v, u.m)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub cells: Vec<ConservedState>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConcentrationDiagnostics {
    pub times: Vec<f64>,
    pub spike_position: Vec<f64>,
    pub window_mass_en: Vec<f64>,
    pub window_mass_d: Vec<f64>,
    /// Cells in the window whose primitive state could not be recovered.
    pub window_recovery_failures: Vec<usize>,
}

impl ConcentrationDiagnostics {
    fn record(
        &mut self,
        time: f64,
        cells: &[ConservedState],
        grid: &Grid1D,
        window: usize,
        params: &ModelParams,
    ) {
        let spike =
            cells.iter().enumerate().fold(0, |best, (i, u)| if u.en > cells[best].en { i } else { best });
        let width = (2 * window + 1).min(grid.ncells);
        let lo = spike.saturating_sub(window).min(grid.ncells - width);
        let range = lo..lo + width;
        let dx = grid.dx();
        self.times.push(time);
        self.spike_position.push(grid.center(spike));
        self.window_mass_en.push(cells[range.clone()].iter().map(|u| u.en * dx).sum());
        self.window_mass_d.push(cells[range.clone()].iter().map(|u| u.d * dx).sum());
        self.window_recovery_failures
            .push(cells[range].iter().filter(|u| from_conserved(u, params).is_err()).count());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub grid: Grid1D,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: ConcentrationDiagnostics,
    pub steps: usize,
    /// `sum U dx` at t = 0.
    pub initial_total: ConservedState,
    /// Time integral of `F(xmax) - F(xmin)`.
    pub boundary_outflow: ConservedState,
}

impl SimResult {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("t_end is always emitted")
    }
}

pub fn total(cells: &[ConservedState], grid: &Grid1D) -> ConservedState {
    let dx = grid.dx();
    cells.iter().fold(ConservedState::default(), |acc, u| acc + dx * *u)
}

/// Cell-centre sampling of `initial`.
pub fn initialize(
    initial: impl Fn(f64) -> PrimitiveState,
    grid: &Grid1D,
    params: &ModelParams,
) -> Result<Vec<ConservedState>> {
    (0..grid.ncells)
        .map(|i| {
            let s = initial(grid.center(i));
            s.check(params)?;
            Ok(s.conserved(params))
        })
        .collect()
}

pub fn run(
    initial: impl Fn(f64) -> PrimitiveState,
    grid: &Grid1D,
    config: &SimConfig,
    params: &ModelParams,
) -> Result<SimResult> {
    config.validate()?;
    let mut cells = initialize(initial, grid, params)?;
    let mut stops: Vec<f64> = config.snapshot_times.clone();
    stops.push(config.t_end);
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let initial_total = total(&cells, grid);
    let mut outflow = ConservedState::default();
    let mut snapshots = Vec::with_capacity(stops.len());
    let mut diagnostics = ConcentrationDiagnostics::default();
    let mut t = 0.0;
    let mut steps = 0;
    for &stop in &stops {
        while t < stop {
            let out = step_capped(&cells, grid, config, params, stop - t)
                .map_err(|e| Error::AtTime { time: t, source: Box::new(e) })?;
            if !(out.dt > 0.0) {
                return Err(Error::AtTime {
                    time: t,
                    source: Box::new(Error::Internal(format!("non-positive time step {}", out.dt))),
                });
            }
            outflow = outflow + out.dt * (out.boundary_flux.1 - out.boundary_flux.0);
            cells = out.cells;
            // land exactly on the stop when the cap was active
            t = if stop - t <= out.dt { stop } else { t + out.dt };
            steps += 1;
        }
        diagnostics.record(stop, &cells, grid, config.window_cells, params);
        snapshots.push(Snapshot { time: stop, cells: cells.clone() });
    }
    Ok(SimResult { grid: *grid, snapshots, diagnostics, steps, initial_total, boundary_outflow: outflow })
}

/// Exact cell averages of `rho` at time `t` for the regular part of `sol`
/// (piecewise constant in `x`, so each average is a sum of exact pieces).
pub fn exact_rho_averages(sol: &RiemannSolution, grid: &Grid1D, t: f64) -> Vec<f64> {
    let speeds: Vec<f64> = match &sol.wave {
        Wave::Classical(f) => f.speeds.to_vec(),
        Wave::Delta(d) => vec![d.sigma],
    };
    let dx = grid.dx();
    (0..grid.ncells)
        .map(|i| {
            let (lo, hi) = (grid.edge(i), grid.edge(i + 1));
            let mut cuts = vec![lo];
            cuts.extend(speeds.iter().map(|s| s * t).filter(|x| *x > lo && *x < hi));
            cuts.push(hi);
            cuts.windows(2)
                .map(|w| {
                    let xi = 0.5 * (w[0] + w[1]) / t;
                    match sol.sample(xi) {
                        Sample::State { state, .. } => state.rho * (w[1] - w[0]),
                        Sample::DeltaCarrier { .. } => 0.0,
                    }
                })
                .sum::<f64>()
                / dx
        })
        .collect()
}

/// `sum |rho_i - rho_exact_i| dx` against exact cell averages.
pub fn l1_error_rho(cells: &[ConservedState], grid: &Grid1D, sol: &RiemannSolution, t: f64) -> Result<f64> {
    let exact = exact_rho_averages(sol, grid, t);
    let params = &sol.data.params;
    let dx = grid.dx();
    let mut err = 0.0;
    for (i, (u, e)) in cells.iter().zip(&exact).enumerate() {
        let s = from_conserved(u, params).map_err(|e| Error::Recovery { cell: i, source: Box::new(e) })?;
        err += (s.rho - e).abs() * dx;
    }
    Ok(err)
}

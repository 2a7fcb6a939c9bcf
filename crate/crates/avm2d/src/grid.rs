//! Structured mesh with one ghost layer, boundary fills, CFL time-step
//! control and the conservative forward-Euler update.

use rayon::prelude::*;

use crate::basis::{Family, Prepared};
use crate::error::{Error, Result};
use crate::flux1d::{avm_flux, estimate_edge_speeds, EdgeContext};
use crate::flux2d::{
    assemble_edge_flux, corner_flux, simpson_weights, speed_weights, CornerContext, CornerForm,
};
use crate::physics::{powell_jump_term, Axis, System};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost fill.
    Transmissive,
    /// Ghosts keep the values the initializer sampled there.
    InitialHold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    OneD,
    TwoD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assembly {
    Simpson,
    SpeedWeighted,
}

/// Cell-centered states on an nx x ny mesh padded by one ghost cell on each
/// side. Cell (i, j) with i in 1..=nx, j in 1..=ny is interior.
#[derive(Clone, Debug)]
pub struct Field<const N: usize> {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
    cells: Vec<State<N>>,
}

impl<const N: usize> Field<N> {
    /// Build a field over [x0, x1] x [y0, y1], sampling `init` at every
    /// cell center including the ghost layer.
    pub fn new(
        nx: usize,
        ny: usize,
        domain: (f64, f64, f64, f64),
        bc_x: Boundary,
        bc_y: Boundary,
        init: impl Fn(f64, f64) -> State<N>,
    ) -> Self {
        let (x0, x1, y0, y1) = domain;
        assert!(nx > 0 && ny > 0, "mesh must have at least one cell per axis");
        assert!(x1 > x0 && y1 > y0, "domain extents must be positive");
        let dx = (x1 - x0) / nx as f64;
        let dy = (y1 - y0) / ny as f64;
        let mut field = Field {
            nx,
            ny,
            dx,
            dy,
            x0,
            y0,
            bc_x,
            bc_y,
            cells: vec![State::ZERO; (nx + 2) * (ny + 2)],
        };
        for j in 0..=ny + 1 {
            let y = field.y_center(j);
            for i in 0..=nx + 1 {
                let x = field.x_center(i);
                field.cells[j * (nx + 2) + i] = init(x, y);
            }
        }
        field.fill_ghosts();
        field
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.x0 + (i as f64 - 0.5) * self.dx
    }

    pub fn y_center(&self, j: usize) -> f64 {
        self.y0 + (j as f64 - 0.5) * self.dy
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 2) + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &State<N> {
        &self.cells[self.idx(i, j)]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut State<N> {
        let k = self.idx(i, j);
        &mut self.cells[k]
    }

    /// Refresh the ghost layer, x sides first and then y rows across the
    /// full padded width so the diagonal corners pick up the x fill.
    pub fn fill_ghosts(&mut self) {
        let (nx, ny) = (self.nx, self.ny);
        match self.bc_x {
            Boundary::Periodic => {
                for j in 1..=ny {
                    *self.at_mut(0, j) = *self.at(nx, j);
                    *self.at_mut(nx + 1, j) = *self.at(1, j);
                }
            }
            Boundary::Transmissive => {
                for j in 1..=ny {
                    *self.at_mut(0, j) = *self.at(1, j);
                    *self.at_mut(nx + 1, j) = *self.at(nx, j);
                }
            }
            Boundary::InitialHold => {}
        }
        match self.bc_y {
            Boundary::Periodic => {
                for i in 0..=nx + 1 {
                    *self.at_mut(i, 0) = *self.at(i, ny);
                    *self.at_mut(i, ny + 1) = *self.at(i, 1);
                }
            }
            Boundary::Transmissive => {
                for i in 0..=nx + 1 {
                    *self.at_mut(i, 0) = *self.at(i, 1);
                    *self.at_mut(i, ny + 1) = *self.at(i, ny);
                }
            }
            Boundary::InitialHold => {}
        }
    }

    /// Componentwise sum over interior cells, accumulated in a fixed order.
    pub fn totals(&self) -> State<N> {
        let mut sum = State::ZERO;
        for j in 1..=self.ny {
            for i in 1..=self.nx {
                sum += *self.at(i, j);
            }
        }
        sum
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Per-step health report.
#[derive(Clone, Copy, Debug)]
pub struct StepDiagnostics {
    /// Simulation time after the step.
    pub time: f64,
    pub dt: f64,
    pub max_speed: f64,
    pub min_rho: f64,
    pub min_pressure: f64,
    /// Absent for systems without an induction pair.
    pub divergence_l1: Option<f64>,
    /// Corner evaluations that used the robust 1D fallback.
    pub fallbacks: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct CornerOut<const N: usize> {
    fx: State<N>,
    fy: State<N>,
    speeds: (f64, f64, f64, f64),
    fallbacks: u8,
}

/// Scratch buffers reused across steps.
#[derive(Default)]
pub struct Workspace<const N: usize> {
    x_pair: Vec<(f64, f64)>,
    y_pair: Vec<(f64, f64)>,
    corners: Vec<CornerOut<N>>,
    flux_x: Vec<State<N>>,
    flux_y: Vec<State<N>>,
    cleaning: Vec<State<N>>,
}

impl<const N: usize> Workspace<N> {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, nx: usize, ny: usize) {
        self.x_pair.resize((nx + 1) * (ny + 2), (0.0, 0.0));
        self.y_pair.resize((nx + 2) * (ny + 1), (0.0, 0.0));
        self.corners.resize((nx + 1) * (ny + 1), CornerOut::default());
        self.flux_x.resize((nx + 1) * ny, State::ZERO);
        self.flux_y.resize(nx * (ny + 1), State::ZERO);
        self.cleaning.resize(nx * ny, State::ZERO);
    }
}

/// A solver configuration bound to a physical system: basis family, spatial
/// mode, flux assembly, divergence cleaning and CFL number. The subsonic
/// corner form and the time-step ceiling are plain fields tuned after
/// construction.
pub struct Scheme<S, const N: usize> {
    pub system: S,
    pub family: Family,
    prepared: Prepared,
    pub mode: Mode,
    pub assembly: Assembly,
    pub corner: CornerForm,
    pub powell: bool,
    pub delta: f64,
    pub dt_max: f64,
}

impl<S: System<N> + Sync, const N: usize> Scheme<S, N> {
    pub fn new(
        system: S,
        family: Family,
        mode: Mode,
        assembly: Assembly,
        powell: bool,
        delta: f64,
    ) -> Result<Self> {
        let cap = match mode {
            Mode::TwoD => 1.0,
            Mode::OneD => 0.5,
        };
        if !(delta > 0.0 && delta <= cap) {
            return Err(Error::config(
                "cfl",
                format!(
                    "delta = {delta} out of range (0, {cap}] for {} mode",
                    match mode {
                        Mode::TwoD => "2d",
                        Mode::OneD => "1d",
                    }
                ),
            ));
        }
        if powell && system.induction_index(Axis::X).is_none() {
            return Err(Error::config(
                "divclean",
                "powell cleaning needs a system with an induction equation",
            ));
        }
        let prepared = family.prepare()?;
        Ok(Scheme {
            system,
            family,
            prepared,
            mode,
            assembly,
            corner: CornerForm::Transverse,
            powell,
            delta,
            dt_max: 1.0e6,
        })
    }

    /// Signal-speed bounds for every horizontal and vertical neighbor pair,
    /// including pairs along the ghost rows and columns (the corner
    /// contexts reach them).
    fn compute_pair_speeds(&self, field: &Field<N>, ws: &mut Workspace<N>) -> Result<()> {
        let nx = field.nx;
        let sys = &self.system;
        ws.x_pair
            .par_chunks_mut(nx + 1)
            .enumerate()
            .try_for_each(|(j, row)| -> Result<()> {
                for (k, slot) in row.iter_mut().enumerate() {
                    *slot = estimate_edge_speeds(sys, Axis::X, field.at(k, j), field.at(k + 1, j))
                        .map_err(|e| step_error(field, k, j, e))?;
                }
                Ok(())
            })?;
        ws.y_pair
            .par_chunks_mut(nx + 2)
            .enumerate()
            .try_for_each(|(l, row)| -> Result<()> {
                for (i, slot) in row.iter_mut().enumerate() {
                    *slot = estimate_edge_speeds(sys, Axis::Y, field.at(i, l), field.at(i, l + 1))
                        .map_err(|e| step_error(field, i, l, e))?;
                }
                Ok(())
            })?;
        Ok(())
    }

    /// dt = 2 delta * min over cells of (lambda_x/dx + lambda_y/dy)^{-1},
    /// with lambda aggregating every edge and (in 2D mode) corner fan speed
    /// touching the cell. Also returns the largest speed seen.
    fn dt_from_speeds(&self, field: &Field<N>, ws: &Workspace<N>) -> (f64, f64) {
        let (nx, ny) = (field.nx, field.ny);
        let xp = |k: usize, j: usize| ws.x_pair[j * (nx + 1) + k];
        let yp = |i: usize, l: usize| ws.y_pair[l * (nx + 2) + i];
        let fan = |p: (f64, f64)| p.0.abs().max(p.1.abs());
        let mut worst = 0.0f64;
        let mut max_speed = 0.0f64;
        for j in 1..=ny {
            for i in 1..=nx {
                let mut lx = fan(xp(i - 1, j)).max(fan(xp(i, j)));
                let mut ly = fan(yp(i, j - 1)).max(fan(yp(i, j)));
                if self.mode == Mode::TwoD {
                    for (ck, cl) in [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)] {
                        // Corner fans reduce the same pair estimates by
                        // min/max, so the extra rows/columns they touch are
                        // what matters here.
                        lx = lx.max(fan(xp(ck, cl))).max(fan(xp(ck, cl + 1)));
                        ly = ly.max(fan(yp(ck, cl))).max(fan(yp(ck + 1, cl)));
                    }
                }
                worst = worst.max(lx / field.dx + ly / field.dy);
                max_speed = max_speed.max(lx).max(ly);
            }
        }
        let dt = if worst > 0.0 {
            (2.0 * self.delta / worst).min(self.dt_max)
        } else {
            self.dt_max
        };
        (dt, max_speed)
    }

    /// Stand-alone CFL query on a field (ghosts are refreshed first).
    pub fn cfl_dt(&self, field: &mut Field<N>) -> Result<f64> {
        field.fill_ghosts();
        let mut ws = Workspace::new();
        ws.ensure(field.nx, field.ny);
        self.compute_pair_speeds(field, &mut ws)?;
        Ok(self.dt_from_speeds(field, &ws).0)
    }

    fn compute_corners(&self, field: &Field<N>, ws: &mut Workspace<N>) -> Result<()> {
        let nx = field.nx;
        let sys = &self.system;
        let prepared = &self.prepared;
        let form = self.corner;
        let powell = self.powell;
        let x_pair = &ws.x_pair;
        let y_pair = &ws.y_pair;
        ws.corners
            .par_chunks_mut(nx + 1)
            .enumerate()
            .try_for_each(|(l, row)| -> Result<()> {
                for (k, slot) in row.iter_mut().enumerate() {
                    let xd = x_pair[l * (nx + 1) + k];
                    let xu = x_pair[(l + 1) * (nx + 1) + k];
                    let yl = y_pair[l * (nx + 2) + k];
                    let yr = y_pair[l * (nx + 2) + k + 1];
                    let ctx = CornerContext {
                        u_ld: *field.at(k, l),
                        u_rd: *field.at(k + 1, l),
                        u_lu: *field.at(k, l + 1),
                        u_ru: *field.at(k + 1, l + 1),
                        s_l: xd.0.min(xu.0),
                        s_r: xd.1.max(xu.1),
                        s_d: yl.0.min(yr.0),
                        s_u: yl.1.max(yr.1),
                    };
                    let fx = corner_flux(sys, prepared, Axis::X, &ctx, form, powell)
                        .map_err(|e| step_error(field, k, l, e))?;
                    let fy = corner_flux(sys, prepared, Axis::Y, &ctx, form, powell)
                        .map_err(|e| step_error(field, k, l, e))?;
                    *slot = CornerOut {
                        fx: fx.flux,
                        fy: fy.flux,
                        speeds: (ctx.s_l, ctx.s_r, ctx.s_d, ctx.s_u),
                        fallbacks: fx.fallback as u8 + fy.fallback as u8,
                    };
                }
                Ok(())
            })
    }

    fn compute_edge_fluxes(&self, field: &Field<N>, ws: &mut Workspace<N>, dt: f64) -> Result<()> {
        let nx = field.nx;
        let sys = &self.system;
        let prepared = &self.prepared;
        let powell = self.powell;
        let two_d = self.mode == Mode::TwoD;
        let x_pair = &ws.x_pair;
        let y_pair = &ws.y_pair;
        let corners = &ws.corners;
        let corner_at = move |k: usize, l: usize| &corners[l * (nx + 1) + k];

        ws.flux_x
            .par_chunks_mut(nx + 1)
            .enumerate()
            .try_for_each(|(row, out)| -> Result<()> {
                let j = row + 1;
                for (k, slot) in out.iter_mut().enumerate() {
                    let (s0, s1) = x_pair[j * (nx + 1) + k];
                    let ctx =
                        EdgeContext::with_speeds(Axis::X, *field.at(k, j), *field.at(k + 1, j), s0, s1);
                    let oned = avm_flux(sys, prepared, &ctx, powell)
                        .map_err(|e| step_error(field, k, j, e))?;
                    *slot = if two_d {
                        let up = corner_at(k, j);
                        let down = corner_at(k, j - 1);
                        let weights = match self.assembly {
                            Assembly::Simpson => simpson_weights(),
                            Assembly::SpeedWeighted => {
                                speed_weights(up.speeds.2, down.speeds.3, dt, field.dy)
                            }
                        };
                        assemble_edge_flux(&up.fx, &oned, &down.fx, weights)
                            .map_err(|e| step_error(field, k, j, e))?
                    } else {
                        oned
                    };
                }
                Ok(())
            })?;

        ws.flux_y
            .par_chunks_mut(nx)
            .enumerate()
            .try_for_each(|(l, out)| -> Result<()> {
                for (col, slot) in out.iter_mut().enumerate() {
                    let i = col + 1;
                    let (s0, s1) = y_pair[l * (nx + 2) + i];
                    let ctx =
                        EdgeContext::with_speeds(Axis::Y, *field.at(i, l), *field.at(i, l + 1), s0, s1);
                    let oned = avm_flux(sys, prepared, &ctx, powell)
                        .map_err(|e| step_error(field, i, l, e))?;
                    *slot = if two_d {
                        let plus = corner_at(i, l);
                        let minus = corner_at(i - 1, l);
                        let weights = match self.assembly {
                            Assembly::Simpson => simpson_weights(),
                            Assembly::SpeedWeighted => {
                                speed_weights(plus.speeds.0, minus.speeds.1, dt, field.dx)
                            }
                        };
                        assemble_edge_flux(&plus.fy, &oned, &minus.fy, weights)
                            .map_err(|e| step_error(field, i, l, e))?
                    } else {
                        oned
                    };
                }
                Ok(())
            })
    }

    /// One forward-Euler update. `dt_cap` clips the CFL step (used to land
    /// exactly on output times); `time` is the state's current time.
    pub fn step(
        &self,
        field: &mut Field<N>,
        ws: &mut Workspace<N>,
        time: f64,
        dt_cap: f64,
    ) -> Result<StepDiagnostics> {
        let (nx, ny) = (field.nx, field.ny);
        ws.ensure(nx, ny);
        field.fill_ghosts();
        self.compute_pair_speeds(field, ws)?;
        let (mut dt, max_speed) = self.dt_from_speeds(field, ws);
        dt = dt.min(dt_cap);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::FailedStep {
                i: 0,
                j: 0,
                time,
                reason: format!("time step collapsed to {dt}"),
            });
        }
        if self.mode == Mode::TwoD {
            self.compute_corners(field, ws)?;
        }
        self.compute_edge_fluxes(field, ws, dt)?;

        // Fluctuation completion for the divergence cleaning: each modified
        // flux carries +1/2 of its interface's nonconservative jump, so the
        // flux difference alone enters the left and down halves with the
        // wrong sign. Adding the full left/down jumps per cell restores the
        // centered -(div B) S(U) balance of the eight-wave system.
        if self.powell {
            let sys = &self.system;
            let inv_dx = 1.0 / field.dx;
            let inv_dy = 1.0 / field.dy;
            ws.cleaning
                .par_chunks_mut(nx)
                .enumerate()
                .try_for_each(|(row, chunk)| -> Result<()> {
                    let j = row + 1;
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        let i = k + 1;
                        let jx = powell_jump_term(sys, Axis::X, field.at(i - 1, j), field.at(i, j))
                            .map_err(|e| step_error(field, i, j, e))?;
                        let jy = powell_jump_term(sys, Axis::Y, field.at(i, j - 1), field.at(i, j))
                            .map_err(|e| step_error(field, i, j, e))?;
                        *slot = jx * inv_dx + jy * inv_dy;
                    }
                    Ok(())
                })?;
        }

        let cx = dt / field.dx;
        let cy = dt / field.dy;
        for j in 1..=ny {
            for i in 1..=nx {
                let fx_r = ws.flux_x[(j - 1) * (nx + 1) + i];
                let fx_l = ws.flux_x[(j - 1) * (nx + 1) + i - 1];
                let fy_u = ws.flux_y[j * nx + i - 1];
                let fy_d = ws.flux_y[(j - 1) * nx + i - 1];
                let u = field.at_mut(i, j);
                *u = *u - (fx_r - fx_l) * cx - (fy_u - fy_d) * cy;
                if self.powell {
                    *u = *u - ws.cleaning[(j - 1) * nx + i - 1] * dt;
                }
            }
        }

        let mut min_rho = f64::INFINITY;
        let mut min_pressure = f64::INFINITY;
        for j in 1..=ny {
            for i in 1..=nx {
                let u = field.at(i, j);
                if let Err(e) = self.system.validate(u) {
                    return Err(Error::FailedStep {
                        i,
                        j,
                        time: time + dt,
                        reason: format!(
                            "unphysical state at cell center ({:.6}, {:.6}): {e}",
                            field.x_center(i),
                            field.y_center(j)
                        ),
                    });
                }
                min_rho = min_rho.min(u[0]);
                min_pressure = min_pressure.min(self.system.pressure(u));
            }
        }

        let fallbacks = if self.mode == Mode::TwoD {
            ws.corners.iter().map(|c| c.fallbacks as u64).sum()
        } else {
            0
        };
        let divergence_l1 = if self.system.induction_index(Axis::X).is_some() {
            field.fill_ghosts();
            Some(divergence_l1(&self.system, field)?)
        } else {
            None
        };

        Ok(StepDiagnostics {
            time: time + dt,
            dt,
            max_speed,
            min_rho,
            min_pressure,
            divergence_l1,
            fallbacks,
        })
    }

    /// March to `t_final`, invoking `on_snapshot` at each requested time
    /// (and at t_final if listed). Returns the per-step diagnostics series.
    pub fn run(
        &self,
        field: &mut Field<N>,
        t_final: f64,
        snapshot_times: &[f64],
        mut on_snapshot: impl FnMut(&Field<N>, f64) -> Result<()>,
    ) -> Result<Vec<StepDiagnostics>> {
        const MAX_STEPS: usize = 5_000_000;
        let tol = 1e-12 * t_final.abs().max(1.0);
        let mut events: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&t| t > tol && t < t_final - tol)
            .collect();
        events.push(t_final.max(0.0));
        events.sort_by(|a, b| a.partial_cmp(b).expect("snapshot times must not be NaN"));
        events.dedup_by(|a, b| (*a - *b).abs() <= tol);

        let wants = |t: f64| snapshot_times.iter().any(|&s| (s - t).abs() <= tol);

        let mut ws = Workspace::new();
        let mut diagnostics = Vec::new();
        let mut time = 0.0;
        if wants(0.0) {
            on_snapshot(field, 0.0)?;
        }
        for &event in &events {
            let mut guard = 0;
            while time < event - tol {
                let d = self.step(field, &mut ws, time, event - time)?;
                time = d.time;
                diagnostics.push(d);
                guard += 1;
                if guard > MAX_STEPS {
                    return Err(Error::FailedStep {
                        i: 0,
                        j: 0,
                        time,
                        reason: format!("exceeded {MAX_STEPS} steps before t = {event}"),
                    });
                }
            }
            time = event;
            if wants(event) {
                on_snapshot(field, event)?;
            }
        }
        Ok(diagnostics)
    }
}

fn step_error<const N: usize>(field: &Field<N>, i: usize, j: usize, e: Error) -> Error {
    match e {
        Error::FailedStep { .. } => e,
        other => Error::FailedStep {
            i,
            j,
            time: f64::NAN,
            reason: format!(
                "flux evaluation near ({:.6}, {:.6}) failed: {other}",
                field.x_center(i),
                field.y_center(j)
            ),
        },
    }
}

/// L1 norm of the centered-difference divergence of the in-plane magnetic
/// field over the interior, scaled by the cell area. Requires valid ghosts.
pub fn divergence_l1<S: System<N>, const N: usize>(sys: &S, field: &Field<N>) -> Result<f64> {
    let (bx, by) = match (sys.induction_index(Axis::X), sys.induction_index(Axis::Y)) {
        (Some(bx), Some(by)) => (bx, by),
        _ => {
            return Err(Error::UnsupportedSystem(
                "divergence diagnostic needs induction components".into(),
            ))
        }
    };
    let mut total = 0.0;
    for j in 1..=field.ny {
        for i in 1..=field.nx {
            let ddx = (field.at(i + 1, j)[bx] - field.at(i - 1, j)[bx]) / (2.0 * field.dx);
            let ddy = (field.at(i, j + 1)[by] - field.at(i, j - 1)[by]) / (2.0 * field.dy);
            total += (ddx + ddy).abs();
        }
    }
    Ok(total * field.cell_area())
}

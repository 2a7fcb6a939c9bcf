//! Compressible Euler equations, conserved variables (rho, rho vx, rho vy, E).

use super::{Axis, System};
use crate::error::{Error, Result};
use crate::smallmat::SmallMatrix;
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Euler {
    pub gamma: f64,
}

impl Euler {
    pub fn new(gamma: f64) -> Self {
        Euler { gamma }
    }

    pub fn from_primitive(&self, rho: f64, vx: f64, vy: f64, p: f64) -> State<4> {
        let e = p / (self.gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy);
        State::new([rho, rho * vx, rho * vy, e])
    }

    pub fn sound_speed(&self, u: &State<4>) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    pub fn velocity(&self, u: &State<4>, axis: Axis) -> f64 {
        match axis {
            Axis::X => u[1] / u[0],
            Axis::Y => u[2] / u[0],
        }
    }

    /// Mach number |v| / a.
    pub fn mach(&self, u: &State<4>) -> f64 {
        let v = (u[1] * u[1] + u[2] * u[2]).sqrt() / u[0];
        v / self.sound_speed(u)
    }
}

impl System<4> for Euler {
    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn flux(&self, axis: Axis, u: &State<4>) -> State<4> {
        let p = self.pressure(u);
        let rho = u[0];
        match axis {
            Axis::X => {
                let vx = u[1] / rho;
                State::new([u[1], u[1] * vx + p, u[2] * vx, (u[3] + p) * vx])
            }
            Axis::Y => {
                let vy = u[2] / rho;
                State::new([u[2], u[1] * vy, u[2] * vy + p, (u[3] + p) * vy])
            }
        }
    }

    fn jacobian(&self, axis: Axis, u: &State<4>) -> SmallMatrix<4> {
        match axis {
            Axis::X => jacobian_x(self.gamma, u),
            Axis::Y => {
                let swapped = self.swap_axes(u);
                let a = jacobian_x(self.gamma, &swapped);
                permute_swap(&a)
            }
        }
    }

    fn wave_bounds(&self, axis: Axis, u: &State<4>) -> Result<(f64, f64)> {
        self.validate(u)?;
        let v = self.velocity(u, axis);
        let a = self.sound_speed(u);
        Ok((v - a, v + a))
    }

    fn transverse_flux(&self, axis: Axis, u: &State<4>, other_flux: &State<4>) -> State<4> {
        let g = other_flux;
        match axis {
            Axis::X => State::new([
                u[1],
                g[2] + (u[1] * u[1] - u[2] * u[2]) / u[0],
                g[1],
                (u[1] / u[0]) * (u[3] + g[2] - u[2] * u[2] / u[0]),
            ]),
            Axis::Y => State::new([
                u[2],
                g[2],
                g[1] + (u[2] * u[2] - u[1] * u[1]) / u[0],
                (u[2] / u[0]) * (u[3] + g[1] - u[1] * u[1] / u[0]),
            ]),
        }
    }

    fn swap_axes(&self, u: &State<4>) -> State<4> {
        State::new([u[0], u[2], u[1], u[3]])
    }

    fn pressure(&self, u: &State<4>) -> f64 {
        (self.gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0])
    }

    fn validate(&self, u: &State<4>) -> Result<()> {
        if !u.is_finite() {
            return Err(Error::InvalidState("non-finite state".into()));
        }
        if u[0] <= 0.0 {
            return Err(Error::InvalidState(format!("density {} <= 0", u[0])));
        }
        let p = self.pressure(u);
        if p <= 0.0 {
            return Err(Error::InvalidState(format!("pressure {p} <= 0")));
        }
        Ok(())
    }

    fn powell_source(&self, _u: &State<4>) -> Result<State<4>> {
        Err(Error::UnsupportedSystem(
            "divergence cleaning needs magnetic fields".into(),
        ))
    }

    fn induction_index(&self, _axis: Axis) -> Option<usize> {
        None
    }
}

fn jacobian_x(gamma: f64, u: &State<4>) -> SmallMatrix<4> {
    let g1 = gamma - 1.0;
    let rho = u[0];
    let m = u[1];
    let n = u[2];
    let e = u[3];
    let vx = m / rho;
    let vy = n / rho;
    let q2 = vx * vx + vy * vy;
    let p = g1 * (e - 0.5 * rho * q2);
    let h = (e + p) / rho;
    SmallMatrix {
        m: [
            [0.0, 1.0, 0.0, 0.0],
            [
                0.5 * g1 * q2 - vx * vx,
                (2.0 - g1) * vx,
                -g1 * vy,
                g1,
            ],
            [-vx * vy, vy, vx, 0.0],
            [
                vx * (0.5 * g1 * q2 - h),
                h - g1 * vx * vx,
                -g1 * vx * vy,
                gamma * vx,
            ],
        ],
    }
}

/// Conjugate a matrix by the x/y component swap (rows and columns 1 and 2).
pub(super) fn permute_swap(a: &SmallMatrix<4>) -> SmallMatrix<4> {
    let idx = [0usize, 2, 1, 3];
    let mut out = SmallMatrix::ZERO;
    for i in 0..4 {
        for j in 0..4 {
            out.m[i][j] = a.m[idx[i]][idx[j]];
        }
    }
    out
}

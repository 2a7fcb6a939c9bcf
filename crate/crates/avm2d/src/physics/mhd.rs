//! Ideal MHD, conserved variables (rho, rho v, B, E) with
//! E = rho eps + rho v^2 / 2 + B^2 / 2 and total pressure P* = P + B^2 / 2.

use super::{Axis, System};
use crate::error::{Error, Result};
use crate::smallmat::SmallMatrix;
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mhd {
    pub gamma: f64,
}

impl Mhd {
    pub fn new(gamma: f64) -> Self {
        Mhd { gamma }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_primitive(
        &self,
        rho: f64,
        v: [f64; 3],
        b: [f64; 3],
        p: f64,
    ) -> State<8> {
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let b2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        let e = p / (self.gamma - 1.0) + 0.5 * rho * v2 + 0.5 * b2;
        State::new([
            rho,
            rho * v[0],
            rho * v[1],
            rho * v[2],
            b[0],
            b[1],
            b[2],
            e,
        ])
    }

    pub fn sound_speed(&self, u: &State<8>) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    /// Fast magnetosonic speed along `axis`.
    pub fn fast_speed(&self, axis: Axis, u: &State<8>) -> f64 {
        let rho = u[0];
        let a2 = self.gamma * self.pressure(u) / rho;
        let b2 = (u[4] * u[4] + u[5] * u[5] + u[6] * u[6]) / rho;
        let bn2 = match axis {
            Axis::X => u[4] * u[4],
            Axis::Y => u[5] * u[5],
        } / rho;
        let s = a2 + b2;
        let disc = (s * s - 4.0 * a2 * bn2).max(0.0);
        (0.5 * (s + disc.sqrt())).sqrt()
    }

    pub fn velocity(&self, u: &State<8>, axis: Axis) -> f64 {
        match axis {
            Axis::X => u[1] / u[0],
            Axis::Y => u[2] / u[0],
        }
    }

    /// Sonic Mach number |v| / a.
    pub fn mach(&self, u: &State<8>) -> f64 {
        let v = (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]).sqrt() / u[0];
        v / self.sound_speed(u)
    }

    pub fn magnetic_pressure(&self, u: &State<8>) -> f64 {
        0.5 * (u[4] * u[4] + u[5] * u[5] + u[6] * u[6])
    }
}

impl System<8> for Mhd {
    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn flux(&self, axis: Axis, u: &State<8>) -> State<8> {
        let rho = u[0];
        let (m1, m2, m3) = (u[1], u[2], u[3]);
        let (b1, b2, b3) = (u[4], u[5], u[6]);
        let e = u[7];
        let ps = self.pressure(u) + 0.5 * (b1 * b1 + b2 * b2 + b3 * b3);
        let mdotb = m1 * b1 + m2 * b2 + m3 * b3;
        match axis {
            Axis::X => {
                let v1 = m1 / rho;
                State::new([
                    m1,
                    m1 * v1 + ps - b1 * b1,
                    m2 * v1 - b1 * b2,
                    m3 * v1 - b1 * b3,
                    0.0,
                    (m1 * b2 - m2 * b1) / rho,
                    (m1 * b3 - m3 * b1) / rho,
                    (e + ps) * v1 - b1 * mdotb / rho,
                ])
            }
            Axis::Y => {
                let v2 = m2 / rho;
                State::new([
                    m2,
                    m1 * v2 - b2 * b1,
                    m2 * v2 + ps - b2 * b2,
                    m3 * v2 - b2 * b3,
                    (m2 * b1 - m1 * b2) / rho,
                    0.0,
                    (m2 * b3 - m3 * b2) / rho,
                    (e + ps) * v2 - b2 * mdotb / rho,
                ])
            }
        }
    }

    fn jacobian(&self, axis: Axis, u: &State<8>) -> SmallMatrix<8> {
        match axis {
            Axis::X => jacobian_x(self.gamma, u),
            Axis::Y => {
                let swapped = self.swap_axes(u);
                let a = jacobian_x(self.gamma, &swapped);
                permute_swap(&a)
            }
        }
    }

    fn wave_bounds(&self, axis: Axis, u: &State<8>) -> Result<(f64, f64)> {
        self.validate(u)?;
        let v = self.velocity(u, axis);
        let cf = self.fast_speed(axis, u);
        Ok((v - cf, v + cf))
    }

    fn transverse_flux(&self, axis: Axis, u: &State<8>, other_flux: &State<8>) -> State<8> {
        match axis {
            Axis::X => {
                let g = other_flux;
                State::new([
                    u[1],
                    g[2] + (u[1] * u[1] - u[2] * u[2]) / u[0] + u[5] * u[5] - u[4] * u[4],
                    g[1],
                    u[1] * u[3] / u[0] - u[4] * u[6],
                    0.0,
                    (u[1] * u[5] - u[2] * u[4]) / u[0],
                    (u[1] * u[6] - u[3] * u[4]) / u[0],
                    (u[1] / u[0]) * (u[7] + g[2] - u[2] * u[2] / u[0] + u[5] * u[5])
                        - (u[4] / u[0]) * (u[1] * u[4] + u[2] * u[5] + u[3] * u[6]),
                ])
            }
            Axis::Y => {
                let f = other_flux;
                State::new([
                    u[2],
                    f[2],
                    f[1] + (u[2] * u[2] - u[1] * u[1]) / u[0] + u[4] * u[4] - u[5] * u[5],
                    u[2] * u[3] / u[0] - u[5] * u[6],
                    (u[2] * u[4] - u[1] * u[5]) / u[0],
                    0.0,
                    (u[2] * u[6] - u[3] * u[5]) / u[0],
                    (u[2] / u[0]) * (u[7] + f[1] - u[1] * u[1] / u[0] + u[4] * u[4])
                        - (u[5] / u[0]) * (u[2] * u[5] + u[1] * u[4] + u[3] * u[6]),
                ])
            }
        }
    }

    fn swap_axes(&self, u: &State<8>) -> State<8> {
        State::new([u[0], u[2], u[1], u[3], u[5], u[4], u[6], u[7]])
    }

    fn pressure(&self, u: &State<8>) -> f64 {
        let kinetic = 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / u[0];
        let magnetic = 0.5 * (u[4] * u[4] + u[5] * u[5] + u[6] * u[6]);
        (self.gamma - 1.0) * (u[7] - kinetic - magnetic)
    }

    fn validate(&self, u: &State<8>) -> Result<()> {
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

    fn powell_source(&self, u: &State<8>) -> Result<State<8>> {
        let rho = u[0];
        let (v1, v2, v3) = (u[1] / rho, u[2] / rho, u[3] / rho);
        let (b1, b2, b3) = (u[4], u[5], u[6]);
        Ok(State::new([
            0.0,
            b1,
            b2,
            b3,
            v1,
            v2,
            v3,
            v1 * b1 + v2 * b2 + v3 * b3,
        ]))
    }

    fn induction_index(&self, axis: Axis) -> Option<usize> {
        Some(match axis {
            Axis::X => 4,
            Axis::Y => 5,
        })
    }
}

fn jacobian_x(gamma: f64, u: &State<8>) -> SmallMatrix<8> {
    let g1 = gamma - 1.0;
    let rho = u[0];
    let (m1, m2, m3) = (u[1], u[2], u[3]);
    let (b1, b2, b3) = (u[4], u[5], u[6]);
    let e = u[7];
    let (v1, v2, v3) = (m1 / rho, m2 / rho, m3 / rho);
    let q2 = v1 * v1 + v2 * v2 + v3 * v3;
    let b2sum = b1 * b1 + b2 * b2 + b3 * b3;
    let p = g1 * (e - 0.5 * rho * q2 - 0.5 * b2sum);
    let ps = p + 0.5 * b2sum;
    let hs = (e + ps) / rho;
    let vdotb = v1 * b1 + v2 * b2 + v3 * b3;
    SmallMatrix {
        m: [
            [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [
                0.5 * g1 * q2 - v1 * v1,
                (2.0 - g1) * v1,
                -g1 * v2,
                -g1 * v3,
                -gamma * b1,
                (2.0 - gamma) * b2,
                (2.0 - gamma) * b3,
                g1,
            ],
            [-v1 * v2, v2, v1, 0.0, -b2, -b1, 0.0, 0.0],
            [-v1 * v3, v3, 0.0, v1, -b3, 0.0, -b1, 0.0],
            [0.0; 8],
            [
                -(v1 * b2 - v2 * b1) / rho,
                b2 / rho,
                -b1 / rho,
                0.0,
                -v2,
                v1,
                0.0,
                0.0,
            ],
            [
                -(v1 * b3 - v3 * b1) / rho,
                b3 / rho,
                0.0,
                -b1 / rho,
                -v3,
                0.0,
                v1,
                0.0,
            ],
            [
                v1 * (0.5 * g1 * q2 - hs) + b1 * vdotb / rho,
                hs - g1 * v1 * v1 - b1 * b1 / rho,
                -g1 * v1 * v2 - b1 * b2 / rho,
                -g1 * v1 * v3 - b1 * b3 / rho,
                (1.0 - gamma) * v1 * b1 - vdotb,
                (2.0 - gamma) * v1 * b2 - b1 * v2,
                (2.0 - gamma) * v1 * b3 - b1 * v3,
                gamma * v1,
            ],
        ],
    }
}

/// Conjugate by the x/y swap of momentum and induction components.
fn permute_swap(a: &SmallMatrix<8>) -> SmallMatrix<8> {
    let idx = [0usize, 2, 1, 3, 5, 4, 6, 7];
    let mut out = SmallMatrix::ZERO;
    for i in 0..8 {
        for j in 0..8 {
            out.m[i][j] = a.m[idx[i]][idx[j]];
        }
    }
    out
}

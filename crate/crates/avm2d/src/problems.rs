//! The five benchmark problems: initial data, exact references, error
//! norms and line cuts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field};
use crate::physics::euler::Euler;
use crate::physics::mhd::Mhd;
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    /// Smooth advected density wave with an exact solution.
    Accuracy,
    /// Doubly periodic MHD vortex that develops shocks.
    OrszagTang,
    /// Dense rotating disk embedded in a magnetized ambient fluid.
    Rotor,
    /// Four-quadrant MHD Riemann problem.
    Riemann2d,
    /// Overpressured circular region, three magnetic field strengths.
    ExplosionB0,
    ExplosionB5,
    ExplosionB50,
}

pub const ALL_PROBLEMS: [Problem; 7] = [
    Problem::Accuracy,
    Problem::OrszagTang,
    Problem::Rotor,
    Problem::Riemann2d,
    Problem::ExplosionB0,
    Problem::ExplosionB5,
    Problem::ExplosionB50,
];

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Accuracy => "accuracy",
            Problem::OrszagTang => "orszag-tang",
            Problem::Rotor => "rotor",
            Problem::Riemann2d => "riemann2d",
            Problem::ExplosionB0 => "explosion-b0",
            Problem::ExplosionB5 => "explosion-b5",
            Problem::ExplosionB50 => "explosion-b50",
        }
    }

    pub fn gamma(self) -> f64 {
        match self {
            Problem::Accuracy => 1.4,
            Problem::OrszagTang | Problem::Rotor | Problem::Riemann2d => 5.0 / 3.0,
            _ => 2.0,
        }
    }

    pub fn domain(self) -> (f64, f64, f64, f64) {
        match self {
            Problem::Accuracy | Problem::Riemann2d => (-1.0, 1.0, -1.0, 1.0),
            Problem::OrszagTang => (0.0, 2.0 * PI, 0.0, 2.0 * PI),
            Problem::Rotor => (0.0, 1.0, 0.0, 1.0),
            _ => (-50.0, 50.0, -50.0, 50.0),
        }
    }

    pub fn boundaries(self) -> (Boundary, Boundary) {
        match self {
            Problem::Accuracy | Problem::OrszagTang => (Boundary::Periodic, Boundary::Periodic),
            // The four-quadrant problem asks for zero normal gradients,
            // which the transmissive fill provides.
            _ => (Boundary::Transmissive, Boundary::Transmissive),
        }
    }

    pub fn t_final(self) -> f64 {
        match self {
            Problem::Accuracy => 4.0,
            Problem::OrszagTang => PI,
            Problem::Rotor => 0.295,
            Problem::Riemann2d => 0.2,
            Problem::ExplosionB0 | Problem::ExplosionB5 => 3.0,
            Problem::ExplosionB50 => 1.05,
        }
    }

    pub fn default_mesh(self) -> (usize, usize) {
        match self {
            Problem::Accuracy => (100, 100),
            Problem::ExplosionB0 | Problem::ExplosionB5 | Problem::ExplosionB50 => (400, 400),
            _ => (200, 200),
        }
    }

    /// Only the accuracy test runs on the four-variable gas system.
    pub fn is_euler(self) -> bool {
        self == Problem::Accuracy
    }

    pub fn explosion_b(self) -> Option<[f64; 3]> {
        let s = PI.sqrt();
        match self {
            Problem::ExplosionB0 => Some([0.0, 0.0, 0.0]),
            Problem::ExplosionB5 => Some([0.0, 5.0 / s, 0.0]),
            Problem::ExplosionB50 => Some([0.0, 50.0 / s, 0.0]),
            _ => None,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_PROBLEMS
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "problem",
                    format!(
                        "unknown problem '{s}', expected one of: {}",
                        ALL_PROBLEMS.map(|p| p.name()).join(", ")
                    ),
                )
            })
    }
}

/// Density wave advected with v = (1, -1/2) at unit pressure.
pub fn exact_accuracy(x: f64, y: f64, t: f64) -> State<4> {
    let sys = Euler::new(Problem::Accuracy.gamma());
    let rho = 1.0 + 0.2 * (PI * (x + y - 0.5 * t)).sin();
    sys.from_primitive(rho, 1.0, -0.5, 1.0)
}

pub fn init_accuracy(x: f64, y: f64) -> State<4> {
    exact_accuracy(x, y, 0.0)
}

pub fn init_orszag_tang(x: f64, y: f64) -> State<8> {
    let gamma = Problem::OrszagTang.gamma();
    let sys = Mhd::new(gamma);
    sys.from_primitive(
        gamma * gamma,
        [-y.sin(), x.sin(), 0.0],
        [-y.sin(), (2.0 * x).sin(), 0.0],
        gamma,
    )
}

pub fn init_rotor(x: f64, y: f64) -> State<8> {
    const R0: f64 = 0.1;
    const R1: f64 = 0.115;
    let sys = Mhd::new(Problem::Rotor.gamma());
    let (cx, cy) = (x - 0.5, y - 0.5);
    let r = cx.hypot(cy);
    let (rho, vx, vy) = if r < R0 {
        (10.0, -cy / R0, cx / R0)
    } else if r < R1 {
        let f = (R1 - r) / (R1 - R0);
        (1.0 + 9.0 * f, -cy * f / r, cx * f / r)
    } else {
        (1.0, 0.0, 0.0)
    };
    let bx = 2.5 / (4.0 * PI).sqrt();
    sys.from_primitive(rho, [vx, vy, 0.0], [bx, 0.0, 0.0], 0.5)
}

/// Quadrant states are tabulated directly in conserved variables.
pub fn init_riemann2d(x: f64, y: f64) -> State<8> {
    let q1 = State([0.9308, 1.4557, -0.4633, 0.0575, 0.3501, 0.9830, 0.3050, 5.0838]);
    let q2 = State([1.0304, 1.5774, -1.0455, -0.1016, 0.3501, 0.5078, 0.1576, 5.7813]);
    let q3 = State([1.0000, 1.7500, -1.0000, 0.0000, 0.5642, 0.5078, 0.2539, 6.0000]);
    let q4 = State([1.8887, 0.2334, -1.7422, 0.0733, 0.5642, 0.9830, 0.4915, 12.999]);
    match (x > 0.0, y > 0.0) {
        (true, true) => q1,
        (false, true) => q2,
        (false, false) => q3,
        (true, false) => q4,
    }
}

pub fn init_explosion(x: f64, y: f64, b: [f64; 3]) -> State<8> {
    let sys = Mhd::new(2.0);
    let p = if x.hypot(y) < 10.0 { 100.0 } else { 1.0 };
    sys.from_primitive(1.0, [0.0; 3], b, p)
}

pub fn euler_field(problem: Problem, nx: usize, ny: usize) -> Result<Field<4>> {
    if !problem.is_euler() {
        return Err(Error::InvalidParameter(format!(
            "problem '{problem}' needs the magnetized system"
        )));
    }
    let (bx, by) = problem.boundaries();
    Ok(Field::new(nx, ny, problem.domain(), bx, by, init_accuracy))
}

pub fn mhd_field(problem: Problem, nx: usize, ny: usize) -> Result<Field<8>> {
    let (bx, by) = problem.boundaries();
    let init: Box<dyn Fn(f64, f64) -> State<8>> = match problem {
        Problem::Accuracy => {
            return Err(Error::InvalidParameter(
                "problem 'accuracy' runs on the gas system".into(),
            ))
        }
        Problem::OrszagTang => Box::new(init_orszag_tang),
        Problem::Rotor => Box::new(init_rotor),
        Problem::Riemann2d => Box::new(init_riemann2d),
        _ => {
            let b = problem.explosion_b().expect("explosion variant");
            Box::new(move |x, y| init_explosion(x, y, b))
        }
    };
    Ok(Field::new(nx, ny, problem.domain(), bx, by, |x, y| init(x, y)))
}

/// L1 norm of the difference between one component and a reference
/// function, summed over interior cells and scaled by the cell area.
pub fn l1_error<const N: usize>(
    field: &Field<N>,
    component: usize,
    exact: impl Fn(f64, f64) -> f64,
) -> f64 {
    let mut total = 0.0;
    for j in 1..=field.ny {
        let y = field.y_center(j);
        for i in 1..=field.nx {
            let x = field.x_center(i);
            total += (field.at(i, j)[component] - exact(x, y)).abs();
        }
    }
    total * field.cell_area()
}

/// Values along the main diagonal, keyed by arclength from the lower-left
/// domain corner.
pub fn diagonal_cut<const N: usize>(field: &Field<N>, component: usize) -> Result<Vec<(f64, f64)>> {
    if field.nx != field.ny {
        return Err(Error::InvalidParameter(format!(
            "diagonal cut needs a square mesh, got {}x{}",
            field.nx, field.ny
        )));
    }
    let step = field.dx.hypot(field.dy);
    Ok((1..=field.nx)
        .map(|i| ((i as f64 - 0.5) * step, field.at(i, i)[component]))
        .collect())
}

/// Values along the mesh row nearest to y = value, keyed by x.
pub fn row_cut<const N: usize>(field: &Field<N>, y: f64, component: usize) -> Vec<(f64, f64)> {
    let j = nearest_index(y, field.y0, field.dy, field.ny);
    (1..=field.nx)
        .map(|i| (field.x_center(i), field.at(i, j)[component]))
        .collect()
}

/// Values along the mesh column nearest to x = value, keyed by y.
pub fn column_cut<const N: usize>(field: &Field<N>, x: f64, component: usize) -> Vec<(f64, f64)> {
    let i = nearest_index(x, field.x0, field.dx, field.nx);
    (1..=field.ny)
        .map(|j| (field.y_center(j), field.at(i, j)[component]))
        .collect()
}

fn nearest_index(value: f64, origin: f64, h: f64, n: usize) -> usize {
    let raw = ((value - origin) / h + 0.5).round() as isize;
    raw.clamp(1, n as isize) as usize
}

//! Physical models: compressible Euler (4 conserved variables) and ideal
//! MHD (8 conserved variables), plus the trait the flux machinery is
//! generic over.

use crate::error::Result;
use crate::smallmat::SmallMatrix;
use crate::state::State;

pub mod euler;
pub mod mhd;

pub use euler::Euler;
pub use mhd::Mhd;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// A hyperbolic system in two space dimensions with fluxes F (x) and G (y).
///
/// `transverse_flux` rebuilds the flux in the given direction from an
/// intermediate state together with the already-computed flux in the *other*
/// direction; it is the closure that makes the corner solver work. On an
/// exact state U with the exact transverse flux it reproduces flux(axis, U).
pub trait System<const N: usize>: Copy + Send + Sync {
    fn gamma(&self) -> f64;

    /// Physical flux along `axis`.
    fn flux(&self, axis: Axis, u: &State<N>) -> State<N>;

    /// Analytic Jacobian of the flux along `axis`.
    fn jacobian(&self, axis: Axis, u: &State<N>) -> SmallMatrix<N>;

    /// Slowest and fastest characteristic speeds along `axis`:
    /// (v_a - c, v_a + c) with c the relevant acoustic/fast speed.
    fn wave_bounds(&self, axis: Axis, u: &State<N>) -> Result<(f64, f64)>;

    /// Flux along `axis` reconstructed from an intermediate state and the
    /// flux of the same state in the perpendicular direction.
    fn transverse_flux(&self, axis: Axis, u: &State<N>, other_flux: &State<N>) -> State<N>;

    /// Mirror the state across the diagonal (swap the roles of x and y).
    fn swap_axes(&self, u: &State<N>) -> State<N>;

    /// Thermal pressure.
    fn pressure(&self, u: &State<N>) -> f64;

    /// Err when density or pressure is not strictly positive.
    fn validate(&self, u: &State<N>) -> Result<()>;

    /// Nonconservative source direction S(U) for divergence cleaning;
    /// systems without magnetic fields reject it.
    fn powell_source(&self, u: &State<N>) -> Result<State<N>>;

    /// Index of the magnetic field component normal to `axis`, if any.
    fn induction_index(&self, axis: Axis) -> Option<usize>;
}

/// Jump contribution of the divergence-cleaning terms across an interface:
/// (B_n(U1) - B_n(U0)) * S(U_avg) with n normal to `axis`.
pub fn powell_jump_term<const N: usize, S: System<N>>(
    sys: &S,
    axis: Axis,
    u0: &State<N>,
    u1: &State<N>,
) -> Result<State<N>> {
    let idx = sys.induction_index(axis).ok_or_else(|| {
        crate::error::Error::UnsupportedSystem("divergence cleaning needs magnetic fields".into())
    })?;
    let avg = (*u0 + *u1) * 0.5;
    let s = sys.powell_source(&avg)?;
    Ok(s * (u1[idx] - u0[idx]))
}

/// Divergence-cleaning terms linearized at an interface: the rank-one block
/// S(U) e_n^T that augments the flux Jacobian, where e_n picks the magnetic
/// field component normal to the interface.
///
/// The cleaned system is nonconservative, so the upwinding has to see the
/// augmented matrix, not just the conservative Jacobian; otherwise the flux
/// leaks part of the cleaning terms against the wind and strong magnetized
/// shocks drive the pressure negative.
pub struct Cleaning<const N: usize> {
    pub source: State<N>,
    pub column: usize,
}

impl<const N: usize> Cleaning<N> {
    /// Linearize at `u`, typically the arithmetic mean of the two sides.
    pub fn at<S: System<N>>(sys: &S, axis: Axis, u: &State<N>) -> Result<Self> {
        let column = sys.induction_index(axis).ok_or_else(|| {
            crate::error::Error::UnsupportedSystem(
                "divergence cleaning needs magnetic fields".into(),
            )
        })?;
        Ok(Cleaning { source: sys.powell_source(u)?, column })
    }

    /// S(U) (B_n(u1) - B_n(u0)), the cleaning share of the interface jump.
    pub fn jump(&self, u0: &State<N>, u1: &State<N>) -> State<N> {
        self.source * (u1[self.column] - u0[self.column])
    }

    /// Add S(U) e_n^T onto a Jacobian in place.
    pub fn add_to(&self, a: &mut SmallMatrix<N>) {
        for r in 0..N {
            a.m[r][self.column] += self.source[r];
        }
    }
}

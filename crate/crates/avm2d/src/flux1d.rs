//! One-dimensional AVM edge fluxes and HLL intermediate states.

use crate::basis::{hll_linear_coeffs, widen_fan, Prepared};
use crate::error::{Error, Result};
use crate::physics::{powell_jump_term, Axis, Cleaning, System};
use crate::smallmat::{
    apply_even_desc, mat_internal_recursive, mat_rational, rational_apply_depth1, SmallMatrix,
};
use crate::state::State;

/// Everything one interface flux evaluation needs.
#[derive(Clone, Copy, Debug)]
pub struct EdgeContext<const N: usize> {
    pub u0: State<N>,
    pub u1: State<N>,
    pub axis: Axis,
    pub s0: f64,
    pub s1: f64,
    pub lambda_max: f64,
}

impl<const N: usize> EdgeContext<N> {
    /// Context with speeds estimated from the pair itself.
    pub fn from_pair<S: System<N>>(
        sys: &S,
        axis: Axis,
        u0: State<N>,
        u1: State<N>,
    ) -> Result<Self> {
        let (s0, s1) = estimate_edge_speeds(sys, axis, &u0, &u1)?;
        Ok(Self::with_speeds(axis, u0, u1, s0, s1))
    }

    /// Context with externally supplied speeds (the corner solver reuses
    /// its four-wave speeds here). Collapsed fans are widened.
    pub fn with_speeds(axis: Axis, u0: State<N>, u1: State<N>, s0: f64, s1: f64) -> Self {
        let (s0, s1) = widen_fan(s0, s1);
        EdgeContext {
            u0,
            u1,
            axis,
            s0,
            s1,
            lambda_max: s0.abs().max(s1.abs()),
        }
    }
}

/// Left/right signal speed estimates: the extreme eigenvalues of the two
/// states themselves, widened by the eigenvalues at the arithmetic mean.
pub fn estimate_edge_speeds<S: System<N>, const N: usize>(
    sys: &S,
    axis: Axis,
    u0: &State<N>,
    u1: &State<N>,
) -> Result<(f64, f64)> {
    let mean = (*u0 + *u1) * 0.5;
    let (l0, _) = sys.wave_bounds(axis, u0)?;
    let (_, r1) = sys.wave_bounds(axis, u1)?;
    let (lm, rm) = sys.wave_bounds(axis, &mean)?;
    Ok((l0.min(lm), r1.max(rm)))
}

/// HLL intermediate state plus a physicality flag (positive first
/// component, i.e. density for the built-in systems). Callers decide how to
/// treat an unphysical state.
#[derive(Clone, Copy, Debug)]
pub struct HllState<const N: usize> {
    pub state: State<N>,
    pub physical: bool,
}

/// Single intermediate state of the two-wave fan. With `powell` on the
/// numerator is corrected by the nonconservative jump term so the state
/// stays consistent with the modified fluxes.
pub fn hll_state<S: System<N>, const N: usize>(
    sys: &S,
    axis: Axis,
    u0: &State<N>,
    u1: &State<N>,
    s0: f64,
    s1: f64,
    powell: bool,
) -> Result<HllState<N>> {
    let (s0, s1) = widen_fan(s0, s1);
    let f0 = sys.flux(axis, u0);
    let f1 = sys.flux(axis, u1);
    let mut num = *u1 * s1 - *u0 * s0 + f0 - f1;
    if powell {
        num -= powell_jump_term(sys, axis, u0, u1)?;
    }
    let state = num * (1.0 / (s1 - s0));
    Ok(HllState {
        physical: state[0] > 0.0,
        state,
    })
}

/// Action of the viscosity matrix on a jump.
///
/// The linear basis consumes the physical flux difference directly, which
/// is exactly the dissipation the classical HLL flux carries; the
/// polynomial and rational bases act on the state jump through the Jacobian
/// argument, built lazily since the linear path never needs it.
pub fn viscosity_jump<const N: usize>(
    prepared: &Prepared,
    jacobian: impl FnOnce() -> SmallMatrix<N>,
    lambda_max: f64,
    speeds: (f64, f64),
    du: &State<N>,
    df: &State<N>,
) -> Result<State<N>> {
    if let Prepared::Linear = prepared {
        let (a0, a1) = hll_linear_coeffs(speeds.0, speeds.1)?;
        return Ok(*du * a0 + *df * a1);
    }
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    let an = jacobian().scale(1.0 / lambda_max);
    let out = match prepared {
        Prepared::PolyDirect(c) => {
            let a2 = an.matmul(&an);
            apply_even_desc(c, &a2, du)
        }
        Prepared::PolyRecursive(n) => mat_internal_recursive(*n, &an).matvec(du),
        Prepared::Rational { num, den, depth } => {
            if *depth == 1 {
                rational_apply_depth1(num, den, &an, du)?
            } else {
                mat_rational(num, den, *depth, &an)?.matvec(du)
            }
        }
        Prepared::Linear => unreachable!(),
    };
    Ok(out * lambda_max)
}

/// AVM interface flux: central average minus half the viscosity action on
/// the jump.
///
/// With `powell` on, the eight-wave cleaning terms enter three places at
/// once: the interface jump the viscosity sees grows by S(U)dB_n, the matrix
/// argument becomes the augmented (nonconservative) Jacobian, and half the
/// jump term is added centrally. Together with the per-cell completion in
/// the time stepper this reproduces the path-conservative upwinding of the
/// cleaned system; leaving the viscosity on the plain Jacobian sends part of
/// the cleaning terms against the wind.
pub fn avm_flux<S: System<N>, const N: usize>(
    sys: &S,
    prepared: &Prepared,
    ctx: &EdgeContext<N>,
    powell: bool,
) -> Result<State<N>> {
    let f0 = sys.flux(ctx.axis, &ctx.u0);
    let f1 = sys.flux(ctx.axis, &ctx.u1);
    let du = ctx.u1 - ctx.u0;
    let mut df = f1 - f0;
    let mean = (ctx.u0 + ctx.u1) * 0.5;
    let cleaning = if powell {
        Some(Cleaning::at(sys, ctx.axis, &mean)?)
    } else {
        None
    };
    let jump = cleaning.as_ref().map(|c| c.jump(&ctx.u0, &ctx.u1));
    if let Some(j) = &jump {
        df += *j;
    }
    let visc = viscosity_jump(
        prepared,
        || {
            let mut a = sys.jacobian(ctx.axis, &mean);
            if let Some(c) = &cleaning {
                c.add_to(&mut a);
            }
            a
        },
        ctx.lambda_max,
        (ctx.s0, ctx.s1),
        &du,
        &df,
    )?;
    let mut flux = (f0 + f1) * 0.5 - visc * 0.5;
    if let Some(j) = jump {
        flux += j * 0.5;
    }
    Ok(flux)
}

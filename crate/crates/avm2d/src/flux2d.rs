//! Corner fluxes of the two-dimensional four-wave model and the edge-flux
//! assembly that blends them with the one-dimensional fluxes.

use crate::basis::{widen_fan, Prepared};
use crate::error::{Error, Result};
use crate::flux1d::{avm_flux, estimate_edge_speeds, hll_state, viscosity_jump, EdgeContext};
use crate::physics::{Axis, Cleaning, System};
use crate::state::State;

/// Four cell states meeting at a vertex (L/R along x, D/U along y) and the
/// four-wave speed bounds of the strong interaction region.
#[derive(Clone, Copy, Debug)]
pub struct CornerContext<const N: usize> {
    pub u_ld: State<N>,
    pub u_rd: State<N>,
    pub u_lu: State<N>,
    pub u_ru: State<N>,
    pub s_l: f64,
    pub s_r: f64,
    pub s_d: f64,
    pub s_u: f64,
}

impl<const N: usize> CornerContext<N> {
    pub fn from_states<S: System<N>>(
        sys: &S,
        u_ld: State<N>,
        u_rd: State<N>,
        u_lu: State<N>,
        u_ru: State<N>,
    ) -> Result<Self> {
        let (s_l, s_r, s_d, s_u) = corner_speeds(sys, &u_ld, &u_rd, &u_lu, &u_ru)?;
        Ok(CornerContext {
            u_ld,
            u_rd,
            u_lu,
            u_ru,
            s_l,
            s_r,
            s_d,
            s_u,
        })
    }

    pub fn is_subsonic(&self) -> bool {
        self.s_l < 0.0 && self.s_r > 0.0 && self.s_d < 0.0 && self.s_u > 0.0
    }
}

/// Reduce the four edge-pair estimates to one speed per fan direction.
pub fn corner_speeds<S: System<N>, const N: usize>(
    sys: &S,
    u_ld: &State<N>,
    u_rd: &State<N>,
    u_lu: &State<N>,
    u_ru: &State<N>,
) -> Result<(f64, f64, f64, f64)> {
    let (sl_d, sr_d) = estimate_edge_speeds(sys, Axis::X, u_ld, u_rd)?;
    let (sl_u, sr_u) = estimate_edge_speeds(sys, Axis::X, u_lu, u_ru)?;
    let (sd_l, su_l) = estimate_edge_speeds(sys, Axis::Y, u_ld, u_lu)?;
    let (sd_r, su_r) = estimate_edge_speeds(sys, Axis::Y, u_rd, u_ru)?;
    Ok((
        sl_d.min(sl_u),
        sr_d.max(sr_u),
        sd_l.min(sd_r),
        su_l.max(su_r),
    ))
}

/// Corner flux value plus a flag recording whether the robust 1D fallback
/// replaced the two-dimensional construction.
#[derive(Clone, Copy, Debug)]
pub struct CornerFlux<const N: usize> {
    pub flux: State<N>,
    pub fallback: bool,
}

/// How the subsonic corner flux combines the two transverse intermediate
/// states.
///
/// `Transverse` substitutes the transverse star fluxes into both the mean
/// term and the viscosity jump. `StarDirect` instead feeds the two star
/// states straight into the one-dimensional AVM flux, so the mean term and
/// the flux jump are the physical fluxes of the stars; it is slightly more
/// dissipative and reproduces published reference errors for the polynomial
/// and rational bases more closely.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerForm {
    Transverse,
    StarDirect,
}

/// Two-dimensional AVM flux through a vertex in the direction `axis`.
///
/// In the fully subsonic case the two transverse HLL states are built
/// across `axis` and combined as a one-dimensional AVM flux between them,
/// with `form` choosing how their fluxes enter; supersonic fans reduce to
/// the corresponding upwinded construction. A transverse intermediate state
/// with nonpositive leading component triggers the 1D fallback between the
/// transverse-averaged pairs.
pub fn corner_flux<S: System<N>, const N: usize>(
    sys: &S,
    prepared: &Prepared,
    axis: Axis,
    ctx: &CornerContext<N>,
    form: CornerForm,
    powell: bool,
) -> Result<CornerFlux<N>> {
    let trans = axis.other();
    let (n0, n1, t0, t1, lo, hi) = match axis {
        Axis::X => (
            ctx.s_l,
            ctx.s_r,
            ctx.s_d,
            ctx.s_u,
            (ctx.u_ld, ctx.u_lu),
            (ctx.u_rd, ctx.u_ru),
        ),
        Axis::Y => (
            ctx.s_d,
            ctx.s_u,
            ctx.s_l,
            ctx.s_r,
            (ctx.u_ld, ctx.u_rd),
            (ctx.u_lu, ctx.u_ru),
        ),
    };
    let (n0, n1) = widen_fan(n0, n1);

    let from_lo = n0 >= 0.0;
    let from_hi = n1 <= 0.0;
    let t_from_lo = t0 >= 0.0;
    let t_from_hi = t1 <= 0.0;

    if (from_lo || from_hi) && (t_from_lo || t_from_hi) {
        // Supersonic in both directions: pure upwinding on one corner state.
        let side = if from_lo { lo } else { hi };
        let u = if t_from_lo { side.0 } else { side.1 };
        return Ok(CornerFlux {
            flux: sys.flux(axis, &u),
            fallback: false,
        });
    }

    if from_lo || from_hi {
        // Supersonic along the flux direction: the transverse star flux of
        // the upwind side.
        let (p0, p1) = if from_lo { lo } else { hi };
        let star = hll_state(sys, trans, &p0, &p1, t0, t1, powell)?;
        if !star.physical {
            return fallback_flux(sys, prepared, axis, ctx, powell);
        }
        let edge = EdgeContext::with_speeds(trans, p0, p1, t0, t1);
        let g = avm_flux(sys, prepared, &edge, powell)?;
        return Ok(CornerFlux {
            flux: sys.transverse_flux(axis, &star.state, &g),
            fallback: false,
        });
    }

    if t_from_lo || t_from_hi {
        // Supersonic across the flux direction: the fan collapses onto the
        // upwind transverse row; a plain 1D flux remains.
        let (u0, u1) = if t_from_lo { (lo.0, hi.0) } else { (lo.1, hi.1) };
        let edge = EdgeContext::with_speeds(axis, u0, u1, n0, n1);
        let flux = avm_flux(sys, prepared, &edge, powell)?;
        return Ok(CornerFlux {
            flux,
            fallback: false,
        });
    }

    // Subsonic in both directions.
    let star_lo = hll_state(sys, trans, &lo.0, &lo.1, t0, t1, powell)?;
    let star_hi = hll_state(sys, trans, &hi.0, &hi.1, t0, t1, powell)?;
    if !star_lo.physical || !star_hi.physical {
        return fallback_flux(sys, prepared, axis, ctx, powell);
    }

    if form == CornerForm::StarDirect {
        let edge = EdgeContext::with_speeds(axis, star_lo.state, star_hi.state, n0, n1);
        let flux = avm_flux(sys, prepared, &edge, powell)?;
        return Ok(CornerFlux {
            flux,
            fallback: false,
        });
    }

    let edge_lo = EdgeContext::with_speeds(trans, lo.0, lo.1, t0, t1);
    let edge_hi = EdgeContext::with_speeds(trans, hi.0, hi.1, t0, t1);
    let g_lo = avm_flux(sys, prepared, &edge_lo, powell)?;
    let g_hi = avm_flux(sys, prepared, &edge_hi, powell)?;
    let f_lo = sys.transverse_flux(axis, &star_lo.state, &g_lo);
    let f_hi = sys.transverse_flux(axis, &star_hi.state, &g_hi);

    let du = star_hi.state - star_lo.state;
    let mut df = f_hi - f_lo;
    let mean = (star_lo.state + star_hi.state) * 0.5;
    let lambda = n0.abs().max(n1.abs());
    // The cleaning terms get the same three-way treatment as in avm_flux,
    // linearized at the mean of the transverse stars.
    let cleaning = if powell {
        Some(Cleaning::at(sys, axis, &mean)?)
    } else {
        None
    };
    let jump = cleaning.as_ref().map(|c| c.jump(&star_lo.state, &star_hi.state));
    if let Some(j) = &jump {
        df += *j;
    }
    let visc = viscosity_jump(
        prepared,
        || {
            let mut a = sys.jacobian(axis, &mean);
            if let Some(c) = &cleaning {
                c.add_to(&mut a);
            }
            a
        },
        lambda,
        (n0, n1),
        &du,
        &df,
    )?;
    let mut flux = (f_lo + f_hi) * 0.5 - visc * 0.5;
    if let Some(j) = jump {
        flux += j * 0.5;
    }
    Ok(CornerFlux {
        flux,
        fallback: false,
    })
}

fn fallback_flux<S: System<N>, const N: usize>(
    sys: &S,
    prepared: &Prepared,
    axis: Axis,
    ctx: &CornerContext<N>,
    powell: bool,
) -> Result<CornerFlux<N>> {
    let (lo, hi) = match axis {
        Axis::X => (
            (ctx.u_ld + ctx.u_lu) * 0.5,
            (ctx.u_rd + ctx.u_ru) * 0.5,
        ),
        Axis::Y => (
            (ctx.u_ld + ctx.u_rd) * 0.5,
            (ctx.u_lu + ctx.u_ru) * 0.5,
        ),
    };
    let edge = EdgeContext::from_pair(sys, axis, lo, hi)?;
    let flux = avm_flux(sys, prepared, &edge, powell)?;
    Ok(CornerFlux {
        flux,
        fallback: true,
    })
}

/// Constant state filling the strong interaction region, from the control
/// volume balance over the subsonic four-wave fan. Diagnostics only; the
/// corner fluxes never need it.
pub fn resolved_state<S: System<N>, const N: usize>(
    sys: &S,
    ctx: &CornerContext<N>,
) -> Result<State<N>> {
    if !ctx.is_subsonic() {
        return Err(Error::InvalidParameter(
            "resolved state needs a subsonic fan in both directions".into(),
        ));
    }
    let (s_l, s_r, s_d, s_u) = (ctx.s_l, ctx.s_r, ctx.s_d, ctx.s_u);
    let v = s_r - s_l;
    let w = s_u - s_d;

    let f_ld = sys.flux(Axis::X, &ctx.u_ld);
    let f_rd = sys.flux(Axis::X, &ctx.u_rd);
    let f_lu = sys.flux(Axis::X, &ctx.u_lu);
    let f_ru = sys.flux(Axis::X, &ctx.u_ru);
    let g_ld = sys.flux(Axis::Y, &ctx.u_ld);
    let g_rd = sys.flux(Axis::Y, &ctx.u_rd);
    let g_lu = sys.flux(Axis::Y, &ctx.u_lu);
    let g_ru = sys.flux(Axis::Y, &ctx.u_ru);

    let hll_flux = |f0: State<N>, f1: State<N>, u0: State<N>, u1: State<N>, a: f64, b: f64| {
        (f0 * b - f1 * a + (u1 - u0) * (a * b)) * (1.0 / (b - a))
    };

    // Row and column intermediate states with their transverse fluxes.
    let star_d = hll_state(sys, Axis::X, &ctx.u_ld, &ctx.u_rd, s_l, s_r, false)?.state;
    let star_u = hll_state(sys, Axis::X, &ctx.u_lu, &ctx.u_ru, s_l, s_r, false)?.state;
    let f_star_d = hll_flux(f_ld, f_rd, ctx.u_ld, ctx.u_rd, s_l, s_r);
    let f_star_u = hll_flux(f_lu, f_ru, ctx.u_lu, ctx.u_ru, s_l, s_r);
    let g_trans_d = sys.transverse_flux(Axis::Y, &star_d, &f_star_d);
    let g_trans_u = sys.transverse_flux(Axis::Y, &star_u, &f_star_u);

    let star_l = hll_state(sys, Axis::Y, &ctx.u_ld, &ctx.u_lu, s_d, s_u, false)?.state;
    let star_r = hll_state(sys, Axis::Y, &ctx.u_rd, &ctx.u_ru, s_d, s_u, false)?.state;
    let g_star_l = hll_flux(g_ld, g_lu, ctx.u_ld, ctx.u_lu, s_d, s_u);
    let g_star_r = hll_flux(g_rd, g_ru, ctx.u_rd, ctx.u_ru, s_d, s_u);
    let f_trans_l = sys.transverse_flux(Axis::X, &star_l, &g_star_l);
    let f_trans_r = sys.transverse_flux(Axis::X, &star_r, &g_star_r);

    let corners = (ctx.u_ru * (s_r * s_u) + ctx.u_ld * (s_l * s_d)
        - ctx.u_rd * (s_r * s_d)
        - ctx.u_lu * (s_l * s_u))
        * (1.0 / (v * w));
    let x_edges = ((f_ru - f_lu) * s_u - (f_rd - f_ld) * s_d) * (1.0 / (2.0 * v * w));
    let y_edges = ((g_ru - g_rd) * s_r - (g_lu - g_ld) * s_l) * (1.0 / (2.0 * v * w));
    let x_trans = (f_trans_r - f_trans_l) * (1.0 / (2.0 * v));
    let y_trans = (g_trans_u - g_trans_d) * (1.0 / (2.0 * w));

    Ok(corners - x_edges - y_edges - x_trans - y_trans)
}

/// Simpson blend of the two corner fluxes with the 1D edge flux.
pub fn simpson_weights() -> (f64, f64, f64) {
    (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)
}

/// Time-space average weights for one edge. `s_in_plus` is the fan speed of
/// the corner on the + side of the edge pointing back across it (S_D of the
/// upper corner for an x-edge), `s_in_minus` the matching speed of the −
/// side corner (S_U of the lower corner); `h` is the cell size transverse
/// to the edge. Supersonic fans are clamped so the weights stay convex.
pub fn speed_weights(s_in_plus: f64, s_in_minus: f64, dt: f64, h: f64) -> (f64, f64, f64) {
    let alpha = -s_in_plus.min(0.0) * dt / (2.0 * h);
    let gamma = s_in_minus.max(0.0) * dt / (2.0 * h);
    (alpha, 1.0 - alpha - gamma, gamma)
}

/// F_edge = alpha * F_corner_plus + beta * F_edge_1d + gamma * F_corner_minus.
pub fn assemble_edge_flux<const N: usize>(
    corner_plus: &State<N>,
    edge_1d: &State<N>,
    corner_minus: &State<N>,
    weights: (f64, f64, f64),
) -> Result<State<N>> {
    let (alpha, beta, gamma) = weights;
    let sum = alpha + beta + gamma;
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "assembly weights must sum to 1, got {sum}"
        )));
    }
    Ok(*corner_plus * alpha + *edge_1d * beta + *corner_minus * gamma)
}

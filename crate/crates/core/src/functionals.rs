//! Weighted functionals of a flow snapshot.
//!
//! Everything here reduces an [`AxisymState`] against the exponent tuple:
//! the swirl and vorticity weighted norms, their gradient and axis-weighted
//! companions, the three transport coupling integrals, the cut radial
//! integral behind the Serrin-type quantity `f(t)`, and the discrete
//! residuals of the two weighted energy identities.
//!
//! Axis nodes carry zero quadrature weight, so integrands with negative
//! powers of `r` are never evaluated at `r = 0`.

use crate::error::{Error, Result};
use crate::exponents::{CriterionParams, SerrinCondition};
use crate::field::{pairwise_sum, weighted_lp, Field2D};
use crate::grid::GridRef;
use crate::operators::{ddr, ddz, Parity};
use crate::state::AxisymState;

/// All tracked functionals at one instant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FunctionalSet {
    /// `‖u_theta / r^mu‖_p^p`
    pub phi_p: f64,
    /// `‖omega_theta / r^alpha‖_q^q`
    pub omega_q: f64,
    /// `∫ |grad |u_theta/r^mu|^{p/2}|^2`
    pub grad_phi: f64,
    /// `∫ |grad |omega_theta/r^alpha|^{q/2}|^2`
    pub grad_omega: f64,
    /// `∫ |u_theta/r^mu|^p / r^2`
    pub axis_phi: f64,
    /// `∫ |omega_theta/r^alpha|^q / r^2`
    pub axis_omega: f64,
    /// `∫ (u_r^- / r) |u_theta/r^mu|^p`
    pub i1: f64,
    /// `∫ (u_r^+ / r) |omega_theta/r^alpha|^q`
    pub i2: f64,
    /// `∫ (u_theta/r) du_theta/dz |omega_theta/r^alpha|^{q-2} omega_theta / r^{2 alpha}`
    pub i3: f64,
    /// `[∫_{r<delta1} |r^d u_r^+|^s dx]^{w/s}`
    pub f_serrin: f64,
    /// `∫ |u_r^+|^{10/3}`
    pub g_ur: f64,
    /// `sup r^{1-delta0} |u_theta|`
    pub varpi: f64,
    /// `sup r |u_theta|`
    pub r_ut_inf: f64,
}

/// Integrate `integrand(i, j, r, z)` over off-axis nodes with the volume
/// weights. The axis line carries zero weight and is skipped, so integrands
/// may be singular at `r = 0`.
pub(crate) fn integrate_off_axis(
    grid: &GridRef,
    op: &'static str,
    integrand: impl Fn(usize, usize, f64, f64) -> f64,
) -> Result<f64> {
    let mut terms = Vec::with_capacity(grid.len() - grid.n_z());
    for i in 1..grid.n_r() {
        let r = grid.r(i);
        for j in 0..grid.n_z() {
            let v = integrand(i, j, r, grid.z(j));
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    op,
                    i_r: i,
                    i_z: j,
                    r,
                    z: grid.z(j),
                    value: v,
                });
            }
            terms.push(v * grid.weight(i, j));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `|x|^{e} sign(x)` read as the continuous extension of `|x|^{e-1} x`.
#[inline]
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

fn transport_integral(
    radial: &Field2D,
    positive_part: bool,
    f: &Field2D,
    beta: f64,
    p: f64,
) -> Result<f64> {
    let grid = f.grid();
    integrate_off_axis(grid, "transport_integral", |i, j, r, _| {
        let u = radial.get(i, j);
        let part = if positive_part { u.max(0.0) } else { (-u).max(0.0) };
        part / r * (f.get(i, j).abs() / r.powf(beta)).powf(p)
    })
}

/// `∫ (u_r^- / r) |u_theta/r^mu|^p dx`; nonnegative.
pub fn eval_i1(state: &AxisymState, params: &CriterionParams) -> Result<f64> {
    transport_integral(&state.u_r, false, &state.u_theta, params.mu, params.p)
}

/// `∫ (u_r^+ / r) |omega_theta/r^alpha|^q dx`; nonnegative.
pub fn eval_i2(state: &AxisymState, params: &CriterionParams) -> Result<f64> {
    transport_integral(&state.u_r, true, &state.omega_theta, params.alpha, params.q)
}

/// The sign-indefinite coupling integral. The `du_theta/dz` factor is taken
/// from the stored `omega_r` component (`omega_r = -du_theta/dz`), so states
/// built from analytic recipes evaluate it without extra differentiation
/// error.
pub fn eval_i3(state: &AxisymState, params: &CriterionParams) -> Result<f64> {
    let q = params.q;
    let alpha = params.alpha;
    if !(q > 1.0) {
        return Err(Error::InvalidExponent(format!(
            "the coupling integral needs q > 1, got {q}"
        )));
    }
    let ut = &state.u_theta;
    let wr = &state.omega_r;
    let wt = &state.omega_theta;
    integrate_off_axis(ut.grid(), "eval_i3", |i, j, r, _| {
        let dut_dz = -wr.get(i, j);
        ut.get(i, j) / r * dut_dz * signed_pow(wt.get(i, j), q - 1.0) / r.powf(alpha * q)
    })
}

/// `∫ |f/r^beta|^p / r^2 dx`, the axis-weighted companion norm.
pub fn axis_weighted(f: &Field2D, beta: f64, p: f64) -> Result<f64> {
    weighted_lp(f, beta + 2.0 / p, p)
}

/// `∫ |grad |f/r^beta|^{e/2}|^2 dx` with the discrete meridional gradient.
///
/// Requires `beta < 1` and `f` vanishing on the axis, so the power field
/// extends evenly with value zero at `r = 0`.
pub fn grad_power_integral(f: &Field2D, beta: f64, e: f64) -> Result<f64> {
    let grid = f.grid();
    let mut vals = vec![0.0; grid.len()];
    for i in 1..grid.n_r() {
        let r_beta = grid.r(i).powf(beta);
        for j in 0..grid.n_z() {
            let v = (f.get(i, j).abs() / r_beta).powf(e / 2.0);
            if !v.is_finite() {
                return Err(Error::IntegrandOverflow {
                    op: "grad_power_integral",
                    i_r: i,
                    i_z: j,
                    value: v,
                });
            }
            vals[grid.idx(i, j)] = v;
        }
    }
    let g = Field2D::from_values(grid, vals)?;
    let gr = ddr(&g, Parity::Even);
    let gz = ddz(&g);
    let sq = gr.zip_map(&gr, |a, b| a * b).add(&gz.zip_map(&gz, |a, b| a * b));
    crate::field::integrate_cyl(&sq)
}

/// Smooth radial cutoff: `1` for `r <= delta1/2`, `0` for `r >= delta1`,
/// quintic-smoothstep transition (twice continuously differentiable, with
/// `|d eta/dr| <= 3.75/delta1`).
pub fn smooth_cutoff(grid: &GridRef, delta1: f64) -> Result<Field2D> {
    if !(delta1 > 0.0) {
        return Err(Error::InvalidExponent(format!(
            "cutoff radius must be positive, got {delta1}"
        )));
    }
    Field2D::from_fn(grid, |r, _| cutoff_profile(r, delta1))
}

/// Scalar cutoff profile used by [`smooth_cutoff`].
pub fn cutoff_profile(r: f64, delta1: f64) -> f64 {
    if r <= delta1 / 2.0 {
        1.0
    } else if r >= delta1 {
        0.0
    } else {
        let x = (r - delta1 / 2.0) / (delta1 / 2.0);
        1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
    }
}

/// Radial integral of row samples `g_i` over `[0, min(cut, r_max)]`.
///
/// Full cells are composite trapezoid with an endpoint-derivative
/// correction; the cell straddling the cut is integrated with a local
/// quadratic, so the cut radius does not need to sit on a node.
pub(crate) fn cut_radial_integral(g: &[f64], h: f64, cut: f64) -> f64 {
    let n = g.len();
    let r_last = (n - 1) as f64 * h;
    if cut >= r_last - 1e-12 * r_last {
        let mut acc = 0.5 * (g[0] + g[n - 1]);
        for v in &g[1..n - 1] {
            acc += v;
        }
        return acc * h;
    }
    let kf = (cut / h).floor();
    let k = (kf as usize).min(n - 2);
    let e = cut - k as f64 * h;

    let mut total = 0.0;
    if k >= 1 {
        let mut acc = 0.5 * (g[0] + g[k]);
        for v in &g[1..k] {
            acc += v;
        }
        total += acc * h;
        // Euler-Maclaurin endpoint correction for the composite trapezoid.
        let gp0 = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
        let gpk = if k + 1 < n {
            (g[k + 1] - g[k - 1]) / (2.0 * h)
        } else {
            (3.0 * g[k] - 4.0 * g[k - 1] + g[k - 2]) / (2.0 * h)
        };
        total -= h * h / 12.0 * (gpk - gp0);
    }
    // Partial cell [r_k, r_k + e] through a local quadratic.
    if e > 0.0 {
        if k >= 1 && k + 1 < n {
            let d1 = (g[k + 1] - g[k - 1]) / (2.0 * h);
            let d2 = (g[k + 1] - 2.0 * g[k] + g[k - 1]) / (h * h);
            total += e * g[k] + e * e / 2.0 * d1 + e * e * e / 6.0 * d2;
        } else {
            let d1 = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
            let d2 = (g[0] - 2.0 * g[1] + g[2]) / (h * h);
            total += e * g[0] + e * e / 2.0 * d1 + e * e * e / 6.0 * d2;
        }
    }
    total
}

/// `[∫_{r < delta1} |r^d u_r^+|^s dx]^{w/s}`.
pub fn eval_f_serrin(state: &AxisymState, cond: &SerrinCondition) -> Result<f64> {
    let grid = state.grid();
    let up = state.u_r.positive_part();
    let h = grid.dr();
    let mut rows = vec![0.0; grid.n_z()];
    let mut g = vec![0.0; grid.n_r()];
    for j in 0..grid.n_z() {
        for i in 0..grid.n_r() {
            let r = grid.r(i);
            let rd = if i == 0 {
                // r^{d s} * r * (u^+)^s with u^+ ~ r: exponent 1 + s(1+d) > 1,
                // so the axis sample of the radial integrand is zero.
                0.0
            } else {
                r.powf(cond.d)
            };
            let v = (rd * up.get(i, j)).powf(cond.s) * 2.0 * std::f64::consts::PI * r;
            if !v.is_finite() {
                return Err(Error::IntegrandOverflow {
                    op: "eval_f_serrin",
                    i_r: i,
                    i_z: j,
                    value: v,
                });
            }
            g[i] = v;
        }
        rows[j] = cut_radial_integral(&g, h, cond.delta1);
    }
    // Trapezoid in z; the integrand decays, so no end corrections needed.
    let mut acc = 0.5 * (rows[0] + rows[grid.n_z() - 1]);
    for v in &rows[1..grid.n_z() - 1] {
        acc += v;
    }
    let integral = acc * grid.dz();
    Ok(if integral <= 0.0 {
        0.0
    } else {
        integral.powf(cond.w / cond.s)
    })
}

/// `∫ |u_r^+|^{10/3} dx`.
pub fn eval_g(state: &AxisymState) -> Result<f64> {
    weighted_lp(&state.u_r.positive_part(), 0.0, 10.0 / 3.0)
}

/// Evaluate the whole tracked set at one state.
pub fn eval_functionals(
    state: &AxisymState,
    params: &CriterionParams,
    cond: &SerrinCondition,
) -> Result<FunctionalSet> {
    let ut = &state.u_theta;
    let wt = &state.omega_theta;
    Ok(FunctionalSet {
        phi_p: weighted_lp(ut, params.mu, params.p)?,
        omega_q: weighted_lp(wt, params.alpha, params.q)?,
        grad_phi: grad_power_integral(ut, params.mu, params.p)?,
        grad_omega: grad_power_integral(wt, params.alpha, params.q)?,
        axis_phi: axis_weighted(ut, params.mu, params.p)?,
        axis_omega: axis_weighted(wt, params.alpha, params.q)?,
        i1: eval_i1(state, params)?,
        i2: eval_i2(state, params)?,
        i3: eval_i3(state, params)?,
        f_serrin: eval_f_serrin(state, cond)?,
        g_ur: eval_g(state)?,
        varpi: ut.sup_r_weighted(1.0 - params.delta0),
        r_ut_inf: ut.sup_r_weighted(1.0),
    })
}

/// Terms of one discrete weighted energy identity, evaluated across a pair
/// of consecutive states: the time-rate term by a centered difference over
/// the interval, the spatial terms by the midpoint average.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IdentityTerms {
    /// `(1/p) d/dt` of the weighted norm.
    pub rate: f64,
    /// Gradient dissipation with its exact coefficient.
    pub dissipation_grad: f64,
    /// Axis-weighted dissipation with its exact coefficient.
    pub dissipation_axis: f64,
    /// Transport term on the dissipative side.
    pub outflow: f64,
    /// Transport term on the source side.
    pub inflow: f64,
    /// Swirl-vorticity coupling source (zero for the swirl identity).
    pub coupling: f64,
    /// `rate + dissipation_grad + dissipation_axis + outflow - inflow - coupling`.
    pub residual: f64,
}

/// Discrete residual of the weighted swirl identity
/// `(1/p) d/dt ‖u_t/r^mu‖_p^p + (4(p-1)nu/p^2) ∫|grad|u_t/r^mu|^{p/2}|^2
///  + nu(1-mu^2) ∫|u_t/r^mu|^p/r^2 + (1+mu) ∫(u_r^+/r)|u_t/r^mu|^p
///  = (1+mu) ∫(u_r^-/r)|u_t/r^mu|^p`.
pub fn eval_identity_d_terms(
    prev: &AxisymState,
    next: &AxisymState,
    params: &CriterionParams,
    nu: f64,
) -> Result<IdentityTerms> {
    let dt = next.t - prev.t;
    if !(dt > 0.0) {
        return Err(Error::InvalidState(format!(
            "identity evaluation needs advancing states, dt = {dt}"
        )));
    }
    let p = params.p;
    let mu = params.mu;
    let phi_prev = weighted_lp(&prev.u_theta, mu, p)?;
    let phi_next = weighted_lp(&next.u_theta, mu, p)?;
    let rate = (phi_next - phi_prev) / (p * dt);
    let avg = |a: f64, b: f64| 0.5 * (a + b);
    let dissipation_grad = 4.0 * (p - 1.0) * nu / (p * p)
        * avg(
            grad_power_integral(&prev.u_theta, mu, p)?,
            grad_power_integral(&next.u_theta, mu, p)?,
        );
    let dissipation_axis = nu * (1.0 - mu * mu)
        * avg(
            axis_weighted(&prev.u_theta, mu, p)?,
            axis_weighted(&next.u_theta, mu, p)?,
        );
    let outflow = (1.0 + mu)
        * avg(
            transport_integral(&prev.u_r, true, &prev.u_theta, mu, p)?,
            transport_integral(&next.u_r, true, &next.u_theta, mu, p)?,
        );
    let inflow = (1.0 + mu) * avg(eval_i1(prev, params)?, eval_i1(next, params)?);
    let coupling = 0.0;
    Ok(IdentityTerms {
        rate,
        dissipation_grad,
        dissipation_axis,
        outflow,
        inflow,
        coupling,
        residual: rate + dissipation_grad + dissipation_axis + outflow - inflow - coupling,
    })
}

/// Discrete residual of the weighted vorticity identity, including the
/// coupling source `2 ∫ (u_t/r) du_t/dz |w_t/r^alpha|^{q-2} w_t/r^{2 alpha}`.
pub fn eval_identity_i_terms(
    prev: &AxisymState,
    next: &AxisymState,
    params: &CriterionParams,
    nu: f64,
) -> Result<IdentityTerms> {
    let dt = next.t - prev.t;
    if !(dt > 0.0) {
        return Err(Error::InvalidState(format!(
            "identity evaluation needs advancing states, dt = {dt}"
        )));
    }
    let q = params.q;
    let alpha = params.alpha;
    let om_prev = weighted_lp(&prev.omega_theta, alpha, q)?;
    let om_next = weighted_lp(&next.omega_theta, alpha, q)?;
    let rate = (om_next - om_prev) / (q * dt);
    let avg = |a: f64, b: f64| 0.5 * (a + b);
    let dissipation_grad = 4.0 * nu * (q - 1.0) / (q * q)
        * avg(
            grad_power_integral(&prev.omega_theta, alpha, q)?,
            grad_power_integral(&next.omega_theta, alpha, q)?,
        );
    let dissipation_axis = nu * (1.0 - alpha * alpha)
        * avg(
            axis_weighted(&prev.omega_theta, alpha, q)?,
            axis_weighted(&next.omega_theta, alpha, q)?,
        );
    let outflow = (1.0 - alpha)
        * avg(
            transport_integral(&prev.u_r, false, &prev.omega_theta, alpha, q)?,
            transport_integral(&next.u_r, false, &next.omega_theta, alpha, q)?,
        );
    let inflow = (1.0 - alpha) * avg(eval_i2(prev, params)?, eval_i2(next, params)?);
    let coupling = 2.0 * avg(eval_i3(prev, params)?, eval_i3(next, params)?);
    Ok(IdentityTerms {
        rate,
        dissipation_grad,
        dissipation_axis,
        outflow,
        inflow,
        coupling,
        residual: rate + dissipation_grad + dissipation_axis + outflow - inflow - coupling,
    })
}

/// Assemble the combined-identity sides from the two term records along two
/// different groupings; they must agree to rounding (pure bookkeeping).
pub fn main_identity_assembly(d: &IdentityTerms, i: &IdentityTerms) -> (f64, f64) {
    // Route 1: sum of the per-identity residual definitions.
    let lhs_minus_rhs_1 = d.residual + i.residual;
    // Route 2: combined left side minus combined right side.
    let lhs = d.rate
        + i.rate
        + d.dissipation_grad
        + i.dissipation_grad
        + d.dissipation_axis
        + i.dissipation_axis
        + d.outflow
        + i.outflow;
    let rhs = d.inflow + i.inflow + i.coupling;
    (lhs_minus_rhs_1, lhs - rhs)
}

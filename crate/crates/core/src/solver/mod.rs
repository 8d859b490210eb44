//! Time integration of the axisymmetric momentum equations.
//!
//! Primitive variables, explicit two-stage (Heun) advection and diffusion,
//! pressure projection after the full step. The swirl and radial momentum
//! equations use the singular viscous operator with the `-u/r^2` term, the
//! axial one the regular operator; `1/r` coefficients are evaluated off the
//! axis only, where the odd components vanish by construction. Far-field
//! boundaries are homogeneous Dirichlet on velocity and natural (Neumann)
//! on the correction potential; all test flows decay well inside the
//! truncation radius.
//!
//! The vorticity transport equations are not the evolved system; they serve
//! as an independent residual check on computed trajectories.

pub mod poisson;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use crate::checkpoint::read_checkpoint;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::GridRef;
use crate::operators::{
    axial_laplacian, curl_cyl, ddr, ddz, swirl_laplacian, Parity,
};
use crate::state::{weighted_rms, AxisymState};

/// Body force sampled at `(r, z, t)`, returning `(f_r, f_theta, f_z)`.
/// Used only by manufactured-solution testing; production runs leave it
/// unset.
pub type Forcing = Arc<dyn Fn(f64, f64, f64) -> (f64, f64, f64) + Send + Sync>;

/// Far-field boundary handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum BoundaryKind {
    /// Homogeneous Dirichlet velocity at `r_max` and `|z| = z_half`,
    /// homogeneous Neumann pressure.
    DecayingFarField,
}

#[derive(Clone)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub projection_tol: f64,
    pub bc: BoundaryKind,
    pub max_projection_iters: usize,
    pub forcing: Option<Forcing>,
}

impl fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverConfig")
            .field("nu", &self.nu)
            .field("dt", &self.dt)
            .field("t_end", &self.t_end)
            .field("cfl_safety", &self.cfl_safety)
            .field("projection_tol", &self.projection_tol)
            .field("bc", &self.bc)
            .field("max_projection_iters", &self.max_projection_iters)
            .field("forcing", &self.forcing.as_ref().map(|_| "<hook>"))
            .finish()
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            nu: 0.1,
            dt: 1e-3,
            t_end: 0.1,
            cfl_safety: 0.5,
            projection_tol: 1e-8,
            bc: BoundaryKind::DecayingFarField,
            max_projection_iters: 40_000,
            forcing: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidState(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidState(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.projection_tol > 0.0) {
            return Err(Error::InvalidState(format!(
                "projection_tol must be positive, got {}",
                self.projection_tol
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidState(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        Ok(())
    }
}

/// Initial conditions: analytic recipes or a checkpoint file.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum InitialData {
    Rest,
    /// `u_theta = amplitude * r * exp(-(r^2+z^2)/width^2)`, no meridional flow.
    GaussianSwirl { amplitude: f64, width: f64 },
    /// Streamfunction-driven meridional flow
    /// `psi = amplitude * r^2 z * exp(-(r^2+z^2)/width^2)`.
    Meridional { amplitude: f64, width: f64 },
    /// Superposition of the two recipes above.
    SwirlAndMeridional {
        swirl_amplitude: f64,
        swirl_width: f64,
        meridional_amplitude: f64,
        meridional_width: f64,
    },
    Checkpoint(PathBuf),
}

impl InitialData {
    /// Build the state on `grid` and project it divergence-free.
    pub fn build(&self, grid: &GridRef, cfg: &SolverConfig) -> Result<AxisymState> {
        let state = match self {
            InitialData::Rest => AxisymState::rest(grid),
            InitialData::GaussianSwirl { amplitude, width } => {
                let s = 1.0 / (width * width);
                let u_t =
                    Field2D::from_fn(grid, |r, z| amplitude * r * (-s * (r * r + z * z)).exp())?;
                let zero = Field2D::zeros(grid);
                AxisymState::from_velocity(0.0, zero.clone(), u_t, zero.clone(), zero)?
            }
            InitialData::Meridional { amplitude, width } => {
                let (u_r, u_z) = meridional_velocity(grid, *amplitude, *width)?;
                let zero = Field2D::zeros(grid);
                AxisymState::from_velocity(0.0, u_r, zero.clone(), u_z, zero)?
            }
            InitialData::SwirlAndMeridional {
                swirl_amplitude,
                swirl_width,
                meridional_amplitude,
                meridional_width,
            } => {
                let s = 1.0 / (swirl_width * swirl_width);
                let u_t = Field2D::from_fn(grid, |r, z| {
                    swirl_amplitude * r * (-s * (r * r + z * z)).exp()
                })?;
                let (u_r, u_z) = meridional_velocity(grid, *meridional_amplitude, *meridional_width)?;
                AxisymState::from_velocity(0.0, u_r, u_t, u_z, Field2D::zeros(grid))?
            }
            InitialData::Checkpoint(path) => {
                let state = read_checkpoint(path)?;
                if state.grid() != grid {
                    return Err(Error::GridMismatch {
                        op: "InitialData::Checkpoint",
                        left: state.grid().describe(),
                        right: grid.describe(),
                    });
                }
                state
            }
        };
        let mut u_r = state.u_r.clone();
        let mut u_z = state.u_z.clone();
        apply_velocity_bc(&mut u_r, &mut state.u_theta.clone(), &mut u_z);
        poisson::project(&mut u_r, &mut u_z, cfg.projection_tol, cfg.max_projection_iters)?;
        AxisymState::from_velocity(state.t, u_r, state.u_theta, u_z, state.pressure)
    }
}

/// The solver's discrete continuity residual: weighted RMS of the induced
/// divergence of the projection pair. This is the quantity the projection
/// drives below `projection_tol`; the centered continuity operator applied
/// to a projected state is consistent with it to discretization error.
pub fn continuity_residual(state: &AxisymState) -> f64 {
    poisson::continuity_rms(&state.u_r, &state.u_z)
}

fn meridional_velocity(grid: &GridRef, amplitude: f64, width: f64) -> Result<(Field2D, Field2D)> {
    let s = 1.0 / (width * width);
    let u_r = Field2D::from_fn(grid, |r, z| {
        -amplitude * r * (1.0 - 2.0 * s * z * z) * (-s * (r * r + z * z)).exp()
    })?;
    let u_z = Field2D::from_fn(grid, |r, z| {
        amplitude * z * (2.0 - 2.0 * s * r * r) * (-s * (r * r + z * z)).exp()
    })?;
    Ok((u_r, u_z))
}

fn apply_velocity_bc(u_r: &mut Field2D, u_theta: &mut Field2D, u_z: &mut Field2D) {
    let grid = u_r.grid().clone();
    let (n_r, n_z) = (grid.n_r(), grid.n_z());
    for j in 0..n_z {
        u_r.set(0, j, 0.0);
        u_theta.set(0, j, 0.0);
        u_r.set(n_r - 1, j, 0.0);
        u_theta.set(n_r - 1, j, 0.0);
        u_z.set(n_r - 1, j, 0.0);
    }
    for i in 0..n_r {
        for j in [0, n_z - 1] {
            u_r.set(i, j, 0.0);
            u_theta.set(i, j, 0.0);
            u_z.set(i, j, 0.0);
        }
    }
}

struct Rhs {
    r: Field2D,
    theta: Field2D,
    z: Field2D,
}

fn momentum_rhs(
    u_r: &Field2D,
    u_theta: &Field2D,
    u_z: &Field2D,
    cfg: &SolverConfig,
    t: f64,
) -> Result<Rhs> {
    let grid = u_r.grid().clone();
    let (n_r, n_z) = (grid.n_r(), grid.n_z());

    let dur_dr = ddr(u_r, Parity::Odd);
    let dur_dz = ddz(u_r);
    let dut_dr = ddr(u_theta, Parity::Odd);
    let dut_dz = ddz(u_theta);
    let duz_dr = ddr(u_z, Parity::Even);
    let duz_dz = ddz(u_z);
    let lap_r = swirl_laplacian(u_r)?;
    let lap_t = swirl_laplacian(u_theta)?;
    let lap_z = axial_laplacian(u_z);

    let mut rr = Field2D::zeros(&grid);
    let mut rt = Field2D::zeros(&grid);
    let mut rz = Field2D::zeros(&grid);
    let nu = cfg.nu;
    for i in 0..n_r {
        let r = grid.r(i);
        for j in 0..n_z {
            let ur = u_r.get(i, j);
            let ut = u_theta.get(i, j);
            let uz = u_z.get(i, j);
            let adv = |fr: &Field2D, fz: &Field2D| ur * fr.get(i, j) + uz * fz.get(i, j);
            if i == 0 {
                // Axis rows of the odd components evolve trivially; the axial
                // component sees no curvature terms (u_r vanishes there).
                rr.set(0, j, 0.0);
                rt.set(0, j, 0.0);
                rz.set(0, j, -uz * duz_dz.get(0, j) + nu * lap_z.get(0, j));
            } else {
                rr.set(
                    i,
                    j,
                    -adv(&dur_dr, &dur_dz) + ut * ut / r + nu * lap_r.get(i, j),
                );
                rt.set(
                    i,
                    j,
                    -adv(&dut_dr, &dut_dz) - ur * ut / r + nu * lap_t.get(i, j),
                );
                rz.set(i, j, -adv(&duz_dr, &duz_dz) + nu * lap_z.get(i, j));
            }
        }
    }
    if let Some(forcing) = &cfg.forcing {
        for i in 0..n_r {
            let r = grid.r(i);
            for j in 0..n_z {
                let (fr, ft, fz) = forcing(r, grid.z(j), t);
                if i > 0 {
                    rr.set(i, j, rr.get(i, j) + fr);
                    rt.set(i, j, rt.get(i, j) + ft);
                }
                rz.set(i, j, rz.get(i, j) + fz);
            }
        }
    }
    Ok(Rhs {
        r: rr,
        theta: rt,
        z: rz,
    })
}

/// Advance one step: Heun stages for advection/diffusion/forcing followed by
/// a pressure projection enforcing the discrete continuity equation.
///
/// The rest state is an exact fixed point. Steps violating the advective
/// CFL condition or the explicit diffusion limit are rejected with a
/// suggested time step.
pub fn step(state: &AxisymState, cfg: &SolverConfig) -> Result<AxisymState> {
    cfg.validate()?;
    state.validate_axis()?;
    let grid = state.grid().clone();
    let h_min = grid.dr().min(grid.dz());

    let vmax = state
        .u_r
        .abs_max()
        .max(state.u_theta.abs_max())
        .max(state.u_z.abs_max());
    let suggested_advective = if vmax > 0.0 {
        cfg.cfl_safety * h_min / vmax
    } else {
        f64::INFINITY
    };
    let diffusion_rate = cfg.nu * (1.0 / (grid.dr() * grid.dr()) + 1.0 / (grid.dz() * grid.dz()));
    let suggested_diffusive = 0.45 / diffusion_rate;
    if vmax * cfg.dt / h_min > cfg.cfl_safety {
        return Err(Error::CflViolation {
            cfl: vmax * cfg.dt / h_min,
            limit: cfg.cfl_safety,
            suggested_dt: suggested_advective.min(suggested_diffusive),
        });
    }
    if cfg.dt * diffusion_rate > 0.45 {
        return Err(Error::DiffusionLimit {
            number: cfg.dt * diffusion_rate,
            suggested_dt: suggested_diffusive,
        });
    }

    let dt = cfg.dt;
    let k1 = momentum_rhs(&state.u_r, &state.u_theta, &state.u_z, cfg, state.t)?;
    let mut u_r1 = state.u_r.add_scaled(dt, &k1.r);
    let mut u_t1 = state.u_theta.add_scaled(dt, &k1.theta);
    let mut u_z1 = state.u_z.add_scaled(dt, &k1.z);
    apply_velocity_bc(&mut u_r1, &mut u_t1, &mut u_z1);

    let k2 = momentum_rhs(&u_r1, &u_t1, &u_z1, cfg, state.t + dt)?;
    let half = 0.5 * dt;
    let mut u_r = state.u_r.add_scaled(half, &k1.r).add_scaled(half, &k2.r);
    let mut u_t = state
        .u_theta
        .add_scaled(half, &k1.theta)
        .add_scaled(half, &k2.theta);
    let mut u_z = state.u_z.add_scaled(half, &k1.z).add_scaled(half, &k2.z);
    apply_velocity_bc(&mut u_r, &mut u_t, &mut u_z);

    let projection =
        poisson::project(&mut u_r, &mut u_z, cfg.projection_tol, cfg.max_projection_iters)?;
    let pressure = projection.potential.scale(1.0 / dt);

    let (omega_r, omega_theta, omega_z) = curl_cyl(&u_r, &u_t, &u_z)?;
    let next = AxisymState {
        t: state.t + dt,
        u_r,
        u_theta: u_t,
        u_z,
        pressure,
        omega_r,
        omega_theta,
        omega_z,
    };
    if !next.is_finite() {
        return Err(Error::InvalidState(
            "non-finite state after step".to_string(),
        ));
    }
    Ok(next)
}

/// Volume-weighted RMS residuals of the three vorticity transport
/// equations across a pair of consecutive states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VorticityResiduals {
    pub res_r: f64,
    pub res_theta: f64,
    pub res_z: f64,
}

/// Evaluate the discrete vorticity-transport residuals on `[prev, next]`:
/// time derivative by the interval difference, spatial terms on the
/// midpoint average, forcing (if any) entering through its discrete curl.
pub fn vorticity_residual(
    prev: &AxisymState,
    next: &AxisymState,
    cfg: &SolverConfig,
) -> Result<VorticityResiduals> {
    prev.u_r.check_same_grid(&next.u_r, "vorticity_residual")?;
    let dt = next.t - prev.t;
    if !(dt > 0.0) {
        return Err(Error::InvalidState(format!(
            "vorticity residual needs advancing states, dt = {dt}"
        )));
    }
    let grid = prev.grid().clone();
    let mid = |a: &Field2D, b: &Field2D| a.add(b).scale(0.5);
    let u_r = mid(&prev.u_r, &next.u_r);
    let u_t = mid(&prev.u_theta, &next.u_theta);
    let u_z = mid(&prev.u_z, &next.u_z);
    let w_r = mid(&prev.omega_r, &next.omega_r);
    let w_t = mid(&prev.omega_theta, &next.omega_theta);
    let w_z = mid(&prev.omega_z, &next.omega_z);

    let dwr_dr = ddr(&w_r, Parity::Odd);
    let dwr_dz = ddz(&w_r);
    let dwt_dr = ddr(&w_t, Parity::Odd);
    let dwt_dz = ddz(&w_t);
    let dwz_dr = ddr(&w_z, Parity::Even);
    let dwz_dz = ddz(&w_z);
    let dur_dr = ddr(&u_r, Parity::Odd);
    let dur_dz = ddz(&u_r);
    let duz_dr = ddr(&u_z, Parity::Even);
    let duz_dz = ddz(&u_z);
    let lap_wr = swirl_laplacian(&w_r)?;
    let lap_wt = swirl_laplacian(&w_t)?;
    let lap_wz = axial_laplacian(&w_z);

    // Curl of the forcing at the midpoint time, discretely.
    let force_curl = match &cfg.forcing {
        Some(forcing) => {
            let t_mid = 0.5 * (prev.t + next.t);
            let mut fr = Field2D::zeros(&grid);
            let mut ft = Field2D::zeros(&grid);
            let mut fz = Field2D::zeros(&grid);
            for i in 0..grid.n_r() {
                for j in 0..grid.n_z() {
                    let (a, b, c) = forcing(grid.r(i), grid.z(j), t_mid);
                    fr.set(i, j, a);
                    ft.set(i, j, b);
                    fz.set(i, j, c);
                }
            }
            Some(curl_cyl(&fr, &ft, &fz)?)
        }
        None => None,
    };

    let nu = cfg.nu;
    let mut res_r = Field2D::zeros(&grid);
    let mut res_t = Field2D::zeros(&grid);
    let mut res_z = Field2D::zeros(&grid);
    for i in 0..grid.n_r() {
        let r = grid.r(i);
        for j in 0..grid.n_z() {
            let ddt_r = (next.omega_r.get(i, j) - prev.omega_r.get(i, j)) / dt;
            let ddt_t = (next.omega_theta.get(i, j) - prev.omega_theta.get(i, j)) / dt;
            let ddt_z = (next.omega_z.get(i, j) - prev.omega_z.get(i, j)) / dt;
            let ur = u_r.get(i, j);
            let uz = u_z.get(i, j);
            if i == 0 {
                // Odd components vanish on the axis; their equations reduce
                // to 0 = 0 there. The axial component keeps its regular terms.
                res_r.set(0, j, 0.0);
                res_t.set(0, j, 0.0);
                let v = ddt_z + uz * dwz_dz.get(0, j)
                    - duz_dz.get(0, j) * w_z.get(0, j)
                    - nu * lap_wz.get(0, j);
                res_z.set(0, j, v);
            } else {
                let v_r = ddt_r + ur * dwr_dr.get(i, j) + uz * dwr_dz.get(i, j)
                    - dur_dr.get(i, j) * w_r.get(i, j)
                    - dur_dz.get(i, j) * w_z.get(i, j)
                    - nu * lap_wr.get(i, j);
                let v_t = ddt_t + ur * dwt_dr.get(i, j) + uz * dwt_dz.get(i, j)
                    - ur / r * w_t.get(i, j)
                    + 2.0 * u_t.get(i, j) / r * w_r.get(i, j)
                    - nu * lap_wt.get(i, j);
                let v_z = ddt_z + ur * dwz_dr.get(i, j) + uz * dwz_dz.get(i, j)
                    - duz_dr.get(i, j) * w_r.get(i, j)
                    - duz_dz.get(i, j) * w_z.get(i, j)
                    - nu * lap_wz.get(i, j);
                res_r.set(i, j, v_r);
                res_t.set(i, j, v_t);
                res_z.set(i, j, v_z);
            }
        }
    }
    if let Some((cr, ct, cz)) = force_curl {
        res_r = res_r.sub(&cr);
        res_t = res_t.sub(&ct);
        res_z = res_z.sub(&cz);
        for j in 0..grid.n_z() {
            res_r.set(0, j, 0.0);
            res_t.set(0, j, 0.0);
        }
    }
    Ok(VorticityResiduals {
        res_r: weighted_rms(&res_r),
        res_theta: weighted_rms(&res_t),
        res_z: weighted_rms(&res_z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CylGrid;

    fn quiet_cfg() -> SolverConfig {
        SolverConfig {
            nu: 0.1,
            dt: 2e-4,
            t_end: 0.01,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn rest_state_is_a_bitexact_fixed_point() {
        let g = CylGrid::shared(3.0, 3.0, 32, 32).unwrap();
        let cfg = quiet_cfg();
        let mut s = AxisymState::rest(&g);
        for _ in 0..3 {
            let next = step(&s, &cfg).unwrap();
            assert_eq!(next.u_r.values(), s.u_r.values());
            assert_eq!(next.u_theta.values(), s.u_theta.values());
            assert_eq!(next.u_z.values(), s.u_z.values());
            assert_eq!(next.pressure.values(), s.pressure.values());
            s = next;
        }
    }

    #[test]
    fn pure_swirl_energy_is_nonincreasing() {
        let g = CylGrid::shared(5.0, 5.0, 64, 64).unwrap();
        let cfg = quiet_cfg();
        let init = InitialData::GaussianSwirl {
            amplitude: 1.0,
            width: 1.0,
        };
        let mut s = init.build(&g, &cfg).unwrap();
        let mut energy = s.kinetic_energy().unwrap();
        for _ in 0..50 {
            s = step(&s, &cfg).unwrap();
            let e = s.kinetic_energy().unwrap();
            assert!(
                e <= energy + cfg.projection_tol * energy.max(1.0),
                "energy rose: {energy} -> {e}"
            );
            energy = e;
        }
        assert!(energy > 0.0);
    }

    #[test]
    fn divergence_residual_stays_below_tolerance() {
        let g = CylGrid::shared(5.0, 5.0, 48, 48).unwrap();
        let cfg = quiet_cfg();
        let init = InitialData::SwirlAndMeridional {
            swirl_amplitude: 1.0,
            swirl_width: 1.0,
            meridional_amplitude: 0.4,
            meridional_width: 1.2,
        };
        let mut s = init.build(&g, &cfg).unwrap();
        assert!(continuity_residual(&s) <= cfg.projection_tol);
        for _ in 0..20 {
            s = step(&s, &cfg).unwrap();
            assert!(continuity_residual(&s) <= cfg.projection_tol);
        }
        // The centered continuity form is not the projection residual, but
        // it must stay small at the discretization level.
        assert!(s.continuity_residual().unwrap() < 0.05);
    }

    #[test]
    fn cfl_violation_is_rejected_with_suggestion() {
        let g = CylGrid::shared(2.0, 2.0, 32, 32).unwrap();
        let mut cfg = quiet_cfg();
        cfg.dt = 1.0;
        let init = InitialData::GaussianSwirl {
            amplitude: 5.0,
            width: 0.8,
        };
        let cfg_build = quiet_cfg();
        let s = init.build(&g, &cfg_build).unwrap();
        match step(&s, &cfg) {
            Err(Error::CflViolation { suggested_dt, .. }) => {
                assert!(suggested_dt > 0.0 && suggested_dt < 1.0);
            }
            other => panic!("expected CflViolation, got {other:?}"),
        }
    }

    #[test]
    fn diffusion_limit_is_rejected_for_zero_velocity_large_dt() {
        let g = CylGrid::shared(2.0, 2.0, 64, 64).unwrap();
        let mut cfg = quiet_cfg();
        cfg.dt = 0.05; // far beyond the explicit diffusion limit at this h
        let s = AxisymState::rest(&g);
        assert!(matches!(
            step(&s, &cfg),
            Err(Error::DiffusionLimit { .. })
        ));
    }

    #[test]
    fn vorticity_residual_vanishes_at_rest() {
        let g = CylGrid::shared(2.0, 2.0, 24, 24).unwrap();
        let cfg = quiet_cfg();
        let a = AxisymState::rest(&g);
        let mut b = AxisymState::rest(&g);
        b.t = cfg.dt;
        let res = vorticity_residual(&a, &b, &cfg).unwrap();
        assert_eq!(res.res_r, 0.0);
        assert_eq!(res.res_theta, 0.0);
        assert_eq!(res.res_z, 0.0);
    }
}

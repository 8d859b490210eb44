//! Full flow snapshot: velocity, pressure, and derived vorticity.

use crate::error::{Error, Result};
use crate::field::{integrate_cyl, pairwise_sum, Field2D};
use crate::grid::GridRef;
use crate::operators::{curl_cyl, divergence_cyl};

const AXIS_REL_TOL: f64 = 1e-10;

/// Velocity triple, pressure, and vorticity triple at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymState {
    pub t: f64,
    pub u_r: Field2D,
    pub u_theta: Field2D,
    pub u_z: Field2D,
    pub pressure: Field2D,
    pub omega_r: Field2D,
    pub omega_theta: Field2D,
    pub omega_z: Field2D,
}

impl AxisymState {
    pub fn rest(grid: &GridRef) -> AxisymState {
        let z = Field2D::zeros(grid);
        AxisymState {
            t: 0.0,
            u_r: z.clone(),
            u_theta: z.clone(),
            u_z: z.clone(),
            pressure: z.clone(),
            omega_r: z.clone(),
            omega_theta: z.clone(),
            omega_z: z,
        }
    }

    /// Build a state from velocity and pressure; vorticity is computed with
    /// the discrete curl.
    pub fn from_velocity(
        t: f64,
        u_r: Field2D,
        u_theta: Field2D,
        u_z: Field2D,
        pressure: Field2D,
    ) -> Result<AxisymState> {
        u_r.check_same_grid(&u_theta, "AxisymState")?;
        u_r.check_same_grid(&u_z, "AxisymState")?;
        u_r.check_same_grid(&pressure, "AxisymState")?;
        let (omega_r, omega_theta, omega_z) = curl_cyl(&u_r, &u_theta, &u_z)?;
        let state = AxisymState {
            t,
            u_r,
            u_theta,
            u_z,
            pressure,
            omega_r,
            omega_theta,
            omega_z,
        };
        state.validate_axis()?;
        Ok(state)
    }

    /// Build a state with caller-supplied vorticity (analytic recipes).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        t: f64,
        u_r: Field2D,
        u_theta: Field2D,
        u_z: Field2D,
        pressure: Field2D,
        omega_r: Field2D,
        omega_theta: Field2D,
        omega_z: Field2D,
    ) -> Result<AxisymState> {
        for f in [&u_theta, &u_z, &pressure, &omega_r, &omega_theta, &omega_z] {
            u_r.check_same_grid(f, "AxisymState")?;
        }
        let state = AxisymState {
            t,
            u_r,
            u_theta,
            u_z,
            pressure,
            omega_r,
            omega_theta,
            omega_z,
        };
        state.validate_axis()?;
        Ok(state)
    }

    pub fn grid(&self) -> &GridRef {
        self.u_r.grid()
    }

    /// `u_r` and `u_theta` must vanish on the axis.
    pub fn validate_axis(&self) -> Result<()> {
        let tol = AXIS_REL_TOL
            * (1.0 + self.u_r.abs_max().max(self.u_theta.abs_max()));
        for (name, f) in [("u_r", &self.u_r), ("u_theta", &self.u_theta)] {
            let m = f.axis_abs_max();
            if m > tol {
                return Err(Error::InvalidState(format!(
                    "{name} reaches {m:e} on the axis (tolerance {tol:e})"
                )));
            }
        }
        Ok(())
    }

    /// `∫ |u|^2 dx`.
    pub fn kinetic_energy(&self) -> Result<f64> {
        let sq = |f: &Field2D| f.map(|v| v * v);
        let total = sq(&self.u_r).add(&sq(&self.u_theta)).add(&sq(&self.u_z));
        integrate_cyl(&total)
    }

    /// Volume-weighted RMS of the discrete continuity residual.
    pub fn continuity_residual(&self) -> Result<f64> {
        let div = divergence_cyl(&self.u_r, &self.u_z)?;
        Ok(weighted_rms(&div))
    }

    pub fn is_finite(&self) -> bool {
        self.u_r.is_finite()
            && self.u_theta.is_finite()
            && self.u_z.is_finite()
            && self.pressure.is_finite()
    }
}

/// RMS of `f` in the volume measure: `sqrt(∫ f^2 dx / ∫ dx)`.
pub fn weighted_rms(f: &Field2D) -> f64 {
    let g = f.grid();
    let w = g.weights();
    let v = f.values();
    let terms: Vec<f64> = v.iter().zip(w).map(|(&x, &wi)| x * x * wi).collect();
    (pairwise_sum(&terms) / g.volume()).sqrt()
}

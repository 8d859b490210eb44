//! Seeded random test flows.
//!
//! Meridional velocity comes from Gaussian streamfunction modes, so it is
//! exactly divergence-free in the continuum; the swirl is an independent
//! superposition of Gaussian profiles. All derivatives (the vorticity
//! triple) are closed-form, so states built here carry analytic vorticity
//! and integrands can be re-evaluated by dense quadrature oracles.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::Field2D;
use crate::grid::GridRef;
use crate::state::AxisymState;

/// One streamfunction mode `psi = amp * r^2 * exp(-s(r^2 + (z-z0)^2))`.
#[derive(Debug, Clone, Copy)]
pub struct MeridionalMode {
    pub amp: f64,
    pub s: f64,
    pub z0: f64,
}

/// One swirl mode `u_theta = amp * r * exp(-s(r^2 + (z-z0)^2))`.
#[derive(Debug, Clone, Copy)]
pub struct SwirlMode {
    pub amp: f64,
    pub s: f64,
    pub z0: f64,
}

/// Mode lists defining one analytic test flow.
#[derive(Debug, Clone)]
pub struct TestFlow {
    pub meridional: Vec<MeridionalMode>,
    pub swirl: Vec<SwirlMode>,
}

impl TestFlow {
    pub fn u_r(&self, r: f64, z: f64) -> f64 {
        self.meridional
            .iter()
            .map(|m| {
                let dz = z - m.z0;
                2.0 * m.amp * m.s * dz * r * (-m.s * (r * r + dz * dz)).exp()
            })
            .sum()
    }

    pub fn u_z(&self, r: f64, z: f64) -> f64 {
        self.meridional
            .iter()
            .map(|m| {
                let dz = z - m.z0;
                m.amp * (2.0 - 2.0 * m.s * r * r) * (-m.s * (r * r + dz * dz)).exp()
            })
            .sum()
    }

    pub fn u_theta(&self, r: f64, z: f64) -> f64 {
        self.swirl
            .iter()
            .map(|m| {
                let dz = z - m.z0;
                m.amp * r * (-m.s * (r * r + dz * dz)).exp()
            })
            .sum()
    }

    /// `omega_r = -du_theta/dz`.
    pub fn omega_r(&self, r: f64, z: f64) -> f64 {
        self.swirl
            .iter()
            .map(|m| {
                let dz = z - m.z0;
                2.0 * m.amp * m.s * dz * r * (-m.s * (r * r + dz * dz)).exp()
            })
            .sum()
    }

    /// `omega_theta = du_r/dz - du_z/dr`.
    pub fn omega_theta(&self, r: f64, z: f64) -> f64 {
        self.meridional
            .iter()
            .map(|m| {
                let dz = z - m.z0;
                m.amp * m.s * r * (10.0 - 4.0 * m.s * (r * r + dz * dz))
                    * (-m.s * (r * r + dz * dz)).exp()
            })
            .sum()
    }

    /// `omega_z = du_theta/dr + u_theta/r`.
    pub fn omega_z(&self, r: f64, z: f64) -> f64 {
        self.swirl
            .iter()
            .map(|m| {
                let dz = z - m.z0;
                m.amp * (2.0 - 2.0 * m.s * r * r) * (-m.s * (r * r + dz * dz)).exp()
            })
            .sum()
    }

    /// Sample onto a grid, vorticity included analytically.
    pub fn sample(&self, grid: &GridRef, t: f64) -> Result<AxisymState> {
        AxisymState::from_parts(
            t,
            Field2D::from_fn(grid, |r, z| self.u_r(r, z))?,
            Field2D::from_fn(grid, |r, z| self.u_theta(r, z))?,
            Field2D::from_fn(grid, |r, z| self.u_z(r, z))?,
            Field2D::zeros(grid),
            Field2D::from_fn(grid, |r, z| self.omega_r(r, z))?,
            Field2D::from_fn(grid, |r, z| self.omega_theta(r, z))?,
            Field2D::from_fn(grid, |r, z| self.omega_z(r, z))?,
        )
    }
}

/// Randomization ranges for [`random_flow`].
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub meridional_modes: std::ops::RangeInclusive<usize>,
    pub swirl_modes: std::ops::RangeInclusive<usize>,
    pub amp: (f64, f64),
    pub width_rate: (f64, f64),
    pub center: f64,
    /// When set, swirl amplitudes are kept positive (no interior swirl
    /// zeros; useful where fractional powers of `|u_theta|` appear).
    pub positive_swirl: bool,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            meridional_modes: 1..=2,
            swirl_modes: 1..=2,
            amp: (0.3, 1.0),
            width_rate: (0.7, 1.6),
            center: 1.0,
            positive_swirl: false,
        }
    }
}

/// Draw one random analytic flow.
pub fn random_flow(rng: &mut ChaCha8Rng, spec: &EnsembleSpec) -> TestFlow {
    let n_m = rng.gen_range(spec.meridional_modes.clone());
    let n_s = rng.gen_range(spec.swirl_modes.clone());
    let signed_amp = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(spec.amp.0..=spec.amp.1);
        if rng.gen_bool(0.5) {
            -a
        } else {
            a
        }
    };
    let meridional = (0..n_m)
        .map(|_| MeridionalMode {
            amp: signed_amp(rng),
            s: rng.gen_range(spec.width_rate.0..=spec.width_rate.1),
            z0: rng.gen_range(-spec.center..=spec.center),
        })
        .collect();
    let swirl = (0..n_s)
        .map(|_| SwirlMode {
            amp: if spec.positive_swirl {
                rng.gen_range(spec.amp.0..=spec.amp.1)
            } else {
                signed_amp(rng)
            },
            s: rng.gen_range(spec.width_rate.0..=spec.width_rate.1),
            z0: rng.gen_range(-spec.center..=spec.center),
        })
        .collect();
    TestFlow { meridional, swirl }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CylGrid;
    use crate::operators::{curl_cyl, divergence_cyl};
    use crate::state::weighted_rms;
    use axireg_oracle::central_diff;
    use rand::SeedableRng;

    fn sample_flow(seed: u64) -> TestFlow {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_flow(&mut rng, &EnsembleSpec::default())
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let flow = sample_flow(3);
        for &(r, z) in &[(0.4, 0.6), (1.3, -0.9), (2.0, 0.1)] {
            let wr = -central_diff(|x| flow.u_theta(r, x), z);
            assert!((flow.omega_r(r, z) - wr).abs() < 1e-8 * (1.0 + wr.abs()));
            let wt = central_diff(|x| flow.u_r(r, x), z) - central_diff(|x| flow.u_z(x, z), r);
            assert!((flow.omega_theta(r, z) - wt).abs() < 1e-8 * (1.0 + wt.abs()));
            let wz = central_diff(|x| flow.u_theta(x, z), r) + flow.u_theta(r, z) / r;
            assert!((flow.omega_z(r, z) - wz).abs() < 1e-8 * (1.0 + wz.abs()));
            let div = central_diff(|x| flow.u_r(x, z), r)
                + flow.u_r(r, z) / r
                + central_diff(|x| flow.u_z(r, x), z);
            assert!(div.abs() < 1e-7, "continuum divergence {div}");
        }
    }

    #[test]
    fn sampled_states_are_discretely_consistent() {
        let g = CylGrid::shared(6.0, 6.0, 128, 128).unwrap();
        for seed in 0..5 {
            let flow = sample_flow(seed);
            let s = flow.sample(&g, 0.0).unwrap();
            let div = divergence_cyl(&s.u_r, &s.u_z).unwrap();
            assert!(weighted_rms(&div) < 5e-3, "divergence {}", weighted_rms(&div));
            let (wr, wt, wz) = curl_cyl(&s.u_r, &s.u_theta, &s.u_z).unwrap();
            let err = weighted_rms(&wr.sub(&s.omega_r))
                + weighted_rms(&wt.sub(&s.omega_theta))
                + weighted_rms(&wz.sub(&s.omega_z));
            assert!(err < 1e-2, "curl mismatch {err}");
        }
    }
}

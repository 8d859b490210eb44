//! Manufactured solution for the axisymmetric momentum equations.
//!
//! The velocity comes from a Gaussian streamfunction plus an independent
//! swirl profile, so it is exactly divergence-free and satisfies the axis
//! conditions; the pressure is a separate Gaussian. The forcing that makes
//! this an exact solution of the forced equations is assembled symbolically,
//! term by term, from the Gaussian-polynomial calculus.

use crate::sym::{self, GaussPoly};

/// Tuning knobs for the manufactured fields.
#[derive(Debug, Clone, Copy)]
pub struct MmsParams {
    pub nu: f64,
    pub psi_amp: f64,
    pub psi_width: f64,
    pub swirl_amp: f64,
    pub swirl_width: f64,
    pub p_amp: f64,
    pub p_width: f64,
    pub om_psi: f64,
    pub om_swirl: f64,
    pub om_p: f64,
}

impl Default for MmsParams {
    fn default() -> Self {
        Self {
            nu: 0.05,
            psi_amp: 0.8,
            psi_width: 1.0,
            swirl_amp: 1.0,
            swirl_width: 1.1,
            p_amp: 2.0,
            p_width: 0.9,
            om_psi: 2.0,
            om_swirl: 2.5,
            om_p: 3.0,
        }
    }
}

/// Exact solution `(u_r, u_theta, u_z, p)(r, z, t)` and its forcing.
#[derive(Debug, Clone)]
pub struct Manufactured {
    pub params: MmsParams,
    ur: GaussPoly,
    ut: GaussPoly,
    uz: GaussPoly,
    p: GaussPoly,
    w_r: GaussPoly,
    w_t: GaussPoly,
    w_z: GaussPoly,
    // Forcing pieces grouped by their time factor.
    fr_dt: GaussPoly,
    fr_adv: GaussPoly,
    fr_cent: GaussPoly,
    fr_press: GaussPoly,
    fr_visc: GaussPoly,
    ft_dt: GaussPoly,
    ft_adv: GaussPoly,
    ft_visc: GaussPoly,
    fz_dt: GaussPoly,
    fz_adv: GaussPoly,
    fz_press: GaussPoly,
    fz_visc: GaussPoly,
}

impl Manufactured {
    pub fn new(params: MmsParams) -> Self {
        let psi = GaussPoly::term(params.psi_amp, 2, 1, params.psi_width);
        let ur = psi.ddz().div_r(1).scale(-1.0);
        let uz = psi.ddr().div_r(1);
        let ut = GaussPoly::term(params.swirl_amp, 1, 0, params.swirl_width);
        let p = GaussPoly::term(params.p_amp, 0, 0, params.p_width);

        debug_assert!(sym::divergence(&ur, &uz).terms().is_empty());

        let (w_r, w_t, w_z) = sym::curl(&ur, &ut, &uz);

        let adv = |x: &GaussPoly| ur.mul(&x.ddr()).add(&uz.mul(&x.ddz()));

        Self {
            fr_dt: ur.clone(),
            fr_adv: adv(&ur),
            fr_cent: ut.mul(&ut).div_r(1).scale(-1.0),
            fr_press: p.ddr(),
            fr_visc: sym::swirl_laplacian(&ur).scale(-params.nu),
            ft_dt: ut.clone(),
            ft_adv: adv(&ut).add(&ur.mul(&ut).div_r(1)),
            ft_visc: sym::swirl_laplacian(&ut).scale(-params.nu),
            fz_dt: uz.clone(),
            fz_adv: adv(&uz),
            fz_press: p.ddz(),
            fz_visc: sym::axial_laplacian(&uz).scale(-params.nu),
            params,
            ur,
            ut,
            uz,
            p,
            w_r,
            w_t,
            w_z,
        }
    }

    fn tau_psi(&self, t: f64) -> f64 {
        (self.params.om_psi * t).cos()
    }
    fn dtau_psi(&self, t: f64) -> f64 {
        -self.params.om_psi * (self.params.om_psi * t).sin()
    }
    fn tau_swirl(&self, t: f64) -> f64 {
        (self.params.om_swirl * t + 0.5).cos()
    }
    fn dtau_swirl(&self, t: f64) -> f64 {
        -self.params.om_swirl * (self.params.om_swirl * t + 0.5).sin()
    }
    fn tau_p(&self, t: f64) -> f64 {
        (self.params.om_p * t + 0.2).cos()
    }

    pub fn velocity(&self, r: f64, z: f64, t: f64) -> (f64, f64, f64) {
        (
            self.ur.eval(r, z) * self.tau_psi(t),
            self.ut.eval(r, z) * self.tau_swirl(t),
            self.uz.eval(r, z) * self.tau_psi(t),
        )
    }

    pub fn pressure(&self, r: f64, z: f64, t: f64) -> f64 {
        self.p.eval(r, z) * self.tau_p(t)
    }

    pub fn vorticity(&self, r: f64, z: f64, t: f64) -> (f64, f64, f64) {
        (
            self.w_r.eval(r, z) * self.tau_swirl(t),
            self.w_t.eval(r, z) * self.tau_psi(t),
            self.w_z.eval(r, z) * self.tau_swirl(t),
        )
    }

    /// Forcing `(F_r, F_theta, F_z)` that makes the fields above an exact
    /// solution of the forced momentum equations.
    pub fn forcing(&self, r: f64, z: f64, t: f64) -> (f64, f64, f64) {
        let tp = self.tau_psi(t);
        let ts = self.tau_swirl(t);
        let f_r = self.fr_dt.eval(r, z) * self.dtau_psi(t)
            + self.fr_adv.eval(r, z) * tp * tp
            + self.fr_cent.eval(r, z) * ts * ts
            + self.fr_press.eval(r, z) * self.tau_p(t)
            + self.fr_visc.eval(r, z) * tp;
        let f_t = self.ft_dt.eval(r, z) * self.dtau_swirl(t)
            + self.ft_adv.eval(r, z) * tp * ts
            + self.ft_visc.eval(r, z) * ts;
        let f_z = self.fz_dt.eval(r, z) * self.dtau_psi(t)
            + self.fz_adv.eval(r, z) * tp * tp
            + self.fz_press.eval(r, z) * self.tau_p(t)
            + self.fz_visc.eval(r, z) * tp;
        (f_r, f_t, f_z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::central_diff;

    /// Rebuild the forcing at a point from nothing but finite differences of
    /// the velocity/pressure closures and compare with the symbolic assembly.
    #[test]
    fn forcing_matches_finite_differences() {
        let m = Manufactured::new(MmsParams::default());
        let nu = m.params.nu;
        for &(r, z, t) in &[(0.6, 0.4, 0.15), (1.2, -0.9, 0.4), (0.35, 1.3, 0.0)] {
            let (ur, ut, uz) = m.velocity(r, z, t);
            let dur = |r: f64, z: f64| m.velocity(r, z, t).0;
            let dut = |r: f64, z: f64| m.velocity(r, z, t).1;
            let duz = |r: f64, z: f64| m.velocity(r, z, t).2;

            let ddr = |f: &dyn Fn(f64, f64) -> f64| central_diff(|x| f(x, z), r);
            let ddz = |f: &dyn Fn(f64, f64) -> f64| central_diff(|x| f(r, x), z);
            let d2 = |f: &dyn Fn(f64, f64) -> f64, along_r: bool| {
                let g = |x: f64| if along_r { f(x, z) } else { f(r, x) };
                let x0 = if along_r { r } else { z };
                let h = 1e-4;
                (g(x0 + h) - 2.0 * g(x0) + g(x0 - h)) / (h * h)
            };

            let lap_swirl = |f: &dyn Fn(f64, f64) -> f64| {
                d2(f, true) + ddr(f) / r + d2(f, false) - f(r, z) / (r * r)
            };
            let lap_axial = |f: &dyn Fn(f64, f64) -> f64| d2(f, true) + ddr(f) / r + d2(f, false);

            let dt_ur = central_diff(|s| m.velocity(r, z, s).0, t);
            let dt_ut = central_diff(|s| m.velocity(r, z, s).1, t);
            let dt_uz = central_diff(|s| m.velocity(r, z, s).2, t);
            let dp_dr = central_diff(|x| m.pressure(x, z, t), r);
            let dp_dz = central_diff(|x| m.pressure(r, x, t), z);

            let f_r = dt_ur + ur * ddr(&dur) + uz * ddz(&dur) - ut * ut / r + dp_dr
                - nu * lap_swirl(&dur);
            let f_t =
                dt_ut + ur * ddr(&dut) + uz * ddz(&dut) + ur * ut / r - nu * lap_swirl(&dut);
            let f_z = dt_uz + ur * ddr(&duz) + uz * ddz(&duz) + dp_dz - nu * lap_axial(&duz);

            let (g_r, g_t, g_z) = m.forcing(r, z, t);
            assert!((f_r - g_r).abs() < 2e-5 * (1.0 + g_r.abs()), "F_r at {r},{z},{t}");
            assert!((f_t - g_t).abs() < 2e-5 * (1.0 + g_t.abs()), "F_t at {r},{z},{t}");
            assert!((f_z - g_z).abs() < 2e-5 * (1.0 + g_z.abs()), "F_z at {r},{z},{t}");
        }
    }

    #[test]
    fn velocity_is_divergence_free_and_axis_clean() {
        let m = Manufactured::new(MmsParams::default());
        for &(r, z) in &[(0.5, 0.5), (1.5, -1.0)] {
            let div = central_diff(|x| m.velocity(x, z, 0.3).0, r)
                + m.velocity(r, z, 0.3).0 / r
                + central_diff(|x| m.velocity(r, x, 0.3).2, z);
            assert!(div.abs() < 1e-7);
        }
        let (ur0, ut0, _) = m.velocity(0.0, 0.7, 0.2);
        assert_eq!(ur0, 0.0);
        assert_eq!(ut0, 0.0);
    }
}

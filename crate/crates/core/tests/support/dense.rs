//! Brute-force reference evaluation for the acceptance suite.

use axireg_core::exponents::{CriterionParams, SerrinCondition};

/// Analytic field closures the dense quadrature consumes.
pub struct FlowFields<'a> {
    pub u_r: &'a dyn Fn(f64, f64) -> f64,
    pub u_theta: &'a dyn Fn(f64, f64) -> f64,
    pub omega_theta: &'a dyn Fn(f64, f64) -> f64,
    pub omega_r: &'a dyn Fn(f64, f64) -> f64,
}

pub struct DenseEval {
    pub phi_p: f64,
    pub omega_q: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i3_unsigned: f64,
    pub f_serrin: f64,
    pub g_ur: f64,
}

/// Brute-force Simpson quadrature of the analytic integrands on a dense
/// grid, with field values cached per node.
pub fn dense_functionals(
    flow: &FlowFields,
    params: &CriterionParams,
    cond: &SerrinCondition,
    extent: f64,
    n: usize,
) -> DenseEval {
    let n = if n.is_multiple_of(2) { n } else { n + 1 }; // Simpson needs even panels
    let h_r = extent / n as f64;
    let h_z = 2.0 * extent / n as f64;
    let simpson_c = |k: usize, n: usize| -> f64 {
        if k == 0 || k == n {
            1.0
        } else if !k.is_multiple_of(2) {
            4.0
        } else {
            2.0
        }
    };
    let mut phi_p = 0.0;
    let mut omega_q = 0.0;
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let mut i3 = 0.0;
    let mut i3u = 0.0;
    let mut g_ur = 0.0;
    for k in 0..=n {
        let r = k as f64 * h_r;
        if r == 0.0 {
            continue; // measure factor r vanishes
        }
        let cr = simpson_c(k, n) * h_r / 3.0;
        let r_mu = r.powf(params.mu);
        let r_alpha_q = r.powf(params.alpha * params.q);
        for l in 0..=n {
            let z = -extent + l as f64 * h_z;
            let w = 2.0 * std::f64::consts::PI * r * cr * simpson_c(l, n) * h_z / 3.0;
            let u_r = (flow.u_r)(r, z);
            let u_t = (flow.u_theta)(r, z);
            let w_t = (flow.omega_theta)(r, z);
            let w_r = (flow.omega_r)(r, z);
            let phi_pow = (u_t.abs() / r_mu).powf(params.p);
            let om_pow = (w_t.abs() / r.powf(params.alpha)).powf(params.q);
            phi_p += w * phi_pow;
            omega_q += w * om_pow;
            i1 += w * (-u_r).max(0.0) / r * phi_pow;
            i2 += w * u_r.max(0.0) / r * om_pow;
            let i3_term = u_t / r
                * (-w_r)
                * if w_t == 0.0 {
                    0.0
                } else {
                    w_t.signum() * w_t.abs().powf(params.q - 1.0)
                }
                / r_alpha_q;
            i3 += w * i3_term;
            i3u += w * i3_term.abs();
            g_ur += w * u_r.max(0.0).powf(10.0 / 3.0);
        }
    }
    let f_inner = axireg_oracle::integral_cyl_rcut(
        |r, z| {
            if r == 0.0 {
                0.0
            } else {
                (r.powf(cond.d) * (flow.u_r)(r, z).max(0.0)).powf(cond.s)
            }
        },
        cond.delta1,
        extent,
        512,
        2 * n,
    );
    DenseEval {
        phi_p,
        omega_q,
        i1,
        i2,
        i3,
        i3_unsigned: i3u,
        f_serrin: if f_inner <= 0.0 {
            0.0
        } else {
            f_inner.powf(cond.w / cond.s)
        },
        g_ur,
    }
}

//! Pressure projection.
//!
//! The corrector potential solves the normal equations `G* G psi = G* u`
//! where `G` is the same centered/one-sided gradient the solver uses for
//! the pressure force and `G*` is its exact adjoint in a positive node
//! weighting. The induced divergence `G* u` is the conservative centered
//! form `(1/r) d(r u_r)/dr + du_z/dz` in the interior and the regular axis
//! limit `2 du_r/dr + du_z/dz` on the axis (the axis weight is chosen to
//! make that so). Conjugate gradients on the weighted normal equations are
//! guaranteed to converge, and the CG residual equals the divergence of the
//! corrected field, so the convergence test is the contract itself.

use crate::error::{Error, Result};
use crate::field::{pairwise_sum, Field2D};
use crate::grid::GridRef;
use crate::operators::{ddr, ddz, Parity};

/// Node weights of the projection inner product: `r dr dz` with trapezoid
/// end factors, except that the axis line carries `dr^2/4 dz` so that the
/// adjoint divergence reproduces the axis limit of the continuity operator.
fn projection_weights(grid: &GridRef) -> Vec<f64> {
    let (n_r, n_z) = (grid.n_r(), grid.n_z());
    let (dr, dz) = (grid.dr(), grid.dz());
    let mut w = vec![0.0; n_r * n_z];
    for i in 0..n_r {
        let rad = if i == 0 {
            dr * dr / 4.0
        } else if i == n_r - 1 {
            grid.r(i) * dr / 2.0
        } else {
            grid.r(i) * dr
        };
        for j in 0..n_z {
            let zc = if j == 0 || j == n_z - 1 { dz / 2.0 } else { dz };
            w[i * n_z + j] = rad * zc;
        }
    }
    w
}

pub(crate) struct Projector {
    grid: GridRef,
    w: Vec<f64>,
    total_w: f64,
}

impl Projector {
    pub fn new(grid: &GridRef) -> Self {
        let w = projection_weights(grid);
        let total_w = pairwise_sum(&w);
        Projector {
            grid: grid.clone(),
            w,
            total_w,
        }
    }

    /// Gradient used both for the correction and inside the normal
    /// equations.
    fn gradient(&self, psi: &Field2D) -> (Field2D, Field2D) {
        (ddr(psi, Parity::Even), ddz(psi))
    }

    /// Exact adjoint of [`Self::gradient`] in the weighted inner product:
    /// `(adj v)_k = (1/w_k) sum_m w_m G_{m,k} v_m`, accumulated by
    /// transposing the gradient stencils.
    fn gradient_adjoint(&self, v_r: &Field2D, v_z: &Field2D) -> Vec<f64> {
        let g = &self.grid;
        let (n_r, n_z) = (g.n_r(), g.n_z());
        let (dr, dz) = (g.dr(), g.dz());
        let mut acc = vec![0.0; n_r * n_z];
        let idx = |i: usize, j: usize| i * n_z + j;
        // Radial component: output rows 1..n_r-1 (the axis output of the
        // even-parity derivative is identically zero).
        for i in 1..n_r - 1 {
            for j in 0..n_z {
                let c = self.w[idx(i, j)] * v_r.get(i, j) / (2.0 * dr);
                acc[idx(i + 1, j)] += c;
                acc[idx(i - 1, j)] -= c;
            }
        }
        {
            let m = n_r - 1;
            for j in 0..n_z {
                let c = self.w[idx(m, j)] * v_r.get(m, j) / (2.0 * dr);
                acc[idx(m, j)] += 3.0 * c;
                acc[idx(m - 1, j)] -= 4.0 * c;
                acc[idx(m - 2, j)] += c;
            }
        }
        // Axial component: one-sided rows at both ends.
        for i in 0..n_r {
            for j in 1..n_z - 1 {
                let c = self.w[idx(i, j)] * v_z.get(i, j) / (2.0 * dz);
                acc[idx(i, j + 1)] += c;
                acc[idx(i, j - 1)] -= c;
            }
            let c0 = self.w[idx(i, 0)] * v_z.get(i, 0) / (2.0 * dz);
            acc[idx(i, 0)] -= 3.0 * c0;
            acc[idx(i, 1)] += 4.0 * c0;
            acc[idx(i, 2)] -= c0;
            let m = n_z - 1;
            let cm = self.w[idx(i, m)] * v_z.get(i, m) / (2.0 * dz);
            acc[idx(i, m)] += 3.0 * cm;
            acc[idx(i, m - 1)] -= 4.0 * cm;
            acc[idx(i, m - 2)] += cm;
        }
        for (a, w) in acc.iter_mut().zip(&self.w) {
            *a /= w;
        }
        acc
    }

    /// Weighted RMS of the induced divergence `G* u` of a meridional field:
    /// the residual the projection drives below tolerance.
    pub fn divergence_rms(&self, u_r: &Field2D, u_z: &Field2D) -> f64 {
        let div = self.gradient_adjoint(u_r, u_z);
        self.rms(&div)
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let terms: Vec<f64> = a
            .iter()
            .zip(b)
            .zip(&self.w)
            .map(|((&x, &y), &w)| x * y * w)
            .collect();
        pairwise_sum(&terms)
    }

    fn rms(&self, a: &[f64]) -> f64 {
        (self.dot(a, a) / self.total_w).sqrt()
    }

    fn remove_mean(&self, x: &mut [f64]) {
        let mean = pairwise_sum(
            &x.iter().zip(&self.w).map(|(&v, &w)| v * w).collect::<Vec<_>>(),
        ) / self.total_w;
        for v in x.iter_mut() {
            *v -= mean;
        }
    }

    fn apply_normal(&self, psi: &Field2D) -> Vec<f64> {
        let (gr, gz) = self.gradient(psi);
        self.gradient_adjoint(&gr, &gz)
    }

    /// Project `(u_r, u_z)` onto the kernel of the induced divergence:
    /// conjugate gradients on the weighted normal equations until the
    /// divergence RMS of the corrected field is at most `tol`.
    pub fn project(
        &self,
        u_r: &mut Field2D,
        u_z: &mut Field2D,
        tol: f64,
        max_iters: usize,
    ) -> Result<ProjectionOutcome> {
        let grid = &self.grid;
        let n = grid.len();
        let mut b = self.gradient_adjoint(u_r, u_z);
        self.remove_mean(&mut b);
        let b_rms = self.rms(&b);
        if b_rms <= tol {
            return Ok(ProjectionOutcome {
                potential: Field2D::zeros(grid),
                residual: b_rms,
                iterations: 0,
            });
        }

        let target = tol * tol * self.total_w;
        let mut psi = vec![0.0; n];
        let mut r = b;
        let mut p = r.clone();
        let mut rr = self.dot(&r, &r);
        let mut history = vec![b_rms];
        let mut converged = false;
        let mut iterations = 0;
        for it in 0..max_iters {
            if rr <= target {
                converged = true;
                break;
            }
            let p_field = Field2D::from_values(grid, p.clone())?;
            let ap = self.apply_normal(&p_field);
            let pap = self.dot(&p, &ap);
            if !(pap > 0.0) {
                break;
            }
            let alpha = rr / pap;
            for k in 0..n {
                psi[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            if it % 64 == 63 {
                self.remove_mean(&mut r);
            }
            let rr_new = self.dot(&r, &r);
            history.push((rr_new / self.total_w).sqrt());
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
            iterations = it + 1;
        }
        if !converged && rr > target {
            let keep = history.len().saturating_sub(12);
            return Err(Error::PoissonDiverged {
                tol,
                history: history[keep..].to_vec(),
            });
        }
        let psi = Field2D::from_values(grid, psi)?;
        let (gr, gz) = self.gradient(&psi);
        *u_r = u_r.sub(&gr);
        *u_z = u_z.sub(&gz);
        Ok(ProjectionOutcome {
            potential: psi,
            residual: (rr / self.total_w).sqrt(),
            iterations,
        })
    }
}

/// Result of one projection.
#[derive(Debug, Clone)]
pub struct ProjectionOutcome {
    /// Corrector potential.
    pub potential: Field2D,
    /// Final weighted RMS of the induced divergence of the corrected field.
    pub residual: f64,
    pub iterations: usize,
}

/// One-shot projection helper.
pub fn project(
    u_r: &mut Field2D,
    u_z: &mut Field2D,
    tol: f64,
    max_iters: usize,
) -> Result<ProjectionOutcome> {
    Projector::new(u_r.grid()).project(u_r, u_z, tol, max_iters)
}

/// Weighted RMS of the solver's discrete continuity residual for a
/// meridional velocity pair.
pub fn continuity_rms(u_r: &Field2D, u_z: &Field2D) -> f64 {
    Projector::new(u_r.grid()).divergence_rms(u_r, u_z)
}

//! Discrete differential operators in cylindrical coordinates.
//!
//! Interior stencils are second-order centered differences. The axis is
//! handled through parity: `u_r`, `u_theta` and `omega_theta` extend oddly
//! across `r = 0`, while `u_z` and the pressure extend evenly, which keeps
//! every `1/r` and `1/r^2` term finite. Outer boundaries use one-sided
//! second-order closures.

use crate::error::{Error, Result};
use crate::field::Field2D;

/// Reflection behavior of an axisymmetric component across the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `f(-r) = f(r)`: `u_z`, pressure, `omega_z`.
    Even,
    /// `f(-r) = -f(r)`: `u_r`, `u_theta`, `omega_r`, `omega_theta`.
    Odd,
}

/// Stencil description: interior accuracy and boundary closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StencilSpec {
    pub order: usize,
    pub boundary_scheme: &'static str,
}

/// The scheme used by every operator in this module.
pub const STENCIL: StencilSpec = StencilSpec {
    order: 2,
    boundary_scheme: "one-sided second-order at r_max and |z| = z_half; parity ghosts at the axis",
};

const AXIS_REL_TOL: f64 = 1e-10;

/// d/dr with parity ghosts at the axis and a one-sided closure at `r_max`.
pub fn ddr(f: &Field2D, parity: Parity) -> Field2D {
    let g = f.grid();
    let (n_r, n_z) = (g.n_r(), g.n_z());
    let h = g.dr();
    let mut out = Field2D::zeros(g);
    for j in 0..n_z {
        let axis = match parity {
            // ghost f(-dr) = -f(dr)
            Parity::Odd => f.get(1, j) / h,
            Parity::Even => 0.0,
        };
        out.set(0, j, axis);
        for i in 1..n_r - 1 {
            out.set(i, j, (f.get(i + 1, j) - f.get(i - 1, j)) / (2.0 * h));
        }
        let m = n_r - 1;
        out.set(
            m,
            j,
            (3.0 * f.get(m, j) - 4.0 * f.get(m - 1, j) + f.get(m - 2, j)) / (2.0 * h),
        );
    }
    out
}

/// d2/dr2 with parity ghosts at the axis.
pub fn d2dr2(f: &Field2D, parity: Parity) -> Field2D {
    let g = f.grid();
    let (n_r, n_z) = (g.n_r(), g.n_z());
    let h2 = g.dr() * g.dr();
    let mut out = Field2D::zeros(g);
    for j in 0..n_z {
        let axis = match parity {
            Parity::Odd => -2.0 * f.get(0, j) / h2,
            Parity::Even => 2.0 * (f.get(1, j) - f.get(0, j)) / h2,
        };
        out.set(0, j, axis);
        for i in 1..n_r - 1 {
            out.set(
                i,
                j,
                (f.get(i + 1, j) - 2.0 * f.get(i, j) + f.get(i - 1, j)) / h2,
            );
        }
        let m = n_r - 1;
        out.set(
            m,
            j,
            (2.0 * f.get(m, j) - 5.0 * f.get(m - 1, j) + 4.0 * f.get(m - 2, j) - f.get(m - 3, j))
                / h2,
        );
    }
    out
}

/// d/dz with one-sided closures at both ends.
pub fn ddz(f: &Field2D) -> Field2D {
    let g = f.grid();
    let (n_r, n_z) = (g.n_r(), g.n_z());
    let h = g.dz();
    let mut out = Field2D::zeros(g);
    for i in 0..n_r {
        out.set(
            i,
            0,
            (-3.0 * f.get(i, 0) + 4.0 * f.get(i, 1) - f.get(i, 2)) / (2.0 * h),
        );
        for j in 1..n_z - 1 {
            out.set(i, j, (f.get(i, j + 1) - f.get(i, j - 1)) / (2.0 * h));
        }
        let m = n_z - 1;
        out.set(
            i,
            m,
            (3.0 * f.get(i, m) - 4.0 * f.get(i, m - 1) + f.get(i, m - 2)) / (2.0 * h),
        );
    }
    out
}

/// d2/dz2 with one-sided closures at both ends.
pub fn d2dz2(f: &Field2D) -> Field2D {
    let g = f.grid();
    let (n_r, n_z) = (g.n_r(), g.n_z());
    let h2 = g.dz() * g.dz();
    let mut out = Field2D::zeros(g);
    for i in 0..n_r {
        out.set(
            i,
            0,
            (2.0 * f.get(i, 0) - 5.0 * f.get(i, 1) + 4.0 * f.get(i, 2) - f.get(i, 3)) / h2,
        );
        for j in 1..n_z - 1 {
            out.set(
                i,
                j,
                (f.get(i, j + 1) - 2.0 * f.get(i, j) + f.get(i, j - 1)) / h2,
            );
        }
        let m = n_z - 1;
        out.set(
            i,
            m,
            (2.0 * f.get(i, m) - 5.0 * f.get(i, m - 1) + 4.0 * f.get(i, m - 2) - f.get(i, m - 3))
                / h2,
        );
    }
    out
}

/// Continuity residual `du_r/dr + u_r/r + du_z/dz`.
///
/// On the axis the `u_r/r` term is replaced by its limit `du_r/dr`.
pub fn divergence_cyl(u_r: &Field2D, u_z: &Field2D) -> Result<Field2D> {
    u_r.check_same_grid(u_z, "divergence_cyl")?;
    let g = u_r.grid();
    let dur = ddr(u_r, Parity::Odd);
    let duz = ddz(u_z);
    let mut out = Field2D::zeros(g);
    for j in 0..g.n_z() {
        out.set(0, j, 2.0 * dur.get(0, j) + duz.get(0, j));
        for i in 1..g.n_r() {
            out.set(
                i,
                j,
                dur.get(i, j) + u_r.get(i, j) / g.r(i) + duz.get(i, j),
            );
        }
    }
    Ok(out)
}

/// Vorticity components of `(u_r, u_theta, u_z)`:
/// `omega_r = -du_t/dz`, `omega_theta = du_r/dz - du_z/dr`,
/// `omega_z = du_t/dr + u_t/r` (with the axis value `2 du_t/dr`).
pub fn curl_cyl(
    u_r: &Field2D,
    u_theta: &Field2D,
    u_z: &Field2D,
) -> Result<(Field2D, Field2D, Field2D)> {
    u_r.check_same_grid(u_theta, "curl_cyl")?;
    u_r.check_same_grid(u_z, "curl_cyl")?;
    let g = u_r.grid();
    let omega_r = ddz(u_theta).scale(-1.0);
    let omega_theta = ddz(u_r).sub(&ddr(u_z, Parity::Even));
    let dut = ddr(u_theta, Parity::Odd);
    let mut omega_z = Field2D::zeros(g);
    for j in 0..g.n_z() {
        omega_z.set(0, j, 2.0 * dut.get(0, j));
        for i in 1..g.n_r() {
            omega_z.set(i, j, dut.get(i, j) + u_theta.get(i, j) / g.r(i));
        }
    }
    Ok((omega_r, omega_theta, omega_z))
}

/// Viscous operator of the swirl equation:
/// `(1/r) d/dr(r df/dr) + d2f/dz2 - f/r^2`, for fields vanishing on the axis.
///
/// For `f ~ c(z) r` near the axis every term cancels in the limit, so the
/// axis row is exactly zero. Fields with nonzero axis values are rejected:
/// the operator is singular for them.
pub fn swirl_laplacian(f: &Field2D) -> Result<Field2D> {
    let axis_max = f.axis_abs_max();
    let tol = AXIS_REL_TOL * (1.0 + f.abs_max());
    if axis_max > tol {
        return Err(Error::AxisNotZero {
            op: "swirl_laplacian",
            max_axis: axis_max,
            tol,
        });
    }
    let g = f.grid();
    let frr = d2dr2(f, Parity::Odd);
    let fr = ddr(f, Parity::Odd);
    let fzz = d2dz2(f);
    let mut out = Field2D::zeros(g);
    for j in 0..g.n_z() {
        for i in 1..g.n_r() {
            let r = g.r(i);
            out.set(
                i,
                j,
                frr.get(i, j) + fr.get(i, j) / r - f.get(i, j) / (r * r) + fzz.get(i, j),
            );
        }
    }
    Ok(out)
}

/// Viscous operator of the axial equation:
/// `(1/r) d/dr(r df/dr) + d2f/dz2`, for even fields (no axis condition).
///
/// On the axis `df/dr` vanishes by parity and `(1/r) d/dr(r df/dr)`
/// tends to `2 d2f/dr2`.
pub fn axial_laplacian(f: &Field2D) -> Field2D {
    let g = f.grid();
    let frr = d2dr2(f, Parity::Even);
    let fr = ddr(f, Parity::Even);
    let fzz = d2dz2(f);
    let mut out = Field2D::zeros(g);
    for j in 0..g.n_z() {
        out.set(0, j, 2.0 * frr.get(0, j) + fzz.get(0, j));
        for i in 1..g.n_r() {
            out.set(i, j, frr.get(i, j) + fr.get(i, j) / g.r(i) + fzz.get(i, j));
        }
    }
    out
}

/// Meridional gradient `(df/dr, df/dz)` of an even scalar (pressure form).
pub fn gradient_cyl(f: &Field2D) -> (Field2D, Field2D) {
    (ddr(f, Parity::Even), ddz(f))
}

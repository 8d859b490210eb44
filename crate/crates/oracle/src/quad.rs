//! Dense brute-force quadrature over the truncated axisymmetric domain.
//!
//! Uses composite Simpson rules (different from the production trapezoid
//! rule) on a caller-chosen resolution, with the measure `2*pi*r dr dz`.
//! Radial cut integrals place the cut radius on an exact panel boundary so
//! the reference value is not polluted by cut-cell error.

use std::f64::consts::PI;

/// Composite Simpson on `[a, b]` with `n` intervals (rounded up to even).
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = if n.is_multiple_of(2) { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k.is_multiple_of(2) { 2.0 } else { 4.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

/// `∫ f dx` over `[0, r_max] x [-z_half, z_half]` with measure `2 pi r dr dz`.
pub fn integral_cyl<F>(f: F, r_max: f64, z_half: f64, n_r: usize, n_z: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    simpson(
        |z| simpson(|r| 2.0 * PI * r * f(r, z), 0.0, r_max, n_r),
        -z_half,
        z_half,
        n_z,
    )
}

/// Same integral restricted to `r < r_cut`, with `r_cut` as a panel boundary.
pub fn integral_cyl_rcut<F>(f: F, r_cut: f64, z_half: f64, n_r: usize, n_z: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    simpson(
        |z| simpson(|r| 2.0 * PI * r * f(r, z), 0.0, r_cut, n_r),
        -z_half,
        z_half,
        n_z,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_against_closed_form() {
        // ∫ e^{-2r^2-2z^2} 2 pi r dr dz = (pi/2)^{3/2}
        let got = integral_cyl(|r, z| (-2.0 * (r * r + z * z)).exp(), 8.0, 8.0, 1600, 1600);
        let expect = (PI / 2.0).powf(1.5);
        assert!((got - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn cylinder_volume() {
        let got = integral_cyl(|_, _| 1.0, 1.0, 1.0, 64, 64);
        assert!((got - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
    }

    #[test]
    fn radial_cut_against_incomplete_gamma() {
        // ∫_{r<1/2} (r e^{-r^2-z^2})^6 dx
        //   = 2 pi * [ (1/2)∫_0^{1/4} x^3 e^{-6x} dx ] * sqrt(pi/6)
        // with the r-part an incomplete gamma: gamma(4, 3/2)/6^4.
        let got = integral_cyl_rcut(
            |r, z| (r * (-(r * r + z * z)).exp()).powi(6),
            0.5,
            8.0,
            600,
            1200,
        );
        let x = 1.5_f64;
        let gamma4 = 6.0 * (1.0 - (-x).exp() * (1.0 + x + x * x / 2.0 + x * x * x / 6.0));
        let expect = 2.0 * PI * 0.5 * gamma4 / 6.0_f64.powi(4) * (PI / 6.0).sqrt();
        assert!((got - expect).abs() < 1e-9 * expect);
    }
}

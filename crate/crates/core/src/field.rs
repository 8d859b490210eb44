//! Axisymmetric scalar fields and weighted reductions.
//!
//! Fields are immutable value snapshots over a shared grid. All reductions
//! use a fixed pairwise summation order, so results are reproducible
//! bit-for-bit for a given grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridRef;

/// One axisymmetric scalar component sampled on a [`crate::grid::CylGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: GridRef,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: &GridRef) -> Field2D {
        Field2D {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &GridRef, c: f64) -> Field2D {
        Field2D {
            grid: Arc::clone(grid),
            values: vec![c; grid.len()],
        }
    }

    /// Sample `f(r, z)` on every node. Rejects non-finite samples.
    pub fn from_fn(grid: &GridRef, f: impl Fn(f64, f64) -> f64) -> Result<Field2D> {
        let mut values = vec![0.0; grid.len()];
        for i in 0..grid.n_r() {
            let r = grid.r(i);
            for j in 0..grid.n_z() {
                let v = f(r, grid.z(j));
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        op: "from_fn",
                        i_r: i,
                        i_z: j,
                        r,
                        z: grid.z(j),
                        value: v,
                    });
                }
                values[grid.idx(i, j)] = v;
            }
        }
        Ok(Field2D {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_values(grid: &GridRef, values: Vec<f64>) -> Result<Field2D> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value buffer has {} entries for a {} grid",
                values.len(),
                grid.describe()
            )));
        }
        Ok(Field2D {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i_r: usize, i_z: usize) -> f64 {
        self.values[self.grid.idx(i_r, i_z)]
    }

    #[inline]
    pub fn set(&mut self, i_r: usize, i_z: usize, v: f64) {
        let k = self.grid.idx(i_r, i_z);
        self.values[k] = v;
    }

    pub fn same_grid(&self, other: &Field2D) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_same_grid(&self, other: &Field2D, op: &'static str) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                op,
                left: self.grid.describe(),
                right: other.grid.describe(),
            })
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Field2D {
        debug_assert!(self.same_grid(other));
        Field2D {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Field2D) -> Field2D {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2D) -> Field2D {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Field2D {
        self.map(|v| k * v)
    }

    /// `self + k * other`, the workhorse of the time stepper.
    pub fn add_scaled(&self, k: f64, other: &Field2D) -> Field2D {
        self.zip_map(other, |a, b| a + k * b)
    }

    /// Pointwise `max(f, 0)`.
    pub fn positive_part(&self) -> Field2D {
        self.map(|v| v.max(0.0))
    }

    /// Pointwise `max(-f, 0)`, so `f = positive_part - negative_part`.
    pub fn negative_part(&self) -> Field2D {
        self.map(|v| (-v).max(0.0))
    }

    pub fn abs_max(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Exact nodal maximum of `r^e * |f|` for `e >= 0`.
    pub fn sup_r_weighted(&self, e: f64) -> f64 {
        assert!(e >= 0.0, "sup_r_weighted expects a nonnegative exponent");
        let mut m = 0.0_f64;
        for i in 0..self.grid.n_r() {
            let re = self.grid.r(i).powf(e);
            for j in 0..self.grid.n_z() {
                m = m.max(re * self.get(i, j).abs());
            }
        }
        m
    }

    /// Largest axis magnitude, `max_z |f(0, z)|`.
    pub fn axis_abs_max(&self) -> f64 {
        (0..self.grid.n_z()).fold(0.0_f64, |m, j| m.max(self.get(0, j).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        let mut acc = 0.0;
        for x in v {
            acc += x;
        }
        acc
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// `∫ f dx` over the truncated domain with measure `2 pi r dr dz`.
///
/// Linear in `f` and exact whenever `r * f(r, z)` is bilinear. Rejects
/// non-finite input, naming the first offending node.
pub fn integrate_cyl(f: &Field2D) -> Result<f64> {
    let grid = f.grid();
    let mut terms = vec![0.0; grid.len()];
    for i in 0..grid.n_r() {
        for j in 0..grid.n_z() {
            let v = f.get(i, j);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    op: "integrate_cyl",
                    i_r: i,
                    i_z: j,
                    r: grid.r(i),
                    z: grid.z(j),
                    value: v,
                });
            }
            terms[grid.idx(i, j)] = v * grid.weight(i, j);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `∫ |f / r^beta|^p dx` for `p >= 1`.
///
/// Axis nodes carry zero quadrature weight, so negative powers of `r` are
/// never evaluated at `r = 0`. Overflowing integrands are rejected with the
/// node of largest magnitude.
pub fn weighted_lp(f: &Field2D, beta: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!(
            "weighted_lp needs p >= 1, got {p}"
        )));
    }
    let grid = f.grid();
    let mut terms = vec![0.0; grid.len()];
    let mut worst = (0usize, 0usize, 0.0f64);
    for i in 1..grid.n_r() {
        let r_beta = grid.r(i).powf(beta);
        for j in 0..grid.n_z() {
            let t = (f.get(i, j).abs() / r_beta).powf(p);
            if t.abs() > worst.2 {
                worst = (i, j, t);
            }
            if !t.is_finite() {
                return Err(Error::IntegrandOverflow {
                    op: "weighted_lp",
                    i_r: worst.0,
                    i_z: worst.1,
                    value: worst.2,
                });
            }
            terms[grid.idx(i, j)] = t * grid.weight(i, j);
        }
    }
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CylGrid;
    use std::f64::consts::PI;

    fn grid(n: usize, r_max: f64, z_half: f64) -> GridRef {
        CylGrid::shared(r_max, z_half, n, n).unwrap()
    }

    #[test]
    fn integrate_zero_field() {
        let g = grid(32, 1.0, 1.0);
        assert_eq!(integrate_cyl(&Field2D::zeros(&g)).unwrap(), 0.0);
    }

    #[test]
    fn integrate_constant_gives_cylinder_volume() {
        let g = grid(32, 1.0, 1.0);
        let got = integrate_cyl(&Field2D::constant(&g, 1.0)).unwrap();
        let exact = 2.0 * PI;
        assert!((got - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn integrate_gaussian_matches_closed_form_and_oracle() {
        // The radial integrand r*exp(-2r^2) has a nonzero slope at the axis,
        // which is exactly the trapezoid rule's h^2 error term; the grid is
        // sized so that term sits below the tolerance.
        let g = CylGrid::shared(6.0, 6.0, 4000, 160).unwrap();
        let f = Field2D::from_fn(&g, |r, z| (-2.0 * (r * r + z * z)).exp()).unwrap();
        let got = integrate_cyl(&f).unwrap();
        let exact = (PI / 2.0).powf(1.5);
        assert!((got - exact).abs() < 1e-6 * exact, "got {got}, exact {exact}");
        let dense = axireg_oracle::integral_cyl(
            |r, z| (-2.0 * (r * r + z * z)).exp(),
            6.0,
            6.0,
            960,
            960,
        );
        assert!((got - dense).abs() < 1e-6 * dense);
    }

    #[test]
    fn integrate_rejects_nan_with_location() {
        let g = grid(16, 1.0, 1.0);
        let mut f = Field2D::zeros(&g);
        f.set(3, 5, f64::NAN);
        match integrate_cyl(&f) {
            Err(Error::NonFinite { i_r, i_z, .. }) => {
                assert_eq!((i_r, i_z), (3, 5));
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn weighted_lp_zero_and_unit_ratio() {
        let g = grid(64, 1.5, 2.0);
        assert_eq!(weighted_lp(&Field2D::zeros(&g), 0.7, 3.0).unwrap(), 0.0);
        // f = r with beta = 1, p = 2 integrates the constant 1.
        let f = Field2D::from_fn(&g, |r, _| r).unwrap();
        let got = weighted_lp(&f, 1.0, 2.0).unwrap();
        let vol = 2.0 * PI * 1.5 * 1.5 / 2.0 * 4.0;
        assert!((got - vol).abs() < 1e-12 * vol);
    }

    #[test]
    fn weighted_lp_gaussian_case() {
        let g = grid(160, 6.0, 6.0);
        let f = Field2D::from_fn(&g, |r, z| r * (-(r * r + z * z)).exp()).unwrap();
        let got = weighted_lp(&f, 0.0, 2.0).unwrap();
        let exact = 2.0 * PI * 0.125 * (PI / 2.0).sqrt();
        assert!((got - exact).abs() < 1e-6 * exact);
        let dense = axireg_oracle::integral_cyl(
            |r, z| (r * (-(r * r + z * z)).exp()).powi(2),
            6.0,
            6.0,
            960,
            960,
        );
        assert!((got - dense).abs() < 1e-6 * dense);
    }

    #[test]
    fn weighted_lp_rejects_p_below_one() {
        let g = grid(16, 1.0, 1.0);
        assert!(weighted_lp(&Field2D::zeros(&g), 0.0, 0.5).is_err());
    }

    #[test]
    fn parts_of_constant_negative_field() {
        let g = grid(16, 1.0, 1.0);
        let f = Field2D::constant(&g, -3.0);
        assert!(f.positive_part().values().iter().all(|&v| v == 0.0));
        assert!(f.negative_part().values().iter().all(|&v| v == 3.0));
    }

    proptest::proptest! {
        // Pointwise decomposition invariants on arbitrary finite samples.
        #[test]
        fn parts_decompose_any_finite_values(values in proptest::collection::vec(-1e6_f64..1e6, 256)) {
            let g = grid(16, 1.0, 1.0);
            let f = Field2D::from_values(&g, values).unwrap();
            let p = f.positive_part();
            let n = f.negative_part();
            for k in 0..g.len() {
                proptest::prop_assert_eq!(p.values()[k] - n.values()[k], f.values()[k]);
                proptest::prop_assert_eq!(p.values()[k] * n.values()[k], 0.0);
                proptest::prop_assert!(p.values()[k] >= 0.0 && n.values()[k] >= 0.0);
            }
        }
    }

    #[test]
    fn parts_reassemble_pointwise() {
        let g = grid(24, 1.0, 1.0);
        let f = Field2D::from_fn(&g, |_, z| z).unwrap();
        let p = f.positive_part();
        let n = f.negative_part();
        for k in 0..g.len() {
            assert_eq!(p.values()[k] - n.values()[k], f.values()[k]);
            assert_eq!(p.values()[k] * n.values()[k], 0.0);
            assert!(p.values()[k] >= 0.0 && n.values()[k] >= 0.0);
        }
    }

    #[test]
    fn integrate_is_linear() {
        let g = grid(48, 2.0, 2.0);
        let f = Field2D::from_fn(&g, |r, z| (r - z).sin()).unwrap();
        let h = Field2D::from_fn(&g, |r, z| (r * z).cos()).unwrap();
        let a = 1.7;
        let b = -0.4;
        let lhs = integrate_cyl(&f.scale(a).add(&h.scale(b))).unwrap();
        let rhs = a * integrate_cyl(&f).unwrap() + b * integrate_cyl(&h).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn weighted_lp_satisfies_minkowski() {
        let g = grid(40, 2.0, 2.0);
        let mut seed = 11_u64;
        let mut rnd = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let (a1, a2, w1, w2) = (rnd(), rnd(), 1.0 + rnd().abs(), 1.0 + rnd().abs());
            let f =
                Field2D::from_fn(&g, |r, z| a1 * r * (-w1 * (r * r + z * z)).exp()).unwrap();
            let h = Field2D::from_fn(&g, |r, z| a2 * r * (-w2 * (r * r + z * z)).exp()).unwrap();
            let p = 1.0 + 2.0 * rnd().abs();
            let beta = 0.5 * rnd();
            let nf = weighted_lp(&f, beta, p).unwrap().powf(1.0 / p);
            let nh = weighted_lp(&h, beta, p).unwrap().powf(1.0 / p);
            let ns = weighted_lp(&f.add(&h), beta, p).unwrap().powf(1.0 / p);
            let scale = (nf + nh).max(1e-30);
            assert!(ns <= nf + nh + 1e-10 * scale, "p={p} beta={beta}");
        }
    }

    #[test]
    fn quadrature_error_decays_at_second_order() {
        // On the Gaussian example the error is dominated by the axis
        // endpoint term of the trapezoid rule, which decays at the nominal
        // second order.
        let exact = (PI / 2.0).powf(1.5);
        let mut hs = Vec::new();
        let mut es = Vec::new();
        for n in [65usize, 129, 257] {
            let g = grid(n, 6.0, 6.0);
            let f = Field2D::from_fn(&g, |r, z| (-2.0 * (r * r + z * z)).exp()).unwrap();
            let got = integrate_cyl(&f).unwrap();
            hs.push(g.dr());
            es.push((got - exact).abs());
        }
        let order = axireg_oracle::fit_order(&hs, &es);
        assert!(
            (order - 2.0).abs() <= 0.4,
            "observed quadrature order {order}"
        );
    }
}

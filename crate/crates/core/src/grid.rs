//! Truncated cylindrical computational domain.
//!
//! The domain is `(r, z) in [0, r_max] x [-z_half, z_half]` with uniform node
//! spacing in both directions and the axis line `r = 0` included. Quadrature
//! weights realize the axisymmetric volume measure `2 pi r dr dz` with a
//! composite trapezoid rule; the `r` factor is folded into the node weights,
//! so axis nodes carry weight zero.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Shared handle to a grid; fields hold one of these.
pub type GridRef = Arc<CylGrid>;

#[derive(Debug, Clone, PartialEq)]
pub struct CylGrid {
    n_r: usize,
    n_z: usize,
    r_max: f64,
    z_half: f64,
    dr: f64,
    dz: f64,
    quad_w: Vec<f64>,
}

impl CylGrid {
    pub fn new(r_max: f64, z_half: f64, n_r: usize, n_z: usize) -> Result<CylGrid> {
        if !(r_max > 0.0 && z_half > 0.0) || !r_max.is_finite() || !z_half.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "domain extents must be positive and finite, got r_max={r_max}, z_half={z_half}"
            )));
        }
        if n_r < 8 || n_z < 8 {
            return Err(Error::InvalidGrid(format!(
                "need at least 8 nodes per direction, got n_r={n_r}, n_z={n_z}"
            )));
        }
        let dr = r_max / (n_r - 1) as f64;
        let dz = 2.0 * z_half / (n_z - 1) as f64;
        let mut quad_w = vec![0.0; n_r * n_z];
        for i in 0..n_r {
            let r = i as f64 * dr;
            let ci = if i == 0 || i == n_r - 1 { 0.5 } else { 1.0 };
            for j in 0..n_z {
                let cj = if j == 0 || j == n_z - 1 { 0.5 } else { 1.0 };
                quad_w[i * n_z + j] = 2.0 * PI * r * ci * cj * dr * dz;
            }
        }
        Ok(CylGrid {
            n_r,
            n_z,
            r_max,
            z_half,
            dr,
            dz,
            quad_w,
        })
    }

    pub fn shared(r_max: f64, z_half: f64, n_r: usize, n_z: usize) -> Result<GridRef> {
        Ok(Arc::new(Self::new(r_max, z_half, n_r, n_z)?))
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }
    pub fn n_z(&self) -> usize {
        self.n_z
    }
    pub fn len(&self) -> usize {
        self.n_r * self.n_z
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn z_half(&self) -> f64 {
        self.z_half
    }
    pub fn dr(&self) -> f64 {
        self.dr
    }
    pub fn dz(&self) -> f64 {
        self.dz
    }

    #[inline]
    pub fn idx(&self, i_r: usize, i_z: usize) -> usize {
        debug_assert!(i_r < self.n_r && i_z < self.n_z);
        i_r * self.n_z + i_z
    }

    #[inline]
    pub fn r(&self, i_r: usize) -> f64 {
        i_r as f64 * self.dr
    }

    #[inline]
    pub fn z(&self, i_z: usize) -> f64 {
        -self.z_half + i_z as f64 * self.dz
    }

    /// Quadrature weight of node `(i_r, i_z)`; zero on the axis.
    #[inline]
    pub fn weight(&self, i_r: usize, i_z: usize) -> f64 {
        self.quad_w[self.idx(i_r, i_z)]
    }

    pub fn weights(&self) -> &[f64] {
        &self.quad_w
    }

    /// Total quadrature volume, `2 pi * r_max^2/2 * 2 z_half` up to rounding.
    pub fn volume(&self) -> f64 {
        crate::field::pairwise_sum(&self.quad_w)
    }

    pub fn describe(&self) -> String {
        format!(
            "{}x{} on [0,{}]x[-{},{}]",
            self.n_r, self.n_z, self.r_max, self.z_half, self.z_half
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_grids() {
        assert!(CylGrid::new(1.0, 1.0, 4, 32).is_err());
        assert!(CylGrid::new(-1.0, 1.0, 32, 32).is_err());
    }

    #[test]
    fn axis_weight_is_zero_and_others_positive() {
        let g = CylGrid::new(2.0, 1.0, 16, 16).unwrap();
        for j in 0..16 {
            assert_eq!(g.weight(0, j), 0.0);
        }
        assert!(g.weight(1, 0) > 0.0);
        assert!(g.weight(15, 15) > 0.0);
    }

    #[test]
    fn volume_matches_cylinder() {
        // The r-integrand of the constant field is linear, so the trapezoid
        // volume is exact.
        let g = CylGrid::new(1.0, 1.0, 64, 64).unwrap();
        let exact = 2.0 * PI * 0.5 * 2.0;
        assert!((g.volume() - exact).abs() < 1e-12 * exact);
    }
}

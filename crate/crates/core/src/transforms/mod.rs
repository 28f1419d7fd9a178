//! Cauchy and Beurling transforms: periodic Fourier multipliers and the disk transforms with
//! reflected kernels.

mod direct;
mod disk;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{spectral::apply_multiplier, ComplexGrid, GridInterpolant};

pub use direct::{beurling_local_direct, cauchy_local_direct};
pub use disk::{DiskField, PolarDisk};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Global Beurling transform: multiplier conj(ξ)/ξ, ξ = k_x + i k_y, zero at ξ = 0.
pub fn beurling_global(psi: &ComplexGrid) -> ComplexGrid {
    apply_multiplier(psi, |kx, ky| {
        let xi = Complex64::new(kx, ky);
        if xi.norm_sqr() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            xi.conj() / xi
        }
    })
}

/// Periodic Cauchy transform: the mean-free solution φ of φ_z̄ = ψ − mean(ψ).
pub fn cauchy_periodic(psi: &ComplexGrid) -> ComplexGrid {
    apply_multiplier(psi, |kx, ky| {
        let xi = Complex64::new(kx, ky);
        if xi.norm_sqr() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -2.0 * I / xi
        }
    })
}

/// Cauchy transform on the torus window: mean(ψ)·z̄ plus the periodic part.
pub fn cauchy_global(psi: &ComplexGrid) -> ComplexGrid {
    let m = psi.mean();
    cauchy_periodic(psi).map(|z, v| v + m * z.conj())
}

/// Disk 𝔻(z₀, R).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub center: Complex64,
    pub radius: f64,
}

impl DiskSpec {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidParameter(format!("disk radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Checks that the disk lies inside the probe region of `grid`.
    pub fn check_in(&self, grid: &ComplexGrid) -> Result<()> {
        let lim = crate::grid::PROBE_FRACTION * grid.half_width() + 1e-12;
        if self.center.re.abs() + self.radius > lim || self.center.im.abs() + self.radius > lim {
            return Err(Error::RegionExit(format!(
                "disk |z - {}| < {} exits the probe region",
                self.center, self.radius
            )));
        }
        Ok(())
    }
}

/// Default polar resolution used by the grid-level local transforms.
pub const DEFAULT_RADIAL: usize = 32;
pub const DEFAULT_ANGULAR: usize = 64;

fn to_polar(psi: &ComplexGrid, disk: DiskSpec) -> Result<DiskField> {
    disk.check_in(psi)?;
    let polar = PolarDisk::new(disk, DEFAULT_RADIAL, DEFAULT_ANGULAR)?;
    let interp = GridInterpolant::new(psi);
    Ok(polar.sample_values(interp.eval_many(&polar.points())))
}

/// Local Cauchy transform 𝒞_𝔻ψ sampled at the grid nodes inside the disk (zero elsewhere).
pub fn cauchy_local(psi: &ComplexGrid, disk: DiskSpec) -> Result<ComplexGrid> {
    let c = to_polar(psi, disk)?.cauchy();
    Ok(c.to_grid(psi))
}

/// Local Beurling transform 𝒮_𝔻ψ = ∂_z 𝒞_𝔻ψ sampled at the grid nodes inside the disk.
pub fn beurling_local(psi: &ComplexGrid, disk: DiskSpec) -> Result<ComplexGrid> {
    let s = to_polar(psi, disk)?.beurling();
    Ok(s.to_grid(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::wirtinger;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bump(z: Complex64, center: Complex64, rho: f64) -> f64 {
        let t = (z - center).norm_sqr() / (rho * rho);
        if t >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - t)).exp()
        }
    }

    #[test]
    fn zero_input() {
        let g = ComplexGrid::zeros(1.0, 32).unwrap();
        assert_eq!(beurling_global(&g).max_abs(), 0.0);
        let d = DiskSpec::new(c(0.0, 0.0), 0.3).unwrap();
        assert_eq!(cauchy_local(&g, d).unwrap().max_abs(), 0.0);
        assert_eq!(beurling_local(&g, d).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn intertwining_and_isometry() {
        let phi = ComplexGrid::from_fn(1.0, 256, |z| {
            c(1.0, 0.5) * bump(z, c(0.1, -0.05), 0.5) * (z * 3.0).exp()
        })
        .unwrap();
        let (pz, pzb) = wirtinger(&phi).unwrap();
        let s = beurling_global(&pzb);
        assert!((&s - &pz).max_abs() < 1e-6);
        assert!((s.l2_norm() / pzb.l2_norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn indicator_of_disk() {
        let n = 512;
        let psi = ComplexGrid::from_fn(8.0, n, |z| {
            if z.norm() < 1.0 { c(1.0, 0.0) } else { c(0.0, 0.0) }
        })
        .unwrap();
        let s = beurling_global(&psi);
        let mut err: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let z = psi.point(j, k);
                let r = z.norm();
                if r > 1.5 && r < 2.5 {
                    err = err.max((s.get(j, k) + 1.0 / (z * z)).norm());
                } else if r < 0.5 {
                    err = err.max(s.get(j, k).norm());
                }
            }
        }
        assert!(err < 2e-2, "err {err}");
    }

    #[test]
    fn cauchy_global_inverts_dbar() {
        let psi = ComplexGrid::from_fn(1.0, 128, |z| c(0.3, 0.0) + z * (-(z - c(0.0, 0.1)).norm_sqr() / 0.02).exp())
            .unwrap();
        let cp = cauchy_periodic(&psi);
        let (_, d) = wirtinger(&cp).unwrap();
        let m = psi.mean();
        assert!(d.zip_map(&psi, |_, a, b| a - (b - m)).max_abs() < 1e-9);
    }

    #[test]
    fn disk_must_fit() {
        let g = ComplexGrid::zeros(1.0, 32).unwrap();
        let d = DiskSpec::new(c(0.4, 0.0), 0.2).unwrap();
        assert!(matches!(cauchy_local(&g, d), Err(Error::RegionExit(_))));
        assert!(DiskSpec::new(c(0.0, 0.0), -1.0).is_err());
    }
}

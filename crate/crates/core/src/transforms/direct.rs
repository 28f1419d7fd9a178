//! Reference quadrature of the disk kernels on grid cells.
//!
//! 𝒞_𝔻ψ(z) = (1/π)∫_𝔻 ψ(ζ)/(z−ζ) − (z−z₀)conj ψ(ζ)/(R² − (z−z₀)conj(ζ−z₀)) dm(ζ)
//! 𝒮_𝔻ψ(z) = −(1/π) p.v.∫_𝔻 ψ(ζ)/(z−ζ)² + R² conj ψ(ζ)/(R² − (z−z₀)conj(ζ−z₀))² dm(ζ)

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::DiskSpec;
use crate::error::Result;
use crate::grid::ComplexGrid;

const SUBCELLS: usize = 8;

/// Grid nodes with their cell area inside the disk.
fn sources(psi: &ComplexGrid, disk: DiskSpec) -> Vec<(Complex64, Complex64, f64)> {
    let h = psi.h();
    let n = psi.n();
    let mut out = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let z = psi.point(j, k);
            let d = (z - disk.center).norm();
            if d > disk.radius + h {
                continue;
            }
            let frac = if d + h < disk.radius {
                1.0
            } else {
                let mut inside = 0;
                for a in 0..SUBCELLS {
                    for b in 0..SUBCELLS {
                        let off = Complex64::new(
                            ((a as f64 + 0.5) / SUBCELLS as f64 - 0.5) * h,
                            ((b as f64 + 0.5) / SUBCELLS as f64 - 0.5) * h,
                        );
                        if disk.contains(z + off) {
                            inside += 1;
                        }
                    }
                }
                inside as f64 / (SUBCELLS * SUBCELLS) as f64
            };
            if frac > 0.0 {
                out.push((z, psi.get(j, k), frac * h * h));
            }
        }
    }
    out
}

fn direct<K>(psi: &ComplexGrid, disk: DiskSpec, kernel: K) -> Result<ComplexGrid>
where
    K: Fn(Complex64, Complex64, &[(Complex64, Complex64, f64)]) -> Complex64 + Sync,
{
    disk.check_in(psi)?;
    let src = sources(psi, disk);
    let n = psi.n();
    let values: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let z = psi.point(i / n, i % n);
            if disk.contains(z) {
                kernel(z, psi.values()[i], &src)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    ComplexGrid::new(psi.half_width(), n, values)
}

/// Direct O(N⁴) Cauchy quadrature with the singular term integrated analytically.
pub fn cauchy_local_direct(psi: &ComplexGrid, disk: DiskSpec) -> Result<ComplexGrid> {
    let (z0, r2) = (disk.center, disk.radius * disk.radius);
    direct(psi, disk, move |z, pz, src| {
        let w = z - z0;
        let mut acc = pz * w.conj() * PI;
        for &(zeta, v, a) in src {
            if zeta != z {
                acc += (v - pz) * a / (z - zeta);
            }
            acc -= w * v.conj() * a / (r2 - w * (zeta - z0).conj());
        }
        acc / PI
    })
}

/// Direct O(N⁴) Beurling quadrature; the principal value of the constant part vanishes on the disk.
pub fn beurling_local_direct(psi: &ComplexGrid, disk: DiskSpec) -> Result<ComplexGrid> {
    let (z0, r2) = (disk.center, disk.radius * disk.radius);
    direct(psi, disk, move |z, pz, src| {
        let w = z - z0;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(zeta, v, a) in src {
            if zeta != z {
                acc += (v - pz) * a / ((z - zeta) * (z - zeta));
            }
            let d = r2 - w * (zeta - z0).conj();
            acc += r2 * v.conj() * a / (d * d);
        }
        -acc / PI
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{beurling_local, cauchy_local};

    fn max_error(nn: usize, beurling: bool) -> f64 {
        let disk = DiskSpec::new(Complex64::new(0.05, 0.0), 0.4).unwrap();
        let psi = ComplexGrid::from_fn(1.0, nn, |z| {
            let t = (z - Complex64::new(0.0, 0.05)).norm_sqr() / 0.01;
            Complex64::new(1.0, -0.5) * (-t).exp() * (1.0 + z)
        })
        .unwrap();
        let (a, b) = if beurling {
            (beurling_local_direct(&psi, disk).unwrap(), beurling_local(&psi, disk).unwrap())
        } else {
            (cauchy_local_direct(&psi, disk).unwrap(), cauchy_local(&psi, disk).unwrap())
        };
        let mut err: f64 = 0.0;
        for (i, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
            let z = psi.point(i / nn, i % nn);
            if (z - disk.center).norm() < 0.9 * disk.radius {
                err = err.max((x - y).norm());
            }
        }
        err / psi.max_abs()
    }

    #[test]
    fn agrees_with_polar_route() {
        for beurling in [false, true] {
            let coarse = max_error(64, beurling);
            let fine = max_error(128, beurling);
            assert!(fine < 5e-3, "direct vs polar {fine}");
            assert!(coarse / fine > 3.0, "no convergence: {coarse} -> {fine}");
        }
    }
}

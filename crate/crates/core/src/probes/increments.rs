use num_complex::Complex64;

use crate::corpus::ClosedFormSolution;
use crate::error::{Error, Result};
use crate::grid::{spectral_shift, ComplexGrid};

/// max over `points` of |Δ_v f_z̄| − k|Δ_v f_z| using exact jets.
pub fn increment_qr_check_closed(
    sol: &ClosedFormSolution,
    v: Complex64,
    k: f64,
    points: &[Complex64],
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for &z in points {
        if !sol.in_annulus(z) || !sol.in_annulus(z + v) {
            return Err(Error::RegionExit(format!("shift {z} -> {} leaves the domain", z + v)));
        }
        let (a, b) = (sol.jet(z), sol.jet(z + v));
        worst = worst.max((b.fzb - a.fzb).norm() - k * (b.fz - a.fz).norm());
    }
    Ok(worst)
}

/// The same check on grids of f_z, f_z̄ with the shift applied spectrally; maximised over
/// probe-region nodes z with z + v in the probe region.
pub fn increment_qr_check_grid(fz: &ComplexGrid, fzb: &ComplexGrid, v: Complex64, k: f64) -> Result<f64> {
    let lim = crate::grid::PROBE_FRACTION * fz.half_width();
    if v.re.abs() >= lim || v.im.abs() >= lim {
        return Err(Error::RegionExit(format!("shift {v} too large")));
    }
    let sa = spectral_shift(fz, v);
    let sb = spectral_shift(fzb, v);
    let n = fz.n();
    let mut worst = f64::NEG_INFINITY;
    for j in 0..n {
        for i in 0..n {
            let z = fz.point(j, i);
            if !fz.in_probe_region(z) || !fz.in_probe_region(z + v) {
                continue;
            }
            if fz.singular().iter().any(|s| (z - s).norm() < 4.0 * fz.h() || (z + v - s).norm() < 4.0 * fz.h()) {
                continue;
            }
            let da = sa.get(j, i) - fz.get(j, i);
            let db = sb.get(j, i) - fzb.get(j, i);
            worst = worst.max(db.norm() - k * da.norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{power_example, quadratic_nonautonomous_example};
    use crate::grid::wirtinger;

    #[test]
    fn autonomous_increments() {
        let p = power_example(2.0).unwrap();
        let pts: Vec<Complex64> = (1..40).map(|i| Complex64::from_polar(0.01 * i as f64, 0.3 * i as f64)).collect();
        let pts: Vec<Complex64> = pts.into_iter().filter(|z| p.in_annulus(z + 0.1)).collect();
        assert!(increment_qr_check_closed(&p, Complex64::new(0.1, 0.0), 1.0 / 3.0, &pts).unwrap() <= 1e-12);
        assert!(increment_qr_check_closed(&p, Complex64::new(0.4, 0.0), 1.0 / 3.0, &[Complex64::new(0.3, 0.0)]).is_err());
    }

    #[test]
    fn nonautonomous_counterexample() {
        let b = 0.2;
        let q = quadratic_nonautonomous_example(b).unwrap();
        let k = q.k().unwrap();
        let v = Complex64::new(0.1, 0.0);
        let viol = increment_qr_check_closed(&q, v, k, &[Complex64::new(0.0, 0.0)]).unwrap();
        assert!((viol - b * 0.1 * (1.0 - k)).abs() < 1e-14);
        assert!(viol > 0.0);
    }

    #[test]
    fn grid_matches_closed() {
        let q = quadratic_nonautonomous_example(0.2).unwrap();
        let g = q.sample(1.0, 256).unwrap();
        let (fz, fzb) = wirtinger(&g).unwrap();
        let v = Complex64::new(0.125, 0.0);
        let viol = increment_qr_check_grid(&fz, &fzb, v, q.k().unwrap()).unwrap();
        assert!((viol - 0.2 * 0.125 * (1.0 - 0.25)).abs() < 1e-8, "{viol}");
    }
}

//! Quantitative checks of the second-order inequalities, Morrey and Campanato decay,
//! Caccioppoli bounds and the rigidity diagnostic.

mod caccioppoli;
mod decay;
mod increments;
pub mod pointwise;
pub mod quadrature;

pub use caccioppoli::{caccioppoli_check, CaccioppoliInput, CaccioppoliRecord};
pub use decay::{campanato_holder_estimate, dyadic_radii, morrey_profile, CampanatoFit, MorreyProfile};
pub use increments::{increment_qr_check_closed, increment_qr_check_grid};
pub use pointwise::{
    densities, directional_qr_check, mu_constant_diagnostic, mu_nu_check, poincare_circle_check,
    pointwise_bound_check, MuConstantReport, MuNuPair, PoincareReport, SecondOrderDensities,
};
pub use quadrature::Sampled;

use crate::error::{Error, Result};

/// Default tolerance for probes on closed-form jets.
pub const TOL_CLOSED: f64 = 1e-8;
/// Default tolerance for probes on grid-differentiated quantities.
pub const TOL_GRID: f64 = 1e-4;

/// α_K = min{4/(3K+1), (K+1)/(3K−1)}.
pub fn alpha_k(big_k: f64) -> Result<f64> {
    if !(big_k >= 1.0 && big_k.is_finite()) {
        return Err(Error::InvalidParameter(format!("K = {big_k} must be at least 1")));
    }
    let a = (4.0 / (3.0 * big_k + 1.0)).min((big_k + 1.0) / (3.0 * big_k - 1.0));
    debug_assert!((a - alpha_k_from_k((big_k - 1.0) / (big_k + 1.0))).abs() < 1e-12);
    Ok(a)
}

/// The same exponent in terms of k: (1−k)/(1 + (k/2)·max{1, 2−4k}).
pub fn alpha_k_from_k(k: f64) -> f64 {
    (1.0 - k) / (1.0 + 0.5 * k * (2.0 - 4.0 * k).max(1.0))
}

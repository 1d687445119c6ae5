//! Gaussian mechanism, sensitivity bounds and the moments accountant.

mod accountant;
mod mechanism;
mod quadrature;

pub use accountant::{
    calibrate_sigma, log_moment, moments_accountant, PrivacyBudget, MAX_MOMENT_ORDER, SIGMA_MAX, SIGMA_MIN,
};
pub use mechanism::{gaussian_perturb, noise_std, perturb_coordinates, sensitivity, SensitivityVariant};

//! Drude permittivity of a metal half-space or slab.

use num_complex::Complex64;

/// epsilon(omega) = 1 - omega_p^2 / (omega^2 + i Gamma_D omega).
pub fn drude_permittivity(omega: f64, omega_p: f64, gamma_d: f64) -> Complex64 {
    assert!(omega > 0.0);
    let den = Complex64::new(omega * omega, gamma_d * omega);
    1.0 - omega_p * omega_p / den
}

/// On the imaginary axis: epsilon(i xi) = 1 + omega_p^2 / (xi^2 + Gamma_D xi),
/// real and greater than one.
pub fn drude_permittivity_imag_axis(xi: f64, omega_p: f64, gamma_d: f64) -> f64 {
    assert!(xi > 0.0);
    1.0 + omega_p * omega_p / (xi * xi + gamma_d * xi)
}

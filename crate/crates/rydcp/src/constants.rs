//! Physical constants (CODATA 2018) in SI units, plus the handful of
//! derived quantities used across the crate.

/// Speed of light in vacuum (m/s, exact).
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant (J s, exact).
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge (C, exact).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K, exact).
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity (F/m).
pub const EPS_0: f64 = 8.854_187_8128e-12;
/// Vacuum permeability (H/m).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Electron mass (kg).
pub const M_E: f64 = 9.109_383_7015e-31;
/// Bohr radius (m).
pub const A_0: f64 = 5.291_772_109_03e-11;
/// Hartree energy (J).
pub const E_HARTREE: f64 = 4.359_744_722_2071e-18;
/// Rydberg energy for infinite nuclear mass (J).
pub const RYDBERG_INF: f64 = 2.179_872_361_1035e-18;
/// Unified atomic mass unit (kg).
pub const U_AMU: f64 = 1.660_539_066_60e-27;
/// Fine-structure constant.
pub const ALPHA_FS: f64 = 7.297_352_5693e-3;

/// Universal ac sheet conductivity of graphene, e^2/(4 hbar) (S).
pub const SIGMA_0: f64 = E_CHARGE * E_CHARGE / (4.0 * HBAR);

/// Electron-volt (J).
pub const EV: f64 = E_CHARGE;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma0_value() {
        // e^2/(4 hbar) = 6.085e-5 S
        assert!((SIGMA_0 - 6.085e-5).abs() / 6.085e-5 < 1e-3);
    }
}

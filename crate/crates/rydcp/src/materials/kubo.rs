//! Local (wavevector-independent) Kubo conductivity of a graphene sheet:
//! intraband Drude-like term plus interband term,
//!
//!   sigma_intra(w) = (4 sigma_0 / pi) [E_F + 2 k T ln(1 + e^(-E_F/kT))] / (hbar gamma - i hbar w),
//!   sigma_inter(w) = sigma_0 [ G(hbar w / 2)
//!                    + i (4 hbar w / pi) ∫_0^∞ dE (G(E) - G(hbar w/2)) / ((hbar w)^2 - 4 E^2) ],
//!   G(X) = sinh(X/kT) / [cosh(E_F/kT) + cosh(X/kT)].
//!
//! The interband integrand has a removable singularity at E = hbar w / 2; the
//! integration variable is rescaled to u = E/(hbar w), the interval split at
//! u = 1/2, points within 1e-7 of it evaluated by the first-order expansion
//! in G', and the smooth 1/(4u^2) tail added in closed form.

use num_complex::Complex64;

use super::{GrapheneParams, MaterialError};
use crate::constants::{HBAR, K_B, SIGMA_0};
use crate::quad::{quad_decay, QuadTol};

/// Occupation-difference function G(X); X in J, X >= 0.
fn g_fun(x: f64, ef: f64, kt: f64) -> f64 {
    if kt == 0.0 {
        return if x > ef {
            1.0
        } else if x < ef {
            0.0
        } else {
            0.5
        };
    }
    let a = x / kt;
    let b = ef / kt;
    // sinh(a), cosh(b) + cosh(a) rescaled by 2 e^{-a}; all exponents <= b - a
    let e2a = (-2.0 * a).exp();
    let num = 1.0 - e2a;
    let den = (b - a).exp() + (-b - a).exp() + 1.0 + e2a;
    num / den
}

/// dG/dX (1/J).
fn g_fun_prime(x: f64, ef: f64, kt: f64) -> f64 {
    if kt == 0.0 {
        return 0.0;
    }
    let a = x / kt;
    let b = ef / kt;
    // (1 + cosh a cosh b) / (kT (cosh b + cosh a)^2), rescaled by 4 e^{-2a}
    let num = 4.0 * (-2.0 * a).exp()
        + (1.0 + (-2.0 * a).exp()) * ((b - a).exp() + (-b - a).exp());
    let den_h = (b - a).exp() + (-b - a).exp() + 1.0 + (-2.0 * a).exp();
    num / (kt * den_h * den_h)
}

/// Intraband (Drude-like) term at a real frequency.
pub fn kubo_intraband(omega: f64, p: &GrapheneParams) -> Complex64 {
    let kt = K_B * p.temp;
    let ef = p.ef_abs();
    let filling = if kt == 0.0 {
        ef
    } else {
        ef + 2.0 * kt * (-ef / kt).exp().ln_1p()
    };
    4.0 * SIGMA_0 / std::f64::consts::PI * filling / (Complex64::new(p.gamma, -omega) * HBAR)
}

fn interband_imag_integral(omega: f64, p: &GrapheneParams) -> Result<f64, MaterialError> {
    let kt = K_B * p.temp;
    let ef = p.ef_abs();
    let hw = HBAR * omega;
    let g_half = g_fun(0.5 * hw, ef, kt);

    if kt == 0.0 {
        // step-function G: closed form -(1/pi) ln|(2 E_F + hw)/(2 E_F - hw)|
        // folded into the (4/pi) convention used below
        let ratio = ((2.0 * ef + hw) / (2.0 * ef - hw)).abs();
        if !ratio.is_finite() || ratio == 0.0 {
            return Ok(0.0);
        }
        return Ok(-0.25 * ratio.ln());
    }

    // u = E / (hbar w); integrand f(u) = (G(hw u) - G(hw/2)) / (1 - 4 u^2).
    let gp_half = g_fun_prime(0.5 * hw, ef, kt);
    let f = |u: f64| -> f64 {
        if (u - 0.5).abs() < 1e-7 {
            // removable singularity: G(hw u) - G(hw/2) ~ G' hw (u - 1/2)
            return -gp_half * hw / (4.0 * (u + 0.5));
        }
        (g_fun(hw * u, ef, kt) - g_half) / (1.0 - 4.0 * u * u)
    };
    // beyond u_cut, G is 1 to ~e^-40 and the tail integrates in closed form
    let u_cut = ((ef + 40.0 * kt) / hw).max(2.0);
    let scale = (kt / hw).max(1e-3).min(u_cut);
    let tol = QuadTol {
        abs: 1e-8 * std::f64::consts::FRAC_PI_4,
        rel: 1e-10,
        max_subdiv: 400,
    };
    let left = quad_decay(f, 0.0, 0.5, 0.5, &tol)?;
    let right = quad_decay(f, 0.5, scale, u_cut, &tol)?;
    // ∫_U^∞ du/(1-4u^2) = -(1/4) ln((2U+1)/(2U-1))
    let tail = -(1.0 - g_half) * 0.25 * ((2.0 * u_cut + 1.0) / (2.0 * u_cut - 1.0)).ln();
    Ok(left.value + right.value + tail)
}

/// Kubo sheet conductivity at a real frequency omega > 0 (S).
pub fn kubo_conductivity(omega: f64, p: &GrapheneParams) -> Result<Complex64, MaterialError> {
    if omega <= 0.0 {
        return Err(MaterialError::NonPositiveFrequency(omega));
    }
    let kt = K_B * p.temp;
    let ef = p.ef_abs();
    let intra = kubo_intraband(omega, p);
    let re_inter = SIGMA_0 * g_fun(0.5 * HBAR * omega, ef, kt);
    let im_inter = SIGMA_0 * 4.0 / std::f64::consts::PI * interband_imag_integral(omega, p)?;
    Ok(intra + Complex64::new(re_inter, im_inter))
}

/// Kubo sheet conductivity on the imaginary axis, sigma(i xi) (real, xi > 0).
pub fn kubo_conductivity_imag_axis(xi: f64, p: &GrapheneParams) -> Result<f64, MaterialError> {
    if xi <= 0.0 {
        return Err(MaterialError::NonPositiveFrequency(xi));
    }
    let kt = K_B * p.temp;
    let ef = p.ef_abs();
    let filling = if kt == 0.0 {
        ef
    } else {
        ef + 2.0 * kt * (-ef / kt).exp().ln_1p()
    };
    let intra = 4.0 * SIGMA_0 / std::f64::consts::PI * filling / (HBAR * (p.gamma + xi));

    // sigma_inter(i xi) = (2 sigma_0 / pi) ∫_0^∞ dv G(hbar xi v / 2) / (1 + v^2)
    let hxi = HBAR * xi;
    let f = |v: f64| g_fun(0.5 * hxi * v, ef, kt) / (1.0 + v * v);
    let v_cut = (2.0 * (ef + 40.0 * kt) / hxi).max(2.0);
    let scale = (2.0 * kt / hxi).max(1e-3).min(v_cut);
    let tol = QuadTol {
        abs: 1e-10,
        rel: 1e-10,
        max_subdiv: 400,
    };
    let body = quad_decay(f, 0.0, scale, v_cut, &tol)?.value;
    let tail = std::f64::consts::FRAC_PI_2 - v_cut.atan();
    let inter = 2.0 * SIGMA_0 / std::f64::consts::PI * (body + tail);
    Ok(intra + inter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::EV;

    fn params(ef_ev: f64, gamma: f64, temp: f64) -> GrapheneParams {
        GrapheneParams::from_ev(ef_ev, gamma, temp).unwrap()
    }

    #[test]
    fn undoped_cold_clean_limit_is_sigma0() {
        // E_F = 0, T -> 0, gamma -> 0, optical omega: Re sigma -> e^2/(4 hbar)
        let p = params(0.0, 1e6, 1.0);
        let s = kubo_conductivity(1e14, &p).unwrap();
        assert!(
            (s.re - SIGMA_0).abs() / SIGMA_0 < 5e-3,
            "Re sigma = {:.6e}",
            s.re
        );
    }

    #[test]
    fn intraband_static_closed_form() {
        let p = params(0.1, 4e12, 300.0);
        let kt = K_B * 300.0;
        let expected = 4.0 * SIGMA_0 / std::f64::consts::PI / (HBAR * p.gamma)
            * (0.1 * EV + 2.0 * kt * (1.0 + (-0.1 * EV / kt).exp()).ln());
        let got = kubo_intraband(1.0, &p);
        assert!((got.re - expected).abs() / expected < 1e-9);
        assert!(got.im.abs() / expected < 1e-9);
    }

    #[test]
    fn real_part_nonnegative_over_parameter_grid() {
        for ef in [0.0, 0.05, 0.1, 0.4] {
            for temp in [4.0, 77.0, 300.0] {
                for omega in [1e10, 1e12, 3e13, 1e15] {
                    let p = params(ef, 4e12, temp);
                    let s = kubo_conductivity(omega, &p).unwrap();
                    assert!(
                        s.re >= 0.0,
                        "Re sigma < 0 at ef={ef}, T={temp}, w={omega:.1e}: {}",
                        s.re
                    );
                }
            }
        }
    }

    #[test]
    fn near_linear_in_fermi_energy_at_microwave_frequency() {
        // At w = 9.88e11 and T = 300 K the intraband term dominates and the
        // conductivity rises almost linearly over E_F in [0, 0.4] eV.
        let omega = 9.88e11;
        let efs: Vec<f64> = (0..=20).map(|i| 0.4 * i as f64 / 20.0).collect();
        let sig: Vec<Complex64> = efs
            .iter()
            .map(|&e| kubo_conductivity(omega, &params(e, 4e12, 300.0)).unwrap())
            .collect();
        let intra0 = kubo_intraband(omega, &params(0.4, 4e12, 300.0));
        assert!(intra0.norm() / sig.last().unwrap().norm() > 0.9);
        for w in sig.windows(2) {
            assert!(w[1].re > w[0].re && w[1].im > w[0].im);
        }
        // linear fit R^2 on Re sigma
        let n = efs.len() as f64;
        let mx = efs.iter().sum::<f64>() / n;
        let my = sig.iter().map(|s| s.re).sum::<f64>() / n;
        let sxy: f64 = efs
            .iter()
            .zip(&sig)
            .map(|(&x, s)| (x - mx) * (s.re - my))
            .sum();
        let sxx: f64 = efs.iter().map(|&x| (x - mx) * (x - mx)).sum();
        let syy: f64 = sig.iter().map(|s| (s.re - my) * (s.re - my)).sum();
        let r2 = sxy * sxy / (sxx * syy);
        assert!(r2 > 0.99, "R^2 = {r2}");
    }

    #[test]
    fn imag_axis_is_positive_and_decreasing() {
        let p = params(0.1, 4e12, 300.0);
        let s1 = kubo_conductivity_imag_axis(1e12, &p).unwrap();
        let s2 = kubo_conductivity_imag_axis(1e13, &p).unwrap();
        let s3 = kubo_conductivity_imag_axis(1e14, &p).unwrap();
        assert!(s1 > s2 && s2 > s3 && s3 > 0.0);
    }

    #[test]
    fn zero_temperature_interband_closed_form() {
        // T = 0: Im sigma_inter = -(sigma0/pi) ln|(2EF + hw)/(2EF - hw)|
        let p = params(0.1, 1e10, 0.0);
        let omega = 1e14; // hbar w = 0.0658 eV < 2 E_F
        let s = kubo_conductivity(omega, &p).unwrap();
        let hw = HBAR * omega;
        let expected_im =
            -SIGMA_0 / std::f64::consts::PI * ((2.0 * 0.1 * EV + hw) / (2.0 * 0.1 * EV - hw)).ln();
        let im_inter = s.im - kubo_intraband(omega, &p).im;
        assert!(
            (im_inter - expected_im).abs() / expected_im.abs() < 1e-9,
            "im {im_inter:.6e} vs {expected_im:.6e}"
        );
    }

    #[test]
    fn finite_t_interband_approaches_t0_closed_form() {
        // cross-check of the quadrature against the independent T = 0 form
        let omega = 1e14;
        let cold = kubo_conductivity(omega, &params(0.1, 1e10, 1.0)).unwrap();
        let t0 = kubo_conductivity(omega, &params(0.1, 1e10, 0.0)).unwrap();
        assert!((cold.im - t0.im).abs() / t0.im.abs() < 1e-3);
        assert!((cold.re - t0.re).abs() / SIGMA_0 < 1e-3);
    }
}

//! T = 0 Lindhard (RPA) polarizability of doped graphene, its relaxation-time
//! (Mermin) extension, and the full non-local sheet conductivity built from it.
//!
//! In the dimensionless variables x = q/k_F, y = hbar omega / E_F the
//! quarter-plane splits into six regions separated by y = x, y = 2 - x,
//! y = x - 2 and y = x + 2; each region has its own closed form built from
//!
//!   C_h(a) = a sqrt(a^2 - 1) - arccosh(a),   C(a) = a sqrt(1 - a^2) - arccos(a),
//!
//! with t1 = k_F/(pi hbar v_F), t2 = x^2/sqrt(y^2 - x^2), t3 = x^2/sqrt(x^2 - y^2),
//! t4 = (2+y)/x, t5 = (2-y)/x, t6 = (y-2)/x. All six forms are real-axis
//! slices of one analytic function of complex y (upper half-plane); the
//! complex evaluator below implements that continuation directly, which is
//! what the relaxation-time formula needs at omega + i gamma and what the
//! Matsubara axis needs at i xi.
//!
//! Two numerical notes:
//! * On the line y = x the polarizability genuinely diverges like
//!   1/sqrt(|y^2 - x^2|) (the Dirac-cone light line); the region formulas
//!   return infinities there. The relaxation-time form is finite and smooth
//!   across the line for gamma > 0.
//! * For x much smaller than the other scales the closed forms suffer a
//!   2 - 2 cancellation; a stable small-x series takes over, with relative
//!   error of order (x/m)^4 at the switch point m.

use num_complex::Complex64;

use super::{GrapheneParams, MaterialError, FERMI_VELOCITY};
use crate::constants::{E_CHARGE, HBAR};

/// Region labels of the (x, y) quarter-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneRegion {
    R1A,
    R2A,
    R3A,
    R1B,
    R2B,
    R3B,
}

impl PlaneRegion {
    /// Classify a point; boundaries are assigned so the formulas patch
    /// continuously (the singular y = x line goes with the B side).
    pub fn classify(x: f64, y: f64) -> Self {
        assert!(x > 0.0 && y >= 0.0);
        if y >= x {
            if y >= x + 2.0 {
                PlaneRegion::R3B
            } else if y > 2.0 - x {
                PlaneRegion::R2B
            } else {
                PlaneRegion::R1B
            }
        } else if y <= x - 2.0 {
            PlaneRegion::R3A
        } else if y < 2.0 - x {
            PlaneRegion::R1A
        } else {
            PlaneRegion::R2A
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PlaneRegion::R1A => "1A",
            PlaneRegion::R2A => "2A",
            PlaneRegion::R3A => "3A",
            PlaneRegion::R1B => "1B",
            PlaneRegion::R2B => "2B",
            PlaneRegion::R3B => "3B",
        }
    }
}

fn c_h(a: f64) -> f64 {
    debug_assert!(a >= 1.0);
    a * (a * a - 1.0).sqrt() - a.acosh()
}

fn c_fun(a: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&a));
    a * (1.0 - a * a).sqrt() - a.acos()
}

fn t1_factor(p: &GrapheneParams) -> f64 {
    p.fermi_wavevector() / (std::f64::consts::PI * HBAR * FERMI_VELOCITY)
}

/// P/t1 on the real axis from the region closed forms.
fn dimensionless_real_axis(x: f64, y: f64) -> Complex64 {
    let m = y.min((2.0 - y).abs()).min(2.0 + y);
    if x < 1e-3 * m {
        return dimensionless_series(x, Complex64::new(y, 0.0));
    }
    let region = PlaneRegion::classify(x, y);
    let t4 = (2.0 + y) / x;
    let t5 = (2.0 - y) / x;
    let t6 = (y - 2.0) / x;
    match region {
        PlaneRegion::R1A => {
            let t3 = x * x / (x * x - y * y).sqrt();
            Complex64::new(-2.0, 0.25 * t3 * (c_h(t5) - c_h(t4)))
        }
        PlaneRegion::R2A => {
            let t3 = x * x / (x * x - y * y).sqrt();
            Complex64::new(-2.0 + 0.25 * t3 * c_fun(t5), -0.25 * t3 * c_h(t4))
        }
        PlaneRegion::R3A => {
            let t3 = x * x / (x * x - y * y).sqrt();
            Complex64::new(-2.0 + 0.25 * t3 * (c_fun(t4) + c_fun(t5)), 0.0)
        }
        PlaneRegion::R1B => {
            let t2 = x * x / (y * y - x * x).sqrt();
            Complex64::new(-2.0 + 0.25 * t2 * (c_h(t4) - c_h(t5)), 0.0)
        }
        PlaneRegion::R2B => {
            let t2 = x * x / (y * y - x * x).sqrt();
            Complex64::new(-2.0 + 0.25 * t2 * c_h(t4), 0.25 * t2 * c_fun(t5))
        }
        PlaneRegion::R3B => {
            let t2 = x * x / (y * y - x * x).sqrt();
            Complex64::new(
                -2.0 + 0.25 * t2 * (c_h(t4) - c_h(t6)),
                -0.25 * std::f64::consts::PI * t2,
            )
        }
    }
}

/// Force a (-0.0) imaginary part to +0.0 so principal branches take the
/// upper side of their cuts.
fn upper_edge(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im + 0.0)
}

/// Continuation of C_h along paths coming from Im w >= 0, Re w > 0.
fn g_upper(w: Complex64) -> Complex64 {
    let s = upper_edge(w * w - 1.0).sqrt();
    w * s - (w + s).ln()
}

/// Continuation of C_h along paths in the lower half-plane starting from
/// real w > 1 (the (2 - z)/x argument as Im z grows).
fn g_lower(w: Complex64) -> Complex64 {
    let w2 = upper_edge(w * w - 1.0);
    if w.re > 0.0 {
        // fourth quadrant: Im(w^2 - 1) < 0, principal composition is analytic
        let s = w2.sqrt();
        w * s - (w + s).ln()
    } else {
        // third quadrant: the principal sqrt jumped crossing the imaginary
        // axis; flip its sign and keep the log argument continuous
        let s = w2.sqrt();
        -w * s - (w - s).ln()
    }
}

/// Small-x series of P/t1, stable against the 2 - 2 cancellation; relative
/// error O((x/m)^4) with m the distance to the nearest branch point.
fn dimensionless_series(x: f64, z: Complex64) -> Complex64 {
    let s = upper_edge(z * z - x * x).sqrt();
    let ratio = (2.0 + z) / (2.0 - z);
    let log_term = if ratio.im == 0.0 && ratio.re < 0.0 {
        // real axis right at the cut: take the Im z -> 0+ side
        Complex64::new(ratio.re.abs().ln(), std::f64::consts::PI)
    } else {
        ratio.ln()
    };
    let x2 = x * x;
    let four_minus_z2 = 4.0 - z * z;
    2.0 * x2 / (s * (z + s)) - x2 / (4.0 * s) * log_term
        - x2 * x2 * z / (4.0 * s * four_minus_z2 * four_minus_z2)
}

/// P/t1 for complex y with Im y > 0 (or purely imaginary y = iY).
fn dimensionless_complex(x: f64, z: Complex64) -> Complex64 {
    debug_assert!(z.im > 0.0 || (z.re == 0.0 && z.im >= 0.0) || z.im >= 0.0);
    let m = z.norm().min((2.0 - z).norm()).min((2.0 + z).norm());
    if x < 1e-3 * m {
        return dimensionless_series(x, z);
    }
    let s = upper_edge(z * z - x * x).sqrt();
    let a_plus = (2.0 + z) / x;
    let a_minus = (2.0 - z) / x;
    -2.0 + x * x / (4.0 * s) * (g_upper(a_plus) - g_lower(a_minus))
}

fn check_graphene(q: f64, p: &GrapheneParams) -> Result<(), MaterialError> {
    if q <= 0.0 {
        return Err(MaterialError::NonPositiveWavevector(q));
    }
    if p.ef_abs() == 0.0 {
        return Err(MaterialError::UndopedNonlocal);
    }
    Ok(())
}

/// Region of the (q, hbar omega) plane a point falls in.
pub fn lindhard_region(q: f64, omega: f64, p: &GrapheneParams) -> Result<PlaneRegion, MaterialError> {
    check_graphene(q, p)?;
    let x = q / p.fermi_wavevector();
    let y = HBAR * omega / p.ef_abs();
    Ok(PlaneRegion::classify(x, y))
}

/// Bare T = 0 polarizability P(q, omega) on the real axis (1/(J m^2)).
pub fn lindhard_polarizability(
    q: f64,
    omega: f64,
    p: &GrapheneParams,
) -> Result<Complex64, MaterialError> {
    check_graphene(q, p)?;
    if omega < 0.0 {
        return Err(MaterialError::NonPositiveFrequency(omega));
    }
    let x = q / p.fermi_wavevector();
    let y = HBAR * omega / p.ef_abs();
    Ok(dimensionless_real_axis(x, y) * t1_factor(p))
}

/// Analytic continuation P(q, omega) for Im omega > 0 (1/(J m^2)).
pub fn lindhard_polarizability_complex(
    q: f64,
    omega: Complex64,
    p: &GrapheneParams,
) -> Result<Complex64, MaterialError> {
    check_graphene(q, p)?;
    assert!(omega.im > 0.0, "continuation requires Im omega > 0");
    let x = q / p.fermi_wavevector();
    let z = omega * (HBAR / p.ef_abs());
    Ok(dimensionless_complex(x, z) * t1_factor(p))
}

/// Static polarizability P(q, 0): -2 t1 up to q = 2 k_F, then the
/// backscattering-suppressed tail.
pub fn static_polarizability(q: f64, p: &GrapheneParams) -> Result<f64, MaterialError> {
    check_graphene(q, p)?;
    let x = q / p.fermi_wavevector();
    let t1 = t1_factor(p);
    if x <= 2.0 {
        Ok(-2.0 * t1)
    } else {
        Ok(t1 * (-2.0 + 0.5 * x * c_fun(2.0 / x)))
    }
}

/// Relaxation-time (Mermin) polarizability at a real frequency:
/// P_gamma = (1 + i gamma/omega) P(q, omega + i gamma)
///           / (1 + (i gamma/omega) P(q, omega + i gamma)/P(q, 0)).
pub fn rpa_rt_polarizability(
    q: f64,
    omega: f64,
    p: &GrapheneParams,
) -> Result<Complex64, MaterialError> {
    check_graphene(q, p)?;
    if omega < 0.0 {
        return Err(MaterialError::NonPositiveFrequency(omega));
    }
    let p0 = static_polarizability(q, p)?;
    if omega == 0.0 {
        return Ok(Complex64::new(p0, 0.0));
    }
    let pc = lindhard_polarizability_complex(q, Complex64::new(omega, p.gamma), p)?;
    let iga = Complex64::new(0.0, p.gamma / omega);
    Ok((1.0 + iga) * pc / (1.0 + iga * pc / p0))
}

/// Mermin polarizability on the imaginary axis, P_gamma(q, i xi) (real).
pub fn rpa_rt_polarizability_imag_axis(
    q: f64,
    xi: f64,
    p: &GrapheneParams,
) -> Result<f64, MaterialError> {
    check_graphene(q, p)?;
    if xi <= 0.0 {
        return Err(MaterialError::NonPositiveFrequency(xi));
    }
    let p0 = static_polarizability(q, p)?;
    let x = q / p.fermi_wavevector();
    let z = Complex64::new(0.0, HBAR * (xi + p.gamma) / p.ef_abs());
    let pc = dimensionless_complex(x, z) * t1_factor(p);
    debug_assert!(pc.im.abs() <= 1e-9 * pc.re.abs().max(1e-300));
    let g = p.gamma / xi;
    Ok((1.0 + g) * pc.re / (1.0 + g * pc.re / p0))
}

/// Full non-local longitudinal sheet conductivity,
/// sigma(q, omega) = i e^2 omega P_gamma(q, omega) / q^2 (S).
///
/// Conventions differ in the literature on how many powers of q the
/// polarizability absorbs; with P in 1/(J m^2) the 1/q^2 form is the one
/// whose q -> 0 limit reproduces the local (Kubo) intraband conductivity.
pub fn nonlocal_conductivity(
    q: f64,
    omega: f64,
    p: &GrapheneParams,
) -> Result<Complex64, MaterialError> {
    if omega <= 0.0 {
        return Err(MaterialError::NonPositiveFrequency(omega));
    }
    let pg = rpa_rt_polarizability(q, omega, p)?;
    Ok(Complex64::i() * E_CHARGE * E_CHARGE * omega * pg / (q * q))
}

/// Non-local sheet conductivity on the imaginary axis (real, non-negative
/// for a passive sheet).
pub fn nonlocal_conductivity_imag_axis(
    q: f64,
    xi: f64,
    p: &GrapheneParams,
) -> Result<f64, MaterialError> {
    let pg = rpa_rt_polarizability_imag_axis(q, xi, p)?;
    Ok(-E_CHARGE * E_CHARGE * xi * pg / (q * q))
}

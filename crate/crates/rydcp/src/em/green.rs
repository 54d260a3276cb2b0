//! Equal-position scattering Green's tensor above a planar stack.
//!
//! At a real frequency the tensor splits into an evanescent part (normal
//! wavevector kappa in [0, inf), weight e^{-2 kappa z0}) and a propagating
//! part (k_perp in [0, w/c], oscillatory e^{2 i k_perp z0}); the diagonal is
//! (g_xx, g_xx, g_zz) with
//!
//!   g_xx = 1/(8 pi) ∫ dkappa e^{-2 kappa z0} [ r_s + (c^2/w^2) kappa^2 r_p ]
//!        + i/(8 pi) ∫ dk    e^{ 2 i k z0}   [ r_s - (c^2/w^2) k^2     r_p ],
//!   g_zz = 1/(8 pi) ∫ dkappa e^{-2 kappa z0} (c^2/w^2) 2 k_par^2 r_p
//!        + i/(8 pi) ∫ dk    e^{ 2 i k z0}   (c^2/w^2) 2 k_par^2 r_p,
//!
//! with k_par^2 = kappa^2 + w^2/c^2 on the evanescent branch and
//! w^2/c^2 - k^2 on the propagating branch (vacuum upper half-space).
//!
//! On the imaginary axis everything is evanescent; the combination
//! h = xi^2 g stays finite at xi = 0 and is what the Matsubara sum needs, so
//! it is computed directly.

use std::cell::RefCell;

use num_complex::Complex64;

use crate::constants::C;
use crate::quad::{quad_decay, quad_oscillatory, QuadTol};

use super::{EmError, Frequency, ReflectionModel};

/// Which part of the splitting a tensor sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenPart {
    Evanescent,
    Propagating,
    ImaginaryAxis,
}

/// Diagonal of the scattering Green's tensor at one frequency (g_yy = g_xx;
/// off-diagonals vanish for coincident points above a planar stack).
#[derive(Debug, Clone, Copy)]
pub struct ScatteringGreenDiagonal {
    pub g_xx: Complex64,
    pub g_zz: Complex64,
    pub frequency: Frequency,
    pub z0: f64,
    pub part: GreenPart,
}

/// Imaginary-axis evaluation: h = xi^2 g (finite at xi = 0) plus, for
/// xi > 0, the tensor itself.
#[derive(Debug, Clone, Copy)]
pub struct MatsubaraGreen {
    pub xi: f64,
    pub z0: f64,
    /// xi^2 g_xx (m/s^2 scale absorbed; used directly by the Matsubara sum)
    pub h_xx: f64,
    pub h_zz: f64,
    pub green: Option<ScatteringGreenDiagonal>,
}

const INV_8PI: f64 = 1.0 / (8.0 * std::f64::consts::PI);

/// Runs `f` inside a quadrature, stashing the first error to re-raise after
/// the integral (integrand closures cannot return Result).
struct ErrStash(RefCell<Option<EmError>>);

impl ErrStash {
    fn new() -> Self {
        ErrStash(RefCell::new(None))
    }
    fn put(&self, e: EmError) {
        self.0.borrow_mut().get_or_insert(e);
    }
    fn check(self) -> Result<(), EmError> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Evanescent + propagating Green's tensor at a real frequency.
pub fn green_scattering_real<R: ReflectionModel + ?Sized>(
    refl: &R,
    z0: f64,
    omega: f64,
    tol_rel: f64,
) -> Result<(ScatteringGreenDiagonal, ScatteringGreenDiagonal), EmError> {
    assert!(z0 > 0.0 && omega > 0.0);
    let c2w2 = C * C / (omega * omega);
    let k0 = omega / C;
    let tol = QuadTol::new(0.0, tol_rel);

    // evanescent branch
    let stash = ErrStash::new();
    let evan_integrand = |kappa: f64| -> [Complex64; 2] {
        let k_par = (kappa * kappa + k0 * k0).sqrt();
        match refl.reflection_kz(k_par, Complex64::new(0.0, kappa), Frequency::Real(omega)) {
            Ok((rs, rp)) => {
                let damp = (-2.0 * kappa * z0).exp();
                [
                    (rs + c2w2 * kappa * kappa * rp) * damp,
                    rp * (2.0 * c2w2 * k_par * k_par * damp),
                ]
            }
            Err(e) => {
                stash.put(e);
                [Complex64::new(0.0, 0.0); 2]
            }
        }
    };
    let kappa_max = (40.0 / (2.0 * z0)).max(10.0 * k0);
    let scale = (1.0 / (2.0 * z0)).min(kappa_max);
    let evan = quad_decay(evan_integrand, 0.0, scale, kappa_max, &tol);
    stash.check()?;
    let evan = evan?;

    // propagating branch, panels of a quarter oscillation of e^{2 i k z0}
    let stash = ErrStash::new();
    let prop_integrand = |k: f64| -> [Complex64; 2] {
        let k_par2 = (k0 * k0 - k * k).max(0.0);
        let k_par = k_par2.sqrt();
        match refl.reflection_kz(k_par, Complex64::new(k, 0.0), Frequency::Real(omega)) {
            Ok((rs, rp)) => {
                let phase = Complex64::new(0.0, 2.0 * k * z0).exp();
                [
                    (rs - c2w2 * k * k * rp) * phase,
                    rp * phase * (2.0 * c2w2 * k_par2),
                ]
            }
            Err(e) => {
                stash.put(e);
                [Complex64::new(0.0, 0.0); 2]
            }
        }
    };
    let panel = std::f64::consts::PI / (4.0 * z0);
    let prop = quad_oscillatory(prop_integrand, 0.0, k0, panel.min(k0), &tol);
    stash.check()?;
    let prop = prop?;

    let evanescent = ScatteringGreenDiagonal {
        g_xx: evan.value[0] * INV_8PI,
        g_zz: evan.value[1] * INV_8PI,
        frequency: Frequency::Real(omega),
        z0,
        part: GreenPart::Evanescent,
    };
    let i_8pi = Complex64::new(0.0, INV_8PI);
    let propagating = ScatteringGreenDiagonal {
        g_xx: prop.value[0] * i_8pi,
        g_zz: prop.value[1] * i_8pi,
        frequency: Frequency::Real(omega),
        z0,
        part: GreenPart::Propagating,
    };
    Ok((evanescent, propagating))
}

/// Imaginary-axis Green's tensor as the finite combination h = xi^2 g.
///
/// At xi = 0 only the static r_p survives (the r_s term carries the
/// explicit xi^2) and `green` is None since g itself diverges.
pub fn green_scattering_matsubara<R: ReflectionModel + ?Sized>(
    refl: &R,
    z0: f64,
    xi: f64,
    tol_rel: f64,
) -> Result<MatsubaraGreen, EmError> {
    assert!(z0 > 0.0 && xi >= 0.0);
    let tol = QuadTol::new(0.0, tol_rel);
    let u_max = 40.0 / (2.0 * z0);
    let scale = 1.0 / (2.0 * z0);

    if xi == 0.0 {
        let stash = ErrStash::new();
        let integrand = |kappa: f64| -> f64 {
            match refl.static_rp(kappa) {
                Ok(rp) => -C * C * kappa * kappa * rp * (-2.0 * kappa * z0).exp(),
                Err(e) => {
                    stash.put(e);
                    0.0
                }
            }
        };
        let h = quad_decay(integrand, 0.0, scale, u_max, &tol);
        stash.check()?;
        let h = h?;
        let h_xx = h.value * INV_8PI;
        return Ok(MatsubaraGreen {
            xi,
            z0,
            h_xx,
            h_zz: 2.0 * h_xx,
            green: None,
        });
    }

    let xi_c = xi / C;
    let stash = ErrStash::new();
    // kappa = xi/c + u; k_par^2 = kappa^2 - xi^2/c^2 = u (u + 2 xi/c)
    let integrand = |u: f64| -> [Complex64; 2] {
        let kappa = xi_c + u;
        let k_par2 = u * (u + 2.0 * xi_c);
        let k_par = k_par2.sqrt();
        match refl.reflection_kz(k_par, Complex64::new(0.0, kappa), Frequency::Imaginary(xi)) {
            Ok((rs, rp)) => {
                let damp = (-2.0 * kappa * z0).exp();
                [
                    (rs * (xi * xi) - rp * (C * C * kappa * kappa)) * damp,
                    rp * (-2.0 * C * C * k_par2 * damp),
                ]
            }
            Err(e) => {
                stash.put(e);
                [Complex64::new(0.0, 0.0); 2]
            }
        }
    };
    let h = quad_decay(integrand, 0.0, scale, u_max, &tol);
    stash.check()?;
    let h = h?;
    debug_assert!(h.value[0].im.abs() <= 1e-8 * h.value[0].re.abs().max(1e-300));
    let h_xx = h.value[0].re * INV_8PI;
    let h_zz = h.value[1].re * INV_8PI;
    let inv_xi2 = 1.0 / (xi * xi);
    Ok(MatsubaraGreen {
        xi,
        z0,
        h_xx,
        h_zz,
        green: Some(ScatteringGreenDiagonal {
            g_xx: Complex64::new(h_xx * inv_xi2, 0.0),
            g_zz: Complex64::new(h_zz * inv_xi2, 0.0),
            frequency: Frequency::Imaginary(xi),
            z0,
            part: GreenPart::ImaginaryAxis,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::reflect::PerfectMirror;
    use crate::em::LayerStack;
    use crate::materials::{GrapheneParams, MaterialModel};

    #[test]
    fn vacuum_green_is_zero() {
        let stack = LayerStack::empty().resolve(300.0);
        let (ev, pr) = green_scattering_real(&stack, 5e-6, 1e12, 1e-9).unwrap();
        assert_eq!(ev.g_xx.norm(), 0.0);
        assert_eq!(ev.g_zz.norm(), 0.0);
        assert_eq!(pr.g_xx.norm(), 0.0);
        let m = green_scattering_matsubara(&stack, 5e-6, 1e12, 1e-9).unwrap();
        assert_eq!(m.h_xx, 0.0);
        assert_eq!(m.h_zz, 0.0);
    }

    #[test]
    fn mirror_evanescent_zz_nonretarded_closed_form() {
        // r_p = 1: ∫ kappa^2 e^{-2 kappa z0} = 2/(2 z0)^3 dominates g_zz as
        // w z0/c -> 0
        let z0 = 1e-7;
        let omega = 1e12;
        let (ev, _) = green_scattering_real(&PerfectMirror, z0, omega, 1e-10).unwrap();
        let c2w2 = C * C / (omega * omega);
        let i2 = 2.0 / (2.0 * z0).powi(3);
        let i0 = 1.0 / (2.0 * z0);
        let expected = INV_8PI * 2.0 * c2w2 * (i2 + (omega / C).powi(2) * i0);
        assert!(
            (ev.g_zz.re - expected).abs() / expected < 1e-9,
            "got {}, expected {expected}",
            ev.g_zz.re
        );
    }

    #[test]
    fn matsubara_static_mirror_h_closed_form() {
        let z0 = 2e-6;
        let m = green_scattering_matsubara(&PerfectMirror, z0, 0.0, 1e-10).unwrap();
        let expected = -C * C * INV_8PI * 2.0 / (2.0 * z0).powi(3);
        assert!(
            (m.h_xx - expected).abs() / expected.abs() < 1e-9,
            "h_xx = {}, expected {expected}",
            m.h_xx
        );
        assert!((m.h_zz - 2.0 * expected).abs() / expected.abs() < 1e-9);
        assert!(m.green.is_none());
    }

    #[test]
    fn matsubara_decays_with_xi() {
        let p = GrapheneParams::from_ev(0.1, 4e12, 10.0).unwrap();
        let stack = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
            .unwrap()
            .resolve(10.0);
        let z0 = 1e-5;
        let h1 = green_scattering_matsubara(&stack, z0, 1e13, 1e-9).unwrap();
        let h2 = green_scattering_matsubara(&stack, z0, 5e13, 1e-9).unwrap();
        let h3 = green_scattering_matsubara(&stack, z0, 2e14, 1e-9).unwrap();
        assert!(h1.h_zz.abs() > h2.h_zz.abs() && h2.h_zz.abs() > h3.h_zz.abs());
        // e^{-2 xi z0 / c}-like cutoff: by xi = 2e14 the weight is ~e^{-13}
        assert!(h3.h_zz.abs() < 1e-3 * h1.h_zz.abs());
    }

    #[test]
    fn evanescent_truncation_is_converged() {
        // extending the kappa cutoff must not change the result
        let p = GrapheneParams::from_ev(0.1, 4e12, 10.0).unwrap();
        let stack = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
            .unwrap()
            .resolve(10.0);
        let z0 = 5e-6;
        let omega = 1e12;
        let tol = QuadTol::new(0.0, 1e-10);
        let c2w2 = C * C / (omega * omega);
        let k0 = omega / C;
        let f = |kappa: f64| -> [Complex64; 2] {
            let k_par = (kappa * kappa + k0 * k0).sqrt();
            let (rs, rp) = stack.reflection(k_par, Frequency::Real(omega)).unwrap();
            let damp = (-2.0 * kappa * z0).exp();
            [
                (rs + c2w2 * kappa * kappa * rp) * damp,
                rp * (2.0 * c2w2 * k_par * k_par * damp),
            ]
        };
        let kmax = (40.0 / (2.0 * z0)).max(10.0 * k0);
        let a = quad_decay(f, 0.0, 1.0 / (2.0 * z0), kmax, &tol).unwrap();
        let b = quad_decay(f, 0.0, 1.0 / (2.0 * z0), 2.0 * kmax, &tol).unwrap();
        let rel = (a.value[1] - b.value[1]).norm() / b.value[1].norm();
        assert!(rel < 1e-8, "truncation error {rel}");
    }

    #[test]
    fn xx_equals_yy_by_construction_and_zz_dominates_nonretarded() {
        let p = GrapheneParams::from_ev(0.1, 4e12, 10.0).unwrap();
        let stack = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
            .unwrap()
            .resolve(10.0);
        let (ev, _) = green_scattering_real(&stack, 2e-6, 5e11, 1e-9).unwrap();
        // near-field: g_zz ~ 2 g_xx for a good reflector
        let ratio = ev.g_zz.re / ev.g_xx.re;
        assert!((ratio - 2.0).abs() < 0.2, "zz/xx = {ratio}");
    }
}

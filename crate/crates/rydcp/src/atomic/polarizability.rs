//! Dynamic dipole polarizability from the dipole-coupled basis window.

use num_complex::Complex64;

use super::{Atom, AtomicError, AtomicState};
use crate::constants::HBAR;

/// Intermediate-state window n' in [n - below, n + above], l' = l +- 1.
///
/// The window is a truncation: convergence is checked by doubling it.
#[derive(Debug, Clone, Copy)]
pub struct BasisWindow {
    pub below: u32,
    pub above: u32,
}

impl Default for BasisWindow {
    fn default() -> Self {
        BasisWindow {
            below: 15,
            above: 15,
        }
    }
}

impl BasisWindow {
    pub fn new(below: u32, above: u32) -> Self {
        BasisWindow { below, above }
    }

    pub fn doubled(&self) -> Self {
        BasisWindow {
            below: self.below * 2,
            above: self.above * 2,
        }
    }
}

/// Probe frequency for the polarizability: on the real axis the epsilon -> 0+
/// limit is regularized by a small damping (default 1e-6 |omega|); on the
/// imaginary (Matsubara) axis no regularization is needed.
#[derive(Debug, Clone, Copy)]
pub enum ProbeFrequency {
    Real { omega: f64, damping: Option<f64> },
    Imaginary { xi: f64 },
}

pub(super) fn polarizability(
    atom: &Atom,
    u: &AtomicState,
    freq: ProbeFrequency,
    window: &BasisWindow,
) -> Result<[[Complex64; 3]; 3], AtomicError> {
    let omega_c = match freq {
        ProbeFrequency::Real { omega, damping } => {
            let eps = damping.unwrap_or(1e-6 * omega.abs());
            Complex64::new(omega, eps)
        }
        ProbeFrequency::Imaginary { xi } => Complex64::new(0.0, xi),
    };
    let zero_damping = matches!(
        freq,
        ProbeFrequency::Real {
            damping: Some(d),
            ..
        } if d == 0.0
    );

    let mut alpha = [[Complex64::new(0.0, 0.0); 3]; 3];
    for level in atom.dipole_coupled_levels(u, window) {
        let k_proto = AtomicState {
            n: level.0,
            l: level.1,
            j: level.2,
            m: super::HalfInt::HALF,
        };
        let omega_ku = atom.transition_frequency(u, &k_proto)?;
        if zero_damping && (omega_ku == omega_c.re || omega_ku == -omega_c.re) {
            return Err(AtomicError::AtPole { omega: omega_ku });
        }
        let den1 = Complex64::new(omega_ku, 0.0) - omega_c;
        let den2 = Complex64::new(omega_ku, 0.0) + omega_c;
        let mut m2 = -level.2.doubled();
        while m2 <= level.2.doubled() {
            let k = AtomicState {
                m: super::HalfInt::from_doubled(m2),
                ..k_proto
            };
            let d = atom.dipole_element(u, &k)?.cartesian;
            for i in 0..3 {
                for jx in 0..3 {
                    let t1 = d[i] * d[jx].conj() / den1;
                    let t2 = d[i].conj() * d[jx] / den2;
                    alpha[i][jx] += (t1 + t2) / HBAR;
                }
            }
            m2 += 2;
        }
    }
    Ok(alpha)
}

pub(super) fn polarizability_imag_diag(
    atom: &Atom,
    u: &AtomicState,
    xi: f64,
    window: &BasisWindow,
) -> Result<[f64; 3], AtomicError> {
    let mut alpha = [0.0; 3];
    for level in atom.dipole_coupled_levels(u, window) {
        let k_proto = AtomicState {
            n: level.0,
            l: level.1,
            j: level.2,
            m: super::HalfInt::HALF,
        };
        let omega_ku = atom.transition_frequency(u, &k_proto)?;
        let strength = atom.transition_strength_diag(u, level)?;
        let weight = 2.0 * omega_ku / (HBAR * (omega_ku * omega_ku + xi * xi));
        for i in 0..3 {
            alpha[i] += strength[i] * weight;
        }
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::HalfInt;

    #[test]
    fn s_state_diagonal_isotropy() {
        let atom = Atom::rb87();
        let u = AtomicState::ns(30);
        let a = atom
            .polarizability(
                &u,
                ProbeFrequency::Imaginary { xi: 5e11 },
                &BasisWindow::default(),
            )
            .unwrap();
        let (xx, yy, zz) = (a[0][0], a[1][1], a[2][2]);
        assert!((xx - yy).norm() / xx.norm() < 1e-10);
        assert!((xx - zz).norm() / xx.norm() < 1e-10);
        // imaginary-axis polarizability is real
        assert!(xx.im.abs() < 1e-12 * xx.re.abs());
    }

    #[test]
    fn static_polarizability_positive_for_ns() {
        let atom = Atom::rb87();
        for n in [20u32, 30, 40, 50] {
            let a = atom
                .polarizability_imag_diag(&AtomicState::ns(n), 0.0, &BasisWindow::default())
                .unwrap();
            assert!(a[2] > 0.0, "alpha_zz(0) at n={n} is {}", a[2]);
        }
    }

    #[test]
    fn two_level_truncation_matches_closed_form() {
        let atom = Atom::rb87();
        let u = AtomicState::ns(30);
        // restrict to the single 30P_1/2 intermediate level
        let window = BasisWindow::new(0, 0);
        let k = AtomicState::new(30, 1, HalfInt::HALF).unwrap();
        let omega = 3e11;
        let a = atom
            .polarizability(
                &u,
                ProbeFrequency::Real {
                    omega,
                    damping: Some(0.0),
                },
                &window,
            )
            .unwrap();
        // closed form: sum over the two m' of |d_i|^2 [1/(w_ku - w) + 1/(w_ku + w)],
        // plus the 30P_3/2 level which the same window admits
        let mut expected = Complex64::new(0.0, 0.0);
        for level in [
            (30u32, 1u32, HalfInt::HALF),
            (30, 1, HalfInt::THREE_HALVES),
        ] {
            let w_ku = atom
                .transition_frequency(&u, &AtomicState::new(30, 1, level.2).unwrap())
                .unwrap();
            let s = atom.transition_strength_diag(&u, level).unwrap();
            expected += Complex64::new(
                s[2] / HBAR * (1.0 / (w_ku - omega) + 1.0 / (w_ku + omega)),
                0.0,
            );
        }
        let _ = k;
        let got = a[2][2];
        assert!(
            (got - expected).norm() / expected.norm() < 1e-12,
            "got {got}, expected {expected}"
        );
    }

    #[test]
    fn decay_at_high_imaginary_frequency() {
        let atom = Atom::rb87();
        let u = AtomicState::ns(30);
        let w = BasisWindow::default();
        let a1 = atom.polarizability_imag_diag(&u, 1e14, &w).unwrap()[2];
        let a2 = atom.polarizability_imag_diag(&u, 2e14, &w).unwrap()[2];
        // 1/xi^2 falloff
        assert!((a1 / a2 - 4.0).abs() < 0.05, "ratio {}", a1 / a2);
    }

    #[test]
    fn rejects_exact_pole_with_zero_damping() {
        let atom = Atom::rb87();
        let u = AtomicState::ns(30);
        let k = AtomicState::new(30, 1, HalfInt::HALF).unwrap();
        let pole = atom.transition_frequency(&u, &k).unwrap();
        let res = atom.polarizability(
            &u,
            ProbeFrequency::Real {
                omega: pole,
                damping: Some(0.0),
            },
            &BasisWindow::default(),
        );
        assert!(matches!(res, Err(AtomicError::AtPole { .. })));
    }
}

//! Characteristic scales and regime classification.
//!
//! Three pairs of limits, each controlled by comparing two of the scales
//! built from the dominant transition pair (n l -> n l', n l -> (n-1) l'):
//! retardation (z0 against c/omega), spectroscopic temperature (kT against
//! hbar omega) and geometric temperature (kT against hbar c / z0).

use crate::atomic::{Atom, AtomicState, HalfInt};
use crate::constants::{C, HBAR, K_B};

use super::CpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retardation {
    /// z0 omega_- / c > 1
    Retarded,
    /// z0 omega_+ / c < 1
    NonRetarded,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectroscopicRegime {
    /// kT > hbar omega_+
    HighT,
    /// kT < hbar omega_-
    LowT,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometricRegime {
    /// kT > hbar c / z0
    HighT,
    LowT,
}

/// Characteristic quantities and the regime flags they imply.
#[derive(Debug, Clone)]
pub struct RegimeReport {
    /// smallest dominant transition frequency (rad/s)
    pub omega_minus: f64,
    /// largest dominant transition frequency (rad/s)
    pub omega_plus: f64,
    /// spectroscopic length c/omega_+ (m)
    pub z_omega: f64,
    /// thermal length hbar c / kT (m)
    pub z_t: f64,
    /// geometric temperature hbar c / (z0 k) (K)
    pub t_z: f64,
    /// spectroscopic temperature hbar omega_+ / k (K)
    pub t_omega: f64,
    pub retardation: Retardation,
    pub spectroscopic: SpectroscopicRegime,
    pub geometric: GeometricRegime,
}

impl RegimeReport {
    pub fn retardation_label(&self) -> &'static str {
        match self.retardation {
            Retardation::Retarded => "retarded",
            Retardation::NonRetarded => "non-retarded",
            Retardation::Intermediate => "intermediate",
        }
    }

    pub fn spectroscopic_label(&self) -> &'static str {
        match self.spectroscopic {
            SpectroscopicRegime::HighT => "spectroscopic-high-T",
            SpectroscopicRegime::LowT => "spectroscopic-low-T",
            SpectroscopicRegime::Intermediate => "spectroscopic-intermediate",
        }
    }

    pub fn geometric_label(&self) -> &'static str {
        match self.geometric {
            GeometricRegime::HighT => "geometric-high-T",
            GeometricRegime::LowT => "geometric-low-T",
        }
    }
}

/// The dominant transition pair: from |n l j> to the dipole-coupled levels
/// with principal quantum numbers n and n - 1.
fn dominant_frequencies(atom: &Atom, state: &AtomicState) -> Result<(f64, f64), CpError> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for np in [state.n, state.n - 1] {
        for lp in [state.l.wrapping_sub(1), state.l + 1] {
            if lp == u32::MAX {
                continue;
            }
            if lp >= np || np < atom.data().n_min(lp) {
                continue;
            }
            for j2 in [2 * lp as i32 - 1, 2 * lp as i32 + 1] {
                if j2 < 1 || (state.j.doubled() - j2).abs() > 2 {
                    continue;
                }
                let k = AtomicState {
                    n: np,
                    l: lp,
                    j: HalfInt::from_doubled(j2),
                    m: HalfInt::HALF,
                };
                if k.level() == state.level() {
                    continue;
                }
                let w = atom.transition_frequency(state, &k)?.abs();
                if w > 0.0 {
                    lo = lo.min(w);
                    hi = hi.max(w);
                }
            }
        }
    }
    Ok((lo, hi))
}

pub fn regime_report(
    atom: &Atom,
    state: &AtomicState,
    z0: f64,
    temp: f64,
) -> Result<RegimeReport, CpError> {
    if z0 <= 0.0 {
        return Err(CpError::NonPositiveDistance(z0));
    }
    let (omega_minus, omega_plus) = dominant_frequencies(atom, state)?;
    let kt = K_B * temp;
    let retardation = if z0 * omega_minus / C > 1.0 {
        Retardation::Retarded
    } else if z0 * omega_plus / C < 1.0 {
        Retardation::NonRetarded
    } else {
        Retardation::Intermediate
    };
    let spectroscopic = if kt > HBAR * omega_plus {
        SpectroscopicRegime::HighT
    } else if kt < HBAR * omega_minus {
        SpectroscopicRegime::LowT
    } else {
        SpectroscopicRegime::Intermediate
    };
    let geometric = if kt > HBAR * C / z0 {
        GeometricRegime::HighT
    } else {
        GeometricRegime::LowT
    };
    Ok(RegimeReport {
        omega_minus,
        omega_plus,
        z_omega: C / omega_plus,
        z_t: if temp > 0.0 { HBAR * C / kt } else { f64::INFINITY },
        t_z: HBAR * C / (z0 * K_B),
        t_omega: HBAR * omega_plus / K_B,
        retardation,
        spectroscopic,
        geometric,
    })
}

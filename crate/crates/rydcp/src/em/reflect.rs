//! Generalized Fresnel reflection of a layer stack by the transfer-matrix
//! method, solved as a downward recursion over interface Möbius maps (the
//! algebraically identical but overflow-free form of the matrix product).
//!
//! A conducting sheet at an interface enters through the tangential-H jump
//! H_t(above) - H_t(below) = sigma E_t, which adds the sheet terms to the
//! interface map. For the non-local graphene model the conductivity is
//! evaluated at q = k_par of the current integration node.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::constants::{C, EPS_0, MU_0};
use crate::materials::MaterialModel;

use super::{EmError, Frequency, LayerStack};

/// Reflection coefficients (r_s, r_p) seen from the vacuum side.
///
/// Implemented by [`ResolvedStack`] and by idealized references such as
/// [`PerfectMirror`].
pub trait ReflectionModel {
    /// Reflection with the vacuum-side normal wavevector supplied exactly.
    ///
    /// The Green's-tensor integrals parametrize by the normal wavevector;
    /// reconstructing it from k_par would lose (k_par/kz1)^2 digits to
    /// cancellation, which is fatal deep in the evanescent zone.
    fn reflection_kz(
        &self,
        k_par: f64,
        kz1: Complex64,
        freq: Frequency,
    ) -> Result<(Complex64, Complex64), EmError>;

    /// Reflection at a given in-plane wavevector (radiation-condition branch
    /// for the normal component).
    fn reflection(&self, k_par: f64, freq: Frequency) -> Result<(Complex64, Complex64), EmError> {
        let w2c2 = freq.complex().powi(2) / (C * C);
        let arg = w2c2 - k_par * k_par;
        let arg = Complex64::new(arg.re, arg.im + 0.0);
        let mut kz1 = arg.sqrt();
        if kz1.im < 0.0 || (kz1.im == 0.0 && kz1.re < 0.0) {
            kz1 = -kz1;
        }
        self.reflection_kz(k_par, kz1, freq)
    }

    /// Static p-polarized reflection entering the zero-frequency Matsubara
    /// term: 1 for any stack with a conducting sheet or metal, the static
    /// dielectric image coefficient otherwise.
    fn static_rp(&self, k_par: f64) -> Result<f64, EmError>;
}

/// Ideal mirror (r_p = 1, r_s = -1); the closed-form reference surface.
pub struct PerfectMirror;

impl ReflectionModel for PerfectMirror {
    fn reflection_kz(
        &self,
        _k_par: f64,
        _kz1: Complex64,
        _freq: Frequency,
    ) -> Result<(Complex64, Complex64), EmError> {
        Ok((Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)))
    }

    fn static_rp(&self, _k_par: f64) -> Result<f64, EmError> {
        Ok(1.0)
    }
}

struct ResolvedLayer {
    material: MaterialModel,
    thickness: Option<f64>,
    mu: f64,
}

/// A [`LayerStack`] with the environment temperature bound into its graphene
/// sheets, ready for reflection evaluations. Kubo sheet conductivities are
/// cached per frequency (they do not depend on k_par).
pub struct ResolvedStack {
    layers: Vec<ResolvedLayer>,
    sheets: Vec<Option<MaterialModel>>,
    has_conductor: bool,
    kubo_cache: RefCell<HashMap<(usize, u64, bool), Complex64>>,
}

impl ResolvedStack {
    pub(super) fn new(stack: &LayerStack, temp: f64) -> Self {
        ResolvedStack {
            layers: stack
                .layers()
                .iter()
                .map(|l| ResolvedLayer {
                    material: l.material.at_temperature(temp),
                    thickness: l.thickness,
                    mu: l.mu,
                })
                .collect(),
            sheets: stack
                .sheets()
                .iter()
                .map(|s| s.as_ref().map(|sh| sh.material.at_temperature(temp)))
                .collect(),
            has_conductor: stack.has_conductor(),
            kubo_cache: RefCell::new(HashMap::new()),
        }
    }

    fn permittivity(&self, layer: usize, freq: Frequency) -> Complex64 {
        let m = &self.layers[layer].material;
        match freq {
            Frequency::Real(w) => m
                .permittivity(w)
                .expect("bulk layers always have a permittivity"),
            Frequency::Imaginary(xi) => Complex64::new(
                m.permittivity_imag_axis(xi)
                    .expect("bulk layers always have a permittivity"),
                0.0,
            ),
        }
    }

    fn sheet_sigma(
        &self,
        iface: usize,
        k_par: f64,
        freq: Frequency,
    ) -> Result<Complex64, EmError> {
        let Some(model) = &self.sheets[iface] else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let local = matches!(model, MaterialModel::KuboGraphene(_));
        let (key_w, imag) = match freq {
            Frequency::Real(w) => (w.to_bits(), false),
            Frequency::Imaginary(xi) => (xi.to_bits(), true),
        };
        if local {
            if let Some(v) = self.kubo_cache.borrow().get(&(iface, key_w, imag)) {
                return Ok(*v);
            }
        }
        let sigma = match freq {
            Frequency::Real(w) => model.sheet_conductivity(k_par, w)?,
            Frequency::Imaginary(xi) => {
                Complex64::new(model.sheet_conductivity_imag_axis(k_par, xi)?, 0.0)
            }
        };
        if local {
            self.kubo_cache
                .borrow_mut()
                .insert((iface, key_w, imag), sigma);
        }
        Ok(sigma)
    }

    /// Normal wavevector in each layer with the radiation-condition branch
    /// (Im k_z >= 0; Re k_z >= 0 when lossless). Layer 1 (vacuum) takes the
    /// exact value from the caller; deeper layers are built from it through
    /// kz_q^2 = kz1^2 + (eps_q mu_q - 1) w^2/c^2, which avoids the
    /// cancellation of reconstructing kz from k_par.
    fn kz(&self, kz1: Complex64, freq: Frequency) -> Vec<Complex64> {
        let w2c2 = freq.complex().powi(2) / (C * C);
        let kz1_sq = kz1 * kz1;
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| {
                if i == 0 {
                    return kz1;
                }
                let arg = kz1_sq + (self.permittivity(i, freq) * l.mu - 1.0) * w2c2;
                // keep the branch cut's upper edge for lossless media
                let arg = Complex64::new(arg.re, arg.im + 0.0);
                let mut kz = arg.sqrt();
                if kz.im < 0.0 || (kz.im == 0.0 && kz.re < 0.0) {
                    kz = -kz;
                }
                kz
            })
            .collect()
    }
}

impl ReflectionModel for ResolvedStack {
    fn reflection_kz(
        &self,
        k_par: f64,
        kz1: Complex64,
        freq: Frequency,
    ) -> Result<(Complex64, Complex64), EmError> {
        let omega_c = freq.complex();
        let kz = self.kz(kz1, freq);
        let nl = self.layers.len();

        let mut r_te = Complex64::new(0.0, 0.0);
        let mut r_tm = Complex64::new(0.0, 0.0);
        for iface in (0..nl - 1).rev() {
            let (up, lo) = (iface, iface + 1);
            let sigma = self.sheet_sigma(iface, k_par, freq)?;
            let (mu_u, mu_l) = (self.layers[up].mu, self.layers[lo].mu);
            let (eps_u, eps_l) = (self.permittivity(up, freq), self.permittivity(lo, freq));

            // TE: tangential E continuous, H jump = sigma E
            let kr = kz[lo] * mu_u / (kz[up] * mu_l);
            let sm = omega_c * MU_0 * mu_u * sigma / kz[up];
            let new_te = ((1.0 - kr - sm) + (1.0 + kr - sm) * r_te)
                / ((1.0 + kr + sm) + (1.0 - kr + sm) * r_te);

            // TM: tangential E continuous, H jump = sigma E
            let kp = kz[lo] * eps_u / (kz[up] * eps_l);
            let se = sigma * kz[lo] / (omega_c * EPS_0 * eps_l);
            let new_tm = ((1.0 + se - kp) + (1.0 - se + kp) * r_tm)
                / ((1.0 + se + kp) + (1.0 - se - kp) * r_tm);

            if iface > 0 {
                let t = self.layers[up]
                    .thickness
                    .expect("inner layers have thickness");
                let phase = (2.0 * Complex64::i() * kz[up] * t).exp();
                r_te = new_te * phase;
                r_tm = new_tm * phase;
            } else {
                r_te = new_te;
                r_tm = new_tm;
            }
        }

        if let Frequency::Imaginary(xi) = freq {
            // passive stacks must reflect with |r| <= 1 on the imaginary axis
            for (pol, r) in [('s', r_te), ('p', r_tm)] {
                if r.norm() > 1.0 + 1e-9 {
                    return Err(EmError::PassivityViolation {
                        pol,
                        magnitude: r.norm(),
                        k_par,
                        xi,
                    });
                }
            }
        }
        Ok((r_te, r_tm))
    }

    fn static_rp(&self, k_par: f64) -> Result<f64, EmError> {
        if self.has_conductor {
            return Ok(1.0);
        }
        // static dielectric recursion: all normal wavevectors reduce to
        // i k_par, so only the permittivity ratios and the exp(-2 k_par t)
        // attenuation survive
        let nl = self.layers.len();
        let mut r = 0.0f64;
        for iface in (0..nl - 1).rev() {
            let (up, lo) = (iface, iface + 1);
            let eps_u = match self.layers[up].material {
                MaterialModel::Dielectric { epsilon } => epsilon,
                _ => unreachable!("conductor-free stacks are dielectric"),
            };
            let eps_l = match self.layers[lo].material {
                MaterialModel::Dielectric { epsilon } => epsilon,
                _ => unreachable!("conductor-free stacks are dielectric"),
            };
            let kp = eps_u / eps_l;
            let new = ((1.0 - kp) + (1.0 + kp) * r) / ((1.0 + kp) + (1.0 - kp) * r);
            r = if iface > 0 {
                let t = self.layers[up].thickness.expect("inner layer");
                new * (-2.0 * k_par * t).exp()
            } else {
                new
            };
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{Layer, Sheet};
    use crate::materials::GrapheneParams;

    #[test]
    fn vacuum_stack_reflects_nothing() {
        let stack = LayerStack::empty().resolve(300.0);
        for freq in [Frequency::Real(1e13), Frequency::Imaginary(1e13)] {
            let (rs, rp) = stack.reflection(2e5, freq).unwrap();
            assert!(rs.norm() < 1e-15 && rp.norm() < 1e-15);
        }
    }

    #[test]
    fn dielectric_half_space_normal_incidence() {
        let eps = 4.0;
        let stack = LayerStack::new(
            vec![
                Layer::vacuum(),
                Layer::half_space(MaterialModel::Dielectric { epsilon: eps }),
            ],
            vec![None],
        )
        .unwrap()
        .resolve(300.0);
        let (rs, rp) = stack.reflection(0.0, Frequency::Real(1e14)).unwrap();
        let expected = (eps.sqrt() - 1.0) / (eps.sqrt() + 1.0);
        assert!((rp.re - expected).abs() < 1e-12, "r_p = {rp}");
        assert!((rs.re + expected).abs() < 1e-12, "r_s = {rs}");
    }

    #[test]
    fn thick_slab_approaches_half_space() {
        let eps = 2.5;
        let slab = LayerStack::free_slab(MaterialModel::Dielectric { epsilon: eps }, 0.5)
            .unwrap()
            .resolve(300.0);
        let half = LayerStack::new(
            vec![
                Layer::vacuum(),
                Layer::half_space(MaterialModel::Dielectric { epsilon: eps }),
            ],
            vec![None],
        )
        .unwrap()
        .resolve(300.0);
        // evanescent probe decays inside the slab, so a thick slab looks bulk
        let k = 5e5;
        let (_, rp_slab) = slab.reflection(k, Frequency::Imaginary(1e12)).unwrap();
        let (_, rp_half) = half.reflection(k, Frequency::Imaginary(1e12)).unwrap();
        assert!((rp_slab - rp_half).norm() < 1e-10);
    }

    #[test]
    fn graphene_sheet_quasistatic_formula_on_imag_axis() {
        let p = GrapheneParams::from_ev(0.1, 4e12, 300.0).unwrap();
        let stack = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
            .unwrap()
            .resolve(300.0);
        let xi = 8e12;
        let k_par = 4e5; // k_par >> xi/c
        let (_, rp) = stack.reflection(k_par, Frequency::Imaginary(xi)).unwrap();
        let sigma = crate::materials::kubo_conductivity_imag_axis(xi, &p).unwrap();
        let kappa = (k_par * k_par + xi * xi / (C * C)).sqrt();
        let expected = sigma * kappa / (sigma * kappa + 2.0 * EPS_0 * xi);
        assert!(
            (rp.re - expected).abs() / expected < 1e-6,
            "rp = {rp}, quasistatic {expected}"
        );
        assert!(rp.im.abs() < 1e-12);
    }

    #[test]
    fn imag_axis_reflection_is_real_and_passive() {
        let p = GrapheneParams::from_ev(0.1, 4e12, 300.0).unwrap();
        let stack = LayerStack::double_sheet(
            MaterialModel::KuboGraphene(p),
            MaterialModel::Dielectric { epsilon: 3.58 },
            1e-8,
            MaterialModel::KuboGraphene(p),
        )
        .unwrap()
        .resolve(300.0);
        for xi in [1e11, 1e13, 1e15] {
            for k_par in [1e3, 1e5, 1e7] {
                let (rs, rp) = stack.reflection(k_par, Frequency::Imaginary(xi)).unwrap();
                assert!(rs.im.abs() < 1e-10 && rp.im.abs() < 1e-10);
                assert!(rs.norm() <= 1.0 + 1e-9 && rp.norm() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn static_rp_rules() {
        let p = GrapheneParams::from_ev(0.1, 4e12, 300.0).unwrap();
        let sheet = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
            .unwrap()
            .resolve(10.0);
        assert_eq!(sheet.static_rp(1e5).unwrap(), 1.0);

        let eps = 3.58;
        let diel = LayerStack::new(
            vec![
                Layer::vacuum(),
                Layer::half_space(MaterialModel::Dielectric { epsilon: eps }),
            ],
            vec![None],
        )
        .unwrap()
        .resolve(10.0);
        let expected = (eps - 1.0) / (eps + 1.0);
        assert!((diel.static_rp(1e5).unwrap() - expected).abs() < 1e-12);

        let _ = Sheet {
            material: MaterialModel::KuboGraphene(p),
        };
    }
}

//! Stack reflection against an independently coded two-boundary solution for
//! a single conducting sheet between half-spaces, plus passivity properties.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rydcp::constants::{C, EPS_0, MU_0};
use rydcp::em::{Frequency, Layer, LayerStack, ReflectionModel, Sheet};
use rydcp::materials::{kubo_conductivity_imag_axis, GrapheneParams, MaterialModel};

/// Closed-form Fresnel coefficients of one sheet between half-spaces
/// (eps_a above, eps_b below) on the imaginary axis, solved directly from
/// the two boundary conditions.
fn sheet_between_halfspaces(
    eps_a: f64,
    eps_b: f64,
    sigma: f64,
    k_par: f64,
    xi: f64,
) -> (f64, f64) {
    let kappa_a = (k_par * k_par + eps_a * xi * xi / (C * C)).sqrt();
    let kappa_b = (k_par * k_par + eps_b * xi * xi / (C * C)).sqrt();
    // s-polarization: k_z = i kappa; r = (k_a - k_b - mu0 w sigma)/(k_a + k_b + mu0 w sigma)
    let rs = (kappa_a - kappa_b - MU_0 * xi * sigma) / (kappa_a + kappa_b + MU_0 * xi * sigma);
    // p-polarization with the sheet current term
    let se = sigma * kappa_b / (xi * EPS_0 * eps_b);
    let kp = kappa_b * eps_a / (kappa_a * eps_b);
    let rp = (1.0 + se - kp) / (1.0 + se + kp);
    (rs, rp)
}

#[test]
fn graphene_sheet_matches_two_boundary_solution() {
    let p = GrapheneParams::from_ev(0.1, 4e12, 300.0).unwrap();
    let stack = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
        .unwrap()
        .resolve(300.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let k_par = 10f64.powf(rng.gen_range(2.0..7.5));
        let xi = 10f64.powf(rng.gen_range(10.0..14.5));
        let sigma = kubo_conductivity_imag_axis(xi, &p).unwrap();
        let (rs_ref, rp_ref) = sheet_between_halfspaces(1.0, 1.0, sigma, k_par, xi);
        let (rs, rp) = stack.reflection(k_par, Frequency::Imaginary(xi)).unwrap();
        assert!(
            (rs.re - rs_ref).abs() <= 1e-10 * rs_ref.abs().max(1.0),
            "rs {} vs {}",
            rs.re,
            rs_ref
        );
        assert!(
            (rp.re - rp_ref).abs() <= 1e-10 * rp_ref.abs().max(1.0),
            "rp {} vs {}",
            rp.re,
            rp_ref
        );
    }
}

#[test]
fn sheet_on_substrate_matches_two_boundary_solution() {
    let p = GrapheneParams::from_ev(0.2, 4e12, 100.0).unwrap();
    let stack = LayerStack::new(
        vec![
            Layer::vacuum(),
            Layer::half_space(MaterialModel::Dielectric { epsilon: 3.58 }),
        ],
        vec![Some(Sheet {
            material: MaterialModel::KuboGraphene(p),
        })],
    )
    .unwrap()
    .resolve(100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let k_par = 10f64.powf(rng.gen_range(3.0..7.0));
        let xi = 10f64.powf(rng.gen_range(11.0..14.0));
        let sigma = kubo_conductivity_imag_axis(xi, &p).unwrap();
        let (rs_ref, rp_ref) = sheet_between_halfspaces(1.0, 3.58, sigma, k_par, xi);
        let (rs, rp) = stack.reflection(k_par, Frequency::Imaginary(xi)).unwrap();
        assert!((rs.re - rs_ref).abs() <= 1e-10 * rs_ref.abs().max(1.0));
        assert!((rp.re - rp_ref).abs() <= 1e-10 * rp_ref.abs().max(1.0));
    }
}

#[test]
fn quasistatic_sheet_formula_at_large_k_par() {
    // k_par >> xi/c: r_p -> sigma kappa / (sigma kappa + 2 eps0 xi)
    let p = GrapheneParams::from_ev(0.1, 4e12, 10.0).unwrap();
    let stack = LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p))
        .unwrap()
        .resolve(10.0);
    let xi = 1e12;
    let k_par = 1e6; // xi/c ~ 3.3e3
    let sigma = kubo_conductivity_imag_axis(xi, &p).unwrap();
    let (_, rp) = stack.reflection(k_par, Frequency::Imaginary(xi)).unwrap();
    let quasi = sigma * k_par / (sigma * k_par + 2.0 * EPS_0 * xi);
    assert!((rp.re - quasi).abs() / quasi < 1e-4, "rp {} vs {}", rp.re, quasi);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// |r| <= 1 on the imaginary axis for passive stacks of any composition.
    #[test]
    fn imag_axis_reflection_is_passive(
        ef in 0.0f64..0.4,
        eps in 1.0f64..6.0,
        d_log in -9.0f64..-6.0,
        lg_k in 2.0f64..7.5,
        lg_xi in 10.5f64..15.0,
        metal_bottom in any::<bool>(),
    ) {
        let g = GrapheneParams::from_ev(ef, 4e12, 300.0).unwrap();
        let bottom = if metal_bottom {
            MaterialModel::DrudeMetal { omega_p: 1.35e16, gamma_d: 1.713e13 }
        } else {
            MaterialModel::Dielectric { epsilon: eps }
        };
        let stack = LayerStack::new(
            vec![
                Layer::vacuum(),
                Layer::slab(MaterialModel::Dielectric { epsilon: eps }, 10f64.powf(d_log)),
                Layer::half_space(bottom),
            ],
            vec![
                Some(Sheet { material: MaterialModel::KuboGraphene(g) }),
                None,
            ],
        )
        .unwrap()
        .resolve(300.0);
        let (rs, rp) = stack
            .reflection(10f64.powf(lg_k), Frequency::Imaginary(10f64.powf(lg_xi)))
            .unwrap();
        prop_assert!(rs.norm() <= 1.0 + 1e-9);
        prop_assert!(rp.norm() <= 1.0 + 1e-9);
        prop_assert!(rs.im.abs() < 1e-9 && rp.im.abs() < 1e-9);
    }
}

#[test]
fn kz_from_k_par_has_radiation_branch() {
    // the public k_par entry point must still pick decaying/outgoing waves
    let stack = LayerStack::new(
        vec![
            Layer::vacuum(),
            Layer::half_space(MaterialModel::Dielectric { epsilon: 2.0 }),
        ],
        vec![None],
    )
    .unwrap()
    .resolve(300.0);
    let omega = 1e13;
    // evanescent in vacuum, propagating in the dielectric
    let k_par = 1.2 * omega / C;
    let (rs, rp) = stack.reflection(k_par, Frequency::Real(omega)).unwrap();
    assert!(rs.norm() <= 1.0 + 1e-9 && rp.norm() <= 1.0 + 1e-9);
    let _ = Complex64::new(0.0, 0.0);
}

//! The complex-frequency Lindhard evaluator against a direct
//! complex-argument evaluation of the region closed forms, written
//! independently here with complex arithmetic, at interior points of every
//! region. Also characterizes the genuine sqrt divergence on the y = x line
//! and the smoothing the relaxation-time form provides there.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rydcp::constants::HBAR;
use rydcp::materials::{
    lindhard_polarizability, lindhard_polarizability_complex, lindhard_region,
    rpa_rt_polarizability, GrapheneParams, PlaneRegion, FERMI_VELOCITY,
};

fn params() -> GrapheneParams {
    GrapheneParams::from_ev(0.1, 4e12, 300.0).unwrap()
}

fn c_h_complex(a: Complex64) -> Complex64 {
    a * (a * a - 1.0).sqrt() - (a + (a * a - 1.0).sqrt()).ln()
}

fn c_complex(a: Complex64) -> Complex64 {
    // a sqrt(1 - a^2) - arccos(a), arccos(z) = -i ln(z + i sqrt(1 - z^2))
    let s = (1.0 - a * a).sqrt();
    let arccos = -Complex64::i() * (a + Complex64::i() * s).ln();
    a * s - arccos
}

/// The region closed form continued verbatim to complex y (small Im y keeps
/// every branch on its principal sheet inside a region's interior).
fn region_form_complex(x: f64, y: Complex64, region: PlaneRegion) -> Complex64 {
    let t4 = (2.0 + y) / x;
    let t5 = (2.0 - y) / x;
    let t6 = (y - 2.0) / x;
    let i = Complex64::i();
    match region {
        PlaneRegion::R1A => {
            let t3 = x * x / (x * x - y * y).sqrt();
            -2.0 + i * 0.25 * t3 * (c_h_complex(t5) - c_h_complex(t4))
        }
        PlaneRegion::R2A => {
            let t3 = x * x / (x * x - y * y).sqrt();
            -2.0 + 0.25 * t3 * c_complex(t5) - i * 0.25 * t3 * c_h_complex(t4)
        }
        PlaneRegion::R3A => {
            let t3 = x * x / (x * x - y * y).sqrt();
            -2.0 + 0.25 * t3 * (c_complex(t4) + c_complex(t5))
        }
        PlaneRegion::R1B => {
            let t2 = x * x / (y * y - x * x).sqrt();
            -2.0 + 0.25 * t2 * (c_h_complex(t4) - c_h_complex(t5))
        }
        PlaneRegion::R2B => {
            let t2 = x * x / (y * y - x * x).sqrt();
            -2.0 + 0.25 * t2 * c_h_complex(t4) + i * 0.25 * t2 * c_complex(t5)
        }
        PlaneRegion::R3B => {
            let t2 = x * x / (y * y - x * x).sqrt();
            -2.0 + 0.25 * t2 * (c_h_complex(t4) - c_h_complex(t6))
                - i * 0.25 * std::f64::consts::PI * t2
        }
    }
}

#[test]
fn continuation_matches_direct_complex_region_evaluation() {
    // ten seeded random interior points spread over the six regions
    let p = params();
    let kf = p.fermi_wavevector();
    let ef = p.ef_abs();
    let t1 = kf / (std::f64::consts::PI * HBAR * FERMI_VELOCITY);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 10 {
        let x: f64 = rng.gen_range(0.1..4.0);
        let y: f64 = rng.gen_range(0.05..4.0);
        // stay off the boundary lines so a small Im y cannot hop regions
        let margin = [y - x, y - x - 2.0, y - x + 2.0, y + x - 2.0]
            .iter()
            .map(|d| d.abs())
            .fold(f64::INFINITY, f64::min);
        if margin < 0.05 {
            continue;
        }
        let q = x * kf;
        let omega = y * ef / HBAR;
        let region = lindhard_region(q, omega, &p).unwrap();
        let dy = 1e-4 * y.max(0.1);
        let yc = Complex64::new(y, dy);
        let want = region_form_complex(x, yc, region) * t1;
        let got =
            lindhard_polarizability_complex(q, Complex64::new(omega, dy * ef / HBAR), &p).unwrap();
        assert!(
            (got - want).norm() <= 1e-9 * want.norm(),
            "({x:.3}, {y:.3}) in {region:?}: {got} vs {want}"
        );
        checked += 1;
    }
}

#[test]
fn light_line_divergence_has_sqrt_character() {
    // the bare T = 0 polarizability diverges as 1/sqrt(|y - x|) on y = x:
    // approaching from both sides, |P| sqrt(|y - x|) tends to the same
    // constant even though the limit rotates from real to imaginary
    let p = params();
    let kf = p.fermi_wavevector();
    let ef = p.ef_abs();
    let x = 0.5;
    let q = x * kf;
    let mut above = Vec::new();
    let mut below = Vec::new();
    for k in 5..9 {
        let d = 10f64.powi(-k);
        let wa = (x + d) * ef / HBAR;
        let wb = (x - d) * ef / HBAR;
        let pa = lindhard_polarizability(q, wa, &p).unwrap();
        let pb = lindhard_polarizability(q, wb, &p).unwrap();
        above.push(pa.norm() * d.sqrt());
        below.push(pb.norm() * d.sqrt());
    }
    let ra = above.last().unwrap() / above.first().unwrap();
    let rb = below.last().unwrap() / below.first().unwrap();
    assert!((ra - 1.0).abs() < 0.05, "above scaling {ra}");
    assert!((rb - 1.0).abs() < 0.05, "below scaling {rb}");
    let cross = above.last().unwrap() / below.last().unwrap();
    assert!((cross - 1.0).abs() < 0.05, "side mismatch {cross}");
}

#[test]
fn relaxation_time_form_is_smooth_across_the_light_line() {
    // P_gamma is finite and continuous across y = x for gamma > 0 — the
    // quantity the conductivity pipeline consumes
    let p = params();
    let kf = p.fermi_wavevector();
    let ef = p.ef_abs();
    let x = 0.8;
    let q = x * kf;
    let w0 = x * ef / HBAR;
    let lo = rpa_rt_polarizability(q, w0 * (1.0 - 1e-6), &p).unwrap();
    let hi = rpa_rt_polarizability(q, w0 * (1.0 + 1e-6), &p).unwrap();
    assert!(lo.is_finite() && hi.is_finite());
    assert!(
        (lo - hi).norm() / lo.norm() < 1e-4,
        "P_gamma jump across the light line: {lo} vs {hi}"
    );
}

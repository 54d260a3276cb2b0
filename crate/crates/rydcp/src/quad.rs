//! Adaptive Gauss-Kronrod quadrature (7/15-point pair).
//!
//! Three entry points cover the integral shapes that appear in the layered
//! Green's tensor and the graphene conductivity:
//! * [`quad_adaptive`] — plain adaptive bisection on a finite interval,
//! * [`quad_decay`] — geometric panel ladder for integrands that decay over
//!   many length scales (exponential tails under an interval much longer than
//!   the decay scale would otherwise defeat the error estimator),
//! * [`quad_oscillatory`] — fixed-width panel march sized to a fraction of an
//!   oscillation period, adaptive within each panel.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use thiserror::Error;

/// Values that can be accumulated by the integrator.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Max-abs norm used for error control.
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

impl QuadValue for [Complex64; 2] {
    fn zero() -> Self {
        [Complex64::new(0.0, 0.0); 2]
    }
    fn add(self, other: Self) -> Self {
        [self[0] + other[0], self[1] + other[1]]
    }
    fn scale(self, s: f64) -> Self {
        [self[0] * s, self[1] * s]
    }
    fn norm(self) -> f64 {
        self[0].norm().max(self[1].norm())
    }
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error(
        "quadrature did not converge on [{a:.6e}, {b:.6e}]: err {err:.3e} > tol {tol:.3e} \
         after {subdivisions} subdivisions"
    )]
    NotConverged {
        a: f64,
        b: f64,
        err: f64,
        tol: f64,
        subdivisions: usize,
    },
    #[error("oscillatory integral needs {panels} panels, above the cap {cap}")]
    TooManyPanels { panels: usize, cap: usize },
}

/// Result of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V> {
    pub value: V,
    pub abs_err: f64,
    pub evaluations: usize,
}

/// Tolerances shared by the integration routines.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_subdiv: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 0.0,
            rel: 1e-10,
            max_subdiv: 400,
        }
    }
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64) -> Self {
        QuadTol {
            abs,
            rel,
            ..Default::default()
        }
    }
}

// 15-point Kronrod nodes on [0, 1] side of the symmetric rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod 7/15 evaluation on [a, b]; returns the Kronrod value,
/// the rescaled error estimate and the resolution scale ∫|f| (QUADPACK qk15).
fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut values = [V::zero(); 15]; // node order: -x7..-x1, 0, x1..x7
    values[7] = f(center);
    for (i, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        values[6 - i] = f(center - dx);
        values[8 + i] = f(center + dx);
    }

    let mut kronrod = values[7].scale(WGK[7]);
    let mut gauss = values[7].scale(WG[3]);
    let mut res_abs = values[7].norm() * WGK[7];
    for (i, w) in WGK.iter().take(7).enumerate() {
        let fsum = values[6 - i].add(values[8 + i]);
        kronrod = kronrod.add(fsum.scale(*w));
        res_abs += (values[6 - i].norm() + values[8 + i].norm()) * w;
        if i % 2 == 1 {
            gauss = gauss.add(fsum.scale(WG[i / 2]));
        }
    }
    let mean = kronrod.scale(0.5);
    let mut res_asc = values[7].add(mean.scale(-1.0)).norm() * WGK[7];
    for (i, w) in WGK.iter().take(7).enumerate() {
        res_asc += (values[6 - i].add(mean.scale(-1.0)).norm()
            + values[8 + i].add(mean.scale(-1.0)).norm())
            * w;
    }

    let kronrod = kronrod.scale(half);
    let gauss = gauss.scale(half);
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let diff = kronrod.add(gauss.scale(-1.0)).norm();

    // QUADPACK rescaling: sharpen the raw |K15 - G7| difference for smooth
    // segments, never claim better than the roundoff of ∫|f|
    let mut err = diff;
    if res_asc > 0.0 && diff > 0.0 {
        let scale = (200.0 * diff / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (kronrod, err, res_abs)
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
    resabs: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b].
pub fn quad_adaptive<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    tol: &QuadTol,
) -> Result<QuadResult<V>, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: V::zero(),
            abs_err: 0.0,
            evaluations: 0,
        });
    }
    let mut evals = 15usize;
    let (v0, e0, r0) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        err: e0,
        resabs: r0,
    });
    let mut total = v0;
    let mut total_err = e0;
    let mut total_resabs = r0;

    // the roundoff of ∫|f| bounds what any refinement can achieve
    let bound = |total: &V, resabs: f64| {
        tol.abs
            .max(tol.rel * total.norm())
            .max(100.0 * f64::EPSILON * resabs)
    };

    for _ in 0..tol.max_subdiv {
        if total_err <= bound(&total, total_resabs) {
            return Ok(QuadResult {
                value: total,
                abs_err: total_err,
                evaluations: evals,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid == worst.a || mid == worst.b {
            // interval at floating-point resolution; keep its estimate
            heap.push(Segment { err: 0.0, ..worst });
            continue;
        }
        let (vl, el, rl) = gk15(&mut f, worst.a, mid);
        let (vr, er, rr) = gk15(&mut f, mid, worst.b);
        evals += 30;
        total = total.add(vl.add(vr).add(worst.value.scale(-1.0)));
        total_err += el + er - worst.err;
        total_resabs += rl + rr - worst.resabs;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: vl,
            err: el,
            resabs: rl,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: vr,
            err: er,
            resabs: rr,
        });
    }

    if total_err <= bound(&total, total_resabs) {
        Ok(QuadResult {
            value: total,
            abs_err: total_err,
            evaluations: evals,
        })
    } else {
        Err(QuadError::NotConverged {
            a,
            b,
            err: total_err,
            tol: bound(&total, total_resabs),
            subdivisions: tol.max_subdiv,
        })
    }
}

/// Integrate `f` on [a, cutoff] when the integrand decays on a scale `scale`
/// much shorter than the interval. Panels double geometrically from `scale`
/// so the mass near `a` cannot be missed by a sparse first pass.
pub fn quad_decay<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    scale: f64,
    cutoff: f64,
    tol: &QuadTol,
) -> Result<QuadResult<V>, QuadError> {
    assert!(scale > 0.0 && cutoff > a);
    let mut lo = a;
    let mut width = scale;
    let mut total = V::zero();
    let mut err = 0.0;
    let mut evals = 0usize;
    // Tighten panel tolerance: panels accumulate.
    let panel_tol = QuadTol {
        abs: tol.abs,
        rel: tol.rel * 0.1,
        max_subdiv: tol.max_subdiv,
    };
    while lo < cutoff {
        let hi = (lo + width).min(cutoff);
        let r = quad_adaptive(&mut f, lo, hi, &panel_tol)?;
        total = total.add(r.value);
        err += r.abs_err;
        evals += r.evaluations;
        lo = hi;
        width *= 2.0;
    }
    Ok(QuadResult {
        value: total,
        abs_err: err,
        evaluations: evals,
    })
}

/// Integrate an oscillatory `f` on [a, b], marching panels of width
/// `panel_width` (a fraction of the oscillation period), adaptive per panel.
pub fn quad_oscillatory<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    panel_width: f64,
    tol: &QuadTol,
) -> Result<QuadResult<V>, QuadError> {
    assert!(panel_width > 0.0);
    if b <= a {
        return Ok(QuadResult {
            value: V::zero(),
            abs_err: 0.0,
            evaluations: 0,
        });
    }
    let panels = ((b - a) / panel_width).ceil() as usize;
    const PANEL_CAP: usize = 2_000_000;
    if panels > PANEL_CAP {
        return Err(QuadError::TooManyPanels {
            panels,
            cap: PANEL_CAP,
        });
    }
    let width = (b - a) / panels as f64;
    let mut total = V::zero();
    let mut err = 0.0;
    let mut evals = 0usize;
    let panel_tol = QuadTol {
        abs: tol.abs,
        rel: tol.rel,
        max_subdiv: 60,
    };
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == panels {
            b
        } else {
            a + (i + 1) as f64 * width
        };
        let r = quad_adaptive(&mut f, lo, hi, &panel_tol)?;
        total = total.add(r.value);
        err += r.abs_err;
        evals += r.evaluations;
    }
    Ok(QuadResult {
        value: total,
        abs_err: err,
        evaluations: evals,
    })
}

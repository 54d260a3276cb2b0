//! Fitting layer: power-law dispersion fits, dispersion-coefficient scaling
//! in n, the empirical C3(n, T) model, and oscillation-wavelength extraction.
//!
//! Power laws are fit in log space (relative residuals); the linear and
//! polynomial fits minimize absolute residuals. Both are linear least
//! squares solved through small normal systems with a scaled basis.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("mixed-sign potentials cannot be fit by a power law (oscillatory regime)")]
    MixedSign,
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error("temperature grid must span >= {need_span} K with >= {need_points} points per n")]
    InsufficientTemperatureGrid { need_span: f64, need_points: usize },
    #[error("no full oscillation cycle found past the starting point")]
    NoCycleFound,
}

/// U = -C_alpha / z0^alpha.
#[derive(Debug, Clone, Serialize)]
pub struct PowerLawFit {
    /// dispersion coefficient, Hz m^alpha, positive for attractive data
    pub c_alpha: f64,
    pub alpha: f64,
    /// relative RMS residual in log space
    pub residual: f64,
    /// z0 range of the fit (m)
    pub domain: (f64, f64),
}

fn solve_normal_equations(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, AnalysisError> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(AnalysisError::Degenerate(format!(
                "singular normal matrix at column {col}"
            )));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    Ok((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Least squares of y against the given basis columns phi_k(x).
fn linear_least_squares(
    xs: &[f64],
    ys: &[f64],
    basis: &[&dyn Fn(f64) -> f64],
) -> Result<Vec<f64>, AnalysisError> {
    let m = basis.len();
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for (&x, &y) in xs.iter().zip(ys) {
        let row: Vec<f64> = basis.iter().map(|f| f(x)).collect();
        for i in 0..m {
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    solve_normal_equations(ata, atb)
}

/// Fit U(z0) = -C/z0^alpha on same-sign samples (z0 in m, U in Hz).
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit, AnalysisError> {
    if samples.len() < 4 {
        return Err(AnalysisError::TooFewSamples {
            need: 4,
            got: samples.len(),
        });
    }
    let sign = samples[0].1.signum();
    if samples.iter().any(|&(_, u)| u == 0.0 || u.signum() != sign) {
        return Err(AnalysisError::MixedSign);
    }
    let xs: Vec<f64> = samples.iter().map(|&(z, _)| z.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, u)| u.abs().ln()).collect();
    let coef = linear_least_squares(&xs, &ys, &[&|_| 1.0, &|x| x])?;
    let alpha = -coef[1];
    // U = -C/z^alpha: attractive data (U < 0) has C > 0
    let c_alpha = if sign < 0.0 {
        coef[0].exp()
    } else {
        -coef[0].exp()
    };
    let residual = {
        let mut ss = 0.0;
        for (&x, &y) in xs.iter().zip(&ys) {
            let pred = coef[0] + coef[1] * x;
            ss += (y - pred) * (y - pred);
        }
        (ss / xs.len() as f64).sqrt()
    };
    let domain = samples.iter().fold((f64::INFINITY, 0.0f64), |acc, &(z, _)| {
        (acc.0.min(z), acc.1.max(z))
    });
    Ok(PowerLawFit {
        c_alpha,
        alpha,
        residual,
        domain,
    })
}

/// Functional form for the C3(n) scaling fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum C3Form {
    /// C3 = q1 n^4 + q2 n^3
    TwoTerm,
    /// C3 = c n^alpha
    SinglePower,
}

#[derive(Debug, Clone, Serialize)]
pub struct C3Fit {
    pub form: C3Form,
    /// TwoTerm: (q1, q2); SinglePower: (c, alpha)
    pub coefficients: (f64, f64),
    /// relative RMS residual
    pub residual: f64,
}

/// Fit the dispersion coefficient against principal quantum number.
pub fn fit_c3_vs_n(data: &[(f64, f64)], form: C3Form) -> Result<C3Fit, AnalysisError> {
    if data.len() < 5 {
        return Err(AnalysisError::TooFewSamples {
            need: 5,
            got: data.len(),
        });
    }
    let ns: Vec<f64> = data.iter().map(|&(n, _)| n).collect();
    let cs: Vec<f64> = data.iter().map(|&(_, c)| c).collect();
    match form {
        C3Form::TwoTerm => {
            // scale the basis by n0 to keep the normal system well conditioned
            let n0 = ns[ns.len() / 2];
            let coef = linear_least_squares(
                &ns,
                &cs,
                &[&|n: f64| (n / n0).powi(4), &|n: f64| (n / n0).powi(3)],
            )?;
            let q1 = coef[0] / n0.powi(4);
            let q2 = coef[1] / n0.powi(3);
            let mut ss = 0.0;
            for (&n, &c) in ns.iter().zip(&cs) {
                let pred = q1 * n.powi(4) + q2 * n.powi(3);
                ss += ((pred - c) / c).powi(2);
            }
            Ok(C3Fit {
                form,
                coefficients: (q1, q2),
                residual: (ss / ns.len() as f64).sqrt(),
            })
        }
        C3Form::SinglePower => {
            if cs.iter().any(|&c| c <= 0.0) {
                return Err(AnalysisError::MixedSign);
            }
            let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
            let ys: Vec<f64> = cs.iter().map(|c| c.ln()).collect();
            let coef = linear_least_squares(&xs, &ys, &[&|_| 1.0, &|x| x])?;
            let c = coef[0].exp();
            let alpha = coef[1];
            let mut ss = 0.0;
            for (&n, &cv) in ns.iter().zip(&cs) {
                let pred = c * n.powf(alpha);
                ss += ((pred - cv) / cv).powi(2);
            }
            Ok(C3Fit {
                form,
                coefficients: (c, alpha),
                residual: (ss / ns.len() as f64).sqrt(),
            })
        }
    }
}

/// Basis for the p1(n) polynomial of the empirical model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum P1Basis {
    /// {n^7, 1} (the printed two-coefficient form)
    Restricted,
    /// full degree-7 polynomial
    FullDegree7,
}

/// C3(n, T) = p1(n) T + p2(n), with p1 of degree-7 form (Hz m^3/K) and p2 of
/// degree-4 form {n^4, n^3} (Hz m^3).
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalModel {
    /// restricted form (n^7 coefficient, constant); None when full basis used
    pub p1: Option<(f64, f64)>,
    /// full degree-7 coefficients, highest power first (when requested)
    pub p1_full: Option<Vec<f64>>,
    /// (n^4, n^3) coefficients
    pub p2: (f64, f64),
    /// fit domain: (n_min, n_max, T_min, T_max)
    pub domain: (f64, f64, f64, f64),
}

impl EmpiricalModel {
    pub fn p1_at(&self, n: f64) -> f64 {
        if let Some((a7, a0)) = self.p1 {
            a7 * n.powi(7) + a0
        } else if let Some(full) = &self.p1_full {
            full.iter().fold(0.0, |acc, &c| acc * n + c)
        } else {
            0.0
        }
    }

    pub fn p2_at(&self, n: f64) -> f64 {
        self.p2.0 * n.powi(4) + self.p2.1 * n.powi(3)
    }
}

/// Build the empirical model from (n, T, C3) samples: per-n linear fits in T,
/// then polynomial fits of the slopes and intercepts in n.
pub fn fit_empirical_model(
    grid: &[(f64, f64, f64)],
    basis: P1Basis,
) -> Result<EmpiricalModel, AnalysisError> {
    let mut by_n: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for &(n, t, c3) in grid {
        match by_n.iter_mut().find(|(m, _)| *m == n) {
            Some((_, v)) => v.push((t, c3)),
            None => by_n.push((n, vec![(t, c3)])),
        }
    }
    if by_n.len() < 5 {
        return Err(AnalysisError::TooFewSamples {
            need: 5,
            got: by_n.len(),
        });
    }
    let mut slopes = Vec::new();
    let mut intercepts = Vec::new();
    let mut t_lo = f64::INFINITY;
    let mut t_hi = 0.0f64;
    for (n, pts) in &by_n {
        let span = pts.iter().map(|p| p.0).fold(0.0f64, f64::max)
            - pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        if pts.len() < 5 || span < 100.0 {
            return Err(AnalysisError::InsufficientTemperatureGrid {
                need_span: 100.0,
                need_points: 5,
            });
        }
        let ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let cs: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let coef = linear_least_squares(&ts, &cs, &[&|_| 1.0, &|t| t])?;
        intercepts.push((*n, coef[0]));
        slopes.push((*n, coef[1]));
        t_lo = t_lo.min(ts.iter().cloned().fold(f64::INFINITY, f64::min));
        t_hi = t_hi.max(ts.iter().cloned().fold(0.0, f64::max));
    }
    let ns: Vec<f64> = slopes.iter().map(|p| p.0).collect();
    let n0 = ns[ns.len() / 2];
    let sl: Vec<f64> = slopes.iter().map(|p| p.1).collect();
    let ic: Vec<f64> = intercepts.iter().map(|p| p.1).collect();

    let (p1, p1_full) = match basis {
        P1Basis::Restricted => {
            let coef =
                linear_least_squares(&ns, &sl, &[&|n: f64| (n / n0).powi(7), &|_| 1.0])?;
            (Some((coef[0] / n0.powi(7), coef[1])), None)
        }
        P1Basis::FullDegree7 => {
            let basis_fns: Vec<Box<dyn Fn(f64) -> f64>> = (0..=7)
                .map(|k| {
                    let k = k as i32;
                    Box::new(move |n: f64| (n / n0).powi(7 - k)) as Box<dyn Fn(f64) -> f64>
                })
                .collect();
            let refs: Vec<&dyn Fn(f64) -> f64> = basis_fns.iter().map(|b| b.as_ref()).collect();
            let coef = linear_least_squares(&ns, &sl, &refs)?;
            let full: Vec<f64> = coef
                .iter()
                .enumerate()
                .map(|(k, &c)| c / n0.powi(7 - k as i32))
                .collect();
            (None, Some(full))
        }
    };
    let p2_coef = linear_least_squares(
        &ns,
        &ic,
        &[&|n: f64| (n / n0).powi(4), &|n: f64| (n / n0).powi(3)],
    )?;
    Ok(EmpiricalModel {
        p1,
        p1_full,
        p2: (p2_coef[0] / n0.powi(4), p2_coef[1] / n0.powi(3)),
        domain: (
            ns.iter().cloned().fold(f64::INFINITY, f64::min),
            ns.iter().cloned().fold(0.0, f64::max),
            t_lo,
            t_hi,
        ),
    })
}

/// Evaluate the empirical potential U = -(p1(n) T + p2(n)) / z0^3 (Hz).
pub fn empirical_potential(model: &EmpiricalModel, n: f64, temp: f64, z0: f64) -> f64 {
    -(model.p1_at(n) * temp + model.p2_at(n)) / z0.powi(3)
}

/// Wavelength of the first full oscillation cycle (zero-crossing based) of a
/// U(z0) trace past z0 = lambda_start/2. Invariant under positive rescaling
/// of U.
pub fn extract_oscillation_wavelength(
    trace: &[(f64, f64)],
    lambda_start: f64,
) -> Result<f64, AnalysisError> {
    let start = lambda_start / 2.0;
    let mut crossings = Vec::new();
    for pair in trace.windows(2) {
        let (z1, u1) = pair[0];
        let (z2, u2) = pair[1];
        if z2 <= start || u1 == 0.0 {
            continue;
        }
        if u1.signum() != u2.signum() && u2 != 0.0 {
            // linear interpolation of the crossing
            let z = z1 + (z2 - z1) * u1.abs() / (u1.abs() + u2.abs());
            crossings.push(z);
        }
    }
    if crossings.len() < 3 {
        return Err(AnalysisError::NoCycleFound);
    }
    Ok(crossings[2] - crossings[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_roundtrip() {
        let c = 4.2e-10;
        let samples: Vec<(f64, f64)> = (1..=12)
            .map(|i| {
                let z = 1e-6 * i as f64;
                (z, -c / z.powi(3))
            })
            .collect();
        let fit = fit_power_law(&samples).unwrap();
        assert!((fit.alpha - 3.0).abs() < 1e-10);
        assert!((fit.c_alpha - c).abs() / c < 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn power_law_scale_equivariance() {
        let samples: Vec<(f64, f64)> = (2..=10)
            .map(|i| {
                let z = 1e-6 * i as f64;
                (z, -3.0e-10 / z.powf(2.7))
            })
            .collect();
        let scaled: Vec<(f64, f64)> = samples.iter().map(|&(z, u)| (z, 5.0 * u)).collect();
        let f1 = fit_power_law(&samples).unwrap();
        let f2 = fit_power_law(&scaled).unwrap();
        assert!((f2.alpha - f1.alpha).abs() < 1e-12);
        assert!((f2.c_alpha / f1.c_alpha - 5.0).abs() < 1e-10);
    }

    #[test]
    fn power_law_rejects_mixed_sign_and_short_input() {
        assert!(matches!(
            fit_power_law(&[(1e-6, -1.0), (2e-6, 1.0), (3e-6, -0.5), (4e-6, 0.2)]),
            Err(AnalysisError::MixedSign)
        ));
        assert!(matches!(
            fit_power_law(&[(1e-6, -1.0), (2e-6, -0.5)]),
            Err(AnalysisError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn c3_two_term_roundtrip_on_printed_coefficients() {
        let (q1, q2) = (1.923e-16, -1.840e-15);
        let data: Vec<(f64, f64)> = (20..=50)
            .map(|n| {
                let n = n as f64;
                (n, q1 * n.powi(4) + q2 * n.powi(3))
            })
            .collect();
        let fit = fit_c3_vs_n(&data, C3Form::TwoTerm).unwrap();
        assert!((fit.coefficients.0 - q1).abs() / q1.abs() < 1e-8);
        assert!((fit.coefficients.1 - q2).abs() / q2.abs() < 1e-8);
    }

    #[test]
    fn c3_single_power_close_to_n4_on_two_term_data() {
        let (q1, q2) = (1.923e-16, -1.840e-15);
        let data: Vec<(f64, f64)> = (20..=50)
            .map(|n| {
                let n = n as f64;
                (n, q1 * n.powi(4) + q2 * n.powi(3))
            })
            .collect();
        let fit = fit_c3_vs_n(&data, C3Form::SinglePower).unwrap();
        assert!(
            fit.coefficients.1 > 4.2 && fit.coefficients.1 < 4.6,
            "exponent {}",
            fit.coefficients.1
        );
    }

    #[test]
    fn c3_degenerate_input_rejected() {
        assert!(fit_c3_vs_n(&[(20.0, 1.0), (21.0, 1.1)], C3Form::TwoTerm).is_err());
    }

    #[test]
    fn empirical_roundtrip_on_printed_model() {
        let (a7, a0) = (-4.0e-25, -9.38e-15);
        let (b4, b3) = (1.866e-16, -1.614e-15);
        let mut grid = Vec::new();
        for n in [20.0f64, 25.0, 30.0, 35.0, 40.0] {
            for i in 0..8 {
                let t = 50.0 + 50.0 * i as f64;
                let c3 = (a7 * n.powi(7) + a0) * t + b4 * n.powi(4) + b3 * n.powi(3);
                grid.push((n, t, c3));
            }
        }
        let m = fit_empirical_model(&grid, P1Basis::Restricted).unwrap();
        let (f7, f0) = m.p1.unwrap();
        assert!((f7 - a7).abs() / a7.abs() < 1e-2, "n^7 coeff {f7}");
        assert!((f0 - a0).abs() / a0.abs() < 1e-2);
        assert!((m.p2.0 - b4).abs() / b4.abs() < 1e-2);
        assert!((m.p2.1 - b3).abs() / b3.abs() < 1e-2);
        // z0 doubled -> potential / 8
        let u1 = empirical_potential(&m, 30.0, 300.0, 1e-6);
        let u2 = empirical_potential(&m, 30.0, 300.0, 2e-6);
        assert!((u1 / u2 - 8.0).abs() < 1e-10);
    }

    #[test]
    fn empirical_constant_in_t_gives_zero_slope() {
        let mut grid = Vec::new();
        for n in [20.0f64, 25.0, 30.0, 35.0, 40.0] {
            for i in 0..6 {
                let t = 50.0 + 60.0 * i as f64;
                grid.push((n, t, 2e-16 * n.powi(4)));
            }
        }
        let m = fit_empirical_model(&grid, P1Basis::Restricted).unwrap();
        let (f7, f0) = m.p1.unwrap();
        assert!(f7.abs() < 1e-28 && f0.abs() < 1e-16, "p1 = ({f7}, {f0})");
    }

    #[test]
    fn empirical_grid_validation() {
        let grid: Vec<(f64, f64, f64)> = (0..5).map(|i| (20.0 + i as f64, 300.0, 1.0)).collect();
        assert!(matches!(
            fit_empirical_model(&grid, P1Basis::Restricted),
            Err(AnalysisError::InsufficientTemperatureGrid { .. })
        ));
    }

    #[test]
    fn oscillation_wavelength_synthetic_tail() {
        let lambda = 70e-6;
        let trace: Vec<(f64, f64)> = (0..2200)
            .map(|i| {
                let z = 10e-6 + 0.25e-6 * i as f64;
                (z, (2.0 * std::f64::consts::PI * z / lambda).sin() / z.powi(3))
            })
            .collect();
        let got = extract_oscillation_wavelength(&trace, 120e-6).unwrap();
        assert!((got - lambda).abs() < 0.3e-6, "lambda = {got}");
        // invariance under positive scaling
        let scaled: Vec<(f64, f64)> = trace.iter().map(|&(z, u)| (z, 7.3 * u)).collect();
        let got2 = extract_oscillation_wavelength(&scaled, 120e-6).unwrap();
        assert_eq!(got, got2);
    }

    #[test]
    fn oscillation_requires_enough_cycles() {
        let trace: Vec<(f64, f64)> = (0..10)
            .map(|i| (1e-6 * i as f64, -1.0 / (1.0 + i as f64)))
            .collect();
        assert!(matches!(
            extract_oscillation_wavelength(&trace, 1e-6),
            Err(AnalysisError::NoCycleFound)
        ));
    }
}

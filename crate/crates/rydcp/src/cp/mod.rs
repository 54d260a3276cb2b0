//! Assembly of the thermal Casimir-Polder potential:
//!
//!   U = U_nres + U_res,
//!
//!   U_nres = mu0 kB T sum_j' xi_j^2 [alpha(i xi_j) . G(i xi_j)]
//!            (primed sum: the j = 0 term at half weight, taken through the
//!             finite combination h = xi^2 G),
//!
//!   U_res  = -mu0 sum_{k<u} (N+1) w_uk^2 (d x d) . Re G(w_uk)
//!            +mu0 sum_{k>u}  N    w_ku^2 (d x d) . Re G(w_ku),
//!
//! with the resonant part split into its evanescent and propagating pieces
//! and resolved per intermediate level. Energies are reported as U/h in Hz.

mod regime;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::atomic::{Atom, AtomicError, AtomicState, BasisWindow, HalfInt};
use crate::constants::{H_PLANCK, HBAR, K_B, MU_0};
use crate::em::{
    green_scattering_matsubara, green_scattering_real, EmError, LayerStack, ResolvedStack,
};

pub use regime::{
    regime_report, GeometricRegime, RegimeReport, Retardation, SpectroscopicRegime,
};

#[derive(Debug, Error)]
pub enum CpError {
    #[error(transparent)]
    Atomic(#[from] AtomicError),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error("temperature must be positive for the Matsubara sum, got {0}")]
    NonPositiveTemperature(f64),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("Matsubara sum not converged after {cap} terms (last relative term {last:.3e})")]
    MatsubaraTruncation { cap: usize, last: f64 },
    #[error("mixture weights must be nonnegative and sum to 1 (sum = {sum})")]
    BadWeights { sum: f64 },
}

/// Signed contribution of one intermediate level to the resonant term.
#[derive(Debug, Clone)]
pub struct TransitionContribution {
    /// representative state of the level (m sublevels are summed)
    pub state: AtomicState,
    /// evanescent + propagating resonant contribution (Hz)
    pub contribution_hz: f64,
    /// signed share: contribution / sum_k |contribution_k|
    pub share: f64,
}

/// The potential and its decomposition, in Hz (U/h).
#[derive(Debug, Clone)]
pub struct CpBreakdown {
    pub u_nres: f64,
    pub u_res_evan: f64,
    pub u_res_prop: f64,
    pub total: f64,
    pub per_transition: Vec<TransitionContribution>,
}

impl CpBreakdown {
    pub fn zero() -> Self {
        CpBreakdown {
            u_nres: 0.0,
            u_res_evan: 0.0,
            u_res_prop: 0.0,
            total: 0.0,
            per_transition: Vec::new(),
        }
    }
}

/// Dipole-coupled level list of a target state with transition frequencies
/// and summed line strengths, precomputed once per state.
struct TransitionTable {
    /// (level, omega_ku signed, per-axis strength sum_m' |d_i|^2)
    entries: Vec<((u32, u32, HalfInt), f64, [f64; 3])>,
}

/// Solver configuration: basis window and tolerances.
pub struct CpSolver {
    atom: Arc<Atom>,
    window: BasisWindow,
    /// relative truncation threshold of the Matsubara sum
    pub matsubara_tol: f64,
    /// relative tolerance of the Green's-tensor quadratures
    pub quad_tol: f64,
    tables: RwLock<HashMap<(u32, u32, i32), Arc<TransitionTable>>>,
}

const MATSUBARA_CAP: usize = 100_000;
/// consecutive small terms required before the Matsubara sum stops
const MATSUBARA_RUN: usize = 5;

impl CpSolver {
    pub fn new(atom: Arc<Atom>) -> Self {
        CpSolver {
            atom,
            window: BasisWindow::default(),
            matsubara_tol: 1e-8,
            quad_tol: 1e-9,
            tables: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_window(mut self, window: BasisWindow) -> Self {
        self.window = window;
        self
    }

    pub fn with_tolerances(mut self, matsubara_tol: f64, quad_tol: f64) -> Self {
        self.matsubara_tol = matsubara_tol;
        self.quad_tol = quad_tol;
        self
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }

    fn table(&self, state: &AtomicState) -> Result<Arc<TransitionTable>, CpError> {
        let key = (state.n, state.l, state.j.doubled());
        if let Some(t) = self.tables.read().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        let mut entries = Vec::new();
        for level in self.atom.dipole_coupled_levels(state, &self.window) {
            let proto = AtomicState {
                n: level.0,
                l: level.1,
                j: level.2,
                m: HalfInt::HALF,
            };
            let omega = self.atom.transition_frequency(state, &proto)?;
            let strength = self.atom.transition_strength_diag(state, level)?;
            entries.push((level, omega, strength));
        }
        let t = Arc::new(TransitionTable { entries });
        self.tables.write().unwrap().insert(key, Arc::clone(&t));
        Ok(t)
    }

    /// Fix stack and temperature; reuses Matsubara Green evaluations across
    /// states and distances.
    pub fn evaluator<'a>(&'a self, stack: &LayerStack, temp: f64) -> CpEvaluator<'a> {
        CpEvaluator {
            solver: self,
            stack: stack.resolve(temp),
            temp,
            matsubara_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn nonresonant_potential(
        &self,
        state: &AtomicState,
        stack: &LayerStack,
        z0: f64,
        temp: f64,
    ) -> Result<f64, CpError> {
        self.evaluator(stack, temp).nonresonant(state, z0)
    }

    pub fn resonant_potential(
        &self,
        state: &AtomicState,
        stack: &LayerStack,
        z0: f64,
        temp: f64,
    ) -> Result<ResonantParts, CpError> {
        self.evaluator(stack, temp).resonant(state, z0)
    }

    pub fn total_potential(
        &self,
        state: &AtomicState,
        stack: &LayerStack,
        z0: f64,
        temp: f64,
    ) -> Result<CpBreakdown, CpError> {
        self.evaluator(stack, temp).total(state, z0)
    }

    /// Probability-weighted potential of an incoherent mixture.
    pub fn mixed_state_potential(
        &self,
        weights: &[(AtomicState, f64)],
        stack: &LayerStack,
        z0: f64,
        temp: f64,
    ) -> Result<f64, CpError> {
        let sum: f64 = weights.iter().map(|(_, p)| p).sum();
        if weights.iter().any(|(_, p)| *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(CpError::BadWeights { sum });
        }
        // merge duplicate states so identical members are evaluated once
        let mut merged: Vec<(AtomicState, f64)> = Vec::new();
        for (s, p) in weights {
            match merged.iter_mut().find(|(t, _)| t == s) {
                Some((_, q)) => *q += p,
                None => merged.push((*s, *p)),
            }
        }
        let ev = self.evaluator(stack, temp);
        let mut u = 0.0;
        for (s, p) in &merged {
            if *p == 0.0 {
                continue;
            }
            u += p * ev.total(s, z0)?.total;
        }
        Ok(u)
    }

    /// Characteristic lengths/temperatures and regime flags.
    pub fn regime_report(
        &self,
        state: &AtomicState,
        z0: f64,
        temp: f64,
    ) -> Result<RegimeReport, CpError> {
        regime::regime_report(&self.atom, state, z0, temp)
    }
}

/// Resonant part split into its wave-character components.
#[derive(Debug, Clone)]
pub struct ResonantParts {
    pub evanescent: f64,
    pub propagating: f64,
    pub per_transition: Vec<TransitionContribution>,
}

/// A [`CpSolver`] bound to one stack at one environment temperature.
pub struct CpEvaluator<'a> {
    solver: &'a CpSolver,
    stack: ResolvedStack,
    temp: f64,
    /// (z0 bits, xi bits) -> (h_xx, h_zz); shared across states of a scan
    matsubara_cache: RwLock<HashMap<(u64, u64), (f64, f64)>>,
}

impl CpEvaluator<'_> {
    fn matsubara_h(&self, z0: f64, xi: f64) -> Result<(f64, f64), CpError> {
        let key = (z0.to_bits(), xi.to_bits());
        if let Some(h) = self.matsubara_cache.read().unwrap().get(&key) {
            return Ok(*h);
        }
        let m = green_scattering_matsubara(&self.stack, z0, xi, self.solver.quad_tol)?;
        let h = (m.h_xx, m.h_zz);
        self.matsubara_cache.write().unwrap().insert(key, h);
        Ok(h)
    }

    /// Non-resonant (virtual-photon) part, Hz.
    pub fn nonresonant(&self, state: &AtomicState, z0: f64) -> Result<f64, CpError> {
        if z0 <= 0.0 {
            return Err(CpError::NonPositiveDistance(z0));
        }
        if self.temp <= 0.0 {
            return Err(CpError::NonPositiveTemperature(self.temp));
        }
        let table = self.solver.table(state)?;
        let alpha_diag = |xi: f64| -> [f64; 3] {
            let mut a = [0.0; 3];
            for (_, omega, strength) in &table.entries {
                let w = 2.0 * omega / (HBAR * (omega * omega + xi * xi));
                for i in 0..3 {
                    a[i] += strength[i] * w;
                }
            }
            a
        };
        let contract = |a: [f64; 3], h: (f64, f64)| a[0] * h.0 + a[1] * h.0 + a[2] * h.1;

        let xi_step = 2.0 * std::f64::consts::PI * K_B * self.temp / HBAR;
        let mut sum = 0.5 * contract(alpha_diag(0.0), self.matsubara_h(z0, 0.0)?);
        let mut small_run = 0usize;
        let mut last_rel = f64::INFINITY;
        let mut converged = false;
        for j in 1..=MATSUBARA_CAP {
            let xi = xi_step * j as f64;
            let term = contract(alpha_diag(xi), self.matsubara_h(z0, xi)?);
            sum += term;
            last_rel = term.abs() / sum.abs().max(f64::MIN_POSITIVE);
            if last_rel < self.solver.matsubara_tol {
                small_run += 1;
                if small_run >= MATSUBARA_RUN {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        if !converged {
            return Err(CpError::MatsubaraTruncation {
                cap: MATSUBARA_CAP,
                last: last_rel,
            });
        }
        Ok(MU_0 * K_B * self.temp / H_PLANCK * sum)
    }

    /// Resonant (real thermal photon) part, Hz, split into evanescent and
    /// propagating pieces with the per-level decomposition.
    pub fn resonant(&self, state: &AtomicState, z0: f64) -> Result<ResonantParts, CpError> {
        if z0 <= 0.0 {
            return Err(CpError::NonPositiveDistance(z0));
        }
        let table = self.solver.table(state)?;
        let mut evan_sum = 0.0;
        let mut prop_sum = 0.0;
        let mut contributions: Vec<(AtomicState, f64)> = Vec::new();
        for (level, omega_ku, strength) in &table.entries {
            let rep = AtomicState {
                n: level.0,
                l: level.1,
                j: level.2,
                m: HalfInt::HALF,
            };
            if *omega_ku == 0.0 {
                continue;
            }
            let downward = *omega_ku < 0.0;
            let w = omega_ku.abs();
            let n_th = crate::atomic::thermal_photon_number(w, self.temp);
            let weight = if downward { n_th + 1.0 } else { n_th };
            if weight == 0.0 {
                contributions.push((rep, 0.0));
                continue;
            }
            let sign = if downward { -1.0 } else { 1.0 };
            let factor = sign * MU_0 * weight * w * w / H_PLANCK;
            let (evan, prop) = green_scattering_real(&self.stack, z0, w, self.solver.quad_tol)?;
            let c_evan = factor
                * (strength[0] * evan.g_xx.re
                    + strength[1] * evan.g_xx.re
                    + strength[2] * evan.g_zz.re);
            let c_prop = factor
                * (strength[0] * prop.g_xx.re
                    + strength[1] * prop.g_xx.re
                    + strength[2] * prop.g_zz.re);
            evan_sum += c_evan;
            prop_sum += c_prop;
            contributions.push((rep, c_evan + c_prop));
        }
        let denom: f64 = contributions.iter().map(|(_, c)| c.abs()).sum();
        let per_transition = contributions
            .into_iter()
            .map(|(state, c)| TransitionContribution {
                state,
                contribution_hz: c,
                share: if denom > 0.0 { c / denom } else { 0.0 },
            })
            .collect();
        Ok(ResonantParts {
            evanescent: evan_sum,
            propagating: prop_sum,
            per_transition,
        })
    }

    /// Full thermal potential with its decomposition.
    pub fn total(&self, state: &AtomicState, z0: f64) -> Result<CpBreakdown, CpError> {
        let u_nres = self.nonresonant(state, z0)?;
        let res = self.resonant(state, z0)?;
        Ok(CpBreakdown {
            u_nres,
            u_res_evan: res.evanescent,
            u_res_prop: res.propagating,
            total: u_nres + res.evanescent + res.propagating,
            per_transition: res.per_transition,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::LayerStack;
    use crate::materials::{GrapheneParams, MaterialModel};

    fn solver() -> CpSolver {
        CpSolver::new(Arc::new(Atom::rb87()))
    }

    fn graphene_stack() -> LayerStack {
        let p = GrapheneParams::from_ev(0.1, 4e12, 0.0).unwrap();
        LayerStack::suspended_sheet(MaterialModel::KuboGraphene(p)).unwrap()
    }

    #[test]
    fn vacuum_stack_gives_zero_everything() {
        let s = solver();
        let state = AtomicState::ns(20);
        let b = s
            .total_potential(&state, &LayerStack::empty(), 5e-6, 10.0)
            .unwrap();
        assert_eq!(b.u_nres, 0.0);
        assert_eq!(b.u_res_evan, 0.0);
        assert_eq!(b.u_res_prop, 0.0);
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn zero_temperature_kills_upward_terms() {
        let s = solver();
        let state = AtomicState::ns(15);
        let res = s
            .resonant_potential(&state, &graphene_stack(), 2e-6, 0.0)
            .unwrap();
        let atom = s.atom();
        for t in &res.per_transition {
            let upward = atom.transition_frequency(&state, &t.state).unwrap() > 0.0;
            if upward {
                assert_eq!(t.contribution_hz, 0.0, "upward {} at T=0", t.state);
            }
        }
    }

    #[test]
    fn decomposition_identity_and_share_normalization() {
        let s = solver();
        let state = AtomicState::ns(20);
        let b = s
            .total_potential(&state, &graphene_stack(), 4e-6, 10.0)
            .unwrap();
        let sum = b.u_nres + b.u_res_evan + b.u_res_prop;
        assert!((b.total - sum).abs() <= 1e-10 * b.total.abs());
        let share_sum: f64 = b.per_transition.iter().map(|t| t.share.abs()).sum();
        assert!((share_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonresonant_is_attractive_above_graphene() {
        let s = solver();
        for (n, z0, t) in [(20u32, 1e-6, 10.0), (30, 1e-5, 100.0), (45, 5e-5, 400.0)] {
            let u = s
                .nonresonant_potential(&AtomicState::ns(n), &graphene_stack(), z0, t)
                .unwrap();
            assert!(u < 0.0, "U_nres = {u} at n={n}, z0={z0}, T={t}");
        }
    }

    #[test]
    fn matsubara_tolerance_contract() {
        let s = solver();
        let state = AtomicState::ns(20);
        let stack = graphene_stack();
        let coarse = s
            .nonresonant_potential(&state, &stack, 5e-6, 50.0)
            .unwrap();
        let tight = CpSolver::new(Arc::new(Atom::rb87()))
            .with_tolerances(1e-11, 1e-10)
            .nonresonant_potential(&state, &stack, 5e-6, 50.0)
            .unwrap();
        assert!((coarse - tight).abs() / tight.abs() < 1e-7);
    }

    #[test]
    fn mixture_rules() {
        let s = solver();
        let stack = graphene_stack();
        let a = AtomicState::ns(20);
        let b = AtomicState::ns(30);
        let ua = s.total_potential(&a, &stack, 5e-6, 10.0).unwrap().total;
        let ub = s.total_potential(&b, &stack, 5e-6, 10.0).unwrap().total;
        // single state with weight 1
        let single = s
            .mixed_state_potential(&[(a, 1.0)], &stack, 5e-6, 10.0)
            .unwrap();
        assert!((single - ua).abs() <= 1e-12 * ua.abs());
        // 50/50 of identical states
        let same = s
            .mixed_state_potential(&[(a, 0.5), (a, 0.5)], &stack, 5e-6, 10.0)
            .unwrap();
        assert!((same - ua).abs() <= 1e-12 * ua.abs());
        // 50/50 mixture is the arithmetic mean
        let mix = s
            .mixed_state_potential(&[(a, 0.5), (b, 0.5)], &stack, 5e-6, 10.0)
            .unwrap();
        assert!((mix - 0.5 * (ua + ub)).abs() <= 1e-10 * mix.abs());
        // invalid weights
        assert!(s
            .mixed_state_potential(&[(a, 0.7), (b, 0.4)], &stack, 5e-6, 10.0)
            .is_err());
        assert!(s
            .mixed_state_potential(&[(a, 1.5), (b, -0.5)], &stack, 5e-6, 10.0)
            .is_err());
    }
}

//! Upper bound on the ε-sufficient majorization dimension of a bounded-energy
//! set: the smallest m for which
//!
//! max_{x ∈ [0, min{1, E/h_{m+2}}]} x·F_{h_m}(E/x) + h(x) ≤ ε·F_h(E),
//!
//! with h_m the sequence left after dropping the first m + 1 levels.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::{max_entropy_f, EnergySequence, MaxEntropy, ShiftedOscillator, WarmStarted};
use crate::optimize::golden_max;
use crate::par::Execution;
use crate::simplex::h2;

/// Hard cap on the linear search.
pub const MAX_DIM: usize = 100_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MajDimOptions {
    /// Start the search at m = 0 instead of m = 1.
    pub include_zero: bool,
    /// Use F_h in place of F_{h_m} (looser, never smaller).
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajDimResult {
    pub m_bound: usize,
    pub eps: f64,
    #[serde(rename = "E")]
    pub e: f64,
    /// The maximized expression at `m_bound`.
    pub lhs_at_m: f64,
    /// ε·F_h(E).
    pub rhs: f64,
}

fn lhs_max<P: MaxEntropy + ?Sized>(profile: &P, e: f64, x_max: f64) -> Result<f64> {
    if x_max <= 0.0 {
        return Ok(0.0);
    }
    let h1 = profile.ground();
    let best = golden_max(
        |x| if x <= 0.0 { Ok(0.0) } else { Ok(x * profile.max_entropy((e / x).max(h1))? + h2(x)) },
        0.0,
        x_max,
        1e-11 * x_max.min(1.0),
    )?;
    Ok(best.value)
}

/// The maximized left-hand side at a given m.
pub fn majdim_lhs(h: &EnergySequence, e: f64, m: usize, fallback: bool) -> Result<f64> {
    let h_m = h.drop_prefix(m + 1);
    let ground = h_m.ground();
    let x_max = if ground > 0.0 { (e / ground).min(1.0) } else { 1.0 };
    let osc = *h == EnergySequence::oscillator();
    match (fallback, osc) {
        (true, true) => lhs_max(&ShiftedOscillator { offset: 0.0 }, e, x_max),
        (true, false) => lhs_max(&WarmStarted::new(h), e, x_max),
        (false, true) => lhs_max(&ShiftedOscillator { offset: (m + 1) as f64 }, e, x_max),
        (false, false) => lhs_max(&WarmStarted::new(&h_m), e, x_max),
    }
}

pub fn sufficient_majorization_dim(h: &EnergySequence, e: f64, eps: f64) -> Result<MajDimResult> {
    sufficient_majorization_dim_with(h, e, eps, MajDimOptions::default())
}

pub fn sufficient_majorization_dim_with(
    h: &EnergySequence,
    e: f64,
    eps: f64,
    opts: MajDimOptions,
) -> Result<MajDimResult> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Input(format!("eps = {eps} must lie in (0, 1]")));
    }
    if !e.is_finite() || e <= h.ground() {
        return Err(Error::Domain(format!("E = {e} must exceed the ground level {}", h.ground())));
    }
    let rhs = eps * max_entropy_f(h, e)?;
    let start = usize::from(!opts.include_zero);
    for m in start..=MAX_DIM {
        let lhs = majdim_lhs(h, e, m, opts.fallback)?;
        if lhs <= rhs {
            return Ok(MajDimResult { m_bound: m, eps, e, lhs_at_m: lhs, rhs });
        }
    }
    Err(Error::Resource(format!("no m ≤ {MAX_DIM} satisfies the criterion at E = {e}, eps = {eps}")))
}

/// m_bound over an ε grid, one independent search per point.
pub fn majdim_sweep(
    h: &EnergySequence,
    e: f64,
    eps_grid: &[f64],
    opts: MajDimOptions,
    exec: Execution,
) -> Result<Vec<MajDimResult>> {
    exec.map(eps_grid, |&eps| sufficient_majorization_dim_with(h, e, eps, opts)).into_iter().collect()
}

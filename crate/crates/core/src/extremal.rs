//! Witness pairs (p, q) that nearly saturate the rank and energy bounds.
//!
//! With m₊ = m + 1, p puts 1/m₊ on its first m entries, (1 − m₊ε)/m₊ on the
//! next one and spreads ε over the tail (uniformly for the rank bound, as ε
//! times a Gibbs state for the energy bound). q is uniform on m₊ entries. The
//! gap H(p) − H(q) then falls short of the bound by exactly Δ(m, ε).

use serde::Serialize;

use crate::bounds::{energy_bound, rank_bound};
use crate::error::{Error, Result};
use crate::gibbs::{gibbs_weights, max_entropy_f, EnergySequence};
use crate::simplex::{h2, partial_majorizes, tv_distance, ProbDist};

const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalPair {
    pub p: ProbDist,
    pub q: ProbDist,
    pub m: usize,
    pub eps: f64,
    /// H(p) − H(q), evaluated on the constructed vectors.
    pub achieved_gap: f64,
    /// Closed-form gap.
    pub predicted_gap: f64,
    pub delta: f64,
    /// Set at ε = 1/(m+1), where the (m+1)-th entry of p vanishes.
    pub support_reduced: bool,
}

impl ExtremalPair {
    pub fn tv(&self) -> f64 {
        tv_distance(&self.p, &self.q)
    }

    pub fn is_admissible(&self) -> bool {
        partial_majorizes(&self.p, &self.q, self.m).holds
    }
}

/// Δ(m, ε) = h(ε) − h((m+1)ε)/(m+1).
pub fn delta_gap(m: usize, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Input(format!("eps = {eps} outside [0, 1]")));
    }
    let mp = (m + 1) as f64;
    if mp * eps > 1.0 + ENDPOINT_TOL {
        return Err(Error::Domain(format!("(m+1)·eps = {} exceeds 1", mp * eps)));
    }
    if m == 0 {
        return Ok(0.0);
    }
    Ok((h2(eps) - h2((mp * eps).min(1.0)) / mp).max(0.0))
}

fn check_pair_eps(m: usize, eps: f64) -> Result<bool> {
    let mp = (m + 1) as f64;
    if !(eps > 0.0) || mp * eps > 1.0 + ENDPOINT_TOL {
        return Err(Error::Domain(format!("eps = {eps} must lie in (0, 1/{}]", m + 1)));
    }
    Ok(mp * eps >= 1.0 - ENDPOINT_TOL)
}

fn assemble(m: usize, eps: f64, tail: impl IntoIterator<Item = f64>, predicted_gap: f64) -> Result<ExtremalPair> {
    let support_reduced = check_pair_eps(m, eps)?;
    let mp = (m + 1) as f64;
    let mut p = vec![1.0 / mp; m];
    p.push(((1.0 - mp * eps) / mp).max(0.0));
    p.extend(tail);
    let mut q = vec![1.0 / mp; m + 1];
    q.resize(p.len(), 0.0);
    let p = ProbDist::new(p)?;
    let q = ProbDist::new(q)?;
    let achieved_gap = p.entropy() - mp.ln();
    Ok(ExtremalPair { p, q, m, eps, achieved_gap, predicted_gap, delta: delta_gap(m, eps)?, support_reduced })
}

/// Rank-bound witness on d entries; gap ε ln(d − m₊) + h(m₊ε)/m₊.
pub fn extremal_pair_rank(d: usize, m: usize, eps: f64) -> Result<ExtremalPair> {
    if m + 1 >= d {
        return Err(Error::Domain(format!("need m + 1 < d, got m = {m}, d = {d}")));
    }
    let mp = m + 1;
    let free = (d - mp) as f64;
    let predicted = eps * free.ln() + h2((mp as f64 * eps).min(1.0)) / mp as f64;
    assemble(m, eps, std::iter::repeat_n(eps / free, d - mp), predicted)
}

/// Energy-bound witness: the tail carries ε·w with w the Gibbs state of
/// `h_tail` at mean E_m/ε, so the tail energy is E_m.
pub fn extremal_pair_energy(h_tail: &EnergySequence, e_m: f64, m: usize, eps: f64) -> Result<ExtremalPair> {
    check_pair_eps(m, eps)?;
    if !(e_m >= 0.0) || !e_m.is_finite() {
        return Err(Error::Input(format!("E_m must be finite and nonnegative, got {e_m}")));
    }
    let target = e_m / eps;
    if target < h_tail.ground() {
        return Err(Error::Domain(format!("E_m/eps = {target} is below the ground level {}", h_tail.ground())));
    }
    let w = gibbs_weights(h_tail, target)?;
    let mp = (m + 1) as f64;
    let predicted = eps * max_entropy_f(h_tail, target)? + h2((mp * eps).min(1.0)) / mp;
    assemble(m, eps, w.weights.iter().map(|x| eps * x), predicted)
}

/// Gibbs state of `h` at mean energy `e`, truncated where the remaining mass
/// and energy are negligible.
pub fn gibbs_distribution(h: &EnergySequence, e: f64) -> Result<ProbDist> {
    ProbDist::new(gibbs_weights(h, e)?.weights)
}

/// bound − achieved gap for the rank witness (should equal Δ).
pub fn rank_margin(pair: &ExtremalPair, d: usize) -> Result<f64> {
    Ok(rank_bound(d, pair.m, pair.eps)?.value - pair.achieved_gap)
}

/// bound − achieved gap for the energy witness (should equal Δ).
pub fn energy_margin(pair: &ExtremalPair, h_tail: &EnergySequence, e_m: f64) -> Result<f64> {
    Ok(energy_bound(h_tail, e_m, pair.eps)?.value - pair.achieved_gap)
}

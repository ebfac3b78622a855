//! Upper bounds on H(p) − H(q) for q m-partially majorized by p and
//! TV(p, q) ≤ ε, under a rank constraint or an expectation constraint, plus the
//! state-dependent refinements that use the actual entries of p.
//!
//! Quantum statements reduce to these through the eigenvalue spectra; the
//! caller passes spectra as [`ProbDist`]s.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::{self, EnergySequence, MaxEntropy, ShiftedOscillator, WarmStarted};
use crate::optimize::{golden_max, grid_refine_max};
use crate::simplex::{h2, ProbDist};

/// Which piece of the bound is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Constraint ε is binding: value ε·F(E/ε) + h(ε) (or ε ln(d−m−1) + h(ε)).
    SmallEps,
    /// ε is past the saturation point; value is the saturated maximum.
    Plateau,
    /// The bound vanishes identically (ε = 0, empty feasible range, or full
    /// majorization).
    DegenerateZero,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::SmallEps => "small_eps",
            Branch::Plateau => "plateau",
            Branch::DegenerateZero => "degenerate_zero",
        }
    }
}

/// Parameters a bound was evaluated with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputsEcho {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    pub m: usize,
    pub eps: f64,
    /// ε actually fed to the formula (ε_m for the state-dependent variants).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_effective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    /// Bound on the entropy difference, in nats.
    pub value: f64,
    pub branch: Branch,
    pub x_star: Option<f64>,
    pub inputs: InputsEcho,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Input(format!("eps = {eps} outside [0, 1]")));
    }
    Ok(())
}

fn check_energy(e: f64) -> Result<()> {
    if !(e >= 0.0) || e.is_infinite() {
        return Err(Error::Input(format!("energy must be finite and nonnegative, got {e}")));
    }
    Ok(())
}

fn rank_value(d: usize, m: usize, eps: f64) -> (f64, Branch, Option<f64>) {
    if m + 1 >= d || eps == 0.0 {
        return (0.0, Branch::DegenerateZero, None);
    }
    let free = (d - m) as f64;
    let threshold = 1.0 - 1.0 / free;
    if eps <= threshold {
        (eps * (free - 1.0).ln() + h2(eps), Branch::SmallEps, Some(eps))
    } else {
        (free.ln(), Branch::Plateau, Some(threshold))
    }
}

/// Rank-constrained bound: ε ln(d−m−1) + h(ε) up to ε = 1 − 1/(d−m), then
/// ln(d−m). Zero once m ≥ d − 1 (ordinary majorization, Schur concavity).
pub fn rank_bound(d: usize, m: usize, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    if d == 0 {
        return Err(Error::Input("rank must be at least 1".into()));
    }
    let (value, branch, x_star) = rank_value(d, m, eps);
    Ok(BoundResult {
        value,
        branch,
        x_star,
        inputs: InputsEcho { kind: "rank", d: Some(d), energy: None, m, eps, eps_effective: None, sequence: None },
    })
}

/// max over x ∈ (0, min{ε, E/h_1}] of x·F(E/x) + h(x) for any max-entropy
/// profile. The objective is concave, so golden-section search applies.
pub fn energy_bound_with<P: MaxEntropy + ?Sized>(profile: &P, e_m: f64, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    check_energy(e_m)?;
    let echo = InputsEcho {
        kind: "energy",
        d: None,
        energy: Some(e_m),
        m: 0,
        eps,
        eps_effective: None,
        sequence: Some(profile.label()),
    };
    let h1 = profile.ground();
    let cap = if h1 > 0.0 { e_m / h1 } else { f64::INFINITY };
    let x_max = eps.min(cap);
    if eps == 0.0 || x_max <= 0.0 {
        return Ok(BoundResult { value: 0.0, branch: Branch::DegenerateZero, x_star: None, inputs: echo });
    }
    let objective = |x: f64| -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(x * profile.max_entropy(e_m / x)? + h2(x))
    };
    let best = golden_max(objective, 0.0, x_max, 1e-10 * x_max.min(1.0))?;
    if best.value <= 0.0 {
        return Ok(BoundResult { value: 0.0, branch: Branch::DegenerateZero, x_star: None, inputs: echo });
    }
    let branch = if best.x == x_max && x_max == eps { Branch::SmallEps } else { Branch::Plateau };
    Ok(BoundResult { value: best.value, branch, x_star: Some(best.x), inputs: echo })
}

/// Expectation-constrained bound for the tail sequence `h_tail` (the levels
/// paired with p_{m+2}, p_{m+3}, ...), in its max-over-x form.
pub fn energy_bound(h_tail: &EnergySequence, e_m: f64, eps: f64) -> Result<BoundResult> {
    energy_bound_with(&WarmStarted::new(h_tail), e_m, eps)
}

/// The same bound through its two-branch closed form: ε·F(E/ε) + h(ε) for
/// ε ≤ a_{h_0}(E), and F_{h_0}(E) beyond.
pub fn energy_bound_closed_form(h_tail: &EnergySequence, e_m: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    check_energy(e_m)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let a = gibbs::a_zero(h_tail, e_m)?;
    if eps <= a {
        let arg = (e_m / eps).max(h_tail.ground());
        Ok(eps * gibbs::max_entropy_f(h_tail, arg)? + h2(eps))
    } else {
        gibbs::max_entropy_f(&h_tail.prepend_zero(), e_m)
    }
}

/// Energy bookkeeping for a spectrum against a full level sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyParams {
    /// Σ h_i λ_i.
    pub e: f64,
    /// Σ_{i ≥ m+2} h_i λ_i, i.e. E minus the energy of the first m+1 levels.
    pub e_m: f64,
    /// `{h_{m+2}, h_{m+3}, ...}`.
    pub h_tail: EnergySequence,
}

/// E, E_m and the dropped tail for a spectrum (sorted into non-increasing
/// order first, which pairs the largest weights with the lowest levels).
pub fn quantum_energy_params(spectrum: &ProbDist, h_full: &EnergySequence, m: usize) -> EnergyParams {
    let p = spectrum.sorted_desc();
    let mut e = 0.0;
    let mut e_m = 0.0;
    for (i, &w) in p.weights().iter().enumerate() {
        let contrib = h_full.level(i) * w;
        e += contrib;
        if i > m {
            e_m += contrib;
        }
    }
    EnergyParams { e, e_m, h_tail: h_full.drop_prefix(m + 1) }
}

/// E_m^x = Σ_j h_j min{t_j, x} over the tail entries t_j = p_{m+1+j}: concave,
/// nondecreasing, piecewise linear with knots at the distinct tail values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEnergy {
    knots_x: Vec<f64>,
    knots_y: Vec<f64>,
    /// Slope on `[knots_x[k], knots_x[k+1])`; the last entry applies beyond
    /// the final knot and is always 0.
    slopes: Vec<f64>,
}

impl TailEnergy {
    pub fn new(tail: &[f64], levels: &EnergySequence) -> Self {
        let mut pairs: Vec<(f64, f64)> = tail
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0.0)
            .map(|(j, &t)| (t, levels.level(j)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total_slope: f64 = pairs.iter().map(|p| p.1).sum();

        let mut knots_x = vec![0.0];
        let mut knots_y = vec![0.0];
        let mut slopes = vec![total_slope];
        // below-knot mass Σ h_j t_j and remaining slope Σ h_j over t_j > x
        let mut settled = 0.0;
        let mut slope = total_slope;
        let mut i = 0;
        while i < pairs.len() {
            let x = pairs[i].0;
            while i < pairs.len() && pairs[i].0 == x {
                settled += pairs[i].1 * pairs[i].0;
                slope -= pairs[i].1;
                i += 1;
            }
            if i == pairs.len() {
                slope = 0.0;
            }
            knots_x.push(x);
            knots_y.push(settled + x * slope);
            slopes.push(slope.max(0.0));
        }
        Self { knots_x, knots_y, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.knots_x.partition_point(|&kx| kx <= x).saturating_sub(1);
        self.knots_y[k] + self.slopes[k] * (x - self.knots_x[k])
    }

    /// Breakpoints (excluding the origin).
    pub fn breakpoints(&self) -> &[f64] {
        &self.knots_x[1..]
    }

    /// Total Σ_j h_j t_j (the value once x exceeds every tail entry).
    pub fn saturated(&self) -> f64 {
        *self.knots_y.last().unwrap_or(&0.0)
    }

    /// Largest x in (0, 1] with E(x)/x ≥ `h1`, found exactly by a segment scan;
    /// 0 when no such x exists (empty tail with h1 > 0).
    pub fn eps_star(&self, h1: f64) -> f64 {
        if h1 <= 0.0 {
            return 1.0;
        }
        if self.knots_x.len() == 1 {
            return 0.0;
        }
        // g(x) = E(x) − h1·x is concave with g(0) = 0
        let g = |x: f64| self.eval(x) - h1 * x;
        if g(1.0) >= 0.0 {
            return 1.0;
        }
        for k in 0..self.knots_x.len() {
            let x0 = self.knots_x[k];
            let x1 = if k + 1 < self.knots_x.len() { self.knots_x[k + 1].min(1.0) } else { 1.0 };
            if g(x1) < 0.0 {
                let g0 = g(x0).max(0.0);
                let drop = h1 - self.slopes[k];
                return if drop > 0.0 { (x0 + g0 / drop).clamp(x0, x1) } else { x0 };
            }
        }
        1.0
    }
}

/// ε_m, the tail-energy function and ε_* for the state-dependent bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDependentParams {
    pub eps: f64,
    /// min{ε, Σ_{i ≥ m+2} min{p_i, ε}}.
    pub eps_m: f64,
    pub e_m_of_x: Option<TailEnergy>,
    /// max{x ∈ (0, 1] : E_m^x / x ≥ h_1}; 1 when no sequence is given.
    pub eps_star: f64,
}

pub fn state_dependent_params(
    p: &ProbDist,
    h_tail: Option<&EnergySequence>,
    m: usize,
    eps: f64,
) -> Result<StateDependentParams> {
    check_eps(eps)?;
    let p = p.sorted_desc();
    let tail: &[f64] = if p.len() > m + 1 { &p.weights()[m + 1..] } else { &[] };
    let eps_m = eps.min(tail.iter().map(|&t| t.min(eps)).sum());
    let (e_m_of_x, eps_star) = match h_tail {
        Some(h) => {
            let te = TailEnergy::new(tail, h);
            let star = te.eps_star(h.ground());
            (Some(te), star)
        }
        None => (None, 1.0),
    };
    Ok(StateDependentParams { eps, eps_m, e_m_of_x, eps_star })
}

/// Rank bound evaluated at ε_m instead of ε.
pub fn rank_bound_sd(p: &ProbDist, m: usize, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    let d = p.support_size();
    if m + 1 >= d {
        return Err(Error::Precondition(format!(
            "m + 1 = {} is not below the support size {d}; the plain Schur bound applies",
            m + 1
        )));
    }
    let params = state_dependent_params(p, None, m, eps)?;
    let (value, branch, x_star) = rank_value(d, m, params.eps_m);
    Ok(BoundResult {
        value,
        branch,
        x_star,
        inputs: InputsEcho {
            kind: "rank_sd",
            d: Some(d),
            energy: None,
            m,
            eps,
            eps_effective: Some(params.eps_m),
            sequence: None,
        },
    })
}

/// Points on the log grid used for the state-dependent maximization.
pub const SD_GRID_POINTS: usize = 4096;
const SD_GRID_FLOOR: f64 = 1e-12;

fn state_dependent_max<F>(params: &StateDependentParams, mut objective: F) -> Result<(f64, Option<f64>, Branch)>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let te = params.e_m_of_x.as_ref().expect("state-dependent energy bound needs a tail sequence");
    let x_max = params.eps_m.min(params.eps_star);
    if x_max <= 0.0 {
        return Ok((0.0, None, Branch::DegenerateZero));
    }
    let f = |x: f64| -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        objective(x, te.eval(x))
    };
    let best = grid_refine_max(f, SD_GRID_FLOOR.min(x_max), x_max, SD_GRID_POINTS)?;
    if best.value <= 0.0 {
        return Ok((0.0, None, Branch::DegenerateZero));
    }
    let branch = if best.x == x_max { Branch::SmallEps } else { Branch::Plateau };
    Ok((best.value, Some(best.x), branch))
}

/// max over x ∈ (0, min{ε_m, ε_*}] of x·F(E_m^x/x) + h(x) for a general
/// max-entropy profile whose levels are `levels`.
pub fn energy_bound_sd_with<P: MaxEntropy + ?Sized>(
    p: &ProbDist,
    levels: &EnergySequence,
    profile: &P,
    m: usize,
    eps: f64,
) -> Result<BoundResult> {
    let params = state_dependent_params(p, Some(levels), m, eps)?;
    let h1 = profile.ground();
    let (value, x_star, branch) =
        state_dependent_max(&params, |x, ex| Ok(x * profile.max_entropy((ex / x).max(h1))? + h2(x)))?;
    Ok(BoundResult {
        value,
        branch,
        x_star,
        inputs: InputsEcho {
            kind: "energy_sd",
            d: None,
            energy: params.e_m_of_x.as_ref().map(TailEnergy::saturated),
            m,
            eps,
            eps_effective: Some(params.eps_m),
            sequence: Some(profile.label()),
        },
    })
}

/// State-dependent expectation bound for a spectrum `p` and the tail sequence
/// paired with p_{m+2}, p_{m+3}, ....
pub fn energy_bound_sd(p: &ProbDist, h_tail: &EnergySequence, m: usize, eps: f64) -> Result<BoundResult> {
    energy_bound_sd_with(p, h_tail, &WarmStarted::new(h_tail), m, eps)
}

/// Oscillator bound: max over x ∈ (0, min{ε, E/(m+1)}] of x·g(E/x − m − 1) + h(x).
/// `use_em` records whether `energy` is E_m or the full mean energy E (which
/// can stand in for E_m and only loosens the bound).
pub fn oscillator_bound(energy: f64, m: usize, eps: f64, use_em: bool) -> Result<BoundResult> {
    let mut r = energy_bound_with(&ShiftedOscillator { offset: (m + 1) as f64 }, energy, eps)?;
    r.inputs.kind = if use_em { "oscillator_em" } else { "oscillator_e" };
    r.inputs.m = m;
    r.inputs.sequence = Some("oscillator".into());
    Ok(r)
}

/// State-dependent oscillator bound. For m = 0 the objective is written as
/// E_0^x·h(x/E_0^x) + h(x); for m ≥ 1 as x·g(E_m^x/x − m − 1) + h(x).
pub fn oscillator_bound_sd(p: &ProbDist, m: usize, eps: f64) -> Result<BoundResult> {
    let levels = EnergySequence::oscillator().drop_prefix(m + 1);
    let params = state_dependent_params(p, Some(&levels), m, eps)?;
    let shift = (m + 1) as f64;
    let (value, x_star, branch) = state_dependent_max(&params, |x, ex| {
        if m == 0 {
            Ok(if ex > 0.0 { gibbs::oscillator_perspective(ex, x.min(ex)) } else { 0.0 } + h2(x))
        } else {
            Ok(x * gibbs::g((ex / x - shift).max(0.0)) + h2(x))
        }
    })?;
    Ok(BoundResult {
        value,
        branch,
        x_star,
        inputs: InputsEcho {
            kind: "oscillator_sd",
            d: None,
            energy: params.e_m_of_x.as_ref().map(TailEnergy::saturated),
            m,
            eps,
            eps_effective: Some(params.eps_m),
            sequence: Some("oscillator".into()),
        },
    })
}

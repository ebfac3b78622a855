//! Maximum-entropy machinery for nondecreasing energy sequences: partition sum,
//! inverse temperature, the max-entropy function F_h(E) and the oscillator
//! closed form g.
//!
//! Sequences are an explicit prefix followed by an arithmetic tail
//! `h_{n0+k} = h_{n0} + s·k`. The tail is summed in closed form, so the only
//! error in Z and the mean is floating-point rounding.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::h2;

/// Nondecreasing nonnegative levels `h_1 ≤ h_2 ≤ ...` with an arithmetic tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct EnergySequence {
    prefix: Vec<f64>,
    step: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    prefix: Vec<f64>,
    step: f64,
}

impl TryFrom<RawSequence> for EnergySequence {
    type Error = Error;
    fn try_from(raw: RawSequence) -> Result<Self> {
        EnergySequence::new(raw.prefix, raw.step)
    }
}

impl From<EnergySequence> for RawSequence {
    fn from(h: EnergySequence) -> Self {
        RawSequence { prefix: h.prefix, step: h.step }
    }
}

impl EnergySequence {
    pub fn new(prefix: Vec<f64>, step: f64) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Input("energy prefix must be nonempty".into()));
        }
        if prefix.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::Input("energy levels must be finite and nonnegative".into()));
        }
        if prefix.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Input("energy prefix must be nondecreasing".into()));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Input(format!("tail step must be positive, got {step}")));
        }
        Ok(Self::canonical(prefix, step))
    }

    // Trailing prefix entries already on the arithmetic tail are dropped, so
    // equal level sequences compare equal.
    fn canonical(mut prefix: Vec<f64>, step: f64) -> Self {
        while prefix.len() > 1 && prefix[prefix.len() - 1] - prefix[prefix.len() - 2] == step {
            prefix.pop();
        }
        Self { prefix, step }
    }

    /// Number operator spectrum {0, 1, 2, ...}.
    pub fn oscillator() -> Self {
        Self { prefix: vec![0.0], step: 1.0 }
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Level `i` (0-based, so `level(0)` is h_1).
    pub fn level(&self, i: usize) -> f64 {
        let n0 = self.prefix.len();
        if i < n0 {
            self.prefix[i]
        } else {
            self.prefix[n0 - 1] + self.step * (i + 1 - n0) as f64
        }
    }

    pub fn levels(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.level(i)).collect()
    }

    pub fn ground(&self) -> f64 {
        self.prefix[0]
    }

    /// Count of levels equal to the ground level.
    pub fn ground_multiplicity(&self) -> usize {
        self.prefix.iter().take_while(|&&h| h == self.prefix[0]).count()
    }

    /// Sequence `{h_{k+1}, h_{k+2}, ...}`.
    pub fn drop_prefix(&self, k: usize) -> Self {
        let n0 = self.prefix.len();
        let prefix = if k < n0 { self.prefix[k..].to_vec() } else { vec![self.level(k)] };
        Self::canonical(prefix, self.step)
    }

    /// Sequence `{0, h_1, h_2, ...}`.
    pub fn prepend_zero(&self) -> Self {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(0.0);
        prefix.extend_from_slice(&self.prefix);
        Self::canonical(prefix, self.step)
    }

    /// Shifted moments Σ a_i^k e^{−β a_i} for k = 0, 1, 2 with a_i = h_i − h_1.
    fn moments(&self, beta: f64) -> Moments {
        let h1 = self.ground();
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &h in &self.prefix {
            let a = h - h1;
            let w = (-beta * a).exp();
            z += w;
            m1 += a * w;
            m2 += a * a * w;
        }
        let a_last = self.prefix[self.prefix.len() - 1] - h1;
        let s = self.step;
        let r = (-beta * s).exp();
        let one_minus_r = -(-beta * s).exp_m1();
        let s0 = r / one_minus_r;
        let s1 = s0 / one_minus_r;
        let s2 = s1 * (1.0 + r) / one_minus_r;
        let e_last = (-beta * a_last).exp();
        z += e_last * s0;
        m1 += e_last * (a_last * s0 + s * s1);
        m2 += e_last * (a_last * a_last * s0 + 2.0 * a_last * s * s1 + s * s * s2);
        Moments { z, m1, m2 }
    }
}

impl fmt::Display for EnergySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::oscillator() {
            return write!(f, "oscillator");
        }
        write!(f, "{{")?;
        for (i, h) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, ";+{}}}", self.step)
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    z: f64,
    m1: f64,
    m2: f64,
}

impl Moments {
    fn mean(&self) -> f64 {
        self.m1 / self.z
    }

    fn variance(&self) -> f64 {
        let mu = self.mean();
        self.m2 / self.z - mu * mu
    }
}

/// Partition sum and mean energy at a fixed inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionSum {
    pub z: f64,
    pub log_z: f64,
    pub mean: f64,
    /// Rounding bound on `z`; the tail is summed exactly.
    pub trunc_error: f64,
}

/// Σ e^{−βh_i} and the Gibbs mean Σ h_i e^{−βh_i} / Z.
pub fn partition_sum(h: &EnergySequence, beta: f64) -> Result<PartitionSum> {
    if !(beta > 0.0) || beta.is_nan() {
        return Err(Error::Input(format!("beta must be positive, got {beta}")));
    }
    let mo = h.moments(beta);
    let log_z = -beta * h.ground() + mo.z.ln();
    let z = log_z.exp();
    Ok(PartitionSum {
        z,
        log_z,
        mean: h.ground() + mo.mean(),
        trunc_error: (h.prefix.len() + 4) as f64 * f64::EPSILON * z,
    })
}

/// Solved Gibbs point at mean constraint `e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibbsPoint {
    pub e: f64,
    /// `f64::INFINITY` at the ground-level boundary.
    pub beta: f64,
    pub z: f64,
    pub log_z: f64,
    /// Maximal entropy F_h(e) in nats.
    pub f: f64,
    pub trunc_error: f64,
}

const MAX_BRACKET_STEPS: usize = 2100;
const MAX_SOLVE_ITERS: usize = 200;

/// Finds β with Σ h_i e^{−βh_i} = E Σ e^{−βh_i}.
///
/// The mean is strictly decreasing in β, running from +∞ (β → 0) down to h_1
/// (β → ∞). The root is bracketed geometrically, then refined by Newton steps
/// that fall back to bisection whenever they leave the bracket.
pub fn solve_beta(h: &EnergySequence, e: f64) -> Result<GibbsPoint> {
    solve_beta_from(h, e, None)
}

/// [`solve_beta`] with an initial guess for β, e.g. the root at a nearby energy.
pub fn solve_beta_from(h: &EnergySequence, e: f64, guess: Option<f64>) -> Result<GibbsPoint> {
    if e.is_nan() || e.is_infinite() {
        return Err(Error::Input(format!("energy must be finite, got {e}")));
    }
    let h1 = h.ground();
    if e < h1 {
        return Err(Error::Domain(format!("energy {e} is below the ground level {h1}")));
    }
    let t = e - h1;
    if t == 0.0 {
        let mult = h.ground_multiplicity() as f64;
        let log_z = if h1 == 0.0 { mult.ln() } else { f64::NEG_INFINITY };
        return Ok(GibbsPoint {
            e,
            beta: f64::INFINITY,
            z: log_z.exp(),
            log_z,
            f: mult.ln(),
            trunc_error: 0.0,
        });
    }

    let excess = |beta: f64| {
        let mo = h.moments(beta);
        (mo.mean() - t, mo)
    };

    // bracket: excess(lo) > 0 > excess(hi)
    let mut beta = guess.filter(|b| b.is_finite() && *b > 0.0).unwrap_or(1.0 / t).clamp(1e-300, 1e300);
    let (mut f_b, mut mo) = excess(beta);
    let (mut lo, mut hi);
    let mut steps = 0;
    if f_b > 0.0 {
        lo = beta;
        hi = beta * 2.0;
        loop {
            let (fh, m) = excess(hi);
            if fh <= 0.0 {
                if -fh < f_b {
                    (beta, f_b, mo) = (hi, fh, m);
                }
                break;
            }
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::Convergence(format!("cannot bracket beta for E = {e}")));
            }
        }
    } else {
        hi = beta;
        lo = beta * 0.5;
        loop {
            let (fl, m) = excess(lo);
            if fl > 0.0 {
                if fl < -f_b {
                    (beta, f_b, mo) = (lo, fl, m);
                }
                break;
            }
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || lo == 0.0 {
                return Err(Error::Convergence(format!("cannot bracket beta for E = {e}")));
            }
        }
    }

    let tol = 1e-14 * t.max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SOLVE_ITERS {
        if f_b.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let var = mo.variance();
        let newton = beta + f_b / var;
        let next = if var > 0.0 && newton > lo && newton < hi {
            newton
        } else if hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if next == beta {
            break;
        }
        beta = next;
        let (fb, m) = excess(beta);
        f_b = fb;
        mo = m;
        if f_b > 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
    }

    if f_b.abs() > 1e-10 * e.max(1.0) {
        return Err(Error::Convergence(format!(
            "mean misses E = {e} by {f_b:e} after {MAX_SOLVE_ITERS} iterations"
        )));
    }
    let log_z = -beta * h1 + mo.z.ln();
    let z = log_z.exp();
    Ok(GibbsPoint {
        e,
        beta,
        z,
        log_z,
        f: beta * t + mo.z.ln(),
        trunc_error: (h.prefix.len() + 4) as f64 * f64::EPSILON * z + beta * f_b.abs(),
    })
}

/// F_h(E) = sup { H(p) : Σ h_i p_i ≤ E } = βE + ln Z.
pub fn max_entropy_f(h: &EnergySequence, e: f64) -> Result<f64> {
    Ok(solve_beta(h, e)?.f)
}

/// g(x) = (x+1) ln(x+1) − x ln x, g(0) = 0.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::Input(format!("g requires a finite x >= 0, got {x}")));
    }
    Ok(g(x))
}

#[inline]
pub(crate) fn g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= 1.0 {
        (x + 1.0) * x.ln_1p() - x * x.ln()
    } else {
        (x + 1.0).ln() + x * (1.0 / x).ln_1p()
    }
}

/// a_{h_0}(E) = 1 − 1/Z_{h_0}(E) where h_0 = {0, h_1, h_2, ...}.
pub fn a_zero(h: &EnergySequence, e: f64) -> Result<f64> {
    if !(e >= 0.0) {
        return Err(Error::Input(format!("energy must be nonnegative, got {e}")));
    }
    let point = solve_beta(&h.prepend_zero(), e)?;
    Ok(1.0 - (-point.log_z).exp())
}

pub fn drop_prefix(h: &EnergySequence, k: usize) -> EnergySequence {
    h.drop_prefix(k)
}

pub fn prepend_zero(h: &EnergySequence) -> EnergySequence {
    h.prepend_zero()
}

/// Materialized Gibbs weights over the first `weights.len()` levels.
#[derive(Debug, Clone)]
pub struct GibbsWeights {
    pub weights: Vec<f64>,
    pub levels: Vec<f64>,
    /// Mass dropped past the last materialized level (before renormalizing).
    pub discarded_mass: f64,
    /// Mean energy carried by the dropped levels.
    pub discarded_energy: f64,
    /// Their exact contribution Σ η(w_i) to the entropy, which is
    /// β·(energy − h_1·mass) + mass·ln Z in shifted units.
    pub discarded_entropy: f64,
}

const TRUNC_TOL: f64 = 1e-12;
const MAX_MATERIALIZED: usize = 50_000_000;

/// w_i = e^{−β h_i}/Z truncated where both the remaining mass and the remaining
/// mean energy fall under 1e-12 (the latter relative to `e`), then renormalized.
pub fn gibbs_weights(h: &EnergySequence, e: f64) -> Result<GibbsWeights> {
    let point = solve_beta(h, e)?;
    let h1 = h.ground();
    if point.beta.is_infinite() {
        let mult = h.ground_multiplicity();
        return Ok(GibbsWeights {
            weights: vec![1.0 / mult as f64; mult],
            levels: vec![h1; mult],
            discarded_mass: 0.0,
            discarded_energy: 0.0,
            discarded_entropy: 0.0,
        });
    }
    let beta = point.beta;
    let z = h.moments(beta).z;
    let s = h.step;
    let r = (-beta * s).exp();
    let one_minus_r = -(-beta * s).exp_m1();
    let s0 = r / one_minus_r;
    let s1 = s0 / one_minus_r;

    let mut weights = Vec::new();
    let mut levels = Vec::new();
    let mut i = 0usize;
    loop {
        let hi = h.level(i);
        let a = hi - h1;
        weights.push((-beta * a).exp() / z);
        levels.push(hi);
        i += 1;
        if i >= h.prefix.len() {
            // everything after level i-1 is the arithmetic tail anchored there
            let head = (-beta * a).exp() / z;
            let mass = head * s0;
            let energy = h1 * mass + head * (a * s0 + s * s1);
            if mass < TRUNC_TOL && energy < TRUNC_TOL * e {
                let total: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= total;
                }
                let discarded_entropy = beta * (energy - h1 * mass) + mass * z.ln();
                return Ok(GibbsWeights {
                    weights,
                    levels,
                    discarded_mass: mass,
                    discarded_energy: energy,
                    discarded_entropy,
                });
            }
        }
        if i > MAX_MATERIALIZED {
            return Err(Error::Resource(format!("Gibbs state at E = {e} needs more than {MAX_MATERIALIZED} levels")));
        }
    }
}

/// Anything that can report the maximal entropy under a mean-energy cap.
pub trait MaxEntropy {
    /// Lowest level; F is defined on `[ground, ∞)`.
    fn ground(&self) -> f64;
    fn max_entropy(&self, e: f64) -> Result<f64>;
    fn label(&self) -> String;
}

impl MaxEntropy for EnergySequence {
    fn ground(&self) -> f64 {
        EnergySequence::ground(self)
    }

    fn max_entropy(&self, e: f64) -> Result<f64> {
        max_entropy_f(self, e.max(EnergySequence::ground(self)))
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// Numerical F_h that seeds each solve with the previous root. Meant for
/// sweeps where consecutive energies are close.
#[derive(Debug)]
pub struct WarmStarted<'a> {
    h: &'a EnergySequence,
    last_beta: std::cell::Cell<Option<f64>>,
}

impl<'a> WarmStarted<'a> {
    pub fn new(h: &'a EnergySequence) -> Self {
        Self { h, last_beta: std::cell::Cell::new(None) }
    }
}

impl MaxEntropy for WarmStarted<'_> {
    fn ground(&self) -> f64 {
        self.h.ground()
    }

    fn max_entropy(&self, e: f64) -> Result<f64> {
        let p = solve_beta_from(self.h, e.max(self.h.ground()), self.last_beta.get())?;
        if p.beta.is_finite() {
            self.last_beta.set(Some(p.beta));
        }
        Ok(p.f)
    }

    fn label(&self) -> String {
        self.h.to_string()
    }
}

/// Oscillator levels shifted up: `{k, k+1, k+2, ...}`, with F(E) = g(E − k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedOscillator {
    pub offset: f64,
}

impl MaxEntropy for ShiftedOscillator {
    fn ground(&self) -> f64 {
        self.offset
    }

    fn max_entropy(&self, e: f64) -> Result<f64> {
        Ok(g((e - self.offset).max(0.0)))
    }

    fn label(&self) -> String {
        format!("oscillator+{}", self.offset)
    }
}

/// Closed-form binary-entropy identity used with the oscillator at m = 0:
/// x·g(E/x − 1) = E·h(x/E) for 0 < x ≤ E.
pub fn oscillator_perspective(e: f64, x: f64) -> f64 {
    e * h2(x / e)
}

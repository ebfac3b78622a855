//! Independent oracles and randomized certification of the bounds.
//!
//! [`brute_force_f`] maximizes entropy over a simplex grid and never touches
//! the Gibbs solver. The fuzzers draw admissible (p, q, m, ε) samples from a
//! per-trial ChaCha stream, so a report depends only on the seed and the trial
//! count, never on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{energy_bound, energy_bound_sd, rank_bound, rank_bound_sd};
use crate::error::{Error, Result};
use crate::gibbs::{self, a_zero, max_entropy_f, EnergySequence};
use crate::par::Execution;
use crate::simplex::{eta, h2, partial_majorizes, tv_distance, vsl_reduce, ProbDist};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    /// Accepted samples (or identity checks) evaluated.
    pub trials: u64,
    /// Candidate samples drawn, rejected ones included.
    pub attempts: u64,
    pub violations: u64,
    /// Smallest bound − gap (or tolerance − error) seen.
    pub worst_margin: f64,
    pub seed: u64,
    /// Description of the first violation, if any.
    pub first_failure: Option<String>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            1.0
        } else {
            self.trials as f64 / self.attempts as f64
        }
    }
}

/// Outcome of one trial: attempts used and every (label, margin) checked.
struct TrialOutcome {
    attempts: u64,
    checks: Vec<(String, f64)>,
}

fn aggregate(outcomes: Vec<TrialOutcome>, seed: u64, slack: f64) -> FuzzReport {
    let mut report = FuzzReport {
        trials: outcomes.len() as u64,
        attempts: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        seed,
        first_failure: None,
    };
    for o in outcomes {
        report.attempts += o.attempts;
        for (label, margin) in o.checks {
            report.worst_margin = report.worst_margin.min(margin);
            if !(margin >= -slack) {
                report.violations += 1;
                report.first_failure.get_or_insert(format!("{label}: margin {margin:e}"));
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// brute-force F

const BRUTE_MAX_LEVELS: usize = 4;
const BRUTE_MAX_K: usize = 400;

fn entropy_of(p: &[f64]) -> f64 {
    p.iter().map(|&x| eta(x)).sum()
}

fn mean_of(levels: &[f64], p: &[f64]) -> f64 {
    levels.iter().zip(p).map(|(h, x)| h * x).sum()
}

fn compositions(n: usize, k: usize, prefix: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if prefix.len() + 1 == n {
        let used: usize = prefix.iter().sum();
        prefix.push(k - used);
        visit(prefix);
        prefix.pop();
        return;
    }
    let used: usize = prefix.iter().sum();
    for c in 0..=k - used {
        prefix.push(c);
        compositions(n, k, prefix, visit);
        prefix.pop();
    }
}

/// Maximum entropy over the grid {c/K : Σc = K} subject to Σ h_i p_i ≤ E,
/// followed by a pattern-search refinement along feasible directions.
pub fn brute_force_f(levels: &[f64], e: f64, grid_k: usize) -> Result<f64> {
    let n = levels.len();
    if n > BRUTE_MAX_LEVELS || grid_k > BRUTE_MAX_K {
        return Err(Error::Resource(format!(
            "brute force limited to {BRUTE_MAX_LEVELS} levels and K ≤ {BRUTE_MAX_K}"
        )));
    }
    if n < 2 || grid_k == 0 {
        return Err(Error::Input("need at least 2 levels and K ≥ 1".into()));
    }
    let lowest = levels.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(e >= lowest) {
        return Err(Error::Domain(format!("E = {e} below the lowest level {lowest}")));
    }
    let tol = 1e-12 * e.abs().max(1.0);
    let kf = grid_k as f64;
    let mut best: Option<(f64, Vec<f64>)> = None;
    compositions(n, grid_k, &mut Vec::with_capacity(n), &mut |c| {
        let p: Vec<f64> = c.iter().map(|&x| x as f64 / kf).collect();
        if mean_of(levels, &p) <= e + tol {
            let h = entropy_of(&p);
            if best.as_ref().is_none_or(|b| h > b.0) {
                best = Some((h, p));
            }
        }
    });
    let (mut h_best, mut p) = best.expect("the lowest level alone is always feasible");

    // moves: δ from i to j, optionally combined with rδ from k to l so that the
    // mean energy is unchanged (slides along the active constraint)
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut d = vec![0.0; n];
            d[i] -= 1.0;
            d[j] += 1.0;
            dirs.push(d.clone());
            let de = levels[j] - levels[i];
            for k in 0..n {
                for l in 0..n {
                    let dl = levels[l] - levels[k];
                    if k == l || dl == 0.0 || de == 0.0 {
                        continue;
                    }
                    let r = -de / dl;
                    if r > 0.0 {
                        let mut d2 = d.clone();
                        d2[k] -= r;
                        d2[l] += r;
                        dirs.push(d2);
                    }
                }
            }
        }
    }
    let mut step = 1.0 / kf;
    while step > 1e-13 {
        let mut improved = false;
        for d in &dirs {
            let cand: Vec<f64> = p.iter().zip(d).map(|(x, dx)| x + step * dx).collect();
            if cand.iter().any(|&x| x < 0.0) || mean_of(levels, &cand) > e + tol {
                continue;
            }
            let h = entropy_of(&cand);
            if h > h_best {
                h_best = h;
                p = cand;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(h_best)
}

// ---------------------------------------------------------------------------
// sampling admissible pairs

/// Fuzzing configuration; defaults match the acceptance run.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_d: usize,
    pub max_m: usize,
    /// Allowed bound − gap shortfall before a check counts as a violation.
    pub slack: f64,
    pub execution: Execution,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self { trials: 10_000, seed: 42, max_d: 12, max_m: 5, slack: 1e-10, execution: Execution::default() }
    }
}

const MAX_ATTEMPTS: u64 = 10_000;

/// Sequences the validity fuzzer rotates through: the oscillator and two
/// custom ones with degenerate and gapped prefixes.
pub fn fuzz_sequences() -> Vec<EnergySequence> {
    vec![
        EnergySequence::oscillator(),
        EnergySequence::new(vec![0.0, 0.5, 0.5, 2.0], 0.7).expect("valid"),
        EnergySequence::new(vec![0.0, 0.0, 1.5], 2.0).expect("valid"),
    ]
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn exp_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect()
}

fn sample_p(rng: &mut ChaCha8Rng, max_d: usize) -> ProbDist {
    let d = rng.gen_range(2..=max_d.max(2));
    let p = ProbDist::from_unnormalized(exp_weights(rng, d)).expect("positive weights");
    p.sorted_desc()
}

/// q near p: mass pushed from lower to higher indices, then mixed with a random
/// distribution. The result still has to pass the majorization filter.
fn sample_q(rng: &mut ChaCha8Rng, p: &ProbDist) -> ProbDist {
    let extra = rng.gen_range(0..=2);
    let n = p.len() + extra;
    let mut q: Vec<f64> = (0..n).map(|i| p.get(i)).collect();
    for _ in 0..rng.gen_range(0..=3) {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        let amount = rng.gen::<f64>() * q[i];
        q[i] -= amount;
        q[j] += amount;
    }
    if rng.gen_bool(0.5) {
        let lambda = rng.gen::<f64>().powi(2);
        let r = exp_weights(rng, n);
        let total: f64 = r.iter().sum();
        for (x, y) in q.iter_mut().zip(r) {
            *x = (1.0 - lambda) * *x + lambda * y / total;
        }
    }
    ProbDist::from_unnormalized(q).expect("nonnegative weights with positive mass")
}

struct Sample {
    p: ProbDist,
    q: ProbDist,
    m: usize,
    eps: f64,
    seq: usize,
}

fn draw_admissible(rng: &mut ChaCha8Rng, cfg: &FuzzConfig, n_seq: usize) -> Option<(Sample, u64)> {
    for attempt in 1..=MAX_ATTEMPTS {
        let p = sample_p(rng, cfg.max_d);
        let m = rng.gen_range(0..=cfg.max_m.min(p.len() - 1));
        let q = sample_q(rng, &p);
        if !partial_majorizes(&p, &q, m).holds {
            continue;
        }
        let tv = tv_distance(&p, &q);
        let eps = if rng.gen_bool(0.75) { tv } else { (tv + rng.gen::<f64>() * (1.0 - tv)).min(1.0) };
        let seq = rng.gen_range(0..n_seq);
        return Some((Sample { p, q, m, eps, seq }, attempt));
    }
    None
}

fn tail_energy(p: &ProbDist, h: &EnergySequence, m: usize) -> f64 {
    p.weights().iter().skip(m + 1).enumerate().map(|(j, &w)| h.level(j) * w).sum()
}

fn check_sample(s: &Sample, h: &EnergySequence) -> Vec<(String, f64)> {
    let gap = s.p.entropy() - s.q.entropy();
    let d = s.p.support_size();
    let tag = |name: &str| format!("{name} (d={d}, m={}, eps={:.6}, seq={h})", s.m, s.eps);
    let mut checks = Vec::with_capacity(4);
    let mut push = |name: &str, r: Result<f64>| match r {
        Ok(v) => checks.push((tag(name), v - gap)),
        Err(e) => checks.push((format!("{}: {e}", tag(name)), f64::NEG_INFINITY)),
    };
    push("rank_bound", rank_bound(d, s.m, s.eps).map(|r| r.value));
    if s.m + 1 < d {
        push("rank_bound_sd", rank_bound_sd(&s.p, s.m, s.eps).map(|r| r.value));
    }
    let e_m = tail_energy(&s.p, h, s.m);
    push("energy_bound", energy_bound(h, e_m, s.eps).map(|r| r.value));
    push("energy_bound_sd", energy_bound_sd(&s.p, h, s.m, s.eps).map(|r| r.value));
    checks
}

/// Draws `cfg.trials` admissible samples and checks H(p) − H(q) against
/// rank_bound, rank_bound_sd, energy_bound and energy_bound_sd.
pub fn fuzz_bound_validity(cfg: &FuzzConfig) -> FuzzReport {
    let seqs = fuzz_sequences();
    let outcomes = cfg.execution.map_range(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, t);
        match draw_admissible(&mut rng, cfg, seqs.len()) {
            Some((s, attempts)) => TrialOutcome { attempts, checks: check_sample(&s, &seqs[s.seq]) },
            None => TrialOutcome {
                attempts: MAX_ATTEMPTS,
                checks: vec![(format!("trial {t}: no admissible sample"), f64::NEG_INFINITY)],
            },
        }
    });
    aggregate(outcomes, cfg.seed, cfg.slack)
}

/// Fuzzes the reduction step: q* ≥ p entrywise on the first m+1 entries,
/// TV(p, q*) ≤ TV(p, q) and H(q*) ≤ H(q), each up to `cfg.slack`.
pub fn fuzz_reduction(cfg: &FuzzConfig) -> FuzzReport {
    let outcomes = cfg.execution.map_range(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, t);
        let Some((s, attempts)) = draw_admissible(&mut rng, cfg, 1) else {
            return TrialOutcome {
                attempts: MAX_ATTEMPTS,
                checks: vec![(format!("trial {t}: no admissible sample"), f64::NEG_INFINITY)],
            };
        };
        let q = s.q.sorted_desc();
        let tag = |name: &str| format!("{name} (d={}, m={})", s.p.len(), s.m);
        let checks = match vsl_reduce(&s.p, &q, s.m) {
            Ok(qs) => {
                let floor = (0..=s.m).map(|i| qs.get(i) - s.p.get(i)).fold(f64::INFINITY, f64::min);
                vec![
                    (tag("floor"), floor),
                    (tag("tv"), tv_distance(&s.p, &q) - tv_distance(&s.p, &qs)),
                    (tag("entropy"), q.entropy() - qs.entropy()),
                ]
            }
            Err(e) => vec![(format!("{}: {e}", tag("vsl_reduce")), f64::NEG_INFINITY)],
        };
        TrialOutcome { attempts, checks }
    });
    aggregate(outcomes, cfg.seed, cfg.slack)
}

// ---------------------------------------------------------------------------
// identities

/// Sequences the identity suite runs over.
pub fn identity_sequences() -> Vec<EnergySequence> {
    let osc = EnergySequence::oscillator();
    let mut seqs = vec![osc.clone(), osc.drop_prefix(1), osc.drop_prefix(2), osc.drop_prefix(3)];
    seqs.extend(fuzz_sequences().into_iter().skip(1));
    seqs
}

pub const IDENTITY_ENERGIES: [f64; 5] = [0.1, 0.3, 1.0, 5.0, 10.0];

/// Checks the perspective identities (max form and reconstruction at
/// a = a_zero), the oscillator g-identity, the dominance chain under prefix
/// dropping, F = ln(multiplicity) at the ground level, and F(E)/E → 0.
pub fn identity_suite() -> FuzzReport {
    let mut checks: Vec<(String, f64)> = Vec::new();
    let mut record = |label: String, tol: f64, r: Result<f64>| match r {
        Ok(err) => checks.push((label, tol - err)),
        Err(e) => checks.push((format!("{label}: {e}"), f64::NEG_INFINITY)),
    };

    for h in identity_sequences() {
        for e in IDENTITY_ENERGIES {
            let f0 = || max_entropy_f(&h.prepend_zero(), e);
            record(format!("max form {h} E={e}"), 1e-6, (|| Ok((energy_bound(&h, e, 1.0)?.value - f0()?).abs()))());
            record(
                format!("maximizer {h} E={e}"),
                1e-6,
                (|| Ok((energy_bound(&h, e, 1.0)?.x_star.unwrap_or(0.0) - a_zero(&h, e)?).abs()))(),
            );
            record(
                format!("reconstruction {h} E={e}"),
                1e-9,
                (|| {
                    let a = a_zero(&h, e)?;
                    let rec = if a > 0.0 { a * max_entropy_f(&h, (e / a).max(h.ground()))? + h2(a) } else { 0.0 };
                    Ok((rec - f0()?).abs())
                })(),
            );
            record(
                format!("chain {h} E={e}"),
                0.0,
                (|| {
                    let (mut prev, mut worst) = (max_entropy_f(&h, e.max(h.ground()))?, f64::NEG_INFINITY);
                    let mut cur = h.clone();
                    for _ in 0..3 {
                        cur = cur.drop_prefix(1);
                        if e < cur.ground() {
                            break;
                        }
                        let next = max_entropy_f(&cur, e)?;
                        worst = worst.max(next - prev - 1e-12);
                        prev = next;
                    }
                    Ok(worst.max(0.0))
                })(),
            );
        }
        record(
            format!("ground level {h}"),
            1e-12,
            max_entropy_f(&h, h.ground()).map(|f| (f - (h.ground_multiplicity() as f64).ln()).abs()),
        );
    }

    for e in IDENTITY_ENERGIES {
        for eps in [0.01, 0.05, 0.1, 0.3, 0.7, 1.0] {
            if eps > e {
                continue;
            }
            let lhs = eps * gibbs::g(e / eps - 1.0);
            let rhs = e * h2(eps / e);
            record(format!("g identity E={e} eps={eps}"), 1e-6, Ok((lhs - rhs).abs()));
        }
        record(
            format!("oscillator F E={e}"),
            1e-9,
            max_entropy_f(&EnergySequence::oscillator(), e).map(|f| (f - gibbs::g(e)).abs()),
        );
    }

    let mut prev_ratio = f64::INFINITY;
    for e in [10.0, 100.0, 1e3, 1e4] {
        let ratio = max_entropy_f(&EnergySequence::oscillator(), e).map(|f| f / e);
        record(format!("o(E) decrease E={e}"), 0.0, ratio.clone().map(|r| (r - prev_ratio).max(0.0)));
        if let Ok(r) = ratio {
            prev_ratio = r;
        }
    }
    record("o(E) at 1e4".into(), 0.01, Ok(prev_ratio));

    aggregate(vec![TrialOutcome { attempts: checks.len() as u64, checks }], 0, 0.0)
}

//! Acceptance criteria. Each test prints one PASS/FAIL line, checks its
//! runtime limit, and holds a shared lock so timings do not overlap.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use entropy_bounds::bounds::{energy_bound_sd, quantum_energy_params};
use entropy_bounds::extremal::{delta_gap, extremal_pair_energy, extremal_pair_rank};
use entropy_bounds::figures::{default_eps_grid, figure};
use entropy_bounds::gibbs::{a_zero, g_function, max_entropy_f, solve_beta, EnergySequence};
use entropy_bounds::verify::{brute_force_f, fuzz_bound_validity, fuzz_reduction, FuzzConfig};
use entropy_bounds::{
    binary_entropy, energy_bound, oscillator_bound, partial_majorizes, rank_bound, rank_bound_sd, Execution,
    ProbDist,
};

static LOCK: Mutex<()> = Mutex::new(());

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    start: Instant,
}

impl Criterion {
    fn start(id: u8, name: &'static str, limit_secs: u64) -> Self {
        Self { id, name, limit: Duration::from_secs(limit_secs), start: Instant::now() }
    }

    /// Prints the verdict line and panics on failure. `failures` lists every
    /// violated check; `detail` summarizes the worst observed error.
    fn finish(self, failures: Vec<String>, detail: String) {
        let elapsed = self.start.elapsed();
        let in_time = elapsed <= self.limit;
        let ok = failures.is_empty() && in_time;
        println!(
            "criterion {} {}: {} ({:.2}s of {}s; {})",
            self.id,
            if ok { "PASS" } else { "FAIL" },
            self.name,
            elapsed.as_secs_f64(),
            self.limit.as_secs(),
            detail
        );
        for f in failures.iter().take(10) {
            println!("    {f}");
        }
        assert!(failures.is_empty(), "criterion {} had {} failing checks", self.id, failures.len());
        assert!(in_time, "criterion {} exceeded {:?}", self.id, self.limit);
    }
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn h(x: f64) -> f64 {
    binary_entropy(x).unwrap()
}

fn custom_a() -> EnergySequence {
    EnergySequence::new(vec![0.0, 0.5, 0.5, 2.0], 0.7).unwrap()
}

fn custom_b() -> EnergySequence {
    EnergySequence::new(vec![0.0, 0.0, 1.5], 2.0).unwrap()
}

#[test]
fn c1_oscillator_closed_forms() {
    let _g = lock();
    let c = Criterion::start(1, "oscillator closed forms", 1);
    let osc = EnergySequence::oscillator();
    let (mut failures, mut worst) = (Vec::new(), 0f64);
    for e in [0.1, 0.3, 1.0, 5.0, 10.0, 100.0] {
        let df = (max_entropy_f(&osc, e).unwrap() - g_function(e).unwrap()).abs();
        let db = (solve_beta(&osc, e).unwrap().beta - ((e + 1.0) / e).ln()).abs();
        worst = worst.max(df).max(db);
        if df > 1e-9 || db > 1e-9 {
            failures.push(format!("E={e}: |F-g|={df:e}, |beta-ln((E+1)/E)|={db:e}"));
        }
    }
    c.finish(failures, format!("max error {worst:.2e}"));
}

#[test]
fn c2_perspective_identities() {
    let _g = lock();
    let c = Criterion::start(2, "perspective identities", 10);
    let osc = EnergySequence::oscillator();
    let seqs = [osc.clone(), osc.drop_prefix(1), osc.drop_prefix(2), custom_a(), custom_b()];
    let (mut failures, mut worst, mut count) = (Vec::new(), 0f64, 0);
    for hs in &seqs {
        for e in [0.3, 1.0, 2.5, 7.0] {
            count += 1;
            let f0 = max_entropy_f(&hs.prepend_zero(), e).unwrap();
            let r = energy_bound(hs, e, 1.0).unwrap();
            let a = a_zero(hs, e).unwrap();
            let rec = a * max_entropy_f(hs, (e / a).max(hs.ground())).unwrap() + h(a);
            let errs = [(r.value - f0).abs(), (r.x_star.unwrap() - a).abs(), (rec - f0).abs()];
            worst = errs.iter().cloned().fold(worst, f64::max);
            if errs.iter().any(|&x| x > 1e-6) {
                failures.push(format!("{hs} E={e}: max form {:e}, maximizer {:e}, reconstruction {:e}", errs[0], errs[1], errs[2]));
            }
        }
    }
    c.finish(failures, format!("{count} combinations, max error {worst:.2e}"));
}

#[test]
fn c3_bound_validity_fuzz() {
    let _g = lock();
    let c = Criterion::start(3, "bound validity fuzz", 60);
    let report = fuzz_bound_validity(&FuzzConfig::default());
    let failures = if report.passed() && report.trials == 10_000 {
        Vec::new()
    } else {
        vec![format!("{report:?}")]
    };
    c.finish(
        failures,
        format!(
            "{} samples, {} violations, worst margin {:.3e}, acceptance rate {:.3}",
            report.trials,
            report.violations,
            report.worst_margin,
            report.acceptance_rate()
        ),
    );
}

#[test]
fn c4_tightness_witnesses() {
    let _g = lock();
    let c = Criterion::start(4, "tightness witnesses", 10);
    let (mut failures, mut worst) = (Vec::new(), 0f64);
    let mut check = |label: String, pair: entropy_bounds::ExtremalPair, bound: f64| {
        let delta = delta_gap(pair.m, pair.eps).unwrap();
        let e_gap = (bound - pair.achieved_gap - delta).abs();
        let e_tv = (pair.tv() - pair.eps).abs();
        worst = worst.max(e_gap);
        if e_gap > 1e-8 || e_tv > 1e-12 || !pair.is_admissible() {
            failures.push(format!("{label}: gap error {e_gap:e}, tv error {e_tv:e}, admissible {}", pair.is_admissible()));
        }
    };

    let mut rank_cases = 0;
    'rank: for d in 3..=12usize {
        for m in 0..(d - 1).min(5) {
            for frac in [0.3, 0.9] {
                if rank_cases == 50 {
                    break 'rank;
                }
                let cap = (1.0 / (m + 1) as f64).min(1.0 - 1.0 / (d - m) as f64);
                let eps = frac * cap;
                let pair = extremal_pair_rank(d, m, eps).unwrap();
                check(format!("rank d={d} m={m} eps={eps}"), pair, rank_bound(d, m, eps).unwrap().value);
                rank_cases += 1;
            }
        }
    }

    let osc = EnergySequence::oscillator();
    let mut energy_cases = 0;
    'energy: for m in 0..5usize {
        let tails = [osc.drop_prefix(m + 1), custom_a(), custom_b().drop_prefix(1)];
        for tail in &tails {
            for e_m in [0.5, 2.0, 6.0] {
                for frac in [0.25, 0.8] {
                    if energy_cases == 50 {
                        break 'energy;
                    }
                    let cap = (1.0 / (m + 1) as f64).min(a_zero(tail, e_m).unwrap()).min(e_m / tail.ground());
                    let eps = frac * cap;
                    let pair = extremal_pair_energy(tail, e_m, m, eps).unwrap();
                    let bound = energy_bound(tail, e_m, eps).unwrap().value;
                    check(format!("energy {tail} m={m} E_m={e_m} eps={eps}"), pair, bound);
                    energy_cases += 1;
                }
            }
        }
    }
    c.finish(failures, format!("{rank_cases} rank + {energy_cases} energy pairs, max |bound - gap - delta| {worst:.2e}"));
}

/// 20 spectra for the monotonicity grid: uniform, geometric and a few mixed
/// shapes on 3 to 12 levels.
fn monotonicity_spectra() -> Vec<ProbDist> {
    let mut out = Vec::new();
    for d in [3usize, 4, 6, 9, 12] {
        out.push(ProbDist::uniform(d));
        for r in [0.3f64, 0.6, 0.85] {
            let w: Vec<f64> = (0..d).map(|i| r.powi(i as i32)).collect();
            out.push(ProbDist::from_unnormalized(w).unwrap());
        }
    }
    out
}

#[test]
fn c5_monotonicity_and_dominance() {
    let _g = lock();
    let c = Criterion::start(5, "monotonicity and dominance", 30);
    const SLACK: f64 = 1e-10;
    let eps_grid: Vec<f64> = (1..=50).map(|k| k as f64 / 50.0).collect();
    let spectra = monotonicity_spectra();
    assert_eq!(spectra.len(), 20);
    let seqs = [EnergySequence::oscillator(), custom_a(), custom_b()];
    let mut failures = Vec::new();
    let mut fail = |cond: bool, msg: String| {
        if !cond {
            failures.push(msg);
        }
    };
    let mut checks = 0u64;

    for (si, p) in spectra.iter().enumerate() {
        let d = p.support_size();
        let h_full = &seqs[si % seqs.len()];
        let max_m = (d - 2).min(3);
        // values[m][k] for rank, rank_sd, energy, energy_sd, energy-with-E
        let mut rank = vec![vec![0.0; eps_grid.len()]; max_m + 1];
        let mut energy = rank.clone();
        for m in 0..=max_m {
            let params = quantum_energy_params(p, h_full, m);
            for (k, &eps) in eps_grid.iter().enumerate() {
                let r = rank_bound(d, m, eps).unwrap().value;
                let r_sd = rank_bound_sd(p, m, eps).unwrap().value;
                let en = energy_bound(&params.h_tail, params.e_m, eps).unwrap().value;
                let en_sd = energy_bound_sd(p, &params.h_tail, m, eps).unwrap().value;
                let en_e = energy_bound(&params.h_tail, params.e, eps).unwrap().value;
                let en_bump = energy_bound(&params.h_tail, params.e_m * 1.1 + 0.01, eps).unwrap().value;
                let osc_params = quantum_energy_params(p, &seqs[0], m);
                let osc_e = oscillator_bound(osc_params.e, m, eps, false).unwrap().value;
                let osc_em = oscillator_bound(osc_params.e_m, m, eps, true).unwrap().value;
                fail(r_sd <= r + SLACK, format!("rank_sd > rank: spectrum {si} m={m} eps={eps}"));
                fail(en_sd <= en + SLACK, format!("energy_sd > energy: spectrum {si} m={m} eps={eps} ({en_sd} vs {en})"));
                fail(en_e >= en - SLACK, format!("E-for-E_m smaller: spectrum {si} m={m} eps={eps}"));
                fail(osc_e >= osc_em - SLACK, format!("oscillator E-for-E_m smaller: spectrum {si} m={m} eps={eps}"));
                fail(en_bump >= en - SLACK, format!("energy decreasing in E_m: spectrum {si} m={m} eps={eps}"));
                checks += 5;
                if k > 0 {
                    fail(r >= rank[m][k - 1] - SLACK, format!("rank decreasing in eps: d={d} m={m} eps={eps}"));
                    fail(en >= energy[m][k - 1] - SLACK, format!("energy decreasing in eps: spectrum {si} m={m} eps={eps}"));
                    checks += 2;
                }
                if m > 0 {
                    fail(r <= rank[m - 1][k] + SLACK, format!("rank increasing in m: d={d} m={m} eps={eps}"));
                    fail(en <= energy[m - 1][k] + SLACK, format!("energy increasing in m: spectrum {si} m={m} eps={eps}"));
                    checks += 2;
                }
                rank[m][k] = r;
                energy[m][k] = en;
            }
        }
        let mut prev_sd = 0.0;
        for &eps in &eps_grid {
            let sd = energy_bound_sd(p, &h_full.drop_prefix(1), 0, eps).unwrap().value;
            fail(sd >= prev_sd - SLACK, format!("energy_sd decreasing in eps: spectrum {si} eps={eps}"));
            prev_sd = sd;
            checks += 1;
        }
    }
    let n = failures.len();
    c.finish(failures, format!("{checks} checks on 20 spectra x 50 eps, {n} failing"));
}

#[test]
fn c6_oracle_equivalence() {
    let _g = lock();
    let c = Criterion::start(6, "brute-force oracle equivalence", 30);
    let (mut failures, mut worst) = (Vec::new(), 0f64);
    let level_sets = [
        [0.0, 1.0, 2.0],
        [0.0, 0.3, 1.7],
        [0.2, 0.9, 1.0],
        [0.0, 0.0, 1.0],
        [0.5, 1.5, 4.0],
        [0.1, 0.4, 0.7],
    ];
    for levels in level_sets {
        let h = EnergySequence::new(levels.to_vec(), 1e3).unwrap();
        let mean = levels.iter().sum::<f64>() / 3.0;
        for frac in [0.15, 0.3, 0.45, 0.6, 0.7] {
            let e = levels[0] + frac * (mean - levels[0]);
            let brute = brute_force_f(&levels, e, 200).unwrap();
            let gibbs = max_entropy_f(&h, e).unwrap();
            let err = (brute - gibbs).abs();
            worst = worst.max(err);
            if err > 2e-3 {
                failures.push(format!("levels {levels:?} E={e}: brute {brute} vs Gibbs {gibbs}"));
            }
        }
    }
    c.finish(failures, format!("30 cases, max |brute - F| {worst:.2e}"));
}

#[test]
fn c7_m0_regression() {
    let _g = lock();
    let c = Criterion::start(7, "m = 0 regression to the optimal bounds", 1);
    let (mut failures, mut worst) = (Vec::new(), 0f64);
    for e in [0.05, 0.2, 0.5, 1.0, 2.0, 3.5, 5.0, 10.0, 30.0, 100.0] {
        for k in 1..=10 {
            let eps = k as f64 / 10.0 * 0.999;
            let expected = if eps <= e / (e + 1.0) {
                eps * g_function(e / eps - 1.0).unwrap() + h(eps)
            } else {
                g_function(e).unwrap()
            };
            let got = oscillator_bound(e, 0, eps, false).unwrap().value;
            let err = (got - expected).abs();
            worst = worst.max(err);
            if err > 1e-9 {
                failures.push(format!("E={e} eps={eps}: {got} vs {expected}"));
            }
        }
    }
    c.finish(failures, format!("100 pairs, max error {worst:.2e}"));
}

fn nonincreasing(xs: &[f64], slack: f64) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] + slack)
}

#[test]
fn c8_figure_shapes() {
    let _g = lock();
    let c = Criterion::start(8, "figure shapes", 120);
    let mut grid = default_eps_grid();
    grid.push(0.01);
    grid.sort_by(f64::total_cmp);
    let exec = Execution::default();
    let mut failures = Vec::new();
    let at = |rows: &[Vec<f64>], eps: f64| rows.iter().find(|r| r[0] == eps).cloned().unwrap();

    for id in [1u8, 2] {
        let t = figure(id, &grid, exec).unwrap();
        for row in &t.rows {
            if !nonincreasing(&row[1..], 1e-10) {
                failures.push(format!("figure {id}: columns increase in m at eps={}", row[0]));
            }
        }
    }
    let t3 = figure(3, &grid, exec).unwrap();
    for k in 1..=3 {
        let col: Vec<f64> = t3.rows.iter().map(|r| r[k]).collect();
        if !nonincreasing(&col, 0.0) {
            failures.push(format!("figure 3: column {} increases in eps", t3.columns[k]));
        }
    }
    let t4 = figure(4, &grid, exec).unwrap();
    for row in &t4.rows {
        if row[2] > row[1] + 1e-10 {
            failures.push(format!("figure 4: state-dependent above plain at eps={}", row[0]));
        }
    }
    let mut improvement = Vec::new();
    for id in [5u8, 6] {
        let t = figure(id, &grid, exec).unwrap();
        for row in &t.rows {
            if row[3] > row[1] + 1e-10 || row[4] > row[2] + 1e-10 {
                failures.push(format!("figure {id}: state-dependent above plain at eps={}", row[0]));
            }
        }
        let r = at(&t.rows, 0.01);
        if r[4] >= r[2] || r[4].is_nan() {
            failures.push(format!("figure {id}: no strict improvement at eps=0.01 ({} vs {})", r[4], r[2]));
        }
        improvement.push(format!("fig{id} eps=0.01: {:.4} < {:.4}", r[4], r[2]));
    }
    c.finish(failures, improvement.join(", "));
}

#[test]
fn c9_reduction_guarantees() {
    let _g = lock();
    let c = Criterion::start(9, "reduction lemma guarantees", 30);
    let report = fuzz_reduction(&FuzzConfig { slack: 1e-12, ..FuzzConfig::default() });
    let failures = if report.passed() && report.trials == 10_000 {
        Vec::new()
    } else {
        vec![format!("{report:?}")]
    };
    c.finish(
        failures,
        format!("{} inputs, {} violations, worst margin {:.3e}", report.trials, report.violations, report.worst_margin),
    );
}

#[test]
fn partial_majorization_of_witness_is_not_full() {
    // the rank witness is generally not fully majorized: H(p) > H(q)
    let pair = extremal_pair_rank(6, 1, 0.2).unwrap();
    assert!(partial_majorizes(&pair.p, &pair.q, 1).holds);
    assert!(pair.achieved_gap > 0.0);
}

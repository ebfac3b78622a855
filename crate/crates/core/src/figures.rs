//! Data behind the six figures: bound curves over an ε grid for Gibbs states
//! of the oscillator and for the uniform states π_d on the first d Fock levels.

use crate::bounds::{oscillator_bound, oscillator_bound_sd, quantum_energy_params, rank_bound, rank_bound_sd};
use crate::error::{Error, Result};
use crate::extremal::gibbs_distribution;
use crate::gibbs::EnergySequence;
use crate::majdim::{majdim_sweep, MajDimOptions};
use crate::par::Execution;
use crate::report::Table;
use crate::simplex::ProbDist;

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else if i == 0 {
                lo
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default ε grid: 200 log-spaced points on [1e-4, 1].
pub fn default_eps_grid() -> Vec<f64> {
    log_grid(1e-4, 1.0, 200)
}

/// ε grid for the majorization-dimension figure: 2^-10 ... 1 in quarter
/// steps of the binary exponent.
pub fn majdim_eps_grid() -> Vec<f64> {
    (0..=40).map(|k| 2f64.powf(-10.0 + 0.25 * k as f64)).collect()
}

pub const FIGURE_IDS: [u8; 6] = [1, 2, 3, 4, 5, 6];

fn pi_d(d: usize) -> ProbDist {
    ProbDist::uniform(d)
}

fn gibbs_oscillator(e: f64) -> Result<ProbDist> {
    gibbs_distribution(&EnergySequence::oscillator(), e)
}

fn sweep(grid: &[f64], columns: Vec<String>, exec: Execution, row: impl Fn(f64) -> Result<Vec<f64>> + Sync + Send) -> Result<Table> {
    let mut table = Table::new(columns);
    for (eps, values) in grid.iter().zip(exec.map(grid, |&eps| row(eps))) {
        let mut r = vec![*eps];
        r.extend(values?);
        table.rows.push(r);
    }
    Ok(table)
}

/// Bound columns for m = 0..5 at the Gibbs state of mean energy `e`.
fn m_family(e: f64, grid: &[f64], exec: Execution) -> Result<Table> {
    let rho = gibbs_oscillator(e)?;
    let osc = EnergySequence::oscillator();
    let e_ms: Vec<f64> = (0..=5).map(|m| quantum_energy_params(&rho, &osc, m).e_m).collect();
    let mut cols = vec!["eps".to_string()];
    cols.extend((0..=5).map(|m| format!("m{m}")));
    sweep(grid, cols, exec, |eps| {
        e_ms.iter().enumerate().map(|(m, &e_m)| Ok(oscillator_bound(e_m, m, eps, true)?.value)).collect()
    })
}

/// Plain and state-dependent bounds for a state of finite rank d with m fixed:
/// rank, oscillator, rank (state-dependent), oscillator (state-dependent).
fn finite_rank_family(d: usize, m: usize, grid: &[f64], exec: Execution) -> Result<Table> {
    let rho = pi_d(d);
    let e_m = quantum_energy_params(&rho, &EnergySequence::oscillator(), m).e_m;
    let cols = ["eps", "rank", "oscillator", "rank_sd", "oscillator_sd"].map(String::from).to_vec();
    sweep(grid, cols, exec, |eps| {
        Ok(vec![
            rank_bound(d, m, eps)?.value,
            oscillator_bound(e_m, m, eps, true)?.value,
            rank_bound_sd(&rho, m, eps)?.value,
            oscillator_bound_sd(&rho, m, eps)?.value,
        ])
    })
}

/// CSV table for figure `id` over `grid` (the majorization-dimension figure
/// ignores `grid` and uses [`majdim_eps_grid`]).
pub fn figure(id: u8, grid: &[f64], exec: Execution) -> Result<Table> {
    match id {
        1 => m_family(1.0, grid, exec),
        2 => m_family(5.0, grid, exec),
        3 => {
            let osc = EnergySequence::oscillator();
            let eps = majdim_eps_grid();
            let energies = [0.1, 1.0, 10.0];
            let mut table = Table::new(vec!["eps".into(), "E0.1".into(), "E1".into(), "E10".into()]);
            let cols: Vec<Vec<f64>> = energies
                .iter()
                .map(|&e| {
                    majdim_sweep(&osc, e, &eps, MajDimOptions::default(), exec)
                        .map(|rs| rs.iter().map(|r| r.m_bound as f64).collect())
                })
                .collect::<Result<_>>()?;
            for (i, &x) in eps.iter().enumerate() {
                table.rows.push(vec![x, cols[0][i], cols[1][i], cols[2][i]]);
            }
            Ok(table)
        }
        4 => {
            let rho = gibbs_oscillator(0.3)?;
            let e = quantum_energy_params(&rho, &EnergySequence::oscillator(), 0).e;
            let cols = ["eps", "oscillator", "oscillator_sd"].map(String::from).to_vec();
            sweep(grid, cols, exec, |eps| {
                Ok(vec![oscillator_bound(e, 0, eps, true)?.value, oscillator_bound_sd(&rho, 0, eps)?.value])
            })
        }
        5 => finite_rank_family(2, 0, grid, exec),
        6 => finite_rank_family(5, 3, grid, exec),
        _ => Err(Error::Input(format!("no figure {id}; valid ids are 1 to 6"))),
    }
}

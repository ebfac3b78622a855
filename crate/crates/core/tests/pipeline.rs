//! End-to-end checks through the public API: figures, majorization-dimension
//! sweeps and the feature-independent execution helper.

use entropy_bounds::figures::{figure, log_grid, FIGURE_IDS};
use entropy_bounds::gibbs::EnergySequence;
use entropy_bounds::io::{parse_sequence, parse_spectrum};
use entropy_bounds::majdim::{majdim_sweep, MajDimOptions};
use entropy_bounds::{oscillator_bound_sd, rank_bound_sd, Execution};

#[test]
fn figures_identical_across_execution_modes() {
    let grid = log_grid(1e-3, 1.0, 12);
    for id in FIGURE_IDS {
        let a = figure(id, &grid, Execution::Sequential).unwrap();
        let b = figure(id, &grid, Execution::Parallel).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "figure {id}");
    }
}

#[test]
fn figure_headers_are_stable() {
    let grid = [0.1];
    let header = |id| figure(id, &grid, Execution::Sequential).unwrap().columns.join(",");
    assert_eq!(header(1), "eps,m0,m1,m2,m3,m4,m5");
    assert_eq!(header(3), "eps,E0.1,E1,E10");
    assert_eq!(header(4), "eps,oscillator,oscillator_sd");
    assert_eq!(header(6), "eps,rank,oscillator,rank_sd,oscillator_sd");
}

#[test]
fn majdim_sweep_is_monotone_and_minimal() {
    let osc = EnergySequence::oscillator();
    let grid = log_grid(1e-2, 1.0, 15);
    let rs = majdim_sweep(&osc, 1.0, &grid, MajDimOptions::default(), Execution::default()).unwrap();
    assert!(rs.windows(2).all(|w| w[1].m_bound <= w[0].m_bound));
    assert!(rs.iter().all(|r| r.lhs_at_m <= r.rhs));
    assert_eq!(rs.last().unwrap().m_bound, 1);
}

#[test]
fn parsed_inputs_feed_the_bounds() {
    let p = parse_spectrum("0.4\n0.3\n0.2\n0.1\n").unwrap();
    assert_eq!(parse_sequence("\"oscillator\"").unwrap(), EnergySequence::oscillator());
    let r = rank_bound_sd(&p, 1, 0.1).unwrap();
    let o = oscillator_bound_sd(&p, 1, 0.1).unwrap();
    assert!(r.value > 0.0 && o.value > 0.0);
}

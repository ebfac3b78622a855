//! One-dimensional maximizers for the bound objectives x ↦ x·F(E/x) + h(x).

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of a concave `f` on `[lo, hi]`.
///
/// The bracket shrinks until its width is below `x_tol`. Both endpoints are
/// evaluated as well, so a maximum sitting on the boundary is reported exactly.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best = Maximum { x: hi, value: f(hi)? };
    let f_lo = f(lo)?;
    if f_lo > best.value {
        best = Maximum { x: lo, value: f_lo };
    }
    if hi - lo <= x_tol {
        return Ok(best);
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.value {
            best = Maximum { x, value: v };
        }
    }
    Ok(best)
}

/// Maximum of a possibly multimodal `f` on `(x_min, x_max]`: evaluates a
/// log-spaced grid, then runs a ternary search between the neighbours of every
/// grid-local maximum.
pub fn grid_refine_max<F>(mut f: F, x_min: f64, x_max: f64, points: usize) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if x_max <= x_min || points < 2 {
        return Ok(Maximum { x: x_max, value: f(x_max)? });
    }
    let ratio = (x_max / x_min).ln() / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { x_max } else { x_min * (ratio * i as f64).exp() })
        .collect();
    let mut vals = Vec::with_capacity(points);
    for &x in &xs {
        vals.push(f(x)?);
    }
    let mut best = Maximum { x: xs[0], value: vals[0] };
    for i in 0..points {
        let left = if i == 0 { f64::NEG_INFINITY } else { vals[i - 1] };
        let right = if i + 1 == points { f64::NEG_INFINITY } else { vals[i + 1] };
        if vals[i] >= left && vals[i] >= right {
            if vals[i] > best.value {
                best = Maximum { x: xs[i], value: vals[i] };
            }
            let a = if i == 0 { xs[0] } else { xs[i - 1] };
            let b = if i + 1 == points { xs[i] } else { xs[i + 1] };
            let local = ternary_max(&mut f, a, b)?;
            if local.value > best.value {
                best = local;
            }
        }
    }
    Ok(best)
}

fn ternary_max<F>(f: &mut F, mut a: f64, mut b: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let tol = 1e-13 * b.abs().max(f64::MIN_POSITIVE);
    let mut best = Maximum { x: a, value: f64::NEG_INFINITY };
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        let (f1, f2) = (f(m1)?, f(m2)?);
        if f1 > best.value {
            best = Maximum { x: m1, value: f1 };
        }
        if f2 > best.value {
            best = Maximum { x: m2, value: f2 };
        }
        if f1 < f2 {
            a = m1;
        } else {
            b = m2;
        }
    }
    Ok(best)
}

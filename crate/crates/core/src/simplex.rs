//! Finite probability distributions and the majorization machinery the bounds
//! are built on: Shannon entropy, total variation, partial majorization and the
//! reduction that lifts the head of a majorized distribution onto the head of
//! the majorizing one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of an input distribution.
pub const SUM_TOL: f64 = 1e-12;
/// Prefix gaps above `-MAJ_TOL` count as satisfied.
pub const MAJ_TOL: f64 = 1e-14;
/// Entries below this are stored as exact zeros.
pub const CLAMP_FLOOR: f64 = 1e-300;

/// A probability vector over `{1, ..., n}` in its original order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbDist {
    weights: Vec<f64>,
}

impl ProbDist {
    /// Validates and wraps `weights`. Entries must be finite and nonnegative
    /// and sum to one within [`SUM_TOL`].
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("empty distribution".into()));
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::Input(format!("entry {i} = {w} is not a probability")));
            }
            if *w < CLAMP_FLOOR {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Input(format!("entries sum to {sum}, expected 1")));
        }
        Ok(Self { weights })
    }

    /// Normalizes nonnegative weights to unit mass.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Input("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::Input("weights have zero total mass".into()));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    /// Point mass on the first of `len` outcomes.
    pub fn deterministic(len: usize) -> Self {
        let mut weights = vec![0.0; len.max(1)];
        weights[0] = 1.0;
        Self { weights }
    }

    pub fn uniform(len: usize) -> Self {
        let len = len.max(1);
        Self { weights: vec![1.0 / len as f64; len] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Entry `i` (0-based), with implicit zero padding past the end.
    pub fn get(&self, i: usize) -> f64 {
        self.weights.get(i).copied().unwrap_or(0.0)
    }

    /// Number of strictly positive entries.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn entropy(&self) -> f64 {
        self.weights.iter().map(|&w| eta(w)).sum()
    }

    pub fn is_sorted_desc(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] >= w[1])
    }

    /// Non-increasing rearrangement. Ties keep their original relative order.
    pub fn sorted_desc(&self) -> Self {
        let mut weights = self.weights.clone();
        // sort_by is stable
        weights.sort_by(|a, b| b.total_cmp(a));
        Self { weights }
    }

    /// Drops trailing zeros (keeps at least one entry).
    pub fn trimmed(&self) -> Self {
        let last = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        Self { weights: self.weights[..=last].to_vec() }
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

impl TryFrom<Vec<f64>> for ProbDist {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbDist::new(v)
    }
}

impl From<ProbDist> for Vec<f64> {
    fn from(p: ProbDist) -> Self {
        p.weights
    }
}

/// η(x) = −x ln x with η(0) = 0.
#[inline]
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Shannon entropy in nats.
pub fn shannon_entropy(p: &ProbDist) -> f64 {
    p.entropy()
}

/// Binary entropy h(x) = η(x) + η(1 − x).
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Input(format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(h2(x))
}

/// Unchecked binary entropy for internal hot loops; clamps to `[0, 1]`.
#[inline]
pub(crate) fn h2(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    eta(x) + eta(1.0 - x)
}

/// ½ Σ |p_i − q_i| with the shorter vector zero-padded.
pub fn tv_distance(p: &ProbDist, q: &ProbDist) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n).map(|i| (p.get(i) - q.get(i)).abs()).sum::<f64>()
}

pub fn sort_desc(p: &ProbDist) -> ProbDist {
    p.sorted_desc()
}

/// Outcome of an m-partial majorization test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub m_requested: usize,
    pub holds: bool,
    /// Smallest failing prefix length `r` (1-based).
    pub first_violation: Option<usize>,
    /// Σ_{i≤r}(p↓_i − q↓_i) for r = 1, 2, ...; truncated once both vectors are
    /// exhausted since the gap is constant from there on.
    pub prefix_gaps: Vec<f64>,
}

/// Tests whether `p` m-partially majorizes `q`: every prefix sum of `p↓` up to
/// length `m` dominates the matching prefix sum of `q↓`. Always true for `m = 0`.
pub fn partial_majorizes(p: &ProbDist, q: &ProbDist, m: usize) -> MajorizationReport {
    let ps = p.sorted_desc();
    let qs = q.sorted_desc();
    let upto = m.min(ps.len().max(qs.len()));
    let mut prefix_gaps = Vec::with_capacity(upto);
    let (mut sp, mut sq) = (0.0, 0.0);
    let mut first_violation = None;
    for r in 0..upto {
        sp += ps.get(r);
        sq += qs.get(r);
        let gap = sp - sq;
        if gap < -MAJ_TOL && first_violation.is_none() {
            first_violation = Some(r + 1);
        }
        prefix_gaps.push(gap);
    }
    MajorizationReport { m_requested: m, holds: first_violation.is_none(), first_violation, prefix_gaps }
}

/// Builds `q*` from sorted `p` and `q` such that `q*_i ≥ p_i` for `i ≤ m + 1`,
/// `TV(p, q*) ≤ TV(p, q)` and `H(q*) ≤ H(q)`.
///
/// For `m = 0` there is no hypothesis. For `m ≥ 1` the prefix sums of `q` must
/// not exceed those of `p` up to length `m`.
pub fn vsl_reduce(p: &ProbDist, q: &ProbDist, m: usize) -> Result<ProbDist> {
    if !p.is_sorted_desc() || !q.is_sorted_desc() {
        return Err(Error::Precondition("vsl_reduce expects non-increasing inputs".into()));
    }
    let n = p.len().max(q.len()).max(m + 1);
    let pv: Vec<f64> = (0..n).map(|i| p.get(i)).collect();
    let qv: Vec<f64> = (0..n).map(|i| q.get(i)).collect();

    if m == 0 {
        if qv[0] >= pv[0] {
            return Ok(ProbDist { weights: qv });
        }
        let c = (1.0 - pv[0]) / (1.0 - qv[0]);
        let mut out: Vec<f64> = qv.iter().map(|&x| c * x).collect();
        out[0] = pv[0];
        return finish_reduction(out);
    }

    let mut d = 0.0;
    for r in 0..m {
        d += pv[r] - qv[r];
        if d < -MAJ_TOL {
            return Err(Error::Precondition(format!(
                "prefix sum of q exceeds that of p at r = {}",
                r + 1
            )));
        }
    }
    let d_m = d.max(0.0);
    let mut out = vec![0.0; n];
    out[..m].copy_from_slice(&pv[..m]);
    let tail_mass: f64 = qv[m + 1..].iter().sum();
    if d_m >= qv[m] - pv[m] {
        out[m] = pv[m];
        let d_next = (d_m + pv[m] - qv[m]).max(0.0);
        let c = if tail_mass > 0.0 { (1.0 - d_next / tail_mass).max(0.0) } else { 1.0 };
        for i in m + 1..n {
            out[i] = c * qv[i];
        }
    } else {
        out[m] = qv[m] - d_m;
        out[m + 1..].copy_from_slice(&qv[m + 1..]);
    }
    finish_reduction(out)
}

fn finish_reduction(out: Vec<f64>) -> Result<ProbDist> {
    let sum: f64 = out.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::Convergence(format!("reduced distribution has mass {sum}")));
    }
    ProbDist::new(out)
}

/// Both sides of H(x) ≤ H(y) + ε·H(ε⁻¹[x − y]₊) + h(ε) with ε = TV(x, y).
pub fn perturbation_gap(x: &ProbDist, y: &ProbDist) -> Result<(f64, f64)> {
    let eps = tv_distance(x, y);
    if eps <= 0.0 {
        return Err(Error::Degenerate("distributions coincide (TV = 0)".into()));
    }
    let n = x.len().max(y.len());
    let pos: Vec<f64> = (0..n).map(|i| (x.get(i) - y.get(i)).max(0.0)).collect();
    let excess = ProbDist::from_unnormalized(pos)?;
    let lhs = x.entropy();
    let rhs = y.entropy() + eps * excess.entropy() + h2(eps);
    Ok((lhs, rhs))
}

/// Entropy of a mixture Σ λ_k p_k laid out over concatenated (hence disjoint)
/// supports.
pub fn disjoint_mixture(parts: &[(f64, &ProbDist)]) -> Result<ProbDist> {
    let mut weights = Vec::new();
    for (lambda, p) in parts {
        weights.extend(p.weights().iter().map(|w| lambda * w));
    }
    ProbDist::new(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pd(v: &[f64]) -> ProbDist {
        ProbDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&pd(&[1.0, 0.0])), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&pd(&[0.5, 0.5])), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_entropy(&pd(&[0.5, 0.25, 0.25])), 1.039_720_770_839_918, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(matches!(ProbDist::new(vec![0.5, 0.6]), Err(Error::Input(_))));
        assert!(matches!(ProbDist::new(vec![1.1, -0.1]), Err(Error::Input(_))));
        assert!(matches!(ProbDist::new(vec![]), Err(Error::Input(_))));
        assert!(ProbDist::new(vec![0.5, 0.5 + 5e-13]).is_ok());
    }

    #[test]
    fn tiny_entries_clamped() {
        let p = pd(&[1.0, 1e-310]);
        assert_eq!(p.support_size(), 1);
        assert_eq!(p.weights()[1], 0.0);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(binary_entropy(0.2).unwrap(), 0.500_402_423_538_188, epsilon = 1e-14);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn tv_examples() {
        let p = pd(&[0.3, 0.7]);
        assert_eq!(tv_distance(&p, &p), 0.0);
        assert_eq!(tv_distance(&pd(&[1.0, 0.0]), &pd(&[0.0, 1.0])), 1.0);
        assert_abs_diff_eq!(tv_distance(&pd(&[0.5, 0.5]), &pd(&[1.0])), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sort_examples() {
        assert_eq!(sort_desc(&pd(&[0.2, 0.5, 0.3])).weights(), &[0.5, 0.3, 0.2]);
        let s = pd(&[0.5, 0.3, 0.2]);
        assert_eq!(sort_desc(&s), s);
        assert_eq!(sort_desc(&pd(&[0.25, 0.25, 0.5])).weights(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn majorization_examples() {
        let p = pd(&[0.4, 0.35, 0.25]);
        let q = pd(&[0.45, 0.3, 0.25]);
        assert!(partial_majorizes(&p, &q, 0).holds);

        let r = partial_majorizes(&pd(&[0.5, 0.3, 0.2]), &pd(&[0.4, 0.4, 0.2]), 2);
        assert!(r.holds);
        assert_abs_diff_eq!(r.prefix_gaps[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(r.prefix_gaps[1], 0.0, epsilon = 1e-15);

        let r = partial_majorizes(&p, &q, 1);
        assert!(!r.holds);
        assert_eq!(r.first_violation, Some(1));
    }

    #[test]
    fn reduction_examples() {
        let q = vsl_reduce(&pd(&[0.6, 0.4]), &pd(&[0.5, 0.5]), 0).unwrap();
        assert_abs_diff_eq!(q.get(0), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(q.get(1), 0.4, epsilon = 1e-15);

        let p = pd(&[0.4, 0.6]).sorted_desc();
        let q0 = pd(&[0.7, 0.3]);
        assert_eq!(vsl_reduce(&p, &q0, 0).unwrap(), q0);

        let q = vsl_reduce(&pd(&[0.5, 0.3, 0.2]), &pd(&[0.5, 0.25, 0.25]), 1).unwrap();
        for (a, b) in q.weights().iter().zip([0.5, 0.3, 0.2]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn reduction_rejects_violated_hypothesis() {
        let err = vsl_reduce(&pd(&[0.4, 0.35, 0.25]), &pd(&[0.45, 0.3, 0.25]), 1);
        assert!(matches!(err, Err(Error::Precondition(_))));
        let err = vsl_reduce(&pd(&[0.2, 0.8]), &pd(&[0.5, 0.5]), 0);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn reduction_second_branch() {
        // d_1 = 0.05 < q_2 - p_2 = 0.15
        let p = pd(&[0.5, 0.2, 0.2, 0.1]);
        let q = pd(&[0.45, 0.35, 0.1, 0.1]);
        let qs = vsl_reduce(&p, &q, 1).unwrap();
        assert_abs_diff_eq!(qs.get(1), 0.3, epsilon = 1e-15);
        assert!(qs.get(0) >= p.get(0) && qs.get(1) >= p.get(1));
        assert!(tv_distance(&p, &qs) <= tv_distance(&p, &q) + 1e-15);
        assert!(qs.entropy() <= q.entropy() + 1e-15);
    }

    #[test]
    fn perturbation_gap_examples() {
        let (l, r) = perturbation_gap(&pd(&[0.5, 0.5]), &pd(&[1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(l, 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(r, 2f64.ln(), epsilon = 1e-15);

        let (l, r) = perturbation_gap(&pd(&[1.0, 0.0]), &pd(&[0.5, 0.5])).unwrap();
        assert_eq!(l, 0.0);
        assert!(l <= r);

        let (l, r) = perturbation_gap(&pd(&[0.7, 0.2, 0.1]), &pd(&[0.6, 0.3, 0.1])).unwrap();
        assert_abs_diff_eq!(l, 0.801_818_552_543_337, epsilon = 1e-14);
        assert_abs_diff_eq!(r, 0.897_945_724_856_780 + h2(0.1), epsilon = 1e-12);

        let p = pd(&[0.3, 0.7]);
        assert!(matches!(perturbation_gap(&p, &p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn disjoint_mixture_decomposes() {
        let a = pd(&[0.5, 0.5]);
        let b = pd(&[0.2, 0.3, 0.5]);
        let mix = disjoint_mixture(&[(0.3, &a), (0.7, &b)]).unwrap();
        let expected = 0.3 * a.entropy() + 0.7 * b.entropy() + h2(0.3);
        assert_abs_diff_eq!(mix.entropy(), expected, epsilon = 1e-12);
    }

    #[test]
    fn serde_round_trip_validates() {
        let p: ProbDist = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(p.weights(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<ProbDist>("[0.25, 0.5]").is_err());
    }
}

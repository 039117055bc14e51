//! Step-up scan and the matching adjusted p-values.

use crate::scalar::Real;

/// Rank-dependent scale `s(j) = numerator(j) / denominator(j)`; a feature at
/// rank `j` is rejected at level `alpha` when `p_(j) <= alpha * s(j)`.
///
/// Keeping the two parts separate lets thresholds be evaluated as
/// `alpha * numerator / denominator`, which reproduces `alpha / M` exactly for
/// Bonferroni-type scales.
pub trait RankScale<T> {
    fn numerator(&self, rank: usize) -> T;
    fn denominator(&self, rank: usize) -> T;
}

/// Adapts a closure returning `s(j)` directly.
pub struct FnScale<F>(pub F);

impl<T: Real, F: Fn(usize) -> T> RankScale<T> for FnScale<F> {
    fn numerator(&self, rank: usize) -> T {
        (self.0)(rank)
    }

    fn denominator(&self, _rank: usize) -> T {
        T::one()
    }
}

/// Largest rank `j` (1-based) with `p_(j) <= threshold(j)`, or 0.
///
/// Scans from the largest p-value downward and stops at the first hit, so
/// non-monotone thresholds are handled literally.
pub fn step_up<T: PartialOrd + Copy>(sorted: &[T], threshold: impl Fn(usize) -> T) -> usize {
    (1..=sorted.len()).rev().find(|&j| sorted[j - 1] <= threshold(j)).unwrap_or(0)
}

/// Thresholds `alpha * s(j)` for ranks `1..=m`.
pub fn thresholds<T: Real, S: RankScale<T>>(m: usize, scale: &S, alpha: T) -> Vec<T> {
    (1..=m).map(|j| alpha * scale.numerator(j) / scale.denominator(j)).collect()
}

/// `q_(j) = min(1, min_{k >= j} p_(k) / s(k))`.
pub fn adjusted_pvalues<T: Real, S: RankScale<T>>(sorted: &[T], scale: &S) -> Vec<T> {
    let mut q = vec![T::one(); sorted.len()];
    let mut running = T::infinity();
    for j in (1..=sorted.len()).rev() {
        let ratio = sorted[j - 1] * scale.denominator(j) / scale.numerator(j);
        running = running.min(ratio);
        q[j - 1] = running.min(T::one());
    }
    q
}

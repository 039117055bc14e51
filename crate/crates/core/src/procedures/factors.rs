//! Threshold factors: the harmonic (BY-type) factor, the linear and
//! quadratic correlation-adjusted factors, and the between-group factor.
//!
//! These only need field arithmetic and are generic over [`Scalar`], so the
//! identities they obey can be checked exactly with rationals.

use crate::error::{CastError, Result};
use crate::scalar::{count, Scalar};

/// Distance from -1 at which an unclamped rank-1 mean correlation triggers
/// the harmonic fallback.
pub const FALLBACK_TOLERANCE: f64 = 1e-12;

/// Partial harmonic sum `sum_{j=1}^{m} 1/j`.
pub fn harmonic_factor<T: Scalar>(m: usize) -> T {
    (1..=m).fold(T::zero(), |acc, j| acc + T::one() / count::<T>(j))
}

/// `1 - (j - 1) / (j + rbar)`, written as `(1 + rbar) / (j + rbar)`; the two
/// agree algebraically and the second form is exact at `rbar = 0`.
#[inline]
pub fn correlation_summand<T: Scalar>(j: usize, rbar: T) -> T {
    (T::one() + rbar) / (count::<T>(j) + rbar)
}

/// Clamps `rbar` into `[-1 + delta, 1]`.
#[inline]
pub fn clamp_to_open_unit<T: Scalar>(rbar: T, delta: T) -> T {
    let lo = delta - T::one();
    if rbar < lo {
        lo
    } else if rbar > T::one() {
        T::one()
    } else {
        rbar
    }
}

fn needs_fallback<T: Scalar>(rbar: T) -> bool {
    let d = rbar + T::one();
    let tol = T::from_f64(FALLBACK_TOLERANCE).unwrap_or_else(T::zero);
    d <= tol && d >= T::zero() - tol
}

/// Linear factor `C_g = sum_j (1 - (j-1)/(j + rbar_(j)))` over rank-ordered
/// mean correlations. Values are clamped into `[-1 + delta, 1]` unless the
/// rank-1 value is exactly -1, which requests the harmonic fallback.
pub fn lcast_factor<T: Scalar>(ranked_rbar: &[T], delta: T) -> Result<T> {
    match ranked_rbar.first() {
        None => Err(CastError::EmptyInput),
        Some(&r1) if needs_fallback(r1) => Err(CastError::FallbackRequired { rank: 1 }),
        Some(_) => Ok(ranked_rbar
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &r)| acc + correlation_summand(i + 1, clamp_to_open_unit(r, delta)))),
    }
}

/// Quadratic factor `C_g(j) = M_g (1 + rbar) / (j + rbar)` for rank `j`.
pub fn qcast_factor<T: Scalar>(group_size: usize, rank: usize, rbar: T, delta: T) -> Result<T> {
    assert!(rank >= 1 && rank <= group_size, "rank {rank} outside 1..={group_size}");
    if rank == 1 && needs_fallback(rbar) {
        return Err(CastError::FallbackRequired { rank });
    }
    Ok(count::<T>(group_size) * correlation_summand(rank, clamp_to_open_unit(rbar, delta)))
}

/// `min(G * M_g, M)`, the between-group denominator.
pub fn between_group_denominator(groups: usize, group_size: usize, total: usize) -> usize {
    groups.saturating_mul(group_size).min(total)
}

/// `A_B = M_g / min(G * M_g, M) = max(1/G, M_g/M)`.
pub fn between_group_factor<T: Scalar>(groups: usize, group_size: usize, total: usize) -> T {
    count::<T>(group_size) / count::<T>(between_group_denominator(groups, group_size, total))
}

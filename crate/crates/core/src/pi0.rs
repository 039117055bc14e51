//! Lowest-slope estimate of the proportion of true null hypotheses.

use std::collections::BTreeMap;

use crate::error::{CastError, Result};
use crate::pvalues::{GroupId, GroupedPValueSet};
use crate::scalar::{count, Real};

/// Estimates `pi0 = m0 / m` from ascending p-values with the lowest-slope rule.
///
/// With `l_i = (m + 1 - i) / (1 - p_(i))` (infinite when `p_(i) = 1`), the
/// first rank where `l` increases fixes `m0 = min(floor(l) + 1, m)`; if `l`
/// never increases the last slope is used. A single p-value gives 1.
pub fn estimate_pi0_lsl<T: Real>(sorted: &[T]) -> Result<T> {
    let m = sorted.len();
    if m == 0 {
        return Err(CastError::EmptyInput);
    }
    if let Some(position) = sorted.windows(2).position(|w| w[1] < w[0]) {
        return Err(CastError::UnsortedInput { position: position + 1 });
    }
    if m == 1 {
        return Ok(T::one());
    }

    let m_t = count::<T>(m);
    let slope = |i: usize| {
        let p = sorted[i - 1];
        if p >= T::one() {
            T::infinity()
        } else {
            (m_t + T::one() - count::<T>(i)) / (T::one() - p)
        }
    };

    let mut prev = slope(1);
    let mut chosen = None;
    for i in 2..=m {
        let cur = slope(i);
        if cur > prev {
            chosen = Some(cur);
            break;
        }
        prev = cur;
    }
    let l = chosen.unwrap_or(prev);
    let m0 = (l.floor() + T::one()).min(m_t);
    Ok(m0 / m_t)
}

/// Per-group `pi0` estimates; singleton groups are fixed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Pi0Estimates<T>(pub BTreeMap<GroupId, T>);

impl<T: Real> Pi0Estimates<T> {
    pub fn for_groups(set: &GroupedPValueSet<T>) -> Self {
        let map = set
            .groups()
            .iter()
            .map(|g| {
                let ps: Vec<T> = g.members.iter().map(|&i| set.entry(i).p).collect();
                let pi0 = estimate_pi0_lsl(&ps).expect("group p-values are non-empty and rank-sorted");
                (g.id.clone(), pi0)
            })
            .collect();
        Pi0Estimates(map)
    }

    pub fn get(&self, group: &GroupId) -> Option<T> {
        self.0.get(group).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singleton_is_one() {
        assert_eq!(estimate_pi0_lsl(&[0.7]).unwrap(), 1.0);
    }

    // Frozen from an independent scripted trace of the lowest-slope recipe.
    #[test]
    fn traced_examples() {
        assert_eq!(estimate_pi0_lsl(&[0.01, 0.9]).unwrap(), 1.0);
        assert_eq!(estimate_pi0_lsl(&[1e-6, 0.02, 0.04]).unwrap(), 2.0 / 3.0);
        assert_eq!(estimate_pi0_lsl(&[0.001, 0.002, 0.01, 0.2, 0.3, 0.5, 0.6, 0.8, 0.95]).unwrap(), 8.0 / 9.0);
        assert_eq!(
            estimate_pi0_lsl(&[1e-9, 1e-8, 1e-7, 1e-6, 0.3, 0.31, 0.5, 0.55, 0.9, 0.99]).unwrap(),
            0.9
        );
        assert_eq!(estimate_pi0_lsl(&[0.1, 0.2, 0.3, 0.4]).unwrap(), 0.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(estimate_pi0_lsl::<f64>(&[]), Err(CastError::EmptyInput)));
        assert!(matches!(estimate_pi0_lsl(&[0.3, 0.2]), Err(CastError::UnsortedInput { position: 1 })));
    }

    #[test]
    fn all_ones_any_length() {
        for m in 1..50 {
            assert_eq!(estimate_pi0_lsl(&vec![1.0f64; m]).unwrap(), 1.0);
        }
    }

    #[test]
    fn works_in_f32() {
        assert_eq!(estimate_pi0_lsl(&[1e-6f32, 0.02, 0.04]).unwrap(), 2.0 / 3.0);
    }

    proptest! {
        #[test]
        fn in_unit_interval(mut ps in prop::collection::vec(0.0f64..=1.0, 1..200)) {
            ps.sort_by(f64::total_cmp);
            let pi0 = estimate_pi0_lsl(&ps).unwrap();
            prop_assert!(pi0 > 0.0 && pi0 <= 1.0);
            // m0 is an integer no larger than m
            let m0 = pi0 * ps.len() as f64;
            prop_assert!((m0 - m0.round()).abs() < 1e-9);
            prop_assert!(m0.round() as usize <= ps.len());
        }
    }
}

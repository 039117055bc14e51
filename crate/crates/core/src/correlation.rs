//! Per-group correlation matrices and the mean row correlation used by the
//! correlation-adjusted factors.

use std::collections::HashMap;

use crate::error::{CastError, Result};
use crate::pvalues::{FeatureId, GroupId};
use crate::scalar::{count, lit, Real};

/// Default clamp applied to mean row correlations before factor evaluation.
pub const DEFAULT_CLAMP_DELTA: f64 = 1e-9;

/// Symmetric correlation matrix of one group, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCorrelation<T> {
    group: GroupId,
    order: Vec<FeatureId>,
    values: Vec<T>,
}

impl<T: Real> GroupCorrelation<T> {
    /// Checks unit diagonal, symmetry and `|r| <= 1` (all within 1e-9).
    pub fn new(group: GroupId, order: Vec<FeatureId>, values: Vec<T>) -> Result<Self> {
        let n = order.len();
        let invalid = |reason: String| CastError::InvalidCorrelation { group: group.to_string(), reason };
        if n == 0 {
            return Err(invalid("no features".into()));
        }
        if values.len() != n * n {
            return Err(invalid(format!("expected {} entries, got {}", n * n, values.len())));
        }
        let tol = lit::<T>(1e-9);
        for i in 0..n {
            if (values[i * n + i] - T::one()).abs() > tol {
                return Err(invalid(format!("diagonal entry {} is not 1", order[i])));
            }
            for j in 0..n {
                let r = values[i * n + j];
                if r.is_nan() || r.abs() > T::one() + tol {
                    return Err(invalid(format!("entry ({}, {}) outside [-1, 1]", order[i], order[j])));
                }
                if (r - values[j * n + i]).abs() > tol {
                    return Err(invalid(format!("asymmetric at ({}, {})", order[i], order[j])));
                }
            }
        }
        Ok(GroupCorrelation { group, order, values })
    }

    pub fn identity(group: GroupId, order: Vec<FeatureId>) -> Self {
        let n = order.len();
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            values[i * n + i] = T::one();
        }
        GroupCorrelation { group, order, values }
    }

    pub fn group(&self) -> &GroupId {
        &self.group
    }

    pub fn order(&self) -> &[FeatureId] {
        &self.order
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.order.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.order.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// `rbar_j = (1 / M_g) * sum_j' r_jj'`, diagonal term included.
    pub fn mean_row_correlation(&self) -> MeanRowCorrelations<T> {
        let n = count::<T>(self.size());
        let map = self
            .order
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let s: T = self.row(i).iter().copied().sum();
                (f.clone(), if self.size() == 1 { T::one() } else { s / n })
            })
            .collect();
        MeanRowCorrelations(map)
    }
}

/// Pearson estimate for one group together with its zero-variance features.
#[derive(Debug, Clone)]
pub struct PearsonEstimate<T> {
    pub correlation: GroupCorrelation<T>,
    /// Features with zero sample variance; their off-diagonal entries are 0.
    pub degenerate: Vec<FeatureId>,
}

/// Pearson correlations between the rows of one group (each row holds the
/// `N` subject values of a feature).
pub fn pearson_group_correlation<T: Real, R: AsRef<[T]>>(
    group: GroupId,
    order: Vec<FeatureId>,
    rows: &[R],
) -> Result<PearsonEstimate<T>> {
    let m = rows.len();
    if m == 0 || m != order.len() {
        return Err(CastError::InvalidCorrelation {
            group: group.to_string(),
            reason: format!("{} rows for {} features", m, order.len()),
        });
    }
    let n = rows[0].as_ref().len();
    if n < 3 {
        return Err(CastError::TooFewObservations { needed: 3, got: n });
    }
    if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != n) {
        return Err(CastError::InvalidCorrelation {
            group: group.to_string(),
            reason: format!("row {} has a different length", order[bad]),
        });
    }

    let nt = count::<T>(n);
    let centred: Vec<(Vec<T>, T)> = rows
        .iter()
        .map(|r| {
            let r = r.as_ref();
            let mean = r.iter().copied().sum::<T>() / nt;
            let c: Vec<T> = r.iter().map(|&x| x - mean).collect();
            let norm = c.iter().map(|&x| x * x).sum::<T>().sqrt();
            (c, norm)
        })
        .collect();

    let degenerate: Vec<FeatureId> = centred
        .iter()
        .zip(&order)
        .filter(|((_, norm), _)| *norm <= T::zero())
        .map(|(_, f)| f.clone())
        .collect();
    for f in &degenerate {
        log::warn!("feature {f} in group {group} has zero variance; its correlations are set to 0");
    }

    let mut values = vec![T::zero(); m * m];
    for i in 0..m {
        values[i * m + i] = T::one();
        for j in (i + 1)..m {
            let (ci, ni) = &centred[i];
            let (cj, nj) = &centred[j];
            let r = if *ni > T::zero() && *nj > T::zero() {
                let dot: T = ci.iter().zip(cj).map(|(&a, &b)| a * b).sum();
                (dot / (*ni * *nj)).max(-T::one()).min(T::one())
            } else {
                T::zero()
            };
            values[i * m + j] = r;
            values[j * m + i] = r;
        }
    }
    Ok(PearsonEstimate { correlation: GroupCorrelation { group, order, values }, degenerate })
}

/// Mean row correlation per feature.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeanRowCorrelations<T>(pub HashMap<FeatureId, T>);

impl<T: Real> MeanRowCorrelations<T> {
    pub fn get(&self, feature: &FeatureId) -> Option<T> {
        self.0.get(feature).copied()
    }

    pub fn insert(&mut self, feature: FeatureId, rbar: T) {
        self.0.insert(feature, rbar);
    }

    pub fn extend(&mut self, other: MeanRowCorrelations<T>) {
        self.0.extend(other.0);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T> FromIterator<(FeatureId, T)> for MeanRowCorrelations<T> {
    fn from_iter<I: IntoIterator<Item = (FeatureId, T)>>(iter: I) -> Self {
        MeanRowCorrelations(iter.into_iter().collect())
    }
}

/// Maps a mean correlation into `[-1 + delta, 1]`.
#[inline]
pub fn clamp_rbar<T: Real>(rbar: T, delta: T) -> T {
    rbar.max(delta - T::one()).min(T::one())
}

pub fn clamp_mean_correlations<T: Real>(rbar: &MeanRowCorrelations<T>, delta: T) -> Result<MeanRowCorrelations<T>> {
    check_delta(delta)?;
    Ok(rbar.0.iter().map(|(f, &r)| (f.clone(), clamp_rbar(r, delta))).collect())
}

pub(crate) fn check_delta<T: Real>(delta: T) -> Result<()> {
    if delta > T::zero() && delta <= lit(0.01) {
        Ok(())
    } else {
        Err(CastError::InvalidDelta(delta.to_f64().unwrap_or(f64::NAN)))
    }
}

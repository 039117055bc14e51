//! Grouped and ungrouped step-up procedures.
//!
//! Every method is expressed as a rank-dependent scale
//! `s(j) = j / (pi0 * base * C(j))` (Bonferroni: `1 / M`), so thresholds,
//! the step-up scan and adjusted p-values share one code path:
//!
//! | method | `pi0`        | `base`             | `C(j)`                   |
//! |--------|--------------|--------------------|--------------------------|
//! | BH     | pooled       | `M`                | 1                        |
//! | BY     | pooled       | `M`                | `H(M)`                   |
//! | GBH    | per group    | `M_g`              | 1                        |
//! | GBY    | per group    | `M_g`              | `H(M_g)`                 |
//! | LCAST  | per group    | `min(G M_g, M)`    | linear correlation factor |
//! | QCAST  | per group    | `min(G M_g, M)`    | quadratic factor at rank `j` |

mod factors;
mod result;
mod stepup;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use factors::{
    between_group_denominator, between_group_factor, clamp_to_open_unit, correlation_summand, harmonic_factor,
    lcast_factor, qcast_factor, FALLBACK_TOLERANCE,
};
pub use result::{AdjustmentResult, FactorTrace, FeatureOutcome, GroupDiagnostics};
pub use stepup::{adjusted_pvalues, step_up, thresholds, FnScale, RankScale};

use crate::correlation::{check_delta, MeanRowCorrelations, DEFAULT_CLAMP_DELTA};
use crate::error::{CastError, Result};
use crate::pi0::estimate_pi0_lsl;
use crate::pvalues::{GroupId, GroupedPValueSet};
use crate::scalar::{count, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bonferroni,
    BH,
    BY,
    GBH,
    GBY,
    LCAST,
    QCAST,
}

impl Method {
    pub const ALL: [Method; 7] =
        [Method::Bonferroni, Method::BH, Method::BY, Method::GBH, Method::GBY, Method::LCAST, Method::QCAST];

    pub fn is_grouped(self) -> bool {
        matches!(self, Method::GBH | Method::GBY | Method::LCAST | Method::QCAST)
    }

    pub fn needs_correlation(self) -> bool {
        matches!(self, Method::LCAST | Method::QCAST)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Bonferroni => "bonferroni",
            Method::BH => "bh",
            Method::BY => "by",
            Method::GBH => "gbh",
            Method::GBY => "gby",
            Method::LCAST => "lcast",
            Method::QCAST => "qcast",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| format!("unknown method {s:?} (expected one of bonferroni, bh, by, gbh, gby, lcast, qcast)"))
    }
}

/// What a threshold scale needs to know about one scan unit.
#[derive(Debug, Clone)]
pub struct GroupContext<T> {
    /// `M_g` (or `M` for pooled methods).
    pub size: usize,
    /// `G`.
    pub groups: usize,
    /// `M`.
    pub total: usize,
    pub pi0: T,
    /// Mean row correlations in rank order; required by LCAST and QCAST.
    pub ranked_rbar: Option<Vec<T>>,
}

/// Rank-dependent rejection scale of one scan unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScale<T> {
    pub method: Method,
    pub pi0: T,
    /// `M`, `M_g` or `min(G M_g, M)` depending on the method.
    pub base: T,
    pub between_factor: T,
    pub factor: FactorTrace<T>,
    pub fallback_used: bool,
}

impl<T: Real> ThresholdScale<T> {
    /// `s(j)`.
    pub fn scale(&self, rank: usize) -> T {
        self.numerator(rank) / self.denominator(rank)
    }

    /// `alpha * s(j)`.
    pub fn threshold(&self, alpha: T, rank: usize) -> T {
        alpha * self.numerator(rank) / self.denominator(rank)
    }
}

impl<T: Real> RankScale<T> for ThresholdScale<T> {
    fn numerator(&self, rank: usize) -> T {
        match self.method {
            Method::Bonferroni => T::one(),
            _ => count(rank),
        }
    }

    fn denominator(&self, rank: usize) -> T {
        match self.method {
            Method::Bonferroni => self.base,
            _ => self.pi0 * self.base * self.factor.at(rank),
        }
    }
}

/// Builds the threshold scale of `method` for one unit.
///
/// A rank-1 mean correlation of exactly -1 makes the correlation factors fall
/// back to the harmonic factor `H(M_g)`, recorded in `fallback_used`.
pub fn threshold_scale<T: Real>(method: Method, ctx: &GroupContext<T>, delta: T) -> Result<ThresholdScale<T>> {
    let m = ctx.size;
    let unit = |base: usize, factor: T| ThresholdScale {
        method,
        pi0: ctx.pi0,
        base: count(base),
        between_factor: T::one(),
        factor: FactorTrace::Scalar(factor),
        fallback_used: false,
    };
    let scale = match method {
        Method::Bonferroni => ThresholdScale { pi0: T::one(), ..unit(ctx.total, T::one()) },
        Method::BH | Method::GBH => unit(m, T::one()),
        Method::BY | Method::GBY => unit(m, harmonic_factor(m)),
        Method::LCAST | Method::QCAST => {
            let rbar = ctx.ranked_rbar.as_deref().ok_or_else(|| CastError::MissingCorrelation(String::new()))?;
            assert_eq!(rbar.len(), m, "one mean correlation per rank");
            let mut fallback_used = false;
            let factor = if method == Method::LCAST {
                FactorTrace::Scalar(lcast_factor(rbar, delta).unwrap_or_else(|_| {
                    fallback_used = true;
                    harmonic_factor(m)
                }))
            } else {
                FactorTrace::PerRank(
                    (1..=m)
                        .map(|j| {
                            qcast_factor(m, j, rbar[j - 1], delta).unwrap_or_else(|_| {
                                fallback_used = true;
                                harmonic_factor(m)
                            })
                        })
                        .collect(),
                )
            };
            ThresholdScale {
                method,
                pi0: ctx.pi0,
                base: count(between_group_denominator(ctx.groups, m, ctx.total)),
                between_factor: between_group_factor(ctx.groups, m, ctx.total),
                factor,
                fallback_used,
            }
        }
    };
    Ok(scale)
}

/// Method, level and clamp for one adjustment run.
#[derive(Debug, Clone, Copy)]
pub struct AdjustmentConfig<T> {
    pub method: Method,
    pub alpha: T,
    pub clamp_delta: T,
}

impl<T: Real> AdjustmentConfig<T> {
    pub fn new(method: Method, alpha: T) -> Self {
        AdjustmentConfig { method, alpha, clamp_delta: lit(DEFAULT_CLAMP_DELTA) }
    }
}

struct UnitOutcome<T> {
    features: Vec<FeatureOutcome<T>>,
    scale: ThresholdScale<T>,
    rejections: usize,
}

fn run_unit<T: Real>(
    set: &GroupedPValueSet<T>,
    members: &[usize],
    scale: ThresholdScale<T>,
    alpha: T,
) -> UnitOutcome<T> {
    let sorted: Vec<T> = members.iter().map(|&i| set.entry(i).p).collect();
    let thr = thresholds(sorted.len(), &scale, alpha);
    let r = step_up(&sorted, |j| thr[j - 1]);
    let q = adjusted_pvalues(&sorted, &scale);
    let features = members
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let e = set.entry(i);
            FeatureOutcome {
                feature: e.feature.clone(),
                group: e.group.clone(),
                rank: k + 1,
                p: e.p,
                threshold: thr[k],
                adjusted: q[k],
                rejected: k < r,
            }
        })
        .collect();
    UnitOutcome { features, scale, rejections: r }
}

/// Runs `config.method` on `set`.
///
/// LCAST and QCAST need a mean row correlation for every feature of every
/// multi-feature group; singletons use `rbar = 1`. The rank-`j` p-value of a
/// group is paired with the mean correlation of the feature holding rank `j`.
pub fn run_adjustment<T: Real>(
    set: &GroupedPValueSet<T>,
    rbar: Option<&MeanRowCorrelations<T>>,
    config: &AdjustmentConfig<T>,
) -> Result<AdjustmentResult<T>> {
    let AdjustmentConfig { method, alpha, clamp_delta } = *config;
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(CastError::InvalidAlpha(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    check_delta(clamp_delta)?;
    let total = set.len();
    let groups = set.group_count();

    if !method.is_grouped() {
        let order = set.pooled_order();
        let pi0 = match method {
            Method::Bonferroni => T::one(),
            _ => estimate_pi0_lsl(&order.iter().map(|&i| set.entry(i).p).collect::<Vec<_>>())?,
        };
        let ctx = GroupContext { size: total, groups: 1, total, pi0, ranked_rbar: None };
        let unit = run_unit(set, &order, threshold_scale(method, &ctx, clamp_delta)?, alpha);
        let mut per_group = vec![0usize; groups];
        let index: std::collections::HashMap<&GroupId, usize> =
            set.groups().iter().enumerate().map(|(k, g)| (&g.id, k)).collect();
        for f in unit.features.iter().filter(|f| f.rejected) {
            per_group[index[&f.group]] += 1;
        }
        let diagnostics = set
            .groups()
            .iter()
            .zip(per_group)
            .map(|(g, rejections)| GroupDiagnostics {
                group: g.id.clone(),
                size: g.size(),
                pi0: unit.scale.pi0,
                between_factor: T::one(),
                factor: unit.scale.factor.clone(),
                fallback_used: false,
                rejections,
            })
            .collect();
        return Ok(AdjustmentResult {
            method,
            alpha,
            features: unit.features,
            groups: diagnostics,
            rejections: unit.rejections,
        });
    }

    let units: Vec<Result<UnitOutcome<T>>> = set
        .groups()
        .par_iter()
        .map(|g| {
            let sorted: Vec<T> = g.members.iter().map(|&i| set.entry(i).p).collect();
            let pi0 = estimate_pi0_lsl(&sorted)?;
            let ranked_rbar = if method.needs_correlation() {
                if g.size() == 1 {
                    Some(vec![T::one()])
                } else {
                    let map = rbar.ok_or_else(|| CastError::MissingCorrelation(g.id.to_string()))?;
                    let v = g
                        .members
                        .iter()
                        .map(|&i| map.get(&set.entry(i).feature))
                        .collect::<Option<Vec<T>>>()
                        .ok_or_else(|| CastError::MissingCorrelation(g.id.to_string()))?;
                    Some(v)
                }
            } else {
                None
            };
            let ctx = GroupContext { size: g.size(), groups, total, pi0, ranked_rbar };
            let scale = threshold_scale(method, &ctx, clamp_delta)?;
            Ok(run_unit(set, &g.members, scale, alpha))
        })
        .collect();

    let mut features = Vec::with_capacity(total);
    let mut diagnostics = Vec::with_capacity(groups);
    let mut rejections = 0;
    for (g, unit) in set.groups().iter().zip(units) {
        let unit = unit?;
        if unit.scale.fallback_used {
            log::warn!("group {} uses the harmonic fallback factor", g.id);
        }
        rejections += unit.rejections;
        diagnostics.push(GroupDiagnostics {
            group: g.id.clone(),
            size: g.size(),
            pi0: unit.scale.pi0,
            between_factor: unit.scale.between_factor,
            factor: unit.scale.factor,
            fallback_used: unit.scale.fallback_used,
            rejections: unit.rejections,
        });
        features.extend(unit.features);
    }
    Ok(AdjustmentResult { method, alpha, features, groups: diagnostics, rejections })
}

/// Thresholds `t(1..=M_g)` of one group with constant mean correlation,
/// `pi0 = 1` and `A_B = 1`, as plotted when comparing methods.
pub fn threshold_curve<T: Real>(method: Method, group_size: usize, rbar: T, alpha: T, delta: T) -> Result<Vec<T>> {
    let ctx = GroupContext {
        size: group_size,
        groups: 1,
        total: group_size,
        pi0: T::one(),
        ranked_rbar: Some(vec![rbar; group_size]),
    };
    let scale = threshold_scale(method, &ctx, delta)?;
    Ok(thresholds(group_size, &scale, alpha))
}

use std::collections::HashMap;

use crate::procedures::Method;
use crate::pvalues::{FeatureId, GroupId};
use crate::scalar::Real;

/// Outcome for a single feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureOutcome<T> {
    pub feature: FeatureId,
    pub group: GroupId,
    /// 1-based rank within the scan unit (the group, or all features for
    /// the pooled methods).
    pub rank: usize,
    pub p: T,
    pub threshold: T,
    pub adjusted: T,
    pub rejected: bool,
}

/// Correlation factor actually used for a group.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorTrace<T> {
    /// Same factor at every rank (`1` for BH-type, harmonic for BY-type,
    /// `C_g` for the linear adjustment).
    Scalar(T),
    /// Per-rank factors of the quadratic adjustment.
    PerRank(Vec<T>),
}

impl<T: Real> FactorTrace<T> {
    pub fn at(&self, rank: usize) -> T {
        match self {
            FactorTrace::Scalar(c) => *c,
            FactorTrace::PerRank(v) => v[rank - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupDiagnostics<T> {
    pub group: GroupId,
    pub size: usize,
    pub pi0: T,
    /// Between-group factor `A_B`; 1 for methods that do not use it.
    pub between_factor: T,
    pub factor: FactorTrace<T>,
    pub fallback_used: bool,
    pub rejections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentResult<T> {
    pub method: Method,
    pub alpha: T,
    /// Canonical order: groups by id, then rank (global rank for pooled methods).
    pub features: Vec<FeatureOutcome<T>>,
    pub groups: Vec<GroupDiagnostics<T>>,
    pub rejections: usize,
}

impl<T: Real> AdjustmentResult<T> {
    pub fn rejected(&self) -> impl Iterator<Item = &FeatureOutcome<T>> {
        self.features.iter().filter(|f| f.rejected)
    }

    pub fn by_feature(&self) -> HashMap<&FeatureId, &FeatureOutcome<T>> {
        self.features.iter().map(|f| (&f.feature, f)).collect()
    }

    pub fn group(&self, id: &GroupId) -> Option<&GroupDiagnostics<T>> {
        self.groups.iter().find(|g| &g.group == id)
    }
}

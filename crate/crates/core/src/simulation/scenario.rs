use serde::{Deserialize, Serialize};

use crate::error::{CastError, Result};
use crate::procedures::Method;
use crate::testing::TestVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GroupSizeScheme {
    /// Sizes `floor(M/G)` or `ceil(M/G)`.
    #[default]
    Equal,
    /// Sizes drawn uniformly from `size_support`, then rescaled to sum to `M`.
    Heterogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CouplingScheme {
    /// Groups are shuffled into blocks of `max_partners + 1`; only pairs
    /// inside a block may be coupled, so no group has more than
    /// `max_partners` partners and components stay small.
    #[default]
    Bounded,
    /// Every pair of groups may be coupled.
    Exhaustive,
}

/// Full parameter bundle of one simulation grid point.
///
/// Field names double as configuration-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationScenario {
    /// Subjects `N`.
    pub subjects: usize,
    /// Proportion of cases `gamma_D`.
    pub case_fraction: f64,
    /// Groups `G`.
    pub groups: usize,
    /// Features `M`.
    pub features: usize,
    pub group_sizes: GroupSizeScheme,
    pub size_support: Vec<usize>,
    /// Mean shift `zeta` of non-null features in cases.
    pub effect_size: f64,
    pub sigma: f64,
    /// Overall non-null proportion `pi1`.
    pub non_null_fraction: f64,
    /// Proportion of groups holding signal `psi`.
    pub signal_group_fraction: f64,
    /// Within-group pair correlation probability `kappa`.
    pub within_pair_prob: f64,
    /// Cross-group pair correlation probability `tau`.
    pub cross_pair_prob: f64,
    /// Group-pair coupling probability `upsilon`.
    pub coupling_prob: f64,
    pub coupling: CouplingScheme,
    pub max_partners: usize,
    /// Correlation magnitudes are uniform on `[rho_min, rho_max]`.
    pub rho_min: f64,
    pub rho_max: f64,
    /// Probability that a selected pair is positively correlated.
    pub rho_positive_prob: f64,
    /// Largest connected component (in features) built densely.
    pub component_cap: usize,
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub seed: u64,
    pub test: TestVariant,
}

impl Default for SimulationScenario {
    fn default() -> Self {
        SimulationScenario {
            subjects: 300,
            case_fraction: 0.5,
            groups: 100,
            features: 1250,
            group_sizes: GroupSizeScheme::Equal,
            size_support: vec![1, 2, 4, 8, 16, 32],
            effect_size: 1.1,
            sigma: 1.0,
            non_null_fraction: 0.01,
            signal_group_fraction: 0.05,
            within_pair_prob: 0.5,
            cross_pair_prob: 0.5,
            coupling_prob: 0.5,
            coupling: CouplingScheme::Bounded,
            max_partners: 2,
            rho_min: 0.2,
            rho_max: 0.8,
            rho_positive_prob: 0.6,
            component_cap: 4096,
            alpha: 0.05,
            methods: vec![Method::GBH, Method::GBY, Method::LCAST, Method::QCAST],
            replicates: 100,
            seed: 20240601,
            test: TestVariant::Pooled,
        }
    }
}

/// Round half to even, used for every derived count.
pub fn round_count(x: f64) -> usize {
    x.round_ties_even().max(0.0) as usize
}

impl SimulationScenario {
    pub fn cases(&self) -> usize {
        round_count(self.case_fraction * self.subjects as f64)
    }

    pub fn controls(&self) -> usize {
        self.subjects - self.cases().min(self.subjects)
    }

    pub fn non_null_count(&self) -> usize {
        round_count(self.non_null_fraction * self.features as f64)
    }

    pub fn signal_group_count(&self) -> usize {
        round_count(self.signal_group_fraction * self.groups as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CastError::InvalidScenario(msg));
        if self.cases() < 2 || self.controls() < 2 {
            return bad(format!("need at least 2 cases and 2 controls, got {} and {}", self.cases(), self.controls()));
        }
        if self.groups == 0 || self.groups > self.features {
            return Err(CastError::InfeasiblePartition { groups: self.groups, features: self.features });
        }
        for (name, v) in [
            ("case_fraction", self.case_fraction),
            ("non_null_fraction", self.non_null_fraction),
            ("signal_group_fraction", self.signal_group_fraction),
            ("within_pair_prob", self.within_pair_prob),
            ("cross_pair_prob", self.cross_pair_prob),
            ("coupling_prob", self.coupling_prob),
            ("rho_positive_prob", self.rho_positive_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if self.sigma.is_nan() || self.sigma <= 0.0 || !self.effect_size.is_finite() || self.effect_size < 0.0 {
            return bad("sigma must be positive and effect_size non-negative".into());
        }
        if !(0.0 <= self.rho_min && self.rho_min <= self.rho_max && self.rho_max <= 1.0) {
            return bad(format!("rho range [{}, {}] must lie in [0, 1]", self.rho_min, self.rho_max));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CastError::InvalidAlpha(self.alpha));
        }
        if self.group_sizes == GroupSizeScheme::Heterogeneous
            && (self.size_support.is_empty() || self.size_support.contains(&0))
        {
            return bad("size_support must be non-empty with positive sizes".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        Ok(())
    }
}

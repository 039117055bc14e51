use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlation::{pearson_group_correlation, MeanRowCorrelations};
use crate::error::{CastError, Result};
use crate::evaluation::{Counts, EvaluationSummary, MethodSummary};
use crate::procedures::{run_adjustment, AdjustmentConfig, Method};
use crate::pvalues::{FeatureId, GroupId, GroupedPValueSet, Record};
use crate::simulation::covariance::{build_covariance, BlockSparseCovariance};
use crate::simulation::partition::build_group_sizes;
use crate::simulation::sampling::{sample_dataset, DataMatrix};
use crate::simulation::scenario::SimulationScenario;
use crate::simulation::signals::{assign_signals, SignalMask};
use crate::testing::{matrix_pvalues, PhenotypeVector};

/// Independent stream for replicate `replicate` of grid point `grid_index`.
pub fn replicate_rng(master_seed: u64, grid_index: usize, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((grid_index as u64) << 32) | replicate as u64);
    rng
}

fn padded(prefix: char, i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

/// One simulated dataset with its ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub sizes: Vec<usize>,
    pub covariance: BlockSparseCovariance,
    pub mask: SignalMask,
    pub data: DataMatrix,
    pub phenotype: PhenotypeVector,
}

impl SimulatedDataset {
    pub fn generate(scenario: &SimulationScenario, rng: &mut ChaCha8Rng) -> Result<Self> {
        scenario.validate()?;
        let sizes = build_group_sizes(
            scenario.groups,
            scenario.features,
            scenario.group_sizes,
            &scenario.size_support,
            rng,
        )?;
        let covariance = build_covariance(scenario, &sizes, rng)?;
        let mask = assign_signals(scenario, &sizes, rng)?;
        let (data, phenotype) = sample_dataset(scenario, &covariance, &mask, rng);
        Ok(SimulatedDataset { sizes, covariance, mask, data, phenotype })
    }

    pub fn feature_id(&self, f: usize) -> FeatureId {
        FeatureId::new(padded('f', f, self.data.features))
    }

    pub fn group_id(&self, g: usize) -> GroupId {
        GroupId::new(padded('g', g, self.sizes.len()))
    }

    pub fn pvalue_set(&self, pvalues: &[f64]) -> Result<GroupedPValueSet<f64>> {
        let records = self.covariance.group_ranges.iter().enumerate().flat_map(|(g, r)| {
            let group = self.group_id(g);
            r.clone().map(move |f| (f, group.clone()))
        });
        GroupedPValueSet::validate(
            records.map(|(f, group)| Record::new(self.feature_id(f).as_str(), group.as_str(), pvalues[f])),
        )
    }

    /// Sample Pearson mean row correlations of every group.
    pub fn mean_correlations(&self) -> Result<MeanRowCorrelations<f64>> {
        let per_group: Vec<Result<MeanRowCorrelations<f64>>> = self
            .covariance
            .group_ranges
            .par_iter()
            .enumerate()
            .map(|(g, r)| {
                let rows: Vec<&[f64]> = r.clone().map(|f| self.data.row(f)).collect();
                let order = r.clone().map(|f| self.feature_id(f)).collect();
                let est = pearson_group_correlation(self.group_id(g), order, &rows)?;
                Ok(est.correlation.mean_row_correlation())
            })
            .collect();
        let mut all = MeanRowCorrelations::default();
        for m in per_group {
            all.extend(m?);
        }
        Ok(all)
    }
}

/// Counts of every method in one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub non_nulls: usize,
    pub counts: Vec<(Method, Counts)>,
}

impl ReplicateOutcome {
    pub fn get(&self, method: Method) -> Option<Counts> {
        self.counts.iter().find(|(m, _)| *m == method).map(|&(_, c)| c)
    }
}

/// Simulates one dataset, tests every feature and scores each method.
/// Also returns the per-feature p-values.
pub fn run_replicate_with_pvalues(
    scenario: &SimulationScenario,
    rng: &mut ChaCha8Rng,
) -> Result<(ReplicateOutcome, Vec<f64>)> {
    let ds = SimulatedDataset::generate(scenario, rng)?;
    let pvalues = matrix_pvalues(&ds.data.values, &ds.phenotype, scenario.test)?;
    let set = ds.pvalue_set(&pvalues)?;
    let rbar = if scenario.methods.iter().any(|m| m.needs_correlation()) {
        Some(ds.mean_correlations()?)
    } else {
        None
    };
    let signal: std::collections::HashSet<FeatureId> =
        (0..ds.data.features).filter(|&f| ds.mask.is_signal(f)).map(|f| ds.feature_id(f)).collect();

    let mut counts = Vec::with_capacity(scenario.methods.len());
    for &method in &scenario.methods {
        let res = run_adjustment(&set, rbar.as_ref(), &AdjustmentConfig::new(method, scenario.alpha))?;
        let tp = res.rejected().filter(|f| signal.contains(&f.feature)).count();
        counts.push((method, Counts::new(res.rejections - tp, tp)));
    }
    Ok((ReplicateOutcome { non_nulls: ds.mask.count(), counts }, pvalues))
}

pub fn run_replicate(scenario: &SimulationScenario, rng: &mut ChaCha8Rng) -> Result<ReplicateOutcome> {
    run_replicate_with_pvalues(scenario, rng).map(|(o, _)| o)
}

/// Replicates and summary of one grid point.
#[derive(Debug, Clone)]
pub struct StudyPoint {
    pub scenario: SimulationScenario,
    pub replicates: Vec<ReplicateOutcome>,
    pub summary: EvaluationSummary<f64>,
}

pub fn summarize(methods: &[Method], replicates: &[ReplicateOutcome]) -> Result<EvaluationSummary<f64>> {
    let non_nulls: Vec<usize> = replicates.iter().map(|r| r.non_nulls).collect();
    let methods = methods
        .iter()
        .map(|&m| {
            let counts: Vec<Counts> = replicates
                .iter()
                .map(|r| r.get(m).ok_or_else(|| CastError::CountInconsistency(format!("no counts for {m}"))))
                .collect::<Result<_>>()?;
            MethodSummary::from_counts(m, &counts, &non_nulls)
        })
        .collect::<Result<_>>()?;
    Ok(EvaluationSummary { methods })
}

/// Runs `replicates` replicates of every grid point. Replicate `i` of point
/// `k` draws from [`replicate_rng`]`(master_seed, k, i)`, so results do not
/// depend on scheduling.
pub fn run_study(grid: &[SimulationScenario], replicates: usize, master_seed: u64) -> Result<Vec<StudyPoint>> {
    if replicates < 2 {
        return Err(CastError::TooFewReplicates(replicates));
    }
    for s in grid {
        s.validate()?;
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|k| (0..replicates).map(move |i| (k, i))).collect();
    let outcomes: Vec<Result<ReplicateOutcome>> = jobs
        .par_iter()
        .map(|&(k, i)| run_replicate(&grid[k], &mut replicate_rng(master_seed, k, i)))
        .collect();
    let mut outcomes = outcomes.into_iter();
    grid.iter()
        .map(|s| {
            let reps: Vec<ReplicateOutcome> = outcomes.by_ref().take(replicates).collect::<Result<_>>()?;
            let summary = summarize(&s.methods, &reps)?;
            Ok(StudyPoint { scenario: s.clone(), replicates: reps, summary })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::scenario::CouplingScheme;

    fn small() -> SimulationScenario {
        SimulationScenario { features: 200, groups: 20, subjects: 60, non_null_fraction: 0.05, signal_group_fraction: 0.1, ..Default::default() }
    }

    #[test]
    fn ids_sort_in_index_order() {
        assert_eq!(padded('g', 7, 100), "g07");
        assert_eq!(padded('f', 7, 1250), "f0007");
        assert_eq!(padded('g', 0, 1), "g0");
    }

    #[test]
    fn seed_determinism() {
        let s = small();
        let a = run_replicate(&s, &mut replicate_rng(11, 0, 3)).unwrap();
        let b = run_replicate(&s, &mut replicate_rng(11, 0, 3)).unwrap();
        assert_eq!(a, b);
        let p1 = run_study(std::slice::from_ref(&s), 3, 5).unwrap();
        let p2 = run_study(&[s], 3, 5).unwrap();
        assert_eq!(p1[0].replicates, p2[0].replicates);
        assert_eq!(p1[0].summary, p2[0].summary);
    }

    #[test]
    fn huge_effect_finds_everything() {
        let s = SimulationScenario { effect_size: 10.0, within_pair_prob: 0.0, coupling_prob: 0.0, ..small() };
        let out = run_replicate(&s, &mut replicate_rng(1, 0, 0)).unwrap();
        for (_, c) in &out.counts {
            assert_eq!(c.true_rejections, out.non_nulls);
        }
    }

    #[test]
    fn no_signal_means_no_true_positives() {
        let s = SimulationScenario { non_null_fraction: 0.0, effect_size: 0.0, ..small() };
        let out = run_replicate(&s, &mut replicate_rng(1, 0, 0)).unwrap();
        assert_eq!(out.non_nulls, 0);
        for (_, c) in &out.counts {
            assert_eq!(c.true_rejections, 0);
            assert_eq!(c.false_rejections, c.rejections);
        }
    }

    #[test]
    fn coupling_changes_structure() {
        let block = SimulationScenario { coupling_prob: 0.0, ..small() };
        let coupled = SimulationScenario { coupling_prob: 0.5, coupling: CouplingScheme::Exhaustive, ..small() };
        let a = SimulatedDataset::generate(&block, &mut replicate_rng(2, 0, 0)).unwrap();
        let b = SimulatedDataset::generate(&coupled, &mut replicate_rng(2, 0, 0)).unwrap();
        assert!(a.covariance.between_counts.is_empty());
        assert!(!b.covariance.between_counts.is_empty());
    }

    #[test]
    fn too_few_replicates() {
        assert!(matches!(run_study(&[small()], 1, 0), Err(CastError::TooFewReplicates(1))));
    }

    #[test]
    fn sample_correlations_match_targets() {
        let s = SimulationScenario {
            features: 40,
            groups: 4,
            subjects: 10_000,
            within_pair_prob: 0.5,
            coupling_prob: 0.5,
            non_null_fraction: 0.0,
            effect_size: 0.0,
            ..Default::default()
        };
        let ds = SimulatedDataset::generate(&s, &mut replicate_rng(3, 0, 0)).unwrap();
        let target = ds.covariance.dense();
        assert!(!ds.covariance.pairs.is_empty());
        for p in &ds.covariance.pairs {
            let est = pearson_group_correlation(
                GroupId::from("x"),
                vec![FeatureId::from("a"), FeatureId::from("b")],
                &[ds.data.row(p.i), ds.data.row(p.j)],
            )
            .unwrap();
            let r = est.correlation.get(0, 1);
            assert!((r - target[(p.i, p.j)]).abs() < 0.05, "pair {p:?}: sample {r} vs {}", target[(p.i, p.j)]);
        }
    }
}

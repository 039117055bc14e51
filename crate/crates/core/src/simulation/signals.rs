use rand::seq::index::sample;
use rand::Rng;

use crate::error::{CastError, Result};
use crate::simulation::scenario::SimulationScenario;

/// Ground-truth non-null features of a simulated replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMask {
    pub flags: Vec<bool>,
    pub per_group: Vec<usize>,
}

impl SignalMask {
    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn signal_groups(&self) -> usize {
        self.per_group.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_signal(&self, feature: usize) -> bool {
        self.flags[feature]
    }
}

/// Picks `round(psi G)` signal groups, one signal in each, then spreads the
/// remaining `round(pi1 M) - round(psi G)` signals uniformly over the other
/// features of those groups. Features are contiguous by group in `sizes`
/// order.
pub fn assign_signals<R: Rng + ?Sized>(
    scenario: &SimulationScenario,
    sizes: &[usize],
    rng: &mut R,
) -> Result<SignalMask> {
    let total: usize = sizes.iter().sum();
    let mut flags = vec![false; total];
    let mut per_group = vec![0; sizes.len()];
    let signals = scenario.non_null_count();
    if signals == 0 {
        return Ok(SignalMask { flags, per_group });
    }
    let signal_groups = scenario.signal_group_count();
    if signal_groups == 0 || signal_groups > sizes.len() {
        return Err(CastError::InfeasibleSignalCounts(format!(
            "{signals} non-nulls need between 1 and {} signal groups, got {signal_groups}",
            sizes.len()
        )));
    }
    if signals < signal_groups {
        return Err(CastError::InfeasibleSignalCounts(format!(
            "{signals} non-nulls cannot cover {signal_groups} signal groups"
        )));
    }

    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    let mut chosen: Vec<usize> = sample(rng, sizes.len(), signal_groups).into_vec();
    chosen.sort_unstable();

    let mut pool = Vec::new();
    for &g in &chosen {
        let first = offsets[g] + rng.random_range(0..sizes[g]);
        flags[first] = true;
        per_group[g] += 1;
        pool.extend((offsets[g]..offsets[g] + sizes[g]).filter(|&f| f != first));
    }
    let rest = signals - signal_groups;
    if rest > pool.len() {
        return Err(CastError::InfeasibleSignalCounts(format!(
            "{rest} extra non-nulls exceed the {} free features of the signal groups",
            pool.len()
        )));
    }
    let group_of = |f: usize| offsets.partition_point(|&o| o <= f) - 1;
    for k in sample(rng, pool.len(), rest) {
        let f = pool[k];
        flags[f] = true;
        per_group[group_of(f)] += 1;
    }
    Ok(SignalMask { flags, per_group })
}

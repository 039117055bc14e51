use rand::Rng;

use crate::error::{CastError, Result};
use crate::simulation::scenario::GroupSizeScheme;

/// Splits `features` into `groups` non-empty group sizes.
///
/// The equal scheme gives the first `M mod G` groups the larger size. The
/// heterogeneous scheme draws raw sizes uniformly from `support` and rescales
/// them to sum to `M` by largest remainder, keeping every size at least 1.
pub fn build_group_sizes<R: Rng + ?Sized>(
    groups: usize,
    features: usize,
    scheme: GroupSizeScheme,
    support: &[usize],
    rng: &mut R,
) -> Result<Vec<usize>> {
    if groups == 0 || groups > features {
        return Err(CastError::InfeasiblePartition { groups, features });
    }
    match scheme {
        GroupSizeScheme::Equal => {
            let base = features / groups;
            let extra = features % groups;
            Ok((0..groups).map(|g| base + usize::from(g < extra)).collect())
        }
        GroupSizeScheme::Heterogeneous => {
            if support.is_empty() || support.contains(&0) {
                return Err(CastError::InvalidScenario("size_support must hold positive sizes".into()));
            }
            let raw: Vec<usize> = (0..groups).map(|_| support[rng.random_range(0..support.len())]).collect();
            Ok(rescale(&raw, features))
        }
    }
}

fn rescale(raw: &[usize], target: usize) -> Vec<usize> {
    let total: usize = raw.iter().sum();
    let exact: Vec<f64> = raw.iter().map(|&s| s as f64 * target as f64 / total as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|&x| (x.floor() as usize).max(1)).collect();
    let mut assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    // largest fractional remainder first, index as tie-break
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut k = 0;
    while assigned < target {
        sizes[order[k % order.len()]] += 1;
        assigned += 1;
        k += 1;
    }
    while assigned > target {
        // the floor of 1 overshot: shrink the largest groups
        let largest = (0..sizes.len()).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))).expect("non-empty");
        sizes[largest] -= 1;
        assigned -= 1;
    }
    sizes
}

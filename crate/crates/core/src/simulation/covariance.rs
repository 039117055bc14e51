//! Block-sparse covariance of grouped features: random within-group and
//! cross-group correlated pairs, dense per connected component of the
//! group-coupling graph, repaired to be positive definite.

use std::collections::BTreeMap;
use std::ops::Range;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{CastError, Result};
use crate::simulation::scenario::{CouplingScheme, SimulationScenario};

/// Relative eigenvalue floor of the positive-definite repair.
pub const EIGEN_FLOOR: f64 = 1e-6;

/// Nearest positive-definite correlation matrix by eigenvalue flooring.
///
/// Eigenvalues below `1e-6 * mean eigenvalue` are raised to that floor, the
/// matrix is rebuilt and rescaled to unit diagonal. Inputs whose spectrum is
/// already above the floor are returned unchanged.
pub fn nearest_pd_repair(matrix: &DMatrix<f64>) -> DMatrix<f64> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "square matrix required");
    if n <= 1 {
        return matrix.clone();
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let floor = EIGEN_FLOOR * eig.eigenvalues.sum() / n as f64;
    if eig.eigenvalues.iter().all(|&l| l >= floor) {
        return matrix.clone();
    }
    let lambda = eig.eigenvalues.map(|l| l.max(floor));
    let v = &eig.eigenvectors;
    let rebuilt = v * DMatrix::from_diagonal(&lambda) * v.transpose();
    let d: Vec<f64> = (0..n).map(|i| rebuilt[(i, i)].sqrt()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            // average the two triangles so the result is exactly symmetric
            let r = 0.5 * (rebuilt[(i, j)] + rebuilt[(j, i)]) / (d[i] * d[j]);
            r.clamp(-1.0, 1.0)
        }
    })
}

/// A selected correlated pair (global feature indices, `i < j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedPair {
    pub i: usize,
    pub j: usize,
    pub rho: f64,
}

/// Connected component of the group-coupling graph with its dense,
/// repaired correlation matrix.
#[derive(Debug, Clone)]
pub struct Component {
    pub groups: Vec<usize>,
    pub features: Vec<usize>,
    pub correlation: DMatrix<f64>,
    /// Lower factor `L` with `L L^T = correlation`; `None` for the identity.
    pub factor: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct BlockSparseCovariance {
    pub sigma: f64,
    pub group_ranges: Vec<Range<usize>>,
    /// Selected pairs before repair.
    pub pairs: Vec<CorrelatedPair>,
    /// `W_g`: correlated pairs inside group `g`.
    pub within_counts: Vec<usize>,
    /// `B_gg'` for `g < g'`, only coupled pairs with at least one entry.
    pub between_counts: BTreeMap<(usize, usize), usize>,
    pub components: Vec<Component>,
}

impl BlockSparseCovariance {
    pub fn features(&self) -> usize {
        self.group_ranges.last().map_or(0, |r| r.end)
    }

    /// Dense `M x M` covariance; intended for small diagnostics only.
    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.features();
        let mut out = DMatrix::zeros(m, m);
        let s2 = self.sigma * self.sigma;
        for c in &self.components {
            for (a, &fa) in c.features.iter().enumerate() {
                for (b, &fb) in c.features.iter().enumerate() {
                    out[(fa, fb)] = s2 * c.correlation[(a, b)];
                }
            }
        }
        out
    }
}

fn draw_rho<R: Rng + ?Sized>(s: &SimulationScenario, rng: &mut R) -> f64 {
    let magnitude = if s.rho_max > s.rho_min { rng.random_range(s.rho_min..=s.rho_max) } else { s.rho_min };
    if rng.random_bool(s.rho_positive_prob) {
        magnitude
    } else {
        -magnitude
    }
}

fn coupled_group_pairs<R: Rng + ?Sized>(s: &SimulationScenario, groups: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if s.coupling_prob <= 0.0 || groups < 2 {
        return out;
    }
    match s.coupling {
        CouplingScheme::Exhaustive => {
            for g in 0..groups {
                for h in (g + 1)..groups {
                    if rng.random_bool(s.coupling_prob) {
                        out.push((g, h));
                    }
                }
            }
        }
        CouplingScheme::Bounded => {
            let mut order: Vec<usize> = (0..groups).collect();
            order.shuffle(rng);
            for block in order.chunks(s.max_partners + 1) {
                for a in 0..block.len() {
                    for b in (a + 1)..block.len() {
                        if rng.random_bool(s.coupling_prob) {
                            let (g, h) = (block[a].min(block[b]), block[a].max(block[b]));
                            out.push((g, h));
                        }
                    }
                }
            }
            out.sort_unstable();
        }
    }
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Lower factor of a positive-definite correlation matrix. Falls back to the
/// symmetric square root when Cholesky fails numerically.
fn lower_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    match Cholesky::new(m.clone()) {
        Some(c) => c.l(),
        None => {
            let eig = SymmetricEigen::new(m.clone());
            let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
            &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
        }
    }
}

/// Draws correlated pairs and assembles the repaired block covariance.
///
/// Features are laid out contiguously by group. Each within-group pair is
/// selected with probability `within_pair_prob`; each eligible group pair is
/// coupled with probability `coupling_prob`, and inside a coupled pair every
/// cross pair is selected with probability `cross_pair_prob` (at least one,
/// so coupled groups are always correlated).
pub fn build_covariance<R: Rng + ?Sized>(
    scenario: &SimulationScenario,
    sizes: &[usize],
    rng: &mut R,
) -> Result<BlockSparseCovariance> {
    let mut group_ranges = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        group_ranges.push(start..start + s);
        start += s;
    }
    let groups = sizes.len();

    let mut pairs = Vec::new();
    let mut within_counts = vec![0; groups];
    if scenario.within_pair_prob > 0.0 {
        for (g, r) in group_ranges.iter().enumerate() {
            for i in r.clone() {
                for j in (i + 1)..r.end {
                    if rng.random_bool(scenario.within_pair_prob) {
                        pairs.push(CorrelatedPair { i, j, rho: draw_rho(scenario, rng) });
                        within_counts[g] += 1;
                    }
                }
            }
        }
    }

    let mut between_counts = BTreeMap::new();
    let mut parent: Vec<usize> = (0..groups).collect();
    if scenario.cross_pair_prob > 0.0 {
        for (g, h) in coupled_group_pairs(scenario, groups, rng) {
            let (rg, rh) = (group_ranges[g].clone(), group_ranges[h].clone());
            let mut b = 0;
            for i in rg.clone() {
                for j in rh.clone() {
                    if rng.random_bool(scenario.cross_pair_prob) {
                        pairs.push(CorrelatedPair { i, j, rho: draw_rho(scenario, rng) });
                        b += 1;
                    }
                }
            }
            if b == 0 {
                let i = rng.random_range(rg);
                let j = rng.random_range(rh);
                pairs.push(CorrelatedPair { i, j, rho: draw_rho(scenario, rng) });
                b = 1;
            }
            between_counts.insert((g, h), b);
            let (a, c) = (find(&mut parent, g), find(&mut parent, h));
            if a != c {
                parent[a.max(c)] = a.min(c);
            }
        }
    }

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for g in 0..groups {
        let root = find(&mut parent, g);
        members.entry(root).or_default().push(g);
    }
    let mut feature_slot = vec![(0usize, 0usize); start];
    let mut layouts = Vec::with_capacity(members.len());
    for (k, groups_in) in members.into_values().enumerate() {
        let features: Vec<usize> = groups_in.iter().flat_map(|&g| group_ranges[g].clone()).collect();
        if features.len() > scenario.component_cap {
            return Err(CastError::ComponentTooLarge { size: features.len(), cap: scenario.component_cap });
        }
        for (pos, &f) in features.iter().enumerate() {
            feature_slot[f] = (k, pos);
        }
        layouts.push((groups_in, features));
    }
    let mut entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); layouts.len()];
    for p in &pairs {
        let (k, a) = feature_slot[p.i];
        let (k2, b) = feature_slot[p.j];
        debug_assert_eq!(k, k2);
        entries[k].push((a, b, p.rho));
    }

    let components = layouts
        .into_par_iter()
        .zip(entries)
        .map(|((groups, features), entries)| {
            let n = features.len();
            let mut corr = DMatrix::identity(n, n);
            for &(a, b, rho) in &entries {
                corr[(a, b)] = rho;
                corr[(b, a)] = rho;
            }
            let (correlation, factor) = if entries.is_empty() {
                (corr, None)
            } else {
                let repaired = nearest_pd_repair(&corr);
                let l = lower_factor(&repaired);
                (repaired, Some(l))
            };
            Component { groups, features, correlation, factor }
        })
        .collect();

    Ok(BlockSparseCovariance { sigma: scenario.sigma, group_ranges, pairs, within_counts, between_counts, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn min_eigen(m: &DMatrix<f64>) -> f64 {
        SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn repair_identity_and_pd_inputs_unchanged() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(nearest_pd_repair(&id), id);
        let cs = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.5 });
        let r = nearest_pd_repair(&cs);
        assert!((r - cs).abs().max() <= 1e-12);
    }

    #[test]
    fn repair_singular_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let r = nearest_pd_repair(&m);
        assert!(r[(0, 1)] < 1.0);
        assert!(min_eigen(&r) > 0.0);
        assert_eq!(r[(0, 0)], 1.0);
        // eigenvalues {2, 0} with floor 1e-6: off-diagonal (2 - 1e-6) / (2 + 1e-6)
        assert!((r[(0, 1)] - (2.0 - 1e-6) / (2.0 + 1e-6)).abs() < 1e-12);
    }

    #[test]
    fn repair_indefinite() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, 0.9, 0.9, 1.0, -0.9, 0.9, -0.9, 1.0]);
        assert!(min_eigen(&m) < 0.0);
        let r = nearest_pd_repair(&m);
        assert!(min_eigen(&r) > 0.0);
        assert!(r.iter().all(|x| x.abs() <= 1.0));
        assert!((r.clone() - r.transpose()).abs().max() == 0.0);
    }

    fn scenario() -> SimulationScenario {
        SimulationScenario { features: 120, groups: 10, ..Default::default() }
    }

    #[test]
    fn uncoupled_is_block_diagonal() {
        let s = SimulationScenario { coupling_prob: 0.0, ..scenario() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cov = build_covariance(&s, &[12; 10], &mut rng).unwrap();
        assert!(cov.between_counts.is_empty());
        assert_eq!(cov.components.len(), 10);
        let dense = cov.dense();
        for (g, rg) in cov.group_ranges.iter().enumerate() {
            for (h, rh) in cov.group_ranges.iter().enumerate() {
                if g != h {
                    for i in rg.clone() {
                        for j in rh.clone() {
                            assert_eq!(dense[(i, j)], 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn no_pairs_gives_scaled_identity() {
        let s = SimulationScenario { within_pair_prob: 0.0, coupling_prob: 0.0, sigma: 2.0, ..scenario() };
        let cov = build_covariance(&s, &[12; 10], &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(cov.dense(), DMatrix::identity(120, 120) * 4.0);
        assert!(cov.components.iter().all(|c| c.factor.is_none()));
    }

    #[test]
    fn compound_symmetry_untouched() {
        let s = SimulationScenario {
            within_pair_prob: 1.0,
            coupling_prob: 0.0,
            rho_min: 0.5,
            rho_max: 0.5,
            rho_positive_prob: 1.0,
            ..scenario()
        };
        let cov = build_covariance(&s, &[3; 40], &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for c in &cov.components {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(c.correlation[(i, j)], if i == j { 1.0 } else { 0.5 });
                }
            }
        }
    }

    #[test]
    fn components_are_pd_with_unit_diagonal() {
        for coupling in [CouplingScheme::Bounded, CouplingScheme::Exhaustive] {
            let s = SimulationScenario { coupling, ..scenario() };
            let cov = build_covariance(&s, &[12; 10], &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
            assert!(!cov.between_counts.is_empty());
            for c in &cov.components {
                assert!(min_eigen(&c.correlation) > 0.0);
                for i in 0..c.features.len() {
                    assert!((c.correlation[(i, i)] - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn bounded_partners() {
        let s = SimulationScenario { coupling_prob: 1.0, max_partners: 2, ..scenario() };
        let cov = build_covariance(&s, &[12; 10], &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut partners = [0; 10];
        for &(g, h) in cov.between_counts.keys() {
            partners[g] += 1;
            partners[h] += 1;
        }
        assert!(partners.iter().all(|&p| p <= 2));
        assert!(cov.components.iter().all(|c| c.groups.len() <= 3));
    }

    #[test]
    fn component_cap_enforced() {
        let s = SimulationScenario {
            coupling: CouplingScheme::Exhaustive,
            coupling_prob: 1.0,
            component_cap: 50,
            ..scenario()
        };
        let err = build_covariance(&s, &[12; 10], &mut ChaCha8Rng::seed_from_u64(6)).unwrap_err();
        assert!(matches!(err, CastError::ComponentTooLarge { size: 120, cap: 50 }));
    }
}

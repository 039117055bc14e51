use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::simulation::covariance::BlockSparseCovariance;
use crate::simulation::scenario::SimulationScenario;
use crate::simulation::signals::SignalMask;
use crate::testing::PhenotypeVector;

/// Feature-by-subject matrix, row-major (`values[f * subjects + s]`).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub features: usize,
    pub subjects: usize,
    pub values: Vec<f64>,
}

impl DataMatrix {
    pub fn row(&self, feature: usize) -> &[f64] {
        &self.values[feature * self.subjects..(feature + 1) * self.subjects]
    }
}

/// Draws every subject from the block multivariate normal. The first
/// `round(gamma_D N)` subjects are cases; masked features are shifted by
/// `effect_size` in cases.
pub fn sample_dataset<R: Rng + ?Sized>(
    scenario: &SimulationScenario,
    covariance: &BlockSparseCovariance,
    mask: &SignalMask,
    rng: &mut R,
) -> (DataMatrix, PhenotypeVector) {
    let n = scenario.subjects;
    let cases = scenario.cases();
    let m = covariance.features();
    let sigma = covariance.sigma;
    let mut values = vec![0.0; m * n];

    for c in &covariance.components {
        let k = c.features.len();
        let z = DMatrix::<f64>::from_fn(k, n, |_, _| rng.sample(StandardNormal));
        let x = match &c.factor {
            Some(l) => l * z,
            None => z,
        };
        for (a, &f) in c.features.iter().enumerate() {
            let shift = if mask.is_signal(f) { scenario.effect_size } else { 0.0 };
            let row = &mut values[f * n..(f + 1) * n];
            for (s, v) in row.iter_mut().enumerate() {
                *v = sigma * x[(a, s)] + if s < cases { shift } else { 0.0 };
            }
        }
    }
    (DataMatrix { features: m, subjects: n, values }, PhenotypeVector::balanced_prefix(n, cases))
}

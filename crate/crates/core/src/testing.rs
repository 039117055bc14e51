//! Per-feature two-sample t-tests feeding the grouped p-value sets.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{CastError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Case,
    Control,
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "case" | "1" => Ok(Label::Case),
            "control" | "0" => Ok(Label::Control),
            other => Err(format!("unknown phenotype label {other:?} (expected case or control)")),
        }
    }
}

/// Case/control labels, one per subject.
#[derive(Debug, Clone, PartialEq)]
pub struct PhenotypeVector {
    labels: Vec<Label>,
}

impl PhenotypeVector {
    pub fn new(labels: Vec<Label>) -> Self {
        PhenotypeVector { labels }
    }

    /// `cases` cases followed by `n - cases` controls.
    pub fn balanced_prefix(n: usize, cases: usize) -> Self {
        let labels = (0..n).map(|i| if i < cases { Label::Case } else { Label::Control }).collect();
        PhenotypeVector { labels }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cases(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Case).count()
    }

    pub fn controls(&self) -> usize {
        self.len() - self.cases()
    }

    pub fn swapped(&self) -> Self {
        let labels = self
            .labels
            .iter()
            .map(|l| match l {
                Label::Case => Label::Control,
                Label::Control => Label::Case,
            })
            .collect();
        PhenotypeVector { labels }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestVariant {
    /// Pooled-variance t with `n1 + n2 - 2` degrees of freedom.
    #[default]
    Pooled,
    /// Welch t with Satterthwaite degrees of freedom.
    Welch,
}

impl FromStr for TestVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pooled" => Ok(TestVariant::Pooled),
            "welch" => Ok(TestVariant::Welch),
            other => Err(format!("unknown test variant {other:?} (expected pooled or welch)")),
        }
    }
}

impl fmt::Display for TestVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestVariant::Pooled => "pooled",
            TestVariant::Welch => "welch",
        })
    }
}

/// Both samples constant: the t statistic is undefined and `p` is fixed by
/// convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Equal constants, `p = 1`.
    ConstantEqual,
    /// Different constants, `p = 0`.
    ConstantUnequal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub degenerate: Option<Degeneracy>,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    if x.iter().all(|&v| v == x[0]) {
        return (x[0], 0.0);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Two-sided p-value of Student's t with `df` degrees of freedom,
/// `P(|T| >= |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2)`.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

pub fn two_sample_pvalue(case: &[f64], control: &[f64], variant: TestVariant) -> Result<TwoSampleTest> {
    for s in [case, control] {
        if s.len() < 2 {
            return Err(CastError::TooFewObservations { needed: 2, got: s.len() });
        }
    }
    let (n1, n2) = (case.len() as f64, control.len() as f64);
    let (m1, v1) = mean_var(case);
    let (m2, v2) = mean_var(control);
    let diff = m1 - m2;

    let (se2, df) = match variant {
        TestVariant::Pooled => {
            let df = n1 + n2 - 2.0;
            let sp = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / df;
            (sp * (1.0 / n1 + 1.0 / n2), df)
        }
        TestVariant::Welch => {
            let (a, b) = (v1 / n1, v2 / n2);
            let se2 = a + b;
            let df = se2 * se2 / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
            (se2, df)
        }
    };

    if se2 <= 0.0 {
        let (p, kind) = if diff == 0.0 {
            (1.0, Degeneracy::ConstantEqual)
        } else {
            log::warn!("both samples constant with different values; p set to 0");
            (0.0, Degeneracy::ConstantUnequal)
        };
        return Ok(TwoSampleTest { t: f64::NAN, df: n1 + n2 - 2.0, p, degenerate: Some(kind) });
    }
    let t = diff / se2.sqrt();
    Ok(TwoSampleTest { t, df, p: student_t_two_sided(t, df), degenerate: None })
}

/// Row-wise two-sample p-values of a feature-by-subject matrix (row-major,
/// `values.len() == rows * phenotype.len()`).
pub fn matrix_pvalues(values: &[f64], phenotype: &PhenotypeVector, variant: TestVariant) -> Result<Vec<f64>> {
    let n = phenotype.len();
    if n == 0 || !values.len().is_multiple_of(n) {
        return Err(CastError::SubjectMismatch(format!(
            "matrix with {} values does not split into rows of {} subjects",
            values.len(),
            n
        )));
    }
    values
        .par_chunks(n)
        .enumerate()
        .map_init(
            || (Vec::with_capacity(n), Vec::with_capacity(n)),
            |(case, control), (row, x)| {
                case.clear();
                control.clear();
                for (&v, &l) in x.iter().zip(phenotype.labels()) {
                    match l {
                        Label::Case => case.push(v),
                        Label::Control => control.push(v),
                    }
                }
                two_sample_pvalue(case, control, variant)
                    .map(|r| r.p)
                    .map_err(|e| CastError::Row { row: row.to_string(), source: Box::new(e) })
            },
        )
        .collect()
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `p` and U(0, 1).
pub fn ks_uniform_statistic(p: &[f64]) -> f64 {
    let mut s = p.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identical_samples() {
        let r = two_sample_pvalue(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], TestVariant::Pooled).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
        let r = two_sample_pvalue(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], TestVariant::Welch).unwrap();
        assert_eq!(r.p, 1.0);
    }

    // Reference values from a 40-digit mpmath evaluation of the regularized
    // incomplete beta function (cross-checked with scipy.stats.ttest_ind).
    #[test]
    fn high_precision_oracle() {
        let case = [2.1, 2.9, 3.0, 2.5];
        let control = [1.0, 1.2, 0.8, 1.1];
        let r = two_sample_pvalue(&case, &control, TestVariant::Pooled).unwrap();
        assert!((r.t - 7.185419410225149560).abs() < 1e-12);
        assert!((r.p - 0.000367352733410917597).abs() < 1e-12);
        let r = two_sample_pvalue(&case, &control, TestVariant::Welch).unwrap();
        assert!((r.df - 4.004618937644341801).abs() < 1e-10);
        assert!((r.p - 0.00197849111932128776).abs() < 1e-12);
    }

    #[test]
    fn t_tail_oracle() {
        assert!((student_t_two_sided(9.5, 298.0) - 7.1987785369754508505e-19).abs() < 1e-28);
        assert!((student_t_two_sided(1.3, 298.0) - 0.19460557875254717462).abs() < 1e-10);
        assert_eq!(student_t_two_sided(f64::INFINITY, 10.0), 0.0);
    }

    #[test]
    fn degenerate_samples() {
        let r = two_sample_pvalue(&[2.0, 2.0], &[2.0, 2.0, 2.0], TestVariant::Pooled).unwrap();
        assert_eq!((r.p, r.degenerate), (1.0, Some(Degeneracy::ConstantEqual)));
        let r = two_sample_pvalue(&[3.0, 3.0], &[2.0, 2.0, 2.0], TestVariant::Welch).unwrap();
        assert_eq!((r.p, r.degenerate), (0.0, Some(Degeneracy::ConstantUnequal)));
        assert!(two_sample_pvalue(&[1.0], &[1.0, 2.0], TestVariant::Pooled).is_err());
    }

    #[test]
    fn matrix_rows() {
        let ph = PhenotypeVector::new(vec![Label::Case, Label::Control, Label::Case, Label::Control]);
        let p = matrix_pvalues(&[1.0, 1.0, 2.0, 2.0], &ph, TestVariant::Pooled).unwrap();
        assert_eq!(p, vec![1.0]);
        let row = [0.3, 1.7, 0.9, 2.2];
        let p = matrix_pvalues(&[row, row].concat(), &ph, TestVariant::Pooled).unwrap();
        assert_eq!(p[0], p[1]);
        assert!(matrix_pvalues(&[1.0, 2.0, 3.0], &ph, TestVariant::Pooled).is_err());
    }

    #[test]
    fn null_pvalues_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 300;
        let ph = PhenotypeVector::balanced_prefix(n, 150);
        let values: Vec<f64> = (0..1000 * n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let p = matrix_pvalues(&values, &ph, TestVariant::Pooled).unwrap();
        let d = ks_uniform_statistic(&p);
        assert!(d < 0.05, "KS statistic {d}");
    }

    #[test]
    fn ks_of_grid() {
        let p: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_uniform_statistic(&p) - 0.005).abs() < 1e-12);
    }

    fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (prop::collection::vec(-3.0f64..3.0, 3..15), prop::collection::vec(-3.0f64..3.0, 3..15))
    }

    proptest! {
        #[test]
        fn label_swap_and_location((a, b) in samples(), shift in -50.0f64..50.0, welch in any::<bool>()) {
            let v = if welch { TestVariant::Welch } else { TestVariant::Pooled };
            let p = two_sample_pvalue(&a, &b, v).unwrap().p;
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((p - two_sample_pvalue(&b, &a, v).unwrap().p).abs() < 1e-12);
            let a2: Vec<f64> = a.iter().map(|x| x + shift).collect();
            let b2: Vec<f64> = b.iter().map(|x| x + shift).collect();
            prop_assert!((p - two_sample_pvalue(&a2, &b2, v).unwrap().p).abs() < 1e-8);
        }

        #[test]
        fn larger_gap_smaller_p((a, b) in samples(), gap in 0.01f64..2.0) {
            // shifting the case sample away from the control sample keeps both variances
            let (m1, _) = mean_var(&a);
            let (m2, _) = mean_var(&b);
            let base: Vec<f64> = a.iter().map(|x| x - m1 + m2).collect();
            let near: Vec<f64> = base.iter().map(|x| x + gap).collect();
            let far: Vec<f64> = base.iter().map(|x| x + 2.0 * gap).collect();
            let p_near = two_sample_pvalue(&near, &b, TestVariant::Pooled).unwrap().p;
            let p_far = two_sample_pvalue(&far, &b, TestVariant::Pooled).unwrap().p;
            prop_assert!(p_far < p_near || p_near == 0.0);
        }
    }
}

//! Replicate metrics (false discovery and true positive proportions) and
//! their Monte Carlo summaries.

use crate::error::{CastError, Result};
use crate::procedures::Method;
use crate::scalar::{count, Real};

/// Per-replicate counts for one method: `R` rejections of which `V` are
/// false and `TP` true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub rejections: usize,
    pub false_rejections: usize,
    pub true_rejections: usize,
}

impl Counts {
    pub fn new(false_rejections: usize, true_rejections: usize) -> Self {
        Counts { rejections: false_rejections + true_rejections, false_rejections, true_rejections }
    }
}

/// False discovery proportion `V / max(R, 1)`.
pub fn fdp<T: Real>(false_rejections: usize, rejections: usize) -> Result<T> {
    if false_rejections > rejections {
        return Err(CastError::CountInconsistency(format!("V = {false_rejections} exceeds R = {rejections}")));
    }
    Ok(count::<T>(false_rejections) / count::<T>(rejections.max(1)))
}

/// True positive proportion `TP / max(M1, 1)`.
pub fn tpp<T: Real>(true_rejections: usize, non_nulls: usize) -> Result<T> {
    if true_rejections > non_nulls {
        return Err(CastError::CountInconsistency(format!("TP = {true_rejections} exceeds M1 = {non_nulls}")));
    }
    Ok(count::<T>(true_rejections) / count::<T>(non_nulls.max(1)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd<T> {
    pub mean: T,
    pub sd: T,
}

/// Sample mean and standard deviation (denominator `n - 1`).
pub fn aggregate<T: Real>(values: &[T]) -> Result<MeanSd<T>> {
    let n = values.len();
    if n < 2 {
        return Err(CastError::TooFewReplicates(n));
    }
    let nt = count::<T>(n);
    let mean = values.iter().copied().sum::<T>() / nt;
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    Ok(MeanSd { mean, sd: (ss / (nt - T::one())).sqrt() })
}

/// Monte Carlo summary of one method at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary<T> {
    pub method: Method,
    pub rejections: MeanSd<T>,
    pub fdr: MeanSd<T>,
    pub tpr: MeanSd<T>,
    /// Fraction of replicates with at least one rejection.
    pub any_rejection: T,
    pub replicates: usize,
}

impl<T: Real> MethodSummary<T> {
    /// Summarises replicate counts against `non_nulls[i]` true signals in
    /// replicate `i`.
    pub fn from_counts(method: Method, counts: &[Counts], non_nulls: &[usize]) -> Result<Self> {
        if counts.len() != non_nulls.len() {
            return Err(CastError::CountInconsistency("one non-null count per replicate required".into()));
        }
        let mut r = Vec::with_capacity(counts.len());
        let mut f = Vec::with_capacity(counts.len());
        let mut t = Vec::with_capacity(counts.len());
        for (c, &m1) in counts.iter().zip(non_nulls) {
            if c.false_rejections + c.true_rejections != c.rejections {
                return Err(CastError::CountInconsistency(format!("V + TP != R in {c:?}")));
            }
            r.push(count::<T>(c.rejections));
            f.push(fdp(c.false_rejections, c.rejections)?);
            t.push(tpp(c.true_rejections, m1)?);
        }
        let any = counts.iter().filter(|c| c.rejections > 0).count();
        Ok(MethodSummary {
            method,
            rejections: aggregate(&r)?,
            fdr: aggregate(&f)?,
            tpr: aggregate(&t)?,
            any_rejection: count::<T>(any) / count::<T>(counts.len()),
            replicates: counts.len(),
        })
    }
}

/// Summaries of every method at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSummary<T> {
    pub methods: Vec<MethodSummary<T>>,
}

impl<T: Real> EvaluationSummary<T> {
    pub fn get(&self, method: Method) -> Option<&MethodSummary<T>> {
        self.methods.iter().find(|m| m.method == method)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fdp_examples() {
        assert_eq!(fdp::<f64>(0, 0).unwrap(), 0.0);
        assert_eq!(fdp::<f64>(3, 10).unwrap(), 0.3);
        assert_eq!(fdp::<f64>(5, 5).unwrap(), 1.0);
        assert!(matches!(fdp::<f64>(4, 3), Err(CastError::CountInconsistency(_))));
    }

    #[test]
    fn tpp_examples() {
        assert_eq!(tpp::<f64>(12, 12).unwrap(), 1.0);
        assert_eq!(tpp::<f64>(0, 0).unwrap(), 0.0);
        assert_eq!(tpp::<f64>(6, 12).unwrap(), 0.5);
        assert!(tpp::<f64>(2, 1).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate(&[0.2f64, 0.4]).unwrap();
        assert!((a.mean - 0.3).abs() < 1e-15);
        assert!((a.sd - 0.02f64.sqrt()).abs() < 1e-15);
        assert_eq!(aggregate(&[0.7; 5]).unwrap().sd, 0.0);
        assert!(matches!(aggregate(&[1.0]), Err(CastError::TooFewReplicates(1))));
    }

    #[test]
    fn summary_from_counts() {
        let counts = [Counts::new(0, 12), Counts::new(2, 10), Counts::new(0, 0)];
        let s = MethodSummary::<f64>::from_counts(Method::LCAST, &counts, &[12, 12, 12]).unwrap();
        assert!((s.rejections.mean - 8.0).abs() < 1e-12);
        assert!((s.fdr.mean - (2.0 / 12.0) / 3.0).abs() < 1e-12);
        assert!((s.tpr.mean - (22.0 / 12.0) / 3.0).abs() < 1e-12);
        assert!((s.any_rejection - 2.0 / 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn mean_between_extremes(v in prop::collection::vec(-100.0f64..100.0, 2..50)) {
            let a = aggregate(&v).unwrap();
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a.mean >= lo - 1e-9 && a.mean <= hi + 1e-9);
            prop_assert!(a.sd >= 0.0);
        }

        #[test]
        fn scale_free(v in 0usize..50, tp in 0usize..50, extra in 0usize..20) {
            let r = v + tp;
            let m1 = tp + extra;
            prop_assert_eq!(fdp::<f64>(v, r).unwrap(), fdp::<f64>(2 * v, 2 * r).unwrap());
            if m1 > 0 {
                prop_assert_eq!(tpp::<f64>(tp, m1).unwrap(), tpp::<f64>(2 * tp, 2 * m1).unwrap());
            }
        }
    }
}

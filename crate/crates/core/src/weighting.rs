//! Objective criterion weights from intuitionistic fuzzy entropy.
//!
//! Each criterion column gets an entropy `E_j` in `[0, 1]`; the weight is
//! `w_j = (1 - E_j) / sum_k (1 - E_k)`. Criterion kind (benefit or cost) does
//! not enter the weights.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::Ifn;

/// Tolerance on `sum(w) == 1` for a validated weight vector.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    Benefit,
    Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub id: String,
    pub name: String,
    pub kind: CriterionKind,
}

impl CriterionSpec {
    pub fn benefit(id: impl Into<String>, name: impl Into<String>) -> Self {
        CriterionSpec {
            id: id.into(),
            name: name.into(),
            kind: CriterionKind::Benefit,
        }
    }

    pub fn cost(id: impl Into<String>, name: impl Into<String>) -> Self {
        CriterionSpec {
            id: id.into(),
            name: name.into(),
            kind: CriterionKind::Cost,
        }
    }
}

/// Non-negative weights summing to one, indexed by criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Strict constructor: weights must already be normalized.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_non_negative(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::BadWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(WeightVector(weights))
    }

    /// Rescale arbitrary non-negative weights with a positive sum.
    ///
    /// Published weight vectors are rounded to four decimals and rarely sum to
    /// exactly one; this is the entry point for user-supplied weights.
    /// Vectors that already sum to one within tolerance are kept unchanged.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        check_non_negative(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() <= WEIGHT_SUM_TOLERANCE {
            return Ok(WeightVector(weights));
        }
        if total <= 0.0 {
            return Err(Error::BadWeights("weights sum to zero".into()));
        }
        Ok(WeightVector(
            weights.into_iter().map(|w| w / total).collect(),
        ))
    }

    /// `n` equal weights.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(WeightVector(vec![1.0 / n as f64; n]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest absolute element-wise difference to a reference vector.
    pub fn max_abs_deviation(&self, reference: &[f64]) -> Result<f64> {
        if reference.len() != self.0.len() {
            return Err(Error::WeightMismatch {
                expected: self.0.len(),
                got: reference.len(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(reference)
            .map(|(w, r)| (w - r).abs())
            .fold(0.0, f64::max))
    }
}

fn check_non_negative(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::EmptyInput);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::BadWeights(
            "weights must be finite and non-negative".into(),
        ));
    }
    Ok(())
}

/// Built-in intuitionistic fuzzy entropy measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMeasure {
    /// `mean [min(mu, nu) + pi] / [max(mu, nu) + pi]`.
    #[default]
    Szmidt,
    /// `mean pi`.
    Burillo,
    /// Logarithmic measure, normalized by `ln 2`.
    Vlachos,
}

impl EntropyMeasure {
    pub const ALL: [EntropyMeasure; 3] = [
        EntropyMeasure::Szmidt,
        EntropyMeasure::Burillo,
        EntropyMeasure::Vlachos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntropyMeasure::Szmidt => "szmidt",
            EntropyMeasure::Burillo => "burillo",
            EntropyMeasure::Vlachos => "vlachos",
        }
    }

    /// Entropy contribution of a single element, in `[0, 1]`.
    pub fn element(self, x: &Ifn) -> f64 {
        let (mu, nu, pi) = (x.mu(), x.nu(), x.hesitation());
        match self {
            EntropyMeasure::Szmidt => {
                let den = mu.max(nu) + pi;
                // mu = nu = 0 gives 0/0: fully uncertain
                if den == 0.0 {
                    1.0
                } else {
                    (mu.min(nu) + pi) / den
                }
            }
            EntropyMeasure::Burillo => pi,
            EntropyMeasure::Vlachos => {
                let xlx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
                let e = -(xlx(mu) + xlx(nu) - xlx(1.0 - pi) - pi * std::f64::consts::LN_2)
                    / std::f64::consts::LN_2;
                e.clamp(0.0, 1.0)
            }
        }
    }
}

impl fmt::Display for EntropyMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntropyMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "szmidt" | "szmidt-kacprzyk" | "sk" => Ok(EntropyMeasure::Szmidt),
            "burillo" | "burillo-bustince" | "bb" => Ok(EntropyMeasure::Burillo),
            "vlachos" | "vlachos-sergiadis" | "vs" => Ok(EntropyMeasure::Vlachos),
            other => Err(Error::Schema(format!("unknown entropy measure '{other}'"))),
        }
    }
}

/// Entropy of one criterion column. Summation runs in row order.
pub fn if_entropy(column: &[Ifn], measure: EntropyMeasure) -> Result<f64> {
    if column.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let sum: f64 = column.iter().map(|x| measure.element(x)).sum();
    Ok((sum / column.len() as f64).clamp(0.0, 1.0))
}

/// Per-criterion entropies of a row-major `m x n` matrix.
pub fn column_entropies(matrix: &[Vec<Ifn>], measure: EntropyMeasure) -> Result<Vec<f64>> {
    let n = matrix.first().map(Vec::len).ok_or(Error::EmptyColumn)?;
    (0..n)
        .map(|j| {
            let column: Vec<Ifn> = matrix.iter().map(|row| row[j]).collect();
            if_entropy(&column, measure)
        })
        .collect()
}

/// `w_j = (1 - E_j) / sum (1 - E_k)`.
pub fn weights_from_entropies(entropies: &[f64]) -> Result<WeightVector> {
    if entropies.is_empty() {
        return Err(Error::EmptyInput);
    }
    let diversity: Vec<f64> = entropies.iter().map(|e| 1.0 - e).collect();
    let total: f64 = diversity.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllCriteriaUninformative);
    }
    WeightVector::new(diversity.iter().map(|d| d / total).collect())
}

/// Entropy weights of a flattened decision matrix.
pub fn entropy_weights(matrix: &[Vec<Ifn>], measure: EntropyMeasure) -> Result<WeightVector> {
    weights_from_entropies(&column_entropies(matrix, measure)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ifn(mu: f64, nu: f64) -> Ifn {
        Ifn::new(mu, nu).unwrap()
    }

    #[test]
    fn entropy_extremes() {
        let c = vec![ifn(0.5, 0.5); 4];
        assert_eq!(if_entropy(&c, EntropyMeasure::Szmidt).unwrap(), 1.0);
        let c = vec![ifn(1.0, 0.0); 2];
        assert_eq!(if_entropy(&c, EntropyMeasure::Szmidt).unwrap(), 0.0);
        assert!(matches!(
            if_entropy(&[], EntropyMeasure::Szmidt),
            Err(Error::EmptyColumn)
        ));
    }

    #[test]
    fn zero_over_zero_is_fully_uncertain() {
        let c = vec![ifn(0.0, 0.0)];
        assert_eq!(if_entropy(&c, EntropyMeasure::Szmidt).unwrap(), 1.0);
        assert_eq!(if_entropy(&c, EntropyMeasure::Burillo).unwrap(), 1.0);
        assert!((if_entropy(&c, EntropyMeasure::Vlachos).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vlachos_bounds() {
        assert!(
            if_entropy(&[ifn(1.0, 0.0)], EntropyMeasure::Vlachos)
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(
            (if_entropy(&[ifn(0.5, 0.5)], EntropyMeasure::Vlachos).unwrap() - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn weights_from_entropy_arithmetic() {
        let w = weights_from_entropies(&[0.5, 0.75]).unwrap();
        assert!((w.as_slice()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.as_slice()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            weights_from_entropies(&[1.0, 1.0]),
            Err(Error::AllCriteriaUninformative)
        ));
    }

    #[test]
    fn permuted_columns_give_equal_weights() {
        let m = vec![
            vec![ifn(0.9, 0.05), ifn(0.4, 0.3)],
            vec![ifn(0.4, 0.3), ifn(0.9, 0.05)],
        ];
        let w = entropy_weights(&m, EntropyMeasure::Szmidt).unwrap();
        assert!((w.as_slice()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightVector::new(vec![0.5, 0.4]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
        let w = WeightVector::normalized(vec![2.0, 2.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 0.5]);
        assert!(WeightVector::normalized(vec![0.0, 0.0]).is_err());
        assert!((w.max_abs_deviation(&[0.4, 0.6]).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn measure_parsing() {
        assert_eq!(
            "szmidt".parse::<EntropyMeasure>().unwrap(),
            EntropyMeasure::Szmidt
        );
        assert_eq!(
            "BB".parse::<EntropyMeasure>().unwrap(),
            EntropyMeasure::Burillo
        );
        assert!("shannon".parse::<EntropyMeasure>().is_err());
    }
}

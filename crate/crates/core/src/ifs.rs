//! Intuitionistic fuzzy numbers (IFNs).
//!
//! An IFN is a pair `(mu, nu)` of membership and non-membership degrees with
//! `mu + nu <= 1`. The slack `1 - mu - nu` is the hesitation degree.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accepted overshoot of `mu + nu` above 1 before construction fails.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Tolerance on `sum(weights) == 1` for weighted aggregation.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIfn", into = "RawIfn")]
pub struct Ifn {
    mu: f64,
    nu: f64,
}

#[derive(Serialize, Deserialize)]
struct RawIfn {
    mu: f64,
    nu: f64,
}

impl TryFrom<RawIfn> for Ifn {
    type Error = Error;

    fn try_from(raw: RawIfn) -> Result<Self> {
        Ifn::new(raw.mu, raw.nu)
    }
}

impl From<Ifn> for RawIfn {
    fn from(x: Ifn) -> Self {
        RawIfn { mu: x.mu, nu: x.nu }
    }
}

impl Ifn {
    /// Validating constructor.
    ///
    /// A sum overshoot of at most [`SUM_TOLERANCE`] is absorbed by clamping
    /// `nu` down to `1 - mu`.
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !mu.is_finite()
            || !nu.is_finite()
            || !(0.0..=1.0).contains(&mu)
            || !(0.0..=1.0).contains(&nu)
        {
            return Err(Error::OutOfRange { mu, nu });
        }
        let sum = mu + nu;
        if sum > 1.0 + SUM_TOLERANCE {
            return Err(Error::SumExceedsOne { mu, nu });
        }
        let nu = if sum > 1.0 { 1.0 - mu } else { nu };
        Ok(Ifn { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Hesitation degree `1 - mu - nu`.
    pub fn hesitation(&self) -> f64 {
        (1.0 - self.mu - self.nu).max(0.0)
    }

    /// Score function `mu - nu`, in `[-1, 1]`.
    pub fn score(&self) -> f64 {
        self.mu - self.nu
    }

    /// Accuracy function `mu + nu`, in `[0, 1]`.
    pub fn accuracy(&self) -> f64 {
        self.mu + self.nu
    }

    /// Total order: score, then accuracy, then membership.
    pub fn total_cmp(&self, other: &Ifn) -> Ordering {
        self.score()
            .total_cmp(&other.score())
            .then_with(|| self.accuracy().total_cmp(&other.accuracy()))
            .then_with(|| self.mu.total_cmp(&other.mu))
    }

    /// Normalized Hamming distance over `(mu, nu, pi)`, in `[0, 1]`.
    pub fn distance(&self, other: &Ifn) -> f64 {
        ((self.mu - other.mu).abs()
            + (self.nu - other.nu).abs()
            + (self.hesitation() - other.hesitation()).abs())
            / 2.0
    }
}

/// A non-empty set of plausible IFN evaluations for one decision cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Ifn>", into = "Vec<Ifn>")]
pub struct HesitantIfn {
    elements: Vec<Ifn>,
}

impl TryFrom<Vec<Ifn>> for HesitantIfn {
    type Error = Error;

    fn try_from(elements: Vec<Ifn>) -> Result<Self> {
        HesitantIfn::new(elements)
    }
}

impl From<HesitantIfn> for Vec<Ifn> {
    fn from(h: HesitantIfn) -> Self {
        h.elements
    }
}

impl From<Ifn> for HesitantIfn {
    fn from(x: Ifn) -> Self {
        HesitantIfn { elements: vec![x] }
    }
}

impl HesitantIfn {
    pub fn new(elements: Vec<Ifn>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(HesitantIfn { elements })
    }

    pub fn elements(&self) -> &[Ifn] {
        &self.elements
    }

    /// Collapse to a single IFN: a singleton yields its element, larger sets
    /// the equal-weight IFWA of their elements.
    pub fn flatten(&self) -> Ifn {
        match self.elements.as_slice() {
            [single] => *single,
            many => {
                let w = vec![1.0 / many.len() as f64; many.len()];
                ifwa_aggregate(many, &w).expect("equal weights over a non-empty set are valid")
            }
        }
    }
}

/// Intuitionistic fuzzy weighted averaging:
/// `(1 - prod (1 - mu_k)^w_k, prod nu_k^w_k)`.
pub fn ifwa_aggregate(values: &[Ifn], weights: &[f64]) -> Result<Ifn> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.len() != weights.len() {
        return Err(Error::WeightMismatch {
            expected: values.len(),
            got: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::BadWeights(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::BadWeights(format!(
            "weights sum to {total}, expected 1"
        )));
    }

    let mut keep_mu = 1.0;
    let mut nu = 1.0;
    for (x, &w) in values.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        keep_mu *= (1.0 - x.mu).powf(w);
        nu *= x.nu.powf(w);
    }
    let mu = 1.0 - keep_mu;

    // Powers of values in [0, 1] can drift by an ulp; pin the result into the
    // hull of the inputs so boundedness holds exactly.
    let (lo_mu, hi_mu) = hull(
        values
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, _)| x.mu),
    );
    let (lo_nu, hi_nu) = hull(
        values
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, _)| x.nu),
    );
    let mu = mu.clamp(lo_mu, hi_mu);
    let nu = nu.clamp(lo_nu, hi_nu).min(1.0 - mu);
    Ifn::new(mu, nu)
}

fn hull(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

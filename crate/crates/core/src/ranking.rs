//! Entropy-EDAS-MARCOS ranking.
//!
//! The pipeline flattens every hesitant cell to one IFN, obtains criterion
//! weights (supplied or entropy-derived), scores each alternative by its
//! weighted positive and negative distances from the per-criterion average
//! (EDAS) and finally maps the appraisal scores to compromise utilities
//! relative to the best and worst alternative (MARCOS).
//!
//! The EDAS stage follows the textbook simplification: `S = PDAS / (PDAS + NDAS)`
//! with no normalization by the maximum PDAS/NDAS, and MARCOS uses the ideal
//! and anti-ideal taken over the alternative set only.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{HesitantIfn, Ifn};
use crate::weighting::{self, CriterionKind, CriterionSpec, EntropyMeasure, WeightVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    alternatives: Vec<String>,
    criteria: Vec<CriterionSpec>,
    cells: Vec<Vec<HesitantIfn>>,
    weights: Option<WeightVector>,
}

impl DecisionProblem {
    pub fn new(
        alternatives: Vec<String>,
        criteria: Vec<CriterionSpec>,
        cells: Vec<Vec<HesitantIfn>>,
        weights: Option<WeightVector>,
    ) -> Result<Self> {
        if alternatives.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 alternatives, got {}",
                alternatives.len()
            )));
        }
        if criteria.is_empty() {
            return Err(Error::InvalidProblem("need at least 1 criterion".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = criteria.iter().find(|c| !seen.insert(c.id.as_str())) {
            return Err(Error::InvalidProblem(format!(
                "duplicate criterion id '{}'",
                dup.id
            )));
        }
        if cells.len() != alternatives.len() {
            return Err(Error::InvalidProblem(format!(
                "{} alternatives but {} matrix rows",
                alternatives.len(),
                cells.len()
            )));
        }
        if let Some((i, row)) = cells
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != criteria.len())
        {
            return Err(Error::InvalidProblem(format!(
                "row {i} has {} cells, expected {}",
                row.len(),
                criteria.len()
            )));
        }
        if let Some(w) = &weights {
            if w.len() != criteria.len() {
                return Err(Error::WeightMismatch {
                    expected: criteria.len(),
                    got: w.len(),
                });
            }
        }
        Ok(DecisionProblem {
            alternatives,
            criteria,
            cells,
            weights,
        })
    }

    /// Convenience constructor for singleton cells.
    pub fn from_ifns(
        alternatives: Vec<String>,
        criteria: Vec<CriterionSpec>,
        cells: Vec<Vec<Ifn>>,
    ) -> Result<Self> {
        let cells = cells
            .into_iter()
            .map(|row| row.into_iter().map(HesitantIfn::from).collect())
            .collect();
        Self::new(alternatives, criteria, cells, None)
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[CriterionSpec] {
        &self.criteria
    }

    pub fn cells(&self) -> &[Vec<HesitantIfn>] {
        &self.cells
    }

    pub fn weights(&self) -> Option<&WeightVector> {
        self.weights.as_ref()
    }

    pub fn with_weights(mut self, weights: WeightVector) -> Result<Self> {
        if weights.len() != self.criteria.len() {
            return Err(Error::WeightMismatch {
                expected: self.criteria.len(),
                got: weights.len(),
            });
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn kinds(&self) -> Vec<CriterionKind> {
        self.criteria.iter().map(|c| c.kind).collect()
    }

    /// Row-major matrix of flattened cells.
    pub fn flattened(&self) -> Vec<Vec<Ifn>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(HesitantIfn::flatten).collect())
            .collect()
    }
}

/// How a cell is compared with its column average in the EDAS stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdasVariant {
    /// Deviation of the membership degree.
    #[default]
    Membership,
    /// Deviation of the rescaled score `(mu - nu + 1) / 2`.
    Score,
    /// Normalized Hamming distance to the average IFN, signed by the IFN
    /// total order.
    Distance,
}

impl EdasVariant {
    pub fn name(self) -> &'static str {
        match self {
            EdasVariant::Membership => "membership",
            EdasVariant::Score => "score",
            EdasVariant::Distance => "distance",
        }
    }
}

impl fmt::Display for EdasVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdasVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "membership" | "mu" => Ok(EdasVariant::Membership),
            "score" => Ok(EdasVariant::Score),
            "distance" | "hamming" => Ok(EdasVariant::Distance),
            other => Err(Error::Schema(format!("unknown EDAS variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdasScores {
    pub variant: EdasVariant,
    pub averages: Vec<Ifn>,
    pub pda: Vec<Vec<f64>>,
    pub nda: Vec<Vec<f64>>,
    pub pdas: Vec<f64>,
    pub ndas: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarcosResult {
    pub i_star: f64,
    pub i_minus: f64,
    pub k_plus: Vec<f64>,
    pub k_minus: Vec<f64>,
    pub u: Vec<f64>,
    /// Alternative indices, best first.
    pub order: Vec<usize>,
    /// 1-based rank of each alternative, in input order.
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSource {
    Supplied,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub alternatives: Vec<String>,
    pub criteria: Vec<String>,
    pub weight_source: WeightSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_measure: Option<EntropyMeasure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropies: Option<Vec<f64>>,
    pub weights: WeightVector,
    pub edas: EdasScores,
    pub marcos: MarcosResult,
}

#[derive(Debug, Clone, Default)]
pub struct RankOptions {
    pub variant: EdasVariant,
    pub measure: EntropyMeasure,
    /// Overrides both the problem's own weights and entropy weighting.
    pub weights: Option<WeightVector>,
}

/// Column means of `mu` and of `nu`.
pub fn average_solution(matrix: &[Vec<Ifn>]) -> Result<Vec<Ifn>> {
    let m = matrix.len();
    let n = matrix.first().map(Vec::len).ok_or(Error::EmptyInput)?;
    (0..n)
        .map(|j| {
            let (mut mu, mut nu) = (0.0, 0.0);
            for row in matrix {
                mu += row[j].mu();
                nu += row[j].nu();
            }
            Ifn::new(mu / m as f64, nu / m as f64)
        })
        .collect()
}

/// Signed deviation of a cell from its column average under `variant`.
/// Positive means the cell is better than average on a benefit criterion.
fn deviation(x: &Ifn, avg: &Ifn, variant: EdasVariant) -> f64 {
    match variant {
        EdasVariant::Membership => x.mu() - avg.mu(),
        EdasVariant::Score => (x.score() - avg.score()) / 2.0,
        EdasVariant::Distance => match x.total_cmp(avg) {
            Ordering::Greater => x.distance(avg),
            Ordering::Less => -x.distance(avg),
            Ordering::Equal => 0.0,
        },
    }
}

/// Row-major `(PDA, NDA)` matrices.
pub type DistanceMatrices = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Positive and negative distances from the average solution.
pub fn pda_nda(
    matrix: &[Vec<Ifn>],
    averages: &[Ifn],
    kinds: &[CriterionKind],
    variant: EdasVariant,
) -> Result<DistanceMatrices> {
    if averages.len() != kinds.len() || matrix.iter().any(|r| r.len() != kinds.len()) {
        return Err(Error::InvalidProblem(
            "matrix, averages and criterion kinds disagree in width".into(),
        ));
    }
    let mut pda = Vec::with_capacity(matrix.len());
    let mut nda = Vec::with_capacity(matrix.len());
    for row in matrix {
        let mut p = Vec::with_capacity(row.len());
        let mut q = Vec::with_capacity(row.len());
        for ((x, avg), kind) in row.iter().zip(averages).zip(kinds) {
            let d = match kind {
                CriterionKind::Benefit => deviation(x, avg, variant),
                CriterionKind::Cost => -deviation(x, avg, variant),
            };
            p.push(d.max(0.0));
            q.push((-d).max(0.0));
        }
        pda.push(p);
        nda.push(q);
    }
    Ok((pda, nda))
}

/// Weighted sums `PDAS`, `NDAS` and appraisal scores `S = PDAS / (PDAS + NDAS)`.
///
/// An alternative sitting exactly on the average everywhere gets `S = 0.5`.
pub fn appraisal_scores(
    pda: &[Vec<f64>],
    nda: &[Vec<f64>],
    weights: &WeightVector,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let w = weights.as_slice();
    if pda.len() != nda.len() || pda.iter().chain(nda).any(|r| r.len() != w.len()) {
        return Err(Error::WeightMismatch {
            expected: pda.first().map_or(0, Vec::len),
            got: w.len(),
        });
    }
    let weighted = |row: &Vec<f64>| -> f64 { row.iter().zip(w).map(|(d, w)| d * w).sum() };
    let pdas: Vec<f64> = pda.iter().map(weighted).collect();
    let ndas: Vec<f64> = nda.iter().map(weighted).collect();
    let s = pdas
        .iter()
        .zip(&ndas)
        .map(|(&p, &n)| if p + n == 0.0 { 0.5 } else { p / (p + n) })
        .collect();
    Ok((pdas, ndas, s))
}

/// Full EDAS stage on a flattened matrix.
pub fn edas(
    matrix: &[Vec<Ifn>],
    kinds: &[CriterionKind],
    weights: &WeightVector,
    variant: EdasVariant,
) -> Result<EdasScores> {
    let averages = average_solution(matrix)?;
    let (pda, nda) = pda_nda(matrix, &averages, kinds, variant)?;
    let (pdas, ndas, s) = appraisal_scores(&pda, &nda, weights)?;
    Ok(EdasScores {
        variant,
        averages,
        pda,
        nda,
        pdas,
        ndas,
        s,
    })
}

/// MARCOS utilities `U = (K+ + 1 - K-) / 2` with `K+ = S / I*`, `K- = I- / S`.
///
/// Ranks follow descending `U`, then descending `S`, then input order.
pub fn marcos_utilities(s: &[f64]) -> Result<MarcosResult> {
    if s.len() < 2 {
        return Err(Error::InvalidProblem(format!(
            "need at least 2 scores, got {}",
            s.len()
        )));
    }
    if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidProblem(
            "appraisal scores must be finite and non-negative".into(),
        ));
    }
    let i_star = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let i_minus = s.iter().copied().fold(f64::INFINITY, f64::min);
    if i_star == 0.0 {
        return Err(Error::DegenerateScores);
    }
    let k_plus: Vec<f64> = s.iter().map(|v| v / i_star).collect();
    // a zero score is its own anti-ideal
    let k_minus: Vec<f64> = s
        .iter()
        .map(|&v| if v == 0.0 { 1.0 } else { i_minus / v })
        .collect();
    let u: Vec<f64> = k_plus
        .iter()
        .zip(&k_minus)
        .map(|(kp, km)| (kp + (1.0 - km)) / 2.0)
        .collect();

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| {
        u[b].total_cmp(&u[a])
            .then_with(|| s[b].total_cmp(&s[a]))
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0; s.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    Ok(MarcosResult {
        i_star,
        i_minus,
        k_plus,
        k_minus,
        u,
        order,
        ranks,
    })
}

/// End-to-end ranking of a decision problem.
pub fn rank(problem: &DecisionProblem, options: &RankOptions) -> Result<RankingResult> {
    let matrix = problem.flattened();
    let (weights, weight_source, entropy_measure, entropies) =
        match options.weights.as_ref().or(problem.weights()) {
            Some(w) => {
                if w.len() != problem.criteria().len() {
                    return Err(Error::WeightMismatch {
                        expected: problem.criteria().len(),
                        got: w.len(),
                    });
                }
                (w.clone(), WeightSource::Supplied, None, None)
            }
            None => {
                let e = weighting::column_entropies(&matrix, options.measure)?;
                let w = weighting::weights_from_entropies(&e)?;
                (w, WeightSource::Entropy, Some(options.measure), Some(e))
            }
        };
    let edas = edas(&matrix, &problem.kinds(), &weights, options.variant)?;
    let marcos = marcos_utilities(&edas.s)?;
    Ok(RankingResult {
        alternatives: problem.alternatives().to_vec(),
        criteria: problem.criteria().iter().map(|c| c.id.clone()).collect(),
        weight_source,
        entropy_measure,
        entropies,
        weights,
        edas,
        marcos,
    })
}

//! Straight-line reference implementations shared by the integration tests.
//! They work on plain tuples and vectors and call nothing from the library
//! beyond constructors.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;

/// `(mu, nu)` pair as used by the oracles.
pub type Pair = (f64, f64);

pub struct EdasOracle {
    pub pda: Vec<Vec<f64>>,
    pub nda: Vec<Vec<f64>>,
    pub pdas: Vec<f64>,
    pub ndas: Vec<f64>,
    pub s: Vec<f64>,
}

/// Membership-only EDAS on a row-major `(mu, nu)` matrix.
pub fn edas_oracle(x: &[Vec<Pair>], benefit: &[bool], w: &[f64]) -> EdasOracle {
    let m = x.len();
    let n = x[0].len();
    let mut avg = vec![0.0; n];
    for j in 0..n {
        let mut total = 0.0;
        for i in 0..m {
            total += x[i][j].0;
        }
        avg[j] = total / m as f64;
    }
    let mut pda = vec![vec![0.0; n]; m];
    let mut nda = vec![vec![0.0; n]; m];
    for i in 0..m {
        for j in 0..n {
            let d = x[i][j].0 - avg[j];
            if benefit[j] {
                pda[i][j] = if d > 0.0 { d } else { 0.0 };
                nda[i][j] = if d < 0.0 { -d } else { 0.0 };
            } else {
                pda[i][j] = if d < 0.0 { -d } else { 0.0 };
                nda[i][j] = if d > 0.0 { d } else { 0.0 };
            }
        }
    }
    let mut pdas = vec![0.0; m];
    let mut ndas = vec![0.0; m];
    let mut s = vec![0.0; m];
    for i in 0..m {
        for j in 0..n {
            pdas[i] += w[j] * pda[i][j];
            ndas[i] += w[j] * nda[i][j];
        }
        s[i] = if pdas[i] + ndas[i] == 0.0 {
            0.5
        } else {
            pdas[i] / (pdas[i] + ndas[i])
        };
    }
    EdasOracle {
        pda,
        nda,
        pdas,
        ndas,
        s,
    }
}

/// MARCOS utilities computed directly from the defining formulas.
pub fn marcos_oracle(s: &[f64]) -> Vec<f64> {
    let best = s.iter().cloned().fold(f64::MIN, f64::max);
    let worst = s.iter().cloned().fold(f64::MAX, f64::min);
    s.iter()
        .map(|&v| {
            let kp = v / best;
            let km = if v == 0.0 { 1.0 } else { worst / v };
            (kp + 1.0 - km) / 2.0
        })
        .collect()
}

pub fn random_pair<R: Rng>(rng: &mut R) -> Pair {
    let mu: f64 = rng.random();
    let nu: f64 = rng.random::<f64>() * (1.0 - mu);
    (mu, nu)
}

/// Random simplex weights of length `n`.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Brute-force KNN imputer: for every missing cell, z-score every column from
/// scratch, compute RMS distance to every other row over the mutually observed
/// columns, sort all rows by (distance, index) and average the first `k`
/// that observe the target column.
pub fn knn_oracle(rows: &[Vec<Option<f64>>], k: usize) -> Vec<Vec<Option<f64>>> {
    let m = rows.len();
    let n = rows[0].len();
    let z = |i: usize, j: usize| -> Option<f64> {
        let present: Vec<f64> = (0..m).filter_map(|r| rows[r][j]).collect();
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        let var = present.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / present.len() as f64;
        let sd = var.sqrt();
        rows[i][j].map(|v| if sd == 0.0 { 0.0 } else { (v - mean) / sd })
    };
    let mut out = rows.to_vec();
    for i in 0..m {
        for j in 0..n {
            if rows[i][j].is_some() {
                continue;
            }
            let mut cand = Vec::new();
            for r in 0..m {
                if r == i || rows[r][j].is_none() {
                    continue;
                }
                let mut ss = 0.0;
                let mut shared = 0;
                for c in 0..n {
                    if let (Some(a), Some(b)) = (z(i, c), z(r, c)) {
                        ss += (a - b) * (a - b);
                        shared += 1;
                    }
                }
                if shared > 0 {
                    cand.push(((ss / shared as f64).sqrt(), r));
                }
            }
            cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let fill: f64 = cand[..k]
                .iter()
                .map(|&(_, r)| rows[r][j].unwrap())
                .sum::<f64>()
                / k as f64;
            out[i][j] = Some(fill);
        }
    }
    out
}

//! Feature panels with explicit missingness: normalization and KNN
//! imputation.
//!
//! CSV layout: `entity,period,<name>[unit],...`; an empty field is a missing
//! value.

use serde::Serialize;

use super::canonical::canonical_number;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnSpec {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl ColumnSpec {
    fn parse(header: &str) -> Self {
        match header.strip_suffix(']').and_then(|h| h.split_once('[')) {
            Some((name, unit)) => ColumnSpec {
                name: name.trim().to_string(),
                unit: Some(unit.to_string()),
            },
            None => ColumnSpec {
                name: header.trim().to_string(),
                unit: None,
            },
        }
    }

    pub fn header(&self) -> String {
        match &self.unit {
            Some(u) => format!("{}[{u}]", self.name),
            None => self.name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowId {
    pub entity: String,
    pub period: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureTable {
    columns: Vec<ColumnSpec>,
    ids: Vec<RowId>,
    values: Vec<Vec<Option<f64>>>,
}

impl FeatureTable {
    pub fn new(
        columns: Vec<ColumnSpec>,
        ids: Vec<RowId>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if ids.len() != values.len() {
            return Err(Error::Schema(format!(
                "{} row ids for {} rows",
                ids.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|r| r.len() != columns.len()) {
            return Err(Error::Schema(format!(
                "row {i} has {} values, expected {}",
                values[i].len(),
                columns.len()
            )));
        }
        if values.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Schema("feature values must be finite".into()));
        }
        Ok(FeatureTable {
            columns,
            ids,
            values,
        })
    }

    /// Unnamed table, convenient for tests and benches.
    pub fn from_rows(values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let width = values.first().map_or(0, Vec::len);
        let columns = (0..width)
            .map(|j| ColumnSpec {
                name: format!("x{j}"),
                unit: None,
            })
            .collect();
        let ids = (0..values.len())
            .map(|i| RowId {
                entity: format!("row{i}"),
                period: String::new(),
            })
            .collect();
        Self::new(columns, ids, values)
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn ids(&self) -> &[RowId] {
        &self.ids
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|r| r[j]).collect()
    }

    fn set_column(&mut self, j: usize, col: &[Option<f64>]) {
        for (row, v) in self.values.iter_mut().zip(col) {
            row[j] = *v;
        }
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "entity" || &headers[1] != "period" {
            return Err(Error::Schema(
                "panel header must start with 'entity,period'".into(),
            ));
        }
        let columns: Vec<ColumnSpec> = headers.iter().skip(2).map(ColumnSpec::parse).collect();
        let mut ids = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line());
            ids.push(RowId {
                entity: rec[0].to_string(),
                period: rec[1].to_string(),
            });
            let row = rec
                .iter()
                .skip(2)
                .map(|f| {
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        f.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .map(Some)
                            .ok_or_else(|| Error::parse(line, format!("'{f}' is not a number")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Self::new(columns, ids, values)
    }

    pub fn load(spec: &str) -> Result<Self> {
        Self::parse_csv(&super::read_source(spec)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["entity".to_string(), "period".to_string()];
        header.extend(self.columns.iter().map(ColumnSpec::header));
        w.write_record(&header)?;
        for (id, row) in self.ids.iter().zip(&self.values) {
            let mut rec = vec![id.entity.clone(), id.period.clone()];
            rec.extend(
                row.iter()
                    .map(|v| v.map(canonical_number).unwrap_or_default()),
            );
            w.write_record(&rec)?;
        }
        super::records::finish(w)
    }
}

/// Z-scored column; `constant` flags a zero-variance input mapped to zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScored {
    pub values: Vec<Option<f64>>,
    pub constant: bool,
}

/// Population mean and standard deviation of the present values.
fn moments(column: &[Option<f64>]) -> Option<(f64, f64, usize)> {
    let present: Vec<f64> = column.iter().flatten().copied().collect();
    if present.is_empty() {
        return None;
    }
    let n = present.len() as f64;
    let mean = present.iter().sum::<f64>() / n;
    let var = present.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt(), present.len()))
}

/// `(x - mean) / std` with the population denominator. Missing entries stay
/// missing; a constant column becomes zeros with the `constant` flag set.
pub fn zscore_normalize(column: &[Option<f64>]) -> Result<ZScored> {
    let (mean, std, n) = moments(column).ok_or(Error::TooFewValues(0))?;
    if n < 2 {
        return Err(Error::TooFewValues(n));
    }
    let constant = std == 0.0;
    let values = column
        .iter()
        .map(|v| v.map(|x| if constant { 0.0 } else { (x - mean) / std }))
        .collect();
    Ok(ZScored { values, constant })
}

/// Affine map sending the column minimum to `lo` and maximum to `hi`.
pub fn minmax_scale(column: &[Option<f64>], lo: f64, hi: f64) -> Result<Vec<Option<f64>>> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::BadRange { lo, hi });
    }
    let present: Vec<f64> = column.iter().flatten().copied().collect();
    let min = present.iter().copied().fold(f64::INFINITY, f64::min);
    let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if present.is_empty() || min == max {
        return Err(Error::ConstantColumn);
    }
    Ok(column
        .iter()
        .map(|v| {
            v.map(|x| {
                // endpoints exactly, so a second pass is the identity
                if x == min {
                    lo
                } else if x == max {
                    hi
                } else {
                    lo + (x - min) * (hi - lo) / (max - min)
                }
            })
        })
        .collect())
}

/// Z-score every column; returns the names of constant columns.
pub fn zscore_table(table: &FeatureTable) -> Result<(FeatureTable, Vec<String>)> {
    let mut out = table.clone();
    let mut constant = Vec::new();
    for j in 0..table.columns.len() {
        let z = zscore_normalize(&table.column(j))?;
        if z.constant {
            constant.push(table.columns[j].name.clone());
        }
        out.set_column(j, &z.values);
    }
    Ok((out, constant))
}

pub fn minmax_table(table: &FeatureTable, lo: f64, hi: f64) -> Result<FeatureTable> {
    let mut out = table.clone();
    for j in 0..table.columns.len() {
        out.set_column(j, &minmax_scale(&table.column(j), lo, hi)?);
    }
    Ok(out)
}

/// Fill each missing cell with the mean of its column over the `k` nearest
/// rows.
///
/// Distances are computed on z-scored columns, using only the columns
/// observed in both rows, as `sqrt(sum d^2 / shared)`. Candidates must have
/// the target column observed and share at least one column with the row.
/// Ties go to the lower row index. All fills read the original table, so the
/// result does not depend on fill order.
pub fn knn_impute(table: &FeatureTable, k: usize) -> Result<FeatureTable> {
    if k == 0 {
        return Err(Error::NotEnoughNeighbors {
            row: 0,
            column: String::new(),
            found: 0,
            k,
        });
    }
    if table.missing_count() == 0 {
        return Ok(table.clone());
    }
    let width = table.columns.len();
    let mut scaled: Vec<Vec<Option<f64>>> = vec![vec![None; width]; table.values.len()];
    for (j, spec) in table.columns.iter().enumerate() {
        let col = table.column(j);
        let (mean, std, _) =
            moments(&col).ok_or_else(|| Error::AllMissingColumn(spec.name.clone()))?;
        for (row, v) in scaled.iter_mut().zip(&col) {
            row[j] = v.map(|x| if std == 0.0 { 0.0 } else { (x - mean) / std });
        }
    }

    let mut out = table.clone();
    for (i, row) in table.values.iter().enumerate() {
        let targets: Vec<usize> = (0..width).filter(|&j| row[j].is_none()).collect();
        if targets.is_empty() {
            continue;
        }
        let distances: Vec<Option<f64>> = scaled
            .iter()
            .enumerate()
            .map(|(r, other)| {
                if r == i {
                    return None;
                }
                let mut ss = 0.0;
                let mut shared = 0usize;
                for (a, b) in scaled[i].iter().zip(other) {
                    if let (Some(a), Some(b)) = (a, b) {
                        ss += (a - b) * (a - b);
                        shared += 1;
                    }
                }
                (shared > 0).then(|| (ss / shared as f64).sqrt())
            })
            .collect();

        for j in targets {
            let mut candidates: Vec<(f64, usize)> = distances
                .iter()
                .enumerate()
                .filter_map(|(r, d)| d.filter(|_| table.values[r][j].is_some()).map(|d| (d, r)))
                .collect();
            if candidates.len() < k {
                return Err(Error::NotEnoughNeighbors {
                    row: i,
                    column: table.columns[j].name.clone(),
                    found: candidates.len(),
                    k,
                });
            }
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let fill = candidates[..k]
                .iter()
                .map(|&(_, r)| table.values[r][j].expect("candidate observed"))
                .sum::<f64>()
                / k as f64;
            out.values[i][j] = Some(fill);
        }
    }
    Ok(out)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureKind, FeatureSchema, Task};

/// How semantic features expand into encoded columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoder {
    schema: FeatureSchema,
    /// Encoded column → semantic feature index.
    column_feature: Vec<usize>,
}

impl Encoder {
    pub fn new(schema: &FeatureSchema) -> Encoder {
        let mut column_feature = Vec::new();
        for (j, f) in schema.features().iter().enumerate() {
            let width = match f.kind {
                FeatureKind::Categorical => f.kind.cardinality().unwrap_or(1),
                _ => 1,
            };
            column_feature.extend(std::iter::repeat_n(j, width));
        }
        Encoder {
            schema: schema.clone(),
            column_feature,
        }
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn n_columns(&self) -> usize {
        self.column_feature.len()
    }

    pub fn column_feature(&self) -> &[usize] {
        &self.column_feature
    }

    /// Appends the encoded form of one semantic row to `out`.
    pub fn encode_into(&self, values: &[f64], out: &mut Vec<f64>) -> Result<()> {
        if values.len() != self.schema.len() {
            return Err(Error::invalid(format!(
                "row has {} features, schema expects {}",
                values.len(),
                self.schema.len()
            )));
        }
        for (f, &v) in self.schema.features().iter().zip(values) {
            if !v.is_finite() {
                return Err(Error::Numerical(format!("non-finite value for {}", f.name)));
            }
            match f.kind {
                FeatureKind::Categorical => {
                    let card = f.kind.cardinality().unwrap_or(1);
                    if v < 0.0 || v.fract() != 0.0 || v as usize >= card {
                        return Err(Error::invalid(format!(
                            "category code {v} out of range for {}",
                            f.name
                        )));
                    }
                    let at = out.len();
                    out.resize(at + card, 0.0);
                    out[at + v as usize] = 1.0;
                }
                _ => out.push(v),
            }
        }
        Ok(())
    }

    pub fn encode(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.n_columns());
        self.encode_into(values, &mut out)?;
        Ok(out)
    }
}

/// Row-major numeric matrix with labels, ready for the learners.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub encoder: Encoder,
    pub x: Vec<f64>,
    pub y: Vec<usize>,
    pub n_rows: usize,
    pub n_cols: usize,
    pub n_classes: usize,
}

impl EncodedDataset {
    pub fn from_dataset(d: &Dataset, task: Task) -> Result<EncodedDataset> {
        let encoder = Encoder::new(&d.schema);
        let n_cols = encoder.n_columns();
        let mut x = Vec::with_capacity(d.len() * n_cols);
        for r in &d.rows {
            encoder.encode_into(&r.values, &mut x)?;
        }
        Ok(EncodedDataset {
            encoder,
            x,
            y: d.labels(task),
            n_rows: d.len(),
            n_cols,
            n_classes: task.n_classes(),
        })
    }

    /// Plain numeric matrix, every column its own feature.
    pub fn from_matrix(rows: &[Vec<f64>], y: Vec<usize>, n_classes: usize) -> Result<EncodedDataset> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.len() != y.len() {
            return Err(Error::invalid("row and label counts differ"));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("ragged matrix"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite feature value".into()));
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::invalid(format!("label {bad} out of range")));
        }
        let schema = FeatureSchema::new(
            (0..n_cols)
                .map(|j| crate::features::FeatureDescriptor {
                    name: format!("x{j}"),
                    family: crate::features::Family::Project,
                    kind: FeatureKind::Numeric,
                })
                .collect(),
        );
        Ok(EncodedDataset {
            encoder: Encoder::new(&schema),
            x: rows.concat(),
            y,
            n_rows: rows.len(),
            n_cols,
            n_classes,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.y, self.n_classes)
    }

    /// Subset of rows, in the given order.
    pub fn take(&self, idx: &[usize]) -> EncodedDataset {
        let mut x = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            x.extend_from_slice(self.row(i));
        }
        EncodedDataset {
            encoder: self.encoder.clone(),
            x,
            y: idx.iter().map(|&i| self.y[i]).collect(),
            n_rows: idx.len(),
            n_cols: self.n_cols,
            n_classes: self.n_classes,
        }
    }
}

pub fn class_counts(y: &[usize], n_classes: usize) -> Vec<usize> {
    let mut c = vec![0; n_classes];
    for &l in y {
        c[l] += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::DatasetConfig;

    #[test]
    fn category_expands_to_one_hot() {
        let schema = FeatureSchema::for_config(DatasetConfig::Static);
        let enc = Encoder::new(&schema);
        assert_eq!(enc.n_columns(), 39 - 1 + 15);
        let mut row = vec![0.0; 39];
        row[0] = 3.0;
        let e = enc.encode(&row).unwrap();
        assert_eq!(&e[..15], &[0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.]);
        assert!(enc.column_feature()[..15].iter().all(|&f| f == 0));
        assert_eq!(enc.column_feature()[15], 1);
        row[0] = 15.0;
        assert!(enc.encode(&row).is_err());
        row[0] = 0.0;
        row[4] = f64::NAN;
        assert!(enc.encode(&row).is_err());
        assert!(enc.encode(&row[..10]).is_err());
    }
}

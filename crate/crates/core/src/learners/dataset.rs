use std::borrow::Cow;
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Row-major feature matrix with one target per row.
///
/// Datasets are append-only. A column-major copy with per-feature sort order
/// can be kept up to date incrementally with [`Dataset::update_index`]; tree
/// learners reuse it instead of re-sorting on every fit.
#[derive(Debug, Clone)]
pub struct Dataset {
    n_features: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    index: Option<ColumnIndex>,
}

impl Dataset {
    pub fn new(n_features: usize) -> Self {
        Dataset {
            n_features,
            x: Vec::new(),
            y: Vec::new(),
            index: None,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], targets: &[f64]) -> Result<Self> {
        if rows.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                actual: targets.len(),
            });
        }
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let mut ds = Dataset::new(first.len());
        for (r, t) in rows.iter().zip(targets) {
            ds.push(r, *t)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, row: &[f64], target: f64) -> Result<()> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) || !target.is_finite() {
            return Err(Error::InvalidInput("non-finite training value".into()));
        }
        self.x.extend_from_slice(row);
        self.y.push(target);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.n_features.max(1)).take(self.len())
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    /// Brings the column index up to date with all rows.
    pub fn update_index(&mut self) {
        match &mut self.index {
            Some(index) => index.extend(&self.x, self.n_features),
            None => self.index = Some(ColumnIndex::build(&self.x, self.n_features)),
        }
    }

    /// Column index covering every row; built on the fly when the cached one
    /// is stale.
    pub(crate) fn column_index(&self) -> Cow<'_, ColumnIndex> {
        match &self.index {
            Some(index) if index.n_rows == self.len() => Cow::Borrowed(index),
            _ => Cow::Owned(ColumnIndex::build(&self.x, self.n_features)),
        }
    }
}

/// Per feature, row ids ordered by (value, id) alongside the sorted values.
#[derive(Debug, Clone)]
pub(crate) struct ColumnIndex {
    pub n_rows: usize,
    pub values: Vec<Vec<f64>>,
    pub ids: Vec<Vec<u32>>,
}

impl ColumnIndex {
    fn build(x: &[f64], n_features: usize) -> Self {
        let mut index = ColumnIndex {
            n_rows: 0,
            values: vec![Vec::new(); n_features],
            ids: vec![Vec::new(); n_features],
        };
        index.extend(x, n_features);
        index
    }

    fn extend(&mut self, x: &[f64], n_features: usize) {
        let total = if n_features == 0 { 0 } else { x.len() / n_features };
        if total == self.n_rows {
            return;
        }
        let start = self.n_rows;
        let mut fresh: Vec<(f64, u32)> = Vec::with_capacity(total - start);
        for f in 0..n_features {
            fresh.clear();
            fresh.extend((start..total).map(|r| (x[r * n_features + f], r as u32)));
            fresh.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let values = &mut self.values[f];
            let ids = &mut self.ids[f];
            let mut i = values.len();
            values.resize(total, 0.0);
            ids.resize(total, 0);
            // insert from the back; old ids are smaller, so ties keep them first
            for (j, &(v, id)) in fresh.iter().enumerate().rev() {
                let p = values[..i].partition_point(|x| x.total_cmp(&v) != Ordering::Greater);
                values.copy_within(p..i, p + j + 1);
                ids.copy_within(p..i, p + j + 1);
                values[p + j] = v;
                ids[p + j] = id;
                i = p;
            }
        }
        self.n_rows = total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incremental_index_matches_full_build() {
        let mut ds = Dataset::new(2);
        let vals = [3.0, 1.0, 2.0, 1.0, 5.0, 0.0, 2.0, 2.0, -1.0, 4.0];
        for (k, v) in vals.iter().enumerate() {
            ds.push(&[*v, (k % 3) as f64], k as f64).unwrap();
            if k % 3 == 1 {
                ds.update_index();
            }
        }
        ds.update_index();
        let incremental = ds.column_index().into_owned();
        let full = ColumnIndex::build(&ds.x, 2);
        assert_eq!(incremental.ids, full.ids);
        assert_eq!(incremental.values, full.values);
        assert_eq!(incremental.ids[0], vec![8, 5, 1, 3, 2, 6, 7, 0, 9, 4]);
        assert_eq!(
            incremental.values[1],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0]
        );
    }

    #[test]
    fn push_validates_width_and_finiteness() {
        let mut ds = Dataset::new(2);
        assert!(ds.push(&[1.0], 0.0).is_err());
        assert!(ds.push(&[1.0, f64::NAN], 0.0).is_err());
        assert!(ds.push(&[1.0, 2.0], f64::INFINITY).is_err());
        ds.push(&[1.0, 2.0], 3.0).unwrap();
        assert_eq!(ds.row(0), &[1.0, 2.0]);
        assert_eq!(ds.rows().count(), 1);
    }

    #[test]
    fn from_rows_rejects_empty() {
        assert!(matches!(Dataset::from_rows(&[], &[]), Err(Error::EmptyDataset)));
    }
}

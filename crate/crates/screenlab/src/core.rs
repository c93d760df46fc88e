//! Shared domain types: plain matrices, validated designs, responses,
//! 1-based variable index sets, and fitted submodels.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("design entry ({row},{col}) = {value} lies outside [0,1)")]
    OutOfRangeEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} has {len} entries, expected {expected}")]
    NonRectangular {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("matrix must have n >= 2 rows and p >= 1 columns, got {n}x{p}")]
    InvalidShape { n: usize, p: usize },
    #[error("matrix entry ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("response value at position {index} is not finite")]
    NonFiniteResponse { index: usize },
    #[error("response length {len} does not match the design's {n} rows")]
    LengthMismatch { len: usize, n: usize },
    #[error("variable index {index} exceeds dimension {p}")]
    IndexExceedsDimension { index: usize, p: usize },
    #[error("variable indices are 1-based; 0 is not a valid index")]
    ZeroIndex,
}

/// Dense row-major matrix of finite reals, without the design-range invariant.
///
/// Screeners and least-squares fits accept this type so they can run on both
/// raw designs and basis-transformed designs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn from_row_major(n: usize, p: usize, values: Vec<f64>) -> Result<Self, CoreError> {
        if n < 2 || p < 1 {
            return Err(CoreError::InvalidShape { n, p });
        }
        if values.len() != n * p {
            return Err(CoreError::NonRectangular {
                row: n,
                len: values.len(),
                expected: n * p,
            });
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteEntry {
                    row: k / p + 1,
                    col: k % p + 1,
                });
            }
        }
        Ok(Matrix { n, p, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, CoreError> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if n < 2 || p < 1 {
            return Err(CoreError::InvalidShape { n, p });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(CoreError::NonRectangular {
                    row: i + 1,
                    len: row.len(),
                    expected: p,
                });
            }
        }
        Self::from_row_major(n, p, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Entry at 0-based (row, col).
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.p + col]
    }

    /// 0-based row as a slice.
    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.p..(row + 1) * self.p]
    }

    /// Copy of the 0-based column `col`.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, col)).collect()
    }

    /// All columns, transposed out for column-hot loops.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        let mut cols = vec![vec![0.0; self.n]; self.p];
        for i in 0..self.n {
            let row = self.row(i);
            for (j, col) in cols.iter_mut().enumerate() {
                col[i] = row[j];
            }
        }
        cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// An n x p design whose entries are all inside [0,1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMatrix {
    inner: Matrix,
}

impl DesignMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, CoreError> {
        Self::from_matrix(Matrix::from_rows(rows)?)
    }

    pub fn from_row_major(n: usize, p: usize, values: Vec<f64>) -> Result<Self, CoreError> {
        Self::from_matrix(Matrix::from_row_major(n, p, values)?)
    }

    pub fn from_matrix(m: Matrix) -> Result<Self, CoreError> {
        for i in 0..m.n() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if !(0.0..1.0).contains(&v) {
                    return Err(CoreError::OutOfRangeEntry {
                        row: i + 1,
                        col: j + 1,
                        value: v,
                    });
                }
            }
        }
        Ok(DesignMatrix { inner: m })
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn p(&self) -> usize {
        self.inner.p()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner.get(row, col)
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        self.inner.row(row)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }
}

/// Checks shape, finiteness, and the [0,1) range of every entry.
pub fn validate_design(rows: &[Vec<f64>]) -> Result<DesignMatrix, CoreError> {
    DesignMatrix::from_rows(rows)
}

/// Simulator outputs paired with a design; finite by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseVector {
    values: Vec<f64>,
}

impl ResponseVector {
    pub fn new(values: Vec<f64>) -> Result<Self, CoreError> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteResponse { index: i + 1 });
            }
        }
        Ok(ResponseVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Sorted set of distinct 1-based variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct VariableSet {
    indices: Vec<usize>,
}

impl VariableSet {
    pub fn empty() -> Self {
        VariableSet::default()
    }

    /// Builds from arbitrary 1-based indices, sorting and deduplicating.
    pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> Result<Self, CoreError> {
        let mut indices: Vec<usize> = iter.into_iter().collect();
        if indices.contains(&0) {
            return Err(CoreError::ZeroIndex);
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(VariableSet { indices })
    }

    /// Full set {1, ..., p}.
    pub fn full(p: usize) -> Self {
        VariableSet {
            indices: (1..=p).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    /// 1-based indices in increasing order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// 0-based column positions in increasing order.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|&v| v - 1)
    }

    pub fn union(&self, other: &VariableSet) -> VariableSet {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        indices.sort_unstable();
        indices.dedup();
        VariableSet { indices }
    }

    pub fn difference(&self, other: &VariableSet) -> VariableSet {
        VariableSet {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|v| !other.contains(*v))
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &VariableSet) -> bool {
        self.indices.iter().all(|&v| other.contains(v))
    }
}

/// Intercept-plus-subset linear fit and its residual sum of squares.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetModel {
    pub subset: VariableSet,
    pub intercept: f64,
    /// One coefficient per subset index, in subset order.
    pub coefficients: Vec<f64>,
    pub rss: f64,
}

/// Places subset coefficients into a length-p vector, zero elsewhere.
pub fn expand_to_full(model: &SubsetModel, p: usize) -> Result<Vec<f64>, CoreError> {
    if let Some(max) = model.subset.max() {
        if max > p {
            return Err(CoreError::IndexExceedsDimension { index: max, p });
        }
    }
    let mut full = vec![0.0; p];
    for (pos, &coef) in model.subset.zero_based().zip(model.coefficients.iter()) {
        full[pos] = coef;
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_design_accepts_in_range() {
        let d = validate_design(&[vec![0.1, 0.9], vec![0.0, 0.5]]).unwrap();
        assert_eq!((d.n(), d.p()), (2, 2));
        assert_eq!(d.get(0, 1), 0.9);
    }

    #[test]
    fn validate_design_rejects_boundary_one() {
        let err = validate_design(&[vec![1.0], vec![0.2]]).unwrap_err();
        assert_eq!(
            err,
            CoreError::OutOfRangeEntry {
                row: 1,
                col: 1,
                value: 1.0
            }
        );
    }

    #[test]
    fn validate_design_rejects_negative() {
        let err = validate_design(&[vec![0.2, -0.1], vec![0.2, 0.3]]).unwrap_err();
        assert!(matches!(err, CoreError::OutOfRangeEntry { row: 1, col: 2, .. }));
    }

    #[test]
    fn validate_design_rejects_ragged_rows() {
        let err = validate_design(&[vec![0.1, 0.2], vec![0.3]]).unwrap_err();
        assert_eq!(
            err,
            CoreError::NonRectangular {
                row: 2,
                len: 1,
                expected: 2
            }
        );
    }

    #[test]
    fn validate_design_is_idempotent() {
        let d = validate_design(&[vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        let rows: Vec<Vec<f64>> = (0..d.n()).map(|i| d.row(i).to_vec()).collect();
        let again = validate_design(&rows).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn matrix_shape_guards() {
        assert!(matches!(
            Matrix::from_rows(&[vec![0.5]]),
            Err(CoreError::InvalidShape { n: 1, p: 1 })
        ));
        assert!(matches!(
            Matrix::from_row_major(2, 2, vec![0.0, f64::NAN, 0.1, 0.2]),
            Err(CoreError::NonFiniteEntry { row: 1, col: 2 })
        ));
    }

    #[test]
    fn response_rejects_non_finite() {
        let err = ResponseVector::new(vec![1.0, f64::INFINITY]).unwrap_err();
        assert_eq!(err, CoreError::NonFiniteResponse { index: 2 });
    }

    #[test]
    fn expand_to_full_places_coefficients() {
        let m = SubsetModel {
            subset: VariableSet::from_indices([2]).unwrap(),
            intercept: 0.0,
            coefficients: vec![3.0],
            rss: 0.0,
        };
        assert_eq!(expand_to_full(&m, 3).unwrap(), vec![0.0, 3.0, 0.0]);

        let m = SubsetModel {
            subset: VariableSet::from_indices([1, 3]).unwrap(),
            intercept: 0.0,
            coefficients: vec![-1.0, 2.0],
            rss: 0.0,
        };
        assert_eq!(expand_to_full(&m, 4).unwrap(), vec![-1.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn expand_to_full_identity_on_full_set() {
        let coefs = vec![1.5, -2.0, 0.25];
        let m = SubsetModel {
            subset: VariableSet::full(3),
            intercept: 0.0,
            coefficients: coefs.clone(),
            rss: 0.0,
        };
        assert_eq!(expand_to_full(&m, 3).unwrap(), coefs);
    }

    #[test]
    fn expand_to_full_checks_dimension() {
        let m = SubsetModel {
            subset: VariableSet::from_indices([5]).unwrap(),
            intercept: 0.0,
            coefficients: vec![1.0],
            rss: 0.0,
        };
        assert_eq!(
            expand_to_full(&m, 3).unwrap_err(),
            CoreError::IndexExceedsDimension { index: 5, p: 3 }
        );
    }

    #[test]
    fn expand_then_restrict_round_trips() {
        let m = SubsetModel {
            subset: VariableSet::from_indices([2, 4, 7]).unwrap(),
            intercept: 1.0,
            coefficients: vec![0.5, -3.0, 9.0],
            rss: 0.0,
        };
        let full = expand_to_full(&m, 9).unwrap();
        let restricted: Vec<f64> = m.subset.zero_based().map(|j| full[j]).collect();
        assert_eq!(restricted, m.coefficients);
    }

    #[test]
    fn variable_set_ops() {
        let a = VariableSet::from_indices([3, 1, 3]).unwrap();
        assert_eq!(a.indices(), &[1, 3]);
        let b = VariableSet::from_indices([2, 3]).unwrap();
        assert_eq!(a.union(&b).indices(), &[1, 2, 3]);
        assert_eq!(a.difference(&b).indices(), &[1]);
        assert!(a.difference(&b).is_subset_of(&a));
        assert!(VariableSet::from_indices([0, 1]).is_err());
    }
}

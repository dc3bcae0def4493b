//! Core data containers: the labeled data matrix and the factor pair.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{NmfError, Result};

/// Dense non-negative data matrix, one image per column, with one integer
/// class label per column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
    labels: Vec<usize>,
}

impl DataMatrix {
    /// Builds a data matrix, checking non-negativity, finiteness, non-empty
    /// shape, and that there is exactly one label per column.
    pub fn new(values: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(NmfError::Dimension(format!(
                "data matrix must be non-empty, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if labels.len() != values.ncols() {
            return Err(NmfError::Dimension(format!(
                "label count {} does not match image count {}",
                labels.len(),
                values.ncols()
            )));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(NmfError::InvalidArgument(format!(
                "data matrix entries must be finite and non-negative, found {bad}"
            )));
        }
        Ok(Self { values, labels })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of rows (pixels per image).
    pub fn n_pixels(&self) -> usize {
        self.values.nrows()
    }

    /// Number of columns (images).
    pub fn n_images(&self) -> usize {
        self.values.ncols()
    }

    /// Number of distinct class labels.
    pub fn n_classes(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Non-negative factors `W` (pixels x rank) and `H` (rank x images).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    w: Array2<f64>,
    h: Array2<f64>,
}

impl FactorPair {
    /// Builds a factor pair, checking non-negativity and that the inner
    /// dimensions agree.
    pub fn new(w: Array2<f64>, h: Array2<f64>) -> Result<Self> {
        if w.ncols() != h.nrows() {
            return Err(NmfError::Dimension(format!(
                "factor inner dimensions disagree: W is {}x{}, H is {}x{}",
                w.nrows(),
                w.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        if w.ncols() == 0 {
            return Err(NmfError::Dimension("factor rank must be at least 1".into()));
        }
        for (name, m) in [("W", &w), ("H", &h)] {
            if let Some(bad) = m.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(NmfError::InvalidArgument(format!(
                    "{name} entries must be finite and non-negative, found {bad}"
                )));
            }
        }
        Ok(Self { w, h })
    }

    /// Constructor for update steps whose algebra already guarantees the
    /// invariants; only checked in debug builds.
    pub(crate) fn from_parts_unchecked(w: Array2<f64>, h: Array2<f64>) -> Self {
        debug_assert_eq!(w.ncols(), h.nrows());
        debug_assert!(w.iter().chain(h.iter()).all(|x| x.is_finite() && *x >= 0.0));
        Self { w, h }
    }

    pub fn w(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn h(&self) -> &Array2<f64> {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    /// The reconstruction `W * H`.
    pub fn product(&self) -> Array2<f64> {
        self.w.dot(&self.h)
    }
}

/// Checks that a factor pair is conformable with a data matrix.
pub(crate) fn check_conformable(v: &DataMatrix, f: &FactorPair) -> Result<()> {
    if f.w().nrows() != v.n_pixels() || f.h().ncols() != v.n_images() {
        return Err(NmfError::Dimension(format!(
            "factors ({}x{} * {}x{}) are not conformable with data {}x{}",
            f.w().nrows(),
            f.w().ncols(),
            f.h().nrows(),
            f.h().ncols(),
            v.n_pixels(),
            v.n_images()
        )));
    }
    Ok(())
}

/// Reshapes a flattened image column back into a `height x width` grid.
///
/// Columns store pixels in column-major order: pixel (row `i`, col `j`) of
/// the grid lives at index `j * height + i`. The same convention is used by
/// [`image_to_column`] and the corpus loader, so corruption and image dumps
/// see identical layouts.
pub fn column_to_image(column: ArrayView1<'_, f64>, height: usize, width: usize) -> Result<Array2<f64>> {
    if column.len() != height * width {
        return Err(NmfError::Dimension(format!(
            "column of length {} cannot form a {height}x{width} image",
            column.len()
        )));
    }
    let mut grid = Array2::zeros((height, width));
    for j in 0..width {
        for i in 0..height {
            grid[[i, j]] = column[j * height + i];
        }
    }
    Ok(grid)
}

/// Flattens an image grid into a column (column-major order).
pub fn image_to_column(grid: &Array2<f64>) -> Array1<f64> {
    let (height, width) = grid.dim();
    let mut column = Array1::zeros(height * width);
    for j in 0..width {
        for i in 0..height {
            column[j * height + i] = grid[[i, j]];
        }
    }
    column
}

//! Seeded corruption of image data: salt-and-pepper noise and block
//! occlusion.
//!
//! Corruption is a pure function of the input and the spec: each image in a
//! dataset draws its randomness from a sub-seed mixed from the spec seed and
//! the column index, so adding or removing images never reshuffles the noise
//! applied to the others.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NmfError, Result};
use crate::matrix::{column_to_image, image_to_column, DataMatrix};
use crate::seeding::derive_seed;

/// Which corruption to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// No corruption; datasets pass through untouched.
    Clean,
    /// Fraction `p` of pixels replaced, half with 255 (salt), half with 0.
    SaltPepper { p: f64 },
    /// One `side x side` square of pixels set to 255 at a random position.
    Block { side: usize },
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Clean => "clean",
            NoiseKind::SaltPepper { .. } => "salt_pepper",
            NoiseKind::Block { .. } => "block",
        }
    }

    /// The numeric parameter (`p`, `side`, or 0 for clean).
    pub fn parameter(&self) -> f64 {
        match self {
            NoiseKind::Clean => 0.0,
            NoiseKind::SaltPepper { p } => *p,
            NoiseKind::Block { side } => *side as f64,
        }
    }

    /// Stable numeric tag for seed derivation; depends only on the kind and
    /// parameter, never on grid position.
    pub fn seed_tag(&self) -> u64 {
        match self {
            NoiseKind::Clean => 0,
            NoiseKind::SaltPepper { p } => 0x1000_0000_0000_0000 ^ p.to_bits(),
            NoiseKind::Block { side } => 0x2000_0000_0000_0000 ^ *side as u64,
        }
    }
}

/// A corruption kind plus the seed that makes it reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

/// Replaces `round(p * n)` distinct pixels, chosen uniformly without
/// replacement; the ceiling half becomes salt (255), the floor half pepper
/// (0). Deterministic per seed.
pub fn apply_salt_pepper(image: &Array2<f64>, p: f64, seed: u64) -> Result<Array2<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NmfError::InvalidArgument(format!(
            "corruption fraction must lie in [0, 1], got {p}"
        )));
    }
    let (height, width) = image.dim();
    let n = height * width;
    let k = (p * n as f64).round() as usize;
    let mut out = image.clone();
    if k == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, n, k);
    let n_salt = k.div_ceil(2);
    for (t, idx) in picks.into_iter().enumerate() {
        let (i, j) = (idx / width, idx % width);
        out[[i, j]] = if t < n_salt { 255.0 } else { 0.0 };
    }
    Ok(out)
}

/// Sets one `side x side` square to 255, its top-left corner drawn uniformly
/// from all in-bounds placements. Deterministic per seed.
pub fn apply_block(image: &Array2<f64>, side: usize, seed: u64) -> Result<Array2<f64>> {
    let (height, width) = image.dim();
    if side < 1 {
        return Err(NmfError::InvalidArgument(
            "block side must be at least 1".into(),
        ));
    }
    if side > height.min(width) {
        return Err(NmfError::Dimension(format!(
            "block side {side} exceeds image bounds {height}x{width}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = rng.random_range(0..=(height - side));
    let left = rng.random_range(0..=(width - side));
    let mut out = image.clone();
    for i in top..top + side {
        for j in left..left + side {
            out[[i, j]] = 255.0;
        }
    }
    Ok(out)
}

/// Corrupts every column of a dataset independently, reshaping each to its
/// image grid, applying the spec, and flattening back. Labels pass through
/// unchanged; the clean kind returns an identical copy.
pub fn corrupt_dataset(
    v: &DataMatrix,
    spec: &NoiseSpec,
    image_shape: (usize, usize),
) -> Result<DataMatrix> {
    let (height, width) = image_shape;
    if v.n_pixels() != height * width {
        return Err(NmfError::Dimension(format!(
            "dataset has {} pixels per column but image shape {height}x{width} implies {}",
            v.n_pixels(),
            height * width
        )));
    }
    if let NoiseKind::Clean = spec.kind {
        return Ok(v.clone());
    }
    let mut values = v.values().clone();
    for (j, mut col) in values.columns_mut().into_iter().enumerate() {
        let grid = column_to_image(col.view(), height, width)?;
        let sub_seed = derive_seed(spec.seed, &[j as u64]);
        let corrupted = match spec.kind {
            NoiseKind::Clean => unreachable!(),
            NoiseKind::SaltPepper { p } => apply_salt_pepper(&grid, p, sub_seed)?,
            NoiseKind::Block { side } => apply_block(&grid, side, sub_seed)?,
        };
        col.assign(&image_to_column(&corrupted));
    }
    DataMatrix::new(values, v.labels().to_vec())
}

//! L2,1-NMF: column-wise robust objective and diagonally weighted
//! multiplicative updates.
//!
//! The objective sums the Euclidean norms of the residual columns, so a fully
//! corrupted image contributes linearly instead of quadratically. The update
//! inserts a diagonal weight matrix `D` with `D_jj = 1 / ||v_j - W h_j||`
//! into the multiplicative rules, recomputed once per step.

use ndarray::{Array2, Zip};

use crate::error::Result;
use crate::matrix::{check_conformable, DataMatrix, FactorPair};

use super::validate_guard;

/// `||V - WH||_{2,1}`: sum over data columns of the residual column norms.
pub fn l21_objective(v: &DataMatrix, f: &FactorPair) -> Result<f64> {
    Ok(residual_column_norms(v, f)?.into_iter().sum())
}

/// Euclidean norm of each residual column `v_j - W h_j`.
pub fn residual_column_norms(v: &DataMatrix, f: &FactorPair) -> Result<Vec<f64>> {
    check_conformable(v, f)?;
    let residual = v.values() - &f.product();
    Ok(residual
        .columns()
        .into_iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect())
}

/// Diagonal of the weight matrix: `D_jj = 1 / max(||v_j - W h_j||, guard)`.
pub fn l21_weights(v: &DataMatrix, f: &FactorPair, guard: f64) -> Result<Vec<f64>> {
    validate_guard(guard)?;
    Ok(residual_column_norms(v, f)?
        .into_iter()
        .map(|n| 1.0 / n.max(guard))
        .collect())
}

/// Scales column `j` of `m` by `weights[j]`.
fn scale_columns(m: &Array2<f64>, weights: &[f64]) -> Array2<f64> {
    let mut out = m.clone();
    for (j, mut col) in out.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|x| x * weights[j]);
    }
    out
}

/// One round of the weighted multiplicative updates, W first and then H
/// against the refreshed W:
///
/// ```text
/// D   = diag(1 / max(||v_j - W h_j||, guard))
/// W'  = W .* (V D H')  ./ (W (H D H')   + guard)
/// H'  = H .* (W'' V D) ./ ((W'' W') H D + guard)
/// ```
pub fn l21_nmf_step(v: &DataMatrix, f: &FactorPair, guard: f64) -> Result<FactorPair> {
    let weights = l21_weights(v, f, guard)?;
    let (w, h) = (f.w(), f.h());

    let vd = scale_columns(v.values(), &weights);
    let hd = scale_columns(h, &weights);

    let numer_w = vd.dot(&h.t());
    let denom_w = w.dot(&hd.dot(&h.t()));
    let mut w_next = w.clone();
    Zip::from(&mut w_next)
        .and(&numer_w)
        .and(&denom_w)
        .for_each(|x, &n, &d| *x *= n / (d + guard));

    let numer_h = w_next.t().dot(&vd);
    let denom_h = scale_columns(&w_next.t().dot(&w_next).dot(h), &weights);
    let mut h_next = h.clone();
    Zip::from(&mut h_next)
        .and(&numer_h)
        .and(&denom_h)
        .for_each(|x, &n, &d| *x *= n / (d + guard));

    Ok(FactorPair::from_parts_unchecked(w_next, h_next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::init_factors;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn objective_is_zero_at_exact_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = Array2::from_shape_fn((5, 2), |_| 1.0 - rng.random::<f64>());
        let h = Array2::from_shape_fn((2, 4), |_| 1.0 - rng.random::<f64>());
        let v = DataMatrix::new(w.dot(&h), vec![0; 4]).unwrap();
        let f = FactorPair::new(w, h).unwrap();
        assert_eq!(l21_objective(&v, &f).unwrap(), 0.0);
    }

    #[test]
    fn objective_of_three_four_five_column() {
        // Residual columns (3, 4) and (0, 0): norms 5 and 0.
        let v = DataMatrix::new(array![[3.0, 0.0], [4.0, 0.0]], vec![0, 1]).unwrap();
        let f = FactorPair::new(Array2::zeros((2, 1)), Array2::zeros((1, 2))).unwrap();
        assert_eq!(l21_objective(&v, &f).unwrap(), 5.0);
    }

    #[test]
    fn objective_matches_column_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let v = DataMatrix::new(
            Array2::from_shape_fn((5, 4), |_| rng.random::<f64>() * 255.0),
            vec![0; 4],
        )
        .unwrap();
        let w = Array2::from_shape_fn((5, 3), |_| rng.random::<f64>());
        let h = Array2::from_shape_fn((3, 4), |_| rng.random::<f64>());
        let f = FactorPair::new(w.clone(), h.clone()).unwrap();

        let mut expected = 0.0;
        for j in 0..4 {
            let mut sq = 0.0;
            for i in 0..5 {
                let mut wh = 0.0;
                for k in 0..3 {
                    wh += w[[i, k]] * h[[k, j]];
                }
                let r = v.values()[[i, j]] - wh;
                sq += r * r;
            }
            expected += sq.sqrt();
        }
        assert!((l21_objective(&v, &f).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn weights_are_reciprocal_column_norms() {
        // Residual columns with norms 2 and 0.5 give D = diag(0.5, 2).
        let v = DataMatrix::new(array![[2.0, 0.5]], vec![0, 1]).unwrap();
        let f = FactorPair::new(Array2::zeros((1, 1)), Array2::zeros((1, 2))).unwrap();
        let d = l21_weights(&v, &f, 1e-12).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15);
        assert!((d[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_fit_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = Array2::from_shape_fn((6, 2), |_| 1.0 - rng.random::<f64>());
        let h = Array2::from_shape_fn((2, 5), |_| 1.0 - rng.random::<f64>());
        let v = DataMatrix::new(w.dot(&h), vec![0; 5]).unwrap();
        let f = FactorPair::new(w, h).unwrap();
        let next = l21_nmf_step(&v, &f, 1e-12).unwrap();
        let drift = f
            .w()
            .iter()
            .zip(next.w().iter())
            .chain(f.h().iter().zip(next.h().iter()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(drift <= 1e-9, "fixed point drifted by {drift}");
    }

    #[test]
    fn objective_non_increasing_over_300_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = DataMatrix::new(
            Array2::from_shape_fn((6, 5), |_| rng.random::<f64>() * 255.0),
            vec![0; 5],
        )
        .unwrap();
        let mut f = init_factors(&v, 2, 9).unwrap();
        let mut previous = l21_objective(&v, &f).unwrap();
        for step in 0..300 {
            f = l21_nmf_step(&v, &f, 1e-12).unwrap();
            assert!(f.w().iter().chain(f.h().iter()).all(|x| *x >= 0.0));
            let current = l21_objective(&v, &f).unwrap();
            assert!(
                current <= previous * (1.0 + 1e-8),
                "objective rose at step {step}: {previous} -> {current}"
            );
            previous = current;
        }
    }
}

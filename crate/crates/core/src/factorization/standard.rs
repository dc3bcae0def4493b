//! Standard NMF: squared Frobenius objective and multiplicative updates.

use ndarray::Zip;

use crate::error::Result;
use crate::matrix::{check_conformable, DataMatrix, FactorPair};

use super::validate_guard;

/// Squared Frobenius norm of the residual, `||V - WH||_F^2`.
pub fn frobenius_objective(v: &DataMatrix, f: &FactorPair) -> Result<f64> {
    check_conformable(v, f)?;
    let residual = v.values() - &f.product();
    Ok(residual.iter().map(|r| r * r).sum())
}

/// One round of multiplicative updates, W first and then H against the
/// refreshed W:
///
/// ```text
/// W' = W .* (V H')  ./ (W  H H'  + guard)
/// H' = H .* (W'' V) ./ (W'' W' H + guard)     (double prime = transpose of W')
/// ```
///
/// Non-negativity is preserved because every term is a product or quotient of
/// non-negative quantities, and the Frobenius objective does not increase
/// beyond guard-induced slack.
pub fn standard_nmf_step(v: &DataMatrix, f: &FactorPair, guard: f64) -> Result<FactorPair> {
    check_conformable(v, f)?;
    validate_guard(guard)?;
    let (w, h) = (f.w(), f.h());

    let numer_w = v.values().dot(&h.t());
    let denom_w = w.dot(&h.dot(&h.t()));
    let mut w_next = w.clone();
    Zip::from(&mut w_next)
        .and(&numer_w)
        .and(&denom_w)
        .for_each(|x, &n, &d| *x *= n / (d + guard));

    let numer_h = w_next.t().dot(v.values());
    let denom_h = w_next.t().dot(&w_next).dot(h);
    let mut h_next = h.clone();
    Zip::from(&mut h_next)
        .and(&numer_h)
        .and(&denom_h)
        .for_each(|x, &n, &d| *x *= n / (d + guard));

    Ok(FactorPair::from_parts_unchecked(w_next, h_next))
}

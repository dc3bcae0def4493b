//! HCNMF: hypersurface cost, its analytic gradient, and projected gradient
//! steps with Armijo backtracking.
//!
//! The per-entry cost is `delta(x) = sqrt(1 + x^2) - 1`, quadratic near zero
//! and linear for large residuals, which is what damps the influence of
//! outliers.

use ndarray::Array2;

use crate::error::{NmfError, Result};
use crate::matrix::{check_conformable, DataMatrix, FactorPair};

/// Sum of `sqrt(1 + r^2) - 1` over all residual entries `r = (V - WH)_ij`.
pub fn hypersurface_cost(v: &DataMatrix, f: &FactorPair) -> Result<f64> {
    check_conformable(v, f)?;
    Ok(cost_of(v.values(), f.w(), f.h()))
}

fn cost_of(v: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let wh = w.dot(h);
    v.iter()
        .zip(wh.iter())
        .map(|(x, y)| {
            let r = x - y;
            (1.0 + r * r).sqrt() - 1.0
        })
        .sum()
}

/// Analytic gradients of [`hypersurface_cost`] with respect to W and H.
///
/// With `R = V - WH` and `S = R ./ sqrt(1 + R.^2)` elementwise,
/// `grad_W = -S H'` and `grad_H = -W' S`.
pub fn hypersurface_gradient(
    v: &DataMatrix,
    f: &FactorPair,
) -> Result<(Array2<f64>, Array2<f64>)> {
    check_conformable(v, f)?;
    let scaled = scaled_residual(v.values(), f.w(), f.h());
    let grad_w = -scaled.dot(&f.h().t());
    let grad_h = -f.w().t().dot(&scaled);
    Ok((grad_w, grad_h))
}

/// `R ./ sqrt(1 + R.^2)` for `R = V - WH`.
fn scaled_residual(v: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> Array2<f64> {
    let mut r = v - &w.dot(h);
    r.mapv_inplace(|x| x / (1.0 + x * x).sqrt());
    r
}

/// Backtracking parameters for [`armijo_step_size`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    pub initial_step: f64,
    pub shrink: f64,
    /// Sufficient-decrease coefficient; 1/2 matches the rule used here.
    pub c: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            shrink: 0.5,
            c: 0.5,
            max_backtracks: 30,
        }
    }
}

impl LineSearchParams {
    fn validate(&self) -> Result<()> {
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(NmfError::InvalidArgument(format!(
                "shrink factor must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if !(self.initial_step > 0.0) {
            return Err(NmfError::InvalidArgument(format!(
                "initial step must be positive, got {}",
                self.initial_step
            )));
        }
        if !(self.c > 0.0) {
            return Err(NmfError::InvalidArgument(format!(
                "sufficient-decrease coefficient must be positive, got {}",
                self.c
            )));
        }
        Ok(())
    }
}

fn project_non_negative(m: &Array2<f64>) -> Array2<f64> {
    m.mapv(|x| x.max(0.0))
}

/// Backtracking line search along `direction` (the negative gradient).
///
/// Tries `alpha = initial_step * shrink^m` for `m = 0..=max_backtracks` and
/// returns the first (largest) step whose non-negative projected trial point
/// satisfies
///
/// ```text
/// f(P(x + alpha d)) - f(x) <= -c * alpha * |d|^2
/// ```
///
/// where `|d|^2` is the squared Frobenius norm of the direction. Returns 0
/// when no tested step qualifies, which callers treat as a stalled block for
/// this iteration.
pub fn armijo_step_size(
    objective: impl Fn(&Array2<f64>) -> f64,
    point: &Array2<f64>,
    direction: &Array2<f64>,
    params: &LineSearchParams,
) -> Result<f64> {
    params.validate()?;
    if point.dim() != direction.dim() {
        return Err(NmfError::Dimension(format!(
            "direction shape {:?} does not match point shape {:?}",
            direction.dim(),
            point.dim()
        )));
    }
    let f0 = objective(point);
    if !f0.is_finite() {
        return Err(NmfError::Numeric(
            "objective is not finite at the line-search starting point".into(),
        ));
    }
    let gradient_norm_sq: f64 = direction.iter().map(|d| d * d).sum();

    let mut alpha = params.initial_step;
    for _ in 0..=params.max_backtracks {
        let trial = project_non_negative(&(point + &(alpha * direction)));
        let f_trial = objective(&trial);
        if f_trial.is_finite() && f_trial - f0 <= -params.c * alpha * gradient_norm_sq {
            return Ok(alpha);
        }
        alpha *= params.shrink;
    }
    Ok(0.0)
}

/// Step sizes accepted by the line searches inside one [`hcnmf_step`];
/// zero means the corresponding block stalled this iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcnmfStepSizes {
    pub w_step: f64,
    pub h_step: f64,
}

/// One projected gradient iteration: a Armijo-sized descent step on W
/// (projected onto the non-negative orthant), then the same on H using the
/// refreshed W. The hypersurface cost never increases because a step is only
/// taken when the sufficient-decrease condition holds.
pub fn hcnmf_step(
    v: &DataMatrix,
    f: &FactorPair,
    params: &LineSearchParams,
) -> Result<(FactorPair, HcnmfStepSizes)> {
    check_conformable(v, f)?;
    let data = v.values();
    let (w, h) = (f.w(), f.h());

    let grad_w = -scaled_residual(data, w, h).dot(&h.t());
    let dir_w = -&grad_w;
    let w_step = armijo_step_size(|m| cost_of(data, m, h), w, &dir_w, params)?;
    let w_next = if w_step > 0.0 {
        project_non_negative(&(w + &(w_step * &dir_w)))
    } else {
        w.clone()
    };

    let grad_h = -w_next.t().dot(&scaled_residual(data, &w_next, h));
    let dir_h = -&grad_h;
    let h_step = armijo_step_size(|m| cost_of(data, &w_next, m), h, &dir_h, params)?;
    let h_next = if h_step > 0.0 {
        project_non_negative(&(h + &(h_step * &dir_h)))
    } else {
        h.clone()
    };

    Ok((
        FactorPair::from_parts_unchecked(w_next, h_next),
        HcnmfStepSizes { w_step, h_step },
    ))
}

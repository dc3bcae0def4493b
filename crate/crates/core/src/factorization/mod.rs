//! The three factorization algorithms behind a shared, seeded run loop.
//!
//! Each algorithm is an iterated update step over a [`FactorPair`]:
//! multiplicative updates for the Frobenius objective, projected gradient
//! with Armijo backtracking for the hypersurface objective, and weighted
//! multiplicative updates for the column-wise L2,1 objective.

mod hypersurface;
mod l21;
mod standard;

pub use hypersurface::{
    armijo_step_size, hcnmf_step, hypersurface_cost, hypersurface_gradient, HcnmfStepSizes,
    LineSearchParams,
};
pub use l21::{l21_nmf_step, l21_objective, l21_weights, residual_column_norms};
pub use standard::{frobenius_objective, standard_nmf_step};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NmfError, Result};
use crate::matrix::{DataMatrix, FactorPair};

fn validate_guard(guard: f64) -> Result<()> {
    if !(guard > 0.0) || !guard.is_finite() {
        return Err(NmfError::InvalidArgument(format!(
            "denominator guard must be a positive finite real, got {guard}"
        )));
    }
    Ok(())
}

/// Which update rule a run iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Multiplicative updates for `||V - WH||_F^2`.
    Standard,
    /// Projected gradient with Armijo line search for the hypersurface cost.
    Hcnmf,
    /// Weighted multiplicative updates for `||V - WH||_{2,1}`.
    L21,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Standard, Algorithm::Hcnmf, Algorithm::L21];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Standard => "standard",
            Algorithm::Hcnmf => "hcnmf",
            Algorithm::L21 => "l21",
        }
    }

    /// Stable numeric tag used for seed derivation; independent of list order.
    pub fn seed_tag(&self) -> u64 {
        match self {
            Algorithm::Standard => 1,
            Algorithm::Hcnmf => 2,
            Algorithm::L21 => 3,
        }
    }

    /// Default iteration cap for this algorithm.
    pub fn default_max_iterations(&self) -> usize {
        match self {
            Algorithm::Standard => 5000,
            Algorithm::Hcnmf => 3000,
            Algorithm::L21 => 1000,
        }
    }

    /// Default stopping rule: the per-algorithm iteration cap with relative
    /// objective tolerance 1e-6 and denominator guard 1e-12.
    pub fn default_stop(&self) -> StoppingRule {
        StoppingRule::new(self.default_max_iterations(), 1e-6, 1e-12)
            .expect("default stopping rule is valid")
    }

    /// Objective value the algorithm descends.
    pub fn objective(&self, v: &DataMatrix, f: &FactorPair) -> Result<f64> {
        match self {
            Algorithm::Standard => frobenius_objective(v, f),
            Algorithm::Hcnmf => hypersurface_cost(v, f),
            Algorithm::L21 => l21_objective(v, f),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = NmfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "nmf" => Ok(Algorithm::Standard),
            "hcnmf" => Ok(Algorithm::Hcnmf),
            "l21" | "l2,1" | "l21-nmf" => Ok(Algorithm::L21),
            other => Err(NmfError::InvalidArgument(format!(
                "unknown algorithm '{other}' (expected standard, hcnmf, or l21)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// When to stop iterating and how to guard denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub max_iterations: usize,
    pub relative_objective_tolerance: f64,
    pub epsilon_guard: f64,
}

impl StoppingRule {
    pub fn new(max_iterations: usize, tolerance: f64, epsilon_guard: f64) -> Result<Self> {
        if max_iterations < 1 {
            return Err(NmfError::InvalidArgument(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(tolerance >= 0.0) {
            return Err(NmfError::InvalidArgument(format!(
                "tolerance must be non-negative, got {tolerance}"
            )));
        }
        if !(epsilon_guard > 0.0) || !epsilon_guard.is_finite() {
            return Err(NmfError::InvalidArgument(format!(
                "epsilon_guard must be a positive finite real, got {epsilon_guard}"
            )));
        }
        Ok(Self {
            max_iterations,
            relative_objective_tolerance: tolerance,
            epsilon_guard,
        })
    }
}

/// Per-iteration record of a run: objective values and max-abs factor deltas.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTrace {
    pub objective: Vec<f64>,
    pub w_delta: Vec<f64>,
    pub h_delta: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

/// Draws strictly positive factors, uniform on (0, 1], deterministically
/// from the seed. A strictly positive start keeps multiplicative updates
/// away from the absorbing state at zero.
pub fn init_factors(v: &DataMatrix, rank: usize, seed: u64) -> Result<FactorPair> {
    let max_rank = v.n_pixels().min(v.n_images());
    if rank < 1 || rank > max_rank {
        return Err(NmfError::Dimension(format!(
            "rank {rank} out of range [1, {max_rank}] for a {}x{} matrix",
            v.n_pixels(),
            v.n_images()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 - u maps [0,1) onto (0,1].
    let mut draw = |rows: usize, cols: usize| {
        let mut m = Array2::zeros((rows, cols));
        for i in 0..rows {
            for j in 0..cols {
                m[[i, j]] = 1.0 - rng.random::<f64>();
            }
        }
        m
    };
    let w = draw(v.n_pixels(), rank);
    let h = draw(rank, v.n_images());
    Ok(FactorPair::from_parts_unchecked(w, h))
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// An in-progress factorization that can be advanced one iteration at a time.
///
/// [`run_factorization`] drives it until the stopping rule fires; callers
/// that need intermediate states (e.g. an iteration study) can step it
/// manually and inspect [`factors`](Self::factors) between steps.
pub struct FactorizationRun<'a> {
    v: &'a DataMatrix,
    algorithm: Algorithm,
    stop: StoppingRule,
    line_search: LineSearchParams,
    factors: FactorPair,
    previous_objective: f64,
    trace: ConvergenceTrace,
}

impl<'a> FactorizationRun<'a> {
    pub fn new(
        v: &'a DataMatrix,
        algorithm: Algorithm,
        rank: usize,
        stop: StoppingRule,
        seed: u64,
    ) -> Result<Self> {
        let factors = init_factors(v, rank, seed)?;
        let initial = algorithm.objective(v, &factors)?;
        if !initial.is_finite() {
            return Err(NmfError::NonFiniteObjective {
                iteration: 0,
                trace: Box::new(ConvergenceTrace::default()),
            });
        }
        Ok(Self {
            v,
            algorithm,
            stop,
            line_search: LineSearchParams::default(),
            factors,
            previous_objective: initial,
            trace: ConvergenceTrace::default(),
        })
    }

    pub fn factors(&self) -> &FactorPair {
        &self.factors
    }

    pub fn trace(&self) -> &ConvergenceTrace {
        &self.trace
    }

    pub fn converged(&self) -> bool {
        self.trace.converged
    }

    pub fn iterations_run(&self) -> usize {
        self.trace.iterations_run
    }

    /// Runs one update step, appending to the trace. Returns `true` when the
    /// relative objective change fell within tolerance on this step.
    pub fn step(&mut self) -> Result<bool> {
        let guard = self.stop.epsilon_guard;
        let next = match self.algorithm {
            Algorithm::Standard => standard_nmf_step(self.v, &self.factors, guard)?,
            Algorithm::Hcnmf => hcnmf_step(self.v, &self.factors, &self.line_search)?.0,
            Algorithm::L21 => l21_nmf_step(self.v, &self.factors, guard)?,
        };
        let objective = self.algorithm.objective(self.v, &next)?;
        let iteration = self.trace.iterations_run + 1;
        if !objective.is_finite() {
            let mut trace = std::mem::take(&mut self.trace);
            trace.converged = false;
            return Err(NmfError::NonFiniteObjective {
                iteration,
                trace: Box::new(trace),
            });
        }
        self.trace
            .w_delta
            .push(max_abs_diff(next.w(), self.factors.w()));
        self.trace
            .h_delta
            .push(max_abs_diff(next.h(), self.factors.h()));
        self.trace.objective.push(objective);
        self.trace.iterations_run = iteration;

        let relative_change =
            (objective - self.previous_objective).abs() / self.previous_objective.max(guard);
        let converged = relative_change <= self.stop.relative_objective_tolerance;
        self.trace.converged = converged;
        self.previous_objective = objective;
        self.factors = next;
        Ok(converged)
    }

    /// Consumes the run, yielding the final factors and trace.
    pub fn finish(self) -> (FactorPair, ConvergenceTrace) {
        (self.factors, self.trace)
    }
}

/// Initializes factors from the seed and iterates the selected step until the
/// relative objective change falls within tolerance or the iteration cap is
/// reached. Deterministic for fixed inputs and seed.
pub fn run_factorization(
    v: &DataMatrix,
    algorithm: Algorithm,
    rank: usize,
    stop: &StoppingRule,
    seed: u64,
) -> Result<(FactorPair, ConvergenceTrace)> {
    let mut run = FactorizationRun::new(v, algorithm, rank, *stop, seed)?;
    for _ in 0..stop.max_iterations {
        if run.step()? {
            break;
        }
    }
    Ok(run.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn random_data(rows: usize, cols: usize, scale: f64, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>() * scale);
        DataMatrix::new(values, vec![0; cols]).unwrap()
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let v = random_data(10, 8, 255.0, 3);
        let a = init_factors(&v, 3, 7).unwrap();
        let b = init_factors(&v, 3, 7).unwrap();
        assert_eq!(a, b);
        let c = init_factors(&v, 3, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_shapes_and_open_unit_range() {
        let v = random_data(10, 8, 255.0, 1);
        let f = init_factors(&v, 3, 1).unwrap();
        assert_eq!(f.w().dim(), (10, 3));
        assert_eq!(f.h().dim(), (3, 8));
        assert!(f
            .w()
            .iter()
            .chain(f.h().iter())
            .all(|x| *x > 0.0 && *x <= 1.0));
    }

    #[test]
    fn init_rejects_out_of_range_rank() {
        let v = random_data(10, 8, 255.0, 1);
        assert!(matches!(
            init_factors(&v, 11, 0),
            Err(NmfError::Dimension(_))
        ));
        assert!(matches!(init_factors(&v, 0, 0), Err(NmfError::Dimension(_))));
    }

    #[test]
    fn infinite_tolerance_stops_after_one_iteration() {
        let v = random_data(6, 5, 255.0, 2);
        let stop = StoppingRule::new(100, f64::INFINITY, 1e-12).unwrap();
        let (_, trace) = run_factorization(&v, Algorithm::Standard, 2, &stop, 5).unwrap();
        assert_eq!(trace.iterations_run, 1);
        assert!(trace.converged);
    }

    #[test]
    fn identical_runs_are_bitwise_identical() {
        let v = random_data(8, 7, 255.0, 9);
        let stop = StoppingRule::new(40, 0.0, 1e-12).unwrap();
        for algorithm in Algorithm::ALL {
            let (fa, ta) = run_factorization(&v, algorithm, 3, &stop, 11).unwrap();
            let (fb, tb) = run_factorization(&v, algorithm, 3, &stop, 11).unwrap();
            assert_eq!(fa, fb, "{algorithm} factors differ between runs");
            assert_eq!(ta, tb, "{algorithm} traces differ between runs");
        }
    }

    #[test]
    fn non_finite_objective_aborts_with_partial_trace() {
        // Entries around 1e150 keep the initial objective finite but overflow
        // once the multiplicative update amplifies W.
        let values = Array2::from_elem((4, 4), 1e150);
        let v = DataMatrix::new(values, vec![0; 4]).unwrap();
        let stop = StoppingRule::new(50, 0.0, 1e-12).unwrap();
        let err = run_factorization(&v, Algorithm::Standard, 2, &stop, 1).unwrap_err();
        match err {
            NmfError::NonFiniteObjective { iteration, trace } => {
                assert!(iteration >= 1);
                assert_eq!(trace.iterations_run, iteration - 1);
                assert!(!trace.converged);
            }
            other => panic!("expected NonFiniteObjective, got {other:?}"),
        }
    }

    #[test]
    fn stopping_rule_validation() {
        assert!(StoppingRule::new(0, 0.0, 1e-12).is_err());
        assert!(StoppingRule::new(1, -1.0, 1e-12).is_err());
        assert!(StoppingRule::new(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for algorithm in Algorithm::ALL {
            let parsed: Algorithm = algorithm.name().parse().unwrap();
            assert_eq!(parsed, algorithm);
        }
        assert!("pca".parse::<Algorithm>().is_err());
    }
}

//! Solve → estimate → mark → refine.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::estimator::{estimate, EstimatorConfig, IndicatorField};
use crate::mesh::{bisect, TwoRegionMesh};
use crate::norms::{compute_h_norm, FieldBundle};
use crate::params::PhysicalParams;
use crate::problem::ProblemData;
use crate::solver::{solve, DiscreteSolution, Discretization, SolverOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptConfig {
    /// Dörfler fraction θ ∈ (0, 1].
    pub theta: f64,
    /// Number of refinements; the loop solves `max_iterations + 1` times at
    /// most.
    pub max_iterations: usize,
    /// Stop once the number of solved unknowns reaches this.
    pub dof_budget: usize,
    /// Stop once the global Θ is at most this.
    pub stop_threshold: f64,
    pub solver: SolverOptions,
    pub estimator: EstimatorConfig,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            theta: 0.5,
            max_iterations: 6,
            dof_budget: 1_000_000,
            stop_threshold: 0.0,
            solver: SolverOptions::default(),
            estimator: EstimatorConfig::default(),
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::invalid("theta", alloc::format!("{} is not in (0, 1]", self.theta)));
        }
        if self.dof_budget == 0 {
            return Err(Error::invalid("dof_budget", "must be positive"));
        }
        if !(self.stop_threshold >= 0.0) {
            return Err(Error::invalid("stop_threshold", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptRecord {
    pub iteration: usize,
    /// Solved unknowns (constrained DOFs excluded).
    pub ndof: usize,
    pub num_triangles: usize,
    pub theta: f64,
    pub zeta: f64,
    /// `‖U − U_h‖_h`, when an exact solution was supplied.
    pub err_h_norm: Option<f64>,
    /// `‖U − U_h‖_h / (Θ + ζ)`.
    pub effectivity: Option<f64>,
    /// Triangles marked for refinement after this solve; 0 on the last one.
    pub marked: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdaptHistory {
    pub records: Vec<AdaptRecord>,
}

impl AdaptHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&AdaptRecord> {
        self.records.last()
    }
}

/// Final state of an adaptive run.
#[derive(Debug, Clone)]
pub struct AdaptOutcome {
    pub history: AdaptHistory,
    pub mesh: TwoRegionMesh,
    params: PhysicalParams,
    coefficients: Vec<f64>,
    pub indicators: IndicatorField,
}

impl AdaptOutcome {
    /// The solution on the final mesh.
    pub fn solution(&self) -> DiscreteSolution<'_> {
        DiscreteSolution::from_coefficients(&self.mesh, self.params, self.coefficients.clone())
            .expect("coefficients match the final mesh")
    }
}

/// Dörfler marking: the smallest set, taken greedily by descending `Θ_K²`
/// with ties broken by element id, whose indicators carry at least `θ` of
/// the total.
pub fn mark(indicators: &IndicatorField, theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid("theta", alloc::format!("{theta} is not in (0, 1]")));
    }
    let eta = indicators.theta_sq();
    let total: f64 = eta.iter().sum();
    if total <= 0.0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..eta.len()).filter(|&t| eta[t] > 0.0).collect();
    order.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
    if theta == 1.0 {
        // rounding could leave the running sum a hair short of the total
        order.sort_unstable();
        return Ok(order);
    }
    let goal = theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for t in order {
        if acc >= goal {
            break;
        }
        acc += eta[t];
        marked.push(t);
    }
    marked.sort_unstable();
    Ok(marked)
}

/// Runs the adaptive loop from `initial`; see [`adapt_loop_with`].
pub fn adapt_loop(
    initial: &TwoRegionMesh,
    problem: &dyn ProblemData,
    exact: Option<&dyn FieldBundle>,
    config: &AdaptConfig,
) -> Result<AdaptOutcome> {
    adapt_loop_with(initial, problem, exact, config, |_, _, _| {})
}

/// Runs the adaptive loop, calling `observe` after each solve and estimate.
/// Stops at the first of: Θ ≤ threshold, DOF budget reached, maximum number
/// of refinements done.
pub fn adapt_loop_with<F>(
    initial: &TwoRegionMesh,
    problem: &dyn ProblemData,
    exact: Option<&dyn FieldBundle>,
    config: &AdaptConfig,
    mut observe: F,
) -> Result<AdaptOutcome>
where
    F: FnMut(&AdaptRecord, &DiscreteSolution<'_>, &IndicatorField),
{
    config.validate()?;
    let wrap = |iteration: usize| move |e: Error| Error::AdaptFailure { iteration, source: Box::new(e) };
    let quad = config.estimator.quadrature;
    let mut mesh = initial.clone();
    let mut history = AdaptHistory::default();
    let mut iteration = 0;
    loop {
        let disc = Discretization::new(&mesh, problem, &quad).map_err(wrap(iteration))?;
        let sol = solve(&disc, &config.solver).map_err(wrap(iteration))?;
        let ind = estimate(&sol, problem, &config.estimator).map_err(wrap(iteration))?;
        let err = match exact {
            Some(u) => Some(compute_h_norm(&mesh, &sol, u, &quad).map_err(wrap(iteration))?.total),
            None => None,
        };
        let (theta, zeta) = (ind.theta(), ind.zeta());
        let ndof = disc.num_dofs();
        let done =
            iteration >= config.max_iterations || theta <= config.stop_threshold || ndof >= config.dof_budget;
        let marked = if done { Vec::new() } else { mark(&ind, config.theta)? };
        let record = AdaptRecord {
            iteration,
            ndof,
            num_triangles: mesh.num_triangles(),
            theta,
            zeta,
            err_h_norm: err,
            effectivity: err.map(|e| e / (theta + zeta)),
            marked: marked.len(),
        };
        observe(&record, &sol, &ind);
        history.records.push(record);
        if done || marked.is_empty() {
            let coefficients = sol.coefficients().to_vec();
            let params = *sol.params();
            drop(sol);
            return Ok(AdaptOutcome { history, mesh, params, coefficients, indicators: ind });
        }
        let next = bisect(&mesh, &marked).map_err(wrap(iteration))?;
        drop(sol);
        drop(disc);
        mesh = next;
        iteration += 1;
    }
}

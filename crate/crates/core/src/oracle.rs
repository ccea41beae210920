//! Brute-force ground truth over the window grid, and the harness that
//! compares a characterization against it.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::charac::{difference, enumerate_solution_set};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::kkt::enumerate_constrained;
use crate::model::{check_point_dim, CharacVariant, ConstrainedProblem, MultiplierVector, Program, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_value: f64,
    /// Feasible grid nodes with `f <= min_value + eps_opt`, row-major.
    pub solution_points: Vec<Vector>,
    /// Number of feasible nodes evaluated.
    pub grid_size: usize,
}

fn evaluate_all<P: Program + ?Sized + Sync>(p: &P, points: &[Vector], cfg: &Config) -> Result<Vec<f64>> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = points.len().div_ceil(workers).max(256);
    let f = p.objective();
    thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || part.iter().map(|x| f.eval(x, cfg).map_err(Error::from)).collect::<Result<Vec<_>>>())
            })
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for h in handles {
            out.extend(h.join().expect("oracle worker panicked")?);
        }
        Ok(out)
    })
}

pub fn brute_force_solutions<P: Program + ?Sized + Sync>(
    p: &P,
    resolution: usize,
    eps_opt: f64,
    cfg: &Config,
) -> Result<OracleResult> {
    let grid = p.feasible_grid(resolution, cfg)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values = evaluate_all(p, &grid, cfg)?;
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let grid_size = grid.len();
    let solution_points =
        grid.into_iter().zip(&values).filter(|(_, v)| **v <= min_value + eps_opt).map(|(x, _)| x).collect();
    Ok(OracleResult { min_value, solution_points, grid_size })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub variant: CharacVariant,
    pub equal: bool,
    /// Oracle solutions the characterization rejects.
    pub missing: Vec<Vector>,
    /// Points the characterization accepts that are not oracle solutions.
    pub extra: Vec<Vector>,
    pub oracle_size: usize,
}

impl AgreementReport {
    fn new(variant: CharacVariant, oracle: &[Vector], found: &[Vector]) -> Self {
        let missing = difference(oracle, found);
        let extra = difference(found, oracle);
        AgreementReport {
            variant,
            equal: missing.is_empty() && extra.is_empty(),
            missing,
            extra,
            oracle_size: oracle.len(),
        }
    }
}

/// Fails with `NotASolution` unless `x̄` is feasible and attains the grid minimum.
pub fn require_solution<P: Program + ?Sized>(
    p: &P,
    oracle: &OracleResult,
    xbar: &[f64],
    eps_opt: f64,
    cfg: &Config,
) -> Result<()> {
    check_point_dim(xbar, p.dimension())?;
    let value = p.objective().eval(xbar, cfg)?;
    if !p.is_feasible(xbar, cfg)? || value > oracle.min_value + eps_opt {
        return Err(Error::NotASolution { point: xbar.to_vec(), value, min: oracle.min_value });
    }
    Ok(())
}

pub fn agreement<P: Program + ?Sized + Sync>(
    p: &P,
    xbar: &[f64],
    variant: CharacVariant,
    resolution: usize,
    eps_opt: f64,
    cfg: &Config,
) -> Result<AgreementReport> {
    let oracle = brute_force_solutions(p, resolution, eps_opt, cfg)?;
    require_solution(p, &oracle, xbar, eps_opt, cfg)?;
    let found = enumerate_solution_set(p, xbar, variant, resolution, cfg)?;
    Ok(AgreementReport::new(variant, &oracle.solution_points, &found))
}

/// As [`agreement`] for the primed and double-primed variants.
pub fn agreement_constrained(
    cp: &ConstrainedProblem,
    xbar: &[f64],
    lambda: &MultiplierVector,
    variant: CharacVariant,
    resolution: usize,
    eps_opt: f64,
    cfg: &Config,
) -> Result<AgreementReport> {
    let oracle = brute_force_solutions(cp, resolution, eps_opt, cfg)?;
    require_solution(cp, &oracle, xbar, eps_opt, cfg)?;
    let found = enumerate_constrained(cp, xbar, lambda, variant, resolution, cfg)?;
    Ok(AgreementReport::new(variant, &oracle.solution_points, &found))
}

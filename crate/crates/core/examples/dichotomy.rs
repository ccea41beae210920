//! Classify solution sets: a common nonzero gradient direction (I) or
//! zero gradients everywhere (II).

use qcx::charac::classify_dichotomy;
use qcx::cli::registry;
use qcx::oracle::brute_force_solutions;
use qcx::Config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    for name in ["ex2_1", "ex2_2", "ex2_4", "ex4_1"] {
        let b = registry::builtin(name).unwrap();
        let lp = b.file.load()?;
        let o = brute_force_solutions(lp.program(), b.resolution, cfg.eps_opt, &cfg)?;
        let d = classify_dichotomy(lp.program(), &o.solution_points, &cfg)?;
        println!(
            "{name}: {} solutions, alternative {:?}, unit gradient {:?}",
            o.solution_points.len(),
            d.alternative,
            d.common_unit_gradient.map(|g| g.into_inner())
        );
    }
    Ok(())
}

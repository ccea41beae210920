//! Greenberg-Pierskalla route in 2-D and Martínez-Legaz route in 1-D.

use qcx::cli::registry;
use qcx::subdiff::{
    default_gp_candidates, default_ml_candidates, gp_member, gp_solution_check, ml_member_1d, ml_solution_set_1d,
    MLPair, MlForm,
};
use qcx::Config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();

    let b = registry::builtin("ex2_4").unwrap();
    let lp = b.file.load()?;
    let p = lp.program();
    let w = p.domain_window();
    println!("(1,0) in dGP f(0,0): {}", gp_member(p.objective(), &[0.0, 0.0], &[1.0, 0.0], w, 17, &cfg)?);
    println!("(0,-1) in dGP f(0,0): {}", gp_member(p.objective(), &[0.0, 0.0], &[0.0, -1.0], w, 17, &cfg)?);
    let cands = default_gp_candidates(p, &[0.0, 0.0], 8, &cfg)?;
    for x in [[0.0, -1.5], [0.0, 1.0], [1.0, -1.0]] {
        let r = gp_solution_check(p, &[0.0, 0.0], &x, &cands, w, 17, &cfg)?;
        println!("GP route at {x:?}: {} {:?}", r.member, r.certificate.map(|v| v.into_inner()));
    }

    let b = registry::builtin("ex4_1").unwrap();
    let lp = b.file.load()?;
    let p = lp.program();
    let inf_window = p.domain_window().padded(0.5);
    for (x, v, t) in [(0.5, 1.0, 0.4), (1.5, 1.0, 1.5), (1.5, 1.0, 1.0), (0.5, -1.0, -2.0)] {
        let r = ml_member_1d(p.objective(), x, MLPair::new(v, t)?, &inf_window, 401, &cfg)?;
        println!("({v}, {t}) in dM f({x}): {} (inf {:?})", r.member, r.infimum);
    }
    let grid = p.feasible_grid(21, &cfg)?;
    let sols = ml_solution_set_1d(p, 0.0, &grid, &default_ml_candidates(), &inf_window, 401, MlForm::M2, &cfg)?;
    println!("ML solutions on 21 nodes: {:?}", sols.iter().map(|x| x[0]).collect::<Vec<_>>());
    Ok(())
}

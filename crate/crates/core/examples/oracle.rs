//! Brute-force minimizers, and the agreement of a characterization with them.

use qcx::cli::registry;
use qcx::oracle::{agreement, brute_force_solutions};
use qcx::{CharacVariant, Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let b = registry::builtin("ex2_3").unwrap();
    let lp = b.file.load()?;
    let p = lp.program();

    let o = brute_force_solutions(p, 41, cfg.eps_opt, &cfg)?;
    println!("min {} over {} feasible nodes at {:?}", o.min_value, o.grid_size, o.solution_points);

    for v in [CharacVariant::SHat2, CharacVariant::S2, CharacVariant::T2] {
        let r = agreement(p, &[1.0, 1.0], v, 41, cfg.eps_opt, &cfg)?;
        println!("{v}: equal = {}, missing {}, extra {}", r.equal, r.missing.len(), r.extra.len());
    }

    match agreement(p, &[0.0, 0.0], CharacVariant::S1, 41, cfg.eps_opt, &cfg) {
        Err(e) => println!("wrong anchor: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

//! Membership residuals for one point, then every variant enumerated on
//! the triangle `1 <= x1 <= 2, 0 <= x2 <= x1` with `f = x2/x1`.

use qcx::charac::{enumerate_solution_set, membership, variant_agreement};
use qcx::cli::registry;
use qcx::{CharacVariant, Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let b = registry::builtin("ex2_1").unwrap();
    let lp = b.file.load()?;
    let p = lp.program();
    let xbar = [1.0, 0.0];

    for x in [[1.5, 0.0], [1.5, 0.5]] {
        let v = membership(p, &xbar, &x, CharacVariant::S4, &cfg)?;
        println!("S4 at {x:?}: member = {}", v.member);
        for (name, r) in &v.residuals {
            println!("    {name:<22} {:>12.6} {:?}", r.value, r.test);
        }
    }

    let s5 = enumerate_solution_set(p, &xbar, CharacVariant::S5, 11, &cfg)?;
    println!("S5 on an 11x11 grid: {:?}", s5.iter().map(|x| x.as_slice()).collect::<Vec<_>>());

    let all = variant_agreement(p, &xbar, &CharacVariant::T_FAMILY, 41, &cfg)?;
    println!("T family agrees: {} {:?}", all.agree, all.sizes);
    Ok(())
}

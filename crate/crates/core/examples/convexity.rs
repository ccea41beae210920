//! Sampled convexity checks. `x1^3` is quasiconvex but not pseudoconvex:
//! its gradient vanishes at 0 although lower values exist.

use qcx::convexity::{check_first_order_qcx, check_levelset_convex, check_pseudoconvex_at, check_quasiconvex};
use qcx::expr::parse;
use qcx::{Config, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let w = Window::new(vec![-1.0, -2.0], vec![2.0, 2.0])?;
    let cube = parse("x1^3", 2)?;

    let q = check_quasiconvex(&cube, &w, 500, 16, &cfg)?;
    println!("quasiconvex: {} ({} segments)", q.holds, q.checked);
    let fo = check_first_order_qcx(&cube, &w, 500, &cfg)?;
    println!("first-order condition: {} ({} pairs)", fo.holds, fo.checked);
    let ls = check_levelset_convex(&cube, 0.5, &w, 21, &cfg)?;
    println!("level set f <= 0.5 convex: {}", ls.holds);
    let pc = check_pseudoconvex_at(&cube, &[0.0, 0.0], &w, 200, &cfg)?;
    match &pc.counterexample {
        Some(c) => println!("not pseudoconvex at 0: f({:?}) = {} with directional {}", c.y.as_slice(), c.value, c.directional),
        None => println!("pseudoconvex at 0"),
    }

    let saddle = parse("x1*x2", 2)?;
    let r = check_quasiconvex(&saddle, &w, 500, 16, &cfg)?;
    println!("x1*x2 quasiconvex: {} {:?}", r.holds, r.counterexample.map(|c| (c.x.into_inner(), c.y.into_inner(), c.t)));
    Ok(())
}

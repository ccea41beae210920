//! Parse objectives, evaluate them, and compare dual-number gradients with
//! central differences.

use qcx::expr::parse;
use qcx::Config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();

    let f = parse("-x1 - x2 + sqrt((x1 - x2)^2 + 4)", 2)?;
    let x = [0.5, -0.25];
    println!("f          = {f}");
    println!("f(x)       = {}", f.eval(&x, &cfg)?);
    println!("grad f(x)  = {:?}", f.grad(&x, &cfg)?.as_slice());
    println!("fd  f(x)   = {:?}", f.grad_fd(&x, cfg.h_fd, &cfg)?.as_slice());

    // C1 piecewise: both branches meet at x1 = 1 with slope 0
    let g = parse("pw[x1 <= 1: 0; x1 >= 1: (x1 - 1)^2]", 1)?;
    println!("g'(1)      = {:?}", g.grad(&[1.0], &cfg)?.as_slice());

    // a kink is refused rather than resolved to one side
    let kink = parse("pw[x1 <= 0: -x1; x1 >= 0: 2*x1]", 1)?;
    println!("kink'(0)   = {}", kink.grad(&[0.0], &cfg).unwrap_err());

    match parse("x1 + y", 1) {
        Err(e) => println!("bad input  : {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

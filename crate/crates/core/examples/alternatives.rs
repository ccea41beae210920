//! Gordan's alternative, the collinearity factor and strict feasibility.

use qcx::alternatives::{collinearity_factor, gordan_alternative, strict_feasibility, GordanResult};
use qcx::Config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let systems = [vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 2.0], vec![-2.0, -4.0]], vec![vec![1.0], vec![-1.0]]];
    for a in &systems {
        match gordan_alternative(a, &cfg)? {
            GordanResult::Primal { x, margin } => println!("{a:?}: Ax > 0 at {:?} (margin {margin})", x.as_slice()),
            GordanResult::Dual { y } => println!("{a:?}: A'y = 0 with y = {:?}", y.as_slice()),
        }
    }

    println!("p for (0,2) = p (0,1): {:?}", collinearity_factor(&[0.0, 1.0], &[0.0, 2.0], &cfg)?);
    println!("p for (0,-1) = p (0,1): {:?}", collinearity_factor(&[0.0, 1.0], &[0.0, -1.0], &cfg)?);

    // y1 >= 0 and y1 + y2 < 0 inside the unit box
    let s = strict_feasibility(2, &[vec![-1.0, 0.0]], &[0.0], &[vec![1.0, 1.0]], &[0.0], &cfg)?;
    println!("strict system: {s:?}");
    Ok(())
}

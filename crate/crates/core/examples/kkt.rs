//! Multipliers, the constraint qualification and the primed sets for
//! `min -x1 - x2 + sqrt((x1 - x2)^2 + 4)` s.t. `x1^2 + x2^2 <= 2`.

use qcx::cli::registry;
use qcx::kkt::{active_set, check_gmfcq, enumerate_constrained, lagrangian_constancy, member_x1, solve_multipliers};
use qcx::{CharacVariant, Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let b = registry::builtin("ex2_3_constrained").unwrap();
    let lp = b.file.load()?;
    let cp = lp.constrained().unwrap();
    let xbar = [1.0, 1.0];

    let cq = check_gmfcq(cp, &xbar, &cfg)?;
    println!("GMFCQ: {} along {:?}", cq.holds, cq.direction.map(|d| d.into_inner()));
    let m = solve_multipliers(cp, &xbar, &cfg)?;
    println!("lambda = {:?}, stationarity {:e}", m.lambda.lambdas(), m.stationarity_residual);
    println!("active: {:?}", active_set(cp, &xbar, Some(&m.lambda), &cfg)?);

    for x in [[1.0, 1.0], [-1.0, 1.0], [0.5, 0.5]] {
        println!("{x:?} in X1(lambda): {}", member_x1(cp, &xbar, &m.lambda, &x, &cfg)?);
    }
    for v in [CharacVariant::SHatPrime1, CharacVariant::SPrime4, CharacVariant::SHatDoublePrime2] {
        let pts = enumerate_constrained(cp, &xbar, &m.lambda, v, 41, &cfg)?;
        println!("{v}: {:?}", pts.iter().map(|p| p.as_slice()).collect::<Vec<_>>());
    }
    let lag = lagrangian_constancy(cp, &xbar, &m.lambda, &[qcx::Vector::new(vec![1.0, 1.0])?], &cfg)?;
    println!("Lagrangian constant: {}", lag.constant);
    Ok(())
}

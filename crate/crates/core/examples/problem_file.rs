//! Load a JSON problem file and drive the command line in-process.
//!
//! cargo run --example problem_file -- examples/problems/ex2_2.json

use qcx::charac::enumerate_solution_set;
use qcx::cli::ProblemFile;
use qcx::{CharacVariant, Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/problems/ex2_2.json").to_string());
    let file = ProblemFile::from_json(&std::fs::read_to_string(&path)?)?;
    let cfg = file.config.map(|o| Config::default().with(&o)).unwrap_or_default();
    let lp = file.load()?;
    let xbar = file.known_solution.clone().ok_or("file has no known_solution")?;

    let pts = enumerate_solution_set(lp.program(), &xbar, CharacVariant::SHat1, 13, &cfg)?;
    println!("{path}: SHAT1 has {} grid points", pts.len());

    let mut out = Vec::new();
    let code = qcx::cli::run(["qcx", "classify", "--problem", &path, "--resolution", "13"], &mut out, &mut std::io::stderr());
    println!("qcx classify -> exit {code}\n{}", String::from_utf8(out)?);
    Ok(())
}

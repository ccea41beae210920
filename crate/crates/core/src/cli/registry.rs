//! Builtin problems with their known solution sets.

use crate::model::{Alternative, CharacVariant, Window};
use crate::sets::Atom;

use super::problem_file::ProblemFile;
use CharacVariant::*;

/// A ready-made problem plus everything needed to check it end to end.
#[derive(Debug, Clone)]
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    pub file: ProblemFile,
    /// Grid resolution per axis at which the closed-form solution set is on-grid.
    pub resolution: usize,
    /// The multiplier at the known solution, for constrained problems.
    pub lambda: Option<Vec<f64>>,
    /// Variants whose set equals the solution set on this problem.
    pub variants: &'static [CharacVariant],
    pub alternative: Alternative,
    /// Closed-form membership in the solution set.
    pub solution: fn(&[f64]) -> bool,
}

pub const NAMES: &[&str] = &["ex2_1", "ex2_2", "ex2_3", "ex2_4", "ex4_1", "ex2_3_constrained", "ex2_1_constrained"];

const S_FAMILY: &[CharacVariant] = &[SHat1, SHat2, S1, S2, S3, S4, S5];
const PSEUDOCONVEX: &[CharacVariant] = &[SHat1, SHat2, S1, S2, S3, S4, S5, THat1, THat2, T1, T2, T3, T4, T5];
const PRIMED: &[CharacVariant] =
    &[SHatPrime1, SHatPrime2, SPrime1, SPrime2, SPrime3, SPrime4, SPrime5, SHatDoublePrime1, SHatDoublePrime2];

const EX2_3_F: &str = "-x1 - x2 + sqrt((x1 - x2)^2 + 4)";
const EX2_4_F: &str = "pw[x1 >= 0 & x2 >= 0: x1^2 + x2^2; x1 <= 0 & x2 >= 0: x2^2; \
                       x1 <= 0 & x2 <= 0: -x1^2*x2^2; x1 >= 0 & x2 <= 0: x1^2]";

fn window(lo: &[f64], hi: &[f64]) -> Window {
    Window { lo: lo.to_vec(), hi: hi.to_vec() }
}

fn plain(n: usize, f: &str, set: Vec<Atom>, w: Window, xbar: &[f64]) -> ProblemFile {
    ProblemFile {
        dimension: n,
        objective: f.into(),
        feasible_set: set,
        domain_window: w,
        constraints: None,
        ground_set: None,
        known_solution: Some(xbar.to_vec()),
        config: None,
    }
}

fn constrained(f: &str, gs: &[&str], w: Window, xbar: &[f64]) -> ProblemFile {
    ProblemFile {
        dimension: xbar.len(),
        objective: f.into(),
        feasible_set: Vec::new(),
        domain_window: w,
        constraints: Some(gs.iter().map(|g| g.to_string()).collect()),
        ground_set: None,
        known_solution: Some(xbar.to_vec()),
        config: None,
    }
}

pub fn builtin(name: &str) -> Option<Builtin> {
    let b = match name {
        "ex2_1" => Builtin {
            name: "ex2_1",
            summary: "x2/x1 on the triangle 1 <= x1 <= 2, 0 <= x2 <= x1 (pseudoconvex)",
            file: plain(
                2,
                "x2/x1",
                vec![
                    Atom::Box { lo: vec![1.0, 0.0], hi: vec![2.0, 2.0] },
                    Atom::Halfspace { a: vec![-1.0, 1.0], b: 0.0 },
                ],
                window(&[1.0, 0.0], &[2.0, 2.0]),
                &[1.0, 0.0],
            ),
            resolution: 41,
            lambda: None,
            variants: PSEUDOCONVEX,
            alternative: Alternative::I,
            solution: |x| x[1] == 0.0,
        },
        "ex2_2" => Builtin {
            name: "ex2_2",
            summary: "x1^3 on the half-plane x1 >= -1 (quasiconvex, not pseudoconvex)",
            file: plain(
                2,
                "x1^3",
                vec![Atom::Halfspace { a: vec![-1.0, 0.0], b: 1.0 }],
                window(&[-1.0, -2.0], &[2.0, 2.0]),
                &[-1.0, 0.0],
            ),
            resolution: 13,
            lambda: None,
            variants: S_FAMILY,
            alternative: Alternative::I,
            solution: |x| x[0] == -1.0,
        },
        "ex2_3" => Builtin {
            name: "ex2_3",
            summary: "-x1 - x2 + sqrt((x1 - x2)^2 + 4) on the disk of radius sqrt(2)",
            file: plain(
                2,
                EX2_3_F,
                vec![Atom::Ball { center: vec![0.0, 0.0], radius: 2f64.sqrt() }],
                window(&[-2.0, -2.0], &[2.0, 2.0]),
                &[1.0, 1.0],
            ),
            resolution: 41,
            lambda: None,
            variants: S_FAMILY,
            alternative: Alternative::I,
            solution: |x| x == [1.0, 1.0],
        },
        "ex2_4" => Builtin {
            name: "ex2_4",
            summary: "four-branch C1 function on x1 >= 0, zero gradient along the solution ray",
            file: plain(
                2,
                EX2_4_F,
                vec![Atom::Halfspace { a: vec![-1.0, 0.0], b: 0.0 }],
                window(&[-2.0, -2.0], &[2.0, 2.0]),
                &[0.0, 0.0],
            ),
            resolution: 17,
            lambda: None,
            variants: &[STilde],
            alternative: Alternative::II,
            solution: |x| x[0] == 0.0 && x[1] <= 0.0,
        },
        "ex4_1" => Builtin {
            name: "ex4_1",
            summary: "flat on [0, 1], -x^2 to the left, (x - 1)^2 to the right, over S = [0, 2]",
            file: plain(
                1,
                "pw[x1 <= 0: -x1^2; x1 >= 0 & x1 <= 1: 0; x1 >= 1: (x1 - 1)^2]",
                vec![Atom::Box { lo: vec![0.0], hi: vec![2.0] }],
                window(&[0.0], &[2.0]),
                &[0.0],
            ),
            resolution: 201,
            lambda: None,
            variants: &[STilde],
            alternative: Alternative::II,
            solution: |x| (0.0..=1.0).contains(&x[0]),
        },
        "ex2_3_constrained" => Builtin {
            name: "ex2_3_constrained",
            summary: "ex2_3 with the disk written as x1^2 + x2^2 - 2 <= 0 over X = R^2",
            file: constrained(EX2_3_F, &["x1^2 + x2^2 - 2"], window(&[-2.0, -2.0], &[2.0, 2.0]), &[1.0, 1.0]),
            resolution: 41,
            lambda: Some(vec![0.5]),
            variants: PRIMED,
            alternative: Alternative::I,
            solution: |x| x == [1.0, 1.0],
        },
        "ex2_1_constrained" => Builtin {
            name: "ex2_1_constrained",
            summary: "ex2_1 with the triangle written as four affine constraints over X = R^2",
            file: constrained(
                "x2/x1",
                &["1 - x1", "x1 - 2", "-x2", "x2 - x1"],
                window(&[1.0, 0.0], &[2.0, 2.0]),
                &[1.0, 0.0],
            ),
            resolution: 41,
            lambda: Some(vec![0.0, 0.0, 1.0, 0.0]),
            variants: PRIMED,
            alternative: Alternative::I,
            solution: |x| x[1] == 0.0,
        },
        _ => return None,
    };
    Some(b)
}

pub fn all() -> Vec<Builtin> {
    NAMES.iter().filter_map(|n| builtin(n)).collect()
}

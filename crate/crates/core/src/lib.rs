//! Executable solution-set characterizations for differentiable
//! quasiconvex programs.
//!
//! Given a problem `min f(x) s.t. x ∈ S` and one known minimizer `x̄`, the
//! [`charac`] module decides membership of any point in the families
//! `Ŝ₁, Ŝ₂, S̃, S₁..S₅, T̂₁, T̂₂, T₁..T₅`, each of which equals the solution set
//! under the appropriate hypothesis. [`kkt`] does the same for
//! inequality-constrained problems with a fixed Lagrange multiplier, and
//! [`subdiff`] implements two subdifferential-based routes for comparison.
//! Every characterization can be checked against the grid oracle in
//! [`oracle`].

pub mod alternatives;
pub mod charac;
pub mod cli;
pub mod config;
pub mod convexity;
pub mod error;
pub mod expr;
pub mod kkt;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod sets;
pub mod subdiff;

pub use config::{Config, ConfigOverrides};
pub use error::{Error, Result};
pub use expr::Expr;
pub use model::{
    Alternative, CharacVariant, ConstrainedProblem, DichotomyReport, MembershipVerdict, MultiplierVector, Problem,
    Program, Vector, Window,
};
pub use sets::{Atom, ConeRep, ConvexSetDescriptor};

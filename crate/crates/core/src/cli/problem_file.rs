use serde::{Deserialize, Serialize};

use crate::config::ConfigOverrides;
use crate::error::{Error, Result};
use crate::expr::parse;
use crate::model::{ConstrainedProblem, Problem, Program, Window};
use crate::sets::{Atom, ConvexSetDescriptor};

/// On-disk problem description.
///
/// A file with `constraints` describes `min f s.t. x ∈ X, g_i(x) <= 0`
/// where `X` is `ground_set` (all of ℝⁿ when omitted); otherwise it describes
/// `min f s.t. x ∈ S` with `S` given by `feasible_set`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub objective: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feasible_set: Vec<Atom>,
    pub domain_window: Window,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_set: Option<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigOverrides>,
}

pub enum LoadedProblem {
    Plain(Problem),
    Constrained(ConstrainedProblem),
}

impl LoadedProblem {
    pub fn program(&self) -> &(dyn Program + Sync) {
        match self {
            LoadedProblem::Plain(p) => p,
            LoadedProblem::Constrained(c) => c,
        }
    }

    pub fn constrained(&self) -> Option<&ConstrainedProblem> {
        match self {
            LoadedProblem::Constrained(c) => Some(c),
            LoadedProblem::Plain(_) => None,
        }
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }

    pub fn load(&self) -> Result<LoadedProblem> {
        let n = self.dimension;
        if self.domain_window.dimension() != n {
            return Err(Error::dim("domain_window", n, self.domain_window.dimension()));
        }
        let objective = parse(&self.objective, n)?;
        match &self.constraints {
            Some(cs) => {
                if !self.feasible_set.is_empty() {
                    return Err(Error::InvalidInput(
                        "use ground_set, not feasible_set, together with constraints".into(),
                    ));
                }
                let gs = cs.iter().map(|g| parse(g, n)).collect::<std::result::Result<Vec<_>, _>>()?;
                let ground = ConvexSetDescriptor::new(n, self.ground_set.clone().unwrap_or_default())?;
                Ok(LoadedProblem::Constrained(ConstrainedProblem::new(
                    objective,
                    gs,
                    ground,
                    self.domain_window.clone(),
                )?))
            }
            None => {
                if self.ground_set.is_some() {
                    return Err(Error::InvalidInput("ground_set needs constraints".into()));
                }
                let set = ConvexSetDescriptor::new(n, self.feasible_set.clone())?;
                Ok(LoadedProblem::Plain(Problem::new(objective, set, self.domain_window.clone())?))
            }
        }
    }
}

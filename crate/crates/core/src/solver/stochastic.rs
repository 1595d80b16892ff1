use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{solve_single, SolveResult};
use crate::error::{Error, Result};
use crate::game::{check_vector, SinglePeriodGame, WeightSystem};
use crate::set::StrategyProfile;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub probability: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

/// Finitely many equally-shaped `(X, P)` outcomes with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    scenarios: Vec<Scenario>,
    players: usize,
}

impl ScenarioSet {
    /// Probabilities must be non-negative and sum to one within `tolerance`.
    /// They are not renormalised.
    pub fn new(scenarios: Vec<Scenario>, tolerance: Tolerance) -> Result<Self> {
        let Some(first) = scenarios.first() else {
            return Err(Error::InvalidScenarios("no scenarios".into()));
        };
        let players = first.x.len();
        let mut total = 0.0;
        for (n, s) in scenarios.iter().enumerate() {
            if !s.probability.is_finite() || s.probability < 0.0 {
                return Err(Error::InvalidScenarios(format!(
                    "scenario {} has probability {}",
                    n + 1,
                    s.probability
                )));
            }
            check_vector("scenario X", &s.x, players)?;
            check_vector("scenario P", &s.p, players)?;
            total += s.probability;
        }
        if !tolerance.eq(total, 1.0) {
            return Err(Error::InvalidScenarios(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(ScenarioSet { scenarios, players })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    /// `(E[X], E[P])`.
    pub fn expectation(&self) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; self.players];
        let mut p = vec![0.0; self.players];
        for s in &self.scenarios {
            for k in 0..self.players {
                x[k] += s.probability * s.x[k];
                p[k] += s.probability * s.p[k];
            }
        }
        (x, p)
    }

    /// The deterministic game with `X' = E[X]`, `P' = E[P]`.
    pub fn expected_game(&self, w: &WeightSystem) -> Result<SinglePeriodGame> {
        let (x, p) = self.expectation();
        SinglePeriodGame::new(w.clone(), x, p)
    }
}

/// Solves a single-period game with random payoffs. Payoffs are linear in
/// `(X, P)`, so only the expectations matter.
pub fn solve_single_stochastic(
    sc: &ScenarioSet,
    w: &WeightSystem,
) -> Result<SolveResult<StrategyProfile>> {
    Ok(solve_single(&sc.expected_game(w)?))
}

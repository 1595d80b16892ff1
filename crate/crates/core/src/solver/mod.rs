//! Value and optimal-equilibrium computation.

mod perfect;
mod quitting;
mod stochastic;

use crate::game::{PayoffVector, SinglePeriodGame};
use crate::geometry::{project_orthant, OrthantSpec};
use crate::set::{ExerciseSet, StrategyProfile};

pub use perfect::{
    solve_quitting_subgame_perfect, HistoryState, StateEntry, SubgamePerfectTable,
    PERFECT_MAX_HORIZON, PERFECT_MAX_PLAYERS, PERFECT_MAX_STATES,
};
pub use quitting::{quitting_payoff, solve_quitting, QuittingGame, QuittingProfile};
pub use stochastic::{solve_single_stochastic, Scenario, ScenarioSet};

/// A game's value with one optimal equilibrium attaining it.
///
/// `active_set` holds the players that exercise in `equilibrium`; their value
/// coordinate equals their exercise payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<S> {
    pub value: PayoffVector,
    pub equilibrium: S,
    pub active_set: ExerciseSet,
}

/// Value `pi_O(P)` of a single-period game and the equilibrium exercising
/// exactly the coordinates pinned at `X`.
pub fn solve_single(g: &SinglePeriodGame) -> SolveResult<StrategyProfile> {
    let orthant = OrthantSpec::new(g.exercise_payoffs().to_vec());
    let projection = project_orthant(g.terminal_payoffs(), &orthant, g.weights())
        .expect("game dimensions are validated at construction");
    let equilibrium = StrategyProfile::from_exercise_set(g.players(), projection.active_set)
        .expect("active set lies within the players");
    SolveResult {
        value: projection.value,
        equilibrium,
        active_set: projection.active_set,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::WeightSystem;
    use crate::tolerance::Tolerance;
    use alloc::vec;

    #[test]
    fn single_player_keeps_larger_payoff() {
        let w = WeightSystem::new(vec![0.5], Tolerance::DEFAULT).unwrap();
        let g = SinglePeriodGame::new(w, vec![3.0], vec![5.0]).unwrap();
        let r = solve_single(&g);
        assert_eq!(r.value.as_slice(), [5.0]);
        assert!(r.active_set.is_empty());
        assert_eq!(r.equilibrium.decisions(), [1]);
    }

    #[test]
    fn saturated_two_player_clamp() {
        let w = WeightSystem::new(vec![0.5, 0.5], Tolerance::DEFAULT).unwrap();
        let g = SinglePeriodGame::new(w, vec![0.0, -2.0], vec![3.0, -3.0]).unwrap();
        let r = solve_single(&g);
        assert!(r.value.approx_eq(&[2.0, -2.0], Tolerance::DEFAULT));
        assert_eq!(r.active_set, ExerciseSet::singleton(1));
        assert_eq!(r.equilibrium.decisions(), [1, 0]);
    }

    #[test]
    fn weights_summing_past_one_are_rejected() {
        assert!(WeightSystem::new(vec![0.6, 0.6], Tolerance::DEFAULT).is_err());
    }
}

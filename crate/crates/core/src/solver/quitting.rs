//! Deterministic quitting games: a player who exercises at `t < T` leaves
//! with `X_{k,t}`; everyone still in at `T` shares the adjustment caused by
//! those who left.

use alloc::format;
use alloc::vec::Vec;

use super::SolveResult;
use crate::error::{Error, Result};
use crate::game::{check_vector, payoff_with, PayoffVector, WeightSystem};
use crate::geometry::{project_orthant, OrthantSpec};
use crate::set::ExerciseSet;

#[derive(Debug, Clone, PartialEq)]
pub struct QuittingGame {
    weights: WeightSystem,
    /// `rows[t][k] = X_{k,t}` for `t = 0..=T`.
    rows: Vec<Vec<f64>>,
}

impl QuittingGame {
    pub fn new(weights: WeightSystem, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidQuittingGame(format!(
                "need rows for t = 0..=T with T >= 1, got {} row(s)",
                rows.len()
            )));
        }
        let m = weights.players();
        for row in &rows {
            check_vector("quitting payoff row", row, m)?;
        }
        Ok(QuittingGame { weights, rows })
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn players(&self) -> usize {
        self.weights.players()
    }

    /// `T`.
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `X_{k,t}`.
    pub fn payoff_at(&self, t: usize, k: usize) -> f64 {
        self.rows[t][k]
    }

    pub fn terminal(&self) -> &[f64] {
        &self.rows[self.horizon()]
    }

    /// `max_{0 <= t < T} X_{k,t}` for every player.
    pub fn running_max(&self) -> Vec<f64> {
        running_max_from(&self.rows, 0)
    }
}

pub(crate) fn running_max_from(rows: &[Vec<f64>], from: usize) -> Vec<f64> {
    let horizon = rows.len() - 1;
    let m = rows[0].len();
    (0..m)
        .map(|k| (from + 1..horizon).fold(rows[from][k], |best, t| best.max(rows[t][k])))
        .collect()
}

/// Exercise times `s_k` in `0..=T`; `s_k = T` means the player never quits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuittingProfile {
    times: Vec<usize>,
}

impl QuittingProfile {
    pub fn new(times: Vec<usize>, horizon: usize) -> Result<Self> {
        if let Some((k, &t)) = times.iter().enumerate().find(|(_, &t)| t > horizon) {
            return Err(Error::InvalidProfile(format!(
                "player {} quits at {t}, past the horizon {horizon}",
                k + 1
            )));
        }
        Ok(QuittingProfile { times })
    }

    pub fn times(&self) -> &[usize] {
        &self.times
    }

    /// Players quitting before `horizon`.
    pub fn exercise_set(&self, horizon: usize) -> ExerciseSet {
        self.times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t < horizon)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Payoff of a quitting profile.
pub fn quitting_payoff(q: &QuittingGame, s: &QuittingProfile) -> Result<PayoffVector> {
    let m = q.players();
    let horizon = q.horizon();
    if s.times.len() != m {
        return Err(Error::DimensionMismatch {
            what: "quitting profile",
            expected: m,
            found: s.times.len(),
        });
    }
    if s.times.iter().any(|&t| t > horizon) {
        return Err(Error::InvalidProfile(format!(
            "quitting time past the horizon {horizon}"
        )));
    }
    let terminal = q.terminal();
    let quit_payoffs: Vec<f64> = (0..m).map(|k| q.rows[s.times[k]][k]).collect();
    Ok(payoff_with(
        &q.weights,
        &quit_payoffs,
        terminal,
        s.exercise_set(horizon),
    ))
}

/// Value of a quitting game and an information-free optimal equilibrium.
///
/// The value is the single-period value with `X'_k = max_{t<T} X_{k,t}` and
/// `P'_k = X_{k,T}`. Active players quit at the first time their running
/// maximum is attained, so `quitting_payoff` of the returned profile
/// reproduces the value bit for bit; everyone else waits until `T`.
pub fn solve_quitting(q: &QuittingGame) -> SolveResult<QuittingProfile> {
    let horizon = q.horizon();
    let best = q.running_max();
    let projection = project_orthant(q.terminal(), &OrthantSpec::new(best.clone()), &q.weights)
        .expect("quitting rows are validated at construction");
    let times = (0..q.players())
        .map(|k| {
            if projection.active_set.contains(k) {
                (0..horizon)
                    .find(|&t| q.rows[t][k] == best[k])
                    .expect("running maximum is attained")
            } else {
                horizon
            }
        })
        .collect();
    SolveResult {
        value: projection.value,
        equilibrium: QuittingProfile { times },
        active_set: projection.active_set,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::Tolerance;
    use alloc::vec;

    fn worked_game() -> QuittingGame {
        let w = WeightSystem::new(vec![0.25, 0.25], Tolerance::DEFAULT).unwrap();
        QuittingGame::new(w, vec![vec![5.0, 0.0], vec![3.0, 1.0], vec![4.0, 2.0]]).unwrap()
    }

    #[test]
    fn payoff_examples() {
        let q = worked_game();
        let all_wait = QuittingProfile::new(vec![2, 2], 2).unwrap();
        assert_eq!(
            quitting_payoff(&q, &all_wait).unwrap().as_slice(),
            [4.0, 2.0]
        );

        let v = quitting_payoff(&q, &QuittingProfile::new(vec![0, 2], 2).unwrap()).unwrap();
        assert_eq!(v[0], 5.0);
        assert!((v[1] - 5.0 / 3.0).abs() < 1e-12);

        let v = quitting_payoff(&q, &QuittingProfile::new(vec![1, 2], 2).unwrap()).unwrap();
        assert_eq!(v[0], 3.0);
        assert!((v[1] - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn solve_worked_game() {
        let q = worked_game();
        let r = solve_quitting(&q);
        assert!(r.value.approx_eq(&[5.0, 5.0 / 3.0], Tolerance::DEFAULT));
        assert_eq!(r.equilibrium.times(), [0, 2]);
        assert_eq!(quitting_payoff(&q, &r.equilibrium).unwrap(), r.value);
    }

    #[test]
    fn terminal_dominant_game_waits() {
        let w = WeightSystem::new(vec![0.3, 0.3, 0.3], Tolerance::DEFAULT).unwrap();
        let q = QuittingGame::new(
            w,
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 3.0, 4.0],
            ],
        )
        .unwrap();
        let r = solve_quitting(&q);
        assert_eq!(r.value.as_slice(), [2.0, 3.0, 4.0]);
        assert_eq!(r.equilibrium.times(), [2, 2, 2]);
    }

    #[test]
    fn single_player_takes_running_max() {
        let w = WeightSystem::new(vec![0.5], Tolerance::DEFAULT).unwrap();
        let q = QuittingGame::new(w, vec![vec![7.0], vec![4.0]]).unwrap();
        let r = solve_quitting(&q);
        assert_eq!(r.value.as_slice(), [7.0]);
        assert_eq!(r.equilibrium.times(), [0]);
    }

    #[test]
    fn validation() {
        let w = WeightSystem::new(vec![0.5], Tolerance::DEFAULT).unwrap();
        assert!(QuittingGame::new(w.clone(), vec![vec![1.0]]).is_err());
        assert!(QuittingGame::new(w, vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(QuittingProfile::new(vec![3], 2).is_err());
        let q = worked_game();
        assert!(quitting_payoff(&q, &QuittingProfile::new(vec![0], 2).unwrap()).is_err());
    }
}

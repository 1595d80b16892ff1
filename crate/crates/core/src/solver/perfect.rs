//! Subgame-perfect strategies for perfect-information quitting games.
//!
//! Once the players in `E` have quit at known times, the game left to the
//! survivors on `[t, T]` is again a quitting game: running payoffs are
//! unchanged, the terminal row becomes
//! `X_{k,T} - w_k(E) * sum_{i in E} (X_{i,s_i} - X_{i,T})` and the weights
//! become `a'_k = w_k(E)`. Solving that game at every reachable history gives
//! a strategy table that is an optimal equilibrium in every subgame.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use super::quitting::{solve_quitting, QuittingGame, QuittingProfile};
use crate::error::{Error, Result};
use crate::game::{difference, PayoffVector, WeightSource, WeightSystem};
use crate::set::ExerciseSet;

pub const PERFECT_MAX_PLAYERS: usize = 10;
pub const PERFECT_MAX_HORIZON: usize = 10;
/// Cap on the number of tabulated histories.
pub const PERFECT_MAX_STATES: usize = 1 << 20;

/// A history at the start of period `time`: who has quit, and when.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HistoryState {
    pub time: usize,
    /// `departures[k] = Some(t)` if player `k` quit at `t < time`.
    pub departures: Vec<Option<usize>>,
}

impl HistoryState {
    pub fn initial(players: usize) -> Self {
        HistoryState {
            time: 0,
            departures: alloc::vec![None; players],
        }
    }

    pub fn departed(&self) -> ExerciseSet {
        self.departures
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some())
            .map(|(k, _)| k)
            .collect()
    }

    pub fn survivors(&self) -> ExerciseSet {
        self.departed().complement(self.departures.len())
    }
}

/// What the table prescribes at one history.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEntry {
    /// Survivors who quit now.
    pub exercising: ExerciseSet,
    /// Value of the continuation game; departed players carry the payoff they
    /// quit with.
    pub value: PayoffVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgamePerfectTable {
    horizon: usize,
    players: usize,
    entries: BTreeMap<HistoryState, StateEntry>,
}

impl SubgamePerfectTable {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, state: &HistoryState) -> Option<&StateEntry> {
        self.entries.get(state)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HistoryState, &StateEntry)> {
        self.entries.iter()
    }

    /// Quitting times reached by following the table from the empty history.
    pub fn on_path_profile(&self) -> QuittingProfile {
        self.follow(HistoryState::initial(self.players))
    }

    /// Quitting times reached by following the table from `state`.
    pub fn follow(&self, mut state: HistoryState) -> QuittingProfile {
        while state.time < self.horizon {
            let Some(entry) = self.entries.get(&state) else {
                break;
            };
            for k in entry.exercising.iter() {
                state.departures[k] = Some(state.time);
            }
            state.time += 1;
        }
        let times = state
            .departures
            .iter()
            .map(|d| d.unwrap_or(self.horizon))
            .collect();
        QuittingProfile::new(times, self.horizon).expect("departure times precede the horizon")
    }
}

/// Builds the strategy table over every history reachable from the start,
/// on or off the equilibrium path.
pub fn solve_quitting_subgame_perfect(q: &QuittingGame) -> Result<SubgamePerfectTable> {
    let m = q.players();
    let horizon = q.horizon();
    if m > PERFECT_MAX_PLAYERS {
        return Err(Error::TooLarge {
            what: "subgame-perfect player count",
            size: m as u128,
            limit: PERFECT_MAX_PLAYERS as u128,
        });
    }
    if horizon > PERFECT_MAX_HORIZON {
        return Err(Error::TooLarge {
            what: "subgame-perfect horizon",
            size: horizon as u128,
            limit: PERFECT_MAX_HORIZON as u128,
        });
    }

    let mut entries = BTreeMap::new();
    let mut queue = VecDeque::from([HistoryState::initial(m)]);
    while let Some(state) = queue.pop_front() {
        if entries.contains_key(&state) {
            continue;
        }
        let survivors: Vec<usize> = state.survivors().iter().collect();
        if survivors.is_empty() {
            continue;
        }
        let sub = continuation_game(q, &state, &survivors);
        let solved = solve_quitting(&sub);

        let mut value = Vec::with_capacity(m);
        let mut exercising = ExerciseSet::EMPTY;
        for k in 0..m {
            match state.departures[k] {
                Some(t) => value.push(q.payoff_at(t, k)),
                None => {
                    let j = survivors.iter().position(|&s| s == k).unwrap();
                    value.push(solved.value[j]);
                    if solved.equilibrium.times()[j] == 0 {
                        exercising = exercising.with(k);
                    }
                }
            }
        }
        entries.insert(
            state.clone(),
            StateEntry {
                exercising,
                value: PayoffVector::new(value),
            },
        );
        if entries.len() > PERFECT_MAX_STATES {
            return Err(Error::TooLarge {
                what: "subgame-perfect history count",
                size: entries.len() as u128,
                limit: PERFECT_MAX_STATES as u128,
            });
        }

        if state.time + 1 < horizon {
            for bits in 0..1u64 << survivors.len() {
                let mut next = HistoryState {
                    time: state.time + 1,
                    departures: state.departures.clone(),
                };
                for (j, &k) in survivors.iter().enumerate() {
                    if bits >> j & 1 == 1 {
                        next.departures[k] = Some(state.time);
                    }
                }
                queue.push_back(next);
            }
        }
    }
    Ok(SubgamePerfectTable {
        horizon,
        players: m,
        entries,
    })
}

/// The quitting game on `[state.time, T]` among `survivors`.
fn continuation_game(q: &QuittingGame, state: &HistoryState, survivors: &[usize]) -> QuittingGame {
    let m = q.players();
    let horizon = q.horizon();
    let departed = state.departed();
    let w = q.weights();

    let mut rows: Vec<Vec<f64>> = (state.time..horizon)
        .map(|t| survivors.iter().map(|&k| q.payoff_at(t, k)).collect())
        .collect();
    let weights = if departed.is_empty() {
        rows.push(survivors.iter().map(|&k| q.payoff_at(horizon, k)).collect());
        WeightSystem::reduced(
            survivors.iter().map(|&k| w.generators()[k]).collect(),
            w.regime(),
            w.tolerance(),
        )
    } else {
        let quit: Vec<f64> = (0..m)
            .map(|k| match state.departures[k] {
                Some(t) => q.payoff_at(t, k),
                None => q.payoff_at(horizon, k),
            })
            .collect();
        let d = difference(&quit, q.terminal(), departed);
        let reduced: Vec<f64> = survivors
            .iter()
            .map(|&k| w.weight_unchecked(departed, k))
            .collect();
        rows.push(
            survivors
                .iter()
                .zip(&reduced)
                .map(|(&k, wk)| q.payoff_at(horizon, k) - wk * d)
                .collect(),
        );
        WeightSystem::reduced(reduced, w.regime(), w.tolerance())
    };
    QuittingGame::new(weights, rows).expect("continuation rows have survivor width")
}

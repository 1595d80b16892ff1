use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{check_vector, payoff_with, PayoffVector, SinglePeriodGame, WeightSource};
use crate::set::ExerciseSet;
use crate::tolerance::Tolerance;

/// Largest player count a raw table can hold (`m * 2^m` entries).
pub const RAW_MAX_PLAYERS: usize = 15;

/// An arbitrary weight `w_k(E)` for every nonempty proper `E` and `k` outside `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWeightTable {
    players: usize,
    // indexed by `bits * players + k`; NaN where inadmissible
    weights: Vec<f64>,
}

impl RawWeightTable {
    fn empty(players: usize) -> Result<Self> {
        if players == 0 || players > RAW_MAX_PLAYERS {
            return Err(Error::TooLarge {
                what: "raw weight table players",
                size: players as u128,
                limit: RAW_MAX_PLAYERS as u128,
            });
        }
        Ok(RawWeightTable {
            players,
            weights: vec![f64::NAN; players << players],
        })
    }

    /// `w_k(E) = a_k / (1 - sum_{i in E} a_i)` without any sign or sum checks.
    pub fn from_generators(a: &[f64]) -> Result<Self> {
        let mut t = RawWeightTable::empty(a.len())?;
        for (e, k) in admissible(a.len()) {
            let mass: f64 = e.iter().map(|i| a[i]).sum();
            let w = a[k] / (1.0 - mass);
            if !w.is_finite() {
                return Err(Error::InvalidWeightTable(format!(
                    "generators give a non-finite weight for player {} and set {e}",
                    k + 1
                )));
            }
            t.set(e, k, w);
        }
        Ok(t)
    }

    /// Builds a table from explicit entries; every admissible pair must be
    /// given exactly once.
    pub fn from_entries<I>(players: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExerciseSet, usize, f64)>,
    {
        let mut t = RawWeightTable::empty(players)?;
        for (e, k, w) in entries {
            e.check_within(players)?;
            if k >= players {
                return Err(Error::PlayerOutOfRange { player: k, players });
            }
            if e.is_empty() || e == ExerciseSet::all(players) || e.contains(k) {
                return Err(Error::InvalidWeightTable(format!(
                    "w_{}({e}) is not an admissible entry",
                    k + 1
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("raw weight"));
            }
            if t.get(e, k).is_some() {
                return Err(Error::InvalidWeightTable(format!(
                    "w_{}({e}) is given twice",
                    k + 1
                )));
            }
            t.set(e, k, w);
        }
        if let Some((e, k)) = admissible(players).find(|&(e, k)| t.get(e, k).is_none()) {
            return Err(Error::InvalidWeightTable(format!(
                "w_{}({e}) is missing",
                k + 1
            )));
        }
        Ok(t)
    }

    fn set(&mut self, e: ExerciseSet, k: usize, w: f64) {
        self.weights[e.bits() as usize * self.players + k] = w;
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// `None` for inadmissible pairs.
    pub fn get(&self, e: ExerciseSet, k: usize) -> Option<f64> {
        if k >= self.players || e.bits() >> self.players != 0 {
            return None;
        }
        let w = self.weights[e.bits() as usize * self.players + k];
        (!w.is_nan()).then_some(w)
    }

    /// Admissible entries ordered by set bitmask, then player.
    pub fn entries(&self) -> impl Iterator<Item = (ExerciseSet, usize, f64)> + '_ {
        admissible(self.players).map(|(e, k)| (e, k, self.get(e, k).expect("complete table")))
    }
}

impl WeightSource for RawWeightTable {
    fn players(&self) -> usize {
        self.players
    }

    fn weight_unchecked(&self, e: ExerciseSet, k: usize) -> f64 {
        self.weights[e.bits() as usize * self.players + k]
    }
}

/// Every `(E, k)` with `E` nonempty, proper, and `k` outside `E`.
pub(crate) fn admissible(m: usize) -> impl Iterator<Item = (ExerciseSet, usize)> {
    let full = ExerciseSet::all(m).bits();
    (1..full).flat_map(move |bits| {
        let e = ExerciseSet::from_bits(bits);
        (0..m).filter(move |&k| !e.contains(k)).map(move |k| (e, k))
    })
}

/// Read-only view of a single-period game whose weights may be unrestricted.
pub trait SingleGameView {
    fn weight_source(&self) -> &dyn WeightSource;
    fn exercise_payoffs(&self) -> &[f64];
    fn terminal_payoffs(&self) -> &[f64];
    fn tolerance(&self) -> Tolerance;

    fn players(&self) -> usize {
        self.exercise_payoffs().len()
    }

    fn payoff_of_set(&self, e: ExerciseSet) -> PayoffVector {
        payoff_with(
            self.weight_source(),
            self.exercise_payoffs(),
            self.terminal_payoffs(),
            e,
        )
    }
}

impl SingleGameView for SinglePeriodGame {
    fn weight_source(&self) -> &dyn WeightSource {
        self.weights()
    }

    fn exercise_payoffs(&self) -> &[f64] {
        SinglePeriodGame::exercise_payoffs(self)
    }

    fn terminal_payoffs(&self) -> &[f64] {
        SinglePeriodGame::terminal_payoffs(self)
    }

    fn tolerance(&self) -> Tolerance {
        SinglePeriodGame::tolerance(self)
    }
}

/// A single-period game over a raw weight table.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGame {
    table: RawWeightTable,
    x: Vec<f64>,
    p: Vec<f64>,
    tolerance: Tolerance,
}

impl RawGame {
    pub fn new(
        table: RawWeightTable,
        x: Vec<f64>,
        p: Vec<f64>,
        tolerance: Tolerance,
    ) -> Result<Self> {
        check_vector("exercise payoffs", &x, table.players())?;
        check_vector("terminal payoffs", &p, table.players())?;
        Ok(RawGame {
            table,
            x,
            p,
            tolerance,
        })
    }

    pub fn table(&self) -> &RawWeightTable {
        &self.table
    }
}

impl SingleGameView for RawGame {
    fn weight_source(&self) -> &dyn WeightSource {
        &self.table
    }

    fn exercise_payoffs(&self) -> &[f64] {
        &self.x
    }

    fn terminal_payoffs(&self) -> &[f64] {
        &self.p
    }

    fn tolerance(&self) -> Tolerance {
        self.tolerance
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_allow_oversized_sums() {
        let t = RawWeightTable::from_generators(&[0.6, 0.6]).unwrap();
        assert_eq!(t.get(ExerciseSet::singleton(0), 1), Some(0.6 / 0.4));
        assert_eq!(t.get(ExerciseSet::singleton(0), 0), None);
        assert_eq!(t.get(ExerciseSet::EMPTY, 0), None);
        assert_eq!(t.entries().count(), 2);
        assert!(RawWeightTable::from_generators(&[0.5, 1.0]).is_err());
    }

    #[test]
    fn explicit_entries() {
        let one = ExerciseSet::singleton(0);
        let two = ExerciseSet::singleton(1);
        let t = RawWeightTable::from_entries(2, [(two, 0, 2.0), (one, 1, 0.5)]).unwrap();
        assert_eq!(t.get(two, 0), Some(2.0));
        assert!(RawWeightTable::from_entries(2, [(two, 0, 2.0)]).is_err());
        assert!(
            RawWeightTable::from_entries(2, [(two, 0, 2.0), (two, 0, 2.0), (one, 1, 0.5)]).is_err()
        );
        assert!(RawWeightTable::from_entries(2, [(two, 1, 2.0), (one, 1, 0.5)]).is_err());
        assert!(RawWeightTable::from_entries(2, [(ExerciseSet::all(2), 0, 1.0)]).is_err());
    }

    #[test]
    fn single_player_table_is_empty() {
        let t = RawWeightTable::from_entries(1, []).unwrap();
        assert_eq!(t.entries().count(), 0);
    }

    #[test]
    fn raw_game_payoffs() {
        let t = RawWeightTable::from_generators(&[0.6, 0.6]).unwrap();
        let g = RawGame::new(t, vec![0.0, 0.0], vec![1.0, -1.0], Tolerance::DEFAULT).unwrap();
        let tol = Tolerance::new(1e-15).unwrap();
        assert!(g
            .payoff_of_set(ExerciseSet::singleton(0))
            .approx_eq(&[0.0, 0.5], tol));
        assert!(g
            .payoff_of_set(ExerciseSet::singleton(1))
            .approx_eq(&[-0.5, 0.0], tol));
    }
}

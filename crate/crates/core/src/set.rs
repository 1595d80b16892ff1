use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported player count; exercise sets are bitmasks in a `u64`.
pub const MAX_PLAYERS: usize = 62;

/// A set of players, stored as a bitmask over `0..MAX_PLAYERS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExerciseSet(u64);

impl ExerciseSet {
    pub const EMPTY: ExerciseSet = ExerciseSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ExerciseSet(bits)
    }

    /// `{0, .., m-1}`.
    pub fn all(m: usize) -> Self {
        debug_assert!(m <= MAX_PLAYERS);
        ExerciseSet((1u64 << m) - 1)
    }

    pub fn singleton(k: usize) -> Self {
        ExerciseSet(1u64 << k)
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        players
            .into_iter()
            .fold(ExerciseSet::EMPTY, |s, k| s.with(k))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, k: usize) -> bool {
        k < 64 && self.0 >> k & 1 == 1
    }

    #[must_use]
    pub fn with(self, k: usize) -> Self {
        ExerciseSet(self.0 | 1u64 << k)
    }

    #[must_use]
    pub fn without(self, k: usize) -> Self {
        ExerciseSet(self.0 & !(1u64 << k))
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        ExerciseSet(self.0 | other.0)
    }

    /// Complement within `{0, .., m-1}`.
    #[must_use]
    pub fn complement(self, m: usize) -> Self {
        ExerciseSet(!self.0 & ExerciseSet::all(m).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(k)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Checks the set lies within `{0, .., m-1}`.
    pub fn check_within(self, m: usize) -> Result<()> {
        if self.is_subset_of(ExerciseSet::all(m)) {
            Ok(())
        } else {
            Err(Error::InvalidExerciseSet(format!(
                "{self} is not a subset of the {m} players"
            )))
        }
    }
}

impl fmt::Display for ExerciseSet {
    /// Prints members 1-based, e.g. `{1, 3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, k) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", k + 1)?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for ExerciseSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ExerciseSet::from_players(iter)
    }
}

/// Single-period pure strategy profile: `s_k = 0` exercises, `s_k = 1` waits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    players: usize,
    exercising: ExerciseSet,
}

impl StrategyProfile {
    /// Builds a profile from 0/1 decisions, rejecting any other entry.
    pub fn from_decisions(decisions: &[u8]) -> Result<Self> {
        if decisions.is_empty() || decisions.len() > MAX_PLAYERS {
            return Err(Error::InvalidProfile(format!(
                "player count {} outside 1..={MAX_PLAYERS}",
                decisions.len()
            )));
        }
        let mut exercising = ExerciseSet::EMPTY;
        for (k, &d) in decisions.iter().enumerate() {
            match d {
                0 => exercising = exercising.with(k),
                1 => {}
                other => {
                    return Err(Error::InvalidProfile(format!(
                        "decision of player {} is {other}, expected 0 or 1",
                        k + 1
                    )))
                }
            }
        }
        Ok(StrategyProfile {
            players: decisions.len(),
            exercising,
        })
    }

    pub fn from_exercise_set(players: usize, exercising: ExerciseSet) -> Result<Self> {
        if players == 0 || players > MAX_PLAYERS {
            return Err(Error::InvalidProfile(format!(
                "player count {players} outside 1..={MAX_PLAYERS}"
            )));
        }
        exercising.check_within(players)?;
        Ok(StrategyProfile {
            players,
            exercising,
        })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// `E(s)`.
    pub fn exercise_set(&self) -> ExerciseSet {
        self.exercising
    }

    pub fn decision(&self, k: usize) -> u8 {
        u8::from(!self.exercising.contains(k))
    }

    pub fn decisions(&self) -> Vec<u8> {
        (0..self.players).map(|k| self.decision(k)).collect()
    }
}

//! Weights, single-period payoffs and subgame reduction.
//!
//! Players are indexed `0..m` in code and printed 1-based. A profile's payoff
//! is `X_k` for exercisers and `P_k - w_k(E) * D` for the rest, where
//! `D = sum_{i in E} (X_i - P_i)` and `w_k(E) = a_k / (1 - sum_{i in E} a_i)`.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Deref, Index};

use crate::error::{Error, Result};
use crate::set::{ExerciseSet, StrategyProfile, MAX_PLAYERS};
use crate::tolerance::Tolerance;

/// Whether the weight generators leave room for an implicit dummy player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `sum(a) < 1`: payoffs need not conserve their total.
    Strict,
    /// `sum(a) = 1`: every profile but all-exercise conserves `sum(P)`.
    Saturated,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Strict => "strict",
            Regime::Saturated => "saturated",
        }
    }
}

/// Anything that assigns a redistribution weight `w_k(E)` to a non-exercising
/// player `k` given a nonempty proper exercise set `E`.
pub trait WeightSource {
    fn players(&self) -> usize;

    /// Callers guarantee `k` is not in `e`, and `e` is neither empty nor all players.
    fn weight_unchecked(&self, e: ExerciseSet, k: usize) -> f64;
}

/// Generators `a_1..a_m` of the weights `w_k(E) = a_k / (1 - sum_{i in E} a_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    a: Vec<f64>,
    regime: Regime,
    tolerance: Tolerance,
}

impl WeightSystem {
    /// Validates `a_k > 0` and `sum(a) <= 1 + tolerance`. The regime is
    /// saturated iff `|sum(a) - 1| <= tolerance`.
    pub fn new(a: Vec<f64>, tolerance: Tolerance) -> Result<Self> {
        if a.is_empty() || a.len() > MAX_PLAYERS {
            return Err(Error::InvalidWeights(format!(
                "player count {} outside 1..={MAX_PLAYERS}",
                a.len()
            )));
        }
        for (k, &ak) in a.iter().enumerate() {
            if !ak.is_finite() {
                return Err(Error::NonFinite("weight generator"));
            }
            if ak <= 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "a_{} = {ak} must be positive",
                    k + 1
                )));
            }
        }
        let total: f64 = a.iter().sum();
        if total > 1.0 + tolerance.get() {
            return Err(Error::InvalidWeights(format!(
                "sum of a is {total}, which exceeds 1"
            )));
        }
        let regime = if tolerance.eq(total, 1.0) {
            Regime::Saturated
        } else {
            Regime::Strict
        };
        Ok(WeightSystem {
            a,
            regime,
            tolerance,
        })
    }

    /// Uniform generators `a_k = total / m`.
    pub fn uniform(m: usize, total: f64, tolerance: Tolerance) -> Result<Self> {
        WeightSystem::new(alloc::vec![total / m as f64; m], tolerance)
    }

    /// Generators of a subgame. The regime is inherited, since rescaling by
    /// `1 - sum_{i in E} a_i` maps a saturated system to a saturated one.
    pub(crate) fn reduced(a: Vec<f64>, regime: Regime, tolerance: Tolerance) -> Self {
        WeightSystem {
            a,
            regime,
            tolerance,
        }
    }

    pub fn generators(&self) -> &[f64] {
        &self.a
    }

    pub fn players(&self) -> usize {
        self.a.len()
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }

    /// `sum_{i in e} a_i`, summed in index order.
    pub fn mass(&self, e: ExerciseSet) -> f64 {
        e.iter().map(|i| self.a[i]).sum()
    }

    /// `w_k(E)`. The empty set is admitted and gives `a_k`.
    pub fn weight(&self, e: ExerciseSet, k: usize) -> Result<f64> {
        let m = self.players();
        if k >= m {
            return Err(Error::PlayerOutOfRange {
                player: k,
                players: m,
            });
        }
        e.check_within(m)?;
        if e.contains(k) {
            return Err(Error::InvalidExerciseSet(format!(
                "player {} belongs to the exercise set {e}",
                k + 1
            )));
        }
        Ok(self.weight_unchecked(e, k))
    }
}

impl WeightSource for WeightSystem {
    fn players(&self) -> usize {
        self.a.len()
    }

    fn weight_unchecked(&self, e: ExerciseSet, k: usize) -> f64 {
        self.a[k] / (1.0 - self.mass(e))
    }
}

/// A payoff (or value) vector, one entry per player.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PayoffVector(Vec<f64>);

impl PayoffVector {
    pub fn new(v: Vec<f64>) -> Self {
        PayoffVector(v)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Largest coordinate-wise absolute difference.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &[f64], tol: Tolerance) -> bool {
        self.0.len() == other.len() && self.max_abs_diff(other) <= tol.get()
    }
}

impl Deref for PayoffVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for PayoffVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl From<Vec<f64>> for PayoffVector {
    fn from(v: Vec<f64>) -> Self {
        PayoffVector(v)
    }
}

/// `D = sum_{i in e} (x_i - p_i)`, summed in index order.
pub fn difference(x: &[f64], p: &[f64], e: ExerciseSet) -> f64 {
    e.iter().map(|i| x[i] - p[i]).sum()
}

/// Payoff of the profile whose exercise set is `e`, for any weight source.
///
/// The empty set returns `p` exactly and the full set returns `x`.
pub fn payoff_with<W: WeightSource + ?Sized>(
    weights: &W,
    x: &[f64],
    p: &[f64],
    e: ExerciseSet,
) -> PayoffVector {
    let m = x.len();
    if e.is_empty() {
        return PayoffVector(p.to_vec());
    }
    if e == ExerciseSet::all(m) {
        return PayoffVector(x.to_vec());
    }
    let d = difference(x, p, e);
    let v = (0..m)
        .map(|k| {
            if e.contains(k) {
                x[k]
            } else {
                p[k] - weights.weight_unchecked(e, k) * d
            }
        })
        .collect();
    PayoffVector(v)
}

pub(crate) fn check_vector(what: &'static str, v: &[f64], m: usize) -> Result<()> {
    if v.len() != m {
        return Err(Error::DimensionMismatch {
            what,
            expected: m,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

/// Single-period deterministic game: exercise payoffs `X`, terminal payoffs `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePeriodGame {
    weights: WeightSystem,
    x: Vec<f64>,
    p: Vec<f64>,
}

impl SinglePeriodGame {
    pub fn new(weights: WeightSystem, x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let m = weights.players();
        check_vector("exercise payoffs X", &x, m)?;
        check_vector("terminal payoffs P", &p, m)?;
        Ok(SinglePeriodGame { weights, x, p })
    }

    pub fn players(&self) -> usize {
        self.x.len()
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn exercise_payoffs(&self) -> &[f64] {
        &self.x
    }

    pub fn terminal_payoffs(&self) -> &[f64] {
        &self.p
    }

    pub fn tolerance(&self) -> Tolerance {
        self.weights.tolerance()
    }

    /// Difference due to exercise, `D(E)`.
    pub fn exercise_difference(&self, e: ExerciseSet) -> f64 {
        difference(&self.x, &self.p, e)
    }

    /// Payoff vector `V(s)`.
    pub fn payoff(&self, s: &StrategyProfile) -> Result<PayoffVector> {
        if s.players() != self.players() {
            return Err(Error::DimensionMismatch {
                what: "strategy profile",
                expected: self.players(),
                found: s.players(),
            });
        }
        Ok(self.payoff_of_set(s.exercise_set()))
    }

    /// Payoff when exactly the players in `e` exercise. `e` must lie within the players.
    pub fn payoff_of_set(&self, e: ExerciseSet) -> PayoffVector {
        payoff_with(&self.weights, &self.x, &self.p, e)
    }

    /// Forces the players in `e` to exercise and returns the game left to the
    /// others: `P'_k = P_k - w_k(E) D(E)` and `a'_k = w_k(E)`.
    pub fn subgame_reduce(&self, e: ExerciseSet) -> Result<Subgame> {
        let m = self.players();
        e.check_within(m)?;
        if e.is_empty() || e == ExerciseSet::all(m) {
            return Err(Error::InvalidExerciseSet(format!(
                "subgame reduction needs a nonempty proper subset, got {e}"
            )));
        }
        let d = self.exercise_difference(e);
        let players: Vec<usize> = e.complement(m).iter().collect();
        let mut a = Vec::with_capacity(players.len());
        let mut x = Vec::with_capacity(players.len());
        let mut p = Vec::with_capacity(players.len());
        for &k in &players {
            let w = self.weights.weight_unchecked(e, k);
            a.push(w);
            x.push(self.x[k]);
            p.push(self.p[k] - w * d);
        }
        let weights = WeightSystem::reduced(a, self.weights.regime(), self.weights.tolerance());
        Ok(Subgame {
            game: SinglePeriodGame { weights, x, p },
            players,
        })
    }
}

/// A reduced game together with the original index of each remaining player.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgame {
    pub game: SinglePeriodGame,
    pub players: Vec<usize>,
}

impl Subgame {
    /// Maps a subgame exercise set back to original player indices.
    pub fn lift(&self, e: ExerciseSet) -> ExerciseSet {
        e.iter().map(|j| self.players[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ws(a: &[f64]) -> WeightSystem {
        WeightSystem::new(a.to_vec(), Tolerance::DEFAULT).unwrap()
    }

    fn set(players: &[usize]) -> ExerciseSet {
        ExerciseSet::from_players(players.iter().copied())
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn weight_examples() {
        let w = ws(&[0.25, 0.25, 0.25]);
        assert!(close(w.weight(set(&[1]), 0).unwrap(), 1.0 / 3.0));
        let w = ws(&[0.5, 0.5]);
        assert_eq!(w.weight(set(&[1]), 0).unwrap(), 1.0);
        let w = ws(&[0.25, 0.25]);
        assert_eq!(w.weight(ExerciseSet::EMPTY, 0).unwrap(), 0.25);
    }

    #[test]
    fn weight_rejects_member_and_range() {
        let w = ws(&[0.25, 0.25]);
        assert!(w.weight(set(&[0]), 0).is_err());
        assert!(w.weight(ExerciseSet::EMPTY, 2).is_err());
        assert!(w.weight(set(&[0, 1]), 1).is_err());
    }

    #[test]
    fn weight_system_validation() {
        assert!(WeightSystem::new(vec![0.6, 0.6], Tolerance::DEFAULT).is_err());
        assert!(WeightSystem::new(vec![0.5, 0.0], Tolerance::DEFAULT).is_err());
        assert!(WeightSystem::new(vec![0.5, -0.1], Tolerance::DEFAULT).is_err());
        assert!(WeightSystem::new(vec![], Tolerance::DEFAULT).is_err());
        assert!(WeightSystem::new(vec![f64::NAN], Tolerance::DEFAULT).is_err());
        assert_eq!(ws(&[0.5, 0.5]).regime(), Regime::Saturated);
        assert_eq!(ws(&[0.25, 0.5]).regime(), Regime::Strict);
        assert_eq!(ws(&[1.0 / 3.0; 3]).regime(), Regime::Saturated);
        // within tolerance above one is still admitted as saturated
        assert_eq!(ws(&[0.5, 0.5 + 5e-10]).regime(), Regime::Saturated);
    }

    #[test]
    fn exercise_difference_examples() {
        let g = SinglePeriodGame::new(ws(&[0.5, 0.5]), vec![0.0, 0.0], vec![1.0, -1.0]).unwrap();
        assert_eq!(g.exercise_difference(set(&[1])), 1.0);
        assert_eq!(g.exercise_difference(ExerciseSet::EMPTY), 0.0);
        assert_eq!(g.exercise_difference(set(&[0, 1])), 0.0);
    }

    #[test]
    fn payoff_examples() {
        let g = SinglePeriodGame::new(ws(&[0.5, 0.5]), vec![0.0, 0.0], vec![1.0, -1.0]).unwrap();
        let s = StrategyProfile::from_decisions(&[1, 0]).unwrap();
        assert_eq!(g.payoff(&s).unwrap().as_slice(), [0.0, 0.0]);
        let all = StrategyProfile::from_decisions(&[0, 0]).unwrap();
        assert_eq!(g.payoff(&all).unwrap().as_slice(), [0.0, 0.0]);
        let none = StrategyProfile::from_decisions(&[1, 1]).unwrap();
        assert_eq!(g.payoff(&none).unwrap().as_slice(), [1.0, -1.0]);
    }

    #[test]
    fn payoff_all_exercise_is_x() {
        let g = SinglePeriodGame::new(
            ws(&[0.2, 0.3, 0.1]),
            vec![1.5, -2.0, 7.0],
            vec![3.0, 4.0, 5.0],
        )
        .unwrap();
        assert_eq!(
            g.payoff_of_set(ExerciseSet::all(3)).as_slice(),
            [1.5, -2.0, 7.0]
        );
        assert_eq!(
            g.payoff_of_set(ExerciseSet::EMPTY).as_slice(),
            [3.0, 4.0, 5.0]
        );
    }

    #[test]
    fn payoff_rejects_wrong_length() {
        let g = SinglePeriodGame::new(ws(&[0.5, 0.5]), vec![0.0, 0.0], vec![1.0, -1.0]).unwrap();
        let s = StrategyProfile::from_decisions(&[1, 0, 1]).unwrap();
        assert!(g.payoff(&s).is_err());
    }

    #[test]
    fn game_rejects_mismatched_vectors() {
        assert!(SinglePeriodGame::new(ws(&[0.5, 0.5]), vec![0.0], vec![1.0, -1.0]).is_err());
        assert!(
            SinglePeriodGame::new(ws(&[0.5, 0.5]), vec![0.0, f64::INFINITY], vec![1.0, -1.0])
                .is_err()
        );
    }

    #[test]
    fn subgame_examples() {
        let g = SinglePeriodGame::new(ws(&[0.25, 0.25]), vec![0.0, 0.0], vec![-1.0, 3.0]).unwrap();
        let sub = g.subgame_reduce(set(&[0])).unwrap();
        assert_eq!(sub.players, [1]);
        assert!(close(sub.game.terminal_payoffs()[0], 8.0 / 3.0));
        assert!(close(sub.game.weights().generators()[0], 1.0 / 3.0));
        assert_eq!(sub.game.exercise_payoffs(), [0.0]);

        let third = 1.0 / 3.0;
        let g = SinglePeriodGame::new(ws(&[third; 3]), vec![0.0, 0.0, 4.0], vec![1.0, 2.0, 0.0])
            .unwrap();
        let sub = g.subgame_reduce(set(&[2])).unwrap();
        assert_eq!(sub.players, [0, 1]);
        for &ak in sub.game.weights().generators() {
            assert!(close(ak, 0.5));
        }
        assert!(close(sub.game.terminal_payoffs()[0], -1.0));
        assert!(close(sub.game.terminal_payoffs()[1], 0.0));
        assert_eq!(sub.game.weights().regime(), Regime::Saturated);
    }

    #[test]
    fn subgame_with_zero_difference_keeps_p() {
        let g = SinglePeriodGame::new(
            ws(&[0.2, 0.3, 0.4]),
            vec![2.0, 0.0, 0.0],
            vec![2.0, 5.0, -1.0],
        )
        .unwrap();
        let sub = g.subgame_reduce(set(&[0])).unwrap();
        assert_eq!(sub.game.terminal_payoffs(), [5.0, -1.0]);
        assert!(close(sub.game.weights().generators()[0], 0.3 / 0.8));
    }

    #[test]
    fn subgame_rejects_empty_and_full() {
        let g = SinglePeriodGame::new(ws(&[0.25, 0.25]), vec![0.0, 0.0], vec![-1.0, 3.0]).unwrap();
        assert!(g.subgame_reduce(ExerciseSet::EMPTY).is_err());
        assert!(g.subgame_reduce(ExerciseSet::all(2)).is_err());
    }
}

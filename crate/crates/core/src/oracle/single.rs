use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::set::{ExerciseSet, StrategyProfile};
use crate::tolerance::Tolerance;

use super::raw::{admissible, RawGame, RawWeightTable, SingleGameView};
use super::report::EquilibriumReport;

pub const SINGLE_MAX_PLAYERS: usize = 15;
pub const WUC_MAX_PLAYERS: usize = 10;

/// Strategy index of "exercise" in single-period reports; "wait" is 1.
pub const EXERCISE: usize = 0;

fn guard(m: usize, limit: usize, what: &'static str) -> Result<()> {
    if m > limit {
        return Err(Error::TooLarge {
            what,
            size: m as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// Exercise set of a single-period profile given as strategy indices.
pub fn exercise_set_of(profile: &[usize]) -> ExerciseSet {
    profile
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s == EXERCISE)
        .map(|(k, _)| k)
        .collect()
}

/// Report index of a single-period profile.
pub fn profile_index(profile: &StrategyProfile) -> usize {
    profile
        .decisions()
        .iter()
        .fold(0, |acc, &d| acc * 2 + d as usize)
}

/// Enumerates all `2^m` exercise profiles.
pub fn analyze_single<G: SingleGameView + ?Sized>(g: &G) -> Result<EquilibriumReport> {
    let m = g.players();
    guard(m, SINGLE_MAX_PLAYERS, "players for exhaustive analysis")?;
    EquilibriumReport::from_fn(vec![2; m], g.tolerance(), |s| {
        Ok(g.payoff_of_set(exercise_set_of(s)).into_inner())
    })
}

/// A broken WUC implication: player `deviator` switching from `from` to `to`
/// against the other decisions of `profile` moves `other`'s payoff the wrong way.
#[derive(Debug, Clone, PartialEq)]
pub struct WucViolation {
    pub deviator: usize,
    pub other: usize,
    /// Decisions (0 exercise, 1 wait) before the deviation.
    pub profile: Vec<u8>,
    pub to: u8,
    pub before: [f64; 2],
    pub after: [f64; 2],
}

/// Checks both WUC implications over every deviation. Returns the first
/// violation in (deviator, profile, other) order.
pub fn check_wuc<G: SingleGameView + ?Sized>(g: &G) -> Result<Option<WucViolation>> {
    let m = g.players();
    guard(m, WUC_MAX_PLAYERS, "players for the WUC check")?;
    let tol = g.tolerance();
    let n = 1usize << m;
    // payoff by exercise bitmask
    let table: Vec<Vec<f64>> = (0..n as u64)
        .map(|bits| g.payoff_of_set(ExerciseSet::from_bits(bits)).into_inner())
        .collect();
    for k in 0..m {
        for bits in 0..n {
            let e = ExerciseSet::from_bits(bits as u64);
            let alt = if e.contains(k) {
                e.without(k)
            } else {
                e.with(k)
            };
            let (v, v_alt) = (&table[bits], &table[alt.bits() as usize]);
            for l in (0..m).filter(|&l| l != k) {
                let broken = if tol.gt(v[k], v_alt[k]) {
                    tol.gt(v[l], v_alt[l])
                } else if tol.eq(v[k], v_alt[k]) {
                    !tol.eq(v[l], v_alt[l])
                } else {
                    false
                };
                if broken {
                    return Ok(Some(WucViolation {
                        deviator: k,
                        other: l,
                        profile: decisions(e, m),
                        to: if alt.contains(k) { 0 } else { 1 },
                        before: [v[k], v[l]],
                        after: [v_alt[k], v_alt[l]],
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn decisions(e: ExerciseSet, m: usize) -> Vec<u8> {
    (0..m).map(|k| if e.contains(k) { 0 } else { 1 }).collect()
}

/// Payoffs that make a raw table fail WUC, with the violation found.
#[derive(Debug, Clone, PartialEq)]
pub struct WucCounterexample {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub violation: WucViolation,
}

/// Seeded random search for payoffs under which `table` is not WUC.
///
/// Alternates small integer payoffs (to hit the equality implication) with
/// continuous draws from `[-10, 10]`.
pub fn search_wuc_violation(
    table: &RawWeightTable,
    tolerance: Tolerance,
    seed: u64,
    trials: usize,
) -> Result<Option<WucCounterexample>> {
    let m = table.players();
    guard(m, WUC_MAX_PLAYERS, "players for the WUC check")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut draw = || -> f64 {
            if trial % 2 == 0 {
                rng.random_range(-3i32..=3) as f64
            } else {
                rng.random_range(-10.0..=10.0)
            }
        };
        let x: Vec<f64> = (0..m).map(|_| draw()).collect();
        let p: Vec<f64> = (0..m).map(|_| draw()).collect();
        let g = RawGame::new(table.clone(), x, p, tolerance)?;
        if let Some(violation) = check_wuc(&g)? {
            let (x, p) = (g.exercise_payoffs().to_vec(), g.terminal_payoffs().to_vec());
            return Ok(Some(WucCounterexample { x, p, violation }));
        }
    }
    Ok(None)
}

/// Recovers generators `a` with `w_k(E) = a_k / (1 - sum_{i in E} a_i)`,
/// `a_k > 0` and `sum_{i != k} a_i < 1`, if the table has that form.
///
/// Needs at least two players. When two players have `w_1({2}) = w_2({1}) = 1`
/// every `a` on the unit simplex fits; `[1/2, 1/2]` is returned.
pub fn check_weight_form(t: &RawWeightTable, tol: Tolerance) -> Option<Vec<f64>> {
    let m = t.players();
    if m < 2 {
        return None;
    }
    let w = |e: ExerciseSet, k: usize| t.get(e, k).expect("admissible");
    if admissible(m).any(|(e, k)| w(e, k) <= 0.0) {
        return None;
    }
    for (e, i) in admissible(m) {
        if e.len() + 2 > m {
            continue;
        }
        for j in (0..m).filter(|&j| j != i && !e.contains(j)) {
            if !tol.eq(w(e.with(j), i) * (1.0 - w(e, j)), w(e, i)) {
                return None;
            }
        }
    }
    let a = if m == 2 {
        let (u, v) = (
            w(ExerciseSet::singleton(1), 0),
            w(ExerciseSet::singleton(0), 1),
        );
        if tol.eq(u * v, 1.0) {
            if !(tol.eq(u, 1.0) && tol.eq(v, 1.0)) {
                return None;
            }
            vec![0.5, 0.5]
        } else {
            vec![u * (1.0 - v) / (1.0 - u * v), v * (1.0 - u) / (1.0 - u * v)]
        }
    } else {
        let mut a = Vec::with_capacity(m);
        for i in 0..m {
            let j = (i + 1) % m;
            let u = w(ExerciseSet::singleton(j), i);
            let v = w(ExerciseSet::singleton(i), j);
            if tol.eq(u * v, 1.0) {
                return None;
            }
            a.push(u * (1.0 - v) / (1.0 - u * v));
        }
        a
    };
    let total: f64 = a.iter().sum();
    if a.iter()
        .any(|&ak| ak.is_nan() || ak <= 0.0 || total - ak >= 1.0)
    {
        return None;
    }
    let fits = admissible(m).all(|(e, k)| {
        let mass: f64 = e.iter().map(|i| a[i]).sum();
        tol.eq(a[k] / (1.0 - mass), w(e, k))
    });
    fits.then_some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{SinglePeriodGame, WeightSystem};

    fn raw(a: &[f64], x: Vec<f64>, p: Vec<f64>) -> RawGame {
        RawGame::new(
            RawWeightTable::from_generators(a).unwrap(),
            x,
            p,
            Tolerance::DEFAULT,
        )
        .unwrap()
    }

    #[test]
    fn oversized_weights_have_no_pure_equilibrium() {
        let half = ExerciseSet::singleton;
        let t = RawWeightTable::from_entries(2, [(half(1), 0, 1.5), (half(0), 1, 1.5)]).unwrap();
        let g = RawGame::new(t, vec![0.0, 0.0], vec![1.0, -1.0], Tolerance::DEFAULT).unwrap();
        let r = analyze_single(&g).unwrap();
        assert!(r.nash().is_empty());
        let table: Vec<&[f64]> = (0..4).map(|i| r.payoff(i)).collect();
        assert_eq!(
            table,
            [&[0.0, 0.0][..], &[0.0, 0.5], &[-0.5, 0.0], &[1.0, -1.0]]
        );
        assert_eq!(r.maximin()[0], 0.0);
        assert_eq!(r.minimax()[0], 0.0);
    }

    #[test]
    fn valid_game_nash_equals_optimal() {
        let w = WeightSystem::new(vec![0.25, 0.25], Tolerance::DEFAULT).unwrap();
        let g = SinglePeriodGame::new(w, vec![0.0, 0.0], vec![-1.0, 3.0]).unwrap();
        let r = analyze_single(&g).unwrap();
        assert_eq!(r.nash(), r.optimal());
        assert_eq!(r.nash().len(), 1);
        let idx = r.nash()[0];
        assert_eq!(exercise_set_of(&r.profile(idx)), ExerciseSet::singleton(0));
        assert!(r.has_value());
        assert!((r.maximin()[1] - 8.0 / 3.0).abs() < 1e-12);
        let s = StrategyProfile::from_exercise_set(2, ExerciseSet::singleton(0)).unwrap();
        assert_eq!(profile_index(&s), idx);
    }

    #[test]
    fn wuc_on_valid_weights() {
        let w = WeightSystem::new(vec![0.2, 0.3, 0.1], Tolerance::DEFAULT).unwrap();
        let g = SinglePeriodGame::new(w, vec![1.0, -2.0, 0.5], vec![0.0, 4.0, 0.5]).unwrap();
        assert_eq!(check_wuc(&g).unwrap(), None);
    }

    #[test]
    fn single_player_wuc_is_vacuous() {
        let g = raw(&[0.5], vec![1.0], vec![2.0]);
        assert_eq!(check_wuc(&g).unwrap(), None);
        assert_eq!(check_weight_form(g.table(), Tolerance::DEFAULT), None);
    }

    #[test]
    fn negative_weight_breaks_wuc() {
        let t = RawWeightTable::from_entries(
            2,
            [
                (ExerciseSet::singleton(1), 0, -1.0),
                (ExerciseSet::singleton(0), 1, 0.5),
            ],
        )
        .unwrap();
        assert_eq!(check_weight_form(&t, Tolerance::DEFAULT), None);
        let found = search_wuc_violation(&t, Tolerance::DEFAULT, 7, 100)
            .unwrap()
            .unwrap();
        let g = RawGame::new(t, found.x.clone(), found.p.clone(), Tolerance::DEFAULT).unwrap();
        assert_eq!(check_wuc(&g).unwrap(), Some(found.violation));
    }

    #[test]
    fn two_player_positive_tables_are_always_wuc() {
        let t = RawWeightTable::from_entries(
            2,
            [
                (ExerciseSet::singleton(1), 0, 2.0),
                (ExerciseSet::singleton(0), 1, 0.5),
            ],
        )
        .unwrap();
        assert_eq!(check_weight_form(&t, Tolerance::DEFAULT), None);
        assert_eq!(
            search_wuc_violation(&t, Tolerance::DEFAULT, 1, 2000).unwrap(),
            None
        );
    }

    #[test]
    fn form_recovery() {
        let t = RawWeightTable::from_generators(&[0.25; 3]).unwrap();
        assert!((t.get(ExerciseSet::singleton(0), 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let a = check_weight_form(&t, Tolerance::DEFAULT).unwrap();
        assert!(a.iter().all(|&ak| (ak - 0.25).abs() < 1e-12));
        let t = RawWeightTable::from_generators(&[0.6, 0.6]).unwrap();
        let a = check_weight_form(&t, Tolerance::DEFAULT).unwrap();
        assert!(a.iter().all(|&ak| (ak - 0.6).abs() < 1e-12));
        let sat = RawWeightTable::from_generators(&[0.3, 0.7]).unwrap();
        assert_eq!(
            check_weight_form(&sat, Tolerance::DEFAULT),
            Some(vec![0.5, 0.5])
        );
    }

    #[test]
    fn broken_condition_one() {
        // w_1({2,3}) perturbed: no generators reproduce it
        let base = RawWeightTable::from_generators(&[0.2, 0.3, 0.1]).unwrap();
        let bumped = base.entries().map(|(e, k, w)| {
            if e == ExerciseSet::from_players([1, 2]) && k == 0 {
                (e, k, w * 1.5)
            } else {
                (e, k, w)
            }
        });
        let t = RawWeightTable::from_entries(3, bumped).unwrap();
        assert_eq!(check_weight_form(&t, Tolerance::DEFAULT), None);
        assert!(search_wuc_violation(&t, Tolerance::DEFAULT, 3, 500)
            .unwrap()
            .is_some());
    }

    #[test]
    fn guards() {
        let t = RawWeightTable::from_generators(&[0.05; 11]).unwrap();
        let g = RawGame::new(t, vec![0.0; 11], vec![0.0; 11], Tolerance::DEFAULT).unwrap();
        assert!(matches!(check_wuc(&g), Err(Error::TooLarge { .. })));
        assert!(analyze_single(&g).is_ok());
    }
}

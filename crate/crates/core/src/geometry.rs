//! The weighted inner product on payoff space and the projections that turn
//! a terminal payoff vector into the game's value.
//!
//! For `sum(a) < 1` the inner product is
//! `<x, y> = sum_i x_i y_i / a_i + (sum_i x_i)(sum_i y_i) / (1 - sum_i a_i)`.
//! Under it the payoff of any exercise set `E` is the orthogonal projection of
//! `P` onto `H_E = {x : x_i = X_i for i in E}`, and the value is the
//! projection of `P` onto the orthant `O = {x : x >= X}`. With `sum(a) = 1`
//! the inner product degenerates; projections are then defined as limits of
//! a penalised norm, which the closed forms below reproduce.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::game::{
    check_vector, payoff_with, PayoffVector, Regime, SinglePeriodGame, WeightSystem,
};
use crate::set::ExerciseSet;

/// Largest player count accepted by [`project_orthant_exhaustive`].
pub const EXHAUSTIVE_MAX_PLAYERS: usize = 20;

/// `<x, y>` under the weights. Undefined in the saturated regime.
pub fn inner_product(x: &[f64], y: &[f64], w: &WeightSystem) -> Result<f64> {
    let m = w.players();
    check_vector("x", x, m)?;
    check_vector("y", y, m)?;
    if w.regime() == Regime::Saturated {
        return Err(Error::SaturatedInnerProduct);
    }
    let a = w.generators();
    let diagonal: f64 = (0..m).map(|i| x[i] * y[i] / a[i]).sum();
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    Ok(diagonal + sx * sy / (1.0 - w.total()))
}

/// Squared norm `<x, x>`.
pub fn norm_squared(x: &[f64], w: &WeightSystem) -> Result<f64> {
    inner_product(x, x, w)
}

/// Projection of `p` onto `H_E`, in closed form. Identical to the payoff of
/// the profile whose exercise set is `e`; `E = {}` gives `p`, `E = all` gives `x`.
pub fn project_hyperplane(
    p: &[f64],
    e: ExerciseSet,
    x: &[f64],
    w: &WeightSystem,
) -> Result<PayoffVector> {
    let m = w.players();
    check_vector("P", p, m)?;
    check_vector("X", x, m)?;
    e.check_within(m)?;
    Ok(payoff_with(w, x, p, e))
}

/// The orthant `O = {x : x_i >= lower_bounds_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthantSpec {
    pub lower_bounds: Vec<f64>,
}

impl OrthantSpec {
    pub fn new(lower_bounds: Vec<f64>) -> Self {
        OrthantSpec { lower_bounds }
    }

    pub fn dimension(&self) -> usize {
        self.lower_bounds.len()
    }
}

/// A projected point together with the coordinates pinned to the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub value: PayoffVector,
    pub active_set: ExerciseSet,
}

/// Projection of `p` onto the orthant, eliminating the lowest-indexed
/// violator first. See [`project_orthant_ordered`].
pub fn project_orthant(p: &[f64], o: &OrthantSpec, w: &WeightSystem) -> Result<Projection> {
    let order: Vec<usize> = (0..w.players()).collect();
    project_orthant_ordered(p, o, w, &order)
}

/// Projection of `p` onto the orthant by repeated subgame reduction.
///
/// While some remaining player `k` has `P'_k <= X_k + tol`, the one earliest
/// in `order` is forced to exercise and the game is reduced around it. The
/// loop stops when every remaining player sits strictly inside the orthant,
/// after at most `m` rounds. The value is then the closed-form payoff of the
/// accumulated active set. In the saturated regime with `sum(X) > sum(P)`
/// the orthant misses the conservation hyperplane and the result is `(X, all)`.
///
/// `order` must be a permutation of `0..m`; any order yields the same value.
pub fn project_orthant_ordered(
    p: &[f64],
    o: &OrthantSpec,
    w: &WeightSystem,
    order: &[usize],
) -> Result<Projection> {
    let m = w.players();
    check_vector("P", p, m)?;
    check_vector("orthant lower bounds", &o.lower_bounds, m)?;
    let priority = priorities(order, m)?;
    let x = &o.lower_bounds;
    let tol = w.tolerance();

    if w.regime() == Regime::Saturated {
        let sum_x: f64 = x.iter().sum();
        let sum_p: f64 = p.iter().sum();
        if tol.gt(sum_x, sum_p) {
            let all = ExerciseSet::all(m);
            return Ok(Projection {
                value: payoff_with(w, x, p, all),
                active_set: all,
            });
        }
    }

    let mut game = SinglePeriodGame::new(w.clone(), x.clone(), p.to_vec())?;
    let mut players: Vec<usize> = (0..m).collect();
    let mut active = ExerciseSet::EMPTY;
    loop {
        let xs = game.exercise_payoffs();
        let ps = game.terminal_payoffs();
        let violator = (0..players.len())
            .filter(|&j| tol.le(ps[j], xs[j]))
            .min_by_key(|&j| priority[players[j]]);
        let Some(j) = violator else { break };
        active = active.with(players[j]);
        if players.len() == 1 {
            break;
        }
        let sub = game.subgame_reduce(ExerciseSet::singleton(j))?;
        players = sub.players.iter().map(|&i| players[i]).collect();
        game = sub.game;
    }
    Ok(Projection {
        value: payoff_with(w, x, p, active),
        active_set: active,
    })
}

fn priorities(order: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut priority = alloc::vec![usize::MAX; m];
    if order.len() != m {
        return Err(Error::DimensionMismatch {
            what: "elimination order",
            expected: m,
            found: order.len(),
        });
    }
    for (rank, &k) in order.iter().enumerate() {
        if k >= m || priority[k] != usize::MAX {
            return Err(Error::InvalidExerciseSet(format!(
                "elimination order is not a permutation of the {m} players"
            )));
        }
        priority[k] = rank;
    }
    Ok(priority)
}

/// Orthant projection found by scanning all `2^m` hyperplane projections.
///
/// Independent of the elimination loop: every feasible hyperplane projection
/// lies in `O`, and the true projection is one of them, so the feasible
/// candidate closest to `p` is the answer. Strict regime distances use the
/// weighted norm; the saturated regime uses `sum_i (x_i - P_i)^2 / a_i` over
/// candidates conserving `sum(P)` and falls back to `X` when none is feasible.
/// Near-equal distances prefer the smaller set, then the lexicographically
/// smaller member list.
pub fn project_orthant_exhaustive(
    p: &[f64],
    o: &OrthantSpec,
    w: &WeightSystem,
) -> Result<Projection> {
    let m = w.players();
    if m > EXHAUSTIVE_MAX_PLAYERS {
        return Err(Error::TooLarge {
            what: "exhaustive projection player count",
            size: m as u128,
            limit: EXHAUSTIVE_MAX_PLAYERS as u128,
        });
    }
    check_vector("P", p, m)?;
    check_vector("orthant lower bounds", &o.lower_bounds, m)?;
    let x = &o.lower_bounds;
    let tol = w.tolerance();
    let a = w.generators();
    let saturated = w.regime() == Regime::Saturated;
    let sum_p: f64 = p.iter().sum();
    let sum_tol = tol.get() * m as f64;

    let mut best: Option<(f64, ExerciseSet, PayoffVector)> = None;
    for bits in 0..1u64 << m {
        let e = ExerciseSet::from_bits(bits);
        let c = payoff_with(w, x, p, e);
        if (0..m).any(|i| c[i] < x[i] - tol.get()) {
            continue;
        }
        let diff: Vec<f64> = (0..m).map(|i| c[i] - p[i]).collect();
        let dist = if saturated {
            let sum_c: f64 = c.iter().sum();
            if (sum_c - sum_p).abs() > sum_tol {
                continue;
            }
            (0..m).map(|i| diff[i] * diff[i] / a[i]).sum()
        } else {
            norm_squared(&diff, w)?
        };
        let better = match &best {
            None => true,
            Some((best_dist, best_e, _)) => {
                let eps = 1e-12 * (1.0 + best_dist.abs());
                if dist < best_dist - eps {
                    true
                } else if dist <= best_dist + eps {
                    tie_break(e, *best_e) == Ordering::Less
                } else {
                    false
                }
            }
        };
        if better {
            best = Some((dist, e, c));
        }
    }
    Ok(match best {
        Some((_, e, c)) => Projection {
            value: c,
            active_set: e,
        },
        None => Projection {
            value: PayoffVector::new(x.clone()),
            active_set: ExerciseSet::all(m),
        },
    })
}

fn tie_break(a: ExerciseSet, b: ExerciseSet) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::Tolerance;
    use alloc::vec;

    fn ws(a: &[f64]) -> WeightSystem {
        WeightSystem::new(a.to_vec(), Tolerance::DEFAULT).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let w = ws(&[0.25, 0.25]);
        assert!((inner_product(&[1.0, 0.0], &[1.0, 0.0], &w).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(inner_product(&[0.0, 0.0], &[3.0, -2.0], &w).unwrap(), 0.0);
        assert!(inner_product(&[1.0, -1.0], &[1.0, 1.0], &w).unwrap().abs() < 1e-12);
    }

    #[test]
    fn inner_product_rejects_saturated() {
        let w = ws(&[0.5, 0.5]);
        assert_eq!(
            inner_product(&[1.0, 0.0], &[1.0, 0.0], &w),
            Err(Error::SaturatedInnerProduct)
        );
    }

    #[test]
    fn inner_product_is_symmetric() {
        let w = ws(&[0.1, 0.2, 0.3]);
        let x = [1.0, -2.0, 0.5];
        let y = [0.3, 4.0, -1.0];
        let xy = inner_product(&x, &y, &w).unwrap();
        let yx = inner_product(&y, &x, &w).unwrap();
        assert!((xy - yx).abs() < 1e-12);
    }

    #[test]
    fn hyperplane_examples() {
        let w = ws(&[0.25, 0.25]);
        let x = [0.0, 0.0];
        let p = [-1.0, 3.0];
        assert_eq!(
            project_hyperplane(&p, ExerciseSet::EMPTY, &x, &w)
                .unwrap()
                .as_slice(),
            p
        );
        assert_eq!(
            project_hyperplane(&p, ExerciseSet::all(2), &x, &w)
                .unwrap()
                .as_slice(),
            x
        );
        let v = project_hyperplane(&p, ExerciseSet::singleton(0), &x, &w).unwrap();
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn orthant_examples() {
        let w = ws(&[0.25, 0.25]);
        let o = OrthantSpec::new(vec![0.0, 0.0]);
        let r = project_orthant(&[2.0, 3.0], &o, &w).unwrap();
        assert_eq!(r.value.as_slice(), [2.0, 3.0]);
        assert!(r.active_set.is_empty());

        let r = project_orthant(&[-1.0, 3.0], &o, &w).unwrap();
        assert_eq!(r.active_set, ExerciseSet::singleton(0));
        assert!(r
            .value
            .approx_eq(&[0.0, 8.0 / 3.0], Tolerance::new(1e-12).unwrap()));

        let w = ws(&[0.5, 0.5]);
        let r = project_orthant(&[0.0, 0.0], &OrthantSpec::new(vec![1.0, 1.0]), &w).unwrap();
        assert_eq!(r.value.as_slice(), [1.0, 1.0]);
        assert_eq!(r.active_set, ExerciseSet::all(2));
    }

    #[test]
    fn exhaustive_matches_examples() {
        let tol = Tolerance::new(1e-12).unwrap();
        let cases: [(&[f64], &[f64], &[f64]); 3] = [
            (&[0.25, 0.25], &[0.0, 0.0], &[2.0, 3.0]),
            (&[0.25, 0.25], &[0.0, 0.0], &[-1.0, 3.0]),
            (&[0.5, 0.5], &[1.0, 1.0], &[0.0, 0.0]),
        ];
        for (a, x, p) in cases {
            let w = ws(a);
            let o = OrthantSpec::new(x.to_vec());
            let fast = project_orthant(p, &o, &w).unwrap();
            let slow = project_orthant_exhaustive(p, &o, &w).unwrap();
            assert!(fast.value.approx_eq(&slow.value, tol));
            assert_eq!(fast.active_set, slow.active_set);
        }
    }

    #[test]
    fn exhaustive_interior_picks_empty_set() {
        let w = ws(&[0.2, 0.2, 0.2]);
        let o = OrthantSpec::new(vec![-1.0, -1.0, -1.0]);
        let r = project_orthant_exhaustive(&[1.0, 2.0, 3.0], &o, &w).unwrap();
        assert!(r.active_set.is_empty());
        assert_eq!(r.value.as_slice(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn exhaustive_rejects_large() {
        let w = WeightSystem::uniform(21, 0.5, Tolerance::DEFAULT).unwrap();
        let o = OrthantSpec::new(vec![0.0; 21]);
        assert!(matches!(
            project_orthant_exhaustive(&[0.0; 21], &o, &w),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn tie_goes_to_exercise() {
        let w = ws(&[0.25, 0.25]);
        let r = project_orthant(&[0.0, 3.0], &OrthantSpec::new(vec![0.0, 0.0]), &w).unwrap();
        assert_eq!(r.active_set, ExerciseSet::singleton(0));
        assert_eq!(r.value.as_slice(), [0.0, 3.0]);
    }

    #[test]
    fn ordered_rejects_bad_permutation() {
        let w = ws(&[0.25, 0.25]);
        let o = OrthantSpec::new(vec![0.0, 0.0]);
        assert!(project_orthant_ordered(&[1.0, 1.0], &o, &w, &[0, 0]).is_err());
        assert!(project_orthant_ordered(&[1.0, 1.0], &o, &w, &[0]).is_err());
        let r = project_orthant_ordered(&[-1.0, -1.0], &o, &w, &[1, 0]).unwrap();
        assert!(r.value.approx_eq(&[0.0, 0.0], Tolerance::DEFAULT));
    }

    #[test]
    fn saturated_single_player() {
        let w = ws(&[1.0]);
        let o = OrthantSpec::new(vec![3.0]);
        assert_eq!(
            project_orthant(&[5.0], &o, &w).unwrap().value.as_slice(),
            [5.0]
        );
        let r = project_orthant(&[2.0], &o, &w).unwrap();
        assert_eq!(r.value.as_slice(), [3.0]);
        assert_eq!(r.active_set, ExerciseSet::all(1));
    }
}

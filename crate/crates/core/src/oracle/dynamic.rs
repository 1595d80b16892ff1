use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{payoff_with, WeightSystem};
use crate::set::ExerciseSet;
use crate::solver::{quitting_payoff, QuittingGame, QuittingProfile};
use crate::stopping::{
    adapted_rule_count, adapted_rules, continuation_settle, evaluate, natural_settle,
    value_process, EventTree, StoppingRule,
};

use super::report::{EquilibriumReport, MAX_PROFILES};

pub const STOPPING_MAX_PLAYERS: usize = 3;
pub const STOPPING_MAX_INTERNAL_NODES: usize = 8;
pub const QUITTING_MAX_PROFILES: u128 = 1_000_000;

/// How a stop at an internal node settles the non-stoppers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StoppingPayoff {
    /// Against the expected continuation value.
    Continuation,
    /// Against the terminal payoff of a deterministic chain.
    Natural,
}

/// An exhaustive report plus where the candidate profile sits in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub report: EquilibriumReport,
    /// Canonical per-player strategies, indexed by the report's strategy numbers.
    pub strategies: Vec<Vec<bool>>,
    pub candidate: Option<usize>,
}

impl Verification {
    pub fn candidate_is_nash(&self) -> bool {
        self.candidate.is_some_and(|i| self.report.is_nash(i))
    }

    pub fn candidate_is_optimal(&self) -> bool {
        self.candidate.is_some_and(|i| self.report.is_optimal(i))
    }

    /// The profile at `index` as node flags. For deterministic quitting games
    /// node `t` is time `t`.
    pub fn rule(&self, index: usize) -> StoppingRule {
        let profile = self.report.profile(index);
        StoppingRule::from_flags(
            profile
                .iter()
                .map(|&s| self.strategies[s].clone())
                .collect(),
        )
    }
}

fn stopping_guard(tree: &EventTree) -> Result<Vec<Vec<bool>>> {
    if tree.players() > STOPPING_MAX_PLAYERS {
        return Err(Error::TooLarge {
            what: "players for stopping-game enumeration",
            size: tree.players() as u128,
            limit: STOPPING_MAX_PLAYERS as u128,
        });
    }
    if tree.internal_count() > STOPPING_MAX_INTERNAL_NODES {
        return Err(Error::TooLarge {
            what: "internal nodes for stopping-game enumeration",
            size: tree.internal_count() as u128,
            limit: STOPPING_MAX_INTERNAL_NODES as u128,
        });
    }
    let per_player = adapted_rule_count(tree);
    let total = (0..tree.players()).fold(1u128, |acc, _| acc.saturating_mul(per_player));
    if total > MAX_PROFILES {
        return Err(Error::TooLarge {
            what: "stopping profiles",
            size: total,
            limit: MAX_PROFILES,
        });
    }
    Ok(adapted_rules(tree))
}

/// Flags reduced to the nodes where the player actually stops, plus leaves.
fn canonical(tree: &EventTree, flags: &[bool]) -> Vec<bool> {
    let mut out: Vec<bool> = (0..tree.len()).map(|id| tree.node(id).is_leaf()).collect();
    let mut stack = vec![tree.root()];
    while let Some(id) = stack.pop() {
        if flags[id] {
            out[id] = true;
        } else {
            stack.extend(tree.node(id).children.iter().map(|&(c, _)| c));
        }
    }
    out
}

fn locate(rules: &[Vec<bool>], tree: &EventTree, candidate: &StoppingRule) -> Result<Vec<usize>> {
    if candidate.players() != tree.players()
        || (0..candidate.players()).any(|k| candidate.player_flags(k).len() != tree.len())
    {
        return Err(Error::InvalidStoppingRule(
            "rule dimensions do not match the tree".into(),
        ));
    }
    (0..tree.players())
        .map(|k| {
            let c = canonical(tree, candidate.player_flags(k));
            Ok(rules
                .iter()
                .position(|r| *r == c)
                .expect("canonical rules are enumerated"))
        })
        .collect()
}

fn index_of(counts: usize, profile: &[usize]) -> usize {
    profile.iter().fold(0, |acc, &s| acc * counts + s)
}

/// Every adapted stopping profile under the given payoff model.
pub fn analyze_stopping(
    tree: &EventTree,
    w: &WeightSystem,
    model: StoppingPayoff,
) -> Result<Verification> {
    enumerate_stopping(tree, w, model, None)
}

/// Checks that `candidate` is an optimal equilibrium among all adapted
/// stopping profiles. The candidate is reduced to its effective stops first.
pub fn verify_stopping_equilibrium(
    tree: &EventTree,
    w: &WeightSystem,
    candidate: &StoppingRule,
    model: StoppingPayoff,
) -> Result<Verification> {
    enumerate_stopping(tree, w, model, Some(candidate))
}

fn enumerate_stopping(
    tree: &EventTree,
    w: &WeightSystem,
    model: StoppingPayoff,
    candidate: Option<&StoppingRule>,
) -> Result<Verification> {
    if tree.players() != w.players() {
        return Err(Error::DimensionMismatch {
            what: "event tree payoff vectors",
            expected: w.players(),
            found: tree.players(),
        });
    }
    if model == StoppingPayoff::Natural && !tree.is_chain() {
        return Err(Error::InvalidTree(
            "the terminal-payoff variant is defined on deterministic chains only".into(),
        ));
    }
    let rules = stopping_guard(tree)?;
    let located = candidate.map(|c| locate(&rules, tree, c)).transpose()?;
    let m = tree.players();
    let counts = vec![rules.len(); m];
    let vp = value_process(tree, w)?;
    let cont = continuation_settle(tree, w, &vp);
    let natural = natural_settle(tree, w);
    let report = EquilibriumReport::from_fn(counts, w.tolerance(), |profile| {
        let stoppers =
            |id: usize| -> ExerciseSet { (0..m).filter(|&k| rules[profile[k]][id]).collect() };
        let v = match model {
            StoppingPayoff::Continuation => evaluate(tree, tree.root(), &stoppers, &cont),
            StoppingPayoff::Natural => evaluate(tree, tree.root(), &stoppers, &natural),
        };
        Ok(v.into_inner())
    })?;
    Ok(Verification {
        candidate: located.map(|p| index_of(rules.len(), &p)),
        report,
        strategies: rules,
    })
}

/// Exhaustive check over all `(T+1)^m` quitting-time vectors.
pub fn verify_quitting(
    q: &QuittingGame,
    candidate: Option<&QuittingProfile>,
) -> Result<Verification> {
    let m = q.players();
    let per = q.horizon() + 1;
    let total = (0..m).fold(1u128, |acc, _| acc.saturating_mul(per as u128));
    if total > QUITTING_MAX_PROFILES {
        return Err(Error::TooLarge {
            what: "quitting profiles",
            size: total,
            limit: QUITTING_MAX_PROFILES,
        });
    }
    let candidate = match candidate {
        Some(c) => {
            QuittingProfile::new(c.times().to_vec(), q.horizon())?;
            if c.times().len() != m {
                return Err(Error::DimensionMismatch {
                    what: "quitting profile",
                    expected: m,
                    found: c.times().len(),
                });
            }
            Some(index_of(per, c.times()))
        }
        None => None,
    };
    let report = EquilibriumReport::from_fn(vec![per; m], q.weights().tolerance(), |times| {
        let s = QuittingProfile::new(times.to_vec(), q.horizon())?;
        Ok(quitting_payoff(q, &s)?.into_inner())
    })?;
    // strategy t stops at time t; the last one never quits early
    let strategies = (0..per)
        .map(|t| (0..per).map(|u| u == t).collect())
        .collect();
    Ok(Verification {
        report,
        strategies,
        candidate,
    })
}

/// Quitting game on an event tree: a player quits at the first flagged
/// internal node on the realised path; reaching a leaf means never quitting.
/// Payoffs are expectations over leaves.
pub fn verify_quitting_tree(
    tree: &EventTree,
    w: &WeightSystem,
    candidate: Option<&StoppingRule>,
) -> Result<Verification> {
    if tree.players() != w.players() {
        return Err(Error::DimensionMismatch {
            what: "event tree payoff vectors",
            expected: w.players(),
            found: tree.players(),
        });
    }
    if tree.horizon() == 0 {
        return Err(Error::InvalidQuittingGame(
            "the horizon must be at least 1".into(),
        ));
    }
    let rules = stopping_guard(tree)?;
    let located = candidate.map(|c| locate(&rules, tree, c)).transpose()?;
    let m = tree.players();
    let report = EquilibriumReport::from_fn(vec![rules.len(); m], w.tolerance(), |profile| {
        let mut total = vec![0.0; m];
        let mut quit = vec![f64::NAN; m];
        accumulate(
            tree,
            w,
            tree.root(),
            1.0,
            ExerciseSet::EMPTY,
            &mut quit,
            &|k, id| rules[profile[k]][id],
            &mut total,
        );
        Ok(total)
    })?;
    Ok(Verification {
        candidate: located.map(|p| index_of(rules.len(), &p)),
        report,
        strategies: rules,
    })
}

#[allow(clippy::too_many_arguments)]
fn accumulate<F: Fn(usize, usize) -> bool>(
    tree: &EventTree,
    w: &WeightSystem,
    id: usize,
    prob: f64,
    quitted: ExerciseSet,
    quit: &mut [f64],
    flags: &F,
    total: &mut [f64],
) {
    let node = tree.node(id);
    if node.is_leaf() {
        let v = payoff_with(w, quit, &node.x, quitted);
        for (t, x) in total.iter_mut().zip(v.iter()) {
            *t += prob * x;
        }
        return;
    }
    let mut now = quitted;
    let saved = quit.to_vec();
    for k in (0..tree.players()).filter(|&k| !quitted.contains(k) && flags(k, id)) {
        now = now.with(k);
        quit[k] = node.x[k];
    }
    for &(child, p) in &node.children {
        accumulate(tree, w, child, prob * p, now, quit, flags, total);
    }
    quit.copy_from_slice(&saved);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_quitting;
    use crate::stopping::{equilibrium_stopping, NodeSpec};
    use crate::tolerance::Tolerance;

    fn w(a: &[f64]) -> WeightSystem {
        WeightSystem::new(a.to_vec(), Tolerance::DEFAULT).unwrap()
    }

    #[test]
    fn tau_on_chain_is_optimal() {
        let tree = EventTree::chain(vec![vec![1.0, 5.0], vec![2.0, 3.0]]).unwrap();
        let ws = w(&[0.25, 0.25]);
        let tau = equilibrium_stopping(&tree, &value_process(&tree, &ws).unwrap());
        let v =
            verify_stopping_equilibrium(&tree, &ws, &tau, StoppingPayoff::Continuation).unwrap();
        assert!(v.candidate_is_optimal());
        assert_eq!(v.report.profile_count(), 4);
    }

    #[test]
    fn stopping_at_root_in_interior_game_fails() {
        let tree = EventTree::chain(vec![vec![0.0, 0.0], vec![4.0, 2.0]]).unwrap();
        let ws = w(&[0.3, 0.3]);
        let s = StoppingRule::stop_at_root(&tree);
        let v = verify_stopping_equilibrium(&tree, &ws, &s, StoppingPayoff::Continuation).unwrap();
        assert!(!v.candidate_is_nash());
    }

    #[test]
    fn natural_variant_counterexample() {
        let third = 1.0 / 3.0;
        let tree = EventTree::chain(vec![
            vec![-1.0, -1.0, 0.0],
            vec![-2.0, -2.0, 4.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let v = analyze_stopping(&tree, &w(&[third; 3]), StoppingPayoff::Natural).unwrap();
        // two outcomes; each is reached by two profiles that differ only in
        // a stop scheduled after the game has already ended
        assert_eq!(v.report.nash().len(), 4);
        assert_eq!(v.report.distinct_payoffs(v.report.nash()), 2);
        assert!(v.report.optimal().is_empty());
    }

    #[test]
    fn worked_quitting_game() {
        let q = QuittingGame::new(
            w(&[0.25, 0.25]),
            vec![vec![5.0, 0.0], vec![3.0, 1.0], vec![4.0, 2.0]],
        )
        .unwrap();
        let sol = solve_quitting(&q);
        let v = verify_quitting(&q, Some(&sol.equilibrium)).unwrap();
        assert_eq!(v.report.profile_count(), 9);
        assert!(v.candidate_is_optimal());
        assert_eq!(v.report.payoff(v.candidate.unwrap()), sol.value.as_slice());
    }

    #[test]
    fn terminal_dominant_all_wait() {
        let q = QuittingGame::new(w(&[0.2, 0.2]), vec![vec![0.0, 0.0], vec![3.0, 3.0]]).unwrap();
        let all_wait = QuittingProfile::new(vec![1, 1], 1).unwrap();
        assert!(verify_quitting(&q, Some(&all_wait))
            .unwrap()
            .candidate_is_optimal());
    }

    #[test]
    fn stochastic_quitting_without_pure_equilibrium() {
        let tree = EventTree::new(
            vec![
                NodeSpec {
                    x: vec![2.1, 3.5, -50.0],
                    children: vec![(1, 0.5), (2, 0.5)],
                },
                NodeSpec {
                    x: vec![-50.0, -50.0, -5.05],
                    children: vec![(3, 1.0)],
                },
                NodeSpec {
                    x: vec![4.0, -50.0, -50.0],
                    children: vec![(4, 1.0)],
                },
                NodeSpec {
                    x: vec![0.0, 5.0, -5.0],
                    children: vec![],
                },
                NodeSpec {
                    x: vec![0.0, 5.0, -5.0],
                    children: vec![],
                },
            ],
            0,
            Tolerance::DEFAULT,
        )
        .unwrap();
        let v = verify_quitting_tree(&tree, &w(&[1.0 / 3.0; 3]), None).unwrap();
        assert!(v.report.nash().is_empty());
    }

    #[test]
    fn tree_quitting_matches_deterministic_on_chain() {
        let rows = vec![vec![5.0, 0.0], vec![3.0, 1.0], vec![4.0, 2.0]];
        let ws = w(&[0.25, 0.25]);
        let q = QuittingGame::new(ws.clone(), rows.clone()).unwrap();
        let det = verify_quitting(&q, None).unwrap();
        let tree = EventTree::chain(rows).unwrap();
        let stoch = verify_quitting_tree(&tree, &ws, None).unwrap();
        assert_eq!(det.report.profile_count(), stoch.report.profile_count());
        for i in 0..det.report.profile_count() {
            let diff = det
                .report
                .payoff(i)
                .iter()
                .zip(stoch.report.payoff(i))
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn guards() {
        let tree = EventTree::chain(vec![vec![0.0; 4], vec![1.0; 4]]).unwrap();
        assert!(matches!(
            analyze_stopping(&tree, &w(&[0.2; 4]), StoppingPayoff::Continuation),
            Err(Error::TooLarge { .. })
        ));
        let q = QuittingGame::new(w(&[0.1; 7]), vec![vec![0.0; 7]; 8]).unwrap();
        assert!(matches!(
            verify_quitting(&q, None),
            Err(Error::TooLarge { .. })
        ));
    }
}

//! Multi-period stopping games on finite event trees.
//!
//! The tree is the filtration: node-indexed data is adapted by construction.
//! The game stops at the first node where anyone stops. Stoppers receive the
//! node's `X`; everyone else receives the hyperplane projection of the
//! expected continuation value, so the value process is
//! `U_leaf = X_leaf` and `U_n = pi_{O(X_n)}(sum_c p_c U_c)`.

mod tree;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{payoff_with, PayoffVector, WeightSystem};
use crate::geometry::{project_orthant, OrthantSpec};
use crate::set::ExerciseSet;
use crate::tolerance::Tolerance;

pub use tree::{EventTree, Node, NodeSpec};

/// `U` at every node, plus the expected child value at internal nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueProcess {
    values: Vec<PayoffVector>,
    continuation: Vec<Option<PayoffVector>>,
    tolerance: Tolerance,
}

impl ValueProcess {
    /// `U_n`.
    pub fn value(&self, node: usize) -> &PayoffVector {
        &self.values[node]
    }

    /// `sum_c p_c U_c` at an internal node, `None` at leaves.
    pub fn continuation(&self, node: usize) -> Option<&PayoffVector> {
        self.continuation[node].as_ref()
    }

    pub fn values(&self) -> &[PayoffVector] {
        &self.values
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }
}

fn check_players(tree: &EventTree, w: &WeightSystem) -> Result<()> {
    if tree.players() != w.players() {
        return Err(Error::DimensionMismatch {
            what: "event tree payoff vectors",
            expected: w.players(),
            found: tree.players(),
        });
    }
    Ok(())
}

/// Backward induction from the leaves.
pub fn value_process(tree: &EventTree, w: &WeightSystem) -> Result<ValueProcess> {
    check_players(tree, w)?;
    let n = tree.len();
    let m = tree.players();
    let mut values = vec![PayoffVector::default(); n];
    let mut continuation = vec![None; n];
    for &id in tree.order().iter().rev() {
        let node = tree.node(id);
        if node.is_leaf() {
            values[id] = PayoffVector::new(node.x.clone());
            continue;
        }
        let mut expected = vec![0.0; m];
        for &(child, prob) in &node.children {
            for (e, u) in expected.iter_mut().zip(values[child].iter()) {
                *e += prob * u;
            }
        }
        let projection = project_orthant(&expected, &OrthantSpec::new(node.x.clone()), w)?;
        values[id] = projection.value;
        continuation[id] = Some(PayoffVector::new(expected));
    }
    Ok(ValueProcess {
        values,
        continuation,
        tolerance: w.tolerance(),
    })
}

/// Per-player adapted stopping decisions: `stops[k][node]`. Every leaf is a
/// stopping node for every player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StoppingRule {
    stops: Vec<Vec<bool>>,
}

impl StoppingRule {
    pub fn new(tree: &EventTree, stops: Vec<Vec<bool>>) -> Result<Self> {
        if stops.len() != tree.players() {
            return Err(Error::DimensionMismatch {
                what: "stopping rule players",
                expected: tree.players(),
                found: stops.len(),
            });
        }
        for (k, flags) in stops.iter().enumerate() {
            if flags.len() != tree.len() {
                return Err(Error::DimensionMismatch {
                    what: "stopping rule nodes",
                    expected: tree.len(),
                    found: flags.len(),
                });
            }
            if let Some(leaf) = tree.leaves().find(|&l| !flags[l]) {
                return Err(Error::InvalidStoppingRule(alloc::format!(
                    "player {} does not stop at leaf {leaf}",
                    k + 1
                )));
            }
        }
        Ok(StoppingRule { stops })
    }

    /// Builds a rule from each player's internal stopping nodes; leaves are added.
    pub fn from_nodes(tree: &EventTree, per_player: &[Vec<usize>]) -> Result<Self> {
        let mut stops = Vec::with_capacity(per_player.len());
        for nodes in per_player {
            let mut flags: Vec<bool> = (0..tree.len()).map(|id| tree.node(id).is_leaf()).collect();
            for &id in nodes {
                if id >= tree.len() {
                    return Err(Error::InvalidStoppingRule(alloc::format!(
                        "node {id} does not exist"
                    )));
                }
                flags[id] = true;
            }
            stops.push(flags);
        }
        StoppingRule::new(tree, stops)
    }

    /// Everyone stops at the root.
    pub fn stop_at_root(tree: &EventTree) -> Self {
        let nodes = vec![vec![tree.root()]; tree.players()];
        StoppingRule::from_nodes(tree, &nodes).expect("root exists")
    }

    /// Nobody stops before the leaves.
    pub fn wait_to_leaves(tree: &EventTree) -> Self {
        StoppingRule::from_nodes(tree, &vec![Vec::new(); tree.players()]).expect("no extra nodes")
    }

    pub(crate) fn from_flags(stops: Vec<Vec<bool>>) -> Self {
        StoppingRule { stops }
    }

    pub fn stops(&self, k: usize, node: usize) -> bool {
        self.stops[k][node]
    }

    pub fn player_flags(&self, k: usize) -> &[bool] {
        &self.stops[k]
    }

    pub fn players(&self) -> usize {
        self.stops.len()
    }

    /// Players stopping at `node`.
    pub fn stoppers(&self, node: usize) -> ExerciseSet {
        (0..self.stops.len())
            .filter(|&k| self.stops[k][node])
            .collect()
    }

    /// Nodes where player `k` actually stops: flagged, with no flagged ancestor.
    pub fn first_stops(&self, tree: &EventTree, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![tree.root()];
        while let Some(id) = stack.pop() {
            if self.stops[k][id] {
                out.push(id);
            } else {
                stack.extend(tree.node(id).children.iter().map(|&(c, _)| c));
            }
        }
        out.sort_unstable();
        out
    }
}

/// `tau_i`: player `i` stops wherever `U_i = X_i` within tolerance.
pub fn equilibrium_stopping(tree: &EventTree, vp: &ValueProcess) -> StoppingRule {
    let tol = vp.tolerance();
    let stops = (0..tree.players())
        .map(|k| {
            (0..tree.len())
                .map(|id| {
                    let node = tree.node(id);
                    node.is_leaf() || tol.le(vp.value(id)[k], node.x[k])
                })
                .collect()
        })
        .collect();
    StoppingRule { stops }
}

fn check_rule(tree: &EventTree, s: &StoppingRule) -> Result<()> {
    if s.players() != tree.players() || s.stops.iter().any(|f| f.len() != tree.len()) {
        return Err(Error::InvalidStoppingRule(
            "rule dimensions do not match the tree".into(),
        ));
    }
    Ok(())
}

/// Expected payoff at the root of a stopping profile, using the value
/// process for continuation values.
pub fn evaluate_stopping_profile(
    tree: &EventTree,
    w: &WeightSystem,
    s: &StoppingRule,
    vp: &ValueProcess,
) -> Result<PayoffVector> {
    check_players(tree, w)?;
    check_rule(tree, s)?;
    if vp.values.len() != tree.len() {
        return Err(Error::DimensionMismatch {
            what: "value process nodes",
            expected: tree.len(),
            found: vp.values.len(),
        });
    }
    Ok(evaluate(
        tree,
        tree.root(),
        &|id| s.stoppers(id),
        &continuation_settle(tree, w, vp),
    ))
}

pub(crate) fn continuation_settle<'a>(
    tree: &'a EventTree,
    w: &'a WeightSystem,
    vp: &'a ValueProcess,
) -> impl Fn(usize, ExerciseSet) -> PayoffVector + 'a {
    move |id, e| {
        let c = vp
            .continuation(id)
            .expect("internal node has a continuation");
        payoff_with(w, &tree.node(id).x, c, e)
    }
}

pub(crate) fn natural_settle<'a>(
    tree: &'a EventTree,
    w: &'a WeightSystem,
) -> impl Fn(usize, ExerciseSet) -> PayoffVector + 'a {
    let terminal = &tree
        .node(tree.leaves().next().expect("a tree has a leaf"))
        .x;
    move |id, e| payoff_with(w, &tree.node(id).x, terminal, e)
}

/// Expected payoff under the variant that settles non-stoppers against the
/// terminal payoff `X_T` instead of the continuation value:
/// `X_{k,T} - w_k(E) * sum_{i in E} (X_{i,n} - X_{i,T})`. Chains only.
pub fn evaluate_natural_variant(
    tree: &EventTree,
    w: &WeightSystem,
    s: &StoppingRule,
) -> Result<PayoffVector> {
    check_players(tree, w)?;
    check_rule(tree, s)?;
    if !tree.is_chain() {
        return Err(Error::InvalidTree(
            "the terminal-payoff variant is defined on deterministic chains only".into(),
        ));
    }
    Ok(evaluate(
        tree,
        tree.root(),
        &|id| s.stoppers(id),
        &natural_settle(tree, w),
    ))
}

/// Expected payoff from `id` when `stoppers(n)` players stop at `n` and a
/// stop at an internal node pays `settle(n, E)`.
pub(crate) fn evaluate<S, F>(tree: &EventTree, id: usize, stoppers: &S, settle: &F) -> PayoffVector
where
    S: Fn(usize) -> ExerciseSet,
    F: Fn(usize, ExerciseSet) -> PayoffVector,
{
    let node = tree.node(id);
    if node.is_leaf() {
        return PayoffVector::new(node.x.clone());
    }
    let e = stoppers(id);
    if !e.is_empty() {
        return settle(id, e);
    }
    let mut out = vec![0.0; tree.players()];
    for &(child, prob) in &node.children {
        let v = evaluate(tree, child, stoppers, settle);
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += prob * x;
        }
    }
    PayoffVector::new(out)
}

/// Every distinct adapted stopping rule of one player, as node flags with
/// leaves set. Rules differing only below a stopping node are identified.
pub fn adapted_rules(tree: &EventTree) -> Vec<Vec<bool>> {
    fn internal_sets(tree: &EventTree, id: usize) -> Vec<Vec<usize>> {
        let node = tree.node(id);
        if node.is_leaf() {
            return vec![Vec::new()];
        }
        let mut combos = vec![Vec::new()];
        for &(child, _) in &node.children {
            let sub = internal_sets(tree, child);
            combos = combos
                .iter()
                .flat_map(|prefix| {
                    sub.iter().map(move |tail| {
                        let mut v = prefix.clone();
                        v.extend_from_slice(tail);
                        v
                    })
                })
                .collect();
        }
        let mut out = vec![vec![id]];
        out.extend(combos);
        out
    }
    internal_sets(tree, tree.root())
        .into_iter()
        .map(|set| {
            let mut flags: Vec<bool> = (0..tree.len()).map(|id| tree.node(id).is_leaf()).collect();
            for id in set {
                flags[id] = true;
            }
            flags
        })
        .collect()
}

/// Number of rules [`adapted_rules`] would return, without building them.
pub fn adapted_rule_count(tree: &EventTree) -> u128 {
    fn count(tree: &EventTree, id: usize) -> u128 {
        let node = tree.node(id);
        if node.is_leaf() {
            return 1;
        }
        node.children
            .iter()
            .fold(1u128, |acc, &(c, _)| acc.saturating_mul(count(tree, c)))
            .saturating_add(1)
    }
    count(tree, tree.root())
}

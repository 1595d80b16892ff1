use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::set::MAX_PLAYERS;
use crate::tolerance::Tolerance;

/// Input description of one node: its payoff vector and `(child, probability)` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub x: Vec<f64>,
    pub children: Vec<(usize, f64)>,
}

/// A validated node.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub x: Vec<f64>,
    pub children: Vec<(usize, f64)>,
    pub parent: Option<usize>,
    pub time: usize,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Finite rooted tree with transition probabilities and all leaves at the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTree {
    nodes: Vec<Node>,
    root: usize,
    horizon: usize,
    players: usize,
    order: Vec<usize>,
}

impl EventTree {
    /// Validates shape, payoffs and probabilities. Probabilities out of each
    /// internal node must be positive and sum to one within `tol`; they are
    /// not renormalised.
    pub fn new(specs: Vec<NodeSpec>, root: usize, tol: Tolerance) -> Result<Self> {
        let n = specs.len();
        if n == 0 {
            return Err(Error::InvalidTree("the tree has no nodes".into()));
        }
        if root >= n {
            return Err(Error::InvalidTree(format!("root {root} does not exist")));
        }
        let players = specs[root].x.len();
        if players == 0 {
            return Err(Error::InvalidTree("payoff vectors are empty".into()));
        }
        if players > MAX_PLAYERS {
            return Err(Error::TooLarge {
                what: "players",
                size: players as u128,
                limit: MAX_PLAYERS as u128,
            });
        }
        let mut parent = vec![None; n];
        for (id, spec) in specs.iter().enumerate() {
            if spec.x.len() != players {
                return Err(Error::DimensionMismatch {
                    what: "node payoff vector",
                    expected: players,
                    found: spec.x.len(),
                });
            }
            if spec.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("node payoff"));
            }
            let mut total = 0.0;
            for &(child, prob) in &spec.children {
                if child >= n {
                    return Err(Error::InvalidTree(format!(
                        "node {id} points to missing node {child}"
                    )));
                }
                if child == root {
                    return Err(Error::InvalidTree(format!(
                        "node {id} points back to the root"
                    )));
                }
                if let Some(p) = parent[child] {
                    return Err(Error::InvalidTree(format!(
                        "node {child} has two parents ({p} and {id})"
                    )));
                }
                parent[child] = Some(id);
                if !prob.is_finite() || prob <= 0.0 {
                    return Err(Error::InvalidTree(format!(
                        "transition {id} -> {child} has probability {prob}"
                    )));
                }
                total += prob;
            }
            if !spec.children.is_empty() && !tol.eq(total, 1.0) {
                return Err(Error::InvalidTree(format!(
                    "probabilities out of node {id} sum to {total}"
                )));
            }
        }

        let mut time = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        time[root] = 0;
        while let Some(id) = queue.pop_front() {
            order.push(id);
            for &(child, _) in &specs[id].children {
                time[child] = time[id] + 1;
                queue.push_back(child);
            }
        }
        if order.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} node(s) are unreachable from the root",
                n - order.len()
            )));
        }
        let mut horizon = None;
        for (id, spec) in specs.iter().enumerate() {
            if spec.children.is_empty() {
                match horizon {
                    None => horizon = Some(time[id]),
                    Some(h) if h != time[id] => {
                        return Err(Error::InvalidTree(format!(
                            "leaves at different depths ({h} and {})",
                            time[id]
                        )));
                    }
                    _ => {}
                }
            }
        }
        let nodes = specs
            .into_iter()
            .enumerate()
            .map(|(id, s)| Node {
                x: s.x,
                children: s.children,
                parent: parent[id],
                time: time[id],
            })
            .collect();
        Ok(EventTree {
            nodes,
            root,
            horizon: horizon.expect("a finite tree has a leaf"),
            players,
            order,
        })
    }

    /// Deterministic chain: node `t` holds `rows[t]`.
    pub fn chain(rows: Vec<Vec<f64>>) -> Result<Self> {
        let len = rows.len();
        let specs = rows
            .into_iter()
            .enumerate()
            .map(|(t, x)| NodeSpec {
                x,
                children: if t + 1 < len {
                    vec![(t + 1, 1.0)]
                } else {
                    Vec::new()
                },
            })
            .collect();
        EventTree::new(specs, 0, Tolerance::DEFAULT)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Breadth-first order from the root.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&id| self.nodes[id].is_leaf())
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf()).count()
    }

    /// Every internal node has exactly one child.
    pub fn is_chain(&self) -> bool {
        self.nodes.iter().all(|n| n.children.len() <= 1)
    }

    /// Probability of reaching `id` from the root.
    pub fn reach_probability(&self, id: usize) -> f64 {
        let mut p = 1.0;
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            let edge = self.nodes[parent]
                .children
                .iter()
                .find(|&&(c, _)| c == cur)
                .expect("parent lists child");
            p *= edge.1;
            cur = parent;
        }
        p
    }
}

//! Game files: one flat TOML document with a `kind` discriminator.
//!
//! Players are numbered from 1 in files and reports.

use std::ops::Range;

use dynkin_core::oracle::{RawWeightTable, StoppingPayoff};
use dynkin_core::solver::{QuittingGame, Scenario, ScenarioSet};
use dynkin_core::stopping::{EventTree, NodeSpec};
use dynkin_core::{ExerciseSet, SinglePeriodGame, Tolerance, WeightSystem};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;
use crate::number::Number;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    kind: Spanned<String>,
    players: Option<Spanned<usize>>,
    tolerance: Option<Spanned<Number>>,
    a: Option<Spanned<Vec<Number>>>,
    x: Option<Spanned<Payoffs>>,
    p: Option<Spanned<Vec<Number>>>,
    payoff: Option<Spanned<String>>,
    root: Option<Spanned<i64>>,
    scenario: Option<Vec<Spanned<ScenarioFile>>>,
    node: Option<Vec<Spanned<NodeFile>>>,
    weight: Option<Vec<Spanned<WeightFile>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Payoffs {
    Vector(Vec<Number>),
    Rows(Vec<Vec<Number>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    probability: Number,
    x: Vec<Number>,
    p: Vec<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: i64,
    x: Vec<Number>,
    #[serde(default)]
    children: Vec<i64>,
    #[serde(default)]
    probabilities: Vec<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    set: Vec<usize>,
    player: usize,
    value: Number,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Single,
    Stochastic,
    Quitting,
    Stopping,
    RawWeights,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Single => "single",
            Kind::Stochastic => "stochastic",
            Kind::Quitting => "quitting",
            Kind::Stopping => "stopping",
            Kind::RawWeights => "raw-weights",
        }
    }
}

/// An event tree with the node ids used in the file.
#[derive(Debug, Clone)]
pub struct Tree {
    pub tree: EventTree,
    pub ids: Vec<i64>,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Single(SinglePeriodGame),
    Stochastic {
        weights: WeightSystem,
        scenarios: ScenarioSet,
    },
    Quitting(QuittingGame),
    QuittingTree {
        weights: WeightSystem,
        tree: Tree,
    },
    Stopping {
        weights: WeightSystem,
        tree: Tree,
        payoff: StoppingPayoff,
    },
    Raw {
        table: RawWeightTable,
        payoffs: Option<(Vec<f64>, Vec<f64>)>,
    },
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub kind: Kind,
    pub instance: Instance,
    pub tolerance: Tolerance,
}

impl Loaded {
    pub fn players(&self) -> usize {
        match &self.instance {
            Instance::Single(g) => g.players(),
            Instance::Stochastic { weights, .. }
            | Instance::QuittingTree { weights, .. }
            | Instance::Stopping { weights, .. } => weights.players(),
            Instance::Quitting(q) => q.players(),
            Instance::Raw { table, .. } => table.players(),
        }
    }

    /// Weight generators, when the instance has them.
    pub fn weights(&self) -> Option<&WeightSystem> {
        match &self.instance {
            Instance::Single(g) => Some(g.weights()),
            Instance::Stochastic { weights, .. }
            | Instance::QuittingTree { weights, .. }
            | Instance::Stopping { weights, .. } => Some(weights),
            Instance::Quitting(q) => Some(q.weights()),
            Instance::Raw { .. } => None,
        }
    }
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> Option<usize> {
        let end = span.start.min(self.text.len());
        Some(self.text[..end].bytes().filter(|&b| b == b'\n').count() + 1)
    }

    fn at<T>(&self, s: &Spanned<T>) -> Option<usize> {
        self.line(s.span())
    }

    fn numbers(&self, what: &str, v: &[Number], line: Option<usize>) -> Result<Vec<f64>, CliError> {
        v.iter()
            .map(|n| {
                n.value()
                    .map_err(|e| CliError::invalid(line, format!("{what}: {e}")))
            })
            .collect()
    }
}

/// Parses and validates a game file. `tolerance` overrides the file's value.
pub fn load(text: &str, tolerance: Option<f64>) -> Result<Loaded, CliError> {
    let spec: FileSpec = toml::from_str(text).map_err(|e| {
        let line = e.span().and_then(|s| Source { text }.line(s));
        CliError::invalid(line, e.message().trim_end())
    })?;
    let src = Source { text };
    let kind = match spec.kind.get_ref().as_str() {
        "single" => Kind::Single,
        "stochastic" => Kind::Stochastic,
        "quitting" => Kind::Quitting,
        "stopping" => Kind::Stopping,
        "raw-weights" => Kind::RawWeights,
        other => {
            return Err(CliError::invalid(
                src.at(&spec.kind),
                format!(
                    "unknown kind \"{other}\"; expected single, stochastic, quitting, stopping or raw-weights"
                ),
            ))
        }
    };
    let tol_value = match (tolerance, &spec.tolerance) {
        (Some(t), _) => t,
        (None, Some(t)) => t
            .get_ref()
            .value()
            .map_err(|e| CliError::invalid(src.at(t), format!("tolerance: {e}")))?,
        (None, None) => Tolerance::DEFAULT.get(),
    };
    let tol = Tolerance::new(tol_value).ok_or_else(|| {
        CliError::invalid(
            spec.tolerance.as_ref().and_then(|t| src.at(t)),
            format!("tolerance {tol_value} must be finite and non-negative"),
        )
    })?;
    reject_unused(&src, &spec, kind)?;
    let instance = match kind {
        Kind::Single => single(&src, &spec, tol)?,
        Kind::Stochastic => stochastic(&src, &spec, tol)?,
        Kind::Quitting => quitting(&src, &spec, tol)?,
        Kind::Stopping => stopping(&src, &spec, tol)?,
        Kind::RawWeights => raw(&src, &spec)?,
    };
    let loaded = Loaded {
        kind,
        instance,
        tolerance: tol,
    };
    if let Some(m) = &spec.players {
        if *m.get_ref() != loaded.players() {
            return Err(CliError::invalid(
                src.at(m),
                format!(
                    "players = {} but the payoff data has {} players",
                    m.get_ref(),
                    loaded.players()
                ),
            ));
        }
    }
    Ok(loaded)
}

fn reject_unused(src: &Source, spec: &FileSpec, kind: Kind) -> Result<(), CliError> {
    let allowed: &[&str] = match kind {
        Kind::Single => &["a", "x", "p"],
        Kind::Stochastic => &["a", "scenario"],
        Kind::Quitting => &["a", "x", "node", "root"],
        Kind::Stopping => &["a", "x", "node", "root", "payoff"],
        Kind::RawWeights => &["a", "x", "p", "weight"],
    };
    let present: [(&str, Option<Option<usize>>); 8] = [
        ("a", spec.a.as_ref().map(|s| src.at(s))),
        ("x", spec.x.as_ref().map(|s| src.at(s))),
        ("p", spec.p.as_ref().map(|s| src.at(s))),
        ("payoff", spec.payoff.as_ref().map(|s| src.at(s))),
        ("root", spec.root.as_ref().map(|s| src.at(s))),
        (
            "scenario",
            spec.scenario
                .as_ref()
                .and_then(|v| v.first())
                .map(|s| src.at(s)),
        ),
        (
            "node",
            spec.node
                .as_ref()
                .and_then(|v| v.first())
                .map(|s| src.at(s)),
        ),
        (
            "weight",
            spec.weight
                .as_ref()
                .and_then(|v| v.first())
                .map(|s| src.at(s)),
        ),
    ];
    for (name, line) in present {
        if let Some(line) = line {
            if !allowed.contains(&name) {
                return Err(CliError::invalid(
                    line,
                    format!("`{name}` is not used by kind {}", kind.as_str()),
                ));
            }
        }
    }
    Ok(())
}

fn missing(src: &Source, spec: &FileSpec, field: &str) -> CliError {
    CliError::invalid(
        src.at(&spec.kind),
        format!("kind {} requires `{field}`", spec.kind.get_ref()),
    )
}

fn weights(
    src: &Source,
    spec: &FileSpec,
    tol: Tolerance,
) -> Result<(WeightSystem, Option<usize>), CliError> {
    let a = spec.a.as_ref().ok_or_else(|| missing(src, spec, "a"))?;
    let line = src.at(a);
    let values = src.numbers("a", a.get_ref(), line)?;
    let w = WeightSystem::new(values, tol).map_err(|e| CliError::from_core(e, line))?;
    Ok((w, line))
}

fn vector(
    src: &Source,
    spec: &FileSpec,
    field: &str,
) -> Result<(Vec<f64>, Option<usize>), CliError> {
    let (numbers, line) = match field {
        "x" => match spec.x.as_ref() {
            Some(s) => match s.get_ref() {
                Payoffs::Vector(v) => (v, src.at(s)),
                Payoffs::Rows(_) => {
                    return Err(CliError::invalid(
                        src.at(s),
                        "`x` must be a vector for this kind",
                    ))
                }
            },
            None => return Err(missing(src, spec, field)),
        },
        _ => match spec.p.as_ref() {
            Some(s) => (s.get_ref(), src.at(s)),
            None => return Err(missing(src, spec, field)),
        },
    };
    Ok((src.numbers(field, numbers, line)?, line))
}

fn single(src: &Source, spec: &FileSpec, tol: Tolerance) -> Result<Instance, CliError> {
    let (w, _) = weights(src, spec, tol)?;
    let (x, xl) = vector(src, spec, "x")?;
    let (p, pl) = vector(src, spec, "p")?;
    let line = if x.len() != w.players() { xl } else { pl };
    let g = SinglePeriodGame::new(w, x, p).map_err(|e| CliError::from_core(e, line))?;
    Ok(Instance::Single(g))
}

fn stochastic(src: &Source, spec: &FileSpec, tol: Tolerance) -> Result<Instance, CliError> {
    let (w, _) = weights(src, spec, tol)?;
    let list = spec
        .scenario
        .as_ref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| missing(src, spec, "[[scenario]]"))?;
    let mut scenarios = Vec::with_capacity(list.len());
    for s in list {
        let line = src.at(s);
        let f = s.get_ref();
        let probability = f
            .probability
            .value()
            .map_err(|e| CliError::invalid(line, format!("probability: {e}")))?;
        let x = src.numbers("x", &f.x, line)?;
        let p = src.numbers("p", &f.p, line)?;
        if x.len() != w.players() || p.len() != w.players() {
            return Err(CliError::invalid(
                line,
                format!("scenario payoffs must have {} entries", w.players()),
            ));
        }
        scenarios.push(Scenario { probability, x, p });
    }
    let line = src.at(&list[0]);
    let scenarios = ScenarioSet::new(scenarios, tol).map_err(|e| CliError::from_core(e, line))?;
    Ok(Instance::Stochastic {
        weights: w,
        scenarios,
    })
}

/// Payoff rows with the line they start on.
type Rows = (Vec<Vec<f64>>, Option<usize>);

fn rows(src: &Source, spec: &FileSpec) -> Result<Option<Rows>, CliError> {
    let Some(x) = spec.x.as_ref() else {
        return Ok(None);
    };
    let line = src.at(x);
    match x.get_ref() {
        Payoffs::Rows(rows) => {
            let rows = rows
                .iter()
                .map(|r| src.numbers("x", r, line))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Some((rows, line)))
        }
        Payoffs::Vector(_) => Err(CliError::invalid(
            line,
            "`x` must list one payoff row per time, e.g. x = [[1, 2], [3, 4]]",
        )),
    }
}

fn tree(src: &Source, spec: &FileSpec, tol: Tolerance) -> Result<Tree, CliError> {
    let nodes = spec
        .node
        .as_ref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| missing(src, spec, "`x` rows or [[node]]"))?;
    let mut ids: Vec<i64> = Vec::with_capacity(nodes.len());
    for n in nodes {
        let id = n.get_ref().id;
        if ids.contains(&id) {
            return Err(CliError::invalid(
                src.at(n),
                format!("node id {id} is used twice"),
            ));
        }
        ids.push(id);
    }
    let index = |id: i64, line| {
        ids.iter()
            .position(|&i| i == id)
            .ok_or_else(|| CliError::invalid(line, format!("node {id} does not exist")))
    };
    let mut specs = Vec::with_capacity(nodes.len());
    for n in nodes {
        let line = src.at(n);
        let f = n.get_ref();
        if f.children.len() != f.probabilities.len() {
            return Err(CliError::invalid(
                line,
                format!(
                    "node {} lists {} children but {} probabilities",
                    f.id,
                    f.children.len(),
                    f.probabilities.len()
                ),
            ));
        }
        let probs = src.numbers("probabilities", &f.probabilities, line)?;
        let children = f
            .children
            .iter()
            .zip(probs)
            .map(|(&c, p)| Ok((index(c, line)?, p)))
            .collect::<Result<Vec<_>, CliError>>()?;
        specs.push(NodeSpec {
            x: src.numbers("x", &f.x, line)?,
            children,
        });
    }
    let root = match &spec.root {
        Some(r) => index(*r.get_ref(), src.at(r))?,
        None => 0,
    };
    let line = spec
        .root
        .as_ref()
        .map_or_else(|| src.at(&nodes[0]), |r| src.at(r));
    let tree = EventTree::new(specs, root, tol).map_err(|e| CliError::from_core(e, line))?;
    Ok(Tree { tree, ids })
}

fn chain(rows: Vec<Vec<f64>>, line: Option<usize>) -> Result<Tree, CliError> {
    let ids = (0..rows.len() as i64).collect();
    let tree = EventTree::chain(rows).map_err(|e| CliError::from_core(e, line))?;
    Ok(Tree { tree, ids })
}

fn check_tree_players(t: &Tree, w: &WeightSystem, line: Option<usize>) -> Result<(), CliError> {
    if t.tree.players() != w.players() {
        return Err(CliError::invalid(
            line,
            format!(
                "payoff vectors have {} entries but `a` has {}",
                t.tree.players(),
                w.players()
            ),
        ));
    }
    Ok(())
}

fn one_of_rows_or_nodes(src: &Source, spec: &FileSpec) -> Result<(), CliError> {
    if let (Some(x), Some(_)) = (&spec.x, &spec.node) {
        return Err(CliError::invalid(
            src.at(x),
            "give either `x` rows or [[node]] entries, not both",
        ));
    }
    Ok(())
}

fn quitting(src: &Source, spec: &FileSpec, tol: Tolerance) -> Result<Instance, CliError> {
    one_of_rows_or_nodes(src, spec)?;
    let (w, wl) = weights(src, spec, tol)?;
    if let Some((rows, line)) = rows(src, spec)? {
        let q = QuittingGame::new(w, rows).map_err(|e| CliError::from_core(e, line))?;
        return Ok(Instance::Quitting(q));
    }
    let t = tree(src, spec, tol)?;
    check_tree_players(&t, &w, wl)?;
    if t.tree.horizon() == 0 {
        return Err(CliError::invalid(
            src.at(&spec.kind),
            "a quitting game needs at least one period",
        ));
    }
    Ok(Instance::QuittingTree {
        weights: w,
        tree: t,
    })
}

fn stopping(src: &Source, spec: &FileSpec, tol: Tolerance) -> Result<Instance, CliError> {
    one_of_rows_or_nodes(src, spec)?;
    let (w, wl) = weights(src, spec, tol)?;
    let payoff = match &spec.payoff {
        None => StoppingPayoff::Continuation,
        Some(p) => match p.get_ref().as_str() {
            "continuation" => StoppingPayoff::Continuation,
            "natural" => StoppingPayoff::Natural,
            other => {
                return Err(CliError::invalid(
                    src.at(p),
                    format!("payoff \"{other}\" must be \"continuation\" or \"natural\""),
                ))
            }
        },
    };
    let t = match rows(src, spec)? {
        Some((rows, line)) => chain(rows, line)?,
        None => tree(src, spec, tol)?,
    };
    check_tree_players(&t, &w, wl)?;
    if payoff == StoppingPayoff::Natural && !t.tree.is_chain() {
        return Err(CliError::invalid(
            spec.payoff.as_ref().and_then(|p| src.at(p)),
            "payoff = \"natural\" needs a deterministic chain",
        ));
    }
    Ok(Instance::Stopping {
        weights: w,
        tree: t,
        payoff,
    })
}

fn raw(src: &Source, spec: &FileSpec) -> Result<Instance, CliError> {
    let table = match (&spec.a, &spec.weight) {
        (Some(a), None) => {
            let line = src.at(a);
            let values = src.numbers("a", a.get_ref(), line)?;
            RawWeightTable::from_generators(&values).map_err(|e| CliError::from_core(e, line))?
        }
        (None, Some(entries)) => {
            let m = spec
                .players
                .as_ref()
                .map(|p| *p.get_ref())
                .ok_or_else(|| missing(src, spec, "players"))?;
            let mut list = Vec::with_capacity(entries.len());
            for entry in entries {
                let line = src.at(entry);
                let f = entry.get_ref();
                let to_index = |k: usize| {
                    if k == 0 || k > m {
                        Err(CliError::invalid(
                            line,
                            format!("player {k} is outside 1..={m}"),
                        ))
                    } else {
                        Ok(k - 1)
                    }
                };
                let set = f
                    .set
                    .iter()
                    .map(|&k| to_index(k))
                    .collect::<Result<Vec<_>, _>>()?;
                let value = f
                    .value
                    .value()
                    .map_err(|e| CliError::invalid(line, format!("value: {e}")))?;
                list.push((ExerciseSet::from_players(set), to_index(f.player)?, value));
            }
            let line = entries.first().and_then(|e| src.at(e));
            RawWeightTable::from_entries(m, list).map_err(|e| CliError::from_core(e, line))?
        }
        (Some(a), Some(_)) => {
            return Err(CliError::invalid(
                src.at(a),
                "give either `a` or [[weight]] entries, not both",
            ))
        }
        (None, None) => return Err(missing(src, spec, "`a` or [[weight]] entries")),
    };
    let payoffs = match (&spec.x, &spec.p) {
        (None, None) => None,
        _ => {
            let (x, xl) = vector(src, spec, "x")?;
            let (p, pl) = vector(src, spec, "p")?;
            for (v, line) in [(&x, xl), (&p, pl)] {
                if v.len() != table.players() {
                    return Err(CliError::invalid(
                        line,
                        format!("expected {} payoffs, found {}", table.players(), v.len()),
                    ));
                }
            }
            Some((x, p))
        }
    };
    Ok(Instance::Raw { table, payoffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        load(text, None).unwrap_err().to_string()
    }

    #[test]
    fn single_file() {
        let l = load(
            "kind = \"single\"\na = [\"1/4\", 0.25]\nx = [0, 0]\np = [-1, 3]\n",
            None,
        )
        .unwrap();
        assert_eq!(l.kind, Kind::Single);
        assert_eq!(l.players(), 2);
        assert_eq!(l.tolerance, Tolerance::DEFAULT);
    }

    #[test]
    fn oversized_weights_name_the_line() {
        let e = err("kind = \"single\"\n\na = [0.6, 0.6]\nx = [0, 0]\np = [1, -1]\n");
        assert!(e.starts_with("line 3: invalid weight system"), "{e}");
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let e = err("kind = \"single\"\na = [0.5,\n");
        assert!(e.starts_with("line "), "{e}");
        let e = err("kind = \"single\"\nbogus = 1\n");
        assert!(e.contains("bogus"), "{e}");
    }

    #[test]
    fn unused_fields_are_rejected() {
        let e = err("kind = \"single\"\na = [0.5]\nx = [0]\np = [1]\npayoff = \"natural\"\n");
        assert!(e.contains("line 5") && e.contains("payoff"), "{e}");
    }

    #[test]
    fn tolerance_override() {
        let text = "kind = \"single\"\ntolerance = 1e-6\na = [0.5]\nx = [0]\np = [1]\n";
        assert_eq!(load(text, None).unwrap().tolerance.get(), 1e-6);
        assert_eq!(load(text, Some(1e-3)).unwrap().tolerance.get(), 1e-3);
        assert!(load(text, Some(-1.0)).is_err());
    }

    #[test]
    fn trees_and_chains() {
        let text = r#"
kind = "quitting"
a = ["1/3", "1/3", "1/3"]
root = 10
[[node]]
id = 10
x = [2.1, 3.5, -50]
children = [11, 12]
probabilities = ["1/2", "1/2"]
[[node]]
id = 11
x = [-50, -50, -5.05]
children = [13]
probabilities = [1]
[[node]]
id = 12
x = [4, -50, -50]
children = [14]
probabilities = [1]
[[node]]
id = 13
x = [0, 5, -5]
[[node]]
id = 14
x = [0, 5, -5]
"#;
        let l = load(text, None).unwrap();
        match l.instance {
            Instance::QuittingTree { tree, .. } => {
                assert_eq!(tree.tree.len(), 5);
                assert_eq!(tree.ids[tree.tree.root()], 10);
            }
            other => panic!("{other:?}"),
        }
        let e = err("kind = \"quitting\"\na = [0.5]\nx = [[1], [2]]\n[[node]]\nid = 0\nx = [1]\n");
        assert!(e.contains("not both"), "{e}");
        let e = err("kind = \"stopping\"\na = [0.5]\n[[node]]\nid = 0\nx = [1]\nchildren = [3]\nprobabilities = [1]\n");
        assert!(
            e.contains("line 3") && e.contains("node 3 does not exist"),
            "{e}"
        );
    }

    #[test]
    fn raw_tables() {
        let text = "kind = \"raw-weights\"\nplayers = 2\n[[weight]]\nset = [2]\nplayer = 1\nvalue = 2\n[[weight]]\nset = [1]\nplayer = 2\nvalue = \"1/2\"\n";
        let l = load(text, None).unwrap();
        match l.instance {
            Instance::Raw { table, payoffs } => {
                assert_eq!(table.get(ExerciseSet::singleton(1), 0), Some(2.0));
                assert!(payoffs.is_none());
            }
            other => panic!("{other:?}"),
        }
        let e = err(
            "kind = \"raw-weights\"\nplayers = 2\n[[weight]]\nset = [3]\nplayer = 1\nvalue = 2\n",
        );
        assert!(e.contains("line 3") && e.contains("outside"), "{e}");
        let e = err("kind = \"raw-weights\"\nplayers = 3\na = [0.6, 0.6]\n");
        assert!(e.contains("players = 3"), "{e}");
    }
}

//! The `solve`, `verify` and `wuc` commands.

use dynkin_core::oracle::{
    analyze_single, analyze_stopping, check_weight_form, check_wuc, profile_index,
    search_wuc_violation, verify_quitting, verify_quitting_tree, verify_stopping_equilibrium,
    EquilibriumReport, RawGame, RawWeightTable, SingleGameView, StoppingPayoff, Verification,
    WucViolation, WUC_MAX_PLAYERS,
};
use dynkin_core::solver::{
    solve_quitting, solve_quitting_subgame_perfect, solve_single, QuittingGame, SolveResult,
};
use dynkin_core::stopping::{equilibrium_stopping, value_process, StoppingRule};
use dynkin_core::{Error, SinglePeriodGame, StrategyProfile, Tolerance, WeightSystem};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::format::{decision, exact, exact_list, fixed, fixed_list, tuple};
use crate::input::{load, Instance, Loaded, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Verify,
    Wuc,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Wuc => "wuc",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Overrides the tolerance given in the file.
    pub tolerance: Option<f64>,
    pub machine: bool,
    pub seed: u64,
}

/// Rendered report and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: u8,
}

pub const EXIT_NEGATIVE: u8 = 1;

/// Trials of the seeded WUC search, fewer for larger tables.
pub fn wuc_trials(players: usize) -> usize {
    if players <= 6 {
        2000
    } else {
        200
    }
}

/// Parses `text` and runs `command` on it.
pub fn run(command: Command, text: &str, opts: &Options) -> Result<Outcome, CliError> {
    let loaded = load(text, opts.tolerance)?;
    let mut r = Report::new(command, &loaded);
    match command {
        Command::Solve => solve(&loaded, &mut r)?,
        Command::Verify => verify(&loaded, &mut r)?,
        Command::Wuc => wuc(&loaded, opts.seed, &mut r)?,
    }
    Ok(r.render(opts.machine))
}

struct Report {
    lines: Vec<String>,
    fields: Map<String, Value>,
    code: u8,
}

impl Report {
    fn new(command: Command, l: &Loaded) -> Self {
        let mut r = Report {
            lines: Vec::new(),
            fields: Map::new(),
            code: 0,
        };
        r.field("command", json!(command.as_str()));
        r.field("kind", json!(l.kind.as_str()));
        r.field("players", json!(l.players()));
        r.field("tolerance", exact(l.tolerance.get()));
        r.field("value", Value::Null);
        r.field("equilibrium", Value::Null);
        r.line(format!("{} ({})", command.as_str(), l.kind.as_str()));
        r.line(format!("players: {}", l.players()));
        match l.weights() {
            Some(w) => {
                r.field("regime", json!(w.regime().as_str()));
                r.field("a", exact_list(w.generators()));
                r.line(format!("a: {}", fixed_list(w.generators())));
                r.line(format!(
                    "regime: {} (sum a = {})",
                    w.regime().as_str(),
                    fixed(w.total())
                ));
            }
            None => {
                r.field("regime", json!("raw"));
                r.line("regime: raw weight table");
            }
        }
        r.line(format!("tolerance: {:e}", l.tolerance.get()));
        r
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn field(&mut self, key: &str, v: Value) {
        self.fields.insert(key.to_string(), v);
    }

    fn verdict(&mut self, ok: bool) {
        self.field("agreement", json!(ok));
        if ok {
            self.line("solver value = oracle value ✓");
        } else {
            self.line("solver value ≠ oracle value ✗");
            self.code = EXIT_NEGATIVE;
        }
    }

    fn render(self, machine: bool) -> Outcome {
        let output = if machine {
            let mut s = serde_json::to_string_pretty(&Value::Object(self.fields))
                .expect("reports hold only strings, numbers and arrays");
            s.push('\n');
            s
        } else {
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        };
        Outcome {
            output,
            code: self.code,
        }
    }
}

fn unsupported(what: &str) -> CliError {
    CliError::invalid(None, what)
}

fn core(err: Error) -> CliError {
    CliError::from_core(err, None)
}

fn players_list(k: impl IntoIterator<Item = usize>) -> Value {
    Value::Array(k.into_iter().map(|k| json!(k + 1)).collect())
}

// ---- solve ----

fn solve(l: &Loaded, r: &mut Report) -> Result<(), CliError> {
    match &l.instance {
        Instance::Single(g) => single_solution(g, &solve_single(g), r),
        Instance::Stochastic { weights, scenarios } => {
            let g = scenarios.expected_game(weights).map_err(core)?;
            r.line(format!("scenarios: {}", scenarios.scenarios().len()));
            r.line(format!("expected X: {}", fixed_list(g.exercise_payoffs())));
            r.line(format!("expected P: {}", fixed_list(g.terminal_payoffs())));
            r.field("expected_x", exact_list(g.exercise_payoffs()));
            r.field("expected_p", exact_list(g.terminal_payoffs()));
            single_solution(&g, &solve_single(&g), r);
        }
        Instance::Quitting(q) => quitting_solution(q, r),
        Instance::Stopping { weights, tree, payoff: StoppingPayoff::Continuation } => {
            stopping_solution(weights, tree, r)?
        }
        Instance::Stopping { payoff: StoppingPayoff::Natural, .. } => {
            return Err(unsupported(
                "the natural-payoff variant has no value to solve for; run `verify` to enumerate its equilibria",
            ))
        }
        Instance::QuittingTree { .. } => {
            return Err(unsupported(
                "a quitting game on an event tree may lack pure equilibria; run `verify` to enumerate them",
            ))
        }
        Instance::Raw { .. } => {
            return Err(unsupported(
                "a raw weight table has no solver; run `verify` or `wuc`",
            ))
        }
    }
    Ok(())
}

fn single_solution(g: &SinglePeriodGame, s: &SolveResult<StrategyProfile>, r: &mut Report) {
    let decisions = s.equilibrium.decisions();
    r.line(format!("value: {}", fixed_list(&s.value)));
    r.line(format!("exercisers: {}", s.active_set));
    r.line(format!(
        "equilibrium: {}",
        tuple(decisions.iter().map(|&d| decision(d)))
    ));
    r.line("active set:");
    for k in 0..g.players() {
        let (x, p, v) = (g.exercise_payoffs()[k], g.terminal_payoffs()[k], s.value[k]);
        let state = if s.active_set.contains(k) {
            "pinned at X"
        } else {
            "free"
        };
        r.line(format!(
            "  player {}: X = {}, P = {}, value = {}, {state}",
            k + 1,
            fixed(x),
            fixed(p),
            fixed(v)
        ));
    }
    r.field("value", exact_list(&s.value));
    r.field(
        "equilibrium",
        json!({
            "exercisers": players_list(s.active_set.iter()),
            "decisions": decisions.iter().map(|&d| decision(d)).collect::<Vec<_>>(),
        }),
    );
    r.field("active_set", players_list(s.active_set.iter()));
}

fn quitting_solution(q: &QuittingGame, r: &mut Report) {
    let s = solve_quitting(q);
    let times = s.equilibrium.times();
    r.line(format!("horizon: {}", q.horizon()));
    r.line(format!("value: {}", fixed_list(&s.value)));
    r.line(format!("times: {}", tuple(times)));
    r.line(format!("quit before the horizon: {}", s.active_set));
    r.line(format!(
        "running max of X: {}",
        fixed_list(&q.running_max())
    ));
    r.field("value", exact_list(&s.value));
    r.field("horizon", json!(q.horizon()));
    r.field("equilibrium", json!({ "times": times }));
    r.field("active_set", players_list(s.active_set.iter()));
    match solve_quitting_subgame_perfect(q) {
        Ok(table) => {
            let on_path = table.on_path_profile();
            r.line(format!(
                "subgame-perfect: {} histories, on-path times {}",
                table.len(),
                tuple(on_path.times())
            ));
            r.field(
                "subgame_perfect",
                json!({ "histories": table.len(), "times": on_path.times() }),
            );
        }
        Err(e) => {
            r.line(format!("subgame-perfect: skipped ({e})"));
            r.field("subgame_perfect", Value::Null);
        }
    }
}

fn node_ids(t: &Tree, nodes: &[usize]) -> Vec<i64> {
    nodes.iter().map(|&n| t.ids[n]).collect()
}

fn stopping_nodes(t: &Tree, rule: &StoppingRule) -> Vec<Vec<i64>> {
    (0..t.tree.players())
        .map(|k| node_ids(t, &rule.first_stops(&t.tree, k)))
        .collect()
}

fn stopping_solution(w: &WeightSystem, t: &Tree, r: &mut Report) -> Result<(), CliError> {
    let vp = value_process(&t.tree, w).map_err(core)?;
    let tau = equilibrium_stopping(&t.tree, &vp);
    let root = vp.value(t.tree.root());
    let stops = stopping_nodes(t, &tau);
    r.line(format!("horizon: {}", t.tree.horizon()));
    r.line(format!("value: {}", fixed_list(root)));
    r.line("stopping nodes:");
    for (k, s) in stops.iter().enumerate() {
        r.line(format!("  player {}: {}", k + 1, tuple(s)));
    }
    r.line("value process:");
    let mut process = Vec::new();
    for &id in t.tree.order() {
        let node = t.tree.node(id);
        let u = vp.value(id);
        let mut text = format!(
            "  node {} (t = {}): U = {}, X = {}",
            t.ids[id],
            node.time,
            fixed_list(u),
            fixed_list(&node.x)
        );
        if let Some(c) = vp.continuation(id) {
            text.push_str(&format!(", E[U next] = {}", fixed_list(c)));
        }
        let stoppers = tau.stoppers(id);
        if !node.is_leaf() && !stoppers.is_empty() {
            text.push_str(&format!(", stop {stoppers}"));
        }
        r.line(text);
        process.push(json!({
            "node": t.ids[id],
            "time": node.time,
            "value": exact_list(u),
            "continuation": vp.continuation(id).map(|c| exact_list(c)),
        }));
    }
    r.field("value", exact_list(root));
    r.field("horizon", json!(t.tree.horizon()));
    r.field("equilibrium", json!({ "stopping_nodes": stops }));
    r.field("value_process", Value::Array(process));
    Ok(())
}

// ---- verify ----

fn verify(l: &Loaded, r: &mut Report) -> Result<(), CliError> {
    match &l.instance {
        Instance::Single(g) => verify_single(g, r),
        Instance::Stochastic { weights, scenarios } => {
            let g = scenarios.expected_game(weights).map_err(core)?;
            r.line(format!("scenarios: {}", scenarios.scenarios().len()));
            verify_single(&g, r)
        }
        Instance::Raw { table, payoffs } => {
            let Some((x, p)) = payoffs else {
                return Err(unsupported("verify needs `x` and `p` for a raw weight table; run `wuc` to test the table alone"));
            };
            let g = RawGame::new(table.clone(), x.clone(), p.clone(), l.tolerance).map_err(core)?;
            verify_raw(&g, r)
        }
        Instance::Quitting(q) => verify_quitting_rows(q, r),
        Instance::QuittingTree { weights, tree } => {
            let v = verify_quitting_tree(&tree.tree, weights, None).map_err(core)?;
            report_tree_profiles(tree, &v, "quit at", r);
            Ok(())
        }
        Instance::Stopping {
            weights,
            tree,
            payoff: StoppingPayoff::Continuation,
        } => verify_stopping(weights, tree, r),
        Instance::Stopping {
            weights,
            tree,
            payoff: StoppingPayoff::Natural,
        } => {
            let v = analyze_stopping(&tree.tree, weights, StoppingPayoff::Natural).map_err(core)?;
            report_tree_profiles(tree, &v, "stop at", r);
            Ok(())
        }
    }
}

fn oracle_summary(rep: &EquilibriumReport, r: &mut Report) {
    r.line(format!(
        "oracle: {} profiles, {} pure Nash, {} optimal",
        rep.profile_count(),
        rep.nash().len(),
        rep.optimal().len()
    ));
    r.line(format!("maximin: {}", fixed_list(rep.maximin())));
    r.line(format!("minimax: {}", fixed_list(rep.minimax())));
    r.field(
        "oracle",
        json!({
            "profiles": rep.profile_count(),
            "nash": rep.nash().len(),
            "optimal": rep.optimal().len(),
            "maximin": exact_list(rep.maximin()),
            "minimax": exact_list(rep.minimax()),
            "has_value": rep.has_value(),
        }),
    );
}

fn agrees(tol: Tolerance, value: &[f64], rep: &EquilibriumReport) -> bool {
    value
        .iter()
        .zip(rep.maximin().iter().zip(rep.minimax()))
        .all(|(&v, (&lo, &hi))| tol.eq(v, lo) && tol.eq(v, hi))
}

fn verify_single(g: &SinglePeriodGame, r: &mut Report) -> Result<(), CliError> {
    let rep = analyze_single(g).map_err(core)?;
    let s = solve_single(g);
    let optimal = rep.is_optimal(profile_index(&s.equilibrium));
    oracle_summary(&rep, r);
    r.line(format!("solver value: {}", fixed_list(&s.value)));
    r.line(format!(
        "solver exercisers {} optimal: {}",
        s.active_set,
        yes(optimal)
    ));
    r.field("value", exact_list(&s.value));
    r.field(
        "equilibrium",
        json!({ "exercisers": players_list(s.active_set.iter()) }),
    );
    r.field("equilibrium_optimal", json!(optimal));
    r.verdict(optimal && agrees(g.tolerance(), &s.value, &rep));
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn single_profile(profile: &[usize]) -> String {
    tuple(profile.iter().map(|&d| decision(d as u8)))
}

fn list_profiles(label: &str, items: &[String], r: &mut Report) {
    if items.is_empty() {
        r.line(format!("{label}: none"));
    } else {
        r.line(format!("{label}: {}", items.join(", ")));
    }
}

fn verify_raw(g: &RawGame, r: &mut Report) -> Result<(), CliError> {
    let rep = analyze_single(g).map_err(core)?;
    r.line(format!("X: {}", fixed_list(g.exercise_payoffs())));
    r.line(format!("P: {}", fixed_list(g.terminal_payoffs())));
    r.line("payoffs:");
    let mut table = Vec::with_capacity(rep.profile_count());
    for i in 0..rep.profile_count() {
        let profile = rep.profile(i);
        r.line(format!(
            "  {} -> {}",
            single_profile(&profile),
            fixed_list(rep.payoff(i))
        ));
        table.push(json!({
            "profile": profile.iter().map(|&d| decision(d as u8)).collect::<Vec<_>>(),
            "payoff": exact_list(rep.payoff(i)),
        }));
    }
    let names = |set: &[usize]| -> Vec<String> {
        set.iter()
            .map(|&i| single_profile(&rep.profile(i)))
            .collect()
    };
    let (nash, optimal) = (names(rep.nash()), names(rep.optimal()));
    list_profiles("pure Nash", &nash, r);
    list_profiles("optimal", &optimal, r);
    oracle_summary(&rep, r);
    r.line(format!("maximin = minimax: {}", yes(rep.has_value())));
    r.field("payoffs", Value::Array(table));
    r.field("nash", json!(nash));
    r.field("optimal", json!(optimal));
    if rep.has_value() {
        r.field("value", exact_list(rep.maximin()));
    }
    Ok(())
}

fn verify_quitting_rows(q: &QuittingGame, r: &mut Report) -> Result<(), CliError> {
    let s = solve_quitting(q);
    let v = verify_quitting(q, Some(&s.equilibrium)).map_err(core)?;
    oracle_summary(&v.report, r);
    let optimal = v.candidate_is_optimal();
    r.line(format!("solver value: {}", fixed_list(&s.value)));
    r.line(format!(
        "solver times {} optimal: {}",
        tuple(s.equilibrium.times()),
        yes(optimal)
    ));
    r.field("value", exact_list(&s.value));
    r.field("equilibrium", json!({ "times": s.equilibrium.times() }));
    r.field("equilibrium_optimal", json!(optimal));
    r.verdict(optimal && agrees(q.weights().tolerance(), &s.value, &v.report));
    Ok(())
}

fn verify_stopping(w: &WeightSystem, t: &Tree, r: &mut Report) -> Result<(), CliError> {
    let vp = value_process(&t.tree, w).map_err(core)?;
    let tau = equilibrium_stopping(&t.tree, &vp);
    let v = verify_stopping_equilibrium(&t.tree, w, &tau, StoppingPayoff::Continuation)
        .map_err(core)?;
    let root = vp.value(t.tree.root());
    oracle_summary(&v.report, r);
    let optimal = v.candidate_is_optimal();
    let attained = v
        .candidate
        .is_some_and(|i| root.approx_eq(v.report.payoff(i), w.tolerance()));
    let stops = stopping_nodes(t, &tau);
    let distinct = v.report.distinct_payoffs(v.report.nash());
    r.line(format!("payoff-distinct Nash outcomes: {distinct}"));
    r.field("distinct_nash_payoffs", json!(distinct));
    r.line(format!("solver value: {}", fixed_list(root)));
    r.line(format!(
        "solver stopping nodes {} optimal: {}",
        tuple(stops.iter().map(tuple)),
        yes(optimal)
    ));
    r.field("value", exact_list(root));
    r.field("equilibrium", json!({ "stopping_nodes": stops }));
    r.field("equilibrium_optimal", json!(optimal));
    r.verdict(optimal && attained && agrees(w.tolerance(), root, &v.report));
    Ok(())
}

/// Lists the Nash profiles of an enumeration over tree strategies.
fn report_tree_profiles(t: &Tree, v: &Verification, verb: &str, r: &mut Report) {
    let rep = &v.report;
    let describe = |i: usize| -> (String, Vec<Vec<i64>>) {
        let rule = v.rule(i);
        let per: Vec<Vec<i64>> = (0..t.tree.players())
            .map(|k| {
                let internal: Vec<usize> = rule
                    .first_stops(&t.tree, k)
                    .into_iter()
                    .filter(|&n| !t.tree.node(n).is_leaf())
                    .collect();
                node_ids(t, &internal)
            })
            .collect();
        let text = per
            .iter()
            .enumerate()
            .map(|(k, nodes)| {
                if nodes.is_empty() {
                    format!("player {} never", k + 1)
                } else {
                    format!("player {} {verb} {}", k + 1, tuple(nodes))
                }
            })
            .collect::<Vec<_>>()
            .join("; ");
        (text, per)
    };
    oracle_summary(rep, r);
    let distinct = rep.distinct_payoffs(rep.nash());
    r.line(format!("payoff-distinct Nash outcomes: {distinct}"));
    if rep.nash().is_empty() {
        r.line("pure Nash: none");
    } else {
        r.line("pure Nash:");
    }
    let mut nash = Vec::new();
    for &i in rep.nash() {
        let (text, per) = describe(i);
        let optimal = if rep.is_optimal(i) { ", optimal" } else { "" };
        r.line(format!(
            "  {text} -> {}{optimal}",
            fixed_list(rep.payoff(i))
        ));
        nash.push(json!({
            "nodes": per,
            "payoff": exact_list(rep.payoff(i)),
            "optimal": rep.is_optimal(i),
        }));
    }
    r.line(format!("maximin = minimax: {}", yes(rep.has_value())));
    r.field("nash", Value::Array(nash));
    r.field("distinct_nash_payoffs", json!(distinct));
    if let Some(&i) = rep.optimal().first() {
        r.field("value", exact_list(rep.payoff(i)));
    }
}

// ---- wuc ----

fn wuc(l: &Loaded, seed: u64, r: &mut Report) -> Result<(), CliError> {
    let m = l.players();
    let tol = l.tolerance;
    let table = match (&l.instance, l.weights()) {
        (Instance::Raw { table, .. }, _) => table.clone(),
        (_, Some(w)) => RawWeightTable::from_generators(w.generators()).map_err(core)?,
        (_, None) => unreachable!("every non-raw instance carries generators"),
    };
    if m == 1 {
        r.line("WUC: vacuously yes (m=1)");
        r.line("form fit: not applicable (m=1)");
        r.field("wuc", json!("vacuous"));
        r.field("witness", Value::Null);
        r.field("form_fit", Value::Null);
        return Ok(());
    }
    if m > WUC_MAX_PLAYERS {
        return Err(core(Error::TooLarge {
            what: "players for the WUC check",
            size: m as u128,
            limit: WUC_MAX_PLAYERS as u128,
        }));
    }
    // the file's own payoffs first, then the seeded search
    let concrete = match &l.instance {
        Instance::Single(g) => check_wuc(g)
            .map_err(core)?
            .map(|v| witness(g, v, "file payoffs")),
        Instance::Raw {
            table,
            payoffs: Some((x, p)),
        } => {
            let g = RawGame::new(table.clone(), x.clone(), p.clone(), tol).map_err(core)?;
            check_wuc(&g)
                .map_err(core)?
                .map(|v| witness(&g, v, "file payoffs"))
        }
        _ => None,
    };
    let trials = wuc_trials(m);
    let found = match concrete {
        Some(w) => Some(w),
        None => search_wuc_violation(&table, tol, seed, trials)
            .map_err(core)?
            .map(|c| {
                let g =
                    RawGame::new(table.clone(), c.x, c.p, tol).expect("search payoffs are valid");
                witness(&g, c.violation, "search")
            }),
    };
    let fit = check_weight_form(&table, tol);
    match &found {
        Some((lines, value)) => {
            r.line("WUC: no");
            r.line("WUC witness found:");
            for s in lines {
                r.line(format!("  {s}"));
            }
            r.field("wuc", json!("no"));
            r.field("witness", value.clone());
            r.code = EXIT_NEGATIVE;
        }
        None => {
            r.line("WUC: yes");
            r.line(format!(
                "search: {trials} payoff draws with seed {seed}, no violation"
            ));
            r.field("wuc", json!("yes"));
            r.field("witness", Value::Null);
        }
    }
    r.field("search", json!({ "seed": seed, "trials": trials }));
    match &fit {
        Some(a) => {
            r.line(format!("form fit: a = {}", fixed_list(a)));
            r.line("a recovered");
            r.field("form_fit", exact_list(a));
        }
        None => {
            r.line("form fit: none");
            r.field("form_fit", Value::Null);
        }
    }
    Ok(())
}

fn witness<G: SingleGameView + ?Sized>(
    g: &G,
    v: WucViolation,
    source: &str,
) -> (Vec<String>, Value) {
    let from = decision(1 - v.to);
    let to = decision(v.to);
    let lines = vec![
        format!("source: {source}"),
        format!("X = {}", fixed_list(g.exercise_payoffs())),
        format!("P = {}", fixed_list(g.terminal_payoffs())),
        format!(
            "player {} switches {from} -> {to} against {}",
            v.deviator + 1,
            tuple(v.profile.iter().map(|&d| decision(d)))
        ),
        format!(
            "player {}: {} -> {}, player {}: {} -> {}",
            v.deviator + 1,
            fixed(v.before[0]),
            fixed(v.after[0]),
            v.other + 1,
            fixed(v.before[1]),
            fixed(v.after[1])
        ),
    ];
    let value = json!({
        "source": source,
        "x": exact_list(g.exercise_payoffs()),
        "p": exact_list(g.terminal_payoffs()),
        "deviator": v.deviator + 1,
        "other": v.other + 1,
        "profile": v.profile.iter().map(|&d| decision(d)).collect::<Vec<_>>(),
        "to": to,
        "before": exact_list(&v.before),
        "after": exact_list(&v.after),
    });
    (lines, value)
}

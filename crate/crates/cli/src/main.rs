//! `invlim`: validate inputs, enumerate threads, decompose limit elements,
//! check the automorphism model, play the ascent game and check goodness.
//!
//! Every run prints a text report and ends with an `outcome:` line; `--out`
//! also writes the report as JSON. Exit status: 0 pass, 1 fail (an invariant
//! or verification failed), 2 error (the input could not be used).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use invlim_core::grouplimit::LimitError;
use invlim_core::invsys::{check_good, GameCondition, SystemError};
use invlim_core::io::{self, Document, IoError};
use invlim_core::model::{verify_phi_isomorphism, ModelError};
use invlim_core::poset::{play_bounded, player_one_bound_strategy, DirectedSet, PosetError, SeededRandomStrategy, Side};

#[derive(Parser)]
#[command(name = "invlim", version, about = "Inverse systems over directed sets")]
struct Cli {
    /// Also write the run report as JSON to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Most entries printed for long lists.
    #[arg(long, global = true, default_value_t = 20)]
    limit: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load any input file and run its load-time checks.
    Validate { path: PathBuf },
    /// Enumerate the threads of a system or tree.
    Threads { path: PathBuf },
    /// Decompose a limit element into basis elements and check the result.
    Decompose { system: PathBuf, element: PathBuf },
    /// Check that automorphisms of the model match the inverse limit.
    Model { path: PathBuf },
    /// Play the bound strategy against a seeded random opponent.
    Game {
        path: PathBuf,
        #[arg(long, default_value_t = 8)]
        rounds: usize,
    },
    /// Check the goodness conditions with finite bounds.
    Good {
        system: PathBuf,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        nu: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Threads { .. } => "threads",
            Command::Decompose { .. } => "decompose",
            Command::Model { .. } => "model",
            Command::Game { .. } => "game",
            Command::Good { .. } => "good",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Validate { path } | Command::Threads { path } | Command::Model { path } | Command::Game { path, .. } => {
                vec![path]
            }
            Command::Decompose { system, element } => vec![system, element],
            Command::Good { system, .. } => vec![system],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Error => 2,
        }
    }
}

/// What a command found.
struct Run {
    outcome: Outcome,
    lines: Vec<String>,
    details: Value,
    /// Extra JSON files to write next to the report: (suffix, contents).
    extra: Vec<(&'static str, Value)>,
}

impl Run {
    fn new(pass: bool, lines: Vec<String>, details: Value) -> Self {
        let outcome = if pass { Outcome::Pass } else { Outcome::Fail };
        Run { outcome, lines, details, extra: Vec::new() }
    }
}

/// A broken invariant is a failure; anything that stops the input from being
/// used at all is an error.
fn classify(e: &IoError) -> Outcome {
    let invariant = match e {
        IoError::Poset(p) => matches!(p, PosetError::NotDirected(..)),
        IoError::System(s) => system_invariant(s),
        IoError::Limit(l) => match l {
            LimitError::System(s) => system_invariant(s),
            LimitError::Poset(p) => matches!(p, PosetError::NotDirected(..)),
            _ => matches!(l, LimitError::Incoherent { .. } | LimitError::Unstable { .. } | LimitError::ClaimViolated(_)),
        },
        IoError::Model(m) => match m {
            ModelError::System(s) => system_invariant(s),
            _ => matches!(m, ModelError::Incoherent { .. } | ModelError::TranslationFormViolated { .. }),
        },
        IoError::Read { .. } | IoError::Json { .. } | IoError::Schema(_) => false,
    };
    if invariant {
        Outcome::Fail
    } else {
        Outcome::Error
    }
}

fn system_invariant(s: &SystemError) -> bool {
    matches!(
        s,
        SystemError::CoherenceViolation { .. } | SystemError::Poset(PosetError::NotDirected(..)) | SystemError::NotAThread(_)
    )
}

fn digest(path: &Path) -> Option<String> {
    let bytes = fs::read(path).ok()?;
    Some(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn capped<T>(items: &[T], limit: usize, show: impl Fn(&T) -> String) -> Vec<String> {
    let mut out: Vec<String> = items.iter().take(limit).map(|t| format!("  {}", show(t))).collect();
    if items.len() > limit {
        out.push(format!("  ... {} more", items.len() - limit));
    }
    out
}

fn describe_base(d: &DirectedSet) -> Value {
    json!({
        "finite": d.is_finite(),
        "loaded": d.len(),
        "maximum": d.maximum().map(|m| d.name(m).to_string()),
    })
}

fn validate(path: &Path) -> Result<Run, IoError> {
    let doc = io::load_document(path)?;
    let kind = doc.kind();
    let (summary, details) = match &doc {
        Document::Poset(d) => {
            let kind = if d.is_finite() { "finite" } else { "symbolic" };
            (format!("{kind} directed set with {} loaded elements", d.len()), describe_base(d))
        }
        Document::System(s) => (
            format!("coherent system over {} points, largest fiber {}", s.base().len(), s.max_fiber()),
            json!({ "base": describe_base(s.base()), "max_fiber": s.max_fiber() }),
        ),
        Document::Tree(t) => {
            check_tree(t)?;
            (
                format!("tree with {} nodes, height {}", t.len(), t.height()),
                json!({ "nodes": t.len(), "height": t.height(), "branches": t.cofinal_branches().len() }),
            )
        }
        Document::GroupSystem(g) => {
            let orders: Vec<usize> = g.groups().iter().map(|t| t.order()).collect();
            (
                format!("group system over {} points, group orders {orders:?}", g.base().len()),
                json!({ "base": describe_base(g.base()), "orders": orders }),
            )
        }
        Document::Element(g, _) => (
            format!("coherent {:?} limit element over {} points", g.variant(), g.carrier().base().len()).to_lowercase(),
            json!({ "variant": g.variant(), "points": g.carrier().base().len() }),
        ),
    };
    let mut details = details;
    details["kind"] = json!(kind);
    Ok(Run::new(true, vec![format!("{kind}: {summary}")], details))
}

/// Trees are validated by building their level system.
fn check_tree(t: &invlim_core::invsys::Tree) -> Result<(), IoError> {
    t.inverse_system()?;
    Ok(())
}

fn threads(path: &Path, limit: usize) -> Result<Run, IoError> {
    let sys = io::load_system(path)?;
    let threads = sys.enumerate_threads()?;
    let named: Vec<Vec<(String, String)>> = threads.iter().map(|t| sys.thread_names(t)).collect();
    let mut lines = vec![format!("{} threads", threads.len())];
    lines.extend(capped(&named, limit, |t| {
        t.iter().map(|(p, a)| format!("{p}:{a}")).collect::<Vec<_>>().join(" ")
    }));
    let listed: Vec<Value> = named
        .iter()
        .take(limit)
        .map(|t| Value::Object(t.iter().map(|(p, a)| (p.clone(), json!(a))).collect()))
        .collect();
    Ok(Run::new(true, lines, json!({ "count": threads.len(), "threads": listed })))
}

fn decompose(system: &Path, element: &Path) -> Result<Run, IoError> {
    let sys = io::load_system(system)?;
    let (g, x) = io::load_element(element, Some(sys))?;
    let d = g.decompose(&x)?;
    let back = g.recompose(&d)?;
    let ok = g.equal(&back, &x)?;
    let out = g.decomposition_json(&d);
    let mut lines = vec![format!(
        "{} terms, stabilizer {}",
        d.len(),
        g.carrier().base().name(d.stabilizer)
    )];
    for (t, k) in &d.terms {
        let at = g.carrier().fiber(d.stabilizer).name(t.at(d.stabilizer)).into_owned();
        lines.push(format!("  thread through {at} ^ {k}"));
    }
    lines.push(format!("recomposition {}", if ok { "matches" } else { "DIFFERS" }));
    let mut run = Run::new(ok, lines, json!({ "decomposition": out.clone(), "recomposed_equal": ok }));
    run.extra.push(("decomposition", out));
    Ok(run)
}

fn model(path: &Path) -> Result<Run, IoError> {
    let sys = io::load_group_system(path)?;
    let r = verify_phi_isomorphism(&sys)?;
    let lines = vec![
        format!("domain size {}", r.domain_size),
        format!("|Aut(M)| = {}, |G_I| = {}", r.automorphisms, r.limit_size),
        format!(
            "injective {}, surjective {}, homomorphism {}, closed {}, round trip {}",
            r.injective, r.surjective, r.homomorphism, r.closed, r.round_trip
        ),
    ];
    Ok(Run::new(r.pass, lines, serde_json::to_value(&r).unwrap_or(Value::Null)))
}

fn base_of(path: &Path) -> Result<DirectedSet, IoError> {
    Ok(match io::load_document(path)? {
        Document::Poset(d) => d,
        Document::System(s) => s.base().clone(),
        Document::Tree(t) => t.inverse_system()?.base().clone(),
        Document::GroupSystem(g) => g.base().clone(),
        Document::Element(g, _) => g.carrier().base().clone(),
    })
}

fn game(path: &Path, rounds: usize, seed: u64) -> Result<Run, IoError> {
    let d = base_of(path)?;
    let one = player_one_bound_strategy(&d);
    let two = SeededRandomStrategy { side: Side::II, seed, elements: d.len() };
    let t = play_bounded(&d, &one, &two, rounds)?;
    let moves: Vec<&str> = t.moves.iter().map(|&p| d.name(p)).collect();
    let lines = vec![
        format!("moves: {}", moves.join(" ")),
        format!("verdict: {} (round {})", t.verdict.as_str(), t.round),
    ];
    let details = json!({ "moves": moves, "verdict": t.verdict.as_str(), "round": t.round, "seed": seed });
    Ok(Run::new(t.verdict.favours_player_one(), lines, details))
}

fn good(system: &Path, lambda: usize, nu: usize) -> Result<Run, IoError> {
    let sys = io::load_system(system)?;
    let r = check_good(&sys, lambda, nu);
    let game = match &r.game {
        GameCondition::HoldsWithWitness { maximum, .. } => format!("holds (Player I wins through {maximum})"),
        GameCondition::Unknown => "unknown".to_string(),
    };
    let opt = |v: Option<usize>| v.map_or("unknown".to_string(), |n| n.to_string());
    let lines = vec![
        format!("game condition: {game}"),
        format!("|D| = {}, largest fiber {}, lambda = {lambda}", opt(r.points), r.max_fiber),
        format!("|A_I| = {}, nu = {nu}", opt(r.threads)),
        format!("good: {}", r.good),
        format!("note: {}", r.note),
    ];
    Ok(Run::new(r.good, lines, serde_json::to_value(&r).unwrap_or(Value::Null)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Validate { path } => validate(path),
        Command::Threads { path } => threads(path, cli.limit),
        Command::Decompose { system, element } => decompose(system, element),
        Command::Model { path } => model(path),
        Command::Game { path, rounds } => game(path, *rounds, cli.seed),
        Command::Good { system, lambda, nu } => good(system, *lambda, *nu),
    };
    let (mut run, error) = match result {
        Ok(run) => (run, None),
        Err(e) => {
            let outcome = classify(&e);
            let msg = e.to_string();
            (Run { outcome, lines: vec![format!("{}: {msg}", if outcome == Outcome::Fail { "fail" } else { "error" })], details: Value::Null, extra: Vec::new() }, Some(msg))
        }
    };

    let mut artifacts = Vec::new();
    let mut write_errors = Vec::new();
    if let Some(out) = &cli.out {
        for (suffix, value) in std::mem::take(&mut run.extra) {
            let path = out.with_extension(format!("{suffix}.json"));
            match fs::write(&path, format!("{value:#}\n")) {
                Ok(()) => artifacts.push(path.display().to_string()),
                Err(e) => write_errors.push(format!("{}: {e}", path.display())),
            }
        }
        artifacts.push(out.display().to_string());
    }
    let inputs: Vec<Value> = cli
        .command
        .inputs()
        .iter()
        .map(|p| json!({ "path": p.display().to_string(), "sha256": digest(p) }))
        .collect();
    let elapsed = start.elapsed().as_millis() as u64;
    let report = json!({
        "command": cli.command.name(),
        "argv": std::env::args().collect::<Vec<_>>(),
        "inputs": inputs,
        "seed": cli.seed,
        "outcome": run.outcome,
        "exit_code": run.outcome.code(),
        "artifacts": artifacts,
        "duration_ms": elapsed,
        "details": run.details,
        "error": error,
    });

    for line in &run.lines {
        println!("{line}");
    }
    if let Some(out) = &cli.out {
        if let Err(e) = fs::write(out, format!("{report:#}\n")) {
            write_errors.push(format!("{}: {e}", out.display()));
        }
    }
    for e in &write_errors {
        eprintln!("cannot write report: {e}");
    }
    let outcome = if write_errors.is_empty() { run.outcome } else { Outcome::Error };
    println!("outcome: {} ({elapsed} ms)", serde_json::to_value(outcome).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
    ExitCode::from(outcome.code())
}

//! Command-line front end for the `braidqp` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::braid::{BraidMove, Word};
use crate::cartan::GammaGraph;
use crate::cohomology::oracle::brute_force_equivalence_oracle;
use crate::cohomology::{
    build_complex, class_of, right_equivalent_primitive, transport_basis, transported_class, twisted_class_of,
    two_cycle_basis, CWComplex,
};
use crate::error::{Error, Result};
use crate::fuzz::{check_word, minimize, sweep, SweepOptions};
use crate::mutation::{mutate, mutate_along_move, QP};
use crate::potential::{
    enumerate_abbar_cycles, is_primitive, is_signed_pow2, parse_scalar, primitive_potential, seeded_potential, Potential,
    Seeding,
};
use crate::qbuild::{build_qx, build_qxtilde, mutation_vertex, relabel_after_move_linear, BraidQuiver};
use crate::quiver::{Quiver, Vertex};

#[derive(Debug, Parser)]
#[command(name = "braidqp", version, about = "Quivers with potentials from braid words")]
pub struct Cli {
    /// Truncation degree for right-equivalences (default: BRAIDQP_TRUNCATION
    /// or twice the longest cycle).
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build Q(x), or Q(x~) with --cyclic, and write it as JSON.
    Build {
        #[command(flatten)]
        input: WordInput,
        #[arg(long)]
        cyclic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a Graphviz rendering.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Mutate a quiver with potential at one vertex.
    Mutate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Vertex as `dec,idx`.
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a braid move and carry a primitive potential along.
    Move {
        #[command(flatten)]
        input: WordInput,
        /// Move as `kind@position` with kind one of commute, aba, mixed.
        #[arg(long = "move")]
        mv: String,
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the 2-cycle basis size and the class of a primitive potential.
    Classify {
        #[command(flatten)]
        input: WordInput,
        #[command(flatten)]
        coeffs: CoeffArgs,
    },
    /// Decide whether two primitive potentials are right-equivalent.
    Equiv {
        #[command(flatten)]
        input: WordInput,
        #[arg(long)]
        qp1: PathBuf,
        #[arg(long)]
        qp2: PathBuf,
    },
    /// Check one braid move against the full mutation statement.
    VerifyMove {
        #[command(flatten)]
        input: WordInput,
        #[arg(long = "move")]
        mv: String,
        /// Compare Q(x) and Q(y) without cyclic closure.
        #[arg(long)]
        linear: bool,
        #[command(flatten)]
        coeffs: CoeffArgs,
    },
    /// Check the invariant suite on random words.
    Fuzz {
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 14)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_exp: u32,
        /// Directory for reproduction files of failing cases.
        #[arg(long, default_value = ".")]
        repro_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct WordInput {
    /// Graph file, or a builtin name: a2, a3, ..., cycle3, cycle4, ...
    #[arg(long)]
    pub gamma: String,
    /// Whitespace-separated letters, `a` for s_a and `a~` for its bar.
    #[arg(long)]
    pub word: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeedingMode {
    Ones,
    PowersOfTwo,
    File,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, value_enum, default_value_t = SeedingMode::Ones)]
    pub seeding: SeedingMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub max_exp: u32,
    /// JSON array of coefficients in cycle order, or a QP or potential file.
    /// Giving it implies `--seeding file`.
    #[arg(long, alias = "qp")]
    pub coeffs: Option<PathBuf>,
}

/// Everything a command needs, resolved from flags and the environment.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub gamma: Option<String>,
    pub word: Option<String>,
    pub truncation: Option<usize>,
    pub seeding: SeedingMode,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
}

/// Resolves `--gamma`: an existing file is parsed, otherwise `aN` and
/// `cycleN` name the path and cycle graphs on `1..=N`.
pub fn load_gamma(name: &str) -> Result<GammaGraph> {
    let path = Path::new(name);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        return GammaGraph::parse(&text, name);
    }
    let builtin = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    if let Some(n) = builtin("cycle").filter(|&n| n >= 3) {
        return Ok(GammaGraph::cycle(n));
    }
    if let Some(n) = builtin("a").filter(|&n| n >= 1) {
        return Ok(GammaGraph::a_n(n));
    }
    Err(Error::parse(name, 0, "no such file and not a builtin graph (aN, cycleN)"))
}

fn load_word(input: &WordInput) -> Result<(GammaGraph, Word)> {
    let g = load_gamma(&input.gamma)?;
    let w = Word::parse(&input.word, &g)?;
    Ok((g, w))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Reads a coefficient array or a potential. A QP file is accepted too.
fn read_potential_or_coeffs(path: &Path, cells: &CWComplex) -> Result<Potential> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    match &v {
        Value::Array(items) => {
            let coeffs = items
                .iter()
                .map(|x| match x {
                    Value::String(s) => parse_scalar(s),
                    Value::Number(n) => parse_scalar(&n.to_string()),
                    _ => Err(Error::parse(&path.display().to_string(), 1, "coefficients must be strings or integers")),
                })
                .collect::<Result<Vec<_>>>()?;
            primitive_potential(&cells.cells, &coeffs)
        }
        _ => read_potential(path),
    }
}

fn read_potential(path: &Path) -> Result<Potential> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    match v.get("potential") {
        Some(p) => Potential::from_json_value(p),
        None => Potential::from_json_value(&v),
    }
}

fn coefficients(bq: &BraidQuiver, cw: &CWComplex, args: &CoeffArgs) -> Result<Potential> {
    let seeding = match (args.seeding, &args.coeffs) {
        (_, Some(path)) => {
            let w = read_potential_or_coeffs(path, cw)?;
            if !is_primitive(&w, &cw.cells) {
                return Err(Error::Potential(format!("{} is not primitive on `{}`", path.display(), bq.word)));
            }
            return Ok(w);
        }
        (SeedingMode::File, None) => {
            return Err(Error::parse("--coeffs", 0, "`--seeding file` needs `--coeffs <file>`"));
        }
        (SeedingMode::Ones, None) => Seeding::Ones,
        (SeedingMode::PowersOfTwo, None) => Seeding::PowersOfTwo {
            seed: args.seed,
            max_exp: args.max_exp,
        },
    };
    seeded_potential(&cw.cells, &seeding)
}

fn parse_move(s: &str) -> Result<BraidMove> {
    s.parse()
}

fn cmd_build(out: &mut dyn Write, input: &WordInput, cyclic: bool, path: Option<&Path>, dot: Option<&Path>) -> Result<()> {
    let (g, w) = load_word(input)?;
    let q: Quiver = if cyclic {
        let bq = build_qxtilde(&w, &g)?;
        for warning in &bq.warnings {
            eprintln!("warning: {warning}");
        }
        bq.quiver
    } else {
        build_qx(&w, &g)?
    };
    if let Some(d) = dot {
        fs::write(d, q.to_dot())?;
    }
    emit(out, path, &q.to_json())
}

fn cmd_mutate(out: &mut dyn Write, input: &Path, vertex: &str, path: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(input)?;
    let qp = QP::from_json(&text)?;
    let k: Vertex = vertex.parse()?;
    let m = mutate(&qp, &k)?;
    emit(out, path, &m.to_json()?)
}

fn cmd_move(out: &mut dyn Write, input: &WordInput, mv: &str, coeffs: &CoeffArgs, path: Option<&Path>) -> Result<()> {
    let (g, w) = load_word(input)?;
    let mv = parse_move(mv)?;
    let bq = build_qxtilde(&w, &g)?;
    let cw = build_complex(&bq)?;
    let pot = coefficients(&bq, &cw, coeffs)?;
    let outcome = mutate_along_move(&bq, &pot, &mv)?;
    let relabel: Vec<Value> = outcome
        .relabel
        .iter()
        .map(|(a, b)| json!({"from": a.to_string(), "to": b.to_string()}))
        .collect();
    let v = json!({
        "move": mv.to_string(),
        "qp": outcome.qp.to_json_value()?,
        "relabel": relabel,
        "seed": coeffs.seed,
        "vertex": outcome.vertex.as_ref().map(|k| outcome.relabel.get(k).unwrap_or(k).to_string()),
        "vertex_before": outcome.vertex.as_ref().map(|k| k.to_string()),
        "word": outcome.word.to_string(),
        "word_before": w.to_string(),
    });
    emit(out, path, &pretty(&v)?)
}

fn cmd_classify(out: &mut dyn Write, input: &WordInput, coeffs: &CoeffArgs) -> Result<()> {
    let (g, w) = load_word(input)?;
    let bq = build_qxtilde(&w, &g)?;
    let cw = build_complex(&bq)?;
    let basis = two_cycle_basis(&cw);
    let pot = coefficients(&bq, &cw, coeffs)?;
    let class = class_of(&pot, &cw, &basis)?;
    let twisted = twisted_class_of(&pot, &cw, &basis)?;
    writeln!(out, "cells: {}", cw.cells.len())?;
    writeln!(out, "basis size: {}", basis.len())?;
    writeln!(out, "invariant: {class}")?;
    writeln!(out, "twisted: {twisted}")?;
    if basis.is_empty() {
        writeln!(out, "verdict: all primitive potentials equivalent")?;
    }
    Ok(())
}

fn cmd_equiv(out: &mut dyn Write, input: &WordInput, qp1: &Path, qp2: &Path) -> Result<()> {
    let (g, w) = load_word(input)?;
    let bq = build_qxtilde(&w, &g)?;
    let cw = build_complex(&bq)?;
    let basis = two_cycle_basis(&cw);
    let w1 = read_potential_or_coeffs(qp1, &cw)?;
    let w2 = read_potential_or_coeffs(qp2, &cw)?;
    let verdict = right_equivalent_primitive(&w1, &w2, &cw, &basis)?;
    writeln!(out, "invariant 1: {}", class_of(&w1, &cw, &basis)?)?;
    writeln!(out, "invariant 2: {}", class_of(&w2, &cw, &basis)?)?;
    writeln!(out, "verdict: {}", if verdict { "equivalent" } else { "not equivalent" })?;
    let seeded = |p: &Potential| p.terms().all(|(_, c)| is_signed_pow2(c).is_some());
    if seeded(&w1) && seeded(&w2) {
        let oracle = brute_force_equivalence_oracle(&w1, &w2, &cw, 64)?;
        writeln!(out, "oracle: {}", if oracle { "equivalent" } else { "not equivalent" })?;
        if oracle != verdict {
            return Err(Error::Invariant("oracle disagrees with the cohomology test".into()));
        }
    }
    Ok(())
}

fn cmd_verify_move(out: &mut dyn Write, input: &WordInput, mv: &str, linear: bool, coeffs: &CoeffArgs) -> Result<()> {
    let (g, x) = load_word(input)?;
    let mv = parse_move(mv)?;
    let y = x.apply_move(&mv, &g.cartan())?;
    writeln!(out, "x = {x}")?;
    writeln!(out, "y = {y}")?;
    if linear {
        let qx = build_qx(&x, &g)?;
        let qy = build_qx(&y, &g)?;
        let map = relabel_after_move_linear(&x, &mv, &g)?;
        let mutated = match mutation_vertex(&x, &mv, false) {
            Some(k) => {
                writeln!(out, "mutation vertex: {k}")?;
                qx.mutate(&k)?
            }
            None => qx,
        };
        let ok = mutated.relabel(&map)? == qy;
        writeln!(out, "quiver: {}", if ok { "ok" } else { "FAILED" })?;
        return if ok {
            Ok(())
        } else {
            Err(Error::Invariant("Q(y) is not the stated mutation of Q(x)".into()))
        };
    }
    let bq = build_qxtilde(&x, &g)?;
    let cw = build_complex(&bq)?;
    let basis = two_cycle_basis(&cw);
    let pot = coefficients(&bq, &cw, coeffs)?;
    let outcome = mutate_along_move(&bq, &pot, &mv)?;
    if let Some(k) = &outcome.vertex {
        writeln!(out, "mutation vertex: {k}")?;
    }
    let cw_y = build_complex(&outcome.target)?;
    let basis_y = two_cycle_basis(&cw_y);
    let t = transport_basis(&mv, &bq, &cw, &cw_y, &basis)?;
    let homotopy = basis.len() == basis_y.len();
    writeln!(
        out,
        "(i) complexes: {} (2-cycle ranks {} and {})",
        if homotopy { "ok" } else { "FAILED" },
        basis.len(),
        basis_y.len()
    )?;
    let cycles_y = enumerate_abbar_cycles(&outcome.target)?;
    let primitive = is_primitive(&outcome.qp.potential, &cycles_y);
    writeln!(out, "(ii) primitive: {}", if primitive { "ok" } else { "FAILED" })?;
    let before = twisted_class_of(&pot, &cw, &basis)?;
    let after = transported_class(&outcome.qp.potential, &cw_y, &t)?;
    let same = before == after;
    writeln!(out, "(iii) twisted class: {} ({before} -> {after})", if same { "ok" } else { "FAILED" })?;
    for p in &t.pairs {
        writeln!(out, "  pair {}-{}: k {} -> {} ({:?})", p.pair.0, p.pair.1, p.k_before, p.k_after, p.case)?;
    }
    if homotopy && primitive && same {
        Ok(())
    } else {
        Err(Error::Invariant(format!("move {mv} on `{x}` fails the mutation check")))
    }
}

fn cmd_fuzz(
    out: &mut dyn Write,
    gamma: &str,
    count: usize,
    max_len: usize,
    seed: u64,
    opts: &SweepOptions,
    repro_dir: &Path,
) -> Result<()> {
    let g = load_gamma(gamma)?;
    let report = sweep(&g, count, max_len, seed, opts)?;
    writeln!(out, "seed: {seed}")?;
    writeln!(out, "words: {}", report.words)?;
    writeln!(out, "moves: {} (skipped {})", report.moves, report.skipped_moves)?;
    for (check, n) in &report.passed {
        writeln!(out, "  {check}: {n} passed, {} failed", report.failures_of(*check))?;
    }
    for u in &report.unsupported {
        writeln!(out, "unsupported: {u}")?;
    }
    let Some(first) = report.failures.first() else {
        return Ok(());
    };
    let check = first.check;
    let still_fails = |w: &Word| {
        check_word(w, &g, seed, opts)
            .failures
            .iter()
            .any(|f| f.check == check)
    };
    let minimal = minimize(&first.word, &g, still_fails);
    let repro = json!({
        "check": check.to_string(),
        "gamma": g.to_text(),
        "message": first.message,
        "minimized_word": minimal.to_string(),
        "move": first.mv.map(|m| m.to_string()),
        "seed": seed,
        "word": first.word.to_string(),
    });
    fs::create_dir_all(repro_dir)?;
    let file = repro_dir.join(format!("braidqp-repro-{seed}.json"));
    fs::write(&file, pretty(&repro)?)?;
    for f in &report.failures {
        writeln!(out, "FAILED {f}")?;
    }
    writeln!(out, "reproduction written to {}", file.display())?;
    Err(Error::Invariant(format!("{} invariant failures", report.failures.len())))
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        let (gamma, word) = match &self.command {
            Command::Build { input, .. }
            | Command::Move { input, .. }
            | Command::Classify { input, .. }
            | Command::Equiv { input, .. }
            | Command::VerifyMove { input, .. } => (Some(input.gamma.clone()), Some(input.word.clone())),
            Command::Fuzz { gamma, .. } => (Some(gamma.clone()), None),
            Command::Mutate { .. } => (None, None),
        };
        let (seeding, seed) = match &self.command {
            Command::Move { coeffs, .. } | Command::Classify { coeffs, .. } | Command::VerifyMove { coeffs, .. } => {
                (coeffs.seeding, coeffs.seed)
            }
            Command::Fuzz { seed, .. } => (SeedingMode::PowersOfTwo, *seed),
            _ => (SeedingMode::Ones, 0),
        };
        let outputs = match &self.command {
            Command::Build { out, dot, .. } => out.iter().chain(dot).cloned().collect(),
            Command::Mutate { out, .. } | Command::Move { out, .. } => out.iter().cloned().collect(),
            Command::Fuzz { repro_dir, .. } => vec![repro_dir.clone()],
            _ => Vec::new(),
        };
        RunConfig {
            gamma,
            word,
            truncation: self.truncation,
            seeding,
            seed,
            outputs,
        }
    }

    pub fn run(&self, out: &mut dyn Write) -> Result<()> {
        match &self.command {
            Command::Build { input, cyclic, out: path, dot } => cmd_build(out, input, *cyclic, path.as_deref(), dot.as_deref()),
            Command::Mutate { input, vertex, out: path } => cmd_mutate(out, input, vertex, path.as_deref()),
            Command::Move { input, mv, coeffs, out: path } => cmd_move(out, input, mv, coeffs, path.as_deref()),
            Command::Classify { input, coeffs } => cmd_classify(out, input, coeffs),
            Command::Equiv { input, qp1, qp2 } => cmd_equiv(out, input, qp1, qp2),
            Command::VerifyMove { input, mv, linear, coeffs } => cmd_verify_move(out, input, mv, *linear, coeffs),
            Command::Fuzz {
                gamma,
                count,
                max_len,
                seed,
                max_exp,
                repro_dir,
            } => {
                let opts = SweepOptions {
                    max_exp: *max_exp,
                    truncation: self.truncation,
                    ..SweepOptions::default()
                };
                cmd_fuzz(out, gamma, *count, *max_len, *seed, &opts, repro_dir)
            }
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match cli.run(out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["braidqp"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn builtin_graphs() {
        assert_eq!(load_gamma("a3").unwrap().len(), 3);
        assert_eq!(load_gamma("cycle3").unwrap().first_betti_number(), 1);
        assert!(load_gamma("cycle2").is_err());
        assert!(load_gamma("b7").is_err());
    }

    #[test]
    fn build_cube_has_six_vertices() {
        let (code, out, _) = run(&["build", "--gamma", "a2", "--word", "1 2 1 2 1 2", "--cyclic"]);
        assert_eq!(code, 0);
        let q = Quiver::from_json(&out).unwrap();
        assert_eq!(q.len(), 6);
    }

    #[test]
    fn classify_on_a_tree() {
        let (code, out, _) = run(&["classify", "--gamma", "a2", "--word", "1 2 1 2 1 2"]);
        assert_eq!(code, 0);
        assert!(out.contains("basis size: 0"));
        assert!(out.contains("invariant: []"));
        assert!(out.contains("all primitive potentials equivalent"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(&["build", "--gamma", "a2"]).0, 1);
        assert_eq!(run(&["frobnicate"]).0, 1);
        assert_eq!(run(&["build", "--gamma", "a2", "--word", "1 7"]).0, 1);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn condition_failures_exit_three() {
        let (code, _, err) = run(&["build", "--gamma", "a2", "--word", "1 1 2 2 2", "--cyclic"]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn config_records_seed_and_outputs() {
        let cli = Cli::try_parse_from([
            "braidqp", "--truncation", "9", "move", "--gamma", "a2", "--word", "1 2 1 2 1 2 1 2", "--move", "aba@1",
            "--seeding", "powers-of-two", "--seed", "4", "--out", "x.json",
        ])
        .unwrap();
        let cfg = cli.config();
        assert_eq!(cfg.truncation, Some(9));
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.seeding, SeedingMode::PowersOfTwo);
        assert_eq!(cfg.outputs, vec![PathBuf::from("x.json")]);
    }
}

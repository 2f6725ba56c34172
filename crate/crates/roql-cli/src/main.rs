//! Batch experiment driver: learner runs, checking-test construction and
//! verification, adversary lower-bound experiments, and class enumeration.
//!
//! Reports are TSV by default (`--json` switches to JSON lines); identical
//! configuration and seed produce byte-identical output. The arity cap can
//! be raised or lowered with the `ROQL_ARITY_CAP` environment variable.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use roql::checking::{
    binomial, build_hypercube_set, checking_test_for, verify_checking_test, CheckingTest,
};
use roql::formula::{canonicalize_b2, glueing, parse_formula, Basis, ReadOnceFormula};
use roql::learner::{
    learn_monotone_si, learn_via_equivalence_traced, reconstruct_b2, CandidateSet,
};
use roql::lowerbound::{
    eq_identifies_kn, run_adversary_experiment, ExhaustiveKWeight, ExperimentResult,
    GreedyElimination, RandomStrategy,
};
use roql::oracle::{OracleSession, QueryCounters, QueryKind};
use roql::truth::{TruthTable, VarSet};
use roql::Error;

#[derive(Parser)]
#[command(name = "roql", about = "query-learning experiments for read-once functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a learner over enumerated or sampled targets and report query
    /// counts and pass/fail against the brute-force oracle.
    Learn(LearnArgs),
    /// Build 2-essentiality checking tests and verify them by enumeration,
    /// or verify a test file against a reference formula.
    Checktest(ChecktestArgs),
    /// Adversary experiments on the hard threshold family.
    Adversary(AdversaryArgs),
    /// Count read-once functions over a basis.
    Enumerate(EnumerateArgs),
    /// Canonicalize a formula and machine-check the canonical-tree shape.
    VerifyCanonical(VerifyCanonicalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LearnMode {
    /// Square-set reconstruction through membership queries.
    Reconstruct,
    /// Subcube-identity-only learner for monotone targets.
    SiOnly,
    /// Candidate elimination through equivalence queries.
    Eq,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long, default_value = "b2")]
    basis: String,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    mode: LearnMode,
    /// Model equivalence queries with membership and subcube identity ones.
    #[arg(long)]
    simulate: bool,
    /// Subcube identity queries on total assignments return the value.
    #[arg(long)]
    generalized_si: bool,
    /// Sample this many targets instead of enumerating all (0 = all).
    #[arg(long, default_value_t = 0)]
    sample: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run a single target given as a formula, print the query trace.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ChecktestArgs {
    #[arg(long, default_value = "b2")]
    basis: String,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    sample: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the checking test of --target to this file.
    #[arg(long)]
    emit: Option<std::path::PathBuf>,
    /// Verify this checking-test file against --target
    /// (exit 0 unique, 1 ambiguous, 2 inconsistent).
    #[arg(long)]
    verify: Option<std::path::PathBuf>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long)]
    n: usize,
    /// Query budget per run; defaults to C(n, n/2) - 1.
    #[arg(long)]
    budget: Option<usize>,
    /// Number of seeded random-strategy runs.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, default_value = "b2")]
    basis: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyCanonicalArgs {
    #[arg(long)]
    formula: String,
    #[arg(long)]
    n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::PromiseViolation(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Learn(args) => cmd_learn(args),
        Command::Checktest(args) => cmd_checktest(args),
        Command::Adversary(args) => cmd_adversary(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::VerifyCanonical(args) => cmd_verify_canonical(args),
    }
}

fn resolve_basis(name: &str) -> Result<Basis, Error> {
    match name {
        "b2" => Ok(Basis::b2()),
        "and-or" => Ok(Basis::and_or()),
        "b3" => Ok(Basis::b_l(3)),
        "threshold" => Err(Error::Precondition(
            "the monotone threshold basis is infinite; use the `adversary` command".into(),
        )),
        path => {
            // basis file: one `<name> <arity> <hex table>` per line
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Precondition(format!("unknown builtin basis and unreadable file: {e}"))
            })?;
            let mut functions = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("bad basis line `{line}`")));
                }
                let arity: usize = parts[1]
                    .parse()
                    .map_err(|_| Error::Parse("bad arity in basis file".into()))?;
                let bits = u64::from_str_radix(parts[2], 16)
                    .map_err(|_| Error::Parse("bad hex table in basis file".into()))?;
                functions.push(roql::formula::BasisFunction::new(
                    parts[0],
                    TruthTable::from_bits_u64(arity, bits)?,
                ));
            }
            Ok(Basis::new(path, functions))
        }
    }
}

fn table_hex(t: &TruthTable) -> String {
    let bits: u64 = (0..1u64 << t.arity()).map(|i| (t.get(i) as u64) << i).sum();
    format!("{bits:#x}")
}

struct Report {
    json: bool,
    header: Vec<&'static str>,
    lines: Vec<String>,
}

impl Report {
    fn new(json: bool, header: Vec<&'static str>) -> Self {
        Report { json, header, lines: Vec::new() }
    }

    fn row(&mut self, values: &[String]) {
        if self.json {
            let obj: serde_json::Map<String, serde_json::Value> = self
                .header
                .iter()
                .zip(values)
                .map(|(k, v)| {
                    let val = v
                        .parse::<i64>()
                        .map(serde_json::Value::from)
                        .unwrap_or_else(|_| serde_json::Value::from(v.clone()));
                    (k.to_string(), val)
                })
                .collect();
            self.lines.push(serde_json::Value::Object(obj).to_string());
        } else {
            self.lines.push(values.join("\t"));
        }
    }

    fn finish(self, out: Option<std::path::PathBuf>) -> Result<(), Error> {
        let mut text = String::new();
        if !self.json {
            let _ = writeln!(text, "{}", self.header.join("\t"));
        }
        for line in &self.lines {
            let _ = writeln!(text, "{line}");
        }
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

fn counter_cells(c: &QueryCounters) -> Vec<String> {
    vec![
        c.membership.to_string(),
        c.si.to_string(),
        c.necessity.to_string(),
        c.possibility.to_string(),
        c.parity.to_string(),
        c.equivalence.to_string(),
        c.total().to_string(),
    ]
}

const COUNTER_HEADER: [&str; 7] =
    ["membership", "si", "necessity", "possibility", "parity", "equivalence", "total"];

fn learn_one(
    mode: LearnMode,
    basis: &Basis,
    n: usize,
    simulate: bool,
    generalized_si: bool,
    target: &TruthTable,
    trace: bool,
) -> Result<(OracleSession, Option<String>, bool), Error> {
    let allowed: &[QueryKind] = match mode {
        LearnMode::Reconstruct => &[QueryKind::Membership],
        LearnMode::SiOnly => &[QueryKind::SubcubeIdentity],
        LearnMode::Eq => &[
            QueryKind::Membership,
            QueryKind::SubcubeIdentity,
            QueryKind::Equivalence,
        ],
    };
    let mut session = OracleSession::with_allowed(target.clone(), allowed)
        .with_basis(basis.clone())
        .with_generalized_si(generalized_si);
    if trace {
        session.enable_log();
    }
    let (result, pass) = match mode {
        LearnMode::Reconstruct => {
            let tree = reconstruct_b2(&mut session, n)?;
            let ok = tree.truth_table(n)? == *target && tree.check_conditions().is_ok();
            (tree.to_string(), ok)
        }
        LearnMode::SiOnly => {
            let tree = learn_monotone_si(&mut session, n)?;
            let ok = tree.truth_table(n)? == *target;
            (tree.to_string(), ok)
        }
        LearnMode::Eq => {
            let (formula, _) = learn_via_equivalence_traced(&mut session, basis, n, simulate)?;
            let ok = formula.truth_table()? == *target;
            (formula.to_string(), ok)
        }
    };
    Ok((session, Some(result), pass))
}

fn cmd_learn(args: LearnArgs) -> Result<ExitCode, Error> {
    let basis = resolve_basis(&args.basis)?;
    let n = args.n;

    if let Some(text) = &args.target {
        let formula = parse_formula(text, n, &basis)?;
        let table = formula.truth_table()?;
        let (session, result, pass) = learn_one(
            args.mode,
            &basis,
            n,
            args.simulate,
            args.generalized_si,
            &table,
            true,
        )?;
        if args.trace {
            for line in session.log() {
                println!("{line}");
            }
        }
        println!("RESULT {}", result.unwrap_or_default());
        println!("counters {}", session.counters().to_json());
        return Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }

    // enumerate targets appropriate for the mode
    let candidates = CandidateSet::enumerate(&basis, n)?;
    let mut targets: Vec<TruthTable> = match args.mode {
        LearnMode::Reconstruct => candidates
            .tables()
            .filter(|t| t.essential_vars() == VarSet::full(n))
            .cloned()
            .collect(),
        LearnMode::SiOnly => candidates
            .tables()
            .filter(|t| t.is_constant().is_none())
            .cloned()
            .collect(),
        LearnMode::Eq => candidates.tables().cloned().collect(),
    };
    if args.sample > 0 && args.sample < targets.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let mut picked = Vec::with_capacity(args.sample);
        for _ in 0..args.sample {
            let at = rand::Rng::gen_range(&mut rng, 0..targets.len());
            picked.push(targets.swap_remove(at));
        }
        picked.sort();
        targets = picked;
    }

    let mut header = vec!["target", "n", "mode", "pass"];
    header.extend(COUNTER_HEADER);
    let mut report = Report::new(args.json, header);
    let mode_name = match args.mode {
        LearnMode::Reconstruct => "reconstruct",
        LearnMode::SiOnly => "si-only",
        LearnMode::Eq => {
            if args.simulate {
                "eq-simulated"
            } else {
                "eq"
            }
        }
    };
    let mut all_pass = true;
    for target in &targets {
        let (session, _, pass) = learn_one(
            args.mode,
            &basis,
            n,
            args.simulate,
            args.generalized_si,
            target,
            false,
        )?;
        all_pass &= pass;
        let mut row = vec![
            table_hex(target),
            n.to_string(),
            mode_name.to_string(),
            pass.to_string(),
        ];
        row.extend(counter_cells(&session.counters()));
        report.row(&row);
    }
    report.finish(args.out)?;
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_checktest(args: ChecktestArgs) -> Result<ExitCode, Error> {
    let basis = resolve_basis(&args.basis)?;

    // verification of a test file against a reference formula
    if let Some(path) = &args.verify {
        let target = args.target.as_ref().ok_or_else(|| {
            Error::Precondition("--verify needs --target <formula>".into())
        })?;
        let (test, _basis_name) = CheckingTest::from_text(&std::fs::read_to_string(path)?)?;
        let n = test.arity();
        let formula = parse_formula(target, n, &basis)?;
        let table = formula.truth_table()?;
        return Ok(match verify_checking_test(&test, &basis, n, &table) {
            Ok(true) => {
                println!("unique");
                ExitCode::SUCCESS
            }
            Ok(false) => {
                println!("ambiguous");
                ExitCode::from(1)
            }
            Err(Error::InconsistentTest) => {
                println!("inconsistent");
                ExitCode::from(2)
            }
            Err(e) => return Err(e),
        });
    }

    // emit a single test file
    if let Some(path) = &args.emit {
        let target = args.target.as_ref().ok_or_else(|| {
            Error::Precondition("--emit needs --target <formula>".into())
        })?;
        if args.n == 0 {
            return Err(Error::Precondition("--emit needs --n".into()));
        }
        let formula = parse_formula(target, args.n, &basis)?;
        let table = formula.truth_table()?;
        if table.essential_vars() != VarSet::full(args.n) {
            return Err(Error::Precondition(
                "checking tests are built for targets with all variables essential".into(),
            ));
        }
        let test = checking_test_for(&table, basis.max_fan_in())?;
        std::fs::write(path, test.to_text(basis.name()))?;
        return Ok(ExitCode::SUCCESS);
    }

    if args.n == 0 {
        return Err(Error::Precondition("--n is required".into()));
    }
    let n = args.n;
    let candidates = CandidateSet::enumerate(&basis, n)?;
    let mut targets: Vec<TruthTable> = candidates
        .tables()
        .filter(|t| t.essential_vars() == VarSet::full(n))
        .cloned()
        .collect();
    if args.sample > 0 && args.sample < targets.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let mut picked = Vec::with_capacity(args.sample);
        for _ in 0..args.sample {
            let at = rand::Rng::gen_range(&mut rng, 0..targets.len());
            picked.push(targets.swap_remove(at));
        }
        picked.sort();
        targets = picked;
    }

    let mut report =
        Report::new(args.json, vec!["target", "n", "size", "bound", "cubes", "unique"]);
    let bound = 4 * binomial(n, 2);
    let mut all_unique = true;
    for target in &targets {
        let set = build_hypercube_set(target, 2);
        let test = set.checking_test(target)?;
        let unique = verify_checking_test(&test, &basis, n, target)?;
        all_unique &= unique && test.len() <= bound;
        report.row(&[
            table_hex(target),
            n.to_string(),
            test.len().to_string(),
            bound.to_string(),
            set.len().to_string(),
            unique.to_string(),
        ]);
    }
    report.finish(args.out)?;
    Ok(if all_unique { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_adversary(args: AdversaryArgs) -> Result<ExitCode, Error> {
    let n = args.n;
    let k = n / 2;
    let cnk = binomial(n, k);
    let budget = args.budget.unwrap_or(cnk.saturating_sub(1));

    let mut report = Report::new(
        args.json,
        vec!["n", "k", "cnk", "strategy", "budget", "survivors", "queries_by_kind"],
    );
    let emit = |res: &ExperimentResult, report: &mut Report| {
        report.row(&[
            res.n.to_string(),
            res.k.to_string(),
            binomial(res.n, res.k).to_string(),
            res.strategy.to_string(),
            res.budget.to_string(),
            res.survivors.to_string(),
            format!("membership={};si={}", res.counters.membership, res.counters.si),
        ]);
    };

    let mut min_survivors = usize::MAX;
    let mut strat = ExhaustiveKWeight::new(n);
    let res = run_adversary_experiment(&mut strat, n, budget)?;
    min_survivors = min_survivors.min(res.survivors);
    emit(&res, &mut report);

    let mut strat = GreedyElimination;
    let res = run_adversary_experiment(&mut strat, n, budget)?;
    min_survivors = min_survivors.min(res.survivors);
    emit(&res, &mut report);

    for run in 0..args.runs {
        let rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(run as u64));
        let mut strat = RandomStrategy::new(rng);
        let res = run_adversary_experiment(&mut strat, n, budget)?;
        min_survivors = min_survivors.min(res.survivors);
        emit(&res, &mut report);
    }

    // one line confirming the single-equivalence-query identification
    let eq_queries = eq_identifies_kn(n)?;
    report.row(&[
        n.to_string(),
        k.to_string(),
        cnk.to_string(),
        "equivalence".to_string(),
        eq_queries.to_string(),
        1.to_string(),
        "equivalence=1".to_string(),
    ]);

    report.finish(args.out)?;
    // under budget C(n,k)-1 the lower bound promises two survivors
    Ok(if budget < cnk && min_survivors < 2 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<ExitCode, Error> {
    let basis = resolve_basis(&args.basis)?;
    let candidates = CandidateSet::enumerate(&basis, args.n)?;
    let count = candidates.len();
    let mut report = Report::new(args.json, vec!["basis", "n", "count", "log2"]);
    report.row(&[
        basis.name().to_string(),
        args.n.to_string(),
        count.to_string(),
        format!("{:.3}", (count as f64).log2()),
    ]);
    report.finish(None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_canonical(args: VerifyCanonicalArgs) -> Result<ExitCode, Error> {
    let basis = Basis::b2();
    let formula: ReadOnceFormula = parse_formula(&args.formula, args.n, &basis)?;
    let tree = canonicalize_b2(&formula)?;
    println!("canonical {tree}");
    if let Err(msg) = tree.check_conditions() {
        println!("conditions FAILED: {msg}");
        return Ok(ExitCode::from(1));
    }
    println!("conditions ok");
    let same = tree.truth_table(args.n)? == formula.truth_table()?;
    println!("function preserved: {same}");
    let again = canonicalize_b2(&tree.to_formula(args.n, &basis)?)?;
    println!("idempotent: {}", again == tree);
    match glueing(&tree) {
        Ok(g) => println!("glueing {g}"),
        Err(_) => println!("glueing none (constant or single literal)"),
    }
    Ok(if same && again == tree { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

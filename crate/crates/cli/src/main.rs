//! Command-line front end: one subcommand per decision procedure, with text
//! and JSON output carrying identical numeric content.
//!
//! Exit codes: 0 success, 1 hypothesis or validation error, 2 internal
//! consistency fault (failed group axiom, decision/brute-force mismatch),
//! 3 overflow.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pqforms::{
    brute_force_pq, class_group, classify_pair_table, classify_prime, criterion_poly_14,
    decide_pq, enumerate_reduced, genus_partition, poly_roots_mod_p, verify_sweep, Discriminant,
    Error, PairDecision, PairTable, Prime, PrimeClassification, QuadForm, SweepReport,
};

#[derive(Parser)]
#[command(name = "pqforms", version, about = "Decide when pq = x^2 + ny^2 is solvable")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced forms of discriminant -4n, genus blocks, class group.
    Forms {
        #[arg(short, long)]
        n: u64,
    },
    /// Classify a prime against the reduced forms of discriminant -4n.
    Prime {
        #[arg(short, long)]
        p: u64,
        #[arg(short, long)]
        n: u64,
    },
    /// Decide whether pq = x^2 + ny^2 has an integer solution.
    Pq {
        #[arg(short, long)]
        p: u64,
        #[arg(short, long)]
        q: u64,
        #[arg(short, long)]
        n: u64,
        /// Also run the brute-force oracle and compare.
        #[arg(long)]
        check: bool,
    },
    /// Sweep decide_pq against brute force over a whole range.
    Verify {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        p_max: u64,
        /// Worker threads for the sweep (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Self-test: flip one decision so the sweep must report a mismatch.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Residue classes of the primes each reduced form represents.
    Table {
        #[arg(short, long)]
        n: u64,
        #[arg(long)]
        bound: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Forms { .. } => "forms",
            Command::Prime { .. } => "prime",
            Command::Pq { .. } => "pq",
            Command::Verify { .. } => "verify",
            Command::Table { .. } => "table",
        }
    }

    fn inputs(&self) -> Value {
        match *self {
            Command::Forms { n } => json!({ "n": n }),
            Command::Prime { p, n } => json!({ "p": p, "n": n }),
            Command::Pq { p, q, n, check } => json!({ "p": p, "q": q, "n": n, "check": check }),
            Command::Verify { n_max, p_max, .. } => json!({ "n_max": n_max, "p_max": p_max }),
            Command::Table { n, bound } => json!({ "n": n, "bound": bound }),
        }
    }
}

/// A finished command: the JSON payload, the text rendering, and the exit
/// code (verify reports mismatches through a nonzero code, not an error).
struct Outcome {
    result: Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(result: Value, text: String) -> Outcome {
        Outcome { result, text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Verify { jobs: Some(k), .. } = cli.command {
        // Ignore failure: the pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match run(&cli.command) {
        Ok(outcome) => {
            match cli.format {
                Format::Text => print!("{}", outcome.text),
                Format::Json => emit_json(&cli.command, Some(outcome.result), None),
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => emit_json(&cli.command, None, Some(&e)),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn emit_json(command: &Command, result: Option<Value>, error: Option<&Error>) {
    let doc = match error {
        None => json!({
            "command": command.name(),
            "inputs": command.inputs(),
            "result": result,
            "status": "ok",
        }),
        Some(e) => json!({
            "command": command.name(),
            "inputs": command.inputs(),
            "result": Value::Null,
            "status": "error",
            "error": e.to_string(),
        }),
    };
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) | Error::NoCoprimeRepresentative(_) => 2,
        Error::Overflow(_) => 3,
        _ => 1,
    }
}

fn run(command: &Command) -> Result<Outcome, Error> {
    match *command {
        Command::Forms { n } => cmd_forms(n),
        Command::Prime { p, n } => cmd_prime(p, n),
        Command::Pq { p, q, n, check } => cmd_pq(p, q, n, check),
        Command::Verify { n_max, p_max, inject_fault, .. } => cmd_verify(n_max, p_max, inject_fault),
        Command::Table { n, bound } => cmd_table(n, bound),
    }
}

fn triple(f: &QuadForm) -> String {
    format!("({}, {}, {})", f.a(), f.b(), f.c())
}

fn residue_set(residues: impl IntoIterator<Item = u64>) -> String {
    let inner: Vec<String> = residues.into_iter().map(|r| r.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

fn cmd_forms(n: u64) -> Result<Outcome, Error> {
    let d = Discriminant::from_n(n)?;
    let forms = enumerate_reduced(d);
    let partition = genus_partition(d);
    let convenient = partition.blocks().iter().all(|b| b.forms.len() == 1);
    let group = class_group(d)?;

    let mut text = String::new();
    let _ = writeln!(text, "n: {n}");
    let _ = writeln!(text, "discriminant: {d}");
    let _ = writeln!(text, "class number h({d}): {}", forms.len());
    let _ = writeln!(text, "reduced forms:");
    for f in &forms {
        let _ = writeln!(text, "  {}  =  {f}", triple(f));
    }
    let _ = writeln!(text, "genus blocks (residues mod {}):", d.unsigned_abs());
    for block in partition.blocks() {
        let forms_str: Vec<String> = block.forms.iter().map(triple).collect();
        let _ = writeln!(
            text,
            "  {}  ->  {}",
            residue_set(block.residues.iter().copied()),
            forms_str.join(", ")
        );
    }
    let _ = writeln!(text, "convenient: {}", if convenient { "yes" } else { "no" });
    let _ = writeln!(text, "class group: {group}");
    let _ = writeln!(text, "composition table:");
    for row in group.table() {
        let cells: Vec<String> = row.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(text, "  {}", cells.join(" "));
    }

    let result = json!({
        "n": n,
        "discriminant": d,
        "h": forms.len(),
        "forms": forms,
        "genus_blocks": partition.blocks(),
        "convenient": convenient,
        "group": {
            "order": group.order(),
            "structure": group.structure(),
            "table": group.table(),
        },
    });
    Ok(Outcome::ok(result, text))
}

fn prime_in_s(p: Prime) -> Result<bool, Error> {
    Ok(!poly_roots_mod_p(&criterion_poly_14(), p)?.is_empty())
}

fn cmd_prime(p: u64, n: u64) -> Result<Outcome, Error> {
    let p = Prime::new(p)?;
    let c: PrimeClassification = classify_prime(p, n)?;
    let in_s = (n == 14).then(|| prime_in_s(p)).transpose()?;

    let mut text = String::new();
    let _ = writeln!(text, "p: {p}");
    let _ = writeln!(text, "n: {n}");
    let _ = writeln!(text, "symbol (-{n}/{p}): {:+}", c.symbol);
    let _ = writeln!(text, "residue mod {}: {}", 4 * n, c.residue);
    if c.forms.is_empty() {
        let _ = writeln!(text, "represented by: none");
    } else {
        let _ = writeln!(text, "represented by:");
        for r in &c.forms {
            let _ = writeln!(
                text,
                "  {}: {} = f({}, {}){}",
                triple(r.form()),
                r.m(),
                r.x(),
                r.y(),
                if r.proper() { ", proper" } else { "" }
            );
        }
    }
    if let Some(in_s) = in_s {
        let _ = writeln!(
            text,
            "in S ((x^2+1)^2 = 8 solvable mod p): {}",
            if in_s { "yes" } else { "no" }
        );
    }

    let mut result = serde_json::to_value(&c).expect("serializable");
    if let Some(in_s) = in_s {
        result["in_s"] = Value::Bool(in_s);
    }
    Ok(Outcome::ok(result, text))
}

fn cmd_pq(p: u64, q: u64, n: u64, check: bool) -> Result<Outcome, Error> {
    let p = Prime::new(p)?;
    let q = Prime::new(q)?;
    let decision: PairDecision = decide_pq(p, q, n)?;
    let pq = p.value() * q.value();

    let mut text = String::new();
    let _ = writeln!(text, "p: {p}, q: {q}, n: {n}");
    let _ = writeln!(text, "pq: {pq}");
    let _ = writeln!(
        text,
        "representable: {}",
        if decision.representable { "yes" } else { "no" }
    );
    if let Some(f) = &decision.common_form {
        let _ = writeln!(text, "common form: {}  =  {f}", triple(f));
    }
    if let Some(w) = &decision.witness {
        let _ = writeln!(text, "witness: {pq} = {}^2 + {n}*{}^2", w.x, w.y);
    }

    let mut result = serde_json::to_value(&decision).expect("serializable");
    if check {
        let oracle = brute_force_pq(p, q, n)?;
        if oracle.is_some() != decision.representable {
            return Err(Error::Consistency(format!(
                "decide_pq and brute_force_pq disagree on ({p}, {q}, {n})"
            )));
        }
        match &oracle {
            Some(w) => {
                let _ = writeln!(
                    text,
                    "brute-force check: agrees ({pq} = {}^2 + {n}*{}^2)",
                    w.x, w.y
                );
            }
            None => {
                let _ = writeln!(text, "brute-force check: agrees (no witness)");
            }
        }
        result["check"] = json!({ "agrees": true, "witness": oracle });
    }
    Ok(Outcome::ok(result, text))
}

fn cmd_verify(n_max: u64, p_max: u64, inject_fault: bool) -> Result<Outcome, Error> {
    let report: SweepReport = verify_sweep(n_max, p_max, inject_fault);

    let mut text = String::new();
    let _ = writeln!(text, "sweep: n <= {n_max}, odd primes p < q <= {p_max}");
    let _ = writeln!(text, "pairs tested: {}", report.pairs_tested);
    let _ = writeln!(text, "representable: {}", report.representable);
    let _ = writeln!(text, "mismatches: {}", report.mismatches.len());
    for m in &report.mismatches {
        let _ = writeln!(
            text,
            "  n = {}, p = {}, q = {}: decided {}, brute force {}",
            m.n, m.p, m.q, m.decided, m.brute_force
        );
    }

    let passed = report.passed();
    let mut result = serde_json::to_value(&report).expect("serializable");
    result["passed"] = Value::Bool(passed);
    Ok(Outcome {
        result,
        text,
        code: if passed { 0 } else { 2 },
    })
}

fn cmd_table(n: u64, bound: u64) -> Result<Outcome, Error> {
    let table: PairTable = classify_pair_table(n, bound)?;

    let mut text = String::new();
    let _ = writeln!(text, "n: {n}, bound: {bound}");
    let _ = writeln!(text, "residues mod {} of represented primes:", table.modulus);
    for row in &table.rows {
        let _ = write!(
            text,
            "  {}: {}",
            triple(&row.form),
            residue_set(row.residues.iter().copied())
        );
        if let (Some(in_s), Some(out_s)) = (row.primes_in_s, row.primes_not_in_s) {
            let _ = write!(text, "  [primes in S: {in_s}, not in S: {out_s}]");
        }
        let _ = writeln!(text);
    }

    let result = serde_json::to_value(&table).expect("serializable");
    Ok(Outcome::ok(result, text))
}

use clap::{Parser, Subcommand, ValueEnum};
use qmut::document::{GramDocument, QuiverDocument};
use qmut::explore::DEFAULT_MAX_NODES;
use qmut::series::{self, Family, StandardForm};
use qmut::{report, tables, ExploreBudget, QmutError, Quiver, Verdict};
use serde_json::json;
use std::io::Read;
use std::process::ExitCode;

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VERTEX: u8 = 3;
const EXIT_INFINITE: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_NO_PATH: u8 = 6;
const EXIT_CHECK_FAILED: u8 = 7;

/// Mutation of quivers with weights 2cos(πm/d).
///
/// Quiver arguments are JSON documents: a file path, `-` for stdin, or
/// `seed:NAME` for a built-in seed (`seed:h3`, `seed:F4^(*,+)`, ...).
///
/// Exit codes: 0 success, 1 I/O or other error, 2 parse error, 3 vertex out of
/// range, 4 infinite class, 5 budget exhausted, 6 no mutation path, 7 check failed.
#[derive(Parser)]
#[command(name = "qmut", version)]
struct Cli {
    /// Worker threads for class exploration (default: available cores).
    #[arg(long, global = true, env = "QMUT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Sizes,
    Classification,
    Series,
    Realizations,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a mutation sequence and print the resulting weights.
    Mutate {
        input: String,
        /// 1-based vertices, comma separated.
        #[arg(long, value_delimiter = ',')]
        seq: Vec<usize>,
        /// Output document (stdout if absent; the weight table then goes to stderr).
        #[arg(long)]
        out: Option<String>,
    },
    /// Enumerate the mutation class up to isomorphism.
    Explore {
        input: String,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        budget: usize,
        /// Also identify a quiver with its opposite.
        #[arg(long)]
        mod_opposite: bool,
        #[arg(long, value_enum, default_value = "json")]
        report: Format,
    },
    /// Decide finiteness of a rank-3 quiver and print its normal form or a witness.
    #[command(name = "classify-rank3")]
    ClassifyRank3 { input: String },
    /// Rank-4 series in standard form.
    Series {
        #[command(subcommand)]
        command: SeriesCommand,
    },
    /// Propagate a geometric realization through the class.
    Realize {
        input: String,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        budget: usize,
        /// Write the Gram matrix of the starting realization here.
        #[arg(long)]
        gram_out: Option<String>,
    },
    /// Run a reproduction table and compare with the published values.
    Tables {
        #[arg(value_enum)]
        which: Table,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        budget: usize,
        /// Largest n for `series` (closure) and `realizations` (series classes).
        #[arg(long)]
        max_n: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Write a Graphviz DOT rendering.
    #[command(name = "export-dot")]
    ExportDot {
        input: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Find a mutation sequence taking the first quiver to one isomorphic to the second.
    Path {
        from: String,
        to: String,
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
    },
}

#[derive(Subcommand)]
enum SeriesCommand {
    /// Print the standard-form quiver of a tuple (default: the family seed).
    Realize {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Apply the parameter map at a vertex.
    Mutate {
        #[command(flatten)]
        form: FormArgs,
        /// 1-based vertex.
        #[arg(long)]
        vertex: usize,
    },
    /// Check closure of the parameter maps (and matrix agreement with --matrix).
    Verify {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        matrix: bool,
    },
    /// List tuples with a vanishing arrow and their case.
    Vanishing {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
    },
}

#[derive(clap::Args)]
struct FormArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: u32,
    /// k,q,m,s
    #[arg(long, value_delimiter = ',', num_args = 4)]
    tuple: Option<Vec<u32>>,
}

impl FormArgs {
    fn form(&self) -> qmut::Result<StandardForm> {
        match &self.tuple {
            Some(t) => StandardForm::new(self.family, self.n, t[0], t[1], t[2], t[3]),
            None => series::seed(self.family, self.n),
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<QmutError> for Failure {
    fn from(e: QmutError) -> Self {
        let code = match e {
            QmutError::Parse(_)
            | QmutError::InvalidLabel { .. }
            | QmutError::IncompatibleAmbient { .. }
            | QmutError::NotSkewSymmetric
            | QmutError::NotGram
            | QmutError::ConditionViolation(_)
            | QmutError::EmptyVertexSet => EXIT_PARSE,
            QmutError::VertexOutOfRange { .. } => EXIT_VERTEX,
            QmutError::NotFinite => EXIT_INFINITE,
            QmutError::BudgetExhausted(_) => EXIT_BUDGET,
            _ => EXIT_OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &str, e: std::io::Error) -> Failure {
    Failure { code: EXIT_OTHER, message: format!("{path}: {e}") }
}

type Outcome = Result<u8, Failure>;

fn read_document(input: &str) -> Result<QuiverDocument, Failure> {
    if let Some(name) = input.strip_prefix("seed:") {
        return tables::lookup(name)
            .map(|e| e.document())
            .ok_or_else(|| Failure { code: EXIT_PARSE, message: format!("unknown built-in seed {name:?}") });
    }
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| io_failure(input, e))?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| io_failure(input, e))?
    };
    Ok(QuiverDocument::from_json(&text)?)
}

fn read_quiver(input: &str) -> Result<Quiver, Failure> {
    Ok(read_document(input)?.to_quiver()?)
}

fn write_output(out: Option<&str>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn to_zero_based(seq: &[usize], rank: usize) -> Result<Vec<usize>, Failure> {
    seq.iter().map(|&v| if v == 0 || v > rank { Err(QmutError::VertexOutOfRange { vertex: v, rank }.into()) } else { Ok(v - 1) }).collect()
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Finite => 0,
        Verdict::Infinite => EXIT_INFINITE,
        Verdict::BudgetExhausted => EXIT_BUDGET,
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Mutate { input, seq, out } => {
            let doc = read_document(&input)?;
            let q = doc.to_quiver()?;
            let seq = to_zero_based(&seq, q.rank())?;
            let m = q.mutate_seq(&seq)?;
            let mut res = QuiverDocument::from_quiver(&m);
            res.name = doc.name;
            write_output(out.as_deref(), &res.to_json())?;
            if out.is_some() {
                print!("{}", report::label_table(&m));
            } else {
                eprint!("{}", report::label_table(&m));
            }
            Ok(0)
        }
        Command::Explore { input, budget, mod_opposite, report: format } => {
            let q = read_quiver(&input)?;
            let r = qmut::explore(&q, &ExploreBudget::with_max_nodes(budget.max(1)), mod_opposite)?;
            match format {
                Format::Json => print_json(&report::class_report_value(&r)),
                Format::Text => print!("{}", report::class_report_text(&r)),
            }
            Ok(verdict_code(r.verdict))
        }
        Command::ClassifyRank3 { input } => {
            let c = qmut::classify_rank3(&read_quiver(&input)?)?;
            print_json(&report::rank3_value(&c));
            Ok(if c.is_finite() { 0 } else { EXIT_INFINITE })
        }
        Command::Series { command } => run_series(command),
        Command::Realize { input, budget, gram_out } => {
            let q = read_quiver(&input)?;
            let r = qmut::verify_class_realization(&q, &ExploreBudget::with_max_nodes(budget.max(1)))?;
            let gram = qmut::initial_realization(&r.start)?;
            if let Some(path) = gram_out {
                let doc = GramDocument::from_realization(&gram, r.start.ambient());
                std::fs::write(&path, doc.to_json()).map_err(|e| io_failure(&path, e))?;
            }
            print_json(&report::realization_value(&r, &gram));
            Ok(if r.exhausted {
                EXIT_BUDGET
            } else if r.holds() {
                0
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Tables { which, budget, max_n, json } => run_tables(which, &ExploreBudget::with_max_nodes(budget.max(1)), max_n, json),
        Command::ExportDot { input, out } => {
            let doc = read_document(&input)?;
            let q = doc.to_quiver()?;
            write_output(out.as_deref(), &qmut::dot::to_dot(&q, doc.name.as_deref().unwrap_or("")))?;
            Ok(0)
        }
        Command::Path { from, to, max_depth } => {
            let (a, b) = (read_quiver(&from)?, read_quiver(&to)?);
            let p = qmut::find_mutation_path(&a, &b, max_depth)?;
            let path = p.as_ref().map(|p| p.iter().map(|v| v + 1).collect::<Vec<_>>());
            print_json(&json!({"schema_version": qmut::document::SCHEMA_VERSION, "found": path.is_some(), "path": path}));
            Ok(if p.is_some() { 0 } else { EXIT_NO_PATH })
        }
    }
}

fn run_series(command: SeriesCommand) -> Outcome {
    match command {
        SeriesCommand::Realize { form, out } => {
            let sf = form.form()?;
            let mut doc = QuiverDocument::from_quiver(&series::realize_standard_form(&sf)?);
            doc.name = Some(sf.to_string());
            write_output(out.as_deref(), &doc.to_json())?;
            Ok(0)
        }
        SeriesCommand::Mutate { form, vertex } => {
            let sf = form.form()?;
            let v = to_zero_based(&[vertex], 4)?[0];
            let image = series::param_mutation(&sf, v)?;
            print_json(&json!({
                "schema_version": qmut::document::SCHEMA_VERSION,
                "input": report::standard_form_value(&sf),
                "vertex": vertex,
                "output": report::standard_form_value(&image),
                "valid": image.is_valid(),
            }));
            Ok(if image.is_valid() { 0 } else { EXIT_CHECK_FAILED })
        }
        SeriesCommand::Verify { family, n, matrix } => {
            let r = series::verify_closure(family, n, matrix)?;
            print_json(&report::closure_value(&r));
            Ok(if r.holds() { 0 } else { EXIT_CHECK_FAILED })
        }
        SeriesCommand::Vanishing { family, n } => {
            let entries = series::vanishing_arrow_catalogue(family, n)?;
            let rows: Vec<_> = entries
                .iter()
                .map(|sf| {
                    let mut v = report::standard_form_value(sf);
                    v["case"] = json!(series::vanishing_case(sf).map(|c| format!("{c:?}")));
                    v
                })
                .collect();
            print_json(&json!({"schema_version": qmut::document::SCHEMA_VERSION, "family": family.as_str(), "n": n, "entries": rows}));
            Ok(0)
        }
    }
}

fn run_tables(which: Table, budget: &ExploreBudget, max_n: Option<u32>, as_json: bool) -> Outcome {
    let (rows, all_pass): (Vec<serde_json::Value>, bool) = match which {
        Table::Sizes => {
            let rows = tables::size_rows(budget)?;
            let pass = rows.iter().all(tables::SizeRow::pass);
            if !as_json {
                println!("{:<10} {:>8} {:>8}  status", "class", "expected", "computed");
                for r in &rows {
                    println!("{:<10} {:>8} {:>8}  {}", r.entry.name, r.entry.size, r.computed, status(r.pass()));
                }
            }
            let v = rows
                .iter()
                .map(|r| json!({"class": r.entry.name, "expected": r.entry.size, "computed": r.computed, "verdict": r.verdict.as_str(), "pass": r.pass()}))
                .collect();
            (v, pass)
        }
        Table::Classification => {
            let mut v = Vec::new();
            let mut pass = true;
            let runs = [
                ("denominator 5", tables::denominator5_base(true), tables::denominator5_alphabet(), vec![8, 2, 1, 0]),
                ("F4", vec![tables::CLASSES[8].quiver()], tables::f_alphabet(), vec![1, 2, 0]),
            ];
            if !as_json {
                println!("{:<14} {:>4} {:>8} {:>8}  status", "base", "rank", "expected", "computed");
            }
            for (name, base, alphabet, expected) in runs {
                let start = base[0].rank() + 1;
                let levels = tables::extension_levels(&base, &alphabet, start + expected.len() - 1, budget)?;
                for (t, want) in expected.iter().enumerate() {
                    let got = levels.get(t).map_or(0, |l| l.classes.len());
                    let unresolved = levels.get(t).map_or(0, |l| l.unresolved);
                    let ok = got == *want && unresolved == 0;
                    pass &= ok;
                    if !as_json {
                        println!("{:<14} {:>4} {:>8} {:>8}  {}", name, start + t, want, got, status(ok));
                    }
                    v.push(
                        json!({"base": name, "rank": start + t, "expected": want, "computed": got, "unresolved": unresolved, "pass": ok}),
                    );
                }
            }
            (v, pass)
        }
        Table::Series => {
            let rows = tables::series_rows(max_n.unwrap_or(40), 12)?;
            let pass = rows.iter().all(|r| r.holds());
            if !as_json {
                println!("{:<7} {:>3} {:>7} {:>8} {:>10}  status", "family", "n", "tuples", "invalid", "mismatches");
                for r in &rows {
                    let mism = if r.matrix_checked { r.mismatches.len().to_string() } else { "-".into() };
                    println!(
                        "{:<7} {:>3} {:>7} {:>8} {:>10}  {}",
                        r.family.as_str(),
                        r.n,
                        r.tuples,
                        r.invalid_images.len(),
                        mism,
                        status(r.holds())
                    );
                }
            }
            (rows.iter().map(report::closure_value).collect(), pass)
        }
        Table::Realizations => {
            let rows = tables::realization_rows(max_n.unwrap_or(8), budget)?;
            let pass = rows.iter().all(tables::RealizationRow::pass);
            if !as_json {
                println!("{:<12} {:>6} {:>6} {:>8} {:>10}  status", "class", "size", "pairs", "corank", "violations");
                for r in &rows {
                    let corank = format!("{}/{}", r.report.corank, r.expected_corank);
                    println!(
                        "{:<12} {:>6} {:>6} {:>8} {:>10}  {}",
                        r.name,
                        r.report.class_size,
                        r.report.pairs,
                        corank,
                        r.report.violations.len(),
                        status(r.pass())
                    );
                }
            }
            let v = rows
                .iter()
                .map(|r| {
                    json!({
                        "class": r.name,
                        "size": r.report.class_size,
                        "pairs": r.report.pairs,
                        "corank": r.report.corank,
                        "expected_corank": r.expected_corank,
                        "corank_constant": r.report.corank_constant,
                        "violations": r.report.violations.len(),
                        "pass": r.pass(),
                    })
                })
                .collect();
            (v, pass)
        }
    };
    if as_json {
        print_json(&json!({"schema_version": qmut::document::SCHEMA_VERSION, "rows": rows, "pass": all_pass}));
    }
    Ok(if all_pass { 0 } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("qmut: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qmut: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! Thin command-line adapter over the `toric` library: fan inspection,
//! cohomology tables, theorem verification, corpus management. All
//! mathematics lives in the library; this file only parses flags, moves
//! JSON, and maps errors to exit codes.
//!
//! Exit codes: 0 verified/success, 1 falsified, 2 usage or input error,
//! 3 internal anomaly.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use toric::cohomology::{cohomology_table, CohomologyError, SheafSpec};
use toric::divisors::{QWeilDivisor, ReducedBoundary};
use toric::exactlin::FieldSel;
use toric::fans::Fan;
use toric::verify::{
    check, generate_corpus, regression_blowup_example, Corpus, Instance, TheoremId, VerdictReport,
    VerifyError,
};

const EXIT_FALSIFIED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_ANOMALY: u8 = 3;

#[derive(Parser)]
#[command(name = "toric", version, about = "Exact toric sheaf cohomology and vanishing checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect fan files.
    Fan {
        #[command(subcommand)]
        sub: FanCmd,
    },
    /// Compute cohomology tables.
    Cohomology {
        #[command(subcommand)]
        sub: CohCmd,
    },
    /// Check theorem statements on instances.
    Verify {
        #[command(subcommand)]
        sub: VerifyCmd,
    },
    /// Generate instance corpora.
    Corpus {
        #[command(subcommand)]
        sub: CorpusCmd,
    },
}

#[derive(Subcommand)]
enum FanCmd {
    /// Validate a fan file; report violations and completeness.
    Check {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Print rank, rays, cones, and structural predicates.
    Describe {
        #[arg(long)]
        fan: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFmt {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum CohCmd {
    /// Cohomology table of a sheaf on a complete fan.
    Compute {
        #[arg(long)]
        fan: PathBuf,
        /// Sheaf spec as inline JSON, or @file.
        #[arg(long)]
        sheaf: String,
        /// Q or a prime field label like F2.
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFmt,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run one theorem (or `all`) over an instance file or a corpus.
    Theorem {
        /// Theorem label (see `--id help`) or `all`.
        id: String,
        /// JSON file with one instance, or a corpus in JSON-lines form.
        #[arg(long, conflicts_with = "corpus")]
        instance: Option<PathBuf>,
        /// Generate the corpus on the fly: `seed,size`.
        #[arg(long)]
        corpus: Option<String>,
        /// Field labels; repeat the flag for several.
        #[arg(long, default_values_t = [String::from("Q")])]
        field: Vec<String>,
        /// Worker threads; output is independent of this.
        #[arg(long, env = "TORIC_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        #[arg(long, default_value_t = 2)]
        max_subdivisions: usize,
    },
    /// The blow-up-of-the-plane counterexample report.
    Regression,
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Deterministically generate a corpus as JSON lines.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        #[arg(long, default_value_t = 2)]
        max_subdivisions: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit)
        }
    }
}

struct CliError {
    exit: u8,
    msg: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.msg)
    }
}

fn input_err(msg: impl Into<String>) -> CliError {
    CliError { exit: EXIT_INPUT, msg: msg.into() }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn parse_fan(path: &PathBuf) -> Result<Fan, CliError> {
    let fan: Fan =
        serde_json::from_str(&read_file(path)?).map_err(|e| input_err(format!("bad fan: {e}")))?;
    let violations = fan.validate();
    if !violations.is_empty() {
        return Err(input_err(format!("invalid fan: {}", violations[0])));
    }
    Ok(fan)
}

/// External JSON form of a sheaf spec.
#[derive(serde::Deserialize)]
#[serde(rename_all = "snake_case")]
enum SheafJson {
    ReflexiveDiv(QWeilDivisor),
    LogForms {
        a: usize,
        #[serde(rename = "B")]
        b: Vec<usize>,
        #[serde(rename = "G")]
        g: QWeilDivisor,
    },
}

fn parse_sheaf(arg: &str) -> Result<SheafSpec, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_file(&PathBuf::from(path))?,
        None => arg.to_string(),
    };
    let j: SheafJson =
        serde_json::from_str(&text).map_err(|e| input_err(format!("bad sheaf spec: {e}")))?;
    Ok(match j {
        SheafJson::ReflexiveDiv(d) => SheafSpec::reflexive(d),
        SheafJson::LogForms { a, b, g } => SheafSpec::log_forms(a, ReducedBoundary::new(b), g),
    })
}

fn parse_field(s: &str) -> Result<FieldSel, CliError> {
    FieldSel::parse(s).map_err(|e| input_err(e.to_string()))
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| input_err(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| input_err(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Fan { sub } => run_fan(sub),
        Cmd::Cohomology { sub } => run_cohomology(sub),
        Cmd::Verify { sub } => run_verify(sub),
        Cmd::Corpus { sub } => run_corpus(sub),
    }
}

fn run_fan(sub: FanCmd) -> Result<ExitCode, CliError> {
    match sub {
        FanCmd::Check { fan } => {
            let fan: Fan = serde_json::from_str(&read_file(&fan)?)
                .map_err(|e| input_err(format!("bad fan: {e}")))?;
            let violations: Vec<String> =
                fan.validate().iter().map(|v| v.to_string()).collect();
            let ok = violations.is_empty();
            let report = serde_json::json!({
                "violations": violations,
                "complete": ok && fan.is_complete(),
            });
            emit(None, &format!("{report}\n"))?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FALSIFIED) })
        }
        FanCmd::Describe { fan } => {
            let fan = parse_fan(&fan)?;
            let report = serde_json::json!({
                "rank": fan.rank,
                "n_rays": fan.rays.len(),
                "n_max_cones": fan.max_cones.len(),
                "predicates": fan.predicates(),
            });
            emit(None, &format!("{report}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_cohomology(sub: CohCmd) -> Result<ExitCode, CliError> {
    let CohCmd::Compute { fan, sheaf, field, out, output } = sub;
    let fan = parse_fan(&fan)?;
    let spec = parse_sheaf(&sheaf)?;
    let field = parse_field(&field)?;
    let table = cohomology_table(&fan, &spec, field).map_err(|e| match e {
        CohomologyError::IncompleteFan => input_err("fan is not complete"),
        CohomologyError::EnumerationAnomaly(msg) => {
            CliError { exit: EXIT_ANOMALY, msg: format!("enumeration anomaly: {msg}") }
        }
        other => input_err(other.to_string()),
    })?;
    let text = match out {
        OutFmt::Json => format!("{}\n", table.to_json()),
        OutFmt::Csv => {
            let mut s = String::from("i,h\n");
            for (i, h) in table.h.iter().enumerate() {
                s.push_str(&format!("{i},{h}\n"));
            }
            s
        }
    };
    emit(output.as_ref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

/// Outcome of one (instance, theorem, field) cell.
enum Cell {
    Report(VerdictReport),
    HypothesisFailure(String),
    Anomaly(String),
    Error(String),
}

fn run_verify(sub: VerifyCmd) -> Result<ExitCode, CliError> {
    match sub {
        VerifyCmd::Regression => {
            let rep = regression_blowup_example();
            emit(None, &format!("{}\n", rep.to_json()))?;
            Ok(if rep.holds { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FALSIFIED) })
        }
        VerifyCmd::Theorem {
            id,
            instance,
            corpus,
            field,
            jobs,
            max_rank,
            max_subdivisions,
        } => {
            let theorems: Vec<TheoremId> = if id == "all" {
                TheoremId::ALL.to_vec()
            } else {
                vec![TheoremId::parse(&id)
                    .ok_or_else(|| input_err(format!("unknown theorem {id:?}")))?]
            };
            let fields = field
                .iter()
                .map(|f| parse_field(f))
                .collect::<Result<Vec<_>, _>>()?;
            let instances = load_instances(instance.as_ref(), corpus.as_deref(), max_rank,
                max_subdivisions)?;
            let mut cells: Vec<(usize, TheoremId, FieldSel)> = Vec::new();
            for i in 0..instances.len() {
                for &t in &theorems {
                    for &f in &fields {
                        cells.push((i, t, f));
                    }
                }
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| input_err(e.to_string()))?;
            // rayon's ordered collect makes the report stream independent
            // of the thread count
            let results: Vec<Cell> = pool.install(|| {
                use rayon::prelude::*;
                cells
                    .par_iter()
                    .map(|&(i, t, f)| match check(t, &instances[i], f) {
                        Ok(rep) => Cell::Report(rep),
                        Err(VerifyError::HypothesisFailure(msg)) => Cell::HypothesisFailure(msg),
                        Err(VerifyError::Cohomology(CohomologyError::EnumerationAnomaly(m))) => {
                            Cell::Anomaly(m)
                        }
                        Err(e) => Cell::Error(e.to_string()),
                    })
                    .collect()
            });
            let mut holds = 0usize;
            let mut failed = 0usize;
            let mut skipped = 0usize;
            let mut lines = String::new();
            for ((i, t, f), cell) in cells.iter().zip(&results) {
                match cell {
                    Cell::Report(rep) => {
                        if rep.holds {
                            holds += 1;
                        } else {
                            failed += 1;
                        }
                        lines.push_str(&format!("{}\n", rep.to_json()));
                    }
                    Cell::HypothesisFailure(msg) => {
                        skipped += 1;
                        let rec = serde_json::json!({
                            "theorem": t.label(),
                            "digest": instances[*i].digest(),
                            "field": f.label(),
                            "hypothesis_failure": msg,
                        });
                        lines.push_str(&format!("{rec}\n"));
                    }
                    Cell::Anomaly(msg) => {
                        return Err(CliError {
                            exit: EXIT_ANOMALY,
                            msg: format!("enumeration anomaly: {msg}"),
                        })
                    }
                    Cell::Error(msg) => return Err(input_err(msg.clone())),
                }
            }
            let summary = serde_json::json!({
                "checked": cells.len(),
                "holds": holds,
                "falsified": failed,
                "hypothesis_failures": skipped,
            });
            lines.push_str(&format!("{summary}\n"));
            emit(None, &lines)?;
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FALSIFIED) })
        }
    }
}

fn load_instances(
    instance: Option<&PathBuf>,
    corpus: Option<&str>,
    max_rank: usize,
    max_subdivisions: usize,
) -> Result<Vec<Instance>, CliError> {
    match (instance, corpus) {
        (Some(path), None) => {
            let text = read_file(path)?;
            // a single instance object, or a corpus in JSON-lines form
            if let Ok(inst) = serde_json::from_str::<Instance>(&text) {
                return Ok(vec![inst]);
            }
            let corpus = Corpus::from_json_lines(&text)
                .map_err(|e| input_err(format!("bad instance file: {e}")))?;
            Ok(corpus.instances)
        }
        (None, Some(spec)) => {
            let (seed, size) = spec
                .split_once(',')
                .and_then(|(s, n)| Some((s.trim().parse().ok()?, n.trim().parse().ok()?)))
                .ok_or_else(|| input_err("--corpus expects seed,size"))?;
            Ok(generate_corpus(seed, size, max_rank, max_subdivisions).instances)
        }
        _ => Err(input_err("exactly one of --instance or --corpus is required")),
    }
}

fn run_corpus(sub: CorpusCmd) -> Result<ExitCode, CliError> {
    let CorpusCmd::Generate { seed, size, max_rank, max_subdivisions, output } = sub;
    if !(1..=3).contains(&max_rank) {
        return Err(input_err("--max-rank must be 1..=3"));
    }
    let corpus = generate_corpus(seed, size, max_rank, max_subdivisions);
    emit(output.as_ref(), &corpus.to_json_lines())?;
    Ok(ExitCode::SUCCESS)
}

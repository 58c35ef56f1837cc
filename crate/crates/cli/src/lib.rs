//! `rbem` command implementations. `main` only parses arguments and maps
//! the returned [`ExitCode`]; everything here writes to caller-supplied
//! streams so the commands can be driven from tests.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rbem_core::dataset::{load_affect, load_twitter, SplitConfig};
use rbem_core::error::{DatasetError, ModelError};
use rbem_core::eval::{
    eval_run, parse_predictions, render_report, Average, DatasetKind, EvalConfig, ReportFormat,
};
use rbem_core::model_file::{parse_model, ParsedModel};
use rbem_core::{
    tokenize, Analysis, Axis, CompiledModel, Decay, Engine, EngineConfig, Explanation, MaxScope,
    PatternMatch,
};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    /// Evaluation failed for a reason other than bad input files.
    Failure = 1,
    ModelError = 2,
    InputError = 3,
    DatasetError = 4,
    Usage = 64,
}

#[derive(Debug, Parser)]
#[command(name = "rbem", version, about = "Rule-based emotion classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify messages, one output line per message.
    Classify(ClassifyArgs),
    /// Show matches, stops and every rule step for one message.
    Explain(ExplainArgs),
    /// Run the evaluation protocol on a labelled corpus.
    Eval(EvalArgs),
    /// Check a model file and summarize its groups.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Pattern model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Scope of the maximal-match filter.
    #[arg(long, value_enum, default_value_t = ScopeArg::Group)]
    pub max_matches: ScopeArg,
    /// Decay used for emotion emissions.
    #[arg(long, value_enum, default_value_t = DecayArg::Distance)]
    pub decay: DecayArg,
    /// Whether continuator patterns carry emissions forward.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub continuators: Switch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Group,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecayArg {
    Distance,
    AbsoluteIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetArg {
    Affect,
    Twitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AverageArg {
    Micro,
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Tsv,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// A single message.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub text: Option<String>,
    /// File with one message per line (`-` for stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub text: String,
    /// Print the full explanation as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum)]
    pub dataset: DatasetArg,
    /// Corpus TSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Keep neutral examples (default).
    #[arg(long, overrides_with = "no_neutral")]
    pub with_neutral: bool,
    /// Drop neutral examples before splitting.
    #[arg(long)]
    pub no_neutral: bool,
    #[arg(long, default_value_t = SplitConfig::default().seed)]
    pub seed: u64,
    /// Fraction of each slice used for training.
    #[arg(long, default_value_t = SplitConfig::default().train_fraction)]
    pub split_fraction: f64,
    /// `id<TAB>label` predictions from another classifier.
    #[arg(long)]
    pub external_preds: Option<PathBuf>,
    /// How the pooled Twitter row combines languages.
    #[arg(long, value_enum, default_value_t = AverageArg::Micro)]
    pub average: AverageArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub model: PathBuf,
}

impl EngineArgs {
    pub fn config(&self) -> EngineConfig {
        EngineConfig {
            decay: match self.decay {
                DecayArg::Distance => Decay::Distance,
                DecayArg::AbsoluteIndex => Decay::AbsoluteIndex,
            },
            max_scope: match self.max_matches {
                ScopeArg::Group => MaxScope::Group,
                ScopeArg::Global => MaxScope::Global,
            },
            continuators: self.continuators == Switch::On,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() {
                ExitCode::Usage
            } else {
                ExitCode::Ok
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            code
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode {
    let result = match cli.command {
        Command::Classify(a) => classify(&a, out, err),
        Command::Explain(a) => explain(&a, out, err),
        Command::Eval(a) => eval(&a, out, err),
        Command::Validate(a) => validate(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::Ok,
        Err(e) => {
            let _ = writeln!(err, "rbem: cannot write output: {e}");
            ExitCode::Failure
        }
    }
}

type CmdResult = io::Result<ExitCode>;

fn report_model_error(path: &Path, e: &ModelError, err: &mut dyn Write) -> io::Result<()> {
    match e {
        ModelError::Invalid(lines) => {
            for l in lines {
                writeln!(err, "{}: {l}", path.display())?;
            }
            Ok(())
        }
        ModelError::Io(_) => writeln!(err, "{}: {e}", path.display()),
    }
}

fn load_model(path: &Path, err: &mut dyn Write) -> io::Result<Option<ParsedModel>> {
    match parse_model(path) {
        Ok(m) => {
            for w in &m.warnings {
                writeln!(err, "{}: warning: {w}", path.display())?;
            }
            Ok(Some(m))
        }
        Err(e) => {
            report_model_error(path, &e, err)?;
            Ok(None)
        }
    }
}

fn build_engine(args: &EngineArgs, err: &mut dyn Write) -> io::Result<Option<Engine>> {
    let Some(parsed) = load_model(&args.model, err)? else {
        return Ok(None);
    };
    match CompiledModel::compile(parsed.patterns) {
        Ok(model) => Ok(Some(Engine::new(model, args.config()))),
        Err(e) => {
            writeln!(err, "{}: {e}", args.model.display())?;
            Ok(None)
        }
    }
}

/// Formats a score, folding `-0` into `0`.
pub fn fmt_score(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        v.to_string()
    }
}

pub fn analysis_line(a: &Analysis) -> String {
    let mut line = a.label.name().to_string();
    for axis in Axis::ALL {
        line.push('\t');
        line.push_str(&fmt_score(a.scores.get(axis)));
    }
    line
}

fn read_messages(path: &Path) -> io::Result<Vec<String>> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = fs::read_to_string(path)?;
    }
    Ok(text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect())
}

fn classify(args: &ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Some(engine) = build_engine(&args.engine, err)? else {
        return Ok(ExitCode::ModelError);
    };
    let messages = match (&args.text, &args.input) {
        (Some(t), _) => vec![t.clone()],
        (None, Some(path)) => match read_messages(path) {
            Ok(m) => m,
            Err(e) => {
                writeln!(err, "{}: {e}", path.display())?;
                return Ok(ExitCode::InputError);
            }
        },
        (None, None) => unreachable!("clap requires --text or --input"),
    };
    let tokens: Vec<_> = messages.iter().map(|m| tokenize(m)).collect();
    for a in engine.analyze_batch(&tokens) {
        writeln!(out, "{}", analysis_line(&a))?;
    }
    Ok(ExitCode::Ok)
}

fn span_text(ex: &Explanation, m: &PatternMatch) -> String {
    ex.tokens[m.start..=m.end]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

const AXIS_SHORT: [&str; 4] = ["js", "td", "fa", "sa"];

pub fn render_explanation(ex: &Explanation) -> String {
    let mut s = String::new();
    let tokens: Vec<String> = ex
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{i}:{}/{}", t.surface, t.tag))
        .collect();
    let _ = writeln!(s, "tokens: {}", tokens.join(" "));
    if ex.matches.is_empty() {
        let _ = writeln!(s, "no matches");
    }
    for m in &ex.matches {
        let _ = writeln!(
            s,
            "match: {} [{}, {}] \"{}\" (pattern {})",
            m.group,
            m.start,
            m.end,
            span_text(ex, m),
            m.pattern_id
        );
    }
    if !ex.stops.as_slice().is_empty() {
        let stops: Vec<String> = ex.stops.as_slice().iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "stops: {}", stops.join(" "));
    }
    for (k, step) in ex.trace.steps.iter().enumerate() {
        let m = &step.matched;
        let group = m.group.to_string();
        let what = if step.rule == group {
            group
        } else {
            format!("{} {group}", step.rule)
        };
        let _ = writeln!(
            s,
            "step {}: {what} [{}, {}], {} change(s)",
            k + 1,
            m.start,
            m.end,
            step.affected.len()
        );
        for c in &step.affected {
            let _ = writeln!(
                s,
                "  {}[{}] {} -> {}",
                AXIS_SHORT[c.axis.slot()],
                c.token,
                fmt_score(c.old),
                fmt_score(c.new)
            );
        }
    }
    let scores: Vec<String> = Axis::ALL
        .iter()
        .map(|a| format!("{}={}", AXIS_SHORT[a.slot()], fmt_score(ex.scores.get(*a))))
        .collect();
    let _ = writeln!(s, "scores: {}", scores.join(" "));
    let _ = writeln!(s, "label: {}", ex.label.name());
    s
}

fn explain(args: &ExplainArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Some(engine) = build_engine(&args.engine, err)? else {
        return Ok(ExitCode::ModelError);
    };
    let ex = engine.explain(&tokenize(&args.text));
    if args.json {
        let json = serde_json::to_string_pretty(&ex).map_err(io::Error::other)?;
        writeln!(out, "{json}")?;
    } else {
        write!(out, "{}", render_explanation(&ex))?;
    }
    Ok(ExitCode::Ok)
}

fn eval(args: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Some(engine) = build_engine(&args.engine, err)? else {
        return Ok(ExitCode::ModelError);
    };
    if !(args.split_fraction > 0.0 && args.split_fraction < 1.0) {
        writeln!(err, "--split-fraction must lie strictly between 0 and 1")?;
        return Ok(ExitCode::Usage);
    }
    let (kind, loaded) = match args.dataset {
        DatasetArg::Affect => (DatasetKind::Affect, load_affect(&args.data)),
        DatasetArg::Twitter => (DatasetKind::Twitter, load_twitter(&args.data)),
    };
    let examples = match loaded {
        Ok(e) => e,
        Err(e) => {
            writeln!(err, "{}: {e}", args.data.display())?;
            return Ok(match e {
                DatasetError::Io(_) => ExitCode::InputError,
                _ => ExitCode::DatasetError,
            });
        }
    };
    let external = match &args.external_preds {
        None => None,
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    writeln!(err, "{}: {e}", path.display())?;
                    return Ok(ExitCode::InputError);
                }
            };
            match parse_predictions(&text) {
                Ok(p) => Some(p),
                Err(e) => {
                    writeln!(err, "{}: {e}", path.display())?;
                    return Ok(ExitCode::DatasetError);
                }
            }
        }
    };
    let config = EvalConfig {
        split: SplitConfig {
            train_fraction: args.split_fraction,
            seed: args.seed,
            include_neutral: !args.no_neutral,
        },
        average: match args.average {
            AverageArg::Micro => Average::Micro,
            AverageArg::Macro => Average::Macro,
        },
        external,
    };
    let report = match eval_run(&engine, kind, examples, &config) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "rbem: {e}")?;
            return Ok(ExitCode::Failure);
        }
    };
    let format = match args.format {
        FormatArg::Text => ReportFormat::Text,
        FormatArg::Tsv => ReportFormat::Tsv,
    };
    // the text report carries its warnings inline
    if format == ReportFormat::Tsv {
        for w in &report.warnings {
            writeln!(err, "warning: {w}")?;
        }
    }
    write!(out, "{}", render_report(&report, format))?;
    Ok(ExitCode::Ok)
}

pub fn summary(model: &ParsedModel) -> String {
    let n = model.patterns.len();
    let mut s = format!("{n} pattern{}", if n == 1 { "" } else { "s" });
    let counts: Vec<String> = model
        .group_counts()
        .iter()
        .map(|(g, c)| format!("{g} {c}"))
        .collect();
    if !counts.is_empty() {
        s.push_str(": ");
        s.push_str(&counts.join(", "));
    }
    s
}

fn validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match load_model(&args.model, err)? {
        Some(m) => {
            writeln!(out, "{}", summary(&m))?;
            Ok(ExitCode::Ok)
        }
        None => Ok(ExitCode::ModelError),
    }
}

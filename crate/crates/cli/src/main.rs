//! `subrule`: batch analysis of finite subdivision rules.

mod input;
mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subrule::classifier::{Assumptions, Geometry};
use subrule::corpus::{corpus, manifests, CORPUS_NAMES};
use subrule::growth::growth_report;
use subrule::history::{HistoryGraph, HorizontalEdges};
use subrule::hyperbolicity::{estimate_delta, search_constants, DEFAULT_DELTA_SAMPLES, DEFAULT_EXHAUSTIVE_BOUND};
use subrule::pipeline::{analyze_levels, compute_levels, PipelineError, RunConfig};
use subrule::rulefile::{serialize_complex, serialize_rule};
use subrule::subdivision::{transition_matrix, Levels};
use subrule::topology::{component_tree, ends_classification};

use input::Input;

const EXIT_INVALID: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(name = "subrule", version, about = "Analyze finite subdivision rules and their history graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a rule (and complex) for structural errors.
    Validate(Common),
    /// Subdivide repeatedly and report cell counts per level.
    Subdivide(Common),
    /// Export the history graph.
    Graph(Common),
    /// Run one analyzer.
    Analyze {
        #[arg(value_enum)]
        analysis: Analysis,
        #[command(flatten)]
        common: Common,
    },
    /// Run every analyzer and print the geometry verdict.
    Classify(Common),
    /// The builtin example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Growth,
    Ends,
    Hyperbolicity,
    Delta,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List corpus entries with their expected verdicts.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write `<name>.rule.json` and `<name>.complex.json` for entries (all by default).
    Export {
        #[arg(long)]
        out: PathBuf,
        names: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct Common {
    /// Corpus entry name or path to a rule file.
    #[arg(long)]
    rule: String,
    /// Path to a complex file (defaults to the corpus complex).
    #[arg(long)]
    complex: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    levels: usize,
    /// Maximum number of cells in one level.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    /// Maximum number of vertex pairs checked per level in the hyperbolicity sweep.
    #[arg(long, default_value_t = subrule::hyperbolicity::DEFAULT_PAIR_BUDGET)]
    pair_budget: u64,
    #[arg(long, default_value_t = 8)]
    mmax: u32,
    #[arg(long, default_value_t = 3)]
    jmax: usize,
    /// Ball radius around the origin for the four-point estimate.
    #[arg(long, default_value_t = 8)]
    radius: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Join only cells whose ranks differ by one.
    #[arg(long)]
    covering: bool,
    #[arg(long, default_value_t = subrule::growth::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = subrule::growth::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Assume the history graph is quasi-isometric to a Cayley graph.
    #[arg(long)]
    qi_to_group: bool,
    /// Assume the group is a manifold group.
    #[arg(long)]
    manifold_group: bool,
    /// Assume the geometry is one of the model geometries of dimension at most 3.
    #[arg(long)]
    model_geometry: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            levels: self.levels,
            cell_budget: self.budget,
            pair_budget: self.pair_budget,
            m_max: self.mmax,
            j_max: self.jmax,
            radius: self.radius,
            seed: self.seed,
            horizontal_edges: if self.covering { HorizontalEdges::Covering } else { HorizontalEdges::Comparable },
            window: self.window,
            epsilon: self.epsilon,
            assumptions: Assumptions {
                qi_to_group: self.qi_to_group,
                manifold_group: self.manifold_group,
                model_geometry_dim_le_3: self.model_geometry,
            },
        }
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// JSON wrapper recording how a report was produced.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    rule: &'a str,
    config: &'a RunConfig,
    format: Format,
    report: T,
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn write_artifact(dir: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Text => "txt",
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn run(command: Command) -> Result<Output> {
    match command {
        Command::Validate(c) => validate(&c),
        Command::Subdivide(c) => subdivide(&c),
        Command::Graph(c) => graph(&c),
        Command::Analyze { analysis, common } => analyze(analysis, &common),
        Command::Classify(c) => classify(&c),
        Command::Corpus { action } => corpus_command(action),
    }
}

fn checked_config(c: &Common) -> Result<RunConfig> {
    let config = c.config();
    if let Err(field) = config.check() {
        bail!("`{field}` must be positive");
    }
    Ok(config)
}

fn validate(c: &Common) -> Result<Output> {
    let format = c.format(Format::Text);
    if format == Format::Dot {
        bail!("validate supports json and text output");
    }
    let config = c.config();
    let report = input::validation_report(&c.rule, c.complex.as_deref())?;
    let text = match format {
        Format::Json => {
            json(&Envelope { command: "validate", rule: &c.rule, config: &config, format, report: &report })
        }
        _ => render::validation(&report),
    };
    write_artifact(c.out.as_deref(), &format!("validation.{}", extension(format)), &text)?;
    Ok(Output { text, code: if report.ok { 0 } else { EXIT_INVALID } })
}

fn load_levels(c: &Common, config: &RunConfig) -> Result<(Input, Levels)> {
    let input = Input::load(&c.rule, c.complex.as_deref())?;
    let levels = compute_levels(&input.rule, input.complex.clone(), config)?;
    Ok((input, levels))
}

fn budget_code(levels: &Levels) -> u8 {
    if levels.truncated.is_some() {
        EXIT_BUDGET
    } else {
        0
    }
}

#[derive(Serialize)]
struct SubdivideReport {
    max_level: usize,
    truncated: Option<subrule::subdivision::Truncation>,
    cell_counts: Vec<u64>,
    limit_counts: Vec<u64>,
}

fn subdivide(c: &Common) -> Result<Output> {
    let config = checked_config(c)?;
    let format = c.format(Format::Text);
    let (input, levels) = load_levels(c, &config)?;
    let report = SubdivideReport {
        max_level: levels.max_level(),
        truncated: levels.truncated,
        cell_counts: levels.cell_counts(),
        limit_counts: levels.limit_counts(),
    };
    let text = match format {
        Format::Json => {
            json(&Envelope { command: "subdivide", rule: &c.rule, config: &config, format, report: &report })
        }
        Format::Text => render::subdivide(&config, &report.cell_counts, &report.limit_counts, report.truncated),
        Format::Dot => bail!("subdivide supports json and text output"),
    };
    if let Some(dir) = c.out.as_deref() {
        for l in &levels.levels {
            write_artifact(
                Some(dir),
                &format!("level-{}.complex.json", l.level),
                &serialize_complex(input.rule.rule(), &l.complex),
            )?;
        }
        write_artifact(Some(dir), &format!("subdivide.{}", extension(format)), &text)?;
    }
    Ok(Output { text, code: budget_code(&levels) })
}

fn graph(c: &Common) -> Result<Output> {
    let config = checked_config(c)?;
    let format = c.format(Format::Dot);
    let (input, levels) = load_levels(c, &config)?;
    let h = HistoryGraph::build(&levels, config.horizontal_edges);
    let text = match format {
        Format::Dot => h.to_dot(&input.rule),
        Format::Json => {
            json(&Envelope { command: "graph", rule: &c.rule, config: &config, format, report: h.to_json(&input.rule) })
        }
        Format::Text => render::graph(&h),
    };
    write_artifact(c.out.as_deref(), &format!("graph.{}", extension(format)), &text)?;
    Ok(Output { text, code: budget_code(&levels) })
}

fn analyze(analysis: Analysis, c: &Common) -> Result<Output> {
    let config = checked_config(c)?;
    let format = c.format(Format::Text);
    if format == Format::Dot && !matches!(analysis, Analysis::Ends) {
        bail!("dot output is only available for `analyze ends`");
    }
    let (input, levels) = load_levels(c, &config)?;
    let h = HistoryGraph::build(&levels, config.horizontal_edges);
    let envelope = |command: &'static str, report: serde_json::Value| {
        json(&Envelope { command, rule: &c.rule, config: &config, format, report })
    };
    let (name, text) = match analysis {
        Analysis::Growth => {
            let matrix = transition_matrix(&input.rule, &input.complex);
            let report = growth_report(&levels, &matrix, config.window, config.epsilon)?;
            let text = match format {
                Format::Json => envelope("analyze growth", serde_json::to_value(&report)?),
                _ => render::growth(&config, &report),
            };
            ("growth", text)
        }
        Analysis::Ends => {
            let tree = component_tree(&h);
            let report = ends_classification(&tree)?;
            let text = match format {
                Format::Json => envelope("analyze ends", serde_json::to_value(&report)?),
                Format::Dot => tree.to_dot(),
                Format::Text => render::ends(&config, &report),
            };
            ("ends", text)
        }
        Analysis::Hyperbolicity => {
            let report = search_constants(&h, config.m_max, config.j_max, config.pair_budget, config.seed);
            let text = match format {
                Format::Json => envelope("analyze hyperbolicity", serde_json::to_value(&report)?),
                _ => render::hyperbolicity(&config, &report),
            };
            ("hyperbolicity", text)
        }
        Analysis::Delta => {
            let report =
                estimate_delta(&h, config.radius, DEFAULT_EXHAUSTIVE_BOUND, DEFAULT_DELTA_SAMPLES, config.seed);
            let text = match format {
                Format::Json => envelope("analyze delta", serde_json::to_value(&report)?),
                _ => render::delta(&config, &report),
            };
            ("delta", text)
        }
    };
    write_artifact(c.out.as_deref(), &format!("{name}.{}", extension(format)), &text)?;
    Ok(Output { text, code: budget_code(&levels) })
}

fn classify(c: &Common) -> Result<Output> {
    let config = checked_config(c)?;
    let format = c.format(Format::Text);
    if format == Format::Dot {
        bail!("classify supports json and text output");
    }
    let (input, levels) = load_levels(c, &config)?;
    let matrix = transition_matrix(&input.rule, &input.complex);
    let analysis = match analyze_levels(&input.rule, &levels, &matrix, &config) {
        Ok(a) => a,
        Err(e @ PipelineError::TooFewLevels { truncation: Some(_), .. }) => {
            eprintln!("error: {e}");
            return Ok(Output { text: String::new(), code: EXIT_BUDGET });
        }
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Json => {
            json(&Envelope { command: "classify", rule: &c.rule, config: &config, format, report: &analysis })
        }
        _ => render::classification(&analysis),
    };
    write_artifact(c.out.as_deref(), &format!("classification.{}", extension(format)), &text)?;
    let code = if analysis.truncated.is_some() {
        EXIT_BUDGET
    } else if analysis.verdict.geometry == Geometry::Unknown {
        EXIT_UNKNOWN
    } else {
        0
    };
    Ok(Output { text, code })
}

fn corpus_command(action: CorpusAction) -> Result<Output> {
    match action {
        CorpusAction::List { format } => match format {
            Format::Json => Ok(Output::ok(json(&manifests()))),
            Format::Text => Ok(Output::ok(render::corpus_list(&manifests()))),
            Format::Dot => bail!("corpus list supports json and text output"),
        },
        CorpusAction::Export { out, names } => {
            let names: Vec<String> =
                if names.is_empty() { CORPUS_NAMES.iter().map(|s| s.to_string()).collect() } else { names };
            let mut text = String::new();
            for name in &names {
                let entry = corpus(name).with_context(|| format!("unknown corpus entry `{name}`"))?;
                write_artifact(Some(&out), &format!("{name}.rule.json"), &serialize_rule(&entry.rule))?;
                write_artifact(
                    Some(&out),
                    &format!("{name}.complex.json"),
                    &serialize_complex(&entry.rule, &entry.complex),
                )?;
                text.push_str(&format!("{name}\n"));
            }
            Ok(Output::ok(text))
        }
    }
}

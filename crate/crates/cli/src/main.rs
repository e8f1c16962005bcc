use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nonarch::btree::DEFAULT_MAX_RADIUS;
use nonarch::decide::{decide, Case, DecideOptions, Isomorphism};
use nonarch::document::{self, InputDocument, Loaded, Report};
use nonarch::examples::{congruence_menu, make_example, ExampleSpec};
use nonarch::exec::Exec;
use nonarch::localfield::{Field, FieldConfig};
use nonarch::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Parser, Debug)]
#[command(name = "nonarch", version, about = "Discreteness of two-generator subgroups of PSL2 over local fields")]
struct Cli {
    /// Probe radius for tree oracles.
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Closure cap override.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Hensel lifting precision override.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Write a Graphviz dump of the probed ball (oracle only).
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Upper bound on any probe radius.
    #[arg(long, env = "NONARCH_MAX_RADIUS", default_value_t = DEFAULT_MAX_RADIUS, hide_env_values = true)]
    max_radius: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the decision procedure on a document.
    Decide { path: PathBuf },
    /// Lengths, classes and orders of the generators and a few words.
    Analyze { path: PathBuf },
    /// Emit a document realising a classification case.
    MakeExample {
        /// Case letter a..g.
        #[arg(long)]
        case: char,
        /// Expected isomorphism type, e.g. "C2 * C3" or "D3 *_C2 D2".
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = Kind::Padic)]
        kind: Kind,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        f: u32,
    },
    /// Tree probes: displacement, fixed-vertex counts, Fix(A) & Ax(B).
    Oracle { path: PathBuf },
    /// List the congruence menu for a residue field.
    Menu {
        #[arg(long, value_enum, default_value_t = Kind::Padic)]
        kind: Kind,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        f: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Padic,
    Laurent,
}

fn field_config(kind: Kind, p: u32, f: u32) -> Result<FieldConfig> {
    match kind {
        Kind::Padic if f != 1 => Err(Error::InvalidField("a p-adic field has f = 1".into())),
        Kind::Padic => Ok(FieldConfig::padic(p)),
        Kind::Laurent => Ok(FieldConfig::laurent(p, f)),
    }
}

fn read_doc(path: &Path, precision: Option<usize>) -> Result<InputDocument> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    let mut doc = InputDocument::parse(&text)?;
    if let Some(p) = precision {
        doc.field.hensel_precision = p;
    }
    Ok(doc)
}

fn load(path: &Path, precision: Option<usize>) -> Result<(InputDocument, Loaded)> {
    let doc = read_doc(path, precision)?;
    let loaded = doc.load()?;
    Ok((doc, loaded))
}

fn run(cli: &Cli) -> Result<String> {
    let exec = Exec::default();
    match &cli.command {
        Command::Decide { path } => {
            let (doc, loaded) = load(path, cli.precision)?;
            let (a, b) = loaded.pair()?;
            let opts = DecideOptions { cap: cli.cap.or(doc.cap) };
            let verdict = decide(&loaded.field, a, b, &opts)?;
            let report = Report::from_verdict(&loaded.field, &verdict);
            Ok(match cli.format {
                Format::Text => report.render_text(),
                Format::Machine => report.render_machine(),
            })
        }
        Command::Analyze { path } => {
            let (_, loaded) = load(path, cli.precision)?;
            let items = document::analyze(&loaded);
            Ok(match cli.format {
                Format::Text => document::render_analyze_text(&items),
                Format::Machine => document::render_analyze_machine(&items),
            })
        }
        Command::Oracle { path } => {
            let (doc, loaded) = load(path, cli.precision)?;
            let radius = cli.radius.or(doc.radius).unwrap_or(cli.max_radius.min(4));
            if radius > cli.max_radius {
                return Err(Error::Document(format!(
                    "radius {radius} exceeds NONARCH_MAX_RADIUS = {}",
                    cli.max_radius
                )));
            }
            let report = document::oracle(&loaded, radius, exec);
            if let Some(dot) = &cli.dot {
                fs::write(dot, document::oracle_dot(&loaded, radius, exec))
                    .map_err(|e| Error::Document(format!("{}: {e}", dot.display())))?;
            }
            Ok(match cli.format {
                Format::Text => document::render_oracle_text(&report),
                Format::Machine => document::render_oracle_machine(&report),
            })
        }
        Command::MakeExample { case, group, kind, p, f } => {
            let case = Case::from_letter(*case)
                .ok_or_else(|| Error::Document(format!("unknown case '{case}'")))?;
            let expected: Isomorphism = group.parse()?;
            let mut field = field_config(*kind, *p, *f)?;
            if let Some(pr) = cli.precision {
                field.hensel_precision = pr;
            }
            let ex = make_example(&ExampleSpec { case, expected, field })?;
            let mut doc = InputDocument::from_example(&ex);
            doc.radius = cli.radius;
            doc.cap = cli.cap;
            let mut out = String::new();
            for (name, value) in &ex.params {
                out += &format!("# {name} = {value}\n");
            }
            out += &format!("# expected: true:case ({case}) {expected}\n");
            out += &doc.to_toml();
            Ok(out)
        }
        Command::Menu { kind, p, f } => {
            let cfg = field_config(*kind, *p, *f)?;
            Field::new(cfg.clone())?;
            let menu = congruence_menu(&cfg);
            Ok(match cli.format {
                Format::Text => format!("{}\n{menu}", cfg.label()),
                Format::Machine => menu
                    .entries
                    .iter()
                    .map(|e| format!("{}\t{}\t{}\n", e.case, e.iso, e.witness))
                    .collect(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

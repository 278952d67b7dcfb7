use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dyntree::cuts::{
    exact_min_cuts, greedy_acyclic_cuts, parse_edge_list, reduce_vertex_cover, CutSide, ExactError,
    ExactOptions, DEFAULT_CANDIDATE_LIMIT,
};
use dyntree::layout::LayoutOptions;
use dyntree::parser::{format_document, parse_document_with_warnings};
use dyntree::pipeline::{compile, Compiled, Options};
use dyntree::render::{CutMotion, Style, DEFAULT_TRANSITION};
use dyntree::{CutSet, DynamicTree, LayoutParams};

/// Lays out and animates dynamic trees.
#[derive(Parser)]
#[command(name = "dyntree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the whole sequence as animated SVG.
    Animate {
        input: PathBuf,
        #[arg(short, default_value = "-")]
        o: PathBuf,
        #[command(flatten)]
        tune: Tuning,
    },
    /// Render the animation frozen at one moment.
    Snapshot {
        input: PathBuf,
        /// Seconds from the start.
        #[arg(long)]
        at: f64,
        #[arg(short, default_value = "-")]
        o: PathBuf,
        #[command(flatten)]
        tune: Tuning,
    },
    /// Write node coordinates, cuts and criteria results as JSON.
    Layout {
        input: PathBuf,
        #[arg(short, default_value = "-")]
        o: PathBuf,
        #[command(flatten)]
        tune: Tuning,
    },
    /// Check the layout against the drawing criteria.
    Check {
        input: PathBuf,
        #[command(flatten)]
        tune: Tuning,
    },
    /// Report the temporal cuts that make the supergraph acyclic.
    Cuts {
        input: PathBuf,
        /// Also compute a minimum cut set.
        #[arg(long)]
        exact: bool,
        /// Largest candidate count the exact search accepts.
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_LIMIT)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = Side::Head)]
        cut_side: Side,
    },
    /// Turn an edge list into a dynamic tree whose minimum cut count equals
    /// the graph's minimum vertex cover.
    ReduceVc {
        input: PathBuf,
        #[arg(short, default_value = "-")]
        o: PathBuf,
    },
}

#[derive(Args)]
struct Tuning {
    /// Separation between sibling nodes; also the subtree padding unless
    /// --pad is given.
    #[arg(long)]
    sep: Option<f64>,
    #[arg(long)]
    level_sep: Option<f64>,
    /// Separation between neighbouring subtrees below the sibling level.
    #[arg(long)]
    pad: Option<f64>,
    /// Seconds a move takes.
    #[arg(long, default_value_t = DEFAULT_TRANSITION)]
    transition: f64,
    /// Seconds a fade takes; defaults to --transition.
    #[arg(long)]
    fade: Option<f64>,
    #[arg(long, value_enum, default_value_t = Side::Head)]
    cut_side: Side,
    #[arg(long, value_enum, default_value_t = Motion::Move)]
    cut_motion: Motion,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Head,
    Tail,
}

impl From<Side> for CutSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Head => CutSide::Head,
            Side::Tail => CutSide::Tail,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Motion {
    Move,
    Crossfade,
}

impl Tuning {
    fn options(&self) -> Options {
        let mut params = LayoutParams::default();
        if let Some(s) = self.sep {
            params.sibling_sep = s;
            params.subtree_pad = s;
        }
        if let Some(p) = self.pad {
            params.subtree_pad = p;
        }
        if let Some(l) = self.level_sep {
            params.level_sep = l;
        }
        Options {
            params,
            layout: LayoutOptions {
                cut_side: self.cut_side.into(),
                ..Default::default()
            },
            transition: self.transition,
            fade: self.fade,
            style: Style {
                cut_motion: match self.cut_motion {
                    Motion::Move => CutMotion::Move,
                    Motion::Crossfade => CutMotion::Crossfade,
                },
                ..Default::default()
            },
            ..Default::default()
        }
    }
}

/// Failure with the exit code it maps to.
enum Failure {
    Input(anyhow::Error),
    Violations(usize),
    TooLarge(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn label(path: &PathBuf) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

fn read_input(path: &PathBuf) -> Result<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
    } else {
        text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    }
    Ok(text)
}

fn write_output(path: &PathBuf, body: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        io::stdout()
            .write_all(body.as_bytes())
            .context("writing standard output")
    } else {
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))
    }
}

fn load(path: &PathBuf) -> Result<DynamicTree> {
    let text = read_input(path)?;
    let name = label(path);
    let (t, warnings) =
        parse_document_with_warnings(&text).map_err(|e| anyhow::anyhow!("{name}:{e}"))?;
    for w in warnings {
        eprintln!("{name}:{}: warning: {}", w.span, w.message);
    }
    Ok(t)
}

fn report_cuts(out: &mut impl Write, title: &str, cuts: &CutSet) -> io::Result<()> {
    writeln!(out, "{title}={}", cuts.len())?;
    for c in &cuts.cuts {
        writeln!(
            out,
            "  cut {} after snapshot {} -> {}",
            c.node, c.after_index, c.renamed_to
        )?;
    }
    Ok(())
}

fn build(path: &PathBuf, tune: &Tuning) -> Result<Compiled> {
    let t = load(path)?;
    let c = compile(&t, &tune.options())?;
    report_cuts(&mut io::stderr(), "cuts", &c.outcome.cuts)?;
    Ok(c)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Animate { input, o, tune } => {
            let c = build(&input, &tune)?;
            write_output(&o, &c.animated_svg())?;
        }
        Command::Snapshot { input, at, o, tune } => {
            let c = build(&input, &tune)?;
            write_output(&o, &c.snapshot_svg(at.max(0.0)))?;
        }
        Command::Layout { input, o, tune } => {
            let c = build(&input, &tune)?;
            write_output(&o, &c.dump())?;
        }
        Command::Check { input, tune } => {
            let t = load(&input)?;
            let c = compile(&t, &tune.options()).map_err(anyhow::Error::from)?;
            let mut out = io::stdout().lock();
            let r = &c.report;
            for v in r.all() {
                writeln!(out, "{v}").map_err(anyhow::Error::from)?;
            }
            let cut_boundary = r.stability.cut_boundary;
            writeln!(
                out,
                "{} unexpected violations, {} at cut boundaries, {} cuts, {} static symmetry notes",
                r.unexpected(),
                cut_boundary,
                c.outcome.cuts.len(),
                r.static_symmetry.len()
            )
            .map_err(anyhow::Error::from)?;
            if r.unexpected() > 0 {
                return Err(Failure::Violations(r.unexpected()));
            }
        }
        Command::Cuts {
            input,
            exact,
            limit,
            cut_side,
        } => {
            let t = load(&input)?;
            let (_, greedy) = greedy_acyclic_cuts(&t, cut_side.into());
            let mut out = io::stdout().lock();
            report_cuts(&mut out, "greedy", &greedy).map_err(anyhow::Error::from)?;
            if exact {
                let opts = ExactOptions {
                    limit,
                    ..Default::default()
                };
                match exact_min_cuts(&t, opts) {
                    Ok(s) => {
                        report_cuts(&mut out, "exact", &s.cuts).map_err(anyhow::Error::from)?
                    }
                    Err(e @ ExactError::TooLarge { .. }) => {
                        return Err(Failure::TooLarge(e.to_string()))
                    }
                    Err(e) => return Err(Failure::Input(e.into())),
                }
            }
        }
        Command::ReduceVc { input, o } => {
            let text = read_input(&input)?;
            let g =
                parse_edge_list(&text).map_err(|e| anyhow::anyhow!("{}: {e}", label(&input)))?;
            write_output(&o, &format_document(&reduce_vertex_cover(&g)))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Violations(n)) => {
            eprintln!("error: {n} unexpected criteria violations");
            ExitCode::from(2)
        }
        Err(Failure::TooLarge(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

//! `zigzag`: validate, lay out and render combinatorial string diagrams.

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use zigzag_cli::error::CliError;
use zigzag_cli::export::{inject_json, layout_json};
use zigzag_cli::format::{parse_diagram_file, write_diagram_file};
use zigzag_core::diagram::{builtin_example, builtin_examples, validate, Diagram, Signature};
use zigzag_core::layout::{diagram_layout, PairsMode};
use zigzag_core::lp::text::parse_lp_text;
use zigzag_core::lp::to_lp_text;
use zigzag_core::lp::{solve, LpStatus};
use zigzag_core::render::{extract_scene, to_scene_json, to_svg};
use zigzag_core::textfmt::fixed6;

#[derive(Parser)]
#[command(
    name = "zigzag",
    about = "Layout and rendering for combinatorially encoded string diagrams",
    version
)]
struct Cli {
    /// Report errors as a JSON document on stderr.
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pairs {
    /// Constrain covering pairs of the index poset only.
    Cover,
    /// Constrain every comparable pair.
    All,
}

impl From<Pairs> for PairsMode {
    fn from(p: Pairs) -> PairsMode {
        match p {
            Pairs::Cover => PairsMode::Cover,
            Pairs::All => PairsMode::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagram file against its signature and report any failures.
    Validate {
        /// Builtin example name or path to a diagram file.
        input: String,
    },
    /// Solve for rendering coordinates and print them as JSON.
    Layout {
        /// Builtin example name or path to a diagram file.
        input: String,
        /// Which index pairs the fairness constraints range over.
        #[arg(long, value_enum, default_value = "cover")]
        pairs: Pairs,
        /// Write the output here instead of stdout.
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Lay out a diagram and emit SVG (two dimensions) or scene JSON
    /// (three or four).
    Render {
        /// Builtin example name or path to a diagram file.
        input: String,
        /// Which index pairs the fairness constraints range over.
        #[arg(long, value_enum, default_value = "cover")]
        pairs: Pairs,
        /// Drawing units per layout unit.
        #[arg(long, default_value_t = 40.0)]
        scale: f64,
        /// Write the output here instead of stdout.
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Print the injectified level diagram used by the height solver.
    Inject {
        /// Builtin example name or path to a diagram file.
        input: String,
        /// Write the output here instead of stdout.
        #[arg(short, long)]
        output: Option<String>,
    },
    /// List the builtin examples, or print one as a diagram file.
    Examples {
        /// Name of the example to print; omit to list all names.
        name: Option<String>,
        /// Emit the canonical compact form instead of the pretty one.
        #[arg(long)]
        canonical: bool,
        /// Write the output here instead of stdout.
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Solve a linear program given in the LP text format.
    SolveLp {
        /// Path to an LP text file.
        input: String,
        /// Echo the parsed program before the solution.
        #[arg(long)]
        echo: bool,
    },
}

fn read_input_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: String::from(path),
        message: e.to_string(),
    })
}

/// Resolves a positional input: builtin example names win, anything else is
/// read as a diagram file.
fn resolve_diagram(input: &str) -> Result<(Signature, Diagram), CliError> {
    if let Some(ex) = builtin_example(input) {
        return Ok((ex.signature, ex.diagram));
    }
    parse_diagram_file(&read_input_file(input)?)
}

/// Runs validation and turns any failure list into the matching error.
fn require_valid(d: &Diagram, sig: &Signature) -> Result<(), CliError> {
    let failures = validate(d, sig);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation {
            message: format!("diagram failed validation with {} problem(s)", failures.len()),
            failures,
        })
    }
}

fn emit(text: &str, output: Option<&str>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io {
            path: String::from(path),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { input } => {
            let (sig, d) = resolve_diagram(&input)?;
            require_valid(&d, &sig)?;
            println!("valid: {}-dimensional diagram", d.dimension());
            Ok(())
        }
        Command::Layout {
            input,
            pairs,
            output,
        } => {
            let (sig, d) = resolve_diagram(&input)?;
            require_valid(&d, &sig)?;
            let layout = diagram_layout(&d, pairs.into())?;
            emit(&layout_json(&layout), output.as_deref())
        }
        Command::Render {
            input,
            pairs,
            scale,
            output,
        } => {
            let (sig, d) = resolve_diagram(&input)?;
            require_valid(&d, &sig)?;
            let layout = diagram_layout(&d, pairs.into())?;
            let scene = extract_scene(&d, &layout, &sig)?;
            let text = match scene.dimension {
                2 => to_svg(&scene, scale)?,
                3 | 4 => to_scene_json(&scene, scale)?,
                n => {
                    return Err(CliError::Unsupported {
                        message: format!(
                            "a {n}-dimensional diagram has no planar or spatial rendering"
                        ),
                    })
                }
            };
            emit(&text, output.as_deref())
        }
        Command::Inject { input, output } => {
            let (sig, d) = resolve_diagram(&input)?;
            require_valid(&d, &sig)?;
            emit(&inject_json(&d)?, output.as_deref())
        }
        Command::Examples {
            name,
            canonical,
            output,
        } => match name {
            None => {
                let mut text = String::new();
                for ex in builtin_examples() {
                    text.push_str(ex.name);
                    text.push('\n');
                }
                emit(&text, output.as_deref())
            }
            Some(name) => {
                let ex = builtin_example(&name).ok_or_else(|| CliError::Parse {
                    message: format!("no builtin example named {name:?}"),
                })?;
                emit(
                    &write_diagram_file(&ex.signature, &ex.diagram, canonical),
                    output.as_deref(),
                )
            }
        },
        Command::SolveLp { input, echo } => {
            let text = read_input_file(&input)?;
            let lp = parse_lp_text(&text).map_err(|e| CliError::Parse {
                message: format!("{input}: {e}"),
            })?;
            if echo {
                print!("{}", to_lp_text(&lp));
            }
            let solution = solve(&lp);
            match solution.status {
                LpStatus::Optimal => {
                    println!("status: optimal");
                    println!("objective: {}", fixed6(solution.objective_value));
                    for (variable, value) in lp.variables().iter().zip(&solution.assignment) {
                        println!("{} = {}", variable.name, fixed6(*value));
                    }
                }
                LpStatus::Infeasible => println!("status: infeasible"),
                LpStatus::Unbounded => println!("status: unbounded"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut stderr = std::io::stderr().lock();
            if cli.json_errors {
                let _ = writeln!(stderr, "{}", e.to_json());
            } else {
                let _ = writeln!(stderr, "error: {}", e.message());
                if let CliError::Validation { failures, .. } = &e {
                    for f in failures {
                        let _ = writeln!(stderr, "  {}: {}", f.path, f.kind);
                    }
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

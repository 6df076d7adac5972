//! Command-line driver: parse and check programs, list laws, apply laws,
//! run derivation scripts, diff programs, and run the contract
//! equivalence oracle.
//!
//! Exit codes (disjoint):
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 2    | parse error                               |
//! | 3    | well-formedness error                     |
//! | 4    | law schema mismatch                       |
//! | 5    | proviso failure                           |
//! | 6    | contract inequivalence / oracle failure   |
//! | 7    | I/O failure                               |
//! | 8    | bad binding, script, or law id            |

mod binding;
mod diff;
mod script;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lawful::ast::Program;
use lawful::frontend;
use lawful::laws::{self, Direction, LawError};
use lawful::oracle::{check_equivalence, EquivalenceReport, DEFAULT_ATOM_CAP};

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_WELLFORMED: u8 = 3;
pub const EXIT_SCHEMA: u8 = 4;
pub const EXIT_PROVISO: u8 = 5;
pub const EXIT_ORACLE: u8 = 6;
pub const EXIT_IO: u8 = 7;
pub const EXIT_FORMAT: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(name = "lawful", version, about = "Contract-aware refactoring laws for a mini Java-like language")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Maximum number of propositional atoms per oracle comparison.
    #[arg(long, global = true, default_value_t = DEFAULT_ATOM_CAP)]
    atom_cap: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and well-formedness-check a program.
    Check { input: PathBuf },
    /// List the law catalogue with directions and proviso names.
    Laws,
    /// Apply one law to a program.
    Apply {
        input: PathBuf,
        /// Law id as shown by `laws`.
        law: String,
        /// `forward`/`fwd`/`->` or `backward`/`bwd`/`<-`.
        direction: String,
        /// Binding file (`key = value` lines).
        #[arg(long)]
        binding: PathBuf,
        /// Write the transformed program here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the equivalence oracle on the result.
        #[arg(long)]
        verify: bool,
        /// Skip provisos and result validation (demonstration mode).
        #[arg(long)]
        force: bool,
    },
    /// Run a derivation script against a program.
    Script {
        script: PathBuf,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Oracle-check each member-moving step and the whole script.
        #[arg(long)]
        verify: bool,
    },
    /// Structurally diff two programs.
    Diff { before: PathBuf, after: PathBuf },
    /// Compare the observable contracts of two programs.
    Verify {
        before: PathBuf,
        after: PathBuf,
        /// Comma-separated exact types to compare (default: classes
        /// declared in both programs).
        #[arg(long)]
        scope: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", paint(&f.message, "31"));
            }
            ExitCode::from(f.code)
        }
    }
}

/// ANSI-color `s` when LAWFUL_COLOR=1.
fn paint(s: &str, color: &str) -> String {
    if std::env::var("LAWFUL_COLOR").as_deref() == Ok("1") {
        format!("\x1b[{color}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read_file(path)?;
    let program = frontend::parse_text(&text).map_err(|diags| {
        let mut msg = String::new();
        for d in &diags {
            msg.push_str(&format!("{}: {d}\n", path.display()));
        }
        Failure::new(EXIT_PARSE, msg.trim_end().to_string())
    })?;
    lawful::validate::check(&program).map_err(|diags| {
        let mut msg = String::new();
        for d in &diags {
            msg.push_str(&format!("{}: {d}\n", path.display()));
        }
        Failure::new(EXIT_WELLFORMED, msg.trim_end().to_string())
    })?;
    Ok(program)
}

fn parse_direction(s: &str) -> Result<Direction, Failure> {
    match s {
        "forward" | "fwd" | "->" => Ok(Direction::Forward),
        "backward" | "bwd" | "<-" => Ok(Direction::Backward),
        other => Err(Failure::new(
            EXIT_FORMAT,
            format!("`{other}` is not a direction (forward/backward)"),
        )),
    }
}

fn law_error_to_failure(e: LawError, context: &str) -> Failure {
    match e {
        LawError::UnknownLaw(id) => Failure::new(EXIT_FORMAT, format!("{context}: no law `{id}`")),
        LawError::SchemaMismatch(why) => {
            Failure::new(EXIT_SCHEMA, format!("{context}: schema mismatch: {why}"))
        }
        LawError::ProvisosFailed(reports) => {
            let mut msg = format!("{context}: proviso failure\n");
            for r in reports {
                msg.push_str(&format!("  {r}\n"));
            }
            Failure::new(EXIT_PROVISO, msg.trim_end().to_string())
        }
        LawError::InvalidResult(diags) => {
            let mut msg = format!("{context}: transformed program is ill-formed\n");
            for d in diags {
                msg.push_str(&format!("  {d}\n"));
            }
            Failure::new(EXIT_WELLFORMED, msg.trim_end().to_string())
        }
    }
}

/// Classes declared in both programs: the exact types whose observable
/// contracts must agree.
fn common_scope(before: &Program, after: &Program) -> Vec<String> {
    before
        .classes
        .iter()
        .filter(|c| after.class(&c.name).is_some())
        .map(|c| c.name.clone())
        .collect()
}

fn oracle_check(
    before: &Program,
    after: &Program,
    scope: &[String],
    cap: usize,
    format: Format,
    context: &str,
) -> Result<EquivalenceReport, Failure> {
    let report = check_equivalence(before, after, scope, cap)
        .map_err(|e| Failure::new(EXIT_ORACLE, format!("{context}: {e}")))?;
    if !report.all_equivalent() {
        let body = match format {
            Format::Text => report.to_string(),
            Format::Structured => serde_json::to_string_pretty(&report).unwrap(),
        };
        return Err(Failure::new(
            EXIT_ORACLE,
            format!("{context}: contracts are not equivalent\n{body}"),
        ));
    }
    Ok(report)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Check { input } => cmd_check(input, cli.format),
        Cmd::Laws => {
            cmd_laws(cli.format);
            Ok(())
        }
        Cmd::Apply {
            input,
            law,
            direction,
            binding,
            out,
            verify,
            force,
        } => cmd_apply(cli, input, law, direction, binding, out.as_deref(), *verify, *force),
        Cmd::Script {
            script,
            input,
            out,
            verify,
        } => cmd_script(cli, script, input, out.as_deref(), *verify),
        Cmd::Diff { before, after } => cmd_diff(before, after, cli.format),
        Cmd::Verify {
            before,
            after,
            scope,
        } => cmd_verify(cli, before, after, scope.as_deref()),
    }
}

fn cmd_check(input: &Path, format: Format) -> Result<(), Failure> {
    let program = load_program(input)?;
    match format {
        Format::Text => println!(
            "{}: ok ({} classes, main `{}`)",
            input.display(),
            program.classes.len(),
            program.main
        ),
        Format::Structured => println!(
            "{}",
            serde_json::json!({
                "status": "ok",
                "classes": program.classes.len(),
                "main": program.main,
            })
        ),
    }
    Ok(())
}

fn cmd_laws(format: Format) {
    let catalogue = laws::catalogue();
    match format {
        Format::Text => {
            for law in catalogue {
                println!("{} {} — {}", law.id, law.directions, law.name);
                for p in &law.provisos {
                    let dir = match p.dir {
                        laws::ProvisoDir::Fwd => "->",
                        laws::ProvisoDir::Bwd => "<-",
                        laws::ProvisoDir::Both => "<->",
                    };
                    println!("    [{dir}] {}", p.name);
                }
            }
        }
        Format::Structured => {
            let entries: Vec<serde_json::Value> = catalogue
                .iter()
                .map(|law| {
                    serde_json::json!({
                        "id": law.id,
                        "name": law.name,
                        "directions": law.directions,
                        "provisos": law.provisos.iter().map(|p| {
                            serde_json::json!({
                                "name": p.name,
                                "direction": match p.dir {
                                    laws::ProvisoDir::Fwd => "->",
                                    laws::ProvisoDir::Bwd => "<-",
                                    laws::ProvisoDir::Both => "<->",
                                },
                            })
                        }).collect::<Vec<_>>(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&entries).unwrap());
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_apply(
    cli: &Cli,
    input: &Path,
    law_id: &str,
    direction: &str,
    binding_path: &Path,
    out: Option<&Path>,
    verify: bool,
    force: bool,
) -> Result<(), Failure> {
    let program = load_program(input)?;
    let dir = parse_direction(direction)?;
    let law = laws::find_law(law_id).map_err(|e| law_error_to_failure(e, law_id))?;
    let binding = binding::parse_binding_text(&read_file(binding_path)?)
        .map_err(|e| Failure::new(EXIT_FORMAT, format!("{}: {e}", binding_path.display())))?;
    let transformed = if force {
        laws::apply_unchecked(&program, &law, &binding, dir)
            .map_err(|e| law_error_to_failure(e, law_id))?
    } else {
        let (transformed, reports) = laws::apply_law(&program, &law, &binding, dir)
            .map_err(|e| law_error_to_failure(e, law_id))?;
        match cli.format {
            Format::Text => {
                for r in &reports {
                    eprintln!("{}", paint(&r.to_string(), "32"));
                }
            }
            Format::Structured => {
                eprintln!("{}", serde_json::to_string_pretty(&reports).unwrap());
            }
        }
        transformed
    };
    if verify {
        let scope = common_scope(&program, &transformed);
        oracle_check(&program, &transformed, &scope, cli.atom_cap, cli.format, law_id)?;
        eprintln!("{}", paint("oracle: contracts equivalent", "32"));
    }
    write_output(out, &frontend::pretty_print(&transformed).text)
}

fn cmd_script(
    cli: &Cli,
    script_path: &Path,
    input: &Path,
    out: Option<&Path>,
    verify: bool,
) -> Result<(), Failure> {
    let original = load_program(input)?;
    let steps = script::parse_script(&read_file(script_path)?)
        .map_err(|e| Failure::new(EXIT_FORMAT, format!("{}: {e}", script_path.display())))?;
    let mut current = original.clone();
    for (i, step) in steps.iter().enumerate() {
        let context = format!(
            "step {} (line {}, {} {})",
            i + 1,
            step.line,
            step.law_id,
            step.dir.arrow()
        );
        let law = laws::find_law(&step.law_id)
            .map_err(|e| law_error_to_failure(e, &context))?;
        let (next, _) = laws::apply_law(&current, &law, &step.binding, step.dir)
            .map_err(|e| law_error_to_failure(e, &context))?;
        if verify && (step.law_id.starts_with("law1-") || step.law_id.starts_with("law3-")) {
            let scope = common_scope(&current, &next);
            oracle_check(&current, &next, &scope, cli.atom_cap, cli.format, &context)?;
            eprintln!("{}", paint(&format!("{context}: oracle ok"), "32"));
        }
        eprintln!("{context}: applied");
        current = next;
    }
    if verify {
        let scope = common_scope(&original, &current);
        oracle_check(
            &original,
            &current,
            &scope,
            cli.atom_cap,
            cli.format,
            "whole script",
        )?;
        eprintln!("{}", paint("whole script: oracle ok", "32"));
    }
    write_output(out, &frontend::pretty_print(&current).text)
}

fn cmd_diff(before: &Path, after: &Path, format: Format) -> Result<(), Failure> {
    let b = load_program(before)?;
    let a = load_program(after)?;
    let entries = diff::diff_programs(&b, &a);
    match format {
        Format::Text => {
            if entries.is_empty() {
                println!("no structural differences");
            }
            for e in &entries {
                println!("{e}");
            }
        }
        Format::Structured => {
            println!("{}", serde_json::to_string_pretty(&entries).unwrap());
        }
    }
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    before: &Path,
    after: &Path,
    scope: Option<&str>,
) -> Result<(), Failure> {
    let b = load_program(before)?;
    let a = load_program(after)?;
    let scope: Vec<String> = match scope {
        Some(s) => s.split(',').map(|t| t.trim().to_string()).collect(),
        None => common_scope(&b, &a),
    };
    let report = oracle_check(&b, &a, &scope, cli.atom_cap, cli.format, "verify")?;
    match cli.format {
        Format::Text => print!("{report}"),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
    }
    Ok(())
}

//! Command line front end: validate, simulate, render, and format model
//! files, plus a worked signature demo. Exit codes are part of the
//! contract: 0 success, 1 validation failure, 2 parse error, 3 usage or
//! I/O error, 4 simulation error.

use clap::{Parser, Subcommand, ValueEnum};
use flowthing::dsl::{parse, serialize, ParseError};
use flowthing::model::Model;
use flowthing::render::{render_dot, Level, RenderOptions};
use flowthing::sim::{parse_scenario, simulate};
use flowthing::toypki::{
    ascii_hash, hash_terms, keygen, sign_message, toy_decrypt, verify_message,
};
use flowthing::{validate, Location};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_SIM: u8 = 4;

#[derive(Parser)]
#[command(name = "fm", version, about = "Modeling toolkit for flow machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and report diagnostics.
    Validate {
        /// Model file to check.
        model: PathBuf,
    },
    /// Run a scenario against a model and print the event log as TSV.
    Sim {
        /// Model file to simulate.
        model: PathBuf,
        /// Scenario file with injections, decisions, and handler bindings.
        #[arg(long)]
        scenario: PathBuf,
        /// Write the log here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a model as Graphviz DOT.
    Render {
        /// Model file to render.
        model: PathBuf,
        /// How much structure to keep.
        #[arg(long, value_enum, default_value_t = LevelArg::Full)]
        level: LevelArg,
        /// Include note annotations in labels.
        #[arg(long)]
        annotations: bool,
        /// Write the DOT here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a model in canonical form.
    Fmt {
        /// Model file to format.
        model: PathBuf,
        /// Rewrite the file in place instead of printing.
        #[arg(long, conflicts_with = "check")]
        write: bool,
        /// Exit nonzero if the file is not already canonical.
        #[arg(long)]
        check: bool,
    },
    /// Worked examples of the toy arithmetic.
    Demo {
        #[command(subcommand)]
        demo: DemoCommand,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Hash a message, sign it, verify it, and show what tampering does.
    Signature {
        /// Message to sign; 7-bit ASCII only.
        #[arg(long, default_value = "The check is in the mail.")]
        message: String,
        /// Seed for the signer's key pair.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also show a transposition slipping through and an edit being caught.
        #[arg(long)]
        tamper: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Full,
    Machines,
    Spheres,
}

impl From<LevelArg> for Level {
    fn from(level: LevelArg) -> Level {
        match level {
            LevelArg::Full => Level::Full,
            LevelArg::Machines => Level::Machines,
            LevelArg::Spheres => Level::Spheres,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Validate { model } => cmd_validate(&model),
        Command::Sim {
            model,
            scenario,
            out,
        } => cmd_sim(&model, &scenario, out.as_deref()),
        Command::Render {
            model,
            level,
            annotations,
            out,
        } => cmd_render(&model, level.into(), annotations, out.as_deref()),
        Command::Fmt {
            model,
            write,
            check,
        } => cmd_fmt(&model, write, check),
        Command::Demo {
            demo:
                DemoCommand::Signature {
                    message,
                    seed,
                    tamper,
                },
        } => cmd_demo_signature(&message, seed, tamper),
    }
}

fn cmd_validate(path: &Path) -> ExitCode {
    let src = match read_file(path) {
        Ok(src) => src,
        Err(code) => return code,
    };
    let model = match parse_model(path, &src) {
        Ok(model) => model,
        Err(code) => return code,
    };
    if report_diagnostics(path, &model) {
        return ExitCode::from(EXIT_VALIDATION);
    }
    let (mut spheres, mut machines, mut stages) = (0, 0, 0);
    model.for_each_sphere(|_, sphere| {
        spheres += 1;
        machines += sphere.machines.len();
        stages += sphere
            .machines
            .iter()
            .map(|m| m.stages.len())
            .sum::<usize>();
    });
    println!(
        "ok: {} spheres, {} machines, {} stages, {} flows, {} triggers",
        spheres,
        machines,
        stages,
        model.flows.len(),
        model.triggers.len()
    );
    ExitCode::SUCCESS
}

fn cmd_sim(model_path: &Path, scenario_path: &Path, out: Option<&Path>) -> ExitCode {
    let model_src = match read_file(model_path) {
        Ok(src) => src,
        Err(code) => return code,
    };
    let model = match parse_model(model_path, &model_src) {
        Ok(model) => model,
        Err(code) => return code,
    };
    let scenario_src = match read_file(scenario_path) {
        Ok(src) => src,
        Err(code) => return code,
    };
    let scenario = match parse_scenario(&scenario_src) {
        Ok(scenario) => scenario,
        Err(err) => {
            eprintln!(
                "{}:{}: scenario error: {}",
                scenario_path.display(),
                err.line,
                err.message
            );
            return ExitCode::from(EXIT_PARSE);
        }
    };
    if report_diagnostics(model_path, &model) {
        return ExitCode::from(EXIT_VALIDATION);
    }
    let log = match simulate(&model, &scenario) {
        Ok(log) => log,
        Err(err) => {
            eprintln!("sim error: {err}");
            return ExitCode::from(EXIT_SIM);
        }
    };
    emit(out, &log.to_tsv())
}

fn cmd_render(path: &Path, level: Level, annotations: bool, out: Option<&Path>) -> ExitCode {
    let src = match read_file(path) {
        Ok(src) => src,
        Err(code) => return code,
    };
    let model = match parse_model(path, &src) {
        Ok(model) => model,
        Err(code) => return code,
    };
    let options = RenderOptions {
        level,
        show_annotations: annotations,
        ..RenderOptions::default()
    };
    emit(out, &render_dot(&model, &options))
}

fn cmd_fmt(path: &Path, write: bool, check: bool) -> ExitCode {
    let src = match read_file(path) {
        Ok(src) => src,
        Err(code) => return code,
    };
    let model = match parse_model(path, &src) {
        Ok(model) => model,
        Err(code) => return code,
    };
    let canonical = match serialize(&model) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("{}: cannot format: {err}", path.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if check {
        if canonical == src {
            return ExitCode::SUCCESS;
        }
        eprintln!("{}: not in canonical form", path.display());
        return ExitCode::from(EXIT_VALIDATION);
    }
    if write {
        return emit(Some(path), &canonical);
    }
    emit(None, &canonical)
}

fn cmd_demo_signature(message: &str, seed: u64, tamper: bool) -> ExitCode {
    let terms = match hash_terms(message) {
        Ok(terms) => terms,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let hash: u64 = terms.iter().sum();
    let chain = if terms.is_empty() {
        "0".to_string()
    } else {
        let sums: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        format!("{} = {}", sums.join(" + "), hash)
    };
    let signer = keygen(seed);
    let signed = match sign_message(message, &signer) {
        Ok(signed) => signed,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    println!("message: {message:?}");
    println!("hash: {chain}");
    println!(
        "key: seed {seed} -> d = {}, e = {}, m = {}",
        signer.d, signer.e, signer.modulus
    );
    println!(
        "cipher: ({hash} + {}) mod {} = {}",
        signer.d, signer.modulus, signed.appended_cipher
    );
    report_check(&signed, &signer);
    if tamper {
        demo_tamper(&signed, &signer);
    }
    ExitCode::SUCCESS
}

/// Decrypt the appended cipher, recompute the hash, and print the verdict.
fn report_check(signed: &flowthing::toypki::SignedMessage, signer: &flowthing::toypki::KeyPair) {
    let public = signer.public();
    let decrypted =
        toy_decrypt(signed.appended_cipher, public.e, public.modulus).expect("cipher is in domain");
    let recomputed = ascii_hash(&signed.body).expect("body stayed ASCII");
    println!(
        "check: decrypted = {decrypted}, recomputed = {recomputed} -> {}",
        verify_message(signed, &public)
    );
}

fn demo_tamper(signed: &flowthing::toypki::SignedMessage, signer: &flowthing::toypki::KeyPair) {
    let bytes = signed.body.as_bytes();
    match (0..bytes.len().saturating_sub(1)).find(|&i| bytes[i] != bytes[i + 1]) {
        Some(i) => {
            let mut swapped = bytes.to_vec();
            swapped.swap(i, i + 1);
            let forged = flowthing::toypki::SignedMessage {
                body: String::from_utf8(swapped).expect("still ASCII"),
                appended_cipher: signed.appended_cipher,
            };
            println!(
                "tamper: swap positions {i} and {} -> {:?}",
                i + 1,
                forged.body
            );
            report_check(&forged, signer);
        }
        None => println!("tamper: message too uniform to demonstrate a transposition"),
    }
    match bytes.first() {
        Some(&first) => {
            let replacement = if first == b'~' { b'!' } else { first + 1 };
            let mut edited = bytes.to_vec();
            edited[0] = replacement;
            let forged = flowthing::toypki::SignedMessage {
                body: String::from_utf8(edited).expect("still ASCII"),
                appended_cipher: signed.appended_cipher,
            };
            println!(
                "tamper: replace position 0 with {:?} -> {:?}",
                replacement as char, forged.body
            );
            report_check(&forged, signer);
        }
        None => println!("tamper: empty message has nothing to edit"),
    }
}

fn read_file(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|err| {
        eprintln!("fm: cannot read {}: {err}", path.display());
        ExitCode::from(EXIT_USAGE)
    })
}

fn parse_model(path: &Path, src: &str) -> Result<Model, ExitCode> {
    parse(src).map_err(|err: ParseError| {
        eprintln!(
            "{}:{}:{}: parse error: {}",
            path.display(),
            err.line,
            err.col,
            err.message
        );
        ExitCode::from(EXIT_PARSE)
    })
}

/// Print every diagnostic to stderr; true when any is an error.
fn report_diagnostics(path: &Path, model: &Model) -> bool {
    let diagnostics = validate(model);
    for d in &diagnostics {
        match &d.location {
            Location::Span(span) => eprintln!(
                "{}:{}:{}: {} {}: {}",
                path.display(),
                span.line,
                span.col,
                d.code,
                d.severity,
                d.message
            ),
            Location::Element(element) => eprintln!(
                "{}: {element}: {} {}: {}",
                path.display(),
                d.code,
                d.severity,
                d.message
            ),
        }
    }
    diagnostics.iter().any(|d| d.is_error())
}

/// Print to stdout, or write atomically next to the target path.
fn emit(out: Option<&Path>, content: &str) -> ExitCode {
    match out {
        None => {
            print!("{content}");
            ExitCode::SUCCESS
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let result = tempfile::NamedTempFile::new_in(dir)
                .and_then(|mut tmp| tmp.write_all(content.as_bytes()).map(|()| tmp))
                .and_then(|tmp| tmp.persist(path).map_err(|err| err.error));
            match result {
                Ok(_) => ExitCode::SUCCESS,
                Err(err) => {
                    eprintln!("fm: cannot write {}: {err}", path.display());
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
    }
}

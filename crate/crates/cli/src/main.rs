//! `depthcalc` command line front end.

mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use depthcalc::{fixtures, Error};
use serde_json::{json, Value};

use commands::Options;

const SCHEMA: &str = "depthcalc/v1";

#[derive(Parser)]
#[command(name = "depthcalc", version, about = "Depth, ramification and Hecke algebra computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input document: inline JSON, `fixture:<name>`, or a file path.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Word length radius for ball enumerations.
    #[arg(long, global = true)]
    radius: Option<u64>,
    /// Size cap: group order, Weyl group order or Hecke word length.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true, default_value_t = depthcalc::acceptance::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Herbrand functions of ramification profiles, towers and PL calculus.
    Herbrand,
    /// Depth transfer for an induced torus at a given depth.
    DepthTorus,
    /// Depth transfer function of a group from its vertex data.
    PhiGroup,
    /// Congruence level bounds for a torus.
    EllBound,
    /// Coinvariant groups and root datum invariants.
    Coinvariants,
    /// Fixed points of a Frobenius action in a ball of the Iwahori-Weyl group.
    SigmaFixed,
    /// Weyl orbits on the fixed part of the coinvariants.
    Cartan,
    /// Presented twisted affine Hecke algebras.
    Hecke,
    /// Hecke algebras of finite 2x2 groups over truncated rings.
    FiniteHecke,
    /// Run the acceptance criteria.
    Selftest,
    /// List the built-in fixture documents.
    Fixtures,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Herbrand => "herbrand",
            Command::DepthTorus => "depth-torus",
            Command::PhiGroup => "phi-group",
            Command::EllBound => "ell-bound",
            Command::Coinvariants => "coinvariants",
            Command::SigmaFixed => "sigma-fixed",
            Command::Cartan => "cartan",
            Command::Hecke => "hecke",
            Command::FiniteHecke => "finite-hecke",
            Command::Selftest => "selftest",
            Command::Fixtures => "fixtures",
        }
    }

    fn needs_input(self) -> bool {
        !matches!(self, Command::Selftest | Command::Fixtures)
    }
}

fn read_input(spec: &str) -> Result<Value, Error> {
    let trimmed = spec.trim_start();
    let mut v = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Validation(format!("inline input is not JSON: {e}")))?
    } else if let Some(name) = spec.strip_prefix("fixture:") {
        fixtures::document(name)?
    } else {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Validation(format!("cannot read {spec}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("{spec} is not JSON: {e}")))?
    };
    commands::expand_profiles(&mut v)?;
    Ok(v)
}

fn run(cli: &Cli) -> Result<(Value, bool), Error> {
    let opts = Options { radius: cli.radius, cap: cli.cap, seed: cli.seed };
    let input = match (&cli.input, cli.command.needs_input()) {
        (Some(s), true) => read_input(s)?,
        (None, true) => return Err(Error::Validation(format!("{} needs --input", cli.command.name()))),
        _ => Value::Null,
    };
    let doc = match cli.command {
        Command::Herbrand => commands::herbrand(&input)?,
        Command::DepthTorus => commands::depth_torus(&input)?,
        Command::PhiGroup => commands::phi_group(&input)?,
        Command::EllBound => commands::ell_bound(&input)?,
        Command::Coinvariants => commands::coinvariants_cmd(&input, opts)?,
        Command::SigmaFixed => commands::sigma_fixed(&input, opts)?,
        Command::Cartan => commands::cartan(&input, opts)?,
        Command::Hecke => commands::hecke(&input, opts)?,
        Command::FiniteHecke => commands::finite_hecke(&input, opts)?,
        Command::Selftest => {
            let doc = commands::selftest(opts);
            let ok = doc["passed"] == doc["total"];
            return Ok((doc, ok));
        }
        Command::Fixtures => json!({ "fixtures": fixtures::NAMES }),
    };
    Ok((doc, true))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Computation(_) => 2,
        Error::Resource(_) => 3,
        _ => 1,
    }
}

fn emit(cli: &Cli, doc: &Value) -> std::io::Result<()> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(doc).expect("JSON values serialize") + "\n",
        Format::Table => render::table(doc),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((mut doc, ok)) => {
            if let Value::Object(map) = &mut doc {
                map.insert("schema".into(), json!(SCHEMA));
                map.insert("command".into(), json!(cli.command.name()));
            }
            if let Err(e) = emit(&cli, &doc) {
                eprintln!("{}", json!({"schema": SCHEMA, "error": {"kind": "io", "message": e.to_string()}, "exit_code": 1}));
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!(
                "{}",
                json!({"schema": SCHEMA, "error": {"kind": e.kind(), "message": e.to_string()}, "exit_code": code})
            );
            ExitCode::from(code)
        }
    }
}

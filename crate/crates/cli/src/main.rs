mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmhodge::{Error, ErrorClass};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_DIR_ENV: &str = "CMHODGE_OUT_DIR";

#[derive(Parser)]
#[command(name = "cmhodge", version, about = "Exact checks on odd-weight CM Hodge structures")]
pub struct Cli {
    /// Worker threads for enumeration sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized constructions and the self test.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON result to this file. Defaults to `$CMHODGE_OUT_DIR/<command>.json`
    /// when that variable is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct FieldArgs {
    /// Conductor m of the cyclotomic field Q(zeta_m).
    #[arg(long, conflicts_with = "field")]
    pub conductor: Option<u64>,
    /// Field JSON, inline or as a file path.
    #[arg(long)]
    pub field: Option<String>,
}

#[derive(Args, Clone)]
pub struct OrientedArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Odd weight; may be omitted when the orientation JSON carries it.
    #[arg(long)]
    pub weight: Option<u32>,
    /// Orientation JSON, inline or as a file path.
    #[arg(long)]
    pub orientation: String,
}

#[derive(Args, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub weight: Option<u32>,
    /// Orientation JSON, inline or as a file path.
    #[arg(long, conflicts_with = "hodge")]
    pub orientation: Option<String>,
    /// Hodge numbers h^{w,0},...,h^{0,w}; runs over every orientation with these numbers.
    #[arg(long, value_delimiter = ',')]
    pub hodge: Option<Vec<usize>>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Describe a CM field.
    Field(FieldArgs),
    /// Orientation utilities.
    #[command(subcommand)]
    Orient(OrientCommand),
    /// Grading vector of an oriented field.
    Grading(OrientedArgs),
    /// Galois-orbit rank report and nondegeneracy verdict.
    Nondeg(SweepArgs),
    /// Support graph, partition and block-system verdict of an element.
    Partition {
        /// Element JSON file.
        #[arg(long)]
        element: PathBuf,
    },
    /// Dimension of the subalgebra generated by seed elements.
    Closure {
        /// Element JSON files (each an element or an array of elements).
        #[arg(long = "element", required = true, num_args = 1..)]
        elements: Vec<PathBuf>,
    },
    /// Escape verdict for a rational nilpotent element.
    Escape {
        #[arg(long)]
        element: PathBuf,
    },
    /// Rigidity verdict from Galois orbits of edges.
    Rigidity(SweepArgs),
    /// Build element JSON files.
    #[command(subcommand)]
    Element(ElementCommand),
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand)]
pub enum OrientCommand {
    /// List every orientation with the given Hodge numbers.
    Enumerate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        weight: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        hodge: Vec<usize>,
    },
}

#[derive(Subcommand)]
pub enum ElementCommand {
    /// The basis element X_{i,j}.
    Root {
        #[command(flatten)]
        oriented: OrientedArgs,
        #[arg(long, allow_hyphen_values = true)]
        i: i32,
        #[arg(long, allow_hyphen_values = true)]
        j: i32,
    },
    /// A rational nilpotent; the regular one unless `--random` is given.
    Nilpotent {
        #[command(flatten)]
        oriented: OrientedArgs,
        /// Draw the blocks from `--seed`.
        #[arg(long)]
        random: bool,
    },
    /// Sum of the Galois orbit of an element.
    Average {
        #[arg(long)]
        element: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Field(_) => "field",
            Command::Orient(_) => "orient",
            Command::Grading(_) => "grading",
            Command::Nondeg(_) => "nondeg",
            Command::Partition { .. } => "partition",
            Command::Closure { .. } => "closure",
            Command::Escape { .. } => "escape",
            Command::Rigidity(_) => "rigidity",
            Command::Element(_) => "element",
            Command::Selftest => "selftest",
        }
    }
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::Domain => 3,
        ErrorClass::TheoremViolation => 4,
    }
}

fn error_json(e: &Error) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": {
            "reason": e.reason(),
            "message": e.to_string(),
            "class": match e.class() {
                ErrorClass::Usage => "usage",
                ErrorClass::Domain => "domain",
                ErrorClass::TheoremViolation => "theorem_violation",
            },
        },
    })
}

fn emit(value: &Value, target: Option<PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string(value).expect("JSON values serialize");
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(path) = target {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Usage(format!("cannot create {}: {e}", dir.display())))?;
        }
        std::fs::write(&path, format!("{text}\n"))
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = Error::Usage(e.to_string().trim().to_string());
            let _ = emit(&error_json(&err), None);
            return ExitCode::from(2);
        }
    };
    if cli.jobs == 0 {
        let err = Error::Usage("--jobs must be at least 1".into());
        let _ = emit(&error_json(&err), None);
        return ExitCode::from(2);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .expect("thread pool is configured once");

    let target = cli.output.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|dir| PathBuf::from(dir).join(format!("{}.json", cli.command.name())))
    });
    let result = commands::run(&cli.command, cli.seed).and_then(|(mut value, code)| {
        if let Value::Object(map) = &mut value {
            map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        }
        emit(&value, target).map(|_| code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = emit(&error_json(&e), None);
            ExitCode::from(exit_code(e.class()))
        }
    }
}

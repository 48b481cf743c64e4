use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use unmate::complex::{load, validate};
use unmate::error::{Error, Stage};
use unmate::laminations::AngleClasses;
use unmate::pipeline::{lamination_json, matrix_json, parameter_stage, parameters_json, require_valid, spectral_stage};
use unmate::render::{render_svg, SvgScene};
use unmate::{run_pipeline, PipelineOptions, PipelineResult};

#[derive(Parser)]
#[command(name = "unmate", version, about = "Unmate expanding Thurston maps into critical portraits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    W,
    B,
    Join,
}

#[derive(clap::Args)]
struct Common {
    /// map description (JSON)
    path: PathBuf,
    /// output format; only JSON is implemented
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Check the map description; exit 0 iff every check passes
    Validate(Common),
    /// Edge transition matrix and Perron lengths
    Matrix(Common),
    /// Circle parameters of the markers and of γ¹
    Parameters {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        branch: u32,
    },
    /// Run the whole pipeline
    Unmate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        branch: u32,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// write `<stem>-white.svg`, `<stem>-black.svg` and `<stem>-join.svg`
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Lamination classes at one depth
    Lamination {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        branch: u32,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value = "join")]
        side: SideArg,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// SVG of a lamination, to `--svg` or standard output
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        branch: u32,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value = "join")]
        side: SideArg,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    if matches!(e, Error::BranchOutOfRange { .. }) {
        return 2;
    }
    match e.stage() {
        Stage::Parse => 2,
        Stage::Complex => 3,
        Stage::Spectral => 4,
        Stage::Parameterize => 5,
        Stage::Portraits => 6,
        Stage::Laminations | Stage::Render => 7,
    }
}

fn print(value: &Value) {
    emit(&serde_json::to_string_pretty(value).expect("serializable"));
}

fn emit(text: &str) {
    use std::io::Write;
    // a closed pipe downstream is not an error worth reporting
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn pick(result: &PipelineResult, depth: usize, side: SideArg) -> AngleClasses {
    let level = result.level(depth.max(1)).expect("tower has the requested depth");
    match side {
        SideArg::W => level.white.clone(),
        SideArg::B => level.black.clone(),
        SideArg::Join => level.join.clone(),
    }
}

fn scene(classes: &AngleClasses, title: String) -> String {
    let mut scene = SvgScene::new(title);
    scene.add_classes(classes);
    render_svg(&scene)
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(Error::Io)
}

fn svg_family(stem: &Path, result: &PipelineResult) -> Result<(), Error> {
    let level = result.laminations.last().expect("depth ≥ 1");
    let base = stem.with_extension("");
    for (name, classes) in [("white", &level.white), ("black", &level.black), ("join", &level.join)] {
        let path = PathBuf::from(format!("{}-{name}.svg", base.display()));
        write(&path, &scene(classes, format!("{name}, depth {}", classes.depth)))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Validate(c) => {
            let spec = load(&c.path)?;
            let report = validate(&spec);
            print(&serde_json::to_value(&report).expect("serializable"));
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Matrix(c) => {
            let spec = load(&c.path)?;
            require_valid(&spec)?;
            let (matrix, lengths) = spectral_stage(&spec)?;
            print(&matrix_json(&matrix, &lengths));
            Ok(0)
        }
        Command::Parameters { common, branch } => {
            let spec = load(&common.path)?;
            require_valid(&spec)?;
            let (_, lengths) = spectral_stage(&spec)?;
            let (params, pullback) = parameter_stage(&spec, &lengths, branch)?;
            print(&parameters_json(&spec.marker_labels(), &params, &pullback));
            Ok(0)
        }
        Command::Unmate { common, branch, depth, svg } => {
            let spec = load(&common.path)?;
            let result = run_pipeline(&spec, PipelineOptions { branch, depth })?;
            if let Some(stem) = svg {
                svg_family(&stem, &result)?;
            }
            print(&result.to_json());
            Ok(0)
        }
        Command::Lamination { common, branch, depth, side, svg } => {
            let spec = load(&common.path)?;
            let result = run_pipeline(&spec, PipelineOptions { branch, depth })?;
            let classes = pick(&result, depth, side);
            if let Some(path) = svg {
                write(&path, &scene(&classes, format!("depth {}", classes.depth)))?;
            }
            print(&lamination_json(&classes));
            Ok(0)
        }
        Command::Render { common, branch, depth, side, svg } => {
            let spec = load(&common.path)?;
            let result = run_pipeline(&spec, PipelineOptions { branch, depth })?;
            let classes = pick(&result, depth, side);
            let text = scene(&classes, format!("depth {}", classes.depth));
            match svg {
                Some(path) => write(&path, &text)?,
                None => emit(text.trim_end()),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error [{}]: {e}", e.stage().name());
            ExitCode::from(exit_code(&e))
        }
    }
}

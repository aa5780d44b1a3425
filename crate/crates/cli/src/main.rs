use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hypmirror_cli::config::{parse_config, Format, Task};
use hypmirror_cli::{run, RunError};

#[derive(Parser, Debug)]
#[command(
    name = "hypmirror",
    version,
    about = "Mirror charts and checks for hypertoric varieties"
)]
struct Args {
    /// One of check, circuits, chambers, strata, mirror, atlas, verify, multiplicative, periods,
    /// or `run` for the config's task list.
    task: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["json", "text"])]
    format: Option<String>,
    #[arg(long)]
    svg: bool,
}

fn main_inner(args: &Args) -> Result<i32, RunError> {
    let text = fs::read_to_string(&args.config)?;
    let cfg = parse_config(&text)?;
    let tasks = if args.task == "run" {
        cfg.tasks.clone()
    } else {
        vec![args.task.parse::<Task>().map_err(RunError::Input)?]
    };
    let format = match args.format.as_deref() {
        Some("text") => Format::Text,
        Some(_) => Format::Json,
        None => cfg.output.format,
    };
    let out = args.out.clone().or_else(|| cfg.output.dir.clone());
    let svg = args.svg || cfg.output.svg;
    if svg && out.is_none() {
        return Err(RunError::Input(
            "figures need an output directory (--out)".to_string(),
        ));
    }
    let bundle = run(&cfg, &tasks, svg)?;
    match &out {
        Some(dir) => bundle.write_to(dir)?,
        None => print!("{}", bundle.render(format)),
    }
    for f in &bundle.failed {
        eprintln!("verification failed: {f}");
    }
    Ok(bundle.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pgas::scenario::{self, output::write_all, Format, Kind, RunError, RunOptions, ScenarioConfig, BUILTINS};

#[derive(Parser)]
#[command(name = "pgas", version, about = "Pressureless gas scenarios")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eulerian state at given points before blow-up.
    SmoothEval(Common),
    /// First blow-up time over a box.
    BlowupScan(Common),
    /// Critical points of φ and the genericity flags.
    GenericityReport(Common),
    /// Evolve a singular curve.
    CurveEvolve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["ck", "mol"])]
        solver: Option<String>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Tangential contact of two curves and the merged curve.
    InteractTangent(Common),
    /// Endpoint contact of two curves and the merged curve.
    InteractEndpoint(Common),
    /// Sticky particles or the accretion estimate.
    ParticlesRun(Common),
    /// List built-in scenarios, or print one's config.
    Scenarios {
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON scenario config.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Name of a built-in scenario.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall-clock time in the manifest.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn load(c: &Common) -> Result<ScenarioConfig, RunError> {
    match (&c.config, &c.scenario) {
        (Some(p), _) => ScenarioConfig::from_json(&std::fs::read_to_string(p)?),
        (None, Some(name)) => {
            scenario::builtin(name).ok_or_else(|| RunError::config("scenario", format!("no built-in scenario `{name}`")))
        }
        (None, None) => Err(RunError::config("config", "missing")),
    }
}

fn execute(c: &Common, allowed: &[Kind], edit: impl FnOnce(&mut ScenarioConfig)) -> Result<(), RunError> {
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::config("threads", e.to_string()))?;
    }
    let mut cfg = load(c)?;
    if !allowed.contains(&cfg.kind) {
        let want: Vec<_> = allowed.iter().map(|k| k.name()).collect();
        return Err(RunError::config("kind", format!("`{}` not accepted here, expected {}", cfg.kind.name(), want.join(" or "))));
    }
    edit(&mut cfg);
    let opts = RunOptions {
        format: match c.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
        seed: c.seed,
        timings: c.timings,
    };
    let out = scenario::run(&cfg, &opts)?;
    write_all(&c.out, &out.artifacts)?;
    for a in &out.artifacts {
        println!("{}", c.out.join(&a.file).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::SmoothEval(c) => execute(c, &[Kind::Smooth], |_| {}),
        Cmd::BlowupScan(c) => execute(c, &[Kind::Blowup], |_| {}),
        Cmd::GenericityReport(c) => execute(c, &[Kind::Genericity], |_| {}),
        Cmd::CurveEvolve {
            common,
            solver,
            order,
            dt,
            t_end,
        } => execute(common, &[Kind::Curve], |cfg| {
            let p = &mut cfg.params;
            if let Some(s) = solver {
                p["solver"] = s.as_str().into();
            }
            if let Some(n) = order {
                p["order"] = (*n).into();
            }
            if let Some(h) = dt {
                p["dt"] = (*h).into();
            }
            if let Some(t) = t_end {
                p["t_end"] = (*t).into();
            }
        }),
        Cmd::InteractTangent(c) => execute(c, &[Kind::InteractTangent], |_| {}),
        Cmd::InteractEndpoint(c) => execute(c, &[Kind::InteractEndpoint], |_| {}),
        Cmd::ParticlesRun(c) => execute(c, &[Kind::Particles, Kind::Accretion], |_| {}),
        Cmd::Scenarios { show: None } => {
            for b in BUILTINS {
                println!("{:<22} {:<18} {}", b.name, b.kind.name(), b.about);
            }
            Ok(())
        }
        Cmd::Scenarios { show: Some(name) } => match scenario::builtin(name) {
            Some(cfg) => {
                println!("{}", cfg.to_json());
                Ok(())
            }
            None => Err(RunError::config("scenario", format!("no built-in scenario `{name}`"))),
        },
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

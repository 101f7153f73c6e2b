use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use absprox::experiments::csv::{write_csv, write_text};
use absprox::experiments::named::{self, NAMED};
use absprox::experiments::{run_config, verify, ExperimentConfig, ExperimentRun};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "absprox", version, about = "Abstract-convex proximal methods")]
struct Cli {
    /// Promote theorem warnings to failures (also ABSPROX_STRICT=1).
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single config file.
    Run {
        config: PathBuf,
        /// Overrides the config's `output` key.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a built-in experiment across its gamma sweep.
    Reproduce {
        name: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Run only this gamma.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Check the reference oracles against the closed forms.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// List the built-in experiments.
    List,
}

fn strict_from_env() -> bool {
    env::var("ABSPROX_STRICT").is_ok_and(|v| v == "1" || v.eq_ignore_ascii_case("true"))
}

fn summary(run: &ExperimentRun) -> String {
    let last = run.result.last();
    format!(
        "gamma0={:<6} records={:<5} terminal={:?} f={:.9} warnings={}",
        run.config.gamma0,
        run.result.records.len(),
        run.result.terminal,
        last.f_value,
        run.result.warnings.len()
    )
}

fn save(run: &ExperimentRun, path: &Path) -> Result<(), String> {
    write_csv(&run.result, run.reference.as_ref(), path).map_err(|e| e.to_string())?;
    let report = path.with_extension("report.txt");
    write_text(&report, &run.report()).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict || strict_from_env();
    match cli.command {
        Command::List => {
            for e in NAMED {
                let gammas: Vec<String> = e.gammas.iter().map(|g| g.to_string()).collect();
                println!("{:<22} gamma in {{{}}}  {}", e.name, gammas.join(", "), e.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, output } => {
            let text = match fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(errors) => {
                    for e in errors {
                        eprintln!("{}: {e}", config.display());
                    }
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let run = match run_config(&cfg, strict) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("run failed: {e}");
                    return ExitCode::from(EXIT_RUNTIME);
                }
            };
            println!("{}", summary(&run));
            for w in &run.result.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(path) = output.or_else(|| cfg.output.clone()) {
                if let Err(e) = save(&run, &path) {
                    eprintln!("{e}");
                    return ExitCode::FAILURE;
                }
            }
            ExitCode::SUCCESS
        }
        Command::Reproduce { name, out_dir, gamma } => {
            let Some(exp) = named::find(&name) else {
                eprintln!("unknown experiment `{name}`; known: {}", named::names().join(", "));
                return ExitCode::from(EXIT_CONFIG);
            };
            let runs = match gamma {
                Some(g) => vec![(g, run_config(&exp.config_for(g), strict))],
                None => exp.run(strict),
            };
            let mut code = ExitCode::SUCCESS;
            for (g, run) in runs {
                match run {
                    Ok(run) => {
                        println!("{name} {}", summary(&run));
                        let path = out_dir.join(format!("{name}_gamma{g}.csv"));
                        if let Err(e) = save(&run, &path) {
                            eprintln!("{e}");
                            code = ExitCode::FAILURE;
                        }
                    }
                    Err(e) => {
                        eprintln!("{name} gamma0={g}: {e}");
                        code = ExitCode::from(EXIT_RUNTIME);
                    }
                }
            }
            code
        }
        Command::Verify { seed } => match verify::run_all(seed) {
            Ok(checks) => {
                let mut ok = true;
                for c in &checks {
                    println!("{} {:<22} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                    ok &= c.pass;
                }
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_RUNTIME)
                }
            }
            Err(e) => {
                eprintln!("verify failed: {e}");
                ExitCode::from(EXIT_RUNTIME)
            }
        },
    }
}

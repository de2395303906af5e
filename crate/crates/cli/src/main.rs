use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wsms_crb_cli::sweep::sweep_base;
use wsms_crb_cli::validate::{all_passed, run_all, write_report};
use wsms_crb_cli::{figure_records, run_point, run_sweep, write_csv, ConfigMap, Figure, ScenarioConfig, SweepSpec};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Cramer-Rao bounds for near-field angle and range estimation with
/// widely spaced multi-subarray transmitters.
#[derive(Parser)]
#[command(name = "wsms-crb", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bound for a single scenario.
    Crb(ScenarioArgs),
    /// Bounds along one swept parameter.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Swept key: r, theta, I or K
        #[arg(long)]
        axis: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<String>,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Data behind one of the preset figures (fig3 to fig9).
    Figure {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the invariant suite and reports one row per check.
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Scenario keys. Flags override values read from `--config`.
#[derive(Args)]
struct ScenarioArgs {
    /// Flat `key = value` scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    frequency_hz: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long = "I")]
    i: Option<String>,
    #[arg(long = "N_r")]
    n_r: Option<String>,
    #[arg(long = "R")]
    big_r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    vartheta: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    layout: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long = "r")]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
}

impl ScenarioArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 14] {
        [
            ("frequency_hz", &self.frequency_hz),
            ("snr_db", &self.snr_db),
            ("alpha", &self.alpha),
            ("K", &self.k),
            ("M", &self.m),
            ("I", &self.i),
            ("N_r", &self.n_r),
            ("R", &self.big_r),
            ("vartheta", &self.vartheta),
            ("model", &self.model),
            ("layout", &self.layout),
            ("method", &self.method),
            ("r", &self.r),
            ("theta", &self.theta),
        ]
    }

    /// File values first, then flags on top.
    fn map(&self, extra: &[(&'static str, &Option<String>)]) -> Result<ConfigMap, String> {
        let mut map = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                ConfigMap::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
            }
            None => ConfigMap::default(),
        };
        for (k, v) in self.overrides().iter().chain(extra) {
            if let Some(v) = v {
                map.set(k, v.as_str());
            }
        }
        Ok(map)
    }
}

fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

enum Failure {
    Config(String),
    Checks,
}

fn emit(out: Option<&Path>, f: impl FnOnce(Box<dyn Write>) -> csv::Result<()>) -> Result<(), Failure> {
    let w = open(out).map_err(|e| Failure::Config(format!("{}: {e}", out.unwrap_or(Path::new("-")).display())))?;
    f(w).map_err(|e| Failure::Config(format!("writing output: {e}")))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    let cfg = |e: wsms_crb_cli::ConfigError| Failure::Config(e.to_string());
    match cmd {
        Cmd::Crb(args) => {
            let map = args.map(&[]).map_err(Failure::Config)?;
            let c = ScenarioConfig::from_map(&map).map_err(cfg)?;
            let rec = run_point(&c);
            emit(args.out.as_deref(), |w| write_csv(std::slice::from_ref(&rec), w))?;
            if let Some(code) = rec.error_code {
                eprintln!("error: {code}");
                return Err(Failure::Checks);
            }
            Ok(())
        }
        Cmd::Sweep { scenario, axis, start, stop, steps } => {
            let extra = [("axis", &axis), ("start", &start), ("stop", &stop), ("steps", &steps)];
            let map = scenario.map(&extra).map_err(Failure::Config)?;
            let spec = SweepSpec::from_map(&map).map_err(cfg)?;
            let base = sweep_base(&map, &spec).map_err(cfg)?;
            emit(scenario.out.as_deref(), |w| write_csv(&run_sweep(&base, &spec), w))
        }
        Cmd::Figure { name, out } => {
            let fig: Figure = name.parse().map_err(cfg)?;
            emit(out.as_deref(), |w| write_csv(&figure_records(fig), w))
        }
        Cmd::Validate { out } => {
            let checks = run_all();
            emit(out.as_deref(), |w| write_report(&checks, w))?;
            for c in checks.iter().filter(|c| c.status.as_str() == "fail") {
                eprintln!("failed: {} (worst {:e}, tolerance {:e})", c.name, c.worst, c.tolerance);
            }
            if all_passed(&checks) {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

//! Argument handling and dispatch.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use squeezelab::homodyne::ReferenceMode;
use thiserror::Error;

use crate::commands;
use crate::config::{is_scenario_key, ConfigError, Scenario, ASSUMPTIONS};
use crate::output::{write_artifact, Artifact};

#[derive(Debug, Parser)]
#[command(
    name = "squeezelab",
    version,
    about = "Bright phase-squeezed light: models, simulated traces and capacity bounds"
)]
#[command(after_help = "Any scenario key can be overridden as --section.key VALUE (e.g. --trace.sweeps 20).")]
struct Cli {
    /// Scenario file (`section.key = value` lines) applied over the built-in preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mode spacing, finesse, linewidth, threshold and escape efficiency.
    Cavity,
    /// Analytic detected spectra on the configured grid.
    Spectrum,
    /// Remove the bright-beam offset from an observed squeezing ratio.
    Correct {
        #[arg(long, allow_hyphen_values = true)]
        observed_db: f64,
        /// P_OPA / P_LO; defaults to the scenario's homodyne powers.
        #[arg(long, allow_hyphen_values = true)]
        power_ratio: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Blocked)]
        mode: Mode,
    },
    /// Tone under coherent versus squeezed reference, synthesized.
    Interfere,
    /// Synthesized antisqueezed, shot, squeezed and electronic noise PSDs.
    Trace,
    /// Capacity bounds versus mean photon number.
    Capacity {
        /// Squeezing parameter; shorthand for --capacity.squeeze_r.
        #[arg(long = "r", allow_hyphen_values = true)]
        r: Option<f64>,
    },
    /// Print the preset scenario as a config file.
    Preset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Blocked,
    EqualPower,
}

impl From<Mode> for ReferenceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Blocked => ReferenceMode::Blocked,
            Mode::EqualPower => ReferenceMode::EqualPower,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<squeezelab::Error> for CliError {
    fn from(e: squeezelab::Error) -> Self {
        match e {
            squeezelab::Error::InvalidParameter { .. } => CliError::Config(e.into()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

/// `(key, value)` pairs from `--section.key` flags.
pub type Overrides = Vec<(String, String)>;

/// Pulls `--section.key value` and `--section.key=value` pairs out of argv.
pub fn split_overrides(args: Vec<OsString>) -> Result<(Vec<OsString>, Overrides), ConfigError> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(flag) = a
            .to_str()
            .and_then(|s| s.strip_prefix("--"))
            .filter(|s| s.contains('.'))
        else {
            rest.push(a);
            continue;
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .and_then(|v| v.into_string().ok())
                    .ok_or_else(|| ConfigError::BadValue {
                        key: flag.to_string(),
                        value: String::new(),
                        reason: "missing value".into(),
                    })?;
                (flag.to_string(), v)
            }
        };
        if !is_scenario_key(&key) {
            return Err(ConfigError::UnknownKey(key));
        }
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}

fn load_scenario(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Scenario, ConfigError> {
    let mut s = Scenario::reference_preset();
    if let Some(p) = path {
        let text = fs::read_to_string(p).map_err(|e| ConfigError::Io {
            path: p.display().to_string(),
            reason: e.to_string(),
        })?;
        s.apply_text(&text)?;
    }
    for (k, v) in overrides {
        s.set(k, v)?;
    }
    Ok(s)
}

/// Runs the CLI on `argv` (including the program name); returns the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let (args, overrides) = match split_overrides(argv.into_iter().collect()) {
        Ok(v) => v,
        Err(e) => return report(CliError::Config(e)),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli, &overrides) {
        Ok(()) => 0,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn execute(cli: Cli, overrides: &[(String, String)]) -> Result<(), CliError> {
    let mut scenario = load_scenario(cli.config.as_deref(), overrides)?;
    if let Command::Capacity { r: Some(r) } = cli.command {
        scenario.capacity.squeeze_r = r;
    }
    scenario.validate()?;

    let (summary, artifact) = match cli.command {
        Command::Preset => {
            for (k, why) in ASSUMPTIONS {
                println!("# assumption: {k}: {why}");
            }
            print!("{}", scenario.to_text());
            return Ok(());
        }
        Command::Cavity => {
            let r = commands::cavity_report(&scenario)?;
            (r.summary(), artifact("cavity", r.csv()))
        }
        Command::Spectrum => {
            let traces = commands::analytic_spectra(&scenario)?;
            let sq = &traces[0];
            let (lo_f, lo_v) = sq
                .iter()
                .fold((0.0, f64::INFINITY), |a, (f, v)| if v < a.1 { (f, v) } else { a });
            (
                format!(
                    "{} points; deepest squeezing {lo_v:.2} dB at {:.2} MHz\n",
                    sq.len(),
                    lo_f / 1e6
                ),
                artifact("spectrum", commands::csv_of_traces(&traces)),
            )
        }
        Command::Correct {
            observed_db,
            power_ratio,
            mode,
        } => {
            let p = power_ratio.unwrap_or_else(|| scenario.homodyne.power_ratio());
            let corrected = commands::correct(observed_db, p, mode.into())?;
            let mode_name = format!("{mode:?}");
            let csv = format!("observed_db,power_ratio,mode,corrected_db\n{observed_db},{p},{mode_name},{corrected}\n");
            let mut a = artifact("correct", csv);
            a.args = vec![
                ("observed_db".into(), observed_db.to_string()),
                ("power_ratio".into(), p.to_string()),
                ("mode".into(), mode_name),
            ];
            (format!("{corrected:.2} dB\n"), a)
        }
        Command::Interfere => {
            let r = commands::interfere(&scenario)?;
            let csv = commands::csv_of_traces(&[r.coherent.clone(), r.squeezed.clone()]);
            (r.summary(), artifact("interfere", csv))
        }
        Command::Trace => {
            let traces = commands::figure_traces(&scenario)?;
            let mut summary = String::new();
            for t in &traces {
                let st = commands::floor_stats(t, 11.5e6, 8.5e6, 0.0);
                summary += &format!(
                    "{:<24} mean {:7.2} dB over 3-20 MHz\n",
                    t.label.to_string(),
                    st.floor_db
                );
            }
            (summary, artifact("trace", commands::csv_of_traces(&traces)))
        }
        Command::Capacity { .. } => {
            let curves = commands::capacity_curves(&scenario)?;
            let mut summary = String::new();
            for c in &curves {
                if let Some(Some(v)) = c.capacities.last() {
                    summary += &format!(
                        "{:<30} {v:.3} bits at nbar = {}\n",
                        c.bound_kind.to_string(),
                        scenario.capacity.nbar_max
                    );
                }
            }
            (summary, artifact("capacity", commands::capacity_csv(&curves)))
        }
    };
    print!("{summary}");
    let (csv, meta) = write_artifact(&cli.out, &scenario, &artifact)?;
    log::info!("wrote {} and {}", csv.display(), meta.display());
    println!("wrote {}", csv.display());
    Ok(())
}

fn artifact(subcommand: &'static str, csv: String) -> Artifact {
    Artifact {
        subcommand,
        csv,
        args: Vec::new(),
    }
}

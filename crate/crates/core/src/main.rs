use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use darktripod::figures::{self, OracleSweep, PropagateSpec, RunManifest, Table};
use darktripod::grid::{parse_list, parse_value, UniformGrid};
use darktripod::propagation::GaussianSpec;
use darktripod::susceptibility::Channels;
use darktripod::{config, Error, ErrorKind, SystemConfig};

#[derive(Parser)]
#[command(name = "darktripod", version, about = "Dark-state tripod EIT calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// `key = value` configuration file; missing keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path. A `<out>.manifest.json` is written next to it.
    /// Without it the table goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Mixing angle(s), comma separated; accepts `pi/8` style values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Uniform grid `lo:hi:n` along the primary axis of the subcommand.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Coupling strengths `tan^2 phi`, comma separated.
    #[arg(long, global = true)]
    tan2phi: Option<String>,
    /// Apply the local-field correction.
    #[arg(long, global = true)]
    local_field: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum ChannelArg {
    Both,
    Probe,
}

impl From<ChannelArg> for Channels {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Both => Channels::Both,
            ChannelArg::Probe => Channels::ProbeResonance,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dark-state weights f and g against theta (`--grid` is the theta grid).
    Fig2 {
        #[command(flatten)]
        common: Common,
    },
    /// Susceptibility against detuning for several mixing angles.
    Fig3 {
        #[command(flatten)]
        common: Common,
    },
    /// Group velocity against theta (`--grid` is the theta grid).
    Fig4 {
        #[command(flatten)]
        common: Common,
    },
    /// Local-field corrected permittivity of the dense gas.
    Fig5 {
        #[command(flatten)]
        common: Common,
    },
    /// Detuning scan at a single mixing angle.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        channels: ChannelArg,
    },
    /// Gaussian pulse through a slab of the medium.
    Propagate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        channels: ChannelArg,
        /// Slab length in units of c/gamma.
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        /// Gaussian width in units of 1/gamma.
        #[arg(long, default_value_t = GaussianSpec::default().sigma_t)]
        sigma_t: f64,
        /// Number of time samples.
        #[arg(long, default_value_t = GaussianSpec::default().points)]
        points: usize,
        /// Carrier detuning from the probe resonance.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        carrier_delta1: f64,
    },
    /// Compare the closed form against the Bloch-equation oracle.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = OracleSweep::default().points)]
        points: usize,
        #[arg(long, default_value_t = OracleSweep::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = 1.0, hide = true)]
        k_factor: f64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::BadArgument => 2,
        ErrorKind::PhysicsDomain => 3,
        ErrorKind::NonConvergence => 4,
        ErrorKind::Io => 1,
    }
}

fn load_config(common: &Common, base: SystemConfig) -> darktripod::Result<SystemConfig> {
    match &common.config {
        Some(path) => config::parse_with_base(&std::fs::read_to_string(path)?, base),
        None => Ok(base),
    }
}

fn grid_or(common: &Common, default: UniformGrid) -> darktripod::Result<UniformGrid> {
    common.grid.as_deref().map_or(Ok(default), str::parse)
}

fn thetas_or(common: &Common, default: Vec<f64>) -> darktripod::Result<Vec<f64>> {
    common.theta.as_deref().map_or(Ok(default), parse_list)
}

fn single_theta(common: &Common, cfg: &SystemConfig) -> darktripod::Result<SystemConfig> {
    match common.theta.as_deref() {
        Some(t) => {
            let cfg = cfg.with_theta(parse_value(t)?);
            cfg.validate()?;
            Ok(cfg)
        }
        None => Ok(*cfg),
    }
}

fn write_atomic(path: &Path, contents: &str) -> darktripod::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

struct Output {
    name: &'static str,
    config: SystemConfig,
    grids: serde_json::Value,
    seeds: Vec<u64>,
    table: Table,
    summary: Option<serde_json::Value>,
}

fn run(command: Command) -> darktripod::Result<(Output, Option<PathBuf>)> {
    let out = match command {
        Command::Fig2 { common } => {
            let grid = grid_or(&common, figures::default_theta_grid())?;
            let fig = figures::cmd_fig2(&grid.points())?;
            (
                Output {
                    name: "fig2",
                    config: load_config(&common, SystemConfig::cold_gas())?,
                    grids: json!({ "theta": grid }),
                    seeds: vec![],
                    table: fig.table,
                    summary: Some(json!({ "min_f": fig.min_f, "min_g": fig.min_g })),
                },
                common.out,
            )
        }
        Command::Fig3 { common } => {
            let cfg = load_config(&common, SystemConfig::cold_gas())?;
            let grid = grid_or(&common, figures::default_delta_grid())?;
            let thetas = thetas_or(&common, figures::default_fig3_thetas())?;
            let table = figures::cmd_fig3(&cfg, &grid.points(), &thetas)?;
            (
                Output {
                    name: "fig3",
                    config: cfg,
                    grids: json!({ "delta1": grid, "theta": thetas }),
                    seeds: vec![],
                    table,
                    summary: None,
                },
                common.out,
            )
        }
        Command::Fig4 { common } => {
            let grid = grid_or(&common, figures::default_theta_grid())?;
            let tan2phi = match common.tan2phi.as_deref() {
                Some(s) => parse_list(s)?,
                None => figures::DEFAULT_TAN2PHI.to_vec(),
            };
            let table = figures::cmd_fig4(&grid.points(), &tan2phi)?;
            (
                Output {
                    name: "fig4",
                    config: load_config(&common, SystemConfig::cold_gas())?,
                    grids: json!({ "theta": grid, "tan2phi": tan2phi }),
                    seeds: vec![],
                    table,
                    summary: None,
                },
                common.out,
            )
        }
        Command::Fig5 { common } => {
            let cfg = load_config(&common, SystemConfig::dense_gas())?;
            let grid = grid_or(&common, figures::default_delta_grid())?;
            let thetas = thetas_or(&common, figures::default_fig5_thetas())?;
            let table = figures::cmd_fig5(&cfg, &grid.points(), &thetas)?;
            (
                Output {
                    name: "fig5",
                    config: cfg,
                    grids: json!({ "delta1": grid, "theta": thetas }),
                    seeds: vec![],
                    table,
                    summary: None,
                },
                common.out,
            )
        }
        Command::Scan { common, channels } => {
            let cfg = single_theta(&common, &load_config(&common, SystemConfig::cold_gas())?)?;
            let grid = grid_or(&common, figures::default_delta_grid())?;
            let table =
                figures::cmd_scan(&cfg, &grid.points(), common.local_field, channels.into())?;
            (
                Output {
                    name: "scan",
                    config: cfg,
                    grids: json!({ "delta1": grid, "channels": Channels::from(channels) }),
                    seeds: vec![],
                    table,
                    summary: None,
                },
                common.out,
            )
        }
        Command::Propagate {
            common,
            channels,
            length,
            sigma_t,
            points,
            carrier_delta1,
        } => {
            let cfg = single_theta(&common, &load_config(&common, SystemConfig::cold_gas())?)?;
            let spec = PropagateSpec {
                pulse: GaussianSpec {
                    sigma_t,
                    points,
                    carrier_delta1,
                    ..GaussianSpec::default()
                },
                length,
                local_field: common.local_field,
                channels: channels.into(),
            };
            let report = figures::cmd_propagate(&cfg, &spec)?;
            (
                Output {
                    name: "propagate",
                    config: cfg,
                    grids: json!({ "propagate": spec }),
                    seeds: vec![],
                    table: report.table,
                    summary: Some(serde_json::to_value(report.summary).expect("plain data")),
                },
                common.out,
            )
        }
        Command::OracleCheck {
            common,
            points,
            seed,
            k_factor,
        } => {
            let cfg = load_config(&common, SystemConfig::cold_gas())?;
            let sweep = OracleSweep {
                points,
                seed,
                k_factor,
                ..OracleSweep::default()
            };
            let report = figures::cmd_oracle_check(&cfg, &sweep)?;
            if !report.summary.pass {
                eprintln!(
                    "oracle-check FAILED: {}",
                    serde_json::to_string(&report.summary).expect("plain data")
                );
            }
            (
                Output {
                    name: "oracle-check",
                    config: cfg,
                    grids: json!({ "sweep": sweep }),
                    seeds: vec![seed],
                    table: report.table,
                    summary: Some(serde_json::to_value(report.summary).expect("plain data")),
                },
                common.out,
            )
        }
    };
    Ok(out)
}

fn emit(output: Output, out: Option<PathBuf>, started: Instant) -> darktripod::Result<()> {
    let csv = output.table.to_csv();
    let Some(path) = out else {
        print!("{csv}");
        if let Some(s) = &output.summary {
            eprintln!("{s}");
        }
        return Ok(());
    };
    write_atomic(&path, &csv)?;
    let manifest_path = PathBuf::from(format!("{}.manifest.json", path.display()));
    let manifest = RunManifest {
        subcommand: output.name.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: output.config,
        grids: output.grids,
        outputs: vec![path.display().to_string(), manifest_path.display().to_string()],
        seeds: output.seeds,
        duration_s: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("plain data") + "\n";
    if let Err(e) = write_atomic(&manifest_path, &text) {
        let _ = std::fs::remove_file(&path);
        return Err(e);
    }
    if let Some(s) = &output.summary {
        println!("{s}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let oracle = matches!(cli.command, Command::OracleCheck { .. });
    match run(cli.command).and_then(|(output, out)| {
        let failed = oracle
            && output
                .summary
                .as_ref()
                .and_then(|s| s["pass"].as_bool())
                == Some(false);
        emit(output, out, started).map(|()| failed)
    }) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

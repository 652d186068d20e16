//! Command-line front end.
//!
//! ```text
//! spinboson <rates|evolve|unravel|recoherence-map|blp> [--config PATH] [--epsilon-over-delta X]
//!     [--omega0-over-omegac X] [--alpha X] [--t-max X] [--dt X] [--n-traj N] [--seed N]
//!     [--out PATH] [--stride N] [--workers N] [--blp-pairs N] [--ratio-max X]
//!     [--ratio-steps N] [--initial-theta X] [--initial-phi X] [--print-config]
//! ```
//!
//! Flags override values from the config file, which override the defaults
//! of [`RunConfig`]. Exit codes: `0` success, `2` configuration error, `3`
//! numerical error.

mod commands;
mod config;

pub use commands::{
    blp, evolve, rates, recoherence_map, unravel, BLP_HEADER, EVOLVE_HEADER, RATES_HEADER, RECOHERENCE_HEADER,
    UNRAVEL_HEADER,
};
pub use config::{RunConfig, DEFAULT_UNRAVEL_DT};

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "spinboson",
    version,
    about = "Spin-boson decay rates, reduced dynamics and quantum jump unraveling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Decay rates on the time grid.
    Rates,
    /// Density matrix from the analytic map.
    Evolve,
    /// Density matrix estimated from the jump unraveling.
    Unravel,
    /// Where the coherence grows, over an ε/Δ × t grid.
    RecoherenceMap,
    /// Trace-distance non-Markovianity measure over an ε/Δ grid.
    Blp,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// `key = value` file applied before the flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub epsilon_over_delta: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub omega0_over_omegac: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub n_traj: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub stride: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub blp_pairs: Option<usize>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub ratio_max: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub ratio_steps: Option<usize>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub initial_theta: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    pub initial_phi: Option<f64>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

impl Options {
    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.merge_file(path)?;
        }
        macro_rules! apply {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$field = v.clone(); })*
            };
        }
        apply!(
            epsilon_over_delta => epsilon_over_delta,
            omega0_over_omegac => omega0_over_omegac,
            alpha => alpha,
            t_max => t_max,
            n_traj => n_traj,
            seed => seed,
            stride => emit_stride,
            blp_pairs => blp_pairs,
            ratio_max => ratio_max,
            ratio_steps => ratio_steps,
            initial_theta => initial_theta,
            initial_phi => initial_phi,
        );
        if self.dt.is_some() {
            cfg.dt = self.dt;
        }
        if self.out.is_some() {
            cfg.output_path = self.out.clone();
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_output(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output_path {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                Error::Config(format!("cannot create {}: {e}", path.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one command with a resolved configuration.
pub fn run_command(command: Command, cfg: &RunConfig) -> Result<()> {
    let run = || -> Result<()> {
        let mut out = open_output(cfg)?;
        match command {
            Command::Rates => rates(cfg, &mut out)?,
            Command::Evolve => evolve(cfg, &mut out)?,
            Command::Unravel => unravel(cfg, &mut out)?,
            Command::RecoherenceMap => recoherence_map(cfg, &mut out)?,
            Command::Blp => {
                let measure = blp(cfg, &mut out)?;
                let summary = format!(
                    "blp_measure at epsilon_over_delta = {}: {measure:.11e}",
                    cfg.epsilon_over_delta
                );
                // keep standard output pure CSV when the table goes there
                if cfg.output_path.is_some() {
                    println!("{summary}");
                } else {
                    eprintln!("{summary}");
                }
            }
        }
        out.flush()
            .map_err(|e| Error::Config(format!("cannot write output: {e}")))
    };
    match cfg.workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {w} worker threads: {e}")))?
            .install(run),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = cli.options.resolve().and_then(|cfg| {
        if cli.options.print_config {
            print!("{}", cfg.to_config_string());
            return Ok(());
        }
        log::info!("running {:?} with\n{}", cli.command, cfg.to_config_string());
        run_command(cli.command, &cfg)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "alpha = 0.05\nseed = 4\n").unwrap();
        let cli = Cli::try_parse_from([
            "spinboson",
            "unravel",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "9",
            "--stride",
            "3",
        ])
        .unwrap();
        assert_eq!(cli.command, Command::Unravel);
        let cfg = cli.options.resolve().unwrap();
        assert_eq!((cfg.alpha, cfg.seed, cfg.emit_stride), (0.05, 9, 3));
    }

    #[test]
    fn command_names() {
        for (name, command) in [
            ("rates", Command::Rates),
            ("evolve", Command::Evolve),
            ("unravel", Command::Unravel),
            ("recoherence-map", Command::RecoherenceMap),
            ("blp", Command::Blp),
        ] {
            assert_eq!(Cli::try_parse_from(["spinboson", name]).unwrap().command, command);
        }
        assert!(Cli::try_parse_from(["spinboson", "plot"]).is_err());
    }

    #[test]
    fn rates_csv_shape() {
        let cfg = RunConfig {
            t_max: 1.0,
            ..RunConfig::default()
        };
        let mut buf = Vec::new();
        rates(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RATES_HEADER.join(","));
        // step 0.005, stride 10
        assert_eq!(lines.len(), 1 + 21);
        assert!(lines[1].starts_with("0.00000000000e0,"));
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 8));
    }
}

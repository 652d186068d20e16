use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::MIN_BLP_PAIRS;
use crate::dynamics::{fitting_step, grid_steps};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::nmqj::{PureState, UnravelConfig, MIN_TRAJECTORIES};

/// Time step of `unravel` when none is given, in units of `1/ω_c`.
pub const DEFAULT_UNRAVEL_DT: f64 = 1e-3;

/// Effective run configuration, from defaults, then a `key = value` file,
/// then command-line flags.
///
/// | key | meaning | default |
/// |-----|---------|---------|
/// | `epsilon_over_delta` | bias over tunnelling `ε/Δ` | `1/(2√3)` |
/// | `omega0_over_omegac` | `ω₀/ω_c` | `10` |
/// | `alpha` | coupling | `0.01` |
/// | `t_max` | end time, `1/ω_c` | `10` |
/// | `dt` | step; `unravel` uses `1e-3`, other commands the rate step | unset |
/// | `n_traj` | ensemble size | `10000` |
/// | `seed` | master seed | `0` |
/// | `output_path` (`out`) | CSV destination; standard output if unset | unset |
/// | `emit_stride` (`stride`) | keep every n-th grid time | `10` |
/// | `workers` | worker threads | all cores |
/// | `blp_pairs` | antipodal pairs searched by `blp` | `64` |
/// | `ratio_max`, `ratio_steps` | `ε/Δ` grid `0..=ratio_max` of `recoherence-map` and `blp` | `0.5`, `51` |
/// | `initial_theta`, `initial_phi` | Bloch angles of the initial state | `π/2`, `0` |
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub epsilon_over_delta: f64,
    pub omega0_over_omegac: f64,
    pub alpha: f64,
    pub t_max: f64,
    pub dt: Option<f64>,
    pub n_traj: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub emit_stride: usize,
    pub workers: Option<usize>,
    pub blp_pairs: usize,
    pub ratio_max: f64,
    pub ratio_steps: usize,
    pub initial_theta: f64,
    pub initial_phi: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon_over_delta: 1.0 / (2.0 * 3f64.sqrt()),
            omega0_over_omegac: 10.0,
            alpha: 0.01,
            t_max: 10.0,
            dt: None,
            n_traj: 10_000,
            seed: 0,
            output_path: None,
            emit_stride: 10,
            workers: None,
            blp_pairs: crate::dynamics::DEFAULT_BLP_PAIRS,
            ratio_max: 0.5,
            ratio_steps: 51,
            initial_theta: std::f64::consts::FRAC_PI_2,
            initial_phi: 0.0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse {value:?}: {e}")))
}

impl RunConfig {
    /// Sets one key. `out` and `stride` are accepted as short names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "epsilon_over_delta" => self.epsilon_over_delta = parse(key, value)?,
            "omega0_over_omegac" => self.omega0_over_omegac = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "t_max" => self.t_max = parse(key, value)?,
            "dt" => self.dt = Some(parse(key, value)?),
            "n_traj" => self.n_traj = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "output_path" | "out" => self.output_path = Some(PathBuf::from(value)),
            "emit_stride" | "stride" => self.emit_stride = parse(key, value)?,
            "workers" => self.workers = Some(parse(key, value)?),
            "blp_pairs" => self.blp_pairs = parse(key, value)?,
            "ratio_max" => self.ratio_max = parse(key, value)?,
            "ratio_steps" => self.ratio_steps = parse(key, value)?,
            "initial_theta" => self.initial_theta = parse(key, value)?,
            "initial_phi" => self.initial_phi = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        let mut seen = HashSet::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got {line:?}", number + 1)))?;
            let key = match key.trim() {
                "out" => "output_path",
                "stride" => "emit_stride",
                k => k,
            };
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", number + 1)));
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.merge_str(&text)
    }

    /// `key = value` lines that [`RunConfig::parse_str`] turns back into `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("epsilon_over_delta", &self.epsilon_over_delta);
        line("omega0_over_omegac", &self.omega0_over_omegac);
        line("alpha", &self.alpha);
        line("t_max", &self.t_max);
        if let Some(dt) = self.dt {
            line("dt", &dt);
        }
        line("n_traj", &self.n_traj);
        line("seed", &self.seed);
        if let Some(path) = &self.output_path {
            line("output_path", &path.display());
        }
        line("emit_stride", &self.emit_stride);
        if let Some(w) = self.workers {
            line("workers", &w);
        }
        line("blp_pairs", &self.blp_pairs);
        line("ratio_max", &self.ratio_max);
        line("ratio_steps", &self.ratio_steps);
        line("initial_theta", &self.initial_theta);
        line("initial_phi", &self.initial_phi);
        s
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::from_ratios(self.epsilon_over_delta, self.omega0_over_omegac, self.alpha)
    }

    pub fn initial_state(&self) -> Result<PureState> {
        PureState::from_angles(self.initial_theta, self.initial_phi)
    }

    fn checked_step(&self, dt: f64) -> Result<f64> {
        grid_steps(self.t_max, dt).map_err(|e| Error::Config(format!("`dt`/`t_max`: {e}")))?;
        Ok(dt)
    }

    /// Grid step of the deterministic commands.
    pub fn rate_step(&self) -> Result<f64> {
        let dt = match self.dt {
            Some(dt) => dt,
            None => fitting_step(self.t_max, self.params()?.default_rate_step()),
        };
        self.checked_step(dt)
    }

    pub fn unravel_step(&self) -> Result<f64> {
        self.checked_step(self.dt.unwrap_or(DEFAULT_UNRAVEL_DT))
    }

    /// `ε/Δ` values `0, ratio_max/(steps-1), ..., ratio_max`.
    pub fn ratio_grid(&self) -> Vec<f64> {
        if self.ratio_steps == 1 {
            return vec![0.0];
        }
        (0..self.ratio_steps)
            .map(|i| self.ratio_max * i as f64 / (self.ratio_steps - 1) as f64)
            .collect()
    }

    pub fn unravel_config(&self) -> Result<UnravelConfig> {
        Ok(UnravelConfig {
            n_traj: self.n_traj,
            t_max: self.t_max,
            dt: self.unravel_step()?,
            seed: self.seed,
            stride: self.emit_stride,
            workers: self.workers,
            initial: self.initial_state()?,
        })
    }

    /// Checks everything that does not depend on the command.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.initial_state()?;
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "`t_max` must be finite and > 0, got {}",
                self.t_max
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("`dt` must be finite and > 0, got {dt}")));
            }
            self.checked_step(dt)?;
        }
        if self.n_traj < MIN_TRAJECTORIES {
            return Err(Error::Config(format!(
                "`n_traj` must be at least {MIN_TRAJECTORIES}, got {}",
                self.n_traj
            )));
        }
        if self.emit_stride == 0 {
            return Err(Error::Config("`emit_stride` must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("`workers` must be at least 1".into()));
        }
        if self.blp_pairs < MIN_BLP_PAIRS {
            return Err(Error::Config(format!(
                "`blp_pairs` must be at least {MIN_BLP_PAIRS}, got {}",
                self.blp_pairs
            )));
        }
        if !(self.ratio_max >= 0.0 && self.ratio_max.is_finite()) {
            return Err(Error::Config(format!(
                "`ratio_max` must be finite and >= 0, got {}",
                self.ratio_max
            )));
        }
        if self.ratio_steps == 0 {
            return Err(Error::Config("`ratio_steps` must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig {
            dt: Some(0.1 + 0.2),
            output_path: Some("out dir/run.csv".into()),
            workers: Some(3),
            seed: u64::MAX,
            ..RunConfig::default()
        };
        cfg.t_max = 0.9;
        let text = cfg.to_config_string();
        assert_eq!(RunConfig::parse_str(&text).unwrap(), cfg);
        let default = RunConfig::default();
        assert_eq!(RunConfig::parse_str(&default.to_config_string()).unwrap(), default);
    }

    #[test]
    fn comments_aliases_and_errors() {
        let cfg = RunConfig::parse_str("# header\nalpha = 0.02 # weak\n\nstride=5\nout = x.csv\n").unwrap();
        assert_eq!(cfg.alpha, 0.02);
        assert_eq!(cfg.emit_stride, 5);
        assert_eq!(cfg.output_path, Some(PathBuf::from("x.csv")));
        for bad in [
            "alpha 0.1",
            "beta = 1",
            "alpha = x",
            "alpha = 1\nalpha = 2",
            "stride = 1\nemit_stride = 2",
        ] {
            assert!(matches!(RunConfig::parse_str(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        let bad = |f: &dyn Fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(matches!(bad(&|c| c.alpha = -1.0), Error::Param { name: "alpha", .. }));
        assert!(matches!(bad(&|c| c.dt = Some(0.3)), Error::Config(_)));
        assert!(matches!(bad(&|c| c.n_traj = 5), Error::Config(_)));
        assert!(matches!(bad(&|c| c.blp_pairs = 4), Error::Config(_)));
        assert_eq!(bad(&|c| c.omega0_over_omegac = 0.0).exit_code(), 2);
    }

    #[test]
    fn steps_and_ratio_grid() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.rate_step().unwrap(), 0.005);
        assert_eq!(cfg.unravel_step().unwrap(), 1e-3);
        let g = cfg.ratio_grid();
        assert_eq!((g.len(), g[0], g[50]), (51, 0.0, 0.5));
    }
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use lhvlab_core::Tolerances;

pub const SEED_ENV: &str = "LHVLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// RNG seed; the LHVLAB_SEED environment variable takes precedence
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Reproduction tolerance for |model integral - trace|
    #[arg(long = "tol", default_value_t = 1e-9)]
    pub tol_repro: f64,

    #[arg(long, default_value_t = Tolerances::DEFAULT.herm)]
    pub tol_herm: f64,

    #[arg(long, default_value_t = Tolerances::DEFAULT.measure)]
    pub tol_measure: f64,

    #[arg(long, default_value_t = Tolerances::DEFAULT.null)]
    pub tol_null: f64,

    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tol_herm: f64,
    pub tol_measure: f64,
    pub tol_null: f64,
    pub tol_repro: f64,
    pub alpha_steps: usize,
    pub rng_seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl RunConfig {
    /// Builds and validates the configuration. `env_seed` is the raw value of
    /// [`SEED_ENV`], which overrides `--seed` when set.
    pub fn from_args(common: &CommonArgs, alpha_steps: usize, env_seed: Option<&str>) -> Result<Self, String> {
        let rng_seed = match env_seed {
            Some(raw) => raw
                .trim()
                .parse::<u64>()
                .map_err(|_| format!("{SEED_ENV}='{raw}' is not an unsigned integer"))?,
            None => common.seed,
        };
        let config = Self {
            tol_herm: common.tol_herm,
            tol_measure: common.tol_measure,
            tol_null: common.tol_null,
            tol_repro: common.tol_repro,
            alpha_steps,
            rng_seed,
            output_path: common.out.clone(),
            output_format: common.format,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, value) in [
            ("tol-herm", self.tol_herm),
            ("tol-measure", self.tol_measure),
            ("tol-null", self.tol_null),
            ("tol", self.tol_repro),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(format!("--{name} must be a positive finite number, got {value}"));
            }
        }
        if self.alpha_steps < 2 {
            return Err(format!("--alpha-steps must be at least 2, got {}", self.alpha_steps));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            herm: self.tol_herm,
            measure: self.tol_measure,
            null: self.tol_null,
            ..Tolerances::DEFAULT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common() -> CommonArgs {
        CommonArgs {
            seed: 3,
            tol_repro: 1e-9,
            tol_herm: 1e-10,
            tol_measure: 1e-10,
            tol_null: 1e-12,
            out: None,
            format: OutputFormat::Json,
        }
    }

    #[test]
    fn env_seed_overrides_flag() {
        assert_eq!(RunConfig::from_args(&common(), 2, None).unwrap().rng_seed, 3);
        assert_eq!(RunConfig::from_args(&common(), 2, Some("42")).unwrap().rng_seed, 42);
        assert!(RunConfig::from_args(&common(), 2, Some("x")).is_err());
    }

    #[test]
    fn rejects_degenerate_values() {
        let mut c = common();
        c.tol_repro = 0.0;
        assert!(RunConfig::from_args(&c, 2, None).is_err());
        assert!(RunConfig::from_args(&common(), 1, None).is_err());
        let mut c = common();
        c.tol_null = f64::NAN;
        assert!(RunConfig::from_args(&c, 2, None).is_err());
    }
}

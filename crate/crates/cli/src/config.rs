//! Command-line surface and resolution into a validated [`RunConfig`].
//!
//! Precedence, highest first: command-line flags, the config file's `[run]` table,
//! `MLEXP_OUTPUT_DIR` (output directory only), built-in defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlexp_core::edgeworth::MAX_ORDER;
use mlexp_core::numeric::config::{check_version, FamilySpec};
use mlexp_core::numeric::family::Builtin;
use mlexp_core::numeric::montecarlo::{Grid, Parallelism};
use serde::Deserialize;

use crate::error::CliError;

pub const OUTPUT_DIR_ENV: &str = "MLEXP_OUTPUT_DIR";
pub const DEFAULT_N: usize = 20;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_GRID: &str = "-4:4:0.1";
pub const DEFAULT_SIMULATE_REPS: u64 = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// B1..B4 and the expansion of the normalized estimator.
    Mle,
    /// E(Sn^k) for k = 1..5.
    Moments,
    Cumulants,
    /// r1..r3 and the Edgeworth polynomials p1..p3.
    Polys,
    /// Cornish-Fisher coefficients A, B, C.
    Cf,
    All,
}

#[derive(Parser, Debug)]
#[command(name = "mlexp", version, about = "Higher-order expansions for the location maximum likelihood estimator")]
pub struct Cli {
    /// Output format for stdout and artifacts.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for report artifacts (default: $MLEXP_OUTPUT_DIR; none means stdout only).
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Versioned TOML config with [family] and [run] tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// Builtin family id or path to a family config file.
    #[arg(long)]
    pub family: Option<String>,
    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct McArgs {
    /// Monte Carlo replications.
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// x grid as lo:hi:step.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Run replications on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print symbolic results of the derivation.
    Derive {
        #[arg(long, value_enum, default_value = "all")]
        target: Target,
    },
    /// Fisher information and eta moments of a family, raw and standardized.
    Etas {
        #[arg(long)]
        family: Option<String>,
    },
    /// Evaluate the Edgeworth CDF expansion G_n(x).
    Eval {
        #[command(flatten)]
        common: Common,
        /// Evaluation points, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// x grid as lo:hi:step, used when --x is absent.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Evaluate the Cornish-Fisher quantile expansion.
    Quantile {
        #[command(flatten)]
        common: Common,
        /// Probabilities in (0, 1), comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<f64>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Monte Carlo distribution of sqrt(n) times the MLE against the expansion.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Golden symbolic suite, numeric identity checks and (with --reps) Monte Carlo.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: McArgs,
        /// Alternate transcription of the printed formulas to check against.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

/// `[run]` table of the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    family: Option<String>,
    n: Option<usize>,
    order: Option<usize>,
    reps: Option<u64>,
    seed: Option<u64>,
    grid: Option<String>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    version: Option<u32>,
    family: Option<FamilySpec>,
    #[serde(default)]
    run: RunSection,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommandKind {
    Derive(Target),
    Etas,
    Eval { xs: Vec<f64> },
    Quantile { us: Vec<f64> },
    Simulate,
    Validate { fixture: Option<PathBuf> },
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Derive(_) => "derive",
            CommandKind::Etas => "etas",
            CommandKind::Eval { .. } => "eval",
            CommandKind::Quantile { .. } => "quantile",
            CommandKind::Simulate => "simulate",
            CommandKind::Validate { .. } => "validate",
        }
    }
}

/// Fully resolved and validated run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: Option<FamilySpec>,
    pub n: usize,
    pub order: usize,
    pub grid: Grid,
    pub reps: Option<u64>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub parallelism: Parallelism,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let src = read(path)?;
    let file: ConfigFile = toml::from_str(&src).map_err(|e| CliError::usage("config", format!("{}: {}", path.display(), e.message())))?;
    check_version(file.version).map_err(|e| CliError::usage("config.version", e))?;
    Ok(file)
}

/// A builtin id, or a path to a config file whose `[family]` table is used.
fn family_from_flag(value: &str) -> Result<FamilySpec, CliError> {
    if let Ok(b) = Builtin::from_str(value) {
        return Ok(FamilySpec { builtin: Some(b), ..FamilySpec::default() });
    }
    let path = Path::new(value);
    if path.is_file() {
        return load_config(path)?.family.ok_or_else(|| CliError::usage("family", format!("{value} has no [family] table")));
    }
    let ids: Vec<&str> = Builtin::ALL.iter().map(|b| b.name()).collect();
    Err(CliError::usage("family", format!("`{value}` is neither a builtin ({}) nor a config file", ids.join(", "))))
}

fn parse_grid(src: &str) -> Result<Grid, CliError> {
    src.parse::<Grid>().map_err(|e| CliError::usage("grid", e))
}

impl RunConfig {
    pub fn resolve(cli: Cli, env_output: Option<PathBuf>) -> Result<Self, CliError> {
        let file = cli.config.as_deref().map(load_config).transpose()?;
        let (file_family, run) = match file {
            Some(f) => (f.family, f.run),
            None => (None, RunSection::default()),
        };
        let (command, common, mc, x_grid, order) = match cli.command {
            Command::Derive { target } => (CommandKind::Derive(target), Common::default(), McArgs::default(), None, None),
            Command::Etas { family } => (CommandKind::Etas, Common { family, n: None }, McArgs::default(), None, None),
            Command::Eval { common, x, grid, order } => (CommandKind::Eval { xs: x }, common, McArgs::default(), grid, order),
            Command::Quantile { common, u, order } => (CommandKind::Quantile { us: u }, common, McArgs::default(), None, order),
            Command::Simulate { common, mc } => (CommandKind::Simulate, common, mc, None, None),
            Command::Validate { common, mc, fixture } => (CommandKind::Validate { fixture }, common, mc, None, None),
        };

        let family = match (&common.family, &run.family, file_family) {
            (Some(flag), _, _) => Some(family_from_flag(flag)?),
            (None, Some(id), _) => Some(family_from_flag(id)?),
            (None, None, spec) => spec,
        };
        let n = common.n.or(run.n).unwrap_or(DEFAULT_N);
        if n == 0 {
            return Err(CliError::usage("n", "must be at least 1"));
        }
        let order = order.or(run.order).unwrap_or(MAX_ORDER);
        if order > MAX_ORDER {
            return Err(CliError::usage("order", format!("{order} is outside 0..={MAX_ORDER}")));
        }
        let grid_src = mc.grid.or(x_grid).or(run.grid).unwrap_or_else(|| DEFAULT_GRID.to_string());
        let grid = parse_grid(&grid_src)?;
        let mut reps = mc.reps.or(run.reps);
        if command == CommandKind::Simulate {
            reps = reps.or(Some(DEFAULT_SIMULATE_REPS));
        }
        if reps == Some(0) {
            return Err(CliError::usage("reps", "must be at least 1"));
        }
        let seed = mc.seed.or(run.seed).unwrap_or(DEFAULT_SEED);
        let output = cli.output.or(run.output).or(env_output);
        let format = cli.format.or(run.format).unwrap_or_default();
        let parallelism = if mc.sequential { Parallelism::Sequential } else { Parallelism::Parallel };

        match &command {
            CommandKind::Derive(_) => {}
            _ if family.is_none() => return Err(CliError::usage("family", "required (use --family or a config [family] table)")),
            CommandKind::Quantile { us } => {
                if let Some(u) = us.iter().find(|u| !(**u > 0.0 && **u < 1.0)) {
                    return Err(CliError::usage("u", format!("{u} is outside (0, 1)")));
                }
            }
            CommandKind::Eval { xs } => {
                if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
                    return Err(CliError::usage("x", format!("{x} is not finite")));
                }
            }
            _ => {}
        }
        Ok(RunConfig { command, family, n, order, grid, reps, seed, output, format, parallelism })
    }

    /// Evaluation points of `eval`: explicit --x values, else the grid.
    pub fn eval_points(&self) -> Vec<f64> {
        match &self.command {
            CommandKind::Eval { xs } if !xs.is_empty() => xs.clone(),
            _ => self.grid.points(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut full = vec!["mlexp"];
        full.extend_from_slice(args);
        RunConfig::resolve(Cli::try_parse_from(full).unwrap(), None)
    }

    fn field(r: Result<RunConfig, CliError>) -> String {
        match r {
            Err(CliError::Usage { field, .. }) => field,
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn defaults() {
        let c = resolve(&["eval", "--family", "logistic", "--x", "-1,0.5"]).unwrap();
        assert_eq!(c.n, DEFAULT_N);
        assert_eq!(c.order, 3);
        assert_eq!(c.eval_points(), vec![-1.0, 0.5]);
        assert_eq!(c.format, Format::Text);
        let s = resolve(&["simulate", "--family", "sech"]).unwrap();
        assert_eq!(s.reps, Some(DEFAULT_SIMULATE_REPS));
        assert_eq!(s.family.unwrap().builtin, Some(Builtin::HyperbolicSecant));
        assert_eq!(resolve(&["validate", "--family", "gaussian"]).unwrap().reps, None);
    }

    #[test]
    fn usage_errors_name_the_field() {
        assert_eq!(field(resolve(&["eval", "--family", "logistic", "--order", "4"])), "order");
        assert_eq!(field(resolve(&["eval", "--family", "logistic", "--n", "0"])), "n");
        assert_eq!(field(resolve(&["eval", "--n", "5"])), "family");
        assert_eq!(field(resolve(&["eval", "--family", "laplace"])), "family");
        assert_eq!(field(resolve(&["quantile", "--family", "logistic", "--u", "1.5"])), "u");
        assert_eq!(field(resolve(&["simulate", "--family", "logistic", "--grid", "1:0:1"])), "grid");
        assert_eq!(field(resolve(&["simulate", "--family", "logistic", "--reps", "0"])), "reps");
    }

    #[test]
    fn flags_override_config_which_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "version = 1\n[family]\nbuiltin = \"cauchy\"\n[run]\nn = 7\norder = 1\nseed = 9\nformat = \"json\"\n").unwrap();
        let p = path.to_str().unwrap();
        let c = resolve(&["--config", p, "eval", "--x", "0"]).unwrap();
        assert_eq!((c.n, c.order, c.format), (7, 1, Format::Json));
        assert_eq!(c.family.as_ref().unwrap().builtin, Some(Builtin::Cauchy));
        let c = resolve(&["--config", p, "eval", "--x", "0", "--n", "11", "--family", "gaussian", "--format", "csv"]).unwrap();
        assert_eq!((c.n, c.order, c.format), (11, 1, Format::Csv));
        assert_eq!(c.family.unwrap().builtin, Some(Builtin::Gaussian));
        let by_path = resolve(&["etas", "--family", p]).unwrap();
        assert_eq!(by_path.family.unwrap().builtin, Some(Builtin::Cauchy));
    }

    #[test]
    fn output_precedence() {
        let cli = Cli::try_parse_from(["mlexp", "derive"]).unwrap();
        assert_eq!(RunConfig::resolve(cli, Some("env".into())).unwrap().output, Some(PathBuf::from("env")));
        let cli = Cli::try_parse_from(["mlexp", "derive", "--output", "flag"]).unwrap();
        assert_eq!(RunConfig::resolve(cli, Some("env".into())).unwrap().output, Some(PathBuf::from("flag")));
    }

    #[test]
    fn bad_config_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "version = 3\n").unwrap();
        assert_eq!(field(resolve(&["--config", path.to_str().unwrap(), "derive"])), "config.version");
        std::fs::write(&path, "version = 1\n[run]\nsamples = 3\n").unwrap();
        assert_eq!(field(resolve(&["--config", path.to_str().unwrap(), "derive"])), "config");
    }
}

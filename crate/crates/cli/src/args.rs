//! Command-line flags and their translation into a [`RunSpec`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::report::Format;
use crate::run::{parse_mode, Command, Grid, RunSpec, SplittingChoice, DEFAULT_MAX_DIM};
use crate::spec::{parse_state_source, StateSource};

#[derive(Debug, Parser)]
#[command(name = "sideinfo", version, about = "Side-information entanglement measures and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Evaluate measures on one state.
    Measure(Common),
    /// Cost pair (Q, E) of one splitting of the purifying system.
    Redistribute(Common),
    /// Check the exact entropic identities on seeded random cases.
    Verify(Common),
    /// Evaluate measures across a family parameter grid.
    Sweep(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplittingArg {
    Haar,
    Receiver,
    Sender,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// State-spec document (JSON).
    #[arg(long, conflicts_with = "family")]
    pub state: Option<PathBuf>,
    /// State family: bell, classically_correlated, werner, isotropic, random.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Comma-separated measure names, repeatable.
    #[arg(long = "measure", value_delimiter = ',')]
    pub measures: Vec<String>,
    #[arg(long = "da-prime")]
    pub d_a_prime: Option<usize>,
    #[arg(long = "dc")]
    pub d_c: Option<usize>,
    /// Decomposition size for formation-type measures (default rank²).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iterations", default_value_t = 3000)]
    pub max_iterations: usize,
    /// Direction for optimize_rate: min or max.
    #[arg(long, default_value = "min")]
    pub mode: String,
    /// Splitting used by redistribute.
    #[arg(long, value_enum, default_value_t = SplittingArg::Haar)]
    pub splitting: SplittingArg,
    /// Number of random cases for verify.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    /// Sweep grid, NAME=START:STOP:COUNT.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Dimension cap. Raising it is unsupported.
    #[arg(long = "max-dim", default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

impl CommandArgs {
    pub fn split(&self) -> (Command, &Common) {
        match self {
            CommandArgs::Measure(c) => (Command::Measure, c),
            CommandArgs::Redistribute(c) => (Command::Redistribute, c),
            CommandArgs::Verify(c) => (Command::Verify, c),
            CommandArgs::Sweep(c) => (Command::Sweep, c),
        }
    }
}

impl Common {
    pub fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }

    pub fn to_spec(&self, command: Command) -> Result<RunSpec, CliError> {
        let mut spec = RunSpec::new(command);
        spec.state = self.state_source()?;
        spec.measures = self.measures.iter().map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect();
        spec.optimizer.restarts = self.restarts;
        spec.optimizer.tolerance = self.tol;
        spec.optimizer.seed = self.seed;
        spec.optimizer.max_iterations = self.max_iterations;
        spec.optimizer.mode = parse_mode(&self.mode)?;
        spec.d_a_prime = self.d_a_prime;
        spec.d_c = self.d_c;
        spec.k = self.k;
        spec.splitting = match self.splitting {
            SplittingArg::Haar => SplittingChoice::Haar,
            SplittingArg::Receiver => SplittingChoice::Receiver,
            SplittingArg::Sender => SplittingChoice::Sender,
        };
        spec.cases = self.cases;
        spec.grid = self.grid.as_deref().map(parse_grid).transpose()?;
        spec.max_dim = self.max_dim;
        Ok(spec)
    }

    fn state_source(&self) -> Result<Option<StateSource>, CliError> {
        if let Some(path) = &self.state {
            if !self.params.is_empty() {
                return Err(CliError::Usage("--param only applies with --family".into()));
            }
            let text = std::fs::read_to_string(path)?;
            return parse_state_source(&text).map(Some);
        }
        let Some(name) = &self.family else {
            if !self.params.is_empty() {
                return Err(CliError::Usage("--param only applies with --family".into()));
            }
            return Ok(None);
        };
        let mut params = BTreeMap::new();
        for p in &self.params {
            let (k, v) = p.split_once('=').ok_or_else(|| CliError::Usage(format!("--param '{p}' is not KEY=VALUE")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("--param '{p}' has a non-numeric value")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(Some(StateSource::Family { name: name.clone(), params }))
    }
}

/// Parses `NAME=START:STOP:COUNT`.
pub fn parse_grid(text: &str) -> Result<Grid, CliError> {
    let bad = || CliError::Usage(format!("--grid '{text}' is not NAME=START:STOP:COUNT"));
    let (name, range) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts[..] else { return Err(bad()) };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || name.trim().is_empty() {
        return Err(bad());
    }
    Ok(Grid { name: name.trim().to_string(), start, stop, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        let g = parse_grid("p=0:1:11").unwrap();
        assert_eq!((g.name.as_str(), g.start, g.stop, g.count), ("p", 0.0, 1.0, 11));
        for bad in ["p=0:1", "0:1:3", "p=a:1:3", "p=0:1:0"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_reach_the_spec() {
        let cli = Cli::try_parse_from([
            "sideinfo", "measure", "--family", "werner", "--param", "p=0.5", "--measure", "eof,squashed_upper",
            "--restarts", "2", "--seed", "9",
        ])
        .unwrap();
        let (cmd, common) = cli.command.split();
        let spec = common.to_spec(cmd).unwrap();
        assert_eq!(spec.measures, vec!["eof", "squashed_upper"]);
        assert_eq!(spec.optimizer.restarts, 2);
        assert_eq!(spec.optimizer.seed, 9);
        assert!(matches!(spec.state, Some(StateSource::Family { ref name, .. }) if name == "werner"));
    }
}

//! Command execution.

use std::collections::BTreeMap;

use sideinfo_core::measures::{
    default_k, eoa_asymptotic, eoa_single, eof, optimize_rate, puffed_lower, squashed_upper_with_formation,
    wootters_eof,
};
use sideinfo_core::mcs::eof_via_mcs;
use sideinfo_core::redistribution::{cost_pair, entanglement_balance, split_purification};
use sideinfo_core::{Bound, Certificate, DensityOperator, MeasureReport, Mode, OptimizerConfig, SplittingIsometry};

use crate::error::CliError;
use crate::report::{corpus_fingerprint, fingerprint, OptimizerSummary, Record, Report, Rounded, TOOL_NAME, TOOL_VERSION};
use crate::spec::StateSource;
use crate::verify::{run_suite, CHECKS, IDENTITY_TOL};

pub const DEFAULT_MAX_DIM: usize = 64;

pub const MEASURE_NAMES: [&str; 9] = [
    "squashed_upper",
    "eof",
    "eof_via_mcs",
    "eoa_single",
    "eoa_asymptotic",
    "puffed_lower",
    "wootters_eof",
    "optimize_rate",
    "eof_two_copy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Measure,
    Redistribute,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Measure => "measure",
            Command::Redistribute => "redistribute",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

/// Which splitting `redistribute` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingChoice {
    Haar,
    Receiver,
    Sender,
}

/// A parameter grid `name = start:stop:count`, inclusive of both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub state: Option<StateSource>,
    pub measures: Vec<String>,
    pub optimizer: OptimizerConfig,
    pub d_a_prime: Option<usize>,
    pub d_c: Option<usize>,
    pub k: Option<usize>,
    pub splitting: SplittingChoice,
    pub cases: usize,
    pub grid: Option<Grid>,
    pub max_dim: usize,
}

impl RunSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            state: None,
            measures: Vec::new(),
            optimizer: OptimizerConfig::default(),
            d_a_prime: None,
            d_c: None,
            k: None,
            splitting: SplittingChoice::Haar,
            cases: 100,
            grid: None,
            max_dim: DEFAULT_MAX_DIM,
        }
    }

    /// Checks the command-specific required fields.
    pub fn validate(&self) -> Result<(), CliError> {
        self.optimizer.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(m) = self.measures.iter().find(|m| !MEASURE_NAMES.contains(&m.as_str())) {
            return Err(CliError::Usage(format!("unknown measure '{m}' (known: {})", MEASURE_NAMES.join(", "))));
        }
        match self.command {
            Command::Measure | Command::Sweep if self.measures.is_empty() => {
                return Err(CliError::Usage(format!("{} needs --measure", self.command.name())))
            }
            Command::Measure | Command::Redistribute if self.state.is_none() => {
                return Err(CliError::Usage(format!("{} needs --state or --family", self.command.name())))
            }
            Command::Sweep => {
                if self.grid.is_none() {
                    return Err(CliError::Usage("sweep needs --grid name=start:stop:count".into()));
                }
                if !matches!(self.state, Some(StateSource::Family { .. })) {
                    return Err(CliError::Usage("sweep needs --family".into()));
                }
            }
            Command::Verify if self.cases == 0 => return Err(CliError::Usage("--cases must be at least 1".into())),
            _ => {}
        }
        Ok(())
    }
}

/// A finished run: the report and whether every verification passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

fn check_cap(dim: usize, cap: usize) -> Result<(), CliError> {
    if dim > cap {
        return Err(CliError::Cap { dim, cap });
    }
    Ok(())
}

/// Executes `spec`. `timestamp` is stamped into the report verbatim.
pub fn run(spec: &RunSpec, timestamp: &str) -> Result<Outcome, CliError> {
    spec.validate()?;
    let describe = spec.state.as_ref().map(describe_source).unwrap_or_else(|| "random corpus".into());
    let (records, passed) = match spec.command {
        Command::Measure => {
            let rho = load(spec, spec.state.as_ref().expect("validated"))?;
            (measure_records(spec, &rho)?, None)
        }
        Command::Redistribute => {
            let rho = load(spec, spec.state.as_ref().expect("validated"))?;
            (redistribute_records(spec, &rho)?, None)
        }
        Command::Verify => {
            let given = spec.state.as_ref().map(|s| load(spec, s)).transpose()?;
            let (records, ok) = verify_records(spec, given.as_ref())?;
            (records, Some(ok))
        }
        Command::Sweep => (sweep_records(spec)?, None),
    };
    let report = Report {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command: spec.command.name().into(),
        seed: spec.optimizer.seed,
        timestamp: timestamp.into(),
        state: describe,
        optimizer: OptimizerSummary {
            restarts: spec.optimizer.restarts,
            max_iterations: spec.optimizer.max_iterations,
            tolerance: spec.optimizer.tolerance,
            window: spec.optimizer.window,
            mode: spec.optimizer.mode,
        },
        passed,
        records,
    };
    Ok(Outcome { passed: passed.unwrap_or(true), report })
}

fn describe_source(src: &StateSource) -> String {
    match src {
        StateSource::Explicit(rho) => format!("matrix {}", rho.layout()),
        StateSource::Family { name, params } => {
            let ps: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            if ps.is_empty() {
                format!("family {name}")
            } else {
                format!("family {name} {}", ps.join(" "))
            }
        }
    }
}

fn load(spec: &RunSpec, src: &StateSource) -> Result<DensityOperator, CliError> {
    check_cap(src.dim()?, spec.max_dim)?;
    src.build()
}

/// Side-information dimensions, defaulting to the rank on both sides.
fn split_dims(spec: &RunSpec, rho: &DensityOperator) -> (usize, usize) {
    let r = rho.rank();
    (spec.d_a_prime.unwrap_or(r), spec.d_c.unwrap_or(r))
}

fn two_copy(rho: &DensityOperator) -> Result<DensityOperator, CliError> {
    let first = rho.relabel(&["A1", "B1"])?;
    let second = rho.relabel(&["A2", "B2"])?;
    let joint = first.tensor_product(&second)?.permute(&["A1", "A2", "B1", "B2"])?;
    Ok(joint.regroup(&[("A", vec!["A1", "A2"]), ("B", vec!["B1", "B2"])])?)
}

/// Formation optimum at size `k`, computed at most once per state.
struct FormationCache<'a> {
    rho: &'a DensityOperator,
    k: usize,
    report: Option<MeasureReport>,
}

impl FormationCache<'_> {
    fn get(&mut self, cfg: &OptimizerConfig) -> Result<&MeasureReport, CliError> {
        if self.report.is_none() {
            self.report = Some(eof(self.rho, self.k, cfg)?);
        }
        Ok(self.report.as_ref().expect("just filled"))
    }
}

fn measure_one(
    spec: &RunSpec,
    rho: &DensityOperator,
    fp: &str,
    name: &str,
    formation: &mut FormationCache,
) -> Result<Record, CliError> {
    let cfg = &spec.optimizer;
    let tol = cfg.tolerance;
    let k = formation.k;
    let (da, dc) = split_dims(spec, rho);
    let with_split = |mut rec: Record| {
        rec.d_a_prime = Some(da);
        rec.d_c = Some(dc);
        rec
    };
    let with_k = |mut rec: Record, k: usize| {
        rec.k = Some(k);
        rec
    };
    Ok(match name {
        "squashed_upper" => {
            let r = squashed_upper_with_formation(rho, da, dc, formation.get(cfg)?, cfg)?;
            let mut rec = Record::from_measure(fp, name, &r, tol);
            // the winning splitting may be the larger formation one
            if let Certificate::Splitting(v) = &r.certificate {
                rec.d_a_prime = Some(v.d_a_prime());
                rec.d_c = Some(v.d_c());
            }
            with_k(rec, k)
        }
        "puffed_lower" => with_split(Record::from_measure(fp, name, &puffed_lower(rho, da, dc, cfg)?, tol)),
        "optimize_rate" => with_split(Record::from_measure(fp, name, &optimize_rate(rho, da, dc, cfg)?, tol)),
        "eof" => with_k(Record::from_measure(fp, name, formation.get(cfg)?, tol), k),
        "eof_via_mcs" => with_k(Record::from_measure(fp, name, &eof_via_mcs(rho, k, cfg)?, tol), k),
        "eoa_single" => with_k(Record::from_measure(fp, name, &eoa_single(rho, k, cfg)?, tol), k),
        "eoa_asymptotic" => Record::new(fp, name, eoa_asymptotic(rho)?, Bound::Exact, 0.0),
        "wootters_eof" => Record::new(fp, name, wootters_eof(rho)?, Bound::Exact, 0.0),
        "eof_two_copy" => {
            check_cap(rho.dim() * rho.dim(), spec.max_dim)?;
            let pair = two_copy(rho)?;
            let k2 = spec.k.map(|k| k * k).unwrap_or_else(|| default_k(&pair));
            let mut rec = Record::from_measure(fp, name, &eof(&pair, k2, cfg)?, tol);
            // per copy
            rec.value *= 0.5;
            rec.entanglement_at_optimum = rec.entanglement_at_optimum.map(|e| 0.5 * e);
            with_k(rec, k2)
        }
        other => return Err(CliError::Usage(format!("unknown measure '{other}'"))),
    })
}

fn measure_records(spec: &RunSpec, rho: &DensityOperator) -> Result<Vec<Record>, CliError> {
    let fp = fingerprint(rho);
    let mut formation = FormationCache { rho, k: spec.k.unwrap_or_else(|| default_k(rho)), report: None };
    spec.measures.iter().map(|m| measure_one(spec, rho, &fp, m, &mut formation)).collect()
}

fn redistribute_records(spec: &RunSpec, rho: &DensityOperator) -> Result<Vec<Record>, CliError> {
    let fp = fingerprint(rho);
    let (da, dc) = split_dims(spec, rho);
    let d_e = rho.rank();
    let v = match spec.splitting {
        SplittingChoice::Haar => SplittingIsometry::haar(d_e, da, dc, spec.optimizer.seed)?,
        SplittingChoice::Receiver => SplittingIsometry::all_at_receiver(d_e, da, dc)?,
        SplittingChoice::Sender => SplittingIsometry::all_at_sender(d_e, da, dc)?,
    };
    let st = split_purification(rho, &v)?;
    let cp = cost_pair(&st);
    let mut out = Vec::new();
    for (name, value) in [("cost_q", cp.q), ("cost_e", cp.e), ("entanglement_balance", entanglement_balance(&st))] {
        let mut rec = Record::new(&fp, name, value, Bound::Exact, 0.0);
        rec.d_a_prime = Some(da);
        rec.d_c = Some(dc);
        out.push(rec);
    }
    Ok(out)
}

fn verify_records(spec: &RunSpec, given: Option<&DensityOperator>) -> Result<(Vec<Record>, bool), CliError> {
    let (dev, states) = run_suite(given, spec.optimizer.seed, spec.cases)?;
    let fp = match given {
        Some(rho) => fingerprint(rho),
        None => corpus_fingerprint(&states),
    };
    let mut all = true;
    let records = CHECKS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let ok = dev.passed(i);
            all &= ok;
            let mut rec = Record::new(&fp, name, dev.0[i], Bound::Exact, IDENTITY_TOL);
            rec.passed = Some(ok);
            rec.cases = Some(spec.cases);
            rec
        })
        .collect();
    Ok((records, all))
}

fn sweep_records(spec: &RunSpec) -> Result<Vec<Record>, CliError> {
    let grid = spec.grid.as_ref().expect("validated");
    let Some(StateSource::Family { name, params }) = &spec.state else { unreachable!("validated") };
    let mut out = Vec::new();
    for x in grid.points() {
        let mut params = params.clone();
        params.insert(grid.name.clone(), x);
        let src = StateSource::Family { name: name.clone(), params };
        let rho = load(spec, &src)?;
        let point: BTreeMap<String, Rounded> = [(grid.name.clone(), Rounded(x))].into_iter().collect();
        for mut rec in measure_records(spec, &rho)? {
            rec.point = point.clone();
            out.push(rec);
        }
    }
    Ok(out)
}

/// Parses `--mode`.
pub fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "min" | "minimize" => Ok(Mode::Minimize),
        "max" | "maximize" => Ok(Mode::Maximize),
        other => Err(CliError::Usage(format!("mode must be min or max, got '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        let g = Grid { name: "p".into(), start: 0.0, stop: 1.0, count: 11 };
        let pts = g.points();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[10], 1.0);
        assert!((pts[3] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn validation_names_missing_fields() {
        let spec = RunSpec::new(Command::Measure);
        assert!(matches!(spec.validate(), Err(CliError::Usage(_))));
        let mut spec = RunSpec::new(Command::Verify);
        spec.measures = vec!["nope".into()];
        assert!(matches!(spec.validate(), Err(CliError::Usage(m)) if m.contains("nope")));
    }

    #[test]
    fn two_copy_layout() {
        let rho = DensityOperator::maximally_mixed(sideinfo_core::SystemLayout::bipartite(2, 3).unwrap());
        let pair = two_copy(&rho).unwrap();
        assert_eq!(pair.layout().dims(), vec![4, 9]);
    }
}

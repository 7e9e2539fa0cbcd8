use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use asthreshold::asgraph::{
    build_routing, parse_catalog, parse_catalog_json, schedule_partition, validate as validate_spec,
    AbsorbingSetSpec, ParseError, RoutingSystem, Schedule, ValidationReport,
};
use asthreshold::dynamics::{
    lch_sweep, puncture_check, InitialStates, RestChannel, RunOptions, SweepConfig, SweepReport,
};
use asthreshold::report::{deactivation_lch, format_rational, parse_rational, RationalJson};
use asthreshold::search::{
    brute_force_threshold, certify_threshold, compute_threshold, SearchOptions, ThresholdResult,
};
use asthreshold::{Rational, Rational64};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::{BruteForceArgs, CommonArgs, Format, Init, SweepArgs, ThresholdArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Parse(PathBuf, #[source] ParseError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        EXIT_USAGE
    }
}

/// Rendered report plus the exit code and diagnostics for stderr.
pub struct Outcome {
    pub report: String,
    pub code: u8,
    pub notes: Vec<String>,
}

fn load(path: &Path) -> Result<Vec<AbsorbingSetSpec>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        parse_catalog_json(&text)
    } else {
        parse_catalog(&text)
    };
    parsed.map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn load_all(common: &CommonArgs) -> Result<Vec<AbsorbingSetSpec>, CliError> {
    let mut all = Vec::new();
    for path in &common.inputs {
        all.extend(load(path)?);
    }
    Ok(all)
}

fn rational_arg(flag: &str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Usage(format!("--{flag}: expected p/q, got `{text}`")))
}

/// Runs `f` on every item on a pool of `jobs` threads, keeping input order.
fn par_map<T: Sync, R: Send>(
    jobs: Option<usize>,
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Result<Vec<R>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn to_csv<R: Serialize>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

fn parse_schedule(text: &str, rs: &RoutingSystem) -> Result<Schedule, CliError> {
    match text {
        "parallel" => Ok(Schedule::Parallel),
        "seq" => Ok(Schedule::natural(rs)),
        _ => {
            let list = text
                .strip_prefix("seq:")
                .ok_or_else(|| CliError::Usage(format!("--schedule: unknown schedule `{text}`")))?;
            let order = list
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("--schedule: bad CN list `{list}`")))?;
            Ok(Schedule::Sequential(order))
        }
    }
}

#[derive(Serialize)]
struct ValidateRow<'a> {
    name: &'a str,
    a: usize,
    b: usize,
    absorbing: bool,
    elementary: bool,
}

pub fn validate(args: &CommonArgs) -> Result<Outcome, CliError> {
    let specs = load_all(args)?;
    let reports: Vec<ValidationReport> = specs.iter().map(validate_spec).collect();
    let code = if reports.iter().all(ValidationReport::is_valid_elementary) {
        EXIT_OK
    } else {
        EXIT_INVALID
    };
    let report = match args.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&reports),
        Format::Csv => to_csv(
            &reports
                .iter()
                .map(|r| ValidateRow {
                    name: &r.name,
                    a: r.a,
                    b: r.b,
                    absorbing: r.is_absorbing,
                    elementary: r.is_elementary,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => reports.iter().map(|r| format!("{r}\n")).collect(),
    };
    Ok(Outcome {
        report,
        code,
        notes: Vec::new(),
    })
}

#[derive(Serialize)]
struct Witness {
    /// One character per message: `1` saturated, `0` unsaturated.
    pattern: String,
    lambda: RationalJson,
    x: Vec<RationalJson>,
}

#[derive(Serialize)]
struct Stats {
    nodes: u64,
    lps: u64,
    prunes1: u64,
    prunes2: u64,
}

#[derive(Serialize)]
struct ThresholdJson {
    as_name: String,
    a: usize,
    b: usize,
    n: usize,
    tau: RationalJson,
    lambda_max: RationalJson,
    /// The node budget ran out; `tau` is a lower bound.
    lower_bound: bool,
    witness: Witness,
    certified: bool,
    stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u64>,
}

#[derive(Serialize)]
struct ThresholdCsv {
    name: String,
    a: usize,
    b: usize,
    #[serde(rename = "N")]
    n: usize,
    tau_num: String,
    tau_den: String,
    deactivation_lch: String,
}

struct Computed {
    rs: RoutingSystem,
    result: ThresholdResult<Rational>,
    certified: bool,
    wall_ms: u64,
}

impl Computed {
    fn json(&self, timing: bool) -> ThresholdJson {
        let r = &self.result;
        ThresholdJson {
            as_name: self.rs.name().to_string(),
            a: self.rs.a(),
            b: self.rs.b(),
            n: self.rs.n(),
            tau: (&r.tau).into(),
            lambda_max: (&r.lambda_max_used).into(),
            lower_bound: r.exhausted,
            witness: Witness {
                pattern: (0..r.witness_pattern.len())
                    .map(|i| if r.witness_pattern.is_unsat(i) { '0' } else { '1' })
                    .collect(),
                lambda: (&r.witness_point.0).into(),
                x: r.witness_point.1.iter().map(RationalJson::from).collect(),
            },
            certified: self.certified,
            stats: Stats {
                nodes: r.stats.nodes_visited,
                lps: r.stats.lps_solved,
                prunes1: r.stats.test1_prunes,
                prunes2: r.stats.test2_prunes,
            },
            wall_ms: timing.then_some(self.wall_ms),
        }
    }

    fn csv(&self) -> ThresholdCsv {
        let tau = &self.result.tau;
        ThresholdCsv {
            name: self.rs.name().to_string(),
            a: self.rs.a(),
            b: self.rs.b(),
            n: self.rs.n(),
            tau_num: tau.numer().to_string(),
            tau_den: tau.denom().to_string(),
            deactivation_lch: deactivation_lch(tau)
                .map_or_else(|| "none".to_string(), |l| format_rational(&l)),
        }
    }

    fn text(&self) -> String {
        let r = &self.result;
        let mut line = format!(
            "{}: ({},{}) N={} tau={}",
            self.rs.name(),
            self.rs.a(),
            self.rs.b(),
            self.rs.n(),
            format_rational(&r.tau)
        );
        if r.exhausted {
            line.push_str(" (lower bound: node budget exhausted)");
        } else if r.tau == r.lambda_max_used && r.lambda_max_used < Rational::from_integer(1.into()) {
            line.push_str(" (= lambda_max; true threshold may be larger)");
        }
        if self.certified {
            line.push_str(" certified");
        }
        line.push('\n');
        line
    }
}

type Job = dyn Fn(&RoutingSystem) -> Result<(ThresholdResult<Rational>, bool), String> + Sync + Send;

fn run_thresholds(
    common: &CommonArgs,
    timing: bool,
    job: &Job,
) -> Result<Outcome, CliError> {
    let specs = load_all(common)?;
    let results = par_map(common.jobs, &specs, |spec| {
        let rs = build_routing(spec).map_err(|e| format!("{}: {e}", spec.name))?;
        let start = Instant::now();
        let (result, certified) = job(&rs).map_err(|e| format!("{}: {e}", spec.name))?;
        let wall_ms = start.elapsed().as_millis() as u64;
        Ok::<_, String>(Computed {
            rs,
            result,
            certified,
            wall_ms,
        })
    })?;

    let mut notes = Vec::new();
    let mut code = EXIT_OK;
    let mut ok = Vec::new();
    for r in results {
        match r {
            Ok(c) => {
                if c.result.exhausted && code == EXIT_OK {
                    code = EXIT_PARTIAL;
                }
                ok.push(c);
            }
            Err(msg) => {
                notes.push(format!("error: {msg}"));
                code = EXIT_INVALID;
            }
        }
    }
    let report = match common.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&ok.iter().map(|c| c.json(timing)).collect::<Vec<_>>()),
        Format::Csv => to_csv(&ok.iter().map(Computed::csv).collect::<Vec<_>>()),
        Format::Text => ok.iter().map(Computed::text).collect(),
    };
    Ok(Outcome { report, code, notes })
}

pub fn threshold(args: &ThresholdArgs) -> Result<Outcome, CliError> {
    let lambda_max = rational_arg("lambda-max", &args.lambda_max)?;
    let opts = SearchOptions {
        lambda_max,
        test1: !args.no_test1,
        test2: !args.no_test2,
        max_nodes: args.max_nodes,
    };
    let certify = !args.no_certify;
    run_thresholds(&args.common, !args.no_timing, &move |rs| {
        let result = compute_threshold(rs, &opts).map_err(|e| e.to_string())?;
        if !certify || result.exhausted {
            return Ok((result, false));
        }
        certify_threshold(rs, &result, &Default::default())
            .map_err(|e| format!("certification failed: {e}"))?;
        Ok((result, true))
    })
}

pub fn brute_force(args: &BruteForceArgs) -> Result<Outcome, CliError> {
    let lambda_max = rational_arg("lambda-max", &args.lambda_max)?;
    let cap = args.cap;
    run_thresholds(&args.common, !args.no_timing, &move |rs| {
        let result = brute_force_threshold(rs, &lambda_max, cap).map_err(|e| e.to_string())?;
        Ok((result, false))
    })
}

#[derive(Serialize)]
struct SweepCsv {
    as_name: String,
    tau: String,
    lch: String,
    trials: u64,
    converged: u64,
    equilibrium: u64,
    cycle: u64,
    budget: u64,
    seed: u64,
}

pub fn sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let lch = match (&args.lch, args.puncture.is_empty()) {
        (Some(t), _) => Some(rational_arg("lch", t)?),
        (None, false) => None,
        (None, true) => return Err(CliError::Usage("--lch is required unless --puncture is given".into())),
    };
    let tau_arg = args.tau.as_deref().map(|t| rational_arg("tau", t)).transpose()?;
    let rest_arg = args.rest.as_deref().map(|t| rational_arg("rest", t)).transpose()?;
    let lambda_max = rational_arg("lambda-max", &args.lambda_max)?;
    let probes = args
        .probe
        .iter()
        .map(|p| rational_arg("probe", p))
        .collect::<Result<Vec<_>, _>>()?;
    let specs = load_all(&args.common)?;

    let mut reports: Vec<SweepReport> = Vec::new();
    let mut notes = Vec::new();
    let mut code = EXIT_OK;
    for spec in &specs {
        let rs = match build_routing(spec) {
            Ok(rs) => rs,
            Err(e) => {
                notes.push(format!("error: {}: {e}", spec.name));
                code = EXIT_INVALID;
                continue;
            }
        };
        let schedule = parse_schedule(&args.schedule, &rs)?;
        let sp = schedule_partition(&rs, &schedule).map_err(|e| CliError::Usage(format!("--schedule: {e}")))?;
        let tau = match &tau_arg {
            Some(t) => t.clone(),
            None => {
                let opts = SearchOptions::with_lambda_max(lambda_max.clone());
                compute_threshold(&rs, &opts)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", spec.name)))?
                    .tau
            }
        };
        let mut cfg = SweepConfig::sampled(args.trials, args.seed);
        if args.init == Init::Corners {
            cfg.init = InitialStates::Corners;
        }
        cfg.run = RunOptions::with_max_iters(args.max_iters);
        for p in &probes {
            cfg = cfg.with_probe(vec![p.clone(); rs.a()]);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.common.jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
        let report = pool.install(|| {
            if args.puncture.is_empty() {
                let lch = lch.as_ref().expect("checked above");
                lch_sweep::<Rational64>(&rs, &sp, &tau, lch, &cfg)
            } else {
                let rest = rest_arg
                    .clone()
                    .unwrap_or_else(|| tau.clone() + Rational::new(1.into(), 16.into()));
                puncture_check::<Rational64>(&rs, &sp, &tau, &args.puncture, &RestChannel::Fixed(rest), &cfg)
            }
        });
        let report = report.map_err(|e| CliError::Usage(format!("{}: {e}", spec.name)))?;
        let must_converge = report.guarantee_applies() || !args.puncture.is_empty();
        if must_converge && report.failures() > 0 {
            notes.push(format!(
                "{}: {} of {} trajectories failed although convergence is guaranteed",
                spec.name,
                report.failures(),
                report.trials
            ));
            code = EXIT_INVALID;
        }
        reports.push(report);
    }

    let report = match args.common.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&reports),
        Format::Csv | Format::Text => to_csv(
            &reports
                .iter()
                .map(|r| SweepCsv {
                    as_name: r.as_name.clone(),
                    tau: format_rational(&r.tau.to_rational()),
                    lch: format_rational(&r.lch.to_rational()),
                    trials: r.trials,
                    converged: r.outcomes.converged,
                    equilibrium: r.outcomes.equilibrium,
                    cycle: r.outcomes.cycle,
                    budget: r.outcomes.budget,
                    seed: r.seed,
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outcome { report, code, notes })
}

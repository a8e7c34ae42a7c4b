//! Command-line front end: argument parsing, run configuration and file
//! emission for `simulate` and `experiment`.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde::Serialize;

use crate::analytics::{self, AnalyticsError};
use crate::export;
use crate::montecarlo::{self, Batch, ConfigError, ExperimentConfig};
use crate::oracle::{self, OracleError};
use crate::rng::{SeedSpec, StreamCoins};
use crate::walk::{self, InvariantViolation};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Uniformity,
    HiddenProb,
    Scaling,
    Oracle,
    AiryCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Uniformity => "uniformity",
            ExperimentKind::HiddenProb => "hidden-prob",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::AiryCheck => "airy-check",
        }
    }

    fn default_ladder(self) -> Vec<f64> {
        match self {
            ExperimentKind::Uniformity => vec![1e2, 1e3, 1e4],
            ExperimentKind::HiddenProb | ExperimentKind::Scaling => vec![1e3, 1e4, 1e5],
            ExperimentKind::Oracle | ExperimentKind::AiryCheck => vec![],
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tsrm",
    version,
    about = "Discrete self-repelling walk: simulation and experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one walk and write its trace and final local time.
    Simulate(SimulateArgs),
    /// Run an experiment and write its report.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    #[arg(long, env = "TSRM_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Output formats; CSV files are always written.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKind,
    /// Single geometric scale; overrides the ladder.
    #[arg(long = "A")]
    pub a: Option<f64>,
    /// Comma-separated scales.
    #[arg(long = "A-ladder", value_delimiter = ',')]
    pub a_ladder: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "TSRM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Report formats; the text report is always written.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json")]
    pub format: Vec<Format>,
    #[arg(long, default_value_t = 6)]
    pub max_coins: u32,
}

/// Validated configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(rename = "A_ladder")]
    pub a_ladder: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub format: Vec<Format>,
    pub max_coins: u32,
}

impl RunConfig {
    pub fn from_args(args: &ExperimentArgs) -> Result<RunConfig, CliError> {
        let a_ladder = match (args.a, args.a_ladder.is_empty()) {
            (Some(_), false) => {
                return Err(CliError::Usage(
                    "give either --A or --A-ladder, not both".into(),
                ))
            }
            (Some(a), true) => vec![a],
            (None, false) => args.a_ladder.clone(),
            (None, true) => args.kind.default_ladder(),
        };
        if let Some(bad) = a_ladder.iter().find(|a| !(a.is_finite() && **a > 2.0)) {
            return Err(CliError::Usage(format!(
                "scale A must be a number greater than 2, got {bad}"
            )));
        }
        if args.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        let workers = args
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        if args.max_coins > oracle::MAX_ENUMERATION_COINS {
            return Err(CliError::Usage(format!(
                "--max-coins is limited to {}",
                oracle::MAX_ENUMERATION_COINS
            )));
        }
        let mut format = args.format.clone();
        format.sort();
        format.dedup();
        Ok(RunConfig {
            subcommand: args.kind.name().to_string(),
            a_ladder,
            samples: args.samples,
            seed: args.seed,
            workers,
            out: args.out.clone(),
            format,
            max_coins: args.max_coins,
        })
    }

    fn experiment(&self, a: f64) -> ExperimentConfig {
        ExperimentConfig {
            a,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
        }
    }

    fn wants(&self, f: Format) -> bool {
        self.format.contains(&f)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit(
    path: PathBuf,
    files: &mut Vec<PathBuf>,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), CliError> {
    let mut w = create(&path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(io_at(&path))?;
    files.push(path);
    Ok(())
}

fn ensure_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(io_at(out))
}

/// Run `steps` steps with full invariant audit and write
/// `trace.csv` (`n,X,H,is_coin_time`) and `local_time.csv` (`edge_idx,ell`),
/// plus `trace.svg`/`local_time.svg` and `simulate.json` when asked for.
pub fn cmd_simulate(
    steps: u64,
    seed: u64,
    out: &Path,
    formats: &[Format],
) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(out)?;
    let mut coins = StreamCoins::new(SeedSpec::new(seed).stream("walk"));
    let (trace, state) = walk::run_audited(steps, &mut coins)?;
    let mut files = Vec::new();
    emit(out.join("trace.csv"), &mut files, |w| trace.write_csv(w))?;
    emit(out.join("local_time.csv"), &mut files, |w| {
        state.profile().write_csv(w)
    })?;
    if formats.contains(&Format::Svg) {
        emit(out.join("trace.svg"), &mut files, |w| {
            w.write_all(export::trace_svg(&trace).as_bytes())
        })?;
        emit(out.join("local_time.svg"), &mut files, |w| {
            w.write_all(export::profile_svg(state.profile()).as_bytes())
        })?;
    }
    if formats.contains(&Format::Json) {
        #[derive(Serialize)]
        struct Summary {
            steps: u64,
            seed: u64,
            final_position: i64,
            coins: u64,
            coin_times: usize,
            audit: &'static str,
        }
        let s = Summary {
            steps,
            seed,
            final_position: state.position(),
            coins: state.coin_count(),
            coin_times: trace.coin_times.len(),
            audit: "passed",
        };
        emit(out.join("simulate.json"), &mut files, |w| {
            export::write_json(&s, w)
        })?;
    }
    Ok(files)
}

/// Files written by an experiment and whether its checks passed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub kind: String,
    pub passed: bool,
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    run: &'a RunConfig,
    passed: bool,
    failures: &'a [String],
    report: &'a T,
}

fn finish<T: Serialize>(
    cfg: &RunConfig,
    report: &T,
    text: String,
    failures: Vec<String>,
    mut files: Vec<PathBuf>,
) -> Result<ExperimentOutcome, CliError> {
    let name = &cfg.subcommand;
    let passed = failures.is_empty();
    if cfg.wants(Format::Json) {
        let env = Envelope {
            run: cfg,
            passed,
            failures: &failures,
            report,
        };
        emit(cfg.out.join(format!("{name}.json")), &mut files, |w| {
            export::write_json(&env, w)
        })?;
    }
    emit(cfg.out.join(format!("{name}.txt")), &mut files, |w| {
        w.write_all(text.as_bytes())
    })?;
    Ok(ExperimentOutcome {
        kind: name.clone(),
        passed,
        failures,
        files,
    })
}

fn ladder_batches(cfg: &RunConfig) -> Vec<Batch> {
    cfg.a_ladder
        .iter()
        .map(|&a| Batch::run(&cfg.experiment(a)))
        .collect()
}

fn cap_failures(batches: &[Batch]) -> Vec<String> {
    batches
        .iter()
        .filter(|b| !b.cap_failures.is_empty())
        .map(|b| {
            format!(
                "A = {}: {} samples hit the step cap",
                b.config.a,
                b.cap_failures.len()
            )
        })
        .collect()
}

/// Dispatch an experiment and write `<kind>.txt` and, with `json` among the
/// formats, `<kind>.json`.
pub fn cmd_experiment(
    kind: ExperimentKind,
    cfg: &RunConfig,
) -> Result<ExperimentOutcome, CliError> {
    ensure_dir(&cfg.out)?;
    if matches!(
        kind,
        ExperimentKind::Uniformity | ExperimentKind::HiddenProb | ExperimentKind::Scaling
    ) && cfg.a_ladder.is_empty()
    {
        return Err(CliError::Usage(format!(
            "{} needs at least one scale",
            kind.name()
        )));
    }
    let base = cfg.experiment(cfg.a_ladder.first().copied().unwrap_or(4.0));
    let mut text = String::new();
    let mut files = Vec::new();
    match kind {
        ExperimentKind::Uniformity => {
            let batches = ladder_batches(cfg);
            let mirror =
                montecarlo::mirror_check(&batches[0], &Batch::run_mirrored(&batches[0].config));
            let refs: Vec<&Batch> = batches.iter().collect();
            let r = montecarlo::uniformity_from(&base, &refs, Some(mirror));
            let mut failures = cap_failures(&batches);
            if r.levels.len() >= 2 && !r.decreasing {
                failures.push("KS distance of U is not strictly decreasing in A".into());
            }
            text.push_str("A\tused\tsingletons\tKS\tKS p\tchi2\tchi2 p\n");
            for l in &r.levels {
                text.push_str(&format!(
                    "{}\t{}\t{}\t{:.6}\t{:.3e}\t{:.3}\t{:.3e}\n",
                    l.a,
                    l.used,
                    l.singletons,
                    l.ks.distance,
                    l.ks.p_value,
                    l.chi_square.statistic,
                    l.chi_square.p_value
                ));
            }
            text.push_str(&format!(
                "strictly decreasing: {}\nmirror KS: {:.6}\n",
                r.decreasing, mirror.distance
            ));
            if cfg.wants(Format::Csv) {
                for l in &r.levels {
                    emit(
                        cfg.out.join(format!("uniformity_A{}.csv", l.a)),
                        &mut files,
                        |w| export::write_histogram_csv(&l.histogram, 0.0, 1.0, w),
                    )?;
                }
            }
            finish(cfg, &r, text, failures, files)
        }
        ExperimentKind::HiddenProb => {
            let batches = ladder_batches(cfg);
            let refs: Vec<&Batch> = batches.iter().collect();
            let r = montecarlo::hidden_from(&base, &refs);
            let mut failures = cap_failures(&batches);
            for l in &r.levels {
                if l.a >= 1e4 && !l.within_tolerance {
                    failures.push(format!(
                        "A = {}: estimate {:.5} ± {:.5} misses {:.5}",
                        l.a, l.estimate, l.std_err, l.exact
                    ));
                }
            }
            if !r.moves_toward_exact {
                failures.push("estimates do not move toward the exact constant".into());
            }
            text.push_str(&format!(
                "exact = {:.12}\nA\tsamples\testimate\tstd err\tsmall A\n",
                r.exact
            ));
            for l in &r.levels {
                text.push_str(&format!(
                    "{}\t{}\t{:.5}\t{:.5}\t{}\n",
                    l.a, l.samples, l.estimate, l.std_err, l.small_a
                ));
            }
            if let Some(e) = r.extrapolated {
                text.push_str(&format!("extrapolated (display only) = {e:.5}\n"));
            }
            finish(cfg, &r, text, failures, files)
        }
        ExperimentKind::Scaling => {
            let batches = ladder_batches(cfg);
            let refs: Vec<&Batch> = batches.iter().collect();
            let r = montecarlo::scaling_from(&base, &refs);
            let mut failures = cap_failures(&batches);
            if r.pairs.len() >= 2 && !r.position_decreasing {
                failures.push("KS distances of the scaled position do not decrease".into());
            }
            text.push_str("A\tN/A\tarea/A\t|x|/A^(2/3)\tmax f/A^(1/3)\tsymmetry KS\n");
            for l in &r.levels {
                text.push_str(&format!(
                    "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.5}\n",
                    l.a,
                    l.mean_steps_over_a.0,
                    l.mean_area_over_a.0,
                    l.mean_abs_position.0,
                    l.mean_height.0,
                    l.symmetry.distance
                ));
            }
            text.push_str("A lo\tA hi\tKS x\tKS height\tKS support\tKS #I\n");
            for p in &r.pairs {
                text.push_str(&format!(
                    "{}\t{}\t{:.5}\t{:.5}\t{:.5}\t{:.5}\n",
                    p.a_lo,
                    p.a_hi,
                    p.position.distance,
                    p.height.distance,
                    p.support.distance,
                    p.interval.distance
                ));
            }
            finish(cfg, &r, text, failures, files)
        }
        ExperimentKind::Oracle => {
            let law = oracle::enumerate(cfg.max_coins)?;
            let mut failures = Vec::new();
            let mut masses = Vec::new();
            for k in 0..=cfg.max_coins as u64 {
                let m = law.total_mass(k);
                if !m.is_one() {
                    failures.push(format!("total mass at k = {k} is {m}"));
                }
                masses.push(m.to_string());
            }
            let rows = law.event_table();
            let interior = rows.iter().filter(|r| r.is_interior()).count();
            let interior_weight = rows
                .iter()
                .filter(|r| r.is_interior() && r.p == r.weight)
                .count();
            let web = rows.iter().filter(|r| r.p == r.web).count();
            if web != rows.len() {
                failures.push(format!(
                    "{} events differ from the web line count",
                    rows.len() - web
                ));
            }
            if interior_weight != interior {
                failures.push(format!(
                    "{} interior events differ from the closed-form weight",
                    interior - interior_weight
                ));
            }
            #[derive(Serialize)]
            struct OracleReport {
                max_coins: u32,
                total_mass: Vec<String>,
                events: usize,
                events_matching_web_count: usize,
                interior_events: usize,
                interior_matching_weight: usize,
                boundary_events: usize,
                law: serde_json::Value,
            }
            let report = OracleReport {
                max_coins: cfg.max_coins,
                total_mass: masses,
                events: rows.len(),
                events_matching_web_count: web,
                interior_events: interior,
                interior_matching_weight: interior_weight,
                boundary_events: rows.len() - interior,
                law: law.to_json(),
            };
            text.push_str(&format!(
                "coins {}\ntotal mass per level: {}\nevents {} (interior {}, at an end with f = 0: {})\nmatching web count: {}\ninterior matching weight: {}\n",
                cfg.max_coins,
                report.total_mass.join(" "),
                report.events,
                interior,
                report.boundary_events,
                web,
                interior_weight
            ));
            if cfg.wants(Format::Json) {
                emit(cfg.out.join("law.json"), &mut files, |w| {
                    export::write_json(&report.law, w)
                })?;
            }
            finish(cfg, &report, text, failures, files)
        }
        ExperimentKind::AiryCheck => {
            let check = analytics::airy_check()?;
            let failures = check
                .failures()
                .iter()
                .map(|r| format!("{}: residual {:e}", r.name, r.residual))
                .collect();
            let text = check.to_text();
            finish(cfg, &check, text, failures, files)
        }
    }
}

/// Parse arguments, run, print a summary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => {
            cmd_simulate(a.steps, a.seed, &a.out, &a.format).map(|files| ExperimentOutcome {
                kind: "simulate".into(),
                passed: true,
                failures: vec![],
                files,
            })
        }
        Command::Experiment(a) => {
            RunConfig::from_args(a).and_then(|cfg| cmd_experiment(a.kind, &cfg))
        }
    };
    match result {
        Ok(outcome) => {
            println!("{}", serde_json::to_string(&outcome).expect("serializable"));
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let summary = serde_json::json!({ "passed": false, "error": e.to_string() });
            eprintln!("{summary}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> ExperimentArgs {
        let mut v = vec!["tsrm", "experiment"];
        v.extend_from_slice(args);
        match Cli::try_parse_from(v).unwrap().command {
            Command::Experiment(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn ladder_and_single_scale() {
        let a = parse(&["scaling", "--A-ladder", "1000,10000", "--workers", "1"]);
        assert_eq!(RunConfig::from_args(&a).unwrap().a_ladder, vec![1e3, 1e4]);
        let a = parse(&["uniformity", "--A", "50"]);
        assert_eq!(RunConfig::from_args(&a).unwrap().a_ladder, vec![50.0]);
        let a = parse(&["hidden-prob"]);
        assert_eq!(
            RunConfig::from_args(&a).unwrap().a_ladder,
            vec![1e3, 1e4, 1e5]
        );
    }

    #[test]
    fn invalid_input_is_a_usage_error() {
        for args in [
            &["uniformity", "--A", "1.5"][..],
            &["uniformity", "--A", "10", "--A-ladder", "20,30"],
            &["scaling", "--samples", "0"],
            &["oracle", "--max-coins", "40"],
        ] {
            let e = RunConfig::from_args(&parse(args)).unwrap_err();
            assert!(matches!(e, CliError::Usage(_)), "{args:?}");
            assert_eq!(e.exit_code(), 2);
        }
        assert!(Cli::try_parse_from(["tsrm", "experiment", "nonsense"]).is_err());
        assert_eq!(main_with_args(["tsrm", "experiment", "nonsense"]), 2);
    }

    #[test]
    fn simulate_zero_steps() {
        let dir = tempfile::tempdir().unwrap();
        cmd_simulate(0, 1, dir.path(), &[Format::Csv]).unwrap();
        let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        assert_eq!(trace, "n,X,H,is_coin_time\n0,0,0,1\n");
    }

    #[test]
    fn unwritable_output_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let e = cmd_simulate(10, 1, &blocker.join("sub"), &[Format::Csv]).unwrap_err();
        assert!(matches!(e, CliError::Io { .. }));
    }

    #[test]
    fn oracle_experiment_has_unit_mass() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let a = parse(&["oracle", "--max-coins", "4", "--out", out, "--workers", "1"]);
        let o = cmd_experiment(a.kind, &RunConfig::from_args(&a).unwrap()).unwrap();
        assert!(o.passed, "{:?}", o.failures);
        let law: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("law.json")).unwrap())
                .unwrap();
        assert!(law
            .as_array()
            .unwrap()
            .iter()
            .all(|e| e.get("p_num").is_some()));
    }

    #[test]
    fn airy_check_report_has_constant() {
        let dir = tempfile::tempdir().unwrap();
        let a = parse(&["airy-check", "--out", dir.path().to_str().unwrap()]);
        let o = cmd_experiment(a.kind, &RunConfig::from_args(&a).unwrap()).unwrap();
        assert!(o.passed);
        let txt = fs::read_to_string(dir.path().join("airy-check.txt")).unwrap();
        assert!(txt.contains("0.22512"));
    }
}

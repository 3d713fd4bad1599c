use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::manifest::{scenario_hash, RunManifest, RunStatus};
use super::svg::{line_plot, Series};
use super::CliError;
use crate::metrics::{area_label, area_metrics, comparison_report, LabeledRun, ResponseMetrics, SettlingBand};
use crate::model::{ensure_valid, DecisionVector};
use crate::objective::{score_traces, CostFunction, Scenario};
use crate::optimizers::{minimize, Method, MethodParams, OptResult, Profile};
use crate::simulator::{simulate, Disturbance};
use crate::{Error, Result};

pub const TRACES_FILE: &str = "traces.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const RESULT_FILE: &str = "result.json";
pub const DECISION_FILE: &str = "best_decision.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const SCENARIO_FILE: &str = "scenario.toml";
pub const COMPARISON_TEXT_FILE: &str = "comparison.txt";
pub const COMPARISON_CSV_FILE: &str = "comparison.csv";

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes to JSON") + "\n"
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::nominal()),
    }
}

/// Disturbance overrides from the command line. `area` is one-based.
#[derive(Debug, Clone, Default)]
pub struct LoadOverride {
    pub area: Option<usize>,
    pub magnitude: Option<f64>,
    pub start_time: Option<f64>,
}

impl LoadOverride {
    fn apply(&self, base: &Disturbance, areas: usize) -> std::result::Result<Disturbance, CliError> {
        let mut d = base.clone();
        if let Some(area) = self.area {
            if area == 0 || area > areas {
                return Err(CliError::Validation(format!(
                    "--load-area {area} is outside 1..={areas}"
                )));
            }
            d.area = area - 1;
        }
        if let Some(m) = self.magnitude {
            d.magnitude = m;
        }
        if let Some(t) = self.start_time {
            d.start_time = t;
        }
        Ok(d)
    }
}

pub enum DecisionSource {
    Reference,
    File(PathBuf),
}

#[derive(Serialize)]
struct AreaReport {
    area: usize,
    label: String,
    #[serde(flatten)]
    metrics: ResponseMetrics,
}

#[derive(Serialize)]
struct SimulationReport {
    areas: Vec<AreaReport>,
    cost: f64,
    diverged_at: Option<f64>,
    band: SettlingBand,
}

pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub decision: DecisionSource,
    pub load: LoadOverride,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn simulate_cmd(args: &SimulateArgs) -> std::result::Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    ensure_valid(&cfg.system)?;
    let mut scenario = cfg.scenario();
    scenario.disturbance = args.load.apply(&scenario.disturbance, cfg.system.area_count())?;
    let decision = match &args.decision {
        DecisionSource::Reference => DecisionVector::reference(),
        DecisionSource::File(p) => read_json(p)?,
    };
    decision.check_shape(cfg.system.area_count())?;

    create_dir(&args.out)?;
    let inputs = json!({
        "command": "simulate",
        "scenario": &scenario,
        "decision": &decision,
        "band": cfg.band,
    });
    let mut manifest = RunManifest::start("simulate", &scenario, &inputs, args.seed)
        .expect_outputs(&[TRACES_FILE, METRICS_FILE]);
    manifest.write(&args.out)?;

    let result = (|| -> std::result::Result<Option<f64>, CliError> {
        let traces = simulate(&scenario.config, &decision, &scenario.disturbance, &scenario.options)?;
        write(&args.out, TRACES_FILE, traces.to_csv_string())?;
        let areas = area_metrics(&traces, cfg.band)?
            .into_iter()
            .enumerate()
            .map(|(i, metrics)| AreaReport {
                area: i + 1,
                label: area_label(i),
                metrics,
            })
            .collect();
        let report = SimulationReport {
            areas,
            cost: score_traces(&traces, &scenario),
            diverged_at: traces.diverged_at,
            band: cfg.band,
        };
        write(&args.out, METRICS_FILE, pretty_json(&report))?;
        Ok(traces.diverged_at)
    })();

    let status = match &result {
        Ok(None) => RunStatus::Complete,
        Ok(Some(_)) => RunStatus::Diverged,
        Err(_) => RunStatus::Failed,
    };
    manifest.finish(status);
    manifest.write(&args.out)?;
    match result? {
        Some(at) => Err(CliError::Diverged {
            at,
            traces: args.out.join(TRACES_FILE),
        }),
        None => Ok(()),
    }
}

pub struct TuneArgs {
    pub config: Option<PathBuf>,
    pub method: Method,
    pub profile: Profile,
    pub max_evaluations: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

fn with_budget(params: MethodParams, budget: Option<usize>) -> std::result::Result<MethodParams, CliError> {
    let Some(n) = budget else {
        return Ok(params);
    };
    Ok(match params {
        MethodParams::Bfo(_) => {
            return Err(CliError::Usage(
                "--max-evaluations applies to pso and gd; bfo's budget follows its loop counts".into(),
            ))
        }
        MethodParams::Pso(mut p) => {
            p.max_evaluations = Some(n);
            MethodParams::Pso(p)
        }
        MethodParams::Gd(mut p) => {
            p.max_evaluations = Some(n);
            MethodParams::Gd(p)
        }
    })
}

pub fn convergence_csv(history: &[f64]) -> String {
    let mut out = String::from("iteration,best_cost\n");
    for (k, c) in history.iter().enumerate() {
        out.push_str(&format!("{},{c}\n", k + 1));
    }
    out
}

pub fn tune_cmd(args: &TuneArgs) -> std::result::Result<OptResult, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let params = with_budget(cfg.method_params(args.method, args.profile), args.max_evaluations)?;
    let cfg = cfg.with_params(&params);
    let scenario = cfg.scenario();
    let bounds = cfg.bounds();
    let cost = CostFunction::new(scenario.clone())?;
    if bounds.dim() != cfg.system.decision_dimension() {
        return Err(CliError::Validation(format!(
            "bounds have {} entries, the system needs {}",
            bounds.dim(),
            cfg.system.decision_dimension()
        )));
    }
    bounds.check()?;

    create_dir(&args.out)?;
    let inputs = json!({
        "command": "tune",
        "scenario": &scenario,
        "bounds": &bounds,
        "method": args.method,
        "params": &params,
        "seed": args.seed,
    });
    let mut manifest = RunManifest::start("tune", &scenario, &inputs, args.seed)
        .with_method(args.method, params.clone())
        .expect_outputs(&[SCENARIO_FILE, RESULT_FILE, DECISION_FILE, CONVERGENCE_FILE]);
    manifest.write(&args.out)?;
    write(&args.out, SCENARIO_FILE, cfg.to_toml())?;

    let objective = |x: &[f64]| cost.cost(x);
    let result = minimize(&objective, &bounds, &params, args.seed, None).and_then(|r| {
        let decision = DecisionVector::from_slice(&r.best)?;
        write(&args.out, RESULT_FILE, pretty_json(&r))?;
        write(&args.out, DECISION_FILE, pretty_json(&decision))?;
        write(&args.out, CONVERGENCE_FILE, convergence_csv(&r.history))?;
        Ok(r)
    });
    manifest.finish(if result.is_ok() { RunStatus::Complete } else { RunStatus::Failed });
    manifest.write(&args.out)?;
    Ok(result?)
}

pub struct CompareArgs {
    pub runs: Vec<PathBuf>,
    pub plot_seconds: f64,
    pub seed: u64,
    pub out: PathBuf,
}

struct TunedRun {
    dir: PathBuf,
    config: RunConfig,
    result: OptResult,
}

fn load_tuned(dir: &Path) -> std::result::Result<(TunedRun, String), CliError> {
    let manifest = RunManifest::read(dir)?;
    let config = RunConfig::load(&dir.join(SCENARIO_FILE))?;
    let actual = scenario_hash(&config.scenario());
    if actual != manifest.scenario_hash {
        return Err(CliError::Validation(format!(
            "{}: {SCENARIO_FILE} does not match the scenario hash in its manifest",
            dir.display()
        )));
    }
    let result: OptResult = read_json(&dir.join(RESULT_FILE))?;
    Ok((
        TunedRun {
            dir: dir.to_path_buf(),
            config,
            result,
        },
        actual,
    ))
}

pub fn svg_file_name(area: usize) -> String {
    format!("delta_f_area{}.svg", area + 1)
}

pub fn compare_cmd(args: &CompareArgs) -> std::result::Result<(), CliError> {
    if args.runs.is_empty() {
        return Err(CliError::Usage("compare needs at least one tuning directory".into()));
    }
    let mut runs = Vec::with_capacity(args.runs.len());
    let mut hash = None;
    for dir in &args.runs {
        let (run, h) = load_tuned(dir)?;
        match &hash {
            None => hash = Some(h),
            Some(first) if *first != h => {
                return Err(Error::ScenarioMismatch(format!(
                    "{} was tuned on a different scenario from {}",
                    run.dir.display(),
                    runs.first().map_or(dir, |r: &TunedRun| &r.dir).display()
                ))
                .into())
            }
            Some(_) => {}
        }
        runs.push(run);
    }

    let base = &runs[0].config;
    let scenario = Scenario {
        disturbance: Disturbance::step(0, 0.01),
        ..base.scenario()
    };
    ensure_valid(&scenario.config)?;
    let mut labeled = Vec::with_capacity(runs.len());
    for run in &runs {
        let decision = DecisionVector::from_slice(&run.result.best)?;
        let traces = simulate(&scenario.config, &decision, &scenario.disturbance, &scenario.options)?;
        labeled.push(LabeledRun {
            label: run.result.method.label().to_string(),
            scenario: scenario.clone(),
            traces,
        });
    }
    let report = comparison_report(&labeled, base.band)?;

    let areas = scenario.config.area_count();
    let svgs: Vec<String> = (0..areas).map(svg_file_name).collect();
    let mut expected = vec![COMPARISON_TEXT_FILE, COMPARISON_CSV_FILE];
    expected.extend(svgs.iter().map(String::as_str));

    create_dir(&args.out)?;
    let inputs = json!({
        "command": "compare",
        "scenario": &scenario,
        "band": base.band,
        "decisions": runs.iter().map(|r| (&r.result.method, &r.result.best)).collect::<Vec<_>>(),
        "plot_seconds": args.plot_seconds,
    });
    let mut manifest = RunManifest::start("compare", &scenario, &inputs, args.seed).expect_outputs(&expected);
    manifest.write(&args.out)?;

    write(&args.out, COMPARISON_TEXT_FILE, report.render_text())?;
    write(&args.out, COMPARISON_CSV_FILE, report.to_csv())?;
    let times = labeled
        .iter()
        .map(|r| &r.traces.times)
        .max_by_key(|t| t.len())
        .expect("at least one run");
    for (area, name) in svgs.iter().enumerate() {
        let series: Vec<Series<'_>> = labeled
            .iter()
            .map(|r| Series {
                label: &r.label,
                values: &r.traces.delta_f[area],
            })
            .collect();
        let title = format!("Frequency deviation, {}", area_label(area));
        let svg = line_plot(&title, "Time (s)", "Δf (Hz)", times, &series, args.plot_seconds);
        write(&args.out, name, svg)?;
    }
    manifest.finish(RunStatus::Complete);
    manifest.write(&args.out)?;
    Ok(())
}

/// Writes the nominal configuration to `out`, or returns it when `out` is `None`.
pub fn nominal_config_cmd(out: Option<&Path>) -> Result<Option<String>> {
    let text = RunConfig::nominal().to_toml();
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                create_dir(parent)?;
            }
            fs::write(path, text).map_err(|e| Error::io(path, e))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

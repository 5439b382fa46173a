use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clockrace_core::verify::suite::{run_suite, Suite, SuiteOptions};
use clockrace_core::{run_ensemble, Model, ModelConfig, ParsedTrajectory, StopCondition, StopReason, Trajectory};

use crate::config::{RunFile, RunSpec};
use crate::{parse_params, CliError, ModelArgs, Observable, RunArgs, SummarizeArgs, VerifyArgs};

pub const MANIFEST: &str = "manifest.tsv";
/// Wall-clock timings live apart from the manifest so that the manifest is
/// reproducible byte for byte.
pub const TIMING: &str = "timing.tsv";

pub fn trajectory_file_name(index: usize) -> String {
    format!("traj_{index:05}.tsv")
}

fn load_run_file(path: &Path) -> Result<RunFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    RunFile::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn manifest(spec: &RunSpec, model: &Model, runs: &[Trajectory]) -> String {
    let mut text = String::from("# clockrace manifest 1\n");
    let _ = writeln!(text, "# model\t{}", spec.model.name);
    for (k, v) in &spec.model.params {
        let _ = writeln!(text, "# param\t{k}\t{v}");
    }
    let _ = writeln!(text, "# model_hash\t{}", model.hash());
    let _ = writeln!(text, "# sampler\t{}", spec.sampler);
    let _ = writeln!(text, "# base_seed\t{}", spec.seed);
    match spec.stop {
        StopCondition::EndTime(t) => writeln!(text, "# stop\tend-time\t{t:.16e}"),
        StopCondition::EventCount(n) => writeln!(text, "# stop\tevent-count\t{n}"),
        StopCondition::Stalled => writeln!(text, "# stop\tstalled"),
    }
    .expect("writing to a string");
    text.push_str("index\tseed\tevents\tfinal_time\tstop\tfile\n");
    for (i, t) in runs.iter().enumerate() {
        let _ = writeln!(
            text,
            "{i}\t{}\t{}\t{:.16e}\t{}\t{}",
            t.rng_seed,
            t.events.len(),
            t.final_time,
            t.stop.as_str(),
            trajectory_file_name(i)
        );
    }
    text
}

pub fn run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let base = match &args.config {
        Some(path) => load_run_file(path)?,
        None => RunFile::default(),
    };
    let (spec, model) = RunSpec::from_file(base.overridden_by(args.to_file()?))?;
    fs::create_dir_all(&spec.output)?;
    let started = Instant::now();
    let runs = run_ensemble(&model, &spec.sampler, spec.seed, spec.trajectories, spec.stop, spec.workers)?;
    let elapsed = started.elapsed().as_secs_f64();
    for (i, t) in runs.iter().enumerate() {
        fs::write(spec.output.join(trajectory_file_name(i)), t.to_string())?;
    }
    fs::write(spec.output.join(MANIFEST), manifest(&spec, &model, &runs))?;
    fs::write(
        spec.output.join(TIMING),
        format!("workers\twall_seconds\n{}\t{elapsed:.6}\n", spec.workers),
    )?;
    writeln!(
        out,
        "wrote {} trajectories of {} with {} to {}",
        runs.len(),
        spec.model,
        spec.sampler,
        spec.output.display()
    )?;
    if let StopCondition::EventCount(_) = spec.stop {
        let stalled: Vec<usize> = runs
            .iter()
            .enumerate()
            .filter(|(_, t)| t.stop == StopReason::Stalled && t.events.is_empty())
            .map(|(i, _)| i)
            .collect();
        if let Some(first) = stalled.first() {
            return Err(CliError::Stalled(format!(
                "{} trajectories stalled before any event (first: {})",
                stalled.len(),
                trajectory_file_name(*first)
            )));
        }
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse().map_err(CliError::Config)?;
    let mut options = SuiteOptions::default();
    if let Some(seed) = args.seed {
        options.seed = seed;
    }
    if let Some(workers) = args.workers {
        options.workers = workers.max(1);
    }
    let checks = run_suite(suite, &options);
    writeln!(out, "status\tcheck\tstatistic\tp_value\tbound")?;
    for check in &checks {
        writeln!(out, "{check}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "# {} of {} checks passed", checks.len() - failed, checks.len())?;
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: checks.len(),
        });
    }
    Ok(())
}

fn trajectory_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("traj_") && n.ends_with(".tsv"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Input("no trajectory files given".into()));
    }
    Ok(files)
}

fn load_trajectory(path: &Path, models: &mut BTreeMap<ModelConfig, Model>) -> Result<(Trajectory, Model), CliError> {
    let input = |message: String| CliError::Input(format!("{}: {message}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| input(e.to_string()))?;
    let parsed: ParsedTrajectory = text.parse().map_err(|e: clockrace_core::trajectory::ParseError| input(e.to_string()))?;
    let model = match models.get(&parsed.model) {
        Some(m) => m.clone(),
        None => {
            let m = parsed.model.build().map_err(|e| input(e.to_string()))?;
            models.insert(parsed.model.clone(), m.clone());
            m
        }
    };
    if model.hash() != parsed.model_hash {
        return Err(input("model hash does not match the model it names".into()));
    }
    if let Some(e) = parsed.events.iter().find(|e| e.clock.index() >= model.clock_count()) {
        return Err(input(format!("event {} names unknown clock {}", e.seq, e.clock)));
    }
    Ok((parsed.into_trajectory(&model), model))
}

fn class_counts(counts: &BTreeMap<String, i64>) -> String {
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(",")
    }
}

pub fn summarize(args: &SummarizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let files = trajectory_files(&args.paths)?;
    let mut models = BTreeMap::new();
    let mut loaded = Vec::with_capacity(files.len());
    for path in &files {
        loaded.push((path, load_trajectory(path, &mut models)?));
    }
    match args.observable {
        Observable::EventCount => {
            writeln!(out, "file\tevents\tfinal_time\tstop")?;
            for (path, (t, _)) in &loaded {
                writeln!(out, "{}\t{}\t{:.16e}\t{}", path.display(), t.events.len(), t.final_time, t.stop.as_str())?;
            }
        }
        Observable::FinalState => {
            let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
            for (path, (t, model)) in &loaded {
                let state = t
                    .replay(model)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                *histogram.entry(class_counts(&state.aggregate_by_class())).or_insert(0) += 1;
            }
            writeln!(out, "final_state\tcount")?;
            for (state, count) in histogram {
                writeln!(out, "{state}\t{count}")?;
            }
        }
        Observable::Interarrival => {
            writeln!(out, "file\tseq\tinterarrival")?;
            for (path, (t, _)) in &loaded {
                for (seq, gap) in t.interarrivals().enumerate() {
                    writeln!(out, "{}\t{seq}\t{gap:.16e}", path.display())?;
                }
            }
        }
    }
    Ok(())
}

pub fn graph(args: &ModelArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let name = args
        .model
        .clone()
        .ok_or_else(|| CliError::Config(format!("--model is required; one of {}", ModelConfig::NAMES.join(", "))))?;
    let mut config = ModelConfig::new(name);
    for (k, v) in parse_params(&args.params)? {
        config.params.insert(k, v.as_str().unwrap_or_default().to_string());
    }
    let model = config.build().map_err(|e| CliError::Config(e.to_string()))?;
    write!(out, "{}", model.graph().edge_list())?;
    Ok(())
}

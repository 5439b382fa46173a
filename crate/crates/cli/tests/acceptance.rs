//! Acceptance checks. Prints one PASS/FAIL line per check and exits non-zero
//! if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use clockrace_core::sampler::{NextReaction, PrefixSumTree, PutativeQueue};
use clockrace_core::verify::suite::{
    atomic_b_incidence, atomic_b_share, ctmc_total_variation, hazard_roundtrip, sampler_equivalence, SuiteOptions,
};
use clockrace_core::{ClockId, ClockRng, HazardSpec, Kernel, ModelConfig, SamplerKind};
use clockrace_core::models::{birth_death, sir, SirConfig};

const SEED: u64 = 20_240_601;

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget_secs: f64) -> (bool, String) {
    let secs = elapsed.as_secs_f64();
    (secs < budget_secs, format!("runtime {secs:.1} s < {budget_secs} s"))
}

fn options() -> SuiteOptions {
    SuiteOptions {
        seed: SEED,
        ..SuiteOptions::default()
    }
}

fn sampler_equivalence_check() -> Outcome {
    let started = Instant::now();
    let checks = sampler_equivalence(&options());
    let (fast, runtime) = within(started.elapsed(), 60.0);
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
    let min_p = checks.iter().filter_map(|c| c.p_value).fold(1.0, f64::min);
    outcome(
        failed.is_empty() && fast,
        format!(
            "{} comparisons against first-reaction, min p = {min_p:.4} (> 0.01), {runtime}{}",
            checks.len(),
            failed.iter().map(|f| format!("\n    {f}")).collect::<String>()
        ),
    )
}

fn atomic_competing_risks() -> Outcome {
    let started = Instant::now();
    let share = match atomic_b_share(&SamplerKind::Direct, 10_000, SEED, 1) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let incidence = atomic_b_incidence(1e-4);
    let (fast, runtime) = within(started.elapsed(), 10.0);
    outcome(
        (share - 0.25).abs() <= 0.01 && (incidence - 0.25).abs() <= 1e-4 && fast,
        format!("empirical P(B) = {share:.4} (0.25 +/- 0.01), product integral {incidence:.6} (0.25 +/- 1e-4), {runtime}"),
    )
}

fn ctmc_agreement() -> Outcome {
    let started = Instant::now();
    let chains = [
        ("sir N=3", sir(&SirConfig { individuals: 3, ..Default::default() }).unwrap()),
        ("birth-death", birth_death(1.0, 1.0, 1, 100).unwrap()),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, (label, model)) in chains.iter().enumerate() {
        match ctmc_total_variation(model, &SamplerKind::Direct, 1.0, 10_000, SEED + i as u64, 1) {
            Ok(tv) => {
                passed &= tv < 0.02;
                parts.push(format!("{label} TV = {tv:.4}"));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    let (fast, runtime) = within(started.elapsed(), 30.0);
    outcome(passed && fast, format!("{} (< 0.02), {runtime}", parts.join(", ")))
}

fn hazard_round_trip() -> Outcome {
    let started = Instant::now();
    let sup = hazard_roundtrip(&HazardSpec::weibull(2.0, 1.0).unwrap(), 100_000, 1.0, SEED);
    let (fast, runtime) = within(started.elapsed(), 10.0);
    outcome(sup < 0.05 && fast, format!("weibull(2,1) sup |H_est - t^2| on [0,1] = {sup:.4} (< 0.05), {runtime}"))
}

fn budget_conservation() -> Outcome {
    let model = ModelConfig::new("modulated").param("clocks", 8).build().unwrap();
    let sampler = Box::new(NextReaction::with_capacity(model.clock_count()));
    let mut kernel = Kernel::with_sampler(&model, sampler, SEED).unwrap();
    let (mut worst, mut at_atoms) = (0.0f64, 0);
    for step in 0..10_000 {
        let Ok(Some(event)) = kernel.step(f64::INFINITY) else {
            return outcome(false, format!("stopped early at step {step}"));
        };
        let audit = kernel.sampler().last_fire().expect("a clock just fired");
        assert_eq!(audit.clock, event.clock);
        if audit.at_atom && audit.consumed >= audit.drawn_budget {
            at_atoms += 1;
            continue;
        }
        worst = worst.max((audit.consumed - audit.drawn_budget).abs());
    }
    outcome(
        worst <= 1e-9,
        format!("10000 events, max |consumed - drawn| = {worst:.2e} (<= 1e-9), {at_atoms} fired at an atom"),
    )
}

fn prefix_tree_workload(rng: &mut ClockRng) -> bool {
    let leaves = 1 + (rng.uniform() * 300.0) as usize;
    let mut tree = PrefixSumTree::with_capacity(leaves);
    let mut values = vec![0.0; leaves];
    for _ in 0..200 {
        let i = (rng.uniform() * leaves as f64) as usize;
        // integers keep every partial sum exact
        let v = if rng.uniform() < 0.2 { 0.0 } else { (rng.uniform() * 100.0).floor() };
        tree.set(i, v);
        values[i] = v;
        let total: f64 = values.iter().sum();
        if tree.total() != total {
            return false;
        }
        if total == 0.0 {
            if tree.find(1.0).is_some() {
                return false;
            }
            continue;
        }
        for target in [rng.uniform() * total, (rng.uniform() * total).ceil().max(1.0), total] {
            let mut prefix = 0.0;
            let expected = values.iter().position(|v| {
                prefix += v;
                prefix >= target
            });
            if tree.find(target) != expected {
                return false;
            }
        }
    }
    true
}

fn queue_workload(rng: &mut ClockRng) -> bool {
    let clocks = 1 + (rng.uniform() * 200.0) as u32;
    let mut queue = PutativeQueue::new();
    let mut reference = std::collections::BTreeMap::new();
    for _ in 0..300 {
        let clock = (rng.uniform() * clocks as f64) as u32;
        if rng.uniform() < 0.7 {
            let time = rng.uniform() * 1e3;
            queue.set(ClockId(clock), time);
            reference.insert(clock, time);
        } else {
            queue.remove(ClockId(clock));
            reference.remove(&clock);
        }
    }
    let mut expected: Vec<(u32, f64)> = reference.into_iter().collect();
    expected.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let popped: Vec<(u32, f64)> = std::iter::from_fn(|| queue.pop().map(|(c, t)| (c.0, t))).collect();
    popped == expected
}

fn data_structures() -> Outcome {
    let mut rng = ClockRng::from_seed(SEED);
    let trees = (0..1000).filter(|_| prefix_tree_workload(&mut rng)).count();
    let queues = (0..1000).filter(|_| queue_workload(&mut rng)).count();
    outcome(
        trees == 1000 && queues == 1000,
        format!("prefix tree {trees}/1000 and queue {queues}/1000 workloads agree exactly"),
    )
}

fn seconds_per_event(sites: usize, kind: &SamplerKind) -> f64 {
    let model = ModelConfig::new("ring").param("sites", sites).build().unwrap();
    let mut kernel = Kernel::new(&model, kind, SEED).unwrap();
    for _ in 0..20_000 {
        kernel.step(f64::INFINITY).unwrap();
    }
    let steps = 200_000;
    (0..3)
        .map(|_| {
            let started = Instant::now();
            for _ in 0..steps {
                kernel.step(f64::INFINITY).unwrap();
            }
            started.elapsed().as_secs_f64() / steps as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn scaling() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for kind in [SamplerKind::Direct, SamplerKind::NextToFire] {
        let small = seconds_per_event(1 << 10, &kind);
        let large = seconds_per_event(1 << 14, &kind);
        let ratio = large / small;
        passed &= ratio <= 3.0;
        parts.push(format!("{kind} {:.0} ns -> {:.0} ns (x{ratio:.2})", small * 1e9, large * 1e9));
    }
    outcome(passed, format!("per-event time 2^10 -> 2^14 ring clocks: {} (<= x3)", parts.join(", ")))
}

fn run_cli(output: &Path, workers: u32) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_clockrace"))
        .args(["run", "--model", "sir", "--param", "N=10", "--param", "recover=weibull(2,1)"])
        .args(["--sampler", "hierarchical", "--seed", "7", "--t-end", "5", "--trajectories", "40"])
        .arg("--workers")
        .arg(workers.to_string())
        .arg("--output")
        .arg(output)
        .status()
        .map_err(|e| e.to_string())?;
    status.success().then_some(()).ok_or_else(|| format!("exit status {status}"))
}

fn reproducible_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.tsv")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let dirs: Vec<_> = ["a", "b", "c"].iter().map(|d| root.path().join(d)).collect();
    for (dir, workers) in dirs.iter().zip([1, 1, 4]) {
        if let Err(e) = run_cli(dir, workers) {
            return outcome(false, format!("run failed: {e}"));
        }
    }
    let [a, b, c] = [&dirs[0], &dirs[1], &dirs[2]].map(|d| reproducible_files(d));
    outcome(
        a.len() == 41 && a == b && a == c,
        format!("{} files byte-identical across two runs and across --workers 1 vs 4", a.len()),
    )
}

fn main() {
    let checks: [Check; 8] = [
        ("sampler equivalence", sampler_equivalence_check),
        ("atomic competing risks", atomic_competing_risks),
        ("markov chain oracle agreement", ctmc_agreement),
        ("hazard round trip", hazard_round_trip),
        ("next-reaction budget conservation", budget_conservation),
        ("data-structure oracles", data_structures),
        ("per-event cost scaling", scaling),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        let result = check();
        failures += usize::from(!result.passed);
        println!("{} {name}: {}", if result.passed { "PASS" } else { "FAIL" }, result.detail);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance checks failed");
        std::process::exit(1);
    }
}

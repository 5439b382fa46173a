use clockrace_core::sampler::{PrefixSumTree, PutativeQueue};
use clockrace_core::{
    evaluate_enabling, Atom, ClockId, ClockStatus, EnablingOutcome, HazardSpec, JumpMark, Kernel, ModelConfig,
    SamplerKind, SystemState,
};
use proptest::prelude::*;

fn continuous_spec() -> impl Strategy<Value = HazardSpec> {
    prop_oneof![
        (0.1..5.0f64).prop_map(|r| HazardSpec::exponential(r).unwrap()),
        (0.5..4.0f64, 0.2..3.0f64).prop_map(|(k, s)| HazardSpec::weibull(k, s).unwrap()),
        (0.5..5.0f64, 0.2..3.0f64).prop_map(|(k, r)| HazardSpec::gamma(k, r).unwrap()),
        (0.0..1.0f64, 0.1..3.0f64).prop_map(|(a, w)| HazardSpec::uniform(a, a + w).unwrap()),
        (0.1..2.0f64, 0.0..3.0f64, 0.1..3.0f64)
            .prop_map(|(b, r0, r1)| HazardSpec::piecewise(vec![0.0, b], vec![r0, r1]).unwrap()),
    ]
}

fn hazard_spec() -> impl Strategy<Value = HazardSpec> {
    (continuous_spec(), prop::collection::vec((0.05..3.0f64, 0.0..0.9f64), 0..3)).prop_map(|(spec, atoms)| {
        let mut atoms: Vec<Atom> = atoms.into_iter().map(|(o, m)| Atom::new(o, m)).collect();
        atoms.sort_by(|a, b| a.offset.total_cmp(&b.offset));
        atoms.dedup_by(|a, b| a.offset == b.offset);
        spec.with_atoms(atoms).unwrap()
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

proptest! {
    #[test]
    fn survival_is_a_decreasing_exponential_of_the_time_process(spec in hazard_spec()) {
        prop_assert_eq!(spec.survival(0.0), 1.0);
        let mut last = 1.0;
        for i in 0..=100 {
            let t = i as f64 * 0.04;
            let s = spec.survival(t);
            prop_assert!(s <= last + 1e-15, "survival rises at {}", t);
            prop_assert!(close(s, (-spec.time_process(0.0, t)).exp(), 1e-10), "t={} s={}", t, s);
            last = s;
        }
    }

    #[test]
    fn time_process_is_additive(spec in hazard_spec(), a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let mut v = [a, a + b, a + b + c];
        v.sort_by(f64::total_cmp);
        let whole = spec.time_process(v[0], v[2]);
        let parts = spec.time_process(v[0], v[1]) + spec.time_process(v[1], v[2]);
        prop_assume!(whole.is_finite());
        prop_assert!((whole - parts).abs() <= 1e-10 * whole.max(1.0));
    }

    #[test]
    fn atoms_scale_the_left_limit(spec in hazard_spec()) {
        for atom in spec.atoms() {
            let left = spec.survival_left(atom.offset);
            prop_assert!(close(spec.survival(atom.offset), left * (1.0 - atom.mass), 1e-12));
        }
    }

    #[test]
    fn inversion_recovers_the_time(spec in hazard_spec(), t in 0.01..3.0f64) {
        prop_assume!(spec.hazard_at(t) > 0.0 && spec.survival(t) > 1e-8);
        let budget = spec.time_process(0.0, t);
        let back = spec.invert_conditional(0.0, clockrace_core::LogSurvival::from_budget(budget));
        prop_assert!(close(back, t, 1e-9), "{} -> {}", t, back);
    }

    #[test]
    fn apply_mark_composes(a in -3i64..3, b in -3i64..3, c in -3i64..3, d in -3i64..3) {
        let start = SystemState::from_counts([("x", 10), ("y", 10)]);
        let m1 = JumpMark::new([("x", a), ("y", b)]);
        let m2 = JumpMark::new([("y", c), ("z", d.abs())]);
        let sequential = start.with_mark(&m1, 1.0).unwrap().with_mark(&m2, 1.0).unwrap();
        let combined = start.with_mark(&m1.combined(&m2), 1.0).unwrap();
        prop_assert_eq!(sequential.counts(), combined.counts());
    }

    #[test]
    fn queue_pops_in_sorted_order(ops in prop::collection::vec((0u32..64, 0.0..100.0f64, any::<bool>()), 1..300)) {
        let mut queue = PutativeQueue::new();
        let mut reference = std::collections::BTreeMap::new();
        for (clock, time, keep) in ops {
            if keep {
                queue.set(ClockId(clock), time);
                reference.insert(clock, time);
            } else {
                queue.remove(ClockId(clock));
                reference.remove(&clock);
            }
        }
        let mut expected: Vec<(u32, f64)> = reference.into_iter().collect();
        expected.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut popped = Vec::new();
        while let Some((c, t)) = queue.pop() {
            popped.push((c.0, t));
        }
        let times: Vec<f64> = popped.iter().map(|p| p.1).collect();
        let expected_times: Vec<f64> = expected.iter().map(|p| p.1).collect();
        prop_assert_eq!(times, expected_times);
    }

    #[test]
    fn prefix_tree_matches_a_scan(
        updates in prop::collection::vec((0usize..200, 0.0..10.0f64), 1..400),
        u in 0.0..1.0f64,
    ) {
        let mut tree = PrefixSumTree::with_capacity(200);
        let mut values = vec![0.0; 200];
        for (i, v) in updates {
            tree.set(i, v);
            values[i] = v;
        }
        let total: f64 = values.iter().sum();
        prop_assert!((tree.total() - total).abs() <= 1e-12 * total.max(1.0));
        prop_assume!(total > 0.0);
        let target = (u * tree.total()).max(f64::MIN_POSITIVE);
        let found = tree.find(target).unwrap();
        let before: f64 = values[..found].iter().sum();
        prop_assert!(values[found] > 0.0);
        prop_assert!(before < target * (1.0 + 1e-12) && target <= (before + values[found]) * (1.0 + 1e-12));
    }
}

fn models() -> Vec<ModelConfig> {
    vec![
        ModelConfig::new("sir").param("N", 4).param("recover", "weibull(2,1)"),
        ModelConfig::new("rabbits").param("portions", "1,2").param("food", 3),
        ModelConfig::new("birth-death").param("cap", 8),
        ModelConfig::new("atomic"),
        ModelConfig::new("poisson"),
        ModelConfig::new("race"),
        ModelConfig::new("ring").param("sites", 16).param("tokens", 2),
        ModelConfig::new("modulated").param("clocks", 4),
    ]
}

fn samplers() -> Vec<SamplerKind> {
    SamplerKind::NAMES.iter().map(|n| n.parse().unwrap()).collect()
}

/// Every clock outside the affected set of the fired clock keeps its
/// status, checked on states visited by simulation.
#[test]
fn dependency_graph_is_sound() {
    for config in models() {
        let model = config.build().unwrap();
        for seed in 0..5 {
            let mut kernel = Kernel::new(&model, &SamplerKind::FirstReaction, seed).unwrap();
            for _ in 0..40 {
                let now = kernel.now();
                let state = kernel.state().clone();
                let statuses: Vec<ClockStatus> = model.clocks().iter().map(|c| kernel.status(c.id).clone()).collect();
                for fired in model.clocks() {
                    let Ok(after) = state.with_mark(&fired.mark, now + 0.5) else { continue };
                    let affected = model.graph().affected(fired.id);
                    assert!(affected.contains(&fired.id));
                    for clock in model.clocks().iter().filter(|c| !affected.contains(&c.id)) {
                        let outcome = evaluate_enabling(clock, &after, now + 0.5, &statuses[clock.id.index()]);
                        assert_eq!(outcome, EnablingOutcome::UnchangedSinceLastQuery, "{} {}", config, clock.label);
                    }
                }
                if kernel.step(f64::INFINITY).map_or(true, |e| e.is_none()) {
                    break;
                }
            }
        }
    }
}

#[test]
fn enabling_ignores_unread_substates() {
    for config in models() {
        let model = config.build().unwrap();
        let mut kernel = Kernel::new(&model, &SamplerKind::Direct, 3).unwrap();
        for _ in 0..20 {
            for clock in model.clocks() {
                let mut perturbed = kernel.state().clone();
                for (key, value) in kernel.state().iter() {
                    if !clock.reads.contains(key) {
                        perturbed.set(key.clone(), value + 7, kernel.now());
                    }
                }
                perturbed.set("unrelated".into(), 4, kernel.now());
                let fresh = |s: &SystemState| evaluate_enabling(clock, s, kernel.now(), &ClockStatus::Disabled);
                assert_eq!(fresh(kernel.state()), fresh(&perturbed), "{} {}", config, clock.label);
                assert_eq!(fresh(kernel.state()), fresh(kernel.state()));
            }
            if kernel.step(f64::INFINITY).map_or(true, |e| e.is_none()) {
                break;
            }
        }
    }
}

/// After every step the cached statuses and the sampler's holdings match a
/// fresh evaluation, and times strictly increase.
#[test]
fn kernel_audit_sweep() {
    for config in models() {
        let model = config.build().unwrap();
        for kind in samplers() {
            for seed in 0..3 {
                let mut kernel = Kernel::new(&model, &kind, seed).unwrap();
                kernel.audit().unwrap();
                let mut last = 0.0;
                for _ in 0..200 {
                    match kernel.step(f64::INFINITY) {
                        Ok(Some(event)) => {
                            assert!(event.time > last || (event.seq == 0 && event.time >= 0.0), "{config} {kind}");
                            last = event.time;
                        }
                        Ok(None) | Err(_) => break,
                    }
                    kernel.audit().unwrap_or_else(|e| panic!("{config} {kind}: {e}"));
                }
            }
        }
    }
}

#[test]
fn trajectories_are_a_function_of_the_seed() {
    for config in models() {
        let model = config.build().unwrap();
        for kind in samplers() {
            let run = |seed| {
                clockrace_core::run_trajectory(&model, &kind, seed, clockrace_core::StopCondition::EventCount(50))
                    .unwrap()
                    .to_string()
            };
            assert_eq!(run(11), run(11), "{config} {kind}");
        }
    }
}

use rearrange::harness::{
    library, render_svg, run_experiment, run_trial, summarize, write_summary_csv, write_traces,
    write_trials_csv, ExperimentError, ExperimentSpec, Scenario, ScenarioError, SummaryRow, TrialRecord,
};
use rearrange::physics::{parse_trace, replay};
use rearrange::planner::{NoEvents, Perturbation};

const MINIMAL: &str = r#"
name = "relocate-1"

[workspace]
x_min = -0.45
x_max = 0.45
y_min = 0.0
y_max = 0.7

[arm]
base = [0.0, -0.4, 1.5707963267948966]
links = [0.5, 0.45, 0.35, 0.08]
joint_limits = [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]
start = [1.6484250546500896, -1.998603716298472, -1.4042617464875164, 1.7544404081358695]

[task]
kind = "relocate"
target = 0
goal = [0.15, 0.3]

[[objects]]
shape = { kind = "box", width = 0.04, height = 0.04 }
pose = [-0.15, 0.3, 0.0]
"#;

fn minimal() -> Scenario {
    Scenario::from_toml(MINIMAL).expect("minimal scenario parses")
}

#[test]
fn minimal_scenario_loads_and_round_trips() {
    let s = minimal();
    let setup = s.build().unwrap();
    assert!(setup.start.valid);
    assert_eq!(setup.world.object_count(), 1);
    assert_eq!(setup.task.name(), "relocate");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    s.save(&path).unwrap();
    let back = Scenario::load(&path).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.to_toml().unwrap(), s.to_toml().unwrap());
}

#[test]
fn library_scenarios_round_trip_and_start_outside_goal() {
    for name in library::NAMES {
        let s = library::by_name(name).unwrap();
        assert_eq!(Scenario::from_toml(&s.to_toml().unwrap()).unwrap(), s, "{name}");
        let setup = s.build().unwrap();
        assert!(setup.start.valid, "{name}");
        assert!(!setup.task.goal(&setup.world, &setup.start), "{name}");
    }
    assert!(library::by_name("nope").is_none());
}

#[test]
fn object_outside_workspace_is_rejected() {
    let mut s = minimal();
    s.objects[0].pose = [0.6, 0.3, 0.0];
    let e = s.build().err().expect("must fail");
    assert!(matches!(e, ScenarioError::Invalid(_)));
    assert!(e.to_string().contains("objects[0]"), "{e}");
}

#[test]
fn overlapping_objects_are_rejected() {
    let mut s = minimal();
    let mut twin = s.objects[0].clone();
    twin.pose[0] += 0.01;
    s.objects.push(twin);
    assert!(matches!(s.build(), Err(ScenarioError::Invalid(m)) if m.contains("initial state")));
}

#[test]
fn bad_fields_are_reported() {
    let e = Scenario::from_toml(&MINIMAL.replace("goal = ", "gaol = ")).unwrap_err();
    assert!(matches!(e, ScenarioError::Parse(_)));
    assert!(e.to_string().contains("line"), "{e}");

    let mut s = minimal();
    s.arm.start.pop();
    assert!(matches!(s.build(), Err(ScenarioError::Invalid(m)) if m.contains("arm.start")));

    let mut s = minimal();
    s.task = rearrange::tasks::TaskSpec::Relocate { target: 3, goal: [0.0, 0.3], radius: 0.1 };
    assert!(matches!(s.build(), Err(ScenarioError::Task(_))));

    let mut s = minimal();
    s.objects[0].shape = rearrange::harness::ShapeSpec::Box { width: -1.0, height: 0.1 };
    assert!(matches!(s.build(), Err(ScenarioError::Shape { .. })));

    let mut s = minimal();
    s.reduce_rate = Some(0.0);
    assert!(s.build().is_err());
}

#[test]
fn reduce_rate_coarsens_only_the_planner_model() {
    let mut s = library::by_name("grasp-shapes").unwrap();
    s.reduce_rate = Some(0.1);
    let setup = s.build().unwrap();
    let count = |w: &rearrange::physics::World, i: usize| w.object_polygon(&setup.start, i).vertices.len();
    // Object 0 is the target and keeps its shape.
    assert_eq!(count(&setup.world, 0), count(&setup.planner_world, 0));
    for i in 1..=4 {
        assert_eq!(count(&setup.world, i), 100);
        assert_eq!(count(&setup.planner_world, i), 10);
    }
}

fn record(trial: usize, success: bool, time: f64, nodes: usize) -> TrialRecord {
    let s = minimal().build().unwrap();
    TrialRecord {
        trial,
        planner: "dhrrt".into(),
        seed: trial as u64,
        success,
        planning_time_s: time,
        nodes_added: nodes,
        nodes_per_s: nodes as f64 / time,
        replans: 0,
        segments_executed: 0,
        expansions: nodes,
        start_state: s.start.clone(),
        final_state: s.start,
        trace: None,
    }
}

#[test]
fn summary_uses_successful_times_only() {
    let mut recs: Vec<_> = (0..9).map(|k| record(k, true, (k + 1) as f64, 10)).collect();
    recs.push(record(9, false, 100.0, 55));
    let s = summarize(&recs);
    assert_eq!((s.trials, s.successes), (10, 9));
    assert!((s.success_rate - 0.9).abs() < 1e-12);
    assert!((s.time_mean.unwrap() - 5.0).abs() < 1e-12);
    // Population std of 1..=9.
    assert!((s.time_std.unwrap() - (60.0f64 / 9.0).sqrt()).abs() < 1e-12);
    assert!((s.nodes_per_s - 145.0 / 145.0).abs() < 1e-12);

    let none = summarize(&[record(0, false, 2.0, 4)]);
    assert_eq!(none.time_mean, None);
    assert_eq!(none.success_rate, 0.0);
}

fn quick_spec(planner: &str, trials: usize) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(library::by_name("grasp-10").unwrap(), planner, trials, 40);
    spec.time_budget = Some(8.0);
    spec
}

#[test]
fn batches_are_byte_identical() {
    let csv = || {
        let (recs, _) = run_experiment(&quick_spec("dhrrt", 3)).unwrap();
        let mut out = Vec::new();
        write_trials_csv(&mut out, &recs).unwrap();
        String::from_utf8(out).unwrap()
    };
    let a = csv();
    assert_eq!(a, csv());
    let lines: Vec<_> = a.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "trial,planner,seed,success,planning_time_s,nodes_added,nodes_per_s,replans,segments_executed"
    );
    assert!(lines[1].starts_with("0,dhrrt,40,"));
}

#[test]
fn summary_csv_has_one_row_per_condition() {
    let (_, s) = run_experiment(&quick_spec("kdrrt", 1)).unwrap();
    let rows = vec![
        SummaryRow::new("grasp-10", "kdrrt", None, None, &s),
        SummaryRow::new("grasp-10", "kdrrt", Some(2.0), Some(0.1), &s),
    ];
    let mut out = Vec::new();
    write_summary_csv(&mut out, &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("scenario,planner,perturb_interval,reduce_rate,"));
    assert!(lines[1].starts_with("grasp-10,kdrrt,,,1,"));
    assert!(lines[2].starts_with("grasp-10,kdrrt,2.0,0.1,1,"));
}

#[test]
fn perturbation_causes_more_replans() {
    let mut calm = quick_spec("dhrrt", 20);
    calm.time_budget = Some(5.0);
    let mut shaken = calm.clone();
    shaken.perturb = Some(Perturbation { interval: 0.5, speed: 0.4, duration: 0.1 });
    let replans = |spec: &ExperimentSpec| -> usize {
        run_experiment(spec).unwrap().0.iter().map(|r| r.replans).sum()
    };
    let (a, b) = (replans(&calm), replans(&shaken));
    assert!(b > a, "replans {b} with perturbation vs {a} without");
}

#[test]
fn traces_replay_to_the_recorded_final_state() {
    let mut spec = quick_spec("dhrrt", 2);
    spec.record_traces = true;
    spec.perturb = Some(Perturbation { interval: 1.0, speed: 0.4, duration: 0.1 });
    let (recs, _) = run_experiment(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = write_traces(dir.path(), &recs).unwrap();
    assert_eq!(paths.len(), 2);
    assert!(paths[0].ends_with("dhrrt_trial_0.trace"));
    let world = spec.scenario.build().unwrap().world;
    for (p, r) in paths.iter().zip(&recs) {
        let events = parse_trace(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(replay(&world, &events).unwrap(), r.final_state);
    }
}

#[test]
fn svg_shows_every_part_of_the_scene() {
    let s = library::by_name("sort-6").unwrap();
    let setup = s.build().unwrap();
    let (rec, _) = {
        let mut spec = ExperimentSpec::new(s.clone(), "dhrrt", 1, 0);
        spec.time_budget = Some(3.0);
        spec.record_traces = true;
        run_trial(&spec, 0, &mut NoEvents).unwrap()
    };
    let path = rec.trace.unwrap().gripper_path();
    let svg = render_svg(&setup.world, &rec.final_state, &setup.classes, Some(2), &path);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let polygons = svg.matches("<polygon").count();
    // Objects, four arm links and the three gripper parts.
    assert_eq!(polygons, 6 + 4 + 3);
    assert!(svg.contains("#4e79a7") && svg.contains("#f28e2b"));
    assert_eq!(svg.matches(r##"stroke="#d62728" stroke-width="0.004""##).count(), 1);
    assert_eq!(svg.contains("<path"), path.len() > 1);
}

#[test]
fn bad_specs_are_rejected() {
    let spec = quick_spec("rrt", 1);
    assert!(matches!(run_experiment(&spec), Err(ExperimentError::UnknownPlanner(..))));
    let spec = quick_spec("dhrrt", 0);
    assert!(matches!(run_experiment(&spec), Err(ExperimentError::NoTrials)));
    let mut spec = quick_spec("dhrrt", 1);
    spec.clock = "sundial".into();
    assert!(matches!(run_experiment(&spec), Err(ExperimentError::UnknownClock(_))));
    let mut spec = quick_spec("dhrrt", 1);
    spec.perturb = Some(Perturbation { interval: 0.0, speed: 0.4, duration: 0.1 });
    assert!(matches!(run_experiment(&spec), Err(ExperimentError::BadPerturbation(_))));
}

use crate::physics::{SystemState, TraceRecorder};
use crate::planner::{
    make_clock, EventSink, NoEvents, Perturbation, PlanOutcome, PlannerConfig, PlannerRegistry,
    Problem, SimExecutor,
};

use super::scenario::{Scenario, ScenarioError};

/// One batch: a scenario, a planner and the experimental conditions.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub planner: String,
    pub trials: usize,
    pub seed_base: u64,
    /// Overrides the scenario's planner budget.
    pub time_budget: Option<f64>,
    pub perturb: Option<Perturbation>,
    /// Overrides the scenario's reduce rate.
    pub reduce_rate: Option<f64>,
    /// `sim` (work-based, deterministic) or `wall`.
    pub clock: String,
    pub record_traces: bool,
}

impl ExperimentSpec {
    pub fn new(scenario: Scenario, planner: &str, trials: usize, seed_base: u64) -> Self {
        Self {
            scenario,
            planner: planner.to_string(),
            trials,
            seed_base,
            time_budget: None,
            perturb: None,
            reduce_rate: None,
            clock: "sim".into(),
            record_traces: false,
        }
    }

    fn effective_scenario(&self) -> Scenario {
        let mut s = self.scenario.clone();
        if let Some(r) = self.reduce_rate {
            s.reduce_rate = Some(r);
        }
        if let Some(b) = self.time_budget {
            s.planner.time_budget = b;
        }
        s
    }

    pub fn planner_config(&self) -> PlannerConfig {
        self.effective_scenario().planner
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("unknown planner `{0}` (known: {1})")]
    UnknownPlanner(String, String),
    #[error("unknown clock `{0}` (known: sim, wall)")]
    UnknownClock(String),
    #[error("trials must be >= 1")]
    NoTrials,
    #[error("invalid perturbation: {0}")]
    BadPerturbation(String),
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub planner: String,
    pub seed: u64,
    pub success: bool,
    pub planning_time_s: f64,
    pub nodes_added: usize,
    pub nodes_per_s: f64,
    pub replans: usize,
    pub segments_executed: usize,
    pub expansions: usize,
    pub start_state: SystemState,
    pub final_state: SystemState,
    pub trace: Option<TraceRecorder>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful trials only; `None` without successes.
    pub time_mean: Option<f64>,
    pub time_std: Option<f64>,
    /// Total nodes over total planning time, failures included.
    pub nodes_per_s: f64,
}

pub fn summarize(records: &[TrialRecord]) -> BatchSummary {
    let times: Vec<f64> = records
        .iter()
        .filter(|r| r.success)
        .map(|r| r.planning_time_s)
        .collect();
    let (time_mean, time_std) = if times.is_empty() {
        (None, None)
    } else {
        let n = times.len() as f64;
        let mean = times.iter().sum::<f64>() / n;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
        (Some(mean), Some(var.sqrt()))
    };
    let nodes: usize = records.iter().map(|r| r.nodes_added).sum();
    let time: f64 = records.iter().map(|r| r.planning_time_s).sum();
    let successes = times.len();
    BatchSummary {
        trials: records.len(),
        successes,
        success_rate: if records.is_empty() { 0.0 } else { successes as f64 / records.len() as f64 },
        time_mean,
        time_std,
        nodes_per_s: if time > 0.0 { nodes as f64 / time } else { 0.0 },
    }
}

/// Runs one trial and returns the raw outcome alongside its record.
pub fn run_trial(
    spec: &ExperimentSpec,
    trial: usize,
    events: &mut dyn EventSink,
) -> Result<(TrialRecord, PlanOutcome), ExperimentError> {
    let scenario = spec.effective_scenario();
    let setup = scenario.build()?;
    let registry = PlannerRegistry::default();
    let cfg = scenario.planner.clone();
    let planner = registry.create(&spec.planner, &cfg).ok_or_else(|| {
        ExperimentError::UnknownPlanner(spec.planner.clone(), registry.names().join(", "))
    })?;
    let mut clock = make_clock(&spec.clock, cfg.time_budget)
        .ok_or_else(|| ExperimentError::UnknownClock(spec.clock.clone()))?;
    let seed = spec.seed_base.wrapping_add(trial as u64);
    let mut executor = SimExecutor::new(setup.world.clone(), setup.start.clone(), spec.perturb, seed);
    if spec.record_traces {
        executor = executor.with_trace();
    }
    let problem = Problem {
        world: &setup.planner_world,
        task: setup.task.as_ref(),
        config: &cfg,
        seed,
    };
    let outcome = planner.plan(&problem, &mut executor, clock.as_mut(), events);
    // Success is re-derived from the true world, not trusted from the planner.
    let success = outcome.final_state.valid && setup.task.goal(&setup.world, &outcome.final_state);
    let t = outcome.planning_time;
    let record = TrialRecord {
        trial,
        planner: spec.planner.clone(),
        seed,
        success,
        planning_time_s: t,
        nodes_added: outcome.nodes_added,
        nodes_per_s: if t > 0.0 { outcome.nodes_added as f64 / t } else { 0.0 },
        replans: outcome.replans,
        segments_executed: outcome.executed_controls.len(),
        expansions: outcome.expansions,
        start_state: setup.start.clone(),
        final_state: outcome.final_state.clone(),
        trace: executor.into_trace(),
    };
    Ok((record, outcome))
}

/// Runs every trial of the batch in order. Trial failures are recorded,
/// never fatal.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<(Vec<TrialRecord>, BatchSummary), ExperimentError> {
    if spec.trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    if let Some(p) = spec.perturb {
        if !(p.interval > 0.0 && p.speed >= 0.0 && p.duration > 0.0) {
            return Err(ExperimentError::BadPerturbation(format!(
                "interval {} speed {} duration {}",
                p.interval, p.speed, p.duration
            )));
        }
    }
    let mut records = Vec::with_capacity(spec.trials);
    for k in 0..spec.trials {
        let (rec, _) = run_trial(spec, k, &mut NoEvents)?;
        records.push(rec);
    }
    let summary = summarize(&records);
    Ok((records, summary))
}

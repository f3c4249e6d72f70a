//! Kinodynamic tree search with optional dynamic horizons.
//!
//! All three planners share one loop: grow a tree from the observed state,
//! ask a [`HorizonPolicy`] whether to release controls, execute them, and
//! either stop or re-root at the new observation. dhRRT releases on goal,
//! progress or depth; the kdRRT baselines only on goal, with or without
//! replanning after a failed execution.

mod clock;
mod config;
mod executor;
mod expand;
mod progress;
mod tree;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kinematics::ControlSequence;
use crate::physics::{SystemState, Work, World};
use crate::tasks::Task;

pub use clock::{make_clock, BudgetClock, SimClock, WallClock};
pub use config::PlannerConfig;
pub use executor::{Execution, Executor, Perturbation, SimExecutor};
pub use expand::{
    expand_tree, nearest, sample_state, sample_twist, state_distance, DistanceWeights, Expansion,
};
pub use progress::{evaluate_progress, Branch, DynamicHorizon, Emit, GoalOnly, HorizonPolicy};
pub use tree::{MotionTree, Node, NodeId};

/// Structured progress reports from a planning run.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanEvent {
    NodeAdded { id: NodeId, depth: usize, h: f64 },
    SegmentEmitted { branch: Branch, segments: usize, root_h: f64, node_h: f64 },
    Replanned { h: f64 },
    GoalReached,
}

/// Receives [`PlanEvent`]s. Closures work directly.
pub trait EventSink {
    fn event(&mut self, e: &PlanEvent);
}

impl<F: FnMut(&PlanEvent)> EventSink for F {
    fn event(&mut self, e: &PlanEvent) {
        self(e)
    }
}

/// Discards every event.
pub struct NoEvents;

impl EventSink for NoEvents {
    fn event(&mut self, _e: &PlanEvent) {}
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub success: bool,
    pub executed_controls: ControlSequence,
    pub planning_time: f64,
    pub nodes_added: usize,
    pub expansions: usize,
    pub replans: usize,
    pub final_state: SystemState,
}

/// Everything a planner needs besides the executor and clock.
pub struct Problem<'a> {
    /// The planner's model of the world, possibly with wrong or coarse shapes.
    pub world: &'a World,
    pub task: &'a dyn Task,
    pub config: &'a PlannerConfig,
    pub seed: u64,
}

pub trait Planner: Send + Sync {
    fn name(&self) -> &'static str;

    fn plan(
        &self,
        problem: &Problem,
        executor: &mut dyn Executor,
        clock: &mut dyn BudgetClock,
        events: &mut dyn EventSink,
    ) -> PlanOutcome;
}

/// Shared plan–execute loop parameterised by a horizon policy.
pub struct TreePlanner {
    name: &'static str,
    policy: Box<dyn HorizonPolicy>,
    replan: bool,
}

impl TreePlanner {
    pub fn new(name: &'static str, policy: Box<dyn HorizonPolicy>, replan: bool) -> Self {
        Self { name, policy, replan }
    }

    pub fn dhrrt(cfg: &PlannerConfig) -> Self {
        Self::new(
            "dhrrt",
            Box::new(DynamicHorizon { p: cfg.progress_threshold, d_max: cfg.max_depth }),
            true,
        )
    }

    pub fn kdrrt(_cfg: &PlannerConfig) -> Self {
        Self::new("kdrrt", Box::new(GoalOnly), false)
    }

    pub fn rkdrrt(_cfg: &PlannerConfig) -> Self {
        Self::new("rkdrrt", Box::new(GoalOnly), true)
    }
}

impl Planner for TreePlanner {
    fn name(&self) -> &'static str {
        self.name
    }

    fn plan(
        &self,
        problem: &Problem,
        executor: &mut dyn Executor,
        clock: &mut dyn BudgetClock,
        events: &mut dyn EventSink,
    ) -> PlanOutcome {
        let world = problem.world;
        let task = problem.task;
        let cfg = problem.config;
        let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
        rng.set_stream(0);

        let mut state = executor.observe();
        let mut out = PlanOutcome {
            success: false,
            executed_controls: Vec::new(),
            planning_time: 0.0,
            nodes_added: 0,
            expansions: 0,
            replans: 0,
            final_state: state.clone(),
        };
        // Checked before planning rather than only after execution.
        if task.goal(executor.world(), &state) {
            out.success = true;
            events.event(&PlanEvent::GoalReached);
            return out;
        }
        if !state.valid {
            return out;
        }

        let goal = |s: &SystemState| task.goal(world, s);
        let mut tree = MotionTree::new(state.clone(), task.heuristic(world, &state));
        while clock.available() {
            clock.begin();
            let mut work = Work::default();
            let ex = expand_tree(&mut tree, &mut rng, world, task, cfg, &mut work);
            clock.charge(work);
            out.expansions += 1;
            if let Some(id) = ex.added {
                out.nodes_added += 1;
                let n = tree.node(id);
                events.event(&PlanEvent::NodeAdded { id, depth: n.depth, h: n.h });
            }
            let emit = self.policy.evaluate(&tree, &goal);
            clock.end();

            let Some(emit) = emit else {
                continue;
            };
            events.event(&PlanEvent::SegmentEmitted {
                branch: emit.branch,
                segments: emit.controls.len(),
                root_h: tree.root().h,
                node_h: tree.node(emit.node).h,
            });
            let run = executor.execute(&emit.controls);
            out.executed_controls.extend(emit.controls.into_iter().take(run.executed));
            state = run.state;
            if !state.valid {
                break;
            }
            if task.goal(executor.world(), &state) {
                out.success = true;
                events.event(&PlanEvent::GoalReached);
                break;
            }
            if !self.replan {
                break;
            }
            out.replans += 1;
            let h = task.heuristic(world, &state);
            events.event(&PlanEvent::Replanned { h });
            tree = MotionTree::new(state.clone(), h);
        }
        out.planning_time = clock.elapsed();
        out.final_state = state;
        out
    }
}

type PlannerFactory = fn(&PlannerConfig) -> Box<dyn Planner>;

/// Planners selectable by name.
pub struct PlannerRegistry {
    entries: Vec<(&'static str, PlannerFactory)>,
}

impl PlannerRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: PlannerFactory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn create(&self, name: &str, cfg: &PlannerConfig) -> Option<Box<dyn Planner>> {
        self.entries.iter().find(|(n, _)| *n == name).map(|(_, f)| f(cfg))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }
}

impl Default for PlannerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("kdrrt", |c| Box::new(TreePlanner::kdrrt(c)));
        r.register("rkdrrt", |c| Box::new(TreePlanner::rkdrrt(c)));
        r.register("dhrrt", |c| Box::new(TreePlanner::dhrrt(c)));
        r
    }
}

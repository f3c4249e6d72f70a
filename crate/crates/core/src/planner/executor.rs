//! Executors stand in for the real world: they hold the true state, run
//! joint-space controls on their own physics model and report what they
//! observe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kinematics::ControlSegment;
use crate::physics::{SystemState, TraceEvent, TraceRecorder, Work, World};

#[derive(Debug, Clone)]
pub struct Execution {
    pub state: SystemState,
    /// Segments run to completion before stopping.
    pub executed: usize,
}

pub trait Executor {
    fn name(&self) -> &'static str;

    /// The executor's physics model (true shapes).
    fn world(&self) -> &World;

    fn observe(&self) -> SystemState;

    /// Runs `controls` in order, stopping early if the state becomes invalid.
    fn execute(&mut self, controls: &[ControlSegment]) -> Execution;

    /// Recorded trace, if recording was enabled.
    fn trace(&self) -> Option<&TraceRecorder> {
        None
    }
}

/// Random shoves applied every `interval` seconds of execution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub interval: f64,
    pub speed: f64,
    pub duration: f64,
}

impl Perturbation {
    pub const DEFAULT_DURATION: f64 = 0.1;
}

/// Executes on a physics world, optionally with perturbations. With the
/// planner's own world and no perturbation it is a perfect executor.
pub struct SimExecutor {
    world: World,
    state: SystemState,
    perturbation: Option<Perturbation>,
    rng: ChaCha8Rng,
    time: f64,
    next_perturb: f64,
    recorder: Option<TraceRecorder>,
}

impl SimExecutor {
    pub fn new(world: World, start: SystemState, perturbation: Option<Perturbation>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let next_perturb = perturbation.map_or(f64::INFINITY, |p| p.interval);
        Self {
            world,
            state: start,
            perturbation,
            rng,
            time: 0.0,
            next_perturb,
            recorder: None,
        }
    }

    /// Perfect executor: no perturbation, replays exactly what was planned.
    pub fn ideal(world: World, start: SystemState) -> Self {
        Self::new(world, start, None, 0)
    }

    pub fn with_trace(mut self) -> Self {
        let mut rec = TraceRecorder::default();
        rec.start(&self.state);
        self.recorder = Some(rec);
        self
    }

    pub fn into_trace(self) -> Option<TraceRecorder> {
        self.recorder
    }

    /// Simulated execution time so far.
    pub fn time(&self) -> f64 {
        self.time
    }

    fn maybe_perturb(&mut self) {
        let Some(p) = self.perturbation else {
            return;
        };
        while self.time >= self.next_perturb && self.state.valid {
            self.next_perturb += p.interval;
            if self.state.objects.is_empty() || p.speed == 0.0 {
                continue;
            }
            let index = self.rng.random_range(0..self.state.objects.len());
            let heading = self.rng.random_range(0.0..std::f64::consts::TAU);
            self.state = self.world.perturb_object(
                &self.state,
                index,
                heading,
                p.speed,
                p.duration,
                self.recorder.as_mut(),
            );
        }
    }
}

impl Executor for SimExecutor {
    fn name(&self) -> &'static str {
        if self.perturbation.is_some() {
            "perturbed"
        } else {
            "ideal"
        }
    }

    fn world(&self) -> &World {
        &self.world
    }

    fn observe(&self) -> SystemState {
        self.state.clone()
    }

    fn execute(&mut self, controls: &[ControlSegment]) -> Execution {
        let mut executed = 0;
        let mut work = Work::default();
        for seg in controls {
            if !self.state.valid {
                break;
            }
            self.state = match self.recorder.as_mut() {
                Some(rec) => {
                    rec.push(TraceEvent::Segment(seg.source_twist));
                    self.world.advance_traced(&self.state, seg, &mut work, rec, self.time)
                }
                None => self.world.advance(&self.state, seg, &mut work),
            };
            self.time += seg.duration();
            executed += 1;
            self.maybe_perturb();
        }
        Execution {
            state: self.state.clone(),
            executed,
        }
    }

    fn trace(&self) -> Option<&TraceRecorder> {
        self.recorder.as_ref()
    }
}

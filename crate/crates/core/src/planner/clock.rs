//! Planning-time budgets. Only planning sections are timed; execution is
//! excluded.

use std::time::{Duration, Instant};

use crate::physics::Work;

pub trait BudgetClock {
    fn name(&self) -> &'static str;

    /// Opens a timed planning section.
    fn begin(&mut self);

    /// Closes the current planning section.
    fn end(&mut self);

    /// Reports simulation work done inside the current section.
    fn charge(&mut self, work: Work);

    /// Planning seconds spent so far.
    fn elapsed(&self) -> f64;

    fn budget(&self) -> f64;

    fn available(&self) -> bool {
        self.elapsed() < self.budget()
    }
}

/// Deterministic clock that converts simulation work into seconds, so that
/// batch outputs are reproducible byte for byte and independent of the host.
#[derive(Debug, Clone)]
pub struct SimClock {
    pub budget: f64,
    pub per_substep: f64,
    pub per_vertex_op: f64,
    elapsed: f64,
}

impl SimClock {
    // Measured host costs scaled up 50x, which puts tree growth in the
    // range of a 3D simulator on a desktop machine.
    pub const DEFAULT_PER_SUBSTEP: f64 = 2e-4;
    pub const DEFAULT_PER_VERTEX_OP: f64 = 1.5e-9;

    pub fn new(budget: f64) -> Self {
        Self::with_costs(budget, Self::DEFAULT_PER_SUBSTEP, Self::DEFAULT_PER_VERTEX_OP)
    }

    pub fn with_costs(budget: f64, per_substep: f64, per_vertex_op: f64) -> Self {
        Self {
            budget,
            per_substep,
            per_vertex_op,
            elapsed: 0.0,
        }
    }
}

impl BudgetClock for SimClock {
    fn name(&self) -> &'static str {
        "sim"
    }

    fn begin(&mut self) {}

    fn end(&mut self) {}

    fn charge(&mut self, work: Work) {
        self.elapsed +=
            work.substeps as f64 * self.per_substep + work.vertex_ops as f64 * self.per_vertex_op;
    }

    fn elapsed(&self) -> f64 {
        self.elapsed
    }

    fn budget(&self) -> f64 {
        self.budget
    }
}

/// Host monotonic clock.
#[derive(Debug, Clone)]
pub struct WallClock {
    budget: f64,
    spent: Duration,
    open: Option<Instant>,
}

impl WallClock {
    pub fn new(budget: f64) -> Self {
        Self {
            budget,
            spent: Duration::ZERO,
            open: None,
        }
    }
}

impl BudgetClock for WallClock {
    fn name(&self) -> &'static str {
        "wall"
    }

    fn begin(&mut self) {
        self.open = Some(Instant::now());
    }

    fn end(&mut self) {
        if let Some(t) = self.open.take() {
            self.spent += t.elapsed();
        }
    }

    fn charge(&mut self, _work: Work) {}

    fn elapsed(&self) -> f64 {
        let running = self.open.map(|t| t.elapsed()).unwrap_or_default();
        (self.spent + running).as_secs_f64()
    }

    fn budget(&self) -> f64 {
        self.budget
    }
}

pub fn make_clock(kind: &str, budget: f64) -> Option<Box<dyn BudgetClock>> {
    match kind {
        "sim" => Some(Box::new(SimClock::new(budget))),
        "wall" => Some(Box::new(WallClock::new(budget))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sim_clock_is_linear_in_work() {
        let mut c = SimClock::with_costs(1.0, 0.1, 0.01);
        c.charge(Work { substeps: 3, vertex_ops: 20 });
        assert!((c.elapsed() - 0.5).abs() < 1e-12);
        assert!(c.available());
        c.charge(Work { substeps: 5, vertex_ops: 0 });
        assert!(!c.available());
    }

    #[test]
    fn wall_clock_only_counts_open_sections() {
        let mut c = WallClock::new(10.0);
        std::thread::sleep(Duration::from_millis(5));
        assert_eq!(c.elapsed(), 0.0);
        c.begin();
        std::thread::sleep(Duration::from_millis(5));
        c.end();
        let t = c.elapsed();
        assert!(t >= 0.005);
        std::thread::sleep(Duration::from_millis(5));
        assert_eq!(c.elapsed(), t);
    }
}

pub mod geometry;
pub mod kinematics;
pub mod physics;
pub mod tasks;
pub mod planner;
pub mod harness;

//! Discrete-event simulation of competing clocks with general hazards.
//!
//! A model is a set of clocks, each with an enabling rule over a shared
//! counted state and a jump mark. Hazards may mix a continuous part with
//! point masses ("atoms"). The kernel drives any of several exact samplers
//! and records `(time, clock)` trajectories.

pub mod clock;
pub mod graph;
pub mod hazard;
pub mod kernel;
pub mod rng;
pub mod models;
pub mod sampler;
pub mod trajectory;
pub mod verify;

pub use clock::{
    evaluate_enabling, ClockError, ClockId, ClockSpec, ClockStatus, Enabling, EnablingFn,
    EnablingOutcome, JumpMark, SubstateKey, SystemState,
};
pub use graph::DependencyGraph;
pub use hazard::{Atom, ContinuousHazard, HazardError, HazardSpec, LogSurvival, PiecewiseConstant};
pub use rng::{derive_seed, ClockRng};
pub use sampler::{
    EnabledClock, EnablingDelta, PartitionRule, Sampler, SamplerError, SamplerEvent, SamplerKind,
};
pub use kernel::{run_ensemble, run_trajectory, Kernel, KernelError, StopCondition};
pub use models::{Model, ModelConfig, ModelError};
pub use trajectory::{EventRecord, ParsedTrajectory, StopReason, Trajectory};

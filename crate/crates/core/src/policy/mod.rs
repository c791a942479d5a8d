//! Frontier-selection policies and the prompt sample they consume.
//!
//! A [`PromptSample`] is the structured analog of a multimodal prompt:
//! a subsampled history of past views, the task instruction, an optional
//! goal view for ImageNav, and one lettered choice per frontier, each
//! depicted by a historical view. A policy answers with a single letter.

mod builtin;
mod prompt;

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::PolicyError;
use crate::mapping::{Frontier, OccupancyGrid};
use crate::planning::GoalField;
use crate::world::{Pose, Scene, Task};

pub use builtin::{BuiltinPolicy, GreedyOracle, GroundTruthOracle, NearestFrontier, RandomPolicy};
pub use prompt::{
    build_prompt_sample, instruction_for, subsample_indices, Choice, PromptConfig, PromptSample, GOAL_IMAGE_FRAME,
    IMAGENAV_INSTRUCTION,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyDecision {
    pub letter: String,
    /// Wall-clock milliseconds; 0 for in-process policies.
    pub latency_ms: f64,
}

/// Everything a policy may look at besides the sample. `scene` and
/// `goal_field` are ground truth and only oracles should read them.
#[derive(Clone, Copy)]
pub struct DecisionContext<'a> {
    pub scene: &'a Scene,
    pub belief: &'a OccupancyGrid,
    pub pose: Pose,
    pub task: &'a Task,
    /// Frontiers backing the sample's choices, sorted by id.
    pub frontiers: &'a [Frontier],
    pub goal_field: Option<&'a GoalField>,
    pub step: u32,
}

/// Selects the next frontier by letter.
pub trait FrontierPolicy {
    fn name(&self) -> String;

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError>;
}

impl<P: FrontierPolicy + ?Sized> FrontierPolicy for alloc::boxed::Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        (**self).decide(sample, ctx)
    }
}

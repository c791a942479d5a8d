use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::mapping::{select_representative_view, Frontier, OccupancyGrid, ViewRecord};
use crate::math::round;
use crate::world::{SensorConfig, Task};

/// Frame index carried by the ImageNav goal view, which is not part of the
/// agent's trajectory.
pub const GOAL_IMAGE_FRAME: u32 = u32::MAX;

pub const IMAGENAV_INSTRUCTION: &str = "Go to the location shown in the goal image.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub max_history_frames: usize,
    /// Choice labels, in order.
    pub letters: Vec<char>,
}

impl Default for PromptConfig {
    fn default() -> Self {
        Self { max_history_frames: 20, letters: ('A'..='Z').collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub letter: String,
    pub frontier_id: u32,
    pub view: ViewRecord,
    pub waypoint: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptSample {
    /// `objectnav`, `ovon` or `imagenav`.
    pub task_kind: String,
    pub instruction: String,
    pub history: Vec<ViewRecord>,
    pub imagenav_goal: Option<ViewRecord>,
    pub choices: Vec<Choice>,
    /// Present only in training samples.
    pub answer: Option<String>,
}

impl PromptSample {
    pub fn letter_for(&self, frontier_id: u32) -> Option<&str> {
        self.choices.iter().find(|c| c.frontier_id == frontier_id).map(|c| c.letter.as_str())
    }

    pub fn frontier_for(&self, letter: &str) -> Option<u32> {
        self.choices.iter().find(|c| c.letter == letter).map(|c| c.frontier_id)
    }

    pub fn has_letter(&self, letter: &str) -> bool {
        self.choices.iter().any(|c| c.letter == letter)
    }
}

pub fn instruction_for(task: &Task) -> String {
    match task {
        Task::ObjectNav { category, .. } => format!("Find the {category}."),
        Task::ImageNav { .. } => IMAGENAV_INSTRUCTION.to_string(),
    }
}

/// Indices of at most `max` items out of `n`, uniformly spread and always
/// keeping the first and the last. Strictly increasing.
pub fn subsample_indices(n: usize, max: usize) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    if max <= 1 {
        return alloc::vec![n - 1];
    }
    let stride = (n - 1) as f64 / (max - 1) as f64;
    (0..max).map(|i| round(i as f64 * stride) as usize).collect()
}

/// Assemble the decision record for the current state. Choices follow
/// frontier id order and are lettered from the start of the alphabet; each
/// is depicted by its representative historical view.
pub fn build_prompt_sample(
    history: &[ViewRecord],
    frontiers: &[Frontier],
    task: &Task,
    belief: &OccupancyGrid,
    sensor: &SensorConfig,
    cfg: &PromptConfig,
) -> Result<PromptSample> {
    if history.is_empty() {
        return Err(NavError::NoHistory);
    }
    if frontiers.is_empty() {
        return Err(NavError::InvalidConfig("prompt needs at least one frontier".into()));
    }
    if frontiers.len() > cfg.letters.len() {
        return Err(NavError::TooManyChoices { frontiers: frontiers.len(), letters: cfg.letters.len() });
    }
    let mut ordered: Vec<&Frontier> = frontiers.iter().collect();
    ordered.sort_by_key(|f| f.id);
    let choices = ordered
        .iter()
        .zip(&cfg.letters)
        .map(|(f, letter)| {
            let frame = select_representative_view(belief, f, history, sensor)?;
            let view = *history.iter().find(|v| v.frame_index == frame).unwrap();
            Ok(Choice { letter: letter.to_string(), frontier_id: f.id, view, waypoint: [f.waypoint.x, f.waypoint.y] })
        })
        .collect::<Result<Vec<_>>>()?;
    let history = subsample_indices(history.len(), cfg.max_history_frames).into_iter().map(|i| history[i]).collect();
    let imagenav_goal = match task {
        Task::ImageNav { goal_pose } => Some(ViewRecord { frame_index: GOAL_IMAGE_FRAME, pose: *goal_pose }),
        Task::ObjectNav { .. } => None,
    };
    Ok(PromptSample {
        task_kind: task.kind_str().to_string(),
        instruction: instruction_for(task),
        history,
        imagenav_goal,
        choices,
        answer: None,
    })
}

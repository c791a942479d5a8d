//! JSON shapes shared by the policy wire protocol and the dataset files.

use frontier_nav_core::datagen::{AuxCandidate, AuxSample, SamplePrompt, TrainingSample};
use frontier_nav_core::mapping::ViewRecord;
use frontier_nav_core::policy::{Choice, PromptSample};
use frontier_nav_core::world::Pose;
use serde::{Deserialize, Serialize};

pub const WIRE_VERSION: u32 = 1;

/// A frame reference: capture step and pose.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameRef {
    pub frame: u32,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl From<&ViewRecord> for FrameRef {
    fn from(v: &ViewRecord) -> Self {
        Self { frame: v.frame_index, x: v.pose.x, y: v.pose.y, heading: v.pose.heading }
    }
}

impl From<FrameRef> for ViewRecord {
    fn from(f: FrameRef) -> Self {
        ViewRecord { frame_index: f.frame, pose: Pose::new(f.x, f.y, f.heading) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireTask {
    pub kind: String,
    pub instruction: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireChoice {
    pub letter: String,
    pub frontier_id: u32,
    pub view: FrameRef,
    pub waypoint: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub version: u32,
    pub task: WireTask,
    pub history: Vec<FrameRef>,
    pub imagenav_goal: Option<FrameRef>,
    pub choices: Vec<WireChoice>,
    /// Ground-truth letter, sent only when the client runs in debug mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub debug_label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub letter: String,
}

fn choices_to_wire(choices: &[Choice]) -> Vec<WireChoice> {
    choices
        .iter()
        .map(|c| WireChoice { letter: c.letter.clone(), frontier_id: c.frontier_id, view: (&c.view).into(), waypoint: c.waypoint })
        .collect()
}

fn choices_from_wire(choices: Vec<WireChoice>) -> Vec<Choice> {
    choices
        .into_iter()
        .map(|c| Choice { letter: c.letter, frontier_id: c.frontier_id, view: c.view.into(), waypoint: c.waypoint })
        .collect()
}

impl WireRequest {
    /// The answer is never sent.
    pub fn from_sample(s: &PromptSample) -> Self {
        Self {
            version: WIRE_VERSION,
            task: WireTask { kind: s.task_kind.clone(), instruction: s.instruction.clone() },
            history: s.history.iter().map(FrameRef::from).collect(),
            imagenav_goal: s.imagenav_goal.as_ref().map(FrameRef::from),
            choices: choices_to_wire(&s.choices),
            debug_label: None,
        }
    }

    pub fn into_sample(self) -> PromptSample {
        PromptSample {
            task_kind: self.task.kind,
            instruction: self.task.instruction,
            history: self.history.into_iter().map(ViewRecord::from).collect(),
            imagenav_goal: self.imagenav_goal.map(ViewRecord::from),
            choices: choices_from_wire(self.choices),
            answer: None,
        }
    }
}

/// One dataset line. Navigation and auxiliary samples share the id, kind,
/// history and answer keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleLine {
    Navigation {
        sample_id: String,
        task_kind: String,
        instruction: String,
        history: Vec<FrameRef>,
        imagenav_goal: Option<FrameRef>,
        choices: Vec<WireChoice>,
        answer: String,
    },
    Aux {
        sample_id: String,
        task_kind: String,
        history: Vec<FrameRef>,
        question: String,
        query_xy: [f64; 2],
        candidates: Vec<AuxCandidateLine>,
        answer: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxCandidateLine {
    pub letter: String,
    pub view: FrameRef,
}

impl From<&TrainingSample> for SampleLine {
    fn from(t: &TrainingSample) -> Self {
        match &t.prompt {
            SamplePrompt::Navigation(p) => SampleLine::Navigation {
                sample_id: t.sample_id.clone(),
                task_kind: t.task_kind.clone(),
                instruction: p.instruction.clone(),
                history: p.history.iter().map(FrameRef::from).collect(),
                imagenav_goal: p.imagenav_goal.as_ref().map(FrameRef::from),
                choices: choices_to_wire(&p.choices),
                answer: t.answer.clone(),
            },
            SamplePrompt::Aux(a) => SampleLine::Aux {
                sample_id: t.sample_id.clone(),
                task_kind: t.task_kind.clone(),
                history: a.history.iter().map(FrameRef::from).collect(),
                question: a.question.clone(),
                query_xy: a.query_xy,
                candidates: a.candidates.iter().map(|c| AuxCandidateLine { letter: c.letter.clone(), view: (&c.view).into() }).collect(),
                answer: t.answer.clone(),
            },
        }
    }
}

impl From<SampleLine> for TrainingSample {
    fn from(line: SampleLine) -> Self {
        match line {
            SampleLine::Navigation { sample_id, task_kind, instruction, history, imagenav_goal, choices, answer } => {
                TrainingSample {
                    sample_id,
                    prompt: SamplePrompt::Navigation(PromptSample {
                        task_kind: task_kind.clone(),
                        instruction,
                        history: history.into_iter().map(ViewRecord::from).collect(),
                        imagenav_goal: imagenav_goal.map(ViewRecord::from),
                        choices: choices_from_wire(choices),
                        answer: Some(answer.clone()),
                    }),
                    task_kind,
                    answer,
                }
            }
            SampleLine::Aux { sample_id, task_kind, history, question, query_xy, candidates, answer } => TrainingSample {
                sample_id,
                task_kind,
                prompt: SamplePrompt::Aux(AuxSample {
                    history: history.into_iter().map(ViewRecord::from).collect(),
                    query_xy,
                    question,
                    candidates: candidates.into_iter().map(|c| AuxCandidate { letter: c.letter, view: c.view.into() }).collect(),
                }),
                answer,
            },
        }
    }
}

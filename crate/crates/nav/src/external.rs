//! HTTP client for an out-of-process frontier policy.

use std::time::{Duration, Instant};

use frontier_nav_core::error::PolicyError;
use frontier_nav_core::policy::{DecisionContext, FrontierPolicy, GroundTruthOracle, PolicyDecision, PromptSample};

use crate::wire::{WireRequest, WireResponse};

/// Posts each sample to `endpoint` and reads back `{"letter": ...}`.
#[derive(Clone, Debug)]
pub struct ExternalPolicy {
    pub endpoint: String,
    pub timeout: Duration,
    /// Attach the ground-truth letter as `debug_label` (for echo tests).
    pub debug_labels: bool,
    agent: ureq::Agent,
}

impl ExternalPolicy {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        Self { endpoint: endpoint.into(), timeout, debug_labels: false, agent }
    }

    pub fn with_debug_labels(mut self, on: bool) -> Self {
        self.debug_labels = on;
        self
    }

    /// One request/response exchange, validating the letter.
    pub fn roundtrip(&self, request: &WireRequest, sample: &PromptSample) -> Result<PolicyDecision, PolicyError> {
        let body = serde_json::to_string(request).map_err(|e| PolicyError::Format(e.to_string()))?;
        let start = Instant::now();
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .header("content-type", "application/json")
            .send(body)
            .map_err(transport_error)?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(transport_error)?;
        if !(200..300).contains(&status) {
            return Err(PolicyError::Endpoint(format!("status {status}")));
        }
        let reply: WireResponse = serde_json::from_str(&text).map_err(|e| PolicyError::Format(e.to_string()))?;
        if !sample.has_letter(&reply.letter) {
            return Err(PolicyError::InvalidChoice(reply.letter));
        }
        Ok(PolicyDecision { letter: reply.letter, latency_ms: start.elapsed().as_secs_f64() * 1e3 })
    }
}

fn transport_error(e: ureq::Error) -> PolicyError {
    match e {
        ureq::Error::Timeout(_) => PolicyError::Timeout,
        ureq::Error::Io(io) if matches!(io.kind(), std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock) => {
            PolicyError::Timeout
        }
        other => PolicyError::Endpoint(other.to_string()),
    }
}

impl FrontierPolicy for ExternalPolicy {
    fn name(&self) -> String {
        format!("external:{}", self.endpoint)
    }

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        let mut request = WireRequest::from_sample(sample);
        if self.debug_labels {
            request.debug_label = Some(GroundTruthOracle.decide(sample, ctx)?.letter);
        }
        self.roundtrip(&request, sample)
    }
}

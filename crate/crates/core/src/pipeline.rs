//! Image to knot label, with one outcome and one timing per stage.

use std::time::Instant;

use serde::Serialize;

use crate::image::{graph_to_pd, perceive, DetectOptions, Diagnostic, RasterImage};
use crate::table::{classify_timed, Candidate, InvariantIndex, StageOutcome, StageStatus};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineStages {
    pub perception: StageOutcome,
    pub repair: StageOutcome,
    pub invariant: StageOutcome,
    pub search: StageOutcome,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PipelineTimings {
    pub perception: f64,
    pub repair: f64,
    pub invariant: f64,
    pub search: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub input: String,
    pub stages: PipelineStages,
    pub failed_stage: Option<&'static str>,
    pub crossings: Option<usize>,
    pub pd: Option<String>,
    pub jones: Option<String>,
    pub candidates: Vec<Candidate>,
    pub jones_trivial: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub timings_ms: PipelineTimings,
}

impl PipelineReport {
    pub fn succeeded(&self) -> bool {
        self.failed_stage.is_none()
    }
}

pub fn identify_image(img: &RasterImage, input: &str, index: &InvariantIndex, opts: &DetectOptions) -> PipelineReport {
    let mut report = PipelineReport {
        input: input.to_string(),
        stages: PipelineStages {
            perception: StageOutcome::ok(),
            repair: StageOutcome::skipped(),
            invariant: StageOutcome::skipped(),
            search: StageOutcome::skipped(),
        },
        failed_stage: None,
        crossings: None,
        pd: None,
        jones: None,
        candidates: Vec::new(),
        jones_trivial: false,
        diagnostics: Vec::new(),
        timings_ms: PipelineTimings::default(),
    };
    let t = Instant::now();
    let perceived = perceive(img, opts).map_err(|e| e.to_string()).and_then(|(_, graph)| {
        report.crossings = Some(graph.crossing_count());
        report.diagnostics = graph.diagnostics.clone();
        graph_to_pd(&graph).map_err(|e| e.to_string())
    });
    report.timings_ms.perception = t.elapsed().as_secs_f64() * 1e3;
    let pd = match perceived {
        Ok(pd) => pd,
        Err(e) => {
            report.stages.perception = StageOutcome::with(StageStatus::Failed, e);
            report.failed_stage = Some("perception");
            return report;
        }
    };
    report.pd = Some(pd.to_string());
    let (classified, timings) = classify_timed(&pd, index);
    report.stages.repair = classified.stages.repair.clone();
    report.stages.invariant = classified.stages.invariant.clone();
    report.stages.search = classified.stages.search.clone();
    report.failed_stage = classified.failed_stage();
    report.jones = classified.jones;
    report.candidates = classified.candidates;
    report.jones_trivial = classified.jones_trivial;
    report.timings_ms.repair = timings.repair;
    report.timings_ms.invariant = timings.invariant;
    report.timings_ms.search = timings.search;
    report
}

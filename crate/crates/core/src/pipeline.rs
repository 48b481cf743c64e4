//! The full unmating run and its JSON views.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::circle::{ratio_string, Angle};
use crate::complex::{critical_vertices, validate, Color, CriticalVertex, MapSpec, ValidationReport};
use crate::error::{Error, Result};
use crate::laminations::{connection_classes, depth1, join, lamination_tower, moore_check, AngleClasses, MooreReport};
use crate::parameterize::{marker_images, pullback_parameters, solve_parameters, MarkerParameters, PullbackParameters};
use crate::portraits::{extract_portraits, CriticalPortrait};
use crate::spectral::{certify_perron, interval_lengths, transition_matrix, LengthVector, TransitionMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub branch: u32,
    pub depth: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { branch: 0, depth: 3 }
    }
}

/// One depth of the white, black and joined relations.
#[derive(Clone, Debug)]
pub struct LaminationLevel {
    pub white: AngleClasses,
    pub black: AngleClasses,
    pub join: AngleClasses,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub validation: ValidationReport,
    pub matrix: TransitionMatrix,
    pub lengths: LengthVector,
    pub parameters: MarkerParameters,
    pub labels: Vec<String>,
    pub pullback: PullbackParameters,
    pub criticals: Vec<CriticalVertex>,
    pub white: CriticalPortrait,
    pub black: CriticalPortrait,
    pub connections: (AngleClasses, AngleClasses),
    /// index `n` holds depth `n + 1`
    pub laminations: Vec<LaminationLevel>,
    pub moore: MooreReport,
}

/// Validation as a hard stage: the first failing finding becomes the error.
pub fn require_valid(spec: &MapSpec) -> Result<ValidationReport> {
    let report = validate(spec);
    match report.first_failure() {
        Some(f) => Err(Error::Complex(format!("{}: {}", f.check, f.message))),
        None => Ok(report),
    }
}

/// Matrix and certified Perron vector.
pub fn spectral_stage(spec: &MapSpec) -> Result<(TransitionMatrix, LengthVector)> {
    let matrix = transition_matrix(spec)?;
    let lengths = certify_perron(&matrix, spec.degree)?;
    Ok((matrix, lengths))
}

/// Marker parameters from the first marker, then their pullback.
pub fn parameter_stage(spec: &MapSpec, lengths: &LengthVector, branch: u32) -> Result<(MarkerParameters, PullbackParameters)> {
    let intervals = interval_lengths(spec, lengths);
    let params = solve_parameters(&intervals, &marker_images(spec), spec.degree, 0, branch)?;
    let pullback = pullback_parameters(&params, spec)?;
    Ok((params, pullback))
}

pub fn run_pipeline(spec: &MapSpec, options: PipelineOptions) -> Result<PipelineResult> {
    let validation = require_valid(spec)?;
    let (matrix, lengths) = spectral_stage(spec)?;
    let (parameters, pullback) = parameter_stage(spec, &lengths, options.branch)?;
    let criticals = critical_vertices(spec)?;
    let (white, black) = extract_portraits(spec, &pullback, &criticals)?;
    let (w1, b1) = depth1(spec, &pullback)?;
    let connections = connection_classes(spec, &pullback)?;
    let depth = options.depth.max(1);
    let whites = lamination_tower(&w1, &white, depth)?;
    let blacks = lamination_tower(&b1, &black, depth)?;
    let laminations: Vec<LaminationLevel> = whites
        .into_iter()
        .zip(blacks)
        .map(|(white, black)| {
            let join = join(&white, &black);
            LaminationLevel { white, black, join }
        })
        .collect();
    let moore = moore_check(&laminations.last().expect("depth ≥ 1").join);
    Ok(PipelineResult {
        validation,
        matrix,
        lengths,
        parameters,
        labels: spec.marker_labels(),
        pullback,
        criticals,
        white,
        black,
        connections,
        laminations,
        moore,
    })
}

fn angles(list: &[Angle]) -> Vec<String> {
    list.iter().map(|a| a.to_string()).collect()
}

pub fn matrix_json(matrix: &TransitionMatrix, lengths: &LengthVector) -> Value {
    json!({
        "matrix": matrix.entries,
        "eigenvector": lengths.eigenvector.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "lengths": lengths.lengths.iter().map(ratio_string).collect::<Vec<_>>(),
    })
}

pub fn parameters_json(labels: &[String], params: &MarkerParameters, pullback: &PullbackParameters) -> Value {
    let t: BTreeMap<&str, String> = labels.iter().map(String::as_str).zip(angles(&params.t)).collect();
    json!({
        "t": t,
        "s": angles(&pullback.s),
        "branch": params.branch,
    })
}

pub fn portrait_json(p: &CriticalPortrait) -> Value {
    json!({
        "sets": p.sets.iter().map(|s| angles(&s.angles)).collect::<Vec<_>>(),
        "certificate": p.certificate,
    })
}

pub fn lamination_json(classes: &AngleClasses) -> Value {
    json!({
        "depth": classes.depth,
        "classes": classes.classes.iter().map(|c| angles(&c.angles)).collect::<Vec<_>>(),
    })
}

impl PipelineResult {
    pub fn level(&self, depth: usize) -> Option<&LaminationLevel> {
        depth.checked_sub(1).and_then(|i| self.laminations.get(i))
    }

    pub fn to_json(&self) -> Value {
        let criticals: Vec<Value> = self
            .criticals
            .iter()
            .map(|c| {
                json!({
                    "id": c.id,
                    "local_degree": c.local_degree,
                    "colors": c.colors.iter().map(Color::to_string).collect::<Vec<_>>(),
                })
            })
            .collect();
        let laminations: Vec<Value> = self
            .laminations
            .iter()
            .map(|l| {
                json!({
                    "depth": l.join.depth,
                    "white": lamination_json(&l.white)["classes"],
                    "black": lamination_json(&l.black)["classes"],
                    "join": lamination_json(&l.join)["classes"],
                })
            })
            .collect();
        let mut out = matrix_json(&self.matrix, &self.lengths);
        let fields = out.as_object_mut().expect("object");
        fields.insert("validation".into(), serde_json::to_value(&self.validation).expect("serializable"));
        fields.insert("parameters".into(), parameters_json(&self.labels, &self.parameters, &self.pullback));
        fields.insert("critical_vertices".into(), Value::Array(criticals));
        fields.insert("white".into(), portrait_json(&self.white));
        fields.insert("black".into(), portrait_json(&self.black));
        fields.insert(
            "connections".into(),
            json!({
                "white": lamination_json(&self.connections.0)["classes"],
                "black": lamination_json(&self.connections.1)["classes"],
            }),
        );
        fields.insert("laminations".into(), Value::Array(laminations));
        fields.insert("moore".into(), serde_json::to_value(&self.moore).expect("serializable"));
        out
    }
}

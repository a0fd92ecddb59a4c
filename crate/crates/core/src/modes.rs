//! Mode systems over a complex: each face is a mode, evidence points select
//! the active mode through an activation threshold, and a warn margin flags
//! weights drifting toward that threshold. The engine replays evidence
//! streams deterministically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::belief::{PartitionEvalError, PartitionOfUnity};
use crate::geometry::{BarycentricPoint, Trajectory};
use crate::simplicial::{Complex, Face, VertexId};

/// Activation threshold: a vertex is part of the active mode while its
/// weight strictly exceeds this.
pub const DEFAULT_TAU: f64 = 0.2;

/// Warn margin: weights within this distance of the threshold trigger
/// warn events before a transition actually happens.
pub const DEFAULT_ETA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeError {
    #[error("activation threshold {tau} is outside [0, 1)")]
    InvalidTau { tau: f64 },
    #[error("warn margin {eta} is outside (0, {max}] for threshold {tau}")]
    InvalidEta { tau: f64, eta: f64, max: f64 },
    #[error("{face} is not a face of the complex")]
    UnknownFace { face: Face },
    #[error("vertex {vertex} is not in the complex")]
    ShadowOriginalAbsent { vertex: VertexId },
    #[error("shadow label {vertex} is already a vertex of the complex")]
    ShadowLabelPresent { vertex: VertexId },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("point carrier {carrier} is not a face of the mode complex")]
    PointOffComplex { carrier: Face },
    #[error("tick {tick} does not increase over previous tick {previous}")]
    TickOrder { tick: u64, previous: u64 },
    #[error("evidence leaves latched mode {face} at tick {tick}")]
    LatchedExit { face: Face, tick: u64 },
    #[error("record at tick {tick} rejected: {message}")]
    RecordRejected { tick: u64, message: String },
    #[error(transparent)]
    Evaluation(#[from] PartitionEvalError),
}

/// What a transition event reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// The active mode changed.
    Transition,
    /// A vertex of the active mode has drifted to within the warn margin of
    /// dropping out.
    WarnDrop,
    /// A vertex outside the active mode carries weight within the warn
    /// margin of joining.
    WarnAdd,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Transition => "transition",
            EventKind::WarnDrop => "warn-drop",
            EventKind::WarnAdd => "warn-add",
        })
    }
}

/// One dated event. For warn events, `to` is the anticipated mode should
/// the flagged vertex actually cross the threshold. `None` is the state of
/// having no active mode, rendered as `{}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEvent {
    pub tick: u64,
    pub kind: EventKind,
    pub from: Option<Face>,
    pub to: Option<Face>,
}

impl TransitionEvent {
    pub fn from_label(&self) -> String {
        face_label(self.from.as_ref())
    }

    pub fn to_label(&self) -> String {
        face_label(self.to.as_ref())
    }
}

/// Canonical rendering of an optional face: `{a,b}`, or `{}` for none.
pub fn face_label(face: Option<&Face>) -> String {
    match face {
        Some(f) => f.to_string(),
        None => "{}".to_string(),
    }
}

/// Human-facing description of one mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeMetadata {
    pub name: String,
    pub objectives: String,
}

/// A complex whose faces are modes, with activation thresholds, optional
/// per-face overrides, latched faces that refuse to be left, and a name for
/// every mode (generated from the face when not set explicitly).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSystem {
    complex: Complex,
    metadata: BTreeMap<Face, ModeMetadata>,
    tau: f64,
    eta: f64,
    overrides: BTreeMap<Face, (f64, f64)>,
    latched: BTreeSet<Face>,
}

fn check_thresholds(tau: f64, eta: f64) -> Result<(), ModeError> {
    if !(0.0..1.0).contains(&tau) {
        return Err(ModeError::InvalidTau { tau });
    }
    let max = 1.0 - tau;
    if eta <= 0.0 || eta > max {
        return Err(ModeError::InvalidEta { tau, eta, max });
    }
    Ok(())
}

impl ModeSystem {
    pub fn new(complex: Complex, tau: f64, eta: f64) -> Result<Self, ModeError> {
        check_thresholds(tau, eta)?;
        let metadata = complex
            .faces()
            .map(|f| {
                (
                    f.clone(),
                    ModeMetadata {
                        name: f.to_string(),
                        objectives: String::new(),
                    },
                )
            })
            .collect();
        Ok(ModeSystem {
            complex,
            metadata,
            tau,
            eta,
            overrides: BTreeMap::new(),
            latched: BTreeSet::new(),
        })
    }

    pub fn with_defaults(complex: Complex) -> Result<Self, ModeError> {
        ModeSystem::new(complex, DEFAULT_TAU, DEFAULT_ETA)
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Replaces the system-wide thresholds; per-face overrides stay put.
    pub fn set_thresholds(&mut self, tau: f64, eta: f64) -> Result<(), ModeError> {
        check_thresholds(tau, eta)?;
        self.tau = tau;
        self.eta = eta;
        Ok(())
    }

    fn require_face(&self, face: &Face) -> Result<(), ModeError> {
        if self.complex.contains(face) {
            Ok(())
        } else {
            Err(ModeError::UnknownFace { face: face.clone() })
        }
    }

    pub fn set_metadata(
        &mut self,
        face: &Face,
        name: impl Into<String>,
        objectives: impl Into<String>,
    ) -> Result<(), ModeError> {
        self.require_face(face)?;
        self.metadata.insert(
            face.clone(),
            ModeMetadata {
                name: name.into(),
                objectives: objectives.into(),
            },
        );
        Ok(())
    }

    /// Every face has metadata; unset faces carry their generated name.
    pub fn metadata(&self, face: &Face) -> Option<&ModeMetadata> {
        self.metadata.get(face)
    }

    /// Thresholds used while `face` is the active mode.
    pub fn set_threshold_override(
        &mut self,
        face: &Face,
        tau: f64,
        eta: f64,
    ) -> Result<(), ModeError> {
        self.require_face(face)?;
        check_thresholds(tau, eta)?;
        self.overrides.insert(face.clone(), (tau, eta));
        Ok(())
    }

    /// A latched mode cannot be left: evidence that would exit it aborts
    /// the run instead of being silently ignored.
    pub fn set_latched(&mut self, face: &Face, latched: bool) -> Result<(), ModeError> {
        self.require_face(face)?;
        if latched {
            self.latched.insert(face.clone());
        } else {
            self.latched.remove(face);
        }
        Ok(())
    }

    pub fn is_latched(&self, face: &Face) -> bool {
        self.latched.contains(face)
    }

    /// The thresholds in force for a step out of `mode`: the mode's own
    /// override when it has one, the system defaults otherwise.
    pub fn thresholds_for(&self, mode: Option<&Face>) -> (f64, f64) {
        mode.and_then(|f| self.overrides.get(f).copied())
            .unwrap_or((self.tau, self.eta))
    }

    /// One engine step: recomputes the active mode from the point and emits
    /// a transition event on change, then warn events for every vertex
    /// within the warn margin of its threshold. Order is deterministic:
    /// transition first, then warn-drops, then warn-adds, each in vertex
    /// order.
    pub fn step(
        &self,
        prev: Option<&Face>,
        point: &BarycentricPoint,
        tick: u64,
    ) -> Result<StepOutcome, EngineError> {
        if !self.complex.contains(point.carrier()) {
            return Err(EngineError::PointOffComplex {
                carrier: point.carrier().clone(),
            });
        }
        let (tau, eta) = self.thresholds_for(prev);
        let current = point
            .active_set(tau)
            .expect("system thresholds are validated at construction");

        let mut events = Vec::new();
        let changed = match (&current, prev) {
            (Some(c), Some(p)) => c != p,
            (None, None) => false,
            _ => true,
        };
        if changed {
            if let Some(p) = prev {
                if self.latched.contains(p) {
                    return Err(EngineError::LatchedExit {
                        face: p.clone(),
                        tick,
                    });
                }
            }
            events.push(TransitionEvent {
                tick,
                kind: EventKind::Transition,
                from: prev.cloned(),
                to: current.clone(),
            });
        }

        if let Some(active) = &current {
            for vertex in active.vertices() {
                if point.weight(vertex) - tau < eta {
                    events.push(TransitionEvent {
                        tick,
                        kind: EventKind::WarnDrop,
                        from: Some(active.clone()),
                        to: active.without(vertex),
                    });
                }
            }
        }
        for vertex in point.carrier().vertices() {
            let in_active = current.as_ref().is_some_and(|a| a.contains(vertex));
            if in_active {
                continue;
            }
            let weight = point.weight(vertex);
            if weight > 0.0 && tau - weight < eta {
                let to = match &current {
                    Some(active) => active.with(vertex.clone()),
                    None => Face::vertex(vertex.clone()),
                };
                events.push(TransitionEvent {
                    tick,
                    kind: EventKind::WarnAdd,
                    from: current.clone(),
                    to: Some(to),
                });
            }
        }

        Ok(StepOutcome { current, events })
    }

    /// Replays an evidence stream of `(tick, state)` pairs through the
    /// partition and the step rule. Ticks must strictly increase. Any
    /// failure aborts the run, handing back everything accumulated before
    /// the failing tick.
    pub fn run<S>(
        &self,
        partition: &PartitionOfUnity<S>,
        evidence: impl IntoIterator<Item = (u64, S)>,
    ) -> Result<RunOutcome, Box<RunAborted>> {
        self.run_fallible(
            partition,
            evidence.into_iter().map(|(tick, state)| (tick, Ok(state))),
        )
    }

    /// Like [`ModeSystem::run`], but each record may already have failed
    /// upstream (in signal extraction, say); such a failure aborts the run
    /// at that record's tick.
    pub fn run_fallible<S>(
        &self,
        partition: &PartitionOfUnity<S>,
        evidence: impl IntoIterator<Item = (u64, Result<S, EngineError>)>,
    ) -> Result<RunOutcome, Box<RunAborted>> {
        let mut outcome = RunOutcome {
            trajectory: Trajectory::new(),
            events: Vec::new(),
            final_mode: None,
        };
        let mut last_tick: Option<u64> = None;

        for (tick, state) in evidence {
            let abort = |cause: EngineError, partial: RunOutcome| {
                Box::new(RunAborted {
                    tick,
                    cause,
                    partial,
                })
            };
            if let Some(previous) = last_tick {
                if tick <= previous {
                    return Err(abort(EngineError::TickOrder { tick, previous }, outcome));
                }
            }
            let state = match state {
                Ok(state) => state,
                Err(cause) => return Err(abort(cause, outcome)),
            };
            let point = match partition.evaluate(&state, &self.complex) {
                Ok(point) => point,
                Err(cause) => return Err(abort(cause.into(), outcome)),
            };
            let step = match self.step(outcome.final_mode.as_ref(), &point, tick) {
                Ok(step) => step,
                Err(cause) => return Err(abort(cause, outcome)),
            };
            outcome
                .trajectory
                .push(tick, point)
                .expect("ticks checked strictly increasing");
            outcome.events.extend(step.events);
            outcome.final_mode = step.current;
            last_tick = Some(tick);
        }
        Ok(outcome)
    }
}

/// Result of one step: the mode now active and the events the step emitted.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub current: Option<Face>,
    pub events: Vec<TransitionEvent>,
}

/// Everything a completed run produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub events: Vec<TransitionEvent>,
    pub final_mode: Option<Face>,
}

/// An aborted run: the failing tick, why, and the prefix that ran clean.
#[derive(Debug, Clone, PartialEq)]
pub struct RunAborted {
    pub tick: u64,
    pub cause: EngineError,
    pub partial: RunOutcome,
}

impl fmt::Display for RunAborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted at tick {}: {}", self.tick, self.cause)
    }
}

/// Extends a complex with a shadow of one vertex: every face containing the
/// original gains a copy with the shadow substituted, plus a linking face
/// holding both. The result stays downward closed, adding exactly two new
/// faces per face that contains the original.
pub fn add_shadow(
    complex: &Complex,
    original: &VertexId,
    shadow: &VertexId,
) -> Result<Complex, ModeError> {
    let has_original = complex.vertices().any(|v| v == original);
    if !has_original {
        return Err(ModeError::ShadowOriginalAbsent {
            vertex: original.clone(),
        });
    }
    if complex.vertices().any(|v| v == shadow) {
        return Err(ModeError::ShadowLabelPresent {
            vertex: shadow.clone(),
        });
    }
    let mut faces: BTreeSet<Face> = complex.faces().cloned().collect();
    for face in complex.faces().filter(|f| f.contains(original)) {
        let copy = face
            .without(original)
            .map(|rest| rest.with(shadow.clone()))
            .unwrap_or_else(|| Face::vertex(shadow.clone()));
        faces.insert(copy);
        faces.insert(face.with(shadow.clone()));
    }
    Ok(Complex::from_explicit_faces(faces))
}

/// Counts calls per oracle name and raises an alarm as soon as a counter
/// passes its configured limit. Names with no limit never alarm.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleMonitor {
    limits: BTreeMap<String, u64>,
    counters: BTreeMap<String, u64>,
}

impl OracleMonitor {
    pub fn new(limits: BTreeMap<String, u64>) -> Self {
        OracleMonitor {
            limits,
            counters: BTreeMap::new(),
        }
    }

    /// Records one call; true when the new count exceeds the limit.
    pub fn record(&mut self, name: &str) -> bool {
        let counter = self.counters.entry(name.to_string()).or_insert(0);
        *counter += 1;
        match self.limits.get(name) {
            Some(limit) => *counter > *limit,
            None => false,
        }
    }

    pub fn count(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }

    pub fn limit(&self, name: &str) -> Option<u64> {
        self.limits.get(name).copied()
    }
}

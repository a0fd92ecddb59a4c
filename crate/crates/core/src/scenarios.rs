//! Bundled scenarios: a person-of-interest triage pipeline with its evidence
//! cube and partition of unity, a four-vertex emergency response complex,
//! and a layered command structure for major incidents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::belief::{Component, Membership, PartitionOfUnity};
use crate::geometry::{BarycentricPoint, GeometryError};
use crate::modes::ModeSystem;
use crate::simplicial::{Complex, Face, VertexId};

// Triage vertex labels.
pub const NORMAL: &str = "normal";
pub const BEGIN: &str = "begin";
pub const NEITHER: &str = "neither";
pub const CONCERN: &str = "concern";
pub const OPPORTUNITY: &str = "opportunity";
pub const CLEARANCE: &str = "clearance";
pub const INVESTIGATION: &str = "investigation";

// Emergency response vertex labels.
pub const WARNING: &str = "warning";
pub const POLICE: &str = "police";
pub const FIRE: &str = "fire";
pub const AMBULANCE: &str = "ambulance";

// Layered command vertex labels: the three services in routine and silver
// posture, the per-service gold commanders, and the strategic liaison ring.
pub const POLICE_ROUTINE: &str = "police_routine";
pub const FIRE_ROUTINE: &str = "fire_routine";
pub const AMBULANCE_ROUTINE: &str = "ambulance_routine";
pub const POLICE_SILVER: &str = "police_silver";
pub const FIRE_SILVER: &str = "fire_silver";
pub const AMBULANCE_SILVER: &str = "ambulance_silver";
pub const GOLD_POLICE: &str = "gold_police";
pub const GOLD_FIRE: &str = "gold_fire";
pub const GOLD_AMBULANCE: &str = "gold_ambulance";
pub const GOLD: &str = "gold";
pub const POLITICIANS: &str = "politicians";
pub const MEDIA: &str = "media";
pub const LOCAL_COUNCIL: &str = "local_council";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("weight for {kind} must be finite and non-negative, got {weight}")]
    InvalidWeight { kind: String, weight: f64 },
    #[error("preset level must be finite and positive, got {level}")]
    InvalidLevel { level: f64 },
    #[error("total check count must be positive")]
    NoChecks,
    #[error("signal {kind} must be finite and non-negative, got {value}")]
    InvalidSignal { kind: String, value: f64 },
    #[error("{done} checks done exceeds the {total} planned")]
    TooManyChecks { done: u64, total: u64 },
    #[error("coordinate {value} lies outside the unit interval")]
    CoordinateOutOfRange { value: f64 },
    #[error("region margins must lie in (0, 1), got epsilon {epsilon}, delta {delta}")]
    InvalidMargins { epsilon: f64, delta: f64 },
    #[error("no triage region covers {point}")]
    CoverageGap { point: CubePoint },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A point of the evidence cube: opportunity, concern, and end-of-process
/// coordinates, each in the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubePoint {
    pub x_opp: f64,
    pub x_con: f64,
    pub x_end: f64,
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(x_opp={}, x_con={}, x_end={})",
            self.x_opp, self.x_con, self.x_end
        )
    }
}

fn check_unit(value: f64) -> Result<(), ScenarioError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ScenarioError::CoordinateOutOfRange { value })
    }
}

fn check_cube(point: &CubePoint) -> Result<(), ScenarioError> {
    check_unit(point.x_opp)?;
    check_unit(point.x_con)?;
    check_unit(point.x_end)
}

/// The end coordinate: how close the case is to leaving triage, pulled up
/// by completed checks and by either score being decisive.
pub fn x_end(x_begin: f64, x_con: f64, x_opp: f64) -> f64 {
    (1.0 - x_begin).max(x_con).max(x_opp)
}

/// Normalised triage coordinates extracted from one evidence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriageSignals {
    /// Fraction of planned checks still to run.
    pub x_begin: f64,
    /// Weighted concern score, capped at one.
    pub x_con: f64,
    /// Weighted opportunity score, capped at one.
    pub x_opp: f64,
}

impl TriageSignals {
    pub fn x_end(&self) -> f64 {
        x_end(self.x_begin, self.x_con, self.x_opp)
    }

    pub fn cube(&self) -> CubePoint {
        CubePoint {
            x_opp: self.x_opp,
            x_con: self.x_con,
            x_end: self.x_end(),
        }
    }
}

/// Scoring policy for triage evidence: weights per signal kind, the level
/// at which a weighted sum saturates, and the planned number of checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TriagePresets {
    concern_weights: BTreeMap<String, f64>,
    concern_level: f64,
    opportunity_weights: BTreeMap<String, f64>,
    opportunity_level: f64,
    total_checks: u64,
}

fn check_weights(weights: &BTreeMap<String, f64>) -> Result<(), ScenarioError> {
    for (kind, weight) in weights {
        if !weight.is_finite() || *weight < 0.0 {
            return Err(ScenarioError::InvalidWeight {
                kind: kind.clone(),
                weight: *weight,
            });
        }
    }
    Ok(())
}

fn check_level(level: f64) -> Result<(), ScenarioError> {
    if level.is_finite() && level > 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::InvalidLevel { level })
    }
}

impl TriagePresets {
    pub fn new(
        concern_weights: BTreeMap<String, f64>,
        concern_level: f64,
        opportunity_weights: BTreeMap<String, f64>,
        opportunity_level: f64,
        total_checks: u64,
    ) -> Result<Self, ScenarioError> {
        check_weights(&concern_weights)?;
        check_level(concern_level)?;
        check_weights(&opportunity_weights)?;
        check_level(opportunity_level)?;
        if total_checks == 0 {
            return Err(ScenarioError::NoChecks);
        }
        Ok(TriagePresets {
            concern_weights,
            concern_level,
            opportunity_weights,
            opportunity_level,
            total_checks,
        })
    }

    pub fn total_checks(&self) -> u64 {
        self.total_checks
    }
}

fn weighted_score(raw: &BTreeMap<String, f64>, weights: &BTreeMap<String, f64>, level: f64) -> f64 {
    let sum: f64 = weights
        .iter()
        .map(|(kind, weight)| weight * raw.get(kind).copied().unwrap_or(0.0))
        .sum();
    (sum / level).min(1.0)
}

/// Converts one raw evidence record into triage coordinates. Signal kinds
/// without a configured weight are ignored; negative or non-finite values
/// are rejected outright.
pub fn triage_signals(
    raw: &BTreeMap<String, f64>,
    checks_done: u64,
    presets: &TriagePresets,
) -> Result<TriageSignals, ScenarioError> {
    for (kind, value) in raw {
        if !value.is_finite() || *value < 0.0 {
            return Err(ScenarioError::InvalidSignal {
                kind: kind.clone(),
                value: *value,
            });
        }
    }
    if checks_done > presets.total_checks {
        return Err(ScenarioError::TooManyChecks {
            done: checks_done,
            total: presets.total_checks,
        });
    }
    let remaining = presets.total_checks - checks_done;
    Ok(TriageSignals {
        x_begin: remaining as f64 / presets.total_checks as f64,
        x_con: weighted_score(raw, &presets.concern_weights, presets.concern_level),
        x_opp: weighted_score(raw, &presets.opportunity_weights, presets.opportunity_level),
    })
}

/// Margins carving the cube into regions: `epsilon` bounds the begin box
/// away from the far faces, `delta` is the width of the exit bands. Equal
/// margins guarantee the regions cover the whole cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    epsilon: f64,
    delta: f64,
}

impl RegionParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, ScenarioError> {
        let open_unit = |m: f64| m.is_finite() && m > 0.0 && m < 1.0;
        if open_unit(epsilon) && open_unit(delta) {
            Ok(RegionParams { epsilon, delta })
        } else {
            Err(ScenarioError::InvalidMargins { epsilon, delta })
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Default for RegionParams {
    fn default() -> Self {
        RegionParams {
            epsilon: 0.2,
            delta: 0.2,
        }
    }
}

fn vid(label: &str) -> VertexId {
    VertexId::new(label).expect("bundled labels are well formed")
}

fn face_of(labels: &[&str]) -> Face {
    Face::from_labels(labels.iter().copied()).expect("bundled faces are non-empty")
}

/// Which of the four triage regions contain the point. The begin box keeps
/// clear of every far face; concern and opportunity bands may overlap each
/// other but shut out the neither band.
pub fn triage_regions(
    point: &CubePoint,
    params: &RegionParams,
) -> Result<BTreeSet<VertexId>, ScenarioError> {
    check_cube(point)?;
    let hi = 1.0 - params.delta;
    let max = point.x_opp.max(point.x_con).max(point.x_end);
    let mut regions = BTreeSet::new();
    if max < 1.0 - params.epsilon {
        regions.insert(vid(BEGIN));
    }
    if point.x_con >= hi {
        regions.insert(vid(CONCERN));
    }
    if point.x_opp >= hi {
        regions.insert(vid(OPPORTUNITY));
    }
    if point.x_end >= hi && point.x_con < hi && point.x_opp < hi {
        regions.insert(vid(NEITHER));
    }
    Ok(regions)
}

/// Closure of the single 3-face the triage weights live on.
pub fn triage_tetrahedron() -> Complex {
    Complex::from_maximal_faces([face_of(&[BEGIN, NEITHER, CONCERN, OPPORTUNITY])])
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn triage_ramps(point: &CubePoint, params: &RegionParams) -> [(&'static str, f64); 4] {
    let hi = 1.0 - params.delta;
    let max = point.x_opp.max(point.x_con).max(point.x_end);
    let gate_open = point.x_con < hi && point.x_opp < hi;
    [
        (
            BEGIN,
            clamp01(((1.0 - params.epsilon) - max) / params.epsilon),
        ),
        (CONCERN, clamp01((point.x_con - hi) / params.delta)),
        (
            NEITHER,
            if gate_open {
                clamp01((point.x_end - hi) / params.delta)
            } else {
                0.0
            },
        ),
        (OPPORTUNITY, clamp01((point.x_opp - hi) / params.delta)),
    ]
}

/// Barycentric weights over {begin, neither, concern, opportunity} for a
/// cube point: linear ramps into each region, normalised. The ramps all
/// vanish exactly on region boundaries; there the mass falls back to a
/// uniform split over the containing regions, which keeps the support
/// condition exact. A point no region contains is a coverage gap (possible
/// only with unequal margins).
pub fn triage_phi(
    point: &CubePoint,
    params: &RegionParams,
) -> Result<BarycentricPoint, ScenarioError> {
    check_cube(point)?;
    let ramps = triage_ramps(point, params);
    let total: f64 = ramps.iter().map(|(_, w)| w).sum();
    let weights: BTreeMap<VertexId, f64> = if total > 0.0 {
        ramps
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(label, w)| (vid(label), w / total))
            .collect()
    } else {
        let regions = triage_regions(point, params)?;
        if regions.is_empty() {
            return Err(ScenarioError::CoverageGap { point: *point });
        }
        let share = 1.0 / regions.len() as f64;
        regions.into_iter().map(|label| (label, share)).collect()
    };
    Ok(BarycentricPoint::new(weights, &triage_tetrahedron())?)
}

/// The triage weights packaged as a partition of unity over cube points,
/// ready to drive a mode system. States the regions fail to cover evaluate
/// to all-zero components and are rejected by the sum condition.
pub fn triage_partition(params: RegionParams) -> PartitionOfUnity<CubePoint> {
    let components: BTreeMap<VertexId, Component<CubePoint>> =
        [BEGIN, NEITHER, CONCERN, OPPORTUNITY]
            .iter()
            .map(|label| {
                let key = vid(label);
                let component = {
                    let key = key.clone();
                    Box::new(move |state: &CubePoint| {
                        triage_phi(state, &params)
                            .map(|point| point.weight(&key))
                            .unwrap_or(0.0)
                    }) as Component<CubePoint>
                };
                (key, component)
            })
            .collect();
    let membership: Membership<CubePoint> = Box::new(move |label: &VertexId, state: &CubePoint| {
        triage_regions(state, &params)
            .map(|regions| regions.contains(label))
            .unwrap_or(false)
    });
    PartitionOfUnity::new(components, membership)
}

fn named_system(complex: Complex, names: &[(&[&str], &str, &str)]) -> ModeSystem {
    let mut system = ModeSystem::with_defaults(complex).expect("default thresholds are valid");
    for (labels, name, objectives) in names {
        system
            .set_metadata(&face_of(labels), *name, *objectives)
            .expect("named faces belong to the bundled complex");
    }
    system
}

/// One warning vertex plus the three first-response services, filled in
/// completely: every subset of services, with or without the warning, is a
/// deployable mode of its own.
pub fn build_emergency_tetrahedron() -> ModeSystem {
    named_system(
        Complex::from_maximal_faces([face_of(&[WARNING, POLICE, FIRE, AMBULANCE])]),
        &[(
            &[WARNING, POLICE, FIRE, AMBULANCE],
            "assessment",
            "gather incoming information and weigh which services to deploy",
        )],
    )
}

/// The person-of-interest triage complex: the solid triage tetrahedron,
/// the clearance and investigation triangles hanging off its output edge,
/// and the stand-down triangle back to normal.
pub fn build_triage_complex() -> ModeSystem {
    let complex = Complex::from_maximal_faces([
        face_of(&[BEGIN, NEITHER, CONCERN, OPPORTUNITY]),
        face_of(&[OPPORTUNITY, CLEARANCE, INVESTIGATION]),
        face_of(&[CONCERN, OPPORTUNITY, INVESTIGATION]),
        face_of(&[NORMAL, BEGIN, NEITHER]),
    ]);
    named_system(
        complex,
        &[
            (
                &[BEGIN, NEITHER, CONCERN, OPPORTUNITY],
                "triage",
                "classify a person of interest from incoming evidence",
            ),
            (
                &[OPPORTUNITY, CLEARANCE, INVESTIGATION],
                "obtain security clearance",
                "collect references and decide whether to grant clearance",
            ),
            (
                &[CONCERN, OPPORTUNITY, INVESTIGATION],
                "consider further investigation",
                "weigh escalation to a full investigation",
            ),
            (
                &[NORMAL, BEGIN, NEITHER],
                "cancel investigation",
                "stand down and dispose of collected material",
            ),
        ],
    )
}

/// Triangulated prism over the three services: routine posture at one end,
/// silver posture at the other, filled with three tetrahedra along the
/// ordered path so partially stood-up commands are modes too.
pub fn gsb_prism() -> Complex {
    Complex::from_maximal_faces([
        face_of(&[
            POLICE_ROUTINE,
            FIRE_ROUTINE,
            AMBULANCE_ROUTINE,
            AMBULANCE_SILVER,
        ]),
        face_of(&[POLICE_ROUTINE, FIRE_ROUTINE, FIRE_SILVER, AMBULANCE_SILVER]),
        face_of(&[POLICE_ROUTINE, POLICE_SILVER, FIRE_SILVER, AMBULANCE_SILVER]),
    ])
}

/// The strategic layer: per-service gold commanders coordinating as a
/// triangle, and the gold command proper liaising with politicians, media
/// and the local council as a solid tetrahedron.
pub fn gsb_gold() -> Complex {
    Complex::from_maximal_faces([
        face_of(&[GOLD_POLICE, GOLD_FIRE, GOLD_AMBULANCE]),
        face_of(&[GOLD, POLITICIANS, MEDIA, LOCAL_COUNCIL]),
    ])
}

/// The full layered command complex: the routine-to-silver prism together
/// with the gold structure as a second component.
pub fn build_gsb_complex() -> ModeSystem {
    let faces = gsb_prism()
        .faces()
        .chain(gsb_gold().faces())
        .cloned()
        .collect::<Vec<_>>();
    named_system(
        Complex::from_explicit_faces(faces),
        &[
            (
                &[POLICE_ROUTINE, FIRE_ROUTINE, AMBULANCE_ROUTINE],
                "routine command",
                "normal tri-service operation",
            ),
            (
                &[POLICE_SILVER, FIRE_SILVER, AMBULANCE_SILVER],
                "silver command",
                "tactical coordination at the scene",
            ),
            (
                &[GOLD_POLICE, GOLD_FIRE, GOLD_AMBULANCE],
                "gold coordination",
                "coordinate the strategic posture of the three services",
            ),
            (
                &[GOLD, POLITICIANS, MEDIA, LOCAL_COUNCIL],
                "gold command",
                "hold strategy and resources and manage external liaison",
            ),
        ],
    )
}

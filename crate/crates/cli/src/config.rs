//! Scenario configuration files: parsing, cross-reference checks, and
//! assembly into a ready-to-run mode system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use modal_core::geometry::Layout;
use modal_core::modes::ModeSystem;
use modal_core::scenarios::{
    build_emergency_tetrahedron, build_gsb_complex, build_triage_complex, RegionParams,
    TriagePresets,
};
use modal_core::simplicial::{Complex, Cover, Face, VertexId};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    /// Maximal faces of a custom complex; bundled kinds bring their own.
    pub complex: Option<Vec<Vec<String>>>,
    /// Vertex positions for rendering, label to [x, y].
    pub layout: Option<BTreeMap<String, (f64, f64)>>,
    pub thresholds: Option<ThresholdConfig>,
    /// Display names and objectives for chosen faces.
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    pub triage: Option<TriageConfig>,
    /// Per-signal call budgets for the oracle monitor.
    #[serde(default)]
    pub oracle_limits: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Triage,
    Emergency,
    Gsb,
    Custom,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Triage => "triage",
            ScenarioKind::Emergency => "emergency",
            ScenarioKind::Gsb => "gsb",
            ScenarioKind::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub tau: Option<f64>,
    pub eta: Option<f64>,
    #[serde(default)]
    pub overrides: Vec<OverrideConfig>,
    #[serde(default)]
    pub latched: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideConfig {
    pub face: Vec<String>,
    pub tau: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub face: Vec<String>,
    pub name: String,
    #[serde(default)]
    pub objectives: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriageConfig {
    pub concern_weights: BTreeMap<String, f64>,
    pub concern_level: f64,
    pub opportunity_weights: BTreeMap<String, f64>,
    pub opportunity_level: f64,
    pub total_checks: u64,
    #[serde(default = "default_margin")]
    pub epsilon: f64,
    #[serde(default = "default_margin")]
    pub delta: f64,
}

fn default_margin() -> f64 {
    0.2
}

/// A configuration resolved against the core library: the mode system with
/// thresholds and names applied, plus everything a replay needs.
pub struct BuiltScenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub system: ModeSystem,
    pub layout: Option<Layout>,
    pub presets: Option<TriagePresets>,
    pub region_params: RegionParams,
    pub oracle_limits: BTreeMap<String, u64>,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

fn parse_face(labels: &[String]) -> Result<Face, CliError> {
    Face::from_labels(labels.iter().map(|l| l.as_str()))
        .map_err(|e| CliError::Validation(format!("bad face [{}]: {e}", labels.join(", "))))
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Validation(message.into())
}

pub fn build_scenario(config: &ScenarioConfig) -> Result<BuiltScenario, CliError> {
    let mut system = match config.kind {
        ScenarioKind::Triage => build_triage_complex(),
        ScenarioKind::Emergency => build_emergency_tetrahedron(),
        ScenarioKind::Gsb => build_gsb_complex(),
        ScenarioKind::Custom => {
            let sets = config.complex.as_ref().ok_or_else(|| {
                invalid("a custom scenario must list the maximal faces of its complex")
            })?;
            let complex =
                Complex::from_label_sets(sets).map_err(|e| invalid(format!("bad complex: {e}")))?;
            ModeSystem::with_defaults(complex).expect("default thresholds are valid")
        }
    };
    if config.kind != ScenarioKind::Custom && config.complex.is_some() {
        return Err(invalid(format!(
            "the {} scenario fixes its own complex; drop the complex field or use kind custom",
            config.kind
        )));
    }

    if let Some(thresholds) = &config.thresholds {
        let tau = thresholds.tau.unwrap_or(system.tau());
        let eta = thresholds.eta.unwrap_or(system.eta());
        system
            .set_thresholds(tau, eta)
            .map_err(|e| invalid(e.to_string()))?;
        for entry in &thresholds.overrides {
            let face = parse_face(&entry.face)?;
            system
                .set_threshold_override(&face, entry.tau, entry.eta)
                .map_err(|e| invalid(e.to_string()))?;
        }
        for labels in &thresholds.latched {
            let face = parse_face(labels)?;
            system
                .set_latched(&face, true)
                .map_err(|e| invalid(e.to_string()))?;
        }
    }

    for mode in &config.modes {
        let face = parse_face(&mode.face)?;
        system
            .set_metadata(&face, mode.name.clone(), mode.objectives.clone())
            .map_err(|e| invalid(e.to_string()))?;
    }

    let layout = match &config.layout {
        None => None,
        Some(positions) => {
            let mut parsed = BTreeMap::new();
            for (label, position) in positions {
                let vertex = VertexId::new(label.as_str())
                    .map_err(|e| invalid(format!("bad layout label: {e}")))?;
                if !system.complex().contains(&Face::vertex(vertex.clone())) {
                    return Err(invalid(format!(
                        "layout names {label}, which is not a vertex of the complex"
                    )));
                }
                parsed.insert(vertex, *position);
            }
            let layout = Layout::new(parsed);
            let missing = layout.missing_for(system.complex());
            if let Some(vertex) = missing.first() {
                return Err(invalid(format!(
                    "layout is missing a position for vertex {vertex}"
                )));
            }
            Some(layout)
        }
    };

    let (presets, region_params) = match (config.kind, &config.triage) {
        (ScenarioKind::Triage, Some(t)) => {
            let presets = TriagePresets::new(
                t.concern_weights.clone(),
                t.concern_level,
                t.opportunity_weights.clone(),
                t.opportunity_level,
                t.total_checks,
            )
            .map_err(|e| invalid(e.to_string()))?;
            let params =
                RegionParams::new(t.epsilon, t.delta).map_err(|e| invalid(e.to_string()))?;
            (Some(presets), params)
        }
        (ScenarioKind::Triage, None) => {
            return Err(invalid(
                "a triage scenario needs a triage section with its scoring presets",
            ));
        }
        (_, Some(_)) => {
            return Err(invalid(format!(
                "the triage section only applies to kind triage, not {}",
                config.kind
            )));
        }
        (_, None) => (None, RegionParams::default()),
    };

    Ok(BuiltScenario {
        name: config.name.clone(),
        kind: config.kind,
        system,
        layout,
        presets,
        region_params,
        oracle_limits: config.oracle_limits.clone(),
    })
}

/// Cover description for the nerve command: labelled sample sets, with an
/// optional explicit universe. Without one, the universe is the union.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub universe: Option<Vec<String>>,
    pub sets: BTreeMap<String, Vec<String>>,
}

pub fn load_cover(path: &Path) -> Result<Cover, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: CoverFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    let mut sets = BTreeMap::new();
    for (label, samples) in file.sets {
        let label =
            VertexId::new(label.as_str()).map_err(|e| invalid(format!("bad cover label: {e}")))?;
        sets.insert(label, samples.into_iter().collect::<BTreeSet<String>>());
    }
    match file.universe {
        None => Ok(Cover::spanning(sets)),
        Some(samples) => {
            Cover::new(sets, samples.into_iter().collect()).map_err(|e| invalid(e.to_string()))
        }
    }
}

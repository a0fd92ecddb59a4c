//! The four subcommands: validate a scenario, replay evidence against it,
//! print the nerve of a cover, and print a face graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use modal_core::belief::{Component, PartitionOfUnity};
use modal_core::modes::{EngineError, OracleMonitor, RunOutcome, TransitionEvent};
use modal_core::scenarios::triage_partition;
use modal_core::simplicial::{nerve, to_graph, Complex, Face, GraphRelation, VertexId};

use crate::config::{build_scenario, load_config, BuiltScenario, ScenarioKind};
use crate::evidence::{load_evidence, EvidenceRecord};
use crate::render::render_svg;
use crate::CliError;

pub fn cmd_validate(config_path: &Path) -> Result<String, CliError> {
    let config = load_config(config_path)?;
    let built = build_scenario(&config)?;
    let complex = built.system.complex();
    let census: Vec<String> = complex.census().iter().map(|c| c.to_string()).collect();
    Ok(format!(
        "name: {}\nkind: {}\nvertices: {}\ncensus: {}\nfaces: {}\nvalid: {}\n",
        built.name,
        built.kind,
        complex.vertex_count(),
        census.join(","),
        complex.face_count(),
        complex.is_valid(),
    ))
}

/// Faces listed smallest first, label order inside each dimension.
fn canonical_faces(faces: impl IntoIterator<Item = Face>) -> Vec<Face> {
    let mut list: Vec<Face> = faces.into_iter().collect();
    list.sort_by_key(|f| (f.dimension(), f.clone()));
    list
}

pub fn cmd_nerve(cover_path: &Path) -> Result<String, CliError> {
    let cover = crate::config::load_cover(cover_path)?;
    let complex = nerve(&cover);
    let mut out = String::new();
    for face in canonical_faces(complex.maximal_faces()) {
        let _ = writeln!(out, "{face}");
    }
    Ok(out)
}

pub fn cmd_graph(config_path: &Path, relation: GraphRelation) -> Result<String, CliError> {
    let config = load_config(config_path)?;
    let built = build_scenario(&config)?;
    let graph = to_graph(built.system.complex(), relation);
    let mut out = String::new();
    let _ = writeln!(out, "nodes: {}", graph.node_count());
    let _ = writeln!(out, "edges: {}", graph.edge_count());
    for (index, face) in graph.nodes().iter().enumerate() {
        let _ = writeln!(out, "node {index} {face}");
    }
    for (from, to) in graph.edges() {
        let _ = writeln!(out, "edge {from} {to}");
    }
    Ok(out)
}

/// Weights straight off the evidence record: each vertex keeps its named
/// signal divided by the record total.
fn direct_partition(complex: &Complex) -> PartitionOfUnity<BTreeMap<VertexId, f64>> {
    let components: BTreeMap<VertexId, Component<BTreeMap<VertexId, f64>>> = complex
        .vertices()
        .map(|vertex| {
            let key = vertex.clone();
            let component = Box::new(move |state: &BTreeMap<VertexId, f64>| {
                state.get(&key).copied().unwrap_or(0.0)
            }) as Component<BTreeMap<VertexId, f64>>;
            (vertex.clone(), component)
        })
        .collect();
    PartitionOfUnity::new(
        components,
        Box::new(|vertex: &VertexId, state: &BTreeMap<VertexId, f64>| {
            state.get(vertex).copied().unwrap_or(0.0) > 0.0
        }),
    )
}

fn reject(tick: u64, message: impl Into<String>) -> EngineError {
    EngineError::RecordRejected {
        tick,
        message: message.into(),
    }
}

fn direct_state(
    record: &EvidenceRecord,
    vertices: &BTreeSet<VertexId>,
) -> Result<BTreeMap<VertexId, f64>, EngineError> {
    let tick = record.tick;
    let mut state = BTreeMap::new();
    let mut total = 0.0;
    for (name, value) in &record.signals {
        let vertex = VertexId::new(name.as_str())
            .map_err(|e| reject(tick, format!("bad signal name: {e}")))?;
        if !vertices.contains(&vertex) {
            return Err(reject(
                tick,
                format!("signal {name} is not a vertex of the complex"),
            ));
        }
        if !value.is_finite() || *value < 0.0 {
            return Err(reject(
                tick,
                format!("signal {name} must be finite and non-negative, got {value}"),
            ));
        }
        total += value;
        state.insert(vertex, *value);
    }
    if total <= 0.0 {
        return Err(reject(tick, "record carries no signal mass"));
    }
    for value in state.values_mut() {
        *value /= total;
    }
    Ok(state)
}

fn watch(monitor: &mut OracleMonitor, record: &EvidenceRecord) {
    for name in record.signals.keys() {
        if monitor.record(name) {
            let limit = monitor.limit(name).unwrap_or(0);
            eprintln!(
                "alarm: oracle {name} used {} times, over its limit of {limit} (tick {})",
                monitor.count(name),
                record.tick
            );
        }
    }
}

fn replay(built: &BuiltScenario, records: &[EvidenceRecord]) -> (RunOutcome, Option<String>) {
    let mut monitor = OracleMonitor::new(built.oracle_limits.clone());
    let result = if built.kind == ScenarioKind::Triage {
        let presets = built
            .presets
            .as_ref()
            .expect("triage scenarios always build presets");
        let partition = triage_partition(built.region_params);
        let items = records.iter().map(|record| {
            watch(&mut monitor, record);
            let state = match record.checks_done {
                None => Err(reject(record.tick, "triage records need checks_done")),
                Some(done) => modal_core::scenarios::triage_signals(&record.signals, done, presets)
                    .map(|signals| signals.cube())
                    .map_err(|e| reject(record.tick, e.to_string())),
            };
            (record.tick, state)
        });
        built.system.run_fallible(&partition, items)
    } else {
        let vertices: BTreeSet<VertexId> = built.system.complex().vertices().cloned().collect();
        let partition = direct_partition(built.system.complex());
        let items = records.iter().map(|record| {
            watch(&mut monitor, record);
            (record.tick, direct_state(record, &vertices))
        });
        built.system.run_fallible(&partition, items)
    };
    match result {
        Ok(outcome) => (outcome, None),
        Err(aborted) => {
            let message = aborted.to_string();
            (aborted.partial, Some(message))
        }
    }
}

fn trajectory_csv(complex: &Complex, outcome: &RunOutcome) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let vertices: Vec<&VertexId> = complex.vertices().collect();
    let mut header = vec!["tick".to_string()];
    header.extend(vertices.iter().map(|v| v.as_str().to_string()));
    writer
        .write_record(&header)
        .map_err(|e| CliError::Format(e.to_string()))?;
    for (tick, point) in outcome.trajectory.samples() {
        let mut row = vec![tick.to_string()];
        row.extend(vertices.iter().map(|v| point.weight(v).to_string()));
        writer
            .write_record(&row)
            .map_err(|e| CliError::Format(e.to_string()))?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Format(e.to_string()))
}

fn events_csv(events: &[TransitionEvent]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["tick", "kind", "from", "to"])
        .map_err(|e| CliError::Format(e.to_string()))?;
    for event in events {
        writer
            .write_record([
                event.tick.to_string(),
                event.kind.to_string(),
                event.from_label(),
                event.to_label(),
            ])
            .map_err(|e| CliError::Format(e.to_string()))?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Format(e.to_string()))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|source| CliError::Io { path, source })
}

pub fn cmd_run(config_path: &Path, evidence_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    let built = build_scenario(&config)?;
    let layout = built.layout.as_ref().ok_or_else(|| {
        CliError::Validation("a run needs a layout to draw trace.svg".to_string())
    })?;
    let records = load_evidence(evidence_path)?;

    let (outcome, abort) = replay(&built, &records);

    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let complex = built.system.complex();
    write_file(
        out_dir,
        "trajectory.csv",
        &trajectory_csv(complex, &outcome)?,
    )?;
    write_file(out_dir, "events.csv", &events_csv(&outcome.events)?)?;
    let svg = render_svg(complex, layout, &outcome.trajectory)?;
    write_file(out_dir, "trace.svg", svg.as_bytes())?;

    match abort {
        None => Ok(()),
        Some(message) => Err(CliError::Validation(message)),
    }
}

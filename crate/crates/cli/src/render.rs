//! Fixed-style SVG export: the complex drawn from its layout, with the
//! replay trajectory as a polyline over it.

use std::fmt::Write as _;

use modal_core::geometry::{Layout, Trajectory};
use modal_core::simplicial::Complex;

use crate::CliError;

const MARGIN: f64 = 40.0;
const MIN_EXTENT: f64 = 80.0;
const FACE_FILL: &str = "#7aa6d8";
const FACE_OPACITY: &str = "0.25";
const EDGE_STROKE: &str = "#55606e";
const EDGE_WIDTH: &str = "1.5";
const VERTEX_FILL: &str = "#1f4e79";
const VERTEX_RADIUS: &str = "4";
const LABEL_FONT_SIZE: &str = "11";
const LABEL_FILL: &str = "#222222";
const LABEL_OFFSET: (f64, f64) = (7.0, -7.0);
const PATH_STROKE: &str = "#c0392b";
const PATH_WIDTH: &str = "2";
const MARKER_RADIUS: &str = "2.5";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Draws every triangle and edge the layout can place, the labelled
/// vertices, and the trajectory with one marker per sample. Requires a
/// position for every vertex.
pub fn render_svg(
    complex: &Complex,
    layout: &Layout,
    trajectory: &Trajectory,
) -> Result<String, CliError> {
    let position = |v| {
        layout
            .position(v)
            .ok_or_else(|| CliError::Validation(format!("layout is missing vertex {v}")))
    };

    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (_, (x, y)) in layout.positions() {
        min = (min.0.min(x), min.1.min(y));
        max = (max.0.max(x), max.1.max(y));
    }
    if layout.is_empty() {
        min = (0.0, 0.0);
        max = (MIN_EXTENT, MIN_EXTENT);
    }
    let width = (max.0 - min.0).max(MIN_EXTENT) + 2.0 * MARGIN;
    let height = (max.1 - min.1).max(MIN_EXTENT) + 2.0 * MARGIN;
    let ox = min.0 - MARGIN;
    let oy = min.1 - MARGIN;

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.3} {:.3} {:.3} {:.3}\" width=\"{:.3}\" height=\"{:.3}\">",
        ox, oy, width, height, width, height
    )
    .unwrap();

    for face in complex.faces().filter(|f| f.dimension() == 2) {
        let mut points = String::new();
        for vertex in face.vertices() {
            let (x, y) = position(vertex)?;
            write!(points, "{x:.3},{y:.3} ").unwrap();
        }
        writeln!(
            svg,
            "  <polygon points=\"{}\" fill=\"{FACE_FILL}\" fill-opacity=\"{FACE_OPACITY}\" stroke=\"none\"/>",
            points.trim_end()
        )
        .unwrap();
    }

    for face in complex.faces().filter(|f| f.dimension() == 1) {
        let ends: Vec<(f64, f64)> = face.vertices().map(position).collect::<Result<_, _>>()?;
        writeln!(
            svg,
            "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{EDGE_STROKE}\" stroke-width=\"{EDGE_WIDTH}\"/>",
            ends[0].0, ends[0].1, ends[1].0, ends[1].1
        )
        .unwrap();
    }

    for vertex in complex.vertices() {
        let (x, y) = position(vertex)?;
        writeln!(
            svg,
            "  <circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{VERTEX_RADIUS}\" fill=\"{VERTEX_FILL}\"/>"
        )
        .unwrap();
        writeln!(
            svg,
            "  <text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"{LABEL_FONT_SIZE}\" fill=\"{LABEL_FILL}\">{}</text>",
            x + LABEL_OFFSET.0,
            y + LABEL_OFFSET.1,
            escape(vertex.as_str())
        )
        .unwrap();
    }

    let embedded: Vec<(f64, f64)> = trajectory
        .samples()
        .iter()
        .map(|(_, point)| {
            point
                .embed(layout)
                .map_err(|e| CliError::Validation(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    if embedded.len() > 1 {
        let mut points = String::new();
        for (x, y) in &embedded {
            write!(points, "{x:.3},{y:.3} ").unwrap();
        }
        writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{PATH_STROKE}\" stroke-width=\"{PATH_WIDTH}\"/>",
            points.trim_end()
        )
        .unwrap();
    }
    for (x, y) in &embedded {
        writeln!(
            svg,
            "  <circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{MARKER_RADIUS}\" fill=\"{PATH_STROKE}\"/>"
        )
        .unwrap();
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

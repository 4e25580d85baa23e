//! SVG rendering of networks: node color encodes importance, node radius
//! scales with it, edge stroke width grows with log(1+weight).
//!
//! Output is a pure function of its inputs — floats are printed with fixed
//! precision, elements in fixed order — so renders are byte-identical and
//! safe to golden-test.

use std::fmt::Write as _;

use thiserror::Error;

use crate::layout::LayoutResult;
use crate::metrics::ScoreMap;
use crate::network::CharacterNetwork;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("color scale: {0}")]
    Scale(String),
}

/// Linear-interpolation color scale over sorted stops covering [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ColorScale {
    stops: Vec<(f64, (u8, u8, u8))>,
}

impl ColorScale {
    pub fn new(stops: Vec<(f64, (u8, u8, u8))>) -> Result<Self, RenderError> {
        if stops.len() < 2 {
            return Err(RenderError::Scale("need at least two stops".to_string()));
        }
        if stops.first().map(|s| s.0) != Some(0.0) || stops.last().map(|s| s.0) != Some(1.0) {
            return Err(RenderError::Scale(
                "stops must start at 0.0 and end at 1.0".to_string(),
            ));
        }
        // partial_cmp also rejects NaN fractions.
        if stops
            .windows(2)
            .any(|w| w[0].0.partial_cmp(&w[1].0) != Some(std::cmp::Ordering::Less))
        {
            return Err(RenderError::Scale(
                "stop fractions must be strictly increasing".to_string(),
            ));
        }
        Ok(Self { stops })
    }

    /// Light yellow at 0 to deep red at 1.
    pub fn heat() -> Self {
        Self::new(vec![(0.0, (255, 255, 204)), (1.0, (128, 0, 0))])
            .expect("built-in scale is valid")
    }

    /// Color at `t`, clamped to [0, 1]; endpoint stops are returned
    /// exactly.
    pub fn sample(&self, t: f64) -> (u8, u8, u8) {
        let t = t.clamp(0.0, 1.0);
        for pair in self.stops.windows(2) {
            let (t0, c0) = pair[0];
            let (t1, c1) = pair[1];
            if t <= t0 {
                return c0;
            }
            if t >= t1 {
                continue;
            }
            let f = (t - t0) / (t1 - t0);
            let mix = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
            return (mix(c0.0, c1.0), mix(c0.1, c1.1), mix(c0.2, c1.2));
        }
        self.stops.last().unwrap().1
    }
}

fn hex(color: (u8, u8, u8)) -> String {
    format!("#{:02x}{:02x}{:02x}", color.0, color.1, color.2)
}

fn svg_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const EDGE_STROKE_SCALE: f64 = 1.8;

/// Renders the network to SVG 1.1. Scores are normalized internally, so
/// raw importance maps are fine; `node_radius_range` gives the radii at
/// normalized importance 0 and 1.
///
/// Panics if layout or scores miss a node — both must cover the network.
pub fn render_svg(
    net: &CharacterNetwork,
    layout: &LayoutResult,
    scores: &ScoreMap,
    scale: &ColorScale,
    node_radius_range: (f64, f64),
) -> String {
    let max_score = net
        .nodes
        .iter()
        .map(|n| scores.get(n.character_id).expect("score for every node"))
        .fold(0.0f64, f64::max);
    let normalized = |id: usize| -> f64 {
        let s = scores.get(id).expect("score for every node");
        if max_score > 0.0 {
            s / max_score
        } else {
            0.0
        }
    };
    let place = |id: usize| -> (f64, f64) {
        let (x, y) = layout.position(id).expect("position for every node");
        (
            MARGIN + x * (WIDTH - 2.0 * MARGIN),
            MARGIN + y * (HEIGHT - 2.0 * MARGIN),
        )
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    for (&(a, b), &w) in &net.edges {
        let (x1, y1) = place(a);
        let (x2, y2) = place(b);
        let stroke = EDGE_STROKE_SCALE * (1.0 + w as f64).ln();
        let _ = writeln!(
            out,
            "  <line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" \
             stroke=\"#9a9a9a\" stroke-width=\"{stroke:.4}\"/>"
        );
    }

    let (r_min, r_max) = node_radius_range;
    for node in &net.nodes {
        let id = node.character_id;
        let (x, y) = place(id);
        let t = normalized(id);
        let radius = r_min + t * (r_max - r_min);
        let fill = hex(scale.sample(t));
        let _ = writeln!(
            out,
            "  <circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"{radius:.4}\" \
             fill=\"{fill}\" stroke=\"#333333\" stroke-width=\"1\"/>"
        );
        let label_y = y + radius + 14.0;
        let _ = writeln!(
            out,
            "  <text x=\"{x:.4}\" y=\"{label_y:.4}\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            svg_escape(&node.name)
        );
    }

    out.push_str("</svg>\n");
    out
}

pub const DEFAULT_RADIUS_RANGE: (f64, f64) = (6.0, 26.0);

//! Scene extraction and geometry export.
//!
//! A solved layout assigns every deepest point of a diagram a coordinate
//! tuple, but a picture needs more structure than a point cloud: which points
//! are events, which chains of points form a wire, and which cells of the
//! complement belong to the same coloured region. This module recovers that
//! structure combinatorially from the full explosion of the diagram and pairs
//! it with the layout coordinates.
//!
//! Classification is by generator dimension. In an n-diagram, a deepest point
//! labelled by a dimension-n generator is an event and becomes a vertex.
//! Codimension-1 labels trace wires: the cover relations of the explosion
//! connect a wire point to its continuation in the neighbouring levels, so
//! maximal connected runs of codimension-1 points are exactly the strands.
//! Codimension-2 labels fill regions (surfaces in three dimensions). Anything
//! deeper is background and is not drawn.
//!
//! Two emitters consume a [`Scene`]: [`to_svg`] for two-dimensional diagrams
//! and [`to_scene_json`] for three- and four-dimensional ones. A
//! four-dimensional scene is an array of three-dimensional keyframes, one per
//! point of the outermost zigzag, timed by the outermost height. Both
//! emitters print every number in fixed six-decimal notation so repeated runs
//! are byte-identical.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::diagram::{
    explode, Diagram, DiagramError, ExplodeError, ExplodedDiagram, PointPath, Signature,
};
use crate::layout::DiagramLayout;
use crate::textfmt::{fixed6, json_escape, xml_escape};
use crate::zigzag::{PointIndex, ZigzagShape};

/// Geometry extraction or export failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    /// Scenes are only defined up to dimension four.
    #[error("rendering supports diagrams of dimension at most 4, got {dimension}")]
    UnsupportedDimension { dimension: usize },
    /// The layout was computed for a diagram of a different dimension.
    #[error("the layout is {layout}-dimensional but the diagram is {diagram}-dimensional")]
    LayoutMismatch { layout: usize, diagram: usize },
    /// A deepest point of the diagram has no coordinates in the layout.
    #[error("the layout has no coordinates for point {path}")]
    MissingCoordinate { path: PointPath },
    /// A label in the diagram does not occur in the signature.
    #[error("generator {id:?} is not declared in the signature")]
    UnknownGenerator { id: String },
    /// SVG output only covers two-dimensional scenes.
    #[error("SVG output needs a 2-dimensional scene, got dimension {dimension}")]
    NotPlanar { dimension: usize },
    /// Scene JSON output only covers three- and four-dimensional scenes.
    #[error("scene JSON covers dimensions 3 and 4, got dimension {dimension}")]
    NotSpatial { dimension: usize },
    #[error(transparent)]
    Explode(#[from] ExplodeError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Display metadata for one generator, copied from the signature.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleEntry {
    pub generator: String,
    pub dimension: usize,
    pub color: Option<String>,
}

/// An event: a deepest point labelled by a top-dimensional generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub generator: String,
    pub coords: Vec<f64>,
}

/// How a polyline reaches its next sample.
///
/// `Smooth` segments render as cubics with vertical tangents at both ends,
/// `Line` segments as straight edges (canvas extensions and flat region caps).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Join {
    Line,
    Smooth,
}

/// A strand traced through codimension-1 points, ordered by outermost height.
///
/// `points` may include a leading or trailing event anchor (the coordinates
/// of the vertex the strand terminates at) or a straight extension to the
/// canvas edge; `core` gives the inclusive index range of the strand's own
/// samples, which is what straightness checks compare.
#[derive(Debug, Clone, PartialEq)]
pub struct Wire {
    pub generator: String,
    pub points: Vec<Vec<f64>>,
    pub joins: Vec<Join>,
    pub core: (usize, usize),
}

/// A codimension-2 cell of the scene.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A filled planar region, as a closed outline. `joins[i]` connects
    /// `points[i]` to `points[(i + 1) % len]`.
    Outline {
        generator: String,
        points: Vec<[f64; 2]>,
        joins: Vec<Join>,
    },
    /// A surface sheet in three dimensions, as a wireframe mesh whose edges
    /// are the cover relations between its points.
    Mesh {
        generator: String,
        points: Vec<Vec<f64>>,
        edges: Vec<(usize, usize)>,
    },
}

/// One keyframe of a four-dimensional scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Outermost height of the level this frame pictures.
    pub time: f64,
    pub scene: Scene,
}

/// Renderable geometry extracted from a solved layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub dimension: usize,
    /// Canvas size per axis, innermost first: width of the axis plus two.
    pub extent: Vec<f64>,
    pub styles: Vec<StyleEntry>,
    pub vertices: Vec<Vertex>,
    pub wires: Vec<Wire>,
    pub cells: Vec<Cell>,
    /// Non-empty exactly for four-dimensional scenes.
    pub frames: Vec<Frame>,
}

/// Classifies the deepest points of a laid-out diagram into vertices, wires
/// and cells.
///
/// Wires are maximal cover-connected runs of codimension-1 points, ordered
/// bottom to top; a strand that terminates at an event gets that event's
/// coordinates appended as an anchor, and a strand ending at a regular level
/// short of the canvas edge (the length-zero outer case) is extended straight
/// to it. Four-dimensional diagrams become one three-dimensional keyframe per
/// outermost point. Dimensions above four are rejected.
pub fn extract_scene(
    d: &Diagram,
    layout: &DiagramLayout,
    sig: &Signature,
) -> Result<Scene, RenderError> {
    let n = d.dimension();
    if n > 4 {
        return Err(RenderError::UnsupportedDimension { dimension: n });
    }
    if layout.dimension != n {
        return Err(RenderError::LayoutMismatch {
            layout: layout.dimension,
            diagram: n,
        });
    }
    let styles = style_table(sig);
    let extent: Vec<f64> = layout.widths.iter().map(|w| w + 2.0).collect();

    if let Diagram::Diagram0 { generator } = d {
        if sig.generator(generator).is_none() {
            return Err(RenderError::UnknownGenerator {
                id: generator.clone(),
            });
        }
        return Ok(Scene {
            dimension: 0,
            extent,
            styles,
            vertices: vec![Vertex {
                generator: generator.clone(),
                coords: Vec::new(),
            }],
            wires: Vec::new(),
            cells: Vec::new(),
            frames: Vec::new(),
        });
    }

    if n == 4 {
        let frames = keyframes(d, layout, sig)?;
        return Ok(Scene {
            dimension: n,
            extent,
            styles,
            vertices: Vec::new(),
            wires: Vec::new(),
            cells: Vec::new(),
            frames,
        });
    }

    flat_scene(d, layout, styles, extent, sig)
}

fn style_table(sig: &Signature) -> Vec<StyleEntry> {
    sig.generators()
        .iter()
        .map(|g| StyleEntry {
            generator: g.id.clone(),
            dimension: g.dimension,
            color: g.color.clone(),
        })
        .collect()
}

/// Slices a four-dimensional layout into one three-dimensional scene per
/// outermost point, keeping the shared coordinates so frames stay aligned.
fn keyframes(
    d: &Diagram,
    layout: &DiagramLayout,
    sig: &Signature,
) -> Result<Vec<Frame>, RenderError> {
    let n = d.dimension();
    let mut frames = Vec::new();
    for u in ZigzagShape::new(d.length()).points() {
        let fiber = d.at(u)?;
        let mut coordinates = BTreeMap::new();
        let mut time = None;
        for (path, coords) in &layout.coordinates {
            if path.0.first() == Some(&u) {
                time = Some(coords[n - 1]);
                coordinates.insert(
                    PointPath(path.0[1..].to_vec()),
                    coords[..n - 1].to_vec(),
                );
            }
        }
        let time = time.ok_or(RenderError::MissingCoordinate {
            path: PointPath(vec![u]),
        })?;
        let sub_layout = DiagramLayout {
            dimension: n - 1,
            widths: layout.widths[..n - 1].to_vec(),
            coordinates,
            fairness: Vec::new(),
        };
        frames.push(Frame {
            time,
            scene: extract_scene(fiber, &sub_layout, sig)?,
        });
    }
    Ok(frames)
}

/// Scene extraction for dimensions one to three, where the whole diagram is
/// drawn in a single picture.
fn flat_scene(
    d: &Diagram,
    layout: &DiagramLayout,
    styles: Vec<StyleEntry>,
    extent: Vec<f64>,
    sig: &Signature,
) -> Result<Scene, RenderError> {
    let n = d.dimension();
    let e = explode(d, n)?;
    let count = e.paths().len();

    let mut gen_of = Vec::with_capacity(count);
    let mut dim_of = Vec::with_capacity(count);
    for fiber in e.fibers() {
        let Diagram::Diagram0 { generator } = fiber else {
            unreachable!("a full-depth explosion has zero-dimensional fibers");
        };
        let g = sig
            .generator(generator)
            .ok_or_else(|| RenderError::UnknownGenerator {
                id: generator.clone(),
            })?;
        gen_of.push(generator.clone());
        dim_of.push(g.dimension);
    }

    let mut coords = Vec::with_capacity(count);
    for path in e.paths() {
        let c = layout
            .coordinates
            .get(path)
            .ok_or_else(|| RenderError::MissingCoordinate { path: path.clone() })?;
        coords.push(c.as_slice());
    }
    let outer_pos: Vec<usize> = e.paths().iter().map(|p| p.0[0].position()).collect();

    // Outgoing cover neighbours; covers always point from the regular-outer
    // side towards the singular-outer side.
    let mut forward: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in e.cover_arrows().keys() {
        forward.entry(a).or_default().push(b);
    }

    let vertices = (0..count)
        .filter(|&i| dim_of[i] == n)
        .map(|i| Vertex {
            generator: gen_of[i].clone(),
            coords: coords[i].to_vec(),
        })
        .collect();

    let wires = trace_wires(n, &e, &gen_of, &dim_of, &coords, &outer_pos, &extent, &forward);

    let cells = if n == 2 {
        trace_outlines(d, &e, layout, &gen_of, &dim_of, &coords, &outer_pos, &extent, &forward)?
    } else {
        trace_meshes(n, &e, &gen_of, &dim_of, &coords)
    };

    Ok(Scene {
        dimension: n,
        extent,
        styles,
        vertices,
        wires,
        cells,
        frames: Vec::new(),
    })
}

/// Connected components of `members` under the cover relations, both
/// endpoints restricted to `members`. Components come out sorted by their
/// smallest element, each internally sorted.
fn components(members: &BTreeSet<usize>, covers: &BTreeMap<(usize, usize), crate::diagram::DiagramMap>) -> Vec<Vec<usize>> {
    let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in covers.keys() {
        if members.contains(&a) && members.contains(&b) {
            adjacency.entry(a).or_default().push(b);
            adjacency.entry(b).or_default().push(a);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in members {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![start];
        comp.insert(start);
        while let Some(x) = stack.pop() {
            if let Some(next) = adjacency.get(&x) {
                for &y in next {
                    if comp.insert(y) {
                        seen.insert(y);
                        stack.push(y);
                    }
                }
            }
        }
        out.push(comp.into_iter().collect());
    }
    out
}

/// The event a strand end maps into at the next level over, if any.
fn event_anchor(
    n: usize,
    end: usize,
    target_pos: usize,
    dim_of: &[usize],
    outer_pos: &[usize],
    forward: &BTreeMap<usize, Vec<usize>>,
) -> Option<usize> {
    forward.get(&end)?.iter().copied().find(|&v| {
        outer_pos[v] == target_pos && dim_of[v] == n
    })
}

#[allow(clippy::too_many_arguments)]
fn trace_wires(
    n: usize,
    e: &ExplodedDiagram,
    gen_of: &[String],
    dim_of: &[usize],
    coords: &[&[f64]],
    outer_pos: &[usize],
    extent: &[f64],
    forward: &BTreeMap<usize, Vec<usize>>,
) -> Vec<Wire> {
    let strand_class: BTreeSet<usize> = (0..e.paths().len())
        .filter(|&i| dim_of[i] + 1 == n)
        .collect();
    let height = extent[n - 1];
    let mut wires = Vec::new();
    for comp in components(&strand_class, e.cover_arrows()) {
        // Element order is path order, which sorts by outermost position
        // first, so the component is already linearised bottom to top.
        let mut points: Vec<Vec<f64>> = comp.iter().map(|&i| coords[i].to_vec()).collect();
        let mut joins = vec![Join::Smooth; points.len().saturating_sub(1)];
        let mut core = (0, points.len() - 1);

        let bottom = comp[0];
        let top = comp[comp.len() - 1];

        if outer_pos[bottom] > 0 {
            if let Some(v) = event_anchor(n, bottom, outer_pos[bottom] - 1, dim_of, outer_pos, forward) {
                points.insert(0, coords[v].to_vec());
                joins.insert(0, Join::Smooth);
                core = (core.0 + 1, core.1 + 1);
            }
        }
        let bottom_y = points[core.0][n - 1];
        if core.0 == 0 && outer_pos[bottom] % 2 == 0 && bottom_y > 0.0 {
            let mut edge = points[0].clone();
            edge[n - 1] = 0.0;
            points.insert(0, edge);
            joins.insert(0, Join::Line);
            core = (core.0 + 1, core.1 + 1);
        }

        if let Some(v) = event_anchor(n, top, outer_pos[top] + 1, dim_of, outer_pos, forward) {
            points.push(coords[v].to_vec());
            joins.push(Join::Smooth);
        } else if outer_pos[top] % 2 == 0 && points[core.1][n - 1] < height {
            let mut edge = points[core.1].clone();
            edge[n - 1] = height;
            points.push(edge);
            joins.push(Join::Line);
        }

        wires.push(Wire {
            generator: gen_of[comp[0]].clone(),
            points,
            joins,
            core,
        });
    }
    wires
}

fn trace_meshes(
    n: usize,
    e: &ExplodedDiagram,
    gen_of: &[String],
    dim_of: &[usize],
    coords: &[&[f64]],
) -> Vec<Cell> {
    let cell_class: BTreeSet<usize> = (0..e.paths().len())
        .filter(|&i| dim_of[i] + 2 == n)
        .collect();
    let mut cells = Vec::new();
    for comp in components(&cell_class, e.cover_arrows()) {
        let local: BTreeMap<usize, usize> =
            comp.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut edges = Vec::new();
        for &(a, b) in e.cover_arrows().keys() {
            if let (Some(&la), Some(&lb)) = (local.get(&a), local.get(&b)) {
                edges.push((la, lb));
            }
        }
        cells.push(Cell::Mesh {
            generator: gen_of[comp[0]].clone(),
            points: comp.iter().map(|&i| coords[i].to_vec()).collect(),
            edges,
        });
    }
    cells
}

/// How a planar region closes off at its lowest or highest level.
enum Cap {
    /// A horizontal edge at this height.
    Flat(f64),
    /// The region converges to a single point (the event its bounding wires
    /// merge into).
    Pinch([f64; 2]),
}

#[allow(clippy::too_many_arguments)]
fn trace_outlines(
    d: &Diagram,
    e: &ExplodedDiagram,
    layout: &DiagramLayout,
    gen_of: &[String],
    dim_of: &[usize],
    coords: &[&[f64]],
    outer_pos: &[usize],
    extent: &[f64],
    forward: &BTreeMap<usize, Vec<usize>>,
) -> Result<Vec<Cell>, RenderError> {
    let outer_top = 2 * d.length();
    let region_class: BTreeSet<usize> = (0..e.paths().len())
        .filter(|&i| dim_of[i] == 0)
        .collect();

    let point_at = |pos: usize| -> PointIndex {
        if pos % 2 == 0 {
            PointIndex::regular(pos / 2)
        } else {
            PointIndex::singular(pos / 2)
        }
    };
    let element_of = |path: &PointPath| -> Option<usize> {
        e.paths().binary_search(path).ok()
    };
    let x_of_sing = |pos: usize, j: usize| -> Result<f64, RenderError> {
        let path = PointPath(vec![point_at(pos), PointIndex::singular(j)]);
        layout
            .coordinates
            .get(&path)
            .map(|c| c[0])
            .ok_or(RenderError::MissingCoordinate { path })
    };

    let mut cells = Vec::new();
    for comp in components(&region_class, e.cover_arrows()) {
        // One inner slot per level; regions are born and die at regular
        // levels, so the level range is a contiguous stretch of the fence.
        let mut levels: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut level_y: BTreeMap<usize, f64> = BTreeMap::new();
        for &el in &comp {
            let pos = outer_pos[el];
            let j = e.paths()[el].0[1].index;
            levels
                .entry(pos)
                .and_modify(|(lo, hi)| {
                    *lo = (*lo).min(j);
                    *hi = (*hi).max(j);
                })
                .or_insert((j, j));
            level_y.insert(pos, coords[el][1]);
        }

        let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
        for (&pos, &(j_lo, j_hi)) in &levels {
            let fiber_len = d.at(point_at(pos))?.length();
            let left = if j_lo == 0 {
                0.0
            } else {
                x_of_sing(pos, j_lo - 1)?
            };
            let right = if j_hi == fiber_len {
                extent[0]
            } else {
                x_of_sing(pos, j_hi)?
            };
            rows.push((pos, level_y[&pos], left, right));
        }

        // A cap pinches when both bounding wires of the extreme level map to
        // the same point one level over; a region against the canvas edge or
        // at the outer boundary closes flat instead.
        let cap = |row: &(usize, f64, f64, f64), target: usize| -> Result<Cap, RenderError> {
            let &(pos, y, _, _) = row;
            let (j_lo, j_hi) = levels[&pos];
            let fiber_len = d.at(point_at(pos))?.length();
            if j_lo == 0 || j_hi == fiber_len {
                return Ok(Cap::Flat(y));
            }
            let bound = |j: usize| -> Result<Option<usize>, RenderError> {
                let path = PointPath(vec![point_at(pos), PointIndex::singular(j)]);
                Ok(element_of(&path).and_then(|el| {
                    forward
                        .get(&el)
                        .and_then(|vs| vs.iter().copied().find(|&v| outer_pos[v] == target))
                }))
            };
            match (bound(j_lo - 1)?, bound(j_hi)?) {
                (Some(l), Some(r)) if l == r => {
                    Ok(Cap::Pinch([coords[l][0], coords[l][1]]))
                }
                _ => Ok(Cap::Flat(y)),
            }
        };

        let first = rows[0];
        let last = rows[rows.len() - 1];
        let bottom = if first.0 == 0 {
            Cap::Flat(0.0)
        } else {
            cap(&first, first.0 - 1)?
        };
        let top = if last.0 == outer_top {
            Cap::Flat(extent[1])
        } else {
            cap(&last, last.0 + 1)?
        };

        // Assemble the closed outline: bottom cap, right side rising, top
        // cap, left side falling. Joins between level samples are smooth so
        // region borders reuse the wire curves; cap edges are straight.
        let mut pts: Vec<[f64; 2]> = Vec::new();
        let mut joins: Vec<Join> = Vec::new();
        match bottom {
            Cap::Flat(y) => {
                pts.push([first.2, y]);
                joins.push(Join::Line);
                pts.push([first.3, y]);
                joins.push(Join::Line);
            }
            Cap::Pinch(p) => {
                pts.push(p);
                joins.push(Join::Smooth);
            }
        }
        for (k, &(_, y, _, right)) in rows.iter().enumerate() {
            pts.push([right, y]);
            let flat_next = k + 1 == rows.len() && matches!(top, Cap::Flat(_));
            joins.push(if flat_next { Join::Line } else { Join::Smooth });
        }
        match top {
            Cap::Flat(y) => {
                pts.push([last.3, y]);
                joins.push(Join::Line);
                pts.push([last.2, y]);
                joins.push(Join::Line);
            }
            Cap::Pinch(p) => {
                pts.push(p);
                joins.push(Join::Smooth);
            }
        }
        for (k, &(_, y, left, _)) in rows.iter().enumerate().rev() {
            pts.push([left, y]);
            let flat_next = k == 0 && matches!(bottom, Cap::Flat(_));
            joins.push(if flat_next { Join::Line } else { Join::Smooth });
        }
        dedupe_outline(&mut pts, &mut joins);

        cells.push(Cell::Outline {
            generator: gen_of[comp[0]].clone(),
            points: pts,
            joins,
        });
    }
    Ok(cells)
}

/// Removes zero-length outline segments, including across the wrap-around.
fn dedupe_outline(pts: &mut Vec<[f64; 2]>, joins: &mut Vec<Join>) {
    let mut k = 1;
    while k < pts.len() {
        if pts[k] == pts[k - 1] {
            pts.remove(k);
            let j = joins.remove(k);
            joins[k - 1] = j;
        } else {
            k += 1;
        }
    }
    while pts.len() > 1 && *pts.last().unwrap() == pts[0] {
        pts.pop();
        joins.pop();
    }
}

const PALETTE: [&str; 8] = [
    "#3b7dd8", "#d8613b", "#4caf7d", "#8e5bd8", "#d8b13b", "#3bbcd8", "#d83b6f", "#6e6e6e",
];

fn style_color(styles: &[StyleEntry], generator: &str) -> String {
    for (k, s) in styles.iter().enumerate() {
        if s.generator == generator {
            return s
                .color
                .clone()
                .unwrap_or_else(|| PALETTE[k % PALETTE.len()].to_string());
        }
    }
    PALETTE[PALETTE.len() - 1].to_string()
}

/// Renders a two-dimensional scene as a standalone SVG document.
///
/// Regions are filled paths drawn first, wires are cubic curves with vertical
/// tangents at their sample heights drawn over them, vertices are filled
/// circles on top. One layout unit maps to `scale` pixels and the vertical
/// axis is flipped so height increases upwards. Output is deterministic:
/// element order follows scene order and all numbers are fixed six-decimal.
pub fn to_svg(scene: &Scene, scale: f64) -> Result<String, RenderError> {
    if scene.dimension != 2 {
        return Err(RenderError::NotPlanar {
            dimension: scene.dimension,
        });
    }
    let width = scene.extent[0] * scale;
    let height = scene.extent[1] * scale;
    let place = |p: &[f64]| -> (f64, f64) { (p[0] * scale, (scene.extent[1] - p[1]) * scale) };

    let mut out = String::new();
    out.push_str(&alloc::format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = fixed6(width),
        h = fixed6(height),
    ));

    out.push_str("  <g id=\"regions\">\n");
    for (k, cell) in scene.cells.iter().enumerate() {
        let Cell::Outline {
            generator,
            points,
            joins,
        } = cell
        else {
            continue;
        };
        let mut data = String::new();
        if !points.is_empty() {
            let (x0, y0) = place(&points[0]);
            data.push_str(&alloc::format!("M {},{}", fixed6(x0), fixed6(y0)));
            for i in 0..points.len() {
                let from = place(&points[i]);
                let to = place(&points[(i + 1) % points.len()]);
                push_segment(&mut data, joins[i], from, to);
            }
            data.push_str(" Z");
        }
        out.push_str(&alloc::format!(
            "    <path id=\"region-{k}\" data-generator=\"{g}\" fill=\"{c}\" fill-opacity=\"0.25\" stroke=\"none\" d=\"{data}\"/>\n",
            g = xml_escape(generator),
            c = xml_escape(&style_color(&scene.styles, generator)),
        ));
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"wires\">\n");
    for (k, wire) in scene.wires.iter().enumerate() {
        let mut data = String::new();
        if !wire.points.is_empty() {
            let (x0, y0) = place(&wire.points[0]);
            data.push_str(&alloc::format!("M {},{}", fixed6(x0), fixed6(y0)));
            for i in 0..wire.joins.len() {
                let from = place(&wire.points[i]);
                let to = place(&wire.points[i + 1]);
                push_segment(&mut data, wire.joins[i], from, to);
            }
        }
        out.push_str(&alloc::format!(
            "    <path id=\"wire-{k}\" data-generator=\"{g}\" fill=\"none\" stroke=\"{c}\" stroke-width=\"{sw}\" stroke-linecap=\"round\" d=\"{data}\"/>\n",
            g = xml_escape(&wire.generator),
            c = xml_escape(&style_color(&scene.styles, &wire.generator)),
            sw = fixed6(scale * 0.06),
        ));
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"vertices\">\n");
    for (k, v) in scene.vertices.iter().enumerate() {
        let (cx, cy) = place(&v.coords);
        out.push_str(&alloc::format!(
            "    <circle id=\"vertex-{k}\" data-generator=\"{g}\" cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"{c}\"/>\n",
            g = xml_escape(&v.generator),
            cx = fixed6(cx),
            cy = fixed6(cy),
            r = fixed6(scale * 0.12),
            c = xml_escape(&style_color(&scene.styles, &v.generator)),
        ));
    }
    out.push_str("  </g>\n</svg>\n");
    Ok(out)
}

fn push_segment(data: &mut String, join: Join, from: (f64, f64), to: (f64, f64)) {
    match join {
        Join::Line => {
            data.push_str(&alloc::format!(" L {},{}", fixed6(to.0), fixed6(to.1)));
        }
        Join::Smooth => {
            let mid = (from.1 + to.1) / 2.0;
            data.push_str(&alloc::format!(
                " C {},{} {},{} {},{}",
                fixed6(from.0),
                fixed6(mid),
                fixed6(to.0),
                fixed6(mid),
                fixed6(to.0),
                fixed6(to.1),
            ));
        }
    }
}

/// Serialises a three- or four-dimensional scene as compact JSON.
///
/// Coordinates are multiplied by `scale`, matching the SVG emitter's unit
/// convention, and printed fixed six-decimal. A four-dimensional scene
/// carries its keyframes under `"frames"`, each with the outermost height as
/// its `"time"` and a three-dimensional scene object.
pub fn to_scene_json(scene: &Scene, scale: f64) -> Result<String, RenderError> {
    if scene.dimension != 3 && scene.dimension != 4 {
        return Err(RenderError::NotSpatial {
            dimension: scene.dimension,
        });
    }
    Ok(scene_object(scene, scale))
}

fn number_list(values: &[f64], scale: f64) -> String {
    let parts: Vec<String> = values.iter().map(|v| fixed6(v * scale)).collect();
    alloc::format!("[{}]", parts.join(","))
}

fn point_list(points: &[Vec<f64>], scale: f64) -> String {
    let parts: Vec<String> = points.iter().map(|p| number_list(p, scale)).collect();
    alloc::format!("[{}]", parts.join(","))
}

fn scene_object(scene: &Scene, scale: f64) -> String {
    let mut out = String::new();
    out.push_str(&alloc::format!("{{\"dimension\":{}", scene.dimension));
    out.push_str(&alloc::format!(",\"extent\":{}", number_list(&scene.extent, scale)));

    let styles: Vec<String> = scene
        .styles
        .iter()
        .map(|s| {
            let color = match &s.color {
                Some(c) => alloc::format!("\"{}\"", json_escape(c)),
                None => "null".to_string(),
            };
            alloc::format!(
                "{{\"generator\":\"{}\",\"dimension\":{},\"color\":{}}}",
                json_escape(&s.generator),
                s.dimension,
                color
            )
        })
        .collect();
    out.push_str(&alloc::format!(",\"styles\":[{}]", styles.join(",")));

    let vertices: Vec<String> = scene
        .vertices
        .iter()
        .map(|v| {
            alloc::format!(
                "{{\"generator\":\"{}\",\"coords\":{}}}",
                json_escape(&v.generator),
                number_list(&v.coords, scale)
            )
        })
        .collect();
    out.push_str(&alloc::format!(",\"vertices\":[{}]", vertices.join(",")));

    let wires: Vec<String> = scene
        .wires
        .iter()
        .map(|w| {
            alloc::format!(
                "{{\"generator\":\"{}\",\"points\":{}}}",
                json_escape(&w.generator),
                point_list(&w.points, scale)
            )
        })
        .collect();
    out.push_str(&alloc::format!(",\"wires\":[{}]", wires.join(",")));

    let surfaces: Vec<String> = scene
        .cells
        .iter()
        .filter_map(|cell| {
            let Cell::Mesh {
                generator,
                points,
                edges,
            } = cell
            else {
                return None;
            };
            let edge_list: Vec<String> = edges
                .iter()
                .map(|&(a, b)| alloc::format!("[{a},{b}]"))
                .collect();
            Some(alloc::format!(
                "{{\"generator\":\"{}\",\"points\":{},\"edges\":[{}]}}",
                json_escape(generator),
                point_list(points, scale),
                edge_list.join(",")
            ))
        })
        .collect();
    out.push_str(&alloc::format!(",\"surfaces\":[{}]", surfaces.join(",")));

    if scene.dimension == 4 {
        let frames: Vec<String> = scene
            .frames
            .iter()
            .map(|f| {
                alloc::format!(
                    "{{\"time\":{},\"scene\":{}}}",
                    fixed6(f.time * scale),
                    scene_object(&f.scene, scale)
                )
            })
            .collect();
        out.push_str(&alloc::format!(",\"frames\":[{}]", frames.join(",")));
    }
    out.push('}');
    out
}

//! JSON export of layouts and of the injectified level diagram.

use zigzag_core::diagram::{explode, Diagram};
use zigzag_core::layout::{singular_poset_diagram, DiagramLayout};
use zigzag_core::poset::injectify;
use zigzag_core::textfmt::fixed6;

use crate::error::CliError;

fn float_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| fixed6(v)).collect();
    format!("[{}]", parts.join(", "))
}

/// Serialises a layout: the common width per axis, the summed fairness
/// defect, and one entry per deepest point. Paths read outermost position
/// first while coordinate tuples read innermost axis first, matching the
/// in-memory convention.
pub fn layout_json(layout: &DiagramLayout) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"dimension\": {},\n", layout.dimension));
    out.push_str(&format!(
        "  \"width_per_axis\": {},\n",
        float_list(&layout.widths)
    ));
    out.push_str(&format!(
        "  \"total_defect\": {},\n",
        fixed6(layout.total_defect())
    ));
    out.push_str("  \"points\": [\n");
    let count = layout.coordinates.len();
    for (k, (path, coords)) in layout.coordinates.iter().enumerate() {
        let steps: Vec<String> = path.0.iter().map(|p| format!("\"{p}\"")).collect();
        out.push_str(&format!(
            "    {{\"path\": [{}], \"coords\": {}}}{}\n",
            steps.join(", "),
            float_list(coords),
            if k + 1 < count { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Explodes the diagram one level, forgets the fibers down to their singular
/// chains, makes the covering maps injective, and prints the result: per
/// index, the rebuilt element list with origin tags, the strict order pairs
/// among those elements, and the retraction back onto the original chain.
pub fn inject_json(d: &Diagram) -> Result<String, CliError> {
    let n = d.dimension();
    if n == 0 {
        return Err(CliError::Unsupported {
            message: String::from(
                "a zero-dimensional diagram has no level structure to make injective",
            ),
        });
    }
    // One-dimensional diagrams only support the trivial explosion; deeper
    // ones show the first level diagram, the one the outer height pass uses.
    let depth = if n == 1 { 0 } else { 1 };
    let e = explode(d, depth).map_err(|err| CliError::Internal {
        message: format!("explosion failed on a validated diagram: {err}"),
    })?;
    let p = singular_poset_diagram(&e)?;
    let inj = injectify(&p).map_err(|err| CliError::Internal {
        message: format!("injectification failed on a validated diagram: {err}"),
    })?;

    let hat = inj.hat();
    let mut out = String::from("{\n  \"indices\": [\n");
    let count = hat.index().size();
    for i in 0..count {
        let object = hat.object(i);
        let elements: Vec<String> = inj
            .origin(i)
            .iter()
            .map(|(j, e)| format!("[{j}, {e}]"))
            .collect();
        let mut relations = Vec::new();
        for a in 0..object.size() {
            for b in 0..object.size() {
                if object.lt(a, b) {
                    relations.push(format!("[{a}, {b}]"));
                }
            }
        }
        let epsilon: Vec<String> = inj
            .epsilon(i)
            .values()
            .iter()
            .map(|v| v.to_string())
            .collect();
        out.push_str(&format!(
            "    {{\"index\": {i}, \"elements\": [{}], \"relations\": [{}], \"epsilon\": [{}]}}{}\n",
            elements.join(", "),
            relations.join(", "),
            epsilon.join(", "),
            if i + 1 < count { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    Ok(out)
}

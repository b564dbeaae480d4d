//! The diagram file format: JSON with a fixed shape.
//!
//! ```text
//! {"signature": {"generators": [{"id", "dimension", "color"?}...],
//!                "arrows": [["src","tgt"]...]},
//!  "diagram": <D>}
//! <D> ::= {"generator": "id"}
//!       | {"regular": [<D>...], "singular": [<D>...],
//!          "forward": [<M>...], "backward": [<M>...]}
//! <M> ::= {"source": "id", "target": "id"}
//!       | {"singular_map": [naturals], "singular_slices": [<M>...],
//!          "regular_slices": [<M>...]}
//! ```
//!
//! Parsing enforces the structural counts the encoding needs to even type
//! its components (one cospan per singular level, `regular` one longer than
//! `singular`, slice lists pairable with their levels, weakly increasing
//! singular maps); everything semantic, like whether a slice is an arrow of
//! the signature or whether squares commute, is left to `validate` so it can
//! be reported with a point path. The canonical writer emits object keys in
//! exactly the order shown with no insignificant whitespace; the pretty
//! writer emits the same keys two-space indented.

use serde_json::Value;
use zigzag_core::diagram::{Diagram, DiagramMap, Generator, Signature};
use zigzag_core::simplicial::{regularize, MonotoneMap};
use zigzag_core::textfmt::json_escape;

use crate::error::CliError;

fn shape(context: &str, message: impl Into<String>) -> CliError {
    CliError::Parse {
        message: format!("{context}: {}", message.into()),
    }
}

fn as_object<'v>(
    v: &'v Value,
    context: &str,
    allowed: &[&str],
) -> Result<&'v serde_json::Map<String, Value>, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| shape(context, "expected an object"))?;
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(shape(context, format!("unknown key {key:?}")));
        }
    }
    Ok(obj)
}

fn get<'v>(
    obj: &'v serde_json::Map<String, Value>,
    context: &str,
    key: &str,
) -> Result<&'v Value, CliError> {
    obj.get(key)
        .ok_or_else(|| shape(context, format!("missing key {key:?}")))
}

fn as_array<'v>(v: &'v Value, context: &str) -> Result<&'v Vec<Value>, CliError> {
    v.as_array()
        .ok_or_else(|| shape(context, "expected an array"))
}

fn as_string(v: &Value, context: &str) -> Result<String, CliError> {
    Ok(v.as_str()
        .ok_or_else(|| shape(context, "expected a string"))?
        .to_string())
}

fn as_natural(v: &Value, context: &str) -> Result<usize, CliError> {
    let n = v
        .as_u64()
        .ok_or_else(|| shape(context, "expected a natural number"))?;
    usize::try_from(n).map_err(|_| shape(context, "number out of range"))
}

/// Parses a diagram file into its signature and diagram.
///
/// JSON syntax errors and structural-shape violations are parse errors;
/// a well-shaped but inconsistent signature is reported as a validation
/// problem so it exits with the validation code.
pub fn parse_diagram_file(text: &str) -> Result<(Signature, Diagram), CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        message: format!("invalid JSON: {e}"),
    })?;
    let obj = as_object(&root, "top level", &["signature", "diagram"])?;
    let signature = parse_signature(get(obj, "top level", "signature")?)?;
    let diagram = parse_diagram(get(obj, "top level", "diagram")?, "diagram")?;
    Ok((signature, diagram))
}

fn parse_signature(v: &Value) -> Result<Signature, CliError> {
    let obj = as_object(v, "signature", &["generators", "arrows"])?;
    let mut generators = Vec::new();
    for (k, g) in as_array(get(obj, "signature", "generators")?, "signature.generators")?
        .iter()
        .enumerate()
    {
        let context = format!("signature.generators[{k}]");
        let gobj = as_object(g, &context, &["id", "dimension", "color"])?;
        let id = as_string(get(gobj, &context, "id")?, &context)?;
        let dimension = as_natural(get(gobj, &context, "dimension")?, &context)?;
        let mut generator = Generator::new(&id, dimension);
        if let Some(color) = gobj.get("color") {
            generator = generator.with_color(&as_string(color, &context)?);
        }
        generators.push(generator);
    }
    let mut arrows = Vec::new();
    for (k, a) in as_array(get(obj, "signature", "arrows")?, "signature.arrows")?
        .iter()
        .enumerate()
    {
        let context = format!("signature.arrows[{k}]");
        let pair = as_array(a, &context)?;
        if pair.len() != 2 {
            return Err(shape(&context, "expected [source, target]"));
        }
        arrows.push((
            as_string(&pair[0], &context)?,
            as_string(&pair[1], &context)?,
        ));
    }
    Signature::new(generators, arrows).map_err(|e| CliError::Validation {
        message: format!("signature: {e}"),
        failures: Vec::new(),
    })
}

fn parse_diagram(v: &Value, context: &str) -> Result<Diagram, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| shape(context, "expected an object"))?;
    if obj.contains_key("generator") {
        let obj = as_object(v, context, &["generator"])?;
        let id = as_string(get(obj, context, "generator")?, context)?;
        return Ok(Diagram::generator(&id));
    }
    let obj = as_object(v, context, &["regular", "singular", "forward", "backward"])?;
    let mut regular = Vec::new();
    for (k, r) in as_array(get(obj, context, "regular")?, context)?
        .iter()
        .enumerate()
    {
        regular.push(parse_diagram(r, &format!("{context}.regular[{k}]"))?);
    }
    let mut singular = Vec::new();
    for (k, s) in as_array(get(obj, context, "singular")?, context)?
        .iter()
        .enumerate()
    {
        singular.push(parse_diagram(s, &format!("{context}.singular[{k}]"))?);
    }
    if regular.len() != singular.len() + 1 {
        return Err(shape(
            context,
            format!(
                "{} regular levels cannot interleave {} singular levels",
                regular.len(),
                singular.len()
            ),
        ));
    }
    let forward_raw = as_array(get(obj, context, "forward")?, context)?;
    let backward_raw = as_array(get(obj, context, "backward")?, context)?;
    if forward_raw.len() != singular.len() || backward_raw.len() != singular.len() {
        return Err(shape(context, "one forward and one backward map per singular level"));
    }
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for i in 0..singular.len() {
        forward.push(parse_map(
            &forward_raw[i],
            &regular[i],
            &singular[i],
            &format!("{context}.forward[{i}]"),
        )?);
        backward.push(parse_map(
            &backward_raw[i],
            &regular[i + 1],
            &singular[i],
            &format!("{context}.backward[{i}]"),
        )?);
    }
    Ok(Diagram::DiagramN {
        regular,
        singular,
        forward,
        backward,
    })
}

/// Parses a map between `source` and `target`, which are needed to size the
/// singular maps and pair each slice with its endpoints.
fn parse_map(
    v: &Value,
    source: &Diagram,
    target: &Diagram,
    context: &str,
) -> Result<DiagramMap, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| shape(context, "expected an object"))?;
    if obj.contains_key("source") || obj.contains_key("target") {
        let obj = as_object(v, context, &["source", "target"])?;
        return Ok(DiagramMap::Map0 {
            source: as_string(get(obj, context, "source")?, context)?,
            target: as_string(get(obj, context, "target")?, context)?,
        });
    }
    let obj = as_object(
        v,
        context,
        &["singular_map", "singular_slices", "regular_slices"],
    )?;
    let (Diagram::DiagramN {
        singular: source_singular,
        regular: source_regular,
        ..
    }, Diagram::DiagramN {
        singular: target_singular,
        regular: target_regular,
        ..
    }) = (source, target)
    else {
        return Err(shape(
            context,
            "a leveled map needs leveled endpoints; use {\"source\", \"target\"} at dimension zero",
        ));
    };
    let mut values = Vec::new();
    for (k, n) in as_array(get(obj, context, "singular_map")?, context)?
        .iter()
        .enumerate()
    {
        values.push(as_natural(n, &format!("{context}.singular_map[{k}]"))?);
    }
    if values.len() != source_singular.len() {
        return Err(shape(context, "singular_map length must match the source"));
    }
    let singular_map = MonotoneMap::new(values, target_singular.len())
        .map_err(|e| shape(context, format!("singular_map: {e}")))?;

    let ss_raw = as_array(get(obj, context, "singular_slices")?, context)?;
    if ss_raw.len() != source_singular.len() {
        return Err(shape(context, "one singular slice per source singular level"));
    }
    let mut singular_slices = Vec::new();
    for (a, s) in ss_raw.iter().enumerate() {
        let image = singular_map.values()[a];
        singular_slices.push(parse_map(
            s,
            &source_singular[a],
            &target_singular[image],
            &format!("{context}.singular_slices[{a}]"),
        )?);
    }

    let rs_raw = as_array(get(obj, context, "regular_slices")?, context)?;
    if rs_raw.len() != target_regular.len() {
        return Err(shape(context, "one regular slice per target regular level"));
    }
    let regular_map = regularize(&singular_map);
    let mut regular_slices = Vec::new();
    for (b, r) in rs_raw.iter().enumerate() {
        let origin = regular_map.values()[b];
        regular_slices.push(parse_map(
            r,
            &source_regular[origin],
            &target_regular[b],
            &format!("{context}.regular_slices[{b}]"),
        )?);
    }

    Ok(DiagramMap::MapN {
        singular_map,
        singular_slices,
        regular_slices,
    })
}

/// Writer over a growing string with optional pretty indentation.
struct Emitter {
    out: String,
    pretty: bool,
    depth: usize,
}

impl Emitter {
    fn new(pretty: bool) -> Self {
        Emitter {
            out: String::new(),
            pretty,
            depth: 0,
        }
    }

    fn open(&mut self, bracket: char) {
        self.out.push(bracket);
        self.depth += 1;
    }

    fn close(&mut self, bracket: char) {
        self.depth -= 1;
        self.newline();
        self.out.push(bracket);
    }

    fn newline(&mut self) {
        if self.pretty {
            self.out.push('\n');
            for _ in 0..self.depth {
                self.out.push_str("  ");
            }
        }
    }

    fn key(&mut self, first: bool, name: &str) {
        if !first {
            self.out.push(',');
        }
        self.newline();
        self.out.push('"');
        self.out.push_str(name);
        self.out.push_str(if self.pretty { "\": " } else { "\":" });
    }

    fn item(&mut self, first: bool) {
        if !first {
            self.out.push(',');
        }
        self.newline();
    }
}

/// Serialises a signature and diagram in the file format; `canonical` emits
/// the byte-stable compact form, otherwise a pretty-printed equivalent.
pub fn write_diagram_file(sig: &Signature, d: &Diagram, canonical: bool) -> String {
    let mut e = Emitter::new(!canonical);
    e.open('{');
    e.key(true, "signature");
    write_signature(&mut e, sig);
    e.key(false, "diagram");
    write_diagram(&mut e, d);
    e.close('}');
    e.out.push('\n');
    e.out
}

fn write_signature(e: &mut Emitter, sig: &Signature) {
    e.open('{');
    e.key(true, "generators");
    e.open('[');
    for (k, g) in sig.generators().iter().enumerate() {
        e.item(k == 0);
        let mut entry = format!(
            "{{\"id\":\"{}\",\"dimension\":{}",
            json_escape(&g.id),
            g.dimension
        );
        if let Some(color) = &g.color {
            entry.push_str(&format!(",\"color\":\"{}\"", json_escape(color)));
        }
        entry.push('}');
        e.out.push_str(&entry);
    }
    e.close(']');
    e.key(false, "arrows");
    e.open('[');
    for (k, (src, tgt)) in sig.arrows().iter().enumerate() {
        e.item(k == 0);
        e.out.push_str(&format!(
            "[\"{}\",\"{}\"]",
            json_escape(src),
            json_escape(tgt)
        ));
    }
    e.close(']');
    e.close('}');
}

fn write_diagram(e: &mut Emitter, d: &Diagram) {
    match d {
        Diagram::Diagram0 { generator } => {
            e.out
                .push_str(&format!("{{\"generator\":\"{}\"}}", json_escape(generator)));
        }
        Diagram::DiagramN {
            regular,
            singular,
            forward,
            backward,
        } => {
            e.open('{');
            e.key(true, "regular");
            e.open('[');
            for (k, r) in regular.iter().enumerate() {
                e.item(k == 0);
                write_diagram(e, r);
            }
            e.close(']');
            e.key(false, "singular");
            e.open('[');
            for (k, s) in singular.iter().enumerate() {
                e.item(k == 0);
                write_diagram(e, s);
            }
            e.close(']');
            e.key(false, "forward");
            e.open('[');
            for (k, f) in forward.iter().enumerate() {
                e.item(k == 0);
                write_map(e, f);
            }
            e.close(']');
            e.key(false, "backward");
            e.open('[');
            for (k, b) in backward.iter().enumerate() {
                e.item(k == 0);
                write_map(e, b);
            }
            e.close(']');
            e.close('}');
        }
    }
}

fn write_map(e: &mut Emitter, m: &DiagramMap) {
    match m {
        DiagramMap::Map0 { source, target } => {
            e.out.push_str(&format!(
                "{{\"source\":\"{}\",\"target\":\"{}\"}}",
                json_escape(source),
                json_escape(target)
            ));
        }
        DiagramMap::MapN {
            singular_map,
            singular_slices,
            regular_slices,
        } => {
            e.open('{');
            e.key(true, "singular_map");
            let values: Vec<String> = singular_map
                .values()
                .iter()
                .map(|v| v.to_string())
                .collect();
            e.out.push_str(&format!("[{}]", values.join(",")));
            e.key(false, "singular_slices");
            e.open('[');
            for (k, s) in singular_slices.iter().enumerate() {
                e.item(k == 0);
                write_map(e, s);
            }
            e.close(']');
            e.key(false, "regular_slices");
            e.open('[');
            for (k, r) in regular_slices.iter().enumerate() {
                e.item(k == 0);
                write_map(e, r);
            }
            e.close(']');
            e.close('}');
        }
    }
}

//! Concrete n-diagrams over a signature.
//!
//! A diagram is an iterated zigzag: dimension 0 is a bare generator,
//! dimension n+1 alternates regular and singular subdiagrams of dimension
//! n joined by cospans of diagram maps. This module validates that data
//! against a signature, enumerates point paths, and explodes a diagram
//! into a poset-shaped functor whose fibers are the subdiagrams at each
//! point.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::poset::{Poset, PosetError};
use crate::simplicial::{regularize, MonotoneMap, SimplicialError};
use crate::zigzag::{admits, condition_instances, ConditionInstance, PointIndex, ZigzagShape};

pub mod builtins;

pub use builtins::{builtin_example, builtin_examples, identity_extension, BuiltinExample};

/// A named cell of the signature together with its dimension and optional
/// display colour used by renderers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub dimension: usize,
    pub color: Option<String>,
}

impl Generator {
    pub fn new(id: &str, dimension: usize) -> Self {
        Generator {
            id: String::from(id),
            dimension,
            color: None,
        }
    }

    pub fn with_color(mut self, color: &str) -> Self {
        self.color = Some(String::from(color));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("generator {id} is declared twice")]
    DuplicateGenerator { id: String },
    #[error("arrow endpoint {id} is not a declared generator")]
    UnknownEndpoint { id: String },
    #[error("arrow {from} -> {to} does not increase dimension")]
    DimensionOrder { from: String, to: String },
    #[error("arrow {from} -> {to} is declared twice")]
    DuplicateArrow { from: String, to: String },
    #[error("arrows {a} -> {b} and {b} -> {c} lack the composite {a} -> {c}")]
    NotClosed { a: String, b: String, c: String },
}

/// A finite direct category presented by generators and a thin arrow set:
/// dimensions strictly increase along arrows, there is at most one arrow
/// per ordered pair, and the arrow set is closed under composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    generators: Vec<Generator>,
    arrows: Vec<(String, String)>,
}

impl Signature {
    pub fn new(
        generators: Vec<Generator>,
        arrows: Vec<(String, String)>,
    ) -> Result<Self, SignatureError> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|h| h.id == g.id) {
                return Err(SignatureError::DuplicateGenerator { id: g.id.clone() });
            }
        }
        let dimension_of = |id: &str| {
            generators
                .iter()
                .find(|g| g.id == id)
                .map(|g| g.dimension)
        };
        for (i, (s, t)) in arrows.iter().enumerate() {
            let ds = dimension_of(s).ok_or_else(|| SignatureError::UnknownEndpoint {
                id: s.clone(),
            })?;
            let dt = dimension_of(t).ok_or_else(|| SignatureError::UnknownEndpoint {
                id: t.clone(),
            })?;
            if ds >= dt {
                return Err(SignatureError::DimensionOrder {
                    from: s.clone(),
                    to: t.clone(),
                });
            }
            if arrows[..i].contains(&(s.clone(), t.clone())) {
                return Err(SignatureError::DuplicateArrow {
                    from: s.clone(),
                    to: t.clone(),
                });
            }
        }
        for (a, b) in &arrows {
            for (b2, c) in &arrows {
                if b == b2 && !arrows.contains(&(a.clone(), c.clone())) {
                    return Err(SignatureError::NotClosed {
                        a: a.clone(),
                        b: b.clone(),
                        c: c.clone(),
                    });
                }
            }
        }
        Ok(Signature { generators, arrows })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn arrows(&self) -> &[(String, String)] {
        &self.arrows
    }

    pub fn generator(&self, id: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.id == id)
    }

    /// Whether a `Map0` with these endpoints is meaningful: either an
    /// implicit identity or a declared arrow.
    pub fn allows_map(&self, source: &str, target: &str) -> bool {
        source == target
            || self
                .arrows
                .iter()
                .any(|(s, t)| s == source && t == target)
    }

    pub fn max_dimension(&self) -> usize {
        self.generators.iter().map(|g| g.dimension).max().unwrap_or(0)
    }
}

/// A combinatorially encoded string diagram: a generator, or a zigzag of
/// lower-dimensional diagrams joined by cospans of maps. `forward[i]`
/// maps `regular[i]` into `singular[i]` and `backward[i]` maps
/// `regular[i+1]` into the same `singular[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diagram {
    Diagram0 {
        generator: String,
    },
    DiagramN {
        regular: Vec<Diagram>,
        singular: Vec<Diagram>,
        forward: Vec<DiagramMap>,
        backward: Vec<DiagramMap>,
    },
}

/// A map of diagrams of equal dimension: identity-or-arrow at dimension
/// zero, otherwise a monotone singular map with one slice per source
/// singular level and per target regular level. The regular reindexing is
/// never stored; it is recovered from the singular map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagramMap {
    Map0 {
        source: String,
        target: String,
    },
    MapN {
        singular_map: MonotoneMap,
        singular_slices: Vec<DiagramMap>,
        regular_slices: Vec<DiagramMap>,
    },
}

impl Diagram {
    pub fn generator(id: &str) -> Self {
        Diagram::Diagram0 {
            generator: String::from(id),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Diagram::Diagram0 { .. } => 0,
            Diagram::DiagramN { regular, .. } => match regular.first() {
                Some(first) => 1 + first.dimension(),
                None => 1,
            },
        }
    }

    /// Number of singular levels; zero for generators.
    pub fn length(&self) -> usize {
        match self {
            Diagram::Diagram0 { .. } => 0,
            Diagram::DiagramN { singular, .. } => singular.len(),
        }
    }

    /// The subdiagram at one point of the outer zigzag.
    pub fn at(&self, point: PointIndex) -> Result<&Diagram, DiagramError> {
        match self {
            Diagram::Diagram0 { .. } => Err(DiagramError::NotAZigzag),
            Diagram::DiagramN {
                regular, singular, ..
            } => {
                if !point.is_valid_for(singular.len()) {
                    return Err(DiagramError::InvalidPoint {
                        point,
                        length: singular.len(),
                    });
                }
                Ok(match point.kind {
                    crate::zigzag::PointKind::Regular => &regular[point.index],
                    crate::zigzag::PointKind::Singular => &singular[point.index],
                })
            }
        }
    }

    /// The subdiagram addressed by a path of points, one per dimension.
    pub fn subdiagram(&self, path: &PointPath) -> Result<&Diagram, DiagramError> {
        let mut here = self;
        for &p in &path.0 {
            here = here.at(p)?;
        }
        Ok(here)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("a dimension-zero diagram has no zigzag structure")]
    NotAZigzag,
    #[error("point {point} is not valid for length {length}")]
    InvalidPoint { point: PointIndex, length: usize },
    #[error("requested depth {requested} exceeds the diagram dimension {dimension}")]
    DimensionExceeded { requested: usize, dimension: usize },
    #[error("cannot compose maps of different depths")]
    ComposeKindMismatch,
    #[error("cannot compose: first map targets {first_target}, second starts at {second_source}")]
    ComposeEndpointMismatch {
        first_target: String,
        second_source: String,
    },
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

impl DiagramMap {
    /// The identity map on a diagram, all slices identities.
    pub fn identity(d: &Diagram) -> DiagramMap {
        match d {
            Diagram::Diagram0 { generator } => DiagramMap::Map0 {
                source: generator.clone(),
                target: generator.clone(),
            },
            Diagram::DiagramN {
                regular, singular, ..
            } => DiagramMap::MapN {
                singular_map: MonotoneMap::identity(singular.len()),
                singular_slices: singular.iter().map(DiagramMap::identity).collect(),
                regular_slices: regular.iter().map(DiagramMap::identity).collect(),
            },
        }
    }

    /// Diagrammatic composition: `self` first, then `g`. The composite
    /// singular slice at `i` routes through `g`'s slice at the image
    /// level; the composite regular slice at `j` starts from `self`'s
    /// slice at the level `g` pulls `j` back to.
    pub fn compose(&self, g: &DiagramMap) -> Result<DiagramMap, DiagramError> {
        match (self, g) {
            (
                DiagramMap::Map0 { source, target },
                DiagramMap::Map0 {
                    source: mid,
                    target: end,
                },
            ) => {
                if target != mid {
                    return Err(DiagramError::ComposeEndpointMismatch {
                        first_target: target.clone(),
                        second_source: mid.clone(),
                    });
                }
                Ok(DiagramMap::Map0 {
                    source: source.clone(),
                    target: end.clone(),
                })
            }
            (
                DiagramMap::MapN {
                    singular_map: f_s,
                    singular_slices: f_ss,
                    regular_slices: f_rs,
                },
                DiagramMap::MapN {
                    singular_map: g_s,
                    singular_slices: g_ss,
                    regular_slices: g_rs,
                },
            ) => {
                let singular_map = f_s.compose(g_s)?;
                let g_r = regularize(g_s);
                let mut singular_slices = Vec::with_capacity(f_ss.len());
                for (i, slice) in f_ss.iter().enumerate() {
                    singular_slices.push(slice.compose(&g_ss[f_s.apply(i)])?);
                }
                let mut regular_slices = Vec::with_capacity(g_rs.len());
                for (j, slice) in g_rs.iter().enumerate() {
                    regular_slices.push(f_rs[g_r.apply(j)].compose(slice)?);
                }
                Ok(DiagramMap::MapN {
                    singular_map,
                    singular_slices,
                    regular_slices,
                })
            }
            _ => Err(DiagramError::ComposeKindMismatch),
        }
    }
}

/// An address of a point of an iterated zigzag: entry `t` picks a point
/// of the diagram addressed by the first `t` entries. Paths order by the
/// fence positions of their entries, which matches enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PointPath(pub Vec<PointIndex>);

impl PointPath {
    pub fn empty() -> Self {
        PointPath(Vec::new())
    }

    pub fn child(&self, p: PointIndex) -> Self {
        let mut entries = self.0.clone();
        entries.push(p);
        PointPath(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The path with the innermost entry removed.
    pub fn parent(&self) -> Self {
        let mut entries = self.0.clone();
        entries.pop();
        PointPath(entries)
    }
}

impl core::fmt::Display for PointPath {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Enumerates the depth-`k` point paths of a diagram in fence-lexicographic
/// order.
pub fn points(d: &Diagram, k: usize) -> Result<Vec<PointPath>, DiagramError> {
    if k > d.dimension() {
        return Err(DiagramError::DimensionExceeded {
            requested: k,
            dimension: d.dimension(),
        });
    }
    let mut out = Vec::new();
    collect_points(d, k, &mut Vec::new(), &mut out);
    Ok(out)
}

fn collect_points(d: &Diagram, k: usize, prefix: &mut Vec<PointIndex>, out: &mut Vec<PointPath>) {
    if k == 0 {
        out.push(PointPath(prefix.clone()));
        return;
    }
    for p in ZigzagShape::new(d.length()).points() {
        let sub = d.at(p).expect("point enumerated from the diagram's own length");
        prefix.push(p);
        collect_points(sub, k - 1, prefix, out);
        prefix.pop();
    }
}

/// One defect found by `validate`, located at a point path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationFailure {
    pub path: PointPath,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    UnknownGenerator {
        id: String,
    },
    /// A `Map0` whose endpoints are neither equal nor a signature arrow.
    NotAnArrow {
        source: String,
        target: String,
    },
    /// A `Map0` endpoint disagreeing with the diagram it is attached to.
    EndpointMismatch {
        endpoint: String,
        expected: String,
    },
    RegularCount {
        got: usize,
        expected: usize,
    },
    ForwardCount {
        got: usize,
        expected: usize,
    },
    BackwardCount {
        got: usize,
        expected: usize,
    },
    /// Subdiagrams at the same level disagree in dimension.
    MixedDimensions,
    /// A map whose depth does not match the diagrams it connects.
    MapDepthMismatch,
    SingularMapShape {
        got_source: usize,
        got_target: usize,
        expected_source: usize,
        expected_target: usize,
    },
    SingularSliceCount {
        got: usize,
        expected: usize,
    },
    RegularSliceCount {
        got: usize,
        expected: usize,
    },
    ConditionFailed {
        condition: ConditionInstance,
    },
    /// A commuting condition whose sides could not even be composed.
    ConditionUnevaluable {
        condition: ConditionInstance,
    },
}

impl core::fmt::Display for FailureKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FailureKind::UnknownGenerator { id } => {
                write!(f, "generator {id} is not in the signature")
            }
            FailureKind::NotAnArrow { source, target } => {
                write!(f, "{source} -> {target} is not a signature arrow")
            }
            FailureKind::EndpointMismatch { endpoint, expected } => {
                write!(f, "map endpoint {endpoint} does not match diagram {expected}")
            }
            FailureKind::RegularCount { got, expected } => {
                write!(f, "expected {expected} regular levels, found {got}")
            }
            FailureKind::ForwardCount { got, expected } => {
                write!(f, "expected {expected} forward maps, found {got}")
            }
            FailureKind::BackwardCount { got, expected } => {
                write!(f, "expected {expected} backward maps, found {got}")
            }
            FailureKind::MixedDimensions => {
                write!(f, "levels disagree in dimension")
            }
            FailureKind::MapDepthMismatch => {
                write!(f, "map depth does not match the connected diagrams")
            }
            FailureKind::SingularMapShape {
                got_source,
                got_target,
                expected_source,
                expected_target,
            } => write!(
                f,
                "singular map has shape {got_source} -> {got_target}, expected {expected_source} -> {expected_target}"
            ),
            FailureKind::SingularSliceCount { got, expected } => {
                write!(f, "expected {expected} singular slices, found {got}")
            }
            FailureKind::RegularSliceCount { got, expected } => {
                write!(f, "expected {expected} regular slices, found {got}")
            }
            FailureKind::ConditionFailed { condition } => {
                write!(f, "commuting condition failed: {condition}")
            }
            FailureKind::ConditionUnevaluable { condition } => {
                write!(f, "commuting condition could not be evaluated: {condition}")
            }
        }
    }
}

/// Checks a diagram against a signature, reporting every defect found
/// rather than stopping at the first: shape arities, generator and arrow
/// membership, slice endpoints, and the zigzag-map commuting conditions
/// evaluated by structural equality of composites.
pub fn validate(d: &Diagram, sig: &Signature) -> Vec<ValidationFailure> {
    let mut out = Vec::new();
    check_diagram(d, sig, &mut Vec::new(), &mut out);
    out
}

fn fail(out: &mut Vec<ValidationFailure>, path: &[PointIndex], kind: FailureKind) {
    out.push(ValidationFailure {
        path: PointPath(path.to_vec()),
        kind,
    });
}

fn check_diagram(
    d: &Diagram,
    sig: &Signature,
    path: &mut Vec<PointIndex>,
    out: &mut Vec<ValidationFailure>,
) {
    match d {
        Diagram::Diagram0 { generator } => {
            if sig.generator(generator).is_none() {
                fail(out, path, FailureKind::UnknownGenerator {
                    id: generator.clone(),
                });
            }
        }
        Diagram::DiagramN {
            regular,
            singular,
            forward,
            backward,
        } => {
            let n = singular.len();
            if regular.len() != n + 1 {
                fail(out, path, FailureKind::RegularCount {
                    got: regular.len(),
                    expected: n + 1,
                });
            }
            if forward.len() != n {
                fail(out, path, FailureKind::ForwardCount {
                    got: forward.len(),
                    expected: n,
                });
            }
            if backward.len() != n {
                fail(out, path, FailureKind::BackwardCount {
                    got: backward.len(),
                    expected: n,
                });
            }
            let mut dims = regular.iter().chain(singular.iter()).map(Diagram::dimension);
            if let Some(first) = dims.next() {
                if dims.any(|d| d != first) {
                    fail(out, path, FailureKind::MixedDimensions);
                }
            }
            for (j, sub) in regular.iter().enumerate() {
                path.push(PointIndex::regular(j));
                check_diagram(sub, sig, path, out);
                path.pop();
            }
            for (i, sub) in singular.iter().enumerate() {
                path.push(PointIndex::singular(i));
                check_diagram(sub, sig, path, out);
                path.pop();
            }
            for (i, map) in forward.iter().enumerate() {
                if let (Some(x), Some(y)) = (regular.get(i), singular.get(i)) {
                    path.push(PointIndex::singular(i));
                    check_map(map, x, y, sig, path, out);
                    path.pop();
                }
            }
            for (i, map) in backward.iter().enumerate() {
                if let (Some(x), Some(y)) = (regular.get(i + 1), singular.get(i)) {
                    path.push(PointIndex::singular(i));
                    check_map(map, x, y, sig, path, out);
                    path.pop();
                }
            }
        }
    }
}

fn check_map(
    m: &DiagramMap,
    x: &Diagram,
    y: &Diagram,
    sig: &Signature,
    path: &mut Vec<PointIndex>,
    out: &mut Vec<ValidationFailure>,
) {
    match (m, x, y) {
        (
            DiagramMap::Map0 { source, target },
            Diagram::Diagram0 { generator: gx },
            Diagram::Diagram0 { generator: gy },
        ) => {
            if source != gx {
                fail(out, path, FailureKind::EndpointMismatch {
                    endpoint: source.clone(),
                    expected: gx.clone(),
                });
            }
            if target != gy {
                fail(out, path, FailureKind::EndpointMismatch {
                    endpoint: target.clone(),
                    expected: gy.clone(),
                });
            }
            if !sig.allows_map(source, target) {
                fail(out, path, FailureKind::NotAnArrow {
                    source: source.clone(),
                    target: target.clone(),
                });
            }
        }
        (
            DiagramMap::MapN {
                singular_map,
                singular_slices,
                regular_slices,
            },
            Diagram::DiagramN {
                regular: x_reg,
                singular: x_sing,
                forward: x_fwd,
                backward: x_bwd,
            },
            Diagram::DiagramN {
                regular: y_reg,
                singular: y_sing,
                forward: y_fwd,
                backward: y_bwd,
            },
        ) => {
            if singular_map.source_size() != x_sing.len()
                || singular_map.target_size() != y_sing.len()
            {
                fail(out, path, FailureKind::SingularMapShape {
                    got_source: singular_map.source_size(),
                    got_target: singular_map.target_size(),
                    expected_source: x_sing.len(),
                    expected_target: y_sing.len(),
                });
                return;
            }
            if singular_slices.len() != x_sing.len() {
                fail(out, path, FailureKind::SingularSliceCount {
                    got: singular_slices.len(),
                    expected: x_sing.len(),
                });
                return;
            }
            if regular_slices.len() != y_sing.len() + 1 {
                fail(out, path, FailureKind::RegularSliceCount {
                    got: regular_slices.len(),
                    expected: y_sing.len() + 1,
                });
                return;
            }
            // The enclosing diagram may itself be malformed; only check
            // slices whose endpoints exist.
            let f_r = regularize(singular_map);
            for (i, slice) in singular_slices.iter().enumerate() {
                if let Some(ty) = y_sing.get(singular_map.apply(i)) {
                    check_map(slice, &x_sing[i], ty, sig, path, out);
                }
            }
            for (j, slice) in regular_slices.iter().enumerate() {
                if let (Some(sx), Some(ty)) = (x_reg.get(f_r.apply(j)), y_reg.get(j)) {
                    check_map(slice, sx, ty, sig, path, out);
                }
            }
            let composed = |a: Option<&DiagramMap>, b: Option<&DiagramMap>| match (a, b) {
                (Some(a), Some(b)) => a.compose(b).ok(),
                _ => None,
            };
            for condition in condition_instances(singular_map) {
                let (lhs, rhs) = match condition {
                    ConditionInstance::EmptyPreimage { target } => (
                        composed(regular_slices.get(target), y_fwd.get(target)),
                        composed(regular_slices.get(target + 1), y_bwd.get(target)),
                    ),
                    ConditionInstance::LowerSquare { target, p } => (
                        composed(regular_slices.get(target), y_fwd.get(target)),
                        composed(x_fwd.get(p), singular_slices.get(p)),
                    ),
                    ConditionInstance::Middle { j, .. } => (
                        composed(x_bwd.get(j), singular_slices.get(j)),
                        composed(x_fwd.get(j + 1), singular_slices.get(j + 1)),
                    ),
                    ConditionInstance::UpperSquare { target, q } => (
                        composed(regular_slices.get(target + 1), y_bwd.get(target)),
                        composed(x_bwd.get(q), singular_slices.get(q)),
                    ),
                };
                match (lhs, rhs) {
                    (Some(lhs), Some(rhs)) if lhs == rhs => {}
                    (Some(_), Some(_)) => {
                        fail(out, path, FailureKind::ConditionFailed { condition });
                    }
                    _ => {
                        fail(out, path, FailureKind::ConditionUnevaluable { condition });
                    }
                }
            }
        }
        _ => {
            fail(out, path, FailureKind::MapDepthMismatch);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplodeError {
    #[error("requested depth {requested} exceeds the diagram dimension {dimension}")]
    DimensionExceeded { requested: usize, dimension: usize },
    #[error("fiber at {path} has dimension zero and cannot be exploded")]
    FiberRank { path: PointPath },
    #[error("cover arrow between fibers at {from} and {to} is not a monotone singular map")]
    ArrowRank { from: PointPath, to: PointPath },
    #[error("exploded base is not a poset: {0}")]
    Base(PosetError),
    #[error("cover from {from} to {to} does not match a cospan leg or slice")]
    CoverShape { from: PointPath, to: PointPath },
    #[error("composites from {from} to {to} depend on the covering path taken")]
    PathDependent { from: PointPath, to: PointPath },
    #[error("slices from {from} to {to} do not compose")]
    ComposeFailed { from: PointPath, to: PointPath },
}

/// A diagram unfolded over its points: a functor from the poset of
/// depth-`k` point paths to diagrams of dimension `n - k`. Arrows are
/// stored on covering pairs; composites along any comparable pair are
/// precomputed and certified path-independent at construction.
#[derive(Debug, Clone)]
pub struct ExplodedDiagram {
    base: Poset,
    paths: Vec<PointPath>,
    fibers: Vec<Diagram>,
    covers: BTreeMap<(usize, usize), DiagramMap>,
    composites: BTreeMap<(usize, usize), DiagramMap>,
}

impl ExplodedDiagram {
    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn paths(&self) -> &[PointPath] {
        &self.paths
    }

    pub fn fibers(&self) -> &[Diagram] {
        &self.fibers
    }

    pub fn fiber(&self, i: usize) -> &Diagram {
        &self.fibers[i]
    }

    pub fn cover_arrows(&self) -> &BTreeMap<(usize, usize), DiagramMap> {
        &self.covers
    }

    /// The functor's arrow for `a <= b`, identity included.
    pub fn arrow(&self, a: usize, b: usize) -> Option<DiagramMap> {
        if a == b {
            return self.fibers.get(a).map(DiagramMap::identity);
        }
        self.composites.get(&(a, b)).cloned()
    }
}

/// Explodes a diagram `k` levels deep, one zigzag layer at a time. Depth
/// zero gives the one-point base carrying the diagram itself.
pub fn explode(d: &Diagram, k: usize) -> Result<ExplodedDiagram, ExplodeError> {
    if k > d.dimension() {
        return Err(ExplodeError::DimensionExceeded {
            requested: k,
            dimension: d.dimension(),
        });
    }
    let mut e = ExplodedDiagram {
        base: Poset::discrete(1),
        paths: vec![PointPath::empty()],
        fibers: vec![d.clone()],
        covers: BTreeMap::new(),
        composites: BTreeMap::new(),
    };
    for _ in 0..k {
        e = explode_step(&e)?;
    }
    Ok(e)
}

/// The singular map of a cross-fiber arrow, used to decide which points
/// of one fiber sit over which points of the next.
fn arrow_singular_map<'a>(
    e: &'a ExplodedDiagram,
    i: usize,
    j: usize,
) -> Result<&'a MonotoneMap, ExplodeError> {
    let map = e
        .composites
        .get(&(i, j))
        .expect("composites exist for every strictly related pair");
    match map {
        DiagramMap::MapN { singular_map, .. } => Ok(singular_map),
        DiagramMap::Map0 { .. } => Err(ExplodeError::ArrowRank {
            from: e.paths[i].clone(),
            to: e.paths[j].clone(),
        }),
    }
}

fn explode_step(e: &ExplodedDiagram) -> Result<ExplodedDiagram, ExplodeError> {
    let old = e.base.size();
    for (path, fiber) in e.paths.iter().zip(&e.fibers) {
        if matches!(fiber, Diagram::Diagram0 { .. }) {
            return Err(ExplodeError::FiberRank { path: path.clone() });
        }
    }
    let mut elements: Vec<(usize, PointIndex)> = Vec::new();
    let mut paths = Vec::new();
    let mut fibers = Vec::new();
    for i in 0..old {
        for p in ZigzagShape::new(e.fibers[i].length()).points() {
            elements.push((i, p));
            paths.push(e.paths[i].child(p));
            fibers.push(
                e.fibers[i]
                    .at(p)
                    .expect("point enumerated from the fiber's own length")
                    .clone(),
            );
        }
    }

    // The new order is the pullback of the base order along the universal
    // bundle: points relate when their fibers do and the connecting map
    // admits the point pair.
    let mut pairs = Vec::new();
    for (a, &(i, p)) in elements.iter().enumerate() {
        for (b, &(j, q)) in elements.iter().enumerate() {
            if a == b || !e.base.leq(i, j) {
                continue;
            }
            let related = if i == j {
                let identity = MonotoneMap::identity(e.fibers[i].length());
                admits(&identity, p, q)
            } else {
                admits(arrow_singular_map(e, i, j)?, p, q)
            };
            if related {
                pairs.push((a, b));
            }
        }
    }
    let base = Poset::from_pairs(elements.len(), &pairs).map_err(ExplodeError::Base)?;

    let mut covers = BTreeMap::new();
    for (a, b) in base.covers() {
        let (i, p) = elements[a];
        let (j, q) = elements[b];
        let arrow = cover_arrow(e, i, p, j, q).ok_or_else(|| ExplodeError::CoverShape {
            from: paths[a].clone(),
            to: paths[b].clone(),
        })?;
        covers.insert((a, b), arrow);
    }

    let composites = certify(&base, &paths, &covers)?;
    Ok(ExplodedDiagram {
        base,
        paths,
        fibers,
        covers,
        composites,
    })
}

/// Picks the stored map a covering pair corresponds to: a cospan leg of
/// the shared fiber, or the slice of a cross-fiber arrow matching the
/// point kinds. Regular-to-singular jumps across fibers never cover, so
/// those return nothing.
fn cover_arrow(
    e: &ExplodedDiagram,
    i: usize,
    p: PointIndex,
    j: usize,
    q: PointIndex,
) -> Option<DiagramMap> {
    use crate::zigzag::PointKind::{Regular, Singular};
    if i == j {
        let fiber = &e.fibers[i];
        let (forward, backward) = match fiber {
            Diagram::DiagramN {
                forward, backward, ..
            } => (forward, backward),
            Diagram::Diagram0 { .. } => return None,
        };
        return match (p.kind, q.kind) {
            (Regular, Singular) if p.index == q.index => Some(forward[q.index].clone()),
            (Regular, Singular) if p.index == q.index + 1 => Some(backward[q.index].clone()),
            _ => None,
        };
    }
    let map = e.composites.get(&(i, j))?;
    let (f_s, singular_slices, regular_slices) = match map {
        DiagramMap::MapN {
            singular_map,
            singular_slices,
            regular_slices,
        } => (singular_map, singular_slices, regular_slices),
        DiagramMap::Map0 { .. } => return None,
    };
    match (p.kind, q.kind) {
        (Singular, Singular) if f_s.apply(p.index) == q.index => {
            Some(singular_slices[p.index].clone())
        }
        (Regular, Regular) if regularize(f_s).apply(q.index) == p.index => {
            Some(regular_slices[q.index].clone())
        }
        _ => None,
    }
}

/// Extends the covering arrows to all comparable pairs, checking that
/// every covering path between two elements composes to the same map.
fn certify(
    base: &Poset,
    paths: &[PointPath],
    covers: &BTreeMap<(usize, usize), DiagramMap>,
) -> Result<BTreeMap<(usize, usize), DiagramMap>, ExplodeError> {
    let mut covers_into: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in covers.keys() {
        covers_into.entry(b).or_default().push(a);
    }
    let mut composites: BTreeMap<(usize, usize), DiagramMap> = BTreeMap::new();
    for &b in &base.topological_order() {
        for a in 0..base.size() {
            if !base.lt(a, b) {
                continue;
            }
            let mut agreed: Option<DiagramMap> = None;
            for &m in covers_into.get(&b).map(Vec::as_slice).unwrap_or(&[]) {
                if !base.leq(a, m) {
                    continue;
                }
                let step = &covers[&(m, b)];
                let candidate = if a == m {
                    step.clone()
                } else {
                    composites[&(a, m)]
                        .compose(step)
                        .map_err(|_| ExplodeError::ComposeFailed {
                            from: paths[a].clone(),
                            to: paths[b].clone(),
                        })?
                };
                match &agreed {
                    None => agreed = Some(candidate),
                    Some(prev) if *prev != candidate => {
                        return Err(ExplodeError::PathDependent {
                            from: paths[a].clone(),
                            to: paths[b].clone(),
                        });
                    }
                    Some(_) => {}
                }
            }
            composites.insert((a, b), agreed.expect("a < b admits a covering path"));
        }
    }
    Ok(composites)
}

//! Shape-level zigzag structure.
//!
//! A zigzag of length `n` alternates regular and singular positions as
//! `reg 0, sing 0, reg 1, ..., sing n-1, reg n`. This module handles the
//! combinatorics that depend only on lengths and on the singular map of a
//! zigzag map: the point poset, the projection onto singular data, the
//! hom-sets of the universal zigzag category, and the enumeration of
//! commuting conditions a zigzag map must satisfy. Actual slice contents
//! are evaluated elsewhere; the condition checker takes a predicate so the
//! caller can plug in structural equality of its own slice composites.

use alloc::vec::Vec;

use crate::poset::Poset;
use crate::simplicial::{enumerate_monotone, regularize, DeltaEqMap, MonotoneMap, SimplicialError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointKind {
    Regular,
    Singular,
}

/// A position in a zigzag: `reg j` with `0 <= j <= n` or `sing i` with
/// `0 <= i < n`, where `n` is the zigzag length. Points are ordered by
/// their fence position, so `reg 0 < sing 0 < reg 1 < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointIndex {
    pub kind: PointKind,
    pub index: usize,
}

impl PartialOrd for PointIndex {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PointIndex {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.position().cmp(&other.position())
    }
}

impl core::fmt::Display for PointIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.kind {
            PointKind::Regular => write!(f, "r{}", self.index),
            PointKind::Singular => write!(f, "s{}", self.index),
        }
    }
}

impl PointIndex {
    pub fn regular(index: usize) -> Self {
        PointIndex {
            kind: PointKind::Regular,
            index,
        }
    }

    pub fn singular(index: usize) -> Self {
        PointIndex {
            kind: PointKind::Singular,
            index,
        }
    }

    pub fn is_valid_for(&self, length: usize) -> bool {
        match self.kind {
            PointKind::Regular => self.index <= length,
            PointKind::Singular => self.index < length,
        }
    }

    /// Position in the fence enumeration `reg 0, sing 0, reg 1, ...`.
    pub fn position(&self) -> usize {
        match self.kind {
            PointKind::Regular => 2 * self.index,
            PointKind::Singular => 2 * self.index + 1,
        }
    }

    pub fn from_position(position: usize) -> Self {
        if position % 2 == 0 {
            PointIndex::regular(position / 2)
        } else {
            PointIndex::singular(position / 2)
        }
    }
}

/// A zigzag considered only through its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZigzagShape {
    pub length: usize,
}

impl ZigzagShape {
    pub fn new(length: usize) -> Self {
        ZigzagShape { length }
    }

    pub fn point_count(&self) -> usize {
        2 * self.length + 1
    }

    /// All points in fence order.
    pub fn points(&self) -> Vec<PointIndex> {
        (0..self.point_count()).map(PointIndex::from_position).collect()
    }
}

/// An object of the universal zigzag category: a point of some length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZObject {
    pub length: usize,
    pub point: PointIndex,
}

impl ZObject {
    pub fn new(length: usize, point: PointIndex) -> Self {
        ZObject { length, point }
    }

    pub fn validate(&self) -> Result<(), ZigzagError> {
        if self.point.is_valid_for(self.length) {
            Ok(())
        } else {
            Err(ZigzagError::InvalidPoint {
                length: self.length,
                kind: self.point.kind,
                index: self.point.index,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ZigzagError {
    #[error("point {kind:?} {index} is not valid for a zigzag of length {length}")]
    InvalidPoint {
        length: usize,
        kind: PointKind,
        index: usize,
    },
}

/// Shape-level data of a zigzag map: the singular map `ord(n) -> ord(m)`.
/// The induced regular map is recovered by duality rather than stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagMapShape {
    singular_map: MonotoneMap,
}

impl ZigzagMapShape {
    pub fn new(singular_map: MonotoneMap) -> Self {
        ZigzagMapShape { singular_map }
    }

    pub fn identity(length: usize) -> Self {
        ZigzagMapShape {
            singular_map: MonotoneMap::identity(length),
        }
    }

    pub fn source_length(&self) -> usize {
        self.singular_map.source_size()
    }

    pub fn target_length(&self) -> usize {
        self.singular_map.target_size()
    }

    pub fn singular_map(&self) -> &MonotoneMap {
        &self.singular_map
    }

    /// The map on regular positions, `ord(m+1) -> ord(n+1)`.
    pub fn regular_map(&self) -> DeltaEqMap {
        regularize(&self.singular_map)
    }

    /// Diagrammatic composition: `self` then `other`.
    pub fn compose(&self, other: &ZigzagMapShape) -> Result<ZigzagMapShape, SimplicialError> {
        Ok(ZigzagMapShape {
            singular_map: self.singular_map.compose(&other.singular_map)?,
        })
    }
}

/// Projects a zigzag map shape onto its singular map; on objects the
/// corresponding projection sends a zigzag to its length.
pub fn singular_projection(map: &ZigzagMapShape) -> &MonotoneMap {
    map.singular_map()
}

/// The poset of points of a length-`n` zigzag, ordered as a fence: each
/// singular point sits above its two neighbouring regular points, which
/// stay mutually incomparable. Element `k` is `PointIndex::from_position(k)`.
pub fn zigzag_point_poset(n: usize) -> Poset {
    Poset::from_pairs(2 * n + 1, &fence_pairs(n)).expect("fence relations are acyclic")
}

/// Whether a map with singular part `f_s` carries the point `a` of its
/// source zigzag to (or over) the point `b` of its target: singular points
/// map along `f_s`, regular points map backwards along the regularized
/// companion, and a regular point lies over a singular one exactly when it
/// sits between the regularized images of the flanking regular positions.
/// A singular point never relates to a regular one.
pub fn admits(f_s: &MonotoneMap, a: PointIndex, b: PointIndex) -> bool {
    match (a.kind, b.kind) {
        (PointKind::Singular, PointKind::Singular) => f_s.apply(a.index) == b.index,
        (PointKind::Singular, PointKind::Regular) => false,
        (PointKind::Regular, PointKind::Regular) => {
            regularize(f_s).as_monotone().apply(b.index) == a.index
        }
        (PointKind::Regular, PointKind::Singular) => {
            let reg = regularize(f_s);
            let reg = reg.as_monotone();
            reg.apply(b.index) <= a.index && a.index <= reg.apply(b.index + 1)
        }
    }
}

/// Enumerates the hom-set between two points of the universal zigzag
/// category as monotone maps `ord(n) -> ord(m)` filtered by the
/// point-compatibility condition for the given kinds; maps out of a
/// singular point into a regular point never exist.
pub fn universal_hom(a: ZObject, b: ZObject) -> Result<Vec<MonotoneMap>, ZigzagError> {
    a.validate()?;
    b.validate()?;
    let maps = enumerate_monotone(a.length, b.length);
    let selected = maps
        .into_iter()
        .filter(|f| admits(f, a.point, b.point))
        .collect();
    Ok(selected)
}

/// One commuting condition required of a zigzag map with the given
/// singular map, identified by the target singular position it concerns.
/// For an empty preimage the regular slices must close a triangle through
/// the target cospan; otherwise, with `p` and `q` the smallest and largest
/// preimage members, the end slices must close squares with the target's
/// cospan legs and each adjacent preimage pair must agree across the
/// source cospans in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionInstance {
    EmptyPreimage { target: usize },
    LowerSquare { target: usize, p: usize },
    Middle { target: usize, j: usize },
    UpperSquare { target: usize, q: usize },
}

impl core::fmt::Display for ConditionInstance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConditionInstance::EmptyPreimage { target } => {
                write!(f, "triangle through the cospan at target s{target}")
            }
            ConditionInstance::LowerSquare { target, p } => {
                write!(f, "lower square at target s{target} from s{p}")
            }
            ConditionInstance::Middle { target, j } => {
                write!(f, "middle square at target s{target} between s{j} and s{}", j + 1)
            }
            ConditionInstance::UpperSquare { target, q } => {
                write!(f, "upper square at target s{target} from s{q}")
            }
        }
    }
}

/// Enumerates every commuting condition demanded by the singular map, in
/// order of target position.
pub fn condition_instances(f_s: &MonotoneMap) -> Vec<ConditionInstance> {
    let mut out = Vec::new();
    for target in 0..f_s.target_size() {
        let preimage = f_s.preimage(target);
        if preimage.is_empty() {
            out.push(ConditionInstance::EmptyPreimage { target });
            continue;
        }
        let p = preimage.start;
        let q = preimage.end - 1;
        out.push(ConditionInstance::LowerSquare { target, p });
        for j in p..q {
            out.push(ConditionInstance::Middle { target, j });
        }
        out.push(ConditionInstance::UpperSquare { target, q });
    }
    out
}

/// Runs the supplied predicate over every condition instance and returns
/// those that failed; an empty report means the map data is valid.
pub fn check_slice_conditions<F>(f_s: &MonotoneMap, mut holds: F) -> Vec<ConditionInstance>
where
    F: FnMut(&ConditionInstance) -> bool,
{
    condition_instances(f_s)
        .into_iter()
        .filter(|instance| !holds(instance))
        .collect()
}

/// Generating relations of the length-`n` fence over point positions,
/// exposed so larger index posets can splice them in.
pub fn fence_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let sing = PointIndex::singular(i).position();
        pairs.push((PointIndex::regular(i).position(), sing));
        pairs.push((PointIndex::regular(i + 1).position(), sing));
    }
    pairs
}

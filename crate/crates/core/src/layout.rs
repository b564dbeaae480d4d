//! Height assignment. The singular levels of an exploded diagram become
//! variables of a linear program whose optimum balances two aims: keep the
//! strip narrow, and keep each level close to the average of its preimages
//! under every covering map. Solved heights are then interpolated over the
//! regular levels and stacked across explosion depths into full coordinate
//! tuples.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::diagram::{explode, points, Diagram, DiagramMap, ExplodeError, ExplodedDiagram, PointPath};
use crate::lp::{solve, LinearProgram, LowerBound, LpError, LpStatus, Relation};
use crate::poset::{
    injectify, Injectification, InjectifyError, MonotoneFn, Poset, PosetError, PosetFunctor,
};
use crate::zigzag::PointIndex;

/// Which index pairs feed the closeness and averaging constraint families.
/// `Cover` (the default) uses covering pairs of the index poset only; `All`
/// uses every comparable pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairsMode {
    #[default]
    Cover,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayoutError {
    #[error("fiber {index} is a bare generator and has no singular levels")]
    GeneratorFiber { index: usize },
    #[error(transparent)]
    Diagram(#[from] crate::diagram::DiagramError),
    #[error(transparent)]
    Explode(#[from] ExplodeError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Injectify(#[from] InjectifyError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("the height program terminated {status:?} where an optimum was expected")]
    Solver { status: LpStatus },
}

/// Heights for the singular levels of every fiber, all within `[0, width]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZigzagLayout {
    pub width: f64,
    /// Per index of the base poset, one height per singular level.
    pub heights: Vec<Vec<f64>>,
}

/// One deviation from fairness: how far the level `target` of the fiber at
/// `upper` sits from the average of its preimages in the fiber at `lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessTerm {
    pub lower: usize,
    pub upper: usize,
    pub target: usize,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FairnessReport {
    pub terms: Vec<FairnessTerm>,
    pub total: f64,
}

/// Heights extended from singular levels to all `2n+1` fence positions of
/// each fiber, rescaled into `[0, width + 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedHeights {
    values: Vec<Vec<f64>>,
}

impl ExtendedHeights {
    pub fn fiber(&self, index: usize) -> &[f64] {
        &self.values[index]
    }

    pub fn at(&self, index: usize, point: PointIndex) -> f64 {
        self.values[index][point.position()]
    }
}

/// Full coordinates for the deepest points of a diagram. Coordinate tuples
/// list the innermost axis first, so `coords[0]` always comes from the
/// final explosion pass and the last entry from the outermost zigzag.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramLayout {
    pub dimension: usize,
    /// Strip width per axis, innermost first, matching the tuple order.
    pub widths: Vec<f64>,
    pub coordinates: BTreeMap<PointPath, Vec<f64>>,
    /// One report per pass, outermost first.
    pub fairness: Vec<FairnessReport>,
}

impl DiagramLayout {
    pub fn total_defect(&self) -> f64 {
        self.fairness.iter().map(|r| r.total).sum()
    }
}

/// The program built over an injectified level diagram, together with the
/// tables locating each variable: `w`, then one `v` per element of each
/// rebuilt fiber, then one slack `m` per index pair and source element.
#[derive(Debug, Clone)]
pub struct LayoutProgram {
    pub lp: LinearProgram,
    pub width_var: usize,
    pub v: Vec<Vec<usize>>,
    pub m: BTreeMap<(usize, usize), Vec<usize>>,
}

/// Forgets everything about the fibers of an explosion except their
/// singular levels: each fiber becomes the chain on its length and each
/// covering map its monotone level map.
pub fn singular_poset_diagram(e: &ExplodedDiagram) -> Result<PosetFunctor, LayoutError> {
    let mut objects = Vec::with_capacity(e.fibers().len());
    for (index, fiber) in e.fibers().iter().enumerate() {
        if matches!(fiber, Diagram::Diagram0 { .. }) {
            return Err(LayoutError::GeneratorFiber { index });
        }
        objects.push(Poset::chain(fiber.length()));
    }
    let mut arrows = BTreeMap::new();
    for (&(a, b), map) in e.cover_arrows() {
        let level_map = match map {
            DiagramMap::MapN { singular_map, .. } => MonotoneFn::new(
                objects[a].clone(),
                objects[b].clone(),
                singular_map.values().to_vec(),
            )?,
            DiagramMap::Map0 { .. } => return Err(LayoutError::GeneratorFiber { index: a }),
        };
        arrows.insert((a, b), level_map);
    }
    Ok(PosetFunctor::new(e.base().clone(), objects, arrows)?)
}

fn index_pairs(index: &Poset, mode: PairsMode) -> Vec<(usize, usize)> {
    match mode {
        PairsMode::Cover => index.covers(),
        PairsMode::All => {
            let mut pairs = Vec::new();
            for a in 0..index.size() {
                for b in 0..index.size() {
                    if index.lt(a, b) {
                        pairs.push((a, b));
                    }
                }
            }
            pairs
        }
    }
}

/// Assembles the height program for an injectified level diagram. For every
/// rebuilt fiber the element heights are ordered with unit gaps and boxed
/// into `[0, w]`; across each index pair the two copies of an element may
/// drift apart only as far as its slack `m`, and every level with preimages
/// is pinned to their average. The objective charges the width plus all
/// slacks. Separation constraints are emitted transitively reduced: covers
/// of the rebuilt fiber, plus level pairs mapping to consecutive values.
pub fn build_lp(
    p: &PosetFunctor,
    inj: &Injectification,
    mode: PairsMode,
) -> Result<LayoutProgram, LpError> {
    let index = p.index();
    let hat = inj.hat();
    let mut lp = LinearProgram::new();
    let width_var = lp.add_variable("w", LowerBound::Zero);

    let mut v: Vec<Vec<usize>> = Vec::with_capacity(index.size());
    for i in 0..index.size() {
        let fiber: Vec<usize> = inj
            .origin(i)
            .iter()
            .map(|&(j, e)| lp.add_variable(format!("v_{i}_{j}_{e}"), LowerBound::Zero))
            .collect();
        v.push(fiber);
    }

    let pairs = index_pairs(index, mode);
    let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &(i, j) in &pairs {
        let slacks: Vec<usize> = inj
            .origin(i)
            .iter()
            .map(|&(k, e)| lp.add_variable(format!("m_{i}_{j}_{k}_{e}"), LowerBound::Zero))
            .collect();
        m.insert((i, j), slacks);
    }

    for fiber in &v {
        for &var in fiber {
            lp.add_constraint(&[(var, 1.0), (width_var, -1.0)], Relation::Le, 0.0)?;
        }
    }

    for i in 0..index.size() {
        let mut separated: BTreeSet<(usize, usize)> = BTreeSet::new();
        separated.extend(hat.object(i).covers());
        let eps = inj.epsilon(i);
        for a in 0..hat.object(i).size() {
            for b in 0..hat.object(i).size() {
                if eps.apply(a) + 1 == eps.apply(b) {
                    separated.insert((a, b));
                }
            }
        }
        for (a, b) in separated {
            lp.add_constraint(&[(v[i][b], 1.0), (v[i][a], -1.0)], Relation::Ge, 1.0)?;
        }
    }

    for &(i, j) in &pairs {
        let slacks = &m[&(i, j)];
        for (a, &tag) in inj.origin(i).iter().enumerate() {
            let b = inj
                .origin_index(j, tag)
                .expect("tags present below an index persist above it");
            lp.add_constraint(
                &[(v[i][a], 1.0), (v[j][b], -1.0), (slacks[a], -1.0)],
                Relation::Le,
                0.0,
            )?;
            lp.add_constraint(
                &[(v[j][b], 1.0), (v[i][a], -1.0), (slacks[a], -1.0)],
                Relation::Le,
                0.0,
            )?;
        }
        let level_map = p.arrow(i, j).expect("pairs are comparable");
        for q in 0..p.object(j).size() {
            let preimage: Vec<usize> = (0..p.object(i).size())
                .filter(|&e| level_map.apply(e) == q)
                .collect();
            if preimage.is_empty() {
                continue;
            }
            let own = inj
                .origin_index(j, (j, q))
                .expect("every fiber keeps a copy of its own levels");
            let mut terms = vec![(v[j][own], preimage.len() as f64)];
            for e in preimage {
                let copied = inj
                    .origin_index(j, (i, e))
                    .expect("tags present below an index persist above it");
                terms.push((v[j][copied], -1.0));
            }
            lp.add_constraint(&terms, Relation::Eq, 0.0)?;
        }
    }

    let mut objective = vec![(width_var, 1.0)];
    for slacks in m.values() {
        objective.extend(slacks.iter().map(|&var| (var, 1.0)));
    }
    lp.set_objective(&objective)?;

    Ok(LayoutProgram {
        lp,
        width_var,
        v,
        m,
    })
}

/// Measures how far a layout sits from fairness: for every covering pair of
/// the index and every level of the upper fiber with preimages, the distance
/// between its height and the average height of those preimages.
pub fn fairness_defect(layout: &ZigzagLayout, p: &PosetFunctor) -> FairnessReport {
    let mut report = FairnessReport::default();
    for (&(i, j), level_map) in p.cover_arrows() {
        for q in 0..p.object(j).size() {
            let preimage: Vec<usize> = (0..p.object(i).size())
                .filter(|&e| level_map.apply(e) == q)
                .collect();
            if preimage.is_empty() {
                continue;
            }
            let average = preimage
                .iter()
                .map(|&e| layout.heights[i][e])
                .sum::<f64>()
                / preimage.len() as f64;
            let defect = (layout.heights[j][q] - average).abs();
            report.terms.push(FairnessTerm {
                lower: i,
                upper: j,
                target: q,
                defect,
            });
            report.total += defect;
        }
    }
    report
}

/// Runs the full pipeline on one explosion: rebuild the level diagram with
/// injective maps, solve the height program, and read the height of each
/// original level off its own copy.
pub fn zigzag_layout(
    e: &ExplodedDiagram,
    mode: PairsMode,
) -> Result<(ZigzagLayout, FairnessReport), LayoutError> {
    let p = singular_poset_diagram(e)?;
    let inj = injectify(&p)?;
    let program = build_lp(&p, &inj, mode)?;
    let solution = solve(&program.lp);
    if solution.status != LpStatus::Optimal {
        return Err(LayoutError::Solver {
            status: solution.status,
        });
    }
    let heights: Vec<Vec<f64>> = (0..p.index().size())
        .map(|i| {
            (0..p.object(i).size())
                .map(|level| {
                    let own = inj
                        .origin_index(i, (i, level))
                        .expect("every fiber keeps a copy of its own levels");
                    solution.assignment[program.v[i][own]]
                })
                .collect()
        })
        .collect();
    let layout = ZigzagLayout {
        width: solution.assignment[program.width_var],
        heights,
    };
    let report = fairness_defect(&layout, &p);
    Ok((layout, report))
}

/// Spreads singular heights over all fence positions: each singular level
/// moves up by one, the outer regular levels pin to the strip edges 0 and
/// `w + 2`, and interior regular levels sit one above the midpoint of their
/// neighbours. A fiber with no singular levels gets the strip midpoint.
pub fn extend_heights(layout: &ZigzagLayout, lengths: &[usize]) -> ExtendedHeights {
    debug_assert_eq!(lengths.len(), layout.heights.len());
    let values = lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let lambda = &layout.heights[i];
            debug_assert_eq!(lambda.len(), n);
            let w = layout.width;
            if n == 0 {
                return vec![0.5 * w + 1.0];
            }
            let mut out = vec![0.0; 2 * n + 1];
            for s in 0..n {
                out[2 * s + 1] = lambda[s] + 1.0;
            }
            for r in 1..n {
                out[2 * r] = 0.5 * (lambda[r - 1] + lambda[r]) + 1.0;
            }
            out[2 * n] = w + 2.0;
            out
        })
        .collect();
    ExtendedHeights { values }
}

/// Lays out a whole diagram. Pass `k` explodes the diagram `k - 1` times,
/// solves the height program of the outermost remaining zigzag level, and
/// extends the result over regular positions; the tuple of a deepest point
/// collects one extended height per pass, innermost first.
pub fn diagram_layout(d: &Diagram, mode: PairsMode) -> Result<DiagramLayout, LayoutError> {
    let n = d.dimension();
    if n == 0 {
        let mut coordinates = BTreeMap::new();
        coordinates.insert(PointPath::empty(), Vec::new());
        return Ok(DiagramLayout {
            dimension: 0,
            widths: Vec::new(),
            coordinates,
            fairness: Vec::new(),
        });
    }

    let mut widths_outer_first = Vec::with_capacity(n);
    let mut fairness = Vec::with_capacity(n);
    let mut passes: Vec<(Vec<PointPath>, ExtendedHeights)> = Vec::with_capacity(n);
    for k in 1..=n {
        let e = explode(d, k - 1)?;
        let (layout, report) = zigzag_layout(&e, mode)?;
        let lengths: Vec<usize> = e.fibers().iter().map(Diagram::length).collect();
        let extended = extend_heights(&layout, &lengths);
        widths_outer_first.push(layout.width);
        fairness.push(report);
        passes.push((e.paths().to_vec(), extended));
    }

    let mut coordinates = BTreeMap::new();
    for path in points(d, n)? {
        let mut coords = Vec::with_capacity(n);
        for k in (1..=n).rev() {
            let (prefixes, extended) = &passes[k - 1];
            let prefix = PointPath(path.0[..k - 1].to_vec());
            let fiber = prefixes
                .binary_search(&prefix)
                .expect("prefixes of deep points are exploded paths");
            coords.push(extended.at(fiber, path.0[k - 1]));
        }
        coordinates.insert(path, coords);
    }

    widths_outer_first.reverse();
    Ok(DiagramLayout {
        dimension: n,
        widths: widths_outer_first,
        coordinates,
        fairness,
    })
}

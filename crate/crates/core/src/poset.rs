//! Finite posets, monotone maps, poset-shaped diagrams of posets, and the
//! injectification construction.
//!
//! A diagram here is a functor `P : J -> Pos` with `J` itself a finite
//! poset, stored as one fiber poset per index plus one monotone map per
//! covering pair of `J`. Injectification rebuilds such a diagram with every
//! arrow injective, at the cost of enlarging the fibers: indices are
//! processed along a stable linear extension of `J`, and each new fiber is
//! the colimit of everything built strictly below it, pushed through the
//! mono-epi factorization [`factorize_mono_epi`] of the mediating map into
//! the original fiber. Every element of a rebuilt fiber carries an origin
//! tag `(j, e)` naming the original fiber element it is a copy of, and the
//! carrier of `hat(i)` is literally the sorted list of all tags `(j, e)`
//! with `j <= i`. Rebuilt arrows act as the identity on tags.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

/// Errors raised by poset and poset-diagram constructors and operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error("relation has a cycle through elements {a} and {b}")]
    Cycle { a: usize, b: usize },
    #[error("element {element} is out of range for a poset of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("map table has {got} entries for a source of size {expected}")]
    SourceSizeMismatch { got: usize, expected: usize },
    #[error("map does not preserve the relation {a} <= {b}")]
    NotMonotone { a: usize, b: usize },
    #[error("cannot compose maps: middle posets differ")]
    ComposeMismatch,
    #[error("objects list has {got} entries for an index poset of size {expected}")]
    ObjectCountMismatch { got: usize, expected: usize },
    #[error("missing arrow for covering pair ({lower}, {upper})")]
    MissingArrow { lower: usize, upper: usize },
    #[error("arrow keyed by ({lower}, {upper}) which is not a covering pair")]
    UnexpectedArrow { lower: usize, upper: usize },
    #[error("arrow for ({lower}, {upper}) has mismatched source or target")]
    ArrowMismatch { lower: usize, upper: usize },
    #[error("composites from {lower} to {upper} disagree between covering paths")]
    PathDependent { lower: usize, upper: usize },
    #[error("subset is not downward closed: {lower} <= {upper} but only {upper} is included")]
    NotDownwardClosed { lower: usize, upper: usize },
    #[error("cocone legs disagree on a glued class containing ({index}, {element})")]
    InconsistentCocone { index: usize, element: usize },
    #[error("cocone leg for index {index} is missing or has mismatched source or target")]
    BadCoconeLeg { index: usize },
}

fn close_matrix(size: usize, m: &mut [bool]) {
    for k in 0..size {
        for a in 0..size {
            if m[a * size + k] {
                for b in 0..size {
                    if m[k * size + b] {
                        m[a * size + b] = true;
                    }
                }
            }
        }
    }
}

fn antisymmetry_violation(size: usize, m: &[bool]) -> Option<(usize, usize)> {
    for a in 0..size {
        for b in (a + 1)..size {
            if m[a * size + b] && m[b * size + a] {
                return Some((a, b));
            }
        }
    }
    None
}

/// A finite poset on elements `0..size`, stored as its full closure matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    size: usize,
    leq: Vec<bool>,
}

impl Poset {
    /// The discrete poset: no relations besides reflexivity.
    pub fn discrete(n: usize) -> Self {
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a * n + a] = true;
        }
        Poset { size: n, leq }
    }

    /// The linear order `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in a..n {
                leq[a * n + b] = true;
            }
        }
        Poset { size: n, leq }
    }

    /// Builds the poset generated by the given relation pairs. The
    /// reflexive-transitive closure is taken; a cycle is an error.
    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        let mut leq = vec![false; size * size];
        for a in 0..size {
            leq[a * size + a] = true;
        }
        for &(a, b) in pairs {
            let oob = if a >= size { a } else { b };
            if a >= size || b >= size {
                return Err(PosetError::ElementOutOfRange { element: oob, size });
            }
            leq[a * size + b] = true;
        }
        close_matrix(size, &mut leq);
        if let Some((a, b)) = antisymmetry_violation(size, &leq) {
            return Err(PosetError::Cycle { a, b });
        }
        Ok(Poset { size, leq })
    }

    pub(crate) fn from_closed_matrix(size: usize, leq: Vec<bool>) -> Self {
        debug_assert_eq!(leq.len(), size * size);
        debug_assert!(antisymmetry_violation(size, &leq).is_none());
        Poset { size, leq }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// All covering pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.size {
            'next: for b in 0..self.size {
                if !self.lt(a, b) {
                    continue;
                }
                for c in 0..self.size {
                    if self.lt(a, c) && self.lt(c, b) {
                        continue 'next;
                    }
                }
                out.push((a, b));
            }
        }
        out
    }

    /// Elements `<= i`, ascending.
    pub fn down_set(&self, i: usize) -> Vec<usize> {
        (0..self.size).filter(|&j| self.leq(j, i)).collect()
    }

    /// Elements strictly below `i`, ascending.
    pub fn strict_down_set(&self, i: usize) -> Vec<usize> {
        (0..self.size).filter(|&j| self.lt(j, i)).collect()
    }

    /// A stable linear extension: repeatedly emits the smallest-index
    /// element all of whose strict predecessors are already placed.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut placed = vec![false; self.size];
        let mut order = Vec::with_capacity(self.size);
        while order.len() < self.size {
            for a in 0..self.size {
                if !placed[a] && (0..self.size).all(|b| placed[b] || !self.lt(b, a)) {
                    placed[a] = true;
                    order.push(a);
                    break;
                }
            }
        }
        order
    }

    fn check_monotone(&self, target: &Poset, values: &[usize]) -> Result<(), PosetError> {
        if values.len() != self.size {
            return Err(PosetError::SourceSizeMismatch {
                got: values.len(),
                expected: self.size,
            });
        }
        for &v in values {
            if v >= target.size {
                return Err(PosetError::ElementOutOfRange {
                    element: v,
                    size: target.size,
                });
            }
        }
        for a in 0..self.size {
            for b in 0..self.size {
                if self.leq(a, b) && !target.leq(values[a], values[b]) {
                    return Err(PosetError::NotMonotone { a, b });
                }
            }
        }
        Ok(())
    }
}

/// A monotone map between two posets, stored with its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneFn {
    source: Poset,
    target: Poset,
    values: Vec<usize>,
}

impl MonotoneFn {
    pub fn new(source: Poset, target: Poset, values: Vec<usize>) -> Result<Self, PosetError> {
        source.check_monotone(&target, &values)?;
        Ok(MonotoneFn {
            source,
            target,
            values,
        })
    }

    pub(crate) fn new_unchecked(source: Poset, target: Poset, values: Vec<usize>) -> Self {
        debug_assert!(source.check_monotone(&target, &values).is_ok());
        MonotoneFn {
            source,
            target,
            values,
        }
    }

    pub fn identity(p: &Poset) -> Self {
        MonotoneFn {
            source: p.clone(),
            target: p.clone(),
            values: (0..p.size()).collect(),
        }
    }

    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &Poset {
        &self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// Diagrammatic composition: `self` first, then `g`.
    pub fn compose(&self, g: &MonotoneFn) -> Result<MonotoneFn, PosetError> {
        if self.target != g.source {
            return Err(PosetError::ComposeMismatch);
        }
        Ok(MonotoneFn {
            source: self.source.clone(),
            target: g.target.clone(),
            values: self.values.iter().map(|&x| g.values[x]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        self.values.iter().all(|&v| !core::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        for &v in &self.values {
            seen[v] = true;
        }
        seen.iter().all(|&s| s)
    }
}

/// Result of [`poset_reflection`]: the quotient poset of a preorder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reflection {
    pub poset: Poset,
    /// Class of each input element in the quotient.
    pub class_of: Vec<usize>,
    /// Whether any two distinct elements were identified.
    pub collapsed: bool,
}

/// Quotients the preorder generated by `relation` on `0..size` down to a
/// poset: the transitive closure is taken and mutually related elements
/// are collapsed to one. Classes are numbered by their smallest member.
pub fn poset_reflection(size: usize, relation: &[(usize, usize)]) -> Result<Reflection, PosetError> {
    let mut m = vec![false; size * size];
    for a in 0..size {
        m[a * size + a] = true;
    }
    for &(a, b) in relation {
        if a >= size || b >= size {
            let element = if a >= size { a } else { b };
            return Err(PosetError::ElementOutOfRange { element, size });
        }
        m[a * size + b] = true;
    }
    close_matrix(size, &mut m);
    let mut rep = vec![0usize; size];
    for a in 0..size {
        rep[a] = (0..size)
            .find(|&b| m[a * size + b] && m[b * size + a])
            .unwrap_or(a);
    }
    let reps: Vec<usize> = (0..size).filter(|&a| rep[a] == a).collect();
    let class_of: Vec<usize> = (0..size)
        .map(|a| reps.binary_search(&rep[a]).unwrap())
        .collect();
    let q = reps.len();
    let mut leq = vec![false; q * q];
    for (ca, &a) in reps.iter().enumerate() {
        for (cb, &b) in reps.iter().enumerate() {
            if m[a * size + b] {
                leq[ca * q + cb] = true;
            }
        }
    }
    Ok(Reflection {
        poset: Poset { size: q, leq },
        class_of,
        collapsed: q != size,
    })
}

/// A functor from a finite poset `J` into posets: one fiber per element of
/// `J` and one monotone map per covering pair, required to compose
/// path-independently. Composite arrows are derived and cached.
#[derive(Debug, Clone)]
pub struct PosetFunctor {
    index: Poset,
    objects: Vec<Poset>,
    covers: BTreeMap<(usize, usize), MonotoneFn>,
    composites: BTreeMap<(usize, usize), Vec<usize>>,
}

impl PosetFunctor {
    pub fn new(
        index: Poset,
        objects: Vec<Poset>,
        arrows: BTreeMap<(usize, usize), MonotoneFn>,
    ) -> Result<Self, PosetError> {
        if objects.len() != index.size() {
            return Err(PosetError::ObjectCountMismatch {
                got: objects.len(),
                expected: index.size(),
            });
        }
        let cover_pairs = index.covers();
        for &(a, b) in arrows.keys() {
            if !cover_pairs.contains(&(a, b)) {
                return Err(PosetError::UnexpectedArrow { lower: a, upper: b });
            }
        }
        for &(a, b) in &cover_pairs {
            let arrow = arrows
                .get(&(a, b))
                .ok_or(PosetError::MissingArrow { lower: a, upper: b })?;
            if arrow.source() != &objects[a] || arrow.target() != &objects[b] {
                return Err(PosetError::ArrowMismatch { lower: a, upper: b });
            }
        }
        let mut covers_into: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &cover_pairs {
            covers_into.entry(b).or_default().push(a);
        }
        // Composites are extended one covering step at a time; every pair of
        // covering paths into the same target must agree.
        let mut composites: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for &b in &index.topological_order() {
            for a in 0..index.size() {
                if !index.lt(a, b) {
                    continue;
                }
                let mut agreed: Option<Vec<usize>> = None;
                for &m in covers_into.get(&b).map(Vec::as_slice).unwrap_or(&[]) {
                    if !index.leq(a, m) {
                        continue;
                    }
                    let step = arrows[&(m, b)].values();
                    let candidate: Vec<usize> = if a == m {
                        step.to_vec()
                    } else {
                        composites[&(a, m)].iter().map(|&x| step[x]).collect()
                    };
                    match &agreed {
                        None => agreed = Some(candidate),
                        Some(prev) if *prev != candidate => {
                            return Err(PosetError::PathDependent { lower: a, upper: b });
                        }
                        Some(_) => {}
                    }
                }
                composites.insert((a, b), agreed.expect("a < b admits a covering path"));
            }
        }
        Ok(PosetFunctor {
            index,
            objects,
            covers: arrows,
            composites,
        })
    }

    pub fn index(&self) -> &Poset {
        &self.index
    }

    pub fn object(&self, i: usize) -> &Poset {
        &self.objects[i]
    }

    pub fn objects(&self) -> &[Poset] {
        &self.objects
    }

    pub fn cover_arrows(&self) -> &BTreeMap<(usize, usize), MonotoneFn> {
        &self.covers
    }

    /// The (derived) arrow for any related pair `a <= b`.
    pub fn arrow(&self, a: usize, b: usize) -> Option<MonotoneFn> {
        if a == b {
            return self.objects.get(a).map(MonotoneFn::identity);
        }
        let values = self.composites.get(&(a, b))?.clone();
        Some(MonotoneFn::new_unchecked(
            self.objects[a].clone(),
            self.objects[b].clone(),
            values,
        ))
    }

    pub(crate) fn arrow_table(&self, a: usize, b: usize) -> &[usize] {
        &self.composites[&(a, b)]
    }
}

/// A colimit of a poset functor over a downward-closed subset of its index.
#[derive(Debug, Clone)]
pub struct Colimit {
    pub poset: Poset,
    /// One leg per subset index, from the fiber into the colimit.
    pub cocone: BTreeMap<usize, MonotoneFn>,
    /// Per colimit element, the smallest `(index, element)` glued into it.
    pub labels: Vec<(usize, usize)>,
    /// Whether every cocone leg is injective.
    pub injective: bool,
    /// Whether the quotient to a poset identified distinct classes.
    pub collapsed: bool,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            cur = core::mem::replace(&mut self.0[cur], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
    }
}

/// Computes the colimit of `f` restricted to the downward-closed `subset`
/// of its index: fibers are glued along every arrow inside the subset, and
/// the induced preorder is quotiented to a poset.
pub fn colimit(f: &PosetFunctor, subset: &[usize]) -> Result<Colimit, PosetError> {
    let mut sub: Vec<usize> = subset.to_vec();
    sub.sort_unstable();
    sub.dedup();
    for &j in &sub {
        if j >= f.index.size() {
            return Err(PosetError::ElementOutOfRange {
                element: j,
                size: f.index.size(),
            });
        }
        for k in 0..f.index.size() {
            if f.index.lt(k, j) && sub.binary_search(&k).is_err() {
                return Err(PosetError::NotDownwardClosed { lower: k, upper: j });
            }
        }
    }
    let mut offset = BTreeMap::new();
    let mut total = 0usize;
    for &j in &sub {
        offset.insert(j, total);
        total += f.object(j).size();
    }
    let mut uf = UnionFind::new(total);
    for &a in &sub {
        for &b in &sub {
            if !f.index.lt(a, b) {
                continue;
            }
            let table = f.arrow_table(a, b);
            for x in 0..f.object(a).size() {
                uf.union(offset[&a] + x, offset[&b] + table[x]);
            }
        }
    }
    // Classes are named by their smallest glued (index, element) pair.
    let mut slot_label = vec![(usize::MAX, usize::MAX); total];
    for &j in &sub {
        for x in 0..f.object(j).size() {
            let root = uf.find(offset[&j] + x);
            slot_label[root] = slot_label[root].min((j, x));
        }
    }
    let mut class_labels: Vec<(usize, usize)> = (0..total)
        .filter(|&s| uf.find(s) == s)
        .map(|s| slot_label[s])
        .collect();
    class_labels.sort_unstable();
    let class_of_slot = |uf: &mut UnionFind, slot: usize| -> usize {
        let root = uf.find(slot);
        class_labels.binary_search(&slot_label[root]).unwrap()
    };
    let classes = class_labels.len();
    let mut relation = Vec::new();
    for &j in &sub {
        let p = f.object(j);
        for x in 0..p.size() {
            for y in 0..p.size() {
                if p.leq(x, y) {
                    let cx = class_of_slot(&mut uf, offset[&j] + x);
                    let cy = class_of_slot(&mut uf, offset[&j] + y);
                    relation.push((cx, cy));
                }
            }
        }
    }
    let reflection = poset_reflection(classes, &relation)?;
    let final_labels: Vec<(usize, usize)> = {
        let mut best = vec![(usize::MAX, usize::MAX); reflection.poset.size()];
        for (c, &fc) in reflection.class_of.iter().enumerate() {
            best[fc] = best[fc].min(class_labels[c]);
        }
        best
    };
    let mut cocone = BTreeMap::new();
    let mut injective = true;
    for &j in &sub {
        let values: Vec<usize> = (0..f.object(j).size())
            .map(|x| reflection.class_of[class_of_slot(&mut uf, offset[&j] + x)])
            .collect();
        let leg = MonotoneFn::new_unchecked(f.object(j).clone(), reflection.poset.clone(), values);
        injective &= leg.is_injective();
        cocone.insert(j, leg);
    }
    Ok(Colimit {
        poset: reflection.poset,
        cocone,
        labels: final_labels,
        injective,
        collapsed: reflection.collapsed,
    })
}

impl Colimit {
    /// The unique mediating map to the tip of a competing cocone, or an
    /// error describing how the competing legs fail to be a cocone.
    pub fn mediating(&self, legs: &BTreeMap<usize, MonotoneFn>) -> Result<MonotoneFn, PosetError> {
        let mut target: Option<&Poset> = None;
        for (&j, own) in &self.cocone {
            let leg = legs.get(&j).ok_or(PosetError::BadCoconeLeg { index: j })?;
            if leg.source() != own.source() {
                return Err(PosetError::BadCoconeLeg { index: j });
            }
            match target {
                None => target = Some(leg.target()),
                Some(t) if t != leg.target() => {
                    return Err(PosetError::BadCoconeLeg { index: j });
                }
                Some(_) => {}
            }
        }
        let target = match target {
            Some(t) => t.clone(),
            None => return MonotoneFn::new(self.poset.clone(), Poset::discrete(0), Vec::new()),
        };
        let mut values = vec![usize::MAX; self.poset.size()];
        for (&j, own) in &self.cocone {
            let leg = &legs[&j];
            for x in 0..own.source().size() {
                let class = own.apply(x);
                let v = leg.apply(x);
                if values[class] == usize::MAX {
                    values[class] = v;
                } else if values[class] != v {
                    return Err(PosetError::InconsistentCocone { index: j, element: x });
                }
            }
        }
        MonotoneFn::new(self.poset.clone(), target, values)
    }
}

/// The mono-epi factorization of a monotone map `p : C -> X` through the
/// ordered disjoint union of its endpoints.
#[derive(Debug, Clone)]
pub struct MonoEpiFactorization {
    pub mid: Poset,
    pub mono: MonotoneFn,
    pub epi: MonotoneFn,
}

/// Factors `p : C -> X` as an injection followed by a surjection. The
/// middle poset has carrier `C` then `X`, ordered by both originals plus
/// the strict cross relations `c < x` iff `p(c) < x` and `x < c` iff
/// `x < p(c)`, transitively closed.
pub fn factorize_mono_epi(p: &MonotoneFn) -> MonoEpiFactorization {
    let c = p.source();
    let x = p.target();
    let (nc, nx) = (c.size(), x.size());
    let n = nc + nx;
    let mut m = vec![false; n * n];
    for a in 0..nc {
        for b in 0..nc {
            if c.leq(a, b) {
                m[a * n + b] = true;
            }
        }
    }
    for a in 0..nx {
        for b in 0..nx {
            if x.leq(a, b) {
                m[(nc + a) * n + (nc + b)] = true;
            }
        }
    }
    for a in 0..nc {
        for b in 0..nx {
            if x.lt(p.apply(a), b) {
                m[a * n + (nc + b)] = true;
            }
            if x.lt(b, p.apply(a)) {
                m[(nc + b) * n + a] = true;
            }
        }
    }
    close_matrix(n, &mut m);
    // Every generating relation maps under [p, id] to a relation of X, the
    // cross ones strictly, so a cycle would force a strict cycle in X.
    let mid = Poset::from_closed_matrix(n, m);
    let mono = MonotoneFn::new_unchecked(c.clone(), mid.clone(), (0..nc).collect());
    let mut epi_values: Vec<usize> = (0..nc).map(|a| p.apply(a)).collect();
    epi_values.extend(0..nx);
    let epi = MonotoneFn::new_unchecked(mid.clone(), x.clone(), epi_values);
    MonoEpiFactorization { mid, mono, epi }
}

/// Errors raised by [`injectify`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InjectifyError {
    #[error("gluing below index {index} identifies two elements of the fiber rebuilt at {component}")]
    NonInjectiveCocone { index: usize, component: usize },
}

/// A diagram rebuilt with injective arrows, with a surjection back onto the
/// original at every index.
#[derive(Debug, Clone)]
pub struct Injectification {
    hat: PosetFunctor,
    epsilon: Vec<MonotoneFn>,
    origin: Vec<Vec<(usize, usize)>>,
}

impl Injectification {
    pub fn hat(&self) -> &PosetFunctor {
        &self.hat
    }

    pub fn epsilon(&self, i: usize) -> &MonotoneFn {
        &self.epsilon[i]
    }

    /// Per element of `hat(i)`, the tag `(j, e)` it is a copy of, sorted.
    pub fn origin(&self, i: usize) -> &[(usize, usize)] {
        &self.origin[i]
    }

    /// Position in `hat(i)` of the element with the given origin tag.
    pub fn origin_index(&self, i: usize, tag: (usize, usize)) -> Option<usize> {
        self.origin[i].binary_search(&tag).ok()
    }
}

/// Rebuilds `p` with every arrow injective, processing indices along the
/// stable linear extension of the index poset. Fails if gluing the fibers
/// built below some index identifies two elements coming from one fiber.
pub fn injectify(p: &PosetFunctor) -> Result<Injectification, InjectifyError> {
    let index = p.index();
    let n = index.size();
    let mut hats: Vec<Option<Poset>> = vec![None; n];
    let mut epsilon: Vec<Option<MonotoneFn>> = vec![None; n];
    let mut origin: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &i in &index.topological_order() {
        let down = index.strict_down_set(i);
        let own = p.object(i).size();
        if down.is_empty() {
            hats[i] = Some(p.object(i).clone());
            epsilon[i] = Some(MonotoneFn::identity(p.object(i)));
            origin[i] = (0..own).map(|e| (i, e)).collect();
            continue;
        }
        let mut tags: Vec<(usize, usize)> = Vec::new();
        for &j in &down {
            tags.extend((0..p.object(j).size()).map(|e| (j, e)));
        }
        let nc = tags.len();
        let mut glued = vec![false; nc * nc];
        for &j in &down {
            let hj = hats[j].as_ref().expect("down-set indices already built");
            let pos: Vec<usize> = origin[j]
                .iter()
                .map(|t| tags.binary_search(t).expect("tags below j are below i"))
                .collect();
            for a in 0..hj.size() {
                for b in 0..hj.size() {
                    if hj.leq(a, b) {
                        glued[pos[a] * nc + pos[b]] = true;
                    }
                }
            }
        }
        close_matrix(nc, &mut glued);
        if antisymmetry_violation(nc, &glued).is_some() {
            let component = down
                .iter()
                .copied()
                .find(|&j| {
                    let oj = &origin[j];
                    oj.iter().enumerate().any(|(s, ts)| {
                        oj.iter().skip(s + 1).any(|tt| {
                            let ps = tags.binary_search(ts).unwrap();
                            let pt = tags.binary_search(tt).unwrap();
                            glued[ps * nc + pt] && glued[pt * nc + ps]
                        })
                    })
                })
                .unwrap_or(down[0]);
            return Err(InjectifyError::NonInjectiveCocone {
                index: i,
                component,
            });
        }
        let colim = Poset::from_closed_matrix(nc, glued);
        let mediating_values: Vec<usize> = tags
            .iter()
            .map(|&(j, e)| p.arrow_table(j, i)[e])
            .collect();
        let mediating = MonotoneFn::new(colim, p.object(i).clone(), mediating_values)
            .expect("glued relations come from fibers below i, so they map monotonely");
        let fact = factorize_mono_epi(&mediating);
        let mut all_tags = tags;
        all_tags.extend((0..own).map(|e| (i, e)));
        let mut sorted = all_tags.clone();
        sorted.sort_unstable();
        let perm: Vec<usize> = all_tags
            .iter()
            .map(|t| sorted.binary_search(t).unwrap())
            .collect();
        let total = nc + own;
        let mut leq = vec![false; total * total];
        for a in 0..total {
            for b in 0..total {
                if fact.mid.leq(a, b) {
                    leq[perm[a] * total + perm[b]] = true;
                }
            }
        }
        let mut eps_values = vec![0usize; total];
        for a in 0..total {
            eps_values[perm[a]] = fact.epi.apply(a);
        }
        let hat_i = Poset::from_closed_matrix(total, leq);
        epsilon[i] = Some(MonotoneFn::new_unchecked(
            hat_i.clone(),
            p.object(i).clone(),
            eps_values,
        ));
        hats[i] = Some(hat_i);
        origin[i] = sorted;
    }
    let hats: Vec<Poset> = hats.into_iter().map(Option::unwrap).collect();
    let mut arrows = BTreeMap::new();
    for (a, b) in index.covers() {
        let values: Vec<usize> = origin[a]
            .iter()
            .map(|t| origin[b].binary_search(t).expect("tags below a are below b"))
            .collect();
        arrows.insert(
            (a, b),
            MonotoneFn::new(hats[a].clone(), hats[b].clone(), values)
                .expect("tag inclusions are monotone"),
        );
    }
    let hat = PosetFunctor::new(index.clone(), hats, arrows)
        .expect("tag inclusions compose path-independently");
    Ok(Injectification {
        hat,
        epsilon: epsilon.into_iter().map(Option::unwrap).collect(),
        origin,
    })
}

/// Errors raised by [`lift`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("the two functors have different index posets")]
    ShapeMismatch,
    #[error("expected {expected} components, got {got}")]
    ComponentCount { got: usize, expected: usize },
    #[error("component {index} has mismatched source or target")]
    ComponentMismatch { index: usize },
    #[error("naturality fails on the covering pair ({lower}, {upper})")]
    NotNatural { lower: usize, upper: usize },
    #[error("no monotone lift at index {index}: the strict pair ({a}, {b}) collapses")]
    StrictPairCollapse { index: usize, a: usize, b: usize },
}

/// Lifts a natural transformation `alpha : p => q` to one between the two
/// injectifications, acting on origin tags by the matching component of
/// `alpha`. Fails when `alpha` identifies elements across a strict cross
/// relation, in which case no monotone lift exists for this factorization.
pub fn lift(
    p: &PosetFunctor,
    p_inj: &Injectification,
    q: &PosetFunctor,
    q_inj: &Injectification,
    alpha: &[MonotoneFn],
) -> Result<Vec<MonotoneFn>, LiftError> {
    if p.index() != q.index() {
        return Err(LiftError::ShapeMismatch);
    }
    let n = p.index().size();
    if alpha.len() != n {
        return Err(LiftError::ComponentCount {
            got: alpha.len(),
            expected: n,
        });
    }
    for (i, component) in alpha.iter().enumerate() {
        if component.source() != p.object(i) || component.target() != q.object(i) {
            return Err(LiftError::ComponentMismatch { index: i });
        }
    }
    for (&(a, b), p_arrow) in p.cover_arrows() {
        let q_arrow = &q.cover_arrows()[&(a, b)];
        let over = p_arrow.compose(&alpha[b]).expect("arrow endpoints match");
        let under = alpha[a].compose(q_arrow).expect("arrow endpoints match");
        if over != under {
            return Err(LiftError::NotNatural { lower: a, upper: b });
        }
    }
    let mut lifted = Vec::with_capacity(n);
    for i in 0..n {
        let values: Vec<usize> = p_inj
            .origin(i)
            .iter()
            .map(|&(j, e)| {
                q_inj
                    .origin_index(i, (j, alpha[j].apply(e)))
                    .expect("image tag exists below i")
            })
            .collect();
        let source = p_inj.hat().object(i).clone();
        let target = q_inj.hat().object(i).clone();
        match MonotoneFn::new(source, target, values) {
            Ok(f) => lifted.push(f),
            Err(PosetError::NotMonotone { a, b }) => {
                return Err(LiftError::StrictPairCollapse { index: i, a, b });
            }
            Err(_) => return Err(LiftError::ComponentMismatch { index: i }),
        }
    }
    #[cfg(debug_assertions)]
    for i in 0..n {
        let over = lifted[i].compose(q_inj.epsilon(i)).unwrap();
        let under = p_inj.epsilon(i).compose(&alpha[i]).unwrap();
        debug_assert_eq!(over, under, "lift commutes with the surjections");
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn relation_pairs(p: &Poset) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..p.size() {
            for b in 0..p.size() {
                if p.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn from_pairs_closes_and_rejects_cycles() {
        let p = Poset::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(
            Poset::from_pairs(2, &[(0, 1), (1, 0)]),
            Err(PosetError::Cycle { a: 0, b: 1 })
        );
    }

    #[test]
    fn covers_of_a_chain_are_consecutive() {
        assert_eq!(Poset::chain(4).covers(), vec![(0, 1), (1, 2), (2, 3)]);
        assert!(Poset::discrete(3).covers().is_empty());
    }

    #[test]
    fn topological_order_is_stable() {
        let p = Poset::from_pairs(4, &[(2, 0), (3, 1)]).unwrap();
        assert_eq!(p.topological_order(), vec![2, 0, 3, 1]);
    }

    #[test]
    fn reflection_keeps_posets_intact() {
        let r = poset_reflection(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!r.collapsed);
        assert_eq!(r.poset, Poset::chain(3));
        assert_eq!(r.class_of, vec![0, 1, 2]);
        assert!(r.poset.leq(0, 2));
    }

    #[test]
    fn reflection_collapses_two_cycles() {
        let r = poset_reflection(2, &[(0, 1), (1, 0)]).unwrap();
        assert!(r.collapsed);
        assert_eq!(r.poset.size(), 1);
        assert_eq!(r.class_of, vec![0, 0]);
    }

    fn functor_on_chain2(fiber0: Poset, fiber1: Poset, values: Vec<usize>) -> PosetFunctor {
        let arrow = MonotoneFn::new(fiber0.clone(), fiber1.clone(), values).unwrap();
        let mut arrows = BTreeMap::new();
        arrows.insert((0, 1), arrow);
        PosetFunctor::new(Poset::chain(2), vec![fiber0, fiber1], arrows).unwrap()
    }

    #[test]
    fn functor_rejects_path_dependent_arrows() {
        let index = Poset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let fiber = Poset::chain(2);
        let id = MonotoneFn::identity(&fiber);
        let constant = MonotoneFn::new(fiber.clone(), fiber.clone(), vec![0, 0]).unwrap();
        let mut arrows = BTreeMap::new();
        arrows.insert((0, 1), id.clone());
        arrows.insert((0, 2), id.clone());
        arrows.insert((1, 3), constant);
        arrows.insert((2, 3), id);
        assert_eq!(
            PosetFunctor::new(index, vec![fiber.clone(); 4], arrows).unwrap_err(),
            PosetError::PathDependent { lower: 0, upper: 3 }
        );
    }

    #[test]
    fn colimit_of_single_object_is_the_object() {
        let f = PosetFunctor::new(Poset::discrete(1), vec![Poset::chain(3)], BTreeMap::new()).unwrap();
        let col = colimit(&f, &[0]).unwrap();
        assert_eq!(col.poset, Poset::chain(3));
        assert!(col.injective && !col.collapsed);
        assert_eq!(col.cocone[&0], MonotoneFn::identity(&Poset::chain(3)));
    }

    #[test]
    fn colimit_of_injective_span_is_a_pushout() {
        // 1 <- 0 -> 2 with one-point apex included into two 2-chains.
        let index = Poset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        let apex = Poset::chain(1);
        let leg = Poset::chain(2);
        let mut arrows = BTreeMap::new();
        arrows.insert((0, 1), MonotoneFn::new(apex.clone(), leg.clone(), vec![0]).unwrap());
        arrows.insert((0, 2), MonotoneFn::new(apex.clone(), leg.clone(), vec![1]).unwrap());
        let f = PosetFunctor::new(index, vec![apex, leg.clone(), leg], arrows).unwrap();
        let col = colimit(&f, &[0, 1, 2]).unwrap();
        assert_eq!(col.poset.size(), 2 + 2 - 1);
        assert!(col.injective && !col.collapsed);
        // The apex point is glued to the bottom of fiber 1 and top of fiber 2.
        assert_eq!(col.cocone[&0].apply(0), col.cocone[&1].apply(0));
        assert_eq!(col.cocone[&0].apply(0), col.cocone[&2].apply(1));
    }

    #[test]
    fn colimit_of_incomparable_indices_is_a_disjoint_union() {
        let f = PosetFunctor::new(
            Poset::discrete(2),
            vec![Poset::chain(2), Poset::chain(3)],
            BTreeMap::new(),
        )
        .unwrap();
        let col = colimit(&f, &[0, 1]).unwrap();
        assert_eq!(col.poset.size(), 5);
        for x in 0..2 {
            for y in 0..3 {
                let (cx, cy) = (col.cocone[&0].apply(x), col.cocone[&1].apply(y));
                assert!(!col.poset.leq(cx, cy) && !col.poset.leq(cy, cx));
            }
        }
    }

    #[test]
    fn colimit_mediates_competing_cocones() {
        let index = Poset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        let apex = Poset::chain(1);
        let leg = Poset::chain(2);
        let mut arrows = BTreeMap::new();
        arrows.insert((0, 1), MonotoneFn::new(apex.clone(), leg.clone(), vec![0]).unwrap());
        arrows.insert((0, 2), MonotoneFn::new(apex.clone(), leg.clone(), vec![0]).unwrap());
        let f = PosetFunctor::new(index, vec![apex.clone(), leg.clone(), leg.clone()], arrows).unwrap();
        let col = colimit(&f, &[0, 1, 2]).unwrap();
        let tip = Poset::chain(2);
        let mut legs = BTreeMap::new();
        legs.insert(0, MonotoneFn::new(apex, tip.clone(), vec![0]).unwrap());
        legs.insert(1, MonotoneFn::new(leg.clone(), tip.clone(), vec![0, 1]).unwrap());
        legs.insert(2, MonotoneFn::new(leg, tip.clone(), vec![0, 1]).unwrap());
        let m = col.mediating(&legs).unwrap();
        for (&j, leg) in &legs {
            assert_eq!(col.cocone[&j].compose(&m).unwrap(), *leg);
        }
    }

    #[test]
    fn factorize_identity_on_two_chain() {
        let p = MonotoneFn::identity(&Poset::chain(2));
        let fact = factorize_mono_epi(&p);
        assert_eq!(fact.mid.size(), 4);
        let strict: Vec<(usize, usize)> = relation_pairs(&fact.mid);
        assert_eq!(strict, vec![(0, 1), (0, 3), (2, 1), (2, 3)]);
        assert!(fact.mono.is_injective());
        assert!(fact.epi.is_surjective());
        assert_eq!(fact.mono.compose(&fact.epi).unwrap(), p);
    }

    #[test]
    fn factorize_constant_map_has_no_cross_relations() {
        let p = MonotoneFn::new(Poset::chain(2), Poset::chain(1), vec![0, 0]).unwrap();
        let fact = factorize_mono_epi(&p);
        assert_eq!(fact.mid.size(), 3);
        assert_eq!(relation_pairs(&fact.mid), vec![(0, 1)]);
        assert!(fact.epi.is_surjective());
    }

    #[test]
    fn factorize_from_empty_source_is_the_target() {
        let p = MonotoneFn::new(Poset::discrete(0), Poset::chain(2), Vec::new()).unwrap();
        let fact = factorize_mono_epi(&p);
        assert_eq!(fact.mid, Poset::chain(2));
        assert_eq!(fact.epi, MonotoneFn::identity(&Poset::chain(2)));
        assert!(fact.mono.values().is_empty());
    }

    #[test]
    fn injectify_single_index_is_the_identity() {
        let f = PosetFunctor::new(Poset::discrete(1), vec![Poset::chain(2)], BTreeMap::new()).unwrap();
        let inj = injectify(&f).unwrap();
        assert_eq!(inj.hat().object(0), &Poset::chain(2));
        assert_eq!(inj.epsilon(0), &MonotoneFn::identity(&Poset::chain(2)));
        assert_eq!(inj.origin(0), &[(0, 0), (0, 1)]);
    }

    #[test]
    fn injectify_constant_collapse_example() {
        // 2-chain fiber mapped constantly onto a point: the rebuilt fiber
        // keeps the 2-chain alongside an incomparable point.
        let f = functor_on_chain2(Poset::chain(2), Poset::chain(1), vec![0, 0]);
        let inj = injectify(&f).unwrap();
        let hat1 = inj.hat().object(1);
        assert_eq!(hat1.size(), 3);
        assert_eq!(relation_pairs(hat1), vec![(0, 1)]);
        assert_eq!(inj.epsilon(1).values(), &[0, 0, 0]);
        assert_eq!(inj.origin(1), &[(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn injectify_chain_embedding_example() {
        // 2-chain embedded at the endpoints of a 3-chain.
        let f = functor_on_chain2(Poset::chain(2), Poset::chain(3), vec![0, 2]);
        let inj = injectify(&f).unwrap();
        let hat1 = inj.hat().object(1);
        assert_eq!(hat1.size(), 5);
        let mut expected = vec![(0, 1), (0, 3), (0, 4), (2, 1), (2, 3), (2, 4), (3, 1), (3, 4)];
        expected.sort_unstable();
        assert_eq!(relation_pairs(hat1), expected);
        assert_eq!(inj.epsilon(1).values(), &[0, 2, 0, 1, 2]);
        assert!(inj.epsilon(1).is_surjective());
        assert!(inj.hat().cover_arrows()[&(0, 1)].is_injective());
    }

    #[test]
    fn cross_closure_can_order_same_origin_pairs() {
        // An antichain pushed to the two ends of a 3-chain picks up an
        // order between its own copies through the strict cross relations.
        let f = functor_on_chain2(Poset::discrete(2), Poset::chain(3), vec![0, 2]);
        let inj = injectify(&f).unwrap();
        let hat1 = inj.hat().object(1);
        let a = inj.origin_index(1, (0, 0)).unwrap();
        let b = inj.origin_index(1, (0, 1)).unwrap();
        assert!(hat1.lt(a, b));
    }

    #[test]
    fn injectify_reports_non_injective_gluing() {
        // A diamond whose two middle fibers order the same antichain pair
        // in opposite ways; gluing them below the top cannot stay injective.
        let index = Poset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let bottom = Poset::discrete(2);
        let mid = Poset::chain(3);
        let top = Poset::chain(1);
        let mut arrows = BTreeMap::new();
        arrows.insert((0, 1), MonotoneFn::new(bottom.clone(), mid.clone(), vec![0, 2]).unwrap());
        arrows.insert((0, 2), MonotoneFn::new(bottom.clone(), mid.clone(), vec![2, 0]).unwrap());
        arrows.insert((1, 3), MonotoneFn::new(mid.clone(), top.clone(), vec![0, 0, 0]).unwrap());
        arrows.insert((2, 3), MonotoneFn::new(mid.clone(), top.clone(), vec![0, 0, 0]).unwrap());
        let f = PosetFunctor::new(index, vec![bottom, mid.clone(), mid, top], arrows).unwrap();
        assert_eq!(
            injectify(&f).unwrap_err(),
            InjectifyError::NonInjectiveCocone {
                index: 3,
                component: 0
            }
        );
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let f = functor_on_chain2(Poset::chain(2), Poset::chain(1), vec![0, 0]);
        let inj = injectify(&f).unwrap();
        let alpha = vec![
            MonotoneFn::identity(f.object(0)),
            MonotoneFn::identity(f.object(1)),
        ];
        let lifted = lift(&f, &inj, &f, &inj, &alpha).unwrap();
        for (i, component) in lifted.iter().enumerate() {
            assert_eq!(component, &MonotoneFn::identity(inj.hat().object(i)));
        }
    }

    #[test]
    fn lift_over_a_single_index_is_alpha() {
        let p = PosetFunctor::new(Poset::discrete(1), vec![Poset::chain(2)], BTreeMap::new()).unwrap();
        let q = PosetFunctor::new(Poset::discrete(1), vec![Poset::chain(3)], BTreeMap::new()).unwrap();
        let (pi, qi) = (injectify(&p).unwrap(), injectify(&q).unwrap());
        let alpha = vec![MonotoneFn::new(Poset::chain(2), Poset::chain(3), vec![0, 2]).unwrap()];
        assert_eq!(lift(&p, &pi, &q, &qi, &alpha).unwrap(), alpha);
    }

    #[test]
    fn lift_rejects_non_natural_transformations() {
        let f = functor_on_chain2(Poset::chain(2), Poset::chain(2), vec![0, 1]);
        let inj = injectify(&f).unwrap();
        let alpha = vec![
            MonotoneFn::identity(&Poset::chain(2)),
            MonotoneFn::new(Poset::chain(2), Poset::chain(2), vec![0, 0]).unwrap(),
        ];
        assert_eq!(
            lift(&f, &inj, &f, &inj, &alpha).unwrap_err(),
            LiftError::NotNatural { lower: 0, upper: 1 }
        );
    }

    #[test]
    fn lift_rejects_strict_cross_pair_collapse() {
        // p embeds a 2-chain at the ends of a 3-chain; q collapses it to a
        // point over a 1-chain. The middle target point sits strictly
        // between the cross pair in hat(p)(1) but alpha flattens it.
        let p = functor_on_chain2(Poset::chain(2), Poset::chain(3), vec![0, 2]);
        let q = functor_on_chain2(Poset::chain(2), Poset::chain(1), vec![0, 0]);
        let (pi, qi) = (injectify(&p).unwrap(), injectify(&q).unwrap());
        let alpha = vec![
            MonotoneFn::identity(&Poset::chain(2)),
            MonotoneFn::new(Poset::chain(3), Poset::chain(1), vec![0, 0, 0]).unwrap(),
        ];
        let err = lift(&p, &pi, &q, &qi, &alpha).unwrap_err();
        assert!(matches!(err, LiftError::StrictPairCollapse { index: 1, .. }));
    }

    fn rand_poset(rng: &mut ChaCha8Rng, max_size: usize) -> Poset {
        let n = rng.random_range(1..=max_size);
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.random_bool(0.35) {
                    pairs.push((a, b));
                }
            }
        }
        Poset::from_pairs(n, &pairs).unwrap()
    }

    fn rand_monotone(rng: &mut ChaCha8Rng, source: &Poset, target: &Poset) -> MonotoneFn {
        'attempt: for _ in 0..20 {
            let mut values = vec![usize::MAX; source.size()];
            for &x in &source.topological_order() {
                let choices: Vec<usize> = (0..target.size())
                    .filter(|&v| {
                        (0..source.size()).all(|y| {
                            values[y] == usize::MAX || !source.leq(y, x) || target.leq(values[y], v)
                        })
                    })
                    .collect();
                if choices.is_empty() {
                    continue 'attempt;
                }
                values[x] = choices[rng.random_range(0..choices.len())];
            }
            return MonotoneFn::new(source.clone(), target.clone(), values).unwrap();
        }
        let c = rng.random_range(0..target.size());
        MonotoneFn::new(source.clone(), target.clone(), vec![c; source.size()]).unwrap()
    }

    #[test]
    fn factorize_properties_hold_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let source = rand_poset(&mut rng, 6);
            let target = rand_poset(&mut rng, 6);
            let p = rand_monotone(&mut rng, &source, &target);
            let fact = factorize_mono_epi(&p);
            assert!(fact.mono.is_injective());
            assert!(fact.epi.is_surjective());
            assert_eq!(fact.mono.compose(&fact.epi).unwrap(), p);
        }
    }

    /// Forest-shaped index: every element has at most one upper cover, so
    /// functoriality is vacuous and gluing can never identify anything.
    fn rand_forest_functor(rng: &mut ChaCha8Rng) -> PosetFunctor {
        let n = rng.random_range(1..=5);
        let mut pairs = Vec::new();
        for a in 0..n {
            if a + 1 < n && rng.random_bool(0.6) {
                pairs.push((a, rng.random_range(a + 1..n)));
            }
        }
        let index = Poset::from_pairs(n, &pairs).unwrap();
        let objects: Vec<Poset> = (0..n).map(|_| rand_poset(rng, 4)).collect();
        let mut arrows = BTreeMap::new();
        for (a, b) in index.covers() {
            arrows.insert((a, b), rand_monotone(rng, &objects[a], &objects[b]));
        }
        PosetFunctor::new(index, objects, arrows).unwrap()
    }

    fn assert_injectification_invariants(f: &PosetFunctor, inj: &Injectification) {
        let index = f.index();
        for i in 0..index.size() {
            assert!(inj.epsilon(i).is_surjective(), "epsilon {i} surjective");
            let mut expected: Vec<(usize, usize)> = Vec::new();
            for j in index.down_set(i) {
                expected.extend((0..f.object(j).size()).map(|e| (j, e)));
            }
            expected.sort_unstable();
            assert_eq!(inj.origin(i), expected.as_slice(), "carrier identity at {i}");
        }
        for (&(a, b), arrow) in inj.hat().cover_arrows() {
            assert!(arrow.is_injective(), "hat arrow ({a}, {b}) injective");
            let over = arrow.compose(inj.epsilon(b)).unwrap();
            let under = inj.epsilon(a).compose(&f.cover_arrows()[&(a, b)]).unwrap();
            assert_eq!(over, under, "naturality at ({a}, {b})");
        }
    }

    #[test]
    fn injectify_invariants_hold_on_random_forests() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let f = rand_forest_functor(&mut rng);
            let inj = injectify(&f).unwrap();
            assert_injectification_invariants(&f, &inj);
            // Related labels stay related after rebuilding.
            for i in 0..f.index().size() {
                let hat = inj.hat().object(i);
                for (x, &(jx, ex)) in inj.origin(i).iter().enumerate() {
                    for (y, &(jy, ey)) in inj.origin(i).iter().enumerate() {
                        if jx == jy && f.object(jx).leq(ex, ey) {
                            assert!(hat.leq(x, y));
                        }
                    }
                }
            }
        }
    }

    /// Fence-shaped index (even elements minimal, odd elements above their
    /// neighbours), optionally with one top element reached by constant
    /// maps; chain fibers if requested.
    fn rand_fence_functor(rng: &mut ChaCha8Rng, chains: bool, with_top: bool) -> PosetFunctor {
        let k = rng.random_range(1..=2);
        let fence = 2 * k + 1;
        let n = if with_top { fence + 1 } else { fence };
        let mut pairs = Vec::new();
        for j in 0..k {
            pairs.push((2 * j, 2 * j + 1));
            pairs.push((2 * j + 2, 2 * j + 1));
        }
        if with_top {
            for x in 0..fence {
                pairs.push((x, fence));
            }
        }
        let index = Poset::from_pairs(n, &pairs).unwrap();
        let objects: Vec<Poset> = (0..n)
            .map(|_| {
                if chains {
                    Poset::chain(rng.random_range(1..=4))
                } else {
                    rand_poset(rng, 4)
                }
            })
            .collect();
        // One shared constant keeps all composites into the top equal.
        let top_value = with_top.then(|| rng.random_range(0..objects[fence].size()));
        let mut arrows = BTreeMap::new();
        for (a, b) in index.covers() {
            let arrow = if b == fence && with_top {
                let c = top_value.unwrap();
                MonotoneFn::new(objects[a].clone(), objects[b].clone(), vec![c; objects[a].size()])
                    .unwrap()
            } else {
                rand_monotone(rng, &objects[a], &objects[b])
            };
            arrows.insert((a, b), arrow);
        }
        PosetFunctor::new(index, objects, arrows).unwrap()
    }

    #[test]
    fn injectify_on_fences_reports_or_satisfies() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for case in 0..60 {
            let f = rand_fence_functor(&mut rng, false, case % 2 == 0);
            match injectify(&f) {
                Ok(inj) => assert_injectification_invariants(&f, &inj),
                Err(InjectifyError::NonInjectiveCocone { index, .. }) => {
                    assert!(index < f.index().size());
                }
            }
        }
    }

    #[test]
    fn chain_fibers_reflect_same_origin_order_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for case in 0..60 {
            let f = rand_fence_functor(&mut rng, true, case % 2 == 0);
            let inj = injectify(&f).expect("chain fibers glue consistently");
            assert_injectification_invariants(&f, &inj);
            for i in 0..f.index().size() {
                let hat = inj.hat().object(i);
                for (x, &(jx, ex)) in inj.origin(i).iter().enumerate() {
                    for (y, &(jy, ey)) in inj.origin(i).iter().enumerate() {
                        if jx == jy {
                            assert_eq!(hat.leq(x, y), f.object(jx).leq(ex, ey));
                        }
                    }
                }
            }
        }
    }
}

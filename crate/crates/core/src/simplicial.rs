//! Finite ordinals and monotone maps between them.
//!
//! `ord(n)` is the linearly ordered set `{0, ..., n-1}` (so `ord(0)` is
//! empty). Monotone maps between finite ordinals are the arrows of the
//! augmented simplex category; zigzags reindex along them, with the singular
//! levels mapping covariantly and the regular levels contravariantly via
//! [`regularize`].
//!
//! The duality implemented by `regularize` sends `f : ord(n) -> ord(m)` to
//! the endpoint-preserving map `Reg f : ord(m+1) -> ord(n+1)` defined by
//!
//! ```text
//! (Reg f)(i) = min { j in ord(n) | f(j) >= i }, defaulting to n,
//! ```
//!
//! and is characterised by the interleaving `f(j) >= i  iff  j >= (Reg f)(i)`.
//! It is a bijection onto the endpoint-preserving maps and reverses
//! composition order.

use alloc::vec;
use alloc::vec::Vec;

/// Errors raised by monotone map constructors and operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplicialError {
    #[error("values must be weakly increasing, but values[{index}] decreases")]
    NotMonotone { index: usize },
    #[error("values[{index}] = {value} is out of range for target of size {target_size}")]
    OutOfRange {
        index: usize,
        value: usize,
        target_size: usize,
    },
    #[error("cannot compose: first map targets ord({first_target}), second map sources ord({second_source})")]
    CompositionMismatch {
        first_target: usize,
        second_source: usize,
    },
    #[error("an endpoint-preserving map needs source and target of size >= 1")]
    EmptyEndpointMap,
    #[error("an endpoint-preserving map must send 0 to 0 and {last} to {expected}, got {got}")]
    EndpointViolation {
        last: usize,
        expected: usize,
        got: usize,
    },
}

/// A monotone map `ord(source_size) -> ord(target_size)`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotoneMap {
    target_size: usize,
    values: Vec<usize>,
}

impl MonotoneMap {
    /// Builds a map from its dense value table; `values.len()` is the source
    /// size. Fails unless the table is weakly increasing and in range.
    pub fn new(values: Vec<usize>, target_size: usize) -> Result<Self, SimplicialError> {
        for (index, &value) in values.iter().enumerate() {
            if value >= target_size {
                return Err(SimplicialError::OutOfRange {
                    index,
                    value,
                    target_size,
                });
            }
            if index > 0 && values[index - 1] > value {
                return Err(SimplicialError::NotMonotone { index });
            }
        }
        Ok(MonotoneMap {
            target_size,
            values,
        })
    }

    /// The identity on `ord(n)`.
    pub fn identity(n: usize) -> Self {
        MonotoneMap {
            target_size: n,
            values: (0..n).collect(),
        }
    }

    pub fn source_size(&self) -> usize {
        self.values.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn is_identity(&self) -> bool {
        self.source_size() == self.target_size && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Diagrammatic composition: `self` first, then `g`.
    pub fn compose(&self, g: &MonotoneMap) -> Result<MonotoneMap, SimplicialError> {
        if self.target_size != g.source_size() {
            return Err(SimplicialError::CompositionMismatch {
                first_target: self.target_size,
                second_source: g.source_size(),
            });
        }
        Ok(MonotoneMap {
            target_size: g.target_size,
            values: self.values.iter().map(|&i| g.values[i]).collect(),
        })
    }

    /// The preimage of `t` as a half-open range `start..end` of the source.
    /// Monotonicity makes every preimage an interval (possibly empty).
    pub fn preimage(&self, t: usize) -> core::ops::Range<usize> {
        let start = self.values.partition_point(|&v| v < t);
        let end = self.values.partition_point(|&v| v <= t);
        start..end
    }
}

/// An endpoint-preserving monotone map: sends `0` to `0` and top to top.
/// These arise exactly as [`regularize`] of some monotone map and index the
/// regular levels of a zigzag contravariantly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaEqMap(MonotoneMap);

impl DeltaEqMap {
    pub fn new(values: Vec<usize>, target_size: usize) -> Result<Self, SimplicialError> {
        let map = MonotoneMap::new(values, target_size)?;
        if map.source_size() == 0 || map.target_size() == 0 {
            return Err(SimplicialError::EmptyEndpointMap);
        }
        let last = map.source_size() - 1;
        if map.apply(0) != 0 || map.apply(last) != map.target_size() - 1 {
            return Err(SimplicialError::EndpointViolation {
                last,
                expected: map.target_size() - 1,
                got: if map.apply(0) != 0 { map.apply(0) } else { map.apply(last) },
            });
        }
        Ok(DeltaEqMap(map))
    }

    pub fn identity(n: usize) -> Self {
        DeltaEqMap(MonotoneMap::identity(n))
    }

    pub fn as_monotone(&self) -> &MonotoneMap {
        &self.0
    }

    pub fn source_size(&self) -> usize {
        self.0.source_size()
    }

    pub fn target_size(&self) -> usize {
        self.0.target_size()
    }

    pub fn values(&self) -> &[usize] {
        self.0.values()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0.apply(i)
    }

    /// Diagrammatic composition; endpoint preservation is closed under it.
    pub fn compose(&self, g: &DeltaEqMap) -> Result<DeltaEqMap, SimplicialError> {
        Ok(DeltaEqMap(self.0.compose(&g.0)?))
    }
}

/// The regularization dual of `f : ord(n) -> ord(m)`: the endpoint-preserving
/// map `ord(m+1) -> ord(n+1)` with `i -> min { j | f(j) >= i }` (default `n`).
pub fn regularize(f: &MonotoneMap) -> DeltaEqMap {
    let n = f.source_size();
    let values = (0..=f.target_size())
        .map(|i| f.values().partition_point(|&v| v < i))
        .collect::<Vec<_>>();
    debug_assert_eq!(values[0], 0);
    debug_assert_eq!(*values.last().unwrap(), n);
    DeltaEqMap(MonotoneMap {
        target_size: n + 1,
        values,
    })
}

/// Enumerates all monotone maps `ord(n) -> ord(m)` in lexicographic order of
/// their value tables. There are `binomial(n + m - 1, n)` of them.
pub fn enumerate_monotone(n: usize, m: usize) -> Vec<MonotoneMap> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(MonotoneMap {
            target_size: m,
            values: Vec::new(),
        });
        return out;
    }
    if m == 0 {
        return out;
    }
    let mut values = vec![0usize; n];
    loop {
        out.push(MonotoneMap {
            target_size: m,
            values: values.clone(),
        });
        // Advance to the lexicographic successor among weakly increasing tables.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if values[i] + 1 < m {
                let v = values[i] + 1;
                for slot in values.iter_mut().skip(i) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

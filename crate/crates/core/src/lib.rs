//! Layout engine for n-dimensional string diagrams encoded as iterated zigzags.
//!
//! A 0-diagram is a single generator from a signature; an (n+1)-diagram is a
//! zigzag of n-diagrams, i.e. an alternating sequence of regular and singular
//! levels joined by cospans of n-diagram maps. This crate turns such a
//! combinatorial encoding into render-ready geometry:
//!
//! 1. [`diagram`] defines the encoding, validation and the explosion that
//!    unfolds a diagram into a poset of pointwise subdiagrams;
//! 2. [`poset`] makes the resulting poset diagram injective level by level
//!    (the injectification construction), which is what lets distinct strands
//!    occupy distinct coordinates;
//! 3. [`lp`] solves the linear program that picks optimal coordinates and
//!    [`layout`] assembles per-axis solutions into full point coordinates;
//! 4. [`render`] extracts vertices, wires, regions and surfaces and emits SVG
//!    or scene JSON.
//!
//! The crate is `no_std` compatible (requires `alloc`); everything here is
//! deterministic, including all emitted text, so outputs are byte-stable and
//! suitable for golden-file comparison.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod diagram;
pub mod layout;
pub mod lp;
pub mod poset;
pub mod render;
pub mod simplicial;
pub mod zigzag;

pub mod textfmt;

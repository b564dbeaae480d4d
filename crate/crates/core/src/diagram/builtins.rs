//! Bundled example diagrams.
//!
//! Each example carries its own signature so it can be validated, laid
//! out, and rendered without any external input. The constructions here
//! are small enough to write by hand; the tests in the parent module
//! check them against the validator rather than trusting the authors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::simplicial::{regularize, MonotoneMap};

use super::{Diagram, DiagramMap, Generator, Signature};

#[derive(Debug, Clone)]
pub struct BuiltinExample {
    pub name: &'static str,
    pub signature: Signature,
    pub diagram: Diagram,
}

/// Wraps a diagram in a length-one zigzag whose legs are identities,
/// raising its dimension by one without adding content.
pub fn identity_extension(d: &Diagram) -> Diagram {
    Diagram::DiagramN {
        regular: vec![d.clone(), d.clone()],
        singular: vec![d.clone()],
        forward: vec![DiagramMap::identity(d)],
        backward: vec![DiagramMap::identity(d)],
    }
}

fn map0(source: &str, target: &str) -> DiagramMap {
    DiagramMap::Map0 {
        source: String::from(source),
        target: String::from(target),
    }
}

/// A one-dimensional diagram over a constant background: one singular
/// level per listed generator, every leg the evident arrow out of the
/// background.
pub(crate) fn strand_level(background: &str, strands: &[&str]) -> Diagram {
    Diagram::DiagramN {
        regular: vec![Diagram::generator(background); strands.len() + 1],
        singular: strands.iter().map(|s| Diagram::generator(s)).collect(),
        forward: strands.iter().map(|s| map0(background, s)).collect(),
        backward: strands.iter().map(|s| map0(background, s)).collect(),
    }
}

fn generator_of(d: &Diagram) -> &str {
    match d {
        Diagram::Diagram0 { generator } => generator,
        Diagram::DiagramN { .. } => panic!("level maps connect one-dimensional diagrams"),
    }
}

/// The map between one-dimensional diagrams determined by a singular
/// assignment: every slice is forced because the levels are generators.
pub(crate) fn level_map(x: &Diagram, y: &Diagram, values: &[usize]) -> DiagramMap {
    let (x_reg, x_sing, y_reg, y_sing) = match (x, y) {
        (
            Diagram::DiagramN {
                regular: xr,
                singular: xs,
                ..
            },
            Diagram::DiagramN {
                regular: yr,
                singular: ys,
                ..
            },
        ) => (xr, xs, yr, ys),
        _ => panic!("level maps connect one-dimensional diagrams"),
    };
    let singular_map =
        MonotoneMap::new(values.to_vec(), y_sing.len()).expect("builtin singular map is monotone");
    let f_r = regularize(&singular_map);
    let singular_slices = (0..x_sing.len())
        .map(|i| {
            map0(
                generator_of(&x_sing[i]),
                generator_of(&y_sing[singular_map.apply(i)]),
            )
        })
        .collect();
    let regular_slices = (0..y_reg.len())
        .map(|j| map0(generator_of(&x_reg[f_r.apply(j)]), generator_of(&y_reg[j])))
        .collect();
    DiagramMap::MapN {
        singular_map,
        singular_slices,
        regular_slices,
    }
}

fn point_example() -> BuiltinExample {
    BuiltinExample {
        name: "point",
        signature: Signature::new(vec![Generator::new("x", 0)], vec![])
            .expect("point signature is well formed"),
        diagram: Diagram::generator("x"),
    }
}

fn wire_signature() -> Signature {
    Signature::new(
        vec![Generator::new("x", 0), Generator::new("f", 1)],
        vec![(String::from("x"), String::from("f"))],
    )
    .expect("wire signature is well formed")
}

fn wire_example() -> BuiltinExample {
    BuiltinExample {
        name: "wire",
        signature: wire_signature(),
        diagram: strand_level("x", &["f"]),
    }
}

/// The identity 2-diagram on a single wire: a zigzag of length zero whose
/// only level is the wire itself.
fn identity_wire_example() -> BuiltinExample {
    BuiltinExample {
        name: "identity-wire",
        signature: wire_signature(),
        diagram: Diagram::DiagramN {
            regular: vec![strand_level("x", &["f"])],
            singular: vec![],
            forward: vec![],
            backward: vec![],
        },
    }
}

/// Two parallel wires merged into one by the 2-cell m, with identity
/// levels padding the zigzag above the event.
fn monad_example() -> BuiltinExample {
    let signature = Signature::new(
        vec![
            Generator::new("x", 0),
            Generator::new("f", 1),
            Generator::new("m", 2),
        ],
        vec![
            (String::from("x"), String::from("f")),
            (String::from("x"), String::from("m")),
            (String::from("f"), String::from("m")),
        ],
    )
    .expect("monad signature is well formed");
    let two = strand_level("x", &["f", "f"]);
    let one = strand_level("x", &["f"]);
    let event = strand_level("x", &["m"]);
    let diagram = Diagram::DiagramN {
        regular: vec![two.clone(), one.clone(), one.clone(), one.clone()],
        singular: vec![event.clone(), one.clone(), one.clone()],
        forward: vec![
            level_map(&two, &event, &[0, 0]),
            DiagramMap::identity(&one),
            DiagramMap::identity(&one),
        ],
        backward: vec![
            level_map(&one, &event, &[0]),
            DiagramMap::identity(&one),
            DiagramMap::identity(&one),
        ],
    };
    BuiltinExample {
        name: "monad",
        signature,
        diagram,
    }
}

/// The exchange of two scalar 2-cells: stacked one way, merged side by
/// side at the singular level, stacked the other way.
fn eckmann_hilton_example() -> BuiltinExample {
    let signature = Signature::new(
        vec![
            Generator::new("x", 0),
            Generator::new("alpha", 2),
            Generator::new("beta", 2),
        ],
        vec![
            (String::from("x"), String::from("alpha")),
            (String::from("x"), String::from("beta")),
        ],
    )
    .expect("exchange signature is well formed");
    let empty = Diagram::DiagramN {
        regular: vec![Diagram::generator("x")],
        singular: vec![],
        forward: vec![],
        backward: vec![],
    };
    let level_alpha = strand_level("x", &["alpha"]);
    let level_beta = strand_level("x", &["beta"]);
    let level_both = strand_level("x", &["alpha", "beta"]);
    let stacked = |lower: &Diagram, upper: &Diagram| Diagram::DiagramN {
        regular: vec![empty.clone(), empty.clone(), empty.clone()],
        singular: vec![lower.clone(), upper.clone()],
        forward: vec![level_map(&empty, lower, &[]), level_map(&empty, upper, &[])],
        backward: vec![level_map(&empty, lower, &[]), level_map(&empty, upper, &[])],
    };
    let merged = Diagram::DiagramN {
        regular: vec![empty.clone(), empty.clone()],
        singular: vec![level_both.clone()],
        forward: vec![level_map(&empty, &level_both, &[])],
        backward: vec![level_map(&empty, &level_both, &[])],
    };
    let into_merged = |lower: &Diagram, lower_at: usize, upper: &Diagram, upper_at: usize| {
        DiagramMap::MapN {
            singular_map: MonotoneMap::new(vec![0, 0], 1).expect("constant map is monotone"),
            singular_slices: vec![
                level_map(lower, &level_both, &[lower_at]),
                level_map(upper, &level_both, &[upper_at]),
            ],
            regular_slices: vec![DiagramMap::identity(&empty), DiagramMap::identity(&empty)],
        }
    };
    let diagram = Diagram::DiagramN {
        regular: vec![
            stacked(&level_alpha, &level_beta),
            stacked(&level_beta, &level_alpha),
        ],
        singular: vec![merged],
        forward: vec![into_merged(&level_alpha, 0, &level_beta, 1)],
        backward: vec![into_merged(&level_beta, 1, &level_alpha, 0)],
    };
    BuiltinExample {
        name: "eckmann-hilton",
        signature,
        diagram,
    }
}

fn associator_signature() -> Signature {
    Signature::new(
        vec![
            Generator::new("x", 0),
            Generator::new("f", 1),
            Generator::new("m", 2),
            Generator::new("a", 3),
        ],
        vec![
            (String::from("x"), String::from("f")),
            (String::from("x"), String::from("m")),
            (String::from("x"), String::from("a")),
            (String::from("f"), String::from("m")),
            (String::from("f"), String::from("a")),
            (String::from("m"), String::from("a")),
        ],
    )
    .expect("associator signature is well formed")
}

/// The 3-cell mediating the two ways of merging three wires with m: both
/// m events collapse onto a single a event at the singular level.
fn associator_diagram() -> Diagram {
    let w3 = strand_level("x", &["f", "f", "f"]);
    let w2 = strand_level("x", &["f", "f"]);
    let w1 = strand_level("x", &["f"]);
    let mf = strand_level("x", &["m", "f"]);
    let fm = strand_level("x", &["f", "m"]);
    let m_only = strand_level("x", &["m"]);
    let a_only = strand_level("x", &["a"]);
    let source = Diagram::DiagramN {
        regular: vec![w3.clone(), w2.clone(), w1.clone()],
        singular: vec![mf.clone(), m_only.clone()],
        forward: vec![
            level_map(&w3, &mf, &[0, 0, 1]),
            level_map(&w2, &m_only, &[0, 0]),
        ],
        backward: vec![level_map(&w2, &mf, &[0, 1]), level_map(&w1, &m_only, &[0])],
    };
    let target = Diagram::DiagramN {
        regular: vec![w3.clone(), w2.clone(), w1.clone()],
        singular: vec![fm.clone(), m_only.clone()],
        forward: vec![
            level_map(&w3, &fm, &[0, 1, 1]),
            level_map(&w2, &m_only, &[0, 0]),
        ],
        backward: vec![level_map(&w2, &fm, &[0, 1]), level_map(&w1, &m_only, &[0])],
    };
    let apex = Diagram::DiagramN {
        regular: vec![w3.clone(), w1.clone()],
        singular: vec![a_only.clone()],
        forward: vec![level_map(&w3, &a_only, &[0, 0, 0])],
        backward: vec![level_map(&w1, &a_only, &[0])],
    };
    let collapse = |first_level: &Diagram| DiagramMap::MapN {
        singular_map: MonotoneMap::new(vec![0, 0], 1).expect("constant map is monotone"),
        singular_slices: vec![
            level_map(first_level, &a_only, &[0, 0]),
            level_map(&m_only, &a_only, &[0]),
        ],
        regular_slices: vec![DiagramMap::identity(&w3), DiagramMap::identity(&w1)],
    };
    Diagram::DiagramN {
        regular: vec![source, target],
        singular: vec![apex],
        forward: vec![collapse(&mf)],
        backward: vec![collapse(&fm)],
    }
}

fn associator_example() -> BuiltinExample {
    BuiltinExample {
        name: "associator",
        signature: associator_signature(),
        diagram: associator_diagram(),
    }
}

/// The associator padded by one identity step, the smallest interesting
/// four-dimensional input.
fn associator_identity_example() -> BuiltinExample {
    BuiltinExample {
        name: "associator-identity",
        signature: associator_signature(),
        diagram: identity_extension(&associator_diagram()),
    }
}

pub fn builtin_examples() -> Vec<BuiltinExample> {
    vec![
        point_example(),
        wire_example(),
        identity_wire_example(),
        monad_example(),
        eckmann_hilton_example(),
        associator_example(),
        associator_identity_example(),
    ]
}

pub fn builtin_example(name: &str) -> Option<BuiltinExample> {
    builtin_examples().into_iter().find(|e| e.name == name)
}

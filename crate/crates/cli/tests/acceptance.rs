//! Acceptance suite: one test per release criterion, each finishing with a
//! single `[PASS]` line. Every numeric claim is checked against an oracle
//! implemented locally in this file, so the library and the test take
//! independent routes to the same answer.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zigzag_core::diagram::{builtin_example, builtin_examples, explode, Diagram};
use zigzag_core::layout::{
    build_lp, diagram_layout, extend_heights, singular_poset_diagram, zigzag_layout, PairsMode,
};
use zigzag_core::lp::{brute_force, solve, LinearProgram, LowerBound, LpStatus, Relation};
use zigzag_core::poset::{injectify, InjectifyError, MonotoneFn, Poset, PosetFunctor};
use zigzag_core::render::{extract_scene, to_svg, Join};
use zigzag_core::simplicial::{regularize, MonotoneMap};
use zigzag_core::zigzag::{universal_hom, PointIndex, ZObject};

/// All weakly increasing tables of length `n` with values below `m`,
/// generated here so enumeration bugs in the library cannot hide.
fn monotone_tables(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(remaining: usize, floor: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in floor..m {
            prefix.push(v);
            go(remaining - 1, v, m, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        go(n, 0, m, &mut Vec::new(), &mut out);
    }
    out
}

/// The interleaving companion by its defining minimum formula.
fn reg_table(f: &[usize], m: usize) -> Vec<usize> {
    (0..=m)
        .map(|i| f.iter().position(|&v| v >= i).unwrap_or(f.len()))
        .collect()
}

#[test]
fn criterion_1_regularization_is_a_contravariant_bijection() {
    for n in 0..=4usize {
        for m in 0..=4usize {
            let tables = monotone_tables(n, m);
            let mut images = BTreeSet::new();
            for table in &tables {
                let f = MonotoneMap::new(table.clone(), m).unwrap();
                let r = regularize(&f);
                assert_eq!(r.source_size(), m + 1);
                assert_eq!(r.target_size(), n + 1);
                assert_eq!(r.values(), reg_table(table, m).as_slice());
                images.insert(r.values().to_vec());
            }
            assert_eq!(images.len(), tables.len(), "injective on ({n}, {m})");
            let endpoint_preserving: BTreeSet<Vec<usize>> = monotone_tables(m + 1, n + 1)
                .into_iter()
                .filter(|v| v[0] == 0 && v[m] == n)
                .collect();
            assert_eq!(images, endpoint_preserving, "surjective on ({n}, {m})");
        }
    }

    for n in 0..=4usize {
        let id = MonotoneMap::identity(n);
        assert!(regularize(&id).as_monotone().is_identity());
        for m in 0..=4usize {
            for k in 0..=4usize {
                for tf in monotone_tables(n, m) {
                    let f = MonotoneMap::new(tf, m).unwrap();
                    for tg in monotone_tables(m, k) {
                        let g = MonotoneMap::new(tg, k).unwrap();
                        let direct = regularize(&f.compose(&g).unwrap());
                        let swapped = regularize(&g).compose(&regularize(&f)).unwrap();
                        assert_eq!(direct, swapped);
                    }
                }
            }
        }
    }
    println!("[PASS] criterion 1: regularization is a contravariant bijection for n, m <= 4");
}

/// Counts deepest points by summing fibers level by level, the second route
/// to the number of paths an explosion reports.
fn fiber_sum(d: &Diagram, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    match d {
        Diagram::Diagram0 { .. } => unreachable!("depth stays within the dimension"),
        Diagram::DiagramN {
            regular, singular, ..
        } => {
            regular.iter().map(|r| fiber_sum(r, k - 1)).sum::<usize>()
                + singular.iter().map(|s| fiber_sum(s, k - 1)).sum::<usize>()
        }
    }
}

#[test]
fn criterion_2_hom_sets_and_point_counts_match_their_formulas() {
    for n in 0..=3usize {
        for m in 0..=3usize {
            let tables = monotone_tables(n, m);
            let points_of = |length: usize| -> Vec<PointIndex> {
                let mut out: Vec<PointIndex> =
                    (0..=length).map(PointIndex::regular).collect();
                out.extend((0..length).map(PointIndex::singular));
                out
            };
            for a in points_of(n) {
                for b in points_of(m) {
                    let got: Vec<Vec<usize>> =
                        universal_hom(ZObject::new(n, a), ZObject::new(m, b))
                            .unwrap()
                            .iter()
                            .map(|f| f.values().to_vec())
                            .collect();
                    let expected: Vec<Vec<usize>> = tables
                        .iter()
                        .filter(|f| {
                            let reg = reg_table(f, m);
                            match (a, b) {
                                (PointIndex { kind: ks, index: i }, PointIndex { kind: kt, index: j }) => {
                                    use zigzag_core::zigzag::PointKind::*;
                                    match (ks, kt) {
                                        (Singular, Singular) => f[i] == j,
                                        (Singular, Regular) => false,
                                        (Regular, Regular) => reg[j] == i,
                                        (Regular, Singular) => reg[j] <= i && i <= reg[j + 1],
                                    }
                                }
                            }
                        })
                        .cloned()
                        .collect();
                    assert_eq!(got, expected, "hom ({n}, {a}) -> ({m}, {b})");
                }
            }
        }
    }

    for ex in builtin_examples() {
        let n = ex.diagram.dimension();
        for k in 1..=n {
            let exploded = explode(&ex.diagram, k).unwrap();
            assert_eq!(
                exploded.paths().len(),
                fiber_sum(&ex.diagram, k),
                "{} at depth {k}",
                ex.name
            );
        }
    }
    println!("[PASS] criterion 2: hom sets match the filtered enumeration and point counts match the fiber sums");
}

fn rand_poset(rng: &mut ChaCha8Rng, max_size: usize) -> Poset {
    let n = rng.random_range(1..=max_size);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random_bool(0.4) {
                pairs.push((a, b));
            }
        }
    }
    Poset::from_pairs(n, &pairs).unwrap()
}

fn rand_monotone(rng: &mut ChaCha8Rng, source: &Poset, target: &Poset) -> MonotoneFn {
    'attempt: for _ in 0..25 {
        let mut values = vec![usize::MAX; source.size()];
        for x in 0..source.size() {
            let choices: Vec<usize> = (0..target.size())
                .filter(|&v| {
                    (0..source.size()).all(|y| {
                        values[y] == usize::MAX
                            || (!source.leq(y, x) || target.leq(values[y], v))
                                && (!source.leq(x, y) || target.leq(v, values[y]))
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

/// A functor over a random forest (at most one upper cover per element), so
/// arbitrary cover maps always assemble into a functor.
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

/// A functor over a fence with an optional top, the shape layout actually
/// uses; a shared constant map into the top keeps all composites equal.
fn rand_fence_functor(rng: &mut ChaCha8Rng) -> PosetFunctor {
    let k = rng.random_range(1..=2);
    let fence = 2 * k + 1;
    let with_top = rng.random_bool(0.5) && fence < 5;
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
    let objects: Vec<Poset> = (0..n).map(|_| rand_poset(rng, 4)).collect();
    let top_value = with_top.then(|| rng.random_range(0..objects[fence].size()));
    let mut arrows = BTreeMap::new();
    for (a, b) in index.covers() {
        let arrow = if Some(b) == with_top.then_some(fence) {
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

fn check_injectification_invariants(f: &PosetFunctor) {
    let inj = match injectify(f) {
        Ok(inj) => inj,
        Err(InjectifyError::NonInjectiveCocone { index, component }) => {
            // A reported collapse is a legitimate outcome; it just has to
            // name a real index and fiber.
            assert!(index < f.index().size());
            assert!(component < f.index().size());
            return;
        }
    };
    let index = f.index();
    for i in 0..index.size() {
        // Surjective retraction onto the original fiber.
        assert!(inj.epsilon(i).is_surjective(), "epsilon {i} surjective");
        // Carrier of the rebuilt fiber is the tagged disjoint union of
        // every original fiber at or below the index.
        let mut expected: Vec<(usize, usize)> = Vec::new();
        for j in index.down_set(i) {
            expected.extend((0..f.object(j).size()).map(|e| (j, e)));
        }
        expected.sort_unstable();
        assert_eq!(inj.origin(i), expected.as_slice(), "carrier at {i}");
    }
    for (&(a, b), arrow) in inj.hat().cover_arrows() {
        // Injective rebuilt arrows, natural over the originals.
        assert!(arrow.is_injective(), "hat arrow ({a}, {b}) injective");
        let over = arrow.compose(inj.epsilon(b)).unwrap();
        let under = inj.epsilon(a).compose(&f.cover_arrows()[&(a, b)]).unwrap();
        assert_eq!(over, under, "naturality at ({a}, {b})");
    }
}

#[test]
fn criterion_3_injectification_invariants_hold_on_random_diagrams() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    for case in 0..200 {
        let f = if case % 2 == 0 {
            rand_forest_functor(&mut rng)
        } else {
            rand_fence_functor(&mut rng)
        };
        check_injectification_invariants(&f);
    }

    // A diamond whose legs order two copies oppositely, each through a
    // strict intermediate, must be refused with a report, never absorbed.
    let index = Poset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
    let objects = vec![Poset::discrete(2), Poset::chain(3), Poset::chain(3), Poset::chain(2)];
    let mut arrows = BTreeMap::new();
    arrows.insert((0, 1), MonotoneFn::new(objects[0].clone(), objects[1].clone(), vec![0, 2]).unwrap());
    arrows.insert((0, 2), MonotoneFn::new(objects[0].clone(), objects[2].clone(), vec![2, 0]).unwrap());
    arrows.insert((1, 3), MonotoneFn::new(objects[1].clone(), objects[3].clone(), vec![1, 1, 1]).unwrap());
    arrows.insert((2, 3), MonotoneFn::new(objects[2].clone(), objects[3].clone(), vec![1, 1, 1]).unwrap());
    let twisted = PosetFunctor::new(index, objects, arrows).unwrap();
    assert!(matches!(
        injectify(&twisted),
        Err(InjectifyError::NonInjectiveCocone { index: 3, .. })
    ));
    println!("[PASS] criterion 3: injectification invariants hold on 200 random diagrams and collapses are reported");
}

/// A second random-program generator, independent of the one the library's
/// own tests use.
fn rand_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let nvars = rng.random_range(1..=6);
    let nrows = rng.random_range(0..=10);
    let mut lp = LinearProgram::new();
    for v in 0..nvars {
        lp.add_variable(format!("x{v}"), LowerBound::Zero);
    }
    let objective: Vec<(usize, f64)> = (0..nvars)
        .map(|v| (v, rng.random_range(-4..=4) as f64))
        .collect();
    lp.set_objective(&objective).unwrap();
    // Half the programs are built around a known point so feasible cases
    // show up in bulk; the rest are unconstrained coin flips.
    let anchor: Option<Vec<f64>> = rng
        .random_bool(0.5)
        .then(|| (0..nvars).map(|_| rng.random_range(0..=3) as f64).collect());
    for _ in 0..nrows {
        let terms: Vec<(usize, f64)> = (0..nvars)
            .map(|v| (v, rng.random_range(-3..=3) as f64))
            .collect();
        let relation = match rng.random_range(0..4) {
            0 => Relation::Eq,
            1 | 2 => Relation::Le,
            _ => Relation::Ge,
        };
        let constant = match &anchor {
            Some(point) => {
                let lhs: f64 = terms.iter().map(|&(v, c)| c * point[v]).sum();
                let slack = rng.random_range(0..=2) as f64;
                match relation {
                    Relation::Le => lhs + slack,
                    Relation::Eq => lhs,
                    Relation::Ge => lhs - slack,
                }
            }
            None => rng.random_range(-5..=5) as f64,
        };
        lp.add_constraint(&terms, relation, constant).unwrap();
    }
    lp
}

#[test]
fn criterion_4_the_solver_matches_brute_force_on_500_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x501CE);
    let (mut optimal, mut infeasible, mut unbounded) = (0, 0, 0);
    for case in 0..500 {
        let lp = rand_lp(&mut rng);
        let fast = solve(&lp);
        let exact = brute_force(&lp).unwrap();
        assert_eq!(fast.status, exact.status, "case {case}");
        match fast.status {
            LpStatus::Infeasible => infeasible += 1,
            LpStatus::Unbounded => unbounded += 1,
            LpStatus::Optimal => {
                optimal += 1;
                assert!(
                    (fast.objective_value - exact.objective_value).abs() <= 1e-6,
                    "case {case}: {} vs {}",
                    fast.objective_value,
                    exact.objective_value
                );
                assert!(lp.check_feasible(&fast.assignment, 1e-7), "case {case}");
            }
        }
    }
    assert!(
        optimal >= 50 && infeasible >= 50 && unbounded >= 50,
        "lopsided mix: {optimal} optimal, {infeasible} infeasible, {unbounded} unbounded"
    );
    println!("[PASS] criterion 4: solver agrees with brute force on 500 random programs ({optimal} optimal, {infeasible} infeasible, {unbounded} unbounded)");
}

#[test]
fn criterion_5_solved_layouts_satisfy_every_constraint_family() {
    const TOL: f64 = 1e-9;
    for ex in builtin_examples() {
        let n = ex.diagram.dimension();
        for pass in 1..=n {
            let e = explode(&ex.diagram, pass - 1).unwrap();
            let p = singular_poset_diagram(&e).unwrap();
            let inj = injectify(&p).unwrap();
            let program = build_lp(&p, &inj, PairsMode::Cover).unwrap();
            let sol = solve(&program.lp);
            assert_eq!(sol.status, LpStatus::Optimal, "{} pass {pass}", ex.name);
            let w = sol.assignment[program.width_var];
            let hat = inj.hat();
            for i in 0..p.index().size() {
                let object = hat.object(i);
                let v = |x: usize| sol.assignment[program.v[i][x]];
                for x in 0..object.size() {
                    assert!(
                        -TOL <= v(x) && v(x) <= w + TOL,
                        "{} pass {pass}: box at ({i}, {x})",
                        ex.name
                    );
                    for y in 0..object.size() {
                        // Unit separation along the rebuilt fiber order and
                        // along the order the retraction reflects back in.
                        if object.lt(x, y) {
                            assert!(
                                v(y) - v(x) >= 1.0 - TOL,
                                "{} pass {pass}: separation at ({i}, {x} < {y})",
                                ex.name
                            );
                        }
                        if p.object(i).lt(inj.epsilon(i).apply(x), inj.epsilon(i).apply(y)) {
                            assert!(
                                v(y) - v(x) >= 1.0 - TOL,
                                "{} pass {pass}: image separation at ({i}, {x}, {y})",
                                ex.name
                            );
                        }
                    }
                }
            }

            // The extension over regular positions obeys its defining
            // identities to machine precision.
            let (layout, _) = zigzag_layout(&e, PairsMode::Cover).unwrap();
            let lengths: Vec<usize> = e.fibers().iter().map(Diagram::length).collect();
            let extended = extend_heights(&layout, &lengths);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
            for (i, &len) in lengths.iter().enumerate() {
                let lambda = &layout.heights[i];
                let ext = extended.fiber(i);
                if len == 0 {
                    assert_eq!(ext.len(), 1);
                    assert!(close(ext[0], 0.5 * layout.width + 1.0));
                    continue;
                }
                assert_eq!(ext.len(), 2 * len + 1);
                assert!(close(ext[0], 0.0));
                assert!(close(ext[2 * len], layout.width + 2.0));
                for s in 0..len {
                    assert!(close(ext[2 * s + 1], lambda[s] + 1.0));
                }
                for r in 1..len {
                    assert!(close(ext[2 * r], 0.5 * (lambda[r - 1] + lambda[r]) + 1.0));
                }
            }
        }
    }
    println!("[PASS] criterion 5: every solved example satisfies the box, separation and extension identities");
}

#[test]
fn criterion_6_fairness_defects_split_the_examples_as_claimed() {
    let defect = |name: &str| {
        let ex = builtin_example(name).unwrap();
        diagram_layout(&ex.diagram, PairsMode::Cover)
            .unwrap()
            .total_defect()
    };
    assert!(defect("monad").abs() <= 1e-9);
    assert!(defect("eckmann-hilton").abs() <= 1e-9);
    assert!(defect("associator") > 1e-6);
    println!("[PASS] criterion 6: monad and exchange lay out fairly, the associator provably cannot");
}

/// Splits an SVG path's coordinate pairs and returns them in order.
fn path_pairs(svg: &str, wire: usize) -> Vec<String> {
    let marker = format!("id=\"wire-{wire}\"");
    let line = svg
        .lines()
        .find(|l| l.contains(&marker))
        .unwrap_or_else(|| panic!("wire {wire} missing"));
    let data = line.split(" d=\"").nth(1).unwrap().split('"').next().unwrap();
    data.split_whitespace()
        .filter(|t| t.contains(','))
        .map(str::to_string)
        .collect()
}

#[test]
fn criterion_7_fair_layouts_draw_every_strand_at_constant_x() {
    let mut checked = 0;
    for ex in builtin_examples() {
        if ex.diagram.dimension() != 2 {
            continue;
        }
        let layout = diagram_layout(&ex.diagram, PairsMode::Cover).unwrap();
        if layout.total_defect() > 1e-9 {
            continue;
        }
        let scene = extract_scene(&ex.diagram, &layout, &ex.signature).unwrap();
        let svg = to_svg(&scene, 40.0).unwrap();
        for (k, wire) in scene.wires.iter().enumerate() {
            let pairs = path_pairs(&svg, k);
            // Map each height sample to its coordinate pair; smooth joins
            // contribute two control pairs in between.
            let mut pair_of_sample = vec![0usize];
            for join in &wire.joins {
                let step = match join {
                    Join::Line => 1,
                    Join::Smooth => 3,
                };
                pair_of_sample.push(pair_of_sample.last().unwrap() + step);
            }
            assert_eq!(*pair_of_sample.last().unwrap() + 1, pairs.len());
            let (start, end) = wire.core;
            let x_of = |pair: &String| pair.split(',').next().unwrap().to_string();
            let expected = x_of(&pairs[pair_of_sample[start]]);
            for pair in &pairs[pair_of_sample[start]..=pair_of_sample[end]] {
                assert_eq!(x_of(pair), expected, "{} wire {k}", ex.name);
            }
            if end > start {
                checked += 1;
            }
        }
    }
    assert!(checked > 0, "no multi-sample strands were checked");
    println!("[PASS] criterion 7: every strand of a fair layout keeps one x across its height samples ({checked} multi-sample)");
}

#[test]
fn criterion_8_rendering_is_deterministic_and_matches_the_golden_files() {
    let golden = |file: &str| {
        let path = format!("{}/tests/golden/{file}", env!("CARGO_MANIFEST_DIR"));
        std::fs::read(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
    };
    let render = |name: &str| {
        Command::new(env!("CARGO_BIN_EXE_zigzag"))
            .args(["render", name])
            .output()
            .expect("binary runs")
    };
    let goldens: BTreeMap<&str, &str> = [
        ("identity-wire", "identity-wire.svg"),
        ("monad", "monad.svg"),
        ("eckmann-hilton", "eckmann-hilton.json"),
        ("associator", "associator.json"),
        ("associator-identity", "associator-identity.json"),
    ]
    .into_iter()
    .collect();
    for ex in builtin_examples() {
        let first = render(ex.name);
        let second = render(ex.name);
        assert_eq!(first.stdout, second.stdout, "{} stdout", ex.name);
        assert_eq!(first.stderr, second.stderr, "{} stderr", ex.name);
        assert_eq!(first.status.code(), second.status.code(), "{}", ex.name);
        match goldens.get(ex.name) {
            Some(file) => {
                assert!(first.status.success());
                assert_eq!(first.stdout, golden(file), "{} golden", ex.name);
            }
            None => {
                // Dimensions without a drawable form still fail identically.
                assert_eq!(first.status.code(), Some(1), "{}", ex.name);
                assert!(!first.stderr.is_empty());
            }
        }
    }
    println!("[PASS] criterion 8: renders are byte-identical across runs and match the golden files");
}

#[test]
fn criterion_9_a_four_dimensional_diagram_lays_out_and_keyframes() {
    let ex = builtin_example("associator-identity").unwrap();
    assert_eq!(ex.diagram.dimension(), 4);
    let layout = diagram_layout(&ex.diagram, PairsMode::Cover).unwrap();
    let scene = extract_scene(&ex.diagram, &layout, &ex.signature).unwrap();
    assert_eq!(scene.frames.len(), 2 * ex.diagram.length() + 1);
    for pair in scene.frames.windows(2) {
        assert!(pair[0].time < pair[1].time);
    }
    println!(
        "[PASS] criterion 9: the four-dimensional extension lays out and emits {} keyframes",
        scene.frames.len()
    );
}

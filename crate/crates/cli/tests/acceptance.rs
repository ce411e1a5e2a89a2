//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `UNATTAINABLE` ask for values that disagree with the
//! exact definitions; they are evaluated as written and must fail for exactly
//! the documented reason. Any other failure makes the target fail.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use flagram::algebra::{density_table, objective_vector, product_expand, AveragingOperator, DensityTable, ProductTable};
use flagram::certify::{certified_delta, ramsey_bound, verify_psd_exact, RatMatrix};
use flagram::enumerate::{enumerate_levels, flags_from_basis, injections, types_from_levels, Basis, Flag, Limits, TypeSigma};
use flagram::model::{canonical_key, canonical_key_labeled, is_admissible, ColoredGraph, RamseyProblem};
use flagram::pipeline::{check_witness, parse_coloring};
use flagram::rational::{format as fmt_q, int, parse as parse_q, ratio, Rational};
use flagram::sdp::{assemble, export_sdpa, parse_sdpa, parse_solution, Assembly};
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const UNATTAINABLE: &[u32] = &[1, 2];

const R33: &str = "colors 2\ncolorblind 1,2\nforbid 1: 1-2,2-3,1-3\nforbid 2: 1-2,2-3,1-3\nflag_order 4\nell 2\n";
const R34: &str = "colors 2\nforbid 1: 1-2,2-3,1-3\nforbid 2: 1-2,1-3,1-4,2-3,2-4,3-4\nflag_order 5\nell 2\n";
const C5: &str = "# pentagon in color 1, pentagram in color 2\norder 5\n- 1 2 2 1\n1 - 1 2 2\n2 1 - 1 2\n2 2 1 - 1\n1 2 2 1 -\n";

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(format!("ok: {what}"));
        } else {
            self.failures.push(what);
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("r33.txt", R33);
        f.write("r34.txt", R34);
        f.write("c5.txt", C5);
        f.write("circulant8.txt", &circulant8_text());
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn cli(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_flagram"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .expect("binary runs")
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn machine_field(text: &str, key: &str) -> Option<String> {
    let block = text.split("[report]").nth(1)?.split("[/report]").next()?;
    block
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .map(str::to_string)
}

fn r33() -> RamseyProblem {
    R33.parse().unwrap()
}

fn r34() -> RamseyProblem {
    R34.parse().unwrap()
}

fn circulant8_text() -> String {
    let mut text = String::from("# Z_8 circulant: color 1 on differences 1, 4, 7\norder 8\n");
    for u in 0..8i32 {
        let row: Vec<&str> = (0..8i32)
            .map(|v| match (u - v).rem_euclid(8) {
                0 => "-",
                1 | 4 | 7 => "1",
                _ => "2",
            })
            .collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    text
}

/// The seven admissible graphs on four vertices, in the hand order used by
/// the displayed table.
fn named_graphs() -> Vec<ColoredGraph> {
    vec![
        ColoredGraph::with_edges(4, &[(0, 2, 1), (1, 2, 1), (0, 3, 2), (1, 3, 2), (2, 3, 1)]),
        ColoredGraph::with_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1), (0, 2, 2), (1, 3, 2)]),
        ColoredGraph::with_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 2, 2), (1, 3, 2), (0, 3, 2)]),
        ColoredGraph::with_edges(4, &[(0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1), (2, 3, 2)]),
        ColoredGraph::with_edges(4, &[(0, 3, 1), (1, 3, 1), (2, 3, 1)]),
        ColoredGraph::with_edges(4, &[(0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)]),
        ColoredGraph::empty(4),
    ]
}

fn flag3(p: &RamseyProblem, sigma: &TypeSigma, to0: u8, to1: u8) -> Flag {
    Flag::new(&sigma.graph().extend(&[to0, to1]), &[0, 1], sigma, &p.classes).unwrap()
}

fn oracle_product(p: &RamseyProblem, top: &Basis, sigma: &TypeSigma, a: &Flag, b: &Flag) -> Vec<Rational> {
    top.graphs()
        .iter()
        .map(|h| {
            let (mut hits, mut trials) = (0i64, 0i64);
            for theta in injections(4, 2) {
                let rest: Vec<usize> = (0..4).filter(|v| !theta.contains(v)).collect();
                for (x, y) in [(rest[0], rest[1]), (rest[1], rest[0])] {
                    trials += 1;
                    if canonical_key_labeled(&h.induced(&theta), 2, &p.classes) != *sigma.key() {
                        continue;
                    }
                    let fa = canonical_key_labeled(&h.induced(&[theta[0], theta[1], x]), 2, &p.classes);
                    let fb = canonical_key_labeled(&h.induced(&[theta[0], theta[1], y]), 2, &p.classes);
                    if fa == *a.key() && fb == *b.key() {
                        hits += 1;
                    }
                }
            }
            ratio(hits, trials)
        })
        .collect()
}

fn dense(v: &[(usize, Rational)], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, q) in v {
        out[*i] = q.clone();
    }
    out
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let p = r33();
    let levels = enumerate_levels(&p, 4, &Limits::default()).unwrap();
    o.check(levels[4].len() == 7, format!("graphs on 4 vertices: {} (expected 7)", levels[4].len()));
    let types = types_from_levels(&p, 2, &levels);
    o.check(types.len() == 2, format!("types of size 2: {} (expected 2)", types.len()));
    for sigma in &types {
        let flags = flags_from_basis(&p, sigma, &levels[3]).unwrap();
        let is_edge = sigma.graph().color(0, 1) != 0;
        let expected = if is_edge { 4 } else { 2 };
        let name = if is_edge { "sigma1" } else { "sigma0" };
        o.check(
            flags.len() == expected,
            format!("{name}-flags on 3 vertices: {} (expected {expected})", flags.len()),
        );
        if is_edge {
            let listing: Vec<String> = flags
                .iter()
                .map(|f| format!("({},{})", f.graph().color(0, 2), f.graph().color(1, 2)))
                .collect();
            o.note(format!("sigma1-flags by colors to the roots: {}", listing.join(" ")));
        }
    }
    o
}

fn known_failure_1(o: &Outcome) -> bool {
    o.failures.len() == 1 && o.failures[0].starts_with("sigma1-flags on 3 vertices: 5 ")
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let p = r33();
    let levels = enumerate_levels(&p, 4, &Limits::default()).unwrap();
    let top = &levels[4];
    let named: Vec<usize> = named_graphs().iter().map(|g| top.find(g, &p.classes).unwrap()).collect();

    let obj = objective_vector(&p, &levels[2], top).unwrap();
    let want: Vec<Rational> = [1, 0, 0, 1, 3, 2, 6].iter().map(|&v| ratio(v, 6)).collect();
    let got: Vec<Rational> = named.iter().map(|&h| obj[h].clone()).collect();
    o.check(got == want, "objective equals (1/6)(1,0,0,1,3,2,6)");

    let edge = TypeSigma::new(ColoredGraph::with_edges(2, &[(0, 1, 1)]), &p.classes);
    let non_edge = TypeSigma::new(ColoredGraph::empty(2), &p.classes);
    let table = |sigma: &TypeSigma| {
        let flags = flags_from_basis(&p, sigma, &levels[3]).unwrap();
        let op = AveragingOperator::new(&p, sigma, top);
        ProductTable::build(flags, &op, &p.classes).unwrap()
    };
    let (te, tn) = (table(&edge), table(&non_edge));

    let mut exhaustive = true;
    for (sigma, t) in [(&edge, &te), (&non_edge, &tn)] {
        for i in 0..t.dim() {
            for j in 0..t.dim() {
                let raw = oracle_product(&p, top, sigma, &t.flags[i], &t.flags[j]);
                exhaustive &= dense(t.get(i, j), top.len()) == raw;
            }
        }
    }
    o.check(exhaustive, "every table entry, including all zeros, equals the brute-force count");

    let f = |sigma: &TypeSigma, a, b| flag3(&p, sigma, a, b);
    let (f11, f12, f13, f14) = (f(&edge, 1, 2), f(&edge, 2, 1), f(&edge, 1, 0), f(&edge, 0, 1));
    let (f01, f02) = (f(&non_edge, 0, 0), f(&non_edge, 1, 1));
    let rows: Vec<(&str, &ProductTable, &Flag, &Flag, Vec<(usize, i64)>)> = vec![
        ("f11 f11", &te, &f11, &f11, vec![(0, 1)]),
        ("f11 f12", &te, &f11, &f12, vec![(1, 8), (2, 4)]),
        ("f11 f13", &te, &f11, &f13, vec![(0, 2)]),
        ("f11 f14", &te, &f11, &f14, vec![(3, 4)]),
        ("f13 f13", &te, &f13, &f13, vec![(4, 3)]),
        ("f13 f14", &te, &f13, &f14, vec![(5, 8)]),
        ("f01 f01", &tn, &f01, &f01, vec![(6, 12)]),
        ("f01 f02", &tn, &f01, &f02, vec![(4, 3)]),
        ("f02 f02", &tn, &f02, &f02, vec![(0, 2), (3, 2), (5, 4)]),
    ];
    let mut halved_matches = 0;
    for (name, t, a, b, terms) in &rows {
        let i = t.flags.iter().position(|x| x == *a).unwrap();
        let j = t.flags.iter().position(|x| x == *b).unwrap();
        let computed: Vec<Rational> = named
            .iter()
            .map(|&h| dense(t.get(i, j), top.len())[h].clone() * int(24))
            .collect();
        let mut expected = vec![Rational::zero(); 7];
        for &(h, v) in terms {
            expected[h] = int(v);
        }
        let shown = |v: &[Rational]| v.iter().map(fmt_q).collect::<Vec<_>>().join(",");
        o.check(
            computed == expected,
            format!("row {name} x24: computed [{}], displayed [{}]", shown(&computed), shown(&expected)),
        );
        let factor = if i == j { ratio(1, 2) } else { Rational::one() };
        if computed.iter().map(|v| v * &factor).collect::<Vec<_>>() == expected {
            halved_matches += 1;
        }
    }
    o.note(format!(
        "with diagonal rows halved, {halved_matches} of 9 displayed rows match the exact values"
    ));
    o
}

fn known_failure_2(o: &Outcome) -> bool {
    let mut rows: Vec<&str> = o
        .failures
        .iter()
        .filter_map(|f| f.strip_prefix("row ").map(|r| &r[..7]))
        .collect();
    rows.sort_unstable();
    o.failures.len() == 5 && rows == ["f01 f01", "f01 f02", "f02 f02", "f11 f11", "f13 f13"]
}

fn hand_matrices(asm: &Assembly) -> Vec<RatMatrix> {
    let b0 = asm.types.iter().position(|t| t.graph().color(0, 1) == 0).unwrap();
    let b1 = 1 - b0;
    let pos = |b: usize, to0, to1| {
        let f = flag3(&asm.problem, &asm.types[b], to0, to1);
        asm.flags[b].iter().position(|x| *x == f).unwrap()
    };
    let embed = |values: &[&[i64]], at: &[usize], dim: usize, scale: i64| {
        let mut out = vec![vec![Rational::zero(); dim]; dim];
        for (a, &i) in at.iter().enumerate() {
            for (b, &j) in at.iter().enumerate() {
                out[i][j] = ratio(values[a][b], scale);
            }
        }
        out
    };
    let mut mats = vec![Vec::new(), Vec::new()];
    mats[b0] = embed(&[&[16, -4], &[-4, 1]], &[pos(b0, 0, 0), pos(b0, 1, 1)], 2, 20);
    mats[b1] = embed(
        &[
            &[126, -48, -73, -5],
            &[-48, 126, -5, -73],
            &[-73, -5, 64, 14],
            &[-5, -73, 14, 64],
        ],
        &[pos(b1, 1, 2), pos(b1, 2, 1), pos(b1, 1, 0), pos(b1, 0, 1)],
        5,
        80,
    );
    mats
}

fn criterion_3() -> (Outcome, Option<Rational>) {
    let mut o = Outcome::new();
    let p = r33();
    let asm = assemble(&p).unwrap();
    let mats = hand_matrices(&asm);
    for (b, m) in mats.iter().enumerate() {
        o.check(verify_psd_exact(m).unwrap(), format!("block {} ({}x{}) is PSD", b + 1, m.len(), m.len()));
    }
    let (delta, slack) = certified_delta(&asm.sdp, &mats).unwrap();
    o.check(delta == ratio(1, 5), format!("certified delta = {}", fmt_q(&delta)));
    let obj = objective_vector(&p, &asm.levels[2], &asm.levels[4]).unwrap();
    let surplus: Vec<(usize, Rational)> = slack
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != delta)
        .map(|(h, s)| (h, s - &delta))
        .collect();
    o.check(
        surplus.len() == 1 && surplus[0].1 == ratio(1, 5) && obj[surplus[0].0].is_zero(),
        format!(
            "slack surplus {:?} sits on the graph with objective coefficient 0",
            surplus.iter().map(|(h, s)| format!("H#{h}:{}", fmt_q(s))).collect::<Vec<_>>()
        ),
    );
    let bound = ramsey_bound(&ratio(1, 5), 2).unwrap();
    o.check(bound == 6, format!("ramsey_bound(1/5, 2) = {bound}"));
    (o, Some(delta))
}

fn criterion_4(fx: &Fixture) -> (Outcome, Vec<Rational>) {
    let mut o = Outcome::new();
    let out = fx.cli(&["bound", "r33.txt", "--certificate", "r33.cert"]);
    o.check(out.status.success(), format!("`bound` exits with {}", out.status));
    let text = stdout(&out);
    let lambda: f64 = machine_field(&text, "lambda").and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
    o.check(lambda >= 0.17, format!("solver lambda = {lambda:.10} >= 0.17"));
    let delta = machine_field(&text, "delta").and_then(|v| parse_q(&v));
    let bound: Option<u64> = machine_field(&text, "bound").and_then(|v| v.parse().ok());
    match &delta {
        Some(d) => o.check(*d > ratio(1, 6), format!("certified delta = {} > 1/6", fmt_q(d))),
        None => o.check(false, "report carries a certified delta"),
    }
    o.check(bound.is_some_and(|b| b <= 6), format!("reported bound R <= {bound:?}, at most 6"));
    let verify = fx.cli(&["verify", "r33.cert", "r33.txt"]);
    o.check(verify.status.success(), "`verify` accepts the written certificate");
    (o, delta.into_iter().collect())
}

fn criterion_5(fx: &Fixture, r33_deltas: &[Rational]) -> Outcome {
    let mut o = Outcome::new();
    let c5 = check_witness(&r33(), &parse_coloring(C5).unwrap()).unwrap();
    o.check(c5 == ratio(1, 5), format!("check_witness(C5) = {}", fmt_q(&c5)));
    let cli = stdout(&fx.cli(&["witness", "r33.txt", "c5.txt"]));
    o.check(cli.contains("= 1/5"), "`witness` prints 1/5 for the pentagon coloring");
    o.check(!r33_deltas.is_empty(), "criterion 4 runs produced certified deltas");
    for d in r33_deltas {
        o.check(*d <= c5, format!("certified delta {} <= 1/5", fmt_q(d)));
    }

    let witness = check_witness(&r34(), &parse_coloring(&circulant8_text()).unwrap()).unwrap();
    o.check(witness == ratio(1, 8), format!("8-vertex circulant witness density = {}", fmt_q(&witness)));
    let cli = stdout(&fx.cli(&["witness", "r34.txt", "circulant8.txt"]));
    o.check(cli.contains("= 1/8"), "`witness` prints 1/8 for the circulant");
    let out = fx.cli(&["bound", "r34.txt"]);
    o.check(out.status.success(), format!("`bound` on the triangle/K4 problem exits with {}", out.status));
    let text = stdout(&out);
    match machine_field(&text, "delta").and_then(|v| parse_q(&v)) {
        Some(d) => o.check(d <= witness, format!("certified delta {} ~ {:.6} <= 1/8", fmt_q(&d), flagram::rational::to_f64(&d))),
        None => o.check(false, "triangle/K4 report carries a certified delta"),
    }
    let bound: Option<u64> = machine_field(&text, "bound").and_then(|v| v.parse().ok());
    o.check(bound.is_some_and(|b| b >= 9), format!("reported bound {bound:?} >= 9"));
    o
}

fn level_problem(base: &RamseyProblem, n: usize) -> RamseyProblem {
    let mut p = base.clone();
    p.flag_order = n;
    p
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for (name, base) in [("R(3,3)", r33()), ("R(3,4)", r34())] {
        let p = level_problem(&base, 5);
        let levels = enumerate_levels(&p, 5, &Limits::default()).unwrap();
        let sizes: Vec<usize> = levels.iter().map(Basis::len).collect();
        o.note(format!("{name}: basis sizes by order {sizes:?}"));

        let mut tables: BTreeMap<(usize, usize), DensityTable> = BTreeMap::new();
        for m in 1..=5 {
            for n in m..=5 {
                tables.insert((m, n), density_table(&p, &levels[m], &levels[n]).unwrap());
            }
        }
        let normalized = tables
            .iter()
            .all(|(&(_, n), t)| (0..levels[n].len()).all(|j| t.column_sum(j).is_one()));
        o.check(normalized, format!("{name}: every density column sums to 1"));

        let mut chain = true;
        for m in 1..=5 {
            for mid in m..=5 {
                for n in mid..=5 {
                    let (lo, hi, direct) = (&tables[&(m, mid)], &tables[&(mid, n)], &tables[&(m, n)]);
                    for h in 0..levels[m].len() {
                        for g in 0..levels[n].len() {
                            let via: Rational = (0..levels[mid].len())
                                .map(|k| &lo.row(h)[k] * &hi.row(k)[g])
                                .sum();
                            chain &= via == direct.row(h)[g];
                        }
                    }
                }
            }
        }
        o.check(chain, format!("{name}: chain rule holds for all orders m <= m' <= n <= 5"));

        let mut symmetric = true;
        let mut pairs = 0;
        for s in [1, 3] {
            for sigma in types_from_levels(&p, s, &levels) {
                let flags = flags_from_basis(&p, &sigma, &levels[(5 + s) / 2]).unwrap();
                let op = AveragingOperator::new(&p, &sigma, &levels[5]);
                for a in &flags {
                    for b in &flags {
                        pairs += 1;
                        symmetric &= product_expand(a, b, &op.flags, &p.classes).unwrap()
                            == product_expand(b, a, &op.flags, &p.classes).unwrap();
                    }
                }
            }
        }
        o.check(symmetric, format!("{name}: product symmetry over {pairs} flag pairs"));

        let colorings = p.classes.permutations();
        let mut invariant = true;
        for _ in 0..1000 {
            let n = rng.gen_range(1..=5);
            let g = levels[n].graph(rng.gen_range(0..levels[n].len()));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let recolor = colorings.choose(&mut rng).unwrap();
            let moved = g.induced(&order).recolor(recolor);
            invariant &= canonical_key(&moved, &p.classes) == canonical_key(g, &p.classes);
        }
        o.check(invariant, format!("{name}: keys invariant under 1000 random vertex/color permutations"));

        let mut hereditary = true;
        for n in 2..=5 {
            for g in levels[n].graphs() {
                hereditary &= is_admissible(g, &p);
                for drop in 0..n {
                    let keep: Vec<usize> = (0..n).filter(|&v| v != drop).collect();
                    let sub = g.induced(&keep);
                    hereditary &= is_admissible(&sub, &p) && levels[n - 1].find(&sub, &p.classes).is_some();
                }
            }
        }
        o.check(hereditary, format!("{name}: every vertex-deleted subgraph is admissible and enumerated"));
    }
    o
}

const HAND_SOLUTION: &str = "\
0.2 0.2 0.2 0.2 0.2 0.2 0.2
1 3 2 2 0.25
2 1 1 1 0.8
2 1 1 2 -0.2
2 1 2 2 0.05
2 2 1 1 1.5
2 2 1 3 -0.875
2 2 2 4 -0.0625
2 2 5 5 0.0009765625
2 3 1 1 0.2
2 3 2 2 0.2
";

fn criterion_7(fx: &Fixture) -> Outcome {
    let mut o = Outcome::new();
    let threads = ["1", "2", "3", "4", "8"];
    let exports: Vec<Vec<u8>> = threads
        .iter()
        .map(|t| {
            let out = fx.cli(&["--threads", t, "export", "r33.txt", "-o", "out.dat-s"]);
            assert!(out.status.success());
            std::fs::read(fx.path("out.dat-s")).unwrap()
        })
        .collect();
    o.check(
        exports.windows(2).all(|w| w[0] == w[1]),
        "five exports (1, 2, 3, 4 and 8 threads) are byte-identical",
    );
    let text = String::from_utf8(exports[0].clone()).unwrap();
    let asm = assemble(&r33()).unwrap();
    let parsed = parse_sdpa(&text).unwrap();
    o.check(
        parsed.same_program(&asm.sdp.standard_form()),
        "parsing the export recovers the program",
    );
    o.check(export_sdpa(&parsed) == text, "re-exporting the parsed program reproduces the file");

    let sol = parse_solution(HAND_SOLUTION, &asm.sdp).unwrap();
    let expect0 = [[0.8, -0.2], [-0.2, 0.05]];
    let block0 = &sol.matrices[0];
    let ok0 = block0.shape() == (2, 2) && (0..2).all(|i| (0..2).all(|j| block0[(i, j)] == expect0[i][j]));
    let block1 = &sol.matrices[1];
    let mut expect1 = [[0.0; 5]; 5];
    for (i, j, v) in [(0, 0, 1.5), (0, 2, -0.875), (1, 3, -0.0625), (4, 4, 0.0009765625)] {
        expect1[i][j] = v;
        expect1[j][i] = v;
    }
    let ok1 = block1.shape() == (5, 5) && (0..5).all(|i| (0..5).all(|j| block1[(i, j)] == expect1[i][j]));
    o.check(
        asm.sdp.block_dims() == [2, 5] && ok0 && ok1 && sol.lambda == 0.2,
        "the hand-written solution parses to the matrices it encodes, lambda 0.2",
    );
    fx.write("hand.sol", HAND_SOLUTION);
    let import = fx.cli(&["import", "r33.txt", "--solution", "hand.sol"]);
    o.check(
        import.status.success() && stdout(&import).contains("lambda = 0.2"),
        "`import` reads the hand-written solution",
    );
    let truncated = HAND_SOLUTION.replace("2 2 5 5", "2 2 6 6");
    let bad = fx.write("bad.sol", &truncated);
    let rejected = fx.cli(&["import", "r33.txt", "--solution", bad.to_str().unwrap()]);
    o.check(rejected.status.code() == Some(2), "an out-of-range entry is rejected with exit code 2");
    o
}

fn report(id: u32, title: &str, limit: Option<Duration>, elapsed: Duration, o: &Outcome) -> bool {
    let late = limit.is_some_and(|l| elapsed > l);
    let pass = o.failures.is_empty() && !late;
    let verdict = if pass { "PASS" } else { "FAIL" };
    let limit = limit.map_or("none".to_string(), |l| format!("{} s", l.as_secs()));
    println!("{verdict} criterion {id}: {title} ({:.3} s, limit {limit})", elapsed.as_secs_f64());
    for f in &o.failures {
        println!("    failed: {f}");
    }
    if late {
        println!("    failed: runtime over the limit");
    }
    for n in &o.notes {
        println!("    {n}");
    }
    pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() {
    let fx = Fixture::new();
    let mut unexpected = Vec::new();
    let mut record = |id: u32, pass: bool, documented: bool| {
        if UNATTAINABLE.contains(&id) {
            if pass {
                println!("    note: criterion {id} is listed as unattainable but passed");
            } else if !documented {
                unexpected.push(id);
            } else {
                println!("    expected failure: the displayed values differ from the exact definitions");
            }
        } else if !pass {
            unexpected.push(id);
        }
    };

    let (o, t) = timed(criterion_1);
    let pass = report(1, "enumeration golden counts", Some(Duration::from_secs(1)), t, &o);
    record(1, pass, known_failure_1(&o) && t <= Duration::from_secs(1));

    let (o, t) = timed(criterion_2);
    let pass = report(2, "objective vector and displayed product rows", Some(Duration::from_secs(1)), t, &o);
    record(2, pass, known_failure_2(&o) && t <= Duration::from_secs(1));

    let ((o, replay_delta), t) = timed(criterion_3);
    let pass = report(3, "exact certificate replay", Some(Duration::from_secs(1)), t, &o);
    record(3, pass, false);

    let ((o, mut deltas), t) = timed(|| criterion_4(&fx));
    let pass = report(4, "end-to-end bound with the internal solver", Some(Duration::from_secs(10)), t, &o);
    record(4, pass, false);
    deltas.extend(replay_delta);

    let (o, t) = timed(|| criterion_5(&fx, &deltas));
    let pass = report(5, "soundness against witnesses", Some(Duration::from_secs(120)), t, &o);
    record(5, pass, false);

    let (o, t) = timed(criterion_6);
    let pass = report(6, "property suite up to order 5", Some(Duration::from_secs(120)), t, &o);
    record(6, pass, false);

    let (o, t) = timed(|| criterion_7(&fx));
    let pass = report(7, "SDPA and solution-file interop", None, t, &o);
    record(7, pass, false);

    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance failures: {unexpected:?}");
        std::process::exit(1);
    }
}

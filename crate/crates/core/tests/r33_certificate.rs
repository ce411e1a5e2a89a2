//! End-to-end checks on the two-color triangle problem at order 4: the
//! hand-made certificate, the internal solver and certificate files.

use flagram::certify::{certified_delta, certify, ramsey_bound, verify_psd_exact, Certificate, RatMatrix};
use flagram::enumerate::{Flag, TypeSigma};
use flagram::model::{ColorClasses, ColoredGraph, PlainGraph, RamseyProblem};
use flagram::rational::{int, parse, ratio, Rational};
use flagram::sdp::{assemble, Assembly};
use flagram::solver::{solve, solve_standard, SolverConfig, SolverStatus};
use num_traits::Zero;

fn r33() -> RamseyProblem {
    let classes = ColorClasses::new(2, vec![vec![1, 2]]).unwrap();
    RamseyProblem::new(vec![PlainGraph::complete(3), PlainGraph::complete(3)], classes, 2, 4).unwrap()
}

fn position(asm: &Assembly, block: usize, to0: u8, to1: u8) -> usize {
    let sigma: &TypeSigma = &asm.types[block];
    let g = sigma.graph().extend(&[to0, to1]);
    let f = Flag::new(&g, &[0, 1], sigma, &asm.problem.classes).unwrap();
    asm.flags[block].iter().position(|x| *x == f).unwrap()
}

/// Embeds a matrix over the listed flags into a zero block of size `dim`.
fn embed(values: &[Vec<Rational>], at: &[usize], dim: usize, scale: &Rational) -> RatMatrix {
    let mut out = vec![vec![Rational::zero(); dim]; dim];
    for (a, &i) in at.iter().enumerate() {
        for (b, &j) in at.iter().enumerate() {
            out[i][j] = &values[a][b] * scale;
        }
    }
    out
}

fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
}

fn blocks(asm: &Assembly) -> (usize, usize) {
    let non_edge = asm.types.iter().position(|t| t.graph().color(0, 1) == 0).unwrap();
    (non_edge, 1 - non_edge)
}

#[test]
fn program_shape() {
    let asm = assemble(&r33()).unwrap();
    assert_eq!(asm.sdp.rows(), 7);
    let mut dims = asm.sdp.block_dims();
    dims.sort();
    assert_eq!(dims, vec![2, 5]);
    let zero: Vec<RatMatrix> = dims_of(&asm).iter().map(|&d| vec![vec![int(0); d]; d]).collect();
    let (delta, _) = certified_delta(&asm.sdp, &zero).unwrap();
    assert_eq!(delta, int(0));
}

fn dims_of(asm: &Assembly) -> Vec<usize> {
    asm.sdp.block_dims()
}

#[test]
fn hand_certificate_gives_one_fifth() {
    let asm = assemble(&r33()).unwrap();
    let (b0, b1) = blocks(&asm);
    let m0 = ints(&[&[16, -4], &[-4, 1]]);
    let m1 = ints(&[
        &[126, -48, -73, -5],
        &[-48, 126, -5, -73],
        &[-73, -5, 64, 14],
        &[-5, -73, 14, 64],
    ]);
    let f0 = [position(&asm, b0, 0, 0), position(&asm, b0, 1, 1)];
    let f1 = [
        position(&asm, b1, 1, 2),
        position(&asm, b1, 2, 1),
        position(&asm, b1, 1, 0),
        position(&asm, b1, 0, 1),
    ];
    let mut mats = vec![Vec::new(), Vec::new()];
    mats[b0] = embed(&m0, &f0, 2, &ratio(1, 20));
    mats[b1] = embed(&m1, &f1, 5, &ratio(1, 80));
    assert!(verify_psd_exact(&mats[b0]).unwrap());
    assert!(verify_psd_exact(&mats[b1]).unwrap());
    let (delta, slack) = certified_delta(&asm.sdp, &mats).unwrap();
    assert_eq!(delta, ratio(1, 5));
    let surplus: Vec<usize> = (0..7).filter(|&h| slack[h] != ratio(1, 5)).collect();
    assert_eq!(surplus.len(), 1);
    assert_eq!(slack[surplus[0]], ratio(2, 5));
    assert!(asm.sdp.objective[surplus[0]].is_zero());
    assert_eq!(ramsey_bound(&delta, 2).unwrap(), 6);

    let cert = Certificate::from_exact(&asm, mats).unwrap();
    let text = cert.to_text();
    let back = Certificate::parse(&text).unwrap();
    assert_eq!(back, cert);
    back.verify(&assemble(&r33()).unwrap()).unwrap();

    let mut tampered = back.clone();
    tampered.delta = ratio(1, 4);
    assert!(tampered.verify(&asm).is_err());
}

#[test]
fn decimal_certificate_beats_one_sixth() {
    let asm = assemble(&r33()).unwrap();
    let (b0, b1) = blocks(&asm);
    let entries = [
        ["0.0744", "-0.0223", "-0.0520"],
        ["-0.0223", "0.0238", "-0.0014"],
        ["-0.0520", "-0.0014", "0.0536"],
    ];
    let m: Vec<Vec<Rational>> = entries
        .iter()
        .map(|r| r.iter().map(|t| parse(t).unwrap()).collect())
        .collect();
    let at = [position(&asm, b1, 1, 2), position(&asm, b1, 2, 1), position(&asm, b1, 1, 0)];
    let mut mats = vec![Vec::new(), Vec::new()];
    mats[b0] = vec![vec![int(0); 2]; 2];
    mats[b1] = embed(&m, &at, 5, &int(24));
    let (delta, _) = certified_delta(&asm.sdp, &mats).unwrap();
    assert!(delta > ratio(17, 100));
    assert!(delta > ratio(1, 6));
    assert!(delta <= ratio(1, 5));
}

#[test]
fn internal_solver_certifies_six() {
    let asm = assemble(&r33()).unwrap();
    let out = solve_standard(&asm.sdp.standard_form(), &SolverConfig::default()).unwrap();
    assert_eq!(out.status, SolverStatus::Optimal, "{}", out.describe());
    for w in out.gap_history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "gap rose: {:?}", out.gap_history);
    }
    let sol = solve(&asm.sdp, &SolverConfig::default()).unwrap();
    assert!(sol.lambda >= 0.17, "{}", sol.status);
    assert!((sol.lambda - 0.2).abs() < 1e-6);
    let cert = certify(&asm, &sol).unwrap();
    assert!(cert.delta > ratio(1, 6));
    assert!(cert.delta <= ratio(1, 5));
    assert_eq!(cert.bound, 6);
    cert.verify(&asm).unwrap();
}

#[test]
fn indefinite_block_fails_certification() {
    let asm = assemble(&r33()).unwrap();
    let mut sol = solve(&asm.sdp, &SolverConfig::default()).unwrap();
    sol.matrices[1][(0, 0)] = -1.0;
    match certify(&asm, &sol) {
        Err(flagram::Error::Certification(msg)) => assert!(msg.contains("block 1"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn c5_witness_caps_the_density() {
    let mut g = ColoredGraph::complete(5, 2);
    for i in 0..5 {
        g.set_color(i, (i + 1) % 5, 1);
    }
    assert!(flagram::model::is_admissible(&g, &r33()));
    let q = flagram::model::quotient_density_bound(&g, 2).unwrap();
    assert_eq!(q, ratio(1, 5));
}

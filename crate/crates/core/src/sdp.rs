//! The semidefinite program of the plain method and its interchange files.
//!
//! For every admissible graph `H` of order `n` the program has one row
//!
//! ```text
//! sum_sigma <M_sigma, C_sigma(H)> + lambda + slack_H = b_H
//! ```
//!
//! where `b_H` is the independent-set density, `C_sigma(H)[i][j]` is
//! `[[F_i x F_j]]_sigma` evaluated at `H`, and `lambda` is maximized. In
//! SDPA terms the variables are the blocks `M_sigma` followed by one
//! diagonal block `[lambda, slack_1, ..., slack_m]`. Each row is multiplied
//! by the least common multiple of its denominators so that the exported
//! data is integral.

use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::algebra::{objective_vector, AveragingOperator, ProductTable};
use crate::enumerate::{enumerate_levels, flags_from_basis, types_from_levels, Basis, Flag, Limits, TypeSigma};
use crate::error::{Error, Result};
use crate::model::RamseyProblem;
use crate::rational::{lcm_of_denominators, parse as parse_rational, to_f64, Rational};

/// Symmetric coefficient matrix stored as its upper triangle, `i <= j`.
pub type SymEntries = Vec<(usize, usize, Rational)>;

/// One matrix variable and its coefficient matrix in every row.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpBlock {
    /// Free-form name; the type's key for assembled problems.
    pub label: String,
    pub dim: usize,
    /// `rows[h]` holds the upper triangle of `C(H_h)`.
    pub rows: Vec<SymEntries>,
}

/// `maximize lambda` subject to
/// `objective[h] - sum_b <M_b, C_b(h)> >= lambda` and every `M_b` PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub objective: Vec<Rational>,
    pub blocks: Vec<SdpBlock>,
}

/// `<M, C>` for a full symmetric `M` and an upper-triangle `C`.
fn pair_exact(m: &[Vec<Rational>], c: &SymEntries) -> Rational {
    let mut acc = Rational::zero();
    for (i, j, v) in c {
        let term = &m[*i][*j] * v;
        if i == j {
            acc += term;
        } else {
            acc += &term + &term;
        }
    }
    acc
}

impl SdpProblem {
    pub fn new(objective: Vec<Rational>, blocks: Vec<SdpBlock>) -> Result<Self> {
        let rows = objective.len();
        if rows == 0 {
            return Err(Error::invalid("a program needs at least one constraint row"));
        }
        for (b, block) in blocks.iter().enumerate() {
            if block.rows.len() != rows {
                return Err(Error::Dimension(format!(
                    "block {b} has {} rows, the objective has {rows}",
                    block.rows.len()
                )));
            }
            for row in &block.rows {
                if let Some((i, j, _)) = row.iter().find(|(i, j, _)| i > j || *j >= block.dim) {
                    return Err(Error::Dimension(format!(
                        "entry ({i}, {j}) is not in the upper triangle of block {b} (dimension {})",
                        block.dim
                    )));
                }
            }
        }
        Ok(SdpProblem { objective, blocks })
    }

    pub fn rows(&self) -> usize {
        self.objective.len()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    fn check_shapes(&self, dims: &[(usize, usize)]) -> Result<()> {
        if dims.len() != self.blocks.len() {
            return Err(Error::Dimension(format!(
                "{} matrices for {} blocks",
                dims.len(),
                self.blocks.len()
            )));
        }
        for (b, (&(r, c), block)) in dims.iter().zip(&self.blocks).enumerate() {
            if r != block.dim || c != block.dim {
                return Err(Error::Dimension(format!(
                    "block {b} is {r}x{c}, expected {0}x{0}",
                    block.dim
                )));
            }
        }
        Ok(())
    }

    /// `sum_b <M_b, C_b(h)>` for every row, exactly.
    pub fn quadratic_terms(&self, matrices: &[Vec<Vec<Rational>>]) -> Result<Vec<Rational>> {
        let dims: Vec<(usize, usize)> = matrices
            .iter()
            .map(|m| (m.len(), m.first().map_or(m.len(), Vec::len)))
            .collect();
        self.check_shapes(&dims)?;
        if let Some((b, _)) = matrices
            .iter()
            .enumerate()
            .find(|(_, m)| m.iter().any(|row| row.len() != m.len()))
        {
            return Err(Error::Dimension(format!("block {b} is not square")));
        }
        Ok((0..self.rows())
            .into_par_iter()
            .map(|h| {
                self.blocks
                    .iter()
                    .zip(matrices)
                    .map(|(block, m)| pair_exact(m, &block.rows[h]))
                    .sum()
            })
            .collect())
    }

    /// `objective[h] - sum_b <M_b, C_b(h)>` for every row, exactly.
    pub fn slack(&self, matrices: &[Vec<Vec<Rational>>]) -> Result<Vec<Rational>> {
        let q = self.quadratic_terms(matrices)?;
        Ok(self.objective.iter().zip(q).map(|(b, q)| b - q).collect())
    }

    /// Floating-point version of [`SdpProblem::slack`].
    pub fn slack_f64(&self, matrices: &[DMatrix<f64>]) -> Result<Vec<f64>> {
        let dims: Vec<(usize, usize)> = matrices.iter().map(|m| m.shape()).collect();
        self.check_shapes(&dims)?;
        Ok((0..self.rows())
            .map(|h| {
                let quad: f64 = self
                    .blocks
                    .iter()
                    .zip(matrices)
                    .map(|(block, m)| {
                        block.rows[h]
                            .iter()
                            .map(|(i, j, v)| {
                                let w = if i == j { 1.0 } else { 2.0 };
                                w * m[(*i, *j)] * to_f64(v)
                            })
                            .sum::<f64>()
                    })
                    .sum();
                to_f64(&self.objective[h]) - quad
            })
            .collect())
    }

    /// Integer-scaled standard form: matrix blocks, then the diagonal
    /// `[lambda, slack...]` block.
    pub fn standard_form(&self) -> StandardSdp {
        let m = self.rows();
        let nb = self.blocks.len();
        let mut block_sizes: Vec<i64> = self.blocks.iter().map(|b| b.dim as i64).collect();
        block_sizes.push(-(m as i64 + 1));
        let scales: Vec<BigInt> = (0..m)
            .map(|h| {
                let values = self.blocks.iter().flat_map(|b| b.rows[h].iter().map(|e| &e.2));
                lcm_of_denominators(values.chain(std::iter::once(&self.objective[h])))
            })
            .collect();
        let constraints = (0..m)
            .map(|h| {
                let d = BigRational::from_integer(scales[h].clone());
                let mut row: Vec<SdpaEntry> = Vec::new();
                for (b, block) in self.blocks.iter().enumerate() {
                    for (i, j, v) in &block.rows[h] {
                        if !v.is_zero() {
                            row.push(SdpaEntry::new(b, *i, *j, v * &d));
                        }
                    }
                }
                row.push(SdpaEntry::new(nb, 0, 0, d.clone()));
                row.push(SdpaEntry::new(nb, h + 1, h + 1, d.clone()));
                row
            })
            .collect();
        let rhs = (0..m)
            .map(|h| &self.objective[h] * BigRational::from_integer(scales[h].clone()))
            .collect();
        StandardSdp {
            block_sizes,
            rhs,
            objective: vec![SdpaEntry::new(nb, 0, 0, Rational::one())],
            constraints,
            row_scale: scales,
        }
    }
}

/// One nonzero of a block matrix, zero-based, `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SdpaEntry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: Rational,
}

impl SdpaEntry {
    pub fn new(block: usize, i: usize, j: usize, value: Rational) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        SdpaEntry { block, i, j, value }
    }
}

/// `maximize <C, X>` subject to `<A_r, X> = rhs_r`, `X` PSD, with `X`
/// block diagonal. Negative block sizes denote diagonal blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardSdp {
    pub block_sizes: Vec<i64>,
    pub rhs: Vec<Rational>,
    pub objective: Vec<SdpaEntry>,
    pub constraints: Vec<Vec<SdpaEntry>>,
    /// Factor each row was multiplied by; all ones for parsed files.
    pub row_scale: Vec<BigInt>,
}

impl StandardSdp {
    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn block_dim(&self, b: usize) -> usize {
        self.block_sizes[b].unsigned_abs() as usize
    }

    pub fn is_diagonal(&self, b: usize) -> bool {
        self.block_sizes[b] < 0
    }

    /// Sorted, merged entries; the form compared by round trips.
    pub fn normalized(&self) -> StandardSdp {
        fn norm(entries: &[SdpaEntry]) -> Vec<SdpaEntry> {
            let mut v: Vec<SdpaEntry> = entries.to_vec();
            v.sort();
            let mut out: Vec<SdpaEntry> = Vec::with_capacity(v.len());
            for e in v {
                match out.last_mut() {
                    Some(last) if (last.block, last.i, last.j) == (e.block, e.i, e.j) => last.value += e.value,
                    _ => out.push(e),
                }
            }
            out.retain(|e| !e.value.is_zero());
            out
        }
        StandardSdp {
            block_sizes: self.block_sizes.clone(),
            rhs: self.rhs.clone(),
            objective: norm(&self.objective),
            constraints: self.constraints.iter().map(|r| norm(r)).collect(),
            row_scale: self.row_scale.clone(),
        }
    }

    /// Equal as programs: same sizes, right-hand side and merged entries.
    /// Row scales are bookkeeping and are not written to files.
    pub fn same_program(&self, other: &StandardSdp) -> bool {
        let (a, b) = (self.normalized(), other.normalized());
        a.block_sizes == b.block_sizes && a.rhs == b.rhs && a.objective == b.objective && a.constraints == b.constraints
    }
}

/// SDPA numbers: integers as such, other rationals as decimals.
fn sdpa_number(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{:e}", to_f64(q))
    }
}

/// SDPA sparse format. Constraint 0 is the objective.
pub fn export_sdpa(s: &StandardSdp) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", s.rows());
    let _ = writeln!(out, "{}", s.block_sizes.len());
    let sizes: Vec<String> = s.block_sizes.iter().map(i64::to_string).collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let rhs: Vec<String> = s.rhs.iter().map(sdpa_number).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    let s = s.normalized();
    for (r, entries) in std::iter::once(&s.objective).chain(&s.constraints).enumerate() {
        for e in entries {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                r,
                e.block + 1,
                e.i + 1,
                e.j + 1,
                sdpa_number(&e.value)
            );
        }
    }
    out
}

/// Parses a number written by a solver: integers, `a/b`, decimals and
/// floats in exponent notation (converted exactly from the `f64`).
fn parse_number(token: &str) -> Option<Rational> {
    parse_rational(token).or_else(|| {
        let x: f64 = token.parse().ok()?;
        BigRational::from_float(x)
    })
}

/// Splits a header line, treating SDPA's optional punctuation as blanks.
fn header_tokens(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')'))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn parse_sdpa(text: &str) -> Result<StandardSdp> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let mut header = |what: &str| -> Result<(usize, Vec<String>)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(text.lines().count() + 1, format!("missing {what}")))?;
        Ok((n, header_tokens(l).into_iter().map(String::from).collect()))
    };
    let (ln, t) = header("constraint count")?;
    let m: usize = t
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected the constraint count"))?;
    let (ln, t) = header("block count")?;
    let nb: usize = t
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected the block count"))?;
    let (ln, t) = header("block sizes")?;
    if t.len() < nb {
        return Err(Error::parse(ln, format!("expected {nb} block sizes")));
    }
    let block_sizes = t[..nb]
        .iter()
        .map(|s| match s.parse::<i64>() {
            Ok(v) if v != 0 => Ok(v),
            _ => Err(Error::parse(ln, format!("bad block size {s:?}"))),
        })
        .collect::<Result<Vec<i64>>>()?;
    let (ln, t) = header("right-hand side")?;
    if t.len() < m {
        return Err(Error::parse(ln, format!("expected {m} right-hand sides")));
    }
    let rhs = t[..m]
        .iter()
        .map(|s| parse_number(s).ok_or_else(|| Error::parse(ln, format!("bad number {s:?}"))))
        .collect::<Result<Vec<_>>>()?;

    let mut objective = Vec::new();
    let mut constraints = vec![Vec::new(); m];
    for (ln, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 5 {
            return Err(Error::parse(ln, "expected `constraint block i j value`"));
        }
        let idx = |k: usize| -> Result<usize> {
            t[k].parse::<usize>()
                .map_err(|_| Error::parse(ln, format!("bad index {:?}", t[k])))
        };
        let (r, b, i, j) = (idx(0)?, idx(1)?, idx(2)?, idx(3)?);
        let value = parse_number(t[4]).ok_or_else(|| Error::parse(ln, format!("bad number {:?}", t[4])))?;
        if r > m || b == 0 || b > nb {
            return Err(Error::parse(ln, "constraint or block index out of range"));
        }
        let dim = block_sizes[b - 1].unsigned_abs() as usize;
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(Error::parse(ln, format!("entry ({i}, {j}) outside block {b} of size {dim}")));
        }
        if block_sizes[b - 1] < 0 && i != j {
            return Err(Error::parse(ln, format!("off-diagonal entry in diagonal block {b}")));
        }
        let e = SdpaEntry::new(b - 1, i - 1, j - 1, value);
        if r == 0 {
            objective.push(e);
        } else {
            constraints[r - 1].push(e);
        }
    }
    Ok(StandardSdp {
        block_sizes,
        rhs,
        objective,
        constraints,
        row_scale: vec![BigInt::one(); m],
    }
    .normalized())
}

/// One block of a standard-form matrix variable.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockValue {
    Dense(DMatrix<f64>),
    Diagonal(DVector<f64>),
}

impl BlockValue {
    pub fn zeros(size: i64) -> Self {
        let n = size.unsigned_abs() as usize;
        if size < 0 {
            BlockValue::Diagonal(DVector::zeros(n))
        } else {
            BlockValue::Dense(DMatrix::zeros(n, n))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BlockValue::Dense(m) => m.nrows(),
            BlockValue::Diagonal(d) => d.len(),
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        match self {
            BlockValue::Dense(m) => {
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
            BlockValue::Diagonal(d) => d[i] = v,
        }
    }

    fn entries(&self) -> Vec<(usize, usize, f64)> {
        match self {
            BlockValue::Dense(m) => {
                let mut out = Vec::new();
                for i in 0..m.nrows() {
                    for j in i..m.ncols() {
                        if m[(i, j)] != 0.0 {
                            out.push((i, j, m[(i, j)]));
                        }
                    }
                }
                out
            }
            BlockValue::Diagonal(d) => d
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, i, *v))
                .collect(),
        }
    }
}

/// Primal `X`, dual `y` and dual slack `Z` of a standard-form program.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardSolution {
    pub y: Vec<f64>,
    pub z: Vec<BlockValue>,
    pub x: Vec<BlockValue>,
}

/// `lambda` and one matrix per type, as reported by a floating-point solver.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatSolution {
    pub lambda: f64,
    pub matrices: Vec<DMatrix<f64>>,
    pub status: String,
    pub raw: Option<StandardSolution>,
}

impl FloatSolution {
    /// Reads `lambda` and the type blocks out of a standard-form solution.
    pub fn from_standard(s: &SdpProblem, sol: StandardSolution, status: impl Into<String>) -> Result<Self> {
        let nb = s.blocks.len();
        if sol.x.len() != nb + 1 {
            return Err(Error::Dimension(format!(
                "solution has {} blocks, expected {}",
                sol.x.len(),
                nb + 1
            )));
        }
        let mut matrices = Vec::with_capacity(nb);
        for (b, (block, value)) in s.blocks.iter().zip(&sol.x).enumerate() {
            match value {
                BlockValue::Dense(m) if m.nrows() == block.dim => matrices.push(m.clone()),
                other => {
                    return Err(Error::Dimension(format!(
                        "block {} has size {}, expected a dense block of size {}",
                        b + 1,
                        other.dim(),
                        block.dim
                    )))
                }
            }
        }
        let lambda = match &sol.x[nb] {
            BlockValue::Diagonal(d) if d.len() == s.rows() + 1 => d[0],
            other => {
                return Err(Error::Dimension(format!(
                    "block {} has size {}, expected a diagonal block of size {}",
                    nb + 1,
                    other.dim(),
                    s.rows() + 1
                )))
            }
        };
        Ok(FloatSolution {
            lambda,
            matrices,
            status: status.into(),
            raw: Some(sol),
        })
    }

    /// Builds a solution from type matrices alone (slacks derived).
    pub fn from_matrices(s: &SdpProblem, lambda: f64, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let dims: Vec<(usize, usize)> = matrices.iter().map(|m| m.shape()).collect();
        s.check_shapes(&dims)?;
        Ok(FloatSolution {
            lambda,
            matrices,
            status: "given".into(),
            raw: None,
        })
    }
}

/// CSDP solution format: `y` on the first line, then `1 b i j v` for `Z`
/// and `2 b i j v` for `X`, one-based.
pub fn write_solution(sol: &StandardSolution) -> String {
    let mut out = String::new();
    let y: Vec<String> = sol.y.iter().map(|v| format!("{v:e}")).collect();
    let _ = writeln!(out, "{}", y.join(" "));
    for (matno, blocks) in [(1, &sol.z), (2, &sol.x)] {
        for (b, block) in blocks.iter().enumerate() {
            for (i, j, v) in block.entries() {
                let _ = writeln!(out, "{matno} {} {} {} {v:e}", b + 1, i + 1, j + 1);
            }
        }
    }
    out
}

/// Reads a CSDP-style solution file for the standard form of `s`.
pub fn parse_solution(text: &str, s: &SdpProblem) -> Result<FloatSolution> {
    let std = s.standard_form();
    let m = std.rows();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (first_ln, first) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| Error::parse(1, "empty solution file"))?;
    let y = first
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Error::parse(first_ln, format!("bad number {t:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if y.len() != m {
        return Err(Error::parse(
            first_ln,
            format!("expected {m} dual values, found {}", y.len()),
        ));
    }
    let fresh = || std.block_sizes.iter().map(|&b| BlockValue::zeros(b)).collect::<Vec<_>>();
    let (mut z, mut x) = (fresh(), fresh());
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 5 {
            return Err(Error::parse(ln, "expected `matrix block i j value`"));
        }
        let idx = |k: usize| -> Result<usize> {
            t[k].parse::<usize>()
                .map_err(|_| Error::parse(ln, format!("bad index {:?}", t[k])))
        };
        let (matno, b, i, j) = (idx(0)?, idx(1)?, idx(2)?, idx(3)?);
        let v: f64 = t[4]
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad number {:?}", t[4])))?;
        if matno != 1 && matno != 2 {
            return Err(Error::parse(ln, format!("matrix number {matno} is neither 1 (Z) nor 2 (X)")));
        }
        if b == 0 || b > std.block_sizes.len() {
            return Err(Error::Dimension(format!(
                "line {ln}: block {b} does not exist (the problem has {})",
                std.block_sizes.len()
            )));
        }
        let dim = std.block_dim(b - 1);
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(Error::Dimension(format!(
                "line {ln}: entry ({i}, {j}) outside block {b} of size {dim}"
            )));
        }
        if std.is_diagonal(b - 1) && i != j {
            return Err(Error::Dimension(format!(
                "line {ln}: off-diagonal entry in diagonal block {b}"
            )));
        }
        let target = if matno == 1 { &mut z } else { &mut x };
        target[b - 1].set(i - 1, j - 1, v);
    }
    FloatSolution::from_standard(s, StandardSolution { y, z, x }, "imported")
}

/// Everything assembled for one problem.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub problem: RamseyProblem,
    /// `levels[i]` is the basis of order `i`.
    pub levels: Vec<Basis>,
    pub types: Vec<TypeSigma>,
    /// Flags per type, in block order.
    pub flags: Vec<Vec<Flag>>,
    pub tables: Vec<ProductTable>,
    pub sdp: SdpProblem,
    pub timings: Vec<(String, f64)>,
}

impl Assembly {
    pub fn basis(&self) -> &Basis {
        &self.levels[self.problem.flag_order]
    }
}

/// Enumerates, builds the tables and assembles the program for `p`.
pub fn assemble(p: &RamseyProblem) -> Result<Assembly> {
    assemble_with(p, &Limits::from_env())
}

pub fn assemble_with(p: &RamseyProblem, limits: &Limits) -> Result<Assembly> {
    p.validate()?;
    let n = p.flag_order;
    let mut timings = Vec::new();
    let clock = Instant::now();
    let levels = enumerate_levels(p, n, limits)?;
    timings.push(("enumerate".to_string(), clock.elapsed().as_secs_f64()));

    let clock = Instant::now();
    let top = &levels[n];
    let objective = objective_vector(p, &levels[p.ell], top)?;
    let mut types = Vec::new();
    let mut flags = Vec::new();
    let mut tables = Vec::new();
    for s in p.type_sizes() {
        let f = p.flag_size_for(s);
        for sigma in types_from_levels(p, s, &levels) {
            let fl = flags_from_basis(p, &sigma, &levels[f])?;
            let op = AveragingOperator::new(p, &sigma, top);
            let table = ProductTable::build(fl.clone(), &op, &p.classes)?;
            types.push(sigma);
            flags.push(fl);
            tables.push(table);
        }
    }
    if tables.is_empty() {
        return Err(Error::invalid(format!(
            "no types available at flag order {n}; choose type sizes 1..={} with the parity of {n}",
            n.saturating_sub(2)
        )));
    }
    timings.push(("tables".to_string(), clock.elapsed().as_secs_f64()));

    let clock = Instant::now();
    let m = top.len();
    let blocks = tables
        .par_iter()
        .map(|t| {
            let mut rows: Vec<SymEntries> = vec![Vec::new(); m];
            for (&(i, j), coeffs) in &t.coeffs {
                for (h, q) in coeffs {
                    rows[*h].push((i, j, q.clone()));
                }
            }
            SdpBlock {
                label: t.sigma.key().to_hex(),
                dim: t.dim(),
                rows,
            }
        })
        .collect();
    let sdp = SdpProblem::new(objective, blocks)?;
    timings.push(("assemble".to_string(), clock.elapsed().as_secs_f64()));
    Ok(Assembly {
        problem: p.clone(),
        levels,
        types,
        flags,
        tables,
        sdp,
        timings,
    })
}

/// Largest absolute entry of a rational symmetric matrix list; for reports.
pub fn max_abs_entry(matrices: &[Vec<Vec<Rational>>]) -> Rational {
    matrices
        .iter()
        .flatten()
        .flatten()
        .map(|q| q.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

//! The whole run: enumerate, build tables, assemble, solve, certify.

use std::fmt::{self, Write as _};
use std::time::Instant;

use crate::certify::{certify, Certificate};
use crate::enumerate::Limits;
use crate::error::{Error, Result};
use crate::model::{find_violation, quotient_density_bound, Color, ColoredGraph, RamseyProblem, Violation};
use crate::rational::{format as format_rational, to_f64, Rational};
use crate::sdp::{assemble_with, parse_solution, Assembly, FloatSolution};
use crate::solver::{solve, SolverConfig};

/// An error tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

fn at<T>(stage: &'static str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|error| StageError { stage, error })
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub solver: SolverConfig,
    pub limits: Option<Limits>,
    /// Text of an external solver's solution file, used instead of the
    /// internal solver.
    pub external_solution: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub problem: String,
    /// `(order, number of admissible graphs)` for every level.
    pub basis_sizes: Vec<(usize, usize)>,
    /// `(type key, flag count)` per block.
    pub types: Vec<(String, usize)>,
    pub constraints: usize,
    pub solver_lambda: f64,
    pub solver_status: String,
    pub certified_delta: Option<Rational>,
    pub bound: Option<u64>,
    pub certification_failure: Option<String>,
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    /// Report without timings; identical across runs of the same problem.
    pub fn stable(&self) -> RunReport {
        RunReport {
            timings: Vec::new(),
            ..self.clone()
        }
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem:");
        for line in self.problem.lines() {
            let _ = writeln!(out, "  {line}");
        }
        let sizes: Vec<String> = self.basis_sizes.iter().map(|(n, c)| format!("{n}:{c}")).collect();
        let _ = writeln!(out, "admissible graphs per order: {}", sizes.join(" "));
        let _ = writeln!(out, "types: {}", self.types.len());
        for (key, count) in &self.types {
            let _ = writeln!(out, "  {key}: {count} flags");
        }
        let _ = writeln!(out, "constraints: {}", self.constraints);
        let _ = writeln!(out, "solver: lambda = {:.10} ({})", self.solver_lambda, self.solver_status);
        match (&self.certified_delta, self.bound) {
            (Some(d), Some(b)) => {
                let _ = writeln!(out, "certified delta = {} ~ {:.10}", format_rational(d), to_f64(d));
                let _ = writeln!(out, "bound: R <= {b}");
            }
            _ => {
                let why = self.certification_failure.as_deref().unwrap_or("not attempted");
                let _ = writeln!(out, "certification failed: {why}");
            }
        }
        for (stage, secs) in &self.timings {
            let _ = writeln!(out, "time {stage}: {secs:.3}s");
        }
        out
    }

    /// `key=value` lines between `[report]` markers.
    pub fn machine(&self) -> String {
        let mut out = String::from("[report]\n");
        let _ = writeln!(out, "problem={}", self.problem.lines().collect::<Vec<_>>().join("; "));
        for (n, c) in &self.basis_sizes {
            let _ = writeln!(out, "graphs.{n}={c}");
        }
        let _ = writeln!(out, "types={}", self.types.len());
        for (i, (key, count)) in self.types.iter().enumerate() {
            let _ = writeln!(out, "type.{i}={key}:{count}");
        }
        let _ = writeln!(out, "constraints={}", self.constraints);
        let _ = writeln!(out, "lambda={:e}", self.solver_lambda);
        let _ = writeln!(out, "solver_status={}", self.solver_status);
        if let Some(d) = &self.certified_delta {
            let _ = writeln!(out, "delta={}", format_rational(d));
        }
        if let Some(b) = self.bound {
            let _ = writeln!(out, "bound={b}");
        }
        if let Some(f) = &self.certification_failure {
            let _ = writeln!(out, "certification_failure={f}");
        }
        for (stage, secs) in &self.timings {
            let _ = writeln!(out, "time.{stage}={secs:.6}");
        }
        out.push_str("[/report]\n");
        out
    }
}

pub struct BoundRun {
    pub report: RunReport,
    pub assembly: Assembly,
    pub solution: FloatSolution,
    pub certificate: Option<Certificate>,
}

/// Runs every stage. Certification failure is reported, not raised.
pub fn run_bound(p: &RamseyProblem, opts: &RunOptions) -> std::result::Result<BoundRun, StageError> {
    at("validate", p.validate())?;
    let limits = opts.limits.unwrap_or_else(Limits::from_env);
    let assembly = at("assemble", assemble_with(p, &limits))?;
    let mut timings = assembly.timings.clone();

    let clock = Instant::now();
    let solution = match &opts.external_solution {
        Some(text) => at("import", parse_solution(text, &assembly.sdp))?,
        None => at("solve", solve(&assembly.sdp, &opts.solver))?,
    };
    timings.push(("solve".into(), clock.elapsed().as_secs_f64()));

    let clock = Instant::now();
    let (certificate, failure) = match certify(&assembly, &solution) {
        Ok(c) => (Some(c), None),
        Err(e @ (Error::Certification(_) | Error::NotPsd { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(StageError { stage: "certify", error: e }),
    };
    timings.push(("certify".into(), clock.elapsed().as_secs_f64()));

    let report = RunReport {
        problem: p.to_string().trim_end().to_string(),
        basis_sizes: assembly.levels.iter().map(|b| (b.level(), b.len())).collect(),
        types: assembly
            .sdp
            .blocks
            .iter()
            .map(|b| (b.label.clone(), b.dim))
            .collect(),
        constraints: assembly.sdp.rows(),
        solver_lambda: solution.lambda,
        solver_status: solution.status.clone(),
        certified_delta: certificate.as_ref().map(|c| c.delta.clone()),
        bound: certificate.as_ref().map(|c| c.bound),
        certification_failure: failure,
        timings,
    };
    Ok(BoundRun {
        report,
        assembly,
        solution,
        certificate,
    })
}

/// Coloring file: `order m`, then `m` rows of `m` colors (the diagonal is
/// ignored and may be written as `-`). `#` starts a comment.
pub fn parse_coloring(text: &str) -> Result<ColoredGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| Error::parse(1, "empty coloring file"))?;
    let m: usize = head
        .strip_prefix("order")
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected `order <m>`"))?;
    if m == 0 || m > 255 {
        return Err(Error::parse(ln, "order must be between 1 and 255"));
    }
    let mut rows: Vec<Vec<Option<Color>>> = Vec::with_capacity(m);
    for (ln, line) in lines {
        if rows.len() == m {
            return Err(Error::parse(ln, format!("more than {m} rows")));
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                if t == "-" {
                    Ok(None)
                } else {
                    t.parse::<Color>()
                        .map(Some)
                        .map_err(|_| Error::parse(ln, format!("bad color {t:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != m {
            return Err(Error::parse(ln, format!("expected {m} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != m {
        return Err(Error::parse(text.lines().count() + 1, format!("expected {m} rows, found {}", rows.len())));
    }
    let mut g = ColoredGraph::empty(m);
    for u in 0..m {
        for v in 0..u {
            let (a, b) = (rows[u][v], rows[v][u]);
            if a != b {
                return Err(Error::Asymmetric { row: v, col: u });
            }
            let c = a.ok_or_else(|| Error::invalid(format!("missing color for pair {}-{}", v + 1, u + 1)))?;
            g.set_color(u, v, c);
        }
    }
    Ok(g)
}

pub fn format_coloring(g: &ColoredGraph) -> String {
    let mut out = format!("order {}\n", g.order());
    for u in 0..g.order() {
        let row: Vec<String> = (0..g.order())
            .map(|v| if u == v { "-".to_string() } else { g.color(u, v).to_string() })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Validates a quotient coloring and returns the independent-set density
/// of its balanced blow-up, an upper bound on every certified delta.
pub fn check_witness(p: &RamseyProblem, g: &ColoredGraph) -> Result<Rational> {
    if let Some(c) = (0..g.order())
        .flat_map(|u| (0..u).map(move |v| (u, v)))
        .map(|(u, v)| g.color(u, v))
        .find(|&c| c as usize > p.k())
    {
        return Err(Error::invalid(format!("color {c} exceeds the {} colors of the problem", p.k())));
    }
    if g.has_non_edge() {
        return Err(Error::invalid("a witness must color every pair with a nonzero color"));
    }
    match find_violation(g, p) {
        None => quotient_density_bound(g, p.ell),
        Some(Violation::MonoCopy { color, vertices }) => {
            let mut vs: Vec<usize> = vertices.iter().map(|v| v + 1).collect();
            vs.sort_unstable();
            Err(Error::Inadmissible(format!(
                "monochromatic copy of the color-{color} forbidden graph on vertices {vs:?}"
            )))
        }
        Some(Violation::BlowUp(u, v, w)) => Err(Error::Inadmissible(format!(
            "vertices {}, {}, {} break blow-up consistency",
            u + 1,
            v + 1,
            w + 1
        ))),
    }
}

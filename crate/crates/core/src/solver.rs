//! Dense primal-dual interior-point method for small semidefinite programs.
//!
//! Solves the standard pair
//!
//! ```text
//! max <C, X>  s.t. <A_r, X> = a_r, X PSD
//! min a^T y   s.t. Z = sum_r y_r A_r - C, Z PSD
//! ```
//!
//! from infeasible starting points with the HKM search direction and a
//! Mehrotra predictor-corrector step.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::sdp::{BlockValue, FloatSolution, SdpProblem, StandardSdp, StandardSolution};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub duality_gap_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub step_fraction: f64,
    /// Largest total dimension of the dense blocks.
    pub max_dense_dim: usize,
    pub max_constraints: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 200,
            duality_gap_tolerance: 1e-9,
            feasibility_tolerance: 1e-9,
            step_fraction: 0.98,
            max_dense_dim: 200,
            max_constraints: 2000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duality_gap_tolerance > 0.0 && self.feasibility_tolerance > 0.0) {
            return Err(Error::invalid("solver tolerances must be positive"));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::invalid("step fraction must lie strictly between 0 and 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("at least one solver iteration is required"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    IterationLimit,
    /// Progress stopped before the tolerances were met.
    Stalled,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::IterationLimit => "iteration limit reached",
            SolverStatus::Stalled => "stalled",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solution: StandardSolution,
    pub status: SolverStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    /// Relative duality gap after each accepted iteration.
    pub gap_history: Vec<f64>,
}

impl SolveOutcome {
    pub fn gap(&self) -> f64 {
        self.gap_history.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn describe(&self) -> String {
        format!(
            "{} after {} iterations (primal {:.10}, dual {:.10}, gap {:.2e}, infeasibility {:.2e}/{:.2e})",
            self.status,
            self.iterations,
            self.primal_objective,
            self.dual_objective,
            self.gap(),
            self.primal_infeasibility,
            self.dual_infeasibility
        )
    }
}

/// Solves the flag program and extracts `lambda` and the type matrices.
pub fn solve(s: &SdpProblem, cfg: &SolverConfig) -> Result<FloatSolution> {
    let outcome = solve_standard(&s.standard_form(), cfg)?;
    let status = outcome.describe();
    FloatSolution::from_standard(s, outcome.solution, status)
}

/// Sparse symmetric matrix: `(block, i, j, value)` with `i <= j`.
type Sparse = Vec<(usize, usize, usize, f64)>;

#[derive(Clone, Debug)]
struct Blocks(Vec<BlockValue>);

impl Blocks {
    fn zeros(sizes: &[i64]) -> Self {
        Blocks(sizes.iter().map(|&s| BlockValue::zeros(s)).collect())
    }

    fn identity(sizes: &[i64], scale: f64) -> Self {
        Blocks(
            sizes
                .iter()
                .map(|&s| {
                    let n = s.unsigned_abs() as usize;
                    if s < 0 {
                        BlockValue::Diagonal(DVector::from_element(n, scale))
                    } else {
                        BlockValue::Dense(DMatrix::identity(n, n) * scale)
                    }
                })
                .collect(),
        )
    }

    fn add_sparse(&mut self, a: &Sparse, weight: f64) {
        for &(b, i, j, v) in a {
            match &mut self.0[b] {
                BlockValue::Dense(m) => {
                    m[(i, j)] += weight * v;
                    if i != j {
                        m[(j, i)] += weight * v;
                    }
                }
                BlockValue::Diagonal(d) => d[i] += weight * v,
            }
        }
    }

    fn zip_map(&self, other: &Blocks, f: impl Fn(&BlockValue, &BlockValue) -> BlockValue) -> Blocks {
        Blocks(self.0.iter().zip(&other.0).map(|(a, b)| f(a, b)).collect())
    }

    fn axpy(&self, alpha: f64, other: &Blocks) -> Blocks {
        self.zip_map(other, |a, b| match (a, b) {
            (BlockValue::Dense(x), BlockValue::Dense(y)) => BlockValue::Dense(x + y * alpha),
            (BlockValue::Diagonal(x), BlockValue::Diagonal(y)) => BlockValue::Diagonal(x + y * alpha),
            _ => unreachable!("block kinds always match"),
        })
    }

    fn scaled(&self, alpha: f64) -> Blocks {
        Blocks(
            self.0
                .iter()
                .map(|b| match b {
                    BlockValue::Dense(m) => BlockValue::Dense(m * alpha),
                    BlockValue::Diagonal(d) => BlockValue::Diagonal(d * alpha),
                })
                .collect(),
        )
    }

    fn mul(&self, other: &Blocks) -> Blocks {
        self.zip_map(other, |a, b| match (a, b) {
            (BlockValue::Dense(x), BlockValue::Dense(y)) => BlockValue::Dense(x * y),
            (BlockValue::Diagonal(x), BlockValue::Diagonal(y)) => BlockValue::Diagonal(x.component_mul(y)),
            _ => unreachable!("block kinds always match"),
        })
    }

    fn symmetrized(&self) -> Blocks {
        Blocks(
            self.0
                .iter()
                .map(|b| match b {
                    BlockValue::Dense(m) => BlockValue::Dense((m + m.transpose()) * 0.5),
                    d => d.clone(),
                })
                .collect(),
        )
    }

    /// `tr(self * other)` for symmetric arguments.
    fn dot(&self, other: &Blocks) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| match (a, b) {
                (BlockValue::Dense(x), BlockValue::Dense(y)) => x.dot(y),
                (BlockValue::Diagonal(x), BlockValue::Diagonal(y)) => x.dot(y),
                _ => unreachable!("block kinds always match"),
            })
            .sum()
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn inverse(&self) -> Option<Blocks> {
        let mut out = Vec::with_capacity(self.0.len());
        for b in &self.0 {
            out.push(match b {
                BlockValue::Dense(m) => BlockValue::Dense(Cholesky::new(m.clone())?.inverse()),
                BlockValue::Diagonal(d) => {
                    if d.iter().any(|&v| v <= 0.0) {
                        return None;
                    }
                    BlockValue::Diagonal(d.map(|v| 1.0 / v))
                }
            });
        }
        Some(Blocks(out))
    }

    /// Largest `alpha` keeping `self + alpha * dir` positive definite, or
    /// `None` if `self` itself is not.
    fn max_step(&self, dir: &Blocks) -> Option<f64> {
        let mut alpha = f64::INFINITY;
        for (x, d) in self.0.iter().zip(&dir.0) {
            match (x, d) {
                (BlockValue::Dense(x), BlockValue::Dense(d)) => {
                    if x.nrows() == 0 {
                        continue;
                    }
                    let l = Cholesky::new(x.clone())?.l();
                    let li = l.clone().try_inverse()?;
                    let scaled = &li * d * li.transpose();
                    let scaled = (&scaled + scaled.transpose()) * 0.5;
                    let min = SymmetricEigen::new(scaled).eigenvalues.min();
                    if min < 0.0 {
                        alpha = alpha.min(-1.0 / min);
                    }
                }
                (BlockValue::Diagonal(x), BlockValue::Diagonal(d)) => {
                    for (xv, dv) in x.iter().zip(d.iter()) {
                        if *xv <= 0.0 {
                            return None;
                        }
                        if *dv < 0.0 {
                            alpha = alpha.min(-xv / dv);
                        }
                    }
                }
                _ => unreachable!("block kinds always match"),
            }
        }
        Some(alpha)
    }
}

/// `<A, M>` for sparse symmetric `A`.
fn apply(a: &Sparse, m: &Blocks) -> f64 {
    a.iter()
        .map(|&(b, i, j, v)| match &m.0[b] {
            BlockValue::Dense(x) => {
                if i == j {
                    v * x[(i, i)]
                } else {
                    v * (x[(i, j)] + x[(j, i)])
                }
            }
            BlockValue::Diagonal(d) => v * d[i],
        })
        .sum()
}

fn sparse_norm(a: &Sparse) -> f64 {
    a.iter()
        .map(|&(_, i, j, v)| if i == j { v * v } else { 2.0 * v * v })
        .sum::<f64>()
        .sqrt()
}

struct Data {
    sizes: Vec<i64>,
    c: Sparse,
    a: Vec<Sparse>,
    rhs: DVector<f64>,
}

impl Data {
    fn operator(&self, m: &Blocks) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| apply(a, m)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> Blocks {
        let mut out = Blocks::zeros(&self.sizes);
        for (a, &w) in self.a.iter().zip(y.iter()) {
            out.add_sparse(a, w);
        }
        out
    }

    fn c_blocks(&self) -> Blocks {
        let mut out = Blocks::zeros(&self.sizes);
        out.add_sparse(&self.c, 1.0);
        out
    }

    /// Schur complement `O[i][j] = tr(A_i X A_j Z^-1)`.
    fn schur(&self, x: &Blocks, zinv: &Blocks) -> DMatrix<f64> {
        let m = self.a.len();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut prod = Blocks::zeros(&self.sizes);
                for &(b, k, l, v) in &self.a[j] {
                    match (&mut prod.0[b], &x.0[b], &zinv.0[b]) {
                        (BlockValue::Dense(p), BlockValue::Dense(xb), BlockValue::Dense(zb)) => {
                            p.ger(v, &xb.column(k), &zb.row(l).transpose(), 1.0);
                            if k != l {
                                p.ger(v, &xb.column(l), &zb.row(k).transpose(), 1.0);
                            }
                        }
                        (BlockValue::Diagonal(p), BlockValue::Diagonal(xb), BlockValue::Diagonal(zb)) => {
                            p[k] += v * xb[k] * zb[k];
                        }
                        _ => unreachable!("block kinds always match"),
                    }
                }
                self.a.iter().map(|ai| apply(ai, &prod)).collect()
            })
            .collect();
        let mut o = DMatrix::from_fn(m, m, |i, j| rows[j][i]);
        o = (&o + o.transpose()) * 0.5;
        o
    }
}

fn to_data(s: &StandardSdp) -> Data {
    let conv = |entries: &[crate::sdp::SdpaEntry]| -> Sparse {
        entries
            .iter()
            .map(|e| (e.block, e.i, e.j, to_f64(&e.value)))
            .collect()
    };
    let s = s.normalized();
    Data {
        sizes: s.block_sizes.clone(),
        c: conv(&s.objective),
        a: s.constraints.iter().map(|r| conv(r)).collect(),
        rhs: DVector::from_iterator(s.rows(), s.rhs.iter().map(to_f64)),
    }
}

fn check_caps(s: &StandardSdp, cfg: &SolverConfig) -> Result<()> {
    let dense: usize = s.block_sizes.iter().filter(|&&b| b > 0).map(|&b| b as usize).sum();
    if dense > cfg.max_dense_dim {
        return Err(Error::ResourceLimit {
            what: "total dense block dimension for the internal solver (export the program and use an external solver)"
                .into(),
            estimate: dense as u64,
            cap: cfg.max_dense_dim as u64,
        });
    }
    if s.rows() > cfg.max_constraints {
        return Err(Error::ResourceLimit {
            what: "constraints for the internal solver (export the program and use an external solver)".into(),
            estimate: s.rows() as u64,
            cap: cfg.max_constraints as u64,
        });
    }
    Ok(())
}

/// Search direction for a given centering target and second-order term.
struct Direction {
    dx: Blocks,
    dy: DVector<f64>,
    dz: Blocks,
}

fn direction(
    data: &Data,
    chol: &Cholesky<f64, nalgebra::Dyn>,
    x: &Blocks,
    zinv: &Blocks,
    rd: &Blocks,
    target: f64,
    correction: Option<&Blocks>,
) -> Direction {
    // dX = target Z^-1 - W - X - X dZ Z^-1,  dZ = A^T dy + Rd
    let mut centered = zinv.scaled(target);
    if let Some(w) = correction {
        centered = centered.axpy(-1.0, w);
    }
    let rhs = data.operator(&centered.axpy(-1.0, &x.mul(rd).mul(zinv))) - &data.rhs;
    let dy = chol.solve(&rhs);
    let dz = data.adjoint(&dy).axpy(1.0, rd);
    let dx = centered.axpy(-1.0, x).axpy(-1.0, &x.mul(&dz).mul(zinv)).symmetrized();
    Direction { dx, dy, dz }
}

/// Interior-point solve of a standard-form program.
pub fn solve_standard(s: &StandardSdp, cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    check_caps(s, cfg)?;
    let data = to_data(s);
    let m = data.a.len();
    let n: f64 = data.sizes.iter().map(|b| b.unsigned_abs() as f64).sum();
    let c = data.c_blocks();
    let c_norm = sparse_norm(&data.c);
    let a_norms: Vec<f64> = data.a.iter().map(sparse_norm).collect();
    let rhs_norm = data.rhs.norm();

    let alpha0 = n * data
        .rhs
        .iter()
        .zip(&a_norms)
        .map(|(ai, na)| (1.0 + ai.abs()) / (1.0 + na))
        .fold(1.0, f64::max);
    let beta0 = (1.0 + a_norms.iter().copied().fold(c_norm, f64::max)) / n.sqrt();
    let mut x = Blocks::identity(&data.sizes, alpha0);
    let mut z = Blocks::identity(&data.sizes, beta0);
    let mut y = DVector::<f64>::zeros(m);

    let mut history = Vec::new();
    let mut status = SolverStatus::IterationLimit;
    let mut iterations = 0;
    let mut stalls = 0;
    loop {
        let pobj = apply(&data.c, &x);
        let dobj = data.rhs.dot(&y);
        let rp = &data.rhs - data.operator(&x);
        let rd = data.adjoint(&y).axpy(-1.0, &c).axpy(-1.0, &z);
        let pinf = rp.norm() / (1.0 + rhs_norm);
        let dinf = rd.norm() / (1.0 + c_norm);
        let complementarity = x.dot(&z);
        let gap = complementarity.max((dobj - pobj).abs()) / (1.0 + pobj.abs() + dobj.abs());
        if iterations > 0 {
            history.push(gap);
        }
        if gap <= cfg.duality_gap_tolerance
            && pinf <= cfg.feasibility_tolerance
            && dinf <= cfg.feasibility_tolerance
        {
            status = SolverStatus::Optimal;
        }
        if x.norm() > 1e14 || y.norm() > 1e14 {
            return Err(Error::Solver(if x.norm() > 1e14 {
                "iterates diverge: the program looks unbounded (dual infeasible)".into()
            } else {
                "iterates diverge: the program looks infeasible".into()
            }));
        }
        if status == SolverStatus::Optimal || iterations >= cfg.max_iterations || stalls >= 3 {
            if stalls >= 3 && status != SolverStatus::Optimal {
                status = SolverStatus::Stalled;
            }
            return Ok(SolveOutcome {
                solution: StandardSolution {
                    y: y.iter().copied().collect(),
                    z: z.0,
                    x: x.0,
                },
                status,
                iterations,
                primal_objective: pobj,
                dual_objective: dobj,
                primal_infeasibility: pinf,
                dual_infeasibility: dinf,
                gap_history: history,
            });
        }

        let Some(zinv) = z.inverse() else {
            stalls = 3;
            continue;
        };
        let mu = complementarity / n;
        let mut schur = data.schur(&x, &zinv);
        let chol = match Cholesky::new(schur.clone()) {
            Some(ch) => ch,
            None => {
                let shift = 1e-12 * schur.diagonal().amax().max(1.0);
                for i in 0..m {
                    schur[(i, i)] += shift;
                }
                match Cholesky::new(schur) {
                    Some(ch) => ch,
                    None => {
                        stalls = 3;
                        continue;
                    }
                }
            }
        };

        let predictor = direction(&data, &chol, &x, &zinv, &rd, 0.0, None);
        let ap = x.max_step(&predictor.dx).unwrap_or(0.0).min(1.0);
        let ad = z.max_step(&predictor.dz).unwrap_or(0.0).min(1.0);
        let mu_aff = x.axpy(ap, &predictor.dx).dot(&z.axpy(ad, &predictor.dz)) / n;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let second = predictor.dx.mul(&predictor.dz).mul(&zinv);
        let step = direction(&data, &chol, &x, &zinv, &rd, sigma * mu, Some(&second));

        let ap = (cfg.step_fraction * x.max_step(&step.dx).unwrap_or(0.0)).min(1.0);
        let ad = (cfg.step_fraction * z.max_step(&step.dz).unwrap_or(0.0)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            stalls += 1;
        } else {
            stalls = 0;
        }
        x = x.axpy(ap, &step.dx);
        y += &step.dy * ad;
        z = z.axpy(ad, &step.dz);
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::sdp::SdpBlock;

    #[test]
    fn toy_program() {
        let s = SdpProblem::new(
            vec![int(1)],
            vec![SdpBlock {
                label: "m".into(),
                dim: 1,
                rows: vec![vec![(0, 0, int(1))]],
            }],
        )
        .unwrap();
        let sol = solve(&s, &SolverConfig::default()).unwrap();
        assert!((sol.lambda - 1.0).abs() < 1e-7, "{sol:?}");
        assert!(sol.matrices[0][(0, 0)].abs() < 1e-7);
    }

    #[test]
    fn zero_coefficients_give_the_smallest_objective() {
        let rows = vec![vec![], vec![], vec![]];
        let s = SdpProblem::new(
            vec![ratio(1, 3), ratio(1, 7), ratio(2, 5)],
            vec![SdpBlock {
                label: "b".into(),
                dim: 2,
                rows,
            }],
        )
        .unwrap();
        let out = solve_standard(&s.standard_form(), &SolverConfig::default()).unwrap();
        assert_eq!(out.status, SolverStatus::Optimal);
        let sol = FloatSolution::from_standard(&s, out.solution, "").unwrap();
        assert!((sol.lambda - 1.0 / 7.0).abs() < 1e-7);
    }

    #[test]
    fn caps_are_enforced() {
        let s = SdpProblem::new(
            vec![int(1)],
            vec![SdpBlock {
                label: "big".into(),
                dim: 5,
                rows: vec![vec![]],
            }],
        )
        .unwrap();
        let cfg = SolverConfig {
            max_dense_dim: 4,
            ..SolverConfig::default()
        };
        assert!(matches!(solve(&s, &cfg), Err(Error::ResourceLimit { .. })));
        let bad = SolverConfig {
            step_fraction: 1.0,
            ..SolverConfig::default()
        };
        assert!(solve(&s, &bad).is_err());
    }
}

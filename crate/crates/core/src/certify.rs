//! Exact certificates: rounding, PSD verification, the certified density
//! and the integer Ramsey bound.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::{format as format_rational, lcm_of_denominators, parse as parse_rational, round_to_denominator, to_f64, Rational};
use crate::sdp::{Assembly, FloatSolution, SdpProblem};

/// Dense rational matrix, row-major.
pub type RatMatrix = Vec<Vec<Rational>>;

/// Exponents `d` of the rounding denominators `2^d` tried by [`certify`].
pub const DENOMINATOR_EXPONENTS: [u32; 12] = [20, 24, 28, 32, 36, 40, 44, 48, 52, 56, 60, 64];

/// How far below the solver's `lambda` a certified delta may fall.
pub const DELTA_ALLOWANCE: f64 = 1e-4;

/// Rounds every entry to the nearest multiple of `1/denom`, mirroring the
/// upper triangle so the result is exactly symmetric.
pub fn round_to_rational(sol: &FloatSolution, denom: &BigInt) -> Result<Vec<RatMatrix>> {
    if denom < &BigInt::one() {
        return Err(Error::invalid("rounding denominator must be at least 1"));
    }
    Ok(sol
        .matrices
        .iter()
        .map(|m| {
            let n = m.nrows();
            let mut out = vec![vec![Rational::zero(); n]; n];
            for i in 0..n {
                for j in i..n {
                    let q = round_to_denominator(m[(i, j)], denom);
                    out[j][i] = q.clone();
                    out[i][j] = q;
                }
            }
            out
        })
        .collect())
}

/// Decides `M >= 0` exactly by fraction-free symmetric elimination with
/// diagonal pivoting.
pub fn verify_psd_exact(m: &[Vec<Rational>]) -> Result<bool> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!("row {i} has {} entries, expected {n}", row.len())));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[i][j] != m[j][i] {
                return Err(Error::Asymmetric { row: i, col: j });
            }
        }
    }
    let scale = lcm_of_denominators(m.iter().flatten());
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|q| (q * &scale).to_integer()).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut previous = BigInt::one();
    loop {
        // Zero diagonal entries force zero rows; drop those, reject the rest.
        let mut kept = Vec::with_capacity(active.len());
        for &i in &active {
            if a[i][i].is_negative() {
                return Ok(false);
            }
            if a[i][i].is_zero() {
                if active.iter().any(|&j| !a[i][j].is_zero()) {
                    return Ok(false);
                }
            } else {
                kept.push(i);
            }
        }
        active = kept;
        let Some(&p) = active.iter().max_by(|&&x, &&y| a[x][x].cmp(&a[y][y])) else {
            return Ok(true);
        };
        let pivot = a[p][p].clone();
        active.retain(|&i| i != p);
        let updates: Vec<(usize, Vec<BigInt>)> = active
            .par_iter()
            .map(|&i| {
                let row = active
                    .iter()
                    .map(|&j| (&pivot * &a[i][j] - &a[i][p] * &a[p][j])/ &previous)
                    .collect();
                (i, row)
            })
            .collect();
        for (i, row) in updates {
            for (&j, v) in active.iter().zip(row) {
                a[i][j] = v;
            }
        }
        previous = pivot;
    }
}

/// Exact slack vector and its minimum for PSD matrices.
pub fn certified_delta(s: &SdpProblem, matrices: &[RatMatrix]) -> Result<(Rational, Vec<Rational>)> {
    if matrices.len() != s.blocks.len() {
        return Err(Error::Dimension(format!(
            "{} matrices for {} blocks",
            matrices.len(),
            s.blocks.len()
        )));
    }
    for (b, m) in matrices.iter().enumerate() {
        if m.len() != s.blocks[b].dim {
            return Err(Error::Dimension(format!(
                "block {b} has size {}, expected {}",
                m.len(),
                s.blocks[b].dim
            )));
        }
    }
    let checks: Vec<Result<bool>> = matrices.par_iter().map(|m| verify_psd_exact(m)).collect();
    for (b, ok) in checks.into_iter().enumerate() {
        if !ok? {
            return Err(Error::NotPsd { block: b });
        }
    }
    let slack = s.slack(matrices)?;
    let delta = slack
        .iter()
        .min()
        .cloned()
        .ok_or_else(|| Error::invalid("program without rows"))?;
    Ok((delta, slack))
}

/// `m + 1` for the largest `m` with `m^(ell-1) * delta <= 1`.
pub fn ramsey_bound(delta: &Rational, ell: usize) -> Result<u64> {
    if !delta.is_positive() {
        return Err(Error::Certification(format!(
            "delta {} is not positive, no bound follows",
            format_rational(delta)
        )));
    }
    if delta > &Rational::one() {
        return Err(Error::invalid("a density cannot exceed 1"));
    }
    if ell < 2 {
        return Err(Error::invalid("ell must be at least 2"));
    }
    let fits = |m: &BigInt| -> bool {
        let power = BigRational::from_integer(num_traits::pow(m.clone(), ell - 1));
        power * delta <= Rational::one()
    };
    let mut lo = BigInt::one();
    let mut hi = BigInt::from(2);
    while fits(&hi) {
        lo = hi.clone();
        hi *= 2;
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + 1u32)
        .to_u64()
        .ok_or_else(|| Error::Certification("bound does not fit in 64 bits".into()))
}

/// Hash of the problem text and every key the program was built from.
pub fn fingerprint(asm: &Assembly) -> String {
    let mut hasher = Sha256::new();
    hasher.update(asm.problem.to_string().as_bytes());
    for key in asm.basis().keys() {
        hasher.update(format!("graph {key}\n").as_bytes());
    }
    for (sigma, flags) in asm.types.iter().zip(&asm.flags) {
        hasher.update(format!("type {}\n", sigma.key()).as_bytes());
        for f in flags {
            hasher.update(format!("flag {}\n", f.key()).as_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub fingerprint: String,
    pub ell: usize,
    /// Block labels (type keys), in block order.
    pub types: Vec<String>,
    pub matrices: Vec<RatMatrix>,
    pub delta: Rational,
    pub slack: Vec<Rational>,
    pub bound: u64,
    /// Rounding denominator the matrices were found at, if rounded.
    pub denominator: Option<BigInt>,
}

impl Certificate {
    /// Certificate for exact matrices, checked against `asm`.
    pub fn from_exact(asm: &Assembly, matrices: Vec<RatMatrix>) -> Result<Self> {
        let (delta, slack) = certified_delta(&asm.sdp, &matrices)?;
        let bound = ramsey_bound(&delta, asm.problem.ell)?;
        Ok(Certificate {
            fingerprint: fingerprint(asm),
            ell: asm.problem.ell,
            types: asm.sdp.blocks.iter().map(|b| b.label.clone()).collect(),
            matrices,
            delta,
            slack,
            bound,
            denominator: None,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "flagram-certificate 1");
        let _ = writeln!(out, "fingerprint {}", self.fingerprint);
        let _ = writeln!(out, "ell {}", self.ell);
        if let Some(d) = &self.denominator {
            let _ = writeln!(out, "denominator {d}");
        }
        let _ = writeln!(out, "types {}", self.types.len());
        for (label, m) in self.types.iter().zip(&self.matrices) {
            let _ = writeln!(out, "type {label} {}", m.len());
            for row in m {
                let cells: Vec<String> = row.iter().map(format_rational).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
        }
        let _ = writeln!(out, "delta {}", format_rational(&self.delta));
        let _ = writeln!(out, "bound {}", self.bound);
        let slack: Vec<String> = self.slack.iter().map(format_rational).collect();
        let _ = writeln!(out, "slack {}", slack.join(" "));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        let end = text.lines().count() + 1;
        let mut field = |name: &str| -> Result<(usize, String)> {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(end, format!("missing `{name}`")))?;
            if name.is_empty() {
                return Ok((ln, line.to_string()));
            }
            let rest = line
                .strip_prefix(name)
                .filter(|r| r.is_empty() || r.starts_with(' '))
                .ok_or_else(|| Error::parse(ln, format!("expected `{name}`")))?;
            Ok((ln, rest.trim().to_string()))
        };
        let q = |ln: usize, t: &str| parse_rational(t).ok_or_else(|| Error::parse(ln, format!("bad rational {t:?}")));

        let (ln, version) = field("flagram-certificate")?;
        if version != "1" {
            return Err(Error::parse(ln, format!("unsupported certificate version {version:?}")));
        }
        let (_, fingerprint) = field("fingerprint")?;
        let (ln, ell) = field("ell")?;
        let ell: usize = ell.parse().map_err(|_| Error::parse(ln, "bad ell"))?;
        let (ln, mut next) = field("")?;
        let mut denominator = None;
        if let Some(d) = next.strip_prefix("denominator ") {
            denominator = Some(d.trim().parse::<BigInt>().map_err(|_| Error::parse(ln, "bad denominator"))?);
            next = field("")?.1;
        }
        let count: usize = next
            .strip_prefix("types ")
            .and_then(|c| c.trim().parse().ok())
            .ok_or_else(|| Error::parse(ln, "expected `types <count>`"))?;
        let mut types = Vec::with_capacity(count);
        let mut matrices = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, head) = field("type")?;
            let mut parts = head.split_whitespace();
            let (Some(label), Some(dim), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(ln, "expected `type <key> <dimension>`"));
            };
            let dim: usize = dim.parse().map_err(|_| Error::parse(ln, "bad dimension"))?;
            let mut m = Vec::with_capacity(dim);
            for _ in 0..dim {
                let (ln, row) = field("")?;
                let row = row.split_whitespace().map(|t| q(ln, t)).collect::<Result<Vec<_>>>()?;
                if row.len() != dim {
                    return Err(Error::parse(ln, format!("expected {dim} entries")));
                }
                m.push(row);
            }
            types.push(label.to_string());
            matrices.push(m);
        }
        let (ln, delta) = field("delta")?;
        let delta = q(ln, &delta)?;
        let (ln, bound) = field("bound")?;
        let bound: u64 = bound.parse().map_err(|_| Error::parse(ln, "bad bound"))?;
        let (ln, slack) = field("slack")?;
        let slack = slack.split_whitespace().map(|t| q(ln, t)).collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            fingerprint,
            ell,
            types,
            matrices,
            delta,
            slack,
            bound,
            denominator,
        })
    }

    /// Recomputes everything from `asm` and compares with the recorded values.
    pub fn verify(&self, asm: &Assembly) -> Result<()> {
        let fp = fingerprint(asm);
        if fp != self.fingerprint {
            return Err(Error::Certification(format!(
                "fingerprint mismatch: certificate {}, problem {fp}",
                self.fingerprint
            )));
        }
        let labels: Vec<&str> = asm.sdp.blocks.iter().map(|b| b.label.as_str()).collect();
        if labels != self.types.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::Certification("type list differs from the problem's".into()));
        }
        if self.ell != asm.problem.ell {
            return Err(Error::Certification("ell differs from the problem's".into()));
        }
        let (delta, slack) = certified_delta(&asm.sdp, &self.matrices)?;
        if delta != self.delta {
            return Err(Error::Certification(format!(
                "recorded delta {} but the matrices give {}",
                format_rational(&self.delta),
                format_rational(&delta)
            )));
        }
        if slack != self.slack {
            return Err(Error::Certification("recorded slack vector differs".into()));
        }
        let bound = ramsey_bound(&delta, asm.problem.ell)?;
        if bound != self.bound {
            return Err(Error::Certification(format!(
                "recorded bound {} but delta gives {bound}",
                self.bound
            )));
        }
        Ok(())
    }
}

/// Rounds `sol` at increasing precision until the matrices are PSD and the
/// certified delta is within [`DELTA_ALLOWANCE`] of the solver's `lambda`.
pub fn certify(asm: &Assembly, sol: &FloatSolution) -> Result<Certificate> {
    let target = BigRational::from_float(sol.lambda - DELTA_ALLOWANCE)
        .ok_or_else(|| Error::Certification(format!("solver lambda {} is not finite", sol.lambda)))?;
    let mut best: Option<Rational> = None;
    let mut failure = String::new();
    for exp in DENOMINATOR_EXPONENTS {
        let denom = num_traits::pow(BigInt::from(2), exp as usize);
        let matrices = round_to_rational(sol, &denom)?;
        match certified_delta(&asm.sdp, &matrices) {
            Ok((delta, slack)) => {
                if best.as_ref().is_none_or(|b| &delta > b) {
                    best = Some(delta.clone());
                }
                if delta >= target && delta.is_positive() {
                    let bound = ramsey_bound(&delta, asm.problem.ell)?;
                    return Ok(Certificate {
                        fingerprint: fingerprint(asm),
                        ell: asm.problem.ell,
                        types: asm.sdp.blocks.iter().map(|b| b.label.clone()).collect(),
                        matrices,
                        delta,
                        slack,
                        bound,
                        denominator: Some(denom),
                    });
                }
                failure = format!(
                    "at 2^{exp} the certified delta {:.6} is below lambda {:.6} - {DELTA_ALLOWANCE}",
                    to_f64(&delta),
                    sol.lambda
                );
            }
            Err(Error::NotPsd { block }) => {
                failure = format!(
                    "at 2^{exp} block {block} (type {}) is not positive semidefinite",
                    asm.sdp.blocks[block].label
                );
            }
            Err(e) => return Err(e),
        }
    }
    let best = best.map_or_else(|| "none".to_string(), |d| format!("{:.6}", to_f64(&d)));
    Err(Error::Certification(format!("best delta {best}; {failure}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use nalgebra::DMatrix;

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn psd_examples() {
        assert!(verify_psd_exact(&mat(&[&[16, -4], &[-4, 1]])).unwrap());
        assert!(!verify_psd_exact(&mat(&[&[1, 2], &[2, 1]])).unwrap());
        assert!(verify_psd_exact(&mat(&[])).unwrap());
        assert!(verify_psd_exact(&mat(&[&[0, 0], &[0, 0]])).unwrap());
        assert!(!verify_psd_exact(&mat(&[&[0, 1], &[1, 5]])).unwrap());
        assert!(!verify_psd_exact(&mat(&[&[-1]])).unwrap());
        assert!(matches!(
            verify_psd_exact(&mat(&[&[1, 2], &[3, 1]])),
            Err(Error::Asymmetric { row: 0, col: 1 })
        ));
        let m1 = mat(&[
            &[126, -48, -73, -5],
            &[-48, 126, -5, -73],
            &[-73, -5, 64, 14],
            &[-5, -73, 14, 64],
        ]);
        assert!(verify_psd_exact(&m1).unwrap());
        // Shifting by a tiny multiple of the identity off the kernel breaks it.
        let mut shifted = m1.clone();
        shifted[0][0] -= ratio(1, 1000);
        assert!(!verify_psd_exact(&shifted).unwrap());
    }

    #[test]
    fn psd_agrees_with_rank_one_sums() {
        // v v^T + w w^T is PSD; subtracting a little of u u^T with u outside
        // the span is not.
        let v = [ratio(1, 2), int(-3), int(2)];
        let w = [int(1), int(1), ratio(-1, 3)];
        let mut m = vec![vec![Rational::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = &v[i] * &v[j] + &w[i] * &w[j];
            }
        }
        assert!(verify_psd_exact(&m).unwrap());
        let u = [int(1), int(0), int(0)];
        let mut proj = m.clone();
        for i in 0..3 {
            for j in 0..3 {
                proj[i][j] -= &u[i] * &u[j] * ratio(1, 1_000_000);
            }
        }
        assert!(!verify_psd_exact(&proj).unwrap());
    }

    #[test]
    fn bounds() {
        assert_eq!(ramsey_bound(&ratio(1, 5), 2).unwrap(), 6);
        assert_eq!(ramsey_bound(&ratio(17, 100), 2).unwrap(), 6);
        assert_eq!(ramsey_bound(&ratio(1, 64), 3).unwrap(), 9);
        assert_eq!(ramsey_bound(&int(1), 2).unwrap(), 2);
        assert!(ramsey_bound(&int(0), 2).is_err());
        assert!(ramsey_bound(&ratio(-1, 2), 2).is_err());
    }

    #[test]
    fn rounding() {
        let sol = FloatSolution {
            lambda: 0.0,
            matrices: vec![DMatrix::from_row_slice(2, 2, &[0.0744, -0.0223, -0.0223, 0.0238])],
            status: String::new(),
            raw: None,
        };
        let r = round_to_rational(&sol, &BigInt::from(10_000)).unwrap();
        assert_eq!(r[0][0][0], ratio(744, 10_000));
        assert_eq!(r[0][0][1], ratio(-223, 10_000));
        assert_eq!(r[0][1][0], r[0][0][1]);
        let halves = FloatSolution {
            matrices: vec![DMatrix::from_row_slice(1, 1, &[0.375])],
            ..sol.clone()
        };
        assert_eq!(round_to_rational(&halves, &BigInt::from(8)).unwrap()[0][0][0], ratio(3, 8));
        let tiny = FloatSolution {
            matrices: vec![DMatrix::from_element(2, 2, 1e-9)],
            ..sol
        };
        assert!(round_to_rational(&tiny, &BigInt::one()).unwrap()[0]
            .iter()
            .flatten()
            .all(Zero::is_zero));
    }
}

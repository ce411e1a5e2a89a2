//! Exact coefficients of the flag algebra: induced densities, flag products
//! and the averaging operator, all as `BigRational`s.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::enumerate::{rooted_census, subsets, Basis, Flag, TypeSigma};
use crate::error::{Error, Result};
use crate::model::{canonical_key_labeled, CanonicalKey, ColorClasses, ColoredGraph, RamseyProblem};
use crate::rational::{binomial, falling_factorial, Rational};

/// Sparse vector: `(index, coefficient)` pairs sorted by index, no zeros.
pub type SparseVec = Vec<(usize, Rational)>;

fn sparse_from_map(map: BTreeMap<usize, Rational>) -> SparseVec {
    map.into_iter().filter(|(_, q)| !q.is_zero()).collect()
}

fn frac(num: u64, den: u64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Memoized canonical keys of small (possibly rooted) graphs.
pub struct KeyCache {
    classes: ColorClasses,
    map: RwLock<HashMap<(ColoredGraph, usize), CanonicalKey>>,
}

impl KeyCache {
    pub fn new(classes: &ColorClasses) -> Self {
        KeyCache {
            classes: classes.clone(),
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn key(&self, g: ColoredGraph, labeled: usize) -> CanonicalKey {
        if let Some(k) = self.map.read().expect("key cache poisoned").get(&(g.clone(), labeled)) {
            return k.clone();
        }
        let k = canonical_key_labeled(&g, labeled, &self.classes);
        self.map
            .write()
            .expect("key cache poisoned")
            .insert((g, labeled), k.clone());
        k
    }
}

/// Probability that a uniformly random `v(h)`-subset of `host` induces a
/// copy of `h` (color-blind aware).
pub fn density(h: &ColoredGraph, host: &ColoredGraph, classes: &ColorClasses) -> Rational {
    let m = h.order();
    let n = host.order();
    if m > n {
        return Rational::zero();
    }
    let target = canonical_key_labeled(h, 0, classes);
    let hits = subsets(n, m)
        .into_iter()
        .filter(|sub| canonical_key_labeled(&host.induced(sub), 0, classes) == target)
        .count();
    frac(hits as u64, binomial(n, m))
}

/// `entries[i][j] = p(lower_i, upper_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityTable {
    pub from_level: usize,
    pub to_level: usize,
    pub entries: Vec<Vec<Rational>>,
}

impl DensityTable {
    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i]
    }

    pub fn column_sum(&self, j: usize) -> Rational {
        self.entries.iter().map(|row| row[j].clone()).sum()
    }
}

pub fn density_table(p: &RamseyProblem, lower: &Basis, upper: &Basis) -> Result<DensityTable> {
    let m = lower.level();
    let n = upper.level();
    if m > n {
        return Err(Error::invalid(format!("density table from order {m} to smaller order {n}")));
    }
    let cache = KeyCache::new(&p.classes);
    let total = binomial(n, m);
    let columns: Vec<Result<Vec<Rational>>> = upper
        .graphs()
        .par_iter()
        .map(|host| {
            let mut counts = vec![0u64; lower.len()];
            for sub in subsets(n, m) {
                let key = cache.key(host.induced(&sub), 0);
                let i = lower.position(&key).ok_or_else(|| {
                    Error::invalid(format!("induced subgraph {key} missing from the order-{m} basis"))
                })?;
                counts[i] += 1;
            }
            Ok(counts.into_iter().map(|c| frac(c, total)).collect())
        })
        .collect();
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    let entries = (0..lower.len())
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    Ok(DensityTable {
        from_level: m,
        to_level: n,
        entries,
    })
}

/// Density of independent `ell`-sets (the all-`0` graph on `ell` vertices)
/// expressed over `upper`, via the density table from `lower` (order `ell`).
pub fn objective_vector(p: &RamseyProblem, lower: &Basis, upper: &Basis) -> Result<Vec<Rational>> {
    if lower.level() != p.ell || upper.level() < p.ell {
        return Err(Error::invalid(format!(
            "objective needs bases of order ell={} and at least ell, got {} and {}",
            p.ell,
            lower.level(),
            upper.level()
        )));
    }
    let independent = lower
        .find(&ColoredGraph::empty(p.ell), &p.classes)
        .ok_or_else(|| Error::invalid("the independent set is not admissible"))?;
    let table = density_table(p, lower, upper)?;
    Ok(table.row(independent).to_vec())
}

/// `p(F1, F2; H)` for every flag `H` of `targets` (all of order
/// `v(F1) + v(F2) - v(sigma)`): the probability that a random split of the
/// unlabeled vertices of `H` into parts of sizes `v(F1) - s` and
/// `v(F2) - s` extends the root to `F1` and `F2` respectively.
pub fn product_expand(f1: &Flag, f2: &Flag, targets: &[Flag], classes: &ColorClasses) -> Result<SparseVec> {
    if f1.sigma_key() != f2.sigma_key() {
        return Err(Error::TypeMismatch("flags have different types".into()));
    }
    let s = f1.type_size();
    let order = f1.order() + f2.order() - s;
    let a = f1.order() - s;
    let splits = binomial(order - s, a);
    let mut out = SparseVec::new();
    for (t, h) in targets.iter().enumerate() {
        if h.sigma_key() != f1.sigma_key() {
            return Err(Error::TypeMismatch(format!("target flag {t} has another type")));
        }
        if h.order() != order {
            return Err(Error::invalid(format!(
                "target flag {t} has order {}, expected {order}",
                h.order()
            )));
        }
        let mut hits = 0u64;
        for part in subsets(order - s, a) {
            let (first, second) = split_rooted(h.graph(), s, &part);
            if canonical_key_labeled(&first, s, classes) == *f1.key()
                && canonical_key_labeled(&second, s, classes) == *f2.key()
            {
                hits += 1;
            }
        }
        if hits > 0 {
            out.push((t, frac(hits, splits)));
        }
    }
    Ok(out)
}

/// Root `0..s` plus the chosen unlabeled vertices, and root plus the rest.
/// `part` indexes the unlabeled vertices `s..n` from zero.
fn split_rooted(g: &ColoredGraph, s: usize, part: &[usize]) -> (ColoredGraph, ColoredGraph) {
    let n = g.order();
    let mut first: Vec<usize> = (0..s).collect();
    let mut second: Vec<usize> = (0..s).collect();
    let mut in_part = vec![false; n - s];
    for &i in part {
        in_part[i] = true;
    }
    for (i, &chosen) in in_part.iter().enumerate() {
        if chosen {
            first.push(s + i);
        } else {
            second.push(s + i);
        }
    }
    (g.induced(&first), g.induced(&second))
}

/// The averaging operator from `sigma`-flags of order `n` to the order-`n`
/// basis: `[[H^sigma]] = p_H^sigma * H`.
#[derive(Clone, Debug)]
pub struct AveragingOperator {
    pub sigma: TypeSigma,
    pub level: usize,
    /// All `sigma`-flags of order `level`, sorted by key.
    pub flags: Vec<Flag>,
    /// Basis index of each flag's underlying graph.
    pub graph_of: Vec<usize>,
    /// `p_H^sigma`: probability that a random injective placement of the
    /// root in the underlying graph yields this flag.
    pub coefficient: Vec<Rational>,
}

impl AveragingOperator {
    pub fn new(p: &RamseyProblem, sigma: &TypeSigma, basis: &Basis) -> Self {
        let census = rooted_census(p, sigma, basis);
        let placements = falling_factorial(basis.level(), sigma.size());
        let mut flags = Vec::with_capacity(census.len());
        let mut graph_of = Vec::with_capacity(census.len());
        let mut coefficient = Vec::with_capacity(census.len());
        for (key, (gi, count)) in census {
            flags.push(Flag::from_key(key, sigma.key().clone()));
            graph_of.push(gi);
            coefficient.push(frac(count, placements));
        }
        AveragingOperator {
            sigma: sigma.clone(),
            level: basis.level(),
            flags,
            graph_of,
            coefficient,
        }
    }

    pub fn position(&self, key: &CanonicalKey) -> Option<usize> {
        self.flags.binary_search_by(|f| f.key().cmp(key)).ok()
    }

    /// Maps a combination of `sigma`-flags (indices into `self.flags`) to
    /// the unlabeled basis.
    pub fn apply(&self, v: &[(usize, Rational)]) -> SparseVec {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (t, q) in v {
            let term = q * &self.coefficient[*t];
            *out.entry(self.graph_of[*t]).or_insert_with(Rational::zero) += term;
        }
        sparse_from_map(out)
    }
}

/// `coeffs[(i, j)]`, `i <= j`, is `[[F_i x F_j]]_sigma` over the order-`n` basis.
#[derive(Clone, Debug)]
pub struct ProductTable {
    pub sigma: TypeSigma,
    pub flag_order: usize,
    pub flags: Vec<Flag>,
    pub coeffs: BTreeMap<(usize, usize), SparseVec>,
}

impl ProductTable {
    /// Products of all pairs of `flags` (the `sigma`-flags of one order),
    /// averaged through `op` (built at order `2f - s`).
    pub fn build(flags: Vec<Flag>, op: &AveragingOperator, classes: &ColorClasses) -> Result<Self> {
        let sigma = op.sigma.clone();
        let s = sigma.size();
        let f = flags.first().map(Flag::order).unwrap_or(s);
        if op.level + s != 2 * f {
            return Err(Error::invalid(format!(
                "flags of order {f} with a type of size {s} multiply into order {}, not {}",
                2 * f - s,
                op.level
            )));
        }
        if let Some(bad) = flags.iter().find(|fl| fl.order() != f || fl.sigma_key() != sigma.key()) {
            return Err(Error::TypeMismatch(format!("flag {} does not belong to this table", bad.key())));
        }
        let index: HashMap<&CanonicalKey, usize> = flags.iter().enumerate().map(|(i, fl)| (fl.key(), i)).collect();
        let cache = KeyCache::new(classes);
        let splits = binomial(op.level - s, f - s);
        let parts = subsets(op.level - s, f - s);

        // Per order-n flag: ordered pair counts of (A-part, B-part) flags.
        let per_flag: Vec<Result<Vec<((usize, usize), u64)>>> = op
            .flags
            .par_iter()
            .map(|h| {
                let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
                for part in &parts {
                    let (first, second) = split_rooted(h.graph(), s, part);
                    let i = index.get(&cache.key(first, s));
                    let j = index.get(&cache.key(second, s));
                    match (i, j) {
                        (Some(&i), Some(&j)) => *counts.entry((i, j)).or_insert(0) += 1,
                        _ => {
                            return Err(Error::invalid(format!(
                                "a split of flag {} is missing from the flag list",
                                h.key()
                            )))
                        }
                    }
                }
                Ok(counts.into_iter().collect())
            })
            .collect();

        let mut acc: BTreeMap<(usize, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
        for (t, counts) in per_flag.into_iter().enumerate() {
            for ((i, j), c) in counts? {
                if i > j {
                    continue;
                }
                let value = frac(c, splits) * &op.coefficient[t];
                *acc.entry((i, j))
                    .or_default()
                    .entry(op.graph_of[t])
                    .or_insert_with(Rational::zero) += value;
            }
        }
        let coeffs = acc.into_iter().map(|(ij, m)| (ij, sparse_from_map(m))).collect();
        Ok(ProductTable {
            sigma,
            flag_order: f,
            flags,
            coeffs,
        })
    }

    /// `[[F_i x F_j]]` in either index order.
    pub fn get(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        let key = (i.min(j), i.max(j));
        self.coeffs.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dim(&self) -> usize {
        self.flags.len()
    }
}

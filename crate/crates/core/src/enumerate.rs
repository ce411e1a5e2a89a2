//! Admissible graphs, types and flags up to isomorphism.
//!
//! Graphs of order `n` are generated from the order `n - 1` representatives
//! by adding one vertex in every blow-up consistent way, dropping
//! inadmissible candidates and deduplicating by canonical key. Since
//! admissibility is hereditary, every admissible graph of order `n` is
//! reached from one of its induced subgraphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    canonical_key, canonical_key_labeled, is_admissible, CanonicalKey, ColorClasses, ColoredGraph,
    RamseyProblem, NON_EDGE,
};
use crate::rational::binomial;

/// Environment variable overriding [`Limits::max_graphs`].
pub const MAX_GRAPHS_ENV: &str = "FLAGRAM_MAX_GRAPHS";

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Largest basis or flag list any stage may build.
    pub max_graphs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_graphs: 2_000_000 }
    }
}

impl Limits {
    /// Defaults, with `FLAGRAM_MAX_GRAPHS` applied when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(MAX_GRAPHS_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            limits.max_graphs = cap;
        }
        limits
    }

    fn check(&self, what: impl FnOnce() -> String, count: usize) -> Result<()> {
        if count > self.max_graphs {
            return Err(Error::ResourceLimit {
                what: what(),
                estimate: count as u64,
                cap: self.max_graphs as u64,
            });
        }
        Ok(())
    }
}

/// The admissible graphs of one order, sorted by canonical key.
#[derive(Clone, Debug)]
pub struct Basis {
    level: usize,
    graphs: Vec<ColoredGraph>,
    keys: Vec<CanonicalKey>,
    index: HashMap<CanonicalKey, usize>,
}

impl Basis {
    fn from_keys(level: usize, keys: BTreeSet<CanonicalKey>) -> Self {
        let keys: Vec<CanonicalKey> = keys.into_iter().collect();
        let graphs = keys.iter().map(CanonicalKey::graph).collect();
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Basis {
            level,
            graphs,
            keys,
            index,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[ColoredGraph] {
        &self.graphs
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    pub fn graph(&self, i: usize) -> &ColoredGraph {
        &self.graphs[i]
    }

    pub fn position(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Index of the graph isomorphic to `g`, if it is in the basis.
    pub fn find(&self, g: &ColoredGraph, classes: &ColorClasses) -> Option<usize> {
        self.position(&canonical_key(g, classes))
    }
}

/// All admissible graphs of order `n`.
pub fn enumerate_graphs(p: &RamseyProblem, n: usize) -> Result<Basis> {
    let mut levels = enumerate_levels(p, n, &Limits::from_env())?;
    Ok(levels.pop().expect("levels 0..=n are built"))
}

/// Bases of every order `0..=n`.
pub fn enumerate_levels(p: &RamseyProblem, n: usize, limits: &Limits) -> Result<Vec<Basis>> {
    let mut levels = Vec::with_capacity(n + 1);
    let mut zero = BTreeSet::new();
    zero.insert(canonical_key(&ColoredGraph::empty(0), &p.classes));
    levels.push(Basis::from_keys(0, zero));
    for _ in 1..=n {
        let next = extend_basis(p, levels.last().expect("level 0 exists"), limits)?;
        levels.push(next);
    }
    Ok(levels)
}

/// One-vertex extensions of every graph of `prev` that stay admissible.
pub fn extend_basis(p: &RamseyProblem, prev: &Basis, limits: &Limits) -> Result<Basis> {
    let level = prev.level() + 1;
    let k = p.k();
    let estimate: usize = prev
        .graphs()
        .iter()
        .map(|g| blowup_classes(g).len() + (k as u64).saturating_pow(blowup_classes(g).len() as u32) as usize)
        .sum();
    limits.check(|| format!("candidates at order {level}"), estimate)?;

    let keys: BTreeSet<CanonicalKey> = prev
        .graphs()
        .par_iter()
        .flat_map_iter(|g| {
            extensions(g, k)
                .into_iter()
                .filter(|h| is_admissible(h, p))
                .map(|h| canonical_key(&h, &p.classes))
                .collect::<Vec<_>>()
        })
        .collect();
    limits.check(|| format!("admissible graphs of order {level}"), keys.len())?;
    Ok(Basis::from_keys(level, keys))
}

/// Classes of the color-0 relation, each as a sorted vertex list.
fn blowup_classes(g: &ColoredGraph) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'vertex: for v in 0..g.order() {
        for class in classes.iter_mut() {
            if g.color(class[0], v) == NON_EDGE {
                class.push(v);
                continue 'vertex;
            }
        }
        classes.push(vec![v]);
    }
    classes
}

/// Every blow-up consistent way to add one vertex to a consistent graph:
/// join an existing class, or open a new class with one nonzero color per
/// existing class.
fn extensions(g: &ColoredGraph, k: usize) -> Vec<ColoredGraph> {
    let classes = blowup_classes(g);
    let n = g.order();
    let mut out = Vec::new();
    for class in &classes {
        out.push(g.clone_vertex(class[0]));
    }
    let m = classes.len();
    let mut choice = vec![1u8; m];
    loop {
        let mut row = vec![NON_EDGE; n];
        for (class, &c) in classes.iter().zip(&choice) {
            for &v in class {
                row[v] = c;
            }
        }
        out.push(g.extend(&row));
        // Odometer over {1..k}^m.
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            if (choice[i] as usize) < k {
                choice[i] += 1;
                break;
            }
            choice[i] = 1;
            i += 1;
        }
    }
}

/// A fully labeled admissible graph; labels are the vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSigma {
    graph: ColoredGraph,
    key: CanonicalKey,
}

impl TypeSigma {
    pub fn new(graph: ColoredGraph, classes: &ColorClasses) -> Self {
        let key = canonical_key_labeled(&graph, graph.order(), classes);
        TypeSigma {
            graph: key.graph(),
            key,
        }
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn size(&self) -> usize {
        self.graph.order()
    }
}

/// Types of size `s`: labeled admissible graphs up to color-blind
/// equivalence with labels fixed, restricted to those occurring in an
/// admissible graph of order `p.flag_order`.
pub fn enumerate_types(p: &RamseyProblem, s: usize) -> Result<Vec<TypeSigma>> {
    let top = p.flag_order.max(s);
    let levels = enumerate_levels(p, top, &Limits::from_env())?;
    Ok(types_from_levels(p, s, &levels))
}

/// As [`enumerate_types`], reusing prebuilt bases (`levels[i]` has order `i`).
pub fn types_from_levels(p: &RamseyProblem, s: usize, levels: &[Basis]) -> Vec<TypeSigma> {
    let top = &levels[p.flag_order.max(s)];
    let occurring: HashSet<CanonicalKey> = top
        .graphs()
        .par_iter()
        .flat_map_iter(|g| {
            subsets(g.order(), s)
                .into_iter()
                .map(|sub| canonical_key(&g.induced(&sub), &p.classes))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut keys = BTreeSet::new();
    for g in levels[s].graphs() {
        if !occurring.contains(&canonical_key(g, &p.classes)) {
            continue;
        }
        for perm in permutations(s) {
            keys.insert(canonical_key_labeled(&g.induced(&perm), s, &p.classes));
        }
    }
    keys.into_iter()
        .map(|key| TypeSigma {
            graph: key.graph(),
            key,
        })
        .collect()
}

/// A graph with a fixed embedding of its type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    graph: ColoredGraph,
    embedding: Vec<usize>,
    key: CanonicalKey,
    sigma: CanonicalKey,
}

impl Flag {
    /// Builds the flag `(graph, embedding)` of type `sigma`. The induced
    /// labeled subgraph on `embedding` must be equivalent to `sigma`.
    pub fn new(graph: &ColoredGraph, embedding: &[usize], sigma: &TypeSigma, classes: &ColorClasses) -> Result<Self> {
        let s = sigma.size();
        if embedding.len() != s {
            return Err(Error::TypeMismatch(format!(
                "embedding has {} vertices, type has {s}",
                embedding.len()
            )));
        }
        let mut seen = vec![false; graph.order()];
        for &v in embedding {
            if v >= graph.order() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid("embedding must list distinct vertices of the graph"));
            }
        }
        if canonical_key_labeled(&graph.induced(embedding), s, classes) != *sigma.key() {
            return Err(Error::TypeMismatch("embedding does not induce the type".into()));
        }
        Ok(Flag::from_rooted(&rooted_order(graph, embedding), sigma.key().clone(), classes))
    }

    /// `rooted` already has the embedding at vertices `0..s`.
    fn from_rooted(rooted: &ColoredGraph, sigma: CanonicalKey, classes: &ColorClasses) -> Self {
        let s = sigma.order();
        let key = canonical_key_labeled(rooted, s, classes);
        Flag {
            graph: key.graph(),
            embedding: (0..s).collect(),
            key,
            sigma,
        }
    }

    pub(crate) fn from_key(key: CanonicalKey, sigma: CanonicalKey) -> Self {
        let s = sigma.order();
        Flag {
            graph: key.graph(),
            embedding: (0..s).collect(),
            key,
            sigma,
        }
    }

    /// Canonical representative; its root is exactly the type's graph.
    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn sigma_key(&self) -> &CanonicalKey {
        &self.sigma
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn type_size(&self) -> usize {
        self.sigma.order()
    }
}

/// Vertex list with `embedding` first, then the remaining vertices ascending.
fn rooted_order(graph: &ColoredGraph, embedding: &[usize]) -> ColoredGraph {
    let mut order = embedding.to_vec();
    order.extend((0..graph.order()).filter(|v| !embedding.contains(v)));
    graph.induced(&order)
}

/// Every rooted copy of `sigma` in the graphs of `basis`: flag key →
/// (index of the underlying graph, number of injective root placements
/// producing this flag).
pub fn rooted_census(p: &RamseyProblem, sigma: &TypeSigma, basis: &Basis) -> BTreeMap<CanonicalKey, (usize, u64)> {
    let s = sigma.size();
    let per_graph: Vec<Vec<(CanonicalKey, usize)>> = basis
        .graphs()
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut found = Vec::new();
            for theta in injections(g.order(), s) {
                if canonical_key_labeled(&g.induced(&theta), s, &p.classes) != *sigma.key() {
                    continue;
                }
                let rooted = rooted_order(g, &theta);
                found.push((canonical_key_labeled(&rooted, s, &p.classes), gi));
            }
            found
        })
        .collect();
    let mut census: BTreeMap<CanonicalKey, (usize, u64)> = BTreeMap::new();
    for (key, gi) in per_graph.into_iter().flatten() {
        census.entry(key).or_insert((gi, 0)).1 += 1;
    }
    census
}

/// All `sigma`-flags of order `f`, sorted by key.
pub fn enumerate_flags(p: &RamseyProblem, sigma: &TypeSigma, f: usize) -> Result<Vec<Flag>> {
    let basis = enumerate_graphs(p, f)?;
    flags_from_basis(p, sigma, &basis)
}

/// As [`enumerate_flags`], reusing the basis of order `f`.
pub fn flags_from_basis(p: &RamseyProblem, sigma: &TypeSigma, basis: &Basis) -> Result<Vec<Flag>> {
    if basis.level() < sigma.size() {
        return Err(Error::invalid(format!(
            "flags of order {} cannot contain a type of size {}",
            basis.level(),
            sigma.size()
        )));
    }
    let census = rooted_census(p, sigma, basis);
    Limits::from_env().check(|| format!("flags of order {}", basis.level()), census.len())?;
    Ok(census
        .into_keys()
        .map(|key| Flag::from_key(key, sigma.key().clone()))
        .collect())
}

/// Ordered `k`-tuples of distinct elements of `0..n`, lexicographic.
pub fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(n, k, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(n, k, &mut Vec::with_capacity(k), &mut vec![false; n], &mut out);
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    injections(n, n)
}

/// `k`-subsets of `0..n` as ascending lists, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlainGraph;

    fn r33(n: usize) -> RamseyProblem {
        let classes = ColorClasses::new(2, vec![vec![1, 2]]).unwrap();
        RamseyProblem::new(vec![PlainGraph::complete(3), PlainGraph::complete(3)], classes, 2, n).unwrap()
    }

    #[test]
    fn combinatorial_helpers() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(2, 3).len(), 0);
        assert_eq!(injections(4, 2).len(), 12);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn single_vertex_level() {
        assert_eq!(enumerate_graphs(&r33(4), 1).unwrap().len(), 1);
    }

    #[test]
    fn r33_counts() {
        let p = r33(4);
        assert_eq!(enumerate_graphs(&p, 3).unwrap().len(), 3);
        assert_eq!(enumerate_graphs(&p, 4).unwrap().len(), 7);
    }

    #[test]
    fn resource_cap_is_enforced() {
        let p = r33(4);
        let limits = Limits { max_graphs: 2 };
        match enumerate_levels(&p, 4, &limits) {
            Err(Error::ResourceLimit { estimate, cap, .. }) => {
                assert_eq!(cap, 2);
                assert!(estimate > 2);
            }
            other => panic!("expected a resource error, got {other:?}"),
        }
    }

    #[test]
    fn empty_type_and_trivial_flags() {
        let p = r33(4);
        let empty = enumerate_types(&p, 0).unwrap();
        assert_eq!(empty.len(), 1);
        let types = enumerate_types(&p, 2).unwrap();
        assert_eq!(types.len(), 2);
        for sigma in &types {
            let flags = enumerate_flags(&p, sigma, 2).unwrap();
            assert_eq!(flags.len(), 1);
            assert_eq!(flags[0].graph(), sigma.graph());
        }
    }

    #[test]
    fn flag_constructor_checks_the_root() {
        let p = r33(4);
        let types = enumerate_types(&p, 2).unwrap();
        let non_edge = &types[0];
        let g = ColoredGraph::with_edges(3, &[(0, 2, 1), (1, 2, 1)]);
        let f = Flag::new(&g, &[0, 1], non_edge, &p.classes).unwrap();
        assert_eq!(f.order(), 3);
        assert_eq!(&f.graph().induced(&[0, 1]), non_edge.graph());
        assert!(matches!(Flag::new(&g, &[0, 2], non_edge, &p.classes), Err(Error::TypeMismatch(_))));
        assert!(Flag::new(&g, &[0, 0], non_edge, &p.classes).is_err());
    }
}

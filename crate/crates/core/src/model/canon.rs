//! Canonical labeling of colored complete graphs.
//!
//! Color refinement produces an isomorphism-invariant ordered partition; an
//! individualization search over its non-singleton cells then looks for the
//! lexicographically smallest pair sequence. Twins (vertices with identical
//! colors towards everybody else) are interchangeable, so only one
//! representative per twin class is individualized. The whole procedure is
//! repeated for every allowed color permutation and the minimum is kept.

use std::fmt;

use super::graph::{pair_index, Color, ColoredGraph};
use super::problem::ColorClasses;
use crate::error::{Error, Result};

/// Serialized canonical form: `[order, labeled, pair colors...]`.
///
/// Orders by byte string, so sorting keys sorts by order first, then by the
/// number of labeled vertices, then by the canonical pair sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0[0] as usize
    }

    /// Number of labeled (root) vertices.
    pub fn labeled(&self) -> usize {
        self.0[1] as usize
    }

    /// The canonical representative. Labeled vertices come first, in label order.
    pub fn graph(&self) -> ColoredGraph {
        ColoredGraph::from_pairs(self.order(), self.0[2..].to_vec())
            .expect("canonical keys hold a full pair sequence")
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let bytes = hex::decode(text.trim())
            .map_err(|e| Error::invalid(format!("bad key hex {text:?}: {e}")))?;
        if bytes.len() < 2 {
            return Err(Error::invalid("key shorter than its header"));
        }
        let n = bytes[0] as usize;
        if bytes.len() != 2 + n * n.saturating_sub(1) / 2 || bytes[1] as usize > n {
            return Err(Error::invalid(format!("malformed key {text:?}")));
        }
        Ok(CanonicalKey(bytes))
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Canonical key of an unlabeled graph.
pub fn canonical_key(g: &ColoredGraph, classes: &ColorClasses) -> CanonicalKey {
    canonical_key_labeled(g, 0, classes)
}

/// Canonical key where vertices `0..labeled` are fixed in place (a flag or a
/// type); only the remaining vertices are relabeled.
pub fn canonical_key_labeled(g: &ColoredGraph, labeled: usize, classes: &ColorClasses) -> CanonicalKey {
    canonical_form(g, labeled, classes).0
}

/// Canonical key together with the vertex ordering and color permutation
/// that produce it: `key.graph() == g.recolor(&perm).induced(&ordering)`.
pub fn canonical_form(
    g: &ColoredGraph,
    labeled: usize,
    classes: &ColorClasses,
) -> (CanonicalKey, Vec<usize>, Vec<Color>) {
    let n = g.order();
    assert!(labeled <= n, "more labels than vertices");
    assert!(n < 256, "graphs are limited to 255 vertices");
    let twins = twin_classes(g);
    let mut best: Option<(Vec<Color>, Vec<usize>, Vec<Color>)> = None;
    for perm in classes.permutations() {
        let h = g.recolor(&perm);
        let mut search = Search {
            g: &h,
            ncolors: classes.k() + 1,
            twins: &twins,
            best: best.as_ref().map(|b| b.0.clone()),
            best_order: None,
        };
        let mut cells: Vec<Vec<usize>> = (0..labeled).map(|v| vec![v]).collect();
        if labeled < n {
            cells.push((labeled..n).collect());
        }
        search.refine(&mut cells);
        search.run(cells);
        if let Some(order) = search.best_order {
            let s = search.best.expect("best string set alongside order");
            best = Some((s, order, perm));
        }
    }
    let (string, order, perm) = best.expect("at least the identity permutation is searched");
    let mut bytes = Vec::with_capacity(string.len() + 2);
    bytes.push(n as u8);
    bytes.push(labeled as u8);
    bytes.extend_from_slice(&string);
    (CanonicalKey(bytes), order, perm)
}

/// Twin class id per vertex; `u` and `v` are twins when every third vertex
/// sees them in the same color.
fn twin_classes(g: &ColoredGraph) -> Vec<usize> {
    let n = g.order();
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for u in 0..n {
        if class[u] != usize::MAX {
            continue;
        }
        class[u] = next;
        for v in u + 1..n {
            if class[v] == usize::MAX && (0..n).all(|w| w == u || w == v || g.color(u, w) == g.color(v, w)) {
                class[v] = next;
            }
        }
        next += 1;
    }
    class
}

struct Search<'a> {
    g: &'a ColoredGraph,
    ncolors: usize,
    twins: &'a [usize],
    best: Option<Vec<Color>>,
    best_order: Option<Vec<usize>>,
}

impl Search<'_> {
    /// Splits cells by neighbor-color counts until the partition is equitable.
    fn refine(&self, cells: &mut Vec<Vec<usize>>) {
        let n = self.g.order();
        let mut cell_of = vec![0usize; n];
        loop {
            for (ci, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = ci;
                }
            }
            let width = cells.len() * self.ncolors;
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut signed: Vec<(Vec<u16>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig = vec![0u16; width];
                        for w in 0..n {
                            if w != v {
                                sig[cell_of[w] * self.ncolors + self.g.color(v, w) as usize] += 1;
                            }
                        }
                        (sig, v)
                    })
                    .collect();
                signed.sort();
                let mut group: Vec<usize> = vec![signed[0].1];
                for pair in signed.windows(2) {
                    if pair[0].0 != pair[1].0 {
                        next.push(std::mem::take(&mut group));
                    }
                    group.push(pair[1].1);
                }
                next.push(group);
            }
            let done = next.len() == cells.len();
            *cells = next;
            if done {
                break;
            }
        }
    }

    fn run(&mut self, cells: Vec<Vec<usize>>) {
        // Leading singleton cells fix a prefix of the final ordering; prune
        // when that prefix already loses against the best string.
        let fixed: Vec<usize> = cells
            .iter()
            .take_while(|c| c.len() == 1)
            .map(|c| c[0])
            .collect();
        if let Some(best) = &self.best {
            let prefix = self.string_for(&fixed);
            if prefix.as_slice() > &best[..prefix.len()] {
                return;
            }
        }
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
            let s = self.string_for(&order);
            if self.best.as_ref().is_none_or(|b| s < *b) {
                self.best = Some(s);
                self.best_order = Some(order);
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cells[target] {
            if tried.contains(&self.twins[v]) {
                continue;
            }
            tried.push(self.twins[v]);
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..target]);
            next.push(vec![v]);
            next.push(cells[target].iter().copied().filter(|&w| w != v).collect());
            next.extend_from_slice(&cells[target + 1..]);
            self.refine(&mut next);
            self.run(next);
        }
    }

    /// Pair sequence of the graph induced on `order`, in key layout.
    fn string_for(&self, order: &[usize]) -> Vec<Color> {
        let k = order.len();
        let mut s = vec![0; k * k.saturating_sub(1) / 2];
        for i in 1..k {
            for j in 0..i {
                s[pair_index(i, j)] = self.g.color(order[i], order[j]);
            }
        }
        s
    }
}

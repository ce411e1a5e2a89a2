//! Edge-colored blow-up graphs and the forbidden-family model.

mod canon;
mod graph;
mod problem;

pub use canon::{canonical_form, canonical_key, canonical_key_labeled, CanonicalKey};
pub use graph::{Color, ColoredGraph, PlainGraph, NON_EDGE};
pub use problem::{ColorClasses, RamseyProblem};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// `true` iff color `0` is an equivalence relation whose classes are
/// twins: whenever `u` and `v` share a class, every `w` sees them alike.
pub fn is_blowup_consistent(g: &ColoredGraph) -> bool {
    let n = g.order();
    for u in 0..n {
        for v in u + 1..n {
            if g.color(u, v) != NON_EDGE {
                continue;
            }
            for w in 0..n {
                if w != u && w != v && g.color(u, w) != g.color(v, w) {
                    return false;
                }
            }
        }
    }
    true
}

/// Finds an injection of `pattern` into `g` that sends every pattern edge
/// to a pair of color `color`. Pattern non-edges are unconstrained and may
/// land on non-edges. Returns the image of each pattern vertex.
pub fn find_mono_copy(g: &ColoredGraph, pattern: &PlainGraph, color: Color) -> Option<Vec<usize>> {
    find_copy(g, pattern, color, false)
}

/// Like [`find_mono_copy`], but all pattern vertices must land in pairwise
/// distinct blow-up classes: a copy in the quotient coloring. These are the
/// copies an admissible graph must avoid; a copy with two vertices in one
/// class survives in every blow-up and is allowed.
pub fn find_quotient_copy(g: &ColoredGraph, pattern: &PlainGraph, color: Color) -> Option<Vec<usize>> {
    find_copy(g, pattern, color, true)
}

fn find_copy(g: &ColoredGraph, pattern: &PlainGraph, color: Color, distinct_classes: bool) -> Option<Vec<usize>> {
    let p = pattern.order();
    if p > g.order() {
        return None;
    }
    // Pattern vertices in a connected, degree-first order so that every new
    // vertex is constrained by as many mapped neighbors as possible.
    let mut order: Vec<usize> = Vec::with_capacity(p);
    let mut placed = vec![false; p];
    while order.len() < p {
        let next = (0..p)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let back = order.iter().filter(|&&u| pattern.adjacent(u, v)).count();
                (back, pattern.degree(v), std::cmp::Reverse(v))
            })
            .expect("an unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    let host_degree: Vec<usize> = (0..g.order()).map(|v| g.color_degree(v, color)).collect();
    let mut image = vec![usize::MAX; p];
    let mut used = vec![false; g.order()];
    let search = CopySearch {
        g,
        pattern,
        color,
        order: &order,
        host_degree: &host_degree,
        distinct_classes,
    };
    if search.extend(0, &mut image, &mut used) {
        Some(image)
    } else {
        None
    }
}

struct CopySearch<'a> {
    g: &'a ColoredGraph,
    pattern: &'a PlainGraph,
    color: Color,
    order: &'a [usize],
    host_degree: &'a [usize],
    distinct_classes: bool,
}

impl CopySearch<'_> {
    fn extend(&self, depth: usize, image: &mut [usize], used: &mut [bool]) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let pv = self.order[depth];
        let need = self.pattern.degree(pv);
        for hv in 0..self.g.order() {
            if used[hv] || self.host_degree[hv] < need {
                continue;
            }
            let fits = self.order[..depth].iter().all(|&pu| {
                let c = self.g.color(image[pu], hv);
                if self.pattern.adjacent(pu, pv) {
                    c == self.color
                } else {
                    !self.distinct_classes || c != NON_EDGE
                }
            });
            if !fits {
                continue;
            }
            image[pv] = hv;
            used[hv] = true;
            if self.extend(depth + 1, image, used) {
                return true;
            }
            used[hv] = false;
        }
        image[pv] = usize::MAX;
        false
    }
}

/// Whether `g` contains `pattern` (not necessarily induced) in `color`.
pub fn contains_mono_copy(g: &ColoredGraph, pattern: &PlainGraph, color: Color) -> bool {
    find_mono_copy(g, pattern, color).is_some()
}

/// A reason for inadmissibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Vertices `(u, v, w)` with `color(u,v) = 0` but `color(u,w) != color(v,w)`.
    BlowUp(usize, usize, usize),
    /// A copy of the forbidden graph of `color`; `vertices[i]` hosts pattern vertex `i`.
    MonoCopy { color: Color, vertices: Vec<usize> },
}

pub fn find_violation(g: &ColoredGraph, p: &RamseyProblem) -> Option<Violation> {
    let n = g.order();
    for u in 0..n {
        for v in u + 1..n {
            if g.color(u, v) != NON_EDGE {
                continue;
            }
            if let Some(w) = (0..n).find(|&w| w != u && w != v && g.color(u, w) != g.color(v, w)) {
                return Some(Violation::BlowUp(u, v, w));
            }
        }
    }
    for (i, pattern) in p.forbidden.iter().enumerate() {
        let color = (i + 1) as Color;
        if let Some(vertices) = find_quotient_copy(g, pattern, color) {
            return Some(Violation::MonoCopy { color, vertices });
        }
    }
    None
}

/// Blow-up consistent and free of every forbidden monochromatic copy in the
/// quotient. For complete forbidden graphs every copy is a quotient copy.
pub fn is_admissible(g: &ColoredGraph, p: &RamseyProblem) -> bool {
    is_blowup_consistent(g)
        && p
            .forbidden
            .iter()
            .enumerate()
            .all(|(i, pattern)| find_quotient_copy(g, pattern, (i + 1) as Color).is_none())
}

/// Independent `ell`-set density of the balanced blow-up of a quotient
/// coloring on `m` vertices: `(1/m)^(ell-1)`.
pub fn quotient_density_bound(g: &ColoredGraph, ell: usize) -> Result<BigRational> {
    if g.order() == 0 {
        return Err(Error::invalid("a quotient coloring needs at least one vertex"));
    }
    if ell < 1 {
        return Err(Error::invalid("ell must be positive"));
    }
    if g.has_non_edge() {
        return Err(Error::invalid(
            "a quotient coloring must color every pair with a nonzero color",
        ));
    }
    let m = BigInt::from(g.order());
    Ok(BigRational::new(1.into(), num_traits::pow(m, ell - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn r33() -> RamseyProblem {
        let classes = ColorClasses::new(2, vec![vec![1, 2]]).unwrap();
        RamseyProblem::new(vec![PlainGraph::complete(3), PlainGraph::complete(3)], classes, 2, 4).unwrap()
    }

    /// The pentagon/pentagram coloring of K5.
    fn c5_coloring() -> ColoredGraph {
        let mut g = ColoredGraph::complete(5, 2);
        for i in 0..5 {
            g.set_color(i, (i + 1) % 5, 1);
        }
        g
    }

    #[test]
    fn single_edge_triple_is_not_a_blowup() {
        let g = ColoredGraph::with_edges(3, &[(0, 1, 1)]);
        assert!(!is_blowup_consistent(&g));
    }

    #[test]
    fn two_colored_edges_with_non_edge_is_not_a_blowup() {
        let g = ColoredGraph::with_edges(3, &[(0, 1, 1), (0, 2, 2)]);
        assert!(!is_blowup_consistent(&g));
        let same = ColoredGraph::with_edges(3, &[(0, 1, 1), (0, 2, 1)]);
        assert!(is_blowup_consistent(&same));
    }

    #[test]
    fn graphs_without_non_edges_are_consistent() {
        assert!(is_blowup_consistent(&c5_coloring()));
        assert!(is_blowup_consistent(&ColoredGraph::complete(6, 1)));
    }

    #[test]
    fn mono_copies() {
        let k3 = PlainGraph::complete(3);
        assert!(contains_mono_copy(&ColoredGraph::complete(3, 1), &k3, 1));
        assert!(!contains_mono_copy(&ColoredGraph::complete(3, 1), &k3, 2));
        assert!(!contains_mono_copy(&c5_coloring(), &k3, 1));
        assert!(!contains_mono_copy(&c5_coloring(), &k3, 2));
        assert!(!contains_mono_copy(&ColoredGraph::complete(2, 1), &k3, 1));
        let c4 = PlainGraph::cycle(4);
        // K4 contains C4 as a non-induced subgraph.
        assert!(contains_mono_copy(&ColoredGraph::complete(4, 1), &c4, 1));
        let copy = find_mono_copy(&c5_coloring(), &PlainGraph::cycle(5), 1).unwrap();
        for i in 0..5 {
            assert_eq!(c5_coloring().color(copy[i], copy[(i + 1) % 5]), 1);
        }
    }

    #[test]
    fn admissibility_examples() {
        let p = r33();
        assert!(is_admissible(&ColoredGraph::empty(1), &p));
        assert!(!is_admissible(&ColoredGraph::complete(3, 1), &p));
        assert!(is_admissible(&c5_coloring(), &p));
        match find_violation(&ColoredGraph::complete(5, 2), &p) {
            Some(Violation::MonoCopy { color: 2, vertices }) => assert_eq!(vertices.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quotient_bounds() {
        assert_eq!(quotient_density_bound(&c5_coloring(), 2).unwrap(), ratio(1, 5));
        assert_eq!(quotient_density_bound(&ColoredGraph::empty(1), 4).unwrap(), ratio(1, 1));
        assert_eq!(quotient_density_bound(&c5_coloring(), 3).unwrap(), ratio(1, 25));
        assert!(quotient_density_bound(&ColoredGraph::empty(2), 2).is_err());
    }

    #[test]
    fn quotient_copies_ignore_shared_classes() {
        // Path a-x-b in color 1 with a and b in one class: a literal copy of
        // P3, but not a copy in the quotient (a single edge).
        let g = ColoredGraph::with_edges(3, &[(0, 1, 1), (2, 1, 1)]);
        let p3 = PlainGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(contains_mono_copy(&g, &p3, 1));
        assert!(find_quotient_copy(&g, &p3, 1).is_none());
        let classes = ColorClasses::singletons(1);
        let p = RamseyProblem::new(vec![p3], classes, 2, 3).unwrap();
        assert!(is_admissible(&g, &p));
        assert!(!is_admissible(&ColoredGraph::complete(3, 1), &p));
    }

    #[test]
    fn blowup_closure_on_c5() {
        let p = r33();
        let g = c5_coloring().clone_vertex(2).clone_vertex(0);
        assert!(is_admissible(&g, &p));
    }
}

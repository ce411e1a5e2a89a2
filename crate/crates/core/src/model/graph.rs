use std::fmt;

use crate::error::{Error, Result};

/// Edge color. `0` is the non-edge color: both endpoints lie in the same
/// blow-up class.
pub type Color = u8;

pub const NON_EDGE: Color = 0;

#[inline]
pub(crate) fn pair_index(u: usize, v: usize) -> usize {
    debug_assert_ne!(u, v);
    let (a, b) = if u > v { (u, v) } else { (v, u) };
    a * (a - 1) / 2 + b
}

/// A complete graph whose pairs carry a color in `{0, 1, ..., k}`.
///
/// Pairs are stored in lower-triangular row-major order: `(1,0), (2,0),
/// (2,1), (3,0), ...`. Canonical keys serialize exactly this sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredGraph {
    order: usize,
    colors: Vec<Color>,
}

impl ColoredGraph {
    /// All pairs colored `0`: a single blow-up class.
    pub fn empty(order: usize) -> Self {
        ColoredGraph {
            order,
            colors: vec![NON_EDGE; order * order.saturating_sub(1) / 2],
        }
    }

    pub fn complete(order: usize, color: Color) -> Self {
        ColoredGraph {
            order,
            colors: vec![color; order * order.saturating_sub(1) / 2],
        }
    }

    /// Builds from the lower-triangular pair sequence.
    pub fn from_pairs(order: usize, colors: Vec<Color>) -> Result<Self> {
        let expected = order * order.saturating_sub(1) / 2;
        if colors.len() != expected {
            return Err(Error::invalid(format!(
                "{} pair colors given for a graph of order {order} (expected {expected})",
                colors.len()
            )));
        }
        Ok(ColoredGraph { order, colors })
    }

    /// Builds from a full color matrix. The matrix must be square and
    /// symmetric; the diagonal is ignored.
    pub fn from_matrix(rows: &[Vec<Color>]) -> Result<Self> {
        let order = rows.len();
        let mut g = ColoredGraph::empty(order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::invalid(format!(
                    "row {} has {} entries, expected {order}",
                    i + 1,
                    row.len()
                )));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::invalid(format!(
                        "color matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                g.set_color(i, j, rows[i][j]);
            }
        }
        Ok(g)
    }

    /// `order` vertices, every listed pair `(u, v, c)` colored `c`, the rest `0`.
    pub fn with_edges(order: usize, edges: &[(usize, usize, Color)]) -> Self {
        let mut g = ColoredGraph::empty(order);
        for &(u, v, c) in edges {
            g.set_color(u, v, c);
        }
        g
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn color(&self, u: usize, v: usize) -> Color {
        self.colors[pair_index(u, v)]
    }

    #[inline]
    pub fn set_color(&mut self, u: usize, v: usize, c: Color) {
        self.colors[pair_index(u, v)] = c;
    }

    /// The lower-triangular pair sequence.
    pub fn pairs(&self) -> &[Color] {
        &self.colors
    }

    pub fn max_color(&self) -> Color {
        self.colors.iter().copied().max().unwrap_or(NON_EDGE)
    }

    pub fn has_non_edge(&self) -> bool {
        self.colors.contains(&NON_EDGE)
    }

    pub fn color_degree(&self, v: usize, c: Color) -> usize {
        (0..self.order)
            .filter(|&w| w != v && self.color(v, w) == c)
            .count()
    }

    /// Subgraph induced on `vertices`; vertex `i` of the result is
    /// `vertices[i]`. Also serves as a relabeling when `vertices` is a
    /// permutation.
    pub fn induced(&self, vertices: &[usize]) -> ColoredGraph {
        let n = vertices.len();
        let mut colors = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..n {
            for j in 0..i {
                colors.push(self.color(vertices[i], vertices[j]));
            }
        }
        ColoredGraph { order: n, colors }
    }

    /// Appends a vertex whose color towards vertex `i` is `to_existing[i]`.
    pub fn extend(&self, to_existing: &[Color]) -> ColoredGraph {
        assert_eq!(to_existing.len(), self.order);
        let mut colors = self.colors.clone();
        colors.extend_from_slice(to_existing);
        ColoredGraph {
            order: self.order + 1,
            colors,
        }
    }

    /// Applies `perm` to every pair color (`perm[c]` is the new color of `c`).
    pub fn recolor(&self, perm: &[Color]) -> ColoredGraph {
        ColoredGraph {
            order: self.order,
            colors: self.colors.iter().map(|&c| perm[c as usize]).collect(),
        }
    }

    /// Appends a twin of `v` in the same blow-up class.
    pub fn clone_vertex(&self, v: usize) -> ColoredGraph {
        let to_existing: Vec<Color> = (0..self.order)
            .map(|w| if w == v { NON_EDGE } else { self.color(v, w) })
            .collect();
        self.extend(&to_existing)
    }

    pub fn matrix(&self) -> Vec<Vec<Color>> {
        (0..self.order)
            .map(|i| {
                (0..self.order)
                    .map(|j| if i == j { 0 } else { self.color(i, j) })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoredGraph({}:", self.order)?;
        for c in &self.colors {
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.matrix().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// An uncolored simple graph, used for forbidden patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainGraph {
    order: usize,
    edges: Vec<(usize, usize)>,
}

impl PlainGraph {
    pub fn new(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= order || v >= order {
                return Err(Error::invalid(format!(
                    "edge {}-{} outside a graph of order {order}",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("loop at vertex {}", u + 1)));
            }
            let e = (u.min(v), u.max(v));
            if !normalized.contains(&e) {
                normalized.push(e);
            }
        }
        normalized.sort_unstable();
        Ok(PlainGraph {
            order,
            edges: normalized,
        })
    }

    pub fn complete(order: usize) -> Self {
        let edges: Vec<_> = (0..order)
            .flat_map(|u| (u + 1..order).map(move |v| (u, v)))
            .collect();
        PlainGraph { order, edges }
    }

    pub fn cycle(order: usize) -> Self {
        let edges: Vec<_> = (0..order).map(|u| (u, (u + 1) % order)).collect();
        PlainGraph::new(order, &edges).expect("cycle edges are in range")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    /// As a two-colored complete graph: edges color 1, non-edges color 0.
    pub fn as_colored(&self) -> ColoredGraph {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        ColoredGraph::with_edges(self.order, &edges)
    }
}

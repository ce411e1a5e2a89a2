use std::fmt;
use std::str::FromStr;

use super::canon::canonical_key;
use super::graph::{Color, PlainGraph};
use crate::error::{Error, Result};

/// Partition of the edge colors `1..=k` into color-blind classes. Colors in
/// one class may be permuted freely; color `0` is always fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClasses {
    k: usize,
    classes: Vec<Vec<Color>>,
}

impl ColorClasses {
    /// Every listed class is kept; colors not mentioned become singletons.
    pub fn new(k: usize, classes: Vec<Vec<Color>>) -> Result<Self> {
        if k == 0 || k > 32 {
            return Err(Error::invalid(format!("number of colors must be in 1..=32, got {k}")));
        }
        let mut seen = vec![false; k + 1];
        let mut normalized = Vec::new();
        for mut class in classes {
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                if c == 0 || c as usize > k {
                    return Err(Error::invalid(format!("color {c} outside 1..={k}")));
                }
                if seen[c as usize] {
                    return Err(Error::invalid(format!("color {c} appears in two color-blind classes")));
                }
                seen[c as usize] = true;
            }
            if !class.is_empty() {
                normalized.push(class);
            }
        }
        for c in 1..=k {
            if !seen[c] {
                normalized.push(vec![c as Color]);
            }
        }
        normalized.sort();
        Ok(ColorClasses {
            k,
            classes: normalized,
        })
    }

    /// No color-blindness: each color is its own class.
    pub fn singletons(k: usize) -> Self {
        ColorClasses::new(k, Vec::new()).expect("singleton classes are valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn classes(&self) -> &[Vec<Color>] {
        &self.classes
    }

    pub fn class_of(&self, c: Color) -> Option<usize> {
        self.classes.iter().position(|class| class.contains(&c))
    }

    /// All allowed color permutations as lookup tables of length `k + 1`,
    /// identity first.
    pub fn permutations(&self) -> Vec<Vec<Color>> {
        let identity: Vec<Color> = (0..=self.k as Color).collect();
        let mut result = vec![identity];
        for class in &self.classes {
            if class.len() < 2 {
                continue;
            }
            let arrangements = permutations_of(class);
            let mut next = Vec::with_capacity(result.len() * arrangements.len());
            for base in &result {
                for image in &arrangements {
                    let mut p = base.clone();
                    for (from, to) in class.iter().zip(image) {
                        p[*from as usize] = *to;
                    }
                    next.push(p);
                }
            }
            result = next;
        }
        result
    }
}

fn permutations_of(items: &[Color]) -> Vec<Vec<Color>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// The forbidden family together with the flag-algebra parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseyProblem {
    /// `forbidden[i]` must not appear in color `i + 1`.
    pub forbidden: Vec<PlainGraph>,
    pub classes: ColorClasses,
    /// Size of the independent sets whose density is bounded.
    pub ell: usize,
    /// Order of the unlabeled graphs in the basis.
    pub flag_order: usize,
    /// Type sizes to use; `None` selects the default (see [`RamseyProblem::type_sizes`]).
    pub types: Option<Vec<usize>>,
}

impl RamseyProblem {
    pub fn new(
        forbidden: Vec<PlainGraph>,
        classes: ColorClasses,
        ell: usize,
        flag_order: usize,
    ) -> Result<Self> {
        let p = RamseyProblem {
            forbidden,
            classes,
            ell,
            flag_order,
            types: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// `R(K_a, K_b, ...)` with no color-blindness.
    pub fn cliques(sizes: &[usize], ell: usize, flag_order: usize) -> Result<Self> {
        let forbidden = sizes.iter().map(|&s| PlainGraph::complete(s)).collect();
        RamseyProblem::new(forbidden, ColorClasses::singletons(sizes.len()), ell, flag_order)
    }

    pub fn k(&self) -> usize {
        self.forbidden.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.forbidden.len();
        if k == 0 {
            return Err(Error::invalid("at least one color is required"));
        }
        if self.classes.k() != k {
            return Err(Error::invalid(format!(
                "color-blind classes cover {} colors but {k} forbidden graphs are given",
                self.classes.k()
            )));
        }
        for (i, g) in self.forbidden.iter().enumerate() {
            if g.edges().is_empty() {
                return Err(Error::invalid(format!("forbidden graph for color {} has no edges", i + 1)));
            }
        }
        let trivial = ColorClasses::singletons(1);
        for class in self.classes.classes() {
            let first = &self.forbidden[class[0] as usize - 1];
            let key = canonical_key(&first.as_colored(), &trivial);
            for &c in &class[1..] {
                let other = &self.forbidden[c as usize - 1];
                if canonical_key(&other.as_colored(), &trivial) != key {
                    return Err(Error::invalid(format!(
                        "colors {} and {c} are color-blind but forbid different graphs",
                        class[0]
                    )));
                }
            }
        }
        if self.ell < 2 || self.ell > self.flag_order {
            return Err(Error::invalid(format!(
                "ell must satisfy 2 <= ell <= flag_order, got ell={} flag_order={}",
                self.ell, self.flag_order
            )));
        }
        if self.flag_order > 16 {
            return Err(Error::invalid("flag_order above 16 is not supported"));
        }
        if let Some(types) = &self.types {
            for &s in types {
                if s + 2 > self.flag_order || !(self.flag_order - s).is_multiple_of(2) {
                    return Err(Error::invalid(format!(
                        "type size {s} must satisfy s <= flag_order - 2 and s ≡ flag_order (mod 2)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Type sizes used to build the program. Unless set explicitly: every
    /// `s` with `1 <= s <= flag_order - 2` of the same parity as `flag_order`.
    pub fn type_sizes(&self) -> Vec<usize> {
        match &self.types {
            Some(t) => {
                let mut t = t.clone();
                t.sort_unstable();
                t.dedup();
                t
            }
            None => (1..=self.flag_order.saturating_sub(2))
                .filter(|s| (self.flag_order - s).is_multiple_of(2))
                .collect(),
        }
    }

    /// Flag order used with types of size `s`.
    pub fn flag_size_for(&self, s: usize) -> usize {
        (self.flag_order + s) / 2
    }
}

impl fmt::Display for RamseyProblem {
    /// The problem-file text; parsing it back yields an equal problem.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "colors {}", self.k())?;
        for class in self.classes.classes() {
            if class.len() > 1 {
                let list: Vec<String> = class.iter().map(|c| c.to_string()).collect();
                writeln!(f, "colorblind {}", list.join(","))?;
            }
        }
        for (i, g) in self.forbidden.iter().enumerate() {
            let edges: Vec<String> = g
                .edges()
                .iter()
                .map(|(u, v)| format!("{}-{}", u + 1, v + 1))
                .collect();
            writeln!(f, "forbid {}: {}", i + 1, edges.join(","))?;
        }
        writeln!(f, "flag_order {}", self.flag_order)?;
        writeln!(f, "ell {}", self.ell)?;
        if let Some(types) = &self.types {
            let list: Vec<String> = types.iter().map(|s| s.to_string()).collect();
            writeln!(f, "types {}", list.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for RamseyProblem {
    type Err = Error;

    /// Parses the problem-file format:
    ///
    /// ```text
    /// colors 2
    /// colorblind 1,2
    /// forbid 1: 1-2,2-3,1-3
    /// forbid 2: 1-2,2-3,1-3
    /// flag_order 4
    /// ell 2
    /// ```
    ///
    /// Vertices are 1-indexed and the order of a forbidden graph is its
    /// largest vertex index. An optional `types 2,4` line overrides the
    /// default type sizes.
    fn from_str(text: &str) -> Result<Self> {
        let mut k: Option<usize> = None;
        let mut blind: Vec<Vec<Color>> = Vec::new();
        let mut forbid: Vec<(usize, usize, PlainGraph)> = Vec::new();
        let mut flag_order = None;
        let mut ell = None;
        let mut types = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let split = line
                .find(|c: char| !(c.is_ascii_alphabetic() || c == '_'))
                .unwrap_or(line.len());
            let (keyword, rest) = line.split_at(split);
            let rest: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
            let number = |s: &str| -> Result<usize> {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("expected a number, found {s:?}")))
            };
            match keyword {
                "colors" => k = Some(number(&rest)?),
                "colorblind" => {
                    let class = rest
                        .split(',')
                        .map(|c| number(c).map(|c| c as Color))
                        .collect::<Result<Vec<_>>>()?;
                    blind.push(class);
                }
                "forbid" => {
                    let (color, edges) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::parse(line_no, "expected `forbid i: u-v,...`"))?;
                    let color = number(color)?;
                    let mut list = Vec::new();
                    let mut order = 0;
                    for e in edges.split(',').filter(|e| !e.is_empty()) {
                        let (u, v) = e
                            .split_once('-')
                            .ok_or_else(|| Error::parse(line_no, format!("bad edge {e:?}")))?;
                        let (u, v) = (number(u)?, number(v)?);
                        if u == 0 || v == 0 {
                            return Err(Error::parse(line_no, "vertices are 1-indexed"));
                        }
                        order = order.max(u).max(v);
                        list.push((u - 1, v - 1));
                    }
                    let g = PlainGraph::new(order, &list).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    forbid.push((color, line_no, g));
                }
                "flag_order" => flag_order = Some(number(&rest)?),
                "ell" => ell = Some(number(&rest)?),
                "types" => {
                    types = Some(
                        rest.split(',')
                            .filter(|s| !s.is_empty())
                            .map(number)
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => return Err(Error::parse(line_no, format!("unknown keyword {other:?}"))),
            }
        }

        let k = k.ok_or_else(|| Error::invalid("missing `colors` line"))?;
        let mut forbidden: Vec<Option<PlainGraph>> = vec![None; k];
        for (color, line_no, g) in forbid {
            if color == 0 || color > k {
                return Err(Error::parse(line_no, format!("color {color} outside 1..={k}")));
            }
            if forbidden[color - 1].replace(g).is_some() {
                return Err(Error::parse(line_no, format!("color {color} forbidden twice")));
            }
        }
        let forbidden = forbidden
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.ok_or_else(|| Error::invalid(format!("no forbidden graph for color {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        let classes = ColorClasses::new(k, blind)?;
        let problem = RamseyProblem {
            forbidden,
            classes,
            ell: ell.ok_or_else(|| Error::invalid("missing `ell` line"))?,
            flag_order: flag_order.ok_or_else(|| Error::invalid("missing `flag_order` line"))?,
            types,
        };
        problem.validate()?;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const R33: &str = "\
# R(K3,K3), color-blind
colors 2
colorblind 1, 2
forbid 1: 1-2, 2-3, 1-3
forbid 2 : 1-2,2-3,1-3
flag_order 4
ell 2
";

    #[test]
    fn parses_and_prints_back() {
        let p: RamseyProblem = R33.parse().unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.classes.classes(), &[vec![1, 2]]);
        assert_eq!(p.type_sizes(), vec![2]);
        let again: RamseyProblem = p.to_string().parse().unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn rejects_edgeless_forbidden_graph() {
        let text = "colors 1\nforbid 1:\nflag_order 3\nell 2\n";
        assert!(matches!(text.parse::<RamseyProblem>(), Err(Error::Invalid(_))));
    }

    #[test]
    fn rejects_unsound_color_blindness() {
        let text = "colors 2\ncolorblind 1,2\nforbid 1: 1-2,2-3,1-3\nforbid 2: 1-2\nflag_order 4\nell 2\n";
        assert!(text.parse::<RamseyProblem>().is_err());
    }

    #[test]
    fn rejects_bad_ell_and_types() {
        let text = "colors 1\nforbid 1: 1-2\nflag_order 3\nell 4\n";
        assert!(text.parse::<RamseyProblem>().is_err());
        let text = "colors 1\nforbid 1: 1-2\nflag_order 4\nell 2\ntypes 1\n";
        assert!(text.parse::<RamseyProblem>().is_err());
    }

    #[test]
    fn reports_line_numbers() {
        let text = "colors 2\n\nforbid 1: 1-x\n";
        match text.parse::<RamseyProblem>() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn color_permutations() {
        let c = ColorClasses::new(3, vec![vec![2, 3]]).unwrap();
        let perms = c.permutations();
        assert_eq!(perms.len(), 2);
        assert_eq!(perms[0], vec![0, 1, 2, 3]);
        assert_eq!(perms[1], vec![0, 1, 3, 2]);
        assert_eq!(ColorClasses::new(3, vec![vec![1, 2, 3]]).unwrap().permutations().len(), 6);
        assert!(ColorClasses::new(2, vec![vec![1], vec![1, 2]]).is_err());
    }
}

//! Presentations of the l-fundamental group and voltage labelings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::digraph::{Digraph, PointedDigraph};
use crate::error::{Error, Result};
use crate::group::{FGAbelian, Group, GroupTable};
use crate::linalg::{smith, SparseIntMatrix};
use crate::nerve::seq_label;

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

pub type Word = Vec<Letter>;

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// Cancels adjacent inverse pairs.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// `a`…`z`, then `a1`…`z1` and so on.
pub fn symbol(i: usize) -> String {
    let c = (b'a' + (i % 26) as u8) as char;
    match i / 26 {
        0 => c.to_string(),
        k => format!("{c}{k}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        if let Some(l) = relators.iter().flatten().find(|l| l.generator >= generators.len()) {
            return Err(Error::Range(format!("relator uses generator {} of {}", l.generator, generators.len())));
        }
        Ok(GroupPresentation { generators, relators })
    }

    pub fn free(generators: Vec<String>) -> Self {
        GroupPresentation { generators, relators: Vec::new() }
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    /// Deletes the given generators (assumed trivial) from every relator,
    /// then reduces, drops empty relators and deduplicates.
    pub fn kill_generators(&self, dead: &BTreeSet<usize>) -> GroupPresentation {
        let keep: Vec<usize> = (0..self.generators.len()).filter(|g| !dead.contains(g)).collect();
        let renumber: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut seen = BTreeSet::new();
        let relators = self
            .relators
            .iter()
            .map(|w| {
                let w: Word = w
                    .iter()
                    .filter_map(|l| renumber.get(&l.generator).map(|&g| Letter { generator: g, inverse: l.inverse }))
                    .collect();
                free_reduce(&w)
            })
            .filter(|w| !w.is_empty() && seen.insert(w.clone()))
            .collect();
        GroupPresentation { generators: keep.iter().map(|&g| self.generators[g].clone()).collect(), relators }
    }

    fn word_text(&self, w: &[Letter]) -> String {
        w.iter()
            .map(|l| if l.inverse { symbol(l.generator).to_uppercase() } else { symbol(l.generator) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `gens: a=<name> …` on the first line, then one `rel: …` line per relator,
/// capitals denoting inverses.
impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().enumerate().map(|(i, g)| format!("{}={g}", symbol(i))).collect();
        write!(f, "gens: {}", gens.join(" "))?;
        for r in &self.relators {
            write!(f, "\nrel: {}", self.word_text(r))?;
        }
        Ok(())
    }
}

impl Serialize for GroupPresentation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GroupPresentation", 2)?;
        let gens: BTreeMap<String, &str> =
            self.generators.iter().enumerate().map(|(i, g)| (symbol(i), g.as_str())).collect();
        st.serialize_field("generators", &gens)?;
        let rels: Vec<String> = self.relators.iter().map(|w| self.word_text(w)).collect();
        st.serialize_field("relators", &rels)?;
        st.end()
    }
}

/// `ℤ^free_rank ⊕ ⊕ ℤ/d` with `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

fn serialize_bigints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::linalg::serialize_bigint_seq(v, s)
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn abelianization(p: &GroupPresentation) -> AbelianInvariants {
    let columns = p
        .relators
        .iter()
        .map(|w| {
            let mut exps: BTreeMap<usize, i64> = BTreeMap::new();
            for l in w {
                *exps.entry(l.generator).or_default() += if l.inverse { -1 } else { 1 };
            }
            exps.into_iter().filter(|(_, e)| *e != 0).map(|(g, e)| (g, BigInt::from(e))).collect()
        })
        .collect();
    let m = SparseIntMatrix::from_columns(p.generators.len(), columns).expect("generators in range");
    let form = smith(&m, false);
    AbelianInvariants { free_rank: p.generators.len() - form.rank(), torsion: form.torsion() }
}

/// Walks of `0..=l` arrows starting at `u`, grouped by endpoint, each as a vertex
/// sequence, in depth-first lexicographic order.
pub(crate) fn walks_by_endpoint(x: &Digraph, u: usize, l: usize) -> BTreeMap<usize, Vec<Vec<usize>>> {
    let mut out: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let mut stack = vec![u];
    fn go(x: &Digraph, l: usize, stack: &mut Vec<usize>, out: &mut BTreeMap<usize, Vec<Vec<usize>>>) {
        let last = *stack.last().expect("nonempty");
        out.entry(last).or_default().push(stack.clone());
        if stack.len() > l {
            return;
        }
        for &v in x.out_neighbors(last) {
            stack.push(v);
            go(x, l, stack, out);
            stack.pop();
        }
    }
    go(x, l, &mut stack, &mut out);
    out
}

fn walk_word(x: &Digraph, walk: &[usize]) -> Word {
    walk.windows(2).map(|w| Letter::new(x.arrow_index(w[0], w[1]).expect("walk follows arrows"))).collect()
}

/// Spanning tree of the underlying undirected graph by breadth-first search
/// from `root`; neighbors are visited in index order, an out-arrow before an
/// in-arrow to the same neighbor. Returns tree arrows with their orientation
/// (`true` when traversed forward).
pub fn spanning_tree(x: &Digraph, root: usize) -> Vec<(usize, bool)> {
    let mut seen = vec![false; x.vertex_count()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut tree = Vec::new();
    while let Some(u) = queue.pop_front() {
        let mut nbrs: Vec<(usize, bool)> = x.out_neighbors(u).iter().map(|&v| (v, true)).collect();
        nbrs.extend(x.in_neighbors(u).iter().map(|&v| (v, false)));
        nbrs.sort_by_key(|&(v, forward)| (v, !forward));
        for (v, forward) in nbrs {
            if !seen[v] {
                seen[v] = true;
                let arrow = if forward { x.arrow_index(u, v) } else { x.arrow_index(v, u) };
                tree.push((arrow.expect("neighbor arrow"), forward));
                queue.push_back(v);
            }
        }
    }
    tree
}

/// Raw and tree-simplified presentations of `π^l_1(X, x₀)`.
#[derive(Clone, Debug, Serialize)]
pub struct PiPresentation {
    pub level: usize,
    pub basepoint: String,
    pub raw: GroupPresentation,
    pub simplified: GroupPresentation,
    pub tree_arrows: Vec<String>,
}

/// Generators are the arrows; relators are the spanning-tree arrows and, for
/// every two walks of at most `l` arrows with common endpoints, the first times
/// the inverse of the second.
pub fn pi_l_presentation(x: &PointedDigraph, l: usize) -> Result<PiPresentation> {
    if !(1..=3).contains(&l) {
        return Err(Error::Range(format!("level {l} outside 1..=3")));
    }
    let g = x.digraph();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let generators: Vec<String> = g.arrows().iter().map(|&(a, b)| seq_label(g, &[a, b])).collect();
    let tree = spanning_tree(g, x.basepoint());
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut relators: Vec<Word> = Vec::new();
    for &(a, forward) in &tree {
        let w = vec![Letter { generator: a, inverse: !forward }];
        seen.insert(w.clone());
        relators.push(w);
    }
    for u in 0..g.vertex_count() {
        for walks in walks_by_endpoint(g, u, l).values() {
            for i in 0..walks.len() {
                for j in i + 1..walks.len() {
                    let mut w = walk_word(g, &walks[i]);
                    w.extend(inverse_word(&walk_word(g, &walks[j])));
                    let w = free_reduce(&w);
                    if !w.is_empty() && seen.insert(w.clone()) {
                        relators.push(w);
                    }
                }
            }
        }
    }
    let raw = GroupPresentation::new(generators, relators)?;
    let dead: BTreeSet<usize> = tree.iter().map(|&(a, _)| a).collect();
    let simplified = raw.kill_generators(&dead);
    let tree_arrows = tree.iter().map(|&(a, _)| raw.generators[a].clone()).collect();
    Ok(PiPresentation { level: l, basepoint: g.name(x.basepoint()).to_string(), raw, simplified, tree_arrows })
}

/// Rank of the free group `π^1_1(X)`.
pub fn pi1_free_rank(x: &Digraph) -> Result<usize> {
    if !x.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(x.arrow_count() + 1 - x.vertex_count())
}

/// Group-valued labels on arrows, indexed like `Digraph::arrows`.
#[derive(Clone, Debug)]
pub struct VoltageLabeling<G: Group> {
    pub group: G,
    values: Vec<G::Elem>,
}

impl<G: Group> VoltageLabeling<G> {
    pub fn new(x: &Digraph, group: G, values: Vec<G::Elem>) -> Result<Self> {
        if values.len() != x.arrow_count() {
            return Err(Error::Voltage(format!("{} labels for {} arrows", values.len(), x.arrow_count())));
        }
        Ok(VoltageLabeling { group, values })
    }

    pub fn arrow_value(&self, arrow: usize) -> &G::Elem {
        &self.values[arrow]
    }

    /// Product of labels along a vertex sequence following arrows.
    pub fn path_value(&self, x: &Digraph, path: &[usize]) -> G::Elem {
        let mut acc = self.group.identity();
        for w in path.windows(2) {
            let a = x.arrow_index(w[0], w[1]).expect("path follows arrows");
            acc = self.group.op(&acc, &self.values[a]);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VoltageCheck {
    pub holds: bool,
    pub violation: Option<(String, String)>,
}

/// Whether every pair of walks of at most `l` arrows with common endpoints has
/// equal label products.
pub fn check_voltage<G: Group>(x: &Digraph, l: usize, v: &VoltageLabeling<G>) -> VoltageCheck {
    for u in 0..x.vertex_count() {
        for walks in walks_by_endpoint(x, u, l).values() {
            let values: Vec<G::Elem> = walks.iter().map(|w| v.path_value(x, w)).collect();
            if let Some(j) = (1..walks.len()).find(|&j| values[j] != values[0]) {
                return VoltageCheck {
                    holds: false,
                    violation: Some((seq_label(x, &walks[0]), seq_label(x, &walks[j]))),
                };
            }
        }
    }
    VoltageCheck { holds: true, violation: None }
}

/// A voltage labeling read from a file, over either kind of group.
#[derive(Clone, Debug)]
pub enum ParsedVoltage {
    Abelian(VoltageLabeling<FGAbelian>),
    Table(VoltageLabeling<GroupTable>),
}

impl ParsedVoltage {
    pub fn check(&self, x: &Digraph, l: usize) -> VoltageCheck {
        match self {
            ParsedVoltage::Abelian(v) => check_voltage(x, l, v),
            ParsedVoltage::Table(v) => check_voltage(x, l, v),
        }
    }

    /// Canonical string of the label product along a path.
    pub fn path_label(&self, x: &Digraph, path: &[usize]) -> String {
        match self {
            ParsedVoltage::Abelian(v) => v.group.format(&v.path_value(x, path)),
            ParsedVoltage::Table(v) => v.group.format(&v.path_value(x, path)),
        }
    }
}

/// Parses `group <description>` (abelian, e.g. `group Z^2 + Z/3`) or `group table`
/// followed by `elements:` and row lines, then `arrow a b = <element>` lines.
/// `#` starts a comment.
pub fn parse_voltage(x: &Digraph, text: &str) -> Result<ParsedVoltage> {
    let mut group_line: Option<String> = None;
    let mut table_lines: Vec<String> = Vec::new();
    let mut assignments: Vec<(usize, String, String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = k + 1;
        if let Some(rest) = line.strip_prefix("group ") {
            group_line = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("arrow ") {
            let (lhs, value) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: lineno, message: "expected `arrow a b = value`".into() })?;
            let ends: Vec<&str> = lhs.split_whitespace().collect();
            if ends.len() != 2 {
                return Err(Error::Parse { line: lineno, message: "expected two arrow endpoints".into() });
            }
            assignments.push((lineno, ends[0].to_string(), ends[1].to_string(), value.trim().to_string()));
        } else if group_line.as_deref() == Some("table") {
            table_lines.push(line.to_string());
        } else {
            return Err(Error::Parse { line: lineno, message: format!("unexpected line `{line}`") });
        }
    }
    let group_line = group_line.ok_or_else(|| Error::Voltage("missing `group` declaration".into()))?;
    fn assign<G: Group>(
        x: &Digraph,
        group: G,
        items: &[(usize, String, String, String)],
    ) -> Result<VoltageLabeling<G>> {
        let mut values: Vec<Option<G::Elem>> = vec![None; x.arrow_count()];
        for (lineno, a, b, v) in items {
            let (ia, ib) = (x.vertex(a)?, x.vertex(b)?);
            let arrow = x
                .arrow_index(ia, ib)
                .ok_or_else(|| Error::Parse { line: *lineno, message: format!("{a} -> {b} is not an arrow") })?;
            values[arrow] = Some(group.parse_element(v)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    let (a, b) = x.arrows()[i];
                    Error::Voltage(format!("no label for arrow {} -> {}", x.name(a), x.name(b)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        VoltageLabeling::new(x, group, values)
    }
    if group_line == "table" {
        let lines: Vec<&str> = table_lines.iter().map(String::as_str).collect();
        let g = GroupTable::parse(&lines)?;
        Ok(ParsedVoltage::Table(assign(x, g, &assignments)?))
    } else {
        let g: FGAbelian = group_line.parse()?;
        Ok(ParsedVoltage::Abelian(assign(x, g, &assignments)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn pointed(x: Digraph) -> PointedDigraph {
        PointedDigraph::new(Arc::new(x), 0).unwrap()
    }

    fn c3() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn square() -> Digraph {
        Digraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn c3_presentation() {
        let p = pi_l_presentation(&pointed(c3()), 2).unwrap();
        assert_eq!(p.raw.generators.len(), 3);
        assert_eq!(p.raw.relators.len(), 2);
        assert_eq!(abelianization(&p.raw).to_string(), "Z");
        assert_eq!(abelianization(&p.simplified).to_string(), "Z");
        assert_eq!(p.simplified.generators, vec!["(1,2)"]);
        assert!(p.simplified.is_free());
    }

    #[test]
    fn square_presentation() {
        let p = pi_l_presentation(&pointed(square()), 2).unwrap();
        // arrows sorted: a=(0,1) b=(0,2) c=(1,3) d=(2,3)
        let rel = vec![Letter::new(0), Letter::new(2), Letter::new(3).inv(), Letter::new(1).inv()];
        assert!(p.raw.relators.contains(&rel));
        assert!(abelianization(&p.raw).is_trivial());
        assert!(p.raw.to_string().contains("rel: a c D B"));
    }

    #[test]
    fn chord_presentation() {
        let x = Digraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = pi_l_presentation(&pointed(x), 2).unwrap();
        // arrows sorted: a=(0,1) b=(0,2) c=(1,2)
        assert!(p.raw.relators.contains(&vec![Letter::new(0), Letter::new(2), Letter::new(1).inv()]));
        assert!(abelianization(&p.raw).is_trivial());
    }

    #[test]
    fn free_abelianization_and_rank() {
        let p = GroupPresentation::free(vec!["x".into(), "y".into(), "z".into()]);
        assert_eq!(abelianization(&p).to_string(), "Z^3");
        assert_eq!(pi1_free_rank(&c3()).unwrap(), 1);
        assert_eq!(pi1_free_rank(&square()).unwrap(), 1);
        assert_eq!(pi1_free_rank(&Digraph::from_edges(3, [(0, 1), (2, 1)]).unwrap()).unwrap(), 0);
        assert!(pi1_free_rank(&Digraph::from_edges(2, []).unwrap()).is_err());
    }

    #[test]
    fn word_helpers() {
        let a = Letter::new(0);
        assert!(free_reduce(&[a, a.inv(), Letter::new(1)]) == vec![Letter::new(1)]);
        assert_eq!(symbol(27), "b1");
        assert!(GroupPresentation::new(vec!["x".into()], vec![vec![Letter::new(2)]]).is_err());
    }

    #[test]
    fn voltages() {
        let x = c3();
        let v = parse_voltage(&x, "group Z\narrow 0 1 = 1\narrow 1 2 = 1\narrow 2 0 = 1\n").unwrap();
        assert!(v.check(&x, 2).holds);
        let sq = square();
        let bad = parse_voltage(&sq, "group Z\narrow 0 1 = 1\narrow 1 3 = 0\narrow 0 2 = 0\narrow 2 3 = 0\n").unwrap();
        let check = bad.check(&sq, 2);
        assert!(!check.holds);
        assert_eq!(check.violation, Some(("(0,1,3)".into(), "(0,2,3)".into())));
        assert!(bad.check(&sq, 1).holds);
        assert!(parse_voltage(&x, "group Z\narrow 0 1 = 1\n").is_err());
        let table = "group table\nelements: e s\ne: e s\ns: s e\narrow 0 1 = s\narrow 1 2 = s\narrow 2 0 = s\n";
        assert!(matches!(parse_voltage(&x, table).unwrap(), ParsedVoltage::Table(_)));
    }
}

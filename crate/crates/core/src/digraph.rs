//! Finite digraphs, their extended quasi-metric, box products, morphisms and
//! one-step homotopies.
//!
//! Vertices carry string names externally and dense indices internally. The
//! index order is the order in which vertices were first declared, and every
//! derived basis in the crate is ordered by these indices.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Add;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Value of the extended quasi-metric: a natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(u32),
    Infinite,
}

impl Dist {
    pub const ZERO: Dist = Dist::Finite(0);

    pub fn finite(self) -> Option<u32> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// `self <= bound` for a finite bound.
    pub fn at_most(self, bound: u32) -> bool {
        matches!(self, Dist::Finite(d) if d <= bound)
    }
}

impl Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        match (self, rhs) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinite,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dist::Finite(d) => s.serialize_u32(*d),
            Dist::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Dist::Finite(n)),
            Raw::Text(t) if t == "inf" => Ok(Dist::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad distance `{t}`"))),
        }
    }
}

/// All-pairs shortest directed path lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<Dist>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> Dist {
        self.data[from * self.n + to]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Dist]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }
}

#[derive(Clone, Debug)]
pub struct Digraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    arrows: Vec<(usize, usize)>,
    dist: OnceLock<DistanceMatrix>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.arrows == other.arrows
    }
}

impl Eq for Digraph {}

impl Digraph {
    /// Builds a digraph from vertex names and index pairs. Repeated arrows are
    /// merged.
    pub fn new<I>(names: Vec<String>, arrows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        let n = names.len();
        let mut list = Vec::new();
        for (u, v) in arrows {
            if u >= n || v >= n {
                return Err(Error::Range(format!("arrow ({u},{v}) with {n} vertices")));
            }
            if u == v {
                return Err(Error::LoopArrow { line: 0, vertex: names[u].clone() });
            }
            list.push((u, v));
        }
        list.sort_unstable();
        list.dedup();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for &(u, v) in &list {
            out[u].push(v);
            inc[v].push(u);
        }
        for l in &mut inc {
            l.sort_unstable();
        }
        Ok(Digraph { names, index, out, inc, arrows: list, dist: OnceLock::new() })
    }

    /// Vertices named `0..n`.
    pub fn from_edges<I>(n: usize, arrows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new((0..n).map(|i| i.to_string()).collect(), arrows)
    }

    pub fn from_named(vertices: &[&str], arrows: &[(&str, &str)]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut seen = HashMap::new();
        let mut intern = |s: &str, names: &mut Vec<String>| -> usize {
            *seen.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        };
        for v in vertices {
            intern(v, &mut names);
        }
        let mut idx = Vec::new();
        for (a, b) in arrows {
            let u = intern(a, &mut names);
            let v = intern(b, &mut names);
            idx.push((u, v));
        }
        Self::new(names, idx)
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), std::iter::empty()).expect("empty digraph")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// Arrows sorted by (tail, head).
    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn has_arrow(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// Membership in `X₁`: an arrow or a diagonal pair.
    pub fn in_x1(&self, u: usize, v: usize) -> bool {
        u == v || self.has_arrow(u, v)
    }

    pub fn arrow_index(&self, u: usize, v: usize) -> Option<usize> {
        self.arrows.binary_search(&(u, v)).ok()
    }

    /// Shortest-path distances by BFS from every vertex, computed once.
    pub fn distances(&self) -> &DistanceMatrix {
        self.dist.get_or_init(|| {
            let n = self.vertex_count();
            let mut data = vec![Dist::Infinite; n * n];
            let mut queue = VecDeque::new();
            for s in 0..n {
                let row = &mut data[s * n..(s + 1) * n];
                row[s] = Dist::ZERO;
                queue.clear();
                queue.push_back(s);
                while let Some(u) = queue.pop_front() {
                    let du = match row[u] {
                        Dist::Finite(d) => d,
                        Dist::Infinite => unreachable!(),
                    };
                    for &v in &self.out[u] {
                        if row[v] == Dist::Infinite {
                            row[v] = Dist::Finite(du + 1);
                            queue.push_back(v);
                        }
                    }
                }
            }
            DistanceMatrix { n, data }
        })
    }

    #[inline]
    pub fn dist(&self, u: usize, v: usize) -> Dist {
        self.distances().get(u, v)
    }

    /// Components of the underlying undirected graph, each sorted, ordered by
    /// smallest vertex.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut result = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = result.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for &v in self.out[u].iter().chain(&self.inc[u]) {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        members.push(v);
                    }
                }
            }
            members.sort_unstable();
            result.push(members);
        }
        result
    }

    pub fn is_connected(&self) -> bool {
        self.weak_components().len() <= 1
    }

    /// Same vertices, arrows between distinct vertices at distance at most `n`.
    pub fn d_power(&self, n: u32) -> Result<Digraph> {
        if n == 0 {
            return Err(Error::Range("d_power needs n >= 1".into()));
        }
        let d = self.distances();
        let k = self.vertex_count();
        let arrows = (0..k).flat_map(|u| (0..k).map(move |v| (u, v)));
        let arrows: Vec<_> = arrows.filter(|&(u, v)| u != v && d.get(u, v).at_most(n)).collect();
        Digraph::new(self.names.clone(), arrows)
    }

    /// Induced subdigraph on `vertices`, kept in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Digraph> {
        let mut pos = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.vertex_count() {
                return Err(Error::Range(format!("vertex index {v}")));
            }
            if pos.insert(v, i).is_some() {
                return Err(Error::DuplicateVertex(self.names[v].clone()));
            }
        }
        let names = vertices.iter().map(|&v| self.names[v].clone()).collect();
        let mut arrows = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.out[v] {
                if let Some(&j) = pos.get(w) {
                    arrows.push((i, j));
                }
            }
        }
        Digraph::new(names, arrows)
    }

    pub fn induced_by_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Digraph> {
        let idx = names.iter().map(|s| self.vertex(s.as_ref())).collect::<Result<Vec<_>>>()?;
        self.induced(&idx)
    }

    /// `self` is an induced subdigraph of `other` under the name identification.
    pub fn inclusion_into(&self, other: &Digraph) -> Option<Vec<usize>> {
        let map: Vec<usize> = self.names.iter().map(|n| other.index.get(n).copied()).collect::<Option<_>>()?;
        for u in 0..self.vertex_count() {
            for v in 0..self.vertex_count() {
                if u != v && self.has_arrow(u, v) != other.has_arrow(map[u], map[v]) {
                    return None;
                }
            }
        }
        Some(map)
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let isolated: Vec<&str> = (0..self.vertex_count())
            .filter(|&v| self.out[v].is_empty() && self.inc[v].is_empty())
            .map(|v| self.names[v].as_str())
            .collect();
        if !isolated.is_empty() {
            writeln!(f, "vertices: {}", isolated.join(" "))?;
        }
        for &(u, v) in &self.arrows {
            writeln!(f, "{} -> {}", self.names[u], self.names[v])?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct DigraphJson {
    vertices: Vec<String>,
    arrows: Vec<(String, String)>,
}

impl Serialize for Digraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DigraphJson {
            vertices: self.names.clone(),
            arrows: self.arrows.iter().map(|&(u, v)| (self.names[u].clone(), self.names[v].clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DigraphJson::deserialize(d)?;
        let verts: Vec<&str> = raw.vertices.iter().map(String::as_str).collect();
        let arrows: Vec<(&str, &str)> = raw.arrows.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        for (a, b) in &arrows {
            if !verts.contains(a) || !verts.contains(b) {
                return Err(serde::de::Error::custom("arrow endpoint is not a declared vertex"));
            }
        }
        Digraph::from_named(&verts, &arrows).map_err(serde::de::Error::custom)
    }
}

/// Parses the line-based digraph format, returning warnings for merged
/// duplicate arrows.
pub fn parse_digraph_with_warnings(text: &str) -> Result<(Digraph, Vec<String>)> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut arrows: Vec<(usize, usize)> = Vec::new();
    let mut seen = HashMap::new();
    let mut warnings = Vec::new();
    let mut intern = |name: &str, names: &mut Vec<String>| -> usize {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vertices:") {
            for name in rest.split_whitespace() {
                intern(name, &mut names);
            }
            continue;
        }
        let mut parts = line.split("->");
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse { line: line_no, message: format!("expected `a -> b`, got `{line}`") });
        };
        let (a, b) = (a.trim(), b.trim());
        let well_formed = |s: &str| !s.is_empty() && !s.contains(char::is_whitespace);
        if !well_formed(a) || !well_formed(b) {
            return Err(Error::Parse { line: line_no, message: format!("bad vertex name in `{line}`") });
        }
        if a == b {
            return Err(Error::LoopArrow { line: line_no, vertex: a.to_string() });
        }
        let u = intern(a, &mut names);
        let v = intern(b, &mut names);
        if let Some(first) = seen.insert((u, v), line_no) {
            warnings.push(format!("line {line_no}: duplicate arrow {a} -> {b} (first on line {first})"));
            continue;
        }
        arrows.push((u, v));
    }
    Ok((Digraph::new(names, arrows)?, warnings))
}

pub fn parse_digraph(text: &str) -> Result<Digraph> {
    let (g, warnings) = parse_digraph_with_warnings(text)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(g)
}

/// Box product: arrows move in exactly one coordinate.
pub fn box_product(x: &Digraph, y: &Digraph) -> Digraph {
    let (nx, ny) = (x.vertex_count(), y.vertex_count());
    let mut names = Vec::with_capacity(nx * ny);
    for a in x.names() {
        for b in y.names() {
            names.push(format!("({a},{b})"));
        }
    }
    let id = |i: usize, j: usize| i * ny + j;
    let mut arrows = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            for &j2 in y.out_neighbors(j) {
                arrows.push((id(i, j), id(i, j2)));
            }
            for &i2 in x.out_neighbors(i) {
                arrows.push((id(i, j), id(i2, j)));
            }
        }
    }
    Digraph::new(names, arrows).expect("box product of valid digraphs")
}

/// Result of testing a vertex map for the morphism property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismCheck {
    pub holds: bool,
    /// First arrow of the source whose image is neither an arrow nor a vertex.
    pub violation: Option<(usize, usize)>,
}

/// Arrow test: every source arrow maps into `Y₁`.
pub fn check_morphism(map: &[usize], source: &Digraph, target: &Digraph) -> MorphismCheck {
    assert_eq!(map.len(), source.vertex_count(), "vertex map must be total");
    for &(u, v) in source.arrows() {
        if !target.in_x1(map[u], map[v]) {
            return MorphismCheck { holds: false, violation: Some((u, v)) };
        }
    }
    MorphismCheck { holds: true, violation: None }
}

/// Distance test: `dist(f(x), f(x')) <= dist(x, x')` for every pair.
pub fn check_morphism_by_distance(map: &[usize], source: &Digraph, target: &Digraph) -> bool {
    let ds = source.distances();
    let dt = target.distances();
    let n = source.vertex_count();
    (0..n).all(|u| (0..n).all(|v| dt.get(map[u], map[v]) <= ds.get(u, v)))
}

#[derive(Clone, Debug)]
pub struct DigraphMorphism {
    source: Arc<Digraph>,
    target: Arc<Digraph>,
    map: Vec<usize>,
}

impl DigraphMorphism {
    pub fn new(source: Arc<Digraph>, target: Arc<Digraph>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.vertex_count() {
            return Err(Error::Dimension(format!(
                "vertex map has {} entries for {} vertices",
                map.len(),
                source.vertex_count()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.vertex_count()) {
            return Err(Error::Range(format!("image vertex index {bad}")));
        }
        let check = check_morphism(&map, &source, &target);
        if let Some((u, v)) = check.violation {
            return Err(Error::NotAMorphism {
                tail: source.name(u).to_string(),
                head: source.name(v).to_string(),
                image_tail: target.name(map[u]).to_string(),
                image_head: target.name(map[v]).to_string(),
            });
        }
        Ok(DigraphMorphism { source, target, map })
    }

    pub fn identity(x: Arc<Digraph>) -> Self {
        let map = (0..x.vertex_count()).collect();
        DigraphMorphism { source: x.clone(), target: x, map }
    }

    /// Inclusion of an induced subdigraph identified by vertex names.
    pub fn inclusion(sub: Arc<Digraph>, sup: Arc<Digraph>) -> Result<Self> {
        let map = sub.inclusion_into(&sup).ok_or(Error::NotInclusion(0))?;
        Ok(DigraphMorphism { source: sub, target: sup, map })
    }

    pub fn source(&self) -> &Arc<Digraph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Digraph> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn compose(&self, after: &DigraphMorphism) -> Result<DigraphMorphism> {
        if *self.target != *after.source {
            return Err(Error::Dimension("composition of non-composable morphisms".into()));
        }
        let map = self.map.iter().map(|&v| after.map[v]).collect();
        Ok(DigraphMorphism { source: self.source.clone(), target: after.target.clone(), map })
    }

    fn same_ends(&self, other: &DigraphMorphism) -> bool {
        (Arc::ptr_eq(&self.source, &other.source) || *self.source == *other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || *self.target == *other.target)
    }
}

/// `sup_x dist(f(x), g(x))` in the common target.
pub fn morphism_distance(f: &DigraphMorphism, g: &DigraphMorphism) -> Result<Dist> {
    if !f.same_ends(g) {
        return Err(Error::Dimension("morphisms have different source or target".into()));
    }
    let d = f.target.distances();
    Ok(f.map.iter().zip(&g.map).map(|(&a, &b)| d.get(a, b)).max().unwrap_or(Dist::ZERO))
}

/// Consecutive steps are one-step homotopic in either direction.
pub fn is_homotopy(steps: &[DigraphMorphism]) -> Result<bool> {
    for w in steps.windows(2) {
        let forward = morphism_distance(&w[0], &w[1])?;
        let backward = morphism_distance(&w[1], &w[0])?;
        if !forward.at_most(1) && !backward.at_most(1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Like [`is_homotopy`] for raw vertex maps, reporting the first step that is
/// not a morphism.
pub fn is_homotopy_maps(source: &Arc<Digraph>, target: &Arc<Digraph>, maps: &[Vec<usize>]) -> Result<bool> {
    let steps = maps
        .iter()
        .enumerate()
        .map(|(i, m)| {
            DigraphMorphism::new(source.clone(), target.clone(), m.clone())
                .map_err(|_| Error::HomotopyStep { index: i })
        })
        .collect::<Result<Vec<_>>>()?;
    is_homotopy(&steps)
}

#[derive(Clone, Debug)]
pub struct PointedDigraph {
    digraph: Arc<Digraph>,
    basepoint: usize,
}

impl PointedDigraph {
    pub fn new(digraph: Arc<Digraph>, basepoint: usize) -> Result<Self> {
        if basepoint >= digraph.vertex_count() {
            return Err(Error::Range(format!("basepoint index {basepoint}")));
        }
        Ok(PointedDigraph { digraph, basepoint })
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }
}

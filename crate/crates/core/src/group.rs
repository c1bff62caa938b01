//! Finite groups by multiplication table and finitely generated abelian groups.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::{smith, SparseIntMatrix};

pub trait Group {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse_element(&self, s: &str) -> Result<Self::Elem>;
    /// All elements in canonical order, when the group is finite.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    fn product<'a, I>(&self, factors: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        factors.into_iter().fold(self.identity(), |acc, x| self.op(&acc, x))
    }
}

/// `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_t`, written additively.
///
/// Elements are integer vectors whose torsion coordinates lie in `[0, d_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGAbelian {
    free_rank: usize,
    torsion: Vec<u64>,
}

impl FGAbelian {
    pub fn new(free_rank: usize, torsion: Vec<u64>) -> Result<Self> {
        if let Some(d) = torsion.iter().find(|&&d| d < 2) {
            return Err(Error::Group(format!("torsion order {d} must be at least 2")));
        }
        if free_rank + torsion.len() == 0 {
            return Err(Error::Group("the trivial group has no Cayley digraph with nonzero generators".into()));
        }
        Ok(FGAbelian { free_rank, torsion })
    }

    pub fn integers() -> Self {
        FGAbelian { free_rank: 1, torsion: Vec::new() }
    }

    pub fn cyclic(d: u64) -> Result<Self> {
        Self::new(0, vec![d])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    /// Number of coordinates.
    pub fn width(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn canonical(&self, mut v: Vec<i64>) -> Result<Vec<i64>> {
        if v.len() != self.width() {
            return Err(Error::Group(format!("element has {} coordinates, group needs {}", v.len(), self.width())));
        }
        for (k, &d) in self.torsion.iter().enumerate() {
            v[self.free_rank + k] = v[self.free_rank + k].rem_euclid(d as i64);
        }
        Ok(v)
    }

    /// The relation lattice: one column per torsion coordinate.
    pub(crate) fn relation_columns(&self) -> Vec<Vec<(usize, BigInt)>> {
        self.torsion.iter().enumerate().map(|(k, &d)| vec![(self.free_rank + k, BigInt::from(d))]).collect()
    }

    /// Matrix `[S | D]` whose columns are the generators followed by the torsion relations.
    pub(crate) fn presentation_matrix(&self, gens: &[Vec<i64>]) -> SparseIntMatrix {
        let mut cols: Vec<Vec<(usize, BigInt)>> = gens
            .iter()
            .map(|g| g.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, BigInt::from(x))).collect())
            .collect();
        cols.extend(self.relation_columns());
        SparseIntMatrix::from_columns(self.width(), cols).expect("coordinates in range")
    }

    /// Whether the elements generate the group (as a group).
    pub fn generated_by(&self, gens: &[Vec<i64>]) -> bool {
        let form = smith(&self.presentation_matrix(gens), false);
        form.rank() == self.width() && form.factors.iter().all(|d| d.is_one())
    }
}

impl std::fmt::Display for FGAbelian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" + "))
    }
}

impl std::str::FromStr for FGAbelian {
    type Err = Error;

    /// `Z`, `Z^k`, `Z/d`, joined by `+`; for example `Z^2 + Z/3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::Group(format!("cannot parse group `{s}`: {m}"));
        let mut free_rank = 0;
        let mut torsion = Vec::new();
        for term in s.split('+').map(str::trim) {
            if term == "Z" {
                free_rank += 1;
            } else if let Some(k) = term.strip_prefix("Z^") {
                free_rank += k.trim().parse::<usize>().map_err(|e| bad(e.to_string()))?;
            } else if let Some(d) = term.strip_prefix("Z/") {
                torsion.push(d.trim().parse::<u64>().map_err(|e| bad(e.to_string()))?);
            } else {
                return Err(bad(format!("unknown term `{term}`")));
            }
        }
        FGAbelian::new(free_rank, torsion)
    }
}

impl Group for FGAbelian {
    type Elem = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.width()]
    }

    fn op(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        let v = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.canonical(v).expect("same width")
    }

    fn inverse(&self, a: &Vec<i64>) -> Vec<i64> {
        self.canonical(a.iter().map(|x| -x).collect()).expect("same width")
    }

    /// Bare integers in width one, `(a,b,…)` otherwise.
    fn format(&self, a: &Vec<i64>) -> String {
        if a.len() == 1 {
            a[0].to_string()
        } else {
            let parts: Vec<String> = a.iter().map(i64::to_string).collect();
            format!("({})", parts.join(","))
        }
    }

    fn parse_element(&self, s: &str) -> Result<Vec<i64>> {
        let t = s.trim();
        let inner = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
        let v = inner
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<i64>, _>>()
            .map_err(|e| Error::Group(format!("cannot parse element `{s}`: {e}")))?;
        self.canonical(v)
    }

    fn elements(&self) -> Option<Vec<Vec<i64>>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![Vec::new()];
        for &d in &self.torsion {
            out = out.into_iter().flat_map(|p| (0..d as i64).map(move |x| [p.clone(), vec![x]].concat())).collect();
        }
        Some(out)
    }
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl GroupTable {
    /// `table[a][b]` is the index of `a·b`. Checks the group axioms.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Group("multiplication table must be square over the listed elements".into()));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::Group("duplicate element names".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::Group("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::Group(format!("{} has no inverse", names[a])))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Group(format!(
                            "not associative at ({},{},{})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(GroupTable { names, table, identity, inverses })
    }

    /// Parses lines `elements: e a b` followed by one `a: a·e a·a a·b` row per element.
    pub fn parse(lines: &[&str]) -> Result<Self> {
        let mut names: Option<Vec<String>> = None;
        let mut rows: HashMap<String, Vec<String>> = HashMap::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("elements:") {
                names = Some(rest.split_whitespace().map(String::from).collect());
            } else if let Some((head, rest)) = line.split_once(':') {
                rows.insert(head.trim().to_string(), rest.split_whitespace().map(String::from).collect());
            } else {
                return Err(Error::Group(format!("unexpected table line `{line}`")));
            }
        }
        let names = names.ok_or_else(|| Error::Group("missing `elements:` line".into()))?;
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::Group(format!("unknown element `{s}`")));
        let table = names
            .iter()
            .map(|a| {
                rows.get(a)
                    .ok_or_else(|| Error::Group(format!("missing row for `{a}`")))?
                    .iter()
                    .map(|s| lookup(s))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GroupTable::new(names, table)
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        let names = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::new(names, table)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }
}

impl Group for GroupTable {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.identity
    }

    fn op(&self, a: &usize, b: &usize) -> usize {
        self.table[*a][*b]
    }

    fn inverse(&self, a: &usize) -> usize {
        self.inverses[*a]
    }

    fn format(&self, a: &usize) -> String {
        self.names[*a].clone()
    }

    fn parse_element(&self, s: &str) -> Result<usize> {
        let t = s.trim();
        self.names.iter().position(|n| n == t).ok_or_else(|| Error::Group(format!("unknown element `{t}`")))
    }

    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.order()).collect())
    }
}

/// Ordered generating subset avoiding the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSet<G: Group> {
    elements: Vec<G::Elem>,
}

impl<G: Group> GenSet<G> {
    pub fn new(group: &G, elements: Vec<G::Elem>) -> Result<Self> {
        let identity = group.identity();
        let mut seen = BTreeSet::new();
        for s in &elements {
            if *s == identity {
                return Err(Error::Group("generating sets may not contain the identity".into()));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::Group(format!("duplicate generator {}", group.format(s))));
            }
        }
        if elements.is_empty() {
            return Err(Error::Group("generating set is empty".into()));
        }
        Ok(GenSet { elements })
    }

    /// Elements separated by `;`, for example `(1,0);(0,1)` or `1;3`.
    pub fn parse(group: &G, s: &str) -> Result<Self> {
        let elements = s
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| group.parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, elements)
    }

    pub fn elements(&self) -> &[G::Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn format(&self, group: &G) -> String {
        self.elements.iter().map(|s| group.format(s)).collect::<Vec<_>>().join(";")
    }
}

/// Elements reachable from the identity by right multiplication with `gens`.
pub fn orbit<G: Group>(group: &G, gens: &[G::Elem]) -> BTreeSet<G::Elem> {
    let mut seen = BTreeSet::from([group.identity()]);
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = group.op(&g, s);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen
}

/// Generation check for finite groups by orbit closure.
pub fn generates_finite<G: Group>(group: &G, gens: &[G::Elem]) -> Result<bool> {
    let all = group.elements().ok_or_else(|| Error::Group("group is infinite".into()))?;
    Ok(orbit(group, gens).len() == all.len())
}

pub(crate) fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Range(format!("{x} does not fit in 64 bits")))
}

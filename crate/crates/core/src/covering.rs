//! l-coverings: verification, construction from fiber actions, lifting and
//! deck transformations.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::digraph::{check_morphism, is_homotopy, morphism_distance, Digraph, DigraphMorphism, Dist};
use crate::error::{Error, Result};
use crate::fundamental::walks_by_endpoint;
use crate::linalg::FieldKind;
use crate::nerve::seq_label;
use crate::path::omega_rank_between;

/// Why a map fails to be an l-covering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoveringViolation {
    /// `e` has no partner over `to` within distance `l`.
    NoPartner {
        from: String,
        to: String,
        e: String,
    },
    /// `e` has several partners over `to` within distance `l`.
    SeveralPartners {
        from: String,
        to: String,
        e: String,
        partners: Vec<String>,
    },
    /// The partner sits at a different distance than the base points.
    DistanceMismatch {
        from: String,
        to: String,
        e: String,
        partner: String,
        total: u32,
        base: u32,
    },
    /// Two fiber elements share a partner.
    NotInjective {
        from: String,
        to: String,
        partner: String,
    },
    NotAMorphism {
        tail: String,
        head: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringCheck {
    pub level: usize,
    pub holds: bool,
    pub counterexample: Option<CoveringViolation>,
}

fn fibers_of(base: &Digraph, projection: &[usize]) -> Vec<Vec<usize>> {
    let mut fibers = vec![Vec::new(); base.vertex_count()];
    for (e, &x) in projection.iter().enumerate() {
        fibers[x].push(e);
    }
    fibers
}

/// For every base pair `(x, x′)` with `dist(x, x′) ≤ l`, the elements of the
/// two fibers within distance `l` of each other must pair up bijectively, at
/// exactly the base distance.
pub fn is_l_covering(total: &Digraph, base: &Digraph, projection: &[usize], l: usize) -> Result<CoveringCheck> {
    check_projection(total, base, projection)?;
    let morph = check_morphism(projection, total, base);
    if let Some((a, b)) = morph.violation {
        return Ok(CoveringCheck {
            level: l,
            holds: false,
            counterexample: Some(CoveringViolation::NotAMorphism {
                tail: total.name(a).to_string(),
                head: total.name(b).to_string(),
            }),
        });
    }
    let fibers = fibers_of(base, projection);
    let bound = l as u32;
    for x in 0..base.vertex_count() {
        for x2 in 0..base.vertex_count() {
            let Dist::Finite(dx) = base.dist(x, x2) else { continue };
            if dx > bound {
                continue;
            }
            let fail = |v| Ok(CoveringCheck { level: l, holds: false, counterexample: Some(v) });
            let mut used: HashMap<usize, usize> = HashMap::new();
            for &e in &fibers[x] {
                let partners: Vec<usize> =
                    fibers[x2].iter().copied().filter(|&e2| total.dist(e, e2).at_most(bound)).collect();
                let (from, to, en) = (base.name(x).to_string(), base.name(x2).to_string(), total.name(e).to_string());
                match partners.as_slice() {
                    [] => return fail(CoveringViolation::NoPartner { from, to, e: en }),
                    [e2] => {
                        let de = total.dist(e, *e2).finite().expect("within bound");
                        if de != dx {
                            return fail(CoveringViolation::DistanceMismatch {
                                from,
                                to,
                                e: en,
                                partner: total.name(*e2).to_string(),
                                total: de,
                                base: dx,
                            });
                        }
                        if used.insert(*e2, e).is_some() {
                            return fail(CoveringViolation::NotInjective {
                                from,
                                to,
                                partner: total.name(*e2).to_string(),
                            });
                        }
                    }
                    many => {
                        return fail(CoveringViolation::SeveralPartners {
                            from,
                            to,
                            e: en,
                            partners: many.iter().map(|&v| total.name(v).to_string()).collect(),
                        })
                    }
                }
            }
            if used.len() != fibers[x2].len() {
                let missing = fibers[x2].iter().find(|e2| !used.contains_key(e2)).expect("unmatched element");
                // Seen from the other side, the unmatched element lacks a partner.
                return fail(CoveringViolation::NoPartner {
                    from: base.name(x2).to_string(),
                    to: base.name(x).to_string(),
                    e: total.name(*missing).to_string(),
                });
            }
        }
    }
    Ok(CoveringCheck { level: l, holds: true, counterexample: None })
}

/// Unique-lifting condition at the vertex `e` only: within distance `l` in
/// either direction, each nearby base vertex has exactly one partner of `e`,
/// at the base distance.
pub fn covers_locally_at(total: &Digraph, base: &Digraph, projection: &[usize], l: usize, e: usize) -> Result<bool> {
    check_projection(total, base, projection)?;
    let fibers = fibers_of(base, projection);
    let bound = l as u32;
    let x = projection[e];
    for x2 in 0..base.vertex_count() {
        for forward in [true, false] {
            let dx = if forward { base.dist(x, x2) } else { base.dist(x2, x) };
            if !dx.at_most(bound) {
                continue;
            }
            let d = |e2: usize| if forward { total.dist(e, e2) } else { total.dist(e2, e) };
            let partners: Vec<usize> = fibers[x2].iter().copied().filter(|&e2| d(e2).at_most(bound)).collect();
            if partners.len() != 1 || d(partners[0]) != dx {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_projection(total: &Digraph, base: &Digraph, projection: &[usize]) -> Result<()> {
    if projection.len() != total.vertex_count() {
        return Err(Error::Dimension(format!(
            "projection defined on {} of {} vertices",
            projection.len(),
            total.vertex_count()
        )));
    }
    if let Some(&x) = projection.iter().find(|&&x| x >= base.vertex_count()) {
        return Err(Error::UnknownVertex(x.to_string()));
    }
    Ok(())
}

/// A digraph morphism `p: E → X` with the largest level (up to a requested
/// bound) at which it is a covering.
#[derive(Clone, Debug)]
pub struct CoverMorphism {
    total: Arc<Digraph>,
    base: Arc<Digraph>,
    projection: Vec<usize>,
    fibers: Vec<Vec<usize>>,
    validated_level: usize,
}

impl CoverMorphism {
    /// Fails unless `projection` is a digraph morphism.
    pub fn new(total: Arc<Digraph>, base: Arc<Digraph>, projection: Vec<usize>, max_level: usize) -> Result<Self> {
        DigraphMorphism::new(total.clone(), base.clone(), projection.clone())?;
        let mut validated_level = 0;
        for l in 1..=max_level {
            if is_l_covering(&total, &base, &projection, l)?.holds {
                validated_level = l;
            } else {
                break;
            }
        }
        let fibers = fibers_of(&base, &projection);
        Ok(CoverMorphism { total, base, projection, fibers, validated_level })
    }

    pub fn total(&self) -> &Arc<Digraph> {
        &self.total
    }

    pub fn base(&self) -> &Arc<Digraph> {
        &self.base
    }

    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    pub fn fiber(&self, x: usize) -> &[usize] {
        &self.fibers[x]
    }

    pub fn validated_level(&self) -> usize {
        self.validated_level
    }

    fn require(&self, level: usize) -> Result<()> {
        if self.validated_level < level {
            return Err(Error::NotCovering(format!(
                "validated at level {}, level {level} required",
                self.validated_level
            )));
        }
        Ok(())
    }

    /// Unique `e′` over `x2` with `e → e′` an arrow (or `e′ = e` when `x2 = p(e)`).
    fn step_forward(&self, e: usize, x2: usize) -> Option<usize> {
        if self.projection[e] == x2 {
            return Some(e);
        }
        let mut it = self.total.out_neighbors(e).iter().copied().filter(|&v| self.projection[v] == x2);
        let first = it.next();
        if it.next().is_some() {
            None
        } else {
            first
        }
    }

    fn step_backward(&self, e: usize, x2: usize) -> Option<usize> {
        if self.projection[e] == x2 {
            return Some(e);
        }
        let mut it = self.total.in_neighbors(e).iter().copied().filter(|&v| self.projection[v] == x2);
        let first = it.next();
        if it.next().is_some() {
            None
        } else {
            first
        }
    }

    pub fn to_json(&self) -> CoverSummary {
        CoverSummary {
            total: (*self.total).clone(),
            projection: (0..self.total.vertex_count())
                .map(|e| (self.total.name(e).to_string(), self.base.name(self.projection[e]).to_string()))
                .collect(),
            validated_level: self.validated_level,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverSummary {
    pub total: Digraph,
    pub projection: BTreeMap<String, String>,
    pub validated_level: usize,
}

/// Fibers over each base vertex and, for each base arrow `x′ → x`, a bijection
/// `fiber(x) → fiber(x′)`.
///
/// The action runs against the arrow: the cover gets an arrow from
/// `action(x′→x)(e)` over `x′` to `e` over `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberAction {
    pub fibers: Vec<Vec<String>>,
    /// Indexed like `Digraph::arrows`; entry `k` of the map sends fiber element
    /// `k` of the arrow's head to an element of the arrow's tail fiber.
    pub maps: Vec<Vec<usize>>,
}

impl FiberAction {
    pub fn new(x: &Digraph, fibers: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if fibers.len() != x.vertex_count() || maps.len() != x.arrow_count() {
            return Err(Error::Dimension("fiber action does not match the base digraph".into()));
        }
        for (k, &(tail, head)) in x.arrows().iter().enumerate() {
            let m = &maps[k];
            let mut hit = vec![false; fibers[tail].len()];
            if m.len() != fibers[head].len() || fibers[head].len() != fibers[tail].len() {
                return Err(Error::Dimension(format!(
                    "action of {} -> {} is not a bijection between fibers",
                    x.name(tail),
                    x.name(head)
                )));
            }
            for &t in m {
                if t >= hit.len() || std::mem::replace(&mut hit[t], true) {
                    return Err(Error::Dimension(format!(
                        "action of {} -> {} is not a bijection between fibers",
                        x.name(tail),
                        x.name(head)
                    )));
                }
            }
        }
        Ok(FiberAction { fibers, maps })
    }

    /// Every fiber is `0..n` and every arrow acts by `f`.
    pub fn uniform(x: &Digraph, size: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        let fibers = vec![(0..size).map(|i| i.to_string()).collect::<Vec<_>>(); x.vertex_count()];
        let maps = vec![(0..size).map(&f).collect::<Vec<_>>(); x.arrow_count()];
        Self::new(x, fibers, maps)
    }

    /// Composite along a walk `x₀ → … → x_n`: `fiber(x_n) → fiber(x₀)`.
    fn along(&self, x: &Digraph, walk: &[usize]) -> Vec<usize> {
        let last = *walk.last().expect("nonempty");
        let mut m: Vec<usize> = (0..self.fibers[last].len()).collect();
        for w in walk.windows(2).rev() {
            let a = x.arrow_index(w[0], w[1]).expect("walk follows arrows");
            m = m.iter().map(|&i| self.maps[a][i]).collect();
        }
        m
    }

    /// Reads `fiber x: a b` and `arrow x' x: a->b, b->a` lines, the arrow line
    /// giving the action of the base arrow `x' → x` from `fiber(x)` to `fiber(x')`.
    pub fn parse(x: &Digraph, text: &str) -> Result<Self> {
        let mut fibers: Vec<Option<Vec<String>>> = vec![None; x.vertex_count()];
        let mut raw_maps: Vec<Option<(usize, Vec<(String, String)>)>> = vec![None; x.arrow_count()];
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = k + 1;
            let perr = |m: &str| Error::Parse { line: lineno, message: m.to_string() };
            let (head, rest) = line.split_once(':').ok_or_else(|| perr("expected `:`"))?;
            let words: Vec<&str> = head.split_whitespace().collect();
            match words.as_slice() {
                ["fiber", v] => {
                    fibers[x.vertex(v)?] = Some(rest.split_whitespace().map(String::from).collect());
                }
                ["arrow", t, h] => {
                    let (it, ih) = (x.vertex(t)?, x.vertex(h)?);
                    let a = x.arrow_index(it, ih).ok_or_else(|| perr(&format!("{t} -> {h} is not an arrow")))?;
                    let pairs = rest
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| {
                            s.split_once("->")
                                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                                .ok_or_else(|| perr("expected `a->b`"))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    raw_maps[a] = Some((lineno, pairs));
                }
                _ => return Err(perr("expected `fiber x:` or `arrow x' x:`")),
            }
        }
        let fibers: Vec<Vec<String>> = fibers
            .into_iter()
            .enumerate()
            .map(|(v, f)| f.ok_or_else(|| Error::Parse { line: 0, message: format!("no fiber for {}", x.name(v)) }))
            .collect::<Result<_>>()?;
        let mut maps = Vec::with_capacity(x.arrow_count());
        for (k, entry) in raw_maps.into_iter().enumerate() {
            let (tail, head) = x.arrows()[k];
            let (lineno, pairs) = entry.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("no action for arrow {} -> {}", x.name(tail), x.name(head)),
            })?;
            let pos = |fiber: &[String], s: &str| {
                fiber.iter().position(|f| f == s).ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: format!("`{s}` is not in the expected fiber"),
                })
            };
            let mut m = vec![usize::MAX; fibers[head].len()];
            for (a, b) in pairs {
                m[pos(&fibers[head], &a)?] = pos(&fibers[tail], &b)?;
            }
            if m.contains(&usize::MAX) {
                return Err(Error::Parse { line: lineno, message: "action is not total on the fiber".into() });
            }
            maps.push(m);
        }
        FiberAction::new(x, fibers, maps)
    }

    /// The action of a covering: base arrow `x′ → x` sends `e` over `x` to the
    /// unique `e′` over `x′` with an arrow `e′ → e`.
    pub fn from_covering(p: &CoverMorphism) -> Result<Self> {
        p.require(1)?;
        let (x, e) = (p.base(), p.total());
        let fibers: Vec<Vec<String>> =
            (0..x.vertex_count()).map(|v| p.fiber(v).iter().map(|&u| e.name(u).to_string()).collect()).collect();
        let maps = x
            .arrows()
            .iter()
            .map(|&(tail, head)| {
                p.fiber(head)
                    .iter()
                    .map(|&u| {
                        let w = p.step_backward(u, tail).ok_or_else(|| Error::Internal("missing arrow lift".into()))?;
                        Ok(p.fiber(tail).iter().position(|&f| f == w).expect("in fiber"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiberAction::new(x, fibers, maps)
    }
}

/// The cover of `x` defined by `action`, checked for consistency along all
/// pairs of walks of at most `l` arrows with common endpoints.
///
/// Cover vertices are named `x/a` for fiber element `a` over `x`.
pub fn build_cover(x: &Arc<Digraph>, l: usize, action: &FiberAction) -> Result<CoverMorphism> {
    if l == 0 {
        return Err(Error::Range("covering level must be at least 1".into()));
    }
    for u in 0..x.vertex_count() {
        for walks in walks_by_endpoint(x, u, l).values() {
            let first = action.along(x, &walks[0]);
            if let Some(w) = walks.iter().skip(1).find(|w| action.along(x, w) != first) {
                return Err(Error::InconsistentAction { first: seq_label(x, &walks[0]), second: seq_label(x, w) });
            }
        }
    }
    let mut names = Vec::new();
    let mut offsets = Vec::with_capacity(x.vertex_count());
    let mut projection = Vec::new();
    for v in 0..x.vertex_count() {
        offsets.push(names.len());
        for a in &action.fibers[v] {
            names.push(format!("{}/{a}", x.name(v)));
            projection.push(v);
        }
    }
    let mut arrows = Vec::new();
    for (k, &(tail, head)) in x.arrows().iter().enumerate() {
        for (i, &j) in action.maps[k].iter().enumerate() {
            arrows.push((offsets[tail] + j, offsets[head] + i));
        }
    }
    let total = Arc::new(Digraph::new(names, arrows)?);
    let p = CoverMorphism::new(total, x.clone(), projection, l)?;
    if p.validated_level < l {
        return Err(Error::Internal(format!("constructed cover only validates at level {}", p.validated_level)));
    }
    Ok(p)
}

/// The unique lift of a base walk through `e` at position `anchor`.
///
/// Consecutive base vertices must be equal or joined by an arrow.
pub fn lift_path(p: &CoverMorphism, base_path: &[usize], anchor: usize, e: usize) -> Result<Vec<usize>> {
    p.require(1)?;
    if anchor >= base_path.len() {
        return Err(Error::Range(format!("anchor {anchor} outside a path with {} vertices", base_path.len())));
    }
    if e >= p.total.vertex_count() || p.projection[e] != base_path[anchor] {
        return Err(Error::Lift(format!("vertex {e} is not over {}", p.base.name(base_path[anchor]))));
    }
    for w in base_path.windows(2) {
        if !p.base.in_x1(w[0], w[1]) {
            return Err(Error::Lift(format!("{} -> {} is not an arrow", p.base.name(w[0]), p.base.name(w[1]))));
        }
    }
    let mut lift = vec![0; base_path.len()];
    lift[anchor] = e;
    for i in anchor + 1..base_path.len() {
        lift[i] = p.step_forward(lift[i - 1], base_path[i]).ok_or_else(|| Error::Lift("arrow does not lift".into()))?;
    }
    for i in (0..anchor).rev() {
        lift[i] =
            p.step_backward(lift[i + 1], base_path[i]).ok_or_else(|| Error::Lift("arrow does not lift".into()))?;
    }
    Ok(lift)
}

/// Lifts a homotopy `f₀, …, f_k: W → X` starting from a lift `g₀` of `f₀`.
pub fn lift_homotopy(p: &CoverMorphism, steps: &[DigraphMorphism], g0: &[usize]) -> Result<Vec<Vec<usize>>> {
    p.require(2)?;
    let first = steps.first().ok_or_else(|| Error::Range("empty homotopy".into()))?;
    if !is_homotopy(steps)? {
        return Err(Error::Lift("the maps do not form a homotopy".into()));
    }
    if **first.target() != *p.base {
        return Err(Error::Dimension("homotopy does not land in the base".into()));
    }
    let w = first.source().clone();
    let g0_morph = DigraphMorphism::new(w.clone(), p.total.clone(), g0.to_vec())?;
    if (0..w.vertex_count()).any(|v| p.projection[g0_morph.apply(v)] != first.apply(v)) {
        return Err(Error::Lift("g₀ does not lie over f₀".into()));
    }
    let mut lifts = vec![g0.to_vec()];
    for pair in steps.windows(2) {
        let (f, f2) = (&pair[0], &pair[1]);
        let forward = morphism_distance(f, f2)?.at_most(1);
        let prev = lifts.last().expect("nonempty");
        let next = (0..w.vertex_count())
            .map(|v| {
                let step =
                    if forward { p.step_forward(prev[v], f2.apply(v)) } else { p.step_backward(prev[v], f2.apply(v)) };
                step.ok_or_else(|| Error::Lift(format!("no unique lift at {}", w.name(v))))
            })
            .collect::<Result<Vec<_>>>()?;
        DigraphMorphism::new(w.clone(), p.total.clone(), next.clone())
            .map_err(|_| Error::Lift("lifted step is not a digraph morphism".into()))?;
        lifts.push(next);
    }
    Ok(lifts)
}

/// Automorphisms of the total digraph commuting with the projection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeckGroup {
    /// Each element as the image of every total vertex; the identity comes first.
    pub elements: Vec<Vec<usize>>,
    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub table: Vec<Vec<usize>>,
}

impl DeckGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Candidates for the image of the first total vertex are tried in index order
/// and extended by unique lifting along a spanning tree.
pub fn deck_group(p: &CoverMorphism, l: usize) -> Result<DeckGroup> {
    p.require(l.max(1))?;
    let e = &p.total;
    if e.vertex_count() == 0 {
        return Ok(DeckGroup { elements: vec![Vec::new()], table: vec![vec![0]] });
    }
    if !e.is_connected() {
        return Err(Error::Disconnected);
    }
    let tree = bfs_tree(e, 0);
    let mut elements: Vec<Vec<usize>> = Vec::new();
    'candidate: for &c in p.fiber(p.projection[0]) {
        let mut phi = vec![usize::MAX; e.vertex_count()];
        phi[0] = c;
        for &(u, v, forward) in &tree {
            let img = if forward {
                p.step_forward(phi[u], p.projection[v])
            } else {
                p.step_backward(phi[u], p.projection[v])
            };
            match img {
                Some(w) => phi[v] = w,
                None => continue 'candidate,
            }
        }
        let mut seen = vec![false; e.vertex_count()];
        for &w in &phi {
            if std::mem::replace(&mut seen[w], true) {
                continue 'candidate;
            }
        }
        if e.arrows().iter().any(|&(a, b)| !e.has_arrow(phi[a], phi[b])) {
            continue;
        }
        elements.push(phi);
    }
    let index: HashMap<&Vec<usize>, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut table = Vec::with_capacity(elements.len());
    for g in &elements {
        let row = elements
            .iter()
            .map(|h| {
                let gh: Vec<usize> = h.iter().map(|&v| g[v]).collect();
                index.get(&gh).copied().ok_or_else(|| Error::Internal("deck transformations not closed".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    Ok(DeckGroup { elements, table })
}

/// Tree edges `(u, v, forward)` of a breadth-first search on the underlying
/// undirected graph, `forward` when the arrow is `u → v`.
fn bfs_tree(x: &Digraph, root: usize) -> Vec<(usize, usize, bool)> {
    let mut seen = vec![false; x.vertex_count()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut tree = Vec::new();
    while let Some(u) = queue.pop_front() {
        let mut nbrs: Vec<(usize, bool)> = x.out_neighbors(u).iter().map(|&v| (v, true)).collect();
        nbrs.extend(x.in_neighbors(u).iter().map(|&v| (v, false)));
        nbrs.sort_by_key(|&(v, f)| (v, !f));
        for (v, forward) in nbrs {
            if !seen[v] {
                seen[v] = true;
                tree.push((u, v, forward));
                queue.push_back(v);
            }
        }
    }
    tree
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaRanks {
    pub total: usize,
    pub base: usize,
}

/// Rank of Ω_n(E) on paths from `e` into the fiber over `x`, and of Ω_n(X) on
/// paths from `p(e)` to `x`.
pub fn omega_rank_check(p: &CoverMorphism, x: usize, e: usize, n: usize, field: FieldKind) -> Result<OmegaRanks> {
    p.require(2)?;
    if x >= p.base.vertex_count() || e >= p.total.vertex_count() {
        return Err(Error::Range("vertex out of range".into()));
    }
    let total = omega_rank_between(&p.total, n, e, p.fiber(x), field)?;
    let base = omega_rank_between(&p.base, n, p.projection[e], &[x], field)?;
    Ok(OmegaRanks { total, base })
}

/// Reads `e -> x` lines assigning each total vertex its base vertex.
pub fn parse_projection(total: &Digraph, base: &Digraph, text: &str) -> Result<Vec<usize>> {
    let mut map: Vec<Option<usize>> = vec![None; total.vertex_count()];
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) =
            line.split_once("->").ok_or_else(|| Error::Parse { line: k + 1, message: "expected `e -> x`".into() })?;
        let e = total.vertex(a.trim())?;
        let x = base.vertex(b.trim())?;
        if map[e].replace(x).is_some_and(|old| old != x) {
            return Err(Error::Parse { line: k + 1, message: format!("{} mapped twice", a.trim()) });
        }
    }
    map.into_iter()
        .enumerate()
        .map(|(e, x)| x.ok_or_else(|| Error::Parse { line: 0, message: format!("{} is not mapped", total.name(e)) }))
        .collect()
}

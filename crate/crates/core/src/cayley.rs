//! Cayley digraphs, relations among short words and the abelian path homology formula.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::fundamental::{
    abelianization, free_reduce, inverse_word, AbelianInvariants, GroupPresentation, Letter, Word,
};
use crate::group::{generates_finite, to_i64, FGAbelian, GenSet, Group};
use crate::linalg::{kernel_basis, FieldKind, Ring};

pub const MAX_RELATION_LEVEL: usize = 4;

/// `Cay(G, S)` for a finite group: arrows `g → g·s`.
pub fn cayley_finite<G: Group>(group: &G, gens: &GenSet<G>) -> Result<Digraph> {
    if !generates_finite(group, gens.elements())? {
        return Err(Error::NotGenerating);
    }
    let elements = group.elements().expect("finite");
    let index: HashMap<&G::Elem, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let arrows: Vec<(usize, usize)> = elements
        .iter()
        .enumerate()
        .flat_map(|(i, g)| gens.elements().iter().map(move |s| (i, g, s)))
        .map(|(i, g, s)| (i, index[&group.op(g, s)]))
        .collect();
    Digraph::new(elements.iter().map(|g| group.format(g)).collect(), arrows)
}

/// A ball in a Cayley digraph together with the group element of each vertex.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub digraph: Digraph,
    pub elements: Vec<Vec<i64>>,
}

/// Induced subdigraph of `Cay(G, S)` on elements of word length at most `radius`
/// over `S ∪ −S`; vertices sorted by element.
pub fn cayley_ball(group: &FGAbelian, gens: &GenSet<FGAbelian>, radius: usize) -> Result<CayleyBall> {
    if !group.generated_by(gens.elements()) {
        return Err(Error::NotGenerating);
    }
    let mut steps: Vec<Vec<i64>> = gens.elements().to_vec();
    steps.extend(gens.elements().iter().map(|s| group.inverse(s)));
    let mut depth: BTreeMap<Vec<i64>, usize> = BTreeMap::from([(group.identity(), 0)]);
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        let d = depth[&g];
        if d == radius {
            continue;
        }
        for s in &steps {
            let h = group.op(&g, s);
            if !depth.contains_key(&h) {
                depth.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    let elements: Vec<Vec<i64>> = depth.into_keys().collect();
    let index: HashMap<&Vec<i64>, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut arrows = Vec::new();
    for (i, g) in elements.iter().enumerate() {
        for s in gens.elements() {
            if let Some(&j) = index.get(&group.op(g, s)) {
                if j != i {
                    arrows.push((i, j));
                }
            }
        }
    }
    let names = elements.iter().map(|g| group.format(g)).collect();
    Ok(CayleyBall { digraph: Digraph::new(names, arrows)?, elements })
}

/// A ball of `Cay(G, S)` mapped onto `Cay(H, φ(S))` by a homomorphism `φ`.
#[derive(Clone, Debug)]
pub struct BallProjection {
    pub total: Arc<Digraph>,
    pub base: Arc<Digraph>,
    pub projection: Vec<usize>,
}

/// `images[i]` is `φ` of the `i`-th coordinate generator of `G`; `H` must be finite.
pub fn ball_projection(
    group: &FGAbelian,
    gens: &GenSet<FGAbelian>,
    radius: usize,
    target: &FGAbelian,
    images: &[Vec<i64>],
) -> Result<BallProjection> {
    if images.len() != group.width() {
        return Err(Error::Dimension(format!("{} images for {} coordinates", images.len(), group.width())));
    }
    let phi = |g: &[i64]| -> Result<Vec<i64>> {
        let mut acc = vec![0i64; target.width()];
        for (c, img) in g.iter().zip(images) {
            if img.len() != target.width() {
                return Err(Error::Dimension("image has the wrong number of coordinates".into()));
            }
            for (a, x) in acc.iter_mut().zip(img) {
                *a += c * x;
            }
        }
        target.canonical(acc)
    };
    for (k, &d) in group.torsion().iter().enumerate() {
        let img = &images[group.free_rank() + k];
        let scaled: Vec<i64> = img.iter().map(|x| x * d as i64).collect();
        if target.canonical(scaled)? != target.identity() {
            return Err(Error::Group("images do not define a homomorphism".into()));
        }
    }
    let image_gens = GenSet::new(target, gens.elements().iter().map(|s| phi(s)).collect::<Result<Vec<_>>>()?)?;
    let base = cayley_finite(target, &image_gens)?;
    let all = target.elements().expect("finite");
    let index: HashMap<Vec<i64>, usize> = all.into_iter().enumerate().map(|(i, g)| (g, i)).collect();
    let ball = cayley_ball(group, gens, radius)?;
    let projection = ball.elements.iter().map(|g| Ok(index[&phi(g)?])).collect::<Result<Vec<_>>>()?;
    Ok(BallProjection { total: Arc::new(ball.digraph), base: Arc::new(base), projection })
}

/// Two words of at most `l` generators with equal products.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RelationWord {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl RelationWord {
    /// `left · right⁻¹`, freely reduced.
    pub fn relator(&self) -> Word {
        let left: Word = self.left.iter().map(|&i| Letter::new(i)).collect();
        let right: Word = self.right.iter().map(|&i| Letter::new(i)).collect();
        free_reduce(&[left, inverse_word(&right)].concat())
    }

    pub fn format<G: Group>(&self, group: &G, gens: &GenSet<G>) -> String {
        let side = |w: &[usize]| {
            if w.is_empty() {
                "e".to_string()
            } else {
                w.iter().map(|&i| group.format(&gens.elements()[i])).collect::<Vec<_>>().join(" ")
            }
        };
        format!("{} ~ {}", side(&self.left), side(&self.right))
    }
}

/// All words of length `0..=l` bucketed by product; each bucket contributes
/// `(w, first)` for every member `w` after its first (shortest, then
/// lexicographically least) word.
pub fn w_l_relations<G: Group>(group: &G, gens: &GenSet<G>, l: usize) -> Result<Vec<RelationWord>> {
    if l > MAX_RELATION_LEVEL {
        return Err(Error::Range(format!("relation level {l} exceeds {MAX_RELATION_LEVEL}")));
    }
    let mut buckets: BTreeMap<G::Elem, Vec<Vec<usize>>> = BTreeMap::new();
    let mut frontier: Vec<(Vec<usize>, G::Elem)> = vec![(Vec::new(), group.identity())];
    for len in 0..=l {
        for (w, g) in &frontier {
            buckets.entry(g.clone()).or_default().push(w.clone());
        }
        if len == l {
            break;
        }
        frontier = frontier
            .iter()
            .flat_map(|(w, g)| {
                gens.elements().iter().enumerate().map(move |(i, s)| {
                    let mut w2 = w.clone();
                    w2.push(i);
                    (w2, group.op(g, s))
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for words in buckets.values() {
        let rep = &words[0];
        out.extend(words[1..].iter().map(|w| RelationWord { left: w.clone(), right: rep.clone() }));
    }
    out.sort_by(|a, b| (a.left.len(), &a.left, &a.right).cmp(&(b.left.len(), &b.left, &b.right)));
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FlPresentation {
    pub level: usize,
    pub presentation: GroupPresentation,
    pub abelianization: AbelianInvariants,
    pub abelianization_finite: bool,
}

/// `F(S)` modulo the relators of [`w_l_relations`], generators named by their elements.
pub fn f_l_presentation<G: Group>(group: &G, gens: &GenSet<G>, l: usize) -> Result<FlPresentation> {
    let rels = w_l_relations(group, gens, l)?;
    let mut seen = BTreeSet::new();
    let relators: Vec<Word> =
        rels.iter().map(RelationWord::relator).filter(|r| !r.is_empty() && seen.insert(r.clone())).collect();
    let names = gens.elements().iter().map(|s| group.format(s)).collect();
    let presentation = GroupPresentation::new(names, relators)?;
    let abelianization = abelianization(&presentation);
    let abelianization_finite = abelianization.free_rank == 0;
    Ok(FlPresentation { level: l, presentation, abelianization, abelianization_finite })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisViolation {
    /// `s + t` lies in `S ∪ {0}`.
    SumInSet { s: String, t: String, sum: String },
    /// Two different unordered pairs have the same sum.
    SumCollision { first: (String, String), second: (String, String), sum: String },
}

impl std::fmt::Display for HypothesisViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HypothesisViolation::SumInSet { s, t, sum } => write!(f, "{s} + {t} = {sum} lies in S or is zero"),
            HypothesisViolation::SumCollision { first, second, sum } => {
                write!(f, "{} + {} = {} + {} = {sum}", first.0, first.1, second.0, second.1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub violation: Option<HypothesisViolation>,
}

/// Sums `s + t` (`s`, `t` in `S`, possibly equal) avoid `S ∪ {0}`, and distinct
/// unordered pairs have distinct sums.
pub fn check_theorem_abelian_hypotheses(group: &FGAbelian, gens: &GenSet<FGAbelian>) -> HypothesisCheck {
    let s = gens.elements();
    let members: BTreeSet<&Vec<i64>> = s.iter().collect();
    let zero = group.identity();
    let mut sums: BTreeMap<Vec<i64>, (usize, usize)> = BTreeMap::new();
    for i in 0..s.len() {
        for j in i..s.len() {
            let sum = group.op(&s[i], &s[j]);
            let f = |k: usize| group.format(&s[k]);
            if sum == zero || members.contains(&sum) {
                let violation = HypothesisViolation::SumInSet { s: f(i), t: f(j), sum: group.format(&sum) };
                return HypothesisCheck { holds: false, violation: Some(violation) };
            }
            if let Some(&(a, b)) = sums.get(&sum) {
                let violation = HypothesisViolation::SumCollision {
                    first: (f(a), f(b)),
                    second: (f(i), f(j)),
                    sum: group.format(&sum),
                };
                return HypothesisCheck { holds: false, violation: Some(violation) };
            }
            sums.insert(sum, (i, j));
        }
    }
    HypothesisCheck { holds: true, violation: None }
}

/// Kernel of `ℤ^S → G`, `e_s ↦ s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RhoKernel {
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
}

/// The kernel of `[S | D]` projected to the `S` coordinates; the projection is
/// injective because the torsion relations are independent.
pub fn rho_kernel(group: &FGAbelian, gens: &GenSet<FGAbelian>) -> Result<RhoKernel> {
    if !group.generated_by(gens.elements()) {
        return Err(Error::NotGenerating);
    }
    let m = group.presentation_matrix(gens.elements());
    let k = kernel_basis(&m, Ring::Z)?;
    let n = gens.len();
    let mut basis = Vec::with_capacity(k.cols());
    for c in 0..k.cols() {
        let mut v = vec![BigInt::zero(); n];
        for (r, x) in k.column(c) {
            if *r < n {
                v[*r] = x.clone();
            }
        }
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            v.iter_mut().for_each(|x| *x = -x.clone());
        }
        basis.push(v.iter().map(to_i64).collect::<Result<Vec<_>>>()?);
    }
    basis.sort_by(|a, b| b.cmp(a));
    Ok(RhoKernel { rank: basis.len(), basis })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianPh {
    pub field: FieldKind,
    pub rho_rank: usize,
    pub ranks: Vec<usize>,
}

/// Path homology ranks of `Cay(G, S)` as exterior powers of `ρ ⊗ K`; refuses
/// when the hypotheses fail.
pub fn abelian_ph(group: &FGAbelian, gens: &GenSet<FGAbelian>, field: FieldKind, n_max: usize) -> Result<AbelianPh> {
    field.validate()?;
    let check = check_theorem_abelian_hypotheses(group, gens);
    if let Some(v) = check.violation {
        return Err(Error::Hypotheses(v.to_string()));
    }
    let rho = rho_kernel(group, gens)?;
    Ok(AbelianPh { field, rho_rank: rho.rank, ranks: group_homology_free_abelian(rho.rank, n_max) })
}

/// Ranks of `H_n(ℤ^r; K)` for `n ≤ n_max`, the same over every field.
pub fn group_homology_free_abelian(r: usize, n_max: usize) -> Vec<usize> {
    (0..=n_max).map(|n| if n > r { 0 } else { binomial(r, n) }).collect()
}

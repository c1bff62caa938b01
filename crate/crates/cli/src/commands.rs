use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use dihom::covering::parse_projection;
use dihom::fundamental::parse_voltage;
use dihom::path::cluster_decompose;
use dihom::{
    abelian_ph, abelianization, box_product, build_cover, cayley_ball, cayley_finite, check_theorem_abelian_hypotheses,
    deck_group, exhaustion_report, f_l_presentation, is_l_covering, lift_path, magnitude_homology, magnitude_table,
    mpss_page, parse_digraph_with_warnings, ph, pi_l_presentation, rho_kernel, w_l_relations, CoverMorphism, Digraph,
    FGAbelian, FiberAction, FieldKind, GenSet, Invariant, PointedDigraph, Ring,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{CayleyCommand, Command, CoverCommand, CoverInputs, GroupArgs, InvariantArg};

const MAX_DEGREE: usize = 6;
const MAX_LEVEL: usize = 3;
const MAX_RELATION_LEVEL: usize = 4;

pub struct Outcome {
    pub report: Value,
    /// Replaces the flattened report in text mode.
    pub text: Option<String>,
    /// False for a negative check verdict.
    pub verdict: bool,
}

impl Outcome {
    fn new(report: impl Serialize) -> Result<Self> {
        Ok(Outcome { report: serde_json::to_value(report)?, text: None, verdict: true })
    }

    fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<Digraph> {
    let (x, warnings) = parse_digraph_with_warnings(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    log::info!("{}: {} vertices, {} arrows", path.display(), x.vertex_count(), x.arrow_count());
    Ok(x)
}

fn check_degree(d: usize) -> Result<()> {
    ensure!(d <= MAX_DEGREE, "degree {d} exceeds {MAX_DEGREE}");
    Ok(())
}

fn check_level(l: usize, cap: usize) -> Result<()> {
    ensure!(l <= cap, "level {l} exceeds {cap}");
    Ok(())
}

fn field_of(ring: Ring, what: &str) -> Result<FieldKind> {
    match ring.field() {
        Some(f) => Ok(f),
        None => bail!("{what} needs a field; use --ring q or --ring fp:<p>"),
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Ph { input, ring, max_degree, clusters, voltage } => {
            run_ph(input, ring.ring, *max_degree, *clusters, voltage.as_deref())
        }
        Command::Magnitude { input, ring, l } => run_magnitude(input, ring.ring, *l),
        Command::Mpss { input, ring, r, s_max, max_degree } => {
            check_degree(*max_degree)?;
            let x = load(input)?;
            let page = mpss_page(&x, *r, *s_max, *max_degree, field_of(ring.ring, "mpss")?)?;
            Outcome::new(page)
        }
        Command::Pi1 { input, level, basepoint } => run_pi1(input, *level, basepoint.as_deref()),
        Command::Cover(c) => run_cover(c),
        Command::Cayley(c) => run_cayley(c),
        Command::Boxprod { left, right } => {
            let product = box_product(&load(left)?, &load(right)?);
            let text = product.to_string();
            Ok(Outcome::new(&product)?.with_text(text))
        }
        Command::Exhaust { inputs, invariant, ring, max_degree, l, window, reduced } => {
            check_degree(*max_degree)?;
            let seq = inputs.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
            let invariant = match invariant {
                InvariantArg::Ph => Invariant::Ph { n_max: *max_degree },
                InvariantArg::Mh => Invariant::Mh { l: *l },
            };
            let field = field_of(ring.ring, "exhaust")?;
            Outcome::new(exhaustion_report(&seq, invariant, field, *window, *reduced)?)
        }
    }
}

fn run_ph(input: &Path, ring: Ring, max_degree: usize, clusters: bool, voltage: Option<&Path>) -> Result<Outcome> {
    check_degree(max_degree)?;
    let x = load(input)?;
    let h = ph(&x, &[ring], max_degree)?;
    let ranks = match ring.field() {
        Some(f) => h.ranks_over(f).expect("requested"),
        None => h.free_ranks(),
    };
    let mut report = json!({ "ring": ring, "max_degree": max_degree, "ranks": ranks, "homology": h });
    if clusters {
        let v =
            voltage.map(|p| parse_voltage(&x, &read(p)?).with_context(|| format!("in {}", p.display()))).transpose()?;
        let mut rows = Vec::new();
        for n in 0..=max_degree {
            for (key, rank) in cluster_decompose(&x, n, v.as_ref())? {
                let mut row = json!({ "degree": n, "tail": key.tail, "head": key.head, "rank": rank });
                if let Some(label) = key.label {
                    row["label"] = json!(label);
                }
                rows.push(row);
            }
        }
        report["clusters"] = Value::Array(rows);
    }
    Outcome::new(report)
}

fn run_magnitude(input: &Path, ring: Ring, l_max: u32) -> Result<Outcome> {
    let x = load(input)?;
    match ring.field() {
        Some(f) => Outcome::new(magnitude_table(&x, l_max, f)?),
        None => {
            let mut entries = Vec::new();
            for l in 0..=l_max {
                for d in magnitude_homology(&x, l, &[Ring::Z])?.degrees {
                    let torsion = serde_json::to_value(&d)?.get("torsion").cloned().unwrap_or(json!([]));
                    entries.push(json!({ "n": d.degree, "l": l, "rank": d.free_rank, "torsion": torsion }));
                }
            }
            Outcome::new(json!({ "field": "Z", "l_max": l_max, "entries": entries }))
        }
    }
}

fn run_pi1(input: &Path, level: usize, basepoint: Option<&str>) -> Result<Outcome> {
    check_level(level, MAX_LEVEL)?;
    let x = Arc::new(load(input)?);
    ensure!(x.vertex_count() > 0, "the digraph has no vertices");
    let base = match basepoint {
        Some(name) => x.vertex(name)?,
        None => 0,
    };
    let pres = pi_l_presentation(&PointedDigraph::new(x, base)?, level)?;
    let ab = abelianization(&pres.simplified);
    let text = format!("{}\nabelianization: {}\n", pres.simplified, serde_json::to_string(&ab)?);
    let report = json!({
        "level": pres.level,
        "basepoint": pres.basepoint,
        "presentation": pres.simplified,
        "raw": pres.raw,
        "tree_arrows": pres.tree_arrows,
        "abelianization": ab,
        "text": pres.simplified.to_string(),
    });
    Ok(Outcome::new(report)?.with_text(text))
}

struct LoadedCover {
    total: Arc<Digraph>,
    base: Arc<Digraph>,
    projection: Vec<usize>,
}

fn load_cover(inputs: &CoverInputs) -> Result<LoadedCover> {
    check_level(inputs.level, MAX_LEVEL)?;
    let base = load(&inputs.base)?;
    let total = load(&inputs.total)?;
    let projection =
        parse_projection(&total, &base, &read(&inputs.map)?).with_context(|| format!("in {}", inputs.map.display()))?;
    Ok(LoadedCover { total: Arc::new(total), base: Arc::new(base), projection })
}

/// A failed check as a verdict-false outcome.
fn refuted(c: &LoadedCover, level: usize) -> Result<Option<Outcome>> {
    let check = is_l_covering(&c.total, &c.base, &c.projection, level)?;
    if check.holds {
        return Ok(None);
    }
    let mut o = Outcome::new(&check)?;
    o.verdict = false;
    Ok(Some(o))
}

fn run_cover(cmd: &CoverCommand) -> Result<Outcome> {
    match cmd {
        CoverCommand::Check { inputs } => {
            let c = load_cover(inputs)?;
            let check = is_l_covering(&c.total, &c.base, &c.projection, inputs.level)?;
            let verdict = check.holds;
            let mut o = Outcome::new(check)?;
            o.verdict = verdict;
            Ok(o)
        }
        CoverCommand::Build { base, action, level } => {
            check_level(*level, MAX_LEVEL)?;
            let x = Arc::new(load(base)?);
            let action = FiberAction::parse(&x, &read(action)?).with_context(|| format!("in {}", action.display()))?;
            let p = build_cover(&x, *level, &action)?;
            let text = p.total().to_string();
            Ok(Outcome::new(p.to_json())?.with_text(text))
        }
        CoverCommand::Deck { inputs } => {
            let c = load_cover(inputs)?;
            if let Some(o) = refuted(&c, inputs.level)? {
                return Ok(o);
            }
            let p = CoverMorphism::new(c.total.clone(), c.base.clone(), c.projection.clone(), inputs.level)?;
            let deck = deck_group(&p, inputs.level)?;
            let elements: Vec<BTreeMap<&str, &str>> = deck
                .elements
                .iter()
                .map(|phi| phi.iter().enumerate().map(|(v, &w)| (c.total.name(v), c.total.name(w))).collect())
                .collect();
            Outcome::new(
                json!({ "level": inputs.level, "order": deck.order(), "elements": elements, "table": deck.table }),
            )
        }
        CoverCommand::Lift { inputs, path, start, anchor } => {
            let c = load_cover(inputs)?;
            if let Some(o) = refuted(&c, inputs.level)? {
                return Ok(o);
            }
            let p = CoverMorphism::new(c.total.clone(), c.base.clone(), c.projection.clone(), inputs.level)?;
            let walk = path.split_whitespace().map(|v| c.base.vertex(v)).collect::<Result<Vec<_>, _>>()?;
            let lift = lift_path(&p, &walk, *anchor, c.total.vertex(start)?)?;
            let names = |d: &Digraph, vs: &[usize]| vs.iter().map(|&v| d.name(v).to_string()).collect::<Vec<_>>();
            Outcome::new(json!({
                "level": inputs.level,
                "base_path": names(&c.base, &walk),
                "lift": names(&c.total, &lift),
            }))
        }
    }
}

fn parse_group(args: &GroupArgs) -> Result<(FGAbelian, GenSet<FGAbelian>)> {
    let group: FGAbelian = args.group.parse()?;
    let gens = GenSet::parse(&group, &args.gens)?;
    Ok((group, gens))
}

fn describe(group: &FGAbelian, gens: &GenSet<FGAbelian>) -> Value {
    json!({ "group": group.to_string(), "gens": gens.format(group) })
}

fn ball_or_finite(group: &FGAbelian, gens: &GenSet<FGAbelian>, radius: Option<usize>) -> Result<Digraph> {
    match radius {
        Some(r) => Ok(cayley_ball(group, gens, r)?.digraph),
        None if group.is_finite() => Ok(cayley_finite(group, gens)?),
        None => bail!("{group} is infinite; pass --radius"),
    }
}

fn run_cayley(cmd: &CayleyCommand) -> Result<Outcome> {
    match cmd {
        CayleyCommand::Build { group, radius } => {
            let (g, s) = parse_group(group)?;
            let x = ball_or_finite(&g, &s, *radius)?;
            let text = x.to_string();
            let mut report = describe(&g, &s);
            report["radius"] = json!(radius);
            report["digraph"] = serde_json::to_value(&x)?;
            Ok(Outcome::new(report)?.with_text(text))
        }
        CayleyCommand::Ph { group, ring, max_degree, radius } => {
            check_degree(*max_degree)?;
            let (g, s) = parse_group(group)?;
            let mut report = describe(&g, &s);
            report["hypotheses"] = serde_json::to_value(check_theorem_abelian_hypotheses(&g, &s))?;
            match radius {
                Some(r) => {
                    let x = ball_or_finite(&g, &s, Some(*r))?;
                    let h = ph(&x, &[ring.ring], *max_degree)?;
                    let ranks = match ring.ring.field() {
                        Some(f) => h.ranks_over(f).expect("requested"),
                        None => h.free_ranks(),
                    };
                    report["radius"] = json!(r);
                    report["ring"] = json!(ring.ring);
                    report["ranks"] = json!(ranks);
                    report["homology"] = serde_json::to_value(&h)?;
                }
                None => {
                    let res = abelian_ph(&g, &s, field_of(ring.ring, "cayley ph without --radius")?, *max_degree)?;
                    report["ring"] = json!(res.field);
                    report["rho_rank"] = json!(res.rho_rank);
                    report["ranks"] = json!(res.ranks);
                }
            }
            Outcome::new(report)
        }
        CayleyCommand::Relations { group, level } => {
            check_level(*level, MAX_RELATION_LEVEL)?;
            let (g, s) = parse_group(group)?;
            let rels = w_l_relations(&g, &s, *level)?;
            let rows: Vec<Value> =
                rels.iter().map(|r| json!({ "left": r.left, "right": r.right, "text": r.format(&g, &s) })).collect();
            let mut report = describe(&g, &s);
            report["level"] = json!(level);
            report["relations"] = Value::Array(rows);
            Outcome::new(report)
        }
        CayleyCommand::Presentation { group, level } => {
            check_level(*level, MAX_LEVEL)?;
            let (g, s) = parse_group(group)?;
            let f = f_l_presentation(&g, &s, *level)?;
            let text = format!("{}\n", f.presentation);
            let mut report = describe(&g, &s);
            report["level"] = json!(f.level);
            report["presentation"] = serde_json::to_value(&f.presentation)?;
            report["abelianization"] = serde_json::to_value(&f.abelianization)?;
            report["abelianization_finite"] = json!(f.abelianization_finite);
            report["rho_kernel"] = serde_json::to_value(rho_kernel(&g, &s)?)?;
            report["text"] = json!(f.presentation.to_string());
            Ok(Outcome::new(report)?.with_text(text))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_are_enforced() {
        assert!(check_degree(6).is_ok());
        assert!(check_degree(7).is_err());
        assert!(check_level(4, MAX_LEVEL).is_err());
        assert!(check_level(4, MAX_RELATION_LEVEL).is_ok());
    }

    #[test]
    fn integer_ring_is_not_a_field() {
        assert!(field_of(Ring::Z, "x").is_err());
        assert_eq!(field_of(Ring::Fp(5), "x").unwrap(), FieldKind::Fp(5));
    }
}

//! Unbending: the desingularization step that removes the minimal part.
//!
//! Over a minimal stratum the tube's conic fiber `c(L)` is replaced by
//! `L x R`; away from the minimal part the space is doubled into two signed
//! copies; the amalgamated sum glues the copies along the tube halves. At
//! stratum granularity a copy, its mirror and the tube-fiber strata crossing
//! `t = 0` merge into one stratum of the result, which therefore is exactly
//! one length shorter.
//!
//! Morphisms lift through unbendings: even extensions in the base and link
//! coordinates, an odd (or zero) extension in the radial one, and a sign
//! convention choosing how the two copies map.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diag::{Report, Violation};
use crate::expr::Expr;
use crate::id::{ChartId, Sign, StratumId, Token};
use crate::morphism::{
    points_agree, BasicModel, BasicModelMorphism, ModelPoint, RadialKind, StratMorphism,
};
use crate::poset::{StratPoset, Stratum};
use crate::samples::{close_with, link_samples, GridSpec, LinkSample, LINK_SAMPLES, TOL};
use crate::space::PresentedSpace;
use crate::tube::{ChartRecord, TMStructure, Tube};
use crate::validate::validate_pseudomanifold;

/// How a stratum of the unbent space lies over a stratum of the original.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProvTag {
    /// One of the two signed copies of a non-minimal stratum.
    Copy(Sign),
    /// The tube-fiber stratum of a minimal stratum, over the given link
    /// stratum.
    Fiber(StratumId),
    /// Identity unbending of a 0-length space.
    Iso,
}

/// One unbendable chart: the map `(u, l, t) -> (u, [l, |t|])` of a minimal
/// stratum's bundle chart, plus the fiber strata it lands in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnbendChartSquare {
    pub base: StratumId,
    pub chart: ChartId,
    pub c_hat: BasicModelMorphism,
    /// Link stratum of the base's link -> stratum of the unbent space.
    pub fiber_classes: BTreeMap<StratumId, StratumId>,
}

/// The record of an unbending (or composite unfolding) projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesingMap {
    pub source: PresentedSpace,
    pub target: PresentedSpace,
    /// Source stratum -> the (target stratum, tag) pairs it lies over.
    pub provenance: BTreeMap<StratumId, BTreeSet<(StratumId, ProvTag)>>,
    /// Canonical projection of designated samples, through the positive
    /// copy.
    pub sample_map: BTreeMap<LinkSample, LinkSample>,
    pub chart_squares: Vec<UnbendChartSquare>,
}

impl DesingMap {
    pub fn identity(space: &PresentedSpace) -> DesingMap {
        DesingMap {
            source: space.clone(),
            target: space.clone(),
            provenance: space
                .poset
                .ids()
                .map(|s| (s.clone(), BTreeSet::from([(s.clone(), ProvTag::Iso)])))
                .collect(),
            sample_map: link_samples(space.poset.ids())
                .into_iter()
                .map(|l| (l.clone(), l))
                .collect(),
            chart_squares: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.provenance
            .values()
            .flatten()
            .all(|(_, tag)| *tag == ProvTag::Iso)
    }

    /// The unique copy target of a source stratum, when it has copy tags.
    pub fn copy_target(&self, class: &StratumId) -> Option<StratumId> {
        let targets: BTreeSet<&StratumId> = self
            .provenance
            .get(class)?
            .iter()
            .filter(|(_, tag)| matches!(tag, ProvTag::Copy(_)))
            .map(|(w, _)| w)
            .collect();
        if targets.len() == 1 {
            targets.into_iter().next().cloned()
        } else {
            None
        }
    }

    pub fn class_of_copy(&self, w: &StratumId, sign: Sign) -> Option<StratumId> {
        self.provenance
            .iter()
            .find(|(_, pieces)| {
                pieces
                    .iter()
                    .any(|(t, tag)| t == w && *tag == ProvTag::Copy(sign))
            })
            .map(|(c, _)| c.clone())
    }

    pub fn class_of_fiber(&self, s: &StratumId, r: &StratumId) -> Option<StratumId> {
        self.provenance
            .iter()
            .find(|(_, pieces)| {
                pieces
                    .iter()
                    .any(|(t, tag)| t == s && matches!(tag, ProvTag::Fiber(r2) if r2 == r))
            })
            .map(|(c, _)| c.clone())
    }

    pub fn class_of_iso(&self, s: &StratumId) -> Option<StratumId> {
        self.provenance
            .iter()
            .find(|(_, pieces)| pieces.iter().any(|(t, tag)| t == s && *tag == ProvTag::Iso))
            .map(|(c, _)| c.clone())
    }

    /// Projects a designated sample of the source to the target.
    pub fn project_sample(&self, sample: &LinkSample) -> Option<LinkSample> {
        self.sample_map.get(sample).cloned()
    }
}

/// The radium of an unbent tube is signed: its absolute value projects to
/// the radium downstairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiumLift {
    Signed,
}

/// One of the two halves `T^+`, `T^-` of an unbent tube, with the strata of
/// the doubled complement it glues into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfBundle {
    pub sign: Sign,
    /// Link stratum -> the ambient stratum whose signed copy absorbs this
    /// part of the half.
    pub gluing: BTreeMap<StratumId, StratumId>,
}

/// A tube after unbending: same base, charts and cocycles, fiber `L x R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnbentTube {
    pub base: StratumId,
    pub fiber_link: PresentedSpace,
    pub charts: Vec<ChartRecord>,
    pub group: crate::group::CocycleGroup,
    pub transitions: BTreeMap<(ChartId, ChartId), usize>,
    pub radium_lift: RadiumLift,
    pub halves: [HalfBundle; 2],
}

impl UnbentTube {
    /// Length of the unbent tube's total space: one less than the tube's.
    pub fn length(&self) -> u32 {
        self.fiber_link.length()
    }

    /// Strata of the unbent tube: one per link stratum, each of the link
    /// stratum's length.
    pub fn fiber_strata(&self) -> BTreeMap<StratumId, u32> {
        self.fiber_link
            .poset
            .ids()
            .map(|r| (r.clone(), self.fiber_link.poset.height_above(r)))
            .collect()
    }
}

/// Result of unbending a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnbendResult {
    pub desing: DesingMap,
    pub unbent_tubes: Vec<UnbentTube>,
}

impl UnbendResult {
    pub fn space(&self) -> &PresentedSpace {
        &self.desing.source
    }

    pub fn target(&self) -> &PresentedSpace {
        &self.desing.target
    }
}

/// Processing order of the minimal strata. `Canonical` derives stratum ids
/// from their provenance; `Reversed` processes in the opposite order and
/// numbers the classes opaquely, so that uniqueness up to isomorphism is a
/// real check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessingOrder {
    Canonical,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnbendError {
    #[error("input space or structure is invalid: {0}")]
    InvalidInput(String),
    #[error("tubes over the minimal strata are not in one disjoint family")]
    TubesNotSeparated,
    #[error("radial coordinate does not vanish on the vertex: {0}")]
    VertexObstruction(String),
    #[error("morphism does not lift: {0}")]
    NotLiftable(String),
    #[error(transparent)]
    Morph(#[from] crate::morphism::MorphError),
}

/// Unbends one tube: same base, charts and transitions; the fiber `c(L)`
/// becomes `L x R` with a signed radium, split into two glued halves.
pub fn unbend_tube(tube: &Tube) -> UnbentTube {
    let gluing = tube.footprint_map.clone();
    UnbentTube {
        base: tube.base.clone(),
        fiber_link: tube.link.clone(),
        charts: tube.charts.clone(),
        group: tube.group.clone(),
        transitions: tube.transitions.clone(),
        radium_lift: RadiumLift::Signed,
        halves: [
            HalfBundle {
                sign: Sign::Plus,
                gluing: gluing.clone(),
            },
            HalfBundle {
                sign: Sign::Minus,
                gluing,
            },
        ],
    }
}

/// The unbendable chart map `(u, l, t) -> (u, [l, |t|])`.
pub fn unbend_chart(base_dim: u32, link: &PresentedSpace) -> BasicModelMorphism {
    BasicModelMorphism {
        domain: BasicModel::line(base_dim, link.clone()),
        codomain: BasicModel::cone(base_dim, link.clone()),
        a1: Expr::identity_base(base_dim),
        a2: Expr::L,
        a3: Expr::abs(Expr::T),
        actions: BTreeMap::new(),
    }
}

/// A piece of the amalgamated sum before merging.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Piece {
    Copy(StratumId, Sign),
    Fiber(StratumId, StratumId),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn piece_leq(
    space: &PresentedSpace,
    links: &BTreeMap<StratumId, PresentedSpace>,
    a: &Piece,
    b: &Piece,
) -> bool {
    match (a, b) {
        (Piece::Copy(w, s), Piece::Copy(w2, s2)) => s == s2 && space.poset.leq(w, w2),
        (Piece::Fiber(s, r), Piece::Fiber(s2, r2)) => {
            s == s2 && links.get(s).map(|l| l.poset.leq(r, r2)).unwrap_or(false)
        }
        _ => false,
    }
}

/// Unbends a whole Thom-Mather space by the amalgamated sum over its
/// separated minimal tubes. A 0-length space unbends identically.
pub fn unbend_space(
    space: &PresentedSpace,
    tm: &TMStructure,
    order: ProcessingOrder,
) -> Result<UnbendResult, UnbendError> {
    let pm_report = validate_pseudomanifold(space);
    if !pm_report.is_clean() {
        return Err(UnbendError::InvalidInput(format!(
            "pseudomanifold axioms: {}",
            pm_report.violations[0]
        )));
    }
    let tm_report = crate::tube::validate_tm(space, tm);
    if !tm_report.is_clean() {
        return Err(UnbendError::InvalidInput(format!(
            "tube structure: {}",
            tm_report.violations[0]
        )));
    }

    if space.length() == 0 {
        return Ok(UnbendResult {
            desing: DesingMap::identity(space),
            unbent_tubes: Vec::new(),
        });
    }

    let min = space.min_strata();
    if min.len() > 1 {
        let families: BTreeSet<Option<&u32>> = min.iter().map(|s| tm.families.get(s)).collect();
        if families.len() != 1 || families.contains(&None) {
            return Err(UnbendError::TubesNotSeparated);
        }
    }

    // the pieces of the amalgam
    let mut pieces: Vec<Piece> = Vec::new();
    for w in space.poset.ids() {
        if !min.contains(w) {
            pieces.push(Piece::Copy(w.clone(), Sign::Plus));
            pieces.push(Piece::Copy(w.clone(), Sign::Minus));
        }
    }
    let mut min_order: Vec<StratumId> = min.iter().cloned().collect();
    if order == ProcessingOrder::Reversed {
        min_order.reverse();
    }
    for s in &min_order {
        let tube = tm
            .tubes
            .get(s)
            .ok_or_else(|| UnbendError::InvalidInput(format!("{s} has no tube")))?;
        let mut link_ids: Vec<StratumId> = tube.link.poset.ids().cloned().collect();
        if order == ProcessingOrder::Reversed {
            link_ids.reverse();
        }
        for r in link_ids {
            pieces.push(Piece::Fiber(s.clone(), r.clone()));
        }
    }
    if order == ProcessingOrder::Canonical {
        pieces.sort();
    }
    let index: BTreeMap<Piece, usize> = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();

    // glue each tube-fiber stratum into both signed copies of the stratum
    // its half-bundles include into
    let mut uf = UnionFind::new(pieces.len());
    for s in &min_order {
        let tube = &tm.tubes[s];
        for (r, w) in &tube.footprint_map {
            let f = index[&Piece::Fiber(s.clone(), r.clone())];
            uf.union(f, index[&Piece::Copy(w.clone(), Sign::Plus)]);
            uf.union(f, index[&Piece::Copy(w.clone(), Sign::Minus)]);
        }
    }

    // collect classes in deterministic processing order
    let mut class_members: BTreeMap<usize, Vec<Piece>> = BTreeMap::new();
    for (i, piece) in pieces.iter().enumerate() {
        let root = uf.find(i);
        class_members.entry(root).or_default().push(piece.clone());
    }
    let mut roots: Vec<usize> = class_members.keys().copied().collect();
    if order == ProcessingOrder::Reversed {
        roots.reverse();
    }

    let mut class_ids: BTreeMap<usize, StratumId> = BTreeMap::new();
    let mut strata: Vec<Stratum> = Vec::new();
    let mut provenance: BTreeMap<StratumId, BTreeSet<(StratumId, ProvTag)>> = BTreeMap::new();
    for (k, root) in roots.iter().enumerate() {
        let members = &class_members[root];
        let copy_w: BTreeSet<&StratumId> = members
            .iter()
            .filter_map(|p| match p {
                Piece::Copy(w, _) => Some(w),
                _ => None,
            })
            .collect();
        let has_fiber = members.iter().any(|p| matches!(p, Piece::Fiber(..)));
        let (id, dim, label) = match order {
            ProcessingOrder::Reversed => {
                let dim = class_dim(space, tm, members);
                (
                    StratumId(vec![Token::Anon(k as u32)]),
                    dim,
                    format!("class{k}"),
                )
            }
            ProcessingOrder::Canonical => {
                if let Some(w) = copy_w.iter().next() {
                    let st = space.poset.stratum(w).unwrap();
                    if has_fiber {
                        ((*w).prefixed(Token::Unbent), st.dim, format!("{}^", st.label))
                    } else {
                        match members.first().unwrap() {
                            Piece::Copy(_, Sign::Plus) => (
                                (*w).prefixed(Token::CopyPlus),
                                st.dim,
                                format!("{}+", st.label),
                            ),
                            _ => (
                                (*w).prefixed(Token::CopyMinus),
                                st.dim,
                                format!("{}-", st.label),
                            ),
                        }
                    }
                } else {
                    // orphan tube-fiber stratum
                    let Piece::Fiber(s, r) = members.first().unwrap() else {
                        unreachable!()
                    };
                    (
                        StratumId::fiber(s, r),
                        class_dim(space, tm, members),
                        format!("fiber({s};{r})"),
                    )
                }
            }
        };
        class_ids.insert(*root, id.clone());
        strata.push(Stratum {
            id: id.clone(),
            dim,
            label,
        });
        let tags: BTreeSet<(StratumId, ProvTag)> = members
            .iter()
            .map(|p| match p {
                Piece::Copy(w, sign) => (w.clone(), ProvTag::Copy(*sign)),
                Piece::Fiber(s, r) => (s.clone(), ProvTag::Fiber(r.clone())),
            })
            .collect();
        provenance.insert(id, tags);
    }

    // order: generated by the piece order between members of the classes
    let mut pairs: Vec<(StratumId, StratumId)> = Vec::new();
    for root_a in &roots {
        for root_b in &roots {
            if root_a == root_b {
                continue;
            }
            let below = class_members[root_a].iter().any(|pa| {
                class_members[root_b]
                    .iter()
                    .any(|pb| piece_leq(space, &space.links, pa, pb))
            });
            if below {
                pairs.push((class_ids[root_a].clone(), class_ids[root_b].clone()));
            }
        }
    }
    let poset = StratPoset::from_pairs(strata, &pairs)
        .map_err(|e| UnbendError::InvalidInput(e.to_string()))?;

    // links carry over through the copy targets and the fiber structure
    let maxima = poset.maxima();
    let mut links: BTreeMap<StratumId, PresentedSpace> = BTreeMap::new();
    for root in &roots {
        let id = &class_ids[root];
        if maxima.contains(id) {
            continue;
        }
        let members = &class_members[root];
        let link = members.iter().find_map(|p| match p {
            Piece::Copy(w, _) => space.links.get(w).cloned(),
            Piece::Fiber(s, r) => space.links.get(s).and_then(|l| l.links.get(r).cloned()),
        });
        if let Some(link) = link {
            links.insert(id.clone(), link);
        }
    }

    let dim = poset.strata().map(|s| s.dim).max().unwrap_or(0);
    let unbent = PresentedSpace {
        poset,
        links,
        tubes: BTreeMap::new(),
        compact: false,
        dim,
    };

    // sample projection through the positive copy
    let mut sample_map = BTreeMap::new();
    for root in &roots {
        let id = &class_ids[root];
        let members = &class_members[root];
        let target = members
            .iter()
            .find_map(|p| match p {
                Piece::Copy(w, _) => Some(w.clone()),
                _ => None,
            })
            .unwrap_or_else(|| match members.first().unwrap() {
                Piece::Fiber(s, _) => s.clone(),
                _ => unreachable!(),
            });
        for i in 0..LINK_SAMPLES {
            sample_map.insert(
                LinkSample::new(id.clone(), i),
                LinkSample::new(target.clone(), i),
            );
        }
    }

    // one unbendable chart square per minimal stratum and bundle chart
    let mut chart_squares = Vec::new();
    let mut unbent_tubes = Vec::new();
    for s in &min_order {
        let tube = &tm.tubes[s];
        unbent_tubes.push(unbend_tube(tube));
        let base_dim = space.poset.stratum(s).map(|x| x.dim).unwrap_or(0);
        let fiber_classes: BTreeMap<StratumId, StratumId> = tube
            .link
            .poset
            .ids()
            .map(|r| {
                let piece = Piece::Fiber(s.clone(), r.clone());
                let root = uf.find(index[&piece]);
                (r.clone(), class_ids[&root].clone())
            })
            .collect();
        for chart in &tube.charts {
            chart_squares.push(UnbendChartSquare {
                base: s.clone(),
                chart: chart.chart_id.clone(),
                c_hat: unbend_chart(base_dim, &tube.link),
                fiber_classes: fiber_classes.clone(),
            });
        }
    }

    Ok(UnbendResult {
        desing: DesingMap {
            source: unbent,
            target: space.clone(),
            provenance,
            sample_map,
            chart_squares,
        },
        unbent_tubes,
    })
}

fn class_dim(space: &PresentedSpace, tm: &TMStructure, members: &[Piece]) -> u32 {
    members
        .iter()
        .map(|p| match p {
            Piece::Copy(w, _) => space.poset.stratum(w).map(|s| s.dim).unwrap_or(0),
            Piece::Fiber(s, r) => {
                let base = space.poset.stratum(s).map(|x| x.dim).unwrap_or(0);
                let link = tm.tubes[s]
                    .link
                    .poset
                    .stratum(r)
                    .map(|x| x.dim)
                    .unwrap_or(0);
                base + link + 1
            }
        })
        .max()
        .unwrap_or(0)
}

/// The Thom-Mather structure the unbending induces: each non-minimal
/// singular stratum keeps its link and cocycle group, with the footprint
/// transported through the provenance. Families are left for separation.
pub fn induced_tm_on_unbent(
    space: &PresentedSpace,
    tm: &TMStructure,
    result: &UnbendResult,
) -> TMStructure {
    let unbent = result.space();
    let desing = &result.desing;
    let mut tubes = BTreeMap::new();
    let maxima = unbent.poset.maxima();
    for class in unbent.poset.ids() {
        if maxima.contains(class) {
            continue;
        }
        let pieces = &desing.provenance[class];
        // the sign of a doubled copy, to pick matching copies upstairs
        let sign = pieces.iter().find_map(|(_, tag)| match tag {
            ProvTag::Copy(s) => Some(*s),
            _ => None,
        });
        if let Some(w) = desing.copy_target(class) {
            let Some(tube) = tm.tubes.get(&w) else { continue };
            let mut footprint_map = BTreeMap::new();
            let mut ok = true;
            for (r, v) in &tube.footprint_map {
                let target = desing
                    .class_of_copy(v, sign.unwrap_or(Sign::Plus))
                    .or_else(|| desing.class_of_copy(v, Sign::Plus));
                match target {
                    Some(t) => {
                        footprint_map.insert(r.clone(), t);
                    }
                    None => ok = false,
                }
            }
            if ok {
                tubes.insert(
                    class.clone(),
                    Tube {
                        base: class.clone(),
                        link: tube.link.clone(),
                        charts: tube
                            .charts
                            .iter()
                            .map(|c| ChartRecord {
                                chart_id: c.chart_id.clone(),
                                base_stratum: class.clone(),
                                kind: c.kind,
                            })
                            .collect(),
                        group: tube.group.clone(),
                        transitions: tube.transitions.clone(),
                        footprint_map,
                        family: None,
                    },
                );
            }
        } else {
            // orphan fiber stratum: lift the link's own tube
            let Some((s, r)) = pieces.iter().find_map(|(s, tag)| match tag {
                ProvTag::Fiber(r) => Some((s.clone(), r.clone())),
                _ => None,
            }) else {
                continue;
            };
            let Some(link_tube) = space.links.get(&s).and_then(|l| l.tubes.get(&r)) else {
                continue;
            };
            let mut footprint_map = BTreeMap::new();
            let mut ok = true;
            for (r2, w2) in &link_tube.footprint_map {
                match desing.class_of_fiber(&s, w2) {
                    Some(t) => {
                        footprint_map.insert(r2.clone(), t);
                    }
                    None => ok = false,
                }
            }
            if ok {
                tubes.insert(
                    class.clone(),
                    Tube {
                        base: class.clone(),
                        link: link_tube.link.clone(),
                        charts: link_tube
                            .charts
                            .iter()
                            .map(|c| ChartRecord {
                                chart_id: c.chart_id.clone(),
                                base_stratum: class.clone(),
                                kind: c.kind,
                            })
                            .collect(),
                        group: link_tube.group.clone(),
                        transitions: link_tube.transitions.clone(),
                        footprint_map,
                        family: None,
                    },
                );
            }
        }
    }
    TMStructure {
        tubes,
        nesting: BTreeSet::new(),
        families: BTreeMap::new(),
    }
}

/// Installs a structure's tubes into a space, for iteration.
pub fn space_with_tubes(space: &PresentedSpace, tm: &TMStructure) -> PresentedSpace {
    PresentedSpace {
        tubes: tm.tubes.clone(),
        ..space.clone()
    }
}

/// Verifies the double-cover structure of an unbending: over every stratum
/// outside the minimal part the provenance tags are exactly the two signs,
/// and the preimages of each minimal stratum biject with its link's strata.
pub fn check_double_cover(result: &UnbendResult) -> Report {
    let mut report = Report::new();
    let desing = &result.desing;
    if desing.is_identity() {
        return report;
    }
    let target = result.target();
    let min = target.min_strata();
    for w in target.poset.ids() {
        if min.contains(w) {
            let link_strata: BTreeSet<StratumId> = target
                .links
                .get(w)
                .map(|l| l.poset.ids().cloned().collect())
                .unwrap_or_default();
            let mut fiber_tags: Vec<StratumId> = Vec::new();
            for pieces in desing.provenance.values() {
                for (t, tag) in pieces {
                    if t == w {
                        match tag {
                            ProvTag::Fiber(r) => fiber_tags.push(r.clone()),
                            _ => report.push(Violation::FiberPreimageBroken {
                                stratum: w.clone(),
                                detail: "minimal stratum has a non-fiber preimage".into(),
                            }),
                        }
                    }
                }
            }
            fiber_tags.sort();
            let expected: Vec<StratumId> = link_strata.into_iter().collect();
            if fiber_tags != expected {
                report.push(Violation::FiberPreimageBroken {
                    stratum: w.clone(),
                    detail: format!("fiber tags {fiber_tags:?} do not biject with the link strata"),
                });
            }
        } else {
            let mut signs: BTreeSet<Sign> = BTreeSet::new();
            let mut extra = false;
            for pieces in desing.provenance.values() {
                for (t, tag) in pieces {
                    if t == w {
                        match tag {
                            ProvTag::Copy(s) => {
                                if !signs.insert(*s) {
                                    extra = true;
                                }
                            }
                            _ => extra = true,
                        }
                    }
                }
            }
            if signs != BTreeSet::from([Sign::Plus, Sign::Minus]) || extra {
                report.push(Violation::ProvenanceTagsBroken {
                    stratum: w.clone(),
                    detail: format!("copy tags over the stratum are {signs:?}"),
                });
            }
        }
    }
    report
}

/// Verifies that the unbending projection is a Thom-Mather morphism: it
/// preserves tubes at footprint granularity and satisfies the radium law
/// `|signed radium| = radium after projection` on the whole chart grid.
pub fn check_unbending_is_tm(
    space: &PresentedSpace,
    tm: &TMStructure,
    result: &UnbendResult,
    induced: &TMStructure,
    grid: &GridSpec,
) -> Report {
    let _ = space;
    let mut report = Report::new();
    let desing = &result.desing;
    if desing.is_identity() {
        return report;
    }

    // radium law and evenness, exact: both sides are the same |t|
    for square in &desing.chart_squares {
        for point in square.c_hat.domain.grid_points(grid) {
            match square.c_hat.eval(&point) {
                Ok(out) => {
                    if out.radial != point.radial.abs() {
                        report.push(Violation::RadiumRelationBroken {
                            stratum: square.base.clone(),
                            detail: format!(
                                "|t| = {} projects to radium {}",
                                point.radial.abs(),
                                out.radial
                            ),
                        });
                    }
                    let mirrored = ModelPoint {
                        radial: -point.radial,
                        ..point.clone()
                    };
                    match square.c_hat.eval(&mirrored) {
                        Ok(out2) => {
                            if !points_agree(RadialKind::Cone, &out, &out2, 0.0) {
                                report.push(Violation::SquareNotCommuting {
                                    context: format!("unbendable chart at {}", square.base),
                                    detail: "the chart map is not even in t".into(),
                                });
                            }
                        }
                        Err(e) => report.push(Violation::SquareNotCommuting {
                            context: format!("unbendable chart at {}", square.base),
                            detail: e.to_string(),
                        }),
                    }
                }
                Err(e) => report.push(Violation::RadiumRelationBroken {
                    stratum: square.base.clone(),
                    detail: e.to_string(),
                }),
            }
        }
        // the fiber strata must actually lie over the footprint
        if let Some(tube) = tm.tubes.get(&square.base) {
            for (r, class) in &square.fiber_classes {
                let Some(w) = tube.footprint_map.get(r) else { continue };
                let pieces = match desing.provenance.get(class) {
                    Some(p) => p,
                    None => continue,
                };
                for sign in [Sign::Plus, Sign::Minus] {
                    if !pieces.contains(&(w.clone(), ProvTag::Copy(sign))) {
                        report.push(Violation::TubeNotPreserved {
                            stratum: square.base.clone(),
                            detail: format!(
                                "fiber stratum over {r} is not glued to the {sign} copy of {w}"
                            ),
                        });
                    }
                }
            }
        }
    }

    // tube preservation for the induced tubes
    for (class, tube_hat) in &induced.tubes {
        let Some(w) = desing.copy_target(class) else { continue };
        let Some(tube) = tm.tubes.get(&w) else {
            report.push(Violation::TubeNotPreserved {
                stratum: class.clone(),
                detail: format!("projected base {w} has no tube"),
            });
            continue;
        };
        let target_footprint = tube.footprint();
        for v_hat in tube_hat.footprint() {
            if &v_hat == class {
                continue;
            }
            let Some(pieces) = desing.provenance.get(&v_hat) else { continue };
            for (v, tag) in pieces {
                if matches!(tag, ProvTag::Copy(_)) && !target_footprint.contains(v) {
                    report.push(Violation::TubeNotPreserved {
                        stratum: class.clone(),
                        detail: format!(
                            "footprint stratum {v_hat} projects to {v} outside the tube of {w}"
                        ),
                    });
                }
            }
        }
    }
    report
}

/// The deck transformation exchanging the two copies over the regular part.
pub fn deck_swap(result: &UnbendResult) -> StratMorphism {
    let desing = &result.desing;
    let unbent = result.space();
    let mut stratum_map = BTreeMap::new();
    for class in unbent.poset.ids() {
        let swapped = desing
            .provenance
            .get(class)
            .and_then(|pieces| {
                pieces.iter().find_map(|(w, tag)| match tag {
                    ProvTag::Copy(sign) => desing.class_of_copy(w, sign.flip()),
                    _ => None,
                })
            })
            .unwrap_or_else(|| class.clone());
        stratum_map.insert(class.clone(), swapped);
    }
    let mut locals = BTreeMap::new();
    for square in &desing.chart_squares {
        let model = square.c_hat.domain.clone();
        locals.insert(
            (square.base.clone(), square.chart.clone(), square.chart.clone()),
            BasicModelMorphism {
                domain: model.clone(),
                codomain: model.clone(),
                a1: Expr::identity_base(model.base_dim),
                a2: Expr::L,
                a3: Expr::neg(Expr::T),
                actions: BTreeMap::new(),
            },
        );
        // carrier entry so that compositions find the square again
        stratum_map.insert(square.base.clone(), square.base.clone());
    }
    StratMorphism {
        stratum_map,
        locals,
        kinds: crate::morphism::MorphismKinds::isomorphism(),
        link_isos: BTreeMap::new(),
    }
}

/// Lifts one coordinate triple through the unbendable charts: even
/// extensions of the base and link coordinates, an odd extension of the
/// radial one (or the even zero extension when the radial map vanishes).
/// The report records the parity conditions verified on the grid.
pub fn lift_basic_morphism(
    f: &BasicModelMorphism,
    sign: Sign,
    grid: &GridSpec,
) -> Result<(BasicModelMorphism, Report), UnbendError> {
    // the radial map must vanish on the vertex
    let mut all_zero = true;
    for u in grid.u_grid(f.domain.base_dim) {
        for l in link_samples(f.domain.link.poset.ids()) {
            for r in grid.r_values() {
                let point = ModelPoint {
                    u: u.clone(),
                    link: l.clone(),
                    radial: r,
                };
                let out = f.eval(&point)?;
                if r == 0.0 && out.radial.abs() > TOL {
                    return Err(UnbendError::VertexObstruction(format!(
                        "a3(u, l, 0) = {} at u = {u:?}, l = {l:?}",
                        out.radial
                    )));
                }
                if out.radial.abs() > TOL {
                    all_zero = false;
                }
            }
        }
    }

    let abs_t = Expr::abs(Expr::T);
    let even = |e: &Expr| e.subst(&Expr::identity_base(f.domain.base_dim), &Expr::L, &abs_t);
    let a1 = f
        .a1
        .iter()
        .map(&even)
        .collect::<Result<Vec<_>, _>>()
        .map_err(crate::morphism::MorphError::from)?;
    let a2 = even(&f.a2).map_err(crate::morphism::MorphError::from)?;
    let a3 = if all_zero {
        even(&f.a3).map_err(crate::morphism::MorphError::from)?
    } else {
        let odd = Expr::mul(
            Expr::sgn(Expr::T),
            even(&f.a3).map_err(crate::morphism::MorphError::from)?,
        );
        match sign {
            Sign::Plus => odd,
            Sign::Minus => Expr::neg(odd),
        }
    };
    let lifted = BasicModelMorphism {
        domain: BasicModel::line(f.domain.base_dim, f.domain.link.clone()),
        codomain: BasicModel::line(f.codomain.base_dim, f.codomain.link.clone()),
        a1,
        a2,
        a3,
        actions: f.actions.clone(),
    };

    // parity report: (a) vanishing at t = 0, (b) evenness of the base and
    // link coordinates and parity of the radial one, (c) extension of f on
    // t >= 0
    let mut report = Report::new();
    for point in lifted.domain.grid_points(grid) {
        let out = lifted.eval(&point)?;
        let mirrored = lifted.eval(&ModelPoint {
            radial: -point.radial,
            ..point.clone()
        })?;
        if point.radial == 0.0 && out.radial.abs() > TOL {
            report.push(Violation::ParityBroken {
                which: "a3".into(),
                detail: format!("does not vanish at t = 0 over u = {:?}", point.u),
            });
        }
        if !out
            .u
            .iter()
            .zip(&mirrored.u)
            .all(|(x, y)| close_with(*x, *y, TOL))
        {
            report.push(Violation::ParityBroken {
                which: "a1".into(),
                detail: "not even in t".into(),
            });
        }
        if out.link != mirrored.link {
            report.push(Violation::ParityBroken {
                which: "a2".into(),
                detail: "not even in t".into(),
            });
        }
        let odd_ok = close_with(out.radial, -mirrored.radial, TOL);
        let even_ok = close_with(out.radial, mirrored.radial, TOL);
        if !(odd_ok || even_ok) {
            report.push(Violation::ParityBroken {
                which: "a3".into(),
                detail: "neither odd nor even in t".into(),
            });
        }
        if point.radial >= 0.0 {
            let downstairs = f.eval(&ModelPoint {
                u: point.u.clone(),
                link: point.link.clone(),
                radial: point.radial,
            })?;
            if !close_with(out.radial.abs(), downstairs.radial.abs(), TOL)
                || !out
                    .u
                    .iter()
                    .zip(&downstairs.u)
                    .all(|(x, y)| close_with(*x, *y, TOL))
                || out.link != downstairs.link
            {
                report.push(Violation::ParityBroken {
                    which: "extension".into(),
                    detail: format!("lift does not extend f at t = {}", point.radial),
                });
            }
        }
    }
    Ok((lifted, report))
}

/// Lifts a stratified morphism through two unbendings with the chosen sign
/// convention. The structural layer follows the provenance; the local layer
/// lifts each minimal-tube triple.
pub fn lift_morphism(
    f: &StratMorphism,
    sign: Sign,
    dom: &UnbendResult,
    cod: &UnbendResult,
    grid: &GridSpec,
) -> Result<StratMorphism, UnbendError> {
    let dom_target = dom.target();
    let cod_target = cod.target();
    let dom_min = dom_target.min_strata();
    let cod_min = cod_target.min_strata();

    let mut stratum_map: BTreeMap<StratumId, StratumId> = BTreeMap::new();
    for class in dom.space().poset.ids() {
        let pieces = &dom.desing.provenance[class];
        let mut image: Option<StratumId> = None;
        for (w, tag) in pieces {
            let fw = f
                .stratum_map
                .get(w)
                .ok_or_else(|| UnbendError::NotLiftable(format!("{w} has no image")))?;
            let target_class = match tag {
                ProvTag::Copy(sigma) => {
                    if cod_min.contains(fw) {
                        return Err(UnbendError::NotLiftable(format!(
                            "copy stratum {w} maps into the minimal part at {fw} without link data"
                        )));
                    }
                    let lifted_sign = sign.compose(*sigma);
                    cod.desing
                        .class_of_copy(fw, lifted_sign)
                        .or_else(|| cod.desing.class_of_iso(fw))
                        .ok_or_else(|| {
                            UnbendError::NotLiftable(format!("{fw} has no {lifted_sign} copy"))
                        })?
                }
                ProvTag::Iso => {
                    if cod_min.contains(fw) {
                        return Err(UnbendError::NotLiftable(format!(
                            "stratum {w} maps into the minimal part at {fw} without link data"
                        )));
                    }
                    cod.desing
                        .class_of_iso(fw)
                        .or_else(|| cod.desing.class_of_copy(fw, sign))
                        .ok_or_else(|| {
                            UnbendError::NotLiftable(format!("{fw} has no lifted class"))
                        })?
                }
                ProvTag::Fiber(r) => {
                    if cod_min.contains(fw) {
                        // the link stratum image, from the link action or a
                        // structurally equal link
                        let r_image = link_stratum_image(f, dom_target, cod_target, w, r, fw)?;
                        cod.desing.class_of_fiber(fw, &r_image).ok_or_else(|| {
                            UnbendError::NotLiftable(format!(
                                "no fiber stratum over {fw} at {r_image}"
                            ))
                        })?
                    } else if cod.desing.is_identity() {
                        cod.desing.class_of_iso(fw).ok_or_else(|| {
                            UnbendError::NotLiftable(format!("{fw} has no lifted class"))
                        })?
                    } else {
                        // the fiber crosses t = 0: both copies of the image
                        // must have merged
                        let plus = cod.desing.class_of_copy(fw, Sign::Plus);
                        let minus = cod.desing.class_of_copy(fw, Sign::Minus);
                        match (plus, minus) {
                            (Some(p), Some(m)) if p == m => p,
                            _ => {
                                return Err(UnbendError::NotLiftable(format!(
                                    "fiber stratum over {w} maps across the split copies of {fw}"
                                )))
                            }
                        }
                    }
                }
            };
            match &image {
                None => image = Some(target_class),
                Some(prev) if *prev == target_class => {}
                Some(prev) => {
                    return Err(UnbendError::NotLiftable(format!(
                        "stratum {class} splits between {prev} and {target_class}"
                    )))
                }
            }
        }
        stratum_map.insert(
            class.clone(),
            image.ok_or_else(|| UnbendError::NotLiftable(format!("{class} has no pieces")))?,
        );
    }

    // local layer: lift the minimal-tube triples and carry the others over
    let mut locals = BTreeMap::new();
    for ((s, cd, cc), local) in &f.locals {
        if dom_min.contains(s) {
            let (lifted, parity) = lift_basic_morphism(local, sign, grid)?;
            if !parity.is_clean() {
                return Err(UnbendError::NotLiftable(format!(
                    "parity conditions fail at {s}: {}",
                    parity.violations[0]
                )));
            }
            locals.insert((s.clone(), cd.clone(), cc.clone()), lifted);
            let fs = f.stratum_map[s].clone();
            stratum_map.insert(s.clone(), fs);
        } else if dom_target.poset.contains(s) {
            // conic locals on non-minimal tubes carry over to the classes
            for sigma in [Sign::Plus, Sign::Minus] {
                if let Some(class) = dom.desing.class_of_copy(s, sigma) {
                    locals
                        .entry((class, cd.clone(), cc.clone()))
                        .or_insert_with(|| local.clone());
                }
            }
        }
        // locals keyed by strata of neither the domain nor its target are
        // stale carriers from an earlier step and are dropped
    }

    Ok(StratMorphism {
        stratum_map,
        locals,
        kinds: f.kinds,
        link_isos: BTreeMap::new(),
    })
}

fn link_stratum_image(
    f: &StratMorphism,
    dom_target: &PresentedSpace,
    cod_target: &PresentedSpace,
    s: &StratumId,
    r: &StratumId,
    fs: &StratumId,
) -> Result<StratumId, UnbendError> {
    if let Some(h) = f.link_isos.get(s) {
        if let Some(img) = h.map_stratum(r) {
            return Ok(img.clone());
        }
    }
    // evaluate the link coordinate of a local of s on samples of r
    for ((ls, _, _), local) in &f.locals {
        if ls != s {
            continue;
        }
        let mut image: Option<StratumId> = None;
        let mut consistent = true;
        for i in 0..LINK_SAMPLES {
            let point = ModelPoint {
                u: vec![0.0; local.domain.base_dim as usize],
                link: LinkSample::new(r.clone(), i),
                radial: 0.25,
            };
            if let Ok(out) = local.eval(&point) {
                match &image {
                    None => image = Some(out.link.stratum),
                    Some(prev) => {
                        if *prev != out.link.stratum {
                            consistent = false;
                        }
                    }
                }
            }
        }
        if let (Some(img), true) = (image, consistent) {
            return Ok(img);
        }
    }
    // structurally equal links lift identically
    let (dl, cl) = (dom_target.links.get(s), cod_target.links.get(fs));
    if dl.is_some() && dl.map(|l| &l.poset) == cl.map(|l| &l.poset) {
        return Ok(r.clone());
    }
    Err(UnbendError::NotLiftable(format!(
        "no link data to lift the fiber stratum {r} of {s}"
    )))
}

/// Verifies the lifted-morphism squares: `f` after the projection agrees
/// with the projection after the lift, on every chart grid point, through
/// the unbendable charts of both sides.
pub fn check_lift_squares(
    f: &StratMorphism,
    f_hat: &StratMorphism,
    dom: &UnbendResult,
    cod: &UnbendResult,
    grid: &GridSpec,
    tol: f64,
) -> Report {
    let mut report = Report::new();
    for dom_square in &dom.desing.chart_squares {
        let s = &dom_square.base;
        let Some(fs) = f.stratum_map.get(s) else { continue };
        for ((ls, cd, cc), local) in &f.locals {
            if ls != s || cd != &dom_square.chart {
                continue;
            }
            let Some(cod_square) = cod
                .desing
                .chart_squares
                .iter()
                .find(|sq| &sq.base == fs && &sq.chart == cc)
            else {
                continue;
            };
            let Some(lifted) = f_hat.locals.get(&(s.clone(), cd.clone(), cc.clone())) else {
                report.push(Violation::SquareNotCommuting {
                    context: format!("lift square at {s}"),
                    detail: "the lift has no local triple for this chart".into(),
                });
                continue;
            };
            for point in dom_square.c_hat.domain.grid_points(grid) {
                let down = match dom_square.c_hat.eval(&point).and_then(|p| local.eval(&p)) {
                    Ok(p) => p,
                    Err(e) => {
                        report.push(Violation::SquareNotCommuting {
                            context: format!("lift square at {s}"),
                            detail: e.to_string(),
                        });
                        break;
                    }
                };
                let up = match lifted.eval(&point).and_then(|p| cod_square.c_hat.eval(&p)) {
                    Ok(p) => p,
                    Err(e) => {
                        report.push(Violation::SquareNotCommuting {
                            context: format!("lift square at {s}"),
                            detail: e.to_string(),
                        });
                        break;
                    }
                };
                if !points_agree(RadialKind::Cone, &down, &up, tol) {
                    report.push(Violation::SquareNotCommuting {
                        context: format!("lift square at {s}, chart {cd}"),
                        detail: format!("paths disagree at t = {}", point.radial),
                    });
                    break;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::sample_shift_group;
    use crate::morphism::cocycle_morphism;
    use crate::space::{cone_over, product_smooth, smooth_space, suspend, SmoothFactor};
    use crate::tube::{canonical_tube_for_cone, separate_tubes, validate_tm};

    fn s1() -> PresentedSpace {
        smooth_space(&SmoothFactor::new("S1", 1, true))
    }

    fn cone_s1() -> PresentedSpace {
        cone_over(&s1()).unwrap()
    }

    fn sigma() -> PresentedSpace {
        suspend(&s1()).unwrap()
    }

    fn separated(space: &PresentedSpace) -> TMStructure {
        separate_tubes(space, &TMStructure::canonical(space))
    }

    fn unbend(space: &PresentedSpace) -> UnbendResult {
        unbend_space(space, &separated(space), ProcessingOrder::Canonical).unwrap()
    }

    #[test]
    fn unbending_a_tube_keeps_cocycles_and_drops_length() {
        let tube = canonical_tube_for_cone(&cone_over(&sigma()).unwrap()).unwrap();
        let unbent = unbend_tube(&tube);
        assert_eq!(unbent.group, tube.group);
        assert_eq!(unbent.transitions, tube.transitions);
        assert_eq!(unbent.fiber_link, tube.link);
        // tube total space has length l(L) + 1; the unbent one has l(L)
        assert_eq!(unbent.length(), tube.link.length());
        assert_eq!(unbent.fiber_strata().len(), 3);
        // vertex tube of the plain cone: one fiber stratum, length zero
        let plain = unbend_tube(&canonical_tube_for_cone(&cone_s1()).unwrap());
        assert_eq!(plain.fiber_strata().len(), 1);
        assert_eq!(plain.length(), 0);

        let twisted_tube = canonical_tube_for_cone(&cone_s1())
            .unwrap()
            .with_twisted_atlas(sample_shift_group(s1().poset.ids(), 4));
        let twisted = unbend_tube(&twisted_tube);
        assert_eq!(twisted.group, twisted_tube.group);
    }

    #[test]
    fn chart_map_is_even_and_strips_the_sign() {
        let c_hat = unbend_chart(1, &s1());
        let sample = LinkSample::new(StratumId::atom("S1"), 3);
        let out = c_hat
            .eval(&ModelPoint {
                u: vec![0.5],
                link: sample.clone(),
                radial: -0.5,
            })
            .unwrap();
        assert_eq!(out.radial, 0.5);
        assert_eq!(out.u, vec![0.5]);
        let at_zero = c_hat
            .eval(&ModelPoint {
                u: vec![0.5],
                link: sample.clone(),
                radial: 0.0,
            })
            .unwrap();
        assert_eq!(at_zero.radial, 0.0);
        let plus = c_hat
            .eval(&ModelPoint {
                u: vec![0.5],
                link: sample,
                radial: 0.5,
            })
            .unwrap();
        assert!(points_agree(RadialKind::Cone, &out, &plus, 0.0));
    }

    #[test]
    fn unbending_the_cone_gives_the_line_bundle() {
        let space = cone_s1();
        let result = unbend(&space);
        let unbent = result.space();
        assert_eq!(unbent.poset.len(), 1);
        assert_eq!(unbent.length(), 0);
        assert_eq!(unbent.dim, 2);
        let class = unbent.poset.ids().next().unwrap();
        let pieces = &result.desing.provenance[class];
        assert_eq!(pieces.len(), 3);
        assert!(check_double_cover(&result).is_clean());
        // a length-1 input unbends to a manifold: no induced tubes remain
        let induced = induced_tm_on_unbent(&space, &separated(&space), &result);
        assert!(induced.tubes.is_empty());
    }

    #[test]
    fn unbending_the_cone_over_sigma() {
        let space = cone_over(&sigma()).unwrap();
        let result = unbend(&space);
        let unbent = result.space();
        assert_eq!(unbent.poset.len(), 3);
        assert_eq!(unbent.length(), 1);
        assert_eq!(unbent.min_strata().len(), 2);
        assert!(check_double_cover(&result).is_clean());
        // induced structure: tubes on the two new minimal strata
        let tm = separated(&space);
        let induced = induced_tm_on_unbent(&space, &tm, &result);
        assert_eq!(induced.tubes.len(), 2);
        let next = space_with_tubes(unbent, &induced);
        assert!(validate_pseudomanifold(&next).is_clean());
        let sep = separate_tubes(&next, &induced);
        assert!(validate_tm(&next, &sep).is_clean());
        assert!(
            check_unbending_is_tm(&space, &tm, &result, &induced, &GridSpec::default()).is_clean()
        );
    }

    #[test]
    fn smooth_spaces_unbend_identically() {
        let m = smooth_space(&SmoothFactor::new("M", 2, true));
        let result = unbend(&m);
        assert!(result.desing.is_identity());
        assert!(result.unbent_tubes.is_empty());
        assert_eq!(result.space(), &m);
    }

    #[test]
    fn unseparated_minimal_tubes_are_rejected() {
        let space = sigma();
        let tm = TMStructure::canonical(&space);
        // families were never assigned
        let err = unbend_space(&space, &tm, ProcessingOrder::Canonical).unwrap_err();
        assert!(matches!(
            err,
            UnbendError::TubesNotSeparated | UnbendError::InvalidInput(_)
        ));
    }

    #[test]
    fn product_cone_unbends_to_the_product_line_bundle() {
        let space = product_smooth(&SmoothFactor::new("U", 1, false), &cone_s1());
        let result = unbend(&space);
        let expected = product_smooth(
            &SmoothFactor::new("U", 1, false),
            &crate::space::line_product(&s1()),
        );
        assert!(crate::iso::iso_check(result.space(), &expected).is_some());
    }

    #[test]
    fn reversed_order_is_isomorphic_to_canonical() {
        for space in [cone_over(&sigma()).unwrap(), sigma()] {
            let tm = separated(&space);
            let canonical = unbend_space(&space, &tm, ProcessingOrder::Canonical).unwrap();
            let reversed = unbend_space(&space, &tm, ProcessingOrder::Reversed).unwrap();
            assert_ne!(
                canonical.space().poset.ids().next(),
                reversed.space().poset.ids().next()
            );
            assert!(crate::iso::iso_check(canonical.space(), reversed.space()).is_some());
        }
    }

    #[test]
    fn lift_of_the_identity_is_the_identity() {
        let space = cone_s1();
        let result = unbend(&space);
        let id = StratMorphism::identity(&space);
        let lifted =
            lift_morphism(&id, Sign::Plus, &result, &result, &GridSpec::default()).unwrap();
        for class in result.space().poset.ids() {
            assert_eq!(&lifted.stratum_map[class], class);
        }
        let squares =
            check_lift_squares(&id, &lifted, &result, &result, &GridSpec::default(), TOL);
        assert!(squares.is_clean(), "{squares}");
    }

    #[test]
    fn cocycle_morphisms_lift_to_their_unbent_form() {
        let space = cone_s1();
        let result = unbend(&space);
        let g = sample_shift_group(s1().poset.ids(), 4).elements[1].clone();
        let phi = cocycle_morphism(&space, &StratumId::vertex(), "g", &g).unwrap();
        let lifted =
            lift_morphism(&phi, Sign::Plus, &result, &result, &GridSpec::default()).unwrap();
        // the lift acts as (u, l, t) -> (u, g(l), t)
        let key = (StratumId::vertex(), ChartId::new("c0"), ChartId::new("c0"));
        let local = &lifted.locals[&key];
        let point = ModelPoint {
            u: vec![],
            link: LinkSample::new(StratumId::atom("S1"), 1),
            radial: -0.5,
        };
        let out = local.eval(&point).unwrap();
        assert_eq!(out.radial, -0.5);
        assert_eq!(out.link.index, 5);
        let squares =
            check_lift_squares(&phi, &lifted, &result, &result, &GridSpec::default(), TOL);
        assert!(squares.is_clean(), "{squares}");
    }

    #[test]
    fn quadratic_morphism_lift_square_from_the_worked_example() {
        // f(u, [l, r]) = (u^2, [l, r (1 + u^2)]) on U x c(S1)
        let space = product_smooth(&SmoothFactor::new("U", 1, false), &cone_s1());
        let result = unbend(&space);
        let vertex = StratumId::vertex().prefixed(Token::Times("U".into()));
        let model = BasicModel::cone(1, s1());
        let f_local = BasicModelMorphism {
            domain: model.clone(),
            codomain: model,
            a1: vec![Expr::mul(Expr::U(0), Expr::U(0))],
            a2: Expr::L,
            a3: Expr::mul(
                Expr::T,
                Expr::add(Expr::constant(1.0), Expr::mul(Expr::U(0), Expr::U(0))),
            ),
            actions: BTreeMap::new(),
        };
        let mut f = StratMorphism::identity(&space);
        f.locals.insert(
            (vertex.clone(), ChartId::new("c0"), ChartId::new("c0")),
            f_local,
        );
        let lifted =
            lift_morphism(&f, Sign::Plus, &result, &result, &GridSpec::default()).unwrap();
        let local = &lifted.locals[&(vertex, ChartId::new("c0"), ChartId::new("c0"))];
        // the lift acts as (u, l, t) -> (u^2, l, t (1 + u^2)); at
        // (1, l, -0.5) both square paths give (1, [l, 1.0])
        let point = ModelPoint {
            u: vec![1.0],
            link: LinkSample::new(StratumId::atom("S1"), 0),
            radial: -0.5,
        };
        let out = local.eval(&point).unwrap();
        assert!(close_with(out.radial, -1.0, TOL));
        let squares =
            check_lift_squares(&f, &lifted, &result, &result, &GridSpec::default(), TOL);
        assert!(squares.is_clean(), "{squares}");
    }

    #[test]
    fn vertex_obstruction_blocks_the_lift() {
        let model = BasicModel::cone(0, s1());
        let bad = BasicModelMorphism {
            a3: Expr::add(Expr::T, Expr::constant(1.0)),
            ..BasicModelMorphism::identity(&model)
        };
        let err = lift_basic_morphism(&bad, Sign::Plus, &GridSpec::default()).unwrap_err();
        assert!(matches!(err, UnbendError::VertexObstruction(_)));
    }

    #[test]
    fn zero_radial_maps_get_the_even_extension() {
        let model = BasicModel::cone(0, s1());
        let to_vertex = BasicModelMorphism {
            a3: Expr::constant(0.0),
            ..BasicModelMorphism::identity(&model)
        };
        let (lifted, report) =
            lift_basic_morphism(&to_vertex, Sign::Plus, &GridSpec::default()).unwrap();
        assert!(report.is_clean(), "{report}");
        let out = lifted
            .eval(&ModelPoint {
                u: vec![],
                link: LinkSample::new(StratumId::atom("S1"), 0),
                radial: -0.5,
            })
            .unwrap();
        assert_eq!(out.radial, 0.0);
    }

    #[test]
    fn odd_lift_of_the_radial_identity() {
        let model = BasicModel::cone(0, s1());
        let id = BasicModelMorphism::identity(&model);
        for sign in [Sign::Plus, Sign::Minus] {
            let (lifted, report) = lift_basic_morphism(&id, sign, &GridSpec::default()).unwrap();
            assert!(report.is_clean(), "{report}");
            let out = lifted
                .eval(&ModelPoint {
                    u: vec![],
                    link: LinkSample::new(StratumId::atom("S1"), 0),
                    radial: -0.5,
                })
                .unwrap();
            assert_eq!(out.radial, sign.factor() * -0.5);
        }
    }

    #[test]
    fn sign_coherence_through_the_deck_swap() {
        let space = cone_s1();
        let result = unbend(&space);
        let g = sample_shift_group(s1().poset.ids(), 4).elements[1].clone();
        let phi = cocycle_morphism(&space, &StratumId::vertex(), "g", &g).unwrap();
        let grid = GridSpec::default();
        let plus = lift_morphism(&phi, Sign::Plus, &result, &result, &grid).unwrap();
        let minus = lift_morphism(&phi, Sign::Minus, &result, &result, &grid).unwrap();
        let deck = deck_swap(&result);
        let left = deck.compose(&plus).unwrap();
        let right = plus.compose(&deck).unwrap();
        for class in result.space().poset.ids() {
            assert_eq!(minus.stratum_map[class], left.stratum_map[class]);
            assert_eq!(minus.stratum_map[class], right.stratum_map[class]);
        }
        let key = (StratumId::vertex(), ChartId::new("c0"), ChartId::new("c0"));
        assert!(minus.locals[&key]
            .agrees_with(&left.locals[&key], &grid, TOL)
            .unwrap());
        assert!(minus.locals[&key]
            .agrees_with(&right.locals[&key], &grid, TOL)
            .unwrap());
    }

    #[test]
    fn corrupted_provenance_is_detected() {
        let space = cone_over(&sigma()).unwrap();
        let tm = separated(&space);
        let mut result = unbend(&space);
        let induced = induced_tm_on_unbent(&space, &tm, &result);
        // remap a copy+ tag of a footprint stratum to a wrong target
        let swept = StratumId::body(&StratumId::swept(&StratumId::atom("S1")));
        let wrong = StratumId::body(&StratumId::pole(true));
        let class = result.desing.class_of_copy(&swept, Sign::Plus).unwrap();
        let pieces = result.desing.provenance.get_mut(&class).unwrap();
        pieces.remove(&(swept.clone(), ProvTag::Copy(Sign::Plus)));
        pieces.insert((wrong.clone(), ProvTag::Copy(Sign::Plus)));
        let report = check_unbending_is_tm(&space, &tm, &result, &induced, &GridSpec::default());
        assert!(report.has_code("TubeNotPreserved"), "{report}");
    }

    #[test]
    fn corrupted_radium_sign_is_detected() {
        let space = cone_s1();
        let tm = separated(&space);
        let mut result = unbend(&space);
        let induced = induced_tm_on_unbent(&space, &tm, &result);
        // break the chart map: radial projection forgets the absolute value
        result.desing.chart_squares[0].c_hat.a3 = Expr::T;
        let report = check_unbending_is_tm(&space, &tm, &result, &induced, &GridSpec::default());
        assert!(report.has_code("RadiumRelationBroken"), "{report}");
    }
}

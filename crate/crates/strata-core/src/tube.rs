//! Tubular neighborhoods: conic fiber bundles with finite cocycle groups.
//!
//! A tube over a singular stratum records its link, a finite bundle atlas
//! with transitions drawn from a finite cocycle group, and a footprint: the
//! injective, order- and dimension-compatible map sending each link stratum
//! to the ambient stratum the tube meets there. Point-set disjointness of
//! tubes is a tracked family tag (non-comparable strata can always be
//! separated by shrinking), never recomputed geometrically.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diag::{Report, Violation};
use crate::group::CocycleGroup;
use crate::id::{ChartId, StratumId};
use crate::samples::LinkSample;
use crate::space::PresentedSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    PseudomanifoldChart,
    BundleChart,
}

/// One bundle chart of a tube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub chart_id: ChartId,
    pub base_stratum: StratumId,
    pub kind: ChartKind,
}

/// A tubular neighborhood of a singular stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tube {
    pub base: StratumId,
    /// The link; equal to the ambient space's link of `base`.
    pub link: PresentedSpace,
    pub charts: Vec<ChartRecord>,
    pub group: CocycleGroup,
    /// Transition element per ordered chart pair, as an index into `group`.
    pub transitions: BTreeMap<(ChartId, ChartId), usize>,
    /// Link stratum -> ambient stratum the tube meets there.
    pub footprint_map: BTreeMap<StratumId, StratumId>,
    /// Disjointness family tag assigned by separation.
    pub family: Option<u32>,
}

/// A point of a tube in bundle-chart coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub chart: ChartId,
    pub u: Vec<f64>,
    pub link: LinkSample,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TubeError {
    #[error("space is not a presented cone or cone product")]
    NotAConicSpace,
    #[error("point lies outside the tube (chart {0})")]
    PointOutsideTube(ChartId),
    #[error("radial stretching requires a positive factor, got {0}")]
    NonPositiveLambda(f64),
    #[error("no transition recorded from {0} to {1}")]
    UnknownTransition(ChartId, ChartId),
}

impl Tube {
    /// Single-chart tube with trivial cocycle group.
    pub fn canonical(
        base: StratumId,
        link: PresentedSpace,
        footprint_map: BTreeMap<StratumId, StratumId>,
    ) -> Tube {
        let chart = ChartId::new("c0");
        let group = CocycleGroup::trivial(link.poset.ids());
        let mut transitions = BTreeMap::new();
        transitions.insert((chart.clone(), chart.clone()), 0);
        Tube {
            base: base.clone(),
            link,
            charts: vec![ChartRecord {
                chart_id: chart,
                base_stratum: base,
                kind: ChartKind::PseudomanifoldChart,
            }],
            group,
            transitions,
            footprint_map,
            family: None,
        }
    }

    /// Strata of the ambient space meeting the tube.
    pub fn footprint(&self) -> BTreeSet<StratumId> {
        let mut out: BTreeSet<StratumId> = self.footprint_map.values().cloned().collect();
        out.insert(self.base.clone());
        out
    }

    pub fn chart(&self, id: &ChartId) -> Option<&ChartRecord> {
        self.charts.iter().find(|c| &c.chart_id == id)
    }

    /// Renames the ambient side (base and footprint targets); the link side
    /// is untouched.
    pub fn map_ambient(&self, rename: &impl Fn(&StratumId) -> StratumId) -> Tube {
        Tube {
            base: rename(&self.base),
            footprint_map: self
                .footprint_map
                .iter()
                .map(|(r, w)| (r.clone(), rename(w)))
                .collect(),
            charts: self
                .charts
                .iter()
                .map(|c| ChartRecord {
                    chart_id: c.chart_id.clone(),
                    base_stratum: rename(&c.base_stratum),
                    kind: c.kind,
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Installs a two-chart atlas whose transition is generated by `group`
    /// element 1. Fixture helper for nontrivial cocycles.
    pub fn with_twisted_atlas(mut self, group: CocycleGroup) -> Tube {
        let a = ChartId::new("c0");
        let b = ChartId::new("c1");
        let g = 1.min(group.order() - 1);
        let g_inv = group
            .table()
            .and_then(|t| t[g].iter().position(|&x| x == 0))
            .unwrap_or(0);
        self.charts = vec![
            ChartRecord {
                chart_id: a.clone(),
                base_stratum: self.base.clone(),
                kind: ChartKind::BundleChart,
            },
            ChartRecord {
                chart_id: b.clone(),
                base_stratum: self.base.clone(),
                kind: ChartKind::BundleChart,
            },
        ];
        self.transitions = BTreeMap::from([
            ((a.clone(), a.clone()), 0),
            ((b.clone(), b.clone()), 0),
            ((a.clone(), b.clone()), g),
            ((b.clone(), a.clone()), g_inv),
        ]);
        self.group = group;
        self
    }
}

/// The designated tube of a presented cone `c(L)` or cone product
/// `M x c(L)`: the tube on the vertex stratum, whose footprint is every
/// stratum of the space.
pub fn canonical_tube_for_cone(space: &PresentedSpace) -> Result<Tube, TubeError> {
    let min = space.min_strata();
    if min.len() != 1 {
        return Err(TubeError::NotAConicSpace);
    }
    let vertex = min.into_iter().next().unwrap();
    let tube = space.tubes.get(&vertex).ok_or(TubeError::NotAConicSpace)?;
    if tube.footprint().len() != space.poset.len() {
        return Err(TubeError::NotAConicSpace);
    }
    Ok(tube.clone())
}

/// The tubular radium: chart-independent because cocycles carry `r`.
pub fn radium(tube: &Tube, point: &TubePoint) -> Result<f64, TubeError> {
    if tube.chart(&point.chart).is_none() {
        return Err(TubeError::PointOutsideTube(point.chart.clone()));
    }
    Ok(point.r)
}

/// The radial stretching: scales the radium, fixing base points.
pub fn radial_stretch(tube: &Tube, lambda: f64, point: &TubePoint) -> Result<TubePoint, TubeError> {
    if lambda <= 0.0 {
        return Err(TubeError::NonPositiveLambda(lambda));
    }
    if tube.chart(&point.chart).is_none() {
        return Err(TubeError::PointOutsideTube(point.chart.clone()));
    }
    Ok(TubePoint {
        r: lambda * point.r,
        ..point.clone()
    })
}

/// Rewrites a point into another chart through the recorded transition:
/// `(u, l, r) -> (u, g(l), r)`.
pub fn transition_point(tube: &Tube, point: &TubePoint, to: &ChartId) -> Result<TubePoint, TubeError> {
    if tube.chart(&point.chart).is_none() {
        return Err(TubeError::PointOutsideTube(point.chart.clone()));
    }
    let index = tube
        .transitions
        .get(&(point.chart.clone(), to.clone()))
        .ok_or_else(|| TubeError::UnknownTransition(point.chart.clone(), to.clone()))?;
    let g = tube
        .group
        .element(*index)
        .ok_or_else(|| TubeError::UnknownTransition(point.chart.clone(), to.clone()))?;
    let link = g
        .apply(&point.link)
        .ok_or_else(|| TubeError::UnknownTransition(point.chart.clone(), to.clone()))?;
    Ok(TubePoint {
        chart: to.clone(),
        u: point.u.clone(),
        link,
        r: point.r,
    })
}

/// What a disjointness family tag asserts: any family of non-comparable
/// strata can be separated by disjoint tubes, shrinking them radially; the
/// symbolic model keeps the conclusion as a flag instead of recomputing
/// point-set extents.
pub const SEPARATION_JUSTIFICATION: &str =
    "non-comparable strata separated by radial tube shrinking; \
     disjointness recorded as family tags";

/// The Thom-Mather structure of a space: one tube per singular stratum,
/// declared chain nestings, and disjointness families.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TMStructure {
    pub tubes: BTreeMap<StratumId, Tube>,
    /// Declared containments `inner ⊂ outer − base(outer)` along chains.
    pub nesting: BTreeSet<(StratumId, StratumId)>,
    /// Disjoint-tube family per singular stratum; what a shared tag
    /// asserts is [`SEPARATION_JUSTIFICATION`].
    pub families: BTreeMap<StratumId, u32>,
}

impl TMStructure {
    /// Collects the constructor-attached tubes of a space and declares the
    /// nestings a chain poset requires.
    pub fn canonical(space: &PresentedSpace) -> TMStructure {
        let mut tm = TMStructure {
            tubes: space.tubes.clone(),
            nesting: BTreeSet::new(),
            families: BTreeMap::new(),
        };
        tm.declare_chain_nesting(space);
        tm
    }

    fn declare_chain_nesting(&mut self, space: &PresentedSpace) {
        if !space.poset.is_chain() {
            return;
        }
        let singular = space.classify_strata().singular;
        let mut chain: Vec<StratumId> = singular.into_iter().collect();
        chain.sort_by(|a, b| {
            if space.poset.lt(a, b) {
                std::cmp::Ordering::Less
            } else if space.poset.lt(b, a) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        for pair in chain.windows(2) {
            self.nesting.insert((pair[1].clone(), pair[0].clone()));
        }
    }
}

/// Validates a Thom-Mather structure against its space.
pub fn validate_tm(space: &PresentedSpace, tm: &TMStructure) -> Report {
    let mut report = Report::new();
    let classification = space.classify_strata();

    for s in &classification.singular {
        match tm.tubes.get(s) {
            None => report.push(Violation::TubeMissing { stratum: s.clone() }),
            Some(tube) => validate_tube(space, s, tube, &mut report),
        }
    }
    for s in tm.tubes.keys() {
        if !classification.singular.contains(s) {
            report.push(Violation::TubeOnRegular { stratum: s.clone() });
        }
    }

    // Mather incidence at footprint granularity: tubes of non-comparable
    // strata either sit in one disjointness family or must not share a
    // footprint stratum.
    let singular: Vec<&StratumId> = classification.singular.iter().collect();
    for (i, s) in singular.iter().enumerate() {
        for r in &singular[i + 1..] {
            if space.poset.comparable(s, r) {
                continue;
            }
            let (Some(ts), Some(tr)) = (tm.tubes.get(*s), tm.tubes.get(*r)) else {
                continue;
            };
            let same_family = match (tm.families.get(*s), tm.families.get(*r)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            };
            if same_family {
                continue;
            }
            if let Some(shared) = ts.footprint().intersection(&tr.footprint()).next() {
                report.push(Violation::MatherViolation {
                    first: (*s).clone(),
                    second: (*r).clone(),
                    shared: shared.clone(),
                });
            }
        }
    }

    // chain nesting must be declared on totally ordered spaces
    if space.poset.is_chain() {
        let mut chain: Vec<&StratumId> = classification.singular.iter().collect();
        chain.sort_by(|a, b| {
            if space.poset.lt(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        for (k, pair) in chain.windows(2).enumerate() {
            let key = ((*pair[1]).clone(), (*pair[0]).clone());
            if !tm.nesting.contains(&key) {
                report.push(Violation::NestingMissing {
                    index: k,
                    inner: pair[1].clone(),
                    outer: pair[0].clone(),
                });
            }
        }
    }

    // links carry their own structures; separation is always available for
    // them, so they are validated in separated form
    for (s, link) in &space.links {
        let link_tm = separate_tubes(link, &TMStructure::canonical(link));
        report.merge_link(s, validate_tm(link, &link_tm));
    }
    report
}

fn validate_tube(space: &PresentedSpace, s: &StratumId, tube: &Tube, report: &mut Report) {
    if &tube.base != s {
        report.push(Violation::ChartBaseMismatch {
            base: s.clone(),
            chart: format!("tube base {}", tube.base),
        });
    }
    if let Some(link) = space.links.get(s) {
        if link != &tube.link {
            report.push(Violation::TubeLinkMismatch { stratum: s.clone() });
        }
    }
    for chart in &tube.charts {
        if chart.base_stratum != tube.base {
            report.push(Violation::ChartBaseMismatch {
                base: s.clone(),
                chart: chart.chart_id.0.clone(),
            });
        }
    }

    report.merge(tube.group.validate(s));

    // footprint: inside the incidence neighborhood, injective, order- and
    // dimension-compatible with the cone of the link, up-closed above base
    let up = space.poset.up_set(s);
    let mut seen: BTreeSet<&StratumId> = BTreeSet::new();
    let base_dim = space.poset.stratum(s).map(|x| x.dim).unwrap_or(0);
    for (r, w) in &tube.footprint_map {
        if !up.contains(w) || w == s {
            report.push(Violation::FootprintOutsideIncidence {
                base: s.clone(),
                stratum: w.clone(),
            });
            continue;
        }
        if !seen.insert(w) {
            report.push(Violation::FootprintNotInjective { base: s.clone() });
        }
        let (rd, wd) = (
            tube.link.poset.stratum(r).map(|x| x.dim),
            space.poset.stratum(w).map(|x| x.dim),
        );
        match (rd, wd) {
            (Some(rd), Some(wd)) if wd == base_dim + rd + 1 => {}
            _ => report.push(Violation::FootprintDimBroken {
                base: s.clone(),
                link_stratum: r.clone(),
            }),
        }
        if let Some(link_of_r) = tube.link.links.get(r) {
            if space.links.get(w) != Some(link_of_r) {
                report.push(Violation::TubeLinkMismatch { stratum: w.clone() });
            }
        }
    }
    for (a, b) in tube.link.poset.strict_pairs() {
        if let (Some(wa), Some(wb)) = (tube.footprint_map.get(a), tube.footprint_map.get(b)) {
            if !space.poset.lt(wa, wb) {
                report.push(Violation::FootprintOrderBroken {
                    base: s.clone(),
                    detail: format!("{a} < {b} but {wa} is not below {wb}"),
                });
            }
        }
    }
    let image: BTreeSet<&StratumId> = tube.footprint_map.values().collect();
    for w in &image {
        for v in &up {
            if space.poset.lt(w, v) && !image.contains(v) {
                report.push(Violation::FootprintNotUpClosed {
                    base: s.clone(),
                    missing: v.clone(),
                });
            }
        }
    }

    // cocycle identities on the recorded transition table
    let id_index = tube.group.identity_index();
    for chart in &tube.charts {
        let key = (chart.chart_id.clone(), chart.chart_id.clone());
        if tube.transitions.get(&key) != Some(&id_index) {
            report.push(Violation::CocycleIdentityBroken {
                base: s.clone(),
                detail: format!("({0},{0}) is not the identity", chart.chart_id),
            });
        }
    }
    for ((a, b), g) in &tube.transitions {
        if tube.group.element(*g).is_none() {
            report.push(Violation::CocycleIdentityBroken {
                base: s.clone(),
                detail: format!("({a},{b}) maps to a missing group element"),
            });
            continue;
        }
        if let Some(h) = tube.transitions.get(&(b.clone(), a.clone())) {
            if tube.group.compose_indices(*h, *g) != Some(id_index) {
                report.push(Violation::CocycleIdentityBroken {
                    base: s.clone(),
                    detail: format!("({a},{b}) and ({b},{a}) are not mutually inverse"),
                });
            }
        }
        for chart in &tube.charts {
            let c = &chart.chart_id;
            if let (Some(bc), Some(ac)) = (
                tube.transitions.get(&(b.clone(), c.clone())),
                tube.transitions.get(&(a.clone(), c.clone())),
            ) {
                if tube.group.compose_indices(*bc, *g) != Some(*ac) {
                    report.push(Violation::CocycleIdentityBroken {
                        base: s.clone(),
                        detail: format!("triple identity fails on ({a},{b},{c})"),
                    });
                }
            }
        }
    }
}

/// Assigns disjointness families to the singular strata: the minimal part
/// first, then the remaining singular strata grouped greedily into
/// antichains in id order. Footprints are untouched; each family tag in the
/// output records [`SEPARATION_JUSTIFICATION`].
pub fn separate_tubes(space: &PresentedSpace, tm: &TMStructure) -> TMStructure {
    let mut out = tm.clone();
    let classification = space.classify_strata();
    let min = space.min_strata();
    let mut next_family = 0u32;
    if !min.is_empty() {
        for s in &min {
            out.families.insert(s.clone(), next_family);
        }
        next_family += 1;
    }
    let mut family_members: Vec<(u32, Vec<StratumId>)> = Vec::new();
    for s in classification.singular.iter().filter(|s| !min.contains(*s)) {
        let slot = family_members.iter_mut().find(|(_, members)| {
            members.iter().all(|m| !space.poset.comparable(m, s))
        });
        match slot {
            Some((id, members)) => {
                members.push(s.clone());
                out.families.insert(s.clone(), *id);
            }
            None => {
                family_members.push((next_family, vec![s.clone()]));
                out.families.insert(s.clone(), next_family);
                next_family += 1;
            }
        }
    }
    for (s, family) in &out.families {
        if let Some(tube) = out.tubes.get_mut(s) {
            tube.family = Some(*family);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::sample_shift_group;
    use crate::id::Token;
    use crate::space::{cone_over, disjoint, product_smooth, smooth_space, suspend, SmoothFactor};

    fn s1() -> PresentedSpace {
        smooth_space(&SmoothFactor::new("S1", 1, true))
    }

    fn cone_s1() -> PresentedSpace {
        cone_over(&s1()).unwrap()
    }

    #[test]
    fn canonical_tube_of_the_cone() {
        let c = cone_s1();
        let tube = canonical_tube_for_cone(&c).unwrap();
        assert_eq!(tube.base, StratumId::vertex());
        assert_eq!(tube.footprint().len(), 2);
        assert_eq!(tube.group.order(), 1);
        assert_eq!(tube.charts.len(), 1);
    }

    #[test]
    fn canonical_tube_of_a_cone_product() {
        let p = product_smooth(&SmoothFactor::new("U", 1, false), &cone_s1());
        let tube = canonical_tube_for_cone(&p).unwrap();
        assert_eq!(tube.footprint().len(), 2);
        assert_eq!(tube.link, s1());
    }

    #[test]
    fn canonical_tube_of_cone_over_suspension() {
        let c = cone_over(&suspend(&s1()).unwrap()).unwrap();
        let tube = canonical_tube_for_cone(&c).unwrap();
        assert_eq!(tube.link.poset.len(), 3);
        assert_eq!(tube.footprint().len(), 4);
    }

    #[test]
    fn smooth_spaces_are_not_conic() {
        let m = smooth_space(&SmoothFactor::new("M", 2, true));
        assert_eq!(
            canonical_tube_for_cone(&m).unwrap_err(),
            TubeError::NotAConicSpace
        );
    }

    fn point(r: f64) -> TubePoint {
        TubePoint {
            chart: ChartId::new("c0"),
            u: vec![],
            link: LinkSample::new(StratumId::atom("S1"), 3),
            r,
        }
    }

    #[test]
    fn radium_reads_the_conic_coordinate() {
        let tube = canonical_tube_for_cone(&cone_s1()).unwrap();
        assert_eq!(radium(&tube, &point(0.0)).unwrap(), 0.0);
        assert_eq!(radium(&tube, &point(0.7)).unwrap(), 0.7);
        let outside = TubePoint {
            chart: ChartId::new("zz"),
            ..point(0.1)
        };
        assert!(matches!(
            radium(&tube, &outside),
            Err(TubeError::PointOutsideTube(_))
        ));
    }

    #[test]
    fn radium_is_chart_independent() {
        let tube = canonical_tube_for_cone(&cone_s1())
            .unwrap()
            .with_twisted_atlas(sample_shift_group([StratumId::atom("S1")].iter(), 4));
        let p = point(0.7);
        let q = transition_point(&tube, &p, &ChartId::new("c1")).unwrap();
        assert_eq!(q.r, 0.7);
        assert_ne!(q.link, p.link);
        let back = transition_point(&tube, &q, &ChartId::new("c0")).unwrap();
        assert_eq!(back.link, p.link);
    }

    #[test]
    fn stretching_scales_and_fixes_the_base() {
        let tube = canonical_tube_for_cone(&cone_s1()).unwrap();
        let p = point(0.3);
        assert_eq!(radial_stretch(&tube, 1.0, &p).unwrap(), p);
        assert_eq!(radial_stretch(&tube, 2.0, &p).unwrap().r, 0.6);
        assert_eq!(radial_stretch(&tube, 17.0, &point(0.0)).unwrap().r, 0.0);
        assert!(matches!(
            radial_stretch(&tube, 0.0, &p),
            Err(TubeError::NonPositiveLambda(_))
        ));
    }

    #[test]
    fn canonical_structures_validate_cleanly() {
        for space in [
            cone_s1(),
            cone_over(&suspend(&s1()).unwrap()).unwrap(),
            product_smooth(&SmoothFactor::new("U", 1, false), &cone_s1()),
        ] {
            let tm = separate_tubes(&space, &TMStructure::canonical(&space));
            let report = validate_tm(&space, &tm);
            assert!(report.is_clean(), "unexpected violations: {report}");
        }
    }

    #[test]
    fn mather_violation_without_family() {
        let sigma = suspend(&s1()).unwrap();
        let tm = TMStructure::canonical(&sigma);
        // both pole tubes share the swept stratum and no families are set
        let report = validate_tm(&sigma, &tm);
        assert!(report.has_code("MatherViolation"));
        let separated = separate_tubes(&sigma, &tm);
        assert!(validate_tm(&sigma, &separated).is_clean());
    }

    #[test]
    fn separation_tags_expected_families() {
        let sigma = suspend(&s1()).unwrap();
        let tm = separate_tubes(&sigma, &TMStructure::canonical(&sigma));
        let p = tm.families[&StratumId::pole(true)];
        let m = tm.families[&StratumId::pole(false)];
        assert_eq!(p, m);

        let two = disjoint(vec![cone_s1(), cone_s1()]).unwrap();
        let tm = separate_tubes(&two, &TMStructure::canonical(&two));
        let v0 = tm.families[&StratumId::vertex().prefixed(Token::Part(0))];
        let v1 = tm.families[&StratumId::vertex().prefixed(Token::Part(1))];
        assert_eq!(v0, v1);

        // single chain: nothing non-comparable, one family for the vertex
        let c = cone_s1();
        let tm = separate_tubes(&c, &TMStructure::canonical(&c));
        assert_eq!(tm.families.len(), 1);
    }

    #[test]
    fn nesting_is_declared_and_checked_on_chains() {
        let sigma = suspend(&s1()).unwrap();
        let chain = vec![
            StratumId::pole(true),
            StratumId::swept(&StratumId::atom("S1")),
        ];
        let local = crate::space::localize(&sigma, &chain).unwrap();
        let tm = separate_tubes(&local, &TMStructure::canonical(&local));
        assert!(validate_tm(&local, &tm).is_clean());

        // a chain with two singular strata needs a declared nesting
        let tall = cone_over(&suspend(&s1()).unwrap()).unwrap();
        let chain = vec![
            StratumId::vertex(),
            StratumId::body(&StratumId::pole(true)),
            StratumId::body(&StratumId::swept(&StratumId::atom("S1"))),
        ];
        let local = crate::space::localize(&tall, &chain).unwrap();
        let mut tm = separate_tubes(&local, &TMStructure::canonical(&local));
        assert!(validate_tm(&local, &tm).is_clean());
        tm.nesting.clear();
        let report = validate_tm(&local, &tm);
        assert!(report.has_code("NestingMissing"));
    }

    #[test]
    fn broken_cocycle_tables_are_reported() {
        let mut tube = canonical_tube_for_cone(&cone_s1())
            .unwrap()
            .with_twisted_atlas(sample_shift_group([StratumId::atom("S1")].iter(), 4));
        // break inverse symmetry
        tube.transitions.insert((ChartId::new("c1"), ChartId::new("c0")), 0);
        let mut space = cone_s1();
        space.tubes.insert(StratumId::vertex(), tube);
        let tm = separate_tubes(&space, &TMStructure::canonical(&space));
        let report = validate_tm(&space, &tm);
        assert!(report.has_code("CocycleIdentityBroken"));
    }
}

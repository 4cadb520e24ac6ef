//! Stratified, tube- and Thom-Mather morphisms.
//!
//! A morphism has two layers: a structural stratum map, monotone for the
//! incidence orders, and per-chart coordinate triples `(a1, a2, a3)` between
//! basic models, evaluated on deterministic grids. Tube-morphisms commute
//! with the tubular radia and the bundle projections; Thom-Mather morphisms
//! additionally send tubes into tubes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diag::{Report, Violation};
use crate::expr::{EvalCtx, Expr, ExprError};
use crate::group::LinkIso;
use crate::id::{ChartId, StratumId};
use crate::samples::{close, close_with, link_samples, GridSpec, LinkSample, TOL};
use crate::space::PresentedSpace;
use crate::tube::TMStructure;

/// Whether the radial coordinate of a model ranges over the cone (`r >= 0`)
/// or the whole line (`t` of an unbent model).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialKind {
    Cone,
    Line,
}

/// A basic model `U x c(L)` (or its unbent form `U x L x R`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicModel {
    pub base_dim: u32,
    pub link: PresentedSpace,
    pub radial: RadialKind,
}

impl BasicModel {
    pub fn cone(base_dim: u32, link: PresentedSpace) -> Self {
        BasicModel {
            base_dim,
            link,
            radial: RadialKind::Cone,
        }
    }

    pub fn line(base_dim: u32, link: PresentedSpace) -> Self {
        BasicModel {
            base_dim,
            link,
            radial: RadialKind::Line,
        }
    }

    /// Every grid point of the model: base lattice x link samples x radial
    /// values.
    pub fn grid_points(&self, grid: &GridSpec) -> Vec<ModelPoint> {
        let radials = match self.radial {
            RadialKind::Cone => grid.r_values(),
            RadialKind::Line => grid.t_values(),
        };
        let mut out = Vec::new();
        for u in grid.u_grid(self.base_dim) {
            for l in link_samples(self.link.poset.ids()) {
                for &t in &radials {
                    out.push(ModelPoint {
                        u: u.clone(),
                        link: l.clone(),
                        radial: t,
                    });
                }
            }
        }
        out
    }
}

/// A point of a basic model in coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub u: Vec<f64>,
    pub link: LinkSample,
    pub radial: f64,
}

/// Equality of model points within `tol`, collapsing the cone point: on a
/// cone model, all points with radium 0 over the same base are identified.
pub fn points_agree(kind: RadialKind, a: &ModelPoint, b: &ModelPoint, tol: f64) -> bool {
    if a.u.len() != b.u.len() {
        return false;
    }
    if !a.u.iter().zip(&b.u).all(|(x, y)| close_with(*x, *y, tol)) {
        return false;
    }
    if !close_with(a.radial, b.radial, tol) {
        return false;
    }
    if kind == RadialKind::Cone && a.radial.abs() <= tol && b.radial.abs() <= tol {
        return true; // cone collapse: the link sample is irrelevant at r = 0
    }
    a.link == b.link
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MorphError {
    #[error("point is not in the domain sample grid: {0}")]
    SampleNotInGrid(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("the two squares are sampled on different grids: {0}")]
    GridMismatch(String),
    #[error("morphism is not an isomorphism: {0}")]
    NotAnIsomorphism(String),
}

/// The coordinate triple of a morphism between two basic models, together
/// with the named link actions its expressions reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicModelMorphism {
    pub domain: BasicModel,
    pub codomain: BasicModel,
    /// Base coordinates of the image; length = codomain base dimension.
    pub a1: Vec<Expr>,
    /// Link coordinate of the image.
    pub a2: Expr,
    /// Radial coordinate of the image.
    pub a3: Expr,
    pub actions: BTreeMap<String, LinkIso>,
}

impl BasicModelMorphism {
    /// The identity triple on a model.
    pub fn identity(model: &BasicModel) -> Self {
        BasicModelMorphism {
            domain: model.clone(),
            codomain: model.clone(),
            a1: Expr::identity_base(model.base_dim),
            a2: Expr::L,
            a3: Expr::T,
            actions: BTreeMap::new(),
        }
    }

    /// The cocycle form `(u, l, t) -> (u, g(l), t)`.
    pub fn cocycle_form(model: &BasicModel, name: &str, g: LinkIso) -> Self {
        let mut actions = BTreeMap::new();
        actions.insert(name.to_string(), g);
        BasicModelMorphism {
            domain: model.clone(),
            codomain: model.clone(),
            a1: Expr::identity_base(model.base_dim),
            a2: Expr::apply(name, Expr::L),
            a3: Expr::T,
            actions,
        }
    }

    fn ctx<'a>(&'a self, point: &'a ModelPoint) -> EvalCtx<'a> {
        EvalCtx {
            u: &point.u,
            l: point.link.clone(),
            t: point.radial,
            actions: &self.actions,
        }
    }

    /// Componentwise evaluation at one point.
    pub fn eval(&self, point: &ModelPoint) -> Result<ModelPoint, MorphError> {
        if point.u.len() != self.domain.base_dim as usize {
            return Err(MorphError::SampleNotInGrid(format!(
                "base has {} coordinates, expected {}",
                point.u.len(),
                self.domain.base_dim
            )));
        }
        if !self.domain.link.poset.contains(&point.link.stratum) {
            return Err(MorphError::SampleNotInGrid(format!(
                "link sample {} is not a stratum of the domain link",
                point.link.stratum
            )));
        }
        if self.domain.radial == RadialKind::Cone && point.radial < 0.0 {
            return Err(MorphError::SampleNotInGrid(format!(
                "negative radium {} on a cone model",
                point.radial
            )));
        }
        let ctx = self.ctx(point);
        let u = self
            .a1
            .iter()
            .map(|e| e.eval_real(&ctx))
            .collect::<Result<Vec<f64>, _>>()?;
        let link = self.a2.eval_link(&ctx)?;
        let radial = self.a3.eval_real(&ctx)?;
        Ok(ModelPoint { u, link, radial })
    }

    /// Symbolic composition `self . first`.
    pub fn compose(&self, first: &BasicModelMorphism) -> Result<BasicModelMorphism, MorphError> {
        // keep both galleries; rename second's colliding action names
        let mut actions = first.actions.clone();
        let mut renames = BTreeMap::new();
        for (name, iso) in &self.actions {
            if actions.get(name) == Some(iso) {
                continue;
            }
            let mut chosen = name.clone();
            while actions.contains_key(&chosen) {
                chosen.push('\'');
            }
            if &chosen != name {
                renames.insert(name.clone(), chosen.clone());
            }
            actions.insert(chosen, iso.clone());
        }
        let subst = |e: &Expr| -> Result<Expr, MorphError> {
            Ok(e.rename_actions(&renames)
                .subst(&first.a1, &first.a2, &first.a3)?)
        };
        Ok(BasicModelMorphism {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            a1: self.a1.iter().map(subst).collect::<Result<Vec<_>, _>>()?,
            a2: subst(&self.a2)?,
            a3: subst(&self.a3)?,
            actions,
        })
    }

    /// Pointwise agreement of two triples over the full domain grid.
    pub fn agrees_with(
        &self,
        other: &BasicModelMorphism,
        grid: &GridSpec,
        tol: f64,
    ) -> Result<bool, MorphError> {
        if self.domain != other.domain {
            return Err(MorphError::GridMismatch("domains differ".to_string()));
        }
        for point in self.domain.grid_points(grid) {
            let a = self.eval(&point)?;
            let b = other.eval(&point)?;
            if !points_agree(self.codomain.radial, &a, &b, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Vertex consistency: wherever `a3(u, l, 0) = 0`, the image of the
    /// vertex must not depend on `l`.
    pub fn vertex_consistent(&self, grid: &GridSpec) -> Result<bool, MorphError> {
        let samples = link_samples(self.domain.link.poset.ids());
        for u in grid.u_grid(self.domain.base_dim) {
            let mut image: Option<ModelPoint> = None;
            for l in &samples {
                let point = ModelPoint {
                    u: u.clone(),
                    link: l.clone(),
                    radial: 0.0,
                };
                let out = self.eval(&point)?;
                if out.radial.abs() > TOL {
                    return Ok(false); // the vertex does not reach the vertex
                }
                match &image {
                    None => image = Some(out),
                    Some(prev) => {
                        if !prev.u.iter().zip(&out.u).all(|(x, y)| close(*x, *y)) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Keys a local triple: the singular stratum whose tube carries it, plus the
/// domain and codomain chart.
pub type LocalKey = (StratumId, ChartId, ChartId);

/// Role flags of a stratified morphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MorphismKinds {
    pub embedding: bool,
    pub tube_morphism: bool,
    pub thom_mather: bool,
}

impl MorphismKinds {
    pub fn thom_mather() -> Self {
        MorphismKinds {
            embedding: false,
            tube_morphism: true,
            thom_mather: true,
        }
    }

    pub fn isomorphism() -> Self {
        MorphismKinds {
            embedding: true,
            tube_morphism: true,
            thom_mather: true,
        }
    }
}

/// A stratified morphism: structural stratum map plus local triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratMorphism {
    pub stratum_map: BTreeMap<StratumId, StratumId>,
    pub locals: BTreeMap<LocalKey, BasicModelMorphism>,
    pub kinds: MorphismKinds,
    /// For isomorphisms: the induced link isomorphism per singular stratum.
    pub link_isos: BTreeMap<StratumId, LinkIso>,
}

impl StratMorphism {
    pub fn identity(space: &PresentedSpace) -> StratMorphism {
        let mut locals = BTreeMap::new();
        let mut link_isos = BTreeMap::new();
        for (s, tube) in &space.tubes {
            let dim = space.poset.stratum(s).map(|x| x.dim).unwrap_or(0);
            let model = BasicModel::cone(dim, tube.link.clone());
            for chart in &tube.charts {
                locals.insert(
                    (s.clone(), chart.chart_id.clone(), chart.chart_id.clone()),
                    BasicModelMorphism::identity(&model),
                );
            }
            link_isos.insert(s.clone(), LinkIso::identity(tube.link.poset.ids()));
        }
        StratMorphism {
            stratum_map: space.poset.ids().map(|s| (s.clone(), s.clone())).collect(),
            locals,
            kinds: MorphismKinds::isomorphism(),
            link_isos,
        }
    }

    pub fn map(&self, id: &StratumId) -> Option<&StratumId> {
        self.stratum_map.get(id)
    }

    /// Structural and local composition `self . first`. Entries of the
    /// first map whose image has no entry in the second are dropped (they
    /// can only be bookkeeping carriers, never poset strata of a valid
    /// composable pair).
    pub fn compose(&self, first: &StratMorphism) -> Result<StratMorphism, MorphError> {
        let mut stratum_map = BTreeMap::new();
        for (a, b) in &first.stratum_map {
            if let Some(c) = self.stratum_map.get(b) {
                stratum_map.insert(a.clone(), c.clone());
            }
        }
        let mut locals = BTreeMap::new();
        for ((s, cd, cm), f_local) in &first.locals {
            let fs = match first.stratum_map.get(s) {
                Some(t) => t,
                None => continue,
            };
            for ((s2, cd2, cc), g_local) in &self.locals {
                if s2 == fs && cd2 == cm {
                    locals.insert(
                        (s.clone(), cd.clone(), cc.clone()),
                        g_local.compose(f_local)?,
                    );
                }
            }
        }
        let mut link_isos = BTreeMap::new();
        for (s, h) in &first.link_isos {
            if let Some(fs) = first.stratum_map.get(s) {
                if let Some(k) = self.link_isos.get(fs) {
                    link_isos.insert(s.clone(), k.compose(h));
                }
            }
        }
        Ok(StratMorphism {
            stratum_map,
            locals,
            kinds: MorphismKinds {
                embedding: self.kinds.embedding && first.kinds.embedding,
                tube_morphism: self.kinds.tube_morphism && first.kinds.tube_morphism,
                thom_mather: self.kinds.thom_mather && first.kinds.thom_mather,
            },
            link_isos,
        })
    }
}

/// The cocycle-form morphism `(u, [l, r]) -> (u, [g(l), r])` on a conic
/// model space, acting through the tube of `base`. The ambient strata
/// permute through the footprint when `g` permutes link strata.
pub fn cocycle_morphism(
    space: &PresentedSpace,
    base: &StratumId,
    name: &str,
    g: &LinkIso,
) -> Option<StratMorphism> {
    let tube = space.tubes.get(base)?;
    let mut stratum_map: BTreeMap<StratumId, StratumId> =
        space.poset.ids().map(|s| (s.clone(), s.clone())).collect();
    for (r, w) in &tube.footprint_map {
        let gr = g.map_stratum(r)?;
        let gw = tube.footprint_map.get(gr)?;
        stratum_map.insert(w.clone(), gw.clone());
    }
    let dim = space.poset.stratum(base).map(|x| x.dim).unwrap_or(0);
    let model = BasicModel::cone(dim, tube.link.clone());
    let mut locals = BTreeMap::new();
    for chart in &tube.charts {
        locals.insert(
            (base.clone(), chart.chart_id.clone(), chart.chart_id.clone()),
            BasicModelMorphism::cocycle_form(&model, name, g.clone()),
        );
    }
    let mut link_isos = BTreeMap::new();
    link_isos.insert(base.clone(), g.clone());
    Some(StratMorphism {
        stratum_map,
        locals,
        kinds: MorphismKinds::isomorphism(),
        link_isos,
    })
}

/// Componentwise evaluation of a triple at one point of its domain model.
pub fn eval_basic(f: &BasicModelMorphism, point: &ModelPoint) -> Result<ModelPoint, MorphError> {
    f.eval(point)
}

/// Validates a stratified morphism between two spaces, checking the layers
/// that its kind flags claim. Numeric identities hold within `1e-9`,
/// structural identities exactly.
pub fn validate_morphism(
    domain: &PresentedSpace,
    codomain: &PresentedSpace,
    dom_tm: &TMStructure,
    cod_tm: &TMStructure,
    f: &StratMorphism,
    grid: &GridSpec,
) -> Report {
    let mut report = Report::new();

    for s in domain.poset.ids() {
        match f.stratum_map.get(s) {
            None => report.push(Violation::StratumMapNotTotal { stratum: s.clone() }),
            Some(t) => {
                if !codomain.poset.contains(t) {
                    report.push(Violation::StratumMapNotTotal { stratum: t.clone() });
                }
            }
        }
    }
    for (a, b) in domain.poset.strict_pairs() {
        if let (Some(fa), Some(fb)) = (f.stratum_map.get(a), f.stratum_map.get(b)) {
            if !codomain.poset.leq(fa, fb) {
                report.push(Violation::StratumMapNotMonotone {
                    lower: a.clone(),
                    upper: b.clone(),
                });
            }
        }
    }

    if f.kinds.embedding {
        let mut seen: BTreeMap<&StratumId, &StratumId> = BTreeMap::new();
        for (s, t) in &f.stratum_map {
            if let Some(prev) = seen.insert(t, s) {
                report.push(Violation::StratumMapNotInjective {
                    stratum: prev.clone(),
                });
            }
        }
        for ((s, _, _), local) in &f.locals {
            let mut images: Vec<ModelPoint> = Vec::new();
            let mut injective = true;
            'outer: for point in local.domain.grid_points(grid) {
                match local.eval(&point) {
                    Ok(out) => {
                        if images
                            .iter()
                            .any(|p| points_agree(local.codomain.radial, p, &out, TOL))
                        {
                            injective = false;
                            break 'outer;
                        }
                        images.push(out);
                    }
                    Err(e) => {
                        report.push(Violation::VertexInconsistent {
                            stratum: s.clone(),
                            detail: e.to_string(),
                        });
                        break 'outer;
                    }
                }
            }
            // cone collapse identifies the whole vertex fiber; drop the
            // duplicates it creates before judging injectivity
            if !injective && local.domain.radial == RadialKind::Line {
                report.push(Violation::LocalsNotInvertible { stratum: s.clone() });
            }
            if !injective && local.domain.radial == RadialKind::Cone {
                // re-run ignoring r = 0 duplicates
                let mut images: Vec<ModelPoint> = Vec::new();
                let mut strict = true;
                for point in local
                    .domain
                    .grid_points(grid)
                    .into_iter()
                    .filter(|p| p.radial > 0.0)
                {
                    if let Ok(out) = local.eval(&point) {
                        if images
                            .iter()
                            .any(|p| points_agree(local.codomain.radial, p, &out, TOL))
                        {
                            strict = false;
                            break;
                        }
                        images.push(out);
                    }
                }
                if !strict {
                    report.push(Violation::LocalsNotInvertible { stratum: s.clone() });
                }
            }
        }
    }

    if f.kinds.tube_morphism || f.kinds.thom_mather {
        for ((s, _, _), local) in &f.locals {
            for point in local.domain.grid_points(grid) {
                match local.eval(&point) {
                    Ok(out) => {
                        if !close(out.radial, point.radial) {
                            report.push(Violation::RadiumNotPreserved {
                                stratum: s.clone(),
                                detail: format!(
                                    "radium {} maps to {}",
                                    point.radial, out.radial
                                ),
                            });
                            break;
                        }
                    }
                    Err(e) => {
                        report.push(Violation::RadiumNotPreserved {
                            stratum: s.clone(),
                            detail: e.to_string(),
                        });
                        break;
                    }
                }
            }
            // bundle projection: the image base may depend on u only
            let mut bases: BTreeMap<Vec<u64>, Vec<f64>> = BTreeMap::new();
            let mut projection_ok = true;
            'proj: for point in local.domain.grid_points(grid) {
                let key: Vec<u64> = point.u.iter().map(|x| x.to_bits()).collect();
                if let Ok(out) = local.eval(&point) {
                    match bases.get(&key) {
                        None => {
                            bases.insert(key, out.u);
                        }
                        Some(prev) => {
                            if !prev.iter().zip(&out.u).all(|(x, y)| close(*x, *y)) {
                                projection_ok = false;
                                break 'proj;
                            }
                        }
                    }
                }
            }
            if !projection_ok {
                report.push(Violation::BundleProjectionBroken {
                    stratum: s.clone(),
                    detail: "image base depends on (l, r)".to_string(),
                });
            }
        }
    }

    if f.kinds.thom_mather {
        let singular = domain.classify_strata().singular;
        for s in &singular {
            let Some(t) = f.stratum_map.get(s) else { continue };
            if !codomain.is_singular(t) {
                report.push(Violation::TargetNotSingular { stratum: s.clone() });
                continue;
            }
            let (Some(ts), Some(tt)) = (dom_tm.tubes.get(s), cod_tm.tubes.get(t)) else {
                continue;
            };
            let target_footprint = tt.footprint();
            for w in ts.footprint() {
                if let Some(fw) = f.stratum_map.get(&w) {
                    if !target_footprint.contains(fw) {
                        report.push(Violation::TubeNotPreserved {
                            stratum: s.clone(),
                            detail: format!("footprint stratum {w} maps outside the target tube"),
                        });
                    }
                }
            }
        }
    }

    for ((s, _, _), local) in &f.locals {
        match local.vertex_consistent(grid) {
            Ok(true) => {}
            Ok(false) => report.push(Violation::VertexInconsistent {
                stratum: s.clone(),
                detail: "image of the vertex depends on the link sample".to_string(),
            }),
            Err(e) => report.push(Violation::VertexInconsistent {
                stratum: s.clone(),
                detail: e.to_string(),
            }),
        }
    }
    report
}

/// The three commutation equations of a square of cocycle morphisms:
/// `f' . phi = phi' . f` with `phi = (u, g(l), r)` and `phi' = (u, g'(l'), r)`.
/// Real components within `1e-9`, link samples exactly.
pub fn check_cocycle_square(
    f: &BasicModelMorphism,
    f_prime: &BasicModelMorphism,
    g: &LinkIso,
    g_prime: &LinkIso,
    grid: &GridSpec,
) -> Result<bool, MorphError> {
    if f.domain != f_prime.domain || f.codomain != f_prime.codomain {
        return Err(MorphError::GridMismatch(
            "the two morphisms have different models".to_string(),
        ));
    }
    for point in f.domain.grid_points(grid) {
        let twisted = ModelPoint {
            u: point.u.clone(),
            link: g.apply(&point.link).ok_or_else(|| {
                MorphError::GridMismatch(format!("g does not cover {:?}", point.link))
            })?,
            radial: point.radial,
        };
        let lhs = f.eval(&point)?;
        let rhs = f_prime.eval(&twisted)?;
        // a1(u,l,r) = a1'(u, g(l), r)
        if !lhs.u.iter().zip(&rhs.u).all(|(x, y)| close(*x, *y)) {
            return Ok(false);
        }
        // a3(u,l,r) = a3'(u, g(l), r)
        if !close(lhs.radial, rhs.radial) {
            return Ok(false);
        }
        // g'(a2(u,l,r)) = a2'(u, g(l), r), exact on samples
        let lhs_link = g_prime.apply(&lhs.link).ok_or_else(|| {
            MorphError::GridMismatch(format!("g' does not cover {:?}", lhs.link))
        })?;
        if lhs_link != rhs.link {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pushes a Thom-Mather structure forward along a stratified isomorphism:
/// footprints through the stratum map, cocycle groups conjugated by the link
/// actions, the radium transported through the inverse.
pub fn pushforward_tubes(
    f: &StratMorphism,
    domain: &PresentedSpace,
    codomain: &PresentedSpace,
    tm: &TMStructure,
) -> Result<TMStructure, MorphError> {
    // bijectivity of the structural layer
    let mut image: BTreeSet<&StratumId> = BTreeSet::new();
    for s in domain.poset.ids() {
        let t = f
            .stratum_map
            .get(s)
            .ok_or_else(|| MorphError::NotAnIsomorphism(format!("{s} has no image")))?;
        if !codomain.poset.contains(t) || !image.insert(t) {
            return Err(MorphError::NotAnIsomorphism(format!(
                "stratum map is not a bijection at {t}"
            )));
        }
    }
    if image.len() != codomain.poset.len() {
        return Err(MorphError::NotAnIsomorphism(
            "stratum map is not onto".to_string(),
        ));
    }

    let mut tubes = BTreeMap::new();
    for (s, tube) in &tm.tubes {
        let t = &f.stratum_map[s];
        let link = codomain
            .links
            .get(t)
            .ok_or_else(|| MorphError::NotAnIsomorphism(format!("{t} has no link")))?
            .clone();
        let h = f
            .link_isos
            .get(s)
            .cloned()
            .unwrap_or_else(|| LinkIso::identity(tube.link.poset.ids()));
        let mut footprint_map = BTreeMap::new();
        for (r, w) in &tube.footprint_map {
            let hr = h.map_stratum(r).ok_or_else(|| {
                MorphError::NotAnIsomorphism(format!("link action misses {r}"))
            })?;
            let fw = f.stratum_map.get(w).ok_or_else(|| {
                MorphError::NotAnIsomorphism(format!("{w} has no image"))
            })?;
            footprint_map.insert(hr.clone(), fw.clone());
        }
        tubes.insert(
            t.clone(),
            crate::tube::Tube {
                base: t.clone(),
                link,
                charts: tube
                    .charts
                    .iter()
                    .map(|c| crate::tube::ChartRecord {
                        chart_id: c.chart_id.clone(),
                        base_stratum: t.clone(),
                        kind: c.kind,
                    })
                    .collect(),
                group: tube.group.conjugate(&h),
                transitions: tube.transitions.clone(),
                footprint_map,
                family: tube.family,
            },
        );
    }
    Ok(TMStructure {
        tubes,
        nesting: tm
            .nesting
            .iter()
            .filter_map(|(a, b)| {
                Some((f.stratum_map.get(a)?.clone(), f.stratum_map.get(b)?.clone()))
            })
            .collect(),
        families: tm
            .families
            .iter()
            .filter_map(|(s, fam)| Some((f.stratum_map.get(s)?.clone(), *fam)))
            .collect(),
    })
}

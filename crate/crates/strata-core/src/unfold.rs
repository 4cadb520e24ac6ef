//! The primary unfolding: length-many unbendings down to a smooth manifold.
//!
//! Each step removes the current minimal part; after exactly `length`
//! steps the singular part is empty. The composite projection records, for
//! every stratum of the final manifold, the words of signs and fiber hops
//! it lies over; over the regular part these are the sheets of a finite
//! trivial covering. Unfoldable charts factor the canonical cone chart as
//! the unbendable chart after the link's own composite unfolding acting on
//! the middle coordinate.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diag::{Report, Violation};
use crate::expr::Expr;
use crate::group::LinkIso;
use crate::id::{ChartId, Sign, StratumId};
use crate::iso::iso_check;
use crate::morphism::{points_agree, BasicModelMorphism, ModelPoint, RadialKind, StratMorphism};
use crate::samples::{GridSpec, LinkSample, TOL};
use crate::space::PresentedSpace;
use crate::tube::{separate_tubes, validate_tm, TMStructure};
use crate::unbend::{
    check_double_cover, check_unbending_is_tm, induced_tm_on_unbent, lift_morphism,
    space_with_tubes, unbend_space, DesingMap, ProcessingOrder, ProvTag, UnbendError,
    UnbendResult,
};
use crate::validate::validate_pseudomanifold;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnfoldError {
    #[error(transparent)]
    Unbend(#[from] UnbendError),
    #[error("the link of {0} has no unfolding available")]
    MissingLinkUnfolding(StratumId),
}

/// One step of the iterated unbending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldStep {
    pub result: UnbendResult,
    pub induced: TMStructure,
}

/// An unfoldable chart at a minimal stratum: the cone chart factored as
/// `c = c_hat . nu`, where `nu` applies the link's composite unfolding to
/// the middle coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldableChartSquare {
    pub base: StratumId,
    pub chart: ChartId,
    /// `nu = id x (link unfolding) x id`, on the unbent model.
    pub nu: BasicModelMorphism,
    /// The per-step factors of `nu`, outermost step last.
    pub nu_steps: Vec<BasicModelMorphism>,
    /// The full chart map `c = c_hat . nu`.
    pub c_full: BasicModelMorphism,
}

/// The composite of all unbending projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeDesing {
    pub source: PresentedSpace,
    pub target: PresentedSpace,
    /// Final stratum -> the (original stratum, tag word) pairs it lies
    /// over; words list the per-step tags, first step first.
    pub provenance_words: BTreeMap<StratumId, BTreeSet<(StratumId, Vec<ProvTag>)>>,
    /// Composite canonical sample projection.
    pub sample_map: BTreeMap<LinkSample, LinkSample>,
}

impl CompositeDesing {
    fn identity(space: &PresentedSpace) -> CompositeDesing {
        let id = DesingMap::identity(space);
        CompositeDesing {
            source: space.clone(),
            target: space.clone(),
            provenance_words: space
                .poset
                .ids()
                .map(|s| (s.clone(), BTreeSet::from([(s.clone(), Vec::new())])))
                .collect(),
            sample_map: id.sample_map,
        }
    }

    fn extend(&self, step: &DesingMap) -> CompositeDesing {
        let mut provenance_words = BTreeMap::new();
        for (class, pieces) in &step.provenance {
            let mut words = BTreeSet::new();
            for (mid, tag) in pieces {
                if let Some(prev) = self.provenance_words.get(mid) {
                    for (origin, word) in prev {
                        let mut w = word.clone();
                        w.push(tag.clone());
                        words.insert((origin.clone(), w));
                    }
                }
            }
            provenance_words.insert(class.clone(), words);
        }
        let sample_map = step
            .sample_map
            .iter()
            .filter_map(|(a, b)| Some((a.clone(), self.sample_map.get(b)?.clone())))
            .collect();
        CompositeDesing {
            source: step.source.clone(),
            target: self.target.clone(),
            provenance_words,
            sample_map,
        }
    }

    /// The sign words over one stratum: words whose tags are all copies,
    /// read as signs. Over a regular stratum these enumerate the covering
    /// sheets.
    pub fn sign_words(&self, target: &StratumId) -> BTreeSet<Vec<Sign>> {
        let mut out = BTreeSet::new();
        for words in self.provenance_words.values() {
            for (origin, word) in words {
                if origin != target {
                    continue;
                }
                let signs: Option<Vec<Sign>> = word
                    .iter()
                    .map(|tag| match tag {
                        ProvTag::Copy(s) => Some(*s),
                        _ => None,
                    })
                    .collect();
                if let Some(signs) = signs {
                    out.insert(signs);
                }
            }
        }
        out
    }
}

/// Result of the primary unfolding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldResult {
    pub composite: CompositeDesing,
    pub trace: Vec<UnfoldStep>,
    pub chart_squares: Vec<UnfoldableChartSquare>,
}

impl UnfoldResult {
    pub fn final_space(&self) -> &PresentedSpace {
        &self.composite.source
    }

    pub fn original(&self) -> &PresentedSpace {
        &self.composite.target
    }

    pub fn steps(&self) -> usize {
        self.trace.len()
    }
}

/// Iterates unbendings until the singular part is empty: exactly
/// `length(space)` steps, each one separated before the next.
pub fn unfold_space(
    space: &PresentedSpace,
    tm: &TMStructure,
    order: ProcessingOrder,
) -> Result<UnfoldResult, UnfoldError> {
    let mut current = space_with_tubes(space, tm);
    let mut current_tm = tm.clone();
    let mut composite = CompositeDesing::identity(space);
    let mut trace = Vec::new();
    let steps = space.length();
    for _ in 0..steps {
        let result = unbend_space(&current, &current_tm, order)?;
        let induced = induced_tm_on_unbent(&current, &current_tm, &result);
        composite = composite.extend(&result.desing);
        let next = space_with_tubes(result.space(), &induced);
        let next_tm = separate_tubes(&next, &induced);
        trace.push(UnfoldStep {
            result,
            induced: next_tm.clone(),
        });
        current = next;
        current_tm = next_tm;
    }

    // unfoldable charts for the singular strata of the original space
    let mut chart_squares = Vec::new();
    for s in &space.classify_strata().singular {
        if let Some(square) = unfoldable_chart(space, tm, s, order)? {
            chart_squares.extend(square);
        }
    }

    Ok(UnfoldResult {
        composite,
        trace,
        chart_squares,
    })
}

/// Builds the unfoldable chart squares of one singular stratum: the link is
/// unfolded recursively and its composite projection becomes the middle
/// factor `nu`. Returns one square per bundle chart of the stratum's tube.
pub fn unfoldable_chart(
    space: &PresentedSpace,
    tm: &TMStructure,
    s: &StratumId,
    order: ProcessingOrder,
) -> Result<Option<Vec<UnfoldableChartSquare>>, UnfoldError> {
    let Some(tube) = tm.tubes.get(s) else {
        return Err(UnfoldError::MissingLinkUnfolding(s.clone()));
    };
    let link = &tube.link;
    let base_dim = space.poset.stratum(s).map(|x| x.dim).unwrap_or(0);
    let link_tm = separate_tubes(link, &TMStructure::canonical(link));
    let link_unfold = unfold_space(link, &link_tm, order)?;

    let final_link = link_unfold.final_space().clone();
    let composite_action = sample_map_action(&link_unfold.composite.sample_map);
    let nu = middle_factor(base_dim, &final_link, link, "unfolding", &composite_action);
    // factors nu_j = id x eta_j x id, listed first step first
    let nu_steps: Vec<BasicModelMorphism> = link_unfold
        .trace
        .iter()
        .enumerate()
        .map(|(j, step)| {
            let action = sample_map_action(&step.result.desing.sample_map);
            middle_factor(
                base_dim,
                &upstream_space(&link_unfold, j),
                step.result.target(),
                &format!("step{j}"),
                &action,
            )
        })
        .collect();
    let c_hat = crate::unbend::unbend_chart(base_dim, link);
    let c_full = c_hat.compose(&nu).map_err(UnbendError::from)?;
    Ok(Some(
        tube.charts
            .iter()
            .map(|chart| UnfoldableChartSquare {
                base: s.clone(),
                chart: chart.chart_id.clone(),
                nu: nu.clone(),
                nu_steps: nu_steps.clone(),
                c_full: c_full.clone(),
            })
            .collect(),
    ))
}

fn upstream_space(unfold: &UnfoldResult, j: usize) -> PresentedSpace {
    unfold
        .trace
        .get(j)
        .map(|step| step.result.space().clone())
        .unwrap_or_else(|| unfold.final_space().clone())
}

/// Wraps a sample projection into a constant link action.
fn sample_map_action(sample_map: &BTreeMap<LinkSample, LinkSample>) -> LinkIso {
    let mut stratum_map = BTreeMap::new();
    let mut sample_perms: BTreeMap<StratumId, Vec<u8>> = BTreeMap::new();
    for (a, b) in sample_map {
        stratum_map.insert(a.stratum.clone(), b.stratum.clone());
        sample_perms
            .entry(a.stratum.clone())
            .or_insert_with(|| vec![0; crate::samples::LINK_SAMPLES as usize])[a.index as usize] =
            b.index;
    }
    LinkIso {
        stratum_map,
        sample_perms,
        link_actions: BTreeMap::new(),
    }
    
}

/// `id_U x action x id_R` on unbent models.
fn middle_factor(
    base_dim: u32,
    domain_link: &PresentedSpace,
    codomain_link: &PresentedSpace,
    name: &str,
    action: &LinkIso,
) -> BasicModelMorphism {
    let mut actions = BTreeMap::new();
    actions.insert(name.to_string(), action.clone());
    BasicModelMorphism {
        domain: crate::morphism::BasicModel::line(base_dim, domain_link.clone()),
        codomain: crate::morphism::BasicModel::line(base_dim, codomain_link.clone()),
        a1: Expr::identity_base(base_dim),
        a2: Expr::apply(name, Expr::L),
        a3: Expr::T,
        actions,
    }
}

/// Verifies an unfoldable chart square on the grid: the full chart map must
/// agree with the unbendable chart applied after the step factors, and must
/// be even in `t`.
pub fn check_unfoldable_chart(square: &UnfoldableChartSquare, grid: &GridSpec) -> Report {
    let mut report = Report::new();
    // compose the declared step factors
    // the last step's factor applies first: nu = nu_1 . nu_2 . ... . nu_p
    let mut composed: Option<BasicModelMorphism> = None;
    for factor in &square.nu_steps {
        composed = Some(match composed {
            None => factor.clone(),
            Some(prev) => match prev.compose(factor) {
                Ok(c) => c,
                Err(e) => {
                    report.push(Violation::SquareNotCommuting {
                        context: format!("unfoldable chart at {}", square.base),
                        detail: format!("step factors do not compose: {e}"),
                    });
                    return report;
                }
            },
        });
    }
    for point in square.c_full.domain.grid_points(grid) {
        let direct = match square.c_full.eval(&point) {
            Ok(p) => p,
            Err(e) => {
                report.push(Violation::SquareNotCommuting {
                    context: format!("unfoldable chart at {}", square.base),
                    detail: e.to_string(),
                });
                return report;
            }
        };
        if let Some(chain) = &composed {
            let through = chain.eval(&point).and_then(|mid| {
                crate::unbend::unbend_chart(
                    square.c_full.domain.base_dim,
                    &chain.codomain.link,
                )
                .eval(&mid)
            });
            match through {
                Ok(p) => {
                    if !points_agree(RadialKind::Cone, &direct, &p, TOL) {
                        report.push(Violation::SquareNotCommuting {
                            context: format!("unfoldable chart at {}", square.base),
                            detail: format!(
                                "direct and step-factored paths disagree at t = {}",
                                point.radial
                            ),
                        });
                        return report;
                    }
                }
                Err(e) => {
                    report.push(Violation::SquareNotCommuting {
                        context: format!("unfoldable chart at {}", square.base),
                        detail: e.to_string(),
                    });
                    return report;
                }
            }
        }
        let mirrored = ModelPoint {
            radial: -point.radial,
            ..point.clone()
        };
        match square.c_full.eval(&mirrored) {
            Ok(p) => {
                if !points_agree(RadialKind::Cone, &direct, &p, 0.0) {
                    report.push(Violation::SquareNotCommuting {
                        context: format!("unfoldable chart at {}", square.base),
                        detail: "chart map is not even in t".into(),
                    });
                    return report;
                }
            }
            Err(e) => {
                report.push(Violation::SquareNotCommuting {
                    context: format!("unfoldable chart at {}", square.base),
                    detail: e.to_string(),
                });
                return report;
            }
        }
    }
    report
}

/// Lifts a Thom-Mather morphism to the primary unfoldings, iterating
/// `max(length, length')` times and padding the exhausted side with
/// identity unbendings. Sign-preserving lifts throughout.
pub fn lift_to_unfolding(
    f: &StratMorphism,
    dom: &UnfoldResult,
    cod: &UnfoldResult,
    grid: &GridSpec,
) -> Result<StratMorphism, UnfoldError> {
    let n = dom.steps().max(cod.steps());
    let mut lifted = f.clone();
    for k in 0..n {
        let dom_step = step_or_identity(dom, k);
        let cod_step = step_or_identity(cod, k);
        lifted = lift_morphism(&lifted, Sign::Plus, &dom_step, &cod_step, grid)?;
    }
    Ok(lifted)
}

fn step_or_identity(unfold: &UnfoldResult, k: usize) -> UnbendResult {
    unfold.trace.get(k).map(|s| s.result.clone()).unwrap_or_else(|| {
        UnbendResult {
            desing: DesingMap::identity(unfold.final_space()),
            unbent_tubes: Vec::new(),
        }
    })
}

/// One space of a harness corpus.
#[derive(Debug, Clone)]
pub struct HarnessSpace {
    pub name: String,
    pub space: PresentedSpace,
    pub tm: TMStructure,
}

/// One morphism of a harness corpus, with the indices of its domain and
/// codomain spaces.
#[derive(Debug, Clone)]
pub struct HarnessMorphism {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
    pub morphism: StratMorphism,
}

/// A corpus for the functor harness: spaces, morphisms between them, and
/// the composable pairs `(g, f)` to test, `g` after `f`.
#[derive(Debug, Clone, Default)]
pub struct HarnessCorpus {
    pub spaces: Vec<HarnessSpace>,
    pub morphisms: Vec<HarnessMorphism>,
    pub pairs: Vec<(usize, usize)>,
}

/// One law verdict of the harness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawResult {
    pub law: String,
    pub member: String,
    pub passed: bool,
    pub detail: String,
}

/// Checks the functor laws over a corpus: lifted identities stay
/// identities, lifts of compositions are compositions of lifts (one
/// unbending step and the full unfolding alike), and unbendings and
/// unfoldings computed in both processing orders are isomorphic. Non
/// Thom-Mather morphisms are excluded from the composition laws with the
/// reason recorded.
pub fn functor_harness(corpus: &HarnessCorpus, grid: &GridSpec) -> Vec<LawResult> {
    let mut results = Vec::new();
    let mut unbends = Vec::new();
    let mut unfolds = Vec::new();
    for entry in &corpus.spaces {
        let unbend = unbend_space(&entry.space, &entry.tm, ProcessingOrder::Canonical);
        let unfold = unfold_space(&entry.space, &entry.tm, ProcessingOrder::Canonical);
        unbends.push(unbend);
        unfolds.push(unfold);
    }

    for (i, entry) in corpus.spaces.iter().enumerate() {
        let member = entry.name.clone();
        let (Ok(unbend), Ok(unfold)) = (&unbends[i], &unfolds[i]) else {
            results.push(LawResult {
                law: "construction".into(),
                member,
                passed: false,
                detail: "unbending or unfolding failed".into(),
            });
            continue;
        };

        // identity law, one step
        let id = StratMorphism::identity(&entry.space);
        let lifted = lift_morphism(&id, Sign::Plus, unbend, unbend, grid);
        let passed = match &lifted {
            Ok(l) => unbend
                .space()
                .poset
                .ids()
                .all(|c| l.stratum_map.get(c) == Some(c)),
            Err(_) => false,
        };
        results.push(LawResult {
            law: "lift-identity".into(),
            member: member.clone(),
            passed,
            detail: String::new(),
        });

        // identity law, full unfolding
        let tilde = lift_to_unfolding(&id, unfold, unfold, grid);
        let passed = match &tilde {
            Ok(l) => unfold
                .final_space()
                .poset
                .ids()
                .all(|c| l.stratum_map.get(c) == Some(c)),
            Err(_) => false,
        };
        results.push(LawResult {
            law: "unfold-identity".into(),
            member: member.clone(),
            passed,
            detail: String::new(),
        });

        // uniqueness: both processing orders give isomorphic results
        let reversed_unbend = unbend_space(&entry.space, &entry.tm, ProcessingOrder::Reversed);
        let passed = matches!(&reversed_unbend, Ok(r) if iso_check(unbend.space(), r.space()).is_some());
        results.push(LawResult {
            law: "uniqueness-unbend".into(),
            member: member.clone(),
            passed,
            detail: String::new(),
        });
        let reversed_unfold = unfold_space(&entry.space, &entry.tm, ProcessingOrder::Reversed);
        let passed = matches!(
            &reversed_unfold,
            Ok(r) if r.steps() == unfold.steps()
                && iso_check(unfold.final_space(), r.final_space()).is_some()
        );
        results.push(LawResult {
            law: "uniqueness-unfold".into(),
            member,
            passed,
            detail: String::new(),
        });
    }

    for (gi, fi) in &corpus.pairs {
        let g = &corpus.morphisms[*gi];
        let f = &corpus.morphisms[*fi];
        let member = format!("{} . {}", g.name, f.name);
        if f.cod != g.dom {
            results.push(LawResult {
                law: "composition".into(),
                member,
                passed: false,
                detail: "pair is not composable".into(),
            });
            continue;
        }
        if !g.morphism.kinds.thom_mather || !f.morphism.kinds.thom_mather {
            results.push(LawResult {
                law: "composition-excluded".into(),
                member,
                passed: true,
                detail: "NotThomMather".into(),
            });
            continue;
        }
        let (Ok(dom_ub), Ok(mid_ub), Ok(cod_ub)) =
            (&unbends[f.dom], &unbends[f.cod], &unbends[g.cod])
        else {
            continue;
        };
        let composed = match g.morphism.compose(&f.morphism) {
            Ok(c) => c,
            Err(e) => {
                results.push(LawResult {
                    law: "composition".into(),
                    member,
                    passed: false,
                    detail: e.to_string(),
                });
                continue;
            }
        };
        // one unbending step
        let lifted_pair = lift_morphism(&f.morphism, Sign::Plus, dom_ub, mid_ub, grid).and_then(
            |f_hat| {
                let g_hat = lift_morphism(&g.morphism, Sign::Plus, mid_ub, cod_ub, grid)?;
                Ok((f_hat, g_hat))
            },
        );
        let lifted_comp = lift_morphism(&composed, Sign::Plus, dom_ub, cod_ub, grid);
        let (passed, detail) = match (&lifted_pair, &lifted_comp) {
            (Ok((f_hat, g_hat)), Ok(gf_hat)) => match g_hat.compose(f_hat) {
                Ok(chain) => morphisms_match(dom_ub.space(), gf_hat, &chain, grid, 2.0 * TOL),
                Err(e) => (false, e.to_string()),
            },
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        results.push(LawResult {
            law: "composition".into(),
            member: member.clone(),
            passed,
            detail,
        });

        // full unfolding with padding
        let (Ok(dom_uf), Ok(mid_uf), Ok(cod_uf)) =
            (&unfolds[f.dom], &unfolds[f.cod], &unfolds[g.cod])
        else {
            continue;
        };
        let tilde_pair = lift_to_unfolding(&f.morphism, dom_uf, mid_uf, grid).and_then(|ft| {
            let gt = lift_to_unfolding(&g.morphism, mid_uf, cod_uf, grid)?;
            Ok((ft, gt))
        });
        let tilde_comp = lift_to_unfolding(&composed, dom_uf, cod_uf, grid);
        let (passed, detail) = match (&tilde_pair, &tilde_comp) {
            (Ok((ft, gt)), Ok(gft)) => match gt.compose(ft) {
                Ok(chain) => {
                    morphisms_match(dom_uf.final_space(), gft, &chain, grid, 2.0 * TOL)
                }
                Err(e) => (false, e.to_string()),
            },
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        results.push(LawResult {
            law: "unfold-composition".into(),
            member,
            passed,
            detail,
        });
    }
    results
}

/// Structural equality on the domain strata plus grid agreement of the
/// lifted local triples.
pub fn morphisms_match(
    domain: &PresentedSpace,
    a: &StratMorphism,
    b: &StratMorphism,
    grid: &GridSpec,
    tol: f64,
) -> (bool, String) {
    for s in domain.poset.ids() {
        if a.stratum_map.get(s) != b.stratum_map.get(s) {
            return (
                false,
                format!(
                    "stratum maps differ at {s}: {:?} vs {:?}",
                    a.stratum_map.get(s),
                    b.stratum_map.get(s)
                ),
            );
        }
    }
    let line_keys: BTreeSet<_> = a
        .locals
        .iter()
        .chain(b.locals.iter())
        .filter(|(_, l)| l.domain.radial == RadialKind::Line)
        .map(|(k, _)| k.clone())
        .collect();
    for key in line_keys {
        match (a.locals.get(&key), b.locals.get(&key)) {
            (Some(la), Some(lb)) => match la.agrees_with(lb, grid, tol) {
                Ok(true) => {}
                Ok(false) => {
                    return (false, format!("locals disagree at {}", key.0));
                }
                Err(e) => return (false, e.to_string()),
            },
            _ => return (false, format!("local triple missing at {}", key.0)),
        }
    }
    (true, String::new())
}

/// Full per-space verification used by the acceptance harness and the CLI:
/// length decrement, double cover, termination and flatness, commuting
/// squares, the radium law and uniqueness, on one space.
pub fn check_space_laws(
    space: &PresentedSpace,
    tm: &TMStructure,
    grid: &GridSpec,
) -> Report {
    let mut report = Report::new();
    report.merge(validate_pseudomanifold(space));
    report.merge(validate_tm(space, tm));
    if !report.is_clean() {
        return report;
    }

    let p = space.length();
    let unbend = match unbend_space(space, tm, ProcessingOrder::Canonical) {
        Ok(r) => r,
        Err(e) => {
            report.push(Violation::LawBroken {
                law: "unbend".into(),
                member: String::new(),
                detail: e.to_string(),
            });
            return report;
        }
    };
    if p > 0 {
        let got = unbend.space().length();
        if got + 1 != p {
            report.push(Violation::LengthNotDecremented {
                expected: p - 1,
                actual: got,
            });
        }
        let induced = induced_tm_on_unbent(space, tm, &unbend);
        report.merge(check_double_cover(&unbend));
        report.merge(check_unbending_is_tm(space, tm, &unbend, &induced, grid));
        let next = space_with_tubes(unbend.space(), &induced);
        report.merge(validate_pseudomanifold(&next));
        report.merge(validate_tm(&next, &separate_tubes(&next, &induced)));
    }

    match unfold_space(space, tm, ProcessingOrder::Canonical) {
        Ok(unfold) => {
            if unfold.steps() != p as usize {
                report.push(Violation::LawBroken {
                    law: "termination".into(),
                    member: String::new(),
                    detail: format!("{} steps for length {p}", unfold.steps()),
                });
            }
            let final_space = unfold.final_space();
            if !final_space.classify_strata().singular.is_empty() {
                report.push(Violation::LawBroken {
                    law: "flatness".into(),
                    member: String::new(),
                    detail: "final singular part is not empty".into(),
                });
            }
            for step in &unfold.trace {
                report.merge(check_double_cover(&step.result));
            }
            for square in &unfold.chart_squares {
                report.merge(check_unfoldable_chart(square, grid));
            }
            // covering sheets over every regular stratum: nonempty sign
            // word sets of length p
            for w in space.classify_strata().regular {
                let words = unfold.composite.sign_words(&w);
                if words.is_empty() || words.iter().any(|word| word.len() != p as usize) {
                    report.push(Violation::LawBroken {
                        law: "covering".into(),
                        member: w.to_string(),
                        detail: format!("sign words {words:?}"),
                    });
                }
            }
            match unfold_space(space, tm, ProcessingOrder::Reversed) {
                Ok(rev) => {
                    if iso_check(final_space, rev.final_space()).is_none() {
                        report.push(Violation::LawBroken {
                            law: "uniqueness".into(),
                            member: String::new(),
                            detail: "reversed-order unfolding is not isomorphic".into(),
                        });
                    }
                }
                Err(e) => report.push(Violation::LawBroken {
                    law: "uniqueness".into(),
                    member: String::new(),
                    detail: e.to_string(),
                }),
            }
        }
        Err(e) => report.push(Violation::LawBroken {
            law: "unfold".into(),
            member: String::new(),
            detail: e.to_string(),
        }),
    }
    report
}

//! Symbolic stratified spaces and their normal form.
//!
//! A space is described by an expression (smooth piece, product, cone,
//! disjoint union) or authored directly in presented form. The normal form
//! is a stratum poset plus, for each singular stratum, a link (itself a
//! presented space) and a tube. Suspensions are provided as a presented-level
//! builder: they are the compact spaces of positive length that cones and
//! products cannot reach, and they make good links.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::id::{StratumId, Token};
use crate::poset::{PosetError, StratPoset, Stratum};
use crate::tube::Tube;

/// An opaque smooth manifold factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothFactor {
    pub label: String,
    pub dim: u32,
    pub compact: bool,
}

impl SmoothFactor {
    pub fn new(label: &str, dim: u32, compact: bool) -> Self {
        SmoothFactor {
            label: label.to_string(),
            dim,
            compact,
        }
    }
}

/// Recursive symbolic description of a stratified space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StratSpaceExpr {
    Smooth(SmoothFactor),
    Product(SmoothFactor, Box<StratSpaceExpr>),
    Cone(Box<StratSpaceExpr>),
    Disjoint(Vec<StratSpaceExpr>),
}

impl StratSpaceExpr {
    pub fn smooth(label: &str, dim: u32, compact: bool) -> Self {
        StratSpaceExpr::Smooth(SmoothFactor::new(label, dim, compact))
    }

    pub fn cone(inner: StratSpaceExpr) -> Self {
        StratSpaceExpr::Cone(Box::new(inner))
    }

    pub fn product(factor: SmoothFactor, inner: StratSpaceExpr) -> Self {
        StratSpaceExpr::Product(factor, Box::new(inner))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("cone over a non-compact space")]
    ConeOverNonCompact,
    #[error("suspension of a non-compact space")]
    SuspensionOverNonCompact,
    #[error("disjoint union of nothing")]
    EmptyDisjoint,
    #[error("unknown stratum {0}")]
    UnknownStratum(StratumId),
    #[error("not a maximal strict chain: {0}")]
    NotAChain(String),
    #[error("order construction failed: {0}")]
    Order(#[from] PosetError),
}

/// Normal form of a stratified space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PresentedSpace {
    pub poset: StratPoset,
    /// Link of each singular stratum.
    pub links: BTreeMap<StratumId, PresentedSpace>,
    /// Tubular neighborhood of each singular stratum, when present.
    pub tubes: BTreeMap<StratumId, Tube>,
    pub compact: bool,
    pub dim: u32,
}

/// Output of [`classify_strata`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub regular: BTreeSet<StratumId>,
    pub singular: BTreeSet<StratumId>,
    pub minimal: BTreeSet<StratumId>,
}

/// Output of [`poset_query`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetQuery {
    pub closure: BTreeSet<StratumId>,
    pub incidence_neighborhood: BTreeSet<StratumId>,
}

impl PresentedSpace {
    /// Length: the longest strict incidence chain, in steps.
    pub fn length(&self) -> u32 {
        self.poset.length()
    }

    /// Longest strict chain above one stratum, in steps.
    pub fn stratum_length(&self, id: &StratumId) -> Result<u32, SpaceError> {
        if !self.poset.contains(id) {
            return Err(SpaceError::UnknownStratum(id.clone()));
        }
        Ok(self.poset.height_above(id))
    }

    /// Regular = open = maximal strata; singular the rest; minimal = closed.
    pub fn classify_strata(&self) -> Classification {
        let maxima = self.poset.maxima();
        let singular = self
            .poset
            .ids()
            .filter(|s| !maxima.contains(s))
            .cloned()
            .collect();
        Classification {
            regular: maxima,
            singular,
            minimal: self.poset.minima(),
        }
    }

    pub fn is_singular(&self, id: &StratumId) -> bool {
        self.poset.ids().any(|t| self.poset.lt(id, t))
    }

    /// The minimal part that unbending removes: minimal strata that are
    /// singular. A stratum that is both minimal and maximal is a closed
    /// regular component and is doubled like the rest of the regular part.
    pub fn min_strata(&self) -> BTreeSet<StratumId> {
        let maxima = self.poset.maxima();
        self.poset
            .minima()
            .into_iter()
            .filter(|s| !maxima.contains(s))
            .collect()
    }

    pub fn poset_query(&self, id: &StratumId) -> Result<PosetQuery, SpaceError> {
        if !self.poset.contains(id) {
            return Err(SpaceError::UnknownStratum(id.clone()));
        }
        Ok(PosetQuery {
            closure: self.poset.closure(id),
            incidence_neighborhood: self.poset.up_set(id),
        })
    }

    /// Applies a renaming to every stratum id of this space (not its links).
    fn map_ids(&self, rename: &impl Fn(&StratumId) -> StratumId) -> PresentedSpace {
        let mut poset = StratPoset::new();
        for s in self.poset.strata() {
            poset.insert(Stratum {
                id: rename(&s.id),
                dim: s.dim,
                label: s.label.clone(),
            });
        }
        let strata: Vec<Stratum> = poset.strata().cloned().collect();
        let pairs: Vec<(StratumId, StratumId)> = self
            .poset
            .strict_pairs()
            .map(|(a, b)| (rename(a), rename(b)))
            .collect();
        PresentedSpace {
            poset: StratPoset::from_pairs(strata, &pairs).expect("renaming preserves order"),
            links: self
                .links
                .iter()
                .map(|(id, l)| (rename(id), l.clone()))
                .collect(),
            tubes: self
                .tubes
                .iter()
                .map(|(id, t)| (rename(id), t.map_ambient(rename)))
                .collect(),
            compact: self.compact,
            dim: self.dim,
        }
    }
}

/// A 0-length space: one stratum, no links, no tubes.
pub fn smooth_space(factor: &SmoothFactor) -> PresentedSpace {
    let id = StratumId::atom(&factor.label);
    let mut poset = StratPoset::new();
    poset.insert(Stratum {
        id,
        dim: factor.dim,
        label: factor.label.clone(),
    });
    PresentedSpace {
        poset,
        links: BTreeMap::new(),
        tubes: BTreeMap::new(),
        compact: factor.compact,
        dim: factor.dim,
    }
}

/// The open cone over a compact space: one vertex below one stratum per
/// link stratum. The vertex gets the canonical tube whose footprint is the
/// whole cone; deeper tubes are carried up from the link.
pub fn cone_over(link: &PresentedSpace) -> Result<PresentedSpace, SpaceError> {
    if !link.compact {
        return Err(SpaceError::ConeOverNonCompact);
    }
    let vertex = StratumId::vertex();
    let mut strata = vec![Stratum {
        id: vertex.clone(),
        dim: 0,
        label: "v".to_string(),
    }];
    let mut pairs = Vec::new();
    for s in link.poset.strata() {
        let body = StratumId::body(&s.id);
        strata.push(Stratum {
            id: body.clone(),
            dim: s.dim + 1,
            label: format!("{}x(0,1)", s.label),
        });
        pairs.push((vertex.clone(), body.clone()));
    }
    for (a, b) in link.poset.strict_pairs() {
        pairs.push((StratumId::body(a), StratumId::body(b)));
    }
    let poset = StratPoset::from_pairs(strata, &pairs)?;

    let mut links = BTreeMap::new();
    let mut tubes = BTreeMap::new();
    links.insert(vertex.clone(), link.clone());
    let vertex_footprint: BTreeMap<StratumId, StratumId> = link
        .poset
        .ids()
        .map(|s| (s.clone(), StratumId::body(s)))
        .collect();
    tubes.insert(
        vertex.clone(),
        Tube::canonical(vertex, link.clone(), vertex_footprint),
    );
    for (s, deeper) in &link.links {
        links.insert(StratumId::body(s), deeper.clone());
    }
    for (s, tube) in &link.tubes {
        tubes.insert(StratumId::body(s), tube.map_ambient(&StratumId::body));
    }
    Ok(PresentedSpace {
        poset,
        links,
        tubes,
        compact: false,
        dim: link.dim + 1,
    })
}

/// The suspension of a compact space: two poles, each the cone point of a
/// cone over the whole space, joined through swept strata. Compact, and one
/// length higher, so suspensions serve as links of arbitrary length.
pub fn suspend(link: &PresentedSpace) -> Result<PresentedSpace, SpaceError> {
    if !link.compact {
        return Err(SpaceError::SuspensionOverNonCompact);
    }
    let poles = [StratumId::pole(true), StratumId::pole(false)];
    let mut strata: Vec<Stratum> = poles
        .iter()
        .enumerate()
        .map(|(i, id)| Stratum {
            id: id.clone(),
            dim: 0,
            label: if i == 0 { "p+" } else { "p-" }.to_string(),
        })
        .collect();
    let mut pairs = Vec::new();
    for s in link.poset.strata() {
        let swept = StratumId::swept(&s.id);
        strata.push(Stratum {
            id: swept.clone(),
            dim: s.dim + 1,
            label: format!("{}x(-1,1)", s.label),
        });
        for pole in &poles {
            pairs.push((pole.clone(), swept.clone()));
        }
    }
    for (a, b) in link.poset.strict_pairs() {
        pairs.push((StratumId::swept(a), StratumId::swept(b)));
    }
    let poset = StratPoset::from_pairs(strata, &pairs)?;

    let mut links = BTreeMap::new();
    let mut tubes = BTreeMap::new();
    for pole in &poles {
        links.insert(pole.clone(), link.clone());
        let footprint: BTreeMap<StratumId, StratumId> = link
            .poset
            .ids()
            .map(|s| (s.clone(), StratumId::swept(s)))
            .collect();
        tubes.insert(
            pole.clone(),
            Tube::canonical(pole.clone(), link.clone(), footprint),
        );
    }
    for (s, deeper) in &link.links {
        links.insert(StratumId::swept(s), deeper.clone());
    }
    for (s, tube) in &link.tubes {
        tubes.insert(StratumId::swept(s), tube.map_ambient(&StratumId::swept));
    }
    Ok(PresentedSpace {
        poset,
        links,
        tubes,
        compact: true,
        dim: link.dim + 1,
    })
}

/// Product with a smooth factor on the left.
pub fn product_smooth(factor: &SmoothFactor, space: &PresentedSpace) -> PresentedSpace {
    let head = Token::Times(crate::id::sanitize_label(&factor.label));
    let rename = |id: &StratumId| id.prefixed(head.clone());
    let mut out = space.map_ids(&rename);
    let mut poset = StratPoset::new();
    for s in out.poset.strata() {
        poset.insert(Stratum {
            id: s.id.clone(),
            dim: s.dim + factor.dim,
            label: format!("{}x{}", factor.label, s.label),
        });
    }
    let strata: Vec<Stratum> = poset.strata().cloned().collect();
    let pairs: Vec<(StratumId, StratumId)> = out.poset.strict_pairs().map(|(a, b)| (a.clone(), b.clone())).collect();
    out.poset = StratPoset::from_pairs(strata, &pairs).expect("product preserves order");
    out.compact = factor.compact && space.compact;
    out.dim = factor.dim + space.dim;
    out
}

/// Disjoint union; links are untouched, ids get a component prefix.
pub fn disjoint(parts: Vec<PresentedSpace>) -> Result<PresentedSpace, SpaceError> {
    if parts.is_empty() {
        return Err(SpaceError::EmptyDisjoint);
    }
    let mut poset = StratPoset::new();
    let mut pairs = Vec::new();
    let mut links = BTreeMap::new();
    let mut tubes = BTreeMap::new();
    let mut compact = true;
    let mut dim = 0;
    for (k, part) in parts.iter().enumerate() {
        let head = Token::Part(k as u32);
        let rename = |id: &StratumId| id.prefixed(head.clone());
        let renamed = part.map_ids(&rename);
        for s in renamed.poset.strata() {
            poset.insert(s.clone());
        }
        pairs.extend(renamed.poset.strict_pairs().map(|(a, b)| (a.clone(), b.clone())));
        links.extend(renamed.links);
        tubes.extend(renamed.tubes);
        compact &= part.compact;
        dim = dim.max(part.dim);
    }
    let strata: Vec<Stratum> = poset.strata().cloned().collect();
    Ok(PresentedSpace {
        poset: StratPoset::from_pairs(strata, &pairs)?,
        links,
        tubes,
        compact,
        dim,
    })
}

/// Normalizes an expression to its presented space.
pub fn present(expr: &StratSpaceExpr) -> Result<PresentedSpace, SpaceError> {
    match expr {
        StratSpaceExpr::Smooth(factor) => Ok(smooth_space(factor)),
        StratSpaceExpr::Product(factor, inner) => {
            Ok(product_smooth(factor, &present(inner)?))
        }
        StratSpaceExpr::Cone(inner) => cone_over(&present(inner)?),
        StratSpaceExpr::Disjoint(list) => {
            let parts = list.iter().map(present).collect::<Result<Vec<_>, _>>()?;
            disjoint(parts)
        }
    }
}

/// The product `X x R`: every stratum one dimension up, never compact.
/// This is the normal form that the unbending of `U x c(L)` matches.
pub fn line_product(space: &PresentedSpace) -> PresentedSpace {
    product_smooth(&SmoothFactor::new("R", 1, false), space)
}

/// Restriction of the space to a maximal strict chain, with the links
/// localized along the chain through the tube footprints. The compactness
/// flag is inherited: localization models the germ of the chain, not a
/// subspace with its own point-set properties.
pub fn localize(space: &PresentedSpace, chain: &[StratumId]) -> Result<PresentedSpace, SpaceError> {
    if chain.is_empty() {
        return Err(SpaceError::NotAChain("empty chain".to_string()));
    }
    for id in chain {
        if !space.poset.contains(id) {
            return Err(SpaceError::UnknownStratum(id.clone()));
        }
    }
    for pair in chain.windows(2) {
        if !space.poset.lt(&pair[0], &pair[1]) {
            return Err(SpaceError::NotAChain(format!(
                "{} is not strictly below {}",
                pair[0], pair[1]
            )));
        }
        if space
            .poset
            .ids()
            .any(|c| space.poset.lt(&pair[0], c) && space.poset.lt(c, &pair[1]))
        {
            return Err(SpaceError::NotAChain(format!(
                "chain skips a stratum between {} and {}",
                pair[0], pair[1]
            )));
        }
    }
    if space.poset.ids().any(|c| space.poset.lt(c, &chain[0])) {
        return Err(SpaceError::NotAChain("chain does not start minimal".into()));
    }
    if space
        .poset
        .ids()
        .any(|c| space.poset.lt(chain.last().unwrap(), c))
    {
        return Err(SpaceError::NotAChain("chain does not end maximal".into()));
    }

    let keep: BTreeSet<StratumId> = chain.iter().cloned().collect();
    let poset = space.poset.restrict(&keep);
    let mut links = BTreeMap::new();
    let mut tubes = BTreeMap::new();
    for (k, id) in chain.iter().enumerate() {
        if k + 1 == chain.len() {
            break; // top stratum is regular in the localized space
        }
        let link = space
            .links
            .get(id)
            .ok_or_else(|| SpaceError::NotAChain(format!("{id} has no link")))?;
        let tube = space
            .tubes
            .get(id)
            .ok_or_else(|| SpaceError::NotAChain(format!("{id} has no tube")))?;
        // the part of the link lying over the tail of the chain
        let mut link_chain = Vec::new();
        for upper in &chain[k + 1..] {
            let preimage: Vec<&StratumId> = tube
                .footprint_map
                .iter()
                .filter(|(_, w)| *w == upper)
                .map(|(r, _)| r)
                .collect();
            match preimage.as_slice() {
                [r] => link_chain.push((*r).clone()),
                [] => {
                    return Err(SpaceError::NotAChain(format!(
                        "tube of {id} does not reach {upper}"
                    )))
                }
                _ => {
                    return Err(SpaceError::NotAChain(format!(
                        "tube of {id} reaches {upper} twice"
                    )))
                }
            }
        }
        let localized_link = localize(link, &link_chain)?;
        let kept_link: BTreeSet<StratumId> = link_chain.iter().cloned().collect();
        let restricted_tube = Tube {
            base: id.clone(),
            link: localized_link.clone(),
            footprint_map: tube
                .footprint_map
                .iter()
                .filter(|(r, _)| kept_link.contains(r))
                .map(|(r, w)| (r.clone(), w.clone()))
                .collect(),
            ..tube.clone()
        };
        links.insert(id.clone(), localized_link);
        tubes.insert(id.clone(), restricted_tube);
    }
    let dim = poset.strata().map(|s| s.dim).max().unwrap_or(0);
    Ok(PresentedSpace {
        poset,
        links,
        tubes,
        compact: space.compact,
        dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> PresentedSpace {
        smooth_space(&SmoothFactor::new("S1", 1, true))
    }

    #[test]
    fn smooth_presentation() {
        let m = smooth_space(&SmoothFactor::new("M", 2, true));
        assert_eq!(m.poset.len(), 1);
        assert_eq!(m.dim, 2);
        assert_eq!(m.length(), 0);
    }

    #[test]
    fn cone_over_circle() {
        let c = cone_over(&s1()).unwrap();
        assert_eq!(c.poset.len(), 2);
        assert!(!c.compact);
        assert_eq!(c.dim, 2);
        assert_eq!(c.length(), 1);
        let v = StratumId::vertex();
        let body = StratumId::body(&StratumId::atom("S1"));
        assert!(c.poset.lt(&v, &body));
        assert_eq!(c.poset.stratum(&v).unwrap().dim, 0);
        assert_eq!(c.poset.stratum(&body).unwrap().dim, 2);
        assert!(c.tubes.contains_key(&v));
        assert_eq!(c.links[&v], s1());
    }

    #[test]
    fn cone_requires_compact_argument() {
        let u = smooth_space(&SmoothFactor::new("U", 1, false));
        assert_eq!(cone_over(&u).unwrap_err(), SpaceError::ConeOverNonCompact);
        // and a cone is itself never compact, so cones do not stack
        let c = cone_over(&s1()).unwrap();
        assert_eq!(cone_over(&c).unwrap_err(), SpaceError::ConeOverNonCompact);
    }

    #[test]
    fn product_prepends_dimension() {
        let p = product_smooth(
            &SmoothFactor::new("U", 1, false),
            &cone_over(&s1()).unwrap(),
        );
        assert_eq!(p.poset.len(), 2);
        assert_eq!(p.length(), 1);
        assert_eq!(p.dim, 3);
        let dims: BTreeSet<u32> = p.poset.strata().map(|s| s.dim).collect();
        assert_eq!(dims, BTreeSet::from([1, 3]));
    }

    #[test]
    fn suspension_is_compact_and_one_longer() {
        let sigma = suspend(&s1()).unwrap();
        assert!(sigma.compact);
        assert_eq!(sigma.length(), 1);
        assert_eq!(sigma.poset.len(), 3);
        assert_eq!(sigma.min_strata().len(), 2);
        // length-2 compact link for the deep fixtures
        let tall = suspend(&sigma).unwrap();
        assert!(tall.compact);
        assert_eq!(tall.length(), 2);
        let c = cone_over(&sigma).unwrap();
        assert_eq!(c.length(), 2);
    }

    #[test]
    fn classification_on_the_cone() {
        let c = cone_over(&s1()).unwrap();
        let cls = c.classify_strata();
        assert_eq!(cls.regular.len(), 1);
        assert_eq!(cls.singular, BTreeSet::from([StratumId::vertex()]));
        assert_eq!(cls.minimal, BTreeSet::from([StratumId::vertex()]));
    }

    #[test]
    fn min_strata_excludes_isolated_components() {
        let mixed = disjoint(vec![
            smooth_space(&SmoothFactor::new("M", 2, true)),
            cone_over(&s1()).unwrap(),
        ])
        .unwrap();
        let min = mixed.min_strata();
        assert_eq!(min.len(), 1);
        assert_eq!(mixed.poset.minima().len(), 2);
    }

    #[test]
    fn poset_query_on_vertex() {
        let c = cone_over(&s1()).unwrap();
        let q = c.poset_query(&StratumId::vertex()).unwrap();
        assert_eq!(q.closure, BTreeSet::from([StratumId::vertex()]));
        assert_eq!(q.incidence_neighborhood.len(), 2);
        let bad = c.poset_query(&StratumId::atom("nope"));
        assert!(matches!(bad, Err(SpaceError::UnknownStratum(_))));
    }

    #[test]
    fn disjoint_union_keeps_components_apart() {
        let two = disjoint(vec![cone_over(&s1()).unwrap(), cone_over(&s1()).unwrap()]).unwrap();
        assert_eq!(two.poset.len(), 4);
        let v1 = StratumId::vertex().prefixed(Token::Part(0));
        let q = two.poset_query(&v1).unwrap();
        assert_eq!(q.incidence_neighborhood.len(), 2);
        assert!(disjoint(vec![]).is_err());
    }

    #[test]
    fn localize_identity_on_single_chain() {
        let c = cone_over(&s1()).unwrap();
        let chain = vec![StratumId::vertex(), StratumId::body(&StratumId::atom("S1"))];
        let l = localize(&c, &chain).unwrap();
        assert_eq!(l, c);
    }

    #[test]
    fn localize_picks_one_cone_from_a_pair() {
        let two = disjoint(vec![cone_over(&s1()).unwrap(), cone_over(&s1()).unwrap()]).unwrap();
        let chain = vec![
            StratumId::vertex().prefixed(Token::Part(0)),
            StratumId::body(&StratumId::atom("S1")).prefixed(Token::Part(0)),
        ];
        let l = localize(&two, &chain).unwrap();
        assert_eq!(l.poset.len(), 2);
        assert_eq!(l.length(), 1);
    }

    #[test]
    fn localize_rejects_non_chains() {
        let sigma = suspend(&s1()).unwrap();
        let c = cone_over(&sigma).unwrap();
        // vertex directly to the top skips the middle stratum
        let top = StratumId::body(&StratumId::swept(&StratumId::atom("S1")));
        let bad = localize(&c, &[StratumId::vertex(), top]);
        assert!(matches!(bad, Err(SpaceError::NotAChain(_))));
    }

    #[test]
    fn localize_sigma_chain() {
        let sigma = suspend(&s1()).unwrap();
        let chain = vec![
            StratumId::pole(true),
            StratumId::swept(&StratumId::atom("S1")),
        ];
        let l = localize(&sigma, &chain).unwrap();
        assert_eq!(l.poset.len(), 2);
        assert!(l.poset.is_chain());
        assert_eq!(l.links[&StratumId::pole(true)].poset.len(), 1);
    }
}

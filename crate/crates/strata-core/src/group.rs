//! Structure-preserving link isomorphisms and finite cocycle groups.
//!
//! The structure group of a tube lives inside the isomorphism group of its
//! link. An element is recorded as a poset map on the link's strata, a
//! permutation of each stratum's designated samples (the finite shadow of an
//! abstract diffeomorphism) and, recursively, an isomorphism of each deeper
//! link.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diag::{Report, Violation};
use crate::id::StratumId;
use crate::samples::{LinkSample, LINK_SAMPLES};
use crate::space::PresentedSpace;

/// A structure-preserving isomorphism between two links (an automorphism
/// when domain and codomain coincide).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkIso {
    /// Bijection of stratum ids.
    pub stratum_map: BTreeMap<StratumId, StratumId>,
    /// Per-stratum permutation of the sample indices, keyed by the domain
    /// stratum. Identity permutations may be omitted.
    pub sample_perms: BTreeMap<StratumId, Vec<u8>>,
    /// Isomorphisms of the deeper links, keyed by the domain's singular
    /// strata. Identity actions may be omitted.
    pub link_actions: BTreeMap<StratumId, LinkIso>,
}

impl LinkIso {
    /// The identity automorphism of a link with the given strata.
    pub fn identity<'a>(strata: impl Iterator<Item = &'a StratumId>) -> Self {
        LinkIso {
            stratum_map: strata.map(|s| (s.clone(), s.clone())).collect(),
            sample_perms: BTreeMap::new(),
            link_actions: BTreeMap::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.stratum_map.iter().all(|(a, b)| a == b)
            && self
                .sample_perms
                .values()
                .all(|p| p.iter().enumerate().all(|(i, &j)| i as u8 == j))
            && self.link_actions.values().all(|a| a.is_identity())
    }

    /// Drops explicit identity entries so that structural equality matches
    /// the group-theoretic one.
    fn normalized(mut self) -> LinkIso {
        self.sample_perms
            .retain(|_, p| !p.iter().enumerate().all(|(i, &j)| i as u8 == j));
        self.link_actions.retain(|_, a| !a.is_identity());
        self.link_actions = std::mem::take(&mut self.link_actions)
            .into_iter()
            .map(|(k, a)| (k, a.normalized()))
            .collect();
        self
    }

    pub fn map_stratum(&self, id: &StratumId) -> Option<&StratumId> {
        self.stratum_map.get(id)
    }

    /// Action on a designated sample point.
    pub fn apply(&self, sample: &LinkSample) -> Option<LinkSample> {
        let stratum = self.stratum_map.get(&sample.stratum)?.clone();
        let index = match self.sample_perms.get(&sample.stratum) {
            Some(perm) => *perm.get(sample.index as usize)?,
            None => sample.index,
        };
        Some(LinkSample { stratum, index })
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &LinkIso) -> LinkIso {
        let mut stratum_map = BTreeMap::new();
        let mut sample_perms = BTreeMap::new();
        let mut link_actions = BTreeMap::new();
        for (a, b) in &first.stratum_map {
            let c = self.stratum_map.get(b).cloned().unwrap_or_else(|| b.clone());
            stratum_map.insert(a.clone(), c);
            let first_perm = first.sample_perms.get(a);
            let second_perm = self.sample_perms.get(b);
            if first_perm.is_some() || second_perm.is_some() {
                let perm: Vec<u8> = (0..LINK_SAMPLES)
                    .map(|i| {
                        let mid = first_perm.map_or(i, |p| p[i as usize]);
                        second_perm.map_or(mid, |p| p[mid as usize])
                    })
                    .collect();
                sample_perms.insert(a.clone(), perm);
            }
            let first_act = first.link_actions.get(a);
            let second_act = self.link_actions.get(b);
            match (first_act, second_act) {
                (Some(f), Some(s)) => {
                    link_actions.insert(a.clone(), s.compose(f));
                }
                (Some(f), None) => {
                    link_actions.insert(a.clone(), f.clone());
                }
                (None, Some(s)) => {
                    link_actions.insert(a.clone(), s.clone());
                }
                (None, None) => {}
            }
        }
        LinkIso {
            stratum_map,
            sample_perms,
            link_actions,
        }
        .normalized()
    }

    pub fn inverse(&self) -> LinkIso {
        let mut stratum_map = BTreeMap::new();
        let mut sample_perms = BTreeMap::new();
        let mut link_actions = BTreeMap::new();
        for (a, b) in &self.stratum_map {
            stratum_map.insert(b.clone(), a.clone());
            if let Some(perm) = self.sample_perms.get(a) {
                let mut inv = vec![0u8; perm.len()];
                for (i, &j) in perm.iter().enumerate() {
                    inv[j as usize] = i as u8;
                }
                sample_perms.insert(b.clone(), inv);
            }
            if let Some(act) = self.link_actions.get(a) {
                link_actions.insert(b.clone(), act.inverse());
            }
        }
        LinkIso {
            stratum_map,
            sample_perms,
            link_actions,
        }
        .normalized()
    }

    /// Checks that the iso preserves the structure of `domain` into
    /// `codomain`: bijective on strata, order- and dimension-preserving,
    /// valid sample permutations, recursive actions on matching links.
    pub fn validate(&self, domain: &PresentedSpace, codomain: &PresentedSpace) -> Report {
        let mut report = Report::new();
        let mut seen = BTreeMap::new();
        for s in domain.poset.ids() {
            match self.stratum_map.get(s) {
                None => report.push(Violation::StratumMapNotTotal { stratum: s.clone() }),
                Some(t) => {
                    if !codomain.poset.contains(t) {
                        report.push(Violation::StratumMapNotTotal { stratum: t.clone() });
                        continue;
                    }
                    if let Some(prev) = seen.insert(t.clone(), s.clone()) {
                        report.push(Violation::StratumMapNotInjective { stratum: prev });
                    }
                    let (ds, dt) = (
                        domain.poset.stratum(s).map(|x| x.dim),
                        codomain.poset.stratum(t).map(|x| x.dim),
                    );
                    if ds != dt {
                        report.push(Violation::FootprintDimBroken {
                            base: s.clone(),
                            link_stratum: t.clone(),
                        });
                    }
                }
            }
        }
        if seen.len() != codomain.poset.len() {
            report.push(Violation::StratumMapNotTotal {
                stratum: StratumId::default(),
            });
        }
        for (a, b) in domain.poset.strict_pairs() {
            if let (Some(fa), Some(fb)) = (self.stratum_map.get(a), self.stratum_map.get(b)) {
                if !codomain.poset.lt(fa, fb) {
                    report.push(Violation::StratumMapNotMonotone {
                        lower: a.clone(),
                        upper: b.clone(),
                    });
                }
            }
        }
        for (s, perm) in &self.sample_perms {
            let mut hit = vec![false; LINK_SAMPLES as usize];
            let ok = perm.len() == LINK_SAMPLES as usize
                && perm.iter().all(|&j| {
                    let idx = j as usize;
                    idx < hit.len() && !std::mem::replace(&mut hit[idx], true)
                });
            if !ok {
                report.push(Violation::GroupAxiomBroken {
                    base: s.clone(),
                    detail: "sample permutation is not a permutation".into(),
                });
            }
        }
        for (s, action) in &self.link_actions {
            if let (Some(dl), Some(t)) = (domain.links.get(s), self.stratum_map.get(s)) {
                if let Some(cl) = codomain.links.get(t) {
                    report.merge_link(s, action.validate(dl, cl));
                }
            }
        }
        report
    }
}

/// A finite group of link automorphisms with an explicit composition table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleGroup {
    /// Element 0 is the identity.
    pub elements: Vec<LinkIso>,
}

impl CocycleGroup {
    pub fn trivial<'a>(strata: impl Iterator<Item = &'a StratumId>) -> Self {
        CocycleGroup {
            elements: vec![LinkIso::identity(strata)],
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn element(&self, index: usize) -> Option<&LinkIso> {
        self.elements.get(index)
    }

    pub fn index_of(&self, iso: &LinkIso) -> Option<usize> {
        self.elements.iter().position(|e| e == iso)
    }

    /// Index of `elements[i] . elements[j]` (i after j), if closed.
    pub fn compose_indices(&self, i: usize, j: usize) -> Option<usize> {
        let composed = self.elements.get(i)?.compose(self.elements.get(j)?);
        self.index_of(&composed)
    }

    /// The full composition table, when the set is closed.
    pub fn table(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.order();
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[i][j] = self.compose_indices(i, j)?;
            }
        }
        Some(table)
    }

    /// Table-checks the group axioms exactly.
    pub fn validate(&self, base: &StratumId) -> Report {
        let mut report = Report::new();
        if self.elements.is_empty() {
            report.push(Violation::GroupAxiomBroken {
                base: base.clone(),
                detail: "empty element set".into(),
            });
            return report;
        }
        if !self.elements[0].is_identity() {
            report.push(Violation::GroupAxiomBroken {
                base: base.clone(),
                detail: "element 0 is not the identity".into(),
            });
        }
        let table = match self.table() {
            Some(t) => t,
            None => {
                report.push(Violation::GroupAxiomBroken {
                    base: base.clone(),
                    detail: "composition leaves the element set".into(),
                });
                return report;
            }
        };
        let n = self.order();
        for (i, row) in table.iter().enumerate() {
            if row[0] != i || table[0][i] != i {
                report.push(Violation::GroupAxiomBroken {
                    base: base.clone(),
                    detail: format!("identity law fails at element {i}"),
                });
            }
            if !row.contains(&0) {
                report.push(Violation::GroupAxiomBroken {
                    base: base.clone(),
                    detail: format!("element {i} has no inverse"),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[table[i][j]][k] != table[i][table[j][k]] {
                        report.push(Violation::GroupAxiomBroken {
                            base: base.clone(),
                            detail: format!("associativity fails at ({i},{j},{k})"),
                        });
                    }
                }
            }
        }
        report
    }

    /// True when the two groups have isomorphic composition tables.
    pub fn isomorphic_to(&self, other: &CocycleGroup) -> bool {
        let n = self.order();
        if n != other.order() {
            return false;
        }
        let (ta, tb) = match (self.table(), other.table()) {
            (Some(a), Some(b)) => (a, b),
            _ => return false,
        };
        // small groups only: search the bijections fixing the identity
        let mut perm: Vec<usize> = (0..n).collect();
        fn search(
            perm: &mut Vec<usize>,
            pos: usize,
            ta: &[Vec<usize>],
            tb: &[Vec<usize>],
        ) -> bool {
            let n = perm.len();
            if pos == n {
                for i in 0..n {
                    for j in 0..n {
                        if perm[ta[i][j]] != tb[perm[i]][perm[j]] {
                            return false;
                        }
                    }
                }
                return true;
            }
            for k in pos..n {
                perm.swap(pos, k);
                if (pos != 0 || perm[0] == 0) && search(perm, pos + 1, ta, tb) {
                    return true;
                }
                perm.swap(pos, k);
            }
            false
        }
        search(&mut perm, 0, &ta, &tb)
    }

    /// Conjugates every element by `h`: `g ↦ h . g . h⁻¹`, transporting the
    /// group to the codomain link of `h`.
    pub fn conjugate(&self, h: &LinkIso) -> CocycleGroup {
        let h_inv = h.inverse();
        CocycleGroup {
            elements: self
                .elements
                .iter()
                .map(|g| h.compose(&g.compose(&h_inv)))
                .collect(),
        }
    }
}

/// The cyclic group generated by shifting sample indices by `step` on every
/// stratum of the link. Used by fixtures with nontrivial cocycles.
pub fn sample_shift_group<'a>(
    strata: impl Iterator<Item = &'a StratumId> + Clone,
    step: u8,
) -> CocycleGroup {
    let ids: Vec<&StratumId> = strata.clone().collect();
    let mut elements = Vec::new();
    let mut shift = 0u8;
    loop {
        let perm: Vec<u8> = (0..LINK_SAMPLES)
            .map(|i| (i + shift) % LINK_SAMPLES)
            .collect();
        let mut iso = LinkIso::identity(strata.clone());
        if shift != 0 {
            for id in &ids {
                iso.sample_perms.insert((*id).clone(), perm.clone());
            }
        }
        elements.push(iso);
        shift = (shift + step) % LINK_SAMPLES;
        if shift == 0 {
            break;
        }
    }
    CocycleGroup { elements }
}

//! Structural isomorphism of presented spaces.
//!
//! Two spaces are isomorphic when some poset bijection matches dimensions,
//! singularity, recursively isomorphic links, and tube cocycle groups up to
//! group isomorphism. The search is a backtracking matcher over the stratum
//! posets; corpus spaces stay small (a dozen strata), so invariant pruning
//! keeps it well inside the time budget.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::id::StratumId;
use crate::space::PresentedSpace;

/// A witness isomorphism between two presented spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceIso {
    pub stratum_map: BTreeMap<StratumId, StratumId>,
    /// Witnesses for the links of the singular strata, keyed by the domain
    /// stratum.
    pub link_isos: BTreeMap<StratumId, SpaceIso>,
}

impl SpaceIso {
    pub fn identity(space: &PresentedSpace) -> SpaceIso {
        SpaceIso {
            stratum_map: space
                .poset
                .ids()
                .map(|s| (s.clone(), s.clone()))
                .collect(),
            link_isos: space
                .links
                .iter()
                .map(|(s, l)| (s.clone(), SpaceIso::identity(l)))
                .collect(),
        }
    }

    pub fn map(&self, id: &StratumId) -> Option<&StratumId> {
        self.stratum_map.get(id)
    }
}

/// Searches for a structural isomorphism; absence is a value, not an error.
pub fn iso_check(a: &PresentedSpace, b: &PresentedSpace) -> Option<SpaceIso> {
    if a.poset.len() != b.poset.len()
        || a.length() != b.length()
        || a.dim != b.dim
        || a.compact != b.compact
    {
        return None;
    }

    // cheap invariant: multiset of (dim, height, #below, #above) must agree
    let profile = |space: &PresentedSpace| {
        let mut v: Vec<(u32, u32, usize, usize)> = space
            .poset
            .ids()
            .map(|s| {
                (
                    space.poset.stratum(s).unwrap().dim,
                    space.poset.height_above(s),
                    space.poset.closure(s).len(),
                    space.poset.up_set(s).len(),
                )
            })
            .collect();
        v.sort();
        v
    };
    if profile(a) != profile(b) {
        return None;
    }

    let dom: Vec<StratumId> = a.poset.ids().cloned().collect();
    let mut assignment: BTreeMap<StratumId, StratumId> = BTreeMap::new();
    let mut used: Vec<StratumId> = Vec::new();
    let mut link_isos: BTreeMap<StratumId, SpaceIso> = BTreeMap::new();
    if search(a, b, &dom, 0, &mut assignment, &mut used, &mut link_isos) {
        Some(SpaceIso {
            stratum_map: assignment,
            link_isos,
        })
    } else {
        None
    }
}

fn compatible(
    a: &PresentedSpace,
    b: &PresentedSpace,
    s: &StratumId,
    t: &StratumId,
    link_isos: &mut BTreeMap<StratumId, SpaceIso>,
) -> bool {
    let (sa, sb) = (a.poset.stratum(s).unwrap(), b.poset.stratum(t).unwrap());
    if sa.dim != sb.dim {
        return false;
    }
    if a.poset.height_above(s) != b.poset.height_above(t) {
        return false;
    }
    if a.is_singular(s) != b.is_singular(t) {
        return false;
    }
    match (a.links.get(s), b.links.get(t)) {
        (None, None) => {}
        (Some(la), Some(lb)) => match iso_check(la, lb) {
            Some(w) => {
                link_isos.insert(s.clone(), w);
            }
            None => return false,
        },
        _ => return false,
    }
    match (a.tubes.get(s), b.tubes.get(t)) {
        (None, None) => true,
        (Some(ta), Some(tb)) => ta.group.isomorphic_to(&tb.group),
        _ => false,
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &PresentedSpace,
    b: &PresentedSpace,
    dom: &[StratumId],
    pos: usize,
    assignment: &mut BTreeMap<StratumId, StratumId>,
    used: &mut Vec<StratumId>,
    link_isos: &mut BTreeMap<StratumId, SpaceIso>,
) -> bool {
    if pos == dom.len() {
        return true;
    }
    let s = &dom[pos];
    let candidates: Vec<StratumId> = b.poset.ids().cloned().collect();
    for t in candidates {
        if used.contains(&t) {
            continue;
        }
        if !compatible(a, b, s, &t, link_isos) {
            continue;
        }
        // order consistency with everything already matched
        let consistent = assignment.iter().all(|(s0, t0)| {
            a.poset.lt(s0, s) == b.poset.lt(t0, &t) && a.poset.lt(s, s0) == b.poset.lt(&t, t0)
        });
        if !consistent {
            continue;
        }
        assignment.insert(s.clone(), t.clone());
        used.push(t.clone());
        if search(a, b, dom, pos + 1, assignment, used, link_isos) {
            return true;
        }
        assignment.remove(s);
        used.pop();
        link_isos.remove(s);
    }
    false
}

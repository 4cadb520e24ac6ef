//! Finite incidence posets of strata.
//!
//! The incidence relation of a stratification is a partial order; minimal
//! strata are the closed ones and maximal strata the open (regular) ones.
//! The poset stores the strict relation transitively closed, so queries are
//! set lookups.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::id::StratumId;

/// One stratum: an abstract locally closed smooth manifold, reduced to its
/// id, dimension and a display label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub id: StratumId,
    pub dim: u32,
    pub label: String,
}

/// A finite poset of strata under the incidence order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StratPoset {
    strata: BTreeMap<StratumId, Stratum>,
    /// For each stratum, the strata strictly above it; transitively closed.
    above: BTreeMap<StratumId, BTreeSet<StratumId>>,
}

/// Raised when a relation fed to the builder is not an order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error("unknown stratum {0}")]
    UnknownStratum(StratumId),
    #[error("incidence relation has a cycle through {0}")]
    Cycle(StratumId),
}

impl StratPoset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a poset from strata and strict generating pairs, closing
    /// transitively and rejecting cycles.
    pub fn from_pairs(
        strata: Vec<Stratum>,
        pairs: &[(StratumId, StratumId)],
    ) -> Result<Self, PosetError> {
        let mut poset = StratPoset::new();
        for s in strata {
            poset.strata.insert(s.id.clone(), s);
        }
        for (a, b) in pairs {
            if !poset.strata.contains_key(a) {
                return Err(PosetError::UnknownStratum(a.clone()));
            }
            if !poset.strata.contains_key(b) {
                return Err(PosetError::UnknownStratum(b.clone()));
            }
            if a != b {
                poset
                    .above
                    .entry(a.clone())
                    .or_default()
                    .insert(b.clone());
            }
        }
        poset.close_transitively();
        for (a, ups) in &poset.above {
            for b in ups {
                if poset.lt(b, a) {
                    return Err(PosetError::Cycle(a.clone()));
                }
            }
        }
        Ok(poset)
    }

    fn close_transitively(&mut self) {
        loop {
            let mut added: Vec<(StratumId, StratumId)> = Vec::new();
            for (a, ups) in &self.above {
                for b in ups {
                    if let Some(higher) = self.above.get(b) {
                        for c in higher {
                            if !ups.contains(c) {
                                added.push((a.clone(), c.clone()));
                            }
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            for (a, c) in added {
                self.above.entry(a).or_default().insert(c);
            }
        }
    }

    pub fn insert(&mut self, stratum: Stratum) {
        self.strata.insert(stratum.id.clone(), stratum);
    }

    pub fn contains(&self, id: &StratumId) -> bool {
        self.strata.contains_key(id)
    }

    pub fn stratum(&self, id: &StratumId) -> Option<&Stratum> {
        self.strata.get(id)
    }

    pub fn strata(&self) -> impl Iterator<Item = &Stratum> + Clone {
        self.strata.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &StratumId> + Clone {
        self.strata.keys()
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn strict_pairs(&self) -> impl Iterator<Item = (&StratumId, &StratumId)> {
        self.above
            .iter()
            .flat_map(|(a, ups)| ups.iter().map(move |b| (a, b)))
    }

    pub fn lt(&self, a: &StratumId, b: &StratumId) -> bool {
        self.above.get(a).is_some_and(|ups| ups.contains(b))
    }

    pub fn leq(&self, a: &StratumId, b: &StratumId) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn comparable(&self, a: &StratumId, b: &StratumId) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Down-set of `id`: the strata of its closure.
    pub fn closure(&self, id: &StratumId) -> BTreeSet<StratumId> {
        self.ids().filter(|s| self.leq(s, id)).cloned().collect()
    }

    /// Up-set of `id`: the incidence neighborhood.
    pub fn up_set(&self, id: &StratumId) -> BTreeSet<StratumId> {
        self.ids().filter(|s| self.leq(id, s)).cloned().collect()
    }

    pub fn minima(&self) -> BTreeSet<StratumId> {
        self.ids()
            .filter(|s| !self.ids().any(|t| self.lt(t, s)))
            .cloned()
            .collect()
    }

    pub fn maxima(&self) -> BTreeSet<StratumId> {
        self.ids()
            .filter(|s| !self.ids().any(|t| self.lt(s, t)))
            .cloned()
            .collect()
    }

    /// Length of the longest strict chain starting at `id` and going up,
    /// counted in steps.
    pub fn height_above(&self, id: &StratumId) -> u32 {
        self.above
            .get(id)
            .map(|ups| {
                ups.iter()
                    .map(|t| 1 + self.height_above(t))
                    .max()
                    .unwrap_or(0)
            })
            .unwrap_or(0)
    }

    /// Longest strict chain in the whole poset, counted in steps.
    pub fn length(&self) -> u32 {
        self.ids().map(|s| self.height_above(s)).max().unwrap_or(0)
    }

    /// True when the poset is a single total order.
    pub fn is_chain(&self) -> bool {
        self.ids()
            .all(|a| self.ids().all(|b| self.comparable(a, b)))
    }

    /// Cover pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(StratumId, StratumId)> {
        self.strict_pairs()
            .filter(|(a, b)| !self.ids().any(|c| self.lt(a, c) && self.lt(c, b)))
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect()
    }

    /// Partition of the strata into comparability components: the
    /// stratum-granularity connected components of the space.
    pub fn components(&self) -> Vec<BTreeSet<StratumId>> {
        let mut seen: BTreeSet<StratumId> = BTreeSet::new();
        let mut out = Vec::new();
        for id in self.ids() {
            if seen.contains(id) {
                continue;
            }
            let mut comp: BTreeSet<StratumId> = BTreeSet::new();
            let mut stack = vec![id.clone()];
            while let Some(cur) = stack.pop() {
                if !comp.insert(cur.clone()) {
                    continue;
                }
                for other in self.ids() {
                    if !comp.contains(other) && self.comparable(&cur, other) {
                        stack.push(other.clone());
                    }
                }
            }
            seen.extend(comp.iter().cloned());
            out.push(comp);
        }
        out
    }

    /// Keeps only the given strata and the induced order.
    pub fn restrict(&self, keep: &BTreeSet<StratumId>) -> StratPoset {
        StratPoset {
            strata: self
                .strata
                .iter()
                .filter(|(id, _)| keep.contains(id))
                .map(|(id, s)| (id.clone(), s.clone()))
                .collect(),
            above: self
                .above
                .iter()
                .filter(|(a, _)| keep.contains(a))
                .map(|(a, ups)| {
                    (
                        a.clone(),
                        ups.iter().filter(|b| keep.contains(*b)).cloned().collect(),
                    )
                })
                .filter(|(_, ups): &(_, BTreeSet<StratumId>)| !ups.is_empty())
                .collect(),
        }
    }
}

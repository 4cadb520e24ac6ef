//! Seeded generation of valid Thom-Mather spaces for the property harness.
//!
//! The generator composes the canonical constructors only, so every member
//! is valid by construction: smooth pieces, products, disjoint unions,
//! suspensions for compact positive length, cones at the top. A fraction of
//! the vertex tubes get a twisted two-chart atlas to exercise nontrivial
//! cocycle groups.

use crate::group::sample_shift_group;
use crate::space::{
    cone_over, disjoint, product_smooth, smooth_space, suspend, PresentedSpace, SmoothFactor,
};

/// Deterministic 64-bit generator (splitmix64), fixed for reproducibility
/// across platforms and toolchains.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// Corpus parameters. The defaults match the acceptance harness: seeded,
/// lengths one to four, at most a dozen strata each.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub min_length: u32,
    pub max_length: u32,
    pub max_strata: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 0x5741,
            count: 200,
            min_length: 1,
            max_length: 4,
            max_strata: 12,
        }
    }
}

/// One generated member.
#[derive(Debug, Clone)]
pub struct CorpusMember {
    pub name: String,
    pub space: PresentedSpace,
}

/// Generates `spec.count` valid spaces with lengths in the requested range.
pub fn generate_corpus(spec: &CorpusSpec) -> Vec<CorpusMember> {
    let mut rng = SplitMix64::new(spec.seed);
    let mut members = Vec::with_capacity(spec.count);
    let span = (spec.max_length - spec.min_length + 1) as u64;
    while members.len() < spec.count {
        let target = spec.min_length + rng.below(span) as u32;
        let space = gen_space(&mut rng, target, false, spec.max_strata);
        if space.poset.len() <= spec.max_strata && space.length() == target {
            members.push(CorpusMember {
                name: format!("corpus-{:04}", members.len()),
                space,
            });
        }
    }
    members
}

fn gen_smooth(rng: &mut SplitMix64, compact: bool) -> PresentedSpace {
    let names = ["S1", "S2", "T2", "K", "E"];
    let dim = 1 + rng.below(2) as u32;
    let name = names[rng.below(names.len() as u64) as usize];
    smooth_space(&SmoothFactor::new(
        name,
        dim,
        compact || rng.chance(70),
    ))
}

/// A compact space of exactly the target length: suspensions over smaller
/// compact spaces, sometimes products with compact factors or disjoint
/// unions of equal length.
fn gen_compact(rng: &mut SplitMix64, length: u32, budget: usize) -> PresentedSpace {
    if length == 0 {
        let space = gen_smooth(rng, true);
        return maybe_compact_product(rng, space);
    }
    let inner_budget = budget.saturating_sub(2).max(1);
    let inner = gen_compact(rng, length - 1, inner_budget);
    let mut space = suspend(&inner).expect("inner is compact");
    if space.poset.len() + 2 <= budget && rng.chance(15) {
        let other = gen_compact(rng, length, budget - space.poset.len());
        if other.poset.len() + space.poset.len() <= budget {
            space = disjoint(vec![space, other]).expect("nonempty");
        }
    }
    if rng.chance(20) {
        space = product_smooth(&SmoothFactor::new("P", 1, true), &space);
    }
    twist_a_tube(rng, space)
}

fn maybe_compact_product(rng: &mut SplitMix64, space: PresentedSpace) -> PresentedSpace {
    if rng.chance(20) {
        product_smooth(&SmoothFactor::new("Q", 1, true), &space)
    } else {
        space
    }
}

/// Any valid space of exactly the target length within the stratum budget.
fn gen_space(
    rng: &mut SplitMix64,
    length: u32,
    need_compact: bool,
    budget: usize,
) -> PresentedSpace {
    if length == 0 {
        return gen_smooth(rng, need_compact);
    }
    if need_compact {
        return gen_compact(rng, length, budget);
    }
    let choice = rng.below(100);
    let mut space = if choice < 45 {
        // a cone over a compact link one length down
        let link = gen_compact(rng, length - 1, budget.saturating_sub(1).max(1));
        cone_over(&link).expect("link is compact")
    } else if choice < 70 {
        gen_compact(rng, length, budget)
    } else if choice < 85 {
        let inner = gen_space(rng, length, false, budget);
        product_smooth(&SmoothFactor::new("U", 1, false), &inner)
    } else {
        let first = gen_space(rng, length, false, budget.saturating_sub(2).max(1));
        let used = first.poset.len();
        let second_len = rng.below(length as u64 + 1) as u32;
        let second = gen_space(rng, second_len, false, budget.saturating_sub(used).max(1));
        disjoint(vec![first, second]).expect("nonempty")
    };
    if space.poset.len() > budget {
        // too big: fall back to the smallest shape of this length
        space = fallback(length);
    }
    twist_a_tube(rng, space)
}

fn fallback(length: u32) -> PresentedSpace {
    let mut link = smooth_space(&SmoothFactor::new("S1", 1, true));
    for _ in 1..length {
        link = suspend(&link).expect("compact");
    }
    cone_over(&link).expect("compact")
}

/// Occasionally installs a twisted two-chart atlas on one minimal tube.
fn twist_a_tube(rng: &mut SplitMix64, mut space: PresentedSpace) -> PresentedSpace {
    if !rng.chance(25) {
        return space;
    }
    let min = space.min_strata();
    let Some(target) = min.into_iter().next() else {
        return space;
    };
    if let Some(tube) = space.tubes.get_mut(&target) {
        let step = if rng.chance(50) { 4 } else { 2 };
        let group = sample_shift_group(tube.link.poset.ids(), step);
        *tube = tube.clone().with_twisted_atlas(group);
    }
    space
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tube::{separate_tubes, validate_tm, TMStructure};
    use crate::validate::validate_pseudomanifold;

    #[test]
    fn generator_is_deterministic() {
        let spec = CorpusSpec {
            count: 10,
            ..CorpusSpec::default()
        };
        let a = generate_corpus(&spec);
        let b = generate_corpus(&spec);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.space, y.space);
        }
        let other = generate_corpus(&CorpusSpec {
            seed: 99,
            count: 10,
            ..CorpusSpec::default()
        });
        assert!(a.iter().zip(&other).any(|(x, y)| x.space != y.space));
    }

    #[test]
    fn members_are_valid_and_sized() {
        let spec = CorpusSpec {
            count: 40,
            ..CorpusSpec::default()
        };
        for member in generate_corpus(&spec) {
            let space = &member.space;
            assert!(space.poset.len() <= spec.max_strata, "{}", member.name);
            assert!((1..=4).contains(&space.length()), "{}", member.name);
            let report = validate_pseudomanifold(space);
            assert!(report.is_clean(), "{}: {report}", member.name);
            let tm = separate_tubes(space, &TMStructure::canonical(space));
            let report = validate_tm(space, &tm);
            assert!(report.is_clean(), "{}: {report}", member.name);
        }
    }

    #[test]
    fn lengths_cover_the_whole_range() {
        let members = generate_corpus(&CorpusSpec {
            count: 60,
            ..CorpusSpec::default()
        });
        for target in 1..=4u32 {
            assert!(
                members.iter().any(|m| m.space.length() == target),
                "no member of length {target}"
            );
        }
    }
}

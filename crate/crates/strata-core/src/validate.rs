//! Recursive validation of the pseudomanifold axioms.

use crate::diag::{Report, Violation};
use crate::space::PresentedSpace;

/// Checks a presented space against the recursive pseudomanifold axioms:
/// order sanity, strict dimension growth along incidence, and for every
/// singular stratum a compact link of strictly smaller length. Regular
/// strata must not carry links. Violations are reported, never thrown.
pub fn validate_pseudomanifold(space: &PresentedSpace) -> Report {
    let mut report = Report::new();

    // the strict relation is transitively closed and acyclic by
    // construction of StratPoset; parsers funnel raw relations through
    // the same builder, so only antisymmetry paranoia remains
    for (a, b) in space.poset.strict_pairs() {
        if space.poset.lt(b, a) {
            report.push(Violation::NotAPartialOrder {
                detail: format!("{a} and {b} are strictly below each other"),
            });
        }
    }

    for (a, b) in space.poset.strict_pairs() {
        let (da, db) = (
            space.poset.stratum(a).map(|s| s.dim),
            space.poset.stratum(b).map(|s| s.dim),
        );
        if let (Some(da), Some(db)) = (da, db) {
            if da >= db {
                report.push(Violation::DimensionNotMonotone {
                    lower: a.clone(),
                    upper: b.clone(),
                });
            }
        }
    }

    let actual_dim = space.poset.strata().map(|s| s.dim).max().unwrap_or(0);
    if !space.poset.is_empty() && space.dim != actual_dim {
        report.push(Violation::AmbientDimMismatch {
            declared: space.dim,
            actual: actual_dim,
        });
    }

    let classification = space.classify_strata();
    let total_length = space.length();
    for s in &classification.singular {
        match space.links.get(s) {
            None => report.push(Violation::LinkMissing { stratum: s.clone() }),
            Some(link) => {
                if !link.compact {
                    report.push(Violation::LinkNotCompact { stratum: s.clone() });
                }
                if link.length() >= total_length {
                    report.push(Violation::LinkLengthNotDecreasing { stratum: s.clone() });
                }
                report.merge_link(s, validate_pseudomanifold(link));
            }
        }
    }
    for s in space.links.keys() {
        if classification.regular.contains(s) {
            report.push(Violation::LinkOnRegular { stratum: s.clone() });
        }
    }
    report
}

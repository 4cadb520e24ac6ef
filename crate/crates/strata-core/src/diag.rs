//! Validation reports.
//!
//! Validators never abort: they collect violations into a report. Each
//! violation carries a stable code used by the CLI, the fault fixtures and
//! the acceptance harness.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::id::StratumId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    // pseudomanifold axioms
    NotAPartialOrder { detail: String },
    DimensionNotMonotone { lower: StratumId, upper: StratumId },
    AmbientDimMismatch { declared: u32, actual: u32 },
    LinkMissing { stratum: StratumId },
    LinkOnRegular { stratum: StratumId },
    LinkNotCompact { stratum: StratumId },
    LinkLengthNotDecreasing { stratum: StratumId },
    LinkViolation { stratum: StratumId, inner: Box<Violation> },

    // tube structure
    TubeMissing { stratum: StratumId },
    TubeOnRegular { stratum: StratumId },
    TubeLinkMismatch { stratum: StratumId },
    FootprintOutsideIncidence { base: StratumId, stratum: StratumId },
    FootprintNotInjective { base: StratumId },
    FootprintOrderBroken { base: StratumId, detail: String },
    FootprintDimBroken { base: StratumId, link_stratum: StratumId },
    FootprintNotUpClosed { base: StratumId, missing: StratumId },
    CocycleIdentityBroken { base: StratumId, detail: String },
    GroupAxiomBroken { base: StratumId, detail: String },
    ChartBaseMismatch { base: StratumId, chart: String },
    MatherViolation { first: StratumId, second: StratumId, shared: StratumId },
    NestingMissing { index: usize, inner: StratumId, outer: StratumId },

    // morphisms
    StratumMapNotTotal { stratum: StratumId },
    StratumMapNotMonotone { lower: StratumId, upper: StratumId },
    StratumMapNotInjective { stratum: StratumId },
    RadiumNotPreserved { stratum: StratumId, detail: String },
    BundleProjectionBroken { stratum: StratumId, detail: String },
    TubeNotPreserved { stratum: StratumId, detail: String },
    TargetNotSingular { stratum: StratumId },
    LocalsNotInvertible { stratum: StratumId },
    VertexInconsistent { stratum: StratumId, detail: String },
    NotThomMather { detail: String },

    // desingularization records
    RadiumRelationBroken { stratum: StratumId, detail: String },
    ProvenanceTagsBroken { stratum: StratumId, detail: String },
    FiberPreimageBroken { stratum: StratumId, detail: String },
    SquareNotCommuting { context: String, detail: String },
    LengthNotDecremented { expected: u32, actual: u32 },

    // parity of lifted locals
    ParityBroken { which: String, detail: String },

    // functor laws
    LawBroken { law: String, member: String, detail: String },
}

impl Violation {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NotAPartialOrder { .. } => "NotAPartialOrder",
            Violation::DimensionNotMonotone { .. } => "DimensionNotMonotone",
            Violation::AmbientDimMismatch { .. } => "AmbientDimMismatch",
            Violation::LinkMissing { .. } => "LinkMissing",
            Violation::LinkOnRegular { .. } => "LinkOnRegular",
            Violation::LinkNotCompact { .. } => "LinkNotCompact",
            Violation::LinkLengthNotDecreasing { .. } => "LinkLengthNotDecreasing",
            Violation::LinkViolation { .. } => "LinkViolation",
            Violation::TubeMissing { .. } => "TubeMissing",
            Violation::TubeOnRegular { .. } => "TubeOnRegular",
            Violation::TubeLinkMismatch { .. } => "TubeLinkMismatch",
            Violation::FootprintOutsideIncidence { .. } => "FootprintOutsideIncidence",
            Violation::FootprintNotInjective { .. } => "FootprintNotInjective",
            Violation::FootprintOrderBroken { .. } => "FootprintOrderBroken",
            Violation::FootprintDimBroken { .. } => "FootprintDimBroken",
            Violation::FootprintNotUpClosed { .. } => "FootprintNotUpClosed",
            Violation::CocycleIdentityBroken { .. } => "CocycleIdentityBroken",
            Violation::GroupAxiomBroken { .. } => "GroupAxiomBroken",
            Violation::ChartBaseMismatch { .. } => "ChartBaseMismatch",
            Violation::MatherViolation { .. } => "MatherViolation",
            Violation::NestingMissing { .. } => "NestingMissing",
            Violation::StratumMapNotTotal { .. } => "StratumMapNotTotal",
            Violation::StratumMapNotMonotone { .. } => "StratumMapNotMonotone",
            Violation::StratumMapNotInjective { .. } => "StratumMapNotInjective",
            Violation::RadiumNotPreserved { .. } => "RadiumNotPreserved",
            Violation::BundleProjectionBroken { .. } => "BundleProjectionBroken",
            Violation::TubeNotPreserved { .. } => "TubeNotPreserved",
            Violation::TargetNotSingular { .. } => "TargetNotSingular",
            Violation::LocalsNotInvertible { .. } => "LocalsNotInvertible",
            Violation::VertexInconsistent { .. } => "VertexInconsistent",
            Violation::NotThomMather { .. } => "NotThomMather",
            Violation::RadiumRelationBroken { .. } => "RadiumRelationBroken",
            Violation::ProvenanceTagsBroken { .. } => "ProvenanceTagsBroken",
            Violation::FiberPreimageBroken { .. } => "FiberPreimageBroken",
            Violation::SquareNotCommuting { .. } => "SquareNotCommuting",
            Violation::LengthNotDecremented { .. } => "LengthNotDecremented",
            Violation::ParityBroken { .. } => "ParityBroken",
            Violation::LawBroken { .. } => "LawBroken",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.code(), self)
    }
}

/// Accumulated validator output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    /// Merges a link's report, wrapping each violation with the link owner.
    pub fn merge_link(&mut self, stratum: &StratumId, other: Report) {
        for v in other.violations {
            self.push(Violation::LinkViolation {
                stratum: stratum.clone(),
                inner: Box::new(v),
            });
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.violations.iter().any(|v| {
            v.code() == code
                || matches!(v, Violation::LinkViolation { inner, .. } if inner.code() == code)
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            writeln!(f, "clean")
        } else {
            for v in &self.violations {
                writeln!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

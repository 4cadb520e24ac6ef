//! A symbolic calculus for stratified Thom-Mather pseudomanifolds of finite
//! length.
//!
//! Spaces are finite stratum posets with links and tubular neighborhoods;
//! the calculus executes the desingularization constructions on them:
//!
//! - **unbending**: removes the minimal part of a space, doubling the rest
//!   and replacing each minimal tube's conic fiber `c(L)` by `L x R`, which
//!   drops the length by exactly one;
//! - **unfolding**: iterates unbendings length-many times until the space
//!   is a smooth manifold, assembling conic charts along the way;
//! - **morphism lifting**: lifts stratified, tube- and Thom-Mather
//!   morphisms through unbendings and unfoldings, with sign conventions and
//!   parity bookkeeping, functorially.
//!
//! Every claimed identity is checked as a machine-verifiable property:
//! structural facts exactly, numeric facts on deterministic sample grids.

pub mod corpus;
pub mod diag;
pub mod doc;
pub mod dot;
pub mod expr;
pub mod fixtures;
pub mod group;
pub mod id;
pub mod iso;
pub mod morphism;
pub mod poset;
pub mod samples;
pub mod space;
pub mod tube;
pub mod unbend;
pub mod unfold;
pub mod validate;

pub use diag::{Report, Violation};
pub use id::{ChartId, Sign, StratumId, Token};
pub use poset::{StratPoset, Stratum};
pub use space::{
    cone_over, disjoint, line_product, localize, present, product_smooth, smooth_space, suspend,
    Classification, PresentedSpace, SmoothFactor, SpaceError, StratSpaceExpr,
};
pub use tube::{
    canonical_tube_for_cone, radial_stretch, radium, separate_tubes, validate_tm, ChartRecord,
    TMStructure, Tube, TubeError, TubePoint,
};
pub use validate::validate_pseudomanifold;

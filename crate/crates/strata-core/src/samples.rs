//! Deterministic sample grids.
//!
//! Numeric checks evaluate morphisms on fixed grids instead of proving
//! identities analytically: base coordinates range over a lattice in
//! [-1, 1]^dim, scalar (radial) coordinates over a small symmetric set, and
//! each link stratum carries a fixed number of abstract sample points.

use serde::{Deserialize, Serialize};

use crate::id::StratumId;

/// Number of designated sample points per link stratum.
pub const LINK_SAMPLES: u8 = 8;

/// Absolute tolerance for real comparisons on grids.
pub const TOL: f64 = 1e-9;

/// An abstract point of a link: a stratum tag plus a sample index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkSample {
    pub stratum: StratumId,
    pub index: u8,
}

impl LinkSample {
    pub fn new(stratum: StratumId, index: u8) -> Self {
        LinkSample { stratum, index }
    }
}

/// A point of the cone over a link: `[l, r]` with every `[l, 0]` identified.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConePoint {
    pub link: LinkSample,
    pub r: f64,
}

impl ConePoint {
    pub fn vertexish(&self) -> bool {
        self.r == 0.0
    }
}

impl PartialEq for ConePoint {
    fn eq(&self, other: &Self) -> bool {
        if self.r == 0.0 && other.r == 0.0 {
            return true;
        }
        self.r == other.r && self.link == other.link
    }
}

/// Grid densities; the defaults implement the standard check grid,
/// `refined` produces a strictly larger one for stability tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axis_points: usize,
    pub scalar_values: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            axis_points: 5,
            scalar_values: vec![-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0],
        }
    }
}

impl GridSpec {
    pub fn refined() -> Self {
        GridSpec {
            axis_points: 9,
            scalar_values: vec![
                -1.0, -0.75, -0.5, -0.25, -0.125, 0.0, 0.125, 0.25, 0.5, 0.75, 1.0,
            ],
        }
    }

    pub fn with_axis_points(n: usize) -> Self {
        GridSpec {
            axis_points: n.max(2),
            ..GridSpec::default()
        }
    }

    fn axis(&self, dim: u32) -> Vec<f64> {
        // keep the full lattice tractable for higher-dimensional bases
        let n = match dim {
            0..=3 => self.axis_points,
            4..=5 => 3.min(self.axis_points),
            _ => 2,
        };
        (0..n)
            .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Lattice in [-1, 1]^dim; the unique empty tuple when `dim` is 0.
    pub fn u_grid(&self, dim: u32) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for _ in 0..dim {
            let axis = self.axis(dim);
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for &x in &axis {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }

    /// Signed scalar values (the unbent coordinate `t`).
    pub fn t_values(&self) -> Vec<f64> {
        self.scalar_values.clone()
    }

    /// Nonnegative scalar values (the conic radium `r`).
    pub fn r_values(&self) -> Vec<f64> {
        self.scalar_values
            .iter()
            .copied()
            .filter(|r| *r >= 0.0)
            .collect()
    }
}

/// The designated samples of a space: every stratum times every index.
pub fn link_samples<'a>(
    strata: impl Iterator<Item = &'a StratumId>,
) -> Vec<LinkSample> {
    let mut out = Vec::new();
    for id in strata {
        for index in 0..LINK_SAMPLES {
            out.push(LinkSample::new(id.clone(), index));
        }
    }
    out
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

pub fn close_with(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shapes() {
        let g = GridSpec::default();
        assert_eq!(g.u_grid(0), vec![Vec::<f64>::new()]);
        assert_eq!(g.u_grid(1).len(), 5);
        assert_eq!(g.u_grid(2).len(), 25);
        assert_eq!(g.r_values(), vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(g.t_values().len(), 7);
    }

    #[test]
    fn refinement_contains_default() {
        let g = GridSpec::default();
        let r = GridSpec::refined();
        for v in g.t_values() {
            assert!(r.t_values().contains(&v));
        }
        for u in g.u_grid(1) {
            assert!(r.u_grid(1).iter().any(|w| close(w[0], u[0])));
        }
    }

    #[test]
    fn cone_points_collapse_at_zero() {
        let a = ConePoint {
            link: LinkSample::new(StratumId::atom("x"), 0),
            r: 0.0,
        };
        let b = ConePoint {
            link: LinkSample::new(StratumId::atom("y"), 5),
            r: 0.0,
        };
        assert_eq!(a, b);
        let c = ConePoint { r: 0.5, ..a.clone() };
        assert_ne!(a, c);
    }
}

//! System representations: finite metric systems, grid discretizations and vertex shifts.

mod finite;
mod grid;
mod sft;
pub mod spec;

use std::fmt::Debug;
use std::hash::Hash;

pub use finite::FiniteSystem;
pub use grid::{discretize, Geometry, GridMapSpec, MapFamily, RealParam};
pub use sft::{SftComponent, SftGraph, SftPoint};

use crate::numeric::{Dyadic, ExactDistance, Rational};

/// A map on a metric space with exact distances.
pub trait Dynamics: Sync {
    type Point: Clone + Eq + Hash + Debug + Send + Sync;
    type Dist: ExactDistance;

    fn image(&self, x: &Self::Point) -> Self::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Self::Dist;

    /// `d(f^i x, f^i y)` for `i < len`.
    fn pair_trace(&self, x: &Self::Point, y: &Self::Point, len: usize) -> Vec<Self::Dist> {
        let (mut x, mut y) = (x.clone(), y.clone());
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.distance(&x, &y));
            x = self.image(&x);
            y = self.image(&y);
        }
        out
    }
}

impl Dynamics for FiniteSystem {
    type Point = usize;
    type Dist = Rational;

    fn image(&self, x: &usize) -> usize {
        self.map(*x)
    }

    fn distance(&self, x: &usize, y: &usize) -> Rational {
        self.metric(*x, *y)
    }
}

impl Dynamics for SftGraph {
    type Point = SftPoint;
    type Dist = Dyadic;

    fn image(&self, x: &SftPoint) -> SftPoint {
        x.shift()
    }

    fn distance(&self, x: &SftPoint, y: &SftPoint) -> Dyadic {
        x.distance(y)
    }

    /// Backward scan for the next disagreement over an expansion long enough that every
    /// index below `len` sees its next difference (or the common periodic tail).
    fn pair_trace(&self, x: &SftPoint, y: &SftPoint, len: usize) -> Vec<Dyadic> {
        let period = num::integer::lcm(x.cycle().len(), y.cycle().len());
        let total = len + x.head().len().max(y.head().len()) + period;
        let mut next_diff = None;
        let mut out = vec![Dyadic::Zero; len];
        for i in (0..total).rev() {
            if x.symbol(i) != y.symbol(i) {
                next_diff = Some(i);
            }
            if i < len {
                out[i] = match next_diff {
                    Some(j) => Dyadic::Pow((j - i) as u32),
                    None => Dyadic::Zero,
                };
            }
        }
        out
    }
}

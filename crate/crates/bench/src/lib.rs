//! Fixtures shared by the benchmarks.

use chainscope::chain::critical_deltas;
use chainscope::corpus;
use chainscope::system::discretize;
use chainscope::{FiniteSystem, Rational};

pub fn tent(cells: usize) -> FiniteSystem {
    discretize(&corpus::tent_spec(cells)).expect("tent grid")
}

pub fn golden_rotation(cells: usize) -> FiniteSystem {
    discretize(&corpus::golden_rotation_spec(cells)).expect("rotation grid")
}

/// The median critical resolution, a scale with nontrivial chain structure.
pub fn middle_delta(sys: &FiniteSystem) -> Rational {
    let deltas = critical_deltas(sys);
    deltas[deltas.len() / 2]
}

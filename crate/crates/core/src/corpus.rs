//! Built-in example systems.

use crate::numeric::rat;
use crate::system::spec::{SystemModel, SystemSpec};
use crate::system::{discretize, FiniteSystem, Geometry, GridMapSpec, MapFamily, RealParam, SftGraph};

/// Three points cyclically permuted, discrete metric.
pub fn sys3() -> FiniteSystem {
    FiniteSystem::discrete(&["a", "b", "c"], vec![1, 2, 0]).expect("valid")
}

/// North-south: two fixed points `n`, `s` and a point `t` falling into `s`.
pub fn sysns() -> FiniteSystem {
    FiniteSystem::discrete(&["n", "s", "t"], vec![0, 1, 1]).expect("valid")
}

/// Identity on two points at distance 1.
pub fn sys2id() -> FiniteSystem {
    FiniteSystem::discrete(&["p", "q"], vec![0, 1]).expect("valid")
}

pub fn rotation_quarter_spec() -> GridMapSpec {
    GridMapSpec {
        family: MapFamily::Rotation { alpha: RealParam::Exact(rat(1, 4)) },
        cell_count: 4,
        geometry: Geometry::Circle,
    }
}

pub fn golden_rotation_spec(cells: usize) -> GridMapSpec {
    GridMapSpec { family: MapFamily::Rotation { alpha: RealParam::GoldenConjugate }, cell_count: cells, geometry: Geometry::Circle }
}

pub fn tent_spec(cells: usize) -> GridMapSpec {
    GridMapSpec {
        family: MapFamily::Tent { slope: RealParam::Exact(rat(2, 1)) },
        cell_count: cells,
        geometry: Geometry::Interval,
    }
}

fn grid(spec: GridMapSpec) -> SystemModel {
    let system = discretize(&spec).expect("corpus grid is valid");
    SystemModel::Grid { spec, system }
}

/// Every built-in, by name.
pub fn builtins() -> Vec<SystemSpec> {
    let named = |name: &str, model| SystemSpec { name: name.to_string(), model };
    vec![
        named("sys3", SystemModel::Finite(sys3())),
        named("sysns", SystemModel::Finite(sysns())),
        named("sys2id", SystemModel::Finite(sys2id())),
        named("full-2-shift", SystemModel::Sft(SftGraph::full_shift(2))),
        named("golden-mean", SystemModel::Sft(SftGraph::golden_mean())),
        named("rotation-quarter", grid(rotation_quarter_spec())),
        named("rotation-golden-16", grid(golden_rotation_spec(16))),
        named("tent-16", grid(tent_spec(16))),
    ]
}

pub fn builtin(name: &str) -> Option<SystemSpec> {
    builtins().into_iter().find(|s| s.name == name)
}

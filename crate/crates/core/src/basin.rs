//! Basins of chain components and of their cyclic classes.

use serde::Serialize;

use crate::chain::ChainDigraph;
use crate::cyclic::{cyclic_classes, CyclicDecomposition, ProximalPartition};
use crate::error::{Error, Result};
use crate::numeric::{rational_str, Rational};
use crate::system::FiniteSystem;

/// Nodes of the cycle that the orbit of `x` eventually enters, sorted.
pub fn omega_limit(sys: &FiniteSystem, x: usize) -> Vec<usize> {
    let (start, len) = eventual_cycle(sys, x);
    let mut cycle = sys.orbit(start, len);
    cycle.sort_unstable();
    cycle
}

/// First point of the eventual cycle along the orbit, and the cycle length.
fn eventual_cycle(sys: &FiniteSystem, x: usize) -> (usize, usize) {
    let mut first_seen = vec![usize::MAX; sys.len()];
    let mut u = x;
    let mut t = 0;
    while first_seen[u] == usize::MAX {
        first_seen[u] = t;
        u = sys.map(u);
        t += 1;
    }
    (u, t - first_seen[u])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasinAssignment {
    #[serde(with = "rational_str")]
    pub delta: Rational,
    /// Chain components, in the digraph's condensation order.
    pub components: Vec<Vec<usize>>,
    /// Index into `components` of the component containing the omega-limit set.
    pub component_of: Vec<usize>,
    /// `(class of f^T(x) - T) mod m`, `T` the entry time into the component.
    pub class_of_basin: Vec<usize>,
    pub entry_time: Vec<usize>,
    pub omega: Vec<Vec<usize>>,
    #[serde(skip)]
    pub decompositions: Vec<CyclicDecomposition>,
    /// Recurrent nodes whose omega-limit set lies in a different component from their own.
    pub recurrent_mismatch: Vec<usize>,
}

pub fn assign_basins(sys: &FiniteSystem, dg: &ChainDigraph) -> Result<BasinAssignment> {
    let components = dg.chain_components();
    let decompositions = components.iter().map(|c| cyclic_classes(dg, c)).collect::<Result<Vec<_>>>()?;
    let n = sys.len();
    let (mut component_of, mut class_of_basin, mut entry_time, mut omega) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut recurrent_mismatch = Vec::new();
    for x in 0..n {
        let om = omega_limit(sys, x);
        let ci = dg.component_index(om[0]).ok_or(Error::OmegaNotInComponent(x))?;
        if om.iter().any(|&u| dg.component_index(u) != Some(ci)) {
            return Err(Error::OmegaNotInComponent(x));
        }
        let d = &decompositions[ci];
        let m = d.period;
        let mut t = 0;
        let mut u = x;
        while !d.contains(u) {
            u = sys.map(u);
            t += 1;
        }
        let phase = |u: usize, t: usize| (d.class_of(u).unwrap() + m - t % m) % m;
        let j = phase(u, t);
        let next = sys.map(u);
        if !d.contains(next) || phase(next, t + 1) != j {
            return Err(Error::ModelInconsistency(format!("class phase of {} changes after entry", sys.label(x))));
        }
        if dg.component_index(x).is_some_and(|own| own != ci) {
            recurrent_mismatch.push(x);
        }
        component_of.push(ci);
        class_of_basin.push(j);
        entry_time.push(t);
        omega.push(om);
    }
    Ok(BasinAssignment {
        delta: dg.delta(),
        components,
        component_of,
        class_of_basin,
        entry_time,
        omega,
        decompositions,
        recurrent_mismatch,
    })
}

impl BasinAssignment {
    /// `W^s(C)` for component `c`.
    pub fn component_basin(&self, c: usize) -> Vec<usize> {
        (0..self.component_of.len()).filter(|&x| self.component_of[x] == c).collect()
    }

    /// `V^s(D)` for class `j` of component `c`.
    pub fn class_basin(&self, c: usize, j: usize) -> Vec<usize> {
        (0..self.component_of.len()).filter(|&x| self.component_of[x] == c && self.class_of_basin[x] == j).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub component_partition: bool,
    pub class_partition: bool,
    pub phase_law: bool,
    pub violations: Vec<String>,
}

impl PartitionReport {
    pub fn all_hold(&self) -> bool {
        self.component_partition && self.class_partition && self.phase_law
    }
}

/// Checks that component basins partition the nodes, class basins partition each component
/// basin, and the orbit of every node follows its class with the right phase after entry.
pub fn verify_partition_laws(sys: &FiniteSystem, ba: &BasinAssignment) -> PartitionReport {
    let n = sys.len();
    let mut violations = Vec::new();

    let mut count = vec![0usize; n];
    for c in 0..ba.components.len() {
        for x in ba.component_basin(c) {
            count[x] += 1;
        }
    }
    let component_partition = ba.component_of.len() == n && count.iter().all(|&k| k == 1);
    if !component_partition {
        violations.push("component basins do not partition the nodes".into());
    }

    let mut class_partition = true;
    for (c, d) in ba.decompositions.iter().enumerate() {
        let basin = ba.component_basin(c);
        let mut covered: Vec<usize> = (0..d.period).flat_map(|j| ba.class_basin(c, j)).collect();
        covered.sort_unstable();
        if covered != basin {
            class_partition = false;
            violations.push(format!("class basins of component {c} do not partition its basin"));
        }
    }

    let mut phase_law = true;
    for x in 0..n {
        let d = &ba.decompositions[ba.component_of[x]];
        let m = d.period;
        let t0 = ba.entry_time[x];
        let horizon = t0 + 2 * m + ba.omega[x].len();
        let mut u = sys.iterate(x, t0);
        for i in t0..horizon {
            if d.class_of(u) != Some((ba.class_of_basin[x] + i) % m) {
                phase_law = false;
                violations.push(format!("orbit of {} is out of phase at time {i}", sys.label(x)));
                break;
            }
            u = sys.map(u);
        }
    }
    PartitionReport { component_partition, class_partition, phase_law, violations }
}

/// Class-basin labels refined along a proximal-partition ladder: one class index per rung,
/// or `None` for nodes outside the component's basin.
pub fn refined_class_basins(sys: &FiniteSystem, partition: &ProximalPartition) -> Vec<Option<Vec<usize>>> {
    (0..sys.len())
        .map(|x| {
            let om = omega_limit(sys, x);
            if !om.iter().all(|u| partition.component.contains(u)) {
                return None;
            }
            let mut t = 0;
            let mut u = x;
            while !partition.component.contains(&u) {
                u = sys.map(u);
                t += 1;
            }
            Some(partition.per_delta.iter().map(|d| (d.class_of(u).unwrap() + d.period - t % d.period) % d.period).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::cyclic::proximal_partition;
    use crate::numeric::rat;

    #[test]
    fn omega_limits() {
        assert_eq!(omega_limit(&corpus::sysns(), 2), vec![1]);
        assert_eq!(omega_limit(&corpus::sys3(), 0), vec![0, 1, 2]);
        assert_eq!(omega_limit(&corpus::sys2id(), 0), vec![0]);
    }

    #[test]
    fn north_south_basins() {
        let s = corpus::sysns();
        let dg = ChainDigraph::build(&s, rat(1, 2));
        let ba = assign_basins(&s, &dg).unwrap();
        let s_comp = ba.components.iter().position(|c| c == &vec![1]).unwrap();
        assert_eq!(ba.component_basin(s_comp), vec![1, 2]);
        assert!(verify_partition_laws(&s, &ba).all_hold());
    }

    #[test]
    fn sys3_class_basins() {
        let s = corpus::sys3();
        let ba = assign_basins(&s, &ChainDigraph::build(&s, rat(1, 2))).unwrap();
        assert_eq!(ba.class_of_basin, vec![0, 1, 2]);
        assert!(verify_partition_laws(&s, &ba).all_hold());
        let ba = assign_basins(&s, &ChainDigraph::build(&s, rat(1, 1))).unwrap();
        assert_eq!(ba.class_of_basin, vec![0, 0, 0]);
    }

    #[test]
    fn refined_labels_follow_the_ladder() {
        let s = corpus::sys3();
        let p = proximal_partition(&s, &[0, 1, 2], &[rat(1, 1), rat(1, 2)]).unwrap();
        let r = refined_class_basins(&s, &p);
        assert_eq!(r, vec![Some(vec![0, 0]), Some(vec![0, 1]), Some(vec![0, 2])]);
    }
}

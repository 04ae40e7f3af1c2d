//! Cyclic decompositions of chain components and the chain-proximal relation.

use std::collections::VecDeque;

use serde::Serialize;

use crate::chain::ChainDigraph;
use crate::error::{Error, Result};
use crate::graph::period_of;
use crate::numeric::{rational_str, Rational};
use crate::system::FiniteSystem;

/// Outcome of the (P4) saturation search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum TransientIndex {
    Index { value: usize },
    CapExceeded { cap: usize, covered: usize, total: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicDecomposition {
    pub component: Vec<usize>,
    #[serde(with = "rational_str")]
    pub delta: Rational,
    pub period: usize,
    /// Classes in order `0..period`, each sorted.
    pub classes: Vec<Vec<usize>>,
    #[serde(skip)]
    class_of: Vec<Option<usize>>,
    /// A pair `u, v` in the component with `d(u, v) <= delta` but different classes, if any.
    pub p2_witness: Option<(usize, usize)>,
    pub transient_index: Option<TransientIndex>,
}

impl CyclicDecomposition {
    pub fn class_of(&self, u: usize) -> Option<usize> {
        self.class_of.get(u).copied().flatten()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.class_of(u).is_some()
    }
}

fn require_component(dg: &ChainDigraph, c: &[usize]) -> Result<Vec<usize>> {
    if !dg.is_component(c) {
        return Err(Error::NotAComponent(c.to_vec()));
    }
    let mut sorted = c.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// gcd of the lengths of all cycles inside the component.
pub fn component_period(dg: &ChainDigraph, c: &[usize]) -> Result<usize> {
    let c = require_component(dg, c)?;
    Ok(period_of(dg.graph(), &c).expect("chain component carries an edge").0)
}

/// Classes `lvl(u) mod m` from BFS levels rooted at the smallest node. A (P2) failure is
/// recorded in `p2_witness`; [`cyclic_classes_strict`] turns it into an error.
pub fn cyclic_classes(dg: &ChainDigraph, c: &[usize]) -> Result<CyclicDecomposition> {
    let c = require_component(dg, c)?;
    let (period, lvl) = period_of(dg.graph(), &c).expect("chain component carries an edge");
    let mut class_of = vec![None; dg.node_count()];
    let mut classes = vec![Vec::new(); period];
    for &u in &c {
        class_of[u] = Some(lvl[u] % period);
        classes[lvl[u] % period].push(u);
    }
    let p2_witness = dg.system().and_then(|sys| {
        c.iter().flat_map(|&u| c.iter().map(move |&v| (u, v))).find(|&(u, v)| {
            u < v && sys.metric(u, v) <= dg.delta() && class_of[u] != class_of[v]
        })
    });
    Ok(CyclicDecomposition { component: c, delta: dg.delta(), period, classes, class_of, p2_witness, transient_index: None })
}

pub fn cyclic_classes_strict(dg: &ChainDigraph, c: &[usize]) -> Result<CyclicDecomposition> {
    let d = cyclic_classes(dg, c)?;
    if let Some((u, v)) = d.p2_witness {
        return Err(Error::ModelInconsistency(format!(
            "({}, {}) are within delta but in different cyclic classes",
            dg.label(u),
            dg.label(v)
        )));
    }
    Ok(d)
}

/// Cyclic classes together with the transient index at the default cap.
pub fn decompose(dg: &ChainDigraph, c: &[usize]) -> Result<CyclicDecomposition> {
    let mut d = cyclic_classes(dg, c)?;
    let cap = default_cap(d.component.len());
    d.transient_index = Some(match transient_index(dg, &d.component, cap) {
        Ok(value) => TransientIndex::Index { value },
        Err(Error::CapExceeded { cap, covered, total }) => TransientIndex::CapExceeded { cap, covered, total },
        Err(e) => return Err(e),
    });
    Ok(d)
}

pub fn default_cap(size: usize) -> usize {
    (size - 1) * (size - 1) + 2
}

/// Square boolean matrix with bitset rows.
#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    k: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    fn zeros(k: usize) -> Self {
        let words = k.div_ceil(64).max(1);
        BitMatrix { k, words, rows: vec![0; k * words] }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                if self.get(i, j) {
                    let (dst, src) = (i * self.words, j * other.words);
                    for w in 0..self.words {
                        out.rows[dst + w] |= other.rows[src + w];
                    }
                }
            }
        }
        out
    }
}

/// Adjacency of the component as a bit matrix over local indices.
fn local_matrix(dg: &ChainDigraph, c: &[usize]) -> BitMatrix {
    let mut index = vec![usize::MAX; dg.node_count()];
    for (i, &u) in c.iter().enumerate() {
        index[u] = i;
    }
    let mut a = BitMatrix::zeros(c.len());
    for (i, &u) in c.iter().enumerate() {
        for &v in dg.graph().successors(u) {
            if index[v] != usize::MAX {
                a.set(i, index[v]);
            }
        }
    }
    a
}

fn power(a: &BitMatrix, e: usize) -> BitMatrix {
    let mut out = a.clone();
    for _ in 1..e {
        out = out.mul(a);
    }
    out
}

/// Smallest `N` with a path of length `m n` inside the component between every same-class
/// pair for all `N <= n <= cap`. Paths of length `m` keep the class, so once every class
/// block of `A^(m n)` is full it stays full.
pub fn transient_index(dg: &ChainDigraph, c: &[usize], cap: usize) -> Result<usize> {
    let d = cyclic_classes(dg, c)?;
    let c = &d.component;
    let m = d.period;
    let step = power(&local_matrix(dg, c), m);
    let local_class: Vec<usize> = c.iter().map(|&u| d.class_of(u).unwrap()).collect();
    let total: usize = d.classes.iter().map(|k| k.len() * k.len()).sum();
    let coverage = |r: &BitMatrix| {
        let k = c.len();
        (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| local_class[i] == local_class[j] && r.get(i, j)).count()
    };
    let mut r = step.clone();
    let mut covered = 0;
    for n in 1..=cap.max(1) {
        covered = coverage(&r);
        if covered == total {
            return Ok(n);
        }
        r = r.mul(&step);
    }
    Err(Error::CapExceeded { cap, covered, total })
}

/// Whether synchronized chains from `x` and `y` inside the component can meet.
pub fn chain_proximal_at(dg: &ChainDigraph, c: &[usize], x: usize, y: usize) -> Result<bool> {
    let c = require_component(dg, c)?;
    let k = c.len();
    let mut index = vec![usize::MAX; dg.node_count()];
    for (i, &u) in c.iter().enumerate() {
        index[u] = i;
    }
    for z in [x, y] {
        if z >= dg.node_count() || index[z] == usize::MAX {
            return Err(Error::NotInComponent(z));
        }
    }
    let succ: Vec<Vec<usize>> =
        c.iter().map(|&u| dg.graph().successors(u).iter().map(|&v| index[v]).filter(|&i| i != usize::MAX).collect()).collect();
    let mut seen = vec![false; k * k];
    let start = (index[x], index[y]);
    seen[start.0 * k + start.1] = true;
    let mut queue = VecDeque::from([start]);
    while let Some((a, b)) = queue.pop_front() {
        if a == b {
            return Ok(true);
        }
        for &a2 in &succ[a] {
            for &b2 in &succ[b] {
                if !seen[a2 * k + b2] {
                    seen[a2 * k + b2] = true;
                    queue.push_back((a2, b2));
                }
            }
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProximalPartition {
    pub component: Vec<usize>,
    /// Ladder entries actually used.
    #[serde(serialize_with = "serialize_rationals")]
    pub ladder: Vec<Rational>,
    /// First ladder entry at which the component no longer forms one chain component.
    #[serde(serialize_with = "serialize_opt_rational")]
    pub split_at: Option<Rational>,
    pub classes: Vec<Vec<usize>>,
    pub per_delta: Vec<CyclicDecomposition>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::numeric::format_rational))
}

fn serialize_opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&crate::numeric::format_rational(r)),
        None => s.serialize_none(),
    }
}

/// Meet of two partitions of the same set; classes sorted by smallest element.
pub fn meet(a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x.iter().copied().filter(|u| y.contains(u)).collect::<Vec<_>>()))
        .filter(|v| !v.is_empty())
        .collect();
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

/// Common refinement of the class partitions of `c` along a descending ladder, stopping at
/// the first resolution where `c` is no longer a single chain component.
pub fn proximal_partition(sys: &FiniteSystem, c: &[usize], ladder: &[Rational]) -> Result<ProximalPartition> {
    if ladder.is_empty() {
        return Err(Error::EmptyLadder);
    }
    if ladder.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument("ladder must be strictly descending".into()));
    }
    let mut comp = c.to_vec();
    comp.sort_unstable();
    comp.dedup();
    let mut classes = vec![comp.clone()];
    let mut used = Vec::new();
    let mut per_delta = Vec::new();
    let mut split_at = None;
    for (i, &delta) in ladder.iter().enumerate() {
        let dg = ChainDigraph::build(sys, delta);
        if !dg.is_component(&comp) {
            if i == 0 {
                return Err(Error::NotAComponent(comp));
            }
            split_at = Some(delta);
            break;
        }
        let d = decompose(&dg, &comp)?;
        classes = meet(&classes, &d.classes);
        used.push(delta);
        per_delta.push(d);
    }
    Ok(ProximalPartition { component: comp, ladder: used, split_at, classes, per_delta })
}

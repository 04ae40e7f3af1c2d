//! Chain structure of a finite system at a fixed resolution `delta`.
//!
//! Paths of the chain digraph are exactly the `delta`-chains: `u -> v` iff
//! `d(f(u), v) <= delta`.

use std::fmt::Write as _;

use num::{BigInt, BigRational, One, Zero};

use crate::graph::{Condensation, Digraph};
use crate::numeric::{format_rational, Rational};
use crate::system::FiniteSystem;

#[derive(Debug, Clone)]
pub struct ChainDigraph<'a> {
    system: Option<&'a FiniteSystem>,
    delta: Rational,
    graph: Digraph,
    cond: Condensation,
}

impl<'a> ChainDigraph<'a> {
    pub fn build(sys: &'a FiniteSystem, delta: Rational) -> Self {
        let n = sys.len();
        let graph = Digraph::from_edges(
            n,
            (0..n).flat_map(|u| {
                let fu = sys.map(u);
                (0..n).filter(move |&v| sys.metric(fu, v) <= delta).map(move |v| (u, v))
            }),
        );
        let cond = Condensation::new(&graph);
        ChainDigraph { system: Some(sys), delta, graph, cond }
    }

    /// A digraph supplied directly, with no underlying metric system.
    pub fn from_digraph(graph: Digraph, delta: Rational) -> Self {
        let cond = Condensation::new(&graph);
        ChainDigraph { system: None, delta, graph, cond }
    }

    /// A supplied digraph over a metric system, bypassing the `delta` edge rule.
    pub fn inject(sys: &'a FiniteSystem, graph: Digraph, delta: Rational) -> Self {
        let cond = Condensation::new(&graph);
        ChainDigraph { system: Some(sys), delta, graph, cond }
    }

    pub fn system(&self) -> Option<&'a FiniteSystem> {
        self.system
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn condensation(&self) -> &Condensation {
        &self.cond
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn label(&self, u: usize) -> String {
        match self.system {
            Some(s) => s.label(u).to_string(),
            None => u.to_string(),
        }
    }

    pub fn is_recurrent(&self, u: usize) -> bool {
        self.cond.nontrivial[self.cond.comp_of[u]]
    }

    /// Nodes lying on a directed cycle, ascending.
    pub fn chain_recurrent_set(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&u| self.is_recurrent(u)).collect()
    }

    /// Chain components in condensation order (sources first). Each is sorted.
    pub fn chain_components(&self) -> Vec<Vec<usize>> {
        self.cond
            .components
            .iter()
            .zip(&self.cond.nontrivial)
            .filter(|(_, &nt)| nt)
            .map(|(c, _)| c.clone())
            .collect()
    }

    /// Index into [`Self::chain_components`] of the component containing `u`.
    pub fn component_index(&self, u: usize) -> Option<usize> {
        let c = self.cond.comp_of[u];
        self.cond.nontrivial[c].then(|| self.cond.nontrivial[..c].iter().filter(|&&b| b).count())
    }

    /// Whether `nodes` (in any order) is exactly one chain component.
    pub fn is_component(&self, nodes: &[usize]) -> bool {
        let Some(&first) = nodes.first() else { return false };
        if first >= self.node_count() || !self.is_recurrent(first) {
            return false;
        }
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.cond.components[self.cond.comp_of[first]] == sorted
    }

    /// A `delta`-chain of length >= 1 from `x` to `y` exists.
    pub fn reaches(&self, x: usize, y: usize) -> bool {
        self.graph.reachable_from(x)[y]
    }

    /// Nodes of `component` whose image lies outside it. At a fixed resolution a chain
    /// component need not be forward invariant: the image of a node can sit just outside.
    pub fn escaping_nodes(&self, component: &[usize]) -> Vec<usize> {
        let Some(sys) = self.system else { return Vec::new() };
        component.iter().copied().filter(|&u| !component.contains(&sys.map(u))).collect()
    }

    /// Complete Lyapunov function: distinct integers on chain components, non-integers
    /// on transient nodes, strictly decreasing along every edge between components.
    pub fn complete_lyapunov(&self) -> Vec<BigRational> {
        let k = self.cond.components.len();
        let mut comp_value: Vec<BigRational> = vec![BigRational::zero(); k];
        let mut counter = BigInt::zero();
        let two = BigRational::from_integer(BigInt::from(2));
        for c in (0..k).rev() {
            let max_succ = self.cond.dag[c].iter().map(|&d| &comp_value[d]).max().cloned();
            comp_value[c] = if self.cond.nontrivial[c] {
                let v = match &max_succ {
                    Some(m) => counter.clone().max(m.floor().to_integer() + BigInt::one()),
                    None => counter.clone(),
                };
                counter = &v + BigInt::one();
                BigRational::from_integer(v)
            } else {
                match max_succ {
                    // halfway to the next integer
                    Some(m) => (m.floor() + BigRational::one() + &m) / &two,
                    None => BigRational::one() / &two,
                }
            };
        }
        (0..self.node_count()).map(|u| comp_value[self.cond.comp_of[u]].clone()).collect()
    }

    /// Condensation DAG in DOT format; recurrent components are drawn as boxes.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph condensation {{");
        let _ = writeln!(out, "  label=\"delta = {}\";", format_rational(&self.delta));
        for (i, comp) in self.cond.components.iter().enumerate() {
            let names: Vec<String> = comp.iter().map(|&u| self.label(u)).collect();
            let shape = if self.cond.nontrivial[i] { "box" } else { "ellipse" };
            let _ = writeln!(out, "  c{i} [label=\"{}\", shape={shape}];", names.join(" ").replace('"', "\\\""));
        }
        for (i, targets) in self.cond.dag.iter().enumerate() {
            for j in targets {
                let _ = writeln!(out, "  c{i} -> c{j};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Sorted distinct values of `d(f(u), v)`; the chain digraph is constant between them.
pub fn critical_deltas(sys: &FiniteSystem) -> Vec<Rational> {
    let n = sys.len();
    let mut out: Vec<Rational> = (0..n).flat_map(|u| (0..n).map(move |v| sys.metric(sys.map(u), v))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

//! Directed graphs on `0..n` and the algorithms the analyses share:
//! strongly connected components, condensation order, periods, reachability.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use num::integer::gcd;

/// Adjacency-list digraph on nodes `0..n`. Successor lists are sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { succ: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Digraph::new(n);
        for (u, v) in edges {
            g.succ[u].push(v);
        }
        g.normalize();
        g
    }

    pub fn from_adjacency(adj: &[Vec<bool>]) -> Self {
        let n = adj.len();
        Digraph::from_edges(
            n,
            (0..n).flat_map(|u| (0..n).filter(move |&v| adj[u][v]).map(move |v| (u, v))),
        )
    }

    fn normalize(&mut self) {
        for s in &mut self.succ {
            s.sort_unstable();
            s.dedup();
        }
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, u: usize) -> &[usize] {
        &self.succ[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    pub fn reversed(&self) -> Digraph {
        Digraph::from_edges(self.node_count(), self.edges().map(|(u, v)| (v, u)))
    }

    /// Subgraph induced on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Digraph {
        let mut index = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            index[u] = i;
        }
        Digraph::from_edges(
            nodes.len(),
            nodes.iter().enumerate().flat_map(|(i, &u)| {
                let index = &index;
                self.succ[u].iter().filter(move |&&v| index[v] != usize::MAX).map(move |&v| (i, index[v]))
            }),
        )
    }

    /// Nodes reachable from `start` by paths of length >= 1.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue: VecDeque<usize> = self.succ[start].iter().copied().collect();
        for &v in &self.succ[start] {
            seen[v] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Strongly connected components (Tarjan, iterative). Each component is sorted.
    pub fn tarjan_scc(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut next = 0;

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < self.succ[v].len() {
                    let w = self.succ[v][*pos];
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// Whether the subgraph induced on `nodes` is strongly connected and has an edge.
    pub fn is_irreducible(&self) -> bool {
        let sccs = self.tarjan_scc();
        sccs.len() == 1 && self.edge_count() > 0
    }
}

/// SCC decomposition with the condensation DAG in deterministic topological order.
#[derive(Debug, Clone)]
pub struct Condensation {
    /// Components in topological order (sources first); ties broken by smallest node id.
    pub components: Vec<Vec<usize>>,
    /// `comp_of[u]` = index into `components`.
    pub comp_of: Vec<usize>,
    /// Condensation DAG edges, sorted.
    pub dag: Vec<Vec<usize>>,
    /// Whether each component carries an internal edge (is a cycle-bearing SCC).
    pub nontrivial: Vec<bool>,
}

impl Condensation {
    pub fn new(g: &Digraph) -> Self {
        let raw = g.tarjan_scc();
        let mut raw_of = vec![0; g.node_count()];
        for (i, c) in raw.iter().enumerate() {
            for &u in c {
                raw_of[u] = i;
            }
        }
        let k = raw.len();
        let mut dag: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        let mut indeg = vec![0usize; k];
        for (u, v) in g.edges() {
            let (a, b) = (raw_of[u], raw_of[v]);
            if a != b && dag[a].insert(b) {
                indeg[b] += 1;
            }
        }
        // Kahn's algorithm keyed by smallest contained node id.
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
            (0..k).filter(|&c| indeg[c] == 0).map(|c| Reverse((raw[c][0], c))).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(Reverse((_, c))) = heap.pop() {
            order.push(c);
            for &d in &dag[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    heap.push(Reverse((raw[d][0], d)));
                }
            }
        }
        let mut new_id = vec![0; k];
        for (i, &c) in order.iter().enumerate() {
            new_id[c] = i;
        }
        let components: Vec<Vec<usize>> = order.iter().map(|&c| raw[c].clone()).collect();
        let comp_of: Vec<usize> = raw_of.iter().map(|&c| new_id[c]).collect();
        let mut new_dag = vec![Vec::new(); k];
        for (c, targets) in dag.iter().enumerate() {
            new_dag[new_id[c]] = targets.iter().map(|&d| new_id[d]).collect();
            new_dag[new_id[c]].sort_unstable();
        }
        let nontrivial = components
            .iter()
            .map(|c| c.len() > 1 || g.has_edge(c[0], c[0]))
            .collect();
        Condensation { components, comp_of, dag: new_dag, nontrivial }
    }
}

/// BFS levels from `root` inside `members` (`usize::MAX` for unreached nodes).
pub fn bfs_levels(g: &Digraph, members: &[bool], root: usize) -> Vec<usize> {
    let mut lvl = vec![usize::MAX; g.node_count()];
    lvl[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in g.successors(u) {
            if members[v] && lvl[v] == usize::MAX {
                lvl[v] = lvl[u] + 1;
                queue.push_back(v);
            }
        }
    }
    lvl
}

/// Period (gcd of cycle lengths) of a strongly connected node set, computed from BFS levels:
/// the gcd over internal edges `(u, v)` of `|lvl(u) + 1 - lvl(v)|`. Returns `None` when the set
/// carries no internal edge. Root is the smallest node.
pub fn period_of(g: &Digraph, nodes: &[usize]) -> Option<(usize, Vec<usize>)> {
    let mut members = vec![false; g.node_count()];
    for &u in nodes {
        members[u] = true;
    }
    let root = *nodes.iter().min()?;
    let lvl = bfs_levels(g, &members, root);
    let mut m = 0usize;
    let mut has_edge = false;
    for &u in nodes {
        for &v in g.successors(u) {
            if members[v] {
                has_edge = true;
                m = gcd(m, (lvl[u] as i64 + 1 - lvl[v] as i64).unsigned_abs() as usize);
            }
        }
    }
    if !has_edge {
        return None;
    }
    Some((m.max(1), lvl))
}

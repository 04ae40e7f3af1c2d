//! Vertex shifts (one-sided subshifts of finite type) and their eventually periodic points.

use std::collections::VecDeque;
use std::fmt;

use num::integer::lcm;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{period_of, Condensation, Digraph};
use crate::numeric::Dyadic;

/// A vertex-shift presentation: sequences are walks in the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftGraph {
    adjacency: Vec<Vec<bool>>,
    graph: Digraph,
}

/// Cyclic structure of one strongly connected block of an [`SftGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftComponent {
    pub vertices: Vec<usize>,
    pub period: usize,
    /// `class_of[v]` for every vertex of the graph; `None` outside this block.
    pub class_of: Vec<Option<usize>>,
}

impl SftComponent {
    pub fn class_vertices(&self, class: usize) -> Vec<usize> {
        self.vertices.iter().copied().filter(|&v| self.class_of[v] == Some(class)).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.class_of[v].is_some()
    }
}

impl SftGraph {
    pub fn new(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidGraph("vertex_count must be positive".into()));
        }
        if let Some(r) = adjacency.iter().position(|row| row.len() != n) {
            return Err(Error::InvalidGraph(format!("row {r} has {} entries, expected {n}", adjacency[r].len())));
        }
        for v in 0..n {
            if !adjacency[v].iter().any(|&b| b) {
                return Err(Error::InvalidGraph(format!("vertex {v} has no outgoing edge")));
            }
            if !(0..n).any(|u| adjacency[u][v]) {
                return Err(Error::InvalidGraph(format!("vertex {v} has no incoming edge")));
            }
        }
        let graph = Digraph::from_adjacency(&adjacency);
        Ok(SftGraph { adjacency, graph })
    }

    /// Builds from a 0/1 integer matrix.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let mut adj = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for &b in row {
                match b {
                    0 => out.push(false),
                    1 => out.push(true),
                    other => return Err(Error::InvalidGraph(format!("row {i} has entry {other}, expected 0 or 1"))),
                }
            }
            adj.push(out);
        }
        SftGraph::new(adj)
    }

    /// The full shift on `k` symbols.
    pub fn full_shift(k: usize) -> Self {
        SftGraph::new(vec![vec![true; k]; k]).expect("full shift is valid")
    }

    /// Binary sequences without two consecutive 1s.
    pub fn golden_mean() -> Self {
        SftGraph::new(vec![vec![true, true], vec![true, false]]).expect("golden mean shift is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u][v]
    }

    pub fn is_irreducible(&self) -> bool {
        self.graph.is_irreducible()
    }

    pub fn is_admissible(&self, word: &[usize]) -> bool {
        word.iter().all(|&v| v < self.vertex_count()) && word.windows(2).all(|w| self.adjacency[w[0]][w[1]])
    }

    /// Strongly connected blocks carrying a cycle, in condensation order, with vertex cyclic classes.
    pub fn components(&self) -> Vec<SftComponent> {
        let cond = Condensation::new(&self.graph);
        cond.components
            .iter()
            .zip(&cond.nontrivial)
            .filter(|(_, &nt)| nt)
            .map(|(c, _)| self.component_of_vertices(c))
            .collect()
    }

    fn component_of_vertices(&self, vertices: &[usize]) -> SftComponent {
        let (period, lvl) = period_of(&self.graph, vertices).expect("nontrivial block has an internal edge");
        let mut class_of = vec![None; self.vertex_count()];
        for &v in vertices {
            class_of[v] = Some(lvl[v] % period);
        }
        SftComponent { vertices: vertices.to_vec(), period, class_of }
    }

    /// The single component of an irreducible graph.
    pub fn irreducible_component(&self) -> Result<SftComponent> {
        let comps = self.graph.tarjan_scc();
        if comps.len() != 1 {
            return Err(Error::NotIrreducible(comps.len()));
        }
        Ok(self.component_of_vertices(&comps[0]))
    }

    /// Lexicographically smallest intermediate word `w` with exactly `steps` edges in `u w v`
    /// (`steps >= 1`, so `w` has `steps - 1` symbols).
    pub fn word_of_length(&self, u: usize, v: usize, steps: usize) -> Option<Vec<usize>> {
        if steps == 0 {
            return None;
        }
        let n = self.vertex_count();
        // can[t][x]: x reaches v in exactly t edges
        let mut can = vec![vec![false; n]; steps];
        can[0][v] = true;
        for t in 1..steps {
            for x in 0..n {
                can[t][x] = self.graph.successors(x).iter().any(|&y| can[t - 1][y]);
            }
        }
        if !self.graph.successors(u).iter().any(|&y| can[steps - 1][y]) {
            return None;
        }
        let mut word = Vec::with_capacity(steps - 1);
        let mut cur = u;
        for t in (1..steps).rev() {
            cur = *self.graph.successors(cur).iter().find(|&&y| can[t][y])?;
            word.push(cur);
        }
        Some(word)
    }

    /// Shortest path `u -> v` with at least one edge, returned as the intermediate word.
    pub fn connecting_word(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        self.shortest_steps(u, v).and_then(|s| self.word_of_length(u, v, s))
    }

    /// Minimal number of edges (>= 1) of a path from `u` to `v`.
    pub fn shortest_steps(&self, u: usize, v: usize) -> Option<usize> {
        let n = self.vertex_count();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &y in self.graph.successors(u) {
            if dist[y] == usize::MAX {
                dist[y] = 1;
                queue.push_back(y);
            }
        }
        while let Some(x) = queue.pop_front() {
            if x == v {
                return Some(dist[x]);
            }
            for &y in self.graph.successors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Validates and canonicalizes a point.
    pub fn point(&self, head: Vec<usize>, cycle: Vec<usize>) -> Result<SftPoint> {
        if cycle.is_empty() {
            return Err(Error::InvalidPoint("cycle must be nonempty".into()));
        }
        let p = SftPoint { head, cycle };
        self.check_point(&p)?;
        Ok(p.canonical())
    }

    pub fn check_point(&self, p: &SftPoint) -> Result<()> {
        let mut word = p.head.clone();
        word.extend_from_slice(&p.cycle);
        word.extend_from_slice(&p.cycle);
        if !self.is_admissible(&word) {
            return Err(Error::InvalidPoint(format!("{p} is not an admissible sequence")));
        }
        Ok(())
    }

    /// Distance `2^-k` at the first differing index `k`, or 0 for equal points.
    pub fn distance(&self, x: &SftPoint, y: &SftPoint) -> Result<Dyadic> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(x.distance(y))
    }

    pub fn shift(&self, x: &SftPoint) -> Result<SftPoint> {
        self.check_point(x)?;
        Ok(x.shift())
    }

    /// Parses `"head|cycle"`; symbols are single digits, or comma separated when any contains a comma.
    pub fn parse_point(&self, s: &str) -> Result<SftPoint> {
        let (h, c) = s
            .trim()
            .split_once('|')
            .ok_or_else(|| Error::InvalidPoint(format!("expected \"head|cycle\", got {s:?}")))?;
        let head = parse_word(h)?;
        let cycle = parse_word(c)?;
        self.point(head, cycle)
    }

    /// A random point whose symbols stay in `vertices` (which must induce a strongly connected block).
    pub fn random_point<R: Rng>(&self, rng: &mut R, vertices: &[usize], head_len: usize, cycle_len: usize) -> SftPoint {
        let start = vertices[rng.gen_range(0..vertices.len())];
        let inside = |v: usize| vertices.contains(&v);
        let mut walk = vec![start];
        while walk.len() < head_len + cycle_len.max(1) {
            let cur = *walk.last().unwrap();
            let next: Vec<usize> = self.graph.successors(cur).iter().copied().filter(|&v| inside(v)).collect();
            walk.push(next[rng.gen_range(0..next.len())]);
        }
        let cycle_start = walk[head_len];
        let last = *walk.last().unwrap();
        let closing = self.connecting_word(last, cycle_start).expect("block is strongly connected");
        let head = walk[..head_len].to_vec();
        let mut cycle = walk[head_len..].to_vec();
        cycle.extend(closing);
        SftPoint::new(head, cycle)
    }

    /// Topological entropy `ln rho(A)` to absolute accuracy `tol`.
    ///
    /// Each strongly connected block `B` is iterated as `B + I` (primitive), and the
    /// Collatz-Wielandt quotients bracket `rho(B) + 1`.
    pub fn entropy(&self, tol: f64) -> Result<f64> {
        const MAX_ITER: usize = 1_000_000;
        let cond = Condensation::new(&self.graph);
        let mut best = f64::NEG_INFINITY;
        for (comp, &nontrivial) in cond.components.iter().zip(&cond.nontrivial) {
            if !nontrivial {
                continue;
            }
            let block = self.graph.induced(comp);
            let k = comp.len();
            let mut x = vec![1.0f64; k];
            let mut iterations = 0;
            let rho = loop {
                iterations += 1;
                let y: Vec<f64> = (0..k).map(|i| x[i] + block.successors(i).iter().map(|&j| x[j]).sum::<f64>()).collect();
                let ratios = (0..k).map(|i| y[i] / x[i]);
                let lo = ratios.clone().fold(f64::INFINITY, f64::min) - 1.0;
                let hi = ratios.fold(f64::NEG_INFINITY, f64::max) - 1.0;
                if lo > 0.0 && hi.ln() - lo.ln() <= tol {
                    break (lo * hi).sqrt();
                }
                if iterations >= MAX_ITER {
                    return Err(Error::NoConvergence { iterations, width: hi - lo });
                }
                let norm = y.iter().cloned().fold(0.0, f64::max);
                x = y.into_iter().map(|v| v / norm).collect();
            };
            best = best.max(rho.ln());
        }
        Ok(best)
    }
}

fn parse_word(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::InvalidPoint(format!("bad symbol word {s:?}"));
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect()
    }
}

/// The eventually periodic sequence `head cycle cycle cycle ...`, kept in canonical form:
/// `cycle` is primitive and `head` does not end with the last symbol of `cycle`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SftPoint {
    head: Vec<usize>,
    cycle: Vec<usize>,
}

impl SftPoint {
    /// Canonicalizes without checking admissibility. Panics on an empty cycle.
    pub fn new(head: Vec<usize>, cycle: Vec<usize>) -> Self {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        SftPoint { head, cycle }.canonical()
    }

    /// The constant sequence `v v v ...`.
    pub fn fixed(v: usize) -> Self {
        SftPoint { head: Vec::new(), cycle: vec![v] }
    }

    pub fn periodic(cycle: Vec<usize>) -> Self {
        SftPoint::new(Vec::new(), cycle)
    }

    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn canonical(mut self) -> Self {
        let p = self.cycle.len();
        if let Some(q) = (1..p).find(|&q| p.is_multiple_of(q) && (q..p).all(|i| self.cycle[i] == self.cycle[i - q])) {
            self.cycle.truncate(q);
        }
        while self.head.last().is_some_and(|h| h == self.cycle.last().unwrap()) {
            self.head.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    pub fn symbol(&self, i: usize) -> usize {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<usize> {
        (0..len).map(|i| self.symbol(i)).collect()
    }

    pub fn shift(&self) -> SftPoint {
        self.shift_by(1)
    }

    /// `sigma^k`.
    pub fn shift_by(&self, k: usize) -> SftPoint {
        let drop = k.min(self.head.len());
        let mut cycle = self.cycle.clone();
        let p = cycle.len();
        cycle.rotate_left((k - drop) % p);
        SftPoint { head: self.head[drop..].to_vec(), cycle }.canonical()
    }

    /// `2^-k` for the first index `k` where the sequences differ; `Zero` if equal.
    pub fn distance(&self, other: &SftPoint) -> Dyadic {
        if self == other {
            return Dyadic::Zero;
        }
        // canonical forms are unique, so a difference exists before this bound
        let bound = self.head.len().max(other.head.len()) + lcm(self.cycle.len(), other.cycle.len());
        match (0..bound).find(|&i| self.symbol(i) != other.symbol(i)) {
            Some(k) => Dyadic::Pow(k as u32),
            None => Dyadic::Zero,
        }
    }

    /// Length of the head plus cycle: the first index from which the sequence is periodic, plus one period.
    pub fn description_len(&self) -> usize {
        self.head.len() + self.cycle.len()
    }
}

impl fmt::Display for SftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.head.iter().chain(&self.cycle).any(|&v| v >= 10);
        let word = |w: &[usize]| -> String {
            if wide {
                w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            } else {
                w.iter().map(|v| v.to_string()).collect()
            }
        };
        write!(f, "{}|{}", word(&self.head), word(&self.cycle))
    }
}

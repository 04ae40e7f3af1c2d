//! Distal tuples and the dispersion constant `Delta_n`.

use std::collections::{HashMap, HashSet};

use num::integer::lcm;
use num::Zero;

use crate::error::{budget, Error, Result};
use crate::numeric::{Dyadic, Rational};
use crate::system::{Dynamics, FiniteSystem, SftComponent, SftGraph, SftPoint};

fn check_arity(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("tuple size must be at least 2, got {n}")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Lexicographic `k`-combinations of `0..n`, in place. Returns false when exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn min_pairwise<T>(items: &[T], d: impl Fn(&T, &T) -> Rational) -> Rational {
    let mut best: Option<Rational> = None;
    for a in 0..items.len() {
        for b in a + 1..items.len() {
            let v = d(&items[a], &items[b]);
            best = Some(best.map_or(v, |m| m.min(v)));
        }
    }
    best.unwrap_or_else(Rational::zero)
}

/// Exact `inf_i min_{a<b} d(f^i x_a, f^i x_b)`: the joint orbit is eventually periodic,
/// so the infimum is a minimum over the states visited before the first repeat.
pub fn finite_tuple_inf(sys: &FiniteSystem, tuple: &[usize]) -> Rational {
    let mut seen = HashSet::new();
    let mut state = tuple.to_vec();
    let mut inf: Option<Rational> = None;
    while seen.insert(state.clone()) {
        let m = min_pairwise(&state, |&a, &b| sys.metric(a, b));
        inf = Some(inf.map_or(m, |v| v.min(m)));
        for x in state.iter_mut() {
            *x = sys.map(*x);
        }
    }
    inf.unwrap_or_else(Rational::zero)
}

/// The `n`-subset of `class` with the largest orbit infimum (first in lexicographic order
/// among ties). `None` when `|class| < n`.
pub fn best_distal_finite(sys: &FiniteSystem, class: &[usize], n: usize, max_tuples: usize) -> Result<Option<(Vec<usize>, Rational)>> {
    check_arity(n)?;
    if class.len() < n {
        return Ok(None);
    }
    if binomial(class.len(), n) > max_tuples {
        return Err(budget("distal tuple enumeration", max_tuples));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<usize>, Rational)> = None;
    loop {
        let tuple: Vec<usize> = idx.iter().map(|&i| class[i]).collect();
        let inf = finite_tuple_inf(sys, &tuple);
        if best.as_ref().is_none_or(|(_, b)| inf > *b) {
            best = Some((tuple, inf));
        }
        if !next_combination(&mut idx, class.len()) {
            break;
        }
    }
    Ok(best)
}

/// First `n`-subset of `class` (lexicographic) whose orbit stays pairwise farther apart than `delta`.
pub fn find_distal_tuple_finite(sys: &FiniteSystem, class: &[usize], n: usize, delta: Rational, max_tuples: usize) -> Result<Option<Vec<usize>>> {
    check_arity(n)?;
    if class.len() < n {
        return Ok(None);
    }
    if binomial(class.len(), n) > max_tuples {
        return Err(budget("distal tuple enumeration", max_tuples));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let tuple: Vec<usize> = idx.iter().map(|&i| class[i]).collect();
        if finite_tuple_inf(sys, &tuple) > delta {
            return Ok(Some(tuple));
        }
        if !next_combination(&mut idx, class.len()) {
            return Ok(None);
        }
    }
}

/// `Delta_n`: the minimum over classes of the largest minimum pairwise distance of an
/// `n`-subset. Classes with fewer than `n` points contribute `0`.
pub fn compute_delta_n(sys: &FiniteSystem, classes: &[Vec<usize>], n: usize, max_nodes: usize) -> Result<Rational> {
    check_arity(n)?;
    let mut out: Option<Rational> = None;
    for class in classes {
        let v = class_dispersion(sys, class, n, max_nodes)?;
        out = Some(out.map_or(v, |o| o.min(v)));
    }
    Ok(out.unwrap_or_else(Rational::zero))
}

fn class_dispersion(sys: &FiniteSystem, class: &[usize], n: usize, max_nodes: usize) -> Result<Rational> {
    if class.len() < n {
        return Ok(Rational::zero());
    }
    struct Search<'a> {
        sys: &'a FiniteSystem,
        class: &'a [usize],
        n: usize,
        best: Rational,
        nodes: usize,
        cap: usize,
    }
    impl Search<'_> {
        fn go(&mut self, chosen: &mut Vec<usize>, next: usize, current: Option<Rational>) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(budget("dispersion search", self.cap));
            }
            if chosen.len() == self.n {
                self.best = self.best.max(current.unwrap_or_else(Rational::zero));
                return Ok(());
            }
            if self.class.len() - next < self.n - chosen.len() {
                return Ok(());
            }
            for i in next..self.class.len() {
                let p = self.class[i];
                let m = chosen.iter().map(|&q| self.sys.metric(p, q)).min();
                let cur = match (current, m) {
                    (Some(c), Some(m)) => Some(c.min(m)),
                    (None, m) => m,
                    (c, None) => c,
                };
                if cur.is_some_and(|c| c <= self.best) {
                    continue;
                }
                chosen.push(p);
                self.go(chosen, i + 1, cur)?;
                chosen.pop();
            }
            Ok(())
        }
    }
    let mut s = Search { sys, class, n, best: Rational::zero(), nodes: 0, cap: max_nodes };
    s.go(&mut Vec::with_capacity(n), 0, None)?;
    Ok(s.best)
}

/// Exact `inf_i min_{a<b} d(sigma^i x_a, sigma^i x_b)` for eventually periodic points.
pub fn sft_tuple_inf(g: &SftGraph, tuple: &[SftPoint]) -> Dyadic {
    let head = tuple.iter().map(|p| p.head().len()).max().unwrap_or(0);
    let period = tuple.iter().fold(1, |acc, p| lcm(acc, p.cycle().len()));
    let len = head + period;
    let mut inf = Dyadic::ONE;
    for a in 0..tuple.len() {
        for b in a + 1..tuple.len() {
            if let Some(&m) = g.pair_trace(&tuple[a], &tuple[b], len).iter().min() {
                inf = inf.min(m);
            }
        }
    }
    inf
}

/// Number of `k`-symbol words of the component that start in `class` (saturating).
pub fn class_word_count(g: &SftGraph, comp: &SftComponent, class: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    let v = g.vertex_count();
    let mut ways: Vec<usize> = (0..v).map(|u| (comp.class_of[u] == Some(class)) as usize).collect();
    for _ in 1..k {
        let mut next = vec![0usize; v];
        for u in (0..v).filter(|&u| ways[u] > 0) {
            for &w in g.digraph().successors(u) {
                if comp.contains(w) {
                    next[w] = next[w].saturating_add(ways[u]);
                }
            }
        }
        ways = next;
    }
    ways.iter().fold(0usize, |a, &b| a.saturating_add(b))
}

/// Largest `2^-k` such that some `n` points starting in `class` are pairwise at least
/// `2^-k` apart, i.e. the least `k` with `n` distinct `(k+1)`-words; `0` if the word
/// counts stabilize below `n`.
pub fn sft_class_dispersion(g: &SftGraph, comp: &SftComponent, class: usize, n: usize) -> Dyadic {
    let mut prev = 0;
    for k in 1.. {
        let c = class_word_count(g, comp, class, k);
        if c >= n {
            return Dyadic::Pow(k as u32 - 1);
        }
        if c == prev {
            return Dyadic::Zero;
        }
        prev = c;
    }
    unreachable!()
}

pub fn sft_delta_n(g: &SftGraph, comp: &SftComponent, n: usize) -> Result<Dyadic> {
    check_arity(n)?;
    Ok((0..comp.period).map(|c| sft_class_dispersion(g, comp, c, n)).min().unwrap_or(Dyadic::Zero))
}

/// Number of points with first symbol in `class`, `None` when infinite. The set is finite
/// exactly when the component is a single cycle, and then each class holds one point.
pub fn sft_class_size(g: &SftGraph, comp: &SftComponent) -> Option<usize> {
    let is_cycle = comp.vertices.iter().all(|&u| g.digraph().successors(u).iter().filter(|&&w| comp.contains(w)).count() == 1);
    is_cycle.then_some(1)
}

/// An `n`-tuple of eventually periodic points starting in `class` whose orbits stay pairwise
/// farther apart than `delta = 2^-j`: a cycle in the graph of `n`-tuples of pairwise distinct
/// `j`-words.
pub fn find_distal_tuple_sft(
    g: &SftGraph,
    comp: &SftComponent,
    class: usize,
    n: usize,
    delta: Dyadic,
    max_states: usize,
) -> Result<Option<Vec<SftPoint>>> {
    check_arity(n)?;
    match delta {
        Dyadic::Pow(0) => Ok(None),
        Dyadic::Pow(j) => product_search(g, comp, class, n, j as usize, max_states),
        Dyadic::Zero => Ok(search_distal_sft(g, comp, class, n, max_states)?.map(|(t, _)| t)),
    }
}

/// Distal tuple with the largest `delta_n = 2^-j` (smallest block length `j`).
pub fn search_distal_sft(g: &SftGraph, comp: &SftComponent, class: usize, n: usize, max_states: usize) -> Result<Option<(Vec<SftPoint>, Dyadic)>> {
    check_arity(n)?;
    let mut prev = 0;
    for j in 1..=64usize {
        let count = class_word_count(g, comp, class, j);
        if count < n {
            if count == prev {
                return Ok(None);
            }
            prev = count;
            continue;
        }
        prev = count;
        if let Some(t) = product_search(g, comp, class, n, j, max_states)? {
            return Ok(Some((t, Dyadic::Pow(j as u32))));
        }
    }
    Err(budget("distal block length", 64))
}

fn product_search(g: &SftGraph, comp: &SftComponent, class: usize, n: usize, j: usize, max_states: usize) -> Result<Option<Vec<SftPoint>>> {
    // all j-words of the component, lexicographic
    let mut words: Vec<Vec<usize>> = comp.vertices.iter().map(|&v| vec![v]).collect();
    words.sort();
    for _ in 1..j {
        let mut longer = Vec::new();
        for w in &words {
            for &v in g.digraph().successors(*w.last().unwrap()) {
                if comp.contains(v) {
                    let mut x = w.clone();
                    x.push(v);
                    longer.push(x);
                }
            }
            if longer.len() > max_states {
                return Err(budget("product-graph search", max_states));
            }
        }
        words = longer;
        words.sort();
    }
    let index: HashMap<&[usize], u32> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i as u32)).collect();
    let next: Vec<Vec<u32>> = words
        .iter()
        .map(|w| {
            let mut out: Vec<u32> = g
                .digraph()
                .successors(*w.last().unwrap())
                .iter()
                .filter_map(|&v| {
                    let mut x = w[1..].to_vec();
                    x.push(v);
                    index.get(x.as_slice()).copied()
                })
                .collect();
            out.sort_unstable();
            out
        })
        .collect();
    let starts: Vec<u32> = (0..words.len() as u32).filter(|&i| comp.class_of[words[i as usize][0]] == Some(class)).collect();
    if starts.len() < n {
        return Ok(None);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        Gray,
        Black,
    }
    let mut color: HashMap<Vec<u32>, Color> = HashMap::new();
    let successors = |state: &[u32]| -> Vec<Vec<u32>> {
        let mut out = vec![Vec::with_capacity(n)];
        for &w in state {
            let mut grown = Vec::new();
            for partial in &out {
                for &x in &next[w as usize] {
                    if !partial.contains(&x) {
                        let mut p = partial.clone();
                        p.push(x);
                        grown.push(p);
                    }
                }
            }
            out = grown;
        }
        out
    };

    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let start: Vec<u32> = idx.iter().map(|&i| starts[i]).collect();
        if !color.contains_key(&start) {
            // iterative DFS: (state, successors, next successor)
            let mut stack: Vec<(Vec<u32>, Vec<Vec<u32>>, usize)> = Vec::new();
            color.insert(start.clone(), Color::Gray);
            let succ = successors(&start);
            stack.push((start, succ, 0));
            while let Some(top) = stack.last_mut() {
                if top.2 == top.1.len() {
                    let (s, _, _) = stack.pop().unwrap();
                    color.insert(s, Color::Black);
                    continue;
                }
                let s = top.1[top.2].clone();
                top.2 += 1;
                match color.get(&s) {
                    Some(Color::Gray) => {
                        let pos = stack.iter().position(|f| f.0 == s).unwrap();
                        let cycle: Vec<&Vec<u32>> = stack[pos..].iter().map(|f| &f.0).collect();
                        return Ok(Some(cycle_points(&words, comp, class, &cycle)));
                    }
                    Some(Color::Black) => {}
                    None => {
                        if color.len() >= max_states {
                            return Err(budget("product-graph search", max_states));
                        }
                        color.insert(s.clone(), Color::Gray);
                        let succ = successors(&s);
                        stack.push((s, succ, 0));
                    }
                }
            }
        }
        if !next_combination(&mut idx, starts.len()) {
            return Ok(None);
        }
    }
}

/// Periodic points read off a product cycle, rotated to a state whose words start in `class`.
fn cycle_points(words: &[Vec<usize>], comp: &SftComponent, class: usize, cycle: &[&Vec<u32>]) -> Vec<SftPoint> {
    let rot = cycle.iter().position(|s| comp.class_of[words[s[0] as usize][0]] == Some(class)).unwrap_or(0);
    let len = cycle.len();
    (0..cycle[0].len())
        .map(|k| SftPoint::periodic((0..len).map(|t| words[cycle[(rot + t) % len][k] as usize][0]).collect()))
        .collect()
}

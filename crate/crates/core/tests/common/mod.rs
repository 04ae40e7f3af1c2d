//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use chainscope::numeric::rat;
use chainscope::{FiniteSystem, Rational, SftGraph, SftPoint};
use rand::Rng;

/// Random rational weights closed under shortest paths, so the triangle inequality holds.
pub fn random_system<R: Rng>(rng: &mut R, max_points: usize) -> FiniteSystem {
    let n = rng.gen_range(1..=max_points);
    let mut d = vec![vec![rat(0, 1); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let map = (0..n).map(|_| rng.gen_range(0..n)).collect();
    FiniteSystem::new((0..n).map(|i| format!("x{i}")).collect(), d, map).expect("repaired metric")
}

/// Every value `d(f(u), v)`, recomputed from the tables.
pub fn all_resolutions(sys: &FiniteSystem) -> Vec<Rational> {
    let n = sys.len();
    let mut out: Vec<Rational> = (0..n).flat_map(|u| (0..n).map(move |v| sys.metric(sys.map(u), v))).collect();
    out.sort();
    out.dedup();
    out
}

pub fn chain_adjacency(sys: &FiniteSystem, delta: Rational) -> Vec<Vec<bool>> {
    let n = sys.len();
    (0..n).map(|u| (0..n).map(|v| sys.metric(sys.map(u), v) <= delta).collect()).collect()
}

/// Transitive closure: `r[u][v]` iff a path of length at least one leads from `u` to `v`.
pub fn closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = adj.to_vec();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Mutual-reachability classes of the nodes lying on a cycle, sorted.
pub fn brute_components(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let r = closure(adj);
    let n = adj.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for u in (0..n).filter(|&u| r[u][u]) {
        if out.iter().any(|c| c.contains(&u)) {
            continue;
        }
        out.push((0..n).filter(|&v| r[u][v] && r[v][u]).collect());
    }
    out.sort();
    out
}

/// Bitmask of nodes reachable from `x` by walks of exactly `k` steps inside `comp`.
pub fn walk_masks(adj: &[Vec<bool>], comp: &[usize], x: usize, steps: usize) -> Vec<u64> {
    let succ: Vec<u64> = (0..adj.len())
        .map(|u| comp.iter().filter(|&&v| adj[u][v]).fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let mut cur = 1u64 << x;
    let mut out = vec![cur];
    for _ in 0..steps {
        let mut next = 0;
        for u in 0..adj.len() {
            if cur >> u & 1 == 1 {
                next |= succ[u];
            }
        }
        cur = next;
        out.push(cur);
    }
    out
}

/// A depth-`depth` pseudo-orbit: each state keeps the first `depth` symbols of the previous
/// image, then jumps to a fresh random point.
pub fn sft_pseudo_orbit<R: Rng>(g: &SftGraph, rng: &mut R, depth: usize, len: usize) -> Vec<SftPoint> {
    let comp = g.irreducible_component().expect("irreducible");
    let (h, c) = (rng.gen_range(0..4), rng.gen_range(1..5));
    let mut xs = vec![g.random_point(rng, &comp.vertices, h, c)];
    while xs.len() < len {
        let next = xs.last().unwrap().shift();
        if rng.gen_bool(0.2) {
            xs.push(next);
            continue;
        }
        let keep = next.prefix(depth);
        let (h, c) = (rng.gen_range(0..4), rng.gen_range(1..5));
        let fresh = g.random_point(rng, &comp.vertices, h, c);
        let bridge = g.connecting_word(keep[depth - 1], fresh.symbol(0)).expect("irreducible");
        let mut head = keep;
        head.extend(bridge);
        head.extend_from_slice(fresh.head());
        xs.push(SftPoint::new(head, fresh.cycle().to_vec()));
    }
    xs
}

/// `2^-k` with `k` the first disagreement, from the symbol sequences alone.
pub fn symbol_distance_exponent(x: &SftPoint, y: &SftPoint, scan: usize) -> Option<usize> {
    (0..scan).find(|&i| x.symbol(i) != y.symbol(i))
}

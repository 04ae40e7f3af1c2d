//! Pseudo-orbits, brute-force shadowing on finite systems, and exact shadowing and
//! splice constructions on vertex shifts.

use rayon::prelude::*;

use crate::chain::critical_deltas;
use crate::error::{budget, Error, Result};
use crate::numeric::{Dyadic, ExactDistance, Rational};
use crate::system::{Dynamics, FiniteSystem, SftGraph, SftPoint};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoOrbit<P, D> {
    pub states: Vec<P>,
    /// `errors[i] = d(f(x_i), x_{i+1})`
    pub errors: Vec<D>,
}

impl<P, D: ExactDistance> PseudoOrbit<P, D> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn max_error(&self) -> D {
        self.errors.iter().copied().max().unwrap_or(D::zero_dist())
    }
}

/// Computes the step errors and checks each against `delta`.
pub fn validate_pseudo_orbit<S: Dynamics>(sys: &S, xs: Vec<S::Point>, delta: S::Dist) -> Result<PseudoOrbit<S::Point, S::Dist>> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("a pseudo-orbit needs at least two states".into()));
    }
    let errors: Vec<S::Dist> = xs.windows(2).map(|w| sys.distance(&sys.image(&w[0]), &w[1])).collect();
    if let Some(i) = errors.iter().position(|&e| e > delta) {
        return Err(Error::step_violation(i, errors[i]));
    }
    Ok(PseudoOrbit { states: xs, errors })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitVerdict {
    pub valid: bool,
    /// Checkpoints `j` at which the suffix maximum beyond `j * len / k` exceeds `schedule[j]`.
    pub failing_checkpoints: Vec<usize>,
    pub within_delta: bool,
}

/// Finite stand-in for "errors tend to zero": the suffix maximum of the errors beyond
/// checkpoint `j * (len / k)` must be at most `schedule[j]`, for `j = 0..k`.
pub fn validate_limit_pseudo_orbit<P, D: ExactDistance>(po: &PseudoOrbit<P, D>, delta: D, schedule: &[D]) -> Result<LimitVerdict> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] <= w[1]) || *schedule.last().unwrap() <= D::zero_dist() {
        return Err(Error::InvalidArgument("schedule must be strictly decreasing and positive".into()));
    }
    let within_delta = po.errors.iter().all(|&e| e <= delta);
    let mut suffix_max = vec![D::zero_dist(); po.errors.len() + 1];
    for i in (0..po.errors.len()).rev() {
        suffix_max[i] = suffix_max[i + 1].max(po.errors[i]);
    }
    let stride = po.len() / schedule.len();
    let failing_checkpoints: Vec<usize> = schedule
        .iter()
        .enumerate()
        .filter(|&(j, &t)| suffix_max[(j * stride).min(po.errors.len())] > t)
        .map(|(j, _)| j)
        .collect();
    Ok(LimitVerdict { valid: within_delta && failing_checkpoints.is_empty(), failing_checkpoints, within_delta })
}

/// `delta, delta/4, delta/16, delta/64`.
pub fn default_schedule(delta: Rational) -> Vec<Rational> {
    (0..4).map(|j| delta / Rational::from_integer(1 << (2 * j))).collect()
}

pub fn default_dyadic_schedule(delta: Dyadic) -> Vec<Dyadic> {
    (0..4).map(|j| (0..2 * j).fold(delta, |d, _| d.half())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowResult<P, D> {
    pub point: Option<P>,
    /// Largest tracking error of `point` (the bound achieved).
    pub epsilon: D,
    /// `tail_profile[i] = max_{j >= i} d(f^j z, x_j)`
    pub tail_profile: Vec<D>,
    pub tracking: Vec<D>,
}

fn suffix_max<D: ExactDistance>(v: &[D]) -> Vec<D> {
    let mut out = v.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

/// Smallest node whose orbit stays within `epsilon` of the pseudo-orbit.
pub fn find_shadowing_point(sys: &FiniteSystem, po: &PseudoOrbit<usize, Rational>, epsilon: Rational) -> ShadowResult<usize, Rational> {
    let track = |z: usize| -> Vec<Rational> { sys.orbit(z, po.len()).iter().zip(&po.states).map(|(&a, &b)| sys.metric(a, b)).collect() };
    match (0..sys.len()).find(|&z| track(z).iter().all(|&e| e <= epsilon)) {
        Some(z) => {
            let tracking = track(z);
            let tail_profile = suffix_max(&tracking);
            ShadowResult { point: Some(z), epsilon: tail_profile.first().copied().unwrap_or_default(), tail_profile, tracking }
        }
        None => ShadowResult { point: None, epsilon, tail_profile: Vec::new(), tracking: Vec::new() },
    }
}

/// The point reading off the first symbol of every state, then following the last state.
/// Step errors at most `2^-n` (`n >= 1`) give tracking errors at most `2^-(n+1)`.
pub fn sft_shadow(g: &SftGraph, po: &PseudoOrbit<SftPoint, Dyadic>, n: u32) -> Result<ShadowResult<SftPoint, Dyadic>> {
    if n == 0 {
        return Err(Error::InvalidArgument("agreement depth must be at least 1".into()));
    }
    let bound = Dyadic::Pow(n);
    if let Some(i) = po.errors.iter().position(|&e| e > bound) {
        return Err(Error::PrecisionViolation { index: i, error: po.errors[i].to_string(), depth: n });
    }
    let last = po.states.last().ok_or_else(|| Error::InvalidArgument("empty pseudo-orbit".into()))?;
    let mut head: Vec<usize> = po.states[..po.len() - 1].iter().map(|x| x.symbol(0)).collect();
    head.extend_from_slice(last.head());
    let z = SftPoint::new(head, last.cycle().to_vec());
    g.check_point(&z).map_err(|_| Error::AdmissibilityBug(format!("spliced point {z} is not admissible")))?;
    let tracking: Vec<Dyadic> = po.states.iter().enumerate().map(|(i, x)| z.shift_by(i).distance(x)).collect();
    let target = bound.half();
    if let Some(i) = tracking.iter().position(|&t| t > target) {
        return Err(Error::AdmissibilityBug(format!("tracking error {} at step {i} exceeds {target}", tracking[i])));
    }
    let tail_profile = suffix_max(&tracking);
    Ok(ShadowResult { point: Some(z), epsilon: tail_profile.first().copied().unwrap_or(Dyadic::Zero), tail_profile, tracking })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splice {
    pub z: SftPoint,
    /// From this time on `z` and `x` have identical orbits.
    pub merge_time: usize,
}

/// A point within `epsilon = 2^-n` of `y` whose orbit merges exactly with the orbit of `x`:
/// the first `n` symbols of `y`, the shortest (then lexicographically least) connecting word,
/// then the tail of `x` at matching times.
pub fn slimit_splice(g: &SftGraph, x: &SftPoint, y: &SftPoint, epsilon: Dyadic) -> Result<Splice> {
    let comp = g.irreducible_component()?;
    g.check_point(x)?;
    g.check_point(y)?;
    let n = match epsilon {
        Dyadic::Zero => return Err(Error::InvalidArgument("epsilon must be positive".into())),
        Dyadic::Pow(k) => k as usize,
    };
    let (cx, cy) = (comp.class_of[x.symbol(0)], comp.class_of[y.symbol(0)]);
    if cx != cy {
        return Err(Error::ClassMismatch(format!("{x} and {y} start in cyclic classes {cx:?} and {cy:?}")));
    }
    if n == 0 {
        return Ok(Splice { z: x.clone(), merge_time: 0 });
    }
    let from = y.symbol(n - 1);
    let v = g.vertex_count();
    let cap = x.head().len() + n + (v * v + 2) * x.cycle().len().max(1) * comp.period;
    let mut reach = vec![false; v];
    reach[from] = true;
    let mut found = None;
    for c in 1..=cap {
        let mut next = vec![false; v];
        for u in (0..v).filter(|&u| reach[u]) {
            for &w in g.digraph().successors(u) {
                next[w] = true;
            }
        }
        reach = next;
        if reach[x.symbol(n - 1 + c)] {
            found = Some(c);
            break;
        }
    }
    let c = found.ok_or_else(|| Error::ClassMismatch(format!("no connecting word from {from} into the orbit of {x}")))?;
    let merge_time = n - 1 + c;
    let word = g.word_of_length(from, x.symbol(merge_time), c).expect("reachability was established");
    let tail = x.shift_by(merge_time);
    let mut head = y.prefix(n);
    head.extend(word);
    head.extend_from_slice(tail.head());
    let z = SftPoint::new(head, tail.cycle().to_vec());
    g.check_point(&z).map_err(|_| Error::AdmissibilityBug(format!("spliced point {z} is not admissible")))?;
    if y.distance(&z) > epsilon || z.shift_by(merge_time) != tail {
        return Err(Error::Invariant(format!("splice of {x} into {y} failed its postconditions")));
    }
    Ok(Splice { z, merge_time })
}

/// Largest critical `delta` such that every `delta`-pseudo-orbit of length `length_cap`,
/// exact from the middle on, is `epsilon`-limit shadowed. Limit shadowing on a finite
/// system means tracking within `epsilon` and eventually coinciding.
pub fn estimate_slimit_modulus(sys: &FiniteSystem, epsilon: Rational, length_cap: usize, max_sequences: usize) -> Result<Rational> {
    let n = sys.len();
    let free_steps = length_cap / 2;
    for &delta in critical_deltas(sys).iter().rev() {
        let succ: Vec<Vec<usize>> = (0..n).map(|u| (0..n).filter(|&v| sys.metric(sys.map(u), v) <= delta).collect()).collect();
        let mut count: usize = 0;
        for u in 0..n {
            count = count.saturating_add(count_walks(&succ, u, free_steps));
            if count > max_sequences {
                return Err(budget("pseudo-orbit enumeration", max_sequences));
            }
        }
        let ok = (0..n).into_par_iter().all(|x0| {
            let mut states = vec![x0];
            every_walk(&succ, &mut states, free_steps, &mut |prefix| shadowable(sys, prefix, length_cap, epsilon))
        });
        if ok {
            return Ok(delta);
        }
    }
    Ok(Rational::from_integer(0))
}

fn count_walks(succ: &[Vec<usize>], u: usize, steps: usize) -> usize {
    let mut ways = vec![0usize; succ.len()];
    ways[u] = 1;
    for _ in 0..steps {
        let mut next = vec![0usize; succ.len()];
        for (a, &w) in ways.iter().enumerate() {
            for &b in &succ[a] {
                next[b] = next[b].saturating_add(w);
            }
        }
        ways = next;
    }
    ways.iter().fold(0usize, |s, &w| s.saturating_add(w))
}

/// Calls `check` on every walk extending `states` by `steps` more successors; stops early on `false`.
fn every_walk(succ: &[Vec<usize>], states: &mut Vec<usize>, steps: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if steps == 0 {
        return check(states);
    }
    let last = *states.last().unwrap();
    for &v in &succ[last] {
        states.push(v);
        let ok = every_walk(succ, states, steps - 1, check);
        states.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// The pseudo-orbit is `prefix` followed by the true orbit of its last state, up to `len`
/// states; beyond that both orbits are periodic within `n^2` further steps.
fn shadowable(sys: &FiniteSystem, prefix: &[usize], len: usize, epsilon: Rational) -> bool {
    let n = sys.len();
    let total = len.max(prefix.len()) + n * n + 1;
    let mut xs = prefix.to_vec();
    while xs.len() < total {
        xs.push(sys.map(*xs.last().unwrap()));
    }
    (0..n).any(|z0| {
        let mut z = z0;
        let mut merged = false;
        for (i, &x) in xs.iter().enumerate() {
            if sys.metric(z, x) > epsilon {
                return false;
            }
            if i + 1 >= prefix.len() && z == x {
                merged = true;
                break;
            }
            z = sys.map(z);
        }
        merged
    })
}

/// One state label per line.
pub fn parse_finite_orbit(sys: &FiniteSystem, text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            sys.index_of(l.trim()).ok_or(Error::Parse { line: i + 1, message: format!("unknown point {:?}", l.trim()) })
        })
        .collect()
}

/// One `head|cycle` point per line.
pub fn parse_sft_orbit(g: &SftGraph, text: &str) -> Result<Vec<SftPoint>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| g.parse_point(l).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() }))
        .collect()
}

pub fn format_orbit<P: std::fmt::Display>(states: &[P]) -> String {
    states.iter().map(|s| format!("{s}\n")).collect()
}

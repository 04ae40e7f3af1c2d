//! Splice constructions of condition-(3) witness tuples on vertex shifts, the randomized
//! restart surrogate, and the limit-extraction audit.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::distal::{search_distal_sft, sft_tuple_inf};
use super::{check_condition3, Condition3Params, Level};
use crate::error::{Error, Result};
use crate::numeric::Dyadic;
use crate::system::{Dynamics, SftComponent, SftGraph, SftPoint};

/// Length of each block where all coordinates follow one common point.
pub const PROXIMAL_BLOCK: usize = 16;

/// Synchronized words, one per coordinate, always of equal length.
struct Builder<'a> {
    g: &'a SftGraph,
    comp: &'a SftComponent,
    words: Vec<Vec<usize>>,
}

impl<'a> Builder<'a> {
    fn new(g: &'a SftGraph, comp: &'a SftComponent, n: usize) -> Self {
        Builder { g, comp, words: vec![Vec::new(); n] }
    }

    fn len(&self) -> usize {
        self.words[0].len()
    }

    /// Appends equal-length connecting words so that the next symbols can be `targets`.
    fn join(&mut self, targets: &[usize]) -> Result<()> {
        if self.len() == 0 {
            return Ok(());
        }
        let v = self.g.vertex_count();
        let cap = 4 * v * v + 4;
        let mut reach: Vec<Vec<bool>> = self
            .words
            .iter()
            .map(|w| {
                let mut r = vec![false; v];
                r[*w.last().unwrap()] = true;
                r
            })
            .collect();
        for steps in 1..=cap {
            for r in reach.iter_mut() {
                let mut next = vec![false; v];
                for u in (0..v).filter(|&u| r[u]) {
                    for &w in self.g.digraph().successors(u) {
                        if self.comp.contains(w) {
                            next[w] = true;
                        }
                    }
                }
                *r = next;
            }
            if reach.iter().zip(targets).all(|(r, &t)| r[t]) {
                for (w, &t) in self.words.iter_mut().zip(targets) {
                    let bridge = self.g.word_of_length(*w.last().unwrap(), t, steps).expect("reachable in exactly `steps` edges");
                    w.extend(bridge);
                }
                return Ok(());
            }
        }
        Err(Error::ClassMismatch(format!("cannot synchronize {:?} with targets {targets:?}", self.words.iter().map(|w| w.last()).collect::<Vec<_>>())))
    }

    fn follow(&mut self, points: &[SftPoint], len: usize) -> Result<()> {
        let targets: Vec<usize> = points.iter().map(|p| p.symbol(0)).collect();
        self.join(&targets)?;
        for (w, p) in self.words.iter_mut().zip(points) {
            w.extend(p.prefix(len));
        }
        Ok(())
    }

    fn push_words(&mut self, prefixes: &[Vec<usize>]) {
        for (w, p) in self.words.iter_mut().zip(prefixes) {
            w.extend_from_slice(p);
        }
    }

    fn finish(mut self, tail: &SftPoint) -> Result<Vec<SftPoint>> {
        let n = self.words.len();
        self.join(&vec![tail.symbol(0); n])?;
        let out: Vec<SftPoint> = self
            .words
            .into_iter()
            .map(|mut w| {
                w.extend_from_slice(tail.head());
                SftPoint::new(w, tail.cycle().to_vec())
            })
            .collect();
        for p in &out {
            self.g.check_point(p).map_err(|_| Error::AdmissibilityBug(format!("witness coordinate {p} is not admissible")))?;
        }
        Ok(out)
    }
}

/// Builds an `n`-tuple in the class basin whose separation and clustering time sets
/// realize `level`, by splicing blocks of a distal tuple with blocks of one common orbit.
///
/// DC1: distal for the first three quarters of the horizon, then proximal blocks alternating
/// with doubling distal blocks. IAPSTAR: distal blocks of length `2 m_max` between proximal
/// blocks. LIYORKE: distal blocks just long enough for one separated time.
pub fn build_witness(
    g: &SftGraph,
    comp: &SftComponent,
    distal: &[SftPoint],
    delta_n: Dyadic,
    level: Level,
    params: &Condition3Params,
    prefixes: Option<&[Vec<usize>]>,
) -> Result<Vec<SftPoint>> {
    let n = distal.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("tuple size must be at least 2, got {n}")));
    }
    let j = delta_n.exponent().ok_or_else(|| Error::InvalidArgument("delta_n must be positive".into()))? as usize;
    let class = comp.class_of[distal[0].symbol(0)];
    if class.is_none() || distal.iter().any(|p| comp.class_of[p.symbol(0)] != class) {
        return Err(Error::ClassMismatch("distal tuple does not start in one cyclic class".into()));
    }
    let h = params.horizon;
    let common = vec![distal[0].clone(); n];
    let mut b = Builder::new(g, comp, n);
    if let Some(p) = prefixes {
        if p.len() != n || p.iter().any(|w| w.len() != p[0].len() || !g.is_admissible(w)) {
            return Err(Error::InvalidArgument("prefixes must be admissible words of one length".into()));
        }
        b.push_words(p);
    }
    let end = h + 64;
    match level {
        Level::Dc1 => {
            b.follow(distal, 3 * h / 4)?;
            let mut d = 32;
            while b.len() < end {
                b.follow(&common, PROXIMAL_BLOCK)?;
                b.follow(distal, d)?;
                d *= 2;
            }
        }
        Level::IapStar => {
            while b.len() < end {
                b.follow(distal, 2 * params.window.m_max + j)?;
                b.follow(&common, PROXIMAL_BLOCK)?;
            }
        }
        Level::LiYorke => {
            while b.len() < end {
                b.follow(distal, j + 1)?;
                b.follow(&common, PROXIMAL_BLOCK)?;
            }
        }
        Level::None => return Err(Error::InvalidArgument("no witness exists for level NONE".into())),
    }
    b.finish(&distal[0])
}

/// Searches a distal tuple in `class`, then builds a witness from it.
pub fn construct_witness(
    g: &SftGraph,
    comp: &SftComponent,
    class: usize,
    n: usize,
    level: Level,
    params: &Condition3Params,
    max_states: usize,
) -> Result<(Vec<SftPoint>, Dyadic)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("tuple size must be at least 2, got {n}")));
    }
    if class >= comp.period {
        return Err(Error::ClassMismatch(format!("class {class} out of range (period {})", comp.period)));
    }
    let (distal, delta) = search_distal_sft(g, comp, class, n, max_states)?
        .ok_or_else(|| Error::InvalidArgument(format!("class {class} holds no distal {n}-tuple")))?;
    Ok((build_witness(g, comp, &distal, delta, level, params, None)?, delta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateStats {
    pub level: Level,
    pub trials: usize,
    pub successes: usize,
    pub seed: u64,
    pub rate: f64,
    /// At least 95% of trials succeeded.
    pub passed: bool,
}

/// Restarts the construction from random admissible prefixes (one seeded stream per trial)
/// and counts how many results still pass condition (3) at `level`.
#[allow(clippy::too_many_arguments)]
pub fn surrogate_trials(
    g: &SftGraph,
    comp: &SftComponent,
    distal: &[SftPoint],
    delta_n: Dyadic,
    level: Level,
    params: &Condition3Params,
    trials: usize,
    seed: u64,
) -> Result<SurrogateStats> {
    let class = comp.class_of[distal[0].symbol(0)].ok_or_else(|| Error::ClassMismatch("distal tuple outside component".into()))?;
    let starts = comp.class_vertices(class);
    let mut successes = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let len = rng.gen_range(1..=8);
        let prefixes: Vec<Vec<usize>> = (0..distal.len())
            .map(|_| {
                let mut w = vec![starts[rng.gen_range(0..starts.len())]];
                while w.len() < len {
                    let succ: Vec<usize> = g.digraph().successors(*w.last().unwrap()).iter().copied().filter(|&v| comp.contains(v)).collect();
                    w.push(succ[rng.gen_range(0..succ.len())]);
                }
                w
            })
            .collect();
        let tuple = build_witness(g, comp, distal, delta_n, level, params, Some(&prefixes))?;
        if check_condition3(g, &tuple, delta_n, level, params)?.holds {
            successes += 1;
        }
    }
    let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
    Ok(SurrogateStats { level, trials, successes, seed, rate, passed: trials > 0 && successes * 100 >= 95 * trials })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionAudit {
    /// Two separated times `i < i'` with equal word tuples and only separated times between.
    pub recurrence: Option<(usize, usize)>,
    pub extracted: Vec<String>,
    pub inf_distance: String,
    pub passes: bool,
}

/// Recovers a distal tuple from a witness: a tuple of `j`-words seen twice inside one run of
/// separated times closes up into periodic points that are `2^-j`-distal. Only thick
/// separation sets guarantee such runs, so this is meaningful for DC1 witnesses.
pub fn extraction_audit(g: &SftGraph, tuple: &[SftPoint], delta_n: Dyadic, horizon: usize) -> ExtractionAudit {
    let fail = |recurrence| ExtractionAudit { recurrence, extracted: Vec::new(), inf_distance: "0".into(), passes: false };
    let Some(j) = delta_n.exponent().map(|j| j as usize) else { return fail(None) };
    if j == 0 || tuple.len() < 2 {
        return fail(None);
    }
    let mut min_trace = vec![Dyadic::ONE; horizon];
    for a in 0..tuple.len() {
        for b in a + 1..tuple.len() {
            for (m, d) in min_trace.iter_mut().zip(g.pair_trace(&tuple[a], &tuple[b], horizon)) {
                *m = (*m).min(d);
            }
        }
    }
    let words = |i: usize| -> Vec<Vec<usize>> { tuple.iter().map(|p| (i..i + j).map(|t| p.symbol(t)).collect()).collect() };
    let mut seen: HashMap<Vec<Vec<usize>>, usize> = HashMap::new();
    for i in 0..horizon {
        if min_trace[i] <= delta_n {
            seen.clear();
            continue;
        }
        let key = words(i);
        if let Some(&i0) = seen.get(&key) {
            let extracted: Vec<SftPoint> = tuple.iter().map(|p| SftPoint::periodic((i0..i).map(|t| p.symbol(t)).collect())).collect();
            let admissible = extracted.iter().all(|p| g.check_point(p).is_ok());
            let inf = sft_tuple_inf(g, &extracted);
            return ExtractionAudit {
                recurrence: Some((i0, i)),
                extracted: extracted.iter().map(|p| p.to_string()).collect(),
                inf_distance: inf.to_string(),
                passes: admissible && inf > delta_n,
            };
        }
        seen.insert(key, i);
    }
    fail(None)
}

//! Separation and clustering time sets of orbit tuples, distal tuples, and classification
//! of chain components on the hierarchy DC1 > IAPSTAR > LIYORKE > NONE.

mod distal;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use distal::{
    best_distal_finite, class_word_count, compute_delta_n, find_distal_tuple_finite, find_distal_tuple_sft, finite_tuple_inf,
    search_distal_sft, sft_class_dispersion, sft_class_size, sft_delta_n, sft_tuple_inf,
};
pub use witness::{build_witness, construct_witness, extraction_audit, surrogate_trials, ExtractionAudit, SurrogateStats, PROXIMAL_BLOCK};

use crate::chain::ChainDigraph;
use crate::cyclic::cyclic_classes;
use crate::error::{Error, Result};
use crate::furstenberg::{Family, FamilyVerdict, TimeSetWindow, WindowParams};
use crate::numeric::{format_rational, Dyadic, ExactDistance, Rational};
use crate::system::{Dynamics, FiniteSystem, SftComponent, SftGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Level {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "LIYORKE")]
    LiYorke,
    #[serde(rename = "IAPSTAR")]
    IapStar,
    #[serde(rename = "DC1")]
    Dc1,
}

impl Level {
    /// Family the separation set must belong to at this level.
    pub fn family(self) -> Option<Family> {
        match self {
            Level::Dc1 => Some(Family::Thick),
            Level::IapStar => Some(Family::IapStar),
            Level::LiYorke => Some(Family::Infinite),
            Level::None => None,
        }
    }

    /// This level followed by every weaker level above NONE.
    pub fn and_weaker(self) -> Vec<Level> {
        [Level::Dc1, Level::IapStar, Level::LiYorke].into_iter().filter(|&l| l <= self).collect()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::None => "NONE",
            Level::LiYorke => "LIYORKE",
            Level::IapStar => "IAPSTAR",
            Level::Dc1 => "DC1",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(Level::None),
            "LIYORKE" => Ok(Level::LiYorke),
            "IAPSTAR" => Ok(Level::IapStar),
            "DC1" => Ok(Level::Dc1),
            _ => Err(Error::InvalidArgument(format!("unknown level {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleStats<D> {
    pub n: usize,
    pub horizon: usize,
    /// Minimum pairwise distance at each time.
    pub min_trace: Vec<D>,
    /// Maximum pairwise distance at each time.
    pub max_trace: Vec<D>,
    /// `S(r)`: times where every pair is farther apart than `r`.
    pub s_sets: Vec<(D, TimeSetWindow)>,
    /// `T(eps)`: times where every pair is closer than `eps`.
    pub t_sets: Vec<(D, TimeSetWindow)>,
}

pub fn tuple_stats<S: Dynamics>(
    sys: &S,
    tuple: &[S::Point],
    r_list: &[S::Dist],
    eps_ladder: &[S::Dist],
    horizon: usize,
) -> Result<TupleStats<S::Dist>> {
    let n = tuple.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("tuple size must be at least 2, got {n}")));
    }
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let mut min_trace: Option<Vec<S::Dist>> = None;
    let mut max_trace: Option<Vec<S::Dist>> = None;
    for a in 0..n {
        for b in a + 1..n {
            let tr = sys.pair_trace(&tuple[a], &tuple[b], horizon);
            match (&mut min_trace, &mut max_trace) {
                (Some(lo), Some(hi)) => {
                    for i in 0..horizon {
                        lo[i] = lo[i].min(tr[i]);
                        hi[i] = hi[i].max(tr[i]);
                    }
                }
                _ => {
                    min_trace = Some(tr.clone());
                    max_trace = Some(tr);
                }
            }
        }
    }
    let (min_trace, max_trace) = (min_trace.unwrap(), max_trace.unwrap());
    let s_sets = r_list.iter().map(|&r| (r, TimeSetWindow::from_fn(horizon, |i| min_trace[i] > r))).collect();
    let t_sets = eps_ladder.iter().map(|&e| (e, TimeSetWindow::from_fn(horizon, |i| max_trace[i] < e))).collect();
    Ok(TupleStats { n, horizon, min_trace, max_trace, s_sets, t_sets })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition3Params {
    pub horizon: usize,
    pub window: WindowParams,
    /// Clustering is checked at `2^-1, ..., 2^-eps_depth`.
    pub eps_depth: u32,
}

impl Condition3Params {
    pub fn defaults(horizon: usize) -> Self {
        Condition3Params { horizon, window: WindowParams::defaults(horizon), eps_depth: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterVerdict {
    pub epsilon: String,
    pub verdict: FamilyVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition3Verdict {
    pub level: Level,
    pub r: String,
    pub separation: FamilyVerdict,
    pub clustering: Vec<ClusterVerdict>,
    pub holds: bool,
}

/// Windowed condition (3) at `level`: the separation set `S(r)` lies in the level's family
/// and every clustering set `T(eps)` on the ladder is infinite.
pub fn check_condition3<S: Dynamics>(sys: &S, tuple: &[S::Point], r: S::Dist, level: Level, params: &Condition3Params) -> Result<Condition3Verdict> {
    let family = level.family().ok_or_else(|| Error::InvalidArgument("condition (3) has no NONE level".into()))?;
    let ladder: Vec<S::Dist> = (1..=params.eps_depth).map(S::Dist::dyadic).collect();
    let stats = tuple_stats(sys, tuple, &[r], &ladder, params.horizon)?;
    let separation = stats.s_sets[0].1.window_family_member(family, &params.window)?;
    let clustering = stats
        .t_sets
        .iter()
        .map(|(e, w)| Ok(ClusterVerdict { epsilon: e.to_string(), verdict: w.window_family_member(Family::Infinite, &params.window)? }))
        .collect::<Result<Vec<_>>>()?;
    let holds = separation.member && clustering.iter().all(|c| c.verdict.member);
    Ok(Condition3Verdict { level, r: r.to_string(), separation, clustering, holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifyParams {
    pub n_max: usize,
    pub condition3: Condition3Params,
    pub tuple_budget: usize,
    pub product_budget: usize,
    pub surrogate_trials: usize,
    pub seed: u64,
    pub construct_witnesses: bool,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            n_max: 3,
            condition3: Condition3Params::defaults(2048),
            tuple_budget: 1_000_000,
            product_budget: 1_000_000,
            surrogate_trials: 50,
            seed: 0,
            construct_witnesses: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found,
    ExactAbsence,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistalWitness {
    pub class: usize,
    pub tuple: Vec<String>,
    /// The tuple stays pairwise farther apart than this in every class.
    pub delta_n: String,
    pub inf_distance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NReport {
    pub n: usize,
    pub distal_witness: Option<DistalWitness>,
    pub distal_search: SearchOutcome,
    /// Per class: a distal tuple was found.
    pub classes_with_witness: Vec<bool>,
    pub delta_n_value: String,
    pub class_cardinality_ok: bool,
    pub level: Level,
    /// A distal tuple exists in one class while another exhaustively has none.
    pub theorem_audit_failure: bool,
    pub condition3: Vec<Condition3Verdict>,
    /// Windowed condition (3) agrees with the structural level; `None` when not evaluated.
    pub condition3_agrees: Option<bool>,
    pub extraction_audit: Option<ExtractionAudit>,
    pub surrogate: Option<SurrogateStats>,
    #[serde(skip)]
    delta_positive: bool,
}

impl NReport {
    /// distal witness => Delta_n > 0 => every class has at least n points.
    pub fn hierarchy_consistent(&self) -> bool {
        (self.distal_witness.is_none() || self.delta_positive) && (!self.delta_positive || self.class_cardinality_ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ClassSize {
    Finite(usize),
    Infinite(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentChaosReport {
    pub component: usize,
    pub nodes: Vec<String>,
    pub resolution: String,
    pub period: usize,
    pub class_sizes: Vec<ClassSize>,
    pub n_range: [usize; 2],
    pub per_n: Vec<NReport>,
    /// Weakest level over the analyzed range.
    pub level: Level,
    /// Every class is a single point: a periodic orbit (or an odometer, in the limit).
    pub all_classes_singleton: bool,
    pub entropy: Option<f64>,
    /// Budget and other partial-result markers.
    pub markers: Vec<String>,
    /// Some search stopped at its budget; the level is then a lower bound.
    pub budget_exceeded: bool,
}

fn level_from(distal_everywhere: bool, delta_positive: bool, cardinality_ok: bool) -> Level {
    if distal_everywhere {
        Level::Dc1
    } else if delta_positive {
        Level::IapStar
    } else if cardinality_ok {
        Level::LiYorke
    } else {
        Level::None
    }
}

fn check_range(params: &ClassifyParams) -> Result<()> {
    if params.n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {}", params.n_max)));
    }
    Ok(())
}

/// Classifies chain component `index` of `dg` (in the digraph's component order).
pub fn classify_finite_component(sys: &FiniteSystem, dg: &ChainDigraph, index: usize, params: &ClassifyParams) -> Result<ComponentChaosReport> {
    check_range(params)?;
    let comps = dg.chain_components();
    let comp = comps.get(index).ok_or_else(|| Error::InvalidArgument(format!("no chain component {index}")))?;
    let dec = cyclic_classes(dg, comp)?;
    let classes = &dec.classes;
    let mut markers = Vec::new();
    let mut budget_exceeded = false;
    let mut per_n = Vec::new();
    for n in 2..=params.n_max {
        let mut best = Vec::with_capacity(classes.len());
        let mut outcome = SearchOutcome::ExactAbsence;
        for class in classes {
            match best_distal_finite(sys, class, n, params.tuple_budget) {
                Ok(b) => best.push(b.filter(|(_, inf)| *inf > Rational::from_integer(0))),
                Err(Error::BudgetExceeded { what, cap }) => {
                    markers.push(format!("n={n}: {what} exceeded cap {cap}"));
                    budget_exceeded = true;
                    outcome = SearchOutcome::BudgetExceeded;
                    best.push(None);
                }
                Err(e) => return Err(e),
            }
        }
        let classes_with_witness: Vec<bool> = best.iter().map(Option::is_some).collect();
        let everywhere = classes_with_witness.iter().all(|&b| b);
        let somewhere = classes_with_witness.iter().any(|&b| b);
        let distal_witness = if everywhere {
            outcome = SearchOutcome::Found;
            let c_min = best.iter().map(|b| b.as_ref().unwrap().1).min().unwrap();
            let delta = c_min / Rational::from_integer(2);
            let (tuple, inf) = best[0].clone().unwrap();
            Some(DistalWitness {
                class: 0,
                tuple: tuple.iter().map(|&u| sys.label(u).to_string()).collect(),
                delta_n: format_rational(&delta),
                inf_distance: format_rational(&inf),
            })
        } else {
            None
        };
        let theorem_audit_failure = somewhere && !everywhere && outcome == SearchOutcome::ExactAbsence;
        let delta_n = match compute_delta_n(sys, classes, n, params.tuple_budget) {
            Ok(d) => Some(d),
            Err(Error::BudgetExceeded { what, cap }) => {
                markers.push(format!("n={n}: {what} exceeded cap {cap}"));
                budget_exceeded = true;
                None
            }
            Err(e) => return Err(e),
        };
        let delta_positive = delta_n.is_some_and(|d| d > Rational::from_integer(0));
        let class_cardinality_ok = classes.iter().all(|c| c.len() >= n);
        per_n.push(NReport {
            n,
            distal_witness,
            distal_search: outcome,
            classes_with_witness,
            delta_n_value: delta_n.map_or_else(|| "unknown".to_string(), |d| format_rational(&d)),
            class_cardinality_ok,
            level: level_from(everywhere, delta_positive, class_cardinality_ok),
            theorem_audit_failure,
            condition3: Vec::new(),
            condition3_agrees: None,
            extraction_audit: None,
            surrogate: None,
            delta_positive,
        });
    }
    Ok(ComponentChaosReport {
        component: index,
        nodes: comp.iter().map(|&u| sys.label(u).to_string()).collect(),
        resolution: format!("delta={}", format_rational(&dg.delta())),
        period: dec.period,
        class_sizes: classes.iter().map(|c| ClassSize::Finite(c.len())).collect(),
        n_range: [2, params.n_max],
        level: per_n.iter().map(|r| r.level).min().unwrap_or(Level::None),
        per_n,
        all_classes_singleton: classes.iter().all(|c| c.len() == 1),
        entropy: None,
        markers,
        budget_exceeded,
    })
}

/// Classifies one strongly connected block of a vertex shift. Condition (3) is evaluated on
/// a constructed witness at the structural level and every weaker level.
pub fn classify_sft_component(g: &SftGraph, comp: &SftComponent, index: usize, params: &ClassifyParams) -> Result<ComponentChaosReport> {
    check_range(params)?;
    let size = sft_class_size(g, comp);
    let mut markers = Vec::new();
    let mut budget_exceeded = false;
    let mut per_n = Vec::new();
    for n in 2..=params.n_max {
        let mut found = Vec::with_capacity(comp.period);
        let mut outcome = SearchOutcome::ExactAbsence;
        for class in 0..comp.period {
            match search_distal_sft(g, comp, class, n, params.product_budget) {
                Ok(r) => found.push(r),
                Err(Error::BudgetExceeded { what, cap }) => {
                    markers.push(format!("n={n}: {what} exceeded cap {cap}"));
                    budget_exceeded = true;
                    outcome = SearchOutcome::BudgetExceeded;
                    found.push(None);
                }
                Err(e) => return Err(e),
            }
        }
        let classes_with_witness: Vec<bool> = found.iter().map(Option::is_some).collect();
        let everywhere = classes_with_witness.iter().all(|&b| b);
        let somewhere = classes_with_witness.iter().any(|&b| b);
        let theorem_audit_failure = somewhere && !everywhere && outcome == SearchOutcome::ExactAbsence;
        let mut distal_witness = None;
        let mut condition3 = Vec::new();
        let mut condition3_agrees = None;
        let mut extraction = None;
        let mut surrogate = None;
        let delta_n = sft_delta_n(g, comp, n)?;
        let class_cardinality_ok = size.is_none_or(|s| s >= n);
        let level = level_from(everywhere, !delta_n.is_zero(), class_cardinality_ok);
        if everywhere {
            outcome = SearchOutcome::Found;
            let delta = found.iter().map(|f| f.as_ref().unwrap().1).min().unwrap();
            let (tuple, _) = found[0].as_ref().unwrap();
            distal_witness = Some(DistalWitness {
                class: 0,
                tuple: tuple.iter().map(|p| p.to_string()).collect(),
                delta_n: delta.to_string(),
                inf_distance: sft_tuple_inf(g, tuple).to_string(),
            });
        }
        if params.construct_witnesses && level != Level::None {
            if let Some((distal, d)) = found[0].as_ref() {
                let w = build_witness(g, comp, distal, *d, level, &params.condition3, None)?;
                for l in level.and_weaker() {
                    condition3.push(check_condition3(g, &w, *d, l, &params.condition3)?);
                }
                condition3_agrees = Some(condition3.iter().all(|v| v.holds));
                if level == Level::Dc1 {
                    extraction = Some(extraction_audit(g, &w, *d, params.condition3.horizon));
                }
                if params.surrogate_trials > 0 {
                    surrogate = Some(surrogate_trials(g, comp, distal, *d, level, &params.condition3, params.surrogate_trials, params.seed)?);
                }
            } else {
                markers.push(format!("n={n}: no distal tuple in class 0 to build a condition-(3) witness from"));
            }
        }
        per_n.push(NReport {
            n,
            distal_witness,
            distal_search: outcome,
            classes_with_witness,
            delta_n_value: delta_n.to_string(),
            class_cardinality_ok,
            level,
            theorem_audit_failure,
            condition3,
            condition3_agrees,
            extraction_audit: extraction,
            surrogate,
            delta_positive: !delta_n.is_zero(),
        });
    }
    let entropy = component_graph(g, comp).and_then(|sub| sub.entropy(1e-9)).ok();
    Ok(ComponentChaosReport {
        component: index,
        nodes: comp.vertices.iter().map(|v| v.to_string()).collect(),
        resolution: "shift".into(),
        period: comp.period,
        class_sizes: (0..comp.period).map(|_| size.map_or(ClassSize::Infinite("infinite"), ClassSize::Finite)).collect(),
        n_range: [2, params.n_max],
        level: per_n.iter().map(|r| r.level).min().unwrap_or(Level::None),
        per_n,
        all_classes_singleton: size == Some(1),
        entropy,
        markers,
        budget_exceeded,
    })
}

fn component_graph(g: &SftGraph, comp: &SftComponent) -> Result<SftGraph> {
    let adj = comp.vertices.iter().map(|&u| comp.vertices.iter().map(|&v| g.has_edge(u, v)).collect()).collect();
    SftGraph::new(adj)
}

/// Every analyzed component of a finite system at resolution `dg.delta()`.
pub fn classify_finite(sys: &FiniteSystem, dg: &ChainDigraph, params: &ClassifyParams) -> Result<Vec<ComponentChaosReport>> {
    (0..dg.chain_components().len()).map(|i| classify_finite_component(sys, dg, i, params)).collect()
}

pub fn classify_sft(g: &SftGraph, params: &ClassifyParams) -> Result<Vec<ComponentChaosReport>> {
    g.components().iter().enumerate().map(|(i, c)| classify_sft_component(g, c, i, params)).collect()
}

#[doc(hidden)]
pub fn dyadic_ladder(depth: u32) -> Vec<Dyadic> {
    (1..=depth).map(Dyadic::Pow).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::numeric::rat;
    use crate::system::SftPoint;

    fn quick() -> ClassifyParams {
        ClassifyParams { surrogate_trials: 3, ..ClassifyParams::default() }
    }

    #[test]
    fn separation_windows() {
        let g = SftGraph::full_shift(2);
        let t = [SftPoint::periodic(vec![0, 1]), SftPoint::periodic(vec![1, 0])];
        let st = tuple_stats(&g, &t, &[Dyadic::Pow(1)], &[Dyadic::Pow(1)], 64).unwrap();
        assert_eq!(st.s_sets[0].1.count(), 64);
        assert_eq!(st.t_sets[0].1.count(), 0);
        let s = corpus::sys3();
        let st = tuple_stats(&s, &[0, 1], &[rat(1, 2)], &[], 6).unwrap();
        assert_eq!(st.s_sets[0].1.count(), 6);
    }

    #[test]
    fn equal_coordinates_fail_every_level() {
        let g = SftGraph::full_shift(2);
        let x = SftPoint::new(vec![0, 1, 1], vec![0, 1]);
        let t = [x.clone(), x];
        let params = Condition3Params::defaults(1024);
        let st = tuple_stats(&g, &t, &[Dyadic::Pow(1)], &dyadic_ladder(6), 1024).unwrap();
        assert_eq!(st.s_sets[0].1.count(), 0);
        assert!(st.t_sets.iter().all(|(_, w)| w.count() == 1024));
        for level in [Level::Dc1, Level::IapStar, Level::LiYorke] {
            assert!(!check_condition3(&g, &t, Dyadic::Pow(1), level, &params).unwrap().holds);
        }
    }

    #[test]
    fn fixed_points_never_cluster() {
        let s = corpus::sys2id();
        let params = Condition3Params::defaults(1024);
        let v = check_condition3(&s, &[0, 1], rat(1, 2), Level::LiYorke, &params).unwrap();
        assert!(v.separation.member);
        assert!(!v.holds);
    }

    #[test]
    fn full_shift_is_dc1() {
        let g = SftGraph::full_shift(2);
        let r = classify_sft(&g, &quick()).unwrap();
        assert_eq!(r.len(), 1);
        let c = &r[0];
        assert_eq!(c.level, Level::Dc1);
        assert_eq!(c.per_n[0].delta_n_value, "1");
        assert_eq!(c.per_n[0].distal_witness.as_ref().unwrap().delta_n, "1/2");
        assert_eq!(c.per_n[1].distal_witness.as_ref().unwrap().delta_n, "1/4");
        assert!(c.per_n.iter().all(|p| p.condition3_agrees == Some(true) && p.hierarchy_consistent()));
        assert!((c.entropy.unwrap() - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn periodic_components_are_none() {
        let s = corpus::sys2id();
        let dg = ChainDigraph::build(&s, rat(1, 2));
        for c in classify_finite(&s, &dg, &quick()).unwrap() {
            assert_eq!(c.level, Level::None);
            assert!(c.all_classes_singleton);
        }
        let rot = crate::system::discretize(&corpus::rotation_quarter_spec()).unwrap();
        let dg = ChainDigraph::build(&rot, rat(1, 8));
        let r = classify_finite(&rot, &dg, &quick()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].class_sizes.len(), 4);
        assert_eq!(r[0].level, Level::None);
        assert!(r[0].all_classes_singleton);
        let cyc = SftGraph::new(vec![vec![false, true], vec![true, false]]).unwrap();
        let r = classify_sft(&cyc, &quick()).unwrap();
        assert_eq!(r[0].level, Level::None);
        assert!(r[0].all_classes_singleton);
    }

    #[test]
    fn sys3_at_coarse_resolution() {
        let s = corpus::sys3();
        let dg = ChainDigraph::build(&s, rat(1, 1));
        let r = classify_finite_component(&s, &dg, 0, &quick()).unwrap();
        assert_eq!(r.per_n[0].delta_n_value, "1");
        assert!(r.per_n.iter().all(NReport::hierarchy_consistent));
    }

    #[test]
    fn levels_parse_and_order() {
        assert_eq!("dc1".parse::<Level>().unwrap(), Level::Dc1);
        assert!(Level::Dc1 > Level::IapStar && Level::IapStar > Level::LiYorke && Level::LiYorke > Level::None);
        assert_eq!(Level::IapStar.and_weaker(), vec![Level::IapStar, Level::LiYorke]);
    }
}

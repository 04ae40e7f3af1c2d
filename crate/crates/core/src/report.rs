//! Batch analyses and their JSON report, plus CSV, SVG and DOT sidecars.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::basin::{assign_basins, verify_partition_laws, PartitionReport};
use crate::chain::{critical_deltas, ChainDigraph};
use crate::chaos::{
    classify_finite, classify_sft, construct_witness, tuple_stats, ClassifyParams, ComponentChaosReport, Condition3Params, Level,
};
use crate::cyclic::{decompose, proximal_partition, TransientIndex};
use crate::error::{Error, Result};
use crate::furstenberg::{
    inclusion_audit_exact, inclusion_audit_window, rotation_time_set, EventuallyPeriodicSet, InclusionAudit, TimeSet, WindowParams,
};
use crate::numeric::{format_big, format_rational, parse_rational, Dyadic, ExactDistance, Rational};
use crate::shadowing::{
    default_dyadic_schedule, default_schedule, find_shadowing_point, parse_finite_orbit, parse_sft_orbit, sft_shadow, validate_limit_pseudo_orbit,
    validate_pseudo_orbit, LimitVerdict,
};
use crate::system::spec::{SystemModel, SystemSpec, SCHEMA_VERSION};
use crate::system::{FiniteSystem, GridMapSpec, MapFamily, RealParam, SftGraph};

/// Which resolutions a finite system is analyzed at. Critical values are the distinct
/// `d(f(u), v)`; `0` stands for every resolution below the smallest positive one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "value")]
pub enum LadderPolicy {
    AllCritical,
    Explicit(#[serde(serialize_with = "ser_rationals")] Vec<Rational>),
    /// The `k` coarsest critical values.
    TopK(usize),
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl FromStr for LadderPolicy {
    type Err = Error;

    /// `all-critical`, `top-K`, or a comma-separated list of rationals.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all-critical" {
            return Ok(LadderPolicy::AllCritical);
        }
        if let Some(k) = s.strip_prefix("top-") {
            let k: usize = k.parse().map_err(|_| Error::InvalidArgument(format!("bad ladder policy {s:?}")))?;
            if k == 0 {
                return Err(Error::EmptyLadder);
            }
            return Ok(LadderPolicy::TopK(k));
        }
        let list = s.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        if list.is_empty() {
            return Err(Error::EmptyLadder);
        }
        Ok(LadderPolicy::Explicit(list))
    }
}

impl LadderPolicy {
    /// Strictly descending resolutions for `sys`.
    pub fn resolve(&self, sys: &FiniteSystem) -> Result<Vec<Rational>> {
        let mut crit = critical_deltas(sys);
        crit.reverse();
        let mut out = match self {
            LadderPolicy::AllCritical => crit,
            LadderPolicy::TopK(k) => crit.into_iter().take(*k).collect(),
            LadderPolicy::Explicit(v) => {
                if v.iter().any(|d| *d < Rational::from_integer(0)) {
                    return Err(Error::InvalidArgument("ladder entries must be nonnegative".into()));
                }
                v.clone()
            }
        };
        out.sort_unstable_by(|a, b| b.cmp(a));
        out.dedup();
        if out.is_empty() {
            return Err(Error::EmptyLadder);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisConfig {
    pub spec: String,
    pub ladder: LadderPolicy,
    pub n_max: usize,
    pub horizon: usize,
    pub window: WindowParams,
    pub eps_depth: u32,
    pub tuple_budget: usize,
    pub product_budget: usize,
    pub surrogate_trials: usize,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            spec: String::new(),
            ladder: LadderPolicy::AllCritical,
            n_max: 3,
            horizon: 2048,
            window: WindowParams::defaults(2048),
            eps_depth: 6,
            tuple_budget: 1_000_000,
            product_budget: 1_000_000,
            surrogate_trials: 50,
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {}", self.n_max)));
        }
        if self.horizon < 64 {
            return Err(Error::InvalidArgument(format!("horizon must be at least 64, got {}", self.horizon)));
        }
        Ok(())
    }

    pub fn classify_params(&self) -> ClassifyParams {
        ClassifyParams {
            n_max: self.n_max,
            condition3: Condition3Params { horizon: self.horizon, window: self.window.clone(), eps_depth: self.eps_depth },
            tuple_budget: self.tuple_budget,
            product_budget: self.product_budget,
            surrogate_trials: self.surrogate_trials,
            seed: self.seed,
            construct_witnesses: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSummary {
    pub name: String,
    pub kind: String,
    pub size: usize,
    pub labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub nodes: Vec<String>,
    pub period: usize,
    pub classes: Vec<Vec<String>>,
    pub transient_index: Option<TransientIndex>,
    /// Nodes whose image leaves the component at this resolution.
    pub escaping: Vec<String>,
    /// Two nearby nodes in different classes, when the classes are not `delta`-separated.
    pub nearby_pair_across_classes: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LyapunovEntry {
    pub node: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasinRow {
    pub node: String,
    pub component: usize,
    pub class: usize,
    pub entry_time: usize,
    pub omega: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasinTable {
    pub rows: Vec<BasinRow>,
    pub laws: PartitionReport,
    pub recurrent_mismatch: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub context: String,
    pub error: String,
    pub exit_code: i32,
}

impl Failure {
    fn new(context: impl Into<String>, e: &Error) -> Self {
        Failure { context: context.into(), error: e.to_string(), exit_code: e.exit_code() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainAnalysis {
    pub delta: String,
    pub edge_count: usize,
    pub chain_recurrent: Vec<String>,
    pub components: Vec<ComponentSummary>,
    pub lyapunov: Vec<LyapunovEntry>,
    pub basins: Option<BasinTable>,
    pub chaos: Vec<ComponentChaosReport>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProximalTable {
    pub component: Vec<String>,
    pub ladder: Vec<String>,
    pub split_at: Option<String>,
    pub classes: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SftComponentSummary {
    pub vertices: Vec<usize>,
    pub period: usize,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SftAnalysis {
    pub entropy: Option<f64>,
    pub components: Vec<SftComponentSummary>,
    pub chaos: Vec<ComponentChaosReport>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FurstenbergEntry {
    pub source: String,
    pub audit: InclusionAudit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub system: SystemSummary,
    pub ladder: Vec<String>,
    pub chain_analyses: Vec<ChainAnalysis>,
    pub proximal_partitions: Vec<ProximalTable>,
    pub sft: Option<SftAnalysis>,
    pub furstenberg: Vec<FurstenbergEntry>,
    pub provenance: Provenance,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Highest exit code among recorded failures, `0` if none.
    pub fn exit_code(&self) -> i32 {
        let chain = self.chain_analyses.iter().flat_map(|c| &c.failures);
        let sft = self.sft.iter().flat_map(|s| &s.failures);
        let budget = self.chaos_reports().iter().any(|c| c.budget_exceeded);
        chain.chain(sft).map(|f| f.exit_code).chain(budget.then_some(3)).max().unwrap_or(0)
    }

    pub fn chaos_reports(&self) -> Vec<&ComponentChaosReport> {
        let finite = self.chain_analyses.iter().flat_map(|c| &c.chaos);
        finite.chain(self.sft.iter().flat_map(|s| &s.chaos)).collect()
    }
}

fn labels(sys: &FiniteSystem, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&u| sys.label(u).to_string()).collect()
}

/// Chain structure, decompositions, Lyapunov values, basins and chaos levels at one resolution.
pub fn chain_analysis(sys: &FiniteSystem, delta: Rational, params: &ClassifyParams) -> ChainAnalysis {
    let dg = ChainDigraph::build(sys, delta);
    let mut failures = Vec::new();
    let ctx = |what: &str| format!("delta={} {what}", format_rational(&delta));
    let mut components = Vec::new();
    for c in dg.chain_components() {
        match decompose(&dg, &c) {
            Ok(d) => components.push(ComponentSummary {
                nodes: labels(sys, &c),
                period: d.period,
                classes: d.classes.iter().map(|k| labels(sys, k)).collect(),
                transient_index: d.transient_index.clone(),
                escaping: labels(sys, &dg.escaping_nodes(&c)),
                nearby_pair_across_classes: d.p2_witness.map(|(u, v)| [sys.label(u).to_string(), sys.label(v).to_string()]),
            }),
            Err(e) => failures.push(Failure::new(ctx("cyclic decomposition"), &e)),
        }
    }
    let lyapunov = dg
        .complete_lyapunov()
        .iter()
        .enumerate()
        .map(|(u, v)| LyapunovEntry { node: sys.label(u).to_string(), value: format_big(v) })
        .collect();
    let basins = match assign_basins(sys, &dg) {
        Ok(ba) => Some(BasinTable {
            rows: (0..sys.len())
                .map(|x| BasinRow {
                    node: sys.label(x).to_string(),
                    component: ba.component_of[x],
                    class: ba.class_of_basin[x],
                    entry_time: ba.entry_time[x],
                    omega: labels(sys, &ba.omega[x]),
                })
                .collect(),
            laws: verify_partition_laws(sys, &ba),
            recurrent_mismatch: labels(sys, &ba.recurrent_mismatch),
        }),
        Err(e) => {
            failures.push(Failure::new(ctx("basins"), &e));
            None
        }
    };
    let chaos = match classify_finite(sys, &dg, params) {
        Ok(r) => r,
        Err(e) => {
            failures.push(Failure::new(ctx("chaos classification"), &e));
            Vec::new()
        }
    };
    ChainAnalysis {
        delta: format_rational(&delta),
        edge_count: dg.graph().edge_count(),
        chain_recurrent: labels(sys, &dg.chain_recurrent_set()),
        components,
        lyapunov,
        basins,
        chaos,
        failures,
    }
}

pub fn sft_analysis(g: &SftGraph, params: &ClassifyParams) -> SftAnalysis {
    let mut failures = Vec::new();
    let entropy = match g.entropy(1e-9) {
        Ok(h) => Some(h),
        Err(e) => {
            failures.push(Failure::new("entropy", &e));
            None
        }
    };
    let components = g
        .components()
        .iter()
        .map(|c| SftComponentSummary { vertices: c.vertices.clone(), period: c.period, classes: (0..c.period).map(|k| c.class_vertices(k)).collect() })
        .collect();
    let chaos = match classify_sft(g, params) {
        Ok(r) => r,
        Err(e) => {
            failures.push(Failure::new("chaos classification", &e));
            Vec::new()
        }
    };
    SftAnalysis { entropy, components, chaos, failures }
}

fn grid_summary(spec: &GridMapSpec) -> String {
    let family = match &spec.family {
        MapFamily::Tent { slope } => format!("tent slope={slope}"),
        MapFamily::Rotation { alpha } => format!("rotation alpha={alpha}"),
        MapFamily::PiecewiseLinear { .. } => "piecewise-linear".to_string(),
    };
    format!("{family} cells={}", spec.cell_count)
}

/// Full pipeline: ladder, chain analysis per resolution (in parallel), proximal partitions,
/// shift analysis and the Furstenberg appendix. Output order never depends on scheduling.
pub fn cmd_analyze(spec: &SystemSpec, config: &AnalysisConfig) -> Result<Report> {
    config.validate()?;
    let params = config.classify_params();
    let mut report = Report {
        schema_version: SCHEMA_VERSION.to_string(),
        system: SystemSummary { name: spec.name.clone(), kind: spec.model.kind().to_string(), size: 0, labels: Vec::new(), grid: None },
        ladder: Vec::new(),
        chain_analyses: Vec::new(),
        proximal_partitions: Vec::new(),
        sft: None,
        furstenberg: Vec::new(),
        provenance: Provenance {
            tool: "chainscope".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: config.seed,
            config: config.clone(),
        },
    };
    if let SystemModel::Grid { spec: grid, .. } = &spec.model {
        report.system.grid = Some(grid_summary(grid));
        if let MapFamily::Rotation { alpha } = &grid.family {
            let w = rotation_time_set(alpha, config.horizon);
            let audit = inclusion_audit_window(&w, &config.window)?;
            report.furstenberg.push(FurstenbergEntry { source: format!("rotation return times, alpha={alpha}, H={}", config.horizon), audit });
        }
    }
    match &spec.model {
        SystemModel::Sft(g) => {
            report.system.size = g.vertex_count();
            report.system.labels = (0..g.vertex_count()).map(|v| v.to_string()).collect();
            let analysis = sft_analysis(g, &params);
            for c in &analysis.chaos {
                if c.level == Level::Dc1 {
                    if let Ok(entry) = witness_separation_audit(g, c.component, &params) {
                        report.furstenberg.push(entry);
                    }
                }
            }
            report.sft = Some(analysis);
        }
        model => {
            let sys = model.finite().expect("non-shift models are finite");
            report.system.size = sys.len();
            report.system.labels = sys.labels().to_vec();
            let ladder = config.ladder.resolve(sys)?;
            report.ladder = ladder.iter().map(format_rational).collect();
            report.chain_analyses = ladder.par_iter().map(|&d| chain_analysis(sys, d, &params)).collect();
            let top = ChainDigraph::build(sys, ladder[0]);
            for c in top.chain_components() {
                let p = proximal_partition(sys, &c, &ladder)?;
                report.proximal_partitions.push(ProximalTable {
                    component: labels(sys, &p.component),
                    ladder: p.ladder.iter().map(format_rational).collect(),
                    split_at: p.split_at.map(|d| format_rational(&d)),
                    classes: p.classes.iter().map(|k| labels(sys, k)).collect(),
                });
            }
        }
    }
    Ok(report)
}

fn witness_separation_audit(g: &SftGraph, component: usize, params: &ClassifyParams) -> Result<FurstenbergEntry> {
    let comp = &g.components()[component];
    let (w, d) = construct_witness(g, comp, 0, 2, Level::Dc1, &params.condition3, params.product_budget)?;
    let stats = tuple_stats(g, &w, &[d], &[], params.condition3.horizon)?;
    let audit = inclusion_audit_window(&stats.s_sets[0].1, &params.condition3.window)?;
    Ok(FurstenbergEntry { source: format!("component {component}: separation set S({d}) of the DC1 witness pair"), audit })
}

/// Per-time minimum and maximum pairwise distances of the DC1 witness tuples of every
/// shift component, as CSV rows `component,n,i,min,max`.
pub fn witness_trace_csv(g: &SftGraph, params: &ClassifyParams) -> Result<String> {
    let mut out = String::from("component,n,i,min_distance,max_distance\n");
    for (ci, comp) in g.components().iter().enumerate() {
        for n in 2..=params.n_max {
            let Ok((w, _)) = construct_witness(g, comp, 0, n, Level::Dc1, &params.condition3, params.product_budget) else { continue };
            let st = tuple_stats(g, &w, &[], &[], params.condition3.horizon)?;
            for i in 0..st.horizon {
                let _ = writeln!(out, "{ci},{n},{i},{},{}", st.min_trace[i], st.max_trace[i]);
            }
        }
    }
    Ok(out)
}

/// Input to the Furstenberg subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum FurstenbergInput {
    Rotation { alpha: RealParam, horizon: usize },
    EventuallyPeriodic(EventuallyPeriodicSet),
    Parsed(TimeSet),
}

impl FurstenbergInput {
    /// `alpha=<real>` and `H=<horizon>` tokens.
    pub fn rotation_from_tokens(tokens: &[String]) -> Result<Self> {
        let mut alpha = None;
        let mut horizon = 10_000;
        for t in tokens {
            match t.split_once('=') {
                Some(("alpha", v)) => alpha = Some(RealParam::parse(v)?),
                Some(("H", v)) | Some(("h", v)) => {
                    horizon = v.parse().map_err(|_| Error::InvalidArgument(format!("bad horizon {v:?}")))?;
                }
                _ => return Err(Error::InvalidArgument(format!("unexpected rotation argument {t:?}"))),
            }
        }
        let alpha = alpha.ok_or_else(|| Error::InvalidArgument("rotation needs alpha=<value>".into()))?;
        Ok(FurstenbergInput::Rotation { alpha, horizon })
    }

    /// `pre=<bits>` and `pat=<bits>` tokens.
    pub fn eventually_periodic_from_tokens(tokens: &[String]) -> Result<Self> {
        let (mut pre, mut pat) = (String::new(), None);
        for t in tokens {
            match t.split_once('=') {
                Some(("pre", v)) => pre = v.to_string(),
                Some(("pat", v)) => pat = Some(v.to_string()),
                _ => return Err(Error::InvalidArgument(format!("unexpected set argument {t:?}"))),
            }
        }
        let pat = pat.ok_or_else(|| Error::InvalidArgument("eventually periodic set needs pat=<bits>".into()))?;
        Ok(FurstenbergInput::EventuallyPeriodic(EventuallyPeriodicSet::parse(&pre, &pat)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FurstenbergTable {
    pub source: String,
    pub audit: InclusionAudit,
    pub density: String,
}

impl FurstenbergTable {
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.source);
        for v in &self.audit.verdicts {
            let params = v.params.as_ref().map(|p| format!(" theta={} run_req={} m_max={} tail_start={}", p.theta, p.run_req, p.m_max, p.tail_start));
            let cert = serde_json::to_string(&v.certificate).expect("certificate serializes");
            let _ = writeln!(out, "{:<9} {:<5} {:<8} {cert}{}", v.family.to_string(), v.member, format!("{:?}", v.mode).to_lowercase(), params.unwrap_or_default());
        }
        let _ = writeln!(out, "density {}", self.density);
        if let Some(w) = &self.audit.warning {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

pub fn cmd_furstenberg(input: &FurstenbergInput, params: Option<&WindowParams>) -> Result<FurstenbergTable> {
    match input {
        FurstenbergInput::Rotation { alpha, horizon } => {
            let w = rotation_time_set(alpha, *horizon);
            let p = params.cloned().unwrap_or_else(|| WindowParams::defaults(*horizon));
            Ok(FurstenbergTable {
                source: format!("rotation return times alpha={alpha} H={horizon}"),
                audit: inclusion_audit_window(&w, &p)?,
                density: format!("{:.6}", w.density()),
            })
        }
        FurstenbergInput::EventuallyPeriodic(a) | FurstenbergInput::Parsed(TimeSet::EventuallyPeriodic(a)) => Ok(FurstenbergTable {
            source: "eventually periodic set".into(),
            audit: inclusion_audit_exact(a)?,
            density: format_rational(&a.upper_density()),
        }),
        FurstenbergInput::Parsed(TimeSet::Window(w)) => {
            let p = params.cloned().unwrap_or_else(|| WindowParams::defaults(w.horizon()));
            Ok(FurstenbergTable {
                source: format!("window H={}", w.horizon()),
                audit: inclusion_audit_window(w, &p)?,
                density: format!("{:.6}", w.density()),
            })
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShadowOptions {
    /// Step bound; defaults to the largest step error.
    pub delta: Option<Rational>,
    /// Tracking bound for finite systems; defaults to `delta`.
    pub epsilon: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowSummary {
    pub kind: String,
    pub length: usize,
    pub delta: String,
    pub step_errors: Vec<String>,
    pub limit: LimitVerdict,
    pub point: Option<String>,
    pub max_tracking: Option<String>,
    pub tracking: Vec<String>,
    #[serde(skip)]
    pub error_values: Vec<f64>,
    #[serde(skip)]
    pub tracking_values: Vec<f64>,
}

impl serde::Serialize for LimitVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LimitVerdict", 3)?;
        st.serialize_field("valid", &self.valid)?;
        st.serialize_field("failing_checkpoints", &self.failing_checkpoints)?;
        st.serialize_field("within_delta", &self.within_delta)?;
        st.end()
    }
}

impl ShadowSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,step_error,tracking_error\n");
        for i in 0..self.length {
            let e = self.step_errors.get(i).map(String::as_str).unwrap_or("");
            let t = self.tracking.get(i).map(String::as_str).unwrap_or("");
            let _ = writeln!(out, "{i},{e},{t}");
        }
        out
    }

    pub fn to_svg(&self) -> String {
        polyline_svg("pseudo-orbit step and tracking errors", &[("step error", &self.error_values), ("tracking error", &self.tracking_values)])
    }
}

/// Validates a pseudo-orbit and shadows it: brute force on finite systems, the symbolic
/// construction on shifts (depth read off `delta = 2^-n`).
pub fn cmd_shadow(spec: &SystemSpec, orbit_text: &str, opts: &ShadowOptions) -> Result<ShadowSummary> {
    match &spec.model {
        SystemModel::Sft(g) => {
            let xs = parse_sft_orbit(g, orbit_text)?;
            for x in &xs {
                g.check_point(x)?;
            }
            let raw = validate_pseudo_orbit(g, xs.clone(), Dyadic::ONE)?;
            let delta = match opts.delta {
                Some(d) => Dyadic::from_rational(&d).ok_or_else(|| Error::InvalidArgument(format!("shift step bound must be 0 or 1/2^n, got {d}")))?,
                None => raw.max_error(),
            };
            let po = validate_pseudo_orbit(g, xs, delta)?;
            let depth = match delta {
                Dyadic::Zero => 1,
                Dyadic::Pow(k) => k.max(1),
            };
            let limit = validate_limit_pseudo_orbit(&po, delta, &default_dyadic_schedule(delta.max(Dyadic::Pow(depth))))?;
            let r = sft_shadow(g, &po, depth)?;
            Ok(ShadowSummary {
                kind: "sft".into(),
                length: po.len(),
                delta: delta.to_string(),
                step_errors: po.errors.iter().map(|e| e.to_string()).collect(),
                limit,
                point: r.point.as_ref().map(|p| p.to_string()),
                max_tracking: Some(r.epsilon.to_string()),
                tracking: r.tracking.iter().map(|e| e.to_string()).collect(),
                error_values: po.errors.iter().map(|e| e.to_f64()).collect(),
                tracking_values: r.tracking.iter().map(|e| e.to_f64()).collect(),
            })
        }
        model => {
            let sys = model.finite().expect("non-shift models are finite");
            let xs = parse_finite_orbit(sys, orbit_text)?;
            let delta = match opts.delta {
                Some(d) => d,
                None => validate_pseudo_orbit(sys, xs.clone(), Rational::from_integer(i64::MAX))?.max_error(),
            };
            let po = validate_pseudo_orbit(sys, xs, delta)?;
            let positive = if delta > Rational::from_integer(0) { delta } else { Rational::from_integer(1) };
            let limit = validate_limit_pseudo_orbit(&po, delta, &default_schedule(positive))?;
            let eps = opts.epsilon.unwrap_or(delta);
            let r = find_shadowing_point(sys, &po, eps);
            Ok(ShadowSummary {
                kind: model.kind().into(),
                length: po.len(),
                delta: format_rational(&delta),
                step_errors: po.errors.iter().map(format_rational).collect(),
                limit,
                point: r.point.map(|z| sys.label(z).to_string()),
                max_tracking: r.point.map(|_| format_rational(&r.epsilon)),
                tracking: r.tracking.iter().map(format_rational).collect(),
                error_values: po.errors.iter().map(|e| e.to_f64()).collect(),
                tracking_values: r.tracking.iter().map(|e| e.to_f64()).collect(),
            })
        }
    }
}

/// A plain SVG line chart, one polyline per series, x = index.
pub fn polyline_svg(title: &str, series: &[(&str, &[f64])]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let len = series.iter().map(|s| s.1.len()).max().unwrap_or(0).max(2);
    let ymax = series.iter().flat_map(|s| s.1.iter().copied()).fold(0.0f64, f64::max).max(1e-12);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{}</text>"#, xml_escape(title));
    let _ = writeln!(out, r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - PAD, W - PAD, H - PAD);
    let _ = writeln!(out, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#, H - PAD);
    for (k, (name, ys)) in series.iter().enumerate() {
        let pts: Vec<String> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                let x = PAD + (W - 2.0 * PAD) * i as f64 / (len - 1) as f64;
                let y = H - PAD - (H - 2.0 * PAD) * y / ymax;
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            W - PAD - 150.0,
            PAD + 16.0 * k as f64,
            xml_escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

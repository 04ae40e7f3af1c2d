use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chainscope::chain::ChainDigraph;
use chainscope::chaos::{classify_finite, classify_sft, tuple_stats, construct_witness, Level};
use chainscope::corpus;
use chainscope::furstenberg::{parse_time_set, WindowParams};
use chainscope::numeric::{parse_rational, rat};
use chainscope::report::{
    chain_analysis, cmd_analyze, cmd_furstenberg, cmd_shadow, polyline_svg, witness_trace_csv, AnalysisConfig, FurstenbergInput, LadderPolicy,
    ShadowOptions,
};
use chainscope::system::spec::{SystemModel, SystemSpec};
use chainscope::{Error, Rational, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chainscope", version, about = "Chain structure, shadowing and chaos analysis of finite systems and vertex shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: chain structure per resolution, basins, chaos levels, JSON report.
    Analyze {
        /// Spec file or built-in name (see `chainscope corpus`).
        spec: String,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain digraph, components, classes, Lyapunov values and basins at one resolution.
    Chains {
        spec: String,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chaos levels of every chain component (every ladder resolution unless --delta is given).
    ClassifyChaos {
        spec: String,
        #[arg(long, value_parser = rational_arg)]
        delta: Option<Rational>,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership of a time set in UD1, THICK, IAPSTAR and INFINITE.
    Furstenberg {
        /// `alpha=<golden|p/q|float> H=<horizon>`
        #[arg(long, num_args = 1.., conflicts_with_all = ["eventually_periodic", "file"])]
        rotation: Option<Vec<String>>,
        /// `pre=<bits> pat=<bits>`
        #[arg(long, num_args = 1.., conflicts_with = "file")]
        eventually_periodic: Option<Vec<String>>,
        /// Time-set file (`window H` run-length lines, or `eventually-periodic`).
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        run_req: Option<usize>,
        #[arg(long, value_parser = rational_arg)]
        theta: Option<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a pseudo-orbit (one state per line) and shadow it.
    Shadow {
        spec: String,
        orbit: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        delta: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Option<Rational>,
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in systems, or print one as a spec.
    Corpus { name: Option<String> },
}

#[derive(Args, Clone)]
struct AnalysisOpts {
    /// all-critical | top-K | comma-separated rationals
    #[arg(long, default_value = "all-critical")]
    ladder: String,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    #[arg(long, default_value_t = 2048)]
    horizon: usize,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long, default_value_t = 6)]
    eps_depth: u32,
    /// Cap on enumerated tuples and product-graph states.
    #[arg(long, env = "CHAINSCOPE_BUDGET", default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    surrogate_trials: usize,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

impl AnalysisOpts {
    fn config(&self, spec: &str) -> Result<AnalysisConfig> {
        let mut window = WindowParams::defaults(self.horizon);
        if let Some(m) = self.m_max {
            window.m_max = m;
        }
        let config = AnalysisConfig {
            spec: spec.to_string(),
            ladder: self.ladder.parse::<LadderPolicy>()?,
            n_max: self.n_max,
            horizon: self.horizon,
            window,
            eps_depth: self.eps_depth,
            tuple_budget: self.budget,
            product_budget: self.budget,
            surrogate_trials: self.surrogate_trials,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

fn load_spec(arg: &str) -> Result<SystemSpec> {
    let path = Path::new(arg);
    if path.exists() {
        return SystemSpec::load(path);
    }
    corpus::builtin(arg).ok_or_else(|| Error::Spec(format!("{arg:?} is neither a readable file nor a built-in system")))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze { spec, opts, emit_dot, emit_csv, emit_svg, out } => {
            let config = opts.config(&spec)?;
            let model = load_spec(&spec)?;
            let report = cmd_analyze(&model, &config)?;
            emit(out.as_deref(), &report.to_json())?;
            match &model.model {
                SystemModel::Sft(g) => {
                    let params = config.classify_params();
                    if let Some(p) = emit_csv {
                        fs::write(p, witness_trace_csv(g, &params)?)?;
                    }
                    if let Some(p) = emit_svg {
                        let comp = g.components().into_iter().next().ok_or(Error::NotIrreducible(0))?;
                        let (w, _) = construct_witness(g, &comp, 0, 2, Level::Dc1, &params.condition3, params.product_budget)?;
                        let st = tuple_stats(g, &w, &[], &[], params.condition3.horizon)?;
                        let lo: Vec<f64> = st.min_trace.iter().map(|d| d.to_f64()).collect();
                        let hi: Vec<f64> = st.max_trace.iter().map(|d| d.to_f64()).collect();
                        fs::write(p, polyline_svg("DC1 witness pair: pairwise distance", &[("min", &lo), ("max", &hi)]))?;
                    }
                    if emit_dot.is_some() {
                        eprintln!("note: --emit-dot applies to finite systems only");
                    }
                }
                m => {
                    let sys = m.finite().expect("finite");
                    if let Some(p) = emit_dot {
                        let ladder = config.ladder.resolve(sys)?;
                        let dot: String = ladder.iter().map(|&d| ChainDigraph::build(sys, d).to_dot()).collect();
                        fs::write(p, dot)?;
                    }
                    if let Some(p) = emit_csv {
                        let mut csv = String::from("delta,node,component,class,entry_time,lyapunov\n");
                        for ca in &report.chain_analyses {
                            if let Some(b) = &ca.basins {
                                for (row, l) in b.rows.iter().zip(&ca.lyapunov) {
                                    csv += &format!("{},{},{},{},{},{}\n", ca.delta, row.node, row.component, row.class, row.entry_time, l.value);
                                }
                            }
                        }
                        fs::write(p, csv)?;
                    }
                    if let Some(p) = emit_svg {
                        let counts: Vec<f64> = report.chain_analyses.iter().rev().map(|c| c.components.len() as f64).collect();
                        fs::write(p, polyline_svg("chain components per resolution (fine to coarse)", &[("components", &counts)]))?;
                    }
                }
            }
            Ok(report.exit_code())
        }
        Command::Chains { spec, delta, opts, emit_dot, out } => {
            let config = opts.config(&spec)?;
            let model = load_spec(&spec)?;
            let sys = model.model.finite().ok_or_else(|| Error::InvalidArgument("chains applies to finite and grid systems".into()))?;
            let analysis = chain_analysis(sys, delta, &config.classify_params());
            if let Some(p) = emit_dot {
                fs::write(p, ChainDigraph::build(sys, delta).to_dot())?;
            }
            emit(out.as_deref(), &json(&analysis))?;
            let budget = analysis.chaos.iter().any(|c| c.budget_exceeded).then_some(3);
            Ok(analysis.failures.iter().map(|f| f.exit_code).chain(budget).max().unwrap_or(0))
        }
        Command::ClassifyChaos { spec, delta, opts, out } => {
            let config = opts.config(&spec)?;
            let params = config.classify_params();
            let model = load_spec(&spec)?;
            let mut budget = false;
            let value = match &model.model {
                SystemModel::Sft(g) => {
                    let reports = classify_sft(g, &params)?;
                    budget = reports.iter().any(|c| c.budget_exceeded);
                    serde_json::to_value(reports)
                }
                m => {
                    let sys = m.finite().expect("finite");
                    let ladder = match delta {
                        Some(d) => vec![d],
                        None => config.ladder.resolve(sys)?,
                    };
                    let mut per = Vec::new();
                    for d in ladder {
                        let dg = ChainDigraph::build(sys, d);
                        let reports = classify_finite(sys, &dg, &params)?;
                        budget |= reports.iter().any(|c| c.budget_exceeded);
                        per.push(serde_json::json!({"delta": chainscope::numeric::format_rational(&d), "components": reports}));
                    }
                    Ok(serde_json::Value::Array(per))
                }
            }
            .expect("serializable");
            emit(out.as_deref(), &json(&value))?;
            Ok(if budget { 3 } else { 0 })
        }
        Command::Furstenberg { rotation, eventually_periodic, file, m_max, run_req, theta, out } => {
            let input = if let Some(t) = rotation {
                FurstenbergInput::rotation_from_tokens(&t)?
            } else if let Some(t) = eventually_periodic {
                FurstenbergInput::eventually_periodic_from_tokens(&t)?
            } else if let Some(f) = file {
                FurstenbergInput::Parsed(parse_time_set(&fs::read_to_string(f)?)?)
            } else {
                return Err(Error::InvalidArgument("give --rotation, --eventually-periodic or --file".into()));
            };
            let horizon = match &input {
                FurstenbergInput::Rotation { horizon, .. } => Some(*horizon),
                FurstenbergInput::Parsed(chainscope::furstenberg::TimeSet::Window(w)) => Some(w.horizon()),
                _ => None,
            };
            let params = horizon.map(|h| {
                let mut p = WindowParams::defaults(h);
                if let Some(m) = m_max {
                    p.m_max = m;
                }
                if let Some(r) = run_req {
                    p.run_req = r;
                }
                p.theta = theta.unwrap_or(rat(1, 100));
                p
            });
            let table = cmd_furstenberg(&input, params.as_ref())?;
            print!("{}", table.to_text());
            if let Some(p) = out {
                fs::write(p, json(&table))?;
            }
            Ok(0)
        }
        Command::Shadow { spec, orbit, delta, epsilon, emit_csv, emit_svg, out } => {
            let model = load_spec(&spec)?;
            let text = fs::read_to_string(&orbit)?;
            let summary = cmd_shadow(&model, &text, &ShadowOptions { delta, epsilon })?;
            if let Some(p) = emit_csv {
                fs::write(p, summary.to_csv())?;
            }
            if let Some(p) = emit_svg {
                fs::write(p, summary.to_svg())?;
            }
            emit(out.as_deref(), &json(&summary))?;
            Ok(0)
        }
        Command::Corpus { name } => {
            match name {
                None => {
                    for s in corpus::builtins() {
                        println!("{:<20} {}", s.name, s.model.kind());
                    }
                }
                Some(n) => {
                    let s = corpus::builtin(&n).ok_or_else(|| Error::Spec(format!("no built-in system {n:?}")))?;
                    println!("{}", serde_json::to_string_pretty(&s.to_json()).expect("json"));
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

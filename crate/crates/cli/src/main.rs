use aggconc::analysis::{check_relative_lipschitz, fixtures, LipConfig, Metric};
use aggconc::asymptotics::{analyze_dense, analyze_sparse, Analysis, MeanMode, SparseConfig};
use aggconc::eval::{Environment, EvalOptions, Evaluator};
use aggconc::graph::{parse_graph_literal, parse_pair_literal, to_literal, ExtensionPair, Graph};
use aggconc::harness::{emit_plot, emit_report, load_report, run_concentration_experiment, ExperimentFile, ReportFormat};
use aggconc::random::{sample, Regime};
use aggconc::term::{parse_with, Term};
use aggconc::types::{closure, count_embeddings, count_extensions, strictly_balanced_chain, ExtensionCaps};
use aggconc::{Connective, Registry};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "aggconc", version, about = "Aggregate real-valued logic over random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a term on a graph.
    Eval {
        /// Term text, or a file holding it.
        #[arg(long)]
        term: String,
        /// Graph literal file.
        #[arg(long)]
        graph: PathBuf,
        /// Free-variable assignment, e.g. `u=3,v=7`.
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Sample an Erdős–Rényi graph and write it as a graph literal.
    Sample {
        #[arg(long)]
        n: usize,
        /// `dense:p=<x>` or `sparse:alpha=<x>`.
        #[arg(long)]
        regime: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled relative Lipschitz check of a connective.
    Lipcheck(LipArgs),
    /// Closure of a tuple in a graph.
    Closure {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated vertices.
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        alpha: f64,
    },
    /// Count extensions of a tuple along a pattern pair.
    Extcount {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "")]
        tuple: String,
        /// Pair file: base literal, `---`, top literal, `base=...`.
        #[arg(long)]
        pattern: PathBuf,
    },
    /// Strictly balanced chain of a pair.
    Chain {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Leading-order prediction of a closed term.
    Analyze(AnalyzeArgs),
    /// Run a Monte-Carlo experiment from a flat TOML config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// JSON report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Exit with status 1 when a verdict fails.
        #[arg(long)]
        strict: bool,
    },
    /// Work with emitted reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
    /// Inspect the connective registry.
    Registry {
        #[command(subcommand)]
        command: RegistryCommand,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Write a gnuplot data file from a JSON report.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum RegistryCommand {
    /// Print the JSON catalogue of connectives.
    Catalog,
}

#[derive(Args)]
struct LipArgs {
    /// Registry name (`sigmoid`, `pow[2]`), fixture name, or polynomial in x1..xm.
    #[arg(long = "fn")]
    function: String,
    /// Arity for variadic connectives and polynomials.
    #[arg(long)]
    arity: Option<usize>,
    /// Sampling box `lo,hi`.
    #[arg(long = "box", default_value = "0.001,1000")]
    bounds: String,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e6)]
    c_bound: f64,
    /// `coordinatewise` or `euclidean`.
    #[arg(long, default_value = "coordinatewise")]
    metric: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Term text, or a file holding it.
    #[arg(long)]
    term: String,
    /// `dense:p=<x>` or `sparse:alpha=<x>`.
    #[arg(long)]
    regime: Option<String>,
    #[arg(long = "dense-p")]
    dense_p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Depth bound for the closure parameter schedule.
    #[arg(long = "D")]
    depth: Option<usize>,
    /// Width bound for the closure parameter schedule.
    #[arg(long = "W")]
    width: Option<usize>,
    /// `desugar` or `native` treatment of means (sparse).
    #[arg(long, default_value = "desugar")]
    mean_mode: String,
    #[arg(long)]
    max_new_vertices: Option<usize>,
    /// Print the full analysis as JSON.
    #[arg(long)]
    json: bool,
}

fn read_text(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        return std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    }
    Ok(arg.to_string())
}

fn read_term(arg: &str, reg: &Registry) -> Result<Term> {
    Ok(parse_with(read_text(arg)?.trim(), reg)?)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_graph_literal(&text)?.graph)
}

fn read_pair(path: &Path) -> Result<ExtensionPair> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_pair_literal(&text)?)
}

fn parse_tuple(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().with_context(|| format!("bad vertex {t:?}")))
        .collect()
}

/// `%.12g`-style formatting.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mant));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn eval_cmd(term: &str, graph: &Path, assign: &str) -> Result<()> {
    let reg = Registry::builtin();
    let t = read_term(term, &reg)?;
    let g = read_graph(graph)?;
    let mut values = Vec::new();
    for part in assign.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, v) = part.split_once('=').with_context(|| format!("assignment {part:?} is not name=vertex"))?;
        values.push((name.trim().to_string(), v.trim().parse::<usize>()?));
    }
    let named: Vec<(&str, usize)> = values.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let env = Environment::named(&g, &t, &named)?;
    let ev = Evaluator::with_options(&t, EvalOptions { cache: true })?;
    println!("{}", sig12(ev.eval(&g, &env.assignment)?));
    Ok(())
}

fn lip_connective(args: &LipArgs, reg: &Registry) -> Result<(Arc<Connective>, Option<LipConfig>)> {
    if let Some(f) = fixtures().into_iter().find(|f| f.name == args.function) {
        return Ok((f.connective, Some(f.config)));
    }
    let text = args.function.trim();
    let (name, params) = match text.split_once('[') {
        Some((n, rest)) if rest.ends_with(']') => (n, Some(&rest[..rest.len() - 1])),
        _ => (text, None),
    };
    let is_name = name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if is_name && reg.contains(name) {
        let arity = match (args.arity, reg.get(name)) {
            (Some(a), _) => a,
            (None, Some(c)) => c.arity(),
            (None, None) => 1,
        };
        return Ok((reg.resolve(name, params, arity)?, None));
    }
    // A polynomial expression in x1..xm.
    let arity = args.arity.unwrap_or_else(|| max_variable(text).max(1));
    Ok((reg.resolve("poly", Some(text), arity)?, None))
}

fn max_variable(text: &str) -> usize {
    let b = text.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'x' {
            let j = (i + 1..b.len()).find(|&j| !b[j].is_ascii_digit()).unwrap_or(b.len());
            if let Ok(k) = text[i + 1..j].parse::<usize>() {
                best = best.max(k);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

fn lipcheck_cmd(args: &LipArgs) -> Result<()> {
    let reg = Registry::builtin();
    let (f, fixture_cfg) = lip_connective(args, &reg)?;
    let (lo, hi) = args.bounds.split_once(',').context("--box must be lo,hi")?;
    let metric = match args.metric.as_str() {
        "coordinatewise" => Metric::Coordinatewise,
        "euclidean" => Metric::Euclidean,
        m => bail!("unknown metric {m:?}"),
    };
    let mut cfg = LipConfig {
        lo: lo.trim().parse()?,
        hi: hi.trim().parse()?,
        samples: args.samples,
        seed: args.seed,
        c_bound: args.c_bound,
        metric,
    };
    // Fixtures keep their wider default box unless one is given.
    if let (Some(fc), true) = (fixture_cfg, args.bounds == "0.001,1000") {
        cfg.lo = fc.lo;
        cfg.hi = fc.hi;
    }
    let report = check_relative_lipschitz(&f, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> Result<Analysis> {
    let reg = Registry::builtin();
    let t = read_term(&args.term, &reg)?;
    let regime = match (&args.regime, args.dense_p, args.alpha) {
        (Some(r), None, None) => r.parse::<Regime>()?,
        (None, Some(p), None) => Regime::dense(p)?,
        (None, None, Some(a)) => Regime::sparse(a)?,
        _ => bail!("give exactly one of --regime, --dense-p, --alpha"),
    };
    let mean_mode = match args.mean_mode.as_str() {
        "desugar" => MeanMode::Desugar,
        "native" => MeanMode::Native,
        m => bail!("mean mode must be desugar or native, got {m:?}"),
    };
    Ok(match regime {
        Regime::Dense { p } => analyze_dense(&t, p, &reg)?,
        Regime::Sparse { alpha } => {
            let mut caps = ExtensionCaps::default();
            if let Some(m) = args.max_new_vertices {
                caps.max_new_vertices = m;
            }
            let cfg = SparseConfig {
                d: args.depth,
                w: args.width,
                caps,
                mean_mode,
                ..SparseConfig::new(alpha)
            };
            analyze_sparse(&t, &cfg, &reg)?
        }
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Eval { term, graph, assign } => eval_cmd(&term, &graph, &assign)?,
        Command::Sample { n, regime, seed, out } => {
            let g = sample(n, regime.parse()?, seed);
            let text = format!("# G({n}, {regime}) seed={seed}\n{}", to_literal(&g, None));
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Lipcheck(args) => lipcheck_cmd(&args)?,
        Command::Closure { graph, tuple, s, alpha } => {
            let g = read_graph(&graph)?;
            let u = parse_tuple(&tuple)?;
            let cl = closure(&g, &u, s, alpha)?;
            let sub = cl.graph(&g)?;
            let roots: Vec<usize> = (0..cl.roots).collect();
            let out = serde_json::json!({
                "vertices": cl.vertices,
                "roots": cl.roots,
                "added": cl.vertices[cl.roots..].to_vec(),
                "literal": to_literal(&sub, Some(&roots)),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Extcount { graph, tuple, pattern } => {
            let g = read_graph(&graph)?;
            let u = parse_tuple(&tuple)?;
            let pair = read_pair(&pattern)?;
            let out = serde_json::json!({
                "extensions": count_extensions(&g, &u, &pair)?,
                "embeddings": count_embeddings(&g, &u, &pair)?,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Chain { pair } => {
            let chain = strictly_balanced_chain(&read_pair(&pair)?)?;
            let densities: Vec<String> = chain.densities.iter().map(|d| d.to_string()).collect();
            let out = serde_json::json!({ "levels": chain.levels, "densities": densities });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Analyze(args) => {
            let a = analyze(&args)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&a)?);
            } else {
                match a.value.c() {
                    Some(c) => println!("c={} gamma={}", sig12(c), sig12(a.value.gamma().unwrap_or(0.0))),
                    None => println!("zero"),
                }
            }
        }
        Command::Experiment { config, out, csv, strict } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let file: ExperimentFile = toml::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
            let cfg = file.into_config(&Registry::builtin())?;
            let report = run_concentration_experiment(&cfg)?;
            match out {
                Some(p) => emit_report(&report, &p, ReportFormat::Json)?,
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            if let Some(p) = csv {
                emit_report(&report, &p, ReportFormat::Csv)?;
            }
            for v in &report.verdicts {
                eprintln!(
                    "{} {} observed={} {} {}",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.criterion,
                    v.observed,
                    v.comparison,
                    v.threshold
                );
            }
            if strict && !report.passed() {
                return Ok(1);
            }
        }
        Command::Report {
            command: ReportCommand::Plot { input, out },
        } => emit_plot(&load_report(&input)?, &out)?,
        Command::Registry {
            command: RegistryCommand::Catalog,
        } => println!("{}", serde_json::to_string_pretty(&Registry::builtin().catalog())?),
    }
    Ok(0)
}

fn main() {
    let code = match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

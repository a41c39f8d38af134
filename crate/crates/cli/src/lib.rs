//! `oss` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on solver or data errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use oss_core::bench::{compare_methods, generate_stream, generate_synthetic, greedy_k, write_comparison_csv, COMMON_METRIC};
use oss_core::instance::{build_q, group_batches, read_stream_csv, to_json_17g, write_stream_csv};
use oss_core::mcoss::solve_mcoss;
use oss_core::oracle::{
    brute_force_optimum, check_corollary1, check_theorem1, compute_corollary2_deltas, Formulation, OracleResult,
};
use oss_core::stream::{run_stream, PrecomputedScorer, ResidualScorer, Scorer, StreamOptions};
use oss_core::submodular::{check_submodularity, greedy_select};
use oss_core::thresh::solve_threshmcoss;
use oss_core::{Assignment, Method, Norm, OssError, SelectionConfig, SelectionInstance};

#[derive(Debug, Parser)]
#[command(name = "oss", version, about = "Multi-criteria online subset selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance (uniform dissimilarities and losses)
    Gen(GenArgs),
    /// Solve one instance with one method
    Solve(SolveArgs),
    /// Compare the three methods on seeded synthetic instances
    Compare(CompareArgs),
    /// Run the online selection loop over a batched stream
    Stream(StreamArgs),
    /// Run a numerical check on an instance
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Group norm: 1 or inf
    #[arg(long, default_value = "inf")]
    pub p: Norm,
    #[arg(long, default_value_t = 0.9)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.2)]
    pub frac: f64,
    /// Column-mass selection threshold (defaults to epsilon)
    #[arg(long)]
    pub threshold: Option<f64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> SelectionConfig {
        SelectionConfig {
            rho: self.rho,
            lambda: self.lambda,
            p: self.p,
            epsilon: self.epsilon,
            frac: self.frac,
            rounding_threshold: self.threshold.unwrap_or(self.epsilon),
            ..SelectionConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "threshmcoss")]
    pub method: Method,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Greedy seed (submcoss)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Greedy cardinality (submcoss); defaults to ceil(frac * m)
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Instance seeds: `a..b` (inclusive), `a,b,c` or a single value
    #[arg(long, default_value = "1..10", value_parser = parse_seeds)]
    pub seeds: Seeds,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    /// Greedy runs per instance
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerKind {
    Residual,
    Precomputed,
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    /// Stream CSV (`id,batch,loss,f0,...`); a synthetic stream is used when absent
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "threshmcoss")]
    pub method: Method,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Seed of the synthetic stream and of the greedy method
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub batches: usize,
    #[arg(long, default_value_t = 20)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = ScorerKind::Residual)]
    pub scorer: ScorerKind,
    /// History as JSON lines
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Final representative set as CSV
    #[arg(long)]
    pub reps_out: Option<PathBuf>,
    /// Record wall time per step (makes the history run-dependent)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Submodularity,
    Oracle,
    Theorem1,
    Corollary1,
    Corollary2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// Exhaustive integral optimum (small instances only)
    Oracle,
    /// LP solution of the baseline convex formulation
    Lp,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Formulation enumerated by `--check oracle`
    #[arg(long, default_value = "mcoss")]
    pub method: Method,
    /// Where the checked assignment comes from
    #[arg(long, value_enum, default_value_t = Source::Oracle)]
    pub source: Source,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds(pub Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad seed {t:?}"));
    let seeds = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty seed range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    Ok(Seeds(seeds))
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(command: Command) -> Result<(), OssError> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Compare(a) => compare(a),
        Command::Stream(a) => stream(a),
        Command::Verify(a) => verify(a),
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<(), OssError> {
    let mut out = sink(path)?;
    writeln!(out, "{}", to_json_17g(value)?)?;
    out.flush()?;
    Ok(())
}

/// `<path>.meta.json` next to a CSV or JSON-lines output.
fn write_sidecar(path: Option<&Path>, meta: &Value) -> Result<(), OssError> {
    if let Some(p) = path {
        let mut name = p.as_os_str().to_owned();
        name.push(".meta.json");
        write_json(Some(Path::new(&name)), meta)?;
    }
    Ok(())
}

fn read_instance(path: &Path) -> Result<SelectionInstance, OssError> {
    SelectionInstance::read_json(File::open(path)?)
}

fn gen(a: GenArgs) -> Result<(), OssError> {
    if a.m == 0 {
        return Err(OssError::Config("--m must be at least 1".into()));
    }
    let inst = generate_synthetic(a.m, a.r, a.seed);
    let meta = json!({"generator": "uniform", "m": a.m, "r": a.r, "seed": a.seed});
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "{}", inst.to_json_with_meta(Some(meta)))?;
    out.flush()?;
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), OssError> {
    let inst = read_instance(&a.instance)?;
    let config = a.config.resolve();
    config.validate()?;
    let value = match a.method {
        Method::Mcoss => {
            let (z, rep) = solve_mcoss(&inst, &config)?;
            let mut v = assignment_json(&z, &rep.selected_new, rep.objective_value, a.method, &config);
            v["column_mass"] = json!(rep.column_mass);
            v
        }
        Method::Threshmcoss => {
            let (sol, rep) = solve_threshmcoss(&inst, &config)?;
            let mut v = assignment_json(&sol.assignment, &rep.selected_new, rep.objective_value, a.method, &config);
            v["s_new"] = json!(sol.s_new);
            v["s_old"] = json!(sol.s_old);
            v["budget_usage"] = json!(sol.budget_usage);
            v["budget_limit"] = json!(sol.budget_limit);
            v["lp_objective"] = json!(sol.lp_objective);
            v
        }
        Method::Submcoss => {
            let k = a.k.unwrap_or_else(|| greedy_k(config.frac, inst.m()));
            let sol = greedy_select(&build_q(&inst, config.rho), k, a.seed)?;
            let mut v = serde_json::to_value(&sol)?;
            v["config"] = serde_json::to_value(config)?;
            v
        }
    };
    write_json(a.out.as_deref(), &value)
}

fn assignment_json(z: &Assignment, selected: &[usize], objective: f64, method: Method, config: &SelectionConfig) -> Value {
    json!({
        "method": method,
        "z_old": z.z_old,
        "z_new": z.z_new,
        "selected_new": selected,
        "objective": objective,
        "config": config,
    })
}

fn compare(a: CompareArgs) -> Result<(), OssError> {
    let config = a.config.resolve();
    config.validate()?;
    if a.runs == 0 || a.m == 0 {
        return Err(OssError::Config("--runs and --m must be at least 1".into()));
    }
    let instances: Vec<_> = a.seeds.0.iter().map(|&s| (s, generate_synthetic(a.m, a.r, s))).collect();
    let rows = compare_methods(&instances, &config, a.runs);
    let mut out = sink(a.out.as_deref())?;
    write_comparison_csv(&rows, &mut out)?;
    out.flush()?;
    let errors: Vec<_> = rows.iter().flat_map(|r| r.errors.iter().map(move |e| format!("instance {}: {e}", r.instance_id))).collect();
    for e in &errors {
        eprintln!("warning: {e}");
    }
    let meta = json!({
        "command": "compare",
        "config": config,
        "seeds": a.seeds.0,
        "m": a.m,
        "r": a.r,
        "runs": a.runs,
        "k": greedy_k(config.frac, a.m),
        "common_metric": COMMON_METRIC,
        "errors": errors,
    });
    write_sidecar(a.out.as_deref(), &meta)
}

fn stream(a: StreamArgs) -> Result<(), OssError> {
    let config = a.config.resolve();
    config.validate()?;
    let frames = match &a.input {
        Some(p) => read_stream_csv(File::open(p)?)?,
        None => {
            if a.batches == 0 || a.batch_size == 0 || a.dim == 0 {
                return Err(OssError::Config("--batches, --batch-size and --dim must be at least 1".into()));
            }
            generate_stream(a.batches, a.batch_size, a.dim, a.seed)
        }
    };
    let batches = group_batches(frames);
    let scorer: &dyn Scorer = match a.scorer {
        ScorerKind::Residual => &ResidualScorer,
        ScorerKind::Precomputed => &PrecomputedScorer,
    };
    let options = StreamOptions { method: a.method, seed: a.seed, timing: a.timing };
    let state = run_stream(&batches, scorer, &config, options)?;

    let mut out = sink(a.out.as_deref())?;
    state.write_history(&mut out)?;
    out.flush()?;
    if let Some(p) = &a.reps_out {
        write_stream_csv(&state.representatives, BufWriter::new(File::create(p)?))?;
    }
    if a.out.is_some() {
        let header: Vec<String> = state.history.iter().map(|h| format!("t = {}", h.t)).collect();
        let values: Vec<String> = state.history.iter().map(|h| format!("{:.6}", h.objective)).collect();
        println!("{}", header.join("\t"));
        println!("{}", values.join("\t"));
    }
    let meta = json!({
        "command": "stream",
        "config": config,
        "method": a.method,
        "seed": a.seed,
        "input": a.input.as_ref().map(|p| p.display().to_string()),
        "batches": batches.len(),
        "batch_size": a.batch_size,
        "dim": a.dim,
        "scorer": format!("{:?}", a.scorer).to_lowercase(),
    });
    write_sidecar(a.out.as_deref(), &meta)
}

fn checked_assignment(inst: &SelectionInstance, config: &SelectionConfig, source: Source) -> Result<Assignment, OssError> {
    Ok(match source {
        Source::Oracle => brute_force_optimum(inst, config, Formulation::Mcoss)?.best_assignment,
        Source::Lp => solve_mcoss(inst, config)?.0,
    })
}

fn oracle_json(res: &OracleResult) -> Value {
    json!({
        "formulation": res.formulation,
        "best_objective": res.best_objective,
        "best_choice": res.best_choice,
        "selected_new": res.selected_new(),
        "enumerated_count": res.enumerated_count.to_string(),
        "feasible_count": res.feasible_count.to_string(),
    })
}

fn verify(a: VerifyArgs) -> Result<(), OssError> {
    let inst = read_instance(&a.instance)?;
    let config = a.config.resolve();
    config.validate()?;
    let mut value = match a.check {
        Check::Submodularity => {
            let q = build_q(&inst, config.rho);
            let rep = check_submodularity(&q, a.trials, a.seed)?;
            println!("violations: {}", rep.violations);
            println!("monotonicity violations: {}", rep.monotonicity_violations);
            json!({"check": "submodularity", "seed": a.seed, "report": rep})
        }
        Check::Oracle => {
            let formulation = match a.method {
                Method::Mcoss => Formulation::Mcoss,
                Method::Threshmcoss => Formulation::Threshmcoss,
                Method::Submcoss => return Err(OssError::Config("the oracle enumerates mcoss or threshmcoss".into())),
            };
            let res = brute_force_optimum(&inst, &config, formulation)?;
            println!("best objective: {}", res.best_objective);
            json!({"check": "oracle", "result": oracle_json(&res)})
        }
        Check::Theorem1 => {
            let z = checked_assignment(&inst, &config, a.source)?;
            let report = check_theorem1(&z, &inst, &config)?;
            for c in &report {
                println!("j={} cond1={:?} cond2={:?} cond2_minus_lambda={:?}", c.j, c.cond1, c.cond2, c.cond2_minus_lambda);
            }
            json!({"check": "theorem1", "columns": report})
        }
        Check::Corollary1 => {
            let z = checked_assignment(&inst, &config, a.source)?;
            let report = check_corollary1(&z, &inst, &config)?;
            println!("selected: {} count claim: {:?}", report.selected_count, report.count_claim);
            json!({"check": "corollary1", "report": report})
        }
        Check::Corollary2 => {
            let z = checked_assignment(&inst, &config, a.source)?;
            let m = inst.m();
            let mut pairs = Vec::new();
            for j in 0..m {
                for i in 0..m {
                    let d = compute_corollary2_deltas(&z, &inst, &config, i, j)?;
                    pairs.push(json!({"i": d.i, "j": d.j, "delta_d": d.delta_d, "delta_l": d.delta_l, "predicate": d.predicate()}));
                }
            }
            let flagged = pairs.iter().filter(|p| p["predicate"] == true).count();
            println!("pairs: {} flagged: {flagged}", pairs.len());
            json!({"check": "corollary2", "pairs": pairs})
        }
    };
    value["config"] = serde_json::to_value(config)?;
    if a.out.is_some() {
        write_json(a.out.as_deref(), &value)?;
    }
    Ok(())
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gradual::adversary::{run_adversary, subject_by_name, AdversaryError, AdversaryMode};
use gradual::bench::{median_time, Model, ShapeFit};
use gradual::gen::{self, StreamSpec, Weights};
use gradual::io::{emit_graph, emit_pairs, emit_updates, parse_graph, parse_pairs, parse_updates, ParseError};
use gradual::manifest::RunManifest;
use gradual::mcm::{plan_mcm, McmError};
use gradual::msf::{plan_msf_with, IndexKind, MsfError};
use gradual::mwm::{plan_mwm_any, MwmError};
use gradual::oracle::{
    exhaustive_transform_search, max_matching_exact, max_weight_matching_exact, msf_exact, Quality, SearchGranularity,
    SearchSpec,
};
use gradual::script::{check_guarantee, replay, ReplayError};
use gradual::wrapper::sim::{simulate, OptCheck, SimError};
use gradual::wrapper::{
    wrap, BatchRecompute, DynamicMatcher, GreedyMaximal, InnerAlgorithm, Mode, WrapperConfig, WrapperError,
};
use gradual::{Edge, Granularity, Graph, Matching, Problem, Script, SolutionStats, SpanningForest, Tolerance};

#[derive(Parser)]
#[command(name = "gradual", version, about = "Plan, replay and stress gradual solution transformations")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for weight comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Where to write the run manifest.
    #[arg(long, global = true)]
    manifest_out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a phase script from one solution to another.
    Transform(TransformArgs),
    /// Replay a script and check its guarantee.
    Replay(ReplayArgs),
    /// Run a dynamic matcher over an update stream.
    Simulate(SimulateArgs),
    /// Run a path-growing adversary against a subject algorithm.
    Adversary(AdversaryArgs),
    /// Exact reference answers for small inputs.
    Oracle(OracleArgs),
    /// Time a planner across instance sizes and fit a growth model.
    Bench(BenchArgs),
    /// Write a random graph, solution or update stream.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Mcm,
    Mwm,
    Msf,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Mcm => Problem::Mcm,
            ProblemArg::Mwm => Problem::Mwm,
            ProblemArg::Msf => Problem::Msf,
        }
    }
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    from: PathBuf,
    #[arg(long)]
    to: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Required for mwm.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value = "linkcut")]
    index: IndexKind,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    from: PathBuf,
    #[arg(long)]
    to: PathBuf,
    #[arg(long)]
    script: PathBuf,
    /// Record a row after every op, not only at phase ends.
    #[arg(long)]
    per_op: bool,
    /// CSV report destination.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InnerArg {
    Greedy,
    Batch,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    inner: InnerArg,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    psi: Option<f64>,
    /// Accuracy parameter of the batch inner algorithm.
    #[arg(long, default_value_t = 0.5)]
    eps_in: f64,
    /// Run the inner algorithm without the wrapper.
    #[arg(long)]
    unwrapped: bool,
    #[arg(long)]
    updates: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// Compare against the exact optimum at every step (small graphs only).
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long, default_value = "incr")]
    mode: AdversaryMode,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    n: usize,
    /// exact, greedy, zero, batch, wrapped:greedy, wrapped:batch or wrapped:exact.
    #[arg(long, default_value = "exact")]
    subject: String,
    /// Rounds of the fully dynamic mode.
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleTask {
    Mcm,
    Mwm,
    Msf,
    Search,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    task: OracleTask,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    from: Option<PathBuf>,
    #[arg(long)]
    to: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    delta: usize,
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long)]
    strict: bool,
    /// Check every single toggle instead of phase ends only.
    #[arg(long)]
    every_op: bool,
    /// Measure weight rather than size.
    #[arg(long)]
    weight: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    task: ProblemArg,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1000usize, 10_000, 100_000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Graph,
    Matching,
    Forest,
    Stream,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Edge count for graphs, hovering edge count for streams.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    w_lo: f64,
    #[arg(long, default_value_t = 1.0)]
    w_hi: f64,
    /// Source graph for matchings and forests.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 0.0)]
    vertex_rate: f64,
    #[arg(long)]
    out: PathBuf,
}

struct CliError {
    code: u8,
    msg: String,
}

fn usage(msg: impl ToString) -> CliError {
    CliError { code: 1, msg: msg.to_string() }
}
fn data(msg: impl ToString) -> CliError {
    CliError { code: 2, msg: msg.to_string() }
}
fn contract(msg: impl ToString) -> CliError {
    CliError { code: 3, msg: msg.to_string() }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        data(e)
    }
}
impl From<McmError> for CliError {
    fn from(e: McmError) -> Self {
        data(e)
    }
}
impl From<MsfError> for CliError {
    fn from(e: MsfError) -> Self {
        match e {
            MsfError::InvalidSource(_) | MsfError::InvalidTarget(_) | MsfError::Mismatch(_) => data(e),
            MsfError::NotCrossEdge(_) => contract(e),
        }
    }
}
impl From<MwmError> for CliError {
    fn from(e: MwmError) -> Self {
        match e {
            MwmError::Epsilon(_) => usage(e),
            MwmError::BadRange { .. } => contract(e),
            _ => data(e),
        }
    }
}
impl From<WrapperError> for CliError {
    fn from(e: WrapperError) -> Self {
        match e {
            WrapperError::Contract(_) => contract(e),
            _ => usage(e),
        }
    }
}
impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Update { .. } => data(e),
            _ => contract(e),
        }
    }
}
impl From<AdversaryError> for CliError {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Sim(s) => s.into(),
            AdversaryError::Wrapper(w) => w.into(),
            _ => usage(e),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if !(cli.tolerance >= 0.0 && cli.tolerance.is_finite()) {
        return Err(usage("tolerance must be a finite non-negative number"));
    }
    let tol = Tolerance(cli.tolerance);
    let base = |cmd: &str| RunManifest::new(cmd).param("seed", cli.seed).param("tolerance", cli.tolerance);
    let manifest = match cli.cmd {
        Command::Transform(a) => transform(a, base("transform"), tol)?,
        Command::Replay(a) => replay_cmd(a, base("replay"), tol)?,
        Command::Simulate(a) => simulate_cmd(a, base("simulate"), cli.seed)?,
        Command::Adversary(a) => adversary_cmd(a, base("adversary"), cli.seed)?,
        Command::Oracle(a) => oracle_cmd(a, base("oracle"))?,
        Command::Bench(a) => bench_cmd(a, base("bench"), cli.seed)?,
        Command::Generate(a) => generate_cmd(a, base("generate"), cli.seed)?,
    };
    if let Some(p) = &cli.manifest_out {
        write(p, &manifest.to_json())?;
    }
    Ok(())
}

struct Inputs {
    g: Graph,
    from: Vec<(u32, u32)>,
    to: Vec<(u32, u32)>,
}

fn load(graph: &Path, from: &Path, to: &Path, m: RunManifest) -> Result<(Inputs, RunManifest), CliError> {
    let (gt, ft, tt) = (read(graph)?, read(from)?, read(to)?);
    let inputs = Inputs { g: parse_graph(&gt)?, from: parse_pairs(&ft)?, to: parse_pairs(&tt)? };
    Ok((inputs, m.input("graph", &gt).input("from", &ft).input("to", &tt)))
}

fn edges_of(g: &Graph, pairs: &[(u32, u32)], what: &str) -> Result<Vec<Edge>, CliError> {
    pairs
        .iter()
        .map(|&(u, v)| g.edge_between(u, v).copied().ok_or_else(|| data(format!("{what}: ({u},{v}) is not an edge"))))
        .collect()
}

fn transform(a: TransformArgs, m: RunManifest, tol: Tolerance) -> Result<RunManifest, CliError> {
    let problem: Problem = a.problem.into();
    if let Some(e) = a.epsilon {
        if !(e > 0.0 && e <= 0.5) {
            return Err(usage(format!("epsilon {e} outside (0, 0.5]")));
        }
    }
    let (inp, m) = load(&a.graph, &a.from, &a.to, m)?;
    let m =
        m.param("problem", problem.to_string()).param("epsilon", a.epsilon).param("index", format!("{:?}", a.index));
    let g = &inp.g;
    let start = Instant::now();
    let (mut script, source): (Script, Vec<Edge>) = match problem {
        Problem::Mcm => {
            let s = Matching::from_pairs(g, &inp.from).map_err(data)?;
            let t = Matching::from_pairs(g, &inp.to).map_err(data)?;
            (plan_mcm(g, &s, &t)?, s.iter().copied().collect())
        }
        Problem::Mwm => {
            let eps = a.epsilon.ok_or_else(|| usage("mwm needs --epsilon"))?;
            let s = Matching::from_pairs(g, &inp.from).map_err(data)?;
            let t = Matching::from_pairs(g, &inp.to).map_err(data)?;
            (plan_mwm_any(g, &s, &t, eps)?, s.iter().copied().collect())
        }
        Problem::Msf => {
            let s = SpanningForest::from_pairs(g, &inp.from).map_err(data)?;
            let t = SpanningForest::from_pairs(g, &inp.to).map_err(data)?;
            (plan_msf_with(g, &s, &t, a.index)?, s.iter().copied().collect())
        }
    };
    let elapsed = start.elapsed();
    script.manifest = Some(m.digest());
    write(&a.out, &script.to_json())?;
    let rep = replay(g, &source, &script, Granularity::PerPhase, tol).map_err(contract)?;
    let worst = &rep.snapshots[rep.worst];
    let floor = match problem {
        Problem::Mcm => worst.size.to_string(),
        _ => format!("{}", worst.weight),
    };
    println!(
        "phases={}, ops={}, budget={}, floor={}, max_phase={}, planner_ms={:.3}",
        script.phases.len(),
        script.op_count(),
        script.budget,
        floor,
        script.max_phase_len(),
        elapsed.as_secs_f64() * 1e3
    );
    Ok(m)
}

fn replay_cmd(a: ReplayArgs, m: RunManifest, tol: Tolerance) -> Result<RunManifest, CliError> {
    let (inp, m) = load(&a.graph, &a.from, &a.to, m)?;
    let st = read(&a.script)?;
    let m = m.input("script", &st).param("per_op", a.per_op);
    let script = Script::from_json(&st).map_err(|e| data(format!("{}: {e}", a.script.display())))?;
    let g = &inp.g;
    let source = edges_of(g, &inp.from, "from")?;
    let target = edges_of(g, &inp.to, "to")?;
    let gran = if a.per_op { Granularity::PerOp } else { Granularity::PerPhase };
    let rep = replay(g, &source, &script, gran, tol).map_err(|e| match e {
        ReplayError::InvalidSource(_) => data(&e),
        ReplayError::Op { .. } => contract(&e),
    })?;
    if let Some(p) = &a.report {
        rep.write_csv(create(p)?).map_err(data)?;
    }
    let s = SolutionStats::of(source.iter().copied());
    let t = SolutionStats::of(target.iter().copied());
    let verdict = check_guarantee(&rep, &s, &t, script.problem, script.epsilon, tol).map_err(usage)?;
    let reached = match script.problem {
        Problem::Msf => rep.final_equals(&target),
        _ => rep.final_covers(&target),
    };
    let phases = rep.phase_sizes.len();
    match verdict {
        gradual::Verdict::Fail { boundary_index, reason } => {
            println!("FAIL at boundary {boundary_index}: {reason}");
            Err(contract(format!("guarantee violated at boundary {boundary_index}")))
        }
        gradual::Verdict::Pass if !reached => {
            println!("FAIL at boundary {}: final state does not reach the target", rep.snapshots.len() - 1);
            Err(contract("final state does not reach the target"))
        }
        gradual::Verdict::Pass => {
            println!("PASS phases={phases} rows={}", rep.snapshots.len());
            Ok(m)
        }
    }
}

fn simulate_cmd(a: SimulateArgs, m: RunManifest, seed: u64) -> Result<RunManifest, CliError> {
    let text = read(&a.updates)?;
    let updates = parse_updates(&text)?;
    let m = m
        .input("updates", &text)
        .param("inner", a.inner.to_possible_value().map(|v| v.get_name().to_string()))
        .param("epsilon", a.epsilon)
        .param("eps_in", a.eps_in)
        .param("weighted", a.weighted)
        .param("psi", a.psi)
        .param("unwrapped", a.unwrapped)
        .param("oracle_check", a.oracle_check);
    let mode = if a.weighted {
        Mode::Weighted { psi: a.psi.ok_or_else(|| usage("--weighted needs --psi"))? }
    } else {
        Mode::Unweighted
    };
    let psi = a.psi.unwrap_or(1.0);
    if !(a.eps_in > 0.0 && a.eps_in <= 1.0) {
        return Err(usage("eps-in must be in (0, 1]"));
    }
    let inner: Box<dyn InnerAlgorithm> = match (a.inner, a.weighted) {
        (InnerArg::Greedy, false) => Box::new(GreedyMaximal::new()),
        (InnerArg::Greedy, true) => Box::new(GreedyMaximal::weighted(psi)),
        (InnerArg::Batch, false) => Box::new(BatchRecompute::new(a.eps_in, seed)),
        (InnerArg::Batch, true) => Box::new(BatchRecompute::weighted(a.eps_in, seed)),
    };
    let cfg = WrapperConfig::new(a.epsilon, mode);
    let mut alg: Box<dyn DynamicMatcher> = if a.unwrapped { inner } else { Box::new(wrap(inner, cfg)?) };
    let opt = match (a.oracle_check, a.weighted) {
        (false, _) => OptCheck::Off,
        (true, false) => OptCheck::Size,
        (true, true) => OptCheck::Weight,
    };
    let mut g = Graph::new();
    let rep = simulate(&mut g, alg.as_mut(), &updates, opt)?;
    rep.write_csv(create(&a.trace)?).map_err(data)?;
    let budget = cfg.recourse_budget();
    print!(
        "steps={} max_recourse={} mean_recourse={:.4} budget={} declared_approx={:.4}",
        rep.rows.len(),
        rep.max_recourse(),
        rep.mean_recourse(),
        budget,
        alg.declared_approx()
    );
    if let Some(r) = rep.worst_ratio(a.weighted) {
        print!(" worst_ratio={r:.4}");
    }
    println!();
    if !a.unwrapped && rep.max_recourse() > budget {
        return Err(contract(format!("recourse {} exceeds budget {budget}", rep.max_recourse())));
    }
    Ok(m)
}

fn adversary_cmd(a: AdversaryArgs, m: RunManifest, seed: u64) -> Result<RunManifest, CliError> {
    let m = m
        .param("mode", format!("{:?}", a.mode))
        .param("epsilon", a.epsilon)
        .param("n", a.n)
        .param("subject", a.subject.clone())
        .param("rounds", a.rounds);
    let mut alg = subject_by_name(&a.subject, a.epsilon, seed)?;
    let (rows, run) = run_adversary(a.mode, alg.as_mut(), a.epsilon, a.n, a.rounds)?;
    if let Some(p) = &a.trace {
        let rep = gradual::wrapper::sim::SimReport { rows };
        rep.write_csv(create(p)?).map_err(data)?;
    }
    println!("{run}");
    for w in &run.witnesses {
        println!(
            "witness copy={} path_edges={} matched={} maximum={}",
            w.copy, w.path_edges, w.restricted_size, w.maximum
        );
    }
    Ok(m)
}

fn oracle_cmd(a: OracleArgs, m: RunManifest) -> Result<RunManifest, CliError> {
    let gt = read(&a.graph)?;
    let g = parse_graph(&gt)?;
    let m = m.input("graph", &gt);
    let pairs = match a.task {
        OracleTask::Mcm => {
            let x = max_matching_exact(&g).map_err(usage)?;
            println!("size={}", x.len());
            x.sorted_pairs()
        }
        OracleTask::Mwm => {
            let x = max_weight_matching_exact(&g).map_err(usage)?;
            println!("size={} weight={}", x.len(), x.weight());
            x.sorted_pairs()
        }
        OracleTask::Msf => {
            let f = msf_exact(&g);
            println!("edges={} weight={}", f.len(), f.weight());
            f.sorted_pairs()
        }
        OracleTask::Search => {
            let (from, to) = match (&a.from, &a.to) {
                (Some(f), Some(t)) => (f, t),
                _ => return Err(usage("search needs --from and --to")),
            };
            let s = Matching::from_pairs(&g, &parse_pairs(&read(from)?)?).map_err(data)?;
            let t = Matching::from_pairs(&g, &parse_pairs(&read(to)?)?).map_err(data)?;
            let quality = if a.weight { Quality::Weight } else { Quality::Size };
            let floor = a.floor.unwrap_or(if a.weight { s.weight() } else { s.len() as f64 });
            let spec = SearchSpec {
                delta: a.delta,
                floor,
                strict: a.strict,
                granularity: if a.every_op { SearchGranularity::EveryOp } else { SearchGranularity::PhaseEnd },
                quality,
            };
            let out = exhaustive_transform_search(&g, &s, &t, spec).map_err(usage)?;
            println!("{}", serde_json::to_string(&out).expect("outcome serializes"));
            return Ok(m.param("task", "search").param("floor", floor).param("delta", a.delta));
        }
    };
    if let Some(p) = &a.out {
        write(p, &emit_pairs(&pairs))?;
    } else {
        print!("{}", emit_pairs(&pairs));
    }
    Ok(m)
}

fn bench_cmd(a: BenchArgs, m: RunManifest, seed: u64) -> Result<RunManifest, CliError> {
    let problem: Problem = a.task.into();
    let m = m.param("task", problem.to_string()).param("sizes", a.sizes.clone()).param("reps", a.reps);
    let mut points = Vec::new();
    for &n in &a.sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        let t = match problem {
            Problem::Mcm => {
                let (g, s, t) = gen::path_heavy(&mut rng, n, 12, Weights::UNIT);
                median_time(a.reps, || {
                    plan_mcm(&g, &s, &t).unwrap();
                })
            }
            Problem::Mwm => {
                let (g, s, t) = gen::path_heavy(&mut rng, n, 12, Weights::integer(1, 100));
                median_time(a.reps, || {
                    plan_mwm_any(&g, &s, &t, a.epsilon).unwrap();
                })
            }
            Problem::Msf => {
                let g = gen::connected_graph(&mut rng, n, n, Weights::integer(1, 1000));
                let f = msf_exact(&g);
                let r = gen::random_spanning_forest(&mut rng, &g);
                median_time(a.reps, || {
                    plan_msf_with(&g, &f, &r, IndexKind::LinkCut).unwrap();
                })
            }
        };
        println!("n={n} seconds={:.6}", t.as_secs_f64());
        points.push((n, t));
    }
    let model = if problem == Problem::Msf { Model::NLogN } else { Model::Linear };
    let fit = ShapeFit::new(model, &points);
    println!("{}", serde_json::to_string(&fit).expect("fit serializes"));
    Ok(m)
}

fn generate_cmd(a: GenerateArgs, m: RunManifest, seed: u64) -> Result<RunManifest, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !(a.w_lo > 0.0 && a.w_lo <= a.w_hi && a.w_hi.is_finite()) {
        return Err(usage("weights need 0 < w-lo <= w-hi"));
    }
    let weights = Weights::real(a.w_lo, a.w_hi);
    let load_graph = |p: &Option<PathBuf>| -> Result<Graph, CliError> {
        Ok(parse_graph(&read(p.as_ref().ok_or_else(|| usage("this kind needs --graph"))?)?)?)
    };
    let text = match a.kind {
        GenKind::Graph => emit_graph(&gen::random_graph(&mut rng, a.n, a.m, weights)),
        GenKind::Matching => {
            let g = load_graph(&a.graph)?;
            emit_pairs(&gen::random_matching(&mut rng, &g, 1.0).sorted_pairs())
        }
        GenKind::Forest => {
            let g = load_graph(&a.graph)?;
            emit_pairs(&gen::random_spanning_forest(&mut rng, &g).sorted_pairs())
        }
        GenKind::Stream => {
            let spec = StreamSpec { n: a.n, steps: a.steps, target_edges: a.m, weights, vertex_rate: a.vertex_rate };
            emit_updates(&gen::update_stream(&mut rng, spec))
        }
    };
    write(&a.out, &text)?;
    Ok(m.param("n", a.n).param("m", a.m).param("steps", a.steps))
}

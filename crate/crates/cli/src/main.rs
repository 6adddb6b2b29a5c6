//! `mm`: batch front end. Every command writes one JSON report.

mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mm_core::asymptotics::{quantile_norm, regularity_set, RegularityReport, SamplingStatistic};
use mm_core::estimation::{estimate_theta, fit_communities, MomentFitReport};
use mm_core::genmodel::{parse_mer_params, sample_exchangeable, sample_msbm, sample_mer};
use mm_core::hyptests::{independence_test, similarity_test, TestResult};
use mm_core::graphon::GraphonFile;
use mm_core::motifs::{count_cross_layer, empirical_density, CountVector};
use mm_core::multibern::{moments_to_probs, MomentVector};
use mm_core::{io, oracle, BlockGraphonVector, CommunityAssignment, LayerSubset, Motif, MultiplexNetwork};
use serde::Serialize;

#[derive(Parser, Serialize)]
#[command(name = "mm", version, about = "Inference for dense multiplex networks")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MM_THREADS")]
    #[serde(skip)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    #[serde(flatten)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Sample a network and write it as TSV.
    Generate(GenerateArgs),
    /// Cross-layer motif counts.
    Count(CountArgs),
    /// Fit communities and the block graphons.
    Estimate(EstimateArgs),
    /// Variance estimates and the rejected subsets.
    Regularity(MotifArgs),
    /// Quantiles of the multiplier sampling statistic.
    Quantiles(QuantileArgs),
    /// Test whether two layers share the motif density.
    TestSimilarity(SimilarityArgs),
    /// Test edge-wise independence of two layer subsets.
    TestIndependence(IndependenceArgs),
    /// Cross-check fast paths against the brute-force oracles.
    Verify(VerifyArgs),
}

#[derive(Args, Serialize)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Layer count; read from the θ file when omitted.
    #[arg(long)]
    d: Option<usize>,
    /// Multiplex Erdős–Rényi moments, e.g. `1=0.3,2=0.4,12=0.12`.
    #[arg(long, conflicts_with = "theta", required_unless_present = "theta")]
    p: Option<String>,
    /// Block graphon JSON file.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// With `--theta`: draw uniform latents instead of balanced blocks.
    #[arg(long, requires = "theta")]
    exchangeable: bool,
    #[arg(long)]
    seed: u64,
    /// Network destination; defaults to stdout, with the report on stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct MotifArgs {
    /// Network TSV file.
    input: PathBuf,
    /// Builtin motif name or edge-list file.
    #[arg(long, default_value = "triangle")]
    motif: String,
}

#[derive(Args, Serialize)]
struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: MotifArgs,
    /// Layer subsets such as `12`; default all.
    #[arg(long = "subset")]
    subsets: Vec<String>,
}

#[derive(Args, Serialize)]
struct LabelArgs {
    #[arg(long = "K")]
    k: usize,
    /// One 1-based block label per line; fitted when omitted.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Fit with equal block sizes.
    #[arg(long)]
    balanced: bool,
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: MotifArgs,
    #[command(flatten)]
    #[serde(flatten)]
    labels: LabelArgs,
    /// Required when labels are fitted.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    theta_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct Sampling {
    #[arg(long, value_parser = parse_alpha, default_value = "0.05")]
    alpha: f64,
    #[arg(long = "B", value_parser = clap::value_parser!(u32).range(100..), default_value = "1000")]
    #[serde(rename = "B")]
    b: u32,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct QuantileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: MotifArgs,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: Sampling,
}

#[derive(Args, Serialize)]
struct SimilarityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: MotifArgs,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: Sampling,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values = ["1", "2"])]
    layers: Vec<usize>,
}

#[derive(Args, Serialize)]
struct IndependenceArgs {
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    labels: LabelArgs,
    #[arg(long, default_value = "triangle")]
    motif_diag: String,
    #[arg(long, default_value = "cycle4")]
    motif_offdiag: String,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: Sampling,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values = ["1", "2"])]
    subsets: Vec<String>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    base: MotifArgs,
    /// Cross-check counts on the first `max-n` vertices.
    #[arg(long, default_value_t = oracle::MAX_N)]
    max_n: usize,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0,1), got {a}"))
    }
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Infeasible(String),
    Parse(String),
    Abort(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Verify(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Abort(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Io(_) => "io",
            Failure::Infeasible(_) => "infeasible",
            Failure::Parse(_) => "parse",
            Failure::Abort(_) => "abort",
            Failure::Verify(_) => "verify",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Infeasible(m) | Failure::Parse(m) | Failure::Abort(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<mm_core::Error> for Failure {
    fn from(e: mm_core::Error) -> Self {
        use mm_core::Error as E;
        let m = e.to_string();
        match e {
            E::Infeasible(_) => Failure::Infeasible(m),
            E::NonConvergence(_) | E::DegeneratePool(_) => Failure::Abort(m),
            E::Io(_) | E::SizeLimit(_) => Failure::Io(m),
            E::InvalidSubset(_)
            | E::UnknownMotif(_)
            | E::InvalidMotif(_)
            | E::InvalidArgument(_)
            | E::InsufficientReplicates(_)
            | E::Parse(_) => Failure::Parse(m),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// Reads input files and records their hashes.
#[derive(Default)]
struct Inputs {
    hashes: BTreeMap<String, String>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Outcome<String> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.hashes.insert(path.display().to_string(), report::sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn network(&mut self, path: &Path) -> Outcome<MultiplexNetwork> {
        Ok(io::read_network(&self.read(path)?)?)
    }

    fn motif(&mut self, spec: &str) -> Outcome<Motif> {
        match mm_core::builtin_motif(spec) {
            Ok(f) => Ok(f),
            Err(_) if Path::new(spec).is_file() => Ok(io::read_motif(&self.read(Path::new(spec))?)?),
            Err(e) => Err(e.into()),
        }
    }

    fn theta(&mut self, path: &Path, d: Option<usize>) -> Outcome<BlockGraphonVector> {
        let file: GraphonFile =
            serde_json::from_str(&self.read(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
        Ok(BlockGraphonVector::from_file(file, d)?)
    }
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn labels_for(inputs: &mut Inputs, net: &MultiplexNetwork, a: &LabelArgs, seed: Option<u64>) -> Outcome<CommunityAssignment> {
    let z = match &a.labels {
        Some(p) => {
            let z = io::read_labels(&inputs.read(p)?)?;
            if z.n() != net.n() || z.k() != a.k {
                return Err(Failure::Parse(format!("labels give n = {}, K = {}; expected n = {}, K = {}", z.n(), z.k(), net.n(), a.k)));
            }
            z
        }
        None => {
            let seed = seed.ok_or_else(|| Failure::Parse("--seed is required when labels are fitted".into()))?;
            fit_communities(net, a.k, a.balanced, seed)?
        }
    };
    if let Some(p) = &a.labels_out {
        write_file(p, &io::write_labels(&z))?;
    }
    Ok(z)
}

fn subset_list(labels: &[String], d: usize) -> Outcome<Vec<LayerSubset>> {
    if labels.is_empty() {
        return Ok(LayerSubset::all(d));
    }
    labels.iter().map(|s| Ok(LayerSubset::parse(s, d)?)).collect()
}

#[derive(Serialize)]
#[serde(untagged)]
enum Output {
    Generate(GenerateResult),
    Count(CountVector),
    Estimate { labels: Vec<usize>, fit: MomentFitReport },
    Regularity(RegularityReport),
    Quantiles(QuantileResult),
    Test(TestResult),
    Verify(VerifyResult),
}

#[derive(Serialize)]
struct GenerateResult {
    n: usize,
    d: usize,
    pairs: usize,
    network_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
}

fn generate(a: &GenerateArgs, inputs: &mut Inputs) -> Outcome<(GenerateResult, Option<String>)> {
    let (net, z) = match (&a.p, &a.theta) {
        (Some(p), _) => {
            let d = a.d.ok_or_else(|| Failure::Parse("--d is required with --p".into()))?;
            (sample_mer(a.n, d, &parse_mer_params(p, d)?, a.seed)?, None)
        }
        (None, Some(path)) => {
            let w = inputs.theta(path, a.d)?;
            if a.exchangeable {
                let (net, _, z) = sample_exchangeable(a.n, &w, a.seed)?;
                (net, Some(z))
            } else {
                let (net, z) = sample_msbm(a.n, &w, None, a.seed)?;
                (net, Some(z))
            }
        }
        (None, None) => unreachable!("clap requires --p or --theta"),
    };
    let text = io::write_network(&net);
    if let (Some(p), Some(z)) = (&a.labels_out, &z) {
        write_file(p, &io::write_labels(z))?;
    }
    let result = GenerateResult {
        n: net.n(),
        d: net.d(),
        pairs: net.pairs().len(),
        network_sha256: report::sha256_hex(text.as_bytes()),
        labels: z.map(|z| z.to_labels()),
    };
    match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            Ok((result, None))
        }
        None => Ok((result, Some(text))),
    }
}

fn count(a: &CountArgs, inputs: &mut Inputs) -> Outcome<CountVector> {
    let net = inputs.network(&a.base.input)?;
    let f = inputs.motif(&a.base.motif)?;
    let mut counts = BTreeMap::new();
    for u in subset_list(&a.subsets, net.d())? {
        counts.insert(u, count_cross_layer(&net, u, &f)?);
    }
    Ok(CountVector { motif: f, counts })
}

fn estimate(a: &EstimateArgs, inputs: &mut Inputs) -> Outcome<Output> {
    let net = inputs.network(&a.base.input)?;
    let f = inputs.motif(&a.base.motif)?;
    let z = labels_for(inputs, &net, &a.labels, a.seed)?;
    let fit = estimate_theta(&net, &z, &f, &LayerSubset::all(net.d()))?;
    if let Some(p) = &a.theta_out {
        write_file(p, &report::to_json(&fit.theta_hat.to_file()))?;
    }
    Ok(Output::Estimate { labels: z.to_labels(), fit })
}

fn regularity(a: &MotifArgs, inputs: &mut Inputs) -> Outcome<Output> {
    let net = inputs.network(&a.input)?;
    let f = inputs.motif(&a.motif)?;
    Ok(Output::Regularity(regularity_set(&net, &f)))
}

#[derive(Serialize)]
struct QuantileResult {
    regularity: RegularityReport,
    alpha: f64,
    #[serde(rename = "B")]
    b: u32,
    seed: u64,
    subsets: BTreeMap<LayerSubset, f64>,
    joint: f64,
}

fn quantiles(a: &QuantileArgs, inputs: &mut Inputs) -> Outcome<Output> {
    let net = inputs.network(&a.base.input)?;
    let f = inputs.motif(&a.base.motif)?;
    let s = &a.sampling;
    let report = regularity_set(&net, &f);
    let all = LayerSubset::all(net.d());
    let reps = SamplingStatistic::new(&net, &f, &report, Some(&all))?.replicates(s.b as usize, s.seed);
    let mut per_subset = BTreeMap::new();
    for &u in &all {
        per_subset.insert(u, quantile_norm(&reps, &[u], s.alpha)?);
    }
    let joint = quantile_norm(&reps, &all, s.alpha)?;
    Ok(Output::Quantiles(QuantileResult { regularity: report, alpha: s.alpha, b: s.b, seed: s.seed, subsets: per_subset, joint }))
}

fn test_similarity(a: &SimilarityArgs, inputs: &mut Inputs) -> Outcome<Output> {
    let net = inputs.network(&a.base.input)?;
    let f = inputs.motif(&a.base.motif)?;
    let s = &a.sampling;
    Ok(Output::Test(similarity_test(&net, &f, (a.layers[0], a.layers[1]), s.alpha, s.b as usize, s.seed)?))
}

fn test_independence(a: &IndependenceArgs, inputs: &mut Inputs) -> Outcome<Output> {
    let net = inputs.network(&a.input)?;
    let f_diag = inputs.motif(&a.motif_diag)?;
    let f_off = inputs.motif(&a.motif_offdiag)?;
    let s = &a.sampling;
    let z = labels_for(inputs, &net, &a.labels, Some(s.seed))?;
    let u = subset_list(&a.subsets, net.d())?;
    Ok(Output::Test(independence_test(&net, &z, &f_off, &f_diag, (u[0], u[1]), s.alpha, s.b as usize, s.seed)?))
}

#[derive(Serialize)]
#[serde(untagged)]
enum Checked {
    Integer(u128),
    Probabilities(Vec<f64>),
}

#[derive(Serialize)]
struct Check {
    name: String,
    fast: Checked,
    oracle: Checked,
    agree: bool,
}

#[derive(Serialize)]
struct VerifyResult {
    vertices_checked: usize,
    checks: Vec<Check>,
    skipped: Vec<&'static str>,
    all_agree: bool,
}

fn verify(a: &VerifyArgs, inputs: &mut Inputs) -> Outcome<VerifyResult> {
    let net = inputs.network(&a.base.input)?;
    let f = inputs.motif(&a.base.motif)?;
    let mut checks = Vec::new();
    let aut = oracle::brute_aut(&f);
    checks.push(Check { name: "automorphisms".into(), fast: Checked::Integer(f.aut_count().into()), oracle: Checked::Integer(aut.into()), agree: aut == f.aut_count() });
    let m = net.n().min(a.max_n).min(oracle::MAX_N);
    let sub = net.induced(&(0..m).collect::<Vec<_>>());
    let mut skipped = Vec::new();
    if net.d() <= oracle::MAX_D {
        for u in LayerSubset::all(net.d()) {
            let fast = count_cross_layer(&sub, u, &f)?;
            let slow = oracle::brute_count_cross_layer(&sub, u, &f)?;
            checks.push(Check { name: format!("count[{u}]"), fast: Checked::Integer(fast), oracle: Checked::Integer(slow), agree: fast == slow });
        }
    } else {
        skipped.push("counts");
    }
    if net.d() <= oracle::MAX_PROB_D {
        let edge = mm_core::builtin_motif("edge")?;
        let mut mu = vec![1.0; 1 << net.d()];
        for u in LayerSubset::all(net.d()) {
            mu[u.mask() as usize] = empirical_density(&net.intersection(u)?, &edge);
        }
        let mu = MomentVector::new(net.d(), mu)?;
        let fast = moments_to_probs(&mu)?;
        let slow = oracle::brute_joint_probs(&mu)?;
        let agree = fast.p.iter().zip(&slow.p).all(|(x, y)| (x - y).abs() <= 1e-12);
        checks.push(Check { name: "edge-tuple law".into(), fast: Checked::Probabilities(fast.p), oracle: Checked::Probabilities(slow.p), agree });
    } else {
        skipped.push("edge-tuple law");
    }
    let all_agree = checks.iter().all(|c| c.agree);
    Ok(VerifyResult { vertices_checked: m, checks, skipped, all_agree })
}

fn timestamp() -> String {
    use time::format_description::well_known::Rfc3339;
    time::OffsetDateTime::now_utc().format(&Rfc3339).unwrap_or_default()
}

fn emit(cli: &Cli, result: &Output, inputs: Inputs, to_stderr: bool) -> Outcome<()> {
    let text = report::render(cli, result, inputs.hashes, &timestamp());
    match &cli.report {
        Some(p) => write_file(p, &text),
        None if to_stderr => {
            eprint!("{text}");
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    }
    let mut inputs = Inputs::default();
    let output = match &cli.command {
        Command::Generate(a) => {
            let (result, network) = generate(a, &mut inputs)?;
            let on_stdout = network.is_some();
            if let Some(text) = network {
                print!("{text}");
            }
            return emit(cli, &Output::Generate(result), inputs, on_stdout);
        }
        Command::Count(a) => Output::Count(count(a, &mut inputs)?),
        Command::Estimate(a) => estimate(a, &mut inputs)?,
        Command::Regularity(a) => regularity(a, &mut inputs)?,
        Command::Quantiles(a) => quantiles(a, &mut inputs)?,
        Command::TestSimilarity(a) => test_similarity(a, &mut inputs)?,
        Command::TestIndependence(a) => test_independence(a, &mut inputs)?,
        Command::Verify(a) => {
            let r = verify(a, &mut inputs)?;
            if !r.all_agree {
                let failed: Vec<String> = r.checks.iter().filter(|c| !c.agree).map(|c| c.name.clone()).collect();
                emit(cli, &Output::Verify(r), inputs, false)?;
                return Err(Failure::Verify(format!("oracle disagreement: {}", failed.join(", "))));
            }
            Output::Verify(r)
        }
    };
    emit(cli, &output, inputs, false)
}

fn fail(f: &Failure) -> ExitCode {
    let line = serde_json::json!({ "error": f.kind(), "code": f.code(), "message": f.message() });
    eprintln!("{line}");
    ExitCode::from(f.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments");
            return fail(&Failure::Parse(line.trim_start_matches("error: ").to_string()));
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f),
    }
}

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};

use abc_verdict::abc::AcceptanceRule;
use abc_verdict::experiments::{emit_outputs, run, ExperimentId, ExperimentSpec};
use abc_verdict::{AbcError, BayesFactors, Dataset, ModelPairSpec, SummaryStatistic};

#[derive(Parser)]
#[command(name = "abc-verdict", version, about = "ABC model choice against exact Bayes factors")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact log B12 against log B12^eta on prior-predictive count data.
    Fig1(ExperimentArgs),
    /// B12^eta at growing sample size against its large-n limit.
    LemmaConvergence(ExperimentArgs),
    /// log g1/g2 on data from the normal pair.
    NormalDiscrepancy(ExperimentArgs),
    /// Exact posteriors against ABC estimates.
    AbcVsExact(ExperimentArgs),
    /// False allocation rates of several decision rules.
    FalseAlloc(ExperimentArgs),
    /// Print log B12, log B12^eta and log g1/g2 for a dataset, one per line.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PairKind {
    PoisGeo,
    Normal,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long, value_enum)]
    pair: Option<PairKind>,
    #[arg(long, default_value_t = 0.1)]
    sigma1: f64,
    #[arg(long, default_value_t = 10.0)]
    sigma2: f64,
    /// Prior sd of the common normal mean.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
}

impl PairArgs {
    fn resolve(&self, default: ModelPairSpec) -> Result<ModelPairSpec, AbcError> {
        match self.pair {
            None => Ok(default),
            Some(PairKind::PoisGeo) => Ok(ModelPairSpec::PoissonGeometric),
            Some(PairKind::Normal) => ModelPairSpec::normal(self.sigma1, self.sigma2, self.a),
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write an SVG plot.
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[command(flatten)]
    pair: PairArgs,
    /// sum, sum-logfact, mean, mean-ss or identity.
    #[arg(long)]
    stat: Option<SummaryStatistic>,
    /// knn:<k> or eps:<x>.
    #[arg(long)]
    rule: Option<AcceptanceRule>,
    #[arg(long)]
    table_size: Option<usize>,
    /// Poisson mean of the lemma-convergence data.
    #[arg(long)]
    theta0: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// CSV of observations; '#' lines and a non-numeric header are skipped.
    #[arg(long)]
    data: PathBuf,
}

fn build_spec(id: ExperimentId, a: ExperimentArgs) -> Result<ExperimentSpec, AbcError> {
    let mut spec = ExperimentSpec::defaults(id, a.seed, a.out);
    let pair = a.pair.resolve(spec.pair)?;
    if pair.is_count() != spec.pair.is_count() && a.stat.is_none() {
        spec.statistic = if pair.is_count() { SummaryStatistic::Sum } else { SummaryStatistic::Mean };
    }
    spec.pair = pair;
    spec.plot = a.plot;
    if let Some(n) = a.n {
        spec.n = n;
    }
    if let Some(r) = a.reps {
        spec.replicates = r;
    }
    if let Some(s) = a.stat {
        spec.statistic = s;
    }
    if let Some(r) = a.rule {
        spec.rule = r;
    }
    if let Some(t) = a.table_size {
        spec.table_size = t;
    }
    if let Some(t) = a.theta0 {
        spec.theta0 = t;
    }
    Ok(spec)
}

fn read_data(pair: &ModelPairSpec, path: &PathBuf) -> Result<Dataset, AbcError> {
    let file = File::open(path).map_err(|e| AbcError::Io {
        path: path.clone(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => values.extend(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(AbcError::Parse(format!("{}: record {}: {e}", path.display(), i + 1))),
        }
    }
    Dataset::from_values_for(pair, &values)
}

fn execute(command: Command) -> Result<(), AbcError> {
    let (id, args) = match command {
        Command::Oracle(a) => {
            let pair = a.pair.resolve(ModelPairSpec::PoissonGeometric)?;
            let data = read_data(&pair, &a.data)?;
            let f = BayesFactors::compute(&pair, &data)?;
            println!("{}\n{}\n{}", f.log_b12, f.log_b_eta, f.log_g);
            return Ok(());
        }
        Command::Fig1(a) => (ExperimentId::Fig1, a),
        Command::LemmaConvergence(a) => (ExperimentId::LemmaConvergence, a),
        Command::NormalDiscrepancy(a) => (ExperimentId::NormalDiscrepancy, a),
        Command::AbcVsExact(a) => (ExperimentId::AbcVsExact, a),
        Command::FalseAlloc(a) => (ExperimentId::FalseAlloc, a),
    };
    let spec = build_spec(id, args)?;
    info!("running {id} with seed {}", spec.master_seed);
    let report = run(&spec)?;
    for path in emit_outputs(&report, &spec)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn error_kind(e: &AbcError) -> &'static str {
    match e {
        AbcError::Guard(_) => "guard",
        AbcError::Io { .. } => "io",
        AbcError::Csv(_) | AbcError::Parse(_) => "parse",
        AbcError::NonConvergence { .. } => "non-convergence",
        _ => "invalid-input",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('"', "'");
            eprintln!("abc-verdict-failure kind={} message=\"{message}\"", error_kind(&e));
            ExitCode::from(if matches!(e, AbcError::Guard(_)) { 2 } else { 1 })
        }
    }
}

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resample_kernel::data::{DataFormat, LabelColumn};
use resample_kernel::encoder::{save_models, stack_layers_with_models};
use resample_kernel::error::{Error, Result};
use resample_kernel::experiment::report::{
    read_runs_csv, reports_from_runs, summary_markdown, write_experiment_outputs, write_sweep_outputs,
};
use resample_kernel::experiment::{
    build_affinity, cluster_once, compare_methods, embed_once, repetition_seed, run_baselines, run_experiment, run_sweep,
    ExperimentConfig, Method, Preset, SweepParam, SweepSpec, Tally,
};
use resample_kernel::kernel::KernelMatrix;
use resample_kernel::metrics::{accuracy, nmi_with};
use resample_kernel::spectral::EigenSolver;

#[derive(Parser)]
#[command(name = "rkernel", version, about = "Resample-kernel spectral clustering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the encoder stack and write models.txt and codes.csv.
    Encode(Common),
    /// Build the kernel matrix and write kernel.bin (and kernel.csv).
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Also write a CSV copy of the matrix.
        #[arg(long)]
        csv: bool,
    },
    /// Cluster once and write labels.csv (and embedding.csv for kernel methods).
    Cluster(Common),
    /// Score a predicted labeling against the dataset's labels.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// One integer label per line.
        #[arg(long)]
        pred: PathBuf,
    },
    /// Repeated runs of one method.
    Experiment(Common),
    /// One experiment per grid value of delta or sigma_multiplier.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SweepParam::Delta)]
        param: SweepParam,
        /// Comma-separated grid; defaults to the standard grid of the parameter.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// k-means on raw features and on principal components.
    Baselines(Common),
    /// Win/tied/lose of the groups in one runs.csv against another, matched by dataset.
    Compare {
        runs_a: PathBuf,
        runs_b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<DataFormat>,
    #[arg(long, value_enum)]
    label_column: Option<LabelColumn>,
    #[arg(long)]
    skip_header: bool,
    #[arg(long)]
    standardize: bool,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    delta: Option<f64>,
    /// Feature fraction per unit.
    #[arg(long = "a")]
    feature_fraction: Option<f64>,
    /// Number of clustering units.
    #[arg(long = "V")]
    units: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    sigma_mult: Option<f64>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    zero_diagonal: bool,
    /// Cluster the raw agreement counts instead of counts divided by V.
    #[arg(long)]
    raw_kernel: bool,
    #[arg(long)]
    pca_dims: Option<usize>,
    #[arg(long, value_enum)]
    eigen_solver: Option<EigenSolver>,
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(p) = self.preset {
            c = c.with_preset(p);
        }
        if let Some(v) = &self.dataset {
            c.dataset.path = v.clone();
        }
        if let Some(v) = self.format {
            c.dataset.format = v;
        }
        if let Some(v) = self.label_column {
            c.dataset.label_column = v;
        }
        c.dataset.skip_header |= self.skip_header;
        c.dataset.standardize |= self.standardize;
        if let Some(v) = self.method {
            c.method = v;
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = self.feature_fraction {
            c.feature_fraction = v;
        }
        if let Some(v) = self.units {
            c.units = v;
        }
        if let Some(v) = self.layers {
            c.layers = v;
        }
        if let Some(v) = self.sigma_mult {
            c.sigma_multiplier = v;
        }
        if self.clusters.is_some() {
            c.clusters = self.clusters;
        }
        if let Some(v) = self.reps {
            c.repetitions = v;
        }
        if let Some(v) = self.seed {
            c.master_seed = v;
        }
        c.zero_diagonal |= self.zero_diagonal;
        if self.raw_kernel {
            c.normalize_kernel = false;
        }
        if self.pca_dims.is_some() {
            c.pca_dims = self.pca_dims;
        }
        if let Some(v) = self.eigen_solver {
            c.eigen_solver = v;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        if c.dataset.path.as_os_str().is_empty() {
            return Err(Error::Config("no dataset given (--dataset or config file)".into()));
        }
        c.validate()?;
        Ok(c)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Encode(common) => {
            let config = common.config()?;
            let ds = config.dataset.load()?;
            let (models, codes) = stack_layers_with_models(ds.features().view(), &config.encoder_config(config.master_seed))?;
            save_models(&models, create(&common.out_dir, "models.txt")?)?;
            let mut out = create(&common.out_dir, "codes.csv")?;
            for row in codes.active().rows() {
                let fields: Vec<String> = row.iter().map(u32::to_string).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
            out.flush()?;
            println!("encoded {} points with {} units into {} dimensions", codes.n(), codes.units(), codes.total_dim());
        }
        Command::Kernel { common, csv } => {
            let config = common.config()?;
            let ds = config.dataset.load()?;
            let k: KernelMatrix = build_affinity(&ds, &config, repetition_seed(config.master_seed, 0))?;
            let mut out = create(&common.out_dir, "kernel.bin")?;
            k.write_binary(&mut out)?;
            out.flush()?;
            if csv {
                let mut out = create(&common.out_dir, "kernel.csv")?;
                k.write_csv(&mut out)?;
                out.flush()?;
            }
            println!("{:?} kernel, n = {}, scale = {}", k.kind(), k.n(), k.scale());
        }
        Command::Cluster(common) => {
            let config = common.config()?;
            let ds = config.dataset.load()?;
            let c = config
                .clusters
                .or(ds.n_classes())
                .ok_or_else(|| Error::Config("--clusters is required for unlabeled data".into()))?;
            let seed = repetition_seed(config.master_seed, 0);
            let res = cluster_once(&ds, &config, c, seed)?;
            if matches!(config.method, Method::Resample | Method::Rbf) {
                let mut out = create(&common.out_dir, "embedding.csv")?;
                embed_once(&ds, &config, c, seed)?.write_csv(&mut out)?;
                out.flush()?;
            }
            let mut out = create(&common.out_dir, "labels.csv")?;
            for l in &res.labels {
                writeln!(out, "{l}")?;
            }
            out.flush()?;
            println!("objective {} (restart {})", res.objective, res.chosen_restart);
        }
        Command::Evaluate { common, pred } => {
            let config = common.config()?;
            let ds = config.dataset.load()?;
            let truth = ds
                .labels()
                .ok_or_else(|| Error::CannotEvaluate("dataset has no labels".into()))?;
            let text = std::fs::read_to_string(&pred)?;
            let labels = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| {
                    l.trim().parse::<usize>().map_err(|e| Error::Parse {
                        path: pred.clone(),
                        line: i + 1,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let nmi = nmi_with(truth, &labels, config.nmi_normalization)?;
            let acc = accuracy(&labels, truth)?;
            println!("nmi {nmi}\nacc {acc}");
        }
        Command::Experiment(common) => {
            let config = common.config()?;
            let outcome = run_experiment(&config)?;
            let rows = write_experiment_outputs(std::slice::from_ref(&outcome), config.alpha, &common.out_dir)?;
            print!("{}", summary_markdown(&rows));
            if outcome.report.is_none() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Sweep { common, param, grid } => {
            let config = common.config()?;
            let mut spec = match param {
                SweepParam::Delta => SweepSpec::delta(),
                SweepParam::SigmaMultiplier => SweepSpec::sigma(),
            };
            if let Some(g) = grid {
                spec.grid = g;
            }
            let sweep = run_sweep(&config, &spec)?;
            write_sweep_outputs(&sweep, config.alpha, &common.out_dir)?;
            for p in &sweep.points {
                match p.report() {
                    Some(r) => println!("{:>2}  {:<10} nmi {:.4}  acc {:.4}", p.index, p.value, r.nmi_mean, r.acc_mean),
                    None => println!("{:>2}  {:<10} failed", p.index, p.value),
                }
            }
            if sweep.any_failed() {
                eprintln!("warning: some grid points failed");
                return Ok(ExitCode::from(4));
            }
        }
        Command::Baselines(common) => {
            let config = common.config()?;
            let outcomes = run_baselines(&config)?;
            let rows = write_experiment_outputs(&outcomes, config.alpha, &common.out_dir)?;
            print!("{}", summary_markdown(&rows));
        }
        Command::Compare { runs_a, runs_b, alpha } => {
            let a = reports_from_runs(&read_runs_csv(&runs_a)?);
            let b = reports_from_runs(&read_runs_csv(&runs_b)?);
            let mut nmi = Vec::new();
            let mut acc = Vec::new();
            println!("| dataset | A | B | NMI A | NMI B | p | verdict | ACC A | ACC B | p | verdict |");
            println!("|---|---|---|---|---|---|---|---|---|---|---|");
            for (head_a, rep_a, _) in &a {
                let Some(rep_a) = rep_a else { continue };
                let Some((head_b, Some(rep_b), _)) = b.iter().find(|(h, r, _)| h.dataset == head_a.dataset && r.is_some())
                else {
                    continue;
                };
                let cmp = compare_methods(rep_a, rep_b, alpha)?;
                nmi.push(cmp.nmi.verdict);
                acc.push(cmp.acc.verdict);
                println!(
                    "| {} | {} | {} | {:.4} | {:.4} | {:.4} | {} | {:.4} | {:.4} | {:.4} | {} |",
                    head_a.dataset,
                    head_a.method,
                    head_b.method,
                    cmp.nmi.mean_a,
                    cmp.nmi.mean_b,
                    cmp.nmi.p_value,
                    cmp.nmi.verdict,
                    cmp.acc.mean_a,
                    cmp.acc.mean_b,
                    cmp.acc.p_value,
                    cmp.acc.verdict
                );
            }
            if nmi.is_empty() {
                return Err(Error::CannotEvaluate("no dataset appears in both run files".into()));
            }
            println!("NMI {}", Tally::from_verdicts(nmi));
            println!("ACC {}", Tally::from_verdicts(acc));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}


use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use radial_gdp::gdp::gdp_to_dp_delta;
use radial_gdp::pipeline::{self, Layout, PipelineConfig, SensitivityMode};
use radial_gdp::Result;

#[derive(Parser)]
#[command(
    name = "radial-gdp",
    version,
    about = "Private mean face curves under Gaussian differential privacy"
)]
struct Cli {
    /// TOML config file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset of surfaces to the input directory.
    Generate,
    /// Normalize and align the input surfaces.
    Preprocess,
    /// Extract radial curves from the aligned surfaces.
    Extract,
    /// Release private RKHS mean curves.
    Sanitize,
    /// Release the point-wise baseline.
    Baseline,
    /// Compute the MSE table, or compare two point-cloud files.
    Evaluate {
        /// Reference point-cloud file.
        #[arg(long, requires = "estimate")]
        reference: Option<PathBuf>,
        /// Estimate point-cloud file, scaled to the reference before comparing.
        #[arg(long, requires = "reference")]
        estimate: Option<PathBuf>,
        /// Also report the row-by-row MSE (clouds must have equal size).
        #[arg(long)]
        pointwise: bool,
    },
    /// Monte-Carlo check of the privacy loss on synthetic adjacent datasets.
    Verify,
    /// Run every stage on a fresh synthetic dataset.
    Demo,
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Args, Default)]
struct Overrides {
    /// Grid points per curve.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Radial curves per face.
    #[arg(long, global = true)]
    curves: Option<usize>,
    /// Kernel range.
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Kernel smoothness, in (0, 1].
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Penalty for the x coordinate.
    #[arg(long, global = true)]
    phi_x: Option<f64>,
    /// Penalty for the y coordinate.
    #[arg(long, global = true)]
    phi_y: Option<f64>,
    /// Penalty for the z coordinate.
    #[arg(long, global = true)]
    phi_z: Option<f64>,
    /// GDP budget per x curve.
    #[arg(long, global = true)]
    mu_x: Option<f64>,
    /// GDP budget per y curve.
    #[arg(long, global = true)]
    mu_y: Option<f64>,
    /// GDP budget per z curve.
    #[arg(long, global = true)]
    mu_z: Option<f64>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `data-driven` or `supplied`.
    #[arg(long, global = true, value_parser = parse_mode)]
    sensitivity: Option<SensitivityMode>,
    /// Supplied norm bound for x curves.
    #[arg(long, global = true)]
    tau_x: Option<f64>,
    /// Supplied norm bound for y curves.
    #[arg(long, global = true)]
    tau_y: Option<f64>,
    /// Supplied norm bound for z curves.
    #[arg(long, global = true)]
    tau_z: Option<f64>,
    /// Total GDP budget of the point-wise baseline.
    #[arg(long, global = true)]
    baseline_mu_total: Option<f64>,
    /// Directory of raw surface files.
    #[arg(long, global = true)]
    input_dir: Option<PathBuf>,
    /// Directory for all artifacts.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Monte-Carlo draws for verify.
    #[arg(long, global = true)]
    n_samples: Option<usize>,
    /// Surfaces written by generate.
    #[arg(long, global = true)]
    n_individuals: Option<usize>,
    /// Radius rows per synthetic surface.
    #[arg(long, global = true)]
    surface_radii: Option<usize>,
    /// Angle columns per synthetic surface.
    #[arg(long, global = true)]
    surface_angles: Option<usize>,
    /// Amplitude of synthetic shape perturbations.
    #[arg(long, global = true)]
    perturbation: Option<f64>,
    /// Synthetic rotation jitter.
    #[arg(long, global = true)]
    rotation_jitter: Option<f64>,
    /// Synthetic scale jitter.
    #[arg(long, global = true)]
    scale_jitter: Option<f64>,
    /// Synthetic translation jitter.
    #[arg(long, global = true)]
    translation_jitter: Option<f64>,
}

fn parse_mode(s: &str) -> std::result::Result<SensitivityMode, String> {
    match s {
        "data-driven" => Ok(SensitivityMode::DataDriven),
        "supplied" => Ok(SensitivityMode::Supplied),
        _ => Err(format!("expected `data-driven` or `supplied`, got `{s}`")),
    }
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),*) => {
        $(if let Some(v) = $o.$field { $cfg.$field = v; })*
    };
}

impl Overrides {
    fn apply(self, cfg: &mut PipelineConfig) {
        let o = self;
        apply!(cfg, o; m, curves, rho, alpha, phi_x, phi_y, phi_z, mu_x, mu_y, mu_z, seed, sensitivity,
            baseline_mu_total, input_dir, output_dir, threads, n_samples, n_individuals, surface_radii,
            surface_angles, perturbation, rotation_jitter, scale_jitter, translation_jitter);
        if o.tau_x.is_some() {
            cfg.tau_x = o.tau_x;
        }
        if o.tau_y.is_some() {
            cfg.tau_y = o.tau_y;
        }
        if o.tau_z.is_some() {
            cfg.tau_z = o.tau_z;
        }
    }
}

fn load_config(path: Option<&PathBuf>, overrides: Overrides) -> Result<PipelineConfig> {
    let mut cfg = match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_ref(), cli.overrides)?;
    let layout = Layout::new(&cfg);
    let threads = cfg.threads;
    pipeline::with_threads(threads, || match cli.command {
        Command::Generate => {
            let n = pipeline::run_generate(&cfg)?;
            println!("wrote {n} surfaces to {}", layout.input_dir.display());
            Ok(())
        }
        Command::Preprocess => {
            let n = pipeline::run_preprocess(&cfg)?;
            println!("aligned {n} surfaces into {}", layout.aligned_dir.display());
            Ok(())
        }
        Command::Extract => {
            let n = pipeline::run_extract(&cfg)?;
            println!(
                "extracted {} curves from {n} surfaces into {}",
                cfg.curves,
                layout.curves_dir.display()
            );
            Ok(())
        }
        Command::Sanitize => {
            let rel = pipeline::run_sanitize(&cfg)?;
            println!(
                "released {} curves, mu_total = {:.4}",
                rel.private.len(),
                rel.report.mu_total
            );
            println!("report: {}", layout.functional_report().display());
            Ok(())
        }
        Command::Baseline => {
            let rel = pipeline::run_baseline(&cfg)?;
            println!(
                "released {} points, mu_p = {:.7}, mu_total = {:.4}",
                rel.private.len(),
                rel.mu_p,
                rel.report.mu_total
            );
            println!("report: {}", layout.baseline_report().display());
            Ok(())
        }
        Command::Evaluate {
            reference,
            estimate,
            pointwise,
        } => {
            let report = match (reference, estimate) {
                (Some(r), Some(e)) => pipeline::evaluate_files(&r, &e, pointwise)?,
                _ => pipeline::run_evaluate(&cfg)?,
            };
            print!("{report}");
            Ok(())
        }
        Command::Verify => {
            let v = pipeline::run_verify(&cfg)?;
            print_verification(&v);
            Ok(())
        }
        Command::Demo => {
            let s = pipeline::run_demo(&cfg)?;
            let mu_t = s.functional.report.mu_total;
            println!(
                "functional release: mu_total = {mu_t:.4}, delta(eps=1) = {:.3e}",
                gdp_to_dp_delta(mu_t, 1.0)?
            );
            println!(
                "baseline release: mu_p = {:.7}, mu_total = {:.4}",
                s.baseline.mu_p, s.baseline.report.mu_total
            );
            print!("{}", s.evaluation);
            print_verification(&s.verification);
            println!("artifacts in {}", layout.output_dir.display());
            Ok(())
        }
        Command::Config => {
            print!("{}", cfg.to_toml());
            Ok(())
        }
    })
}

fn print_verification(v: &radial_gdp::gdp::PrivacyVerification) {
    println!(
        "privacy verification (n = {}, mu = {}, distance {:.4e} <= bound {:.4e}): {}",
        v.n_samples,
        v.mu,
        v.realized_distance,
        v.delta_bound,
        if v.passed() { "pass" } else { "FAIL" }
    );
    println!(
        "  trade-off at alpha = {}: type II {:.4} vs G_mu {:.4}",
        v.tradeoff.alpha, v.tradeoff.empirical_type2, v.tradeoff.gdp_bound
    );
    for t in &v.tails {
        println!(
            "  P(PL > {:<4}) = {:.4}  predicted {:.4}  bound {:.4}",
            t.epsilon, t.empirical, t.predicted, t.gdp_bound
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

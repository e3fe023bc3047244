use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use adaport::core::FeedbackModel;
use adaport::env::XCorrelation;
use adaport::harness::{
    aggregate, regret_slope, render_svg, resolve_feedback, run_policy, write_curves_csv,
    EnvSpec, ExperimentConfig, ExperimentEnv, MetricsSummary,
};
use adaport::theory::sweep_fig3;
use adaport::traces::{build_matrices, default_portions, read_bandwidth_csv, read_pose_csv};
use adaport::{core::BernoulliInstance, Error, Result};

#[derive(Parser)]
#[command(name = "adaport", about = "Hybrid-feedback portion-selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the two-arm lower-bound constant comparison sweeps as CSV
    Bounds {
        /// Output directory for fig3a.csv / fig3b.csv
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Report constants in log₂ instead of nats (display only)
        #[arg(long)]
        log2: bool,
    },
    /// Run seeded synthetic replications from a JSON config
    Simulate(RunArgs),
    /// Build feedback matrices from traces, then run replications
    TraceRun(RunArgs),
    /// Emit the trace pipeline's feedback matrices as CSV
    Matrices {
        #[arg(long)]
        poses: PathBuf,
        #[arg(long)]
        bandwidth: PathBuf,
        /// Payload of the minimum-viewport portion in megabits
        #[arg(long, default_value_t = 0.95)]
        base_size_megabits: f64,
        /// Frame interval in seconds
        #[arg(long, default_value_t = 0.01)]
        interval_s: f64,
        /// Number of timeslots (traces are cycled)
        #[arg(long, default_value_t = 30_000)]
        horizon: usize,
        #[arg(long, default_value = "matrices.csv")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the config's base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's horizon
    #[arg(long)]
    horizon: Option<usize>,
    /// Override the config's replication count
    #[arg(long)]
    reps: Option<usize>,
    /// Override the config's output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot of the mean regret curves
    #[arg(long)]
    svg: bool,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Bounds { out, log2 } => bounds(&out, log2),
        Command::Simulate(args) => experiment(args, true),
        Command::TraceRun(args) => experiment(args, false),
        Command::Matrices {
            poses,
            bandwidth,
            base_size_megabits,
            interval_s,
            horizon,
            out,
        } => {
            let m = build_matrices(
                &read_pose_csv(&poses)?,
                &read_bandwidth_csv(&bandwidth)?,
                &default_portions(base_size_megabits)?,
                horizon,
                interval_s,
            )?;
            m.write_csv(fs::File::create(&out)?)?;
            println!("wrote {}x{} matrices to {}", m.t_count, m.n_arms, out.display());
            Ok(())
        }
    }
}

fn bounds(out: &Path, log2: bool) -> Result<()> {
    fs::create_dir_all(out)?;
    let fixed = (0.8, 0.9);
    let sweeps = [
        ("fig3a.csv", sweep_fig3(fixed, &[(0.75, 0.8), (0.8, 0.8), (0.85, 0.8), (0.9, 0.8)])),
        ("fig3b.csv", sweep_fig3(fixed, &[(0.75, 0.6), (0.75, 0.7), (0.75, 0.8), (0.75, 0.9)])),
    ];
    let scale = if log2 { 1.0 / std::f64::consts::LN_2 } else { 1.0 };
    for (name, rows) in sweeps {
        let path = out.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["alpha_sub", "beta_sub", "c_2fb", "c_2bb", "c_1b", "status"])?;
        for r in rows {
            w.write_record([
                r.alpha_sub.to_string(),
                r.beta_sub.to_string(),
                (r.c_2fb * scale).to_string(),
                (r.c_2bb * scale).to_string(),
                (r.c_1b * scale).to_string(),
                r.status,
            ])?;
        }
        w.flush()?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn experiment(args: RunArgs, synthetic: bool) -> Result<()> {
    let mut cfg = ExperimentConfig::from_json_file(&args.config)?;
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;

    let exp = match (&cfg.env, synthetic) {
        (EnvSpec::Synthetic { instance, correlated_x }, true) => ExperimentEnv::Synthetic {
            instance: BernoulliInstance::from_json_file(instance)?,
            correlation: if *correlated_x {
                XCorrelation::NestedThreshold
            } else {
                XCorrelation::Independent
            },
        },
        (
            EnvSpec::Trace { poses, bandwidth, base_size_megabits, interval_s },
            false,
        ) => {
            let m = build_matrices(
                &read_pose_csv(poses)?,
                &read_bandwidth_csv(bandwidth)?,
                &default_portions(*base_size_megabits)?,
                cfg.horizon,
                *interval_s,
            )?;
            ExperimentEnv::Trace { matrices: Arc::new(m) }
        }
        _ => {
            return Err(Error::Config(format!(
                "config env kind does not match the `{}` subcommand",
                if synthetic { "simulate" } else { "trace-run" }
            )))
        }
    };

    // oracle baseline on shared seeds, for degradation accounting
    let oracle_results = run_policy(
        &exp,
        "oracle",
        FeedbackModel::OneB,
        cfg.horizon,
        cfg.replications,
        cfg.base_seed,
    )?;

    let slope_window = ((cfg.horizon / 10).max(1), cfg.horizon);
    let mut summary_rows = Vec::new();
    let mut curves: Vec<(String, MetricsSummary)> = Vec::new();
    for entry in &cfg.policies {
        let model = resolve_feedback(&entry.name, entry.feedback)?;
        let results = run_policy(
            &exp,
            &entry.name,
            model,
            cfg.horizon,
            cfg.replications,
            cfg.base_seed,
        )?;
        let summary = aggregate(&results, &oracle_results)?;
        let slope = regret_slope(&summary, slope_window)?;
        write_curves_csv(&summary, fs::File::create(out.join(format!("{}.csv", entry.name)))?)?;
        summary_rows.push((
            entry.name.clone(),
            format!("{model:?}"),
            summary.relative_degradation,
            summary.degradation_excluded,
            slope,
            *summary.mean_regret.last().unwrap(),
        ));
        println!(
            "{:<10} final mean regret {:>12.3}  slope {:>9.3}  degradation {}",
            entry.name,
            summary.mean_regret.last().unwrap(),
            slope,
            summary
                .relative_degradation
                .map(|d| format!("{:.4}", d))
                .unwrap_or_else(|| "undefined".into()),
        );
        curves.push((entry.name.clone(), summary));
    }

    let mut w = csv::Writer::from_path(out.join("summary.csv"))?;
    w.write_record([
        "policy",
        "feedback",
        "replications",
        "degradation",
        "degradation_excluded",
        "slope",
        "final_mean_regret",
    ])?;
    for (name, model, degr, excl, slope, final_regret) in &summary_rows {
        w.write_record([
            name.clone(),
            model.clone(),
            cfg.replications.to_string(),
            degr.map(|d| d.to_string()).unwrap_or_else(|| "undefined".into()),
            excl.to_string(),
            slope.to_string(),
            final_regret.to_string(),
        ])?;
    }
    w.flush()?;

    if args.svg {
        let series: Vec<(String, &[f64])> = curves
            .iter()
            .map(|(n, s)| (n.clone(), s.mean_regret.as_slice()))
            .collect();
        fs::write(out.join("regret.svg"), render_svg(&series))?;
    }
    println!("wrote results to {}", out.display());
    Ok(())
}

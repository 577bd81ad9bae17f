//! Command-line front end. Exit codes: 0 success, 2 configuration error,
//! 3 numeric failure, 1 anything else (I/O).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use humanoid_wbc::command::{sample_command, Channel, CommandRanges, CommandVector};
use humanoid_wbc::config::{pick, Config};
use humanoid_wbc::gait::{clock_trace, ContactModelParams, GaitPreset, DEFAULT_DT, DEFAULT_SIGMA};
use humanoid_wbc::intervention::{run_length_stats, DEFAULT_P_FLIP};
use humanoid_wbc::layout::JointLayout;
use humanoid_wbc::metrics::tracking_error;
use humanoid_wbc::plot::{line_plot, Series};
use humanoid_wbc::reward::{RewardContext, RewardTerm};
use humanoid_wbc::rollout::export::reward_breakdowns;
use humanoid_wbc::rollout::oracle::run_oracle_rollout_with_layout;
use humanoid_wbc::rollout::{
    export_curves, run_toy_ppo, InterventionSettings, OracleConfig, RolloutLog, ToyConfig,
};
use humanoid_wbc::swing::{target_derivatives, target_height, SwingProfile};
use humanoid_wbc::Error;

#[derive(Parser)]
#[command(
    name = "wbc",
    version,
    about = "Gait clocks, rewards, rollouts and training for humanoid whole-body control"
)]
struct Cli {
    /// TOML config; its values take precedence over flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Phase, clock and contact-probability trace as CSV.
    Clock {
        #[arg(long, default_value = "walking")]
        gait: String,
        #[arg(long, default_value_t = 2.0)]
        f: f64,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = 2.0)]
        cycles: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Swing-foot height profile over one cycle as CSV.
    Traj {
        #[arg(long, default_value_t = 0.15)]
        l: f64,
        #[arg(long, default_value_t = 0.0)]
        start_z: f64,
        #[arg(long, default_value_t = 0.0)]
        end_z: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Draw commands from the unlocked ranges as JSON Lines.
    SampleCommands {
        #[arg(long, default_value = "walking")]
        gait: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-term reward table for a rollout log; writes a per-step CSV.
    Reward {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value = "breakdown.csv")]
        out: PathBuf,
    },
    /// Tracking-error report for a rollout log as JSON.
    Metrics {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intervention indicator run-length histogram as CSV.
    Intervene {
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_P_FLIP)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scripted oracle rollout written as JSON Lines.
    Rollout {
        #[arg(long, default_value = "walking")]
        gait: String,
        #[arg(long)]
        vx: Option<f64>,
        #[arg(long)]
        vy: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        f: Option<f64>,
        #[arg(long)]
        l: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        w: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// First-order lag time constant (s).
        #[arg(long, default_value_t = 0.0)]
        lag: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enable upper-body intervention with this flip probability.
        #[arg(long)]
        p_flip: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Resample the command every N steps.
        #[arg(long)]
        resample_every: Option<usize>,
        #[arg(long, default_value = "log.jsonl")]
        out: PathBuf,
        /// Also export curve CSVs (and SVGs with --svg) into this directory.
        #[arg(long)]
        export_dir: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
    },
    /// Train the point-mass toy task with the full PPO objective.
    TrainToy {
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Symmetry-loss weight.
        #[arg(long)]
        beta: Option<f64>,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn gait(name: &str) -> anyhow::Result<GaitPreset> {
    Ok(name.parse::<GaitPreset>()?)
}

fn layout(cfg: &Config) -> anyhow::Result<JointLayout> {
    Ok(match &cfg.layout {
        Some(p) => JointLayout::from_file(p)?,
        None => JointLayout::h1(),
    })
}

fn read_log(path: &Path) -> anyhow::Result<RolloutLog> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(RolloutLog::read_jsonl(BufReader::new(f))?)
}

fn reward_context(cfg: &Config) -> anyhow::Result<RewardContext> {
    let mut ctx = RewardContext::new(&layout(cfg)?);
    if let Some(w) = cfg.reward.weights {
        ctx.weights = w;
    }
    if let Some(form) = cfg.reward.contact_reward_form {
        ctx.contact_swing.form = form;
    }
    if let Some(s) = cfg.reward.sigma {
        ctx.contact = ContactModelParams::new(s)?;
    }
    Ok(ctx)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Cmd::Clock {
            gait: g,
            f,
            sigma,
            dt,
            cycles,
            out,
        } => {
            let c = &cfg.clock;
            let preset = gait(&c.gait.clone().unwrap_or(g))?;
            let params = ContactModelParams::new(pick(c.sigma, sigma))?;
            let trace = clock_trace(
                preset,
                pick(c.f, f),
                pick(c.dt, dt),
                &params,
                pick(c.cycles, cycles),
            )?;
            let mut w = output(out.as_deref())?;
            writeln!(w, "t,phi1,phi2,phibar1,phibar2,clockL,clockR,C1,C2")?;
            for s in trace {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    s.t,
                    s.phi[0],
                    s.phi[1],
                    s.phi_bar[0],
                    s.phi_bar[1],
                    s.clock[0],
                    s.clock[1],
                    s.contact[0],
                    s.contact[1]
                )?;
            }
            w.flush()?;
        }
        Cmd::Traj {
            l,
            start_z,
            end_z,
            samples,
            out,
            svg,
        } => {
            let c = &cfg.traj;
            let profile = SwingProfile {
                start_z: pick(c.start_z, start_z),
                end_z: pick(c.end_z, end_z),
                ..SwingProfile::flat(pick(c.l, l))
            };
            profile.validate()?;
            let samples = pick(c.samples, samples);
            if samples < 2 {
                bail!(Error::Config("samples must be >= 2".into()));
            }
            let mut rows = Vec::with_capacity(samples);
            for k in 0..samples {
                let phi_bar = (k as f64 / (samples - 1) as f64).min(1.0);
                let z = target_height(phi_bar, &profile)?;
                let (v, a) = target_derivatives(phi_bar, &profile)?;
                rows.push([phi_bar, z, v, a]);
            }
            let mut w = output(out.as_deref())?;
            writeln!(w, "phibar,height,velocity,acceleration")?;
            for r in &rows {
                writeln!(w, "{},{},{},{}", r[0], r[1], r[2], r[3])?;
            }
            w.flush()?;
            if let Some(path) = svg {
                let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
                let z: Vec<f64> = rows.iter().map(|r| r[1]).collect();
                let plot = line_plot(
                    "Swing height target",
                    "homogenized phase",
                    &x,
                    &[Series {
                        label: "height (m)",
                        values: &z,
                    }],
                );
                std::fs::write(&path, plot)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Cmd::SampleCommands {
            gait: g,
            n,
            seed,
            out,
        } => {
            let c = &cfg.sample_commands;
            let preset = gait(&c.gait.clone().unwrap_or(g))?;
            let mut ranges = CommandRanges::for_gait(preset.kind);
            ranges.apply_overrides(&c.ranges)?;
            let mut rng = ChaCha8Rng::seed_from_u64(pick(c.seed, seed));
            let mut w = output(out.as_deref())?;
            for _ in 0..pick(c.n, n) {
                let cmd = sample_command(&ranges, preset, None, &mut rng)?;
                serde_json::to_writer(&mut w, &cmd)?;
                writeln!(w)?;
            }
            w.flush()?;
        }
        Cmd::Reward { log, out } => {
            let log = read_log(&log)?;
            let ctx = reward_context(&cfg)?;
            let breakdowns = reward_breakdowns(&log, &ctx)?;
            if breakdowns.is_empty() {
                bail!(Error::Empty("rollout log"));
            }
            let n = breakdowns.len() as f64;
            let mut stdout = io::stdout().lock();
            writeln!(
                stdout,
                "{:<30} {:>14} {:>10} {:>14} {:>14} {:>7}",
                "term", "group", "weight", "mean raw", "mean reward", "masked"
            )?;
            for (i, term) in RewardTerm::ALL.iter().enumerate() {
                let raw = breakdowns.iter().map(|b| b.terms[i].raw).sum::<f64>() / n;
                let contrib = breakdowns
                    .iter()
                    .map(|b| b.terms[i].contribution())
                    .sum::<f64>()
                    / n;
                let masked = breakdowns.iter().filter(|b| b.terms[i].masked).count();
                writeln!(
                    stdout,
                    "{:<30} {:>14} {:>10} {:>14.6e} {:>14.6e} {:>7}",
                    term.name(),
                    format!("{:?}", term.group()).to_lowercase(),
                    ctx.weights.get(*term),
                    raw,
                    contrib,
                    masked
                )?;
            }
            let total = breakdowns.iter().map(|b| b.total()).sum::<f64>() / n;
            writeln!(
                stdout,
                "{:<30} {:>14} {:>10} {:>14} {:>14.6e}",
                "total", "", "", "", total
            )?;

            let mut w = output(Some(&out))?;
            let names: Vec<&str> = RewardTerm::ALL.iter().map(|t| t.name()).collect();
            writeln!(w, "step,t,{},total", names.join(","))?;
            for (rec, b) in log.records.iter().zip(&breakdowns) {
                let vals: Vec<String> = b
                    .terms
                    .iter()
                    .map(|t| t.contribution().to_string())
                    .collect();
                writeln!(
                    w,
                    "{},{},{},{}",
                    rec.step.index,
                    rec.step.t,
                    vals.join(","),
                    b.total()
                )?;
            }
            w.flush()?;
        }
        Cmd::Metrics { log, out } => {
            let log = read_log(&log)?;
            let report = tracking_error(&log.steps(), &log.commands())?;
            let mut w = output(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
        }
        Cmd::Intervene {
            steps,
            p,
            seed,
            out,
        } => {
            let c = &cfg.intervene;
            let mut rng = ChaCha8Rng::seed_from_u64(pick(c.seed, seed));
            let stats = run_length_stats(pick(c.steps, steps), pick(c.p, p), &mut rng)?;
            let mut w = output(out.as_deref())?;
            writeln!(w, "run_length,count")?;
            for (len, count) in &stats.histogram {
                writeln!(w, "{len},{count}")?;
            }
            w.flush()?;
            eprintln!(
                "runs {}  mean {:.3}  variance {:.1}",
                stats.runs, stats.mean, stats.variance
            );
        }
        Cmd::Rollout {
            gait: g,
            vx,
            vy,
            omega,
            f,
            l,
            h,
            p,
            w,
            steps,
            lag,
            seed,
            p_flip,
            alpha,
            resample_every,
            out,
            export_dir,
            svg,
        } => {
            let c = &cfg.rollout;
            let preset = gait(&c.gait.clone().unwrap_or(g))?;
            let mut cmd = CommandVector::defaults(preset);
            for (channel, cfg_val, flag) in [
                (Channel::Vx, c.vx, vx),
                (Channel::Vy, c.vy, vy),
                (Channel::Omega, c.omega, omega),
                (Channel::Frequency, c.f, f),
                (Channel::SwingHeight, c.l, l),
                (Channel::BodyHeight, c.h, h),
                (Channel::BodyPitch, c.p, p),
                (Channel::WaistYaw, c.w, w),
            ] {
                if let Some(v) = cfg_val.or(flag) {
                    cmd.set(channel, v);
                }
            }
            let mut oc = OracleConfig::new(cmd, pick(c.steps, steps));
            oc.lag = pick(c.lag, lag);
            oc.seed = pick(c.seed, seed);
            oc.resample_every = c.resample_every.or(resample_every);
            if let Some(pf) = c.p_flip.or(p_flip) {
                oc.intervention = Some(InterventionSettings {
                    p_flip: pf,
                    alpha: pick(c.alpha, alpha),
                    ..InterventionSettings::default()
                });
            }
            let log = run_oracle_rollout_with_layout(&oc, layout(&cfg)?)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            log.write_jsonl(BufWriter::new(file))?;
            if let Some(dir) = export_dir {
                export_curves(&log, &dir, svg)?;
            }
        }
        Cmd::TrainToy {
            epochs,
            seed,
            beta,
            out,
        } => {
            let c = &cfg.train_toy;
            let mut config = ToyConfig {
                epochs: pick(c.epochs, epochs),
                ..ToyConfig::default()
            };
            if let Some(n) = c.episodes_per_epoch {
                config.episodes_per_epoch = n;
            }
            if let Some(lr) = c.learning_rate {
                config.learning_rate = lr;
            }
            if let Some(coeffs) = c.coefficients {
                config.coefficients = coeffs;
            }
            if let Some(b) = beta {
                if c.coefficients.is_none() {
                    config.coefficients.beta = b;
                }
            }
            if let Some(net) = &cfg.net {
                config.net = net.clone();
            }
            let report = run_toy_ppo(&config, pick(c.seed, seed))?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "epoch,mean_abs_error,sym_loss,mean_reward")?;
            writeln!(
                stdout,
                "init,{},{},",
                report.initial.mean_abs_error, report.initial.sym_loss
            )?;
            for e in &report.epochs {
                writeln!(
                    stdout,
                    "{},{},{},{}",
                    e.epoch, e.eval.mean_abs_error, e.eval.sym_loss, e.mean_reward
                )?;
            }
            if let Some(path) = out {
                let mut w = output(Some(&path))?;
                serde_json::to_writer_pretty(&mut w, &report)?;
                writeln!(w)?;
                w.flush()?;
            }
            if let Some(epoch) = report.diverged_at {
                bail!(Error::NonFinite(if epoch == 0 {
                    "first epoch loss"
                } else {
                    "training loss"
                }));
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_numeric() => 3,
        Some(Error::Io(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use raqsim::config::{load_config, Config};
use raqsim::constants::{dbm_to_watts, linear_to_db};
use raqsim::output::{emit_outputs, read_csv, write_geometry, write_svg};
use raqsim::rates::{asymptotic_limit, lower_bound, Asymptote, GapReport, Scheme};
use raqsim::sweep::{run_sweep, Preset, SweepSpec};
use raqsim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "raqsim",
    version,
    about = "RAQ-MIMO uplink link-level simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the figure sweeps and write a CSV (and optionally an SVG).
    Run {
        #[arg(long)]
        config: PathBuf,
        /// fig-M, fig-K or fig-P
        #[arg(long)]
        preset: String,
        /// Channel realizations per point (default: from config)
        #[arg(long)]
        trials: Option<usize>,
        /// Master seed (default: from config)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Write the user drop (positions and large-scale gains) here
        #[arg(long)]
        dump_channel: Option<PathBuf>,
    },
    /// Print the front-end model of both receivers.
    Frontend {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print closed-form bounds, limits and gaps for the configured drop.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Energy budget for the power-scaling limit, dBm·s (default: P_s)
        #[arg(long)]
        energy_dbm: Option<f64>,
    },
    /// Render an SVG from an existing results CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the default configuration template.
    Template {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("RAQSIM_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidParameter {
                name: "RAQSIM_THREADS",
                reason: format!("expected a positive integer, got `{v}`"),
            }),
        _ => Ok(None),
    }
}

fn run(
    config: &Path,
    preset: &str,
    trials: Option<usize>,
    seed: Option<u64>,
    out: &Path,
    plot: Option<&Path>,
    dump: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let preset: Preset = preset.parse()?;
    let mut spec = SweepSpec::preset(preset, &cfg);
    if let Some(t) = trials {
        spec.trials = t;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    let threads = threads_from_env()?;
    let start = Instant::now();
    let result = run_sweep(&spec, &cfg, threads)?;
    emit_outputs(&result.rows, out, plot)?;
    if let Some(d) = dump {
        write_geometry(&result.geometry, &result.profile, d)?;
    }
    let failed = result.rows.iter().filter(|r| !r.err.is_empty()).count();
    log::info!(
        "{}: {} rows, {} with errors, {} trials per point, {:.1} s",
        preset.name(),
        result.rows.len(),
        failed,
        spec.trials,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn row(name: &str, value: impl std::fmt::Display, unit: &str) {
    println!("{name:<38} {value:>16} {unit}");
}

fn frontend(path: &Path) -> Result<()> {
    let cfg = load_config(path)?;
    let fr = cfg.fronts(cfg.array.elements)?;
    let r = &fr.report;
    let resp = &r.response;
    println!("RAQ-MIMO element");
    row("susceptibility Re χ", format!("{:.6e}", r.chi.re), "");
    row("susceptibility Im χ", format!("{:.6e}", r.chi.im), "");
    row(
        "slope Re dχ/dΩl",
        format!("{:.6e}", r.chi_slope.re),
        "s/rad",
    );
    row(
        "slope Im dχ/dΩl",
        format!("{:.6e}", r.chi_slope.im),
        "s/rad",
    );
    row(
        "probe input power",
        format!("{:.6e}", r.probe_input_power),
        "W",
    );
    row(
        "probe output power",
        format!("{:.6e}", r.probe_output.power),
        "W",
    );
    row(
        "probe output phase",
        format!("{:.6}", r.probe_output.phase),
        "rad",
    );
    row("dispersion κ", format!("{:.6e}", resp.kappa), "");
    row(
        "dispersion ψ",
        resp.psi.map_or("undefined".into(), |p| format!("{p:.6}")),
        "rad",
    );
    row(
        "local optical phase",
        format!("{:.6}", r.chain.local_phase),
        "rad",
    );
    row(
        "composite phase φ",
        format!("{:.6}", resp.composite_phase),
        "rad",
    );
    row("cos²φ", format!("{:.6}", resp.cos2_phase()), "");
    row("interacting atoms N", format!("{:.6e}", r.atom_count), "");
    row("gain ρ", format!("{:.6e}", resp.gain), "");
    row(
        "effective aperture A_e",
        format!("{:.6e}", resp.effective_aperture),
        "m²",
    );
    row(
        "SQL noise power σ²",
        format!("{:.6e}", resp.noise_power),
        "W",
    );
    let raq_snr = resp.effective_gain() * resp.effective_aperture / resp.noise_power;
    row("ρcos²φ·A_e/σ²", format!("{:.6e}", raq_snr), "1/W");
    println!();
    println!("M-MIMO element");
    let mm = &fr.mmimo_front;
    row("gain ρ0", format!("{:.6e}", mm.gain()), "");
    row("aperture A0", format!("{:.6e}", mm.aperture), "m²");
    row("noise power σ²", format!("{:.6e}", mm.noise_power), "W");
    let mm_snr = mm.gain() * mm.aperture / mm.noise_power;
    row("ρ0·A0/σ²", format!("{:.6e}", mm_snr), "1/W");
    println!();
    row(
        "SNR advantage",
        format!("{:.3}", linear_to_db(raq_snr / mm_snr)),
        "dB",
    );
    Ok(())
}

fn analyze(path: &Path, energy_dbm: Option<f64>) -> Result<()> {
    let cfg = load_config(path)?;
    let m = cfg.array.elements;
    let k = cfg.users.count;
    let ps = cfg.transmit_power_w();
    let fr = cfg.fronts(m)?;
    let (_, profile) = cfg.large_scale(k, cfg.simulation.seed)?;
    let beta = &profile.beta;
    let energy = dbm_to_watts(energy_dbm.unwrap_or(cfg.users.transmit_power_dbm));
    let raq = |s: Scheme| fr.raq.bound_inputs(s, beta, ps);
    let mm = |s: Scheme| fr.mmimo.bound_inputs(s, beta, ps);
    println!(
        "M = {m}, K = {k}, P_s = {} dBm, seed = {}, shadowing = {} dB",
        cfg.users.transmit_power_dbm, cfg.simulation.seed, cfg.users.shadowing_db
    );
    println!();
    println!(
        "{:>4} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "user",
        "beta_dB",
        "RAQ_MRC",
        "RAQ_ZF",
        "MM_MRC",
        "MM_ZF",
        "C1",
        "C3_RAQ",
        "C3_MM",
        "dR_k",
        "dR~_k"
    );
    let zf_ok = m > k;
    let gaps = if zf_ok && k >= 2 {
        Some(GapReport::compute(&raq(Scheme::Zf), &mm(Scheme::Zf))?)
    } else {
        None
    };
    let fmt = |r: Result<f64>| r.map_or("-".to_string(), |v| format!("{v:.4}"));
    for (u, &b) in beta.iter().enumerate() {
        let c1 = if k >= 2 {
            fmt(asymptotic_limit(
                &raq(Scheme::Mrc),
                u,
                Asymptote::InterferenceLimited,
            ))
        } else {
            "-".into()
        };
        let (dr, drt) = match &gaps {
            Some(g) => (
                format!("{:.4}", g.zf_mrc[u].delta_rate),
                format!("{:.4}", g.raq_mmimo[u].delta_rate),
            ),
            None => ("-".into(), "-".into()),
        };
        println!(
            "{:>4} {:>9.3} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8} {:>8} {:>8}",
            u + 1,
            linear_to_db(b),
            fmt(lower_bound(&raq(Scheme::Mrc), u)),
            fmt(lower_bound(&raq(Scheme::Zf), u)),
            fmt(lower_bound(&mm(Scheme::Mrc), u)),
            fmt(lower_bound(&mm(Scheme::Zf), u)),
            c1,
            fmt(asymptotic_limit(
                &raq(Scheme::Zf),
                u,
                Asymptote::PowerScaling { energy }
            )),
            fmt(asymptotic_limit(
                &mm(Scheme::Zf),
                u,
                Asymptote::PowerScaling { energy }
            )),
            dr,
            drt
        );
    }
    println!();
    if let Some(g) = gaps {
        row(
            "Ratio₂ (RAQ over M-MIMO SINR)",
            format!("{:.6e}", g.raq_mmimo[0].ratio),
            "",
        );
        row("mean ΔR̃_k", format!("{:.4}", g.mean_raq_gain), "bit/s/Hz");
        row(
            "mean ΔR_k (ZF over MRC, RAQ)",
            format!("{:.4}", g.mean_delta_rate),
            "bit/s/Hz",
        );
        row(
            "mean ΔR_k, large M",
            format!("{:.4}", g.mean_delta_rate_large_array),
            "bit/s/Hz",
        );
        row(
            "ΔR = log2((M−K)/(M−1))",
            format!("{:.4}", g.zf_mrc[0].array_penalty),
            "bit/s/Hz",
        );
    } else {
        println!("gap formulas need M > K ≥ 2");
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            preset,
            trials,
            seed,
            out,
            plot,
            dump_channel,
        } => run(
            &config,
            &preset,
            trials,
            seed,
            &out,
            plot.as_deref(),
            dump_channel.as_deref(),
        ),
        Command::Frontend { config } => frontend(&config),
        Command::Analyze { config, energy_dbm } => analyze(&config, energy_dbm),
        Command::Plot { csv, out } => write_svg(&read_csv(csv)?, out),
        Command::Template { out } => {
            let text = Config::template().to_json_pretty() + "\n";
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

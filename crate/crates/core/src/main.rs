use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cogam::oracle::McConfig;
use cogam::selftest;
use cogam::sweep::{self, Mode, PointSpec, SweepConfig, SweepResult};

#[derive(Parser)]
#[command(
    name = "cogam",
    version,
    about = "Capacity and adaptive-modulation spectral efficiency of multi-user cognitive radio links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Osa,
    Ss,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep described by a TOML config and write CSV.
    Sweep {
        config: PathBuf,
        /// Output path; overrides `output` in the config. `-` is stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Override a config key, e.g. `--set mc.samples=100000`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Evaluate a single point and print one CSV row.
    Point {
        #[arg(long, value_enum, default_value = "osa")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p_av_db: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q_av_db: f64,
        #[arg(long, default_value_t = 1)]
        users: u32,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1e-3)]
        ber: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,4,8,16,64")]
        sizes: Vec<u32>,
        /// Also run a Monte Carlo check with this many samples.
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compare analytic results with simulation at representative points.
    Validate {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Allowed distance in Monte Carlo standard errors.
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
    },
    /// Run fast internal consistency checks.
    Selftest,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> cogam::Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            config,
            output,
            overrides,
        } => {
            let cfg = SweepConfig::load(&config, &overrides)?;
            let res = sweep::run_sweep(&cfg)?;
            let failures = res.rows.iter().filter(|r| r.metrics.is_err()).count();
            match output.or_else(|| cfg.output.clone()) {
                Some(p) if p.as_os_str() != "-" => sweep::emit_csv(&res, &p)?,
                _ => write_stdout(&res)?,
            }
            if failures > 0 {
                eprintln!(
                    "{failures} of {} points failed; see the error column",
                    res.rows.len()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Point {
            mode,
            p_av_db,
            q_av_db,
            users,
            m,
            ber,
            sizes,
            mc_samples,
            seed,
        } => {
            let mut text = format!("mode = \"{}\"\naxis = \"{}\"\n", mode_name(mode), "p_av_db");
            text += &format!(
                "range = [{p_av_db:?}, {p_av_db:?}, 1.0]\nnum_users = [{users}]\nm = [{m:?}]\n\
                 p_av_db = {p_av_db:?}\nq_av_db = {q_av_db:?}\nber_target = {ber:?}\n\
                 constellation = {sizes:?}\n"
            );
            if let Some(n) = mc_samples {
                text += &format!("[mc]\nvalidate = true\nsamples = {n}\nseed = {seed}\n");
            }
            let cfg = SweepConfig::parse(&text, &[])?;
            let res = sweep::run_sweep(&cfg)?;
            write_stdout(&res)?;
            Ok(if res.rows.iter().all(|r| r.metrics.is_ok()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Validate {
            samples,
            seed,
            sigmas,
        } => validate(samples, seed, sigmas),
        Command::Selftest => {
            let checks = selftest::run_selftest();
            let mut ok = true;
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                ok &= c.passed;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Osa => "osa",
        ModeArg::Ss => "ss",
    }
}

fn write_stdout(res: &SweepResult) -> cogam::Result<()> {
    let stdout = std::io::stdout();
    sweep::write_csv(res, stdout.lock()).map_err(|source| cogam::Error::Csv {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn describe(p: &PointSpec) -> String {
    let mode = match p.mode {
        Mode::Osa => "osa",
        Mode::Ss => "ss",
    };
    format!(
        "{mode} P={} dB Q={} dB L={} m={}",
        p.p_av_db, p.q_av_db, p.users, p.m
    )
}

fn validate(samples: u64, seed: u64, sigmas: f64) -> cogam::Result<ExitCode> {
    let cfg = McConfig::new(samples, seed);
    let mut ok = true;
    let mut out = std::io::stdout().lock();
    for (i, p) in selftest::validation_points().iter().enumerate() {
        let v = selftest::validate_point(
            p,
            &McConfig {
                seed: seed.wrapping_add(16 * i as u64),
                ..cfg
            },
        )?;
        for (name, c) in ["capacity", "se_cr", "se_dr"].iter().zip(&v.metrics) {
            let pass = c.sigmas() <= sigmas || c.estimate.mean == c.analytic;
            ok &= pass;
            let _ = writeln!(
                out,
                "{} {} {name}: analytic {:.6} mc {:.6} ± {:.2e} ({:.2} sigma)",
                if pass { "PASS" } else { "FAIL" },
                describe(p),
                c.analytic,
                c.estimate.mean,
                c.estimate.stderr,
                c.sigmas()
            );
        }
        for (name, e) in ["capacity", "se_cr", "se_dr"].iter().zip(&v.power) {
            let dev = (e.mean - v.budget).abs() / e.stderr;
            let saturated = *name == "se_dr" && v.dr_saturated;
            let pass = dev <= sigmas || (saturated && e.mean <= v.budget);
            ok &= pass;
            let _ = writeln!(
                out,
                "{} {} {name} power: budget {:.6} mc {:.6} ± {:.2e} ({:.2} sigma){}",
                if pass { "PASS" } else { "FAIL" },
                describe(p),
                v.budget,
                e.mean,
                e.stderr,
                dev,
                if saturated { ", saturated" } else { "" }
            );
        }
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

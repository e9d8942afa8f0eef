//! Thin command-line front end over the library: `run` a single episode,
//! `sweep` a parameter grid into a CSV plus plot script, or `verify` the
//! solver against brute-force enumeration.

use std::path::PathBuf;
use std::process::ExitCode;

use ra_idnc::channel::ErasureModel;
use ra_idnc::config;
use ra_idnc::sim::{
    emit_csv, emit_plot_script, run_episode, run_sweep, summarize, EpisodeConfig, SweepAxis,
    SweepSpec,
};
use ra_idnc::verify;
use ra_idnc::SchedulerKind;

const USAGE: &str = "\
ra-idnc — rate-aware instantly decodable network coding simulator

USAGE:
  ra-idnc run   [--users N] [--messages N] [--msg-size BITS] [--scheduler NAME]
                [--seed N] [--config PATH]
  ra-idnc sweep --axis users|messages|msg_size|shadowing_std --values A,B,C
                --out PATH [--seeds N] [--schemes a,b,c] [--config PATH]
  ra-idnc verify [--trials N] [--instances N] [--seed N]

Schedulers: ra_idnc | ra_idnc_multilayer | classical_idnc | broadcast | unicast | oracle

The optional config file holds flat `key = value` pairs (users, messages,
msg_size_bits, scheduler, seed, tx_power_dbm_per_hz, noise_dbm_per_hz,
sinr_gap_db, bandwidth_hz, cell_diameter_m, shadowing_std_db,
pathloss_exponent, pathloss_ref_db, fading_kind, erasure_kind,
erasure_epsilon, position_seed, harmonic_bootstrap, max_transmissions,
exact_threshold). Command-line flags override file values.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };
    let result = match command.as_str() {
        "run" => cmd_run(&args[1..]),
        "sweep" => cmd_sweep(&args[1..]),
        "verify" => cmd_verify(&args[1..]),
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => Err(CliError::Usage(format!("unknown command '{other}'"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: usage: {msg}\n\n{USAGE}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    Usage(String),
    Run(String),
}

struct Flags {
    pairs: Vec<(String, String)>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(CliError::Usage(format!("unexpected argument '{arg}'")));
            };
            if let Some((k, v)) = name.split_once('=') {
                pairs.push((k.to_string(), v.to_string()));
            } else {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("missing value for --{name}")))?;
                pairs.push((name.to_string(), value.clone()));
            }
        }
        Ok(Flags { pairs })
    }

    fn take(&mut self, name: &str) -> Option<String> {
        let i = self.pairs.iter().position(|(k, _)| k == name)?;
        Some(self.pairs.remove(i).1)
    }

    fn finish(self) -> Result<(), CliError> {
        if let Some((k, _)) = self.pairs.first() {
            return Err(CliError::Usage(format!("unknown flag --{k}")));
        }
        Ok(())
    }
}

fn parse<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| CliError::Usage(format!("cannot parse --{name} value '{value}'")))
}

fn base_config(flags: &mut Flags) -> Result<EpisodeConfig, CliError> {
    let mut config = EpisodeConfig::new(10, 10);
    if let Some(path) = flags.take("config") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Run(format!("cannot read config {path}: {e}")))?;
        config::load_into(&mut config, &text).map_err(|e| CliError::Run(e.to_string()))?;
    }
    if let Some(v) = flags.take("users") {
        config.users = parse("users", &v)?;
    }
    if let Some(v) = flags.take("messages") {
        config.messages = parse("messages", &v)?;
    }
    if let Some(v) = flags.take("msg-size") {
        config.msg_size_bits = parse("msg-size", &v)?;
    }
    if let Some(v) = flags.take("scheduler") {
        config.scheduler = parse("scheduler", &v)?;
    }
    if let Some(v) = flags.take("seed") {
        config.seed = parse("seed", &v)?;
    }
    Ok(config)
}

fn cmd_run(args: &[String]) -> Result<(), CliError> {
    let mut flags = Flags::parse(args)?;
    let config = base_config(&mut flags)?;
    flags.finish()?;

    let result = run_episode(&config).map_err(|e| CliError::Run(e.to_string()))?;
    println!(
        "scheme={} users={} messages={} msg_size_bits={} seed={}",
        config.scheduler, config.users, config.messages, config.msg_size_bits, config.seed
    );
    match result.completion_s {
        Some(c) => println!(
            "completed in {} transmissions, overall completion {:.6} s",
            result.transmissions, c
        ),
        None => println!(
            "guard tripped after {} transmissions ({:.6} s elapsed, not complete)",
            result.transmissions, result.wall_clock_s
        ),
    }
    println!(
        "mean delay {:.6} s, max delay {:.6} s",
        result.mean_delay_s(),
        result.max_delay_s()
    );
    println!("user  completion_s  delay_s  harmonic_rate_bps");
    for u in 0..result.users {
        println!(
            "{:>4}  {:>12}  {:>7.4}  {:>17}",
            u,
            result.per_user_completion_s[u]
                .map(|c| format!("{c:.6}"))
                .unwrap_or_else(|| "-".into()),
            result.per_user_delay_s[u],
            result.harmonic_rates_bps[u]
                .map(|r| format!("{r:.1}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    Ok(())
}

fn cmd_sweep(args: &[String]) -> Result<(), CliError> {
    let mut flags = Flags::parse(args)?;
    let axis: SweepAxis = parse(
        "axis",
        &flags
            .take("axis")
            .ok_or_else(|| CliError::Usage("--axis is required".into()))?,
    )?;
    let values: Vec<f64> = flags
        .take("values")
        .ok_or_else(|| CliError::Usage("--values is required".into()))?
        .split(',')
        .map(|v| parse("values", v.trim()))
        .collect::<Result<_, _>>()?;
    let out = PathBuf::from(
        flags
            .take("out")
            .ok_or_else(|| CliError::Usage("--out is required".into()))?,
    );
    let seeds: u64 = match flags.take("seeds") {
        Some(v) => parse("seeds", &v)?,
        None => 20,
    };
    let schedulers: Vec<SchedulerKind> = match flags.take("schemes") {
        Some(v) => v
            .split(',')
            .map(|s| parse("schemes", s.trim()))
            .collect::<Result<_, _>>()?,
        None => vec![
            SchedulerKind::RaIdnc,
            SchedulerKind::RaIdncMultilayer,
            SchedulerKind::ClassicalIdnc,
            SchedulerKind::Broadcast,
            SchedulerKind::Unicast,
        ],
    };
    let base = base_config(&mut flags)?;
    flags.finish()?;

    let spec = SweepSpec {
        axis,
        values,
        seeds,
        base,
        schedulers,
    };
    let rows = run_sweep(&spec).map_err(|e| CliError::Run(e.to_string()))?;
    emit_csv(&rows, &out).map_err(|e| CliError::Run(e.to_string()))?;
    let script_path = out.with_extension("py");
    emit_plot_script(axis, &out.to_string_lossy(), &script_path)
        .map_err(|e| CliError::Run(e.to_string()))?;

    println!("wrote {} rows to {}", rows.len(), out.display());
    println!("wrote plot script to {}", script_path.display());
    println!();
    println!(
        "{:>14}  {:<20} {:>9} {:>14} {:>14}",
        axis.column(),
        "scheme",
        "episodes",
        "mean_s",
        "std_s"
    );
    for p in summarize(&rows, axis) {
        println!(
            "{:>14}  {:<20} {:>9} {:>14.6} {:>14.6}",
            p.axis_value,
            p.scheme.name(),
            p.episodes,
            p.mean_completion_s,
            p.std_completion_s
        );
    }
    Ok(())
}

fn cmd_verify(args: &[String]) -> Result<(), CliError> {
    let mut flags = Flags::parse(args)?;
    let trials: usize = match flags.take("trials") {
        Some(v) => parse("trials", &v)?,
        None => 1000,
    };
    let instances: usize = match flags.take("instances") {
        Some(v) => parse("instances", &v)?,
        None => 200,
    };
    let seed: u64 = match flags.take("seed") {
        Some(v) => parse("seed", &v)?,
        None => 1,
    };
    flags.finish()?;

    let mut failed = false;
    match verify::check_oracle_equivalence(trials, seed, ErasureModel::Perfect) {
        Ok(r) => println!(
            "oracle equivalence: PASS ({} trials, max |diff| {:.3e})",
            r.trials, r.max_abs_diff
        ),
        Err(e) => {
            println!("oracle equivalence: FAIL ({e})");
            failed = true;
        }
    }
    match verify::check_bijection(instances, seed) {
        Ok(r) => println!(
            "clique/transmission bijection: PASS ({} instances, {} cliques, {} pairs)",
            r.instances, r.cliques_checked, r.pairs_checked
        ),
        Err(e) => {
            println!("clique/transmission bijection: FAIL ({e})");
            failed = true;
        }
    }
    match verify::check_multilayer(trials, seed) {
        Ok(r) => println!(
            "multi-layer consistency: PASS ({} trials, max |diff| {:.3e})",
            r.trials, r.max_abs_diff
        ),
        Err(e) => {
            println!("multi-layer consistency: FAIL ({e})");
            failed = true;
        }
    }
    if failed {
        Err(CliError::Run("verification failed".into()))
    } else {
        Ok(())
    }
}

//! Sweeps the shadowing standard deviation. More shadowing spreads the
//! capacity distribution: unicast rides the maximum and speeds up, broadcast
//! pays the minimum and slows down, and the rate-aware scheme stays between
//! the two by re-balancing targets against rate every transmission.

use ra_idnc::sim::{
    emit_csv, emit_plot_script, run_sweep, summarize, EpisodeConfig, SweepAxis, SweepSpec,
};
use ra_idnc::SchedulerKind;
use std::path::Path;

fn main() {
    let mut base = EpisodeConfig::new(20, 40);
    base.msg_size_bits = 1_000_000;
    let spec = SweepSpec {
        axis: SweepAxis::ShadowingStd,
        values: vec![0.0, 2.0, 4.0, 8.0],
        seeds: 20,
        base,
        schedulers: vec![
            SchedulerKind::RaIdnc,
            SchedulerKind::Broadcast,
            SchedulerKind::Unicast,
        ],
    };

    let rows = run_sweep(&spec).expect("sweep runs");
    emit_csv(&rows, Path::new("sweep_shadowing.csv")).expect("csv written");
    emit_plot_script(
        spec.axis,
        "sweep_shadowing.csv",
        Path::new("sweep_shadowing.py"),
    )
    .expect("plot script written");

    println!(
        "wrote sweep_shadowing.csv ({} rows) and sweep_shadowing.py",
        rows.len()
    );
    println!(
        "\n{:>12}  {:<12} {:>16} {:>10}",
        "shadow (dB)", "scheme", "mean compl (s)", "std (s)"
    );
    for p in summarize(&rows, spec.axis) {
        println!(
            "{:>12}  {:<12} {:>16.4} {:>10.4}",
            p.axis_value,
            p.scheme.name(),
            p.mean_completion_s,
            p.std_completion_s
        );
    }
}

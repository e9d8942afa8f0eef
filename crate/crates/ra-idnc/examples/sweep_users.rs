//! Sweeps the number of users and writes `sweep_users.csv` plus a matching
//! plot script. Mean completion per scheme is printed at the end.

use ra_idnc::sim::{
    emit_csv, emit_plot_script, run_sweep, summarize, EpisodeConfig, SweepAxis, SweepSpec,
};
use ra_idnc::SchedulerKind;
use std::path::Path;

fn main() {
    let mut base = EpisodeConfig::new(5, 20);
    base.msg_size_bits = 1_000_000;
    let spec = SweepSpec {
        axis: SweepAxis::Users,
        values: vec![5.0, 10.0, 15.0, 20.0],
        seeds: 20,
        base,
        schedulers: vec![
            SchedulerKind::RaIdnc,
            SchedulerKind::RaIdncMultilayer,
            SchedulerKind::ClassicalIdnc,
            SchedulerKind::Broadcast,
            SchedulerKind::Unicast,
        ],
    };

    let rows = run_sweep(&spec).expect("sweep runs");
    emit_csv(&rows, Path::new("sweep_users.csv")).expect("csv written");
    emit_plot_script(spec.axis, "sweep_users.csv", Path::new("sweep_users.py"))
        .expect("plot script written");

    println!(
        "wrote sweep_users.csv ({} rows) and sweep_users.py",
        rows.len()
    );
    println!(
        "\n{:>6}  {:<20} {:>16} {:>10}",
        "users", "scheme", "mean compl (s)", "std (s)"
    );
    for p in summarize(&rows, spec.axis) {
        println!(
            "{:>6}  {:<20} {:>16.4} {:>10.4}",
            p.axis_value,
            p.scheme.name(),
            p.mean_completion_s,
            p.std_completion_s
        );
    }
    println!("\nrender the figure with: python3 sweep_users.py");
}

//! Runs every scheme on the same channel realizations and tabulates
//! completion times. Channel randomness is seeded per episode, so the
//! schemes face identical capacity draws transmission for transmission.

use ra_idnc::{run_episode, EpisodeConfig, SchedulerKind};

fn main() {
    let schemes = [
        SchedulerKind::RaIdnc,
        SchedulerKind::RaIdncMultilayer,
        SchedulerKind::ClassicalIdnc,
        SchedulerKind::Broadcast,
        SchedulerKind::Unicast,
        SchedulerKind::Oracle,
    ];

    println!("10 users x 8 messages of 1 Mb, seeds 0..5, mean over seeds\n");
    println!(
        "{:<20} {:>16} {:>15} {:>12}",
        "scheme", "completion (s)", "transmissions", "max delay"
    );
    for scheme in schemes {
        let mut completion = 0.0;
        let mut transmissions = 0.0;
        let mut max_delay = 0.0;
        let seeds = 5u64;
        for seed in 0..seeds {
            let mut config = EpisodeConfig::new(10, 8);
            config.scheduler = scheme;
            config.msg_size_bits = 1_000_000;
            config.seed = seed;
            let result = run_episode(&config).expect("episode runs");
            completion += result.completion_s.unwrap();
            transmissions += result.transmissions as f64;
            max_delay += result.max_delay_s();
        }
        println!(
            "{:<20} {:>16.4} {:>15.1} {:>12.4}",
            scheme.name(),
            completion / seeds as f64,
            transmissions / seeds as f64,
            max_delay / seeds as f64
        );
    }
}

//! Under perfect channel estimation a feasible-rate transmission is never
//! lost, so the rate-blind coded scheme and plain broadcast move in lockstep
//! (both send the first round at the bottleneck rate and finish with it).
//! A base erasure probability changes that: retransmissions become
//! necessary, coding opportunities open up, and the schemes separate.

use ra_idnc::channel::ErasureModel;
use ra_idnc::{run_episode, EpisodeConfig, SchedulerKind};

fn main() {
    let schemes = [
        SchedulerKind::RaIdnc,
        SchedulerKind::ClassicalIdnc,
        SchedulerKind::Broadcast,
    ];
    let seeds = 10u64;

    for eps in [0.0, 0.1, 0.3] {
        let erasure = if eps == 0.0 {
            ErasureModel::Perfect
        } else {
            ErasureModel::Offset(eps)
        };
        println!("base erasure probability {eps}:");
        for scheme in schemes {
            let mut completion = 0.0;
            let mut transmissions = 0.0;
            for seed in 0..seeds {
                let mut config = EpisodeConfig::new(12, 10);
                config.msg_size_bits = 1_000_000;
                config.erasure = erasure;
                config.scheduler = scheme;
                config.seed = seed;
                let result = run_episode(&config).expect("episode runs");
                completion += result.completion_s.unwrap();
                transmissions += result.transmissions as f64;
            }
            println!(
                "  {:<16} mean completion {:>8.4} s over {:>6.1} transmissions",
                scheme.name(),
                completion / seeds as f64,
                transmissions / seeds as f64
            );
        }
        println!();
    }
}

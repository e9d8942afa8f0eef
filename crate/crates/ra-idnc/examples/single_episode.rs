//! Runs one rate-aware episode and prints the transmission log.

use ra_idnc::{run_episode, EpisodeConfig, SchedulerKind};

fn main() {
    let mut config = EpisodeConfig::new(6, 8);
    config.scheduler = SchedulerKind::RaIdnc;
    config.msg_size_bits = 1_000_000;
    config.seed = 7;

    let result = run_episode(&config).expect("episode runs");

    println!(
        "scheme {} | {} users x {} messages | seed {}",
        config.scheduler, config.users, config.messages, config.seed
    );
    println!("\n  t  combo          rate (Mb/s)  targets          decoded-by");
    for (t, rec) in result.log.iter().enumerate() {
        let decoded: Vec<usize> = rec
            .outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.decoded.is_some())
            .map(|(u, _)| u)
            .collect();
        println!(
            "{:>3}  {:<13} {:>11.2}  {:<16} {:?}",
            t + 1,
            rec.combo.to_string(),
            rec.rate_bps / 1e6,
            format!("{:?}", rec.targets),
            decoded
        );
    }

    println!(
        "\ncompleted in {} transmissions, overall completion {:.4} s",
        result.transmissions,
        result.completion_s.unwrap()
    );
    println!("per-user completion/delay:");
    for u in 0..result.users {
        println!(
            "  user {u}: completion {:.4} s, delay {:.4} s, harmonic rate {:.1} Mb/s",
            result.per_user_completion_s[u].unwrap(),
            result.per_user_delay_s[u],
            result.harmonic_rates_bps[u].unwrap() / 1e6
        );
    }
}

//! Rate-aware instantly decodable network coding for single-cell downlink
//! broadcast.
//!
//! A base station must deliver `F` equal-size messages to `U` users over an
//! erasure channel where every user sees a different achievable rate. Coded
//! XOR combinations let one transmission serve several users at once, but a
//! combination is only useful to a user that misses exactly one of its
//! messages — and only if the chosen physical-layer rate does not exceed that
//! user's capacity. Serving more users therefore means transmitting slower.
//! This crate implements schedulers that resolve the trade-off per
//! transmission by solving a maximum-weight clique problem on a graph whose
//! vertices pair (user, wanted message, feasible rate), together with the
//! channel model, the completion-time accounting, and a deterministic
//! simulation harness that compares the schemes.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! examples/
//! ├── worked_instance.rs      # the coding graph on a 3-user instance, step by step
//! ├── single_episode.rs       # one episode with a full transmission log
//! ├── compare_schedulers.rs   # all schemes on the same channel realization
//! ├── multilayer.rs           # how layered selection widens a tied optimum
//! ├── erasure_effects.rs      # offset erasures separate the coded baselines
//! ├── sweep_users.rs          # completion vs. user count, CSV + plot script
//! └── sweep_shadowing.rs      # completion vs. shadowing spread
//! ```
//!
//! ```bash
//! cargo run --release --example worked_instance
//! cargo run --release --example single_episode
//! cargo run --release --example compare_schedulers
//! cargo run --release --example multilayer
//! cargo run --release --example erasure_effects
//! cargo run --release --example sweep_users
//! cargo run --release --example sweep_shadowing
//! ```
//!
//! ## Library quick start
//!
//! ```
//! use ra_idnc::{run_episode, EpisodeConfig, SchedulerKind};
//!
//! let mut config = EpisodeConfig::new(8, 10);
//! config.scheduler = SchedulerKind::RaIdnc;
//! config.seed = 1;
//! let result = run_episode(&config).unwrap();
//! assert!(result.completed);
//! println!(
//!     "{} finished in {} transmissions, {:.4} s",
//!     config.scheduler,
//!     result.transmissions,
//!     result.completion_s.unwrap()
//! );
//! ```
//!
//! A thin `ra-idnc` binary wraps the same entry points behind `run`, `sweep`
//! and `verify` subcommands; see the README.
//!
//! ## Module map
//!
//! - [`model`] — message sets, Has/Wants side information, state updates.
//! - [`channel`] — capacity snapshots from path loss, shadowing and fading;
//!   erasure models.
//! - [`metrics`] — per-user running statistics, anticipated completion
//!   times, decisive-user sets.
//! - [`graph`] — the rate-aware coding graph and its layered subgraphs.
//! - [`clique`] — exact and greedy maximum-weight clique solvers.
//! - [`sched`] — the rate-aware selectors, three baselines, and the
//!   brute-force reference.
//! - [`sim`] — episodes, sweeps, CSV output, plot scripts.
//! - [`verify`] — randomized equivalence and bijection checks.

mod bitset;

pub mod channel;
pub mod clique;
pub mod config;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod sched;
pub mod sim;
pub mod verify;

pub use channel::{
    capacity_bps, sample_snapshot, CapacitySnapshot, ChannelParams, ErasureModel, Fading,
};
pub use clique::{is_clique, max_weight_clique, CliqueSolution};
pub use graph::{candidate_rates, RaIdncGraph};
pub use metrics::{
    anticipated_completion, decisive_set, DecisiveQuery, HarmonicBootstrap, UserStats,
};
pub use model::{
    decoded_message, is_instantly_decodable, MessageSet, NetworkState, SideInfo, Transmission,
};
pub use sched::{brute_force_best, decide, Decision, SchedulerKind, SchedulerOpts};
pub use sim::{
    emit_csv, emit_plot_script, run_episode, run_sweep, summarize, EpisodeConfig, EpisodeResult,
    SimError, SweepAxis, SweepRow, SweepSpec,
};

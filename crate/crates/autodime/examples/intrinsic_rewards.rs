//! Roll out a fresh student and score the episode with each intrinsic
//! teacher reward: value prediction error, value disagreement, and policy
//! disagreement.
//!
//! ```bash
//! cargo run --release --example intrinsic_rewards
//! ```

use autodime::agent::{collect_episode, StudentBundle, StudentConfig};
use autodime::env::{
    classify_difficulty, generate_layout, uniform_spawn, Action, OBSERVATION_DIM,
};
use autodime::seed::{child_rng, Stream};
use autodime::teacher::{pd_reward, vd_reward, vpe_reward};

fn main() {
    let cfg = StudentConfig::default();
    let bundle = StudentBundle::new(OBSERVATION_DIM, Action::COUNT, &cfg, 42).expect("bundle");

    let mut spawn_rng = child_rng(42, Stream::Spawn, 0);
    let mut rollout_rng = child_rng(42, Stream::Rollout, 0);
    let params = autodime::env::EnvParams::default();

    println!("episode  difficulty   return      vpe       vd       pd");
    for seed in 0..8u64 {
        let layout = generate_layout(seed, 12, 12, 6).expect("layout");
        let spawn = uniform_spawn(&mut spawn_rng, &layout).expect("spawn");
        let traj =
            collect_episode(&bundle, &layout, &spawn, &params, &mut rollout_rng).expect("rollout");
        let pd = pd_reward(&traj, &bundle.policy, &bundle.clone_policy).expect("pd");
        println!(
            "{seed:7}  {:10}  {:7.2}  {:7.3}  {:7.3}  {:7.3}",
            classify_difficulty(&layout, &spawn).label(),
            traj.total_reward(),
            vpe_reward(&traj),
            vd_reward(&traj),
            pd,
        );
    }
    println!();
    println!("An untrained ensemble disagrees everywhere, so vd is nonzero even on");
    println!("impossible spawns; after training on a fixed environment it decays.");
}
